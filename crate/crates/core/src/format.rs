//! Canonical text for rationals and sums of terms.

use num_traits::{One, Signed, Zero};

use crate::exactla::Rational;

/// `a/b` in lowest terms, integers without a denominator.
pub fn rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Appends `coef*name` to a sum, folding signs into the separator.
/// An empty `name` is a scalar term.
pub fn push_term(out: &mut String, first: bool, coef: &Rational, name: &str) {
    let negative = coef.is_negative();
    let abs = coef.abs();
    if first {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    if name.is_empty() {
        out.push_str(&rational(&abs));
    } else if abs.is_one() {
        out.push_str(name);
    } else {
        out.push_str(&rational(&abs));
        out.push('*');
        out.push_str(name);
    }
}

pub fn sum<'a>(terms: impl IntoIterator<Item = (&'a Rational, String)>) -> String {
    let mut out = String::new();
    let mut first = true;
    for (c, name) in terms {
        if c.is_zero() {
            continue;
        }
        push_term(&mut out, first, c, &name);
        first = false;
    }
    if first {
        out.push('0');
    }
    out
}
