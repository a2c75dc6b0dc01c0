//! Class expressions: tokenizer, parser and exact evaluator.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '#' | '/') unary)*     '*' and '#' never mixed
//! unary   := '-' unary | 'F' unary | power
//! power   := atom ('^' integer)?
//! atom    := integer | identifier | 'exp' '(' sum ')' | '(' sum ')'
//! ```
//!
//! On a single variety the identifiers are `x1..xg`, `y1..yg`, `theta`, `pt`
//! and `one`. On `A × A` they are `x{i}_{k}`, `y{i}_{k}`, `theta_1`, `theta_2`,
//! `wp` (the Poincaré class), `diag` (the diagonal class) and `one`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use sl2chow::abvar::{
    fourier, poincare_class, point_class, pontryagin, CohClass, PolarizedContext, ProductVariety,
};
use sl2chow::corr::diagonal_class;
use sl2chow::Rational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at column {}: {message}", .pos + 1)]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier '{name}' at column {}", .pos + 1)]
    UnknownIdentifier { name: String, pos: usize },
    #[error("'*' and '#' mixed without parentheses at column {}", .pos + 1)]
    MixedProductAmbiguity { pos: usize },
    #[error("divisor at column {} is not a nonzero scalar", .pos + 1)]
    BadDivisor { pos: usize },
    #[error(transparent)]
    Eval(#[from] sl2chow::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ExprError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((Token::Int(text.parse().expect("digits")), pos));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((Token::Ident(text), pos));
        } else if "+-*#/^()".contains(c) {
            out.push((Token::Sym(c), pos));
            i += 1;
        } else {
            return Err(ExprError::Syntax {
                pos,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

/// Abstract syntax of a class expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassExpression {
    Integer(BigInt),
    Identifier {
        name: String,
        pos: usize,
    },
    Neg(Box<ClassExpression>),
    Fourier(Box<ClassExpression>),
    Exp(Box<ClassExpression>),
    Power(Box<ClassExpression>, u32),
    Add(Box<ClassExpression>, Box<ClassExpression>),
    Sub(Box<ClassExpression>, Box<ClassExpression>),
    Intersect(Box<ClassExpression>, Box<ClassExpression>),
    Pontryagin(Box<ClassExpression>, Box<ClassExpression>),
    Divide {
        num: Box<ClassExpression>,
        den: Box<ClassExpression>,
        pos: usize,
    },
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn error(&self, message: String) -> ExprError {
        let message = match self.peek() {
            None => format!("{message}, found end of input"),
            Some(_) => message,
        };
        ExprError::Syntax {
            pos: self.pos(),
            message,
        }
    }

    fn sum(&mut self) -> Result<ClassExpression, ExprError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = ClassExpression::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = ClassExpression::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<ClassExpression, ExprError> {
        let mut lhs = self.unary()?;
        let mut kind: Option<char> = None;
        loop {
            let pos = self.pos();
            let op = match self.peek() {
                Some(Token::Sym(c)) if matches!(c, '*' | '#' | '/') => *c,
                _ => return Ok(lhs),
            };
            self.at += 1;
            if op != '/' {
                if kind.is_some_and(|k| k != op) {
                    return Err(ExprError::MixedProductAmbiguity { pos });
                }
                kind = Some(op);
            }
            let rhs = Box::new(self.unary()?);
            lhs = match op {
                '*' => ClassExpression::Intersect(Box::new(lhs), rhs),
                '#' => ClassExpression::Pontryagin(Box::new(lhs), rhs),
                _ => ClassExpression::Divide {
                    num: Box::new(lhs),
                    den: rhs,
                    pos,
                },
            };
        }
    }

    fn unary(&mut self) -> Result<ClassExpression, ExprError> {
        if self.eat('-') {
            return Ok(ClassExpression::Neg(Box::new(self.unary()?)));
        }
        if self.peek() == Some(&Token::Ident("F".into())) {
            self.at += 1;
            return Ok(ClassExpression::Fourier(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ClassExpression, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exponent = match self.peek() {
            Some(Token::Int(n)) => {
                u32::try_from(n.clone()).map_err(|_| self.error("exponent too large".into()))?
            }
            _ => return Err(self.error("expected a nonnegative integer exponent".into())),
        };
        self.at += 1;
        if self.peek() == Some(&Token::Sym('^')) {
            return Err(self.error("chained exponents need parentheses".into()));
        }
        Ok(ClassExpression::Power(Box::new(base), exponent))
    }

    fn atom(&mut self) -> Result<ClassExpression, ExprError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.at += 1;
                Ok(ClassExpression::Integer(n))
            }
            Some(Token::Ident(name)) if name == "exp" => {
                self.at += 1;
                self.expect('(')?;
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(ClassExpression::Exp(Box::new(inner)))
            }
            Some(Token::Ident(name)) if name == "F" => {
                Err(self.error("'F' needs an argument".into()))
            }
            Some(Token::Ident(name)) => {
                self.at += 1;
                Ok(ClassExpression::Identifier { name, pos })
            }
            Some(Token::Sym('(')) => {
                self.at += 1;
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            _ => Err(self.error("expected a number, identifier or '('".into())),
        }
    }
}

impl ClassExpression {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let mut p = Parser {
            tokens: tokenize(src)?,
            at: 0,
            end: src.len(),
        };
        let e = p.sum()?;
        if p.peek().is_some() {
            return Err(p.error("unexpected trailing input".into()));
        }
        Ok(e)
    }

    /// Evaluates on a single variety or on `A × A`.
    pub fn evaluate(&self, v: &ProductVariety) -> Result<CohClass, ExprError> {
        use ClassExpression::*;
        Ok(match self {
            Integer(n) => v.scalar(Rational::from_integer(n.clone())),
            Identifier { name, pos } => {
                identifier(v, name)?.ok_or_else(|| ExprError::UnknownIdentifier {
                    name: name.clone(),
                    pos: *pos,
                })?
            }
            Neg(a) => -&a.evaluate(v)?,
            Fourier(a) => fourier(&a.evaluate(v)?)?,
            Exp(a) => a.evaluate(v)?.exp()?,
            Power(a, k) => a.evaluate(v)?.pow(*k),
            Add(a, b) => &a.evaluate(v)? + &b.evaluate(v)?,
            Sub(a, b) => &a.evaluate(v)? - &b.evaluate(v)?,
            Intersect(a, b) => &a.evaluate(v)? * &b.evaluate(v)?,
            Pontryagin(a, b) => pontryagin(&a.evaluate(v)?, &b.evaluate(v)?)?,
            Divide { num, den, pos } => {
                let d = den.evaluate(v)?;
                let c = d.value().coefficient(sl2chow::extalg::Monomial::ONE);
                if c.is_zero() || d != v.scalar(c.clone()) {
                    return Err(ExprError::BadDivisor { pos: *pos });
                }
                num.evaluate(v)?.scale(&c.recip())
            }
        })
    }
}

fn index_in(text: &str, g: usize) -> Option<usize> {
    if text.starts_with('0') {
        return None;
    }
    let i: usize = text.parse().ok()?;
    (1..=g).contains(&i).then_some(i - 1)
}

fn identifier(v: &ProductVariety, name: &str) -> Result<Option<CohClass>, ExprError> {
    let g = v.g();
    if name == "one" {
        return Ok(Some(v.one()));
    }
    if v.factors() == 1 {
        return Ok(match name {
            "theta" => Some(v.theta_on(0)),
            "pt" => Some(point_class(v)?),
            _ => {
                let (head, rest) = name.split_at(1);
                let i = index_in(rest, g);
                match (head, i) {
                    ("x", Some(i)) => Some(v.x(0, i)),
                    ("y", Some(i)) => Some(v.y(0, i)),
                    _ => None,
                }
            }
        });
    }
    let factor = |s: &str| index_in(s, v.factors());
    Ok(match name {
        "wp" if v.factors() == 2 => Some(poincare_class(v)?),
        "diag" if v.factors() == 2 => Some(diagonal_class(v.context()).into_value()),
        _ => {
            let Some((head, k)) = name.split_once('_') else {
                return Ok(None);
            };
            let Some(k) = factor(k) else {
                return Ok(None);
            };
            if head == "theta" {
                return Ok(Some(v.theta_on(k)));
            }
            let (letter, rest) = head.split_at(head.len().min(1));
            match (letter, index_in(rest, g)) {
                ("x", Some(i)) => Some(v.x(k, i)),
                ("y", Some(i)) => Some(v.y(k, i)),
                _ => None,
            }
        }
    })
}

/// Parses and evaluates `src` on the single variety of `ctx`.
pub fn parse(src: &str, ctx: &Arc<PolarizedContext>) -> Result<CohClass, ExprError> {
    ClassExpression::parse(src)?.evaluate(&ProductVariety::single(ctx))
}

/// Parses and evaluates `src` on `A × A`.
pub fn parse_pair(src: &str, ctx: &Arc<PolarizedContext>) -> Result<CohClass, ExprError> {
    let pair = ProductVariety::new(ctx, 2)?;
    ClassExpression::parse(src)?.evaluate(&pair)
}

/// Canonical text: a polynomial in `theta` when the class lies in `Q[θ]`,
/// otherwise monomials in the canonical order.
pub fn render(z: &CohClass) -> String {
    if let Some(coeffs) = z.theta_polynomial() {
        let names = (0..coeffs.len()).map(|k| match k {
            0 => String::new(),
            1 => "theta".to_string(),
            _ => format!("theta^{k}"),
        });
        return sl2chow::format::sum(coeffs.iter().zip(names));
    }
    z.value().format_monomials()
}

impl fmt::Display for ClassExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ClassExpression::*;
        match self {
            Integer(n) => write!(f, "{n}"),
            Identifier { name, .. } => f.write_str(name),
            Neg(a) => write!(f, "-({a})"),
            Fourier(a) => write!(f, "F({a})"),
            Exp(a) => write!(f, "exp({a})"),
            Power(a, k) => write!(f, "({a})^{k}"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Intersect(a, b) => write!(f, "({a} * {b})"),
            Pontryagin(a, b) => write!(f, "({a} # {b})"),
            Divide { num, den, .. } => write!(f, "({num} / {den})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sl2chow::exactla::rat;

    fn ctx(t: &[u64]) -> Arc<PolarizedContext> {
        PolarizedContext::new(t.len(), t.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        let c = ctx(&[1, 2]);
        assert_eq!(parse("theta^2/2", &c).unwrap().integral(), rat(2));
        assert_eq!(
            parse("x1*y1 + 2*x2*y2", &c).unwrap(),
            parse("theta", &c).unwrap()
        );
        assert!(parse("x1*x1", &c).unwrap().is_zero());
        assert_eq!(parse("pt", &c).unwrap().integral(), rat(1));
        assert_eq!(render(&parse("F 1", &ctx(&[1])).unwrap()), "-theta");
    }

    #[test]
    fn precedence() {
        let c = ctx(&[1, 1]);
        let p = |s: &str| parse(s, &c).unwrap();
        assert_eq!(p("1 + theta^2*2"), p("1 + (theta^2)*2"));
        assert_eq!(p("-theta^2"), -&p("theta^2"));
        assert_eq!(p("1/2*theta^2"), p("theta^2/2"));
        assert_eq!(p("2 - 1 - 1"), p("0"));
        assert_eq!(p("F theta"), fourier(&p("theta")).unwrap());
        assert_eq!(p("pt # theta"), p("theta"));
        assert_eq!(p("(x1 * y1) # (x2 * y2)"), p("(x1*y1)#(x2*y2)"));
        assert_eq!(p("exp(theta)"), p("1 + theta + theta^2/2"));
    }

    #[test]
    fn errors() {
        let c = ctx(&[1, 1]);
        assert!(matches!(
            parse("theta * pt # theta", &c),
            Err(ExprError::MixedProductAmbiguity { pos: 11 })
        ));
        assert!(matches!(
            parse("x3", &c),
            Err(ExprError::UnknownIdentifier { pos: 0, .. })
        ));
        assert!(matches!(
            parse("x0 + 1", &c),
            Err(ExprError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse("1 +", &c),
            Err(ExprError::Syntax { pos: 3, .. })
        ));
        assert!(matches!(parse("(1", &c), Err(ExprError::Syntax { .. })));
        assert!(matches!(
            parse("1 $ 2", &c),
            Err(ExprError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse("theta^2^2", &c),
            Err(ExprError::Syntax { .. })
        ));
        assert!(matches!(
            parse("theta/x1", &c),
            Err(ExprError::BadDivisor { .. })
        ));
        assert!(matches!(
            parse("theta/0", &c),
            Err(ExprError::BadDivisor { .. })
        ));
        assert!(matches!(
            parse("wp", &c),
            Err(ExprError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse_pair("F wp", &c),
            Err(ExprError::Eval(sl2chow::Error::NotSingleFactor))
        ));
    }

    #[test]
    fn pair_identifiers() {
        let c = ctx(&[1]);
        let wp = parse_pair("wp", &c).unwrap();
        let by_hand = parse_pair("x1_1*y1_2 + x1_2*y1_1", &c).unwrap();
        assert_eq!(wp.homogeneous(2), wp);
        assert_eq!(
            parse_pair("theta_1 + theta_2", &c).unwrap(),
            parse_pair("x1_1*y1_1 + x1_2*y1_2", &c).unwrap()
        );
        assert!(wp == by_hand || wp == -&by_hand);
        assert_eq!(parse_pair("diag", &c).unwrap().integral(), rat(0));
        assert!(matches!(
            parse_pair("theta", &c),
            Err(ExprError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse_pair("theta_3", &c),
            Err(ExprError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn render_forms() {
        let c = ctx(&[1, 2]);
        let p = |s: &str| parse(s, &c).unwrap();
        assert_eq!(render(&p("exp(theta)")), "1 + theta + 1/2*theta^2");
        assert_eq!(render(&p("0")), "0");
        assert_eq!(render(&p("-3/2")), "-3/2");
        assert_eq!(render(&p("x1 - 2*y2")), "x1 - 2*y2");
    }
}
