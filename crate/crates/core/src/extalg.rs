//! Exterior algebra Λ(V) over Q on degree-one generators.
//!
//! Monomials are bitmasks over the generators of an [`AlgebraContext`];
//! bit `i` is generator `i` in the context's fixed order and every sign is
//! relative to that order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{factorial, Rational};

pub const MAX_GENERATORS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtAlgError {
    #[error("classes live in different algebra contexts")]
    ContextMismatch,
    #[error("no image given for generator {0}")]
    MissingImage(String),
    #[error("image of generator {0} is not of pure degree one")]
    NonLinearImage(String),
    #[error("exponential needs even-degree input, found a term of degree {0}")]
    OddDegreeTerm(u32),
    #[error("exponential needs a class without constant term")]
    ConstantTerm,
}

/// Ordered degree-one generators of an exterior algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraContext {
    labels: Vec<String>,
}

impl AlgebraContext {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Arc<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        assert!(labels.len() <= MAX_GENERATORS, "too many generators");
        for (i, l) in labels.iter().enumerate() {
            assert!(!labels[..i].contains(l), "duplicate generator label {l}");
        }
        Arc::new(AlgebraContext { labels })
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The orientation monomial: all generators in context order.
    pub fn orientation(&self) -> Monomial {
        Monomial::full(self.dimension())
    }
}

/// A set of generator indices; degree is the popcount.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn full(n: usize) -> Monomial {
        if n == 64 {
            Monomial(u64::MAX)
        } else {
            Monomial((1u64 << n) - 1)
        }
    }

    pub fn generator(i: usize) -> Monomial {
        Monomial(1u64 << i)
    }

    pub fn from_indices(indices: &[usize]) -> Monomial {
        Monomial(indices.iter().fold(0, |m, &i| m | (1u64 << i)))
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    /// `e_self ∧ e_other` as a signed monomial, or `None` if they share a generator.
    #[inline]
    pub fn wedge(self, other: Monomial) -> Option<(Monomial, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        Some((
            Monomial(self.0 | other.0),
            wedge_sign_negative(self.0, other.0),
        ))
    }

    /// Sign `ε` with `e_S ∧ e_{complement} = ε · orientation`; `true` means −1.
    pub fn complement_sign_negative(self, full: Monomial) -> bool {
        wedge_sign_negative(self.0, full.0 & !self.0)
    }
}

/// Parity of the inversions in the concatenated index sequence `a ++ b`.
#[inline]
pub(crate) fn wedge_sign_negative(a: u64, b: u64) -> bool {
    let mut parity = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        parity ^= (a >> j >> 1).count_ones() & 1;
    }
    parity == 1
}

/// Sparse element of Λ(V) with exact coefficients.
#[derive(Clone)]
pub struct ExtClass {
    ctx: Arc<AlgebraContext>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for ExtClass {
    fn eq(&self, other: &Self) -> bool {
        same_context(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for ExtClass {}

fn same_context(a: &Arc<AlgebraContext>, b: &Arc<AlgebraContext>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn collect_terms(acc: HashMap<Monomial, Rational>) -> BTreeMap<Monomial, Rational> {
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

impl ExtClass {
    pub fn zero(ctx: &Arc<AlgebraContext>) -> Self {
        ExtClass {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Arc<AlgebraContext>) -> Self {
        Self::scalar(ctx, Rational::one())
    }

    pub fn scalar(ctx: &Arc<AlgebraContext>, c: Rational) -> Self {
        Self::monomial(ctx, Monomial::ONE, c)
    }

    pub fn generator(ctx: &Arc<AlgebraContext>, i: usize) -> Self {
        assert!(i < ctx.dimension());
        Self::monomial(ctx, Monomial::generator(i), Rational::one())
    }

    pub fn monomial(ctx: &Arc<AlgebraContext>, m: Monomial, c: Rational) -> Self {
        assert!(
            ctx.dimension() == 64 || m.0 >> ctx.dimension() == 0,
            "monomial outside context"
        );
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        ExtClass {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub fn from_terms(
        ctx: &Arc<AlgebraContext>,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        ExtClass {
            ctx: ctx.clone(),
            terms: collect_terms(acc),
        }
    }

    pub fn context(&self) -> &Arc<AlgebraContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Rational)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn coefficient(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn same_context(&self, other: &ExtClass) -> bool {
        same_context(&self.ctx, &other.ctx)
    }

    fn check(&self, other: &ExtClass) -> Result<(), ExtAlgError> {
        if self.same_context(other) {
            Ok(())
        } else {
            Err(ExtAlgError::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &ExtClass) -> Result<ExtClass, ExtAlgError> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let e = terms.entry(*m).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        Ok(ExtClass {
            ctx: self.ctx.clone(),
            terms,
        })
    }

    pub fn scale(&self, s: &Rational) -> ExtClass {
        if s.is_zero() {
            return ExtClass::zero(&self.ctx);
        }
        ExtClass {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(&m, c)| (m, c * s)).collect(),
        }
    }

    /// Intersection product.
    pub fn wedge(&self, other: &ExtClass) -> Result<ExtClass, ExtAlgError> {
        self.check(other)?;
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (&ma, ca) in &self.terms {
            for (&mb, cb) in &other.terms {
                if let Some((m, neg)) = ma.wedge(mb) {
                    let prod = ca * cb;
                    let e = acc.entry(m).or_insert_with(Rational::zero);
                    if neg {
                        *e -= prod;
                    } else {
                        *e += prod;
                    }
                }
            }
        }
        Ok(ExtClass {
            ctx: self.ctx.clone(),
            terms: collect_terms(acc),
        })
    }

    pub fn pow(&self, k: u32) -> ExtClass {
        let mut acc = ExtClass::one(&self.ctx);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Degree-`d` part.
    pub fn homogeneous(&self, d: u32) -> ExtClass {
        ExtClass {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(&m, c)| (m, c.clone()))
                .collect(),
        }
    }

    /// Nonzero graded parts keyed by degree; they sum back to `self`.
    pub fn graded_parts(&self) -> BTreeMap<u32, ExtClass> {
        let mut parts: BTreeMap<u32, ExtClass> = BTreeMap::new();
        for (&m, c) in &self.terms {
            parts
                .entry(m.degree())
                .or_insert_with(|| ExtClass::zero(&self.ctx))
                .terms
                .insert(m, c.clone());
        }
        parts
    }

    /// The single degree of a nonzero homogeneous class.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|m| m.degree());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// Applies `f(degree)` as a scalar on each graded piece.
    pub fn scale_by_degree(&self, f: impl Fn(u32) -> Rational) -> ExtClass {
        let terms = self
            .terms
            .iter()
            .map(|(&m, c)| (m, c * f(m.degree())))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        ExtClass {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// `exp` of a nilpotent even class without constant term.
    pub fn exp_even(&self) -> Result<ExtClass, ExtAlgError> {
        for m in self.terms.keys() {
            let d = m.degree();
            if d == 0 {
                return Err(ExtAlgError::ConstantTerm);
            }
            if d % 2 == 1 {
                return Err(ExtAlgError::OddDegreeTerm(d));
            }
        }
        let mut sum = ExtClass::one(&self.ctx);
        let mut power = ExtClass::one(&self.ctx);
        let mut k = 0u32;
        loop {
            k += 1;
            power = &power * self;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power.scale(&factorial(k).recip());
        }
        Ok(sum)
    }

    /// Coefficient of the orientation monomial.
    pub fn integral(&self, orientation: Monomial) -> Rational {
        debug_assert_eq!(orientation, self.ctx.orientation());
        self.coefficient(orientation)
    }

    /// Applies the algebra map sending generator `i` to the linear form
    /// `images[i]` (sparse `(target generator, coefficient)` list).
    pub(crate) fn map_linear(
        &self,
        target: &Arc<AlgebraContext>,
        images: &[Vec<(usize, Rational)>],
    ) -> ExtClass {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (&m, c) in &self.terms {
            let mut partial: HashMap<u64, Rational> = HashMap::new();
            partial.insert(0, c.clone());
            for i in m.indices() {
                let mut next: HashMap<u64, Rational> = HashMap::with_capacity(partial.len());
                for (mask, coef) in &partial {
                    for (k, a) in &images[i] {
                        let bit = 1u64 << k;
                        if mask & bit != 0 {
                            continue;
                        }
                        let neg = (mask >> k >> 1).count_ones() & 1 == 1;
                        let v = coef * a;
                        let e = next.entry(mask | bit).or_insert_with(Rational::zero);
                        if neg {
                            *e -= v;
                        } else {
                            *e += v;
                        }
                    }
                }
                next.retain(|_, v| !v.is_zero());
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            for (mask, v) in partial {
                *acc.entry(Monomial(mask)).or_insert_with(Rational::zero) += v;
            }
        }
        ExtClass {
            ctx: target.clone(),
            terms: collect_terms(acc),
        }
    }

    /// Terms by degree, then lexicographically in generator index, with the context labels.
    pub fn format_monomials(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by_key(|m| (m.degree(), std::cmp::Reverse(m.0.reverse_bits())));
        let mut out = String::new();
        for (n, m) in keys.into_iter().enumerate() {
            let c = &self.terms[m];
            let name: Vec<&str> = m.indices().map(|i| self.ctx.labels[i].as_str()).collect();
            let name = name.join("*");
            crate::format::push_term(&mut out, n == 0, c, &name);
        }
        out
    }
}

impl fmt::Debug for ExtClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_monomials())
    }
}

impl fmt::Display for ExtClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_monomials())
    }
}

/// Extends `images` multiplicatively to an algebra map `Λ(from) -> Λ(to)` and applies it.
pub fn algebra_map(
    ctx_from: &Arc<AlgebraContext>,
    ctx_to: &Arc<AlgebraContext>,
    images: &[ExtClass],
    cls: &ExtClass,
) -> Result<ExtClass, ExtAlgError> {
    if !same_context(cls.context(), ctx_from) {
        return Err(ExtAlgError::ContextMismatch);
    }
    let mut linear = Vec::with_capacity(ctx_from.dimension());
    for (i, label) in ctx_from.labels().iter().enumerate() {
        let img = images
            .get(i)
            .ok_or_else(|| ExtAlgError::MissingImage(label.clone()))?;
        if !same_context(img.context(), ctx_to) {
            return Err(ExtAlgError::ContextMismatch);
        }
        let mut form = Vec::new();
        for (m, c) in img.terms() {
            if m.degree() != 1 {
                return Err(ExtAlgError::NonLinearImage(label.clone()));
            }
            form.push((m.0.trailing_zeros() as usize, c.clone()));
        }
        linear.push(form);
    }
    Ok(cls.map_linear(ctx_to, &linear))
}

pub fn integral(cls: &ExtClass, orientation: Monomial) -> Rational {
    cls.integral(orientation)
}

pub fn wedge(a: &ExtClass, b: &ExtClass) -> Result<ExtClass, ExtAlgError> {
    a.wedge(b)
}

pub fn exp_even(cls: &ExtClass) -> Result<ExtClass, ExtAlgError> {
    cls.exp_even()
}

impl Add for &ExtClass {
    type Output = ExtClass;
    fn add(self, rhs: &ExtClass) -> ExtClass {
        self.try_add(rhs)
            .expect("adding classes from different contexts")
    }
}

impl Sub for &ExtClass {
    type Output = ExtClass;
    fn sub(self, rhs: &ExtClass) -> ExtClass {
        self + &(-rhs)
    }
}

impl Neg for &ExtClass {
    type Output = ExtClass;
    fn neg(self) -> ExtClass {
        ExtClass {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(&m, c)| (m, -c)).collect(),
        }
    }
}

impl Mul for &ExtClass {
    type Output = ExtClass;
    fn mul(self, rhs: &ExtClass) -> ExtClass {
        self.wedge(rhs)
            .expect("multiplying classes from different contexts")
    }
}
