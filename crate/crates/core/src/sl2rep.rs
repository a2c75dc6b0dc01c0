//! Finite-dimensional `sl₂`-modules: bracket checks, lowest-weight
//! decomposition, free modules on primitive generators and the `SL₂(ℚ)`
//! action obtained by exponentiating the nilpotent generators.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactla::{eigenspace_split, kernel_basis, rat, span_rank, LinearMap, Rational, Vector};
use crate::format;

/// `(X, Y, H)` acting on `ℚ^dim`.
#[derive(Clone, Debug)]
pub struct Sl2Triple {
    x: LinearMap,
    y: LinearMap,
    h: LinearMap,
    labels: Option<Vec<String>>,
    brackets_ok: OnceLock<bool>,
}

impl Sl2Triple {
    pub fn new(x: LinearMap, y: LinearMap, h: LinearMap) -> Result<Self> {
        let n = x.domain_dim();
        for m in [&x, &y, &h] {
            if m.domain_dim() != n || m.codomain_dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.codomain_dim(),
                });
            }
        }
        Ok(Sl2Triple {
            x,
            y,
            h,
            labels: None,
            brackets_ok: OnceLock::new(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// The defining representation on `ℚ²`.
    pub fn standard() -> Self {
        let x = LinearMap::from_int_rows(&[vec![0, 1], vec![0, 0]]);
        let y = LinearMap::from_int_rows(&[vec![0, 0], vec![1, 0]]);
        let h = LinearMap::from_int_rows(&[vec![1, 0], vec![0, -1]]);
        Sl2Triple::new(x, y, h).expect("square")
    }

    pub fn dim(&self) -> usize {
        self.x.domain_dim()
    }

    pub fn x(&self) -> &LinearMap {
        &self.x
    }

    pub fn y(&self) -> &LinearMap {
        &self.y
    }

    pub fn h(&self) -> &LinearMap {
        &self.h
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Runs [`check_bracket`] once and remembers the outcome.
    pub fn ensure_brackets(&self) -> Result<()> {
        let ok = *self
            .brackets_ok
            .get_or_init(|| check_bracket(self).passed());
        if ok {
            Ok(())
        } else {
            Err(Error::BracketViolation(check_bracket(self).to_string()))
        }
    }

    /// H-eigenvalues in increasing order, with the matching eigenspace bases.
    pub fn weight_spaces(&self) -> Result<Vec<(i64, Vec<Vector>)>> {
        let n = self.dim();
        if self.h.is_diagonal() {
            let mut spaces: BTreeMap<i64, Vec<Vector>> = BTreeMap::new();
            for i in 0..n {
                let w = integer_weight(&self.h.get(i, i))?;
                let mut e = vec![Rational::zero(); n];
                e[i] = Rational::one();
                spaces.entry(w).or_default().push(e);
            }
            return Ok(spaces.into_iter().collect());
        }
        let bound = n as i64;
        let candidates: Vec<i64> = (-bound..=bound).collect();
        let evs: Vec<Rational> = candidates.iter().map(|&w| rat(w)).collect();
        let spaces = eigenspace_split(&self.h, &evs)
            .map_err(|e| Error::NotDecomposable(format!("H is not diagonalizable over Z: {e}")))?;
        Ok(candidates
            .into_iter()
            .zip(spaces)
            .filter(|(_, s)| !s.is_empty())
            .collect())
    }
}

fn integer_weight(r: &Rational) -> Result<i64> {
    if !r.is_integer() {
        return Err(Error::NotDecomposable(format!(
            "H eigenvalue {} is not an integer",
            format::rational(r)
        )));
    }
    r.to_integer()
        .to_i64()
        .ok_or_else(|| Error::NotDecomposable("H eigenvalue out of range".into()))
}

/// One failed bracket relation, located at its first differing matrix entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketFailure {
    pub relation: &'static str,
    pub row: usize,
    pub col: usize,
    pub expected: Rational,
    pub found: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BracketReport {
    pub failures: Vec<BracketFailure>,
}

impl BracketReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for BracketReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "[H,X] = 2X, [H,Y] = -2Y, [X,Y] = H all hold");
        }
        let parts: Vec<String> = self
            .failures
            .iter()
            .map(|b| {
                format!(
                    "{} fails at ({}, {}): expected {}, found {}",
                    b.relation,
                    b.row,
                    b.col,
                    format::rational(&b.expected),
                    format::rational(&b.found)
                )
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn first_difference(
    lhs: &LinearMap,
    rhs: &LinearMap,
) -> Option<(usize, usize, Rational, Rational)> {
    let diff = lhs.sub(rhs);
    let first = diff.entries().next().map(|(r, c, _)| (r, c));
    first.map(|(r, c)| (r, c, rhs.get(r, c), lhs.get(r, c)))
}

/// Exact check of `[H,X] = 2X`, `[H,Y] = −2Y`, `[X,Y] = H`.
pub fn check_bracket(t: &Sl2Triple) -> BracketReport {
    let two = rat(2);
    let relations: [(&'static str, LinearMap, LinearMap); 3] = [
        ("[H,X] = 2X", t.h.commutator(&t.x), t.x.scale(&two)),
        (
            "[H,Y] = -2Y",
            t.h.commutator(&t.y),
            t.y.scale(&-two.clone()),
        ),
        ("[X,Y] = H", t.x.commutator(&t.y), t.h.clone()),
    ];
    let failures = relations
        .into_iter()
        .filter_map(|(relation, lhs, rhs)| {
            first_difference(&lhs, &rhs).map(|(row, col, expected, found)| BracketFailure {
                relation,
                row,
                col,
                expected,
                found,
            })
        })
        .collect();
    BracketReport { failures }
}

fn combine(basis: &[Vector], coeffs: &[Rational], n: usize) -> Vector {
    let mut out = vec![Rational::zero(); n];
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

/// `ker Y` split by H-weight. Keys are the (nonpositive) weights `−λ`.
pub fn primitive_subspace(t: &Sl2Triple) -> Result<BTreeMap<i64, Vec<Vector>>> {
    t.ensure_brackets()?;
    let n = t.dim();
    let mut out = BTreeMap::new();
    for (w, space) in t.weight_spaces()? {
        let images: Vec<Vector> = space.iter().map(|v| t.y.apply(v)).collect();
        let restricted = LinearMap::from_columns(n, &images);
        let kernel = kernel_basis(&restricted);
        if kernel.is_empty() {
            continue;
        }
        if w > 0 {
            return Err(Error::NotDecomposable(format!(
                "primitive vector of positive weight {w}"
            )));
        }
        let vectors = kernel.iter().map(|k| combine(&space, k, n)).collect();
        out.insert(w, vectors);
    }
    Ok(out)
}

/// An irreducible summand with basis `z, Xz, …, X^λ z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub lambda: u32,
    pub basis: Vec<Vector>,
}

impl Block {
    pub fn lowest(&self) -> &Vector {
        &self.basis[0]
    }
}

/// Splits the module into irreducible blocks generated by primitive vectors.
pub fn decompose(t: &Sl2Triple) -> Result<Vec<Block>> {
    let n = t.dim();
    let prims = primitive_subspace(t)?;
    let mut blocks = Vec::new();
    let mut by_weight: BTreeMap<i64, Vec<Vector>> = BTreeMap::new();
    for (&w, vectors) in prims.iter() {
        let lambda = (-w) as u32;
        for z in vectors {
            let mut basis = vec![z.clone()];
            for _ in 0..lambda {
                let next = t.x.apply(basis.last().expect("nonempty"));
                basis.push(next);
            }
            if !t
                .x
                .apply(basis.last().expect("nonempty"))
                .iter()
                .all(Zero::is_zero)
            {
                return Err(Error::NotDecomposable(format!(
                    "X^{} does not kill a primitive vector of weight {w}",
                    lambda + 1
                )));
            }
            for (q, v) in basis.iter().enumerate() {
                by_weight
                    .entry(w + 2 * q as i64)
                    .or_default()
                    .push(v.clone());
            }
            blocks.push(Block { lambda, basis });
        }
    }
    let total: usize = blocks.iter().map(|b| b.basis.len()).sum();
    if total != n {
        return Err(Error::NotDecomposable(format!(
            "blocks span {total} dimensions out of {n}"
        )));
    }
    for (w, vectors) in &by_weight {
        if span_rank(vectors) != vectors.len() {
            return Err(Error::NotDecomposable(format!(
                "block vectors of weight {w} are dependent"
            )));
        }
    }
    Ok(blocks)
}

/// A primitive generator of a free module; `(p, s)` is an optional annotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeGenerator {
    pub label: String,
    pub lambda: u32,
    pub bidegree: Option<(Rational, i64)>,
}

impl FreeGenerator {
    pub fn new(label: impl Into<String>, lambda: i64) -> Result<Self> {
        if lambda < 0 {
            return Err(Error::NegativeLambda(lambda));
        }
        Ok(FreeGenerator {
            label: label.into(),
            lambda: lambda as u32,
            bidegree: None,
        })
    }

    /// `λ = g + s − 2p`, which must be a nonnegative integer.
    pub fn from_bidegree(label: impl Into<String>, g: u32, p: Rational, s: i64) -> Result<Self> {
        let lambda = rat(g as i64 + s) - &p * rat(2);
        let l = lambda
            .is_integer()
            .then(|| lambda.to_integer().to_i64())
            .flatten()
            .ok_or_else(|| {
                Error::InvalidBidegree(format!(
                    "g + s - 2p = {} is not an integer",
                    format::rational(&lambda)
                ))
            })?;
        let mut gen = FreeGenerator::new(label, l)?;
        gen.bidegree = Some((p, s));
        Ok(gen)
    }
}

/// `⊕ⱼ span{zⱼ, Xzⱼ, …, X^{λⱼ}zⱼ}`, ordered generator by generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeBeauvilleModule {
    pub g: u32,
    pub generators: Vec<FreeGenerator>,
}

impl FreeBeauvilleModule {
    pub fn dim(&self) -> usize {
        self.generators.iter().map(|z| z.lambda as usize + 1).sum()
    }

    /// Basis index of `X^q zⱼ`.
    pub fn index(&self, generator: usize, q: u32) -> usize {
        assert!(q <= self.generators[generator].lambda);
        let offset: usize = self.generators[..generator]
            .iter()
            .map(|z| z.lambda as usize + 1)
            .sum();
        offset + q as usize
    }

    pub fn basis_vector(&self, generator: usize, q: u32) -> Vector {
        let mut v = vec![Rational::zero(); self.dim()];
        v[self.index(generator, q)] = Rational::one();
        v
    }

    pub fn labels(&self) -> Vec<String> {
        self.generators
            .iter()
            .flat_map(|z| {
                (0..=z.lambda).map(move |q| match q {
                    0 => z.label.clone(),
                    1 => format!("X{}", z.label),
                    _ => format!("X^{q}{}", z.label),
                })
            })
            .collect()
    }
}

/// `X X^q z = X^{q+1} z`, `H X^q z = (2q − λ) X^q z`, `Y X^q z = q(λ − q + 1) X^{q−1} z`.
pub fn build_free_module(
    g: u32,
    generators: Vec<FreeGenerator>,
) -> Result<(FreeBeauvilleModule, Sl2Triple)> {
    let module = FreeBeauvilleModule { g, generators };
    let n = module.dim();
    let mut x = LinearMap::zero(n, n);
    let mut y = LinearMap::zero(n, n);
    let mut h = LinearMap::zero(n, n);
    for (j, z) in module.generators.iter().enumerate() {
        let l = z.lambda as i64;
        for q in 0..=z.lambda {
            let i = module.index(j, q);
            h.set(i, i, rat(2 * q as i64 - l));
            if q < z.lambda {
                x.set(i + 1, i, Rational::one());
            }
            if q > 0 {
                let qi = q as i64;
                y.set(i - 1, i, rat(qi * (l - qi + 1)));
            }
        }
    }
    let labels = module.labels();
    let triple = Sl2Triple::new(x, y, h)?.with_labels(labels)?;
    triple.ensure_brackets()?;
    Ok((module, triple))
}

/// An element of `SL₂(ℚ)`, stored as `(a b; c d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
}

impl GroupElement {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(Error::NotSpecialLinear(format!(
                "determinant is {}",
                format::rational(&det)
            )));
        }
        Ok(GroupElement { a, b, c, d })
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        GroupElement::new(rat(a), rat(b), rat(c), rat(d))
    }

    pub fn identity() -> Self {
        GroupElement::upper(Rational::zero())
    }

    /// `u(a) = (1 a; 0 1)`.
    pub fn upper(a: Rational) -> Self {
        GroupElement {
            a: Rational::one(),
            b: a,
            c: Rational::zero(),
            d: Rational::one(),
        }
    }

    /// `v(b) = (1 0; b 1)`.
    pub fn lower(b: Rational) -> Self {
        GroupElement {
            a: Rational::one(),
            b: Rational::zero(),
            c: b,
            d: Rational::one(),
        }
    }

    /// `w = (0 −1; 1 0)`.
    pub fn w() -> Self {
        GroupElement::from_ints(0, -1, 1, 0).expect("det 1")
    }

    /// `diag(t, 1/t)`.
    pub fn torus(t: Rational) -> Result<Self> {
        if t.is_zero() {
            return Err(Error::NotSpecialLinear("torus parameter is zero".into()));
        }
        let inv = t.recip();
        GroupElement::new(t, Rational::zero(), Rational::zero(), inv)
    }

    pub fn minus_identity() -> Self {
        GroupElement::from_ints(-1, 0, 0, -1).expect("det 1")
    }

    pub fn entries(&self) -> [&Rational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        GroupElement {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }

    pub fn pow(&self, k: u32) -> GroupElement {
        (0..k).fold(GroupElement::identity(), |acc, _| acc.mul(self))
    }

    pub fn is_identity(&self) -> bool {
        *self == GroupElement::identity()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} {}; {} {})",
            format::rational(&self.a),
            format::rational(&self.b),
            format::rational(&self.c),
            format::rational(&self.d)
        )
    }
}

/// A unipotent factor: `Upper(a) = u(a)`, `Lower(b) = v(b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Elementary {
    Upper(Rational),
    Lower(Rational),
}

impl Elementary {
    pub fn matrix(&self) -> GroupElement {
        match self {
            Elementary::Upper(a) => GroupElement::upper(a.clone()),
            Elementary::Lower(b) => GroupElement::lower(b.clone()),
        }
    }
}

impl fmt::Display for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elementary::Upper(a) => write!(f, "u({})", format::rational(a)),
            Elementary::Lower(b) => write!(f, "v({})", format::rational(b)),
        }
    }
}

/// Left-to-right product of a word.
pub fn word_product(word: &[Elementary]) -> GroupElement {
    word.iter()
        .fold(GroupElement::identity(), |acc, e| acc.mul(&e.matrix()))
}

fn push_nonzero(word: &mut Vec<Elementary>, e: Elementary) {
    let zero = match &e {
        Elementary::Upper(a) | Elementary::Lower(a) => a.is_zero(),
    };
    if !zero {
        word.push(e);
    }
}

/// Writes `M` as a product of at most four unipotent factors.
pub fn factor_elementary(m: &GroupElement) -> Vec<Elementary> {
    let one = Rational::one();
    let mut word = Vec::new();
    if !m.c.is_zero() {
        push_nonzero(&mut word, Elementary::Upper((&m.a - &one) / &m.c));
        push_nonzero(&mut word, Elementary::Lower(m.c.clone()));
        push_nonzero(&mut word, Elementary::Upper((&m.d - &one) / &m.c));
    } else if !m.b.is_zero() {
        push_nonzero(&mut word, Elementary::Lower((&m.d - &one) / &m.b));
        push_nonzero(&mut word, Elementary::Upper(m.b.clone()));
        push_nonzero(&mut word, Elementary::Lower((&m.a - &one) / &m.b));
    } else if !m.a.is_one() {
        word.push(Elementary::Lower(-one.clone()));
        word.extend(factor_elementary(&GroupElement::lower(one).mul(m)));
    }
    word
}

/// `exp(a N)` for nilpotent `N`, as an exact truncated series.
pub fn exp_nilpotent(n: &LinearMap, a: &Rational) -> LinearMap {
    let dim = n.domain_dim();
    let mut out = LinearMap::identity(dim);
    if a.is_zero() {
        return out;
    }
    let mut term = LinearMap::identity(dim);
    for k in 1..=dim {
        term = n.compose(&term).scale(&(a / rat(k as i64)));
        if term.is_zero() {
            break;
        }
        out = out.add(&term);
    }
    out
}

fn exp_apply(n: &LinearMap, a: &Rational, v: &[Rational]) -> Vector {
    let mut out = v.to_vec();
    if a.is_zero() {
        return out;
    }
    let mut term = v.to_vec();
    for k in 1..=v.len() {
        term = n.apply(&term);
        let s = a / rat(k as i64);
        if term.iter().all(Zero::is_zero) {
            break;
        }
        for (o, t) in out.iter_mut().zip(term.iter_mut()) {
            *t *= &s;
            *o += &*t;
        }
    }
    out
}

fn elementary_apply(t: &Sl2Triple, e: &Elementary, v: &[Rational]) -> Vector {
    match e {
        Elementary::Upper(a) => exp_apply(&t.x, a, v),
        Elementary::Lower(b) => exp_apply(&t.y, b, v),
    }
}

/// `M·v` with `u(a) ↦ exp(aX)` and `v(b) ↦ exp(bY)`.
pub fn act(m: &GroupElement, t: &Sl2Triple, v: &[Rational]) -> Result<Vector> {
    t.ensure_brackets()?;
    if v.len() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: v.len(),
        });
    }
    Ok(act_word(&factor_elementary(m), t, v))
}

/// Applies a word right to left, so the result is `(w₀ w₁ ⋯) v`.
pub fn act_word(word: &[Elementary], t: &Sl2Triple, v: &[Rational]) -> Vector {
    word.iter()
        .rev()
        .fold(v.to_vec(), |acc, e| elementary_apply(t, e, &acc))
}

/// The matrix of `M` on the module.
pub fn act_operator(m: &GroupElement, t: &Sl2Triple) -> Result<LinearMap> {
    t.ensure_brackets()?;
    let n = t.dim();
    Ok(factor_elementary(m)
        .iter()
        .map(|e| match e {
            Elementary::Upper(a) => exp_nilpotent(&t.x, a),
            Elementary::Lower(b) => exp_nilpotent(&t.y, b),
        })
        .fold(LinearMap::identity(n), |acc, op| acc.compose(&op)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemazureReport {
    /// `h β(t) = β(t⁻¹) h` for each tested torus value.
    pub torus_conjugation: Vec<(Rational, bool)>,
    /// `h² = β(−I)`.
    pub h_squared: bool,
    /// `(β(u) h)³ = β(−I)`.
    pub braid_cube: bool,
}

impl DemazureReport {
    pub fn passed(&self) -> bool {
        self.h_squared && self.braid_cube && self.torus_conjugation.iter().all(|(_, ok)| *ok)
    }
}

pub const DEMAZURE_TORUS_VALUES: [i64; 3] = [2, 3, -1];

/// Checks the two presentation conditions for an operator `h` against
/// a unipotent family `beta_u` and torus family `beta_t` on the same carrier.
pub fn demazure_check<E>(
    beta_u: impl Fn(&Rational) -> std::result::Result<LinearMap, E>,
    beta_t: impl Fn(&Rational) -> std::result::Result<LinearMap, E>,
    h: &LinearMap,
) -> std::result::Result<DemazureReport, E> {
    let mut torus_conjugation = Vec::new();
    for t in DEMAZURE_TORUS_VALUES.map(rat) {
        let lhs = h.compose(&beta_t(&t)?);
        let rhs = beta_t(&t.recip())?.compose(h);
        torus_conjugation.push((t, lhs == rhs));
    }
    let minus = beta_t(&rat(-1))?;
    let uh = beta_u(&Rational::one())?.compose(h);
    Ok(DemazureReport {
        torus_conjugation,
        h_squared: h.compose(h) == minus,
        braid_cube: uh.pow(3) == minus,
    })
}

/// [`demazure_check`] with `β(u(a)) = exp(aX)` and `β(t) = act(diag(t, 1/t))`.
pub fn demazure_check_triple(t: &Sl2Triple, h: &LinearMap) -> Result<DemazureReport> {
    t.ensure_brackets()?;
    demazure_check(
        |a| Ok(exp_nilpotent(&t.x, a)),
        |s| act_operator(&GroupElement::torus(s.clone())?, t),
        h,
    )
}

/// `t^H` computed from the weight decomposition, independent of any factorization.
pub fn torus_by_weights(t: &Sl2Triple, s: &Rational) -> Result<LinearMap> {
    if s.is_zero() {
        return Err(Error::NotSpecialLinear("torus parameter is zero".into()));
    }
    let n = t.dim();
    let mut basis = Vec::new();
    let mut images = Vec::new();
    for (w, space) in t.weight_spaces()? {
        let f = crate::exactla::pow_i(s, w);
        for v in space {
            images.push(v.iter().map(|x| x * &f).collect::<Vector>());
            basis.push(v);
        }
    }
    let b = LinearMap::from_columns(n, &basis);
    let img = LinearMap::from_columns(n, &images);
    let inv = crate::exactla::inverse(&b)?;
    Ok(img.compose(&inv))
}
