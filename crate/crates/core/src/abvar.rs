//! Cohomology model of a polarized abelian variety `A` and its powers `Aᵐ`.
//!
//! `H*(Aᵐ)` is the exterior algebra on `2gm` degree-one generators
//! `xᵢ⁽ᵏ⁾, yᵢ⁽ᵏ⁾`, ordered factor-major and then `x₁,y₁,…,x_g,y_g`. The
//! polarization of type `(c₁,…,c_g)` is `θ = Σ cᵢ xᵢyᵢ`. Classes are taken
//! modulo homological equivalence, so the Beauville grading collapses to the
//! cohomological degree `i = 2p − s`.
//!
//! Homomorphisms `Aᵐ → Aⁿ` are integer matrices acting on `H¹`; pushforward
//! is the adjoint of pullback for the Poincaré pairing `⟨a,b⟩ = ∫ a∧b`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactla::{factorial, rat, Rational, Vector};
use crate::extalg::{AlgebraContext, ExtClass, Monomial, MAX_GENERATORS};

/// Dimension `g` and polarization type `(c₁,…,c_g)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolarizedContext {
    g: usize,
    polarization: Vec<u64>,
}

impl PolarizedContext {
    pub fn new(g: usize, polarization: Vec<u64>) -> Result<Arc<Self>> {
        if g == 0 {
            return Err(Error::InvalidType("g must be positive".into()));
        }
        if polarization.len() != g {
            return Err(Error::InvalidType(format!(
                "type has {} entries, expected g = {g}",
                polarization.len()
            )));
        }
        if polarization.contains(&0) {
            return Err(Error::InvalidType("type entries must be positive".into()));
        }
        Ok(Arc::new(PolarizedContext { g, polarization }))
    }

    pub fn principal(g: usize) -> Arc<Self> {
        Self::new(g, vec![1; g]).expect("principal type is valid")
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn polarization_type(&self) -> &[u64] {
        &self.polarization
    }

    /// `d = Π cᵢ`, the degree of θ.
    pub fn degree(&self) -> Rational {
        Rational::from_integer(self.polarization.iter().map(|&c| BigInt::from(c)).product())
    }
}

impl fmt::Display for PolarizedContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.polarization.iter().map(u64::to_string).collect();
        write!(f, "g={} type=({})", self.g, t.join(","))
    }
}

/// `Aᵐ` together with its cohomology algebra.
#[derive(Clone)]
pub struct ProductVariety {
    ctx: Arc<PolarizedContext>,
    factors: usize,
    algebra: Arc<AlgebraContext>,
}

impl PartialEq for ProductVariety {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors && self.ctx == other.ctx
    }
}

impl Eq for ProductVariety {}

impl fmt::Debug for ProductVariety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A^{} ({})", self.factors, self.ctx)
    }
}

impl ProductVariety {
    pub fn new(ctx: &Arc<PolarizedContext>, factors: usize) -> Result<Self> {
        let g = ctx.g();
        if factors == 0 || 2 * g * factors > MAX_GENERATORS {
            return Err(Error::DimensionGuard {
                what: "product variety",
                limit: MAX_GENERATORS / (2 * factors.max(1)),
                g,
            });
        }
        let mut labels = Vec::with_capacity(2 * g * factors);
        for k in 1..=factors {
            for i in 1..=g {
                if factors == 1 {
                    labels.push(format!("x{i}"));
                    labels.push(format!("y{i}"));
                } else {
                    labels.push(format!("x{i}_{k}"));
                    labels.push(format!("y{i}_{k}"));
                }
            }
        }
        Ok(ProductVariety {
            ctx: ctx.clone(),
            factors,
            algebra: AlgebraContext::new(labels),
        })
    }

    pub fn single(ctx: &Arc<PolarizedContext>) -> Self {
        Self::new(ctx, 1).expect("single factor fits")
    }

    pub fn context(&self) -> &Arc<PolarizedContext> {
        &self.ctx
    }

    pub fn g(&self) -> usize {
        self.ctx.g()
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn algebra(&self) -> &Arc<AlgebraContext> {
        &self.algebra
    }

    pub fn generator_count(&self) -> usize {
        self.algebra.dimension()
    }

    /// Real dimension of `Aᵐ`, i.e. the top cohomological degree.
    pub fn top_degree(&self) -> u32 {
        self.generator_count() as u32
    }

    /// Index of `xᵢ` (or `yᵢ`) on factor `k`, both zero-based.
    pub fn generator_index(&self, factor: usize, i: usize, is_y: bool) -> usize {
        assert!(factor < self.factors && i < self.g());
        2 * self.g() * factor + 2 * i + usize::from(is_y)
    }

    pub fn x(&self, factor: usize, i: usize) -> CohClass {
        self.generator(self.generator_index(factor, i, false))
    }

    pub fn y(&self, factor: usize, i: usize) -> CohClass {
        self.generator(self.generator_index(factor, i, true))
    }

    pub fn generator(&self, index: usize) -> CohClass {
        CohClass::from_ext(self, ExtClass::generator(&self.algebra, index))
    }

    pub fn orientation(&self) -> Monomial {
        self.algebra.orientation()
    }

    /// `θ` pulled back along the `k`-th projection.
    pub fn theta_on(&self, factor: usize) -> CohClass {
        let mut terms = Vec::with_capacity(self.g());
        for (i, &c) in self.ctx.polarization.iter().enumerate() {
            let m = Monomial::from_indices(&[
                self.generator_index(factor, i, false),
                self.generator_index(factor, i, true),
            ]);
            terms.push((m, rat(c as i64)));
        }
        CohClass::from_ext(self, ExtClass::from_terms(&self.algebra, terms))
    }

    pub fn zero(&self) -> CohClass {
        CohClass::from_ext(self, ExtClass::zero(&self.algebra))
    }

    pub fn one(&self) -> CohClass {
        CohClass::from_ext(self, ExtClass::one(&self.algebra))
    }

    pub fn scalar(&self, c: Rational) -> CohClass {
        CohClass::from_ext(self, ExtClass::scalar(&self.algebra, c))
    }

    pub fn monomial(&self, m: Monomial, c: Rational) -> CohClass {
        CohClass::from_ext(self, ExtClass::monomial(&self.algebra, m, c))
    }

    /// Dimension of the full cohomology, `2^(2gm)`.
    pub fn cohomology_dimension(&self) -> usize {
        1usize << self.generator_count()
    }

    fn require_factors(&self, m: usize) -> Result<()> {
        match (m, self.factors == m) {
            (_, true) => Ok(()),
            (1, false) => Err(Error::NotSingleFactor),
            (2, false) => Err(Error::NotTwoFactors),
            _ => Err(Error::VarietyMismatch),
        }
    }
}

/// A cohomology class on a product variety.
#[derive(Clone, PartialEq, Eq)]
pub struct CohClass {
    variety: ProductVariety,
    value: ExtClass,
}

impl fmt::Debug for CohClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for CohClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl CohClass {
    pub fn new(variety: &ProductVariety, value: ExtClass) -> Result<Self> {
        if value.context() != variety.algebra() {
            return Err(Error::VarietyMismatch);
        }
        Ok(Self::from_ext(variety, value))
    }

    fn from_ext(variety: &ProductVariety, value: ExtClass) -> Self {
        CohClass {
            variety: variety.clone(),
            value,
        }
    }

    pub fn variety(&self) -> &ProductVariety {
        &self.variety
    }

    pub fn value(&self) -> &ExtClass {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn scale(&self, s: &Rational) -> CohClass {
        Self::from_ext(&self.variety, self.value.scale(s))
    }

    fn same_variety(&self, other: &CohClass) -> Result<()> {
        if self.variety == other.variety {
            Ok(())
        } else {
            Err(Error::VarietyMismatch)
        }
    }

    pub fn try_add(&self, other: &CohClass) -> Result<CohClass> {
        self.same_variety(other)?;
        Ok(Self::from_ext(
            &self.variety,
            self.value.try_add(&other.value)?,
        ))
    }

    /// Intersection product.
    pub fn intersect(&self, other: &CohClass) -> Result<CohClass> {
        self.same_variety(other)?;
        Ok(Self::from_ext(
            &self.variety,
            self.value.wedge(&other.value)?,
        ))
    }

    pub fn pow(&self, k: u32) -> CohClass {
        Self::from_ext(&self.variety, self.value.pow(k))
    }

    pub fn exp(&self) -> Result<CohClass> {
        Ok(Self::from_ext(&self.variety, self.value.exp_even()?))
    }

    pub fn homogeneous(&self, d: u32) -> CohClass {
        Self::from_ext(&self.variety, self.value.homogeneous(d))
    }

    pub fn integral(&self) -> Rational {
        self.value.integral(self.variety.orientation())
    }

    /// Multiplies the degree-`i` part by `f(i)`.
    pub fn scale_by_degree(&self, f: impl Fn(u32) -> Rational) -> CohClass {
        Self::from_ext(&self.variety, self.value.scale_by_degree(f))
    }

    /// Dense coordinates in the monomial basis (index = bitmask).
    pub fn to_vector(&self) -> Vector {
        let mut v = vec![Rational::zero(); self.variety.cohomology_dimension()];
        for (m, c) in self.value.terms() {
            v[m.0 as usize] = c.clone();
        }
        v
    }

    pub fn from_vector(variety: &ProductVariety, v: &[Rational]) -> CohClass {
        assert_eq!(v.len(), variety.cohomology_dimension());
        let terms = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (Monomial(i as u64), c.clone()));
        Self::from_ext(variety, ExtClass::from_terms(variety.algebra(), terms))
    }

    /// Coefficients `a_k` with `self = Σ a_k θ^k` when the class lies in `Q[θ]`.
    pub fn theta_polynomial(&self) -> Option<Vec<Rational>> {
        if self.variety.factors() != 1 {
            return None;
        }
        let theta = self.variety.theta_on(0);
        let mut coeffs = Vec::new();
        let mut power = self.variety.one();
        let mut rest = self.clone();
        for k in 0..=self.variety.g() as u32 {
            let part = rest.homogeneous(2 * k);
            let (m, c) = power.value.terms().next()?;
            let a = part.value.coefficient(m) / c;
            let candidate = power.scale(&a);
            if candidate != part {
                return None;
            }
            rest = &rest - &part;
            coeffs.push(a);
            power = &power * &theta;
        }
        rest.is_zero().then_some(coeffs)
    }
}

impl Add for &CohClass {
    type Output = CohClass;
    fn add(self, rhs: &CohClass) -> CohClass {
        self.try_add(rhs)
            .expect("adding classes on different varieties")
    }
}

impl Sub for &CohClass {
    type Output = CohClass;
    fn sub(self, rhs: &CohClass) -> CohClass {
        self + &(-rhs)
    }
}

impl Neg for &CohClass {
    type Output = CohClass;
    fn neg(self) -> CohClass {
        CohClass::from_ext(&self.variety, -&self.value)
    }
}

impl Mul for &CohClass {
    type Output = CohClass;
    fn mul(self, rhs: &CohClass) -> CohClass {
        self.intersect(rhs)
            .expect("multiplying classes on different varieties")
    }
}

/// A homomorphism `Aᵐ → Aⁿ`, stored as the integer matrix of its pullback on
/// `H¹`: target generator `k` pulls back to `Σ_l lattice[k][l] · (source generator l)`.
#[derive(Clone, PartialEq, Eq)]
pub struct HomMorphism {
    source: ProductVariety,
    target: ProductVariety,
    lattice: Vec<Vec<i64>>,
}

impl fmt::Debug for HomMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?}", self.source, self.target)
    }
}

impl HomMorphism {
    /// From an `n × m` integer matrix `M`: `(a₁,…,a_m) ↦ (Σᵢ M_{ji} aᵢ)_j`.
    pub fn from_factor_matrix(
        source: &ProductVariety,
        target: &ProductVariety,
        matrix: &[Vec<i64>],
    ) -> Result<Self> {
        let g = source.g();
        if target.g() != g {
            return Err(Error::VarietyMismatch);
        }
        if matrix.len() != target.factors() || matrix.iter().any(|r| r.len() != source.factors()) {
            return Err(Error::DimensionMismatch {
                expected: target.factors(),
                found: matrix.len(),
            });
        }
        let mut lattice = vec![vec![0i64; source.generator_count()]; target.generator_count()];
        for (j, row) in matrix.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                for r in 0..2 * g {
                    lattice[2 * g * j + r][2 * g * i + r] = v;
                }
            }
        }
        Ok(HomMorphism {
            source: source.clone(),
            target: target.clone(),
            lattice,
        })
    }

    fn on_powers(ctx: &Arc<PolarizedContext>, matrix: &[Vec<i64>]) -> Result<Self> {
        let source = ProductVariety::new(ctx, matrix[0].len())?;
        let target = ProductVariety::new(ctx, matrix.len())?;
        Self::from_factor_matrix(&source, &target, matrix)
    }

    pub fn identity(v: &ProductVariety) -> Self {
        let m = v.factors();
        let matrix: Vec<Vec<i64>> = (0..m)
            .map(|j| (0..m).map(|i| i64::from(i == j)).collect())
            .collect();
        Self::from_factor_matrix(v, v, &matrix).expect("identity")
    }

    /// `Aᵐ → A^{len}`, `(a₁,…,a_m) ↦ (a_{f₁},…)` with zero-based factor indices.
    pub fn projection(ctx: &Arc<PolarizedContext>, m: usize, factors: &[usize]) -> Result<Self> {
        let matrix: Vec<Vec<i64>> = factors
            .iter()
            .map(|&f| (0..m).map(|i| i64::from(i == f)).collect())
            .collect();
        Self::on_powers(ctx, &matrix)
    }

    /// First projection `p: A×A → A`.
    pub fn first_projection(ctx: &Arc<PolarizedContext>) -> Self {
        Self::projection(ctx, 2, &[0]).expect("p")
    }

    /// Second projection `q: A×A → A`.
    pub fn second_projection(ctx: &Arc<PolarizedContext>) -> Self {
        Self::projection(ctx, 2, &[1]).expect("q")
    }

    /// Diagonal `Δ: A → A×A`.
    pub fn diagonal(ctx: &Arc<PolarizedContext>) -> Self {
        Self::on_powers(ctx, &[vec![1], vec![1]]).expect("diagonal")
    }

    /// Addition `m(a,b) = a+b`.
    pub fn addition(ctx: &Arc<PolarizedContext>) -> Self {
        Self::on_powers(ctx, &[vec![1, 1]]).expect("addition")
    }

    /// Difference `δ(a,b) = b−a`.
    pub fn difference(ctx: &Arc<PolarizedContext>) -> Self {
        Self::on_powers(ctx, &[vec![-1, 1]]).expect("difference")
    }

    /// Multiplication by `n` on `A`.
    pub fn multiplication(ctx: &Arc<PolarizedContext>, n: i64) -> Self {
        Self::on_powers(ctx, &[vec![n]]).expect("n_A")
    }

    /// `σ(a,b) = (b, a+b)`.
    pub fn sigma(ctx: &Arc<PolarizedContext>) -> Self {
        Self::on_powers(ctx, &[vec![0, 1], vec![1, 1]]).expect("sigma")
    }

    /// `(a,b) ↦ (s·a, t·b)` on `A×A`.
    pub fn scaling_pair(ctx: &Arc<PolarizedContext>, s: i64, t: i64) -> Self {
        Self::on_powers(ctx, &[vec![s, 0], vec![0, t]]).expect("(s,t)")
    }

    /// `a ↦ (s·a, t·a)`; graphs are the images of `1` under pushforward along these.
    pub fn graph_map(ctx: &Arc<PolarizedContext>, s: i64, t: i64) -> Self {
        Self::on_powers(ctx, &[vec![s], vec![t]]).expect("graph map")
    }

    /// Isogeny `π: A → A₀` of single-factor models of the same dimension,
    /// acting on `H¹` by `x⁰_j ↦ x_j`, `y⁰_j ↦ Σᵢ D_{ji} yᵢ`. The polarization
    /// of `A` must be the pullback of that of `A₀`.
    pub fn isogeny(
        source: &Arc<PolarizedContext>,
        target: &Arc<PolarizedContext>,
        d_matrix: &[Vec<i64>],
    ) -> Result<Self> {
        let g = source.g();
        if target.g() != g {
            return Err(Error::VarietyMismatch);
        }
        if d_matrix.len() != g || d_matrix.iter().any(|r| r.len() != g) {
            return Err(Error::DimensionMismatch {
                expected: g,
                found: d_matrix.len(),
            });
        }
        let src = ProductVariety::single(source);
        let tgt = ProductVariety::single(target);
        let mut lattice = vec![vec![0i64; 2 * g]; 2 * g];
        for j in 0..g {
            lattice[2 * j][2 * j] = 1;
            for i in 0..g {
                lattice[2 * j + 1][2 * i + 1] = d_matrix[j][i];
            }
        }
        let f = HomMorphism {
            source: src,
            target: tgt,
            lattice,
        };
        if f.lattice_determinant().is_zero() {
            return Err(Error::NotIsogeny);
        }
        if pullback(&f, &f.target.theta_on(0))? != f.source.theta_on(0) {
            return Err(Error::PolarizationMismatch);
        }
        Ok(f)
    }

    pub fn source(&self) -> &ProductVariety {
        &self.source
    }

    pub fn target(&self) -> &ProductVariety {
        &self.target
    }

    pub fn lattice(&self) -> &[Vec<i64>] {
        &self.lattice
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &HomMorphism) -> Result<HomMorphism> {
        if inner.target != self.source {
            return Err(Error::VarietyMismatch);
        }
        let rows = self.lattice.len();
        let cols = inner.source.generator_count();
        let mid = self.source.generator_count();
        let mut lattice = vec![vec![0i64; cols]; rows];
        for (r, row) in lattice.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = (0..mid)
                    .map(|k| self.lattice[r][k] * inner.lattice[k][c])
                    .sum();
            }
        }
        Ok(HomMorphism {
            source: inner.source.clone(),
            target: self.target.clone(),
            lattice,
        })
    }

    /// `self × other: X × X' → Y × Y'` for morphisms between single-factor models.
    pub fn product(&self, other: &HomMorphism) -> Result<HomMorphism> {
        if self.source.factors() != 1
            || other.source.factors() != 1
            || self.target.factors() != 1
            || other.target.factors() != 1
            || self.source.context() != other.source.context()
            || self.target.context() != other.target.context()
        {
            return Err(Error::VarietyMismatch);
        }
        let source = ProductVariety::new(self.source.context(), 2)?;
        let target = ProductVariety::new(self.target.context(), 2)?;
        let n = self.source.generator_count();
        let mut lattice = vec![vec![0i64; 2 * n]; 2 * n];
        for r in 0..n {
            for c in 0..n {
                lattice[r][c] = self.lattice[r][c];
                lattice[n + r][n + c] = other.lattice[r][c];
            }
        }
        Ok(HomMorphism {
            source,
            target,
            lattice,
        })
    }

    /// Determinant of the action on `H¹` (square morphisms only).
    pub fn lattice_determinant(&self) -> Rational {
        let n = self.lattice.len();
        assert!(self.lattice.iter().all(|r| r.len() == n), "square lattice");
        let mut a: Vec<Vec<Rational>> = self
            .lattice
            .iter()
            .map(|r| r.iter().map(|&v| rat(v)).collect())
            .collect();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= &a[c][c];
            let inv = a[c][c].recip();
            for r in (c + 1)..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] * &inv;
                let (top, bottom) = a.split_at_mut(r);
                for (x, p) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                    *x -= &f * p;
                }
            }
        }
        det
    }

    /// Degree of a square morphism, `|det|` on `H¹`.
    pub fn degree(&self) -> Rational {
        self.lattice_determinant().abs()
    }

    fn pullback_images(&self) -> Vec<Vec<(usize, Rational)>> {
        self.lattice
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(l, &v)| (l, rat(v)))
                    .collect()
            })
            .collect()
    }

    fn transpose_images(&self) -> Vec<Vec<(usize, Rational)>> {
        let cols = self.source.generator_count();
        (0..cols)
            .map(|l| {
                self.lattice
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| row[l] != 0)
                    .map(|(k, row)| (k, rat(row[l])))
                    .collect()
            })
            .collect()
    }
}

pub fn pullback(f: &HomMorphism, z: &CohClass) -> Result<CohClass> {
    if z.variety != f.target {
        return Err(Error::VarietyMismatch);
    }
    let value = z.value.map_linear(f.source.algebra(), &f.pullback_images());
    Ok(CohClass::from_ext(&f.source, value))
}

/// Poincaré dual functional of `a`, written back as a class: `e_S ↦ ε(S)·e_{Sᶜ}`.
fn poincare_dual(a: &ExtClass, full: Monomial) -> Vec<(Monomial, Rational)> {
    a.terms()
        .map(|(m, c)| {
            let comp = Monomial(full.0 & !m.0);
            let c = if m.complement_sign_negative(full) {
                -c.clone()
            } else {
                c.clone()
            };
            (comp, c)
        })
        .collect()
}

/// Pushforward, the adjoint of [`pullback`]: `∫ f_*a ∧ b = ∫ a ∧ f^*b`.
///
/// The transpose of `f^*` on `Λ(H¹)` is again an exterior power, namely the
/// algebra map induced by the transposed lattice matrix, so the adjoint is
/// `D_Y⁻¹ ∘ Λ(Lᵀ) ∘ D_X` with `D` the Poincaré duality in monomial bases.
pub fn pushforward(f: &HomMorphism, z: &CohClass) -> Result<CohClass> {
    if z.variety != f.source {
        return Err(Error::VarietyMismatch);
    }
    let full_x = f.source.orientation();
    let full_y = f.target.orientation();
    let dual = ExtClass::from_terms(f.source.algebra(), poincare_dual(&z.value, full_x));
    let mapped = dual.map_linear(f.target.algebra(), &f.transpose_images());
    // D_Y(c) = Σ c_T ε(T) e_{Tᶜ}, so c_T = ε(T) · mapped_{Tᶜ}
    let terms = mapped.terms().map(|(r, v)| {
        let t = Monomial(full_y.0 & !r.0);
        let v = if t.complement_sign_negative(full_y) {
            -v.clone()
        } else {
            v.clone()
        };
        (t, v)
    });
    Ok(CohClass::from_ext(
        &f.target,
        ExtClass::from_terms(f.target.algebra(), terms),
    ))
}

/// `θ = Σ cᵢ xᵢyᵢ` on a single-factor model.
pub fn theta(v: &ProductVariety) -> Result<CohClass> {
    v.require_factors(1)?;
    Ok(v.theta_on(0))
}

/// The point class, `θ^g/(g!·d)`, with integral 1.
pub fn point_class(v: &ProductVariety) -> Result<CohClass> {
    let t = theta(v)?;
    let g = v.g() as u32;
    let scale = (factorial(g) * v.context().degree()).recip();
    Ok(t.pow(g).scale(&scale))
}

/// `℘ = p^*θ + q^*θ − m^*θ` on `A×A`.
pub fn poincare_class(v: &ProductVariety) -> Result<CohClass> {
    v.require_factors(2)?;
    let ctx = v.context();
    let t = theta(&ProductVariety::single(ctx))?;
    let p = pullback(&HomMorphism::first_projection(ctx), &t)?;
    let q = pullback(&HomMorphism::second_projection(ctx), &t)?;
    let m = pullback(&HomMorphism::addition(ctx), &t)?;
    Ok(&(&p + &q) - &m)
}

/// Pontryagin product `a ∗ b = m_*(p^*a · q^*b)`.
pub fn pontryagin(a: &CohClass, b: &CohClass) -> Result<CohClass> {
    a.variety.require_factors(1)?;
    a.same_variety(b)?;
    let ctx = a.variety.context();
    let pa = pullback(&HomMorphism::first_projection(ctx), a)?;
    let qb = pullback(&HomMorphism::second_projection(ctx), b)?;
    pushforward(&HomMorphism::addition(ctx), &(&pa * &qb))
}

/// `F(z) = d⁻¹ q_*(e^℘ · p^*z)`.
pub fn fourier(z: &CohClass) -> Result<CohClass> {
    z.variety.require_factors(1)?;
    let ctx = z.variety.context();
    let pair = ProductVariety::new(ctx, 2)?;
    let kernel = poincare_class(&pair)?.exp()?;
    let pz = pullback(&HomMorphism::first_projection(ctx), z)?;
    let pushed = pushforward(&HomMorphism::second_projection(ctx), &(&kernel * &pz))?;
    Ok(pushed.scale(&ctx.degree().recip()))
}

/// Split of `z` into the pieces on which `n^*` acts by `nⁱ`.
pub fn weight_components(z: &CohClass) -> BTreeMap<u32, CohClass> {
    z.value
        .graded_parts()
        .into_iter()
        .map(|(d, part)| (d, CohClass::from_ext(&z.variety, part)))
        .collect()
}

/// Largest absolute numerator/denominator, handy for sizing random tests.
pub fn height(z: &CohClass) -> u64 {
    z.value
        .terms()
        .map(|(_, c)| {
            c.numer()
                .abs()
                .max(c.denom().clone())
                .to_u64()
                .unwrap_or(u64::MAX)
        })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::ratio;

    fn ctx(t: &[u64]) -> Arc<PolarizedContext> {
        PolarizedContext::new(t.len(), t.to_vec()).unwrap()
    }

    #[test]
    fn context_validation() {
        assert!(PolarizedContext::new(2, vec![1]).is_err());
        assert!(PolarizedContext::new(1, vec![0]).is_err());
        assert!(PolarizedContext::new(0, vec![]).is_err());
        assert_eq!(ctx(&[1, 2, 3]).degree(), rat(6));
    }

    #[test]
    fn theta_examples() {
        let v = ProductVariety::single(&ctx(&[1]));
        let t = theta(&v).unwrap();
        assert_eq!(t, &v.x(0, 0) * &v.y(0, 0));

        let v = ProductVariety::single(&ctx(&[1, 2]));
        let t = theta(&v).unwrap();
        let expected = &(&v.x(0, 0) * &v.y(0, 0)) + &(&v.x(0, 1) * &v.y(0, 1)).scale(&rat(2));
        assert_eq!(t, expected);
        assert_eq!(t.pow(2).scale(&ratio(1, 2)).integral(), rat(2));

        let v = ProductVariety::single(&ctx(&[1, 1]));
        assert_eq!(
            theta(&v).unwrap().pow(2).scale(&ratio(1, 2)).integral(),
            rat(1)
        );

        let pair = ProductVariety::new(&ctx(&[1]), 2).unwrap();
        assert_eq!(theta(&pair), Err(Error::NotSingleFactor));
    }

    #[test]
    fn theta_is_symmetric() {
        let c = ctx(&[1, 3]);
        let v = ProductVariety::single(&c);
        let t = theta(&v).unwrap();
        assert_eq!(
            pullback(&HomMorphism::multiplication(&c, -1), &t).unwrap(),
            t
        );
    }

    #[test]
    fn pullback_examples() {
        let c = ctx(&[1, 2]);
        let v = ProductVariety::single(&c);
        let t = theta(&v).unwrap();
        assert_eq!(pullback(&HomMorphism::identity(&v), &t).unwrap(), t);
        assert_eq!(
            pullback(&HomMorphism::multiplication(&c, 3), &t).unwrap(),
            t.scale(&rat(9))
        );

        let c = ctx(&[1]);
        let v = ProductVariety::single(&c);
        let pair = ProductVariety::new(&c, 2).unwrap();
        let got = pullback(&HomMorphism::addition(&c), &theta(&v).unwrap()).unwrap();
        let (x1, y1, x2, y2) = (pair.x(0, 0), pair.y(0, 0), pair.x(1, 0), pair.y(1, 0));
        // (x1 + x2)(y1 + y2)
        let expected = &(&(&(&x1 * &y1) + &(&x1 * &y2)) + &(&x2 * &y1)) + &(&x2 * &y2);
        assert_eq!(got, expected);
        assert_eq!(
            pullback(&HomMorphism::addition(&c), &pair.one()),
            Err(Error::VarietyMismatch)
        );
    }

    #[test]
    fn pushforward_examples() {
        let c = ctx(&[1]);
        let v = ProductVariety::single(&c);
        let pair = ProductVariety::new(&c, 2).unwrap();
        let q = HomMorphism::second_projection(&c);
        let x1y1 = &pair.x(0, 0) * &pair.y(0, 0);
        assert_eq!(pushforward(&q, &x1y1).unwrap(), v.one());

        let diag = pushforward(&HomMorphism::diagonal(&c), &v.one()).unwrap();
        let x2y2 = &pair.x(1, 0) * &pair.y(1, 0);
        assert_eq!((&diag * &x2y2).integral(), rat(1));

        let p = HomMorphism::first_projection(&c);
        assert!(pushforward(&p, &pair.one()).unwrap().is_zero());
        assert_eq!(pushforward(&p, &v.one()), Err(Error::VarietyMismatch));
    }

    #[test]
    fn poincare_class_examples() {
        let c = ctx(&[1]);
        let pair = ProductVariety::new(&c, 2).unwrap();
        let wp = poincare_class(&pair).unwrap();
        let expected = -&(&(&pair.x(0, 0) * &pair.y(1, 0)) + &(&pair.x(1, 0) * &pair.y(0, 0)));
        assert_eq!(wp, expected);

        let c = ctx(&[2, 3]);
        let pair = ProductVariety::new(&c, 2).unwrap();
        let wp = poincare_class(&pair).unwrap();
        let swap =
            HomMorphism::from_factor_matrix(&pair, &pair, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(pullback(&swap, &wp).unwrap(), wp);
        let two = wp.scale(&rat(2));
        assert_eq!(
            pullback(&HomMorphism::scaling_pair(&c, 2, 1), &wp).unwrap(),
            two
        );
        assert_eq!(
            pullback(&HomMorphism::scaling_pair(&c, 1, 2), &wp).unwrap(),
            two
        );
        assert_eq!(
            poincare_class(&ProductVariety::single(&c)),
            Err(Error::NotTwoFactors)
        );
    }

    #[test]
    fn pontryagin_examples() {
        for t in [&[1u64][..], &[1, 2], &[2, 3]] {
            let c = ctx(t);
            let v = ProductVariety::single(&c);
            let pt = point_class(&v).unwrap();
            assert_eq!(pt.integral(), rat(1));
            let z = &(&v.one() + &v.x(0, 0)) + &theta(&v).unwrap();
            assert_eq!(pontryagin(&pt, &z).unwrap(), z);
            assert!(pontryagin(&v.one(), &v.one()).unwrap().is_zero());
        }
    }

    #[test]
    fn theta_star_theta_matches_direct_pushforward() {
        let c = ctx(&[1]);
        let v = ProductVariety::single(&c);
        let t = theta(&v).unwrap();
        let got = pontryagin(&t, &t).unwrap();
        // p^*θ ∧ q^*θ is the orientation of A×A; pairing m_* of it with b
        // gives ∫ μ ∧ m^*b, nonzero only for b = 1, so the result is the point class.
        assert_eq!(got, t);
    }

    #[test]
    fn fourier_examples() {
        let v = ProductVariety::single(&ctx(&[1]));
        let t = theta(&v).unwrap();
        assert_eq!(fourier(&v.one()).unwrap(), -&t);
        assert_eq!(fourier(&t).unwrap(), v.one());

        let v = ProductVariety::single(&ctx(&[1, 1]));
        let t = theta(&v).unwrap();
        assert_eq!(fourier(&v.one()).unwrap(), t.pow(2).scale(&ratio(1, 2)));
    }

    #[test]
    fn weight_component_examples() {
        let c = ctx(&[1, 1]);
        let v = ProductVariety::single(&c);
        let t = theta(&v).unwrap();
        let z = &v.one() + &t;
        let parts = weight_components(&z);
        assert_eq!(parts.keys().copied().collect::<Vec<_>>(), vec![0, 2]);
        let z = &(&(&v.x(0, 1) + &t) + &(&t * &v.y(0, 0))) + &v.scalar(rat(5));
        let parts = weight_components(&z);
        let minus = HomMorphism::multiplication(&c, -1);
        let mut alt = v.zero();
        for (i, part) in &parts {
            assert_eq!(
                pullback(&HomMorphism::multiplication(&c, 3), part).unwrap(),
                part.scale(&rat(3i64.pow(*i)))
            );
            alt = &alt + &part.scale(&rat((-1i64).pow(*i)));
        }
        assert_eq!(pullback(&minus, &z).unwrap(), alt);
    }

    #[test]
    fn theta_polynomial_recognizes_powers() {
        let v = ProductVariety::single(&ctx(&[1, 2]));
        let t = theta(&v).unwrap();
        let z = &v.one() + &t.pow(2).scale(&ratio(1, 2));
        assert_eq!(
            z.theta_polynomial(),
            Some(vec![rat(1), rat(0), ratio(1, 2)])
        );
        assert_eq!(v.x(0, 0).theta_polynomial(), None);
        assert_eq!((&v.x(0, 0) * &v.y(0, 0)).theta_polynomial(), None);
    }

    #[test]
    fn isogeny_validation() {
        let a = ctx(&[1, 2]);
        let a0 = ctx(&[1, 1]);
        let pi = HomMorphism::isogeny(&a, &a0, &[vec![1, 0], vec![0, 2]]).unwrap();
        assert_eq!(pi.degree(), rat(2));
        assert_eq!(
            HomMorphism::isogeny(&a, &a0, &[vec![1, 0], vec![0, 0]]),
            Err(Error::NotIsogeny)
        );
        assert_eq!(
            HomMorphism::isogeny(&a, &a0, &[vec![1, 0], vec![0, 3]]),
            Err(Error::PolarizationMismatch)
        );
    }
}
