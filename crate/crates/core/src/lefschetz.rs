//! Primitive classes, the primitive decomposition and hard-Lefschetz type
//! statements on the cohomology model and on free modules.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive, Zero};

use crate::abvar::{fourier, pontryagin, theta, CohClass};
use crate::action::ChowAction;
use crate::error::{Error, Result};
use crate::exactla::{factorial, rat, solve, span_rank, LinearMap, Rational, Vector};
use crate::format;
use crate::report::CheckReport;
use crate::sl2rep::{
    act, build_free_module, decompose, primitive_subspace, FreeBeauvilleModule, FreeGenerator,
    GroupElement, Sl2Triple,
};

/// `Y v = 0` for a vector of a verified triple.
pub fn is_primitive_vector(t: &Sl2Triple, v: &[Rational]) -> bool {
    t.y().apply(v).iter().all(Zero::is_zero)
}

/// `θ^{g−1} ∗ z = 0` on a single-factor cohomology model.
pub fn is_primitive(z: &CohClass) -> Result<bool> {
    let v = z.variety();
    let t = theta(v)?;
    Ok(pontryagin(&t.pow(v.g() as u32 - 1), z)?.is_zero())
}

/// `X^power p` with `p` primitive of H-weight `weight`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorComponent {
    pub weight: i64,
    pub power: u32,
    pub primitive: Vector,
}

fn h_weight(t: &Sl2Triple, v: &[Rational]) -> Result<Option<i64>> {
    let hv = t.h().apply(v);
    let Some(i) = v.iter().position(|c| !c.is_zero()) else {
        return Ok(None);
    };
    let mu = &hv[i] / &v[i];
    let consistent = hv.iter().zip(v).all(|(a, b)| *a == &mu * b);
    if !consistent || !mu.is_integer() {
        return Err(Error::NotHomogeneous);
    }
    Ok(mu.to_integer().to_i64())
}

/// `v = Σ X^k p_k` with every `p_k` primitive, for an H-eigenvector `v`.
pub fn primitive_decomposition_vector(
    t: &Sl2Triple,
    v: &[Rational],
) -> Result<Vec<VectorComponent>> {
    let Some(mu) = h_weight(t, v)? else {
        return Ok(Vec::new());
    };
    let prims = primitive_subspace(t)?;
    let n = t.dim();
    let mut columns: Vec<Vector> = Vec::new();
    let mut owners: Vec<(i64, u32, Vector)> = Vec::new();
    for (&w, basis) in &prims {
        let lambda = -w;
        if w > mu || (mu - w) % 2 != 0 {
            continue;
        }
        let k = ((mu - w) / 2) as u32;
        if k as i64 > lambda {
            continue;
        }
        let xk = t.x().pow(k);
        for b in basis {
            columns.push(xk.apply(b));
            owners.push((w, k, b.clone()));
        }
    }
    let coeffs = solve(&LinearMap::from_columns(n, &columns), v).ok_or_else(|| {
        Error::NotDecomposable("vector outside the span of primitive blocks".into())
    })?;
    let mut parts: BTreeMap<i64, (u32, Vector)> = BTreeMap::new();
    for ((w, k, b), c) in owners.into_iter().zip(coeffs) {
        let entry = parts
            .entry(w)
            .or_insert_with(|| (k, vec![Rational::zero(); n]));
        for (e, x) in entry.1.iter_mut().zip(&b) {
            *e += &c * x;
        }
    }
    Ok(parts
        .into_iter()
        .filter(|(_, (_, p))| p.iter().any(|c| !c.is_zero()))
        .map(|(weight, (power, primitive))| VectorComponent {
            weight,
            power,
            primitive,
        })
        .collect())
}

/// `θ^power · z_q` with `z_q` primitive of cohomological degree `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassComponent {
    pub q: u32,
    pub power: u32,
    pub primitive: CohClass,
}

impl ClassComponent {
    pub fn expand(&self) -> Result<CohClass> {
        let t = theta(self.primitive.variety())?;
        Ok(&t.pow(self.power) * &self.primitive)
    }
}

/// `z = Σ_q θ^{(i−q)/2} z_q` for a class of pure degree `i`.
pub fn primitive_decomposition(action: &ChowAction, z: &CohClass) -> Result<Vec<ClassComponent>> {
    if z.variety() != action.variety() {
        return Err(Error::VarietyMismatch);
    }
    let g = action.context().g() as i64;
    let parts = primitive_decomposition_vector(action.triple(), &z.to_vector())?;
    Ok(parts
        .into_iter()
        .map(|c| ClassComponent {
            q: (c.weight + g) as u32,
            power: c.power,
            primitive: CohClass::from_vector(action.variety(), &c.primitive),
        })
        .collect())
}

/// `F(X^q z / q!) = (−1)^r X^r z / r!` with `r = λ − q` on every block with `λ ≥ q`,
/// where `F` is the action of `w`.
pub fn fourier_primitive_check(t: &Sl2Triple, q: u32) -> Result<CheckReport> {
    let blocks = decompose(t)?;
    let mut report = CheckReport::new(format!("Fourier on primitive blocks, q={q}"));
    let mut tested = 0;
    let mut bad = 0;
    for block in blocks.iter().filter(|b| b.lambda >= q) {
        let r = block.lambda - q;
        let src: Vector = block.basis[q as usize]
            .iter()
            .map(|x| x / factorial(q))
            .collect();
        let sign = if r.is_multiple_of(2) { rat(1) } else { rat(-1) };
        let expected: Vector = block.basis[r as usize]
            .iter()
            .map(|x| x * &sign / factorial(r))
            .collect();
        tested += 1;
        if act(&GroupElement::w(), t, &src)? != expected {
            bad += 1;
        }
    }
    report.push(
        "F(X^q z/q!) = (-1)^r X^r z/r!",
        bad == 0,
        format!("{tested} blocks, {bad} failures"),
    );
    Ok(report)
}

/// [`fourier_primitive_check`] with the Fourier transform itself on the cohomology model.
pub fn fourier_transform_primitive_check(action: &ChowAction, q: u32) -> Result<CheckReport> {
    let v = action.variety();
    let blocks = decompose(action.triple())?;
    let mut report = CheckReport::new(format!("Fourier transform on primitive blocks, q={q}"));
    let mut tested = 0;
    let mut bad = 0;
    for block in blocks.iter().filter(|b| b.lambda >= q) {
        let r = block.lambda - q;
        let src = CohClass::from_vector(v, &block.basis[q as usize]).scale(&factorial(q).recip());
        let sign = if r.is_multiple_of(2) { rat(1) } else { rat(-1) };
        let expected =
            CohClass::from_vector(v, &block.basis[r as usize]).scale(&(sign / factorial(r)));
        tested += 1;
        if fourier(&src)? != expected {
            bad += 1;
        }
    }
    report.push(
        "F(theta^q z/q!) = (-1)^r theta^r z/r!",
        bad == 0,
        format!("{tested} blocks, {bad} failures"),
    );
    Ok(report)
}

/// Where the bigraded pieces of a module live.
#[derive(Clone, Copy, Debug)]
pub enum LefschetzModel<'a> {
    /// `(p, s)` read through the cohomological degree `i = 2p − s`.
    Cohomology(&'a ChowAction),
    /// Every generator must carry a `(p, s)` annotation.
    Free(&'a FreeBeauvilleModule, &'a Sl2Triple),
}

impl<'a> LefschetzModel<'a> {
    pub fn g(&self) -> u32 {
        match self {
            LefschetzModel::Cohomology(a) => a.context().g() as u32,
            LefschetzModel::Free(m, _) => m.g,
        }
    }

    pub fn triple(&self) -> &'a Sl2Triple {
        match self {
            LefschetzModel::Cohomology(a) => a.triple(),
            LefschetzModel::Free(_, t) => t,
        }
    }

    /// Coordinate indices spanning the `(p, s)` piece.
    pub fn piece(&self, p: &Rational, s: i64) -> Result<Vec<usize>> {
        match self {
            LefschetzModel::Cohomology(a) => {
                let i = p * rat(2) - rat(s);
                let top = 2 * a.context().g() as i64;
                let Some(i) = i.is_integer().then(|| i.to_integer().to_i64()).flatten() else {
                    return Ok(Vec::new());
                };
                if i < 0 || i > top {
                    return Ok(Vec::new());
                }
                let n = a.variety().cohomology_dimension();
                Ok((0..n)
                    .filter(|m| (*m as u64).count_ones() as i64 == i)
                    .collect())
            }
            LefschetzModel::Free(m, _) => {
                let mut out = Vec::new();
                for (j, z) in m.generators.iter().enumerate() {
                    let (pj, sj) = z
                        .bidegree
                        .as_ref()
                        .ok_or_else(|| Error::MissingBidegree(z.label.clone()))?;
                    if *sj != s {
                        continue;
                    }
                    let k = p - pj;
                    if !k.is_integer() {
                        continue;
                    }
                    let Some(k) = k.to_integer().to_i64() else {
                        continue;
                    };
                    if k >= 0 && k <= z.lambda as i64 {
                        out.push(m.index(j, k as u32));
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Ranks of `×θ^{q−p}` from the `(p, s)` piece to the `(q, s)` piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardLefschetzResult {
    pub p: Rational,
    pub q: Rational,
    pub s: i64,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub injective: bool,
    pub surjective: bool,
    /// `p + q ≤ g + s`
    pub predicts_injective: bool,
    /// `p + q ≥ g + s`
    pub predicts_surjective: bool,
}

impl HardLefschetzResult {
    /// The predicted properties hold.
    pub fn consistent(&self) -> bool {
        (!self.predicts_injective || self.injective)
            && (!self.predicts_surjective || self.surjective)
    }
}

fn restricted_images(op: &LinearMap, source: &[usize], target: &[usize]) -> Vec<Vector> {
    let n = op.domain_dim();
    source
        .iter()
        .map(|&i| {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            let img = op.apply(&e);
            target.iter().map(|&j| img[j].clone()).collect()
        })
        .collect()
}

/// Rank of `×θ^{q−p}: (p, s) → (q, s)` against the predicate `p + q ≤ g + s` / `≥`.
pub fn hard_lefschetz_check(
    model: &LefschetzModel<'_>,
    p: &Rational,
    q: &Rational,
    s: i64,
) -> Result<HardLefschetzResult> {
    let k = q - p;
    let k = (k.is_integer() && k >= Rational::zero())
        .then(|| k.to_integer().to_u32())
        .flatten()
        .ok_or_else(|| {
            Error::InvalidBidegree(format!(
                "q - p = {} must be a nonnegative integer",
                format::rational(&(q - p))
            ))
        })?;
    let source = model.piece(p, s)?;
    let target = model.piece(q, s)?;
    let op = model.triple().x().pow(k);
    let rank = span_rank(&restricted_images(&op, &source, &target));
    let g = rat(model.g() as i64 + s);
    let sum = p + q;
    Ok(HardLefschetzResult {
        p: p.clone(),
        q: q.clone(),
        s,
        source_dim: source.len(),
        target_dim: target.len(),
        rank,
        injective: rank == source.len(),
        surjective: rank == target.len(),
        predicts_injective: sum <= g,
        predicts_surjective: sum >= g,
    })
}

/// Rank of `×θ^{q−p}` on a free module predicted from its blocks: `X^k z_j` survives
/// `k + (q − p) ≤ λ_j`.
pub fn block_rank(
    module: &FreeBeauvilleModule,
    p: &Rational,
    q: &Rational,
    s: i64,
) -> Result<usize> {
    let shift = q - p;
    let mut count = 0;
    for z in &module.generators {
        let (pj, sj) = z
            .bidegree
            .as_ref()
            .ok_or_else(|| Error::MissingBidegree(z.label.clone()))?;
        if *sj != s {
            continue;
        }
        let k = p - pj;
        if !k.is_integer() || k < Rational::zero() {
            continue;
        }
        if k.clone() + shift.clone() <= rat(z.lambda as i64) {
            count += 1;
        }
    }
    Ok(count)
}

/// `X^{g−2p} z = 0` on the one-generator free module of bidegree `(p, s)`;
/// expected exactly when `s < 0`.
pub fn negative_s_annihilation_check(g: u32, p: i64, s: i64) -> Result<CheckReport> {
    let lambda = g as i64 + s - 2 * p;
    if lambda < 0 {
        return Err(Error::InvalidBidegree(format!("g + s - 2p = {lambda} < 0")));
    }
    let power = g as i64 - 2 * p;
    if power < 0 {
        return Err(Error::InvalidBidegree(format!("g - 2p = {power} < 0")));
    }
    let z = FreeGenerator::from_bidegree("z", g, rat(p), s)?;
    let (module, t) = build_free_module(g, vec![z])?;
    let image = t.x().pow(power as u32).apply(&module.basis_vector(0, 0));
    let annihilated = image.iter().all(Zero::is_zero);
    let expected = s < 0;
    let mut report = CheckReport::new(format!("annihilation, g={g}, p={p}, s={s}"));
    report.push(
        format!("X^{power} z = 0 iff s < 0"),
        annihilated == expected,
        format!("lambda = {lambda}, annihilated = {annihilated}"),
    );
    Ok(report)
}

/// Injectivity of `×θ^{q−p}` on the part of `⊕_s CH^p_s` with `s ≥ p + q − g`.
pub fn filtration_lefschetz_check(
    module: &FreeBeauvilleModule,
    t: &Sl2Triple,
    p: &Rational,
    q: &Rational,
) -> Result<CheckReport> {
    let model = LefschetzModel::Free(module, t);
    let threshold = p + q - rat(module.g as i64);
    let mut ss: Vec<i64> = Vec::new();
    for z in &module.generators {
        let (_, s) = z
            .bidegree
            .as_ref()
            .ok_or_else(|| Error::MissingBidegree(z.label.clone()))?;
        if rat(*s) >= threshold && !ss.contains(s) {
            ss.push(*s);
        }
    }
    ss.sort();
    let mut source_dim = 0;
    let mut rank = 0;
    for &s in &ss {
        let r = hard_lefschetz_check(&model, p, q, s)?;
        source_dim += r.source_dim;
        rank += r.rank;
    }
    let mut report = CheckReport::new(format!(
        "filtered Lefschetz, p={}, q={}",
        format::rational(p),
        format::rational(q)
    ));
    report.push(
        "x theta^(q-p) injective on F^(p+q-g)",
        rank == source_dim,
        format!(
            "source dim {source_dim}, rank {rank}, weights s >= {}",
            format::rational(&threshold)
        ),
    );
    Ok(report)
}

/// Primitive dimensions per `(p, s)` and the hard-Lefschetz rank table of a model.
#[derive(Clone, Debug)]
pub struct LefschetzReport {
    /// Primitive dimension per H-weight `−λ`, next to the number of blocks with that `λ`.
    pub primitive_dims: BTreeMap<i64, (usize, usize)>,
    pub ranks: Vec<HardLefschetzResult>,
    pub checks: CheckReport,
}

/// Runs the rank table over every piece of the model.
pub fn lefschetz_survey(model: &LefschetzModel<'_>) -> Result<LefschetzReport> {
    let t = model.triple();
    let blocks = decompose(t)?;
    let prims = primitive_subspace(t)?;
    let mut primitive_dims: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for (w, basis) in &prims {
        primitive_dims.entry(*w).or_default().0 = basis.len();
    }
    for b in &blocks {
        primitive_dims.entry(-(b.lambda as i64)).or_default().1 += 1;
    }
    let mut pieces: Vec<(Rational, i64)> = Vec::new();
    match model {
        LefschetzModel::Cohomology(a) => {
            let g = a.context().g() as i64;
            for i in 0..=2 * g {
                let s = i % 2;
                pieces.push((crate::exactla::ratio(i + s, 2), s));
            }
        }
        LefschetzModel::Free(m, _) => {
            for z in &m.generators {
                let (pj, sj) = z
                    .bidegree
                    .clone()
                    .ok_or_else(|| Error::MissingBidegree(z.label.clone()))?;
                for k in 0..=z.lambda {
                    let piece = (&pj + rat(k as i64), sj);
                    if !pieces.contains(&piece) {
                        pieces.push(piece);
                    }
                }
            }
        }
    }
    let max_shift = 2 * model.g() + 1;
    let mut ranks = Vec::new();
    for (p, s) in &pieces {
        for k in 0..=max_shift {
            let q = p + rat(k as i64);
            ranks.push(hard_lefschetz_check(model, p, &q, *s)?);
        }
    }
    let mut checks = CheckReport::new("Lefschetz survey");
    let dims_ok = primitive_dims.values().all(|(a, b)| a == b);
    checks.push("primitive dimension = block count per weight", dims_ok, "");
    let bad = ranks.iter().filter(|r| !r.consistent()).count();
    checks.push(
        "p+q <= g+s gives injective, p+q >= g+s gives surjective",
        bad == 0,
        format!("{} maps, {bad} violations", ranks.len()),
    );
    match model {
        LefschetzModel::Cohomology(_) => {
            let exact_bad = ranks
                .iter()
                .filter(|r| r.source_dim > 0 && r.target_dim > 0 && r.q > r.p)
                .filter(|r| {
                    r.injective != r.predicts_injective || r.surjective != r.predicts_surjective
                })
                .count();
            checks.push(
                "predicate is exact for q > p on nonzero pieces",
                exact_bad == 0,
                format!("{exact_bad} mismatches"),
            );
        }
        LefschetzModel::Free(m, _) => {
            let mut bad = 0;
            for r in &ranks {
                if block_rank(m, &r.p, &r.q, r.s)? != r.rank {
                    bad += 1;
                }
            }
            checks.push("rank = block count", bad == 0, format!("{bad} mismatches"));
        }
    }
    Ok(LefschetzReport {
        primitive_dims,
        ranks,
        checks,
    })
}
