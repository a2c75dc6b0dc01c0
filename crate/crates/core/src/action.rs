//! The `sl₂` triple and `SL₂(ℚ)` action on the cohomology of a polarized
//! abelian variety, together with their lifts to correspondences.

use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};

use crate::abvar::{
    fourier, poincare_class, pontryagin, pullback, theta, CohClass, HomMorphism, PolarizedContext,
    ProductVariety,
};
use crate::corr::{
    apply, compose, diagonal_class, diagonal_push, kunneth_idempotents, transpose_graph,
    Correspondence,
};
use crate::error::{Error, Result};
use crate::exactla::{factorial, pow_i, rat, LinearMap, Rational};
use crate::extalg::Monomial;
use crate::report::CheckReport;
use crate::sl2rep::{
    act_operator, act_word, demazure_check, factor_elementary, DemazureReport, Elementary,
    GroupElement, Sl2Triple,
};

/// Largest `g` for which the full operator triple is materialized.
pub const OPERATOR_MAX_G: usize = 4;
/// Largest `g` for which correspondence lifts are composed.
pub const LIFT_MAX_G: usize = 3;
/// Largest `g` for the correspondence-level relation check.
pub const RELATIONS_MAX_G: usize = 2;

fn guard(g: usize, limit: usize, what: &'static str) -> Result<()> {
    if g > limit {
        return Err(Error::DimensionGuard { what, limit, g });
    }
    Ok(())
}

/// `θ^{g−1} / (d·(g−1)!)`, the Pontryagin kernel of `Y`.
fn y_kernel(v: &ProductVariety) -> Result<CohClass> {
    let g = v.g() as u32;
    let t = theta(v)?;
    let scale = (v.context().degree() * factorial(g - 1)).recip();
    Ok(t.pow(g - 1).scale(&scale))
}

/// Matrix of a linear map on cohomology in the monomial basis.
pub fn operator_matrix(
    v: &ProductVariety,
    f: impl Fn(&CohClass) -> Result<CohClass>,
) -> Result<LinearMap> {
    let n = v.cohomology_dimension();
    let mut m = LinearMap::zero(n, n);
    for col in 0..n {
        let image = f(&v.monomial(Monomial(col as u64), Rational::one()))?;
        for (mono, c) in image.value().terms() {
            m.set(mono.0 as usize, col, c.clone());
        }
    }
    Ok(m)
}

/// The triple `X = θ·`, `Y = θ^{g−1}/(d(g−1)!) ∗`, `H = i − g` on degree `i`.
#[derive(Clone, Debug)]
pub struct ChowAction {
    variety: ProductVariety,
    triple: Sl2Triple,
}

/// Builds the triple on `H*(A)` and verifies its brackets.
pub fn build_action(ctx: &Arc<PolarizedContext>) -> Result<ChowAction> {
    guard(ctx.g(), OPERATOR_MAX_G, "sl2 operator triple")?;
    let v = ProductVariety::single(ctx);
    let t = theta(&v)?;
    let kernel = y_kernel(&v)?;
    let x = operator_matrix(&v, |z| Ok(&t * z))?;
    let y = operator_matrix(&v, |z| pontryagin(&kernel, z))?;
    let g = ctx.g() as i64;
    let n = v.cohomology_dimension();
    let h = LinearMap::diagonal(
        &(0..n)
            .map(|m| rat((m as u64).count_ones() as i64 - g))
            .collect::<Vec<_>>(),
    );
    let labels = (0..n)
        .map(|m| v.monomial(Monomial(m as u64), Rational::one()).to_string())
        .collect();
    let triple = Sl2Triple::new(x, y, h)?.with_labels(labels)?;
    triple.ensure_brackets()?;
    Ok(ChowAction { variety: v, triple })
}

impl ChowAction {
    pub fn context(&self) -> &Arc<PolarizedContext> {
        self.variety.context()
    }

    pub fn variety(&self) -> &ProductVariety {
        &self.variety
    }

    pub fn triple(&self) -> &Sl2Triple {
        &self.triple
    }

    fn check_class(&self, z: &CohClass) -> Result<()> {
        if z.variety() != &self.variety {
            return Err(Error::VarietyMismatch);
        }
        Ok(())
    }

    pub fn x(&self, z: &CohClass) -> Result<CohClass> {
        self.check_class(z)?;
        Ok(CohClass::from_vector(
            &self.variety,
            &self.triple.x().apply(&z.to_vector()),
        ))
    }

    pub fn y(&self, z: &CohClass) -> Result<CohClass> {
        self.check_class(z)?;
        Ok(CohClass::from_vector(
            &self.variety,
            &self.triple.y().apply(&z.to_vector()),
        ))
    }

    pub fn h(&self, z: &CohClass) -> Result<CohClass> {
        self.check_class(z)?;
        Ok(CohClass::from_vector(
            &self.variety,
            &self.triple.h().apply(&z.to_vector()),
        ))
    }

    /// `M·z` through `factor_elementary`, with `u(a) ↦ exp(aX)` and `v(b) ↦ exp(bY)`.
    pub fn act_general(&self, m: &GroupElement, z: &CohClass) -> Result<CohClass> {
        self.check_class(z)?;
        let out = act_word(&factor_elementary(m), &self.triple, &z.to_vector());
        Ok(CohClass::from_vector(&self.variety, &out))
    }

    /// The matrix of `M` on `H*(A)`.
    pub fn operator(&self, m: &GroupElement) -> Result<LinearMap> {
        act_operator(m, &self.triple)
    }

    /// `M·z` through the Bruhat form `M = u(a/c)·diag(1/c, c)·w·u(d/c)` (or
    /// `diag(a, 1/a)·u(b/a)` when `c = 0`), each factor by its closed form.
    pub fn act_bruhat(&self, m: &GroupElement, z: &CohClass) -> Result<CohClass> {
        self.check_class(z)?;
        let [a, b, c, d] = m.entries();
        let factors = if c.is_zero() {
            vec![GroupElement::torus(a.clone())?, GroupElement::upper(b / a)]
        } else {
            vec![
                GroupElement::upper(a / c),
                GroupElement::torus(c.recip())?,
                GroupElement::w(),
                GroupElement::upper(d / c),
            ]
        };
        factors
            .iter()
            .rev()
            .try_fold(z.clone(), |acc, f| act_closed_form(f, &acc))
    }
}

/// `φ(u(a)) = Δ_*e^{aθ}`.
pub fn phi_upper(ctx: &Arc<PolarizedContext>, a: &Rational) -> Result<Correspondence> {
    let t = theta(&ProductVariety::single(ctx))?;
    diagonal_push(&t.scale(a).exp()?)
}

/// `φ(v(a)) = d⁻¹aᵍ e^{δ^*θ/a}`, and `[Δ]` at `a = 0`.
pub fn phi_lower(ctx: &Arc<PolarizedContext>, a: &Rational) -> Result<Correspondence> {
    if a.is_zero() {
        return Ok(diagonal_class(ctx));
    }
    let t = theta(&ProductVariety::single(ctx))?;
    let pulled = pullback(&HomMorphism::difference(ctx), &t)?;
    let scale = pow_i(a, ctx.g() as i64) / ctx.degree();
    Correspondence::new(pulled.scale(&a.recip()).exp()?.scale(&scale))
}

/// `φ(w) = d⁻¹e^℘`.
pub fn phi_w(ctx: &Arc<PolarizedContext>) -> Result<Correspondence> {
    let pair = ProductVariety::new(ctx, 2)?;
    Correspondence::new(poincare_class(&pair)?.exp()?.scale(&ctx.degree().recip()))
}

/// `φ(diag(n, 1/n)) = n^{−g}Γ'_n` for a nonzero integer `n`.
pub fn phi_torus(ctx: &Arc<PolarizedContext>, n: i64) -> Result<Correspondence> {
    if n == 0 {
        return Err(Error::NotSpecialLinear("torus parameter is zero".into()));
    }
    let g = ctx.g() as i64;
    Ok(transpose_graph(ctx, n).scale(&pow_i(&rat(n), -g)))
}

/// `φ(M)` as the composite of the lifts of the elementary factors.
pub fn phi(ctx: &Arc<PolarizedContext>, m: &GroupElement) -> Result<Correspondence> {
    guard(ctx.g(), LIFT_MAX_G, "correspondence lift")?;
    let mut acc = diagonal_class(ctx);
    for e in factor_elementary(m) {
        let lift = match &e {
            Elementary::Upper(a) => phi_upper(ctx, a)?,
            Elementary::Lower(b) => phi_lower(ctx, b)?,
        };
        acc = compose(&acc, &lift)?;
    }
    Ok(acc)
}

fn is_integer_value(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

/// `diag(t, 1/t)·z = t^{−g} t^*z`, i.e. `t^{i−g}` on degree `i`.
fn torus_closed_form(t: &Rational, z: &CohClass) -> Result<CohClass> {
    let g = z.variety().g() as i64;
    let scale = pow_i(t, -g);
    if let Some(n) = is_integer_value(t) {
        let nmap = HomMorphism::multiplication(z.variety().context(), n);
        return Ok(pullback(&nmap, z)?.scale(&scale));
    }
    Ok(z.scale_by_degree(|i| pow_i(t, i as i64 - g)))
}

/// The four closed forms: torus, `±w`, upper and lower unipotent.
pub fn act_closed_form(m: &GroupElement, z: &CohClass) -> Result<CohClass> {
    if z.variety().factors() != 1 {
        return Err(Error::NotSingleFactor);
    }
    let [a, b, c, d] = m.entries();
    let one = Rational::one();
    if b.is_zero() && c.is_zero() {
        return torus_closed_form(a, z);
    }
    if a.is_zero() && d.is_zero() {
        if *c == one {
            return fourier(z);
        }
        let minus = torus_closed_form(&-one, z)?;
        return fourier(&minus);
    }
    if *a == one && *d == one && c.is_zero() {
        let t = theta(z.variety())?;
        return Ok(&t.scale(b).exp()? * z);
    }
    if *a == one && *d == one && b.is_zero() {
        let v = z.variety();
        let ctx = v.context();
        let t = theta(v)?;
        let kernel = t
            .scale(&c.recip())
            .exp()?
            .scale(&(pow_i(c, ctx.g() as i64) / ctx.degree()));
        return pontryagin(&kernel, z);
    }
    Err(Error::UnsupportedShape)
}

/// `M·z` through `factor_elementary` on a freshly built triple.
pub fn act_general(m: &GroupElement, z: &CohClass) -> Result<CohClass> {
    if z.variety().factors() != 1 {
        return Err(Error::NotSingleFactor);
    }
    build_action(z.variety().context())?.act_general(m, z)
}

fn basis_agreement(
    v: &ProductVariety,
    lhs: impl Fn(&CohClass) -> Result<CohClass>,
    rhs: impl Fn(&CohClass) -> Result<CohClass>,
) -> Result<(bool, usize)> {
    let n = v.cohomology_dimension();
    let mut bad = 0;
    for m in 0..n {
        let e = v.monomial(Monomial(m as u64), Rational::one());
        if lhs(&e)? != rhs(&e)? {
            bad += 1;
        }
    }
    Ok((bad == 0, bad))
}

/// The presentation conditions with `h` the Fourier transform, `β` the action.
pub fn fourier_demazure_check(action: &ChowAction) -> Result<DemazureReport> {
    let f = operator_matrix(action.variety(), fourier)?;
    demazure_check(
        |s| action.operator(&GroupElement::upper(s.clone())),
        |s| action.operator(&GroupElement::torus(s.clone())?),
        &f,
    )
}

/// Brackets plus the correspondence forms of `X`, `Y`, `H`, checked on a full basis.
pub fn lie_algebra_check(action: &ChowAction) -> Result<CheckReport> {
    let ctx = action.context().clone();
    let v = action.variety().clone();
    let g = ctx.g();
    let mut report = CheckReport::new(format!("Lie algebra action, g={g}, type {ctx}"));
    let brackets = crate::sl2rep::check_bracket(action.triple());
    report.push("brackets", brackets.passed(), brackets.to_string());

    let t = theta(&v)?;
    let lx = diagonal_push(&t)?;
    let (ok, bad) = basis_agreement(&v, |z| apply(&lx, z), |z| action.x(z))?;
    report.push("X = Delta_* theta", ok, format!("{bad} basis mismatches"));

    let pulled = pullback(&HomMorphism::difference(&ctx), &t)?;
    let gu = g as u32;
    let ly = Correspondence::new(
        pulled
            .pow(gu - 1)
            .scale(&(ctx.degree() * factorial(gu - 1)).recip()),
    )?;
    let (ok, bad) = basis_agreement(&v, |z| apply(&ly, z), |z| action.y(z))?;
    report.push(
        "Y = delta^* theta^(g-1) / (d (g-1)!)",
        ok,
        format!("{bad} basis mismatches"),
    );

    let gi = g as i64;
    let lh = kunneth_idempotents(&ctx)
        .iter()
        .enumerate()
        .fold(Correspondence::zero(&ctx)?, |acc, (i, p)| {
            &acc + &p.scale(&rat(i as i64 - gi))
        });
    let (ok, bad) = basis_agreement(&v, |z| apply(&lh, z), |z| action.h(z))?;
    report.push("H = sum (i-g) pi_i", ok, format!("{bad} basis mismatches"));
    Ok(report)
}

/// `t^{−g}Σ tⁱπᵢ = t^{−g}Γ'_t` as correspondences.
pub fn torus_check(ctx: &Arc<PolarizedContext>, t: i64) -> Result<CheckReport> {
    let mut report = CheckReport::new(format!("torus lift, t={t}"));
    let lhs = kunneth_idempotents(ctx)
        .iter()
        .enumerate()
        .fold(Correspondence::zero(ctx)?, |acc, (i, p)| {
            &acc + &p.scale(&pow_i(&rat(t), i as i64))
        });
    report.push(
        "sum t^i pi_i = transposed graph of t",
        lhs == transpose_graph(ctx, t),
        "",
    );
    Ok(report)
}

/// `φ(w)⁴ = [Δ]`, `(φ(u)∘φ(w))³ = φ(w)²`, `φ(w)² = (−1)ᵍΓ'₋₁`, all in `Corr(A)`.
pub fn sl2z_relations_check(ctx: &Arc<PolarizedContext>) -> Result<CheckReport> {
    guard(ctx.g(), RELATIONS_MAX_G, "SL2(Z) relation check")?;
    let mut report = CheckReport::new(format!("SL2(Z) relations, g={}, type {ctx}", ctx.g()));
    let w = phi_w(ctx)?;
    let u = phi_upper(ctx, &Rational::one())?;
    let w2 = compose(&w, &w)?;
    let w4 = compose(&w2, &w2)?;
    report.push("phi(w)^4 = [Delta]", w4 == diagonal_class(ctx), "");
    let uw = compose(&u, &w)?;
    let uw3 = compose(&uw, &compose(&uw, &uw)?)?;
    report.push("(phi(u) phi(w))^3 = phi(w)^2", uw3 == w2, "");
    let sign = if ctx.g().is_multiple_of(2) {
        rat(1)
    } else {
        rat(-1)
    };
    let inv = transpose_graph(ctx, -1).scale(&sign);
    report.push("phi(w)^2 = (-1)^g transposed graph of -1", w2 == inv, "");
    Ok(report)
}

/// `(e^{δ^*θ/a})_*z = e^{θ/a} ∗ z` for each supplied `z`.
pub fn sigma_identity_check(
    ctx: &Arc<PolarizedContext>,
    a: &Rational,
    zs: &[CohClass],
) -> Result<CheckReport> {
    guard(ctx.g(), LIFT_MAX_G, "sigma identity check")?;
    if a.is_zero() {
        return Err(Error::NotSpecialLinear("parameter must be nonzero".into()));
    }
    let v = ProductVariety::single(ctx);
    let t = theta(&v)?;
    let pulled = pullback(&HomMorphism::difference(ctx), &t)?;
    let kernel = Correspondence::new(pulled.scale(&a.recip()).exp()?)?;
    let conv = t.scale(&a.recip()).exp()?;
    let mut report = CheckReport::new(format!(
        "sigma identity, a={}, g={}",
        crate::format::rational(a),
        ctx.g()
    ));
    let mut bad = 0;
    for z in zs {
        if apply(&kernel, z)? != pontryagin(&conv, z)? {
            bad += 1;
        }
    }
    report.push(
        "(e^(delta^* theta / a))_* z = e^(theta/a) * z",
        bad == 0,
        format!("{} classes, {bad} mismatches", zs.len()),
    );
    Ok(report)
}

/// `apply(φ(M), z) = M·z` for `M ∈ {u(1), v(1), w, diag(2, 1/2)}`.
pub fn lift_consistency_check(action: &ChowAction, zs: &[CohClass]) -> Result<CheckReport> {
    let ctx = action.context();
    let mut report = CheckReport::new(format!(
        "correspondence lifts, g={}, type {}",
        action.context().g(),
        action.context()
    ));
    let one = Rational::one();
    let cases: Vec<(&str, GroupElement, Correspondence)> = vec![
        (
            "u(1)",
            GroupElement::upper(one.clone()),
            phi_upper(ctx, &one)?,
        ),
        (
            "v(1)",
            GroupElement::lower(one.clone()),
            phi_lower(ctx, &one)?,
        ),
        ("w", GroupElement::w(), phi_w(ctx)?),
        (
            "diag(2,1/2)",
            GroupElement::torus(rat(2))?,
            phi_torus(ctx, 2)?,
        ),
    ];
    for (name, m, lift) in cases {
        let mut bad = 0;
        for z in zs {
            if apply(&lift, z)? != action.act_general(&m, z)? {
                bad += 1;
            }
        }
        report.push(
            format!("apply(phi({name}), z) = {name}.z"),
            bad == 0,
            format!("{} classes", zs.len()),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abvar::point_class;
    use crate::exactla::ratio;
    use crate::random::{random_class, seeded};
    use crate::sl2rep::check_bracket;

    fn ctx(t: &[u64]) -> Arc<PolarizedContext> {
        PolarizedContext::new(t.len(), t.to_vec()).unwrap()
    }

    #[test]
    fn triple_examples() {
        let a = build_action(&ctx(&[1])).unwrap();
        let h: Vec<Rational> = (0..4).map(|i| a.triple().h().get(i, i)).collect();
        assert_eq!(h, vec![rat(-1), rat(0), rat(0), rat(1)]);
        let c = ctx(&[1, 2]);
        let a = build_action(&c).unwrap();
        let v = a.variety().clone();
        let t = theta(&v).unwrap();
        assert_eq!(a.x(&v.one()).unwrap(), t);
        assert_eq!(a.x(&t).unwrap(), t.pow(2));
        assert!(a.x(&t.pow(2)).unwrap().is_zero());
        for t in [&[1u64][..], &[1, 2], &[1, 1, 3]] {
            assert!(check_bracket(build_action(&ctx(t)).unwrap().triple()).passed());
        }
        assert!(matches!(
            build_action(&PolarizedContext::principal(5)),
            Err(Error::DimensionGuard { .. })
        ));
    }

    #[test]
    fn closed_form_examples() {
        let c = ctx(&[1]);
        let v = ProductVariety::single(&c);
        let t = theta(&v).unwrap();
        let up = act_closed_form(&GroupElement::upper(rat(1)), &v.one()).unwrap();
        assert_eq!(up, &v.one() + &t);
        assert_eq!(act_closed_form(&GroupElement::w(), &v.one()).unwrap(), -&t);
        let pt = point_class(&v).unwrap();
        let a = build_action(&c).unwrap();
        let low = GroupElement::lower(rat(1));
        assert_eq!(
            act_closed_form(&low, &pt).unwrap(),
            a.act_general(&low, &pt).unwrap()
        );
        assert_eq!(
            act_closed_form(&GroupElement::lower(rat(0)), &pt).unwrap(),
            pt
        );
        let odd = GroupElement::from_ints(2, 1, 1, 1).unwrap();
        assert_eq!(act_closed_form(&odd, &pt), Err(Error::UnsupportedShape));
    }

    #[test]
    fn general_matches_closed_forms() {
        let mut rng = seeded(4);
        for t in [&[1u64][..], &[1, 2]] {
            let c = ctx(t);
            let a = build_action(&c).unwrap();
            let v = a.variety().clone();
            let shapes = [
                GroupElement::identity(),
                GroupElement::w(),
                GroupElement::w().inverse(),
                GroupElement::upper(ratio(3, 2)),
                GroupElement::lower(rat(2)),
                GroupElement::lower(ratio(-1, 3)),
                GroupElement::torus(rat(2)).unwrap(),
                GroupElement::torus(ratio(-2, 3)).unwrap(),
                GroupElement::minus_identity(),
            ];
            for _ in 0..3 {
                let z = random_class(&v, &mut rng, 6);
                for m in &shapes {
                    assert_eq!(
                        a.act_general(m, &z).unwrap(),
                        act_closed_form(m, &z).unwrap(),
                        "{m}"
                    );
                }
                let two = HomMorphism::multiplication(&c, 2);
                let expected = pullback(&two, &z)
                    .unwrap()
                    .scale(&pow_i(&rat(2), -(c.g() as i64)));
                assert_eq!(
                    a.act_general(&GroupElement::torus(rat(2)).unwrap(), &z)
                        .unwrap(),
                    expected
                );
                let m = GroupElement::from_ints(3, 2, 4, 3).unwrap();
                assert_eq!(
                    a.act_bruhat(&m, &z).unwrap(),
                    a.act_general(&m, &z).unwrap()
                );
            }
        }
    }

    #[test]
    fn lifts_and_lie_algebra() {
        let mut rng = seeded(6);
        for t in [&[1u64][..], &[1, 1], &[1, 2]] {
            let c = ctx(t);
            let a = build_action(&c).unwrap();
            let zs: Vec<CohClass> = (0..3)
                .map(|_| random_class(a.variety(), &mut rng, 5))
                .collect();
            let r = lift_consistency_check(&a, &zs).unwrap();
            assert!(r.passed(), "{r}");
            let r = lie_algebra_check(&a).unwrap();
            assert!(r.passed(), "{r}");
            for t in [2, 3] {
                assert!(torus_check(&c, t).unwrap().passed());
            }
        }
    }

    #[test]
    fn relation_examples() {
        for t in [&[1u64][..], &[1, 1], &[1, 2]] {
            let r = sl2z_relations_check(&ctx(t)).unwrap();
            assert!(r.passed(), "{r}");
        }
        assert!(matches!(
            sl2z_relations_check(&ctx(&[1, 1, 1])),
            Err(Error::DimensionGuard { .. })
        ));
    }

    #[test]
    fn sigma_examples() {
        let c = ctx(&[1]);
        let v = ProductVariety::single(&c);
        assert!(sigma_identity_check(&c, &rat(1), &[v.one(), v.zero()])
            .unwrap()
            .passed());
        let c = ctx(&[1, 1]);
        let v = ProductVariety::single(&c);
        let mut rng = seeded(10);
        let zs: Vec<CohClass> = (0..4).map(|_| random_class(&v, &mut rng, 6)).collect();
        assert!(sigma_identity_check(&c, &rat(2), &zs).unwrap().passed());
    }

    #[test]
    fn fourier_is_demazure_generator_for_elliptic_curve() {
        let c = ctx(&[1]);
        let a = build_action(&c).unwrap();
        let report = fourier_demazure_check(&a).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}
