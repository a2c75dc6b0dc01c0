//! The correspondence algebra `Corr(A)`: classes on `A×A` under
//! `β∘α = (p₁₃)_*(p₁₂^*α · p₂₃^*β)`, acting on classes by `α_*z = q_*(p^*z · α)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::abvar::{
    pullback, pushforward, CohClass, HomMorphism, PolarizedContext, ProductVariety,
};
use crate::error::{Error, Result};
use crate::exactla::{solve, LinearMap, Rational};
use crate::extalg::Monomial;

/// Compositions run on `A×A×A`, i.e. `6g` generators.
pub const COMPOSE_MAX_G: usize = 3;
/// Inversion solves a dense system of size `2^{4g}`.
pub const INVERT_MAX_G: usize = 2;

/// A class on `A×A` viewed as a self-correspondence of `A`.
#[derive(Clone, PartialEq, Eq)]
pub struct Correspondence {
    value: CohClass,
}

impl fmt::Debug for Correspondence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for Correspondence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Correspondence {
    pub fn new(value: CohClass) -> Result<Self> {
        if value.variety().factors() != 2 {
            return Err(Error::NotTwoFactors);
        }
        Ok(Correspondence { value })
    }

    pub fn value(&self) -> &CohClass {
        &self.value
    }

    pub fn into_value(self) -> CohClass {
        self.value
    }

    pub fn context(&self) -> &Arc<PolarizedContext> {
        self.value.variety().context()
    }

    pub fn variety(&self) -> &ProductVariety {
        self.value.variety()
    }

    pub fn scale(&self, s: &Rational) -> Correspondence {
        Correspondence {
            value: self.value.scale(s),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn zero(ctx: &Arc<PolarizedContext>) -> Result<Self> {
        Ok(Correspondence {
            value: ProductVariety::new(ctx, 2)?.zero(),
        })
    }
}

impl Add for &Correspondence {
    type Output = Correspondence;
    fn add(self, rhs: &Correspondence) -> Correspondence {
        Correspondence {
            value: &self.value + &rhs.value,
        }
    }
}

impl Sub for &Correspondence {
    type Output = Correspondence;
    fn sub(self, rhs: &Correspondence) -> Correspondence {
        Correspondence {
            value: &self.value - &rhs.value,
        }
    }
}

impl Neg for &Correspondence {
    type Output = Correspondence;
    fn neg(self) -> Correspondence {
        Correspondence {
            value: -&self.value,
        }
    }
}

fn guard(ctx: &PolarizedContext, limit: usize, what: &'static str) -> Result<()> {
    if ctx.g() > limit {
        return Err(Error::DimensionGuard {
            what,
            limit,
            g: ctx.g(),
        });
    }
    Ok(())
}

/// `β∘α`.
pub fn compose(beta: &Correspondence, alpha: &Correspondence) -> Result<Correspondence> {
    if beta.context() != alpha.context() {
        return Err(Error::VarietyMismatch);
    }
    let ctx = alpha.context();
    guard(ctx, COMPOSE_MAX_G, "correspondence composition")?;
    let p12 = HomMorphism::projection(ctx, 3, &[0, 1])?;
    let p23 = HomMorphism::projection(ctx, 3, &[1, 2])?;
    let p13 = HomMorphism::projection(ctx, 3, &[0, 2])?;
    let a = pullback(&p12, &alpha.value)?;
    let b = pullback(&p23, &beta.value)?;
    Correspondence::new(pushforward(&p13, &(&a * &b))?)
}

/// `α_*z = q_*(p^*z · α)`; the factor order matches [`compose`], which keeps
/// `apply` a representation also on odd classes.
pub fn apply(alpha: &Correspondence, z: &CohClass) -> Result<CohClass> {
    if z.variety().factors() != 1 || z.variety().context() != alpha.context() {
        return Err(Error::VarietyMismatch);
    }
    let ctx = alpha.context();
    let pz = pullback(&HomMorphism::first_projection(ctx), z)?;
    pushforward(&HomMorphism::second_projection(ctx), &(&pz * &alpha.value))
}

/// `Δ_*z`.
pub fn diagonal_push(z: &CohClass) -> Result<Correspondence> {
    if z.variety().factors() != 1 {
        return Err(Error::VarietyMismatch);
    }
    let delta = HomMorphism::diagonal(z.variety().context());
    Correspondence::new(pushforward(&delta, z)?)
}

/// The unit `[Δ_A]`.
pub fn diagonal_class(ctx: &Arc<PolarizedContext>) -> Correspondence {
    diagonal_push(&ProductVariety::single(ctx).one()).expect("diagonal class")
}

/// `Γ_n`, the graph of multiplication by `n`: pushforward of `1` along `a ↦ (a, na)`.
pub fn graph(ctx: &Arc<PolarizedContext>, n: i64) -> Correspondence {
    let one = ProductVariety::single(ctx).one();
    Correspondence::new(pushforward(&HomMorphism::graph_map(ctx, 1, n), &one).expect("graph"))
        .expect("two factors")
}

/// `Γ'_n`, the transposed graph: pushforward of `1` along `a ↦ (na, a)`.
pub fn transpose_graph(ctx: &Arc<PolarizedContext>, n: i64) -> Correspondence {
    let one = ProductVariety::single(ctx).one();
    Correspondence::new(pushforward(&HomMorphism::graph_map(ctx, n, 1), &one).expect("graph"))
        .expect("two factors")
}

/// `π₀,…,π_{2g}`: `πᵢ` is the part of `[Δ]` whose second-factor degree is `i`.
pub fn kunneth_idempotents(ctx: &Arc<PolarizedContext>) -> Vec<Correspondence> {
    let diag = diagonal_class(ctx);
    let v = diag.variety().clone();
    let g = ctx.g();
    let second = Monomial(((1u64 << (2 * g)) - 1) << (2 * g));
    let mut parts: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); 2 * g + 1];
    for (m, c) in diag.value.value().terms() {
        let i = (m.0 & second.0).count_ones() as usize;
        parts[i].push((m, c.clone()));
    }
    parts
        .into_iter()
        .map(|terms| {
            let cls = terms
                .into_iter()
                .fold(v.zero(), |acc, (m, c)| &acc + &v.monomial(m, c));
            Correspondence { value: cls }
        })
        .collect()
}

/// Two-sided inverse, found by solving `β∘α = [Δ]` over all of `H*(A×A)`.
pub fn invert(alpha: &Correspondence) -> Result<Correspondence> {
    let ctx = alpha.context();
    guard(ctx, INVERT_MAX_G, "correspondence inversion")?;
    let v = alpha.variety().clone();
    let dim = v.cohomology_dimension();
    let columns: Vec<Vec<Rational>> = (0..dim)
        .map(|mask| {
            let basis = Correspondence {
                value: v.monomial(Monomial(mask as u64), Rational::one()),
            };
            compose(&basis, alpha).map(|c| c.value.to_vector())
        })
        .collect::<Result<_>>()?;
    let right_mult = LinearMap::from_columns(dim, &columns);
    let unit = diagonal_class(ctx);
    let x = solve(&right_mult, &unit.value.to_vector()).ok_or(Error::NotInvertible)?;
    let beta = Correspondence {
        value: CohClass::from_vector(&v, &x),
    };
    if compose(alpha, &beta)? != unit {
        return Err(Error::NotInvertible);
    }
    Ok(beta)
}

/// `deg(π)⁻¹ (π,π)^*α₀`, transporting a correspondence of `A₀` to `A` along an isogeny `π: A → A₀`.
pub fn isogeny_transfer(pi: &HomMorphism, alpha0: &Correspondence) -> Result<Correspondence> {
    let (src, tgt) = (pi.source(), pi.target());
    if src.factors() != 1 || tgt.factors() != 1 || src.g() != tgt.g() {
        return Err(Error::VarietyMismatch);
    }
    let degree = pi.degree();
    if degree.is_zero() {
        return Err(Error::NotIsogeny);
    }
    if pullback(pi, &tgt.theta_on(0))? != src.theta_on(0) {
        return Err(Error::PolarizationMismatch);
    }
    if alpha0.context() != tgt.context() {
        return Err(Error::VarietyMismatch);
    }
    let pair = pi.product(pi)?;
    let pulled = pullback(&pair, &alpha0.value)?;
    Correspondence::new(pulled.scale(&degree.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abvar::{fourier, poincare_class, theta};
    use crate::exactla::{rat, ratio};
    use crate::random::{random_class, seeded};

    fn ctx(t: &[u64]) -> Arc<PolarizedContext> {
        PolarizedContext::new(t.len(), t.to_vec()).unwrap()
    }

    fn poincare_exp(c: &Arc<PolarizedContext>) -> Correspondence {
        let pair = ProductVariety::new(c, 2).unwrap();
        Correspondence::new(poincare_class(&pair).unwrap().exp().unwrap()).unwrap()
    }

    #[test]
    fn diagonal_is_unit() {
        let mut rng = seeded(11);
        for t in [&[1u64][..], &[1, 2]] {
            let c = ctx(t);
            let pair = ProductVariety::new(&c, 2).unwrap();
            let diag = diagonal_class(&c);
            let alpha = Correspondence::new(random_class(&pair, &mut rng, 6)).unwrap();
            assert_eq!(compose(&diag, &alpha).unwrap(), alpha);
            assert_eq!(compose(&alpha, &diag).unwrap(), alpha);
            let z = random_class(&ProductVariety::single(&c), &mut rng, 5);
            assert_eq!(apply(&diag, &z).unwrap(), z);
        }
    }

    #[test]
    fn transposed_graphs_multiply() {
        let c = ctx(&[1, 1]);
        assert_eq!(
            compose(&transpose_graph(&c, 2), &transpose_graph(&c, 3)).unwrap(),
            transpose_graph(&c, 6)
        );
        assert_eq!(graph(&c, 1), diagonal_class(&c));
        assert_eq!(transpose_graph(&c, 1), diagonal_class(&c));
    }

    #[test]
    fn poincare_square_is_minus_inversion_for_elliptic_curve() {
        let c = ctx(&[1]);
        let e = poincare_exp(&c);
        assert_eq!(compose(&e, &e).unwrap(), -&transpose_graph(&c, -1));
    }

    #[test]
    fn apply_examples() {
        let mut rng = seeded(5);
        let c = ctx(&[1, 2]);
        let v = ProductVariety::single(&c);
        let z = random_class(&v, &mut rng, 6);
        let two = HomMorphism::multiplication(&c, 2);
        assert_eq!(
            apply(&transpose_graph(&c, 2), &z).unwrap(),
            pullback(&two, &z).unwrap()
        );
        let f = poincare_exp(&c).scale(&c.degree().recip());
        assert_eq!(apply(&f, &z).unwrap(), fourier(&z).unwrap());
    }

    #[test]
    fn diagonal_push_formulas() {
        let mut rng = seeded(3);
        let c = ctx(&[1, 1]);
        let v = ProductVariety::single(&c);
        let pair = ProductVariety::new(&c, 2).unwrap();
        let p = HomMorphism::first_projection(&c);
        let q = HomMorphism::second_projection(&c);
        let one = diagonal_push(&v.one()).unwrap();
        assert_eq!(one, diagonal_class(&c));
        for _ in 0..3 {
            let z = random_class(&v, &mut rng, 4);
            let alpha = Correspondence::new(random_class(&pair, &mut rng, 5)).unwrap();
            let dz = diagonal_push(&z).unwrap();
            let pz = pullback(&p, &z).unwrap();
            let qz = pullback(&q, &z).unwrap();
            // odd parts of z commute past α with a sign, so p^*z goes on the left here
            assert_eq!(compose(&alpha, &dz).unwrap().value, &pz * alpha.value());
            assert_eq!(compose(&dz, &alpha).unwrap().value, alpha.value() * &qz);
        }
        assert_eq!(diagonal_push(&pair.one()), Err(Error::VarietyMismatch));
    }

    #[test]
    fn graph_formulas_for_doubling() {
        let mut rng = seeded(8);
        let c = ctx(&[1]);
        let pair = ProductVariety::new(&c, 2).unwrap();
        for _ in 0..3 {
            let alpha = Correspondence::new(random_class(&pair, &mut rng, 5)).unwrap();
            let one_two = HomMorphism::scaling_pair(&c, 1, 2);
            let two_one = HomMorphism::scaling_pair(&c, 2, 1);
            assert_eq!(
                compose(&graph(&c, 2), &alpha).unwrap().value,
                pushforward(&one_two, alpha.value()).unwrap()
            );
            assert_eq!(
                compose(&alpha, &transpose_graph(&c, 2)).unwrap().value,
                pushforward(&two_one, alpha.value()).unwrap()
            );
        }
    }

    #[test]
    fn kunneth_examples() {
        let c = ctx(&[1]);
        let pis = kunneth_idempotents(&c);
        assert_eq!(pis.len(), 3);
        let sum = pis
            .iter()
            .fold(Correspondence::zero(&c).unwrap(), |acc, p| &acc + p);
        assert_eq!(sum, diagonal_class(&c));
        for (i, a) in pis.iter().enumerate() {
            for (j, b) in pis.iter().enumerate() {
                let prod = compose(a, b).unwrap();
                if i == j {
                    assert_eq!(&prod, a);
                } else {
                    assert!(prod.is_zero());
                }
            }
        }
        let one_two = HomMorphism::scaling_pair(&c, 1, 2);
        assert_eq!(
            pullback(&one_two, pis[1].value()).unwrap(),
            pis[1].value().scale(&rat(2))
        );
    }

    #[test]
    fn invert_examples() {
        let c = ctx(&[1]);
        let diag = diagonal_class(&c);
        assert_eq!(invert(&diag).unwrap(), diag);
        let v = ProductVariety::single(&c);
        let t = theta(&v).unwrap();
        let e = diagonal_push(&t.exp().unwrap()).unwrap();
        let e_inv = diagonal_push(&(-&t).exp().unwrap()).unwrap();
        assert_eq!(invert(&e).unwrap(), e_inv);
        let f = poincare_exp(&c);
        // F⁴ = 1 and F² = (−1)^g Γ'₋₁, so F⁻¹ = (−1)^g Γ'₋₁ ∘ F
        let expected = compose(&(-&transpose_graph(&c, -1)), &f).unwrap();
        assert_eq!(invert(&f).unwrap(), expected);
        let zero = Correspondence::zero(&c).unwrap();
        assert_eq!(invert(&zero), Err(Error::NotInvertible));
        assert!(matches!(
            invert(&diagonal_class(&ctx(&[1, 1, 1]))),
            Err(Error::DimensionGuard { .. })
        ));
    }

    #[test]
    fn isogeny_transfer_examples() {
        let a = ctx(&[1, 2]);
        let a0 = ctx(&[1, 1]);
        let pi = HomMorphism::isogeny(&a, &a0, &[vec![1, 0], vec![0, 2]]).unwrap();
        assert_eq!(
            isogeny_transfer(&pi, &diagonal_class(&a0)).unwrap(),
            diagonal_class(&a)
        );
        let t0 = theta(&ProductVariety::single(&a0)).unwrap();
        let t = theta(&ProductVariety::single(&a)).unwrap();
        let lhs = isogeny_transfer(&pi, &diagonal_push(&t0.exp().unwrap()).unwrap()).unwrap();
        // the transfer already divides by d = 2
        assert_eq!(lhs, diagonal_push(&t.exp().unwrap()).unwrap());
        let lhs = isogeny_transfer(&pi, &poincare_exp(&a0)).unwrap();
        assert_eq!(lhs.scale(&rat(2)), poincare_exp(&a));
        assert_eq!(lhs, poincare_exp(&a).scale(&ratio(1, 2)));
    }

    #[test]
    fn compose_guard() {
        let c = ctx(&[1, 1, 1, 1]);
        let d = diagonal_class(&c);
        assert!(matches!(compose(&d, &d), Err(Error::DimensionGuard { .. })));
    }
}
