//! Seeded generators for random test classes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abvar::{CohClass, ProductVariety};
use crate::error::Result;
use crate::exactla::{rat, ratio, Rational};
use crate::extalg::Monomial;
use crate::sl2rep::{
    build_free_module, FreeBeauvilleModule, FreeGenerator, GroupElement, Sl2Triple,
};

pub type TestRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small nonzero rational, usually an integer in `[-3, 3]`.
pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-3i64..=3);
    }
    let d = if rng.gen_bool(0.25) {
        rng.gen_range(2i64..=3)
    } else {
        1
    };
    ratio(n, d)
}

/// Sum of up to `terms` random monomials with small rational coefficients.
pub fn random_class<R: Rng>(v: &ProductVariety, rng: &mut R, terms: usize) -> CohClass {
    let n = v.generator_count();
    let mut acc = v.zero();
    for _ in 0..terms {
        let mask = if n >= 64 {
            rng.gen::<u64>()
        } else {
            rng.gen_range(0..(1u64 << n))
        };
        acc = &acc + &v.monomial(Monomial(mask), small_rational(rng));
    }
    acc
}

/// Random class concentrated in cohomological degree `degree`.
pub fn random_homogeneous<R: Rng>(
    v: &ProductVariety,
    degree: u32,
    rng: &mut R,
    terms: usize,
) -> CohClass {
    let n = v.generator_count();
    let mut acc = v.zero();
    if degree as usize > n {
        return acc;
    }
    for _ in 0..terms {
        let mut idx: Vec<usize> = (0..n).collect();
        let mut mask = 0u64;
        for k in 0..degree as usize {
            let j = rng.gen_range(k..n);
            idx.swap(k, j);
            mask |= 1u64 << idx[k];
        }
        acc = &acc + &v.monomial(Monomial(mask), small_rational(rng));
    }
    acc
}

/// Product of a random torus element and three random unipotents, so every
/// Bruhat cell and both signs of `c` occur.
pub fn random_group_element<R: Rng>(rng: &mut R) -> GroupElement {
    let t = small_rational(rng);
    let mut m = GroupElement::torus(t).expect("nonzero torus parameter");
    for k in 0..3 {
        if rng.gen_bool(0.2) {
            continue;
        }
        let e = if k % 2 == 0 {
            GroupElement::upper(small_rational(rng))
        } else {
            GroupElement::lower(small_rational(rng))
        };
        m = m.mul(&e);
    }
    m
}

/// One to four generators with `λ ≤ max_lambda` and bidegrees `p ≥ 0`, `s ≥ 0`
/// consistent with `λ = g + s − 2p`.
pub fn random_free_module<R: Rng>(
    g: u32,
    max_lambda: u32,
    rng: &mut R,
) -> Result<(FreeBeauvilleModule, Sl2Triple)> {
    let count = rng.gen_range(1..=4);
    let mut gens = Vec::with_capacity(count);
    for j in 0..count {
        let lambda = rng.gen_range(0..=max_lambda) as i64;
        let s_min = (lambda - g as i64).max(0);
        let s = rng.gen_range(s_min..=s_min + 2);
        let p = ratio(g as i64 + s - lambda, 2);
        debug_assert!(p >= rat(0));
        gens.push(FreeGenerator::from_bidegree(
            format!("z{}", j + 1),
            g,
            p,
            s,
        )?);
    }
    build_free_module(g, gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_free_modules_have_consistent_bidegrees() {
        let mut rng = seeded(5);
        for g in 1..=4 {
            let (m, t) = random_free_module(g, 10, &mut rng).unwrap();
            assert_eq!(t.dim(), m.dim());
            for z in &m.generators {
                let (p, s) = z.bidegree.clone().unwrap();
                assert!(p >= rat(0) && s >= 0 && z.lambda <= 10);
            }
        }
    }

    #[test]
    fn random_group_elements_have_determinant_one() {
        let mut rng = seeded(6);
        for _ in 0..20 {
            let m = random_group_element(&mut rng);
            let [a, b, c, d] = m.entries();
            assert_eq!(a * d - b * c, rat(1));
        }
    }
}
