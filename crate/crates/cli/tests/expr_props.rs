use proptest::prelude::*;
use sl2chow::abvar::{PolarizedContext, ProductVariety};
use sl2chow::random::{random_class, seeded};
use sl2chow_cli::expr::{parse, parse_pair, render};

proptest! {
    #[test]
    fn parse_inverts_render(seed in any::<u64>(), which in 0usize..4) {
        let types: [&[u64]; 4] = [&[1], &[2], &[1, 2], &[1, 1, 3]];
        let c = PolarizedContext::new(types[which].len(), types[which].to_vec()).unwrap();
        let v = ProductVariety::single(&c);
        let mut rng = seeded(seed);
        let z = random_class(&v, &mut rng, 6);
        prop_assert_eq!(parse(&render(&z), &c).unwrap(), z.clone());
        let e = z.exp().unwrap_or(z);
        prop_assert_eq!(parse(&render(&e), &c).unwrap(), e);
    }

    #[test]
    fn parse_inverts_render_on_pairs(seed in any::<u64>()) {
        let c = PolarizedContext::new(2, vec![1, 2]).unwrap();
        let v = ProductVariety::new(&c, 2).unwrap();
        let mut rng = seeded(seed);
        let z = random_class(&v, &mut rng, 6);
        prop_assert_eq!(parse_pair(&render(&z), &c).unwrap(), z);
    }

    #[test]
    fn sums_and_scalars(a in -20i64..20, b in 1i64..20) {
        let c = PolarizedContext::principal(2);
        let lhs = parse(&format!("{a}/{b}*theta + {b}*x1*y2"), &c).unwrap();
        let rhs = parse(&format!("{b}*x1*y2 + theta*{a}/{b}"), &c).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
