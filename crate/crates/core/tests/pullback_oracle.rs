mod common;

use proptest::prelude::*;
use spanledger::laws::Gen;

#[test]
fn composite_matches_pair_enumeration() {
    let mut gen = Gen::new(2024);
    for k in 0..200 {
        let (x, y, z) = (gen.graph(3, 3), gen.graph(3, 4), gen.graph(3, 3));
        let r = gen.span(&x, &y, 4, 6);
        let s = gen.span(&y, &z, 4, 6);
        common::agrees(&r, &s).unwrap_or_else(|e| panic!("pair {k}: {e}"));
    }
}

#[test]
fn identity_composite_has_matching_size() {
    let mut gen = Gen::new(5);
    for _ in 0..20 {
        let (x, y) = (gen.graph(3, 4), gen.graph(3, 4));
        let r = gen.span(&x, &y, 4, 5);
        let id = spanledger::span::Span::identity(&y);
        let c = r.compose(&id).unwrap();
        assert_eq!(c.head().vertex_count(), r.head().vertex_count());
        assert_eq!(c.head().edge_count(), r.head().edge_count());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composite_matches_oracle_for_any_seed(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let (x, y, z) = (gen.graph(3, 3), gen.graph(2, 3), gen.graph(3, 3));
        let r = gen.span(&x, &y, 4, 6);
        let s = gen.span(&y, &z, 4, 6);
        prop_assert_eq!(common::agrees(&r, &s), Ok(()));
    }

    #[test]
    fn tensor_head_is_product(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let (x, y) = (gen.graph(3, 3), gen.graph(3, 3));
        let r = gen.span(&x, &y, 3, 4);
        let s = gen.span(&y, &x, 3, 4);
        let t = r.tensor(&s);
        prop_assert_eq!(t.head().vertex_count(), r.head().vertex_count() * s.head().vertex_count());
        prop_assert_eq!(t.head().edge_count(), r.head().edge_count() * s.head().edge_count());
    }
}
