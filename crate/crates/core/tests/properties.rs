use proptest::prelude::*;

use spanledger::accounts::{AccountError, AccountObject};
use spanledger::laws::{self, Gen};
use spanledger::ledger::{AccountKind, Ledger, LedgerAccount, LedgerError, Posting, Transaction};
use spanledger::rgraph::Polarity;
use spanledger::stdaccount::{continuity_holds, net_flow, AccountEdge};
use spanledger::BigInt;

fn m(v: i64) -> BigInt {
    BigInt::from(v)
}

fn polarity() -> impl Strategy<Value = Polarity> {
    prop_oneof![Just(Polarity::Plus), Just(Polarity::Minus)]
}

fn signed_sum(ps: &[Polarity], xs: &[i64]) -> i64 {
    ps.iter()
        .zip(xs)
        .map(|(p, x)| if *p == Polarity::Plus { *x } else { -x })
        .sum()
}

proptest! {
    #[test]
    fn net_flow_matches_hand_sum(
        xi in prop::collection::vec((polarity(), 0..100i64), 0..4),
        zeta in prop::collection::vec((polarity(), 0..100i64), 0..4),
    ) {
        let (px, xs): (Vec<_>, Vec<_>) = xi.into_iter().unzip();
        let (pz, ys): (Vec<_>, Vec<_>) = zeta.into_iter().unzip();
        let expected = signed_sum(&px, &xs) - signed_sum(&pz, &ys);
        let got = net_flow(&px, &pz, &xs.iter().map(|&v| m(v)).collect::<Vec<_>>(), &ys.iter().map(|&v| m(v)).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(got, m(expected));
    }

    #[test]
    fn continuity_is_invariant_under_permuting_factors(
        factors in prop::collection::vec((polarity(), 0..50i64), 1..5),
        from in -100..100i64,
        rotate in 0..5usize,
    ) {
        let (ps, xs): (Vec<_>, Vec<_>) = factors.iter().cloned().unzip();
        let to = from + signed_sum(&ps, &xs);
        let e = AccountEdge { from: m(from), to: m(to), left_flows: xs.iter().map(|&v| m(v)).collect(), right_flows: vec![] };
        prop_assert!(continuity_holds(&ps, &[], &e).unwrap());
        let mut rotated = factors.clone();
        rotated.rotate_left(rotate % factors.len());
        let (rps, rxs): (Vec<_>, Vec<_>) = rotated.into_iter().unzip();
        let re = AccountEdge { left_flows: rxs.iter().map(|&v| m(v)).collect(), ..e };
        prop_assert!(continuity_holds(&rps, &[], &re).unwrap());
    }

    #[test]
    fn flipping_a_carrying_polarity_breaks_continuity(
        factors in prop::collection::vec((polarity(), 0..50i64), 1..4),
        which in 0..4usize,
        from in -100..100i64,
    ) {
        let (mut ps, xs): (Vec<_>, Vec<_>) = factors.into_iter().unzip();
        let i = which % ps.len();
        prop_assume!(xs[i] != 0);
        let to = from + signed_sum(&ps, &xs);
        let e = AccountEdge { from: m(from), to: m(to), left_flows: xs.iter().map(|&v| m(v)).collect(), right_flows: vec![] };
        ps[i] = ps[i].flip();
        prop_assert!(!continuity_holds(&ps, &[], &e).unwrap());
    }

    #[test]
    fn moving_a_flow_across_the_boundary_with_dual_polarity_keeps_continuity(
        x in 0..100i64, p in polarity(), from in -100..100i64,
    ) {
        let to = from + signed_sum(&[p], &[x]);
        let left = AccountEdge { from: m(from), to: m(to), left_flows: vec![m(x)], right_flows: vec![] };
        let right = AccountEdge { from: m(from), to: m(to), left_flows: vec![], right_flows: vec![m(x)] };
        prop_assert!(continuity_holds(&[p], &[], &left).unwrap());
        prop_assert!(continuity_holds(&[], &[p.flip()], &right).unwrap());
    }
}

const NAMES: [&str; 5] = ["asset", "liability", "equity", "income", "expense"];
const KINDS: [AccountKind; 5] = [
    AccountKind::Asset,
    AccountKind::Liability,
    AccountKind::Equity,
    AccountKind::Income,
    AccountKind::Expense,
];

fn admits(kind: AccountKind, v: i64) -> bool {
    match kind {
        AccountKind::Asset | AccountKind::Expense => v >= 0,
        AccountKind::Liability | AccountKind::Income => v <= 0,
        AccountKind::Equity => true,
    }
}

fn ledger_from(initial: [i64; 4]) -> (Ledger, Vec<i64>) {
    let [a, l, i, x] = initial;
    let values = vec![a, -l, -(a - l - i + x), -i, x];
    let accounts = NAMES
        .iter()
        .zip(KINDS)
        .zip(&values)
        .map(|((n, k), v)| LedgerAccount {
            name: n.to_string(),
            kind: k,
            value: m(*v),
        })
        .collect();
    (Ledger::new(accounts).unwrap(), values)
}

fn postings() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0..5usize, 0..60i64), 1..3)
}

proptest! {
    #[test]
    fn post_accepts_exactly_balanced_sign_respecting_transactions(
        initial in [0..50i64, 0..50i64, 0..50i64, 0..50i64],
        debits in postings(),
        credits in postings(),
    ) {
        let (ledger, mut expected) = ledger_from(initial);
        let t = Transaction {
            step: 1,
            debits: debits.iter().map(|&(i, v)| Posting::new(NAMES[i], v)).collect(),
            credits: credits.iter().map(|&(i, v)| Posting::new(NAMES[i], v)).collect(),
        };
        for &(i, v) in &debits { expected[i] += v; }
        for &(i, v) in &credits { expected[i] -= v; }
        let balanced = debits.iter().map(|d| d.1).sum::<i64>() == credits.iter().map(|c| c.1).sum::<i64>();
        let signs_ok = expected.iter().zip(KINDS).all(|(v, k)| admits(k, *v));
        match ledger.post(&t) {
            Ok(next) => {
                prop_assert!(balanced && signs_ok);
                prop_assert_eq!(next.values(), expected.iter().map(|&v| m(v)).collect::<Vec<_>>());
                prop_assert_eq!(next.grand_total(), m(0));
            }
            Err(LedgerError::UnbalancedTransaction { .. }) => prop_assert!(!balanced),
            Err(LedgerError::SignConstraintViolation { .. }) => prop_assert!(balanced && !signs_ok),
            Err(e) => prop_assert!(false, "unexpected {}", e),
        }
    }

    #[test]
    fn replay_conserves_zero_total(
        initial in [0..50i64, 0..50i64, 0..50i64, 0..50i64],
        steps in prop::collection::vec((0..5usize, 0..5usize, 0..40i64), 0..8),
    ) {
        let (mut ledger, _) = ledger_from(initial);
        for (k, &(d, c, v)) in steps.iter().enumerate() {
            if let Ok(next) = ledger.post(&Transaction::simple(k as u64 + 1, NAMES[d], NAMES[c], v)) {
                ledger = next;
            }
            prop_assert_eq!(ledger.grand_total(), m(0));
            prop_assert!(ledger.accounting_equation().holds);
        }
        let closed = ledger.zeroize_expenses().and_then(|l| l.zeroize_income()).unwrap();
        prop_assert_eq!(closed.grand_total(), m(0));
        prop_assert_eq!(closed.value("expense").unwrap(), &m(0));
        prop_assert_eq!(closed.value("income").unwrap(), &m(0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_systems_conserve_value(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let (name, e) = laws::closed_system(&mut gen);
        prop_assert!(laws::conservation(&e, 4).is_ok(), "{}", name);
    }

    #[test]
    fn generated_accounts_survive_composition(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let u = gen.graph(2, 2);
        let sig = gen.signature(2);
        let o = gen.object(&u, sig, 2);
        let i = AccountObject::unit();
        let a = gen.account(&i, &o, 4);
        let b = gen.account(&o, &o, 4);
        let ab = a.compose(&b).unwrap();
        prop_assert!(ab.check_measurement().is_ok());
        let t = a.tensor(&b).unwrap();
        prop_assert!(t.check_measurement().is_ok());
    }

    #[test]
    fn composing_across_mismatched_boundaries_fails(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let u = gen.graph(2, 2);
        let sig = gen.signature(2);
        let o = gen.object(&u, sig, 2);
        let a = gen.account(&AccountObject::unit(), &o, 4);
        let b = gen.account(&AccountObject::unit(), &o, 4);
        let mismatch = matches!(a.compose(&b), Err(AccountError::BoundaryMismatch { .. }));
        prop_assert!(mismatch);
    }

    #[test]
    fn snake_and_transpose_hold_for_any_seed(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        let g = gen.graph(3, 4);
        prop_assert_eq!(laws::snake_spans(&g), Ok(()));
        prop_assert_eq!(laws::transpose_round_trip(&mut gen), Ok(()));
        prop_assert_eq!(laws::interchange(&mut gen), Ok(()));
    }
}
