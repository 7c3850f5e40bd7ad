use std::sync::Arc;

use lacunary::bounds::{bound_all, BoundError, minimal_residue_interval, normalize, LacunaryShape};
use lacunary::iteration::{best_bound, closed_form, recurrence, scaled_term};
use lacunary::numtheory::divisors;
use lacunary::{FieldCtx, RootStrategy, SparsePoly};
use num_bigint::BigInt;
use proptest::prelude::*;

const FIELDS: &[&str] = &["2", "3", "5", "7", "13", "31", "47", "101", "3^2", "2^4", "5^2", "3^3", "7^2"];

fn arb_field() -> impl Strategy<Value = Arc<FieldCtx>> {
    prop::sample::select(FIELDS).prop_map(|s| Arc::new(s.parse::<FieldCtx>().unwrap()))
}

fn arb_poly_in(ctx: Arc<FieldCtx>, max_exp: u64) -> impl Strategy<Value = SparsePoly> {
    let q = ctx.q();
    prop::collection::vec((0..=max_exp, 0..q), 1..8).prop_map(move |raw| {
        let terms = raw.into_iter().map(|(e, c)| (e, ctx.element(c).unwrap()));
        SparsePoly::from_terms(ctx.clone(), terms)
    })
}

fn arb_poly() -> impl Strategy<Value = SparsePoly> {
    arb_field().prop_flat_map(|ctx| {
        let max = 2 * ctx.q();
        arb_poly_in(ctx, max)
    })
}

/// A valid `(q - 1, d, l, g°)` with `d >= 2`.
fn arb_shape(max_order: u64) -> impl Strategy<Value = LacunaryShape> {
    (4..=max_order)
        .prop_filter("needs a divisor d >= 2 with M >= 2", |&o| o % 2 == 0 || divisors(o).len() > 2)
        .prop_flat_map(|order| {
            let ds: Vec<u64> = divisors(order).into_iter().filter(|&d| d >= 2 && order / d >= 2).collect();
            (Just(order), prop::sample::select(ds))
        })
        .prop_flat_map(|(order, d)| {
            let m = order / d;
            (Just(order), Just(d), 0..=m - 2)
        })
        .prop_flat_map(|(order, d, l)| {
            let m = order / d;
            (Just(order), Just(d), Just(l), 1..m - l)
        })
        .prop_map(|(order, d, l, g)| LacunaryShape::new(order, d, l, g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_render_round_trip(f in arb_poly()) {
        let ctx = f.ctx().clone();
        prop_assert_eq!(&SparsePoly::parse(&f.to_string(), ctx.clone()).unwrap(), &f);
        prop_assert_eq!(&SparsePoly::parse(&f.render_signed(), ctx).unwrap(), &f);
    }

    #[test]
    fn root_strategies_agree(f in arb_poly(), pick in any::<prop::sample::Index>()) {
        prop_assume!(!f.is_zero());
        let ds = divisors(f.ctx().order());
        let d = ds[pick.index(ds.len())];
        let naive = f.roots_with(RootStrategy::Naive).unwrap();
        prop_assert_eq!(&naive, &f.roots_with(RootStrategy::LogWalk).unwrap());
        prop_assert_eq!(&naive, &f.roots_with(RootStrategy::Cosets(d)).unwrap());
        let ctx = f.ctx();
        let direct: Vec<_> = ctx.nonzero().filter(|&a| f.eval(a).is_zero()).collect();
        let mut sorted = direct.clone();
        sorted.sort_unstable();
        prop_assert_eq!(naive.roots, sorted);
    }

    #[test]
    fn pow_matches_repeated_multiplication(f in arb_field().prop_flat_map(|c| arb_poly_in(c, 12)), n in 0u64..5) {
        let mut acc = SparsePoly::constant(f.ctx().clone(), f.ctx().one());
        for _ in 0..n {
            acc = acc.mul(&f).unwrap();
        }
        prop_assert_eq!(f.pow(n).unwrap(), acc);
    }

    #[test]
    fn reversal_inverts_roots(f in arb_poly()) {
        let (_, g) = f.strip_x_power();
        prop_assume!(!g.is_zero());
        let ctx = g.ctx().clone();
        let r = g.reversal().unwrap();
        let mut inverted: Vec<_> = g
            .count_roots_bruteforce()
            .unwrap()
            .roots
            .into_iter()
            .map(|a| ctx.inv(a).unwrap())
            .collect();
        inverted.sort_unstable();
        prop_assert_eq!(r.count_roots_bruteforce().unwrap().roots, inverted);
    }

    #[test]
    fn every_applicable_bound_is_sound(f in arb_poly()) {
        prop_assume!(normalize(&f).is_ok());
        let roots = normalize(&f).unwrap().count_roots_bruteforce().unwrap().count as u64;
        for o in bound_all(&f, None).unwrap() {
            if let Some(v) = o.value {
                prop_assert!(v >= roots, "{:?} below {} for {}", o, roots, f);
            }
        }
    }

    #[test]
    fn residue_interval_is_optimal(
        order in 2u64..500,
        exps in prop::collection::btree_set(0u64..499, 1..=12),
        pick in any::<prop::sample::Index>(),
    ) {
        let exps: Vec<u64> = exps.into_iter().filter(|&e| e < order).collect();
        prop_assume!(!exps.is_empty());
        let ds = divisors(order);
        let d = ds[pick.index(ds.len())];
        let m = order / d;
        let iv = minimal_residue_interval(&exps, d, order);
        let rs: Vec<i64> = exps.iter().map(|&e| (e % m) as i64).collect();
        let mut best = i64::MAX;
        for mask in 0u32..(1 << rs.len()) {
            let reps = rs.iter().enumerate().map(|(j, &r)| if mask >> j & 1 == 1 { r - m as i64 } else { r });
            let (lo, hi) = reps.fold((i64::MAX, i64::MIN), |(lo, hi), b| (lo.min(b), hi.max(b)));
            best = best.min(hi - lo);
        }
        prop_assert_eq!(iv.width() as i64, best);
        for t in &iv.terms {
            prop_assert!(iv.lo <= t.b && t.b <= iv.hi);
            prop_assert_eq!(t.a as i128 * m as i128 + t.b as i128, t.exponent as i128);
        }
    }

    #[test]
    fn closed_form_matches_recurrence(shape in arb_shape(2000), n in 0u32..=12) {
        let rec = recurrence(&shape, n);
        for (i, (l, g)) in rec.iter().enumerate() {
            let cf = closed_form(&shape, i as u32).unwrap();
            prop_assert_eq!(&cf.sum, &(l + g));
            let scaled = BigInt::from(shape.d) * (l + g);
            match scaled_term(&shape, i as u32) {
                Ok(v) => prop_assert_eq!(BigInt::from(v), scaled),
                Err(BoundError::Overflow(s)) => prop_assert_eq!(s, scaled.to_string()),
                Err(e) => prop_assert!(false, "{}", e),
            }
        }
    }

    #[test]
    fn exactly_one_regime(shape in arb_shape(3000)) {
        let (q, d, l, g) = (shape.order as i128, shape.d as i128, shape.ell as i128, shape.g_degree as i128);
        let w = d * (d + 1);
        let first = l * w > q;
        let second = (l + g) * w < q;
        let third = !first && !second && l * w + d * d * g < q;
        let fourth = !first && !second && l * w + d * d * g >= q;
        let fired: Vec<u8> = [first, second, third, fourth]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u8 + 1)
            .collect();
        prop_assert_eq!(fired.len(), 1);
        let b = best_bound(&shape).unwrap();
        prop_assert_eq!(b.case, fired[0]);
        prop_assert!(b.value <= shape.degree());
    }
}
