use proptest::prelude::*;

use dormant::algebra_core::{lucas_binom, Field, Poly};
use dormant::graphs::{canonical_form, enumerate, is_isomorphic, validate, TrivalentSemiGraph, DEFAULT_CAP};
use dormant::oper_p1::vertex_table;
use dormant::radii::{lift_fiber, modulus, reduce_level, ExponentMultiset, GeneralRadius, Radius};
use dormant::tqft_count::Counter;

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![3u32, 5, 7, 11, 13])
}

fn binom_exact(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn relabel(gr: &TrivalentSemiGraph, perm: &[usize]) -> TrivalentSemiGraph {
    TrivalentSemiGraph {
        vertices: gr.vertices,
        edges: gr.edges.iter().rev().map(|e| [perm[e[1]], perm[e[0]]]).collect(),
        legs: gr.legs.iter().map(|l| [perm[l[0]], l[1]]).collect(),
    }
}

proptest! {
    #[test]
    fn field_inverse_and_frobenius(p in prime(), e in 1u32..3, x in any::<u32>(), y in any::<u32>()) {
        let f = Field::new(p, e).unwrap();
        let (a, b) = (x % f.size(), y % f.size());
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), f.one());
        }
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
        prop_assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
    }

    #[test]
    fn lucas_matches_exact_binomial(p in prime(), n in 0u64..60, k in 0u64..60) {
        prop_assert_eq!(lucas_binom(n, k, p as u64) as u128, binom_exact(n, k) % p as u128);
    }

    #[test]
    fn poly_division_identity(p in prime(), a in prop::collection::vec(any::<u32>(), 0..8), b in prop::collection::vec(any::<u32>(), 1..5)) {
        let f = Field::prime(p).unwrap();
        let a = Poly::new(a.iter().map(|x| x % p).collect());
        let mut bc: Vec<u32> = b.iter().map(|x| x % p).collect();
        *bc.last_mut().unwrap() = 1;
        let b = Poly::new(bc);
        let (q, r) = a.div_rem(&f, &b);
        prop_assert_eq!(q.mul(&f, &b).add(&f, &r), a);
        prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
    }

    #[test]
    fn radius_sign_and_lifts(p in prime(), level in 1u32..3, v in any::<i32>()) {
        let v = v as i64;
        prop_assume!(v.rem_euclid(p as i64) != 0);
        let r = Radius::from_value(p, level, v).unwrap();
        prop_assert_eq!(r, Radius::from_value(p, level, -v).unwrap());
        prop_assert_eq!(Radius::from_rep(p, level, r.rep).unwrap(), r);
        for up in lift_fiber(&r) {
            prop_assert_eq!(reduce_level(&up, level), r);
        }
    }

    #[test]
    fn general_radius_is_shift_and_order_invariant(p in prime(), level in 1u32..3, xs in prop::collection::vec(any::<i32>(), 1..5), k in any::<i32>()) {
        let xs: Vec<i64> = xs.into_iter().map(i64::from).collect();
        let base = GeneralRadius::new(p, level, &xs);
        let shifted: Vec<i64> = xs.iter().rev().map(|x| x + k as i64).collect();
        prop_assert_eq!(GeneralRadius::new(p, level, &shifted), base.clone());
        prop_assert!(base.entries.iter().all(|&x| x < modulus(p, level)));
        let em = ExponentMultiset::new(p, level, &shifted);
        prop_assert_eq!(GeneralRadius::new(p, level, &em.entries.iter().map(|&x| x as i64).collect::<Vec<_>>()), base);
    }

    #[test]
    fn canonical_form_ignores_labels(idx in 0usize..105, perm in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle()) {
        // Every graph of type (0, 6) has four vertices.
        let graphs = enumerate(0, 6, DEFAULT_CAP).unwrap();
        let gr = &graphs[idx % graphs.len()];
        prop_assert_eq!(gr.vertices, perm.len());
        let h = relabel(gr, &perm);
        prop_assert!(validate(&h).is_ok());
        prop_assert!(is_isomorphic(gr, &h));
        prop_assert_eq!(canonical_form(&h), canonical_form(gr));
    }

    #[test]
    fn counts_are_symmetric_in_the_radii(p in prop::sample::select(vec![5u32, 7]), picks in prop::collection::vec(any::<usize>(), 4), rot in 0usize..4) {
        let c = Counter::new(vertex_table(p, 1).unwrap());
        let labels = c.all_radii(1);
        let rho: Vec<u64> = picks.iter().map(|&i| labels[i % labels.len()][0]).collect();
        let mut other = rho.clone();
        other.rotate_left(rot);
        other.swap(0, 1);
        prop_assert_eq!(c.count_value(0, 4, &rho).unwrap(), c.count_value(0, 4, &other).unwrap());
    }
}
