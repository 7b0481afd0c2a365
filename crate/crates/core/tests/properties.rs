use knormal::certificates::{verify_certificate, weighted_decompose, DEFAULT_NODE_BUDGET};
use knormal::ehrhart::{self, h_star};
use knormal::families::{random_hnf_simplex, rabinowitz_t, standard_simplex};
use knormal::report::{analyze, BoundId};
use knormal::semigroup::{is_k_normal, normality_profile, Caps};
use knormal::LatticePolytope;
use proptest::prelude::*;

fn small_simplex() -> impl Strategy<Value = LatticePolytope> {
    (2usize..=3, 1u64..=12, any::<u64>()).prop_map(|(d, det, seed)| random_hnf_simplex(d, det, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn normal_implies_very_ample(p in small_simplex()) {
        let prof = normality_profile(&p, Caps::for_dim(p.dim())).unwrap();
        if prof.is_normal() {
            prop_assert!(prof.very_ample);
        }
    }

    #[test]
    fn simplex_invariant_window(p in small_simplex()) {
        let prof = normality_profile(&p, Caps::for_dim(p.dim())).unwrap();
        let d = p.dim() as u64;
        let (dp, nu) = (prof.d_p.unwrap(), prof.nu_p.unwrap());
        prop_assert!(1 <= dp && dp <= nu && nu <= d);
    }

    // once j >= d_P is k-normal, every later k is too
    #[test]
    fn normality_stabilizes(p in small_simplex()) {
        let prof = normality_profile(&p, Caps::for_dim(p.dim())).unwrap();
        let dp = prof.d_p.unwrap();
        let first = prof.per_k_normal.iter().find(|(&k, &n)| k >= dp && n).map(|(&k, _)| k);
        if let Some(j) = first {
            for k in j..j + 3 {
                prop_assert!(is_k_normal(&p, k));
            }
        }
    }

    #[test]
    fn pyramid_pads_h_star(p in small_simplex()) {
        let mut h = h_star(&p).unwrap().coefficients().to_vec();
        h.push(0);
        let hp = h_star(&p.pyramid(1).unwrap()).unwrap();
        prop_assert_eq!(hp.coefficients(), h.as_slice());
    }

    #[test]
    fn report_identities(p in small_simplex()) {
        let r = analyze(&p, Caps::for_dim(p.dim())).unwrap();
        let k_p = r.k_p.unwrap();
        prop_assert_eq!(r.reg, Some(k_p.max(r.degree as u64) + 1));
        prop_assert_eq!(r.codim_x + r.d as u64 + 1, r.n_points);
        prop_assert_eq!(r.deg_x, r.vol);
        prop_assert_eq!(r.eg_gap.unwrap(), r.reg.unwrap() as i64 - (r.vol as i64 - r.codim_x as i64 + 1));
        if r.very_ample {
            prop_assert!(r.eg_gap.unwrap() < r.d as i64 / 2);
        }
        for b in &r.bounds {
            prop_assert_eq!(b.holds.is_some(), b.applicable);
        }
        prop_assert!(r.bound(BoundId::Hkn).holds.unwrap());
    }

    #[test]
    fn certificates_verify(p in small_simplex(), k in 1u64..=3, pick in any::<prop::sample::Index>(), split in any::<u64>()) {
        let (va, _) = knormal::semigroup::is_very_ample(&p).unwrap();
        prop_assume!(va);
        let pts = p.lattice_points(k);
        let x = pts.points()[pick.index(pts.len())].clone();
        let n = p.vertices().len();
        let mut a = vec![0u64; n];
        let mut s = split;
        for _ in 0..k - 1 {
            a[(s % n as u64) as usize] += 1;
            s /= n as u64;
        }
        let c = weighted_decompose(&p, &x, &a, k, DEFAULT_NODE_BUDGET).unwrap();
        prop_assert!(verify_certificate(&c));
        prop_assert_eq!(c.parts.len() as u64, 2 * k - 1);
    }
}

#[test]
fn hollow_rabinowitz_pyramids() {
    for (p, q, vol) in [(1, 1, 1), (2, 1, 2), (4, 1, 4), (2, 2, 4)] {
        let base = rabinowitz_t(p, q).unwrap();
        for l in 0..=2 {
            let t = base.pyramid(l).unwrap();
            assert!(t.is_hollow());
            assert_eq!(ehrhart::normalized_volume(&t).unwrap(), vol);
            let prof = normality_profile(&t, Caps::for_dim(t.dim())).unwrap();
            assert!(prof.very_ample && prof.is_normal(), "{}", t.label());
        }
    }
}

#[test]
fn unimodular_simplices_are_trivial() {
    for d in 1..=5 {
        let r = analyze(&standard_simplex(d).unwrap(), Caps::for_dim(d)).unwrap();
        assert_eq!(r.h_star.coefficients()[0], 1);
        assert_eq!(r.h_star.volume(), 1);
        assert_eq!((r.k_p, r.degree, r.reg), (Some(1), 0, Some(2)));
    }
}
