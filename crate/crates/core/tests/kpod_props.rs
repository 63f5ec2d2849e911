mod common;

use std::f64::consts::PI;

use conespec::kpod::{balanced_kpod_exists, harmonic_kpod_degrees, p_harmonic_degree, p_harmonic_kpod_bound};
use conespec::ConeGraph64;
use proptest::prelude::*;
use rand::Rng;

use common::rng;

/// A cycle made of `visits` arcs of angle `arc`, each split into 1 to 3 random edges.
fn subdivided_cycle(r: &mut rand_chacha::ChaCha8Rng, visits: usize, arc: f64) -> ConeGraph64 {
    let mut thetas = Vec::new();
    for _ in 0..visits {
        let parts = r.gen_range(1..=3);
        let raw: Vec<f64> = (0..parts).map(|_| r.gen_range(0.2..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        thetas.extend(raw.iter().map(|x| x / sum * arc));
    }
    let n = thetas.len();
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, thetas[i])).collect();
    ConeGraph64::from_edge_list(n, &edges).expect("valid cycle")
}

proptest! {
    #![proptest_config(common::config(128))]

    #[test]
    fn degree_decreases_with_angle(p in 1.05f64..20.0, a in 0.05f64..6.2, b in 0.05f64..6.2) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(p_harmonic_degree(lo, p).unwrap() > p_harmonic_degree(hi, p).unwrap());
    }

    #[test]
    fn harmonic_case_is_dirichlet_degree(theta in 0.05f64..6.25) {
        let alpha = p_harmonic_degree(theta, 2.0).unwrap();
        prop_assert!((alpha - PI / theta).abs() <= 1e-10 * alpha.max(1.0));
    }

    #[test]
    fn certificates_from_subdivided_arcs(seed in any::<u64>(), visits in 2usize..=6, arc in 0.4f64..3.0) {
        let mut r = rng(seed);
        let g = subdivided_cycle(&mut r, visits, arc);
        let degrees = harmonic_kpod_degrees(&g, visits).unwrap();
        let d = degrees.iter().find(|d| d.visits == visits).unwrap();
        prop_assert!((d.alpha - PI / arc).abs() <= 1e-9 * d.alpha);
        let cert = balanced_kpod_exists(&g, d.alpha).unwrap().expect("certificate");
        prop_assert_eq!(cert.arc_angles.len(), visits);
        prop_assert_eq!(cert.boundaries.len(), visits);
        for a in &cert.arc_angles {
            prop_assert!((a - PI / d.alpha).abs() <= 1e-9);
        }
    }

    #[test]
    fn constant_cycles_need_divisible_visits(n in 3usize..=12, visits in 2usize..=12) {
        let g = ConeGraph64::cycle(n, 2.0 * PI / n as f64).unwrap();
        let degrees = harmonic_kpod_degrees(&g, 12).unwrap();
        let d = degrees.iter().find(|d| d.visits == visits).unwrap();
        let cert = balanced_kpod_exists(&g, d.alpha).unwrap();
        prop_assert_eq!(cert.is_some(), n % visits == 0);
        if let Some(c) = cert {
            let sum: f64 = c.arc_angles.iter().sum();
            prop_assert!((sum - 2.0 * PI).abs() <= 1e-9);
        }
    }

    #[test]
    fn bound_approaches_limit(p in 2.0f64..1e4) {
        let b = p_harmonic_kpod_bound(p).unwrap();
        prop_assert!(b.value >= b.limit - 1e-12);
    }
}
