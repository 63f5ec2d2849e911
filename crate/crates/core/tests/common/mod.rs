//! Random graph generators shared by the integration tests.

#![allow(dead_code)]

use conespec::ConeGraph64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const THETA_LO: f64 = 0.3;
pub const THETA_HI: f64 = 3.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Simple connected edge list: a random spanning tree plus up to `extra` further edges.
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let (a, b) = (u.min(v), u.max(v));
        if a != b && !edges.iter().any(|&(x, y)| (x.min(y), x.max(y)) == (a, b)) {
            edges.push((a, b));
        }
    }
    edges
}

/// Connected graph on `2..=n_max` vertices with angles uniform in `(lo, hi)`.
pub fn random_graph(rng: &mut ChaCha8Rng, n_max: usize, lo: f64, hi: f64) -> ConeGraph64 {
    let n = rng.gen_range(2..=n_max);
    let extra = rng.gen_range(0..=n);
    let edges: Vec<_> = random_edges(rng, n, extra)
        .into_iter()
        .map(|(u, v)| (u, v, rng.gen_range(lo..hi)))
        .collect();
    ConeGraph64::from_edge_list(n, &edges).expect("valid random graph")
}

/// Connected graph with a random `φ` in `(phi_lo, phi_hi)` on every edge.
pub fn random_graph_with_phi(
    rng: &mut ChaCha8Rng,
    n_max: usize,
    (lo, hi): (f64, f64),
    (phi_lo, phi_hi): (f64, f64),
) -> ConeGraph64 {
    let n = rng.gen_range(2..=n_max);
    let extra = rng.gen_range(0..=n);
    let edges: Vec<_> = random_edges(rng, n, extra)
        .into_iter()
        .map(|(u, v)| (u, v, rng.gen_range(lo..hi), rng.gen_range(phi_lo..phi_hi)))
        .collect();
    ConeGraph64::from_edge_list_with_phi(n, &edges).expect("valid random graph")
}

/// Connected graph on `2..=n_max` vertices with every angle equal to `theta`.
pub fn random_constant_graph(rng: &mut ChaCha8Rng, n_max: usize, theta: f64) -> ConeGraph64 {
    let n = rng.gen_range(2..=n_max);
    let extra = rng.gen_range(0..=n);
    let edges: Vec<_> = random_edges(rng, n, extra)
        .into_iter()
        .map(|(u, v)| (u, v, theta))
        .collect();
    ConeGraph64::from_edge_list(n, &edges).expect("valid random graph")
}

/// The open intervals between consecutive singular degrees in `(0, alpha_max)`.
pub fn nonsingular_intervals(g: &ConeGraph64, alpha_max: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![0.0];
    cuts.extend(g.singular_degrees(alpha_max).iter().map(|s| s.alpha));
    cuts.push(alpha_max);
    cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect()
}

/// Sorted eigenvalues of a symmetric matrix as `f64`.
pub fn spectrum(m: &conespec::SymMatrix64) -> Vec<f64> {
    conespec::linalg::eigenvalues_sym(m).expect("eigenvalues")
}

/// Proptest configuration with `cases` cases and no regression files.
pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}

/// Scanned degrees (nonsingular and singular) repeated by multiplicity, up to `alpha_max`.
pub fn scanned_multiset(g: &ConeGraph64, alpha_max: f64) -> Vec<f64> {
    let cfg = conespec::ScanConfig64::new(alpha_max);
    let (s, _) = conespec::euclid::scan_all_degrees(g, &cfg).expect("scan");
    s.expanded()
}

/// Oracle degrees repeated by multiplicity, computed up to `alpha_max + tol`.
pub fn oracle_multiset(g: &ConeGraph64, m: usize, alpha_max: f64, tol: f64) -> Vec<f64> {
    conespec::oracle::oracle_degrees(g, m, alpha_max + tol)
        .expect("oracle")
        .expanded()
}

/// Largest paired difference when both multisets agree in size, after dropping
/// oracle values above `alpha_max` that have no scanned partner.
pub fn paired_gap(scan: &[f64], oracle: &[f64], alpha_max: f64) -> Option<f64> {
    let mut oracle = oracle.to_vec();
    while oracle.len() > scan.len() && oracle.last().is_some_and(|&a| a > alpha_max) {
        oracle.pop();
    }
    (oracle.len() == scan.len()).then(|| scan.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}
