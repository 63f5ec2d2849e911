//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero when a criterion outside `EXPECTED_FAILURES` fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;

use conespec::conemap::{
    assemble_conemap, lower_bound_conemap, scan_degrees_conemap, singular_conemap, EndpointVerdict,
};
use conespec::euclid::{
    assemble_delta, constant_theta_degrees, limit_operator_alpha0, lower_bound_euclid, scan_degrees,
    singular_analysis,
};
use conespec::kpod::{
    balanced_kpod_exists, harmonic_kpod_degrees, p_harmonic_degree, p_harmonic_kpod_bound,
};
use conespec::linalg::{eigenvalues_sym, Matrix, SymMatrix};
use conespec::oracle::{ball_average, facewise_linear_check, observed_orders, oracle_eigenfunctions, DEFAULT_SEED};
use conespec::{ConeGraph64, ScanConfig64};
use rand::Rng;

use common::{
    nonsingular_intervals, oracle_multiset, paired_gap, random_constant_graph, random_graph, random_graph_with_phi, rng,
    scanned_multiset, spectrum, THETA_HI, THETA_LO,
};

/// Criteria that fail for reasons recorded in the decisions ledger.
const EXPECTED_FAILURES: &[u32] = &[5];

type Outcome = (bool, String);

fn flat_plane() -> Outcome {
    let g = ConeGraph64::cycle(3, 2.0 * PI / 3.0).unwrap();
    let s = scan_degrees(&g, &ScanConfig64::new(1.5)).unwrap();
    let predicted = constant_theta_degrees(&g, 1.5).unwrap();
    let found: Vec<(f64, usize)> = s.entries.iter().map(|e| (e.alpha, e.multiplicity)).collect();
    let ok = found.len() == 1
        && (found[0].0 - 1.0).abs() <= 1e-9
        && found[0].1 == 2
        && predicted.len() == 1
        && predicted[0].multiplicity == 2
        && (predicted[0].alpha - 1.0).abs() <= 1e-12;
    (ok, format!("scan {found:?}, laplacian prediction {:?}", predicted.iter().map(|p| p.alpha).collect::<Vec<_>>()))
}

/// `I − D^{-1/2} A D^{-1/2}` built directly from the edge list.
fn laplacian_spectrum(g: &ConeGraph64) -> Vec<f64> {
    let n = g.vertex_count();
    let deg: Vec<f64> = (0..n).map(|v| g.degree(v) as f64).collect();
    let mut a = vec![vec![0.0; n]; n];
    for e in g.edges() {
        a[e.tail][e.head] += 1.0;
        a[e.head][e.tail] += 1.0;
    }
    let l = SymMatrix::from_fn(n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - a[i][j] / (deg[i] * deg[j]).sqrt()
    });
    eigenvalues_sym(&l).unwrap()
}

fn constant_theta_correspondence() -> Outcome {
    let mut r = rng(0xac02);
    let alpha_max = 3.0;
    let (mut bad_forward, mut bad_converse, mut degrees) = (0, 0, 0);
    for _ in 0..20 {
        let theta = r.gen_range(THETA_LO..THETA_HI);
        let g = random_constant_graph(&mut r, 8, theta);
        let s = scan_degrees(&g, &ScanConfig64::new(alpha_max)).unwrap();
        let lap = laplacian_spectrum(&g);
        degrees += s.entries.len();
        for e in &s.entries {
            let x = 1.0 - (e.alpha * theta).cos();
            if !lap.iter().any(|&l| (l - x).abs() <= 1e-8) {
                bad_forward += 1;
            }
        }
        let mut clusters: Vec<(f64, usize)> = Vec::new();
        for &l in lap.iter().filter(|&&l| l > 1e-9 && l < 2.0 - 1e-9) {
            match clusters.last_mut() {
                Some((c, m)) if (l - *c).abs() <= 1e-9 => *m += 1,
                _ => clusters.push((l, 1)),
            }
        }
        for (l, mult) in clusters {
            let base = (1.0 - l).acos();
            let mut k = 0.0;
            loop {
                let mut hit = false;
                for x in [2.0 * PI * k + base, 2.0 * PI * (k + 1.0) - base] {
                    let alpha = x / theta;
                    if alpha < alpha_max - 1e-6 {
                        hit = true;
                        let found = s.entries.iter().find(|e| (e.alpha - alpha).abs() <= 1e-8);
                        if found.map(|e| e.multiplicity) != Some(mult) {
                            bad_converse += 1;
                        }
                    }
                }
                if !hit {
                    break;
                }
                k += 1.0;
            }
        }
    }
    (
        bad_forward == 0 && bad_converse == 0,
        format!("{degrees} degrees on 20 graphs, {bad_forward} without a Laplacian match, {bad_converse} missed branches"),
    )
}

fn monotonicity() -> Outcome {
    let mut r = rng(0xac03);
    let mut violations = 0;
    for sample in 0..1000 {
        let with_phi = sample % 2 == 1;
        let (g, lo, hi) = if with_phi {
            let g = random_graph_with_phi(&mut r, 8, (THETA_LO, THETA_HI), (0.2, 3.0));
            let top = PI / g.theta_max();
            (g, 0.0, top)
        } else {
            let g = random_graph(&mut r, 8, THETA_LO, THETA_HI);
            let ivs = nonsingular_intervals(&g, 4.0);
            let (a, b) = ivs[r.gen_range(0..ivs.len())];
            (g, a, b)
        };
        let eps = 1e-3 * (hi - lo);
        let a = r.gen_range(lo + eps..hi - 2.0 * eps);
        let b = r.gen_range(a + eps..hi - eps);
        let build = |x: f64| if with_phi { assemble_conemap(&g, x) } else { assemble_delta(&g, x) };
        let (ea, eb) = (spectrum(&build(a).unwrap()), spectrum(&build(b).unwrap()));
        if ea.iter().zip(&eb).any(|(x, y)| x >= y) {
            violations += 1;
        }
    }
    (violations == 0, format!("1000 samples, {violations} violations"))
}

fn limit_error(g: &ConeGraph64, alpha: f64) -> f64 {
    let d = assemble_delta(g, alpha).unwrap();
    let l = limit_operator_alpha0(g).unwrap();
    let n = g.vertex_count();
    Matrix::from_fn(n, n, |i, j| alpha * d.get(i, j) + l.get(i, j)).frobenius_norm()
}

fn alpha_zero_limit() -> Outcome {
    let mut r = rng(0xac04);
    let ratios: Vec<f64> = (0..20)
        .map(|_| {
            let g = random_graph(&mut r, 8, THETA_LO, THETA_HI);
            limit_error(&g, 1e-2) / limit_error(&g, 1e-3)
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    ((80.0..=120.0).contains(&lo) && (80.0..=120.0).contains(&hi), format!("error ratio in [{lo:.3}, {hi:.3}] on 20 graphs"))
}

fn lower_bounds() -> Outcome {
    let mut r = rng(0xac05);
    let (mut euclid_bad, mut conemap_bad, mut negative_bad) = (0, 0, 0);
    let (mut admissible_bad, mut acute_bad, mut acute) = (0, 0, 0);
    for _ in 0..50 {
        let g = random_graph_with_phi(&mut r, 7, (THETA_LO, THETA_HI), (0.2, 3.0));
        let acute_phi = g.edges().iter().all(|e| e.phi.unwrap() <= PI / 2.0);
        acute += acute_phi as usize;
        let eb = lower_bound_euclid(&g).unwrap();
        let s = scan_degrees(&g, &ScanConfig64::new(4.0)).unwrap();
        if s.entries.first().is_some_and(|e| e.alpha < eb - 1e-9) {
            euclid_bad += 1;
        }
        let cb = lower_bound_conemap(&g).unwrap();
        let c = scan_degrees_conemap(&g, &ScanConfig64::new(PI / g.theta_max())).unwrap();
        if c.entries.first().is_some_and(|e| e.alpha < cb - 1e-9) {
            conemap_bad += 1;
        }
        if c.entries.iter().any(|e| e.admissible == Some(true) && e.alpha < cb - 1e-9) {
            admissible_bad += 1;
        }
        let positive_below = (1..=20).any(|k| {
            let alpha = (cb - 1e-6) * k as f64 / 20.0;
            *spectrum(&assemble_conemap(&g, alpha).unwrap()).last().unwrap() >= 0.0
        });
        if positive_below {
            negative_bad += 1;
            acute_bad += acute_phi as usize;
        }
    }
    (
        euclid_bad == 0 && conemap_bad == 0 && negative_bad == 0,
        format!(
            "50 instances: euclid {euclid_bad} below bound, cone-map {conemap_bad} below bound \
             ({admissible_bad} admissible), {negative_bad} with a nonnegative eigenvalue below the bound \
             ({acute_bad} of {acute} instances with every phi <= pi/2)"
        ),
    )
}

fn singular_dimensions() -> Outcome {
    let cases = [
        (ConeGraph64::cycle(3, 2.0 * PI / 3.0).unwrap(), 1.5, 0),
        (ConeGraph64::cycle(4, PI / 2.0).unwrap(), 2.0, 2),
        (ConeGraph64::cycle(3, 2.0 * PI / 3.0).unwrap(), 3.0, 2),
        (ConeGraph64::complete(2, PI / 2.0).unwrap(), 2.0, 1),
        (ConeGraph64::complete(4, PI / 2.0).unwrap(), 2.0, 2),
    ];
    let dims: Vec<usize> = cases.iter().map(|(g, a, _)| singular_analysis(g, *a).unwrap().balanced_dim).collect();
    let want: Vec<usize> = cases.iter().map(|c| c.2).collect();
    (dims == want, format!("dimensions {dims:?}, expected {want:?}"))
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(0xac07);
    let (alpha_max, tol) = (3.0, 1e-3);
    let (mut mismatched, mut worst, mut total) = (0, 0.0f64, 0);
    for _ in 0..10 {
        let g = random_graph(&mut r, 6, THETA_LO, THETA_HI);
        let scan = scanned_multiset(&g, alpha_max);
        let oracle = oracle_multiset(&g, 2048, alpha_max, tol);
        total += scan.len();
        match paired_gap(&scan, &oracle, alpha_max) {
            Some(d) if d <= tol => worst = worst.max(d),
            _ => mismatched += 1,
        }
    }
    let circle = ConeGraph64::cycle(3, 2.0 * PI / 3.0).unwrap();
    let interval = ConeGraph64::path(2, 1.0).unwrap();
    let mut orders = Vec::new();
    for (g, exact) in [
        (circle, vec![1.0, 1.0, 2.0, 2.0, 3.0]),
        (interval, (1..=5).map(|k| k as f64 * PI).collect::<Vec<_>>()),
    ] {
        orders.extend(observed_orders(&g, &exact, 128).unwrap().iter().map(|s| s.order));
    }
    let (lo, hi) = orders.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    let orders_ok = (1.7..=2.3).contains(&lo) && (1.7..=2.3).contains(&hi);
    (
        mismatched == 0 && orders_ok,
        format!(
            "10 graphs, {total} degrees, {mismatched} mismatched, worst |d alpha| {worst:.2e}; \
             convergence order in [{lo:.4}, {hi:.4}]"
        ),
    )
}

fn conemap_constant() -> Outcome {
    let mut r = rng(0xac08);
    let mut graphs = vec![
        ConeGraph64::cycle(3, 1.0).unwrap(),
        ConeGraph64::cycle(4, 1.0).unwrap(),
        ConeGraph64::complete(4, 1.0).unwrap(),
        ConeGraph64::path(3, 1.0).unwrap(),
    ];
    graphs.extend((0..6).map(|_| random_constant_graph(&mut r, 7, 1.0)));
    let (mut bad_one, mut bad_full, mut bad_endpoint, mut others) = (0, 0, 0, 0);
    for base in &graphs {
        let g = base.map_thetas(|_, _| PI / 3.0).unwrap().with_constant_phi(PI / 4.0).unwrap();
        let s = scan_degrees_conemap(&g, &ScanConfig64::new(PI / g.theta_max())).unwrap();
        let admissible: Vec<_> = s.entries.iter().filter(|e| e.admissible == Some(true)).collect();
        others += s.entries.len() - admissible.len();
        let constant_kernel = |k: &[f64]| k.iter().all(|x| (x - k[0]).abs() <= 1e-8);
        if admissible.len() != 1
            || (admissible[0].alpha - 0.75).abs() > 1e-9
            || admissible[0].multiplicity != 1
            || !constant_kernel(&admissible[0].kernel[0])
        {
            bad_one += 1;
        }
        let h = base.map_thetas(|_, _| PI / 4.0).unwrap().with_constant_phi(PI / 2.0).unwrap();
        let s = scan_degrees_conemap(&h, &ScanConfig64::new(PI / h.theta_max())).unwrap();
        if s.entries.len() != 1 || (s.entries[0].alpha - 2.0).abs() > 1e-9 || s.entries[0].multiplicity != h.vertex_count() {
            bad_full += 1;
        }
        let theta0 = r.gen_range(THETA_LO..THETA_HI);
        let mut phis = Vec::new();
        for _ in 0..base.edge_count() {
            phis.push(r.gen_range(0.2..3.0));
        }
        let edges: Vec<_> = base.edges().iter().zip(&phis).map(|(e, &p)| (e.tail, e.head, theta0, p)).collect();
        let k = ConeGraph64::from_edge_list_with_phi(base.vertex_count(), &edges).unwrap();
        for cand in [&g, &h, &k] {
            if singular_conemap(cand, 64).unwrap().verdict != EndpointVerdict::TrivialOnly {
                bad_endpoint += 1;
            }
        }
    }
    (
        bad_one == 0 && bad_full == 0 && bad_endpoint == 0,
        format!(
            "{} graphs: {bad_one} wrong at phi0/theta0 = 0.75 ({others} further degrees without a nonnegative kernel), \
             {bad_full} wrong at alpha = 2, {bad_endpoint} endpoint verdicts other than trivial-only",
            graphs.len()
        ),
    )
}

fn kpod() -> Outcome {
    let mut problems = Vec::new();
    let flat = ConeGraph64::cycle(4, PI / 2.0).unwrap();
    let d = harmonic_kpod_degrees(&flat, 8).unwrap();
    if !d.iter().all(|d| (d.alpha - d.visits as f64 / 2.0).abs() <= 1e-12) {
        problems.push("flat degrees");
    }
    let curved = ConeGraph64::cycle(3, PI / 2.0).unwrap();
    if !harmonic_kpod_degrees(&curved, 8).unwrap().iter().all(|d| d.alpha > 1.0) {
        problems.push("positively curved degrees");
    }
    let wide = ConeGraph64::cycle(4, 3.0 * PI / 4.0).unwrap();
    let three = harmonic_kpod_degrees(&wide, 3).unwrap();
    if !(three.len() == 2 && (three[1].alpha - 1.0).abs() <= 1e-12) {
        problems.push("total angle 3pi");
    }
    let mut certificates = 0;
    let mut r = rng(0xac09);
    let mut cycles = vec![flat, curved, wide];
    for _ in 0..10 {
        let n = r.gen_range(3..=8);
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, r.gen_range(0.3..3.0))).collect();
        cycles.push(ConeGraph64::from_edge_list(n, &edges).unwrap());
    }
    for c in &cycles {
        for d in harmonic_kpod_degrees(c, 8).unwrap() {
            if let Some(cert) = balanced_kpod_exists(c, d.alpha).unwrap() {
                certificates += 1;
                if cert.arc_angles.iter().any(|a| (a - PI / d.alpha).abs() > 1e-9) {
                    problems.push("arc sums");
                }
            }
        }
    }
    (problems.is_empty(), format!("{certificates} certificates checked; problems: {problems:?}"))
}

fn p_harmonic() -> Outcome {
    let flat = p_harmonic_degree(2.0 * PI / 3.0, 2.0f64).unwrap();
    let p = 10.0f64;
    let closed_form = (17.0 * p - 16.0 + (p * p + 32.0 * p - 32.0).sqrt()) / (16.0 * (p - 1.0));
    let bound = p_harmonic_kpod_bound(p).unwrap().value;
    let solved = p_harmonic_degree(2.0 * PI / 3.0, p).unwrap();
    let limit = p_harmonic_kpod_bound(1e6f64).unwrap().value;
    let mut violations = 0;
    for p in [1.5, 2.0, 3.0, 10.0] {
        let grid: Vec<f64> = (1..=50).map(|k| 2.0 * PI * k as f64 / 51.0).collect();
        let alphas: Vec<f64> = grid.iter().map(|&t| p_harmonic_degree(t, p).unwrap()).collect();
        violations += alphas.windows(2).filter(|w| w[0] <= w[1]).count();
    }
    let ok = (flat - 1.5).abs() <= 1e-10
        && (bound - closed_form).abs() <= 1e-10
        && (solved - closed_form).abs() <= 1e-10
        && (limit - 9.0 / 8.0).abs() <= 1e-5
        && violations == 0;
    (
        ok,
        format!(
            "p=2: {flat:.12}; p=10: bound {bound:.12}, root {solved:.12}, closed form {closed_form:.12}; \
             p=1e6: {limit:.9}; {violations} monotonicity violations"
        ),
    )
}

fn ball_average_and_facewise() -> Outcome {
    let mut r = rng(0xac11);
    let (mut worst, mut functions, mut facewise_bad) = (0.0f64, 0, 0);
    for _ in 0..20 {
        let g = random_graph_with_phi(&mut r, 6, (THETA_LO, THETA_HI), (0.2, 3.0));
        let res = oracle_eigenfunctions(&g, 512, 3.0, DEFAULT_SEED).unwrap();
        for f in res.eigenfunctions.iter().filter(|f| f.alpha > 0.0) {
            let b = ball_average(&res.pencil, &f.values, f.alpha).unwrap();
            worst = worst.max(b.integral.abs() / (b.norm * b.total_angle.sqrt()));
            functions += 1;
        }
        let check = facewise_linear_check(&g).unwrap();
        if !(check.confirmed && check.kernel.len() == 1 && check.constant) {
            facewise_bad += 1;
        }
    }
    (
        worst <= 1e-6 && facewise_bad == 0,
        format!("{functions} eigenfunctions, worst relative integral {worst:.2e}; {facewise_bad} facewise-linear failures"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "flat-plane recovery", flat_plane),
        (2, "constant-theta spectral correspondence", constant_theta_correspondence),
        (3, "eigenvalue monotonicity", monotonicity),
        (4, "alpha -> 0 limit", alpha_zero_limit),
        (5, "lower bounds", lower_bounds),
        (6, "singular dimensions", singular_dimensions),
        (7, "oracle equivalence", oracle_equivalence),
        (8, "cone-map constant case", conemap_constant),
        (9, "k-pod degrees", kpod),
        (10, "p-harmonic degrees", p_harmonic),
        (11, "ball average and facewise-linear maps", ball_average_and_facewise),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let (pass, detail) = run();
        println!("{} {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass && !EXPECTED_FAILURES.contains(&id) {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
