//! Degrees of balanced homogeneous maps between cones.
//!
//! A map sends the face of angle `θ(e)` to the face of angle `φ(e)` of a
//! target cone over the same graph, with the edge rays mapped onto each other.
//! Its vertex data `ρ` must lie in the kernel of
//!
//! ```text
//! Δ^φ_{αθ}[i][i] = −Σ cot(α θ_ik),   Δ^φ_{αθ}[i][j] = Σ cos(φ_ij) csc(α θ_ij),
//! ```
//!
//! defined for `0 < α < π/θ_max`. The matrix is negative definite for small `α`
//! and its eigenvalues increase on the whole interval. Only kernels containing
//! a nonnegative `ρ` give maps into the cone (`admissible`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid::{cot_csc, scan_family, DegreeSpectrum};
use crate::graph::ConeGraph;
use crate::linalg::{count_signs, nonnegative_in_span, nullspace, search_span, Matrix, SymMatrix};
use crate::scalar::{pi, reduce_angle, Real};
use crate::scan::ScanConfig;

/// Largest number of null-space dimensions searched at the singular endpoint.
pub const MAX_SEARCH_DIM: usize = 4;

fn alpha_star<T: Real>(g: &ConeGraph<T>) -> T {
    pi::<T>() / g.theta_max()
}

fn sigma_mask<T: Real>(g: &ConeGraph<T>) -> Vec<bool> {
    let tmax = g.theta_max();
    g.edges()
        .iter()
        .map(|e| e.theta >= tmax * (T::one() - T::tol(1e-12)))
        .collect()
}

fn check<T: Real>(g: &ConeGraph<T>, alpha: T) -> Result<()> {
    g.ensure_standard()?;
    g.require_phi()?;
    let limit = alpha_star(g) - T::loose_tol(1e-9);
    if !(alpha > T::zero()) || !(alpha <= limit) {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.as_f64(),
            max: alpha_star(g).as_f64(),
        });
    }
    Ok(())
}

fn conemap_unchecked<T: Real>(g: &ConeGraph<T>, alpha: T, skip: impl Fn(usize) -> bool) -> SymMatrix<T> {
    let mut m = SymMatrix::zeros(g.vertex_count());
    for (k, e) in g.edges().iter().enumerate() {
        if skip(k) {
            continue;
        }
        let (cot, csc) = cot_csc(alpha * e.theta);
        let phi = e.phi.expect("phi checked");
        m.add_sym(e.tail, e.tail, -cot);
        m.add_sym(e.head, e.head, -cot);
        m.add_sym(e.tail, e.head, phi.cos() * csc);
    }
    m
}

/// Builds `Δ^φ_{αθ}` for `0 < α ≤ π/θ_max − 1e-9`.
pub fn assemble_conemap<T: Real>(g: &ConeGraph<T>, alpha: T) -> Result<SymMatrix<T>> {
    check(g, alpha)?;
    Ok(conemap_unchecked(g, alpha, |_| false))
}

/// `Σ_e [2 ρ_i ρ_j cos φ − (ρ_i² + ρ_j²) cos(αθ)] / sin(αθ)`, evaluated edge by edge.
pub fn conemap_quadratic_form<T: Real>(g: &ConeGraph<T>, alpha: T, rho: &[T]) -> Result<T> {
    check(g, alpha)?;
    if rho.len() != g.vertex_count() {
        return Err(Error::InvalidArgument("rho has wrong length".into()));
    }
    let two = T::lit(2.0);
    Ok(g
        .edges()
        .iter()
        .map(|e| {
            let (s, c) = reduce_angle(alpha * e.theta).sin_cos();
            let phi = e.phi.expect("phi checked");
            let (a, b) = (rho[e.tail], rho[e.head]);
            (two * a * b * phi.cos() - (a * a + b * b) * c) / s
        })
        .sum())
}

/// Degrees in `(0, min(π/θ_max, alpha_max))`, each annotated with admissibility.
pub fn scan_degrees_conemap<T: Real>(g: &ConeGraph<T>, cfg: &ScanConfig<T>) -> Result<DegreeSpectrum<T>> {
    g.ensure_standard()?;
    g.require_phi()?;
    let top = alpha_star(g);
    let hi = if cfg.alpha_max < top - cfg.guard {
        cfg.alpha_max
    } else {
        top - cfg.guard
    };
    let lo = cfg.guard;
    let intervals = if hi > lo { vec![(lo, hi)] } else { Vec::new() };
    let grid = cfg.grid_size(g.vertex_count());
    let mut entries = scan_family(&intervals, grid, cfg, &|a| conemap_unchecked(g, a, |_| false))?;
    for e in &mut entries {
        e.admissible = Some(nonnegative_in_span(&e.kernel, cfg.nonneg_resolution)?.is_some());
    }
    Ok(DegreeSpectrum {
        entries,
        interval: (T::zero(), hi),
        config: *cfg,
    })
}

/// `min(π / (2 θ_max), min_e φ(e)/θ(e))`.
pub fn lower_bound_conemap<T: Real>(g: &ConeGraph<T>) -> Result<T> {
    g.ensure_standard()?;
    g.require_phi()?;
    let half = pi::<T>() / (T::lit(2.0) * g.theta_max());
    Ok(g
        .edges()
        .iter()
        .fold(half, |m, e| m.min(e.phi.expect("phi checked") / e.theta)))
}

/// The predicted number of degrees in `(0, π/θ_max)` with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeMapCount {
    /// `dim W`, where `W` is the set of `ρ` vanishing on every vertex of a `θ_max` edge.
    pub w_dim: usize,
    pub w_perp_dim: usize,
    pub q_positive: usize,
    pub q_zero: usize,
    pub q_negative: usize,
    /// `dim W⊥ + #positive eigenvalues of Q on W`.
    pub total: usize,
}

struct Endpoint<T> {
    alpha: T,
    sigma: Vec<bool>,
    free: Vec<usize>,
}

fn endpoint<T: Real>(g: &ConeGraph<T>) -> Endpoint<T> {
    let sigma = sigma_mask(g);
    let mut in_sigma_vertex = vec![false; g.vertex_count()];
    for (k, e) in g.edges().iter().enumerate() {
        if sigma[k] {
            in_sigma_vertex[e.tail] = true;
            in_sigma_vertex[e.head] = true;
        }
    }
    let free = (0..g.vertex_count()).filter(|&v| !in_sigma_vertex[v]).collect();
    Endpoint {
        alpha: alpha_star(g),
        sigma,
        free,
    }
}

/// Limit form at `α = π/θ_max` over the edges with `θ < θ_max`, in coordinates of `W`.
fn limit_form_on_w<T: Real>(g: &ConeGraph<T>, ep: &Endpoint<T>) -> SymMatrix<T> {
    let full = conemap_unchecked(g, ep.alpha, |k| ep.sigma[k]);
    SymMatrix::from_fn(ep.free.len(), |i, j| full.get(ep.free[i], ep.free[j]))
}

pub fn conemap_count<T: Real>(g: &ConeGraph<T>) -> Result<ConeMapCount> {
    g.ensure_standard()?;
    g.require_phi()?;
    let ep = endpoint(g);
    let q = limit_form_on_w(g, &ep);
    let signs = if q.dim() == 0 {
        crate::linalg::SignCount {
            negative: 0,
            zero: 0,
            positive: 0,
        }
    } else {
        count_signs(&q, T::loose_tol(1e-9))?
    };
    let w_dim = ep.free.len();
    let w_perp_dim = g.vertex_count() - w_dim;
    Ok(ConeMapCount {
        w_dim,
        w_perp_dim,
        q_positive: signs.positive,
        q_zero: signs.zero,
        q_negative: signs.negative,
        total: w_perp_dim + signs.positive,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum EndpointVerdict<T> {
    /// Only the zero map is balanced at `π/θ_max`.
    TrivialOnly,
    /// A nonzero solution satisfying every sign condition was found.
    FeasibleWitness { rho: Vec<T>, nu: Vec<T> },
    /// The grid search found no witness; existence is not decided.
    Undetermined,
}

/// A normal-derivative constraint on a `θ_max` edge: `ν(v, e) ≥ cos φ(e) · ν(w, e)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuConstraint<T> {
    pub edge: usize,
    pub vertex: usize,
    pub other: usize,
    pub cos_phi: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeMapSingularReport<T> {
    pub alpha: T,
    pub sigma_edges: Vec<usize>,
    /// Vertices not incident to a `θ_max` edge; `ρ` unknowns live here.
    pub free_vertices: Vec<usize>,
    /// `(edge, endpoint)` pairs of the `ν` unknowns, in column order.
    pub nu_slots: Vec<(usize, usize)>,
    pub nullspace_dim: usize,
    pub constraints: Vec<NuConstraint<T>>,
    pub verdict: EndpointVerdict<T>,
}

/// Analysis of balanced maps at the endpoint `α = π/θ_max`.
///
/// Unknowns are `ρ` on the free vertices and the normal derivatives
/// `ν(v, e)` (divided by `α`) at both ends of every `θ_max` edge. Balancing
/// at free vertices uses the regular face formula; at the other vertices the
/// `ν` of incident `θ_max` edges are added to `cos φ · ρ_j / sin(αθ)` from the
/// remaining edges. The null space of these equations is then searched for a
/// point with `ρ ≥ 0` and `ν(v, e) ≥ cos φ(e) ν(w, e)` at both ends.
pub fn singular_conemap<T: Real>(g: &ConeGraph<T>, resolution: usize) -> Result<ConeMapSingularReport<T>> {
    g.ensure_standard()?;
    g.require_phi()?;
    let ep = endpoint(g);
    let sigma_edges: Vec<usize> = (0..g.edge_count()).filter(|&k| ep.sigma[k]).collect();
    let mut nu_slots = Vec::new();
    let mut constraints = Vec::new();
    for &k in &sigma_edges {
        let e = g.edge(k);
        let c = e.phi.expect("phi checked").cos();
        nu_slots.push((k, e.tail));
        nu_slots.push((k, e.head));
        constraints.push(NuConstraint {
            edge: k,
            vertex: e.tail,
            other: e.head,
            cos_phi: c,
        });
        constraints.push(NuConstraint {
            edge: k,
            vertex: e.head,
            other: e.tail,
            cos_phi: c,
        });
    }
    let mut report = ConeMapSingularReport {
        alpha: ep.alpha,
        sigma_edges,
        free_vertices: ep.free.clone(),
        nu_slots: nu_slots.clone(),
        nullspace_dim: 0,
        constraints,
        verdict: EndpointVerdict::TrivialOnly,
    };
    if ep.free.is_empty() {
        // ρ vanishes identically, which forces the zero map.
        return Ok(report);
    }

    let n = g.vertex_count();
    let nf = ep.free.len();
    let col_of_free = |v: usize| ep.free.binary_search(&v).ok();
    let mut system = Matrix::zeros(n, nf + nu_slots.len());
    for (k, e) in g.edges().iter().enumerate() {
        if ep.sigma[k] {
            continue;
        }
        let (s, c) = reduce_angle(ep.alpha * e.theta).sin_cos();
        let cphi = e.phi.expect("phi checked").cos();
        for (i, j) in [(e.tail, e.head), (e.head, e.tail)] {
            if let Some(ci) = col_of_free(i) {
                system[(i, ci)] -= c / s;
            }
            if let Some(cj) = col_of_free(j) {
                system[(i, cj)] += cphi / s;
            }
        }
    }
    for (slot, &(_, v)) in nu_slots.iter().enumerate() {
        system[(v, nf + slot)] += T::one();
    }
    let kernel = nullspace(&system, T::loose_tol(1e-9))?;
    report.nullspace_dim = kernel.len();
    if kernel.is_empty() {
        return Ok(report);
    }
    let rho_part = Matrix::from_fn(nf, kernel.len(), |i, j| kernel[j][i]);
    let rho_scale = rho_part.max_abs();
    if rho_scale <= T::loose_tol(1e-9) {
        return Ok(report);
    }
    if kernel.len() > MAX_SEARCH_DIM {
        report.verdict = EndpointVerdict::Undetermined;
        return Ok(report);
    }
    let floor = -T::tol(1e-10);
    let slot_of = |k: usize, v: usize| nu_slots.iter().position(|&s| s == (k, v)).expect("slot");
    let witness = search_span(&kernel, resolution, |x, _| {
        let rho = &x[..nf];
        let nu = &x[nf..];
        if rho.iter().all(|&r| r.abs() <= T::loose_tol(1e-6)) || rho.iter().any(|&r| r < floor) {
            return false;
        }
        report
            .constraints
            .iter()
            .all(|c| nu[slot_of(c.edge, c.vertex)] - c.cos_phi * nu[slot_of(c.edge, c.other)] >= floor)
    })?;
    report.verdict = match witness {
        Some(x) => {
            let mut rho = vec![T::zero(); n];
            for (i, &v) in ep.free.iter().enumerate() {
                rho[v] = x[i];
            }
            EndpointVerdict::FeasibleWitness {
                rho,
                nu: x[nf..].to_vec(),
            }
        }
        None => EndpointVerdict::Undetermined,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> ScanConfig<f64> {
        let mut c = ScanConfig::new(f64::INFINITY);
        c.parallel = false;
        c
    }

    #[test]
    fn constant_angles_first_case() {
        let g = ConeGraph::<f64>::cycle(5, PI / 3.0).unwrap().with_constant_phi(PI / 4.0).unwrap();
        let s = scan_degrees_conemap(&g, &cfg()).unwrap();
        let e = &s.entries[0];
        assert!((e.alpha - 0.75).abs() < 1e-9);
        assert_eq!(e.multiplicity, 1);
        let k = &e.kernel[0];
        let scale = k[0];
        assert!(k.iter().all(|&x| (x / scale - 1.0).abs() < 1e-8));
        assert_eq!(e.admissible, Some(true));
        assert_eq!(singular_conemap(&g, 64).unwrap().verdict, EndpointVerdict::TrivialOnly);
    }

    #[test]
    fn right_angle_targets_give_full_kernel() {
        let g = ConeGraph::<f64>::complete(4, PI / 4.0).unwrap().with_constant_phi(PI / 2.0).unwrap();
        let s = scan_degrees_conemap(&g, &cfg()).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert!((s.entries[0].alpha - 2.0).abs() < 1e-9);
        assert_eq!(s.entries[0].multiplicity, 4);
    }

    #[test]
    fn count_matches_scan() {
        let g = ConeGraph::<f64>::from_edge_list_with_phi(
            4,
            &[(0, 1, 1.1, 0.9), (1, 2, 0.6, 1.3), (2, 3, 0.8, 0.5), (3, 0, 0.4, 2.0), (0, 2, 0.7, 1.0)],
        )
        .unwrap();
        let s = scan_degrees_conemap(&g, &cfg()).unwrap();
        let c = conemap_count(&g).unwrap();
        assert_eq!(s.expanded().len(), c.total);
    }

    #[test]
    fn missing_phi() {
        let g = ConeGraph::<f64>::cycle(3, 1.0).unwrap();
        assert!(matches!(assemble_conemap(&g, 0.5), Err(Error::MissingPhi(_))));
        let g = g.with_constant_phi(1.0).unwrap();
        assert!(matches!(assemble_conemap(&g, 3.2), Err(Error::AlphaOutOfRange { .. })));
    }
}
