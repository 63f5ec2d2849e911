//! Degrees of balanced homogeneous functions into the Euclidean line.
//!
//! A function `u = r^α ρ` on the cone over a graph is harmonic on each face and
//! balanced along the edge rays exactly when the vertex values `ρ` lie in the
//! kernel of the symmetric matrix
//!
//! ```text
//! Δ_{αθ}[i][i] = −Σ_{k∼i} cot(α θ_ik),   Δ_{αθ}[i][j] = Σ_{edges i~j} csc(α θ_ij),
//! ```
//!
//! whenever no `α θ(e)` is a multiple of `π`. The eigenvalues of `Δ_{αθ}` are
//! strictly increasing in `α` on every interval free of such singular degrees,
//! so degrees are found by tracking the number of negative eigenvalues across
//! each interval and bisecting where it drops.

mod singular;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use singular::{
    abundance_check, boundary_operators, singular_analysis, AbundanceReport, BalancedGenerator, BoundaryOperators,
    SingularReport,
};

use crate::error::{Error, Result};
use crate::graph::ConeGraph;
use crate::laplacian::{normalized_laplacian, weighted_laplacian};
use crate::linalg::{eig_sym, eigenvalues_sym, negative_count, SymMatrix};
use crate::scan::{locate_drops, merge_close, ScanConfig};
use crate::scalar::{reduce_angle, two_pi, Real};

/// Largest admissible `α θ_min`; beyond it the trigonometric entries lose accuracy.
pub const MAX_PHASE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeKind {
    Nonsingular,
    Singular,
}

/// One located degree with its kernel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeEntry<T> {
    pub alpha: T,
    pub multiplicity: usize,
    pub kind: DegreeKind,
    /// Orthonormal basis of the kernel at `alpha`, one vector per multiplicity.
    pub kernel: Vec<Vec<T>>,
    /// For cone maps: whether the kernel contains a nonnegative vector.
    pub admissible: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeSpectrum<T> {
    pub entries: Vec<DegreeEntry<T>>,
    pub interval: (T, T),
    pub config: ScanConfig<T>,
}

impl<T: Real> DegreeSpectrum<T> {
    pub fn alphas(&self) -> Vec<T> {
        self.entries.iter().map(|e| e.alpha).collect()
    }

    /// Degrees repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<T> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat(e.alpha).take(e.multiplicity))
            .collect()
    }
}

/// A degree predicted from the normalized Laplacian of a constant-angle graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantThetaDegree<T> {
    pub alpha: T,
    pub multiplicity: usize,
    pub laplacian_eigenvalue: T,
}

/// Sorted eigenvalues of `Δ_{αθ}` sampled along `α`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenCurves<T> {
    pub alphas: Vec<T>,
    pub values: Vec<Vec<T>>,
}

fn check_alpha<T: Real>(g: &ConeGraph<T>, alpha: T) -> Result<()> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be positive")));
    }
    if alpha * g.theta_min() > T::lit(MAX_PHASE) {
        return Err(Error::Accuracy(format!(
            "alpha = {alpha} exceeds {MAX_PHASE}/theta_min; trigonometric entries are unreliable"
        )));
    }
    Ok(())
}

pub(crate) fn cot_csc<T: Real>(x: T) -> (T, T) {
    let x = reduce_angle(x);
    let (s, c) = x.sin_cos();
    (c / s, T::one() / s)
}

/// `Δ_{αθ}` without range or singularity checks.
pub(crate) fn delta_unchecked<T: Real>(g: &ConeGraph<T>, alpha: T, skip: impl Fn(usize) -> bool) -> SymMatrix<T> {
    let mut m = SymMatrix::zeros(g.vertex_count());
    for (k, e) in g.edges().iter().enumerate() {
        if skip(k) {
            continue;
        }
        let (cot, csc) = cot_csc(alpha * e.theta);
        m.add_sym(e.tail, e.tail, -cot);
        m.add_sym(e.head, e.head, -cot);
        m.add_sym(e.tail, e.head, csc);
    }
    m
}

/// Builds `Δ_{αθ}`. Fails when `α` is within `1e-9` of a singular degree.
pub fn assemble_delta<T: Real>(g: &ConeGraph<T>, alpha: T) -> Result<SymMatrix<T>> {
    g.ensure_standard()?;
    check_alpha(g, alpha)?;
    g.ensure_nonsingular(alpha, T::loose_tol(1e-9))?;
    Ok(delta_unchecked(g, alpha, |_| false))
}

/// `Σ_e [2 ρ_i ρ_j − cos(αθ)(ρ_i² + ρ_j²)] / sin(αθ)`, evaluated edge by edge.
pub fn quadratic_form<T: Real>(g: &ConeGraph<T>, alpha: T, rho: &[T]) -> Result<T> {
    g.ensure_standard()?;
    check_alpha(g, alpha)?;
    g.ensure_nonsingular(alpha, T::loose_tol(1e-9))?;
    if rho.len() != g.vertex_count() {
        return Err(Error::InvalidArgument("rho has wrong length".into()));
    }
    let two = T::lit(2.0);
    Ok(g
        .edges()
        .iter()
        .map(|e| {
            let x = reduce_angle(alpha * e.theta);
            let (s, c) = x.sin_cos();
            let (a, b) = (rho[e.tail], rho[e.head]);
            (two * a * b - c * (a * a + b * b)) / s
        })
        .sum())
}

/// The open intervals between consecutive singular degrees, clipped to `(0, alpha_max]`.
/// The flag marks whether the right end is a singular degree.
pub(crate) fn nonsingular_intervals<T: Real>(g: &ConeGraph<T>, alpha_max: T) -> Vec<(T, T, bool)> {
    let sing = g.singular_degrees(alpha_max);
    let mut out = Vec::new();
    let mut left = T::zero();
    for s in &sing {
        out.push((left, s.alpha, true));
        left = s.alpha;
    }
    if alpha_max > left * (T::one() + T::tol(1e-12)) {
        out.push((left, alpha_max, false));
    }
    out
}

/// Kernel vectors for a degree of known multiplicity: the eigenvectors whose
/// eigenvalues are closest to zero.
pub(crate) fn kernel_at<T: Real>(m: &SymMatrix<T>, multiplicity: usize) -> Result<Vec<Vec<T>>> {
    let eig = eig_sym(m)?;
    let mut order: Vec<usize> = (0..eig.values.len()).collect();
    order.sort_by(|&a, &b| eig.values[a].abs().partial_cmp(&eig.values[b].abs()).expect("finite"));
    let mut picked: Vec<usize> = order.into_iter().take(multiplicity).collect();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|k| eig.vector(k)).collect())
}

/// Scans a family `α ↦ A(α)` whose eigenvalues increase in `α` over the given intervals.
pub(crate) fn scan_family<T: Real>(
    intervals: &[(T, T)],
    grid: usize,
    cfg: &ScanConfig<T>,
    matrix: &(dyn Fn(T) -> SymMatrix<T> + Sync),
) -> Result<Vec<DegreeEntry<T>>> {
    let one = |&(lo, hi): &(T, T)| -> Result<Vec<DegreeEntry<T>>> {
        let count = |a: T| -> Result<i64> { Ok(negative_count(&matrix(a))? as i64) };
        let roots = merge_close(locate_drops(lo, hi, grid, cfg.alpha_tol, &count)?, cfg.merge_tol);
        roots
            .into_iter()
            .map(|(alpha, multiplicity)| {
                Ok(DegreeEntry {
                    alpha,
                    multiplicity,
                    kind: DegreeKind::Nonsingular,
                    kernel: kernel_at(&matrix(alpha), multiplicity)?,
                    admissible: None,
                })
            })
            .collect()
    };
    let parts: Vec<Result<Vec<DegreeEntry<T>>>> = if cfg.parallel {
        intervals.par_iter().map(one).collect()
    } else {
        intervals.iter().map(one).collect()
    };
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// All nonsingular degrees in `(0, alpha_max]` with multiplicities and kernels.
pub fn scan_degrees<T: Real>(g: &ConeGraph<T>, cfg: &ScanConfig<T>) -> Result<DegreeSpectrum<T>> {
    g.ensure_standard()?;
    check_alpha(g, cfg.alpha_max)?;
    let intervals: Vec<(T, T)> = nonsingular_intervals(g, cfg.alpha_max)
        .into_iter()
        .map(|(a, b, singular_end)| (a + cfg.guard, if singular_end { b - cfg.guard } else { b }))
        .filter(|(a, b)| b > a)
        .collect();
    let grid = cfg.grid_size(g.vertex_count());
    let entries = scan_family(&intervals, grid, cfg, &|a| delta_unchecked(g, a, |_| false))?;
    Ok(DegreeSpectrum {
        entries,
        interval: (T::zero(), cfg.alpha_max),
        config: *cfg,
    })
}

/// Nonsingular degrees together with every singular degree in `(0, alpha_max]`
/// whose balanced space is nontrivial, sorted by `α`, plus the singular reports.
///
/// Singular entries carry the generators' values on the original vertices as
/// their kernel; these vectors span the restriction but need not be orthonormal.
pub fn scan_all_degrees<T: Real>(
    g: &ConeGraph<T>,
    cfg: &ScanConfig<T>,
) -> Result<(DegreeSpectrum<T>, Vec<SingularReport<T>>)> {
    let mut spectrum = scan_degrees(g, cfg)?;
    let mut reports = Vec::new();
    for s in g.singular_degrees(cfg.alpha_max) {
        let rep = singular_analysis(g, s.alpha)?;
        if rep.balanced_dim > 0 {
            let map: Vec<usize> = g
                .vertex_ids()
                .iter()
                .map(|id| rep.subdivided.vertex_index(id).expect("original vertex kept"))
                .collect();
            spectrum.entries.push(DegreeEntry {
                alpha: rep.alpha,
                multiplicity: rep.balanced_dim,
                kind: DegreeKind::Singular,
                kernel: rep.generators.iter().map(|gen| map.iter().map(|&i| gen.rho[i]).collect()).collect(),
                admissible: None,
            });
        }
        reports.push(rep);
    }
    spectrum
        .entries
        .sort_by(|a, b| a.alpha.partial_cmp(&b.alpha).expect("finite"));
    Ok((spectrum, reports))
}

/// Degrees predicted by `1 − cos(α θ₀) ∈ spec(ℒ) ∩ (0, 2)` for a constant angle `θ₀`.
pub fn constant_theta_degrees<T: Real>(g: &ConeGraph<T>, alpha_max: T) -> Result<Vec<ConstantThetaDegree<T>>> {
    g.ensure_standard()?;
    let theta0 = g.constant_theta(T::tol(1e-12)).ok_or(Error::NonConstantTheta)?;
    let ev = eigenvalues_sym(&normalized_laplacian(g))?;
    let band = T::tol(1e-9);
    let mut clusters: Vec<(T, usize)> = Vec::new();
    for &l in &ev {
        if l <= band || l >= T::lit(2.0) - band {
            continue;
        }
        match clusters.last_mut() {
            Some((c, m)) if (l - *c).abs() <= T::tol(1e-8) => *m += 1,
            _ => clusters.push((l, 1)),
        }
    }
    let mut out = Vec::new();
    for (lambda, multiplicity) in clusters {
        let x0 = (T::one() - lambda).acos();
        let mut k = 0u32;
        loop {
            let base = two_pi::<T>() * T::lit(k as f64);
            let lo = (base + x0) / theta0;
            if lo > alpha_max {
                break;
            }
            out.push(ConstantThetaDegree {
                alpha: lo,
                multiplicity,
                laplacian_eigenvalue: lambda,
            });
            let hi = (base + two_pi::<T>() - x0) / theta0;
            if hi <= alpha_max {
                out.push(ConstantThetaDegree {
                    alpha: hi,
                    multiplicity,
                    laplacian_eigenvalue: lambda,
                });
            }
            k += 1;
        }
    }
    out.sort_by(|a, b| a.alpha.partial_cmp(&b.alpha).expect("finite"));
    Ok(out)
}

/// Lower bound on every Euclidean degree from the first positive eigenvalue of ℒ.
pub fn lower_bound_euclid<T: Real>(g: &ConeGraph<T>) -> Result<T> {
    g.ensure_standard()?;
    let n = g.vertex_count();
    let tmax = g.theta_max();
    if g.structure().is_complete {
        let nn = T::lit(n as f64);
        return Ok(T::lit(2.0) / tmax * (nn / (nn - T::one())).atan());
    }
    let ev = eigenvalues_sym(&normalized_laplacian(g))?;
    let lambda1 = ev
        .iter()
        .copied()
        .find(|&l| l > T::tol(1e-9))
        .ok_or_else(|| Error::InvalidArgument("graph has no positive Laplacian eigenvalue".into()))?;
    Ok((T::one() - lambda1).max(-T::one()).acos() / tmax)
}

/// The weighted Laplacian with weights `1/θ(e)`, positive semidefinite.
/// `α Δ_{αθ}` converges to its negative as `α → 0` with an `O(α²)` error.
pub fn limit_operator_alpha0<T: Real>(g: &ConeGraph<T>) -> Result<SymMatrix<T>> {
    g.ensure_standard()?;
    Ok(weighted_laplacian(g, |k| T::one() / g.edge(k).theta))
}

/// Samples the sorted spectrum of `Δ_{αθ}` at `n` equally spaced points of `[a, b]`.
pub fn eigen_curves<T: Real>(g: &ConeGraph<T>, a: T, b: T, n: usize) -> Result<EigenCurves<T>> {
    g.ensure_standard()?;
    if n == 0 || !(b >= a) || !(a > T::zero()) {
        return Err(Error::InvalidArgument("need 0 < a <= b and at least one sample".into()));
    }
    check_alpha(g, b)?;
    let guard = T::loose_tol(1e-9);
    for s in g.singular_degrees(b + guard) {
        if s.alpha >= a - guard {
            return Err(Error::SingularAlpha {
                alpha: s.alpha.as_f64(),
                singular: s.alpha.as_f64(),
                guard: guard.as_f64(),
                edge: g.edge(s.witnesses[0].edge).id.clone(),
            });
        }
    }
    let alphas: Vec<T> = (0..n)
        .map(|i| {
            if n == 1 {
                a
            } else if i + 1 == n {
                b
            } else {
                a + (b - a) * T::lit(i as f64 / (n - 1) as f64)
            }
        })
        .collect();
    let values = alphas
        .iter()
        .map(|&al| eigenvalues_sym(&delta_unchecked(g, al, |_| false)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenCurves { alphas, values })
}
