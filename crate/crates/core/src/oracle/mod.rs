//! Independent check of the degree computations through the metric graph.
//!
//! A balanced homogeneous harmonic function of degree `α` restricts to the
//! link as a function `ρ` with `ρ_e'' = −α² ρ_e` on every edge and the
//! Kirchhoff condition at every vertex. Discretizing this eigenproblem with
//! linear elements and lumped mass gives a pencil `K v = λ M v` whose
//! eigenvalues approximate `α²` with an `O(h²)` error, regardless of whether
//! `α` is a singular degree of the cone.
//!
//! Eigenvalues are counted by the inertia of `K − λM` (the interior of every
//! edge is a tridiagonal chain that eliminates in linear time), so fine meshes
//! stay cheap. Eigenfunctions come from shifted subspace inverse iteration.

mod collapsed;
mod face;
mod mesh;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use collapsed::{
    ball_average, facewise_linear_check, rayleigh, separated_solutions, BallAverage, EdgeProfile, FacewiseLinearCheck,
    ModeProfile, ProfilePiece, SeparatedCatalog, SeparatedDegree, SeparatedFunction,
};
pub use face::{evaluate_face, evaluate_face_map, face_coefficients, FaceData};
pub use mesh::{discretize, Mesh, MeshEdge, Pencil, MIN_SEGMENTS};

use crate::error::{Error, Result};
use crate::graph::ConeGraph;
use crate::linalg::{dot, eig_sym, SymMatrix};
use crate::scalar::Real;
use crate::scan::locate_drops;

/// Smallest mesh accepted by [`oracle_degrees`]; the Richardson estimate uses `m/2`.
pub const MIN_ORACLE_SEGMENTS: usize = 16;

/// Seed of the deterministic starting blocks for inverse iteration.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleDegree<T> {
    /// Richardson-extrapolated degree.
    pub alpha: T,
    /// Degree on the requested mesh, `√λ`.
    pub alpha_raw: T,
    pub multiplicity: usize,
    /// Mean discrete eigenvalue of the cluster.
    pub lambda: T,
    pub lambda_extrapolated: T,
    /// Estimated error of `alpha_raw`.
    pub error_estimate: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleEigenfunction<T> {
    pub alpha: T,
    pub lambda: T,
    /// Index into [`OracleResult::degrees`], or `None` for the constant mode.
    pub degree: Option<usize>,
    /// Nodal values, normalized to unit discrete `L²` norm.
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult<T> {
    pub m: usize,
    /// Discrete eigenvalues on the requested mesh, ascending, with repetition.
    pub eigenvalues: Vec<T>,
    /// Richardson-extrapolated eigenvalues, index-paired with `eigenvalues`.
    pub extrapolated: Vec<T>,
    /// Estimated absolute error of each entry of `eigenvalues`.
    pub error_estimates: Vec<T>,
    pub zero_multiplicity: usize,
    pub degrees: Vec<OracleDegree<T>>,
    pub eigenfunctions: Vec<OracleEigenfunction<T>>,
    #[serde(skip)]
    pub pencil: Pencil<T>,
}

impl<T: Real> OracleResult<T> {
    /// Degrees repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<T> {
        self.degrees
            .iter()
            .flat_map(|d| std::iter::repeat(d.alpha).take(d.multiplicity))
            .collect()
    }

    /// `(edge id, arclength, value)` samples of eigenfunction `k`.
    pub fn samples(&self, k: usize) -> Vec<(String, T, T)> {
        self.pencil.mesh.samples(&self.eigenfunctions[k].values)
    }
}

/// Every eigenvalue of the pencil not exceeding `lambda_max`, ascending, with repetition.
pub fn pencil_eigenvalues<T: Real>(p: &Pencil<T>, lambda_max: T) -> Result<Vec<T>> {
    let tol = T::tol(1e-12) * lambda_max.max(T::one());
    let count = |x: T| -> Result<i64> { Ok(-(p.count_below(x)? as i64)) };
    let drops = locate_drops(-T::one(), lambda_max, 64, tol, &count)?;
    Ok(drops
        .into_iter()
        .flat_map(|(x, k)| std::iter::repeat(x).take(k))
        .collect())
}

fn zero_band<T: Real>() -> T {
    T::loose_tol(1e-9)
}

fn cluster_degrees<T: Real>(raw: &[T], extrapolated: &[T], errors: &[T], alpha_max: T) -> Vec<OracleDegree<T>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..raw.len() {
        if raw[k] <= zero_band() {
            continue;
        }
        let joined = clusters.last().map_or(false, |c| {
            let mean = c.iter().map(|&i| extrapolated[i]).sum::<T>() / T::lit(c.len() as f64);
            let err = c.iter().map(|&i| errors[i]).fold(errors[k], T::max);
            let floor = T::tol(1e-10) * mean.max(T::one());
            extrapolated[k] - mean <= T::lit(10.0) * err.max(floor)
        });
        if joined {
            clusters.last_mut().expect("nonempty").push(k);
        } else {
            clusters.push(vec![k]);
        }
    }
    clusters
        .into_iter()
        .map(|c| {
            let n = T::lit(c.len() as f64);
            let lambda = c.iter().map(|&i| raw[i]).sum::<T>() / n;
            let lambda_x = c.iter().map(|&i| extrapolated[i]).sum::<T>() / n;
            let alpha = lambda_x.max(T::zero()).sqrt();
            let alpha_raw = lambda.sqrt();
            OracleDegree {
                alpha,
                alpha_raw,
                multiplicity: c.len(),
                lambda,
                lambda_extrapolated: lambda_x,
                error_estimate: (alpha - alpha_raw).abs(),
            }
        })
        .filter(|d| d.alpha <= alpha_max)
        .collect()
}

fn spectrum_with_estimates<T: Real>(g: &ConeGraph<T>, m: usize, alpha_max: T) -> Result<OracleResult<T>> {
    g.ensure_valid()?;
    if m < MIN_ORACLE_SEGMENTS {
        return Err(Error::MeshTooCoarse {
            m,
            min: MIN_ORACLE_SEGMENTS,
        });
    }
    if !(alpha_max > T::zero()) || !alpha_max.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha_max = {alpha_max} must be positive")));
    }
    let reach = alpha_max * T::lit(1.01) + T::lit(0.01);
    let lambda_max = reach * reach;
    let fine = discretize(g, m)?;
    let coarse = discretize(g, m / 2)?;
    let raw = pencil_eigenvalues(&fine, lambda_max)?;
    let rough = pencil_eigenvalues(&coarse, lambda_max)?;
    if rough.len() < raw.len() {
        return Err(Error::Accuracy(format!(
            "coarse mesh m = {} resolves fewer eigenvalues than m = {m}",
            m / 2
        )));
    }
    let ratio = T::lit(m as f64 / (m / 2) as f64);
    let denom = ratio * ratio - T::one();
    let mut extrapolated = Vec::with_capacity(raw.len());
    let mut errors = Vec::with_capacity(raw.len());
    for (k, &l) in raw.iter().enumerate() {
        let err = (rough[k] - l) / denom;
        extrapolated.push(l - err);
        errors.push(err.abs());
    }
    let zero_multiplicity = raw.iter().filter(|&&l| l.abs() <= zero_band()).count();
    if raw.iter().any(|&l| l < -zero_band::<T>()) {
        return Err(Error::Accuracy("pencil has a negative eigenvalue".into()));
    }
    let degrees = cluster_degrees(&raw, &extrapolated, &errors, alpha_max);
    Ok(OracleResult {
        m,
        eigenvalues: raw,
        extrapolated,
        error_estimates: errors,
        zero_multiplicity,
        degrees,
        eigenfunctions: Vec::new(),
        pencil: fine,
    })
}

/// Degrees `α ≤ alpha_max` of the metric-graph eigenproblem on a mesh with `m`
/// segments per edge, with multiplicities and Richardson error estimates.
pub fn oracle_degrees<T: Real>(g: &ConeGraph<T>, m: usize, alpha_max: T) -> Result<OracleResult<T>> {
    spectrum_with_estimates(g, m, alpha_max)
}

/// Like [`oracle_degrees`], also computing an `M`-orthonormal eigenbasis for
/// the constant mode and every degree.
pub fn oracle_eigenfunctions<T: Real>(g: &ConeGraph<T>, m: usize, alpha_max: T, seed: u64) -> Result<OracleResult<T>> {
    let mut res = spectrum_with_estimates(g, m, alpha_max)?;
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if res.zero_multiplicity > 0 {
        for (lambda, values) in cluster_basis(&res.pencil, T::zero(), res.zero_multiplicity, &mut rng)? {
            out.push(OracleEigenfunction {
                alpha: T::zero(),
                lambda,
                degree: None,
                values,
            });
        }
    }
    for (k, d) in res.degrees.iter().enumerate() {
        for (lambda, values) in cluster_basis(&res.pencil, d.lambda, d.multiplicity, &mut rng)? {
            out.push(OracleEigenfunction {
                alpha: lambda.max(T::zero()).sqrt(),
                lambda,
                degree: Some(k),
                values,
            });
        }
    }
    res.eigenfunctions = out;
    Ok(res)
}

fn m_dot<T: Real>(mass: &[T], a: &[T], b: &[T]) -> T {
    mass.iter().zip(a).zip(b).map(|((&w, &x), &y)| w * x * y).sum()
}

fn m_orthonormalize<T: Real>(mass: &[T], block: &mut [Vec<T>]) -> Result<()> {
    for _ in 0..2 {
        for i in 0..block.len() {
            let (done, rest) = block.split_at_mut(i);
            let v = &mut rest[0];
            for u in done.iter() {
                let c = m_dot(mass, u, v);
                v.iter_mut().zip(u).for_each(|(x, &y)| *x -= c * y);
            }
            let n = m_dot(mass, v, v).sqrt();
            if !(n > T::zero()) || !n.is_finite() {
                return Err(Error::Accuracy("inverse iteration lost a direction".into()));
            }
            v.iter_mut().for_each(|x| *x /= n);
        }
    }
    Ok(())
}

/// `M`-orthonormal eigenvectors for the `mult` eigenvalues clustered at `lambda`,
/// with their Rayleigh quotients, ascending.
fn cluster_basis<T: Real>(p: &Pencil<T>, lambda: T, mult: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(T, Vec<T>)>> {
    let n = p.dim();
    let sigma = lambda + T::lit(1e-7) * lambda.abs().max(T::one());
    let mut block: Vec<Vec<T>> = (0..mult)
        .map(|_| (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect())
        .collect();
    m_orthonormalize(p.mass(), &mut block)?;
    for _ in 0..6 {
        for v in block.iter_mut() {
            let rhs: Vec<T> = v.iter().zip(p.mass()).map(|(&x, &w)| w * x).collect();
            *v = p.solve_shifted(sigma, &rhs)?;
        }
        m_orthonormalize(p.mass(), &mut block)?;
    }
    let kx: Vec<Vec<T>> = block.iter().map(|v| p.apply_stiffness(v)).collect();
    let small = SymMatrix::from_fn(mult, |i, j| dot(&block[i], &kx[j]));
    let eig = eig_sym(&small)?;
    let mut out = Vec::with_capacity(mult);
    for k in 0..mult {
        let c = eig.vector(k);
        let mut v = vec![T::zero(); n];
        for (j, b) in block.iter().enumerate() {
            v.iter_mut().zip(b).for_each(|(x, &y)| *x += c[j] * y);
        }
        let s = m_dot(p.mass(), &v, &v).sqrt();
        let pivot = v.iter().copied().fold(T::zero(), |a, x| if x.abs() > a.abs() { x } else { a });
        let sign = if pivot < T::zero() { -T::one() } else { T::one() };
        v.iter_mut().for_each(|x| *x = *x * sign / s);
        out.push((eig.values[k], v));
    }
    Ok(out)
}

/// One eigenvalue of a reference problem tracked across two meshes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceSample<T> {
    pub exact: T,
    pub error_coarse: T,
    pub error_fine: T,
    /// `log₂(error_coarse / error_fine)`.
    pub order: T,
}

/// Observed convergence order of the first positive degrees against known
/// values `exact` (ascending, with repetition), comparing `m` with `2m`.
pub fn observed_orders<T: Real>(g: &ConeGraph<T>, exact: &[T], m: usize) -> Result<Vec<ConvergenceSample<T>>> {
    g.ensure_valid()?;
    let top = exact.iter().copied().fold(T::zero(), T::max) * T::lit(1.05) + T::lit(0.1);
    let positive = |mm: usize| -> Result<Vec<T>> {
        let p = discretize(g, mm)?;
        Ok(pencil_eigenvalues(&p, top * top)?
            .into_iter()
            .filter(|&l| l > zero_band())
            .map(|l| l.sqrt())
            .collect())
    };
    let (coarse, fine) = (positive(m)?, positive(2 * m)?);
    if coarse.len() < exact.len() || fine.len() < exact.len() {
        return Err(Error::Accuracy("mesh did not resolve every reference degree".into()));
    }
    Ok(exact
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let (ec, ef) = ((coarse[k] - a).abs(), (fine[k] - a).abs());
            ConvergenceSample {
                exact: a,
                error_coarse: ec,
                error_fine: ef,
                order: (ec / ef).log2(),
            }
        })
        .collect())
}
