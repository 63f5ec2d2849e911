use serde::Serialize;

use crate::error::{Error, Result};
use crate::euclid::{singular_analysis, DegreeKind, DegreeSpectrum};
use crate::graph::ConeGraph;
use crate::laplacian::weighted_laplacian;
use crate::linalg::{dot, kernel_basis};
use crate::scalar::Real;

use super::face::{evaluate_face, FaceData};
use super::mesh::Pencil;

fn check_len<T: Real>(p: &Pencil<T>, f: &[T]) -> Result<()> {
    if f.len() != p.dim() {
        return Err(Error::InvalidArgument(format!(
            "mesh function has {} values, the mesh has {}",
            f.len(),
            p.dim()
        )));
    }
    Ok(())
}

/// `Σ_e ∫|ρ_e'|² / Σ_e ∫ρ_e²` for the piecewise linear interpolant of `f`,
/// with the trapezoid rule in the denominator.
pub fn rayleigh<T: Real>(p: &Pencil<T>, f: &[T]) -> Result<T> {
    check_len(p, f)?;
    let den: T = p.mass().iter().zip(f).map(|(&w, &x)| w * x * x).sum();
    if !(den > T::zero()) {
        return Err(Error::ZeroFunction);
    }
    Ok(dot(f, &p.apply_stiffness(f)) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallAverage<T> {
    pub alpha: T,
    /// `Σ_e ∫ ρ_e`.
    pub integral: T,
    /// Discrete `L²` norm of `ρ`.
    pub norm: T,
    /// `Σ_e θ(e)`.
    pub total_angle: T,
    /// `|integral| / (norm · √total_angle)`.
    pub relative: T,
}

impl<T: Real> BallAverage<T> {
    /// Integral of `r^α ρ` over the ball of radius `r` about the cone point.
    pub fn ball_integral(&self, r: T) -> T {
        let e = self.alpha + T::lit(2.0);
        self.integral * r.powf(e) / e
    }
}

/// Edge integral of an eigenfunction of degree `alpha > 0`.
pub fn ball_average<T: Real>(p: &Pencil<T>, f: &[T], alpha: T) -> Result<BallAverage<T>> {
    check_len(p, f)?;
    if !(alpha > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} must be positive; the constant mode has nonzero average"
        )));
    }
    let integral: T = p.mass().iter().zip(f).map(|(&w, &x)| w * x).sum();
    let norm = p.mass().iter().zip(f).map(|(&w, &x)| w * x * x).sum::<T>().sqrt();
    if !(norm > T::zero()) {
        return Err(Error::ZeroFunction);
    }
    let total_angle: T = p.mesh.edges.iter().map(|e| e.theta).sum();
    Ok(BallAverage {
        alpha,
        integral,
        norm,
        total_angle,
        relative: integral.abs() / (norm * total_angle.sqrt()),
    })
}

/// Part of an edge profile on the parameter interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePiece<T> {
    pub start: T,
    pub end: T,
    pub data: FaceData<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeProfile<T> {
    pub edge: String,
    pub theta: T,
    pub pieces: Vec<ProfilePiece<T>>,
}

/// One eigenfunction `ρ` on the link, stored through its face data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeProfile<T> {
    pub alpha: T,
    pub edges: Vec<EdgeProfile<T>>,
}

impl<T: Real> ModeProfile<T> {
    /// `ρ_e(s)` for `0 ≤ s ≤ θ(e)`.
    pub fn value(&self, edge: usize, s: T) -> Result<T> {
        let prof = self
            .edges
            .get(edge)
            .ok_or_else(|| Error::UnknownEdge(format!("#{edge}")))?;
        let piece = prof
            .pieces
            .iter()
            .find(|p| s <= p.end)
            .or(prof.pieces.last())
            .expect("profiles have pieces");
        let s = s.max(piece.start).min(piece.end);
        evaluate_face(piece.data, piece.end - piece.start, self.alpha, T::one(), s - piece.start)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatedDegree<T> {
    pub alpha: T,
    pub kind: DegreeKind,
    pub modes: Vec<ModeProfile<T>>,
}

/// Balanced separated functions `ρ(x)τ(t)` on the collapsed cone `Γ × ℝ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatedCatalog<T> {
    pub edge_ids: Vec<String>,
    pub degrees: Vec<SeparatedDegree<T>>,
}

/// A member of the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SeparatedFunction<T> {
    /// `f(x, t) = a + b t`.
    Affine { a: T, b: T },
    /// `f(x, t) = ρ(x) (c e^{αt} + d e^{−αt})` for mode `mode` of degree `degree`.
    Mode { degree: usize, mode: usize, c: T, d: T },
}

impl<T: Real> SeparatedCatalog<T> {
    pub fn evaluate(&self, f: &SeparatedFunction<T>, edge: usize, s: T, t: T) -> Result<T> {
        match *f {
            SeparatedFunction::Affine { a, b } => {
                if edge >= self.edge_ids.len() {
                    return Err(Error::UnknownEdge(format!("#{edge}")));
                }
                Ok(a + b * t)
            }
            SeparatedFunction::Mode { degree, mode, c, d } => {
                let deg = self
                    .degrees
                    .get(degree)
                    .ok_or_else(|| Error::InvalidArgument(format!("no degree #{degree}")))?;
                let prof = deg
                    .modes
                    .get(mode)
                    .ok_or_else(|| Error::InvalidArgument(format!("degree #{degree} has no mode #{mode}")))?;
                let at = deg.alpha * t;
                Ok(prof.value(edge, s)? * (c * at.exp() + d * (-at).exp()))
            }
        }
    }

    /// Members kept by the filter for behavior as `t → −∞`: the constants
    /// `a` and the modes with `d = 0`, which tend to zero.
    pub fn is_decaying(&self, f: &SeparatedFunction<T>) -> bool {
        match *f {
            SeparatedFunction::Affine { b, .. } => b == T::zero(),
            SeparatedFunction::Mode { d, .. } => d == T::zero(),
        }
    }
}

/// Catalog of separated solutions built from a spectrum of `g`.
///
/// Nonsingular entries contribute their kernel vectors. Singular entries are
/// re-analysed so that each balanced generator is stored with its `sin(αθ)`
/// coefficients on the singular edges.
pub fn separated_solutions<T: Real>(g: &ConeGraph<T>, spectrum: &DegreeSpectrum<T>) -> Result<SeparatedCatalog<T>> {
    g.ensure_standard()?;
    let mut degrees = Vec::new();
    for entry in &spectrum.entries {
        let modes = match entry.kind {
            DegreeKind::Nonsingular => entry
                .kernel
                .iter()
                .map(|rho| {
                    if rho.len() != g.vertex_count() {
                        return Err(Error::InvalidArgument("kernel vector does not match the graph".into()));
                    }
                    Ok(ModeProfile {
                        alpha: entry.alpha,
                        edges: g
                            .edges()
                            .iter()
                            .map(|e| EdgeProfile {
                                edge: e.id.clone(),
                                theta: e.theta,
                                pieces: vec![ProfilePiece {
                                    start: T::zero(),
                                    end: e.theta,
                                    data: FaceData::Regular {
                                        rho0: rho[e.tail],
                                        rho1: rho[e.head],
                                    },
                                }],
                            })
                            .collect(),
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            DegreeKind::Singular => singular_modes(g, entry.alpha)?,
        };
        degrees.push(SeparatedDegree {
            alpha: entry.alpha,
            kind: entry.kind,
            modes,
        });
    }
    Ok(SeparatedCatalog {
        edge_ids: g.edges().iter().map(|e| e.id.clone()).collect(),
        degrees,
    })
}

fn singular_modes<T: Real>(g: &ConeGraph<T>, alpha: T) -> Result<Vec<ModeProfile<T>>> {
    let rep = singular_analysis(g, alpha)?;
    let h = &rep.subdivided;
    let piece = |gen: &crate::euclid::BalancedGenerator<T>, k: usize, start: T, end: T| {
        let e = h.edge(k);
        let data = match rep.sigma.binary_search(&k) {
            Ok(c) => FaceData::Singular {
                rho0: gen.rho[e.tail],
                c2: gen.c2[c],
            },
            Err(_) => FaceData::Regular {
                rho0: gen.rho[e.tail],
                rho1: gen.rho[e.head],
            },
        };
        ProfilePiece { start, end, data }
    };
    Ok(rep
        .generators
        .iter()
        .map(|gen| ModeProfile {
            alpha: rep.alpha,
            edges: g
                .edges()
                .iter()
                .map(|e| {
                    let pieces = match rep.subdivisions.iter().find(|s| s.parent_edge == e.id) {
                        Some(sub) => sub
                            .child_edges
                            .iter()
                            .zip(&sub.offsets)
                            .map(|(c, &(a, b))| piece(gen, h.edge_index(c).expect("child"), a, b))
                            .collect(),
                        None => vec![piece(gen, h.edge_index(&e.id).expect("kept"), T::zero(), e.theta)],
                    };
                    EdgeProfile {
                        edge: e.id.clone(),
                        theta: e.theta,
                        pieces,
                    }
                })
                .collect(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacewiseLinearCheck<T> {
    /// Orthonormal kernel of the Laplacian with weights `1/θ(e)`.
    pub kernel: Vec<Vec<T>>,
    /// Whether every kernel vector is constant.
    pub constant: bool,
    /// Kernel is one-dimensional and constant, so only `f(x, t) = (x, a t + b)` remains.
    pub confirmed: bool,
}

/// Face-wise linear balanced maps between collapsed cones reduce to the kernel
/// of the `1/θ`-weighted Laplacian of `g`.
pub fn facewise_linear_check<T: Real>(g: &ConeGraph<T>) -> Result<FacewiseLinearCheck<T>> {
    g.ensure_valid()?;
    let l = weighted_laplacian(g, |k| T::one() / g.edge(k).theta);
    let tol = T::loose_tol(1e-9);
    let kernel = kernel_basis(&l, tol)?;
    let constant = kernel.iter().all(|v| {
        let mean = v.iter().copied().sum::<T>() / T::lit(v.len() as f64);
        v.iter().all(|&x| (x - mean).abs() <= tol)
    });
    let confirmed = kernel.len() == 1 && constant;
    Ok(FacewiseLinearCheck {
        kernel,
        constant,
        confirmed,
    })
}
