//! Harmonic and p-harmonic maps from a smooth cone (a cycle graph) into a k-pod.
//!
//! A balanced map visits the pod legs `n ≥ 2` times around the cycle, each visit
//! covering an arc of total angle exactly `π/α`; hence `α = nπ/T` with `T` the
//! cone angle. The `p`-harmonic analogue on a sector is governed by the
//! equation solved in [`p_harmonic_degree`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ConeGraph;
use crate::scalar::{pi, two_pi, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurvatureClass {
    /// `T = 2π`.
    #[serde(rename = "flat")]
    Flat,
    /// `T < 2π`.
    #[serde(rename = "positive")]
    Positive,
    /// `2π < T ≤ 3π`.
    #[serde(rename = "leq3pi")]
    Leq3Pi,
    /// `T > 3π`.
    #[serde(rename = "negative")]
    Negative,
}

pub fn classify<T: Real>(total: T) -> CurvatureClass {
    let tp = two_pi::<T>();
    let tol = T::tol(1e-12) * tp;
    if (total - tp).abs() <= tol {
        CurvatureClass::Flat
    } else if total < tp {
        CurvatureClass::Positive
    } else if total <= T::lit(3.0) * pi::<T>() + tol {
        CurvatureClass::Leq3Pi
    } else {
        CurvatureClass::Negative
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPodDegree<T> {
    pub visits: usize,
    pub alpha: T,
    pub classification: CurvatureClass,
}

/// A k-pod problem: cone, number of legs, visits and optional exponent `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct KPodProblem<T> {
    pub cone: ConeGraph<T>,
    pub k: usize,
    pub visits: usize,
    pub p: Option<T>,
}

impl<T: Real> KPodProblem<T> {
    /// `visits · π / T`.
    pub fn harmonic_degree(&self) -> Result<T> {
        let order = cycle_order(&self.cone)?;
        if self.visits < 2 {
            return Err(Error::InvalidArgument("a balanced map needs at least two visits".into()));
        }
        Ok(T::lit(self.visits as f64) * pi::<T>() / order.total)
    }
}

/// The cycle traversed from its smallest vertex: `vertices[i] -(edges[i])-> vertices[i+1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleOrder<T> {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub total: T,
}

pub fn cycle_order<T: Real>(g: &ConeGraph<T>) -> Result<CycleOrder<T>> {
    g.ensure_valid()?;
    let n = g.vertex_count();
    if g.edge_count() != n || (0..n).any(|v| g.degree(v) != 2) {
        return Err(Error::NotACycle);
    }
    let mut vertices = vec![0];
    let mut edges = Vec::new();
    let mut used = vec![false; g.edge_count()];
    let mut at = 0;
    for _ in 0..n {
        let (k, next) = g
            .incident(at)
            .find(|&(k, _)| !used[k])
            .ok_or(Error::NotACycle)?;
        used[k] = true;
        edges.push(k);
        at = next;
        vertices.push(at);
    }
    if at != 0 {
        return Err(Error::NotACycle);
    }
    vertices.pop();
    Ok(CycleOrder {
        vertices,
        edges,
        total: g.total_angle(),
    })
}

/// `α_n = nπ/T` for `n = 2..=visits_max`.
pub fn harmonic_kpod_degrees<T: Real>(g: &ConeGraph<T>, visits_max: usize) -> Result<Vec<KPodDegree<T>>> {
    let order = cycle_order(g)?;
    let classification = classify(order.total);
    Ok((2..=visits_max)
        .map(|n| KPodDegree {
            visits: n,
            alpha: T::lit(n as f64) * pi::<T>() / order.total,
            classification,
        })
        .collect())
}

/// Consecutive arcs of the cycle, each of total angle `π/α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcCertificate<T> {
    pub target: T,
    /// Vertex ids where arcs begin, starting with the chosen start vertex.
    pub boundaries: Vec<String>,
    pub arc_angles: Vec<T>,
}

/// Looks for a partition of the cycle into `≥ 2` consecutive arcs of angle `π/α`
/// (within `1e-9`). Starts are tried in increasing vertex order.
pub fn balanced_kpod_exists<T: Real>(g: &ConeGraph<T>, alpha: T) -> Result<Option<ArcCertificate<T>>> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be positive")));
    }
    let order = cycle_order(g)?;
    let target = pi::<T>() / alpha;
    let tol = T::tol(1e-9);
    let arcs = order.total / target;
    if (arcs - arcs.round()).abs() * target > tol || arcs.round() < T::lit(2.0) {
        return Ok(None);
    }
    let n = order.vertices.len();
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&i| order.vertices[i]);
    'start: for s in starts {
        let mut boundaries = vec![g.vertex_id(order.vertices[s]).to_string()];
        let mut arc_angles = Vec::new();
        let mut acc = T::zero();
        for step in 0..n {
            let pos = (s + step) % n;
            acc += g.edge(order.edges[pos]).theta;
            if (acc - target).abs() <= tol {
                arc_angles.push(acc);
                acc = T::zero();
                if step + 1 < n {
                    boundaries.push(g.vertex_id(order.vertices[(pos + 1) % n]).to_string());
                }
            } else if acc > target + tol {
                continue 'start;
            }
        }
        if acc.abs() <= tol && arc_angles.len() >= 2 {
            return Ok(Some(ArcCertificate {
                target,
                boundaries,
                arc_angles,
            }));
        }
    }
    Ok(None)
}

fn p_harmonic_lhs<T: Real>(alpha: T, c: T) -> T {
    (alpha - T::one()) / (alpha * alpha + c * alpha).sqrt()
}

/// Solves `1 − θ₀/π = (α − 1)/√(α² + ((2 − p)/(p − 1)) α)` by bisection.
pub fn p_harmonic_degree<T: Real>(theta0: T, p: T) -> Result<T> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p = {p} must exceed 1")));
    }
    if !(theta0 > T::zero() && theta0 < two_pi::<T>()) {
        return Err(Error::InvalidArgument(format!("theta0 = {theta0} must lie in (0, 2pi)")));
    }
    let two = T::lit(2.0);
    let c = (two - p) / (p - T::one());
    let target = T::one() - theta0 / pi::<T>();
    let mut lo = ((p - two) / (p - T::one()) + T::lit(1e-12)).max(T::lit(1e-9));
    let mut hi = T::lit(1e6);
    if p_harmonic_lhs(hi, c) < target {
        return Err(Error::Accuracy(format!("no root below 1e6 for theta0 = {theta0}")));
    }
    for _ in 0..200 {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if p_harmonic_lhs(mid, c) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / two)
}

/// The `p`-harmonic degree at `θ₀ = 2π/3` in closed form.
pub fn p_harmonic_closed_form<T: Real>(p: T) -> Result<T> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p = {p} must exceed 1")));
    }
    let (l, s) = (T::lit(17.0), T::lit(16.0));
    let disc = p * p + T::lit(32.0) * p - T::lit(32.0);
    Ok((l * p - s + disc.sqrt()) / (s * (p - T::one())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PHarmonicBound<T> {
    pub p: T,
    pub value: T,
    /// Limit of the bound as `p → ∞`.
    pub limit: T,
}

/// Lower bound on the degree of a `p`-harmonic map from a flat cone into a tripod.
pub fn p_harmonic_kpod_bound<T: Real>(p: T) -> Result<PHarmonicBound<T>> {
    Ok(PHarmonicBound {
        p,
        value: p_harmonic_closed_form(p)?,
        limit: T::lit(9.0 / 8.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_cycle_degrees() {
        let g = ConeGraph::<f64>::cycle(6, PI / 3.0).unwrap();
        let d = harmonic_kpod_degrees(&g, 4).unwrap();
        assert!((d[0].alpha - 1.0).abs() < 1e-15);
        assert!((d[1].alpha - 1.5).abs() < 1e-15);
        assert!(d.iter().all(|x| x.classification == CurvatureClass::Flat));
        let cert = balanced_kpod_exists(&g, 1.5).unwrap().unwrap();
        assert_eq!(cert.boundaries, vec!["v000", "v002", "v004"]);
    }

    #[test]
    fn uneven_arcs() {
        let g = ConeGraph::<f64>::from_edge_list(4, &[(0, 1, 0.5), (1, 2, 1.2), (2, 3, 0.7), (3, 0, 0.6)]).unwrap();
        // No start splits 0.5, 1.2, 0.7, 0.6 into two arcs of 1.5.
        assert!(balanced_kpod_exists(&g, PI / 1.5).unwrap().is_none());
        let h = ConeGraph::<f64>::from_edge_list(4, &[(0, 1, 0.5), (1, 2, 1.0), (2, 3, 0.9), (3, 0, 0.6)]).unwrap();
        let c = balanced_kpod_exists(&h, PI / 1.5).unwrap().unwrap();
        assert_eq!(c.boundaries, vec!["v000", "v002"]);
    }

    #[test]
    fn non_cycle_rejected() {
        let g = ConeGraph::<f64>::path(3, 1.0).unwrap();
        assert_eq!(harmonic_kpod_degrees(&g, 3).unwrap_err(), Error::NotACycle);
    }

    #[test]
    fn p_harmonic_values() {
        assert!((p_harmonic_degree(2.0 * PI / 3.0, 2.0).unwrap() - 1.5).abs() < 1e-12);
        let p3 = (35.0 + 73f64.sqrt()) / 32.0;
        assert!((p_harmonic_degree(2.0 * PI / 3.0, 3.0).unwrap() - p3).abs() < 1e-12);
        assert!((p_harmonic_closed_form(10.0).unwrap() - (154.0 + 388f64.sqrt()) / 144.0).abs() < 1e-15);
        assert!(p_harmonic_kpod_bound(1.0).is_err());
    }
}
