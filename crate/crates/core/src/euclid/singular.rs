use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{edge_components, Component, ConeGraph, Subdivision};
use crate::linalg::{nullspace, Matrix, SymMatrix};
use crate::scalar::Real;

use super::{check_alpha, delta_unchecked};

/// A balanced function at a singular degree: vertex values and the
/// coefficients `c₂` of `sin(αθ)` on the singular edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalancedGenerator<T> {
    pub rho: Vec<T>,
    pub c2: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularReport<T> {
    pub alpha: T,
    /// Edges of the input graph with `α θ(e) ∈ πℤ`, with the multiple.
    pub sigma_edges: Vec<(usize, u64)>,
    /// Input graph with every singular edge of multiple `k ≥ 2` split into `k` equal parts.
    pub subdivided: ConeGraph<T>,
    pub subdivisions: Vec<Subdivision<T>>,
    /// Edges of `subdivided` forming `Σ`; each has `α θ = π`.
    pub sigma: Vec<usize>,
    /// Orthonormal basis of `B(α) = {ρ : ρ_i = −ρ_j on Σ}` over the vertices of `subdivided`.
    pub b_basis: Vec<Vec<T>>,
    /// Limit form over the non-singular edges, in `b_basis` coordinates.
    pub q: SymMatrix<T>,
    pub balanced_dim: usize,
    pub generators: Vec<BalancedGenerator<T>>,
}

/// Signed and unsigned incidence operators of an edge set, vertices as rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryOperators<T> {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    /// `−1` at the tail and `+1` at the head.
    pub boundary: Matrix<T>,
    /// `+1` at both ends.
    pub unsigned: Matrix<T>,
    pub ker_boundary_dim: usize,
    pub ker_unsigned_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbundanceReport {
    pub abundant: bool,
    pub components: Vec<Component>,
}

/// Builds `∂` and `d` for the edges `edges` of `g`.
pub fn boundary_operators<T: Real>(g: &ConeGraph<T>, edges: &[usize]) -> Result<BoundaryOperators<T>> {
    let mut vertices: Vec<usize> = Vec::new();
    for &k in edges {
        if k >= g.edge_count() {
            return Err(Error::UnknownEdge(format!("#{k}")));
        }
        let e = g.edge(k);
        vertices.push(e.tail);
        vertices.push(e.head);
    }
    vertices.sort_unstable();
    vertices.dedup();
    let row = |v: usize| vertices.binary_search(&v).expect("endpoint");
    let mut boundary = Matrix::zeros(vertices.len(), edges.len());
    let mut unsigned = Matrix::zeros(vertices.len(), edges.len());
    for (c, &k) in edges.iter().enumerate() {
        let e = g.edge(k);
        boundary[(row(e.tail), c)] = -T::one();
        boundary[(row(e.head), c)] = T::one();
        unsigned[(row(e.tail), c)] = T::one();
        unsigned[(row(e.head), c)] = T::one();
    }
    let tol = T::loose_tol(1e-9);
    let ker_boundary_dim = nullspace(&boundary, tol)?.len();
    let ker_unsigned_dim = nullspace(&unsigned, tol)?.len();
    Ok(BoundaryOperators {
        vertices,
        edges: edges.to_vec(),
        boundary,
        unsigned,
        ker_boundary_dim,
        ker_unsigned_dim,
    })
}

struct SingularSetup<T> {
    alpha: T,
    sigma_edges: Vec<(usize, u64)>,
    subdivided: ConeGraph<T>,
    subdivisions: Vec<Subdivision<T>>,
    sigma: Vec<usize>,
}

fn setup<T: Real>(g: &ConeGraph<T>, alpha: T) -> Result<SingularSetup<T>> {
    g.ensure_standard()?;
    check_alpha(g, alpha)?;
    let snap = T::loose_tol(1e-9) * alpha.max(T::one());
    let sigma_edges = g.singular_edges_at(alpha, snap);
    if sigma_edges.is_empty() {
        return Err(Error::NotSingular(alpha.as_f64()));
    }
    let (alpha, _, _) = g.nearest_singular(alpha).expect("edges exist");
    let splits: Vec<(usize, Vec<T>)> = sigma_edges
        .iter()
        .filter(|&&(_, k)| k >= 2)
        .map(|&(e, k)| (e, vec![T::one() / T::lit(k as f64); k as usize]))
        .collect();
    let (subdivided, subdivisions) = g.subdivide_edges(&splits)?;
    let mut sigma = Vec::new();
    for &(e, k) in &sigma_edges {
        let id = &g.edge(e).id;
        if k >= 2 {
            let sub = subdivisions.iter().find(|s| &s.parent_edge == id).expect("split");
            sigma.extend(sub.child_edges.iter().map(|c| subdivided.edge_index(c).expect("child")));
        } else {
            sigma.push(subdivided.edge_index(id).expect("edge kept"));
        }
    }
    sigma.sort_unstable();
    Ok(SingularSetup {
        alpha,
        sigma_edges,
        subdivided,
        subdivisions,
        sigma,
    })
}

/// Balanced functions at a singular degree.
///
/// After subdividing, every singular edge has `α θ = π`, so its face function is
/// `ρ_tail cos(αθ) + c₂ sin(αθ)` with `ρ_head = −ρ_tail` and normal derivative
/// `α c₂` at both ends. Balancing at a vertex `i` then reads
///
/// ```text
/// Σ_{Σ-edges e ∋ i} c₂(e) + Σ_{other edges i~j} (ρ_j − cos(αθ) ρ_i) / sin(αθ) = 0
/// ```
///
/// after dividing by `α`. The dimension of the solution space of these
/// equations over `B(α) × ℝ^{E(Σ)}` is `balanced_dim`.
pub fn singular_analysis<T: Real>(g: &ConeGraph<T>, alpha: T) -> Result<SingularReport<T>> {
    let s = setup(g, alpha)?;
    let h = &s.subdivided;
    let n = h.vertex_count();
    let in_sigma = |k: usize| s.sigma.binary_search(&k).is_ok();

    let mut constraints = Matrix::zeros(s.sigma.len(), n);
    for (r, &k) in s.sigma.iter().enumerate() {
        let e = h.edge(k);
        constraints[(r, e.tail)] += T::one();
        constraints[(r, e.head)] += T::one();
    }
    let tol = T::loose_tol(1e-9);
    let b_basis = nullspace(&constraints, tol)?;
    let b = Matrix::from_columns(&b_basis);
    let rest = delta_unchecked(h, s.alpha, in_sigma);
    let q = if b_basis.is_empty() {
        SymMatrix::zeros(0)
    } else {
        rest.congruence(&b)
    };

    let nb = b_basis.len();
    let rest_b = if nb == 0 { Matrix::zeros(n, 0) } else { rest.as_matrix().matmul(&b) };
    let mut system = Matrix::zeros(n, nb + s.sigma.len());
    for i in 0..n {
        for j in 0..nb {
            system[(i, j)] = rest_b[(i, j)];
        }
    }
    for (c, &k) in s.sigma.iter().enumerate() {
        let e = h.edge(k);
        system[(e.tail, nb + c)] += T::one();
        system[(e.head, nb + c)] += T::one();
    }
    let kernel = nullspace(&system, tol)?;
    let generators = kernel
        .iter()
        .map(|v| {
            let rho = if nb == 0 { vec![T::zero(); n] } else { b.mul_vec(&v[..nb]) };
            BalancedGenerator {
                rho,
                c2: v[nb..].to_vec(),
            }
        })
        .collect();
    Ok(SingularReport {
        alpha: s.alpha,
        sigma_edges: s.sigma_edges,
        subdivided: s.subdivided.clone(),
        subdivisions: s.subdivisions,
        sigma: s.sigma,
        b_basis,
        q,
        balanced_dim: kernel.len(),
        generators,
    })
}

/// True iff some component of `Σ` (after subdivision) is bipartite with a cycle.
pub fn abundance_check<T: Real>(g: &ConeGraph<T>, alpha: T) -> Result<AbundanceReport> {
    let s = setup(g, alpha)?;
    let pairs: Vec<(usize, usize)> = s.subdivided.edges().iter().map(|e| (e.tail, e.head)).collect();
    let components = edge_components(s.subdivided.vertex_count(), &pairs, &s.sigma);
    let abundant = components.iter().any(|c| c.bipartite && c.cycle_rank >= 1);
    Ok(AbundanceReport { abundant, components })
}
