use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ConeGraph;
use crate::linalg::{negative_count, solve, Matrix, SymMatrix};
use crate::scalar::Real;

/// Smallest number of segments per edge accepted by [`discretize`].
pub const MIN_SEGMENTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshEdge<T> {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub theta: T,
    pub h: T,
    /// Global index of the first interior node.
    pub offset: usize,
}

/// Uniform mesh of the metric graph: `m` segments per edge, vertex nodes
/// first, then the `m − 1` interior nodes of each edge in edge order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh<T> {
    pub segments: usize,
    pub vertex_count: usize,
    pub edges: Vec<MeshEdge<T>>,
    pub dim: usize,
}

impl<T: Real> Mesh<T> {
    /// Global index of node `k ∈ 0..=m` along edge `e` (0 is the tail).
    pub fn node(&self, e: usize, k: usize) -> usize {
        let me = &self.edges[e];
        if k == 0 {
            me.tail
        } else if k == self.segments {
            me.head
        } else {
            me.offset + k - 1
        }
    }

    pub fn h_max(&self) -> T {
        self.edges.iter().fold(T::zero(), |m, e| m.max(e.h))
    }

    /// `(edge id, arclength from tail, value)` for every node of every edge.
    pub fn samples(&self, values: &[T]) -> Vec<(String, T, T)> {
        let mut out = Vec::new();
        for (e, me) in self.edges.iter().enumerate() {
            for k in 0..=self.segments {
                out.push((me.id.clone(), me.h * T::lit(k as f64), values[self.node(e, k)]));
            }
        }
        out
    }
}

/// The generalized eigenproblem `K v = λ M v` of linear elements with lumped
/// mass on the mesh. `K` contributes `(1/h)[[1, −1], [−1, 1]]` per segment and
/// `M` contributes `h/2` to both ends of each segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pencil<T> {
    pub mesh: Mesh<T>,
    mass: Vec<T>,
}

pub fn discretize<T: Real>(g: &ConeGraph<T>, m: usize) -> Result<Pencil<T>> {
    g.ensure_standard()?;
    if m < MIN_SEGMENTS {
        return Err(Error::MeshTooCoarse { m, min: MIN_SEGMENTS });
    }
    let nv = g.vertex_count();
    let mut offset = nv;
    let mut edges = Vec::new();
    for e in g.edges() {
        edges.push(MeshEdge {
            id: e.id.clone(),
            tail: e.tail,
            head: e.head,
            theta: e.theta,
            h: e.theta / T::lit(m as f64),
            offset,
        });
        offset += m - 1;
    }
    let mesh = Mesh {
        segments: m,
        vertex_count: nv,
        edges,
        dim: offset,
    };
    let mut mass = vec![T::zero(); mesh.dim];
    let half = T::lit(0.5);
    for e in 0..mesh.edges.len() {
        let h = mesh.edges[e].h;
        for k in 0..m {
            mass[mesh.node(e, k)] += h * half;
            mass[mesh.node(e, k + 1)] += h * half;
        }
    }
    Ok(Pencil { mesh, mass })
}

/// Solves a tridiagonal system with partial pivoting; `sub`, `diag`, `sup` are overwritten.
fn solve_tridiagonal<T: Real>(sub: &mut [T], diag: &mut [T], sup: &mut [T], b: &mut [T]) {
    let n = diag.len();
    let scale = diag.iter().chain(sup.iter()).fold(T::zero(), |m, &x| m.max(x.abs()));
    let nudge = |x: T| if x == T::zero() { T::epsilon() * scale } else { x };
    if n == 1 {
        b[0] = b[0] / nudge(diag[0]);
        return;
    }
    // sub[i] becomes the second superdiagonal after row interchanges.
    for i in 0..n - 1 {
        if diag[i].abs() >= sub[i].abs() {
            let d = nudge(diag[i]);
            diag[i] = d;
            let fact = sub[i] / d;
            diag[i + 1] -= fact * sup[i];
            b[i + 1] = b[i + 1] - fact * b[i];
            sub[i] = T::zero();
        } else {
            let fact = diag[i] / sub[i];
            diag[i] = sub[i];
            let temp = diag[i + 1];
            diag[i + 1] = sup[i] - fact * temp;
            if i + 2 < n {
                sub[i] = sup[i + 1];
                sup[i + 1] = -fact * sub[i];
            } else {
                sub[i] = T::zero();
            }
            sup[i] = temp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    diag[n - 1] = nudge(diag[n - 1]);
    b[n - 1] = b[n - 1] / diag[n - 1];
    b[n - 2] = (b[n - 2] - sup[n - 2] * b[n - 1]) / diag[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - sup[i] * b[i + 1] - sub[i] * b[i + 2]) / diag[i];
    }
}

impl<T: Real> Pencil<T> {
    pub fn dim(&self) -> usize {
        self.mesh.dim
    }

    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    pub fn apply_stiffness(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim()];
        let m = self.mesh.segments;
        for e in 0..self.mesh.edges.len() {
            let w = T::one() / self.mesh.edges[e].h;
            for k in 0..m {
                let (a, b) = (self.mesh.node(e, k), self.mesh.node(e, k + 1));
                let d = w * (x[a] - x[b]);
                y[a] += d;
                y[b] -= d;
            }
        }
        y
    }

    /// Dense `K`; intended for small meshes.
    pub fn stiffness_dense(&self) -> SymMatrix<T> {
        let mut k = SymMatrix::zeros(self.dim());
        let m = self.mesh.segments;
        for e in 0..self.mesh.edges.len() {
            let w = T::one() / self.mesh.edges[e].h;
            for s in 0..m {
                let (a, b) = (self.mesh.node(e, s), self.mesh.node(e, s + 1));
                k.add_sym(a, a, w);
                k.add_sym(b, b, w);
                k.add_sym(a, b, -w);
            }
        }
        k
    }

    /// `M^{-1/2} K M^{-1/2}`, dense.
    pub fn reduced_dense(&self) -> SymMatrix<T> {
        let k = self.stiffness_dense();
        let s: Vec<T> = self.mass.iter().map(|&x| T::one() / x.sqrt()).collect();
        SymMatrix::from_fn(self.dim(), |i, j| k.get(i, j) * s[i] * s[j])
    }

    /// Number of eigenvalues of the pencil strictly below `lambda`: the inertia
    /// of `K − λM`, obtained from the pivots of every interior chain and the
    /// eigenvalues of the Schur complement on the vertex nodes and retained chain nodes.
    pub fn count_below(&self, lambda: T) -> Result<usize> {
        let plan = self.plan(lambda);
        let mut schur = SymMatrix::zeros(plan.size);
        let mut negatives = 0usize;
        for (me, c) in self.mesh.edges.iter().zip(&plan.chains) {
            negatives += c.negatives;
            let o2 = c.o * c.o;
            schur.add_sym(me.tail, me.tail, c.end);
            schur.add_sym(me.head, me.head, c.end);
            // The chain is persymmetric, so both diagonal corners of its inverse equal 1/p_L.
            let inv_end = T::one() / c.last;
            let right = c.right(me.head);
            schur.add_sym(me.tail, me.tail, -o2 * inv_end);
            schur.add_sym(right, right, -o2 * inv_end);
            schur.add_sym(me.tail, right, -o2 * c.corner * inv_end);
            if let Some(r) = c.retained {
                schur.add_sym(r, r, c.d);
                schur.add_sym(r, me.head, c.o);
            }
        }
        Ok(negatives + negative_count(&schur)?)
    }

    /// Elimination plan of `K − λM`. A chain whose last pivot is small keeps its
    /// last interior node in the Schur system, which keeps every Schur entry bounded
    /// near the Dirichlet eigenvalues of the chain.
    fn plan(&self, lambda: T) -> Plan<T> {
        let nv = self.mesh.vertex_count;
        let n = self.mesh.segments - 1;
        let (half, two) = (T::lit(0.5), T::lit(2.0));
        let mut size = nv;
        let mut chains = Vec::with_capacity(self.mesh.edges.len());
        for me in &self.mesh.edges {
            let h = me.h;
            let d = two / h - lambda * h;
            let o = -T::one() / h;
            let tiny = T::epsilon() * (d.abs() + o.abs());
            // Pivot, corner product and negative count after n − 1 and after n rows.
            let mut p = d;
            let mut corner = T::one();
            let mut negatives = 0usize;
            let mut before = (d, T::one(), 0usize);
            for k in 0..n {
                if k > 0 {
                    corner = corner * (-o / p);
                    p = d - o * o / p;
                }
                if p == T::zero() {
                    p = tiny;
                }
                if p < T::zero() {
                    negatives += 1;
                }
                if k + 2 == n {
                    before = (p, corner, negatives);
                }
            }
            let retain = p.abs() < o.abs();
            let (last, corner_used, negatives_used, retained) = if retain {
                size += 1;
                (before.0, before.1, before.2, Some(size - 1))
            } else {
                (p, corner, negatives, None)
            };
            chains.push(ChainPlan {
                d,
                o,
                end: T::one() / h - lambda * h * half,
                len: if retain { n - 1 } else { n },
                last,
                corner: corner_used,
                negatives: negatives_used,
                retained,
            });
        }
        Plan { size, chains }
    }

    /// Solves `(K − σM) x = rhs` by eliminating the interior chains.
    pub fn solve_shifted(&self, sigma: T, rhs: &[T]) -> Result<Vec<T>> {
        let nv = self.mesh.vertex_count;
        let n = self.mesh.segments - 1;
        let plan = self.plan(sigma);
        let mut schur = Matrix::zeros(plan.size, plan.size);
        let mut vrhs = vec![T::zero(); plan.size];
        vrhs[..nv].copy_from_slice(&rhs[..nv]);
        let mut parts = Vec::with_capacity(self.mesh.edges.len());
        for (me, c) in self.mesh.edges.iter().zip(&plan.chains) {
            let len = c.len;
            let chain = |b: &mut [T]| {
                let mut sub = vec![c.o; len - 1];
                let mut sup = vec![c.o; len - 1];
                let mut diag = vec![c.d; len];
                solve_tridiagonal(&mut sub, &mut diag, &mut sup, b);
            };
            let mut z = rhs[me.offset..me.offset + len].to_vec();
            chain(&mut z);
            let mut p = vec![T::zero(); len];
            p[0] = T::one();
            chain(&mut p);
            let mut q = vec![T::zero(); len];
            q[len - 1] = T::one();
            chain(&mut q);
            let (t, b, o) = (me.tail, c.right(me.head), c.o);
            schur[(t, t)] += c.end;
            schur[(me.head, me.head)] += c.end;
            schur[(t, t)] -= o * o * p[0];
            schur[(t, b)] -= o * o * q[0];
            schur[(b, b)] -= o * o * q[len - 1];
            schur[(b, t)] -= o * o * p[len - 1];
            vrhs[t] -= o * z[0];
            vrhs[b] -= o * z[len - 1];
            if let Some(r) = c.retained {
                schur[(r, r)] += c.d;
                schur[(r, me.head)] += o;
                schur[(me.head, r)] += o;
                vrhs[r] += rhs[me.offset + n - 1];
            }
            parts.push((z, p, q));
        }
        let xs = solve(&schur, &vrhs)?;
        let mut x = vec![T::zero(); self.dim()];
        x[..nv].copy_from_slice(&xs[..nv]);
        for ((me, c), (z, p, q)) in self.mesh.edges.iter().zip(&plan.chains).zip(parts) {
            let (a, b) = (c.o * xs[me.tail], c.o * xs[c.right(me.head)]);
            for k in 0..c.len {
                x[me.offset + k] = z[k] - a * p[k] - b * q[k];
            }
            if let Some(r) = c.retained {
                x[me.offset + n - 1] = xs[r];
            }
        }
        Ok(x)
    }
}

struct ChainPlan<T> {
    d: T,
    o: T,
    /// Diagonal contribution of the chain's end segments to each end vertex.
    end: T,
    /// Number of eliminated interior nodes.
    len: usize,
    /// Last pivot of the eliminated part.
    last: T,
    /// `Π (−o/p_k)` over the eliminated pivots except the last.
    corner: T,
    negatives: usize,
    /// Index of the retained last interior node in the Schur system.
    retained: Option<usize>,
}

impl<T: Copy> ChainPlan<T> {
    /// The Schur index coupled to the far end of the eliminated part.
    fn right(&self, head: usize) -> usize {
        self.retained.unwrap_or(head)
    }
}

struct Plan<T> {
    size: usize,
    chains: Vec<ChainPlan<T>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues_sym;
    use std::f64::consts::PI;

    fn triangle() -> ConeGraph<f64> {
        ConeGraph::<f64>::from_edge_list(3, &[(0, 1, 0.9), (1, 2, 1.4), (2, 0, 0.6), (0, 1, 1.1)]).unwrap()
    }

    #[test]
    fn sizes() {
        let p = discretize(&triangle(), 8).unwrap();
        assert_eq!(p.dim(), 4 * 7 + 3);
        let total: f64 = p.mass().iter().sum();
        assert!((total - 4.0).abs() < 1e-13);
        assert!(discretize(&triangle(), 2).is_err());
    }

    #[test]
    fn counts_match_dense_spectrum() {
        let p = discretize(&triangle(), 10).unwrap();
        let ev = eigenvalues_sym(&p.reduced_dense()).unwrap();
        for lambda in [-0.5, 0.3, 1.7, 4.2, 9.9, 25.0, 60.0] {
            let dense = ev.iter().filter(|&&l| l < lambda).count();
            assert_eq!(p.count_below(lambda).unwrap(), dense, "lambda = {lambda}");
        }
    }

    #[test]
    fn schur_corner_matches_closed_form() {
        // For one chain the eliminated 2x2 block is (sin ω / h)[[cot mω, −csc mω], [−csc mω, cot mω]]
        // with 2 cos ω = 2 − λh²; compare through the count of the K2 pencil.
        let g = ConeGraph::<f64>::complete(2, 2.0).unwrap();
        let p = discretize(&g, 16).unwrap();
        let h: f64 = 2.0 / 16.0;
        for lambda in [0.4, 2.0, 5.5] {
            let w = ((2.0 - lambda * h * h) / 2.0).acos();
            let (c, s) = ((16.0 * w).cos(), (16.0 * w).sin());
            let f = w.sin() / h;
            let block = [f * c / s - f / s, f * c / s + f / s];
            let interior = (2..=16).filter(|&k| (k as f64 * w).sin() * ((k - 1) as f64 * w).sin() < 0.0).count();
            let expected = interior + block.iter().filter(|&&x| x < 0.0).count();
            assert_eq!(p.count_below(lambda).unwrap(), expected);
        }
    }

    #[test]
    fn shifted_solve_residual() {
        let p = discretize(&triangle(), 12).unwrap();
        let rhs: Vec<f64> = (0..p.dim()).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let sigma = 3.3;
        let x = p.solve_shifted(sigma, &rhs).unwrap();
        let kx = p.apply_stiffness(&x);
        let r: f64 = (0..p.dim())
            .map(|i| (kx[i] - sigma * p.mass()[i] * x[i] - rhs[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(r < 1e-9, "residual {r}");
    }

    #[test]
    fn interval_spectrum() {
        let g = ConeGraph::<f64>::complete(2, PI - 1e-12).unwrap();
        let p = discretize(&g, 64).unwrap();
        assert_eq!(p.count_below(0.5).unwrap(), 1);
        assert_eq!(p.count_below(1.5).unwrap(), 2);
        assert_eq!(p.count_below(4.1).unwrap(), 3);
    }

    #[test]
    fn count_is_monotone_across_chain_poles() {
        // On a single edge every Neumann eigenvalue is also a Dirichlet eigenvalue of the chain.
        let theta = 2.4750197931822067;
        let g = ConeGraph::<f64>::from_edge_list(2, &[(0, 1, theta)]).unwrap();
        let m = 512;
        let p = discretize(&g, m).unwrap();
        let h = theta / m as f64;
        for k in 1..=3 {
            let exact = 4.0 / (h * h) * (k as f64 * PI / (2.0 * m as f64)).sin().powi(2);
            let mut last = 0;
            for j in -200..=200 {
                let c = p.count_below(exact * (1.0 + j as f64 * 1e-9)).unwrap();
                assert!(c >= last);
                last = c;
            }
            assert_eq!(p.count_below(exact * (1.0 - 1e-10)).unwrap(), k);
            assert_eq!(p.count_below(exact * (1.0 + 1e-10)).unwrap(), k + 1);
            let sigma = exact * (1.0 + 1e-7);
            let x = p.solve_shifted(sigma, p.mass()).unwrap();
            let n = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let kx = p.apply_stiffness(&x);
            let res = kx
                .iter()
                .zip(p.mass())
                .zip(&x)
                .map(|((a, w), v)| (a - sigma * w * v - w).abs())
                .fold(0.0, f64::max);
            assert!(res <= 1e-10 * n * 4.0 / h, "shifted solve residual {res}");
        }
    }
}
