use crate::graph::ConeGraph;
use crate::linalg::SymMatrix;
use crate::scalar::Real;

/// `ℒ = I − D^{-1/2} A D^{-1/2}` with parallel edges counted in `A` and `D`.
pub fn normalized_laplacian<T: Real>(g: &ConeGraph<T>) -> SymMatrix<T> {
    let n = g.vertex_count();
    let adj = g.adjacency_counts();
    let deg: Vec<T> = (0..n).map(|i| T::lit(g.degree(i) as f64)).collect();
    SymMatrix::from_fn(n, |i, j| {
        let a = T::lit(adj[i][j] as f64);
        let off = if deg[i] > T::zero() && deg[j] > T::zero() {
            a / (deg[i] * deg[j]).sqrt()
        } else {
            T::zero()
        };
        if i == j {
            T::one() - off
        } else {
            -off
        }
    })
}

/// Positive semidefinite Laplacian `Σ_e w(e) (x_tail − x_head)²`.
pub fn weighted_laplacian<T: Real>(g: &ConeGraph<T>, mut weight: impl FnMut(usize) -> T) -> SymMatrix<T> {
    let mut l = SymMatrix::zeros(g.vertex_count());
    for (k, e) in g.edges().iter().enumerate() {
        let w = weight(k);
        l.add_sym(e.tail, e.tail, w);
        l.add_sym(e.head, e.head, w);
        l.add_sym(e.tail, e.head, -w);
    }
    l
}
