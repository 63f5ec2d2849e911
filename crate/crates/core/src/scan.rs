//! Bracketing and bisection of the points where a monotone eigenvalue count
//! changes. Shared by the Euclidean and cone-map scanners and the mesh oracle.

use serde::Serialize;

use crate::error::Result;
use crate::scalar::Real;

/// Tolerances and resolutions of a degree scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanConfig<T> {
    /// Upper end of the scanned range (inclusive).
    pub alpha_max: T,
    /// Bracket width at which bisection stops.
    pub alpha_tol: T,
    /// Relative zero band used when extracting kernels.
    pub kernel_tol: T,
    /// Distance kept from singular degrees (and from `0`).
    pub guard: T,
    /// Located zeros closer than this are merged.
    pub merge_tol: T,
    /// Minimum number of grid points per interval.
    pub min_grid: usize,
    /// Grid points per vertex, used when larger than `min_grid`.
    pub grid_per_vertex: usize,
    /// Resolution of the nonnegative-span search.
    pub nonneg_resolution: usize,
    /// Scan intervals on the rayon pool.
    pub parallel: bool,
}

impl<T: Real> ScanConfig<T> {
    pub fn new(alpha_max: T) -> Self {
        Self {
            alpha_max,
            alpha_tol: T::tol(1e-10),
            kernel_tol: T::loose_tol(1e-9),
            guard: T::loose_tol(1e-6),
            merge_tol: T::tol(1e-8),
            min_grid: 32,
            grid_per_vertex: 8,
            nonneg_resolution: 64,
            parallel: true,
        }
    }

    pub fn grid_size(&self, vertices: usize) -> usize {
        self.min_grid.max(self.grid_per_vertex * vertices)
    }
}

/// Locates the jumps of a non-increasing integer function `count` on `(lo, hi]`.
///
/// Returns `(position, size of the jump)` pairs in increasing order; each
/// position is the midpoint of a bracket narrower than `tol`.
pub(crate) fn locate_drops<T: Real>(
    lo: T,
    hi: T,
    grid: usize,
    tol: T,
    count: &(dyn Fn(T) -> Result<i64> + Sync),
) -> Result<Vec<(T, usize)>> {
    let grid = grid.max(2);
    let mut out = Vec::new();
    let step = (hi - lo) / T::lit((grid - 1) as f64);
    let mut a = lo;
    let mut ca = count(lo)?;
    for i in 1..grid {
        let b = if i + 1 == grid { hi } else { lo + step * T::lit(i as f64) };
        let cb = count(b)?;
        if cb < ca {
            refine(a, ca, b, cb, tol, count, &mut out)?;
        }
        a = b;
        ca = cb.min(ca);
    }
    Ok(out)
}

fn refine<T: Real>(
    a: T,
    ca: i64,
    b: T,
    cb: i64,
    tol: T,
    count: &(dyn Fn(T) -> Result<i64> + Sync),
    out: &mut Vec<(T, usize)>,
) -> Result<()> {
    if ca <= cb {
        return Ok(());
    }
    let mid = (a + b) * T::lit(0.5);
    if b - a <= tol || mid <= a || mid >= b {
        out.push((mid, (ca - cb) as usize));
        return Ok(());
    }
    let cm = count(mid)?.clamp(cb, ca);
    refine(a, ca, mid, cm, tol, count, out)?;
    refine(mid, cm, b, cb, tol, count, out)
}

/// Merges consecutive located zeros closer than `merge_tol`, keeping the
/// multiplicity-weighted mean position.
pub(crate) fn merge_close<T: Real>(roots: Vec<(T, usize)>, merge_tol: T) -> Vec<(T, usize)> {
    let mut out: Vec<(T, usize, T)> = Vec::new();
    for (x, m) in roots {
        match out.last_mut() {
            Some((last_x, last_m, sum)) if (x - *last_x).abs() <= merge_tol => {
                *sum += x * T::lit(m as f64);
                *last_m += m;
                *last_x = *sum / T::lit(*last_m as f64);
            }
            _ => out.push((x, m, x * T::lit(m as f64))),
        }
    }
    out.into_iter().map(|(x, m, _)| (x, m)).collect()
}
