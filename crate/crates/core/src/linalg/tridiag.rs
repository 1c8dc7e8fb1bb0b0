use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};

pub type Block2 = Matrix2<f64>;

/// Thomas algorithm for `lower[i]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1] = rhs[i]`.
///
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    let scale = diag.iter().fold(0.0_f64, |m, d| m.max(d.abs())).max(1e-300);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() < 1e-14 * scale {
        return Err(Error::Singular("zero pivot at row 0".into()));
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot.abs() < 1e-14 * scale {
            return Err(Error::Singular(format!("zero pivot at row {i}")));
        }
        c[i] = if i + 1 < n { upper[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Block Thomas algorithm with 2×2 blocks.
pub fn solve_block_tridiagonal(
    lower: &[Block2],
    diag: &[Block2],
    upper: &[Block2],
    rhs: &[Vector2<f64>],
) -> Result<Vec<Vector2<f64>>> {
    let n = diag.len();
    let mut c: Vec<Block2> = Vec::with_capacity(n);
    let mut d: Vec<Vector2<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let (m, r) = if i == 0 {
            (diag[0], rhs[0])
        } else {
            (diag[i] - lower[i] * c[i - 1], rhs[i] - lower[i] * d[i - 1])
        };
        let inv = m
            .try_inverse()
            .ok_or_else(|| Error::Singular(format!("singular diagonal block at node {i}")))?;
        c.push(if i + 1 < n { inv * upper[i] } else { Block2::zeros() });
        d.push(inv * r);
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

/// Number of eigenvalues strictly below `x` (Sturm count via LDLᵀ pivots).
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let qq = if q == 0.0 { f64::EPSILON * (off[i - 1].abs() + 1e-300) } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / qq;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k` smallest eigenvalues of a symmetric tridiagonal matrix, ascending,
/// by bisection on the Sturm count.
pub fn tridiagonal_eigenvalues_lowest(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    let n = diag.len();
    assert!(off.len() + 1 == n && k <= n);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let span = (hi - lo).abs().max(1.0);
    (0..k)
        .map(|j| {
            let (mut a, mut b) = (lo - 1e-9 * span, hi + 1e-9 * span);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if sturm_count(diag, off, m) > j {
                    b = m;
                } else {
                    a = m;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}
