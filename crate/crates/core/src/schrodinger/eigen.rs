use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, BandedCholesky, CsrMatrix};

pub(crate) struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

fn orthonormalize(block: &mut [Vec<f64>]) -> Result<()> {
    for i in 0..block.len() {
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for j in 0..i {
                let (head, tail) = block.split_at_mut(i);
                let c = dot(&tail[0], &head[j]);
                tail[0].iter_mut().zip(&head[j]).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nrm = norm(&block[i]);
        if !(nrm > 1e-300) {
            return Err(Error::Singular("subspace iteration lost rank".into()));
        }
        block[i].iter_mut().for_each(|x| *x /= nrm);
    }
    Ok(())
}

/// The `k` lowest eigenpairs of a symmetric positive-definite band matrix by
/// inverse subspace iteration with Rayleigh–Ritz.
pub(crate) fn lowest_eigenpairs(
    a: &CsrMatrix,
    bw: usize,
    k: usize,
    seed: u64,
    tol: f64,
    max_iter: usize,
) -> Result<Eigenpairs> {
    let n = a.nrows();
    let b = (k + 3).min(n);
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("cannot extract {k} eigenpairs from dimension {n}")));
    }
    let chol = BandedCholesky::factor(a, bw, 0.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<Vec<f64>> = (0..b).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    orthonormalize(&mut x)?;

    let mut worst = f64::INFINITY;
    for iter in 0..max_iter {
        x.par_iter_mut().for_each(|v| chol.solve_in_place(v));
        orthonormalize(&mut x)?;
        let ax: Vec<Vec<f64>> = x.par_iter().map(|v| a.matvec(v)).collect();
        let proj = DMatrix::from_fn(b, b, |i, j| dot(&x[i], &ax[j]));
        let proj = (&proj + proj.transpose()) * 0.5;
        let eig = proj.symmetric_eigen();
        let mut order: Vec<usize> = (0..b).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

        let rotate = |src: &[Vec<f64>], col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (r, v) in src.iter().enumerate() {
                let c = eig.eigenvectors[(r, col)];
                out.iter_mut().zip(v).for_each(|(o, y)| *o += c * y);
            }
            out
        };
        let new_x: Vec<Vec<f64>> = order.par_iter().map(|&c| rotate(&x, c)).collect();
        let new_ax: Vec<Vec<f64>> = order.par_iter().map(|&c| rotate(&ax, c)).collect();
        let values: Vec<f64> = order.iter().map(|&c| eig.eigenvalues[c]).collect();
        let residuals: Vec<f64> = (0..k)
            .map(|i| {
                let r: Vec<f64> = new_ax[i].iter().zip(&new_x[i]).map(|(p, v)| p - values[i] * v).collect();
                norm(&r) / norm(&new_x[i])
            })
            .collect();
        x = new_x;
        worst = residuals.iter().cloned().fold(0.0, f64::max);
        log::trace!("subspace iter {iter}: residual {worst:e}");
        if worst < tol {
            return Ok(Eigenpairs { values: values[..k].to_vec(), vectors: x[..k].to_vec() });
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_spectrum() {
        // 1D Dirichlet Laplacian: 2 − 2cos(jπ/(n+1)).
        let n = 200;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let e = lowest_eigenpairs(&a, 1, 3, 1, 1e-10, 5000).unwrap();
        for (j, v) in e.values.iter().enumerate() {
            let want = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-12, "{v} {want}");
        }
        let again = lowest_eigenpairs(&a, 1, 3, 1, 1e-10, 5000).unwrap();
        assert_eq!(again.values, e.values);
    }
}
