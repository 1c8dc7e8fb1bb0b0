use crate::error::{Error, Result};

use super::CsrMatrix;

/// Cholesky factor `A = L·Lᵀ` of a symmetric positive-definite band matrix.
///
/// Row `i` of `L` is stored as `band[i*(bw+1) + k]` holding `L[i][i-bw+k]`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    band: Vec<f64>,
}

impl BandedCholesky {
    /// Factor `A − shift·I` where `A` is symmetric with half-bandwidth `bw`.
    pub fn factor(a: &CsrMatrix, bw: usize, shift: f64) -> Result<Self> {
        let n = a.nrows();
        let w = bw + 1;
        let mut band = vec![0.0; n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    if i - j > bw {
                        return Err(Error::Singular(format!(
                            "entry ({i},{j}) outside half-bandwidth {bw}"
                        )));
                    }
                    band[i * w + bw - (i - j)] += v;
                }
            }
            band[i * w + bw] -= shift;
        }
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                // L[i][j] = (A[i][j] − Σ_k L[i][k]·L[j][k]) / L[j][j]
                let k0 = j0.max(j.saturating_sub(bw));
                let mut s = band[i * w + bw - (i - j)];
                for k in k0..j {
                    s -= band[i * w + bw - (i - k)] * band[j * w + bw - (j - k)];
                }
                if j == i {
                    if s <= 0.0 {
                        return Err(Error::Singular(format!(
                            "matrix not positive definite at row {i} (pivot {s:e})"
                        )));
                    }
                    band[i * w + bw] = s.sqrt();
                } else {
                    band[i * w + bw - (i - j)] = s / band[j * w + bw];
                }
            }
        }
        Ok(Self { n, bw, band })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `(A − shift·I)·x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.band[i * w + bw - (i - k)] * b[k];
            }
            b[i] = s / self.band[i * w + bw];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= self.band[k * w + bw - (k - i)] * b[k];
            }
            b[i] = s / self.band[i * w + bw];
        }
    }
}
