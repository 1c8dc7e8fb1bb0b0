//! Small numerical kernels shared by the modules: uniform-grid quadrature and
//! differencing, tridiagonal and banded solvers, and a CSR sparse matrix.

mod banded;
mod quad;
mod sparse;
mod tridiag;

pub use banded::BandedCholesky;
pub use quad::{fd_first_derivative, fd_second_derivative, simpson};
pub use sparse::CsrMatrix;
pub use tridiag::{
    solve_block_tridiagonal, solve_tridiagonal, tridiagonal_eigenvalues_lowest, Block2,
};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
