use std::fs;
use std::path::PathBuf;

use super::{EigenResult, Grid2D};
use crate::error::Result;
use crate::model::EqualParams;

/// On-disk store of converged levels, one JSON file per (μ, λ, n, extent).
/// Eigenvectors are not kept.
#[derive(Debug, Clone)]
pub struct EigenCache {
    dir: PathBuf,
}

impl EigenCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    fn path(&self, eq: &EqualParams, grid: &Grid2D, k: usize) -> PathBuf {
        self.dir.join(format!(
            "{:016x}-{:016x}-{}-{:016x}-{k}.json",
            eq.mu.to_bits(),
            eq.lambda.to_bits(),
            grid.n,
            grid.extent.to_bits()
        ))
    }

    pub fn load(&self, eq: &EqualParams, grid: &Grid2D, k: usize) -> Option<EigenResult> {
        let text = fs::read_to_string(self.path(eq, grid, k)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store(&self, eq: &EqualParams, result: &EigenResult) -> Result<()> {
        let path = self.path(eq, &result.grid, result.energies.len());
        fs::write(path, serde_json::to_string(result)?)?;
        Ok(())
    }
}
