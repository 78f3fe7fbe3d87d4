use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every operation.
///
/// Defaults: `herm = psd = 1e-10`, `recon = penrose = 1e-9`,
/// `range = 1e-8`, `member = 1e-7`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity / symmetry check on inputs.
    pub herm: f64,
    /// Allowed negative eigenvalue for PSD checks.
    pub psd: f64,
    /// Reconstruction and identity residuals.
    pub recon: f64,
    /// Penrose identities of pseudo-inverses.
    pub penrose: f64,
    /// Distance from the affine range still counted as on-range.
    pub range: f64,
    /// Half-width of the band around the boundary value reported as `Boundary`.
    pub member: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            psd: 1e-10,
            recon: 1e-9,
            penrose: 1e-9,
            range: 1e-8,
            member: 1e-7,
        }
    }
}

/// Relative eigenvalue cutoff for pseudo-inverses of Gram-type matrices of
/// an `n`-element ensemble in dimension `d`.
pub fn default_rank_cutoff(n: usize, d: usize) -> f64 {
    64.0 * f64::EPSILON * (n.max(d * d).max(1) as f64)
}
