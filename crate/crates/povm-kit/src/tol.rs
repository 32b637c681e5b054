//! Default numerical tolerances, collected in one place.
//!
//! All thresholds are overridable per call; the constants here are the
//! defaults baked into [`Tolerances::default`] and mirrored by the CLI's
//! `--tol.<name>` flags.

use serde::{Deserialize, Serialize};

/// Max allowed deviation `|m[i][j] - conj(m[j][i])|` for Hermitian inputs.
pub const HERMITIAN: f64 = 1e-9;
/// Slack on effect eigenvalue ranges: eigenvalues must lie in `[-EIG, 1 + EIG]`.
pub const EIG: f64 = 1e-9;
/// Projector idempotency / orthogonality slack in spectral norm.
pub const PROJ: f64 = 1e-9;
/// Max pairwise commutator norm for a family to count as commuting.
pub const JOINT: f64 = 1e-8;
/// Spectral reconstruction slack `‖Σ λᵢPᵢ - M‖`.
pub const RECON: f64 = 1e-7;
/// Eigenvalues closer than this are treated as one spectral point.
pub const CLUSTER: f64 = 1e-8;
/// POVM normalization slack `‖Σ F({x}) - 1‖`.
pub const NORM: f64 = 1e-9;
/// Spectral-norm cutoff below which an effect counts as zero.
pub const SPECTRUM: f64 = 1e-10;
/// Kernel entries must lie in `[-ENTRY, 1 + ENTRY]`.
pub const ENTRY: f64 = 1e-9;
/// Kernel rows must sum to 1 within this.
pub const ROW: f64 = 1e-8;
/// Quadrature slack for grid integrals (calibrated for h = 1e-3 Gaussians).
pub const QUAD: f64 = 1e-6;
/// Norm threshold for a shrinking family's norms to count as converged.
pub const UC: f64 = 1e-6;
/// Convergence slack for Feller test-function integrals.
pub const FELLER: f64 = 1e-5;
/// Slack on the absolute-continuity domination `‖F(Δ)‖ ≤ c·ν(Δ)`.
pub const AC: f64 = 1e-6;

/// Bundle of all tolerances used across the crate.
///
/// `Tolerances::default()` reproduces the module-level constants; callers
/// (and the CLI) override individual fields as needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub hermitian: f64,
    pub eig: f64,
    pub proj: f64,
    pub joint: f64,
    pub recon: f64,
    pub cluster: f64,
    pub norm: f64,
    pub spectrum: f64,
    pub entry: f64,
    pub row: f64,
    pub quad: f64,
    pub uc: f64,
    pub feller: f64,
    pub ac: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: HERMITIAN,
            eig: EIG,
            proj: PROJ,
            joint: JOINT,
            recon: RECON,
            cluster: CLUSTER,
            norm: NORM,
            spectrum: SPECTRUM,
            entry: ENTRY,
            row: ROW,
            quad: QUAD,
            uc: UC,
            feller: FELLER,
            ac: AC,
        }
    }
}
