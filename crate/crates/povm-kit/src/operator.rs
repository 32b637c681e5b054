//! Dense Hermitian linear algebra: positivity tests, spectral decomposition,
//! and joint diagonalization of commuting families.
//!
//! Everything downstream (sharp versions, kernel extraction, smearing) reduces
//! to the primitives in this module. Matrices are dense `Complex64` and the
//! matrix norm is the spectral norm throughout.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tol;

/// Errors raised by the operator primitives.
#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("matrix entry ({row},{col}) deviates from Hermitian symmetry by {defect:.3e}")]
    NotHermitian { row: usize, col: usize, defect: f64 },

    #[error("matrix dimension must be ≥ 1")]
    BadDimension,

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("effects {first} and {second} do not commute: commutator norm {commutator_norm:.3e}")]
    NotCommutative {
        first: usize,
        second: usize,
        commutator_norm: f64,
    },

    #[error("family of effects is empty")]
    EmptyFamily,

    #[error("joint block residual {residual:.3e} for effect {effect} exceeds tolerance")]
    BlockResidual { effect: usize, residual: f64 },
}

/// A validated Hermitian matrix: `m[i][j] = conj(m[j][i])` within a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Validate and wrap a dense complex matrix.
    ///
    /// Fails with the worst offending entry pair if the matrix deviates from
    /// Hermitian symmetry by more than `hermitian_tol`, or if it is not
    /// square with dimension ≥ 1.
    pub fn new(mat: DMatrix<Complex64>, hermitian_tol: f64) -> Result<Self, OperatorError> {
        let (r, c) = mat.shape();
        if r != c {
            return Err(OperatorError::DimMismatch { left: r, right: c });
        }
        if r == 0 {
            return Err(OperatorError::BadDimension);
        }
        let mut worst = (0usize, 0usize, 0.0f64);
        for i in 0..r {
            for j in i..r {
                let defect = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                if defect > worst.2 {
                    worst = (i, j, defect);
                }
            }
        }
        if worst.2 > hermitian_tol {
            return Err(OperatorError::NotHermitian {
                row: worst.0,
                col: worst.1,
                defect: worst.2,
            });
        }
        Ok(Self { mat })
    }

    /// Wrap a matrix known Hermitian by construction (sums of projectors,
    /// conjugations of diagonals). Symmetry is enforced exactly by averaging
    /// with the adjoint so later eigensolves see a true Hermitian input.
    pub fn from_hermitian_parts(mat: DMatrix<Complex64>) -> Self {
        let sym = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
        Self { mat: sym }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    /// Diagonal matrix from real entries.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut mat = DMatrix::zeros(d, d);
        for (i, &v) in diag.iter().enumerate() {
            mat[(i, i)] = Complex64::new(v, 0.0);
        }
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }
}

/// One POVM value: a Hermitian matrix whose spectrum is meant to lie in `[0, 1]`.
///
/// The eigenvalue range is a contract, not a construction-time gate: effects
/// with out-of-range spectra are representable so that [`crate::povm::validate_povm`]
/// can report the violation instead of crashing. Use [`Effect::spectral_range`]
/// or [`Effect::validate_range`] where the contract must hold.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    matrix: HermitianMatrix,
}

impl Effect {
    pub fn new(matrix: HermitianMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.matrix.matrix()
    }

    /// `(min, max)` eigenvalue of the effect.
    pub fn spectral_range(&self) -> (f64, f64) {
        let (vals, _) = hermitian_eigen(self.matrix.matrix());
        (vals[0], vals[vals.len() - 1])
    }

    /// Check the `[-eig_tol, 1 + eig_tol]` eigenvalue contract.
    pub fn validate_range(&self, eig_tol: f64) -> Result<(), (f64, f64)> {
        let (lo, hi) = self.spectral_range();
        if lo < -eig_tol || hi > 1.0 + eig_tol {
            Err((lo, hi))
        } else {
            Ok(())
        }
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(self.matrix.matrix())
    }
}

/// Spectral decomposition into distinct-eigenvalue clusters.
///
/// `eigenvalues` is ascending with one entry per cluster; `projectors[i]` is
/// the orthogonal projector onto the cluster eigenspace. The family is a PVM:
/// idempotent, mutually orthogonal, summing to the identity.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<HermitianMatrix>,
}

impl SpectralDecomp {
    /// `Σᵢ λᵢ Pᵢ` as a dense matrix.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let dim = self.projectors[0].dim();
        let mut acc = DMatrix::zeros(dim, dim);
        for (lam, p) in self.eigenvalues.iter().zip(&self.projectors) {
            acc += p.matrix() * Complex64::new(*lam, 0.0);
        }
        acc
    }

    /// Worst violation over: idempotency, pairwise orthogonality, sum-to-identity.
    pub fn pvm_defect(&self) -> f64 {
        pvm_defect(&self.projectors)
    }
}

/// One common eigenspace of a commuting family: the projector onto the block
/// and the common eigenvalue of each input effect on it.
#[derive(Debug, Clone)]
pub struct JointBlock {
    pub projector: HermitianMatrix,
    pub values: Vec<f64>,
}

/// The finest simultaneous block diagonalization of a commuting family of
/// effects: pairwise orthogonal projectors summing to the identity, each
/// carrying the vector of common eigenvalues of the inputs.
#[derive(Debug, Clone)]
pub struct JointEigenstructure {
    pub blocks: Vec<JointBlock>,
    dim: usize,
}

impl JointEigenstructure {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Rebuild input effect `i` as `Σ_k values_k[i] P_k`.
    pub fn reconstruct_effect(&self, i: usize) -> DMatrix<Complex64> {
        let mut acc = DMatrix::zeros(self.dim, self.dim);
        for block in &self.blocks {
            acc += block.projector.matrix() * Complex64::new(block.values[i], 0.0);
        }
        acc
    }
}

/// Spectral norm `‖M‖ = σ_max(M)`, computed as `sqrt(λ_max(M†M))`.
/// Exactly diagonal matrices short-circuit to `max |m_ii|`.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut diagonal = m.is_square();
    'scan: for j in 0..n {
        for i in 0..n {
            if i != j && m[(i, j)] != Complex64::new(0.0, 0.0) {
                diagonal = false;
                break 'scan;
            }
        }
    }
    if diagonal {
        return (0..n).map(|i| m[(i, i)].norm()).fold(0.0, f64::max);
    }
    let gram = m.adjoint() * m;
    let (vals, _) = hermitian_eigen(&gram);
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// True iff the smallest eigenvalue of `m` is ≥ `-tol`.
pub fn is_positive_semidefinite(m: &HermitianMatrix, tol: f64) -> bool {
    let (vals, _) = hermitian_eigen(m.matrix());
    vals[0] >= -tol
}

/// Eigendecomposition with eigenvalues clustered at `cluster_tol`.
///
/// Eigenvalues whose ascending gaps are ≤ `cluster_tol` are merged into one
/// spectral point; the reported eigenvalue is the cluster mean and the
/// projector spans the cluster eigenvectors.
pub fn spectral_decompose(m: &HermitianMatrix, cluster_tol: f64) -> SpectralDecomp {
    let (vals, vecs) = hermitian_eigen(m.matrix());
    let clusters = cluster_ranges(&vals, cluster_tol);
    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    for range in clusters {
        let mean = vals[range.clone()].iter().sum::<f64>() / range.len() as f64;
        let basis = vecs.columns(range.start, range.len());
        let proj = basis * basis.adjoint();
        eigenvalues.push(mean);
        projectors.push(HermitianMatrix::from_hermitian_parts(proj));
    }
    SpectralDecomp {
        eigenvalues,
        projectors,
    }
}

/// Spectral norm of `AB - BA`; zero iff the pair commutes.
pub fn commutator_norm(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64, OperatorError> {
    if a.dim() != b.dim() {
        return Err(OperatorError::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    Ok(spectral_norm(&comm))
}

/// Simultaneously diagonalize a commuting family of effects.
///
/// Fails with [`OperatorError::NotCommutative`] (carrying the worst pair) if
/// any pairwise commutator norm exceeds `joint_tol`. Otherwise a random
/// real-coefficient combination of the effects seeds the block structure and
/// each block is then recursively split on each effect, so the result is the
/// finest partition simultaneously diagonalizing the whole family.
pub fn jointly_diagonalize(
    effects: &[Effect],
    joint_tol: f64,
    cluster_tol: f64,
) -> Result<JointEigenstructure, OperatorError> {
    if effects.is_empty() {
        return Err(OperatorError::EmptyFamily);
    }
    let dim = effects[0].dim();
    for e in effects.iter().skip(1) {
        if e.dim() != dim {
            return Err(OperatorError::DimMismatch {
                left: dim,
                right: e.dim(),
            });
        }
    }
    let mut worst = (0usize, 0usize, 0.0f64);
    for i in 0..effects.len() {
        for j in (i + 1)..effects.len() {
            let norm = commutator_norm(effects[i].hermitian(), effects[j].hermitian())?;
            if norm > worst.2 {
                worst = (i, j, norm);
            }
        }
    }
    if worst.2 > joint_tol {
        return Err(OperatorError::NotCommutative {
            first: worst.0,
            second: worst.1,
            commutator_norm: worst.2,
        });
    }

    // Seed blocks from a random combination; coefficients are drawn from a
    // fixed-seed generator so results are reproducible run to run.
    let mut rng = ChaCha8Rng::seed_from_u64(0x706f_766d);
    let mut combo = DMatrix::<Complex64>::zeros(dim, dim);
    for e in effects {
        let c: f64 = rng.gen_range(0.25..1.0);
        combo += e.matrix() * Complex64::new(c, 0.0);
    }
    let (combo_vals, combo_vecs) = hermitian_eigen(&combo);
    let mut bases: Vec<DMatrix<Complex64>> = cluster_ranges(&combo_vals, cluster_tol)
        .into_iter()
        .map(|r| combo_vecs.columns(r.start, r.len()).into_owned())
        .collect();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); bases.len()];

    // Refine: split every block on every effect. The combination step is an
    // accelerator; this pass alone already yields the finest partition.
    for effect in effects {
        let mut next_bases = Vec::with_capacity(bases.len());
        let mut next_values = Vec::with_capacity(bases.len());
        for (basis, vals_so_far) in bases.into_iter().zip(values) {
            let compressed = basis.adjoint() * effect.matrix() * &basis;
            let (sub_vals, sub_vecs) = hermitian_eigen(&compressed);
            for range in cluster_ranges(&sub_vals, cluster_tol) {
                let mean = sub_vals[range.clone()].iter().sum::<f64>() / range.len() as f64;
                let sub_basis = &basis * sub_vecs.columns(range.start, range.len());
                let mut vals = vals_so_far.clone();
                vals.push(mean);
                next_bases.push(sub_basis);
                next_values.push(vals);
            }
        }
        bases = next_bases;
        values = next_values;
    }

    let mut blocks: Vec<JointBlock> = bases
        .into_iter()
        .zip(values)
        .map(|(basis, values)| JointBlock {
            projector: HermitianMatrix::from_hermitian_parts(&basis * basis.adjoint()),
            values,
        })
        .collect();
    blocks.sort_by(|a, b| {
        a.values
            .partial_cmp(&b.values)
            .expect("eigenvalues are finite")
    });

    // Residual gate: each effect must act as a scalar on each block.
    for (i, effect) in effects.iter().enumerate() {
        for block in &blocks {
            let residual = effect.matrix() * block.projector.matrix()
                - block.projector.matrix() * Complex64::new(block.values[i], 0.0);
            let norm = spectral_norm(&residual);
            if norm > 10.0 * joint_tol.max(tol::JOINT) {
                return Err(OperatorError::BlockResidual {
                    effect: i,
                    residual: norm,
                });
            }
        }
    }

    Ok(JointEigenstructure { blocks, dim })
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
///
/// Cyclic Jacobi rotations on an exactly symmetrized copy. Jacobi resolves
/// clustered spectra to machine precision, which the joint-diagonalization
/// refinement depends on; QR-based solvers can leave O(1e-4) residuals inside
/// near-degenerate eigenvalue pairs.
fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    let mut a = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut vecs = DMatrix::<Complex64>::identity(n, n);
    if n > 1 {
        let frob = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let target = (frob * f64::EPSILON).max(f64::MIN_POSITIVE);
        for _sweep in 0..64 {
            let mut off = 0.0f64;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= target {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let gamma = a[(p, q)];
                    let mag = gamma.norm();
                    if mag <= target / (n * n) as f64 {
                        continue;
                    }
                    // Unitary 2×2 rotation R = D·J with D = diag(1, e^{-iφ})
                    // absorbing the phase of a_pq and J the real Jacobi
                    // rotation zeroing the resulting symmetric off-diagonal.
                    let phase = gamma / Complex64::new(mag, 0.0);
                    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let r11 = Complex64::new(c, 0.0);
                    let r12 = Complex64::new(s, 0.0);
                    let r21 = -phase.conj() * s;
                    let r22 = phase.conj() * c;
                    // A ← A·R on columns p, q.
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * r11 + akq * r21;
                        a[(k, q)] = akp * r12 + akq * r22;
                    }
                    // A ← R†·A on rows p, q.
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = r11.conj() * apk + r21.conj() * aqk;
                        a[(q, k)] = r12.conj() * apk + r22.conj() * aqk;
                    }
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    // V ← V·R.
                    for k in 0..n {
                        let vkp = vecs[(k, p)];
                        let vkq = vecs[(k, q)];
                        vecs[(k, p)] = vkp * r11 + vkq * r21;
                        vecs[(k, q)] = vkp * r12 + vkq * r22;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .expect("eigenvalues are finite")
    });
    let vals: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut sorted = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted.set_column(dst, &vecs.column(src));
    }
    (vals, sorted)
}

/// Group ascending values into clusters: a gap ≤ `cluster_tol` joins a cluster.
fn cluster_ranges(sorted_vals: &[f64], cluster_tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 1..=sorted_vals.len() {
        if i == sorted_vals.len() || sorted_vals[i] - sorted_vals[i - 1] > cluster_tol {
            ranges.push(start..i);
            start = i;
        }
    }
    ranges
}

/// Worst PVM violation of a projector family: max over `‖P² - P‖`,
/// `‖PᵢPⱼ‖` (i ≠ j) and `‖ΣP - 1‖`.
pub fn pvm_defect(projectors: &[HermitianMatrix]) -> f64 {
    if projectors.is_empty() {
        return f64::INFINITY;
    }
    let dim = projectors[0].dim();
    let mut worst: f64 = 0.0;
    let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, p) in projectors.iter().enumerate() {
        let idem = p.matrix() * p.matrix() - p.matrix();
        worst = worst.max(spectral_norm(&idem));
        for q in projectors.iter().skip(i + 1) {
            worst = worst.max(spectral_norm(&(p.matrix() * q.matrix())));
        }
        sum += p.matrix();
    }
    sum -= DMatrix::<Complex64>::identity(dim, dim);
    worst.max(spectral_norm(&sum))
}

/// Wire format for the matrix JSON schema:
/// `{ "dim": d, "re": [[...]], "im": [[...]] }`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Self {
        let d = m.nrows();
        let re = (0..d)
            .map(|i| (0..d).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..d)
            .map(|i| (0..d).map(|j| m[(i, j)].im).collect())
            .collect();
        Self { dim: d, re, im }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>, String> {
        let d = self.dim;
        if d == 0 {
            return Err("matrix dim must be ≥ 1".into());
        }
        if self.re.len() != d || self.im.len() != d {
            return Err(format!("expected {d} rows in re/im"));
        }
        let mut mat = DMatrix::zeros(d, d);
        for i in 0..d {
            if self.re[i].len() != d || self.im[i].len() != d {
                return Err(format!("row {i} must have {d} entries"));
            }
            for j in 0..d {
                mat[(i, j)] = Complex64::new(self.re[i][j], self.im[i][j]);
            }
        }
        Ok(mat)
    }
}

impl From<&HermitianMatrix> for MatrixJson {
    fn from(h: &HermitianMatrix) -> Self {
        Self::from_matrix(h.matrix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn herm(rows: &[&[(f64, f64)]]) -> HermitianMatrix {
        let d = rows.len();
        let mat = DMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j].0, rows[i][j].1));
        HermitianMatrix::new(mat, tol::HERMITIAN).unwrap()
    }

    fn real(rows: &[&[f64]]) -> HermitianMatrix {
        let d = rows.len();
        let mat = DMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j], 0.0));
        HermitianMatrix::new(mat, tol::HERMITIAN).unwrap()
    }

    #[test]
    fn rejects_non_hermitian_naming_worst_pair() {
        let mat = DMatrix::from_fn(2, 2, |i, j| {
            if (i, j) == (0, 1) {
                Complex64::new(0.5, 0.0)
            } else if (i, j) == (1, 0) {
                Complex64::new(0.2, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        match HermitianMatrix::new(mat, 1e-9) {
            Err(OperatorError::NotHermitian { row, col, defect }) => {
                assert_eq!((row, col), (0, 1));
                assert_abs_diff_eq!(defect, 0.3, epsilon = 1e-12);
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn psd_identity_and_negative_diagonal() {
        assert!(is_positive_semidefinite(&HermitianMatrix::identity(2), 1e-10));
        let neg = HermitianMatrix::from_real_diagonal(&[0.5, -0.2]);
        assert!(!is_positive_semidefinite(&neg, 1e-10));
    }

    #[test]
    fn psd_rank_one_half() {
        // [[0.5, 0.5], [0.5, 0.5]] has eigenvalues 0 and 1.
        let m = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(is_positive_semidefinite(&m, 1e-10));
        let (lo, hi) = Effect::new(m).spectral_range();
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_decompose_clusters_diagonal() {
        let m = HermitianMatrix::from_real_diagonal(&[0.3, 0.3, 0.7]);
        let d = spectral_decompose(&m, tol::CLUSTER);
        assert_eq!(d.eigenvalues.len(), 2);
        assert_abs_diff_eq!(d.eigenvalues[0], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(d.eigenvalues[1], 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(d.projectors[0].trace(), 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d.projectors[1].trace(), 1.0, epsilon = 1e-10);
        assert!(d.pvm_defect() < tol::PROJ);
        assert!(spectral_norm(&(d.reconstruct() - m.matrix())) < tol::RECON);
    }

    #[test]
    fn spectral_decompose_identity_is_single_cluster() {
        let m = HermitianMatrix::identity(3);
        let d = spectral_decompose(&m, tol::CLUSTER);
        assert_eq!(d.eigenvalues, vec![1.0]);
        assert!(spectral_norm(&(d.projectors[0].matrix() - DMatrix::<Complex64>::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn spectral_decompose_rank_one_projectors() {
        // Closed form: eigenvalues 0, 1 with eigenvectors (1,∓1)/√2.
        let m = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let d = spectral_decompose(&m, tol::CLUSTER);
        assert_eq!(d.eigenvalues.len(), 2);
        assert_abs_diff_eq!(d.eigenvalues[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.eigenvalues[1], 1.0, epsilon = 1e-12);
        let p0 = real(&[&[0.5, -0.5], &[-0.5, 0.5]]);
        let p1 = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(spectral_norm(&(d.projectors[0].matrix() - p0.matrix())) < 1e-10);
        assert!(spectral_norm(&(d.projectors[1].matrix() - p1.matrix())) < 1e-10);
    }

    #[test]
    fn commutator_of_diagonals_is_zero() {
        let a = HermitianMatrix::from_real_diagonal(&[0.7, 0.2]);
        let b = HermitianMatrix::from_real_diagonal(&[0.3, 0.8]);
        assert_abs_diff_eq!(commutator_norm(&a, &b).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(commutator_norm(&a, &a).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn commutator_of_pauli_effects_is_half() {
        // (1+σx)/2 and (1+σz)/2: ‖[·,·]‖ = ‖(σxσz − σzσx)/4‖ = ‖σy‖/2 = 1/2.
        let ex = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let ez = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert_abs_diff_eq!(commutator_norm(&ex, &ez).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn commutator_dim_mismatch_errors() {
        let a = HermitianMatrix::identity(2);
        let b = HermitianMatrix::identity(3);
        assert!(matches!(
            commutator_norm(&a, &b),
            Err(OperatorError::DimMismatch { .. })
        ));
    }

    #[test]
    fn jointly_diagonalize_diagonal_pair() {
        let effects = vec![
            Effect::new(HermitianMatrix::from_real_diagonal(&[0.7, 0.2])),
            Effect::new(HermitianMatrix::from_real_diagonal(&[0.3, 0.8])),
        ];
        let joint = jointly_diagonalize(&effects, tol::JOINT, tol::CLUSTER).unwrap();
        assert_eq!(joint.n_blocks(), 2);
        let mut value_vectors: Vec<Vec<f64>> =
            joint.blocks.iter().map(|b| b.values.clone()).collect();
        value_vectors.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(value_vectors[0][0], 0.2, epsilon = 1e-10);
        assert_abs_diff_eq!(value_vectors[0][1], 0.8, epsilon = 1e-10);
        assert_abs_diff_eq!(value_vectors[1][0], 0.7, epsilon = 1e-10);
        assert_abs_diff_eq!(value_vectors[1][1], 0.3, epsilon = 1e-10);
    }

    #[test]
    fn jointly_diagonalize_identity_single_block() {
        let effects = vec![Effect::new(HermitianMatrix::identity(3))];
        let joint = jointly_diagonalize(&effects, tol::JOINT, tol::CLUSTER).unwrap();
        assert_eq!(joint.n_blocks(), 1);
        assert_abs_diff_eq!(joint.blocks[0].values[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn jointly_diagonalize_sigma_x_pair() {
        // {(1+σx)/2, (1−σx)/2} → rank-1 blocks with values (1,0) and (0,1).
        let plus = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let minus = real(&[&[0.5, -0.5], &[-0.5, 0.5]]);
        let effects = vec![Effect::new(plus), Effect::new(minus)];
        let joint = jointly_diagonalize(&effects, tol::JOINT, tol::CLUSTER).unwrap();
        assert_eq!(joint.n_blocks(), 2);
        for block in &joint.blocks {
            assert_abs_diff_eq!(block.projector.trace(), 1.0, epsilon = 1e-10);
        }
        let mut vv: Vec<Vec<f64>> = joint.blocks.iter().map(|b| b.values.clone()).collect();
        vv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(vv[0][0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(vv[0][1], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(vv[1][0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(vv[1][1], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn jointly_diagonalize_rejects_noncommuting() {
        let ex = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let ez = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        let effects = vec![Effect::new(ex), Effect::new(ez)];
        match jointly_diagonalize(&effects, tol::JOINT, tol::CLUSTER) {
            Err(OperatorError::NotCommutative {
                first,
                second,
                commutator_norm,
            }) => {
                assert_eq!((first, second), (0, 1));
                assert_abs_diff_eq!(commutator_norm, 0.5, epsilon = 1e-12);
            }
            other => panic!("expected NotCommutative, got {other:?}"),
        }
    }

    #[test]
    fn complex_hermitian_roundtrip() {
        let m = herm(&[&[(1.0, 0.0), (0.0, 0.5)], &[(0.0, -0.5), (0.3, 0.0)]]);
        let d = spectral_decompose(&m, tol::CLUSTER);
        assert!(spectral_norm(&(d.reconstruct() - m.matrix())) < tol::RECON);
        assert!(d.pvm_defect() < tol::PROJ);
    }

    #[test]
    fn matrix_json_roundtrip() {
        let m = herm(&[&[(1.0, 0.0), (0.2, 0.5)], &[(0.2, -0.5), (0.3, 0.0)]]);
        let wire = MatrixJson::from(&m);
        let back = wire.to_matrix().unwrap();
        assert!(spectral_norm(&(back - m.matrix())) < 1e-15);
        let text = serde_json::to_string(&wire).unwrap();
        assert!(text.contains("\"dim\":2"));
        let reparsed: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(reparsed.re, wire.re);
    }
}
