//! Synthesis of the sharp version of a commutative POVM: a self-adjoint
//! operator `A = Σ λ_k E({λ_k})` whose eigenprojectors are the joint
//! eigenblocks of the POVM and whose eigenvalues are injective labels in
//! `[0, 1]`, plus the generated-algebra and uniqueness checks.
//!
//! Two labeling schemes are provided. `Index` assigns `λ_k = k/(n+1)`.
//! `Ternary` reproduces the separating-function construction at finite
//! depth: each block's value vector is binarized to `K` digits per entry,
//! the digits are interleaved across entries in outcome order, and the digit
//! string `(x_1, x_2, …)` is mapped to `Σ x_j/3^j`. Finite truncation can
//! collide; on collision the builder falls back to index labeling and flags
//! it, preserving the only property used downstream (injectivity).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operator::{
    jointly_diagonalize, pvm_defect, spectral_norm, HermitianMatrix, MatrixJson, OperatorError,
};
use crate::povm::DiscretePovm;
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum SharpError {
    #[error(transparent)]
    Operator(#[from] OperatorError),

    #[error("blocks {first} and {second} carry identical value vectors (joint blocks not maximal)")]
    DegenerateBlocks { first: usize, second: usize },

    #[error("ternary depth must be in 1..=32, got {0}")]
    BadDepth(u32),
}

/// Eigenvalue labeling scheme for [`build_sharp_version`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Labeling {
    /// `λ_k = k/(n_blocks + 1)` over blocks in lexicographic value-vector order.
    Index,
    /// Interleaved binary digits at the given depth, mapped into base 3.
    Ternary { depth: u32 },
}

impl Labeling {
    pub const DEFAULT_TERNARY_DEPTH: u32 = 16;

    fn name(&self) -> &'static str {
        match self {
            Labeling::Index => "index",
            Labeling::Ternary { .. } => "ternary",
        }
    }
}

/// A sharp version: a PVM `E({λ_k})` with strictly increasing eigenvalues in
/// `[0, 1]` and the operator `A = Σ λ_k E({λ_k})`.
#[derive(Debug, Clone)]
pub struct SharpVersion {
    eigenvalues: Vec<f64>,
    projectors: Vec<HermitianMatrix>,
    operator: HermitianMatrix,
    labeling: &'static str,
    fallback_used: bool,
}

impl SharpVersion {
    /// Assemble from labeled projectors, sorting by eigenvalue and forming the
    /// operator. Fails if eigenvalues are not pairwise distinct.
    pub fn assemble(
        mut pairs: Vec<(f64, HermitianMatrix)>,
        labeling: &'static str,
        fallback_used: bool,
    ) -> Result<Self, SharpError> {
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
        for i in 1..pairs.len() {
            if pairs[i].0 == pairs[i - 1].0 {
                return Err(SharpError::DegenerateBlocks {
                    first: i - 1,
                    second: i,
                });
            }
        }
        let dim = pairs[0].1.dim();
        let mut op = DMatrix::<Complex64>::zeros(dim, dim);
        for (lam, p) in &pairs {
            op += p.matrix() * Complex64::new(*lam, 0.0);
        }
        let (eigenvalues, projectors) = pairs.into_iter().unzip();
        Ok(Self {
            eigenvalues,
            projectors,
            operator: HermitianMatrix::from_hermitian_parts(op),
            labeling,
            fallback_used,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[HermitianMatrix] {
        &self.projectors
    }

    pub fn operator(&self) -> &HermitianMatrix {
        &self.operator
    }

    pub fn labeling(&self) -> &'static str {
        self.labeling
    }

    pub fn fallback_used(&self) -> bool {
        self.fallback_used
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn n_projectors(&self) -> usize {
        self.projectors.len()
    }

    /// Worst PVM violation of the projector family.
    pub fn pvm_defect(&self) -> f64 {
        pvm_defect(&self.projectors)
    }
}

/// Binary digits of `t ∈ [0, 1]`, most significant first, by round-to-nearest
/// at depth `k` (clamped into the representable k-digit range).
fn binary_digits(t: f64, k: u32) -> Vec<u8> {
    let scale = (1u64 << k) as f64;
    let r = (t.clamp(0.0, 1.0) * scale).round() as i64;
    let r = r.clamp(0, (1i64 << k) - 1) as u64;
    (0..k).map(|j| ((r >> (k - 1 - j)) & 1) as u8).collect()
}

/// Interleave per-entry digit rows (entry-major within each depth level) and
/// map the resulting string into base 3: `Σ x_s/3^s`.
fn ternary_value(digit_rows: &[Vec<u8>]) -> f64 {
    let depth = digit_rows[0].len();
    let mut acc = 0.0;
    let mut pow = 1.0;
    for j in 0..depth {
        for row in digit_rows {
            pow /= 3.0;
            acc += f64::from(row[j]) * pow;
        }
    }
    acc
}

/// Build the sharp version of a commutative POVM.
///
/// The projectors are the blocks of the joint eigenstructure of the singleton
/// effects; eigenvalues are assigned injectively in `[0, 1]` per the chosen
/// labeling. Non-commutative input fails with the propagated
/// [`OperatorError::NotCommutative`].
pub fn build_sharp_version(
    povm: &DiscretePovm,
    labeling: Labeling,
    tols: &Tolerances,
) -> Result<SharpVersion, SharpError> {
    if let Labeling::Ternary { depth } = labeling {
        if depth == 0 || depth > 32 {
            return Err(SharpError::BadDepth(depth));
        }
    }
    let joint = jointly_diagonalize(povm.effects(), tols.joint, tols.cluster)?;
    let blocks = &joint.blocks;

    // Maximality guard: jointly_diagonalize must not emit two blocks with the
    // same value vector; if it does, labeling cannot be injective.
    for i in 0..blocks.len() {
        for j in (i + 1)..blocks.len() {
            let max_diff = blocks[i]
                .values
                .iter()
                .zip(&blocks[j].values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if max_diff <= tols.cluster {
                return Err(SharpError::DegenerateBlocks { first: i, second: j });
            }
        }
    }

    let n = blocks.len();
    let index_pairs = || -> Vec<(f64, HermitianMatrix)> {
        blocks
            .iter()
            .enumerate()
            .map(|(k, b)| ((k + 1) as f64 / (n + 1) as f64, b.projector.clone()))
            .collect()
    };

    match labeling {
        Labeling::Index => SharpVersion::assemble(index_pairs(), labeling.name(), false),
        Labeling::Ternary { depth } => {
            let digit_strings: Vec<Vec<u8>> = blocks
                .iter()
                .map(|b| {
                    let rows: Vec<Vec<u8>> =
                        b.values.iter().map(|&t| binary_digits(t, depth)).collect();
                    let mut interleaved = Vec::with_capacity(rows.len() * depth as usize);
                    for j in 0..depth as usize {
                        for row in &rows {
                            interleaved.push(row[j]);
                        }
                    }
                    interleaved
                })
                .collect();
            let mut collision = false;
            'outer: for i in 0..n {
                for j in (i + 1)..n {
                    if digit_strings[i] == digit_strings[j] {
                        collision = true;
                        break 'outer;
                    }
                }
            }
            let mut values: Vec<f64> = Vec::new();
            if !collision {
                values = blocks
                    .iter()
                    .map(|b| {
                        let rows: Vec<Vec<u8>> =
                            b.values.iter().map(|&t| binary_digits(t, depth)).collect();
                        ternary_value(&rows)
                    })
                    .collect();
                // Distinct digit strings can still round to equal floats once
                // the tail digits drop below f64 resolution; treat as collision.
                let mut sorted = values.clone();
                sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    collision = true;
                }
            }
            if collision {
                SharpVersion::assemble(index_pairs(), "ternary", true)
            } else {
                let pairs = values
                    .into_iter()
                    .zip(blocks.iter().map(|b| b.projector.clone()))
                    .collect();
                SharpVersion::assemble(pairs, "ternary", false)
            }
        }
    }
}

/// Finite proxy for `A^W(F) = A^W(A)`: (a) every effect is constant on every
/// projector block of `sharp` (each `F(Δ)` is a function of `A`), and (b) the
/// joint eigenstructure of the effects has exactly as many blocks as `sharp`
/// has projectors (`A` does not over-resolve `F`). Non-commutative input
/// yields `false`.
pub fn verify_generating_equality(
    povm: &DiscretePovm,
    sharp: &SharpVersion,
    tols: &Tolerances,
) -> bool {
    if povm.dim() != sharp.dim() {
        return false;
    }
    for effect in povm.effects() {
        for proj in sharp.projectors() {
            let trace = proj.trace();
            if trace <= 0.0 {
                return false;
            }
            let mean = (proj.matrix() * effect.matrix()).trace().re / trace;
            let residual =
                effect.matrix() * proj.matrix() - proj.matrix() * Complex64::new(mean, 0.0);
            if spectral_norm(&residual) > tols.recon {
                return false;
            }
        }
    }
    match jointly_diagonalize(povm.effects(), tols.joint, tols.cluster) {
        Ok(joint) => joint.n_blocks() == sharp.n_projectors(),
        Err(_) => false,
    }
}

/// Uniqueness up to label bijection: true iff the eigenspace partitions
/// match, i.e. there is a bijection pairing every projector of `a` with a
/// projector of `b` within `tol` in spectral norm. Eigenvalue labels are
/// ignored.
pub fn sharp_versions_equivalent(a: &SharpVersion, b: &SharpVersion, tol: f64) -> bool {
    if a.dim() != b.dim() || a.n_projectors() != b.n_projectors() {
        return false;
    }
    let mut used = vec![false; b.n_projectors()];
    for pa in a.projectors() {
        let mut matched: Option<usize> = None;
        for (j, pb) in b.projectors().iter().enumerate() {
            if spectral_norm(&(pa.matrix() - pb.matrix())) <= tol {
                if matched.is_some() {
                    return false;
                }
                matched = Some(j);
            }
        }
        match matched {
            Some(j) if !used[j] => used[j] = true,
            _ => return false,
        }
    }
    true
}

/// Wire format: `{ "eigenvalues": [...], "projectors": [matrix, ...],
/// "labeling": "ternary|index", "fallback_used": bool }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SharpJson {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<MatrixJson>,
    pub labeling: String,
    pub fallback_used: bool,
}

impl SharpJson {
    pub fn from_sharp(s: &SharpVersion) -> Self {
        Self {
            eigenvalues: s.eigenvalues().to_vec(),
            projectors: s.projectors().iter().map(MatrixJson::from).collect(),
            labeling: s.labeling().to_string(),
            fallback_used: s.fallback_used(),
        }
    }

    pub fn to_sharp(&self, tols: &Tolerances) -> Result<SharpVersion, String> {
        if self.eigenvalues.len() != self.projectors.len() {
            return Err(format!(
                "{} eigenvalues vs {} projectors",
                self.eigenvalues.len(),
                self.projectors.len()
            ));
        }
        if self.eigenvalues.is_empty() {
            return Err("sharp version must have at least one projector".into());
        }
        let mut pairs = Vec::with_capacity(self.eigenvalues.len());
        for (i, (lam, wire)) in self.eigenvalues.iter().zip(&self.projectors).enumerate() {
            if !(0.0..=1.0).contains(lam) {
                return Err(format!("eigenvalue {i} = {lam} outside [0, 1]"));
            }
            let mat = wire.to_matrix().map_err(|e| format!("projector {i}: {e}"))?;
            let herm = HermitianMatrix::new(mat, tols.hermitian)
                .map_err(|e| format!("projector {i}: {e}"))?;
            pairs.push((*lam, herm));
        }
        let labeling: &'static str = match self.labeling.as_str() {
            "index" => "index",
            "ternary" => "ternary",
            other => return Err(format!("unknown labeling {other:?}")),
        };
        let sharp = SharpVersion::assemble(pairs, labeling, self.fallback_used)
            .map_err(|e| e.to_string())?;
        let defect = sharp.pvm_defect();
        if defect > 100.0 * tols.proj {
            return Err(format!(
                "projector family violates PVM axioms by {defect:.3e}"
            ));
        }
        Ok(sharp)
    }
}
