//! Markov kernels of von Neumann triplets `(F, A, μ)` at finite dimension:
//! extraction of `μ` from a POVM and its sharp version, validation of the
//! kernel axioms, smearing a PVM by a kernel, and the point-separation test.
//!
//! A kernel is a table `μ[k][j] = μ_{{x_j}}(λ_k)` of transition
//! probabilities from sharp values to outcomes. At finite dimension every
//! weak Markov kernel is strong (there are no non-empty null sets), so one
//! table type represents both notions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operator::{spectral_norm, Effect, HermitianMatrix};
use crate::povm::{DiscretePovm, OutcomeSpace, PovmError};
use crate::sharp::SharpVersion;
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error(
        "effect {outcome} is not constant on sharp block {sharp_index} \
         (residual {residual:.3e}); F is not a function of this sharp version"
    )]
    NotAFunctionOfA {
        sharp_index: usize,
        outcome: usize,
        residual: f64,
    },

    #[error("kernel shape mismatch: {0}")]
    Shape(String),

    #[error(
        "sharp value {index} mismatch: table has {table}, sharp version has {sharp}"
    )]
    SharpValuesMismatch { index: usize, table: f64, sharp: f64 },

    #[error(transparent)]
    Povm(#[from] PovmError),
}

/// Transition-probability table `μ[k][j] = μ_{{x_j}}(λ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    sharp_values: Vec<f64>,
    labels: Vec<String>,
    entries: Vec<Vec<f64>>,
}

impl KernelTable {
    pub fn new(
        sharp_values: Vec<f64>,
        labels: Vec<String>,
        entries: Vec<Vec<f64>>,
    ) -> Result<Self, KernelError> {
        if entries.len() != sharp_values.len() {
            return Err(KernelError::Shape(format!(
                "{} rows vs {} sharp values",
                entries.len(),
                sharp_values.len()
            )));
        }
        for (k, row) in entries.iter().enumerate() {
            if row.len() != labels.len() {
                return Err(KernelError::Shape(format!(
                    "row {k} has {} entries, expected {}",
                    row.len(),
                    labels.len()
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for label in &labels {
            if !seen.insert(label.clone()) {
                return Err(KernelError::Shape(format!("duplicate label {label:?}")));
            }
        }
        Ok(Self {
            sharp_values,
            labels,
            entries,
        })
    }

    pub fn sharp_values(&self) -> &[f64] {
        &self.sharp_values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn n_sharp(&self) -> usize {
        self.sharp_values.len()
    }

    pub fn n_outcomes(&self) -> usize {
        self.labels.len()
    }

    /// `μ_Δ(λ_k)` for Δ given as outcome indices, by finite additivity.
    pub fn measure_of(&self, k: usize, outcome_indices: &[usize]) -> f64 {
        outcome_indices.iter().map(|&j| self.entries[k][j]).sum()
    }
}

/// Extract the Markov kernel of the triplet `(F, A, μ)`:
/// `μ[k][j] = tr(E({λ_k}) F({x_j})) / tr(E({λ_k}))`.
///
/// Each effect must act as a scalar on each sharp block; the residual
/// `‖F({x_j}) E({λ_k}) − μ[k][j] E({λ_k})‖` is checked against `tols.recon`
/// and a violation fails with [`KernelError::NotAFunctionOfA`], which signals
/// a non-commutative or mismatched input.
pub fn extract_kernel(
    povm: &DiscretePovm,
    sharp: &SharpVersion,
    tols: &Tolerances,
) -> Result<KernelTable, KernelError> {
    if povm.dim() != sharp.dim() {
        return Err(KernelError::Shape(format!(
            "POVM dim {} vs sharp dim {}",
            povm.dim(),
            sharp.dim()
        )));
    }
    let mut entries = Vec::with_capacity(sharp.n_projectors());
    for (k, proj) in sharp.projectors().iter().enumerate() {
        let trace = proj.trace();
        let mut row = Vec::with_capacity(povm.n_outcomes());
        for (j, effect) in povm.effects().iter().enumerate() {
            let mu = (proj.matrix() * effect.matrix()).trace().re / trace;
            let residual = effect.matrix() * proj.matrix()
                - proj.matrix() * Complex64::new(mu, 0.0);
            let norm = spectral_norm(&residual);
            if norm > tols.recon {
                return Err(KernelError::NotAFunctionOfA {
                    sharp_index: k,
                    outcome: j,
                    residual: norm,
                });
            }
            row.push(mu);
        }
        entries.push(row);
    }
    KernelTable::new(
        sharp.eigenvalues().to_vec(),
        povm.space().labels().to_vec(),
        entries,
    )
}

/// Report produced by [`validate_markov_kernel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelValidationReport {
    /// `(row, col, value)` entries outside `[-entry_tol, 1 + entry_tol]`.
    pub range_violations: Vec<(usize, usize, f64)>,
    /// `|Σ_j μ[k][j] − 1|` per row.
    pub row_sum_defects: Vec<f64>,
    pub max_row_defect: f64,
    /// Worst defect of `μ(Δ₁⊎Δ₂) = μ(Δ₁) + μ(Δ₂)` over random disjoint splits.
    pub additivity_defect: f64,
    pub passes: bool,
}

/// Check the Markov-kernel axioms on a table: entry ranges, row normalization
/// `μ_X(λ) = 1`, and finite σ-additivity over seeded random disjoint unions.
pub fn validate_markov_kernel(table: &KernelTable, tols: &Tolerances) -> KernelValidationReport {
    let mut range_violations = Vec::new();
    let mut row_sum_defects = Vec::with_capacity(table.n_sharp());
    for (k, row) in table.entries().iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v < -tols.entry || v > 1.0 + tols.entry {
                range_violations.push((k, j, v));
            }
        }
        row_sum_defects.push((row.iter().sum::<f64>() - 1.0).abs());
    }
    let max_row_defect = row_sum_defects.iter().copied().fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(0x6b65_726e);
    let mut additivity_defect: f64 = 0.0;
    let all: Vec<usize> = (0..table.n_outcomes()).collect();
    for _ in 0..32 {
        let mut shuffled = all.clone();
        shuffled.shuffle(&mut rng);
        let cut = rng.gen_range(0..=shuffled.len());
        let (left, right) = shuffled.split_at(cut);
        let mut left: Vec<usize> = left.to_vec();
        let mut right: Vec<usize> = right.to_vec();
        left.sort_unstable();
        right.sort_unstable();
        for k in 0..table.n_sharp() {
            let joined = table.measure_of(k, &all);
            let split = table.measure_of(k, &left) + table.measure_of(k, &right);
            additivity_defect = additivity_defect.max((joined - split).abs());
        }
    }

    let passes = range_violations.is_empty()
        && max_row_defect <= tols.row
        && additivity_defect <= 1e-12 * table.n_outcomes() as f64;
    KernelValidationReport {
        range_violations,
        row_sum_defects,
        max_row_defect,
        additivity_defect,
        passes,
    }
}

/// Smear the PVM of `sharp` by the kernel: `F({x_j}) = Σ_k μ[k][j] E({λ_k})`.
///
/// The table's sharp values must match the sharp version's eigenvalues
/// entry-wise; the result carries the table's outcome labels.
pub fn smear(
    sharp: &SharpVersion,
    table: &KernelTable,
    tols: &Tolerances,
) -> Result<DiscretePovm, KernelError> {
    if table.n_sharp() != sharp.n_projectors() {
        return Err(KernelError::Shape(format!(
            "table has {} rows, sharp version has {} projectors",
            table.n_sharp(),
            sharp.n_projectors()
        )));
    }
    for (i, (&t, &s)) in table
        .sharp_values()
        .iter()
        .zip(sharp.eigenvalues())
        .enumerate()
    {
        if (t - s).abs() > tols.cluster {
            return Err(KernelError::SharpValuesMismatch {
                index: i,
                table: t,
                sharp: s,
            });
        }
    }
    let dim = sharp.dim();
    let mut effects = Vec::with_capacity(table.n_outcomes());
    for j in 0..table.n_outcomes() {
        let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
        for (k, proj) in sharp.projectors().iter().enumerate() {
            acc += proj.matrix() * Complex64::new(table.entries()[k][j], 0.0);
        }
        effects.push(Effect::new(HermitianMatrix::from_hermitian_parts(acc)));
    }
    let space = OutcomeSpace::new(table.labels().to_vec(), None)?;
    Ok(DiscretePovm::new(space, effects)?)
}

/// Result of the row-separation scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationReport {
    pub separates: bool,
    /// Pairs `(k, k')` of sharp indices whose rows coincide within tol.
    pub colliding_pairs: Vec<(usize, usize)>,
}

/// True iff the probability measures `μ_(·)(λ_k)` are pairwise distinct:
/// every two rows differ by more than `tol` in some outcome.
pub fn separates_points(table: &KernelTable, tol: f64) -> SeparationReport {
    let mut colliding_pairs = Vec::new();
    for k in 0..table.n_sharp() {
        for k2 in (k + 1)..table.n_sharp() {
            let max_diff = table.entries()[k]
                .iter()
                .zip(&table.entries()[k2])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if max_diff <= tol {
                colliding_pairs.push((k, k2));
            }
        }
    }
    SeparationReport {
        separates: colliding_pairs.is_empty(),
        colliding_pairs,
    }
}

/// Wire format: `{ "sharp_values": [...], "labels": [...], "entries": [[...]] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelJson {
    pub sharp_values: Vec<f64>,
    pub labels: Vec<String>,
    pub entries: Vec<Vec<f64>>,
}

impl KernelJson {
    pub fn from_table(t: &KernelTable) -> Self {
        Self {
            sharp_values: t.sharp_values().to_vec(),
            labels: t.labels().to_vec(),
            entries: t.entries().to_vec(),
        }
    }

    pub fn to_table(&self) -> Result<KernelTable, String> {
        KernelTable::new(
            self.sharp_values.clone(),
            self.labels.clone(),
            self.entries.clone(),
        )
        .map_err(|e| e.to_string())
    }
}
