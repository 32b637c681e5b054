//! The discrete POVM data model: a finite outcome space, one effect per
//! outcome, validation, commutativity testing, and the spectrum.
//!
//! On a finite outcome space the Borel σ-algebra degenerates to the power
//! set, σ-additivity is a finite sum, and regularity holds trivially, so a
//! POVM is fully described by its singleton effects `F({x})`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operator::{
    commutator_norm, spectral_norm, Effect, HermitianMatrix, MatrixJson, OperatorError,
};
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum PovmError {
    #[error("unknown outcome label {0:?}")]
    UnknownLabel(String),

    #[error("duplicate outcome label {0:?}")]
    DuplicateLabel(String),

    #[error("outcome space must contain at least one label")]
    EmptySpace,

    #[error("expected {expected} {what}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("positions must be strictly increasing (violated at index {0})")]
    PositionsNotIncreasing(usize),

    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// A finite, ordered outcome space, optionally with metric positions
/// (real grid points) attached to the labels.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSpace {
    labels: Vec<String>,
    positions: Option<Vec<f64>>,
}

impl OutcomeSpace {
    pub fn new(labels: Vec<String>, positions: Option<Vec<f64>>) -> Result<Self, PovmError> {
        if labels.is_empty() {
            return Err(PovmError::EmptySpace);
        }
        let mut seen = std::collections::HashSet::new();
        for label in &labels {
            if !seen.insert(label) {
                return Err(PovmError::DuplicateLabel(label.clone()));
            }
        }
        if let Some(pos) = &positions {
            if pos.len() != labels.len() {
                return Err(PovmError::LengthMismatch {
                    what: "positions",
                    expected: labels.len(),
                    got: pos.len(),
                });
            }
            for i in 1..pos.len() {
                if pos[i] <= pos[i - 1] {
                    return Err(PovmError::PositionsNotIncreasing(i));
                }
            }
        }
        Ok(Self { labels, positions })
    }

    /// Labels `"x0", "x1", …` without positions.
    pub fn indexed(n: usize) -> Self {
        Self {
            labels: (0..n).map(|i| format!("x{i}")).collect(),
            positions: None,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn positions(&self) -> Option<&[f64]> {
        self.positions.as_deref()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A subset Δ of the outcome space, by label.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutcomeSubset {
    labels: Vec<String>,
}

impl OutcomeSubset {
    pub fn new(labels: Vec<String>) -> Result<Self, PovmError> {
        let mut seen = std::collections::HashSet::new();
        for label in &labels {
            if !seen.insert(label) {
                return Err(PovmError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels })
    }

    pub fn empty() -> Self {
        Self { labels: Vec::new() }
    }

    pub fn of(labels: &[&str]) -> Self {
        Self {
            labels: labels.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A normalized family of effects over a finite outcome space:
/// `Σ_j F({x_j}) = 1` with each `F({x_j})` positive semi-definite.
///
/// Construction checks shapes and Hermiticity only; positivity and
/// normalization are reported by [`validate_povm`] so that defective inputs
/// can still be loaded and diagnosed.
#[derive(Debug, Clone)]
pub struct DiscretePovm {
    space: OutcomeSpace,
    effects: Vec<Effect>,
    dim: usize,
}

impl DiscretePovm {
    pub fn new(space: OutcomeSpace, effects: Vec<Effect>) -> Result<Self, PovmError> {
        if effects.len() != space.len() {
            return Err(PovmError::LengthMismatch {
                what: "effects",
                expected: space.len(),
                got: effects.len(),
            });
        }
        let dim = effects[0].dim();
        for e in &effects {
            if e.dim() != dim {
                return Err(PovmError::Operator(OperatorError::DimMismatch {
                    left: dim,
                    right: e.dim(),
                }));
            }
        }
        Ok(Self {
            space,
            effects,
            dim,
        })
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }
}

/// Per-effect diagnostics produced by [`validate_povm`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectCheck {
    pub label: String,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub hermiticity_defect: f64,
}

/// Report-style POVM validation result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmValidationReport {
    pub effects: Vec<EffectCheck>,
    pub normalization_defect: f64,
    pub passes: bool,
}

/// Check positivity, Hermiticity, and normalization of a POVM and report the
/// defects. Never fails: the report is data for the caller to render.
pub fn validate_povm(povm: &DiscretePovm, tols: &Tolerances) -> PovmValidationReport {
    let mut effects = Vec::with_capacity(povm.n_outcomes());
    let mut sum = DMatrix::<Complex64>::zeros(povm.dim(), povm.dim());
    let mut passes = true;
    for (label, effect) in povm.space.labels().iter().zip(&povm.effects) {
        let (lo, hi) = effect.spectral_range();
        let m = effect.matrix();
        let mut herm_defect: f64 = 0.0;
        for i in 0..povm.dim() {
            for j in i..povm.dim() {
                herm_defect = herm_defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if lo < -tols.eig || hi > 1.0 + tols.eig || herm_defect > tols.hermitian {
            passes = false;
        }
        effects.push(EffectCheck {
            label: label.clone(),
            min_eigenvalue: lo,
            max_eigenvalue: hi,
            hermiticity_defect: herm_defect,
        });
        sum += m;
    }
    sum -= DMatrix::<Complex64>::identity(povm.dim(), povm.dim());
    let normalization_defect = spectral_norm(&sum);
    if normalization_defect > tols.norm {
        passes = false;
    }
    PovmValidationReport {
        effects,
        normalization_defect,
        passes,
    }
}

/// `F(Δ) = Σ_{x∈Δ} F({x})` by finite σ-additivity.
pub fn effect_of(povm: &DiscretePovm, subset: &OutcomeSubset) -> Result<Effect, PovmError> {
    let mut acc = DMatrix::<Complex64>::zeros(povm.dim(), povm.dim());
    for label in subset.labels() {
        let idx = povm
            .space
            .index_of(label)
            .ok_or_else(|| PovmError::UnknownLabel(label.clone()))?;
        acc += povm.effects[idx].matrix();
    }
    Ok(Effect::new(HermitianMatrix::from_hermitian_parts(acc)))
}

/// Result of the pairwise commutativity scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommutativityReport {
    pub commutative: bool,
    pub worst_pair: Option<(String, String)>,
    pub max_commutator_norm: f64,
}

/// Scan all pairs of singleton effects. Sums of commuting matrices commute,
/// so the singleton effects suffice for all of `B(X)`.
pub fn is_commutative(povm: &DiscretePovm, tol: f64) -> CommutativityReport {
    let mut worst: Option<(usize, usize)> = None;
    let mut max_norm: f64 = 0.0;
    for i in 0..povm.effects.len() {
        for j in (i + 1)..povm.effects.len() {
            let norm = commutator_norm(povm.effects[i].hermitian(), povm.effects[j].hermitian())
                .expect("equal dims by construction");
            if norm > max_norm {
                max_norm = norm;
                worst = Some((i, j));
            }
        }
    }
    CommutativityReport {
        commutative: max_norm <= tol,
        worst_pair: worst.map(|(i, j)| {
            (
                povm.space.labels()[i].clone(),
                povm.space.labels()[j].clone(),
            )
        }),
        max_commutator_norm: max_norm,
    }
}

/// Spectrum of the POVM: labels whose singleton effect is non-null.
/// On a discrete space each singleton is open, so
/// `σ(F) = { x : ‖F({x})‖ > tol }`.
pub fn povm_spectrum(povm: &DiscretePovm, tol: f64) -> Vec<String> {
    povm.space
        .labels()
        .iter()
        .zip(&povm.effects)
        .filter(|(_, e)| e.spectral_norm() > tol)
        .map(|(l, _)| l.clone())
        .collect()
}

/// Wire format for the POVM JSON schema:
/// `{ "labels": [...], "positions": [...]?, "dim": d, "effects": [matrix, ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmJson {
    pub labels: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<f64>>,
    pub dim: usize,
    pub effects: Vec<MatrixJson>,
}

impl PovmJson {
    pub fn from_povm(povm: &DiscretePovm) -> Self {
        Self {
            labels: povm.space.labels().to_vec(),
            positions: povm.space.positions().map(|p| p.to_vec()),
            dim: povm.dim(),
            effects: povm
                .effects
                .iter()
                .map(|e| MatrixJson::from(e.hermitian()))
                .collect(),
        }
    }

    pub fn to_povm(&self, hermitian_tol: f64) -> Result<DiscretePovm, String> {
        let space = OutcomeSpace::new(self.labels.clone(), self.positions.clone())
            .map_err(|e| e.to_string())?;
        let mut effects = Vec::with_capacity(self.effects.len());
        for (i, wire) in self.effects.iter().enumerate() {
            if wire.dim != self.dim {
                return Err(format!(
                    "effect {i} has dim {}, POVM declares dim {}",
                    wire.dim, self.dim
                ));
            }
            let mat = wire.to_matrix().map_err(|e| format!("effect {i}: {e}"))?;
            let herm = HermitianMatrix::new(mat, hermitian_tol)
                .map_err(|e| format!("effect {i}: {e}"))?;
            effects.push(Effect::new(herm));
        }
        DiscretePovm::new(space, effects).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::operator::spectral_decompose;
    use crate::tol;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag_povm(rows: &[&[f64]]) -> DiscretePovm {
        let effects = rows
            .iter()
            .map(|r| Effect::new(HermitianMatrix::from_real_diagonal(r)))
            .collect();
        DiscretePovm::new(OutcomeSpace::indexed(rows.len()), effects).unwrap()
    }

    fn qubit_povm() -> DiscretePovm {
        diag_povm(&[&[0.7, 0.2], &[0.3, 0.8]])
    }

    #[test]
    fn validate_passes_exact_normalization() {
        let report = validate_povm(&qubit_povm(), &Tolerances::default());
        assert!(report.passes);
        assert_abs_diff_eq!(report.normalization_defect, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn validate_reports_normalization_defect() {
        let bad = diag_povm(&[&[0.7, 0.2], &[0.2, 0.8]]);
        let report = validate_povm(&bad, &Tolerances::default());
        assert!(!report.passes);
        assert_abs_diff_eq!(report.normalization_defect, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn validate_passes_random_pvm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dim = 5;
        let mat = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let herm = HermitianMatrix::from_hermitian_parts(mat);
        let decomp = spectral_decompose(&herm, tol::CLUSTER);
        let effects: Vec<Effect> = decomp.projectors.into_iter().map(Effect::new).collect();
        let povm = DiscretePovm::new(OutcomeSpace::indexed(effects.len()), effects).unwrap();
        let report = validate_povm(&povm, &Tolerances::default());
        assert!(report.passes, "report: {report:?}");
    }

    #[test]
    fn perturbing_one_effect_shows_in_defect() {
        let povm = qubit_povm();
        let bumped = Effect::new(HermitianMatrix::from_hermitian_parts(
            povm.effects()[0].matrix()
                + DMatrix::<Complex64>::identity(2, 2) * Complex64::new(0.1, 0.0),
        ));
        let perturbed = DiscretePovm::new(
            povm.space().clone(),
            vec![bumped, povm.effects()[1].clone()],
        )
        .unwrap();
        let report = validate_povm(&perturbed, &Tolerances::default());
        assert_abs_diff_eq!(report.normalization_defect, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn effect_of_empty_full_and_singleton() {
        let povm = qubit_povm();
        let zero = effect_of(&povm, &OutcomeSubset::empty()).unwrap();
        assert_abs_diff_eq!(zero.spectral_norm(), 0.0, epsilon = 1e-15);

        let full = effect_of(&povm, &OutcomeSubset::of(&["x0", "x1"])).unwrap();
        let defect = full.matrix() - DMatrix::<Complex64>::identity(2, 2);
        assert!(spectral_norm(&defect) < 1e-14);

        let single = effect_of(&povm, &OutcomeSubset::of(&["x0"])).unwrap();
        assert_abs_diff_eq!(single.matrix()[(0, 0)].re, 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(single.matrix()[(1, 1)].re, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn effect_of_unknown_label_errors() {
        let povm = qubit_povm();
        assert!(matches!(
            effect_of(&povm, &OutcomeSubset::of(&["nope"])),
            Err(PovmError::UnknownLabel(_))
        ));
    }

    #[test]
    fn effect_of_is_additive_over_random_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..4).map(|_| rng.gen_range(0.0..0.25)).collect())
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let povm = diag_povm(&refs);
        for _ in 0..50 {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for label in povm.space().labels() {
                if rng.gen_bool(0.5) {
                    left.push(label.clone());
                } else {
                    right.push(label.clone());
                }
            }
            let l = effect_of(&povm, &OutcomeSubset::new(left.clone()).unwrap()).unwrap();
            let r = effect_of(&povm, &OutcomeSubset::new(right.clone()).unwrap()).unwrap();
            let both = effect_of(
                &povm,
                &OutcomeSubset::new(left.into_iter().chain(right).collect()).unwrap(),
            )
            .unwrap();
            let defect = l.matrix() + r.matrix() - both.matrix();
            assert!(spectral_norm(&defect) <= 1e-12 * povm.dim() as f64);
        }
    }

    #[test]
    fn two_outcome_povm_is_commutative() {
        // {F, 1 − F} always commutes.
        let f = HermitianMatrix::new(
            DMatrix::from_fn(2, 2, |i, j| {
                Complex64::new([[0.6, 0.2], [0.2, 0.3]][i][j], 0.0)
            }),
            tol::HERMITIAN,
        )
        .unwrap();
        let complement = HermitianMatrix::from_hermitian_parts(
            DMatrix::<Complex64>::identity(2, 2) - f.matrix(),
        );
        let povm = DiscretePovm::new(
            OutcomeSpace::indexed(2),
            vec![Effect::new(f), Effect::new(complement)],
        )
        .unwrap();
        let report = is_commutative(&povm, tol::JOINT);
        assert!(report.commutative);
    }

    #[test]
    fn rank_one_mix_is_not_commutative() {
        // {0.5|0⟩⟨0|, 0.5|+⟩⟨+|, 1 − rest}: ‖[F0, F1]‖ = 0.125 (worked by hand).
        let f0 = HermitianMatrix::from_real_diagonal(&[0.5, 0.0]);
        let plus = DMatrix::from_fn(2, 2, |_, _| Complex64::new(0.25, 0.0));
        let f1 = HermitianMatrix::from_hermitian_parts(plus);
        let rest = HermitianMatrix::from_hermitian_parts(
            DMatrix::<Complex64>::identity(2, 2) - f0.matrix() - f1.matrix(),
        );
        let povm = DiscretePovm::new(
            OutcomeSpace::indexed(3),
            vec![Effect::new(f0), Effect::new(f1), Effect::new(rest)],
        )
        .unwrap();
        let report = is_commutative(&povm, tol::JOINT);
        assert!(!report.commutative);
        assert_abs_diff_eq!(report.max_commutator_norm, 0.125, epsilon = 1e-12);
        assert!(report.worst_pair.is_some());
    }

    #[test]
    fn diagonal_family_commutes_with_zero_norm() {
        let report = is_commutative(&qubit_povm(), tol::JOINT);
        assert!(report.commutative);
        assert_abs_diff_eq!(report.max_commutator_norm, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn commutativity_is_invariant_under_relabeling() {
        let povm = diag_povm(&[&[0.5, 0.1], &[0.2, 0.6], &[0.3, 0.3]]);
        let relabeled = DiscretePovm::new(
            OutcomeSpace::new(vec!["c".into(), "a".into(), "b".into()], None).unwrap(),
            vec![
                povm.effects()[2].clone(),
                povm.effects()[0].clone(),
                povm.effects()[1].clone(),
            ],
        )
        .unwrap();
        let a = is_commutative(&povm, tol::JOINT);
        let b = is_commutative(&relabeled, tol::JOINT);
        assert_eq!(a.commutative, b.commutative);
        assert_abs_diff_eq!(
            a.max_commutator_norm,
            b.max_commutator_norm,
            epsilon = 1e-14
        );
    }

    #[test]
    fn spectrum_drops_null_effects() {
        let povm = DiscretePovm::new(
            OutcomeSpace::new(vec!["a".into(), "b".into()], None).unwrap(),
            vec![
                Effect::new(HermitianMatrix::from_real_diagonal(&[1.0, 1.0])),
                Effect::new(HermitianMatrix::zeros(2)),
            ],
        )
        .unwrap();
        assert_eq!(povm_spectrum(&povm, tol::SPECTRUM), vec!["a".to_string()]);
        assert_eq!(povm_spectrum(&qubit_povm(), tol::SPECTRUM).len(), 2);
    }

    #[test]
    fn povm_json_roundtrip() {
        let povm = qubit_povm();
        let wire = PovmJson::from_povm(&povm);
        let text = serde_json::to_string(&wire).unwrap();
        assert!(!text.contains("positions"));
        let back: PovmJson = serde_json::from_str(&text).unwrap();
        let restored = back.to_povm(tol::HERMITIAN).unwrap();
        assert_eq!(restored.space().labels(), povm.space().labels());
        for (a, b) in restored.effects().iter().zip(povm.effects()) {
            assert!(spectral_norm(&(a.matrix() - b.matrix())) < 1e-15);
        }
    }
}
