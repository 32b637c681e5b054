//! Shared fixture generators for the integration and acceptance suites:
//! seeded random commutative POVMs (smearings of random PVMs by random
//! stochastic tables), perturbed non-commutative variants, random PVMs, and
//! random kernel tables.

// Each test target compiles this module separately and uses its own subset.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use povm_kit::operator::{Effect, HermitianMatrix};
use povm_kit::povm::{DiscretePovm, OutcomeSpace};
use povm_kit::KernelTable;
use rand::Rng;

/// Haar-ish random unitary from the QR factorization of a complex Gaussian
/// matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<Complex64> {
    let raw = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    raw.qr().q()
}

/// Random partition of `dim` basis vectors into `n_blocks` non-empty blocks.
fn random_partition<R: Rng>(rng: &mut R, dim: usize, n_blocks: usize) -> Vec<usize> {
    loop {
        let assignment: Vec<usize> = (0..dim).map(|_| rng.gen_range(0..n_blocks)).collect();
        let mut seen = vec![false; n_blocks];
        for &b in &assignment {
            seen[b] = true;
        }
        if seen.into_iter().all(|s| s) {
            return assignment;
        }
    }
}

/// Random stochastic rows (one per block) whose pairwise sup-distance is at
/// least `min_gap`, so the generated POVM has a separating kernel.
fn random_stochastic_rows<R: Rng>(
    rng: &mut R,
    n_blocks: usize,
    n_outcomes: usize,
    min_gap: f64,
) -> Vec<Vec<f64>> {
    loop {
        let rows: Vec<Vec<f64>> = (0..n_blocks)
            .map(|_| {
                let raw: Vec<f64> = (0..n_outcomes)
                    .map(|_| -(rng.gen_range(1e-9..1.0f64)).ln())
                    .collect();
                let total: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / total).collect()
            })
            .collect();
        let mut ok = true;
        'pairs: for i in 0..n_blocks {
            for j in (i + 1)..n_blocks {
                let gap = rows[i]
                    .iter()
                    .zip(&rows[j])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                if gap < min_gap {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if ok {
            return rows;
        }
    }
}

/// A random commutative POVM: smear a random PVM (block projectors conjugated
/// by one unitary) with a random stochastic table. Returns the POVM and the
/// number of joint blocks it was built from.
pub fn random_commutative_povm<R: Rng>(
    rng: &mut R,
    dim: usize,
    n_outcomes: usize,
) -> (DiscretePovm, usize) {
    let n_blocks = rng.gen_range(1..=dim);
    let assignment = random_partition(rng, dim, n_blocks);
    let rows = random_stochastic_rows(rng, n_blocks, n_outcomes, 1e-5);
    let u = random_unitary(rng, dim);
    let effects: Vec<Effect> = (0..n_outcomes)
        .map(|j| {
            let diag: Vec<f64> = assignment.iter().map(|&b| rows[b][j]).collect();
            let d = HermitianMatrix::from_real_diagonal(&diag);
            let conjugated = &u * d.matrix() * u.adjoint();
            Effect::new(HermitianMatrix::from_hermitian_parts(conjugated))
        })
        .collect();
    let povm = DiscretePovm::new(OutcomeSpace::indexed(n_outcomes), effects).unwrap();
    (povm, n_blocks)
}

/// A random PVM with `n_blocks` orthogonal projector outcomes.
pub fn random_pvm<R: Rng>(rng: &mut R, dim: usize, n_blocks: usize) -> DiscretePovm {
    let assignment = random_partition(rng, dim, n_blocks);
    let u = random_unitary(rng, dim);
    let effects: Vec<Effect> = (0..n_blocks)
        .map(|b| {
            let diag: Vec<f64> = assignment
                .iter()
                .map(|&a| if a == b { 1.0 } else { 0.0 })
                .collect();
            let d = HermitianMatrix::from_real_diagonal(&diag);
            let conjugated = &u * d.matrix() * u.adjoint();
            Effect::new(HermitianMatrix::from_hermitian_parts(conjugated))
        })
        .collect();
    DiscretePovm::new(OutcomeSpace::indexed(n_blocks), effects).unwrap()
}

/// Perturb a random commutative POVM (≥ 3 outcomes) into a non-commutative
/// one with max pairwise commutator norm ≥ `min_commutator`. Normalization is
/// preserved exactly; positivity may be slightly violated, which is irrelevant
/// for the detection paths under test.
pub fn perturbed_noncommutative_povm<R: Rng>(
    rng: &mut R,
    dim: usize,
    n_outcomes: usize,
    min_commutator: f64,
) -> DiscretePovm {
    assert!(n_outcomes >= 3, "need ≥ 3 outcomes to break commutativity");
    loop {
        let (povm, _) = random_commutative_povm(rng, dim, n_outcomes);
        let raw = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = HermitianMatrix::from_hermitian_parts(raw);
        let scale = 0.05 / povm_kit::operator::spectral_norm(h.matrix());
        let bump = h.matrix() * Complex64::new(scale, 0.0);
        let mut effects = povm.effects().to_vec();
        effects[0] = Effect::new(HermitianMatrix::from_hermitian_parts(
            effects[0].matrix() + &bump,
        ));
        effects[1] = Effect::new(HermitianMatrix::from_hermitian_parts(
            effects[1].matrix() - &bump,
        ));
        let candidate = DiscretePovm::new(povm.space().clone(), effects).unwrap();
        let report = povm_kit::povm::is_commutative(&candidate, 0.0);
        if report.max_commutator_norm >= min_commutator {
            return candidate;
        }
    }
}

/// Random valid kernel table with pairwise-distinct rows.
pub fn random_kernel_table<R: Rng>(
    rng: &mut R,
    sharp_values: &[f64],
    n_outcomes: usize,
) -> KernelTable {
    let rows = random_stochastic_rows(rng, sharp_values.len(), n_outcomes, 1e-5);
    let labels = (0..n_outcomes).map(|j| format!("x{j}")).collect();
    KernelTable::new(sharp_values.to_vec(), labels, rows).unwrap()
}
