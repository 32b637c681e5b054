//! Builders for unsharp position observables: convolution smearings of the
//! grid position PVM on bounded domains, the optimal Gaussian kernel, and
//! the position marginal of a phase-space observable.
//!
//! `L²` over the domain is discretized as complex amplitudes on the grid
//! with inner-product weight `h`, so the position operator is multiplication
//! by the grid coordinate and every smeared effect is diagonal:
//! `F(Δ) = diag(μ_Δ(x_j))`.

use num_complex::Complex64;
use thiserror::Error;

use crate::continuity::{kernel_value, ContinuityError, ConvolutionKernel, IntervalSet, RealGrid};
use crate::operator::{Effect, HermitianMatrix};
use crate::povm::{DiscretePovm, OutcomeSpace, PovmError};

#[derive(Debug, Error)]
pub enum ObservableError {
    #[error("state mass Σ|ψ|²·h = {0}, expected 1")]
    UnnormalizedState(f64),

    #[error("kernel mass = {0}, expected 1 within {1}")]
    UnnormalizedKernel(f64, f64),

    #[error("width parameter must be positive, got {0}")]
    BadWidth(f64),

    #[error("grid too narrow: Gaussian tail mass bound {bound:.3e} exceeds 1e-12")]
    GridTooNarrow { bound: f64 },

    #[error("amplitude count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Kernel(#[from] ContinuityError),

    #[error(transparent)]
    Povm(#[from] PovmError),
}

/// An unsharp position observable `Q^f`: the position PVM on `domain`
/// smeared by `kernel`, diagonal in the grid basis.
#[derive(Debug, Clone)]
pub struct UnsharpPosition {
    domain: RealGrid,
    kernel: ConvolutionKernel,
}

impl UnsharpPosition {
    pub fn domain(&self) -> &RealGrid {
        &self.domain
    }

    pub fn kernel(&self) -> &ConvolutionKernel {
        &self.kernel
    }

    /// `μ_Δ(x)`.
    pub fn mu(&self, delta: &IntervalSet, x: f64) -> f64 {
        kernel_value(&self.kernel, delta, x)
    }

    /// Diagonal of `F(Δ)`: `μ_Δ(x_j)` per domain grid point.
    pub fn diagonal(&self, delta: &IntervalSet) -> Vec<f64> {
        self.domain
            .points()
            .map(|x| kernel_value(&self.kernel, delta, x))
            .collect()
    }

    /// `F(Δ)` as a dense diagonal effect.
    pub fn effect_of(&self, delta: &IntervalSet) -> Effect {
        Effect::new(HermitianMatrix::from_real_diagonal(&self.diagonal(delta)))
    }

    /// `‖F(Δ)‖ = max_j μ_Δ(x_j)`.
    pub fn norm_of(&self, delta: &IntervalSet) -> f64 {
        self.diagonal(delta).into_iter().fold(0.0, f64::max)
    }

    /// `⟨ψ, F(Δ)ψ⟩ = Σ_j μ_Δ(x_j)·|ψ_j|²·h` for a normalized state.
    pub fn expectation(
        &self,
        delta: &IntervalSet,
        psi: &[Complex64],
    ) -> Result<f64, ObservableError> {
        if psi.len() != self.domain.n {
            return Err(ObservableError::LengthMismatch {
                expected: self.domain.n,
                got: psi.len(),
            });
        }
        let mass: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.domain.step;
        if (mass - 1.0).abs() > 1e-6 {
            return Err(ObservableError::UnnormalizedState(mass));
        }
        let value: f64 = self
            .domain
            .points()
            .zip(psi)
            .map(|(x, a)| kernel_value(&self.kernel, delta, x) * a.norm_sqr())
            .sum::<f64>()
            * self.domain.step;
        Ok(value.clamp(0.0, 1.0))
    }

    /// The same quadratic form through the dense effect matrix, with the
    /// discretization weight `h`. Agrees with [`Self::expectation`] to
    /// rounding; kept as the independent second route.
    pub fn expectation_via_matrix(
        &self,
        delta: &IntervalSet,
        psi: &[Complex64],
    ) -> Result<f64, ObservableError> {
        if psi.len() != self.domain.n {
            return Err(ObservableError::LengthMismatch {
                expected: self.domain.n,
                got: psi.len(),
            });
        }
        let effect = self.effect_of(delta);
        let vec = nalgebra::DVector::from_column_slice(psi);
        let form = (vec.adjoint() * effect.matrix() * &vec)[(0, 0)].re;
        Ok(form * self.domain.step)
    }

    /// `‖F({cell_j})‖` for cells `[x_j, x_j + width)` anchored at each grid
    /// point: the max of `μ_cell(x)` over the domain grid.
    pub fn atom_norms(&self, width: f64) -> Vec<f64> {
        let xs: Vec<f64> = self.domain.points().collect();
        xs.iter()
            .map(|&anchor| {
                let cell = IntervalSet::interval(anchor, anchor + width);
                xs.iter()
                    .map(|&x| kernel_value(&self.kernel, &cell, x))
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Materialize as a [`DiscretePovm`] over grid cells: the first cell is
    /// `(-∞, x_1)`, interior cells are `[x_j, x_{j+1})`, the last is
    /// `[x_{n-1}, ∞)`, so the cells partition the line and the effects sum to
    /// the identity within quadrature error.
    pub fn to_discrete_povm(&self) -> Result<DiscretePovm, ObservableError> {
        let n = self.domain.n;
        let labels: Vec<String> = (0..n).map(|j| format!("{}", self.domain.point(j))).collect();
        let positions: Vec<f64> = self.domain.points().collect();
        let mut effects = Vec::with_capacity(n);
        for j in 0..n {
            let cell = if j == 0 {
                IntervalSet::interval(f64::NEG_INFINITY, self.domain.point(1))
            } else if j == n - 1 {
                IntervalSet::interval(self.domain.point(j), f64::INFINITY)
            } else {
                IntervalSet::interval(self.domain.point(j), self.domain.point(j + 1))
            };
            effects.push(self.effect_of(&cell));
        }
        let space = OutcomeSpace::new(labels, Some(positions))?;
        Ok(DiscretePovm::new(space, effects)?)
    }
}

/// Smear the grid position PVM by a normalized convolution kernel.
pub fn build_unsharp_position(
    kernel: ConvolutionKernel,
    domain: RealGrid,
    quad_tol: f64,
) -> Result<UnsharpPosition, ObservableError> {
    let mass = kernel.total_mass();
    if (mass - 1.0).abs() > quad_tol {
        return Err(ObservableError::UnnormalizedKernel(mass, quad_tol));
    }
    Ok(UnsharpPosition { domain, kernel })
}

/// Gaussian tail bound `P(Z > t) ≤ φ(t)/t` for the standard normal, `t ≥ 1`.
fn gaussian_tail_bound(t: f64) -> f64 {
    if t < 1.0 {
        return 0.5;
    }
    let pdf = (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    pdf / t
}

/// The optimal phase-space kernel: a Gaussian density of standard deviation
/// `l` with sup bound `M = 1/(l√(2π))`, sampled on `grid`.
///
/// Fails if the grid clips more than `1e-12` of the mass (the `±40l`
/// convention leaves a tail below `1e-300`).
pub fn optimal_gaussian_kernel(
    l: f64,
    grid: RealGrid,
    quad_tol: f64,
) -> Result<ConvolutionKernel, ObservableError> {
    if !l.is_finite() || l <= 0.0 {
        return Err(ObservableError::BadWidth(l));
    }
    if grid.start >= 0.0 || grid.end() <= 0.0 {
        return Err(ObservableError::GridTooNarrow { bound: 0.5 });
    }
    let bound = gaussian_tail_bound(-grid.start / l) + gaussian_tail_bound(grid.end() / l);
    if bound > 1e-12 {
        return Err(ObservableError::GridTooNarrow { bound });
    }
    let m = 1.0 / (l * (2.0 * std::f64::consts::PI).sqrt());
    let density: Vec<f64> = grid
        .points()
        .map(|x| m * (-x * x / (2.0 * l * l)).exp())
        .collect();
    Ok(ConvolutionKernel::new(grid, density, true, quad_tol)?.with_sup_bound(m))
}

/// Position marginal of the phase-space observable built on the state `f`:
/// an unsharp position whose smearing density is `|f|²`.
///
/// The state must satisfy `Σ|f_j|²·h = 1` within `quad_tol`; the sampled
/// `|f|²` is used as-is, so a state with `|f|²` equal to a supplied kernel
/// density reproduces [`build_unsharp_position`] exactly.
pub fn phase_space_marginal(
    state: &[Complex64],
    grid: RealGrid,
    quad_tol: f64,
) -> Result<UnsharpPosition, ObservableError> {
    if state.len() != grid.n {
        return Err(ObservableError::LengthMismatch {
            expected: grid.n,
            got: state.len(),
        });
    }
    let mass: f64 = state.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.step;
    if (mass - 1.0).abs() > quad_tol {
        return Err(ObservableError::UnnormalizedState(mass));
    }
    let density: Vec<f64> = state.iter().map(|a| a.norm_sqr()).collect();
    let kernel = ConvolutionKernel::new(grid.clone(), density, false, quad_tol)?;
    Ok(UnsharpPosition {
        domain: grid,
        kernel,
    })
}
