//! Finite-dimensional positive-operator-valued measures (POVMs) and their
//! realization as Markov-kernel smearings of projection-valued measures,
//! together with continuity diagnostics on discretized real outcome spaces.
//!
//! The crate is organized around one pipeline and one diagnostic layer:
//!
//! - [`operator`] — dense Hermitian linear algebra: positivity, spectral
//!   decomposition, joint diagonalization of commuting families.
//! - [`povm`] — the discrete POVM data model over a finite outcome space.
//! - [`sharp`] — synthesis of a sharp version `A` (a self-adjoint operator
//!   whose eigenprojectors are the joint eigenblocks of the POVM), with
//!   injective eigenvalue labels in `[0, 1]`.
//! - [`kernel`] — extraction and validation of the Markov kernel `μ` of a
//!   von Neumann triplet `(F, A, μ)`, smearing a PVM by a kernel, and the
//!   point-separation test.
//! - [`continuity`] — convolution kernels on real grids and the
//!   Feller / strong-Feller / uniform-continuity / absolute-continuity /
//!   norm-1 diagnostics, plus the Dini monotone-convergence oracle.
//! - [`observables`] — builders for unsharp position observables: bounded
//!   domains, the optimal Gaussian kernel, and phase-space marginals.
//!
//! Every value is immutable after construction and every operation is a
//! pure function, so batch callers may parallelize over independent inputs.

pub mod continuity;
pub mod kernel;
pub mod observables;
pub mod operator;
pub mod povm;
pub mod sharp;
pub mod tol;

pub use continuity::{ConvolutionKernel, IntervalSet, RealGrid, ShrinkingFamily};
pub use kernel::KernelTable;
pub use operator::{Effect, HermitianMatrix, JointEigenstructure, SpectralDecomp};
pub use povm::{DiscretePovm, OutcomeSpace, OutcomeSubset};
pub use sharp::{Labeling, SharpVersion};
pub use tol::Tolerances;
