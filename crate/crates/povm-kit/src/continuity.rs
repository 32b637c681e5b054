//! Continuous-outcome diagnostics on real grids: convolution kernels
//! `μ_Δ(x) = ∫_Δ f(x−y) dy`, Feller and strong-Feller tests, uniform
//! continuity along shrinking families, absolute continuity, the norm-1
//! obstruction, and the Dini monotone-convergence oracle.
//!
//! Integrals are composite trapezoid at the kernel's native grid: every
//! kernel value is the exact integral of the piecewise-linear interpolant of
//! the sampled density, evaluated in O(1) from a cumulative table. This makes
//! additivity over disjoint interval sets exact up to rounding.
//!
//! Continuity on a grid is operationalized as adjacent-jump ≤ c·h with the
//! empirical constant c reported, never as a bare boolean: pointwise
//! continuity is not decidable from samples. Likewise the uniform-continuity
//! verdict is relative to the supplied shrinking family.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContinuityError {
    #[error("grid needs at least 2 points, got {0}")]
    GridTooSmall(usize),

    #[error("grid step must be positive, got {0}")]
    BadStep(f64),

    #[error("grid spacing is not uniform at index {0}")]
    NonUniformSpacing(usize),

    #[error("density sample {index} is negative: {value}")]
    NegativeDensity { index: usize, value: f64 },

    #[error("density integrates to {integral}, expected 1 within {tol}")]
    Unnormalized { integral: f64, tol: f64 },

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("interval {0} has upper bound below lower bound")]
    UnorderedInterval(usize),

    #[error("intervals {0} and {1} overlap")]
    OverlappingIntervals(usize, usize),

    #[error("interval bound is NaN")]
    NanBound,

    #[error("family member {0} is not contained in member {1}")]
    FamilyNotMonotone(usize, usize),

    #[error("sequence of sampled functions is empty")]
    EmptySequence,
}

/// A uniform real grid `x_i = start + i·step`, `i = 0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealGrid {
    pub start: f64,
    pub step: f64,
    pub n: usize,
}

impl RealGrid {
    pub fn new(start: f64, step: f64, n: usize) -> Result<Self, ContinuityError> {
        if n < 2 {
            return Err(ContinuityError::GridTooSmall(n));
        }
        if !step.is_finite() || step <= 0.0 || !start.is_finite() {
            return Err(ContinuityError::BadStep(step));
        }
        Ok(Self { start, step, n })
    }

    /// Build from explicit points, validating uniform spacing within 1e-12
    /// relative.
    pub fn from_points(points: &[f64]) -> Result<Self, ContinuityError> {
        if points.len() < 2 {
            return Err(ContinuityError::GridTooSmall(points.len()));
        }
        let step = points[1] - points[0];
        if !step.is_finite() || step <= 0.0 {
            return Err(ContinuityError::BadStep(step));
        }
        let scale = step.abs().max(points[0].abs()).max(1.0);
        for i in 1..points.len() {
            let gap = points[i] - points[i - 1];
            if (gap - step).abs() > 1e-12 * scale.max(gap.abs()) {
                return Err(ContinuityError::NonUniformSpacing(i));
            }
        }
        Self::new(points[0], step, points.len())
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.point(self.n - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.point(i))
    }
}

/// A half-open interval `[lo, hi)`; `lo = -∞` and `hi = +∞` are allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// A finite disjoint union of half-open intervals, sorted by lower bound.
/// Half-open bounds tile exactly, so disjoint unions have additive measure.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new(mut intervals: Vec<Interval>) -> Result<Self, ContinuityError> {
        for (i, iv) in intervals.iter().enumerate() {
            if iv.lo.is_nan() || iv.hi.is_nan() {
                return Err(ContinuityError::NanBound);
            }
            if iv.hi < iv.lo {
                return Err(ContinuityError::UnorderedInterval(i));
            }
        }
        intervals.sort_by(|a, b| a.lo.partial_cmp(&b.lo).expect("no NaN"));
        for i in 1..intervals.len() {
            if intervals[i].lo < intervals[i - 1].hi {
                return Err(ContinuityError::OverlappingIntervals(i - 1, i));
            }
        }
        Ok(Self { intervals })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Single interval `[lo, hi)`.
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self {
            intervals: vec![Interval { lo, hi }],
        }
    }

    /// Left tail `(-∞, b)`; as an integration domain this equals `(-∞, b]`.
    pub fn left_tail(b: f64) -> Self {
        Self::interval(f64::NEG_INFINITY, b)
    }

    pub fn right_tail(a: f64) -> Self {
        Self::interval(a, f64::INFINITY)
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty_set(&self) -> bool {
        self.intervals.iter().all(|iv| iv.hi <= iv.lo)
    }

    /// Total Lebesgue measure; may be infinite.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|iv| iv.hi - iv.lo).sum()
    }

    /// Measure of the intersection with the window `[lo, hi)`.
    pub fn measure_within(&self, lo: f64, hi: f64) -> f64 {
        self.intervals
            .iter()
            .map(|iv| (iv.hi.min(hi) - iv.lo.max(lo)).max(0.0))
            .sum()
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.lo <= x && x < iv.hi)
    }

    /// Translate by `s`.
    pub fn shift(&self, s: f64) -> Self {
        Self {
            intervals: self
                .intervals
                .iter()
                .map(|iv| Interval {
                    lo: iv.lo + s,
                    hi: iv.hi + s,
                })
                .collect(),
        }
    }

    /// Union with a set known to be disjoint from this one.
    pub fn union_disjoint(&self, other: &Self) -> Result<Self, ContinuityError> {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Self::new(all)
    }

    /// Set inclusion. Touching pieces of `other` are merged first, so a
    /// connected interval may be covered by an exact tiling.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        let merged = other.merged();
        self.intervals.iter().all(|iv| {
            if iv.hi <= iv.lo {
                return true;
            }
            merged.iter().any(|m| m.lo <= iv.lo && iv.hi <= m.hi)
        })
    }

    fn merged(&self) -> Vec<Interval> {
        let mut merged: Vec<Interval> = Vec::new();
        for iv in &self.intervals {
            if iv.hi <= iv.lo {
                continue;
            }
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(*iv),
            }
        }
        merged
    }
}

/// Draw a set of ≤ `max_pieces` disjoint intervals inside `[lo, hi)`.
pub fn random_interval_set<R: Rng>(rng: &mut R, lo: f64, hi: f64, max_pieces: usize) -> IntervalSet {
    let pieces = rng.gen_range(1..=max_pieces.max(1));
    let mut cuts: Vec<f64> = (0..2 * pieces).map(|_| rng.gen_range(lo..hi)).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let intervals = cuts
        .chunks(2)
        .map(|c| Interval { lo: c[0], hi: c[1] })
        .collect();
    IntervalSet::new(intervals).expect("sorted chunks are disjoint")
}

/// A monotone decreasing family of interval sets `Δ_1 ⊇ Δ_2 ⊇ …`.
#[derive(Debug, Clone)]
pub struct ShrinkingFamily {
    sets: Vec<IntervalSet>,
}

impl ShrinkingFamily {
    pub fn new(sets: Vec<IntervalSet>) -> Result<Self, ContinuityError> {
        for i in 1..sets.len() {
            if !sets[i].is_subset_of(&sets[i - 1]) {
                return Err(ContinuityError::FamilyNotMonotone(i, i - 1));
            }
        }
        Ok(Self { sets })
    }

    /// `Δ_i = [lo, lo + width/2^i)`, `i = 0..steps`.
    pub fn nested_halving(lo: f64, width: f64, steps: usize) -> Self {
        let sets = (0..steps)
            .map(|i| IntervalSet::interval(lo, lo + width / 2f64.powi(i as i32)))
            .collect();
        Self { sets }
    }

    /// Left tails `(-∞, b_i)` for a decreasing sequence of bounds.
    pub fn left_tails(bounds: &[f64]) -> Result<Self, ContinuityError> {
        Self::new(bounds.iter().map(|&b| IntervalSet::left_tail(b)).collect())
    }

    pub fn sets(&self) -> &[IntervalSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// A nonnegative density sampled on a uniform grid, normalized to unit mass,
/// defining the kernel `μ_Δ(x) = ∫_Δ f(x−y) dy`.
#[derive(Debug, Clone)]
pub struct ConvolutionKernel {
    grid: RealGrid,
    density: Vec<f64>,
    sup_bound: f64,
    smooth: bool,
    cumulative: Vec<f64>,
}

impl ConvolutionKernel {
    /// Validate samples (nonnegative, unit trapezoid mass within `quad_tol`)
    /// and precompute the cumulative integral.
    pub fn new(
        grid: RealGrid,
        density: Vec<f64>,
        smooth: bool,
        quad_tol: f64,
    ) -> Result<Self, ContinuityError> {
        let kernel = Self::new_unnormalized(grid, density, smooth)?;
        let mass = kernel.total_mass();
        if (mass - 1.0).abs() > quad_tol {
            return Err(ContinuityError::Unnormalized {
                integral: mass,
                tol: quad_tol,
            });
        }
        Ok(kernel)
    }

    /// Skip the normalization gate; for degenerate test densities (zero
    /// functions, spikes) the kernel values are still well defined.
    pub fn new_unnormalized(
        grid: RealGrid,
        density: Vec<f64>,
        smooth: bool,
    ) -> Result<Self, ContinuityError> {
        if density.len() != grid.n {
            return Err(ContinuityError::LengthMismatch {
                expected: grid.n,
                got: density.len(),
            });
        }
        for (i, &v) in density.iter().enumerate() {
            if v < 0.0 {
                return Err(ContinuityError::NegativeDensity { index: i, value: v });
            }
        }
        let mut cumulative = Vec::with_capacity(density.len());
        cumulative.push(0.0);
        for i in 1..density.len() {
            let cell = grid.step * (density[i - 1] + density[i]) * 0.5;
            cumulative.push(cumulative[i - 1] + cell);
        }
        let sup_bound = density.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            grid,
            density,
            sup_bound,
            smooth,
            cumulative,
        })
    }

    /// Override the sup bound with an analytically known value.
    pub fn with_sup_bound(mut self, m: f64) -> Self {
        self.sup_bound = m;
        self
    }

    pub fn grid(&self) -> &RealGrid {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn total_mass(&self) -> f64 {
        *self.cumulative.last().expect("n ≥ 2")
    }

    /// `∫_{x_0}^{x} f̂` where `f̂` is the piecewise-linear interpolant,
    /// clamped to the support window outside the grid.
    fn cumulative_at(&self, x: f64) -> f64 {
        if x <= self.grid.start {
            return 0.0;
        }
        if x >= self.grid.end() {
            return self.total_mass();
        }
        let t = (x - self.grid.start) / self.grid.step;
        let cell = (t.floor() as usize).min(self.grid.n - 2);
        let theta = x - self.grid.point(cell);
        let f0 = self.density[cell];
        let f1 = self.density[cell + 1];
        self.cumulative[cell] + f0 * theta + (f1 - f0) * theta * theta / (2.0 * self.grid.step)
    }

    /// Exact integral of the interpolant over `[a, b]`, `a ≤ b`.
    fn integral_between(&self, a: f64, b: f64) -> f64 {
        self.cumulative_at(b) - self.cumulative_at(a)
    }

    /// Linear interpolation of the density; zero outside the grid.
    pub fn density_at(&self, x: f64) -> f64 {
        if x < self.grid.start || x > self.grid.end() {
            return 0.0;
        }
        let t = (x - self.grid.start) / self.grid.step;
        let cell = (t.floor() as usize).min(self.grid.n - 2);
        let theta = (x - self.grid.point(cell)) / self.grid.step;
        self.density[cell] * (1.0 - theta) + self.density[cell + 1] * theta
    }
}

/// `μ_Δ(x) = ∫_Δ f(x−y) dy`, clamped to `[0, 1]`.
///
/// For each piece `[a, b)` of Δ the substitution `z = x − y` turns the
/// integral into `∫ f(z) dz` over `[x−b, x−a]`, evaluated from the kernel's
/// cumulative table. Additivity over disjoint pieces is exact.
pub fn kernel_value(kernel: &ConvolutionKernel, delta: &IntervalSet, x: f64) -> f64 {
    let mut acc = 0.0;
    for iv in delta.intervals() {
        acc += kernel.integral_between(x - iv.hi, x - iv.lo);
    }
    acc.clamp(0.0, 1.0)
}

/// Empirical smoothness of `x ↦ μ_Δ(x)` sampled on `grid`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusReport {
    /// `max |μ_Δ(x_{i+1}) − μ_Δ(x_i)| / h`.
    pub empirical_lipschitz: f64,
    /// `max |μ_Δ(x_{i+1}) − μ_Δ(x_i)|`.
    pub max_jump: f64,
}

pub fn continuity_modulus(
    kernel: &ConvolutionKernel,
    delta: &IntervalSet,
    grid: &RealGrid,
) -> ModulusReport {
    let mut max_jump: f64 = 0.0;
    let mut prev = kernel_value(kernel, delta, grid.point(0));
    for i in 1..grid.n {
        let cur = kernel_value(kernel, delta, grid.point(i));
        max_jump = max_jump.max((cur - prev).abs());
        prev = cur;
    }
    ModulusReport {
        empirical_lipschitz: max_jump / grid.step,
        max_jump,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceVerdict {
    Converging,
    NonConverging,
}

/// Norms along a shrinking family with the convergence verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniformContinuityReport {
    pub norms: Vec<f64>,
    pub verdict: ConvergenceVerdict,
    /// Largest index where the norm failed to decrease strictly.
    pub stall_index: Option<usize>,
}

/// Evaluate `‖F(Δ_i)‖` along a shrinking family.
///
/// `norm_of` supplies the POVM norm for a set; for diagonal grid POVMs this
/// is `max_j μ_Δ(x_j)`. The verdict is `Converging` iff the final norm falls
/// below `uc_tol`; it is relative to the supplied family.
pub fn uniform_continuity_test<F: Fn(&IntervalSet) -> f64>(
    norm_of: F,
    family: &ShrinkingFamily,
    uc_tol: f64,
) -> UniformContinuityReport {
    let norms: Vec<f64> = family.sets().iter().map(norm_of).collect();
    let mut stall_index = None;
    for i in 1..norms.len() {
        if norms[i] >= norms[i - 1] {
            stall_index = Some(i);
        }
    }
    let verdict = match norms.last() {
        Some(&last) if last <= uc_tol => ConvergenceVerdict::Converging,
        _ => ConvergenceVerdict::NonConverging,
    };
    UniformContinuityReport {
        norms,
        verdict,
        stall_index,
    }
}

/// Values of `G(λ_n) = ∫ g(y) f(λ_n − y) dy` along a sequence `λ_n → λ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FellerReport {
    pub values: Vec<f64>,
    pub limit_value: f64,
    pub deviations: Vec<f64>,
    pub converged: bool,
}

/// Test-function continuity of the kernel: integrate a bounded `g` (sampled
/// on the kernel grid) against the probability measure with density
/// `f(λ − ·)` and check convergence of `G(λ_n)` to `G(λ)`.
pub fn feller_test(
    kernel: &ConvolutionKernel,
    g: &[f64],
    seq: &[f64],
    limit: f64,
    feller_tol: f64,
) -> Result<FellerReport, ContinuityError> {
    if g.len() != kernel.grid().n {
        return Err(ContinuityError::LengthMismatch {
            expected: kernel.grid().n,
            got: g.len(),
        });
    }
    let integrate = |lambda: f64| -> f64 {
        let grid = kernel.grid();
        let mut acc = 0.0;
        for (i, gi) in g.iter().enumerate() {
            let w = if i == 0 || i == grid.n - 1 { 0.5 } else { 1.0 };
            acc += w * gi * kernel.density_at(lambda - grid.point(i));
        }
        acc * grid.step
    };
    let values: Vec<f64> = seq.iter().map(|&l| integrate(l)).collect();
    let limit_value = integrate(limit);
    let deviations: Vec<f64> = values.iter().map(|v| (v - limit_value).abs()).collect();
    let converged = deviations.last().is_some_and(|&d| d <= feller_tol);
    Ok(FellerReport {
        values,
        limit_value,
        deviations,
        converged,
    })
}

/// Per-set jump diagnostics from [`strong_feller_test`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaJumpReport {
    pub max_jump: f64,
    pub empirical_c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrongFellerReport {
    pub per_delta: Vec<DeltaJumpReport>,
    pub max_jump: f64,
    pub empirical_c: f64,
    /// All jumps within `jump_tol`; a spike-like density fails here.
    pub passes: bool,
}

/// Grid proxy for strong Feller continuity: for each Borel-proxy set Δ
/// (finite interval unions), the max adjacent jump of `x ↦ μ_Δ(x)` over the
/// evaluation grid, with the empirical constant `c = jump/h` reported.
pub fn strong_feller_test(
    kernel: &ConvolutionKernel,
    deltas: &[IntervalSet],
    grid: &RealGrid,
    jump_tol: f64,
) -> StrongFellerReport {
    let per_delta: Vec<DeltaJumpReport> = deltas
        .iter()
        .map(|delta| {
            let m = continuity_modulus(kernel, delta, grid);
            DeltaJumpReport {
                max_jump: m.max_jump,
                empirical_c: m.empirical_lipschitz,
            }
        })
        .collect();
    let max_jump = per_delta.iter().map(|d| d.max_jump).fold(0.0, f64::max);
    let empirical_c = per_delta.iter().map(|d| d.empirical_c).fold(0.0, f64::max);
    StrongFellerReport {
        per_delta,
        max_jump,
        empirical_c,
        passes: max_jump <= jump_tol,
    }
}

/// Atoms that vanish under refinement are declared when the refined norm
/// drops below this fraction of the coarse norm.
pub const NORM1_SHRINK_RATIO: f64 = 0.75;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Norm1Report {
    pub obstruction: bool,
    /// Indices of spectrum atoms whose norm vanishes under refinement.
    pub witnesses: Vec<usize>,
}

/// Necessary condition for the norm-1 property: a uniformly continuous POVM
/// with a spectrum point whose atom norm vanishes under grid refinement
/// cannot have it.
///
/// `atom_norms[j]` is `‖F({x_j})‖` at cell width `h` and
/// `refined_atom_norms[j]` at width `h/2`. An atom witnesses the obstruction
/// when it sits in the spectrum (`> tol`) and its refined norm either drops
/// below [`NORM1_SHRINK_RATIO`] of the coarse norm (limit 0 by geometric
/// decay) or below `tol` outright.
pub fn norm1_test(
    atom_norms: &[f64],
    refined_atom_norms: &[f64],
    uniformly_continuous: bool,
    tol: f64,
) -> Result<Norm1Report, ContinuityError> {
    if atom_norms.len() != refined_atom_norms.len() {
        return Err(ContinuityError::LengthMismatch {
            expected: atom_norms.len(),
            got: refined_atom_norms.len(),
        });
    }
    let mut witnesses = Vec::new();
    if uniformly_continuous {
        for (j, (&coarse, &refined)) in atom_norms.iter().zip(refined_atom_norms).enumerate() {
            let in_spectrum = coarse > tol;
            let vanishing = refined <= NORM1_SHRINK_RATIO * coarse || refined <= tol;
            if in_spectrum && vanishing {
                witnesses.push(j);
            }
        }
    }
    Ok(Norm1Report {
        obstruction: !witnesses.is_empty(),
        witnesses,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbsContinuityReport {
    pub holds: bool,
    /// `max ‖F(Δ)‖ / ν(Δ)` over members with `ν(Δ) > 0`.
    pub worst_ratio: f64,
    /// Index of the family member violating the bound, if any.
    pub worst_index: Option<usize>,
}

/// Domination check `‖F(Δ)‖ ≤ c·ν(Δ) + ac_tol` over a family of sets.
pub fn absolute_continuity_check<F, N>(
    norm_of: F,
    nu: N,
    c: f64,
    family: &[IntervalSet],
    ac_tol: f64,
) -> AbsContinuityReport
where
    F: Fn(&IntervalSet) -> f64,
    N: Fn(&IntervalSet) -> f64,
{
    let mut holds = true;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_index = None;
    for (i, delta) in family.iter().enumerate() {
        let norm = norm_of(delta);
        let measure = nu(delta);
        if norm > c * measure + ac_tol {
            holds = false;
            worst_index = Some(i);
        }
        if measure > 0.0 {
            worst_ratio = worst_ratio.max(norm / measure);
        }
    }
    AbsContinuityReport {
        holds,
        worst_ratio,
        worst_index,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiniReport {
    pub is_monotone: bool,
    pub pointwise_to_zero: bool,
    pub sup_norms: Vec<f64>,
    /// Claimed only when both hypotheses hold.
    pub uniform: bool,
}

/// Numeric oracle for monotone convergence on a compact grid: checks that the
/// sampled sequence is pointwise non-increasing and tends to zero, and
/// reports the sup-norm sequence. Uniform convergence is asserted only when
/// the hypotheses hold and the final sup norm is ≤ `tol`.
pub fn dini_uniform_convergence(
    f_seq: &[Vec<f64>],
    tol: f64,
) -> Result<DiniReport, ContinuityError> {
    if f_seq.is_empty() {
        return Err(ContinuityError::EmptySequence);
    }
    let len = f_seq[0].len();
    for f in f_seq {
        if f.len() != len {
            return Err(ContinuityError::LengthMismatch {
                expected: len,
                got: f.len(),
            });
        }
    }
    let mut is_monotone = true;
    for w in f_seq.windows(2) {
        if w[1].iter().zip(&w[0]).any(|(next, cur)| *next > cur + 1e-12) {
            is_monotone = false;
            break;
        }
    }
    let last = f_seq.last().expect("non-empty");
    let pointwise_to_zero = last.iter().all(|&v| v <= tol);
    let sup_norms: Vec<f64> = f_seq
        .iter()
        .map(|f| f.iter().copied().fold(0.0, f64::max))
        .collect();
    let uniform =
        is_monotone && pointwise_to_zero && sup_norms.last().is_some_and(|&s| s <= tol);
    Ok(DiniReport {
        is_monotone,
        pointwise_to_zero,
        sup_norms,
        uniform,
    })
}

/// Wire format: `{ "grid": {...}, "density": [...], "sup_bound": M, "smooth": bool }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelDensityJson {
    pub grid: RealGrid,
    pub density: Vec<f64>,
    pub sup_bound: f64,
    pub smooth: bool,
}

impl KernelDensityJson {
    pub fn from_kernel(k: &ConvolutionKernel) -> Self {
        Self {
            grid: k.grid().clone(),
            density: k.density().to_vec(),
            sup_bound: k.sup_bound(),
            smooth: k.is_smooth(),
        }
    }

    pub fn to_kernel(&self, quad_tol: f64) -> Result<ConvolutionKernel, String> {
        let grid = RealGrid::new(self.grid.start, self.grid.step, self.grid.n)
            .map_err(|e| e.to_string())?;
        ConvolutionKernel::new(grid, self.density.clone(), self.smooth, quad_tol)
            .map(|k| k.with_sup_bound(self.sup_bound))
            .map_err(|e| e.to_string())
    }
}
