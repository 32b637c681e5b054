//! Subcommand implementations. Artifact commands (`sharpen`,
//! `extract-kernel`, `smear`) print the artifact JSON for piping; analysis
//! commands print an [`AnalysisReport`].

use anyhow::{bail, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use statrs::function::erf::erf;

use povm_kit::continuity::{
    feller_test, kernel_value, norm1_test, random_interval_set, strong_feller_test,
    uniform_continuity_test, ConvergenceVerdict, ConvolutionKernel, IntervalSet,
    KernelDensityJson, RealGrid, ShrinkingFamily,
};
use povm_kit::kernel::{
    extract_kernel, smear, validate_markov_kernel, KernelJson, KernelTable,
};
use povm_kit::observables::{build_unsharp_position, optimal_gaussian_kernel, UnsharpPosition};
use povm_kit::povm::{is_commutative, povm_spectrum, validate_povm, DiscretePovm, PovmJson};
use povm_kit::sharp::{build_sharp_version, Labeling, SharpJson, SharpVersion};
use povm_kit::Tolerances;

use crate::report::{
    parse_json, read_input, to_pretty, write_output, AnalysisReport, InputDigest, SCHEMA,
};

fn load_povm(path: &str, hermitian_tol: f64) -> Result<(DiscretePovm, InputDigest)> {
    let (bytes, digest) = read_input(path)?;
    let wire: PovmJson = parse_json(&bytes, "POVM")?;
    let povm = wire
        .to_povm(hermitian_tol)
        .map_err(|e| anyhow::anyhow!("invalid POVM in {path}: {e}"))?;
    Ok((povm, digest))
}

fn load_sharp(path: &str, tols: &Tolerances) -> Result<(SharpVersion, InputDigest)> {
    let (bytes, digest) = read_input(path)?;
    let wire: SharpJson = parse_json(&bytes, "sharp version")?;
    let sharp = wire
        .to_sharp(tols)
        .map_err(|e| anyhow::anyhow!("invalid sharp version in {path}: {e}"))?;
    Ok((sharp, digest))
}

fn load_kernel_table(path: &str) -> Result<(KernelTable, InputDigest)> {
    let (bytes, digest) = read_input(path)?;
    let wire: KernelJson = parse_json(&bytes, "kernel table")?;
    let table = wire
        .to_table()
        .map_err(|e| anyhow::anyhow!("invalid kernel table in {path}: {e}"))?;
    Ok((table, digest))
}

fn load_density(path: &str, quad_tol: f64) -> Result<(ConvolutionKernel, InputDigest)> {
    let (bytes, digest) = read_input(path)?;
    let wire: KernelDensityJson = parse_json(&bytes, "convolution kernel")?;
    let kernel = wire
        .to_kernel(quad_tol)
        .map_err(|e| anyhow::anyhow!("invalid convolution kernel in {path}: {e}"))?;
    Ok((kernel, digest))
}

/// Emit an error report for a failed mathematical precondition (exit 1).
fn fail_report(command: &str, out: Option<&str>, message: &str) -> Result<i32> {
    let payload = to_pretty(&json!({
        "schema": SCHEMA,
        "command": command,
        "error": message,
        "passed": false,
    }))?;
    write_output(out, &payload)?;
    Ok(1)
}

pub fn cmd_validate(
    command: String,
    input: &str,
    out: Option<&str>,
    seed: u64,
    tols: &Tolerances,
) -> Result<i32> {
    // Load permissively so Hermiticity defects surface in the report
    // instead of aborting.
    let (povm, digest) = load_povm(input, f64::INFINITY)?;
    let validation = validate_povm(&povm, tols);
    let passed = validation.passes;
    let report = AnalysisReport::new(
        command,
        vec![digest],
        seed,
        tols,
        json!({ "validation": validation }),
        passed,
    );
    write_output(out, &to_pretty(&report)?)?;
    Ok(if passed { 0 } else { 1 })
}

pub fn cmd_analyze(
    command: String,
    input: &str,
    out: Option<&str>,
    seed: u64,
    tols: &Tolerances,
) -> Result<i32> {
    let (povm, digest) = load_povm(input, f64::INFINITY)?;
    let validation = validate_povm(&povm, tols);
    let commutativity = is_commutative(&povm, tols.joint);
    let spectrum = povm_spectrum(&povm, tols.spectrum);
    let passed = validation.passes;
    let report = AnalysisReport::new(
        command,
        vec![digest],
        seed,
        tols,
        json!({
            "validation": validation,
            "commutative": commutativity.commutative,
            "worst_pair": commutativity.worst_pair,
            "max_commutator_norm": commutativity.max_commutator_norm,
            "spectrum": spectrum,
        }),
        passed,
    );
    write_output(out, &to_pretty(&report)?)?;
    Ok(if passed { 0 } else { 1 })
}

pub fn cmd_sharpen(
    command: String,
    input: &str,
    labeling: &str,
    depth: u32,
    out: Option<&str>,
    tols: &Tolerances,
) -> Result<i32> {
    let (povm, _) = load_povm(input, tols.hermitian)?;
    let labeling = match labeling {
        "index" => Labeling::Index,
        "ternary" => Labeling::Ternary { depth },
        other => bail!("unknown labeling {other:?}; expected index or ternary"),
    };
    match build_sharp_version(&povm, labeling, tols) {
        Ok(sharp) => {
            write_output(out, &to_pretty(&SharpJson::from_sharp(&sharp))?)?;
            Ok(0)
        }
        Err(e) => fail_report(&command, out, &e.to_string()),
    }
}

pub fn cmd_extract_kernel(
    command: String,
    povm_path: &str,
    sharp_path: &str,
    out: Option<&str>,
    tols: &Tolerances,
) -> Result<i32> {
    if povm_path == "-" && sharp_path == "-" {
        bail!("only one input may come from stdin");
    }
    let (povm, _) = load_povm(povm_path, tols.hermitian)?;
    let (sharp, _) = load_sharp(sharp_path, tols)?;
    match extract_kernel(&povm, &sharp, tols) {
        Ok(table) => {
            write_output(out, &to_pretty(&KernelJson::from_table(&table))?)?;
            Ok(0)
        }
        Err(e) => fail_report(&command, out, &e.to_string()),
    }
}

pub fn cmd_smear(
    command: String,
    sharp_path: &str,
    kernel_path: &str,
    out: Option<&str>,
    tols: &Tolerances,
) -> Result<i32> {
    if sharp_path == "-" && kernel_path == "-" {
        bail!("only one input may come from stdin");
    }
    let (sharp, _) = load_sharp(sharp_path, tols)?;
    let (table, _) = load_kernel_table(kernel_path)?;
    let validation = validate_markov_kernel(&table, tols);
    if !validation.passes {
        return fail_report(
            &command,
            out,
            &format!("kernel table fails validation: {validation:?}"),
        );
    }
    match smear(&sharp, &table, tols) {
        Ok(povm) => {
            write_output(out, &to_pretty(&PovmJson::from_povm(&povm))?)?;
            Ok(0)
        }
        Err(e) => fail_report(&command, out, &e.to_string()),
    }
}

/// Outcome window reachable by the smearing: `x − y` with `x` in the domain
/// and `y` in the kernel support.
fn reach_window(grid: &RealGrid) -> (f64, f64) {
    (grid.start - grid.end(), grid.end() - grid.start)
}

fn norms_along<'a>(
    q: &'a UnsharpPosition,
) -> impl Fn(&IntervalSet) -> f64 + 'a {
    |delta| q.norm_of(delta)
}

/// Sampled atom norms: `‖F({[a, a+width)})‖` for `n_anchors` interior
/// anchors, maximizing over the domain points that can see the cell.
fn sampled_atom_norms(q: &UnsharpPosition, width: f64, n_anchors: usize) -> Vec<f64> {
    let domain = q.domain();
    let support = q.kernel().grid();
    let lo_idx = domain.n / 4;
    let hi_idx = 3 * domain.n / 4;
    let stride = ((hi_idx - lo_idx) / n_anchors.max(1)).max(1);
    (lo_idx..hi_idx)
        .step_by(stride)
        .map(|j| {
            let anchor = domain.point(j);
            let cell = IntervalSet::interval(anchor, anchor + width);
            // μ_cell(x) vanishes unless x − cell meets the support.
            let x_lo = anchor + support.start - width;
            let x_hi = anchor + support.end() + width;
            domain
                .points()
                .filter(|&x| x_lo <= x && x <= x_hi)
                .map(|x| q.mu(&cell, x))
                .fold(0.0, f64::max)
        })
        .collect()
}

pub fn cmd_continuity_report(
    command: String,
    kernel_path: &str,
    tests: &str,
    jump_tol: f64,
    out: Option<&str>,
    seed: u64,
    tols: &Tolerances,
) -> Result<i32> {
    let (kernel, digest) = load_density(kernel_path, tols.quad)?;
    let grid = kernel.grid().clone();
    let q = build_unsharp_position(kernel, grid.clone(), tols.quad)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let (reach_lo, reach_hi) = reach_window(&grid);
    let requested: Vec<&str> = tests.split(',').map(|t| t.trim()).collect();
    for t in &requested {
        if !["feller", "uniform", "norm1", "abs", "strong"].contains(t) {
            bail!("unknown test {t:?}; expected feller,uniform,norm1,abs,strong");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = serde_json::Map::new();
    let mut passed = true;
    let mut uniform_verdict = true;

    if requested.contains(&"uniform") || requested.contains(&"norm1") {
        let escape = ShrinkingFamily::new(
            (1..=30)
                .map(|i| IntervalSet::interval(reach_hi + 1.0, reach_hi + 1.0 + 1.0 / i as f64))
                .collect(),
        )
        .expect("nested escape intervals");
        let center = (reach_lo + reach_hi) / 2.0;
        let nested = ShrinkingFamily::nested_halving(center, (reach_hi - reach_lo) / 4.0, 40);
        let escape_report = uniform_continuity_test(norms_along(&q), &escape, tols.uc);
        let nested_report = uniform_continuity_test(norms_along(&q), &nested, tols.uc);
        uniform_verdict = escape_report.verdict == ConvergenceVerdict::Converging
            && nested_report.verdict == ConvergenceVerdict::Converging;
        if requested.contains(&"uniform") {
            passed &= uniform_verdict;
            results.insert(
                "uniform".into(),
                json!({
                    "escape_family": escape_report,
                    "nested_family": nested_report,
                }),
            );
        }
    }

    if requested.contains(&"feller") {
        let g: Vec<f64> = grid.points().map(f64::cos).collect();
        let center = (grid.start + grid.end()) / 2.0;
        let span = grid.end() - grid.start;
        let seq: Vec<f64> = (1..=22).map(|n| center + span / 8.0 * 2f64.powi(-n)).collect();
        let feller = feller_test(&q.kernel().clone(), &g, &seq, center, tols.feller)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        passed &= feller.converged;
        results.insert("feller".into(), json!(feller));
    }

    if requested.contains(&"norm1") {
        let h = grid.step;
        let coarse = sampled_atom_norms(&q, h, 16);
        let refined = sampled_atom_norms(&q, h / 2.0, 16);
        let norm1 = norm1_test(&coarse, &refined, uniform_verdict, tols.spectrum)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        results.insert("norm1".into(), json!(norm1));
    }

    if requested.contains(&"abs") {
        let m = q.kernel().sup_bound();
        let family: Vec<IntervalSet> = (0..200)
            .map(|_| random_interval_set(&mut rng, reach_lo - 1.0, reach_hi + 1.0, 6))
            .collect();
        let abs = povm_kit::continuity::absolute_continuity_check(
            norms_along(&q),
            |delta| m * delta.measure_within(reach_lo, reach_hi),
            1.0,
            &family,
            tols.ac,
        );
        passed &= abs.holds;
        results.insert("abs".into(), json!(abs));
    }

    if requested.contains(&"strong") {
        let deltas: Vec<IntervalSet> = (0..10)
            .map(|_| random_interval_set(&mut rng, reach_lo, reach_hi, 10))
            .collect();
        let strong = strong_feller_test(q.kernel(), &deltas, &grid, jump_tol);
        passed &= strong.passes;
        results.insert("strong".into(), json!(strong));
    }

    let report = AnalysisReport::new(
        command,
        vec![digest],
        seed,
        tols,
        Value::Object(results),
        passed,
    );
    write_output(out, &to_pretty(&report)?)?;
    Ok(if passed { 0 } else { 1 })
}

fn phi(t: f64) -> f64 {
    0.5 * (1.0 + erf(t / std::f64::consts::SQRT_2))
}

pub fn cmd_demo_gaussian(
    command: String,
    l: f64,
    grid_spec: Option<&str>,
    report_path: Option<&str>,
    seed: u64,
    tols: &Tolerances,
) -> Result<i32> {
    let grid = match grid_spec {
        Some(spec) => parse_grid(spec)?,
        None => {
            let step = 1e-3;
            let n = (80.0 * l / step).round() as usize + 1;
            RealGrid::new(-40.0 * l, step, n).map_err(|e| anyhow::anyhow!("{e}"))?
        }
    };
    let h = grid.step;
    let kernel =
        optimal_gaussian_kernel(l, grid.clone(), tols.quad).map_err(|e| anyhow::anyhow!("{e}"))?;
    let q = build_unsharp_position(kernel, grid.clone(), tols.quad)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Lipschitz certificate against the closed-form constant √2/(l√π).
    let bound = 2f64.sqrt() / (l * std::f64::consts::PI.sqrt());
    let mut worst_slack = f64::NEG_INFINITY;
    for _ in 0..100 {
        let a = rng.gen_range(-10.0 * l..10.0 * l);
        let b = a + rng.gen_range(0.0..10.0 * l);
        let delta = IntervalSet::interval(a, b);
        let x = rng.gen_range(-8.0 * l..8.0 * l);
        let x2 = rng.gen_range(-8.0 * l..8.0 * l);
        let diff = (q.mu(&delta, x) - q.mu(&delta, x2)).abs();
        worst_slack = worst_slack.max(diff - bound * (x - x2).abs());
    }
    let lipschitz_ok = worst_slack <= 1e-5;

    // Escaping tails keep norm 1: the non-uniform-continuity exhibit.
    let bounds: Vec<f64> = (1..=30).map(|i| -(i as f64) * l).collect();
    let family = ShrinkingFamily::left_tails(&bounds).expect("decreasing tails");
    let tails = uniform_continuity_test(norms_along(&q), &family, tols.uc);
    let min_norm = tails.norms.iter().copied().fold(f64::INFINITY, f64::min);
    let tails_ok = min_norm >= 1.0 - 1e-6 && tails.verdict == ConvergenceVerdict::NonConverging;

    // Vanishing atoms: the norm-1 obstruction (relative to the bounded-window
    // uniform continuity of the restricted observable).
    let coarse = sampled_atom_norms(&q, h, 16);
    let refined = sampled_atom_norms(&q, h / 2.0, 16);
    let norm1 = norm1_test(&coarse, &refined, true, tols.spectrum)
        .map_err(|e| anyhow::anyhow!("{e}"))?;

    // Quadrature cross-checks against the error-function closed form; the
    // threshold follows the trapezoid O(h²) error model.
    let erf_tol = tols.quad * (h / 1e-3).powi(2).max(1.0);
    let mut worst_erf = 0.0f64;
    for _ in 0..1000 {
        let a = rng.gen_range(-8.0 * l..8.0 * l);
        let b = a + rng.gen_range(0.0..8.0 * l);
        let x = rng.gen_range(-6.0 * l..6.0 * l);
        let delta = IntervalSet::interval(a, b);
        let expected = phi((b - x) / l) - phi((a - x) / l);
        worst_erf = worst_erf.max((kernel_value(q.kernel(), &delta, x) - expected).abs());
    }
    let erf_ok = worst_erf <= erf_tol;

    let passed = lipschitz_ok && tails_ok && norm1.obstruction && erf_ok;
    let report = AnalysisReport::new(
        command,
        Vec::new(),
        seed,
        tols,
        json!({
            "l": l,
            "grid": { "start": grid.start, "step": grid.step, "n": grid.n },
            "lipschitz_certificate": {
                "bound": bound,
                "worst_slack": worst_slack,
                "passes": lipschitz_ok,
            },
            "nonuniform_norms": {
                "norms": tails.norms,
                "min_norm": min_norm,
                "verdict": tails.verdict,
                "passes": tails_ok,
            },
            "norm1": norm1,
            "erf_checks": {
                "samples": 1000,
                "worst_abs_error": worst_erf,
                "tolerance": erf_tol,
                "passes": erf_ok,
            },
        }),
        passed,
    );
    write_output(report_path, &to_pretty(&report)?)?;
    Ok(if passed { 0 } else { 1 })
}

/// Parse `start:end:step` into a uniform grid.
fn parse_grid(spec: &str) -> Result<RealGrid> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("grid spec must be start:end:step, got {spec:?}");
    }
    let start: f64 = parts[0].parse()?;
    let end: f64 = parts[1].parse()?;
    let step: f64 = parts[2].parse()?;
    if end <= start || step <= 0.0 || !end.is_finite() || !step.is_finite() {
        bail!("grid spec needs end > start and step > 0, got {spec:?}");
    }
    let n = ((end - start) / step).round() as usize + 1;
    RealGrid::new(start, step, n).map_err(|e| anyhow::anyhow!("{e}"))
}

