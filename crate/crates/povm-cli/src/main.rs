//! `povm` — JSON in/out analysis of discrete POVMs and grid kernels:
//! validation, commutativity, sharp versions, Markov kernel extraction and
//! smearing, and continuity diagnostics.
//!
//! Exit codes: 0 on pass, 1 on test failure (report still emitted),
//! 2 on input error.

mod commands;
mod report;

use clap::{Parser, Subcommand};
use povm_kit::Tolerances;

#[derive(Parser)]
#[command(name = "povm", version, about = "Commutative POVM analysis toolkit")]
struct Cli {
    /// Seed for randomized test families (reports are deterministic per seed).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(flatten)]
    tol: TolFlags,

    #[command(subcommand)]
    command: Command,
}

/// Tolerance overrides mirroring the library defaults.
#[derive(clap::Args)]
struct TolFlags {
    #[arg(long = "tol.hermitian", global = true, value_name = "TOL")]
    hermitian: Option<f64>,
    #[arg(long = "tol.eig", global = true, value_name = "TOL")]
    eig: Option<f64>,
    #[arg(long = "tol.proj", global = true, value_name = "TOL")]
    proj: Option<f64>,
    #[arg(long = "tol.joint", global = true, value_name = "TOL")]
    joint: Option<f64>,
    #[arg(long = "tol.recon", global = true, value_name = "TOL")]
    recon: Option<f64>,
    #[arg(long = "tol.cluster", global = true, value_name = "TOL")]
    cluster: Option<f64>,
    #[arg(long = "tol.norm", global = true, value_name = "TOL")]
    norm: Option<f64>,
    #[arg(long = "tol.spectrum", global = true, value_name = "TOL")]
    spectrum: Option<f64>,
    #[arg(long = "tol.entry", global = true, value_name = "TOL")]
    entry: Option<f64>,
    #[arg(long = "tol.row", global = true, value_name = "TOL")]
    row: Option<f64>,
    #[arg(long = "tol.quad", global = true, value_name = "TOL")]
    quad: Option<f64>,
    #[arg(long = "tol.uc", global = true, value_name = "TOL")]
    uc: Option<f64>,
    #[arg(long = "tol.feller", global = true, value_name = "TOL")]
    feller: Option<f64>,
    #[arg(long = "tol.ac", global = true, value_name = "TOL")]
    ac: Option<f64>,
}

impl TolFlags {
    fn resolve(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(v) = self.hermitian {
            t.hermitian = v;
        }
        if let Some(v) = self.eig {
            t.eig = v;
        }
        if let Some(v) = self.proj {
            t.proj = v;
        }
        if let Some(v) = self.joint {
            t.joint = v;
        }
        if let Some(v) = self.recon {
            t.recon = v;
        }
        if let Some(v) = self.cluster {
            t.cluster = v;
        }
        if let Some(v) = self.norm {
            t.norm = v;
        }
        if let Some(v) = self.spectrum {
            t.spectrum = v;
        }
        if let Some(v) = self.entry {
            t.entry = v;
        }
        if let Some(v) = self.row {
            t.row = v;
        }
        if let Some(v) = self.quad {
            t.quad = v;
        }
        if let Some(v) = self.uc {
            t.uc = v;
        }
        if let Some(v) = self.feller {
            t.feller = v;
        }
        if let Some(v) = self.ac {
            t.ac = v;
        }
        t
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate POVM axioms and report defects.
    Validate {
        /// POVM JSON file, or `-` for stdin.
        input: String,
        /// Report destination (default stdout).
        #[arg(long)]
        out: Option<String>,
    },
    /// Validation plus commutativity and spectrum.
    Analyze {
        input: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Build the sharp version of a commutative POVM.
    Sharpen {
        input: String,
        /// Eigenvalue labeling: `index` or `ternary`.
        #[arg(long, default_value = "ternary")]
        labeling: String,
        /// Binary digit depth for ternary labeling.
        #[arg(long, default_value_t = 16)]
        depth: u32,
        #[arg(long)]
        out: Option<String>,
    },
    /// Extract the Markov kernel of a POVM against a sharp version.
    ExtractKernel {
        povm: String,
        sharp: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Smear a sharp version's PVM by a kernel table.
    Smear {
        sharp: String,
        kernel: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Continuity diagnostics for a convolution kernel.
    ContinuityReport {
        kernel: String,
        /// Comma-separated subset of feller,uniform,norm1,abs,strong.
        #[arg(long, default_value = "feller,uniform,norm1,abs,strong")]
        tests: String,
        /// Max adjacent jump tolerated by the strong-Feller grid proxy.
        #[arg(long, default_value_t = 0.01)]
        jump_tol: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Reproduce the optimal-Gaussian exhibits: Lipschitz certificate,
    /// escaping-tail norms, norm-1 obstruction, erf cross-checks.
    DemoGaussian {
        /// Gaussian width (standard deviation).
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        /// Kernel grid as start:end:step (default -40l:40l:0.001).
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Report destination (default stdout).
        #[arg(long)]
        report: Option<String>,
    },
}

fn main() {
    let mut argv: Vec<String> = std::env::args().collect();
    if !argv.is_empty() {
        argv[0] = "povm".to_string();
    }
    let command_echo = argv.join(" ");
    let cli = Cli::parse();
    let tols = cli.tol.resolve();
    let seed = cli.seed;

    let outcome = match &cli.command {
        Command::Validate { input, out } => {
            commands::cmd_validate(command_echo, input, out.as_deref(), seed, &tols)
        }
        Command::Analyze { input, out } => {
            commands::cmd_analyze(command_echo, input, out.as_deref(), seed, &tols)
        }
        Command::Sharpen {
            input,
            labeling,
            depth,
            out,
        } => commands::cmd_sharpen(command_echo, input, labeling, *depth, out.as_deref(), &tols),
        Command::ExtractKernel { povm, sharp, out } => {
            commands::cmd_extract_kernel(command_echo, povm, sharp, out.as_deref(), &tols)
        }
        Command::Smear { sharp, kernel, out } => {
            commands::cmd_smear(command_echo, sharp, kernel, out.as_deref(), &tols)
        }
        Command::ContinuityReport {
            kernel,
            tests,
            jump_tol,
            out,
        } => commands::cmd_continuity_report(
            command_echo,
            kernel,
            tests,
            *jump_tol,
            out.as_deref(),
            seed,
            &tols,
        ),
        Command::DemoGaussian { l, grid, report } => commands::cmd_demo_gaussian(
            command_echo,
            *l,
            grid.as_deref(),
            report.as_deref(),
            seed,
            &tols,
        ),
    };

    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
