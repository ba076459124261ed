//! `entb`: sweeps, single-point checks, window solves, copier search,
//! and a built-in self test for the entanglement-broadcasting pipeline.
//!
//! Exit codes: 0 success (check: broadcasting holds; search: found at
//! least one copier), 1 condition fails / nothing found / self test
//! failed, 2 bad input, 3 output I/O failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use entb_core::{
    broadcast_numeric_with_tolerance, separability_window, uqcm_spec, BroadcastOutcome,
    CopierSpec, PairClass, PairLabel, SearchConfig, WindowResult, DEFAULT_VERDICT_TOLERANCE,
};

mod selftest;

#[derive(Parser)]
#[command(name = "entb", version, about = "Local broadcasting of two-qubit entanglement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep alpha^2 over a uniform grid and write a CSV of pair
    /// eigenvalues, determinants, and verdicts.
    Scan {
        /// Number of grid points (>= 2) over alpha^2 in [0, 1].
        #[arg(long)]
        points: usize,
        /// Copier spec file; the universal copier when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Report all four pair verdicts at one alpha^2 as JSON; exits 0
    /// when the broadcasting condition holds.
    Check {
        #[arg(long = "alpha-sq")]
        alpha_sq: f64,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Solve the local and nonlocal alpha^2 windows and print them as
    /// JSON with 12 decimals.
    Windows {
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Random-restart feasibility search over the copier family.
    Search {
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Required nonlocal partial-transpose negativity.
        #[arg(long, default_value_t = 1e-3)]
        margin: f64,
        #[arg(long = "alpha-sq", default_value_t = 0.5)]
        alpha_sq: f64,
        /// Pattern-search sweep cap per restart.
        #[arg(long = "max-iterations", default_value_t = 300)]
        max_iterations: usize,
        /// Spec file used as the starting candidate of the first restart.
        #[arg(long = "warm-start")]
        warm_start: Option<PathBuf>,
        /// Write found specs here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in verification checks.
    Selftest,
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Scan { points, spec, out } => cmd_scan(points, spec.as_deref(), &out),
        Command::Check { alpha_sq, spec } => cmd_check(alpha_sq, spec.as_deref()),
        Command::Windows { spec } => cmd_windows(spec.as_deref()),
        Command::Search {
            restarts,
            seed,
            margin,
            alpha_sq,
            max_iterations,
            warm_start,
            out,
        } => cmd_search(restarts, seed, margin, alpha_sq, max_iterations, warm_start.as_deref(), out.as_deref()),
        Command::Selftest => selftest::run(),
    }
}

fn fail(code: u8, message: &str) -> u8 {
    eprintln!("entb: {message}");
    code
}

/// Load a copier spec file, or the universal copier by default.
fn load_spec(path: Option<&Path>) -> Result<CopierSpec, String> {
    match path {
        None => Ok(uqcm_spec()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read spec file {}: {e}", path.display()))?;
            CopierSpec::from_text(&text).map_err(|e| format!("{}: {e}", path.display()))
        }
    }
}

/// Verdict band, overridable through ENTB_TOL.
fn verdict_tolerance() -> Result<f64, String> {
    match std::env::var("ENTB_TOL") {
        Err(_) => Ok(DEFAULT_VERDICT_TOLERANCE),
        Ok(raw) => raw
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or(format!("invalid ENTB_TOL value {raw:?} (need a positive number)")),
    }
}

fn cmd_scan(points: usize, spec_path: Option<&Path>, out: &Path) -> u8 {
    if points < 2 {
        return fail(2, "scan needs at least 2 grid points");
    }
    let spec = match load_spec(spec_path) {
        Ok(spec) => spec,
        Err(e) => return fail(2, &e),
    };
    let tolerance = match verdict_tolerance() {
        Ok(t) => t,
        Err(e) => return fail(2, &e),
    };

    let mut body = String::from(
        "alpha_sq,min_pt_local,min_pt_nonlocal,w3_local,w4_local,w3_nonlocal,w4_nonlocal,verdict_local,verdict_nonlocal\n",
    );
    for i in 0..points {
        let alpha_sq = i as f64 / (points - 1) as f64;
        let outcome = match broadcast_numeric_with_tolerance(alpha_sq.sqrt(), &spec, tolerance) {
            Ok(outcome) => outcome,
            Err(e) => return fail(2, &format!("pipeline failed at alpha_sq = {alpha_sq}: {e}")),
        };
        let local = &outcome.reports[&PairLabel::AiBi];
        let nonlocal = &outcome.reports[&PairLabel::AiBii];
        let _ = writeln!(
            body,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            alpha_sq,
            local.min_pt_eigenvalue,
            nonlocal.min_pt_eigenvalue,
            local.w[2],
            local.w[3],
            nonlocal.w[2],
            nonlocal.w[3],
            local.verdict,
            nonlocal.verdict,
        );
    }
    match std::fs::write(out, body) {
        Ok(()) => 0,
        Err(e) => fail(3, &format!("cannot write {}: {e}", out.display())),
    }
}

fn outcome_json(alpha_sq: f64, tolerance: f64, outcome: &BroadcastOutcome) -> serde_json::Value {
    let mut pairs = serde_json::Map::new();
    for label in PairLabel::ALL {
        let report = &outcome.reports[&label];
        pairs.insert(
            label.to_string(),
            serde_json::json!({
                "verdict": report.verdict.to_string(),
                "min_pt_eigenvalue": report.min_pt_eigenvalue,
                "w": report.w,
            }),
        );
    }
    serde_json::json!({
        "alpha_sq": alpha_sq,
        "tolerance": tolerance,
        "broadcasting": outcome.broadcasting_holds(),
        "pairs": pairs,
    })
}

fn cmd_check(alpha_sq: f64, spec_path: Option<&Path>) -> u8 {
    if !(0.0..=1.0).contains(&alpha_sq) {
        return fail(2, &format!("alpha-sq must lie in [0, 1], got {alpha_sq}"));
    }
    let spec = match load_spec(spec_path) {
        Ok(spec) => spec,
        Err(e) => return fail(2, &e),
    };
    let tolerance = match verdict_tolerance() {
        Ok(t) => t,
        Err(e) => return fail(2, &e),
    };
    let outcome = match broadcast_numeric_with_tolerance(alpha_sq.sqrt(), &spec, tolerance) {
        Ok(outcome) => outcome,
        Err(e) => return fail(2, &format!("pipeline failed: {e}")),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&outcome_json(alpha_sq, tolerance, &outcome))
            .expect("report serializes")
    );
    u8::from(!outcome.broadcasting_holds())
}

fn window_json(result: &WindowResult, inseparable_inside: bool) -> String {
    match result {
        WindowResult::Window { alpha_sq_low, alpha_sq_high } => format!(
            "{{\"alpha_sq_low\": {alpha_sq_low:.12}, \"alpha_sq_high\": {alpha_sq_high:.12}, \"inseparable_inside\": {inseparable_inside}}}"
        ),
        WindowResult::NoSignChange { always_inseparable } => format!(
            "{{\"no_sign_change\": true, \"always_inseparable\": {always_inseparable}}}"
        ),
    }
}

fn cmd_windows(spec_path: Option<&Path>) -> u8 {
    let spec = match load_spec(spec_path) {
        Ok(spec) => spec,
        Err(e) => return fail(2, &e),
    };
    let nonlocal = match separability_window(PairClass::Nonlocal, &spec) {
        Ok(w) => w,
        Err(e) => return fail(2, &format!("nonlocal window solve failed: {e}")),
    };
    let local = match separability_window(PairClass::Local, &spec) {
        Ok(w) => w,
        Err(e) => return fail(2, &format!("local window solve failed: {e}")),
    };
    // the nonlocal pair is inseparable inside its window, the local
    // pair outside its window
    println!("{{");
    println!("  \"nonlocal\": {},", window_json(&nonlocal, true));
    println!("  \"local\": {}", window_json(&local, false));
    println!("}}");
    0
}

fn cmd_search(
    restarts: usize,
    seed: u64,
    margin: f64,
    alpha_sq: f64,
    max_iterations: usize,
    warm_start: Option<&Path>,
    out: Option<&Path>,
) -> u8 {
    if !(0.0..=1.0).contains(&alpha_sq) {
        return fail(2, &format!("alpha-sq must lie in [0, 1], got {alpha_sq}"));
    }
    if !(margin > 0.0 && margin.is_finite()) {
        return fail(2, &format!("margin must be positive, got {margin}"));
    }
    let warm_starts = match warm_start {
        None => Vec::new(),
        Some(path) => match load_spec(Some(path)) {
            Ok(spec) => vec![spec.to_flat()],
            Err(e) => return fail(2, &e),
        },
    };
    let config = SearchConfig {
        alpha_sq,
        restarts,
        max_iterations,
        seed,
        margin,
        warm_starts,
        ..SearchConfig::default()
    };
    let points = entb_core::search_copiers(&config);

    let mut body = String::new();
    let _ = writeln!(body, "# feasible copiers found: {}", points.len());
    let _ = writeln!(
        body,
        "# alpha_sq = {alpha_sq:.16e}, margin = {margin:.16e}, seed = {seed}, restarts = {restarts}"
    );
    for (index, point) in points.iter().enumerate() {
        let _ = writeln!(
            body,
            "\n# ---- copier {} of {}: score = {:.3e}, local_min_pt = {:.16e}, nonlocal_min_pt = {:.16e}",
            index + 1,
            points.len(),
            point.score,
            point.local_min_pt,
            point.nonlocal_min_pt
        );
        body.push_str(&point.spec.to_text());
    }
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &body) {
                return fail(3, &format!("cannot write {}: {e}", path.display()));
            }
            eprintln!("entb: {} feasible copiers written to {}", points.len(), path.display());
        }
        None => print!("{body}"),
    }
    u8::from(points.is_empty())
}
