//! `billiard`: solve, verify and analyze the locally integrable billiard
//! series from the command line.

mod config;
mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use billiard_core::analyzer::{
    alpha_scan, bombieri_table, default_grid, default_window, fit_asymptotic, ratios, read_scan_csv, render_svg,
    write_scan_csv, write_table_csv, PlotOptions, ScanOptions, ScanStatus,
};
use billiard_core::frequency::make_frequencies;
use billiard_core::solver::{solve, SolutionState, SolverConfig};
use billiard_core::verifier::{verify, VerifyOptions};
use billiard_core::{Error, Precision, Result};
use clap::{Parser, Subcommand};

use config::{Flags, RunConfig};
use manifest::Manifest;

#[derive(Parser, Debug)]
#[command(name = "billiard", version, about = "Formal series of a locally integrable billiard")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Solve for f and χ and write the state as JSON
    Solve {
        /// Also write the f coefficients as CSV next to the JSON
        #[arg(long)]
        csv: bool,
    },
    /// Check a solution against the reflection law; exit 3 if a check fails
    Verify,
    /// Ratio sequence and asymptotic fit of the n = 1 coefficients
    Fit,
    /// Binomially weighted coefficient table for n = 2
    Table,
    /// b_inf^(-1/2) over a grid of α/(2π)
    Scan,
    /// Render a scan CSV as an SVG line chart
    Plot,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Solve { .. } => "solve",
            Command::Verify => "verify",
            Command::Fit => "fit",
            Command::Table => "table",
            Command::Scan => "scan",
            Command::Plot => "plot",
        }
    }
}

fn out_path(c: &RunConfig, default: &str) -> PathBuf {
    c.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn sibling(p: &Path, suffix: &str) -> PathBuf {
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    p.with_file_name(format!("{stem}{suffix}"))
}

fn solver_config(c: &RunConfig, n: usize, k: usize, precision: Precision) -> Result<SolverConfig> {
    let mut s = SolverConfig::new(n, k).with_precision(precision);
    if let Some(f0) = c.f0 {
        s.f0 = f0;
    }
    if let Some(a) = &c.gauge_a {
        s.gauge_a = a.clone();
    }
    s.divisor_floor = c.divisor_floor;
    s.validate()?;
    Ok(s)
}

fn solve_from(c: &RunConfig, default_k: Option<usize>, default_precision: Precision) -> Result<SolutionState<f64>> {
    let k = match (c.k, default_k) {
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => c.require_k()?,
    };
    let fv = c.frequency_vector(k)?;
    let config = solver_config(c, fv.n(), k, c.precision.unwrap_or(default_precision))?;
    solve(&config, &fv)
}

fn run_solve(c: &RunConfig, csv: bool) -> Result<()> {
    let precision = c.precision.unwrap_or_default();
    let state = solve_from(c, None, precision)?;
    let out = out_path(c, "f.json");
    let mut m = Manifest::new("solve", precision.name(), c)?;
    let mut json = state.to_json_string()?;
    json.push('\n');
    m.emit(&out, json.as_bytes())?;
    if csv {
        let mut buf = Vec::new();
        state.write_f_csv(&mut buf)?;
        m.emit(&out.with_extension("csv"), &buf)?;
    }
    m.write(&out)?;
    println!("solved n = {} through order {} -> {}", state.n(), state.k_max(), out.display());
    Ok(())
}

fn run_verify(c: &RunConfig) -> Result<bool> {
    let fv = c.frequency_vector(c.k.unwrap_or(8))?;
    let mut opts = VerifyOptions::new(fv);
    if let Some(k) = c.k {
        opts.poly_order = k;
    }
    if let Some(d) = c.degree {
        opts.poly_degree = d;
    }
    if let Some(p) = c.precision {
        opts.precision = p;
    }
    if let Some(s) = c.seed {
        opts.seed = s;
    }
    let report = verify(&opts)?;
    let out = out_path(c, "verify.json");
    let mut m = Manifest::new("verify", opts.precision.name(), c)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    m.emit(&out, json.as_bytes())?;
    m.write(&out)?;
    for s in &report.slope_checks {
        println!(
            "slope n={} K={}: {:.2} (need {} - 0.5) {}",
            s.n,
            s.k,
            s.slope,
            s.required,
            if s.pass { "ok" } else { "FAIL" }
        );
    }
    println!("fermat max {:.3e}, collinearity max {:.3e}", report.fermat_max, report.collinearity_max);
    println!("polynomial residual {:.3e}", report.poly_residual_max);
    println!("verify {} -> {}", if report.pass { "passed" } else { "FAILED" }, out.display());
    Ok(report.pass)
}

fn run_fit(c: &RunConfig) -> Result<()> {
    let state = match &c.input {
        Some(p) => SolutionState::from_json_str(&fs::read_to_string(p)?)?,
        None => solve_from(c, None, c.precision.unwrap_or_default())?,
    };
    if state.n() != 1 {
        return Err(Error::invalid("n", format!("fit needs a one-frequency state, got n = {}", state.n())));
    }
    let r = ratios(&state.one_dim_coefficients())?;
    let window = c.window.unwrap_or_else(|| default_window(state.k_max()));
    let fit = fit_asymptotic(&r.pairs(), window)?;
    let out = out_path(c, "ratios.csv");
    let mut m = Manifest::new("fit", state.config.precision.name(), c)?;
    let mut buf = Vec::new();
    r.write_csv(&mut buf)?;
    m.emit(&out, &buf)?;
    let mut json = serde_json::to_string_pretty(&serde_json::json!({
        "fit": fit,
        "b_inf_inv_sqrt": fit.b_inf_inv_sqrt(),
        "sign_changes": r.sign_changes,
    }))?;
    json.push('\n');
    m.emit(&sibling(&out, ".fit.json"), json.as_bytes())?;
    m.write(&out)?;
    println!(
        "b_inf = {:.10}  sigma = {:.4} (Richardson {:.4}{})  window {:?}",
        fit.b_inf,
        fit.sigma,
        fit.richardson.sigma,
        if fit.agree { "" } else { ", estimates disagree" },
        fit.window
    );
    Ok(())
}

fn run_table(c: &RunConfig) -> Result<()> {
    let precision = c.precision.unwrap_or_default();
    let state = solve_from(c, Some(7), precision)?;
    let rows = bombieri_table(&state)?;
    let out = out_path(c, "table.csv");
    let mut m = Manifest::new("table", precision.name(), c)?;
    let mut buf = Vec::new();
    write_table_csv(&rows, &mut buf)?;
    m.emit(&out, &buf)?;
    m.write(&out)?;
    for r in &rows {
        let e: Vec<String> = r.entries.iter().map(|v| format!("{v:.5}")).collect();
        println!("k={:2}: {}", r.k, e.join("  "));
    }
    Ok(())
}

fn run_scan(c: &RunConfig) -> Result<()> {
    let grid = if c.grid.is_empty() { default_grid() } else { c.grid.clone() };
    for (i, g) in grid.iter().enumerate() {
        make_frequencies(std::slice::from_ref(g), 3).map_err(|e| match e {
            Error::InvalidConfig { message, .. } => Error::invalid(format!("grid[{i}]"), message),
            other => other,
        })?;
    }
    let opts = ScanOptions {
        k_max: c.k.unwrap_or(100),
        precision: c.precision.unwrap_or(Precision::Ext),
        window: c.window,
        divisor_floor: c.divisor_floor,
        workers: c.workers,
    };
    solver_config(c, 1, opts.k_max, opts.precision)?;
    let points = alpha_scan(&grid, &opts)?;
    let out = out_path(c, "scan.csv");
    let mut m = Manifest::new("scan", opts.precision.name(), c)?;
    let mut buf = Vec::new();
    write_scan_csv(&points, &mut buf)?;
    m.emit(&out, &buf)?;
    m.write(&out)?;
    let count = |s: ScanStatus| points.iter().filter(|p| p.status == s).count();
    println!(
        "{} points: {} ok, {} gap, {} error -> {}",
        points.len(),
        count(ScanStatus::Ok),
        count(ScanStatus::Gap),
        count(ScanStatus::Error),
        out.display()
    );
    Ok(())
}

fn run_plot(c: &RunConfig) -> Result<()> {
    let input = c.input.clone().unwrap_or_else(|| PathBuf::from("scan.csv"));
    let points = read_scan_csv(fs::File::open(&input)?)?;
    let mut opts = PlotOptions::default();
    if let Some(p) = &c.plot {
        if let Some(w) = p.width {
            opts.width = w;
        }
        if let Some(h) = p.height {
            opts.height = h;
        }
        if let Some(t) = &p.title {
            opts.title = t.clone();
        }
    }
    if !(opts.width > 0.0 && opts.height > 0.0) {
        return Err(Error::invalid("plot", "width and height must be positive"));
    }
    let out = out_path(c, "scan.svg");
    let mut m = Manifest::new("plot", "f64", c)?;
    m.emit(&out, render_svg(&points, &opts).as_bytes())?;
    m.write(&out)?;
    println!("{} points -> {}", points.len(), out.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    let c = RunConfig::resolve(&cli.flags)?;
    match cli.command {
        Command::Solve { csv } => run_solve(&c, csv)?,
        Command::Verify => return run_verify(&c),
        Command::Fit => run_fit(&c)?,
        Command::Table => run_table(&c)?,
        Command::Scan => run_scan(&c)?,
        Command::Plot => run_plot(&c)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors are configuration errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("billiard {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
