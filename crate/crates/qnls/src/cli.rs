//! Command-line harness: scenario-driven simulation, vanishing-viscosity
//! convergence tables, inequality verification suites, run summaries, and
//! the two-solution difference experiment.
//!
//! Exit codes: `0` success, `2` configuration/validation problems, `3`
//! numerical failures (growth guard, non-finite values), `4` a verified
//! threshold was breached.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use crate::checkpoint;
use crate::error::QnlsError;
use crate::export::{self, DiagnosticSeries};
use crate::functionals::{self, Trajectory};
use crate::grid::{Grid, MultiIndex};
use crate::lemmas::{self, EnsembleSpec, LemmaReport};
use crate::norms;
use crate::scenario::{ArtifactHash, RunRecord, Scenario};
use crate::solver;

/// Tolerance profile selecting how strictly verified thresholds are held.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToleranceProfile {
    /// Thresholds used by the acceptance checks.
    Default,
    /// Tighter ratios plus resolution-doubling stability checks.
    Strict,
}

impl ToleranceProfile {
    fn identity_tol(self) -> f64 {
        1e-6
    }

    fn difference_ratio_bound(self) -> f64 {
        match self {
            ToleranceProfile::Default => 2.0,
            ToleranceProfile::Strict => 1.5,
        }
    }

    fn viscosity_final_ratio(self) -> f64 {
        0.7
    }

    fn stability_tol(self) -> f64 {
        0.10
    }
}

/// Top-level command-line interface.
#[derive(Debug, Parser)]
#[command(name = "qnls", about = "Pseudospectral laboratory for quasilinear dispersive flows")]
pub struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// RNG seed for random initial data and verification ensembles.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output directory (overrides the scenario's `output_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker-thread cap (also settable via `QNLS_THREADS`).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Verification strictness.
    #[arg(long, global = true, value_enum, default_value_t = ToleranceProfile::Default)]
    pub tolerance_profile: ToleranceProfile,

    #[command(subcommand)]
    pub command: Command,
}

/// Available verbs.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and export diagnostics, checkpoints, and a manifest.
    Simulate,
    /// Vanishing-viscosity Cauchy table: rerun a scenario at halved
    /// viscosities and tabulate consecutive final-state distances.
    Converge {
        /// Number of viscosity halvings (at least 2).
        #[arg(long, default_value_t = 3)]
        halvings: usize,
        /// Largest viscosity in the sequence.
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        /// Sobolev index of the distance.
        #[arg(long, default_value_t = 3.0)]
        sobolev_index: f64,
    },
    /// Run the inequality/identity verification suites over seeded random
    /// ensembles.
    VerifyLemmas {
        /// Samples per suite.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Base 1D resolution.
        #[arg(long, default_value_t = 128)]
        points: usize,
        /// Suites to run (default: all). Known names: identities,
        /// commutator, calderon, product-rule, product-commutator, bmo,
        /// interpolation, halving, weight.
        #[arg(long)]
        suite: Vec<String>,
    },
    /// Summarize a completed run directory and verify its artifact hashes.
    Report {
        /// Run directory containing `run.json`.
        run: PathBuf,
    },
    /// Two-solution difference experiment: perturb the initial data and
    /// track the `H^{1/2}` distance of the flows.
    DiffRun {
        /// Relative size of the initial perturbation.
        #[arg(long, default_value_t = 1e-6)]
        perturbation: f64,
    },
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version by "erroring" with success.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Execute a parsed command.
pub fn run(cli: &Cli) -> Result<(), QnlsError> {
    init_threads(cli.threads);
    match &cli.command {
        Command::Simulate => cmd_simulate(cli),
        Command::Converge { halvings, epsilon, sobolev_index } => {
            cmd_converge(cli, *halvings, *epsilon, *sobolev_index)
        }
        Command::VerifyLemmas { samples, points, suite } => {
            cmd_verify_lemmas(cli, *samples, *points, suite)
        }
        Command::Report { run } => cmd_report(run),
        Command::DiffRun { perturbation } => cmd_diff_run(cli, *perturbation),
    }
}

fn init_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("QNLS_THREADS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        if n >= 1 {
            // Fails harmlessly if a global pool already exists.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn load_scenario(cli: &Cli) -> Result<Scenario, QnlsError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| QnlsError::Config("this command requires --config <scenario.toml>".into()))?;
    Scenario::load(path)
}

fn out_dir(cli: &Cli, scenario: Option<&Scenario>) -> Result<PathBuf, QnlsError> {
    let dir = cli
        .out
        .clone()
        .or_else(|| scenario.and_then(|s| s.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("qnls-out"));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn cmd_simulate(cli: &Cli) -> Result<(), QnlsError> {
    let scenario = load_scenario(cli)?;
    let dir = out_dir(cli, Some(&scenario))?;
    let started = Instant::now();
    let started_unix = unix_now();

    let grid = scenario.build_grid()?;
    let model = scenario.build_model()?;
    let initial = scenario.build_initial(&grid, model.components, cli.seed)?;
    let config = scenario.build_solver_config();
    let traj = Trajectory::record(
        &model,
        &initial,
        &config,
        scenario.solver.t_end,
        scenario.solver.checkpoint_stride,
    )?;

    let mut series = DiagnosticSeries::new(traj.times.clone());
    for spec in &scenario.diagnostics {
        for (name, values) in diagnostic_channel(spec, &traj)? {
            series.push_channel(name, values)?;
        }
    }
    // The L² norm is always recorded.
    series.push_channel(
        "l2_norm",
        traj.states.iter().map(|s| s.l2_norm_all()).collect(),
    )?;

    let csv_path = dir.join("series.csv");
    let nd_path = dir.join("series.ndjson");
    let cp_path = dir.join("state_final.qnls");
    let scen_path = dir.join("scenario.toml");
    series.write_csv(&csv_path)?;
    series.write_ndjson(&nd_path)?;
    checkpoint::write_checkpoint(
        &cp_path,
        traj.states.last().expect("nonempty trajectory"),
        *traj.times.last().unwrap(),
    )?;
    std::fs::write(&scen_path, scenario.to_toml_string()?)?;

    let record = RunRecord {
        scenario,
        seed: cli.seed,
        started_unix,
        elapsed_secs: started.elapsed().as_secs_f64(),
        artifacts: hash_artifacts(&dir, &["series.csv", "series.ndjson", "state_final.qnls", "scenario.toml"])?,
    };
    record.write_json(&dir.join("run.json"))?;
    println!(
        "simulate: {} checkpoints to t = {:.6}, {} channels, outputs in {}",
        traj.len(),
        traj.times.last().unwrap(),
        series.channels.len(),
        dir.display()
    );
    Ok(())
}

/// Expand one diagnostic selector like `"sobolev:3"` into named channels.
fn diagnostic_channel(
    spec: &str,
    traj: &Trajectory,
) -> Result<Vec<(String, Vec<f64>)>, QnlsError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = traj.grid();
    let num =
        |i: usize| -> Result<f64, QnlsError> {
            parts
                .get(i)
                .and_then(|p| p.parse::<f64>().ok())
                .ok_or_else(|| QnlsError::Config(format!("diagnostic `{spec}`: missing or bad numeric parameter {i}")))
        };
    let int = |i: usize| -> Result<u32, QnlsError> {
        parts
            .get(i)
            .and_then(|p| p.parse::<u32>().ok())
            .ok_or_else(|| QnlsError::Config(format!("diagnostic `{spec}`: missing or bad integer parameter {i}")))
    };
    match parts[0] {
        "mass" => Ok(vec![(
            "mass".into(),
            traj.states.iter().map(|s| s.l2_norm_all().powi(2)).collect(),
        )]),
        "sobolev" => {
            let s = num(1)?;
            let values = traj
                .states
                .iter()
                .map(|st| {
                    (0..st.num_components())
                        .map(|c| norms::sobolev_norm(grid, st.component(c), s).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect();
            Ok(vec![(format!("sobolev_{}", parts[1]), values)])
        }
        "master-x" => {
            let (s1, s2) = (int(1)?, int(2)?);
            let mut values = Vec::with_capacity(traj.len());
            for st in &traj.states {
                values.push(functionals::master_x(st, s1, s2)?);
            }
            Ok(vec![(format!("master_x_{s1}_{s2}"), values)])
        }
        "good-term-y" => {
            let s1 = int(1)?;
            let (y, top) = functionals::good_term_y(traj, s1);
            Ok(vec![
                (format!("good_y_{s1}"), y),
                (format!("good_y_top_{s1}"), top),
            ])
        }
        "good-term-w" => {
            let s3 = int(1)?;
            let (w, top) = functionals::good_term_w(traj, s3)?;
            Ok(vec![
                (format!("good_w_{s3}"), w),
                (format!("good_w_top_{s3}"), top),
            ])
        }
        "bootstrap-quadratic" => {
            let (s1, s2) = (int(1)?, int(2)?);
            Ok(vec![(
                format!("bootstrap_q_{s1}_{s2}"),
                functionals::bootstrap_monitor_quadratic(traj, s1, s2)?,
            )])
        }
        "bootstrap-cubic" => {
            let s3 = int(1)?;
            Ok(vec![(
                format!("bootstrap_c_{s3}"),
                functionals::bootstrap_monitor_cubic(traj, s3)?,
            )])
        }
        "weighted-norm" => {
            let k = int(1)? as usize;
            if k >= grid.dim() {
                return Err(QnlsError::Config(format!(
                    "diagnostic `{spec}`: axis {k} out of range for d = {}",
                    grid.dim()
                )));
            }
            let beta = MultiIndex::zero(grid.dim());
            Ok(vec![(
                format!("weighted_{k}"),
                functionals::weighted_norm_channel(traj, &beta, k),
            )])
        }
        "boundary-mass" => Ok(vec![(
            "boundary_mass".into(),
            traj.states
                .iter()
                .map(|st| {
                    (0..st.num_components())
                        .map(|c| norms::boundary_mass_fraction(grid, st.component(c), 0.1))
                        .fold(0.0f64, f64::max)
                })
                .collect(),
        )]),
        other => Err(QnlsError::Config(format!("unknown diagnostic `{other}`"))),
    }
}

fn cmd_converge(
    cli: &Cli,
    halvings: usize,
    epsilon: f64,
    sobolev_index: f64,
) -> Result<(), QnlsError> {
    if halvings < 2 {
        return Err(QnlsError::Config(format!(
            "converge requires at least 2 halvings, got {halvings}"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(QnlsError::Config("epsilon must be positive".into()));
    }
    let scenario = load_scenario(cli)?;
    let dir = out_dir(cli, Some(&scenario))?;
    let grid = scenario.build_grid()?;
    let model = scenario.build_model()?;
    let initial = scenario.build_initial(&grid, model.components, cli.seed)?;
    let epsilons: Vec<f64> = (0..=halvings).map(|i| epsilon / (1u64 << i) as f64).collect();
    let distances = solver::viscosity_continuation(
        &model,
        &initial,
        &epsilons,
        scenario.solver.t_end,
        scenario.solver.dt,
        sobolev_index,
    )?;

    let mut w = csv::Writer::from_path(dir.join("converge.csv"))?;
    w.write_record(["epsilon", "next_epsilon", "distance"])?;
    for (i, d) in distances.iter().enumerate() {
        w.write_record([
            format!("{:.17e}", epsilons[i]),
            format!("{:.17e}", epsilons[i + 1]),
            format!("{d:.17e}"),
        ])?;
    }
    w.flush()?;
    for (i, d) in distances.iter().enumerate() {
        println!("eps {:10.4e} -> {:10.4e}: distance {d:.6e}", epsilons[i], epsilons[i + 1]);
    }

    for pair in distances.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(QnlsError::Verification(format!(
                "viscosity distances not strictly decreasing: {:.3e} then {:.3e}",
                pair[0], pair[1]
            )));
        }
    }
    let last_ratio = distances[distances.len() - 1] / distances[distances.len() - 2];
    if last_ratio > cli.tolerance_profile.viscosity_final_ratio() {
        return Err(QnlsError::Verification(format!(
            "final contraction ratio {last_ratio:.3} exceeds {}",
            cli.tolerance_profile.viscosity_final_ratio()
        )));
    }
    println!("converge: Cauchy contraction confirmed, final ratio {last_ratio:.3}");
    Ok(())
}

const ALL_SUITES: &[&str] = &[
    "identities",
    "commutator",
    "calderon",
    "product-rule",
    "product-commutator",
    "bmo",
    "interpolation",
    "halving",
    "weight",
];

/// Run the named suites on seeded ensembles at the given base resolution;
/// shared by the CLI and the acceptance checks.
pub fn run_lemma_suites(
    suites: &[String],
    samples: usize,
    points: usize,
    seed: u64,
) -> Result<Vec<LemmaReport>, QnlsError> {
    let r = crate::grid::DEFAULT_HALF_WIDTH;
    // The reference band is fixed well inside the coarsest evaluation grid:
    // products of band fields stay below Nyquist (no aliasing even before
    // refinement) and pointwise norms are well sampled, so doubling the
    // grid re-evaluates the *same* functions with only quadrature drift.
    let mut base = EnsembleSpec::d1(points, r, samples, seed);
    base.band_points = vec![64];
    let windowed = EnsembleSpec { window_sigma: Some(r / 6.0), ..base.clone() };
    let grid2 = Grid::cubic(2, (points / 2).max(16), r)?;
    let base2 = EnsembleSpec {
        grid: grid2.clone(),
        band_points: vec![32, 32],
        count: samples,
        amplitude: 1.0,
        window_sigma: None,
        seed,
    };
    let mut reports = Vec::new();
    for suite in suites {
        match suite.as_str() {
            "identities" => {
                // The half-commutator comparison needs spectral headroom
                // above the band to resolve the half-power symbols near
                // their ξ = 0 kink; run it on the doubled grid.
                reports.push(lemmas::verify_half_commutator_identity(&windowed.refined(2))?);
                reports.push(lemmas::verify_hilbert_involution(&base, 0));
                reports.push(lemmas::verify_composition_identities(&base, 1.5));
            }
            "commutator" => {
                reports.push(lemmas::verify_commutator_first(&base, 0.5, 1.0)?);
                reports.push(lemmas::verify_commutator_second(&base, 0.5, 1.0)?);
            }
            "calderon" => {
                reports.push(lemmas::verify_calderon(&base, 2.0)?);
                reports.push(lemmas::verify_calderon(&base, 4.0)?);
            }
            "product-rule" => {
                let inf = f64::INFINITY;
                reports.push(lemmas::verify_product_rule(
                    &base, 0.5, 2.0, 2.0, inf, inf, 2.0, false,
                )?);
                reports.push(lemmas::verify_product_rule(
                    &base, 1.5, 2.0, 2.0, inf, inf, 2.0, true,
                )?);
            }
            "product-commutator" => {
                reports.push(lemmas::verify_product_commutator_first(&base, 0.5, 2.0)?);
                reports.push(lemmas::verify_product_commutator_second(
                    &base, 1.5, 2.0, 2.0, f64::INFINITY,
                )?);
            }
            "bmo" => reports.push(lemmas::verify_bmo_embedding(&base, 5)),
            "interpolation" => reports.push(lemmas::verify_interpolation(&windowed, 5)),
            "halving" => reports.push(lemmas::verify_halving(&base2, 0)?),
            "weight" => {
                let gamma = MultiIndex::unit(1, 0);
                reports.push(lemmas::verify_weight_lemma(&windowed, 1, &gamma)?);
            }
            other => {
                return Err(QnlsError::Config(format!(
                    "unknown suite `{other}`; known: {}",
                    ALL_SUITES.join(", ")
                )))
            }
        }
    }
    Ok(reports)
}

fn cmd_verify_lemmas(
    cli: &Cli,
    samples: usize,
    points: usize,
    suites: &[String],
) -> Result<(), QnlsError> {
    let dir = out_dir(cli, None)?;
    let selected: Vec<String> = if suites.is_empty() {
        ALL_SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        suites.to_vec()
    };
    let reports = run_lemma_suites(&selected, samples, points, cli.seed)?;

    let nd_path = dir.join("lemmas.ndjson");
    {
        use std::io::Write as _;
        let mut f = std::io::BufWriter::new(std::fs::File::create(&nd_path)?);
        for r in &reports {
            serde_json::to_writer(&mut f, r)?;
            f.write_all(b"\n")?;
        }
    }
    for r in &reports {
        println!(
            "{:32} samples {:4}  max {:.4e}  mean {:.4e}  q90 {:.4e}",
            r.lemma, r.samples, r.max_ratio, r.mean_ratio, r.quantile_90
        );
    }

    let mut failures = Vec::new();
    for r in &reports {
        if !r.is_finite() {
            failures.push(format!("{}: non-finite ratio statistics", r.lemma));
        }
        let is_identity = r.lemma.contains("identity") || r.lemma.contains("involution");
        if is_identity && r.max_ratio > cli.tolerance_profile.identity_tol() {
            failures.push(format!(
                "{}: identity error {:.3e} exceeds {:.1e}",
                r.lemma,
                r.max_ratio,
                cli.tolerance_profile.identity_tol()
            ));
        }
    }
    if cli.tolerance_profile == ToleranceProfile::Strict {
        // Re-run at doubled resolution and require stable max ratios for
        // the inequality suites.
        let doubled = run_lemma_suites(&selected, samples, points * 2, cli.seed)?;
        for (a, b) in reports.iter().zip(&doubled) {
            let is_identity = a.lemma.contains("identity") || a.lemma.contains("involution");
            if is_identity {
                continue;
            }
            let drift = (b.max_ratio - a.max_ratio).abs() / a.max_ratio.max(1e-300);
            if drift > cli.tolerance_profile.stability_tol() {
                failures.push(format!(
                    "{}: max ratio drifts {:.1}% under resolution doubling",
                    a.lemma,
                    100.0 * drift
                ));
            }
        }
    }
    if !failures.is_empty() {
        return Err(QnlsError::Verification(failures.join("; ")));
    }
    println!("verify-lemmas: {} reports, all finite; written to {}", reports.len(), nd_path.display());
    Ok(())
}

fn cmd_report(run_dir: &Path) -> Result<(), QnlsError> {
    let record = RunRecord::read_json(&run_dir.join("run.json"))?;
    for artifact in &record.artifacts {
        let path = run_dir.join(&artifact.name);
        let actual = export::sha256_file(&path)?;
        if actual != artifact.sha256 {
            return Err(QnlsError::Verification(format!(
                "hash mismatch for {}: manifest {} vs actual {}",
                artifact.name, artifact.sha256, actual
            )));
        }
    }
    println!(
        "run: model {} d = {} n = {} seed {} ({:.2}s wall)",
        record.scenario.model,
        record.scenario.dim,
        record.scenario.grid.points,
        record.seed,
        record.elapsed_secs
    );
    // Channel summary from the CSV.
    let mut rdr = csv::Reader::from_path(run_dir.join("series.csv"))?;
    let headers: Vec<String> = rdr.headers()?.iter().map(|s| s.to_string()).collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for row in rdr.records() {
        for (i, cell) in row?.iter().enumerate() {
            columns[i].push(cell.parse().map_err(|_| {
                QnlsError::Format(format!("non-numeric cell in column {}", headers[i]))
            })?);
        }
    }
    println!("{:24} {:>13} {:>13} {:>13} {:>13}", "channel", "first", "final", "min", "max");
    for (name, col) in headers.iter().zip(&columns).skip(1) {
        let min = col.iter().copied().fold(f64::INFINITY, f64::min);
        let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{:24} {:13.6e} {:13.6e} {:13.6e} {:13.6e}",
            name,
            col.first().copied().unwrap_or(f64::NAN),
            col.last().copied().unwrap_or(f64::NAN),
            min,
            max
        );
    }
    println!("report: {} artifacts verified", record.artifacts.len());
    Ok(())
}

fn cmd_diff_run(cli: &Cli, perturbation: f64) -> Result<(), QnlsError> {
    if !(perturbation > 0.0) {
        return Err(QnlsError::Config("perturbation must be positive".into()));
    }
    let scenario = load_scenario(cli)?;
    let dir = out_dir(cli, Some(&scenario))?;
    let grid = scenario.build_grid()?;
    let model = scenario.build_model()?;
    let a = scenario.build_initial(&grid, model.components, cli.seed)?;
    // Perturb with an independent band-limited field of relative H^{1/2}
    // size `perturbation`.
    let noise_spec = EnsembleSpec {
        grid: grid.clone(),
        band_points: grid.points_all().to_vec(),
        count: model.components,
        amplitude: 1.0,
        window_sigma: None,
        seed: cli.seed.wrapping_add(1),
    };
    let a_h_half: f64 = (0..a.num_components())
        .map(|c| norms::sobolev_norm(&grid, a.component(c), 0.5).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = perturbation * if a_h_half > 0.0 { a_h_half } else { 1.0 };
    let mut b = a.clone();
    for c in 0..b.num_components() {
        let noise = noise_spec.sample(c);
        let n_h_half = norms::sobolev_norm(&grid, &noise, 0.5);
        for (dst, z) in b.component_mut(c).iter_mut().zip(&noise) {
            *dst += z * (scale / n_h_half);
        }
    }
    let config = scenario.build_solver_config();
    let report = functionals::difference_diagnostic(
        &model,
        &a,
        &b,
        &config,
        scenario.solver.t_end,
        scenario.solver.checkpoint_stride,
    )?;

    let mut series = DiagnosticSeries::new(report.times.clone());
    series.push_channel("v_norm_h_half", report.v_norm_h_half.clone())?;
    series.write_csv(&dir.join("diff.csv"))?;
    println!(
        "diff-run: |v(0)| = {:.6e}, sup ratio {:.4} over [0, {:.3}]",
        report.v_norm_h_half[0],
        report.max_ratio,
        report.times.last().unwrap()
    );
    let bound = cli.tolerance_profile.difference_ratio_bound();
    if report.max_ratio > bound {
        return Err(QnlsError::Verification(format!(
            "difference growth ratio {:.4} exceeds {bound}",
            report.max_ratio
        )));
    }
    Ok(())
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn hash_artifacts(dir: &Path, names: &[&str]) -> Result<Vec<ArtifactHash>, QnlsError> {
    names
        .iter()
        .map(|name| {
            Ok(ArtifactHash {
                name: name.to_string(),
                sha256: export::sha256_file(&dir.join(name))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_global_flags_and_verbs() {
        let cli = Cli::try_parse_from([
            "qnls",
            "--seed",
            "7",
            "--tolerance-profile",
            "strict",
            "verify-lemmas",
            "--samples",
            "5",
        ])
        .unwrap();
        assert_eq!(cli.seed, 7);
        assert_eq!(cli.tolerance_profile, ToleranceProfile::Strict);
        match cli.command {
            Command::VerifyLemmas { samples, .. } => assert_eq!(samples, 5),
            _ => panic!("wrong verb"),
        }
    }

    #[test]
    fn missing_config_is_a_config_error() {
        let cli = Cli::try_parse_from(["qnls", "simulate"]).unwrap();
        let err = run(&cli).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_suite_rejected() {
        let err = run_lemma_suites(&["nope".into()], 2, 32, 1).unwrap_err();
        assert!(matches!(err, QnlsError::Config(_)));
    }

    #[test]
    fn empty_selection_is_a_noop_success() {
        let reports = run_lemma_suites(&[], 2, 32, 1).unwrap();
        assert!(reports.is_empty());
    }
}
