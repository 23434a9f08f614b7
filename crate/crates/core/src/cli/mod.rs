//! Command-line front end: `circuit`, `spectrum`, `table`, `grape` and
//! `sequence-verify`. Settings resolve as flags, then `--config`, then
//! defaults. Exit codes: 0 success, 1 bad input, 2 numerical failure.

mod config;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use config::{parse_duration, GrapeConfig, RunConfig};

use crate::bits::BitString;
use crate::circuit::{build_mzi, controlled_parity, gates};
use crate::control::{
    cnot_reference_sequence, fidelity_gate, grape_optimize, local_z_invariant_fidelity, simulate_sequence,
    ControlProblem, InitialControls, PulseSequence,
};
use crate::error::{Error, Result};
use crate::format;
use crate::nmr::{linear_grid, render, rendered_csv, stage_spectrum, PrepSpec, Spectrum, SpinSystem, Stage};
use crate::pigeonhole::{build_table, probe_report};
use crate::qstate::{embed, measure_distribution, Operator, StateVector};

#[derive(Debug, Parser)]
#[command(name = "qphe", version, about = "Quantum pigeonhole effect: circuits, NMR spectra and pulse synthesis")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Spin-system TOML (defaults to the bundled placeholder system).
    #[arg(long, global = true)]
    pub system: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Seed for randomized steps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the interferometer with an optional pair probe.
    Circuit {
        #[arg(long)]
        particles: Option<usize>,
        /// Pair such as `12`, `U23`, or `none`.
        #[arg(long)]
        probe: Option<String>,
        /// Post-selected particle outcome, e.g. `000`.
        #[arg(long)]
        post: Option<String>,
    },
    /// Ancilla spectra at the experiment's stages.
    Spectrum {
        /// Stages to emit (thermal, pseudopure, mzi, u12, u13, u23); all by default.
        #[arg(long = "stage")]
        stages: Vec<String>,
        #[arg(long)]
        linewidth: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Classical vs quantum possibility table.
    Table {
        #[arg(long)]
        particles: Option<usize>,
    },
    /// GRAPE synthesis of a gate.
    Grape {
        /// cnot1, cnot2, cnot3, u12, u13, u23 or identity.
        #[arg(long)]
        target: Option<String>,
        /// Total duration, e.g. `600u`.
        #[arg(long)]
        duration: Option<String>,
        #[arg(long)]
        segments: Option<usize>,
        #[arg(long)]
        stop_fidelity: Option<f64>,
        #[arg(long)]
        max_iterations: Option<usize>,
        #[arg(long)]
        starts: Option<usize>,
    },
    /// Simulate delay/pulse CNOT sequences and check them against ideal gates.
    SequenceVerify {
        /// cnot1, cnot2 or cnot3; all three by default.
        #[arg(long)]
        target: Option<String>,
        /// Pulse-sequence text file to verify instead of the built-in one.
        #[arg(long)]
        sequence: Option<PathBuf>,
    },
}

/// Why a command did not succeed.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] Error),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

/// Parses `args` (program name first), runs the command and maps the
/// outcome to an exit code. Messages go to `out` and `err`.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Flag/config/default resolution shared by all commands.
struct Settings {
    cfg: RunConfig,
    system: Option<PathBuf>,
    out_dir: PathBuf,
    seed: u64,
}

impl Settings {
    fn new(cli: &Cli) -> Result<Self> {
        let cfg = match &cli.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        Ok(Settings {
            system: cli.system.clone().or_else(|| cfg.system.clone()),
            out_dir: cli.out_dir.clone().or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("qphe-out")),
            seed: cli.seed.or(cfg.seed).unwrap_or(1),
            cfg,
        })
    }

    fn spin_system(&self) -> Result<SpinSystem> {
        match &self.system {
            Some(path) => SpinSystem::from_file(path).map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
            None => Ok(SpinSystem::default_four_spin()),
        }
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents)?;
        Ok(path)
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    let settings = Settings::new(cli)?;
    match &cli.command {
        Command::Circuit { particles, probe, post } => cmd_circuit(&settings, *particles, probe.as_deref(), post.as_deref(), out),
        Command::Spectrum { stages, linewidth, epsilon } => cmd_spectrum(&settings, stages, *linewidth, *epsilon, out),
        Command::Table { particles } => cmd_table(&settings, *particles, out),
        Command::Grape { target, duration, segments, stop_fidelity, max_iterations, starts } => cmd_grape(
            &settings,
            GrapeFlags {
                target: target.clone(),
                duration: duration.clone(),
                segments: *segments,
                stop_fidelity: *stop_fidelity,
                max_iterations: *max_iterations,
                starts: *starts,
            },
            out,
        ),
        Command::SequenceVerify { target, sequence } => cmd_sequence_verify(&settings, target.as_deref(), sequence.as_deref(), out),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Input(e.into())
}

/// `12`, `U12`, `u12` → (0, 1); `none` → None.
pub fn parse_probe(text: &str) -> Result<Option<(usize, usize)>> {
    let t = text.trim().trim_start_matches(['U', 'u']);
    if text.trim().eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    let digits: Vec<usize> = t.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>().unwrap_or_default();
    match digits[..] {
        [i, j] if i >= 1 && j >= 1 && i != j => Ok(Some((i.min(j) - 1, i.max(j) - 1))),
        _ => Err(Error::Config(format!("probe {text:?} must look like 12, U23 or none"))),
    }
}

fn cmd_circuit(
    s: &Settings,
    particles: Option<usize>,
    probe: Option<&str>,
    post: Option<&str>,
    out: &mut dyn Write,
) -> std::result::Result<(), CliError> {
    let n = particles.or(s.cfg.particles).unwrap_or(3);
    if !(1..=8).contains(&n) {
        return Err(Error::Config(format!("--particles {n} outside 1..=8")).into());
    }
    let probe = parse_probe(probe.or(s.cfg.probe.as_deref()).unwrap_or("none"))?;
    let post: BitString = match post.or(s.cfg.post.as_deref()) {
        Some(p) => p.parse().map_err(|e| Error::Config(format!("--post: {e}")))?,
        None => BitString::zeros(n),
    };
    if post.len() != n {
        return Err(Error::Config(format!("--post {post} needs {n} bits")).into());
    }
    if let Some((_, j)) = probe {
        if j >= n {
            return Err(Error::Config(format!("probe particle {} exceeds {n} particles", j + 1)).into());
        }
    }

    let width = n + usize::from(probe.is_some());
    let circuit = build_mzi(n, probe)?;
    let final_state = circuit.run(&StateVector::basis(width, 0))?;
    let dist = measure_distribution(&final_state, &(0..width).collect::<Vec<_>>())?;
    let mut rows = Vec::new();
    for outcome in BitString::all(n) {
        for anc in 0..if probe.is_some() { 2 } else { 1 } {
            let idx = if probe.is_some() { (outcome.value() << 1) | anc } else { outcome.value() };
            rows.push([outcome.to_string(), anc.to_string(), format::num(dist.probs()[idx])]);
        }
    }
    let csv = format::csv_string(&["particles", "ancilla", "probability"], rows)?;
    let csv_path = s.write("circuit_probabilities.csv", &csv)?;

    let mut report = format!("particles {n}\nprobe {}\npost {post}\n", probe.map_or("none".to_string(), |(i, j)| format!("U{}{}", i + 1, j + 1)));
    if let Some(pair) = probe {
        let r = probe_report(n, pair, &post)?;
        let c = |z: crate::qstate::C64| format!("{} {}", format::num(z.re), format::num(z.im));
        writeln!(report, "overlap_post {}", c(r.overlap_same)).unwrap();
        writeln!(report, "overlap_all_minus_i {}", c(r.overlap_minus_i)).unwrap();
        writeln!(report, "overlap_all_plus_i {}", c(r.overlap_plus_i)).unwrap();
        writeln!(report, "p_post {}", format::num(r.p_post)).unwrap();
        writeln!(report, "p_joint_flip {}", format::num(r.p_joint_flip)).unwrap();
        writeln!(report, "p_flip_given_post {}", format::num(r.p_ancilla_flip_given_post)).unwrap();
        writeln!(report, "p_same_path_given_post {}", format::num(r.p_same_given_post())).unwrap();
    } else {
        let p = dist.probs()[post.value()];
        writeln!(report, "p_post {}", format::num(p)).unwrap();
    }
    let report_path = s.write("circuit_report.txt", &report)?;
    out.write_all(report.as_bytes()).map_err(io)?;
    writeln!(out, "wrote {} and {}", csv_path.display(), report_path.display()).map_err(io)?;
    Ok(())
}

/// Scales a spectrum so the thermal ancilla lines have unit amplitude.
fn thermal_units(spec: &Spectrum, reference: f64) -> Spectrum {
    let mut s = spec.clone();
    s.lines.iter_mut().for_each(|l| l.amplitude /= reference);
    s
}

fn cmd_spectrum(
    s: &Settings,
    stages: &[String],
    linewidth: Option<f64>,
    epsilon: Option<f64>,
    out: &mut dyn Write,
) -> std::result::Result<(), CliError> {
    let sys = s.spin_system()?;
    let names: Vec<String> = if !stages.is_empty() {
        stages.to_vec()
    } else if let Some(cfg) = &s.cfg.stages {
        cfg.clone()
    } else {
        Stage::standard().iter().map(Stage::to_string).collect()
    };
    let stages: Vec<Stage> = names.iter().map(|n| n.parse().map_err(|e: Error| Error::Config(e.to_string()))).collect::<Result<_>>()?;
    let linewidth = linewidth.or(s.cfg.linewidth).unwrap_or(crate::nmr::DEFAULT_LINEWIDTH);
    if !(linewidth > 0.0) {
        return Err(Error::Config(format!("linewidth {linewidth} must be positive")).into());
    }
    let prep = PrepSpec::new(epsilon.or(s.cfg.epsilon).unwrap_or(PrepSpec::default().epsilon));
    let reference = stage_spectrum(&sys, &prep, Stage::Thermal)?.lines.iter().map(|l| l.amplitude).fold(0.0, f64::max);
    if !(reference > 0.0) {
        return Err(Error::Config("thermal ancilla signal vanishes; check equilibrium weights".into()).into());
    }

    for stage in stages {
        let mut spec = thermal_units(&stage_spectrum(&sys, &prep, stage)?, reference);
        spec.linewidth = linewidth;
        let lo = spec.lines.iter().map(|l| l.frequency).fold(f64::INFINITY, f64::min) - 10.0 * linewidth;
        let hi = spec.lines.iter().map(|l| l.frequency).fold(f64::NEG_INFINITY, f64::max) + 10.0 * linewidth;
        let grid = linear_grid(lo, hi, 2001);
        let intensity = render(&spec, linewidth, &grid)?;
        let stick = s.write(&format!("spectrum_{stage}.csv"), &spec.to_csv()?)?;
        s.write(&format!("spectrum_{stage}_rendered.csv"), &rendered_csv(&grid, &intensity)?)?;
        let signs: String = spec
            .lines
            .iter()
            .map(|l| if l.amplitude > 1e-9 { '+' } else if l.amplitude < -1e-9 { '-' } else { '0' })
            .collect();
        writeln!(out, "{:<10} {signs}  {}", stage.to_string(), stick.display()).map_err(io)?;
    }
    Ok(())
}

fn cmd_table(s: &Settings, particles: Option<usize>, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    let n = particles.or(s.cfg.particles).unwrap_or(3);
    let table = build_table(n).map_err(|e| Error::Config(e.to_string()))?;
    let text = table.to_text();
    s.write(&format!("table_{n}.txt"), &text)?;
    let csv_path = s.write(&format!("table_{n}.csv"), &table.to_csv()?)?;
    out.write_all(text.as_bytes()).map_err(io)?;
    writeln!(out, "wrote {}", csv_path.display()).map_err(io)?;
    Ok(())
}

/// Named target gates on the spin register.
pub fn target_gate(name: &str, sys: &SpinSystem) -> Result<Operator> {
    let n = sys.n_spins();
    let a = sys.ancilla_index();
    let parts = sys.particle_indices();
    let particle = |k: usize| {
        parts.get(k.wrapping_sub(1)).copied().ok_or_else(|| Error::Config(format!("target {name:?}: no particle {k}")))
    };
    let lower = name.to_ascii_lowercase();
    if lower == "identity" {
        return Ok(Operator::identity(1 << n));
    }
    if let Some(k) = lower.strip_prefix("cnot").and_then(|d| d.parse::<usize>().ok()) {
        return embed(&gates::cnot(), &[particle(k)?, a], n);
    }
    if let Ok(Some((i, j))) = parse_probe(&lower) {
        return controlled_parity(particle(i + 1)?, particle(j + 1)?, a, n);
    }
    Err(Error::Config(format!("unknown target {name:?} (cnot1..3, u12, u13, u23, identity)")))
}

struct GrapeFlags {
    target: Option<String>,
    duration: Option<String>,
    segments: Option<usize>,
    stop_fidelity: Option<f64>,
    max_iterations: Option<usize>,
    starts: Option<usize>,
}

fn cmd_grape(s: &Settings, flags: GrapeFlags, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    let g = &s.cfg.grape;
    let sys = s.spin_system()?;
    let target_name = flags.target.or_else(|| g.target.clone()).unwrap_or_else(|| "cnot1".into()).to_ascii_lowercase();
    let target = target_gate(&target_name, &sys)?;
    let identity = target_name == "identity";
    let duration = match (&flags.duration, &g.duration) {
        (Some(d), _) => parse_duration(d)?,
        (None, Some(v)) => config::duration_value(v)?,
        // the identity needs no time at all
        (None, None) if identity => 0.0,
        (None, None) => 600e-6,
    };
    let segments = flags.segments.or(g.segments).unwrap_or(150);
    if segments == 0 {
        return Err(Error::Config("--segments must be positive".into()).into());
    }
    let mut problem = ControlProblem::new(target, segments, duration / segments as f64);
    if let Some(hz) = g.max_amplitude_hz {
        problem.max_amplitude = 2.0 * std::f64::consts::PI * hz;
    }
    if let Some(scales) = &g.rf_scales {
        problem.rf_scales = scales.clone();
    }
    problem.stop_fidelity = flags.stop_fidelity.or(g.stop_fidelity).unwrap_or(0.995);
    problem.max_iterations = flags.max_iterations.or(g.max_iterations).unwrap_or(2000);
    problem.starts = flags.starts.or(g.starts).unwrap_or(problem.starts);
    problem.initial = if identity { InitialControls::Zero } else { InitialControls::Random { seed: s.seed, fraction: 1.0 } };
    problem.validate(&sys).map_err(|e| Error::Config(e.to_string()))?;

    let result = grape_optimize(&problem, &sys)?;
    let stem = format!("grape_{target_name}");
    s.write(&format!("{stem}_controls.csv"), &result.field.to_csv(&sys)?)?;
    let log = format::csv_string(
        &["iteration", "average_fidelity"],
        result.history.iter().enumerate().map(|(k, f)| [k.to_string(), format::num(*f)]),
    )?;
    s.write(&format!("{stem}_log.csv"), &log)?;

    let mut report = format!(
        "target {target_name}\nduration_s {}\nsegments {segments}\nmax_amplitude_rad_s {}\nseed {}\n",
        format::num(duration),
        format::num(problem.max_amplitude),
        s.seed
    );
    for (scale, f) in problem.rf_scales.iter().zip(&result.fidelity_per_scale) {
        writeln!(report, "fidelity_scale_{scale} {}", format::num(*f)).unwrap();
    }
    writeln!(report, "average_fidelity {}", format::num(result.average_fidelity)).unwrap();
    writeln!(report, "worst_fidelity {}", format::num(result.worst_fidelity)).unwrap();
    writeln!(report, "iterations {}", result.iterations).unwrap();
    writeln!(report, "converged {}", result.converged).unwrap();
    let report_path = s.write(&format!("{stem}_report.txt"), &report)?;
    out.write_all(report.as_bytes()).map_err(io)?;
    writeln!(out, "wrote {}", report_path.display()).map_err(io)?;

    if result.converged {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "GRAPE did not reach {} (best average fidelity {})",
            problem.stop_fidelity,
            format::num(result.average_fidelity)
        )))
    }
}

/// Local-z-invariant fidelity a reference sequence must reach.
pub const SEQUENCE_THRESHOLD: f64 = 1.0 - 1e-9;

fn cmd_sequence_verify(
    s: &Settings,
    target: Option<&str>,
    sequence: Option<&Path>,
    out: &mut dyn Write,
) -> std::result::Result<(), CliError> {
    let sys = s.spin_system()?;
    let targets: Vec<String> = match target {
        Some(t) => vec![t.to_ascii_lowercase()],
        None if sequence.is_some() => return Err(Error::Config("--sequence needs --target".into()).into()),
        None => (1..=sys.particle_indices().len().min(3)).map(|k| format!("cnot{k}")).collect(),
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for name in &targets {
        let ideal = target_gate(name, &sys)?;
        let seq = match sequence {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                PulseSequence::from_text(&text, sys.clone())?
            }
            None => {
                let k: usize = name
                    .strip_prefix("cnot")
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| Error::Config(format!("built-in sequences exist for cnot1..3, not {name:?}")))?;
                let control = *sys.particle_indices().get(k.wrapping_sub(1)).ok_or_else(|| Error::Config(format!("no particle {k}")))?;
                let seq = cnot_reference_sequence(control, &sys).map_err(|e| Error::Config(e.to_string()))?;
                s.write(&format!("{name}_sequence.txt"), &seq.to_text())?;
                seq
            }
        };
        let u = simulate_sequence(&seq);
        let plain = fidelity_gate(&ideal, &u)?;
        let corrected = local_z_invariant_fidelity(&ideal, &u)?.fidelity;
        if corrected < SEQUENCE_THRESHOLD {
            failures.push(name.clone());
        }
        writeln!(
            out,
            "{name:<6} duration {:>10} s  gate fidelity {}  local-z fidelity {}",
            format::num(seq.total_duration()),
            format::num(plain),
            format::num(corrected)
        )
        .map_err(io)?;
        rows.push([name.clone(), format::num(seq.total_duration()), format::num(plain), format::num(corrected)]);
    }
    let csv = format::csv_string(&["target", "duration_s", "gate_fidelity", "local_z_fidelity"], rows)?;
    let path = s.write("sequence_verify.csv", &csv)?;
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("local-z fidelity below {SEQUENCE_THRESHOLD} for {}", failures.join(", "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probes() {
        assert_eq!(parse_probe("12").unwrap(), Some((0, 1)));
        assert_eq!(parse_probe("U32").unwrap(), Some((1, 2)));
        assert_eq!(parse_probe("none").unwrap(), None);
        assert!(parse_probe("11").is_err());
        assert!(parse_probe("1").is_err());
        assert!(parse_probe("ab").is_err());
    }

    #[test]
    fn targets() {
        let sys = SpinSystem::default_four_spin();
        for name in ["cnot1", "cnot2", "cnot3", "u12", "u13", "u23", "identity"] {
            assert!(target_gate(name, &sys).unwrap().is_unitary(1e-12), "{name}");
        }
        assert!(target_gate("cnot4", &sys).is_err());
        assert!(target_gate("swap", &sys).is_err());
        let u12 = target_gate("u12", &sys).unwrap();
        let via_cnots = target_gate("cnot1", &sys).unwrap().compose(&target_gate("cnot2", &sys).unwrap()).unwrap();
        assert!(crate::qstate::max_abs_diff(u12.matrix(), via_cnots.matrix()) < 1e-15);
    }
}
