//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on invalid input or I/O failure, 2 when a
//! `verify` check exceeds its tolerance.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, OccupationVector};
use crate::lift::{evolve_density, evolve_state, network_operator, Backend, StateVector};
use crate::mesh::{closed_form_column, compose_chain, NetworkSpec};
use crate::states::{mixed_input, partial_trace, probability, DensityBasis, TargetKind, TargetState};
use crate::sweep::{find_extrema, sweep_theta, ExtremumKind, GridSpec, NetworkSource, SweepConfig};
use crate::symop::{channel_choices, general_output_density, general_output_state};
use crate::{max_abs_diff, unitarity_deviation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

/// Largest mode count `verify` accepts; the symbolic backend grows quickly.
pub const VERIFY_MAX_MODES: usize = 6;
const VERIFY_TOL: f64 = 1e-10;
const VERIFY_ANGLES: usize = 10;

#[derive(Parser, Debug)]
#[command(
    name = "bsnet",
    version,
    about = "Mixed multi-photon states through beam-splitter networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the Fock basis for m modes and n photons.
    Basis(SystemArgs),
    /// Evolve the mixed input (or one pure input) at a single angle.
    Evolve(EvolveArgs),
    /// Tabulate target probabilities over an angle grid.
    Sweep(SweepArgs),
    /// Cross-check the permanent, sequential and symbolic backends.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct SystemArgs {
    #[arg(short = 'm', long = "modes")]
    pub modes: usize,
    #[arg(short = 'n', long = "photons")]
    pub photons: usize,
}

#[derive(Args, Debug)]
pub struct ScoringArgs {
    /// Kept output ports, 1-based.
    #[arg(long, default_value = "1,2")]
    pub keep: String,
    /// Comma-separated targets: psi+, psi-, phi+, phi-, noon+, noon-.
    #[arg(long, alias = "target", default_value = "psi+,psi-,phi+,phi-,noon+,noon-")]
    pub targets: String,
    /// Photon number of NOON targets (defaults to the run's photon count).
    #[arg(long = "noon-n")]
    pub noon_n: Option<u32>,
    #[arg(long, default_value = "permanent")]
    pub backend: Backend,
    /// Network document; its splitter angles are replaced by the run angle.
    #[arg(long)]
    pub network: Option<PathBuf>,
    /// Interpret angles in degrees.
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Rejected here; present so a grid gets a clear error.
    #[arg(long, allow_hyphen_values = true, hide = true)]
    pub grid: Option<String>,
    /// Pure input occupation, e.g. 1,0,1; default is the uniform mixture.
    #[arg(long)]
    pub input: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    #[value(alias = "json-like")]
    Json,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    /// lo:hi:count, default 0:2π:1001.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Rejected here; sweeps take a grid.
    #[arg(long, allow_negative_numbers = true, hide = true)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let status = match &cli.command {
        Command::Basis(a) => cmd_basis(a, out),
        Command::Evolve(a) => cmd_evolve(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match status {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn parse_list<T, F>(s: &str, what: &str, f: F) -> Result<Vec<T>>
where
    F: Fn(&str) -> Option<T>,
{
    s.split(',')
        .map(|p| f(p.trim()).ok_or_else(|| Error::Parse(format!("bad {what} entry '{p}' in '{s}'"))))
        .collect()
}

pub fn parse_keep(s: &str) -> Result<(usize, usize)> {
    match parse_list(s, "keep", |p| p.parse::<usize>().ok())?[..] {
        [a, b] => Ok((a, b)),
        _ => Err(Error::Parse(format!("--keep takes two ports, got '{s}'"))),
    }
}

pub fn parse_grid(s: &str, degrees: bool) -> Result<GridSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(Error::InvalidGrid(format!("expected lo:hi:count, got '{s}'")));
    };
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidGrid(format!("bad bound '{x}'")))
    };
    let count = count
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::InvalidGrid(format!("bad count '{count}'")))?;
    let scale = if degrees { std::f64::consts::PI / 180.0 } else { 1.0 };
    GridSpec::new(num(lo)? * scale, num(hi)? * scale, count)
}

pub fn parse_targets(s: &str, noon_n: u32) -> Result<Vec<TargetKind>> {
    s.split(',').map(|p| TargetKind::parse(p, noon_n)).collect()
}

fn check_system(s: &SystemArgs) -> Result<()> {
    if s.modes == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    if s.photons > s.modes {
        return Err(Error::TooManyPhotons {
            modes: s.modes,
            photons: s.photons,
        });
    }
    Ok(())
}

fn load_network(scoring: &ScoringArgs, modes: usize) -> Result<Option<NetworkSpec>> {
    let Some(path) = &scoring.network else { return Ok(None) };
    let net = NetworkSpec::load(path)?;
    if net.modes != modes {
        return Err(Error::DimensionMismatch {
            expected: modes,
            found: net.modes,
        });
    }
    Ok(Some(net))
}

fn noon_photons(scoring: &ScoringArgs, photons: usize) -> u32 {
    scoring.noon_n.unwrap_or(photons as u32)
}

/// Listing only needs a mode count; photon totals above m are allowed here.
pub fn cmd_basis(a: &SystemArgs, out: &mut dyn Write) -> Result<i32> {
    let basis = enumerate_basis(a.modes, a.photons)?;
    let hard = basis.states().iter().filter(|s| s.is_hardcore()).count();
    writeln!(
        out,
        "modes {} photons {}: {} states, {} hard-core",
        a.modes,
        a.photons,
        basis.len(),
        hard
    )?;
    for (i, s) in basis.states().iter().enumerate() {
        let mark = if s.is_hardcore() { "  *" } else { "" };
        writeln!(out, "{i:>5}  {s}{mark}")?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_evolve(a: &EvolveArgs, out: &mut dyn Write) -> Result<i32> {
    if a.grid.is_some() {
        return Err(Error::InvalidGrid("evolve takes a single --theta, not a grid".into()));
    }
    let sys = &a.system;
    if sys.modes == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    let scale = if a.scoring.degrees {
        std::f64::consts::PI / 180.0
    } else {
        1.0
    };
    let file = load_network(&a.scoring, sys.modes)?;
    let network = match (file, a.theta) {
        (Some(net), Some(t)) => net.with_angle(t * scale),
        (Some(net), None) => net,
        (None, Some(t)) => NetworkSpec::chain(sys.modes, t * scale),
        (None, None) => return Err(Error::Parse("evolve needs --theta or --network".into())),
    };
    network.validate()?;

    if let Some(input) = &a.input {
        let occ: Vec<i64> = parse_list(input, "input", |p| p.parse::<i64>().ok())?;
        let occ = OccupationVector::from_signed(&occ)?;
        if occ.modes() != sys.modes {
            return Err(Error::DimensionMismatch {
                expected: sys.modes,
                found: occ.modes(),
            });
        }
        if occ.total() != sys.photons {
            return Err(Error::NotInBasis(occ.as_slice().to_vec()));
        }
        let basis = Arc::new(enumerate_basis(sys.modes, sys.photons)?);
        let state = StateVector::basis_state(basis.clone(), &occ)?;
        let evolved = evolve_state(&state, &network, a.scoring.backend)?;
        writeln!(out, "input {occ} backend {}", a.scoring.backend)?;
        for (s, amp) in basis.states().iter().zip(evolved.amplitudes().iter()) {
            if amp.norm() > 1e-12 {
                writeln!(out, "{s}  {:+.12} {:+.12}i", amp.re, amp.im)?;
            }
        }
        return Ok(EXIT_OK);
    }

    check_system(sys)?;
    let keep = parse_keep(&a.scoring.keep)?;
    let targets = parse_targets(&a.scoring.targets, noon_photons(&a.scoring, sys.photons))?;
    let rho = evolve_density(&mixed_input(sys.modes, sys.photons)?, &network, a.scoring.backend)?;
    let red = partial_trace(&rho, keep)?;
    writeln!(
        out,
        "reduced state on ports ({}, {}), backend {}",
        keep.0, keep.1, a.scoring.backend
    )?;
    if let DensityBasis::Reduced(rb) = red.basis() {
        for (i, v) in rb.states().iter().enumerate() {
            for (j, w) in rb.states().iter().enumerate() {
                let z = red.element(i, j);
                if z.norm() > 1e-14 {
                    writeln!(
                        out,
                        "  |{}{}⟩⟨{}{}|  {:+.12} {:+.12}i",
                        v[0], v[1], w[0], w[1], z.re, z.im
                    )?;
                }
            }
        }
    }
    for t in targets {
        let p = probability(&red, &TargetState::new(t)?)?;
        writeln!(out, "probability {t} {p:.12}")?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if a.theta.is_some() {
        return Err(Error::InvalidGrid("sweep takes --grid, not --theta".into()));
    }
    let sys = &a.system;
    check_system(sys)?;
    let targets = parse_targets(&a.scoring.targets, noon_photons(&a.scoring, sys.photons))?;
    let mut config = SweepConfig::new(sys.modes, sys.photons, parse_keep(&a.scoring.keep)?, targets);
    if let Some(g) = &a.grid {
        config.grid = parse_grid(g, a.scoring.degrees)?;
    }
    config.backend = a.scoring.backend;
    if let Some(net) = load_network(&a.scoring, sys.modes)? {
        config.network = NetworkSource::Custom { network: net };
    }

    let result = sweep_theta(&config)?;
    let extrema = config
        .targets
        .iter()
        .map(|&t| Ok((t, find_extrema(&result, t)?)))
        .collect::<Result<Vec<_>>>()?;
    let body = match a.format {
        OutputFormat::Csv => result.to_csv(),
        OutputFormat::Json => result.to_document(&extrema) + "\n",
    };

    // with no --out the data goes to stdout and the table to stderr
    let table: &mut dyn Write = match &a.out {
        Some(path) => {
            std::fs::write(path, body.as_bytes()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            writeln!(out, "wrote {} rows to {}", result.grid.len(), path.display())?;
            out
        }
        None => {
            out.write_all(body.as_bytes())?;
            err
        }
    };
    writeln!(
        table,
        "{:<12} {:<4} {:>18} {:>18}",
        "target", "kind", "theta", "probability"
    )?;
    for (t, list) in &extrema {
        if list.is_empty() {
            writeln!(table, "{:<12} flat", t.to_string())?;
        }
        for e in list {
            let kind = match e.kind {
                ExtremumKind::Max => "max",
                ExtremumKind::Min => "min",
            };
            writeln!(
                table,
                "{:<12} {:<4} {:>18.10} {:>18.12}",
                t.to_string(),
                kind,
                e.theta_star,
                e.value
            )?;
        }
    }
    Ok(EXIT_OK)
}

/// One named comparison in a verification run.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub max_deviation: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_deviation <= VERIFY_TOL
    }
}

/// Cross-backend and closed-form checks at `VERIFY_ANGLES` seeded angles.
pub fn verification_checks(modes: usize, photons: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles: Vec<f64> = (0..VERIFY_ANGLES)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    let basis = Arc::new(enumerate_basis(modes, photons)?);
    let input = mixed_input(modes, photons)?;
    let choices = channel_choices(modes, photons)?;

    let mut closed = 0.0f64;
    let mut seq = 0.0f64;
    let mut sym = 0.0f64;
    let mut unitarity = 0.0f64;
    let mut states = 0.0f64;
    let mut densities = 0.0f64;
    for &theta in &angles {
        let net = NetworkSpec::chain(modes, theta);
        let t = compose_chain(&net)?;
        for k in 1..=modes {
            let cf = closed_form_column(modes, k, theta)?;
            for (a, b) in cf.iter().zip(t.row(k)) {
                closed = closed.max((a - b).norm());
            }
        }
        let perm = network_operator(&net, &basis, Backend::Permanent)?;
        let sequential = network_operator(&net, &basis, Backend::Sequential)?;
        let symbolic = network_operator(&net, &basis, Backend::Symbolic)?;
        seq = seq.max(max_abs_diff(perm.matrix(), sequential.matrix()));
        sym = sym.max(max_abs_diff(perm.matrix(), symbolic.matrix()));
        unitarity = unitarity.max(unitarity_deviation(perm.matrix()));

        for ch in &choices {
            let symbolic_state = general_output_state(modes, photons, ch, theta)?;
            let occ: Vec<u32> = (1..=modes).map(|k| u32::from(!ch.contains(&k))).collect();
            let start = StateVector::basis_state(basis.clone(), &OccupationVector::new(occ)?)?;
            for backend in [Backend::Permanent, Backend::Sequential] {
                let evolved = evolve_state(&start, &net, backend)?;
                states = states.max(evolved.max_abs_diff(&symbolic_state));
            }
        }
        let rho_sym = general_output_density(modes, photons, theta)?;
        let rho_perm = perm.conjugate(&input)?;
        let rho_seq = sequential.conjugate(&input)?;
        densities = densities
            .max(max_abs_diff(rho_sym.matrix(), rho_perm.matrix()))
            .max(max_abs_diff(rho_seq.matrix(), rho_perm.matrix()));
    }
    let check = |name: &str, max_deviation: f64| Check {
        name: name.to_string(),
        max_deviation,
    };
    Ok(vec![
        check("closed-form chain rows vs composed chain", closed),
        check("sequential vs permanent operator", seq),
        check("symbolic vs permanent operator", sym),
        check("lifted operator unitarity", unitarity),
        check("closed-form output states vs evolved hard-core inputs", states),
        check("output density, all backends", densities),
    ])
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    check_system(&a.system)?;
    let (m, n) = (a.system.modes, a.system.photons);
    if m > VERIFY_MAX_MODES {
        return Err(Error::Parse(format!(
            "verify supports at most {VERIFY_MAX_MODES} modes, got {m}"
        )));
    }
    let checks = verification_checks(m, n, a.seed)?;
    writeln!(
        out,
        "verify modes {m} photons {n} seed {} ({VERIFY_ANGLES} angles, tolerance {VERIFY_TOL:e})",
        a.seed
    )?;
    for c in &checks {
        let tag = if c.passed() { "pass" } else { "FAIL" };
        writeln!(out, "{tag}  {:<55} max deviation {:.3e}", c.name, c.max_deviation)?;
    }
    let ok = checks.iter().all(Check::passed);
    writeln!(out, "{}", if ok { "all checks passed" } else { "verification failed" })?;
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
