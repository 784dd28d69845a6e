//! `zeeman`: orbit levels, guiding-field grids, selection tables and
//! invariant checks for the wave-particle Zeeman model.
//!
//! Exit status: 0 success, 1 usage or validation error, 2 solver or domain
//! error, 3 failed verification.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod output;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use zeeman_core::field::{build_mode_pair, field_grid, GridSpec, ModeSpec};
use zeeman_core::harmony::selection_rule_enumerate;
use zeeman_core::model::{larmor_frequency, ModelParams, RawParams};
use zeeman_core::orbit::{
    action_integral, lorentz_residual, orbit_perturbative, solve_orbit_exact, zeeman_table, Dynamics,
    OrbitSolution,
};

use crate::config::{parse_n_list, parse_time, read_config, resolve, DEFAULT_ALPHA_INV};
use crate::error::CliError;
use crate::output::{num, open, suffixed, write_csv, write_json};
use crate::verify::{dressed_mass, Suite, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "zeeman", version, about = "Wave-particle model of the normal Zeeman effect")]
#[command(allow_negative_numbers = true)]
struct Cli {
    /// JSON file with model parameters (alpha or alpha_inv, m_p, sigma, B, u0, T).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(flatten)]
    params: ParamFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ParamFlags {
    #[arg(long = "alpha-inv", global = true)]
    alpha_inv: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long = "m-p", global = true)]
    m_p: Option<f64>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
    /// Magnetic field along +z.
    #[arg(long = "B", global = true)]
    b_field: Option<f64>,
    #[arg(long, global = true)]
    u0: Option<f64>,
    /// Ignore unknown keys in the config file.
    #[arg(long, global = true)]
    permissive: bool,
}

impl ParamFlags {
    fn raw(&self) -> RawParams {
        RawParams {
            alpha: self.alpha,
            alpha_inv: self.alpha_inv,
            m_p: self.m_p,
            sigma: self.sigma,
            b_field: self.b_field,
            u0: self.u0,
            tension: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Pgm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DynamicsArg {
    Relativistic,
    NonRelativistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Perturbative,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Zeeman level table from the exact and first-order solvers.
    Levels {
        /// Comma-separated orbit numbers.
        #[arg(long, default_value = "1,-1,2,-2", allow_hyphen_values = true)]
        n: String,
    },
    /// Guiding-field magnitude on the z = 0 plane.
    Grid {
        #[arg(long = "m-plus")]
        m_plus: u32,
        #[arg(long = "m-minus")]
        m_minus: u32,
        /// Orbit number; defaults to (m+ - m-)/2.
        #[arg(long)]
        n: Option<i64>,
        #[arg(long = "l-plus")]
        l_plus: Option<u32>,
        #[arg(long = "l-minus")]
        l_minus: Option<u32>,
        /// Times, as numbers or multiples of the period (T, T/4, 3T/2). Repeatable.
        #[arg(long = "t", default_value = "0")]
        times: Vec<String>,
        #[arg(long, default_value_t = 201)]
        resolution: usize,
        /// Half width of the square; defaults to twice the orbit radius.
        #[arg(long = "half-extent")]
        half_extent: Option<f64>,
    },
    /// Runs the invariant checks and writes a JSON report.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Replaces every check bound.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long = "alpha0-inv")]
        alpha0_inv: Option<u64>,
        #[arg(long = "n-max", default_value_t = 2)]
        n_max: u64,
    },
    /// Mode orders allowed by alpha0 = n^2/N.
    Selection {
        #[arg(long = "alpha0-inv")]
        alpha0_inv: Option<u64>,
        #[arg(long = "n-max", default_value_t = 2)]
        n_max: u64,
        /// Also test half-integer orbit numbers.
        #[arg(long = "include-half-integers")]
        include_half_integers: bool,
    },
    /// Single circular orbit.
    Orbit {
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, value_enum, default_value = "relativistic")]
        dynamics: DynamicsArg,
        #[arg(long, value_enum, default_value = "exact")]
        method: MethodArg,
    },
}

struct Context {
    file: RawParams,
    flags: RawParams,
    output: Option<PathBuf>,
    format: Option<Format>,
}

impl Context {
    fn params(&self) -> Result<ModelParams, CliError> {
        resolve(&self.flags, &self.file, 1.0 / DEFAULT_ALPHA_INV)
    }

    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::Usage(format!("format {f:?} is not available for this command")))
        }
    }

    fn sink(&self) -> Result<Box<dyn Write>, CliError> {
        open(self.output.as_deref())
    }
}

#[derive(Serialize)]
struct LevelRow {
    n: f64,
    #[serde(rename = "E0")]
    e0: f64,
    #[serde(rename = "E_exact")]
    e_exact: f64,
    #[serde(rename = "E_pert")]
    e_pert: f64,
    #[serde(rename = "delta_E")]
    delta_e: f64,
    omega_l: f64,
}

fn cmd_levels(ctx: &Context, n: &str) -> Result<(), CliError> {
    let ns = parse_n_list(n)?;
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let params = ctx.params()?;
    let m_eff = dressed_mass(&params)?;
    let wl = larmor_frequency(&params, m_eff)? + 0.0;
    let rows: Vec<LevelRow> = zeeman_table(&ns, &params, m_eff)?
        .into_iter()
        .map(|r| LevelRow {
            n: r.n,
            e0: r.e0,
            e_exact: r.e_exact,
            e_pert: r.e_perturbative,
            delta_e: r.delta_e + 0.0,
            omega_l: wl,
        })
        .collect();
    let mut out = ctx.sink()?;
    match format {
        Format::Json => write_json(&mut out, &rows)?,
        _ => {
            let lines: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![format!("{}", r.n), num(r.e0), num(r.e_exact), num(r.e_pert), num(r.delta_e), num(r.omega_l)]
                })
                .collect();
            write_csv(&mut out, &["n", "E0", "E_exact", "E_pert", "delta_E", "omega_L"], &lines)?;
        }
    }
    out.flush()?;
    Ok(())
}

struct GridArgs<'a> {
    m_plus: u32,
    m_minus: u32,
    n: Option<i64>,
    l_plus: Option<u32>,
    l_minus: Option<u32>,
    times: &'a [String],
    resolution: usize,
    half_extent: Option<f64>,
}

fn cmd_grid(ctx: &Context, args: GridArgs<'_>) -> Result<(), CliError> {
    let format = ctx.format(Format::Pgm, &[Format::Pgm, Format::Csv, Format::Json])?;
    if args.resolution < 2 {
        return Err(CliError::Usage("--resolution must be at least 2".into()));
    }
    if args.m_plus <= args.m_minus || (args.m_plus - args.m_minus) % 2 == 1 {
        return Err(CliError::Usage("need m+ > m- with an even difference".into()));
    }
    let n = args.n.unwrap_or(((args.m_plus - args.m_minus) / 2) as i64);
    if n == 0 {
        return Err(CliError::Usage("--n must be non-zero".into()));
    }
    let big_n = (args.m_plus + args.m_minus) as f64 / 2.0;
    let params = resolve(&ctx.flags, &ctx.file, (n * n) as f64 / big_n)?;
    let m_eff = dressed_mass(&params)?;
    let orbit = solve_orbit_exact(n as f64, &params, m_eff, Dynamics::Relativistic)?;
    let spec = ModeSpec::new(args.m_plus, args.m_minus)
        .with_degrees(args.l_plus.unwrap_or(args.m_plus), args.l_minus.unwrap_or(args.m_minus));
    let pair = build_mode_pair(spec, &orbit, &params)?;
    let half_extent = args.half_extent.unwrap_or(2.0 * pair.r_n);
    if !(half_extent > 0.0 && half_extent.is_finite()) {
        return Err(CliError::Usage("--half-extent must be positive".into()));
    }
    let times = args
        .times
        .iter()
        .map(|t| parse_time(t, orbit.period()))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, &t) in times.iter().enumerate() {
        let grid = field_grid(&pair, GridSpec { t, half_extent, resolution: args.resolution })?;
        let path = match (&ctx.output, times.len()) {
            (Some(p), 1) => Some(p.clone()),
            (Some(p), _) => Some(suffixed(p, i)),
            (None, _) => None,
        };
        let mut out = open(path.as_deref())?;
        match format {
            Format::Pgm => grid.write_pgm(&mut out)?,
            Format::Csv => grid.write_csv(&mut out)?,
            Format::Json => write_json(&mut out, &grid)?,
        }
        out.flush()?;
    }
    Ok(())
}

fn cmd_verify(ctx: &Context, opts: VerifyOptions) -> Result<(), CliError> {
    ctx.format(Format::Json, &[Format::Json])?;
    if opts.tolerance.is_some_and(|t| !(t >= 0.0)) {
        return Err(CliError::Usage("--tolerance must be non-negative".into()));
    }
    let params = ctx.params()?;
    let report = verify::run(&params, &opts)?;
    let mut out = ctx.sink()?;
    write_json(&mut out, &report)?;
    out.flush()?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Verify(report.failing().join("; ")))
    }
}

fn cmd_selection(ctx: &Context, alpha0_inv: Option<u64>, n_max: u64, include_half: bool) -> Result<(), CliError> {
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let a = match alpha0_inv {
        Some(a) => a,
        None => {
            let inv = 1.0 / ctx.params()?.alpha;
            if (inv - inv.round()).abs() > 1e-9 * inv {
                return Err(CliError::Usage("give --alpha0-inv (1/alpha is not an integer)".into()));
            }
            inv.round() as u64
        }
    };
    let entries = selection_rule_enumerate(a, n_max, include_half)?;
    let mut out = ctx.sink()?;
    match format {
        Format::Json => write_json(&mut out, &entries)?,
        _ => {
            let rows: Vec<Vec<String>> = entries
                .iter()
                .map(|e| {
                    vec![
                        e.n.to_string(),
                        e.n_big.to_string(),
                        e.m_plus.to_string(),
                        e.m_minus.to_string(),
                        e.alpha0.to_string(),
                    ]
                })
                .collect();
            write_csv(&mut out, &["n", "N", "m_plus", "m_minus", "alpha0"], &rows)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct OrbitDump {
    #[serde(flatten)]
    orbit: OrbitSolution,
    action_over_two_pi: f64,
    force_residual: f64,
}

fn cmd_orbit(ctx: &Context, n: i64, dynamics: DynamicsArg, method: MethodArg) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be non-zero".into()));
    }
    let format = ctx.format(Format::Json, &[Format::Json, Format::Csv])?;
    let params = ctx.params()?;
    let m_eff = dressed_mass(&params)?;
    let dynamics = match dynamics {
        DynamicsArg::Relativistic => Dynamics::Relativistic,
        DynamicsArg::NonRelativistic => Dynamics::NonRelativistic,
    };
    let orbit = match method {
        MethodArg::Exact => solve_orbit_exact(n as f64, &params, m_eff, dynamics)?,
        MethodArg::Perturbative => orbit_perturbative(n as f64, &params, m_eff)?,
    };
    let dump = OrbitDump {
        orbit,
        action_over_two_pi: action_integral(&orbit, &params) / std::f64::consts::TAU,
        force_residual: lorentz_residual(&orbit, &params),
    };
    let mut out = ctx.sink()?;
    match format {
        Format::Csv => {
            let o = &dump.orbit;
            let row = vec![
                format!("{}", o.n),
                num(o.r),
                num(o.v),
                num(o.gamma),
                num(o.energy),
                num(o.momentum),
                num(o.omega_l + 0.0),
                num(o.m_eff),
                num(dump.action_over_two_pi),
                num(dump.force_residual),
            ];
            let header = ["n", "r", "v", "gamma", "energy", "momentum", "omega_l", "m_eff", "action_over_two_pi", "force_residual"];
            write_csv(&mut out, &header, &[row])?;
        }
        _ => write_json(&mut out, &dump)?,
    }
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => read_config(Path::new(path), cli.params.permissive)?,
        None => RawParams::default(),
    };
    let ctx = Context { file, flags: cli.params.raw(), output: cli.output.clone(), format: cli.format };
    match cli.command {
        Command::Levels { n } => cmd_levels(&ctx, &n),
        Command::Grid { m_plus, m_minus, n, l_plus, l_minus, times, resolution, half_extent } => cmd_grid(
            &ctx,
            GridArgs { m_plus, m_minus, n, l_plus, l_minus, times: &times, resolution, half_extent },
        ),
        Command::Verify { suite, tolerance, alpha0_inv, n_max } => {
            cmd_verify(&ctx, VerifyOptions { suite, tolerance, alpha0_inv, n_max })
        }
        Command::Selection { alpha0_inv, n_max, include_half_integers } => {
            cmd_selection(&ctx, alpha0_inv, n_max, include_half_integers)
        }
        Command::Orbit { n, dynamics, method } => cmd_orbit(&ctx, n, dynamics, method),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zeeman: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
