//! The `swipt` command: outage queries, sweeps, energy-secrecy regions and
//! validation reports.
//!
//! Exit status: 0 success, 1 validation failure, 2 usage or configuration
//! error, 3 numerical failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use swipt_core::config::{apply_override, dump_config, parse_config};
use swipt_core::experiments::{
    fig7_region_specs, parse_grid, region_points, sweep_outage, validate, write_region_csv,
    write_sweep_csv, Axis, Figure, McSettings, RegionSpec, SweepSpec, REGION_HEADER,
};
use swipt_core::montecarlo::simulate_outage;
use swipt_core::outage::{outage_quadrature, outage_series_against, OutageEstimate};
use swipt_core::{ArchitecturePair, Error, EveMode, SeriesForm, Side, SystemParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const OUTAGE_HEADER: &str = "arch_s,arch_e,mode,method,value,ci_halfwidth,divergence";

#[derive(Debug, Parser)]
#[command(
    name = "swipt",
    version,
    about = "Secrecy outage and harvested energy of a SWIPT downlink with N eavesdroppers"
)]
pub struct Cli {
    /// Parameter file (`key = value` lines) applied on top of the built-in preset.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Override one parameter, e.g. `--set n_eves=10`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,

    /// Monte Carlo realizations per point.
    #[arg(long, default_value_t = 100_000, global = true)]
    pub mc_samples: u64,

    #[arg(long, default_value_t = 42, global = true)]
    pub seed: u64,

    /// Monte Carlo threads; results do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Print the resolved parameters in linear units and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outage probability at one operating point.
    Outage(OutageArgs),
    /// Outage over a parameter grid, as CSV.
    Sweep(SweepArgs),
    /// Harvested energy against ergodic secrecy rate over rho_s, as CSV.
    Region(RegionArgs),
    /// Compare quadrature, series and Monte Carlo for all eight cases.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Quad,
    Series,
    Mc,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArchChoice {
    SpSp,
    SpIn,
    InSp,
    InIn,
    All,
}

impl ArchChoice {
    fn cases(self) -> Vec<ArchitecturePair> {
        match self {
            ArchChoice::SpSp => vec![ArchitecturePair::SP_SP],
            ArchChoice::SpIn => vec![ArchitecturePair::SP_IN],
            ArchChoice::InSp => vec![ArchitecturePair::IN_SP],
            ArchChoice::InIn => vec![ArchitecturePair::IN_IN],
            ArchChoice::All => ArchitecturePair::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Noncoop,
    Coop,
    Both,
}

impl ModeChoice {
    fn modes(self) -> Vec<EveMode> {
        match self {
            ModeChoice::Noncoop => vec![EveMode::NonCooperative],
            ModeChoice::Coop => vec![EveMode::Cooperative],
            ModeChoice::Both => EveMode::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormChoice {
    Published,
    Rederived,
    Both,
    None,
}

impl FormChoice {
    fn forms(self) -> Vec<SeriesForm> {
        match self {
            FormChoice::Published => vec![SeriesForm::AsPublished],
            FormChoice::Rederived => vec![SeriesForm::Rederived],
            FormChoice::Both => vec![SeriesForm::AsPublished, SeriesForm::Rederived],
            FormChoice::None => vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideChoice {
    Main,
    Eve,
}

#[derive(Debug, Args)]
pub struct OutageArgs {
    #[arg(long, value_enum, default_value_t = MethodChoice::All)]
    pub method: MethodChoice,
    #[arg(long, value_enum, default_value_t = ArchChoice::All)]
    pub arch: ArchChoice,
    #[arg(long, value_enum, default_value_t = ModeChoice::Both)]
    pub mode: ModeChoice,
    /// Which series form(s) to print for `--method series|all`.
    #[arg(long, value_enum, default_value_t = FormChoice::Both)]
    pub series_form: FormChoice,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Swept key, e.g. `gbar_s_db`, `rho_s`, or `m` for both fading shapes.
    #[arg(
        long,
        required_unless_present = "figure",
        requires = "grid",
        conflicts_with = "figure"
    )]
    pub axis: Option<String>,
    /// `start:stop:count` or a comma-separated list, in the axis' units.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Preset sweeps: fig3a, fig3b, fig4, fig5, fig6.
    #[arg(long)]
    pub figure: Option<String>,
    /// Add Monte Carlo columns.
    #[arg(long)]
    pub mc: bool,
    /// Let `gbar_*` axes move independently of `omega_*`.
    #[arg(long)]
    pub free_axis: bool,
    #[arg(long, value_enum, default_value_t = ArchChoice::All)]
    pub arch: ArchChoice,
    #[arg(long, value_enum, default_value_t = ModeChoice::Both)]
    pub mode: ModeChoice,
    #[arg(long, value_enum, default_value_t = FormChoice::Published)]
    pub series_form: FormChoice,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    /// Grid of rho_s values in (0, 1).
    #[arg(long, default_value = "0.01:0.99:50")]
    pub rho_grid: String,
    /// Whose harvested energy to report (eavesdroppers are summed).
    #[arg(long, value_enum, default_value_t = SideChoice::Main)]
    pub side: SideChoice,
    #[arg(long, value_enum, default_value_t = ArchChoice::SpSp)]
    pub arch: ArchChoice,
    #[arg(long, value_enum, default_value_t = ModeChoice::Both)]
    pub mode: ModeChoice,
    /// Trace the four preset curves (N in {5, 10}, delta in {0.2, 0.001}) instead of one.
    ///
    /// Curves use rho_e = 0.5 and zeta = 0.8 unless `--set` says otherwise.
    #[arg(long)]
    pub fig7: bool,
}

/// A failure with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() {
            EXIT_NUMERICAL
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: format!("i/o error: {e}"),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Preset, then `--config`, then each `--set` in order.
pub fn resolve_params(cli: &Cli) -> Result<SystemParams, Failure> {
    let mut p = SystemParams::table1();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        p = parse_config(&text, p)?;
    }
    for o in &cli.overrides {
        apply_override(&mut p, o)?;
    }
    p.validate()?;
    Ok(p)
}

fn mc_settings(cli: &Cli) -> McSettings {
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    McSettings {
        n_samples: cli.mc_samples,
        seed: cli.seed,
        workers,
    }
}

fn open_output(cli: &Cli) -> Result<Box<dyn Write>, Failure> {
    Ok(match &cli.output {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| usage(format!("cannot create {}: {e}", path.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn execute(cli: &Cli) -> Result<i32, Failure> {
    let params = resolve_params(cli)?;
    if cli.workers == Some(0) {
        return Err(usage("--workers must be at least 1"));
    }
    if cli.dump_config {
        let mut out = open_output(cli)?;
        out.write_all(dump_config(&params).as_bytes())?;
        out.flush()?;
        return Ok(EXIT_OK);
    }
    let Some(command) = &cli.command else {
        return Err(usage(
            "no subcommand given (outage, sweep, region or validate); see --help",
        ));
    };
    let mc = mc_settings(cli);
    match command {
        Command::Outage(a) => outage(cli, &params, mc, a),
        Command::Sweep(a) => sweep(cli, &params, mc, a),
        Command::Region(a) => region(cli, &params, mc, a),
        Command::Validate => {
            let report = validate(&params, mc)?;
            let mut out = open_output(cli)?;
            out.write_all(report.render().as_bytes())?;
            out.flush()?;
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            })
        }
    }
}

fn estimate_line(arch: ArchitecturePair, mode: EveMode, e: &OutageEstimate) -> String {
    use swipt_core::experiments::format_g10;
    format!(
        "{},{},{},{},{},{},{}",
        arch.at_s,
        arch.at_e,
        mode,
        e.method,
        format_g10(e.value),
        format_g10(e.ci_halfwidth),
        e.meta.divergence.map(|d| d.to_string()).unwrap_or_default()
    )
}

fn outage(cli: &Cli, p: &SystemParams, mc: McSettings, a: &OutageArgs) -> Result<i32, Failure> {
    let want = |m: MethodChoice| a.method == m || a.method == MethodChoice::All;
    let mut lines = vec![OUTAGE_HEADER.to_string()];
    for arch in a.arch.cases() {
        for mode in a.mode.modes() {
            let quad = outage_quadrature(p, arch, mode)?;
            if want(MethodChoice::Quad) {
                lines.push(estimate_line(arch, mode, &quad));
            }
            if want(MethodChoice::Series) {
                for form in a.series_form.forms() {
                    match outage_series_against(p, arch, mode, form, quad.value) {
                        Ok(e) => lines.push(estimate_line(arch, mode, &e)),
                        Err(Error::Unsupported(msg)) if a.method == MethodChoice::All => {
                            eprintln!("note: series skipped: {msg}")
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            if want(MethodChoice::Mc) {
                let e = simulate_outage(&mc.spec(*p, arch, mode))?;
                lines.push(estimate_line(arch, mode, &e));
            }
        }
    }
    let mut out = open_output(cli)?;
    for l in lines {
        writeln!(out, "{l}")?;
    }
    out.flush()?;
    Ok(EXIT_OK)
}

fn sweep(cli: &Cli, p: &SystemParams, mc: McSettings, a: &SweepArgs) -> Result<i32, Failure> {
    let forms = a.series_form.forms();
    if forms.len() > 1 {
        return Err(usage("sweep takes a single --series-form"));
    }
    let mut specs = match (&a.figure, &a.axis) {
        (Some(name), _) => {
            let fig: Figure = name.parse()?;
            fig.sweeps(p)
        }
        (None, Some(axis)) => {
            let axis: Axis = axis.parse()?;
            let grid = parse_grid(a.grid.as_deref().unwrap_or_default())?;
            vec![SweepSpec::new(*p, axis, grid)]
        }
        (None, None) => return Err(usage("either --axis with --grid, or --figure, is required")),
    };
    for s in &mut specs {
        s.axis.couple_fading_mean = !a.free_axis;
        s.arch_cases = a.arch.cases();
        s.modes = a.mode.modes();
        s.series = forms.first().copied();
        s.mc = a.mc.then_some(mc);
    }
    let mut rows = Vec::new();
    for s in &specs {
        rows.extend(sweep_outage(s)?);
    }
    let mut out = open_output(cli)?;
    write_sweep_csv(&rows, &mut out)?;
    out.flush()?;
    if let Some(r) = rows.iter().find(|r| r.error.is_some()) {
        eprintln!(
            "error: numerical failure at {}={} {} {}: {}",
            r.axis,
            r.axis_value,
            r.arch,
            r.mode,
            r.error.as_deref().unwrap_or_default()
        );
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

fn region(cli: &Cli, p: &SystemParams, mc: McSettings, a: &RegionArgs) -> Result<i32, Failure> {
    let grid = parse_grid(&a.rho_grid)?;
    let archs = a.arch.cases();
    if archs.len() != 1 {
        return Err(usage("region takes a single --arch"));
    }
    let mut specs = if a.fig7 {
        fig7_region_specs(p, &grid, mc)
    } else {
        vec![RegionSpec::new("custom", *p, grid, mc)]
    };
    for s in &mut specs {
        s.arch = archs[0];
        s.modes = a.mode.modes();
        s.track = match a.side {
            SideChoice::Main => Side::Main,
            SideChoice::Eve => Side::Eve,
        };
        // Explicit overrides win over the region presets.
        for o in &cli.overrides {
            apply_override(&mut s.base, o)?;
        }
    }
    let mut out = open_output(cli)?;
    writeln!(out, "{REGION_HEADER}")?;
    for s in &specs {
        let points = region_points(s)?;
        write_region_csv(s, &points, &mut out)?;
    }
    out.flush()?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        let numerical = Error::NoConvergence {
            routine: "test",
            detail: String::new(),
        };
        assert_eq!(Failure::from(numerical).code, EXIT_NUMERICAL);
        assert_eq!(
            Failure::from(Error::UnknownKey("k".into())).code,
            EXIT_USAGE
        );
    }
}
