//! Parameter sweeps, figure presets, the energy-secrecy region and the
//! validation report.

mod region;
mod validation;

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{EveMode, SystemParams};
use crate::config::{Field, Key};
use crate::error::{Error, Result};
use crate::montecarlo::{simulate_outage, SimSpec};
use crate::outage::{outage_quadrature, outage_series_against, ArchitecturePair, SeriesForm};

pub use region::{
    fig7_region_specs, region_area, region_dominance, region_points, region_sweep,
    write_region_csv, Dominance, RegionPoint, RegionSpec, REGION_HEADER,
};
pub use validation::{validate, CaseReport, ValidationReport};

pub const SWEEP_HEADER: &str =
    "axis,axis_value,arch_s,arch_e,mode,p_quad,p_series,p_mc,mc_ci,divergence";

/// Formats like C's `%.10g`.
pub fn format_g10(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..10).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (9 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// What a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisTarget {
    Key(Key),
    /// `m_s = m_e = m`.
    SharedShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Axis {
    pub target: AxisTarget,
    /// For `gbar_*` axes, move `omega_*` along so the fading mean stays fixed.
    pub couple_fading_mean: bool,
}

impl Axis {
    pub fn new(target: AxisTarget) -> Self {
        Axis {
            target,
            couple_fading_mean: true,
        }
    }

    /// Sets the axis to `v` (in the axis' units) on a copy of `base`.
    pub fn apply(&self, base: &SystemParams, v: f64) -> Result<SystemParams> {
        let mut p = *base;
        match self.target {
            AxisTarget::SharedShape => {
                p.m_s = v;
                p.m_e = v;
            }
            AxisTarget::Key(key) => {
                key.apply(&mut p, v)?;
                if self.couple_fading_mean {
                    match key.field {
                        Field::GbarS => p.omega_s = base.omega_s * p.gbar_s / base.gbar_s,
                        Field::GbarE => p.omega_e = base.omega_e * p.gbar_e / base.gbar_e,
                        _ => {}
                    }
                }
            }
        }
        Ok(p)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.target {
            AxisTarget::Key(k) => write!(f, "{k}"),
            AxisTarget::SharedShape => f.write_str("m"),
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "m" {
            return Ok(Axis::new(AxisTarget::SharedShape));
        }
        Ok(Axis::new(AxisTarget::Key(s.parse()?)))
    }
}

/// Parses `start:stop:count` (inclusive, evenly spaced) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |detail: String| Error::invalid("grid", detail);
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| bad(format!("`{t}` is not a number")))
    };
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("expected start:stop:count, got `{s}`")));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad(format!("`{}` is not a point count", parts[2])))?;
        linspace(a, b, n)
    } else {
        s.split(',').map(num).collect::<Result<Vec<f64>>>()?
    };
    check_grid(&grid)?;
    Ok(grid)
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i + 1 == n {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "grid",
            "grid values must be finite and strictly increasing",
        ));
    }
    Ok(())
}

/// Monte Carlo settings shared by sweeps, regions and validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub n_samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            n_samples: 100_000,
            seed: 42,
            workers: 1,
        }
    }
}

impl McSettings {
    pub fn spec(&self, params: SystemParams, arch: ArchitecturePair, mode: EveMode) -> SimSpec {
        SimSpec {
            params,
            arch,
            mode,
            n_samples: self.n_samples,
            seed: self.seed,
            workers: self.workers,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemParams,
    pub axis: Axis,
    /// Text for the `axis` column; defaults to the axis name.
    pub label: Option<String>,
    pub grid: Vec<f64>,
    pub arch_cases: Vec<ArchitecturePair>,
    pub modes: Vec<EveMode>,
    /// Series form for the `p_series` column, if wanted.
    pub series: Option<SeriesForm>,
    pub mc: Option<McSettings>,
}

impl SweepSpec {
    pub fn new(base: SystemParams, axis: Axis, grid: Vec<f64>) -> Self {
        SweepSpec {
            base,
            axis,
            label: None,
            grid,
            arch_cases: ArchitecturePair::ALL.to_vec(),
            modes: EveMode::ALL.to_vec(),
            series: Some(SeriesForm::AsPublished),
            mc: None,
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.axis.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: String,
    pub axis_value: f64,
    pub arch: ArchitecturePair,
    pub mode: EveMode,
    pub p_quad: Option<f64>,
    pub p_series: Option<f64>,
    pub p_mc: Option<f64>,
    pub mc_ci: Option<f64>,
    pub divergence: Option<bool>,
    /// Numerical failure encountered for this row.
    pub error: Option<String>,
}

/// Evaluates every (grid point, architecture, mode) in that order.
///
/// Invalid grid points fail the whole sweep; numerical failures are recorded
/// in the affected row only.
pub fn sweep_outage(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    check_grid(&spec.grid)?;
    let mut jobs = Vec::new();
    for &v in &spec.grid {
        let p = spec.axis.apply(&spec.base, v)?;
        p.validate()?;
        for &arch in &spec.arch_cases {
            for &mode in &spec.modes {
                jobs.push((v, p, arch, mode));
            }
        }
    }
    let label = spec.label();
    let mut rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(v, p, arch, mode)| analytic_row(&label, v, &p, arch, mode, spec.series))
        .collect();
    if let Some(mc) = spec.mc {
        for (row, &(_, p, arch, mode)) in rows.iter_mut().zip(&jobs) {
            let est = simulate_outage(&mc.spec(p, arch, mode))?;
            row.p_mc = Some(est.value);
            row.mc_ci = Some(est.ci_halfwidth);
        }
    }
    Ok(rows)
}

fn analytic_row(
    label: &str,
    v: f64,
    p: &SystemParams,
    arch: ArchitecturePair,
    mode: EveMode,
    series: Option<SeriesForm>,
) -> SweepRow {
    let mut row = SweepRow {
        axis: label.to_string(),
        axis_value: v,
        arch,
        mode,
        p_quad: None,
        p_series: None,
        p_mc: None,
        mc_ci: None,
        divergence: None,
        error: None,
    };
    let quad = match outage_quadrature(p, arch, mode) {
        Ok(q) => q.value,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.p_quad = Some(quad);
    if let Some(form) = series {
        match outage_series_against(p, arch, mode, form, quad) {
            Ok(s) => {
                row.p_series = Some(s.value);
                row.divergence = s.meta.divergence;
            }
            Err(Error::Unsupported(_)) => {}
            Err(e) => row.error = Some(e.to_string()),
        }
    }
    row
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(format_g10).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        let p_quad = if r.error.is_some() && r.p_quad.is_none() {
            "nan".to_string()
        } else {
            opt_cell(r.p_quad)
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.axis,
            format_g10(r.axis_value),
            r.arch.at_s,
            r.arch.at_e,
            r.mode,
            p_quad,
            opt_cell(r.p_series),
            opt_cell(r.p_mc),
            opt_cell(r.mc_ci),
            r.divergence.map(|d| d.to_string()).unwrap_or_default()
        )?;
    }
    Ok(())
}

/// Preset sweeps reproducing the outage figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Architecture comparison over the main-link SNR, `R_s = 1`.
    ArchitecturesRate1,
    /// The same at `R_s = 2`.
    ArchitecturesRate2,
    /// Outage over the shared Nakagami shape at several main-link SNRs.
    NakagamiSurface,
    /// Splitting factor at the legitimate receiver and at the eavesdroppers.
    PowerSplitting,
    /// Estimation error at either side with the other side held fixed.
    CsiError,
}

impl Figure {
    pub const ALL: [Figure; 5] = [
        Figure::ArchitecturesRate1,
        Figure::ArchitecturesRate2,
        Figure::NakagamiSurface,
        Figure::PowerSplitting,
        Figure::CsiError,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::ArchitecturesRate1 => "fig3a",
            Figure::ArchitecturesRate2 => "fig3b",
            Figure::NakagamiSurface => "fig4",
            Figure::PowerSplitting => "fig5",
            Figure::CsiError => "fig6",
        }
    }

    /// Sweeps for this figure on top of `base`.
    pub fn sweeps(self, base: &SystemParams) -> Vec<SweepSpec> {
        let key = |s: &str| Axis::from_str(s).expect("preset axis names are valid");
        let gbar_grid = linspace(0.0, 50.0, 21);
        match self {
            Figure::ArchitecturesRate1 => vec![SweepSpec::new(*base, key("gbar_s_db"), gbar_grid)],
            Figure::ArchitecturesRate2 => {
                let mut p = *base;
                p.r_s = 2.0;
                vec![SweepSpec::new(p, key("gbar_s_db"), gbar_grid)]
            }
            Figure::NakagamiSurface => {
                let mut p = *base;
                p.delta_s = 0.1;
                p.delta_e = 0.1;
                let gbar_axis = key("gbar_s_db");
                linspace(0.0, 50.0, 11)
                    .into_iter()
                    .map(|g| {
                        let at = gbar_axis.apply(&p, g).expect("dB values convert");
                        let mut s = SweepSpec::new(at, key("m"), (1..=6).map(f64::from).collect());
                        s.label = Some(format!("m@gbar_s_db={}", format_g10(g)));
                        s
                    })
                    .collect()
            }
            Figure::PowerSplitting => {
                let grid = linspace(0.1, 0.9, 9);
                let fixed = |axis: &str, other: Field, v: f64| {
                    let mut p = *base;
                    other.set(&mut p, v).expect("in range");
                    let mut s = SweepSpec::new(p, key(axis), grid.clone());
                    s.label = Some(format!("{axis}@{}={}", other.name(), format_g10(v)));
                    s
                };
                vec![
                    fixed("rho_s", Field::RhoE, 0.5),
                    fixed("rho_e", Field::RhoS, 0.5),
                ]
            }
            Figure::CsiError => {
                let grid = linspace(0.0, 0.9, 10);
                let mut out = Vec::new();
                for (axis, other) in [("delta_s", Field::DeltaE), ("delta_e", Field::DeltaS)] {
                    for v in [0.001, 0.5] {
                        let mut p = *base;
                        other.set(&mut p, v).expect("in range");
                        let mut s = SweepSpec::new(p, key(axis), grid.clone());
                        s.label = Some(format!("{axis}@{}={}", other.name(), format_g10(v)));
                        out.push(s);
                    }
                }
                out
            }
        }
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "figure",
                    format!("unknown figure `{s}` (expected fig3a, fig3b, fig4, fig5 or fig6)"),
                )
            })
    }
}
