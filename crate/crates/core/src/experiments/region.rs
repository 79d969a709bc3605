//! Energy-secrecy trade-off traced by sweeping the legitimate receiver's
//! splitting factor.

use std::io::{self, Write};

use crate::channel::{EveMode, Side, SystemParams};
use crate::error::{Error, Result};
use crate::montecarlo::{simulate_energy_secrecy, EnergySecrecyPoint};
use crate::outage::ArchitecturePair;

use super::{format_g10, McSettings};

pub const REGION_HEADER: &str =
    "label,mode,arch_s,arch_e,rho_s,mean_eh,eh_ci,ergodic_secrecy,secrecy_ci,rate_gap,rate_gap_ci,outage,outage_ci,in_region";

#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    pub label: String,
    pub base: SystemParams,
    pub rho_grid: Vec<f64>,
    pub arch: ArchitecturePair,
    pub modes: Vec<EveMode>,
    pub track: Side,
    pub mc: McSettings,
}

impl RegionSpec {
    /// `rho_e = 0.5`, `zeta = 0.8` on both sides, Sp-Sp, both modes.
    pub fn new(
        label: impl Into<String>,
        base: SystemParams,
        rho_grid: Vec<f64>,
        mc: McSettings,
    ) -> Self {
        let mut base = base;
        base.rho_e = 0.5;
        base.zeta_s = 0.8;
        base.zeta_e = 0.8;
        RegionSpec {
            label: label.into(),
            base,
            rho_grid,
            arch: ArchitecturePair::SP_SP,
            modes: EveMode::ALL.to_vec(),
            track: Side::Main,
            mc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub mode: EveMode,
    pub point: EnergySecrecyPoint,
    /// The mean rate gap is nonnegative here.
    pub in_region: bool,
}

fn check_rho_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::invalid(
            "rho_grid",
            "values must lie strictly between 0 and 1",
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "rho_grid",
            "values must be strictly increasing",
        ));
    }
    Ok(())
}

/// Every grid point for every mode, flagged by region membership.
pub fn region_points(spec: &RegionSpec) -> Result<Vec<RegionPoint>> {
    check_rho_grid(&spec.rho_grid)?;
    spec.base.validate()?;
    let mut out = Vec::with_capacity(spec.rho_grid.len() * spec.modes.len());
    for &mode in &spec.modes {
        for &rho in &spec.rho_grid {
            let mut p = spec.base;
            p.rho_s = rho;
            let point = simulate_energy_secrecy(&spec.mc.spec(p, spec.arch, mode), spec.track)?;
            out.push(RegionPoint {
                mode,
                point,
                in_region: point.mean_rate_gap >= 0.0,
            });
        }
    }
    Ok(out)
}

/// Region boundary per mode, restricted to points with a nonnegative mean rate gap.
pub fn region_sweep(
    base: &SystemParams,
    rho_grid: &[f64],
    modes: &[EveMode],
    mc: McSettings,
) -> Result<Vec<(EveMode, Vec<EnergySecrecyPoint>)>> {
    let mut spec = RegionSpec::new("", *base, rho_grid.to_vec(), mc);
    spec.modes = modes.to_vec();
    let points = region_points(&spec)?;
    Ok(modes
        .iter()
        .map(|&m| {
            (
                m,
                points
                    .iter()
                    .filter(|r| r.mode == m && r.in_region)
                    .map(|r| r.point)
                    .collect(),
            )
        })
        .collect())
}

fn sorted_by_eh(points: &[EnergySecrecyPoint]) -> Vec<EnergySecrecyPoint> {
    let mut v = points.to_vec();
    v.sort_by(|a, b| a.mean_eh.total_cmp(&b.mean_eh));
    v
}

/// Trapezoid area under ergodic secrecy against mean harvested energy.
pub fn region_area(points: &[EnergySecrecyPoint]) -> f64 {
    sorted_by_eh(points).windows(2).fold(0.0, |acc, w| {
        acc + 0.5 * (w[1].mean_eh - w[0].mean_eh) * (w[0].ergodic_secrecy + w[1].ergodic_secrecy)
    })
}

/// Outcome of comparing two boundaries at matched harvested energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dominance {
    /// No matched point where the first curve is significantly below the second.
    pub holds: bool,
    pub matched: usize,
    /// Smallest `(a - b) / sqrt(ci_a^2 + ci_b^2)` over matched points.
    pub worst_margin: f64,
}

/// Checks that `a` lies on or above `b` wherever their energy ranges overlap.
///
/// `b` is linearly interpolated (value and half-width) at each of `a`'s
/// energies; a point fails only if `a` sits below `b` by more than the
/// combined 95% half-width.
pub fn region_dominance(a: &[EnergySecrecyPoint], b: &[EnergySecrecyPoint]) -> Dominance {
    let b = sorted_by_eh(b);
    let mut matched = 0;
    let mut worst = f64::INFINITY;
    for pa in a {
        let Some(j) = b
            .windows(2)
            .position(|w| w[0].mean_eh <= pa.mean_eh && pa.mean_eh <= w[1].mean_eh)
        else {
            continue;
        };
        let (lo, hi) = (b[j], b[j + 1]);
        let t = if hi.mean_eh > lo.mean_eh {
            (pa.mean_eh - lo.mean_eh) / (hi.mean_eh - lo.mean_eh)
        } else {
            0.0
        };
        let sb = lo.ergodic_secrecy + t * (hi.ergodic_secrecy - lo.ergodic_secrecy);
        let cb = lo.secrecy_ci + t * (hi.secrecy_ci - lo.secrecy_ci);
        let spread = pa.secrecy_ci.hypot(cb);
        let margin = if spread > 0.0 {
            (pa.ergodic_secrecy - sb) / spread
        } else {
            (pa.ergodic_secrecy - sb).signum() * f64::INFINITY
        };
        matched += 1;
        worst = worst.min(margin);
    }
    Dominance {
        holds: matched > 0 && worst >= -1.0,
        matched,
        worst_margin: worst,
    }
}

/// The four trade-off curves compared in the region figure: `N` in {5, 10}
/// crossed with CSI error in {0.2, 0.001}.
pub fn fig7_region_specs(base: &SystemParams, rho_grid: &[f64], mc: McSettings) -> Vec<RegionSpec> {
    let mut out = Vec::new();
    for n in [5u32, 10] {
        for delta in [0.2, 0.001] {
            let mut p = *base;
            p.n_eves = n;
            p.delta_s = delta;
            p.delta_e = delta;
            out.push(RegionSpec::new(
                format!("n_eves={n};delta={}", format_g10(delta)),
                p,
                rho_grid.to_vec(),
                mc,
            ));
        }
    }
    out
}

pub fn write_region_csv<W: Write>(
    spec: &RegionSpec,
    points: &[RegionPoint],
    out: &mut W,
) -> io::Result<()> {
    for r in points {
        let p = &r.point;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            spec.label,
            r.mode,
            spec.arch.at_s,
            spec.arch.at_e,
            format_g10(p.rho_s),
            format_g10(p.mean_eh),
            format_g10(p.eh_ci),
            format_g10(p.ergodic_secrecy),
            format_g10(p.secrecy_ci),
            format_g10(p.mean_rate_gap),
            format_g10(p.rate_gap_ci),
            format_g10(p.outage),
            format_g10(p.outage_ci),
            r.in_region
        )?;
    }
    Ok(())
}
