//! Quadrature, both series forms and Monte Carlo side by side for all eight
//! architecture and cooperation cases.

use std::fmt::Write as _;

use crate::channel::{EveMode, SystemParams};
use crate::config::dump_config;
use crate::error::{Error, Result};
use crate::montecarlo::simulate_outage;
use crate::outage::{
    outage_quadrature, outage_series_against, ArchitecturePair, OutageEstimate, SeriesForm,
    SERIES_DIVERGENCE_TOL,
};

use super::{format_g10, McSettings};

/// Agreement band in standard errors of the Monte Carlo estimate.
const SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseReport {
    pub arch: ArchitecturePair,
    pub mode: EveMode,
    pub quadrature: OutageEstimate,
    pub monte_carlo: OutageEstimate,
    /// `None` for non-integer fading shapes.
    pub rederived: Option<OutageEstimate>,
    pub as_published: Option<OutageEstimate>,
}

impl CaseReport {
    fn sigma(&self) -> f64 {
        let p = self.monte_carlo.value;
        (p * (1.0 - p) / self.monte_carlo.meta.samples as f64).sqrt()
    }

    /// Distance from the Monte Carlo estimate in standard errors.
    fn z(&self, value: f64) -> f64 {
        let d = (value - self.monte_carlo.value).abs();
        let s = self.sigma();
        if s > 0.0 {
            d / s
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn quadrature_agrees(&self) -> bool {
        let s = self.sigma();
        (self.quadrature.value - self.monte_carlo.value).abs() <= SIGMAS * s
    }

    pub fn rederived_agrees(&self) -> bool {
        self.rederived
            .is_none_or(|r| r.meta.divergence != Some(true))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub params: SystemParams,
    pub mc: McSettings,
    pub cases: Vec<CaseReport>,
}

impl ValidationReport {
    pub fn agreements(&self) -> usize {
        self.cases.iter().filter(|c| c.quadrature_agrees()).count()
    }

    /// Every quadrature value within the band and every rederived series within tolerance.
    pub fn passed(&self) -> bool {
        self.cases
            .iter()
            .all(|c| c.quadrature_agrees() && c.rederived_agrees())
    }

    /// Plain-text report. Depends only on the parameters, seed and sample count.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "secrecy outage validation");
        let _ = writeln!(
            s,
            "monte carlo: {} samples, seed {}",
            self.mc.n_samples, self.mc.seed
        );
        let _ = writeln!(s, "series tolerance: {}", format_g10(SERIES_DIVERGENCE_TOL));
        let _ = writeln!(
            s,
            "agreement band: {SIGMAS} standard errors of the monte carlo estimate"
        );
        let _ = writeln!(s, "\nparameters:");
        for line in dump_config(&self.params).lines() {
            let _ = writeln!(s, "  {line}");
        }
        let mut divergent = Vec::new();
        for c in &self.cases {
            let _ = writeln!(s, "\ncase {} {}", c.arch, c.mode);
            let _ = writeln!(
                s,
                "  quadrature           {}",
                format_g10(c.quadrature.value)
            );
            for (name, est) in [
                ("series rederived    ", c.rederived),
                ("series as published ", c.as_published),
            ] {
                match est {
                    Some(e) => {
                        let flag = if e.meta.divergence == Some(true) {
                            "DIVERGENT"
                        } else {
                            "ok"
                        };
                        let _ = writeln!(
                            s,
                            "  {name} {}  |diff| {}  {flag}",
                            format_g10(e.value),
                            format_g10((e.value - c.quadrature.value).abs())
                        );
                        if e.meta.divergence == Some(true) {
                            divergent.push((c, name.trim_end(), e));
                        }
                    }
                    None => {
                        let _ = writeln!(s, "  {name} n/a (non-integer fading shape)");
                    }
                }
            }
            let _ = writeln!(
                s,
                "  monte carlo          {} +- {}",
                format_g10(c.monte_carlo.value),
                format_g10(c.monte_carlo.ci_halfwidth)
            );
            let verdict = if c.quadrature_agrees() {
                "PASS"
            } else {
                "FAIL"
            };
            let _ = writeln!(
                s,
                "  quadrature vs monte carlo: {} sigma  {verdict}",
                format_g10(round4(c.z(c.quadrature.value)))
            );
        }
        let _ = writeln!(s, "\nseries divergences: {}", divergent.len());
        for (c, name, e) in &divergent {
            let zs = c.z(e.value);
            let zq = c.z(c.quadrature.value);
            let verdict = match (zq <= SIGMAS, zs <= SIGMAS) {
                (true, false) => "monte carlo supports quadrature",
                (false, true) => "monte carlo supports series",
                (true, true) => "inconclusive (both within band)",
                (false, false) => "inconclusive (neither within band)",
            };
            let _ = writeln!(
                s,
                "  {} {} {name}: series {} sigma, quadrature {} sigma from monte carlo; {verdict}",
                c.arch,
                c.mode,
                format_g10(round4(zs)),
                format_g10(round4(zq))
            );
        }
        let _ = writeln!(
            s,
            "\nquadrature-vs-MC agreement: {}/{}",
            self.agreements(),
            self.cases.len()
        );
        let rederived_ok = self.cases.iter().filter(|c| c.rederived_agrees()).count();
        let _ = writeln!(
            s,
            "rederived series agreement: {}/{}",
            rederived_ok,
            self.cases.len()
        );
        let _ = writeln!(s, "result: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

fn round4(x: f64) -> f64 {
    if x.is_finite() {
        (x * 1e4).round() / 1e4
    } else {
        x
    }
}

fn series(
    p: &SystemParams,
    arch: ArchitecturePair,
    mode: EveMode,
    form: SeriesForm,
    reference: f64,
) -> Result<Option<OutageEstimate>> {
    match outage_series_against(p, arch, mode, form, reference) {
        Ok(e) => Ok(Some(e)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs all eight cases at `p`.
pub fn validate(p: &SystemParams, mc: McSettings) -> Result<ValidationReport> {
    p.validate()?;
    let mut cases = Vec::with_capacity(8);
    for arch in ArchitecturePair::ALL {
        for mode in EveMode::ALL {
            let quadrature = outage_quadrature(p, arch, mode)?;
            let monte_carlo = simulate_outage(&mc.spec(*p, arch, mode))?;
            cases.push(CaseReport {
                arch,
                mode,
                quadrature,
                monte_carlo,
                rederived: series(p, arch, mode, SeriesForm::Rederived, quadrature.value)?,
                as_published: series(p, arch, mode, SeriesForm::AsPublished, quadrature.value)?,
            });
        }
    }
    Ok(ValidationReport {
        params: *p,
        mc,
        cases,
    })
}
