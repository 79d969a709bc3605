//! Secrecy rates, outage thresholds and the secrecy outage probability.
//!
//! Outage means `C_s(chi_s) - C_e(chi_e) < R_s`. For every architecture pair
//! this is equivalent to `chi_s < g(chi_e)` for an affine threshold `g`, so a
//! single integral covers all eight cases:
//!
//! ```text
//! P_out = int_{x0}^inf F_s(g(x)) f_e(x) dx
//! ```
//!
//! where `x0` is where `g` turns positive. The series forms built on the
//! kernels in [`kernels`] are available through [`outage_series`].

pub mod kernels;
mod series;

use std::fmt;
use std::str::FromStr;

use crate::channel::{Architecture, EveMode, SystemParams};
use crate::distributions::LinkDistributions;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, Integral, QuadConfig};

pub use series::{outage_series, outage_series_against, SERIES_DIVERGENCE_TOL};

/// `sqrt(e / (2 pi))`, the constant in the intensity-channel rate law.
pub const C_CONST: f64 = 0.657_744_623_479_456_9;

/// Receiver architectures at the legitimate node and at the eavesdroppers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArchitecturePair {
    pub at_s: Architecture,
    pub at_e: Architecture,
}

impl ArchitecturePair {
    pub const SP_SP: Self = Self::new(Architecture::Separated, Architecture::Separated);
    pub const SP_IN: Self = Self::new(Architecture::Separated, Architecture::Integrated);
    pub const IN_SP: Self = Self::new(Architecture::Integrated, Architecture::Separated);
    pub const IN_IN: Self = Self::new(Architecture::Integrated, Architecture::Integrated);

    pub const ALL: [ArchitecturePair; 4] = [Self::SP_SP, Self::SP_IN, Self::IN_SP, Self::IN_IN];

    pub const fn new(at_s: Architecture, at_e: Architecture) -> Self {
        ArchitecturePair { at_s, at_e }
    }
}

impl fmt::Display for ArchitecturePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.at_s, self.at_e)
    }
}

impl FromStr for ArchitecturePair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| Error::invalid("arch", format!("expected e.g. `sp-in`, got `{s}`")))?;
        let one = |t: &str| match t.to_ascii_lowercase().as_str() {
            "sp" => Ok(Architecture::Separated),
            "in" => Ok(Architecture::Integrated),
            _ => Err(Error::invalid(
                "arch",
                format!("unknown architecture `{t}` in `{s}`"),
            )),
        };
        Ok(ArchitecturePair::new(one(a)?, one(b)?))
    }
}

/// Which printed form the series evaluation follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesForm {
    /// The closed forms exactly as printed, defects included.
    AsPublished,
    /// The same kernel structure rederived so that it equals the outage event.
    Rederived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Quadrature,
    Series(SeriesForm),
    MonteCarlo,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::Series(SeriesForm::AsPublished) => "series_as_published",
            Method::Series(SeriesForm::Rederived) => "series_rederived",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Evaluation diagnostics carried next to an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EstimateMeta {
    /// Estimated absolute integration error (deterministic methods).
    pub abs_error: f64,
    /// Integrand evaluations (deterministic methods).
    pub evaluations: usize,
    /// Channel realizations (Monte Carlo).
    pub samples: u64,
    /// Quadrature value the series was compared against, if any.
    pub reference: Option<f64>,
    /// `|series - reference| > SERIES_DIVERGENCE_TOL`.
    pub divergence: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    /// Outage probability. Only the as-published series may leave `[0, 1]`.
    pub value: f64,
    pub method: Method,
    /// 95% half-width for Monte Carlo, zero otherwise.
    pub ci_halfwidth: f64,
    pub meta: EstimateMeta,
}

/// Achievable rate of one receiver in bits/s/Hz.
pub fn capacity(chi: f64, arch: Architecture) -> f64 {
    match arch {
        Architecture::Separated => chi.ln_1p() / std::f64::consts::LN_2,
        Architecture::Integrated => (chi * C_CONST).log2(),
    }
}

/// `[C_s - C_e]^+`.
pub fn secrecy_rate(chi_s: f64, chi_e: f64, arch: ArchitecturePair) -> f64 {
    let cs = capacity(chi_s, arch.at_s);
    if cs == f64::NEG_INFINITY {
        return 0.0;
    }
    (cs - capacity(chi_e, arch.at_e)).max(0.0)
}

/// Main-link SNR below which a wiretap SNR of `gamma_e` causes outage.
/// May be negative (no outage possible); callers clamp.
pub fn snr_threshold(gamma_e: f64, arch: ArchitecturePair, r_s: f64) -> f64 {
    let k = r_s.exp2();
    match (arch.at_s, arch.at_e) {
        (Architecture::Separated, Architecture::Separated) => k * (1.0 + gamma_e) - 1.0,
        (Architecture::Separated, Architecture::Integrated) => k * gamma_e * C_CONST - 1.0,
        (Architecture::Integrated, Architecture::Separated) => k * (1.0 + gamma_e) / C_CONST,
        (Architecture::Integrated, Architecture::Integrated) => k * gamma_e,
    }
}

/// Smallest wiretap SNR at which the threshold is nonnegative.
pub(crate) fn threshold_root(arch: ArchitecturePair, r_s: f64) -> f64 {
    match arch {
        ArchitecturePair {
            at_s: Architecture::Separated,
            at_e: Architecture::Integrated,
        } => 1.0 / (r_s.exp2() * C_CONST),
        _ => 0.0,
    }
}

/// Tail probability at which semi-infinite integrals are first cut.
pub(crate) const FIRST_CUT_TAIL: f64 = 1e-12;

/// Secrecy outage probability by adaptive quadrature of the unified integral.
pub fn outage_quadrature(
    p: &SystemParams,
    arch: ArchitecturePair,
    mode: EveMode,
) -> Result<OutageEstimate> {
    outage_quadrature_with(p, arch, mode, &QuadConfig::default())
}

pub fn outage_quadrature_with(
    p: &SystemParams,
    arch: ArchitecturePair,
    mode: EveMode,
    cfg: &QuadConfig,
) -> Result<OutageEstimate> {
    let d = LinkDistributions::from_params(p, mode)?;
    let x0 = threshold_root(arch, p.r_s);
    let top = d.eve_upper_quantile(FIRST_CUT_TAIL)?;
    // x = x0 + t^2 removes the endpoint behaviour of both factors.
    let t_cut = (top - x0).max(d.eve_single.mean()).sqrt();
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let x = x0 + t * t;
        let ln_fs = d.main.ln_cdf(snr_threshold(x, arch, p.r_s));
        (ln_fs + d.eve_ln_pdf(x) + (2.0 * t).ln()).exp()
    };
    let tail = |t: f64| d.eve_sf(x0 + t * t);
    let mut r = integrate_to_infinity(integrand, 0.0, t_cut, Some(tail), cfg)?;
    if r.value > 0.5 {
        // Near one, integrate the complement so the small non-outage mass keeps its relative accuracy.
        let complement = |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let x = x0 + t * t;
            let ln_ss = d.main.ln_sf(snr_threshold(x, arch, p.r_s));
            (ln_ss + d.eve_ln_pdf(x) + (2.0 * t).ln()).exp()
        };
        let c = integrate_to_infinity(complement, 0.0, t_cut, Some(tail), cfg)?;
        r = Integral {
            value: d.eve_sf(x0) - c.value,
            abs_error: c.abs_error,
            evaluations: r.evaluations + c.evaluations,
            subintervals: r.subintervals + c.subintervals,
        };
    }
    Ok(OutageEstimate {
        value: r.value.clamp(0.0, 1.0),
        method: Method::Quadrature,
        ci_halfwidth: 0.0,
        meta: EstimateMeta {
            abs_error: r.abs_error,
            evaluations: r.evaluations,
            ..EstimateMeta::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Side;
    use proptest::prelude::*;

    fn table1() -> SystemParams {
        SystemParams::table1()
    }

    fn quad(p: &SystemParams, arch: ArchitecturePair, mode: EveMode) -> f64 {
        outage_quadrature(p, arch, mode).unwrap().value
    }

    #[test]
    fn constant_matches_definition() {
        let c = (std::f64::consts::E / (2.0 * std::f64::consts::PI)).sqrt();
        assert!((C_CONST - c).abs() <= f64::EPSILON * c);
    }

    #[test]
    fn secrecy_rate_examples() {
        assert!((secrecy_rate(3.0, 1.0, ArchitecturePair::SP_SP) - 1.0).abs() < 1e-15);
        for arch in [ArchitecturePair::SP_SP, ArchitecturePair::IN_IN] {
            assert_eq!(secrecy_rate(5.0, 5.0, arch), 0.0);
        }
        assert!((secrecy_rate(8.0 * 1.3, 1.3, ArchitecturePair::IN_IN) - 3.0).abs() < 1e-12);
        assert_eq!(secrecy_rate(0.0, 1.0, ArchitecturePair::IN_SP), 0.0);
        assert_eq!(secrecy_rate(1.0, 3.0, ArchitecturePair::SP_SP), 0.0);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(snr_threshold(0.0, ArchitecturePair::SP_SP, 1.0), 1.0);
        assert!(snr_threshold(0.1, ArchitecturePair::SP_IN, 1.0) < 0.0);
        assert_eq!(snr_threshold(4.0, ArchitecturePair::IN_IN, 1.0), 8.0);
        let root = threshold_root(ArchitecturePair::SP_IN, 1.0);
        assert!(snr_threshold(root, ArchitecturePair::SP_IN, 1.0).abs() < 1e-15);
    }

    #[test]
    fn threshold_matches_rate_event() {
        // chi_s just below / above g(chi_e) must straddle the target rate.
        for arch in ArchitecturePair::ALL {
            for &ge in &[0.7, 2.0, 15.0] {
                let g = snr_threshold(ge, arch, 1.0);
                if g <= 0.0 {
                    continue;
                }
                let below = capacity(g * (1.0 - 1e-9), arch.at_s) - capacity(ge, arch.at_e);
                let above = capacity(g * (1.0 + 1e-9), arch.at_s) - capacity(ge, arch.at_e);
                assert!(below < 1.0 && above > 1.0, "{arch} at {ge}");
            }
        }
    }

    #[test]
    fn arch_parsing() {
        assert_eq!(
            "sp-in".parse::<ArchitecturePair>().unwrap(),
            ArchitecturePair::SP_IN
        );
        assert_eq!(
            "In-Sp".parse::<ArchitecturePair>().unwrap(),
            ArchitecturePair::IN_SP
        );
        assert!("sp".parse::<ArchitecturePair>().is_err());
        assert!("sp-xx".parse::<ArchitecturePair>().is_err());
        assert_eq!(ArchitecturePair::IN_IN.to_string(), "In-In");
    }

    #[test]
    fn single_eavesdropper_modes_agree() {
        let mut p = table1();
        p.n_eves = 1;
        for arch in ArchitecturePair::ALL {
            let a = quad(&p, arch, EveMode::NonCooperative);
            let b = quad(&p, arch, EveMode::Cooperative);
            assert!((a - b).abs() < 1e-8, "{arch}: {a} vs {b}");
        }
    }

    #[test]
    fn table1_reference_values() {
        // Independent high-precision evaluation of the same double integral.
        let want = [
            (ArchitecturePair::SP_SP, EveMode::NonCooperative, 0.361_13),
            (ArchitecturePair::SP_IN, EveMode::NonCooperative, 0.162_61),
            (ArchitecturePair::IN_SP, EveMode::NonCooperative, 0.589_06),
            (ArchitecturePair::IN_IN, EveMode::NonCooperative, 0.331_41),
            (ArchitecturePair::SP_SP, EveMode::Cooperative, 0.795_24),
            (ArchitecturePair::SP_IN, EveMode::Cooperative, 0.565_38),
            (ArchitecturePair::IN_SP, EveMode::Cooperative, 0.931_88),
            (ArchitecturePair::IN_IN, EveMode::Cooperative, 0.782_03),
        ];
        for (arch, mode, v) in want {
            let got = outage_quadrature(&table1(), arch, mode).unwrap();
            assert!((got.value - v).abs() < 1e-5, "{arch} {mode}: {}", got.value);
            assert!(got.meta.abs_error < 1e-8);
        }
    }

    #[test]
    fn error_free_high_snr_limit() {
        let mut p = table1();
        p.n_eves = 1;
        p.delta_s = 0.0;
        p.gbar_s = 1e6 * p.gbar_e;
        let v = quad(&p, ArchitecturePair::SP_SP, EveMode::NonCooperative);
        assert!(v < 1e-2, "{v}");
    }

    #[test]
    fn exponential_closed_form() {
        // m = 1, N = 1, Sp-Sp: P = 1 - e^{-b_s (2^R - 1)} b_e / (b_e + 2^R b_s).
        let mut p = table1();
        p.m_s = 1.0;
        p.m_e = 1.0;
        p.n_eves = 1;
        let bs = crate::channel::snr_distribution(&p, Side::Main, EveMode::NonCooperative)
            .unwrap()
            .rate();
        let be = crate::channel::snr_distribution(&p, Side::Eve, EveMode::NonCooperative)
            .unwrap()
            .rate();
        let want = 1.0 - (-bs).exp() * be / (be + 2.0 * bs);
        let got = quad(&p, ArchitecturePair::SP_SP, EveMode::NonCooperative);
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn cooperation_never_helps_secrecy() {
        let p = table1();
        for arch in ArchitecturePair::ALL {
            assert!(
                quad(&p, arch, EveMode::Cooperative)
                    >= quad(&p, arch, EveMode::NonCooperative) - 1e-9
            );
        }
    }

    #[test]
    fn ordering_survives_near_certain_outage() {
        // At 0 dB the non-outage mass is far below the absolute tolerance.
        let mut p = table1();
        p.gbar_s = 1.0;
        p.omega_s = 1.0;
        for arch in ArchitecturePair::ALL {
            let (nc, c) = (
                quad(&p, arch, EveMode::NonCooperative),
                quad(&p, arch, EveMode::Cooperative),
            );
            assert!(c >= nc, "{arch}: {c} < {nc}");
        }
        // 1 - P = 2.7887e-15 by 40-digit integration; P is resolved to a few ulps.
        let nc = quad(&p, ArchitecturePair::IN_SP, EveMode::NonCooperative);
        assert!(((1.0 - nc) - 2.7887e-15).abs() < 1e-15, "{}", 1.0 - nc);
    }

    #[test]
    fn architecture_ordering() {
        let p = table1();
        for mode in EveMode::ALL {
            let v: Vec<f64> = ArchitecturePair::ALL
                .iter()
                .map(|&a| quad(&p, a, mode))
                .collect();
            assert!(v[1] < v[3] && v[3] < v[0] && v[0] < v[2], "{mode}: {v:?}");
        }
    }

    #[test]
    fn monotone_in_rate_and_eves() {
        let base = table1();
        for arch in ArchitecturePair::ALL {
            let mut prev = 0.0;
            for r in [0.25, 0.5, 1.0, 2.0, 3.0] {
                let mut p = base;
                p.r_s = r;
                let v = quad(&p, arch, EveMode::NonCooperative);
                assert!(v >= prev - 1e-9);
                prev = v;
            }
            let mut prev = 0.0;
            for n in [1, 2, 4, 7, 10] {
                let mut p = base;
                p.n_eves = n;
                let v = quad(&p, arch, EveMode::Cooperative);
                assert!(v >= prev - 1e-9);
                prev = v;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn value_is_probability(m_s in 0.5f64..4.0, m_e in 0.5f64..4.0, n in 1u32..8, r in 0.1f64..3.0, coop in any::<bool>(), a in 0usize..4) {
            let mut p = table1();
            p.m_s = m_s;
            p.m_e = m_e;
            p.n_eves = n;
            p.r_s = r;
            let mode = if coop { EveMode::Cooperative } else { EveMode::NonCooperative };
            let v = quad(&p, ArchitecturePair::ALL[a], mode);
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}
