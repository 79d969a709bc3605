//! Series (binomial-sum) forms of the outage probability.
//!
//! With `beta_s`, `beta_e` the Gamma rates and `L` the lower limit of the
//! main-SNR integrals, the rederived forms are
//!
//! ```text
//! non-coop, S separated:  1 - N beta_e^m_e / Gamma(m_e) sum_w C(N-1,w) (-1)^w / (Gamma(m_e)^w Gamma(m_s)) M_w
//! non-coop, S integrated: 1 - sum_z C(N,z) (-1)^z beta_s^m_s / (Gamma(m_s) Gamma(m_e)^z) T_z
//! coop,     S separated:  1 - beta_e^(N m_e) U
//! coop,     S integrated: 1 - Q(m_s, beta_s L) + beta_s^m_s / Gamma(m_s) V
//! ```
//!
//! with `L = 2^R / C` for In-Sp and `L = 0` for In-In. The as-published forms
//! differ in five places: the separated non-cooperative sums lack the leading
//! `1 -` and normalize by `Gamma(m_e)^2`; the integrated non-cooperative sums
//! normalize by `Gamma(m_e)`; In-In starts its integral at `2^R`; `U` and `V`
//! use the ratios listed in [`super::kernels`]; and the cooperative
//! integrated forms subtract `V` and evaluate their first term at `L`.

use crate::channel::{snr_distribution, Architecture, EveMode, Side, SystemParams};
use crate::error::{Error, Result};
use crate::quadrature::Integral;
use crate::specfun::{binomial, ln_gamma_unchecked, regularized_upper};

use super::kernels::{KernelDomain, Kernels};
use super::{
    outage_quadrature, snr_threshold, threshold_root, ArchitecturePair, EstimateMeta, Method,
    OutageEstimate, SeriesForm, C_CONST, FIRST_CUT_TAIL,
};

/// Series values further than this from the quadrature are flagged.
pub const SERIES_DIVERGENCE_TOL: f64 = 1e-3;

/// Series evaluation with a divergence flag against [`outage_quadrature`].
pub fn outage_series(
    p: &SystemParams,
    arch: ArchitecturePair,
    mode: EveMode,
    form: SeriesForm,
) -> Result<OutageEstimate> {
    check_integer_shapes(p)?;
    let reference = outage_quadrature(p, arch, mode)?.value;
    outage_series_against(p, arch, mode, form, reference)
}

/// Series evaluation flagged against a caller-supplied reference value.
pub fn outage_series_against(
    p: &SystemParams,
    arch: ArchitecturePair,
    mode: EveMode,
    form: SeriesForm,
    reference: f64,
) -> Result<OutageEstimate> {
    p.validate()?;
    check_integer_shapes(p)?;
    let s = Setup::new(p, arch, form)?;
    let (value, parts) = match (mode, arch.at_s) {
        (EveMode::NonCooperative, Architecture::Separated) => s.noncoop_separated()?,
        (EveMode::NonCooperative, Architecture::Integrated) => s.noncoop_integrated()?,
        (EveMode::Cooperative, Architecture::Separated) => s.coop_separated()?,
        (EveMode::Cooperative, Architecture::Integrated) => s.coop_integrated()?,
    };
    Ok(OutageEstimate {
        value,
        method: Method::Series(form),
        ci_halfwidth: 0.0,
        meta: EstimateMeta {
            abs_error: parts.abs_error,
            evaluations: parts.evaluations,
            samples: 0,
            reference: Some(reference),
            divergence: Some(value.is_nan() || (value - reference).abs() > SERIES_DIVERGENCE_TOL),
        },
    })
}

fn check_integer_shapes(p: &SystemParams) -> Result<()> {
    for (name, m) in [("m_s", p.m_s), ("m_e", p.m_e)] {
        if m.fract() != 0.0 {
            return Err(Error::Unsupported(format!(
                "series forms need integer fading shapes, got {name} = {m}; use the quadrature method"
            )));
        }
    }
    Ok(())
}

/// Accumulated kernel diagnostics, scaled by the coefficient of each term.
#[derive(Default)]
struct Parts {
    abs_error: f64,
    evaluations: usize,
}

impl Parts {
    fn add(&mut self, coef: f64, r: &Integral) -> f64 {
        self.abs_error += coef.abs() * r.abs_error;
        self.evaluations += r.evaluations;
        coef * r.value
    }
}

struct Setup {
    p: SystemParams,
    arch: ArchitecturePair,
    form: SeriesForm,
    kernels: Kernels,
    beta_s: f64,
    beta_e: f64,
    /// `2^R_s`.
    k: f64,
}

impl Setup {
    fn new(p: &SystemParams, arch: ArchitecturePair, form: SeriesForm) -> Result<Self> {
        Ok(Setup {
            p: *p,
            arch,
            form,
            kernels: Kernels::new(p, form),
            beta_s: snr_distribution(p, Side::Main, EveMode::NonCooperative)?.rate(),
            beta_e: snr_distribution(p, Side::Eve, EveMode::NonCooperative)?.rate(),
            k: p.r_s.exp2(),
        })
    }

    fn n(&self) -> u32 {
        self.p.n_eves
    }

    /// Lower limit of the main-SNR integrals.
    fn main_lower(&self) -> f64 {
        match (self.arch.at_e, self.form) {
            (Architecture::Separated, _) => self.k / C_CONST,
            (Architecture::Integrated, SeriesForm::AsPublished) => self.k,
            (Architecture::Integrated, SeriesForm::Rederived) => 0.0,
        }
    }

    /// Wiretap SNR that just avoids outage for main SNR `x` (S integrated).
    fn eve_limit(&self, x: f64) -> f64 {
        match self.arch.at_e {
            Architecture::Separated => x * C_CONST / self.k - 1.0,
            Architecture::Integrated => x / self.k,
        }
    }

    fn eve_domain(&self, shape: f64) -> Result<KernelDomain> {
        let law = crate::specfun::GammaShapeRate::new(shape, self.beta_e)?;
        let dom = KernelDomain::new(0.0, law.inverse_sf(FIRST_CUT_TAIL)?);
        Ok(dom.with_kink(threshold_root(self.arch, self.p.r_s)))
    }

    fn main_domain(&self) -> Result<KernelDomain> {
        let law = crate::specfun::GammaShapeRate::new(self.p.m_s, self.beta_s)?;
        let lower = self.main_lower();
        let cut = law.inverse_sf(FIRST_CUT_TAIL)?.max(lower + law.mean());
        Ok(KernelDomain::new(lower, cut))
    }

    fn noncoop_separated(&self) -> Result<(f64, Parts)> {
        let (m_e, m_s) = (self.p.m_e, self.p.m_s);
        let (be, bs, arch, r) = (self.beta_e, self.beta_s, self.arch, self.p.r_s);
        let psi_a = move |x: f64| be * x / m_e;
        let psi_b = move |x: f64| bs * snr_threshold(x, arch, r) / m_s;
        let dom = self.eve_domain(m_e)?;
        let n = self.n();
        let ln_lead =
            f64::from(n).ln() + m_e * be.ln() - ln_gamma_unchecked(m_e) - ln_gamma_unchecked(m_s);
        let mut parts = Parts::default();
        let mut sum = 0.0;
        for w in 0..n {
            let gamma_power = match self.form {
                SeriesForm::AsPublished => 1.0,
                SeriesForm::Rederived => f64::from(w),
            };
            let sign = if w % 2 == 0 { 1.0 } else { -1.0 };
            let coef =
                sign * binomial(n - 1, w) * (ln_lead - gamma_power * ln_gamma_unchecked(m_e)).exp();
            let r = self.kernels.m(w, psi_a, psi_b, dom)?;
            sum += parts.add(coef, &r);
        }
        let value = match self.form {
            SeriesForm::AsPublished => sum,
            SeriesForm::Rederived => 1.0 - sum,
        };
        Ok((value, parts))
    }

    fn noncoop_integrated(&self) -> Result<(f64, Parts)> {
        let (m_e, m_s) = (self.p.m_e, self.p.m_s);
        let (be, bs) = (self.beta_e, self.beta_s);
        let psi_a = |x: f64| be * self.eve_limit(x) / m_e;
        let psi_b = move |x: f64| bs * x / m_s;
        let dom = self.main_domain()?;
        let n = self.n();
        let ln_lead = m_s * bs.ln() - ln_gamma_unchecked(m_s);
        let mut parts = Parts::default();
        let mut sum = 0.0;
        for z in 0..=n {
            let gamma_power = match self.form {
                SeriesForm::AsPublished => 1.0,
                SeriesForm::Rederived => f64::from(z),
            };
            let sign = if z % 2 == 0 { 1.0 } else { -1.0 };
            let coef =
                sign * binomial(n, z) * (ln_lead - gamma_power * ln_gamma_unchecked(m_e)).exp();
            let r = self.kernels.t(z, psi_a, psi_b, dom)?;
            sum += parts.add(coef, &r);
        }
        Ok((1.0 - sum, parts))
    }

    fn coop_separated(&self) -> Result<(f64, Parts)> {
        let (m_e, m_s) = (self.p.m_e, self.p.m_s);
        let (be, bs, arch, r) = (self.beta_e, self.beta_s, self.arch, self.p.r_s);
        let shape = f64::from(self.n()) * m_e;
        let dom = self.eve_domain(shape)?;
        let u = self.kernels.u(
            move |x| be * x / m_e,
            move |x| bs * snr_threshold(x, arch, r) / m_s,
            dom,
        )?;
        let mut parts = Parts::default();
        let coef = (shape * be.ln()).exp();
        Ok((1.0 - parts.add(coef, &u), parts))
    }

    fn coop_integrated(&self) -> Result<(f64, Parts)> {
        let (m_e, m_s) = (self.p.m_e, self.p.m_s);
        let (be, bs) = (self.beta_e, self.beta_s);
        let lower = self.main_lower();
        let dom = self.main_domain()?;
        let v = self
            .kernels
            .v(|x| be * self.eve_limit(x) / m_e, move |x| bs * x / m_s, dom)?;
        let first = regularized_upper(m_s, bs * lower)?;
        let mut parts = Parts::default();
        let coef = (m_s * bs.ln() - ln_gamma_unchecked(m_s)).exp();
        let tail = parts.add(coef, &v);
        let value = match self.form {
            SeriesForm::AsPublished => 1.0 - first - tail,
            SeriesForm::Rederived => 1.0 - first + tail,
        };
        Ok((value, parts))
    }
}
