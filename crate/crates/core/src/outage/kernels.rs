//! Single-integral kernels of the series forms.
//!
//! ```text
//! M(a, b) = int_0^inf  x^(m_e-1) e^(-m_e a) Gamma(m_e, m_e a)^w Gamma(m_s, m_s b) dx
//! T(a, b) = int_L^inf  Gamma(m_e, m_e a)^z x^(m_s-1) e^(-m_s b) dx
//! U(a, b) = int_0^inf  x^(N m_e-1) / Gamma(N m_e) e^(-m_e a) R_U(b) dx
//! V(a, b) = int_L^inf  x^(m_s-1) R_V(a, b) dx
//! ```
//!
//! `a` and `b` are functions of the integration variable. The ratios `R_U`
//! and `R_V` depend on [`SeriesForm`]:
//!
//! | form        | `R_U(b)`                               | `R_V(a, b)`                                           |
//! |-------------|----------------------------------------|-------------------------------------------------------|
//! | as printed  | `Gamma(N m_e, m_s b) / Gamma(N m_e)`    | `e^(-m_s a) Gamma(N m_s, m_e b) / Gamma(N m_s)`       |
//! | rederived   | `Gamma(m_s, m_s b) / Gamma(m_s)`        | `e^(-m_s b) Gamma(N m_e, m_e a) / Gamma(N m_e)`       |
//!
//! Integrands are assembled as `(ln |f|, sign)` and exponentiated once.

use crate::channel::SystemParams;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Integral, QuadConfig};
use crate::specfun::{ln_gamma_unchecked, ln_upper_incomplete_gamma};

use super::SeriesForm;

/// How `Gamma(s, x)` is read for `x < 0`, which the printed forms reach
/// whenever a threshold goes negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeArgument {
    /// `Gamma(s, max(x, 0))`: the outage event has probability one there.
    Clamp,
    /// `(n-1)! e^(-x) sum_{k<n} x^k / k!`, the finite-sum expression the
    /// integer-shape derivation writes down, continued to `x < 0`.
    IntegerContinuation,
}

/// Integration range of a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelDomain {
    pub lower: f64,
    /// Initial truncation point; extended while the integrand is not negligible.
    pub first_cut: f64,
    /// Interior point where the integrand has a kink.
    pub kink: Option<f64>,
}

impl KernelDomain {
    pub fn new(lower: f64, first_cut: f64) -> Self {
        KernelDomain {
            lower,
            first_cut,
            kink: None,
        }
    }

    pub fn with_kink(mut self, kink: f64) -> Self {
        if kink > self.lower {
            self.kink = Some(kink);
        }
        self
    }
}

/// Shapes and numerical settings shared by the kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernels {
    pub m_s: f64,
    pub m_e: f64,
    pub n_eves: u32,
    pub form: SeriesForm,
    pub negative: NegativeArgument,
    pub quad: QuadConfig,
}

impl Kernels {
    /// Defaults that match the form: printed forms use the integer continuation.
    pub fn new(p: &SystemParams, form: SeriesForm) -> Self {
        Kernels {
            m_s: p.m_s,
            m_e: p.m_e,
            n_eves: p.n_eves,
            form,
            negative: match form {
                SeriesForm::AsPublished => NegativeArgument::IntegerContinuation,
                SeriesForm::Rederived => NegativeArgument::Clamp,
            },
            quad: QuadConfig::default(),
        }
    }

    fn n(&self) -> f64 {
        f64::from(self.n_eves)
    }

    /// `ln |Gamma(s, x)|` and its sign under the configured negative-argument rule.
    pub fn ln_upper_signed(&self, s: f64, x: f64) -> Result<(f64, f64)> {
        if x >= 0.0 {
            return Ok((ln_upper_incomplete_gamma(s, x)?, 1.0));
        }
        match self.negative {
            NegativeArgument::Clamp => Ok((ln_gamma_unchecked(s), 1.0)),
            NegativeArgument::IntegerContinuation => {
                if s.fract() != 0.0 {
                    return Err(Error::Unsupported(format!(
                        "Gamma({s}, {x}) with a negative argument is only defined here for integer shapes"
                    )));
                }
                let n = s as u64;
                let mut term = 1.0;
                let mut sum = 1.0;
                for k in 1..n {
                    term *= x / k as f64;
                    sum += term;
                }
                Ok((ln_gamma_unchecked(s) - x + sum.abs().ln(), sum.signum()))
            }
        }
    }

    fn upper_signed(&self, s: f64, x: f64) -> (f64, f64) {
        self.ln_upper_signed(s, x).unwrap_or((f64::NAN, 1.0))
    }

    /// Integrates `exp(ln |f|) * sign` over the domain with `x = lower + t^2`
    /// on each piece, which absorbs `x^(m-1)` endpoint singularities.
    fn integrate_signed<F>(&self, f: F, domain: KernelDomain) -> Result<Integral>
    where
        F: Fn(f64) -> (f64, f64),
    {
        let eval = |x: f64, t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let (ln_abs, sign) = f(x);
            if ln_abs == f64::NEG_INFINITY {
                return 0.0;
            }
            sign * (ln_abs + (2.0 * t).ln()).exp()
        };
        let mut total = Integral {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
            subintervals: 0,
        };
        let mut start = domain.lower;
        if let Some(kink) = domain.kink {
            let r = integrate(
                |t| eval(start + t * t, t),
                0.0,
                (kink - start).sqrt(),
                &self.quad,
            )?;
            accumulate(&mut total, &r);
            start = kink;
        }
        let t_cut = (domain.first_cut - start)
            .max(1e-3 * (1.0 + start.abs()))
            .sqrt();
        let r = integrate_to_infinity(
            |t| eval(start + t * t, t),
            0.0,
            t_cut,
            None::<fn(f64) -> f64>,
            &self.quad,
        )?;
        accumulate(&mut total, &r);
        Ok(total)
    }

    /// Kernel `M` for the non-cooperative separated-receiver cases.
    pub fn m<A, B>(&self, w: u32, psi_a: A, psi_b: B, domain: KernelDomain) -> Result<Integral>
    where
        A: Fn(f64) -> f64,
        B: Fn(f64) -> f64,
    {
        let (m_e, m_s) = (self.m_e, self.m_s);
        let w = f64::from(w);
        self.integrate_signed(
            |x| {
                let a = psi_a(x);
                let (ln_ge, sign_e) = self.upper_signed(m_e, m_e * a);
                let (ln_gs, sign_s) = self.upper_signed(m_s, m_s * psi_b(x));
                let ln_pow = if w == 0.0 { 0.0 } else { w * ln_ge };
                let sign = if w as u32 % 2 == 1 { sign_e } else { 1.0 } * sign_s;
                ((m_e - 1.0) * x.ln() - m_e * a + ln_pow + ln_gs, sign)
            },
            domain,
        )
    }

    /// Kernel `T` for the non-cooperative integrated-receiver cases.
    pub fn t<A, B>(&self, z: u32, psi_a: A, psi_b: B, domain: KernelDomain) -> Result<Integral>
    where
        A: Fn(f64) -> f64,
        B: Fn(f64) -> f64,
    {
        let (m_e, m_s) = (self.m_e, self.m_s);
        let zf = f64::from(z);
        self.integrate_signed(
            |x| {
                let (ln_ge, sign_e) = if z == 0 {
                    (0.0, 1.0)
                } else {
                    self.upper_signed(m_e, m_e * psi_a(x))
                };
                let sign = if z % 2 == 1 { sign_e } else { 1.0 };
                (zf * ln_ge + (m_s - 1.0) * x.ln() - m_s * psi_b(x), sign)
            },
            domain,
        )
    }

    /// Kernel `U` for the cooperative separated-receiver cases.
    pub fn u<A, B>(&self, psi_a: A, psi_b: B, domain: KernelDomain) -> Result<Integral>
    where
        A: Fn(f64) -> f64,
        B: Fn(f64) -> f64,
    {
        let (m_e, m_s) = (self.m_e, self.m_s);
        let shape = self.n() * m_e;
        let ratio_shape = match self.form {
            SeriesForm::AsPublished => shape,
            SeriesForm::Rederived => m_s,
        };
        let ln_norm = ln_gamma_unchecked(shape) + ln_gamma_unchecked(ratio_shape);
        self.integrate_signed(
            |x| {
                let (ln_g, sign) = self.upper_signed(ratio_shape, m_s * psi_b(x));
                (
                    (shape - 1.0) * x.ln() - m_e * psi_a(x) + ln_g - ln_norm,
                    sign,
                )
            },
            domain,
        )
    }

    /// Kernel `V` for the cooperative integrated-main-receiver cases.
    pub fn v<A, B>(&self, psi_a: A, psi_b: B, domain: KernelDomain) -> Result<Integral>
    where
        A: Fn(f64) -> f64,
        B: Fn(f64) -> f64,
    {
        let (m_e, m_s) = (self.m_e, self.m_s);
        let n = self.n();
        self.integrate_signed(
            |x| {
                let (a, b) = (psi_a(x), psi_b(x));
                let (exp_arg, shape, arg) = match self.form {
                    SeriesForm::AsPublished => (m_s * a, n * m_s, m_e * b),
                    SeriesForm::Rederived => (m_s * b, n * m_e, m_e * a),
                };
                let (ln_g, sign) = self.upper_signed(shape, arg);
                (
                    (m_s - 1.0) * x.ln() - exp_arg + ln_g - ln_gamma_unchecked(shape),
                    sign,
                )
            },
            domain,
        )
    }
}

fn accumulate(total: &mut Integral, r: &Integral) {
    total.value += r.value;
    total.abs_error += r.abs_error;
    total.evaluations += r.evaluations;
    total.subintervals += r.subintervals;
}
