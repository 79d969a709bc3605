//! Laws of the effective SNRs: the main link, the strongest of `N`
//! eavesdroppers, and the sum over `N` colluding eavesdroppers.
//!
//! The main link and each eavesdropper are Gamma distributed. The maximum has
//! CDF `F_1(x)^N` and density `N f_1(x) F_1(x)^(N-1)`; the sum of `N` i.i.d.
//! Gamma(m_e, beta_e) variables is Gamma(N m_e, beta_e).

use crate::channel::{snr_distribution, EveMode, Side, SystemParams};
use crate::error::{Error, Result};
use crate::specfun::{ln_gamma_unchecked, GammaShapeRate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDistributions {
    pub main: GammaShapeRate,
    pub eve_single: GammaShapeRate,
    pub n_eves: u32,
    pub mode: EveMode,
}

impl LinkDistributions {
    pub fn new(
        main: GammaShapeRate,
        eve_single: GammaShapeRate,
        n_eves: u32,
        mode: EveMode,
    ) -> Result<Self> {
        if n_eves == 0 {
            return Err(Error::invalid(
                "n_eves",
                "at least one eavesdropper is required",
            ));
        }
        Ok(LinkDistributions {
            main,
            eve_single,
            n_eves,
            mode,
        })
    }

    pub fn from_params(p: &SystemParams, mode: EveMode) -> Result<Self> {
        p.validate()?;
        Self::new(
            snr_distribution(p, Side::Main, mode)?,
            snr_distribution(p, Side::Eve, EveMode::NonCooperative)?,
            p.n_eves,
            mode,
        )
    }

    fn n(&self) -> f64 {
        f64::from(self.n_eves)
    }

    /// Gamma law of the cooperative sum.
    pub fn eve_sum_law(&self) -> GammaShapeRate {
        GammaShapeRate::new(self.n() * self.eve_single.shape(), self.eve_single.rate())
            .expect("sum of valid Gamma laws is valid")
    }

    pub fn main_cdf(&self, x: f64) -> f64 {
        self.main.cdf(x)
    }

    pub fn main_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.main.pdf(x)
    }

    pub fn eve_max_cdf(&self, x: f64) -> f64 {
        self.eve_max_ln_cdf(x).exp()
    }

    pub fn eve_max_ln_cdf(&self, x: f64) -> f64 {
        self.n() * self.eve_single.ln_cdf(x)
    }

    /// `1 - F_1(x)^N` without cancellation in the upper tail.
    pub fn eve_max_sf(&self, x: f64) -> f64 {
        -self.eve_max_ln_cdf(x).exp_m1()
    }

    pub fn eve_max_ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        let ln_f = self.eve_single.ln_pdf(x);
        if self.n_eves == 1 {
            return ln_f;
        }
        if x == 0.0 {
            // Near the origin the density behaves like x^(N m - 1).
            let m = self.eve_single.shape();
            let total = self.n() * m;
            return if total < 1.0 {
                f64::INFINITY
            } else if total > 1.0 {
                f64::NEG_INFINITY
            } else {
                self.n().ln() + total * self.eve_single.rate().ln()
                    - ln_gamma_unchecked(m)
                    - (self.n() - 1.0) * ln_gamma_unchecked(m + 1.0)
            };
        }
        let ln_cdf = self.eve_single.ln_cdf(x);
        self.n().ln() + ln_f + (self.n() - 1.0) * ln_cdf
    }

    pub fn eve_max_pdf(&self, x: f64) -> f64 {
        self.eve_max_ln_pdf(x).exp()
    }

    pub fn eve_sum_cdf(&self, x: f64) -> f64 {
        self.eve_sum_law().cdf(x)
    }

    pub fn eve_sum_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.eve_sum_law().pdf(x)
    }

    /// CDF of the effective wiretap SNR for the configured mode.
    pub fn eve_cdf(&self, x: f64) -> f64 {
        match self.mode {
            EveMode::NonCooperative => self.eve_max_cdf(x),
            EveMode::Cooperative => self.eve_sum_cdf(x),
        }
    }

    pub fn eve_sf(&self, x: f64) -> f64 {
        match self.mode {
            EveMode::NonCooperative => self.eve_max_sf(x),
            EveMode::Cooperative => self.eve_sum_law().sf(x),
        }
    }

    pub fn eve_ln_pdf(&self, x: f64) -> f64 {
        match self.mode {
            EveMode::NonCooperative => self.eve_max_ln_pdf(x),
            EveMode::Cooperative => self.eve_sum_law().ln_pdf(x),
        }
    }

    pub fn eve_pdf(&self, x: f64) -> f64 {
        self.eve_ln_pdf(x).exp()
    }

    /// Point beyond which the wiretap SNR has probability at most `tail`.
    pub fn eve_upper_quantile(&self, tail: f64) -> Result<f64> {
        match self.mode {
            EveMode::NonCooperative => {
                // 1 - F_1^N <= tail  <=>  F_1 >= (1 - tail)^(1/N)
                let single_tail = -((-tail).ln_1p() / self.n()).exp_m1();
                self.eve_single.inverse_sf(single_tail)
            }
            EveMode::Cooperative => self.eve_sum_law().inverse_sf(tail),
        }
    }
}
