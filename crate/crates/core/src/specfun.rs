//! Gamma-family special functions.
//!
//! Log-gamma uses a Lanczos approximation; the incomplete gamma pair uses the
//! power series for `x < s + 1` and a modified-Lentz continued fraction
//! otherwise. Every routine has a log-domain entry point because the
//! cooperative-eavesdropper kernels work with shapes of `N * m_e` (20 or more),
//! where the unregularized values leave the `f64` range.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

const LANCZOS_R: f64 = 10.900511;

const LANCZOS_DK: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

/// ln(2 * sqrt(e / pi))
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

const MAX_ITER: usize = 100_000;

/// Natural logarithm of the gamma function for `s > 0`.
pub fn ln_gamma(s: f64) -> Result<f64> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::domain(
            "ln_gamma",
            format!("argument must be finite and positive, got {s}"),
        ));
    }
    Ok(ln_gamma_unchecked(s))
}

pub(crate) fn ln_gamma_unchecked(s: f64) -> f64 {
    if s < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        let sum = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |acc, (k, d)| acc + d / (k as f64 - s));
        PI.ln()
            - (PI * s).sin().ln()
            - sum.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - s) * ((0.5 - s + LANCZOS_R) / E).ln()
    } else {
        let sum = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |acc, (k, d)| acc + d / (s + k as f64 - 1.0));
        sum.ln() + LN_2_SQRT_E_OVER_PI + (s - 0.5) * ((s - 0.5 + LANCZOS_R) / E).ln()
    }
}

/// Gamma function for `s > 0`. Overflows to `+inf` above `s ~ 171.6`.
pub fn gamma(s: f64) -> Result<f64> {
    Ok(ln_gamma(s)?.exp())
}

/// Both regularized incomplete gamma functions, held in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncompleteGamma {
    /// ln P(s, x), the regularized lower function.
    pub ln_lower: f64,
    /// ln Q(s, x), the regularized upper function.
    pub ln_upper: f64,
}

impl IncompleteGamma {
    pub fn lower(&self) -> f64 {
        self.ln_lower.exp()
    }

    pub fn upper(&self) -> f64 {
        self.ln_upper.exp()
    }
}

fn check_args(function: &'static str, s: f64, x: f64) -> Result<()> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::domain(
            function,
            format!("shape must be finite and positive, got {s}"),
        ));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(
            function,
            format!("argument must be nonnegative, got {x}"),
        ));
    }
    Ok(())
}

/// Evaluates `ln P(s, x)` and `ln Q(s, x)` together.
pub fn incomplete_gamma(s: f64, x: f64) -> Result<IncompleteGamma> {
    check_args("incomplete_gamma", s, x)?;
    if x == 0.0 {
        return Ok(IncompleteGamma {
            ln_lower: f64::NEG_INFINITY,
            ln_upper: 0.0,
        });
    }
    if x == f64::INFINITY {
        return Ok(IncompleteGamma {
            ln_lower: 0.0,
            ln_upper: f64::NEG_INFINITY,
        });
    }

    let ln_prefactor = s * x.ln() - x - ln_gamma_unchecked(s);

    if x < s + 1.0 {
        let ln_lower = ln_prefactor + lower_series(s, x)?.ln();
        let lower = ln_lower.exp();
        Ok(IncompleteGamma {
            ln_lower,
            ln_upper: (-lower).ln_1p(),
        })
    } else {
        let ln_upper = ln_prefactor - upper_continued_fraction(s, x)?.ln();
        let upper = ln_upper.exp();
        Ok(IncompleteGamma {
            ln_lower: (-upper).ln_1p(),
            ln_upper,
        })
    }
}

/// `sum_{n>=0} x^n / (s (s+1) ... (s+n))`, so that `P = x^s e^-x / Gamma(s) * sum`.
fn lower_series(s: f64, x: f64) -> Result<f64> {
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut denom = s;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term < sum * f64::EPSILON {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence {
        routine: "incomplete gamma series",
        detail: format!("s={s}, x={x}"),
    })
}

/// Modified Lentz evaluation of the continued fraction `Q = x^s e^-x / Gamma(s) / cf`.
fn upper_continued_fraction(s: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for n in 1..MAX_ITER {
        let nf = n as f64;
        let an = -nf * (nf - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            return Ok(1.0 / h);
        }
    }
    Err(Error::NoConvergence {
        routine: "incomplete gamma continued fraction",
        detail: format!("s={s}, x={x}"),
    })
}

/// Regularized upper incomplete gamma `Q(s, x) = Gamma(s, x) / Gamma(s)`.
pub fn regularized_upper(s: f64, x: f64) -> Result<f64> {
    Ok(incomplete_gamma(s, x)?.upper())
}

/// Regularized lower incomplete gamma `P(s, x) = 1 - Q(s, x)`.
pub fn regularized_lower(s: f64, x: f64) -> Result<f64> {
    Ok(incomplete_gamma(s, x)?.lower())
}

/// `ln Q(s, x)`; finite far past the point where `Q` underflows.
pub fn ln_regularized_upper(s: f64, x: f64) -> Result<f64> {
    Ok(incomplete_gamma(s, x)?.ln_upper)
}

/// `ln P(s, x)`.
pub fn ln_regularized_lower(s: f64, x: f64) -> Result<f64> {
    Ok(incomplete_gamma(s, x)?.ln_lower)
}

/// Upper incomplete gamma `Gamma(s, x) = int_x^inf t^(s-1) e^-t dt`.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    Ok(ln_upper_incomplete_gamma(s, x)?.exp())
}

/// `ln Gamma(s, x)`.
pub fn ln_upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    Ok(incomplete_gamma(s, x)?.ln_upper + ln_gamma_unchecked(s))
}

/// Gamma law with a shape and a rate (inverse scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaShapeRate {
    shape: f64,
    rate: f64,
}

impl GammaShapeRate {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !shape.is_finite() || shape <= 0.0 {
            return Err(Error::invalid(
                "shape",
                format!("must be finite and positive, got {shape}"),
            ));
        }
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::invalid(
                "rate",
                format!("must be finite and positive, got {rate}"),
            ));
        }
        Ok(GammaShapeRate { shape, rate })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }

    /// Log density; `+inf` at the origin when `shape < 1`.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        if x == 0.0 {
            return if self.shape < 1.0 {
                f64::INFINITY
            } else if self.shape == 1.0 {
                self.rate.ln()
            } else {
                f64::NEG_INFINITY
            };
        }
        self.shape * self.rate.ln() + (self.shape - 1.0) * x.ln()
            - self.rate * x
            - ln_gamma_unchecked(self.shape)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    fn pair(&self, x: f64) -> IncompleteGamma {
        // Arguments are validated at construction, so only NaN can fail here.
        incomplete_gamma(self.shape, self.rate * x.max(0.0)).unwrap_or(IncompleteGamma {
            ln_lower: f64::NAN,
            ln_upper: f64::NAN,
        })
    }

    /// CDF, clamped to 0 for negative arguments.
    pub fn cdf(&self, x: f64) -> f64 {
        self.pair(x).lower()
    }

    pub fn ln_cdf(&self, x: f64) -> f64 {
        self.pair(x).ln_lower
    }

    /// Survival function `1 - cdf`, computed without cancellation.
    pub fn sf(&self, x: f64) -> f64 {
        self.pair(x).upper()
    }

    pub fn ln_sf(&self, x: f64) -> f64 {
        self.pair(x).ln_upper
    }

    /// Smallest `x` with `cdf(x) >= p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(
                "quantile",
                format!("probability must lie in [0, 1], got {p}"),
            ));
        }
        if p > 0.5 {
            return self.inverse_sf(1.0 - p);
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        Ok(self.bisect(|x| self.cdf(x) >= p))
    }

    /// Smallest `x` with `sf(x) <= q`; accurate for tail probabilities far below `f64::EPSILON`.
    pub fn inverse_sf(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(
                "inverse_sf",
                format!("probability must lie in [0, 1], got {q}"),
            ));
        }
        if q == 0.0 {
            return Ok(f64::INFINITY);
        }
        if q == 1.0 {
            return Ok(0.0);
        }
        let ln_q = q.ln();
        Ok(self.bisect(|x| self.ln_sf(x) <= ln_q))
    }

    fn bisect(&self, done: impl Fn(f64) -> bool) -> f64 {
        let mut lo = 0.0;
        let mut hi = self.mean().max(f64::MIN_POSITIVE);
        while !done(hi) {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if done(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        hi
    }
}

/// Gamma CDF `P(X <= x)`; negative `x` is a domain error.
pub fn gamma_cdf(x: f64, law: &GammaShapeRate) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(
            "gamma_cdf",
            format!("argument must be nonnegative, got {x}"),
        ));
    }
    Ok(law.cdf(x))
}

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    ln_gamma_unchecked(f64::from(n) + 1.0)
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Binomial coefficient as a float; exact for the eavesdropper counts used here.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}
