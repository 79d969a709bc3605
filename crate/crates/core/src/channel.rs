//! System parameters, link budget, effective SNR under imperfect CSI,
//! fading samplers and harvested-energy accounting.
//!
//! All quantities are linear. The instantaneous SNR of either link is
//! `chi = k * |h|^2` with
//!
//! ```text
//! k = rho * Omega * (1 - delta^2) / (Omega * rho' * delta^2 + rho * N0 + sigma^2)
//! ```
//!
//! where the estimation-error power `Omega * delta^2` is scaled by the
//! receiver's own splitting factor (`rho' = rho`) unless
//! [`EveNoiseSplit::MainFactor`] asks for the main-link factor on the
//! eavesdropper side.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::specfun::GammaShapeRate;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Receiver side of the downlink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// The legitimate receiver S.
    Main,
    /// An eavesdropper (all eavesdroppers share parameters).
    Eve,
}

/// SWIPT receiver architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Architecture {
    /// Power splitting before separate decoding and harvesting chains.
    Separated,
    /// Decoding after rectification; modelled as an optical intensity channel.
    Integrated,
}

impl Architecture {
    pub const ALL: [Architecture; 2] = [Architecture::Separated, Architecture::Integrated];

    pub fn short(self) -> &'static str {
        match self {
            Architecture::Separated => "Sp",
            Architecture::Integrated => "In",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

/// Whether eavesdroppers combine their observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EveMode {
    /// The strongest eavesdropper decodes alone: `chi_e = max_i chi_ie`.
    NonCooperative,
    /// Eavesdroppers beamform jointly: `chi_e = sum_i chi_ie`.
    Cooperative,
}

impl EveMode {
    pub const ALL: [EveMode; 2] = [EveMode::NonCooperative, EveMode::Cooperative];

    pub fn label(self) -> &'static str {
        match self {
            EveMode::NonCooperative => "noncoop",
            EveMode::Cooperative => "coop",
        }
    }
}

impl fmt::Display for EveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which splitting factor scales the eavesdropper's estimation-error power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EveNoiseSplit {
    /// The eavesdropper's own `rho_e` (consistent with its received-signal model).
    #[default]
    Own,
    /// The legitimate receiver's `rho_s`, as in the literal SNR expression for the wiretap link.
    MainFactor,
}

/// Scalar model parameters, all linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// `P / P_s^loss`.
    pub omega_s: f64,
    /// `P / P_e^loss`.
    pub omega_e: f64,
    /// Average main-link SNR; `|h_s|^2` has mean `gbar_s / omega_s`.
    pub gbar_s: f64,
    /// Average per-eavesdropper SNR; each `|h_ie|^2` has mean `gbar_e / omega_e`.
    pub gbar_e: f64,
    /// Antenna noise variance.
    pub n0: f64,
    pub sigma2_s: f64,
    pub sigma2_e: f64,
    pub rho_s: f64,
    pub rho_e: f64,
    pub delta_s: f64,
    pub delta_e: f64,
    pub m_s: f64,
    pub m_e: f64,
    pub n_eves: u32,
    /// Target secrecy rate in bits/s/Hz.
    pub r_s: f64,
    pub zeta_s: f64,
    pub zeta_e: f64,
    pub eve_noise_split: EveNoiseSplit,
}

impl SystemParams {
    /// The reference operating point: N0 = 0.1 dB, sigma^2 = 0 dB, R_s = 1,
    /// Omega_s = 30 dB, Omega_e = 10 dB, m = 2, rho = 0.8, delta = 0.2, N = 5,
    /// unit-mean fading (gbar = Omega) and zeta = 0.8.
    pub fn table1() -> Self {
        let omega_s = db_to_linear(30.0);
        let omega_e = db_to_linear(10.0);
        SystemParams {
            omega_s,
            omega_e,
            gbar_s: omega_s,
            gbar_e: omega_e,
            n0: db_to_linear(0.1),
            sigma2_s: db_to_linear(0.0),
            sigma2_e: db_to_linear(0.0),
            rho_s: 0.8,
            rho_e: 0.8,
            delta_s: 0.2,
            delta_e: 0.2,
            m_s: 2.0,
            m_e: 2.0,
            n_eves: 5,
            r_s: 1.0,
            zeta_s: 0.8,
            zeta_e: 0.8,
            eve_noise_split: EveNoiseSplit::Own,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    name,
                    format!("must be finite and positive, got {v}"),
                ))
            }
        }
        fn nonnegative(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    name,
                    format!("must be finite and nonnegative, got {v}"),
                ))
            }
        }
        fn unit_interval(name: &str, v: f64) -> Result<()> {
            if (0.0..1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must lie in [0, 1), got {v}")))
            }
        }
        positive("omega_s", self.omega_s)?;
        positive("omega_e", self.omega_e)?;
        positive("gbar_s", self.gbar_s)?;
        positive("gbar_e", self.gbar_e)?;
        positive("n0", self.n0)?;
        nonnegative("sigma2_s", self.sigma2_s)?;
        nonnegative("sigma2_e", self.sigma2_e)?;
        unit_interval("rho_s", self.rho_s)?;
        unit_interval("rho_e", self.rho_e)?;
        unit_interval("delta_s", self.delta_s)?;
        unit_interval("delta_e", self.delta_e)?;
        for (name, m) in [("m_s", self.m_s), ("m_e", self.m_e)] {
            if !(m.is_finite() && m >= 0.5) {
                return Err(Error::invalid(
                    name,
                    format!("Nakagami shape must be >= 0.5, got {m}"),
                ));
            }
        }
        if self.n_eves == 0 {
            return Err(Error::invalid(
                "n_eves",
                "at least one eavesdropper is required",
            ));
        }
        positive("r_s", self.r_s)?;
        for (name, z) in [("zeta_s", self.zeta_s), ("zeta_e", self.zeta_e)] {
            if !(z > 0.0 && z <= 1.0) {
                return Err(Error::invalid(
                    name,
                    format!("conversion efficiency must lie in (0, 1], got {z}"),
                ));
            }
        }
        Ok(())
    }

    /// Per-side view of the parameters.
    pub fn link(&self, side: Side) -> LinkParams {
        match side {
            Side::Main => LinkParams {
                omega: self.omega_s,
                gbar: self.gbar_s,
                sigma2: self.sigma2_s,
                rho: self.rho_s,
                error_rho: self.rho_s,
                delta: self.delta_s,
                m: self.m_s,
                zeta: self.zeta_s,
                n0: self.n0,
            },
            Side::Eve => LinkParams {
                omega: self.omega_e,
                gbar: self.gbar_e,
                sigma2: self.sigma2_e,
                rho: self.rho_e,
                error_rho: match self.eve_noise_split {
                    EveNoiseSplit::Own => self.rho_e,
                    EveNoiseSplit::MainFactor => self.rho_s,
                },
                delta: self.delta_e,
                m: self.m_e,
                zeta: self.zeta_e,
                n0: self.n0,
            },
        }
    }
}

/// Parameters of one link, resolved from [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub omega: f64,
    pub gbar: f64,
    pub sigma2: f64,
    pub rho: f64,
    /// Splitting factor applied to the estimation-error power.
    pub error_rho: f64,
    pub delta: f64,
    pub m: f64,
    pub zeta: f64,
    pub n0: f64,
}

impl LinkParams {
    /// Effective noise power at the decoder: `Omega rho' delta^2 + rho N0 + sigma^2`.
    pub fn effective_noise(&self) -> f64 {
        self.omega * self.error_rho * self.delta * self.delta + self.rho * self.n0 + self.sigma2
    }

    /// Mean of the fading power `|h|^2`.
    pub fn fading_mean(&self) -> f64 {
        self.gbar / self.omega
    }
}

/// Free-space style link budget inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub distance: f64,
    pub pathloss_exponent: f64,
    pub gain_tx: f64,
    pub gain_rx: f64,
    pub wavelength: f64,
    pub tx_power: f64,
}

/// `(4 pi)^2 d^Xi / (G_t G_r lambda^2)`.
pub fn path_loss(geom: &LinkGeometry) -> Result<f64> {
    let fields = [
        ("distance", geom.distance),
        ("pathloss_exponent", geom.pathloss_exponent),
        ("gain_tx", geom.gain_tx),
        ("gain_rx", geom.gain_rx),
        ("wavelength", geom.wavelength),
        ("tx_power", geom.tx_power),
    ];
    for (name, v) in fields {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(
                "path_loss",
                format!("{name} must be finite and positive, got {v}"),
            ));
        }
    }
    let four_pi = 4.0 * PI;
    Ok(
        four_pi * four_pi * geom.distance.powf(geom.pathloss_exponent)
            / (geom.gain_tx * geom.gain_rx * geom.wavelength * geom.wavelength),
    )
}

/// `Omega = P / P^loss`.
pub fn omega_from_geometry(geom: &LinkGeometry) -> Result<f64> {
    Ok(geom.tx_power / path_loss(geom)?)
}

/// Coefficient `k` with `chi = k * |h|^2`.
pub fn effective_snr_coeff(p: &SystemParams, side: Side) -> f64 {
    let link = p.link(side);
    link.rho * link.omega * (1.0 - link.delta * link.delta) / link.effective_noise()
}

/// Gamma law of the effective SNR.
///
/// `Main` gives the legitimate link. `Eve` gives a single eavesdropper under
/// [`EveMode::NonCooperative`] (the maximum over `N` is not Gamma, see
/// [`crate::distributions`]) and the `N`-fold sum under
/// [`EveMode::Cooperative`].
pub fn snr_distribution(p: &SystemParams, side: Side, mode: EveMode) -> Result<GammaShapeRate> {
    let link = p.link(side);
    if link.rho <= 0.0 {
        return Err(Error::invalid(
            match side {
                Side::Main => "rho_s",
                Side::Eve => "rho_e",
            },
            "a zero decoding fraction leaves no SNR law",
        ));
    }
    let rate =
        link.m * link.effective_noise() / (link.rho * (1.0 - link.delta * link.delta) * link.gbar);
    let shape = match (side, mode) {
        (Side::Eve, EveMode::Cooperative) => f64::from(p.n_eves) * link.m,
        _ => link.m,
    };
    GammaShapeRate::new(shape, rate)
}

/// Sampler for the fading power `|h|^2 ~ Gamma(shape m, mean mean)`.
#[derive(Debug, Clone, Copy)]
pub struct FadingPower {
    gamma: Gamma<f64>,
}

impl FadingPower {
    pub fn new(m: f64, mean: f64) -> Result<Self> {
        if !(m.is_finite() && m >= 0.5) {
            return Err(Error::invalid(
                "m",
                format!("Nakagami shape must be >= 0.5, got {m}"),
            ));
        }
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::invalid(
                "mean",
                format!("must be finite and positive, got {mean}"),
            ));
        }
        let gamma = Gamma::new(m, mean / m).map_err(|e| Error::invalid("m", e.to_string()))?;
        Ok(FadingPower { gamma })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng)
    }
}

/// One draw of `|h|^2` for Nakagami-`m` fading with the given mean power.
pub fn sample_fading_power<R: Rng + ?Sized>(m: f64, mean: f64, rng: &mut R) -> Result<f64> {
    Ok(FadingPower::new(m, mean)?.sample(rng))
}

/// Imperfect channel estimate `sqrt(1 - delta^2) h + delta v`, `v ~ N(0, 1)`.
///
/// One normal variate is consumed even when `delta == 0`, so the stream
/// layout does not depend on the estimation accuracy.
pub fn corrupt_csi<R: Rng + ?Sized>(h: f64, delta: f64, rng: &mut R) -> f64 {
    let v: f64 = rng.sample(StandardNormal);
    (1.0 - delta * delta).sqrt() * h + delta * v
}

/// Harvested energy `zeta (1 - rho) Omega |h_hat|^2` (per symbol, normalized).
pub fn harvested_energy(p: &SystemParams, hhat_sq: f64, side: Side) -> f64 {
    let link = p.link(side);
    link.zeta * (1.0 - link.rho) * link.omega * hhat_sq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma_cdf;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    #[test]
    fn path_loss_examples() {
        let mut g = LinkGeometry {
            distance: 1.0,
            pathloss_exponent: 2.0,
            gain_tx: 1.0,
            gain_rx: 1.0,
            wavelength: 4.0 * PI,
            tx_power: 2.0,
        };
        assert!((path_loss(&g).unwrap() - 1.0).abs() < 1e-12);
        assert!((omega_from_geometry(&g).unwrap() - 2.0).abs() < 1e-12);
        g.wavelength = 1.0;
        assert!((path_loss(&g).unwrap() - 157.913_670_417_429_7).abs() < 1e-9);
        g.pathloss_exponent = 3.0;
        let near = path_loss(&g).unwrap();
        g.distance = 2.0;
        assert!((path_loss(&g).unwrap() / near - 8.0).abs() < 1e-12);
        g.gain_rx = 0.0;
        assert!(path_loss(&g).is_err());
    }

    #[test]
    fn snr_coefficient_examples() {
        let mut p = SystemParams::table1();
        // 768 / (32 + 0.8 * 10^0.01 + 1)
        assert!((effective_snr_coeff(&p, Side::Main) - 22.709_373_508_595_586).abs() < 1e-9);

        p.delta_s = 0.0;
        p.sigma2_s = 1e-300;
        let k = effective_snr_coeff(&p, Side::Main);
        assert!((k - p.omega_s / p.n0).abs() < 1e-9 * k);

        p.delta_s = 1.0 - 1e-12;
        assert!(effective_snr_coeff(&p, Side::Main) < 1e-9);
    }

    #[test]
    fn snr_distribution_examples() {
        let p = SystemParams::table1();
        let eve = snr_distribution(&p, Side::Eve, EveMode::NonCooperative).unwrap();
        assert_eq!(eve.shape(), 2.0);
        // 2 (10*0.8*0.04 + 0.8 * 10^0.01 + 1) / (0.8 * 0.96 * 10)
        assert!((eve.rate() - 0.556_936_040_058_490_4).abs() < 1e-12);
        let sum = snr_distribution(&p, Side::Eve, EveMode::Cooperative).unwrap();
        assert_eq!(sum.shape(), 10.0);
        assert_eq!(sum.rate(), eve.rate());

        let mut one = p;
        one.n_eves = 1;
        assert_eq!(
            snr_distribution(&one, Side::Eve, EveMode::Cooperative).unwrap(),
            snr_distribution(&one, Side::Eve, EveMode::NonCooperative).unwrap()
        );

        let mut clean = p;
        clean.delta_s = 0.0;
        clean.sigma2_s = 0.0;
        clean.n0 = 1.0;
        let main = snr_distribution(&clean, Side::Main, EveMode::NonCooperative).unwrap();
        assert!((main.rate() - clean.m_s / clean.gbar_s).abs() < 1e-15);
        assert!((main.mean() - clean.gbar_s).abs() < 1e-9);
    }

    #[test]
    fn eve_noise_split_uses_main_factor_on_request() {
        let mut p = SystemParams::table1();
        p.rho_s = 0.3;
        let own = effective_snr_coeff(&p, Side::Eve);
        p.eve_noise_split = EveNoiseSplit::MainFactor;
        let main_factor = effective_snr_coeff(&p, Side::Eve);
        let want = 0.8 * 10.0 * 0.96 / (10.0 * 0.3 * 0.04 + 0.8 * p.n0 + 1.0);
        assert!((main_factor - want).abs() < 1e-12);
        assert!(main_factor > own);
    }

    #[test]
    fn validation_rejects_out_of_range() {
        let ok = SystemParams::table1();
        assert!(ok.validate().is_ok());
        type Edit = Box<dyn Fn(&mut SystemParams)>;
        let cases: Vec<Edit> = vec![
            Box::new(|p| p.rho_s = 1.0),
            Box::new(|p| p.delta_e = -0.1),
            Box::new(|p| p.m_s = 0.4),
            Box::new(|p| p.n_eves = 0),
            Box::new(|p| p.r_s = 0.0),
            Box::new(|p| p.omega_e = f64::NAN),
            Box::new(|p| p.zeta_e = 0.0),
            Box::new(|p| p.n0 = 0.0),
        ];
        for mutate in cases {
            let mut p = ok;
            mutate(&mut p);
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn harvested_energy_examples() {
        let mut p = SystemParams::table1();
        p.zeta_s = 0.8;
        p.rho_s = 0.8;
        p.omega_s = 1000.0;
        assert!((harvested_energy(&p, 1.0, Side::Main) - 160.0).abs() < 1e-9);
        let high = harvested_energy(&p, 1.0, Side::Main);
        p.rho_s = 0.5;
        assert!((harvested_energy(&p, 1.0, Side::Main) / high - 2.5).abs() < 1e-12);
        p.rho_s = 1.0 - 1e-15;
        assert!(harvested_energy(&p, 1.0, Side::Main) < 1e-9);
        assert_eq!(harvested_energy(&p, 0.0, Side::Main), 0.0);
    }

    #[test]
    fn fading_moments() {
        let mut r = rng(1);
        let n = 1_000_000;
        let exp = FadingPower::new(1.0, 3.0).unwrap();
        let mean = (0..n).map(|_| exp.sample(&mut r)).sum::<f64>() / n as f64;
        assert!((mean / 3.0 - 1.0).abs() < 0.01);

        let g = FadingPower::new(2.0, 1.0).unwrap();
        let xs: Vec<f64> = (0..n).map(|_| g.sample(&mut r)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var / 0.5 - 1.0).abs() < 0.02, "variance {var}");
        assert!(FadingPower::new(0.3, 1.0).is_err());
        assert!(sample_fading_power(2.0, -1.0, &mut r).is_err());
    }

    #[test]
    fn fading_matches_gamma_cdf_ks() {
        let p = SystemParams::table1();
        let mean = p.gbar_s / p.omega_s;
        let sampler = FadingPower::new(p.m_s, mean).unwrap();
        let law = GammaShapeRate::new(p.m_s, p.m_s / mean).unwrap();
        let mut r = rng(7);
        let n = 1_000_000;
        let mut xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut r)).collect();
        xs.sort_by(f64::total_cmp);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = gamma_cdf(x, &law).unwrap();
                (f - i as f64 / n as f64)
                    .abs()
                    .max((f - (i + 1) as f64 / n as f64).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.002, "KS distance {ks}");
    }

    #[test]
    fn corrupt_csi_examples() {
        let mut r = rng(3);
        assert_eq!(corrupt_csi(0.7, 0.0, &mut r), 0.7);

        let n = 1_000_000;
        let h = 0.9;
        let delta = 0.2;
        let draws: Vec<f64> = (0..n).map(|_| corrupt_csi(h, delta, &mut r)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let se = delta / (n as f64).sqrt();
        assert!((mean - 0.96f64.sqrt() * h).abs() < 3.0 * se);
        let second = draws.iter().map(|x| x * x).sum::<f64>() / n as f64;
        let want = (1.0 - delta * delta) * h * h + delta * delta;
        // Var(hhat^2) = 4 (1-d^2) h^2 d^2 + 2 d^4
        let sd =
            (4.0 * 0.96 * h * h * delta * delta + 2.0 * delta.powi(4)).sqrt() / (n as f64).sqrt();
        assert!((second - want).abs() < 3.0 * sd);

        let delta = 1.0 - 1e-9;
        let noise: Vec<f64> = (0..200_000)
            .map(|_| corrupt_csi(5.0, delta, &mut r))
            .collect();
        let m = noise.iter().sum::<f64>() / noise.len() as f64;
        let v = noise.iter().map(|x| (x - m).powi(2)).sum::<f64>() / noise.len() as f64;
        assert!(m.abs() < 0.01 && (v - 1.0).abs() < 0.02);
    }

    #[test]
    fn db_round_trip() {
        assert!((db_to_linear(30.0) - 1000.0).abs() < 1e-9);
        assert!((linear_to_db(db_to_linear(0.1)) - 0.1).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn coefficient_scale_invariant(c in 1e-3f64..1e3) {
            let p = SystemParams::table1();
            let mut q = p;
            q.n0 *= c;
            q.sigma2_s *= c;
            q.omega_s *= c;
            let a = effective_snr_coeff(&p, Side::Main);
            let b = effective_snr_coeff(&q, Side::Main);
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }

        #[test]
        fn coefficient_monotone(d1 in 0.0f64..0.99, dd in 1e-4f64..0.5, r1 in 0.01f64..0.9, dr in 1e-4f64..0.09) {
            let mut p = SystemParams::table1();
            p.delta_s = d1;
            p.rho_s = r1;
            let base = effective_snr_coeff(&p, Side::Main);
            let mut q = p;
            q.delta_s = (d1 + dd).min(0.999);
            prop_assert!(effective_snr_coeff(&q, Side::Main) < base);
            let mut q = p;
            q.rho_s = r1 + dr;
            prop_assert!(effective_snr_coeff(&q, Side::Main) > base);
        }

        #[test]
        fn mean_times_noise_identity(rho in 0.05f64..0.95, delta in 0.0f64..0.9, gbar in 1.0f64..1e5) {
            let mut p = SystemParams::table1();
            p.rho_s = rho;
            p.delta_s = delta;
            p.gbar_s = gbar;
            let law = snr_distribution(&p, Side::Main, EveMode::NonCooperative).unwrap();
            let lhs = law.mean() * p.link(Side::Main).effective_noise();
            let rhs = rho * (1.0 - delta * delta) * gbar;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }
}
