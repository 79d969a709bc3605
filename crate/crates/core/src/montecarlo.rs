//! Monte Carlo oracle for the outage probability, the ergodic secrecy rate
//! and the mean harvested energy.
//!
//! Realizations are generated in fixed chunks of [`CHUNK_SIZE`]. Chunk `c`
//! draws from a ChaCha12 generator seeded with the run seed and switched to
//! stream `c`, so the sample set depends only on `(seed, n_samples)`. Chunk
//! accumulators are reduced in chunk order, which makes results bit-identical
//! for any number of workers.
//!
//! Per realization the draw order is: `|h_s|^2`, the estimation noise for
//! `h_s`, then `|h_ie|^2` and its estimation noise for each eavesdropper.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::channel::{corrupt_csi, harvested_energy, EveMode, FadingPower, Side, SystemParams};
use crate::error::{Error, Result};
use crate::outage::{capacity, ArchitecturePair, EstimateMeta, Method, OutageEstimate};

pub const CHUNK_SIZE: u64 = 4096;
pub const MIN_SAMPLES: u64 = 1000;
/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSpec {
    pub params: SystemParams,
    pub arch: ArchitecturePair,
    pub mode: EveMode,
    pub n_samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SimSpec {
    /// `10^5` realizations, seed 42, one worker.
    pub fn new(params: SystemParams, arch: ArchitecturePair, mode: EveMode) -> Self {
        SimSpec {
            params,
            arch,
            mode,
            n_samples: 100_000,
            seed: 42,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_samples < MIN_SAMPLES {
            return Err(Error::invalid(
                "n_samples",
                format!(
                    "at least {MIN_SAMPLES} realizations are required, got {}",
                    self.n_samples
                ),
            ));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers", "at least one worker is required"));
        }
        Ok(())
    }
}

/// One point of the energy-secrecy trade-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySecrecyPoint {
    pub rho_s: f64,
    /// Mean harvested energy at the tracked side (summed over eavesdroppers for `Eve`).
    pub mean_eh: f64,
    /// `E[(C_s - C_e)^+]` in bits/s/Hz.
    pub ergodic_secrecy: f64,
    /// `E[C_s - C_e]` without clamping; its sign decides region membership.
    pub mean_rate_gap: f64,
    pub outage: f64,
    pub eh_ci: f64,
    pub secrecy_ci: f64,
    pub rate_gap_ci: f64,
    pub outage_ci: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(&mut self, o: &Moments) {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    /// Sample mean and the 95% CLT half-width of the mean.
    fn mean_ci(&self, n: f64) -> (f64, f64) {
        let mean = self.sum / n;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (mean, Z95 * (var / n).sqrt())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Tally {
    outages: u64,
    secrecy: Moments,
    gap: Moments,
    eh: Moments,
}

impl Tally {
    fn merge(&mut self, o: &Tally) {
        self.outages += o.outages;
        self.secrecy.merge(&o.secrecy);
        self.gap.merge(&o.gap);
        self.eh.merge(&o.eh);
    }
}

/// Per-side constants, computed from the received-signal model directly.
struct LinkModel {
    fading: FadingPower,
    /// `rho Omega (1 - delta^2)`: useful signal power per unit `|h|^2`.
    signal: f64,
    /// Estimation-error, antenna and processing noise at the decoder.
    noise: f64,
    delta: f64,
}

impl LinkModel {
    fn new(p: &SystemParams, side: Side) -> Result<Self> {
        let l = p.link(side);
        Ok(LinkModel {
            fading: FadingPower::new(l.m, l.gbar / l.omega)?,
            signal: l.rho * l.omega * (1.0 - l.delta * l.delta),
            noise: l.omega * l.error_rho * l.delta * l.delta + l.rho * l.n0 + l.sigma2,
            delta: l.delta,
        })
    }

    /// Returns `(snr, |h_hat|^2)` for one realization.
    fn draw(&self, rng: &mut ChaCha12Rng) -> (f64, f64) {
        let g = self.fading.sample(rng);
        let hhat = corrupt_csi(g.sqrt(), self.delta, rng);
        (self.signal * g / self.noise, hhat * hhat)
    }
}

fn run(spec: &SimSpec, track: Side) -> Result<Tally> {
    spec.validate()?;
    let p = &spec.params;
    let main = LinkModel::new(p, Side::Main)?;
    let eve = LinkModel::new(p, Side::Eve)?;
    let n_chunks = spec.n_samples.div_ceil(CHUNK_SIZE);

    let chunk = |c: u64| -> Tally {
        let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
        rng.set_stream(c);
        let count = CHUNK_SIZE.min(spec.n_samples - c * CHUNK_SIZE);
        let mut t = Tally::default();
        for _ in 0..count {
            let (chi_s, hs2) = main.draw(&mut rng);
            let mut chi_e: f64 = 0.0;
            let mut eve_hhat_sum = 0.0;
            for _ in 0..p.n_eves {
                let (chi, h2) = eve.draw(&mut rng);
                chi_e = match spec.mode {
                    EveMode::NonCooperative => chi_e.max(chi),
                    EveMode::Cooperative => chi_e + chi,
                };
                eve_hhat_sum += h2;
            }
            let gap = capacity(chi_s, spec.arch.at_s) - capacity(chi_e, spec.arch.at_e);
            let secrecy = gap.max(0.0);
            if secrecy < p.r_s {
                t.outages += 1;
            }
            t.secrecy.push(secrecy);
            t.gap.push(gap);
            t.eh.push(match track {
                Side::Main => harvested_energy(p, hs2, Side::Main),
                Side::Eve => harvested_energy(p, eve_hhat_sum, Side::Eve),
            });
        }
        t
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    let tallies: Vec<Tally> = pool.install(|| (0..n_chunks).into_par_iter().map(chunk).collect());
    let mut total = Tally::default();
    for t in &tallies {
        total.merge(t);
    }
    Ok(total)
}

/// Wald interval half-width `1.96 sqrt(p (1 - p) / n)`.
pub fn wald_halfwidth(p: f64, n: u64) -> f64 {
    Z95 * (p * (1.0 - p) / n as f64).sqrt()
}

pub fn simulate_outage(spec: &SimSpec) -> Result<OutageEstimate> {
    let t = run(spec, Side::Main)?;
    let p = t.outages as f64 / spec.n_samples as f64;
    Ok(OutageEstimate {
        value: p,
        method: Method::MonteCarlo,
        ci_halfwidth: wald_halfwidth(p, spec.n_samples),
        meta: EstimateMeta {
            samples: spec.n_samples,
            ..EstimateMeta::default()
        },
    })
}

pub fn simulate_energy_secrecy(spec: &SimSpec, track: Side) -> Result<EnergySecrecyPoint> {
    let t = run(spec, track)?;
    let n = spec.n_samples as f64;
    let (mean_eh, eh_ci) = t.eh.mean_ci(n);
    let (ergodic_secrecy, secrecy_ci) = t.secrecy.mean_ci(n);
    let (mean_rate_gap, rate_gap_ci) = t.gap.mean_ci(n);
    let outage = t.outages as f64 / n;
    Ok(EnergySecrecyPoint {
        rho_s: spec.params.rho_s,
        mean_eh,
        ergodic_secrecy,
        mean_rate_gap,
        outage,
        eh_ci,
        secrecy_ci,
        rate_gap_ci,
        outage_ci: wald_halfwidth(outage, spec.n_samples),
    })
}
