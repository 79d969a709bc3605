//! Plain-text parameter files.
//!
//! One `key = value` per line, `#` starts a comment. Power-like fields take a
//! unit suffix (`omega_s_db = 30` or `omega_s_lin = 1000`); dimensionless
//! fields use their bare name (`rho_s = 0.8`), with `_lin` accepted as an
//! alias. `eve_noise_split` takes `own` or `main_factor`. Unknown keys are
//! rejected.

use std::fmt;
use std::str::FromStr;

use crate::channel::{db_to_linear, linear_to_db, EveNoiseSplit, SystemParams};
use crate::error::{Error, Result};

/// Numeric fields of [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    OmegaS,
    OmegaE,
    GbarS,
    GbarE,
    N0,
    Sigma2S,
    Sigma2E,
    RhoS,
    RhoE,
    DeltaS,
    DeltaE,
    MS,
    ME,
    NEves,
    RS,
    ZetaS,
    ZetaE,
}

impl Field {
    pub const ALL: [Field; 17] = [
        Field::OmegaS,
        Field::OmegaE,
        Field::GbarS,
        Field::GbarE,
        Field::N0,
        Field::Sigma2S,
        Field::Sigma2E,
        Field::RhoS,
        Field::RhoE,
        Field::DeltaS,
        Field::DeltaE,
        Field::MS,
        Field::ME,
        Field::NEves,
        Field::RS,
        Field::ZetaS,
        Field::ZetaE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::OmegaS => "omega_s",
            Field::OmegaE => "omega_e",
            Field::GbarS => "gbar_s",
            Field::GbarE => "gbar_e",
            Field::N0 => "n0",
            Field::Sigma2S => "sigma2_s",
            Field::Sigma2E => "sigma2_e",
            Field::RhoS => "rho_s",
            Field::RhoE => "rho_e",
            Field::DeltaS => "delta_s",
            Field::DeltaE => "delta_e",
            Field::MS => "m_s",
            Field::ME => "m_e",
            Field::NEves => "n_eves",
            Field::RS => "r_s",
            Field::ZetaS => "zeta_s",
            Field::ZetaE => "zeta_e",
        }
    }

    /// Power ratios and noise variances, which may be given in dB.
    pub fn is_power(self) -> bool {
        matches!(
            self,
            Field::OmegaS
                | Field::OmegaE
                | Field::GbarS
                | Field::GbarE
                | Field::N0
                | Field::Sigma2S
                | Field::Sigma2E
        )
    }

    pub fn get(self, p: &SystemParams) -> f64 {
        match self {
            Field::OmegaS => p.omega_s,
            Field::OmegaE => p.omega_e,
            Field::GbarS => p.gbar_s,
            Field::GbarE => p.gbar_e,
            Field::N0 => p.n0,
            Field::Sigma2S => p.sigma2_s,
            Field::Sigma2E => p.sigma2_e,
            Field::RhoS => p.rho_s,
            Field::RhoE => p.rho_e,
            Field::DeltaS => p.delta_s,
            Field::DeltaE => p.delta_e,
            Field::MS => p.m_s,
            Field::ME => p.m_e,
            Field::NEves => f64::from(p.n_eves),
            Field::RS => p.r_s,
            Field::ZetaS => p.zeta_s,
            Field::ZetaE => p.zeta_e,
        }
    }

    /// Stores a linear value. Range checks are left to [`SystemParams::validate`],
    /// except that `n_eves` must be a positive integer.
    pub fn set(self, p: &mut SystemParams, v: f64) -> Result<()> {
        let slot = match self {
            Field::OmegaS => &mut p.omega_s,
            Field::OmegaE => &mut p.omega_e,
            Field::GbarS => &mut p.gbar_s,
            Field::GbarE => &mut p.gbar_e,
            Field::N0 => &mut p.n0,
            Field::Sigma2S => &mut p.sigma2_s,
            Field::Sigma2E => &mut p.sigma2_e,
            Field::RhoS => &mut p.rho_s,
            Field::RhoE => &mut p.rho_e,
            Field::DeltaS => &mut p.delta_s,
            Field::DeltaE => &mut p.delta_e,
            Field::MS => &mut p.m_s,
            Field::ME => &mut p.m_e,
            Field::NEves => {
                if !(v >= 1.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX)) {
                    return Err(Error::invalid(
                        "n_eves",
                        format!("must be a positive integer, got {v}"),
                    ));
                }
                p.n_eves = v as u32;
                return Ok(());
            }
            Field::RS => &mut p.r_s,
            Field::ZetaS => &mut p.zeta_s,
            Field::ZetaE => &mut p.zeta_e,
        };
        *slot = v;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Db,
    Linear,
}

/// A configuration key: a field and the unit its values are written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Key {
    pub field: Field,
    pub unit: Unit,
}

impl Key {
    pub fn to_linear(self, v: f64) -> f64 {
        match self.unit {
            Unit::Db => db_to_linear(v),
            Unit::Linear => v,
        }
    }

    pub fn from_linear(self, v: f64) -> f64 {
        match self.unit {
            Unit::Db => linear_to_db(v),
            Unit::Linear => v,
        }
    }

    pub fn apply(self, p: &mut SystemParams, v: f64) -> Result<()> {
        self.field.set(p, self.to_linear(v))
    }

    pub fn read(self, p: &SystemParams) -> f64 {
        self.from_linear(self.field.get(p))
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.field.is_power(), self.unit) {
            (_, Unit::Db) => write!(f, "{}_db", self.field.name()),
            (true, Unit::Linear) => write!(f, "{}_lin", self.field.name()),
            (false, Unit::Linear) => f.write_str(self.field.name()),
        }
    }
}

impl FromStr for Key {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (stem, unit) = if let Some(stem) = s.strip_suffix("_db") {
            (stem, Some(Unit::Db))
        } else if let Some(stem) = s.strip_suffix("_lin") {
            (stem, Some(Unit::Linear))
        } else {
            (s, None)
        };
        let field = Field::ALL.into_iter().find(|f| f.name() == stem);
        match (field, unit) {
            (Some(field), Some(Unit::Db)) if field.is_power() => Ok(Key {
                field,
                unit: Unit::Db,
            }),
            (Some(field), Some(Unit::Linear)) => Ok(Key {
                field,
                unit: Unit::Linear,
            }),
            (Some(field), None) if !field.is_power() => Ok(Key {
                field,
                unit: Unit::Linear,
            }),
            _ => Err(Error::UnknownKey(s.to_string())),
        }
    }
}

const NOISE_SPLIT_KEY: &str = "eve_noise_split";

fn parse_noise_split(v: &str) -> Result<EveNoiseSplit> {
    match v {
        "own" => Ok(EveNoiseSplit::Own),
        "main_factor" => Ok(EveNoiseSplit::MainFactor),
        _ => Err(Error::invalid(
            NOISE_SPLIT_KEY,
            format!("expected `own` or `main_factor`, got `{v}`"),
        )),
    }
}

/// Applies one `key`, `value` pair.
pub fn apply_setting(p: &mut SystemParams, key: &str, value: &str) -> Result<()> {
    let key = key.trim();
    let value = value.trim();
    if key == NOISE_SPLIT_KEY {
        p.eve_noise_split = parse_noise_split(value)?;
        return Ok(());
    }
    let k: Key = key.parse()?;
    let v: f64 = value
        .parse()
        .map_err(|_| Error::invalid(key, format!("`{value}` is not a number")))?;
    k.apply(p, v)
}

/// Applies a `key=value` override string.
pub fn apply_override(p: &mut SystemParams, assignment: &str) -> Result<()> {
    let (k, v) = assignment.split_once('=').ok_or_else(|| {
        Error::invalid(
            "override",
            format!("expected key=value, got `{assignment}`"),
        )
    })?;
    apply_setting(p, k, v)
}

/// Parses a parameter file on top of `base`.
pub fn parse_config(text: &str, base: SystemParams) -> Result<SystemParams> {
    let mut p = base;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
            line: i + 1,
            detail: format!("expected `key = value`, got `{line}`"),
        })?;
        apply_setting(&mut p, k, v).map_err(|e| match e {
            Error::UnknownKey(_) => e,
            other => Error::Config {
                line: i + 1,
                detail: other.to_string(),
            },
        })?;
    }
    Ok(p)
}

/// Writes every field in linear units; the output re-parses to `p` exactly.
pub fn dump_config(p: &SystemParams) -> String {
    let mut out = String::new();
    for field in Field::ALL {
        let key = Key {
            field,
            unit: Unit::Linear,
        };
        out.push_str(&format!("{key} = {}\n", field.get(p)));
    }
    let split = match p.eve_noise_split {
        EveNoiseSplit::Own => "own",
        EveNoiseSplit::MainFactor => "main_factor",
    };
    out.push_str(&format!("{NOISE_SPLIT_KEY} = {split}\n"));
    out
}
