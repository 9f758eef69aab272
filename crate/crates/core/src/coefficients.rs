//! Coefficient schemes for the velocity update.
//!
//! Every scheme the library supports is reduced to one canonical tuple
//! `(w, phi_min, phi_max, ip, sp)`. At update time the individual and social
//! acceleration coefficients are drawn per vector component as
//!
//! ```text
//! phi_i = ip * (phi_min + (phi_max - phi_min) * U(0,1))
//! phi_s = sp * (phi_min + (phi_max - phi_min) * U(0,1))
//! ```
//!
//! The classical `(w, iw, sw)` form is the special case `phi_min = 0`,
//! `iw = ip * phi_max`, `sw = sp * phi_max`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// User-facing coefficient scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CoefficientScheme {
    /// Inertia, individuality and sociality weights given directly.
    Classical { iw: f64, sw: f64, w: f64 },
    /// Type I'' constriction. `aw` is the total acceleration weight.
    Constricted { aw: f64, kappa: f64, ip: f64 },
    /// Reduced randomness range, first variant. `aw` in (1, 2).
    Rrr1 { aw: f64, ip: f64 },
    /// Reduced randomness range, second variant. `aw` in (1, 2.618).
    Rrr2 { aw: f64, ip: f64 },
}

/// Upper end of the admissible `aw` interval for [`CoefficientScheme::Rrr2`].
pub const RRR2_AW_MAX: f64 = 2.618;

impl CoefficientScheme {
    /// `C-PSO-1`: kappa = 0.99994, aw = 4.10, ip = 0.50.
    pub const C_PSO_1: Self = Self::Constricted {
        aw: 4.10,
        kappa: 0.99994,
        ip: 0.50,
    };
    /// `PSO-RRR1-1`: aw = 1.80, ip = 0.50.
    pub const PSO_RRR1_1: Self = Self::Rrr1 { aw: 1.80, ip: 0.50 };
    /// `PSO-RRR2-1`: aw = 2.40, ip = 0.50.
    pub const PSO_RRR2_1: Self = Self::Rrr2 { aw: 2.40, ip: 0.50 };

    /// Resolves the scheme into its canonical tuple.
    pub fn resolve(&self) -> Result<ResolvedCoefficients> {
        match *self {
            Self::Classical { iw, sw, w } => {
                if !(iw >= 0.0 && sw >= 0.0) || !w.is_finite() {
                    return Err(Error::domain(format!(
                        "classical weights must be finite and non-negative (iw={iw}, sw={sw}, w={w})"
                    )));
                }
                let phi_max = iw + sw;
                if phi_max <= 0.0 {
                    return Err(Error::domain("classical scheme with iw = sw = 0 has no defined ip"));
                }
                let ip = iw / phi_max;
                let mut rc = ResolvedCoefficients::new(w, 0.0, phi_max, ip)?;
                // keep the user's weights exactly so sampling equals the
                // classical U(0, iw), U(0, sw) draws bit for bit
                rc.individual_span = iw;
                rc.social_span = sw;
                Ok(rc)
            }
            Self::Constricted { aw, kappa, ip } => {
                if !(kappa > 0.0 && kappa < 1.0) {
                    return Err(Error::domain(format!("kappa must lie in (0, 1), got {kappa}")));
                }
                check_ip(ip)?;
                if !aw.is_finite() || aw <= 0.0 {
                    return Err(Error::domain(format!("aw must be positive, got {aw}")));
                }
                let chi = constriction_factor(aw, kappa);
                ResolvedCoefficients::new(chi, 0.0, chi * aw, ip)
            }
            Self::Rrr1 { aw, ip } => {
                if !(aw > 1.0 && aw < 2.0) {
                    return Err(Error::domain(format!("RRR1 aw must lie in (1.00, 2.00), got {aw}")));
                }
                check_ip(ip)?;
                let w = aw - 1.0;
                ResolvedCoefficients::new(w, 0.5 * (w + 1.0), 1.5 * (w + 1.0), ip)
            }
            Self::Rrr2 { aw, ip } => {
                if !(aw > 1.0 && aw < RRR2_AW_MAX) {
                    return Err(Error::domain(format!(
                        "RRR2 aw must lie in (1.000, {RRR2_AW_MAX}), got {aw}"
                    )));
                }
                check_ip(ip)?;
                let w = 1.0 / aw - 2.0 + aw;
                let phi_max = 2.0 * (w + 1.0);
                ResolvedCoefficients::new(w, 2.0 * aw - phi_max, phi_max, ip)
            }
        }
    }
}

fn check_ip(ip: f64) -> Result<()> {
    if (0.0..1.0).contains(&ip) {
        Ok(())
    } else {
        Err(Error::domain(format!("ip must lie in [0, 1), got {ip}")))
    }
}

/// Type I'' constriction factor.
///
/// For `aw < 4` the constriction formula is undefined and the factor falls
/// back to `kappa`; a warning is logged because such settings are outside
/// the recommended range.
pub fn constriction_factor(aw: f64, kappa: f64) -> f64 {
    if aw >= 4.0 {
        2.0 * kappa / (aw - 2.0 + (aw * aw - 4.0 * aw).sqrt())
    } else {
        log::warn!("constriction with aw = {aw} < 4: using chi = kappa");
        kappa
    }
}

/// Canonical coefficient tuple consumed by the update rule.
///
/// Immutable once built. The per-term lower bounds and spans are cached so a
/// draw costs one multiply-add.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedCoefficients {
    w: f64,
    phi_min: f64,
    phi_max: f64,
    ip: f64,
    sp: f64,
    individual_low: f64,
    individual_span: f64,
    social_low: f64,
    social_span: f64,
}

impl ResolvedCoefficients {
    /// Builds the tuple from its free parameters; `sp` is set to `1 - ip`.
    pub fn new(w: f64, phi_min: f64, phi_max: f64, ip: f64) -> Result<Self> {
        check_ip(ip)?;
        if !w.is_finite() || !phi_min.is_finite() || !phi_max.is_finite() {
            return Err(Error::domain("coefficients must be finite"));
        }
        if phi_min < 0.0 || phi_max < phi_min {
            return Err(Error::domain(format!(
                "need 0 <= phi_min <= phi_max, got phi_min={phi_min}, phi_max={phi_max}"
            )));
        }
        let sp = 1.0 - ip;
        let range = phi_max - phi_min;
        Ok(Self {
            w,
            phi_min,
            phi_max,
            ip,
            sp,
            individual_low: ip * phi_min,
            individual_span: ip * range,
            social_low: sp * phi_min,
            social_span: sp * range,
        })
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn phi_min(&self) -> f64 {
        self.phi_min
    }

    pub fn phi_max(&self) -> f64 {
        self.phi_max
    }

    pub fn ip(&self) -> f64 {
        self.ip
    }

    pub fn sp(&self) -> f64 {
        self.sp
    }

    /// Draws `(phi_i, phi_s)` for one vector component. Consumes exactly two
    /// uniforms, `phi_i` first.
    #[inline]
    pub fn sample_phi<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        (
            self.individual_low + self.individual_span * u1,
            self.social_low + self.social_span * u2,
        )
    }
}

/// Scheme selection for a whole swarm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SchemeSpec {
    /// Every particle uses the same scheme.
    Single(CoefficientScheme),
    /// One population split into three blocks running PSO-RRR2-1,
    /// PSO-RRR1-1 and C-PSO-1.
    MultiSwarm,
}

impl SchemeSpec {
    /// Schemes of the multi-swarm blocks, in block order.
    pub const MULTI_SWARM_SCHEMES: [CoefficientScheme; 3] = [
        CoefficientScheme::PSO_RRR2_1,
        CoefficientScheme::PSO_RRR1_1,
        CoefficientScheme::C_PSO_1,
    ];

    /// The schemes a swarm is built from; a single scheme or the three
    /// multi-swarm blocks.
    pub fn schemes(&self) -> Vec<CoefficientScheme> {
        match self {
            Self::Single(s) => vec![*s],
            Self::MultiSwarm => Self::MULTI_SWARM_SCHEMES.to_vec(),
        }
    }

    /// Row label used in statistics tables.
    pub fn label(&self) -> String {
        match self {
            Self::MultiSwarm => "Multi-Swarm".to_string(),
            Self::Single(s) if *s == CoefficientScheme::C_PSO_1 => "C-PSO-1".to_string(),
            Self::Single(s) if *s == CoefficientScheme::PSO_RRR1_1 => "PSO-RRR1-1".to_string(),
            Self::Single(s) if *s == CoefficientScheme::PSO_RRR2_1 => "PSO-RRR2-1".to_string(),
            Self::Single(_) => self.to_string(),
        }
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MultiSwarm => f.write_str("multi-swarm"),
            Self::Single(s) if *s == CoefficientScheme::C_PSO_1 => f.write_str("c-pso-1"),
            Self::Single(s) if *s == CoefficientScheme::PSO_RRR1_1 => f.write_str("pso-rrr1-1"),
            Self::Single(s) if *s == CoefficientScheme::PSO_RRR2_1 => f.write_str("pso-rrr2-1"),
            Self::Single(CoefficientScheme::Classical { iw, sw, w }) => {
                write!(f, "classical:iw={iw},sw={sw},w={w}")
            }
            Self::Single(CoefficientScheme::Constricted { aw, kappa, ip }) => {
                write!(f, "c-pso:aw={aw},kappa={kappa},ip={ip}")
            }
            Self::Single(CoefficientScheme::Rrr1 { aw, ip }) => write!(f, "pso-rrr1:aw={aw},ip={ip}"),
            Self::Single(CoefficientScheme::Rrr2 { aw, ip }) => write!(f, "pso-rrr2:aw={aw},ip={ip}"),
        }
    }
}

/// Default classical weights used when `classical` is given without
/// parameters.
const CLASSICAL_DEFAULT: (f64, f64, f64) = (1.49445, 1.49445, 0.729);

impl FromStr for SchemeSpec {
    type Err = Error;

    /// Accepts the preset names `c-pso-1`, `pso-rrr1-1`, `pso-rrr2-1`,
    /// `multi-swarm` and `classical`, plus parameterised forms such as
    /// `classical:iw=1,sw=1,w=0.7`, `c-pso:aw=4.1,kappa=0.99994,ip=0.5`,
    /// `pso-rrr1:aw=1.8,ip=0.5` and `pso-rrr2:aw=2.4,ip=0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, params) = crate::params::split_params(&s)?;
        let get = |key: &str, default: Option<f64>| -> Result<f64> {
            match params.iter().find(|(k, _)| k == key) {
                Some((_, v)) => v
                    .parse::<f64>()
                    .map_err(|_| Error::config(format!("scheme parameter {key}={v} is not a number"))),
                None => default.ok_or_else(|| Error::config(format!("scheme {name} needs {key}="))),
            }
        };
        let known = |allowed: &[&str]| -> Result<()> {
            for (k, _) in &params {
                if !allowed.contains(&k.as_str()) {
                    return Err(Error::config(format!("unknown parameter {k} for scheme {name}")));
                }
            }
            Ok(())
        };
        let spec = match name {
            "c-pso-1" | "pso-rrr1-1" | "pso-rrr2-1" | "multi-swarm" if !params.is_empty() => {
                return Err(Error::config(format!("preset {name} takes no parameters")));
            }
            "c-pso-1" => Self::Single(CoefficientScheme::C_PSO_1),
            "pso-rrr1-1" => Self::Single(CoefficientScheme::PSO_RRR1_1),
            "pso-rrr2-1" => Self::Single(CoefficientScheme::PSO_RRR2_1),
            "multi-swarm" | "ms" => Self::MultiSwarm,
            "classical" => {
                known(&["iw", "sw", "w"])?;
                let (iw, sw, w) = CLASSICAL_DEFAULT;
                Self::Single(CoefficientScheme::Classical {
                    iw: get("iw", Some(iw))?,
                    sw: get("sw", Some(sw))?,
                    w: get("w", Some(w))?,
                })
            }
            "c-pso" => {
                known(&["aw", "kappa", "ip"])?;
                Self::Single(CoefficientScheme::Constricted {
                    aw: get("aw", None)?,
                    kappa: get("kappa", None)?,
                    ip: get("ip", Some(0.5))?,
                })
            }
            "pso-rrr1" => {
                known(&["aw", "ip"])?;
                Self::Single(CoefficientScheme::Rrr1 {
                    aw: get("aw", None)?,
                    ip: get("ip", Some(0.5))?,
                })
            }
            "pso-rrr2" => {
                known(&["aw", "ip"])?;
                Self::Single(CoefficientScheme::Rrr2 {
                    aw: get("aw", None)?,
                    ip: get("ip", Some(0.5))?,
                })
            }
            other => return Err(Error::config(format!("unknown scheme {other:?}"))),
        };
        for scheme in spec.schemes() {
            scheme.resolve()?;
        }
        Ok(spec)
    }
}
