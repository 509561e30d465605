//! Multiplier sequences `{η_n}`: explicit families and moment sequences of
//! finite positive measures on `[0, 1)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffspace::check_entries;
use crate::error::{Error, Result};
use crate::special::{ln_gamma, ln_gamma_ratio};

/// How `η_n` continues past the stored entries. Criteria use this to
/// account for the part of a tail sum that lies beyond the truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Extension {
    /// `η_n = 0` beyond the stored entries (finitely supported input).
    Zero,
    /// `η_n = k · (n+1)^{−s} (log(n+2))^{−r}`.
    PowerLog { s: f64, r: f64 },
    /// `η_n = k · μ_n`.
    Moments(MeasureSpec),
}

/// Leading behaviour of `|η(x)|` as `x → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Asymptotic {
    /// identically zero from some point on
    Vanishing,
    /// decays faster than any power
    Exponential,
    /// `exp(ln_k) · x^power · (ln x)^log_power`
    Power {
        ln_k: f64,
        power: f64,
        log_power: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaSeq {
    eta: Vec<Complex64>,
    tag: String,
    extension: Extension,
    /// multiplies `|η|` of the extension (tracks `scale`)
    ext_scale: f64,
}

impl EtaSeq {
    /// A user-supplied sequence, taken to vanish beyond its last entry.
    pub fn custom(eta: Vec<Complex64>) -> Result<Self> {
        check_entries(&eta)?;
        Ok(Self {
            eta,
            tag: "custom".into(),
            extension: Extension::Zero,
            ext_scale: 1.0,
        })
    }

    pub fn from_real(eta: &[f64]) -> Result<Self> {
        Self::custom(eta.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `e_0`: `η_0 = 1`, all other entries zero.
    pub fn unit(len: usize) -> Result<Self> {
        let mut v = vec![0.0; len];
        if let Some(first) = v.first_mut() {
            *first = 1.0;
        }
        Self::from_real(&v)
    }

    fn family(eta: Vec<Complex64>, tag: &str, extension: Extension) -> Result<Self> {
        check_entries(&eta)?;
        Ok(Self {
            eta,
            tag: tag.into(),
            extension,
            ext_scale: 1.0,
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.eta
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    /// Provenance label, e.g. `classical-cesaro`, `measure-moments`, `custom`.
    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn extension(&self) -> &Extension {
        &self.extension
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    /// First `len` entries; the extension model is kept.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptySequence);
        }
        if len > self.eta.len() {
            return Err(Error::IndexOutOfRange {
                index: len - 1,
                len: self.eta.len(),
            });
        }
        Ok(Self {
            eta: self.eta[..len].to_vec(),
            ..self.clone()
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            eta: self.eta.iter().map(|&e| c * e).collect(),
            ext_scale: self.ext_scale * c.norm(),
            ..self.clone()
        }
    }

    /// `|η(x)|` for real `x` past the stored range, from the extension model.
    pub fn extension_abs(&self, x: f64) -> f64 {
        let k = self.ext_scale;
        match &self.extension {
            Extension::Zero => 0.0,
            Extension::PowerLog { s, r } => k * power_log_value(*s, *r, x),
            Extension::Moments(mu) => k * mu.moment_at(x),
        }
    }

    /// Leading asymptotics of `|η(x)|`.
    pub fn asymptotic(&self) -> Asymptotic {
        if self.ext_scale == 0.0 {
            return Asymptotic::Vanishing;
        }
        let ln_scale = self.ext_scale.ln();
        match &self.extension {
            Extension::Zero => Asymptotic::Vanishing,
            Extension::PowerLog { s, r } => Asymptotic::Power {
                ln_k: ln_scale,
                power: -s,
                log_power: -r,
            },
            Extension::Moments(mu) => match &mu.density {
                Some(d) if d.scale > 0.0 => Asymptotic::Power {
                    ln_k: ln_scale + d.scale.ln() + ln_gamma(d.gamma + 1.0),
                    power: -(d.gamma + 1.0),
                    log_power: 0.0,
                },
                _ if mu.atoms.iter().any(|a| a.t > 0.0) => Asymptotic::Exponential,
                _ => Asymptotic::Vanishing,
            },
        }
    }
}

fn power_log_value(s: f64, r: f64, x: f64) -> f64 {
    let mut v = if s == s.trunc() && s.abs() <= 64.0 {
        (x + 1.0).powi(-(s as i32))
    } else {
        (x + 1.0).powf(-s)
    };
    if r != 0.0 {
        v *= (x + 2.0).ln().powf(-r);
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub t: f64,
    pub mass: f64,
}

/// `scale · (1−t)^gamma dt` on `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub gamma: f64,
    pub scale: f64,
}

/// Finite positive measure on `[0, 1)`: point masses plus a power density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Density>,
}

impl MeasureSpec {
    pub fn lebesgue() -> Self {
        Self::density(0.0, 1.0)
    }

    pub fn density(gamma: f64, scale: f64) -> Self {
        Self {
            atoms: Vec::new(),
            density: Some(Density { gamma, scale }),
        }
    }

    pub fn point_mass(t: f64, mass: f64) -> Self {
        Self {
            atoms: vec![Atom { t, mass }],
            density: None,
        }
    }

    /// Parse and validate the JSON form
    /// `{"atoms":[{"t":0.9,"mass":1.0}], "density":{"gamma":0.5,"scale":1.0}}`.
    pub fn from_json(s: &str) -> std::result::Result<Self, String> {
        let mu: MeasureSpec = serde_json::from_str(s).map_err(|e| e.to_string())?;
        mu.validate().map_err(|e| e.to_string())?;
        Ok(mu)
    }

    /// Sum of two measures.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        let density = match (self.density, other.density) {
            (None, d) | (d, None) => d,
            (Some(a), Some(b)) if a.gamma == b.gamma => Some(Density {
                gamma: a.gamma,
                scale: a.scale + b.scale,
            }),
            _ => {
                return Err(Error::InvalidMeasure(
                    "only densities with equal exponents can be added".into(),
                ))
            }
        };
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Ok(Self { atoms, density })
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            if !(0.0..1.0).contains(&a.t) {
                return Err(Error::InvalidMeasure(format!(
                    "atom location {} not in [0,1)",
                    a.t
                )));
            }
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(Error::InvalidMeasure(format!(
                    "atom mass {} must be positive and finite",
                    a.mass
                )));
            }
        }
        if let Some(d) = self.density {
            if !(d.gamma > -1.0 && d.gamma.is_finite()) {
                return Err(Error::InvalidMeasure(format!(
                    "density exponent {} must exceed -1",
                    d.gamma
                )));
            }
            if !(d.scale >= 0.0 && d.scale.is_finite()) {
                return Err(Error::InvalidMeasure(format!(
                    "density scale {} must be nonnegative and finite",
                    d.scale
                )));
            }
        }
        if !(self.total_mass() > 0.0) {
            return Err(Error::InvalidMeasure("total mass must be positive".into()));
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.tail_mass(0.0)
    }

    /// `μ([t, 1))`, exact.
    pub fn tail_mass(&self, t: f64) -> f64 {
        self.tail_mass_from_gap(1.0 - t, t)
    }

    /// `μ([t, 1))` with the gap `1 − t` supplied separately, so that points
    /// very close to 1 keep full relative precision.
    pub fn tail_mass_from_gap(&self, gap: f64, t: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.t >= t).map(|a| a.mass).sum();
        let dens = self
            .density
            .map_or(0.0, |d| d.scale * gap.powf(d.gamma + 1.0) / (d.gamma + 1.0));
        atoms + dens
    }

    /// `μ_x` for real `x ≥ 0` (the continuous interpolation of the moments).
    pub fn moment_at(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.mass * a.t.powf(x)).sum();
        let dens = self
            .density
            .map_or(0.0, |d| d.scale * beta_moment(x, d.gamma));
        atoms + dens
    }
}

/// `B(n+1, γ+1) = ∫_0^1 t^n (1−t)^γ dt`.
fn beta_moment(n: f64, gamma: f64) -> f64 {
    // small integer exponents: exact rational product γ! / ((n+1)…(n+γ+1))
    if (0.0..=20.0).contains(&gamma) && gamma == gamma.floor() && n == n.floor() {
        let m = gamma as u32;
        let mut num = 1.0;
        let mut den = n + 1.0;
        for j in 1..=m {
            num *= j as f64;
            den *= n + 1.0 + j as f64;
        }
        return num / den;
    }
    (ln_gamma(gamma + 1.0) + ln_gamma_ratio(n, 1.0, gamma + 2.0)).exp()
}

/// The classical Cesàro multipliers `η_n = 1/(n+1)`, `0 ≤ n ≤ n_max`.
pub fn classical_cesaro(n_max: usize) -> EtaSeq {
    let eta = (0..=n_max)
        .map(|n| Complex64::new(1.0 / (n as f64 + 1.0), 0.0))
        .collect();
    EtaSeq::family(
        eta,
        "classical-cesaro",
        Extension::PowerLog { s: 1.0, r: 0.0 },
    )
    .expect("finite by construction")
}

/// Moments `μ_n = ∫ t^n dμ(t)`, `0 ≤ n ≤ n_max`.
pub fn measure_moments(mu: &MeasureSpec, n_max: usize) -> Result<EtaSeq> {
    mu.validate()?;
    let mut eta = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for a in &mu.atoms {
        for (n, e) in eta.iter_mut().enumerate() {
            e.re += a.mass * a.t.powf(n as f64);
        }
    }
    if let Some(d) = mu.density {
        if d.scale > 0.0 {
            for (n, e) in eta.iter_mut().enumerate() {
                e.re += d.scale * beta_moment(n as f64, d.gamma);
            }
        }
    }
    EtaSeq::family(eta, "measure-moments", Extension::Moments(mu.clone()))
}

/// Test family `η_n = (n+1)^{−s} (log(n+2))^{−r}`.
pub fn power_log_family(s: f64, r: f64, n_max: usize) -> Result<EtaSeq> {
    for (name, v) in [("s", s), ("r", r)] {
        if !v.is_finite() {
            return Err(Error::OutOfRange {
                name,
                value: v,
                expected: "finite real",
            });
        }
    }
    let eta = (0..=n_max)
        .map(|n| Complex64::new(power_log_value(s, r, n as f64), 0.0))
        .collect();
    EtaSeq::family(eta, "power-log", Extension::PowerLog { s, r })
}
