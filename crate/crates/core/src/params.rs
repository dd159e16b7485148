//! Physical configuration of the driven charger–battery pair and the
//! quantities derived from it.
//!
//! Units: ħ = 1 and every rate, frequency and energy is expressed in units
//! of the common mode frequency ω. Energies reported elsewhere in the crate
//! are `omega * occupation`.
//!
//! The shared reservoir enters through the jump operator `z = p_a a + p_b b`
//! with rate Γ. It induces an effective dissipative coupling of strength
//! `μ Γ / 2`, where `μ = -p_b p_a*`, and adds `Γ_i = Γ |p_i|²` to each mode's
//! local damping `κ_i`, giving total rates `Λ_i = Γ_i + κ_i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on `|J + iμΓ/2|` below which a configuration counts
/// as nonreciprocal.
pub const NONRECIPROCITY_TOL: f64 = 1e-12;

const NORMALIZATION_SLACK: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub omega: f64,
    pub kappa: f64,
    /// Complex weight of this mode in the shared-reservoir jump operator.
    pub p: Complex64,
}

impl ModeParams {
    pub fn new(omega: f64, kappa: f64, p: Complex64) -> Self {
        Self { omega, kappa, p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub amplitude: f64,
    pub omega_l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub charger: ModeParams,
    pub battery: ModeParams,
    /// Coherent charger–battery coupling J.
    pub coupling: Complex64,
    /// Shared-reservoir rate Γ.
    pub gamma: f64,
    pub drive: DriveParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub omega: f64,
    pub coupling: Complex64,
    pub gamma: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub mu: Complex64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    /// Drive detuning ω_L − ω.
    pub delta: f64,
    /// Discriminant Δ = sqrt(−16|J|² + (κ_a − κ_b)²) of the reciprocal
    /// problem, on the branch with Re Δ ≥ 0 (Im Δ ≥ 0 when purely imaginary).
    pub delta_cap: Complex64,
    pub kappa_ab: f64,
    /// sqrt(κ_a/κ_b); `None` when κ_b = 0.
    pub xi: Option<f64>,
    /// Coherent cooperativity 4|J|²/(κ_a κ_b); `None` when κ_a κ_b = 0.
    pub coop_coherent: Option<f64>,
    /// Dissipative cooperativity 4Γ_aΓ_b/(Λ_aΛ_b).
    ///
    /// For Γ_a = Γ_b and κ_a = κ_b this is 4Γ²/Λ², the steady-state
    /// battery-to-charger energy ratio. The asymmetric form is an
    /// extrapolation and does not equal that ratio in general; see
    /// [`crate::closedform::eta_ab_stationary`]. `None` when Λ_aΛ_b = 0.
    pub coop_dissipative: Option<f64>,
}

impl DerivedParams {
    pub fn from_config(config: &SystemConfig) -> Self {
        let omega = config.charger.omega;
        let kappa_a = config.charger.kappa;
        let kappa_b = config.battery.kappa;
        let gamma = config.gamma;
        let mu = -config.battery.p * config.charger.p.conj();
        let gamma_a = gamma * config.charger.p.norm_sqr();
        let gamma_b = gamma * config.battery.p.norm_sqr();
        let lambda_a = gamma_a + kappa_a;
        let lambda_b = gamma_b + kappa_b;
        let j2 = config.coupling.norm_sqr();
        let local_product = kappa_a * kappa_b;
        let total_product = lambda_a * lambda_b;

        Self {
            omega,
            coupling: config.coupling,
            gamma,
            kappa_a,
            kappa_b,
            mu,
            gamma_a,
            gamma_b,
            lambda_a,
            lambda_b,
            delta: config.drive.omega_l - omega,
            delta_cap: discriminant(j2, kappa_a, kappa_b),
            kappa_ab: kappa_a + kappa_b,
            xi: (kappa_b > 0.0).then(|| (kappa_a / kappa_b).sqrt()),
            coop_coherent: (local_product > 0.0).then(|| 4.0 * j2 / local_product),
            coop_dissipative: (total_product > 0.0)
                .then(|| 4.0 * gamma_a * gamma_b / total_product),
        }
    }

    /// 16|J|² > (κ_a − κ_b)², i.e. Δ purely imaginary.
    pub fn is_underdamped(&self) -> bool {
        let mismatch = self.kappa_a - self.kappa_b;
        16.0 * self.coupling.norm_sqr() > mismatch * mismatch
    }
}

/// sqrt(−16|J|² + (κ_a − κ_b)²) with the principal-branch convention, computed
/// without going through a polar decomposition so that purely imaginary
/// results have an exactly zero real part.
pub fn discriminant(coupling_sqr: f64, kappa_a: f64, kappa_b: f64) -> Complex64 {
    let mismatch = kappa_a - kappa_b;
    let d2 = mismatch * mismatch - 16.0 * coupling_sqr;
    if d2 >= 0.0 {
        Complex64::new(d2.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d2).sqrt())
    }
}

impl SystemConfig {
    /// Checks every invariant and rescales `p_a`, `p_b` so that |μ| = 1
    /// whenever both are nonzero.
    ///
    /// The rescaling `p_i → p_i / sqrt(|p_a p_b|)`, `Γ → Γ |p_a p_b|` leaves
    /// Γ_a, Γ_b and μΓ unchanged, so the dynamics are identical.
    pub fn validate(self) -> Result<Self> {
        self.check()?;
        match self.normalize_shared_coupling() {
            Ok(c) => Ok(c),
            Err(Error::ZeroSharedCoupling) => Ok(self),
            Err(e) => Err(e),
        }
    }

    /// Like the normalization inside [`validate`](Self::validate), but
    /// fails when one of the reservoir weights vanishes.
    pub fn normalize_shared_coupling(mut self) -> Result<Self> {
        let scale = self.charger.p.norm() * self.battery.p.norm();
        if scale == 0.0 {
            return Err(Error::ZeroSharedCoupling);
        }
        // Idempotent: a config that already has |μ| = 1 up to rounding is
        // returned bit-for-bit. One normalization pass can leave |p_a||p_b|
        // a few ulps away from 1, hence the slack.
        if (scale - 1.0).abs() > NORMALIZATION_SLACK {
            let root = scale.sqrt();
            self.charger.p /= root;
            self.battery.p /= root;
            self.gamma *= scale;
        }
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        let finite = [
            ("omega_a", self.charger.omega),
            ("omega_b", self.battery.omega),
            ("kappa_a", self.charger.kappa),
            ("kappa_b", self.battery.kappa),
            ("p_a_re", self.charger.p.re),
            ("p_a_im", self.charger.p.im),
            ("p_b_re", self.battery.p.re),
            ("p_b_im", self.battery.p.im),
            ("J_re", self.coupling.re),
            ("J_im", self.coupling.im),
            ("Gamma", self.gamma),
            ("drive_amplitude", self.drive.amplitude),
            ("omega_L", self.drive.omega_l),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::NonFinite { name });
            }
        }
        for (name, value) in [
            ("kappa_a", self.charger.kappa),
            ("kappa_b", self.battery.kappa),
            ("Gamma", self.gamma),
            ("drive_amplitude", self.drive.amplitude),
        ] {
            if value < 0.0 {
                return Err(Error::NegativeRate { name, value });
            }
        }
        for omega in [self.charger.omega, self.battery.omega] {
            if omega <= 0.0 {
                return Err(Error::NonPositiveFrequency(omega));
            }
        }
        if self.charger.omega != self.battery.omega {
            return Err(Error::FrequencyMismatch {
                charger: self.charger.omega,
                battery: self.battery.omega,
            });
        }
        Ok(())
    }

    pub fn derive(&self) -> DerivedParams {
        DerivedParams::from_config(self)
    }

    pub fn omega(&self) -> f64 {
        self.charger.omega
    }

    /// |J − (−iμΓ/2)|. Zero exactly when the charger's equations of motion
    /// no longer depend on the battery.
    pub fn nonreciprocity_residual(&self) -> f64 {
        (self.coupling - nonreciprocal_coupling(self)).norm()
    }

    pub fn is_nonreciprocal(&self) -> bool {
        let scale = self.gamma.max(self.coupling.norm());
        self.nonreciprocity_residual() <= NONRECIPROCITY_TOL * scale
    }

    pub fn require_nonreciprocal(&self) -> Result<()> {
        if self.is_nonreciprocal() {
            Ok(())
        } else {
            Err(Error::NotNonreciprocal {
                residual: self.nonreciprocity_residual(),
            })
        }
    }

    /// Replaces J with −iμΓ/2.
    pub fn make_nonreciprocal(mut self) -> Result<Self> {
        if self.gamma == 0.0 || self.charger.p * self.battery.p == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroSharedCoupling);
        }
        self.coupling = nonreciprocal_coupling(&self);
        Ok(self)
    }

    /// Shifts reservoir weight between the modes: `p_a → p_a sqrt(x)`,
    /// `p_b → p_b / sqrt(x)`. μ and Γ_aΓ_b are unchanged; Γ_a and Γ_b are
    /// multiplied by `x` and `1/x` respectively.
    pub fn rescale_reservoir_weights(mut self, x: f64) -> Self {
        let root = x.sqrt();
        self.charger.p *= root;
        self.battery.p /= root;
        self
    }

    /// The same physical system with the shared reservoir switched off.
    pub fn reciprocal_partner(mut self) -> Self {
        self.gamma = 0.0;
        self
    }

    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.drive.omega_l = self.omega() + delta;
        self
    }

    pub fn with_drive_amplitude(mut self, amplitude: f64) -> Self {
        self.drive.amplitude = amplitude;
        self
    }
}

fn nonreciprocal_coupling(config: &SystemConfig) -> Complex64 {
    let mu = -config.battery.p * config.charger.p.conj();
    -Complex64::i() * mu * (config.gamma / 2.0)
}

/// Flat key–value form of [`SystemConfig`] used for config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default = "one")]
    pub omega: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    #[serde(default = "one")]
    pub p_a_re: f64,
    #[serde(default)]
    pub p_a_im: f64,
    #[serde(default = "one")]
    pub p_b_re: f64,
    #[serde(default)]
    pub p_b_im: f64,
    #[serde(rename = "J_re", default)]
    pub j_re: f64,
    #[serde(rename = "J_im", default)]
    pub j_im: f64,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    pub drive_amplitude: f64,
    /// Defaults to `omega` (resonant drive) when absent.
    #[serde(rename = "omega_L", default, skip_serializing_if = "Option::is_none")]
    pub omega_l: Option<f64>,
}

fn one() -> f64 {
    1.0
}

/// Every key accepted in a config file.
pub const CONFIG_KEYS: [&str; 12] = [
    "omega",
    "kappa_a",
    "kappa_b",
    "p_a_re",
    "p_a_im",
    "p_b_re",
    "p_b_im",
    "J_re",
    "J_im",
    "Gamma",
    "drive_amplitude",
    "omega_L",
];

impl From<ConfigFile> for SystemConfig {
    fn from(f: ConfigFile) -> Self {
        Self {
            charger: ModeParams::new(f.omega, f.kappa_a, Complex64::new(f.p_a_re, f.p_a_im)),
            battery: ModeParams::new(f.omega, f.kappa_b, Complex64::new(f.p_b_re, f.p_b_im)),
            coupling: Complex64::new(f.j_re, f.j_im),
            gamma: f.gamma,
            drive: DriveParams {
                amplitude: f.drive_amplitude,
                omega_l: f.omega_l.unwrap_or(f.omega),
            },
        }
    }
}

impl From<&SystemConfig> for ConfigFile {
    fn from(c: &SystemConfig) -> Self {
        Self {
            omega: c.charger.omega,
            kappa_a: c.charger.kappa,
            kappa_b: c.battery.kappa,
            p_a_re: c.charger.p.re,
            p_a_im: c.charger.p.im,
            p_b_re: c.battery.p.re,
            p_b_im: c.battery.p.im,
            j_re: c.coupling.re,
            j_im: c.coupling.im,
            gamma: c.gamma,
            drive_amplitude: c.drive.amplitude,
            omega_l: Some(c.drive.omega_l),
        }
    }
}

impl SystemConfig {
    /// Parses and validates a flat JSON config document.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        SystemConfig::from(file).validate()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ConfigFile::from(self))
            .expect("flat config of finite floats always serializes")
    }
}
