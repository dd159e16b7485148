//! Analytic charging curves.
//!
//! All energies are `omega * occupation`, starting from vacuum:
//!
//! * nonreciprocal battery, resonant drive, with its Λ_a = Λ_b limit;
//! * nonreciprocal battery, detuned drive;
//! * nonreciprocal charger;
//! * reciprocal battery (no shared reservoir).
//!
//! The reciprocal curve is written in terms of the entire functions
//! `sinh z / z` and `(cosh z − 1)/z²` of the complex discriminant Δ, so one
//! code path covers the underdamped (Δ imaginary), overdamped (Δ real) and
//! critically damped (Δ = 0) regimes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::export::Table;
use crate::params::{DerivedParams, SystemConfig};

/// Relative gap |Λ_a − Λ_b| / (Λ_a + Λ_b) below which the symmetric limit is used.
pub const SYMMETRIC_SWITCH: f64 = 1e-8;

/// |Δ| t below which the hyperbolic functions are replaced by their series.
pub const SERIES_SWITCH: f64 = 1e-6;

/// Largest |δ| (in units of ω) treated as resonant.
pub const RESONANCE_TOL: f64 = 1e-12;

/// Allowed imaginary residue of the reciprocal energy, relative to its size.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

pub const CURVE_COLUMNS: [&str; 6] = ["t", "E_B_nr", "E_A_nr", "E_B_rec", "eta_AB", "eta_BB"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Any detuning.
    NonreciprocalGeneral,
    /// δ = 0.
    NonreciprocalResonant,
    /// δ = 0 and Λ_a = Λ_b.
    NonreciprocalSymmetric,
    ChargerNonreciprocal,
    Reciprocal,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::NonreciprocalGeneral,
        Variant::NonreciprocalResonant,
        Variant::NonreciprocalSymmetric,
        Variant::ChargerNonreciprocal,
        Variant::Reciprocal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::NonreciprocalGeneral => "nonreciprocal_general",
            Variant::NonreciprocalResonant => "nonreciprocal_resonant",
            Variant::NonreciprocalSymmetric => "nonreciprocal_symmetric",
            Variant::ChargerNonreciprocal => "charger_nonreciprocal",
            Variant::Reciprocal => "reciprocal",
        }
    }

    /// Whether the curve is the charger's energy rather than the battery's.
    pub fn is_charger(self) -> bool {
        self == Variant::ChargerNonreciprocal
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCurveSpec {
    pub config: SystemConfig,
    pub variant: Variant,
}

impl EnergyCurveSpec {
    /// Checks the variant's preconditions up front.
    pub fn new(config: SystemConfig, variant: Variant) -> Result<Self> {
        let r = Rates::new(&config);
        match variant {
            Variant::NonreciprocalGeneral => config.require_nonreciprocal()?,
            Variant::NonreciprocalResonant | Variant::ChargerNonreciprocal => {
                config.require_nonreciprocal()?;
                r.require_resonant()?;
            }
            Variant::NonreciprocalSymmetric => {
                config.require_nonreciprocal()?;
                r.require_resonant()?;
                if !nearly_equal_rates(r.d.lambda_a, r.d.lambda_b) {
                    return Err(Error::NotSymmetric {
                        lambda_a: r.d.lambda_a,
                        lambda_b: r.d.lambda_b,
                    });
                }
            }
            Variant::Reciprocal => {
                r.require_local_damping()?;
                r.require_resonant()?;
            }
        }
        Ok(Self { config, variant })
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        match self.variant {
            Variant::NonreciprocalGeneral => energy_battery_nr_detuned(&self.config, t),
            Variant::NonreciprocalResonant => energy_battery_nr(&self.config, t),
            Variant::NonreciprocalSymmetric => {
                let r = Rates::new(&self.config);
                let lambda = 0.5 * (r.d.lambda_a + r.d.lambda_b);
                Ok(r.battery_prefactor(0.0) * (1.0 - symmetric_transfer(lambda, t)).powi(2))
            }
            Variant::ChargerNonreciprocal => energy_charger_nr(&self.config, t),
            Variant::Reciprocal => energy_battery_reciprocal(&self.config, t),
        }
    }
}

/// Derived rates plus the drive amplitude.
struct Rates {
    d: DerivedParams,
    amplitude: f64,
}

impl Rates {
    fn new(config: &SystemConfig) -> Self {
        Self {
            d: config.derive(),
            amplitude: config.drive.amplitude,
        }
    }

    fn require_resonant(&self) -> Result<()> {
        if self.d.delta.abs() > RESONANCE_TOL * self.d.omega {
            return Err(Error::NotResonant { delta: self.d.delta });
        }
        Ok(())
    }

    fn require_local_damping(&self) -> Result<()> {
        if !(self.d.kappa_a > 0.0 && self.d.kappa_b > 0.0) {
            return Err(Error::ZeroLocalDamping {
                kappa_a: self.d.kappa_a,
                kappa_b: self.d.kappa_b,
            });
        }
        Ok(())
    }

    /// Effective charger → battery drive strength Γ|μ|.
    fn transfer_rate(&self) -> f64 {
        self.d.gamma * self.d.mu.norm()
    }

    /// 16 ω Γ²|μ|² ℰ² / (Φ_a Φ_b) with Φ_i = Λ_i² + 4δ²: the stationary
    /// nonreciprocal battery energy.
    fn battery_prefactor(&self, delta: f64) -> f64 {
        let g = self.transfer_rate();
        if g == 0.0 || self.amplitude == 0.0 {
            return 0.0;
        }
        let phi_a = self.d.lambda_a.powi(2) + 4.0 * delta * delta;
        let phi_b = self.d.lambda_b.powi(2) + 4.0 * delta * delta;
        16.0 * self.d.omega * g * g * self.amplitude.powi(2) / (phi_a * phi_b)
    }
}

fn nearly_equal_rates(a: f64, b: f64) -> bool {
    (a - b).abs() < SYMMETRIC_SWITCH * (a + b)
}

/// Λ-symmetric limit of `(Λ_a e^{−Λ_b t/2} − Λ_b e^{−Λ_a t/2})/(Λ_a − Λ_b)`.
fn symmetric_transfer(lambda: f64, t: f64) -> f64 {
    (-0.5 * lambda * t).exp() * (1.0 + 0.5 * lambda * t)
}

/// The two ratios shared by the nonreciprocal battery curves:
/// `(e^{−Λ_a t/2} − e^{−Λ_b t/2})/(Λ_a − Λ_b)` and
/// `(Λ_a e^{−Λ_b t/2} − Λ_b e^{−Λ_a t/2})/(Λ_a − Λ_b)`, with their Λ_a = Λ_b
/// limits inside the switch band.
fn transfer_ratios(lambda_a: f64, lambda_b: f64, t: f64) -> (f64, f64) {
    if nearly_equal_rates(lambda_a, lambda_b) {
        let lambda = 0.5 * (lambda_a + lambda_b);
        let e = (-0.5 * lambda * t).exp();
        (-0.5 * t * e, symmetric_transfer(lambda, t))
    } else {
        // e^{−Λ_a t/2} − e^{−Λ_b t/2} = e^{−Λ_b t/2} expm1(−(Λ_a−Λ_b)t/2)
        let eb = (-0.5 * lambda_b * t).exp();
        let gap = lambda_a - lambda_b;
        let q1 = eb * (-0.5 * gap * t).exp_m1() / gap;
        (q1, eb - lambda_b * q1)
    }
}

/// Battery energy in the nonreciprocal regime with a resonant drive.
///
/// `E = P [1 + f/(Λ_a−Λ_b)² · (f − 2(Λ_a−Λ_b))] = P (1 − f/(Λ_a−Λ_b))²` with
/// `f = Λ_a e^{−Λ_b t/2} − Λ_b e^{−Λ_a t/2}` and `P = 16ωΓ²ℰ²/(Λ_a²Λ_b²)`.
/// Within the switch band the squared form is evaluated at its Λ_a = Λ_b
/// limit, `P (1 − e^{−Λt/2}(1 + Λt/2))²`.
pub fn energy_battery_nr(config: &SystemConfig, t: f64) -> Result<f64> {
    config.require_nonreciprocal()?;
    let r = Rates::new(config);
    r.require_resonant()?;
    let p = r.battery_prefactor(0.0);
    if p == 0.0 {
        return Ok(0.0);
    }
    let (_, q) = transfer_ratios(r.d.lambda_a, r.d.lambda_b, t);
    Ok(p * (1.0 - q).powi(2))
}

/// Battery energy in the nonreciprocal regime for any detuning δ.
///
/// Term by term this is
/// `P [1 + 4δ² q₁² + q₂² − 2 cos(δt) q₂ + 4δ sin(δt) q₁]` with
/// `P = 16ωΓ²ℰ²/(Φ_aΦ_b)`, `q₁ = (e^{−Λ_a t/2} − e^{−Λ_b t/2})/(Λ_a−Λ_b)` and
/// `q₂ = f/(Λ_a−Λ_b)`. It is evaluated as
/// `P [(1 − q₂)² + 4 q₂ sin²(δt/2) + 4δ² q₁² + 4δ sin(δt) q₁]`, which is exactly
/// the resonant curve at δ = 0.
pub fn energy_battery_nr_detuned(config: &SystemConfig, t: f64) -> Result<f64> {
    config.require_nonreciprocal()?;
    let r = Rates::new(config);
    let delta = r.d.delta;
    let p = r.battery_prefactor(delta);
    if p == 0.0 {
        return Ok(0.0);
    }
    let (q1, q2) = transfer_ratios(r.d.lambda_a, r.d.lambda_b, t);
    let half = (0.5 * delta * t).sin();
    let bracket = (1.0 - q2).powi(2)
        + 4.0 * q2 * half * half
        + 4.0 * delta * delta * q1 * q1
        + 4.0 * delta * (delta * t).sin() * q1;
    Ok(p * bracket)
}

/// Charger energy in the nonreciprocal regime, `4ωℰ²(1 − e^{−Λ_a t/2})²/Λ_a²`.
pub fn energy_charger_nr(config: &SystemConfig, t: f64) -> Result<f64> {
    config.require_nonreciprocal()?;
    let r = Rates::new(config);
    r.require_resonant()?;
    let lambda = r.d.lambda_a;
    // (1 − e^{−Λt/2})/Λ, finite as Λ → 0
    let rise = if lambda == 0.0 {
        0.5 * t
    } else {
        -(-0.5 * lambda * t).exp_m1() / lambda
    };
    Ok(4.0 * r.d.omega * (r.amplitude * rise).powi(2))
}

/// `cosh z e^{−s}`, `(sinh z / z) e^{−s}` and `((cosh z − 1)/z²) e^{−s}`.
///
/// Re z never exceeds s in the reciprocal curve, so combining the damping
/// into the exponentials keeps every product finite.
fn damped_hyperbolics(z: Complex64, s: f64, series: bool) -> (Complex64, Complex64, Complex64) {
    let w = (-s).exp();
    if series {
        let z2 = z * z;
        return (
            (1.0 + z2 / 2.0) * w,
            (1.0 + z2 / 6.0) * w,
            (0.5 + z2 / 24.0) * w,
        );
    }
    if z.norm() <= 1.0 {
        let half = z / 2.0;
        let sinhc_half = half.sinh() / half;
        (z.cosh() * w, z.sinh() / z * w, 0.5 * sinhc_half * sinhc_half * w)
    } else {
        let ep = (z - s).exp();
        let em = (-z - s).exp();
        let cosh_w = (ep + em) / 2.0;
        (cosh_w, (ep - em) / (2.0 * z), (cosh_w - w) / (z * z))
    }
}

/// Stationary reciprocal battery energy ζ = 4ωℰ²C/(κ_aκ_b(C+1)²).
pub fn stationary_battery_reciprocal(config: &SystemConfig) -> Result<f64> {
    let r = Rates::new(config);
    r.require_local_damping()?;
    Ok(zeta(&r))
}

fn zeta(r: &Rates) -> f64 {
    let c = r.d.coop_coherent.expect("local damping checked");
    4.0 * r.d.omega * r.amplitude.powi(2) * c / (r.d.kappa_a * r.d.kappa_b * (c + 1.0).powi(2))
}

/// Battery energy without the shared reservoir (Γ is ignored):
///
/// `E = ζ (1 − α(t) e^{−κ_ab t/4} + [β(t) − 2κ_aκ_b(C+1)/Δ²] e^{−κ_ab t/2})`,
/// `α = (2/Δ)(Δ cosh(Δt/4) + κ_ab sinh(Δt/4))`,
/// `β = ((Δ² + κ_ab²) cosh(Δt/2) + 2κ_abΔ sinh(Δt/2)) / (2Δ²)`.
///
/// Using `κ_ab² − Δ² = 4κ_aκ_b(C+1)` the bracket becomes
/// `(cosh u + 1)/2 + (κ_ab t)²/8 · (cosh u − 1)/u² + (κ_ab t/2) sinh u / u`
/// with `u = Δt/2`, which has no singularity at Δ = 0.
pub fn energy_battery_reciprocal(config: &SystemConfig, t: f64) -> Result<f64> {
    let r = Rates::new(config);
    r.require_local_damping()?;
    r.require_resonant()?;
    let series = r.d.delta_cap.norm() * t.abs() < SERIES_SWITCH;
    let value = reciprocal_energy(&r, t, series);
    if value.im.abs() > IMAG_RESIDUE_TOL * value.re.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::CrossCheck(format!(
            "reciprocal energy has imaginary residue {:e} at t = {t}",
            value.im
        )));
    }
    Ok(value.re)
}

fn reciprocal_energy(r: &Rates, t: f64, series: bool) -> Complex64 {
    let zeta = zeta(r);
    let kab = r.d.kappa_ab;
    let cap = r.d.delta_cap;

    let (cosh_q, sinhc_q, _) = damped_hyperbolics(cap * (t / 4.0), kab * t / 4.0, series);
    let alpha_term = 2.0 * cosh_q + 2.0 * kab * (t / 4.0) * sinhc_q;

    let (cosh_h, sinhc_h, coshm1c_h) = damped_hyperbolics(cap * (t / 2.0), kab * t / 2.0, series);
    let w = (-kab * t / 2.0).exp();
    let beta_term = (cosh_h + w) / 2.0
        + (kab * t).powi(2) / 8.0 * coshm1c_h
        + kab * t / 2.0 * sinhc_h;

    zeta * (1.0 - alpha_term + beta_term)
}

/// Stationary nonreciprocal battery energy 16ωΓ²ℰ²/(Φ_aΦ_b), any detuning.
pub fn stationary_battery_nr(config: &SystemConfig) -> Result<f64> {
    config.require_nonreciprocal()?;
    let r = Rates::new(config);
    Ok(r.battery_prefactor(r.d.delta))
}

/// Stationary nonreciprocal charger energy 4ωℰ²/Λ_a² (resonant).
pub fn stationary_charger_nr(config: &SystemConfig) -> Result<f64> {
    config.require_nonreciprocal()?;
    let r = Rates::new(config);
    r.require_resonant()?;
    Ok(4.0 * r.d.omega * (r.amplitude / r.d.lambda_a).powi(2))
}

/// E_B^nr(t) / E_A^nr(t), defined for t > 0.
pub fn eta_ab(config: &SystemConfig, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::DivisionByZero { t });
    }
    let battery = energy_battery_nr(config, t)?;
    let charger = energy_charger_nr(config, t)?;
    if charger == 0.0 {
        return Err(Error::DivisionByZero { t });
    }
    Ok(battery / charger)
}

/// Exact t → ∞ limit of [`eta_ab`]: 4Γ²|μ|²/Λ_b². Equals the dissipative
/// cooperativity 4Γ²/Λ² when the rates are symmetric.
pub fn eta_ab_stationary(config: &SystemConfig) -> Result<f64> {
    config.require_nonreciprocal()?;
    let r = Rates::new(config);
    r.require_resonant()?;
    Ok(4.0 * (r.transfer_rate() / r.d.lambda_b).powi(2))
}

/// Checks that a nonreciprocal config and a reciprocal config describe the
/// same charger–battery pair with |Γ| = 2|J|.
pub fn check_comparable(nonreciprocal: &SystemConfig, reciprocal: &SystemConfig) -> Result<()> {
    let fail = |what: &str| Err(Error::IncompatibleConfigs(what.to_owned()));
    if nonreciprocal.omega() != reciprocal.omega() {
        return fail("mode frequencies differ");
    }
    if nonreciprocal.drive != reciprocal.drive {
        return fail("drives differ");
    }
    if nonreciprocal.charger.kappa != reciprocal.charger.kappa
        || nonreciprocal.battery.kappa != reciprocal.battery.kappa
    {
        return fail("local damping rates differ");
    }
    let gamma = nonreciprocal.gamma;
    let two_j = 2.0 * reciprocal.coupling.norm();
    if (gamma - two_j).abs() > 1e-12 * gamma.max(two_j) {
        return fail("shared-reservoir rate is not 2|J|");
    }
    Ok(())
}

/// E_B^nr(t) / E_B(t) for a nonreciprocal config and its reciprocal
/// counterpart, defined for t > 0.
pub fn eta_bb(nonreciprocal: &SystemConfig, reciprocal: &SystemConfig, t: f64) -> Result<f64> {
    check_comparable(nonreciprocal, reciprocal)?;
    if t <= 0.0 {
        return Err(Error::DivisionByZero { t });
    }
    let nr = energy_battery_nr(nonreciprocal, t)?;
    let rec = energy_battery_reciprocal(reciprocal, t)?;
    if rec == 0.0 {
        return Err(Error::DivisionByZero { t });
    }
    Ok(nr / rec)
}

/// 4((1 + C)/((√C + ξ)(√C + 1/ξ)))², the stationary η_BB with Γ = 2|J| and
/// Γ_a = Γ_b.
pub fn eta_bb_stationary(coop: f64, xi: f64) -> f64 {
    let s = coop.sqrt();
    4.0 * ((1.0 + coop) / ((s + xi) * (s + 1.0 / xi))).powi(2)
}

/// 4((1 + C)/(√C + 1)²)², the stationary η_BB with Γ = 2|J| and the
/// optimal weighting Γ_a = ξΓ, Γ_b = Γ/ξ. Independent of ξ.
pub fn eta_bb_opt_stationary(coop: f64) -> f64 {
    let s = coop.sqrt();
    4.0 * ((1.0 + coop) / (s + 1.0).powi(2)).powi(2)
}

/// Γ²(4|J|² + κ_aκ_b)² / (|J|²(Γ + √(κ_aκ_b))⁴), the optimally weighted
/// stationary η_BB for an arbitrary shared rate Γ.
pub fn eta_bb_opt_stationary_rates(gamma: f64, coupling: f64, kappa_a: f64, kappa_b: f64) -> f64 {
    let kk = kappa_a * kappa_b;
    let j2 = coupling * coupling;
    gamma * gamma * (4.0 * j2 + kk).powi(2) / (j2 * (gamma + kk.sqrt()).powi(4))
}

/// Curve table `t,E_B_nr,E_A_nr,E_B_rec,eta_AB,eta_BB`, keeping only the
/// columns defined for `config`. The reciprocal column uses the same pair
/// with the shared reservoir removed.
pub fn curve_table(config: &SystemConfig, times: &[f64]) -> Table {
    let nonreciprocal = config.is_nonreciprocal() && config.gamma > 0.0;
    let resonant = Rates::new(config).require_resonant().is_ok();
    let reciprocal = config.reciprocal_partner();
    let has_rec = energy_battery_reciprocal(&reciprocal, 0.0).is_ok();
    let comparable = nonreciprocal && resonant && check_comparable(config, &reciprocal).is_ok();

    let mut table = Table::new();
    table.push_dense(CURVE_COLUMNS[0], times);
    let col = |f: &dyn Fn(f64) -> Result<f64>| -> Vec<Option<f64>> {
        times.iter().map(|&t| f(t).ok()).collect()
    };
    if nonreciprocal {
        table.push_column(
            CURVE_COLUMNS[1],
            col(&|t| energy_battery_nr_detuned(config, t)),
        );
        if resonant {
            table.push_column(CURVE_COLUMNS[2], col(&|t| energy_charger_nr(config, t)));
        }
    }
    if has_rec {
        table.push_column(
            CURVE_COLUMNS[3],
            col(&|t| energy_battery_reciprocal(&reciprocal, t)),
        );
    }
    if nonreciprocal && resonant {
        table.push_column(CURVE_COLUMNS[4], col(&|t| eta_ab(config, t)));
    }
    if comparable && has_rec {
        table.push_column(CURVE_COLUMNS[5], col(&|t| eta_bb(config, &reciprocal, t)));
    }
    table
}
