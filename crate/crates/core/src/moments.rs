//! First and normally ordered second moments of the charger (`a`) and
//! battery (`b`) modes, in the frame rotating at the drive frequency.
//!
//! With ω_a = ω_b the drive phase is the only explicit time dependence, so
//! moving to the rotating frame makes the system autonomous and affine:
//! `dx/dt = M x + c`, where `c` only feeds ⟨a⟩. Occupations and ⟨a†b⟩ are
//! the same in both frames.

use std::io::{self, Write};
use std::ops::{Add, Mul};

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::fmt17;
use crate::params::{DerivedParams, DriveParams, SystemConfig};

/// Largest allowed `dt_max * max(Λ_a, Λ_b, 4|J|, 4|δ|)`.
pub const STABILITY_LIMIT: f64 = 0.5;

/// Relative slack used when checking positivity and Cauchy–Schwarz.
pub const INVARIANT_TOL: f64 = 1e-9;

pub const TRAJECTORY_HEADER: &str = "t,re_a,im_a,re_b,im_b,n_a,n_b,re_ab,im_ab,E_A,E_B";

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MomentState {
    pub mean_a: Complex64,
    pub mean_b: Complex64,
    pub n_a: f64,
    pub n_b: f64,
    pub coh_ab: Complex64,
}

impl MomentState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Product coherent state |α⟩|β⟩.
    pub fn coherent(alpha: Complex64, beta: Complex64) -> Self {
        Self {
            mean_a: alpha,
            mean_b: beta,
            n_a: alpha.norm_sqr(),
            n_b: beta.norm_sqr(),
            coh_ab: alpha.conj() * beta,
        }
    }

    pub fn to_vector(&self) -> SVector<f64, 8> {
        SVector::from([
            self.mean_a.re,
            self.mean_a.im,
            self.mean_b.re,
            self.mean_b.im,
            self.n_a,
            self.n_b,
            self.coh_ab.re,
            self.coh_ab.im,
        ])
    }

    pub fn from_vector(v: &SVector<f64, 8>) -> Self {
        Self {
            mean_a: Complex64::new(v[0], v[1]),
            mean_b: Complex64::new(v[2], v[3]),
            n_a: v[4],
            n_b: v[5],
            coh_ab: Complex64::new(v[6], v[7]),
        }
    }

    pub fn max_occupation(&self) -> f64 {
        self.n_a.max(self.n_b)
    }

    /// Largest deviation from the coherent-state relations
    /// n_a = |⟨a⟩|², n_b = |⟨b⟩|², ⟨a†b⟩ = ⟨a⟩*⟨b⟩.
    pub fn factorization_error(&self) -> f64 {
        let ea = (self.n_a - self.mean_a.norm_sqr()).abs();
        let eb = (self.n_b - self.mean_b.norm_sqr()).abs();
        let eab = (self.coh_ab - self.mean_a.conj() * self.mean_b).norm();
        ea.max(eb).max(eab)
    }

    /// Positivity of occupations and |⟨a†b⟩|² ≤ n_a n_b, each with absolute
    /// slack `tol * (1 + max occupation)`.
    pub fn check_physical(&self, tol: f64) -> Result<()> {
        let slack = tol * (1.0 + self.max_occupation().abs());
        if !(self.n_a >= -slack && self.n_b >= -slack) {
            return Err(Error::UnphysicalState(format!(
                "negative occupation (n_a = {}, n_b = {})",
                self.n_a, self.n_b
            )));
        }
        let bound = (self.n_a.max(0.0) * self.n_b.max(0.0)).sqrt();
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail
        if !(self.coh_ab.norm() <= bound + slack) {
            return Err(Error::UnphysicalState(format!(
                "|<a^dag b>| = {} exceeds sqrt(n_a n_b) = {}",
                self.coh_ab.norm(),
                bound
            )));
        }
        Ok(())
    }
}

impl Add for MomentState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            mean_a: self.mean_a + o.mean_a,
            mean_b: self.mean_b + o.mean_b,
            n_a: self.n_a + o.n_a,
            n_b: self.n_b + o.n_b,
            coh_ab: self.coh_ab + o.coh_ab,
        }
    }
}

impl Mul<f64> for MomentState {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self {
            mean_a: self.mean_a * s,
            mean_b: self.mean_b * s,
            n_a: self.n_a * s,
            n_b: self.n_b * s,
            coh_ab: self.coh_ab * s,
        }
    }
}

/// Coefficients of the rotating-frame equations that depend only on the
/// configuration.
#[derive(Debug, Clone, Copy)]
struct Coefficients {
    /// Damping–detuning of ⟨a⟩ and ⟨b⟩: Λ_i/2 − iδ.
    decay_a: Complex64,
    decay_b: Complex64,
    lambda_a: f64,
    lambda_b: f64,
    /// i(J + iμΓ/2): battery → charger.
    to_charger: Complex64,
    /// i(J* + iμ*Γ/2): charger → battery.
    to_battery: Complex64,
    /// i(J − iμΓ/2), entering d⟨b†b⟩/dt.
    hop_b: Complex64,
    /// J* − iμ*Γ/2, entering d⟨a†b⟩/dt through ⟨b†b⟩.
    hop_ab: Complex64,
    drive: f64,
}

impl Coefficients {
    fn new(d: &DerivedParams, drive: &DriveParams) -> Self {
        let half = d.mu * (d.gamma / 2.0);
        let j = d.coupling;
        Self {
            decay_a: Complex64::new(d.lambda_a / 2.0, -d.delta),
            decay_b: Complex64::new(d.lambda_b / 2.0, -d.delta),
            lambda_a: d.lambda_a,
            lambda_b: d.lambda_b,
            to_charger: I * (j + I * half),
            to_battery: I * (j.conj() + I * half.conj()),
            hop_b: I * (j - I * half),
            hop_ab: j.conj() - I * half.conj(),
            drive: drive.amplitude,
        }
    }

    /// Homogeneous part `M x`: every term except the constant drive on ⟨a⟩.
    fn linear(&self, s: &MomentState) -> MomentState {
        let e = self.drive;
        MomentState {
            mean_a: -self.decay_a * s.mean_a - self.to_charger * s.mean_b,
            mean_b: -self.decay_b * s.mean_b - self.to_battery * s.mean_a,
            n_a: -self.lambda_a * s.n_a
                - 2.0 * (self.to_charger * s.coh_ab).re
                - 2.0 * (e * s.mean_a).im,
            n_b: -self.lambda_b * s.n_b + 2.0 * (self.hop_b * s.coh_ab).re,
            coh_ab: -(self.lambda_a + self.lambda_b) / 2.0 * s.coh_ab
                - self.to_battery * s.n_a
                + I * self.hop_ab * s.n_b
                + I * e * s.mean_b,
        }
    }

    fn source(&self) -> MomentState {
        MomentState {
            mean_a: -I * self.drive,
            ..MomentState::default()
        }
    }

    fn rhs(&self, s: &MomentState) -> MomentState {
        let mut out = self.linear(s);
        out.mean_a += self.source().mean_a;
        out
    }
}

/// Time derivative of all five moments in the rotating frame.
pub fn rhs(state: &MomentState, derived: &DerivedParams, drive: &DriveParams) -> MomentState {
    Coefficients::new(derived, drive).rhs(state)
}

/// The affine system `dx/dt = M x + c` on the real 8-vector
/// `[Re⟨a⟩, Im⟨a⟩, Re⟨b⟩, Im⟨b⟩, n_a, n_b, Re⟨a†b⟩, Im⟨a†b⟩]`.
pub fn drift_system(
    derived: &DerivedParams,
    drive: &DriveParams,
) -> (SMatrix<f64, 8, 8>, SVector<f64, 8>) {
    let coeffs = Coefficients::new(derived, drive);
    let mut m = SMatrix::<f64, 8, 8>::zeros();
    for k in 0..8 {
        let mut e = SVector::<f64, 8>::zeros();
        e[k] = 1.0;
        let col = coeffs.linear(&MomentState::from_vector(&e)).to_vector();
        m.set_column(k, &col);
    }
    (m, coeffs.source().to_vector())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MomentState>,
    pub energy_a: Vec<f64>,
    pub energy_b: Vec<f64>,
}

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            energy_a: Vec::with_capacity(n),
            energy_b: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, s: MomentState, omega: f64) {
        self.times.push(t);
        self.energy_a.push(omega * s.n_a);
        self.energy_b.push(omega * s.n_b);
        self.states.push(s);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&MomentState> {
        self.states.last()
    }

    /// CSV with one row per recorded step, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{TRAJECTORY_HEADER}")?;
        for (k, s) in self.states.iter().enumerate() {
            let row = [
                self.times[k],
                s.mean_a.re,
                s.mean_a.im,
                s.mean_b.re,
                s.mean_b.im,
                s.n_a,
                s.n_b,
                s.coh_ab.re,
                s.coh_ab.im,
                self.energy_a[k],
                self.energy_b[k],
            ];
            let line: Vec<String> = row.iter().map(|&x| fmt17(x)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Number of equal steps covering `t_end` with step at most `dt_max`.
pub fn step_count(t_end: f64, dt_max: f64) -> usize {
    let ratio = t_end / dt_max;
    let nearest = ratio.round();
    // t_end an integer multiple of dt_max up to rounding
    let n = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.ceil()
    };
    (n as usize).max(1)
}

pub fn check_step(derived: &DerivedParams, dt_max: f64) -> Result<()> {
    let rate = derived
        .lambda_a
        .max(derived.lambda_b)
        .max(4.0 * derived.coupling.norm())
        .max(4.0 * derived.delta.abs());
    let product = dt_max * rate;
    if product > STABILITY_LIMIT {
        return Err(Error::StepTooLarge {
            product,
            limit: STABILITY_LIMIT,
        });
    }
    Ok(())
}

/// Fixed-step classical RK4 from `initial` over `[0, t_end]`, recording every
/// step (including `t = 0`).
pub fn integrate(
    config: &SystemConfig,
    initial: MomentState,
    t_end: f64,
    dt_max: f64,
) -> Result<Trajectory> {
    if !(t_end > 0.0 && dt_max > 0.0 && t_end.is_finite() && dt_max.is_finite()) {
        return Err(Error::InvalidHorizon { t_end, dt_max });
    }
    let derived = config.derive();
    check_step(&derived, dt_max)?;
    initial.check_physical(INVARIANT_TOL)?;

    let coeffs = Coefficients::new(&derived, &config.drive);
    let n = step_count(t_end, dt_max);
    let h = t_end / n as f64;
    let omega = config.omega();

    let mut traj = Trajectory::with_capacity(n + 1);
    let mut s = initial;
    traj.push(0.0, s, omega);
    for k in 1..=n {
        let k1 = coeffs.rhs(&s);
        let k2 = coeffs.rhs(&(s + k1 * (h / 2.0)));
        let k3 = coeffs.rhs(&(s + k2 * (h / 2.0)));
        let k4 = coeffs.rhs(&(s + k3 * h));
        s = s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        traj.push(t_end * (k as f64 / n as f64), s, omega);
    }
    s.check_physical(INVARIANT_TOL)?;
    Ok(traj)
}

/// Fixed point of the rotating-frame equations by a direct 8×8 solve.
pub fn steady_state(config: &SystemConfig) -> Result<MomentState> {
    let derived = config.derive();
    if derived.lambda_a == 0.0 || derived.lambda_b == 0.0 {
        return Err(Error::SingularSystem);
    }
    let (m, c) = drift_system(&derived, &config.drive);
    let x = m.lu().solve(&(-c)).ok_or(Error::SingularSystem)?;
    Ok(MomentState::from_vector(&x))
}
