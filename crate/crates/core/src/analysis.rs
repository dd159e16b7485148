//! Optimal reservoir weighting and the all-times advantage of the optimized
//! nonreciprocal battery over reciprocal charging.
//!
//! Weighting: moving reservoir weight between the modes (`Γ_a = xΓ`,
//! `Γ_b = Γ/x`, μ fixed) changes the stationary nonreciprocal battery energy
//! `16ωΓ²ℰ² / ((xΓ + κ_a)² (Γ/x + κ_b)²)`. Its maximum over `x > 0` is found
//! numerically. The closed-form optimum `x = sqrt(κ_a/κ_b)` serves only as a
//! cross-check.
//!
//! Advantage: with `r = κ_a/|J|` and `y = κ_b/κ_a`, the gap
//! `D_t = E_opt^nr(∞) − E_B(t)` between the optimized stationary energy and
//! the reciprocal curve has its local minima at `t* = (2k+1) 4π/Δ₊`, where
//! `Δ₊ = sqrt(16|J|² − (κ_a − κ_b)²)`. At those times it equals `𝒩 χ(r, y; k)`
//! with `𝒩 = 8ωℰ²/|J|²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::json;

use crate::closedform::{energy_battery_reciprocal, stationary_battery_nr};
use crate::error::{Error, Result};
use crate::export::{linspace, Table};
use crate::golden;
use crate::params::SystemConfig;

/// Bracket on `ln x` for the weighting search.
pub const LOG_X_BRACKET: (f64, f64) = (-40.0, 40.0);
pub const GOLDEN_TOL: f64 = 1e-10;
/// Required agreement between the numeric argmax and sqrt(κ_a/κ_b).
pub const ARGMAX_TOL: f64 = 1e-6;
/// Required agreement between the optimized energy and its closed form.
pub const ENERGY_TOL: f64 = 1e-9;
/// Required agreement between the two evaluations of the gap.
pub const GAP_TOL: f64 = 1e-9;
/// Upper end (excluded) of the y range on which the advantage is claimed.
pub const CERTIFIED_Y_MAX: f64 = 0.22;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// Optimal Γ_a/Γ (and Γ/Γ_b).
    pub x_opt: f64,
    pub energy_opt: f64,
    /// sqrt(κ_a/κ_b).
    pub xi: f64,
    /// 16ωΓ²ℰ²/(Γ + sqrt(κ_aκ_b))⁴.
    pub energy_analytic: f64,
    pub x_grid: Vec<f64>,
    pub energy_grid: Vec<f64>,
}

impl OptimizationResult {
    /// Reservoir weights realizing the optimum, keeping the phases of the
    /// input weights: `|p_a| = sqrt(x_opt)`, `|p_b| = 1/sqrt(x_opt)`.
    pub fn weights(&self, config: &SystemConfig) -> (Complex64, Complex64) {
        let root = self.x_opt.sqrt();
        (
            unit_phase(config.charger.p) * root,
            unit_phase(config.battery.p) / root,
        )
    }

    /// `config` with the optimal weights and J = −iμΓ/2.
    pub fn apply(&self, config: &SystemConfig) -> Result<SystemConfig> {
        let mut c = config.normalize_shared_coupling()?;
        let (pa, pb) = self.weights(&c);
        c.charger.p = pa;
        c.battery.p = pb;
        c.make_nonreciprocal()
    }
}

fn unit_phase(p: Complex64) -> Complex64 {
    if p.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        p / p.norm()
    }
}

/// Stationary nonreciprocal battery energy with `Γ_a = xΓ`, `Γ_b = Γ/x`.
pub fn weighted_stationary_energy(
    x: f64,
    gamma: f64,
    kappa_a: f64,
    kappa_b: f64,
    omega: f64,
    amplitude: f64,
) -> f64 {
    16.0 * omega * (gamma * amplitude).powi(2)
        / ((x * gamma + kappa_a).powi(2) * (gamma / x + kappa_b).powi(2))
}

pub fn optimal_rescaling(config: &SystemConfig) -> Result<OptimizationResult> {
    let (kappa_a, kappa_b) = (config.charger.kappa, config.battery.kappa);
    if !(kappa_a > 0.0 && kappa_b > 0.0) {
        return Err(Error::ZeroLocalDamping { kappa_a, kappa_b });
    }
    let base = config.normalize_shared_coupling()?;
    let gamma = base.gamma;
    if gamma <= 0.0 {
        return Err(Error::ZeroSharedCoupling);
    }
    let omega = config.omega();
    let amplitude = config.drive.amplitude;

    // The amplitude only scales the objective, so search at unit drive.
    let shape = |x: f64| weighted_stationary_energy(x, gamma, kappa_a, kappa_b, omega, 1.0);
    let (lo, hi) = LOG_X_BRACKET;
    let found = golden::maximize(|u| shape(u.exp()), lo, hi, GOLDEN_TOL);
    let x_opt = found.x.exp();
    let energy_opt = weighted_stationary_energy(x_opt, gamma, kappa_a, kappa_b, omega, amplitude);

    let xi = (kappa_a / kappa_b).sqrt();
    let energy_analytic =
        16.0 * omega * (gamma * amplitude).powi(2) / (gamma + (kappa_a * kappa_b).sqrt()).powi(4);
    if (x_opt - xi).abs() > ARGMAX_TOL * xi {
        return Err(Error::CrossCheck(format!(
            "weighting optimum {x_opt} differs from sqrt(kappa_a/kappa_b) = {xi}"
        )));
    }
    let energy_ok = if energy_analytic == 0.0 {
        energy_opt == 0.0
    } else {
        ((energy_opt - energy_analytic) / energy_analytic).abs() <= ENERGY_TOL
    };
    if !energy_ok {
        return Err(Error::CrossCheck(format!(
            "optimized energy {energy_opt} differs from closed form {energy_analytic}"
        )));
    }

    // 65 log-spaced points over four decades, centred exactly on x_opt.
    let x_grid: Vec<f64> = (0..65)
        .map(|k| x_opt * 10f64.powf((k as f64 - 32.0) / 16.0))
        .collect();
    let energy_grid = x_grid
        .iter()
        .map(|&x| weighted_stationary_energy(x, gamma, kappa_a, kappa_b, omega, amplitude))
        .collect();

    Ok(OptimizationResult {
        x_opt,
        energy_opt,
        xi,
        energy_analytic,
        x_grid,
        energy_grid,
    })
}

/// The optimized nonreciprocal partner of a reciprocal pair: Γ = 2|J|,
/// optimal weights, J = −iμΓ/2.
pub fn optimized_partner(reciprocal: &SystemConfig) -> Result<SystemConfig> {
    let mut base = *reciprocal;
    base.gamma = 2.0 * reciprocal.coupling.norm();
    base.charger.p = unit_phase(reciprocal.charger.p);
    base.battery.p = unit_phase(reciprocal.battery.p);
    optimal_rescaling(&base)?.apply(&base)
}

/// χ/𝒩 at the k-th minimum of the gap:
/// `8/(r√y + 2)⁴ − 2(e^{−π(2k+1) r (y+1)/sqrt(16 − r²(1−y)²)} + 1)²/(r²y + 4)²`.
pub fn chi(r: f64, y: f64, k: u32) -> f64 {
    let exponent = -PI * (2 * k + 1) as f64 * r * (y + 1.0) / (16.0 - (r * (1.0 - y)).powi(2)).sqrt();
    8.0 / (r * y.sqrt() + 2.0).powi(4)
        - 2.0 * (exponent.exp() + 1.0).powi(2) / (r * r * y + 4.0).powi(2)
}

/// Gap written directly in the dimensionless variables `r = κ_a/|J|`,
/// `y = κ_b/κ_a`, in units of ω (multiply by ω for energy).
pub fn gap_direct(r: f64, y: f64, coupling: f64, amplitude: f64, t: f64) -> f64 {
    let j = coupling;
    let dp = (16.0 * j * j - (r * j * (1.0 - y)).powi(2)).sqrt();
    let decay = r * (y + 1.0) * j;
    let e2 = (-0.5 * t * decay).exp();
    let e1 = (-0.25 * t * decay).exp();
    let q = (r * r * y + 4.0).powi(2);
    let oscillating = 2.0
        * e2
        * (j * j * (8.0 - r * r * (y * y + 1.0)) * (0.5 * dp * t).cos()
            + dp * decay * (0.5 * dp * t).sin())
        / (dp * dp);
    let steady = 4.0 * j * j * (r * r * y + 4.0) * e2 / (dp * dp);
    let slow = 2.0 - 4.0 * e1 * (decay * (0.25 * dp * t).sin() / dp + (0.25 * dp * t).cos());
    8.0 * amplitude * amplitude / (j * j)
        * (8.0 / (r * y.sqrt() + 2.0).powi(4) - (oscillating + steady) / q - slow / q)
}

/// `D_t` for one reciprocal configuration, with its optimized partner
/// prepared once.
#[derive(Debug, Clone)]
pub struct GapFunction {
    pub reciprocal: SystemConfig,
    pub optimized: SystemConfig,
    /// E_opt^nr(∞).
    pub stationary_opt: f64,
    pub r: f64,
    pub y: f64,
    /// Δ₊ = sqrt(16|J|² − (κ_a − κ_b)²).
    pub delta_plus: f64,
}

impl GapFunction {
    pub fn new(reciprocal: &SystemConfig) -> Result<Self> {
        let d = reciprocal.derive();
        if !(d.kappa_a > 0.0 && d.kappa_b > 0.0) {
            return Err(Error::ZeroLocalDamping {
                kappa_a: d.kappa_a,
                kappa_b: d.kappa_b,
            });
        }
        if !d.is_underdamped() {
            return Err(Error::NotUnderdamped {
                coupling: 16.0 * d.coupling.norm_sqr(),
                mismatch: (d.kappa_a - d.kappa_b).powi(2),
            });
        }
        let reciprocal = reciprocal.reciprocal_partner();
        let optimized = optimized_partner(&reciprocal)?;
        let j = d.coupling.norm();
        Ok(Self {
            reciprocal,
            optimized,
            stationary_opt: stationary_battery_nr(&optimized)?,
            r: d.kappa_a / j,
            y: d.kappa_b / d.kappa_a,
            delta_plus: d.delta_cap.im,
        })
    }

    /// 𝒩 = 8ωℰ²/|J|².
    pub fn scale(&self) -> f64 {
        8.0 * self.reciprocal.omega() * self.reciprocal.drive.amplitude.powi(2)
            / self.reciprocal.coupling.norm_sqr()
    }

    /// t* = (2k+1) 4π/Δ₊.
    pub fn minimum_time(&self, k: u32) -> f64 {
        (2 * k + 1) as f64 * 4.0 * PI / self.delta_plus
    }

    /// Period of the slow oscillation, 8π/Δ₊.
    pub fn period(&self) -> f64 {
        8.0 * PI / self.delta_plus
    }

    pub fn closed_form(&self, t: f64) -> Result<f64> {
        Ok(self.stationary_opt - energy_battery_reciprocal(&self.reciprocal, t)?)
    }

    pub fn direct(&self, t: f64) -> f64 {
        self.reciprocal.omega()
            * gap_direct(
                self.r,
                self.y,
                self.reciprocal.coupling.norm(),
                self.reciprocal.drive.amplitude,
                t,
            )
    }

    /// D_t from the closed-form energies, cross-checked against
    /// [`direct`](Self::direct).
    pub fn at(&self, t: f64) -> Result<f64> {
        let value = self.closed_form(t)?;
        let direct = self.direct(t);
        let scale = self.stationary_opt.max(value.abs());
        if (value - direct).abs() > GAP_TOL * scale {
            return Err(Error::CrossCheck(format!(
                "gap at t = {t}: closed forms give {value}, direct expression {direct}"
            )));
        }
        Ok(value)
    }

    /// 𝒩 χ(r, y; k).
    pub fn chi_bound(&self, k: u32) -> f64 {
        self.scale() * chi(self.r, self.y, k)
    }
}

pub fn gap(reciprocal: &SystemConfig, t: f64) -> Result<f64> {
    GapFunction::new(reciprocal)?.at(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageScan {
    pub r_grid: Vec<f64>,
    pub y_grid: Vec<f64>,
    /// `chi_values[i][j]` = χ(r_grid[i], y_grid[j]; 0) / 𝒩.
    pub chi_values: Vec<Vec<f64>>,
    /// Minimum of χ over points with r > 0.
    pub min_gap: f64,
    pub argmin: (f64, f64),
    /// Points with r > 0 and χ ≤ 0.
    pub violation_points: Vec<(f64, f64)>,
    /// Points with r = 0, where χ vanishes identically.
    pub boundary_points: Vec<(f64, f64)>,
    /// Whether the y range lies inside the claimed region y < 0.22.
    pub certified: bool,
}

impl AdvantageScan {
    pub fn table(&self) -> Table {
        let mut r = Vec::new();
        let mut y = Vec::new();
        let mut c = Vec::new();
        for (i, &ri) in self.r_grid.iter().enumerate() {
            for (j, &yj) in self.y_grid.iter().enumerate() {
                r.push(ri);
                y.push(yj);
                c.push(self.chi_values[i][j]);
            }
        }
        let mut t = Table::new();
        t.push_dense("r", &r);
        t.push_dense("y", &y);
        t.push_dense("chi", &c);
        t
    }

    pub fn summary(&self) -> serde_json::Value {
        let pairs = |v: &[(f64, f64)]| v.iter().map(|&(r, y)| json!([r, y])).collect::<Vec<_>>();
        json!({
            "min_gap": self.min_gap,
            "argmin_r": self.argmin.0,
            "argmin_y": self.argmin.1,
            "violations": pairs(&self.violation_points),
            "boundary_points": self.boundary_points.len(),
            "certified": self.certified,
            "r_points": self.r_grid.len(),
            "y_points": self.y_grid.len(),
            "y_max": self.y_grid.last().copied().unwrap_or(0.0),
        })
    }
}

/// χ(r, y; 0) on `r ∈ [0, 1]` × `y ∈ [0, y_max]`. `y_max ≥ 0.22` is allowed
/// but the result is flagged as uncertified.
pub fn advantage_region_scan(r_points: usize, y_points: usize, y_max: f64) -> Result<AdvantageScan> {
    if r_points < 2 || y_points < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points per axis, got {r_points}x{y_points}"
        )));
    }
    if !(0.0..1.0).contains(&y_max) {
        return Err(Error::InvalidGrid(format!("y_max = {y_max} outside [0, 1)")));
    }
    let r_grid = linspace(0.0, 1.0, r_points);
    let y_grid = linspace(0.0, y_max, y_points);
    let chi_values: Vec<Vec<f64>> = r_grid
        .iter()
        .map(|&r| y_grid.iter().map(|&y| chi(r, y, 0)).collect())
        .collect();

    let mut min_gap = f64::INFINITY;
    let mut argmin = (f64::NAN, f64::NAN);
    let mut violation_points = Vec::new();
    let mut boundary_points = Vec::new();
    for (i, &r) in r_grid.iter().enumerate() {
        for (j, &y) in y_grid.iter().enumerate() {
            let v = chi_values[i][j];
            if r == 0.0 {
                boundary_points.push((r, y));
                continue;
            }
            if v < min_gap {
                min_gap = v;
                argmin = (r, y);
            }
            if v <= 0.0 || v.is_nan() {
                violation_points.push((r, y));
            }
        }
    }

    Ok(AdvantageScan {
        r_grid,
        y_grid,
        chi_values,
        min_gap,
        argmin,
        violation_points,
        boundary_points,
        certified: y_max < CERTIFIED_Y_MAX,
    })
}

/// Smallest y at which min over r ∈ (0, 1] of χ(r, y; 0) reaches zero, by
/// bisection on `[0, y_hi]`. `None` if χ stays positive up to `y_hi`.
pub fn empirical_y_boundary(r_points: usize, y_hi: f64, tol: f64) -> Option<f64> {
    let rs: Vec<f64> = linspace(0.0, 1.0, r_points.max(2)).into_iter().skip(1).collect();
    let worst = |y: f64| rs.iter().map(|&r| chi(r, y, 0)).fold(f64::INFINITY, f64::min);
    if worst(y_hi) > 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (0.0, y_hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if worst(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{DriveParams, ModeParams};

    fn pair(kappa_a: f64, kappa_b: f64, coupling: f64, gamma: f64) -> SystemConfig {
        SystemConfig {
            charger: ModeParams::new(1.0, kappa_a, Complex64::new(1.0, 0.0)),
            battery: ModeParams::new(1.0, kappa_b, Complex64::new(1.0, 0.0)),
            coupling: Complex64::new(coupling, 0.0),
            gamma,
            drive: DriveParams {
                amplitude: 0.1,
                omega_l: 1.0,
            },
        }
    }

    #[test]
    fn figure_five_weighting() {
        let c = pair(0.05, 0.01, 0.2, 0.4);
        let opt = optimal_rescaling(&c).unwrap();
        assert!((opt.x_opt - 5f64.sqrt()).abs() < 1e-6 * 5f64.sqrt());
        let (pa, pb) = opt.weights(&c);
        assert!((pa.re - 5f64.powf(0.25)).abs() < 1e-6);
        assert!((pb.re - 5f64.powf(-0.25)).abs() < 1e-6);
        let per_drive = 64.0 * 0.04 / (0.4 + 0.0005f64.sqrt()).powi(4);
        assert!(((opt.energy_opt / 0.01) - per_drive).abs() < 1e-9 * per_drive);
    }

    #[test]
    fn symmetric_needs_no_rescaling() {
        let opt = optimal_rescaling(&pair(0.02, 0.02, 0.0, 0.1)).unwrap();
        assert!((opt.x_opt - 1.0).abs() < 1e-6);
    }

    #[test]
    fn grid_never_beats_optimum() {
        let opt = optimal_rescaling(&pair(0.3, 0.001, 0.0, 0.05)).unwrap();
        assert!(opt.energy_grid.iter().all(|&e| e <= opt.energy_opt));
        assert!(opt.x_opt > 0.0);
        assert_eq!(opt.x_grid[32], opt.x_opt);
    }

    #[test]
    fn optimizer_errors() {
        assert!(matches!(
            optimal_rescaling(&pair(0.0, 0.01, 0.0, 0.1)),
            Err(Error::ZeroLocalDamping { .. })
        ));
        assert!(matches!(
            optimal_rescaling(&pair(0.01, 0.01, 0.0, 0.0)),
            Err(Error::ZeroSharedCoupling)
        ));
    }

    #[test]
    fn applied_weights_are_nonreciprocal() {
        let c = pair(0.05, 0.01, 0.0, 0.4);
        let opt = optimal_rescaling(&c).unwrap();
        let applied = opt.apply(&c).unwrap();
        assert!(applied.is_nonreciprocal());
        let d = applied.derive();
        assert!((d.gamma_a - opt.x_opt * 0.4).abs() < 1e-14);
        assert!((d.gamma_b - 0.4 / opt.x_opt).abs() < 1e-14);
        let e = stationary_battery_nr(&applied).unwrap();
        assert!((e - opt.energy_opt).abs() < 1e-12 * e);
    }

    #[test]
    fn chi_values() {
        for y in [0.0, 0.1, 0.5] {
            assert_eq!(chi(0.0, y, 0), 0.0);
        }
        // r = 1, y = 0: 1/2 − (e^{−π/√15} + 1)²/8
        let expected = 0.5 - (f64::exp(-PI / 15f64.sqrt()) + 1.0).powi(2) / 8.0;
        assert!((chi(1.0, 0.0, 0) - expected).abs() < 1e-15);
        assert!((expected - 0.239_233_7).abs() < 1e-7);
        let limit = |r: f64, y: f64| 8.0 / (r * y.sqrt() + 2.0).powi(4) - 2.0 / (r * r * y + 4.0).powi(2);
        assert!((chi(0.7, 0.1, 400) - limit(0.7, 0.1)).abs() < 1e-12);
        assert!(limit(0.7, 0.1) >= 0.0);
    }

    #[test]
    fn chi_increases_with_k() {
        for &(r, y) in &[(0.2, 0.05), (1.0, 0.21), (0.6, 0.5)] {
            let mut prev = chi(r, y, 0);
            for k in 1..20 {
                let v = chi(r, y, k);
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn gap_matches_chi_at_minima() {
        let c = pair(1.0, 0.21, 1.0, 0.0).with_drive_amplitude(1.0);
        let g = GapFunction::new(&c).unwrap();
        assert!(g.at(0.0).unwrap() > 0.0);
        for k in 0..5 {
            let t = g.minimum_time(k);
            let d = g.at(t).unwrap();
            assert!((d - g.chi_bound(k)).abs() <= 1e-9 * g.scale());
        }
        assert!(g.chi_bound(0) > 0.0);
    }

    #[test]
    fn gap_requires_underdamping() {
        let c = pair(0.1, 0.003, 0.005, 0.0);
        assert!(matches!(gap(&c, 1.0), Err(Error::NotUnderdamped { .. })));
    }

    #[test]
    fn scan_small_grid_classification() {
        let s = advantage_region_scan(2, 2, 0.21).unwrap();
        assert_eq!(s.boundary_points, vec![(0.0, 0.0), (0.0, 0.21)]);
        assert!(s.violation_points.is_empty());
        assert!(s.min_gap > 0.0);
        assert!(s.certified);
        assert_eq!(s.table().rows(), 4);
    }

    #[test]
    fn scan_rejects_bad_grids() {
        assert!(advantage_region_scan(1, 5, 0.2).is_err());
        assert!(advantage_region_scan(5, 5, 1.0).is_err());
    }

    #[test]
    fn exploratory_scan_finds_sign_change() {
        let s = advantage_region_scan(101, 51, 0.5).unwrap();
        assert!(!s.certified);
        assert!(!s.violation_points.is_empty());
        let edge = empirical_y_boundary(101, 0.5, 1e-9).unwrap();
        assert!(edge > CERTIFIED_Y_MAX && edge < 0.24, "edge = {edge}");
        assert!(s.violation_points.iter().all(|&(_, y)| y >= edge - 1e-6));
    }
}
