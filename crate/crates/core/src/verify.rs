//! Closed-form curves against the moment integrator.
//!
//! Each closed-form variant is sampled on an evenly spaced grid over
//! `[0, 20/min(Λ_a, Λ_b, κ_a+κ_b)]`. The integrator runs with a whole number
//! of steps between grid points, so the comparison needs no interpolation.
//! The error measure is `|closed − numeric| / (1 + |closed|)`.

use serde::Serialize;

use crate::closedform::{EnergyCurveSpec, Variant};
use crate::error::{Error, Result};
use crate::moments::{integrate, MomentState, Trajectory};
use crate::params::SystemConfig;

pub const TOLERANCE: f64 = 1e-6;
pub const DEFAULT_POINTS: usize = 1000;
/// Target for `dt · max(Λ_a, Λ_b, 4|J|, 4|δ|)`.
pub const DEFAULT_STEP_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantReport {
    pub variant: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_relative_error: Option<f64>,
    /// Time of the worst error.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_t: Option<f64>,
    pub grid_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub t_end: f64,
    pub dt: f64,
    pub variants: Vec<VariantReport>,
}

impl VerifyReport {
    /// True when nothing failed (skipped variants do not count).
    pub fn passed(&self) -> bool {
        self.variants.iter().all(|v| v.status != Status::Fail)
    }

    pub fn get(&self, variant: Variant) -> Option<&VariantReport> {
        self.variants.iter().find(|v| v.variant == variant.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub points: usize,
    pub step_fraction: f64,
    /// Overrides the default horizon.
    pub t_end: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            points: DEFAULT_POINTS,
            step_fraction: DEFAULT_STEP_FRACTION,
            t_end: None,
        }
    }
}

/// 20/min(Λ_a, Λ_b, κ_a+κ_b), ignoring vanishing rates.
pub fn default_horizon(config: &SystemConfig) -> f64 {
    let d = config.derive();
    let slowest = [d.lambda_a, d.lambda_b, d.kappa_ab]
        .into_iter()
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    if slowest.is_finite() {
        20.0 / slowest
    } else {
        1.0
    }
}

fn fastest_rate(config: &SystemConfig) -> f64 {
    let d = config.derive();
    d.lambda_a
        .max(d.lambda_b)
        .max(4.0 * d.coupling.norm())
        .max(4.0 * d.delta.abs())
}

/// Integrates `config` from vacuum so that grid point `k` of `points` on
/// `[0, t_end]` is step `k · stride`. Returns the trajectory and the stride.
pub fn integrate_on_grid(
    config: &SystemConfig,
    t_end: f64,
    points: usize,
    step_fraction: f64,
) -> Result<(Trajectory, usize)> {
    let intervals = points.saturating_sub(1).max(1);
    let spacing = t_end / intervals as f64;
    let rate = fastest_rate(config);
    let stride = if rate > 0.0 {
        (spacing * rate / step_fraction).ceil().max(1.0) as usize
    } else {
        1
    };
    let steps = intervals * stride;
    let traj = integrate(config, MomentState::vacuum(), t_end, t_end / steps as f64)?;
    Ok((traj, stride))
}

fn compare(
    spec: &EnergyCurveSpec,
    traj: &Trajectory,
    stride: usize,
    points: usize,
) -> Result<(f64, f64)> {
    let mut worst = (0.0, 0.0);
    for k in 0..points {
        let i = k * stride;
        let t = traj.times[i];
        let closed = spec.evaluate(t)?;
        let numeric = if spec.variant.is_charger() {
            traj.energy_a[i]
        } else {
            traj.energy_b[i]
        };
        let err = (closed - numeric).abs() / (1.0 + closed.abs());
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(err <= worst.0) {
            worst = (err, t);
        }
    }
    Ok(worst)
}

fn skipped(variant: Variant, reason: String) -> VariantReport {
    VariantReport {
        variant: variant.name(),
        status: Status::Skipped,
        max_relative_error: None,
        worst_t: None,
        grid_size: 0,
        reason: Some(reason),
    }
}

/// Runs every closed-form variant that applies to `config`. Nonreciprocal
/// variants need Γ > 0 and J = −iμΓ/2; the reciprocal variant is checked
/// on the same pair with Γ = 0.
pub fn verify(config: &SystemConfig, options: VerifyOptions) -> Result<VerifyReport> {
    if options.points < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 time points, got {}",
            options.points
        )));
    }
    let t_end = options.t_end.unwrap_or_else(|| default_horizon(config));
    let reciprocal = config.reciprocal_partner();

    let mut nonrec_run: Option<(Trajectory, usize)> = None;
    let mut rec_run: Option<(Trajectory, usize)> = None;
    let mut dt = 0.0;
    let mut variants = Vec::new();

    for variant in Variant::ALL {
        let target = if variant == Variant::Reciprocal {
            reciprocal
        } else {
            if config.gamma == 0.0 {
                variants.push(skipped(variant, "shared reservoir rate is zero".into()));
                continue;
            }
            *config
        };
        let spec = match EnergyCurveSpec::new(target, variant) {
            Ok(s) => s,
            Err(e) => {
                variants.push(skipped(variant, e.to_string()));
                continue;
            }
        };
        let run = if variant == Variant::Reciprocal {
            &mut rec_run
        } else {
            &mut nonrec_run
        };
        if run.is_none() {
            *run = Some(integrate_on_grid(
                &target,
                t_end,
                options.points,
                options.step_fraction,
            )?);
        }
        let (traj, stride) = run.as_ref().expect("filled above");
        dt = f64::max(dt, traj.times[1] - traj.times[0]);
        let (err, worst_t) = compare(&spec, traj, *stride, options.points)?;
        variants.push(VariantReport {
            variant: variant.name(),
            status: if err <= TOLERANCE {
                Status::Pass
            } else {
                Status::Fail
            },
            max_relative_error: Some(err),
            worst_t: Some(worst_t),
            grid_size: options.points,
            reason: None,
        });
    }

    Ok(VerifyReport {
        tolerance: TOLERANCE,
        t_end,
        dt,
        variants,
    })
}
