//! Acceptance checks. Runs without the libtest harness and prints one line
//! per criterion; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::SVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nrbattery::analysis::{advantage_region_scan, optimal_rescaling, GapFunction};
use nrbattery::closedform::{
    energy_battery_nr, energy_charger_nr, eta_ab, eta_ab_stationary, eta_bb_opt_stationary,
    eta_bb_stationary, stationary_battery_nr, stationary_charger_nr,
};
use nrbattery::figures::preset;
use nrbattery::moments::{drift_system, integrate, steady_state, MomentState};
use nrbattery::verify::{verify, Status, VerifyOptions};
use nrbattery::{DriveParams, ModeParams, SystemConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn pair(kappa_a: f64, kappa_b: f64, coupling: Complex64, gamma: f64, amplitude: f64) -> SystemConfig {
    SystemConfig {
        charger: ModeParams::new(1.0, kappa_a, Complex64::new(1.0, 0.0)),
        battery: ModeParams::new(1.0, kappa_b, Complex64::new(1.0, 0.0)),
        coupling,
        gamma,
        drive: DriveParams {
            amplitude,
            omega_l: 1.0,
        },
    }
}

/// Every figure's nonreciprocal set plus the optimized sets of figs 4 and 5.
fn figure_configs() -> Vec<(String, SystemConfig)> {
    let mut out = Vec::new();
    for id in ["fig2", "fig3", "fig4", "fig5"] {
        let c = preset(id).unwrap();
        out.push((id.to_string(), c));
        if id == "fig4" || id == "fig5" {
            let opt = optimal_rescaling(&c).unwrap().apply(&c).unwrap();
            out.push((format!("{id}-opt"), opt));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, c) in figure_configs() {
        let report = match verify(&c, VerifyOptions::default()) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("{name}: {e}")),
        };
        for v in &report.variants {
            if v.status == Status::Skipped {
                continue;
            }
            checked += 1;
            let err = v.max_relative_error.unwrap();
            worst = worst.max(err);
            if v.status == Status::Fail || v.grid_size != 1000 {
                failures.push(format!("{name}/{} {err:.2e}", v.variant));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && secs < 5.0 && checked > 0;
    outcome(
        pass,
        format!(
            "{checked} curves, max rel err {worst:.2e} (tol 1e-6), {secs:.2}s (limit 5s){}",
            if failures.is_empty() { String::new() } else { format!(", failed: {}", failures.join("; ")) }
        ),
    )
}

fn criterion_2() -> Outcome {
    let base = preset("fig2").unwrap();
    let t_end = 300.0;
    let dt = 0.05;
    let reference = integrate(&base, MomentState::vacuum(), t_end, dt).unwrap();

    let mut stiffer = base;
    stiffer.battery.kappa *= 10.0;
    let displaced = MomentState::coherent(Complex64::new(0.0, 0.0), Complex64::new(3.0, -2.0));
    let variants = [
        ("kappa_b x10", integrate(&stiffer, MomentState::vacuum(), t_end, dt).unwrap()),
        ("battery displaced", integrate(&base, displaced, t_end, dt).unwrap()),
    ];
    let mut worst = 0.0f64;
    for (_, traj) in &variants {
        for (s, r) in traj.states.iter().zip(&reference.states) {
            worst = worst
                .max((s.mean_a - r.mean_a).norm())
                .max((s.n_a - r.n_a).abs());
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max charger deviation {worst:.2e} over {} steps (tol 1e-12)", reference.len()),
    )
}

fn criterion_3() -> Outcome {
    let c = preset("fig2").unwrap();
    let d = c.derive();
    let lambda = d.lambda_a;
    let c_d = 4.0 * c.gamma * c.gamma / (lambda * lambda);
    let eta_exact = eta_ab_stationary(&c).unwrap();
    let eta_late = eta_ab(&c, 1e9 / lambda).unwrap();

    let e_b = stationary_battery_nr(&c).unwrap();
    let e_a = stationary_charger_nr(&c).unwrap();
    let t_end = 2000.0;
    let traj = integrate(&c, MomentState::vacuum(), t_end, 0.1).unwrap();
    let last = traj.len() - 1;
    let num_b = traj.energy_b[last];
    let num_a = traj.energy_a[last];
    let cf_b = energy_battery_nr(&c, t_end).unwrap();
    let cf_a = energy_charger_nr(&c, t_end).unwrap();
    let fixed = steady_state(&c).unwrap();

    let pass = rel(eta_exact, c_d) <= 1e-6
        && rel(eta_late, c_d) <= 1e-6
        && (c_d - 3.4613).abs() < 5e-5
        && (e_b - 74.88).abs() < 5e-3
        && (e_a - 21.63).abs() < 5e-3
        && rel(num_b, cf_b) <= 1e-6
        && rel(num_a, cf_a) <= 1e-6
        && rel(fixed.n_b, e_b) <= 1e-9
        && rel(fixed.n_a, e_a) <= 1e-9;
    outcome(
        pass,
        format!(
            "C_d = {c_d:.6}, eta_AB(inf) = {eta_exact:.6}; E_B = {e_b:.4} (numeric {num_b:.4}), E_A = {e_a:.4} (numeric {num_a:.4})"
        ),
    )
}

fn criterion_4() -> Outcome {
    let fig3 = preset("fig3").unwrap().reciprocal_partner().derive().delta_cap;
    let fig4 = preset("fig4").unwrap().reciprocal_partner().derive().delta_cap;
    let fig4_formula = (0.097f64 * 0.097 - 16.0 * 0.005 * 0.005).sqrt();
    let pass = (fig3 - Complex64::new(0.0, 0.08)).norm() <= 1e-12
        && (fig4 - Complex64::new(fig4_formula, 0.0)).norm() <= 1e-12
        && (fig4.re - 0.09492).abs() < 5e-6;
    outcome(pass, format!("fig3 Delta = {fig3:.15}, fig4 Delta = {fig4:.15}"))
}

fn criterion_5() -> Outcome {
    let mut values = Vec::new();
    for coop in [1e4, 1e-4] {
        values.push((format!("eta_BB(C={coop:e}, xi=1)"), eta_bb_stationary(coop, 1.0)));
        for xi in [1.0, 2.0, 5.0] {
            // optimal weighting with Gamma = 2|J| at the given xi and C
            let kappa_b = 0.01;
            let kappa_a = xi * xi * kappa_b;
            let j = (coop * kappa_a * kappa_b / 4.0).sqrt();
            let c = pair(kappa_a, kappa_b, Complex64::new(0.0, 0.0), 2.0 * j, 0.1)
                .make_nonreciprocal()
                .unwrap();
            let opt = optimal_rescaling(&c).unwrap().apply(&c).unwrap();
            let rec = pair(kappa_a, kappa_b, Complex64::new(j, 0.0), 0.0, 0.1);
            let e_rec = nrbattery::closedform::stationary_battery_reciprocal(&rec).unwrap();
            let numeric = stationary_battery_nr(&opt).unwrap() / e_rec;
            let formula = eta_bb_opt_stationary(coop);
            values.push((format!("eta_opt(C={coop:e}, xi={xi})"), numeric));
            if rel(numeric, formula) > 1e-9 {
                return outcome(false, format!("optimized ratio {numeric} != formula {formula}"));
            }
        }
    }
    let bad: Vec<String> = values
        .iter()
        .filter(|(_, v)| !(3.92..=4.0).contains(v))
        .map(|(n, v)| format!("{n} = {v:.4}"))
        .collect();
    let detail = if bad.is_empty() {
        format!("{} ratios in [3.92, 4]", values.len())
    } else {
        format!("outside [3.92, 4]: {}", bad.join(", "))
    };
    outcome(bad.is_empty(), detail)
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_x = 0.0f64;
    let mut worst_e = 0.0f64;
    for _ in 0..100 {
        let kappa_a = rng.gen_range(1e-3..=1.0);
        let kappa_b = rng.gen_range(1e-3..=1.0);
        let gamma = rng.gen_range(1e-3..=1.0);
        let amplitude = rng.gen_range(1e-2..=1.0);
        let c = pair(kappa_a, kappa_b, Complex64::new(0.0, 0.0), gamma, amplitude);
        let r = match optimal_rescaling(&c) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("kappa = ({kappa_a}, {kappa_b}): {e}")),
        };
        let xi = (kappa_a / kappa_b).sqrt();
        let b6 = 16.0 * (gamma * amplitude).powi(2) / (gamma + (kappa_a * kappa_b).sqrt()).powi(4);
        worst_x = worst_x.max(rel(r.x_opt, xi));
        worst_e = worst_e.max(rel(r.energy_opt, b6));
    }
    let fig5 = preset("fig5").unwrap();
    let (p_a, p_b) = optimal_rescaling(&fig5).unwrap().weights(&fig5);
    let pa_err = (p_a - Complex64::new(5f64.powf(0.25), 0.0)).norm();
    let pb_err = (p_b - Complex64::new(5f64.powf(-0.25), 0.0)).norm();
    outcome(
        worst_x <= 1e-6 && worst_e <= 1e-9 && pa_err <= 1e-6 && pb_err <= 1e-6,
        format!(
            "100 pairs: max x_opt rel err {worst_x:.2e} (tol 1e-6), max energy rel err {worst_e:.2e} (tol 1e-9); fig5 p_a = {:.9}",
            p_a.re
        ),
    )
}

fn criterion_7() -> Outcome {
    let c = preset("fig2").unwrap();
    let resonant = stationary_battery_nr(&c).unwrap();
    let resonant_fixed = steady_state(&c).unwrap().n_b;
    let mut worst_ratio = 0.0f64;
    let mut ok = rel(resonant_fixed, resonant) < 1e-9;
    for delta in [0.001, 0.01, 0.05, 0.1] {
        for sign in [1.0, -1.0] {
            let detuned = c.with_detuning(sign * delta);
            let e = stationary_battery_nr(&detuned).unwrap();
            let e_fixed = steady_state(&detuned).unwrap().n_b;
            ok &= e < resonant && e_fixed < resonant_fixed && rel(e_fixed, e) < 1e-9;
            worst_ratio = worst_ratio.max(e / resonant);
        }
    }
    outcome(
        ok,
        format!("resonant {resonant:.4}; largest detuned/resonant ratio {worst_ratio:.6}"),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let scan = advantage_region_scan(101, 22, 0.21).unwrap();
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !scan.violation_points.is_empty() || !(scan.min_gap > 0.0) {
        return outcome(false, format!("scan violations: {:?}", scan.violation_points));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut misplaced = Vec::new();
    let mut below = 0usize;
    let mut global = true;
    let mut minima = 0usize;
    for _ in 0..50 {
        let r = rng.gen_range(0.0..=1.0f64).max(1e-3);
        let y = rng.gen_range(1e-3..0.22);
        let c = pair(r, r * y, Complex64::new(1.0, 0.0), 0.0, 1.0);
        let g = match GapFunction::new(&c) {
            Ok(g) => g,
            Err(e) => return outcome(false, format!("(r, y) = ({r}, {y}): {e}")),
        };
        let n = 10_000;
        let horizon = 5.0 * g.period();
        let h = horizon / n as f64;
        let mut values = Vec::with_capacity(n + 1);
        for i in 0..=n {
            match g.at(h * i as f64) {
                Ok(v) => values.push(v),
                Err(e) => return outcome(false, format!("(r, y) = ({r}, {y}): {e}")),
            }
        }
        let bound = g.chi_bound(0);
        let slack = 1e-9 * g.scale();
        below += values[1..].iter().filter(|&&v| v < bound - slack).count();
        for i in 1..n {
            if values[i] < values[i - 1] && values[i] <= values[i + 1] {
                minima += 1;
                let t = h * i as f64;
                let k = ((t / g.minimum_time(0) - 1.0) / 2.0).round().max(0.0) as u32;
                if (t - g.minimum_time(k)).abs() > h {
                    misplaced.push(format!("(r={r:.3}, y={y:.3}) t={t:.4}"));
                }
            }
        }
        let d0 = g.at(g.minimum_time(0)).unwrap();
        for k in 1..=10 {
            global &= d0 <= g.at(g.minimum_time(k)).unwrap() + slack;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = misplaced.is_empty() && below == 0 && global && minima > 0 && secs < 30.0;
    outcome(
        pass,
        format!(
            "min chi {:.4e} at (r, y) = ({:.2}, {:.2}); {minima} minima found, {} misplaced; {below} samples below bound; {secs:.2}s (limit 30s)",
            scan.min_gap,
            scan.argmin.0,
            scan.argmin.1,
            misplaced.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    // dt * fastest rate; RK4 truncation is the only source of deviation
    let step_fraction = 0.01;
    let mut worst = 0.0f64;
    let mut steps = 0usize;
    let mut configs = figure_configs();
    for id in ["fig3", "fig4", "fig5"] {
        configs.push((format!("{id}-rec"), preset(id).unwrap().reciprocal_partner()));
    }
    for (_, c) in &configs {
        let t_end = nrbattery::verify::default_horizon(c);
        let (traj, _) = nrbattery::verify::integrate_on_grid(c, t_end, 1000, step_fraction).unwrap();
        steps += traj.len();
        for s in &traj.states {
            worst = worst.max(s.factorization_error());
        }
    }
    outcome(
        worst <= 1e-9,
        format!(
            "{} trajectories, {steps} states at dt*rate = {step_fraction}, max factorization error {worst:.2e} (tol 1e-9)",
            configs.len()
        ),
    )
}

/// Largest deviation of an RK4 run from the exact affine solution.
fn integration_error(c: &SystemConfig, t_end: f64, dt: f64) -> f64 {
    let (m, _) = drift_system(&c.derive(), &c.drive);
    let fixed: SVector<f64, 8> = steady_state(c).unwrap().to_vector();
    let traj = integrate(c, MomentState::vacuum(), t_end, dt).unwrap();
    let mut worst = 0.0f64;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let exact = fixed + (m * *t).exp() * (-fixed);
        worst = worst.max((s.to_vector() - exact).amax());
    }
    worst
}

fn criterion_10() -> Outcome {
    let mut ratios = Vec::new();
    for id in ["fig2", "fig4", "fig5"] {
        let c = preset(id).unwrap();
        let fast = c.derive().lambda_a.max(c.derive().lambda_b).max(4.0 * c.coupling.norm());
        let dt = 0.2 / fast;
        let t_end = 200.0 * dt;
        let coarse = integration_error(&c, t_end, dt);
        let fine = integration_error(&c, t_end, dt / 2.0);
        ratios.push((id, coarse / fine));
    }
    let pass = ratios.iter().all(|(_, r)| (12.0..=20.0).contains(r));
    let text: Vec<String> = ratios.iter().map(|(id, r)| format!("{id} {r:.2}")).collect();
    outcome(pass, format!("error ratio on halving dt: {} (band [12, 20])", text.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed form vs integrator", criterion_1),
        ("unidirectionality", criterion_2),
        ("stationary ratio C_d", criterion_3),
        ("discriminant values", criterion_4),
        ("fourfold enhancement limit", criterion_5),
        ("weighting optimum", criterion_6),
        ("resonance optimality", criterion_7),
        ("advantage certification", criterion_8),
        ("coherent-state factorization", criterion_9),
        ("RK4 convergence order", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
