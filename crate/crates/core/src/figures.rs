//! Built-in parameter sets and the data behind each figure panel.
//!
//! Every panel is a [`Table`]. Times run over `[0, 20/min(Λ_a, Λ_b, κ_a+κ_b)]`
//! with 1001 samples, and a `Jt` column is included for the scaled time axis.
//! Ratios are left empty at `t = 0`, where both energies vanish.

use std::fs;
use std::io;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::analysis::{advantage_region_scan, optimal_rescaling};
use crate::closedform::{
    energy_battery_nr, energy_battery_reciprocal, energy_charger_nr, eta_ab, eta_bb_opt_stationary,
    eta_bb_stationary,
};
use crate::error::{Error, Result};
use crate::export::{linspace, logspace, Table};
use crate::params::{ConfigFile, DriveParams, ModeParams, SystemConfig};
use crate::verify::default_horizon;

pub const FIGURE_IDS: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "chi"];
pub const TIME_POINTS: usize = 1001;
pub const CHI_GRID: (usize, usize, f64) = (101, 22, 0.21);

/// Symmetric weights p_a = p_b = 1, resonant drive, J = −iμΓ/2.
fn nonreciprocal(kappa_a: f64, kappa_b: f64, gamma: f64, amplitude: f64) -> SystemConfig {
    SystemConfig {
        charger: ModeParams::new(1.0, kappa_a, Complex64::new(1.0, 0.0)),
        battery: ModeParams::new(1.0, kappa_b, Complex64::new(1.0, 0.0)),
        coupling: Complex64::new(0.0, 0.0),
        gamma,
        drive: DriveParams {
            amplitude,
            omega_l: 1.0,
        },
    }
    .make_nonreciprocal()
    .expect("presets have a shared reservoir")
}

/// Nonreciprocal configuration of a figure, or `None` for unknown ids and
/// for `chi`, which has no physical configuration.
pub fn preset(id: &str) -> Option<SystemConfig> {
    match id {
        "fig2" | "fig3" => Some(nonreciprocal(0.003, 0.003, 0.04, 0.1)),
        "fig4" => Some(nonreciprocal(0.1, 0.003, 0.01, 0.1)),
        "fig5" => Some(nonreciprocal(0.05, 0.01, 0.4, 0.1)),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct FigureData {
    pub id: String,
    pub panels: Vec<(String, Table)>,
    pub manifest: Value,
}

impl FigureData {
    /// Writes `<id>_<panel>.csv` per panel and `<id>_manifest.json`.
    pub fn write_to(&self, dir: &Path) -> io::Result<Vec<String>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (panel, table) in &self.panels {
            let name = format!("{}_{}.csv", self.id, panel);
            fs::write(dir.join(&name), table.to_csv_string())?;
            written.push(name);
        }
        let name = format!("{}_manifest.json", self.id);
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest is plain json");
        fs::write(dir.join(&name), text + "\n")?;
        written.push(name);
        Ok(written)
    }

    pub fn panel(&self, name: &str) -> Option<&Table> {
        self.panels.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

fn config_json(config: &SystemConfig) -> Value {
    serde_json::to_value(ConfigFile::from(config)).expect("config serializes")
}

fn time_grid(config: &SystemConfig) -> (f64, Vec<f64>) {
    let t_end = default_horizon(config);
    (t_end, linspace(0.0, t_end, TIME_POINTS))
}

fn column(times: &[f64], f: impl Fn(f64) -> Result<f64>) -> Vec<Option<f64>> {
    times.iter().map(|&t| f(t).ok()).collect()
}

fn ratio(num: &[Option<f64>], den: &[Option<f64>]) -> Vec<Option<f64>> {
    num.iter()
        .zip(den)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) if *b != 0.0 => Some(a / b),
            _ => None,
        })
        .collect()
}

fn time_columns(table: &mut Table, config: &SystemConfig, times: &[f64]) {
    let j = config.coupling.norm();
    table.push_dense("t", times);
    table.push_dense("Jt", &times.iter().map(|t| j * t).collect::<Vec<_>>());
}

fn manifest(id: &str, t_end: Option<f64>, configs: Value, notes: &[&str]) -> Value {
    let mut m = json!({
        "figure": id,
        "configs": configs,
        "notes": notes,
    });
    if let Some(t_end) = t_end {
        m["t_end"] = json!(t_end);
        m["time_points"] = json!(TIME_POINTS);
    }
    m
}

trait With {
    fn with(self, key: &str, value: Value) -> Self;
}

impl With for Value {
    fn with(mut self, key: &str, value: Value) -> Self {
        self[key] = value;
        self
    }
}

fn fig2() -> Result<FigureData> {
    let c = preset("fig2").expect("known id");
    let (t_end, times) = time_grid(&c);
    let mut a = Table::new();
    time_columns(&mut a, &c, &times);
    a.push_column("E_A_nr", column(&times, |t| energy_charger_nr(&c, t)));
    a.push_column("E_B_nr", column(&times, |t| energy_battery_nr(&c, t)));
    let mut b = Table::new();
    time_columns(&mut b, &c, &times);
    b.push_column("eta_AB", column(&times, |t| eta_ab(&c, t)));
    let d = c.derive();
    Ok(FigureData {
        id: "fig2".into(),
        panels: vec![("a".into(), a), ("b".into(), b)],
        manifest: manifest(
            "fig2",
            Some(t_end),
            json!({ "nonreciprocal": config_json(&c) }),
            &["J = -i mu Gamma/2 with |J| = Gamma/2", "horizon not given in the caption"],
        )
        .with("coop_dissipative", json!(d.coop_dissipative)),
    })
}

fn fig3() -> Result<FigureData> {
    let c = preset("fig3").expect("known id");
    let rec = c.reciprocal_partner();
    let (t_end, times) = time_grid(&c);
    let e_rec = column(&times, |t| energy_battery_reciprocal(&rec, t));
    let e_nr = column(&times, |t| energy_battery_nr(&c, t));
    let mut a = Table::new();
    time_columns(&mut a, &c, &times);
    a.push_column("E_B_rec", e_rec.clone());
    a.push_column("E_B_nr", e_nr.clone());
    let mut b = Table::new();
    time_columns(&mut b, &c, &times);
    b.push_column("eta_BB", ratio(&e_nr, &e_rec));
    let d = rec.derive();
    Ok(FigureData {
        id: "fig3".into(),
        panels: vec![("a".into(), a), ("b".into(), b)],
        manifest: manifest(
            "fig3",
            Some(t_end),
            json!({ "nonreciprocal": config_json(&c), "reciprocal": config_json(&rec) }),
            &["reciprocal curve: same pair with Gamma = 0", "horizon not given in the caption"],
        )
        .with("delta_cap", json!([d.delta_cap.re, d.delta_cap.im]))
        .with(
            "eta_BB_stationary",
            json!(eta_bb_stationary(
                d.coop_coherent.unwrap_or(f64::NAN),
                d.xi.unwrap_or(f64::NAN)
            )),
        ),
    })
}

fn fig4() -> Result<FigureData> {
    let c = preset("fig4").expect("known id");
    let rec = c.reciprocal_partner();
    let opt = optimal_rescaling(&c)?.apply(&c)?;
    let (t_end, times) = time_grid(&c);
    let e_rec = column(&times, |t| energy_battery_reciprocal(&rec, t));
    let e_nr = column(&times, |t| energy_battery_nr(&c, t));
    let e_opt = column(&times, |t| energy_battery_nr(&opt, t));
    let mut a = Table::new();
    time_columns(&mut a, &c, &times);
    a.push_column("E_B_rec", e_rec.clone());
    a.push_column("E_B_nr", e_nr.clone());
    a.push_column("E_B_opt", e_opt.clone());
    let mut b = Table::new();
    time_columns(&mut b, &c, &times);
    b.push_column("eta_BB", ratio(&e_nr, &e_rec));
    b.push_column("eta_BB_opt", ratio(&e_opt, &e_rec));

    let xi = (0.1f64 / 0.003).sqrt();
    let coop = logspace(1e-3, 1e3, 601);
    let mut panel_c = Table::new();
    panel_c.push_dense("C", &coop);
    panel_c.push_dense(
        "eta_BB_inf",
        &coop.iter().map(|&k| eta_bb_stationary(k, xi)).collect::<Vec<_>>(),
    );
    panel_c.push_dense(
        "eta_BB_opt_inf",
        &coop.iter().map(|&k| eta_bb_opt_stationary(k)).collect::<Vec<_>>(),
    );
    let d = rec.derive();
    Ok(FigureData {
        id: "fig4".into(),
        panels: vec![("a".into(), a), ("b".into(), b), ("c".into(), panel_c)],
        manifest: manifest(
            "fig4",
            Some(t_end),
            json!({
                "nonreciprocal": config_json(&c),
                "reciprocal": config_json(&rec),
                "optimized": config_json(&opt),
            }),
            &[
                "optimized: Gamma_a = xi Gamma, Gamma_b = Gamma/xi",
                "panel c: Gamma = 2|J|, xi = sqrt(0.1/0.003), C on 601 log points over [1e-3, 1e3]",
                "horizon not given in the caption",
            ],
        )
        .with("delta_cap", json!([d.delta_cap.re, d.delta_cap.im]))
        .with("xi", json!(xi)),
    })
}

fn fig5() -> Result<FigureData> {
    let c = preset("fig5").expect("known id");
    let rec = c.reciprocal_partner();
    let result = optimal_rescaling(&c)?;
    let opt = result.apply(&c)?;
    let (t_end, times) = time_grid(&c);
    let mut a = Table::new();
    time_columns(&mut a, &c, &times);
    a.push_column("E_B_rec", column(&times, |t| energy_battery_reciprocal(&rec, t)));
    a.push_column("E_B_nr", column(&times, |t| energy_battery_nr(&c, t)));
    a.push_column("E_A_nr", column(&times, |t| energy_charger_nr(&c, t)));
    a.push_column("E_B_opt", column(&times, |t| energy_battery_nr(&opt, t)));
    a.push_column("E_A_opt", column(&times, |t| energy_charger_nr(&opt, t)));
    let mut x = Table::new();
    x.push_dense("x", &result.x_grid);
    x.push_dense("E_B_inf", &result.energy_grid);
    Ok(FigureData {
        id: "fig5".into(),
        panels: vec![("a".into(), a), ("x".into(), x)],
        manifest: manifest(
            "fig5",
            Some(t_end),
            json!({
                "nonreciprocal": config_json(&c),
                "reciprocal": config_json(&rec),
                "optimized": config_json(&opt),
            }),
            &[
                "drive amplitude not given in the caption; 0.1 assumed",
                "panel x: stationary battery energy against the weighting x",
                "horizon not given in the caption",
            ],
        )
        .with("x_opt", json!(result.x_opt))
        .with("energy_opt", json!(result.energy_opt)),
    })
}

fn chi_map() -> Result<FigureData> {
    let (r, y, y_max) = CHI_GRID;
    let scan = advantage_region_scan(r, y, y_max)?;
    Ok(FigureData {
        id: "chi".into(),
        panels: vec![("map".into(), scan.table())],
        manifest: manifest(
            "chi",
            None,
            json!({}),
            &["chi in units of 8 omega E^2/|J|^2, k = 0"],
        )
        .with("summary", scan.summary()),
    })
}

pub fn figure(id: &str) -> Result<FigureData> {
    match id {
        "fig2" => fig2(),
        "fig3" => fig3(),
        "fig4" => fig4(),
        "fig5" => fig5(),
        "chi" => chi_map(),
        other => Err(Error::Config(format!(
            "unknown figure id '{other}' (expected one of {})",
            FIGURE_IDS.join(", ")
        ))),
    }
}
