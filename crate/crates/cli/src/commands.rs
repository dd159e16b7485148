use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use nrbattery::analysis::{advantage_region_scan, optimal_rescaling};
use nrbattery::closedform::curve_table;
use nrbattery::export::{linspace, Table};
use nrbattery::figures::figure;
use nrbattery::moments::{integrate, MomentState};
use nrbattery::params::ConfigFile;
use nrbattery::verify::{default_horizon, verify as run_verify, VerifyOptions};
use nrbattery::SystemConfig;

use crate::config::load;
use crate::error::CliError;
use crate::{ConfigArgs, Format, OutputArgs};

fn emit(output: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("plain json") + "\n"
}

fn table_json(table: &Table) -> Value {
    let mut columns = Map::new();
    for (name, col) in table.names.iter().zip(&table.columns) {
        columns.insert(name.clone(), json!(col));
    }
    Value::Object(columns)
}

/// Loads the config; with `--dump-config` prints it and returns `None`.
fn prepare(args: &ConfigArgs, output: &OutputArgs) -> Result<Option<SystemConfig>, CliError> {
    let config = load(args)?;
    if args.dump_config {
        emit(output, &(config.to_json() + "\n"))?;
        return Ok(None);
    }
    Ok(Some(config))
}

fn horizon(config: &SystemConfig, t_end: Option<f64>) -> Result<f64, CliError> {
    let t = t_end.unwrap_or_else(|| default_horizon(config));
    if !(t > 0.0 && t.is_finite()) {
        return Err(CliError::Config(format!("t_end must be positive, got {t}")));
    }
    Ok(t)
}

pub fn simulate(
    args: &ConfigArgs,
    output: &OutputArgs,
    t_end: Option<f64>,
    dt_max: f64,
) -> Result<(), CliError> {
    let Some(config) = prepare(args, output)? else {
        return Ok(());
    };
    let t_end = horizon(&config, t_end)?;
    let traj = integrate(&config, MomentState::vacuum(), t_end, dt_max)?;
    match output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            emit(output, &String::from_utf8(buf).expect("ascii csv"))
        }
        Format::Json => {
            let last = traj.len() - 1;
            emit(
                output,
                &pretty(&json!({
                    "t_end": t_end,
                    "steps": last,
                    "dt": traj.times[1] - traj.times[0],
                    "final": traj.states[last],
                    "E_A": traj.energy_a[last],
                    "E_B": traj.energy_b[last],
                })),
            )
        }
    }
}

pub fn closed_form(
    args: &ConfigArgs,
    output: &OutputArgs,
    t_end: Option<f64>,
    points: usize,
) -> Result<(), CliError> {
    let Some(config) = prepare(args, output)? else {
        return Ok(());
    };
    if points < 2 {
        return Err(CliError::Config(format!("need at least 2 points, got {points}")));
    }
    let t_end = horizon(&config, t_end)?;
    let table = curve_table(&config, &linspace(0.0, t_end, points));
    match output.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(output, &table.to_csv_string()),
        Format::Json => emit(output, &pretty(&table_json(&table))),
    }
}

pub fn verify(
    args: &ConfigArgs,
    output: &OutputArgs,
    t_end: Option<f64>,
    points: usize,
) -> Result<(), CliError> {
    let Some(config) = prepare(args, output)? else {
        return Ok(());
    };
    if output.format == Some(Format::Csv) {
        return Err(CliError::Config("verify writes JSON only".into()));
    }
    let options = VerifyOptions {
        points,
        t_end: t_end.map(|_| horizon(&config, t_end)).transpose()?,
        ..Default::default()
    };
    let report = run_verify(&config, options)?;
    emit(output, &pretty(&serde_json::to_value(&report).expect("report serializes")))?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .variants
            .iter()
            .filter(|v| v.status == nrbattery::verify::Status::Fail)
            .map(|v| v.variant)
            .collect();
        Err(CliError::VerifyFailed(format!(
            "closed form and integrator disagree for {}",
            failed.join(", ")
        )))
    }
}

pub fn optimize(args: &ConfigArgs, output: &OutputArgs) -> Result<(), CliError> {
    let Some(config) = prepare(args, output)? else {
        return Ok(());
    };
    let result = optimal_rescaling(&config)?;
    match output.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut t = Table::new();
            t.push_dense("x", &result.x_grid);
            t.push_dense("E_B_inf", &result.energy_grid);
            emit(output, &t.to_csv_string())
        }
        Format::Json => {
            let optimized = result.apply(&config)?;
            let (p_a, p_b) = result.weights(&config);
            emit(
                output,
                &pretty(&json!({
                    "x_opt": result.x_opt,
                    "xi": result.xi,
                    "energy_opt": result.energy_opt,
                    "energy_closed_form": result.energy_analytic,
                    "p_a": [p_a.re, p_a.im],
                    "p_b": [p_b.re, p_b.im],
                    "optimized_config": ConfigFile::from(&optimized),
                })),
            )
        }
    }
}

/// Parses "rN:yM".
pub fn parse_grid(spec: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("grid '{spec}' is not of the form rN:yM"));
    let (r, y) = spec.split_once(':').ok_or_else(bad)?;
    let r = r.strip_prefix('r').ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let y = y.strip_prefix('y').ok_or_else(bad)?.parse().map_err(|_| bad())?;
    Ok((r, y))
}

pub fn advantage(output: &OutputArgs, grid: &str, y_max: f64) -> Result<(), CliError> {
    let (r, y) = parse_grid(grid)?;
    let scan = advantage_region_scan(r, y, y_max)?;
    if !scan.certified {
        eprintln!("warning: y_max = {y_max} reaches outside the region y < 0.22");
    }
    match output.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(output, &scan.table().to_csv_string()),
        Format::Json => emit(output, &pretty(&scan.summary())),
    }
}

pub fn figures(id: &str, dir: &Path) -> Result<(), CliError> {
    let data = figure(id)?;
    let written = data
        .write_to(dir)
        .map_err(|e| CliError::Io(format!("cannot write to {}: {e}", dir.display())))?;
    for name in written {
        println!("{}", dir.join(name).display());
    }
    Ok(())
}
