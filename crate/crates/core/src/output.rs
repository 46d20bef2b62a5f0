//! Table rendering and atomic file output.
//!
//! Both emitters are byte-deterministic: every float is printed with 17
//! significant digits (`{:.16e}`), which round-trips f64 exactly, and rows
//! follow the sample grid order. The CSV column set is a stable contract —
//! any future column is appended at the end, never inserted or renamed.
//! Undefined entries (Q* and the adiabatic reference while the trap is
//! unbound) render as empty CSV fields and JSON nulls.

use crate::ermakov::ScalingTrajectory;
use crate::observables::EnergyObservables;
use serde::Serialize;
use std::io;
use std::path::Path;

pub const COLUMNS: [&str; 15] = [
    "t",
    "omega",
    "omega_sq",
    "b",
    "bdot",
    "bddot",
    "qstar",
    "mean_E",
    "mean_E_ad",
    "mean_E2",
    "var_E",
    "var_E_raw",
    "mean_Q",
    "mean_C",
    "mean_C2",
];

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

fn rows(traj: &ScalingTrajectory, obs: &EnergyObservables) -> Vec<Vec<Option<f64>>> {
    assert_eq!(
        traj.samples.len(),
        obs.samples.len(),
        "trajectory and observables must share one sample grid"
    );
    traj.samples
        .iter()
        .zip(&obs.samples)
        .map(|(s, o)| {
            vec![
                Some(s.t),
                Some(s.omega),
                Some(s.omega_sq),
                Some(s.b),
                Some(s.bdot),
                Some(s.bddot),
                o.qstar,
                Some(o.mean_e),
                o.mean_e_ad,
                Some(o.mean_e2),
                Some(o.var_e),
                Some(o.var_e_raw),
                Some(o.mean_q),
                Some(o.mean_c),
                Some(o.mean_c2),
            ]
        })
        .collect()
}

fn render_csv_rows(header: &[&str], rows: &[Vec<Option<f64>>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.iter().map(|v| fmt_opt(*v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonTable<'a> {
    columns: Vec<&'a str>,
    rows: &'a [Vec<Option<f64>>],
}

fn render_json_rows(header: &[&str], rows: &[Vec<Option<f64>>]) -> String {
    let table = JsonTable {
        columns: header.to_vec(),
        rows,
    };
    let mut s = serde_json::to_string_pretty(&table).expect("plain data serializes");
    s.push('\n');
    s
}

/// Render a run as CSV with the stable column contract.
pub fn render_csv(traj: &ScalingTrajectory, obs: &EnergyObservables) -> String {
    render_csv_rows(&COLUMNS, &rows(traj, obs))
}

/// Render a run as a JSON table (same columns; undefined entries are null).
pub fn render_json(traj: &ScalingTrajectory, obs: &EnergyObservables) -> String {
    render_json_rows(&COLUMNS, &rows(traj, obs))
}

/// One evaluated point of a parameter sweep: the final-time table row for
/// the given parameter value.
pub struct SweepRow {
    pub value: f64,
    pub cells: Vec<Option<f64>>,
}

pub fn sweep_row(value: f64, traj: &ScalingTrajectory, obs: &EnergyObservables) -> SweepRow {
    let all = rows(traj, obs);
    let mut cells = all.last().expect("nonempty grid").clone();
    let mut full = vec![Some(value)];
    full.append(&mut cells);
    SweepRow { value, cells: full }
}

pub fn render_sweep_csv(parameter: &str, rows: &[SweepRow]) -> String {
    let mut header: Vec<&str> = vec![parameter];
    header.extend(COLUMNS);
    let data: Vec<Vec<Option<f64>>> = rows.iter().map(|r| r.cells.clone()).collect();
    render_csv_rows(&header, &data)
}

pub fn render_sweep_json(parameter: &str, rows: &[SweepRow]) -> String {
    let mut header: Vec<&str> = vec![parameter];
    header.extend(COLUMNS);
    let data: Vec<Vec<Option<f64>>> = rows.iter().map(|r| r.cells.clone()).collect();
    render_json_rows(&header, &data)
}

/// Write via a sibling temp file and rename, so readers never observe a
/// partially written table.
pub fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    let tmp = path.with_extension(match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{ext}.tmp"),
        None => "tmp".to_string(),
    });
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ermakov::{integrate_ermakov, uniform_grid};
    use crate::observables::energy_observables;
    use crate::{protocol, state};

    fn small_run() -> (ScalingTrajectory, EnergyObservables) {
        let p = protocol::make_free_expansion(1.0).unwrap();
        let traj = integrate_ermakov(&p, 1.0, 1e-10, &uniform_grid(1.0, 3)).unwrap();
        let s = state::qho_eigenstate(0, 1.0).unwrap();
        let obs = energy_observables(&traj, &s);
        (traj, obs)
    }

    #[test]
    fn csv_shape_and_missing_fields() {
        let (traj, obs) = small_run();
        let csv = render_csv(&traj, &obs);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("t,omega,omega_sq,b,"));
        assert_eq!(lines[0].split(',').count(), COLUMNS.len());
        // t = 0.5 under free expansion: qstar and mean_E_ad are empty
        let fields: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(fields.len(), COLUMNS.len());
        assert_eq!(fields[6], "");
        assert_eq!(fields[8], "");
        // full 17-significant-digit values
        assert!(fields[0].starts_with("5.0000000000000000e-1"));
    }

    #[test]
    fn json_uses_nulls_for_undefined() {
        let (traj, obs) = small_run();
        let json = render_json(&traj, &obs);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["columns"].as_array().unwrap().len(), COLUMNS.len());
        assert!(v["rows"][1][6].is_null());
        assert!(v["rows"][1][7].is_number());
    }

    #[test]
    fn rendering_is_deterministic() {
        let (traj, obs) = small_run();
        assert_eq!(render_csv(&traj, &obs), render_csv(&traj, &obs));
        assert_eq!(render_json(&traj, &obs), render_json(&traj, &obs));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = std::env::temp_dir().join("scaledyn-output-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("table.csv");
        write_atomic(&path, "first\n").unwrap();
        write_atomic(&path, "second\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second\n");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
