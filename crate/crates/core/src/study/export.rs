use std::path::Path;

use super::run::ConvergenceReport;
use crate::error::{Error, Result};
use crate::milne::{CharacteristicPath, MilneSolution};

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    csv::Writer::from_path(path).map_err(csv_err)
}

fn num(v: f64) -> String {
    format!("{v:.17e}")
}

/// `report.json`, `norms.json`, `norms.csv` and `slopes.csv`.
pub fn write_report(report: &ConvergenceReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)?)?;
    std::fs::write(dir.join("norms.json"), serde_json::to_string_pretty(&report.norms)?)?;
    let mut w = writer(&dir.join("norms.csv"))?;
    w.write_record(["field", "norm", "eps", "value"]).map_err(csv_err)?;
    for e in &report.norms.entries {
        w.write_record([e.field.clone(), e.norm.clone(), num(e.eps), num(e.value)])
            .map_err(csv_err)?;
    }
    w.flush()?;
    let mut w = writer(&dir.join("slopes.csv"))?;
    w.write_record(["quantity", "slope", "intercept", "residual", "degenerate", "exact_zero"])
        .map_err(csv_err)?;
    for s in &report.slopes {
        let f = &s.fit;
        w.write_record([
            s.quantity.clone(),
            num(f.slope),
            num(f.intercept),
            num(f.residual),
            f.degenerate.to_string(),
            f.exact_zero.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `eta,phi,value` with `value = Φ(η, φ)`.
pub fn write_milne(s: &MilneSolution, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["eta", "phi", "value"]).map_err(csv_err)?;
    for (i, eta) in s.mesh.iter().enumerate() {
        for (j, phi) in s.angles.iter().enumerate() {
            w.write_record([num(*eta), num(*phi), num(s.values[j][i])])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `t,eta,phi,E`, every `every`-th sample and the last one.
pub fn write_path(p: &CharacteristicPath, every: usize, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "eta", "phi", "E"]).map_err(csv_err)?;
    let n = p.t.len();
    for i in (0..n).filter(|i| i % every == 0 || *i == n - 1) {
        w.write_record([num(p.t[i]), num(p.eta[i]), num(p.phi[i]), num(p.invariant[i])])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `eta,phi`, one row per hollow mask point. Returns the count.
pub fn write_mask(mask: &[Vec<bool>], etas: &[f64], phis: &[f64], path: &Path) -> Result<usize> {
    let mut w = writer(path)?;
    w.write_record(["eta", "phi"]).map_err(csv_err)?;
    let mut count = 0;
    for (row, eta) in mask.iter().zip(etas) {
        for (hollow, phi) in row.iter().zip(phis) {
            if *hollow {
                w.write_record([num(*eta), num(*phi)]).map_err(csv_err)?;
                count += 1;
            }
        }
    }
    w.flush()?;
    Ok(count)
}
