//! `curve`: evaluates a scenario's closed-form model on its time grid.

use std::path::{Path, PathBuf};

use serde::Serialize;
use spinwave::models::{crossing_time, Mechanism};
use spinwave::Warning;

use crate::error::{CliError, CliResult};
use crate::output::{to_json, write_atomic, Format, Table};
use crate::scenario::Resolved;

#[derive(Debug, Serialize)]
struct CurveDoc<'a> {
    schema_version: u32,
    name: &'a str,
    model: &'a str,
    eta0: f64,
    /// First time with η/η₀ ≤ 1/e inside the grid.
    one_over_e_us: Option<f64>,
    columns: serde_json::Value,
    warnings: &'a [Warning],
}

/// Result of one curve run, for the caller to report.
#[derive(Debug)]
pub struct CurveRun {
    pub written: PathBuf,
    pub warnings: Vec<Warning>,
    pub one_over_e_us: Option<f64>,
}

pub fn run(r: &Resolved, out: &Path, format: Option<Format>) -> CliResult<CurveRun> {
    let format = format.or(r.file.output.format).unwrap_or(Format::Csv);
    let curve = r.model.ratio_curve(&r.times)?;
    let mut table = Table::new()
        .column("t_us", r.times_us.clone())
        .column("eta_over_eta0", curve.eta.clone());
    if r.file.output.complex {
        let (re, im) = complex_columns(&r.model.mechanism, &r.times)?;
        table = table.column("ReC", re).column("ImC", im);
    }
    let one_over_e_us = match r.times.last() {
        Some(&t_hi) if t_hi > 0.0 => {
            let mech = &r.model.mechanism;
            crossing_time(|t| mech.ratio(t).unwrap_or(f64::NAN), (-1.0f64).exp(), t_hi)
                .map(|t| t / spinwave::units::MICROSECOND)
        }
        _ => None,
    };
    let name = r.file.output.name.as_str();
    let contents = match format {
        Format::Csv => table.to_csv()?,
        Format::Json => to_json(&CurveDoc {
            schema_version: crate::scenario::SCHEMA_VERSION,
            name,
            model: r.model.mechanism.name(),
            eta0: r.model.eta0,
            one_over_e_us,
            columns: table.to_json_value(),
            warnings: &curve.warnings,
        })?,
    };
    let written = write_atomic(out, &format!("{name}.{}", format.extension()), &contents)?;
    Ok(CurveRun {
        written,
        warnings: curve.warnings,
        one_over_e_us,
    })
}

/// C(t)/C(0); only the general Raman-Nath model carries a phase.
fn complex_columns(m: &Mechanism, times: &[f64]) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let Mechanism::RamanNathGeneral(rn) = m else {
        return Err(CliError::config(format!(
            "field `output.complex`: complex coherence is available for raman_nath_general only, not {}",
            m.name()
        )));
    };
    let c0 = rn.coherence(0.0)?;
    let mut re = Vec::with_capacity(times.len());
    let mut im = Vec::with_capacity(times.len());
    for &t in times {
        let c = rn.coherence(t)? / c0;
        re.push(c.re);
        im.push(c.im);
    }
    Ok((re, im))
}
