//! `fit`: reads measured η(t) from CSV and fits a decay model.

use std::path::{Path, PathBuf};

use serde::Serialize;
use spinwave::fit::{fit_decay, FitModel, FitResult};
use spinwave::units::MICROSECOND;
use spinwave::DecayCurve;

use crate::error::{CliError, CliResult};
use crate::output::{to_json, write_atomic, Format, Table};

/// Reads a CSV with header `t_us,eta[,sigma]`. Diagnostics name the line.
pub fn read_decay_csv(path: &Path) -> CliResult<DecayCurve> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    parse_decay_csv(&text)
}

pub fn parse_decay_csv(text: &str) -> CliResult<DecayCurve> {
    if text.trim().is_empty() {
        return Err(CliError::Fit("insufficient points: the data file is empty".into()));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| CliError::config(format!("header: {e}")))?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    for h in headers.iter() {
        if !matches!(h, "t_us" | "eta" | "sigma") {
            return Err(CliError::config(format!(
                "line 1: unknown column '{h}' (expected t_us, eta and optionally sigma)"
            )));
        }
    }
    let (Some(it), Some(ie)) = (find("t_us"), find("eta")) else {
        return Err(CliError::config("line 1: header must contain t_us and eta"));
    };
    let is = find("sigma");
    let (mut t, mut eta, mut sigma) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::config(format!("row {line}: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let get = |i: usize, name: &str| -> CliResult<f64> {
            let raw = rec.get(i).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::config(format!("row {line}: column {name}: cannot parse '{raw}' as a number")))
        };
        let tv = get(it, "t_us")?;
        let ev = get(ie, "eta")?;
        if tv < 0.0 {
            return Err(CliError::config(format!("row {line}: t_us must be >= 0")));
        }
        if t.last().is_some_and(|&prev: &f64| tv * MICROSECOND <= prev) {
            return Err(CliError::config(format!("row {line}: t_us must increase from row to row")));
        }
        if ev < 0.0 {
            return Err(CliError::config(format!("row {line}: eta must be >= 0")));
        }
        if let Some(i) = is {
            let sv = get(i, "sigma")?;
            if sv < 0.0 {
                return Err(CliError::config(format!("row {line}: sigma must be >= 0")));
            }
            sigma.push(sv);
        }
        t.push(tv * MICROSECOND);
        eta.push(ev);
    }
    if t.is_empty() {
        return Err(CliError::Fit("insufficient points: the data file has no rows".into()));
    }
    Ok(DecayCurve::with_sigma(t, eta, is.map(|_| sigma))?)
}

#[derive(Debug, Serialize)]
struct ParamDoc {
    name: String,
    value: f64,
    sigma: f64,
    unit: &'static str,
}

#[derive(Debug, Serialize)]
pub struct FitDoc {
    model: FitModel,
    params: Vec<ParamDoc>,
    /// Time at which the fitted curve falls to η₀/e.
    one_over_e_us: f64,
    residual_norm: f64,
    n_points: usize,
    excluded: usize,
}

impl FitDoc {
    pub fn new(r: &FitResult) -> Self {
        let params = r
            .params
            .iter()
            .map(|p| {
                let (scale, unit) = if p.name == "tau" { (1.0 / MICROSECOND, "us") } else { (1.0, "") };
                ParamDoc {
                    name: p.name.clone(),
                    value: p.value * scale,
                    sigma: p.sigma * scale,
                    unit,
                }
            })
            .collect();
        let tau = r.value("tau").unwrap_or(f64::NAN);
        let one_over_e = match r.model {
            FitModel::Algebraic => tau * (std::f64::consts::E - 1.0).sqrt(),
            _ => tau,
        };
        FitDoc {
            model: r.model,
            params,
            one_over_e_us: one_over_e / MICROSECOND,
            residual_norm: r.residual_norm,
            n_points: r.n_points,
            excluded: r.excluded,
        }
    }
}

pub fn fit_curve(curve: &DecayCurve, model: &str) -> CliResult<FitResult> {
    let model = FitModel::parse(model)?;
    fit_decay(curve, model).map_err(|e| match e {
        spinwave::Error::InvalidInput(m) => CliError::Fit(m),
        other => other.into(),
    })
}

pub fn run(data: &Path, model: &str, out: &Path, format: Format) -> CliResult<(Vec<PathBuf>, FitResult)> {
    let curve = read_decay_csv(data)?;
    let r = fit_curve(&curve, model)?;
    let stem = data.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
    let mut written = vec![write_atomic(out, &format!("{stem}_fit.json"), &to_json(&FitDoc::new(&r))?)?];
    if format == Format::Csv {
        let fitted: Vec<f64> = curve.times.iter().map(|&t| r.eval(t)).collect();
        let table = Table::new()
            .column("t_us", curve.times.iter().map(|t| t / MICROSECOND).collect())
            .column("eta", curve.eta.clone())
            .column("eta_fit", fitted);
        written.push(write_atomic(out, &format!("{stem}_fit.csv"), &table.to_csv()?)?);
    }
    Ok((written, r))
}
