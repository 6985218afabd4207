//! CSV readers and writers for datasets, predictions and chains.
//!
//! Floats are written with Rust's shortest round-trip formatting so a file
//! read back reproduces the in-memory values bit for bit.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::gp::{Dataset, NoiseModel, Prediction, Theta};
use crate::kernels::QuantityKind;
use crate::mcmc::PosteriorChain;

pub const DATASET_HEADER: [&str; 5] = ["quantity", "x", "z", "value", "dataset_id"];
pub const PREDICTION_HEADER: [&str; 5] = ["kind", "x", "z", "mean", "var"];

fn parse_f64(field: &str, what: &str, line: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("{what} `{field}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("{what} `{field}` is not finite"),
        });
    }
    Ok(v)
}

fn check_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                got.join(",")
            ),
        });
    }
    Ok(())
}

/// Reads a dataset CSV. Rows are grouped by `dataset_id` in order of first
/// appearance; every dataset gets `noise` until the caller says otherwise.
pub fn read_datasets<R: Read>(reader: R, noise: NoiseModel) -> Result<Vec<Dataset>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    check_header(rdr.headers()?, &DATASET_HEADER)?;
    let mut out: Vec<Dataset> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != DATASET_HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!(
                    "expected {} fields, found {}",
                    DATASET_HEADER.len(),
                    record.len()
                ),
            });
        }
        let kind: QuantityKind = record[0].trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("unknown quantity `{}`", &record[0]),
        })?;
        let x = parse_f64(&record[1], "x", line)?;
        let z_field = record[2].trim();
        let z = match (z_field.is_empty(), kind.needs_depth()) {
            (true, true) => {
                return Err(Error::Parse {
                    line,
                    message: "strain rows need a depth z".into(),
                })
            }
            (false, false) => {
                return Err(Error::Parse {
                    line,
                    message: format!("z must be empty for quantity `{kind}`"),
                })
            }
            (true, false) => None,
            (false, true) => Some(parse_f64(z_field, "z", line)?),
        };
        let value = parse_f64(&record[3], "value", line)?;
        let id = record[4].trim();
        if id.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty dataset_id".into(),
            });
        }
        match out.iter_mut().find(|d| d.label == id) {
            Some(d) => {
                if d.kind != kind {
                    return Err(Error::Parse {
                        line,
                        message: format!(
                            "dataset `{id}` mixes quantities `{}` and `{kind}`",
                            d.kind
                        ),
                    });
                }
                d.x.push(x);
                d.y.push(value);
                if let (Some(zs), Some(z)) = (d.z.as_mut(), z) {
                    zs.push(z);
                }
            }
            None => out.push(Dataset {
                kind,
                x: vec![x],
                z: z.map(|z| vec![z]),
                y: vec![value],
                noise,
                label: id.to_string(),
            }),
        }
    }
    for d in &out {
        d.validate()?;
    }
    Ok(out)
}

pub fn write_datasets<W: Write>(writer: W, datasets: &[Dataset]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DATASET_HEADER)?;
    for d in datasets {
        for i in 0..d.len() {
            let z = d.z.as_ref().map_or(String::new(), |z| z[i].to_string());
            w.write_record([
                d.kind.symbol().to_string(),
                d.x[i].to_string(),
                z,
                d.y[i].to_string(),
                d.label.clone(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_predictions<W: Write>(writer: W, predictions: &[Prediction]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PREDICTION_HEADER)?;
    for p in predictions {
        for i in 0..p.x.len() {
            let z = p.z.as_ref().map_or(String::new(), |z| z[i].to_string());
            w.write_record([
                p.kind.symbol().to_string(),
                p.x[i].to_string(),
                z,
                p.mean[i].to_string(),
                p.var[i].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per retained draw, one column per parameter.
pub fn write_chain<W: Write>(writer: W, chain: &PosteriorChain) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(&chain.names)?;
    for name in &chain.names {
        if chain.column(name).is_none() {
            return Err(Error::Argument(format!("chain has no column `{name}`")));
        }
    }
    let columns: Vec<Vec<f64>> = chain.names.iter().filter_map(|n| chain.column(n)).collect();
    for i in 0..chain.len() {
        w.write_record(columns.iter().map(|c| c[i].to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Builds a [`Theta`] from named values; `sigma_n:<label>` columns become
/// per-dataset noise levels.
pub fn theta_from_named(names: &[String], values: &[f64]) -> Result<Theta> {
    let find = |key: &str| -> Result<f64> {
        names
            .iter()
            .position(|n| n == key)
            .map(|i| values[i])
            .ok_or_else(|| Error::Argument(format!("missing parameter column `{key}`")))
    };
    let mut theta = Theta::new(find("sigma_s2")?, find("ell")?, find("EI")?, find("kGA")?);
    for (n, v) in names.iter().zip(values) {
        if let Some(label) = n.strip_prefix("sigma_n:") {
            theta.sigma_n.insert(label.to_string(), *v);
        }
    }
    Ok(theta)
}

/// Reads a chain CSV back into parameter draws.
pub fn read_chain<R: Read>(reader: R) -> Result<(Vec<String>, Vec<Theta>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let names: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    let mut draws = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != names.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", names.len(), record.len()),
            });
        }
        let values = record
            .iter()
            .zip(&names)
            .map(|(f, n)| parse_f64(f, n, line))
            .collect::<Result<Vec<f64>>>()?;
        draws.push(theta_from_named(&names, &values).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?);
    }
    Ok((names, draws))
}
