//! File surfaces: the `t1,delta1,t2,delta2` dataset schema and the CSV
//! exports consumed by the command line.
//!
//! Dataset files are strict: exactly that header, decimal-point floats, and
//! indicators in {0, 1}. Schema violations report the offending 1-based file
//! line. Floats are written with Rust's shortest round-trip formatting, so
//! written files parse back bit-identically.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::bayes::ChainDraw;
use crate::bdgd::{BivObs, Dataset};
use crate::error::{Error, Result};
use crate::nonparam::{HazardBin, StepCurve};
use crate::study::{coverage_band, BoxplotRow, StudyResult};

pub const DATASET_HEADER: &str = "t1,delta1,t2,delta2";

pub fn read_dataset<R: Read>(reader: R) -> Result<Dataset> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .ok_or(Error::Schema { row: 1, message: "empty file".into() })?
        .map_err(Error::Io)?;
    if header.trim() != DATASET_HEADER {
        return Err(Error::Schema {
            row: 1,
            message: format!("header must be '{DATASET_HEADER}', got '{}'", header.trim()),
        });
    }
    let mut observations = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let line = line.map_err(Error::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Schema {
                row,
                message: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let time = |s: &str, name: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| Error::Schema {
                row,
                message: format!("{name} is not a number: '{s}'"),
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Schema {
                    row,
                    message: format!("{name} must be finite and >= 0, got {v}"),
                });
            }
            Ok(v)
        };
        let indicator = |s: &str, name: &str| -> Result<bool> {
            match s {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(Error::Schema {
                    row,
                    message: format!("{name} must be 0 or 1, got '{s}'"),
                }),
            }
        };
        let t1 = time(fields[0], "t1")?;
        let d1 = indicator(fields[1], "delta1")?;
        let t2 = time(fields[2], "t2")?;
        let d2 = indicator(fields[3], "delta2")?;
        for (name, t, d) in [("t1", t1, d1), ("t2", t2, d2)] {
            if d && t == 0.0 {
                return Err(Error::Schema {
                    row,
                    message: format!("{name} is an event at time 0, which is not a valid lifetime"),
                });
            }
        }
        observations.push(BivObs::new(t1, d1, t2, d2).map_err(|e| Error::Schema {
            row,
            message: e.to_string(),
        })?);
    }
    Dataset::new(observations)
}

pub fn read_dataset_path<P: AsRef<Path>>(path: P) -> Result<Dataset> {
    read_dataset(File::open(path)?)
}

pub fn write_dataset<W: Write>(writer: W, dataset: &Dataset) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "{DATASET_HEADER}")?;
    for o in dataset.observations() {
        writeln!(
            w,
            "{},{},{},{}",
            o.t1(),
            o.delta1() as u8,
            o.t2(),
            o.delta2() as u8
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset_path<P: AsRef<Path>>(path: P, dataset: &Dataset) -> Result<()> {
    write_dataset(File::create(path)?, dataset)
}

/// `(time, survival)` rows of a step curve, one per knot.
pub fn write_step_curve<W: Write>(writer: W, curve: &StepCurve) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "time,survival")?;
    for (t, s) in curve.knots().iter().zip(curve.values()) {
        writeln!(w, "{t},{s}")?;
    }
    w.flush()?;
    Ok(())
}

/// `(midpoint, hazard)` rows of the binned estimator.
pub fn write_hazard_bins<W: Write>(writer: W, bins: &[HazardBin]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "midpoint,hazard")?;
    for b in bins {
        writeln!(w, "{},{}", b.midpoint, b.hazard)?;
    }
    w.flush()?;
    Ok(())
}

/// Sampled-function rows `(time, value)` on an explicit grid.
pub fn write_function_table<W: Write>(
    writer: W,
    header: (&str, &str),
    rows: &[(f64, f64)],
) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "{},{}", header.0, header.1)?;
    for (x, y) in rows {
        writeln!(w, "{x},{y}")?;
    }
    w.flush()?;
    Ok(())
}

/// Retained MCMC draws, one row per draw in canonical parameter order.
pub fn write_chain<W: Write>(writer: W, chain: &[ChainDraw]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "iteration,alpha1,beta1,alpha2,beta2,phi")?;
    for d in chain {
        let [a1, b1, a2, b2, phi] = d.values;
        writeln!(w, "{},{a1},{b1},{a2},{b2},{phi}", d.iteration)?;
    }
    w.flush()?;
    Ok(())
}

/// Study summary for one scenario: one row per (n, tracked parameter).
pub fn write_study_scenario<W: Write>(
    writer: W,
    result: &StudyResult,
    scenario_id: u8,
) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(
        w,
        "n,parameter,bias,mse,coverage,band_lo,band_hi,n_monotone,n_failed"
    )?;
    let band = coverage_band(result.replicates, result.nominal_coverage);
    for cell in result.cells.iter().filter(|c| c.scenario == scenario_id) {
        for pc in &cell.per_param {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                cell.n,
                pc.param.name(),
                pc.bias,
                pc.mse,
                pc.coverage,
                band.lo,
                band.hi,
                cell.n_monotone,
                cell.n_failed
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Long-format box-plot series `(n, estimate, nominal)`.
pub fn write_boxplot<W: Write>(writer: W, rows: &[BoxplotRow]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "n,estimate,nominal")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.n, r.estimate, r.nominal)?;
    }
    w.flush()?;
    Ok(())
}
