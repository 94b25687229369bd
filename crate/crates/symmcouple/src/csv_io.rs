//! Plain CSV formats.
//!
//! Step functions are written one row per break as `break,value`, where
//! `value` is taken on the interval that starts at `break`; the closing
//! row `1,` has an empty value. Floats use Rust's shortest round-trip
//! formatting, so a written function re-parses to an identical one.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use symmcouple_core::{Partition, StepFunction};

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(r)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let h = rdr.headers()?;
    let got: Vec<&str> = h.iter().collect();
    if got != expected {
        bail!("expected CSV header `{}`, found `{}`", expected.join(","), got.join(","));
    }
    Ok(())
}

fn parse_f64(field: &str, row: usize) -> Result<f64> {
    field.parse::<f64>().with_context(|| format!("row {row}: `{field}` is not a number"))
}

pub fn read_step<R: Read>(r: R) -> Result<StepFunction> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &["break", "value"])?;
    let mut breaks = Vec::new();
    let mut values = Vec::new();
    let mut closed = false;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if closed {
            bail!("row {}: data after the closing row", i + 1);
        }
        breaks.push(parse_f64(rec.get(0).unwrap_or(""), i + 1)?);
        match rec.get(1).unwrap_or("") {
            "" => closed = true,
            v => values.push(parse_f64(v, i + 1)?),
        }
    }
    if !closed {
        bail!("missing closing row `1,`");
    }
    Ok(StepFunction::new(breaks, values)?)
}

pub fn write_step<W: Write>(w: W, x: &StepFunction) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["break", "value"])?;
    for (b, _, v) in x.intervals() {
        wtr.write_record([b.to_string(), v.to_string()])?;
    }
    wtr.write_record(["1", ""])?;
    wtr.flush()?;
    Ok(())
}

pub fn step_to_string(x: &StepFunction) -> String {
    let mut buf = Vec::new();
    write_step(&mut buf, x).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

pub fn step_from_str(s: &str) -> Result<StepFunction> {
    read_step(s.as_bytes())
}

pub fn read_step_file(path: &Path) -> Result<StepFunction> {
    let f = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_step(f).with_context(|| format!("in {}", path.display()))
}

/// Two numeric columns under the given header.
pub fn read_columns<R: Read>(r: R, header: [&str; 2]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &header)?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            bail!("row {}: expected 2 fields, found {}", i + 1, rec.len());
        }
        a.push(parse_f64(&rec[0], i + 1)?);
        b.push(parse_f64(&rec[1], i + 1)?);
    }
    Ok((a, b))
}

pub fn read_columns_file(path: &Path, header: [&str; 2]) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_columns(f, header).with_context(|| format!("in {}", path.display()))
}

pub fn write_columns<W: Write>(w: W, header: [&str; 2], a: &[f64], b: &[f64]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header)?;
    for (x, y) in a.iter().zip(b) {
        wtr.write_record([x.to_string(), y.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_partition<W: Write>(w: W, p: &Partition) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["lo", "hi"])?;
    for (a, b) in p.intervals() {
        wtr.write_record([a.to_string(), b.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}
