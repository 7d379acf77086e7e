//! CSV exchange format: header `x1,...,xd,value` for grid functions and
//! `x1,...,xd,mass` for signed measures. Rows may come in any order; atoms
//! without a row get zero.

use std::io::{Read, Write};
use std::sync::Arc;

use super::function::{DiscreteSignedMeasure, GridFunction};
use super::space::MetricMeasureSpace;
use crate::error::{invalid, Result};

/// Coordinates must match an atom this closely.
const LOCATE_TOL: f64 = 1e-9;

fn read_columns(
    reader: impl Read,
    space: &MetricMeasureSpace,
    value_column: &str,
) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let d = space.dimension();
    let expected: Vec<String> = (1..=d)
        .map(|k| format!("x{k}"))
        .chain(std::iter::once(value_column.to_string()))
        .collect();
    if headers.iter().ne(expected.iter().map(String::as_str)) {
        return invalid(format!(
            "expected header `{}`, got `{}`",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        ));
    }
    let mut out = vec![0.0; space.len()];
    let mut seen = vec![false; space.len()];
    let mut x = vec![0.0; d];
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        for k in 0..d {
            x[k] = parse(&row[k], line)?;
        }
        let v = parse(&row[d], line)?;
        let Some(i) = space.locate(&x, LOCATE_TOL) else {
            return invalid(format!(
                "row {}: coordinates {x:?} are not an atom",
                line + 1
            ));
        };
        if seen[i] {
            return invalid(format!("row {}: atom {i} listed twice", line + 1));
        }
        seen[i] = true;
        out[i] = v;
    }
    Ok(out)
}

fn parse(field: &str, line: usize) -> Result<f64> {
    field
        .parse::<f64>()
        .or_else(|_| invalid(format!("row {}: `{field}` is not a number", line + 1)))
}

pub fn read_function_csv(
    reader: impl Read,
    space: Arc<MetricMeasureSpace>,
) -> Result<GridFunction> {
    let values = read_columns(reader, &space, "value")?;
    GridFunction::new(space, values)
}

pub fn read_measure_csv(
    reader: impl Read,
    space: Arc<MetricMeasureSpace>,
) -> Result<DiscreteSignedMeasure> {
    let masses = read_columns(reader, &space, "mass")?;
    let entries = masses
        .into_iter()
        .enumerate()
        .filter(|(_, m)| *m != 0.0)
        .collect();
    DiscreteSignedMeasure::new(space, entries)
}

fn write_rows(
    writer: impl Write,
    space: &MetricMeasureSpace,
    value_column: &str,
    rows: impl Iterator<Item = (usize, f64)>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=space.dimension()).map(|k| format!("x{k}")).collect();
    header.push(value_column.to_string());
    w.write_record(&header)?;
    for (i, v) in rows {
        let mut rec: Vec<String> = space.atom(i).iter().map(|c| c.to_string()).collect();
        rec.push(v.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_function_csv(writer: impl Write, u: &GridFunction) -> Result<()> {
    write_rows(
        writer,
        u.space(),
        "value",
        u.values().iter().copied().enumerate(),
    )
}

pub fn write_measure_csv(writer: impl Write, mu: &DiscreteSignedMeasure) -> Result<()> {
    write_rows(writer, mu.space(), "mass", mu.entries().iter().copied())
}

/// Per-atom values under an arbitrary column name (used for potentials).
pub fn write_atom_values_csv(
    writer: impl Write,
    space: &MetricMeasureSpace,
    column: &str,
    values: &[f64],
) -> Result<()> {
    write_rows(writer, space, column, values.iter().copied().enumerate())
}
