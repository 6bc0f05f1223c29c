//! Text dump format for nodal fields.
//!
//! Header line:
//! `RISFIELD v1 dim=<d> nodes=<n1,...> extents=<e1,...> components=<c>`
//! followed by whitespace-separated values in row-major node order
//! (components interleaved per node).  Values are written with 17
//! significant digits so the round-trip is bit-exact.

use crate::error::{Result, RisError};
use crate::grid::{Grid, ScalarField, VectorField};
use std::fmt::Write as _;
use std::path::Path;

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(grid: &Grid, components: usize) -> String {
    let nodes = grid
        .nodes_per_axis()
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let extents = grid
        .extents()
        .iter()
        .map(|e| format_f64(*e))
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "RISFIELD v1 dim={} nodes={} extents={} components={}",
        grid.dim(),
        nodes,
        extents,
        components
    )
}

fn dump(grid: &Grid, components: usize, values: &[f64]) -> String {
    let mut out = header(grid, components);
    out.push('\n');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            if i % components == 0 {
                out.push('\n');
            } else {
                out.push(' ');
            }
        }
        let _ = write!(out, "{}", format_f64(*v));
    }
    out.push('\n');
    out
}

pub fn write_scalar(path: &Path, field: &ScalarField) -> Result<()> {
    std::fs::write(path, dump(field.grid(), 1, field.values()))?;
    Ok(())
}

pub fn write_vector(path: &Path, field: &VectorField) -> Result<()> {
    std::fs::write(path, dump(field.grid(), field.dim(), field.values()))?;
    Ok(())
}

/// A parsed field file: grid geometry plus raw values.
pub struct FieldData {
    pub grid: Grid,
    pub components: usize,
    pub values: Vec<f64>,
}

impl FieldData {
    pub fn into_scalar(self) -> Result<ScalarField> {
        if self.components != 1 {
            return Err(RisError::FieldFormat(format!(
                "expected a scalar field, file has {} components",
                self.components
            )));
        }
        ScalarField::new(&self.grid, self.values)
    }

    pub fn into_vector(self) -> Result<VectorField> {
        if self.components != self.grid.dim() {
            return Err(RisError::FieldFormat(format!(
                "expected {} components, file has {}",
                self.grid.dim(),
                self.components
            )));
        }
        VectorField::new(&self.grid, self.values)
    }
}

pub fn read_field(path: &Path) -> Result<FieldData> {
    let text = std::fs::read_to_string(path)?;
    parse_field(&text)
}

pub fn parse_field(text: &str) -> Result<FieldData> {
    let mut lines = text.lines();
    let head = lines
        .next()
        .ok_or_else(|| RisError::FieldFormat("empty file".into()))?;
    let mut tokens = head.split_whitespace();
    if tokens.next() != Some("RISFIELD") || tokens.next() != Some("v1") {
        return Err(RisError::FieldFormat(
            "missing `RISFIELD v1` header".into(),
        ));
    }
    let mut dim = None;
    let mut nodes: Option<Vec<usize>> = None;
    let mut extents: Option<Vec<f64>> = None;
    let mut components = None;
    for tok in tokens {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| RisError::FieldFormat(format!("bad header token `{tok}`")))?;
        match key {
            "dim" => {
                dim = Some(value.parse::<usize>().map_err(|_| {
                    RisError::FieldFormat(format!("bad dim `{value}`"))
                })?)
            }
            "nodes" => {
                nodes = Some(
                    value
                        .split(',')
                        .map(|s| {
                            s.parse::<usize>()
                                .map_err(|_| RisError::FieldFormat(format!("bad nodes `{value}`")))
                        })
                        .collect::<Result<_>>()?,
                )
            }
            "extents" => {
                extents = Some(
                    value
                        .split(',')
                        .map(|s| {
                            s.parse::<f64>().map_err(|_| {
                                RisError::FieldFormat(format!("bad extents `{value}`"))
                            })
                        })
                        .collect::<Result<_>>()?,
                )
            }
            "components" => {
                components = Some(value.parse::<usize>().map_err(|_| {
                    RisError::FieldFormat(format!("bad components `{value}`"))
                })?)
            }
            other => {
                return Err(RisError::FieldFormat(format!(
                    "unknown header key `{other}`"
                )))
            }
        }
    }
    let dim = dim.ok_or_else(|| RisError::FieldFormat("header misses dim".into()))?;
    let nodes = nodes.ok_or_else(|| RisError::FieldFormat("header misses nodes".into()))?;
    let extents = extents.ok_or_else(|| RisError::FieldFormat("header misses extents".into()))?;
    let components =
        components.ok_or_else(|| RisError::FieldFormat("header misses components".into()))?;
    let grid = Grid::new(dim, &extents, &nodes)?;
    let mut values = Vec::with_capacity(grid.node_count() * components);
    for line in lines {
        for tok in line.split_whitespace() {
            values.push(
                tok.parse::<f64>()
                    .map_err(|_| RisError::FieldFormat(format!("bad value `{tok}`")))?,
            );
        }
    }
    if values.len() != grid.node_count() * components {
        return Err(RisError::FieldFormat(format!(
            "value count {} does not match {} nodes x {} components",
            values.len(),
            grid.node_count(),
            components
        )));
    }
    Ok(FieldData {
        grid,
        components,
        values,
    })
}
