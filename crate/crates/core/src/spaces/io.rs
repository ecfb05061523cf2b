use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{FiniteMetricSpace, Metric, PolylinePath, SpaceInfo};
use crate::error::{Error, Result};

/// Metadata written next to a point-cloud CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub metric: String,
    pub basepoint: usize,
    pub generator: String,
    pub params: serde_json::Value,
    #[serde(default)]
    pub spacing: Option<f64>,
    #[serde(default)]
    pub truncation_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Sidecar {
    pub fn of(space: &FiniteMetricSpace) -> Self {
        let info = space.info();
        Sidecar {
            metric: space.metric_name(),
            basepoint: space.basepoint(),
            generator: info.generator.clone(),
            params: info.params.clone(),
            spacing: info.spacing,
            truncation_depth: info.truncation_depth,
            notes: info.notes.clone(),
        }
    }

    pub fn info(&self) -> SpaceInfo {
        SpaceInfo {
            generator: self.generator.clone(),
            params: self.params.clone(),
            spacing: self.spacing,
            truncation_depth: self.truncation_depth,
            notes: self.notes.clone(),
        }
    }
}

/// Writes one point per row under a `x1..xd` header.
pub fn write_points_csv<W: Write>(space: &FiniteMetricSpace, w: W) -> Result<()> {
    let dim = space
        .dim()
        .ok_or_else(|| Error::InvalidParameter("space has no coordinates".into()))?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record((1..=dim).map(|k| format!("x{k}")))?;
    for i in 0..space.len() {
        out.write_record(space.coords(i).unwrap().iter().map(|x| format!("{x:?}")))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_points_csv<R: Read>(r: R, metric: Metric, basepoint: usize) -> Result<FiniteMetricSpace> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let dim = rdr.headers()?.len();
    let mut pts = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(parse_f64)
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                index: pts.len(),
                expected: dim,
                found: row.len(),
            });
        }
        pts.push(row);
    }
    FiniteMetricSpace::from_points(&pts, metric, basepoint)
}

/// Writes the full N x N matrix, no header.
pub fn write_matrix_csv<W: Write>(space: &FiniteMetricSpace, w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for i in 0..space.len() {
        out.write_record((0..space.len()).map(|j| format!("{:?}", space.dist(i, j))))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_matrix_csv<R: Read>(r: R, basepoint: usize) -> Result<FiniteMetricSpace> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(r);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(rec.iter().map(parse_f64).collect::<Result<Vec<f64>>>()?);
    }
    FiniteMetricSpace::from_matrix(&rows, basepoint)
}

/// Polyline CSV: header `x1..xd,closed`; the `closed` column is read from the
/// first row. A closed polyline may omit the repeated first vertex.
pub fn write_polyline_csv<W: Write>(poly: &PolylinePath, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = (1..=poly.dim()).map(|k| format!("x{k}")).collect();
    header.push("closed".into());
    out.write_record(&header)?;
    for v in poly.vertices() {
        let mut rec: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
        rec.push(if poly.is_closed() { "1" } else { "0" }.into());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_polyline_csv<R: Read>(r: R) -> Result<PolylinePath> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    let closed_col = headers.iter().position(|h| h.trim() == "closed");
    let mut closed = false;
    let mut verts = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let mut v = Vec::new();
        for (c, f) in rec.iter().enumerate() {
            if Some(c) == closed_col {
                if k == 0 {
                    closed = matches!(f.trim(), "1" | "true");
                }
            } else {
                v.push(parse_f64(f)?);
            }
        }
        verts.push(v);
    }
    if closed && verts.len() > 1 && verts.first() != verts.last() {
        return PolylinePath::closed_loop(verts);
    }
    PolylinePath::new(verts, closed)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}
