//! Finite metric spaces: point clouds under a coordinate metric, or explicit
//! distance matrices, plus generators for the benchmark spaces.

mod generators;
mod io;
mod polyline;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use generators::{
    default_earring_samples, gen_annulus, gen_circle, gen_circle_product, gen_circle_tree,
    gen_hawaiian_earring, gen_hawaiian_window, gen_sine_space, gen_telescope, SineVariant,
    CIRCLE_PRODUCT_CAP, DEFAULT_SPACING,
};
pub use io::{
    read_matrix_csv, read_points_csv, read_polyline_csv, write_matrix_csv, write_points_csv,
    write_polyline_csv, Sidecar,
};
pub use polyline::PolylinePath;

/// Absolute tolerance used when validating metric axioms.
pub const TAU_METRIC: f64 = 1e-9;

/// Metric induced on coordinate vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Euclidean,
    L1,
    Linf,
    /// Sum of euclidean norms over consecutive coordinate blocks of the given
    /// size: the l1 product of euclidean factors.
    ProductL1 { block: usize },
}

impl Metric {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Metric::Linf => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            Metric::ProductL1 { block } => a
                .chunks(block)
                .zip(b.chunks(block))
                .map(|(u, v)| Metric::Euclidean.eval(u, v))
                .sum(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Euclidean => write!(f, "euclidean"),
            Metric::L1 => write!(f, "l1"),
            Metric::Linf => write!(f, "linf"),
            Metric::ProductL1 { block } => write!(f, "product_l1:{block}"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "l1" => Ok(Metric::L1),
            "linf" => Ok(Metric::Linf),
            _ => {
                if let Some(block) = s.strip_prefix("product_l1:") {
                    match block.parse::<usize>() {
                        Ok(b) if b > 0 => return Ok(Metric::ProductL1 { block: b }),
                        _ => {}
                    }
                }
                Err(Error::UnknownMetric(s.to_string()))
            }
        }
    }
}

/// Provenance attached to a space: which generator made it and with what
/// parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpaceInfo {
    pub generator: String,
    pub params: serde_json::Value,
    /// Target sample spacing, when the space samples a continuum.
    pub spacing: Option<f64>,
    /// Truncation depth for infinite constructions.
    pub truncation_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
enum Storage {
    Coords {
        dim: usize,
        data: Vec<f64>,
        metric: Metric,
    },
    Matrix {
        data: Vec<f64>,
    },
}

/// A finite metric space on the dense ids `0..len`, with a basepoint.
///
/// Immutable once built; distances are either computed from coordinates or
/// read from a stored matrix.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    len: usize,
    storage: Storage,
    basepoint: usize,
    info: SpaceInfo,
}

impl FiniteMetricSpace {
    pub fn from_points(coords: &[Vec<f64>], metric: Metric, basepoint: usize) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("point cloud"));
        }
        let dim = coords[0].len();
        if let Metric::ProductL1 { block } = metric {
            if !dim.is_multiple_of(block) {
                return Err(Error::InvalidParameter(format!(
                    "dimension {dim} is not a multiple of block size {block}"
                )));
            }
        }
        let mut data = Vec::with_capacity(coords.len() * dim);
        for (index, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    found: c.len(),
                });
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "point {index} has a non-finite coordinate"
                )));
            }
            data.extend_from_slice(c);
        }
        if basepoint >= coords.len() {
            return Err(Error::BasepointOutOfRange {
                basepoint,
                len: coords.len(),
            });
        }
        Ok(Self {
            len: coords.len(),
            storage: Storage::Coords { dim, data, metric },
            basepoint,
            info: SpaceInfo::default(),
        })
    }

    /// Builds a space from an explicit distance matrix, validating the metric
    /// axioms up to [`TAU_METRIC`].
    pub fn from_matrix(matrix: &[Vec<f64>], basepoint: usize) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Empty("distance matrix"));
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    row,
                    expected: n,
                    found: r.len(),
                });
            }
        }
        if basepoint >= n {
            return Err(Error::BasepointOutOfRange { basepoint, len: n });
        }
        validate_matrix(n, |i, j| matrix[i][j])?;
        let mut data = Vec::with_capacity(n * n);
        for r in matrix {
            data.extend_from_slice(r);
        }
        Ok(Self {
            len: n,
            storage: Storage::Matrix { data },
            basepoint,
            info: SpaceInfo::default(),
        })
    }

    pub fn with_info(mut self, info: SpaceInfo) -> Self {
        self.info = info;
        self
    }

    pub fn with_basepoint(mut self, basepoint: usize) -> Result<Self> {
        if basepoint >= self.len {
            return Err(Error::BasepointOutOfRange {
                basepoint,
                len: self.len,
            });
        }
        self.basepoint = basepoint;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn info(&self) -> &SpaceInfo {
        &self.info
    }

    /// Name of the metric, `"matrix"` for matrix-backed spaces.
    pub fn metric_name(&self) -> String {
        match &self.storage {
            Storage::Coords { metric, .. } => metric.to_string(),
            Storage::Matrix { .. } => "matrix".to_string(),
        }
    }

    pub fn metric(&self) -> Option<Metric> {
        match &self.storage {
            Storage::Coords { metric, .. } => Some(*metric),
            Storage::Matrix { .. } => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.storage {
            Storage::Coords { dim, .. } => Some(*dim),
            Storage::Matrix { .. } => None,
        }
    }

    pub fn coords(&self, i: usize) -> Option<&[f64]> {
        match &self.storage {
            Storage::Coords { dim, data, .. } => Some(&data[i * dim..(i + 1) * dim]),
            Storage::Matrix { .. } => None,
        }
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Coords { dim, data, metric } => {
                metric.eval(&data[i * dim..(i + 1) * dim], &data[j * dim..(j + 1) * dim])
            }
            Storage::Matrix { data } => data[i * self.len + j],
        }
    }

    pub fn check_id(&self, id: usize) -> Result<()> {
        if id < self.len {
            Ok(())
        } else {
            Err(Error::PointOutOfRange { id, len: self.len })
        }
    }

    /// Full distance matrix. Quadratic in memory; meant for small spaces.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.len)
            .map(|i| (0..self.len).map(|j| self.dist(i, j)).collect())
            .collect()
    }

    /// Checks the metric axioms within [`TAU_METRIC`]. Cubic in `len`.
    pub fn validate(&self) -> Result<()> {
        validate_matrix(self.len, |i, j| self.dist(i, j))
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.len {
            for j in i + 1..self.len {
                d = d.max(self.dist(i, j));
            }
        }
        d
    }

    /// Hex SHA-256 over the metric name and the raw coordinate or matrix bits.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.metric_name().as_bytes());
        h.update((self.len as u64).to_le_bytes());
        let data = match &self.storage {
            Storage::Coords { dim, data, .. } => {
                h.update((*dim as u64).to_le_bytes());
                data
            }
            Storage::Matrix { data } => data,
        };
        for x in data {
            h.update(x.to_bits().to_le_bytes());
        }
        h.finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>()
    }

    /// Index of the nearest point to `x` (coordinate spaces only); ties go to
    /// the smallest id.
    pub fn nearest(&self, x: &[f64]) -> Option<(usize, f64)> {
        let Storage::Coords { dim, data, metric } = &self.storage else {
            return None;
        };
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.len {
            let d = metric.eval(x, &data[i * dim..(i + 1) * dim]);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best
    }
}

fn validate_matrix(n: usize, d: impl Fn(usize, usize) -> f64) -> Result<()> {
    for i in 0..n {
        let v = d(i, i);
        if v.abs() > TAU_METRIC || !v.is_finite() {
            return Err(Error::NonzeroDiagonal { i, value: v });
        }
        for j in 0..n {
            let dij = d(i, j);
            if !dij.is_finite() || dij < -TAU_METRIC {
                return Err(Error::NegativeDistance { i, j, value: dij });
            }
            if j > i {
                let dji = d(j, i);
                if (dij - dji).abs() > TAU_METRIC {
                    return Err(Error::Asymmetric { i, j, dij, dji });
                }
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            let dik = d(i, k);
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let (dij, djk) = (d(i, j), d(j, k));
                if dik > dij + djk + TAU_METRIC {
                    return Err(Error::TriangleViolation {
                        i,
                        j,
                        k,
                        dik,
                        dij,
                        djk,
                    });
                }
            }
        }
    }
    Ok(())
}
