use crate::error::{Error, Result};

/// A piecewise-linear path through ambient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PolylinePath {
    vertices: Vec<Vec<f64>>,
    closed: bool,
}

impl PolylinePath {
    /// Needs at least two vertices of equal dimension; a closed polyline must
    /// repeat its first vertex at the end.
    pub fn new(vertices: Vec<Vec<f64>>, closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidParameter(
                "a polyline needs at least 2 vertices".into(),
            ));
        }
        let dim = vertices[0].len();
        for (index, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        if closed && vertices.first() != vertices.last() {
            return Err(Error::InvalidParameter(
                "closed polyline must end at its first vertex".into(),
            ));
        }
        Ok(Self { vertices, closed })
    }

    /// Closes `vertices` by appending the first vertex.
    pub fn closed_loop(mut vertices: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(first) = vertices.first().cloned() {
            vertices.push(first);
        }
        Self::new(vertices, true)
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        self.vertices
            .windows(2)
            .map(|w| euclid(&w[0], &w[1]))
            .collect()
    }

    /// Cumulative arc length at each vertex.
    pub fn vertex_arclengths(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.vertices.len());
        let mut acc = 0.0;
        out.push(0.0);
        for l in self.segment_lengths() {
            acc += l;
            out.push(acc);
        }
        out
    }

    pub fn length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Point at arc length `s`, clamped to the ends.
    pub fn point_at(&self, s: f64) -> Vec<f64> {
        let lens = self.segment_lengths();
        let mut rest = s.max(0.0);
        for (k, &l) in lens.iter().enumerate() {
            if rest <= l || k + 1 == lens.len() {
                let t = if l > 0.0 { (rest / l).min(1.0) } else { 0.0 };
                let (a, b) = (&self.vertices[k], &self.vertices[k + 1]);
                return a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
            }
            rest -= l;
        }
        self.vertices[0].clone()
    }
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
