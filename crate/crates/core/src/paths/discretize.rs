use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::spaces::{FiniteMetricSpace, Metric, PolylinePath};

use super::{GridHomotopy, ThetaPath};

/// Target cloud for snapping samples, with the largest allowed displacement.
#[derive(Clone, Copy, Debug)]
pub struct Snap<'a> {
    pub cloud: &'a FiniteMetricSpace,
    pub max_radius: f64,
}

/// Breakpoints `t_0 < ... < t_k` (arc length) with the curve's points there.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub theta: f64,
    pub breakpoints: Vec<f64>,
    pub samples: Vec<Vec<f64>>,
    /// Cloud ids after snapping.
    pub snapped: Option<Vec<usize>>,
    /// Largest snap displacement, 0 without snapping.
    pub snap_radius: f64,
}

impl Discretization {
    /// Scale at which [`Discretization::path`] is valid: `θ + 2 θ_snap`.
    pub fn effective_theta(&self) -> f64 {
        self.theta + 2.0 * self.snap_radius
    }

    /// Distinct samples as a euclidean space, basepoint at the first sample.
    pub fn sample_space(&self) -> Result<FiniteMetricSpace> {
        let (points, _) = dedupe(&self.samples);
        FiniteMetricSpace::from_points(&points, Metric::Euclidean, 0)
    }

    /// The θ-path: ids into [`Discretization::sample_space`], or cloud ids
    /// when snapped.
    pub fn path(&self) -> ThetaPath {
        let points = match &self.snapped {
            Some(ids) => ids.clone(),
            None => dedupe(&self.samples).1,
        };
        ThetaPath {
            theta: self.effective_theta(),
            points,
        }
    }
}

fn key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|x| (x + 0.0).to_bits()).collect()
}

fn dedupe(samples: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut seen = HashMap::new();
    let mut points = Vec::new();
    let ids = samples
        .iter()
        .map(|s| {
            *seen.entry(key(s)).or_insert_with(|| {
                points.push(s.clone());
                points.len() - 1
            })
        })
        .collect();
    (points, ids)
}

struct Locator<'a> {
    poly: &'a PolylinePath,
    cum: Vec<f64>,
}

impl<'a> Locator<'a> {
    fn new(poly: &'a PolylinePath) -> Self {
        Self {
            poly,
            cum: poly.vertex_arclengths(),
        }
    }

    /// Point at arc length `s`; exact at vertex arc lengths.
    fn at(&self, s: f64) -> Vec<f64> {
        let v = self.poly.vertices();
        let k = self.cum.partition_point(|&c| c <= s).saturating_sub(1);
        if self.cum[k] == s || k + 1 == v.len() {
            return v[k].clone();
        }
        let l = self.cum[k + 1] - self.cum[k];
        let t = ((s - self.cum[k]) / l).clamp(0.0, 1.0);
        v[k].iter().zip(&v[k + 1]).map(|(a, b)| a + t * (b - a)).collect()
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// θ-discretisation of a polyline: every vertex is a breakpoint and each
/// segment is cut into the fewest equal pieces of length at most θ.
pub fn discretize(poly: &PolylinePath, theta: f64, snap: Option<Snap<'_>>) -> Result<Discretization> {
    if !(theta > 0.0) {
        return Err(Error::NonPositiveScale(theta));
    }
    let loc = Locator::new(poly);
    let mut breakpoints = vec![0.0];
    for k in 0..loc.cum.len() - 1 {
        let (a, b) = (loc.cum[k], loc.cum[k + 1]);
        if b == a {
            continue;
        }
        let mut m = ((b - a) / theta).ceil().max(1.0) as usize;
        loop {
            let pts: Vec<f64> = (1..m).map(|j| a + (b - a) * j as f64 / m as f64).chain([b]).collect();
            let mut prev = loc.at(a);
            let ok = pts.iter().all(|&s| {
                let cur = loc.at(s);
                let good = euclid(&prev, &cur) <= theta;
                prev = cur;
                good
            });
            if ok {
                breakpoints.extend(pts);
                break;
            }
            m += 1;
        }
    }
    finish(&loc, theta, breakpoints, snap)
}

/// Discretisation with caller-chosen breakpoints, checked against the
/// defining condition.
pub fn discretize_at(
    poly: &PolylinePath,
    theta: f64,
    breakpoints: &[f64],
    snap: Option<Snap<'_>>,
) -> Result<Discretization> {
    if !(theta > 0.0) {
        return Err(Error::NonPositiveScale(theta));
    }
    let loc = Locator::new(poly);
    if breakpoints.first() != Some(&0.0) || breakpoints.last() != loc.cum.last() {
        return Err(Error::InvalidParameter("breakpoints must start at 0 and end at the length".into()));
    }
    if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("breakpoints must be strictly increasing".into()));
    }
    let distinct: Vec<f64> = {
        let mut c = loc.cum.clone();
        c.dedup();
        c
    };
    if distinct.iter().any(|c| breakpoints.binary_search_by(|b| b.partial_cmp(c).unwrap()).is_err()) {
        return Err(Error::InvalidParameter("every polyline vertex must be a breakpoint".into()));
    }
    for (index, w) in breakpoints.windows(2).enumerate() {
        let distance = euclid(&loc.at(w[0]), &loc.at(w[1]));
        if w[1] - w[0] > theta * (1.0 + 1e-12) || distance > theta {
            return Err(Error::NotThetaPath { index, distance: w[1] - w[0], theta });
        }
    }
    finish(&loc, theta, breakpoints.to_vec(), snap)
}

fn finish(loc: &Locator<'_>, theta: f64, breakpoints: Vec<f64>, snap: Option<Snap<'_>>) -> Result<Discretization> {
    let samples: Vec<Vec<f64>> = breakpoints.iter().map(|&s| loc.at(s)).collect();
    let mut out = Discretization {
        theta,
        breakpoints,
        samples,
        snapped: None,
        snap_radius: 0.0,
    };
    if let Some(snap) = snap {
        if snap.cloud.metric() != Some(Metric::Euclidean) || snap.cloud.dim() != Some(loc.poly.dim()) {
            return Err(Error::InvalidParameter(
                "snapping needs a euclidean point cloud of the polyline's dimension".into(),
            ));
        }
        let mut ids = Vec::with_capacity(out.samples.len());
        for (sample, x) in out.samples.iter().enumerate() {
            let (id, d) = snap.cloud.nearest(x).ok_or(Error::Empty("cloud"))?;
            if d > snap.max_radius {
                return Err(Error::SnapFailure { sample, radius: snap.max_radius });
            }
            out.snap_radius = out.snap_radius.max(d);
            ids.push(id);
        }
        out.snapped = Some(ids);
    }
    Ok(out)
}

/// Certificate that two discretisations of one polyline at the same scale
/// are θ-homotopic rel endpoints. Rows: the first lazified along the common
/// refinement, the refinement itself, the second lazified. Returns the space
/// of refinement samples, both paths in it and the grid.
pub fn refinement_certificate(
    poly: &PolylinePath,
    first: &Discretization,
    second: &Discretization,
) -> Result<(FiniteMetricSpace, ThetaPath, ThetaPath, GridHomotopy)> {
    if first.theta != second.theta {
        return Err(Error::ScaleMismatch(first.theta, second.theta));
    }
    let loc = Locator::new(poly);
    let mut merged: Vec<f64> = first.breakpoints.iter().chain(&second.breakpoints).copied().collect();
    merged.sort_by(|a, b| a.partial_cmp(b).unwrap());
    merged.dedup();
    let samples: Vec<Vec<f64>> = merged.iter().map(|&s| loc.at(s)).collect();
    let (points, ids) = dedupe(&samples);
    let space = FiniteMetricSpace::from_points(&points, Metric::Euclidean, 0)?;
    let lookup: HashMap<Vec<u64>, usize> = points.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
    let to_ids = |d: &Discretization| -> Vec<usize> { d.samples.iter().map(|s| lookup[&key(s)]).collect() };
    let lazy = |d: &Discretization, own: &[usize]| -> Vec<usize> {
        merged
            .iter()
            .map(|t| own[d.breakpoints.partition_point(|b| b <= t) - 1])
            .collect()
    };
    let (p1, p2) = (to_ids(first), to_ids(second));
    let rows = vec![lazy(first, &p1), ids, lazy(second, &p2)];
    let theta = first.theta;
    Ok((
        space,
        ThetaPath { theta, points: p1 },
        ThetaPath { theta, points: p2 },
        GridHomotopy {
            theta,
            rows,
            endpoints_fixed: true,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::verify_grid_homotopy;
    use proptest::prelude::*;

    #[test]
    fn unit_segment() {
        let seg = PolylinePath::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], false).unwrap();
        let d = discretize(&seg, 0.5, None).unwrap();
        assert_eq!(d.breakpoints, vec![0.0, 0.5, 1.0]);
        assert_eq!(d.path().len(), 3);
        assert_eq!(discretize(&seg, 2.0, None).unwrap().path().len(), 2);
        assert!(discretize(&seg, 0.0, None).is_err());
    }

    #[test]
    fn closed_square() {
        let sq = PolylinePath::closed_loop(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let d = discretize(&sq, 0.5, None).unwrap();
        let p = d.path();
        assert_eq!(p.len(), 9);
        assert!(p.is_closed());
        assert!(p.validate(&d.sample_space().unwrap()).is_ok());
        for c in [1.0, 2.0, 3.0] {
            assert!(d.breakpoints.contains(&c));
        }
    }

    #[test]
    fn snapping_widens_scale() {
        let seg = PolylinePath::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], false).unwrap();
        let cloud = FiniteMetricSpace::from_points(
            &[vec![0.0, 0.1], vec![0.5, -0.05], vec![1.0, 0.0], vec![5.0, 5.0]],
            Metric::Euclidean,
            0,
        )
        .unwrap();
        let d = discretize(&seg, 0.5, Some(Snap { cloud: &cloud, max_radius: 0.2 })).unwrap();
        assert_eq!(d.snapped.as_deref(), Some(&[0, 1, 2][..]));
        assert!((d.snap_radius - 0.1).abs() < 1e-12);
        assert!((d.effective_theta() - 0.7).abs() < 1e-12);
        assert!(d.path().validate(&cloud).is_ok());
        let err = discretize(&seg, 0.5, Some(Snap { cloud: &cloud, max_radius: 0.06 })).unwrap_err();
        assert!(matches!(err, Error::SnapFailure { sample: 0, .. }));
    }

    #[test]
    fn custom_breakpoints_are_checked() {
        let seg = PolylinePath::new(vec![vec![0.0], vec![1.0], vec![2.0]], false).unwrap();
        assert!(discretize_at(&seg, 0.6, &[0.0, 0.5, 1.0, 1.5, 2.0], None).is_ok());
        assert!(discretize_at(&seg, 0.6, &[0.0, 0.5, 1.1, 1.5, 2.0], None).is_err());
        assert!(discretize_at(&seg, 0.6, &[0.0, 0.5, 1.0, 2.0], None).is_err());
    }

    fn arb_polyline() -> impl Strategy<Value = PolylinePath> {
        (prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 2..7), any::<bool>()).prop_map(|(mut v, closed)| {
            if closed {
                v.push(v[0].clone());
            }
            PolylinePath::new(v, closed).unwrap()
        })
    }

    proptest! {
        #[test]
        fn discretisations_validate(poly in arb_polyline(), theta in 0.02f64..3.0, bigger in 1.0f64..4.0) {
            let d = discretize(&poly, theta, None).unwrap();
            let s = d.sample_space().unwrap();
            prop_assert!(d.path().validate(&s).is_ok());
            prop_assert!(d.path().at_scale(theta * bigger).validate(&s).is_ok());
            prop_assert_eq!(d.path().is_closed(), poly.is_closed() || d.path().start() == d.path().end());
        }

        #[test]
        fn refinements_certify(poly in arb_polyline(), theta in 0.05f64..2.0, cuts in prop::collection::vec(0.0f64..1.0, 0..8)) {
            let d1 = discretize(&poly, theta, None).unwrap();
            let mut extra = d1.breakpoints.clone();
            let len = *extra.last().unwrap();
            extra.extend(cuts.iter().map(|c| c * len));
            extra.sort_by(|a, b| a.partial_cmp(b).unwrap());
            extra.dedup();
            let d2 = discretize_at(&poly, theta, &extra, None).unwrap();
            let d3 = discretize(&poly, theta * 0.7, None).unwrap();
            let d3 = Discretization { theta, ..d3 };
            for other in [&d2, &d3] {
                let (space, p, q, h) = refinement_certificate(&poly, &d1, other).unwrap();
                prop_assert!(verify_grid_homotopy(&space, &h, &p, &q).is_ok());
            }
        }
    }
}
