//! Deterministic samplers for the benchmark spaces. Continua are represented
//! by finite samples at an explicit spacing; infinite constructions are
//! truncated at a depth recorded in the space metadata.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde_json::json;

use super::{FiniteMetricSpace, Metric, SpaceInfo};
use crate::error::{Error, Result};

/// Default target spacing for sampled continua, in ambient units.
pub const DEFAULT_SPACING: f64 = 0.05;

/// Default cap on the number of points of a circle product.
pub const CIRCLE_PRODUCT_CAP: usize = 100_000;

/// Accumulates points, merging coordinates that agree to 1e-9.
struct PointSet {
    points: Vec<Vec<f64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl PointSet {
    fn new() -> Self {
        Self {
            points: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn push(&mut self, p: Vec<f64>) -> usize {
        let key: Vec<i64> = p.iter().map(|x| (x * 1e9).round() as i64).collect();
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.points.len();
        self.index.insert(key, i);
        self.points.push(p);
        i
    }

    /// Samples the segment `a -> b` with steps no longer than `spacing`,
    /// endpoints included.
    fn segment(&mut self, a: &[f64], b: &[f64], spacing: f64) {
        let len = super::polyline::euclid(a, b);
        let steps = ((len / spacing).ceil() as usize).max(1);
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            self.push(a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect());
        }
    }

    fn build(self, metric: Metric, basepoint: usize, info: SpaceInfo) -> Result<FiniteMetricSpace> {
        Ok(FiniteMetricSpace::from_points(&self.points, metric, basepoint)?.with_info(info))
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}

/// `count` equally spaced points on a circle in the first two coordinates
/// of `center`, starting at angle 0.
pub fn gen_circle(radius: f64, count: usize, center: &[f64]) -> Result<FiniteMetricSpace> {
    require(count >= 1, "count must be at least 1")?;
    require(radius > 0.0, "radius must be positive")?;
    require(center.len() >= 2, "center needs at least 2 coordinates")?;
    let pts: Vec<Vec<f64>> = (0..count)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / count as f64;
            let mut p = center.to_vec();
            p[0] += radius * a.cos();
            p[1] += radius * a.sin();
            p
        })
        .collect();
    let info = SpaceInfo {
        generator: "circle".into(),
        params: json!({ "radius": radius, "count": count, "center": center }),
        spacing: Some(2.0 * radius * (PI / count as f64).sin()),
        ..Default::default()
    };
    Ok(FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0)?.with_info(info))
}

/// Per-circle sample counts `max(8, ceil(2*pi*(1/k) / spacing))`.
pub fn default_earring_samples(n_circles: usize, spacing: f64) -> Vec<usize> {
    (1..=n_circles)
        .map(|k| ((2.0 * PI / k as f64 / spacing).ceil() as usize).max(8))
        .collect()
}

/// Circles of radius `1/n` centred at `(1/n, 0)`; the shared origin is the
/// basepoint, index 0.
pub fn gen_hawaiian_earring(n_circles: usize, samples: &[usize]) -> Result<FiniteMetricSpace> {
    require(n_circles >= 1, "need at least one circle")?;
    require(
        samples.len() == n_circles,
        "one sample count per circle is required",
    )?;
    require(
        samples.iter().all(|&m| m >= 3),
        "each circle needs at least 3 samples",
    )?;
    let mut set = PointSet::new();
    set.push(vec![0.0, 0.0]);
    for (k, &m) in samples.iter().enumerate() {
        let r = 1.0 / (k + 1) as f64;
        for j in 1..m {
            let a = PI + 2.0 * PI * j as f64 / m as f64;
            set.push(vec![r + r * a.cos(), r * a.sin()]);
        }
    }
    let info = SpaceInfo {
        generator: "hawaiian_earring".into(),
        params: json!({ "n_circles": n_circles, "samples": samples }),
        spacing: samples
            .iter()
            .enumerate()
            .map(|(k, &m)| 2.0 / (k + 1) as f64 * (PI / m as f64).sin())
            .reduce(f64::max),
        truncation_depth: Some(n_circles),
        ..Default::default()
    };
    set.build(Metric::Euclidean, 0, info)
}

/// Telescope of shrinking closed cylinders. Stage `n` has radius `2^-n` over
/// the axis segment `[n, n+1]`; its surface (tube and both base disks) is
/// sampled on a polar grid with `samples_per_ring` points per ring, so the
/// spacing scales with the stage. The octagon of radius `2^-(n+1)` sits at
/// `x = n + 1/2`, joined to the tube by 8 radial spokes when `spokes` is set.
/// Basepoint: the leftmost ring point `(0, 1, 0)`.
pub fn gen_telescope(
    n_stages: usize,
    samples_per_ring: usize,
    spokes: bool,
) -> Result<FiniteMetricSpace> {
    require(n_stages >= 1, "need at least one stage")?;
    require(samples_per_ring >= 8, "samples_per_ring must be at least 8")?;
    let m = samples_per_ring;
    let mut set = PointSet::new();
    let mut finest = f64::INFINITY;
    for n in 0..n_stages {
        let r = 0.5f64.powi(n as i32);
        let x0 = n as f64;
        let h = 2.0 * PI * r / m as f64;
        finest = finest.min(h);
        let ring = |set: &mut PointSet, x: f64, rad: f64| {
            for k in 0..m {
                let a = 2.0 * PI * k as f64 / m as f64;
                set.push(vec![x, rad * a.cos(), rad * a.sin()]);
            }
        };
        let axial = 2 * (1.0 / (2.0 * h)).ceil() as usize;
        for i in 0..=axial {
            ring(&mut set, x0 + i as f64 / axial as f64, r);
        }
        let radial = (r / h).ceil() as usize;
        for x in [x0, x0 + 1.0] {
            set.push(vec![x, 0.0, 0.0]);
            for j in 1..radial {
                ring(&mut set, x, r * j as f64 / radial as f64);
            }
        }
        let mid = x0 + 0.5;
        for k in 0..8 {
            let a = k as f64 * FRAC_PI_4;
            set.push(vec![mid, 0.5 * r * a.cos(), 0.5 * r * a.sin()]);
        }
        if spokes {
            let steps = (0.5 * r / h).ceil() as usize;
            for k in 0..8 {
                let a = k as f64 * FRAC_PI_4;
                for t in 1..=steps {
                    let rad = 0.5 * r + 0.5 * r * t as f64 / steps as f64;
                    set.push(vec![mid, rad * a.cos(), rad * a.sin()]);
                }
            }
        }
    }
    let info = SpaceInfo {
        generator: "telescope".into(),
        params: json!({ "n_stages": n_stages, "samples_per_ring": samples_per_ring, "spokes": spokes }),
        spacing: Some(finest),
        truncation_depth: Some(n_stages),
        notes: vec!["stage n is sampled at spacing 2*pi*2^-n/samples_per_ring".into()],
    };
    set.build(Metric::Euclidean, 0, info)
}

/// Product of sampled circles of radii `2^-n`, `n = 0..n_factors`, under the
/// l1 sum of the factor distances. Points are ordered lexicographically with
/// the last factor varying fastest; the basepoint has every angle at 0.
pub fn gen_circle_product(
    n_factors: usize,
    samples: &[usize],
    cap: usize,
) -> Result<FiniteMetricSpace> {
    require(n_factors >= 1, "need at least one factor")?;
    require(samples.len() == n_factors, "one sample count per factor")?;
    require(samples.iter().all(|&m| m >= 1), "sample counts must be positive")?;
    let count = samples
        .iter()
        .try_fold(1usize, |acc, &m| acc.checked_mul(m))
        .unwrap_or(usize::MAX);
    if count > cap {
        return Err(Error::TooManyPoints { count, cap });
    }
    let mut pts = Vec::with_capacity(count);
    let mut idx = vec![0usize; n_factors];
    for _ in 0..count {
        let mut p = Vec::with_capacity(2 * n_factors);
        for (f, &k) in idx.iter().enumerate() {
            let r = 0.5f64.powi(f as i32);
            let a = 2.0 * PI * k as f64 / samples[f] as f64;
            p.push(r * a.cos());
            p.push(r * a.sin());
        }
        pts.push(p);
        for f in (0..n_factors).rev() {
            idx[f] += 1;
            if idx[f] < samples[f] {
                break;
            }
            idx[f] = 0;
        }
    }
    let info = SpaceInfo {
        generator: "circle_product".into(),
        params: json!({ "n_factors": n_factors, "samples": samples }),
        spacing: samples
            .iter()
            .enumerate()
            .map(|(f, &m)| 2.0 * 0.5f64.powi(f as i32) * (PI / m as f64).sin())
            .reduce(f64::max),
        truncation_depth: Some(n_factors),
        ..Default::default()
    };
    Ok(FiniteMetricSpace::from_points(&pts, Metric::ProductL1 { block: 2 }, 0)?.with_info(info))
}

/// Segments of the Hawaiian window truncated at `depth`: the square with
/// corners `(+-1, +-1)`, and at each level a central cross in every square of
/// the left-most column.
pub fn hawaiian_window_segments(depth: usize) -> Vec<([f64; 2], [f64; 2])> {
    let mut segs = vec![
        ([1.0, 1.0], [-1.0, 1.0]),
        ([-1.0, 1.0], [-1.0, -1.0]),
        ([-1.0, -1.0], [1.0, -1.0]),
        ([1.0, -1.0], [1.0, 1.0]),
    ];
    for level in 0..depth {
        let side = 2.0 / (1u64 << level) as f64;
        let rows = 1usize << level;
        for row in 0..rows {
            let y0 = -1.0 + row as f64 * side;
            let (xl, xr) = (-1.0, -1.0 + side);
            let (xm, ym) = (-1.0 + side / 2.0, y0 + side / 2.0);
            segs.push(([xl, ym], [xr, ym]));
            segs.push(([xm, y0], [xm, y0 + side]));
        }
    }
    segs
}

/// Samples [`hawaiian_window_segments`] at `spacing`. Basepoint: corner `(1, 1)`.
pub fn gen_hawaiian_window(depth: usize, spacing: f64) -> Result<FiniteMetricSpace> {
    require(spacing > 0.0, "spacing must be positive")?;
    let mut set = PointSet::new();
    for (a, b) in hawaiian_window_segments(depth) {
        set.segment(&a, &b, spacing);
    }
    let info = SpaceInfo {
        generator: "hawaiian_window".into(),
        params: json!({ "depth": depth, "spacing": spacing }),
        spacing: Some(spacing),
        truncation_depth: Some(depth),
        ..Default::default()
    };
    set.build(Metric::Euclidean, 0, info)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SineVariant {
    /// Planar `sin(1/x)` graph with the limit segment and a connecting arc.
    Flat,
    /// `z = sin(pi/x)` strip in 3D with the limit square and two side squares.
    ThreeSquares,
}

/// Walks `x -> (x, f(x))` from `x = 1` down to `x_min` with chords close to
/// `spacing`.
fn graph_abscissae(f: impl Fn(f64) -> f64, x_min: f64, spacing: f64) -> Vec<f64> {
    let mut xs = vec![1.0];
    let mut x = 1.0;
    while x > x_min {
        // step in x so that the chord is about `spacing`: bisect on the chord
        let (y, mut lo, mut hi) = (f(x), 0.0, x - x_min);
        let chord = |dx: f64| (dx * dx + (f(x - dx) - y).powi(2)).sqrt();
        if chord(hi) <= spacing {
            xs.push(x_min);
            break;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if chord(mid) <= spacing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let step = lo.max(1e-12);
        x -= step;
        xs.push(x);
    }
    xs
}

/// The `sin(1/x)`-type spaces truncated at `x >= resolution`, sampled at
/// spacing `resolution`.
///
/// `Flat`: graph of `sin(1/x)` on `[resolution, 1]`, segment `I` from
/// `(0,-1)` to `(0,1)`, and a connector from `(1, sin 1)` straight down to
/// `(1,-1)`, a quarter circle of radius 1 centred at `(0,-1)` down to `(0,-2)`,
/// then up to `(0,-1)`. Basepoint `(0,-1)`.
///
/// `ThreeSquares`: surface `z = sin(pi/x)` over `[resolution,1] x [-1,1]`,
/// limit square `A = {0} x [-1,1]^2` and side squares `B1, B2` in the planes
/// `y = -1` and `y = 1` over `[0,1] x [-1,1]`. Basepoint `(0,-1,-1)`.
pub fn gen_sine_space(variant: SineVariant, resolution: f64) -> Result<FiniteMetricSpace> {
    require(resolution > 0.0 && resolution < 1.0, "resolution must lie in (0, 1)")?;
    let s = resolution;
    let mut set = PointSet::new();
    let notes = match variant {
        SineVariant::Flat => {
            set.segment(&[0.0, -1.0], &[0.0, 1.0], s);
            for x in graph_abscissae(|x| (1.0 / x).sin(), s, s) {
                set.push(vec![x, (1.0 / x).sin()]);
            }
            set.segment(&[1.0, 1f64.sin()], &[1.0, -1.0], s);
            let arc_steps = ((FRAC_PI_2 / s).ceil() as usize).max(1);
            for t in 0..=arc_steps {
                let a = -FRAC_PI_2 * t as f64 / arc_steps as f64;
                set.push(vec![a.cos(), -1.0 + a.sin()]);
            }
            set.segment(&[0.0, -2.0], &[0.0, -1.0], s);
            vec!["connector: vertical drop at x=1, quarter circle centred (0,-1), rise to (0,-1)".to_string()]
        }
        SineVariant::ThreeSquares => {
            let grid = |set: &mut PointSet, f: &dyn Fn(f64, f64) -> Vec<f64>, nu: usize, nv: usize| {
                for i in 0..=nu {
                    for j in 0..=nv {
                        set.push(f(i as f64 / nu as f64, j as f64 / nv as f64));
                    }
                }
            };
            let n2 = (2.0 / s).ceil() as usize;
            let n1 = (1.0 / s).ceil() as usize;
            grid(&mut set, &|u, v| vec![0.0, -1.0 + 2.0 * u, -1.0 + 2.0 * v], n2, n2);
            for y in [-1.0, 1.0] {
                grid(&mut set, &|u, v| vec![u, y, -1.0 + 2.0 * v], n1, n2);
            }
            for x in graph_abscissae(|x| (PI / x).sin(), s, s) {
                for j in 0..=n2 {
                    set.push(vec![x, -1.0 + 2.0 * j as f64 / n2 as f64, (PI / x).sin()]);
                }
            }
            vec!["B1, B2 are the side squares y=-1 and y=1 over [0,1]x[-1,1]".to_string()]
        }
    };
    let name = match variant {
        SineVariant::Flat => "flat",
        SineVariant::ThreeSquares => "three_squares",
    };
    let info = SpaceInfo {
        generator: "sine_space".into(),
        params: json!({ "variant": name, "resolution": resolution }),
        spacing: Some(s),
        truncation_depth: None,
        notes,
    };
    set.build(Metric::Euclidean, 0, info)
}

/// Concentric rings between `r_in` and `r_out`, radial step and arc spacing
/// at most `spacing`. Basepoint `(r_in, 0)`.
pub fn gen_annulus(r_in: f64, r_out: f64, spacing: f64) -> Result<FiniteMetricSpace> {
    require(r_in > 0.0 && r_in < r_out, "need 0 < r_in < r_out")?;
    require(spacing > 0.0, "spacing must be positive")?;
    let rings = ((r_out - r_in) / spacing).ceil() as usize;
    let mut pts = Vec::new();
    for j in 0..=rings {
        let r = r_in + (r_out - r_in) * j as f64 / rings as f64;
        let count = ((2.0 * PI * r / spacing).ceil() as usize).max(8);
        for k in 0..count {
            let a = 2.0 * PI * k as f64 / count as f64;
            pts.push(vec![r * a.cos(), r * a.sin()]);
        }
    }
    let info = SpaceInfo {
        generator: "annulus".into(),
        params: json!({ "r_in": r_in, "r_out": r_out, "spacing": spacing }),
        spacing: Some(spacing),
        ..Default::default()
    };
    Ok(FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0)?.with_info(info))
}

/// Level sets `Y_n` of `2^n` points at angles `2*pi*(k+1/2)/2^n` on unit
/// circles at height `n`, each joined to its two closest points in `Y_{n+1}`
/// by segments sampled at `spacing`. Basepoint: the single point of `Y_0`.
pub fn gen_circle_tree(n_levels: usize, spacing: f64) -> Result<FiniteMetricSpace> {
    require(n_levels >= 1, "need at least one level")?;
    require(n_levels <= 20, "at most 20 levels")?;
    require(spacing > 0.0, "spacing must be positive")?;
    let y = |n: usize, k: usize| {
        let a = 2.0 * PI * (k as f64 + 0.5) / (1u64 << n) as f64;
        vec![a.cos(), a.sin(), n as f64]
    };
    let mut set = PointSet::new();
    for n in 0..n_levels {
        for k in 0..(1usize << n) {
            set.push(y(n, k));
        }
    }
    for n in 0..n_levels.saturating_sub(1) {
        for k in 0..(1usize << n) {
            for c in [2 * k, 2 * k + 1] {
                set.segment(&y(n, k), &y(n + 1, c), spacing);
            }
        }
    }
    let info = SpaceInfo {
        generator: "circle_tree".into(),
        params: json!({ "n_levels": n_levels, "spacing": spacing }),
        spacing: Some(spacing),
        truncation_depth: Some(n_levels),
        ..Default::default()
    };
    set.build(Metric::Euclidean, 0, info)
}
