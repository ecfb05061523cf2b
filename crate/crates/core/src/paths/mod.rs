//! θ-paths, lazification, grid homotopies and polyline discretisation.

mod discretize;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::FiniteMetricSpace;
use crate::theta_graph::{SpanningTree, ThetaGraph};

pub use discretize::{discretize, discretize_at, refinement_certificate, Discretization, Snap};

/// A finite sequence of point ids. Validity at a scale is checked against a
/// space with [`ThetaPath::validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaPath {
    pub theta: f64,
    pub points: Vec<usize>,
}

/// First reason a path or grid fails to be θ-Lipschitz.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Empty,
    PointOutOfRange { id: usize },
    /// `dist(row[index], row[index + 1]) > θ`.
    Step { row: usize, index: usize, distance: f64 },
    /// `dist(rows[row][index], rows[row + 1][index]) > θ`.
    Column { row: usize, index: usize, distance: f64 },
    RaggedRow { row: usize, expected: usize, found: usize },
    EndpointMoved { row: usize, column: usize },
    FirstRowMismatch,
    LastRowMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty sequence"),
            Violation::PointOutOfRange { id } => write!(f, "point id {id} out of range"),
            Violation::Step { row, index, distance } => {
                write!(f, "row {row}: step {index} has distance {distance:.6}")
            }
            Violation::Column { row, index, distance } => {
                write!(f, "rows {row}->{}: column {index} has distance {distance:.6}", row + 1)
            }
            Violation::RaggedRow { row, expected, found } => {
                write!(f, "row {row} has length {found}, expected {expected}")
            }
            Violation::EndpointMoved { row, column } => {
                write!(f, "row {row}: endpoint column {column} moved")
            }
            Violation::FirstRowMismatch => write!(f, "first row is not a lazification of the source path"),
            Violation::LastRowMismatch => write!(f, "last row is not a lazification of the target path"),
        }
    }
}

fn check_row(space: &FiniteMetricSpace, theta: f64, row_idx: usize, row: &[usize]) -> std::result::Result<(), Violation> {
    if row.is_empty() {
        return Err(Violation::Empty);
    }
    if let Some(&id) = row.iter().find(|&&id| id >= space.len()) {
        return Err(Violation::PointOutOfRange { id });
    }
    for (index, w) in row.windows(2).enumerate() {
        let distance = space.dist(w[0], w[1]);
        if distance > theta {
            return Err(Violation::Step { row: row_idx, index, distance });
        }
    }
    Ok(())
}

impl ThetaPath {
    /// Path checked against `space` at scale `theta`.
    pub fn new(space: &FiniteMetricSpace, theta: f64, points: Vec<usize>) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::NonPositiveScale(theta));
        }
        let p = Self { theta, points };
        match p.validate(space) {
            Ok(()) => Ok(p),
            Err(Violation::Step { index, distance, .. }) => Err(Error::NotThetaPath { index, distance, theta }),
            Err(Violation::PointOutOfRange { id }) => Err(Error::PointOutOfRange { id, len: space.len() }),
            Err(_) => Err(Error::Empty("path")),
        }
    }

    pub fn constant(theta: f64, point: usize) -> Self {
        Self { theta, points: vec![point] }
    }

    /// Ok iff every step is at most θ; otherwise the first violating step.
    pub fn validate(&self, space: &FiniteMetricSpace) -> std::result::Result<(), Violation> {
        check_row(space, self.theta, 0, &self.points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> usize {
        self.points[0]
    }

    pub fn end(&self) -> usize {
        *self.points.last().unwrap()
    }

    pub fn is_closed(&self) -> bool {
        !self.points.is_empty() && self.start() == self.end()
    }

    /// `output[j] = points[schedule[j]]` for a monotone surjection onto the
    /// index range.
    pub fn lazify(&self, schedule: &[usize]) -> Result<Self> {
        let n = self.points.len();
        let ok = schedule.first() == Some(&0)
            && schedule.last() == Some(&(n - 1))
            && schedule.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1);
        if !ok {
            return Err(Error::InvalidSchedule(format!(
                "schedule must be monotone and onto 0..={}",
                n - 1
            )));
        }
        Ok(Self {
            theta: self.theta,
            points: schedule.iter().map(|&i| self.points[i]).collect(),
        })
    }

    /// Pads with copies of the last point up to `width` entries.
    pub fn pad_to(&self, width: usize) -> Self {
        let mut points = self.points.clone();
        let last = self.end();
        points.resize(width.max(points.len()), last);
        Self { theta: self.theta, points }
    }

    /// Removes consecutive duplicates.
    pub fn delazify(&self) -> Self {
        Self {
            theta: self.theta,
            points: delazify(&self.points),
        }
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.theta != other.theta {
            return Err(Error::ScaleMismatch(self.theta, other.theta));
        }
        if self.end() != other.start() {
            return Err(Error::EndpointMismatch {
                end: self.end(),
                start: other.start(),
            });
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points[1..]);
        Ok(Self { theta: self.theta, points })
    }

    pub fn invert(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { theta: self.theta, points }
    }

    /// Same points at a larger scale.
    pub fn at_scale(&self, theta: f64) -> Self {
        Self { theta, points: self.points.clone() }
    }
}

pub fn delazify(points: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(points.len());
    for &p in points {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    out
}

/// Rows of equal length, consecutive rows within θ pointwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridHomotopy {
    pub theta: f64,
    pub rows: Vec<Vec<usize>>,
    pub endpoints_fixed: bool,
}

impl GridHomotopy {
    /// Checks the grid conditions alone.
    pub fn check_grid(&self, space: &FiniteMetricSpace) -> std::result::Result<(), Violation> {
        let first = self.rows.first().ok_or(Violation::Empty)?;
        let width = first.len();
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != width {
                return Err(Violation::RaggedRow { row: r, expected: width, found: row.len() });
            }
            check_row(space, self.theta, r, row)?;
        }
        for (r, pair) in self.rows.windows(2).enumerate() {
            for (index, (&a, &b)) in pair[0].iter().zip(&pair[1]).enumerate() {
                let distance = space.dist(a, b);
                if distance > self.theta {
                    return Err(Violation::Column { row: r, index, distance });
                }
            }
            if self.endpoints_fixed {
                for column in [0, width - 1] {
                    if pair[1][column] != first[column] {
                        return Err(Violation::EndpointMoved { row: r + 1, column });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Ok iff `h` is a θ-grid homotopy whose first and last rows are
/// lazifications of `from` and `to`.
pub fn verify_grid_homotopy(
    space: &FiniteMetricSpace,
    h: &GridHomotopy,
    from: &ThetaPath,
    to: &ThetaPath,
) -> std::result::Result<(), Violation> {
    h.check_grid(space)?;
    if delazify(&h.rows[0]) != delazify(&from.points) {
        return Err(Violation::FirstRowMismatch);
    }
    if delazify(h.rows.last().unwrap()) != delazify(&to.points) {
        return Err(Violation::LastRowMismatch);
    }
    Ok(())
}

/// Reads closed walks in the basepoint component as words in the non-tree
/// edges. Generator `g` is the `g`-th non-tree edge `(u, v)`, `u < v`, in
/// lexicographic order; letter `g + 1` traverses it from `u` to `v`.
#[derive(Clone, Debug)]
pub struct LoopEncoder {
    tree: SpanningTree,
    generators: Vec<(usize, usize)>,
    index: HashMap<(u32, u32), u32>,
}

impl LoopEncoder {
    pub fn new(graph: &ThetaGraph, root: usize) -> Self {
        let tree = graph.spanning_tree(root);
        let generators: Vec<(usize, usize)> = graph
            .edges()
            .filter(|&(u, v)| tree.contains(u) && !tree.is_tree_edge(u, v))
            .collect();
        let index = generators
            .iter()
            .enumerate()
            .map(|(g, &(u, v))| ((u as u32, v as u32), g as u32))
            .collect();
        Self { tree, generators, index }
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn generators(&self) -> &[(usize, usize)] {
        &self.generators
    }

    pub fn generator_of(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u < v { (u as u32, v as u32) } else { (v as u32, u as u32) };
        self.index.get(&key).map(|&g| g as usize)
    }

    /// Letter for one step `u -> v`, `None` for stays and tree edges.
    /// Assumes `{u, v}` is an edge or `u == v`.
    pub fn letter(&self, u: usize, v: usize) -> Option<i32> {
        if u == v {
            return None;
        }
        self.generator_of(u, v)
            .map(|g| if u < v { g as i32 + 1 } else { -(g as i32 + 1) })
    }

    /// Word of a walk; steps must be edges of `graph` or stays. Open walks are
    /// accepted and read the same way.
    pub fn walk_to_word(&self, graph: &ThetaGraph, points: &[usize]) -> Result<Vec<i32>> {
        if let Some(&v) = points.iter().find(|&&v| v >= graph.len() || !self.tree.contains(v)) {
            return Err(Error::ForeignComponent(v));
        }
        let mut word = Vec::new();
        for (i, w) in points.windows(2).enumerate() {
            if !graph.adjacent_or_equal(w[0], w[1]) {
                return Err(Error::NotThetaPath {
                    index: i,
                    distance: f64::NAN,
                    theta: graph.theta(),
                });
            }
            word.extend(self.letter(w[0], w[1]));
        }
        Ok(word)
    }

    /// Word of a closed path based at the tree root.
    pub fn loop_to_word(&self, graph: &ThetaGraph, path: &ThetaPath) -> Result<Vec<i32>> {
        if path.is_empty() {
            return Err(Error::Empty("path"));
        }
        if !path.is_closed() {
            return Err(Error::OpenPath);
        }
        if path.start() != self.tree.root() {
            return Err(Error::WrongBasepoint {
                expected: self.tree.root(),
                found: path.start(),
            });
        }
        self.walk_to_word(graph, &path.points)
    }

    /// The based loop `root ~> u -> v ~> root` along tree paths.
    pub fn generator_loop(&self, g: usize) -> Vec<usize> {
        let (u, v) = self.generators[g];
        let mut p = self.tree.path_from_root(u);
        p.extend(self.tree.path_to_root(v));
        p
    }
}

/// `{theta, points, space_hash}` on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathFile {
    pub theta: f64,
    pub points: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space_hash: Option<String>,
}

impl PathFile {
    pub fn new(path: &ThetaPath, space: Option<&FiniteMetricSpace>) -> Self {
        Self {
            theta: path.theta,
            points: path.points.clone(),
            space_hash: space.map(FiniteMetricSpace::content_hash),
        }
    }

    pub fn path(&self) -> ThetaPath {
        ThetaPath { theta: self.theta, points: self.points.clone() }
    }

    /// Rejects a file whose recorded hash differs from `space`.
    pub fn check_space(&self, space: &FiniteMetricSpace) -> Result<()> {
        match &self.space_hash {
            Some(h) if *h != space.content_hash() => Err(Error::Parse(format!(
                "path was recorded for space {h}, not {}",
                space.content_hash()
            ))),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{gen_circle, Metric};
    use proptest::prelude::*;

    fn square() -> FiniteMetricSpace {
        gen_circle(1.0, 4, &[0.0, 0.0]).unwrap()
    }

    #[test]
    fn validation() {
        let sq = square();
        assert!(ThetaPath::constant(0.1, 2).validate(&sq).is_ok());
        let p = ThetaPath { theta: 1.5, points: vec![0, 1, 2, 3, 0] };
        assert!(p.validate(&sq).is_ok());
        match p.at_scale(1.0).validate(&sq) {
            Err(Violation::Step { index: 0, distance, .. }) => assert!((distance - std::f64::consts::SQRT_2).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        assert!(ThetaPath::new(&sq, 1.0, vec![0, 1]).is_err());
        assert!(ThetaPath::new(&sq, 1.5, vec![0, 9]).is_err());
    }

    #[test]
    fn lazify_and_delazify() {
        let p = ThetaPath { theta: 1.0, points: vec![4, 7] };
        assert_eq!(p.lazify(&[0, 1]).unwrap(), p);
        assert_eq!(p.lazify(&[0, 0, 1]).unwrap().points, vec![4, 4, 7]);
        assert!(p.lazify(&[0, 0]).is_err());
        assert!(p.lazify(&[1, 0, 1]).is_err());
        let q = ThetaPath { theta: 1.0, points: vec![0, 0, 1, 1] };
        assert_eq!(q.delazify().points, vec![0, 1]);
        let r = ThetaPath { theta: 1.0, points: vec![0, 2, 2, 1] };
        assert!(r.lazify(&[0, 1, 1, 3]).is_err());
    }

    #[test]
    fn concat_and_invert() {
        let ab = ThetaPath { theta: 1.0, points: vec![0, 1] };
        let bc = ThetaPath { theta: 1.0, points: vec![1, 2] };
        assert_eq!(ab.concat(&bc).unwrap().points, vec![0, 1, 2]);
        assert_eq!(ab.invert().invert(), ab);
        let k = ab.concat(&ThetaPath::constant(1.0, 1)).unwrap();
        assert_eq!(k.delazify(), ab);
        assert!(matches!(ab.concat(&ab), Err(Error::EndpointMismatch { .. })));
        assert!(matches!(ab.concat(&bc.at_scale(2.0)), Err(Error::ScaleMismatch(..))));
    }

    #[test]
    fn two_step_contraction() {
        // four points with every pair within θ
        let s = FiniteMetricSpace::from_points(
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
            Metric::Euclidean,
            0,
        )
        .unwrap();
        let h = GridHomotopy {
            theta: 1.5,
            rows: vec![vec![0, 1, 2, 3, 0], vec![0, 1, 1, 0, 0], vec![0; 5]],
            endpoints_fixed: true,
        };
        let from = ThetaPath { theta: 1.5, points: vec![0, 1, 2, 3, 0] };
        assert!(verify_grid_homotopy(&s, &h, &from, &ThetaPath::constant(1.5, 0)).is_ok());
        let single = GridHomotopy { theta: 1.5, rows: vec![from.points.clone()], endpoints_fixed: true };
        assert!(verify_grid_homotopy(&s, &single, &from, &from).is_ok());
        let wrong = GridHomotopy { theta: 1.5, rows: vec![vec![0, 1, 2, 3, 0], vec![1; 5]], endpoints_fixed: true };
        assert!(matches!(wrong.check_grid(&s), Err(Violation::EndpointMoved { .. })));
    }

    #[test]
    fn pentagon_has_no_two_row_contraction() {
        let pent = gen_circle(1.0, 5, &[0.0, 0.0]).unwrap();
        let theta = pent.dist(0, 1) * 1.01;
        let from = ThetaPath { theta, points: vec![0, 1, 2, 3, 4, 0] };
        // every second row of width 6, every lazification of the constant
        let mut found = false;
        for code in 0..5usize.pow(4) {
            let mut mid = vec![0];
            let mut c = code;
            for _ in 0..4 {
                mid.push(c % 5);
                c /= 5;
            }
            mid.push(0);
            let h = GridHomotopy { theta, rows: vec![from.points.clone(), mid, vec![0; 6]], endpoints_fixed: true };
            found |= verify_grid_homotopy(&pent, &h, &from, &ThetaPath::constant(theta, 0)).is_ok();
            let h2 = GridHomotopy { theta, rows: vec![from.points.clone(), vec![0; 6]], endpoints_fixed: true };
            assert!(matches!(h2.check_grid(&pent), Err(Violation::Column { .. })));
        }
        assert!(!found);
    }

    fn c4_graph() -> (FiniteMetricSpace, ThetaGraph) {
        let sq = square();
        let g = ThetaGraph::build(&sq, 1.5).unwrap();
        (sq, g)
    }

    #[test]
    fn loop_words() {
        let (_, g) = c4_graph();
        let enc = LoopEncoder::new(&g, 0);
        // BFS from 0 takes 01 and 03, then 12; the only non-tree edge is 23
        assert_eq!(enc.generators(), &[(2, 3)]);
        let p = ThetaPath { theta: 1.5, points: vec![0, 1, 2, 3, 0] };
        assert_eq!(enc.loop_to_word(&g, &p).unwrap(), vec![1]);
        assert_eq!(enc.loop_to_word(&g, &p.invert()).unwrap(), vec![-1]);
        assert!(enc.loop_to_word(&g, &ThetaPath::constant(1.5, 0)).unwrap().is_empty());
        assert!(matches!(enc.loop_to_word(&g, &ThetaPath { theta: 1.5, points: vec![0, 1] }), Err(Error::OpenPath)));
        assert!(matches!(
            enc.loop_to_word(&g, &ThetaPath { theta: 1.5, points: vec![1, 2, 1] }),
            Err(Error::WrongBasepoint { .. })
        ));
        assert!(enc.loop_to_word(&g, &ThetaPath { theta: 1.5, points: vec![0, 2, 0] }).is_err());
        assert_eq!(enc.generator_loop(0), vec![0, 1, 2, 3, 0]);
    }

    #[test]
    fn foreign_component_rejected() {
        let g = ThetaGraph::from_edges(4, 1.0, &[(0, 1), (2, 3)]);
        let enc = LoopEncoder::new(&g, 0);
        let p = ThetaPath { theta: 1.0, points: vec![0, 1, 0, 2] };
        assert!(matches!(enc.walk_to_word(&g, &p.points), Err(Error::ForeignComponent(2))));
    }

    #[test]
    fn path_file_round_trip() {
        let sq = square();
        let p = ThetaPath { theta: 1.5, points: vec![0, 1, 0] };
        let f = PathFile::new(&p, Some(&sq));
        let back: PathFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back.path(), p);
        assert!(back.check_space(&sq).is_ok());
        let other = gen_circle(1.0, 5, &[0.0, 0.0]).unwrap();
        assert!(back.check_space(&other).is_err());
        let h = GridHomotopy { theta: 1.5, rows: vec![vec![0, 1]], endpoints_fixed: false };
        let js = serde_json::to_value(&h).unwrap();
        assert_eq!(js["rows"], serde_json::json!([[0, 1]]));
        assert_eq!(serde_json::from_value::<GridHomotopy>(js).unwrap(), h);
    }

    fn random_walk(g: &ThetaGraph, start: usize, steps: &[usize]) -> Vec<usize> {
        let mut w = vec![start];
        let mut cur = start;
        for &s in steps {
            let nb = g.neighbors(cur);
            let choice = s % (nb.len() + 1);
            if choice < nb.len() {
                cur = nb[choice] as usize;
            }
            w.push(cur);
        }
        w
    }

    proptest! {
        #[test]
        fn walks_are_theta_paths(
            pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 2..12),
            theta in 0.1f64..1.5,
            raw in prop::collection::vec(0usize..12, 2..10),
        ) {
            let s = FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0).unwrap();
            let g = ThetaGraph::build(&s, theta).unwrap();
            let n = s.len();
            let seq: Vec<usize> = raw.iter().map(|&r| r % n).collect();
            let is_walk = seq.windows(2).all(|w| g.adjacent_or_equal(w[0], w[1]));
            let path = ThetaPath { theta, points: seq };
            prop_assert_eq!(is_walk, path.validate(&s).is_ok());
        }

        #[test]
        fn words_are_multiplicative(
            pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 2..12),
            a in prop::collection::vec(0usize..20, 0..12),
            b in prop::collection::vec(0usize..20, 0..12),
        ) {
            let s = FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0).unwrap();
            let g = ThetaGraph::build(&s, 0.9).unwrap();
            let enc = LoopEncoder::new(&g, 0);
            let close = |w: Vec<usize>| {
                let back = enc.tree().path_to_root(*w.last().unwrap());
                let mut w = w;
                w.extend(&back[1..]);
                ThetaPath { theta: 0.9, points: w }
            };
            let p = close(random_walk(&g, 0, &a));
            let q = close(random_walk(&g, 0, &b));
            let mut wp = enc.loop_to_word(&g, &p).unwrap();
            let wq = enc.loop_to_word(&g, &q).unwrap();
            prop_assert_eq!(enc.loop_to_word(&g, &p.concat(&q).unwrap()).unwrap(), {
                wp.extend(wq); wp
            });
            let pi = p.concat(&p.invert()).unwrap();
            let mut stack: Vec<i32> = Vec::new();
            for l in enc.loop_to_word(&g, &pi).unwrap() {
                if stack.last() == Some(&-l) { stack.pop(); } else { stack.push(l); }
            }
            prop_assert!(stack.is_empty());
        }

        #[test]
        fn lazify_round_trip(points in prop::collection::vec(0usize..5, 1..10), extra in prop::collection::vec(0usize..10, 0..6)) {
            let p = ThetaPath { theta: 1.0, points };
            let n = p.len();
            let mut repeats = vec![1usize; n];
            for e in extra {
                repeats[e % n] += 1;
            }
            let schedule: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, repeats[i])).collect();
            let l = p.lazify(&schedule).unwrap();
            prop_assert_eq!(l.delazify(), p.delazify());
        }
    }
}
