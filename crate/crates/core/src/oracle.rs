//! Brute-force reference computations for small inputs.
//!
//! Nothing here shares code with the main pipeline: cells are found by
//! enumerating vertex subsets, and homology comes from boundary matrices
//! reduced by plain elementary operations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decider::{Budget, Decider, Obstruction, Verdict};
use crate::error::{Error, Result};
use crate::paths::{verify_grid_homotopy, ThetaPath};
use crate::presentation::snf::check_contract;
use crate::presentation::{
    is_zero_class, presentation_at_scale, smith_normal_form, AbelianInvariants, IntMatrix, ModelOptions, ScaleModel,
};
use crate::spaces::{FiniteMetricSpace, Metric};
use crate::theta_graph::critical_scales;

/// Largest space the oracle accepts; subset enumeration is quartic.
pub const MAX_POINTS: usize = 40;

/// `x / p` rounded to the nearest integer.
fn round_quotient(x: &BigInt, p: &BigInt) -> BigInt {
    let (q, r) = x.div_mod_floor(p);
    if (&r + &r).abs() > p.abs() {
        q + 1
    } else {
        q
    }
}

/// Smith diagonal by textbook elementary operations: Euclid on column `t`
/// and row `t` with the smallest entry of that column or row as pivot, then
/// a row addition whenever the pivot fails to divide the rest of the block.
/// Returns the nonzero invariant factors, all positive.
pub fn reference_invariant_factors(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_zero())
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            // clear column t below the pivot
            while let Some(i) = (t..rows).filter(|&i| !a[i][t].is_zero()).min_by_key(|&i| a[i][t].abs()) {
                a.swap(t, i);
                if (t + 1..rows).all(|i| a[i][t].is_zero()) {
                    break;
                }
                for i in t + 1..rows {
                    if a[i][t].is_zero() {
                        continue;
                    }
                    let q = round_quotient(&a[i][t], &a[t][t]);
                    for j in t..cols {
                        let x = &a[t][j] * &q;
                        a[i][j] -= x;
                    }
                }
            }
            // clear row t right of the pivot
            while let Some(j) = (t..cols).filter(|&j| !a[t][j].is_zero()).min_by_key(|&j| a[t][j].abs()) {
                for row in a.iter_mut() {
                    row.swap(t, j);
                }
                if (t + 1..cols).all(|j| a[t][j].is_zero()) {
                    break;
                }
                for j in t + 1..cols {
                    if a[t][j].is_zero() {
                        continue;
                    }
                    let q = round_quotient(&a[t][j], &a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        let x = &row[t] * &q;
                        row[j] -= x;
                    }
                }
            }
            if (t + 1..rows).any(|i| !a[i][t].is_zero()) {
                continue;
            }
            // pivot must divide the rest of the block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let x = a[i][j].clone();
                        a[t][j] += x;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
    }
    out
}

/// Seeded matrix with both dimensions in `1..=max_dim` and entries in
/// `-max_entry..=max_entry`; about a third of the seeds give sparse matrices.
pub fn random_matrix(seed: u64, max_dim: usize, max_entry: i64) -> Vec<Vec<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = rng.gen_range(1..=max_dim);
    let c = rng.gen_range(1..=max_dim);
    let density = if rng.gen_range(0..3) == 0 { 0.2 } else { 1.0 };
    (0..r)
        .map(|_| {
            (0..c)
                .map(|_| if rng.gen_bool(density) { rng.gen_range(-max_entry..=max_entry) } else { 0 })
                .collect()
        })
        .collect()
}

/// Hand-picked hard cases: zero and empty blocks, coprime diagonals, rank
/// one, entry growth, values near the `i64` range.
pub fn adversarial_matrices() -> Vec<Vec<Vec<i64>>> {
    let mut out = vec![
        vec![],
        vec![vec![0]],
        vec![vec![1]],
        vec![vec![-7]],
        vec![vec![0; 7]; 5],
        vec![vec![2, 0, 0, 0], vec![0, 3, 0, 0], vec![0, 0, 5, 0], vec![0, 0, 0, 7]],
        vec![vec![4, 0], vec![0, 6]],
        vec![vec![6, 10, 15]],
        vec![vec![6], vec![10], vec![15]],
        vec![vec![1; 12]; 12],
        vec![vec![i64::MAX / 2, i64::MAX / 2 - 1], vec![i64::MAX / 2 - 1, i64::MAX / 2 - 2]],
        vec![vec![i64::MIN + 1, 0], vec![0, i64::MAX]],
    ];
    let u: Vec<i64> = (1..=6).map(|k| 2 * k).collect();
    let v: Vec<i64> = (1..=6).map(|k| 3 * k - 1).collect();
    out.push(u.iter().map(|a| v.iter().map(|b| a * b).collect()).collect());
    let (mut a, mut b) = (1i64, 1i64);
    for _ in 0..40 {
        (a, b) = (b, a + b);
    }
    out.push(vec![vec![b, a], vec![a, b - a]]);
    out.push((0..12).map(|i| (0..12).map(|j| if j >= i { 1 + (i * j) as i64 % 5 } else { 0 }).collect()).collect());
    out.push((0..12).map(|i| (0..12).map(|j| ((i + 1) * (j + 2)) as i64 % 7 * 99 - 300).collect()).collect());
    out.push((0..10).map(|i| (0..10).map(|j| if i == j { 2 } else if j == i + 1 { -1 } else { 0 }).collect()).collect());
    out
}

/// Main SNF of `m`: contract check, then diagonal against
/// [`reference_invariant_factors`].
pub fn check_snf(m: &[Vec<i64>]) -> std::result::Result<(), String> {
    let cols = m.first().map_or(0, Vec::len);
    let im = IntMatrix::from_rows(m, cols);
    let snf = smith_normal_form(&im);
    check_contract(&im, &snf)?;
    let main: Vec<BigInt> = snf.diagonal().into_iter().filter(|x| !x.is_zero()).collect();
    let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let reference = reference_invariant_factors(&big);
    if main != reference {
        return Err(format!("diagonal {main:?} differs from reference {reference:?}"));
    }
    Ok(())
}

/// The 2-complex on the scale graph of the basepoint's component, with a
/// 2-cell on every 3-cycle and every 4-cycle.
#[derive(Clone, Debug)]
pub struct FilledComplex {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub cells: Vec<Vec<usize>>,
    factors: std::sync::OnceLock<Vec<BigInt>>,
}

impl FilledComplex {
    pub fn build(space: &FiniteMetricSpace, theta: f64, basepoint: usize) -> Result<Self> {
        space.check_id(basepoint)?;
        if space.len() > MAX_POINTS {
            return Err(Error::TooManyPoints { count: space.len(), cap: MAX_POINTS });
        }
        let n = space.len();
        let adj = |i: usize, j: usize| i != j && space.dist(i, j) <= theta;
        let mut seen = vec![false; n];
        seen[basepoint] = true;
        let mut stack = vec![basepoint];
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if !seen[w] && adj(v, w) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        let vertices: Vec<usize> = (0..n).filter(|&v| seen[v]).collect();
        let mut edges = Vec::new();
        let mut cells = Vec::new();
        for (x, &a) in vertices.iter().enumerate() {
            for (y, &b) in vertices.iter().enumerate().skip(x + 1) {
                if adj(a, b) {
                    edges.push((a, b));
                }
                for (z, &c) in vertices.iter().enumerate().skip(y + 1) {
                    if adj(a, b) && adj(b, c) && adj(a, c) {
                        cells.push(vec![a, b, c]);
                    }
                    for &d in &vertices[z + 1..] {
                        for cyc in [[a, b, c, d], [a, b, d, c], [a, c, b, d]] {
                            if (0..4).all(|k| adj(cyc[k], cyc[(k + 1) % 4])) {
                                cells.push(cyc.to_vec());
                            }
                        }
                    }
                }
            }
        }
        Ok(Self { vertices, edges, cells, factors: Default::default() })
    }

    fn edge_index(&self, u: usize, v: usize) -> (usize, i64) {
        let (key, sign) = if u < v { ((u, v), 1) } else { ((v, u), -1) };
        (self.edges.binary_search(&key).expect("edge of complex"), sign)
    }

    /// Boundary of edges, one row per edge, one column per vertex.
    pub fn boundary1(&self) -> Vec<Vec<BigInt>> {
        self.edges
            .iter()
            .map(|&(u, v)| {
                self.vertices
                    .iter()
                    .map(|&w| BigInt::from((w == v) as i64 - (w == u) as i64))
                    .collect()
            })
            .collect()
    }

    /// Boundary of 2-cells, one row per cell, one column per edge.
    pub fn boundary2(&self) -> Vec<Vec<BigInt>> {
        self.cells
            .iter()
            .map(|cyc| {
                let mut row = vec![BigInt::zero(); self.edges.len()];
                for k in 0..cyc.len() {
                    let (e, s) = self.edge_index(cyc[k], cyc[(k + 1) % cyc.len()]);
                    row[e] += s;
                }
                row
            })
            .collect()
    }

    fn boundary_factors(&self) -> &Vec<BigInt> {
        self.factors.get_or_init(|| reference_invariant_factors(&self.boundary2()))
    }

    /// First homology from the two boundary matrices.
    pub fn h1(&self) -> AbelianInvariants {
        let rank1 = reference_invariant_factors(&self.boundary1()).len();
        let d2 = self.boundary_factors().clone();
        let kernel = self.edges.len() - rank1;
        AbelianInvariants {
            rank: kernel - d2.len(),
            torsion: d2.into_iter().filter(|d| !d.is_one()).collect(),
        }
    }

    /// Edge chain of a closed walk.
    pub fn chain(&self, points: &[usize]) -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); self.edges.len()];
        for w in points.windows(2) {
            if w[0] != w[1] {
                let (e, s) = self.edge_index(w[0], w[1]);
                c[e] += s;
            }
        }
        c
    }

    /// Whether a closed walk bounds: its chain lies in the integer span of
    /// the cell boundaries. Same rank and same product of invariant factors
    /// means the enlarged lattice has index one over the original.
    pub fn bounds(&self, points: &[usize]) -> bool {
        let c = self.chain(points);
        if c.iter().all(Zero::is_zero) {
            return true;
        }
        let before = self.boundary_factors();
        let mut d2 = self.boundary2();
        d2.push(c);
        let after = reference_invariant_factors(&d2);
        before.len() == after.len()
            && before.iter().product::<BigInt>() == after.iter().product::<BigInt>()
    }
}

/// H₁ of the filled complex at one scale.
pub fn naive_h1(space: &FiniteMetricSpace, theta: f64, basepoint: usize) -> Result<AbelianInvariants> {
    Ok(FilledComplex::build(space, theta, basepoint)?.h1())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleCheck {
    pub theta: f64,
    pub naive: AbelianInvariants,
    pub presentation: AbelianInvariants,
    pub reduced_model: AbelianInvariants,
    pub agree: bool,
}

/// Compares the presentation pipeline, plain and with folding and reduced
/// relators, against the naive complex at every critical scale.
pub fn cross_check(space: &FiniteMetricSpace, basepoint: usize) -> Result<Vec<ScaleCheck>> {
    critical_scales(space)
        .into_iter()
        .map(|theta| {
            let naive = naive_h1(space, theta, basepoint)?;
            let presentation = presentation_at_scale(space, theta, basepoint)?.abelianization();
            let reduced_model = ScaleModel::build(space, theta, ModelOptions::fast())?.invariants();
            let agree = naive == presentation && naive == reduced_model;
            Ok(ScaleCheck { theta, naive, presentation, reduced_model, agree })
        })
        .collect()
}

/// Seeded cloud of `2..=max_points` points, uniform in the unit square.
pub fn random_cloud(seed: u64, max_points: usize) -> FiniteMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_points.max(2));
    let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0).expect("finite coordinates")
}

/// Closed walks from `basepoint` with `1..=max_steps` steps and no repeated
/// consecutive points, in lexicographic order. The constant loop comes first.
pub fn based_loops(space: &FiniteMetricSpace, theta: f64, basepoint: usize, max_steps: usize) -> Vec<Vec<usize>> {
    let n = space.len();
    let mut out = vec![vec![basepoint]];
    let mut walk = vec![basepoint];
    fn extend(space: &FiniteMetricSpace, theta: f64, n: usize, max: usize, walk: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *walk.last().unwrap();
        for w in 0..n {
            if w == last || space.dist(last, w) > theta {
                continue;
            }
            walk.push(w);
            if w == walk[0] {
                out.push(walk.clone());
            }
            if walk.len() <= max {
                extend(space, theta, n, max, walk, out);
            }
            walk.pop();
        }
    }
    extend(space, theta, n, max_steps, &mut walk, &mut out);
    out
}

/// Tallies of decider verdicts on all short based loops, checked against the
/// naive complex and the presentation pipeline.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub loops: usize,
    pub trivial: usize,
    pub nontrivial: usize,
    pub unknown: usize,
    /// Pipeline H₁ class and naive bounding test disagree.
    pub class_mismatches: usize,
    /// A verdict contradicts the naive complex, or a certificate or
    /// obstruction fails to check.
    pub contradictions: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<String>,
}

impl Agreement {
    pub fn merge(&mut self, other: Agreement) {
        self.loops += other.loops;
        self.trivial += other.trivial;
        self.nontrivial += other.nontrivial;
        self.unknown += other.unknown;
        self.class_mismatches += other.class_mismatches;
        self.contradictions += other.contradictions;
        self.examples.extend(other.examples);
        self.examples.truncate(10);
    }

    pub fn conclusive_rate(&self) -> f64 {
        if self.loops == 0 {
            1.0
        } else {
            (self.trivial + self.nontrivial) as f64 / self.loops as f64
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.class_mismatches == 0 && self.contradictions == 0
    }
}

/// Runs the decider on every based loop of at most `max_steps` steps at one
/// scale.
pub fn decider_agreement(
    space: &FiniteMetricSpace,
    theta: f64,
    basepoint: usize,
    max_steps: usize,
    budget: Budget,
) -> Result<Agreement> {
    let complex = FilledComplex::build(space, theta, basepoint)?;
    let decider = Decider::new(space, theta, basepoint)?;
    let mut a = Agreement::default();
    for points in based_loops(space, theta, basepoint, max_steps) {
        let path = ThetaPath { theta, points };
        let bounds = complex.bounds(&path.points);
        let class = decider.model().class_of_loop(&path)?;
        let mut bad = Vec::new();
        if bounds != is_zero_class(&class) {
            a.class_mismatches += 1;
            bad.push("class");
        }
        a.loops += 1;
        match decider.is_nullhomotopic(&path, budget)? {
            Verdict::Trivial { certificate } => {
                a.trivial += 1;
                let constant = ThetaPath::constant(theta, basepoint);
                if !bounds || verify_grid_homotopy(space, &certificate, &path, &constant).is_err() {
                    bad.push("trivial");
                }
            }
            Verdict::NonTrivial { obstruction } => {
                a.nontrivial += 1;
                let ok = match obstruction {
                    Obstruction::HomologyClass { coordinates, .. } => !bounds && coordinates == class,
                    Obstruction::FreeWord { word } => !word.is_empty(),
                };
                if !ok {
                    bad.push("nontrivial");
                }
            }
            Verdict::Unknown { .. } => a.unknown += 1,
        }
        if bad.iter().any(|&b| b != "class") {
            a.contradictions += 1;
        }
        if !bad.is_empty() && a.examples.len() < 10 {
            a.examples.push(format!("theta {theta}: loop {:?}: {}", path.points, bad.join(", ")));
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{smith_normal_form, IntMatrix};
    use crate::spaces::{gen_circle, Metric};

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn invariant_factors() {
        let f = |m: &[&[i64]]| reference_invariant_factors(&big(m)).into_iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(f(&[&[2, 0], &[0, 3]]), ["1", "6"]);
        assert_eq!(f(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]), ["2", "6", "12"]);
        assert_eq!(f(&[&[0, 0], &[0, 0]]), Vec::<String>::new());
        assert!(f(&[]).is_empty());
        assert_eq!(f(&[&[6, 4]]), ["2"]);
    }

    #[test]
    fn agrees_with_main_snf() {
        let m = big(&[&[3, 7, -2, 5], &[0, 14, 8, 1], &[9, 0, 0, -6]]);
        let snf = smith_normal_form(&IntMatrix::from_rows(&m, 4));
        let main: Vec<BigInt> = snf.diagonal().into_iter().filter(|x| !x.is_zero()).map(|x| x.abs()).collect();
        assert_eq!(main, reference_invariant_factors(&m));
    }

    #[test]
    fn snf_checks() {
        for m in adversarial_matrices() {
            check_snf(&m).unwrap();
        }
        for seed in 0..50 {
            check_snf(&random_matrix(seed, 8, 99)).unwrap();
        }
        let m = random_matrix(3, 12, 99);
        assert!(m.len() <= 12 && m.iter().all(|r| r.len() == m[0].len() && r.iter().all(|x| x.abs() <= 99)));
    }

    #[test]
    fn polygons() {
        for n in 3..9 {
            let s = gen_circle(1.0, n, &[0.0, 0.0]).unwrap();
            let chord = 2.0 * (std::f64::consts::PI / n as f64).sin();
            let h = naive_h1(&s, chord * 1.01, 0).unwrap();
            assert_eq!(h.rank, (n >= 5) as usize, "n = {n}");
            assert!(h.torsion.is_empty());
        }
    }

    #[test]
    fn cross_check_small() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.2], vec![2.1, 0.0], vec![1.7, 1.5], vec![0.4, 1.9], vec![1.0, 0.9]];
        let s = FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0).unwrap();
        let checks = cross_check(&s, 0).unwrap();
        assert_eq!(checks.len(), 15);
        assert!(checks.iter().all(|c| c.agree), "{checks:?}");
        assert!(checks.last().unwrap().naive.is_trivial());
    }

    #[test]
    fn bounding_loops() {
        let s = gen_circle(1.0, 5, &[0.0, 0.0]).unwrap();
        let c = FilledComplex::build(&s, 1.2, 0).unwrap();
        assert!(!c.bounds(&[0, 1, 2, 3, 4, 0]));
        assert!(c.bounds(&[0, 1, 2, 1, 0]));
        assert!(c.bounds(&[0, 1, 2, 3, 4, 0, 4, 3, 2, 1, 0]));
        let sq = gen_circle(1.0, 4, &[0.0, 0.0]).unwrap();
        assert!(FilledComplex::build(&sq, 1.5, 0).unwrap().bounds(&[0, 1, 2, 3, 0]));
    }

    #[test]
    fn loops_and_agreement() {
        let sq = gen_circle(1.0, 4, &[0.0, 0.0]).unwrap();
        let loops = based_loops(&sq, 1.5, 0, 4);
        // constant, 2 backtracks of length 2, 2 squares; length 4 backtracks
        assert!(loops.contains(&vec![0, 1, 2, 3, 0]));
        assert!(loops.iter().all(|l| l[0] == 0 && *l.last().unwrap() == 0));
        let a = decider_agreement(&sq, 1.5, 0, 4, Budget::default()).unwrap();
        assert_eq!(a.loops, loops.len());
        assert!(a.is_consistent(), "{a:?}");
        assert_eq!(a.trivial, a.loops);
        for seed in 0..5 {
            let s = random_cloud(seed, 5);
            for theta in critical_scales(&s) {
                let a = decider_agreement(&s, theta, 0, 5, Budget::default()).unwrap();
                assert!(a.is_consistent(), "{a:?}");
            }
        }
    }

    #[test]
    fn too_big() {
        let s = gen_circle(1.0, MAX_POINTS + 1, &[0.0, 0.0]).unwrap();
        assert!(naive_h1(&s, 0.5, 0).is_err());
    }
}
