//! Bounded decisions for θ-homotopy. Trivial verdicts carry a grid homotopy,
//! non-trivial ones an obstruction that can be recomputed; everything else is
//! `Unknown`.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::sync::OnceLock;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::{delazify, GridHomotopy, ThetaPath};
use crate::presentation::words::{self, Word};
use crate::presentation::{graph_presentation, is_zero_class, tietze_simplify, Effort, ModelOptions, RelatorMode, ScaleModel, Simplified};
use crate::spaces::FiniteMetricSpace;
use crate::theta_graph::ThetaGraph;

/// Search limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Longest delazified row explored; `None` means `2 × length + 4`.
    pub max_width: Option<usize>,
    pub max_states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_width: None,
            max_states: 1_000_000,
        }
    }
}

/// Why a loop cannot be trivial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    /// Nonzero H₁ coordinates of the loop (or of `p·q⁻¹`).
    HomologyClass {
        theta: f64,
        #[serde(with = "crate::presentation::bigint_serde")]
        coordinates: Vec<BigInt>,
    },
    /// The simplified presentation is free and the loop's image is this
    /// nonempty reduced word.
    FreeWord { word: Word },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub states: usize,
    pub max_width: usize,
    pub max_states: usize,
    /// Every reachable row within the width was visited.
    pub frontier_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Trivial { certificate: GridHomotopy },
    NonTrivial { obstruction: Obstruction },
    Unknown { stats: SearchStats },
}

impl Verdict {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Verdict::Trivial { .. })
    }

    pub fn is_nontrivial(&self) -> bool {
        matches!(self, Verdict::NonTrivial { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }
}

/// On the row with entry `dup` doubled (if any), set entry `at` to `v` and,
/// if given, entry `at + 1` to `w`; then drop duplicates. Each move is one
/// grid step.
#[derive(Clone, Copy, Debug)]
struct Move {
    dup: Option<usize>,
    at: usize,
    v: u32,
    w: Option<u32>,
}

/// Decision procedures for one space, scale and basepoint.
pub struct Decider<'a> {
    space: &'a FiniteMetricSpace,
    model: ScaleModel,
    simplified: OnceLock<Simplified>,
}

impl<'a> Decider<'a> {
    pub fn new(space: &'a FiniteMetricSpace, theta: f64, basepoint: usize) -> Result<Self> {
        space.check_id(basepoint)?;
        let graph = ThetaGraph::build(space, theta)?;
        let model = ScaleModel::from_graph(graph, basepoint, ModelOptions::default())?;
        Ok(Self {
            space,
            model,
            simplified: OnceLock::new(),
        })
    }

    pub fn theta(&self) -> f64 {
        self.model.theta()
    }

    pub fn basepoint(&self) -> usize {
        self.model.basepoint()
    }

    pub fn model(&self) -> &ScaleModel {
        &self.model
    }

    fn graph(&self) -> &ThetaGraph {
        self.model.graph()
    }

    fn simplified(&self) -> &Simplified {
        self.simplified.get_or_init(|| {
            let (p, _) = graph_presentation(self.graph(), self.basepoint(), RelatorMode::All);
            tietze_simplify(&p, Effort::Standard)
        })
    }

    fn check_path(&self, path: &ThetaPath) -> Result<()> {
        if path.is_empty() {
            return Err(Error::Empty("path"));
        }
        if path.theta > self.theta() {
            return Err(Error::ScaleMismatch(path.theta, self.theta()));
        }
        for &p in &path.points {
            self.space.check_id(p)?;
        }
        if let Err(v) = path.at_scale(self.theta()).validate(self.space) {
            return Err(Error::Parse(format!("not a θ-path: {v}")));
        }
        Ok(())
    }

    /// Obstructions for the closed walk `points` at the basepoint.
    fn obstruction(&self, points: &[usize]) -> Result<Option<Obstruction>> {
        let class = self.model.class_of_walk(points)?;
        if !is_zero_class(&class) {
            return Ok(Some(Obstruction::HomologyClass {
                theta: self.theta(),
                coordinates: class,
            }));
        }
        let s = self.simplified();
        if s.is_free() {
            let word = self.model.word_of_walk(points)?;
            if let Some(img) = s.map_word(&word, 1 << 20) {
                let img = words::free_reduce(&img);
                if !img.is_empty() {
                    return Ok(Some(Obstruction::FreeWord { word: img }));
                }
            }
        }
        Ok(None)
    }

    /// Three phases: homology obstruction, free-presentation shortcut, then
    /// best-first search over delazified rows ordered by edit distance to the
    /// goal, then length, then lex.
    pub fn is_nullhomotopic(&self, path: &ThetaPath, budget: Budget) -> Result<Verdict> {
        self.check_path(path)?;
        if !path.is_closed() {
            return Err(Error::OpenPath);
        }
        if path.start() != self.basepoint() {
            return Err(Error::WrongBasepoint {
                expected: self.basepoint(),
                found: path.start(),
            });
        }
        let start = delazify(&path.points);
        if let Some(obstruction) = self.obstruction(&start)? {
            return Ok(Verdict::NonTrivial { obstruction });
        }
        if let Some(rows) = self.backtrack_certificate(&start) {
            let first: Vec<u32> = start.iter().map(|&v| v as u32).collect();
            return Ok(Verdict::Trivial {
                certificate: self.certificate(&first, rows),
            });
        }
        let goal = vec![self.basepoint() as u32];
        Ok(self.search(&start, &goal, budget))
    }

    /// Decides `p ~ q` rel endpoints. The obstruction comes from `p·q⁻¹`; the
    /// certificate is a direct search from `p` to `q`.
    pub fn are_homotopic(&self, p: &ThetaPath, q: &ThetaPath, budget: Budget) -> Result<Verdict> {
        self.check_path(p)?;
        self.check_path(q)?;
        if p.theta != q.theta {
            return Err(Error::ScaleMismatch(p.theta, q.theta));
        }
        if p.start() != q.start() || p.end() != q.end() {
            return Err(Error::EndpointMismatch { end: q.end(), start: p.end() });
        }
        if p.start() != self.basepoint() {
            return Err(Error::WrongBasepoint {
                expected: self.basepoint(),
                found: p.start(),
            });
        }
        let loop_pq = p.concat(&q.invert())?;
        if let Some(obstruction) = self.obstruction(&delazify(&loop_pq.points))? {
            return Ok(Verdict::NonTrivial { obstruction });
        }
        let start = delazify(&p.points);
        let goal: Vec<u32> = delazify(&q.points).iter().map(|&v| v as u32).collect();
        Ok(self.search(&start, &goal, budget))
    }

    /// Repeatedly replaces a backtrack `a b a` by `a a a`; succeeds when this
    /// reaches the constant loop.
    fn backtrack_certificate(&self, start: &[usize]) -> Option<Vec<(Vec<u32>, Move)>> {
        let mut s: Vec<u32> = start.iter().map(|&v| v as u32).collect();
        let mut steps = Vec::new();
        while s.len() > 1 {
            let i = (1..s.len() - 1).find(|&i| s[i - 1] == s[i + 1])?;
            let m = Move { dup: None, at: i, v: s[i - 1], w: None };
            let next = apply(&s, m);
            steps.push((s, m));
            s = next;
        }
        Some(steps)
    }

    fn closed_neighbourhood(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        let nb = self.graph().neighbors(v as usize);
        let at = nb.partition_point(|&x| x < v);
        nb[..at].iter().copied().chain([v]).chain(nb[at..].iter().copied())
    }

    fn adj(&self, a: u32, b: u32) -> bool {
        self.graph().adjacent_or_equal(a as usize, b as usize)
    }

    fn moves(&self, s: &[u32], max_width: usize) -> Vec<Move> {
        let n = s.len();
        let mut out = Vec::new();
        let dups = std::iter::once(None).chain((0..n).filter(|_| n < max_width).map(Some));
        for dup in dups {
            let mut t = s.to_vec();
            if let Some(j) = dup {
                t.insert(j, s[j]);
            }
            let len = t.len();
            for at in 1..len.saturating_sub(1) {
                for v in self.closed_neighbourhood(t[at]) {
                    if !self.adj(t[at - 1], v) {
                        continue;
                    }
                    if v != t[at] && self.adj(v, t[at + 1]) {
                        out.push(Move { dup, at, v, w: None });
                    }
                    if at + 2 < len {
                        for w in self.closed_neighbourhood(t[at + 1]) {
                            if w != t[at + 1] && v != t[at] && self.adj(v, w) && self.adj(w, t[at + 2]) {
                                out.push(Move { dup, at, v, w: Some(w) });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn search(&self, start: &[usize], goal: &[u32], budget: Budget) -> Verdict {
        let start: Vec<u32> = start.iter().map(|&v| v as u32).collect();
        let max_width = budget
            .max_width
            .unwrap_or(2 * start.len().max(goal.len()) + 4)
            .max(start.len())
            .max(goal.len());
        let mut states: Vec<Vec<u32>> = vec![start.clone()];
        let mut parent: Vec<Option<(usize, Move)>> = vec![None];
        let mut index: HashMap<Vec<u32>, usize> = HashMap::from([(start.clone(), 0)]);
        let goal_row = goal.to_vec();
        let key = |s: &Vec<u32>| (strsim::generic_levenshtein(s, &goal_row), s.len());
        let mut heap = BinaryHeap::from([Reverse((key(&start), start, 0usize))]);
        let mut found = None;
        let mut truncated = false;
        'search: while let Some(Reverse((_, s, id))) = heap.pop() {
            if s.as_slice() == goal {
                found = Some(id);
                break;
            }
            let candidates = self.moves(&s, max_width);
            for m in candidates {
                let next = apply(&s, m);
                if let Entry::Vacant(e) = index.entry(next.clone()) {
                    if states.len() >= budget.max_states {
                        truncated = true;
                        break 'search;
                    }
                    let nid = states.len();
                    e.insert(nid);
                    states.push(next.clone());
                    parent.push(Some((id, m)));
                    heap.push(Reverse((key(&next), next, nid)));
                }
            }
        }
        let Some(mut id) = found else {
            return Verdict::Unknown {
                stats: SearchStats {
                    states: states.len(),
                    max_width,
                    max_states: budget.max_states,
                    frontier_exhausted: !truncated,
                },
            };
        };
        let mut steps = Vec::new();
        while let Some((p, m)) = parent[id] {
            steps.push((states[p].clone(), m));
            id = p;
        }
        steps.reverse();
        Verdict::Trivial {
            certificate: self.certificate(&states[0], steps),
        }
    }

    /// Grid rows of fixed width replaying `steps` (state before each move).
    fn certificate(&self, start: &[u32], steps: Vec<(Vec<u32>, Move)>) -> GridHomotopy {
        let theta = self.theta();
        let first = start.to_vec();
        let last_state = steps.last().map_or_else(|| first.clone(), |l| apply(&l.0, l.1));
        let width = steps
            .iter()
            .map(|(s, m)| s.len() + m.dup.is_some() as usize)
            .chain([first.len(), last_state.len()])
            .max()
            .unwrap();
        let pad = |s: &[u32]| -> Vec<usize> {
            let mut r: Vec<usize> = s.iter().map(|&v| v as usize).collect();
            let end = *r.last().unwrap();
            r.resize(width, end);
            r
        };
        let mut rows = vec![pad(&first)];
        for (s, m) in &steps {
            let mut row = pad(s);
            debug_assert_eq!(rows.last(), Some(&row));
            if let Some(j) = m.dup {
                for k in (j + 1..width).rev() {
                    row[k] = row[k - 1];
                }
                rows.push(row.clone());
            }
            row[m.at] = m.v as usize;
            if let Some(w) = m.w {
                row[m.at + 1] = w as usize;
            }
            rows.push(row.clone());
            // remove duplicates one shift at a time
            loop {
                let tail_start = {
                    let end = row[width - 1];
                    let mut t = width - 1;
                    while t > 0 && row[t - 1] == end {
                        t -= 1;
                    }
                    t
                };
                let Some(j) = (0..tail_start).find(|&j| j + 1 < width && row[j] == row[j + 1]) else { break };
                for k in j + 1..width - 1 {
                    row[k] = row[k + 1];
                }
                rows.push(row.clone());
            }
        }
        GridHomotopy {
            theta,
            rows: minimize(self.space, theta, rows),
            endpoints_fixed: true,
        }
    }
}

/// Applies a move to a delazified row and delazifies the result.
fn apply(s: &[u32], m: Move) -> Vec<u32> {
    let mut t = s.to_vec();
    if let Some(j) = m.dup {
        t.insert(j, s[j]);
    }
    t[m.at] = m.v;
    if let Some(w) = m.w {
        t[m.at + 1] = w;
    }
    t.dedup();
    t
}

/// Drops repeated rows, then rows whose neighbours are already within θ
/// column-wise.
fn minimize(space: &FiniteMetricSpace, theta: f64, mut rows: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    rows.dedup();
    let close = |a: &[usize], b: &[usize]| a.iter().zip(b).all(|(&x, &y)| space.dist(x, y) <= theta);
    let mut k = 1;
    while k + 1 < rows.len() {
        if close(&rows[k - 1], &rows[k + 1]) {
            rows.remove(k);
            k = k.saturating_sub(1).max(1);
        } else {
            k += 1;
        }
    }
    rows
}

/// [`Decider::is_nullhomotopic`] at the path's scale, based at its start.
pub fn is_nullhomotopic(space: &FiniteMetricSpace, path: &ThetaPath, budget: Budget) -> Result<Verdict> {
    if path.is_empty() {
        return Err(Error::Empty("path"));
    }
    if path.start() != space.basepoint() {
        return Err(Error::WrongBasepoint {
            expected: space.basepoint(),
            found: path.start(),
        });
    }
    Decider::new(space, path.theta, path.start())?.is_nullhomotopic(path, budget)
}

/// [`Decider::are_homotopic`] at the paths' scale, based at their start.
pub fn are_homotopic(space: &FiniteMetricSpace, p: &ThetaPath, q: &ThetaPath, budget: Budget) -> Result<Verdict> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::Empty("path"));
    }
    Decider::new(space, p.theta, p.start())?.are_homotopic(p, q, budget)
}
