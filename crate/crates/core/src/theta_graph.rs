//! The scale graph: vertices are the points of a space, edges join points at
//! distance at most θ. Its walks (allowing stays) are exactly the θ-paths.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spaces::{FiniteMetricSpace, Metric, TAU_METRIC};

const NONE: u32 = u32::MAX;

/// Above this many points, coordinate-backed euclidean spaces use grid
/// buckets to find candidate pairs.
pub const BUCKET_THRESHOLD: usize = 5000;

/// Closed-adjacency scale graph. Adjacency lists are sorted; no self-loops.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaGraph {
    theta: f64,
    adj: Vec<Vec<u32>>,
}

impl ThetaGraph {
    /// Edges `{i, j}` with `dist(i, j) <= theta`.
    pub fn build(space: &FiniteMetricSpace, theta: f64) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::NonPositiveScale(theta));
        }
        if space.len() > BUCKET_THRESHOLD && space.metric() == Some(Metric::Euclidean) {
            Ok(Self::build_bucketed(space, theta))
        } else {
            Ok(Self::build_naive(space, theta))
        }
    }

    /// All-pairs construction.
    pub fn build_naive(space: &FiniteMetricSpace, theta: f64) -> Self {
        let n = space.len();
        let adj = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && space.dist(i, j) <= theta)
                    .map(|j| j as u32)
                    .collect()
            })
            .collect();
        Self { theta, adj }
    }

    /// Grid-bucket construction for coordinate spaces; cells have side θ so
    /// every neighbour lies in an adjacent cell. Produces the same graph as
    /// [`ThetaGraph::build_naive`].
    pub fn build_bucketed(space: &FiniteMetricSpace, theta: f64) -> Self {
        let n = space.len();
        let dim = match space.dim() {
            Some(d) if d > 0 => d,
            _ => return Self::build_naive(space, theta),
        };
        let cell = |i: usize| -> Vec<i64> {
            space
                .coords(i)
                .unwrap()
                .iter()
                .map(|x| (x / theta).floor() as i64)
                .collect()
        };
        let mut buckets: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        for i in 0..n {
            buckets.entry(cell(i)).or_default().push(i as u32);
        }
        let offsets: Vec<Vec<i64>> = (0..3usize.pow(dim as u32))
            .map(|mut code| {
                (0..dim)
                    .map(|_| {
                        let o = (code % 3) as i64 - 1;
                        code /= 3;
                        o
                    })
                    .collect()
            })
            .collect();
        let adj = (0..n)
            .into_par_iter()
            .map(|i| {
                let c = cell(i);
                let mut out = Vec::new();
                for off in &offsets {
                    let key: Vec<i64> = c.iter().zip(off).map(|(a, b)| a + b).collect();
                    if let Some(list) = buckets.get(&key) {
                        out.extend(
                            list.iter()
                                .copied()
                                .filter(|&j| j as usize != i && space.dist(i, j as usize) <= theta),
                        );
                    }
                }
                out.sort_unstable();
                out
            })
            .collect();
        Self { theta, adj }
    }

    /// Graph on `n` vertices from an explicit edge list (testing and
    /// abstract graphs).
    pub fn from_edges(n: usize, theta: f64, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u != v {
                adj[u].push(v as u32);
                adj[v].push(u as u32);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        Self { theta, adj }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    /// `u == v` or an edge: the condition for a θ-path step.
    pub fn adjacent_or_equal(&self, u: usize, v: usize) -> bool {
        u == v || self.has_edge(u, v)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nb)| {
            nb.iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    /// Component label per vertex; labels are numbered in order of smallest
    /// member.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.len()];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.len() {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if label[v as usize] == usize::MAX {
                        label[v as usize] = next;
                        queue.push_back(v as usize);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let labels = self.component_labels();
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut out = vec![Vec::new(); count];
        for (v, &l) in labels.iter().enumerate() {
            out[l].push(v);
        }
        out
    }

    /// BFS tree of `root`'s component, children explored in ascending id order.
    pub fn spanning_tree(&self, root: usize) -> SpanningTree {
        let n = self.len();
        let mut parent = vec![NONE; n];
        let mut depth = vec![NONE; n];
        let mut order = vec![root as u32];
        depth[root] = 0;
        let mut head = 0;
        while head < order.len() {
            let u = order[head] as usize;
            head += 1;
            for &v in &self.adj[u] {
                if depth[v as usize] == NONE {
                    depth[v as usize] = depth[u] + 1;
                    parent[v as usize] = u as u32;
                    order.push(v);
                }
            }
        }
        SpanningTree {
            root,
            parent,
            depth,
            order,
        }
    }

    /// All simple 3-cycles and 4-cycles in canonical form: the smallest vertex
    /// first, oriented so the second vertex is smaller than the last.
    pub fn short_cycles(&self) -> ShortCycles {
        self.cycles(false)
    }

    /// Triangles and the 4-cycles without a diagonal, in the same form.
    pub fn chordless_cycles(&self) -> ShortCycles {
        self.cycles(true)
    }

    fn cycles(&self, chordless: bool) -> ShortCycles {
        let n = self.len();
        let per_vertex: Vec<(Vec<Triangle>, Vec<Square>)> = (0..n)
            .into_par_iter()
            .map_init(
                || (vec![false; n], vec![Vec::<u32>::new(); n]),
                |(mark, mids), a| {
                    let mut tris = Vec::new();
                    let mut squares = Vec::new();
                    let nb = &self.adj[a];
                    for &b in nb {
                        mark[b as usize] = true;
                    }
                    let mut touched = Vec::new();
                    for &b in nb.iter().filter(|&&b| b as usize > a) {
                        for &c in &self.adj[b as usize] {
                            let cu = c as usize;
                            if cu <= a {
                                continue;
                            }
                            if c > b && mark[cu] {
                                tris.push([a as u32, b, c]);
                            }
                            if mids[cu].is_empty() {
                                touched.push(c);
                            }
                            mids[cu].push(b);
                        }
                    }
                    touched.sort_unstable();
                    for &c in &touched {
                        if chordless && mark[c as usize] {
                            continue;
                        }
                        let list = &mids[c as usize];
                        for (x, &b) in list.iter().enumerate() {
                            for &d in &list[x + 1..] {
                                if chordless && self.has_edge(b as usize, d as usize) {
                                    continue;
                                }
                                let (lo, hi) = if b < d { (b, d) } else { (d, b) };
                                squares.push([a as u32, lo, c, hi]);
                            }
                        }
                    }
                    for &c in &touched {
                        mids[c as usize].clear();
                    }
                    for &b in nb {
                        mark[b as usize] = false;
                    }
                    tris.sort_unstable();
                    squares.sort_unstable();
                    (tris, squares)
                },
            )
            .collect();
        let mut out = ShortCycles::default();
        for (t, s) in per_vertex {
            out.triangles.extend(t);
            out.squares.extend(s);
        }
        out
    }

    /// Subgraph keeping only vertices with `keep[v]`; ids are unchanged and
    /// dropped vertices become isolated.
    pub fn induced(&self, keep: &[bool]) -> Self {
        let adj = self
            .adj
            .iter()
            .enumerate()
            .map(|(u, nb)| {
                if keep[u] {
                    nb.iter().copied().filter(|&v| keep[v as usize]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        Self {
            theta: self.theta,
            adj,
        }
    }

    /// Repeatedly removes vertices `v` of `root`'s component whose closed
    /// neighbourhood lies inside that of a neighbour `w`, retracting `v` onto
    /// `w`. The retraction is a graph map homotopic to the identity, so the
    /// fundamental group of the square-filled complex is unchanged. `root` is
    /// never removed.
    pub fn fold_dominated(&self, root: usize) -> Folding {
        let n = self.len();
        let tree = self.spanning_tree(root);
        let comp: Vec<usize> = tree.order.iter().map(|&v| v as usize).collect();
        let mut local = vec![NONE; n];
        for (i, &v) in comp.iter().enumerate() {
            local[v] = i as u32;
        }
        let c = comp.len();
        let words = c.div_ceil(64);
        let mut bits = vec![0u64; c * words];
        let set = |bits: &mut [u64], row: usize, col: usize| {
            bits[row * words + col / 64] |= 1 << (col % 64);
        };
        for (i, &v) in comp.iter().enumerate() {
            set(&mut bits, i, i);
            for &w in &self.adj[v] {
                set(&mut bits, i, local[w as usize] as usize);
            }
        }
        let mut active = vec![true; c];
        let mut deg: Vec<usize> = comp.iter().map(|&v| self.adj[v].len()).collect();
        let mut retract = vec![NONE; n];
        let mut queued = vec![true; c];
        let mut queue: VecDeque<usize> = (0..c).collect();
        let root_local = local[root] as usize;
        while let Some(i) = queue.pop_front() {
            queued[i] = false;
            if !active[i] || i == root_local {
                continue;
            }
            let v = comp[i];
            let row_v = &bits[i * words..(i + 1) * words];
            let dominator = self.adj[v].iter().map(|&w| local[w as usize] as usize).find(|&j| {
                active[j]
                    && deg[j] >= deg[i]
                    && row_v
                        .iter()
                        .zip(&bits[j * words..(j + 1) * words])
                        .all(|(a, b)| a & !b == 0)
            });
            let Some(j) = dominator else { continue };
            active[i] = false;
            retract[v] = comp[j] as u32;
            for &u in &self.adj[v] {
                let k = local[u as usize] as usize;
                if active[k] {
                    bits[k * words + i / 64] &= !(1 << (i % 64));
                    deg[k] -= 1;
                    if !queued[k] {
                        queued[k] = true;
                        queue.push_back(k);
                    }
                }
            }
        }
        let mut keep = vec![false; n];
        for (i, &v) in comp.iter().enumerate() {
            if active[i] {
                keep[v] = true;
                retract[v] = v as u32;
            }
        }
        // resolve retraction chains
        for &v in &comp {
            let mut r = v;
            while retract[r] as usize != r {
                r = retract[r] as usize;
            }
            let mut x = v;
            while retract[x] as usize != r {
                let next = retract[x] as usize;
                retract[x] = r as u32;
                x = next;
            }
        }
        Folding {
            core: self.induced(&keep),
            retract,
        }
    }

    /// Graphviz rendering; edge attribute `len` is the distance to 6 decimals.
    pub fn to_dot(&self, space: &FiniteMetricSpace) -> String {
        let mut s = String::from("graph theta {\n");
        let _ = writeln!(s, "  // theta = {}", self.theta);
        for v in 0..self.len() {
            let _ = writeln!(s, "  {v} [label=\"{v}\"];");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  {u} -- {v} [len=\"{:.6}\"];", space.dist(u, v));
        }
        s.push_str("}\n");
        s
    }

    /// Edge list CSV with header `u,v,dist`.
    pub fn to_edge_csv(&self, space: &FiniteMetricSpace) -> String {
        let mut s = String::from("u,v,dist\n");
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u},{v},{:?}", space.dist(u, v));
        }
        s
    }
}

/// BFS spanning tree of one component.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    root: usize,
    parent: Vec<u32>,
    depth: Vec<u32>,
    order: Vec<u32>,
}

impl SpanningTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn contains(&self, v: usize) -> bool {
        self.depth[v] != NONE
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NONE => None,
            p => Some(p as usize),
        }
    }

    pub fn depth(&self, v: usize) -> Option<usize> {
        match self.depth[v] {
            NONE => None,
            d => Some(d as usize),
        }
    }

    /// Vertices of the component in BFS order.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().map(|&v| v as usize)
    }

    pub fn size(&self) -> usize {
        self.order.len()
    }

    pub fn is_tree_edge(&self, u: usize, v: usize) -> bool {
        self.parent[u] == v as u32 || self.parent[v] == u as u32
    }

    /// Tree path `root, ..., v`.
    pub fn path_from_root(&self, v: usize) -> Vec<usize> {
        let mut p = self.path_to_root(v);
        p.reverse();
        p
    }

    /// Tree path `v, ..., root`.
    pub fn path_to_root(&self, v: usize) -> Vec<usize> {
        let mut p = vec![v];
        let mut x = v;
        while let Some(q) = self.parent(x) {
            p.push(q);
            x = q;
        }
        p
    }
}

pub type Triangle = [u32; 3];
pub type Square = [u32; 4];

/// Canonical 3- and 4-cycles of a graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShortCycles {
    pub triangles: Vec<Triangle>,
    pub squares: Vec<Square>,
}

impl ShortCycles {
    /// Cycles as closed vertex sequences (first vertex repeated at the end).
    pub fn loops(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let t = self
            .triangles
            .iter()
            .map(|c| c.iter().chain(&c[..1]).map(|&v| v as usize).collect());
        let s = self
            .squares
            .iter()
            .map(|c| c.iter().chain(&c[..1]).map(|&v| v as usize).collect());
        t.chain(s)
    }
}

/// Result of [`ThetaGraph::fold_dominated`].
#[derive(Clone, Debug)]
pub struct Folding {
    /// Induced subgraph on the surviving vertices of the root component.
    pub core: ThetaGraph,
    /// Surviving vertex each component vertex retracts to; `u32::MAX` outside
    /// the component.
    pub retract: Vec<u32>,
}

impl Folding {
    pub fn image(&self, v: usize) -> Option<usize> {
        match self.retract[v] {
            NONE => None,
            r => Some(r as usize),
        }
    }
}

/// Distinct positive pairwise distances, increasing; distances equal up to a
/// relative [`TAU_METRIC`] count once, at the largest. The graph is constant
/// for θ between consecutive values.
pub fn critical_scales(space: &FiniteMetricSpace) -> Vec<f64> {
    let n = space.len();
    let mut ds: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| (i + 1..n).map(move |j| space.dist(i, j)))
        .filter(|&d| d > 0.0)
        .collect();
    ds.par_sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    // values within rounding of each other are one scale; keep the largest
    let mut out: Vec<f64> = Vec::new();
    let mut cluster_start = f64::NAN;
    for d in ds {
        match out.last_mut() {
            Some(last) if d - cluster_start <= TAU_METRIC * cluster_start => *last = d,
            _ => {
                cluster_start = d;
                out.push(d);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{gen_circle, gen_hawaiian_earring, Metric};
    use proptest::prelude::*;

    fn cycle(n: usize) -> ThetaGraph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        ThetaGraph::from_edges(n, 1.0, &e)
    }

    fn complete(n: usize) -> ThetaGraph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        ThetaGraph::from_edges(n, 1.0, &e)
    }

    #[test]
    fn square_at_one_and_a_half_is_c4() {
        let sq = gen_circle(1.0, 4, &[0.0, 0.0]).unwrap();
        let g = ThetaGraph::build(&sq, 1.5).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert!(ThetaGraph::build(&sq, 0.0).is_err());
        assert_eq!(ThetaGraph::build(&sq, 2.0).unwrap().edge_count(), 6);
        assert_eq!(ThetaGraph::build(&sq, 1.4).unwrap().edge_count(), 0);
    }

    #[test]
    fn boundary_is_closed() {
        let s = FiniteMetricSpace::from_points(&[vec![0.0], vec![0.5]], Metric::L1, 0).unwrap();
        assert_eq!(ThetaGraph::build(&s, 0.5).unwrap().edge_count(), 1);
    }

    #[test]
    fn component_counts() {
        assert_eq!(complete(5).components().len(), 1);
        assert_eq!(ThetaGraph::from_edges(4, 1.0, &[]).components().len(), 4);
        let g = ThetaGraph::from_edges(5, 1.0, &[(3, 4), (0, 2)]);
        assert_eq!(g.components(), vec![vec![0, 2], vec![1], vec![3, 4]]);
    }

    #[test]
    fn earring_stays_connected_through_origin() {
        let e = gen_hawaiian_earring(2, &[16, 16]).unwrap();
        // above both adjacent chords, below the gap between the circles' far ends
        let g = ThetaGraph::build(&e, 0.4).unwrap();
        let labels = g.component_labels();
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn spanning_trees() {
        let p = ThetaGraph::from_edges(3, 1.0, &[(0, 1), (1, 2)]);
        let t = p.spanning_tree(0);
        assert_eq!((t.parent(0), t.parent(1), t.parent(2)), (None, Some(0), Some(1)));
        let c4 = cycle(4);
        let t = c4.spanning_tree(0);
        let non_tree = c4.edges().filter(|&(u, v)| !t.is_tree_edge(u, v)).count();
        assert_eq!(non_tree, 1);
        let star = ThetaGraph::from_edges(5, 1.0, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let t = star.spanning_tree(0);
        assert!(star.edges().all(|(u, v)| t.is_tree_edge(u, v)));
        assert_eq!(t.path_from_root(2), vec![0, 2]);
    }

    #[test]
    fn short_cycle_counts() {
        let c4 = cycle(4).short_cycles();
        assert_eq!((c4.triangles.len(), c4.squares.len()), (0, 1));
        assert_eq!(c4.squares[0], [0, 1, 2, 3]);
        let k4 = complete(4).short_cycles();
        assert_eq!((k4.triangles.len(), k4.squares.len()), (4, 3));
        let c5 = cycle(5).short_cycles();
        assert_eq!((c5.triangles.len(), c5.squares.len()), (0, 0));
    }

    /// Exhaustive oracle: every 3- or 4-subset, every cyclic ordering.
    fn brute_cycles(g: &ThetaGraph) -> ShortCycles {
        let n = g.len();
        let mut out = ShortCycles::default();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                        out.triangles.push([a as u32, b as u32, c as u32]);
                    }
                    for d in c + 1..n {
                        // three distinct 4-cycles on {a,b,c,d}, each through a
                        for [x, y, z] in [[b, c, d], [b, d, c], [c, b, d]] {
                            if g.has_edge(a, x) && g.has_edge(x, y) && g.has_edge(y, z) && g.has_edge(z, a) {
                                let (lo, hi) = if x < z { (x, z) } else { (z, x) };
                                out.squares.push([a as u32, lo as u32, y as u32, hi as u32]);
                            }
                        }
                    }
                }
            }
        }
        out.triangles.sort_unstable();
        out.squares.sort_unstable();
        out
    }

    proptest! {
        #[test]
        fn short_cycles_match_brute_force(n in 1usize..=7, bits in any::<u32>()) {
            let mut e = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits >> (k % 32) & 1 == 1 {
                        e.push((i, j));
                    }
                    k += 1;
                }
            }
            let g = ThetaGraph::from_edges(n, 1.0, &e);
            prop_assert_eq!(g.short_cycles(), brute_cycles(&g));
            let mut chordless = brute_cycles(&g);
            chordless.squares.retain(|&[a, b, c, d]| {
                !g.has_edge(a as usize, c as usize) && !g.has_edge(b as usize, d as usize)
            });
            let mut got = g.chordless_cycles();
            got.squares.sort_unstable();
            prop_assert_eq!(got, chordless);
        }

        #[test]
        fn edges_monotone_in_scale(
            pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 1..25),
            a in 0.01f64..2.0, b in 0.01f64..2.0,
        ) {
            let s = FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let g_lo = ThetaGraph::build(&s, lo).unwrap();
            let g_hi = ThetaGraph::build(&s, hi).unwrap();
            for (u, v) in g_lo.edges() {
                prop_assert!(g_hi.has_edge(u, v));
            }
        }

        #[test]
        fn graph_constant_between_critical_scales(
            pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 2..15),
            t in 0.0f64..1.0,
        ) {
            let s = FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0).unwrap();
            let crit = critical_scales(&s);
            for w in crit.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                let inner = w[0] + t * (w[1] - w[0]);
                if inner >= w[1] { continue; }
                prop_assert_eq!(ThetaGraph::build(&s, inner.max(w[0])).unwrap().adj, ThetaGraph::build(&s, mid).unwrap().adj);
            }
        }

        #[test]
        fn bucketed_equals_naive(
            pts in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 1..4), 1..60),
            theta in 0.05f64..1.5,
        ) {
            let dim = pts[0].len();
            let pts: Vec<Vec<f64>> = pts.into_iter().map(|mut p| { p.resize(dim, 0.3); p }).collect();
            let s = FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0).unwrap();
            prop_assert_eq!(ThetaGraph::build_bucketed(&s, theta), ThetaGraph::build_naive(&s, theta));
        }
    }

    #[test]
    fn critical_scale_examples() {
        let sq = gen_circle(1.0, 4, &[0.0, 0.0]).unwrap();
        let c = critical_scales(&sq);
        assert_eq!(c.len(), 2);
        assert!((c[0] - 2f64.sqrt()).abs() < 1e-12 && (c[1] - 2.0).abs() < 1e-12);
        let one = FiniteMetricSpace::from_points(&[vec![1.0]], Metric::L1, 0).unwrap();
        assert!(critical_scales(&one).is_empty());
        let tri = FiniteMetricSpace::from_matrix(
            &[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]],
            0,
        )
        .unwrap();
        assert_eq!(critical_scales(&tri), vec![1.0]);
    }

    #[test]
    fn folding_complete_graph_leaves_root() {
        let f = complete(6).fold_dominated(2);
        assert_eq!(f.core.edge_count(), 0);
        assert!((0..6).all(|v| f.image(v) == Some(2)));
        // cycles without dominated vertices are untouched
        let f = cycle(6).fold_dominated(0);
        assert_eq!(f.core, cycle(6));
    }

    #[test]
    fn folding_is_a_graph_map() {
        let c = gen_circle(1.0, 12, &[0.0, 0.0]).unwrap();
        let g = ThetaGraph::build(&c, 1.1).unwrap();
        let f = g.fold_dominated(0);
        for (u, v) in g.edges() {
            let (a, b) = (f.image(u).unwrap(), f.image(v).unwrap());
            assert!(f.core.adjacent_or_equal(a, b));
        }
        assert_eq!(f.image(0), Some(0));
    }
}
