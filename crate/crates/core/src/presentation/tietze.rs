use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use super::words::{self, canonical_relator, generator_of, invert, substitute, Word};
use super::GroupPresentation;

/// How much work simplification may do.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub enum Effort {
    /// Reduction and deduplication only.
    Minimal,
    /// Also eliminate generators, with bounded relator growth.
    #[default]
    Standard,
    /// Also shorten relators using other relators.
    Thorough,
}

impl Effort {
    fn growth_budget(self, total: usize) -> usize {
        match self {
            Effort::Minimal => 0,
            Effort::Standard => 4 * total + 10_000,
            Effort::Thorough => 16 * total + 100_000,
        }
    }
}

/// A simplified presentation and the map from the old generators to it.
#[derive(Clone, Debug)]
pub struct Simplified {
    pub presentation: GroupPresentation,
    /// Old index of each surviving generator.
    pub kept: Vec<usize>,
    /// `(g, w)`: old generator `g` was replaced by `w`, applied in order.
    pub substitutions: Vec<(usize, Word)>,
    renumber: Vec<Option<usize>>,
}

impl Simplified {
    /// Image of a word over the old generators, or `None` if it would exceed
    /// `max_len` letters along the way.
    pub fn map_word(&self, word: &[i32], max_len: usize) -> Option<Word> {
        let mut w = words::free_reduce(word);
        for (g, image) in &self.substitutions {
            if w.iter().any(|&l| generator_of(l) == *g) {
                w = substitute(&w, *g, image);
                if w.len() > max_len {
                    return None;
                }
            }
        }
        Some(
            w.iter()
                .map(|&l| {
                    let g = self.renumber[generator_of(l)].expect("eliminated generator survived substitution");
                    words::letter(g, l > 0)
                })
                .collect(),
        )
    }

    pub fn is_free(&self) -> bool {
        self.presentation.relators.is_empty()
    }
}

struct State {
    rels: Vec<Option<Word>>,
    seen: HashSet<Word>,
    occ: Vec<Vec<usize>>,
    alive_gen: Vec<bool>,
    heap: BinaryHeap<Reverse<(usize, usize)>>,
    subs: Vec<(usize, Word)>,
}

impl State {
    fn insert(&mut self, w: Word) {
        let w = canonical_relator(&w);
        if w.is_empty() || !self.seen.insert(w.clone()) {
            return;
        }
        let id = self.rels.len();
        for &l in &w {
            self.occ[generator_of(l)].push(id);
        }
        self.heap.push(Reverse((w.len(), id)));
        self.rels.push(Some(w));
    }

    fn remove(&mut self, id: usize) -> Option<Word> {
        let w = self.rels[id].take()?;
        self.seen.remove(&w);
        Some(w)
    }

    fn live_occurrences(&self, g: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.occ[g]
            .iter()
            .copied()
            .filter(|&r| {
                self.rels[r]
                    .as_ref()
                    .is_some_and(|w| w.iter().any(|&l| generator_of(l) == g))
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Generator elimination; returns whether anything changed.
    fn eliminate(&mut self, budget: &mut usize) -> bool {
        let mut changed = false;
        let mut stuck: Vec<Reverse<(usize, usize)>> = Vec::new();
        while let Some(Reverse((len, id))) = self.heap.pop() {
            let Some(w) = self.rels[id].as_ref() else { continue };
            if w.len() != len {
                continue;
            }
            let mut counts: Vec<(usize, usize)> = Vec::new();
            for &l in w {
                let g = generator_of(l);
                match counts.iter_mut().find(|c| c.0 == g) {
                    Some(c) => c.1 += 1,
                    None => counts.push((g, 1)),
                }
            }
            let best = counts
                .iter()
                .filter(|c| c.1 == 1)
                .map(|c| (self.live_occurrences(c.0).len(), c.0))
                .min();
            let Some((occurrences, g)) = best else {
                stuck.push(Reverse((len, id)));
                continue;
            };
            let growth = len.saturating_sub(2) * occurrences.saturating_sub(1);
            if growth > *budget {
                stuck.push(Reverse((len, id)));
                continue;
            }
            *budget -= growth;
            let w = self.remove(id).unwrap();
            let k = w.iter().position(|&l| generator_of(l) == g).unwrap();
            let rest: Word = w[k + 1..].iter().chain(&w[..k]).copied().collect();
            let image = if w[k] > 0 { invert(&rest) } else { rest };
            for other in self.live_occurrences(g) {
                let old = self.remove(other).unwrap();
                self.insert(substitute(&old, g, &image));
            }
            self.alive_gen[g] = false;
            self.subs.push((g, image));
            changed = true;
        }
        self.heap.extend(stuck);
        changed
    }

    /// Replaces in some relator a cyclic subword `u` by a shorter `v⁻¹` when
    /// `u v` is a rotation of another relator or its inverse.
    fn shorten(&mut self, budget: &mut usize) -> bool {
        let ids: Vec<usize> = (0..self.rels.len()).filter(|&i| self.rels[i].is_some()).collect();
        for &r in &ids {
            let Some(rw) = self.rels[r].clone() else { continue };
            if rw.len() > 12 {
                continue;
            }
            let mut rotations = Vec::new();
            for base in [rw.clone(), invert(&rw)] {
                for s in 0..base.len() {
                    rotations.push(base[s..].iter().chain(&base[..s]).copied().collect::<Word>());
                }
            }
            let mut targets: Vec<usize> = rw.iter().flat_map(|&l| self.occ[generator_of(l)].iter().copied()).collect();
            targets.sort_unstable();
            targets.dedup();
            for q in targets {
                if q == r || *budget == 0 {
                    continue;
                }
                *budget -= 1;
                let Some(qw) = self.rels[q].clone() else { continue };
                let n = qw.len();
                for rot in &rotations {
                    let k = rot.len() / 2 + 1;
                    let (u, v) = rot.split_at(k);
                    if u.len() > n {
                        continue;
                    }
                    for s in 0..n {
                        if (0..u.len()).all(|i| qw[(s + i) % n] == u[i]) {
                            let mut new: Word = invert(v);
                            new.extend((u.len()..n).map(|i| qw[(s + i) % n]));
                            self.remove(q);
                            self.insert(new);
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Tietze simplification: free and cyclic reduction, duplicate removal,
/// elimination of a generator occurring once in some relator, and (at
/// [`Effort::Thorough`]) length-reducing rewrites with other relators.
/// Deterministic for a given input and effort.
pub fn tietze_simplify(p: &GroupPresentation, effort: Effort) -> Simplified {
    let n = p.generator_count();
    let mut st = State {
        rels: Vec::new(),
        seen: HashSet::new(),
        occ: vec![Vec::new(); n],
        alive_gen: vec![true; n],
        heap: BinaryHeap::new(),
        subs: Vec::new(),
    };
    for r in &p.relators {
        st.insert(r.clone());
    }
    let mut budget = effort.growth_budget(p.total_length());
    let mut rewrites = if effort == Effort::Thorough { 100_000 } else { 0 };
    if effort > Effort::Minimal {
        loop {
            let eliminated = st.eliminate(&mut budget);
            let shortened = rewrites > 0 && st.shorten(&mut rewrites);
            if !eliminated && !shortened {
                break;
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&g| st.alive_gen[g]).collect();
    let mut renumber = vec![None; n];
    for (new, &old) in kept.iter().enumerate() {
        renumber[old] = Some(new);
    }
    let mut relators: Vec<Word> = st
        .rels
        .into_iter()
        .flatten()
        .map(|w| {
            w.iter()
                .map(|&l| words::letter(renumber[generator_of(l)].unwrap(), l > 0))
                .collect()
        })
        .collect();
    relators.sort_by(|a: &Word, b: &Word| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let presentation = GroupPresentation {
        labels: kept.iter().map(|&g| p.labels[g]).collect(),
        relators,
        provenance: p.provenance.clone(),
        warnings: p.warnings.clone(),
    };
    Simplified {
        presentation,
        kept,
        substitutions: st.subs,
        renumber,
    }
}
