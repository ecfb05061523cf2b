//! Presentations of π₁,θ from the scale graph, Tietze simplification and
//! abelianization.

mod homology;
mod model;
pub mod snf;
mod tietze;
pub mod words;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::LoopEncoder;
use crate::spaces::FiniteMetricSpace;
use crate::theta_graph::ThetaGraph;

pub use homology::{bigint_list as bigint_serde, is_zero_class, AbelianInvariants, Homology, SparseVec};
pub use model::{class_of_loop, ModelOptions, ScaleModel};
pub use snf::{smith_normal_form, IntMatrix, Snf};
pub use tietze::{tietze_simplify, Effort, Simplified};
pub use words::Word;

/// Which short cycles become relators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RelatorMode {
    /// Every simple 3- and 4-cycle.
    #[default]
    All,
    /// Triangles and chordless squares; a chorded square is a product of two
    /// triangles, so the normal closure is the same.
    Reduced,
}

/// Where a graph presentation came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub theta: f64,
    pub space_hash: String,
    pub basepoint: usize,
    pub tree: String,
    /// Components other than the basepoint's, by smallest member and size.
    pub other_components: Vec<(usize, usize)>,
}

/// Generators and relators; letters are `±(g + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPresentation {
    /// Edge `(u, v)`, `u < v`, behind each generator, when it has one.
    pub labels: Vec<Option<(usize, usize)>>,
    pub relators: Vec<Word>,
    pub provenance: Option<Provenance>,
    pub warnings: Vec<String>,
}

impl GroupPresentation {
    /// Abstract presentation on `generators` letters. Relators are freely
    /// reduced.
    pub fn new(generators: usize, relators: Vec<Word>) -> Result<Self> {
        for r in &relators {
            if let Some(&l) = r.iter().find(|&&l| l == 0 || words::generator_of(l) >= generators) {
                return Err(Error::InvalidParameter(format!("letter {l} outside 1..={generators}")));
            }
        }
        Ok(Self {
            labels: vec![None; generators],
            relators: relators.iter().map(|r| words::free_reduce(r)).collect(),
            provenance: None,
            warnings: Vec::new(),
        })
    }

    pub fn generator_count(&self) -> usize {
        self.labels.len()
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Vec::len).sum()
    }

    /// Relators as sparse exponent vectors.
    pub fn relation_rows(&self) -> Vec<SparseVec> {
        self.relators.iter().map(|r| words::exponent_sparse(r)).collect()
    }

    pub fn homology(&self) -> Homology {
        Homology::new(self.generator_count(), self.relation_rows())
    }

    pub fn abelianization(&self) -> AbelianInvariants {
        self.homology().invariants()
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            theta: self.provenance.as_ref().map(|p| p.theta),
            generators: self
                .labels
                .iter()
                .enumerate()
                .map(|(i, l)| match l {
                    Some((u, v)) => GeneratorJson { u: Some(*u), v: Some(*v), index: i },
                    None => GeneratorJson { u: None, v: None, index: i },
                })
                .collect(),
            relators: self.relators.clone(),
            abelian: self.abelianization(),
            provenance: self.provenance.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<usize>,
}

/// `{theta, generators, relators, abelian}` on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresentationJson {
    pub theta: Option<f64>,
    pub generators: Vec<GeneratorJson>,
    pub relators: Vec<Word>,
    pub abelian: AbelianInvariants,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl PresentationJson {
    pub fn presentation(&self) -> Result<GroupPresentation> {
        let mut p = GroupPresentation::new(self.generators.len(), self.relators.clone())?;
        for (slot, g) in p.labels.iter_mut().zip(&self.generators) {
            if let (Some(u), Some(v)) = (g.u, g.v) {
                *slot = Some((u, v));
            }
        }
        p.provenance = self.provenance.clone();
        Ok(p)
    }
}

/// Relator words of the short cycles in `root`'s component.
pub(crate) fn cycle_relators(graph: &ThetaGraph, encoder: &LoopEncoder, mode: RelatorMode) -> Vec<Word> {
    let cycles = match mode {
        RelatorMode::All => graph.short_cycles(),
        RelatorMode::Reduced => graph.chordless_cycles(),
    };
    let tree = encoder.tree();
    let read = |c: &[usize]| -> Option<Word> {
        if !tree.contains(c[0]) {
            return None;
        }
        let w: Word = c.windows(2).filter_map(|s| encoder.letter(s[0], s[1])).collect();
        let w = words::cyclic_reduce(&w);
        (!w.is_empty()).then_some(w)
    };
    let mut out: Vec<Word> = cycles
        .triangles
        .iter()
        .filter_map(|t| read(&[t[0] as usize, t[1] as usize, t[2] as usize, t[0] as usize]))
        .collect();
    out.extend(cycles.squares.iter().filter_map(|s| {
        let [a, b, c, d] = s.map(|x| x as usize);
        read(&[a, b, c, d, a])
    }));
    out
}

/// Presentation of a graph's fundamental group with short-cycle relators,
/// together with the encoder that reads loops in it.
pub fn graph_presentation(graph: &ThetaGraph, root: usize, mode: RelatorMode) -> (GroupPresentation, LoopEncoder) {
    let encoder = LoopEncoder::new(graph, root);
    let relators = cycle_relators(graph, &encoder, mode);
    let p = GroupPresentation {
        labels: encoder.generators().iter().map(|&e| Some(e)).collect(),
        relators,
        provenance: None,
        warnings: Vec::new(),
    };
    (p, encoder)
}

/// π₁,θ(X, basepoint): generators are the non-tree edges of the basepoint's
/// component, relators its 3- and 4-cycles.
pub fn presentation_at_scale(space: &FiniteMetricSpace, theta: f64, basepoint: usize) -> Result<GroupPresentation> {
    space.check_id(basepoint)?;
    let graph = ThetaGraph::build(space, theta)?;
    let (mut p, encoder) = graph_presentation(&graph, basepoint, RelatorMode::All);
    let tree = encoder.tree();
    let others: Vec<(usize, usize)> = graph
        .components()
        .into_iter()
        .filter(|c| !tree.contains(c[0]))
        .map(|c| (c[0], c.len()))
        .collect();
    if tree.size() == 1 && space.len() > 1 {
        p.warnings.push(format!("basepoint {basepoint} is isolated at scale {theta}"));
    } else if !others.is_empty() {
        let ignored: usize = others.iter().map(|c| c.1).sum();
        p.warnings.push(format!(
            "{ignored} vertices in {} other components ignored",
            others.len()
        ));
    }
    p.provenance = Some(Provenance {
        theta,
        space_hash: space.content_hash(),
        basepoint,
        tree: format!("bfs from {basepoint}, ascending ids"),
        other_components: others,
    });
    Ok(p)
}
