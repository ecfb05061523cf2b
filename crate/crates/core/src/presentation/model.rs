use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::paths::{LoopEncoder, ThetaPath};
use crate::spaces::FiniteMetricSpace;
use crate::theta_graph::{Folding, ThetaGraph};

use super::words::{self, Word};
use super::{cycle_relators, AbelianInvariants, Homology, RelatorMode};

/// How a [`ScaleModel`] is built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ModelOptions {
    /// Retract dominated vertices before presenting. Changes generators but
    /// not the group.
    pub fold: bool,
    pub relators: RelatorMode,
}

impl ModelOptions {
    /// Settings for large spaces and sweeps.
    pub fn fast() -> Self {
        Self {
            fold: true,
            relators: RelatorMode::Reduced,
        }
    }
}

/// Everything needed to compute H₁ classes of θ-loops at one scale.
#[derive(Clone, Debug)]
pub struct ScaleModel {
    theta: f64,
    basepoint: usize,
    graph: ThetaGraph,
    folding: Option<Folding>,
    encoder: LoopEncoder,
    homology: Homology,
    relator_count: usize,
}

impl ScaleModel {
    pub fn build(space: &FiniteMetricSpace, theta: f64, options: ModelOptions) -> Result<Self> {
        let graph = ThetaGraph::build(space, theta)?;
        Self::from_graph(graph, space.basepoint(), options)
    }

    pub fn from_graph(graph: ThetaGraph, basepoint: usize, options: ModelOptions) -> Result<Self> {
        if basepoint >= graph.len() {
            return Err(Error::BasepointOutOfRange {
                basepoint,
                len: graph.len(),
            });
        }
        let folding = options.fold.then(|| graph.fold_dominated(basepoint));
        let core = folding.as_ref().map_or(&graph, |f| &f.core);
        let encoder = LoopEncoder::new(core, basepoint);
        let relators = cycle_relators(core, &encoder, options.relators);
        let rows = relators.iter().map(|r| words::exponent_sparse(r)).collect();
        let homology = Homology::new(encoder.generators().len(), rows);
        Ok(Self {
            theta: graph.theta(),
            basepoint,
            relator_count: relators.len(),
            graph,
            folding,
            encoder,
            homology,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn graph(&self) -> &ThetaGraph {
        &self.graph
    }

    /// Graph the presentation is read from: the folded core, or the graph.
    pub fn core(&self) -> &ThetaGraph {
        self.folding.as_ref().map_or(&self.graph, |f| &f.core)
    }

    pub fn encoder(&self) -> &LoopEncoder {
        &self.encoder
    }

    pub fn homology(&self) -> &Homology {
        &self.homology
    }

    pub fn invariants(&self) -> AbelianInvariants {
        self.homology.invariants()
    }

    pub fn generator_count(&self) -> usize {
        self.encoder.generators().len()
    }

    pub fn relator_count(&self) -> usize {
        self.relator_count
    }

    pub fn in_component(&self, v: usize) -> bool {
        v < self.graph.len() && self.encoder.tree().contains(self.project(v).unwrap_or(v))
    }

    /// Core vertex `v` retracts to, `None` outside the basepoint component.
    pub fn project(&self, v: usize) -> Option<usize> {
        match &self.folding {
            Some(f) => f.image(v),
            None => self.encoder.tree().contains(v).then_some(v),
        }
    }

    /// Word in the core generators of a closed walk at the basepoint.
    pub fn word_of_walk(&self, points: &[usize]) -> Result<Word> {
        if let Some(&v) = points.iter().find(|&&v| v >= self.graph.len()) {
            return Err(Error::PointOutOfRange { id: v, len: self.graph.len() });
        }
        for (index, w) in points.windows(2).enumerate() {
            if !self.graph.adjacent_or_equal(w[0], w[1]) {
                return Err(Error::NotThetaPath { index, distance: f64::NAN, theta: self.theta });
            }
        }
        let projected = points
            .iter()
            .map(|&v| self.project(v).ok_or(Error::ForeignComponent(v)))
            .collect::<Result<Vec<usize>>>()?;
        self.encoder.walk_to_word(self.core(), &projected)
    }

    /// H₁ coordinates of a closed walk at the basepoint.
    pub fn class_of_walk(&self, points: &[usize]) -> Result<Vec<BigInt>> {
        let word = self.word_of_walk(points)?;
        Ok(self.homology.coordinates(&words::exponent_sparse(&word)))
    }

    /// H₁ coordinates of a based loop valid at this model's scale.
    pub fn class_of_loop(&self, path: &ThetaPath) -> Result<Vec<BigInt>> {
        if path.theta > self.theta {
            return Err(Error::ScaleMismatch(path.theta, self.theta));
        }
        if path.is_empty() {
            return Err(Error::Empty("path"));
        }
        if !path.is_closed() {
            return Err(Error::OpenPath);
        }
        if path.start() != self.basepoint {
            return Err(Error::WrongBasepoint { expected: self.basepoint, found: path.start() });
        }
        self.class_of_walk(&path.points)
    }

    /// Based loop representing an integer combination of generators. Empty
    /// when a coefficient is too large to spell out.
    pub fn loop_of_combination(&self, combo: &[(u32, BigInt)]) -> Option<Vec<usize>> {
        let mut out = vec![self.basepoint];
        for (g, coef) in combo {
            let times = coef.abs().to_usize()?;
            if times > 10_000 {
                return None;
            }
            let mut gl = self.encoder.generator_loop(*g as usize);
            if coef.is_negative() {
                gl.reverse();
            }
            for _ in 0..times {
                out.extend_from_slice(&gl[1..]);
            }
        }
        Some(out)
    }

    /// Based loop whose class is the `i`-th coordinate vector.
    pub fn basis_loop(&self, i: usize) -> Option<Vec<usize>> {
        self.loop_of_combination(self.homology.basis_representative(i))
    }

    /// Whether two coordinate vectors agree.
    pub fn same_class(a: &[BigInt], b: &[BigInt]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).is_zero())
    }
}

/// H₁ class of a based closed θ-path in `model`.
pub fn class_of_loop(path: &ThetaPath, model: &ScaleModel) -> Result<Vec<BigInt>> {
    model.class_of_loop(path)
}
