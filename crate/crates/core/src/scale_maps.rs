//! Maps between scales: H₁ of θ′ maps to H₁ of θ for θ′ ≤ θ because every
//! θ′-path is a θ-path. Towers over a scale grid, barcodes and inverse-limit
//! reports.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::presentation::snf::{rank, smith_normal_form, IntMatrix};
use crate::presentation::words::{self, Word};
use crate::presentation::{AbelianInvariants, ModelOptions, ScaleModel};
use crate::spaces::FiniteMetricSpace;
use crate::theta_graph::critical_scales;

/// Factor applied to the largest critical scale to get a scale where the
/// graph is complete.
pub const ABOVE_MAX_FACTOR: f64 = 1.25;

/// Homomorphism H₁(θ_from) → H₁(θ_to) in canonical coordinates, with the
/// image word of every θ_from generator.
#[derive(Clone, Debug)]
pub struct ScaleMap {
    pub theta_from: f64,
    pub theta_to: f64,
    /// `dim_to × dim_from`; torsion rows reduced.
    pub matrix: IntMatrix,
    pub moduli_from: Vec<BigInt>,
    pub moduli_to: Vec<BigInt>,
    pub images: Vec<Word>,
}

fn reduce_rows(m: &mut IntMatrix, moduli: &[BigInt]) {
    for (i, d) in moduli.iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        for j in 0..m.cols() {
            let v = m[(i, j)].mod_floor(d);
            m[(i, j)] = v;
        }
    }
}

fn free_rank(moduli: &[BigInt]) -> usize {
    moduli.iter().take_while(|m| m.is_zero()).count()
}

impl ScaleMap {
    /// Identity on a group with the given coordinate moduli.
    pub fn identity(theta: f64, moduli: Vec<BigInt>, generators: usize) -> Self {
        Self {
            theta_from: theta,
            theta_to: theta,
            matrix: IntMatrix::identity(moduli.len()),
            moduli_from: moduli.clone(),
            moduli_to: moduli,
            images: (0..generators).map(|g| vec![g as i32 + 1]).collect(),
        }
    }

    /// Map between two models of one space with `from.theta() <= to.theta()`.
    pub fn between(from: &ScaleModel, to: &ScaleModel) -> Result<Self> {
        if from.theta() > to.theta() {
            return Err(Error::InvalidParameter(format!(
                "maps go from smaller to larger scales, got {} -> {}",
                from.theta(),
                to.theta()
            )));
        }
        if from.basepoint() != to.basepoint() {
            return Err(Error::InvalidParameter("models have different basepoints".into()));
        }
        let enc = from.encoder();
        let images = (0..enc.generators().len())
            .into_par_iter()
            .map(|g| to.word_of_walk(&enc.generator_loop(g)))
            .collect::<Result<Vec<Word>>>()?;
        let hf = from.homology();
        let ht = to.homology();
        let mut matrix = IntMatrix::zeros(ht.dimension(), hf.dimension());
        for i in 0..hf.dimension() {
            let mut col = vec![BigInt::zero(); ht.dimension()];
            for (g, coef) in hf.basis_representative(i) {
                let img = ht.coordinates(&words::exponent_sparse(&images[*g as usize]));
                for (c, x) in col.iter_mut().zip(img) {
                    *c += coef * x;
                }
            }
            for (k, c) in ht.normalize(col).into_iter().enumerate() {
                matrix[(k, i)] = c;
            }
        }
        Ok(Self {
            theta_from: from.theta(),
            theta_to: to.theta(),
            matrix,
            moduli_from: hf.moduli().to_vec(),
            moduli_to: ht.moduli().to_vec(),
            images,
        })
    }

    /// Recomputes the matrix from the image words.
    pub fn matrix_from_words(&self, from: &ScaleModel, to: &ScaleModel) -> IntMatrix {
        let hf = from.homology();
        let ht = to.homology();
        let mut m = IntMatrix::zeros(ht.dimension(), hf.dimension());
        for i in 0..hf.dimension() {
            let mut combo: Vec<(u32, i64)> = Vec::new();
            let mut col = vec![BigInt::zero(); ht.dimension()];
            for (g, coef) in hf.basis_representative(i) {
                combo.clear();
                combo.extend(words::exponent_sparse(&self.images[*g as usize]));
                let img = ht.coordinates(&combo);
                for (c, x) in col.iter_mut().zip(img) {
                    *c += coef * x;
                }
            }
            for (k, c) in ht.normalize(col).into_iter().enumerate() {
                m[(k, i)] = c;
            }
        }
        m
    }

    /// Block of the matrix between free coordinates; its rank is the
    /// rational rank of the map.
    pub fn free_block(&self) -> IntMatrix {
        let (r, c) = (free_rank(&self.moduli_to), free_rank(&self.moduli_from));
        let mut m = IntMatrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                m[(i, j)] = self.matrix[(i, j)].clone();
            }
        }
        m
    }

    pub fn rational_rank(&self) -> usize {
        rank(&self.free_block())
    }
}

/// `second ∘ first`.
pub fn compose(first: &ScaleMap, second: &ScaleMap) -> Result<ScaleMap> {
    if first.theta_to != second.theta_from {
        return Err(Error::ScaleMismatch(first.theta_to, second.theta_from));
    }
    let mut matrix = second.matrix.mul(&first.matrix);
    reduce_rows(&mut matrix, &second.moduli_to);
    let images = first
        .images
        .iter()
        .map(|w| {
            let mut out = Vec::new();
            for &l in w {
                let img = &second.images[words::generator_of(l)];
                if l > 0 {
                    out.extend_from_slice(img);
                } else {
                    out.extend(words::invert(img));
                }
            }
            words::free_reduce(&out)
        })
        .collect();
    Ok(ScaleMap {
        theta_from: first.theta_from,
        theta_to: second.theta_to,
        matrix,
        moduli_from: first.moduli_from.clone(),
        moduli_to: second.moduli_to.clone(),
        images,
    })
}

/// Map H₁(θ_from) → H₁(θ_to) for the space's spanning-tree presentations.
pub fn induced_map(space: &FiniteMetricSpace, theta_from: f64, theta_to: f64, basepoint: usize) -> Result<ScaleMap> {
    space.check_id(basepoint)?;
    if !(theta_from > 0.0) {
        return Err(Error::NonPositiveScale(theta_from));
    }
    let space = space.clone().with_basepoint(basepoint)?;
    let from = ScaleModel::build(&space, theta_from, ModelOptions::default())?;
    if from.graph().degree(basepoint) == 0 && space.len() > 1 {
        return Err(Error::InvalidParameter(format!(
            "basepoint {basepoint} is isolated at scale {theta_from}"
        )));
    }
    let to = ScaleModel::build(&space, theta_to, ModelOptions::default())?;
    ScaleMap::between(&from, &to)
}

/// Scale grid for a sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum Scales {
    List(Vec<f64>),
    /// Midpoints between consecutive critical scales plus one scale above the
    /// largest.
    Critical,
}

/// Grid for [`Scales::Critical`], increasing.
pub fn critical_grid(space: &FiniteMetricSpace) -> Vec<f64> {
    let crit = critical_scales(space);
    let Some(&max) = crit.last() else { return vec![1.0] };
    let mut grid: Vec<f64> = crit.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    grid.push(max * ABOVE_MAX_FACTOR);
    grid
}

/// Per-scale models and adjacent maps; scales strictly decreasing, `maps[i]`
/// goes from `scales[i + 1]` to `scales[i]`.
#[derive(Clone, Debug)]
pub struct ScaleTower {
    pub basepoint: usize,
    pub scales: Vec<f64>,
    pub models: Vec<ScaleModel>,
    pub maps: Vec<ScaleMap>,
}

/// Builds the tower over the grid; per-scale models are computed in
/// parallel.
pub fn sweep(space: &FiniteMetricSpace, scales: &Scales, basepoint: usize, options: ModelOptions) -> Result<ScaleTower> {
    space.check_id(basepoint)?;
    let mut grid = match scales {
        Scales::List(v) => v.clone(),
        Scales::Critical => critical_grid(space),
    };
    if grid.is_empty() {
        return Err(Error::Empty("scale list"));
    }
    if let Some(&bad) = grid.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::NonPositiveScale(bad));
    }
    grid.sort_by(|a, b| b.partial_cmp(a).unwrap());
    grid.dedup();
    let space = space.clone().with_basepoint(basepoint)?;
    let models = grid
        .par_iter()
        .map(|&t| ScaleModel::build(&space, t, options))
        .collect::<Result<Vec<_>>>()?;
    let maps = (0..models.len().saturating_sub(1))
        .into_par_iter()
        .map(|i| ScaleMap::between(&models[i + 1], &models[i]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScaleTower {
        basepoint,
        scales: grid,
        models,
        maps,
    })
}

impl ScaleTower {
    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn invariants(&self) -> Vec<AbelianInvariants> {
        self.models.iter().map(ScaleModel::invariants).collect()
    }

    /// Composite map from `scales[from]` to `scales[to]`, `from >= to`.
    pub fn map_between(&self, from: usize, to: usize) -> Result<ScaleMap> {
        if from < to || from >= self.len() {
            return Err(Error::InvalidParameter(format!("no map from index {from} to {to}")));
        }
        let h = self.models[from].homology();
        let mut m = ScaleMap::identity(self.scales[from], h.moduli().to_vec(), self.models[from].generator_count());
        for k in (to..from).rev() {
            m = compose(&m, &self.maps[k])?;
        }
        Ok(m)
    }

    /// Rational ranks of composite free blocks on the increasing grid:
    /// `r[a][b]` for `a <= b` is the rank from the `a`-th smallest scale to
    /// the `b`-th smallest.
    fn rank_table(&self) -> Vec<Vec<usize>> {
        let k = self.len();
        // increasing order: position a corresponds to tower index k - 1 - a
        let blocks: Vec<IntMatrix> = (0..k.saturating_sub(1))
            .map(|a| self.maps[k - 2 - a].free_block())
            .collect();
        let ranks: Vec<usize> = (0..k).map(|a| self.models[k - 1 - a].invariants().rank).collect();
        (0..k)
            .into_par_iter()
            .map(|a| {
                let mut row = vec![0; k];
                row[a] = ranks[a];
                let mut p = IntMatrix::identity(ranks[a]);
                for b in a + 1..k {
                    p = blocks[b - 1].mul(&p);
                    row[b] = rank(&p);
                }
                row
            })
            .collect()
    }

    /// Persistence bars over the grid.
    pub fn barcode(&self) -> Barcode {
        let k = self.len();
        let r = self.rank_table();
        let asc: Vec<f64> = self.scales.iter().rev().copied().collect();
        let get = |a: isize, b: usize| -> i64 {
            if a < 0 || b >= k {
                0
            } else {
                r[a as usize][b] as i64
            }
        };
        let mut bars = Vec::new();
        for a in 0..k {
            for b in a..k {
                let ai = a as isize;
                let mu = get(ai, b) - get(ai, b + 1) - get(ai - 1, b) + get(ai - 1, b + 1);
                debug_assert!(mu >= 0, "negative bar multiplicity");
                if mu > 0 {
                    bars.push(Bar {
                        birth: asc[a],
                        death: asc.get(b + 1).copied(),
                        multiplicity: mu as usize,
                    });
                }
            }
        }
        Barcode { bars }
    }

    /// Images, cokernels and kernels of the maps out of the smallest scale.
    pub fn inverse_limit_report(&self) -> Result<LimitReport> {
        let k = self.len();
        let smallest = k - 1;
        let bottom = &self.models[smallest];
        let mut per_scale = Vec::with_capacity(k);
        for i in 0..k {
            let m = self.map_between(smallest, i)?;
            let block = m.free_block();
            let image_rank = rank(&block);
            let model = &self.models[i];
            // cokernel: free unit vectors outside the image's rational span
            let mut span = block.to_rows();
            let mut current = image_rank;
            let mut cokernel = Vec::new();
            for j in 0..block.rows() {
                let trial: Vec<Vec<BigInt>> = span
                    .iter()
                    .enumerate()
                    .map(|(row, v)| {
                        let mut v = v.clone();
                        v.push(BigInt::from((row == j) as i64));
                        v
                    })
                    .collect();
                let width = trial[0].len();
                let t = IntMatrix::from_rows(&trial, width);
                let r = rank(&t);
                if r > current {
                    current = r;
                    span = trial;
                    let mut coords = vec![0i64; model.homology().dimension()];
                    coords[j] = 1;
                    cokernel.push(Witness {
                        theta: self.scales[i],
                        coordinates: coords.into_iter().map(BigInt::from).collect(),
                        loop_points: model.basis_loop(j),
                    });
                }
            }
            // kernel: trailing columns of V in the SNF of the free block
            let snf = smith_normal_form(&block);
            let mut kernel = Vec::new();
            for j in snf.rank()..block.cols() {
                let v: Vec<BigInt> = (0..block.cols()).map(|x| snf.v[(x, j)].clone()).collect();
                let mut combo: Vec<(u32, BigInt)> = Vec::new();
                for (x, c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for (g, e) in bottom.homology().basis_representative(x) {
                        combo.push((*g, c * e));
                    }
                }
                combo.sort_by_key(|e| e.0);
                let mut merged: Vec<(u32, BigInt)> = Vec::new();
                for (g, c) in combo {
                    match merged.last_mut() {
                        Some(last) if last.0 == g => last.1 += c,
                        _ => merged.push((g, c)),
                    }
                }
                merged.retain(|e| !e.1.is_zero());
                let mut coords = v;
                coords.resize(bottom.homology().dimension(), BigInt::zero());
                kernel.push(Witness {
                    theta: self.scales[smallest],
                    coordinates: coords,
                    loop_points: bottom.loop_of_combination(&merged),
                });
            }
            per_scale.push(ScaleReport {
                theta: self.scales[i],
                invariants: model.invariants(),
                image_rank,
                cokernel,
                kernel,
            });
        }
        let bottom_rank = per_scale[smallest].image_rank;
        let mut stabilization_index = smallest;
        while stabilization_index > 0 && per_scale[stabilization_index - 1].image_rank == bottom_rank {
            stabilization_index -= 1;
        }
        Ok(LimitReport {
            header: REPORT_HEADER.to_string(),
            smallest_scale: self.scales[smallest],
            per_scale,
            stabilization_index,
            stabilization_scale: self.scales[stabilization_index],
        })
    }

    pub fn to_json(&self) -> TowerJson {
        TowerJson {
            basepoint: self.basepoint,
            scales: self.scales.clone(),
            invariants: self.invariants(),
            generators: self
                .models
                .iter()
                .map(|m| m.encoder().generators().iter().map(|&(u, v)| [u, v]).collect())
                .collect(),
            maps: self
                .maps
                .iter()
                .map(|m| MapJson {
                    theta_from: m.theta_from,
                    theta_to: m.theta_to,
                    matrix: matrix_json(&m.matrix),
                    images: m.images.clone(),
                })
                .collect(),
        }
    }
}

const REPORT_HEADER: &str = "The limit over all scales is approximated by the finite scale grid below; \
below the smallest positive distance every group is trivial. Ranks and witnesses are over the rationals.";

fn big_json(x: &BigInt) -> Value {
    x.to_i64().map(Value::from).unwrap_or_else(|| Value::String(x.to_string()))
}

fn matrix_json(m: &IntMatrix) -> Vec<Vec<Value>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(big_json).collect()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    pub theta_from: f64,
    pub theta_to: f64,
    pub matrix: Vec<Vec<Value>>,
    pub images: Vec<Word>,
}

/// Tower on disk: scales, invariants, generator edges per scale, maps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerJson {
    pub basepoint: usize,
    pub scales: Vec<f64>,
    pub invariants: Vec<AbelianInvariants>,
    pub generators: Vec<Vec<[usize; 2]>>,
    pub maps: Vec<MapJson>,
}

/// `[birth, death)` with birth at the smaller scale; `death = None` for bars
/// alive at the largest swept scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Bar {
    pub birth: f64,
    pub death: Option<f64>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Barcode {
    pub bars: Vec<Bar>,
}

impl Barcode {
    /// Total multiplicity of bars containing `theta`.
    pub fn count_at(&self, theta: f64) -> usize {
        self.bars
            .iter()
            .filter(|b| b.birth <= theta && b.death.is_none_or(|d| theta < d))
            .map(|b| b.multiplicity)
            .sum()
    }

    pub fn total(&self) -> usize {
        self.bars.iter().map(|b| b.multiplicity).sum()
    }

    /// CSV with header `birth,death,multiplicity`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("birth,death,multiplicity\n");
        for b in &self.bars {
            let death = b.death.map_or("inf".to_string(), |d| format!("{d:?}"));
            let _ = writeln!(s, "{:?},{death},{}", b.birth, b.multiplicity);
        }
        s
    }
}

/// A class and, when it can be spelled out, a based loop representing it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub theta: f64,
    #[serde(with = "crate::presentation::bigint_serde")]
    pub coordinates: Vec<BigInt>,
    pub loop_points: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScaleReport {
    pub theta: f64,
    pub invariants: AbelianInvariants,
    /// Rank of the image from the smallest scale.
    pub image_rank: usize,
    /// Classes not hit from the smallest scale.
    pub cokernel: Vec<Witness>,
    /// Classes at the smallest scale that die here.
    pub kernel: Vec<Witness>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitReport {
    pub header: String,
    pub smallest_scale: f64,
    pub per_scale: Vec<ScaleReport>,
    /// Smallest tower index from which the image of the smallest scale keeps
    /// its full rank at every smaller grid scale.
    pub stabilization_index: usize,
    pub stabilization_scale: f64,
}

impl LimitReport {
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n\n", self.header);
        let _ = writeln!(s, "{:>12} {:>16} {:>6} {:>9} {:>7}", "theta", "H1", "image", "cokernel", "kernel");
        for r in &self.per_scale {
            let _ = writeln!(
                s,
                "{:>12.6} {:>16} {:>6} {:>9} {:>7}",
                r.theta,
                r.invariants.to_string(),
                r.image_rank,
                r.cokernel.len(),
                r.kernel.len()
            );
        }
        let _ = writeln!(
            s,
            "\nstabilized from index {} (theta = {:.6})",
            self.stabilization_index, self.stabilization_scale
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{gen_circle, Metric};
    use proptest::prelude::*;

    #[test]
    fn octagon_dies() {
        let oct = gen_circle(1.0, 8, &[0.0, 0.0]).unwrap();
        let m = induced_map(&oct, 0.8, 1.5, 0).unwrap();
        assert_eq!((m.matrix.rows(), m.matrix.cols()), (0, 1));
        let id = induced_map(&oct, 0.8, 0.8, 0).unwrap();
        assert_eq!(id.matrix, IntMatrix::identity(1));
        let same = induced_map(&oct, 0.8, 0.9, 0).unwrap();
        assert_eq!(same.matrix, IntMatrix::identity(1));
        assert!(induced_map(&oct, 1.5, 0.8, 0).is_err());
        assert!(induced_map(&oct, 0.1, 0.8, 0).is_err());
    }

    #[test]
    fn pentagon_sweep() {
        let pent = gen_circle(1.0, 5, &[0.0, 0.0]).unwrap();
        let t = sweep(&pent, &Scales::Critical, 0, ModelOptions::default()).unwrap();
        let ranks: Vec<usize> = t.invariants().iter().map(|a| a.rank).collect();
        assert_eq!(ranks, vec![0, 1]);
        let bc = t.barcode();
        assert_eq!(bc.bars.len(), 1);
        let asc: Vec<f64> = t.scales.iter().rev().copied().collect();
        assert_eq!(bc.bars[0], Bar { birth: asc[0], death: Some(asc[1]), multiplicity: 1 });
        let single = sweep(&pent, &Scales::List(vec![1.3]), 0, ModelOptions::default()).unwrap();
        assert!(single.maps.is_empty());
        assert!(sweep(&pent, &Scales::List(vec![]), 0, ModelOptions::default()).is_err());
    }

    #[test]
    fn trivial_tower() {
        let pts = [vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.8]];
        let s = FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0).unwrap();
        let t = sweep(&s, &Scales::Critical, 0, ModelOptions::default()).unwrap();
        assert!(t.barcode().bars.is_empty());
        let r = t.inverse_limit_report().unwrap();
        assert!(r.per_scale.iter().all(|x| x.image_rank == 0 && x.cokernel.is_empty()));
        assert_eq!(r.stabilization_index, 0);
        assert!(r.to_text().contains("stabilized"));
    }

    #[test]
    fn earring_sweep_shape() {
        let e = crate::spaces::gen_hawaiian_earring(2, &[16, 16]).unwrap();
        let scales = vec![1.5, 0.6, 0.3];
        let t = sweep(&e, &Scales::List(scales), 0, ModelOptions::fast()).unwrap();
        let ranks: Vec<usize> = t.invariants().iter().map(|a| a.rank).collect();
        assert_eq!(ranks, vec![0, 2, 1]);
        let r = t.inverse_limit_report().unwrap();
        assert_eq!(r.per_scale[2].image_rank, 1);
        assert_eq!((r.per_scale[1].image_rank, r.per_scale[1].cokernel.len()), (1, 1));
        assert_eq!(r.per_scale[0].kernel.len(), 1);
        let w = r.per_scale[0].kernel[0].loop_points.clone().unwrap();
        assert!(crate::presentation::is_zero_class(&t.models[0].class_of_walk(&w).unwrap()));
        assert!(!crate::presentation::is_zero_class(&t.models[2].class_of_walk(&w).unwrap()));
        let big = r.per_scale[1].cokernel[0].loop_points.clone().unwrap();
        assert!(!crate::presentation::is_zero_class(&t.models[1].class_of_walk(&big).unwrap()));
        assert_eq!(r.stabilization_index, 1);
        let csv = t.barcode().to_csv();
        assert!(csv.starts_with("birth,death,multiplicity\n"));
        let js = serde_json::to_value(t.to_json()).unwrap();
        assert_eq!(js["scales"].as_array().unwrap().len(), 3);
        assert_eq!(js["maps"].as_array().unwrap().len(), 2);
    }

    fn random_space(pts: &[Vec<f64>]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_points(pts, Metric::Euclidean, 0).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn functorial_and_coherent(
            pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 4..40),
            a in 0.15f64..1.0, b in 0.15f64..1.0, c in 0.15f64..1.0,
            fast in any::<bool>(),
        ) {
            let s = random_space(&pts);
            let mut t = [a, b, c];
            t.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let opts = if fast { ModelOptions::fast() } else { ModelOptions::default() };
            let m: Vec<ScaleModel> = t.iter().map(|&x| ScaleModel::build(&s, x, opts).unwrap()).collect();
            let m12 = ScaleMap::between(&m[0], &m[1]).unwrap();
            let m23 = ScaleMap::between(&m[1], &m[2]).unwrap();
            let m13 = ScaleMap::between(&m[0], &m[2]).unwrap();
            let c13 = compose(&m12, &m23).unwrap();
            prop_assert_eq!(&c13.matrix, &m13.matrix);
            prop_assert_eq!(m12.matrix_from_words(&m[0], &m[1]), m12.matrix.clone());
            prop_assert_eq!(c13.matrix_from_words(&m[0], &m[2]), m13.matrix.clone());
            prop_assert!(m13.rational_rank() <= m12.rational_rank().min(m23.rational_rank()));
            let id = ScaleMap::identity(t[0], m12.moduli_from.clone(), m[0].generator_count());
            prop_assert_eq!(compose(&id, &m12).unwrap().matrix, m12.matrix.clone());
            // image words only use edges of the larger scale's core
            for (g, w) in m12.images.iter().enumerate() {
                let l = m[0].encoder().generator_loop(g);
                prop_assert_eq!(m[1].word_of_walk(&l).unwrap(), w.clone());
            }
        }

        #[test]
        fn bars_cover_ranks(
            pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 4..16),
        ) {
            let s = random_space(&pts);
            let t = sweep(&s, &Scales::Critical, 0, ModelOptions::default()).unwrap();
            let bc = t.barcode();
            for (theta, inv) in t.scales.iter().zip(t.invariants()) {
                prop_assert_eq!(bc.count_at(*theta), inv.rank);
            }
            // rank jumps telescope
            let ranks: Vec<i64> = t.invariants().iter().rev().map(|x| x.rank as i64).collect();
            let jumps: i64 = ranks.windows(2).map(|w| w[1] - w[0]).sum();
            prop_assert_eq!(jumps, ranks.last().unwrap() - ranks[0]);
            let births = bc.bars.iter().filter(|b| b.birth > t.scales[t.len() - 1]).map(|b| b.multiplicity as i64).sum::<i64>();
            let deaths = bc.bars.iter().filter(|b| b.death.is_some()).map(|b| b.multiplicity as i64).sum::<i64>();
            prop_assert_eq!(ranks[0] + births - deaths, *ranks.last().unwrap());
        }
    }
}
