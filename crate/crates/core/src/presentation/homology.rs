//! First homology from a sparse relation matrix: unit-pivot elimination in
//! machine integers, then Smith normal form on whatever is left.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::snf::{smith_normal_form, IntMatrix};

/// Sparse integer vector, sorted by index, no zeros.
pub type SparseVec = Vec<(u32, i64)>;

/// Rank and torsion coefficients of a finitely generated abelian group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianInvariants {
    pub rank: usize,
    #[serde(with = "bigint_list")]
    pub torsion: Vec<BigInt>,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

pub mod bigint_list {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(i64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<Repr> = v
            .iter()
            .map(|x| i64::try_from(x).map(Repr::Num).unwrap_or_else(|_| Repr::Text(x.to_string())))
            .collect();
        reprs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(|r| match r {
                Repr::Num(n) => Ok(BigInt::from(n)),
                Repr::Text(t) => t.parse().map_err(D::Error::custom),
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
struct Elimination {
    column: u32,
    /// `[e_column] = Σ coef · [e_j]` in the quotient.
    image: SparseVec,
}

/// `ℤ^generators / ⟨relators⟩` with canonical coordinates: free coordinates
/// first, then torsion coordinates reduced into `[0, d)`.
#[derive(Clone, Debug)]
pub struct Homology {
    generators: usize,
    moduli: Vec<BigInt>,
    /// Coordinates of each generator's class.
    gen_coords: Vec<Vec<BigInt>>,
    /// Basis representative of each coordinate, over the generators.
    basis: Vec<Vec<(u32, BigInt)>>,
}

fn combine(a: &[(u32, i64)], b: &[(u32, i64)], q: i64) -> Option<SparseVec> {
    // a + q·b
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, b[j].1.checked_mul(q)?));
            j += 1;
        } else {
            let v = a[i].1.checked_add(b[j].1.checked_mul(q)?)?;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

impl Homology {
    /// Quotient of `ℤ^generators` by the span of `relators`.
    pub fn new(generators: usize, relators: Vec<SparseVec>) -> Self {
        let mut rows: Vec<SparseVec> = relators;
        let mut alive: Vec<bool> = rows.iter().map(|r| !r.is_empty()).collect();
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); generators];
        let mut heap = BinaryHeap::new();
        for (r, row) in rows.iter().enumerate() {
            for &(c, _) in row {
                cols[c as usize].push(r as u32);
            }
            if !row.is_empty() {
                heap.push(Reverse((row.len(), r as u32)));
            }
        }
        let mut eliminated = vec![false; generators];
        let mut elims: Vec<Elimination> = Vec::new();
        while let Some(Reverse((len, r))) = heap.pop() {
            let r = r as usize;
            if !alive[r] || rows[r].len() != len {
                continue;
            }
            let Some(&(c, p)) = rows[r]
                .iter()
                .filter(|e| e.1.abs() == 1)
                .min_by_key(|e| (cols[e.0 as usize].len(), e.0))
            else {
                continue;
            };
            let pivot = rows[r].clone();
            let targets: Vec<u32> = {
                let mut t: Vec<u32> = cols[c as usize]
                    .iter()
                    .copied()
                    .filter(|&s| s as usize != r && alive[s as usize])
                    .collect();
                t.sort_unstable();
                t.dedup();
                t
            };
            let mut updates = Vec::with_capacity(targets.len());
            let mut overflow = false;
            for &s in &targets {
                let row = &rows[s as usize];
                let Ok(k) = row.binary_search_by_key(&c, |e| e.0) else { continue };
                let a = row[k].1;
                match a.checked_mul(p).and_then(|q| combine(row, &pivot, -q)) {
                    Some(new) => updates.push((s, new)),
                    None => {
                        overflow = true;
                        break;
                    }
                }
            }
            if overflow {
                // leave everything that remains to the exact dense stage
                break;
            }
            for (s, new) in updates {
                let s = s as usize;
                for &(j, _) in &new {
                    if rows[s].binary_search_by_key(&j, |e| e.0).is_err() {
                        cols[j as usize].push(s as u32);
                    }
                }
                rows[s] = new;
                if rows[s].is_empty() {
                    alive[s] = false;
                } else {
                    heap.push(Reverse((rows[s].len(), s as u32)));
                }
            }
            alive[r] = false;
            eliminated[c as usize] = true;
            cols[c as usize] = Vec::new();
            let image = pivot
                .iter()
                .filter(|e| e.0 != c)
                .map(|&(j, v)| (j, -p * v))
                .collect();
            elims.push(Elimination { column: c, image });
        }

        // dense residual
        let mut residual: Vec<SparseVec> = rows
            .into_iter()
            .zip(&alive)
            .filter(|(row, &a)| a && !row.is_empty())
            .map(|(row, _)| row)
            .collect();
        residual.sort();
        residual.dedup();
        let involved: Vec<u32> = {
            let set: HashSet<u32> = residual.iter().flatten().map(|e| e.0).collect();
            let mut v: Vec<u32> = set.into_iter().collect();
            v.sort_unstable();
            v
        };
        let free_cols: Vec<u32> = (0..generators as u32)
            .filter(|&c| !eliminated[c as usize] && involved.binary_search(&c).is_err())
            .collect();
        let mut dense = IntMatrix::zeros(residual.len(), involved.len());
        for (i, row) in residual.iter().enumerate() {
            for &(c, v) in row {
                dense[(i, involved.binary_search(&c).unwrap())] = BigInt::from(v);
            }
        }
        let snf = smith_normal_form(&dense);
        let diag: Vec<BigInt> = (0..involved.len())
            .map(|k| if k < residual.len() { snf.d[(k, k)].clone() } else { BigInt::zero() })
            .collect();

        // coordinate layout
        let mut moduli = Vec::new();
        let mut basis: Vec<Vec<(u32, BigInt)>> = Vec::new();
        // position of each surviving column's coordinate contribution
        enum Slot {
            Free(usize),
            Snf(usize),
        }
        let mut slots = Vec::new();
        for &c in &free_cols {
            slots.push(Slot::Free(c as usize));
            moduli.push(BigInt::zero());
            basis.push(vec![(c, BigInt::one())]);
        }
        let snf_order: Vec<usize> = (0..involved.len())
            .filter(|&k| diag[k].is_zero())
            .chain((0..involved.len()).filter(|&k| diag[k] > BigInt::one()))
            .collect();
        for &k in &snf_order {
            slots.push(Slot::Snf(k));
            moduli.push(diag[k].clone());
            basis.push(
                involved
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !snf.v_inv[(k, *j)].is_zero())
                    .map(|(j, &c)| (c, snf.v_inv[(k, j)].clone()))
                    .collect(),
            );
        }
        let dim = moduli.len();
        let mut gen_coords = vec![Vec::new(); generators];
        for (x, slot) in slots.iter().enumerate() {
            if let Slot::Free(c) = slot {
                let mut v = vec![BigInt::zero(); dim];
                v[x] = BigInt::one();
                gen_coords[*c] = v;
            }
        }
        for (j, &c) in involved.iter().enumerate() {
            gen_coords[c as usize] = slots
                .iter()
                .zip(&moduli)
                .map(|(slot, m)| match slot {
                    Slot::Free(_) => BigInt::zero(),
                    Slot::Snf(k) => reduce(snf.v[(j, *k)].clone(), m),
                })
                .collect();
        }
        for e in elims.iter().rev() {
            let mut v = vec![BigInt::zero(); dim];
            for &(j, coef) in &e.image {
                let coef = BigInt::from(coef);
                for (x, y) in v.iter_mut().zip(&gen_coords[j as usize]) {
                    *x += &coef * y;
                }
            }
            for (x, m) in v.iter_mut().zip(&moduli) {
                *x = reduce(std::mem::take(x), m);
            }
            gen_coords[e.column as usize] = v;
        }
        Self {
            generators,
            moduli,
            gen_coords,
            basis,
        }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    /// `0` for free coordinates, `d` for a `ℤ/d` coordinate.
    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn dimension(&self) -> usize {
        self.moduli.len()
    }

    pub fn rank(&self) -> usize {
        self.moduli.iter().filter(|m| m.is_zero()).count()
    }

    pub fn invariants(&self) -> AbelianInvariants {
        AbelianInvariants {
            rank: self.rank(),
            torsion: self.moduli.iter().filter(|m| !m.is_zero()).cloned().collect(),
        }
    }

    /// Canonical coordinates of the class of `Σ x_g e_g`.
    pub fn coordinates(&self, x: &[(u32, i64)]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.dimension()];
        for &(g, coef) in x {
            let coef = BigInt::from(coef);
            for (a, b) in v.iter_mut().zip(&self.gen_coords[g as usize]) {
                *a += &coef * b;
            }
        }
        self.normalize(v)
    }

    /// Coordinates of an integer combination with arbitrary-size coefficients.
    pub fn coordinates_big(&self, x: &[(u32, BigInt)]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.dimension()];
        for (g, coef) in x {
            for (a, b) in v.iter_mut().zip(&self.gen_coords[*g as usize]) {
                *a += coef * b;
            }
        }
        self.normalize(v)
    }

    /// Class of one generator.
    pub fn generator_class(&self, g: usize) -> &[BigInt] {
        &self.gen_coords[g]
    }

    /// Reduces torsion coordinates into `[0, d)`.
    pub fn normalize(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        for (x, m) in v.iter_mut().zip(&self.moduli) {
            *x = reduce(std::mem::take(x), m);
        }
        v
    }

    /// A combination of generators whose class is the `i`-th unit coordinate.
    pub fn basis_representative(&self, i: usize) -> &[(u32, BigInt)] {
        &self.basis[i]
    }
}

fn reduce(x: BigInt, m: &BigInt) -> BigInt {
    if m.is_zero() {
        x
    } else {
        x.mod_floor(m)
    }
}

/// Whether a coordinate vector is zero.
pub fn is_zero_class(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}
