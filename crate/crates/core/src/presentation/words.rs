//! Words in a free group: letters are nonzero `i32`, `g + 1` for generator
//! `g` and `-(g + 1)` for its inverse.

pub type Word = Vec<i32>;

pub fn generator_of(letter: i32) -> usize {
    letter.unsigned_abs() as usize - 1
}

pub fn letter(generator: usize, positive: bool) -> i32 {
    let l = generator as i32 + 1;
    if positive {
        l
    } else {
        -l
    }
}

/// Cancels adjacent `x x⁻¹` pairs.
pub fn free_reduce(word: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Free reduction followed by cancelling letters across the ends.
pub fn cyclic_reduce(word: &[i32]) -> Word {
    let w = free_reduce(word);
    let (mut i, mut j) = (0, w.len());
    while j - i >= 2 && w[i] == -w[j - 1] {
        i += 1;
        j -= 1;
    }
    w[i..j].to_vec()
}

pub fn invert(word: &[i32]) -> Word {
    word.iter().rev().map(|l| -l).collect()
}

pub fn concat(a: &[i32], b: &[i32]) -> Word {
    let mut w = a.to_vec();
    w.extend_from_slice(b);
    free_reduce(&w)
}

/// Smallest rotation, lexicographically.
fn min_rotation(word: &[i32]) -> Word {
    let n = word.len();
    (0..n)
        .map(|r| word[r..].iter().chain(&word[..r]).copied().collect::<Word>())
        .min()
        .unwrap_or_default()
}

/// Representative of a cyclically reduced word up to rotation and inversion;
/// relators with equal canonical forms generate the same normal subgroup.
pub fn canonical_relator(word: &[i32]) -> Word {
    let w = cyclic_reduce(word);
    let a = min_rotation(&w);
    let b = min_rotation(&invert(&w));
    a.min(b)
}

/// Signed letter counts per generator.
pub fn exponent_vector(word: &[i32], generators: usize) -> Vec<i64> {
    let mut v = vec![0i64; generators];
    for &l in word {
        v[generator_of(l)] += l.signum() as i64;
    }
    v
}

/// Sparse signed letter counts, sorted by generator, zeros dropped.
pub fn exponent_sparse(word: &[i32]) -> Vec<(u32, i64)> {
    let mut v: Vec<(u32, i64)> = word
        .iter()
        .map(|&l| (generator_of(l) as u32, l.signum() as i64))
        .collect();
    v.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(u32, i64)> = Vec::with_capacity(v.len());
    for (g, c) in v {
        match out.last_mut() {
            Some(last) if last.0 == g => last.1 += c,
            _ => out.push((g, c)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

/// Replaces every occurrence of generator `g` by `image` (and its inverse by
/// the inverted image), then freely reduces.
pub fn substitute(word: &[i32], g: usize, image: &[i32]) -> Word {
    let inv = invert(image);
    let mut out = Vec::with_capacity(word.len());
    for &l in word {
        if generator_of(l) == g {
            out.extend_from_slice(if l > 0 { image } else { &inv });
        } else {
            out.push(l);
        }
    }
    free_reduce(&out)
}
