//! Brute-force oracles shared by the integration tests. Nothing here calls the
//! combinatorial code paths of the library it checks.

#![allow(dead_code)]

use std::collections::HashMap;

use heavytail::Matrix;
use num::{BigInt, BigRational, Zero};
use rand::Rng;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Random `q x d` matrix with entries `Uniform(0, 2)`, each zeroed with probability
/// `p_zero`, redrawn row by row until no row is all zero.
pub fn random_matrix<R: Rng>(rng: &mut R, q: usize, d: usize, p_zero: f64) -> Matrix {
    let mut rows = Vec::with_capacity(q);
    while rows.len() < q {
        let row: Vec<f64> = (0..d)
            .map(|_| {
                if rng.gen_bool(p_zero) {
                    0.0
                } else {
                    rng.gen_range(0.0..2.0)
                }
            })
            .collect();
        if row.iter().any(|v| *v > 0.0) {
            rows.push(row);
        }
    }
    Matrix::from_rows(&rows).unwrap()
}

/// Smallest number of columns whose supports cover at least `k` rows, by plain
/// iteration over every bitmask.
pub fn min_cover(a: &Matrix, k: usize) -> usize {
    let (q, d) = (a.rows(), a.cols());
    let mut best = d;
    for mask in 0u32..(1 << d) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let hit = (0..q)
            .filter(|&r| (0..d).any(|j| mask & (1 << j) != 0 && a.get(r, j) > 0.0))
            .count();
        if hit >= k {
            best = size;
        }
    }
    best
}

/// Exact distribution of the used-column set of a one-hot law where row `r`
/// picks uniformly among the columns `allowed(r)` (0-based).
pub fn used_column_law(
    q: usize,
    allowed: impl Fn(usize) -> Vec<usize>,
) -> HashMap<u64, BigRational> {
    let choices: Vec<Vec<usize>> = (0..q).map(&allowed).collect();
    let total: i64 = choices.iter().map(|c| c.len() as i64).product();
    let mut out: HashMap<u64, BigRational> = HashMap::new();
    let mut idx = vec![0usize; q];
    loop {
        let mask = idx
            .iter()
            .enumerate()
            .fold(0u64, |m, (r, &c)| m | (1 << choices[r][c]));
        *out.entry(mask).or_insert_with(BigRational::zero) += rat(1, total);
        let mut r = 0;
        while r < q {
            idx[r] += 1;
            if idx[r] < choices[r].len() {
                break;
            }
            idx[r] = 0;
            r += 1;
        }
        if r == q {
            break;
        }
    }
    out
}

/// Own-index rule: row `r < d` avoids column `r`.
pub fn own_index_allowed(d: usize) -> impl Fn(usize) -> Vec<usize> {
    move |r| (0..d).filter(|&j| r >= d || j != r).collect()
}

/// Window rule: row `r` avoids columns `r, .., r + m - 1` (cyclic).
pub fn window_allowed(d: usize, m: usize) -> impl Fn(usize) -> Vec<usize> {
    move |r| {
        let banned: Vec<usize> = (0..m).map(|l| (r + l) % d).collect();
        (0..d).filter(|j| !banned.contains(j)).collect()
    }
}

/// All `size`-subsets of `0..n` as bitmasks.
pub fn subsets(n: usize, size: usize) -> Vec<u64> {
    (0u64..(1 << n))
        .filter(|m| m.count_ones() as usize == size)
        .collect()
}

pub fn mass_where(law: &HashMap<u64, BigRational>, pred: impl Fn(u64) -> bool) -> BigRational {
    law.iter()
        .filter(|(m, _)| pred(**m))
        .fold(BigRational::zero(), |acc, (_, p)| acc + p)
}

pub fn to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap()
}

/// Parses a CSV string into a header and rows of cells.
pub fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap_or("")
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}
