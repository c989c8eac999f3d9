//! The functionals `tau^(k,i)(A) = sup (Az)^(k) / z^(i)` and critical indices.
//!
//! On the unit sphere of `z^(i)` at most `i - 1` coordinates exceed one. Pushing
//! a column set `S` of that size to infinity drives every row touching `S` to
//! infinity; the remaining rows are maximised with all other coordinates at one.
//! Hence the supremum is infinite exactly when some `|S| <= i - 1` touches `k`
//! rows, and otherwise equals the largest `(k - cover(S))`-th biggest row sum
//! among the untouched rows.

use std::cmp::Ordering;
use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{check_index, Error, Result};
use crate::matrix::Matrix;
use crate::mc;
use crate::subsets;

/// Largest column count handled by exhaustive subset search.
pub const MAX_COLUMNS: usize = 22;

/// Amplification levels used by [`tau_oracle`].
pub const ORACLE_LEVELS: [f64; 5] = [1.0, 10.0, 100.0, 1e3, 1e4];

/// Growth between the last two oracle levels that counts as divergence.
pub const ORACLE_GROWTH: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauValue {
    Finite(f64),
    Infinite,
}

impl TauValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, TauValue::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            TauValue::Finite(v) => Some(*v),
            TauValue::Infinite => None,
        }
    }
}

impl PartialOrd for TauValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (TauValue::Finite(a), TauValue::Finite(b)) => a.partial_cmp(b),
            (TauValue::Finite(_), TauValue::Infinite) => Some(Ordering::Less),
            (TauValue::Infinite, TauValue::Finite(_)) => Some(Ordering::Greater),
            (TauValue::Infinite, TauValue::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for TauValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauValue::Finite(v) => write!(f, "{v}"),
            TauValue::Infinite => f.write_str("INF"),
        }
    }
}

impl Serialize for TauValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TauValue::Finite(v) => s.serialize_f64(*v),
            TauValue::Infinite => s.serialize_str("INF"),
        }
    }
}

/// Witness of a minimum cover: `columns` touch exactly `covered_rows` (both 1-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverCertificate {
    pub columns: Vec<usize>,
    pub covered_rows: Vec<usize>,
}

/// `k`-th largest coordinate of `x`.
pub fn order_stat(x: &[f64], k: usize) -> Result<f64> {
    check_index(k, x.len())?;
    let mut v = x.to_vec();
    let (_, kth, _) = v.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    Ok(*kth)
}

fn check_shape(a: &Matrix, k: usize, i: usize) -> Result<()> {
    a.ensure_no_trivial_row()?;
    check_index(k, a.rows())?;
    check_index(i, a.cols())?;
    if a.cols() > MAX_COLUMNS {
        return Err(Error::Capacity(format!(
            "exhaustive subset search limited to d <= {MAX_COLUMNS}, got {}",
            a.cols()
        )));
    }
    Ok(())
}

fn row_supports(a: &Matrix) -> Vec<u64> {
    (0..a.rows()).map(|r| a.row_support(r)).collect()
}

fn covered(supports: &[u64], cols: u64) -> u64 {
    supports
        .iter()
        .enumerate()
        .filter(|(_, s)| **s & cols != 0)
        .fold(0u64, |m, (r, _)| m | (1 << r))
}

/// Exact `tau^(k,i)(A)`.
pub fn tau_matrix(a: &Matrix, k: usize, i: usize) -> Result<TauValue> {
    check_shape(a, k, i)?;
    let supports = row_supports(a);
    let sums: Vec<f64> = (0..a.rows()).map(|r| a.row_sum(r)).collect();
    let mut best = 0.0f64;
    let mut free = Vec::with_capacity(a.rows());
    for size in 0..i {
        for s in subsets::of_size(a.cols(), size) {
            let cov = covered(&supports, s);
            let c = cov.count_ones() as usize;
            if c >= k {
                return Ok(TauValue::Infinite);
            }
            free.clear();
            free.extend(
                (0..a.rows())
                    .filter(|r| cov & (1 << r) == 0)
                    .map(|r| sums[r]),
            );
            let (_, v, _) = free.select_nth_unstable_by(k - c - 1, |x, y| y.total_cmp(x));
            best = best.max(*v);
        }
    }
    Ok(TauValue::Finite(best))
}

/// `i_k(A)`: the fewest columns touching at least `k` rows, with a witness.
pub fn critical_index(a: &Matrix, k: usize) -> Result<(usize, CoverCertificate)> {
    check_shape(a, k, 1)?;
    let supports = row_supports(a);
    for size in 1..=a.cols() {
        for s in subsets::of_size(a.cols(), size) {
            let cov = covered(&supports, s);
            if cov.count_ones() as usize >= k {
                return Ok((
                    size,
                    CoverCertificate {
                        columns: subsets::members(s).map(|j| j + 1).collect(),
                        covered_rows: subsets::members(cov).map(|r| r + 1).collect(),
                    },
                ));
            }
        }
    }
    unreachable!("all columns together cover every non-trivial row")
}

/// `i_k(A)` without the certificate, using precomputed row supports.
pub(crate) fn critical_index_fast(supports: &[u64], cols: usize, k: usize) -> usize {
    (1..=cols)
        .find(|&size| {
            subsets::of_size(cols, size).any(|s| covered(supports, s).count_ones() as usize >= k)
        })
        .expect("non-trivial rows")
}

/// Result of the randomized search of [`tau_oracle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub lower_bound: f64,
    pub divergent: bool,
}

/// Randomized lower bound for `tau^(k,i)(A)` and a divergence flag.
///
/// Each draw picks up to `i - 1` columns, sets them to each level in
/// [`ORACLE_LEVELS`], and fills the other coordinates with uniforms on `(0, 1]`
/// (one pinned to 1). Every evaluated ratio is a valid lower bound. A draw whose
/// ratio grows by at least [`ORACLE_GROWTH`] between the two top levels marks
/// divergence: for a bounded ratio the touched rows are already saturated
/// there, while an unbounded one grows almost linearly in the level. The
/// all-ones point of every column set is always included.
pub fn tau_oracle(
    a: &Matrix,
    k: usize,
    i: usize,
    budget: usize,
    seed: u64,
) -> Result<OracleResult> {
    check_shape(a, k, i)?;
    if budget < 1000 {
        return Err(Error::validation("oracle budget must be at least 1000"));
    }
    let d = a.cols();
    let mut rng = mc::chunk_rng(seed, 0);
    let mut z = vec![0.0; d];
    let mut x = vec![0.0; a.rows()];
    let mut best = 0.0f64;
    let mut divergent = false;
    let ratio = |z: &[f64], x: &mut [f64]| -> f64 {
        a.mul_vec_into(z, x);
        order_stat(x, k).unwrap() / order_stat(z, i).unwrap()
    };
    for draw in 0..budget {
        let size = rng.gen_range(0..i);
        let chosen = sample(&mut rng, d, size).into_vec();
        let corner = draw % 4 == 0;
        for v in z.iter_mut() {
            *v = if corner { 1.0 } else { 1.0 - rng.gen::<f64>() };
        }
        let free: Vec<usize> = (0..d).filter(|j| !chosen.contains(j)).collect();
        let pin = free[rng.gen_range(0..free.len())];
        z[pin] = 1.0;
        let mut prev = 0.0;
        for (l, level) in ORACLE_LEVELS.iter().enumerate() {
            for &j in &chosen {
                z[j] = *level;
            }
            let r = ratio(&z, &mut x);
            best = best.max(r);
            if l == ORACLE_LEVELS.len() - 1 && size > 0 && r >= ORACLE_GROWTH * prev {
                divergent = true;
            }
            prev = r;
        }
    }
    Ok(OracleResult {
        lower_bound: best,
        divergent,
    })
}
