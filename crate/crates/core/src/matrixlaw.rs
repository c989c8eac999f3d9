//! Finitely supported laws of random non-negative `q x d` matrices.

use num::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};
use crate::matrix::Matrix;
use crate::mc::{self, Proportion};
use crate::prob::Prob;
use crate::tau;

/// Largest support handled by exhaustive enumeration.
pub const MAX_ATOMS: u128 = 1_000_000;

/// Largest `q * d` for Bernoulli enumeration.
pub const MAX_BERNOULLI_CELLS: usize = 20;

/// Draws used when a partition has to be estimated by sampling.
pub const FALLBACK_SAMPLES: u64 = 100_000;

/// Seed of the sampled partition fallback.
pub const FALLBACK_SEED: u64 = 0x9A27_1710;

/// Rejection attempts per Bernoulli draw before the law is declared degenerate.
const MAX_REJECTIONS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub matrix: Matrix,
    pub prob: Prob,
}

/// Which columns a one-hot row may not choose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "m", rename_all = "snake_case")]
pub enum Exclusion {
    /// Every column allowed.
    None,
    /// Row `r <= d` avoids column `r`; later rows are unrestricted.
    OwnIndex,
    /// Square case: row `r` avoids the cyclic window `r, .., r + m - 1`.
    Window(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixLaw {
    Explicit {
        atoms: Vec<Atom>,
    },
    /// Independent rows, each a single positive entry placed uniformly on the allowed columns.
    OneHotUniform {
        q: usize,
        d: usize,
        exclusion: Exclusion,
        #[serde(default)]
        weights: Option<Matrix>,
    },
    /// Independent edges `r ~ j` with probability `p[r][j]` and weight `W[r][j]`,
    /// conditioned on every row having an edge.
    BernoulliGraph {
        p: Vec<Vec<Prob>>,
        weights: Matrix,
    },
}

/// Validation outcome; never panics and lists every failure found.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<String>,
    /// Finiteness of the moment `E[tau^(k,i)(A)^(alpha_i + eps)]` on each partition piece.
    pub moment_condition: String,
    /// `P(no trivial row)` for Bernoulli laws (the conditioning probability).
    pub conditioning_probability: Option<Prob>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::Validation(self.failures.join("; ")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum PartitionMethod {
    Enumerated,
    Sampled {
        n: u64,
        seed: u64,
        ci95: Vec<(f64, f64)>,
        stderr: Vec<f64>,
    },
}

/// `P(i_k(A) = i)` for `i = 1..d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionReport {
    pub k: usize,
    /// `masses[i - 1] = P(i_k(A) = i)`.
    pub masses: Vec<Prob>,
    pub i_star: usize,
    /// `i_k` of every enumerated atom, in support order (empty when sampled).
    pub per_atom: Vec<usize>,
    pub method: PartitionMethod,
}

impl PartitionReport {
    pub fn mass(&self, i: usize) -> &Prob {
        &self.masses[i - 1]
    }
}

impl MatrixLaw {
    pub fn point_mass(a: Matrix) -> Self {
        MatrixLaw::Explicit {
            atoms: vec![Atom {
                matrix: a,
                prob: Prob::one(),
            }],
        }
    }

    pub fn uniform(matrices: Vec<Matrix>) -> Self {
        let n = matrices.len() as i64;
        MatrixLaw::Explicit {
            atoms: matrices
                .into_iter()
                .map(|matrix| Atom {
                    matrix,
                    prob: Prob::ratio(1, n),
                })
                .collect(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixLaw::Explicit { atoms } => atoms
                .first()
                .map_or((0, 0), |a| (a.matrix.rows(), a.matrix.cols())),
            MatrixLaw::OneHotUniform { q, d, .. } => (*q, *d),
            MatrixLaw::BernoulliGraph { weights, .. } => (weights.rows(), weights.cols()),
        }
    }

    /// Allowed columns (0-based) of every row of a one-hot law.
    fn allowed_columns(q: usize, d: usize, exclusion: Exclusion) -> Vec<Vec<usize>> {
        (0..q)
            .map(|r| {
                (0..d)
                    .filter(|&j| match exclusion {
                        Exclusion::None => true,
                        Exclusion::OwnIndex => r >= d || j != r,
                        Exclusion::Window(m) => (j + d - r % d) % d >= m,
                    })
                    .collect()
            })
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let mut conditioning = None;
        match self {
            MatrixLaw::Explicit { atoms } => {
                if atoms.is_empty() {
                    failures.push("explicit law has no atoms".to_string());
                }
                let (q, d) = self.shape();
                for (m, a) in atoms.iter().enumerate() {
                    if (a.matrix.rows(), a.matrix.cols()) != (q, d) {
                        failures.push(format!(
                            "atom {} has shape {}x{}, expected {q}x{d}",
                            m + 1,
                            a.matrix.rows(),
                            a.matrix.cols()
                        ));
                    }
                    if a.prob.is_negative() {
                        failures.push(format!("atom {} has negative probability", m + 1));
                    }
                    if let Some(r) = a.matrix.first_trivial_row() {
                        if !a.prob.is_zero() {
                            failures.push(format!("atom {} has trivial row {}", m + 1, r + 1));
                        }
                    }
                }
                let total = Prob::sum(atoms.iter().map(|a| &a.prob));
                if total.distance_to_one() > 1e-12 {
                    failures.push(format!("probabilities sum to {total}, not 1"));
                }
            }
            MatrixLaw::OneHotUniform {
                q,
                d,
                exclusion,
                weights,
            } => {
                let (q, d) = (*q, *d);
                if q == 0 || d == 0 {
                    failures.push("one-hot law needs q, d >= 1".to_string());
                } else {
                    match exclusion {
                        Exclusion::None => {}
                        Exclusion::OwnIndex => {
                            if !(q >= d && d >= 2) {
                                failures.push(format!(
                                    "own-index exclusion needs q >= d >= 2 (q={q}, d={d})"
                                ));
                            }
                        }
                        Exclusion::Window(m) => {
                            if q != d || *m == 0 || *m >= d {
                                failures.push(format!("window exclusion needs q = d and 1 <= m <= d-1 (q={q}, d={d}, m={m})"));
                            }
                        }
                    }
                    if let Some(w) = weights {
                        if (w.rows(), w.cols()) != (q, d) {
                            failures.push(format!("weights must be {q}x{d}"));
                        } else if w.to_rows().iter().flatten().any(|v| *v <= 0.0) {
                            failures.push("one-hot weights must be positive".to_string());
                        }
                    }
                }
            }
            MatrixLaw::BernoulliGraph { p, weights } => {
                let (q, d) = (weights.rows(), weights.cols());
                if p.len() != q || p.iter().any(|r| r.len() != d) {
                    failures.push(format!("edge probabilities must be {q}x{d}"));
                } else {
                    for (r, row) in p.iter().enumerate() {
                        if row.iter().any(|x| x.is_negative() || x.to_f64() > 1.0) {
                            failures.push(format!("row {} has a probability outside [0,1]", r + 1));
                        }
                        if row.iter().all(|x| x.is_zero()) {
                            failures
                                .push(format!("row {} has no possible edge (trivial row)", r + 1));
                        }
                    }
                    for (r, row) in p.iter().enumerate() {
                        for (j, x) in row.iter().enumerate() {
                            if !x.is_zero() && weights.get(r, j) <= 0.0 {
                                failures.push(format!(
                                    "edge ({}, {}) is possible but has weight 0",
                                    r + 1,
                                    j + 1
                                ));
                            }
                        }
                    }
                    if failures.is_empty() {
                        conditioning = Some(no_trivial_row_probability(p));
                    }
                }
            }
        }
        ValidationReport {
            failures,
            moment_condition: "finite (finite support)".to_string(),
            conditioning_probability: conditioning,
        }
    }

    /// Number of atoms enumeration would produce.
    pub fn support_size(&self) -> u128 {
        match self {
            MatrixLaw::Explicit { atoms } => atoms.len() as u128,
            MatrixLaw::OneHotUniform {
                q, d, exclusion, ..
            } => Self::allowed_columns(*q, *d, *exclusion)
                .iter()
                .fold(1u128, |acc, r| acc.saturating_mul(r.len() as u128)),
            MatrixLaw::BernoulliGraph { weights, .. } => {
                let cells = weights.rows() * weights.cols();
                if cells >= 127 {
                    u128::MAX
                } else {
                    1u128 << cells
                }
            }
        }
    }

    /// Exact support with exact probabilities whenever the inputs are exact.
    pub fn enumerate_support(&self) -> Result<Vec<Atom>> {
        self.validate().into_result()?;
        match self {
            MatrixLaw::Explicit { atoms } => Ok(atoms.clone()),
            MatrixLaw::OneHotUniform {
                q,
                d,
                exclusion,
                weights,
            } => {
                let size = self.support_size();
                if size > MAX_ATOMS {
                    return Err(Error::Capacity(format!(
                        "one-hot law has {size} atoms (limit {MAX_ATOMS}); use the sampling paths"
                    )));
                }
                let allowed = Self::allowed_columns(*q, *d, *exclusion);
                let prob = Prob::Exact(BigRational::new(1.into(), (size as u64).into()));
                let mut out = Vec::with_capacity(size as usize);
                let mut choice = vec![0usize; *q];
                loop {
                    let mut m = Matrix::zeros(*q, *d);
                    for (r, &c) in choice.iter().enumerate() {
                        let j = allowed[r][c];
                        m.set(r, j, weights.as_ref().map_or(1.0, |w| w.get(r, j)));
                    }
                    out.push(Atom {
                        matrix: m,
                        prob: prob.clone(),
                    });
                    // odometer, last row fastest
                    let mut r = *q;
                    loop {
                        if r == 0 {
                            return Ok(out);
                        }
                        r -= 1;
                        choice[r] += 1;
                        if choice[r] < allowed[r].len() {
                            break;
                        }
                        choice[r] = 0;
                    }
                }
            }
            MatrixLaw::BernoulliGraph { p, weights } => {
                let (q, d) = (weights.rows(), weights.cols());
                if q * d > MAX_BERNOULLI_CELLS {
                    return Err(Error::Capacity(format!(
                        "Bernoulli enumeration needs q*d <= {MAX_BERNOULLI_CELLS}, got {}; use the sampling paths",
                        q * d
                    )));
                }
                let norm = no_trivial_row_probability(p);
                let mut out = Vec::new();
                for pattern in 0u64..(1 << (q * d)) {
                    let mut m = Matrix::zeros(q, d);
                    let mut prob = Prob::one();
                    for r in 0..q {
                        for j in 0..d {
                            if pattern & (1 << (r * d + j)) != 0 {
                                m.set(r, j, weights.get(r, j));
                                prob = prob * p[r][j].clone();
                            } else {
                                prob = prob * p[r][j].complement();
                            }
                        }
                    }
                    if prob.is_zero() || m.first_trivial_row().is_some() {
                        continue;
                    }
                    out.push(Atom {
                        matrix: m,
                        prob: prob / norm.clone(),
                    });
                }
                Ok(out)
            }
        }
    }

    /// A reusable sampler; draws follow the law exactly (Bernoulli by rejection).
    pub fn sampler(&self) -> Result<MatrixSampler> {
        self.validate().into_result()?;
        Ok(match self {
            MatrixLaw::Explicit { atoms } => MatrixSampler::from_atoms(atoms),
            MatrixLaw::OneHotUniform {
                q,
                d,
                exclusion,
                weights,
            } => {
                let allowed = Self::allowed_columns(*q, *d, *exclusion);
                MatrixSampler::OneHot {
                    d: *d,
                    choices: allowed
                        .into_iter()
                        .enumerate()
                        .map(|(r, cols)| {
                            cols.into_iter()
                                .map(|j| (j, weights.as_ref().map_or(1.0, |w| w.get(r, j))))
                                .collect()
                        })
                        .collect(),
                }
            }
            MatrixLaw::BernoulliGraph { p, weights } => MatrixSampler::Bernoulli {
                p: p.iter()
                    .map(|r| r.iter().map(Prob::to_f64).collect())
                    .collect(),
                weights: weights.clone(),
            },
        })
    }

    /// One matrix drawn with a generator seeded from `seed`.
    pub fn sample_matrix(&self, seed: u64) -> Result<Matrix> {
        let s = self.sampler()?;
        let mut rng = mc::chunk_rng(seed, 0);
        s.draw(&mut rng)
    }

    /// `P(i_k(A) = i)` by enumeration, falling back to sampling when the support is too large.
    pub fn partition(&self, k: usize) -> Result<PartitionReport> {
        match self.enumerate_support() {
            Ok(atoms) => partition_of_atoms(&atoms, k),
            Err(Error::Capacity(_)) => self.partition_sampled(k, FALLBACK_SAMPLES, FALLBACK_SEED),
            Err(e) => Err(e),
        }
    }

    /// Sampled partition masses with Wilson/normal 95% intervals.
    pub fn partition_sampled(&self, k: usize, n: u64, seed: u64) -> Result<PartitionReport> {
        let (q, d) = self.shape();
        check_index(k, q)?;
        let sampler = self.sampler()?;
        let counts = mc::map_chunks(n, seed, |rng, len| {
            let mut c = vec![0u64; d];
            for _ in 0..len {
                let a = sampler.draw(rng).expect("validated law");
                let supports: Vec<u64> = (0..q).map(|r| a.row_support(r)).collect();
                c[tau::critical_index_fast(&supports, d, k) - 1] += 1;
            }
            c
        });
        let mut total = vec![0u64; d];
        for c in counts {
            for (t, x) in total.iter_mut().zip(c) {
                *t += x;
            }
        }
        let props: Vec<Proportion> = total
            .iter()
            .map(|&c| Proportion::from_counts(c, n))
            .collect();
        let i_star = total.iter().position(|&c| c > 0).map_or(d, |p| p + 1);
        Ok(PartitionReport {
            k,
            masses: props.iter().map(|p| Prob::Float(p.p_hat)).collect(),
            i_star,
            per_atom: Vec::new(),
            method: PartitionMethod::Sampled {
                n,
                seed,
                ci95: props.iter().map(|p| p.ci95).collect(),
                stderr: props.iter().map(|p| p.stderr).collect(),
            },
        })
    }
}

/// Partition of an explicit atom list.
pub fn partition_of_atoms(atoms: &[Atom], k: usize) -> Result<PartitionReport> {
    let first = atoms
        .first()
        .ok_or_else(|| Error::validation("empty support"))?;
    let (q, d) = (first.matrix.rows(), first.matrix.cols());
    check_index(k, q)?;
    let per_atom: Vec<usize> = atoms
        .par_iter()
        .map(|a| {
            if a.prob.is_zero() && a.matrix.first_trivial_row().is_some() {
                // zero-probability placeholders never enter the partition
                return Ok(0);
            }
            Ok(tau::critical_index(&a.matrix, k)?.0)
        })
        .collect::<Result<_>>()?;
    let mut masses = vec![Prob::zero(); d];
    for (a, &i) in atoms.iter().zip(&per_atom) {
        if i > 0 {
            masses[i - 1] = masses[i - 1].clone() + a.prob.clone();
        }
    }
    let i_star = masses
        .iter()
        .position(|m| !m.is_zero())
        .map_or(d, |p| p + 1);
    Ok(PartitionReport {
        k,
        masses,
        i_star,
        per_atom,
        method: PartitionMethod::Enumerated,
    })
}

fn no_trivial_row_probability(p: &[Vec<Prob>]) -> Prob {
    p.iter().fold(Prob::one(), |acc, row| {
        let none = row.iter().fold(Prob::one(), |a, x| a * x.complement());
        acc * none.complement()
    })
}

/// Precomputed sampler for a matrix law.
#[derive(Clone, Debug)]
pub enum MatrixSampler {
    Fixed(Matrix),
    Atoms {
        cumulative: Vec<f64>,
        matrices: Vec<Matrix>,
    },
    OneHot {
        d: usize,
        choices: Vec<Vec<(usize, f64)>>,
    },
    Bernoulli {
        p: Vec<Vec<f64>>,
        weights: Matrix,
    },
}

impl MatrixSampler {
    pub(crate) fn from_atoms(atoms: &[Atom]) -> Self {
        let live: Vec<&Atom> = atoms.iter().filter(|a| !a.prob.is_zero()).collect();
        if live.len() == 1 {
            return MatrixSampler::Fixed(live[0].matrix.clone());
        }
        let mut acc = 0.0;
        let cumulative = live
            .iter()
            .map(|a| {
                acc += a.prob.to_f64();
                acc
            })
            .collect();
        MatrixSampler::Atoms {
            cumulative,
            matrices: live.iter().map(|a| a.matrix.clone()).collect(),
        }
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Result<Matrix> {
        match self {
            MatrixSampler::Fixed(m) => Ok(m.clone()),
            MatrixSampler::Atoms { matrices, .. } => Ok(matrices[self.draw_atom(rng)].clone()),
            MatrixSampler::OneHot { d, choices } => {
                let mut m = Matrix::zeros(choices.len(), *d);
                for (r, row) in choices.iter().enumerate() {
                    let (j, w) = row[rng.gen_range(0..row.len())];
                    m.set(r, j, w);
                }
                Ok(m)
            }
            MatrixSampler::Bernoulli { p, weights } => {
                let (q, d) = (weights.rows(), weights.cols());
                let mut m = Matrix::zeros(q, d);
                for _ in 0..MAX_REJECTIONS {
                    for r in 0..q {
                        for j in 0..d {
                            let on = rng.gen::<f64>() < p[r][j];
                            m.set(r, j, if on { weights.get(r, j) } else { 0.0 });
                        }
                    }
                    if m.first_trivial_row().is_none() {
                        return Ok(m);
                    }
                }
                Err(Error::Numerical(
                    "Bernoulli rejection sampler did not terminate".into(),
                ))
            }
        }
    }

    /// Index of a drawn atom for atom-list samplers.
    #[inline]
    pub(crate) fn draw_atom(&self, rng: &mut ChaCha8Rng) -> usize {
        match self {
            MatrixSampler::Atoms { cumulative, .. } => {
                let u = rng.gen::<f64>() * cumulative[cumulative.len() - 1];
                cumulative
                    .partition_point(|c| *c <= u)
                    .min(cumulative.len() - 1)
            }
            _ => 0,
        }
    }

    /// Writes `A z` for a freshly drawn `A` into `out`.
    #[inline]
    pub fn apply(&self, rng: &mut ChaCha8Rng, z: &[f64], out: &mut [f64]) {
        match self {
            MatrixSampler::Fixed(m) => m.mul_vec_into(z, out),
            MatrixSampler::Atoms { matrices, .. } => {
                matrices[self.draw_atom(rng)].mul_vec_into(z, out)
            }
            MatrixSampler::OneHot { choices, .. } => {
                for (o, row) in out.iter_mut().zip(choices) {
                    let (j, w) = row[rng.gen_range(0..row.len())];
                    *o = w * z[j];
                }
            }
            MatrixSampler::Bernoulli { .. } => {
                self.draw(rng).expect("validated law").mul_vec_into(z, out)
            }
        }
    }
}

/// Exact probability that the used columns of a one-hot matrix are exactly `cols`.
pub fn used_columns_mass(atoms: &[Atom], cols: u64) -> Prob {
    atoms
        .iter()
        .filter(|a| (0..a.matrix.rows()).fold(0u64, |m, r| m | a.matrix.row_support(r)) == cols)
        .fold(Prob::zero(), |acc, a| acc + a.prob.clone())
}
