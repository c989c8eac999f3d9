//! Direct and stratified Monte Carlo estimates of `P(AZ in tC)`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::asymptotics::{self, TailExpansion};
use crate::error::{Error, Result};
use crate::margins::MarginalModel;
use crate::matrixlaw::{partition_of_atoms, MatrixLaw, MatrixSampler};
use crate::mc::{self, Proportion};
use crate::measure::McConfig;
use crate::prob::Prob;
use crate::risksets::RiskSet;

/// Smallest sample size accepted by the estimators.
pub const MIN_SAMPLES: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub n: u64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub seed: u64,
}

impl McEstimate {
    fn from_counts(hits: u64, n: u64, seed: u64) -> Self {
        let p = Proportion::from_counts(hits, n);
        McEstimate {
            p_hat: p.p_hat,
            n,
            stderr: p.stderr,
            ci95: p.ci95,
            seed,
        }
    }

    fn zero(seed: u64) -> Self {
        McEstimate {
            p_hat: 0.0,
            n: 0,
            stderr: 0.0,
            ci95: (0.0, 0.0),
            seed,
        }
    }

    /// Multiplies the estimate by a known probability.
    fn weighted(self, w: f64) -> Self {
        McEstimate {
            p_hat: w * self.p_hat,
            stderr: w * self.stderr,
            ci95: (w * self.ci95.0, w * self.ci95.1),
            ..self
        }
    }
}

fn check_inputs(
    model: &MarginalModel,
    law: &MatrixLaw,
    set: &RiskSet,
    t: f64,
    n: u64,
) -> Result<()> {
    model.validate()?;
    law.validate().into_result()?;
    set.validate()?;
    let (q, d) = law.shape();
    if d != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: d,
        });
    }
    if q != set.dim {
        return Err(Error::DimensionMismatch {
            expected: set.dim,
            got: q,
        });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::validation(format!(
            "t must be positive and finite, got {t}"
        )));
    }
    if n < MIN_SAMPLES {
        return Err(Error::validation(format!(
            "n must be at least {MIN_SAMPLES}, got {n}"
        )));
    }
    Ok(())
}

fn hits(
    model: &MarginalModel,
    sampler: &MatrixSampler,
    scaled: &RiskSet,
    n: u64,
    seed: u64,
) -> u64 {
    let (d, q) = (model.dim(), scaled.dim);
    mc::count_hits(
        n,
        seed,
        || (vec![0.0; d], vec![0.0; q]),
        |rng, (z, x)| {
            model.sample_into(rng, z);
            sampler.apply(rng, z, x);
            scaled.contains_unchecked(x)
        },
    )
}

/// Plain estimate with independent draws of `A` and `Z`.
pub fn empirical_tail(
    model: &MarginalModel,
    law: &MatrixLaw,
    set: &RiskSet,
    t: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_inputs(model, law, set, t, n)?;
    let sampler = law.sampler()?;
    let scaled = set.scale(t)?;
    Ok(McEstimate::from_counts(
        hits(model, &sampler, &scaled, n, seed),
        n,
        seed,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stratum {
    pub i: usize,
    /// `P(i_k(A) = i)`, with `k` the level of the set.
    pub mass: Prob,
    /// Estimate of `P(AZ in tC, i_k(A) = i)`.
    pub estimate: McEstimate,
}

/// Estimates restricted to each piece `i_k(A) = i`, `n` draws per non-empty piece.
pub fn stratified_tail(
    model: &MarginalModel,
    law: &MatrixLaw,
    set: &RiskSet,
    t: f64,
    n: u64,
    seed: u64,
) -> Result<Vec<Stratum>> {
    check_inputs(model, law, set, t, n)?;
    let atoms = law.enumerate_support()?;
    let partition = partition_of_atoms(&atoms, set.k)?;
    let scaled = set.scale(t)?;
    (1..=model.dim())
        .map(|i| {
            let mass = partition.mass(i).clone();
            let stratum_seed = mc::derive_seed(seed, i as u64);
            if mass.is_zero() {
                return Ok(Stratum {
                    i,
                    mass,
                    estimate: McEstimate::zero(stratum_seed),
                });
            }
            let inside: Vec<_> = atoms
                .iter()
                .zip(&partition.per_atom)
                .filter(|(a, &ik)| ik == i && !a.prob.is_zero())
                .map(|(a, _)| a.clone())
                .collect();
            let sampler = MatrixSampler::from_atoms(&inside);
            let h = hits(model, &sampler, &scaled, n, stratum_seed);
            let estimate = McEstimate::from_counts(h, n, stratum_seed).weighted(mass.to_f64());
            Ok(Stratum { i, mass, estimate })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub t: f64,
    pub p_hat: f64,
    pub stderr: f64,
    pub full_eval: f64,
    pub leading_eval: f64,
    pub ratio_full: f64,
    pub ratio_leading: f64,
}

/// Empirical probabilities against the expansion along a grid of `t`.
pub fn ratio_table(
    model: &MarginalModel,
    law: &MatrixLaw,
    set: &RiskSet,
    t_grid: &[f64],
    n: u64,
    seed: u64,
) -> Result<Vec<RatioRow>> {
    let exp = asymptotics::expansion(
        model,
        law,
        set,
        set.k,
        &McConfig {
            seed: mc::derive_seed(seed, u64::MAX),
            ..McConfig::default()
        },
    )?;
    ratio_rows(model, law, set, &exp, t_grid, n, seed)
}

/// As [`ratio_table`] against a precomputed expansion.
pub fn ratio_rows(
    model: &MarginalModel,
    law: &MatrixLaw,
    set: &RiskSet,
    exp: &TailExpansion,
    t_grid: &[f64],
    n: u64,
    seed: u64,
) -> Result<Vec<RatioRow>> {
    if t_grid.is_empty() {
        return Err(Error::validation("t grid is empty"));
    }
    t_grid
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let est = empirical_tail(model, law, set, t, n, mc::derive_seed(seed, j as u64))?;
            let ev = asymptotics::evaluate(exp, t)?;
            Ok(RatioRow {
                t,
                p_hat: est.p_hat,
                stderr: est.stderr,
                full_eval: ev.full,
                leading_eval: ev.leading,
                ratio_full: ratio(est.p_hat, ev.full),
                ratio_leading: ratio(est.p_hat, ev.leading),
            })
        })
        .collect()
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

/// A CSV cell: shortest round-trip decimal, or `INF` for anything non-finite.
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        "INF".to_string()
    }
}

pub fn ratio_csv(rows: &[RatioRow]) -> String {
    let mut out = String::from("t,p_hat,stderr,full_eval,leading_eval,ratio_full,ratio_leading\n");
    for r in rows {
        let cells = [
            r.t,
            r.p_hat,
            r.stderr,
            r.full_eval,
            r.leading_eval,
            r.ratio_full,
            r.ratio_leading,
        ];
        let line: Vec<String> = cells.iter().map(|&c| cell(c)).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::risksets::RectClause;

    fn circulant() -> MatrixLaw {
        MatrixLaw::point_mass(
            Matrix::from_rows(&[
                vec![1.0, 1.0, 0.0],
                vec![0.0, 1.0, 1.0],
                vec![1.0, 0.0, 1.0],
            ])
            .unwrap(),
        )
    }

    #[test]
    fn whole_orthant_is_certain() {
        let model = MarginalModel::iid(1.0, vec![1.0; 2]).unwrap();
        let law = MatrixLaw::point_mass(Matrix::identity(2));
        // Pareto draws with kappa = 1 always exceed 1, so x_1 > 0.5 t at t = 1.
        let set =
            RiskSet::rect_union(2, 1, vec![RectClause::uniform(vec![0], 0.5).unwrap()]).unwrap();
        let est = empirical_tail(&model, &law, &set, 1.0, 20_000, 4).unwrap();
        assert_eq!(est.p_hat, 1.0);
    }

    #[test]
    fn reproducible_and_rejects_small_n() {
        let model = MarginalModel::iid(1.0, vec![1.0; 3]).unwrap();
        let set = RiskSet::upper_orthant(&[1.0; 3]).unwrap();
        let a = empirical_tail(&model, &circulant(), &set, 5.0, 50_000, 11).unwrap();
        let b = empirical_tail(&model, &circulant(), &set, 5.0, 50_000, 11).unwrap();
        assert_eq!(a.p_hat.to_bits(), b.p_hat.to_bits());
        assert!(empirical_tail(&model, &circulant(), &set, 5.0, 100, 11).is_err());
    }

    #[test]
    fn strata_with_no_mass_are_exact_zero() {
        let model = MarginalModel::iid(1.0, vec![1.0; 3]).unwrap();
        let set = RiskSet::upper_orthant(&[1.0; 3]).unwrap();
        let s = stratified_tail(&model, &circulant(), &set, 5.0, 20_000, 2).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].estimate.p_hat, 0.0);
        assert_eq!(s[2].estimate.n, 0);
        assert!(s[1].estimate.p_hat > 0.0);
    }

    #[test]
    fn csv_shape() {
        let model = MarginalModel::iid(1.0, vec![1.0; 3]).unwrap();
        let set = RiskSet::upper_orthant(&[1.0; 3]).unwrap();
        let rows = ratio_table(&model, &circulant(), &set, &[10.0], 20_000, 1).unwrap();
        assert_eq!(rows.len(), 1);
        let csv = ratio_csv(&rows);
        assert!(
            csv.starts_with("t,p_hat,stderr,full_eval,leading_eval,ratio_full,ratio_leading\n10,")
        );
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(cell(f64::INFINITY), "INF");
    }
}
