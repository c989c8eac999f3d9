//! The power expansion `P(AZ in tC) ~ sum_i c_i t^(-e_i)` and its leading orders.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_index, Error, Result};
use crate::margins::MarginalModel;
use crate::matrix::Matrix;
use crate::matrixlaw::{partition_of_atoms, Atom, MatrixLaw};
use crate::mc;
use crate::measure::{expected_over_atoms, LimitMeasure, McConfig, MeasureEstimate, Method};
use crate::polyhedron::{self, Feasibility, Ineq};
use crate::risksets::RiskSet;

/// Points drawn by the emptiness probe when elimination is too large.
pub const PROBE_POINTS: u64 = 100_000;

/// Largest coordinate amplitude used by the probe.
pub const PROBE_AMPLITUDE: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub i: usize,
    pub exponent: f64,
    pub coefficient: f64,
    pub stderr: f64,
    pub method: Method,
    /// `P(i_k(A) = i)`.
    pub partition_mass: f64,
    /// Sampled coefficient within three standard errors of zero.
    pub negligible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailExpansion {
    pub k: usize,
    pub terms: Vec<Term>,
    pub i_star: usize,
    /// Smallest `i` with a resolvable positive coefficient.
    pub iota_bar: Option<usize>,
    /// Whether every atom below `iota_bar` was shown to have an empty pre-image.
    pub refined_valid: bool,
    pub checks: Vec<AtomCheck>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IotaStatus {
    /// `i_k(A) >= iota_bar`, nothing to show.
    NotRequired,
    /// One-hot rows and a rectangle union.
    VerifiedOneHot,
    /// Emptiness proved by elimination.
    VerifiedExact,
    /// A point of the pre-image was found.
    Violated,
    Inconclusive,
}

impl IotaStatus {
    pub fn is_verified(self) -> bool {
        matches!(
            self,
            IotaStatus::NotRequired | IotaStatus::VerifiedOneHot | IotaStatus::VerifiedExact
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomCheck {
    /// 1-based position in the enumerated support.
    pub atom: usize,
    pub i_k: usize,
    pub status: IotaStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    /// Sum of every term, clamped to `[0, 1]`.
    pub full: f64,
    /// The `iota_bar` term alone (0 when no order resolves).
    pub leading: f64,
}

fn check_scenario(model: &MarginalModel, law: &MatrixLaw, set: &RiskSet, k: usize) -> Result<()> {
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
    check_index(k, q)?;
    if set.k != k {
        return Err(Error::validation(format!(
            "set lives at level k = {}, requested k = {k}",
            set.k
        )));
    }
    Ok(())
}

/// Every term `i = i_k*, .., d` of the expansion.
pub fn expansion(
    model: &MarginalModel,
    law: &MatrixLaw,
    set: &RiskSet,
    k: usize,
    mc_cfg: &McConfig,
) -> Result<TailExpansion> {
    check_scenario(model, law, set, k)?;
    let atoms = law.enumerate_support()?;
    let partition = partition_of_atoms(&atoms, k)?;
    let d = model.dim();
    let terms: Vec<Term> = (partition.i_star..=d)
        .into_par_iter()
        .map(|i| {
            let law_i = model.order_stat_tail(i)?;
            let mass = partition.mass(i);
            let est = if mass.is_zero() {
                MeasureEstimate::exact(0.0)
            } else {
                let measure = LimitMeasure::new(model, i)?;
                let cfg = McConfig {
                    samples: mc_cfg.samples,
                    seed: mc::derive_seed(mc_cfg.seed, i as u64),
                };
                expected_over_atoms(&measure, &atoms, Some(&partition.per_atom), set, k, &cfg)?
            };
            Ok(Term {
                i,
                exponent: law_i.exponent,
                coefficient: (law_i.constant * est.mass).max(0.0),
                stderr: law_i.constant * est.stderr,
                method: est.method,
                partition_mass: mass.to_f64(),
                negligible: est.indistinguishable_from_zero(),
            })
        })
        .collect::<Result<_>>()?;
    let iota_bar = terms
        .iter()
        .find(|t| !t.negligible && t.coefficient > 0.0)
        .map(|t| t.i);
    let checks = match iota_bar {
        Some(ib) if ib > partition.i_star => {
            iota_check_atoms(&atoms, &partition.per_atom, set, ib, mc_cfg.seed)
        }
        _ => Vec::new(),
    };
    let refined_valid = iota_bar.is_some() && checks.iter().all(|c| c.status.is_verified());
    Ok(TailExpansion {
        k,
        terms,
        i_star: partition.i_star,
        iota_bar,
        refined_valid,
        checks,
    })
}

/// `(exponent, coefficient)` of the first resolvable positive term.
pub fn leading_order(exp: &TailExpansion) -> Result<(f64, f64)> {
    let ib = exp.iota_bar.ok_or(Error::NoResolvableOrder)?;
    let t = exp
        .terms
        .iter()
        .find(|t| t.i == ib)
        .ok_or(Error::NoResolvableOrder)?;
    Ok((t.exponent, t.coefficient))
}

/// `sum_i c_i t^(-e_i)` and the leading term alone.
pub fn evaluate(exp: &TailExpansion, t: f64) -> Result<Evaluation> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::validation(format!(
            "t must be positive and finite, got {t}"
        )));
    }
    let full: f64 = exp
        .terms
        .iter()
        .map(|term| term.coefficient * t.powf(-term.exponent))
        .sum();
    let leading = leading_order(exp).map_or(0.0, |(e, c)| c * t.powf(-e));
    Ok(Evaluation {
        full: full.clamp(0.0, 1.0),
        leading,
    })
}

/// Checks `A^-1(C) = {}` for every atom with `i_k(A) < iota_bar`.
pub fn iota_check(
    model: &MarginalModel,
    law: &MatrixLaw,
    set: &RiskSet,
    k: usize,
    iota_bar: usize,
    seed: u64,
) -> Result<Vec<AtomCheck>> {
    check_scenario(model, law, set, k)?;
    check_index(iota_bar, model.dim())?;
    let atoms = law.enumerate_support()?;
    let partition = partition_of_atoms(&atoms, k)?;
    Ok(iota_check_atoms(
        &atoms,
        &partition.per_atom,
        set,
        iota_bar,
        seed,
    ))
}

fn iota_check_atoms(
    atoms: &[Atom],
    per_atom: &[usize],
    set: &RiskSet,
    iota_bar: usize,
    seed: u64,
) -> Vec<AtomCheck> {
    atoms
        .par_iter()
        .zip(per_atom)
        .enumerate()
        .map(|(m, (atom, &ik))| {
            let status = if atom.prob.is_zero() || ik >= iota_bar {
                IotaStatus::NotRequired
            } else {
                preimage_status(&atom.matrix, set, mc::derive_seed(seed, m as u64))
            };
            AtomCheck {
                atom: m + 1,
                i_k: ik,
                status,
            }
        })
        .collect()
}

fn preimage_status(a: &Matrix, set: &RiskSet, seed: u64) -> IotaStatus {
    let mut too_large = false;
    for clause in set.linear_clauses() {
        let system: Vec<Ineq> = clause
            .iter()
            .map(|hs| Ineq {
                g: (0..a.cols())
                    .map(|j| (0..a.rows()).map(|r| hs.a[r] * a.get(r, j)).sum())
                    .collect(),
                h: hs.b,
                strict: true,
            })
            .collect();
        match polyhedron::feasibility(a.cols(), &system) {
            Feasibility::Empty => {}
            Feasibility::NonEmpty => return IotaStatus::Violated,
            Feasibility::TooLarge => too_large = true,
        }
    }
    if !too_large {
        return if a.is_one_hot() && set.is_rect_union() {
            IotaStatus::VerifiedOneHot
        } else {
            IotaStatus::VerifiedExact
        };
    }
    if probe_hits(a, set, seed) {
        IotaStatus::Violated
    } else {
        IotaStatus::Inconclusive
    }
}

/// Samples the column space with log-uniform amplitudes and random zeros.
fn probe_hits(a: &Matrix, set: &RiskSet, seed: u64) -> bool {
    let (q, d) = (a.rows(), a.cols());
    let span = PROBE_AMPLITUDE.ln();
    mc::count_hits(
        PROBE_POINTS,
        seed,
        || (vec![0.0; d], vec![0.0; q]),
        |rng, (z, x)| {
            for v in z.iter_mut() {
                *v = if rng.gen_bool(0.25) {
                    0.0
                } else {
                    (rng.gen_range(-span..span)).exp()
                };
            }
            a.mul_vec_into(z, x);
            set.contains_unchecked(x)
        },
    ) > 0
}
