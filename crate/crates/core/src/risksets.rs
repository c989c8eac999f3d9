//! Tail events `C` in the cone `E_q^(k) = {x : x^(k) > 0}`.
//!
//! A set is either a union of open upper rectangles (each clause bounds at
//! least `k` coordinates from below) or a union of open polyhedra given by
//! strict inequalities `a . x > b`. Both are bounded away from the union of
//! `(k-1)`-dimensional coordinate hyperplanes; `delta` is the distance.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc;
use crate::subsets;
use crate::tau::order_stat;

/// Largest clause count accepted by [`RiskSet::disjointify`].
pub const MAX_DISJOINTIFY_CLAUSES: usize = 20;

/// Points drawn by the halfspace `delta` audit.
pub const AUDIT_POINTS: usize = 100_000;

/// Seed of the audit sampler; fixed so that audits are reproducible.
pub const AUDIT_SEED: u64 = 0x5EED_DE17A;

/// `{x : x_j > gamma_j for j in coords}` with 0-based, strictly increasing coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RectClauseRepr", into = "RectClauseRepr")]
pub struct RectClause {
    coords: Vec<usize>,
    thresholds: Vec<f64>,
}

/// JSON form with 1-based coordinates.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RectClauseRepr {
    coords: Vec<usize>,
    thresholds: Vec<f64>,
}

impl TryFrom<RectClauseRepr> for RectClause {
    type Error = Error;
    fn try_from(r: RectClauseRepr) -> Result<Self> {
        if r.coords.contains(&0) {
            return Err(Error::config("coords", "coordinates are 1-based"));
        }
        RectClause::new(r.coords.iter().map(|c| c - 1).collect(), r.thresholds)
    }
}

impl From<RectClause> for RectClauseRepr {
    fn from(c: RectClause) -> Self {
        RectClauseRepr {
            coords: c.coords.iter().map(|c| c + 1).collect(),
            thresholds: c.thresholds,
        }
    }
}

impl RectClause {
    /// Coordinates may come in any order; duplicates are rejected.
    pub fn new(coords: Vec<usize>, thresholds: Vec<f64>) -> Result<Self> {
        if coords.len() != thresholds.len() {
            return Err(Error::DimensionMismatch {
                expected: coords.len(),
                got: thresholds.len(),
            });
        }
        if let Some(g) = thresholds.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::validation(format!(
                "rectangle thresholds must be positive, got {g}"
            )));
        }
        let mut pairs: Vec<(usize, f64)> = coords.into_iter().zip(thresholds).collect();
        pairs.sort_by_key(|p| p.0);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::validation(
                "duplicate coordinate in rectangle clause",
            ));
        }
        let (coords, thresholds) = pairs.into_iter().unzip();
        Ok(RectClause { coords, thresholds })
    }

    /// All listed coordinates share the same threshold.
    pub fn uniform(coords: Vec<usize>, threshold: f64) -> Result<Self> {
        let n = coords.len();
        RectClause::new(coords, vec![threshold; n])
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coords
            .iter()
            .copied()
            .zip(self.thresholds.iter().copied())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.iter().all(|(j, g)| x[j] > g)
    }

    /// Intersection of two upper rectangles: union of constraints, larger threshold wins.
    pub fn intersect(&self, other: &RectClause) -> RectClause {
        let mut m: BTreeMap<usize, f64> = self.iter().collect();
        for (j, g) in other.iter() {
            let e = m.entry(j).or_insert(g);
            *e = e.max(g);
        }
        RectClause {
            coords: m.keys().copied().collect(),
            thresholds: m.values().copied().collect(),
        }
    }

    fn scaled(&self, t: f64) -> RectClause {
        RectClause {
            coords: self.coords.clone(),
            thresholds: self.thresholds.iter().map(|g| g * t).collect(),
        }
    }
}

/// Strict inequality `a . x > b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Halfspace {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Halfspace {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        Halfspace { a, b }
    }

    #[inline]
    pub fn holds(&self, x: &[f64]) -> bool {
        self.a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() > self.b
    }
}

/// Intersection of strict halfspaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceClause {
    pub constraints: Vec<Halfspace>,
}

impl HalfspaceClause {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.constraints.iter().all(|h| h.holds(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SetKind {
    RectUnion {
        clauses: Vec<RectClause>,
    },
    HalfspaceUnion {
        clauses: Vec<HalfspaceClause>,
        delta: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskSet {
    pub dim: usize,
    pub k: usize,
    #[serde(flatten)]
    pub kind: SetKind,
}

/// Signed clause of an inclusion-exclusion expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedClause {
    pub sign: i64,
    pub clause: RectClause,
}

impl RiskSet {
    pub fn rect_union(dim: usize, k: usize, clauses: Vec<RectClause>) -> Result<Self> {
        let s = RiskSet {
            dim,
            k,
            kind: SetKind::RectUnion { clauses },
        };
        s.validate()?;
        Ok(s)
    }

    /// A polyhedral union; `delta` is the declared lower bound of `x^(k)` on the set,
    /// audited by [`RiskSet::delta`].
    pub fn halfspace_union(
        dim: usize,
        k: usize,
        clauses: Vec<HalfspaceClause>,
        delta: f64,
    ) -> Result<Self> {
        let s = RiskSet {
            dim,
            k,
            kind: SetKind::HalfspaceUnion { clauses, delta },
        };
        s.validate()?;
        Ok(s)
    }

    /// `(x, inf)` as a single rectangle clause at level `q`.
    pub fn upper_orthant(x: &[f64]) -> Result<Self> {
        let q = x.len();
        RiskSet::rect_union(q, q, vec![RectClause::new((0..q).collect(), x.to_vec())?])
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim >= 64 {
            return Err(Error::validation(format!(
                "set dimension {} out of range",
                self.dim
            )));
        }
        if self.k == 0 || self.k > self.dim {
            return Err(Error::IndexOutOfRange {
                index: self.k,
                max: self.dim,
            });
        }
        match &self.kind {
            SetKind::RectUnion { clauses } => {
                if clauses.is_empty() {
                    return Err(Error::validation(
                        "a rectangle union needs at least one clause",
                    ));
                }
                for c in clauses {
                    if let Some(&j) = c.coords.iter().find(|&&j| j >= self.dim) {
                        return Err(Error::IndexOutOfRange {
                            index: j + 1,
                            max: self.dim,
                        });
                    }
                    if c.coords.len() < self.k {
                        return Err(Error::validation(format!(
                            "clause constrains {} coordinates, level k = {} needs at least k",
                            c.coords.len(),
                            self.k
                        )));
                    }
                }
            }
            SetKind::HalfspaceUnion { clauses, delta } => {
                if clauses.is_empty() {
                    return Err(Error::validation(
                        "a halfspace union needs at least one clause",
                    ));
                }
                if !(delta.is_finite() && *delta > 0.0) {
                    return Err(Error::validation(format!(
                        "delta must be positive, got {delta}"
                    )));
                }
                for h in clauses.iter().flat_map(|c| &c.constraints) {
                    if h.a.len() != self.dim {
                        return Err(Error::DimensionMismatch {
                            expected: self.dim,
                            got: h.a.len(),
                        });
                    }
                    if !(h.b.is_finite() && h.a.iter().all(|v| v.is_finite())) {
                        return Err(Error::validation("halfspace coefficients must be finite"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_rect_union(&self) -> bool {
        matches!(self.kind, SetKind::RectUnion { .. })
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.contains_unchecked(x))
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, x: &[f64]) -> bool {
        match &self.kind {
            SetKind::RectUnion { clauses } => clauses.iter().any(|c| c.contains(x)),
            SetKind::HalfspaceUnion { clauses, .. } => clauses.iter().any(|c| c.contains(x)),
        }
    }

    /// Exact distance for rectangle unions; audited declared value for halfspace unions.
    pub fn delta(&self) -> Result<f64> {
        match &self.kind {
            SetKind::RectUnion { .. } => Ok(self.rect_delta()),
            SetKind::HalfspaceUnion { delta, .. } => {
                self.audit_delta(AUDIT_POINTS, AUDIT_SEED)?;
                Ok(*delta)
            }
        }
    }

    /// Lower bound of `x^(k)` on the set without running the audit.
    pub(crate) fn delta_unaudited(&self) -> f64 {
        match &self.kind {
            SetKind::RectUnion { .. } => self.rect_delta(),
            SetKind::HalfspaceUnion { delta, .. } => *delta,
        }
    }

    fn rect_delta(&self) -> f64 {
        let SetKind::RectUnion { clauses } = &self.kind else {
            unreachable!()
        };
        clauses
            .iter()
            .map(|c| {
                let mut v = vec![0.0; self.dim];
                for (j, g) in c.iter() {
                    v[j] = g;
                }
                order_stat(&v, self.k).expect("k validated")
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Samples up to `points` members of the set and checks `x^(k) >= delta` on each.
    ///
    /// Candidates mix exact zeros with log-uniform magnitudes over twelve
    /// decades around `delta`, which concentrates draws near the faces where a
    /// wrongly declared `delta` would show. Returns the number of members seen.
    pub fn audit_delta(&self, points: usize, seed: u64) -> Result<usize> {
        let SetKind::HalfspaceUnion { delta, .. } = &self.kind else {
            return Ok(0);
        };
        let delta = *delta;
        let q = self.dim;
        let max_attempts = (points as u64).saturating_mul(100);
        let mut rng = mc::chunk_rng(seed, 0);
        let mut x = vec![0.0; q];
        let mut seen = 0usize;
        let mut attempts = 0u64;
        while seen < points && attempts < max_attempts {
            attempts += 1;
            let zero_p = rng.gen::<f64>() * 0.5;
            for v in x.iter_mut() {
                *v = if rng.gen::<f64>() < zero_p {
                    0.0
                } else {
                    delta * 10f64.powf(rng.gen_range(-6.0..6.0))
                };
            }
            if !self.contains_unchecked(&x) {
                continue;
            }
            seen += 1;
            let ok = order_stat(&x, self.k)?;
            if ok < delta * (1.0 - 1e-12) {
                return Err(Error::validation(format!(
                    "declared delta {delta} is not a lower bound: found a member with x^({}) = {ok}",
                    self.k
                )));
            }
        }
        Ok(seen)
    }

    /// `tC`; membership satisfies `scale(C, t).contains(t x) == C.contains(x)`.
    pub fn scale(&self, t: f64) -> Result<RiskSet> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::validation(format!(
                "scale factor must be positive, got {t}"
            )));
        }
        let kind = match &self.kind {
            SetKind::RectUnion { clauses } => SetKind::RectUnion {
                clauses: clauses.iter().map(|c| c.scaled(t)).collect(),
            },
            SetKind::HalfspaceUnion { clauses, delta } => SetKind::HalfspaceUnion {
                clauses: clauses
                    .iter()
                    .map(|c| HalfspaceClause {
                        constraints: c
                            .constraints
                            .iter()
                            .map(|h| Halfspace::new(h.a.clone(), h.b * t))
                            .collect(),
                    })
                    .collect(),
                delta: delta * t,
            },
        };
        Ok(RiskSet {
            dim: self.dim,
            k: self.k,
            kind,
        })
    }

    /// Inclusion-exclusion expansion of a rectangle union with identical
    /// intersection clauses merged and zero-weight clauses dropped.
    pub fn disjointify(&self) -> Result<Vec<SignedClause>> {
        let SetKind::RectUnion { clauses } = &self.kind else {
            return Err(Error::validation(
                "disjointify applies to rectangle unions only",
            ));
        };
        inclusion_exclusion(clauses)
    }

    /// Every clause as a list of strict inequalities in `x`.
    pub fn linear_clauses(&self) -> Vec<Vec<Halfspace>> {
        match &self.kind {
            SetKind::RectUnion { clauses } => clauses
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|(j, g)| {
                            let mut a = vec![0.0; self.dim];
                            a[j] = 1.0;
                            Halfspace::new(a, g)
                        })
                        .collect()
                })
                .collect(),
            SetKind::HalfspaceUnion { clauses, .. } => {
                clauses.iter().map(|c| c.constraints.clone()).collect()
            }
        }
    }
}

pub(crate) fn inclusion_exclusion(clauses: &[RectClause]) -> Result<Vec<SignedClause>> {
    let n = clauses.len();
    if n > MAX_DISJOINTIFY_CLAUSES {
        return Err(Error::Capacity(format!(
            "inclusion-exclusion over {n} clauses needs 2^{n} terms (limit {MAX_DISJOINTIFY_CLAUSES} clauses)"
        )));
    }
    let mut merged: Vec<SignedClause> = Vec::new();
    for size in 1..=n {
        let sign = if size % 2 == 1 { 1 } else { -1 };
        for mask in subsets::of_size(n, size) {
            let mut it = subsets::members(mask);
            let first = clauses[it.next().expect("non-empty")].clone();
            let clause = it.fold(first, |acc, j| acc.intersect(&clauses[j]));
            match merged.iter_mut().find(|s| s.clause == clause) {
                Some(s) => s.sign += sign,
                None => merged.push(SignedClause { sign, clause }),
            }
        }
    }
    merged.retain(|s| s.sign != 0);
    Ok(merged)
}
