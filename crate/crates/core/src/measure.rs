//! Limit measures `mu_i` and the pre-image masses `mu_i(A^-1(C))`.
//!
//! Every supported `mu_i` is a finite mixture of product Pareto measures: a
//! component lives on the coordinate hyperplane spanned by its support `J`
//! and gives `{z_j > u_j, j in J}` the mass `w * prod_j u_j^-e_j`. For iid
//! margins there is one component per `i`-subset with exponent `alpha` on each
//! coordinate; the dependent `mu_3` has three full-support components.
//!
//! Pre-image masses are evaluated per component, in order of preference:
//!
//! 1. closed form, when every clause of `A^-1(C)` restricted to the hyperplane
//!    is an upper rectangle (inclusion-exclusion over at most 20 of them);
//! 2. adaptive quadrature, for one- and two-dimensional supports;
//! 3. Monte Carlo under the exact product law above `delta = delta(C) / tau`.
//!
//! Only points with `z_j >= delta` on `J` can map into `C`, so intersecting with
//! that box never changes a mass and keeps every computation finite.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_index, Error, Result};
use crate::margins::{Dependence, MarginalModel};
use crate::matrix::Matrix;
use crate::matrixlaw::{Atom, MatrixLaw};
use crate::mc;
use crate::quadrature;
use crate::risksets::RiskSet;
use crate::subsets;
use crate::tau::{self, TauValue};

/// Largest rectangle count handled by closed-form inclusion-exclusion.
pub const MAX_RECTANGLES: usize = 20;

/// Minimum Monte Carlo draws per component.
pub const MIN_COMPONENT_SAMPLES: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    /// 0-based coordinates of the supporting hyperplane.
    pub support: Vec<usize>,
    pub exponents: Vec<f64>,
    pub weight: f64,
}

impl Component {
    /// Mass of `{z_j > u_j, j in support}`.
    pub fn rect_mass(&self, u: &[f64]) -> f64 {
        self.weight
            * u.iter()
                .zip(&self.exponents)
                .map(|(u, e)| u.powf(-e))
                .product::<f64>()
    }

    fn total_exponent(&self) -> f64 {
        self.exponents.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitMeasure {
    pub i: usize,
    pub dim: usize,
    /// Homogeneity order: `mu(cB) = c^-exponent mu(B)`.
    pub exponent: f64,
    pub components: Vec<Component>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Quadrature,
    MonteCarlo { n: u64, seed: u64 },
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo { .. } => "monte_carlo",
        }
    }

    fn combine(self, other: Method) -> Method {
        match (self, other) {
            (m @ Method::MonteCarlo { .. }, _) | (_, m @ Method::MonteCarlo { .. }) => m,
            (Method::Quadrature, _) | (_, Method::Quadrature) => Method::Quadrature,
            _ => Method::Analytic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub mass: f64,
    pub stderr: f64,
    pub method: Method,
}

impl MeasureEstimate {
    pub fn exact(mass: f64) -> Self {
        MeasureEstimate {
            mass,
            stderr: 0.0,
            method: Method::Analytic,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self.method, Method::MonteCarlo { .. })
    }

    /// Zero, or within three standard errors of zero for sampled values.
    pub fn indistinguishable_from_zero(&self) -> bool {
        if self.is_deterministic() {
            self.mass.abs() <= 1e-15
        } else {
            self.mass <= 3.0 * self.stderr
        }
    }
}

/// Monte Carlo budget used whenever a closed form is unavailable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 200_000,
            seed: 0,
        }
    }
}

impl LimitMeasure {
    pub fn new(model: &MarginalModel, i: usize) -> Result<Self> {
        model.validate()?;
        let d = model.dim();
        check_index(i, d)?;
        let law = model.order_stat_tail(i)?;
        let a = model.alpha;
        let components = match model.dependence {
            Dependence::Dependent { .. } if i == 3 => {
                let s: f64 = model.kappa.iter().sum();
                (0..3)
                    .map(|h| Component {
                        support: vec![0, 1, 2],
                        exponents: (0..3).map(|j| if j == h { 2.0 * a } else { a }).collect(),
                        weight: model.kappa[h] / s,
                    })
                    .collect()
            }
            _ => subsets::of_size(d, i)
                .map(|mask| {
                    let support: Vec<usize> = subsets::members(mask).collect();
                    let w: f64 = support.iter().map(|&j| model.kappa[j]).product();
                    Component {
                        exponents: vec![a; i],
                        weight: w / law.constant,
                        support,
                    }
                })
                .collect(),
        };
        Ok(LimitMeasure {
            i,
            dim: d,
            exponent: law.exponent,
            components,
        })
    }

    /// Mass of `{z_j > u_j, j in coords}` for an `i`-element coordinate set (0-based).
    pub fn mu_rect(&self, coords: &[usize], u: &[f64]) -> Result<MeasureEstimate> {
        if coords.len() != self.i {
            return Err(Error::validation(format!(
                "rectangle must constrain exactly i = {} coordinates, got {}",
                self.i,
                coords.len()
            )));
        }
        if coords.len() != u.len() {
            return Err(Error::DimensionMismatch {
                expected: coords.len(),
                got: u.len(),
            });
        }
        if let Some(v) = u.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::validation(format!(
                "thresholds must be positive, got {v}"
            )));
        }
        let mut pairs: Vec<(usize, f64)> = coords.iter().copied().zip(u.iter().copied()).collect();
        pairs.sort_by_key(|p| p.0);
        if let Some(&(j, _)) = pairs.iter().find(|p| p.0 >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: j + 1,
                max: self.dim,
            });
        }
        let sorted: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let uu: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let mass = self
            .components
            .iter()
            .filter(|c| c.support == sorted)
            .map(|c| c.rect_mass(&uu))
            .sum();
        Ok(MeasureEstimate::exact(mass))
    }
}

/// Constraint `c . z > beta` in `z`-space.
#[derive(Clone, Debug)]
struct Lin {
    c: Vec<f64>,
    beta: f64,
}

/// Clauses of `A^-1(C)`.
fn preimage_clauses(a: &Matrix, set: &RiskSet) -> Vec<Vec<Lin>> {
    set.linear_clauses()
        .into_iter()
        .map(|clause| {
            clause
                .into_iter()
                .map(|h| {
                    let c = (0..a.cols())
                        .map(|j| (0..a.rows()).map(|r| h.a[r] * a.get(r, j)).sum())
                        .collect();
                    Lin { c, beta: h.b }
                })
                .collect()
        })
        .collect()
}

/// Restriction of a clause list to the coordinates of `support`.
fn restrict(clauses: &[Vec<Lin>], support: &[usize]) -> Vec<Vec<Lin>> {
    clauses
        .iter()
        .map(|cl| {
            cl.iter()
                .map(|l| Lin {
                    c: support.iter().map(|&j| l.c[j]).collect(),
                    beta: l.beta,
                })
                .collect()
        })
        .collect()
}

/// Lower corners of the rectangles making up the clauses, or `None` when some
/// clause is not an upper rectangle inside the `delta` box.
fn rect_reduce(clauses: &[Vec<Lin>], dim: usize, delta: f64) -> Option<Vec<Vec<f64>>> {
    let mut rects = Vec::new();
    'clause: for cl in clauses {
        let mut u = vec![delta; dim];
        let mut pending = Vec::new();
        for l in cl {
            if l.c.iter().any(|v| *v < 0.0) {
                return None;
            }
            let pos: Vec<usize> = (0..dim).filter(|&j| l.c[j] > 0.0).collect();
            match pos.len() {
                0 if l.beta >= 0.0 => continue 'clause,
                0 => {}
                1 => {
                    let j = pos[0];
                    u[j] = u[j].max(l.beta / l.c[j]);
                }
                _ => pending.push(l),
            }
        }
        for l in pending {
            let at_corner: f64 = l.c.iter().zip(&u).map(|(c, u)| c * u).sum();
            if at_corner < l.beta {
                return None;
            }
        }
        rects.push(u);
    }
    Some(rects)
}

/// Drops duplicate rectangles and those inside another one.
fn prune(mut rects: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let inside = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x >= y);
    let mut keep: Vec<Vec<f64>> = Vec::new();
    rects.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for r in rects {
        if keep.iter().any(|k| inside(&r, k)) {
            continue;
        }
        keep.retain(|k| !inside(k, &r));
        keep.push(r);
    }
    keep
}

/// Mass of a union of upper rectangles under one component, or `None` when
/// there are too many rectangles.
fn union_mass(comp: &Component, rects: Vec<Vec<f64>>) -> Option<f64> {
    let rects = prune(rects);
    let n = rects.len();
    if n > MAX_RECTANGLES {
        return None;
    }
    let mut total = 0.0;
    for size in 1..=n {
        let sign = if size % 2 == 1 { 1.0 } else { -1.0 };
        for mask in subsets::of_size(n, size) {
            let mut u = vec![0.0f64; comp.support.len()];
            for r in subsets::members(mask) {
                for (x, y) in u.iter_mut().zip(&rects[r]) {
                    *x = x.max(*y);
                }
            }
            total += sign * comp.rect_mass(&u);
        }
    }
    Some(total)
}

/// Open interval `(lo, hi)` of `v` on which all 1-d constraints `c v + off > beta` hold.
fn interval(cl: &[(f64, f64)], lo0: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (lo0, f64::INFINITY);
    for &(c, rhs) in cl {
        if c > 0.0 {
            lo = lo.max(rhs / c);
        } else if c < 0.0 {
            hi = hi.min(rhs / c);
        } else if rhs >= 0.0 {
            return None;
        }
    }
    (lo < hi).then_some((lo, hi))
}

/// `sum over the union of intervals of (lo^-e - hi^-e)`.
fn interval_union_mass(mut iv: Vec<(f64, f64)>, e: f64) -> f64 {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    let tail = |lo: f64, hi: f64| lo.powf(-e) - if hi.is_finite() { hi.powf(-e) } else { 0.0 };
    for (lo, hi) in iv {
        match cur {
            Some((cl, ch)) if lo <= ch => cur = Some((cl, ch.max(hi))),
            Some((cl, ch)) => {
                total += tail(cl, ch);
                cur = Some((lo, hi));
            }
            None => cur = Some((lo, hi)),
        }
    }
    if let Some((cl, ch)) = cur {
        total += tail(cl, ch);
    }
    total
}

/// Deterministic mass for components supported on one or two coordinates.
fn quadrature_mass(comp: &Component, clauses: &[Vec<Lin>], delta: f64) -> Option<f64> {
    match comp.support.len() {
        1 => {
            let e = comp.exponents[0];
            let iv = clauses
                .iter()
                .filter_map(|cl| {
                    let one: Vec<(f64, f64)> = cl.iter().map(|l| (l.c[0], l.beta)).collect();
                    interval(&one, delta)
                })
                .collect();
            Some(comp.weight * interval_union_mass(iv, e))
        }
        2 => {
            let (ea, eb) = (comp.exponents[0], comp.exponents[1]);
            // inner mass as a function of the outer coordinate z_b
            let inner = |zb: f64| -> f64 {
                let iv = clauses
                    .iter()
                    .filter_map(|cl| {
                        let one: Vec<(f64, f64)> =
                            cl.iter().map(|l| (l.c[0], l.beta - l.c[1] * zb)).collect();
                        interval(&one, delta)
                    })
                    .collect();
                interval_union_mass(iv, ea)
            };
            // kinks: crossings of the linear bounds z_a = (beta - c_b z_b) / c_a,
            // the constant bound delta, and sign changes of c_b z_b - beta
            let lines: Vec<(f64, f64)> = clauses
                .iter()
                .flatten()
                .filter(|l| l.c[0] != 0.0)
                .map(|l| (l.beta / l.c[0], -l.c[1] / l.c[0]))
                .chain(std::iter::once((delta, 0.0)))
                .collect();
            let mut breaks: Vec<f64> = Vec::new();
            for (n, &(a1, s1)) in lines.iter().enumerate() {
                for &(a2, s2) in &lines[n + 1..] {
                    if s1 != s2 {
                        breaks.push((a2 - a1) / (s1 - s2));
                    }
                }
            }
            breaks.extend(
                clauses
                    .iter()
                    .flatten()
                    .filter(|l| l.c[0] == 0.0 && l.c[1] != 0.0)
                    .map(|l| l.beta / l.c[1]),
            );
            // s = z_b^-eb maps [delta, inf) onto (0, delta^-eb]
            let s_max = delta.powf(-eb);
            let mut cuts: Vec<f64> = breaks
                .into_iter()
                .filter(|z| z.is_finite() && *z > delta)
                .map(|z| z.powf(-eb))
                .filter(|s| *s > 0.0 && *s < s_max)
                .collect();
            cuts.push(0.0);
            cuts.push(s_max);
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * s_max);
            // Gauss-Kronrod never evaluates the endpoints, so s > 0 below
            let f = |s: f64| inner(s.powf(-1.0 / eb));
            let total: f64 = cuts
                .windows(2)
                .map(|w| quadrature::integrate(f, w[0], w[1], 1e-15 * (w[1] - w[0])))
                .sum();
            Some(comp.weight * total)
        }
        _ => None,
    }
}

/// Monte Carlo mass of one component above the `delta` box.
fn mc_component(
    comp: &Component,
    a: &Matrix,
    set: &RiskSet,
    delta: f64,
    n: u64,
    seed: u64,
) -> (f64, f64) {
    let d = a.cols();
    let q = a.rows();
    let hits = mc::count_hits(
        n,
        seed,
        || (vec![0.0; d], vec![0.0; q]),
        |rng, (z, x)| {
            for (&j, &e) in comp.support.iter().zip(&comp.exponents) {
                z[j] = delta * (1.0 - rng.gen::<f64>()).powf(-1.0 / e);
            }
            a.mul_vec_into(z, x);
            set.contains_unchecked(x)
        },
    );
    let p = hits as f64 / n as f64;
    let factor = comp.weight * delta.powf(-comp.total_exponent());
    (factor * p, factor * (p * (1.0 - p) / n as f64).sqrt())
}

fn finite_tau(a: &Matrix, k: usize, i: usize) -> Result<f64> {
    match tau::tau_matrix(a, k, i)? {
        TauValue::Finite(v) if v > 0.0 => Ok(v),
        TauValue::Finite(_) => Err(Error::Numerical("tau is zero".into())),
        TauValue::Infinite => Err(Error::InfiniteTau { k, i }),
    }
}

fn check_dims(measure: &LimitMeasure, a: &Matrix, set: &RiskSet) -> Result<()> {
    if a.cols() != measure.dim {
        return Err(Error::DimensionMismatch {
            expected: measure.dim,
            got: a.cols(),
        });
    }
    if a.rows() != set.dim {
        return Err(Error::DimensionMismatch {
            expected: set.dim,
            got: a.rows(),
        });
    }
    Ok(())
}

/// Monte Carlo estimate of `mu_i(A^-1(C))` under the exact product law above `delta`.
pub fn mu_set_mc(
    measure: &LimitMeasure,
    a: &Matrix,
    set: &RiskSet,
    n: u64,
    seed: u64,
) -> Result<MeasureEstimate> {
    check_dims(measure, a, set)?;
    if n < MIN_COMPONENT_SAMPLES {
        return Err(Error::validation(format!(
            "need at least {MIN_COMPONENT_SAMPLES} samples"
        )));
    }
    let delta = set.delta()? / finite_tau(a, set.k, measure.i)?;
    if !(delta > 0.0) {
        return Err(Error::Numerical("delta is zero".into()));
    }
    let per = (n / measure.components.len() as u64).max(MIN_COMPONENT_SAMPLES);
    let parts: Vec<(f64, f64)> = measure
        .components
        .iter()
        .enumerate()
        .map(|(h, comp)| mc_component(comp, a, set, delta, per, mc::derive_seed(seed, h as u64)))
        .collect();
    Ok(MeasureEstimate {
        mass: parts.iter().map(|p| p.0).sum(),
        stderr: parts.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt(),
        method: Method::MonteCarlo {
            n: per * parts.len() as u64,
            seed,
        },
    })
}

/// `mu_i(A^-1(C))`: closed form where possible, then quadrature, then Monte Carlo.
pub fn mu_preimage(
    measure: &LimitMeasure,
    a: &Matrix,
    set: &RiskSet,
    mc_cfg: &McConfig,
) -> Result<MeasureEstimate> {
    check_dims(measure, a, set)?;
    let delta = set.delta_unaudited() / finite_tau(a, set.k, measure.i)?;
    let clauses = preimage_clauses(a, set);
    let per = (mc_cfg.samples / measure.components.len() as u64).max(MIN_COMPONENT_SAMPLES);
    let mut mass = 0.0;
    let mut var = 0.0;
    let mut method = Method::Analytic;
    for (h, comp) in measure.components.iter().enumerate() {
        let local = restrict(&clauses, &comp.support);
        if let Some(m) =
            rect_reduce(&local, comp.support.len(), delta).and_then(|r| union_mass(comp, r))
        {
            mass += m;
            continue;
        }
        if let Some(m) = quadrature_mass(comp, &local, delta) {
            mass += m;
            method = method.combine(Method::Quadrature);
            continue;
        }
        let seed = mc::derive_seed(mc_cfg.seed, h as u64);
        let (m, se) = mc_component(comp, a, set, delta, per, seed);
        mass += m;
        var += se * se;
        method = method.combine(Method::MonteCarlo {
            n: per * measure.components.len() as u64,
            seed: mc_cfg.seed,
        });
    }
    Ok(MeasureEstimate {
        mass,
        stderr: var.sqrt(),
        method,
    })
}

/// `E[mu_i(A^-1(C)); i_k(A) = i]` over the atoms of `law`.
pub fn expected_preimage_measure(
    model: &MarginalModel,
    law: &MatrixLaw,
    set: &RiskSet,
    k: usize,
    i: usize,
    mc_cfg: &McConfig,
) -> Result<MeasureEstimate> {
    let atoms = law.enumerate_support()?;
    let measure = LimitMeasure::new(model, i)?;
    expected_over_atoms(&measure, &atoms, None, set, k, mc_cfg)
}

/// As [`expected_preimage_measure`] with precomputed atoms and (optionally) their `i_k` values.
pub(crate) fn expected_over_atoms(
    measure: &LimitMeasure,
    atoms: &[Atom],
    per_atom: Option<&[usize]>,
    set: &RiskSet,
    k: usize,
    mc_cfg: &McConfig,
) -> Result<MeasureEstimate> {
    if set.k != k {
        return Err(Error::validation(format!(
            "set lives at level k = {}, requested k = {k}",
            set.k
        )));
    }
    let parts: Vec<Option<MeasureEstimate>> = atoms
        .par_iter()
        .enumerate()
        .map(|(m, atom)| {
            if atom.prob.is_zero() {
                return Ok(None);
            }
            let ik = match per_atom {
                Some(v) => v[m],
                None => tau::critical_index(&atom.matrix, k)?.0,
            };
            if ik != measure.i {
                return Ok(None);
            }
            let cfg = McConfig {
                samples: mc_cfg.samples,
                seed: mc::derive_seed(mc_cfg.seed, m as u64),
            };
            let est = mu_preimage(measure, &atom.matrix, set, &cfg)?;
            let p = atom.prob.to_f64();
            Ok(Some(MeasureEstimate {
                mass: p * est.mass,
                stderr: p * est.stderr,
                method: est.method,
            }))
        })
        .collect::<Result<_>>()?;
    let mut out = MeasureEstimate::exact(0.0);
    let mut var = 0.0;
    for e in parts.into_iter().flatten() {
        out.mass += e.mass;
        var += e.stderr * e.stderr;
        out.method = out.method.combine(match e.method {
            Method::MonteCarlo { n, .. } => Method::MonteCarlo {
                n,
                seed: mc_cfg.seed,
            },
            m => m,
        });
    }
    out.stderr = var.sqrt();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risksets::{Halfspace, HalfspaceClause, RectClause};

    fn iid(kappa: &[f64]) -> MarginalModel {
        MarginalModel::iid(1.0, kappa.to_vec()).unwrap()
    }

    fn circulant() -> Matrix {
        Matrix::from_rows(&[
            vec![1.0, 1.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
        ])
        .unwrap()
    }

    fn chain() -> RiskSet {
        RiskSet::halfspace_union(
            3,
            3,
            vec![HalfspaceClause {
                constraints: vec![
                    Halfspace::new(vec![1.0, -1.0, 0.0], 0.0),
                    Halfspace::new(vec![0.0, 1.0, -1.0], 0.0),
                    Halfspace::new(vec![0.0, 0.0, 1.0], 1.0),
                ],
            }],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn rect_masses() {
        let mu = LimitMeasure::new(&iid(&[1.0, 1.0, 1.0]), 2).unwrap();
        assert!((mu.mu_rect(&[0, 1], &[1.0, 1.0]).unwrap().mass - 1.0 / 3.0).abs() < 1e-15);
        let mu1 = LimitMeasure::new(&iid(&[1.0, 2.0, 3.0]), 1).unwrap();
        assert!((mu1.mu_rect(&[1], &[1.0]).unwrap().mass - 1.0 / 3.0).abs() < 1e-15);
        let c = 1.7;
        let scaled = mu.mu_rect(&[0, 2], &[c, c]).unwrap().mass;
        assert!((scaled - c.powi(-2) / 3.0).abs() < 1e-15);
        assert!(mu.mu_rect(&[0], &[1.0]).is_err());
    }

    #[test]
    fn components_sum_to_one_at_unit_thresholds() {
        let m = iid(&[1.0, 0.5, 2.0, 3.0]);
        for i in 1..=4 {
            let mu = LimitMeasure::new(&m, i).unwrap();
            let s: f64 = mu
                .components
                .iter()
                .map(|c| c.rect_mass(&vec![1.0; i]))
                .sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        let dep = MarginalModel::dependent(1.3, vec![1.0, 2.0, 3.0], 1.0, 1.0).unwrap();
        let mu3 = LimitMeasure::new(&dep, 3).unwrap();
        assert!((mu3.mu_rect(&[0, 1, 2], &[1.0; 3]).unwrap().mass - 1.0).abs() < 1e-15);
        assert!((mu3.exponent - 5.2).abs() < 1e-12);
    }

    #[test]
    fn circulant_preimage_has_unit_mass() {
        let mu = LimitMeasure::new(&iid(&[1.0; 3]), 2).unwrap();
        let set = RiskSet::upper_orthant(&[1.0; 3]).unwrap();
        let e = mu_preimage(&mu, &circulant(), &set, &McConfig::default()).unwrap();
        assert_eq!(e.method, Method::Analytic);
        assert!((e.mass - 1.0).abs() < 1e-14);
        let mc = mu_set_mc(&mu, &circulant(), &set, 300_000, 3).unwrap();
        assert!((mc.mass - 1.0).abs() < 3.0 * mc.stderr + 1e-9, "{mc:?}");
    }

    #[test]
    fn ordered_chain_on_a16() {
        let a16 = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let mu = LimitMeasure::new(&iid(&[1.0, 1.0]), 2).unwrap();
        let e = mu_preimage(&mu, &a16, &chain(), &McConfig::default()).unwrap();
        assert_eq!(e.method, Method::Quadrature);
        assert!((e.mass - 0.5).abs() < 1e-12, "{e:?}");
        let mc = mu_set_mc(&mu, &a16, &chain(), 400_000, 9).unwrap();
        assert!((mc.mass - 0.5).abs() < 3.0 * mc.stderr, "{mc:?}");
    }

    #[test]
    fn infinite_tau_is_rejected() {
        let mu = LimitMeasure::new(&iid(&[1.0; 3]), 3).unwrap();
        let set = RiskSet::upper_orthant(&[1.0; 3]).unwrap();
        assert!(matches!(
            mu_preimage(&mu, &circulant(), &set, &McConfig::default()),
            Err(Error::InfiniteTau { .. })
        ));
    }

    #[test]
    fn weighted_one_hot_rectangle() {
        // x = (2 z1, z2, 3 z1): at least two rows above 1
        let a = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0], vec![3.0, 0.0]]).unwrap();
        let clauses = subsets::of_size(3, 2)
            .map(|m| RectClause::uniform(subsets::members(m).collect(), 1.0).unwrap())
            .collect();
        let set = RiskSet::rect_union(3, 2, clauses).unwrap();
        let m = MarginalModel::iid(2.0, vec![1.0, 3.0]).unwrap();
        let mu = LimitMeasure::new(&m, 1).unwrap();
        // only z1 alone can do it: z1 > 1/2, mass kappa_1/K_1 * (1/2)^-2
        let e = mu_preimage(&mu, &a, &set, &McConfig::default()).unwrap();
        assert!((e.mass - 0.25 * 4.0).abs() < 1e-14);
    }
}
