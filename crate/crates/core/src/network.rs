//! Agent/object risk networks: one-hot investment laws, their closed-form
//! constants, the "at least k portfolios" sets and the canned scenarios.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num::{BigInt, BigRational, One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{self, leading_order};
use crate::error::{Error, Result};
use crate::margins::MarginalModel;
use crate::matrix::Matrix;
use crate::matrixlaw::{partition_of_atoms, Atom, Exclusion, MatrixLaw};
use crate::measure::McConfig;
use crate::prob::Prob;
use crate::risksets::{Halfspace, HalfspaceClause, RectClause, RiskSet};
use crate::simulate::cell;
use crate::subsets;

/// Names accepted by [`scenario`].
pub const SCENARIOS: [&str; 6] = [
    "example-3-8",
    "taylor27",
    "det-independent",
    "det-dependent",
    "prop41",
    "prop42",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetworkModel {
    pub q: usize,
    pub d: usize,
    pub law: MatrixLaw,
    pub margins: MarginalModel,
}

impl NetworkModel {
    pub fn new(law: MatrixLaw, margins: MarginalModel) -> Result<Self> {
        margins.validate()?;
        law.validate().into_result()?;
        let (q, d) = law.shape();
        if q == 0 || d == 0 {
            return Err(Error::validation(
                "network needs at least one agent and one object",
            ));
        }
        if d != margins.dim() {
            return Err(Error::DimensionMismatch {
                expected: margins.dim(),
                got: d,
            });
        }
        Ok(NetworkModel { q, d, law, margins })
    }
}

/// One-hot law where each agent picks one object uniformly among the allowed ones.
pub fn build_onehot_law(q: usize, d: usize, rule: Exclusion) -> Result<MatrixLaw> {
    if rule == Exclusion::None {
        return Err(Error::validation("rule must be own_index or window"));
    }
    let law = MatrixLaw::OneHotUniform {
        q,
        d,
        exclusion: rule,
        weights: None,
    };
    law.validate().into_result()?;
    Ok(law)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow(base: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num::pow(base.clone(), e as usize)
    } else {
        num::pow(base.recip(), (-e) as usize)
    }
}

/// Probability that a one-hot own-index matrix uses exactly a given set of `i` columns.
pub fn delta_coeff(q: usize, d: usize, i: usize) -> Result<BigRational> {
    if !(2 <= i && i <= d && d <= q) {
        return Err(Error::validation(format!(
            "need 2 <= i <= d <= q (q={q}, d={d}, i={i})"
        )));
    }
    let (q, d, i) = (q as i64, d as i64, i as i64);
    let first = pow(&rat(i - 1, d - 1), i) * pow(&rat(i, d - 1), d - i) * pow(&rat(i, d), q - d);
    let second = BigRational::from_integer(i.into())
        * pow(&rat(i - 2, d - 1), i - 1)
        * pow(&rat(i - 1, d - 1), d + 1 - i)
        * pow(&rat(i - 1, d), q - d);
    Ok(first - second)
}

/// Cumulative column-usage constant of the window law.
pub fn q_coeff(d: usize, m: usize, i: usize) -> Result<BigRational> {
    if !(m >= 1 && m < i && i <= d) {
        return Err(Error::validation(format!(
            "need m+1 <= i <= d (d={d}, m={m}, i={i})"
        )));
    }
    let (d, m, i) = (d as i64, m as i64, i as i64);
    let int = |v: i64| BigRational::from_integer(v.into());
    let mut num = pow(&int(i), d - (i + m - 1)) * pow(&int(i - m), i - m + 1);
    for l in 1..m {
        num *= pow(&int(i - l), 2);
    }
    Ok(num / pow(&int(d - m), d))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormConstants {
    /// `i -> Delta_i` for the own-index law.
    pub delta: BTreeMap<usize, Prob>,
    pub m: usize,
    /// `i -> q_i^(m)` for the window law.
    pub qim: BTreeMap<usize, Prob>,
}

pub fn closed_form_constants(q: usize, d: usize, m: usize) -> Result<ClosedFormConstants> {
    let delta = (2..=d)
        .map(|i| Ok((i, Prob::Exact(delta_coeff(q, d, i)?))))
        .collect::<Result<_>>()?;
    let qim = (m + 1..=d)
        .map(|i| Ok((i, Prob::Exact(q_coeff(d, m, i)?))))
        .collect::<Result<_>>()?;
    Ok(ClosedFormConstants { delta, m, qim })
}

/// `{x : x^(k) > threshold}` as the union of all `k`-subsets of upper rectangles.
pub fn dk_set(q: usize, k: usize, threshold: f64) -> Result<RiskSet> {
    if k == 0 || k > q {
        return Err(Error::IndexOutOfRange { index: k, max: q });
    }
    let clauses = subsets::of_size(q, k)
        .map(|mask| RectClause::uniform(subsets::members(mask).collect(), threshold))
        .collect::<Result<_>>()?;
    RiskSet::rect_union(q, k, clauses)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Expected {
    pub exponent: f64,
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedSet {
    pub label: String,
    pub set: RiskSet,
    pub expected: Option<Expected>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub network: NetworkModel,
    pub sets: Vec<NamedSet>,
}

/// The 27 matrices with rows in `{0,1}^2 \ {0}`, three agents, two objects.
pub fn taylor27_matrices() -> Vec<Matrix> {
    const ROWS: [[&str; 3]; 27] = [
        ["11", "11", "11"],
        ["10", "10", "10"],
        ["01", "01", "01"],
        ["11", "10", "10"],
        ["10", "11", "10"],
        ["10", "10", "11"],
        ["11", "01", "01"],
        ["01", "11", "01"],
        ["01", "01", "11"],
        ["11", "11", "10"],
        ["10", "11", "11"],
        ["11", "10", "11"],
        ["11", "11", "01"],
        ["01", "11", "11"],
        ["11", "01", "11"],
        ["11", "10", "01"],
        ["10", "11", "01"],
        ["10", "01", "11"],
        ["11", "01", "10"],
        ["01", "11", "10"],
        ["01", "10", "11"],
        ["10", "10", "01"],
        ["01", "10", "10"],
        ["10", "01", "10"],
        ["01", "01", "10"],
        ["10", "01", "01"],
        ["01", "10", "01"],
    ];
    ROWS.iter()
        .map(|m| {
            let rows: Vec<Vec<f64>> = m
                .iter()
                .map(|r| r.bytes().map(|b| f64::from(b - b'0')).collect())
                .collect();
            Matrix::from_rows(&rows).expect("fixed shape")
        })
        .collect()
}

/// Law on the 27 matrices with the given probabilities `q_1..q_27`.
pub fn taylor27_law(weights: &[Prob]) -> Result<MatrixLaw> {
    if weights.len() != 27 {
        return Err(Error::DimensionMismatch {
            expected: 27,
            got: weights.len(),
        });
    }
    let law = MatrixLaw::Explicit {
        atoms: taylor27_matrices()
            .into_iter()
            .zip(weights)
            .map(|(matrix, prob)| Atom {
                matrix,
                prob: prob.clone(),
            })
            .collect(),
    };
    law.validate().into_result()?;
    Ok(law)
}

/// `{x_1 > x_2 > x_3 > 1}`.
pub fn ordered_chain_set() -> Result<RiskSet> {
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
}

/// The five-agent, three-object weighted matrix.
pub fn det_matrix() -> Matrix {
    Matrix::from_rows(&[
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![2.0, 2.0, 0.0],
        vec![0.0, 3.0, 3.0],
    ])
    .expect("fixed shape")
}

fn expected(exponent: f64, constant: f64) -> Option<Expected> {
    Some(Expected { exponent, constant })
}

fn named(label: &str, set: RiskSet, exp: Option<Expected>) -> NamedSet {
    NamedSet {
        label: label.to_string(),
        set,
        expected: exp,
    }
}

fn det_scenario(name: &str, margins: MarginalModel) -> Result<Scenario> {
    let dependent = !margins.is_iid();
    // Published constants at alpha = 1, kappa = (1, 2, 3).
    let published = [(1.0, 17.0), (1.0, 6.0), (1.0, 2.0), (2.0, 11.0)];
    let mut sets = Vec::new();
    for (k, (e, c)) in (1..=4).zip(published) {
        sets.push(named(&format!("D{k}"), dk_set(5, k, 1.0)?, expected(e, c)));
    }
    let d5 = if dependent {
        expected(4.0, 36.0)
    } else {
        expected(3.0, 6.0)
    };
    sets.push(named("D5", dk_set(5, 5, 1.0)?, d5));
    Ok(Scenario {
        name: name.to_string(),
        network: NetworkModel::new(MatrixLaw::point_mass(det_matrix()), margins)?,
        sets,
    })
}

/// Every canned configuration, with the leading constants it is expected to reproduce.
pub fn scenario(name: &str) -> Result<Scenario> {
    let kappa3 = vec![1.0, 2.0, 3.0];
    match name {
        "example-3-8" => {
            let law = MatrixLaw::point_mass(Matrix::from_rows(&[
                vec![1.0, 1.0, 0.0],
                vec![0.0, 1.0, 1.0],
                vec![1.0, 0.0, 1.0],
            ])?);
            Ok(Scenario {
                name: name.to_string(),
                network: NetworkModel::new(law, MarginalModel::iid(1.0, vec![1.0; 3])?)?,
                sets: vec![named(
                    "C",
                    RiskSet::upper_orthant(&[1.0; 3])?,
                    expected(2.0, 3.0),
                )],
            })
        }
        "taylor27" => {
            let (k1, k2) = (1.0, 2.0);
            let law = taylor27_law(&vec![Prob::ratio(1, 27); 27])?;
            // (q1 + Q1) k1 + (q1 + Q2) k2 and k1 k2 (q16 + q19) / 2 with q_m = 1/27.
            let c1 = 8.0 / 27.0 * k1 + 8.0 / 27.0 * k2;
            let c2 = 0.5 * k1 * k2 * 2.0 / 27.0;
            Ok(Scenario {
                name: name.to_string(),
                network: NetworkModel::new(law, MarginalModel::iid(1.0, vec![k1, k2])?)?,
                sets: vec![
                    named("C1", RiskSet::upper_orthant(&[1.0; 3])?, expected(1.0, c1)),
                    named("C2", ordered_chain_set()?, expected(2.0, c2)),
                ],
            })
        }
        "det-independent" => det_scenario(name, MarginalModel::iid(1.0, kappa3)?),
        "det-dependent" => det_scenario(name, MarginalModel::dependent(1.0, kappa3, 1.0, 1.0)?),
        "prop41" => {
            let (q, d) = (4, 3);
            let law = build_onehot_law(q, d, Exclusion::OwnIndex)?;
            let c = delta_coeff(q, d, 2)?;
            let c = rat_to_f64(&c) * subsets::binomial(d, 2) as f64;
            Ok(Scenario {
                name: name.to_string(),
                network: NetworkModel::new(law, MarginalModel::iid(1.0, vec![1.0; d])?)?,
                sets: vec![named(
                    "X",
                    RiskSet::upper_orthant(&vec![1.0; q])?,
                    expected(2.0, c),
                )],
            })
        }
        "prop42" => {
            let (d, m) = (4, 1);
            let law = build_onehot_law(d, d, Exclusion::Window(m))?;
            let c = rat_to_f64(&q_coeff(d, m, m + 1)?) * subsets::binomial(d, m + 1) as f64;
            Ok(Scenario {
                name: name.to_string(),
                network: NetworkModel::new(law, MarginalModel::iid(1.0, vec![1.0; d])?)?,
                sets: vec![named(
                    "X",
                    RiskSet::upper_orthant(&vec![1.0; d])?,
                    expected((m + 1) as f64, c),
                )],
            })
        }
        other => Err(Error::config(
            "scenario",
            format!(
                "unknown scenario `{other}` (known: {})",
                SCENARIOS.join(", ")
            ),
        )),
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    Prob::Exact(r.clone()).to_f64()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeadingResult {
    pub label: String,
    pub exponent: f64,
    pub constant: f64,
    pub expected: Option<Expected>,
    /// Whether the computed pair equals the expected one to 1e-12 relative.
    pub agrees: Option<bool>,
}

/// Runs the expansion engine on every set of a scenario.
pub fn leading_constants(sc: &Scenario, mc_cfg: &McConfig) -> Result<Vec<LeadingResult>> {
    sc.sets
        .par_iter()
        .map(|ns| {
            let exp = asymptotics::expansion(
                &sc.network.margins,
                &sc.network.law,
                &ns.set,
                ns.set.k,
                mc_cfg,
            )?;
            let (exponent, constant) = leading_order(&exp)?;
            let agrees = ns.expected.map(|e| {
                (e.exponent - exponent).abs() < 1e-12
                    && (e.constant - constant).abs() <= 1e-12 * e.constant.abs().max(1.0)
            });
            Ok(LeadingResult {
                label: ns.label.clone(),
                exponent,
                constant,
                expected: ns.expected,
                agrees,
            })
        })
        .collect()
}

/// Grid of the figure data: `t = 20, 25, .., 100`.
pub fn figure3_grid() -> Vec<f64> {
    (0..=16).map(|j| 20.0 + 5.0 * j as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Figure3Row {
    pub t: f64,
    pub set: String,
    pub independent: f64,
    pub dependent: f64,
}

/// Leading-order values for `D_1..D_5` under both margin models.
pub fn figure3_data(alpha: f64) -> Result<Vec<Figure3Row>> {
    if alpha != 1.0 && alpha != 2.0 {
        return Err(Error::validation(format!(
            "alpha must be 1 or 2, got {alpha}"
        )));
    }
    let kappa = vec![1.0, 2.0, 3.0];
    let models = [
        MarginalModel::iid(alpha, kappa.clone())?,
        MarginalModel::dependent(alpha, kappa, 1.0, 1.0)?,
    ];
    let law = MatrixLaw::point_mass(det_matrix());
    let cfg = McConfig::default();
    let mut leading = Vec::new();
    for k in 1..=5 {
        let set = dk_set(5, k, 1.0)?;
        let pair = models
            .iter()
            .map(|m| leading_order(&asymptotics::expansion(m, &law, &set, k, &cfg)?))
            .collect::<Result<Vec<_>>>()?;
        leading.push((format!("D{k}"), pair[0], pair[1]));
    }
    let mut rows = Vec::new();
    for t in figure3_grid() {
        for (label, (ei, ci), (ed, cd)) in &leading {
            rows.push(Figure3Row {
                t,
                set: label.clone(),
                independent: ci * t.powf(-ei),
                dependent: cd * t.powf(-ed),
            });
        }
    }
    Ok(rows)
}

pub fn figure3_csv(rows: &[Figure3Row]) -> String {
    let mut out = String::from("t,set,independent,dependent\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            cell(r.t),
            r.set,
            cell(r.independent),
            cell(r.dependent)
        );
    }
    out
}

fn used_mask(a: &Matrix) -> u64 {
    (0..a.rows()).fold(0, |m, r| m | a.row_support(r))
}

/// Exact mass of each used-column set.
fn used_masses(atoms: &[Atom]) -> HashMap<u64, Prob> {
    let mut out: HashMap<u64, Prob> = HashMap::new();
    for a in atoms {
        let e = out.entry(used_mask(&a.matrix)).or_insert_with(Prob::zero);
        *e = e.clone() + a.prob.clone();
    }
    out
}

fn mass_of(masses: &HashMap<u64, Prob>, pred: impl Fn(u64) -> bool) -> Prob {
    masses
        .iter()
        .filter(|(m, _)| pred(**m))
        .fold(Prob::zero(), |acc, (_, p)| acc + p.clone())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetRow {
    /// 1-based columns.
    pub columns: Vec<usize>,
    pub enumerated: Prob,
    pub formula: Prob,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantCheck {
    pub i: usize,
    /// What the formula is compared with.
    pub quantity: String,
    pub rows: Vec<SubsetRow>,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub law: String,
    pub atoms: usize,
    pub checks: Vec<ConstantCheck>,
    pub notes: Vec<String>,
}

impl DiscrepancyReport {
    /// Checks named `exactly` (the partition masses) all agree.
    pub fn partition_matches(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.quantity.starts_with("P(used = S)"))
            .all(|c| c.matches)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} ({} atoms)\n", self.law, self.atoms);
        for c in &self.checks {
            let _ = writeln!(
                out,
                "  i={} {}: {}",
                c.i,
                c.quantity,
                if c.matches { "match" } else { "MISMATCH" }
            );
            for r in c.rows.iter().filter(|r| !r.matches) {
                let _ = writeln!(
                    out,
                    "    S={:?} enumerated {} formula {}",
                    r.columns, r.enumerated, r.formula
                );
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}

fn subset_rows(
    d: usize,
    i: usize,
    formula: &Prob,
    enumerated: impl Fn(u64) -> Prob,
) -> ConstantCheck {
    let rows: Vec<SubsetRow> = subsets::of_size(d, i)
        .map(|s| {
            let e = enumerated(s);
            SubsetRow {
                columns: subsets::members(s).map(|j| j + 1).collect(),
                matches: e == *formula,
                enumerated: e,
                formula: formula.clone(),
            }
        })
        .collect();
    ConstantCheck {
        i,
        quantity: String::new(),
        matches: rows.iter().all(|r| r.matches),
        rows,
    }
}

/// Own-index law: `Delta_i` against enumerated masses, and the two published forms of `Delta_2`.
pub fn prop41_report(q: usize, d: usize) -> Result<DiscrepancyReport> {
    let law = build_onehot_law(q, d, Exclusion::OwnIndex)?;
    let atoms = law.enumerate_support()?;
    let masses = used_masses(&atoms);
    let partition = partition_of_atoms(&atoms, q)?;
    let mut checks = Vec::new();
    for i in 2..=d {
        let delta = Prob::Exact(delta_coeff(q, d, i)?);
        let mut c = subset_rows(d, i, &delta, |s| mass_of(&masses, |m| m == s));
        c.quantity = "P(used = S) vs Delta_i".into();
        checks.push(c);
        let total = delta * Prob::Exact(BigRational::from_integer(subsets::binomial(d, i).into()));
        let got = partition.mass(i).clone();
        let matches = got == total;
        checks.push(ConstantCheck {
            i,
            quantity: "P(i_q(A) = i) vs C(d,i) Delta_i".into(),
            matches,
            rows: vec![SubsetRow {
                columns: (1..=d).collect(),
                enumerated: got,
                formula: total,
                matches,
            }],
        });
    }
    let two = BigRational::from_integer(2.into());
    let head = pow(&two, q as i64 - 2) / pow(&rat(d as i64, 1), (q - d) as i64);
    let stated = Prob::Exact(head.clone() / pow(&rat(d as i64 - 1, 1), d as i64));
    let proof = Prob::Exact(head / pow(&rat(d as i64 - 1, 1), q as i64));
    let observed = mass_of(&masses, |m| m == 0b11);
    let verdict = |p: &Prob| {
        if *p == observed {
            "matches"
        } else {
            "does not match"
        }
    };
    let notes = vec![
        format!(
            "2^(q-2)/((d-1)^d d^(q-d)) = {stated} {} enumeration ({observed})",
            verdict(&stated)
        ),
        format!(
            "2^(q-2)/((d-1)^q d^(q-d)) = {proof} {} enumeration ({observed})",
            verdict(&proof)
        ),
    ];
    Ok(DiscrepancyReport {
        law: format!("own-index one-hot law, q={q}, d={d}"),
        atoms: atoms.len(),
        checks,
        notes,
    })
}

/// Window law: `q_i - q_(i-1)` against enumerated exact-usage masses, and `q_i`
/// against enumerated `P(used within S)`.
pub fn prop42_report(d: usize, m: usize) -> Result<DiscrepancyReport> {
    let law = build_onehot_law(d, d, Exclusion::Window(m))?;
    let atoms = law.enumerate_support()?;
    let masses = used_masses(&atoms);
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for i in m + 1..=d {
        let qi = q_coeff(d, m, i)?;
        let prev = if i > m + 1 {
            q_coeff(d, m, i - 1)?
        } else {
            BigRational::zero()
        };
        let diff = Prob::Exact(qi.clone() - prev);
        let mut c = subset_rows(d, i, &diff, |s| mass_of(&masses, |u| u == s));
        c.quantity = "P(used = S) vs q_i - q_(i-1)".into();
        checks.push(c);
        let mut c = subset_rows(d, i, &Prob::Exact(qi.clone()), |s| {
            mass_of(&masses, |u| u & !s == 0)
        });
        c.quantity = "P(used within S) vs q_i".into();
        checks.push(c);
        if qi > BigRational::one() {
            notes.push(format!("q_{i} = {} exceeds 1", Prob::Exact(qi)));
        }
    }
    Ok(DiscrepancyReport {
        law: format!("window one-hot law, d={d}, m={m}"),
        atoms: atoms.len(),
        checks,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_values() {
        assert_eq!(delta_coeff(5, 3, 2).unwrap(), rat(1, 9));
        assert_eq!(delta_coeff(4, 3, 2).unwrap(), rat(1, 6));
        assert_eq!(delta_coeff(4, 3, 3).unwrap(), rat(1, 2));
        assert!(delta_coeff(3, 4, 2).is_err());
        assert!(delta_coeff(4, 3, 1).is_err());
    }

    #[test]
    fn q_values() {
        assert_eq!(q_coeff(4, 1, 2).unwrap(), rat(4, 81));
        // empty product for m = 1
        assert_eq!(q_coeff(4, 1, 4).unwrap(), rat(81, 81));
        assert!(q_coeff(4, 2, 2).is_err());
    }

    #[test]
    fn dk_sets() {
        let s = dk_set(5, 5, 1.0).unwrap();
        assert_eq!(s.linear_clauses().len(), 1);
        assert_eq!(dk_set(3, 2, 1.0).unwrap().linear_clauses().len(), 3);
        let d1 = dk_set(5, 1, 1.0).unwrap();
        assert_eq!(d1.linear_clauses().len(), 5);
        assert!(d1.contains(&[0.0, 0.0, 0.0, 0.0, 1.5]).unwrap());
        assert!(!d1.contains(&[1.0; 5]).unwrap());
        assert!(dk_set(3, 4, 1.0).is_err());
    }

    #[test]
    fn onehot_sizes() {
        let law = build_onehot_law(4, 3, Exclusion::OwnIndex).unwrap();
        assert_eq!(law.support_size(), 24);
        assert_eq!(
            build_onehot_law(4, 4, Exclusion::Window(1))
                .unwrap()
                .support_size(),
            81
        );
        assert_eq!(
            build_onehot_law(3, 3, Exclusion::Window(2))
                .unwrap()
                .support_size(),
            1
        );
        assert!(build_onehot_law(2, 3, Exclusion::OwnIndex).is_err());
        assert!(build_onehot_law(3, 3, Exclusion::Window(3)).is_err());
    }

    #[test]
    fn unknown_scenario_names_field() {
        let e = scenario("nope").unwrap_err();
        assert!(e.to_string().contains("scenario"));
        for name in SCENARIOS {
            scenario(name).unwrap();
        }
    }

    #[test]
    fn stated_delta2_form_wins() {
        let r = prop41_report(5, 3).unwrap();
        assert!(r.partition_matches());
        assert!(r.notes[0].contains(" matches"));
        assert!(r.notes[1].contains("does not match"));
    }

    #[test]
    fn figure3_ratio() {
        let rows = figure3_data(1.0).unwrap();
        assert_eq!(rows.len(), 17 * 5);
        let d5 = rows.iter().find(|r| r.set == "D5" && r.t == 20.0).unwrap();
        assert!((d5.independent - 7.5e-4).abs() < 1e-15);
        assert!((d5.dependent - 2.25e-4).abs() < 1e-15);
        let csv = figure3_csv(&rows);
        assert!(csv.starts_with("t,set,independent,dependent\n20,D1,"));
    }
}
