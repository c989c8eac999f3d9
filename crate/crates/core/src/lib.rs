//! Tail asymptotics of `P(AZ in tC)` for random non-negative matrices `A`
//! acting on heavy-tailed vectors `Z`.
//!
//! The crate computes the full power expansion
//!
//! ```text
//! P(AZ in tC) ~ sum_i P(Z^(i) > t) * E[mu_i(A^-1(C)); i_k(A) = i]
//! ```
//!
//! together with the combinatorial functionals it depends on, and checks the
//! results against brute-force enumeration and Monte Carlo simulation.
//!
//! * [`margins`]: laws of `Z` and their order-statistic tails.
//! * [`risksets`]: tail events `C`.
//! * [`tau`]: the functionals `tau^(k,i)(A)` and critical indices `i_k(A)`.
//! * [`matrixlaw`]: finitely supported matrix distributions and their partitions.
//! * [`measure`]: limit measures and pre-image masses.
//! * [`asymptotics`]: the expansion engine.
//! * [`simulate`]: empirical estimates and ratio tables.
//! * [`network`]: bipartite agent/object networks and canned scenarios.
//! * [`cli`]: the batch front end behind the `heavytail` binary.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod margins;
pub mod matrix;
pub mod matrixlaw;
pub mod mc;
pub mod measure;
pub mod network;
mod polyhedron;
pub mod prob;
mod quadrature;
pub mod risksets;
pub mod simulate;
pub mod subsets;
pub mod tau;

pub use asymptotics::{evaluate, expansion, leading_order, TailExpansion};
pub use error::{Error, Result};
pub use margins::{Dependence, MarginalModel, OrderStatTailLaw};
pub use matrix::Matrix;
pub use matrixlaw::{Exclusion, MatrixLaw, PartitionReport};
pub use measure::{LimitMeasure, MeasureEstimate, Method};
pub use prob::Prob;
pub use risksets::RiskSet;
pub use simulate::McEstimate;
pub use tau::TauValue;
