//! Tail models for the risk vector `Z`.
//!
//! Two families are supported:
//!
//! * independent Pareto margins, `P(Z_i > z) = kappa_i z^-alpha` above `kappa_i^(1/alpha)`;
//! * the three-variate dependent family with joint distribution function
//!
//! ```text
//! F(z) = (1 + theta * prod_i u_i^rho) * prod_i (1 - u_i),    u_i = kappa_i z_i^-alpha,
//! ```
//!
//! whose bivariate margins are independent while all three components are
//! jointly dependent (`theta = 0` gives back independence).
//!
//! Order-statistic tails `P(Z^(i) > t) ~ K_i t^-e_i` drive the decay orders of
//! every expansion built on top of these models.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};
use crate::mc;
use crate::subsets;

/// Largest dimension for which `K_i` is computed by subset summation.
pub const MAX_SUBSET_DIM: usize = 25;

/// Tolerance of the conditional-inversion root finder.
pub const ROOT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Dependence {
    Iid,
    Dependent { rho: f64, theta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalModel {
    pub alpha: f64,
    pub kappa: Vec<f64>,
    pub dependence: Dependence,
}

/// Leading behaviour of `P(Z^(i) > t) ~ constant * t^-exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderStatTailLaw {
    pub i: usize,
    pub exponent: f64,
    pub constant: f64,
}

impl MarginalModel {
    pub fn iid(alpha: f64, kappa: Vec<f64>) -> Result<Self> {
        let m = MarginalModel {
            alpha,
            kappa,
            dependence: Dependence::Iid,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn dependent(alpha: f64, kappa: Vec<f64>, rho: f64, theta: f64) -> Result<Self> {
        let m = MarginalModel {
            alpha,
            kappa,
            dependence: Dependence::Dependent { rho, theta },
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::validation(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if self.kappa.is_empty() {
            return Err(Error::validation("kappa must be non-empty"));
        }
        if self.kappa.len() >= 64 {
            return Err(Error::Capacity(format!(
                "dimension {} too large",
                self.kappa.len()
            )));
        }
        if let Some(k) = self.kappa.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(Error::validation(format!(
                "kappa entries must be positive, got {k}"
            )));
        }
        if let Dependence::Dependent { rho, theta } = self.dependence {
            if self.kappa.len() != 3 {
                return Err(Error::validation("dependent model requires d = 3"));
            }
            if !(rho >= 1.0 && rho.is_finite()) {
                return Err(Error::validation(format!("rho must be >= 1, got {rho}")));
            }
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::validation(format!(
                    "theta must lie in [0,1], got {theta}"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_iid(&self) -> bool {
        matches!(self.dependence, Dependence::Iid)
    }

    /// Lower end of the support of margin `i` (0-based).
    #[cfg(test)]
    fn threshold(&self, i: usize) -> f64 {
        self.kappa[i].powf(1.0 / self.alpha)
    }

    /// Exact `P(Z_i > z)` (1-based `i`); identical for both families.
    pub fn marginal_survival(&self, i: usize, z: f64) -> Result<f64> {
        check_index(i, self.dim())?;
        if !(z > 0.0) {
            return Err(Error::validation(format!("z must be positive, got {z}")));
        }
        Ok((self.kappa[i - 1] * z.powf(-self.alpha)).min(1.0))
    }

    fn dependent_asymptotics_supported(&self) -> Result<()> {
        match self.dependence {
            Dependence::Iid => Ok(()),
            Dependence::Dependent { rho, theta } if rho == 1.0 && theta == 1.0 => Ok(()),
            Dependence::Dependent { rho, theta } => Err(Error::Unsupported(format!(
                "order-statistic asymptotics are only available for rho = theta = 1 (got rho={rho}, theta={theta})"
            ))),
        }
    }

    /// Tail law of the `i`-th largest component.
    pub fn order_stat_tail(&self, i: usize) -> Result<OrderStatTailLaw> {
        check_index(i, self.dim())?;
        self.dependent_asymptotics_supported()?;
        let a = self.alpha;
        if !self.is_iid() && i == 3 {
            let s: f64 = self.kappa.iter().sum();
            let p: f64 = self.kappa.iter().product();
            return Ok(OrderStatTailLaw {
                i,
                exponent: 4.0 * a,
                constant: p * s,
            });
        }
        Ok(OrderStatTailLaw {
            i,
            exponent: i as f64 * a,
            constant: elementary_symmetric(&self.kappa, i)?,
        })
    }

    /// Canonical scaling `b_i(t) = (K_i t)^(1/e_i)`, so that `t P(Z^(i) > b_i(t)) -> 1`.
    pub fn canonical_scaling(&self, i: usize, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::validation(format!("t must be positive, got {t}")));
        }
        let law = self.order_stat_tail(i)?;
        Ok((law.constant * t).powf(1.0 / law.exponent))
    }

    /// Exact `P(Z_1 > t, .., Z_d > t)`.
    ///
    /// Below a margin's support `P(Z_j > t) = 1`, so its survival coordinate is clamped at 1.
    pub fn exact_joint_tail(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::validation(format!(
                "t must be positive and finite, got {t}"
            )));
        }
        let u: Vec<f64> = self
            .kappa
            .iter()
            .map(|k| (k * t.powf(-self.alpha)).min(1.0))
            .collect();
        let prod: f64 = u.iter().product();
        Ok(match self.dependence {
            Dependence::Iid => prod,
            Dependence::Dependent { rho, theta } => {
                let mixed: f64 = u.iter().map(|x| 1.0 - x).product();
                prod - theta * prod.powf(rho) * mixed
            }
        })
    }

    /// One draw from the joint law, written into `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim());
        let inv = 1.0 / self.alpha;
        match self.dependence {
            Dependence::Iid => {
                for (o, k) in out.iter_mut().zip(&self.kappa) {
                    *o = (k / open_unit(rng)).powf(inv);
                }
            }
            Dependence::Dependent { rho, theta } => {
                // u_i = kappa_i Z_i^-alpha are copula survival coordinates;
                // u_1, u_2 are independent uniforms and u_3 is found by inversion.
                let s1 = open_unit(rng);
                let s2 = open_unit(rng);
                let w = open_unit(rng);
                let c = theta * copula_slope(s1, rho) * copula_slope(s2, rho);
                let s3 = invert_conditional(w, c, rho);
                out[0] = (self.kappa[0] / s1).powf(inv);
                out[1] = (self.kappa[1] / s2).powf(inv);
                out[2] = (self.kappa[2] / s3).powf(inv);
            }
        }
    }

    /// `n` draws using the chunked seeding scheme of [`crate::mc`].
    pub fn sample(&self, seed: u64, n: usize) -> Result<Vec<Vec<f64>>> {
        self.validate()?;
        if n == 0 {
            return Err(Error::validation("n must be at least 1"));
        }
        let d = self.dim();
        let chunks = mc::map_chunks(n as u64, seed, |rng: &mut ChaCha8Rng, len| {
            (0..len)
                .map(|_| {
                    let mut z = vec![0.0; d];
                    self.sample_into(rng, &mut z);
                    z
                })
                .collect::<Vec<_>>()
        });
        Ok(chunks.into_iter().flatten().collect())
    }
}

/// Uniform on (0, 1].
#[inline]
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// `d/dv [v (1-v)^rho]` at `v = 1 - s`.
#[inline]
fn copula_slope(s: f64, rho: f64) -> f64 {
    if rho == 1.0 {
        2.0 * s - 1.0
    } else {
        s.powf(rho) - rho * (1.0 - s) * s.powf(rho - 1.0)
    }
}

/// Solves `s - c s^rho (1 - s) = w` for `s` in (0, 1] by bisection.
///
/// The left side is the conditional distribution function of `u_3` given
/// `(u_1, u_2)`; it is continuous and increasing on [0, 1].
fn invert_conditional(w: f64, c: f64, rho: f64) -> f64 {
    if c == 0.0 {
        return w;
    }
    if rho == 1.0 {
        // quadratic c s^2 + (1 - c) s - w = 0, root in its cancellation-free form
        let b = 1.0 - c;
        return 2.0 * w / (b + (b * b + 4.0 * c * w).sqrt());
    }
    let g = |s: f64| s - c * s.powf(rho) * (1.0 - s);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < w {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= ROOT_TOLERANCE * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `e_i(x) = sum over i-subsets of the product of their entries`, with
/// Neumaier-compensated accumulation.
pub fn elementary_symmetric(x: &[f64], i: usize) -> Result<f64> {
    if x.len() > MAX_SUBSET_DIM {
        return Err(Error::Capacity(format!(
            "subset summation limited to d <= {MAX_SUBSET_DIM}, got {}",
            x.len()
        )));
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for mask in subsets::of_size(x.len(), i) {
        let term: f64 = subsets::members(mask).map(|j| x[j]).product();
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}
