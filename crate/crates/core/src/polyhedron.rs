//! Emptiness of `{z >= 0 : g_l . z > h_l (or >= h_l)}` by Fourier-Motzkin elimination.

/// Above this many live constraints elimination gives up.
pub const MAX_CONSTRAINTS: usize = 4000;

const TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Ineq {
    pub g: Vec<f64>,
    pub h: f64,
    pub strict: bool,
}

impl Ineq {
    fn normalized(mut self) -> Self {
        let s = self.g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if s > 0.0 {
            for v in self.g.iter_mut() {
                *v /= s;
                if v.abs() < TOL {
                    *v = 0.0;
                }
            }
            self.h /= s;
        }
        self
    }

    fn is_constant(&self) -> bool {
        self.g.iter().all(|v| *v == 0.0)
    }

    /// For constant rows: does `0 > h` (or `0 >= h`) fail?
    fn violated(&self) -> bool {
        if self.strict {
            self.h >= -TOL
        } else {
            self.h > TOL
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Empty,
    NonEmpty,
    TooLarge,
}

/// Decides whether the system together with `z >= 0` has a solution.
pub fn feasibility(dim: usize, system: &[Ineq]) -> Feasibility {
    let mut rows: Vec<Ineq> = system.iter().cloned().map(Ineq::normalized).collect();
    for j in 0..dim {
        let mut g = vec![0.0; dim];
        g[j] = 1.0;
        rows.push(Ineq {
            g,
            h: 0.0,
            strict: false,
        });
    }
    for var in 0..dim {
        let mut next = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for r in rows {
            if r.is_constant() {
                if r.violated() {
                    return Feasibility::Empty;
                }
                continue;
            }
            match r.g[var] {
                v if v > 0.0 => pos.push(r),
                v if v < 0.0 => neg.push(r),
                _ => next.push(r),
            }
        }
        if next.len() + pos.len() * neg.len() > MAX_CONSTRAINTS {
            return Feasibility::TooLarge;
        }
        for p in &pos {
            for n in &neg {
                let (a, b) = (1.0 / p.g[var], -1.0 / n.g[var]);
                let mut g: Vec<f64> = p.g.iter().zip(&n.g).map(|(x, y)| a * x + b * y).collect();
                g[var] = 0.0;
                let c = Ineq {
                    g,
                    h: a * p.h + b * n.h,
                    strict: p.strict || n.strict,
                }
                .normalized();
                if c.is_constant() {
                    if c.violated() {
                        return Feasibility::Empty;
                    }
                    continue;
                }
                next.push(c);
            }
        }
        rows = dedup(next);
    }
    if rows.iter().any(|r| r.is_constant() && r.violated()) {
        Feasibility::Empty
    } else {
        Feasibility::NonEmpty
    }
}

/// Keeps the tightest row of every coefficient direction.
fn dedup(mut rows: Vec<Ineq>) -> Vec<Ineq> {
    rows.sort_by(|a, b| {
        a.g.iter()
            .zip(&b.g)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.h.total_cmp(&a.h))
            .then(b.strict.cmp(&a.strict))
    });
    let mut out: Vec<Ineq> = Vec::with_capacity(rows.len());
    for r in rows {
        if let Some(last) = out.last() {
            if last.g.iter().zip(&r.g).all(|(x, y)| (x - y).abs() <= TOL) {
                continue;
            }
        }
        out.push(r);
    }
    out
}
