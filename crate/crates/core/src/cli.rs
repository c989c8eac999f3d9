//! Batch front end: JSON scenario configs in, CSV and reports out.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::asymptotics::{self, leading_order};
use crate::error::{Error, Result};
use crate::margins::MarginalModel;
use crate::matrix::Matrix;
use crate::matrixlaw::{MatrixLaw, PartitionMethod};
use crate::measure::McConfig;
use crate::network::{self, Scenario as Canned};
use crate::risksets::RiskSet;
use crate::simulate::{self, cell};
use crate::tau;

/// Exit code for a failed verification.
pub const EXIT_FAIL: i32 = 3;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "HEAVYTAIL_THREADS";

/// Samples used by `verify` unless overridden.
pub const VERIFY_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "heavytail",
    version,
    about = "Tail asymptotics of AZ for random matrices A"
)]
struct Cli {
    /// Worker threads (default: $HEAVYTAIL_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config sample count.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Output file (directory for `network --figure3`); stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// tau^(k,i) for every (k, i) and every atom of the law.
    Tau { config: PathBuf },
    /// P(i_k(A) = i) for i = 1..d.
    Partition {
        config: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Expansion terms as CSV.
    Expand {
        config: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Empirical probabilities against the expansion along t_grid.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Runs a canned scenario end to end and prints PASS/FAIL lines.
    Verify { name: String },
    /// Leading constants of a canned network scenario.
    Network {
        name: String,
        /// Write fig3_alpha1.csv and fig3_alpha2.csv.
        #[arg(long)]
        figure3: bool,
    },
}

/// Scenario config as read from JSON.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub margins: Option<MarginalModel>,
    #[serde(default)]
    pub matrix_law: Option<MatrixLaw>,
    /// Shorthand for a point-mass law.
    #[serde(default)]
    pub matrix: Option<Matrix>,
    #[serde(default)]
    pub risk_set: Option<RiskSet>,
    #[serde(default)]
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(
                if path == "." {
                    "<root>".to_string()
                } else {
                    path
                },
                e.into_inner().to_string(),
            )
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        if self.matrix.is_some() && self.matrix_law.is_some() {
            return Err(Error::config(
                "matrix",
                "give either `matrix` or `matrix_law`, not both",
            ));
        }
        let law = self.law().ok();
        if let Some(law) = &law {
            let report = law.validate();
            if !report.is_ok() {
                return Err(Error::config("matrix_law", report.failures.join("; ")));
            }
        }
        if let Some(m) = &self.margins {
            m.validate()
                .map_err(|e| Error::config("margins", e.to_string()))?;
            if let Some(law) = &law {
                let d = law.shape().1;
                if d != m.dim() {
                    return Err(Error::config(
                        "margins.kappa",
                        format!("law has {d} columns but kappa has {} entries", m.dim()),
                    ));
                }
            }
        }
        if let Some(s) = &self.risk_set {
            s.validate()
                .map_err(|e| Error::config("risk_set", e.to_string()))?;
            if let Some(law) = &law {
                let q = law.shape().0;
                if q != s.dim {
                    return Err(Error::config(
                        "risk_set.dim",
                        format!("law has {q} rows but the set lives in dimension {}", s.dim),
                    ));
                }
            }
        }
        if let Some(t) = self.t_grid.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::config(
                "t_grid",
                format!("entries must be positive and finite, got {t}"),
            ));
        }
        Ok(())
    }

    pub fn law(&self) -> Result<MatrixLaw> {
        match (&self.matrix_law, &self.matrix) {
            (Some(l), _) => Ok(l.clone()),
            (None, Some(m)) => Ok(MatrixLaw::point_mass(m.clone())),
            _ => Err(Error::config("matrix_law", "missing field")),
        }
    }

    fn margins(&self) -> Result<&MarginalModel> {
        self.margins
            .as_ref()
            .ok_or_else(|| Error::config("margins", "missing field"))
    }

    fn risk_set(&self, k: usize) -> Result<RiskSet> {
        let s = self
            .risk_set
            .as_ref()
            .ok_or_else(|| Error::config("risk_set", "missing field"))?;
        if s.k != k {
            return Err(Error::config(
                "risk_set.k",
                format!("set has level {} but --k is {k}", s.k),
            ));
        }
        Ok(s.clone())
    }
}

struct Overrides {
    seed: Option<u64>,
    samples: Option<u64>,
}

impl Overrides {
    fn seed(&self, sc: &Scenario) -> Result<u64> {
        self.seed
            .or(sc.seed)
            .ok_or_else(|| Error::config("seed", "required for sampling paths (config or --seed)"))
    }

    fn samples(&self, sc: Option<&Scenario>, default: u64) -> u64 {
        self.samples
            .or(sc.and_then(|s| s.samples))
            .unwrap_or(default)
    }
}

enum Outcome {
    Done,
    Failed,
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
    });
    if let Some(n) = threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let stdout = std::io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::Failed) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out_path: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out_path {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<Outcome> {
    let ov = Overrides {
        seed: cli.seed,
        samples: cli.samples,
    };
    match &cli.command {
        Command::Tau { config } => {
            let sc = Scenario::load(config)?;
            emit(&cli.out, &tau_table(&sc.law()?)?, stdout)?;
        }
        Command::Partition { config, k } => {
            let sc = Scenario::load(config)?;
            emit(&cli.out, &partition_table(&sc.law()?, *k)?, stdout)?;
        }
        Command::Expand { config, k } => {
            let sc = Scenario::load(config)?;
            let cfg = McConfig {
                samples: ov.samples(Some(&sc), McConfig::default().samples),
                seed: ov.seed(&sc)?,
            };
            let exp =
                asymptotics::expansion(sc.margins()?, &sc.law()?, &sc.risk_set(*k)?, *k, &cfg)?;
            emit(&cli.out, &expansion_csv(&exp), stdout)?;
            match leading_order(&exp) {
                Ok((e, c)) => eprintln!(
                    "leading order: exponent {e}, coefficient {c}, iota_bar {}, i_star {}, refined_valid {}",
                    exp.iota_bar.unwrap_or(0),
                    exp.i_star,
                    exp.refined_valid
                ),
                Err(e) => eprintln!("leading order: {e}"),
            }
        }
        Command::Simulate { config, k } => {
            let sc = Scenario::load(config)?;
            if sc.t_grid.is_empty() {
                return Err(Error::config("t_grid", "simulate needs at least one t"));
            }
            let rows = simulate::ratio_table(
                sc.margins()?,
                &sc.law()?,
                &sc.risk_set(*k)?,
                &sc.t_grid,
                ov.samples(Some(&sc), VERIFY_SAMPLES),
                ov.seed(&sc)?,
            )?;
            emit(&cli.out, &simulate::ratio_csv(&rows), stdout)?;
        }
        Command::Verify { name } => {
            let report = verify(name, ov.samples(None, VERIFY_SAMPLES), ov.seed.unwrap_or(1))?;
            emit(&cli.out, &report.text, stdout)?;
            if !report.passed() {
                return Ok(Outcome::Failed);
            }
        }
        Command::Network { name, figure3 } => {
            let sc = network::scenario(name)?;
            let mut text = network_table(&sc)?;
            if name == "prop41" {
                text.push_str(&network::prop41_report(4, 3)?.to_text());
            } else if name == "prop42" {
                text.push_str(&network::prop42_report(4, 1)?.to_text());
            }
            if *figure3 {
                if !name.starts_with("det-") {
                    return Err(Error::config(
                        "figure3",
                        "only the det-* scenarios have figure data",
                    ));
                }
                let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
                std::fs::create_dir_all(&dir)?;
                for alpha in [1u8, 2] {
                    let rows = network::figure3_data(f64::from(alpha))?;
                    let path = dir.join(format!("fig3_alpha{alpha}.csv"));
                    std::fs::write(&path, network::figure3_csv(&rows))?;
                    let _ = writeln!(text, "wrote {}", path.display());
                }
                stdout.write_all(text.as_bytes())?;
            } else {
                emit(&cli.out, &text, stdout)?;
            }
        }
    }
    Ok(Outcome::Done)
}

/// `atom,k,i,tau,i_k` for every atom and every `(k, i)`.
pub fn tau_table(law: &MatrixLaw) -> Result<String> {
    let atoms = law.enumerate_support()?;
    let mut out = String::from("atom,k,i,tau,i_k\n");
    for (m, atom) in atoms.iter().enumerate() {
        let a = &atom.matrix;
        for k in 1..=a.rows() {
            let ik = tau::critical_index(a, k)?.0;
            for i in 1..=a.cols() {
                let t = tau::tau_matrix(a, k, i)?;
                let _ = writeln!(out, "{},{k},{i},{},{ik}", m + 1, t);
            }
        }
    }
    Ok(out)
}

/// `i,mass,approx` (plus interval columns when sampled).
pub fn partition_table(law: &MatrixLaw, k: usize) -> Result<String> {
    let p = law.partition(k)?;
    let mut out = String::new();
    match &p.method {
        PartitionMethod::Enumerated => {
            out.push_str("i,mass,approx\n");
            for (j, m) in p.masses.iter().enumerate() {
                let _ = writeln!(out, "{},{m},{}", j + 1, cell(m.to_f64()));
            }
        }
        PartitionMethod::Sampled { ci95, stderr, .. } => {
            out.push_str("i,mass,approx,stderr,ci_low,ci_high\n");
            for (j, m) in p.masses.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{m},{},{},{},{}",
                    j + 1,
                    cell(m.to_f64()),
                    cell(stderr[j]),
                    cell(ci95[j].0),
                    cell(ci95[j].1)
                );
            }
        }
    }
    Ok(out)
}

pub fn expansion_csv(exp: &asymptotics::TailExpansion) -> String {
    let mut out = String::from("i,exponent,coefficient,stderr,method\n");
    for t in &exp.terms {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            t.i,
            cell(t.exponent),
            cell(t.coefficient),
            cell(t.stderr),
            t.method.label()
        );
    }
    out
}

fn network_table(sc: &Canned) -> Result<String> {
    let results = network::leading_constants(sc, &McConfig::default())?;
    let mut out =
        String::from("set,exponent,constant,expected_exponent,expected_constant,agrees\n");
    for r in results {
        let (ee, ec) = r.expected.map_or((String::new(), String::new()), |e| {
            (cell(e.exponent), cell(e.constant))
        });
        let agrees = r.agrees.map_or(String::new(), |a| a.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{ee},{ec},{agrees}",
            r.label,
            cell(r.exponent),
            cell(r.constant)
        );
    }
    Ok(out)
}

/// Outcome of [`verify`].
#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<(String, bool)>,
    pub text: String,
}

impl VerifyReport {
    fn check(&mut self, label: String, ok: bool, detail: &str) {
        let _ = writeln!(
            self.text,
            "{} {label}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        self.checks.push((label, ok));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

fn verify_grid(name: &str) -> Vec<f64> {
    match name {
        "det-independent" | "det-dependent" => vec![20.0, 50.0],
        "prop41" | "prop42" => vec![10.0, 30.0],
        _ => vec![10.0, 20.0, 50.0],
    }
}

/// Leading constants against their expected values, then empirical ratios at the
/// largest grid point inside `[0.8, 1.2]` widened by three standard errors.
pub fn verify(name: &str, samples: u64, seed: u64) -> Result<VerifyReport> {
    let sc = network::scenario(name)?;
    let mut rep = VerifyReport::default();
    let _ = writeln!(rep.text, "scenario {name}, n = {samples}, seed = {seed}");
    let cfg = McConfig {
        seed,
        ..McConfig::default()
    };
    let grid = verify_grid(name);
    for (j, ns) in sc.sets.iter().enumerate() {
        let (margins, law) = (&sc.network.margins, &sc.network.law);
        let exp = asymptotics::expansion(margins, law, &ns.set, ns.set.k, &cfg)?;
        let (e, c) = leading_order(&exp)?;
        if let Some(x) = ns.expected {
            let ok = (x.exponent - e).abs() < 1e-12
                && (x.constant - c).abs() <= 1e-12 * x.constant.max(1.0);
            rep.check(
                format!("{} leading order", ns.label),
                ok,
                &format!(
                    "computed ({e}, {c}), expected ({}, {})",
                    x.exponent, x.constant
                ),
            );
        }
        if exp.iota_bar != Some(exp.i_star) {
            rep.check(
                format!("{} refined order hypothesis", ns.label),
                exp.refined_valid,
                &format!("i_star {}, iota_bar {:?}", exp.i_star, exp.iota_bar),
            );
        }
        let rows = simulate::ratio_rows(
            margins,
            law,
            &ns.set,
            &exp,
            &grid,
            samples,
            crate::mc::derive_seed(seed, j as u64),
        )?;
        let _ = writeln!(rep.text, "{} ratio table", ns.label);
        rep.text.push_str(&simulate::ratio_csv(&rows));
        let last = rows[rows.len() - 1];
        let slack = 0.2 + 3.0 * last.stderr / last.leading_eval;
        rep.check(
            format!("{} empirical ratio at t = {}", ns.label, last.t),
            (last.ratio_leading - 1.0).abs() <= slack,
            &format!("ratio {:.4}, allowed 1 +- {:.4}", last.ratio_leading, slack),
        );
    }
    match name {
        "prop41" => {
            let r = network::prop41_report(4, 3)?;
            rep.text.push_str(&r.to_text());
            rep.check(
                "partition masses vs closed form".into(),
                r.partition_matches(),
                "q=4, d=3",
            );
        }
        "prop42" => {
            let r = network::prop42_report(4, 1)?;
            rep.text.push_str(&r.to_text());
            rep.check(
                "partition masses vs closed form".into(),
                r.partition_matches(),
                "d=4, m=1",
            );
        }
        _ => {}
    }
    Ok(rep)
}
