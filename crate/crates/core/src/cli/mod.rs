//! The `ncsym` command line: `dims`, `verify` and `zhang`.
//!
//! Exit codes: 0 pass, 1 verification failure or internal error, 2 refusal
//! (forbidden type, non-periodic tower, window or budget), 3 parse error.

pub mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arith::field::{Field, GroundField, Rationals};
use crate::bimodule::DualTower;
use crate::error::{Error, Result};
use crate::gorenstein::{helix_shadow_report, r2tau_dims, verify_gorenstein};
use crate::linear::matrix::Matrix;
use crate::ncsym::{BuildOptions, CheckStatus, DimTable, Window, ZAlgebraWindow};
use crate::zhang::{build_zhang, compare_p1n, zhang_hilbert, DEFAULT_BUDGET};
use spec::{InputSpec, Scalar};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_REFUSED: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ncsym",
    version,
    about = "Finite-window verification of noncommutative symmetric algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the machine report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Overrides the seed in the spec file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest ambient dimension any single computation may use.
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Worker threads for cell evaluation.
    #[arg(long, global = true, env = "NCSYM_JOBS")]
    pub jobs: Option<usize>,
    #[arg(long, global = true, hide = true)]
    pub allow_forbidden: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the dimension table of the window.
    Dims { spec: PathBuf },
    /// Run verification suites over the window.
    Verify {
        spec: PathBuf,
        #[command(flatten)]
        suites: Suites,
    },
    /// Hilbert function of Zhang's algebra on n generators.
    Zhang {
        n: usize,
        m_max: usize,
        /// `identity` or a JSON file holding an n×n matrix.
        #[arg(long, default_value = "identity")]
        sigma: String,
        /// Also compute the noncommutative symmetric algebra of k^n.
        #[arg(long)]
        compare: bool,
        /// Work over GF(p) instead of Q.
        #[arg(long)]
        prime: Option<u64>,
    },
}

#[derive(Debug, Args, Clone, Copy)]
pub struct Suites {
    #[arg(long)]
    pub euler: bool,
    #[arg(long)]
    pub gorenstein: bool,
    #[arg(long)]
    pub cancellation: bool,
    #[arg(long)]
    pub zero_divisors: bool,
    #[arg(long)]
    pub helix: bool,
    #[arg(long)]
    pub all: bool,
}

impl Suites {
    fn normalized(self) -> Self {
        let none = !(self.euler || self.gorenstein || self.cancellation || self.zero_divisors || self.helix);
        if self.all || none {
            Suites {
                euler: true,
                gorenstein: true,
                cancellation: true,
                zero_divisors: true,
                helix: true,
                all: true,
            }
        } else {
            self
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Json(_)
        | Error::NotPrime(_)
        | Error::ReducibleMinpoly(_)
        | Error::UnsupportedMinpoly(_)
        | Error::ZeroDivisorDetected { .. }
        | Error::InvalidAlgebra(_)
        | Error::InvalidBimodule(_)
        | Error::NotFree(_)
        | Error::DimensionMismatch(_) => EXIT_PARSE,
        Error::ForbiddenType(..)
        | Error::NotTwoPeriodic { .. }
        | Error::WindowTooSmall(_)
        | Error::OutOfWindow(_)
        | Error::BudgetExceeded { .. }
        | Error::SingularSigma => EXIT_REFUSED,
        _ => EXIT_FAIL,
    }
}

/// Parses `args` and runs the command, writing the human table to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.jobs.unwrap_or(0))
        .build();
    let result = match pool {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(e) => Err(Error::Parse(format!("thread pool: {e}"))),
    };
    match result {
        Ok(outcome) => {
            let _ = out.write_all(outcome.human.as_bytes());
            if let Some(path) = &cli.common.json {
                if let Err(e) = std::fs::write(path, render_json(&outcome.report)) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_FAIL;
                }
            }
            if outcome.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Canonical serialization: sorted keys, two-space indent, trailing newline.
pub fn render_json(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub struct Outcome {
    pub report: Value,
    pub human: String,
    pub passed: bool,
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Dims { spec } => with_spec(spec, &cli.common, |ctx| ctx.dims()),
        Command::Verify { spec, suites } => with_spec(spec, &cli.common, |ctx| ctx.verify(suites.normalized())),
        Command::Zhang {
            n,
            m_max,
            sigma,
            compare,
            prime,
        } => {
            let budget = cli.common.budget.unwrap_or(DEFAULT_BUDGET);
            match prime {
                None => zhang_cmd(&Rationals, *n, *m_max, sigma, *compare, budget),
                Some(p) => match GroundField::prime(*p)? {
                    GroundField::Prime(f) => zhang_cmd(&f, *n, *m_max, sigma, *compare, budget),
                    GroundField::Rationals => unreachable!(),
                },
            }
        }
    }
}

struct Ctx<F: Field> {
    z: ZAlgebraWindow<F>,
    metadata: Value,
    seed: u64,
}

trait SpecCommand {
    fn dims(&self) -> Result<Outcome>;
    fn verify(&self, suites: Suites) -> Result<Outcome>;
}

fn with_spec(path: &Path, common: &Common, f: impl Fn(&dyn SpecCommand) -> Result<Outcome>) -> Result<Outcome> {
    let bytes = std::fs::read(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let spec = InputSpec::parse(&text)?;
    let hash = format!("{:x}", Sha256::digest(&bytes));
    match spec.ground_field()? {
        GroundField::Rationals => f(&Ctx::new(&Rationals, &spec, common, hash)?),
        GroundField::Prime(p) => f(&Ctx::new(&p, &spec, common, hash)?),
    }
}

/// Largest `kdim T_ij` over the window, from the tower alone.
fn ambient_estimate<F: Field>(tower: &DualTower<F>, w: &Window) -> Result<u128> {
    let mut worst = 0u128;
    for i in w.i_min..=w.i_max {
        let mut t = tower.module(i)?.left_alg().dim() as u128;
        worst = worst.max(t);
        for j in i..w.i_max.min(i + w.max_degree as i64) {
            let m = tower.module(j)?;
            t = t * m.kdim() as u128 / m.left_alg().dim() as u128;
            worst = worst.max(t);
        }
    }
    Ok(worst)
}

impl<F: Field> Ctx<F> {
    fn new(f: &F, spec: &InputSpec, common: &Common, hash: String) -> Result<Self> {
        let m = spec.bimodule(f)?;
        let window = spec.window();
        let budget = common.budget.or(spec.budget).unwrap_or(DEFAULT_BUDGET);
        let seed = common.seed.or(spec.seed).unwrap_or(0);
        let tower = Arc::new(DualTower::new(m));
        let needed = ambient_estimate(&tower, &window)?;
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let opts = BuildOptions {
            allow_forbidden: common.allow_forbidden,
        };
        let z = ZAlgebraWindow::build_with_tower(tower, window, opts)?;
        let t = z.type_report();
        // Every module of the tower must be free of finite rank on both sides.
        let mut tower = Vec::new();
        for i in window.i_min..=window.i_max + 1 {
            let m = z.module(i)?;
            let free = m.kdim() % m.left_alg().dim() == 0 && m.kdim() % m.right_alg().dim() == 0;
            tower.push(json!({ "i": i, "kdim": m.kdim(), "left_rank": m.left_rank(), "right_rank": m.right_rank(), "free": free }));
        }
        let admissible = tower.iter().all(|e| e["free"] == true);
        let metadata = json!({
            "admissible": admissible,
            "tower": tower,
            "type_unordered": [t.unordered.0, t.unordered.1],
            "field": f.name(),
            "window": [window.i_min, window.i_max],
            "max_degree": window.max_degree,
            "type": [t.left_rank, t.right_rank],
            "seed": seed,
            "budget": budget.to_string(),
            "spec_sha256": hash,
            "version": env!("CARGO_PKG_VERSION"),
        });
        Ok(Ctx { z, metadata, seed })
    }
}

#[derive(Serialize)]
struct Verdict {
    check: &'static str,
    location: Vec<i64>,
    passed: bool,
    payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

fn verdict<T: Serialize>(
    check: &'static str,
    location: Vec<i64>,
    passed: bool,
    payload: &T,
    witness: impl FnOnce() -> String,
) -> Verdict {
    Verdict {
        check,
        location,
        passed,
        payload: serde_json::to_value(payload).expect("payload serializes"),
        witness: if passed { None } else { Some(witness()) },
    }
}

fn loc(l: &[i64]) -> String {
    let parts: Vec<String> = l.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

fn dim_grid(t: &DimTable, w: &Window) -> String {
    let mut s = String::new();
    s.push_str(&format!("{:>6} |", "i \\ d"));
    for d in 0..=w.max_degree {
        s.push_str(&format!("{d:>7}"));
    }
    s.push('\n');
    for i in w.i_min..=w.i_max {
        s.push_str(&format!("{i:>6} |"));
        for d in 0..=w.max_degree as i64 {
            match t.kdim(i, i + d) {
                Some(k) => s.push_str(&format!("{k:>7}")),
                None => s.push_str(&format!("{:>7}", ".")),
            }
        }
        s.push('\n');
    }
    s
}

fn header(meta: &Value) -> String {
    format!(
        "field {}  window [{}, {}]  max degree {}  type ({}, {}), unordered ({}, {})\n",
        meta["field"].as_str().unwrap_or("?"),
        meta["window"][0],
        meta["window"][1],
        meta["max_degree"],
        meta["type"][0],
        meta["type"][1],
        meta["type_unordered"][0],
        meta["type_unordered"][1],
    )
}

impl<F: Field> SpecCommand for Ctx<F> {
    fn dims(&self) -> Result<Outcome> {
        let w = self.z.window();
        let table = self.z.dim_table()?;
        let passed = table.rows.iter().all(|r| r.ranks_consistent) && table.euler_identity.iter().all(|r| r.passed);
        let human = format!("{}{}", header(&self.metadata), dim_grid(&table, &w));
        let report = json!({
            "command": "dims",
            "metadata": self.metadata,
            "tables": { "dims": table },
            "passed": passed,
        });
        Ok(Outcome {
            report: normalize(report),
            human,
            passed,
        })
    }

    fn verify(&self, suites: Suites) -> Result<Outcome> {
        let z = &self.z;
        let w = z.window();
        let mut verdicts: Vec<Verdict> = Vec::new();
        let mut tables = serde_json::Map::new();
        let cells: Vec<(i64, i64)> = w.cells();

        if suites.euler {
            for &(i, j) in cells.iter().filter(|&&(i, j)| w.contains(i, j + 2)) {
                let r = z.verify_euler(i, j)?;
                verdicts.push(verdict("euler", vec![i, j], r.passed, &r, || {
                    format!(
                        "dims {:?}, ranks ({}, {}), injective {}, exact {}",
                        r.dims, r.left_rank, r.right_rank, r.left_injective, r.exact
                    )
                }));
            }
            for &(i, j) in cells.iter().filter(|&&(i, j)| w.contains(i, j + 2)) {
                let r = z.verify_intersection_identity(i, j)?;
                verdicts.push(verdict("intersection", vec![i, j], r.passed, &r, || {
                    format!("intersection rank {} vs {}", r.lhs_rank, r.rhs_rank)
                }));
            }
        }
        if suites.cancellation {
            for i in w.i_min..=w.i_max {
                for j in i - 1..=w.i_max {
                    if !w.contains(i, j + 2) {
                        continue;
                    }
                    let r = z.verify_right_cancellation(i, j)?;
                    verdicts.push(verdict("cancellation", vec![i, j], r.passed, &r, || {
                        format!("kernel dimension {} of {}", r.kernel_dim, r.source_dim)
                    }));
                }
            }
        }
        if suites.zero_divisors {
            for j in (w.i_min..=w.i_max).filter(|&j| w.contains(j, j + 2)) {
                let r = z.verify_zero_divisor_property(j, 3, self.seed.wrapping_add(j as u64))?;
                let passed = r.status != CheckStatus::Fail;
                verdicts.push(verdict("zero-divisors", vec![j], passed, &r, || {
                    let bad: Vec<&str> = r
                        .entries
                        .iter()
                        .filter(|e| !e.injective)
                        .map(|e| e.g.as_str())
                        .collect();
                    format!("not injective for {}", bad.join(", "))
                }));
            }
        }
        if suites.gorenstein {
            let mut ext = Vec::new();
            let top = w.max_degree as i64 - 2;
            for l in w.i_min + 2..=w.i_max - 2 {
                let (m_lo, m_hi) = ((l - 6).max(w.i_min), (l + 2).min(w.i_max - 2).min(l + top));
                if m_hi < l - 2 {
                    continue;
                }
                let g = verify_gorenstein(z, l, m_lo, m_hi)?;
                for row in &g.rows {
                    verdicts.push(verdict("gorenstein", vec![l, row.m], row.passed, row, || {
                        format!("cohomology {:?}, expected {:?}", row.cohomology, row.expected)
                    }));
                }
                ext.extend(g.table);
            }
            for e in r2tau_dims(z)? {
                verdicts.push(verdict("r2tau", vec![e.l, e.j], e.passed, &e, || {
                    format!("value {} vs expected {}", e.value, e.expected)
                }));
            }
            tables.insert("ext".into(), serde_json::to_value(ext)?);
        }
        if suites.helix {
            let (lo, hi) = (1 - w.i_max, -w.i_min - 1);
            if lo <= hi && w.max_degree >= 2 {
                let h = helix_shadow_report(z, lo, hi)?;
                for r in &h.rows {
                    let ok = r.no_backward_maps && r.finite_ranks && r.no_forward_ext && r.ranks_match;
                    verdicts.push(verdict("helix", vec![r.i], ok, r, || {
                        format!(
                            "no backward maps {}, finite ranks {}, no forward Ext {}, ranks match {}",
                            r.no_backward_maps, r.finite_ranks, r.no_forward_ext, r.ranks_match
                        )
                    }));
                }
                tables.insert("helix_out_of_scope".into(), serde_json::to_value(&h.out_of_scope)?);
            }
        }

        let table = z.dim_table()?;
        tables.insert("dims".into(), serde_json::to_value(&table)?);
        let passed = verdicts.iter().all(|v| v.passed);

        let mut human = header(&self.metadata);
        let mut checks: Vec<&str> = Vec::new();
        for v in &verdicts {
            if !checks.contains(&v.check) {
                checks.push(v.check);
            }
        }
        for c in checks {
            let of: Vec<&Verdict> = verdicts.iter().filter(|v| v.check == c).collect();
            let ok = of.iter().filter(|v| v.passed).count();
            human.push_str(&format!("{c:<14} {ok}/{} pass\n", of.len()));
            for v in of.iter().filter(|v| !v.passed) {
                human.push_str(&format!(
                    "  FAIL {c} at {}: {}\n",
                    loc(&v.location),
                    v.witness.as_deref().unwrap_or("")
                ));
            }
        }
        if let Some(ext) = tables.get("ext").and_then(|e| e.as_array()) {
            for e in ext {
                human.push_str(&format!(
                    "  Ext^{} at (l, m) = ({}, {}): kdim {}\n",
                    e["q"], e["l"], e["m"], e["kdim"]
                ));
            }
        }
        human.push_str(if passed { "result: PASS\n" } else { "result: FAIL\n" });

        let failures: Vec<Value> = verdicts
            .iter()
            .filter(|v| !v.passed)
            .map(|v| json!({ "check": v.check, "location": v.location, "witness": v.witness }))
            .collect();
        let report = json!({
            "command": "verify",
            "metadata": self.metadata,
            "failures": failures,
            "verdicts": verdicts,
            "tables": tables,
            "passed": passed,
        });
        Ok(Outcome {
            report: normalize(report),
            human,
            passed,
        })
    }
}

/// Round-trips through `Value` so every nested struct comes out with sorted keys.
fn normalize(v: Value) -> Value {
    serde_json::from_str(&v.to_string()).expect("valid json")
}

fn read_sigma<F: Field>(f: &F, n: usize, sigma: &str) -> Result<Matrix<F>> {
    if sigma == "identity" {
        return Ok(Matrix::identity(f, n));
    }
    let text = std::fs::read_to_string(sigma).map_err(|e| Error::Parse(format!("{sigma}: {e}")))?;
    let rows: Vec<Vec<Scalar>> = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{sigma}: {e}")))?;
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|s| s.to_elem(f)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if rows.len() != n {
        return Err(Error::Parse(format!("sigma must have {n} rows")));
    }
    Matrix::from_rows(f, rows, n).map_err(|e| Error::Parse(e.to_string()))
}

fn join(v: &[usize]) -> String {
    v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}

fn zhang_cmd<F: Field>(f: &F, n: usize, m_max: usize, sigma: &str, compare: bool, budget: u128) -> Result<Outcome> {
    let s = read_sigma(f, n, sigma)?;
    let metadata = json!({
        "field": f.name(),
        "n": n,
        "m_max": m_max,
        "sigma": s.format_rows(),
        "budget": budget.to_string(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    if compare {
        let c = compare_p1n(f, n, m_max, &s, budget)?;
        let human = format!(
            "zhang  {}\nncsym  {}\nequal {}  recurrence {} / {}\n",
            join(&c.zhang),
            join(&c.ncsym),
            c.equal,
            c.zhang_recurrence,
            c.ncsym_recurrence
        );
        let passed = c.passed;
        let report =
            json!({ "command": "zhang", "metadata": metadata, "compare": c, "hilbert": c.zhang, "passed": passed });
        return Ok(Outcome {
            report: normalize(report),
            human,
            passed,
        });
    }
    let z = build_zhang(f, n, &s)?;
    let dims = zhang_hilbert(&z, m_max, budget)?;
    let human = format!("{}\n", join(&dims));
    let report = json!({ "command": "zhang", "metadata": metadata, "hilbert": dims, "passed": true });
    Ok(Outcome {
        report: normalize(report),
        human,
        passed: true,
    })
}
