//! `toeplitz`: command-line front end for toeplitz-core.
//!
//! Exit codes: 0 success, 1 error, 2 inconclusive verdict, 64 usage, 65 input schema.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Value};

use toeplitz_core::bm::{
    bm_density, exp_dominance_test, family_weight_sum, kappa_almost_decreasing, theorem10_diagnostic, type_estimate,
    DensityOptions, DominanceVerdict, Sample, SequenceSpec,
};
use toeplitz_core::clark::{clark_measure, clark_recover, mif_from_measure_alpha};
use toeplitz_core::debranges::{clark_basis_gram, db_membership, reproducing_kernel};
use toeplitz_core::grid::{linspace, GridFunction};
use toeplitz_core::inner::{arg_grid, darg_grid, eval_mif, Decay};
use toeplitz_core::io;
use toeplitz_core::model::toeplitz_kernel_reduced;
use toeplitz_core::order::order_verdict;
use toeplitz_core::scenarios::{example1, example2, example3, example4};
use toeplitz_core::{Error as CoreError, Exec};

const EXIT_ERROR: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_SCHEMA: u8 = 65;

#[derive(Parser, Serialize)]
#[command(name = "toeplitz", version, about = "Inner functions, Toeplitz order and Beurling-Malliavin diagnostics")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize)]
struct Common {
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Real window `LO HI`.
    #[arg(long, global = true, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    window: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run grid work on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

/// A complex number written `re,im` or `re`.
#[derive(Clone, Copy, Debug)]
struct Cx(Complex64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

fn parse_cx(s: &str) -> std::result::Result<Cx, String> {
    let bad = || format!("expected `re,im` or `re`, got {s:?}");
    let (re, im) = match s.split_once(',') {
        Some((a, b)) => (a.trim().parse::<f64>().map_err(|_| bad())?, b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s.trim().parse::<f64>().map_err(|_| bad())?, 0.0),
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Cx(Complex64::new(re, im)))
}

fn parse_decay(s: &str) -> std::result::Result<Decay, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

fn parse_seq(s: &str) -> std::result::Result<String, String> {
    s.parse::<SequenceSpec>().map(|_| s.to_string()).map_err(|e| e.to_string())
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Meromorphic inner functions.
    #[command(subcommand)]
    Mif(MifCmd),
    /// Clark measures.
    #[command(subcommand)]
    Clark(ClarkCmd),
    /// Exact Toeplitz kernels.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Toeplitz order.
    #[command(subcommand)]
    Order(OrderCmd),
    /// Beurling-Malliavin diagnostics.
    #[command(subcommand)]
    Bm(BmCmd),
    /// de Branges spaces.
    #[command(subcommand)]
    Db(DbCmd),
    /// Worked examples.
    #[command(subcommand)]
    Paper(PaperCmd),
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MifCmd {
    /// Values at points of the closed upper half-plane.
    Eval {
        #[arg(long)]
        mif: PathBuf,
        #[arg(long = "z", required = true, value_parser = parse_cx, allow_hyphen_values = true)]
        z: Vec<Cx>,
    },
    /// Continuous argument on the window.
    Arg {
        #[arg(long)]
        mif: PathBuf,
        #[arg(long, default_value_t = 401)]
        points: usize,
    },
    /// Derivative of the argument on the window.
    Darg {
        #[arg(long)]
        mif: PathBuf,
        #[arg(long, default_value_t = 401)]
        points: usize,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ClarkCmd {
    /// Clark measure on the window (the whole line when omitted).
    Forward {
        #[arg(long)]
        mif: PathBuf,
        #[arg(long, default_value = "1,0", value_parser = parse_cx, allow_hyphen_values = true)]
        alpha: Cx,
    },
    /// Inner function of a measure, evaluated at points.
    Inverse {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value = "1,0", value_parser = parse_cx, allow_hyphen_values = true)]
        alpha: Cx,
        #[arg(long = "z", required = true, value_parser = parse_cx, allow_hyphen_values = true)]
        z: Vec<Cx>,
    },
    /// Model-space function from its samples on the Clark atoms.
    Recover {
        #[arg(long)]
        mif: PathBuf,
        /// JSON list `[[re,im], ...]`, one sample per atom.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value = "1,0", value_parser = parse_cx, allow_hyphen_values = true)]
        alpha: Cx,
        #[arg(long = "z", required = true, value_parser = parse_cx, allow_hyphen_values = true)]
        z: Vec<Cx>,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum KernelCmd {
    /// Kernel of the Toeplitz operator with symbol conj(I) J for finite Blaschke products.
    Rational {
        #[arg(long = "I")]
        i: PathBuf,
        #[arg(long = "J")]
        j: PathBuf,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OrderCmd {
    /// Compare the dominance sets of I and J.
    Verdict {
        #[arg(long = "I")]
        i: PathBuf,
        #[arg(long = "J")]
        j: PathBuf,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BmCmd {
    /// Exterior density of a sequence.
    Density {
        /// `arith:β`, `squares` or `geometric:q`.
        #[arg(long, value_parser = parse_seq, conflicts_with = "file", required_unless_present = "file")]
        seq: Option<String>,
        /// One real per line.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1 << 14)]
        budget: usize,
    },
    /// Weighted square sum of an interval family or of the violations of a profile.
    Kappa {
        /// `{"intervals": [[l, r], ...], "kappa": κ}`.
        #[arg(long, conflicts_with = "gamma", required_unless_present = "gamma")]
        family: Option<PathBuf>,
        /// CSV with columns `x,gamma`.
        #[arg(long)]
        gamma: Option<PathBuf>,
        /// Weight exponent; overrides the family's own value.
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// The two sufficient tests for J in D(U).
    Theorem10 {
        #[arg(long = "U")]
        u: PathBuf,
        #[arg(long = "J")]
        j: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        kappa: f64,
        #[arg(long, default_value_t = 100.0)]
        xmax: f64,
    },
    /// Type of an atomic measure.
    Type {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
    /// Is I in the dominance set of S^b?
    Dominance {
        #[arg(long)]
        mif: PathBuf,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 1 << 14)]
        budget: usize,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DbCmd {
    /// Reproducing kernel K(λ, z).
    Kernel {
        #[arg(long = "E")]
        e: PathBuf,
        #[arg(long, value_parser = parse_cx, allow_hyphen_values = true)]
        lambda: Cx,
        #[arg(long = "z", required = true, value_parser = parse_cx, allow_hyphen_values = true)]
        z: Vec<Cx>,
    },
    /// Orthogonal kernel basis on a level set of θ_E and its Gram matrix.
    Basis {
        #[arg(long = "E")]
        e: PathBuf,
        #[arg(long, default_value = "1,0", value_parser = parse_cx, allow_hyphen_values = true)]
        alpha: Cx,
    },
    /// Membership of `F = scalar · e^{-iaz} Π (z - z_k)` in B(E).
    Member {
        #[arg(long = "E")]
        e: PathBuf,
        /// `{"zeros": [[re,im], ...], "exp_mass": a, "scalar": [re,im]}`, zeros anywhere.
        #[arg(long = "F")]
        f: PathBuf,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PaperCmd {
    /// Reproduce one of the four worked examples.
    Example {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        number: u8,
        /// Height of the lattice zeros (examples 3 and 4).
        #[arg(long = "C", default_value_t = 10.0)]
        c: f64,
        /// Decay of the pulled heights in example 2: `1/k` or `k^-p`.
        #[arg(long, default_value = "1/k", value_parser = parse_decay)]
        #[serde(serialize_with = "display")]
        decay: Decay,
        /// Example 2 window exponent: `[-2^m, 2^m]`.
        #[arg(long, default_value_t = 16)]
        extent: i32,
        /// Lattice truncation `|n| ≤ N` (examples 3 and 4).
        #[arg(long, default_value_t = 20000)]
        truncation: i64,
        /// Largest degree in example 1.
        #[arg(long, default_value_t = 5)]
        max_degree: usize,
    },
}

fn display<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Result of one command: the JSON body, an optional numeric table for CSV
/// output and whether the verdict was inconclusive.
struct Outcome {
    body: Value,
    table: Option<Table>,
    inconclusive: bool,
}

struct Table {
    headers: Vec<&'static str>,
    columns: Vec<Vec<f64>>,
}

impl Outcome {
    fn new(body: Value) -> Self {
        Self { body, table: None, inconclusive: false }
    }

    fn table(mut self, headers: Vec<&'static str>, columns: Vec<Vec<f64>>) -> Self {
        self.table = Some(Table { headers, columns });
        self
    }

    fn inconclusive(mut self, flag: bool) -> Self {
        self.inconclusive = flag;
        self
    }
}

fn cx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).context("serialising the result")
}

impl Common {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }

    fn window_or(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let (a, b) = match &self.window {
            Some(w) => (w[0], w[1]),
            None => (lo, hi),
        };
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            bail!(CoreError::InvalidInput(format!("window must satisfy LO < HI, got {a} {b}")));
        }
        Ok((a, b))
    }
}

fn grid_outcome(g: &GridFunction, name: &'static str) -> Outcome {
    Outcome::new(json!({ "x": g.xs, name: g.ys })).table(vec!["x", name], vec![g.xs.clone(), g.ys.clone()])
}

fn complex_table(zs: &[Cx], vals: &[Complex64]) -> Outcome {
    let body = json!({
        "values": zs.iter().zip(vals).map(|(z, v)| json!({ "z": cx(z.0), "value": cx(*v) })).collect::<Vec<_>>()
    });
    let col = |f: &dyn Fn(usize) -> f64| (0..zs.len()).map(f).collect::<Vec<f64>>();
    Outcome::new(body).table(
        vec!["z_re", "z_im", "re", "im"],
        vec![col(&|k| zs[k].0.re), col(&|k| zs[k].0.im), col(&|k| vals[k].re), col(&|k| vals[k].im)],
    )
}

fn run(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    let exec = c.exec();
    match &cli.command {
        Command::Mif(cmd) => match cmd {
            MifCmd::Eval { mif, z } => {
                let d = io::load_mif(mif)?;
                let vals = z.iter().map(|z| eval_mif(&d, z.0, c.tol)).collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(complex_table(z, &vals))
            }
            MifCmd::Arg { mif, points } => {
                let d = io::load_mif(mif)?;
                let (a, b) = c.window_or(-10.0, 10.0)?;
                Ok(grid_outcome(&arg_grid(&d, &linspace(a, b, *points), exec), "arg"))
            }
            MifCmd::Darg { mif, points } => {
                let d = io::load_mif(mif)?;
                let (a, b) = c.window_or(-10.0, 10.0)?;
                Ok(grid_outcome(&darg_grid(&d, &linspace(a, b, *points), exec), "darg"))
            }
        },
        Command::Clark(cmd) => match cmd {
            ClarkCmd::Forward { mif, alpha } => {
                let d = io::load_mif(mif)?;
                let window = c.window_or(f64::NEG_INFINITY, f64::INFINITY)?;
                let m = clark_measure(&d.materialized(), alpha.0, window)?;
                let mut body = to_value(&m.measure)?;
                body["alpha"] = cx(m.alpha);
                body["infinity_mass_certified"] = json!(m.infinity_mass_certified);
                let xs = m.measure.xs();
                let masses = m.measure.atoms.iter().map(|a| a.mass).collect();
                Ok(Outcome::new(body).table(vec!["x", "mass"], vec![xs, masses]))
            }
            ClarkCmd::Inverse { measure, alpha, z } => {
                let mu = io::load_measure(measure)?;
                let vals = z
                    .iter()
                    .map(|z| mif_from_measure_alpha(&mu, alpha.0, z.0))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(complex_table(z, &vals))
            }
            ClarkCmd::Recover { mif, samples, alpha, z } => {
                let d = io::load_mif(mif)?.materialized();
                let raw = std::fs::read_to_string(samples).with_context(|| format!("reading {}", samples.display()))?;
                let s: Vec<[f64; 2]> = io::parse_json(&raw)?;
                let s: Vec<Complex64> = s.into_iter().map(|[a, b]| Complex64::new(a, b)).collect();
                let window = c.window_or(f64::NEG_INFINITY, f64::INFINITY)?;
                let sigma = clark_measure(&d, alpha.0, window)?;
                let vals =
                    z.iter().map(|z| clark_recover(&s, &d, &sigma, z.0)).collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(complex_table(z, &vals))
            }
        },
        Command::Kernel(KernelCmd::Rational { i, j }) => {
            let (i, j) = (io::load_rational(i)?, io::load_rational(j)?);
            let k = toeplitz_kernel_reduced(&i, &j)?;
            let mut cols: [Vec<f64>; 5] = Default::default();
            for (e, f) in k.basis.iter().enumerate() {
                for (part, p) in [&f.num, &f.den].into_iter().enumerate() {
                    for (power, a) in p.0.iter().enumerate() {
                        for (col, v) in cols.iter_mut().zip([e as f64, part as f64, power as f64, a.re, a.im]) {
                            col.push(v);
                        }
                    }
                }
            }
            Ok(Outcome::new(to_value(&k)?).table(vec!["element", "part", "power", "re", "im"], cols.to_vec()))
        }
        Command::Order(OrderCmd::Verdict { i, j }) => {
            let (i, j) = (io::load_mif(i)?, io::load_mif(j)?);
            let v = order_verdict(&i, &j);
            Ok(Outcome::new(to_value(&v)?).inconclusive(v.is_inconclusive()))
        }
        Command::Bm(cmd) => run_bm(c, cmd),
        Command::Db(cmd) => run_db(c, cmd),
        Command::Paper(PaperCmd::Example { number, c: height, decay, extent, truncation, max_degree }) => {
            run_example(c, *number, *height, *decay, *extent, *truncation, *max_degree)
        }
    }
}

fn run_bm(c: &Common, cmd: &BmCmd) -> Result<Outcome> {
    let exec = c.exec();
    match cmd {
        BmCmd::Density { seq, file, budget } => {
            let sample = match (seq, file) {
                (Some(s), _) => s.parse::<SequenceSpec>()?.sample(*budget),
                (None, Some(f)) => {
                    let pts = io::load_sequence(f)?;
                    let extent = match &c.window {
                        Some(w) => w[0].abs().max(w[1].abs()),
                        None => pts.iter().fold(0.0f64, |m, x| m.max(x.abs())),
                    };
                    Sample::new(pts, extent)
                }
                (None, None) => unreachable!("clap requires one source"),
            };
            let opts = DensityOptions { budget: *budget, exec, ..DensityOptions::default() };
            let d = bm_density(&sample, &opts)?;
            let (l, r): (Vec<f64>, Vec<f64>) = d.witness.intervals.iter().copied().unzip();
            Ok(Outcome::new(to_value(&d)?).table(vec!["left", "right"], vec![l, r]))
        }
        BmCmd::Kappa { family, gamma, kappa } => {
            let (sum, components) = match (family, gamma) {
                (Some(f), _) => {
                    let mut fam = io::load_family(f)?;
                    if let Some(k) = kappa {
                        fam.kappa = *k;
                    }
                    (family_weight_sum(&fam), fam)
                }
                (None, Some(g)) => {
                    let cols = io::read_columns(g, &["x", "gamma"])?;
                    let grid = GridFunction::new(cols[0].clone(), cols[1].clone()).map_err(schema_error(g))?;
                    let (sum, profile) = kappa_almost_decreasing(&grid, kappa.unwrap_or(0.0))?;
                    (sum, profile.components)
                }
                (None, None) => unreachable!("clap requires one source"),
            };
            let body = json!({ "weight": to_value(&sum)?, "components": components.intervals });
            let (l, r): (Vec<f64>, Vec<f64>) = components.intervals.iter().copied().unzip();
            let inconclusive = sum.classification == toeplitz_core::bm::Classification::WindowLimited;
            Ok(Outcome::new(body).table(vec!["left", "right"], vec![l, r]).inconclusive(inconclusive))
        }
        BmCmd::Theorem10 { u, j, eps, kappa, xmax } => {
            let (u, j) = (io::load_mif(u)?.materialized(), io::load_mif(j)?.materialized());
            let r = theorem10_diagnostic(&u, &j, *eps, *kappa, *xmax, exec)?;
            Ok(Outcome::new(to_value(&r)?).inconclusive(r.verdict == DominanceVerdict::Inconclusive))
        }
        BmCmd::Type { measure, eps } => {
            let mu = io::load_measure(measure)?;
            let reach = mu.atoms.iter().fold(0.0f64, |m, a| m.max(a.x.abs()));
            let window = match &c.window {
                Some(w) => w[0].abs().max(w[1].abs()),
                None => 0.75 * reach.max(1.0),
            };
            let t = type_estimate(&mu, window, c.tol.max(1e-6), *eps, exec)?;
            Ok(Outcome::new(to_value(&t)?))
        }
        BmCmd::Dominance { mif, b, budget } => {
            let d = io::load_mif(mif)?;
            let opts = DensityOptions { budget: *budget, exec, ..DensityOptions::default() };
            let r = exp_dominance_test(&d, *b, c.tol, &opts)?;
            Ok(Outcome::new(to_value(&r)?).inconclusive(r.verdict == DominanceVerdict::Inconclusive))
        }
    }
}

fn schema_error(path: &Path) -> impl Fn(CoreError) -> CoreError + '_ {
    move |e| CoreError::Schema(format!("{}: {e}", path.display()))
}

/// `scalar · e^{-iaz} Π (z - z_k)` with zeros anywhere in the plane.
#[derive(Deserialize)]
struct EntireSpec {
    #[serde(default)]
    zeros: Vec<[f64; 2]>,
    #[serde(default)]
    exp_mass: f64,
    #[serde(default = "unit")]
    scalar: [f64; 2],
}

fn unit() -> [f64; 2] {
    [1.0, 0.0]
}

fn run_db(c: &Common, cmd: &DbCmd) -> Result<Outcome> {
    let exec = c.exec();
    match cmd {
        DbCmd::Kernel { e, lambda, z } => {
            let e = io::load_hb(e)?;
            let vals: Vec<Complex64> = z.iter().map(|z| reproducing_kernel(&e, lambda.0, z.0)).collect();
            Ok(complex_table(z, &vals))
        }
        DbCmd::Basis { e, alpha } => {
            let e = io::load_hb(e)?;
            let window = c.window_or(-10.0, 10.0)?;
            let b = clark_basis_gram(&e, alpha.0, window, exec)?;
            let norms: Vec<f64> = (0..b.points.len()).map(|k| b.gram[k][k].re).collect();
            let body = json!({ "points": b.points, "kernel_norms_sq": norms, "max_off_diagonal": b.max_off_diagonal });
            Ok(Outcome::new(body).table(vec!["x", "norm_sq"], vec![b.points.clone(), norms]))
        }
        DbCmd::Member { e, f } => {
            let e = io::load_hb(e)?;
            let raw = std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
            let spec: EntireSpec = io::parse_json(&raw).map_err(schema_error(f))?;
            let zeros: Vec<Complex64> = spec.zeros.iter().map(|&[a, b]| Complex64::new(a, b)).collect();
            let scalar = Complex64::new(spec.scalar[0], spec.scalar[1]);
            let a = spec.exp_mass;
            let func =
                move |z: Complex64| zeros.iter().fold(scalar * (-Complex64::i() * a * z).exp(), |acc, w| acc * (z - w));
            let (lo, hi) = c.window_or(-10.0, 10.0)?;
            let m = db_membership(&func, &e, &linspace(lo, hi, 41))?;
            Ok(Outcome::new(to_value(&m)?).inconclusive(!m.certified))
        }
    }
}

fn run_example(
    c: &Common,
    number: u8,
    height: f64,
    decay: Decay,
    extent: i32,
    truncation: i64,
    max_degree: usize,
) -> Result<Outcome> {
    match number {
        1 => {
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let mut pool = || -> Vec<Complex64> {
                (0..max_degree).map(|_| Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(0.2..3.0))).collect()
            };
            let (pi, pj) = (pool(), pool());
            let rows = example1(max_degree, &pi, &pj)?;
            let col =
                |f: &dyn Fn(&toeplitz_core::scenarios::Example1Row) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
            let columns = vec![
                col(&|r| r.n as f64),
                col(&|r| r.k as f64),
                col(&|r| r.dim as f64),
                col(&|r| r.expected_dim as f64),
                col(&|r| r.included as u8 as f64),
                col(&|r| r.equivalent as u8 as f64),
            ];
            let body = json!({
                "zeros_i": pi.iter().map(|z| cx(*z)).collect::<Vec<_>>(),
                "zeros_j": pj.iter().map(|z| cx(*z)).collect::<Vec<_>>(),
                "rows": rows,
            });
            Ok(Outcome::new(body).table(vec!["n", "k", "dim", "expected_dim", "included", "equivalent"], columns))
        }
        2 => {
            let r = example2(decay, extent)?;
            let mut body = to_value(&r)?;
            if let Some(o) = body.as_object_mut() {
                o.remove("i");
                o.remove("j");
            }
            let m: Vec<f64> = r.window_exponents.iter().map(|&m| m as f64).collect();
            Ok(Outcome::new(body).table(
                vec!["window_exponent", "conjugate_sup", "weighted_l2"],
                vec![m, r.conjugate_sups.clone(), r.weighted_l2.clone()],
            ))
        }
        3 => {
            let r = example3(height, truncation)?;
            Ok(Outcome::new(to_value(&r)?))
        }
        _ => {
            let r = example4(height, truncation)?;
            let body = json!({ "height": r.height, "truncation": r.truncation, "limits": r.limits });
            let col = |f: &dyn Fn(&toeplitz_core::scenarios::ArgumentLimits) -> f64| {
                r.limits.iter().map(f).collect::<Vec<f64>>()
            };
            Ok(Outcome::new(body).table(
                vec!["minus_infinity", "plus_infinity", "jump", "invertible_evidence"],
                vec![
                    col(&|l| l.minus_infinity),
                    col(&|l| l.plus_infinity),
                    col(&|l| l.jump),
                    col(&|l| l.invertible_evidence as u8 as f64),
                ],
            ))
        }
    }
}

/// Scalar leaves of a JSON value as `path,value` rows.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&join(prefix, k), x, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(k, x)| flatten(&join(prefix, &k.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render(cli: &Cli, out: Outcome) -> Result<String> {
    let config = to_value(cli)?;
    match cli.common.format {
        Format::Json => {
            let body = match out.body {
                Value::Object(mut m) => {
                    m.insert("config".into(), config);
                    Value::Object(m)
                }
                other => json!({ "config": config, "result": other }),
            };
            Ok(serde_json::to_string_pretty(&body)? + "\n")
        }
        Format::Csv => {
            let mut s = format!("# config: {config}\n");
            match out.table {
                Some(t) => {
                    let cols: Vec<(&str, &[f64])> =
                        t.headers.iter().copied().zip(t.columns.iter().map(Vec::as_slice)).collect();
                    let mut buf = Vec::new();
                    io::write_columns(&mut buf, &cols)?;
                    s.push_str(&String::from_utf8(buf)?);
                }
                None => {
                    let mut rows = Vec::new();
                    flatten("", &out.body, &mut rows);
                    s.push_str("field,value\n");
                    for (k, v) in rows {
                        writeln!(s, "{},{}", quote(&k), quote(&v))?;
                    }
                }
            }
            Ok(s)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<CoreError>() {
        Some(CoreError::Schema(_)) => EXIT_SCHEMA,
        Some(CoreError::Inconclusive(_)) => EXIT_INCONCLUSIVE,
        _ => EXIT_ERROR,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = run(&cli).and_then(|out| {
        let inconclusive = out.inconclusive;
        Ok((render(&cli, out)?, inconclusive))
    });
    match result {
        Ok((text, inconclusive)) => {
            print!("{text}");
            ExitCode::from(if inconclusive { EXIT_INCONCLUSIVE } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_cx("-1.5,2").unwrap().0, Complex64::new(-1.5, 2.0));
        assert_eq!(parse_cx("3").unwrap().0, Complex64::new(3.0, 0.0));
        assert!(parse_cx("1,x").is_err());
    }
}
