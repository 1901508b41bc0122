//! Command-line front end: argument definitions and command bodies. The
//! binary only forwards `std::env::args` here, so tests can drive it in-process.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::construct::{
    bk_build, bk_functional, bk_verify, ms_identity_sides, orlicz_from_a0, xm_chain, DEFAULT_DEPTH,
};
use crate::error::{Error, Result};
use crate::kruglov::{kruglov_charfn, kruglov_exact, kruglov_mc, ks_distance, DiscreteDistribution, DEFAULT_KMAX};
use crate::orlicz::{
    certify_p_convex, certify_q_concave, default_cert_grid, equivalent_on_unit, log_grid, luxemburg_fn_norm,
    luxemburg_seq_norm, OrliczFunction, OrliczSpec, QuasiConcaveFn, QuasiConcaveSpec, CERT_PASS,
};
use crate::rearrange::DecreasingStep;
use crate::report::VerificationReport;
use crate::verify::{run_suite, Suite, SuiteOptions};

/// Exit status when a pass/fail check or certificate fails.
pub const EXIT_FAILED: i32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "kruglov",
    version,
    about = "Orlicz norms, Kruglov transforms and numerical checks of their estimates"
)]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Trial count; overrides each command's default.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest convolution power kept in Kruglov transforms.
    #[arg(long, global = true, default_value_t = DEFAULT_KMAX)]
    pub kmax: usize,
    /// Number of dyadic levels in step-function constructions.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    /// Number of grid points for bands and certificates.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Record wall time in reports.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Luxemburg norm of a sequence or step function.
    Norm {
        /// JSON file with `M` and one of `x` (sequence) or `f` (step function); `-` reads stdin.
        input: PathBuf,
    },
    /// Exact Kruglov transform of a discrete law.
    Kruglov {
        /// JSON file with `atoms`; `-` reads stdin.
        input: PathBuf,
        /// Also sample the transform and report the KS distance.
        #[arg(long)]
        mc: bool,
        /// Tabulate the characteristic function on `LO:HI:N`.
        #[arg(long, value_name = "LO:HI:N", allow_hyphen_values = true)]
        charfn: Option<String>,
    },
    /// Constructions from quasi-concave and Orlicz functions.
    Construct {
        #[command(subcommand)]
        what: ConstructCmd,
    },
    /// Run a verification suite.
    Verify {
        /// first-orlicz, kws, rademacher, js, modified-ms, junge-pos, estimates, dilation or all.
        suite: String,
    },
    /// Convexity certificates on (0, 1].
    Certify {
        #[command(subcommand)]
        what: CertifyCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum ConstructCmd {
    /// Step function whose functional `∫ min{x, t x^d}` is equivalent to φ.
    Bk {
        /// JSON description of φ.
        input: PathBuf,
        /// Exponent d > 1.
        #[arg(long, default_value_t = 2.0)]
        d: f64,
    },
    /// The chain M → N_M, φ_M, x_M, M′ with its band report.
    XmChain {
        /// JSON file with `M` and `p`.
        input: PathBuf,
    },
    /// Orlicz function generated by a profile A₀ on (0, 1).
    FromA0 {
        /// JSON file with `A0`, `p` and optionally a sequence `a`.
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum CertifyCmd {
    /// Constant c with M(st) ≤ c s^p M(t).
    PConvex {
        input: PathBuf,
        #[arg(long)]
        p: f64,
    },
    /// Constant c with s^q M(t) ≤ c M(st).
    QConcave {
        input: PathBuf,
        #[arg(long)]
        q: f64,
    },
    /// Equivalence constant of two functions on (0, 1].
    Equivalent { first: PathBuf, second: PathBuf },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormInput {
    #[serde(rename = "M")]
    m: OrliczSpec,
    #[serde(default)]
    x: Option<Vec<f64>>,
    #[serde(default)]
    f: Option<DecreasingStep>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainInput {
    #[serde(rename = "M")]
    m: OrliczSpec,
    p: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FromA0Input {
    #[serde(rename = "A0")]
    a0: DecreasingStep,
    p: f64,
    #[serde(default)]
    a: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct ChainOutput<'a> {
    #[serde(rename = "N_M")]
    nm: &'a OrliczFunction,
    phi: &'a QuasiConcaveFn,
    sequences: &'a crate::construct::BkSequences,
    x: &'a DecreasingStep,
    #[serde(rename = "M_prime")]
    m_prime: &'a OrliczFunction,
    reports: &'a [VerificationReport],
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    Ok(fs::read_to_string(path)?)
}

fn parse<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_input(path)?).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn orlicz_from_file(path: &Path) -> Result<OrliczFunction> {
    OrliczFunction::from_json(&read_input(path)?)
}

/// `v` rounded to 12 significant digits, printed without trailing zeros.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if (1e-6..1e15).contains(&rounded.abs()) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("outputs serialize") + "\n"
}

fn reports_text(reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Json => reports.iter().map(|r| serde_json::to_string(r).expect("reports serialize") + "\n").collect(),
        Format::Csv => {
            let mut s = String::from(VerificationReport::csv_header());
            s.push('\n');
            for r in reports {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
            s
        }
    }
}

fn parse_charfn_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("charfn grid {spec:?} is not LO:HI:N"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
    let (lo, hi): (f64, f64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !(lo.is_finite() && hi.is_finite()) {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn cmd_norm(cli: &Cli, input: &Path) -> Result<Outcome> {
    let inp: NormInput = parse(input)?;
    let m = OrliczFunction::from_spec(inp.m)?;
    m.check_convex()?;
    let v = match (inp.x, inp.f) {
        (Some(x), None) => {
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Malformed("x has non-finite entries".into()));
            }
            luxemburg_seq_norm(&m, &x)
        }
        (None, Some(f)) => luxemburg_fn_norm(&m, &f),
        _ => return Err(Error::Malformed("give exactly one of `x` and `f`".into())),
    };
    let s = format_sig12(v);
    Ok(Outcome::ok(match cli.format {
        Format::Json => format!("{{\"norm\": {s}}}\n"),
        Format::Csv => format!("{s}\n"),
    }))
}

fn cmd_kruglov(cli: &Cli, input: &Path, mc: bool, charfn: Option<&str>) -> Result<Outcome> {
    let law: DiscreteDistribution = parse(input)?;
    let exact = kruglov_exact(&law, cli.kmax)?;
    let grid = charfn.map(parse_charfn_grid).transpose()?;
    let trials = cli.trials.unwrap_or(100_000) as u64;
    let sampled = if mc { Some(kruglov_mc(&law, cli.seed, trials)?) } else { None };
    let text = match cli.format {
        Format::Json => {
            let mut out = json!({ "exact": exact });
            if let Some(s) = &sampled {
                out["mc"] = json!({
                    "seed": cli.seed,
                    "trials": trials,
                    "law": s,
                    "ks_distance": ks_distance(&exact.law, s),
                });
            }
            if let Some(g) = &grid {
                let rows: Vec<Value> = g
                    .iter()
                    .map(|&t| {
                        let c = kruglov_charfn(&law, t);
                        json!({ "t": t, "re": c.re, "im": c.im })
                    })
                    .collect();
                out["charfn"] = Value::Array(rows);
            }
            to_json(&out)
        }
        Format::Csv => {
            let mut s = String::from("value,mass\n");
            for &(v, m) in exact.law.atoms() {
                s.push_str(&format!("{v},{m}\n"));
            }
            if let Some(g) = &grid {
                s.push_str("\nt,re,im\n");
                for &t in g {
                    let c = kruglov_charfn(&law, t);
                    s.push_str(&format!("{t},{},{}\n", c.re, c.im));
                }
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn finish_reports(cli: &Cli, reports: &mut [VerificationReport], started: Instant) {
    if cli.timings {
        let ms = started.elapsed().as_secs_f64() * 1e3;
        reports.iter_mut().for_each(|r| r.elapsed_ms = Some(ms));
    }
}

fn exit_for(reports: &[VerificationReport]) -> i32 {
    if reports.iter().all(VerificationReport::is_ok) {
        0
    } else {
        EXIT_FAILED
    }
}

fn cmd_construct(cli: &Cli, what: &ConstructCmd) -> Result<Outcome> {
    let started = Instant::now();
    match what {
        ConstructCmd::Bk { input, d } => {
            let spec: QuasiConcaveSpec = parse(input)?;
            let phi = QuasiConcaveFn::from_spec(spec)?;
            let bk = bk_build(&phi, *d, cli.depth)?;
            let grid = log_grid(1e-6, 1.0, cli.grid.unwrap_or(64));
            let mut report = [bk_verify(&phi, &bk, &grid)?];
            finish_reports(cli, &mut report, started);
            let code = exit_for(&report);
            let text = match cli.format {
                Format::Json => to_json(&json!({ "sequences": bk.sequences, "x": bk.x, "report": report[0] })),
                Format::Csv => {
                    let mut s = String::from("t,ratio\n");
                    for &t in &grid {
                        s.push_str(&format!("{t},{}\n", bk_functional(&bk.x, *d, t) / phi.eval(t)));
                    }
                    s
                }
            };
            Ok(Outcome { text, code })
        }
        ConstructCmd::XmChain { input } => {
            let inp: ChainInput = parse(input)?;
            let m = OrliczFunction::from_spec(inp.m)?;
            let mut chain = xm_chain(&m, inp.p, cli.depth, cli.trials.unwrap_or(100), cli.seed)?;
            finish_reports(cli, &mut chain.reports, started);
            let code = exit_for(&chain.reports);
            let text = match cli.format {
                Format::Json => to_json(&ChainOutput {
                    nm: &chain.nm,
                    phi: &chain.phi,
                    sequences: &chain.bk.sequences,
                    x: &chain.bk.x,
                    m_prime: &chain.m_prime,
                    reports: &chain.reports,
                }),
                Format::Csv => reports_text(&chain.reports, Format::Csv),
            };
            Ok(Outcome { text, code })
        }
        ConstructCmd::FromA0 { input } => {
            let inp: FromA0Input = parse(input)?;
            let m = orlicz_from_a0(&inp.a0, inp.p)?;
            let grid = log_grid(1e-3, 1e3, cli.grid.unwrap_or(64));
            let text = match cli.format {
                Format::Json => {
                    let mut out = json!({
                        "M": m,
                        "values": grid.iter().map(|&t| [t, m.eval(t)]).collect::<Vec<_>>(),
                    });
                    if let Some(a) = &inp.a {
                        let (lhs, rhs) = ms_identity_sides(&inp.a0, a, inp.p)?;
                        out["ms_identity"] = json!({ "tensor_norm": lhs, "sequence_norm": rhs });
                    }
                    to_json(&out)
                }
                Format::Csv => {
                    let mut s = String::from("t,M\n");
                    for &t in &grid {
                        s.push_str(&format!("{t},{}\n", m.eval(t)));
                    }
                    s
                }
            };
            Ok(Outcome::ok(text))
        }
    }
}

fn cmd_verify(cli: &Cli, suite: &str) -> Result<Outcome> {
    let suite: Suite = suite.parse()?;
    let opts = SuiteOptions { seed: cli.seed, trials: cli.trials, kmax: cli.kmax };
    let groups = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut reports = Vec::new();
    for s in groups {
        let started = Instant::now();
        let mut rs = run_suite(s, &opts)?;
        finish_reports(cli, &mut rs, started);
        reports.extend(rs);
    }
    Ok(Outcome { code: exit_for(&reports), text: reports_text(&reports, cli.format) })
}

fn cmd_certify(cli: &Cli, what: &CertifyCmd) -> Result<Outcome> {
    let grid = cli.grid.map_or_else(default_cert_grid, |n| log_grid(1e-6, 1.0, n));
    let (value, pass) = match what {
        CertifyCmd::PConvex { input, p } => {
            let c = certify_p_convex(&orlicz_from_file(input)?, *p, &grid)?;
            (json!({ "kind": "p-convex", "p": p, "certificate": c }), c.passes(CERT_PASS))
        }
        CertifyCmd::QConcave { input, q } => {
            let c = certify_q_concave(&orlicz_from_file(input)?, *q, &grid)?;
            (json!({ "kind": "q-concave", "q": q, "certificate": c }), c.passes(CERT_PASS))
        }
        CertifyCmd::Equivalent { first, second } => {
            let c = equivalent_on_unit(&orlicz_from_file(first)?, &orlicz_from_file(second)?, &grid)?;
            (json!({ "kind": "equivalent", "constant": c }), true)
        }
    };
    let text = match cli.format {
        Format::Json => to_json(&json!({ "pass": pass, "result": value })),
        Format::Csv => format!("pass\n{pass}\n"),
    };
    Ok(Outcome { text, code: if pass { 0 } else { EXIT_FAILED } })
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Norm { input } => cmd_norm(cli, input),
        Command::Kruglov { input, mc, charfn } => cmd_kruglov(cli, input, *mc, charfn.as_deref()),
        Command::Construct { what } => cmd_construct(cli, what),
        Command::Verify { suite } => cmd_verify(cli, suite),
        Command::Certify { what } => cmd_certify(cli, what),
    }
}

/// Parses `args`, runs the command and returns the exit status. Results go
/// to `out` (or the `--out` file), diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let outcome = dispatch(&cli).and_then(|o| {
        match &cli.out {
            Some(path) => fs::write(path, &o.text)?,
            None => out.write_all(o.text.as_bytes())?,
        }
        Ok(o.code)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
