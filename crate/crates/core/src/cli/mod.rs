//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain or precondition error (and usage
//! errors), 2 I/O or parse error.

mod repro;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::capacities::{choquet, is_law_invariant_tol, is_submodular_tol, jp_recover_nu, Submodularity};
use crate::collapse::{
    choquet_symmetric_linearity, expectation_invariance_probe, meta_gap_certificate, translation_line_test,
    CollapseVerdict, Witness,
};
use crate::error::{Error, Result};
use crate::json::{read_doc, CapacityDoc, CrmDoc, LawDoc, PhiDoc, ProblemDoc, SCHEMA};
use crate::laws::{ingest_csv, DiscreteLaw, UniformSample};
use crate::optimizer::{
    antimonotone_improve, check_scenario, counterexample_scenario, solve, ExpectedOutcome, ScenarioName,
};
use crate::rearrange::{couple, hl_lower, hl_upper, CouplingKind};
use crate::riskmeasures::es;
use crate::scalar::Scalar;

use repro::repro_report;
pub use repro::{repro_lines, ReproLine, EXAMPLE_IDS};

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "LAWINV_TOL";

#[derive(Parser, Debug)]
#[command(name = "lawinv", version, about = "Law-invariant functionals on finite distributions")]
struct Cli {
    /// Seed for randomised probes.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Numerical tolerance.
    #[arg(long, global = true, env = TOL_ENV, default_value_t = 1e-9)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inspect or ingest a law.
    #[command(subcommand)]
    Law(LawCmd),
    /// Sharp bounds of E[X'Y] over X' with the law of X.
    Hl { x: PathBuf, y: PathBuf },
    /// Arrange the law of X on the atoms of the sample Y.
    Couple {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Antimonotone)]
        kind: KindArg,
    },
    /// Expected shortfall at level p.
    Es {
        x: PathBuf,
        #[arg(long)]
        p: f64,
    },
    /// Consistent risk measures.
    #[command(subcommand)]
    Crm(CrmCmd),
    /// Choquet integrals.
    #[command(subcommand)]
    Choquet(ChoquetCmd),
    /// Capacity diagnostics.
    #[command(subcommand)]
    Capacity(CapacityCmd),
    /// Collapse-to-the-mean detectors.
    #[command(subcommand)]
    Collapse(CollapseCmd),
    /// Budget-constrained optimisation.
    #[command(subcommand)]
    Optimize(OptimizeCmd),
    /// Recompute the worked example values.
    Repro {
        /// Example id or `all`.
        id: String,
    },
}

#[derive(Subcommand, Debug)]
enum LawCmd {
    /// Print a law given as JSON.
    Show { file: PathBuf },
    /// Read one value per line into an empirical law.
    Ingest { csv: PathBuf },
}

#[derive(Subcommand, Debug)]
enum CrmCmd {
    Eval { crm: PathBuf, x: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ChoquetCmd {
    Eval { capacity: PathBuf, x: PathBuf },
}

#[derive(Subcommand, Debug)]
enum CapacityCmd {
    Check {
        capacity: PathBuf,
        #[arg(long)]
        submodular: bool,
        #[arg(long)]
        law_invariant: bool,
    },
    JpRecover {
        capacity: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
    },
}

#[derive(Args, Debug)]
struct CollapseTol {
    /// Tolerance for collapsed verdicts.
    #[arg(long, default_value_t = 1e-7)]
    collapse_tol: f64,
}

#[derive(Subcommand, Debug)]
enum CollapseCmd {
    /// |φ(x0 + tZ) - φ(x0) - a t| over a grid of t.
    LineTest {
        phi: PathBuf,
        z: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x0: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        /// Comma-separated grid.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-5,-4,-3,-2,-1,0,1,2,3,4,5")]
        t: Vec<f64>,
        #[command(flatten)]
        ct: CollapseTol,
    },
    /// Gap certificate for a candidate minorant density y.
    MetaCert {
        phi: PathBuf,
        z: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        offset: f64,
        #[arg(long, default_value_t = 100)]
        k_max: usize,
        #[command(flatten)]
        ct: CollapseTol,
    },
    /// Symmetric-linearity search for a JP capacity.
    ChoquetTest {
        capacity: PathBuf,
        /// JSON array of extra samples, each {"uniform":[…]}.
        #[arg(long)]
        candidates: Option<PathBuf>,
        #[arg(long)]
        no_indicators: bool,
        #[command(flatten)]
        ct: CollapseTol,
    },
    /// Random equal-mean pairs.
    ExpectationProbe {
        phi: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[command(flatten)]
        ct: CollapseTol,
    },
}

#[derive(Subcommand, Debug)]
enum OptimizeCmd {
    Solve {
        problem: PathBuf,
    },
    Improve {
        problem: PathBuf,
        x: PathBuf,
    },
    Counterexample {
        #[arg(long)]
        scenario: String,
        /// Comma-separated pricing density.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        d: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Comonotone,
    Antimonotone,
}

struct Report {
    text: String,
    json: Value,
}

impl Report {
    fn new(text: String, json: Value) -> Self {
        Report { text, json }
    }
}

fn law_arg(path: &Path) -> Result<DiscreteLaw<f64>> {
    read_doc::<LawDoc>(path)?.to_law()
}

fn sample_arg(path: &Path) -> Result<UniformSample<f64>> {
    read_doc::<LawDoc>(path)?.to_sample()
}

fn law_json(x: &DiscreteLaw<f64>) -> Value {
    serde_json::to_value(LawDoc::from_law(x)).expect("law document serialises")
}

fn fmt_values(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

fn fmt_outcome(o: &ExpectedOutcome) -> String {
    format!(
        "no antimonotone optimum {}, non-antimonotone optimum {}",
        o.no_antimonotone_optimum, o.non_antimonotone_optimum
    )
}

fn fmt_law(x: &DiscreteLaw<f64>) -> String {
    x.atoms().map(|(v, p)| format!("({v}, {p})")).collect::<Vec<_>>().join(" ")
}

/// JSON number, or the strings "inf"/"-inf"/"nan".
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn witness_json(w: &Option<Witness<f64>>) -> Value {
    match w {
        None => Value::Null,
        Some(Witness::Law(x)) => json!({ "law": law_json(x) }),
        Some(Witness::Pair(x, y)) => json!({ "pair": [law_json(x), law_json(y)] }),
        Some(Witness::Sample(s)) => json!({ "sample": s.values() }),
    }
}

fn verdict_report(v: &CollapseVerdict<f64>) -> Report {
    let text = format!(
        "collapsed: {}\ngap: {}\nnotes: {}\n",
        v.collapsed, v.gap, v.notes
    );
    Report::new(
        text,
        json!({
            "collapsed": v.collapsed,
            "gap": num(v.gap),
            "witness": witness_json(&v.witness),
            "notes": v.notes,
        }),
    )
}

fn dispatch(cli: &Cli) -> Result<Report> {
    let tol = cli.tol;
    match &cli.command {
        Command::Law(LawCmd::Show { file }) => Ok(law_report(&law_arg(file)?)),
        Command::Law(LawCmd::Ingest { csv }) => Ok(law_report(&ingest_csv(csv)?)),
        Command::Hl { x, y } => {
            let (x, y) = (law_arg(x)?, law_arg(y)?);
            let (lo, hi, prod) = (hl_lower(&x, &y), hl_upper(&x, &y), x.mean() * y.mean());
            Ok(Report::new(
                format!("lower: {lo}\nupper: {hi}\nproduct_of_means: {prod}\n"),
                json!({ "lower": lo, "upper": hi, "product_of_means": prod }),
            ))
        }
        Command::Couple { x, y, kind } => {
            let kind = match kind {
                KindArg::Comonotone => CouplingKind::Comonotone,
                KindArg::Antimonotone => CouplingKind::Antimonotone,
            };
            let r = couple(&law_arg(x)?, &sample_arg(y)?, kind)?;
            let vals = r.x_rearranged.values();
            Ok(Report::new(
                format!(
                    "x_rearranged: {}\ninner_product: {}\n",
                    fmt_values(&vals),
                    r.inner_product
                ),
                json!({ "x_rearranged": vals, "inner_product": r.inner_product, "kind": r.kind }),
            ))
        }
        Command::Es { x, p } => {
            let v = es(&law_arg(x)?, *p)?;
            Ok(Report::new(format!("es: {v}\n"), json!({ "p": p, "es": v })))
        }
        Command::Crm(CrmCmd::Eval { crm, x }) => {
            let c = read_doc::<CrmDoc>(crm)?.to_crm()?;
            let (v, arg) = c.eval_argmin(&law_arg(x)?);
            Ok(Report::new(
                format!("value: {v}\nargmin_generator: {arg}\n"),
                json!({ "value": num(v), "argmin_generator": arg }),
            ))
        }
        Command::Choquet(ChoquetCmd::Eval { capacity, x }) => {
            let mu = read_doc::<CapacityDoc>(capacity)?.to_capacity()?;
            let c = choquet(&mu, &sample_arg(x)?)?;
            let layers: Vec<Value> = c.layer_trace.iter().map(|&(v, m)| json!([v, m])).collect();
            Ok(Report::new(
                format!("value: {}\n", c.value),
                json!({ "value": c.value, "layers": layers }),
            ))
        }
        Command::Capacity(CapacityCmd::Check {
            capacity,
            submodular,
            law_invariant,
        }) => {
            let mu = read_doc::<CapacityDoc>(capacity)?.to_capacity()?;
            let (all, mut text, mut out) = (!submodular && !law_invariant, String::new(), Map::new());
            let mono = mu.monotonicity_violation(tol)?;
            text.push_str(&format!("monotone: {}\n", mono.is_none()));
            out.insert("monotone".into(), json!(mono.is_none()));
            if all || *submodular {
                let s = is_submodular_tol(&mu, tol)?;
                text.push_str(&format!("submodular: {}\n", s.holds()));
                out.insert("submodular".into(), json!(s.holds()));
                if let Submodularity::Violated { a, b, excess } = s {
                    text.push_str(&format!("violation: A={a:#b} B={b:#b} excess={excess}\n"));
                    out.insert("violation".into(), json!({ "a": a, "b": b, "excess": excess }));
                }
            }
            if all || *law_invariant {
                let li = is_law_invariant_tol(&mu, tol)?;
                text.push_str(&format!("law_invariant: {li}\n"));
                out.insert("law_invariant".into(), json!(li));
            }
            Ok(Report::new(text, Value::Object(out)))
        }
        Command::Capacity(CapacityCmd::JpRecover { capacity, alpha }) => {
            let mu = read_doc::<CapacityDoc>(capacity)?.to_capacity()?;
            let nu = jp_recover_nu(&mu, *alpha)?;
            let table = nu.table()?;
            let text = table
                .iter()
                .enumerate()
                .map(|(a, v)| format!("nu({a:#b}) = {v}\n"))
                .collect();
            let values: Map<String, Value> = table
                .iter()
                .enumerate()
                .map(|(a, &v)| (a.to_string(), json!(v)))
                .collect();
            Ok(Report::new(text, json!({ "nu": { "kind": "explicit", "n": nu.n(), "values": values } })))
        }
        Command::Collapse(cmd) => collapse(cmd, cli.seed),
        Command::Optimize(cmd) => optimize(cmd, tol),
        Command::Repro { id } => {
            let (report, ok) = repro_report(id)?;
            if !ok {
                return Err(Error::Inconsistency(format!("repro {id}: a check failed")));
            }
            Ok(report)
        }
    }
}

fn law_report(x: &DiscreteLaw<f64>) -> Report {
    Report::new(
        format!(
            "atoms: {}\nmean: {}\nmin: {}\nmax: {}\n",
            fmt_law(x),
            x.mean(),
            x.min_value(),
            x.max_value()
        ),
        json!({ "law": law_json(x), "mean": x.mean(), "min": x.min_value(), "max": x.max_value() }),
    )
}

fn collapse(cmd: &CollapseCmd, seed: u64) -> Result<Report> {
    match cmd {
        CollapseCmd::LineTest { phi, z, x0, a, t, ct } => {
            let phi = read_doc::<PhiDoc>(phi)?.to_functional()?;
            let v = translation_line_test(phi.as_ref(), *x0, &law_arg(z)?, *a, t, ct.collapse_tol)?;
            Ok(verdict_report(&v))
        }
        CollapseCmd::MetaCert {
            phi,
            z,
            y,
            x0,
            offset,
            k_max,
            ct,
        } => {
            let phi = read_doc::<PhiDoc>(phi)?.to_functional()?;
            let v = meta_gap_certificate(phi.as_ref(), *x0, &law_arg(z)?, &law_arg(y)?, *offset, *k_max, ct.collapse_tol)?;
            Ok(verdict_report(&v))
        }
        CollapseCmd::ChoquetTest {
            capacity,
            candidates,
            no_indicators,
            ct,
        } => {
            let mu = read_doc::<CapacityDoc>(capacity)?.to_capacity()?;
            let extra = match candidates {
                Some(p) => read_doc::<Vec<LawDoc>>(p)?
                    .iter()
                    .map(LawDoc::to_sample)
                    .collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
            };
            let r = choquet_symmetric_linearity(&mu, &extra, !no_indicators, ct.collapse_tol)?;
            let mut rep = verdict_report(&r.verdict);
            if let Some(nu) = &r.recovered_nu {
                let t = nu.table()?;
                rep.text.push_str(&format!("recovered_nu: {t:?}\n"));
                rep.json["recovered_nu"] = json!(t);
            }
            Ok(rep)
        }
        CollapseCmd::ExpectationProbe { phi, trials, ct } => {
            let phi = read_doc::<PhiDoc>(phi)?.to_functional()?;
            let v = expectation_invariance_probe(phi.as_ref(), *trials, seed, ct.collapse_tol)?;
            Ok(verdict_report(&v))
        }
    }
}

fn optimize(cmd: &OptimizeCmd, tol: f64) -> Result<Report> {
    match cmd {
        OptimizeCmd::Solve { problem } => {
            let q = read_doc::<ProblemDoc>(problem)?.to_quadruple()?;
            let r = solve(&q)?;
            let trace: Vec<Value> = r
                .improvement_trace
                .iter()
                .map(|(c, v)| json!({ "candidate": c.values(), "value": num(*v) }))
                .collect();
            Ok(Report::new(
                format!(
                    "solution: {}\nvalue: {}\nantimonotone_with_d: {}\ngenerator: {}\n",
                    fmt_values(r.solution.values()),
                    r.value,
                    r.antimonotone_with_d,
                    r.generator
                ),
                json!({
                    "solution": r.solution.values(),
                    "value": num(r.value),
                    "antimonotone_with_d": r.antimonotone_with_d,
                    "generator": r.generator,
                    "improvement_trace": trace,
                }),
            ))
        }
        OptimizeCmd::Improve { problem, x } => {
            let q = read_doc::<ProblemDoc>(problem)?.to_quadruple()?;
            let x = sample_arg(x)?;
            let out = antimonotone_improve(&q, &x, tol)?;
            let (before, after) = (q.phi().eval_sample(&x), q.phi().eval_sample(&out));
            Ok(Report::new(
                format!("improved: {}\nvalue_before: {before}\nvalue_after: {after}\n", fmt_values(out.values())),
                json!({ "improved": out.values(), "value_before": num(before), "value_after": num(after) }),
            ))
        }
        OptimizeCmd::Counterexample { scenario, d } => {
            let name = ScenarioName::parse(scenario)?;
            let d = UniformSample::new(d.clone())?;
            let s = counterexample_scenario(name, &d)?;
            let c = check_scenario(&s, tol.max(f64::TOL))?;
            let matches = c.outcome == s.expected;
            Ok(Report::new(
                format!(
                    "scenario: {} ({name})\nz: {}\np: {}\nexpected: {}\nobserved: {}\nmatches: {matches}\nnotes: {}\n",
                    name.letter(),
                    fmt_values(s.z.values()),
                    s.quadruple.p(),
                    fmt_outcome(&s.expected),
                    fmt_outcome(&c.outcome),
                    c.notes
                ),
                json!({
                    "scenario": name,
                    "z": s.z.values(),
                    "p": s.quadruple.p(),
                    "expected": s.expected,
                    "observed": c.outcome,
                    "matches": matches,
                    "antimonotone_optimum": c.antimonotone_optimum.as_ref().map(|w| w.values().to_vec()),
                    "value": num(c.value),
                    "notes": c.notes,
                }),
            ))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Law(LawCmd::Show { .. }) => "law show",
        Command::Law(LawCmd::Ingest { .. }) => "law ingest",
        Command::Hl { .. } => "hl",
        Command::Couple { .. } => "couple",
        Command::Es { .. } => "es",
        Command::Crm(_) => "crm eval",
        Command::Choquet(_) => "choquet eval",
        Command::Capacity(CapacityCmd::Check { .. }) => "capacity check",
        Command::Capacity(CapacityCmd::JpRecover { .. }) => "capacity jp-recover",
        Command::Collapse(CollapseCmd::LineTest { .. }) => "collapse line-test",
        Command::Collapse(CollapseCmd::MetaCert { .. }) => "collapse meta-cert",
        Command::Collapse(CollapseCmd::ChoquetTest { .. }) => "collapse choquet-test",
        Command::Collapse(CollapseCmd::ExpectationProbe { .. }) => "collapse expectation-probe",
        Command::Optimize(OptimizeCmd::Solve { .. }) => "optimize solve",
        Command::Optimize(OptimizeCmd::Improve { .. }) => "optimize improve",
        Command::Optimize(OptimizeCmd::Counterexample { .. }) => "optimize counterexample",
        Command::Repro { .. } => "repro",
    }
}

/// Runs the tool with explicit output streams and returns the exit code.
pub fn run_with<I, A>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        let _ = writeln!(err, "error: tolerance must be positive, got {}", cli.tol);
        return 1;
    }
    match dispatch(&cli) {
        Ok(report) => {
            let written = if cli.json {
                let mut obj = Map::new();
                obj.insert("schema".into(), json!(SCHEMA));
                obj.insert("command".into(), json!(command_name(&cli.command)));
                match report.json {
                    Value::Object(m) => obj.extend(m),
                    other => {
                        obj.insert("result".into(), other);
                    }
                }
                let text = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialise");
                writeln!(out, "{text}")
            } else {
                out.write_all(report.text.as_bytes())
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    2
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs the tool on the process streams.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
