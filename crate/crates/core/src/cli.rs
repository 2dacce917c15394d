//! Command-line front end.
//!
//! Exit statuses: 0 when the query is answered positively (separated,
//! holds, local, pass), 1 when it is answered negatively, 2 on usage or
//! input errors.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bell::{
    behavior_from_lhv, chsh_value, lhv_membership, max_chsh, no_signalling_check, parse_behavior,
    pr_box_variant, quantum_causality_audit, singlet_behavior, Behavior, ChshVariant, LhvModel,
    LOCAL_BOUND, STANDARD_ANGLES,
};
use crate::distributions::{
    causal_completeness_check, causal_markov_check, compatible, graphoid_audit, parse_distribution,
    random_compatible, reichenbach_check, JointTable, DEFAULT_EPS,
};
use crate::graph::{parse_dag, CondQuery, Dag};
use crate::report::{fmt_real, AuditReport};
use crate::separation::{compare_criteria, d_separated, q_separated};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Hidden-variable range of models drawn by `gen random-lhv`.
const RANDOM_LHV_LAMBDAS: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "causal-bell", version, about = "Causal DAGs, separation criteria and Bell-scenario checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// d-separation of X and Y given Z.
    Dsep(QueryArgs),
    /// q-separation of X and Y given Z.
    Qsep(QueryArgs),
    /// d- versus q-separation over every query on the graph.
    Compare {
        dag: PathBuf,
        #[arg(long)]
        csv: bool,
    },
    /// Local Markov compatibility of a distribution with a DAG.
    Compat(AuditArgs),
    /// Causal Markov condition.
    Markov(AuditArgs),
    /// Causal completeness.
    Complete(AuditArgs),
    /// Reichenbach's common-cause principle for the pair X, Y.
    Rpcc {
        dag: PathBuf,
        dist: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = DEFAULT_EPS, value_parser = parse_eps)]
        eps: f64,
    },
    /// Sampled graphoid-axiom audit of a distribution.
    Graphoid {
        dist: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_EPS, value_parser = parse_eps)]
        eps: f64,
        #[arg(long)]
        csv: bool,
    },
    /// CHSH values of a behavior.
    BellChsh {
        behavior: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..8))]
        variant: Option<u8>,
        #[arg(long, default_value_t = DEFAULT_EPS, value_parser = parse_eps)]
        eps: f64,
    },
    /// Local hidden-variable membership of a behavior.
    BellMember(BehaviorArgs),
    /// No-signalling check of a behavior.
    BellNosig(BehaviorArgs),
    /// Quantum causality condition on the Bell DAG.
    BellQcc(BehaviorArgs),
    /// Writes a canonical input file.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct QueryArgs {
    dag: PathBuf,
    /// Comma-separated node names.
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// Comma-separated conditioning set; empty means ∅.
    #[arg(long, default_value = "")]
    z: String,
}

#[derive(Debug, Args)]
struct AuditArgs {
    dag: PathBuf,
    dist: PathBuf,
    #[arg(long, default_value_t = DEFAULT_EPS, value_parser = parse_eps)]
    eps: f64,
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct BehaviorArgs {
    behavior: PathBuf,
    #[arg(long, default_value_t = DEFAULT_EPS, value_parser = parse_eps)]
    eps: f64,
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    BellDag,
    Singlet,
    PrBox,
    RandomLhv,
    RandomCompatible,
}

#[derive(Debug, Args)]
struct GenArgs {
    kind: GenKind,
    /// DAG file for `random-compatible`.
    dag: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Four radians: θ0,θ1,φ0,φ1.
    #[arg(long, value_parser = parse_angles, allow_hyphen_values = true)]
    angles: Option<[f64; 4]>,
    /// PR-box variant.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..8))]
    variant: Option<u8>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_eps(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("tolerance must be positive, got {s}"))
    }
}

fn parse_angles(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c, d] = parts.as_slice() else {
        return Err(format!("expected four comma-separated angles, got `{s}`"));
    };
    let mut out = [0.0; 4];
    for (slot, p) in out.iter_mut().zip([a, b, c, d]) {
        *slot = p
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| format!("invalid angle `{p}`"))?;
    }
    Ok(out)
}

fn split_names(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn verdict(positive: bool, stdout: String) -> Self {
        Outcome {
            status: if positive { EXIT_POSITIVE } else { EXIT_NEGATIVE },
            stdout,
            stderr: String::new(),
        }
    }

    fn error(message: String) -> Self {
        Outcome {
            status: EXIT_ERROR,
            stdout: String::new(),
            stderr: message,
        }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    status: EXIT_POSITIVE,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome::error(text),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(outcome) => outcome,
        Err(e) => Outcome::error(format!("error: {e:#}\n")),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_dag(path: &Path) -> Result<Dag> {
    parse_dag(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_dist(path: &Path) -> Result<JointTable> {
    parse_distribution(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_behavior(path: &Path) -> Result<Behavior> {
    parse_behavior(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn audit_outcome(report: &AuditReport, csv: bool) -> Outcome {
    let text = if csv { report.to_csv() } else { report.to_table() };
    Outcome::verdict(report.passed(), text)
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Dsep(q) => separation(q, false),
        Command::Qsep(q) => separation(q, true),
        Command::Compare { dag, csv } => {
            let g = load_dag(&dag)?;
            let report = compare_criteria(&g)?;
            let text = if csv { report.to_csv() } else { report.to_table() };
            let agree = report.disagreements().next().is_none();
            Ok(Outcome::verdict(agree, text))
        }
        Command::Compat(a) => graph_audit(a, compatible),
        Command::Markov(a) => graph_audit(a, causal_markov_check),
        Command::Complete(a) => graph_audit(a, causal_completeness_check),
        Command::Rpcc { dag, dist, x, y, eps } => {
            let g = load_dag(&dag)?;
            let p = load_dist(&dist)?;
            let verdict = reichenbach_check(&p, &g, &x, &y, eps)?;
            Ok(Outcome::verdict(verdict.consistent(), format!("{verdict}\n")))
        }
        Command::Graphoid {
            dist,
            trials,
            seed,
            eps,
            csv,
        } => {
            let p = load_dist(&dist)?;
            let report = graphoid_audit(&p, eps, trials, seed)?;
            let text = if csv { report.to_csv() } else { report.to_table() };
            Ok(Outcome::verdict(report.passed(), text))
        }
        Command::BellChsh { behavior, variant, eps } => {
            let b = load_behavior(&behavior)?;
            let bound = LOCAL_BOUND + 16.0 * eps;
            let mut out = String::new();
            let positive = match variant.and_then(|v| ChshVariant::new(v.into())) {
                Some(v) => {
                    let s = chsh_value(&b, v);
                    out.push_str(&format!("variant {v}: S = {}\n", fmt_real(s)));
                    s <= bound
                }
                None => {
                    for v in ChshVariant::ALL {
                        out.push_str(&format!("variant {v}: S = {}\n", fmt_real(chsh_value(&b, v))));
                    }
                    let (v, s) = max_chsh(&b);
                    out.push_str(&format!("max: variant {v}, S = {}\n", fmt_real(s)));
                    s <= bound
                }
            };
            Ok(Outcome::verdict(positive, out))
        }
        Command::BellMember(a) => {
            let b = load_behavior(&a.behavior)?;
            let verdict = lhv_membership(&b, a.eps)?;
            let text = if a.csv { verdict.to_csv() } else { verdict.to_text() };
            Ok(Outcome::verdict(verdict.is_local(), text))
        }
        Command::BellNosig(a) => {
            let b = load_behavior(&a.behavior)?;
            Ok(audit_outcome(&no_signalling_check(&b, a.eps)?, a.csv))
        }
        Command::BellQcc(a) => {
            let b = load_behavior(&a.behavior)?;
            Ok(audit_outcome(&quantum_causality_audit(&b, a.eps)?, a.csv))
        }
        Command::Gen(a) => generate(a),
    }
}

fn separation(q: QueryArgs, quantum: bool) -> Result<Outcome> {
    let g = load_dag(&q.dag)?;
    let query = CondQuery::new(&split_names(&q.x), &split_names(&q.y), &split_names(&q.z));
    let verdict = if quantum {
        q_separated(&g, &query)?
    } else {
        d_separated(&g, &query)?
    };
    Ok(Outcome::verdict(verdict.separated, format!("{}\n", verdict.render(&g))))
}

fn graph_audit(
    a: AuditArgs,
    check: fn(&JointTable, &Dag, f64) -> Result<AuditReport, crate::distributions::DistError>,
) -> Result<Outcome> {
    let g = load_dag(&a.dag)?;
    let p = load_dist(&a.dist)?;
    Ok(audit_outcome(&check(&p, &g, a.eps)?, a.csv))
}

fn generate(a: GenArgs) -> Result<Outcome> {
    let name = a.kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let require_seed = || a.seed.ok_or_else(|| anyhow!("gen {name} requires --seed"));
    let text = match a.kind {
        GenKind::BellDag => crate::bell::bell_dag().to_text(),
        GenKind::Singlet => {
            let [t0, t1, p0, p1] = a.angles.unwrap_or(STANDARD_ANGLES);
            singlet_behavior(t0, t1, p0, p1).to_text()
        }
        GenKind::PrBox => pr_box_variant(a.variant.unwrap_or(0).into()).to_text(),
        GenKind::RandomLhv => {
            let mut rng = ChaCha8Rng::seed_from_u64(require_seed()?);
            let model = LhvModel::random(&mut rng, RANDOM_LHV_LAMBDAS);
            let mut out = String::new();
            for line in model.to_text().lines() {
                out.push_str(&format!("# {line}\n"));
            }
            out.push_str(&behavior_from_lhv(&model).to_text());
            out
        }
        GenKind::RandomCompatible => {
            let seed = require_seed()?;
            let path = a
                .dag
                .as_deref()
                .ok_or_else(|| anyhow!("gen random-compatible requires a DAG file"))?;
            let g = load_dag(path)?;
            random_compatible(&g, seed)?.to_text()
        }
    };
    match &a.out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
            Ok(Outcome::verdict(true, String::new()))
        }
        None => Ok(Outcome::verdict(true, text)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_values() {
        assert_eq!(parse_eps("1e-9"), Ok(1e-9));
        assert!(parse_eps("0").is_err());
        assert!(parse_eps("-1").is_err());
        assert!(parse_eps("nan").is_err());
        assert_eq!(parse_angles("0, 1.5,-2,3"), Ok([0.0, 1.5, -2.0, 3.0]));
        assert!(parse_angles("0,1,2").is_err());
        assert!(parse_angles("0,1,2,x").is_err());
        assert_eq!(split_names(""), Vec::<String>::new());
        assert_eq!(split_names("A, B,"), ["A", "B"]);
    }

    #[test]
    fn help_and_unknown_verbs() {
        assert_eq!(run(["causal-bell", "--help"]).status, EXIT_POSITIVE);
        let o = run(["causal-bell", "frobnicate"]);
        assert_eq!(o.status, EXIT_ERROR);
        assert!(o.stderr.contains("frobnicate"));
    }
}
