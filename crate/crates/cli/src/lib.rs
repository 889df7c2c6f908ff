//! Command-line front end: every subcommand prints one JSON document.
//!
//! Exit codes: 0 on success, 2 on usage errors and precondition violations,
//! 1 on internal failures (e.g. quadrature that does not converge).

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sbo_core::juhl::{diff_locus, in_l_even, juhl_operator, sbo_dim_conf, verify_juhl_equivariance};
use sbo_core::kernel::{kernel_eval, BumpSpec, KernelConfig, QuadratureControls, TestFunction};
use sbo_core::rankin_cohen::{
    cg_decompose, cg_ranks, derivative_basis, omega_classify, rc_operator, sbo_dim_sl2, singular_basis, verify_intertwining,
};
use sbo_core::tables::{FamilyFilter, PairTables};
use sbo_core::{Error, Rational};

#[derive(Parser, Debug)]
#[command(name = "sbo", version, about = "Symmetry breaking operators: construction, classification and checks")]
struct Cli {
    /// Output rendering; JSON is the stable contract.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    group: Group,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Group {
    /// Rankin–Cohen operators for SL(2) tensor products
    #[command(subcommand)]
    Sl2(Sl2Cmd),
    /// Conformal pair O(n+1,1) ⊃ O(n,1)
    #[command(subcommand)]
    Conf(ConfCmd),
    /// Classification tables of symmetric pairs
    #[command(subcommand)]
    Pairs(PairsCmd),
}

fn rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

/// Exact rational or decimal float.
fn real(s: &str) -> Result<f64, String> {
    if let Ok(q) = s.parse::<Rational>() {
        return Ok(q.to_f64());
    }
    s.trim().parse::<f64>().map_err(|_| format!("not a number: {s:?}"))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Basis {
    Generic,
    Singular,
    Derivative,
}

#[derive(Subcommand, Debug)]
enum Sl2Cmd {
    /// dim H(λ₁, λ₂, λ₃) and the parameter class
    Dim {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        l1: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        l2: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        l3: Rational,
    },
    /// Rankin–Cohen operator of order a, or a basis at a singular point
    Rc {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        l1: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        l2: Rational,
        #[arg(long)]
        a: u32,
        #[arg(long, value_enum, default_value_t = Basis::Generic)]
        basis: Basis,
    },
    /// Exact intertwining check of the Rankin–Cohen operator
    Verify {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        l1: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        l2: Rational,
        #[arg(long)]
        a: u32,
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
    },
    /// Clebsch–Gordan decomposition of Pol_m ⊗ Pol_n
    Cg {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
    },
}

#[derive(Subcommand, Debug)]
enum ConfCmd {
    /// dim H(λ, ν)
    Dim {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        lambda: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        nu: Rational,
    },
    /// The differential operator C̃_{λ,ν}
    Juhl {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        lambda: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        nu: Rational,
    },
    /// Exact equivariance check of C̃_{λ,ν}
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        lambda: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        nu: Rational,
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
    },
    /// Quadrature value of the integral operator A_{λ,ν}
    Kernel {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        nu: f64,
        /// JSON file with optional "quadrature", "test_function" and "y"
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum PairsCmd {
    /// Finite and bounded multiplicity of a symmetric pair
    Query {
        #[arg(long)]
        pair: String,
        /// Parameter binding such as n=3 (repeatable)
        #[arg(long = "set", value_parser = binding)]
        set: Vec<(String, i64)>,
    },
    /// Families of the classification
    List {
        #[arg(long, value_enum, default_value_t = Filter::All)]
        filter: Filter,
    },
    /// Row of the complex table for a complex simple algebra
    Complex {
        #[arg(long)]
        g: String,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Filter {
    Pp,
    Bb,
    All,
}

fn binding(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v = v.trim().parse().map_err(|_| format!("not an integer: {v:?}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct KernelFile {
    #[serde(default)]
    quadrature: QuadratureControls,
    #[serde(default)]
    test_function: BumpSpec,
    #[serde(default)]
    y: Option<Vec<f64>>,
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    error: String,
    hint: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let hint = match &e {
            Error::NotSingular { .. } => "singular and derivative bases exist only on the singular set; see `sl2 dim`",
            Error::NotDifferentialLocus(_) => "nu - lambda must be 0, 2, 4, ...",
            Error::Divergent(_) => "the integral converges for lambda > nu and lambda + nu > n - 1",
            Error::NoConvergence { .. } => "raise quadrature.refinement or loosen quadrature.tolerance",
            Error::Descriptor(_) => "descriptors look like (sl(n+1,R), gl(n,R)); bind parameters with --set n=3",
            Error::Table(_) => "check the table file named by SBO_TABLE_PATH",
            _ => "see `sbo --help`",
        };
        Failure { code: if e.is_precondition() { 2 } else { 1 }, error: e.to_string(), hint: hint.to_string() }
    }
}

fn usage(error: impl Into<String>, hint: impl Into<String>) -> Failure {
    Failure { code: 2, error: error.into(), hint: hint.into() }
}

fn report_json(r: &sbo_core::Report) -> Value {
    json!({ "passed": r.passed(), "checked": r.checked, "failures": r.failures.iter().take(10).collect::<Vec<_>>() })
}

fn sl2(cmd: Sl2Cmd) -> Result<Value, Failure> {
    Ok(match cmd {
        Sl2Cmd::Dim { l1, l2, l3 } => json!({ "dim": sbo_dim_sl2(&l1, &l2, &l3), "class": omega_classify(&l1, &l2, &l3) }),
        Sl2Cmd::Rc { l1, l2, a, basis } => {
            let l3 = &(&l1 + &l2) + &Rational::from_int(2 * a as i64);
            let ops = match basis {
                Basis::Generic => vec![rc_operator(&l1, &l2, a)],
                Basis::Singular => singular_basis(&l1, &l2, &l3)?.to_vec(),
                Basis::Derivative => derivative_basis(&l1, &l2, &l3)?.to_vec(),
            };
            let basis = match basis {
                Basis::Generic => "generic",
                Basis::Singular => "singular",
                Basis::Derivative => "derivative",
            };
            json!({ "l1": l1, "l2": l2, "l3": l3, "basis": basis, "operators": ops })
        }
        Sl2Cmd::Verify { l1, l2, a, max_degree } => {
            let l3 = &(&l1 + &l2) + &Rational::from_int(2 * a as i64);
            let op = rc_operator(&l1, &l2, a);
            let mut v = report_json(&verify_intertwining(&op, &l1, &l2, &l3, max_degree)?);
            v["zero_operator"] = json!(op.is_zero());
            v
        }
        Sl2Cmd::Cg { m, n } => {
            let ranks = cg_ranks(m, n);
            let components = cg_decompose(m, n);
            let total: u32 = components.iter().map(|c| c.target_dim).sum();
            json!({ "components": components, "image_ranks": ranks.image_ranks, "joint_rank": ranks.joint_rank, "total_dim": total })
        }
    })
}

fn conf(cmd: ConfCmd) -> Result<Value, Failure> {
    Ok(match cmd {
        ConfCmd::Dim { lambda, nu } => json!({ "dim": sbo_dim_conf(&lambda, &nu), "l_even": in_l_even(&lambda, &nu) }),
        ConfCmd::Juhl { n, lambda, nu } => serde_json::to_value(juhl_operator(n, &lambda, &nu)?).expect("serializable"),
        ConfCmd::Verify { n, lambda, nu, max_degree } => {
            if !diff_locus(&lambda, &nu) {
                return Err(Error::NotDifferentialLocus((&nu - &lambda).to_string()).into());
            }
            report_json(&verify_juhl_equivariance(n, &lambda, &nu, max_degree)?)
        }
        ConfCmd::Kernel { n, lambda, nu, config } => {
            let file: KernelFile = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("{}: {e}", path.display()), "pass a readable JSON file"))?;
                    serde_json::from_str(&text).map_err(|e| usage(format!("bad kernel config: {e}"), "keys: quadrature, test_function, y"))?
                }
                None => KernelFile::default(),
            };
            let cfg = KernelConfig { n, lambda, nu, quadrature: file.quadrature };
            cfg.check()?;
            let f = TestFunction::from_spec(n, &file.test_function)?;
            let y = file.y.unwrap_or_else(|| vec![0.0; n - 1]);
            serde_json::to_value(kernel_eval(&cfg, &f, &y)?).expect("serializable")
        }
    })
}

fn pairs(cmd: PairsCmd) -> Result<Value, Failure> {
    let tables = PairTables::from_env()?;
    Ok(match cmd {
        PairsCmd::Query { pair, set } => {
            let bindings: BTreeMap<String, i64> = set.into_iter().collect();
            serde_json::to_value(tables.query(&pair, &bindings)?).expect("serializable")
        }
        PairsCmd::List { filter } => {
            let filter = match filter {
                Filter::Pp => FamilyFilter::Pp,
                Filter::Bb => FamilyFilter::Bb,
                Filter::All => FamilyFilter::All,
            };
            json!({ "version": tables.version, "families": tables.list_families(filter) })
        }
        PairsCmd::Complex { g } => json!({ "record": tables.complex_form_lookup(&g)? }),
    })
}

/// Minimal human-readable rendering: one `key: value` line per top-level field.
fn render_text(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}: {s}"),
                other => format!("{k}: {other}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        other => other.to_string(),
    }
}

/// Runs one invocation; `argv[0]` is the program name. Returns the exit code and stdout.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let code = if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
                return (code, e.render().to_string());
            }
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("usage error").trim_start_matches("error: ").to_string();
            let body = json!({ "error": first, "hint": "see `sbo --help` for the flag grammar" });
            return (2, body.to_string());
        }
    };
    let format = cli.format;
    let result = match cli.group {
        Group::Sl2(c) => sl2(c),
        Group::Conf(c) => conf(c),
        Group::Pairs(c) => pairs(c),
    };
    match result {
        Ok(v) => (0, if format == Format::Text { render_text(&v) } else { v.to_string() }),
        Err(f) => (f.code, json!({ "error": f.error, "hint": f.hint }).to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sbo(args: &str) -> (i32, Value) {
        let argv = std::iter::once("sbo").chain(args.split_whitespace());
        let (code, out) = run(argv);
        (code, serde_json::from_str(&out).unwrap_or(Value::String(out)))
    }

    #[test]
    fn dim_examples() {
        assert_eq!(sbo("sl2 dim --l1 0 --l2 0 --l3 2"), (0, json!({"dim": 2, "class": "omega_singular"})));
        assert_eq!(sbo("sl2 dim --l1 2 --l2 2 --l3 5"), (0, json!({"dim": 0, "class": "not_in_omega"})));
        assert_eq!(sbo("conf dim --lambda 1 --nu 1"), (0, json!({"dim": 1, "l_even": false})));
        assert_eq!(sbo("conf dim --lambda -2 --nu 0"), (0, json!({"dim": 2, "l_even": true})));
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, v) = sbo("sl2 dim --l1 0 --l2 0");
        assert_eq!(code, 2);
        assert!(v["error"].is_string() && v["hint"].is_string());
        assert_eq!(sbo("sl2 dim --l1 0.5 --l2 0 --l3 1").0, 2);
        assert_eq!(sbo("sl2 dim --l1 0 --l2 0 --l3 1 --bogus 3").0, 2);
        assert_eq!(sbo("conf juhl --n 3 --lambda 1 --nu 2").0, 2);
        assert_eq!(sbo("sl2 rc --l1 1 --l2 1 --a 1 --basis singular").0, 2);
        assert_eq!(sbo("conf kernel --n 2 --lambda 1 --nu 2").0, 2);
        assert_eq!(sbo("pairs query --pair (sl(3,R)").0, 2);
    }

    #[test]
    fn juhl_and_verify() {
        let (code, v) = sbo("conf juhl --n 3 --lambda 1 --nu 3");
        assert_eq!(code, 0);
        assert_eq!(v["restrict"], "x_n=0");
        let (code, v) = sbo("conf verify --n 3 --lambda 1 --nu 3 --max-degree 4");
        assert_eq!((code, v["passed"].clone()), (0, json!(true)));
        let (code, v) = sbo("sl2 verify --l1 1/2 --l2 3 --a 2 --max-degree 4");
        assert_eq!((code, v["passed"].clone()), (0, json!(true)));
    }

    #[test]
    fn pairs_commands() {
        let (code, v) = sbo("pairs query --pair (sl(n+1,R),gl(n,R)) --set n=3");
        assert_eq!((code, v["matched"].clone()), (0, json!("F3")));
        let (code, v) = sbo("pairs list --filter bb");
        assert_eq!(code, 0);
        assert_eq!(v["families"].as_array().unwrap().len(), 7);
        let (_, v) = sbo("pairs complex --g sl(4,C)");
        assert_eq!(v["record"]["instances"][0]["g_real"], "su*(4)");
    }

    #[test]
    fn text_format() {
        let (code, out) = run(["sbo", "--format", "text", "conf", "dim", "--lambda", "0", "--nu", "0"]);
        assert_eq!(code, 0);
        assert_eq!(out, "dim: 2\nl_even: true");
    }

    #[test]
    fn kernel_default_config() {
        let (code, v) = sbo("conf kernel --n 2 --lambda 4 --nu 0.5");
        assert_eq!(code, 0, "{v}");
        assert!(v["value"].as_f64().unwrap() > 0.0);
        assert!(v["cells"].as_u64().unwrap() > 0);
    }
}
