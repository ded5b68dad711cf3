//! Command-line front end: q-character computations and verifications
//! with reproducible JSON or plain-text reports.
//!
//! Exit codes: 0 when the command (and any verification it performs)
//! succeeds, 1 on a verification failure or computational error, 2 on a
//! usage or input error.

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::fmt::Write as _;

use qchar::asymstd::{change_of_basis_blocks, TPsi};
use qchar::borelneg::{eigenvector_location_check, linear_oracle_check};
use qchar::closedforms::{
    chi_infinity, prefund_limit_qchar, qchar_multiplicativity_check, random_negative_lweight,
    standard_qchar, verify_decomposition,
};
use qchar::closedforms::order_compatibility_check;
use qchar::config::{
    parse_qmode, parse_window, Format, RunConfig, SYMBOLIC_DIM_BOUND,
};
use qchar::error::{Error, Result};
use qchar::lweight::psi_of;
use qchar::parse::parse_lweight_expr;
use qchar::qscalar::QScalar;
use qchar::qseries::{stabilization_check, AMonomial, QCharSeries};
use qchar::report::{envelope, render_json, to_value};
use qchar::tensorsim::{
    lweight_decomposition, make_eval_module, tensor_bounded, EvalModule, QMode,
    DEFAULT_DIM_BOUND,
};
use rand_chacha::rand_core::SeedableRng;

#[derive(Parser)]
#[command(
    name = "qchar",
    version,
    about = "Exact q-characters, asymptotic modules and their verifications"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Tracked spectral window of A-variable exponents, as `rmin:rmax`.
    #[arg(
        long,
        global = true,
        default_value = "-16:0",
        allow_hyphen_values = true,
        env = "QCHAR_WINDOW"
    )]
    window: String,

    /// Total-degree cap of tracked series.
    #[arg(long, global = true, default_value_t = 6, env = "QCHAR_DEGCAP")]
    degcap: u32,

    /// Flip depth of asymptotic-module truncations.
    #[arg(long, global = true, default_value_t = 2, env = "QCHAR_DEPTH")]
    depth: u32,

    /// Arithmetic mode: `symbolic`, or `q0a:q0b` for dual rational
    /// specialization (two exact rationals away from 0 and ±1).
    #[arg(
        long,
        global = true,
        default_value = "symbolic",
        allow_hyphen_values = true,
        env = "QCHAR_Q"
    )]
    q: String,

    /// Seed for every randomized property check.
    #[arg(long, global = true, default_value_t = 0, env = "QCHAR_SEED")]
    seed: u64,

    /// Output format.
    #[arg(
        long,
        global = true,
        value_enum,
        default_value_t = Format::Text,
        env = "QCHAR_FORMAT"
    )]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the normalized q-character of an l-weight expression.
    ///
    /// Pure Y-strings (products of `Y[r]` with positive exponents) give
    /// the finite standard character exactly; any other negative
    /// l-weight gives the limit character truncated to the window.
    Qchar {
        /// Expression such as `Y[-1]*Y[-3]` or `Psi[0]^-1`.
        expr: String,
    },

    /// Stabilize the standard-sequence characters of an inverse
    /// prefundamental on the window and compare with the closed form.
    Limit {
        /// Even spectral exponent of the prefundamental.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        r: i64,
        /// Give up after this many terms of the sequence.
        #[arg(long, default_value_t = 24)]
        nmax: u32,
    },

    /// Expand the standard character of the inverse prefundamental into
    /// simple characters over gapped tuples and print the decomposition.
    Decompose,

    /// Run one verification target; exit 0 only if it passes.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },

    /// Build a tensor product of evaluation modules and print its
    /// l-weight decomposition.
    Simulate {
        /// Comma-separated factors `k:s` (string length and spectral
        /// exponent), for example `1:-1,1:-3`.
        factors: String,
        /// Loop-generator truncation order (derived from the spectral
        /// span when omitted).
        #[arg(long)]
        rmax: Option<usize>,
    },

    /// Print the l-weight structure of the induced module: located
    /// eigenvectors and the change-of-basis blocks of the asymptotic
    /// module.
    Induce {
        /// Word-degree cap of the induced truncation.
        #[arg(long = "D", default_value_t = 4)]
        cap: u32,
        /// Number of slot families in the ambient window.
        #[arg(long, default_value_t = 3)]
        slots: u32,
    },
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// Decomposition of the standard character into simple characters.
    Decomp,
    /// Multiplicativity of standard characters and product-compatibility
    /// of the dominance order, on seeded random negative l-weights.
    Multiplicativity {
        #[arg(long, default_value_t = 100)]
        samples: u32,
    },
    /// Triangularity of the loop-Cartan action on the asymptotic module.
    Triangularity {
        /// Largest loop-Cartan degree checked.
        #[arg(long, default_value_t = 4)]
        rmax: u32,
    },
    /// Location of induced-module eigenvectors in the base subspace.
    Induced {
        /// Word-degree cap of the induced truncation.
        #[arg(long = "D", default_value_t = 5)]
        cap: u32,
        /// Number of slot families in the ambient window.
        #[arg(long, default_value_t = 4)]
        slots: u32,
    },
    /// Stability of truncated actions under enlarging the section.
    Stability {
        /// Largest flip position exercised.
        #[arg(long, default_value_t = 4)]
        maxpos: u32,
        /// Largest raising degree exercised.
        #[arg(long, default_value_t = 3)]
        mmax: u32,
        /// Largest loop-Cartan degree exercised.
        #[arg(long, default_value_t = 3)]
        rmax: u32,
    },
    /// Divergence witness: lowering coefficients on single-flip states.
    Divergence {
        #[arg(long = "N", default_value_t = 3)]
        n: u32,
    },
    /// Independent linear certification of the normal-ordered basis.
    Oracle {
        #[arg(long = "D", default_value_t = 4)]
        d: u32,
    },
}

struct CommandOutput {
    passed: bool,
    command: &'static str,
    params: Value,
    result: Value,
    text: String,
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => {
                    print!(
                        "{}",
                        render_json(&envelope(out.command, out.params, out.result))
                    );
                }
                Format::Text => print!("{}", out.text),
            }
            std::process::exit(if out.passed { 0 } else { 1 });
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for(&e));
        }
    }
}

/// Input-shaped errors exit 2; verification and computation failures
/// exit 1.
fn exit_code_for(e: &Error) -> i32 {
    if e.is_invalid_input() {
        2
    } else {
        1
    }
}

fn run(cli: &Cli) -> Result<CommandOutput> {
    let cfg = RunConfig {
        window: parse_window(&cli.window)?,
        degcap: cli.degcap,
        depth: cli.depth,
        qmode: parse_qmode(&cli.q)?,
        seed: cli.seed,
        format: cli.format,
    };
    cfg.validate()?;
    match &cli.cmd {
        Cmd::Qchar { expr } => cmd_qchar(expr, &cfg),
        Cmd::Limit { r, nmax } => cmd_limit(*r, *nmax, &cfg),
        Cmd::Decompose => cmd_decompose(&cfg),
        Cmd::Verify { target } => cmd_verify(target, &cfg),
        Cmd::Simulate { factors, rmax } => cmd_simulate(factors, *rmax, &cfg),
        Cmd::Induce { cap, slots } => cmd_induce(*cap, *slots, &cfg),
    }
}

fn with_params(cfg: &RunConfig, extra: &[(&str, Value)]) -> Value {
    let mut params = cfg.params();
    let map = params.as_object_mut().expect("params is an object");
    for (k, v) in extra {
        map.insert((*k).to_string(), v.clone());
    }
    params
}

fn series_text(series: &QCharSeries) -> String {
    let mut text = format!("{series}\n");
    if series.num_terms() > 1 {
        text.push_str(&series.to_table());
    }
    text
}

fn cmd_qchar(expr: &str, cfg: &RunConfig) -> Result<CommandOutput> {
    let parsed = parse_lweight_expr(expr)?;
    let (series, finite) = match &parsed.ystring {
        Some(ys) => (standard_qchar(ys)?, true),
        None => (chi_infinity(&parsed.lweight, cfg.region()?)?, false),
    };
    Ok(CommandOutput {
        passed: true,
        command: "qchar",
        params: with_params(cfg, &[("expr", json!(expr))]),
        result: json!({
            "lweight": parsed.lweight.to_string(),
            "finite": finite,
            "num_terms": series.num_terms(),
            "series": to_value(&series)?,
        }),
        text: series_text(&series),
    })
}

fn cmd_limit(r: i64, nmax: u32, cfg: &RunConfig) -> Result<CommandOutput> {
    let region = cfg.region()?;
    let closed = prefund_limit_qchar(r, region)?;
    let gen = |n: u32| -> Result<QCharSeries> {
        let mut s = QCharSeries::one(region);
        for k in 0..i64::from(n) {
            let idx = r - 2 * k;
            if idx >= region.rmin && idx <= region.rmax {
                let mut f = QCharSeries::one(region);
                f.add_term(&AMonomial::single(idx, 1)?, 1)?;
                s = s.truncated_product(&f)?;
            }
        }
        Ok(s)
    };
    let (n0, stable) = stabilization_check(gen, region, nmax)?;
    let passed = stable == closed;
    let mut text = format!("stabilized at N0 = {n0}\n");
    text.push_str(&series_text(&stable));
    writeln!(text, "matches closed form: {passed}").expect("string write");
    Ok(CommandOutput {
        passed,
        command: "limit",
        params: with_params(cfg, &[("r", json!(r)), ("nmax", json!(nmax))]),
        result: json!({
            "n0": n0,
            "series": to_value(&stable)?,
            "matches_closed_form": passed,
        }),
        text,
    })
}

fn cmd_decompose(cfg: &RunConfig) -> Result<CommandOutput> {
    let report = verify_decomposition(cfg.region()?)?;
    let passed = report.equal && report.multiplicity_free;
    let mut text = String::new();
    writeln!(
        text,
        "tuples: {}  standard terms: {}  summed terms: {}",
        report.tuples, report.lhs_terms, report.rhs_terms
    )
    .expect("string write");
    for (tuple, omega) in &report.recenterings {
        writeln!(text, "{tuple}\trecentering [{omega}]").expect("string write");
    }
    writeln!(
        text,
        "equal: {}  multiplicity-free: {}",
        report.equal, report.multiplicity_free
    )
    .expect("string write");
    Ok(CommandOutput {
        passed,
        command: "decompose",
        params: with_params(cfg, &[]),
        result: to_value(&report)?,
        text,
    })
}

fn parse_factor_list(s: &str) -> Result<Vec<(u32, i64)>> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty tensor factor list".into()));
    }
    let mut out = Vec::new();
    for (i, part) in t.split(',').enumerate() {
        let Some((k, sx)) = part.split_once(':') else {
            return Err(Error::Parse(format!(
                "factor {i} must look like 'k:s', got '{part}'"
            )));
        };
        let k: u32 = k.trim().parse().map_err(|_| {
            Error::Parse(format!("factor {i}: string length '{k}' is not a natural"))
        })?;
        let sx: i64 = sx.trim().parse().map_err(|_| {
            Error::Parse(format!(
                "factor {i}: spectral exponent '{sx}' is not an integer"
            ))
        })?;
        out.push((k, sx));
    }
    Ok(out)
}

fn cmd_simulate(factors: &str, rmax: Option<usize>, cfg: &RunConfig) -> Result<CommandOutput> {
    let list = parse_factor_list(factors)?;
    let mods: Vec<EvalModule> = list
        .iter()
        .map(|&(k, s)| make_eval_module(k, s))
        .collect::<Result<_>>()?;
    let bound = match cfg.qmode {
        QMode::Exact => SYMBOLIC_DIM_BOUND,
        QMode::DualRational(..) => DEFAULT_DIM_BOUND,
    };
    let mut t = tensor_bounded(&mods, bound)?;
    let rmax = rmax.unwrap_or_else(|| {
        let lo = list.iter().map(|&(k, s)| s + 2 - 2 * i64::from(k)).min();
        let hi = list.iter().map(|&(k, s)| s + 2 * i64::from(k)).max();
        match (lo, hi) {
            (Some(lo), Some(hi)) => (((hi - lo) / 2).max(0) as usize + 2).clamp(3, 10),
            _ => 3,
        }
    });
    t.derive_drinfeld(rmax, rmax)?;
    let rows = lweight_decomposition(&t, rmax, &cfg.qmode)?;
    let mut text = format!("dimension: {}\n", t.dim());
    let mut json_rows = Vec::new();
    for row in &rows {
        writeln!(
            text,
            "{}\t{}\tx{}",
            row.lweight, row.position, row.multiplicity
        )
        .expect("string write");
        json_rows.push(json!({
            "lweight": row.lweight.to_string(),
            "position": row.position.to_string(),
            "multiplicity": row.multiplicity,
        }));
    }
    Ok(CommandOutput {
        passed: true,
        command: "simulate",
        params: with_params(
            cfg,
            &[("factors", json!(factors)), ("rmax", json!(rmax))],
        ),
        result: json!({ "dim": t.dim(), "rows": json_rows }),
        text,
    })
}

fn cmd_induce(cap: u32, slots: u32, cfg: &RunConfig) -> Result<CommandOutput> {
    let psi = psi_of(0, -1)?;
    let location = eigenvector_location_check(&psi, cap, cfg.depth, slots, &[1])?;
    let mut ctx = TPsi::new(&psi, 1 - i64::from(slots), cfg.depth, slots + 4)?;
    let basis = ctx.lweight_basis(slots + 2)?;
    let blocks = change_of_basis_blocks(&basis);
    let passed = location.passed();
    let mut text = String::new();
    for b in &blocks {
        writeln!(text, "cardinality-{} block: {:?}", b.size, b.members).expect("string write");
        for (row, member) in b.matrix.iter().zip(&b.members) {
            writeln!(text, "  {member}: {row:?}").expect("string write");
        }
    }
    writeln!(
        text,
        "interior eigenvectors in base subspace: {}",
        location.all_interior_in_base
    )
    .expect("string write");
    writeln!(text, "status: {}", if passed { "PASS" } else { "FAIL" }).expect("string write");
    Ok(CommandOutput {
        passed,
        command: "induce",
        params: with_params(cfg, &[("D", json!(cap)), ("slots", json!(slots))]),
        result: json!({
            "passed": passed,
            "location": to_value(&location)?,
            "basis_blocks": to_value(&blocks)?,
        }),
        text,
    })
}

fn cmd_verify(target: &VerifyTarget, cfg: &RunConfig) -> Result<CommandOutput> {
    let (name, extra, passed, result, mut text) = match target {
        VerifyTarget::Decomp => {
            let report = verify_decomposition(cfg.region()?)?;
            let ok = report.equal && report.multiplicity_free;
            let text = format!(
                "decomposition on {:?}: equal {} multiplicity-free {}\n",
                (report.window.rmin, report.window.rmax),
                report.equal,
                report.multiplicity_free
            );
            (
                "decomp",
                vec![],
                ok,
                json!({ "passed": ok, "report": to_value(&report)? }),
                text,
            )
        }
        VerifyTarget::Multiplicativity { samples } => {
            let region = cfg.region()?;
            let bound = 8;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut mult_ok = true;
            for _ in 0..*samples {
                let p1 = random_negative_lweight(&mut rng, bound)?;
                let p2 = random_negative_lweight(&mut rng, bound)?;
                if !qchar_multiplicativity_check(&p1, &p2, region)? {
                    mult_ok = false;
                    break;
                }
            }
            let order_ok = order_compatibility_check(cfg.seed, *samples, bound)?;
            let ok = mult_ok && order_ok;
            let text = format!(
                "multiplicativity: {mult_ok}  order compatibility: {order_ok} ({samples} samples)\n"
            );
            (
                "multiplicativity",
                vec![("samples", json!(samples))],
                ok,
                json!({
                    "passed": ok,
                    "multiplicativity": mult_ok,
                    "order_compatibility": order_ok,
                    "samples": samples,
                }),
                text,
            )
        }
        VerifyTarget::Triangularity { rmax } => {
            let psi = psi_of(0, -1)?;
            let slot_min = (cfg.window.0 / 2).min(-1);
            let window_len = (-slot_min) as u32 + 1;
            let mut ctx = TPsi::new(&psi, slot_min, cfg.depth, (window_len + 4).min(24))?;
            let report = ctx.triangularity_report(*rmax)?;
            let ok = report.violations.is_empty();
            let text = format!(
                "states: {}  actions: {}  violations: {}\n",
                report.states_checked,
                report.actions_checked,
                report.violations.len()
            );
            (
                "triangularity",
                vec![("rmax", json!(rmax))],
                ok,
                json!({ "passed": ok, "report": to_value(&report)? }),
                text,
            )
        }
        VerifyTarget::Induced { cap, slots } => {
            let psi = psi_of(0, -1)?;
            let report = eigenvector_location_check(&psi, *cap, cfg.depth, *slots, &[1])?;
            let ok = report.passed();
            let text = format!(
                "eigenspaces: {}  interior in base: {}  dims match: {}  q-character match: {}\n",
                report.spaces.len(),
                report.all_interior_in_base,
                report.eigenspace_dims_match,
                report.qchar_series_match
            );
            (
                "induced",
                vec![("D", json!(cap)), ("slots", json!(slots))],
                ok,
                json!({ "passed": ok, "report": to_value(&report)? }),
                text,
            )
        }
        VerifyTarget::Stability { maxpos, mmax, rmax } => {
            if *maxpos > 8 {
                return Err(Error::Config(format!(
                    "largest flip position {maxpos} exceeds the bound 8"
                )));
            }
            let psi = psi_of(0, -1)?;
            let mut ctx = TPsi::new(&psi, -i64::from(*maxpos), cfg.depth, maxpos + 4)?;
            let mut failures: Vec<String> = Vec::new();
            let mut states = 0usize;
            for j in ctx.ambient_subsets()? {
                states += 1;
                if let Err(e) = ctx.coproduct_stability_check(&j, *mmax, *rmax) {
                    match e {
                        Error::Inconsistency(msg) => failures.push(msg),
                        other => return Err(other),
                    }
                }
            }
            let ok = failures.is_empty();
            let text = format!(
                "states: {states}  raising degrees: 0..={mmax}  loop-Cartan degrees: 1..={rmax}  failures: {}\n",
                failures.len()
            );
            (
                "stability",
                vec![
                    ("maxpos", json!(maxpos)),
                    ("mmax", json!(mmax)),
                    ("rmax", json!(rmax)),
                ],
                ok,
                json!({ "passed": ok, "states": states, "failures": failures }),
                text,
            )
        }
        VerifyTarget::Divergence { n } => {
            let witness = qchar::asymstd::xminus_divergence_witness(*n)?;
            let expected: Vec<QScalar> = (0..=i64::from(*n))
                .map(|k| QScalar::q_power(-2 * k - 1))
                .collect();
            let ok = witness == expected;
            let shown: Vec<String> = witness.iter().map(|c| c.to_string()).collect();
            let text = format!("[{}]\nmatches: {ok}\n", shown.join(", "));
            (
                "divergence",
                vec![("N", json!(n))],
                ok,
                json!({
                    "passed": ok,
                    "witness": shown,
                    "expected": expected.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                }),
                text,
            )
        }
        VerifyTarget::Oracle { d } => {
            let ok = linear_oracle_check(*d)?;
            let text = format!("linear oracle through degree {d}: {ok}\n");
            (
                "oracle",
                vec![("D", json!(d))],
                ok,
                json!({ "passed": ok, "degree": d }),
                text,
            )
        }
    };
    writeln!(text, "status: {}", if passed { "PASS" } else { "FAIL" }).expect("string write");
    Ok(CommandOutput {
        passed,
        command: name,
        params: with_params(cfg, &extra),
        result,
        text,
    })
}
