//! k3series: exact coefficient tables and verification suites for the
//! K3 counting theories (Igusa cusp form, Quot Euler numbers, wall-crossing).
//!
//! Exit codes: 0 on success (and all verifications passing), 1 when a
//! verification suite reports failures, 2 on hard errors (bad arguments,
//! invalid cache, uncertifiable truncation).

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};
use k3series::forms::{form_certified, FormName};
use k3series::qseries::eta_power;
use k3series::rational::rat_int;
use k3series::theory::{
    dt_imprimitive, gw_hilb_imprimitive, quot_euler_by_pairings, quot_q, CurveClassSpec,
    MukaiTriple,
};
use k3series::verify::{run_check_params, CheckReport, CHECK_NAMES};
use k3series::{TruncationSpec, CONVENTION_TAG, FORMAT_VERSION};
use k3series_cli::cache;
use k3series_cli::emit::TableDoc;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// smallest certificate the cache is ever built at; queries enlarge it
const CERT_FLOOR: TruncationSpec = TruncationSpec {
    q_max: 6,
    t_max: 3,
    p_window: 8,
};

#[derive(Parser)]
#[command(
    name = "k3series",
    version,
    about = "Exact generating-series engine for K3 counting theories"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct OutputOpts {
    /// emit JSON (default)
    #[arg(long)]
    json: bool,
    /// emit CSV instead of JSON
    #[arg(long)]
    csv: bool,
    /// write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputOpts {
    fn write(&self, doc: &TableDoc) -> Result<()> {
        if self.json && self.csv {
            bail!("--json and --csv are mutually exclusive");
        }
        let text = if self.csv { doc.to_csv() } else { doc.to_json() };
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit the q-expansion of a named form
    /// (delta, e2, theta2, g, wp, phi101, goettsche)
    Form {
        name: String,
        #[arg(long = "qmax")]
        q_max: i64,
        /// p-window to certify and emit (p-carrying forms only)
        #[arg(long = "pwin", default_value_t = 8)]
        p_window: i64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Igusa cusp form coefficient queries
    Igusa {
        #[command(subcommand)]
        sub: IgusaCmd,
    },
    /// Theorem-level quantities (Quot Euler numbers, DT/GW multiple cover)
    Theory {
        #[command(subcommand)]
        sub: TheoryCmd,
    },
    /// Run verification suites; exit status 0 iff everything passes
    Verify {
        /// one of: all, eta-oracle, weierstrass, kkv, dt1, yau-zaslow,
        /// conjecture-a, lift-symmetry, jacobi-index, multicover-primitive,
        /// multiplicativity
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long = "qmax")]
        q_max: Option<i64>,
        #[arg(long = "tmax")]
        t_max: Option<i64>,
        #[arg(long = "pwin")]
        p_window: Option<i64>,
        /// coefficient cache to validate and reuse
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum IgusaCmd {
    /// Print c(h,n,m), the coefficient of q^h q̃^n p^m in 1/χ₁₀
    Coeff {
        #[arg(allow_negative_numbers = true)]
        h: i64,
        #[arg(allow_negative_numbers = true)]
        n: i64,
        #[arg(allow_negative_numbers = true)]
        m: i64,
        /// cache file; created or extended as needed
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long = "qmax")]
        q_max: Option<i64>,
        #[arg(long = "tmax")]
        t_max: Option<i64>,
        #[arg(long = "pwin")]
        p_window: Option<i64>,
        #[command(flatten)]
        output: OutputOpts,
    },
}

#[derive(Subcommand)]
enum TheoryCmd {
    /// Quot-scheme virtual Euler number Q_{n,h,m}
    Quot {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        h: i64,
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Q as a function of the Mukai pairings (v·v, u·u, u·v)
    QuotEuler {
        #[arg(long, allow_negative_numbers = true)]
        vv: i64,
        #[arg(long, allow_negative_numbers = true)]
        uu: i64,
        #[arg(long, allow_negative_numbers = true)]
        uv: i64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// DT invariant of S×E for a class of divisibility d (multiple cover)
    Dt {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        h0: i64,
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Elliptic GW count of Hilb^n for a class of divisibility d
    Gw {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        h0: i64,
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        output: OutputOpts,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Form {
            name,
            q_max,
            p_window,
            output,
        } => {
            cmd_form(&name, q_max, p_window, &output)?;
            Ok(0)
        }
        Cmd::Igusa {
            sub:
                IgusaCmd::Coeff {
                    h,
                    n,
                    m,
                    cache,
                    q_max,
                    t_max,
                    p_window,
                    output,
                },
        } => {
            cmd_igusa_coeff(h, n, m, cache.as_deref(), q_max, t_max, p_window, &output)?;
            Ok(0)
        }
        Cmd::Theory { sub } => {
            cmd_theory(sub)?;
            Ok(0)
        }
        Cmd::Verify {
            suite,
            q_max,
            t_max,
            p_window,
            cache,
            out,
        } => cmd_verify(&suite, q_max, t_max, p_window, cache.as_deref(), out.as_deref()),
    }
}

fn cmd_form(name: &str, q_max: i64, p_window: i64, output: &OutputOpts) -> Result<()> {
    if q_max < 0 || p_window < 0 {
        bail!("invalid truncation: qmax and pwin must be nonnegative");
    }
    if q_max < 1 && matches!(name, "delta" | "phi101") {
        bail!("invalid truncation: {name} needs --qmax >= 1 (its q-expansion starts at q^1)");
    }
    let query = format!("form {name} qmax={q_max} pwin={p_window}");
    if name == "goettsche" {
        let series = eta_power(-24, &TruncationSpec::q_only(q_max, 0));
        let mut doc = TableDoc::new(query, TruncationSpec::q_only(q_max, 0), &["n"]);
        for j in 0..=q_max {
            doc.push(vec![j], &series.coeff(j, 0)?);
        }
        return output.write(&doc);
    }
    let form = FormName::parse(name)
        .ok_or_else(|| anyhow!("unknown form {name:?}; see `k3series form --help`"))?;
    let series = form_certified(form, q_max, p_window)?;
    let pure_q = matches!(form, FormName::Delta | FormName::E2);
    let names: &[&str] = if pure_q { &["q"] } else { &["q", "p"] };
    let mut doc = TableDoc::new(query, TruncationSpec::q_only(q_max, p_window), names);
    for (j, slice) in series.slices() {
        if j > q_max {
            continue;
        }
        if !pure_q {
            doc.push_window(j, slice.exact_low(), slice.exact_high());
        }
        for (k, c) in slice.terms() {
            if k.abs() > p_window && !pure_q {
                continue;
            }
            let exps = if pure_q { vec![j] } else { vec![j, k] };
            doc.push(exps, c);
        }
    }
    output.write(&doc)
}

#[allow(clippy::too_many_arguments)]
fn cmd_igusa_coeff(
    h: i64,
    n: i64,
    m: i64,
    cache_path: Option<&Path>,
    q_max: Option<i64>,
    t_max: Option<i64>,
    p_window: Option<i64>,
    output: &OutputOpts,
) -> Result<()> {
    let query = format!("igusa coeff h={h} n={n} m={m}");
    if h < -1 || n < -1 {
        // below the pole order of 1/χ₁₀; exact without any table
        let mut doc = TableDoc::new(query, TruncationSpec::new(0, 0, 0), &["h", "n", "m"]);
        doc.notes = Some("pole bound: c(h,n,m) = 0 for h < -1 or n < -1".to_string());
        doc.push(vec![h, n, m], &rat_int(0));
        return output.write(&doc);
    }
    let needed = TruncationSpec {
        q_max: q_max.unwrap_or(CERT_FLOOR.q_max).max(h),
        t_max: t_max.unwrap_or(CERT_FLOOR.t_max).max(n),
        p_window: p_window.unwrap_or(CERT_FLOOR.p_window).max(m.abs()),
    };
    let table = cache::load_or_build(cache_path, &needed)?;
    let value = table.igusa_c(h, n, m)?;
    let mut doc = TableDoc::new(query, *table.trunc(), &["h", "n", "m"]);
    doc.push(vec![h, n, m], &value);
    output.write(&doc)
}

fn cmd_theory(sub: TheoryCmd) -> Result<()> {
    match sub {
        TheoryCmd::Quot { n, h, m, output } => {
            let value = quot_q(n, h, m)?;
            let mut doc = theory_doc(
                format!("theory quot n={n} h={h} m={m}"),
                TruncationSpec::new(h, n, m.abs()),
                &["n", "h", "m"],
            );
            doc.push(vec![n, h, m], &value);
            output.write(&doc)
        }
        TheoryCmd::QuotEuler { vv, uu, uv, output } => {
            let value = quot_euler_by_pairings(&MukaiTriple { vv, uu, uv })?;
            let (n, h, m) = ((vv + 2) / 2, (uu + 2) / 2, -uv);
            let mut doc = theory_doc(
                format!("theory quot-euler vv={vv} uu={uu} uv={uv}"),
                TruncationSpec::new(h, n, m.abs()),
                &["n", "h", "m"],
            );
            doc.notes = Some(format!(
                "pairings normal form (1,0,1-n),(0,beta,m): n={n} h={h} m={m}; {}",
                CONVENTION_NOTE
            ));
            doc.push(vec![n, h, m], &value);
            output.write(&doc)
        }
        TheoryCmd::Dt {
            n,
            d,
            h0,
            m,
            cache,
            output,
        } => {
            let spec = CurveClassSpec { d, h0, n, m };
            let needed = theory_cert(&spec);
            let table = cache::load_or_build(cache.as_deref(), &needed)?;
            let value = dt_imprimitive(&spec, &table)?;
            let mut doc = theory_doc(
                format!("theory dt n={n} d={d} h0={h0} m={m}"),
                *table.trunc(),
                &["n", "d", "h0", "m"],
            );
            doc.push(vec![n, d, h0, m], &value);
            output.write(&doc)
        }
        TheoryCmd::Gw {
            n,
            d,
            h0,
            m,
            cache,
            output,
        } => {
            let spec = CurveClassSpec { d, h0, n, m };
            let needed = theory_cert(&spec);
            let table = cache::load_or_build(cache.as_deref(), &needed)?;
            let value = gw_hilb_imprimitive(&spec, &table)?;
            let mut doc = theory_doc(
                format!("theory gw n={n} d={d} h0={h0} m={m}"),
                *table.trunc(),
                &["n", "d", "h0", "m"],
            );
            if n == 1 && m != 0 {
                doc.notes = Some(format!(
                    "gw values for n = 1, m != 0 are 0 by declared convention; {}",
                    CONVENTION_NOTE
                ));
            }
            doc.push(vec![n, d, h0, m], &value);
            output.write(&doc)
        }
    }
}

const CONVENTION_NOTE: &str = "values in the ascending-p, (-p)^m sign convention";

fn theory_doc(query: String, cert: TruncationSpec, names: &[&str]) -> TableDoc {
    let mut doc = TableDoc::new(query, cert, names);
    doc.notes = Some(CONVENTION_NOTE.to_string());
    doc
}

fn theory_cert(spec: &CurveClassSpec) -> TruncationSpec {
    TruncationSpec {
        q_max: CERT_FLOOR.q_max.max(spec.d * spec.d * (spec.h0 - 1)).max(spec.h0),
        t_max: CERT_FLOOR.t_max.max(spec.n),
        p_window: CERT_FLOOR.p_window.max(spec.m.abs()),
    }
}

#[derive(Serialize)]
struct VerifyDoc {
    version: u32,
    convention_tag: String,
    suite: String,
    passed: bool,
    checks: Vec<CheckReport>,
}

fn cmd_verify(
    suite: &str,
    q_max: Option<i64>,
    t_max: Option<i64>,
    p_window: Option<i64>,
    cache_path: Option<&Path>,
    out: Option<&Path>,
) -> Result<i32> {
    // an unusable cache is a hard error, not a failed check
    let cached_table = match cache_path {
        Some(p) if p.exists() => {
            let (table, phi) = cache::load(p)?;
            k3series::igusa::seed_phi_table(phi);
            Some(table)
        }
        _ => None,
    };
    let names: Vec<&str> = if suite == "all" {
        CHECK_NAMES.to_vec()
    } else if CHECK_NAMES.contains(&suite) {
        vec![suite]
    } else {
        bail!("unknown suite {suite:?}; one of all, {}", CHECK_NAMES.join(", "));
    };
    let mut checks = Vec::new();
    for name in names {
        let mut report = None;
        if name == "multicover-primitive" {
            let (h0, n, m) = (q_max.unwrap_or(4), t_max.unwrap_or(3), p_window.unwrap_or(5));
            let needed = TruncationSpec::new(h0 - 1, n - 1, m);
            if let Some(table) = cached_table.as_ref().filter(|t| t.trunc().contains(&needed)) {
                report = Some(k3series::verify::check_multicover_primitive_with(
                    table, h0, n, m,
                ));
            }
        }
        let report = match report {
            Some(r) => r,
            None => run_check_params(name, q_max, t_max, p_window)
                .ok_or_else(|| anyhow!("unknown check {name}"))?,
        };
        checks.push(report);
    }
    let passed = checks.iter().all(|c| c.passed);
    let doc = VerifyDoc {
        version: FORMAT_VERSION,
        convention_tag: CONVENTION_TAG.to_string(),
        suite: suite.to_string(),
        passed,
        checks,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(if passed { 0 } else { 1 })
}
