//! `cw`: command-line front end for the congruence workbench.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cw_core::catalog::{enumerate_members, enumerate_si, CatalogOptions};
use cw_core::centrality::{center_with, upper_central_series};
use cw_core::congruence::{congruence_lattice, si_check, sort_congruences};
use cw_core::factor::direct_factorization;
use cw_core::formulas::decompose::sample_terms;
use cw_core::formulas::{
    build_phi, decompose_commutator, render_theta, theta_semantic_check, verify_dpsc, PsiConfig,
    Truth,
};
use cw_core::free::{empirical_m, find_maltsev, MaltsevSearch, VarietyBounds};
use cw_core::hypotheses::check_hypotheses;
use cw_core::{Budget, Error, FiniteAlgebra, Term, VarStyle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    Info,
    Con,
    Center,
    Ucs,
    Maltsev,
    Si,
    Factor,
    Hypotheses,
    Phi,
    Mbound,
    Decompose,
    Dpsc,
    Theta,
}

#[derive(Parser, Debug)]
#[command(
    name = "cw",
    version,
    about = "Congruence workbench for finite algebras"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Algebra file: {"name","size","operations":[{"name","arity","table"}]}
    file: PathBuf,
    /// Term for `decompose`, prefix notation over x1..xn, z
    term: Option<String>,
    /// Print one JSON document instead of text
    #[arg(long)]
    json: bool,
    /// Element cap for closures, catalogs and searches
    #[arg(long, env = "CW_BUDGET", default_value_t = 200_000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    max_power: u64,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    max_size: u64,
    /// Largest commutator-word arity searched
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    max_arity: u64,
    /// Override for the witness complexity bound N (at least 2)
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    n_bound: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Serialize)]
struct RunConfig {
    budget: usize,
    max_power: usize,
    max_size: usize,
    max_arity: usize,
    n_bound: Option<usize>,
    seed: u64,
}

/// Outcome of a command: report plus whether its check passed.
struct Outcome {
    text: String,
    json: Value,
    ok: bool,
}

impl Outcome {
    fn pass(text: String, json: Value) -> Self {
        Outcome {
            text,
            json,
            ok: true,
        }
    }
}

struct Failure {
    stage: &'static str,
    error: Error,
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T> Stage<T> for cw_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|error| Failure { stage, error })
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        e if e.is_budget() => 2,
        Error::Verification(_)
        | Error::NoMaltsev(..)
        | Error::Internal(_)
        | Error::NotCongruence(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = RunConfig {
        budget: cli.budget as usize,
        max_power: cli.max_power as usize,
        max_size: cli.max_size as usize,
        max_arity: cli.max_arity as usize,
        n_bound: cli.n_bound.map(|n| n as usize),
        seed: cli.seed,
    };
    let alg = match FiniteAlgebra::load(&cli.file) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.file.display());
            return ExitCode::from(exit_code(&e));
        }
    };
    match run(cli.command, &alg, cli.term.as_deref(), &config) {
        Ok(out) => {
            if cli.json {
                let doc = json!({
                    "command": cli.command,
                    "algebra": alg.name(),
                    "config": config,
                    "ok": out.ok,
                    "result": out.json,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("report serializes")
                );
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(if out.ok { 0 } else { 3 })
        }
        Err(f) => {
            eprintln!("error during {}: {}", f.stage, f.error);
            ExitCode::from(exit_code(&f.error))
        }
    }
}

fn blocks_text(p: &cw_core::Partition) -> String {
    let bs: Vec<String> = p
        .blocks()
        .iter()
        .map(|b| {
            format!(
                "{{{}}}",
                b.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    bs.join(" ")
}

fn run(
    cmd: Command,
    alg: &FiniteAlgebra,
    term: Option<&str>,
    cfg: &RunConfig,
) -> Result<Outcome, Failure> {
    let budget = Budget::new(cfg.budget);
    let sig = alg.signature();
    match cmd {
        Command::Info => {
            let ops: Vec<Value> = sig
                .iter()
                .map(|o| json!({"name": o.name, "arity": o.arity}))
                .collect();
            let mut text = format!("{}: {} elements\n", alg.name(), alg.size());
            for o in sig.iter() {
                let _ = writeln!(text, "  {} / {}", o.name, o.arity);
            }
            Ok(Outcome::pass(
                text,
                json!({"name": alg.name(), "size": alg.size(), "operations": ops}),
            ))
        }
        Command::Con => {
            let mut lat = congruence_lattice(alg, &budget).stage("congruence lattice")?;
            sort_congruences(&mut lat);
            let mut text = format!("{} congruences\n", lat.len());
            for p in &lat {
                let _ = writeln!(text, "  {}", blocks_text(p));
            }
            Ok(Outcome::pass(
                text,
                json!({"count": lat.len(), "congruences": lat}),
            ))
        }
        Command::Center => {
            let z = center_with(alg, &budget).stage("center")?;
            let label = if z.is_top() {
                " (full relation)"
            } else if z.is_bottom() {
                " (identity relation)"
            } else {
                ""
            };
            Ok(Outcome::pass(
                format!("center: {}{label}\n", blocks_text(&z)),
                json!({"center": z, "full": z.is_top(), "trivial": z.is_bottom()}),
            ))
        }
        Command::Ucs => {
            let s = upper_central_series(alg).stage("upper central series")?;
            let mut text = String::new();
            for (i, t) in s.terms.iter().enumerate() {
                let _ = writeln!(text, "ζ{i}: {}", blocks_text(t));
            }
            let _ = writeln!(text, "{}", s.status);
            Ok(Outcome::pass(
                text,
                serde_json::to_value(&s).expect("series serializes"),
            ))
        }
        Command::Maltsev => {
            let r = find_maltsev(alg, &budget).stage("Mal'tsev search")?;
            match &r {
                MaltsevSearch::Found(w) => {
                    let t = w.term.to_prefix(sig, &VarStyle::Indexed);
                    Ok(Outcome::pass(
                        format!(
                            "Mal'tsev term: {t}\n  verified on {} + {} instances\n",
                            w.checked_first, w.checked_second
                        ),
                        json!({"status": "found", "term": t, "checked": [w.checked_first, w.checked_second]}),
                    ))
                }
                MaltsevSearch::Absent => Ok(Outcome {
                    text: "no Mal'tsev term (search complete)\n".into(),
                    json: json!({"status": "absent"}),
                    ok: false,
                }),
                MaltsevSearch::Unknown => Err(Failure {
                    stage: "Mal'tsev search",
                    error: Error::Truncated(alg.name().to_string()),
                }),
            }
        }
        Command::Si => match si_check(alg).stage("SI check")? {
            Some(w) => Ok(Outcome::pass(
                format!(
                    "subdirectly irreducible\n  monolith: {}\n  critical pairs: {}\n",
                    blocks_text(&w.monolith),
                    w.critical_pairs.len()
                ),
                json!({"si": true, "monolith": w.monolith, "critical_pairs": w.critical_pairs}),
            )),
            None => Ok(Outcome::pass(
                "not subdirectly irreducible\n".into(),
                json!({"si": false}),
            )),
        },
        Command::Factor => {
            let f = direct_factorization(alg, &budget).stage("factorization")?;
            let mut text = format!("{} factor(s): {:?}\n", f.factors.len(), f.sizes());
            for x in &f.factors {
                let pp = match x.prime_power {
                    Some((p, e)) => format!("{p}^{e}"),
                    None if x.size == 1 => "trivial".into(),
                    None => "not a prime power".into(),
                };
                let _ = writeln!(
                    text,
                    "  size {} ({pp}): kernel {}",
                    x.size,
                    blocks_text(&x.congruence)
                );
            }
            Ok(Outcome::pass(
                text,
                serde_json::to_value(&f).expect("factorization serializes"),
            ))
        }
        Command::Hypotheses => {
            let r = check_hypotheses(alg, &budget).stage("hypotheses")?;
            let mut text = format!("nilpotence: {}\n", r.nilpotence);
            let sizes: Vec<String> = r
                .factors
                .iter()
                .map(|f| format!("{}{}", f.size, if f.prime_power { "" } else { "*" }))
                .collect();
            let _ = writeln!(
                text,
                "factors: {} (prime power: {})",
                sizes.join(" x "),
                r.prime_power_factors
            );
            let _ = writeln!(
                text,
                "Mal'tsev term: {}",
                r.maltsev_term.as_deref().unwrap_or(r.maltsev)
            );
            let failing = r.failing();
            if r.pass {
                text.push_str("PASS: all hypotheses hold\n");
            } else {
                let _ = writeln!(text, "FAIL: {}", failing.join(", "));
            }
            Ok(Outcome {
                text,
                json: json!({"report": r, "failing": failing}),
                ok: r.pass,
            })
        }
        Command::Phi => {
            let phi = build_phi(alg, &budget).stage("Φ construction")?;
            let m = phi.maltsev.to_prefix(sig, &VarStyle::Indexed);
            let ds = phi.disjuncts();
            let text = format!(
                "m(x1,x2,x3) = {m}\n|T| = {}\nΦ(u,v,x,y) :=\n      {}\n",
                phi.len(),
                ds.join("\n    ∨ ")
            );
            Ok(Outcome::pass(
                text,
                json!({
                    "maltsev": m,
                    "terms": phi.terms.iter().map(|t| t.to_prefix(sig, &VarStyle::Indexed)).collect::<Vec<_>>(),
                    "disjuncts": ds,
                }),
            ))
        }
        Command::Mbound => {
            let m = empirical_m(alg, cfg.max_arity, &budget).stage("commutator-word search")?;
            let mut text = format!(
                "M_emp = {} ({}, ceiling {})\n",
                m.m_emp,
                m.status_label(),
                m.ceiling
            );
            for a in &m.arities {
                let _ = writeln!(
                    text,
                    "  arity {}: {} nontrivial ({})",
                    a.nvars, a.nontrivial, a.status
                );
            }
            let bounds = match VarietyBounds::compute(alg, cfg.max_arity, cfg.n_bound, &budget) {
                Ok(b) => {
                    let _ = writeln!(text, "k = {}, N = {}", b.k, b.n);
                    json!({"k": b.k, "n": b.n})
                }
                Err(e) => {
                    let _ = writeln!(text, "N undefined: {e}");
                    Value::Null
                }
            };
            Ok(Outcome::pass(
                text,
                json!({"m_emp": m.m_emp, "status": m.status_label(), "search": m, "bounds": bounds}),
            ))
        }
        Command::Decompose => {
            let (w, nvars) = match term {
                Some(s) => parse_xz(alg, s).stage("term")?,
                None => (
                    sample_terms(alg, 2, 4, 1, cfg.seed)
                        .pop()
                        .expect("one sample"),
                    2,
                ),
            };
            let m = match find_maltsev(alg, &budget).stage("Mal'tsev search")? {
                MaltsevSearch::Found(w) => w.term,
                MaltsevSearch::Absent => {
                    return Err(Failure {
                        stage: "Mal'tsev search",
                        error: Error::NoMaltsev(
                            alg.name().into(),
                            "decomposition needs a Mal'tsev term",
                        ),
                    })
                }
                MaltsevSearch::Unknown => {
                    return Err(Failure {
                        stage: "Mal'tsev search",
                        error: Error::Truncated(alg.name().to_string()),
                    })
                }
            };
            let d = decompose_commutator(alg, &m, &w, nvars).stage("decomposition")?;
            let r = d.report(alg);
            let mut text = format!("w = {}\nbase = {}\n", r.input, r.base);
            for c in &r.components {
                let _ = writeln!(
                    text,
                    "  c[{}] = {}{}",
                    c.subset.join(","),
                    c.term,
                    if c.trivial { "  (≈ z)" } else { "" }
                );
            }
            text.push_str("verified: components absorb, reconstruction ≈ w\n");
            Ok(Outcome::pass(
                text,
                serde_json::to_value(&r).expect("report serializes"),
            ))
        }
        Command::Dpsc => {
            let opts = catalog_options(cfg, budget);
            let catalog = enumerate_si(alg, &opts).stage("catalog")?;
            let phi = build_phi(alg, &budget).stage("Φ construction")?;
            let psi = psi_config(alg, cfg, budget, &phi.maltsev).stage("variety bounds")?;
            let report =
                verify_dpsc(alg, &phi, &catalog.si_algebras(), &psi).stage("dpsc verification")?;
            let mut text = format!(
                "catalog: {} SI member(s) ({}); |T| = {}; N = {}\n",
                catalog.members.len(),
                catalog.status,
                phi.len(),
                psi.n_bound
            );
            for m in &report.members {
                let _ = writeln!(
                    text,
                    "  {} (size {}): {} pairs, max complexity {}: {}",
                    m.name,
                    m.size,
                    m.instances.len(),
                    m.max_complexity,
                    if m.pass { "pass" } else { "FAIL" }
                );
            }
            for w in report.warnings.iter().chain(&catalog.warnings) {
                let _ = writeln!(text, "warning: {w}");
            }
            for (name, i) in report.failures().take(10) {
                let _ = writeln!(
                    text,
                    "  failure in {name} at {:?}: {}",
                    i.pair,
                    i.note.as_deref().unwrap_or("")
                );
            }
            text.push_str(if report.pass { "PASS\n" } else { "FAIL\n" });
            Ok(Outcome {
                text,
                json: json!({"catalog": catalog, "report": report}),
                ok: report.pass,
            })
        }
        Command::Theta => {
            let phi = build_phi(alg, &budget).stage("Φ construction")?;
            let psi = psi_config(alg, cfg, budget, &phi.maltsev).stage("variety bounds")?;
            let rendering = render_theta(&phi, &psi);
            let opts = catalog_options(cfg, budget);
            let catalog = enumerate_members(alg, &opts).stage("catalog")?;
            let mut text = rendering.text();
            let own = theta_semantic_check(alg, &phi, &psi).stage("Θ evaluation")?;
            let _ = writeln!(text, "\nΘ on {}: {:?}", alg.name(), own.value);
            let mut rows = Vec::new();
            let mut agree = true;
            for e in &catalog.members {
                let v = theta_semantic_check(&e.algebra, &phi, &psi).stage("Θ evaluation")?;
                let expected = if e.is_si() { Truth::True } else { Truth::False };
                agree &= v.value == expected;
                let _ = writeln!(
                    text,
                    "  {} (size {}, {}): {:?}",
                    e.name,
                    e.size,
                    if e.is_si() { "SI" } else { "not SI" },
                    v.value
                );
                rows.push(json!({"name": e.name, "size": e.size, "si": e.is_si(), "theta": v}));
            }
            let _ = writeln!(text, "classifier agrees with SI check: {agree}");
            Ok(Outcome {
                text,
                json: json!({"rendering": rendering, "self": own, "members": rows, "agree": agree}),
                ok: agree,
            })
        }
    }
}

fn catalog_options(cfg: &RunConfig, budget: Budget) -> CatalogOptions {
    CatalogOptions {
        max_power: cfg.max_power,
        max_size: cfg.max_size,
        budget,
        ..CatalogOptions::default()
    }
}

fn psi_config(
    alg: &FiniteAlgebra,
    cfg: &RunConfig,
    budget: Budget,
    m: &Term,
) -> cw_core::Result<PsiConfig> {
    let mut psi = match VarietyBounds::compute(alg, cfg.max_arity, cfg.n_bound, &budget) {
        Ok(b) => PsiConfig::from_bounds(&b),
        Err(e) => match cfg.n_bound {
            Some(n) => PsiConfig::new(n)?,
            None => return Err(e),
        },
    };
    psi.budget = budget;
    Ok(psi.with_maltsev(m.clone()))
}

/// Parses a term over `x1..xn, z`; `n` is the largest `x` index used (at least 1).
fn parse_xz(alg: &FiniteAlgebra, s: &str) -> cw_core::Result<(Term, usize)> {
    const Z: usize = 1 << 20;
    let t = Term::parse(s, alg.signature(), &|name| {
        if name == "z" {
            Some(Z)
        } else {
            name.strip_prefix('x')
                .and_then(|i| i.parse::<usize>().ok())
                .filter(|i| (1..Z).contains(i))
                .map(|i| i - 1)
        }
    })?;
    let mut n = 0;
    let mut stack = vec![&t];
    while let Some(u) = stack.pop() {
        match u {
            Term::Var(i) if *i != Z => n = n.max(i + 1),
            Term::Var(_) => {}
            Term::App(_, args) => stack.extend(args),
        }
    }
    let n = n.max(1);
    Ok((t.rename(&|i| if i == Z { n } else { i }), n))
}
