//! Command-line front end: construction, homology, Morse strategies,
//! matching verification, and the number-theoretic certificates.
//!
//! Exit codes: 0 success/verified, 1 verification failure, 2 usage or
//! precondition error. All output is deterministic: TSV by default, JSON
//! (alphabetically ordered keys) with --json.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use vdw::{
    asymptotic_ratio, bound_certificate, build_contraction_matching, build_fiber_matching,
    build_minimal_matching, contractibility_witness, critical_cells, enumerate_faces, mobius,
    mobius_via_gamma, nth_primorial, parse_matching, r_of_k, reduced_homology, verify_matching,
    write_matching, FaceSet, StrategyReport,
};

#[derive(Parser)]
#[command(
    name = "vdw",
    version,
    about = "van der Waerden complexes: faces, Morse matchings, integer homology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of TSV
    #[arg(long, global = true)]
    json: bool,
    /// Also write the primary artifact to FILE (for `morse`: the matching file)
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Face counts, facets and Euler characteristics of vdW(n,k)
    Build { n: u32, k: u32 },
    /// Reduced Betti numbers from the integer homology oracle
    Betti {
        n: u32,
        k: u32,
        /// Include torsion coefficients in the rows
        #[arg(long)]
        torsion: bool,
    },
    /// Build and check a Morse matching
    Morse {
        n: u32,
        k: u32,
        #[arg(long, value_enum)]
        strategy: Strategy,
        /// Interval parameter for --strategy=contractible
        #[arg(long)]
        a: Option<u64>,
    },
    /// Verify a matching file against vdW(n,k)
    Verify { n: u32, k: u32, file: PathBuf },
    /// Moebius function two ways: classical and as a signed face count
    Mobius { k: u32 },
    /// Contractibility certificate for --a, or primorial data for --k
    Bounds {
        #[arg(long)]
        a: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
    },
    /// One row per k on vdW(5k,k): homotopy type, Betti numbers, certificate
    Table {
        #[arg(long, default_value_t = 8)]
        max_k: u32,
        /// Allow --max-k beyond the default ceiling of 8
        #[arg(long)]
        force: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    /// Fiberwise Gamma matchings; critical dimensions bounded by r(k)
    TheoremMain,
    /// Single critical vertex under the L(a)/M(a) threshold (needs --a)
    Contractible,
    /// Hand-tuned minimal matchings for (10,2), (15,3), (20,4), (25,5)
    Example,
}

impl Strategy {
    fn name(self) -> &'static str {
        match self {
            Strategy::TheoremMain => "theorem-main",
            Strategy::Contractible => "contractible",
            Strategy::Example => "example",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Err is a usage/precondition problem (exit 2); Ok carries the exit code for
/// completed runs (0, or 1 for verification failures).
fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Build { n, k } => cmd_build(n, k, cli.json, &cli.out),
        Command::Betti { n, k, torsion } => cmd_betti(n, k, torsion, cli.json, &cli.out),
        Command::Morse { n, k, strategy, a } => cmd_morse(n, k, strategy, a, cli.json, &cli.out),
        Command::Verify { n, k, file } => cmd_verify(n, k, &file, cli.json, &cli.out),
        Command::Mobius { k } => cmd_mobius(k, cli.json, &cli.out),
        Command::Bounds { a, k } => cmd_bounds(a, k, cli.json, &cli.out),
        Command::Table { max_k, force } => cmd_table(max_k, force, cli.json, &cli.out),
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), String> {
    print!("{text}");
    if let Some(path) = out {
        fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn complex(n: u32, k: u32) -> Result<FaceSet, String> {
    enumerate_faces(n, k).map_err(|e| e.to_string())
}

fn cmd_build(n: u32, k: u32, as_json: bool, out: &Option<PathBuf>) -> Result<ExitCode, String> {
    let fs = complex(n, k)?;
    let text = if as_json {
        let f_vector: Vec<Value> = fs
            .f_vector()
            .into_iter()
            .map(|(d, c)| json!([d, c]))
            .collect();
        json_text(&json!({
            "n": n,
            "k": k,
            "facets": fs.facets().len(),
            "dim": fs.dim(),
            "f_vector": f_vector,
            "total_faces": fs.total_faces(),
            "euler": fs.euler_characteristic(),
            "reduced_euler": fs.reduced_euler_characteristic(),
        }))
    } else {
        let mut t = String::new();
        t.push_str(&format!("n\t{n}\n"));
        t.push_str(&format!("k\t{k}\n"));
        t.push_str(&format!("facets\t{}\n", fs.facets().len()));
        t.push_str(&format!("dim\t{}\n", fs.dim()));
        for (d, c) in fs.f_vector() {
            t.push_str(&format!("f\t{d}\t{c}\n"));
        }
        t.push_str(&format!("total_faces\t{}\n", fs.total_faces()));
        t.push_str(&format!("euler\t{}\n", fs.euler_characteristic()));
        t.push_str(&format!(
            "reduced_euler\t{}\n",
            fs.reduced_euler_characteristic()
        ));
        t
    };
    emit(&text, out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_betti(
    n: u32,
    k: u32,
    torsion: bool,
    as_json: bool,
    out: &Option<PathBuf>,
) -> Result<ExitCode, String> {
    let fs = complex(n, k)?;
    let report = reduced_homology(&fs);
    let text = if as_json {
        let torsion_lists: Vec<Value> = report
            .torsion
            .iter()
            .map(|t| Value::from(t.iter().map(|c| c.to_string()).collect::<Vec<_>>()))
            .collect();
        json_text(&json!({
            "n": n,
            "k": k,
            "dim": report.dim,
            "betti": report.betti,
            "torsion": torsion_lists,
        }))
    } else {
        let mut t = String::new();
        for (i, b) in report.betti.iter().enumerate() {
            if torsion {
                let list = if report.torsion[i].is_empty() {
                    "-".to_string()
                } else {
                    report.torsion[i]
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                t.push_str(&format!("{i}\t{b}\t{list}\n"));
            } else {
                t.push_str(&format!("{i}\t{b}\n"));
            }
        }
        t
    };
    emit(&text, out)?;
    Ok(ExitCode::SUCCESS)
}

fn run_strategy(
    fs: &FaceSet,
    strategy: Strategy,
    a: Option<u64>,
) -> Result<(StrategyReport, Option<u64>), String> {
    match strategy {
        Strategy::TheoremMain => Ok((build_fiber_matching(fs), None)),
        Strategy::Example => build_minimal_matching(fs)
            .map(|r| (r, None))
            .map_err(|e| e.to_string()),
        Strategy::Contractible => {
            let a = a.ok_or("--a is required for --strategy=contractible")?;
            build_contraction_matching(fs, a)
                .map(|r| (r, Some(a)))
                .map_err(|e| e.to_string())
        }
    }
}

fn morse_vector_line(report: &StrategyReport) -> String {
    report
        .morse_vector
        .counts()
        .iter()
        .map(|(d, c)| format!("c{d}={c}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn cmd_morse(
    n: u32,
    k: u32,
    strategy: Strategy,
    a: Option<u64>,
    as_json: bool,
    out: &Option<PathBuf>,
) -> Result<ExitCode, String> {
    let fs = complex(n, k)?;
    let (report, used_a) = run_strategy(&fs, strategy, a)?;
    let counting_ok = fs.total_faces() - 1 == 2 * report.matching.len() + report.critical.len();
    let euler_ok = report.morse_vector.euler() == fs.euler_characteristic();
    let ok = report.acyclic && counting_ok && euler_ok;

    let text = if as_json {
        let mut mv = serde_json::Map::new();
        for (d, c) in report.morse_vector.counts() {
            mv.insert(d.to_string(), json!(c));
        }
        let mut v = json!({
            "n": n,
            "k": k,
            "strategy": strategy.name(),
            "acyclic": report.acyclic,
            "pairs": report.matching.len(),
            "critical": report.critical.len(),
            "morse_vector": Value::Object(mv),
            "critical_cells": report.critical,
            "homotopy": report.homotopy_summary,
        });
        if let Some(a) = used_a {
            let obj = v.as_object_mut().expect("object");
            obj.insert("a".to_string(), json!(a));
            obj.insert(
                "threshold".to_string(),
                json!(bound_certificate(a)
                    .expect("a >= 2 after a successful run")
                    .threshold_int()
                    .to_string()),
            );
        }
        json_text(&v)
    } else {
        let mut t = String::new();
        t.push_str(&format!("strategy\t{}\n", strategy.name()));
        t.push_str(&format!("n\t{n}\n"));
        t.push_str(&format!("k\t{k}\n"));
        t.push_str(&format!("acyclic\t{}\n", report.acyclic));
        t.push_str(&format!("pairs\t{}\n", report.matching.len()));
        t.push_str(&format!("critical\t{}\n", report.critical.len()));
        t.push_str(&format!("morse_vector\t{}\n", morse_vector_line(&report)));
        t.push_str(&format!(
            "homotopy\t{}\n",
            report.homotopy_summary.as_deref().unwrap_or("-")
        ));
        if let Some(a) = used_a {
            t.push_str(&format!("a\t{a}\n"));
            t.push_str(&format!(
                "threshold\t{}\n",
                bound_certificate(a)
                    .expect("a >= 2 after a successful run")
                    .threshold_int()
            ));
        }
        for c in &report.critical {
            t.push_str(&format!("critical_cell\t{c}\n"));
        }
        t
    };
    print!("{text}");
    if let Some(path) = out {
        let matching_file = write_matching(&report.matching, &report.critical);
        fs::write(path, matching_file)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_verify(
    n: u32,
    k: u32,
    file: &PathBuf,
    as_json: bool,
    out: &Option<PathBuf>,
) -> Result<ExitCode, String> {
    let fs = complex(n, k)?;
    let content =
        fs::read_to_string(file).map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    let (matching, listed_critical) = parse_matching(n, k, &content).map_err(|e| e.to_string())?;

    let mut violation: Option<String> = None;
    if let Err(v) = verify_matching(&fs, &matching) {
        violation = Some(v.to_string());
    } else if !listed_critical.is_empty() {
        let mut actual = critical_cells(&fs, &matching);
        let mut listed = listed_critical.clone();
        actual.sort_by_key(|f| (f.dimension(), *f));
        listed.sort_by_key(|f| (f.dimension(), *f));
        if actual != listed {
            violation = Some(format!(
                "critical section mismatch: file lists {} cells, matching leaves {}",
                listed.len(),
                actual.len()
            ));
        }
    }

    let verified = violation.is_none();
    let text = if as_json {
        json_text(&json!({
            "n": n,
            "k": k,
            "verified": verified,
            "pairs": matching.len(),
            "violation": violation,
        }))
    } else {
        let mut t = format!("verified\t{verified}\n");
        match &violation {
            Some(v) => t.push_str(&format!("violation\t{v}\n")),
            None => {
                t.push_str(&format!("pairs\t{}\n", matching.len()));
                t.push_str(&format!(
                    "critical\t{}\n",
                    critical_cells(&fs, &matching).len()
                ));
            }
        }
        t
    };
    emit(&text, out)?;
    Ok(if verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_mobius(k: u32, as_json: bool, out: &Option<PathBuf>) -> Result<ExitCode, String> {
    let classical = mobius(k as u64).map_err(|e| e.to_string())?;
    let via_gamma = mobius_via_gamma(k);
    let agree = classical == via_gamma;
    let text = if as_json {
        json_text(&json!({
            "k": k,
            "mobius": classical,
            "mobius_via_gamma": via_gamma,
            "agree": agree,
        }))
    } else {
        format!("k\t{k}\nmobius\t{classical}\nmobius_via_gamma\t{via_gamma}\nagree\t{agree}\n")
    };
    emit(&text, out)?;
    Ok(if agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn factorization_line(fact: &[(u64, u32)]) -> String {
    fact.iter()
        .map(|(p, e)| {
            if *e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn cmd_bounds(
    a: Option<u64>,
    k: Option<u64>,
    as_json: bool,
    out: &Option<PathBuf>,
) -> Result<ExitCode, String> {
    let text = match (a, k) {
        (Some(a), None) => {
            let cert = bound_certificate(a).map_err(|e| e.to_string())?;
            if as_json {
                let fact: Vec<Value> = cert
                    .l_factorization
                    .iter()
                    .map(|(p, e)| json!([p, e]))
                    .collect();
                json_text(&json!({
                    "a": cert.a,
                    "l": cert.l.to_string(),
                    "l_factorization": fact,
                    "m": cert.m.to_string(),
                    "threshold": cert.threshold_int().to_string(),
                    "applies": cert.applies_to(),
                }))
            } else {
                format!(
                    "a\t{}\nl\t{}\nl_factorization\t{}\nm\t{}\nthreshold\t{}\napplies\t{}\n",
                    cert.a,
                    cert.l,
                    factorization_line(&cert.l_factorization),
                    cert.m,
                    cert.threshold_int(),
                    cert.applies_to()
                )
            }
        }
        (None, Some(k)) => {
            let r = r_of_k(k).map_err(|e| e.to_string())?;
            let lower = nth_primorial(r - 1);
            let upper = nth_primorial(r);
            let ratio = asymptotic_ratio(k)
                .map(|x| format!("{x:.6}"))
                .unwrap_or_else(|_| "-".to_string());
            if as_json {
                json_text(&json!({
                    "k": k,
                    "r": r,
                    "primorial_lower": lower.to_string(),
                    "primorial_upper": upper.to_string(),
                    "asymptotic_ratio": ratio,
                }))
            } else {
                format!(
                    "k\t{k}\nr\t{r}\nprimorial_lower\t{lower}\nprimorial_upper\t{upper}\nasymptotic_ratio\t{ratio}\n"
                )
            }
        }
        _ => return Err("exactly one of --a or --k is required".to_string()),
    };
    emit(&text, out)?;
    Ok(ExitCode::SUCCESS)
}

struct TableRow {
    k: u32,
    n: u32,
    summary: String,
    betti: Vec<u64>,
    detail: String,
    ok: bool,
}

fn betti_line(betti: &[u64]) -> String {
    let nonzero: Vec<String> = betti
        .iter()
        .enumerate()
        .filter(|&(_, &b)| b > 0)
        .map(|(i, b)| format!("b~{i}={b}"))
        .collect();
    if nonzero.is_empty() {
        "0".to_string()
    } else {
        nonzero.join(",")
    }
}

fn table_row(k: u32) -> Result<TableRow, String> {
    let n = 5 * k;
    let fs = complex(n, k)?;
    let homology = reduced_homology(&fs);
    let (report, used_a) = if (2..=5).contains(&k) {
        run_strategy(&fs, Strategy::Example, None)?
    } else if k >= 6 {
        let a = contractibility_witness(n as u64, k as u64)
            .ok_or_else(|| format!("no contractibility witness for vdW({n},{k})"))?;
        run_strategy(&fs, Strategy::Contractible, Some(a))?
    } else {
        run_strategy(&fs, Strategy::TheoremMain, None)?
    };
    let summary = report
        .homotopy_summary
        .clone()
        .unwrap_or_else(|| "-".to_string());
    let detail = match used_a {
        Some(a) => format!("a={a}"),
        None => format!("critical={}", report.critical.len()),
    };
    // the Morse-side summary must agree with the oracle
    let signature_ok = match report.homotopy_summary.as_deref() {
        Some("contractible") => homology.wedge_signature() == Some((0, 0)),
        Some(_) => {
            let top = report.morse_vector.max_dim().expect("has critical cells");
            homology.wedge_signature() == Some((top, report.morse_vector.count(top) as u64))
        }
        None => false,
    };
    let ok = report.acyclic && signature_ok;
    Ok(TableRow {
        k,
        n,
        summary,
        betti: homology.betti,
        detail,
        ok,
    })
}

fn cmd_table(
    max_k: u32,
    force: bool,
    as_json: bool,
    out: &Option<PathBuf>,
) -> Result<ExitCode, String> {
    if max_k < 1 {
        return Err("--max-k must be at least 1".to_string());
    }
    if max_k > 8 && !force {
        return Err("--max-k beyond 8 needs --force (larger rows get expensive)".to_string());
    }
    let rows: Vec<TableRow> = (1..=max_k).map(table_row).collect::<Result<_, _>>()?;
    let all_ok = rows.iter().all(|r| r.ok);
    let text = if as_json {
        let items: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "k": r.k,
                    "n": r.n,
                    "summary": r.summary,
                    "betti": r.betti,
                    "detail": r.detail,
                    "ok": r.ok,
                })
            })
            .collect();
        json_text(&json!({ "rows": items }))
    } else {
        let mut t = String::new();
        for r in &rows {
            t.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.k,
                r.n,
                r.summary,
                betti_line(&r.betti),
                r.detail
            ));
        }
        t
    };
    emit(&text, out)?;
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
