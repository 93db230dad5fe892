//! `tatecomplex` command-line front end: validate → extract-torsion →
//! reduce → e2 → diagrams → steinberg, each stage writing deterministic
//! JSON artifacts (schema `tatecomplex/1`) into the output directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use log::info;
use serde_json::{json, Value};

use tatecomplex::complex::GroupedComplex;
use tatecomplex::fusion::{FusionMode, FusionPolicy};
use tatecomplex::groups::structure_name;
use tatecomplex::io::{self, AlgebraSetup, ErrataMode, RunConfig};
use tatecomplex::morse::{build_vector_field, morse_reduce, VectorField};
use tatecomplex::specseq::{self, PageTable};

#[derive(Parser, Debug)]
#[command(name = "tatecomplex", version, about = "Torsion subcomplexes, Morse reduction and Farrell–Tate E2 pages")]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Prime ℓ (overrides the configuration).
    #[arg(long, global = true)]
    l: Option<u64>,
    /// Largest cohomological degree q (overrides the configuration).
    #[arg(long, global = true)]
    qmax: Option<u16>,
    /// Fusion policy: strict, bredon, sylow or oracle.
    #[arg(long, global = true)]
    policy: Option<FusionMode>,
    /// Cell ordering file, or `default`.
    #[arg(long, global = true)]
    ordering: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Check the complex of groups; exits 1 on violations.
    Validate,
    /// Keep the cells whose stabilizer has ℓ-torsion.
    ExtractTorsion,
    /// Build the fusion-controlled vector field and reduce.
    Reduce,
    /// E1/E2 pages, collapse and Farrell–Tate totals.
    E2,
    /// Check the restriction diagrams; exits 1 on mismatches.
    Diagrams,
    /// Steinberg exact-sequence bookkeeping.
    Steinberg,
    /// All stages, plus summary.json.
    Pipeline,
    /// Human-readable summary of a pipeline run.
    Report,
}

/// Stage outcome: artifacts written, and whether a check failed.
struct Outcome {
    summary: Value,
    failed: bool,
}

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
    qmax: u16,
    ordering: Option<Vec<String>>,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Self> {
        let path = cli.config.as_deref().context("--config is required for this command")?;
        let mut cfg = RunConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
        if let Some(l) = cli.l {
            cfg.l = l;
            cfg.policy.l = Some(l);
        }
        if let Some(mode) = cli.policy {
            cfg.policy.mode = mode;
        }
        let ordering = match cli.ordering.as_deref() {
            Some("default") => None,
            Some(p) => Some(io::load_ordering(Path::new(p))?),
            None => cfg.ordering()?,
        };
        fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
        Ok(Ctx { qmax: cli.qmax.unwrap_or(cfg.qmax), cfg, out: cli.out.clone(), ordering })
    }

    fn policy(&self) -> FusionPolicy {
        self.cfg.policy()
    }

    fn write(&self, name: &str, value: &Value) -> Result<()> {
        io::write_tagged(&self.out.join(name), value).with_context(|| format!("writing {name}"))
    }

    fn write_text(&self, name: &str, text: &str) -> Result<()> {
        fs::write(self.out.join(name), text).with_context(|| format!("writing {name}"))
    }

    fn has_algebra(&self) -> bool {
        self.cfg.algebra.is_some() && self.cfg.maps.is_some()
    }
}

fn validate(ctx: &Ctx) -> Result<Outcome> {
    let lc = ctx.cfg.load_complex()?;
    let violations: Vec<String> = lc.complex.validate(ctx.cfg.l).iter().map(ToString::to_string).collect();
    for v in &violations {
        log::error!("{v}");
    }
    let summary = json!({
        "passed": violations.is_empty(),
        "cells": lc.complex.cells().len(),
        "orbits": lc.complex.orbits().len(),
        "violations": violations,
    });
    ctx.write("validation.json", &summary)?;
    Ok(Outcome { failed: !violations.is_empty(), summary })
}

fn extract(ctx: &Ctx) -> Result<(GroupedComplex, Value)> {
    let lc = ctx.cfg.load_complex()?;
    let t = lc.complex.torsion_subcomplex(ctx.cfg.l)?;
    ctx.write("torsion.json", &io::complex_to_json(&t))?;
    let summary = json!({"cells": t.cells().len(), "orbits": t.orbits().len(), "dropped": lc.complex.cells().len() - t.cells().len()});
    Ok((t, summary))
}

fn reduce(ctx: &Ctx, torsion: &GroupedComplex) -> Result<Value> {
    let lc = ctx.cfg.load_complex()?;
    let policy = ctx.policy();
    let (field, source) = if !lc.premerge.is_empty() {
        let arrows: Vec<(String, String)> = lc.premerge.iter().map(|a| (a.lower.clone(), a.upper.clone())).collect();
        (VectorField::from_arrows(torsion, &arrows, &policy)?, "fixture pre-merge")
    } else if let Some(p) = &ctx.cfg.field {
        (VectorField::from_arrows(torsion, &io::load_field(p)?, &policy)?, "explicit field")
    } else {
        (build_vector_field(torsion, ctx.cfg.l, &policy, ctx.ordering.as_deref()), "greedy construction")
    };
    let reduced = morse_reduce(torsion, &field)?;
    let mut audit = String::new();
    for a in &field.audit {
        writeln!(audit, "fusion {} < {}: {}", a.lower, a.upper, a.verdict)?;
    }
    for a in &field.arrows {
        let cert = a
            .certificate
            .as_ref()
            .map_or("uncertified".to_string(), |c| format!("{} {} via {}", c.mode, c.verdict, c.map));
        writeln!(audit, "arrow {} -> {}: {cert}", a.lower, a.upper)?;
    }
    for c in field.critical() {
        writeln!(audit, "critical {c}")?;
    }
    ctx.write_text("audit.log", &audit)?;
    ctx.write("vector_field.json", &json!({"source": source, "policy": policy.mode, "field": field}))?;
    ctx.write("reduced.json", &io::complex_to_json(&reduced))?;
    let critical: Vec<Value> = reduced
        .cells()
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "dim": c.dim,
                "stabilizer": c.stabilizer,
                "type": reduced.stabilizer(&c.id).map(|g| structure_name(g)),
            })
        })
        .collect();
    info!("reduce: {} arrows, {} critical cells", field.arrows.len(), critical.len());
    Ok(json!({"source": source, "arrows": field.arrows.len(), "critical": critical}))
}

/// Computes the page; with `write`, stores e2.json/e2.tsv.
fn e2(ctx: &Ctx, qmax: u16, write: bool) -> Result<(PageTable, Value)> {
    let setup = AlgebraSetup::load(&ctx.cfg, qmax, ErrataMode::Flagged)?;
    let assignment = setup.assignment()?;
    let table = specseq::e2_page(&setup.complex, &assignment, qmax)?;
    let collapse = specseq::detect_collapse(&table);
    let totals = specseq::total_dimensions(&table).ok();
    let d1sq = specseq::check_d1_squared(&setup.complex, &assignment, qmax)?;
    let surjective: Vec<bool> = (0..=qmax).map(|q| table.surjective(0, q)).collect();
    let summary = json!({
        "qmax": qmax,
        "e2_column0": table.e2.iter().map(|r| r.first().copied().unwrap_or(0)).collect::<Vec<_>>(),
        "totals": totals,
        "collapse": collapse,
        "d1_squared_zero": d1sq.passed,
        "d1_0_surjective": surjective,
        "errata_applied": setup.maps.applied,
    });
    if write {
        ctx.write("e2.json", &json!({"page": table, "summary": summary, "d1_squared": d1sq}))?;
        let mut tsv = String::from("p\tq\tdim\n");
        for q in 0..=qmax {
            for p in 0..table.columns {
                writeln!(tsv, "{p}\t{q}\t{}", table.e2(p, q))?;
            }
        }
        if let Some(t) = &totals {
            tsv.push_str("\nn\ttotal\n");
            for (n, d) in t.iter().enumerate() {
                writeln!(tsv, "{n}\t{d}")?;
            }
        }
        ctx.write_text("e2.tsv", &tsv)?;
    }
    Ok((table, summary))
}

fn diagrams(ctx: &Ctx) -> Result<Outcome> {
    let path = ctx.cfg.require("diagrams", &ctx.cfg.diagrams)?;
    let setup = AlgebraSetup::load(&ctx.cfg, ctx.qmax.min(12), ErrataMode::Flagged)?;
    let reports = specseq::verify_restriction_diagrams(&setup.assignment()?, &io::load_diagrams(path)?);
    let failed = reports.iter().any(|r| !r.passed());
    let summary = json!({"passed": !failed, "diagrams": reports});
    ctx.write("diagrams.json", &summary)?;
    Ok(Outcome { summary, failed })
}

fn steinberg(ctx: &Ctx) -> Result<Value> {
    let spec = ctx.cfg.steinberg.clone().context("no steinberg block in the configuration")?;
    let q = ctx.qmax.max(spec.vcd as u16);
    let (table, _) = e2(ctx, q, false)?;
    let totals = specseq::total_dimensions(&table)?;
    let rep =
        specseq::steinberg_report(&totals, &spec.group_cohomology, spec.connecting.as_deref(), &spec.known, spec.vcd)?;
    let value = json!({"farrell_tate": &totals[..spec.vcd], "group_cohomology": spec.group_cohomology, "report": rep});
    ctx.write("steinberg.json", &value)?;
    Ok(value)
}

fn pipeline(ctx: &Ctx) -> Result<Outcome> {
    let mut summary = serde_json::Map::new();
    summary.insert("l".into(), json!(ctx.cfg.l));
    summary.insert("policy".into(), json!(ctx.cfg.policy.mode));
    summary.insert("qmax".into(), json!(ctx.qmax));
    let v = validate(ctx).context("stage validate")?;
    summary.insert("validate".into(), v.summary);
    if v.failed {
        ctx.write("summary.json", &Value::Object(summary))?;
        return Ok(Outcome { summary: Value::Null, failed: true });
    }
    let (torsion, t) = extract(ctx).context("stage extract-torsion")?;
    summary.insert("torsion".into(), t);
    summary.insert("reduce".into(), reduce(ctx, &torsion).context("stage reduce")?);
    let mut failed = false;
    if ctx.has_algebra() && ctx.qmax > 0 {
        let (_, s) = e2(ctx, ctx.qmax, true).context("stage e2")?;
        failed |= s["d1_squared_zero"] == json!(false);
        summary.insert("e2".into(), s);
        if ctx.cfg.diagrams.is_some() {
            let d = diagrams(ctx).context("stage diagrams")?;
            failed |= d.failed;
            summary.insert("diagrams".into(), d.summary);
        }
        if ctx.cfg.steinberg.is_some() {
            summary.insert("steinberg".into(), steinberg(ctx).context("stage steinberg")?);
        }
    }
    let summary = Value::Object(summary);
    ctx.write("summary.json", &summary)?;
    Ok(Outcome { summary, failed })
}

fn report(out: &Path) -> Result<()> {
    let path = out.join("summary.json");
    if !path.exists() {
        bail!("MissingArtifacts: no summary.json in {} (run `pipeline` first)", out.display());
    }
    let s: Value = serde_json::from_str(&fs::read_to_string(&path)?)?;
    let mut t = String::new();
    writeln!(t, "tatecomplex report")?;
    writeln!(t, "l: {}  policy: {}  qmax: {}", s["l"], s["policy"].as_str().unwrap_or("?"), s["qmax"])?;
    if let Some(v) = s.get("validate") {
        writeln!(
            t,
            "validation: {} ({} cells, {} orbits)",
            if v["passed"] == json!(true) { "passed" } else { "FAILED" },
            v["cells"],
            v["orbits"]
        )?;
        for x in v["violations"].as_array().into_iter().flatten() {
            writeln!(t, "  violation: {}", x.as_str().unwrap_or_default())?;
        }
    }
    if let Some(tor) = s.get("torsion") {
        writeln!(t, "torsion subcomplex: {} cells in {} orbits", tor["cells"], tor["orbits"])?;
    }
    if let Some(r) = s.get("reduce") {
        writeln!(t, "reduction ({}): {} arrows", r["source"].as_str().unwrap_or("?"), r["arrows"])?;
        let mut by_dim: BTreeMap<u64, Vec<String>> = BTreeMap::new();
        for c in r["critical"].as_array().into_iter().flatten() {
            let label = format!("{} [{}]", c["id"].as_str().unwrap_or("?"), c["type"].as_str().unwrap_or("?"));
            by_dim.entry(c["dim"].as_u64().unwrap_or(0)).or_default().push(label);
        }
        for (d, cells) in by_dim {
            writeln!(t, "  critical {d}-cells: {}", cells.join(", "))?;
        }
    }
    if let Some(e) = s.get("e2") {
        writeln!(t, "collapse: {} ({})", e["collapse"]["collapses"], e["collapse"]["reason"].as_str().unwrap_or(""))?;
        writeln!(t, "d1 ∘ d1 = 0: {}", e["d1_squared_zero"])?;
        let surj: Vec<bool> = serde_json::from_value(e["d1_0_surjective"].clone()).unwrap_or_default();
        let onto: Vec<String> = surj.iter().enumerate().filter(|(_, b)| **b).map(|(q, _)| q.to_string()).collect();
        writeln!(t, "d1^{{0,q}} onto E1^{{1,q}} for q in: [{}]", onto.join(", "))?;
        writeln!(t, "E2^{{0,q}}: {}", e["e2_column0"])?;
        writeln!(t, "Farrell–Tate totals: {}", e["totals"])?;
        for x in e["errata_applied"].as_array().into_iter().flatten() {
            writeln!(
                t,
                "erratum applied: {} → {} {} := {}",
                x["lower"].as_str().unwrap_or(""),
                x["upper"].as_str().unwrap_or(""),
                x["generator"].as_str().unwrap_or(""),
                x["proposed"].as_str().unwrap_or("")
            )?;
        }
    }
    if let Some(d) = s.get("diagrams") {
        writeln!(t, "diagrams: {}", if d["passed"] == json!(true) { "passed" } else { "FAILED" })?;
    }
    if let Some(st) = s.get("steinberg") {
        writeln!(t, "Steinberg homology (k: trivial-connecting value, range):")?;
        for r in st["report"]["rows"].as_array().into_iter().flatten() {
            let max = if r["max"].is_null() { "∞".to_string() } else { r["max"].to_string() };
            writeln!(t, "  H~_{}: {}  [{}, {}]", r["k"], r["trivial_connecting"], r["min"], max)?;
        }
    }
    fs::write(out.join("report.txt"), &t)?;
    io::write_tagged(&out.join("report.json"), &s)?;
    print!("{t}");
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    if cli.command == Command::Report {
        report(&cli.out)?;
        return Ok(true);
    }
    let ctx = Ctx::new(cli)?;
    let ok = match cli.command {
        Command::Validate => !validate(&ctx)?.failed,
        Command::ExtractTorsion => {
            let (_, s) = extract(&ctx)?;
            println!("{s}");
            true
        }
        Command::Reduce => {
            let (torsion, _) = extract(&ctx)?;
            println!("{}", reduce(&ctx, &torsion)?);
            true
        }
        Command::E2 => {
            let (_, s) = e2(&ctx, ctx.qmax, true)?;
            println!("{}", s["totals"]);
            s["d1_squared_zero"] == json!(true)
        }
        Command::Diagrams => !diagrams(&ctx)?.failed,
        Command::Steinberg => {
            println!("{}", steinberg(&ctx)?["report"]);
            true
        }
        Command::Pipeline => !pipeline(&ctx)?.failed,
        Command::Report => unreachable!(),
    };
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
