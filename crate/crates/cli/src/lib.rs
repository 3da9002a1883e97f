//! Command-line front end for the SA(2,Z) deciders.

pub mod io;
pub mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sa2_core::algebra::classify;
use sa2_core::oracle::{bfs_semigroup_with, cross_validate_with, seeded_corpus, CorpusSummary, CrossReport};
use sa2_core::pipeline::{decide_group_problem, decide_identity_problem, Decision, IdentityDecision, Instance};
use sa2_core::sl2group::{analyze_group, CaseOutcome, GroupCase};
use sa2_core::witness::{evaluate_word, PowerWord};
use sa2_core::{Caps, Error};

use crate::io::{int_value, layered_caps, load_certificate, load_instance, to_lossless, CliError, CAPS_ENV};

pub const EXIT_INVALID: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sa2", version, about = "Group and Identity Problems in SA(2,Z)")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Override the search depth cap.
    #[arg(long, global = true)]
    caps_depth: Option<usize>,
    /// Override the entry norm cap.
    #[arg(long, global = true)]
    caps_norm: Option<u64>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the semigroup is a group.
    DecideGroup { file: PathBuf },
    /// Decide whether the semigroup contains the identity.
    DecideIdentity { file: PathBuf },
    /// Element classes and the case of the matrix group.
    Classify { file: PathBuf },
    /// Check an identity certificate, given as a file or inline JSON.
    Verify { file: PathBuf, cert: String },
    /// Bounded enumeration of the semigroup.
    Oracle { file: PathBuf },
    /// Cross-validate a seeded random corpus.
    Corpus {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 300)]
        count: usize,
        /// Depth of the enumeration oracle.
        #[arg(long, default_value_t = 8)]
        oracle_depth: usize,
    },
    /// Draw the cells of a positive-scale instance.
    RenderCells {
        file: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
}

struct Ctx<'a> {
    global: GlobalArgs,
    env_caps: Option<String>,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn caps(&self, file_caps: Option<&serde_json::Map<String, Value>>) -> Result<Caps, CliError> {
        layered_caps(self.env_caps.as_deref(), file_caps, self.global.caps_depth, self.global.caps_norm)
    }

    fn load(&self, path: &Path) -> Result<(Instance, Caps), CliError> {
        let f = load_instance(path)?;
        let caps = self.caps(f.caps.as_ref())?;
        Ok((f.instance, caps))
    }

    fn emit_json(&mut self, v: &Value) {
        let _ = writeln!(self.out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
    }

    fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", s.as_ref());
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run_cli<S: AsRef<str>>(argv: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let env_caps = std::env::var(CAPS_ENV).ok();
    run_cli_with_env(argv, env_caps, out, err)
}

/// As [`run_cli`], with the caps override passed explicitly.
pub fn run_cli_with_env<S: AsRef<str>>(
    argv: &[S],
    env_caps: Option<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(AsRef::as_ref)) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_INVALID
                }
            };
        }
    };
    let mut ctx = Ctx { global: cli.global, env_caps, out, err };
    match dispatch(&mut ctx, cli.command) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn dispatch(ctx: &mut Ctx<'_>, cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::DecideGroup { file } => {
            let (inst, caps) = ctx.load(&file)?;
            let d = decide_group_problem(&inst, &caps);
            if ctx.global.json {
                ctx.emit_json(&to_lossless(&d));
            } else {
                print_decision(ctx, &d);
            }
            Ok(d.exit_code())
        }
        Command::DecideIdentity { file } => {
            let (inst, caps) = ctx.load(&file)?;
            let d = match decide_identity_problem(&inst, &caps) {
                Ok(d) => d,
                Err(Error::Resource(msg)) => {
                    let _ = writeln!(ctx.err, "inconclusive: {msg}");
                    return Ok(2);
                }
                Err(e) => return Err(CliError(e.to_string())),
            };
            if ctx.global.json {
                ctx.emit_json(&to_lossless(&d));
            } else {
                print_identity(ctx, &d);
            }
            Ok(d.exit_code())
        }
        Command::Classify { file } => {
            let (inst, caps) = ctx.load(&file)?;
            let v = classification(&inst, &caps);
            if ctx.global.json {
                ctx.emit_json(&v);
            } else {
                for g in v["generators"].as_array().into_iter().flatten() {
                    ctx.line(format!("A{}: {}", g["index"], g["class"].as_str().unwrap_or("")));
                }
                ctx.line(format!("group case: {}", v["group_case"].as_str().unwrap_or("")));
                if let Some(g) = v.get("generator") {
                    ctx.line(format!("cyclic generator: {g}"));
                    ctx.line(format!("exponents: {}", v["exponents"]));
                }
            }
            Ok(0)
        }
        Command::Verify { file, cert } => {
            let (inst, _) = ctx.load(&file)?;
            let w = load_certificate(&cert)?;
            let (ok, reason) = check_certificate(&w, &inst)?;
            if ctx.global.json {
                ctx.emit_json(&json!({ "valid": ok, "reason": reason }));
            } else {
                ctx.line(if ok { "valid".to_string() } else { format!("invalid: {reason}") });
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Oracle { file } => {
            let (inst, caps) = ctx.load(&file)?;
            match bfs_semigroup_with(inst.generators(), &caps) {
                Ok(r) => {
                    ctx.emit_json(&to_lossless(&r));
                    Ok(0)
                }
                Err(Error::Resource(msg)) => {
                    let _ = writeln!(ctx.err, "oracle stopped: {msg}");
                    Ok(2)
                }
                Err(e) => Err(CliError(e.to_string())),
            }
        }
        Command::Corpus { seed, count, oracle_depth } => {
            let caps = ctx.caps(None)?;
            let oracle_caps = caps.clone().with_depth(oracle_depth);
            let summary = run_corpus(seed, count, &caps, &oracle_caps);
            if ctx.global.json {
                ctx.emit_json(&to_lossless(&summary));
            } else {
                ctx.line(format!("instances: {}", summary.instances));
                ctx.line(format!("is-group: {}", summary.is_group));
                ctx.line(format!("not-group: {}", summary.not_group));
                ctx.line(format!("inconclusive: {}", summary.inconclusive));
                ctx.line(format!("certificates: {}", summary.certificates));
                ctx.line(format!("contradictions: {}", summary.contradictions));
                let mut cases: Vec<_> = summary.by_case.iter().collect();
                cases.sort();
                for (c, n) in cases {
                    ctx.line(format!("  {c}: {n}"));
                }
                for f in &summary.failures {
                    ctx.line(format!("FAIL {f}"));
                }
            }
            Ok(if summary.contradictions == 0 { 0 } else { 1 })
        }
        Command::RenderCells { file, output } => {
            let (inst, caps) = ctx.load(&file)?;
            let data = svg::scale_case_of(&inst, &caps)?;
            let doc = svg::cells_svg(&data);
            std::fs::write(&output, doc).map_err(|e| CliError(format!("{}: {e}", output.display())))?;
            ctx.line(format!("wrote {}", output.display()));
            Ok(0)
        }
    }
}

fn print_decision(ctx: &mut Ctx<'_>, d: &Decision) {
    match d {
        Decision::IsGroup { certificate, case } => {
            ctx.line("decision: is-group");
            ctx.line(format!("case: {case}"));
            if let Some(w) = certificate {
                ctx.line(format!("certificate: {}", compact(&to_lossless(w))));
            }
        }
        Decision::NotGroup { reason, case } => {
            ctx.line("decision: not-group");
            ctx.line(format!("case: {case}"));
            ctx.line(format!("reason: {reason}"));
        }
        Decision::Inconclusive { stage, .. } => {
            ctx.line("decision: inconclusive");
            ctx.line(format!("stage: {stage}"));
        }
    }
}

fn print_identity(ctx: &mut Ctx<'_>, d: &IdentityDecision) {
    match d {
        IdentityDecision::Present { subset, certificate, case } => {
            ctx.line("identity: present");
            ctx.line(format!("subset: {subset:?}"));
            ctx.line(format!("case: {case}"));
            if let Some(w) = certificate {
                ctx.line(format!("certificate: {}", compact(&to_lossless(w))));
            }
        }
        IdentityDecision::Absent { subsets_checked } => {
            ctx.line("identity: absent");
            ctx.line(format!("subsets checked: {subsets_checked}"));
        }
        IdentityDecision::Inconclusive { stage, subset, .. } => {
            ctx.line("identity: inconclusive");
            ctx.line(format!("stage: {stage}"));
            ctx.line(format!("subset: {subset:?}"));
        }
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn classification(inst: &Instance, caps: &Caps) -> Value {
    let gens: Vec<Value> = inst
        .matrices()
        .iter()
        .enumerate()
        .map(|(i, m)| json!({ "index": i + 1, "class": classify(m).label() }))
        .collect();
    let mut v = json!({ "generators": gens });
    match analyze_group(&inst.matrices(), caps) {
        CaseOutcome::Decided(c) => {
            v["group_case"] = Value::from(c.label());
            if let GroupCase::CyclicBy { generator, exponents, .. } = &c {
                let [[a, b], [cc, d]] = generator.entries();
                v["generator"] = json!([[int_value(a), int_value(b)], [int_value(cc), int_value(d)]]);
                v["exponents"] = Value::Array(exponents.iter().map(int_value).collect());
            }
        }
        CaseOutcome::Inconclusive { stage, .. } => {
            v["group_case"] = Value::from(format!("inconclusive: {stage}"));
        }
    }
    v
}

fn check_certificate(w: &PowerWord, inst: &Instance) -> Result<(bool, String), CliError> {
    let k = inst.len();
    if w.max_index() > k {
        return Ok((false, format!("index {} exceeds the {k} generators", w.max_index())));
    }
    if !w.is_full_image(k) {
        return Ok((false, "not full-image".into()));
    }
    let x = evaluate_word(w, inst.generators()).map_err(|e| CliError(e.to_string()))?;
    if x.is_identity() {
        Ok((true, "product is (I, 0)".into()))
    } else {
        Ok((false, format!("product is {x}")))
    }
}

/// Cross-validates the seeded corpus on all available cores.
pub fn run_corpus(seed: u64, count: usize, caps: &Caps, oracle_caps: &Caps) -> CorpusSummary {
    let corpus = seeded_corpus(seed, count);
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(corpus.len().max(1));
    let chunk = corpus.len().div_ceil(threads).max(1);
    let reports: Vec<Vec<(String, CrossReport)>> = std::thread::scope(|s| {
        let handles: Vec<_> = corpus
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter().map(|(name, inst)| (name.clone(), cross_validate_with(inst, caps, oracle_caps))).collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut summary = CorpusSummary::default();
    for (name, r) in reports.iter().flatten() {
        summary.record(name, r);
    }
    summary
}
