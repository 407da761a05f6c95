use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use normcheck_core::annotate::StandoffFile;
use normcheck_core::consistency::{CheckerConfig, ConsistencyFinding, Severity};
use normcheck_core::corpus::{extract_term_entries, Manifest};
use normcheck_core::ontology::{load_ontology, ontology_stats};
use normcheck_core::report::{emit_bundle, findings_csv, EmitOptions};
use normcheck_core::workflow::{run, RunInputs, RunOutputs};

/// Exit status when some documents failed but the run completed.
const EXIT_PARTIAL: u8 = 3;
/// Exit status under `--strict` when an Error finding exists.
const EXIT_STRICT: u8 = 4;

#[derive(Parser)]
#[command(name = "normcheck", version, about = "Ontology-driven consistency checks for multi-part standards")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the corpus and print its clause and term counts.
    Ingest {
        #[arg(long)]
        manifest: PathBuf,
        /// Write the parsed corpus as `corpus.json` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Annotate every document and write stand-off annotation files.
    Annotate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the consistency checks and print the findings.
    Check {
        #[command(flatten)]
        run: RunArgs,
        /// Also write `findings.json` and `findings.csv` here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
    },
    /// Propose candidate classes from the term definitions.
    Populate {
        #[command(flatten)]
        run: RunArgs,
        /// Write `candidates.json` here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline and write the report bundle.
    Report {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        strict: bool,
        /// Record the generation time in manifest.json.
        #[arg(long)]
        timestamps: bool,
    },
    /// Print class and property counts of ontology files.
    Stats {
        #[arg(required = true)]
        ontologies: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long = "ontology", required = true)]
    ontologies: Vec<PathBuf>,
    #[arg(long = "rules")]
    rules: Vec<PathBuf>,
    /// Registry of known standards; overrides the manifest's registry.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Minimum similarity for two definitions to count as duplicates.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    jobs: Option<usize>,
}

struct Diag {
    color: bool,
}

impl Diag {
    fn new() -> Self {
        Diag {
            color: std::env::var_os("NORMCHECK_NO_COLOR").is_none() && std::io::stderr().is_terminal(),
        }
    }

    fn emit(&self, label: &str, code: &str, msg: impl std::fmt::Display) {
        if self.color {
            eprintln!("\x1b[{code}m{label}:\x1b[0m {msg}");
        } else {
            eprintln!("{label}: {msg}");
        }
    }

    fn error(&self, msg: impl std::fmt::Display) {
        self.emit("error", "1;31", msg);
    }

    fn warn(&self, msg: impl std::fmt::Display) {
        self.emit("warning", "1;33", msg);
    }
}

enum Outcome {
    Ok,
    Partial,
    Strict,
}

fn run_inputs(args: &RunArgs) -> Result<RunInputs> {
    let checker = match args.threshold {
        Some(t) => CheckerConfig::with_threshold(t)?,
        None => CheckerConfig::default(),
    };
    Ok(RunInputs {
        manifest: args.manifest.clone(),
        ontologies: args.ontologies.clone(),
        rules: args.rules.clone(),
        registry: args.registry.clone(),
        checker,
        jobs: args.jobs,
    })
}

/// Validates paths, reporting every missing one, then runs the pipeline.
fn execute(args: &RunArgs, diag: &Diag) -> Result<Option<RunOutputs>> {
    let inputs = run_inputs(args)?;
    let missing = inputs.missing_paths();
    if !missing.is_empty() {
        for p in &missing {
            diag.error(format!("input not found: {}", p.display()));
        }
        return Ok(None);
    }
    let out = run(&inputs)?;
    for (doc, why) in &out.failures {
        diag.error(format!("document {doc}: {why}"));
    }
    for o in &out.ontologies {
        for w in &o.warnings {
            diag.warn(format!("{}: {w}", o.model.ontology_id));
        }
    }
    Ok(Some(out))
}

fn outcome(out: &RunOutputs, strict: bool) -> Outcome {
    if !out.failures.is_empty() {
        Outcome::Partial
    } else if strict && out.findings.iter().any(|f| f.severity == Severity::Error) {
        Outcome::Strict
    } else {
        Outcome::Ok
    }
}

fn write_json<T: serde::Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn finding_line(f: &ConsistencyFinding) -> String {
    let loc = f.primary();
    let clause = if loc.clause_number.is_empty() { "-" } else { &loc.clause_number };
    format!("{} {} {} {} {}: {}", f.severity, f.kind, loc.doc_id, clause, loc.span, f.detail)
}

fn dispatch(cmd: Command, diag: &Diag) -> Result<Option<Outcome>> {
    match cmd {
        Command::Ingest { manifest, out } => {
            if !manifest.is_file() {
                diag.error(format!("input not found: {}", manifest.display()));
                return Ok(None);
            }
            let m = Manifest::load(&manifest)?;
            let (corpus, failures) = m.load_corpus();
            for d in &corpus.documents {
                println!(
                    "{} clauses={} terms={} bytes={}",
                    d.doc_id,
                    d.all_clauses().count(),
                    extract_term_entries(d).len(),
                    d.text.len()
                );
            }
            for f in &failures {
                diag.error(format!("document {}: {}", f.doc_id, f.error));
            }
            if let Some(dir) = out {
                write_json(&dir.join("corpus.json"), &corpus)?;
            }
            Ok(Some(if failures.is_empty() { Outcome::Ok } else { Outcome::Partial }))
        }
        Command::Annotate { run, out } => {
            let Some(res) = execute(&run, diag)? else { return Ok(None) };
            for (doc_id, set) in &res.annotations {
                write_json(&out.join("annotations").join(format!("{doc_id}.json")), &StandoffFile::new(doc_id, set))?;
                println!("{doc_id} annotations={}", set.len());
            }
            Ok(Some(outcome(&res, false)))
        }
        Command::Check { run, out, strict } => {
            let Some(res) = execute(&run, diag)? else { return Ok(None) };
            for f in &res.findings {
                println!("{}", finding_line(f));
            }
            if let Some(dir) = out {
                write_json(&dir.join("findings.json"), &res.findings)?;
                let csv = findings_csv(&res.findings)?;
                fs::write(dir.join("findings.csv"), csv).with_context(|| format!("writing {}", dir.display()))?;
            }
            Ok(Some(outcome(&res, strict)))
        }
        Command::Populate { run, out } => {
            let Some(res) = execute(&run, diag)? else { return Ok(None) };
            match out {
                Some(dir) => write_json(&dir.join("candidates.json"), &res.candidates)?,
                None => println!("{}", serde_json::to_string_pretty(&res.candidates)?),
            }
            Ok(Some(outcome(&res, false)))
        }
        Command::Report { run, out, strict, timestamps } => {
            let Some(res) = execute(&run, diag)? else { return Ok(None) };
            let manifest = emit_bundle(&res.bundle(), &out, EmitOptions { timestamps })?;
            println!(
                "wrote {} files to {} ({} findings)",
                manifest.files.len() + 1,
                out.display(),
                res.findings.len()
            );
            Ok(Some(outcome(&res, strict)))
        }
        Command::Stats { ontologies } => {
            let missing: Vec<&PathBuf> = ontologies.iter().filter(|p| !p.is_file()).collect();
            if !missing.is_empty() {
                for p in missing {
                    diag.error(format!("input not found: {}", p.display()));
                }
                return Ok(None);
            }
            for path in &ontologies {
                let loaded = load_ontology(path).with_context(|| path.display().to_string())?;
                let s = ontology_stats(&loaded.model);
                if ontologies.len() > 1 {
                    println!("# {}", path.display());
                }
                println!(
                    "classes={} object_properties={} datatype_properties={}",
                    s.classes, s.object_properties, s.datatype_properties
                );
                println!("subclass_edges={} roots={}", s.subclass_edges, s.roots);
                for w in &loaded.warnings {
                    diag.warn(format!("{}: {w}", path.display()));
                }
            }
            Ok(Some(Outcome::Ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let diag = Diag::new();
    match dispatch(cli.command, &diag) {
        Ok(Some(Outcome::Ok)) => ExitCode::SUCCESS,
        Ok(Some(Outcome::Partial)) => ExitCode::from(EXIT_PARTIAL),
        Ok(Some(Outcome::Strict)) => ExitCode::from(EXIT_STRICT),
        Ok(None) => ExitCode::FAILURE,
        Err(e) => {
            diag.error(format!("{e:#}"));
            ExitCode::FAILURE
        }
    }
}
