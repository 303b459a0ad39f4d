use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tabled::api::prng::check_seed;
use tabled::corpus::{load_corpus, parse_table_file, run_program, run_suite, Corpus, SuiteConfig, MANIFEST};
use tabled::csv_import::{import_csv, parse_schema};
use tabled::datasheet::{render_datasheet, DatasheetInputs};
use tabled::diag::{has_errors, render_all, Diagnostic, Mode};
use tabled::eval::DEFAULT_SEED;
use tabled::model::Table;

const OK: u8 = 0;
const STATIC_ERROR: u8 = 1;
const RUNTIME_ERROR: u8 = 2;
const USAGE_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "tabled", version, about = "Check and run table programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Tables {
    /// Bind a table for the program: NAME=PATH, where PATH is a `.tbl`
    /// table literal or a `.csv` file. Repeatable.
    #[arg(long = "table", value_name = "NAME=PATH")]
    tables: Vec<String>,
    /// Bind every table of this corpus. Defaults to the nearest enclosing
    /// directory that holds a corpus manifest.
    #[arg(long, value_name = "DIR")]
    corpus: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check a program.
    Check {
        file: PathBuf,
        /// Print diagnostics as NDJSON.
        #[arg(long)]
        machine: bool,
        #[command(flatten)]
        tables: Tables,
    },
    /// Check and run a program.
    Run {
        file: PathBuf,
        #[arg(long)]
        machine: bool,
        /// Assert every operation's postconditions on its result.
        #[arg(long)]
        ensure: bool,
        /// Run even if the checker reports errors.
        #[arg(long)]
        force: bool,
        /// Seed for sampleRows when the program gives none.
        #[arg(long, env = "TABLED_SEED")]
        seed: Option<u64>,
        #[command(flatten)]
        tables: Tables,
    },
    /// Run the conformance suite of a corpus.
    Test {
        #[arg(default_value = "corpus")]
        dir: PathBuf,
    },
    /// Convert a CSV file to a table literal.
    ImportCsv {
        file: PathBuf,
        /// Schema sidecar: one header line such as `name: String | age: Number?`.
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        machine: bool,
    },
    /// Write the implementation datasheet as Markdown.
    Datasheet {
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Corpus whose results fill in the answers.
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
    },
}

/// A usage or IO problem.
struct Fail(String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Fail(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn mode(machine: bool) -> Mode {
    if machine {
        Mode::Machine
    } else {
        Mode::Human
    }
}

fn find_corpus(file: &Path) -> Option<PathBuf> {
    let abs = fs::canonicalize(file).ok()?;
    abs.ancestors().skip(1).find(|d| d.join(MANIFEST).is_file()).map(Path::to_path_buf)
}

fn load_table(path: &Path) -> Result<Table, Fail> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        import_csv(&text, None).map_err(|d| Fail(format!("{}: {}: {}", path.display(), d.span, d.message)))
    } else {
        parse_table_file(&text).map_err(|e| Fail(format!("{}: {e}", path.display())))
    }
}

fn bind_tables(file: &Path, opts: &Tables) -> Result<BTreeMap<String, Table>, Fail> {
    let mut tables = BTreeMap::new();
    let corpus = match &opts.corpus {
        Some(dir) => Some(load_corpus(dir)?),
        None => find_corpus(file).and_then(|dir| load_corpus(&dir).ok()),
    };
    if let Some(Corpus { tables: ts, .. }) = corpus {
        tables.extend(ts);
    }
    for spec in &opts.tables {
        let (name, path) = spec
            .split_once('=')
            .ok_or_else(|| Fail(format!("--table expects NAME=PATH, got {spec:?}")))?;
        tables.insert(name.to_string(), load_table(Path::new(path))?);
    }
    Ok(tables)
}

fn report(diags: &[Diagnostic], machine: bool, file: &Path, source: &str, to_stderr: bool) {
    let text = render_all(diags, mode(machine), &file.display().to_string(), Some(source));
    if to_stderr {
        eprint!("{text}");
    } else {
        print!("{text}");
    }
}

fn check(file: &Path, machine: bool, opts: &Tables) -> Result<u8, Fail> {
    let source = read(file)?;
    let tables = bind_tables(file, opts)?;
    let env: Vec<(&str, &Table)> = tables.iter().map(|(k, v)| (k.as_str(), v)).collect();
    let run = run_program(&source, &env, false, DEFAULT_SEED, false);
    report(&run.diagnostics, machine, file, &source, false);
    Ok(if has_errors(&run.diagnostics) { STATIC_ERROR } else { OK })
}

struct RunFlags {
    machine: bool,
    ensure: bool,
    force: bool,
    seed: Option<u64>,
}

fn run(file: &Path, flags: RunFlags, opts: &Tables) -> Result<u8, Fail> {
    let seed = match flags.seed {
        Some(s) => check_seed(s as f64).map_err(|e| Fail(format!("--seed: {e}")))?,
        None => DEFAULT_SEED,
    };
    let source = read(file)?;
    let tables = bind_tables(file, opts)?;
    let env: Vec<(&str, &Table)> = tables.iter().map(|(k, v)| (k.as_str(), v)).collect();
    let checked = run_program(&source, &env, flags.ensure, seed, false);
    report(&checked.diagnostics, flags.machine, file, &source, true);
    if has_errors(&checked.diagnostics) && !flags.force {
        return Ok(STATIC_ERROR);
    }
    let ran = run_program(&source, &env, flags.ensure, seed, true);
    print!("{}", ran.output);
    std::io::stdout().flush()?;
    match ran.runtime_error {
        Some(d) => {
            report(&[d], flags.machine, file, &source, true);
            Ok(RUNTIME_ERROR)
        }
        None => Ok(OK),
    }
}

fn test(dir: &Path) -> Result<u8, Fail> {
    let corpus = load_corpus(dir)?;
    let report = run_suite(&corpus, SuiteConfig::default());
    println!("{report}");
    Ok(if report.all_passed() { OK } else { STATIC_ERROR })
}

fn import(file: &Path, schema: Option<&Path>, output: Option<&Path>, machine: bool) -> Result<u8, Fail> {
    let text = read(file)?;
    let columns = match schema {
        Some(p) => {
            let s = read(p)?;
            match parse_schema(&s) {
                Ok(c) => Some(c),
                Err(d) => {
                    report(&[d], machine, p, &s, true);
                    return Ok(STATIC_ERROR);
                }
            }
        }
        None => None,
    };
    match import_csv(&text, columns.as_deref()) {
        Ok(t) => {
            write_out(output, &format!("{}\n", t.to_literal()))?;
            Ok(OK)
        }
        Err(d) => {
            report(&[d], machine, file, &text, true);
            Ok(STATIC_ERROR)
        }
    }
}

fn datasheet(output: Option<&Path>, dir: &Path) -> Result<u8, Fail> {
    let corpus = if dir.join(MANIFEST).is_file() {
        Some(load_corpus(dir)?)
    } else {
        None
    };
    let report = corpus.as_ref().map(|c| run_suite(c, SuiteConfig::default()));
    let md = render_datasheet(&DatasheetInputs {
        date: Some(chrono::Local::now().format("%Y-%m-%d").to_string()),
        corpus: corpus.as_ref(),
        report: report.as_ref(),
    });
    write_out(output, &md)?;
    Ok(OK)
}

fn dispatch(cli: Cli) -> Result<u8, Fail> {
    match cli.command {
        Command::Check { file, machine, tables } => check(&file, machine, &tables),
        Command::Run {
            file,
            machine,
            ensure,
            force,
            seed,
            tables,
        } => run(
            &file,
            RunFlags {
                machine,
                ensure,
                force,
                seed,
            },
            &tables,
        ),
        Command::Test { dir } => test(&dir),
        Command::ImportCsv {
            file,
            schema,
            output,
            machine,
        } => import(&file, schema.as_deref(), output.as_deref(), machine),
        Command::Datasheet { output, corpus } => datasheet(output.as_deref(), &corpus),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_ERROR } else { OK });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
