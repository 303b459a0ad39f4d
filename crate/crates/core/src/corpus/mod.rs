//! The benchmark corpus: example tables, example programs and buggy
//! programs, described by a `corpus.toml` manifest, plus a runner that
//! scores an implementation against the recorded expectations.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::check::{check_program, prelude, Predictions};
use crate::diag::{Category, CellRef, Diagnostic};
use crate::eval::{eval_expr, run_to_string, runtime_prelude, EvalConfig, RtValue, DEFAULT_SEED};
use crate::lang::{parse, parse_expr, parse_header_line, tokenize, Program, Span};
use crate::model::{Column, Table};

/// The manifest or a file it references is unusable.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}: {reason}", path.display())]
pub struct ManifestError {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntryKind {
    Table,
    Program,
    Error,
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryKind::Table => "table",
            EntryKind::Program => "program",
            EntryKind::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedSuggestion {
    pub kind: String,
    pub text: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    Table {
        columns: Vec<Column>,
        nrows: usize,
    },
    Program {
        tables: Vec<String>,
        output: String,
        seed: u32,
    },
    Error {
        tables: Vec<String>,
        category: Category,
        line: u32,
        column: u32,
        cell: Option<CellRef>,
        suggestion: Option<ExpectedSuggestion>,
        /// Detected by running the program rather than by the checker.
        runtime: bool,
        /// Source of the fixed program, which must check (and run) cleanly.
        corrected: Option<String>,
        reconstructed: bool,
        intent: String,
        explanation: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub kind: EntryKind,
    pub path: PathBuf,
    pub source: String,
    pub expectation: Expectation,
}

/// A loaded corpus. `tables` holds every table entry by id.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub root: PathBuf,
    pub entries: Vec<CorpusEntry>,
    pub tables: BTreeMap<String, Table>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    #[serde(default)]
    table: Vec<RawTable>,
    #[serde(default)]
    program: Vec<RawProgram>,
    #[serde(default)]
    error: Vec<RawError>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    id: String,
    path: String,
    schema: String,
    nrows: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProgram {
    id: String,
    path: String,
    #[serde(default)]
    tables: Vec<String>,
    output: String,
    seed: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawError {
    id: String,
    path: String,
    #[serde(default)]
    tables: Vec<String>,
    category: String,
    line: u32,
    column: u32,
    cell_row: Option<usize>,
    cell_column: Option<String>,
    suggestion: Option<String>,
    suggestion_text: Option<String>,
    #[serde(default)]
    runtime: bool,
    corrected: Option<String>,
    #[serde(default)]
    reconstructed: bool,
    intent: String,
    explanation: String,
}

pub const MANIFEST: &str = "corpus.toml";

fn bad(path: &Path, reason: impl Into<String>) -> ManifestError {
    ManifestError {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn read(root: &Path, rel: &str) -> Result<(PathBuf, String), ManifestError> {
    let path = root.join(rel);
    let text = std::fs::read_to_string(&path).map_err(|e| bad(&path, e.to_string()))?;
    Ok((path, text))
}

/// Parses a table file: a single table literal.
pub fn parse_table_file(source: &str) -> Result<Table, String> {
    let tokens = tokenize(source.trim()).map_err(|e| e.to_string())?;
    let e = parse_expr(&tokens).map_err(|e| e.to_string())?;
    match eval_expr(&e, &BTreeMap::new(), EvalConfig::default()).map_err(|e| e.to_string())? {
        RtValue::Data(crate::model::Value::Table(t)) => Ok(t),
        other => Err(format!("expected a table literal, found {other}")),
    }
}

/// Reads `corpus.toml` under `root` and every file it names.
pub fn load_corpus(root: &Path) -> Result<Corpus, ManifestError> {
    let (mpath, text) = read(root, MANIFEST)?;
    let m: Manifest = toml::from_str(&text).map_err(|e| bad(&mpath, e.to_string()))?;
    let mut entries = Vec::new();
    let mut tables = BTreeMap::new();
    for t in m.table {
        let (path, source) = read(root, &t.path)?;
        let table = parse_table_file(&source).map_err(|r| bad(&path, r))?;
        let columns = parse_header_line(&tokenize(&t.schema).map_err(|e| bad(&mpath, e.to_string()))?)
            .map_err(|e| bad(&mpath, format!("schema of {}: {e}", t.id)))?
            .into_iter()
            .map(|h| {
                let sort = h.sort.ok_or_else(|| bad(&mpath, format!("schema of {} needs sorts", t.id)))?;
                let name = crate::model::ColName::new(&h.name).map_err(|e| bad(&mpath, e.to_string()))?;
                Ok(Column {
                    name,
                    sort,
                    optional: h.optional,
                })
            })
            .collect::<Result<Vec<_>, ManifestError>>()?;
        tables.insert(t.id.clone(), table);
        entries.push(CorpusEntry {
            id: t.id,
            kind: EntryKind::Table,
            path,
            source,
            expectation: Expectation::Table {
                columns,
                nrows: t.nrows,
            },
        });
    }
    let known = |ts: &[String], id: &str| -> Result<(), ManifestError> {
        match ts.iter().find(|t| !tables.contains_key(*t)) {
            Some(t) => Err(bad(&mpath, format!("{id} uses unknown table {t}"))),
            None => Ok(()),
        }
    };
    for p in m.program {
        known(&p.tables, &p.id)?;
        let (path, source) = read(root, &p.path)?;
        let (_, output) = read(root, &p.output)?;
        entries.push(CorpusEntry {
            id: p.id,
            kind: EntryKind::Program,
            path,
            source,
            expectation: Expectation::Program {
                tables: p.tables,
                output,
                seed: p.seed.unwrap_or(DEFAULT_SEED),
            },
        });
    }
    for e in m.error {
        known(&e.tables, &e.id)?;
        let (path, source) = read(root, &e.path)?;
        let category =
            Category::parse(&e.category).ok_or_else(|| bad(&mpath, format!("unknown category {}", e.category)))?;
        let cell = match (e.cell_row, e.cell_column) {
            (Some(row), Some(column)) => Some(CellRef { row, column }),
            (None, None) => None,
            _ => return Err(bad(&mpath, format!("{}: cell_row and cell_column go together", e.id))),
        };
        let corrected = match &e.corrected {
            Some(rel) => Some(read(root, rel)?.1),
            None => None,
        };
        entries.push(CorpusEntry {
            id: e.id,
            kind: EntryKind::Error,
            path,
            source,
            expectation: Expectation::Error {
                tables: e.tables,
                category,
                line: e.line,
                column: e.column,
                cell,
                suggestion: e.suggestion.map(|kind| ExpectedSuggestion {
                    kind,
                    text: e.suggestion_text,
                }),
                runtime: e.runtime,
                corrected,
                reconstructed: e.reconstructed,
                intent: e.intent,
                explanation: e.explanation,
            },
        });
    }
    let mut ids: Vec<&str> = entries.iter().map(|e| e.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(bad(&mpath, format!("duplicate id {}", w[0])));
    }
    Ok(Corpus {
        root: root.to_path_buf(),
        entries,
        tables,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    /// Assert postconditions and checked types while running programs.
    pub ensure: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { ensure: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntryResult {
    pub id: String,
    pub kind: EntryKind,
    /// Empty when the entry passed.
    pub problems: Vec<String>,
}

impl EntryResult {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Per-entry results, ordered by id.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformanceReport {
    pub results: Vec<EntryResult>,
}

impl ConformanceReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(EntryResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &EntryResult> {
        self.results.iter().filter(|r| !r.passed())
    }
}

impl fmt::Display for ConformanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let status = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {} {}", r.kind, r.id)?;
            for p in &r.problems {
                for line in p.lines() {
                    writeln!(f, "    {line}")?;
                }
            }
        }
        let passed = self.results.iter().filter(|r| r.passed()).count();
        write!(f, "{passed}/{} entries passed", self.results.len())
    }
}

/// Checks and runs every entry. Entries run in parallel; the report is
/// sorted by id.
pub fn run_suite(corpus: &Corpus, cfg: SuiteConfig) -> ConformanceReport {
    let mut results: Vec<EntryResult> = corpus
        .entries
        .par_iter()
        .map(|e| EntryResult {
            id: e.id.clone(),
            kind: e.kind,
            problems: run_entry(corpus, e, cfg),
        })
        .collect();
    results.sort_by(|a, b| a.id.cmp(&b.id).then(a.kind.cmp(&b.kind)));
    ConformanceReport { results }
}

fn env_tables<'a>(corpus: &'a Corpus, names: &'a [String]) -> Vec<(&'a str, &'a Table)> {
    names.iter().map(|n| (n.as_str(), &corpus.tables[n])).collect()
}

/// What running a program produced: static diagnostics, then the runtime
/// outcome if it got that far.
pub struct Run {
    pub diagnostics: Vec<Diagnostic>,
    pub output: String,
    pub runtime_error: Option<Diagnostic>,
}

/// Parses, checks and (when `execute`) evaluates a program against the
/// named tables.
pub fn run_program(
    source: &str,
    tables: &[(&str, &Table)],
    ensure: bool,
    seed: u32,
    execute: bool,
) -> Run {
    let program = match parse(source) {
        Ok(p) => p,
        Err(e) => {
            return Run {
                diagnostics: vec![Diagnostic::from_syntax(&e)],
                output: String::new(),
                runtime_error: None,
            }
        }
    };
    let checked = check_program(&program, &prelude(tables.iter().copied()));
    let mut run = Run {
        diagnostics: checked.diagnostics.clone(),
        output: String::new(),
        runtime_error: None,
    };
    if execute {
        let (out, err) = evaluate(&program, tables, ensure, seed, &checked.predictions);
        run.output = out;
        run.runtime_error = err;
    }
    run
}

fn evaluate(
    program: &Program,
    tables: &[(&str, &Table)],
    ensure: bool,
    seed: u32,
    predictions: &Predictions,
) -> (String, Option<Diagnostic>) {
    let cfg = EvalConfig {
        ensure,
        seed,
        predictions: Some(predictions),
        ..EvalConfig::default()
    };
    let (r, out) = run_to_string(program, &runtime_prelude(tables.iter().copied()), cfg);
    (out, r.err().map(|e| Diagnostic::from_runtime(&e, program.span)))
}

fn run_entry(corpus: &Corpus, e: &CorpusEntry, cfg: SuiteConfig) -> Vec<String> {
    let mut problems = Vec::new();
    match &e.expectation {
        Expectation::Table { columns, nrows } => {
            let t = &corpus.tables[&e.id];
            if t.schema().columns() != &columns[..] {
                problems.push(format!("schema is {} but the manifest says {}", t.schema(), columns_text(columns)));
            }
            if t.nrows() != *nrows {
                problems.push(format!("{} rows but the manifest says {nrows}", t.nrows()));
            }
        }
        Expectation::Program { tables, output, seed } => {
            let run = run_program(&e.source, &env_tables(corpus, tables), cfg.ensure, *seed, true);
            for d in run.diagnostics.iter().filter(|d| d.is_error()) {
                problems.push(format!("unexpected {} at {}: {}", d.category, d.span, d.message));
            }
            if let Some(d) = run.runtime_error {
                problems.push(format!("runtime error {} at {}: {}", d.category, d.span, d.message));
            }
            if run.output != *output {
                problems.push(format!("output differs\n--- expected\n{output}--- actual\n{}", run.output));
            }
        }
        Expectation::Error {
            tables,
            category,
            line,
            column,
            cell,
            suggestion,
            runtime,
            corrected,
            ..
        } => {
            let env = env_tables(corpus, tables);
            let run = run_program(&e.source, &env, cfg.ensure, DEFAULT_SEED, *runtime);
            let found = if *runtime {
                if let Some(d) = run.diagnostics.iter().find(|d| d.is_error()) {
                    problems.push(format!("the checker already reports {} at {}", d.category, d.span));
                }
                run.runtime_error
            } else {
                run.diagnostics.into_iter().find(Diagnostic::is_error)
            };
            match found {
                None => problems.push(format!("no {category} was reported")),
                Some(d) => problems.extend(compare(&d, category, *line, *column, cell, suggestion)),
            }
            if let Some(fixed) = corrected {
                let run = run_program(fixed, &env, cfg.ensure, DEFAULT_SEED, true);
                if let Some(d) = run.diagnostics.iter().find(|d| d.is_error()) {
                    problems.push(format!("the corrected program reports {} at {}", d.category, d.span));
                }
                if let Some(d) = run.runtime_error {
                    problems.push(format!("the corrected program fails with {} at {}", d.category, d.span));
                }
            }
        }
    }
    problems
}

fn columns_text(cs: &[Column]) -> String {
    cs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn at(span: Span) -> (u32, u32) {
    (span.start.line, span.start.col)
}

fn compare(
    d: &Diagnostic,
    category: &Category,
    line: u32,
    column: u32,
    cell: &Option<CellRef>,
    suggestion: &Option<ExpectedSuggestion>,
) -> Vec<String> {
    let mut problems = Vec::new();
    if d.category != *category {
        problems.push(format!("category is {} but {category} was expected ({})", d.category, d.message));
    }
    if at(d.span) != (line, column) {
        problems.push(format!("reported at {} but {line}:{column} was expected", d.span));
    }
    if let Some(c) = cell {
        if d.cell.as_ref() != Some(c) {
            problems.push(format!("cell is {:?} but (row {}, {:?}) was expected", d.cell, c.row, c.column));
        }
    }
    if let Some(s) = suggestion {
        match d.suggestions.first() {
            None => problems.push(format!("no suggestion, expected {}", s.kind)),
            Some(first) => {
                if first.kind.as_str() != s.kind {
                    problems.push(format!("first suggestion is {} but {} was expected", first.kind.as_str(), s.kind));
                }
                if let Some(text) = &s.text {
                    if first.text != *text {
                        problems.push(format!("first suggestion reads {:?} but {text:?} was expected", first.text));
                    }
                }
            }
        }
    }
    problems
}

#[cfg(test)]
mod tests;
