//! The implementation datasheet: a Markdown free-response report.
//!
//! Answers that follow mechanically from the library and the corpus are
//! filled in; the rest are left as `TODO` for the implementer.

use std::fmt::Write;

use crate::check::BUILTINS;
use crate::corpus::{ConformanceReport, Corpus, EntryKind, Expectation};

pub struct Section {
    pub id: &'static str,
    pub title: &'static str,
    pub questions: &'static [&'static str],
}

const Q_URL: &str = "What is the URL of the version of the benchmark being used?";
const Q_DATE: &str = "On what date was this version of the datasheet last updated?";
const Q_TABLES_INEXPRESSIBLE: &str = "Which tables are inexpressible? Why?";
const Q_TABLES_PARTIAL: &str = "Which tables are only partially expressible? Why, and what's missing?";
const Q_OPS_INEXPRESSIBLE: &str = "Which operations are entirely inexpressible? Why?";
const Q_EXAMPLES_INEXPRESSIBLE: &str = "Which examples are inexpressible? Why?";
const Q_ERRORS_INEXPRESSIBLE: &str = "Which error situations are known to be inexpressible? Why?";
const Q_ERRORS_PREVENTED: &str = "Which error situations are prevented from being constructed? How?";

pub const SECTIONS: &[Section] = &[
    Section {
        id: "A.1",
        title: "Reference",
        questions: &[
            Q_URL,
            Q_DATE,
            "If you are not using the latest benchmark available on that date, please explain why not.",
        ],
    },
    Section {
        id: "A.2",
        title: "Example Tables",
        questions: &[
            "Do tables express heterogeneous data, or must data be homogenized?",
            "Do tables capture missing data and, if so, how?",
            "Are mutable tables supported? Are there any limitations?",
            Q_TABLES_INEXPRESSIBLE,
            Q_TABLES_PARTIAL,
            "Which tables' expressibility is unknown? Why?",
            "Which tables can be expressed more precisely than in the benchmark? How?",
            "How direct is the mapping from the tables in the benchmark to representations in your system? How complex is the encoding?",
        ],
    },
    Section {
        id: "A.3",
        title: "TableAPI",
        questions: &[
            "Are there consistent changes made to the way the operations are represented?",
            Q_OPS_INEXPRESSIBLE,
            "Which operations are only partially expressible? Why, and what's missing?",
            "Which operations' expressibility is unknown? Why?",
            "Which operations can be expressed more precisely than in the benchmark? How?",
        ],
    },
    Section {
        id: "A.4",
        title: "Example Programs",
        questions: &[
            Q_EXAMPLES_INEXPRESSIBLE,
            "Which examples' expressibility is unknown? Why?",
            "Which examples, or aspects thereof, can be expressed especially precisely? How?",
            "How direct is the mapping from the pseudocode in the benchmark to representations in your system? How complex is the encoding?",
        ],
    },
    Section {
        id: "A.5",
        title: "Errors",
        questions: &[
            Q_ERRORS_INEXPRESSIBLE,
            "Which error situations are only partially expressible? Why, and what's missing?",
            "Which error situations' expressibility is unknown? Why?",
            "Which error situations can be expressed more precisely than in the benchmark? How?",
            Q_ERRORS_PREVENTED,
        ],
    },
];

/// The three ways a language can relate to an error situation.
pub const ERROR_OUTCOMES: [&str; 3] = [
    "isn't expressive enough to capture it",
    "can at least partially express the situation",
    "prevents the program from being constructed",
];

/// The artifacts expressiveness is judged for.
pub const ERROR_ARTIFACTS: [&str; 4] = [
    "the buggy versions of the programs",
    "the correct variants of the programs",
    "the type system's representation of the constraints",
    "the type system's reporting of the violation",
];

pub const BENCHMARK_URL: &str = "https://github.com/brownplt/B2T2/tree/v1.0";

const TODO: &str = "TODO";

pub fn questions() -> impl Iterator<Item = &'static str> {
    SECTIONS.iter().flat_map(|s| s.questions.iter().copied())
}

/// What the emitter knows beyond the library itself.
#[derive(Default)]
pub struct DatasheetInputs<'a> {
    /// Date of this report, `YYYY-MM-DD`.
    pub date: Option<String>,
    pub corpus: Option<&'a Corpus>,
    pub report: Option<&'a ConformanceReport>,
}

fn passed(inputs: &DatasheetInputs, id: &str, kind: EntryKind) -> Option<bool> {
    let report = inputs.report?;
    report
        .results
        .iter()
        .find(|r| r.id == id && r.kind == kind)
        .map(|r| r.passed())
}

fn ids_where(inputs: &DatasheetInputs, kind: EntryKind, pass: bool) -> Vec<String> {
    let Some(corpus) = inputs.corpus else { return Vec::new() };
    corpus
        .entries
        .iter()
        .filter(|e| e.kind == kind && passed(inputs, &e.id, kind) == Some(pass))
        .map(|e| format!("`{}`", e.id))
        .collect()
}

fn none_or(list: Vec<String>, why: &str) -> String {
    if list.is_empty() {
        "None.".to_string()
    } else {
        format!("{}: {why}", list.join(", "))
    }
}

fn answer(inputs: &DatasheetInputs, question: &str) -> String {
    let checked = inputs.corpus.is_some() && inputs.report.is_some();
    match question {
        Q_URL => BENCHMARK_URL.to_string(),
        Q_DATE => inputs.date.clone().unwrap_or_else(|| TODO.to_string()),
        Q_TABLES_INEXPRESSIBLE | Q_TABLES_PARTIAL if !checked => TODO.to_string(),
        Q_TABLES_INEXPRESSIBLE => none_or(
            ids_where(inputs, EntryKind::Table, false),
            "these corpus tables do not load with their expected schema.",
        ),
        Q_TABLES_PARTIAL => "None; see the table below.".to_string(),
        Q_OPS_INEXPRESSIBLE => "None; every operation in the list below is implemented and statically checked.".to_string(),
        Q_EXAMPLES_INEXPRESSIBLE if checked => none_or(
            ids_where(inputs, EntryKind::Program, false),
            "these corpus programs do not check or do not produce their expected output.",
        ),
        Q_ERRORS_INEXPRESSIBLE if checked => none_or(
            ids_where(inputs, EntryKind::Error, false),
            "the checker does not report these situations as expected.",
        ),
        Q_ERRORS_PREVENTED if checked => {
            let list: Vec<String> = situations(inputs)
                .into_iter()
                .filter(|s| s.outcome == ERROR_OUTCOMES[2])
                .map(|s| format!("`{}`", s.id))
                .collect();
            if list.is_empty() {
                "None.".to_string()
            } else {
                format!("{}: the checker rejects these programs before they run.", list.join(", "))
            }
        }
        _ => TODO.to_string(),
    }
}

struct Situation {
    id: String,
    category: String,
    location: String,
    detected: &'static str,
    outcome: &'static str,
}

fn situations(inputs: &DatasheetInputs) -> Vec<Situation> {
    let Some(corpus) = inputs.corpus else { return Vec::new() };
    corpus
        .entries
        .iter()
        .filter_map(|e| match &e.expectation {
            Expectation::Error {
                category,
                line,
                column,
                runtime,
                ..
            } => {
                let outcome = match passed(inputs, &e.id, EntryKind::Error) {
                    Some(false) => ERROR_OUTCOMES[0],
                    _ if *runtime => ERROR_OUTCOMES[1],
                    _ => ERROR_OUTCOMES[2],
                };
                Some(Situation {
                    id: e.id.clone(),
                    category: category.to_string(),
                    location: format!("{line}:{column}"),
                    detected: if *runtime { "run time" } else { "check time" },
                    outcome,
                })
            }
            _ => None,
        })
        .collect()
}

fn tables_block(out: &mut String, inputs: &DatasheetInputs) {
    let Some(corpus) = inputs.corpus else { return };
    out.push_str("\n| Table | Columns | Rows | Expressed |\n|---|---|---|---|\n");
    for e in corpus.entries.iter().filter(|e| e.kind == EntryKind::Table) {
        let (ncols, nrows) = corpus.tables.get(&e.id).map_or((0, 0), |t| (t.ncols(), t.nrows()));
        let status = match passed(inputs, &e.id, EntryKind::Table) {
            Some(true) => "yes",
            Some(false) => "no",
            None => "not checked",
        };
        let _ = writeln!(out, "| `{}` | {ncols} | {nrows} | {status} |", e.id);
    }
}

fn operations_block(out: &mut String) {
    out.push_str("\nImplemented operations:\n\n");
    let mut names: Vec<&str> = BUILTINS.iter().map(|b| b.name).collect();
    names.insert(names.iter().position(|n| *n == "tsort").map_or(0, |i| i + 1), "orderBy");
    for n in names {
        let _ = writeln!(out, "- `{n}`");
    }
}

fn programs_block(out: &mut String, inputs: &DatasheetInputs) {
    let Some(corpus) = inputs.corpus else { return };
    out.push_str("\n| Program | Checks and runs to its expected output |\n|---|---|\n");
    for e in corpus.entries.iter().filter(|e| e.kind == EntryKind::Program) {
        let status = match passed(inputs, &e.id, EntryKind::Program) {
            Some(true) => "yes",
            Some(false) => "no",
            None => "not checked",
        };
        let _ = writeln!(out, "| `{}` | {status} |", e.id);
    }
}

fn errors_block(out: &mut String, inputs: &DatasheetInputs) {
    let rows = situations(inputs);
    if rows.is_empty() {
        return;
    }
    out.push_str("\n| Error situation | Category | Location | Detected at | Outcome |\n|---|---|---|---|---|\n");
    for s in rows {
        let _ = writeln!(
            out,
            "| `{}` | {} | {} | {} | {} |",
            s.id, s.category, s.location, s.detected, s.outcome
        );
    }
}

/// Renders the whole datasheet as Markdown.
pub fn render_datasheet(inputs: &DatasheetInputs) -> String {
    let mut out = String::from("# Datasheet\n");
    for s in SECTIONS {
        let _ = write!(out, "\n## {} {}\n", s.id, s.title);
        if s.id == "A.5" {
            out.push_str("\nFor each error situation the language may:\n\n");
            for o in ERROR_OUTCOMES {
                let _ = writeln!(out, "- *{o}*");
            }
            out.push_str("\nExpressiveness can be judged for:\n\n");
            for a in ERROR_ARTIFACTS {
                let _ = writeln!(out, "- *{a}*");
            }
        }
        out.push('\n');
        for q in s.questions {
            let _ = writeln!(out, "- Q. {q}\n  - A. {}", answer(inputs, q));
        }
        match s.id {
            "A.2" => tables_block(&mut out, inputs),
            "A.3" => operations_block(&mut out),
            "A.4" => programs_block(&mut out, inputs),
            "A.5" => errors_block(&mut out, inputs),
            _ => {}
        }
    }
    out
}
