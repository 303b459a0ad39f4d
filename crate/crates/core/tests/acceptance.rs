//! The nine acceptance criteria, one PASS/FAIL line each.

mod common;

use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use tabled::api::{self, ensures, fisher_exact, fisher_test, prng_next};
use tabled::corpus::{load_corpus, parse_table_file, run_program, run_suite, Corpus, EntryKind, SuiteConfig};
use tabled::csv_import::import_csv;
use tabled::datasheet::{render_datasheet, DatasheetInputs};
use tabled::diag::{has_errors, Category, CellRef};
use tabled::eval::{run_to_string, runtime_prelude, EvalConfig, RtValue};
use tabled::model::{Cell, ColName, Column, Sort, Table, Value};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus() -> Corpus {
    load_corpus(&corpus_dir()).expect("shipped corpus loads")
}

fn ensure(cond: bool, why: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why.into())
    }
}

fn s(x: &str) -> Cell {
    Cell::from(x)
}

fn n(x: f64) -> Cell {
    Cell::from(x)
}

fn add_column_golden() -> Verdict {
    let c = corpus();
    let students = &c.tables["students"];
    let src = "> hairColor = [\"brown\", \"red\", \"blonde\"]\n> t = addColumn(students, \"hair-color\", hairColor)\n";
    let program = tabled::lang::parse(src).map_err(|e| e.to_string())?;
    let checked = tabled::check::check_program(&program, &tabled::check::prelude([("students", students)]));
    ensure(!checked.has_errors(), format!("{:?}", checked.diagnostics))?;
    let cfg = EvalConfig {
        ensure: true,
        predictions: Some(&checked.predictions),
        ..EvalConfig::default()
    };
    let (r, _) = run_to_string(&program, &runtime_prelude([("students", students)]), cfg);
    let bindings = r.map_err(|e| e.to_string())?;
    let Some(RtValue::Data(Value::Table(t))) = bindings.get("t") else {
        return Err("t is not a table".into());
    };
    let col = |name: &str, sort| Column::new(ColName::new(name).unwrap(), sort);
    let expected = Table::new(
        tabled::model::Schema::new(vec![
            col("name", Sort::String),
            col("age", Sort::Number),
            col("favorite color", Sort::String),
            col("hair-color", Sort::String),
        ])
        .unwrap(),
        vec![
            vec![s("Bob"), n(12.0), s("blue"), s("brown")],
            vec![s("Alice"), n(17.0), s("green"), s("red")],
            vec![s("Eve"), n(13.0), s("red"), s("blonde")],
        ],
    )
    .unwrap();
    ensure(*t == expected, format!("got\n{}", t.to_literal()))?;
    let vs: Vec<Value> = ["brown", "red", "blonde"].into_iter().map(Value::string).collect();
    let direct = api::add_column(students, "hair-color", &vs, None).map_err(|e| e.to_string())?;
    ensures::check(&ensures::Call::AddColumn { t: students, c: "hair-color", vs: &vs }, &direct)
        .map_err(|e| e.to_string())?;
    Ok("3x4 table matches cell for cell; postconditions hold".into())
}

fn missing_cells_golden() -> Verdict {
    let c = corpus();
    let g = &c.tables["gradebookMissing"];
    let mut missing = Vec::new();
    for (r, row) in g.rows().iter().enumerate() {
        for (ci, cell) in row.iter().enumerate() {
            if cell.is_missing() {
                missing.push((g.schema().columns()[ci].name.as_str().to_string(), r));
            }
        }
    }
    missing.sort();
    ensure(
        missing == [("quiz1".to_string(), 2), ("quiz3".to_string(), 1)],
        format!("missing cells at {missing:?}"),
    )?;
    let csv = std::fs::read_to_string(corpus_dir().join("csv/gradebookMissing.csv")).map_err(|e| e.to_string())?;
    let imported = import_csv(&csv, None).map_err(|d| d.message)?;
    ensure(imported == *g, format!("CSV import differs:\n{}", imported.to_literal()))?;
    let again = parse_table_file(&imported.to_literal())?;
    ensure(again == *g, "literal of the import does not parse back")?;
    Ok("2 missing cells at (quiz1, 2) and (quiz3, 1); CSV round-trips".into())
}

fn error_suite() -> Verdict {
    let c = corpus();
    let report = run_suite(&c, SuiteConfig::default());
    let errors: Vec<_> = report.results.iter().filter(|r| r.kind == EntryKind::Error).collect();
    for r in &errors {
        ensure(r.passed(), format!("{}: {}", r.id, r.problems.join("; ")))?;
    }
    let source = |id: &str| c.entries.iter().find(|e| e.id == id).unwrap().source.clone();

    let run = run_program(&source("swappedColumns"), &[], true, 1, false);
    let d = run.diagnostics.iter().find(|d| d.is_error()).ok_or("no error for swappedColumns")?;
    ensure(d.category == Category::SortMismatch, format!("swappedColumns: {}", d.category))?;
    ensure(
        d.cell == Some(CellRef { row: 1, column: "name".into() }),
        format!("swappedColumns cell {:?}", d.cell),
    )?;
    let first = d.suggestions.first().ok_or("no suggestion")?;
    ensure(
        first.kind.as_str() == "ReorderColumns" && first.text.contains("name") && first.text.contains("age"),
        format!("first suggestion {} {}", first.kind.as_str(), first.text),
    )?;

    let jelly = &c.tables["jellyAnon"];
    let run = run_program(&source("blackAndWhite"), &[("jellyAnon", jelly)], true, 1, false);
    let d = run.diagnostics.iter().find(|d| d.is_error()).ok_or("no error for blackAndWhite")?;
    ensure(
        d.category == Category::UnknownColumn && d.message.contains("\"black and white\""),
        format!("blackAndWhite: {} {}", d.category, d.message),
    )?;
    let first = d.suggestions.first().ok_or("no suggestion")?;
    ensure(
        first.kind.as_str() == "RewriteTo" && first.text == r#"r["black"] and r["white"]"#,
        format!("first suggestion {} {}", first.kind.as_str(), first.text),
    )?;
    Ok(format!("{} error entries match category, location and first suggestion", errors.len()))
}

fn corpus_programs() -> Verdict {
    let c = corpus();
    let report = run_suite(&c, SuiteConfig::default());
    let programs: Vec<_> = report.results.iter().filter(|r| r.kind == EntryKind::Program).collect();
    ensure(programs.len() == 8, format!("{} programs", programs.len()))?;
    for r in &programs {
        ensure(r.passed(), format!("{}: {}", r.id, r.problems.join("; ")))?;
    }
    let out = |id: &str, tables: &[&str]| {
        let e = c.entries.iter().find(|e| e.id == id).unwrap();
        let env: Vec<(&str, &Table)> = tables.iter().map(|t| (*t, &c.tables[*t])).collect();
        let run = run_program(&e.source, &env, true, 1, true);
        (has_errors(&run.diagnostics) || run.runtime_error.is_some(), run.output)
    };
    let filter = out("quizScoreFilter", &["gradebook"]);
    let select = out("quizScoreSelect", &["gradebook"]);
    ensure(!filter.0 && filter == select, "quizScoreFilter and quizScoreSelect disagree")?;
    ensure(filter.1.lines().next() == Some("Bob: 8.25"), format!("first average line {:?}", filter.1.lines().next()))?;
    let hom = out("pHackingHomogeneous", &["jellyAnon"]);
    let het = out("pHackingHeterogeneous", &["jellyNamed"]);
    ensure(!hom.0 && hom == het, "pHacking outputs differ")?;
    ensure(!hom.1.is_empty(), "pHacking printed nothing")?;
    Ok("8 programs check clean and match their goldens; Bob = 8.25".into())
}

fn bools(bits: u32, len: usize) -> Vec<bool> {
    (0..len).map(|i| bits >> i & 1 == 1).collect()
}

fn fisher() -> Verdict {
    let x = [true, true, true, true, false, false, false, false];
    let y = [true, true, true, false, true, false, false, false];
    let exact = fisher_exact(&x, &y).map_err(|e| e.to_string())?;
    let want = BigRational::new(BigInt::from(34), BigInt::from(70));
    ensure(exact == want, format!("exact p = {exact}"))?;
    let p = fisher_test(&x, &y).map_err(|e| e.to_string())?;
    ensure((p - 34.0 / 70.0).abs() <= 1e-12, format!("p = {p}"))?;
    // 0.4857142857 is 34/70 cut to ten places, so it only agrees to 1e-10.
    ensure((p - 0.4857142857).abs() <= 1e-10, format!("p = {p}"))?;
    common::run(common::CASES, (1usize..=24, any::<u32>(), any::<u32>()), |(len, a, b)| {
        let (x, y) = (bools(a, len), bools(b, len));
        let p = fisher_exact(&x, &y).unwrap();
        prop_assert_eq!(&fisher_exact(&y, &x).unwrap(), &p);
        let nx: Vec<bool> = x.iter().map(|v| !v).collect();
        let ny: Vec<bool> = y.iter().map(|v| !v).collect();
        prop_assert_eq!(&fisher_exact(&nx, &ny).unwrap(), &p);
        Ok(())
    })?;
    Ok(format!(
        "34/70 exact, |p - 34/70| = {:.1e}, |p - 0.4857142857| = {:.1e}; symmetry and negation hold over {} pairs",
        (p - 34.0 / 70.0).abs(),
        (p - 0.4857142857).abs(),
        common::CASES
    ))
}

fn prng() -> Verdict {
    ensure(prng_next(1) == Ok(48271), "prngNext(1)")?;
    ensure(prng_next(42) == Ok(2027382), "prngNext(42)")?;
    let table = [
        48271u32, 182605794, 1291394886, 1914720637, 2078669041, 407355683, 1105902161, 854716505, 564586691,
        1596680831,
    ];
    let mut state = 1;
    for (i, want) in table.iter().enumerate() {
        state = prng_next(state).map_err(|e| e.to_string())?;
        ensure(state == *want, format!("value {} is {state}, expected {want}", i + 1))?;
    }
    let c = corpus();
    for t in c.tables.values() {
        for seed in 1..=100u32 {
            let sampled = api::sample_rows(t, t.nrows() as f64, seed).map_err(|e| e.to_string())?;
            ensure(sampled == *t, format!("sampleRows with seed {seed} reorders a table"))?;
        }
    }
    Ok("known values and first 10 from seed 1 match; full samples are identities for 100 seeds".into())
}

fn properties() -> Verdict {
    let results = common::property_suite(common::CASES);
    let failed: Vec<String> = results
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    ensure(failed.is_empty(), failed.join("\n"))?;
    Ok(format!("{} properties x {} cases", results.len(), common::CASES))
}

fn soundness() -> Verdict {
    let tally = common::soundness(common::CASES);
    ensure(tally.violations.is_empty(), tally.violations.join("\n---\n"))?;
    ensure(tally.accepted > 0 && tally.rejected > 0, format!("vacuous run: {tally:?}"))?;
    Ok(format!("{} accepted, {} rejected, 0 violations", tally.accepted, tally.rejected))
}

const DATASHEET_QUESTIONS: [&str; 25] = [
    "What is the URL of the version of the benchmark being used?",
    "On what date was this version of the datasheet last updated?",
    "If you are not using the latest benchmark available on that date, please explain why not.",
    "Do tables express heterogeneous data, or must data be homogenized?",
    "Do tables capture missing data and, if so, how?",
    "Are mutable tables supported? Are there any limitations?",
    "Which tables are inexpressible? Why?",
    "Which tables are only partially expressible? Why, and what's missing?",
    "Which tables' expressibility is unknown? Why?",
    "Which tables can be expressed more precisely than in the benchmark? How?",
    "How direct is the mapping from the tables in the benchmark to representations in your system? How complex is the encoding?",
    "Are there consistent changes made to the way the operations are represented?",
    "Which operations are entirely inexpressible? Why?",
    "Which operations are only partially expressible? Why, and what's missing?",
    "Which operations' expressibility is unknown? Why?",
    "Which operations can be expressed more precisely than in the benchmark? How?",
    "Which examples are inexpressible? Why?",
    "Which examples' expressibility is unknown? Why?",
    "Which examples, or aspects thereof, can be expressed especially precisely? How?",
    "How direct is the mapping from the pseudocode in the benchmark to representations in your system? How complex is the encoding?",
    "Which error situations are known to be inexpressible? Why?",
    "Which error situations are only partially expressible? Why, and what's missing?",
    "Which error situations' expressibility is unknown? Why?",
    "Which error situations can be expressed more precisely than in the benchmark? How?",
    "Which error situations are prevented from being constructed? How?",
];

fn datasheet() -> Verdict {
    let c = corpus();
    let report = run_suite(&c, SuiteConfig::default());
    let md = render_datasheet(&DatasheetInputs {
        date: Some("2026-01-01".into()),
        corpus: Some(&c),
        report: Some(&report),
    });
    let absent: Vec<&str> = DATASHEET_QUESTIONS.iter().copied().filter(|q| !md.contains(q)).collect();
    ensure(absent.is_empty(), format!("missing: {absent:?}"))?;
    Ok(format!("all {} questions present verbatim", DATASHEET_QUESTIONS.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("addColumn golden", add_column_golden),
        ("missing-cell golden", missing_cells_golden),
        ("error-suite conformance", error_suite),
        ("corpus programs", corpus_programs),
        ("fisherTest", fisher),
        ("PRNG goldens", prng),
        ("property suites", properties),
        ("soundness", soundness),
        ("datasheet emitter", datasheet),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let verdict = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("PASS {} {name}: {detail} ({:.2?})", i + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed in {:.2?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
