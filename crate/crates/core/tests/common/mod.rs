//! Generators and property checks shared by the property suite and the
//! acceptance run.
#![allow(clippy::result_large_err)]

#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use tabled::api::{self, ensures, SortKey};
use tabled::model::{validate_table, Cell, ColName, Column, Sort, Table, Value};

pub const CASES: u32 = 1000;
pub const MAX_COLS: usize = 6;
pub const MAX_ROWS: usize = 8;

const NAMES: &[&str] = &["a", "b", "c", "d", "e", "f", "g", "h", "quiz 1", "key2"];

fn value(sort: &Sort) -> BoxedStrategy<Value> {
    match sort {
        Sort::Number => (0..4i32).prop_map(|n| Value::Number(n as f64)).boxed(),
        Sort::Boolean => any::<bool>().prop_map(Value::Boolean).boxed(),
        _ => prop::sample::select(vec!["x", "y", "z w"]).prop_map(Value::string).boxed(),
    }
}

fn cell(col: &Column) -> BoxedStrategy<Cell> {
    let present = value(&col.sort).prop_map(Cell::Present);
    if col.optional {
        prop_oneof![1 => Just(Cell::Missing), 4 => present].boxed()
    } else {
        present.boxed()
    }
}

pub fn arb_sort() -> impl Strategy<Value = Sort> {
    prop_oneof![Just(Sort::Number), Just(Sort::Boolean), Just(Sort::String)]
}

pub fn arb_columns(min: usize) -> impl Strategy<Value = Vec<Column>> {
    (prop::sample::subsequence(NAMES.to_vec(), min..=MAX_COLS).prop_shuffle(), prop::collection::vec((arb_sort(), any::<bool>()), MAX_COLS))
        .prop_map(|(names, attrs)| {
            names
                .into_iter()
                .zip(attrs)
                .map(|(n, (sort, optional))| Column {
                    name: ColName::new(n).unwrap(),
                    sort,
                    optional,
                })
                .collect()
        })
}

fn grid(columns: Vec<Column>, rows: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Table> {
    let row: Vec<BoxedStrategy<Cell>> = columns.iter().map(cell).collect();
    prop::collection::vec(row, rows).prop_map(move |rows| validate_table(columns.clone(), rows).unwrap())
}

/// A valid table of up to 6 columns and 8 rows.
pub fn arb_table() -> impl Strategy<Value = Table> {
    arb_columns(1).prop_flat_map(|cols| grid(cols, 0..=MAX_ROWS))
}

pub fn arb_table_with_rows(min_rows: usize) -> impl Strategy<Value = Table> {
    arb_columns(1).prop_flat_map(move |cols| grid(cols, min_rows..=MAX_ROWS))
}

/// A complete table whose first column is a unique key and whose other
/// columns share one sort.
pub fn arb_keyed_table() -> impl Strategy<Value = Table> {
    (1..=MAX_ROWS, 1..MAX_COLS, arb_sort())
        .prop_flat_map(|(nrows, nvals, sort)| {
            let names = prop::sample::subsequence(NAMES[1..].to_vec(), nvals);
            let keys = Just((0..nrows).map(|i| i as f64).collect::<Vec<_>>()).prop_shuffle();
            let cells = prop::collection::vec(prop::collection::vec(value(&sort), nvals), nrows);
            (Just(sort), names, keys, cells)
        })
        .prop_map(|(sort, names, keys, cells)| {
            let mut columns = vec![Column::new(ColName::new("id").unwrap(), Sort::Number)];
            columns.extend(names.iter().map(|n| Column::new(ColName::new(n).unwrap(), sort.clone())));
            let rows = keys
                .into_iter()
                .zip(cells)
                .map(|(k, vs)| std::iter::once(Cell::from(k)).chain(vs.into_iter().map(Cell::Present)).collect())
                .collect();
            validate_table(columns, rows).unwrap()
        })
}

/// Extra choices a property may consume.
pub fn arb_choices() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(any::<u32>(), 16)
}

pub fn names(t: &Table) -> Vec<String> {
    t.header().iter().map(|n| n.as_str().to_string()).collect()
}

fn pick(xs: &[String], k: u32) -> &str {
    &xs[k as usize % xs.len()]
}

fn subset(xs: &[String], mask: u32) -> Vec<&str> {
    xs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s.as_str()).collect()
}

fn valid(t: &Table) -> bool {
    validate_table(t.schema().columns().to_vec(), t.rows().to_vec()).is_ok()
}

fn renamed(t: &Table, suffix: &str) -> Table {
    let cols = t
        .schema()
        .columns()
        .iter()
        .map(|c| Column {
            name: ColName::new(format!("{}{suffix}", c.name.as_str())).unwrap(),
            ..c.clone()
        })
        .collect();
    validate_table(cols, t.rows().to_vec()).unwrap()
}

type Res = Result<(), TestCaseError>;

fn ok_valid(r: tabled::error::Outcome<Table>, call: ensures::Call<'_>) -> Res {
    if let Ok(out) = r {
        prop_assert!(valid(&out), "{} produced an invalid table", call.operation());
        prop_assert!(ensures::check(&call, &out).is_ok(), "{} broke a postcondition", call.operation());
    }
    Ok(())
}

/// Every operation either fails with an error or returns a valid table
/// that satisfies its postconditions.
pub fn outputs_are_valid(t: &Table, ch: &[u32]) -> Res {
    let hs = names(t);
    let n = t.nrows();
    let vs: Vec<Value> = (0..n).map(|i| Value::Number(i as f64)).collect();
    ok_valid(api::add_column(t, "new", &vs, None), ensures::Call::AddColumn { t, c: "new", vs: &vs })?;
    let mut f = |r: &tabled::model::Row, _: usize| Ok(Value::Boolean(r.cells().iter().any(Cell::is_missing)));
    ok_valid(api::build_column(t, "holes", &mut f, None), ensures::Call::BuildColumn { t, c: "holes" })?;
    let ns: Vec<f64> = ch.iter().take(ch[0] as usize % 6).map(|&k| (k as usize % n.max(1)) as f64).collect();
    if n > 0 {
        ok_valid(api::select_rows_by_index(t, &ns), ensures::Call::SelectRowsByIndex { t, ns: &ns })?;
    }
    let bs: Vec<bool> = (0..n).map(|i| ch[1] >> i & 1 == 1).collect();
    ok_valid(api::select_rows_by_mask(t, &bs), ensures::Call::SelectRowsByMask { t, bs: &bs })?;
    let cs = subset(&hs, ch[2]);
    ok_valid(api::select_columns(t, &cs), ensures::Call::SelectColumns { t, cs: &cs })?;
    ok_valid(api::drop_columns(t, &cs), ensures::Call::DropColumns { t, cs: &cs })?;
    let k = ch[3] as usize % (n + 1);
    ok_valid(api::head(t, k as f64), ensures::Call::Head { t, n: k })?;
    let c = pick(&hs, ch[4]);
    let asc = ch[5] & 1 == 0;
    ok_valid(api::tsort(t, c, asc), ensures::Call::Tsort { t, c, ascending: asc })?;
    ok_valid(order_by_column(t, c), ensures::Call::OrderBy { t })?;
    ok_valid(api::vcat(t, t), ensures::Call::Vcat { t1: t, t2: t })?;
    let t2 = renamed(t, "2");
    ok_valid(api::hcat(t, &t2), ensures::Call::Hcat { t1: t, t2: &t2 })?;
    let right = renamed(&api::head(t, k as f64).unwrap(), "r");
    let right = rename_one(&right, &format!("{c}r"), c);
    ok_valid(api::left_join(t, &right, c), ensures::Call::LeftJoin { t1: t, t2: &right, c })?;
    let long = subset(&hs, ch[6]);
    ok_valid(
        api::pivot_longer(t, &long, "name", "value"),
        ensures::Call::PivotLonger { t, cs: &long, names_to: "name", values_to: "value" },
    )?;
    let v = pick(&hs, ch[7]);
    ok_valid(api::pivot_wider(t, c, v), ensures::Call::PivotWider { t, names_from: c, values_from: v })?;
    for retentive in [true, false] {
        let r = if retentive { api::group_by_retentive(t, c) } else { api::group_by_subtractive(t, c) };
        ok_valid(r, ensures::Call::GroupBy { t, c, retentive })?;
    }
    let s = ch[8] as usize % (n + 1);
    let seed = ch[9] % 2_147_483_646 + 1;
    ok_valid(api::sample_rows(t, s as f64, seed), ensures::Call::SampleRows { t, n: s })?;
    Ok(())
}

fn rename_one(t: &Table, from: &str, to: &str) -> Table {
    let cols = t
        .schema()
        .columns()
        .iter()
        .map(|col| Column {
            name: if col.name.as_str() == from { ColName::new(to).unwrap() } else { col.name.clone() },
            ..col.clone()
        })
        .collect();
    validate_table(cols, t.rows().to_vec()).unwrap()
}

/// Empty cells (keyed as the empty sequence) sort first.
fn key_cmp(a: &Value, b: &Value) -> std::cmp::Ordering {
    match (a, b) {
        (Value::Seq(_), Value::Seq(_)) => std::cmp::Ordering::Equal,
        (Value::Seq(_), _) => std::cmp::Ordering::Less,
        (_, Value::Seq(_)) => std::cmp::Ordering::Greater,
        _ => api::natural_cmp(a, b),
    }
}

fn order_by_column(t: &Table, c: &str) -> tabled::error::Outcome<Table> {
    let ci = t.schema().index_of(c).unwrap();
    let mut spec = [SortKey {
        get_key: Box::new(move |r: &tabled::model::Row| {
            Ok(match &r.cells()[ci] {
                Cell::Present(v) => v.clone(),
                Cell::Missing => Value::Seq(Vec::new()),
            })
        }),
        compare: Box::new(|a: &Value, b: &Value| Ok(key_cmp(a, b).is_lt())),
    }];
    api::order_by(t, &mut spec)
}

pub fn identity_laws(t: &Table) -> Res {
    let all: Vec<f64> = (0..t.nrows()).map(|i| i as f64).collect();
    prop_assert_eq!(&api::select_rows_by_index(t, &all).unwrap(), t);
    prop_assert_eq!(&api::select_rows_by_mask(t, &vec![true; t.nrows()]).unwrap(), t);
    let hs = names(t);
    let cs: Vec<&str> = hs.iter().map(String::as_str).collect();
    prop_assert_eq!(&api::select_columns(t, &cs).unwrap(), t);
    prop_assert_eq!(&api::head(t, t.nrows() as f64).unwrap(), t);
    Ok(())
}

pub fn rows_and_columns_commute(t: &Table, ch: &[u32]) -> Res {
    let hs = names(t);
    let cs = subset(&hs, ch[0]);
    let ns: Vec<f64> = ch[1..].iter().take(ch[0] as usize % 5).map(|&k| (k as usize % t.nrows().max(1)) as f64).collect();
    let ns = if t.nrows() == 0 { Vec::new() } else { ns };
    let a = api::select_columns(&api::select_rows_by_index(t, &ns).unwrap(), &cs).unwrap();
    let b = api::select_rows_by_index(&api::select_columns(t, &cs).unwrap(), &ns).unwrap();
    prop_assert_eq!(a, b);
    Ok(())
}

/// Sorting by one column with a comparator that sees only that column is
/// a stable permutation.
pub fn order_by_is_a_stable_permutation(t: &Table, ch: &[u32]) -> Res {
    let hs = names(t);
    let c = pick(&hs, ch[0]);
    let ci = t.schema().index_of(c).unwrap();
    let out = order_by_column(t, c).unwrap();
    let mut before: Vec<String> = t.rows().iter().map(|r| format!("{r:?}")).collect();
    let mut after: Vec<String> = out.rows().iter().map(|r| format!("{r:?}")).collect();
    before.sort();
    after.sort();
    prop_assert_eq!(before, after);
    let key = |row: &Vec<Cell>| match &row[ci] {
        Cell::Present(v) => v.clone(),
        Cell::Missing => Value::Seq(Vec::new()),
    };
    let mut tagged: Vec<(usize, &Vec<Cell>)> = t.rows().iter().enumerate().collect();
    tagged.sort_by(|(_, a), (_, b)| key_cmp(&key(a), &key(b)));
    let expected: Vec<Vec<Cell>> = tagged.into_iter().map(|(_, r)| r.clone()).collect();
    prop_assert_eq!(out.rows(), &expected[..]);
    Ok(())
}

pub fn pivot_round_trip(t: &Table) -> Res {
    let hs = names(t);
    let vals: Vec<&str> = hs[1..].iter().map(String::as_str).collect();
    let long = api::pivot_longer(t, &vals, "name", "value").unwrap();
    prop_assert_eq!(long.nrows(), t.nrows() * vals.len());
    let wide = api::pivot_wider(&long, "name", "value").unwrap();
    prop_assert_eq!(&wide, t);
    Ok(())
}

pub fn group_by_partitions(t: &Table, ch: &[u32]) -> Res {
    let hs = names(t);
    let c = pick(&hs, ch[0]);
    let ci = t.schema().index_of(c).unwrap();
    let has_missing = t.column_cells(ci).any(Cell::is_missing);
    for retentive in [true, false] {
        let r = if retentive { api::group_by_retentive(t, c) } else { api::group_by_subtractive(t, c) };
        if has_missing {
            prop_assert!(r.is_err());
            continue;
        }
        let g = r.unwrap();
        let mut seen: Vec<Vec<Cell>> = Vec::new();
        let mut keys = Vec::new();
        for row in g.rows() {
            let (Cell::Present(k), Cell::Present(Value::Table(sub))) = (&row[0], &row[1]) else {
                return Err(TestCaseError::fail("malformed group row"));
            };
            prop_assert!(!keys.contains(k), "key {k:?} grouped twice");
            keys.push(k.clone());
            prop_assert!(sub.nrows() > 0);
            prop_assert_eq!(sub.schema().contains(c), retentive);
            if retentive {
                prop_assert!(sub.column_cells(ci).all(|x| x.value() == Some(k)));
            }
            seen.extend(sub.rows().iter().cloned());
        }
        let mut expected: Vec<Vec<Cell>> = t
            .rows()
            .iter()
            .map(|r| r.iter().enumerate().filter(|(i, _)| retentive || *i != ci).map(|(_, x)| x.clone()).collect())
            .collect();
        let fmt = |rows: &mut Vec<Vec<Cell>>| {
            let mut v: Vec<String> = rows.iter().map(|r| format!("{r:?}")).collect();
            v.sort();
            v
        };
        prop_assert_eq!(fmt(&mut seen), fmt(&mut expected));
    }
    Ok(())
}

pub fn concatenation_counts(t: &Table) -> Res {
    let v = api::vcat(t, t).unwrap();
    prop_assert_eq!((v.nrows(), v.ncols()), (2 * t.nrows(), t.ncols()));
    let h = api::hcat(t, &renamed(t, "_r")).unwrap();
    prop_assert_eq!((h.nrows(), h.ncols()), (t.nrows(), 2 * t.ncols()));
    Ok(())
}

/// Runs `check` over `cases` generated inputs; the error names the first
/// (shrunk) counterexample.
pub fn run<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Res) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

pub fn property_suite(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("outputs are valid", run(cases, (arb_table(), arb_choices()), |(t, ch)| outputs_are_valid(&t, &ch))),
        ("identity laws", run(cases, arb_table(), |t| identity_laws(&t))),
        ("selectRows/selectColumns commute", run(cases, (arb_table(), arb_choices()), |(t, ch)| rows_and_columns_commute(&t, &ch))),
        ("orderBy is a stable permutation", run(cases, (arb_table(), arb_choices()), |(t, ch)| order_by_is_a_stable_permutation(&t, &ch))),
        ("pivot round trip", run(cases, arb_keyed_table(), |t| pivot_round_trip(&t))),
        ("groupBy partitions", run(cases, (arb_table(), arb_choices()), |(t, ch)| group_by_partitions(&t, &ch))),
        ("vcat/hcat counts", run(cases, arb_table(), |t| concatenation_counts(&t))),
    ]
}

/// One generated program step; the numbers pick operands.
#[derive(Debug, Clone)]
pub struct Step {
    op: u8,
    a: u32,
    b: u32,
    c: u32,
    bogus: bool,
}

pub fn arb_program() -> impl Strategy<Value = (Table, Vec<Step>)> {
    let step = (0..20u8, any::<u32>(), any::<u32>(), any::<u32>(), prop::bool::weighted(0.15))
        .prop_map(|(op, a, b, c, bogus)| Step { op, a, b, c, bogus });
    (arb_table(), prop::collection::vec(step, 1..=6))
}

fn lit(s: &str) -> String {
    tabled::model::quote(s)
}

fn column_arg(t: &Table, k: u32, bogus: bool) -> String {
    let hs = names(t);
    if hs.is_empty() {
        return lit("a");
    }
    if bogus {
        let base = pick(&hs, k);
        return lit(&format!("{base}x"));
    }
    lit(pick(&hs, k))
}

fn render_step(i: usize, s: &Step, src: &str, t: &Table, o: &str) -> String {
    let c = column_arg(t, s.b, s.bogus);
    let c2 = column_arg(t, s.c, false);
    let n = t.nrows();
    let v = format!("t{}", i + 1);
    let nums = |k: usize| (0..k).map(|j| ((j as u32 + s.c) % 5).to_string()).collect::<Vec<_>>().join(", ");
    let rhs = match s.op {
        0 if t.ncols() > 0 => {
            let hs = names(t);
            let cs: Vec<String> = subset(&hs, s.c).into_iter().map(lit).collect();
            let mut cs = cs;
            if s.bogus {
                cs.push(c.clone());
            }
            format!("selectColumns({src}, [{}])", cs.join(", "))
        }
        1 => format!("dropColumns({src}, [{c}])"),
        2 => format!("head({src}, {})", s.c as usize % (n + 1)),
        3 => format!("tsort({src}, {c}, {})", s.c.is_multiple_of(2)),
        4 => format!("addColumn({src}, \"n{i}\", [{}])", nums(if s.bogus { n + 1 } else { n })),
        5 => format!("buildColumn({src}, \"b{i}\", function(r): r[{c}] end)"),
        6 => format!("buildColumn({src}, \"s{i}\", function(r): r[{c}] + 1 end)"),
        7 => format!("selectRows({src}, [{}])", if n == 0 { String::new() } else { nums(s.c as usize % 4).split(", ").filter(|x| !x.is_empty()).map(|x| (x.parse::<usize>().unwrap() % n).to_string()).collect::<Vec<_>>().join(", ") }),
        8 => format!("vcat({src}, {o})"),
        9 => format!("hcat({src}, {o})"),
        10 => format!("leftJoin({src}, {o}, {c})"),
        11 => format!("pivotLonger({src}, [{c}], \"nm{i}\", \"val{i}\")"),
        12 => format!("groupByRetentive({src}, {c})"),
        13 => format!("groupBySubtractive({src}, {c})"),
        14 => return format!("println(getColumn({src}, {c}))\n"),
        15 => return format!("println(dotProduct({src}, {c}, {c2}))\n"),
        16 => return format!("println(getRow({src}, 0)[{c}])\n"),
        17 => format!("sampleRows({src}, {})", s.c as usize % (n + 1)),
        18 => format!("pivotWider({src}, {c}, {c2})"),
        _ => format!("orderBy({src}, [(function(r): r[{c}] end, function(x, y): x < y end)])"),
    };
    format!("{v} = {rhs}\n")
}

fn prefix_tables(src: &str, t: &Table) -> Option<BTreeMap<String, Table>> {
    use tabled::eval::{eval_program, runtime_prelude, EvalConfig, RtValue};
    let program = tabled::lang::parse(src).ok()?;
    let env = runtime_prelude([("t0", t)]);
    let out = eval_program(&program, &env, EvalConfig::default(), &mut std::io::sink()).ok()?;
    Some(
        out.into_iter()
            .filter_map(|(k, v)| match v {
                RtValue::Data(Value::Table(t)) if k.starts_with('t') => Some((k, t)),
                _ => None,
            })
            .collect(),
    )
}

/// Renders the steps against `t0`, running each prefix so that operands
/// are drawn from the tables that actually exist at that point. Stops
/// early once a prefix fails at run time.
pub fn render_program(t: &Table, steps: &[Step]) -> String {
    let mut src = String::new();
    let mut tables = BTreeMap::from([("t0".to_string(), t.clone())]);
    for (i, s) in steps.iter().enumerate() {
        tables.insert("t0".to_string(), t.clone());
        let vars: Vec<&String> = tables.keys().collect();
        let a = vars[s.a as usize % vars.len()].clone();
        let o = vars[s.c as usize % vars.len()].clone();
        let line = render_step(i, s, &a, &tables[&a], &o);
        src.push_str(&line);
        match prefix_tables(&src, t) {
            Some(ts) => tables = ts,
            None => break,
        }
    }
    src
}

#[derive(Debug, Default)]
pub struct Soundness {
    pub accepted: usize,
    pub rejected: usize,
    pub violations: Vec<String>,
}

fn is_violation(category: &tabled::diag::Category) -> bool {
    use tabled::diag::Category;
    match category {
        Category::UnknownColumn | Category::SortMismatch => true,
        Category::ContractViolation(sub) => matches!(sub.as_str(), "UnknownColumn" | "SortMismatch"),
        _ => false,
    }
}

pub fn soundness_case(t: &Table, steps: &[Step], tally: &mut Soundness) {
    let src = render_program(t, steps);
    let run = tabled::corpus::run_program(&src, &[("t0", t)], true, 1, false);
    if tabled::diag::has_errors(&run.diagnostics) {
        tally.rejected += 1;
        return;
    }
    tally.accepted += 1;
    let run = tabled::corpus::run_program(&src, &[("t0", t)], true, 1, true);
    if let Some(d) = run.runtime_error {
        if is_violation(&d.category) {
            tally.violations.push(format!("{}: {}\n{}\n{src}", d.category, d.message, t.to_literal()));
        }
    }
}

/// Generates `cases` programs and tallies how the checker and evaluator
/// treat them.
pub fn soundness(cases: u32) -> Soundness {
    use proptest::strategy::ValueTree;
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
        ..Config::default()
    });
    let strategy = arb_program();
    let mut tally = Soundness::default();
    for _ in 0..cases {
        let (t, steps) = strategy.new_tree(&mut runner).unwrap().current();
        soundness_case(&t, &steps, &mut tally);
    }
    tally
}
