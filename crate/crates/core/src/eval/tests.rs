use super::*;
use crate::api as ops;
use crate::check::{check_program, prelude};
use crate::lang::parse;

const STUDENTS: &str = r#"
students = table: name: String | age: Number | "favorite color": String
  "Bob" | 12 | "blue"
  "Alice" | 17 | "green"
  "Eve" | 13 | "red"
end
"#;

fn run_with(src: &str, ensure: bool) -> (Outcome<BTreeMap<String, RtValue>>, String) {
    let program = parse(src).unwrap();
    let checked = check_program(&program, &prelude([]));
    assert!(!checked.has_errors(), "{:#?}", checked.diagnostics);
    let cfg = EvalConfig {
        ensure,
        predictions: Some(&checked.predictions),
        ..EvalConfig::default()
    };
    run_to_string(&program, &runtime_prelude([]), cfg)
}

fn output(src: &str) -> String {
    let (r, out) = run_with(src, true);
    r.unwrap();
    out
}

fn failure(src: &str) -> BenchError {
    let program = parse(src).unwrap();
    run_to_string(&program, &runtime_prelude([]), EvalConfig::default()).0.unwrap_err()
}

#[test]
fn prints_values() {
    let out = output(
        r#"
println(1 + 2 * 3)
println(7 / 2)
println("a" ++ "b")
println([1, 2])
println(not (1 < 2) or true)
"#,
    );
    assert_eq!(out, "7\n3.5\nab\n[1, 2]\ntrue\n");
}

#[test]
fn prints_rows_and_tables() {
    let out = output(&format!("{STUDENTS}println(getRow(students, 0))\nprintln(head(students, 1))\n"));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some(r#"(name: "Bob", age: 12, "favorite color": "blue")"#));
    let rest: Vec<&str> = lines.collect();
    assert_eq!(rest, ["table:", "  name: String | age: Number | \"favorite color\": String", "  \"Bob\" | 12 | \"blue\"", "end"]);
}

#[test]
fn functions_and_loops() {
    let out = output(
        r#"
double = function(x): x * 2 end
total = 0
for i in range(4):
  total = total + double(i)
end
println(total)
"#,
    );
    assert_eq!(out, "12\n");
}

#[test]
fn closures_capture_their_definition_environment() {
    let out = output(
        r#"
k = 10
addK = function(x): x + k end
k = 20
println(addK(1))
"#,
    );
    assert_eq!(out, "11\n");
}

#[test]
fn build_column_runs_the_function_per_row() {
    let out = output(&format!(
        "{STUDENTS}t = buildColumn(students, \"older\", function(r): r[\"age\"] + 1 end)\nprintln(getColumn(t, \"older\"))\n"
    ));
    assert_eq!(out, "[13, 18, 14]\n");
}

#[test]
fn phacking_prints_one_line_per_significant_column() {
    let src = r#"
beans = table: "get acne": Boolean | green: Boolean | red: Boolean
  true | true | true
  true | true | false
  true | true | true
  true | true | false
  true | true | true
  false | false | false
  false | false | true
  false | false | false
  false | false | true
  false | false | false
end
for c in header(dropColumns(beans, ["get acne"])):
  p = fisherTest(getColumn(beans, "get acne"), getColumn(beans, c))
  if p < 0.05:
    println("We found a link between " ++ c ++ " jelly beans and acne (p < 0.05).")
  end
end
"#;
    assert_eq!(output(src), "We found a link between green jelly beans and acne (p < 0.05).\n");
}

#[test]
fn missing_cells_are_strict() {
    let src = r#"
t = table: a: Number?
  1
  _
end
r = getRow(t, 1)
println(withDefault(r["a"], 0))
println(isMissing(r["a"]))
"#;
    assert_eq!(output(src), "0\ntrue\n");
    let e = failure("t = table: a: Number?\n  _\nend\nr = getRow(t, 0)\nx = r[\"a\"] + 1\n");
    assert_eq!(e.kind, ErrorKind::MissingValue);
    assert_eq!(e.span.unwrap().start.line, 5);
}

#[test]
fn dot_product_reports_the_missing_cell() {
    let src = r#"
g = table: quiz1: Number? | quiz2: Number
  8 | 9
  6 | 7
  _ | 8
end
dotProduct(g, "quiz1", "quiz2")
"#;
    let e = failure(src);
    assert_eq!(
        e.kind,
        ErrorKind::MissingCell {
            column: "quiz1".into(),
            row: 2
        }
    );
    assert_eq!(e.operation.as_deref(), Some("dotProduct"));
}

#[test]
fn order_by_uses_user_comparators() {
    let src = format!(
        "{STUDENTS}o = orderBy(students, [(function(r): r[\"age\"] end, function(a, b): a > b end)])\nprintln(getColumn(o, \"name\"))\n"
    );
    assert_eq!(output(&src), "[\"Alice\", \"Eve\", \"Bob\"]\n");
}

#[test]
fn errors_inside_functions_carry_a_trace() {
    let e = failure("f = function(x): x / 0 end\nf(1)\n");
    assert_eq!(e.kind, ErrorKind::DivisionByZero);
    assert_eq!(e.span.unwrap().start.line, 1);
    assert_eq!(e.trace, ["f called at 2:1"]);
}

#[test]
fn runaway_recursion_is_bounded() {
    let e = failure("f = function(h, x): h(h, x) end\nf(f, 1)\n");
    assert_eq!(e.kind, ErrorKind::CallDepth { limit: MAX_DEPTH });
}

#[test]
fn literal_errors_point_at_the_cell() {
    let e = failure("t = table: a: Number | b: String\n  1 | \"x\"\n  \"y\" | \"z\"\nend\n");
    assert!(matches!(e.kind, ErrorKind::CellSortMismatch { column: 0, row: 1, .. }));
    assert_eq!(e.span.unwrap().start, crate::lang::Pos::new(3, 3));
    let e = failure("t = table: a | b\n  1 | 2\n  3\nend\n");
    assert!(matches!(e.kind, ErrorKind::RaggedRow { row: 1, .. }));
    assert_eq!(e.span.unwrap().start.line, 3);
}

#[test]
fn unannotated_columns_take_the_first_cell_sort() {
    let (r, _) = run_with("t = table: a | b\n  1 | _\n  2 | \"x\"\nend\n", true);
    let t = r.unwrap()["t"].as_table().unwrap().clone();
    let cols = t.schema().columns();
    assert_eq!((cols[0].sort.clone(), cols[0].optional), (Sort::Number, false));
    assert_eq!((cols[1].sort.clone(), cols[1].optional), (Sort::String, true));
}

#[test]
fn sample_rows_uses_the_configured_seed() {
    let src = format!("{STUDENTS}println(getColumn(sampleRows(students, 2), \"name\"))\n");
    let program = parse(&src).unwrap();
    for seed in [1, 42, 7] {
        let cfg = EvalConfig {
            seed,
            ..EvalConfig::default()
        };
        let (_, out) = run_to_string(&program, &runtime_prelude([]), cfg);
        let explicit = src.replace("sampleRows(students, 2)", &format!("sampleRows(students, 2, {seed})"));
        let (_, out2) = run_to_string(&parse(&explicit).unwrap(), &runtime_prelude([]), EvalConfig::default());
        assert_eq!(out, out2);
    }
}

#[test]
fn mixed_text_sequences_hold_strings() {
    let out = output(&format!("{STUDENTS}xs = append(header(students), \"extra\")\nprintln(length(xs))\nprintln(contains(xs, \"age\"))\n"));
    assert_eq!(out, "4\ntrue\n");
}

struct DropsLastRow;

impl TableOps for DropsLastRow {
    fn tsort(&self, t: &Table, c: &str, ascending: bool) -> Outcome<Table> {
        let sorted = ops::tsort(t, c, ascending)?;
        let keep: Vec<f64> = (0..sorted.nrows().saturating_sub(1)).map(|i| i as f64).collect();
        ops::select_rows_by_index(&sorted, &keep)
    }
}

#[test]
fn ensure_mode_catches_a_defective_operation() {
    let src = format!("{STUDENTS}t = tsort(students, \"age\", true)\n");
    let program = parse(&src).unwrap();
    let env = runtime_prelude([]);
    let lax = EvalConfig {
        ops: &DropsLastRow,
        ..EvalConfig::default()
    };
    assert!(run_to_string(&program, &env, lax).0.is_ok());
    let strict = EvalConfig { ensure: true, ..lax };
    let e = run_to_string(&program, &env, strict).0.unwrap_err();
    assert!(matches!(e.kind, ErrorKind::EnsureViolation { .. }), "{e}");
    assert_eq!(e.operation.as_deref(), Some("tsort"));
}

#[test]
fn ensure_mode_compares_against_checked_types() {
    struct Renames;
    impl TableOps for Renames {
        fn add_column(&self, t: &Table, _: &str, vs: &[Value], hint: Option<&Sort>) -> Outcome<Table> {
            ops::add_column(t, "other", vs, hint)
        }
    }
    let src = format!("{STUDENTS}t = addColumn(students, \"h\", [1, 2, 3])\n");
    let program = parse(&src).unwrap();
    let checked = check_program(&program, &prelude([]));
    let cfg = EvalConfig {
        ensure: true,
        ops: &Renames,
        predictions: Some(&checked.predictions),
        ..EvalConfig::default()
    };
    let e = run_to_string(&program, &runtime_prelude([]), cfg).0.unwrap_err();
    assert_eq!(e.operation.as_deref(), Some("addColumn"));
}
