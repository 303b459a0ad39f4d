use super::*;
use crate::diag::SuggestionKind;
use crate::lang::{parse, parse_header_line, tokenize};

fn table_ty(header: &str, nrows: usize) -> Ty {
    let cells = parse_header_line(&tokenize(header).unwrap()).unwrap();
    let columns = cells
        .into_iter()
        .map(|h| column(&h.name, h.sort.unwrap(), h.optional))
        .collect();
    Ty::Table(TableType::closed(columns, Some(nrows)))
}

fn env() -> BTreeMap<String, Ty> {
    let mut env = prelude([]);
    let tables = [
        ("students", r#"name: String | age: Number | "favorite color": String"#, 3),
        (
            "gradebookMissing",
            "name: String | age: Number | quiz1: Number? | quiz2: Number | midterm: Number | quiz3: Number? | quiz4: Number | final: Number",
            3,
        ),
        (
            "gradebook",
            "name: String | age: Number | quiz1: Number | quiz2: Number | midterm: Number | quiz3: Number | quiz4: Number | final: Number",
            3,
        ),
        (
            "jellyAnon",
            r#""get acne": Boolean | red: Boolean | black: Boolean | white: Boolean | green: Boolean | yellow: Boolean | orange: Boolean"#,
            10,
        ),
        (
            "jellyNamed",
            r#"name: String | "get acne": Boolean | red: Boolean | black: Boolean | white: Boolean | green: Boolean | yellow: Boolean | orange: Boolean"#,
            10,
        ),
    ];
    for (n, h, r) in tables {
        env.insert(n.to_string(), table_ty(h, r));
    }
    env
}

fn check(src: &str) -> CheckResult {
    check_program(&parse(src).unwrap(), &env())
}

fn errors(r: &CheckResult) -> Vec<&Diagnostic> {
    r.errors().collect()
}

fn assert_clean(src: &str) -> CheckResult {
    let r = check(src);
    assert!(!r.has_errors(), "unexpected errors: {:#?}", r.diagnostics);
    r
}

fn single_error(src: &str, category: Category) -> Diagnostic {
    let r = check(src);
    let es = errors(&r);
    assert_eq!(es.len(), 1, "{:#?}", r.diagnostics);
    assert_eq!(es[0].category, category, "{:#?}", es[0]);
    es[0].clone()
}

const BLACK_AND_WHITE: &str = r#"
> eatBlackAndWhite =
  function(r):
    r["black and white"] == true
  end
> buildColumn(jellyAnon, "eat black and white", eatBlackAndWhite)
"#;

#[test]
fn black_and_white_is_one_unknown_column() {
    let d = single_error(BLACK_AND_WHITE, Category::UnknownColumn);
    assert_eq!((d.span.start.line, d.span.start.col), (4, 5));
    assert_eq!((d.span.end.line, d.span.end.col), (4, 25));
    assert_eq!(d.suggestions[0].kind, SuggestionKind::RewriteTo);
    assert_eq!(d.suggestions[0].text, r#"r["black"] and r["white"]"#);
    let renames: Vec<&str> = d.suggestions[1..].iter().map(|s| s.text.as_str()).collect();
    assert_eq!(renames, ["black", "white"]);
}

#[test]
fn corrected_black_and_white_is_clean() {
    let r = assert_clean(&BLACK_AND_WHITE.replace(r#"r["black and white"] == true"#, r#"r["black"] and r["white"]"#));
    let (_, tts) = r.predictions.0.iter().next().unwrap();
    assert_eq!(tts[0].columns.last().unwrap().to_string(), r#""eat black and white": Boolean"#);
}

const PHACKING: &str = r#"
> pHacking =
  function(t):
    colAcne = getColumn(t, "get acne")
    jellyAnon = dropColumns(t, ["get acne"])
    for c in header(jellyAnon):
      colJB = getColumn(t, c)
      p = fisherTest(colAcne, colJB)
      if p < 0.05:
        println("We found a link between " ++ c ++ " jelly beans and acne (p < 0.05).")
      end
    end
  end
> pHacking(jellyAnon)
"#;

#[test]
fn phacking_homogeneous_is_clean() {
    assert_clean(PHACKING);
}

#[test]
fn phacking_on_named_table_needs_narrowing() {
    let r = check(&PHACKING.replace("pHacking(jellyAnon)", "pHacking(jellyNamed)"));
    let es = errors(&r);
    assert!(
        es.iter().any(|d| d.category == Category::HeterogeneousDynamicAccess),
        "{:#?}",
        r.diagnostics
    );
    let fixed = PHACKING
        .replace("pHacking(jellyAnon)", "pHacking(dropColumns(jellyNamed, [\"name\"]))");
    assert_clean(&fixed);
}

#[test]
fn add_column_prediction_and_requires() {
    let r = assert_clean(r#"t = addColumn(students, "hair-color", ["brown", "red", "blonde"])"#);
    let Ty::Table(tt) = &r.bindings["t"] else { panic!() };
    assert_eq!(tt.names(), ["name", "age", "favorite color", "hair-color"]);
    assert_eq!(tt.columns[3].sort, Sort::String);
    assert_eq!(tt.nrows, Some(3));

    single_error(r#"addColumn(students, "age", [1, 2, 3])"#, Category::DuplicateColumn);
    let d = single_error(r#"addColumn(students, "h", ["a", "b"])"#, Category::LengthMismatch);
    assert_eq!(d.expected.as_deref(), Some("3"));
    assert_eq!(d.actual.as_deref(), Some("2"));
}

#[test]
fn manufactured_names_resolve() {
    let r = assert_clean(
        r#"
r = getRow(gradebook, 0)
x = r[nameAppend("quiz", "1")]
total = 0
for k in ["1", "2", "3", "4"]:
  total = total + r["quiz" ++ k]
end
"#,
    );
    assert_eq!(r.bindings["x"], Ty::Num);
    assert_eq!(r.bindings["total"], Ty::Num);
}

#[test]
fn dynamic_access_over_a_mixed_header_is_rejected() {
    let d = single_error(
        r#"
r = getRow(students, 0)
for c in header(students):
  println(r[c])
end
"#,
        Category::HeterogeneousDynamicAccess,
    );
    assert!(d.message.contains("String") && d.message.contains("Number"));
}

#[test]
fn quiz_filter_narrows_with_name_prefix() {
    // Filtering by a runtime predicate does not narrow statically; the
    // quiz columns must be selected first.
    assert_clean(
        r#"
quizzes = []
for c in header(gradebook):
  if namePrefix(c, "quiz"):
    quizzes = append(quizzes, c)
  end
end
scores = selectColumns(gradebook, quizzes)
"#,
    );
}

#[test]
fn selecting_computed_names_gives_an_open_table() {
    let r = assert_clean(
        r#"
names = []
for k in ["1", "2", "3", "4"]:
  names = append(names, nameAppend("quiz", k))
end
qs = selectColumns(gradebook, names)
r = getRow(qs, 0)
for c in header(qs):
  x = r[c] + 1
end
"#,
    );
    let Ty::Table(tt) = &r.bindings["qs"] else { panic!("{:?}", r.bindings["qs"]) };
    assert!(tt.columns.is_empty());
    assert_eq!(tt.rest.as_ref().unwrap().sort, Sort::Number);
}

#[test]
fn optional_reads_need_a_guard() {
    let d = single_error(
        "r = getRow(gradebookMissing, 0)\nx = r[\"quiz1\"] + 1",
        Category::IllegalMissing,
    );
    assert_eq!(d.span.start.line, 2);
    assert_clean("r = getRow(gradebookMissing, 0)\nx = withDefault(r[\"quiz1\"], 0) + 1");
    assert_clean(
        r#"
r = getRow(gradebookMissing, 0)
if isMissing(r["quiz1"]):
  x = 0
else:
  x = r["quiz1"] + 1
end
y = not isMissing(r["quiz3"]) and r["quiz3"] > 5
"#,
    );
}

#[test]
fn swapped_columns_literal() {
    let src = r#"
swappedColumns = table:
  name: String | age: Number | "favorite color": String
  12 | "Bob" | "blue"
  17 | "Alice" | "green"
  13 | "Eve" | "red"
end
"#;
    let r = check(src);
    let es = errors(&r);
    assert_eq!(es.len(), 1, "{:#?}", r.diagnostics);
    let d = es[0];
    assert_eq!(d.category, Category::SortMismatch);
    assert_eq!(d.cell.as_ref().unwrap().row, 1);
    assert_eq!(d.cell.as_ref().unwrap().column, "name");
    assert_eq!((d.span.start.line, d.span.start.col), (4, 3));
    assert_eq!(d.suggestions[0].kind, SuggestionKind::ReorderColumns(vec![1, 0, 2]));
    assert!(r
        .diagnostics
        .iter()
        .any(|w| !w.is_error() && w.category == Category::SwappedColumns));
}

#[test]
fn literal_errors_report_the_first_violation() {
    let d = single_error("t = table:\n  a: Number | b: String\n  1 | _\nend", Category::IllegalMissing);
    assert_eq!(d.cell.unwrap().column, "b");
    single_error("t = table:\n  a: Number | b: String\n  1\nend", Category::RaggedRow);
    single_error("t = table:\n  a: Number | a: String\n  1 | \"x\"\nend", Category::DuplicateColumn);
    let r = assert_clean("t = table:\n  a | b\n  1 | _\n  2 | \"x\"\nend");
    let Ty::Table(tt) = &r.bindings["t"] else { panic!() };
    assert_eq!(tt.to_string(), "Table<a: Number, b: String?>");
}

#[test]
fn near_miss_column_suggests_a_rename() {
    let d = single_error("r = getRow(students, 0)\nx = r[\"agee\"]", Category::UnknownColumn);
    assert_eq!(d.suggestions[0].kind, SuggestionKind::RenameTo);
    assert_eq!(d.suggestions[0].text, "age");
}

#[test]
fn functions_are_checked_per_call_site() {
    let src = "f = function(t): nrows(t) + zz end";
    // Never called, but still checked once with unknown arguments.
    single_error(src, Category::UnboundVariable);

    let src = r#"
getAge = function(r): r["age"] end
a = buildColumn(students, "a2", getAge)
b = buildColumn(jellyAnon, "a2", getAge)
"#;
    let r = check(src);
    let es = errors(&r);
    assert_eq!(es.len(), 1, "{:#?}", r.diagnostics);
    assert_eq!(es[0].category, Category::UnknownColumn);
}

#[test]
fn recursion_is_rejected() {
    single_error("f = function(n): f(n - 1) end\nf(3)", Category::Recursion);
    single_error("g = function(h): h(h) end\ng(g)", Category::Recursion);
}

#[test]
fn unused_function_locals_warn() {
    let r = assert_clean("f = function(x):\n  y = 1\n  x\nend\nf(2)");
    let w: Vec<_> = r.diagnostics.iter().filter(|d| !d.is_error()).collect();
    assert_eq!(w.len(), 1);
    assert_eq!(w[0].category, Category::UnusedBinding);
}

#[test]
fn order_by_propagates_the_key_type() {
    assert_clean(r#"o = orderBy(students, [(function(r): r["age"] end, function(a, b): a < b end)])"#);
    let r = check(r#"o = orderBy(students, [(function(r): r["name"] end, function(a, b): a - b < 0 end)])"#);
    let es = errors(&r);
    assert!(!es.is_empty());
    assert!(es.iter().all(|d| d.category == Category::SortMismatch));
    assert_eq!(es[0].span.start.col, 69);
    assert_eq!(es[0].expected.as_deref(), Some("Number"));
    assert_eq!(es[0].actual.as_deref(), Some("String"));
}

#[test]
fn arity_and_non_tables() {
    single_error("x = nrows(students, 1)", Category::ArityMismatch);
    single_error("x = nrows(3)", Category::NonTableArgument);
    single_error("x = y + 1", Category::UnboundVariable);
}

#[test]
fn table_api_requires() {
    single_error(r#"t = selectColumns(students, ["nam"])"#, Category::UnknownColumn);
    single_error(r#"t = selectColumns(students, ["name", "name"])"#, Category::DuplicateColumn);
    single_error(r#"t = hcat(students, students)"#, Category::DuplicateColumn);
    single_error(r#"t = vcat(students, jellyAnon)"#, Category::SortMismatch);
    single_error(r#"x = dotProduct(students, "age", "name")"#, Category::SortMismatch);
    single_error(r#"t = pivotLonger(students, ["name", "age"], "k", "v")"#, Category::SortMismatch);
    single_error(r#"t = leftJoin(students, gradebook, "favorite color")"#, Category::UnknownColumn);
    let r = assert_clean(r#"t = groupBySubtractive(students, "favorite color")"#);
    assert_eq!(
        r.bindings["t"].to_string(),
        "Table<key: String, groups: Table<name: String, age: Number>>"
    );
    let r = assert_clean(r#"t = pivotLonger(gradebookMissing, ["quiz1", "quiz2", "quiz3", "quiz4"], "quiz", "score")"#);
    assert_eq!(
        r.bindings["t"].to_string(),
        "Table<name: String, age: Number, midterm: Number, final: Number, quiz: ColName, score: Number?>"
    );
}

#[test]
fn loops_widen_rebound_tables() {
    let r = assert_clean(
        r#"
acc = head(students, 0)
for i in range(3):
  acc = vcat(acc, selectRows(students, [i]))
end
"#,
    );
    let Ty::Table(tt) = &r.bindings["acc"] else { panic!() };
    assert_eq!(tt.nrows, None);
}

#[test]
fn checking_is_deterministic() {
    let a = check(BLACK_AND_WHITE).diagnostics;
    let b = check(BLACK_AND_WHITE).diagnostics;
    assert_eq!(a, b);
}

#[test]
fn literal_names_do_not_reach_columns_made_from_data() {
    let src = "long = pivotLonger(gradebook, [\"quiz1\", \"quiz2\"], \"quiz\", \"score\")\nwide = pivotWider(long, \"quiz\", \"score\")\n";
    let d = single_error(&format!("{src}x = getColumn(wide, \"quiz1\")\n"), Category::UnknownColumn);
    assert!(d.notes.iter().any(|n| n.contains("header(")), "{d:?}");
    single_error(&format!("{src}r = getRow(wide, 0)\nx = r[\"quiz1\"]\n"), Category::UnknownColumn);
    assert_clean(&format!(
        "{src}scores = dropColumns(wide, [\"name\", \"age\", \"midterm\", \"quiz3\", \"quiz4\", \"final\"])\nr = getRow(scores, 0)\nfor c in header(scores):\n  x = withDefault(r[c], 0) + 1\nend\n"
    ));
}

#[test]
fn operations_needing_a_full_header_reject_open_tables() {
    let src = "long = pivotLonger(gradebook, [\"quiz1\", \"quiz2\"], \"quiz\", \"score\")\nwide = pivotWider(long, \"quiz\", \"score\")\n";
    for op in [
        "groupByRetentive(wide, \"name\")",
        "groupBySubtractive(wide, \"name\")",
        "leftJoin(wide, gradebook, \"name\")",
        "vcat(wide, wide)",
        "pivotWider(wide, \"name\", \"age\")",
    ] {
        let d = single_error(&format!("{src}x = {op}\n"), Category::UnknownColumn);
        assert!(d.notes.iter().any(|n| n.contains("selectColumns")), "{op}: {d:?}");
    }
}

#[test]
fn added_columns_keep_the_open_tail() {
    let src = "long = pivotLonger(gradebook, [\"quiz1\", \"quiz2\"], \"quiz\", \"score\")\nwide = pivotWider(long, \"quiz\", \"score\")\n";
    single_error(
        &format!("{src}t = buildColumn(wide, \"b\", function(r): r[\"age\"] end)\nx = getColumn(t, \"quiz1\")\n"),
        Category::UnknownColumn,
    );
    assert_clean(&format!(
        "{src}t = buildColumn(wide, \"b\", function(r): r[\"age\"] end)\nx = getColumn(t, \"b\")\ny = hcat(selectColumns(gradebook, [\"name\"]), dropColumns(t, [\"name\"]))\n"
    ));
}
