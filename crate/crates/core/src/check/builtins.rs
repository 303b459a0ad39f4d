use super::{Arg, Checker, NameFact, RestColumns, SeqInfo, TableType, Ty};
use crate::api::disambiguate;
use crate::diag::{suggest_columns, Category, Diagnostic};
use crate::lang::Span;
use crate::model::{quote, ColName, Column, Schema, Sort};

pub struct Builtin {
    pub name: &'static str,
    /// Accepted argument counts.
    pub arity: &'static [usize],
}

const fn b(name: &'static str, arity: &'static [usize]) -> Builtin {
    Builtin { name, arity }
}

/// Every builtin function, Table API operations first.
pub const BUILTINS: &[Builtin] = &[
    b("addColumn", &[3]),
    b("buildColumn", &[3]),
    b("selectRows", &[2]),
    b("selectColumns", &[2]),
    b("dropColumns", &[2]),
    b("head", &[2]),
    b("tsort", &[3]),
    b("vcat", &[2]),
    b("hcat", &[2]),
    b("leftJoin", &[3]),
    b("pivotLonger", &[4]),
    b("pivotWider", &[3]),
    b("groupByRetentive", &[2]),
    b("groupBySubtractive", &[2]),
    b("sampleRows", &[2, 3]),
    b("dotProduct", &[3]),
    b("getColumn", &[2]),
    b("fisherTest", &[2]),
    b("prngNext", &[1]),
    b("header", &[1]),
    b("nrows", &[1]),
    b("ncols", &[1]),
    b("getRow", &[2]),
    b("getValue", &[2]),
    b("nameAppend", &[2]),
    b("nameSplit", &[2]),
    b("namePrefix", &[2]),
    b("range", &[1, 2]),
    b("length", &[1]),
    b("append", &[2]),
    b("concat", &[2]),
    b("contains", &[2]),
    b("setAt", &[3]),
    b("floor", &[1]),
    b("isMissing", &[1]),
    b("withDefault", &[2]),
    b("toString", &[1]),
];

pub fn is_builtin(name: &str) -> bool {
    BUILTINS.iter().any(|b| b.name == name)
}

fn arity_text(a: &[usize]) -> String {
    a.iter().map(usize::to_string).collect::<Vec<_>>().join(" or ")
}

fn mismatch(span: Span, msg: impl Into<String>, expected: impl Into<String>, actual: &Ty) -> Diagnostic {
    Diagnostic::error(Category::SortMismatch, span, msg).expected(expected, actual.to_string())
}

impl Checker {
    pub(crate) fn builtin(&mut self, name: &str, args: Vec<Arg>, span: Span) -> Ty {
        let spec = BUILTINS.iter().find(|b| b.name == name).expect("known builtin");
        if !spec.arity.contains(&args.len()) {
            self.error(
                Diagnostic::error(
                    Category::ArityMismatch,
                    span,
                    format!("{name} takes {} arguments but {} were given", arity_text(spec.arity), args.len()),
                )
                .expected(arity_text(spec.arity), args.len().to_string()),
            );
            return Ty::Unknown;
        }
        let mut args = args;
        let keep_optional = match name {
            "isMissing" => 1,
            "withDefault" => 1,
            _ => 0,
        };
        for a in args.iter_mut().skip(keep_optional) {
            if matches!(a.ty, Ty::Optional(_)) {
                a.ty = self.present(a.ty.clone(), a.span);
            }
            if a.ty == Ty::Nothing {
                self.error(Diagnostic::error(
                    Category::SortMismatch,
                    a.span,
                    "this argument produces no value",
                ));
                a.ty = Ty::Unknown;
            }
        }
        let before = self.error_count();
        let result = self.signature(name, &args, span);
        if result.is_unknown() && self.error_count() == before && !args.iter().any(|a| a.ty.mentions_unknown()) {
            self.error(
                Diagnostic::error(
                    Category::UnknownColumn,
                    span,
                    format!("the result of {name} cannot be worked out before the program runs"),
                )
                .note("name the columns involved with string literals"),
            );
        }
        if let Ty::Table(tt) = &result {
            self.predict(span, tt);
        }
        result
    }

    fn signature(&mut self, name: &str, a: &[Arg], span: Span) -> Ty {
        match name {
            "addColumn" => {
                let (Some(tt), fact, seq) = (self.table(&a[0], name), self.name(&a[1]), self.seq(&a[2])) else {
                    return Ty::Unknown;
                };
                let Some((elem, info)) = seq else { return Ty::Unknown };
                if !self.fresh_column(&tt, &fact, &a[1]) {
                    return Ty::Unknown;
                }
                if let (Some(n), Some(m)) = (tt.nrows, info.len) {
                    if n != m {
                        self.error(
                            Diagnostic::error(
                                Category::LengthMismatch,
                                a[2].span,
                                format!("addColumn needs one value per row: the table has {n} rows but {m} values were given"),
                            )
                            .expected(n.to_string(), m.to_string()),
                        );
                        return Ty::Unknown;
                    }
                }
                match elem.sort() {
                    Some(sort) => self.with_column(&tt, fact, sort, a[1].span),
                    None => Ty::Unknown,
                }
            }
            "buildColumn" => {
                let (Some(tt), fact) = (self.table(&a[0], name), self.name(&a[1])) else {
                    return Ty::Unknown;
                };
                let f = a[2].ty.clone();
                if !matches!(f, Ty::Fun(_) | Ty::Unknown) {
                    self.error(mismatch(a[2].span, "buildColumn expects a function of one row", "Function", &f));
                    return Ty::Unknown;
                }
                let fe = crate::lang::Expr::new(crate::lang::ExprKind::Var("f".into()), a[2].span);
                let r = self.call_value(&f, &fe, vec![Ty::Row(tt.clone())], a[2].span);
                if !self.fresh_column(&tt, &fact, &a[1]) {
                    return Ty::Unknown;
                }
                let r = match r {
                    Ty::Optional(inner) => {
                        self.error(
                            Diagnostic::error(
                                Category::IllegalMissing,
                                a[2].span,
                                "the function may return a missing value, but built columns are not optional",
                            )
                            .note("supply a default with withDefault"),
                        );
                        *inner
                    }
                    Ty::Row(_) | Ty::Fun(_) | Ty::Nothing => {
                        self.error(mismatch(
                            a[2].span,
                            "the function must return data that fits in a cell",
                            "a cell value",
                            &r,
                        ));
                        return Ty::Unknown;
                    }
                    r => r,
                };
                match r.sort() {
                    Some(sort) if r != Ty::Never => self.with_column(&tt, fact, sort, a[1].span),
                    _ => Ty::Unknown,
                }
            }
            "selectRows" => {
                let (Some(tt), Some((elem, info))) = (self.table(&a[0], name), self.seq(&a[1])) else {
                    return Ty::Unknown;
                };
                match elem {
                    Ty::Num => Ty::Table(TableType { nrows: info.len, ..tt }),
                    Ty::Never => Ty::Table(TableType { nrows: Some(0), ..tt }),
                    Ty::Bool => {
                        if let (Some(n), Some(m)) = (tt.nrows, info.len) {
                            if n != m {
                                self.error(
                                    Diagnostic::error(
                                        Category::LengthMismatch,
                                        a[1].span,
                                        format!("the mask has {m} entries but the table has {n} rows"),
                                    )
                                    .expected(n.to_string(), m.to_string()),
                                );
                                return Ty::Unknown;
                            }
                        }
                        Ty::Table(tt.without_nrows())
                    }
                    Ty::Unknown => Ty::Table(tt.without_nrows()),
                    other => {
                        self.error(mismatch(
                            a[1].span,
                            "selectRows takes row numbers or one Boolean per row",
                            "Seq<Number> or Seq<Boolean>",
                            &Ty::seq(other),
                        ));
                        Ty::Unknown
                    }
                }
            }
            "selectColumns" | "dropColumns" => {
                let (Some(tt), Some((elem, info))) = (self.table(&a[0], name), self.seq(&a[1])) else {
                    return Ty::Unknown;
                };
                if !matches!(elem, Ty::Str(_) | Ty::Name(_) | Ty::Never | Ty::Unknown) {
                    self.error(mismatch(a[1].span, format!("{name} takes column names"), "Seq<ColName>", &Ty::seq(elem)));
                    return Ty::Unknown;
                }
                if let Some(names) = info.names {
                    for (i, n) in names.iter().enumerate() {
                        if names[..i].contains(n) {
                            self.error(Diagnostic::error(
                                Category::DuplicateColumn,
                                a[1].span,
                                format!("column {} is listed more than once", quote(n)),
                            ));
                            return Ty::Unknown;
                        }
                        if tt.column(n).is_none() {
                            self.unknown_column(&tt, n, a[1].span);
                            return Ty::Unknown;
                        }
                    }
                    return if name == "selectColumns" {
                        match names.iter().map(|n| tt.column(n).cloned()).collect::<Option<Vec<_>>>() {
                            Some(cols) => Ty::Table(TableType::closed(cols, tt.nrows)),
                            None => Ty::Unknown,
                        }
                    } else {
                        let columns = tt
                            .columns
                            .iter()
                            .filter(|c| !names.iter().any(|n| c.name == *n.as_str()))
                            .cloned()
                            .collect();
                        let rest = tt.rest.clone().map(|mut r| {
                            if let Some(ns) = &mut r.names {
                                ns.retain(|n| !names.contains(n));
                            }
                            r
                        });
                        Ty::Table(TableType {
                            columns,
                            rest,
                            nrows: tt.nrows,
                        })
                    };
                }
                let Some(cands) = elem.fact().and_then(NameFact::candidates) else {
                    return Ty::Unknown;
                };
                let mut found = Vec::new();
                for c in &cands {
                    match tt.column(c) {
                        Some(col) => found.push(col.clone()),
                        None if tt.rest_may_have(c) => return Ty::Unknown,
                        None => {
                            self.unknown_column(&tt, c, a[1].span);
                            return Ty::Unknown;
                        }
                    }
                }
                if name == "dropColumns" {
                    return Ty::Unknown;
                }
                let sort = found[0].sort.clone();
                if found.iter().any(|c| c.sort != sort) {
                    return Ty::Unknown;
                }
                let optional = if found.iter().all(|c| c.optional) {
                    Some(true)
                } else if found.iter().all(|c| !c.optional) {
                    Some(false)
                } else {
                    None
                };
                Ty::Table(TableType {
                    columns: Vec::new(),
                    rest: Some(RestColumns {
                        sort,
                        optional,
                        names: Some(cands),
                    }),
                    nrows: tt.nrows,
                })
            }
            "head" => {
                let tt = self.table(&a[0], name);
                self.num(&a[1], name);
                tt.map_or(Ty::Unknown, |tt| Ty::Table(tt.without_nrows()))
            }
            "tsort" => {
                let tt = self.table(&a[0], name);
                let fact = self.name(&a[1]);
                self.boolean(&a[2], name);
                let Some(tt) = tt else { return Ty::Unknown };
                if let Some(col) = self.known_column(&tt, &fact, &a[1]) {
                    if !col.sort.is_orderable() {
                        self.error(mismatch(
                            a[1].span,
                            format!("tsort needs a column with a natural order, but {} has none", quote(col.name.as_str())),
                            "Number, String, Boolean or ColName",
                            &Ty::of_sort(&col.sort),
                        ));
                        return Ty::Unknown;
                    }
                }
                Ty::Table(tt)
            }
            "vcat" => {
                let (Some(t1), Some(t2)) = (self.table(&a[0], name), self.table(&a[1], name)) else {
                    return Ty::Unknown;
                };
                if let Some(open) = [&t1, &t2].into_iter().find(|t| t.rest.is_some()) {
                    return self.open_table(open, span, name);
                }
                if t1.columns != t2.columns {
                    self.error(
                        Diagnostic::error(Category::SortMismatch, a[1].span, "vcat needs two tables with the same schema")
                            .expected(t1.to_string(), t2.to_string()),
                    );
                    return Ty::Unknown;
                }
                let nrows = t1.nrows.zip(t2.nrows).map(|(x, y)| x + y);
                Ty::Table(TableType { nrows, ..t1 })
            }
            "hcat" => {
                let (Some(t1), Some(t2)) = (self.table(&a[0], name), self.table(&a[1], name)) else {
                    return Ty::Unknown;
                };
                if let Some(c) = t2.columns.iter().find(|c| t1.column(c.name.as_str()).is_some()) {
                    self.error(Diagnostic::error(
                        Category::DuplicateColumn,
                        a[1].span,
                        format!("both tables have a column {}", quote(c.name.as_str())),
                    ));
                    return Ty::Unknown;
                }
                if let (Some(n), Some(m)) = (t1.nrows, t2.nrows) {
                    if n != m {
                        self.error(
                            Diagnostic::error(
                                Category::LengthMismatch,
                                a[1].span,
                                format!("hcat needs equal row counts, but the tables have {n} and {m} rows"),
                            )
                            .expected(n.to_string(), m.to_string()),
                        );
                        return Ty::Unknown;
                    }
                }
                if t1.rest.is_some() && t2.rest.is_some() {
                    return self.open_table(&t1, span, name);
                }
                let mut columns = t1.columns;
                columns.extend(t2.columns);
                Ty::Table(TableType {
                    columns,
                    rest: t1.rest.or(t2.rest),
                    nrows: t1.nrows.or(t2.nrows),
                })
            }
            "leftJoin" => {
                let (Some(t1), Some(t2)) = (self.table(&a[0], name), self.table(&a[1], name)) else {
                    return Ty::Unknown;
                };
                let fact = self.name(&a[2]);
                let (Some(lc), Some(rc)) = (self.known_column(&t1, &fact, &a[2]), self.known_column(&t2, &fact, &a[2]))
                else {
                    return Ty::Unknown;
                };
                if lc.sort != rc.sort {
                    self.error(
                        Diagnostic::error(
                            Category::SortMismatch,
                            a[2].span,
                            format!("the key column {} has different sorts in the two tables", quote(lc.name.as_str())),
                        )
                        .expected(lc.sort.to_string(), rc.sort.to_string()),
                    );
                    return Ty::Unknown;
                }
                if lc.optional || rc.optional {
                    self.error(
                        Diagnostic::error(
                            Category::SortMismatch,
                            a[2].span,
                            format!("the key column {} may be empty", quote(lc.name.as_str())),
                        )
                        .expected(lc.sort.to_string(), format!("{}?", lc.sort)),
                    );
                    return Ty::Unknown;
                }
                if let Some(open) = [&t1, &t2].into_iter().find(|t| t.rest.is_some()) {
                    return self.open_table(open, span, name);
                }
                let mut columns = t1.columns.clone();
                for c in t2.columns.iter().filter(|c| c.name != lc.name) {
                    let n = disambiguate(c.name.as_str(), &columns);
                    columns.push(Column::optional(ColName::new(n).expect("non-empty"), c.sort.clone()));
                }
                Ty::Table(TableType::closed(columns, t1.nrows))
            }
            "pivotLonger" => {
                let (Some(tt), seq) = (self.table(&a[0], name), self.seq(&a[1])) else {
                    return Ty::Unknown;
                };
                let (nf, vf) = (self.name(&a[2]), self.name(&a[3]));
                let Some((_, info)) = seq else { return Ty::Unknown };
                let (Some(cs), NameFact::Known(nt), NameFact::Known(vt)) = (info.names, nf, vf) else {
                    return Ty::Unknown;
                };
                if tt.rest.is_some() {
                    return self.open_table(&tt, span, name);
                }
                let mut picked: Vec<&Column> = Vec::new();
                for (i, c) in cs.iter().enumerate() {
                    if cs[..i].contains(c) {
                        self.error(Diagnostic::error(
                            Category::DuplicateColumn,
                            a[1].span,
                            format!("column {} is listed more than once", quote(c)),
                        ));
                        return Ty::Unknown;
                    }
                    match tt.column(c) {
                        Some(col) => picked.push(col),
                        None => {
                            self.unknown_column(&tt, c, a[1].span);
                            return Ty::Unknown;
                        }
                    }
                }
                let Some(first) = picked.first() else { return Ty::Unknown };
                let sort = first.sort.clone();
                if let Some(bad) = picked.iter().find(|c| c.sort != sort) {
                    self.error(
                        Diagnostic::error(
                            Category::SortMismatch,
                            a[1].span,
                            format!("pivoted columns must share one sort, but {} differs", quote(bad.name.as_str())),
                        )
                        .expected(sort.to_string(), bad.sort.to_string()),
                    );
                    return Ty::Unknown;
                }
                let optional = picked.iter().any(|c| c.optional);
                let mut columns: Vec<Column> =
                    tt.columns.iter().filter(|c| !cs.iter().any(|n| c.name == *n.as_str())).cloned().collect();
                for (n, arg) in [(&nt, &a[2]), (&vt, &a[3])] {
                    if columns.iter().any(|c| c.name == *n.as_str()) {
                        self.error(Diagnostic::error(
                            Category::DuplicateColumn,
                            arg.span,
                            format!("column {} already exists", quote(n)),
                        ));
                        return Ty::Unknown;
                    }
                }
                if nt == vt {
                    self.error(Diagnostic::error(
                        Category::DuplicateColumn,
                        a[3].span,
                        format!("the names and values columns are both called {}", quote(&nt)),
                    ));
                    return Ty::Unknown;
                }
                columns.push(Column::new(ColName::new(&nt).expect("non-empty"), Sort::ColName));
                columns.push(Column {
                    name: ColName::new(&vt).expect("non-empty"),
                    sort,
                    optional,
                });
                Ty::Table(TableType::closed(columns, tt.nrows.map(|n| n * cs.len())))
            }
            "pivotWider" => {
                let Some(tt) = self.table(&a[0], name) else { return Ty::Unknown };
                let (nf, vf) = (self.name(&a[1]), self.name(&a[2]));
                let (Some(nc), Some(vc)) = (self.known_column(&tt, &nf, &a[1]), self.known_column(&tt, &vf, &a[2]))
                else {
                    return Ty::Unknown;
                };
                if nc.name == vc.name {
                    self.error(Diagnostic::error(
                        Category::DuplicateColumn,
                        a[2].span,
                        "the names and values columns must differ",
                    ));
                    return Ty::Unknown;
                }
                if !matches!(nc.sort, Sort::ColName | Sort::String) {
                    self.error(mismatch(
                        a[1].span,
                        format!("new column names come from {}, which does not hold names", quote(nc.name.as_str())),
                        "ColName or String",
                        &Ty::of_sort(&nc.sort),
                    ));
                    return Ty::Unknown;
                }
                if tt.rest.is_some() {
                    return self.open_table(&tt, span, name);
                }
                let columns = tt.columns.iter().filter(|c| c.name != nc.name && c.name != vc.name).cloned().collect();
                Ty::Table(TableType {
                    columns,
                    rest: Some(RestColumns {
                        sort: vc.sort.clone(),
                        optional: if vc.optional { Some(true) } else { None },
                        names: None,
                    }),
                    nrows: None,
                })
            }
            "groupByRetentive" | "groupBySubtractive" => {
                let Some(tt) = self.table(&a[0], name) else { return Ty::Unknown };
                let fact = self.name(&a[1]);
                let Some(key) = self.known_column(&tt, &fact, &a[1]) else { return Ty::Unknown };
                let keep = tt
                    .columns
                    .iter()
                    .filter(|c| name == "groupByRetentive" || c.name != key.name)
                    .cloned()
                    .collect();
                if tt.rest.is_some() {
                    return self.open_table(&tt, span, name);
                }
                let sub = Schema::new(keep).expect("subset of a valid schema");
                Ty::Table(TableType::closed(
                    vec![
                        Column::new(ColName::new("key").expect("literal"), key.sort.clone()),
                        Column::new(ColName::new("groups").expect("literal"), Sort::SubTable(sub)),
                    ],
                    None,
                ))
            }
            "sampleRows" => {
                let tt = self.table(&a[0], name);
                for x in &a[1..] {
                    self.num(x, name);
                }
                tt.map_or(Ty::Unknown, |tt| Ty::Table(tt.without_nrows()))
            }
            "dotProduct" => {
                let Some(tt) = self.table(&a[0], name) else { return Ty::Unknown };
                for x in &a[1..] {
                    let fact = self.name(x);
                    let t = self.column_ref(&tt, &fact, x.span, "r");
                    let base = match t {
                        Ty::Optional(i) => *i,
                        t => t,
                    };
                    if !matches!(base, Ty::Num | Ty::Unknown) {
                        self.error(mismatch(x.span, "dotProduct multiplies Number columns", "Number", &base));
                    }
                }
                Ty::Num
            }
            "getColumn" => {
                let Some(tt) = self.table(&a[0], name) else { return Ty::Unknown };
                let fact = self.name(&a[1]);
                let t = match self.column_ref(&tt, &fact, a[1].span, "r") {
                    Ty::Optional(i) => *i,
                    t => t,
                };
                if t.is_unknown() {
                    return Ty::Unknown;
                }
                Ty::Seq(
                    Box::new(t),
                    SeqInfo {
                        len: tt.nrows,
                        names: None,
                    },
                )
            }
            "fisherTest" => {
                let mut lens = Vec::new();
                for x in a {
                    match self.seq(x) {
                        Some((Ty::Bool | Ty::Never | Ty::Unknown, info)) => lens.push(info.len),
                        Some((e, _)) => {
                            self.error(mismatch(x.span, "fisherTest takes Boolean sequences", "Seq<Boolean>", &Ty::seq(e)))
                        }
                        None => {}
                    }
                }
                if let [Some(n), Some(m)] = lens[..] {
                    if n != m {
                        self.error(
                            Diagnostic::error(Category::LengthMismatch, a[1].span, "fisherTest needs sequences of equal length")
                                .expected(n.to_string(), m.to_string()),
                        );
                    }
                }
                Ty::Num
            }
            "prngNext" | "floor" => {
                self.num(&a[0], name);
                Ty::Num
            }
            "header" => {
                let Some(tt) = self.table(&a[0], name) else {
                    return Ty::seq(Ty::Name(NameFact::Unknown));
                };
                let mut names = tt.names();
                let exact = tt.rest.is_none();
                let fact = match &tt.rest {
                    None => Some(names.clone()),
                    Some(RestColumns { names: Some(ns), .. }) => {
                        names.extend(ns.iter().cloned());
                        Some(names.clone())
                    }
                    Some(_) => None,
                };
                let elem = match fact {
                    Some(ns) if ns.is_empty() => Ty::Never,
                    Some(ns) if ns.len() == 1 => Ty::Name(NameFact::Known(ns[0].clone())),
                    Some(ns) => Ty::Name(NameFact::MemberOf(ns)),
                    None => Ty::Name(NameFact::Unknown),
                };
                Ty::Seq(
                    Box::new(elem),
                    SeqInfo {
                        len: exact.then_some(names.len()),
                        names: exact.then_some(names),
                    },
                )
            }
            "nrows" | "ncols" => {
                self.table(&a[0], name);
                Ty::Num
            }
            "getRow" => {
                let tt = self.table(&a[0], name);
                self.num(&a[1], name);
                tt.map_or(Ty::Unknown, |tt| Ty::Row(tt.without_nrows()))
            }
            "getValue" => {
                let fact = self.name(&a[1]);
                match &a[0].ty {
                    Ty::Row(tt) => {
                        let tt = tt.clone();
                        self.column_ref(&tt, &fact, span, "r")
                    }
                    Ty::Unknown => Ty::Unknown,
                    other => {
                        self.error(mismatch(a[0].span, "getValue reads from a row", "Row", other));
                        Ty::Unknown
                    }
                }
            }
            "nameAppend" => {
                let (x, y) = (self.name(&a[0]), self.name(&a[1]));
                Ty::Name(NameFact::concat(&x, &y))
            }
            "nameSplit" => {
                self.name(&a[0]);
                self.name(&a[1]);
                Ty::seq(Ty::str())
            }
            "namePrefix" => {
                self.name(&a[0]);
                self.name(&a[1]);
                Ty::Bool
            }
            "range" => {
                for x in a {
                    self.num(x, name);
                }
                Ty::seq(Ty::Num)
            }
            "length" => {
                self.seq(&a[0]);
                Ty::Num
            }
            "append" => {
                let Some((elem, info)) = self.seq(&a[0]) else { return Ty::Unknown };
                let v = self.storable_arg(&a[1]);
                let j = Ty::join(&elem, &v);
                if j.is_unknown() && !elem.is_unknown() && !v.is_unknown() {
                    self.error(mismatch(a[1].span, "appended values must match the sequence's elements", elem.to_string(), &v));
                    return Ty::Unknown;
                }
                let names = match (info.names, v.fact()) {
                    (Some(mut ns), Some(NameFact::Known(n))) => {
                        ns.push(n.clone());
                        Some(ns)
                    }
                    _ => None,
                };
                Ty::Seq(
                    Box::new(j),
                    SeqInfo {
                        len: info.len.map(|n| n + 1),
                        names,
                    },
                )
            }
            "concat" => {
                let (Some((e1, i1)), Some((e2, i2))) = (self.seq(&a[0]), self.seq(&a[1])) else {
                    return Ty::Unknown;
                };
                let j = Ty::join(&e1, &e2);
                if j.is_unknown() && !e1.is_unknown() && !e2.is_unknown() {
                    self.error(mismatch(a[1].span, "concatenated sequences must share an element sort", Ty::seq(e1).to_string(), &Ty::seq(e2)));
                    return Ty::Unknown;
                }
                Ty::Seq(
                    Box::new(j),
                    SeqInfo {
                        len: i1.len.zip(i2.len).map(|(x, y)| x + y),
                        names: i1.names.zip(i2.names).map(|(mut x, y)| {
                            x.extend(y);
                            x
                        }),
                    },
                )
            }
            "contains" => {
                if let Some((elem, _)) = self.seq(&a[0]) {
                    if !Ty::comparable(&elem, &a[1].ty) && elem != Ty::Never {
                        self.error(mismatch(a[1].span, "contains compares against the sequence's elements", elem.to_string(), &a[1].ty));
                    }
                }
                Ty::Bool
            }
            "setAt" => {
                let Some((elem, info)) = self.seq(&a[0]) else { return Ty::Unknown };
                self.num(&a[1], name);
                let v = self.storable_arg(&a[2]);
                let j = Ty::join(&elem, &v);
                if j.is_unknown() && !elem.is_unknown() && !v.is_unknown() {
                    self.error(mismatch(a[2].span, "the new element must match the sequence's elements", elem.to_string(), &v));
                    return Ty::Unknown;
                }
                Ty::Seq(Box::new(j), SeqInfo { len: info.len, names: None })
            }
            "isMissing" => Ty::Bool,
            "withDefault" => {
                let v = match &a[0].ty {
                    Ty::Optional(i) => (**i).clone(),
                    t => t.clone(),
                };
                let d = a[1].ty.clone();
                let j = Ty::join(&v, &d);
                if j.is_unknown() && !v.is_unknown() && !d.is_unknown() {
                    self.error(mismatch(a[1].span, "the default must have the value's sort", v.to_string(), &d));
                    return Ty::Unknown;
                }
                j
            }
            "toString" => Ty::str(),
            other => unreachable!("no signature for {other}"),
        }
    }

    pub(crate) fn table_arg(&mut self, t: Ty, span: Span, op: &str) -> Option<TableType> {
        match t {
            Ty::Table(tt) => Some(tt),
            Ty::Unknown => None,
            Ty::Optional(inner) => {
                self.missing_error(span);
                self.table_arg(*inner, span, op)
            }
            other => {
                self.error(
                    Diagnostic::error(Category::NonTableArgument, span, format!("{op} expects a table here"))
                        .expected("Table", other.to_string()),
                );
                None
            }
        }
    }

    fn table(&mut self, a: &Arg, op: &str) -> Option<TableType> {
        self.table_arg(a.ty.clone(), a.span, op)
    }

    /// What is known about a name-valued argument; reports non-names.
    fn name(&mut self, a: &Arg) -> NameFact {
        match &a.ty {
            Ty::Str(f) | Ty::Name(f) => f.clone(),
            Ty::Unknown => NameFact::Unknown,
            other => {
                self.error(mismatch(a.span, "a column name is expected here", "ColName", other));
                NameFact::Unknown
            }
        }
    }

    fn seq(&mut self, a: &Arg) -> Option<(Ty, SeqInfo)> {
        match &a.ty {
            Ty::Seq(e, info) => Some(((**e).clone(), info.clone())),
            Ty::Unknown => Some((Ty::Unknown, SeqInfo::default())),
            other => {
                self.error(mismatch(a.span, "a sequence is expected here", "Seq", other));
                None
            }
        }
    }

    fn num(&mut self, a: &Arg, op: &str) {
        if !matches!(a.ty, Ty::Num | Ty::Unknown) {
            self.error(mismatch(a.span, format!("{op} expects a Number here"), "Number", &a.ty));
        }
    }

    fn boolean(&mut self, a: &Arg, op: &str) {
        if !matches!(a.ty, Ty::Bool | Ty::Unknown) {
            self.error(mismatch(a.span, format!("{op} expects a Boolean here"), "Boolean", &a.ty));
        }
    }

    fn storable_arg(&mut self, a: &Arg) -> Ty {
        match &a.ty {
            Ty::Row(_) | Ty::Fun(_) => {
                self.error(Diagnostic::error(
                    Category::SortMismatch,
                    a.span,
                    format!("a {} cannot be stored in a sequence", a.ty),
                ));
                Ty::Unknown
            }
            t => t.clone(),
        }
    }

    fn unknown_column(&mut self, tt: &TableType, name: &str, span: Span) {
        let header = tt.names();
        let mut d =
            Diagnostic::error(Category::UnknownColumn, span, format!("column {} is not in the header", quote(name)))
                .expected(format!("one of {}", header.join(", ")), name.to_string())
                .with_suggestions(
                    suggest_columns(name, &header)
                        .into_iter()
                        .filter(|s| s.kind == crate::diag::SuggestionKind::RenameTo)
                        .collect(),
                );
        if let Some(n) = tt.open_note() {
            d = d.note(n);
        }
        self.error(d);
    }

    /// The column a statically known name denotes. Unknown names give
    /// `None` without a diagnostic; absent ones are reported.
    fn known_column(&mut self, tt: &TableType, fact: &NameFact, a: &Arg) -> Option<Column> {
        let NameFact::Known(n) = fact else { return None };
        match tt.column(n) {
            Some(c) => Some(c.clone()),
            None => {
                self.unknown_column(tt, n, a.span);
                None
            }
        }
    }

    /// `tt` with one more column of sort `sort`, named by `fact`.
    fn with_column(&mut self, tt: &TableType, fact: NameFact, sort: Sort, span: Span) -> Ty {
        let rest = |names| RestColumns {
            sort: sort.clone(),
            optional: Some(false),
            names,
        };
        let rest = match fact {
            NameFact::Known(n) => {
                let mut columns = tt.columns.clone();
                columns.push(Column::new(ColName::new(n).expect("non-empty"), sort));
                return Ty::Table(TableType {
                    columns,
                    rest: tt.rest.clone(),
                    nrows: tt.nrows,
                });
            }
            _ if tt.rest.is_some() => return self.open_table(tt, span, "a column with a computed name"),
            NameFact::MemberOf(ns) => rest(Some(ns)),
            NameFact::Unknown => rest(None),
        };
        Ty::Table(TableType {
            columns: tt.columns.clone(),
            rest: Some(rest),
            nrows: tt.nrows,
        })
    }

    /// Rejects an operation that needs the full header of a table whose
    /// header is only partly known.
    fn open_table(&mut self, tt: &TableType, span: Span, op: &str) -> Ty {
        let mut d = Diagnostic::error(
            Category::UnknownColumn,
            span,
            format!("{op} needs every column of this table to be known before the program runs"),
        );
        if let Some(n) = tt.open_note() {
            d = d.note(n);
        }
        self.error(d.note("keep the columns you need with selectColumns first"));
        Ty::Unknown
    }

    /// Whether a new column of this name may be added.
    fn fresh_column(&mut self, tt: &TableType, fact: &NameFact, a: &Arg) -> bool {
        if let NameFact::Known(n) = fact {
            if tt.column(n).is_some() {
                self.error(
                    Diagnostic::error(
                        Category::DuplicateColumn,
                        a.span,
                        format!("column {} is already in the header", quote(n)),
                    )
                    .note("choose a name that is not in the header"),
                );
                return false;
            }
        }
        true
    }
}

