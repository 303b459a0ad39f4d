use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::lang::FunctionDef;
use crate::model::{ColName, Column, Schema, Sort};

/// What is statically known about the text of a name-like value.
#[derive(Debug, Clone, PartialEq)]
pub enum NameFact {
    Known(String),
    /// One of these names (in first-seen order), e.g. a loop variable over
    /// a header.
    MemberOf(Vec<String>),
    Unknown,
}

/// Cartesian products larger than this give up and become `Unknown`.
const MAX_CANDIDATES: usize = 256;

impl NameFact {
    pub fn candidates(&self) -> Option<Vec<String>> {
        match self {
            NameFact::Known(n) => Some(vec![n.clone()]),
            NameFact::MemberOf(ns) => Some(ns.clone()),
            NameFact::Unknown => None,
        }
    }

    fn from_candidates(mut ns: Vec<String>) -> NameFact {
        let mut seen = BTreeSet::new();
        ns.retain(|n| seen.insert(n.clone()));
        match ns.len() {
            1 => NameFact::Known(ns.pop().expect("one element")),
            n if n > MAX_CANDIDATES => NameFact::Unknown,
            _ => NameFact::MemberOf(ns),
        }
    }

    /// Facts about `a ++ b`: concatenation of knowns, and the product of
    /// candidate sets otherwise.
    pub fn concat(a: &NameFact, b: &NameFact) -> NameFact {
        match (a.candidates(), b.candidates()) {
            (Some(xs), Some(ys)) if xs.len() * ys.len() <= MAX_CANDIDATES => {
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for x in &xs {
                    for y in &ys {
                        out.push(format!("{x}{y}"));
                    }
                }
                NameFact::from_candidates(out)
            }
            _ => NameFact::Unknown,
        }
    }

    pub fn join(a: &NameFact, b: &NameFact) -> NameFact {
        match (a.candidates(), b.candidates()) {
            (Some(mut xs), Some(ys)) => {
                xs.extend(ys);
                NameFact::from_candidates(xs)
            }
            _ => NameFact::Unknown,
        }
    }
}

/// Columns of a table whose names are not known statically, as produced
/// by `pivotWider` or by selecting computed names.
#[derive(Debug, Clone, PartialEq)]
pub struct RestColumns {
    pub sort: Sort,
    /// `None` when some may be optional and others not.
    pub optional: Option<bool>,
    /// Every name the rest columns may have, if bounded.
    pub names: Option<Vec<String>>,
}

/// The static counterpart of a schema.
#[derive(Debug, Clone, PartialEq)]
pub struct TableType {
    pub columns: Vec<Column>,
    pub rest: Option<RestColumns>,
    /// Row count, when it follows from literals.
    pub nrows: Option<usize>,
}

impl TableType {
    pub fn closed(columns: Vec<Column>, nrows: Option<usize>) -> Self {
        TableType {
            columns,
            rest: None,
            nrows,
        }
    }

    pub fn of_schema(s: &Schema, nrows: Option<usize>) -> Self {
        TableType::closed(s.columns().to_vec(), nrows)
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.to_string()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == *name)
    }

    /// Whether a column of this name might exist in the open tail.
    pub fn rest_may_have(&self, name: &str) -> bool {
        match &self.rest {
            None => false,
            Some(r) => r.names.as_ref().is_none_or(|ns| ns.iter().any(|n| n == name)),
        }
    }

    /// Hint attached to unknown-column errors on tables with columns
    /// that only exist at run time.
    pub fn open_note(&self) -> Option<&'static str> {
        self.rest
            .as_ref()
            .map(|_| "some columns of this table are made from data; reach them through header(...) rather than by name")
    }

    pub fn schema(&self) -> Option<Schema> {
        if self.rest.is_some() {
            return None;
        }
        Schema::new(self.columns.clone()).ok()
    }

    pub fn without_nrows(&self) -> TableType {
        TableType {
            nrows: None,
            ..self.clone()
        }
    }

    /// Whether a runtime schema is one this type describes.
    pub fn matches(&self, s: &Schema) -> bool {
        let cols = s.columns();
        if cols.len() < self.columns.len() || cols[..self.columns.len()] != self.columns[..] {
            return false;
        }
        let extra = &cols[self.columns.len()..];
        match &self.rest {
            None => extra.is_empty(),
            Some(r) => extra.iter().all(|c| {
                c.sort == r.sort
                    && r.optional.is_none_or(|o| o == c.optional)
                    && r.names.as_ref().is_none_or(|ns| ns.iter().any(|n| c.name == *n.as_str()))
            }),
        }
    }
}

impl fmt::Display for TableType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Table<")?;
        for (i, c) in self.columns.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        if let Some(r) = &self.rest {
            if !self.columns.is_empty() {
                f.write_str(", ")?;
            }
            write!(f, "...: {}", r.sort)?;
            if r.optional != Some(false) {
                f.write_str("?")?;
            }
        }
        f.write_str(">")
    }
}

/// A function value seen by the checker: its definition plus the static
/// environment it closed over.
#[derive(Debug)]
pub struct ClosureTy {
    pub id: usize,
    pub def: Arc<FunctionDef>,
    pub env: Arc<BTreeMap<String, Ty>>,
    /// The name the function was bound to when it was defined.
    pub name: Option<String>,
}

#[derive(Debug, Clone)]
pub enum FunTy {
    Builtin(&'static str),
    Closure(Arc<ClosureTy>),
}

impl PartialEq for FunTy {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (FunTy::Builtin(a), FunTy::Builtin(b)) => a == b,
            (FunTy::Closure(a), FunTy::Closure(b)) => a.id == b.id,
            _ => false,
        }
    }
}

/// Static knowledge about a sequence beyond its element type.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeqInfo {
    pub len: Option<usize>,
    /// The exact element names, when every element is a known name.
    pub names: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ty {
    Num,
    Bool,
    Str(NameFact),
    Name(NameFact),
    Seq(Box<Ty>, SeqInfo),
    Table(TableType),
    Row(TableType),
    Fun(FunTy),
    /// A value read from a cell that may be empty.
    Optional(Box<Ty>),
    /// The element type of the empty sequence.
    Never,
    /// Statements and functions that produce no value.
    Nothing,
    /// Anything; used after an error so it is reported once.
    Unknown,
}

impl Ty {
    pub fn str() -> Ty {
        Ty::Str(NameFact::Unknown)
    }

    pub fn seq(elem: Ty) -> Ty {
        Ty::Seq(Box::new(elem), SeqInfo::default())
    }

    pub fn of_sort(s: &Sort) -> Ty {
        match s {
            Sort::Number => Ty::Num,
            Sort::Boolean => Ty::Bool,
            Sort::String => Ty::str(),
            Sort::ColName => Ty::Name(NameFact::Unknown),
            Sort::Seq(e) => Ty::seq(Ty::of_sort(e)),
            Sort::SubTable(schema) => Ty::Table(TableType::of_schema(schema, None)),
        }
    }

    pub fn of_column(c: &Column) -> Ty {
        let t = Ty::of_sort(&c.sort);
        if c.optional {
            Ty::Optional(Box::new(t))
        } else {
            t
        }
    }

    /// The sort of data of this type, if it can be stored in a cell.
    pub fn sort(&self) -> Option<Sort> {
        Some(match self {
            Ty::Num | Ty::Never => Sort::Number,
            Ty::Bool => Sort::Boolean,
            Ty::Str(_) => Sort::String,
            Ty::Name(_) => Sort::ColName,
            Ty::Seq(e, _) => Sort::seq(e.sort()?),
            Ty::Table(tt) => Sort::SubTable(tt.schema()?),
            _ => return None,
        })
    }

    pub fn fact(&self) -> Option<&NameFact> {
        match self {
            Ty::Str(f) | Ty::Name(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Ty::Unknown)
    }

    pub fn mentions_unknown(&self) -> bool {
        match self {
            Ty::Unknown => true,
            Ty::Seq(e, _) | Ty::Optional(e) => e.mentions_unknown(),
            _ => false,
        }
    }

    /// Whether values of this type fit a column of sort `s`.
    pub fn fits(&self, s: &Sort) -> bool {
        match (self, s) {
            (Ty::Unknown, _) => true,
            (Ty::Seq(e, _), Sort::Seq(es)) => matches!(**e, Ty::Never) || e.fits(es),
            (Ty::Table(tt), Sort::SubTable(schema)) => tt.matches(schema),
            (t, s) => t.sort().as_ref() == Some(s),
        }
    }

    /// Least upper bound used where control flow merges.
    pub fn join(a: &Ty, b: &Ty) -> Ty {
        match (a, b) {
            _ if a == b => a.clone(),
            (Ty::Unknown, _) | (_, Ty::Unknown) => Ty::Unknown,
            (Ty::Never, t) | (t, Ty::Never) => t.clone(),
            (Ty::Optional(x), Ty::Optional(y)) => Ty::Optional(Box::new(Ty::join(x, y))),
            (Ty::Optional(x), t) | (t, Ty::Optional(x)) => match Ty::join(x, t) {
                Ty::Unknown => Ty::Unknown,
                j => Ty::Optional(Box::new(j)),
            },
            (Ty::Str(f), Ty::Str(g)) | (Ty::Str(f), Ty::Name(g)) | (Ty::Name(f), Ty::Str(g)) => {
                Ty::Str(NameFact::join(f, g))
            }
            (Ty::Name(f), Ty::Name(g)) => Ty::Name(NameFact::join(f, g)),
            (Ty::Seq(x, i), Ty::Seq(y, j)) => {
                let elem = Ty::join(x, y);
                if elem.is_unknown() {
                    return Ty::Unknown;
                }
                Ty::Seq(
                    Box::new(elem),
                    SeqInfo {
                        len: if i.len == j.len { i.len } else { None },
                        names: if i.names == j.names { i.names.clone() } else { None },
                    },
                )
            }
            (Ty::Table(x), Ty::Table(y)) if x.without_nrows() == y.without_nrows() => {
                Ty::Table(x.without_nrows())
            }
            (Ty::Row(x), Ty::Row(y)) if x.without_nrows() == y.without_nrows() => Ty::Row(x.without_nrows()),
            _ => Ty::Unknown,
        }
    }

    /// Whether two types can be compared with `==`.
    pub fn comparable(a: &Ty, b: &Ty) -> bool {
        match (a, b) {
            (Ty::Unknown, _) | (_, Ty::Unknown) => true,
            (Ty::Str(_) | Ty::Name(_), Ty::Str(_) | Ty::Name(_)) => true,
            (Ty::Seq(x, _), Ty::Seq(y, _)) => {
                matches!(**x, Ty::Never) || matches!(**y, Ty::Never) || Ty::comparable(x, y)
            }
            (Ty::Table(_), Ty::Table(_)) => true,
            (Ty::Fun(_), _) | (_, Ty::Fun(_)) | (Ty::Row(_), _) | (_, Ty::Row(_)) => false,
            _ => std::mem::discriminant(a) == std::mem::discriminant(b),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Num => f.write_str("Number"),
            Ty::Bool => f.write_str("Boolean"),
            Ty::Str(_) => f.write_str("String"),
            Ty::Name(_) => f.write_str("ColName"),
            Ty::Seq(e, _) => write!(f, "Seq<{e}>"),
            Ty::Table(tt) => write!(f, "{tt}"),
            Ty::Row(tt) => write!(f, "Row<{}>", &tt.to_string()["Table<".len()..tt.to_string().len() - 1]),
            Ty::Fun(_) => f.write_str("Function"),
            Ty::Optional(t) => write!(f, "{t}?"),
            Ty::Never => f.write_str("Nothing"),
            Ty::Nothing => f.write_str("no value"),
            Ty::Unknown => f.write_str("unknown"),
        }
    }
}

pub fn column(name: &str, sort: Sort, optional: bool) -> Column {
    Column {
        name: ColName::new(name).expect("non-empty column name"),
        sort,
        optional,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_folds_knowns_and_expands_products() {
        let k = NameFact::concat(&NameFact::Known("quiz".into()), &NameFact::Known("1".into()));
        assert_eq!(k, NameFact::Known("quiz1".into()));
        let m = NameFact::concat(
            &NameFact::Known("quiz".into()),
            &NameFact::MemberOf(vec!["1".into(), "2".into()]),
        );
        assert_eq!(m, NameFact::MemberOf(vec!["quiz1".into(), "quiz2".into()]));
        assert_eq!(NameFact::concat(&m, &NameFact::Unknown), NameFact::Unknown);
    }

    #[test]
    fn joins() {
        let e = Ty::seq(Ty::Never);
        assert_eq!(Ty::join(&e, &Ty::seq(Ty::Num)), Ty::seq(Ty::Num));
        assert_eq!(Ty::join(&Ty::Num, &Ty::Bool), Ty::Unknown);
        assert_eq!(
            Ty::join(&Ty::Str(NameFact::Known("a".into())), &Ty::Str(NameFact::Known("b".into()))),
            Ty::Str(NameFact::MemberOf(vec!["a".into(), "b".into()]))
        );
    }

    #[test]
    fn open_tables_match_extra_columns_of_the_rest_sort() {
        let tt = TableType {
            columns: vec![column("name", Sort::String, false)],
            rest: Some(RestColumns {
                sort: Sort::Number,
                optional: None,
                names: None,
            }),
            nrows: None,
        };
        let ok = Schema::new(vec![column("name", Sort::String, false), column("q", Sort::Number, true)]).unwrap();
        let bad = Schema::new(vec![column("name", Sort::String, false), column("q", Sort::Boolean, true)]).unwrap();
        assert!(tt.matches(&ok));
        assert!(!tt.matches(&bad));
    }
}
