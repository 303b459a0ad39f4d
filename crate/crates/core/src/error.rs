use std::fmt;

use crate::lang::Span;
use crate::model::Sort;

/// What went wrong. Each variant corresponds to one requires clause, one
/// data-model invariant, or one runtime failure of the language.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ErrorKind {
    #[error("column {name:?} appears more than once")]
    DuplicateColumn { name: String },
    #[error("row {row} has {actual} cells but the schema has {expected} columns")]
    RaggedRow { row: usize, expected: usize, actual: usize },
    #[error("cell (column {column}, row {row}) should hold a {expected} but holds {actual}")]
    CellSortMismatch {
        column: usize,
        row: usize,
        expected: Sort,
        actual: String,
    },
    #[error("column {column:?} has sort {actual} but {expected} is required")]
    ColumnSortMismatch {
        column: String,
        expected: String,
        actual: String,
    },
    #[error("{what}: expected {expected} but found {actual}")]
    ValueSortMismatch {
        what: String,
        expected: String,
        actual: String,
    },
    #[error("cell (column {column}, row {row}) is empty but the column is not optional")]
    IllegalMissing { column: usize, row: usize },
    #[error("row index {index} is out of bounds for a table with {nrows} rows")]
    RowIndexOutOfBounds { index: i64, nrows: usize },
    #[error("index {index} is out of bounds for a sequence of length {len}")]
    SeqIndexOutOfBounds { index: i64, len: usize },
    #[error("column {name:?} is not in the header {header:?}")]
    UnknownColumn { name: String, header: Vec<String> },
    #[error("column names must not be empty")]
    EmptyName,
    #[error("the separator must not be empty")]
    EmptySeparator,
    #[error("expected {expected} elements but got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("{value} is not a whole number")]
    NonIntegralIndex { value: f64 },
    #[error("cannot take {n} rows from a table with {nrows} rows")]
    HeadOutOfRange { n: f64, nrows: usize },
    #[error("column {column:?} has sort {sort}, which has no natural order")]
    UnsortableSort { column: String, sort: Sort },
    #[error("cell in column {column:?} at row {row} is empty")]
    MissingCell { column: String, row: usize },
    #[error("an empty value was used where a value is required")]
    MissingValue,
    #[error("the comparator reports both a < b and b < a")]
    InvalidComparator,
    #[error("schemas differ: {left} vs {right}")]
    SchemaMismatch { left: String, right: String },
    #[error("key {key} occurs more than once in the right table")]
    DuplicateRightKey { key: String },
    #[error("column name {name:?} clashes with an existing column")]
    NameClash { name: String },
    #[error("more than one row for key {key} and name {name:?}")]
    DuplicateCombination { key: String, name: String },
    #[error("the names column {column:?} has an empty cell at row {row}")]
    MissingName { column: String, row: usize },
    #[error("cannot sample {n} rows from a table with {nrows} rows")]
    SampleTooLarge { n: f64, nrows: usize },
    #[error("seed {seed} is outside [1, 2147483646]")]
    InvalidSeed { seed: f64 },
    #[error("the input must not be empty")]
    EmptyInput,
    #[error("the sequence of sort specifications must not be empty")]
    EmptySortSpec,
    #[error("division by zero")]
    DivisionByZero,
    #[error("the name {name:?} is not bound")]
    UnboundVariable { name: String },
    #[error("expected {expected} arguments but got {actual}")]
    ArityMismatch { expected: String, actual: usize },
    #[error("this value cannot be called")]
    NotCallable,
    #[error("function calls nest deeper than {limit}")]
    CallDepth { limit: usize },
    #[error("postcondition failed: {clause}")]
    EnsureViolation { clause: String },
    #[error("the result schema {actual} disagrees with the checked type {expected}")]
    PredictionMismatch { expected: String, actual: String },
}

impl ErrorKind {
    /// Stable name of the variant, used as the sub-category of contract
    /// violations.
    pub fn name(&self) -> &'static str {
        match self {
            ErrorKind::DuplicateColumn { .. } => "DuplicateColumn",
            ErrorKind::RaggedRow { .. } => "RaggedRow",
            ErrorKind::CellSortMismatch { .. }
            | ErrorKind::ColumnSortMismatch { .. }
            | ErrorKind::ValueSortMismatch { .. } => "SortMismatch",
            ErrorKind::IllegalMissing { .. } => "IllegalMissing",
            ErrorKind::RowIndexOutOfBounds { .. } | ErrorKind::SeqIndexOutOfBounds { .. } => {
                "RowIndexOutOfBounds"
            }
            ErrorKind::UnknownColumn { .. } => "UnknownColumn",
            ErrorKind::EmptyName => "EmptyName",
            ErrorKind::EmptySeparator => "EmptySeparator",
            ErrorKind::LengthMismatch { .. } => "LengthMismatch",
            ErrorKind::NonIntegralIndex { .. } => "NonIntegralIndex",
            ErrorKind::HeadOutOfRange { .. } => "HeadOutOfRange",
            ErrorKind::UnsortableSort { .. } => "UnsortableSort",
            ErrorKind::MissingCell { .. } => "MissingCell",
            ErrorKind::MissingValue => "MissingCell",
            ErrorKind::InvalidComparator => "InvalidComparator",
            ErrorKind::SchemaMismatch { .. } => "SchemaMismatch",
            ErrorKind::DuplicateRightKey { .. } => "DuplicateRightKey",
            ErrorKind::NameClash { .. } => "NameClash",
            ErrorKind::DuplicateCombination { .. } => "DuplicateCombination",
            ErrorKind::MissingName { .. } => "MissingName",
            ErrorKind::SampleTooLarge { .. } => "SampleTooLarge",
            ErrorKind::InvalidSeed { .. } => "InvalidSeed",
            ErrorKind::EmptyInput => "EmptyInput",
            ErrorKind::EmptySortSpec => "EmptySortSpec",
            ErrorKind::DivisionByZero => "DivisionByZero",
            ErrorKind::UnboundVariable { .. } => "UnboundVariable",
            ErrorKind::ArityMismatch { .. } => "ArityMismatch",
            ErrorKind::NotCallable => "NotCallable",
            ErrorKind::CallDepth { .. } => "Recursion",
            ErrorKind::EnsureViolation { .. } => "EnsureViolation",
            ErrorKind::PredictionMismatch { .. } => "EnsureViolation",
        }
    }
}

/// The error term of a fallible operation.
///
/// `operation` is set when the failure is a violated precondition (or, in
/// ensure-mode, postcondition) of a named operation; it is `None` for
/// plain data-model validation failures.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchError {
    pub kind: ErrorKind,
    pub operation: Option<String>,
    pub span: Option<Span>,
    pub trace: Vec<String>,
}

/// Result of every fallible operation.
pub type Outcome<T> = Result<T, BenchError>;

impl BenchError {
    pub fn new(kind: ErrorKind) -> Self {
        BenchError {
            kind,
            operation: None,
            span: None,
            trace: Vec::new(),
        }
    }

    pub fn contract(operation: &str, kind: ErrorKind) -> Self {
        BenchError {
            operation: Some(operation.to_string()),
            ..BenchError::new(kind)
        }
    }

    pub fn with_span(mut self, span: Span) -> Self {
        if self.span.is_none() {
            self.span = Some(span);
        }
        self
    }

    pub fn in_operation(mut self, operation: &str) -> Self {
        if self.operation.is_none() {
            self.operation = Some(operation.to_string());
        }
        self
    }

    pub fn is_contract_violation(&self) -> bool {
        self.operation.is_some()
    }
}

impl From<ErrorKind> for BenchError {
    fn from(kind: ErrorKind) -> Self {
        BenchError::new(kind)
    }
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.operation {
            Some(op) => write!(f, "{op}: {}", self.kind)?,
            None => write!(f, "{}", self.kind)?,
        }
        if let Some(span) = &self.span {
            write!(f, " (at {span})")?;
        }
        for frame in &self.trace {
            write!(f, "\n  in {frame}")?;
        }
        Ok(())
    }
}

impl std::error::Error for BenchError {}
