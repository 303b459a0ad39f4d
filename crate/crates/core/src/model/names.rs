use std::fmt;
use std::sync::Arc;

use crate::error::{BenchError, ErrorKind, Outcome};

/// A first-class column name. Equality is exact and case-sensitive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColName(Arc<str>);

impl ColName {
    pub fn new(text: impl AsRef<str>) -> Outcome<ColName> {
        let text = text.as_ref();
        if text.is_empty() {
            return Err(BenchError::new(ErrorKind::EmptyName));
        }
        Ok(ColName(Arc::from(text)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ColName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for ColName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl PartialEq<str> for ColName {
    fn eq(&self, other: &str) -> bool {
        &*self.0 == other
    }
}

impl PartialEq<&str> for ColName {
    fn eq(&self, other: &&str) -> bool {
        &*self.0 == *other
    }
}

/// Concatenates two names (or strings) into a new column name.
pub fn name_append(a: &str, b: &str) -> Outcome<ColName> {
    ColName::new(format!("{a}{b}")).map_err(|e| e.in_operation("nameAppend"))
}

/// Splits a name on every occurrence of `sep`.
pub fn name_split(name: &str, sep: &str) -> Outcome<Vec<String>> {
    if sep.is_empty() {
        return Err(BenchError::contract("nameSplit", ErrorKind::EmptySeparator));
    }
    Ok(name.split(sep).map(str::to_string).collect())
}

pub fn name_prefix(name: &str, prefix: &str) -> bool {
    name.starts_with(prefix)
}
