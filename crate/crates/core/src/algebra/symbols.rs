use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered list of symbol names shared by every expression of a session.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolTable {
    names: Vec<String>,
}

impl SymbolTable {
    pub fn new<I, S>(names: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || names[..i].contains(n) {
                return Err(Error::Structural(format!(
                    "invalid or duplicate symbol `{n}`"
                )));
            }
        }
        Ok(Arc::new(SymbolTable { names }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    /// New table with `extra` inserted right before `before` (or appended).
    pub fn insert_before(&self, before: Option<&str>, extra: &[String]) -> Result<Arc<Self>> {
        let at = match before {
            Some(b) => self.require(b)?,
            None => self.names.len(),
        };
        let mut names = self.names[..at].to_vec();
        names.extend(extra.iter().cloned());
        names.extend(self.names[at..].iter().cloned());
        SymbolTable::new(names)
    }

    pub(crate) fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || a.names == b.names
    }

    pub(crate) fn describe(&self) -> String {
        self.names.join(",")
    }
}
