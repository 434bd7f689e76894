//! UCI configuration files: parsing, serialization and the on-disk store.
//!
//! A UCI package is one file of typed, optionally named sections holding
//! `option` and `list` entries. Nesting is not part of the format.

mod store;
mod text;

pub use store::{ApplyMode, CommitReport, ReadValue, UciStore, WriteLock};
pub use text::{parse_uci, serialize_uci};

use std::fmt;

use thiserror::Error;

/// Parsed in-memory form of one UCI package file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UciDocument {
    pub package_name: String,
    pub sections: Vec<UciSection>,
}

impl UciDocument {
    pub fn new(package_name: impl Into<String>) -> Self {
        UciDocument {
            package_name: package_name.into(),
            sections: Vec::new(),
        }
    }

    /// Sections of a given type, in file order.
    pub fn sections_of_type<'a>(
        &'a self,
        section_type: &'a str,
    ) -> impl Iterator<Item = &'a UciSection> {
        self.sections
            .iter()
            .filter(move |s| s.section_type == section_type)
    }

    pub fn find_named(&self, section_type: &str, name: &str) -> Option<&UciSection> {
        self.sections
            .iter()
            .find(|s| s.section_type == section_type && s.name.as_deref() == Some(name))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UciSection {
    pub section_type: String,
    /// `None` for an anonymous section; it is then addressed by its
    /// zero-based index among sections of the same type.
    pub name: Option<String>,
    pub entries: Vec<UciEntry>,
}

impl UciSection {
    pub fn new(section_type: impl Into<String>, name: Option<String>) -> Self {
        UciSection {
            section_type: section_type.into(),
            name,
            entries: Vec::new(),
        }
    }

    pub fn option_value(&self, name: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.kind == EntryKind::Option && e.name == name)
            .map(|e| e.value.as_str())
    }

    pub fn list_values<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a str> {
        self.entries
            .iter()
            .filter(move |e| e.kind == EntryKind::List && e.name == name)
            .map(|e| e.value.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Option,
    List,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UciEntry {
    pub kind: EntryKind,
    pub name: String,
    pub value: String,
}

/// Resolved address into the UCI store.
///
/// A section is addressed either by name or by index; a path carrying
/// neither addresses the section type as a whole (counting, whole-type
/// deletes) or, on entry writes, the unique section of that type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UciPath {
    pub package: String,
    pub section_type: String,
    pub section_name: Option<String>,
    pub index: Option<usize>,
    pub option: Option<String>,
}

impl UciPath {
    pub fn section(package: impl Into<String>, section_type: impl Into<String>) -> Self {
        UciPath {
            package: package.into(),
            section_type: section_type.into(),
            section_name: None,
            index: None,
            option: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.section_name = Some(name.into());
        self
    }

    pub fn at_index(mut self, index: usize) -> Self {
        self.index = Some(index);
        self
    }

    pub fn with_option(mut self, option: impl Into<String>) -> Self {
        self.option = Some(option.into());
        self
    }
}

impl fmt::Display for UciPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.", self.package)?;
        if let Some(name) = &self.section_name {
            write!(f, "{name}")?;
        } else if let Some(i) = self.index {
            write!(f, "@{}[{}]", self.section_type, i)?;
        } else {
            write!(f, "@{}", self.section_type)?;
        }
        if let Some(opt) = &self.option {
            write!(f, ".{opt}")?;
        }
        Ok(())
    }
}

/// Kind of a flattened entry produced by JSON flattening.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatKind {
    Option,
    List,
    Container,
}

impl fmt::Display for FlatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlatKind::Option => "option",
            FlatKind::List => "list",
            FlatKind::Container => "container",
        })
    }
}

/// One (UCI path, kind, value) triple produced by flattening a JSON body.
///
/// `label` is the dotted display path accumulated along the schema
/// traversal, e.g. `example.device.@interfaces[0].name`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlattenedEntry {
    pub path: UciPath,
    pub kind: FlatKind,
    pub value: Option<String>,
    pub label: String,
}

impl fmt::Display for FlattenedEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\", {}", self.label, self.kind)?;
        if let Some(v) = &self.value {
            write!(f, ", \"{v}\"")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum UciError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("store i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("path does not resolve a unique section: {0}")]
    AmbiguousPath(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("already exists: {0}")]
    Conflict(String),
    #[error("could not acquire writer lock within {0:?}")]
    LockTimeout(std::time::Duration),
    #[error("unsupported value for {0}: {1}")]
    UnsupportedValue(String, String),
}

impl UciError {
    fn syntax(line: usize, reason: impl Into<String>) -> Self {
        UciError::Syntax {
            line,
            reason: reason.into(),
        }
    }
}

/// Identifiers for package, section and option names.
pub fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Section type names additionally allow '-'.
pub fn is_type_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

/// Values the store is willing to write: non-empty, no single quotes (the
/// format defines no escaping), no control characters.
pub fn is_writable_value(s: &str) -> bool {
    !s.is_empty() && !s.contains('\'') && !s.chars().any(|c| c.is_control())
}
