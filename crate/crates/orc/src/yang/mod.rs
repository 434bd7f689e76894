//! YANG subset parser, UCI annotation checking and the JIN model format.
//!
//! Annotated YANG modules are converted offline by `yang2jin` into JSON
//! documents that are cheap to load per request.

pub mod check;
pub mod jin;
pub mod parse;
pub mod types;

pub use check::{check_annotations, Diagnostic};
pub use jin::{load_jin, runtime_model, yang_to_jin, JinFormatError, JinModule};
pub use parse::parse_yang;
pub use types::{resolve_type, BaseType, RangeSet, Restrictions, TypeSpec, TypeUse};

use thiserror::Error;

/// Name of the YANG module defining the five UCI mapping extensions. The
/// prefix bound by a module's import of it marks annotation statements.
pub const EXTENSION_MODULE: &str = "orc-uci";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Module,
    Container,
    List,
    Leaf,
    LeafList,
}

impl NodeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeKind::Module => "module",
            NodeKind::Container => "container",
            NodeKind::List => "list",
            NodeKind::Leaf => "leaf",
            NodeKind::LeafList => "leaf-list",
        }
    }

    pub fn is_leafish(&self) -> bool {
        matches!(self, NodeKind::Leaf | NodeKind::LeafList)
    }
}

/// The five UCI mapping annotations attached to a schema node.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UciAnnotations {
    pub package: Option<String>,
    pub section: Option<String>,
    pub section_name: Option<String>,
    pub option: Option<String>,
    pub leaf_as_name: Option<String>,
}

impl UciAnnotations {
    pub fn is_empty(&self) -> bool {
        self.package.is_none()
            && self.section.is_none()
            && self.section_name.is_none()
            && self.option.is_none()
            && self.leaf_as_name.is_none()
    }
}

/// One node of the schema tree, both as parsed from YANG and as loaded
/// from JIN.
#[derive(Debug, Clone, PartialEq)]
pub struct JinNode {
    pub kind: NodeKind,
    pub name: String,
    pub uci: UciAnnotations,
    pub children: Vec<JinNode>,
    pub type_use: Option<TypeUse>,
    pub keys: Vec<String>,
    pub unique: Vec<Vec<String>>,
    pub mandatory: bool,
    pub line: usize,
}

impl JinNode {
    pub fn new(kind: NodeKind, name: impl Into<String>, line: usize) -> Self {
        JinNode {
            kind,
            name: name.into(),
            uci: UciAnnotations::default(),
            children: Vec::new(),
            type_use: None,
            keys: Vec::new(),
            unique: Vec::new(),
            mandatory: false,
            line,
        }
    }

    pub fn child(&self, name: &str) -> Option<&JinNode> {
        self.children.iter().find(|c| c.name == name)
    }

    /// Option name a leaf maps to: the annotation or, absent one, the node
    /// name itself.
    pub fn option_name(&self) -> &str {
        self.uci.option.as_deref().unwrap_or(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    pub module: String,
    pub prefix: String,
}

/// A parsed YANG source module, prior to JIN conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct YangModule {
    pub name: String,
    pub namespace: String,
    pub prefix: String,
    pub imports: Vec<Import>,
    pub typedefs: Vec<(String, TypeUse)>,
    pub body: JinNode,
}

impl YangModule {
    /// Prefix bound to the UCI extension module, if imported.
    pub fn extension_prefix(&self) -> Option<&str> {
        self.imports
            .iter()
            .find(|i| i.module == EXTENSION_MODULE)
            .map(|i| i.prefix.as_str())
    }
}

#[derive(Debug, Error)]
pub enum YangError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: unsupported statement '{name}'")]
    UnsupportedStatement { name: String, line: usize },
    #[error("line {line}: unknown type '{name}'")]
    UnknownType { name: String, line: usize },
    #[error("module has outstanding annotation diagnostics")]
    Annotation(Vec<Diagnostic>),
}

impl YangError {
    pub(crate) fn syntax(line: usize, reason: impl Into<String>) -> Self {
        YangError::Syntax {
            line,
            reason: reason.into(),
        }
    }
}
