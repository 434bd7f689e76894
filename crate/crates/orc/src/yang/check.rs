//! Annotation rule checking for parsed or loaded schema trees.

use std::fmt;

use super::{JinNode, NodeKind, YangModule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.line, self.code, self.message)
    }
}

pub const MISSING_PACKAGE: &str = "missing-package";
pub const MISSING_SECTION: &str = "missing-section";
pub const OPTION_ON_NON_LEAF: &str = "option-on-non-leaf";
pub const LIST_MISSING_SECTION: &str = "list-missing-section";
pub const LIST_WITH_SECTION_NAME: &str = "list-with-section-name";
pub const NESTED_IN_LIST: &str = "nested-in-list";
pub const UNKNOWN_KEY_LEAF: &str = "unknown-key-leaf";
pub const LEAF_AS_NAME_MISPLACED: &str = "leaf-as-name-misplaced";

/// Check the five annotation rules plus the nested-in-list limitation.
/// Returns an empty list when the module maps cleanly onto UCI.
pub fn check_annotations(module: &YangModule) -> Vec<Diagnostic> {
    check_node_annotations(&module.body)
}

/// Same check over a bare schema tree (used when re-validating loaded JIN).
pub fn check_node_annotations(body: &JinNode) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    walk(
        body,
        body.uci.package.is_some(),
        body.uci.section.is_some(),
        &mut diags,
    );
    diags
}

fn walk(node: &JinNode, has_package: bool, has_section: bool, diags: &mut Vec<Diagnostic>) {
    let line = node.line;
    macro_rules! push {
        ($code:expr, $msg:expr $(,)?) => {
            diags.push(Diagnostic { line, code: $code, message: $msg })
        };
    }

    if node.uci.option.is_some() && !node.kind.is_leafish() {
        push!(
            OPTION_ON_NON_LEAF,
            format!(
                "'option' annotates leafs and leaf-lists only, found on {} '{}'",
                node.kind.as_str(),
                node.name
            ),
        );
    }
    if node.uci.leaf_as_name.is_some() && node.kind != NodeKind::List {
        push!(
            LEAF_AS_NAME_MISPLACED,
            format!(
                "'leaf-as-name' is only meaningful on a list, found on {} '{}'",
                node.kind.as_str(),
                node.name
            ),
        );
    }

    match node.kind {
        NodeKind::List => {
            if node.uci.section.is_none() {
                push!(
                    LIST_MISSING_SECTION,
                    format!("list '{}' must define a 'section'", node.name),
                );
            }
            if node.uci.section_name.is_some() {
                push!(
                    LIST_WITH_SECTION_NAME,
                    format!("list '{}' must not define a 'section-name'", node.name),
                );
            }
            for child in &node.children {
                if matches!(child.kind, NodeKind::Container | NodeKind::List) {
                    diags.push(Diagnostic {
                        line: child.line,
                        code: NESTED_IN_LIST,
                        message: format!(
                            "{} '{}' nested inside list '{}' cannot be mapped to flat UCI sections",
                            child.kind.as_str(),
                            child.name,
                            node.name
                        ),
                    });
                }
            }
            if let Some(leaf) = &node.uci.leaf_as_name {
                if !node
                    .children
                    .iter()
                    .any(|c| c.kind.is_leafish() && c.name == *leaf)
                {
                    push!(
                        UNKNOWN_KEY_LEAF,
                        format!("leaf-as-name '{}' is not a leaf of list '{}'", leaf, node.name),
                    );
                }
            }
            for key in &node.keys {
                if !node
                    .children
                    .iter()
                    .any(|c| c.kind == NodeKind::Leaf && c.name == *key)
                {
                    diags.push(Diagnostic {
                        line: node.line,
                        code: UNKNOWN_KEY_LEAF,
                        message: format!("key '{}' is not a leaf of list '{}'", key, node.name),
                    });
                }
            }
            for group in &node.unique {
                for leaf in group {
                    if !node
                        .children
                        .iter()
                        .any(|c| c.kind == NodeKind::Leaf && c.name == *leaf)
                    {
                        diags.push(Diagnostic {
                            line: node.line,
                            code: UNKNOWN_KEY_LEAF,
                            message: format!(
                                "unique leaf '{}' is not a leaf of list '{}'",
                                leaf, node.name
                            ),
                        });
                    }
                }
            }
        }
        NodeKind::Leaf | NodeKind::LeafList => {
            if !has_package {
                push!(
                    MISSING_PACKAGE,
                    format!("no 'package' in scope for leaf '{}'", node.name),
                );
            }
            if !has_section {
                push!(
                    MISSING_SECTION,
                    format!("no 'section' in scope for leaf '{}'", node.name),
                );
            }
        }
        NodeKind::Module | NodeKind::Container => {}
    }

    for child in &node.children {
        let child_package = has_package || child.uci.package.is_some();
        let child_section = has_section || child.uci.section.is_some();
        walk(child, child_package, child_section, diags);
    }
}
