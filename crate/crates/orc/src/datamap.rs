//! The mapping core: URI resolution with annotation accumulation, UCI to
//! JSON rendering for reads, JSON flattening into UCI entries for writes,
//! and delete target resolution.

use serde_json::{Map, Value};
use thiserror::Error;

use crate::uci::{
    FlatKind, FlattenedEntry, ReadValue, UciError, UciPath, UciStore,
};
use crate::yang::types::resolve_type;
use crate::yang::{BaseType, JinModule, JinNode, NodeKind, TypeSpec};

#[derive(Debug, Error)]
pub enum DatamapError {
    #[error("unknown module '{0}'")]
    UnknownModule(String),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("no list entry with key '{0}'")]
    UnknownListEntry(String),
    #[error("list '{0}' must be addressed with a key selector")]
    MissingKey(String),
    #[error("selector not allowed on '{0}'")]
    BadSelector(String),
    #[error("body root mismatch: {0}")]
    RootMismatch(String),
    #[error("expected a JSON object at {0}")]
    NotAnObject(String),
    #[error("expected a JSON array at {0}")]
    NotAnArray(String),
    #[error("incomplete UCI path at '{0}': no {1} in scope")]
    IncompletePath(String, &'static str),
    #[error(transparent)]
    Store(#[from] UciError),
    #[error("type error at '{0}': {1}")]
    Type(String, String),
}

/// Write mode, decided by the HTTP method at the protocol layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Create,
    Replace,
    Append,
}

/// The set of loaded JIN modules.
#[derive(Debug, Clone, Default)]
pub struct ModelSet {
    modules: Vec<JinModule>,
}

impl ModelSet {
    pub fn new(modules: Vec<JinModule>) -> Self {
        ModelSet { modules }
    }

    pub fn module(&self, name: &str) -> Option<&JinModule> {
        self.modules.iter().find(|m| m.name == name)
    }

    pub fn modules(&self) -> &[JinModule] {
        &self.modules
    }
}

/// One URI segment under the data root: a node name with an optional
/// `=key` selector (split before percent-decoding).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub name: String,
    pub key: Option<String>,
}

impl Segment {
    pub fn plain(name: impl Into<String>) -> Self {
        Segment {
            name: name.into(),
            key: None,
        }
    }

    pub fn keyed(name: impl Into<String>, key: impl Into<String>) -> Self {
        Segment {
            name: name.into(),
            key: Some(key.into()),
        }
    }
}

/// UCI addressing state accumulated while walking the schema tree.
///
/// `section_name` of `Some("")` marks an explicitly anonymous section
/// (rule 3); `None` means no name annotation applies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathContext {
    pub package: Option<String>,
    pub section: Option<String>,
    pub section_name: Option<String>,
    pub index: Option<usize>,
}

impl PathContext {
    /// Fold a node's annotations into the context (rule 1 overriding).
    pub fn apply(&mut self, node: &JinNode) {
        if let Some(p) = &node.uci.package {
            self.package = Some(p.clone());
        }
        if let Some(s) = &node.uci.section {
            self.section = Some(s.clone());
            self.section_name = None;
            self.index = None;
        }
        if let Some(n) = &node.uci.section_name {
            self.section_name = Some(n.clone());
        }
    }

    /// The UCI path of the section this context addresses.
    pub fn section_path(&self, at: &str) -> Result<UciPath, DatamapError> {
        let package = self
            .package
            .clone()
            .ok_or_else(|| DatamapError::IncompletePath(at.to_string(), "package"))?;
        let section = self
            .section
            .clone()
            .ok_or_else(|| DatamapError::IncompletePath(at.to_string(), "section"))?;
        let mut path = UciPath::section(package, section);
        if let Some(i) = self.index {
            path = path.at_index(i);
        } else if let Some(name) = &self.section_name {
            if !name.is_empty() {
                path = path.named(name.clone());
            }
        }
        Ok(path)
    }
}

/// Result of resolving a URI against the model set.
#[derive(Debug, Clone)]
pub struct ResolvedTarget<'a> {
    pub module: &'a JinModule,
    pub node: &'a JinNode,
    pub ctx: PathContext,
    /// Set when the final segment addressed a specific list instance.
    pub list_index: Option<usize>,
    /// Display segments from the top node down, `@name[i]` for keyed
    /// list entries.
    pub trail: Vec<String>,
}

#[derive(Debug, Clone)]
pub enum Located<'a> {
    /// The datastore root itself.
    Root,
    Node(ResolvedTarget<'a>),
}

/// Traverse the model along decoded URI segments, accumulating UCI
/// annotations; `name=value` selectors resolve to a section index by
/// scanning the key leaf of existing sections.
pub fn locate<'a>(
    models: &'a ModelSet,
    store: &UciStore,
    segments: &[Segment],
) -> Result<Located<'a>, DatamapError> {
    let Some(first) = segments.first() else {
        return Ok(Located::Root);
    };
    let (module_name, top_name) = first
        .name
        .split_once(':')
        .ok_or_else(|| DatamapError::UnknownNode(first.name.clone()))?;
    let module = models
        .module(module_name)
        .ok_or_else(|| DatamapError::UnknownModule(module_name.to_string()))?;

    let mut ctx = PathContext::default();
    ctx.apply(&module.body);
    let mut node = module
        .body
        .child(top_name)
        .ok_or_else(|| DatamapError::UnknownNode(first.name.clone()))?;
    let mut trail = Vec::new();
    let mut list_index = None;
    descend(store, &mut ctx, node, first, &mut trail, &mut list_index)?;

    for (i, segment) in segments.iter().enumerate().skip(1) {
        if node.kind == NodeKind::List && list_index.is_none() {
            return Err(DatamapError::MissingKey(node.name.clone()));
        }
        if node.kind.is_leafish() {
            return Err(DatamapError::UnknownNode(segment.name.clone()));
        }
        node = node
            .child(&segment.name)
            .ok_or_else(|| DatamapError::UnknownNode(segment.name.clone()))?;
        descend(store, &mut ctx, node, segment, &mut trail, &mut list_index)?;
        let _ = i;
    }
    Ok(Located::Node(ResolvedTarget {
        module,
        node,
        ctx,
        list_index,
        trail,
    }))
}

fn descend(
    store: &UciStore,
    ctx: &mut PathContext,
    node: &JinNode,
    segment: &Segment,
    trail: &mut Vec<String>,
    list_index: &mut Option<usize>,
) -> Result<(), DatamapError> {
    ctx.apply(node);
    *list_index = None;
    match (&segment.key, node.kind) {
        (Some(key), NodeKind::List) => {
            let index = find_list_entry(store, ctx, node, key)?;
            ctx.index = Some(index);
            ctx.section_name = None;
            *list_index = Some(index);
            trail.push(format!("@{}[{}]", node.name, index));
        }
        (Some(_), _) => return Err(DatamapError::BadSelector(node.name.clone())),
        (None, _) => trail.push(node.name.clone()),
    }
    Ok(())
}

/// Scan the sections of a list's type, comparing the declared key leaves
/// against the selector value (comma-separated for multi-key lists).
fn find_list_entry(
    store: &UciStore,
    ctx: &PathContext,
    list: &JinNode,
    key: &str,
) -> Result<usize, DatamapError> {
    if list.keys.is_empty() {
        return Err(DatamapError::UnknownListEntry(key.to_string()));
    }
    let values: Vec<&str> = key.split(',').collect();
    if values.len() != list.keys.len() {
        return Err(DatamapError::UnknownListEntry(key.to_string()));
    }
    let section_path = ctx.section_path(&list.name)?;
    let count = store.count_sections(&section_path.package, &section_path.section_type)?;
    'outer: for index in 0..count {
        for (key_leaf, expected) in list.keys.iter().zip(&values) {
            let Some(leaf) = list.child(key_leaf) else {
                continue 'outer;
            };
            let path = UciPath::section(
                section_path.package.clone(),
                section_path.section_type.clone(),
            )
            .at_index(index)
            .with_option(leaf.option_name());
            match store.read_value(&path)? {
                ReadValue::Single(v) if v == *expected => {}
                _ => continue 'outer,
            }
        }
        return Ok(index);
    }
    Err(DatamapError::UnknownListEntry(key.to_string()))
}

// ---------------------------------------------------------------------------
// UCI -> JSON (reads)

/// Render the target's data from the store. `None` means the resource has
/// no data at all (used to omit absent children).
pub fn uci_to_json(
    target: &ResolvedTarget,
    store: &UciStore,
) -> Result<Option<Value>, DatamapError> {
    render(target.module, target.node, &target.ctx, store)
}

fn render(
    module: &JinModule,
    node: &JinNode,
    ctx: &PathContext,
    store: &UciStore,
) -> Result<Option<Value>, DatamapError> {
    match node.kind {
        NodeKind::Leaf => {
            let path = ctx.section_path(&node.name)?.with_option(node.option_name());
            match store.read_value(&path)? {
                ReadValue::Single(v) => Ok(Some(decode_leaf(module, node, &v)?)),
                ReadValue::Many(vs) => {
                    // tolerate list-typed storage under a leaf schema
                    match vs.into_iter().next() {
                        Some(v) => Ok(Some(decode_leaf(module, node, &v)?)),
                        None => Ok(None),
                    }
                }
                ReadValue::Absent => Ok(None),
            }
        }
        NodeKind::LeafList => {
            let path = ctx.section_path(&node.name)?.with_option(node.option_name());
            match store.read_value(&path)? {
                ReadValue::Many(vs) => {
                    let mut out = Vec::new();
                    for v in vs {
                        out.push(decode_leaf(module, node, &v)?);
                    }
                    Ok(Some(Value::Array(out)))
                }
                ReadValue::Single(v) => {
                    Ok(Some(Value::Array(vec![decode_leaf(module, node, &v)?])))
                }
                ReadValue::Absent => Ok(None),
            }
        }
        NodeKind::Module | NodeKind::Container => {
            let mut ctx = ctx.clone();
            if node.kind == NodeKind::Module {
                ctx.apply(node);
            }
            let mut obj = Map::new();
            for child in &node.children {
                let mut child_ctx = ctx.clone();
                child_ctx.apply(child);
                if let Some(v) = render(module, child, &child_ctx, store)? {
                    if !is_empty_composite(child, &v) {
                        obj.insert(child.name.clone(), v);
                    }
                }
            }
            Ok(Some(Value::Object(obj)))
        }
        NodeKind::List => {
            let section_path = ctx.section_path(&node.name)?;
            if let Some(index) = ctx.index {
                return Ok(Some(render_list_entry(module, node, ctx, index, store)?));
            }
            let count =
                store.count_sections(&section_path.package, &section_path.section_type)?;
            let mut items = Vec::new();
            for index in 0..count {
                items.push(render_list_entry(module, node, ctx, index, store)?);
            }
            Ok(Some(Value::Array(items)))
        }
    }
}

fn render_list_entry(
    module: &JinModule,
    list: &JinNode,
    ctx: &PathContext,
    index: usize,
    store: &UciStore,
) -> Result<Value, DatamapError> {
    let mut obj = Map::new();
    for child in &list.children {
        let mut child_ctx = ctx.clone();
        child_ctx.index = Some(index);
        child_ctx.section_name = None;
        child_ctx.apply(child);
        child_ctx.index = Some(index);
        if let Some(v) = render(module, child, &child_ctx, store)? {
            obj.insert(child.name.clone(), v);
        }
    }
    Ok(Value::Object(obj))
}

/// Empty containers and empty lists render as absent when they appear as
/// children; only a directly targeted node reports its empty form.
fn is_empty_composite(node: &JinNode, value: &Value) -> bool {
    match node.kind {
        NodeKind::Container => value.as_object().is_some_and(|o| o.is_empty()),
        NodeKind::List => value.as_array().is_some_and(|a| a.is_empty()),
        _ => false,
    }
}

fn decode_leaf(module: &JinModule, node: &JinNode, raw: &str) -> Result<Value, DatamapError> {
    let spec = leaf_spec(module, node)?;
    Ok(decode_value(&spec, raw))
}

pub(crate) fn leaf_spec(module: &JinModule, node: &JinNode) -> Result<TypeSpec, DatamapError> {
    let type_use = node
        .type_use
        .as_ref()
        .ok_or_else(|| DatamapError::Type(node.name.clone(), "missing type".into()))?;
    resolve_type(&module.typedefs, type_use)
        .map_err(|e| DatamapError::Type(node.name.clone(), e.to_string()))
}

/// Decode a stored UCI value per the leaf's base type. Reads are not
/// validated; values that do not parse fall back to strings.
fn decode_value(spec: &TypeSpec, raw: &str) -> Value {
    match spec.base {
        BaseType::Boolean => match raw {
            "true" | "1" => Value::Bool(true),
            "false" | "0" => Value::Bool(false),
            _ => Value::String(raw.to_string()),
        },
        BaseType::Int8 | BaseType::Int16 | BaseType::Int32 => match raw.parse::<i64>() {
            Ok(v) => Value::Number(v.into()),
            Err(_) => Value::String(raw.to_string()),
        },
        BaseType::Uint8 | BaseType::Uint16 | BaseType::Uint32 => match raw.parse::<u64>() {
            Ok(v) => Value::Number(v.into()),
            Err(_) => Value::String(raw.to_string()),
        },
        // 64-bit and decimal64 values travel as JSON strings (RFC 7951)
        BaseType::Int64 | BaseType::Uint64 | BaseType::Decimal64 => {
            Value::String(raw.to_string())
        }
        BaseType::String | BaseType::Enumeration => Value::String(raw.to_string()),
    }
}

/// Encode a schema-valid JSON scalar into its UCI text form.
pub fn encode_value(value: &Value) -> Option<String> {
    match value {
        Value::Bool(b) => Some(if *b { "true".into() } else { "false".into() }),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// JSON -> flattened entries (writes)

/// The body's root key resolved against the located target: either the
/// target node itself or one of its children.
#[derive(Debug, Clone)]
pub struct BodyRoot<'a> {
    pub module: &'a JinModule,
    pub node: &'a JinNode,
    pub ctx: PathContext,
    /// Fixed section index when the target addressed one list instance.
    pub entry_index: Option<usize>,
    /// Display path of the node, excluding the package.
    pub trail: Vec<String>,
    /// The body's root key as the client wrote it.
    pub root_key: String,
    pub inner: &'a Value,
}

pub fn resolve_body_root<'a>(
    models: &'a ModelSet,
    located: &Located<'a>,
    body: &'a Value,
) -> Result<BodyRoot<'a>, DatamapError> {
    let obj = body
        .as_object()
        .ok_or_else(|| DatamapError::NotAnObject("/".into()))?;
    if obj.len() != 1 {
        return Err(DatamapError::RootMismatch(
            "the body must contain exactly one root key".into(),
        ));
    }
    let (root_key, inner) = obj.iter().next().unwrap();

    match located {
        Located::Root => {
            let (module_name, top_name) = root_key.split_once(':').ok_or_else(|| {
                DatamapError::RootMismatch(format!(
                    "root key '{root_key}' must be module-qualified"
                ))
            })?;
            let module = models
                .module(module_name)
                .ok_or_else(|| DatamapError::UnknownModule(module_name.to_string()))?;
            let node = module
                .body
                .child(top_name)
                .ok_or_else(|| DatamapError::UnknownNode(root_key.clone()))?;
            let mut ctx = PathContext::default();
            ctx.apply(&module.body);
            ctx.apply(node);
            Ok(BodyRoot {
                module,
                node,
                ctx,
                entry_index: None,
                trail: vec![node.name.clone()],
                root_key: root_key.clone(),
                inner,
            })
        }
        Located::Node(target) => {
            let bare = root_key
                .strip_prefix(&format!("{}:", target.module.name))
                .unwrap_or(root_key);
            if bare == target.node.name {
                return Ok(BodyRoot {
                    module: target.module,
                    node: target.node,
                    ctx: target.ctx.clone(),
                    entry_index: target.list_index,
                    trail: target.trail.clone(),
                    root_key: root_key.clone(),
                    inner,
                });
            }
            if target.node.kind.is_leafish() || target.list_index.is_none() && target.node.kind == NodeKind::List {
                return Err(DatamapError::RootMismatch(format!(
                    "root key '{root_key}' does not match target '{}'",
                    target.node.name
                )));
            }
            let child = target.node.child(bare).ok_or_else(|| {
                DatamapError::RootMismatch(format!(
                    "root key '{root_key}' is not a child of '{}'",
                    target.node.name
                ))
            })?;
            let mut ctx = target.ctx.clone();
            ctx.apply(child);
            let mut trail = target.trail.clone();
            trail.push(child.name.clone());
            Ok(BodyRoot {
                module: target.module,
                node: child,
                ctx,
                entry_index: None,
                trail,
                root_key: root_key.clone(),
                inner,
            })
        }
    }
}

/// Flatten a schema-valid JSON body into the ordered list of UCI triples
/// (container entries precede their descendants, list items are indexed
/// from zero, or from the current section count in append mode).
pub fn json_to_entries(
    root: &BodyRoot,
    mode: Mode,
    store: &UciStore,
) -> Result<Vec<FlattenedEntry>, DatamapError> {
    let package = root
        .ctx
        .package
        .clone()
        .ok_or_else(|| DatamapError::IncompletePath(root.node.name.clone(), "package"))?;
    let mut label = package;
    for part in &root.trail {
        label.push('.');
        label.push_str(part);
    }
    let mut out = Vec::new();
    flatten(
        root.module,
        root.node,
        &root.ctx,
        &label,
        root.inner,
        mode,
        root.entry_index,
        store,
        &mut out,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn flatten(
    module: &JinModule,
    node: &JinNode,
    ctx: &PathContext,
    label: &str,
    value: &Value,
    mode: Mode,
    entry_index: Option<usize>,
    store: &UciStore,
    out: &mut Vec<FlattenedEntry>,
) -> Result<(), DatamapError> {
    match node.kind {
        NodeKind::Leaf => {
            let scalar = encode_value(value)
                .ok_or_else(|| DatamapError::NotAnObject(label.to_string()))?;
            out.push(FlattenedEntry {
                path: ctx.section_path(&node.name)?.with_option(node.option_name()),
                kind: FlatKind::Option,
                value: Some(scalar),
                label: label.to_string(),
            });
            Ok(())
        }
        NodeKind::LeafList => {
            let items = value
                .as_array()
                .ok_or_else(|| DatamapError::NotAnArray(label.to_string()))?;
            for item in items {
                let scalar = encode_value(item)
                    .ok_or_else(|| DatamapError::NotAnArray(label.to_string()))?;
                out.push(FlattenedEntry {
                    path: ctx.section_path(&node.name)?.with_option(node.option_name()),
                    kind: FlatKind::List,
                    value: Some(scalar),
                    label: label.to_string(),
                });
            }
            Ok(())
        }
        NodeKind::Module | NodeKind::Container => {
            let obj = value
                .as_object()
                .ok_or_else(|| DatamapError::NotAnObject(label.to_string()))?;
            // a container that declares its own section materializes it
            if node.kind == NodeKind::Container && node.uci.section.is_some() {
                out.push(FlattenedEntry {
                    path: ctx.section_path(&node.name)?,
                    kind: FlatKind::Container,
                    value: None,
                    label: label.to_string(),
                });
            }
            for (key, child_value) in obj {
                let Some(child) = node.child(key) else {
                    // unknown keys are rejected by validation beforehand
                    continue;
                };
                let mut child_ctx = ctx.clone();
                child_ctx.apply(child);
                if child.kind == NodeKind::List {
                    flatten_list(
                        module, child, &child_ctx, label, child_value, mode, None, store, out,
                    )?;
                } else {
                    let child_label = format!("{label}.{key}");
                    flatten(
                        module, child, &child_ctx, &child_label, child_value, mode, None,
                        store, out,
                    )?;
                }
            }
            Ok(())
        }
        NodeKind::List => flatten_list(module, node, ctx, label, value, mode, entry_index, store, out),
    }
}

#[allow(clippy::too_many_arguments)]
fn flatten_list(
    module: &JinModule,
    list: &JinNode,
    ctx: &PathContext,
    parent_label: &str,
    value: &Value,
    mode: Mode,
    entry_index: Option<usize>,
    store: &UciStore,
    out: &mut Vec<FlattenedEntry>,
) -> Result<(), DatamapError> {
    let items = value
        .as_array()
        .ok_or_else(|| DatamapError::NotAnArray(format!("{parent_label}.{}", list.name)))?;
    // strip a trailing ".@name[i]" the target trail may already carry
    let base_label = match parent_label.rfind(&format!(".@{}[", list.name)) {
        Some(pos) => &parent_label[..pos],
        None => parent_label,
    };
    let base_index = match (entry_index, mode) {
        (Some(fixed), _) => fixed,
        (None, Mode::Append) => {
            let section_path = ctx.section_path(&list.name)?;
            store.count_sections(&section_path.package, &section_path.section_type)?
        }
        (None, _) => 0,
    };
    for (offset, item) in items.iter().enumerate() {
        let index = base_index + offset;
        let item_obj = item.as_object().ok_or_else(|| {
            DatamapError::NotAnObject(format!("{base_label}.@{}[{index}]", list.name))
        })?;
        let item_label = format!("{base_label}.@{}[{index}]", list.name);
        let mut item_ctx = ctx.clone();
        item_ctx.section_name = None;
        item_ctx.index = Some(index);
        for (key, child_value) in item_obj {
            let Some(child) = list.child(key) else {
                continue;
            };
            let mut child_ctx = item_ctx.clone();
            child_ctx.apply(child);
            child_ctx.index = Some(index);
            let child_label = format!("{item_label}.{key}");
            flatten(
                module, child, &child_ctx, &child_label, child_value, mode, None, store, out,
            )?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// DELETE resolution

/// The UCI path a delete of the target addresses directly.
pub fn resolve_delete(target: &ResolvedTarget) -> Result<UciPath, DatamapError> {
    match target.node.kind {
        NodeKind::Leaf | NodeKind::LeafList => Ok(target
            .ctx
            .section_path(&target.node.name)?
            .with_option(target.node.option_name())),
        NodeKind::Container | NodeKind::Module => target.ctx.section_path(&target.node.name),
        NodeKind::List => {
            if target.list_index.is_some() {
                target.ctx.section_path(&target.node.name)
            } else {
                // the whole list: all sections of the type
                let mut ctx = target.ctx.clone();
                ctx.section_name = None;
                ctx.index = None;
                ctx.section_path(&target.node.name)
            }
        }
    }
}

/// All UCI paths covered by deleting the target's subtree: its own
/// section plus every section introduced by a descendant container or
/// list (flat UCI scatters a YANG subtree across sections).
pub fn delete_targets(target: &ResolvedTarget) -> Result<Vec<UciPath>, DatamapError> {
    let mut paths = vec![resolve_delete(target)?];
    if target.node.kind == NodeKind::Container {
        collect_descendant_sections(target.node, &target.ctx, &mut paths)?;
    }
    paths.dedup();
    Ok(paths)
}

fn collect_descendant_sections(
    node: &JinNode,
    ctx: &PathContext,
    paths: &mut Vec<UciPath>,
) -> Result<(), DatamapError> {
    for child in &node.children {
        let mut child_ctx = ctx.clone();
        child_ctx.apply(child);
        match child.kind {
            NodeKind::List => {
                let mut whole = child_ctx.clone();
                whole.section_name = None;
                whole.index = None;
                paths.push(whole.section_path(&child.name)?);
            }
            NodeKind::Container => {
                if child.uci.section.is_some() {
                    paths.push(child_ctx.section_path(&child.name)?);
                }
                collect_descendant_sections(child, &child_ctx, paths)?;
            }
            _ => {}
        }
    }
    Ok(())
}
