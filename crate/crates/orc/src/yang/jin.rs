//! JIN: the JSON rendering of an annotated YANG module.
//!
//! `yang_to_jin` is the offline preprocessing step; `load_jin` is the cheap
//! runtime loader. Both sides meet in `JinModule`, the runtime model.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::check::check_node_annotations;
use super::types::{
    resolve_type, resolve_typedefs, BaseType, RangeBound, RangeSet, Restrictions, TypeSpec,
    TypeUse,
};
use super::{check_annotations, JinNode, NodeKind, YangError, YangModule};

/// Runtime model of one converted module: the schema tree plus the table
/// of fully resolved typedefs (local and imported).
#[derive(Debug, Clone, PartialEq)]
pub struct JinModule {
    pub name: String,
    pub namespace: String,
    pub body: JinNode,
    pub typedefs: BTreeMap<String, TypeSpec>,
}

impl JinModule {
    /// Resolve a leaf's type against this module's typedef table.
    pub fn leaf_spec(&self, node: &JinNode) -> Result<TypeSpec, super::types::TypeError> {
        let type_use = node
            .type_use
            .as_ref()
            .expect("leaf_spec called on a non-leaf node");
        resolve_type(&self.typedefs, type_use)
    }
}

#[derive(Debug, Error)]
#[error("{path}: {reason}")]
pub struct JinFormatError {
    pub path: String,
    pub reason: String,
}

fn err(path: &str, reason: impl Into<String>) -> JinFormatError {
    JinFormatError {
        path: path.to_string(),
        reason: reason.into(),
    }
}

/// Build the runtime model from a parsed module: annotation rules must
/// hold, typedefs resolve, and rule 3 (implicit empty section-name) is
/// applied. Source line numbers are dropped so that the model compares
/// equal to one loaded back from JIN.
pub fn runtime_model(
    module: &YangModule,
    imports: &[YangModule],
) -> Result<JinModule, YangError> {
    let diags = check_annotations(module);
    if !diags.is_empty() {
        return Err(YangError::Annotation(diags));
    }
    let typedefs = resolve_typedefs(module, imports)?;
    let mut body = module.body.clone();
    normalize(&mut body);
    validate_types(&body, &typedefs)?;
    Ok(JinModule {
        name: module.name.clone(),
        namespace: module.namespace.clone(),
        body,
        typedefs,
    })
}

fn normalize(node: &mut JinNode) {
    node.line = 0;
    if node.kind == NodeKind::Container
        && node.uci.section.is_some()
        && node.uci.section_name.is_none()
    {
        // rule 3: section without section-name means an anonymous section
        node.uci.section_name = Some(String::new());
    }
    for child in &mut node.children {
        normalize(child);
    }
}

fn validate_types(node: &JinNode, typedefs: &BTreeMap<String, TypeSpec>) -> Result<(), YangError> {
    if let Some(type_use) = &node.type_use {
        resolve_type(typedefs, type_use).map_err(|e| YangError::UnknownType {
            name: format!("{} ({e})", type_use.name),
            line: node.line,
        })?;
    }
    for child in &node.children {
        validate_types(child, typedefs)?;
    }
    Ok(())
}

/// Convert a checked module to JIN text.
pub fn yang_to_jin(module: &YangModule, imports: &[YangModule]) -> Result<String, YangError> {
    let model = runtime_model(module, imports)?;
    Ok(jin_to_string(&model))
}

pub fn jin_to_string(model: &JinModule) -> String {
    let mut text = serde_json::to_string_pretty(&jin_to_value(model)).unwrap();
    text.push('\n');
    text
}

pub fn jin_to_value(model: &JinModule) -> Value {
    let mut root = node_to_value(&model.body);
    let obj = root.as_object_mut().unwrap();
    obj.insert("name".into(), Value::String(model.name.clone()));
    obj.insert("namespace".into(), Value::String(model.namespace.clone()));
    let mut typedefs = Map::new();
    for (name, spec) in &model.typedefs {
        typedefs.insert(name.clone(), spec_to_value(spec));
    }
    obj.insert("typedefs".into(), Value::Object(typedefs));
    root
}

fn node_to_value(node: &JinNode) -> Value {
    let mut obj = Map::new();
    obj.insert("type".into(), Value::String(node.kind.as_str().into()));
    let ann = [
        ("package", &node.uci.package),
        ("section", &node.uci.section),
        ("section-name", &node.uci.section_name),
        ("option", &node.uci.option),
        ("leaf-as-name", &node.uci.leaf_as_name),
    ];
    for (key, value) in ann {
        if let Some(v) = value {
            obj.insert(key.into(), Value::String(v.clone()));
        }
    }
    if node.kind.is_leafish() {
        let type_use = node.type_use.as_ref().expect("leaf without type");
        obj.insert("leaf-type".into(), type_use_to_value(type_use));
        if node.mandatory {
            obj.insert("mandatory".into(), Value::Bool(true));
        }
    } else {
        if node.kind == NodeKind::List {
            if !node.keys.is_empty() {
                obj.insert("keys".into(), json!(node.keys));
            }
            if !node.unique.is_empty() {
                obj.insert("unique".into(), json!(node.unique));
            }
        }
        let mut map = Map::new();
        for child in &node.children {
            map.insert(child.name.clone(), node_to_value(child));
        }
        obj.insert("map".into(), Value::Object(map));
    }
    Value::Object(obj)
}

fn type_use_to_value(type_use: &TypeUse) -> Value {
    if type_use.restrictions.is_empty() {
        return Value::String(type_use.name.clone());
    }
    let mut obj = Map::new();
    obj.insert("base".into(), Value::String(type_use.name.clone()));
    restrictions_into(&type_use.restrictions, &mut obj);
    Value::Object(obj)
}

fn restrictions_into(r: &Restrictions, obj: &mut Map<String, Value>) {
    if !r.patterns.is_empty() {
        obj.insert("patterns".into(), json!(r.patterns));
    }
    if let Some(range) = &r.range {
        let parts: Vec<Value> = range
            .iter()
            .map(|(lo, hi)| json!([bound_to_string(lo), bound_to_string(hi)]))
            .collect();
        obj.insert("range".into(), Value::Array(parts));
    }
    if let Some(length) = &r.length {
        let parts: Vec<Value> = length
            .iter()
            .map(|(lo, hi)| json!([lo.to_string(), hi.to_string()]))
            .collect();
        obj.insert("length".into(), Value::Array(parts));
    }
    if !r.enums.is_empty() {
        obj.insert("enums".into(), json!(r.enums));
    }
    if let Some(fd) = r.fraction_digits {
        obj.insert("fraction-digits".into(), json!(fd));
    }
}

fn bound_to_string(bound: &RangeBound) -> String {
    match bound {
        RangeBound::Int(v) => v.to_string(),
        RangeBound::Dec(v) => v.to_string(),
        RangeBound::Min => "min".into(),
        RangeBound::Max => "max".into(),
    }
}

fn spec_to_value(spec: &TypeSpec) -> Value {
    let mut obj = Map::new();
    obj.insert("base".into(), Value::String(spec.base.name().into()));
    if !spec.patterns.is_empty() {
        obj.insert("patterns".into(), json!(spec.patterns));
    }
    if let Some(range) = &spec.range {
        let parts: Vec<Value> = match range {
            RangeSet::Int(iv) => iv
                .iter()
                .map(|(lo, hi)| json!([lo.to_string(), hi.to_string()]))
                .collect(),
            RangeSet::Dec(iv) => iv
                .iter()
                .map(|(lo, hi)| json!([lo.to_string(), hi.to_string()]))
                .collect(),
        };
        obj.insert("range".into(), Value::Array(parts));
    }
    if let Some(length) = &spec.length {
        let parts: Vec<Value> = length
            .iter()
            .map(|(lo, hi)| json!([lo.to_string(), hi.to_string()]))
            .collect();
        obj.insert("length".into(), Value::Array(parts));
    }
    if !spec.enums.is_empty() {
        obj.insert("enums".into(), json!(spec.enums));
    }
    if let Some(fd) = spec.fraction_digits {
        obj.insert("fraction-digits".into(), json!(fd));
    }
    Value::Object(obj)
}

// ---------------------------------------------------------------------------
// loading

/// Load a JIN document and re-run the model invariant checks.
pub fn load_jin(text: &str) -> Result<JinModule, JinFormatError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| err("/", format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| err("/", "expected a JSON object"))?;
    let kind = require_str(obj, "type", "")?;
    if kind != "module" {
        return Err(err("/type", format!("expected \"module\", found \"{kind}\"")));
    }
    let name = require_str(obj, "name", "")?;
    let namespace = require_str(obj, "namespace", "")?;
    let body = load_node("", &value, "")?;
    let typedefs_value = obj
        .get("typedefs")
        .ok_or_else(|| err("/typedefs", "missing key"))?
        .as_object()
        .ok_or_else(|| err("/typedefs", "expected an object"))?;
    let mut typedefs = BTreeMap::new();
    for (tname, tvalue) in typedefs_value {
        let path = format!("/typedefs/{tname}");
        typedefs.insert(tname.clone(), load_spec(tvalue, &path)?);
    }
    let mut body = JinNode {
        name: name.clone(),
        ..body
    };
    body.line = 0;

    let diags = check_node_annotations(&body);
    if let Some(d) = diags.first() {
        return Err(err("/", format!("annotation rule violated: {}: {}", d.code, d.message)));
    }
    check_loaded_types(&body, &typedefs, "")?;
    Ok(JinModule {
        name,
        namespace,
        body,
        typedefs,
    })
}

fn check_loaded_types(
    node: &JinNode,
    typedefs: &BTreeMap<String, TypeSpec>,
    path: &str,
) -> Result<(), JinFormatError> {
    if let Some(type_use) = &node.type_use {
        resolve_type(typedefs, type_use)
            .map_err(|e| err(&format!("{path}/leaf-type"), e.to_string()))?;
    }
    for child in &node.children {
        let child_path = format!("{path}/map/{}", child.name);
        check_loaded_types(child, typedefs, &child_path)?;
    }
    Ok(())
}

fn require_str(obj: &Map<String, Value>, key: &str, path: &str) -> Result<String, JinFormatError> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(err(&format!("{path}/{key}"), "expected a string")),
        None => Err(err(&format!("{path}/{key}"), "missing key")),
    }
}

fn optional_str(
    obj: &Map<String, Value>,
    key: &str,
    path: &str,
) -> Result<Option<String>, JinFormatError> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(err(&format!("{path}/{key}"), "expected a string")),
    }
}

fn load_node(name: &str, value: &Value, path: &str) -> Result<JinNode, JinFormatError> {
    let obj = value
        .as_object()
        .ok_or_else(|| err(path, "expected an object"))?;
    let kind = match require_str(obj, "type", path)?.as_str() {
        "module" => NodeKind::Module,
        "container" => NodeKind::Container,
        "list" => NodeKind::List,
        "leaf" => NodeKind::Leaf,
        "leaf-list" => NodeKind::LeafList,
        other => {
            return Err(err(
                &format!("{path}/type"),
                format!("unknown node type \"{other}\""),
            ))
        }
    };
    let mut node = JinNode::new(kind, name, 0);
    node.uci.package = optional_str(obj, "package", path)?;
    node.uci.section = optional_str(obj, "section", path)?;
    node.uci.section_name = optional_str(obj, "section-name", path)?;
    node.uci.option = optional_str(obj, "option", path)?;
    node.uci.leaf_as_name = optional_str(obj, "leaf-as-name", path)?;

    if kind.is_leafish() {
        let type_value = obj
            .get("leaf-type")
            .ok_or_else(|| err(&format!("{path}/leaf-type"), "missing key"))?;
        node.type_use = Some(load_type_use(type_value, &format!("{path}/leaf-type"))?);
        match obj.get("mandatory") {
            None => {}
            Some(Value::Bool(b)) => node.mandatory = *b,
            Some(_) => return Err(err(&format!("{path}/mandatory"), "expected a boolean")),
        }
    } else {
        let map = obj
            .get("map")
            .ok_or_else(|| err(&format!("{path}/map"), "missing key"))?
            .as_object()
            .ok_or_else(|| err(&format!("{path}/map"), "expected an object"))?;
        for (child_name, child_value) in map {
            let child_path = format!("{path}/map/{child_name}");
            node.children
                .push(load_node(child_name, child_value, &child_path)?);
        }
        if kind == NodeKind::List {
            if let Some(keys) = obj.get("keys") {
                node.keys = load_string_array(keys, &format!("{path}/keys"))?;
            }
            if let Some(unique) = obj.get("unique") {
                let arr = unique
                    .as_array()
                    .ok_or_else(|| err(&format!("{path}/unique"), "expected an array"))?;
                for (i, group) in arr.iter().enumerate() {
                    node.unique
                        .push(load_string_array(group, &format!("{path}/unique[{i}]"))?);
                }
            }
        }
    }
    Ok(node)
}

fn load_string_array(value: &Value, path: &str) -> Result<Vec<String>, JinFormatError> {
    let arr = value
        .as_array()
        .ok_or_else(|| err(path, "expected an array"))?;
    arr.iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| err(path, "expected an array of strings"))
        })
        .collect()
}

fn load_type_use(value: &Value, path: &str) -> Result<TypeUse, JinFormatError> {
    match value {
        Value::String(name) => Ok(TypeUse::plain(name.clone())),
        Value::Object(obj) => {
            let name = require_str(obj, "base", path)?;
            let restrictions = load_restrictions(obj, path)?;
            Ok(TypeUse { name, restrictions })
        }
        _ => Err(err(path, "expected a type name or object")),
    }
}

fn load_restrictions(obj: &Map<String, Value>, path: &str) -> Result<Restrictions, JinFormatError> {
    let mut r = Restrictions::default();
    if let Some(p) = obj.get("patterns") {
        r.patterns = load_string_array(p, &format!("{path}/patterns"))?;
    }
    if let Some(range) = obj.get("range") {
        let arr = range
            .as_array()
            .ok_or_else(|| err(&format!("{path}/range"), "expected an array"))?;
        let mut parts = Vec::new();
        for (i, pair) in arr.iter().enumerate() {
            let pair_path = format!("{path}/range[{i}]");
            let strings = load_string_array(pair, &pair_path)?;
            if strings.len() != 2 {
                return Err(err(&pair_path, "expected [lo, hi]"));
            }
            parts.push((
                load_bound(&strings[0], &pair_path)?,
                load_bound(&strings[1], &pair_path)?,
            ));
        }
        r.range = Some(parts);
    }
    if let Some(length) = obj.get("length") {
        let arr = length
            .as_array()
            .ok_or_else(|| err(&format!("{path}/length"), "expected an array"))?;
        let mut parts = Vec::new();
        for (i, pair) in arr.iter().enumerate() {
            let pair_path = format!("{path}/length[{i}]");
            let strings = load_string_array(pair, &pair_path)?;
            if strings.len() != 2 {
                return Err(err(&pair_path, "expected [lo, hi]"));
            }
            let parse = |s: &str| -> Result<u64, JinFormatError> {
                s.parse()
                    .map_err(|_| err(&pair_path, format!("bad length bound \"{s}\"")))
            };
            parts.push((parse(&strings[0])?, parse(&strings[1])?));
        }
        r.length = Some(parts);
    }
    if let Some(e) = obj.get("enums") {
        r.enums = load_string_array(e, &format!("{path}/enums"))?;
    }
    if let Some(fd) = obj.get("fraction-digits") {
        let n = fd
            .as_u64()
            .filter(|n| (1..=18).contains(n))
            .ok_or_else(|| err(&format!("{path}/fraction-digits"), "expected 1..18"))?;
        r.fraction_digits = Some(n as u8);
    }
    Ok(r)
}

fn load_bound(s: &str, path: &str) -> Result<RangeBound, JinFormatError> {
    match s {
        "min" => Ok(RangeBound::Min),
        "max" => Ok(RangeBound::Max),
        _ => {
            if let Ok(v) = s.parse::<i128>() {
                Ok(RangeBound::Int(v))
            } else if let Ok(v) = s.parse::<f64>() {
                Ok(RangeBound::Dec(v))
            } else {
                Err(err(path, format!("bad range bound \"{s}\"")))
            }
        }
    }
}

fn load_spec(value: &Value, path: &str) -> Result<TypeSpec, JinFormatError> {
    let obj = value
        .as_object()
        .ok_or_else(|| err(path, "expected an object"))?;
    let base_name = require_str(obj, "base", path)?;
    let base = BaseType::from_name(&base_name)
        .ok_or_else(|| err(&format!("{path}/base"), format!("unknown base \"{base_name}\"")))?;
    let r = load_restrictions(obj, path)?;
    let range = match r.range {
        None => None,
        Some(parts) => {
            let mut int_parts = Vec::new();
            let mut dec_parts = Vec::new();
            for (lo, hi) in &parts {
                match (lo, hi) {
                    (RangeBound::Int(a), RangeBound::Int(b)) if base.is_integer() => {
                        int_parts.push((*a, *b))
                    }
                    _ => {
                        let as_f64 = |b: &RangeBound| match b {
                            RangeBound::Int(v) => *v as f64,
                            RangeBound::Dec(v) => *v,
                            _ => f64::NAN,
                        };
                        let (a, b) = (as_f64(lo), as_f64(hi));
                        if a.is_nan() || b.is_nan() {
                            return Err(err(
                                &format!("{path}/range"),
                                "resolved typedef ranges must be numeric",
                            ));
                        }
                        dec_parts.push((a, b));
                    }
                }
            }
            if base.is_integer() {
                Some(RangeSet::Int(int_parts))
            } else {
                Some(RangeSet::Dec(dec_parts))
            }
        }
    };
    Ok(TypeSpec {
        base,
        patterns: r.patterns,
        range,
        length: r.length,
        enums: r.enums,
        fraction_digits: r.fraction_digits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::yang::parse_yang;

    const FIG3: &str = r#"
module example {
  namespace "urn:example:restconf-example"; prefix ex;
  import orc-uci { prefix uci; }
  uci:package "example";
  container device {
    uci:section "device";
    uci:section-name "device";
    leaf name { uci:option "name"; type string; }
    leaf enabled { uci:option "enabled"; type boolean; }
    list interfaces {
      uci:section "interface";
      uci:leaf-as-name "name";
      key "name";
      leaf name { uci:option "name"; type string; }
    }
    leaf-list applications { uci:option "applications"; type string; }
  }
}
"#;

    #[test]
    fn conversion_matches_expected_structure() {
        let module = parse_yang(FIG3).unwrap();
        let text = yang_to_jin(&module, &[]).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["type"], "module");
        assert_eq!(v["package"], "example");
        assert_eq!(v["map"]["device"]["type"], "container");
        assert_eq!(v["map"]["device"]["section-name"], "device");
        assert_eq!(v["map"]["device"]["map"]["enabled"]["option"], "enabled");
        assert_eq!(v["map"]["device"]["map"]["interfaces"]["type"], "list");
        assert_eq!(
            v["map"]["device"]["map"]["interfaces"]["leaf-as-name"],
            "name"
        );
    }

    #[test]
    fn empty_module_converts_to_empty_maps() {
        let module =
            parse_yang("module m { namespace \"urn:m\"; prefix m; import orc-uci { prefix uci; } uci:package \"m\"; }")
                .unwrap();
        let text = yang_to_jin(&module, &[]).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["type"], "module");
        assert_eq!(v["package"], "m");
        assert_eq!(v["map"], json!({}));
        assert_eq!(v["typedefs"], json!({}));
    }

    #[test]
    fn conversion_fails_with_outstanding_diagnostics() {
        let module = parse_yang(
            "module m { prefix m; import orc-uci { prefix uci; } uci:package \"m\"; list l { uci:section \"s\"; uci:section-name \"oops\"; key \"k\"; leaf k { type string; } } }",
        )
        .unwrap();
        let errors = yang_to_jin(&module, &[]).unwrap_err();
        assert!(matches!(errors, YangError::Annotation(_)));
    }

    #[test]
    fn load_reconstructs_leaf_options() {
        let module = parse_yang(FIG3).unwrap();
        let text = yang_to_jin(&module, &[]).unwrap();
        let loaded = load_jin(&text).unwrap();
        let enabled = loaded.body.child("device").unwrap().child("enabled").unwrap();
        assert_eq!(enabled.kind, NodeKind::Leaf);
        assert_eq!(enabled.uci.option.as_deref(), Some("enabled"));
    }

    #[test]
    fn empty_object_is_missing_type() {
        let e = load_jin("{}").unwrap_err();
        assert_eq!(e.path, "/type");
    }

    #[test]
    fn round_trip_preserves_runtime_model() {
        let module = parse_yang(FIG3).unwrap();
        let model = runtime_model(&module, &[]).unwrap();
        let loaded = load_jin(&jin_to_string(&model)).unwrap();
        assert_eq!(model, loaded);
    }

    #[test]
    fn rule_3_records_empty_section_name() {
        let module = parse_yang(
            "module m { prefix m; import orc-uci { prefix uci; } uci:package \"m\"; container c { uci:section \"s\"; leaf x { type string; } } }",
        )
        .unwrap();
        let model = runtime_model(&module, &[]).unwrap();
        assert_eq!(
            model.body.child("c").unwrap().uci.section_name.as_deref(),
            Some("")
        );
    }

    #[test]
    fn mutation_sweep_names_the_corrupted_key() {
        let module = parse_yang(FIG3).unwrap();
        let model = runtime_model(&module, &[]).unwrap();
        let valid = jin_to_value(&model);

        let cases = [
            ("/type", vec!["type"]),
            ("/name", vec!["name"]),
            ("/namespace", vec!["namespace"]),
            ("/typedefs", vec!["typedefs"]),
            ("/map", vec!["map"]),
            ("/map/device/type", vec!["map", "device", "type"]),
            ("/map/device/map", vec!["map", "device", "map"]),
            (
                "/map/device/map/enabled/leaf-type",
                vec!["map", "device", "map", "enabled", "leaf-type"],
            ),
        ];
        for (expected_path, keys) in cases {
            let mut corrupted = valid.clone();
            let mut cursor = &mut corrupted;
            for key in &keys[..keys.len() - 1] {
                cursor = cursor.get_mut(*key).unwrap();
            }
            cursor
                .as_object_mut()
                .unwrap()
                .remove(keys[keys.len() - 1]);
            let e = load_jin(&serde_json::to_string(&corrupted).unwrap()).unwrap_err();
            assert_eq!(e.path, expected_path, "reason: {}", e.reason);
        }
    }

    // deterministic generator for the structural round-trip oracle
    struct Rng(u64);
    impl Rng {
        fn next(&mut self) -> u64 {
            let mut x = self.0;
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            self.0 = x;
            x
        }
        fn pick(&mut self, n: usize) -> usize {
            (self.next() % n as u64) as usize
        }
    }

    fn random_leaf(rng: &mut Rng, name: &str) -> String {
        let ty = match rng.pick(6) {
            0 => "type string;".to_string(),
            1 => "type boolean;".to_string(),
            2 => "type uint8 { range \"1..200\"; }".to_string(),
            3 => "type int32;".to_string(),
            4 => "type uint64;".to_string(),
            _ => "type string { pattern \"[a-z]+\"; }".to_string(),
        };
        format!("leaf {name} {{ uci:option \"{name}\"; {ty} }}\n")
    }

    fn random_module(rng: &mut Rng, idx: usize) -> String {
        let mut src = format!(
            "module gen{idx} {{ namespace \"urn:gen{idx}\"; prefix g; import orc-uci {{ prefix uci; }} uci:package \"gen{idx}\";\n"
        );
        src.push_str("typedef percent { type uint8 { range \"0..100\"; } }\n");
        let containers = 1 + rng.pick(3);
        for c in 0..containers {
            src.push_str(&format!(
                "container c{c} {{ uci:section \"sec{c}\"; uci:section-name \"c{c}\";\n"
            ));
            for l in 0..1 + rng.pick(3) {
                src.push_str(&random_leaf(rng, &format!("f{l}")));
            }
            if rng.pick(2) == 0 {
                src.push_str(&format!(
                    "list items{c} {{ uci:section \"item{c}\"; key \"id\"; leaf id {{ uci:option \"id\"; type string; }} leaf pct {{ uci:option \"pct\"; type percent; }} }}\n"
                ));
            }
            if rng.pick(2) == 0 {
                src.push_str(&format!(
                    "leaf-list tags{c} {{ uci:option \"tags{c}\"; type string; }}\n"
                ));
            }
            src.push_str("}\n");
        }
        src.push('}');
        src
    }

    #[test]
    fn random_modules_round_trip_through_jin() {
        let mut rng = Rng(0x5eed_1234_dead_beef);
        for i in 0..30 {
            let src = random_module(&mut rng, i);
            let module = parse_yang(&src).unwrap_or_else(|e| panic!("{src}\n{e}"));
            let model = runtime_model(&module, &[]).unwrap();
            let loaded = load_jin(&jin_to_string(&model)).unwrap();
            assert_eq!(model, loaded, "module {i}");
        }
    }
}
