//! Request-body verification against the YANG constraints: JSON shape,
//! leaf lexical forms, pattern/range restrictions, and list key/unique
//! semantics. Reads are never validated; writes always are.

use std::fmt;

use serde_json::Value;

use crate::datamap::{encode_value, leaf_spec, BodyRoot, Mode, PathContext};
use crate::uci::{ReadValue, UciPath, UciStore};
use crate::yang::types::{dec_in_range, int_in_range};
use crate::yang::{BaseType, JinModule, JinNode, NodeKind, TypeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    UnknownNode,
    WrongShape,
    BadLexical,
    Pattern,
    Range,
    MissingKey,
    DuplicateKey,
    UniqueViolation,
    MandatoryMissing,
    ExistsConflict,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::UnknownNode => "unknown-node",
            Rule::WrongShape => "wrong-shape",
            Rule::BadLexical => "bad-lexical",
            Rule::Pattern => "pattern",
            Rule::Range => "range",
            Rule::MissingKey => "missing-key",
            Rule::DuplicateKey => "duplicate-key",
            Rule::UniqueViolation => "unique-violation",
            Rule::MandatoryMissing => "mandatory-missing",
            Rule::ExistsConflict => "exists-conflict",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    /// `/`-separated keys with `[i]` indices, locating a body node.
    pub json_path: String,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.json_path, self.rule.tag(), self.detail)
    }
}

/// Check one JSON value against a resolved type: shape for the base,
/// base bounds, then declared pattern/range/length/enum restrictions.
pub fn verify_leaf(spec: &TypeSpec, value: &Value) -> Result<(), (Rule, String)> {
    match spec.base {
        BaseType::Boolean => match value {
            Value::Bool(_) => Ok(()),
            _ => Err((Rule::BadLexical, "expected JSON true or false".into())),
        },
        BaseType::Int8 | BaseType::Int16 | BaseType::Int32 => {
            let n = value
                .as_number()
                .ok_or((Rule::BadLexical, "expected a JSON number".to_string()))?;
            let v = n
                .as_i64()
                .ok_or((Rule::BadLexical, "expected an integer".to_string()))?;
            check_int(spec, v as i128)
        }
        BaseType::Uint8 | BaseType::Uint16 | BaseType::Uint32 => {
            let n = value
                .as_number()
                .ok_or((Rule::BadLexical, "expected a JSON number".to_string()))?;
            if let Some(v) = n.as_u64() {
                check_int(spec, v as i128)
            } else if n.as_i64().is_some() {
                // a negative integer: lexically fine, out of range
                Err((Rule::Range, format!("{n} is below the base minimum")))
            } else {
                Err((Rule::BadLexical, "expected an integer".into()))
            }
        }
        BaseType::Int64 | BaseType::Uint64 => {
            let s = value.as_str().ok_or((
                Rule::BadLexical,
                "64-bit integers travel as JSON strings".to_string(),
            ))?;
            let v: i128 = match spec.base {
                BaseType::Uint64 => s
                    .parse::<u64>()
                    .map_err(|_| (Rule::BadLexical, format!("'{s}' is not a uint64")))?
                    as i128,
                _ => s
                    .parse::<i64>()
                    .map_err(|_| (Rule::BadLexical, format!("'{s}' is not an int64")))?
                    as i128,
            };
            check_int(spec, v)
        }
        BaseType::Decimal64 => {
            let s = value.as_str().ok_or((
                Rule::BadLexical,
                "decimal64 values travel as JSON strings".to_string(),
            ))?;
            let v = parse_decimal(s, spec.fraction_digits.unwrap_or(18))
                .ok_or((Rule::BadLexical, format!("'{s}' is not a decimal64")))?;
            if let Some(range) = &spec.range {
                if !dec_in_range(range, v) {
                    return Err((Rule::Range, format!("{s} is outside the declared range")));
                }
            }
            Ok(())
        }
        BaseType::String => {
            let s = value
                .as_str()
                .ok_or((Rule::BadLexical, "expected a JSON string".to_string()))?;
            if let Some(length) = &spec.length {
                let n = s.chars().count() as u64;
                if !length.iter().any(|&(lo, hi)| n >= lo && n <= hi) {
                    return Err((
                        Rule::Range,
                        format!("length {n} is outside the declared length"),
                    ));
                }
            }
            for pattern in &spec.patterns {
                // YANG patterns are implicitly anchored
                let anchored = format!("^(?:{pattern})$");
                let matched = regex::Regex::new(&anchored)
                    .map(|re| re.is_match(s))
                    .unwrap_or(false);
                if !matched {
                    return Err((
                        Rule::Pattern,
                        format!("'{s}' does not match pattern '{pattern}'"),
                    ));
                }
            }
            Ok(())
        }
        BaseType::Enumeration => {
            let s = value
                .as_str()
                .ok_or((Rule::BadLexical, "expected a JSON string".to_string()))?;
            if spec.enums.iter().any(|e| e == s) {
                Ok(())
            } else {
                Err((Rule::BadLexical, format!("'{s}' is not an enum value")))
            }
        }
    }
}

fn check_int(spec: &TypeSpec, v: i128) -> Result<(), (Rule, String)> {
    let (lo, hi) = spec
        .base
        .int_bounds()
        .expect("integer base has bounds");
    if v < lo || v > hi {
        return Err((
            Rule::Range,
            format!("{v} is outside the {} value space", spec.base.name()),
        ));
    }
    if let Some(range) = &spec.range {
        if !int_in_range(range, v) {
            return Err((Rule::Range, format!("{v} is outside the declared range")));
        }
    }
    Ok(())
}

/// RFC 7951 decimal64 lexical form: optional sign, digits, optional
/// fraction part of at most `fraction_digits` digits.
fn parse_decimal(s: &str, fraction_digits: u8) -> Option<f64> {
    let rest = s.strip_prefix('-').unwrap_or(s);
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (rest, None),
    };
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if let Some(f) = frac_part {
        if f.is_empty()
            || f.len() > fraction_digits as usize
            || !f.bytes().all(|b| b.is_ascii_digit())
        {
            return None;
        }
    }
    s.parse::<f64>().ok()
}

/// Walk the body against the schema, collecting every violation in
/// document order.
pub fn verify_tree(root: &BodyRoot, store: &UciStore, mode: Mode) -> Vec<ValidationError> {
    let mut errors = Vec::new();
    let json_path = format!("/{}", root.root_key);
    walk(
        root.module,
        root.node,
        &root.ctx,
        root.inner,
        &json_path,
        mode,
        root.entry_index.is_some(),
        store,
        &mut errors,
    );
    errors
}

#[allow(clippy::too_many_arguments)]
fn walk(
    module: &JinModule,
    node: &JinNode,
    ctx: &PathContext,
    value: &Value,
    json_path: &str,
    mode: Mode,
    is_entry: bool,
    store: &UciStore,
    errors: &mut Vec<ValidationError>,
) {
    let mut err = |rule: Rule, detail: String| {
        errors.push(ValidationError {
            json_path: json_path.to_string(),
            rule,
            detail,
        })
    };
    match node.kind {
        NodeKind::Leaf => {
            match leaf_spec(module, node) {
                Ok(spec) => {
                    if let Err((rule, detail)) = verify_leaf(&spec, value) {
                        err(rule, detail);
                    }
                }
                Err(e) => err(Rule::WrongShape, e.to_string()),
            }
        }
        NodeKind::LeafList => {
            let Some(items) = value.as_array() else {
                err(Rule::WrongShape, "a leaf-list takes a JSON array".into());
                return;
            };
            let spec = match leaf_spec(module, node) {
                Ok(spec) => spec,
                Err(e) => {
                    err(Rule::WrongShape, e.to_string());
                    return;
                }
            };
            for (i, item) in items.iter().enumerate() {
                if let Err((rule, detail)) = verify_leaf(&spec, item) {
                    errors.push(ValidationError {
                        json_path: format!("{json_path}[{i}]"),
                        rule,
                        detail,
                    });
                }
            }
            // single values are compared like list keys
            let mut seen: Vec<String> = existing_leaf_list(node, ctx, store, mode);
            for (i, item) in items.iter().enumerate() {
                if let Some(v) = encode_value(item) {
                    if seen.contains(&v) {
                        errors.push(ValidationError {
                            json_path: format!("{json_path}[{i}]"),
                            rule: Rule::DuplicateKey,
                            detail: format!("value '{v}' appears more than once"),
                        });
                    }
                    seen.push(v);
                }
            }
        }
        NodeKind::Module | NodeKind::Container => {
            let Some(obj) = value.as_object() else {
                err(Rule::WrongShape, "a container takes a JSON object".into());
                return;
            };
            if mode == Mode::Create && node.kind == NodeKind::Container {
                if let Some(name) = ctx.section_name.as_deref() {
                    if !name.is_empty() && node.uci.section.is_some() && section_exists(ctx, store)
                    {
                        err(
                            Rule::ExistsConflict,
                            format!("'{}' already exists in the store", node.name),
                        );
                    }
                }
            }
            for child in &node.children {
                if child.kind == NodeKind::Leaf && child.mandatory && !obj.contains_key(&child.name)
                {
                    errors.push(ValidationError {
                        json_path: json_path.to_string(),
                        rule: Rule::MandatoryMissing,
                        detail: format!("mandatory leaf '{}' is missing", child.name),
                    });
                }
            }
            for (key, child_value) in obj {
                let child_path = format!("{json_path}/{key}");
                let Some(child) = node.child(key) else {
                    errors.push(ValidationError {
                        json_path: child_path,
                        rule: Rule::UnknownNode,
                        detail: format!("'{key}' is not defined in the model"),
                    });
                    continue;
                };
                let mut child_ctx = ctx.clone();
                child_ctx.apply(child);
                walk(
                    module,
                    child,
                    &child_ctx,
                    child_value,
                    &child_path,
                    mode,
                    false,
                    store,
                    errors,
                );
            }
        }
        NodeKind::List => {
            let Some(items) = value.as_array() else {
                err(Rule::WrongShape, "a list takes a JSON array".into());
                return;
            };
            for (i, item) in items.iter().enumerate() {
                let item_path = format!("{json_path}[{i}]");
                let Some(obj) = item.as_object() else {
                    errors.push(ValidationError {
                        json_path: item_path,
                        rule: Rule::WrongShape,
                        detail: "a list item takes a JSON object".into(),
                    });
                    continue;
                };
                for key_leaf in &node.keys {
                    if !obj.contains_key(key_leaf) {
                        errors.push(ValidationError {
                            json_path: item_path.clone(),
                            rule: Rule::MissingKey,
                            detail: format!("key leaf '{key_leaf}' is missing"),
                        });
                    }
                }
                for child in &node.children {
                    if child.kind == NodeKind::Leaf
                        && child.mandatory
                        && !obj.contains_key(&child.name)
                    {
                        errors.push(ValidationError {
                            json_path: item_path.clone(),
                            rule: Rule::MandatoryMissing,
                            detail: format!("mandatory leaf '{}' is missing", child.name),
                        });
                    }
                }
                for (key, child_value) in obj {
                    let child_path = format!("{item_path}/{key}");
                    let Some(child) = node.child(key) else {
                        errors.push(ValidationError {
                            json_path: child_path,
                            rule: Rule::UnknownNode,
                            detail: format!("'{key}' is not defined in the model"),
                        });
                        continue;
                    };
                    let mut child_ctx = ctx.clone();
                    child_ctx.apply(child);
                    walk(
                        module,
                        child,
                        &child_ctx,
                        child_value,
                        &child_path,
                        mode,
                        false,
                        store,
                        errors,
                    );
                }
            }
            let existing = if mode == Mode::Replace && !is_entry {
                // a whole-list replace discards current entries first
                Vec::new()
            } else if is_entry {
                existing_key_tuples_excluding(node, ctx, store, ctx.index)
            } else {
                existing_key_tuples_excluding(node, ctx, store, None)
            };
            let item_refs: Vec<&Value> = items.iter().collect();
            errors.extend(verify_list_uniqueness(node, &item_refs, &existing, json_path));
        }
    }
}

fn section_exists(ctx: &PathContext, store: &UciStore) -> bool {
    let Ok(path) = ctx.section_path("") else {
        return false;
    };
    let doc = match store.read_package(&path.package) {
        Ok(doc) => doc,
        Err(_) => return false,
    };
    doc.sections.iter().any(|s| {
        s.section_type == path.section_type && s.name.as_deref() == path.section_name.as_deref()
    })
}

fn existing_leaf_list(
    node: &JinNode,
    ctx: &PathContext,
    store: &UciStore,
    mode: Mode,
) -> Vec<String> {
    if mode != Mode::Append {
        // create writes fresh, replace clears the list first
        return Vec::new();
    }
    let Ok(path) = ctx.section_path(&node.name) else {
        return Vec::new();
    };
    match store.read_value(&path.with_option(node.option_name())) {
        Ok(ReadValue::Many(vs)) => vs,
        Ok(ReadValue::Single(v)) => vec![v],
        _ => Vec::new(),
    }
}

/// Key tuples of the list's current store entries, optionally skipping
/// the entry being replaced in place.
fn existing_key_tuples_excluding(
    list: &JinNode,
    ctx: &PathContext,
    store: &UciStore,
    skip: Option<usize>,
) -> Vec<Vec<String>> {
    let Ok(path) = ctx.section_path(&list.name) else {
        return Vec::new();
    };
    let count = match store.count_sections(&path.package, &path.section_type) {
        Ok(n) => n,
        Err(_) => return Vec::new(),
    };
    let mut tuples = Vec::new();
    for index in 0..count {
        if skip == Some(index) {
            continue;
        }
        let mut tuple = Vec::new();
        for key_leaf in &list.keys {
            let Some(leaf) = list.child(key_leaf) else {
                continue;
            };
            let p = UciPath::section(path.package.clone(), path.section_type.clone())
                .at_index(index)
                .with_option(leaf.option_name());
            match store.read_value(&p) {
                Ok(ReadValue::Single(v)) => tuple.push(v),
                _ => tuple.push(String::new()),
            }
        }
        tuples.push(tuple);
    }
    tuples
}

/// Pairwise comparison of key tuples (and unique groups) across the new
/// items and the existing store entries.
pub fn verify_list_uniqueness(
    list: &JinNode,
    new_items: &[&Value],
    existing: &[Vec<String>],
    json_path: &str,
) -> Vec<ValidationError> {
    let mut errors = Vec::new();
    check_group(
        list,
        &list.keys,
        Rule::DuplicateKey,
        new_items,
        existing,
        json_path,
        &mut errors,
    );
    for group in &list.unique {
        // unique tuples of existing entries are not tracked in the store
        // read here; compare within the request
        check_group(list, group, Rule::UniqueViolation, new_items, &[], json_path, &mut errors);
    }
    errors
}

fn check_group(
    list: &JinNode,
    leaves: &[String],
    rule: Rule,
    new_items: &[&Value],
    existing: &[Vec<String>],
    json_path: &str,
    errors: &mut Vec<ValidationError>,
) {
    if leaves.is_empty() {
        return;
    }
    let mut seen: Vec<Vec<String>> = existing.to_vec();
    for (i, item) in new_items.iter().enumerate() {
        let Some(obj) = item.as_object() else {
            continue;
        };
        let mut tuple = Vec::new();
        let mut complete = true;
        for leaf in leaves {
            match obj.get(leaf).and_then(encode_value) {
                Some(v) => tuple.push(v),
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if !complete {
            continue;
        }
        let _ = list;
        if seen.contains(&tuple) {
            errors.push(ValidationError {
                json_path: format!("{json_path}[{i}]"),
                rule,
                detail: format!("({}) duplicates an existing tuple", tuple.join(", ")),
            });
        }
        seen.push(tuple);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamap::{
        json_to_entries, locate, resolve_body_root, Located, ModelSet, Segment,
    };
    use crate::uci::{ApplyMode, UciStore};
    use crate::yang::types::resolve_type;
    use crate::yang::{parse_yang, runtime_model, TypeUse};
    use regex::Regex;
    use serde_json::json;
    use std::collections::BTreeMap;
    use tempfile::TempDir;

    fn spec_of(base: &str) -> TypeSpec {
        resolve_type(&BTreeMap::new(), &TypeUse::plain(base)).unwrap()
    }

    fn models() -> ModelSet {
        let module = parse_yang(crate::datamap::tests::EXAMPLE_YANG).unwrap();
        ModelSet::new(vec![runtime_model(&module, &[]).unwrap()])
    }

    fn sample_body() -> Value {
        json!({
            "example:device": {
                "name": "Router_0",
                "interfaces": [{"name": "eth0", "enabled": true}],
                "applications": ["uhttpd", "luci"]
            }
        })
    }

    fn store() -> (TempDir, UciStore) {
        let dir = TempDir::new().unwrap();
        let store = UciStore::open(dir.path());
        (dir, store)
    }

    fn verify_at_root(models: &ModelSet, store: &UciStore, body: &Value) -> Vec<ValidationError> {
        let root = resolve_body_root(models, &Located::Root, body).unwrap();
        verify_tree(&root, store, Mode::Create)
    }

    #[test]
    fn boolean_accepts_json_booleans_only() {
        let spec = spec_of("boolean");
        assert!(verify_leaf(&spec, &json!(true)).is_ok());
        assert!(verify_leaf(&spec, &json!(false)).is_ok());
        assert_eq!(verify_leaf(&spec, &json!("true")).unwrap_err().0, Rule::BadLexical);
        assert_eq!(verify_leaf(&spec, &json!(1)).unwrap_err().0, Rule::BadLexical);
    }

    #[test]
    fn integer_base_boundaries() {
        // min-1 / min / max / max+1 for every integer base
        for base in [
            "int8", "int16", "int32", "uint8", "uint16", "uint32",
        ] {
            let spec = spec_of(base);
            let (lo, hi) = spec.base.int_bounds().unwrap();
            for (v, ok) in [(lo - 1, false), (lo, true), (hi, true), (hi + 1, false)] {
                let value = json!(v as i64);
                let result = verify_leaf(&spec, &value);
                assert_eq!(result.is_ok(), ok, "{base} {v}");
                if !ok {
                    assert_eq!(result.unwrap_err().0, Rule::Range, "{base} {v}");
                }
            }
        }
    }

    #[test]
    fn sixty_four_bit_bases_require_strings() {
        let mut dec64 = TypeSpec::builtin(BaseType::Decimal64);
        dec64.fraction_digits = Some(2);
        for spec in [spec_of("int64"), spec_of("uint64"), dec64] {
            assert_eq!(
                verify_leaf(&spec, &json!(42)).unwrap_err().0,
                Rule::BadLexical,
                "{:?}",
                spec.base
            );
        }
        assert!(verify_leaf(&spec_of("int64"), &json!("-42")).is_ok());
        assert!(verify_leaf(&spec_of("uint64"), &json!("18446744073709551615")).is_ok());
        assert_eq!(
            verify_leaf(&spec_of("uint64"), &json!("-1")).unwrap_err().0,
            Rule::BadLexical
        );
        let mut dec = TypeSpec::builtin(BaseType::Decimal64);
        dec.fraction_digits = Some(2);
        assert!(verify_leaf(&dec, &json!("3.14")).is_ok());
        assert_eq!(verify_leaf(&dec, &json!("3.145")).unwrap_err().0, Rule::BadLexical);
        assert_eq!(verify_leaf(&dec, &json!("abc")).unwrap_err().0, Rule::BadLexical);
    }

    #[test]
    fn pattern_matches_equal_brute_force_over_two_chars() {
        let mut spec = spec_of("string");
        spec.patterns = vec!["[a-z]+".to_string()];
        let oracle = Regex::new("^[a-z]+$").unwrap();
        for a in 32u8..127 {
            for b in 32u8..127 {
                let s = format!("{}{}", a as char, b as char);
                let expected = oracle.is_match(&s);
                assert_eq!(
                    verify_leaf(&spec, &json!(s)).is_ok(),
                    expected,
                    "{s:?}"
                );
            }
        }
    }

    #[test]
    fn sample_body_is_valid_on_empty_store() {
        let models = models();
        let (_d, s) = store();
        assert!(verify_at_root(&models, &s, &sample_body()).is_empty());
    }

    #[test]
    fn unknown_key_is_reported_with_its_path() {
        let models = models();
        let (_d, s) = store();
        let mut body = sample_body();
        body["example:device"]
            .as_object_mut()
            .unwrap()
            .insert("bogus".into(), json!(1));
        let errors = verify_at_root(&models, &s, &body);
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].rule, Rule::UnknownNode);
        assert_eq!(errors[0].json_path, "/example:device/bogus");
    }

    #[test]
    fn second_create_conflicts_with_the_store() {
        let models = models();
        let (_d, s) = store();
        let body = sample_body();
        let root = resolve_body_root(&models, &Located::Root, &body).unwrap();
        let entries = json_to_entries(&root, Mode::Create, &s).unwrap();
        s.with_writer_lock(|l| s.apply_changes(l, &entries, ApplyMode::Create))
            .unwrap()
            .unwrap();
        let errors = verify_at_root(&models, &s, &body);
        assert!(errors.iter().any(|e| e.rule == Rule::ExistsConflict), "{errors:?}");
    }

    #[test]
    fn missing_key_leaf_in_list_item() {
        let models = models();
        let (_d, s) = store();
        let body = json!({
            "example:device": {"interfaces": [{"enabled": true}]}
        });
        let errors = verify_at_root(&models, &s, &body);
        assert!(errors.iter().any(|e| e.rule == Rule::MissingKey
            && e.json_path == "/example:device/interfaces[0]"));
    }

    #[test]
    fn duplicate_key_within_request() {
        let models = models();
        let (_d, s) = store();
        let body = json!({
            "example:device": {"interfaces": [
                {"name": "eth0", "enabled": true},
                {"name": "eth0", "enabled": false}
            ]}
        });
        let errors = verify_at_root(&models, &s, &body);
        assert_eq!(
            errors.iter().filter(|e| e.rule == Rule::DuplicateKey).count(),
            1
        );
    }

    #[test]
    fn appending_an_existing_key_conflicts() {
        let models = models();
        let (_d, s) = store();
        let body = sample_body();
        let root = resolve_body_root(&models, &Located::Root, &body).unwrap();
        let entries = json_to_entries(&root, Mode::Create, &s).unwrap();
        s.with_writer_lock(|l| s.apply_changes(l, &entries, ApplyMode::Create))
            .unwrap()
            .unwrap();

        let located = locate(
            &models,
            &s,
            &[Segment::plain("example:device"), Segment::plain("interfaces")],
        )
        .unwrap();
        let append = json!({"interfaces": [{"name": "eth0", "enabled": false}]});
        let root = resolve_body_root(&models, &located, &append).unwrap();
        let errors = verify_tree(&root, &s, Mode::Append);
        assert!(errors.iter().any(|e| e.rule == Rule::DuplicateKey), "{errors:?}");
    }

    #[test]
    fn collects_every_violation_in_document_order() {
        let models = models();
        let (_d, s) = store();
        let body = json!({
            "example:device": {
                "name": 17,
                "interfaces": [{"name": "eth0", "enabled": "yes"}],
                "bogus": {}
            }
        });
        let errors = verify_at_root(&models, &s, &body);
        let rules: Vec<Rule> = errors.iter().map(|e| e.rule).collect();
        assert_eq!(
            rules,
            vec![Rule::BadLexical, Rule::BadLexical, Rule::UnknownNode]
        );
        let paths: Vec<&str> = errors.iter().map(|e| e.json_path.as_str()).collect();
        assert_eq!(
            paths,
            vec![
                "/example:device/name",
                "/example:device/interfaces[0]/enabled",
                "/example:device/bogus"
            ]
        );
    }

    #[test]
    fn planted_duplicate_matches_brute_force_scan() {
        let models = models();
        let module = models.module("example").unwrap();
        let list = module.body.child("device").unwrap().child("interfaces").unwrap();
        let mut state = 0x1234_5678_9abc_def1u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..50 {
            let n = 3 + (next() % 20) as usize;
            let mut items: Vec<Value> = (0..n)
                .map(|i| json!({"name": format!("if{i}"), "enabled": true}))
                .collect();
            let dup_from = (next() % n as u64) as usize;
            let mut dup_to = (next() % n as u64) as usize;
            if dup_to == dup_from {
                dup_to = (dup_to + 1) % n;
            }
            items[dup_to] = items[dup_from].clone();
            let refs: Vec<&Value> = items.iter().collect();
            let errors = verify_list_uniqueness(list, &refs, &[], "/x");

            // brute force: count items whose key equals an earlier item's key
            let mut expected = 0;
            for i in 0..n {
                for j in 0..i {
                    if items[i]["name"] == items[j]["name"] {
                        expected += 1;
                        break;
                    }
                }
            }
            assert_eq!(errors.len(), expected);
            assert!(errors.iter().all(|e| e.rule == Rule::DuplicateKey));
        }
    }

    #[test]
    fn leaf_list_duplicates_are_flagged() {
        let models = models();
        let (_d, s) = store();
        let body = json!({
            "example:device": {"applications": ["a", "b", "a"]}
        });
        let errors = verify_at_root(&models, &s, &body);
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].rule, Rule::DuplicateKey);
        assert_eq!(errors[0].json_path, "/example:device/applications[2]");
    }
}
