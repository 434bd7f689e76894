//! Type specifications: built-in bases, restrictions and resolution of
//! typedef chains into fully merged specs.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{YangError, YangModule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseType {
    String,
    Boolean,
    Int8,
    Int16,
    Int32,
    Int64,
    Uint8,
    Uint16,
    Uint32,
    Uint64,
    Decimal64,
    Enumeration,
}

impl BaseType {
    pub fn from_name(name: &str) -> Option<BaseType> {
        Some(match name {
            "string" => BaseType::String,
            "boolean" => BaseType::Boolean,
            "int8" => BaseType::Int8,
            "int16" => BaseType::Int16,
            "int32" => BaseType::Int32,
            "int64" => BaseType::Int64,
            "uint8" => BaseType::Uint8,
            "uint16" => BaseType::Uint16,
            "uint32" => BaseType::Uint32,
            "uint64" => BaseType::Uint64,
            "decimal64" => BaseType::Decimal64,
            "enumeration" => BaseType::Enumeration,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaseType::String => "string",
            BaseType::Boolean => "boolean",
            BaseType::Int8 => "int8",
            BaseType::Int16 => "int16",
            BaseType::Int32 => "int32",
            BaseType::Int64 => "int64",
            BaseType::Uint8 => "uint8",
            BaseType::Uint16 => "uint16",
            BaseType::Uint32 => "uint32",
            BaseType::Uint64 => "uint64",
            BaseType::Decimal64 => "decimal64",
            BaseType::Enumeration => "enumeration",
        }
    }

    /// Value bounds for the integer bases.
    pub fn int_bounds(&self) -> Option<(i128, i128)> {
        Some(match self {
            BaseType::Int8 => (i8::MIN as i128, i8::MAX as i128),
            BaseType::Int16 => (i16::MIN as i128, i16::MAX as i128),
            BaseType::Int32 => (i32::MIN as i128, i32::MAX as i128),
            BaseType::Int64 => (i64::MIN as i128, i64::MAX as i128),
            BaseType::Uint8 => (0, u8::MAX as i128),
            BaseType::Uint16 => (0, u16::MAX as i128),
            BaseType::Uint32 => (0, u32::MAX as i128),
            BaseType::Uint64 => (0, u64::MAX as i128),
            _ => return None,
        })
    }

    pub fn is_integer(&self) -> bool {
        self.int_bounds().is_some()
    }

    /// The 64-bit bases travel as JSON strings per the RFC 7951 encoding.
    pub fn encodes_as_string(&self) -> bool {
        matches!(
            self,
            BaseType::Int64 | BaseType::Uint64 | BaseType::Decimal64
        )
    }
}

/// One bound of a declared `range` part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangeBound {
    Int(i128),
    Dec(f64),
    Min,
    Max,
}

/// Restrictions as written on a `type` use, before resolution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Restrictions {
    pub patterns: Vec<String>,
    pub range: Option<Vec<(RangeBound, RangeBound)>>,
    pub length: Option<Vec<(u64, u64)>>,
    pub enums: Vec<String>,
    pub fraction_digits: Option<u8>,
}

impl Restrictions {
    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
            && self.range.is_none()
            && self.length.is_none()
            && self.enums.is_empty()
            && self.fraction_digits.is_none()
    }
}

/// Reference to a type: a built-in name or a (possibly prefixed) typedef
/// name, plus any inline restrictions.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeUse {
    pub name: String,
    pub restrictions: Restrictions,
}

impl TypeUse {
    pub fn plain(name: impl Into<String>) -> Self {
        TypeUse {
            name: name.into(),
            restrictions: Restrictions::default(),
        }
    }
}

/// Declared value ranges, resolved against the base type.
#[derive(Debug, Clone, PartialEq)]
pub enum RangeSet {
    Int(Vec<(i128, i128)>),
    Dec(Vec<(f64, f64)>),
}

/// A fully resolved type: base plus all restrictions merged along the
/// typedef chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeSpec {
    pub base: BaseType,
    pub patterns: Vec<String>,
    pub range: Option<RangeSet>,
    pub length: Option<Vec<(u64, u64)>>,
    pub enums: Vec<String>,
    pub fraction_digits: Option<u8>,
}

impl TypeSpec {
    pub fn builtin(base: BaseType) -> Self {
        TypeSpec {
            base,
            patterns: Vec::new(),
            range: None,
            length: None,
            enums: Vec::new(),
            fraction_digits: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum TypeError {
    #[error("unknown type '{0}'")]
    Unknown(String),
    #[error("cyclic typedef chain through '{0}'")]
    Cycle(String),
    #[error("restriction not permitted for base {base}: {what}")]
    BadRestriction { base: &'static str, what: String },
    #[error("decimal64 requires fraction-digits")]
    MissingFractionDigits,
}

/// Resolve a type use against a table of already resolved typedefs.
pub fn resolve_type(
    typedefs: &BTreeMap<String, TypeSpec>,
    type_use: &TypeUse,
) -> Result<TypeSpec, TypeError> {
    let spec = match BaseType::from_name(&type_use.name) {
        Some(base) => TypeSpec::builtin(base),
        None => typedefs
            .get(&type_use.name)
            .cloned()
            .ok_or_else(|| TypeError::Unknown(type_use.name.clone()))?,
    };
    merge(spec, &type_use.restrictions)
}

/// Resolve every typedef of a module (and typedefs of its imports, keyed
/// as `prefix:name`) into fully merged specs.
pub fn resolve_typedefs(
    module: &YangModule,
    imported: &[YangModule],
) -> Result<BTreeMap<String, TypeSpec>, YangError> {
    let mut table = BTreeMap::new();
    for import in &module.imports {
        if import.module == super::EXTENSION_MODULE {
            continue;
        }
        let Some(dep) = imported.iter().find(|m| m.name == import.module) else {
            continue;
        };
        let dep_table = resolve_typedefs(dep, imported)?;
        for (name, spec) in dep_table {
            // imported modules may themselves key prefixed entries; only
            // plain names are re-exported under this module's prefix
            if !name.contains(':') {
                table.insert(format!("{}:{}", import.prefix, name), spec);
            }
        }
    }
    resolve_local(module, &mut table)?;
    Ok(table)
}

fn resolve_local(
    module: &YangModule,
    table: &mut BTreeMap<String, TypeSpec>,
) -> Result<(), YangError> {
    // typedefs may reference each other in any order; iterate until fixed
    let mut pending: Vec<&(String, TypeUse)> = module.typedefs.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        pending.retain(|(name, type_use)| {
            if BaseType::from_name(&type_use.name).is_some()
                || table.contains_key(&type_use.name)
            {
                match resolve_type(table, type_use) {
                    Ok(spec) => {
                        table.insert(name.clone(), spec);
                        false
                    }
                    Err(_) => true,
                }
            } else {
                true
            }
        });
        if pending.len() == before {
            let (name, type_use) = pending[0];
            let reason = if module.typedefs.iter().any(|(n, _)| n == &type_use.name) {
                format!("cyclic or invalid typedef '{name}'")
            } else {
                return Err(YangError::UnknownType {
                    name: type_use.name.clone(),
                    line: 0,
                });
            };
            return Err(YangError::syntax(0, reason));
        }
    }
    Ok(())
}

fn merge(mut spec: TypeSpec, restrictions: &Restrictions) -> Result<TypeSpec, TypeError> {
    if !restrictions.patterns.is_empty() {
        if spec.base != BaseType::String {
            return Err(TypeError::BadRestriction {
                base: spec.base.name(),
                what: "pattern".into(),
            });
        }
        spec.patterns.extend(restrictions.patterns.iter().cloned());
    }
    if let Some(length) = &restrictions.length {
        if spec.base != BaseType::String {
            return Err(TypeError::BadRestriction {
                base: spec.base.name(),
                what: "length".into(),
            });
        }
        spec.length = Some(match spec.length.take() {
            None => length.clone(),
            Some(prev) => intersect_u64(&prev, length),
        });
    }
    if !restrictions.enums.is_empty() {
        if spec.base != BaseType::Enumeration {
            return Err(TypeError::BadRestriction {
                base: spec.base.name(),
                what: "enum".into(),
            });
        }
        spec.enums = restrictions.enums.clone();
    }
    if let Some(fd) = restrictions.fraction_digits {
        if spec.base != BaseType::Decimal64 {
            return Err(TypeError::BadRestriction {
                base: spec.base.name(),
                what: "fraction-digits".into(),
            });
        }
        spec.fraction_digits = Some(fd);
    }
    if let Some(range) = &restrictions.range {
        spec.range = Some(resolve_range(&spec, range)?);
    }
    if spec.base == BaseType::Decimal64 && spec.fraction_digits.is_none() {
        return Err(TypeError::MissingFractionDigits);
    }
    Ok(spec)
}

fn resolve_range(
    spec: &TypeSpec,
    declared: &[(RangeBound, RangeBound)],
) -> Result<RangeSet, TypeError> {
    if let Some((base_min, base_max)) = spec.base.int_bounds() {
        let (eff_min, eff_max) = match &spec.range {
            Some(RangeSet::Int(prev)) => (
                prev.iter().map(|r| r.0).min().unwrap_or(base_min),
                prev.iter().map(|r| r.1).max().unwrap_or(base_max),
            ),
            _ => (base_min, base_max),
        };
        let mut resolved = Vec::new();
        for (lo, hi) in declared {
            let lo = int_bound(*lo, eff_min)?;
            let hi = int_bound(*hi, eff_max)?;
            resolved.push((lo, hi));
        }
        // the most restrictive range wins: intersect with the prior one
        let merged = match &spec.range {
            Some(RangeSet::Int(prev)) => intersect_i128(prev, &resolved),
            _ => resolved,
        };
        Ok(RangeSet::Int(merged))
    } else if spec.base == BaseType::Decimal64 {
        let fd = spec.fraction_digits.ok_or(TypeError::MissingFractionDigits)?;
        let scale = 10f64.powi(fd as i32);
        let abs = (i64::MAX as f64) / scale;
        let (eff_min, eff_max) = match &spec.range {
            Some(RangeSet::Dec(prev)) => (
                prev.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
                prev.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max),
            ),
            _ => (-abs, abs),
        };
        let mut resolved = Vec::new();
        for (lo, hi) in declared {
            resolved.push((dec_bound(*lo, eff_min)?, dec_bound(*hi, eff_max)?));
        }
        let merged = match &spec.range {
            Some(RangeSet::Dec(prev)) => intersect_f64(prev, &resolved),
            _ => resolved,
        };
        Ok(RangeSet::Dec(merged))
    } else {
        Err(TypeError::BadRestriction {
            base: spec.base.name(),
            what: "range".into(),
        })
    }
}

fn int_bound(bound: RangeBound, fallback: i128) -> Result<i128, TypeError> {
    match bound {
        RangeBound::Int(v) => Ok(v),
        RangeBound::Min | RangeBound::Max => Ok(fallback),
        RangeBound::Dec(_) => Err(TypeError::BadRestriction {
            base: "integer",
            what: "decimal range bound".into(),
        }),
    }
}

fn dec_bound(bound: RangeBound, fallback: f64) -> Result<f64, TypeError> {
    match bound {
        RangeBound::Int(v) => Ok(v as f64),
        RangeBound::Dec(v) => Ok(v),
        RangeBound::Min | RangeBound::Max => Ok(fallback),
    }
}

fn intersect_i128(a: &[(i128, i128)], b: &[(i128, i128)]) -> Vec<(i128, i128)> {
    let mut out = Vec::new();
    for &(alo, ahi) in a {
        for &(blo, bhi) in b {
            let lo = alo.max(blo);
            let hi = ahi.min(bhi);
            if lo <= hi {
                out.push((lo, hi));
            }
        }
    }
    out
}

fn intersect_u64(a: &[(u64, u64)], b: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for &(alo, ahi) in a {
        for &(blo, bhi) in b {
            let lo = alo.max(blo);
            let hi = ahi.min(bhi);
            if lo <= hi {
                out.push((lo, hi));
            }
        }
    }
    out
}

fn intersect_f64(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(alo, ahi) in a {
        for &(blo, bhi) in b {
            let lo = alo.max(blo);
            let hi = ahi.min(bhi);
            if lo <= hi {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// Membership check for declared ranges.
pub fn int_in_range(range: &RangeSet, value: i128) -> bool {
    match range {
        RangeSet::Int(intervals) => intervals.iter().any(|&(lo, hi)| value >= lo && value <= hi),
        RangeSet::Dec(intervals) => {
            let v = value as f64;
            intervals.iter().any(|&(lo, hi)| v >= lo && v <= hi)
        }
    }
}

pub fn dec_in_range(range: &RangeSet, value: f64) -> bool {
    match range {
        RangeSet::Int(intervals) => intervals
            .iter()
            .any(|&(lo, hi)| value >= lo as f64 && value <= hi as f64),
        RangeSet::Dec(intervals) => intervals.iter().any(|&(lo, hi)| value >= lo && value <= hi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> BTreeMap<String, TypeSpec> {
        BTreeMap::new()
    }

    #[test]
    fn boolean_resolves_plain() {
        let spec = resolve_type(&table(), &TypeUse::plain("boolean")).unwrap();
        assert_eq!(spec.base, BaseType::Boolean);
        assert!(spec.range.is_none() && spec.patterns.is_empty());
    }

    #[test]
    fn percent_typedef_keeps_range() {
        let mut t = table();
        let percent = resolve_type(
            &t,
            &TypeUse {
                name: "uint8".into(),
                restrictions: Restrictions {
                    range: Some(vec![(RangeBound::Int(0), RangeBound::Int(100))]),
                    ..Default::default()
                },
            },
        )
        .unwrap();
        assert_eq!(percent.base, BaseType::Uint8);
        assert_eq!(percent.range, Some(RangeSet::Int(vec![(0, 100)])));
        t.insert("percent".into(), percent);

        let spec = resolve_type(&t, &TypeUse::plain("percent")).unwrap();
        assert_eq!(spec.base, BaseType::Uint8);
        assert!(int_in_range(spec.range.as_ref().unwrap(), 100));
        assert!(!int_in_range(spec.range.as_ref().unwrap(), 101));
    }

    #[test]
    fn chained_ranges_intersect() {
        // a -> b -> uint16, each narrowing
        let mut t = table();
        let b = resolve_type(
            &t,
            &TypeUse {
                name: "uint16".into(),
                restrictions: Restrictions {
                    range: Some(vec![(RangeBound::Int(10), RangeBound::Int(1000))]),
                    ..Default::default()
                },
            },
        )
        .unwrap();
        t.insert("b".into(), b);
        let a = resolve_type(
            &t,
            &TypeUse {
                name: "b".into(),
                restrictions: Restrictions {
                    range: Some(vec![(RangeBound::Int(100), RangeBound::Int(5000))]),
                    ..Default::default()
                },
            },
        )
        .unwrap();
        t.insert("a".into(), a.clone());

        // brute force: every accepted value must be in all declared ranges
        let range = a.range.as_ref().unwrap();
        for v in 0..=6000i128 {
            let accepted = int_in_range(range, v);
            let expected = (10..=1000).contains(&v) && (100..=5000).contains(&v);
            assert_eq!(accepted, expected, "value {v}");
        }
    }

    #[test]
    fn min_max_keywords_resolve_to_base_bounds() {
        let spec = resolve_type(
            &table(),
            &TypeUse {
                name: "int8".into(),
                restrictions: Restrictions {
                    range: Some(vec![(RangeBound::Min, RangeBound::Int(0))]),
                    ..Default::default()
                },
            },
        )
        .unwrap();
        assert_eq!(spec.range, Some(RangeSet::Int(vec![(-128, 0)])));
    }

    #[test]
    fn pattern_on_integer_is_rejected() {
        let err = resolve_type(
            &table(),
            &TypeUse {
                name: "uint8".into(),
                restrictions: Restrictions {
                    patterns: vec!["[a-z]+".into()],
                    ..Default::default()
                },
            },
        )
        .unwrap_err();
        assert!(matches!(err, TypeError::BadRestriction { .. }));
    }

    #[test]
    fn unknown_type_errors() {
        let err = resolve_type(&table(), &TypeUse::plain("nope")).unwrap_err();
        assert!(matches!(err, TypeError::Unknown(_)));
    }

    #[test]
    fn decimal64_needs_fraction_digits() {
        let err = resolve_type(&table(), &TypeUse::plain("decimal64")).unwrap_err();
        assert!(matches!(err, TypeError::MissingFractionDigits));
    }
}
