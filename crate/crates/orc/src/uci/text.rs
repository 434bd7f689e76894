//! Line-oriented UCI text grammar: parser and canonical serializer.

use super::{
    is_identifier, is_type_identifier, EntryKind, UciDocument, UciEntry, UciError, UciSection,
};

/// Parse one UCI package file.
///
/// Comment lines (first non-blank character '#') are discarded. Values may
/// be single-quoted, double-quoted or bare; they are stored unquoted.
pub fn parse_uci(package_name: &str, text: &str) -> Result<UciDocument, UciError> {
    let mut doc = UciDocument::new(package_name);

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = Tokenizer::new(line, lineno);
        let keyword = toks.next_token()?.ok_or_else(|| {
            UciError::syntax(lineno, "expected config, option or list")
        })?;
        match keyword.text.as_str() {
            "config" => {
                let ty = toks.require("section type")?;
                if !is_type_identifier(&ty.text) {
                    return Err(UciError::syntax(
                        lineno,
                        format!("invalid section type '{}'", ty.text),
                    ));
                }
                let name = match toks.next_token()? {
                    Some(tok) => {
                        if !is_identifier(&tok.text) {
                            return Err(UciError::syntax(
                                lineno,
                                format!("invalid section name '{}'", tok.text),
                            ));
                        }
                        Some(tok.text)
                    }
                    None => None,
                };
                toks.expect_end()?;
                if let Some(n) = &name {
                    if doc.find_named(&ty.text, n).is_some() {
                        return Err(UciError::syntax(
                            lineno,
                            format!("duplicate section '{}' of type '{}'", n, ty.text),
                        ));
                    }
                }
                doc.sections.push(UciSection::new(ty.text, name));
            }
            "option" | "list" => {
                let kind = if keyword.text == "option" {
                    EntryKind::Option
                } else {
                    EntryKind::List
                };
                let name = toks.require("entry name")?;
                if !is_identifier(&name.text) {
                    return Err(UciError::syntax(
                        lineno,
                        format!("invalid entry name '{}'", name.text),
                    ));
                }
                let value = toks.require("value")?;
                toks.expect_end()?;
                let section = doc.sections.last_mut().ok_or_else(|| {
                    UciError::syntax(lineno, "entry outside of a config section")
                })?;
                if kind == EntryKind::Option
                    && section
                        .entries
                        .iter()
                        .any(|e| e.kind == EntryKind::Option && e.name == name.text)
                {
                    return Err(UciError::syntax(
                        lineno,
                        format!("duplicate option '{}'", name.text),
                    ));
                }
                if value.text.is_empty() {
                    return Err(UciError::syntax(lineno, "empty value"));
                }
                section.entries.push(UciEntry {
                    kind,
                    name: name.text,
                    value: value.text,
                });
            }
            other => {
                return Err(UciError::syntax(
                    lineno,
                    format!("unexpected token '{other}'"),
                ));
            }
        }
    }
    Ok(doc)
}

/// Serialize to the canonical form: names and values single-quoted, entries
/// tab-indented, one blank line after each section.
pub fn serialize_uci(doc: &UciDocument) -> String {
    let mut out = String::new();
    for section in &doc.sections {
        out.push_str("config ");
        out.push_str(&section.section_type);
        if let Some(name) = &section.name {
            out.push_str(" '");
            out.push_str(name);
            out.push('\'');
        }
        out.push('\n');
        for entry in &section.entries {
            out.push('\t');
            out.push_str(match entry.kind {
                EntryKind::Option => "option ",
                EntryKind::List => "list ",
            });
            out.push_str(&entry.name);
            out.push_str(" '");
            out.push_str(&entry.value);
            out.push_str("'\n");
        }
        out.push('\n');
    }
    out
}

struct Token {
    text: String,
}

struct Tokenizer<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(line: &'a str, lineno: usize) -> Self {
        Tokenizer {
            rest: line,
            line: lineno,
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, UciError> {
        self.rest = self.rest.trim_start();
        if self.rest.is_empty() {
            return Ok(None);
        }
        let mut chars = self.rest.char_indices();
        let (_, first) = chars.next().unwrap();
        if first == '\'' || first == '"' {
            // quoted token runs to the matching quote
            let body_start = first.len_utf8();
            match self.rest[body_start..].find(first) {
                Some(end) => {
                    let text = self.rest[body_start..body_start + end].to_string();
                    self.rest = &self.rest[body_start + end + first.len_utf8()..];
                    Ok(Some(Token { text }))
                }
                None => Err(UciError::syntax(self.line, "unterminated quoted value")),
            }
        } else {
            let end = self
                .rest
                .find(|c: char| c.is_whitespace())
                .unwrap_or(self.rest.len());
            let text = self.rest[..end].to_string();
            self.rest = &self.rest[end..];
            Ok(Some(Token { text }))
        }
    }

    fn require(&mut self, what: &str) -> Result<Token, UciError> {
        self.next_token()?
            .ok_or_else(|| UciError::syntax(self.line, format!("missing {what}")))
    }

    fn expect_end(&mut self) -> Result<(), UciError> {
        match self.next_token()? {
            None => Ok(()),
            Some(tok) => Err(UciError::syntax(
                self.line,
                format!("unexpected trailing token '{}'", tok.text),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"config system
    option hostname "OpenWrt"
    option timezone "UTC"
    # ...

config interface "en0"
    option ip6addr "2001:db8::42/64"
    option ip6gw   "2001:db8::1"
    # ...

config vnstat
    list interface "en0"
    list interface "en1"
    # ...
"#;

    #[test]
    fn parses_uci_example_sections() {
        let doc = parse_uci("test", FIG1).unwrap();
        assert_eq!(doc.sections.len(), 3);

        let system = &doc.sections[0];
        assert_eq!(system.section_type, "system");
        assert_eq!(system.name, None);
        assert_eq!(system.entries.len(), 2);
        assert_eq!(system.option_value("hostname"), Some("OpenWrt"));

        let iface = &doc.sections[1];
        assert_eq!(iface.section_type, "interface");
        assert_eq!(iface.name.as_deref(), Some("en0"));
        assert_eq!(iface.option_value("ip6gw"), Some("2001:db8::1"));

        let vnstat = &doc.sections[2];
        assert_eq!(vnstat.name, None);
        let values: Vec<_> = vnstat.list_values("interface").collect();
        assert_eq!(values, vec!["en0", "en1"]);
    }

    #[test]
    fn empty_input_gives_empty_document() {
        let doc = parse_uci("p", "").unwrap();
        assert!(doc.sections.is_empty());
    }

    #[test]
    fn minimal_document_serialization() {
        let mut doc = UciDocument::new("p");
        doc.sections.push(UciSection::new("system", None));
        assert_eq!(serialize_uci(&doc), "config system\n\n");
    }

    #[test]
    fn named_section_option_line() {
        let mut doc = UciDocument::new("p");
        let mut s = UciSection::new("interface", Some("en0".into()));
        s.entries.push(UciEntry {
            kind: EntryKind::Option,
            name: "ip6gw".into(),
            value: "2001:db8::1".into(),
        });
        doc.sections.push(s);
        assert!(serialize_uci(&doc).contains("\toption ip6gw '2001:db8::1'\n"));
    }

    #[test]
    fn fig1_round_trips() {
        let doc = parse_uci("test", FIG1).unwrap();
        let reparsed = parse_uci("test", &serialize_uci(&doc)).unwrap();
        assert_eq!(doc, reparsed);
    }

    #[test]
    fn rejects_bad_keyword() {
        let err = parse_uci("p", "config system\n\tbogus a b\n").unwrap_err();
        assert!(matches!(err, UciError::Syntax { line: 2, .. }));
    }

    #[test]
    fn rejects_missing_value() {
        let err = parse_uci("p", "config system\n\toption hostname\n").unwrap_err();
        assert!(matches!(err, UciError::Syntax { line: 2, .. }));
    }

    #[test]
    fn rejects_invalid_identifier() {
        let err = parse_uci("p", "config system\n\toption host.name 'x'\n").unwrap_err();
        assert!(matches!(err, UciError::Syntax { line: 2, .. }));
    }

    #[test]
    fn rejects_entry_outside_section() {
        let err = parse_uci("p", "option hostname 'x'\n").unwrap_err();
        assert!(matches!(err, UciError::Syntax { line: 1, .. }));
    }

    #[test]
    fn rejects_duplicate_named_section() {
        let err =
            parse_uci("p", "config interface 'a'\n\nconfig interface 'a'\n").unwrap_err();
        assert!(matches!(err, UciError::Syntax { line: 3, .. }));
    }

    #[test]
    fn rejects_duplicate_option() {
        let err =
            parse_uci("p", "config system\n\toption a '1'\n\toption a '2'\n").unwrap_err();
        assert!(matches!(err, UciError::Syntax { line: 3, .. }));
    }

    #[test]
    fn section_type_allows_dash() {
        let doc = parse_uci("p", "config wifi-device 'radio0'\n").unwrap();
        assert_eq!(doc.sections[0].section_type, "wifi-device");
    }

    #[test]
    fn list_name_may_repeat() {
        let doc = parse_uci("p", "config t\n\tlist l 'a'\n\tlist l 'b'\n").unwrap();
        let vals: Vec<_> = doc.sections[0].list_values("l").collect();
        assert_eq!(vals, vec!["a", "b"]);
    }

    #[test]
    fn quoted_value_may_contain_spaces() {
        let doc = parse_uci("p", "config t\n\toption d 'a b  c'\n").unwrap();
        assert_eq!(doc.sections[0].option_value("d"), Some("a b  c"));
    }
}
