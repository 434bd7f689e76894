//! Recursive-descent parser for the YANG subset.
//!
//! The grammar is statement-oriented: `keyword [argument] (';' | '{' ... '}')`.
//! A generic statement tree is built first and then interpreted, so that
//! statements outside the subset are reported uniformly.

use super::types::{RangeBound, Restrictions, TypeUse};
use super::{Import, JinNode, NodeKind, YangError, YangModule};

pub fn parse_yang(text: &str) -> Result<YangModule, YangError> {
    let mut lexer = Lexer::new(text);
    let stmt = parse_statement(&mut lexer)?
        .ok_or_else(|| YangError::syntax(lexer.line, "empty input"))?;
    if let Some(extra) = parse_statement(&mut lexer)? {
        return Err(YangError::syntax(
            extra.line,
            "only one top-level module per source file",
        ));
    }
    if stmt.keyword != "module" {
        return Err(YangError::syntax(
            stmt.line,
            format!("expected 'module', found '{}'", stmt.keyword),
        ));
    }
    interpret_module(stmt)
}

#[derive(Debug)]
struct Stmt {
    keyword: String,
    arg: Option<String>,
    line: usize,
    subs: Vec<Stmt>,
}

impl Stmt {
    fn require_arg(&self) -> Result<&str, YangError> {
        self.arg
            .as_deref()
            .ok_or_else(|| YangError::syntax(self.line, format!("'{}' needs an argument", self.keyword)))
    }
}

// ---------------------------------------------------------------------------
// lexing

#[derive(Debug, PartialEq)]
enum Token {
    Word(String),
    Str(String),
    LBrace,
    RBrace,
    Semi,
    Plus,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    peeked: Option<(Token, usize)>,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            peeked: None,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next();
        if c == Some('\n') {
            self.line += 1;
        }
        c
    }

    fn skip_trivia(&mut self) -> Result<(), YangError> {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') => {
                    let mut probe = self.chars.clone();
                    probe.next();
                    match probe.peek() {
                        Some('/') => {
                            while let Some(c) = self.bump() {
                                if c == '\n' {
                                    break;
                                }
                            }
                        }
                        Some('*') => {
                            let start = self.line;
                            self.bump();
                            self.bump();
                            let mut prev = ' ';
                            loop {
                                match self.bump() {
                                    Some('/') if prev == '*' => break,
                                    Some(c) => prev = c,
                                    None => {
                                        return Err(YangError::syntax(
                                            start,
                                            "unterminated block comment",
                                        ))
                                    }
                                }
                            }
                        }
                        _ => return Ok(()),
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<(Token, usize)>, YangError> {
        if let Some(tok) = self.peeked.take() {
            return Ok(Some(tok));
        }
        self.skip_trivia()?;
        let line = self.line;
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        let tok = match c {
            '{' => {
                self.bump();
                Token::LBrace
            }
            '}' => {
                self.bump();
                Token::RBrace
            }
            ';' => {
                self.bump();
                Token::Semi
            }
            '+' => {
                self.bump();
                Token::Plus
            }
            '"' | '\'' => {
                let quote = c;
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(YangError::syntax(line, "unterminated string")),
                        Some(c) if c == quote => break,
                        Some('\\') if quote == '"' => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some(other) => {
                                // YANG double-quoted strings only define the
                                // four escapes; keep the backslash verbatim
                                s.push('\\');
                                s.push(other);
                            }
                            None => return Err(YangError::syntax(line, "unterminated string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
                Token::Str(s)
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '{' | '}' | ';' | '"' | '\'') {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                if s.is_empty() {
                    return Err(YangError::syntax(line, format!("unexpected character '{c}'")));
                }
                Token::Word(s)
            }
        };
        Ok(Some((tok, line)))
    }

    fn peek_token(&mut self) -> Result<Option<&(Token, usize)>, YangError> {
        if self.peeked.is_none() {
            self.peeked = self.next_token()?;
        }
        Ok(self.peeked.as_ref())
    }
}

fn parse_statement(lexer: &mut Lexer) -> Result<Option<Stmt>, YangError> {
    let Some((tok, line)) = lexer.next_token()? else {
        return Ok(None);
    };
    let keyword = match tok {
        Token::Word(w) => w,
        other => {
            return Err(YangError::syntax(
                line,
                format!("expected a statement keyword, found {other:?}"),
            ))
        }
    };
    // optional argument: a word, or quoted strings joined with '+'
    let arg = match lexer.peek_token()? {
        Some((Token::Word(_), _)) => {
            let Some((Token::Word(w), _)) = lexer.next_token()? else {
                unreachable!()
            };
            Some(w)
        }
        Some((Token::Str(_), _)) => {
            let Some((Token::Str(mut s), _)) = lexer.next_token()? else {
                unreachable!()
            };
            while matches!(lexer.peek_token()?, Some((Token::Plus, _))) {
                lexer.next_token()?;
                match lexer.next_token()? {
                    Some((Token::Str(next), _)) => s.push_str(&next),
                    other => {
                        return Err(YangError::syntax(
                            line,
                            format!("expected string after '+', found {other:?}"),
                        ))
                    }
                }
            }
            Some(s)
        }
        _ => None,
    };
    let mut subs = Vec::new();
    match lexer.next_token()? {
        Some((Token::Semi, _)) => {}
        Some((Token::LBrace, _)) => loop {
            match lexer.peek_token()? {
                Some((Token::RBrace, _)) => {
                    lexer.next_token()?;
                    break;
                }
                None => return Err(YangError::syntax(line, "unterminated block")),
                _ => {
                    if let Some(sub) = parse_statement(lexer)? {
                        subs.push(sub);
                    }
                }
            }
        },
        other => {
            return Err(YangError::syntax(
                line,
                format!("expected ';' or '{{' after '{keyword}', found {other:?}"),
            ))
        }
    }
    Ok(Some(Stmt {
        keyword,
        arg,
        line,
        subs,
    }))
}

// ---------------------------------------------------------------------------
// interpretation

fn interpret_module(stmt: Stmt) -> Result<YangModule, YangError> {
    let name = stmt.require_arg()?.to_string();
    let mut module = YangModule {
        name: name.clone(),
        namespace: String::new(),
        prefix: String::new(),
        imports: Vec::new(),
        typedefs: Vec::new(),
        body: JinNode::new(NodeKind::Module, name, stmt.line),
    };

    // imports must be known before annotation statements can be recognized,
    // so collect them in a first pass
    for sub in &stmt.subs {
        if sub.keyword == "import" {
            let m = sub.require_arg()?.to_string();
            let prefix = sub
                .subs
                .iter()
                .find(|s| s.keyword == "prefix")
                .ok_or_else(|| YangError::syntax(sub.line, "import without prefix"))?
                .require_arg()?
                .to_string();
            module.imports.push(Import { module: m, prefix });
        }
    }
    let ext_prefix = module.extension_prefix().map(str::to_string);

    let mut body = std::mem::replace(&mut module.body, JinNode::new(NodeKind::Module, "", 0));
    for sub in stmt.subs {
        match sub.keyword.as_str() {
            "namespace" => module.namespace = sub.require_arg()?.to_string(),
            "prefix" => module.prefix = sub.require_arg()?.to_string(),
            "import" => {}
            "typedef" => {
                let name = sub.require_arg()?.to_string();
                let ty = sub
                    .subs
                    .iter()
                    .find(|s| s.keyword == "type")
                    .ok_or_else(|| YangError::syntax(sub.line, "typedef without type"))?;
                module.typedefs.push((name, interpret_type(ty)?));
            }
            "description" => {}
            "extension" => {
                // extension definitions (as in the shipped orc-uci module)
                // are accepted; only argument/description substatements
                for s in &sub.subs {
                    if !matches!(s.keyword.as_str(), "argument" | "description") {
                        return Err(YangError::UnsupportedStatement {
                            name: s.keyword.clone(),
                            line: s.line,
                        });
                    }
                }
            }
            "container" | "list" | "leaf" | "leaf-list" => {
                body.children.push(interpret_data_node(sub, ext_prefix.as_deref())?);
            }
            other => {
                if !apply_annotation(&mut body, &sub, ext_prefix.as_deref())? {
                    return Err(YangError::UnsupportedStatement {
                        name: other.to_string(),
                        line: sub.line,
                    });
                }
            }
        }
    }
    module.body = body;
    Ok(module)
}

fn interpret_data_node(stmt: Stmt, ext_prefix: Option<&str>) -> Result<JinNode, YangError> {
    let kind = match stmt.keyword.as_str() {
        "container" => NodeKind::Container,
        "list" => NodeKind::List,
        "leaf" => NodeKind::Leaf,
        "leaf-list" => NodeKind::LeafList,
        _ => unreachable!(),
    };
    let name = stmt.require_arg()?.to_string();
    let mut node = JinNode::new(kind, name, stmt.line);

    for sub in stmt.subs {
        match sub.keyword.as_str() {
            "container" | "list" | "leaf" | "leaf-list" if !kind.is_leafish() => {
                node.children.push(interpret_data_node(sub, ext_prefix)?);
            }
            "type" if kind.is_leafish() => {
                node.type_use = Some(interpret_type(&sub)?);
            }
            "mandatory" if kind == NodeKind::Leaf => {
                node.mandatory = match sub.require_arg()? {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(YangError::syntax(
                            sub.line,
                            format!("mandatory must be true or false, found '{other}'"),
                        ))
                    }
                };
            }
            "key" if kind == NodeKind::List => {
                node.keys = sub
                    .require_arg()?
                    .split_whitespace()
                    .map(str::to_string)
                    .collect();
            }
            "unique" if kind == NodeKind::List => {
                node.unique.push(
                    sub.require_arg()?
                        .split_whitespace()
                        .map(str::to_string)
                        .collect(),
                );
            }
            "description" => {}
            other => {
                if !apply_annotation(&mut node, &sub, ext_prefix)? {
                    return Err(YangError::UnsupportedStatement {
                        name: other.to_string(),
                        line: sub.line,
                    });
                }
            }
        }
    }
    if kind.is_leafish() && node.type_use.is_none() {
        return Err(YangError::syntax(
            node.line,
            format!("{} '{}' has no type", kind.as_str(), node.name),
        ));
    }
    Ok(node)
}

/// Returns true when the statement was one of the five UCI annotations
/// under the extension prefix.
fn apply_annotation(
    node: &mut JinNode,
    stmt: &Stmt,
    ext_prefix: Option<&str>,
) -> Result<bool, YangError> {
    let Some((prefix, local)) = stmt.keyword.split_once(':') else {
        return Ok(false);
    };
    if Some(prefix) != ext_prefix {
        return Ok(false);
    }
    let arg = stmt.require_arg()?.to_string();
    match local {
        "package" => node.uci.package = Some(arg),
        "section" => node.uci.section = Some(arg),
        "section-name" => node.uci.section_name = Some(arg),
        "option" => node.uci.option = Some(arg),
        "leaf-as-name" => node.uci.leaf_as_name = Some(arg),
        other => {
            return Err(YangError::UnsupportedStatement {
                name: format!("{prefix}:{other}"),
                line: stmt.line,
            })
        }
    }
    Ok(true)
}

fn interpret_type(stmt: &Stmt) -> Result<TypeUse, YangError> {
    let name = stmt.require_arg()?.to_string();
    let mut restrictions = Restrictions::default();
    for sub in &stmt.subs {
        match sub.keyword.as_str() {
            "pattern" => restrictions.patterns.push(sub.require_arg()?.to_string()),
            "range" => {
                restrictions.range = Some(parse_range_arg(sub.require_arg()?, sub.line)?);
            }
            "length" => {
                restrictions.length = Some(parse_length_arg(sub.require_arg()?, sub.line)?);
            }
            "enum" => {
                for s in &sub.subs {
                    if s.keyword != "description" {
                        return Err(YangError::UnsupportedStatement {
                            name: s.keyword.clone(),
                            line: s.line,
                        });
                    }
                }
                restrictions.enums.push(sub.require_arg()?.to_string());
            }
            "fraction-digits" => {
                let fd: u8 = sub.require_arg()?.parse().map_err(|_| {
                    YangError::syntax(sub.line, "fraction-digits must be a small integer")
                })?;
                if !(1..=18).contains(&fd) {
                    return Err(YangError::syntax(
                        sub.line,
                        "fraction-digits must be between 1 and 18",
                    ));
                }
                restrictions.fraction_digits = Some(fd);
            }
            "description" => {}
            other => {
                return Err(YangError::UnsupportedStatement {
                    name: other.to_string(),
                    line: sub.line,
                })
            }
        }
    }
    Ok(TypeUse { name, restrictions })
}

fn parse_range_arg(arg: &str, line: usize) -> Result<Vec<(RangeBound, RangeBound)>, YangError> {
    let mut parts = Vec::new();
    for part in arg.split('|') {
        let part = part.trim();
        let (lo, hi) = match part.split_once("..") {
            Some((lo, hi)) => (parse_bound(lo.trim(), line)?, parse_bound(hi.trim(), line)?),
            None => {
                let v = parse_bound(part, line)?;
                (v, v)
            }
        };
        parts.push((lo, hi));
    }
    if parts.is_empty() {
        return Err(YangError::syntax(line, "empty range"));
    }
    Ok(parts)
}

fn parse_bound(s: &str, line: usize) -> Result<RangeBound, YangError> {
    match s {
        "min" => Ok(RangeBound::Min),
        "max" => Ok(RangeBound::Max),
        _ => {
            if let Ok(v) = s.parse::<i128>() {
                Ok(RangeBound::Int(v))
            } else if let Ok(v) = s.parse::<f64>() {
                Ok(RangeBound::Dec(v))
            } else {
                Err(YangError::syntax(line, format!("bad range bound '{s}'")))
            }
        }
    }
}

fn parse_length_arg(arg: &str, line: usize) -> Result<Vec<(u64, u64)>, YangError> {
    let mut parts = Vec::new();
    for part in arg.split('|') {
        let part = part.trim();
        let bound = |s: &str| -> Result<u64, YangError> {
            match s {
                "min" => Ok(0),
                "max" => Ok(u64::MAX),
                _ => s
                    .parse()
                    .map_err(|_| YangError::syntax(line, format!("bad length bound '{s}'"))),
            }
        };
        let (lo, hi) = match part.split_once("..") {
            Some((lo, hi)) => (bound(lo.trim())?, bound(hi.trim())?),
            None => {
                let v = bound(part)?;
                (v, v)
            }
        };
        parts.push((lo, hi));
    }
    if parts.is_empty() {
        return Err(YangError::syntax(line, "empty length"));
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG3: &str = r#"
module example {
  namespace "urn:example:restconf-example";
  prefix ex;
  import orc-uci { prefix uci; }

  uci:package "example";
  container device {
    uci:section "device";
    uci:section-name "device";
    leaf enabled {
      uci:option "enabled";
      type boolean;
    }
    list interface {
      uci:section "interface";
      uci:leaf-as-name "name";
      key "name";
      leaf name { type string; }
    }
  }
}
"#;

    #[test]
    fn parses_annotated_example_module() {
        let module = parse_yang(FIG3).unwrap();
        assert_eq!(module.name, "example");
        assert_eq!(module.body.uci.package.as_deref(), Some("example"));

        let device = module.body.child("device").unwrap();
        assert_eq!(device.kind, NodeKind::Container);
        assert_eq!(device.uci.section.as_deref(), Some("device"));
        assert_eq!(device.uci.section_name.as_deref(), Some("device"));

        let iface = device.child("interface").unwrap();
        assert_eq!(iface.kind, NodeKind::List);
        assert_eq!(iface.uci.section.as_deref(), Some("interface"));
        assert_eq!(iface.uci.leaf_as_name.as_deref(), Some("name"));
        assert_eq!(iface.keys, vec!["name"]);

        let enabled = device.child("enabled").unwrap();
        assert_eq!(enabled.kind, NodeKind::Leaf);
        assert_eq!(enabled.uci.option.as_deref(), Some("enabled"));
        assert_eq!(enabled.type_use.as_ref().unwrap().name, "boolean");
    }

    #[test]
    fn empty_module_body() {
        let module = parse_yang("module m { namespace \"urn:m\"; prefix m; }").unwrap();
        assert!(module.body.children.is_empty());
    }

    #[test]
    fn grouping_is_unsupported() {
        let err = parse_yang("module m { prefix m; grouping g { leaf l { type string; } } }")
            .unwrap_err();
        assert!(matches!(err, YangError::UnsupportedStatement { ref name, .. } if name == "grouping"));
    }

    #[test]
    fn string_concatenation() {
        let module = parse_yang(
            "module m { namespace \"urn:\" + \"m\"; prefix m; }",
        )
        .unwrap();
        assert_eq!(module.namespace, "urn:m");
    }

    #[test]
    fn leaf_without_type_is_an_error() {
        let err = parse_yang("module m { prefix m; leaf l { description \"x\"; } }").unwrap_err();
        assert!(matches!(err, YangError::Syntax { .. }));
    }

    #[test]
    fn two_modules_in_one_file_rejected() {
        let err = parse_yang("module a { prefix a; } module b { prefix b; }").unwrap_err();
        assert!(matches!(err, YangError::Syntax { .. }));
    }

    #[test]
    fn type_restrictions_parse() {
        let module = parse_yang(
            r#"module m { prefix m;
                typedef percent { type uint8 { range "0..100"; } }
                leaf l { type string { pattern "[a-z]+"; length "1..8"; } }
                leaf e { type enumeration { enum red; enum blue; } }
                leaf d { type decimal64 { fraction-digits 2; range "0.0..99.5"; } }
            }"#,
        )
        .unwrap();
        let (name, td) = &module.typedefs[0];
        assert_eq!(name, "percent");
        assert_eq!(
            td.restrictions.range,
            Some(vec![(RangeBound::Int(0), RangeBound::Int(100))])
        );
        let l = module.body.child("l").unwrap().type_use.as_ref().unwrap();
        assert_eq!(l.restrictions.patterns, vec!["[a-z]+"]);
        assert_eq!(l.restrictions.length, Some(vec![(1, 8)]));
        let e = module.body.child("e").unwrap().type_use.as_ref().unwrap();
        assert_eq!(e.restrictions.enums, vec!["red", "blue"]);
        let d = module.body.child("d").unwrap().type_use.as_ref().unwrap();
        assert_eq!(d.restrictions.fraction_digits, Some(2));
    }

    #[test]
    fn comments_are_skipped() {
        let module = parse_yang(
            "// leading\nmodule m { /* block\ncomment */ prefix m; // trailing\n }",
        )
        .unwrap();
        assert_eq!(module.prefix, "m");
    }

    #[test]
    fn unknown_prefix_statement_is_unsupported() {
        let err = parse_yang("module m { prefix m; foo:bar \"x\"; }").unwrap_err();
        assert!(matches!(err, YangError::UnsupportedStatement { .. }));
    }
}
