//! Randomized invariants over the UCI grammar and the YANG parser.

use proptest::prelude::*;

use orc::uci::{parse_uci, serialize_uci, EntryKind, UciDocument, UciEntry, UciSection};
use orc::yang::parse_yang;

fn identifier() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,11}"
}

fn section_type() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_-]{0,11}"
}

// anything but single quotes and control characters
fn value() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 _.:/\"@+-]{1,24}"
}

fn entry() -> impl Strategy<Value = (bool, String)> {
    (any::<bool>(), value())
}

prop_compose! {
    fn section()(
        stype in section_type(),
        named in any::<bool>(),
        name in identifier(),
        entries in proptest::collection::vec(entry(), 0..6),
    ) -> UciSection {
        let mut section = UciSection::new(stype, named.then_some(name));
        for (i, (is_list, value)) in entries.into_iter().enumerate() {
            // option names must be unique within a section, list names
            // may repeat; index-derived names keep options distinct
            let (kind, name) = if is_list {
                (EntryKind::List, format!("l{}", i % 3))
            } else {
                (EntryKind::Option, format!("o{i}"))
            };
            section.entries.push(UciEntry { kind, name, value });
        }
        section
    }
}

prop_compose! {
    fn document()(
        package in identifier(),
        mut sections in proptest::collection::vec(section(), 0..8),
    ) -> UciDocument {
        // (type, name) pairs of named sections must be unique
        for (i, section) in sections.iter_mut().enumerate() {
            if let Some(name) = &mut section.name {
                *name = format!("{name}_{i}");
            }
        }
        let mut doc = UciDocument::new(package);
        doc.sections = sections;
        doc
    }
}

proptest! {
    #[test]
    fn uci_serialize_parse_is_identity(doc in document()) {
        let text = serialize_uci(&doc);
        let parsed = parse_uci(&doc.package_name, &text).unwrap();
        prop_assert_eq!(parsed, doc);
    }

    #[test]
    fn uci_serialization_is_canonical(doc in document()) {
        let once = serialize_uci(&doc);
        let again = serialize_uci(&parse_uci(&doc.package_name, &once).unwrap());
        prop_assert_eq!(once, again);
    }

    #[test]
    fn uci_parser_is_total(text in "\\PC{0,200}") {
        // must never panic, whatever the input
        let _ = parse_uci("fuzz", &text);
    }

    #[test]
    fn uci_parser_is_total_on_structured_noise(
        parts in proptest::collection::vec(
            prop_oneof![
                Just("config system".to_string()),
                Just("config".to_string()),
                Just("\toption a 'b'".to_string()),
                Just("\tlist a 'b'".to_string()),
                Just("option x".to_string()),
                Just("# comment".to_string()),
                Just("".to_string()),
                "[a-z' \"\\\\]{0,16}",
            ],
            0..24,
        )
    ) {
        let _ = parse_uci("fuzz", &parts.join("\n"));
    }

    #[test]
    fn yang_parser_is_total(text in "\\PC{0,300}") {
        let _ = parse_yang(&text);
    }

    #[test]
    fn yang_parser_is_total_on_structured_noise(
        parts in proptest::collection::vec(
            prop_oneof![
                Just("module m {".to_string()),
                Just("}".to_string()),
                Just("{".to_string()),
                Just("leaf x { type string; }".to_string()),
                Just("container c {".to_string()),
                Just(";".to_string()),
                Just("\"un".to_string()),
                Just("/* comment".to_string()),
                "[a-z:{};\"']{0,12}",
            ],
            0..24,
        )
    ) {
        let _ = parse_yang(&parts.join(" "));
    }
}
