//! Lenient extraction of JSON payloads from chat model replies.

use std::collections::HashSet;

use serde_json::Value;

use super::ExpansionResult;
use crate::text::find_tag_token;

/// Byte index one past the bracket that balances `bytes[start]`.
fn balanced_end(text: &str, start: usize, open: u8, close: u8) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate().skip(start) {
        if in_string {
            match (escaped, b) {
                (true, _) => escaped = false,
                (false, b'\\') => escaped = true,
                (false, b'"') => in_string = false,
                _ => {}
            }
            continue;
        }
        if b == b'"' {
            in_string = true;
        } else if b == open {
            depth += 1;
        } else if b == close {
            depth -= 1;
            if depth == 0 {
                return Some(i + 1);
            }
        }
    }
    None
}

/// The first balanced `open`…`close` fragment that parses as JSON.
fn first_json(text: &str, open: u8, close: u8) -> Option<Value> {
    text.bytes()
        .enumerate()
        .filter(|&(_, b)| b == open)
        .find_map(|(i, _)| {
            let end = balanced_end(text, i, open, close)?;
            serde_json::from_str::<Value>(&text[i..end]).ok()
        })
}

/// Expansions found in a chat reply, restricted to mentions the NER stage produced.
///
/// Keys not exactly equal to an allowed mention are hallucinated spans and are
/// dropped, as are self-expansions, empty values and values that would break the
/// tagged encoding.
pub fn parse_expansion_response(text: &str, allowed_mentions: &HashSet<String>) -> (ExpansionResult, Vec<String>) {
    let mut diagnostics = Vec::new();
    let Some(Value::Object(obj)) = first_json(text, b'{', b'}') else {
        diagnostics.push("no JSON object found in expansion reply".to_owned());
        return (ExpansionResult::default(), diagnostics);
    };
    let mut result = ExpansionResult::default();
    for (key, value) in obj {
        if !allowed_mentions.contains(&key) {
            diagnostics.push(format!("expansion for unannotated span {key:?} dropped"));
            continue;
        }
        let Value::String(expansion) = value else {
            diagnostics.push(format!("non-string expansion for {key:?} dropped"));
            continue;
        };
        let expansion = expansion.trim();
        if expansion.is_empty() || expansion == key {
            continue;
        }
        if find_tag_token(expansion).is_some() || expansion.contains(['\n', '\r']) {
            diagnostics.push(format!("unusable expansion for {key:?} dropped"));
            continue;
        }
        result.expansions.insert(key, expansion.to_owned());
    }
    (result, diagnostics)
}

/// Entity surfaces from an entity-listing reply, deduplicated in order.
pub fn parse_entity_list_response(text: &str) -> Vec<String> {
    let Some(Value::Array(items)) = first_json(text, b'[', b']') else {
        return Vec::new();
    };
    let mut seen = HashSet::new();
    items
        .into_iter()
        .filter_map(|v| match v {
            Value::String(s) if !s.trim().is_empty() => Some(s),
            _ => None,
        })
        .filter(|s| seen.insert(s.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn allowed(xs: &[&str]) -> HashSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn keeps_allowed_expansions() {
        let (r, d) = parse_expansion_response(
            r#"{"Angelina": "Angelina Jolie", "AK": "Alaska"}"#,
            &allowed(&["Angelina", "Brad", "Jon", "AK"]),
        );
        assert_eq!(r.get("Angelina"), Some("Angelina Jolie"));
        assert_eq!(r.get("AK"), Some("Alaska"));
        assert_eq!(r.expansions.len(), 2);
        assert!(d.is_empty());
    }

    #[test]
    fn drops_hallucinated_span() {
        let (r, d) = parse_expansion_response(r#"{"Paris": "Paris Hilton"}"#, &allowed(&["Angelina"]));
        assert!(r.is_empty());
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn extracts_object_from_prose() {
        let (r, _) = parse_expansion_response(r#"garbage {"AK":"Alaska"} trailing"#, &allowed(&["AK"]));
        assert_eq!(r.get("AK"), Some("Alaska"));
        let (r, _) = parse_expansion_response("Sure! {not json} then {\"AK\": \"Alaska\"}", &allowed(&["AK"]));
        assert_eq!(r.get("AK"), Some("Alaska"));
        let (r, d) = parse_expansion_response("nothing here", &allowed(&["AK"]));
        assert!(r.is_empty() && d.len() == 1);
    }

    #[test]
    fn drops_self_and_non_string_expansions() {
        let (r, _) = parse_expansion_response(r#"{"AK": "AK", "Jon": 3, "Brad": "Brad Pitt"}"#, &allowed(&["AK", "Jon", "Brad"]));
        assert_eq!(r.expansions.len(), 1);
        assert_eq!(r.get("Brad"), Some("Brad Pitt"));
    }

    #[test]
    fn braces_inside_strings() {
        let (r, _) = parse_expansion_response(r#"{"AK": "Alaska }"}"#, &allowed(&["AK"]));
        assert_eq!(r.get("AK"), Some("Alaska }"));
    }

    #[test]
    fn entity_lists() {
        assert_eq!(parse_entity_list_response(r#"["Brad Pitt","Jon"]"#), vec!["Brad Pitt", "Jon"]);
        assert!(parse_entity_list_response("no json here").is_empty());
        assert_eq!(parse_entity_list_response(r#"["a","a",3,"b"]"#), vec!["a", "b"]);
        assert_eq!(
            parse_entity_list_response(r#"{"entities": ["Angelina", "AK"]}"#),
            vec!["Angelina", "AK"]
        );
    }

    proptest! {
        #[test]
        fn parsers_are_total(text in "\\PC{0,80}", keys in proptest::collection::vec("[A-Za-z]{1,4}", 0..4)) {
            let allowed: HashSet<String> = keys.into_iter().collect();
            let (r, _) = parse_expansion_response(&text, &allowed);
            for k in r.expansions.keys() {
                prop_assert!(allowed.contains(k));
            }
            let _ = parse_entity_list_response(&text);
        }

        #[test]
        fn output_keys_are_allowed(pairs in proptest::collection::btree_map("[a-c]{1,2}", "[a-z ]{0,5}", 0..6),
                                   keys in proptest::collection::hash_set("[a-c]{1,2}", 0..4)) {
            let body = serde_json::to_string(&pairs).unwrap();
            let (r, _) = parse_expansion_response(&format!("reply: {body}"), &keys);
            for (k, v) in &r.expansions {
                prop_assert!(keys.contains(k));
                prop_assert_ne!(k, v);
            }
        }
    }
}
