use super::AugmentError;

/// Quote a mention surface for the prompt mention list.
fn quote(mention: &str) -> String {
    let mut out = String::with_capacity(mention.len() + 2);
    out.push('\'');
    for c in mention.chars() {
        if c == '\'' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}

/// Prompt asking the chat model to expand every listed mention of one document.
///
/// Duplicate surfaces are listed once, in order of first appearance.
pub fn build_mention_expansion_prompt<S: AsRef<str>>(mentions: &[S], context: &str) -> Result<String, AugmentError> {
    let mut seen = Vec::<&str>::new();
    for m in mentions.iter().map(AsRef::as_ref) {
        if !m.is_empty() && !seen.contains(&m) {
            seen.push(m);
        }
    }
    if seen.is_empty() {
        return Err(AugmentError::EmptyMentionList);
    }
    let list = seen.iter().map(|m| quote(m)).collect::<Vec<_>>().join(", ");
    Ok(format!(
        "Expand the following entity mentions {list} based on the context:\n\
         Context: '{context}'\n\
         Answer with a single JSON object that maps each entity mention to its expansion. Do not format the json output."
    ))
}

/// Prompt asking the chat model to list every entity in `context`.
pub fn build_entity_listing_prompt(context: &str) -> String {
    format!(
        "Please generate one list with all entities from the following text in JSON format, excluding numbers. Do not format the json output: Context: '{context}'"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const SENTENCE: &str = "Angelina met her partner Brad and her father Jon in AK.";

    #[test]
    fn expansion_prompt_shape() {
        let p = build_mention_expansion_prompt(&["Angelina", "AK"], SENTENCE).unwrap();
        assert!(p.contains("Expand the following entity mentions 'Angelina', 'AK' based on the context"));
        assert!(p.contains("Context: 'Angelina met her partner Brad and her father Jon in AK.'"));
        assert!(p.lines().last().unwrap().contains("JSON object"));
    }

    #[test]
    fn expansion_prompt_lists_each_mention_once() {
        let p = build_mention_expansion_prompt(&["X", "X"], "X.").unwrap();
        let first_line = p.lines().next().unwrap();
        assert_eq!(first_line.matches("'X'").count(), 1);
    }

    #[test]
    fn expansion_prompt_escapes_apostrophes() {
        let p = build_mention_expansion_prompt(&["O'Neil"], "O'Neil spoke.").unwrap();
        assert!(p.contains(r"mentions 'O\'Neil' based"));
        // context stays verbatim
        assert!(p.contains("Context: 'O'Neil spoke.'"));
    }

    #[test]
    fn expansion_prompt_requires_mentions() {
        let empty: [&str; 0] = [];
        assert_eq!(
            build_mention_expansion_prompt(&empty, "x"),
            Err(AugmentError::EmptyMentionList)
        );
    }

    #[test]
    fn listing_prompt_verbatim() {
        assert_eq!(
            build_entity_listing_prompt(SENTENCE),
            "Please generate one list with all entities from the following text in JSON format, excluding numbers. Do not format the json output: Context: 'Angelina met her partner Brad and her father Jon in AK.'"
        );
        let p = build_entity_listing_prompt("line one\nline two");
        assert!(p.ends_with("Context: 'line one\nline two'"));
    }
}
