//! Tolerant extraction of JSON from model output.
//!
//! Completions often wrap the payload in code fences, use Python-style single
//! quotes and `True`/`False`, or leave trailing commas. This normalises those
//! before handing the text to serde_json.

/// Slice from the first opening bracket of `open` to the last matching
/// closing bracket.
fn outermost(text: &str, open: char, close: char) -> Option<&str> {
    let start = text.find(open)?;
    let end = text.rfind(close)?;
    (end > start).then(|| &text[start..=end])
}

/// Best-effort conversion of a JSON-like payload into strict JSON.
pub fn normalize(text: &str, open: char, close: char) -> Option<String> {
    let body = outermost(text, open, close)?;
    let mut out = String::with_capacity(body.len());
    let mut chars = body.chars().peekable();
    let mut quote: Option<char> = None;
    let mut word = String::new();

    let flush = |word: &mut String, out: &mut String| {
        match word.as_str() {
            "True" => out.push_str("true"),
            "False" => out.push_str("false"),
            "None" => out.push_str("null"),
            _ => out.push_str(word),
        }
        word.clear();
    };

    while let Some(c) = chars.next() {
        if let Some(q) = quote {
            match c {
                '\\' => {
                    out.push(c);
                    if let Some(n) = chars.next() {
                        out.push(n);
                    }
                }
                '"' if q == '\'' => out.push_str("\\\""),
                c if c == q => {
                    out.push('"');
                    quote = None;
                }
                _ => out.push(c),
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            word.push(c);
            continue;
        }
        flush(&mut word, &mut out);
        match c {
            '"' | '\'' => {
                quote = Some(c);
                out.push('"');
            }
            ',' => {
                // Drop trailing commas before a closing bracket.
                let mut look = chars.clone();
                while matches!(look.peek(), Some(w) if w.is_whitespace()) {
                    look.next();
                }
                if !matches!(look.peek(), Some(']') | Some('}')) {
                    out.push(c);
                }
            }
            _ => out.push(c),
        }
    }
    flush(&mut word, &mut out);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn python_style_dict() {
        let raw = "```\n{'motivational': ['x',], 'flag': True,}\n```";
        let n = normalize(raw, '{', '}').unwrap();
        let v: serde_json::Value = serde_json::from_str(&n).unwrap();
        assert_eq!(v["motivational"][0], "x");
        assert_eq!(v["flag"], true);
    }

    #[test]
    fn apostrophe_inside_double_quotes_kept() {
        let n = normalize(r#"{"a": "it's"}"#, '{', '}').unwrap();
        let v: serde_json::Value = serde_json::from_str(&n).unwrap();
        assert_eq!(v["a"], "it's");
    }

    #[test]
    fn list_payload() {
        let n = normalize("Here: [ {'proposal': 'A', 'utility': -1}, ]", '[', ']').unwrap();
        let v: serde_json::Value = serde_json::from_str(&n).unwrap();
        assert_eq!(v[0]["utility"], -1);
    }

    #[test]
    fn no_payload() {
        assert!(normalize("nothing here", '{', '}').is_none());
    }
}
