//! Small text utilities shared by the algorithms and the connectors. Both
//! sides of a post-text search must process text identically, so the exact
//! rules live here.

use alloc::string::String;
use alloc::vec::Vec;

/// Longest post prefix sent as a search query, in characters.
pub const MAX_QUERY_CHARS: usize = 75;

/// Processed queries shorter than this are not sent.
pub const MIN_QUERY_CHARS: usize = 5;

const TRAILING_PUNCT: &[char] = &['.', ',', ';', ':', '!', '?', ')', '(', '"', '\'', ']', '['];

/// URL tokens of `text`: whitespace-separated tokens starting with
/// `http://` or `https://`, trailing punctuation removed.
pub fn extract_urls(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|tok| {
            let tok = tok.trim_start_matches(['(', '"', '\'', '[']);
            let lower = tok.get(..8).map(|p| p.to_ascii_lowercase());
            let is_url = match lower.as_deref() {
                Some(p) => p.starts_with("http://") || p == "https://",
                None => false,
            };
            if !is_url {
                return None;
            }
            let tok = tok.trim_end_matches(TRAILING_PUNCT);
            (tok.len() > "http://".len()).then(|| String::from(tok))
        })
        .collect()
}

/// Lowercase alphanumeric tokens; anything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// Drops every non-ASCII character.
pub fn strip_non_ascii(text: &str) -> String {
    text.chars().filter(char::is_ascii).collect()
}

/// Turns a post into a search query: first [`MAX_QUERY_CHARS`] characters,
/// non-ASCII removed, trimmed. `None` when fewer than [`MIN_QUERY_CHARS`]
/// characters survive.
pub fn post_query(text: &str) -> Option<String> {
    let truncated: String = text.chars().take(MAX_QUERY_CHARS).collect();
    let ascii = strip_non_ascii(&truncated);
    let q = ascii.trim();
    (q.chars().count() >= MIN_QUERY_CHARS).then(|| String::from(q))
}

/// Form of a stored post that queries are matched against: non-ASCII
/// removed, ASCII-lowercased.
pub fn searchable_text(text: &str) -> String {
    let mut s = strip_non_ascii(text);
    s.make_ascii_lowercase();
    s
}

/// Case-insensitive substring test used for post search.
pub fn post_matches_query(post_text: &str, query: &str) -> bool {
    searchable_text(post_text).contains(&searchable_text(query))
}

/// Candidate location "same or similar" to the queried one: contains it,
/// ignoring case.
pub fn location_matches(queried: &str, candidate: &str) -> bool {
    let q = queried.trim().to_lowercase();
    q.is_empty() || candidate.to_lowercase().contains(q.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn urls_from_text() {
        let t = "photos (https://target.net/alice/photo/1), and http://short.ly/x. done";
        assert_eq!(
            extract_urls(t),
            vec!["https://target.net/alice/photo/1", "http://short.ly/x"]
        );
        assert!(extract_urls("no links, just http:// here").is_empty());
        assert!(extract_urls("").is_empty());
    }

    #[test]
    fn tokenizer_splits_on_non_alnum() {
        assert_eq!(tokenize("Hello, World!! a-b"), vec!["hello", "world", "a", "b"]);
        assert!(tokenize(" ,;").is_empty());
    }

    #[test]
    fn query_truncates_then_strips() {
        let long: String = "abcdefghij".repeat(12);
        assert_eq!(post_query(&long).unwrap().len(), 75);
        assert_eq!(post_query(&long).unwrap(), &long[..75]);

        // the snowman counts toward the 75 characters and is then dropped
        let mut s = String::from("\u{2603}");
        s.push_str(&"x".repeat(100));
        assert_eq!(post_query(&s).unwrap().len(), 74);

        assert_eq!(post_query("hi \u{1F600}"), None);
        assert_eq!(post_query("\u{1F600}\u{1F600}"), None);
        assert_eq!(post_query("hello").as_deref(), Some("hello"));
    }

    #[test]
    fn location_rule() {
        assert!(location_matches("Springfield", "springfield, usa"));
        assert!(!location_matches("Springfield", "Riverton"));
        assert!(location_matches("", "anything"));
    }
}
