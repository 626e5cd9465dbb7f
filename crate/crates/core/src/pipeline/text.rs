//! Normalization shared by intent matching, dataset resolution and column
//! mention detection.

use unicode_segmentation::UnicodeSegmentation;

const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "can", "could", "do", "does", "for", "from", "has", "have", "i",
    "in", "into", "is", "it", "its", "me", "of", "on", "or", "our", "please", "so", "that", "the", "their", "there",
    "these", "this", "to", "us", "was", "we", "were", "what", "which", "with", "you", "your",
];

/// Lower-case words joined by single spaces, punctuation dropped.
pub fn normalize(text: &str) -> String {
    words(text).join(" ")
}

pub fn words(text: &str) -> Vec<String> {
    text.unicode_words().map(str::to_lowercase).collect()
}

/// Crude plural folding: `reports` → `report`, `cases` → `case`.
pub fn stem(word: &str) -> String {
    if word.len() > 3 && word.ends_with('s') && !word.ends_with("ss") {
        word[..word.len() - 1].to_string()
    } else {
        word.to_string()
    }
}

/// Stemmed content words (stopwords removed), in order.
pub fn terms(text: &str) -> Vec<String> {
    words(text).iter().filter(|w| !STOPWORDS.contains(&w.as_str())).map(|w| stem(w)).collect()
}

/// Byte position of `phrase` in `haystack` as whole words, both normalized.
pub fn find_phrase(haystack: &str, phrase: &str) -> Option<usize> {
    let h = format!(" {haystack} ");
    let p = format!(" {} ", normalize(phrase));
    h.find(&p)
}

/// True when every stemmed word of `name` occurs, contiguously and in order,
/// among the stemmed words of `text`.
pub fn mentions(text: &str, name: &str) -> bool {
    let hay: Vec<String> = words(text).iter().map(|w| stem(w)).collect();
    let needle: Vec<String> = words(name).iter().map(|w| stem(w)).collect();
    !needle.is_empty() && hay.windows(needle.len()).any(|w| w == needle.as_slice())
}

/// First integer written in digits or as a small number word.
pub fn first_count(text: &str) -> Option<i64> {
    const NAMES: [&str; 10] = ["one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"];
    for w in words(text) {
        if let Ok(v) = w.parse::<i64>() {
            return Some(v);
        }
        if let Some(i) = NAMES.iter().position(|n| *n == w) {
            return Some(i as i64 + 1);
        }
    }
    None
}

/// Numeric tokens (`12`, `3.5`) in reading order; digits inside words such
/// as `2020-01` yield `2020` and `01`.
pub fn numeric_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let chars: Vec<char> = text.chars().collect();
    for (i, c) in chars.iter().enumerate() {
        let decimal_point =
            *c == '.' && !cur.is_empty() && !cur.contains('.') && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
        if c.is_ascii_digit() || decimal_point {
            cur.push(*c);
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phrases_and_mentions() {
        let q = normalize("Please show the geographic hot-spots!");
        assert_eq!(q, "please show the geographic hot spots");
        assert!(find_phrase(&q, "hot spots").is_some());
        assert!(find_phrase(&q, "spot").is_none());
        assert!(mentions("top 3 categories of headlines", "headline"));
        assert!(mentions("count per district tag", "district-tag"));
        assert_eq!(first_count("the top three themes"), Some(3));
        assert_eq!(numeric_tokens("peak 2020-01 with 31.5 reports."), vec!["2020", "01", "31.5"]);
        assert_eq!(terms("rape incident reports with dates"), vec!["rape", "incident", "report", "date"]);
    }
}
