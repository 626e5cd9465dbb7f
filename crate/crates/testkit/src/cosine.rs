//! A from-scratch TF-IDF cosine used to check dataset resolution scores.
//!
//! Terms are lower-cased alphanumeric words minus a stopword list, with a
//! trailing `s` folded away on words longer than three letters (but not
//! `ss`). Only documents sharing a term with the query count towards
//! document frequencies; idf is `ln((1 + N) / (1 + df)) + 1`.

use std::collections::HashMap;

const STOP: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "can", "could", "do", "does", "for", "from", "has", "have", "i",
    "in", "into", "is", "it", "its", "me", "of", "on", "or", "our", "please", "so", "that", "the", "their", "there",
    "these", "this", "to", "us", "was", "we", "were", "what", "which", "with", "you", "your",
];

pub fn terms(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty() && !STOP.contains(w))
        .map(|w| {
            if w.len() > 3 && w.ends_with('s') && !w.ends_with("ss") {
                w[..w.len() - 1].to_string()
            } else {
                w.to_string()
            }
        })
        .collect()
}

pub fn cosine_scores(query: &str, docs: &[&str]) -> Vec<f64> {
    let q = terms(query);
    let d: Vec<Vec<String>> = docs.iter().map(|x| terms(x)).collect();
    let related: Vec<bool> = d.iter().map(|doc| doc.iter().any(|t| q.contains(t))).collect();
    let n = related.iter().filter(|r| **r).count() as f64;
    let idf = |t: &str| {
        let df = d.iter().zip(&related).filter(|(doc, r)| **r && doc.iter().any(|x| x == t)).count() as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    };
    let vector = |ts: &[String]| {
        let mut m: HashMap<String, f64> = HashMap::new();
        for t in ts {
            *m.entry(t.clone()).or_default() += 1.0;
        }
        m.into_iter()
            .map(|(t, c)| {
                let w = c * idf(&t);
                (t, w)
            })
            .collect::<HashMap<_, _>>()
    };
    let qv = vector(&q);
    let norm = |v: &HashMap<String, f64>| v.values().map(|x| x * x).sum::<f64>().sqrt();
    d.iter()
        .zip(&related)
        .map(|(doc, r)| {
            if !r {
                return 0.0;
            }
            let dv = vector(doc);
            let dot: f64 = qv.iter().map(|(t, w)| w * dv.get(t).copied().unwrap_or(0.0)).sum();
            dot / (norm(&qv) * norm(&dv))
        })
        .collect()
}
