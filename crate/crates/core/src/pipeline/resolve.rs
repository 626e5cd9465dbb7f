//! Binding a data need to a registered dataset by TF-IDF cosine similarity
//! between the need and each dataset description.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::error::{PipelineError, Result};
use super::text::terms;
use crate::store::Registry;

/// Best scores below this are treated as no match.
pub const MIN_SCORE: f64 = 0.05;
/// Candidates reported when nothing matches.
pub const REPORTED_CANDIDATES: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub table: String,
    pub score: f64,
}

/// The dataset a data task was bound to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Binding {
    pub ordinal: usize,
    pub table: String,
    pub score: f64,
    pub runner_up: Option<Candidate>,
}

/// Cosine similarity of `need` against every document, in input order.
///
/// Only documents sharing at least one term with the need form the IDF
/// corpus, so adding an unrelated document never changes any score.
/// Weights are raw term counts times `ln((1 + N) / (1 + df)) + 1`.
pub fn similarity_scores(need: &str, documents: &[&str]) -> Vec<f64> {
    let q = term_counts(need);
    let docs: Vec<BTreeMap<String, f64>> = documents.iter().map(|d| term_counts(d)).collect();
    let relevant: Vec<usize> = (0..docs.len()).filter(|&i| q.keys().any(|t| docs[i].contains_key(t))).collect();
    let n = relevant.len() as f64;
    let vocabulary: BTreeSet<&String> = relevant.iter().flat_map(|&i| docs[i].keys()).chain(q.keys()).collect();
    let idf: BTreeMap<&String, f64> = vocabulary
        .into_iter()
        .map(|t| {
            let df = relevant.iter().filter(|&&i| docs[i].contains_key(t)).count() as f64;
            (t, ((1.0 + n) / (1.0 + df)).ln() + 1.0)
        })
        .collect();
    let weigh = |tf: &BTreeMap<String, f64>| -> BTreeMap<String, f64> {
        tf.iter().map(|(t, c)| (t.clone(), c * idf[t])).collect()
    };
    let qv = weigh(&q);
    let q_norm = qv.values().map(|w| w * w).sum::<f64>().sqrt();
    let mut scores = vec![0.0; docs.len()];
    for &i in &relevant {
        let dv = weigh(&docs[i]);
        let d_norm = dv.values().map(|w| w * w).sum::<f64>().sqrt();
        let dot: f64 = qv.iter().filter_map(|(t, w)| dv.get(t).map(|d| w * d)).sum();
        if q_norm > 0.0 && d_norm > 0.0 {
            scores[i] = dot / (q_norm * d_norm);
        }
    }
    scores
}

fn term_counts(text: &str) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for t in terms(text) {
        *out.entry(t).or_insert(0.0) += 1.0;
    }
    out
}

/// Binds `need` to the best-matching dataset. Ties go to the dataset
/// registered first.
pub fn resolve_data(need: &str, ordinal: usize, registry: &Registry) -> Result<Binding> {
    let descriptors = registry.descriptors();
    if descriptors.is_empty() {
        return Err(PipelineError::EmptyRegistry);
    }
    let docs: Vec<&str> = descriptors.iter().map(|d| d.description.as_str()).collect();
    let scores = similarity_scores(need, &docs);
    let mut ranked: Vec<Candidate> =
        descriptors.iter().zip(&scores).map(|(d, s)| Candidate { table: d.name.clone(), score: *s }).collect();
    // stable sort keeps registration order among equal scores
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));
    if ranked[0].score < MIN_SCORE {
        return Err(PipelineError::NoDatasetMatch {
            kappa: need.to_string(),
            candidates: ranked.into_iter().take(REPORTED_CANDIDATES).map(|c| (c.table, c.score)).collect(),
        });
    }
    let mut it = ranked.into_iter();
    let best = it.next().expect("non-empty");
    Ok(Binding { ordinal, table: best.table, score: best.score, runner_up: it.next() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{ColumnSpec, Table, ValueKind};

    fn registry(entries: &[(&str, &str)]) -> Registry {
        let reg = Registry::new();
        for (name, desc) in entries {
            reg.register(Table::empty(*name, vec![ColumnSpec::new("x", ValueKind::Int)]), desc).unwrap();
        }
        reg
    }

    #[test]
    fn best_description_wins_and_ties_keep_registration_order() {
        let reg = registry(&[
            ("A", "monthly crime reports by district"),
            ("B", "annual rainfall per year"),
            ("C", "monthly crime reports by district"),
        ]);
        let b = resolve_data("crime reports per district", 1, &reg).unwrap();
        assert_eq!(b.table, "A");
        assert_eq!(b.runner_up.as_ref().unwrap().table, "C");
        assert_eq!(b.runner_up.unwrap().score, b.score);
    }

    #[test]
    fn unrelated_entries_do_not_change_scores() {
        let base =
            similarity_scores("rape incident reports", &["rape incident reports with dates", "annual rape statistics"]);
        let more = similarity_scores(
            "rape incident reports",
            &["rape incident reports with dates", "annual rape statistics", "satellite imagery tiles"],
        );
        assert_eq!(base, more[..2]);
        assert_eq!(more[2], 0.0);
    }

    #[test]
    fn no_overlap_is_a_miss_with_candidates() {
        let reg = registry(&[("A", "news reports"), ("B", "annual statistics"), ("C", "prices"), ("D", "weather")]);
        match resolve_data("satellite imagery", 1, &reg) {
            Err(PipelineError::NoDatasetMatch { candidates, .. }) => {
                assert_eq!(candidates.iter().map(|c| c.0.as_str()).collect::<Vec<_>>(), ["A", "B", "C"]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(resolve_data("x", 1, &Registry::new()), Err(PipelineError::EmptyRegistry));
    }
}
