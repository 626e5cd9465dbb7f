//! The intent rule table driving the deterministic query mapper and the
//! plan translator. Rules are data: the default set is compiled in from
//! `rules/intents.json` and a replacement can be loaded from any path.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::error::{PipelineError, Result};
use super::text::{find_phrase, first_count, normalize};

pub const RULES_VERSION: u32 = 1;
const DEFAULT_RULES: &str = include_str!("../../rules/intents.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intent {
    Trend,
    Hotspot,
    Category,
    Predict,
    Classify,
    Lookup,
}

impl Intent {
    pub fn name(self) -> &'static str {
        match self {
            Intent::Trend => "trend",
            Intent::Hotspot => "hotspot",
            Intent::Category => "category",
            Intent::Predict => "predict",
            Intent::Classify => "classify",
            Intent::Lookup => "lookup",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grain {
    Month,
    Year,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub name: String,
    pub intent: Intent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grain: Option<Grain>,
    /// Any one of these phrases (matched on whole words) fires the rule...
    pub patterns: Vec<String>,
    /// ...unless one of these is present too.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unless: Vec<String>,
    /// Fallback rules are only considered when no other rule fires.
    #[serde(default)]
    pub fallback: bool,
    /// Templates for the emitted tasks. `{topic}`, `{k}` and `{q}` (the
    /// user's text) are substituted.
    pub data_need: String,
    pub query_need: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentRules {
    pub version: u32,
    #[serde(default)]
    pub default_topic: String,
    /// Subject phrases, longest match wins.
    #[serde(default)]
    pub topics: Vec<String>,
    pub default_k: i64,
    pub rules: Vec<Rule>,
}

/// A rule that fired, with where in the text it first matched.
#[derive(Debug, Clone, PartialEq)]
pub struct Match<'a> {
    pub rule: &'a Rule,
    pub position: usize,
}

impl IntentRules {
    pub fn builtin() -> IntentRules {
        IntentRules::from_json(DEFAULT_RULES).expect("built-in rule file is valid")
    }

    pub fn from_json(text: &str) -> Result<IntentRules> {
        let rules: IntentRules = serde_json::from_str(text).map_err(|e| PipelineError::Rules(e.to_string()))?;
        if rules.version != RULES_VERSION {
            return Err(PipelineError::Rules(format!(
                "unsupported rule file version {} (expected {RULES_VERSION})",
                rules.version
            )));
        }
        for r in &rules.rules {
            if r.patterns.is_empty() {
                return Err(PipelineError::Rules(format!("rule {} has no patterns", r.name)));
            }
        }
        if rules.default_k < 1 {
            return Err(PipelineError::Rules("default_k must be at least 1".into()));
        }
        Ok(rules)
    }

    pub fn from_path(path: &Path) -> Result<IntentRules> {
        let text =
            std::fs::read_to_string(path).map_err(|e| PipelineError::Rules(format!("{}: {e}", path.display())))?;
        IntentRules::from_json(&text)
    }

    /// Rules firing on `text`, in order of first match; fallback rules only
    /// when nothing else fires.
    pub fn matches(&self, text: &str) -> Vec<Match<'_>> {
        let norm = normalize(text);
        let fire = |fallback: bool| {
            let mut found: Vec<Match<'_>> = self
                .rules
                .iter()
                .filter(|r| r.fallback == fallback)
                .filter(|r| !r.unless.iter().any(|u| find_phrase(&norm, u).is_some()))
                .filter_map(|r| {
                    r.patterns
                        .iter()
                        .filter_map(|p| find_phrase(&norm, p))
                        .min()
                        .map(|position| Match { rule: r, position })
                })
                .collect();
            found.sort_by_key(|m| m.position);
            found
        };
        let primary = fire(false);
        if primary.is_empty() {
            fire(true)
        } else {
            primary
        }
    }

    /// The single best rule for a task's need text.
    pub fn classify(&self, text: &str) -> Option<&Rule> {
        self.matches(text).into_iter().next().map(|m| m.rule)
    }

    pub fn topic(&self, text: &str) -> String {
        let norm = normalize(text);
        let mut topics: Vec<&String> = self.topics.iter().collect();
        topics.sort_by_key(|t| std::cmp::Reverse(t.len()));
        topics
            .into_iter()
            .find(|t| find_phrase(&norm, t).is_some())
            .cloned()
            .unwrap_or_else(|| self.default_topic.clone())
    }

    pub fn cluster_count(&self, text: &str) -> i64 {
        first_count(text).filter(|k| *k >= 1).unwrap_or(self.default_k)
    }

    /// Fills a template and collapses the gaps an empty topic leaves.
    pub fn fill(&self, template: &str, q: &str) -> String {
        let filled = template
            .replace("{topic}", &self.topic(q))
            .replace("{k}", &self.cluster_count(q).to_string())
            .replace("{q}", q.trim());
        filled.split_whitespace().collect::<Vec<_>>().join(" ")
    }
}
