use serde::{Deserialize, Serialize};

use super::error::{PipelineError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskKind {
    Data,
    Query,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Data => "Data",
            TaskKind::Query => "Query",
        }
    }
}

/// One step of a decomposed question: find data, or ask something of it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub chi: TaskKind,
    /// The need, in plain words.
    pub kappa: String,
    /// 1-based position in the task list.
    pub ordinal: usize,
}

impl Task {
    pub fn data(kappa: &str, ordinal: usize) -> Task {
        Task { chi: TaskKind::Data, kappa: kappa.to_string(), ordinal }
    }

    pub fn query(kappa: &str, ordinal: usize) -> Task {
        Task { chi: TaskKind::Query, kappa: kappa.to_string(), ordinal }
    }
}

/// An ordered task list. Construction checks shape (non-empty needs, dense
/// ordinals); whether every query has data before it is checked when the
/// list is translated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Task>", into = "Vec<Task>")]
pub struct TaskList(Vec<Task>);

impl TaskList {
    pub fn new(tasks: Vec<Task>) -> Result<TaskList> {
        if tasks.is_empty() {
            return Err(PipelineError::Malformed("empty task list".into()));
        }
        for (i, t) in tasks.iter().enumerate() {
            if t.kappa.trim().is_empty() {
                return Err(PipelineError::Malformed(format!("task {} has an empty need", i + 1)));
            }
            if t.ordinal != i + 1 {
                return Err(PipelineError::Malformed(format!("task at position {} has ordinal {}", i + 1, t.ordinal)));
            }
        }
        Ok(TaskList(tasks))
    }

    /// Numbers `(kind, need)` pairs from 1.
    pub fn from_pairs(pairs: &[(TaskKind, &str)]) -> Result<TaskList> {
        TaskList::new(
            pairs
                .iter()
                .enumerate()
                .map(|(i, (chi, k))| Task { chi: *chi, kappa: k.to_string(), ordinal: i + 1 })
                .collect(),
        )
    }

    pub fn tasks(&self) -> &[Task] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First query task with no data task before it.
    pub fn ordering_violation(&self) -> Option<&Task> {
        let mut seen_data = false;
        for t in &self.0 {
            match t.chi {
                TaskKind::Data => seen_data = true,
                TaskKind::Query if !seen_data => return Some(t),
                TaskKind::Query => {}
            }
        }
        None
    }
}

impl TryFrom<Vec<Task>> for TaskList {
    type Error = PipelineError;

    fn try_from(tasks: Vec<Task>) -> Result<TaskList> {
        TaskList::new(tasks)
    }
}

impl From<TaskList> for Vec<Task> {
    fn from(t: TaskList) -> Vec<Task> {
        t.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_is_checked() {
        assert!(TaskList::new(vec![]).is_err());
        assert!(TaskList::new(vec![Task::data("x", 2)]).is_err());
        assert!(TaskList::new(vec![Task::data(" ", 1)]).is_err());
        let bad = TaskList::from_pairs(&[(TaskKind::Query, "count"), (TaskKind::Data, "reports")]).unwrap();
        assert_eq!(bad.ordering_violation().map(|t| t.ordinal), Some(1));
        let good = TaskList::from_pairs(&[(TaskKind::Data, "reports"), (TaskKind::Query, "count")]).unwrap();
        assert!(good.ordering_violation().is_none());
        let json = serde_json::to_string(&good).unwrap();
        assert_eq!(serde_json::from_str::<TaskList>(&json).unwrap(), good);
        assert!(serde_json::from_str::<TaskList>(r#"[{"chi":"Data","kappa":"x","ordinal":3}]"#).is_err());
    }
}
