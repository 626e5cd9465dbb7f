//! Syntax tree for MQL statements.
//!
//! Only the statement carries a source span. Everything below it is plain
//! data so that two trees parsed from differently formatted text compare
//! equal when they mean the same thing.

use serde::Serialize;

/// Half-open byte range `[start, end)` into the parsed input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StatementKind {
    Generate,
    Construct,
    Inspect,
}

#[derive(Debug, Clone, Serialize)]
pub struct MqlStatement {
    pub body: StatementBody,
    /// Covers the statement text including its `;` terminator when present.
    pub span: Span,
}

impl MqlStatement {
    pub fn kind(&self) -> StatementKind {
        match self.body {
            StatementBody::Generate(_) => StatementKind::Generate,
            StatementBody::Construct(_) => StatementKind::Construct,
            StatementBody::Inspect(_) => StatementKind::Inspect,
        }
    }

    /// Equality of meaning, ignoring where the statement came from.
    pub fn same_structure(&self, other: &MqlStatement) -> bool {
        self.body == other.body
    }

    pub fn as_generate(&self) -> Option<&GenerateBody> {
        match &self.body {
            StatementBody::Generate(g) => Some(g),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StatementBody {
    Generate(GenerateBody),
    Construct(ConstructBody),
    Inspect(InspectBody),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerateBody {
    pub display: bool,
    pub task: MlTask,
    pub using: Option<Using>,
    pub accuracy: Option<f64>,
    pub label: Vec<String>,
    pub features: Vec<String>,
    pub from: Vec<String>,
    #[serde(rename = "where")]
    pub filter: Option<Condition>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MlTask {
    Prediction { target: String, over: Option<String> },
    Classification { labels: Vec<String>, over: Option<String> },
    Cluster { k: IntExpr },
}

impl MlTask {
    pub fn over(&self) -> Option<&str> {
        match self {
            MlTask::Prediction { over, .. } | MlTask::Classification { over, .. } => over.as_deref(),
            MlTask::Cluster { .. } => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MlTask::Prediction { .. } => "prediction",
            MlTask::Classification { .. } => "classification",
            MlTask::Cluster { .. } => "cluster",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Using {
    Model(String),
    Algorithm(String),
}

/// `CONSTRUCT MODEL name AS <task> [ALGORITHM a] [WITH MODEL ACCURACY p] ...`
///
/// The inner body never has `DISPLAY`, `OVER` or `USING MODEL`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructBody {
    pub model: String,
    pub body: GenerateBody,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InspectBody {
    pub table: String,
    pub directives: Vec<InspectDirective>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum InspectDirective {
    DropNull(String),
    FillNull(String, Literal),
    Dedupe,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Literal {
    Text(String),
    Int(i64),
    Decimal(f64),
    /// Validated ISO-8601 date (`YYYY-MM-DD`) or timestamp (`YYYY-MM-DDThh:mm:ss`).
    Date(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn test(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Operand {
    Column(String),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Condition {
    Compare { left: Operand, op: CmpOp, right: Operand },
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
    Not(Box<Condition>),
}

impl Condition {
    pub fn compare(left: Operand, op: CmpOp, right: Operand) -> Self {
        Condition::Compare { left, op, right }
    }

    pub fn and(self, other: Condition) -> Self {
        Condition::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Condition) -> Self {
        Condition::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Condition::Not(Box::new(self))
    }

    /// Every column name referenced, in first-occurrence order.
    pub fn columns(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_columns(&mut out);
        out
    }

    fn collect_columns<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Condition::Compare { left, right, .. } => {
                for operand in [left, right] {
                    if let Operand::Column(c) = operand {
                        if !out.contains(&c.as_str()) {
                            out.push(c);
                        }
                    }
                }
            }
            Condition::And(a, b) | Condition::Or(a, b) => {
                a.collect_columns(out);
                b.collect_columns(out);
            }
            Condition::Not(c) => c.collect_columns(out),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntAggregate {
    /// `COUNT(*)`
    CountAll,
    Count,
    CountDistinct,
    Min,
    Max,
    Avg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 1,
            ArithOp::Mul | ArithOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum IntExpr {
    Literal(i64),
    /// `column` is `None` only for `COUNT(*)`.
    Aggregate {
        func: IntAggregate,
        column: Option<String>,
    },
    Binary {
        op: ArithOp,
        lhs: Box<IntExpr>,
        rhs: Box<IntExpr>,
    },
}

impl IntExpr {
    pub fn binary(op: ArithOp, lhs: IntExpr, rhs: IntExpr) -> Self {
        IntExpr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    /// Evaluates the expression when it has no aggregate calls.
    ///
    /// Returns `None` for expressions that need table data, and `Some(Err)`
    /// on division by zero or overflow.
    pub fn constant_value(&self) -> Option<Result<i64, String>> {
        match self {
            IntExpr::Literal(v) => Some(Ok(*v)),
            IntExpr::Aggregate { .. } => None,
            IntExpr::Binary { op, lhs, rhs } => {
                let l = lhs.constant_value()?;
                let r = rhs.constant_value()?;
                Some(l.and_then(|l| r.and_then(|r| apply_arith(*op, l, r))))
            }
        }
    }
}

/// Integer arithmetic shared by constant folding and table evaluation.
/// Division floors toward negative infinity.
pub fn apply_arith(op: ArithOp, l: i64, r: i64) -> Result<i64, String> {
    let out = match op {
        ArithOp::Add => l.checked_add(r),
        ArithOp::Sub => l.checked_sub(r),
        ArithOp::Mul => l.checked_mul(r),
        ArithOp::Div => {
            if r == 0 {
                return Err(format!("division by zero in {l} / {r}"));
            }
            l.checked_div(r).map(|q| if l % r != 0 && ((l < 0) != (r < 0)) { q - 1 } else { q })
        }
    };
    out.ok_or_else(|| format!("integer overflow in {l} {} {r}", op.symbol()))
}
