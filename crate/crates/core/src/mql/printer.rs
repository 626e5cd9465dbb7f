//! Canonical text form of MQL statements.
//!
//! Output uses upper-case keywords, single spaces, and a trailing `;`.
//! Identifiers are double-quoted only when they are not plain words or
//! collide with a reserved word. Parsing the output yields a tree equal to
//! the one printed.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::*;
use super::lexer::Keyword;

pub fn quote_ident(name: &str) -> String {
    if is_plain_word(name) && Keyword::lookup(name).is_none() {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('"', "\"\""))
    }
}

fn quote_str(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

fn is_plain_word(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Formats a float so that it lexes back as a decimal literal.
fn decimal_text(v: f64) -> String {
    let s = format!("{v}");
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

fn join_idents(names: &[String]) -> String {
    names.iter().map(|n| quote_ident(n)).collect::<Vec<_>>().join(", ")
}

impl Display for MqlStatement {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.body)
    }
}

impl Display for StatementBody {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            StatementBody::Generate(g) => write!(f, "GENERATE {g}"),
            StatementBody::Construct(c) => write!(f, "CONSTRUCT MODEL {} AS {}", quote_ident(&c.model), c.body),
            StatementBody::Inspect(i) => {
                write!(f, "INSPECT {} APPLY ", quote_ident(&i.table))?;
                for (n, d) in i.directives.iter().enumerate() {
                    if n > 0 {
                        f.write_str(", ")?;
                    }
                    match d {
                        InspectDirective::DropNull(c) => write!(f, "dropnull({})", quote_ident(c))?,
                        InspectDirective::FillNull(c, lit) => write!(f, "fillnull({}, {lit})", quote_ident(c))?,
                        InspectDirective::Dedupe => f.write_str("dedupe()")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl Display for GenerateBody {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.display {
            f.write_str("DISPLAY OF ")?;
        }
        write!(f, "{}", self.task)?;
        match &self.using {
            Some(Using::Model(m)) => write!(f, " USING MODEL {}", quote_ident(m))?,
            Some(Using::Algorithm(a)) => write!(f, " ALGORITHM {}", quote_ident(a))?,
            None => {}
        }
        if let Some(p) = self.accuracy {
            write!(f, " WITH MODEL ACCURACY {}", decimal_text(p))?;
        }
        if !self.label.is_empty() {
            write!(f, " LABEL {}", join_idents(&self.label))?;
        }
        if !self.features.is_empty() {
            write!(f, " FEATURES {}", join_idents(&self.features))?;
        }
        write!(f, " FROM {}", join_idents(&self.from))?;
        if let Some(c) = &self.filter {
            write!(f, " WHERE {c}")?;
        }
        Ok(())
    }
}

impl Display for MlTask {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            MlTask::Prediction { target, over } => {
                write!(f, "PREDICTION {}", quote_ident(target))?;
                if let Some(o) = over {
                    write!(f, " OVER {}", quote_ident(o))?;
                }
            }
            MlTask::Classification { labels, over } => {
                f.write_str("CLASSIFICATION INTO ")?;
                for (i, l) in labels.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    if is_plain_word(l) && Keyword::lookup(l).is_none() {
                        f.write_str(l)?;
                    } else {
                        f.write_str(&quote_str(l))?;
                    }
                }
                if let Some(o) = over {
                    write!(f, " OVER {}", quote_ident(o))?;
                }
            }
            MlTask::Cluster { k } => write!(f, "CLUSTER OF {k}")?,
        }
        Ok(())
    }
}

impl Display for Literal {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Text(s) => f.write_str(&quote_str(s)),
            Literal::Int(v) => write!(f, "{v}"),
            Literal::Decimal(v) => f.write_str(&decimal_text(*v)),
            Literal::Date(s) => write!(f, "DATE {}", quote_str(s)),
        }
    }
}

impl Display for Operand {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Column(c) => f.write_str(&quote_ident(c)),
            Operand::Literal(l) => write!(f, "{l}"),
        }
    }
}

fn cond_precedence(c: &Condition) -> u8 {
    match c {
        Condition::Or(..) => 1,
        Condition::And(..) => 2,
        Condition::Not(_) => 3,
        Condition::Compare { .. } => 4,
    }
}

fn write_cond(f: &mut impl Write, c: &Condition, min_prec: u8) -> fmt::Result {
    let prec = cond_precedence(c);
    let paren = prec < min_prec;
    if paren {
        f.write_char('(')?;
    }
    match c {
        Condition::Compare { left, op, right } => write!(f, "{left} {} {right}", op.symbol())?,
        Condition::And(a, b) | Condition::Or(a, b) => {
            write_cond(f, a, prec)?;
            f.write_str(if matches!(c, Condition::And(..)) { " AND " } else { " OR " })?;
            // right operand binds tighter so `a AND (b AND c)` keeps its shape
            write_cond(f, b, prec + 1)?;
        }
        Condition::Not(inner) => {
            f.write_str("NOT ")?;
            write_cond(f, inner, prec)?;
        }
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

impl Display for Condition {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_cond(f, self, 0)
    }
}

fn write_int(f: &mut impl Write, e: &IntExpr, min_prec: u8) -> fmt::Result {
    match e {
        IntExpr::Literal(v) => write!(f, "{v}"),
        IntExpr::Aggregate { func, column } => {
            let col = column.as_deref().map(quote_ident);
            match (func, col) {
                (IntAggregate::CountAll, _) => f.write_str("COUNT(*)"),
                (IntAggregate::Count, Some(c)) => write!(f, "COUNT({c})"),
                (IntAggregate::CountDistinct, Some(c)) => write!(f, "COUNT(DISTINCT {c})"),
                (IntAggregate::Min, Some(c)) => write!(f, "MIN({c})"),
                (IntAggregate::Max, Some(c)) => write!(f, "MAX({c})"),
                (IntAggregate::Avg, Some(c)) => write!(f, "AVG({c})"),
                (_, None) => Err(fmt::Error),
            }
        }
        IntExpr::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            let paren = prec < min_prec;
            if paren {
                f.write_char('(')?;
            }
            write_int(f, lhs, prec)?;
            write!(f, " {} ", op.symbol())?;
            write_int(f, rhs, prec + 1)?;
            if paren {
                f.write_char(')')?;
            }
            Ok(())
        }
    }
}

impl Display for IntExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_int(f, self, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mql::parse_statement;

    fn roundtrip(s: &str) -> String {
        let stmt = parse_statement(s).unwrap();
        let printed = stmt.to_string();
        let again = parse_statement(&printed).unwrap();
        assert!(stmt.same_structure(&again), "{s}\n{printed}");
        printed
    }

    #[test]
    fn cluster_statement_prints_canonically() {
        assert_eq!(
            roundtrip("generate display of cluster of 3\n algorithm KMeans features headline from ProthomAlo"),
            "GENERATE DISPLAY OF CLUSTER OF 3 ALGORITHM KMeans FEATURES headline FROM ProthomAlo;"
        );
    }

    #[test]
    fn quoting() {
        assert_eq!(quote_ident("district-tag"), "\"district-tag\"");
        assert_eq!(quote_ident("count"), "\"count\"");
        assert_eq!(quote_ident("headline"), "headline");
        assert_eq!(quote_ident("a\"b"), "\"a\"\"b\"");
    }

    #[test]
    fn parenthesization_preserves_shape() {
        let printed = roundtrip("GENERATE CLUSTER OF (1 + 2) * 3 - (4 - 1) FEATURES a FROM t WHERE a = 1 AND (b = 2 OR NOT (c = 3 AND d = 4))");
        assert!(printed.contains("CLUSTER OF (1 + 2) * 3 - (4 - 1)"), "{printed}");
        assert!(printed.contains("a = 1 AND (b = 2 OR NOT (c = 3 AND d = 4))"), "{printed}");
    }

    #[test]
    fn decimals_keep_their_point() {
        let printed =
            roundtrip("GENERATE PREDICTION y WITH MODEL ACCURACY 0.5 FEATURES x FROM t WHERE x > 3.0 AND x < -2.25");
        assert!(printed.contains("x > 3.0"), "{printed}");
        assert!(printed.contains("x < -2.25"), "{printed}");
    }

    #[test]
    fn other_statements() {
        roundtrip("CONSTRUCT MODEL \"my model\" AS CLASSIFICATION INTO 'a b', c ALGORITHM KNN WITH MODEL ACCURACY 0.7 LABEL id FEATURES x, \"y-z\" FROM t WHERE d >= DATE '2020-01-01T10:00:00'");
        roundtrip("INSPECT \"t-1\" APPLY fillnull(x, 'it''s'), dropnull(y), dedupe()");
    }
}
