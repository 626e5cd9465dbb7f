//! Recursive-descent parser for MQL.
//!
//! `docs/mql.ebnf` is the normative grammar; the functions below follow its
//! productions one to one.

use super::ast::*;
use super::error::ParseError;
use super::lexer::{tokenize, Keyword, Token, TokenKind};
use crate::timefmt;

/// Parses exactly one statement. A trailing `;` is optional.
pub fn parse_statement(input: &str) -> Result<MqlStatement, ParseError> {
    let tokens = tokenize(input)?;
    let mut p = Parser::new(input, &tokens);
    if p.at_end() {
        return Err(p.error_here("empty input").expected("GENERATE, CONSTRUCT or INSPECT"));
    }
    let stmt = p.statement()?;
    if !p.at_end() {
        let tok = p.peek().unwrap();
        return Err(ParseError::new(format!("unexpected {} after statement", tok.kind), tok.span)
            .expected("end of input (use a script for several statements)"));
    }
    Ok(stmt)
}

/// Parses `;`-separated statements. The first error aborts the whole script.
pub fn parse_script(input: &str) -> Result<Vec<MqlStatement>, ParseError> {
    let tokens = tokenize(input)?;
    let mut p = Parser::new(input, &tokens);
    let mut out = Vec::new();
    loop {
        while p.eat(&TokenKind::Semicolon) {}
        if p.at_end() {
            return Ok(out);
        }
        out.push(p.statement()?);
    }
}

struct Parser<'a> {
    input: &'a str,
    tokens: &'a [Token],
    pos: usize,
}

/// Optional clauses of a GENERATE body in their required order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Clause {
    Using,
    Accuracy,
    Label,
    Features,
    From,
    Where,
}

impl Clause {
    fn name(self) -> &'static str {
        match self {
            Clause::Using => "USING",
            Clause::Accuracy => "WITH MODEL ACCURACY",
            Clause::Label => "LABEL",
            Clause::Features => "FEATURES",
            Clause::From => "FROM",
            Clause::Where => "WHERE",
        }
    }
}

impl<'a> Parser<'a> {
    fn new(input: &'a str, tokens: &'a [Token]) -> Self {
        Parser { input, tokens, pos: 0 }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'a TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn peek_nth_kind(&self, n: usize) -> Option<&'a TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn advance(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        self.peek_kind() == Some(&TokenKind::Keyword(kw))
    }

    fn eat_keyword(&mut self, kw: Keyword) -> bool {
        self.eat(&TokenKind::Keyword(kw))
    }

    fn here(&self) -> Span {
        match self.peek() {
            Some(t) => t.span,
            None => Span::new(self.input.len(), self.input.len()),
        }
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].span.end
        }
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let message = message.into();
        match self.peek() {
            Some(t) => ParseError::new(format!("{message}, found {}", t.kind), t.span),
            None => ParseError::new(format!("{message}, found end of input"), self.here()),
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> Result<Span, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Keyword(kw) => {
                self.pos += 1;
                Ok(t.span)
            }
            _ => Err(self.error_here(format!("expected {kw}")).expected(kw.as_str())),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Span, ParseError> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                self.pos += 1;
                Ok(t.span)
            }
            _ => Err(self.error_here(format!("expected {kind}")).expected(kind.to_string())),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident { name, .. }, .. }) => {
                self.pos += 1;
                Ok(name.clone())
            }
            Some(Token { kind: TokenKind::Keyword(k), span }) => {
                Err(ParseError::new(format!("{k} is a reserved word and cannot be used as {what}"), *span)
                    .expected(format!("{what} (double-quote reserved words, e.g. \"{}\")", k.as_str().to_lowercase())))
            }
            _ => Err(self.error_here(format!("expected {what}")).expected(what.to_string())),
        }
    }

    fn ident_list(&mut self, what: &str) -> Result<Vec<String>, ParseError> {
        let mut out = vec![self.ident(what)?];
        while self.eat(&TokenKind::Comma) {
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    fn statement(&mut self) -> Result<MqlStatement, ParseError> {
        let start = self.here().start;
        let body = match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Generate)) => {
                self.advance();
                StatementBody::Generate(self.generate_body(false)?)
            }
            Some(TokenKind::Keyword(Keyword::Construct)) => {
                self.advance();
                StatementBody::Construct(self.construct_body()?)
            }
            Some(TokenKind::Keyword(Keyword::Inspect)) => {
                self.advance();
                StatementBody::Inspect(self.inspect_body()?)
            }
            _ => return Err(self.error_here("expected a statement").expected("GENERATE, CONSTRUCT or INSPECT")),
        };
        let mut end = self.prev_end();
        match self.peek_kind() {
            None => {}
            Some(TokenKind::Semicolon) => {
                end = self.advance().unwrap().span.end;
            }
            Some(_) => {
                return Err(self.unexpected_after_clauses(&body));
            }
        }
        Ok(MqlStatement { body, span: Span::new(start, end) })
    }

    fn unexpected_after_clauses(&self, body: &StatementBody) -> ParseError {
        let tok = self.peek().unwrap();
        if let TokenKind::Keyword(kw) = tok.kind {
            if let Some(clause) = clause_of(kw) {
                return ParseError::new(format!("{} clause is out of order or repeated", clause.name()), tok.span)
                    .expected("clauses in the order USING, WITH MODEL ACCURACY, LABEL, FEATURES, FROM, WHERE");
            }
            if kw == Keyword::Over {
                let msg = match body {
                    StatementBody::Generate(GenerateBody { task: MlTask::Cluster { .. }, .. }) => {
                        "CLUSTER does not take an OVER table"
                    }
                    _ => "OVER must directly follow the PREDICTION or CLASSIFICATION clause",
                };
                return ParseError::new(msg, tok.span);
            }
        }
        ParseError::new(format!("unexpected {}", tok.kind), tok.span).expected("`;` or end of input")
    }

    fn generate_body(&mut self, in_construct: bool) -> Result<GenerateBody, ParseError> {
        let mut display = false;
        if self.at_keyword(Keyword::Display) {
            if in_construct {
                return Err(ParseError::new("DISPLAY OF is not allowed in CONSTRUCT", self.here()));
            }
            self.advance();
            self.expect_keyword(Keyword::Of)?;
            display = true;
        }
        let task_span = self.here();
        let task = self.task(in_construct)?;

        let mut body = GenerateBody {
            display,
            task,
            using: None,
            accuracy: None,
            label: Vec::new(),
            features: Vec::new(),
            from: Vec::new(),
            filter: None,
        };
        let mut last: Option<Clause> = None;
        while let Some(clause) = self.peek_kind().and_then(|k| match k {
            TokenKind::Keyword(kw) => clause_of(*kw),
            _ => None,
        }) {
            // `WITH` only opens a clause when followed by MODEL ACCURACY
            if clause == Clause::Accuracy && self.peek_nth_kind(1) != Some(&TokenKind::Keyword(Keyword::Model)) {
                break;
            }
            if let Some(prev) = last {
                if clause <= prev {
                    let msg = if clause == prev {
                        format!("duplicate {} clause", clause.name())
                    } else {
                        format!("{} clause must come before {}", clause.name(), prev.name())
                    };
                    return Err(ParseError::new(msg, self.here())
                        .expected("clauses in the order USING, WITH MODEL ACCURACY, LABEL, FEATURES, FROM, WHERE"));
                }
            }
            if clause == Clause::Where && body.from.is_empty() {
                return Err(ParseError::new("FROM required before WHERE", self.here()).expected("FROM"));
            }
            last = Some(clause);
            match clause {
                Clause::Using => body.using = Some(self.using_clause(in_construct)?),
                Clause::Accuracy => body.accuracy = Some(self.accuracy_clause()?),
                Clause::Label => {
                    self.advance();
                    body.label = self.ident_list("a label column")?;
                }
                Clause::Features => {
                    self.advance();
                    body.features = self.ident_list("a feature column")?;
                }
                Clause::From => {
                    self.advance();
                    body.from = self.ident_list("a table name")?;
                }
                Clause::Where => {
                    self.advance();
                    body.filter = Some(self.condition()?);
                }
            }
        }

        if body.from.is_empty() {
            return Err(ParseError::new("FROM required", self.here()).expected("FROM"));
        }
        let uses_model = matches!(body.using, Some(Using::Model(_)));
        if body.features.is_empty() && !uses_model {
            return Err(
                ParseError::new("FEATURES required unless USING MODEL is given", task_span).expected("FEATURES")
            );
        }
        Ok(body)
    }

    fn task(&mut self, in_construct: bool) -> Result<MlTask, ParseError> {
        let tok = self.peek();
        let task = match tok.map(|t| &t.kind) {
            Some(TokenKind::Keyword(Keyword::Prediction)) => {
                self.advance();
                let target = self.ident("a target column")?;
                let over = self.over(in_construct)?;
                MlTask::Prediction { target, over }
            }
            Some(TokenKind::Keyword(Keyword::Classification)) => {
                let start = self.advance().unwrap().span;
                self.expect_keyword(Keyword::Into)?;
                let mut labels = vec![self.class_label()?];
                while self.eat(&TokenKind::Comma) {
                    labels.push(self.class_label()?);
                }
                let span = start.to(Span::new(self.prev_end(), self.prev_end()));
                if labels.len() < 2 {
                    return Err(ParseError::new("CLASSIFICATION needs at least 2 labels", span)
                        .expected("`,` and another label"));
                }
                for (i, l) in labels.iter().enumerate() {
                    if labels[..i].contains(l) {
                        return Err(ParseError::new(format!("duplicate class label '{l}'"), span));
                    }
                }
                let over = self.over(in_construct)?;
                MlTask::Classification { labels, over }
            }
            Some(TokenKind::Keyword(Keyword::Cluster)) => {
                self.advance();
                self.expect_keyword(Keyword::Of)?;
                let start = self.here().start;
                let k = self.int_expr()?;
                let span = Span::new(start, self.prev_end());
                if let Some(v) = k.constant_value() {
                    match v {
                        Ok(v) if v < 1 => {
                            return Err(ParseError::new(format!("cluster count must be at least 1, got {v}"), span))
                        }
                        Err(e) => return Err(ParseError::new(e, span)),
                        Ok(_) => {}
                    }
                }
                if self.at_keyword(Keyword::Over) {
                    return Err(ParseError::new("CLUSTER does not take an OVER table", self.here()));
                }
                MlTask::Cluster { k }
            }
            _ => return Err(self.error_here("expected an ML task").expected("PREDICTION, CLASSIFICATION or CLUSTER")),
        };
        Ok(task)
    }

    fn over(&mut self, in_construct: bool) -> Result<Option<String>, ParseError> {
        if !self.at_keyword(Keyword::Over) {
            return Ok(None);
        }
        if in_construct {
            return Err(ParseError::new("OVER is not allowed in CONSTRUCT", self.here()));
        }
        self.advance();
        Ok(Some(self.ident("a table name")?))
    }

    fn class_label(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident { name, .. }, .. })
            | Some(Token { kind: TokenKind::Str(name), .. }) => {
                self.pos += 1;
                Ok(name.clone())
            }
            Some(Token { kind: TokenKind::Int(v), .. }) => {
                self.pos += 1;
                Ok(v.to_string())
            }
            _ => Err(self.error_here("expected a class label").expected("a name or quoted string")),
        }
    }

    fn using_clause(&mut self, in_construct: bool) -> Result<Using, ParseError> {
        self.eat_keyword(Keyword::Using);
        let span = self.here();
        if self.eat_keyword(Keyword::Model) {
            if in_construct {
                return Err(ParseError::new("CONSTRUCT cannot reuse a stored model", span));
            }
            return Ok(Using::Model(self.ident("a model name")?));
        }
        if self.eat_keyword(Keyword::Algorithm) {
            return Ok(Using::Algorithm(self.ident("an algorithm name")?));
        }
        Err(self.error_here("expected MODEL or ALGORITHM").expected("MODEL or ALGORITHM"))
    }

    fn accuracy_clause(&mut self) -> Result<f64, ParseError> {
        self.expect_keyword(Keyword::With)?;
        self.expect_keyword(Keyword::Model)?;
        self.expect_keyword(Keyword::Accuracy)?;
        let tok = self.peek();
        let value = match tok.map(|t| &t.kind) {
            Some(TokenKind::Decimal(v)) => *v,
            Some(TokenKind::Int(v)) => *v as f64,
            _ => return Err(self.error_here("expected an accuracy threshold").expected("a number in (0,1)")),
        };
        let span = tok.unwrap().span;
        self.advance();
        if !(value > 0.0 && value < 1.0) {
            return Err(ParseError::new(format!("accuracy threshold {value} must lie strictly between 0 and 1"), span)
                .expected("a number in (0,1)"));
        }
        Ok(value)
    }

    fn construct_body(&mut self) -> Result<ConstructBody, ParseError> {
        self.expect_keyword(Keyword::Model)?;
        let model = self.ident("a model name")?;
        self.expect_keyword(Keyword::As)?;
        let body = self.generate_body(true)?;
        Ok(ConstructBody { model, body })
    }

    fn inspect_body(&mut self) -> Result<InspectBody, ParseError> {
        let table = self.ident("a table name")?;
        self.expect_keyword(Keyword::Apply)?;
        let mut directives = vec![self.directive()?];
        while self.eat(&TokenKind::Comma) {
            directives.push(self.directive()?);
        }
        Ok(InspectBody { table, directives })
    }

    fn directive(&mut self) -> Result<InspectDirective, ParseError> {
        let span = self.here();
        let name = match self.peek_kind() {
            Some(TokenKind::Ident { name, quoted: false }) => name.to_ascii_lowercase(),
            _ => {
                return Err(self
                    .error_here("expected a cleaning directive")
                    .expected("dropnull(col), fillnull(col, value) or dedupe()"))
            }
        };
        self.advance();
        self.expect(TokenKind::LParen)?;
        let directive = match name.as_str() {
            "dropnull" => InspectDirective::DropNull(self.ident("a column name")?),
            "fillnull" => {
                let col = self.ident("a column name")?;
                self.expect(TokenKind::Comma)?;
                InspectDirective::FillNull(col, self.literal()?)
            }
            "dedupe" => InspectDirective::Dedupe,
            other => {
                return Err(ParseError::new(format!("unknown directive `{other}`"), span)
                    .expected("dropnull, fillnull or dedupe"))
            }
        };
        self.expect(TokenKind::RParen)?;
        Ok(directive)
    }

    fn condition(&mut self) -> Result<Condition, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat_keyword(Keyword::Or) {
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Condition, ParseError> {
        let mut lhs = self.negation()?;
        while self.eat_keyword(Keyword::And) {
            lhs = lhs.and(self.negation()?);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> Result<Condition, ParseError> {
        if self.eat_keyword(Keyword::Not) {
            return Ok(self.negation()?.not());
        }
        if self.eat(&TokenKind::LParen) {
            let inner = self.condition()?;
            self.expect(TokenKind::RParen)?;
            return Ok(inner);
        }
        let left = self.operand()?;
        let op = match self.peek_kind() {
            Some(TokenKind::Eq) => CmpOp::Eq,
            Some(TokenKind::Ne) => CmpOp::Ne,
            Some(TokenKind::Lt) => CmpOp::Lt,
            Some(TokenKind::Le) => CmpOp::Le,
            Some(TokenKind::Gt) => CmpOp::Gt,
            Some(TokenKind::Ge) => CmpOp::Ge,
            _ => return Err(self.error_here("expected a comparison operator").expected("=, <>, <, <=, > or >=")),
        };
        self.advance();
        let right = self.operand()?;
        Ok(Condition::compare(left, op, right))
    }

    fn operand(&mut self) -> Result<Operand, ParseError> {
        match self.peek_kind() {
            Some(TokenKind::Ident { name, .. }) => {
                self.advance();
                Ok(Operand::Column(name.clone()))
            }
            _ => Ok(Operand::Literal(self.literal()?)),
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let span = self.here();
        match self.peek_kind() {
            Some(TokenKind::Str(s)) => {
                self.advance();
                Ok(Literal::Text(s.clone()))
            }
            Some(TokenKind::Int(v)) => {
                self.advance();
                Ok(Literal::Int(*v))
            }
            Some(TokenKind::Decimal(v)) => {
                self.advance();
                Ok(Literal::Decimal(*v))
            }
            Some(TokenKind::Minus) => {
                self.advance();
                match self.peek_kind() {
                    Some(TokenKind::Int(v)) => {
                        self.advance();
                        Ok(Literal::Int(-v))
                    }
                    Some(TokenKind::Decimal(v)) => {
                        self.advance();
                        Ok(Literal::Decimal(-v))
                    }
                    _ => Err(self.error_here("expected a number after `-`").expected("a number")),
                }
            }
            Some(TokenKind::Keyword(Keyword::Date)) => {
                self.advance();
                match self.peek() {
                    Some(Token { kind: TokenKind::Str(s), span }) => {
                        self.advance();
                        if timefmt::parse_date(s).is_some() || timefmt::parse_timestamp(s).is_some() {
                            Ok(Literal::Date(s.clone()))
                        } else {
                            Err(ParseError::new(format!("invalid ISO-8601 date '{s}'"), *span)
                                .expected("'YYYY-MM-DD' or 'YYYY-MM-DDThh:mm:ss'"))
                        }
                    }
                    _ => Err(self.error_here("expected a quoted date after DATE").expected("'YYYY-MM-DD'")),
                }
            }
            _ => Err(ParseError::new(
                match self.peek() {
                    Some(t) => format!("expected a column or literal, found {}", t.kind),
                    None => "expected a column or literal, found end of input".to_string(),
                },
                span,
            )
            .expected("a column, string, number or DATE literal")),
        }
    }

    fn int_expr(&mut self) -> Result<IntExpr, ParseError> {
        let mut lhs = self.int_term()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => ArithOp::Add,
                Some(TokenKind::Minus) => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            lhs = IntExpr::binary(op, lhs, self.int_term()?);
        }
    }

    fn int_term(&mut self) -> Result<IntExpr, ParseError> {
        let mut lhs = self.int_factor()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Star) => ArithOp::Mul,
                Some(TokenKind::Slash) => ArithOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            lhs = IntExpr::binary(op, lhs, self.int_factor()?);
        }
    }

    fn int_factor(&mut self) -> Result<IntExpr, ParseError> {
        let func = match self.peek_kind() {
            Some(TokenKind::Int(v)) => {
                self.advance();
                return Ok(IntExpr::Literal(*v));
            }
            Some(TokenKind::LParen) => {
                self.advance();
                let inner = self.int_expr()?;
                self.expect(TokenKind::RParen)?;
                return Ok(inner);
            }
            Some(TokenKind::Keyword(Keyword::Count)) => IntAggregate::Count,
            Some(TokenKind::Keyword(Keyword::Min)) => IntAggregate::Min,
            Some(TokenKind::Keyword(Keyword::Max)) => IntAggregate::Max,
            Some(TokenKind::Keyword(Keyword::Avg)) => IntAggregate::Avg,
            _ => {
                return Err(self
                    .error_here("expected an integer expression")
                    .expected("an integer, `(`, COUNT, MIN, MAX or AVG"))
            }
        };
        self.advance();
        self.expect(TokenKind::LParen)?;
        let expr = if func == IntAggregate::Count && self.eat(&TokenKind::Star) {
            IntExpr::Aggregate { func: IntAggregate::CountAll, column: None }
        } else if func == IntAggregate::Count && self.eat_keyword(Keyword::Distinct) {
            IntExpr::Aggregate { func: IntAggregate::CountDistinct, column: Some(self.ident("a column name")?) }
        } else {
            IntExpr::Aggregate { func, column: Some(self.ident("a column name")?) }
        };
        self.expect(TokenKind::RParen)?;
        Ok(expr)
    }
}

fn clause_of(kw: Keyword) -> Option<Clause> {
    match kw {
        Keyword::Using | Keyword::Model | Keyword::Algorithm => Some(Clause::Using),
        Keyword::With => Some(Clause::Accuracy),
        Keyword::Label => Some(Clause::Label),
        Keyword::Features => Some(Clause::Features),
        Keyword::From => Some(Clause::From),
        Keyword::Where => Some(Clause::Where),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q4: &str = "GENERATE DISPLAY OF CLUSTER OF 3 ALGORITHM KMeans FEATURES headline FROM ProthomAlo;";

    fn generate(s: &str) -> GenerateBody {
        parse_statement(s).unwrap().as_generate().cloned().unwrap()
    }

    #[test]
    fn cluster_statement_ast() {
        let stmt = parse_statement(Q4).unwrap();
        assert_eq!(stmt.kind(), StatementKind::Generate);
        assert_eq!(stmt.span, Span::new(0, Q4.len()));
        let g = stmt.as_generate().unwrap();
        assert!(g.display);
        assert_eq!(g.task, MlTask::Cluster { k: IntExpr::Literal(3) });
        assert_eq!(g.using, Some(Using::Algorithm("KMeans".into())));
        assert_eq!(g.features, vec!["headline"]);
        assert_eq!(g.from, vec!["ProthomAlo"]);
        assert!(g.filter.is_none());
        assert!(g.accuracy.is_none());
        assert!(g.label.is_empty());
    }

    #[test]
    fn multi_line_layout_parses_the_same() {
        let text = "   GENERATE DISPLAY OF CLUSTER OF 3 \n   ALGORITHM KMeans FEATURES headline \n   FROM ProthomAlo;";
        assert!(parse_statement(text).unwrap().same_structure(&parse_statement(Q4).unwrap()));
    }

    #[test]
    fn prediction_with_stored_model_needs_no_features() {
        let g = generate("GENERATE PREDICTION cases OVER unknowns USING MODEL m1 FROM ngorep;");
        assert_eq!(g.task, MlTask::Prediction { target: "cases".into(), over: Some("unknowns".into()) });
        assert_eq!(g.using, Some(Using::Model("m1".into())));
        assert!(g.features.is_empty());
        assert_eq!(g.from, vec!["ngorep"]);
    }

    #[test]
    fn from_is_required() {
        let err = parse_statement("GENERATE CLUSTER OF 3 FEATURES headline;").unwrap_err();
        assert!(err.message.contains("FROM required"), "{err}");
        assert_eq!(err.expected.as_deref(), Some("FROM"));
    }

    #[test]
    fn features_required_without_model() {
        let err = parse_statement("GENERATE CLUSTER OF 3 FROM t").unwrap_err();
        assert!(err.message.contains("FEATURES required"));
    }

    #[test]
    fn accuracy_must_be_in_open_interval() {
        for bad in ["1.5", "1", "0", "1.0"] {
            let text = format!("GENERATE PREDICTION y WITH MODEL ACCURACY {bad} FEATURES x FROM t");
            let err = parse_statement(&text).unwrap_err();
            assert!(err.message.contains("strictly between 0 and 1"), "{bad}: {err}");
        }
        let g = generate("GENERATE PREDICTION y WITH MODEL ACCURACY 0.9 FEATURES x FROM t");
        assert_eq!(g.accuracy, Some(0.9));
    }

    #[test]
    fn classification_needs_two_distinct_labels() {
        assert!(parse_statement("GENERATE CLASSIFICATION INTO a FEATURES x FROM t").is_err());
        assert!(parse_statement("GENERATE CLASSIFICATION INTO a, a FEATURES x FROM t").is_err());
        let g = generate("GENERATE CLASSIFICATION INTO Dhaka, 'Sylhet', 3 OVER u FEATURES x FROM t");
        assert_eq!(
            g.task,
            MlTask::Classification {
                labels: vec!["Dhaka".into(), "Sylhet".into(), "3".into()],
                over: Some("u".into())
            }
        );
    }

    #[test]
    fn clause_order_is_enforced() {
        let err = parse_statement("GENERATE CLUSTER OF 2 FEATURES a LABEL b FROM t").unwrap_err();
        assert!(err.message.contains("LABEL clause must come before FEATURES"), "{err}");
        let err = parse_statement("GENERATE CLUSTER OF 2 FEATURES a FROM t WHERE x = 1 FROM u").unwrap_err();
        assert!(err.message.contains("FROM clause must come before WHERE"), "{err}");
        let err = parse_statement("GENERATE CLUSTER OF 2 FEATURES a WHERE x = 1").unwrap_err();
        assert!(err.message.contains("FROM required"), "{err}");
    }

    #[test]
    fn cluster_rejects_over_and_bad_constants() {
        let err = parse_statement("GENERATE CLUSTER OF 2 OVER u FEATURES a FROM t").unwrap_err();
        assert!(err.message.contains("CLUSTER does not take an OVER"));
        assert!(parse_statement("GENERATE CLUSTER OF 0 FEATURES a FROM t").is_err());
        assert!(parse_statement("GENERATE CLUSTER OF 4 / 0 FEATURES a FROM t").is_err());
    }

    #[test]
    fn cluster_count_expression_with_aggregates() {
        let g = generate("GENERATE CLUSTER OF COUNT(DISTINCT \"division-tag\") - 1 FEATURES a FROM t");
        assert_eq!(
            g.task,
            MlTask::Cluster {
                k: IntExpr::binary(
                    ArithOp::Sub,
                    IntExpr::Aggregate { func: IntAggregate::CountDistinct, column: Some("division-tag".into()) },
                    IntExpr::Literal(1)
                )
            }
        );
    }

    #[test]
    fn where_condition_precedence() {
        let g =
            generate("GENERATE CLUSTER OF 2 FEATURES a FROM t WHERE NOT a = 1 OR b = 'x' AND c >= DATE '2020-01-01'");
        let expected =
            Condition::compare(Operand::Column("a".into()), CmpOp::Eq, Operand::Literal(Literal::Int(1))).not().or(
                Condition::compare(Operand::Column("b".into()), CmpOp::Eq, Operand::Literal(Literal::Text("x".into())))
                    .and(Condition::compare(
                        Operand::Column("c".into()),
                        CmpOp::Ge,
                        Operand::Literal(Literal::Date("2020-01-01".into())),
                    )),
            );
        assert_eq!(g.filter, Some(expected));
    }

    #[test]
    fn invalid_date_literal() {
        assert!(parse_statement("GENERATE CLUSTER OF 2 FEATURES a FROM t WHERE d = DATE '2020-13-01'").is_err());
    }

    #[test]
    fn construct_and_inspect() {
        let stmt = parse_statement("CONSTRUCT MODEL m1 AS PREDICTION y ALGORITHM OLS FEATURES x FROM t;").unwrap();
        assert_eq!(stmt.kind(), StatementKind::Construct);
        assert!(parse_statement("CONSTRUCT MODEL m1 AS DISPLAY OF CLUSTER OF 2 FEATURES x FROM t").is_err());
        assert!(parse_statement("CONSTRUCT MODEL m1 AS PREDICTION y OVER u FEATURES x FROM t").is_err());
        assert!(parse_statement("CONSTRUCT MODEL m1 AS PREDICTION y USING MODEL m0 FROM t").is_err());

        let stmt = parse_statement("INSPECT t APPLY dropnull(a), fillnull(\"offset\", 0), dedupe()").unwrap();
        let StatementBody::Inspect(body) = stmt.body else { panic!() };
        assert_eq!(
            body.directives,
            vec![
                InspectDirective::DropNull("a".into()),
                InspectDirective::FillNull("offset".into(), Literal::Int(0)),
                InspectDirective::Dedupe
            ]
        );
        assert!(parse_statement("INSPECT t APPLY explode(a)").is_err());
    }

    #[test]
    fn reserved_word_as_column_needs_quotes() {
        let err = parse_statement("GENERATE PREDICTION count FEATURES year FROM ngorep").unwrap_err();
        assert!(err.message.contains("reserved"));
        let g = generate("GENERATE PREDICTION \"count\" FEATURES year FROM ngorep");
        assert_eq!(g.task, MlTask::Prediction { target: "count".into(), over: None });
    }

    #[test]
    fn script_parsing() {
        let two = parse_script("GENERATE CLUSTER OF 2 FEATURES a FROM t; INSPECT t APPLY dedupe()").unwrap();
        assert_eq!(two.len(), 2);
        assert!(parse_script("  \n ").unwrap().is_empty());

        let text = "GENERATE CLUSTER OF 2 FEATURES a FROM t; GENERATE CLUSTER OF 2 FEATURES a;";
        let err = parse_script(text).unwrap_err();
        assert!(err.span.start > text.find(';').unwrap());
    }

    #[test]
    fn trailing_tokens_rejected_by_single_statement_parser() {
        assert!(parse_statement("GENERATE CLUSTER OF 2 FEATURES a FROM t; INSPECT t APPLY dedupe()").is_err());
        assert!(parse_statement("").is_err());
    }
}
