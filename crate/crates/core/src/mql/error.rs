use thiserror::Error;

use super::ast::Span;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {}", span.start)]
pub struct LexError {
    pub message: String,
    pub span: Span,
}

impl LexError {
    pub fn new(message: impl Into<String>, span: Span) -> Self {
        LexError { message: message.into(), span }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {}", span.start)]
pub struct ParseError {
    pub message: String,
    pub span: Span,
    /// What the parser would have accepted at `span`, when that is known.
    pub expected: Option<String>,
}

impl ParseError {
    pub fn new(message: impl Into<String>, span: Span) -> Self {
        ParseError { message: message.into(), span, expected: None }
    }

    pub fn expected(mut self, hint: impl Into<String>) -> Self {
        self.expected = Some(hint.into());
        self
    }

    /// Renders the offending line with a caret underline, compiler style.
    pub fn render(&self, input: &str) -> String {
        render_caret(input, self.span, &self.to_string(), self.expected.as_deref())
    }
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError { message: e.message, span: e.span, expected: None }
    }
}

pub fn render_caret(input: &str, span: Span, message: &str, expected: Option<&str>) -> String {
    let start = span.start.min(input.len());
    let line_start = input[..start].rfind('\n').map_or(0, |i| i + 1);
    let line_end = input[start..].find('\n').map_or(input.len(), |i| start + i);
    let line_no = input[..line_start].matches('\n').count() + 1;
    let line = &input[line_start..line_end];
    let col = input[line_start..start].chars().count();
    let width = input[start..span.end.clamp(start, line_end)].chars().count().max(1);
    let gutter = format!("{line_no} | ");
    let mut out = format!("error: {message}\n{gutter}{line}\n");
    out.push_str(&" ".repeat(gutter.len() + col));
    out.push_str(&"^".repeat(width));
    if let Some(exp) = expected {
        out.push_str(&format!(" expected {exp}"));
    }
    out.push('\n');
    out
}
