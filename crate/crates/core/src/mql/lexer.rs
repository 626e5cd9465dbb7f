use std::fmt;

use super::ast::Span;
use super::error::LexError;

macro_rules! keywords {
    ($($variant:ident => $text:literal),* $(,)?) => {
        /// Reserved words. Matching is case-insensitive; a reserved word can
        /// still be used as a name by double-quoting it (`"count"`).
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Keyword {
            $($variant),*
        }

        impl Keyword {
            pub const ALL: &'static [Keyword] = &[$(Keyword::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Keyword::$variant => $text),*
                }
            }

            pub fn lookup(word: &str) -> Option<Keyword> {
                $(
                    if word.eq_ignore_ascii_case($text) {
                        return Some(Keyword::$variant);
                    }
                )*
                None
            }
        }
    };
}

keywords! {
    Generate => "GENERATE",
    Display => "DISPLAY",
    Of => "OF",
    Prediction => "PREDICTION",
    Classification => "CLASSIFICATION",
    Into => "INTO",
    Cluster => "CLUSTER",
    Over => "OVER",
    Using => "USING",
    Model => "MODEL",
    Algorithm => "ALGORITHM",
    With => "WITH",
    Accuracy => "ACCURACY",
    Label => "LABEL",
    Features => "FEATURES",
    From => "FROM",
    Where => "WHERE",
    And => "AND",
    Or => "OR",
    Not => "NOT",
    Count => "COUNT",
    Distinct => "DISTINCT",
    Min => "MIN",
    Max => "MAX",
    Avg => "AVG",
    Construct => "CONSTRUCT",
    As => "AS",
    Inspect => "INSPECT",
    Apply => "APPLY",
    Date => "DATE",
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    /// Bare or double-quoted identifier, with quotes and escapes removed.
    Ident {
        name: String,
        quoted: bool,
    },
    Int(i64),
    Decimal(f64),
    Str(String),
    Comma,
    Semicolon,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "{k}"),
            TokenKind::Ident { name, .. } => write!(f, "identifier `{name}`"),
            TokenKind::Int(v) => write!(f, "integer {v}"),
            TokenKind::Decimal(v) => write!(f, "number {v}"),
            TokenKind::Str(s) => write!(f, "string '{s}'"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Semicolon => f.write_str("`;`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Plus => f.write_str("`+`"),
            TokenKind::Minus => f.write_str("`-`"),
            TokenKind::Star => f.write_str("`*`"),
            TokenKind::Slash => f.write_str("`/`"),
            TokenKind::Eq => f.write_str("`=`"),
            TokenKind::Ne => f.write_str("`<>`"),
            TokenKind::Lt => f.write_str("`<`"),
            TokenKind::Le => f.write_str("`<=`"),
            TokenKind::Gt => f.write_str("`>`"),
            TokenKind::Ge => f.write_str("`>=`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Splits MQL text into tokens.
///
/// Whitespace (including newlines) only separates tokens. `--` starts a
/// comment running to the end of the line.
pub fn tokenize(input: &str) -> Result<Vec<Token>, LexError> {
    Lexer { src: input, pos: 0 }.run()
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        let mut tokens = Vec::new();
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '-' && self.peek_at(1) == Some('-') {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
                continue;
            }
            let kind = match c {
                '\'' => TokenKind::Str(self.quoted('\'', "string literal")?),
                '"' => TokenKind::Ident { name: self.quoted('"', "quoted identifier")?, quoted: true },
                c if c.is_ascii_digit() => self.number()?,
                c if c.is_ascii_alphabetic() || c == '_' => {
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                        self.bump();
                    }
                    let word = &self.src[start..self.pos];
                    match Keyword::lookup(word) {
                        Some(k) => TokenKind::Keyword(k),
                        None => TokenKind::Ident { name: word.to_string(), quoted: false },
                    }
                }
                _ => {
                    self.bump();
                    match c {
                        ',' => TokenKind::Comma,
                        ';' => TokenKind::Semicolon,
                        '(' => TokenKind::LParen,
                        ')' => TokenKind::RParen,
                        '+' => TokenKind::Plus,
                        '-' => TokenKind::Minus,
                        '*' => TokenKind::Star,
                        '/' => TokenKind::Slash,
                        '=' => TokenKind::Eq,
                        '<' => match self.peek() {
                            Some('=') => {
                                self.bump();
                                TokenKind::Le
                            }
                            Some('>') => {
                                self.bump();
                                TokenKind::Ne
                            }
                            _ => TokenKind::Lt,
                        },
                        '>' => {
                            if self.peek() == Some('=') {
                                self.bump();
                                TokenKind::Ge
                            } else {
                                TokenKind::Gt
                            }
                        }
                        '!' if self.peek() == Some('=') => {
                            self.bump();
                            TokenKind::Ne
                        }
                        '≠' => TokenKind::Ne,
                        '≤' => TokenKind::Le,
                        '≥' => TokenKind::Ge,
                        other => {
                            return Err(LexError::new(
                                format!("illegal character {other:?}"),
                                Span::new(start, self.pos),
                            ))
                        }
                    }
                }
            };
            tokens.push(Token { kind, span: Span::new(start, self.pos) });
        }
        Ok(tokens)
    }

    /// Reads a literal delimited by `quote`, where a doubled quote escapes itself.
    fn quoted(&mut self, quote: char, what: &str) -> Result<String, LexError> {
        let start = self.pos;
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(LexError::new(format!("unterminated {what}"), Span::new(start, self.src.len()))),
                Some(c) if c == quote => {
                    if self.peek() == Some(quote) {
                        self.bump();
                        out.push(quote);
                    } else {
                        return Ok(out);
                    }
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn number(&mut self) -> Result<TokenKind, LexError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let is_decimal = self.peek() == Some('.') && matches!(self.peek_at(1), Some(c) if c.is_ascii_digit());
        if is_decimal {
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_') {
            return Err(LexError::new("identifiers cannot start with a digit", Span::new(start, self.pos + 1)));
        }
        let text = &self.src[start..self.pos];
        let span = Span::new(start, self.pos);
        if is_decimal {
            text.parse::<f64>()
                .map(TokenKind::Decimal)
                .map_err(|_| LexError::new(format!("invalid number {text}"), span))
        } else {
            text.parse::<i64>()
                .map(TokenKind::Int)
                .map_err(|_| LexError::new(format!("integer {text} out of range"), span))
        }
    }
}
