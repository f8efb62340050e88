use super::parser::ParseError;
use super::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Slash,
    Bang,
    Question,
    Eq,
    Neq,
    Assign,
    Arrow,
    Dash,
    Star,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", punct(other)),
        }
    }
}

fn punct(t: &Tok) -> &'static str {
    match t {
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::Comma => ",",
        Tok::Semi => ";",
        Tok::Slash => "/",
        Tok::Bang => "!",
        Tok::Question => "?",
        Tok::Eq => "=",
        Tok::Neq => "!=",
        Tok::Assign => ":=",
        Tok::Arrow => "->",
        Tok::Dash => "-",
        Tok::Star => "*",
        _ => "",
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        let next = chars.get(i + 1).copied();
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && next == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Ident(word), span));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse().map_err(|_| {
                ParseError::at(span, format!("integer literal `{digits}` out of range"))
            })?;
            col += i - start;
            out.push((Tok::Int(n), span));
            continue;
        }
        let (tok, len) = match (c, next) {
            ('!', Some('=')) => (Tok::Neq, 2),
            (':', Some('=')) => (Tok::Assign, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            (',', _) => (Tok::Comma, 1),
            (';', _) => (Tok::Semi, 1),
            ('/', _) => (Tok::Slash, 1),
            ('!', _) => (Tok::Bang, 1),
            ('?', _) => (Tok::Question, 1),
            ('=', _) => (Tok::Eq, 1),
            ('-', _) => (Tok::Dash, 1),
            ('*', _) => (Tok::Star, 1),
            ('≠', _) => (Tok::Neq, 1),
            ('⊥', _) => (Tok::Ident("bot".into()), 1),
            _ => return Err(ParseError::at(span, format!("unexpected character `{c}`"))),
        };
        out.push((tok, span));
        i += len;
        col += len;
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}
