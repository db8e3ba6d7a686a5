use std::fmt;

use super::diagnostic::Diagnostic;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Ident(String),
    Int(String),
    /// `d/dNAME`
    Deriv(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Eq,
    Colon,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(s) => write!(f, "integer `{s}`"),
            Tok::Deriv(s) => write!(f, "`d/d{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

/// 1-based source position.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `text` into tokens. `#` starts a comment running to the end of the line.
pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
            }
            out.push(Token { tok: Tok::Int(chars[start..i].iter().collect()), pos });
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let word: String = chars[start..i].iter().collect();
            if word == "d"
                && i + 2 < chars.len()
                && chars[i] == '/'
                && chars[i + 1] == 'd'
                && is_ident_start(chars[i + 2])
            {
                advance(&mut i, &mut line, &mut col, 2);
                let s = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    advance(&mut i, &mut line, &mut col, 1);
                }
                out.push(Token { tok: Tok::Deriv(chars[s..i].iter().collect()), pos });
            } else {
                out.push(Token { tok: Tok::Ident(word), pos });
            }
            continue;
        }
        let (tok, len) = match c {
            '+' => (Tok::Plus, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            '-' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            '/' => (Tok::Slash, 1),
            '^' => (Tok::Caret, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ';' => (Tok::Semi, 1),
            ',' => (Tok::Comma, 1),
            '=' => (Tok::Eq, 1),
            ':' => (Tok::Colon, 1),
            other => {
                return Err(Diagnostic::new(pos, "lex", format!("unexpected character `{other}`")));
            }
        };
        advance(&mut i, &mut line, &mut col, len);
        out.push(Token { tok, pos });
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn derivation_operators_are_single_tokens() {
        assert_eq!(
            kinds("t1*d/dt1"),
            vec![Tok::Ident("t1".into()), Tok::Star, Tok::Deriv("t1".into()), Tok::Eof]
        );
        assert_eq!(
            kinds("d=4"),
            vec![Tok::Ident("d".into()), Tok::Eq, Tok::Int("4".into()), Tok::Eof]
        );
    }

    #[test]
    fn arrows_and_comments() {
        assert_eq!(
            kinds("A->B # note\n;"),
            vec![Tok::Ident("A".into()), Tok::Arrow, Tok::Ident("B".into()), Tok::Semi, Tok::Eof]
        );
    }

    #[test]
    fn positions_are_tracked() {
        let toks = lex("ring\n  p").unwrap();
        assert_eq!(toks[1].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn stray_character_is_a_positioned_error() {
        let e = lex("x1 $").unwrap_err();
        assert_eq!((e.line, e.col, e.code), (1, 4, "lex"));
    }
}
