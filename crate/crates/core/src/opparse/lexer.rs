use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// Generator name with optional `_j` index suffix.
    Ident { name: String, index: Option<usize> },
    Number(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset of the first character.
    pub offset: usize,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident { name, index: Some(j) } => format!("'{name}_{j}'"),
            TokenKind::Ident { name, index: None } => format!("'{name}'"),
            TokenKind::Number(n) => format!("number {n}"),
            TokenKind::Plus => "'+'".into(),
            TokenKind::Minus => "'-'".into(),
            TokenKind::Star => "'*'".into(),
            TokenKind::Caret => "'^'".into(),
            TokenKind::Slash => "'/'".into(),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
            TokenKind::End => "end of input".into(),
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b'+' => Some(TokenKind::Plus),
            b'-' => Some(TokenKind::Minus),
            b'*' => Some(TokenKind::Star),
            b'^' => Some(TokenKind::Caret),
            b'/' => Some(TokenKind::Slash),
            b'(' => Some(TokenKind::LParen),
            b')' => Some(TokenKind::RParen),
            _ => None,
        };
        if let Some(kind) = simple {
            out.push(Token { kind, offset: start });
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("ascii digits");
            out.push(Token { kind: TokenKind::Number(n), offset: start });
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            let name = text[start..i].to_string();
            let mut index = None;
            if i < bytes.len() && bytes[i] == b'_' {
                let us = i;
                i += 1;
                let ds = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(syntax(us, "expected a variable index after '_'"));
                }
                let j: usize = text[ds..i]
                    .parse()
                    .map_err(|_| syntax(ds, "variable index too large"))?;
                if j == 0 {
                    return Err(syntax(ds, "variable indices start at 1"));
                }
                index = Some(j);
            }
            out.push(Token { kind: TokenKind::Ident { name, index }, offset: start });
            continue;
        }
        let ch = text[start..].chars().next().expect("non-empty remainder");
        return Err(syntax(start, format!("unexpected character '{ch}'")));
    }
    out.push(Token { kind: TokenKind::End, offset: text.len() });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_are_bytes() {
        let toks = tokenize("th_2 * 3/4").unwrap();
        let offsets: Vec<usize> = toks.iter().map(|t| t.offset).collect();
        assert_eq!(offsets, vec![0, 5, 7, 8, 9, 10]);
        assert_eq!(
            toks[0].kind,
            TokenKind::Ident { name: "th".into(), index: Some(2) }
        );
    }

    #[test]
    fn bad_characters() {
        assert_eq!(
            tokenize("t $").unwrap_err(),
            Error::Syntax { offset: 2, message: "unexpected character '$'".into() }
        );
        assert!(matches!(tokenize("t_").unwrap_err(), Error::Syntax { offset: 1, .. }));
        assert!(matches!(tokenize("t_0").unwrap_err(), Error::Syntax { offset: 2, .. }));
    }
}
