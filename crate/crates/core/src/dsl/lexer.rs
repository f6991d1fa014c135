use std::fmt;

use crate::error::LexError;

#[derive(Clone, Debug, PartialEq)]
pub enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Number(v) => write!(f, "number {v}"),
            Token::Ident(name) => write!(f, "identifier `{name}`"),
            Token::Plus => f.write_str("`+`"),
            Token::Minus => f.write_str("`-`"),
            Token::Star => f.write_str("`*`"),
            Token::Slash => f.write_str("`/`"),
            Token::Caret => f.write_str("`^`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
        }
    }
}

/// A token with the byte offset where it starts.
#[derive(Clone, Debug, PartialEq)]
pub struct Spanned {
    pub token: Token,
    pub offset: usize,
}

pub fn tokenize(source: &str) -> Result<Vec<Spanned>, LexError> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        let simple = match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(token) = simple {
            out.push(Spanned { token, offset: start });
            i += 1;
            continue;
        }
        if ch.is_ascii_digit() || ch == b'.' {
            i = scan_number(bytes, i)?;
            let text = &source[start..i];
            let value: f64 = text.parse().map_err(|_| LexError {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            if !value.is_finite() {
                return Err(LexError { offset: start, message: format!("number `{text}` is not finite") });
            }
            out.push(Spanned { token: Token::Number(value), offset: start });
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Spanned { token: Token::Ident(source[start..i].to_string()), offset: start });
            continue;
        }
        let bad = source[start..].chars().next().unwrap_or('?');
        return Err(LexError { offset: start, message: format!("unexpected character `{bad}`") });
    }
    Ok(out)
}

/// `digits ['.' digits] [('e'|'E') ['+'|'-'] digits]`, or `'.' digits ...`.
/// A decimal point must be followed by a digit.
fn scan_number(bytes: &[u8], mut i: usize) -> Result<usize, LexError> {
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - s
    };
    digits(&mut i);
    if i < bytes.len() && bytes[i] == b'.' {
        let dot = i;
        i += 1;
        if digits(&mut i) == 0 {
            return Err(LexError { offset: dot, message: "decimal point must be followed by a digit".into() });
        }
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let e = i;
        i += 1;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        if digits(&mut i) == 0 {
            return Err(LexError { offset: e, message: "exponent must contain digits".into() });
        }
    }
    Ok(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Token> {
        tokenize(src).unwrap().into_iter().map(|t| t.token).collect()
    }

    #[test]
    fn function_call() {
        assert_eq!(
            kinds("cosh(s)"),
            vec![Token::Ident("cosh".into()), Token::LParen, Token::Ident("s".into()), Token::RParen]
        );
    }

    #[test]
    fn operators_and_numbers() {
        assert_eq!(
            kinds("s^2/2"),
            vec![Token::Ident("s".into()), Token::Caret, Token::Number(2.0), Token::Slash, Token::Number(2.0)]
        );
        assert_eq!(kinds("1.5e-3 .25"), vec![Token::Number(1.5e-3), Token::Number(0.25)]);
    }

    #[test]
    fn offsets_are_byte_positions() {
        let t = tokenize("  s + 10").unwrap();
        assert_eq!(t.iter().map(|t| t.offset).collect::<Vec<_>>(), vec![2, 4, 6]);
    }

    #[test]
    fn malformed_number() {
        assert_eq!(tokenize("2..5").unwrap_err().offset, 1);
        assert_eq!(tokenize("3e+").unwrap_err().offset, 1);
        assert!(tokenize("1e999").is_err());
    }

    #[test]
    fn unknown_character() {
        let e = tokenize("s # 2").unwrap_err();
        assert_eq!(e.offset, 2);
        assert_eq!(tokenize("s,1").unwrap_err().offset, 1);
    }
}
