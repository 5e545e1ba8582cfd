//! Tokeniser for `.sdg` documents.

use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u64),
    Float(f64),
    Str(String),
    Sym(&'static str),
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Float(x) => format!("`{x:?}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const SYMBOLS: [&str; 17] = ["->", "=", ";", "|", "(", ")", "[", "]", "{", "}", ",", "@", ":", ".", "*", "/", "-"];

pub(crate) fn lex(text: &str, file: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let span = |line, column| SourceSpan { file: file.to_string(), line, column };
    while i < chars.len() {
        let ch = chars[i];
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: l0, column: c0 });
        if ch == '\n' {
            push(&mut out, Tok::Newline);
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_float = false;
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                is_float = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    is_float = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let tok = if is_float {
                Tok::Float(s.parse().map_err(|_| ParseError::syntax(span(l0, c0), format!("bad number {s}")))?)
            } else {
                Tok::Int(s.parse().map_err(|_| ParseError::syntax(span(l0, c0), format!("integer {s} is too large")))?)
            };
            col += i - start;
            push(&mut out, tok);
            continue;
        }
        if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
            continue;
        }
        if ch == '"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(ParseError::syntax(span(l0, c0), "unterminated string".into())),
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some('\\') if matches!(chars.get(i + 1), Some('"') | Some('\\')) => {
                        s.push(chars[i + 1]);
                        i += 2;
                        col += 2;
                    }
                    Some(&c) => {
                        s.push(c);
                        i += 1;
                        col += 1;
                    }
                }
            }
            push(&mut out, Tok::Str(s));
            continue;
        }
        let rest: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                push(&mut out, Tok::Sym(s));
            }
            None => return Err(ParseError::syntax(span(l0, c0), format!("unexpected character {ch:?}"))),
        }
    }
    out.push(Token { tok: Tok::Newline, line, column: col });
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> { lex(s, "t").unwrap().into_iter().map(|t| t.tok).collect() }

    #[test]
    fn node_ports_and_floats() {
        assert_eq!(
            toks("n0.1 -> 2.5e-3"),
            vec![
                Tok::Ident("n0".into()),
                Tok::Sym("."),
                Tok::Int(1),
                Tok::Sym("->"),
                Tok::Float(2.5e-3),
                Tok::Newline,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn columns_are_one_based() {
        let t = lex("a\n  spider", "t").unwrap();
        assert_eq!((t[2].line, t[2].column), (2, 3));
    }

    #[test]
    fn strings_and_comments() {
        assert_eq!(toks("\"v0†\" # note"), vec![Tok::Str("v0†".into()), Tok::Newline, Tok::Eof]);
    }
}
