use super::{ParseDiagnostic, Pos};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u64),
    Real(f64),
    Str(String),
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    At,
    Arrow,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::Real(v) => format!("number {v}"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Semi => "';'".into(),
            Tok::Comma => "','".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::At => "'@'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Splits the source into tokens; lexical errors are reported and skipped.
pub(crate) fn tokenize(src: &str, diags: &mut Vec<ParseDiagnostic>) -> Vec<Token> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    advance(1, &mut i, &mut col);
                }
            }
            '/' if chars.get(i + 1) == Some(&'*') => {
                advance(2, &mut i, &mut col);
                let mut closed = false;
                while i < chars.len() {
                    if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                        advance(2, &mut i, &mut col);
                        closed = true;
                        break;
                    }
                    if chars[i] == '\n' {
                        i += 1;
                        line += 1;
                        col = 1;
                    } else {
                        advance(1, &mut i, &mut col);
                    }
                }
                if !closed {
                    diags.push(ParseDiagnostic::error(pos, "unterminated block comment"));
                }
            }
            '"' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '"' {
                    diags.push(ParseDiagnostic::error(pos, "unterminated string"));
                    let n = j - i;
                    advance(n, &mut i, &mut col);
                } else {
                    let s: String = chars[start..j].iter().collect();
                    out.push(Token { tok: Tok::Str(s), pos });
                    let n = j + 1 - i;
                    advance(n, &mut i, &mut col);
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                out.push(Token {
                    tok: Tok::Ident(s),
                    pos,
                });
                let n = j - i;
                advance(n, &mut i, &mut col);
            }
            c if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let mut j = i;
                let mut real = false;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j < chars.len() && chars[j] == '.' {
                    real = true;
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        real = true;
                        j = k;
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let text: String = chars[i..j].iter().collect();
                let tok = if real {
                    text.parse::<f64>().ok().map(Tok::Real)
                } else {
                    text.parse::<u64>().ok().map(Tok::Int)
                };
                match tok {
                    Some(tok) => out.push(Token { tok, pos }),
                    None => diags.push(ParseDiagnostic::error(
                        pos,
                        format!("number '{text}' out of range"),
                    )),
                }
                let n = j - i;
                advance(n, &mut i, &mut col);
            }
            _ => {
                let (tok, n) = match c {
                    ';' => (Some(Tok::Semi), 1),
                    ',' => (Some(Tok::Comma), 1),
                    '[' => (Some(Tok::LBracket), 1),
                    ']' => (Some(Tok::RBracket), 1),
                    '(' => (Some(Tok::LParen), 1),
                    ')' => (Some(Tok::RParen), 1),
                    '{' => (Some(Tok::LBrace), 1),
                    '}' => (Some(Tok::RBrace), 1),
                    '+' => (Some(Tok::Plus), 1),
                    '-' if chars.get(i + 1) == Some(&'>') => (Some(Tok::Arrow), 2),
                    '-' => (Some(Tok::Minus), 1),
                    '*' => (Some(Tok::Star), 1),
                    '/' => (Some(Tok::Slash), 1),
                    '^' => (Some(Tok::Caret), 1),
                    '@' => (Some(Tok::At), 1),
                    _ => (None, 1),
                };
                match tok {
                    Some(tok) => out.push(Token { tok, pos }),
                    None => diags.push(ParseDiagnostic::error(
                        pos,
                        format!("unexpected character '{}'", c.escape_debug()),
                    )),
                }
                advance(n, &mut i, &mut col);
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, column: col },
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        let mut d = vec![];
        let t = tokenize(s, &mut d);
        assert!(d.is_empty(), "{d:?}");
        t.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn numbers() {
        assert_eq!(toks("12"), vec![Tok::Int(12), Tok::Eof]);
        assert_eq!(toks("1.5e-3"), vec![Tok::Real(1.5e-3), Tok::Eof]);
        assert_eq!(toks(".5"), vec![Tok::Real(0.5), Tok::Eof]);
        assert_eq!(toks("2e0"), vec![Tok::Real(2.0), Tok::Eof]);
    }

    #[test]
    fn positions_and_comments() {
        let mut d = vec![];
        let t = tokenize("// hi\n  h q;", &mut d);
        assert_eq!(t[0].pos, Pos { line: 2, column: 3 });
        assert_eq!(t[1].pos, Pos { line: 2, column: 5 });
    }

    #[test]
    fn arrow_and_bad_char() {
        assert_eq!(toks("->"), vec![Tok::Arrow, Tok::Eof]);
        let mut d = vec![];
        tokenize("h $", &mut d);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].column, 3);
    }
}
