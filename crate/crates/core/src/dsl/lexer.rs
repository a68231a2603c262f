use crate::error::ParseDiagnostic;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(f64, String),
    Str(String),
    Punct(&'static str),
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(_, s) => format!("number `{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Newline => "end of line".to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const PUNCTS: [&str; 15] = ["<<", ">>", "->", "{", "}", "(", ")", "<", ">", ",", ";", "=", "!", "&", "|"];

/// Splits `text` into tokens; `#` starts a comment running to the end of the line.
pub(crate) fn lex(text: &str) -> Result<Vec<Token>, Vec<ParseDiagnostic>> {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |out: &mut Vec<Token>, tok: Tok| out.push(Token { tok, line: li + 1, column });
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                continue;
            }
            if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                match s.parse::<f64>() {
                    Ok(v) if v.is_finite() => push(&mut out, Tok::Number(v, s)),
                    _ => errs.push(ParseDiagnostic::error(li + 1, column, format!("malformed number `{s}`"))),
                }
                continue;
            }
            if c == '"' {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' {
                    j += 1;
                }
                if j == chars.len() {
                    errs.push(ParseDiagnostic::error(li + 1, column, "unterminated string"));
                    break;
                }
                push(&mut out, Tok::Str(chars[start..j].iter().collect()));
                i = j + 1;
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => {
                    push(&mut out, Tok::Punct(p));
                    i += p.len();
                }
                None => {
                    errs.push(ParseDiagnostic::error(li + 1, column, format!("unexpected character `{c}`")));
                    i += 1;
                }
            }
        }
        out.push(Token {
            tok: Tok::Newline,
            line: li + 1,
            column: chars.len() + 1,
        });
    }
    let (line, column) = out.last().map_or((1, 1), |t| (t.line, t.column));
    out.push(Token { tok: Tok::Eof, line, column });
    if errs.is_empty() {
        Ok(out)
    } else {
        Err(errs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = lex("trans q a b -> q' # c\n<<1,3>> <0.5> \"x y\"").unwrap();
        let kinds: Vec<&Tok> = toks.iter().map(|t| &t.tok).collect();
        assert_eq!(kinds[4], &Tok::Punct("->"));
        assert_eq!(kinds[5], &Tok::Ident("q'".into()));
        assert_eq!(kinds[6], &Tok::Newline);
        assert_eq!(kinds[7], &Tok::Punct("<<"));
        assert!(matches!(kinds[13], Tok::Number(v, _) if *v == 0.5));
        assert_eq!(kinds[15], &Tok::Str("x y".into()));
        assert_eq!((toks[7].line, toks[7].column), (2, 1));
    }

    #[test]
    fn bad_character() {
        let e = lex("state q @").unwrap_err();
        assert_eq!((e[0].line, e[0].column), (1, 9));
    }
}
