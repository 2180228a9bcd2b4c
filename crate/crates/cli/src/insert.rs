//! Parser for insertion polynomials: rational-coefficient polynomials in
//! the divisor symbols `H1..Hr`.
//!
//! Grammar: `poly := term (('+'|'-') term)*`, `term := factor ('*' factor)*`,
//! `factor := rational | H<i> ('^' uint)?`.

use num_bigint::BigInt;
use qtoric::exactmath::{parse_rat, rat_int, Rat};
use qtoric::series::CharPoly;

#[derive(Debug)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "bad insertion polynomial: {}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Caret,
    Number(Rat),
    Var(usize),
}

fn tokenize(input: &str, rank: usize) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            'H' | 'h' => {
                let start = i + 1;
                let mut end = start;
                while end < chars.len() && chars[end].is_ascii_digit() {
                    end += 1;
                }
                let idx: usize = chars[start..end]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| ParseError(format!("bad divisor symbol near `{c}`")))?;
                if idx == 0 || idx > rank {
                    return Err(ParseError(format!(
                        "unknown character H{idx}; this model has H1..H{rank}"
                    )));
                }
                tokens.push(Token::Var(idx - 1));
                i = end;
            }
            d if d.is_ascii_digit() => {
                let start = i;
                let mut end = i;
                while end < chars.len() && (chars[end].is_ascii_digit() || chars[end] == '/') {
                    end += 1;
                }
                let text: String = chars[start..end].iter().collect();
                let value =
                    parse_rat(&text).ok_or_else(|| ParseError(format!("bad rational `{text}`")))?;
                tokens.push(Token::Number(value));
                i = end;
            }
            other => return Err(ParseError(format!("unexpected character `{other}`"))),
        }
    }
    Ok(tokens)
}

/// Parses a polynomial in `H1..Hrank` into insertion data over the
/// standard characters.
pub fn parse_insertion_poly(input: &str, rank: usize) -> Result<CharPoly, ParseError> {
    let tokens = tokenize(input, rank)?;
    if tokens.is_empty() {
        return Err(ParseError("empty polynomial".into()));
    }
    // Characters: the standard basis; variable i refers to character e_i.
    let characters: Vec<Vec<BigInt>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|k| {
                    if k == i {
                        BigInt::from(1)
                    } else {
                        BigInt::from(0)
                    }
                })
                .collect()
        })
        .collect();

    let mut terms: Vec<(Rat, Vec<u32>)> = Vec::new();
    let mut pos = 0;
    let mut sign = rat_int(1);
    // Leading sign.
    while pos < tokens.len() && matches!(tokens[pos], Token::Plus | Token::Minus) {
        if tokens[pos] == Token::Minus {
            sign = -sign;
        }
        pos += 1;
    }
    loop {
        // One term: factors joined by '*'.
        let mut coeff = sign.clone();
        let mut exps = vec![0u32; rank];
        loop {
            match tokens.get(pos) {
                Some(Token::Number(v)) => {
                    coeff = &coeff * v;
                    pos += 1;
                }
                Some(Token::Var(i)) => {
                    let var = *i;
                    pos += 1;
                    let mut exp = 1u32;
                    if tokens.get(pos) == Some(&Token::Caret) {
                        pos += 1;
                        match tokens.get(pos) {
                            Some(Token::Number(v)) if v.is_integer() => {
                                exp = u32::try_from(v.numer())
                                    .map_err(|_| ParseError("exponent out of range".into()))?;
                                pos += 1;
                            }
                            _ => {
                                return Err(ParseError("expected integer exponent after ^".into()))
                            }
                        }
                    }
                    exps[var] += exp;
                }
                _ => return Err(ParseError("expected a factor".into())),
            }
            if tokens.get(pos) == Some(&Token::Star) {
                pos += 1;
                continue;
            }
            break;
        }
        terms.push((coeff, exps));
        match tokens.get(pos) {
            None => break,
            Some(Token::Plus) => {
                sign = rat_int(1);
                pos += 1;
            }
            Some(Token::Minus) => {
                sign = -rat_int(1);
                pos += 1;
            }
            _ => return Err(ParseError("expected + or - between terms".into())),
        }
    }
    Ok(CharPoly { characters, terms })
}
