//! Reader for operator expressions written the way they are typeset, e.g.
//! `1 - a a† - 2a† + (b a†)^2` or, for matrix-element terms, `-ba†σa†ba†`.

use std::iter::Peekable;
use std::str::Chars;

use super::word::{Letter, OperatorSum, OperatorWord};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse operator expression {input:?}: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Plus,
    Minus,
    Int(i64),
    Letter(Letter),
    Sigma,
    Open,
    Close,
    Pow(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Item {
    Letter(Letter),
    Sigma,
}

fn lex(input: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut chars: Peekable<Chars<'_>> = input.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            c if c.is_whitespace() => {}
            '+' => out.push(Token::Plus),
            '-' | '\u{2212}' => out.push(Token::Minus),
            '(' => out.push(Token::Open),
            ')' => out.push(Token::Close),
            '²' => out.push(Token::Pow(2)),
            '³' => out.push(Token::Pow(3)),
            'σ' | 's' => out.push(Token::Sigma),
            '^' => {
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                let n = digits
                    .parse::<u32>()
                    .map_err(|_| "'^' must be followed by an exponent".to_string())?;
                out.push(Token::Pow(n));
            }
            'a' | 'b' => {
                let raised = matches!(chars.peek(), Some('†') | Some('\''));
                if raised {
                    chars.next();
                }
                let letter = match (c, raised) {
                    ('a', false) => Letter::A,
                    ('a', true) => Letter::ADag,
                    ('b', false) => Letter::B,
                    _ => Letter::BDag,
                };
                out.push(Token::Letter(letter));
            }
            d if d.is_ascii_digit() => {
                let mut digits = d.to_string();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                out.push(Token::Int(
                    digits.parse().map_err(|_| format!("bad integer {digits}"))?,
                ));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn terms(&mut self) -> Result<Vec<(i64, Vec<Item>)>, String> {
        let mut out = Vec::new();
        let mut first = true;
        while self.peek().is_some() {
            let sign = match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    1
                }
                Some(Token::Minus) => {
                    self.bump();
                    -1
                }
                _ if first => 1,
                Some(t) => return Err(format!("expected '+' or '-', found {t:?}")),
                None => unreachable!(),
            };
            first = false;
            let mut coefficient = 1;
            let mut explicit = false;
            if let Some(Token::Int(n)) = self.peek() {
                self.bump();
                coefficient = n;
                explicit = true;
            }
            let items = self.items(false)?;
            if items.is_empty() && !explicit {
                return Err("empty term".into());
            }
            out.push((sign * coefficient, items));
        }
        Ok(out)
    }

    fn items(&mut self, in_group: bool) -> Result<Vec<Item>, String> {
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Some(Token::Letter(l)) => {
                    self.bump();
                    items.push(Item::Letter(l));
                }
                Some(Token::Sigma) if !in_group => {
                    self.bump();
                    items.push(Item::Sigma);
                }
                Some(Token::Open) => {
                    self.bump();
                    let group = self.items(true)?;
                    if self.bump() != Some(Token::Close) {
                        return Err("unbalanced parenthesis".into());
                    }
                    let times = match self.peek() {
                        Some(Token::Pow(n)) => {
                            self.bump();
                            n
                        }
                        _ => 1,
                    };
                    for _ in 0..times {
                        items.extend_from_slice(&group);
                    }
                }
                Some(Token::Int(_)) => return Err("integer inside a word".into()),
                Some(Token::Pow(_)) => return Err("exponent without a group".into()),
                _ => return Ok(items),
            }
        }
    }
}

fn parse_terms(input: &str) -> Result<Vec<(i64, Vec<Item>)>, ParseError> {
    let err = |reason: String| ParseError {
        input: input.to_string(),
        reason,
    };
    let tokens = lex(input).map_err(err)?;
    let mut parser = Parser { tokens, pos: 0 };
    parser.terms().map_err(err)
}

/// Parses a sum of operator words. The bare number `1` is the identity.
pub fn parse_sum(input: &str) -> Result<OperatorSum, ParseError> {
    let mut words = Vec::new();
    for (coefficient, items) in parse_terms(input)? {
        let mut letters = Vec::with_capacity(items.len());
        for item in items {
            match item {
                Item::Letter(l) => letters.push(l),
                Item::Sigma => {
                    return Err(ParseError {
                        input: input.to_string(),
                        reason: "σ is only allowed in matrix-element terms".into(),
                    })
                }
            }
        }
        words.push(OperatorWord::new(coefficient, letters));
    }
    Ok(OperatorSum::from_words(words))
}

/// One matrix-element term: coefficient, left word, right word.
pub type PairTerm = (i64, Vec<Letter>, Vec<Letter>);

/// Parses matrix-element terms of the form `c·w_left σ w_right`, returning
/// `(c, w_left, w_right)` in input order.
pub fn parse_pair_terms(input: &str) -> Result<Vec<PairTerm>, ParseError> {
    let mut out = Vec::new();
    for (coefficient, items) in parse_terms(input)? {
        let split = items
            .iter()
            .position(|i| *i == Item::Sigma)
            .filter(|&k| !items[k + 1..].contains(&Item::Sigma))
            .ok_or_else(|| ParseError {
                input: input.to_string(),
                reason: "each term needs exactly one σ".into(),
            })?;
        let letters = |slice: &[Item]| {
            slice
                .iter()
                .map(|i| match i {
                    Item::Letter(l) => *l,
                    Item::Sigma => unreachable!(),
                })
                .collect::<Vec<_>>()
        };
        out.push((coefficient, letters(&items[..split]), letters(&items[split + 1..])));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Letter::*;

    #[test]
    fn parses_powers_and_coefficients() {
        let s = parse_sum("1 - 2a† + (b a†)^2 - b†(ab†)²").unwrap();
        assert_eq!(s.coefficient(&[]), 1);
        assert_eq!(s.coefficient(&[ADag]), -2);
        assert_eq!(s.coefficient(&[B, ADag, B, ADag]), 1);
        assert_eq!(s.coefficient(&[BDag, A, BDag, A, BDag]), -1);
    }

    #[test]
    fn parses_pairs() {
        let t = parse_pair_terms("-ba†σa†ba† + 2σa†").unwrap();
        assert_eq!(t[0], (-1, vec![B, ADag], vec![ADag, B, ADag]));
        assert_eq!(t[1], (2, vec![], vec![ADag]));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_sum("a + x").is_err());
        assert!(parse_sum("a +").is_err());
        assert!(parse_pair_terms("a b").is_err());
    }
}
