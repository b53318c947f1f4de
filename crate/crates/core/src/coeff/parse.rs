//! Parser for the textual coefficient format: sums of `c*q^(e/2)` terms,
//! optionally over a parenthesized denominator. Accepts full scalar
//! expressions with `+ - * / ^` and parentheses so rendered values always
//! round-trip.

use super::{CoeffError, HalfLaurent, Rat, RatFunc};
use num_bigint::BigInt;
use num_traits::One;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Q,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn lex(input: &str) -> Result<Vec<Token>, CoeffError> {
    let mut out = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::Open);
                i += 1;
            }
            ')' => {
                out.push(Token::Close);
                i += 1;
            }
            'q' => {
                out.push(Token::Q);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = input[start..i]
                    .parse()
                    .map_err(|_| CoeffError::Parse("bad integer".into()))?;
                out.push(Token::Num(n));
            }
            other => {
                return Err(CoeffError::Parse(format!("unexpected character '{other}'")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    // Nesting guard so hostile inputs cannot blow the stack.
    depth: u32,
}

const MAX_DEPTH: u32 = 128;
const MAX_POW: i64 = 4096;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFunc, CoeffError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(CoeffError::Parse("expression too deeply nested".into()));
        }
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Token::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc, CoeffError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Token::Slash) => {
                    self.bump();
                    acc = acc.div(&self.factor()?)?;
                }
                // Implicit multiplication: `3q`, `q(1+q)`.
                Some(Token::Q) | Some(Token::Num(_)) | Some(Token::Open) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RatFunc, CoeffError> {
        let mut neg = false;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Minus => {
                    neg = !neg;
                    self.bump();
                }
                Token::Plus => {
                    self.bump();
                }
                _ => break,
            }
        }
        let base = self.atom()?;
        let v = if let Some(Token::Caret) = self.peek() {
            self.bump();
            let (num, den) = self.exponent()?;
            apply_pow(&base, num, den)?
        } else {
            base
        };
        Ok(if neg { v.neg() } else { v })
    }

    fn atom(&mut self) -> Result<RatFunc, CoeffError> {
        match self.bump() {
            Some(Token::Num(n)) => Ok(RatFunc::from_rat(Rat::from_integer(n))),
            Some(Token::Q) => Ok(RatFunc::q_pow(1)),
            Some(Token::Open) => {
                let v = self.expr()?;
                match self.bump() {
                    Some(Token::Close) => Ok(v),
                    _ => Err(CoeffError::Parse("expected ')'".into())),
                }
            }
            other => Err(CoeffError::Parse(format!("unexpected token {other:?}"))),
        }
    }

    /// Exponent: integer, or `(a)`, `(-a)`, `(a/b)`, `(-a/b)`.
    fn exponent(&mut self) -> Result<(i64, i64), CoeffError> {
        let parse_int = |p: &mut Self| -> Result<i64, CoeffError> {
            let mut neg = false;
            while let Some(Token::Minus) = p.peek() {
                neg = !neg;
                p.bump();
            }
            match p.bump() {
                Some(Token::Num(n)) => {
                    let v: i64 = n
                        .try_into()
                        .map_err(|_| CoeffError::Parse("exponent too large".into()))?;
                    if v > MAX_POW {
                        return Err(CoeffError::Parse("exponent too large".into()));
                    }
                    Ok(if neg { -v } else { v })
                }
                other => Err(CoeffError::Parse(format!("bad exponent {other:?}"))),
            }
        };
        if let Some(Token::Open) = self.peek() {
            self.bump();
            let a = parse_int(self)?;
            let d = if let Some(Token::Slash) = self.peek() {
                self.bump();
                parse_int(self)?
            } else {
                1
            };
            match self.bump() {
                Some(Token::Close) => Ok((a, d)),
                _ => Err(CoeffError::Parse("expected ')' after exponent".into())),
            }
        } else {
            Ok((parse_int(self)?, 1))
        }
    }
}

fn apply_pow(base: &RatFunc, num: i64, den: i64) -> Result<RatFunc, CoeffError> {
    if den == 0 {
        return Err(CoeffError::Parse("zero exponent denominator".into()));
    }
    if den == 1 || num == 0 {
        return base.pow(num);
    }
    // Fractional exponents only on the plain variable q, with denominator 2.
    let is_q = base.is_polynomial()
        && base.num().is_monomial()
        && base.num().coeff(2).is_one()
        && base.num().min_exp() == Some(2);
    if is_q && (den == 2 || den == -2) {
        let e = if den == 2 { num } else { -num };
        return Ok(RatFunc::from_poly(HalfLaurent::u_pow(e)));
    }
    Err(CoeffError::Parse(
        "fractional exponents are only supported as q^(k/2)".into(),
    ))
}

/// Parse the textual coefficient format back into a [`RatFunc`].
pub fn parse_ratfunc(input: &str) -> Result<RatFunc, CoeffError> {
    let toks = lex(input)?;
    if toks.is_empty() {
        return Err(CoeffError::Parse("empty input".into()));
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        depth: 0,
    };
    let v = p.expr()?;
    if p.pos != toks.len() {
        return Err(CoeffError::Parse("trailing input".into()));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_forms() {
        assert_eq!(parse_ratfunc("q").unwrap(), RatFunc::q_pow(1));
        assert_eq!(parse_ratfunc("q^2 - 1").unwrap(), RatFunc::q_pow(2).sub(&RatFunc::one()));
        assert_eq!(parse_ratfunc("q^(1/2)").unwrap(), RatFunc::u_pow(1));
        assert_eq!(parse_ratfunc("q^(-3/2)").unwrap(), RatFunc::u_pow(-3));
        assert_eq!(
            parse_ratfunc("(q - 1)/(q + 1)").unwrap(),
            parse_ratfunc("q - 1").unwrap().div(&parse_ratfunc("q + 1").unwrap()).unwrap()
        );
        assert_eq!(parse_ratfunc("-3/2*q").unwrap(), RatFunc::from_rat(Rat::new((-3).into(), 2.into())).mul(&RatFunc::q_pow(1)));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_ratfunc("").is_err());
        assert!(parse_ratfunc("q^").is_err());
        assert!(parse_ratfunc("(q").is_err());
        assert!(parse_ratfunc("1/0").is_err());
        assert!(parse_ratfunc("x").is_err());
        assert!(parse_ratfunc("q^(1/3)").is_err());
    }
}
