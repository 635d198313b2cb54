//! Recursive-descent parser for the ASCII ordinal grammar:
//!
//! ```text
//! expr := term ('+' term)*
//! term := 'w' ('^' '(' expr ')')? ('*' nat)? | nat
//! nat  := [0-9]+
//! ```
//!
//! Whitespace between tokens is ignored.

use num_bigint::BigUint;
use num_traits::Zero;

use super::{Ordinal, OrdinalError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Evaluate the expression as an ordinal sum, accepting any term order.
    #[default]
    Normalizing,
    /// Reject input whose terms are not already in Cantor normal form.
    Strict,
}

pub fn parse_ordinal(text: &str, mode: ParseMode) -> Result<Ordinal, OrdinalError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        mode,
    };
    let value = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    mode: ParseMode,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), OrdinalError> {
        if self.eat(byte) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected '{}'", byte as char)))
        }
    }

    fn syntax(&self, msg: &str) -> OrdinalError {
        OrdinalError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut start = self.pos;
        let mut terms = vec![(start, self.term()?)];
        while self.eat(b'+') {
            start = self.pos;
            terms.push((start, self.term()?));
        }
        if self.mode == ParseMode::Strict {
            self.check_canonical(&terms)?;
        }
        Ok(terms
            .into_iter()
            .fold(Ordinal::zero(), |acc, (_, t)| &acc + &t))
    }

    fn check_canonical(&self, terms: &[(usize, Ordinal)]) -> Result<(), OrdinalError> {
        let not_canonical = |pos: usize, msg: &str| OrdinalError::NotCanonical {
            pos,
            msg: msg.to_string(),
        };
        if terms.len() > 1 {
            if let Some((pos, _)) = terms.iter().find(|(_, t)| t.is_zero()) {
                return Err(not_canonical(*pos, "zero term inside a sum"));
            }
        }
        for pair in terms.windows(2) {
            let (_, a) = &pair[0];
            let (pos, b) = &pair[1];
            if a.leading_exponent() <= b.leading_exponent() {
                return Err(not_canonical(*pos, "exponents must strictly decrease"));
            }
        }
        Ok(())
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exponent = if self.eat(b'^') {
                    self.expect(b'(')?;
                    let e = self.expr()?;
                    self.expect(b')')?;
                    e
                } else {
                    Ordinal::one()
                };
                let coefficient = if self.eat(b'*') {
                    let at = self.pos;
                    let c = self.nat()?;
                    if c.is_zero() && self.mode == ParseMode::Strict {
                        return Err(OrdinalError::NotCanonical {
                            pos: at,
                            msg: "zero coefficient".to_string(),
                        });
                    }
                    c
                } else {
                    BigUint::from(1u32)
                };
                Ok(Ordinal::monomial(exponent, coefficient))
            }
            Some(b'0'..=b'9') => Ok(Ordinal::from(self.nat()?)),
            Some(_) => Err(self.syntax("expected 'w' or a natural number")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn nat(&mut self) -> Result<BigUint, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected a natural number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit string parses"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_instance() {
        let a = parse_ordinal("w^(w)*2+w*3+5", ParseMode::Strict).unwrap();
        let expected = &(&Ordinal::monomial(Ordinal::omega(), 2u32)
            + &Ordinal::monomial(Ordinal::one(), 3u32))
            + &Ordinal::from(5);
        assert_eq!(a, expected);
        assert_eq!(a.to_string(), "w^(w)*2+w*3+5");
    }

    #[test]
    fn zero_parses() {
        assert_eq!(
            parse_ordinal("0", ParseMode::Strict).unwrap(),
            Ordinal::zero()
        );
    }

    #[test]
    fn modes_differ_on_unsorted_terms() {
        let two_omega = Ordinal::monomial(Ordinal::one(), 2u32);
        assert_eq!(
            parse_ordinal("w+w", ParseMode::Normalizing).unwrap(),
            two_omega
        );
        assert!(matches!(
            parse_ordinal("w+w", ParseMode::Strict),
            Err(OrdinalError::NotCanonical { pos: 2, .. })
        ));
        assert_eq!(
            parse_ordinal("1+w", ParseMode::Normalizing).unwrap(),
            Ordinal::omega()
        );
        assert!(parse_ordinal("1+w", ParseMode::Strict).is_err());
        assert!(parse_ordinal("w+0", ParseMode::Strict).is_err());
        assert!(parse_ordinal("w*0", ParseMode::Strict).is_err());
        assert_eq!(
            parse_ordinal("w*0", ParseMode::Normalizing).unwrap(),
            Ordinal::zero()
        );
        // non-canonical exponents are caught recursively
        assert!(parse_ordinal("w^(1+w)", ParseMode::Strict).is_err());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(
            parse_ordinal("w^2", ParseMode::Normalizing),
            Err(OrdinalError::Syntax {
                pos: 2,
                msg: "expected '('".into()
            })
        );
        assert!(matches!(
            parse_ordinal("w+", ParseMode::Normalizing),
            Err(OrdinalError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse_ordinal("w x", ParseMode::Normalizing),
            Err(OrdinalError::Syntax { pos: 2, .. })
        ));
        assert!(parse_ordinal("", ParseMode::Normalizing).is_err());
        assert!(parse_ordinal("w^(w", ParseMode::Normalizing).is_err());
    }

    #[test]
    fn whitespace_is_ignored() {
        assert_eq!(
            parse_ordinal(" w ^ ( 2 ) * 3 + 1 ", ParseMode::Strict).unwrap(),
            parse_ordinal("w^(2)*3+1", ParseMode::Strict).unwrap()
        );
    }
}
