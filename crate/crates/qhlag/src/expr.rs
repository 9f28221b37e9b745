//! Text grammars shared by the document format and the CLI.
//!
//! Linear combinations are signed integer multiples of identifiers joined by
//! `+`/`-`, e.g. `2H-E1-E2-E3-E4-E5-E6`. Group-ring elements extend this
//! with monomial factors: `4T^{H-E} + T^{2E} - 2T^{H-E3}` or the raw vector
//! form `T[2,-1,0]`. Identifiers are resolved against a caller-supplied name
//! list; errors report the 1-based column of the offending token.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactalg::{rat, CoeffElement, GroupMonomial, Mode, QMonomial, Rational};

/// A parsed signed term: coefficient times a name index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinTerm {
    pub coeff: BigInt,
    pub index: usize,
}

struct Cursor<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            column: self.column(),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", b as char)))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.bytes.len()
    }

    /// Optional sign, returns +1/-1 and whether a sign was present.
    fn sign(&mut self) -> (i64, bool) {
        self.skip_ws();
        if self.eat(b'+') {
            (1, true)
        } else if self.eat(b'-') {
            (-1, true)
        } else {
            (1, false)
        }
    }

    fn integer(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            self.src[start..self.pos].parse().ok()
        }
    }

    fn signed_integer(&mut self) -> Result<i64> {
        let (s, _) = self.sign();
        let n = self.integer().ok_or_else(|| self.err("expected integer"))?;
        let n: i64 = n.try_into().map_err(|_| self.err("integer out of range"))?;
        Ok(s * n)
    }

    fn identifier(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        if !matches!(self.peek(), Some(b) if b.is_ascii_alphabetic() || b == b'_') {
            return None;
        }
        while matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric() || b == b'_') {
            self.pos += 1;
        }
        Some(&self.src[start..self.pos])
    }
}

fn resolve(names: &[String], id: &str, cur: &Cursor) -> Result<usize> {
    names.iter().position(|n| n == id).ok_or_else(|| {
        let mut e = Error::UnknownClass(id.to_string());
        // Keep the column information for the CLI.
        if let Error::UnknownClass(name) = &e {
            e = Error::Parse {
                column: cur.column(),
                message: format!("unknown name `{name}`"),
            };
        }
        e
    })
}

/// Parse a linear combination over `names` into (coefficient, index) terms.
/// Multiple mentions of one name are merged.
pub fn parse_linear_combination(src: &str, names: &[String]) -> Result<Vec<LinTerm>> {
    let mut cur = Cursor::new(src);
    let mut acc: Vec<BigInt> = vec![BigInt::from(0); names.len()];
    if cur.at_end() {
        return Err(cur.err("empty expression"));
    }
    let mut first = true;
    loop {
        cur.skip_ws();
        if cur.pos >= cur.bytes.len() {
            break;
        }
        let (sign, had_sign) = cur.sign();
        if !first && !had_sign {
            return Err(cur.err("expected `+` or `-`"));
        }
        let coeff = cur.integer().unwrap_or_else(|| BigInt::from(1));
        // Allow an optional `*` between coefficient and name.
        cur.skip_ws();
        cur.eat(b'*');
        let id = cur
            .identifier()
            .ok_or_else(|| cur.err("expected basis name"))?;
        let idx = resolve(names, id, &cur)?;
        acc[idx] += BigInt::from(sign) * coeff;
        first = false;
    }
    Ok(acc
        .into_iter()
        .enumerate()
        .filter(|(_, c)| c != &BigInt::from(0))
        .map(|(index, coeff)| LinTerm { coeff, index })
        .collect())
}

/// Parse `q^3` / `q` / `1` into a q-monomial.
pub fn parse_q_monomial(src: &str) -> Result<QMonomial> {
    let mut cur = Cursor::new(src);
    cur.skip_ws();
    if cur.eat(b'1') {
        if !cur.at_end() {
            return Err(cur.err("trailing input after `1`"));
        }
        return Ok(QMonomial::unit());
    }
    if cur.eat(b'q') {
        if cur.at_end() {
            return Ok(QMonomial::new(1));
        }
        cur.expect(b'^')?;
        let k = cur.signed_integer()?;
        if !cur.at_end() {
            return Err(cur.err("trailing input"));
        }
        return Ok(QMonomial::new(k));
    }
    Err(cur.err("expected `q^k` or `1`"))
}

/// Parse a group-ring element over the generators `names` with pairing
/// vector `pairing`: signed integer multiples of `T^{..}` (a linear
/// combination in the exponent), `T[v,..]` (raw exponent vector), or bare
/// integers (identity monomial).
pub fn parse_group_element(
    src: &str,
    names: &[String],
    pairing: &[i64],
    mode: Mode,
) -> Result<CoeffElement<GroupMonomial>> {
    let mut cur = Cursor::new(src);
    let mut terms: Vec<(GroupMonomial, Rational)> = Vec::new();
    if cur.at_end() {
        return Err(cur.err("empty expression"));
    }
    let mut first = true;
    loop {
        cur.skip_ws();
        if cur.pos >= cur.bytes.len() {
            break;
        }
        let (sign, had_sign) = cur.sign();
        if !first && !had_sign {
            return Err(cur.err("expected `+` or `-`"));
        }
        let coeff = cur.integer();
        cur.skip_ws();
        let monomial = if cur.eat(b'T') {
            if cur.eat(b'^') {
                cur.expect(b'{')?;
                let close = cur.src[cur.pos..]
                    .find('}')
                    .ok_or_else(|| cur.err("unterminated `{`"))?;
                let inner = &cur.src[cur.pos..cur.pos + close];
                let lin = parse_linear_combination(inner, names).map_err(|e| match e {
                    Error::Parse { column, message } => Error::Parse {
                        column: cur.column() + column - 1,
                        message,
                    },
                    other => other,
                })?;
                cur.pos += close + 1;
                let mut exps = vec![0i64; names.len()];
                for t in lin {
                    exps[t.index] =
                        i64::try_from(t.coeff).map_err(|_| cur.err("exponent out of range"))?;
                }
                GroupMonomial::from_pairing_vector(exps, pairing)?
            } else if cur.eat(b'[') {
                let mut exps = Vec::new();
                loop {
                    exps.push(cur.signed_integer()?);
                    cur.skip_ws();
                    if cur.eat(b']') {
                        break;
                    }
                    cur.expect(b',')?;
                }
                if exps.len() != names.len() {
                    return Err(cur.err(format!(
                        "exponent vector of length {} over a basis of {} generators",
                        exps.len(),
                        names.len()
                    )));
                }
                GroupMonomial::from_pairing_vector(exps, pairing)?
            } else {
                return Err(cur.err("expected `T^{..}` or `T[..]`"));
            }
        } else {
            if coeff.is_none() {
                return Err(cur.err("expected integer or `T` monomial"));
            }
            GroupMonomial::unit(names.len())
        };
        let coeff = coeff.unwrap_or_else(|| BigInt::from(1));
        terms.push((monomial, Rational::from_integer(coeff) * rat(sign)));
        first = false;
    }
    CoeffElement::from_terms(mode, terms)
}
