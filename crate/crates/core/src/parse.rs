//! Text grammar for point monomials: factors `e<i>`, `v<i><j>` (or `v{i,j}`
//! once indices reach two digits), and `k1`, with `^` powers joined by `*`.

use crate::points::PointMonomial;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("parse error at position {pos}: {msg}")]
pub struct MonomialParseError {
    pub pos: usize,
    pub msg: String,
}

struct Scanner<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> MonomialParseError {
        MonomialParseError {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn number(&mut self) -> Result<u32, MonomialParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .parse::<u32>()
            .map_err(|_| MonomialParseError {
                pos: start,
                msg: "number too large".into(),
            })
    }
}

/// Parses a monomial expression such as `e1^3*v12*k1^2` on `n` points.
pub fn parse_point_monomial(expr: &str, n: u32) -> Result<PointMonomial, MonomialParseError> {
    let mut s = Scanner::new(expr);
    let mut a = vec![0u32; n as usize];
    let mut b: Vec<((u32, u32), u32)> = Vec::new();
    let mut c = 0u32;

    loop {
        s.skip_ws();
        let factor_pos = s.pos;
        let check_point = |s: &Scanner, p: u32, pos: usize| -> Result<(), MonomialParseError> {
            let _ = s;
            if p == 0 || p > n {
                Err(MonomialParseError {
                    pos,
                    msg: format!("point index {} out of range 1..={}", p, n),
                })
            } else {
                Ok(())
            }
        };
        enum Atom {
            Euler(u32),
            Diagonal(u32, u32),
            KappaOne,
        }
        let atom = match s.bump() {
            Some(b'e') => {
                let idx_pos = s.pos;
                let i = s.number()?;
                check_point(&s, i, idx_pos)?;
                Atom::Euler(i)
            }
            Some(b'v') => {
                if s.peek() == Some(b'{') {
                    s.bump();
                    let i_pos = s.pos;
                    let i = s.number()?;
                    check_point(&s, i, i_pos)?;
                    s.skip_ws();
                    if s.bump() != Some(b',') {
                        return Err(s.err("expected ',' in braced pair"));
                    }
                    s.skip_ws();
                    let j_pos = s.pos;
                    let j = s.number()?;
                    check_point(&s, j, j_pos)?;
                    s.skip_ws();
                    if s.bump() != Some(b'}') {
                        return Err(s.err("expected '}'"));
                    }
                    if i == j {
                        return Err(MonomialParseError {
                            pos: factor_pos,
                            msg: "diagonal class needs two distinct points".into(),
                        });
                    }
                    Atom::Diagonal(i, j)
                } else {
                    // two single-digit indices
                    let i_pos = s.pos;
                    let i = match s.bump() {
                        Some(d) if d.is_ascii_digit() => (d - b'0') as u32,
                        _ => {
                            return Err(MonomialParseError {
                                pos: i_pos,
                                msg: "expected a digit".into(),
                            })
                        }
                    };
                    let j_pos = s.pos;
                    let j = match s.bump() {
                        Some(d) if d.is_ascii_digit() => (d - b'0') as u32,
                        _ => {
                            return Err(MonomialParseError {
                                pos: j_pos,
                                msg: "expected a second digit (use v{i,j} for two-digit points)"
                                    .into(),
                            })
                        }
                    };
                    check_point(&s, i, i_pos)?;
                    check_point(&s, j, j_pos)?;
                    if i == j {
                        return Err(MonomialParseError {
                            pos: factor_pos,
                            msg: "diagonal class needs two distinct points".into(),
                        });
                    }
                    Atom::Diagonal(i, j)
                }
            }
            Some(b'k') => {
                let idx_pos = s.pos;
                let i = s.number()?;
                if i != 1 {
                    return Err(MonomialParseError {
                        pos: idx_pos,
                        msg: "only k1 is a point-level class".into(),
                    });
                }
                Atom::KappaOne
            }
            Some(other) => {
                return Err(MonomialParseError {
                    pos: factor_pos,
                    msg: format!("unexpected character '{}'", other as char),
                })
            }
            None => return Err(s.err("empty factor")),
        };

        s.skip_ws();
        let power = if s.peek() == Some(b'^') {
            s.bump();
            s.skip_ws();
            s.number()?
        } else {
            1
        };

        match atom {
            Atom::Euler(i) => a[i as usize - 1] += power,
            Atom::Diagonal(i, j) => {
                if power > 0 {
                    b.push(((i, j), power));
                }
            }
            Atom::KappaOne => c += power,
        }

        s.skip_ws();
        match s.bump() {
            None => break,
            Some(b'*') => continue,
            Some(other) => {
                return Err(MonomialParseError {
                    pos: s.pos - 1,
                    msg: format!("expected '*' or end of input, found '{}'", other as char),
                })
            }
        }
    }

    Ok(PointMonomial::new(n, a, b, c))
}
