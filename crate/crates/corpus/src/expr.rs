//! Exact arithmetic expressions in the family parameter `k`.

use ltsurf::{qi, Rational};
use num_traits::Zero;

use crate::CorpusError;

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    k: Option<i64>,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> CorpusError {
        CorpusError::Expression(format!("{msg} at byte {} of `{}`", self.pos, String::from_utf8_lossy(self.s)))
    }

    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Rational, CorpusError> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Rational, CorpusError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc *= self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.factor()?;
                    if d.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    acc /= d;
                }
                // Implicit product such as `2k` or `3(k+1)`.
                Some(b'k' | b'(') => acc *= self.factor()?,
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Rational, CorpusError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'k') => {
                self.pos += 1;
                self.k.map(qi).ok_or_else(|| self.err("`k` outside a family"))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                let n: i64 = digits.parse().map_err(|_| self.err("integer out of range"))?;
                Ok(qi(n))
            }
            _ => Err(self.err("expected a number, `k` or `(`")),
        }
    }
}

/// Evaluates `+ - * /`, parentheses, integers and `k` exactly.
pub fn eval(text: &str, k: Option<i64>) -> Result<Rational, CorpusError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, k };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Replaces every `{expr}` by its value, which must be an integer.
pub fn substitute(text: &str, k: Option<i64>) -> Result<String, CorpusError> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..]
            .find('}')
            .map(|c| open + c)
            .ok_or_else(|| CorpusError::Expression(format!("unclosed `{{` in `{text}`")))?;
        let v = eval(&rest[open + 1..close], k)?;
        if !v.is_integer() {
            return Err(CorpusError::Expression(format!("`{{{}}}` is not an integer", &rest[open + 1..close])));
        }
        out.push_str(&v.to_integer().to_string());
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ltsurf::q;

    #[test]
    fn family_forms() {
        assert_eq!(eval("(12k-24)/(12k-17)", Some(4)).unwrap(), q(24, 31));
        assert_eq!(eval("7/(8*k+5)", Some(5)).unwrap(), q(7, 45));
        assert_eq!(eval("-3/4 + 1", None).unwrap(), q(1, 4));
        assert_eq!(eval("2(k+1)", Some(3)).unwrap(), qi(8));
        assert!(eval("k", None).is_err());
        assert!(eval("1/0", None).is_err());
        assert!(eval("1 2", None).is_err());
    }

    #[test]
    fn templates() {
        assert_eq!(substitute("blowup a along A times {k+1} as a{k}", Some(4)).unwrap(), "blowup a along A times 5 as a4");
        assert_eq!(substitute("no braces", None).unwrap(), "no braces");
        assert!(substitute("{k/2}", Some(3)).is_err());
    }
}
