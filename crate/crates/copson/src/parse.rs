//! Text forms for weights and step functions.
//!
//! Grammar (whitespace ignored):
//!   weight := pow(num, num) | exp(num, num) | piecewise(list, list)
//!           | sum(weight, ...) | prod(weight, weight) | restrict(weight, num, num)
//!   step   := step(list, list)
//!   list   := [num, num, ...]
//!   num    := float literal, optionally a fraction `a/b`; `inf` accepted

use crate::error::{Error, Result};
use crate::step::StepFunction;
use crate::weights::WeightExpr;

pub fn parse_weight(input: &str) -> Result<WeightExpr> {
    let mut p = Parser::new(input);
    let w = p.weight()?;
    p.finish()?;
    Ok(w)
}

pub fn parse_step(input: &str) -> Result<StepFunction> {
    let mut p = Parser::new(input);
    p.expect_ident("step")?;
    p.expect('(')?;
    let knots = p.list()?;
    p.expect(',')?;
    let values = p.list()?;
    p.expect(')')?;
    p.finish()?;
    if knots.len() != values.len() {
        return Err(Error::Parse(format!(
            "step needs one value per knot, got {} knots and {} values",
            knots.len(),
            values.len()
        )));
    }
    if !(knots.windows(2).all(|w| w[0] < w[1])
        && knots.first().map_or(false, |&k| k > 0.0 && k.is_finite()))
    {
        return Err(Error::Parse(
            "step knots must be finite, positive and strictly increasing".into(),
        ));
    }
    Ok(StepFunction::new(knots, values))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c as u8) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected '{c}' at byte {} of the expression",
                self.pos
            )))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Parse(format!("expected a name at byte {start}")));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn expect_ident(&mut self, name: &str) -> Result<()> {
        let got = self.ident()?;
        if got == name {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{name}', got '{got}'")))
        }
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "trailing input at byte {}",
                self.pos
            )))
        }
    }

    /// Number: float literal or fraction `a/b`; `inf` and `-inf` accepted.
    fn num(&mut self) -> Result<f64> {
        let a = self.simple_num()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let b = self.simple_num()?;
            Ok(a / b)
        } else {
            Ok(a)
        }
    }

    fn simple_num(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') || self.peek() == Some(b'+') {
            self.pos += 1;
        }
        if self
            .src
            .get(self.pos)
            .map_or(false, |c| c.is_ascii_alphabetic())
        {
            let sign = if self.src[start] == b'-' { -1.0 } else { 1.0 };
            let name = self.ident()?;
            return if name == "inf" {
                Ok(sign * f64::INFINITY)
            } else {
                Err(Error::Parse(format!("unknown numeric literal '{name}'")))
            };
        }
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit()
                || self.src[self.pos] == b'.'
                || self.src[self.pos] == b'e'
                || self.src[self.pos] == b'E'
                || ((self.src[self.pos] == b'-' || self.src[self.pos] == b'+')
                    && matches!(self.src[self.pos - 1], b'e' | b'E')))
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number '{text}' at byte {start}")))
    }

    fn list(&mut self) -> Result<Vec<f64>> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.peek() == Some(b']') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.num()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b']') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "expected ',' or ']' at byte {}",
                        self.pos
                    )))
                }
            }
        }
    }

    fn weight(&mut self) -> Result<WeightExpr> {
        let name = self.ident()?;
        self.expect('(')?;
        let out = match name.as_str() {
            "pow" => {
                let c = self.num()?;
                self.expect(',')?;
                let alpha = self.num()?;
                if c < 0.0 {
                    return Err(Error::Parse("pow coefficient must be >= 0".into()));
                }
                WeightExpr::power(c, alpha)
            }
            "exp" => {
                let c = self.num()?;
                self.expect(',')?;
                let rate = self.num()?;
                if c < 0.0 {
                    return Err(Error::Parse("exp coefficient must be >= 0".into()));
                }
                WeightExpr::exponential(c, rate)
            }
            "piecewise" => {
                let knots = self.list()?;
                self.expect(',')?;
                let values = self.list()?;
                if values.len() != knots.len() + 1 {
                    return Err(Error::Parse(format!(
                        "piecewise needs {} values for {} knots",
                        knots.len() + 1,
                        knots.len()
                    )));
                }
                if !(knots.windows(2).all(|w| w[0] < w[1])
                    && knots.first().map_or(true, |&k| k > 0.0))
                {
                    return Err(Error::Parse(
                        "piecewise knots must be positive and strictly increasing".into(),
                    ));
                }
                if values.iter().any(|&v| v < 0.0) {
                    return Err(Error::Parse("piecewise values must be >= 0".into()));
                }
                WeightExpr::piecewise(knots, values)
            }
            "sum" => {
                let mut children = vec![self.weight()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    children.push(self.weight()?);
                }
                WeightExpr::sum(children)
            }
            "prod" => {
                let a = self.weight()?;
                self.expect(',')?;
                let b = self.weight()?;
                WeightExpr::product(a, b)
            }
            "restrict" => {
                let child = self.weight()?;
                self.expect(',')?;
                let lo = self.num()?;
                self.expect(',')?;
                let hi = self.num()?;
                if !(lo >= 0.0 && hi > lo) {
                    return Err(Error::Parse("restrict needs 0 <= lo < hi".into()));
                }
                WeightExpr::restrict(child, lo, hi)
            }
            other => {
                return Err(Error::Parse(format!(
                    "unknown weight constructor '{other}'"
                )))
            }
        };
        self.expect(')')?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaves() {
        assert_eq!(parse_weight("pow(1,-0.5)").unwrap(), WeightExpr::power(1.0, -0.5));
        assert_eq!(parse_weight("pow(1, -1/2)").unwrap(), WeightExpr::power(1.0, -0.5));
        assert_eq!(parse_weight("exp(1,1)").unwrap(), WeightExpr::exponential(1.0, 1.0));
        assert_eq!(
            parse_weight("piecewise([1,2],[3,1,0.5])").unwrap(),
            WeightExpr::piecewise(vec![1.0, 2.0], vec![3.0, 1.0, 0.5])
        );
    }

    #[test]
    fn nested() {
        let w = parse_weight("sum(pow(1,0), prod(pow(2,1), exp(1,-1)))").unwrap();
        let expect = WeightExpr::sum(vec![
            WeightExpr::power(1.0, 0.0),
            WeightExpr::product(WeightExpr::power(2.0, 1.0), WeightExpr::exponential(1.0, -1.0)),
        ]);
        assert_eq!(w, expect);
        let r = parse_weight("restrict(pow(1,0), 0, inf)").unwrap();
        assert_eq!(r, WeightExpr::restrict(WeightExpr::power(1.0, 0.0), 0.0, f64::INFINITY));
    }

    #[test]
    fn step_literal() {
        let s = parse_step("step([1,2],[3,1])").unwrap();
        assert_eq!(s.eval(0.5), 3.0);
        assert_eq!(s.eval(1.5), 1.0);
        assert_eq!(s.eval(2.5), 0.0);
    }

    #[test]
    fn malformed_inputs_error() {
        assert!(parse_weight("pow(1)").is_err());
        assert!(parse_weight("pow(-1,0)").is_err());
        assert!(parse_weight("frob(1,2)").is_err());
        assert!(parse_weight("pow(1,0) trailing").is_err());
        assert!(parse_step("step([2,1],[1,1])").is_err());
        assert!(parse_step("step([1,2],[1])").is_err());
    }
}
