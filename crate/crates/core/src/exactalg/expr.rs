//! Infix expression grammar shared by the spec format and all reports.
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := ("-" | "+") unary | power
//! power := atom ("^" ["-"] integer | "^" "(" ["-"] integer ")")?
//! atom  := number | symbol | "sqrt" "(" expr ")" | "(" expr ")"
//! ```
//! Numbers may be integers or decimals; decimals are read as exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::alg::Alg;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::ExactError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ExactError> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            let text = &s[start..i];
            out.push((start, Tok::Num(parse_decimal(text).ok_or_else(|| err(start, "bad number"))?)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(s[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(err(i, &format!("unexpected character '{}'", c)));
        }
    }
    Ok(out)
}

pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let mut parts = text.splitn(2, '.');
    let ip = parts.next().unwrap_or("");
    let fp = parts.next().unwrap_or("");
    if fp.contains('.') || (ip.is_empty() && fp.is_empty()) {
        return None;
    }
    let digits = format!("{}{}", ip, fp);
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10u32), fp.len());
    Some(BigRational::new(n, d))
}

fn err(pos: usize, msg: &str) -> ExactError {
    ExactError::Parse { pos, msg: msg.to_string() }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|t| t.0).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExactError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(self.pos(), &format!("expected '{}'", c)))
        }
    }

    fn expr(&mut self) -> Result<Alg, ExactError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Alg, ExactError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let pos = self.pos();
                let d = self.unary()?;
                let inv = d.inv().ok_or_else(|| err(pos, "division by zero"))?;
                acc = &acc * &inv;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Alg, ExactError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Alg, ExactError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let pos = self.pos();
        let e = match self.peek().cloned() {
            Some(Tok::Num(n)) if n.is_integer() => {
                self.i += 1;
                i32::try_from(n.to_integer()).map_err(|_| err(pos, "exponent too large"))?
            }
            _ => return Err(err(pos, "expected integer exponent")),
        };
        if paren {
            self.expect(')')?;
        }
        let e = if neg { -e } else { e };
        base.pow(e).ok_or_else(|| err(pos, "zero to a negative power"))
    }

    fn atom(&mut self) -> Result<Alg, ExactError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                Ok(Alg::from_rational(n))
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                if name == "sqrt" && self.peek() == Some(&Tok::Op('(')) {
                    self.i += 1;
                    let inner = self.expr()?;
                    self.expect(')')?;
                    return inner.sqrt().ok_or_else(|| err(pos, "nested square roots are not supported"));
                }
                Ok(Alg::from_poly(Poly::symbol(&name)))
            }
            Some(Tok::Op('(')) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(err(pos, "expected a number, symbol or '('")),
        }
    }
}

pub fn parse_alg(text: &str) -> Result<Alg, ExactError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(err(0, "empty expression"));
    }
    let mut p = Parser { toks, i: 0, end: text.len() };
    let v = p.expr()?;
    if p.i != p.toks.len() {
        return Err(err(p.pos(), "trailing input"));
    }
    Ok(v)
}

pub fn parse_ratfunc(text: &str) -> Result<RatFunc, ExactError> {
    parse_alg(text)?
        .as_ratfunc()
        .ok_or_else(|| err(0, "square roots are not allowed here"))
}

pub fn parse_poly(text: &str) -> Result<Poly, ExactError> {
    let r = parse_ratfunc(text)?;
    match r.as_poly() {
        Some(p) => Ok(p.clone()),
        None => Err(err(0, "expected a polynomial")),
    }
}

pub fn rational_from_str(text: &str) -> Result<BigRational, ExactError> {
    let r = parse_ratfunc(text)?;
    r.as_constant().ok_or_else(|| err(0, "expected a rational number"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        assert_eq!(parse_poly("-x^2").unwrap().to_string(), "-x^2");
        assert_eq!(parse_poly("1/2*m1sq - (m2sq + s)/2").unwrap().to_string(), "1/2*m1sq - 1/2*m2sq - 1/2*s");
        assert_eq!(parse_ratfunc("x^-1").unwrap(), parse_ratfunc("1/x").unwrap());
        assert_eq!(parse_ratfunc("x^(-2)").unwrap(), parse_ratfunc("1/x/x").unwrap());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_poly("0.25").unwrap(), parse_poly("1/4").unwrap());
    }

    #[test]
    fn errors_carry_position() {
        match parse_alg("x + * y") {
            Err(ExactError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{:?}", other),
        }
        assert!(parse_alg("1/(x-x)").is_err());
        assert!(parse_ratfunc("sqrt(s)").is_err());
        assert!(parse_alg("sqrt(1+sqrt(s))").is_err());
    }
}
