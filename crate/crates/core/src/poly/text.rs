//! Canonical text form of polynomials and a small expression parser.
//!
//! Printing: terms in descending graded-lex order joined by ` + ` / ` - `,
//! monomials as `x^2*y`, rational coefficients as `a/b`, non-real coefficients
//! parenthesized as `(a/b+c/d*i)`. The parser accepts that form and general
//! expressions built from `+ - * / ^`, parentheses, integer/decimal literals,
//! the imaginary unit `i` (unless `i` is a declared variable) and variable names.

use num::{One, Signed, Zero};

use super::{parse_rational, GaussRat, Monomial, MultiPoly, PolyError};

fn format_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

pub fn format_poly(p: &MultiPoly, names: &[String]) -> String {
    assert!(names.len() >= p.nvars(), "not enough variable names");
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let mono = format_monomial(m, names);
        let (negative, body) = if c.is_real() {
            let neg = c.re.is_negative();
            let abs = GaussRat::from_rational(c.re.abs());
            let body = if mono.is_empty() {
                abs.to_string()
            } else if abs.is_one() {
                mono
            } else {
                format!("{}*{}", abs, mono)
            };
            (neg, body)
        } else if c.re.is_zero() {
            let neg = c.im.is_negative();
            let abs = GaussRat::from_rational(c.im.abs());
            if mono.is_empty() {
                (neg, format!("{}*i", abs))
            } else {
                (neg, format!("{}*i*{}", abs, mono))
            }
        } else if mono.is_empty() {
            (false, c.to_string())
        } else {
            (false, format!("({})*{}", c, mono))
        };
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, PolyError> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // Scientific exponent, e.g. 1.5e-3.
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(PolyError::Parse(format!("unexpected character '{}'", c)));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                -self.term()?
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(Tok::Op(op)) = self.peek() {
            let op = *op;
            if op != '+' && op != '-' {
                break;
            }
            self.pos += 1;
            let t = self.term()?;
            acc = if op == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.power()?;
        while let Some(Tok::Op(op)) = self.peek() {
            let op = *op;
            if op != '*' && op != '/' {
                break;
            }
            self.pos += 1;
            let rhs = self.power()?;
            if op == '*' {
                acc = &acc * &rhs;
            } else {
                if !rhs.is_constant() || rhs.is_zero() {
                    return Err(PolyError::Parse("division by a non-constant or zero".into()));
                }
                let inv = rhs.constant_term().inv().expect("nonzero constant");
                acc = acc.scale(&inv);
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(n)) => {
                    let e: u32 = n
                        .parse()
                        .map_err(|_| PolyError::Parse(format!("bad exponent '{}'", n)))?;
                    return Ok(base.pow(e));
                }
                other => return Err(PolyError::Parse(format!("expected exponent, found {:?}", other))),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly, PolyError> {
        match self.next() {
            Some(Tok::Num(s)) => {
                let r = parse_rational(&s).ok_or_else(|| PolyError::Parse(format!("bad number '{}'", s)))?;
                Ok(MultiPoly::constant(self.nvars(), GaussRat::from_rational(r)))
            }
            Some(Tok::Ident(name)) => {
                if let Some(idx) = self.names.iter().position(|n| *n == name) {
                    Ok(MultiPoly::var(self.nvars(), idx))
                } else if name == "i" {
                    Ok(MultiPoly::constant(self.nvars(), GaussRat::i()))
                } else {
                    Err(PolyError::Parse(format!("unknown variable '{}'", name)))
                }
            }
            Some(Tok::Op('(')) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::Op(')')) => Ok(e),
                    other => Err(PolyError::Parse(format!("expected ')', found {:?}", other))),
                }
            }
            Some(Tok::Op('-')) => Ok(-self.power()?),
            other => Err(PolyError::Parse(format!("unexpected token {:?}", other))),
        }
    }
}

/// Parses a polynomial over the given variable names.
pub fn parse_poly(text: &str, names: &[String]) -> Result<MultiPoly, PolyError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(PolyError::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, names };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(PolyError::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn canonical_printing() {
        let n = names(&["x", "y"]);
        let p = parse_poly("y^2 - 3/2*x + 1 + x*y", &n).unwrap();
        assert_eq!(p.to_text(&n), "x*y + y^2 - 3/2*x + 1");
        let q = parse_poly("(1+2*i)*x - i", &n).unwrap();
        assert_eq!(q.to_text(&n), "(1+2*i)*x - 1*i");
        assert_eq!(MultiPoly::zero(2).to_text(&n), "0");
        assert_eq!(parse_poly("-x^2", &n).unwrap().to_text(&n), "-x^2");
    }

    #[test]
    fn round_trip() {
        let n = names(&["u", "v", "t"]);
        for s in ["u^3*v - 7/3*t + (2/5-1/7*i)*u*v*t", "-(u+v)^3 + 2.5*t", "i*u^2 + 1/3"] {
            let p = parse_poly(s, &n).unwrap();
            let back = parse_poly(&p.to_text(&n), &n).unwrap();
            assert_eq!(p, back, "{}", s);
        }
    }

    #[test]
    fn errors() {
        let n = names(&["x"]);
        assert!(parse_poly("x +", &n).is_err());
        assert!(parse_poly("y", &n).is_err());
        assert!(parse_poly("1/x", &n).is_err());
        assert!(parse_poly("", &n).is_err());
    }
}
