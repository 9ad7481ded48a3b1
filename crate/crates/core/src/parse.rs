//! Parser for the system input language:
//!
//! ```text
//! vars x,y;            # declaration, then one polynomial per ';'
//! (y-x)*(y-2*x);
//! 3/2*x^2 + (1+2*i)*y - 0.25;
//! ```
//!
//! Integer and rational literals are kept exact alongside the floating
//! image; a decimal literal marks the whole system as inexact.

use num::bigint::BigInt;
use num::rational::BigRational;
use num_complex::Complex64;
use thiserror::Error;

use crate::exactalg::{ExactPoly, ExactSystem, GaussRat, Rat};
use crate::polysys::{Poly, PolySystem};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("undeclared variable `{name}` at line {line}, column {col}")]
    UndeclaredVariable { name: String, line: usize, col: usize },
    #[error("empty system: no polynomials after the vars declaration")]
    EmptySystem,
    #[error("polynomial {index} is identically zero")]
    ZeroPolynomial { index: usize },
    #[error("exponent overflow at line {line}, column {col}")]
    ExponentOverflow { line: usize, col: usize },
}

/// Parse result: the numeric system plus, when every literal is an integer
/// or rational, the exact image of the same system.
#[derive(Clone, Debug)]
pub struct ParsedSystem {
    pub system: PolySystem,
    pub exact: Option<ExactSystem>,
    pub var_names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(String),
    Dec(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Comma,
    Semi,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let (l, c) = (line, col);
        let bump = |ch: char, line: &mut usize, col: &mut usize| {
            if ch == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match ch {
            '#' => {
                for ch in chars.by_ref() {
                    bump(ch, &mut line, &mut col);
                    if ch == '\n' {
                        break;
                    }
                }
            }
            ch if ch.is_whitespace() => {
                chars.next();
                bump(ch, &mut line, &mut col);
            }
            ch if ch.is_ascii_digit() => {
                let mut s = String::new();
                let mut is_dec = false;
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        bump(d, &mut line, &mut col);
                    } else if d == '.' && !is_dec {
                        is_dec = true;
                        s.push(d);
                        chars.next();
                        bump(d, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                let tok = if is_dec { Tok::Dec(s) } else { Tok::Int(s) };
                out.push(Spanned { tok, line: l, col: c });
            }
            ch if ch.is_alphabetic() || ch == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                        bump(d, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(s), line: l, col: c });
            }
            _ => {
                let tok = match ch {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '^' => Tok::Caret,
                    '/' => Tok::Slash,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    other => {
                        return Err(ParseError::Syntax {
                            line: l,
                            col: c,
                            msg: format!("unexpected character `{}`", other),
                        })
                    }
                };
                chars.next();
                bump(ch, &mut line, &mut col);
                out.push(Spanned { tok, line: l, col: c });
            }
        }
    }
    Ok(out)
}

/// Polynomial value carried through the expression walk: the float image
/// plus the exact image while it is still representable.
#[derive(Clone)]
struct DualPoly {
    num: Poly,
    exact: Option<ExactPoly>,
}

impl DualPoly {
    fn lift2(self, other: DualPoly, fnum: impl Fn(&Poly, &Poly) -> Poly, fex: impl Fn(&ExactPoly, &ExactPoly) -> ExactPoly) -> DualPoly {
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(fex(a, b)),
            _ => None,
        };
        DualPoly { num: fnum(&self.num, &other.num), exact }
    }

    fn add(self, other: DualPoly) -> DualPoly {
        self.lift2(other, |a, b| a.add(b), |a, b| a.add(b))
    }

    fn sub(self, other: DualPoly) -> DualPoly {
        self.lift2(other, |a, b| a.sub(b), |a, b| a.sub(b))
    }

    fn mul(self, other: DualPoly) -> DualPoly {
        self.lift2(other, |a, b| a.mul(b), |a, b| a.mul(b))
    }

    fn neg(self) -> DualPoly {
        DualPoly { num: self.num.neg(), exact: self.exact.map(|e| e.neg()) }
    }

    fn pow(self, e: u32) -> DualPoly {
        DualPoly { num: self.num.pow(e), exact: self.exact.map(|p| p.pow(e)) }
    }
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    nvars: usize,
    names: Vec<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Spanned> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: &str) -> ParseError {
        match self.peek() {
            Some(s) => ParseError::Syntax { line: s.line, col: s.col, msg: msg.to_string() },
            None => {
                let (line, col) = self
                    .toks
                    .last()
                    .map(|s| (s.line, s.col + 1))
                    .unwrap_or((1, 1));
                ParseError::Syntax { line, col, msg: format!("{} (at end of input)", msg) }
            }
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(s) if s.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err_here(&format!("expected {}", what))),
        }
    }

    fn expr(&mut self) -> Result<DualPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DualPoly, ParseError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek().map(|s| s.tok.clone()) {
            self.pos += 1;
            acc = acc.mul(self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DualPoly, ParseError> {
        if let Some(Tok::Minus) = self.peek().map(|s| s.tok.clone()) {
            self.pos += 1;
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek().map(|s| s.tok.clone()) {
            self.pos += 1;
            let sp = self
                .peek()
                .cloned()
                .ok_or_else(|| self.err_here("expected exponent"))?;
            match sp.tok {
                Tok::Int(ref digits) => {
                    self.pos += 1;
                    let e: u32 = digits.parse().map_err(|_| ParseError::ExponentOverflow {
                        line: sp.line,
                        col: sp.col,
                    })?;
                    if e > 64 {
                        return Err(ParseError::ExponentOverflow { line: sp.line, col: sp.col });
                    }
                    Ok(base.pow(e))
                }
                _ => Err(self.err_here("expected a nonnegative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<DualPoly, ParseError> {
        let sp = self
            .peek()
            .cloned()
            .ok_or_else(|| self.err_here("expected an operand"))?;
        match sp.tok {
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(ref name) => {
                self.pos += 1;
                if name == "i" {
                    return Ok(DualPoly {
                        num: Poly::constant(self.nvars, Complex64::new(0.0, 1.0)),
                        exact: Some(ExactPoly::constant(self.nvars, GaussRat::i())),
                    });
                }
                match self.names.iter().position(|n| n == name) {
                    Some(idx) => Ok(DualPoly {
                        num: Poly::variable(self.nvars, idx),
                        exact: Some(ExactPoly::variable(self.nvars, idx)),
                    }),
                    None => Err(ParseError::UndeclaredVariable {
                        name: name.clone(),
                        line: sp.line,
                        col: sp.col,
                    }),
                }
            }
            Tok::Int(ref digits) => {
                self.pos += 1;
                let numer: BigInt = digits.parse().unwrap();
                // rational literal p/q
                if let Some(Tok::Slash) = self.peek().map(|s| s.tok.clone()) {
                    let save = self.pos;
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Spanned { tok: Tok::Int(den), .. }) => {
                            self.pos += 1;
                            let denom: BigInt = den.parse().unwrap();
                            if denom == BigInt::from(0) {
                                return Err(ParseError::Syntax {
                                    line: sp.line,
                                    col: sp.col,
                                    msg: "rational literal with zero denominator".into(),
                                });
                            }
                            let rat = BigRational::new(numer, denom);
                            return Ok(self.const_rat(rat));
                        }
                        _ => {
                            self.pos = save;
                            return Err(self.err_here(
                                "`/` is only allowed inside a rational literal p/q",
                            ));
                        }
                    }
                }
                Ok(self.const_rat(BigRational::from_integer(numer)))
            }
            Tok::Dec(ref digits) => {
                self.pos += 1;
                let v: f64 = digits.parse().map_err(|_| ParseError::Syntax {
                    line: sp.line,
                    col: sp.col,
                    msg: "bad decimal literal".into(),
                })?;
                // decimal literals are treated as inexact
                Ok(DualPoly { num: Poly::constant(self.nvars, Complex64::new(v, 0.0)), exact: None })
            }
            _ => Err(self.err_here("expected an operand")),
        }
    }

    fn const_rat(&self, r: Rat) -> DualPoly {
        let v = rat_as_f64(&r);
        DualPoly {
            num: Poly::constant(self.nvars, Complex64::new(v, 0.0)),
            exact: Some(ExactPoly::constant(self.nvars, GaussRat::from_rat(r))),
        }
    }
}

fn rat_as_f64(r: &Rat) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::INFINITY)
}

/// Parse a complete system source text.
pub fn parse_system(text: &str) -> Result<ParsedSystem, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, nvars: 0, names: vec![] };

    match p.next().cloned() {
        Some(Spanned { tok: Tok::Ident(kw), .. }) if kw == "vars" => {}
        _ => {
            return Err(ParseError::Syntax {
                line: 1,
                col: 1,
                msg: "input must start with a `vars` declaration".into(),
            })
        }
    }
    loop {
        match p.next().cloned() {
            Some(Spanned { tok: Tok::Ident(name), line, col }) => {
                if name == "i" || p.names.contains(&name) {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        msg: format!("bad variable name `{}`", name),
                    });
                }
                p.names.push(name);
            }
            _ => return Err(p.err_here("expected a variable name")),
        }
        match p.next().map(|s| s.tok.clone()) {
            Some(Tok::Comma) => continue,
            Some(Tok::Semi) => break,
            _ => return Err(p.err_here("expected `,` or `;` in the vars declaration")),
        }
    }
    p.nvars = p.names.len();

    let mut polys: Vec<Poly> = Vec::new();
    let mut exacts: Vec<ExactPoly> = Vec::new();
    let mut all_exact = true;
    while p.peek().is_some() {
        let dual = p.expr()?;
        p.expect(Tok::Semi, "`;` after the polynomial")?;
        if dual.num.is_zero() {
            return Err(ParseError::ZeroPolynomial { index: polys.len() + 1 });
        }
        match dual.exact {
            Some(e) if all_exact => exacts.push(e),
            _ => all_exact = false,
        }
        polys.push(dual.num);
    }
    if polys.is_empty() {
        return Err(ParseError::EmptySystem);
    }
    let nvars = p.nvars;
    Ok(ParsedSystem {
        system: PolySystem::new(nvars, polys),
        exact: if all_exact { Some(ExactSystem::new(nvars, exacts)) } else { None },
        var_names: p.names,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysys::print_system;
    use num_complex::Complex64;

    #[test]
    fn parses_line_product() {
        let s = parse_system("vars x,y; (y-x)*(y-2*x)*(y-3*x);").unwrap();
        assert_eq!(s.system.nvars(), 2);
        assert_eq!(s.system.npolys(), 1);
        assert_eq!(s.system.polys()[0].degree(), 3);
        assert!(s.exact.is_some());
        // vanishes on the three lines
        for (x, y) in [(1.0, 1.0), (2.0, 4.0), (3.0, 9.0)] {
            let v = s.system.eval_unchecked(&[Complex64::new(x, 0.0), Complex64::new(y, 0.0)]);
            assert!(v[0].norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_zero_polynomial() {
        assert!(matches!(
            parse_system("vars x; 0;"),
            Err(ParseError::ZeroPolynomial { index: 1 })
        ));
    }

    #[test]
    fn multi_poly_readoff() {
        let s = parse_system("vars x,y,z; x^3+z; x^2-y;").unwrap();
        assert_eq!(s.system.nvars(), 3);
        assert_eq!(s.system.npolys(), 2);
    }

    #[test]
    fn rationals_and_imaginary_units() {
        let s = parse_system("vars x; 3/2*x + 2*i;").unwrap();
        let p = &s.system.polys()[0];
        let v = p.eval(&[Complex64::new(2.0, 0.0)]);
        assert_eq!(v, Complex64::new(3.0, 2.0));
        assert!(s.exact.is_some());
    }

    #[test]
    fn decimals_mark_system_inexact() {
        let s = parse_system("vars x; 0.5*x - 1;").unwrap();
        assert!(s.exact.is_none());
    }

    #[test]
    fn undeclared_variable_and_positions() {
        match parse_system("vars x;\n x + w;") {
            Err(ParseError::UndeclaredVariable { name, line, .. }) => {
                assert_eq!(name, "w");
                assert_eq!(line, 2);
            }
            other => panic!("expected undeclared variable error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn empty_system_rejected() {
        assert!(matches!(parse_system("vars x;"), Err(ParseError::EmptySystem)));
    }

    #[test]
    fn comments_and_whitespace_ignored() {
        let s = parse_system("# heading\nvars x , y ;\n# body\n x*y - 1 ; \n").unwrap();
        assert_eq!(s.system.npolys(), 1);
    }

    #[test]
    fn division_outside_literals_rejected() {
        assert!(parse_system("vars x; x/2;").is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        let src = "vars x,y; (y-x)*(y-2*x)*(y-3*x); 3/2*x^2 + (1+2*i)*y - 7;";
        let s = parse_system(src).unwrap();
        let printed = print_system(&s.system, &s.var_names);
        let reparsed = parse_system(&printed).unwrap();
        assert_eq!(s.system, reparsed.system);
    }
}
