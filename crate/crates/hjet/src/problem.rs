//! Problem file format: a JSON description of a distribution with exact
//! rational data and polynomial coefficient strings, plus an optional
//! polynomial test curve.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{HjetError, Result};
use crate::exactalg::poly::{var_set, MultiPoly, VarSet};
use crate::exactalg::Rational;
use crate::geometry::{Distribution, OneForm, VectorField};
use crate::jets::PolyCurve;

pub const PROBLEM_SCHEMA: &str = "hjet-problem/1";

/// On-disk problem description. Coefficients are polynomial strings in
/// the coordinates y1..yN using +, -, *, integer powers, parentheses and
/// rational literals; exact rationals are written as "a" or "a/b".
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    pub schema: String,
    pub dimension: usize,
    /// p rows of N coefficient strings: row s is the form sum_mu c_mu dy_mu.
    pub coframe: Vec<Vec<String>>,
    /// Optional n spanning fields, each N component strings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<String>>>,
    /// Base point, N rational strings.
    pub base: Vec<String>,
    /// Optional polynomial curve: per component, rational coefficients of
    /// ascending powers of t.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<Vec<String>>>,
    /// Optional growth vector override for frame construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<Vec<usize>>,
}

impl ProblemFile {
    pub fn from_str(text: &str) -> Result<ProblemFile> {
        let p: ProblemFile = serde_json::from_str(text)
            .map_err(|e| HjetError::Parse(format!("problem file: {e}")))?;
        if p.schema != PROBLEM_SCHEMA {
            return Err(HjetError::Parse(format!(
                "unsupported schema {:?}, expected {:?}",
                p.schema, PROBLEM_SCHEMA
            )));
        }
        Ok(p)
    }

    pub fn load(path: &std::path::Path) -> Result<ProblemFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HjetError::Parse(format!("{}: {e}", path.display())))?;
        ProblemFile::from_str(&text)
    }

    pub fn vars(&self) -> VarSet {
        var_set("y", self.dimension)
    }

    pub fn to_distribution(&self) -> Result<Distribution> {
        let nn = self.dimension;
        let vars = self.vars();
        let parse_row = |row: &[String], what: &str, idx: usize| -> Result<Vec<MultiPoly>> {
            if row.len() != nn {
                return Err(HjetError::Parse(format!(
                    "{what} {idx} has {} entries, expected {nn}",
                    row.len()
                )));
            }
            row.iter()
                .enumerate()
                .map(|(mu, s)| {
                    parse_poly(s, &vars).map_err(|e| {
                        HjetError::Parse(format!("{what} {idx}, component {}: {e}", mu + 1))
                    })
                })
                .collect()
        };
        let mut coframe = Vec::with_capacity(self.coframe.len());
        for (i, row) in self.coframe.iter().enumerate() {
            coframe.push(OneForm::new(parse_row(row, "coframe row", i + 1)?));
        }
        let generators = match &self.generators {
            None => None,
            Some(rows) => {
                let mut g = Vec::with_capacity(rows.len());
                for (i, row) in rows.iter().enumerate() {
                    g.push(VectorField::new(parse_row(row, "generator", i + 1)?));
                }
                Some(g)
            }
        };
        if self.base.len() != nn {
            return Err(HjetError::Parse(format!(
                "base point has {} entries, expected {nn}",
                self.base.len()
            )));
        }
        let base = self
            .base
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Distribution::new(&vars, coframe, generators, base)
    }

    /// The test curve, if present, as a polynomial curve in t.
    pub fn to_curve(&self) -> Result<Option<PolyCurve>> {
        let rows = match &self.curve {
            None => return Ok(None),
            Some(r) => r,
        };
        if rows.len() != self.dimension {
            return Err(HjetError::Parse(format!(
                "curve has {} components, expected {}",
                rows.len(),
                self.dimension
            )));
        }
        let tvars = var_set("t", 1);
        let t = MultiPoly::var(&tvars, 0);
        let mut comps = Vec::with_capacity(rows.len());
        for row in rows {
            let mut acc = MultiPoly::zero(&tvars);
            for (k, c) in row.iter().enumerate() {
                let c = parse_rational(c)?;
                acc = acc.add_poly(&t.pow(k as u32).scale_poly(&c));
            }
            comps.push(acc);
        }
        Ok(Some(PolyCurve::new(comps)))
    }
}

/// Exact rational literal "a" or "a/b", with optional leading sign.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        None => (t, "1"),
        Some((a, b)) => (a.trim(), b.trim()),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| HjetError::Parse(format!("bad rational {t:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| HjetError::Parse(format!("bad rational {t:?}")))?;
    if den == BigInt::from(0) {
        return Err(HjetError::Parse(format!("zero denominator in {t:?}")));
    }
    Ok(Rational::new(num, den))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str, vars: &VarSet) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = s.chars().collect();
    let n_vars = vars.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                out.push((col, Tok::Plus));
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push((col, Tok::Minus));
                i += 1;
            }
            '*' | '\u{b7}' | '\u{22c5}' => {
                out.push((col, Tok::Star));
                i += 1;
            }
            '^' => {
                out.push((col, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((col, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((col, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut text: String = chars[start..i].iter().collect();
                if i < chars.len() && chars[i] == '/' {
                    let mut j = i + 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j > i + 1 {
                        text.push('/');
                        text.extend(&chars[i + 1..j]);
                        i = j;
                    }
                }
                out.push((col, Tok::Num(parse_rational(&text)?)));
            }
            'y' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == start {
                    return Err(HjetError::Parse(format!(
                        "column {col}: variable must be y<index>"
                    )));
                }
                let idx: usize = chars[start..j]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| HjetError::Parse(format!("column {col}: bad variable index")))?;
                if idx < 1 || idx > n_vars {
                    return Err(HjetError::Parse(format!(
                        "column {col}: variable y{idx} out of range 1..={n_vars}"
                    )));
                }
                out.push((col, Tok::Var(idx - 1)));
                i = j;
            }
            other => {
                return Err(HjetError::Parse(format!(
                    "column {col}: unexpected character {other:?}"
                )));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    vars: &'a VarSet,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(c, _)| *c)
            .unwrap_or_else(|| self.toks.last().map(|(c, _)| c + 1).unwrap_or(1))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Minus) => {
                negate = true;
                self.bump();
            }
            Some(Tok::Plus) => {
                self.bump();
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg_poly();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add_poly(&t);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.sub_poly(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            let f = self.power()?;
            acc = acc.mul_poly(&f);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        self.bump();
        let col = self.col();
        match self.bump() {
            Some(Tok::Num(r)) if r.is_integer() && r >= Rational::from_integer(0.into()) => {
                let e: u32 = r.to_integer().try_into().map_err(|_| {
                    HjetError::Parse(format!("column {col}: exponent too large"))
                })?;
                Ok(base.pow(e))
            }
            _ => Err(HjetError::Parse(format!(
                "column {col}: exponent must be a nonnegative integer"
            ))),
        }
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Num(r)) => Ok(MultiPoly::constant(self.vars, r)),
            Some(Tok::Var(i)) => Ok(MultiPoly::var(self.vars, i)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                let col = self.col();
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(HjetError::Parse(format!(
                        "column {col}: expected closing parenthesis"
                    ))),
                }
            }
            _ => Err(HjetError::Parse(format!(
                "column {col}: expected a number, variable or parenthesis"
            ))),
        }
    }
}

/// Parse a polynomial string over y1..yN into an exact polynomial.
pub fn parse_poly(s: &str, vars: &VarSet) -> Result<MultiPoly> {
    let toks = lex(s, vars)?;
    if toks.is_empty() {
        return Err(HjetError::Parse("empty polynomial".into()));
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        vars,
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(HjetError::Parse(format!(
            "column {}: trailing input",
            p.col()
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, rat_int};

    fn v3() -> VarSet {
        var_set("y", 3)
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3").unwrap(), rat_int(3));
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(" 7 / 2 ").unwrap(), rat(7, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a").is_err());
    }

    #[test]
    fn polynomial_grammar() {
        let vars = v3();
        let y1 = MultiPoly::var(&vars, 0);
        let y2 = MultiPoly::var(&vars, 1);
        assert_eq!(parse_poly("y1", &vars).unwrap(), y1);
        assert_eq!(
            parse_poly("-1/2 * y1^2 + y2", &vars).unwrap(),
            y1.pow(2).scale_poly(&rat(-1, 2)).add_poly(&y2)
        );
        assert_eq!(
            parse_poly("(y1 - 2) * (y1 + 2)", &vars).unwrap(),
            y1.pow(2).sub_poly(&MultiPoly::constant(&vars, rat_int(4)))
        );
        assert_eq!(parse_poly("0", &vars).unwrap(), MultiPoly::zero(&vars));
    }

    #[test]
    fn parse_errors_carry_column() {
        let vars = v3();
        let e = parse_poly("y1 + z", &vars).unwrap_err();
        assert!(format!("{e}").contains("column 6"), "{e}");
        assert!(parse_poly("y9", &vars).is_err());
        assert!(parse_poly("y1 ^ y2", &vars).is_err());
        assert!(parse_poly("y1 +", &vars).is_err());
        assert!(parse_poly("(y1", &vars).is_err());
        assert!(parse_poly("y1 y2", &vars).is_err());
    }

    #[test]
    fn contact_problem_round_trip() {
        let text = r#"{
            "schema": "hjet-problem/1",
            "dimension": 3,
            "coframe": [["-y2", "0", "1"]],
            "base": ["0", "0", "0"],
            "curve": [["0", "1"], ["0", "1"], ["0", "0", "1/2"]]
        }"#;
        let p = ProblemFile::from_str(text).unwrap();
        let d = p.to_distribution().unwrap();
        assert_eq!(d.dim(), 3);
        assert_eq!(d.corank(), 1);
        let u = p.to_curve().unwrap().unwrap();
        assert_eq!(u.eval(&rat_int(2)), vec![rat_int(2), rat_int(2), rat_int(2)]);
    }

    #[test]
    fn schema_is_checked() {
        let text = r#"{"schema": "hjet-problem/2", "dimension": 1, "coframe": [], "base": []}"#;
        assert!(matches!(
            ProblemFile::from_str(text),
            Err(HjetError::Parse(_))
        ));
    }
}
