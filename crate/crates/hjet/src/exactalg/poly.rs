//! Sparse multivariate polynomials over the rationals.
//!
//! The representation is a map from exponent vectors to nonzero rational
//! coefficients. The variable set is shared via `Arc`, so cloning a
//! polynomial does not copy the names.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{Rational, Scalar};
use crate::error::{HjetError, Result};

pub type VarSet = Arc<Vec<String>>;

/// Build a variable set `prefix1 .. prefixN`.
pub fn var_set(prefix: &str, n: usize) -> VarSet {
    Arc::new((1..=n).map(|i| format!("{prefix}{i}")).collect())
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: VarSet,
    /// exponent vector -> coefficient; no zero coefficients stored.
    terms: BTreeMap<Vec<u16>, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &VarSet) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &VarSet, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !Zero::is_zero(&c) {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, <Rational as One>::one())
    }

    pub fn var(vars: &VarSet, idx: usize) -> Self {
        assert!(idx < vars.len(), "variable index out of range");
        let mut exps = vec![0u16; vars.len()];
        exps[idx] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(exps, <Rational as One>::one());
        p
    }

    pub fn from_terms(vars: &VarSet, terms: Vec<(Vec<u16>, Rational)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent arity mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, exps: Vec<u16>, c: Rational) {
        if Zero::is_zero(&c) {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if Zero::is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(HjetError::ArityMismatch {
                expected: self.vars.len(),
                got: other.vars.len(),
            })
        }
    }

    pub fn add_poly(&self, other: &Self) -> Self {
        self.check_compatible(other).expect("incompatible variable sets");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub_poly(&self, other: &Self) -> Self {
        self.add_poly(&other.neg_poly())
    }

    pub fn neg_poly(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul_poly(&self, other: &Self) -> Self {
        self.check_compatible(other).expect("incompatible variable sets");
        let mut out = Self::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u16> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn scale_poly(&self, r: &Rational) -> Self {
        if Zero::is_zero(r) {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * r)).collect(),
        }
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.vars);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_poly(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_poly(&base);
            }
        }
        acc
    }

    pub fn is_constant(&self) -> bool {
        self.terms
            .keys()
            .all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0u16; self.vars.len()])
            .cloned()
            .unwrap_or_else(<Rational as Zero>::zero)
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> usize {
        self.terms
            .keys()
            .map(|e| e[var] as usize)
            .max()
            .unwrap_or(0)
    }

    /// Set of variable indices actually occurring.
    pub fn vars_present(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for e in self.terms.keys() {
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    s.insert(i);
                }
            }
        }
        s
    }

    /// Coefficient polynomial of `var^1`, i.e. the terms linear in `var`
    /// with that variable struck out. Terms of higher degree in `var`
    /// are ignored; use `degree_in` to detect them.
    pub fn linear_coefficient_in(&self, var: usize) -> MultiPoly {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[var] == 1 {
                let mut e2 = e.clone();
                e2[var] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut e2 = e.clone();
                e2[var] -= 1;
                out.add_term(e2, c * Rational::from_integer(e[var].into()));
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len(), "evaluation arity mismatch");
        let mut acc = <Rational as Zero>::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &x) in e.iter().enumerate() {
                for _ in 0..x {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact division: panics unless `other` divides `self` exactly.
    /// Uses lex order on exponent vectors; inside fraction-free
    /// elimination the division is always exact.
    pub fn exact_div_poly(&self, other: &Self) -> Self {
        assert!(!other.terms.is_empty(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.vars);
        let (de, dc) = other.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        while let Some((re, rc)) = rem.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            let mut qe = Vec::with_capacity(re.len());
            for (a, b) in re.iter().zip(&de) {
                assert!(a >= b, "inexact polynomial division");
                qe.push(a - b);
            }
            let qc = &rc / &dc;
            let mut qt = Self::zero(&self.vars);
            qt.terms.insert(qe.clone(), qc.clone());
            rem = rem.sub_poly(&qt.mul_poly(other));
            quot.add_term(qe, qc);
        }
        quot
    }
}

impl Scalar for MultiPoly {
    fn zero(&self) -> Self {
        MultiPoly::zero(&self.vars)
    }
    fn one(&self) -> Self {
        MultiPoly::one(&self.vars)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        self.add_poly(other)
    }
    fn sub(&self, other: &Self) -> Self {
        self.sub_poly(other)
    }
    fn mul(&self, other: &Self) -> Self {
        self.mul_poly(other)
    }
    fn neg(&self) -> Self {
        self.neg_poly()
    }
    fn from_rational(&self, r: &Rational) -> Self {
        MultiPoly::constant(&self.vars, r.clone())
    }
    fn exact_div(&self, other: &Self) -> Self {
        self.exact_div_poly(other)
    }
    fn scale(&self, r: &Rational) -> Self {
        self.scale_poly(r)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c < &<Rational as Zero>::zero();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let ac = if neg { -c } else { c.clone() };
            let is_const = e.iter().all(|&x| x == 0);
            if !ac.is_one() || is_const {
                write!(f, "{ac}")?;
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut firstv = true;
            for (i, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if !firstv {
                    write!(f, "*")?;
                }
                firstv = false;
                write!(f, "{}", self.vars[i])?;
                if x > 1 {
                    write!(f, "^{x}")?;
                }
            }
        }
        Ok(())
    }
}
