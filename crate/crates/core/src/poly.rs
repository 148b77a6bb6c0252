//! Sparse exact polynomials in the graded ring A = R[t_1,...,t_n], deg t_j = 2.
//!
//! Coefficients are arbitrary-precision rationals; ring membership is
//! enforced where modules are constructed, not here. The canonical text
//! encoding is a sum of `coef*t1^a*t2^b` terms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("cannot parse polynomial `{0}`: {1}")]
    Parse(String, String),
    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),
}

/// Exponent vector; the cohomological degree is twice the total exponent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(vars: usize) -> Self {
        Monomial(vec![0; vars])
    }

    pub fn variable(vars: usize, index: usize) -> Self {
        let mut e = vec![0; vars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> i64 {
        2 * self.0.iter().map(|&e| e as i64).sum::<i64>()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// All monomials of the given even cohomological degree, ascending
    /// lexicographic on exponent vectors. Odd degrees have none.
    pub fn of_degree(vars: usize, degree: i64) -> Vec<Monomial> {
        if degree < 0 || degree % 2 != 0 {
            return Vec::new();
        }
        let total = (degree / 2) as u32;
        if vars == 0 {
            return if total == 0 {
                vec![Monomial(Vec::new())]
            } else {
                Vec::new()
            };
        }
        let mut out = Vec::new();
        let mut current = vec![0u32; vars];
        fill(&mut out, &mut current, 0, total);
        out.sort();
        out
    }
}

fn fill(out: &mut Vec<Monomial>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(Monomial(current.clone()));
        current[pos] = 0;
        return;
    }
    for e in 0..=remaining {
        current[pos] = e;
        fill(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format_monomial(self);
        if s.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{s}")
        }
    }
}

/// Sparse polynomial keyed by monomial. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(vars: usize) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: BigRational) -> Self {
        let mut p = Polynomial::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars), c);
        }
        p
    }

    pub fn integer(vars: usize, c: i64) -> Self {
        Polynomial::constant(vars, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn variable(vars: usize, index: usize) -> Self {
        let mut p = Polynomial::zero(vars);
        p.terms
            .insert(Monomial::variable(vars, index), BigRational::one());
        p
    }

    pub fn monomial(vars: usize, m: Monomial, c: BigRational) -> Self {
        let mut p = Polynomial::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Integer linear form sum(coeffs[j] * t_j), degree 2.
    pub fn linear_form(coeffs: &[BigInt]) -> Self {
        let vars = coeffs.len();
        let mut p = Polynomial::zero(vars);
        for (j, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                p.terms.insert(
                    Monomial::variable(vars, j),
                    BigRational::from_integer(c.clone()),
                );
            }
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    fn insert_add(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.vars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c.clone();
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.vars, other.vars);
        let mut out = Polynomial::zero(self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert_add(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        let mut out = Polynomial::zero(self.vars);
        for (m1, c1) in &self.terms {
            out.terms.insert(m1.mul(m), c1.clone());
        }
        out
    }

    /// Homogeneous degree, or None for 0 or inhomogeneous polynomials.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut deg = None;
        for m in self.terms.keys() {
            match deg {
                None => deg = Some(m.degree()),
                Some(d) if d == m.degree() => {}
                _ => return None,
            }
        }
        deg
    }

    /// Substitute t_j -> images[j]. Images must share a variable count.
    pub fn substitute(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.vars);
        let out_vars = images
            .first()
            .map(|p| p.vars)
            .unwrap_or(0);
        let mut out = Polynomial::zero(out_vars);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(out_vars, c.clone());
            for (j, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&images[j]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Parse the canonical encoding, e.g. "2*t1 - 3/2*t2^2 + t1*t2".
    pub fn parse(vars: usize, input: &str) -> Result<Polynomial, PolyError> {
        let err = |msg: &str| PolyError::Parse(input.to_string(), msg.to_string());
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty"));
        }
        let mut out = Polynomial::zero(vars);
        // Split into signed terms.
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut neg = false;
        let mut chars = s.chars().peekable();
        // Leading sign.
        if let Some(&c) = chars.peek() {
            if c == '-' {
                neg = true;
                chars.next();
            } else if c == '+' {
                chars.next();
            }
        }
        let mut prev: Option<char> = None;
        for c in chars {
            if (c == '+' || c == '-') && prev.map(|p| p != '^' && p != '*' && p != '/').unwrap_or(false) {
                terms.push((neg, std::mem::take(&mut current)));
                neg = c == '-';
            } else {
                current.push(c);
            }
            prev = Some(c);
        }
        terms.push((neg, current));
        for (negated, term) in terms {
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let mut coef = BigRational::one();
            let mut mono = Monomial::one(vars);
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(err("empty factor"));
                }
                if let Some(rest) = factor.strip_prefix('t') {
                    let (idx_str, exp) = match rest.split_once('^') {
                        Some((i, e)) => (
                            i,
                            e.parse::<u32>().map_err(|_| err("bad exponent"))?,
                        ),
                        None => (rest, 1),
                    };
                    let idx: usize = idx_str.parse().map_err(|_| err("bad variable index"))?;
                    if idx == 0 || idx > vars {
                        return Err(err(&format!("variable t{idx} out of range 1..{vars}")));
                    }
                    mono.0[idx - 1] += exp;
                } else {
                    // Rational coefficient.
                    let val = match factor.split_once('/') {
                        Some((n, d)) => {
                            let n: BigInt = n.parse().map_err(|_| err("bad numerator"))?;
                            let d: BigInt = d.parse().map_err(|_| err("bad denominator"))?;
                            if d.is_zero() {
                                return Err(err("zero denominator"));
                            }
                            BigRational::new(n, d)
                        }
                        None => {
                            let n: BigInt = factor.parse().map_err(|_| err("bad coefficient"))?;
                            BigRational::from_integer(n)
                        }
                    };
                    coef *= val;
                }
            }
            if negated {
                coef = -coef;
            }
            out.insert_add(mono, coef);
        }
        Ok(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
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
            let mono = format_monomial(m);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

fn format_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (j, &e) in m.0.iter().enumerate() {
        if e == 1 {
            parts.push(format!("t{}", j + 1));
        } else if e > 1 {
            parts.push(format!("t{}^{}", j + 1, e));
        }
    }
    parts.join("*")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn monomial_enumeration_is_lex_sorted() {
        let ms = Monomial::of_degree(2, 4);
        assert_eq!(
            ms,
            vec![
                Monomial(vec![0, 2]),
                Monomial(vec![1, 1]),
                Monomial(vec![2, 0])
            ]
        );
        assert!(Monomial::of_degree(2, 3).is_empty());
        assert_eq!(Monomial::of_degree(0, 0).len(), 1);
    }

    #[test]
    fn parse_round_trip() {
        let p = Polynomial::parse(2, "2*t1 - 3/2*t2^2 + t1*t2").unwrap();
        let again = Polynomial::parse(2, &p.to_string()).unwrap();
        assert_eq!(p, again);
        assert_eq!(p.coefficient(&Monomial(vec![1, 0])), q(2));
        assert_eq!(
            p.coefficient(&Monomial(vec![0, 2])),
            BigRational::new(BigInt::from(-3), BigInt::from(2))
        );
    }

    #[test]
    fn substitution_preserves_grading() {
        // t1 -> t1 + t2, t2 -> 2 t2 inside t1*t2.
        let p = Polynomial::parse(2, "t1*t2").unwrap();
        let images = vec![
            Polynomial::parse(2, "t1 + t2").unwrap(),
            Polynomial::parse(2, "2*t2").unwrap(),
        ];
        let q = p.substitute(&images);
        assert_eq!(q, Polynomial::parse(2, "2*t1*t2 + 2*t2^2").unwrap());
        assert_eq!(q.homogeneous_degree(), Some(4));
    }

    #[test]
    fn arithmetic() {
        let a = Polynomial::parse(1, "t1 + 1").unwrap();
        let b = Polynomial::parse(1, "t1 - 1").unwrap();
        assert_eq!(a.mul(&b), Polynomial::parse(1, "t1^2 - 1").unwrap());
        assert!(a.sub(&a).is_zero());
    }
}
