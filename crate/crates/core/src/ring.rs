//! Coefficient rings and the graded polynomial base ring.
//!
//! Supported coefficient rings are the rationals, prime fields, the
//! integers, and localizations of the integers at a finite set of primes.
//! All arithmetic is exact; elements are arbitrary-precision fractions
//! whose denominators are constrained by the ring.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("invalid prime {0}")]
    InvalidPrime(u64),
    #[error("invalid localization set: {0}")]
    InvalidLocalizationSet(String),
    #[error("unrecognized ring descriptor `{0}`")]
    UnknownDescriptor(String),
    #[error("coefficient {0} does not lie in {1}")]
    CoefficientOutsideRing(String, String),
}

/// One of Q, F_p, Z, Z[1/S].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoefficientRing {
    Rationals,
    PrimeField(u64),
    Integers,
    IntegersLocalized(BTreeSet<u64>),
}

/// Deterministic Miller-Rabin for u64 inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow = |mut b: u64, mut e: u64| -> u64 {
        let mut acc: u128 = 1;
        let m = n as u128;
        let mut bb = b as u128 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * bb % m;
            }
            bb = bb * bb % m;
            e >>= 1;
        }
        b = acc as u64;
        b
    };
    // Witness set proven sufficient for all u64.
    'w: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = pow(x, 2);
            if x == n - 1 {
                continue 'w;
            }
        }
        return false;
    }
    true
}

/// Parse a ring descriptor: "Q", "Z", "Fp:<p>", "Z[1/p1,1/p2,...]".
pub fn make_ring(descriptor: &str) -> Result<CoefficientRing, RingError> {
    let d = descriptor.trim();
    match d {
        "Q" => return Ok(CoefficientRing::Rationals),
        "Z" => return Ok(CoefficientRing::Integers),
        _ => {}
    }
    if let Some(rest) = d.strip_prefix("Fp:") {
        let p: u64 = rest
            .trim()
            .parse()
            .map_err(|_| RingError::UnknownDescriptor(d.to_string()))?;
        return CoefficientRing::prime_field(p);
    }
    if let Some(rest) = d.strip_prefix("Z[").and_then(|r| r.strip_suffix(']')) {
        let mut primes = BTreeSet::new();
        for part in rest.split(',') {
            let part = part.trim();
            let num = part
                .strip_prefix("1/")
                .ok_or_else(|| RingError::InvalidLocalizationSet(part.to_string()))?;
            let p: u64 = num
                .parse()
                .map_err(|_| RingError::InvalidLocalizationSet(part.to_string()))?;
            if !is_prime(p) {
                return Err(RingError::InvalidLocalizationSet(format!(
                    "{p} is not prime"
                )));
            }
            primes.insert(p);
        }
        return CoefficientRing::localized(primes);
    }
    Err(RingError::UnknownDescriptor(d.to_string()))
}

impl CoefficientRing {
    pub fn prime_field(p: u64) -> Result<Self, RingError> {
        if is_prime(p) {
            Ok(CoefficientRing::PrimeField(p))
        } else {
            Err(RingError::InvalidPrime(p))
        }
    }

    pub fn localized(primes: BTreeSet<u64>) -> Result<Self, RingError> {
        for &p in &primes {
            if !is_prime(p) {
                return Err(RingError::InvalidLocalizationSet(format!(
                    "{p} is not prime"
                )));
            }
        }
        Ok(CoefficientRing::IntegersLocalized(primes))
    }

    pub fn is_field(&self) -> bool {
        matches!(
            self,
            CoefficientRing::Rationals | CoefficientRing::PrimeField(_)
        )
    }

    /// Krull dimension of R over itself: 0 for fields, 1 for subrings of Q.
    pub fn base_dimension(&self) -> usize {
        if self.is_field() {
            0
        } else {
            1
        }
    }

    /// Is the prime p a unit in R?
    pub fn is_invertible(&self, p: u64) -> Result<bool, RingError> {
        if !is_prime(p) {
            return Err(RingError::InvalidPrime(p));
        }
        Ok(match self {
            CoefficientRing::Rationals => true,
            CoefficientRing::PrimeField(q) => p != *q,
            CoefficientRing::Integers => false,
            CoefficientRing::IntegersLocalized(s) => s.contains(&p),
        })
    }

    /// Is the positive integer m (not necessarily prime) a unit in R?
    pub fn is_invertible_int(&self, m: &BigUint) -> bool {
        if m.is_zero() {
            return false;
        }
        match self {
            CoefficientRing::Rationals => true,
            CoefficientRing::PrimeField(q) => (m % *q) != BigUint::zero(),
            CoefficientRing::Integers => m.is_one(),
            CoefficientRing::IntegersLocalized(s) => {
                let mut m = m.clone();
                for &p in s {
                    let bp = BigUint::from(p);
                    while (&m % &bp).is_zero() {
                        m /= &bp;
                    }
                }
                m.is_one()
            }
        }
    }

    /// Does the exact fraction x lie in R?
    pub fn contains(&self, x: &BigRational) -> bool {
        match self {
            CoefficientRing::Rationals => true,
            CoefficientRing::PrimeField(p) => (x.denom().magnitude() % *p) != BigUint::zero(),
            CoefficientRing::Integers => x.denom().is_one(),
            CoefficientRing::IntegersLocalized(_) => {
                self.is_invertible_int(x.denom().magnitude())
            }
        }
    }

    /// Canonical representative of x in R. For prime fields this is the
    /// integer in [0, p); elsewhere the fraction itself.
    pub fn normalize(&self, x: &BigRational) -> Result<BigRational, RingError> {
        if !self.contains(x) {
            return Err(RingError::CoefficientOutsideRing(
                x.to_string(),
                self.to_string(),
            ));
        }
        match self {
            CoefficientRing::PrimeField(p) => {
                let p_big = BigInt::from(*p);
                let num = x.numer().mod_floor(&p_big);
                let den = x.denom().mod_floor(&p_big);
                let inv = mod_inverse(&den, *p).expect("denominator invertible by contains()");
                let val = (num * inv).mod_floor(&p_big);
                Ok(BigRational::from_integer(val))
            }
            _ => Ok(x.clone()),
        }
    }

    /// Is x zero as an element of R?
    pub fn is_zero_elem(&self, x: &BigRational) -> bool {
        match self {
            CoefficientRing::PrimeField(p) => {
                (x.numer().magnitude() % *p).is_zero() && !(x.denom().magnitude() % *p).is_zero()
            }
            _ => x.is_zero(),
        }
    }

    /// Strip unit prime factors (for localized rings) from a positive integer,
    /// returning the non-unit core. Over fields this returns 1.
    pub fn torsion_core(&self, m: &BigUint) -> BigUint {
        match self {
            CoefficientRing::Rationals | CoefficientRing::PrimeField(_) => BigUint::one(),
            CoefficientRing::Integers => m.clone(),
            CoefficientRing::IntegersLocalized(s) => {
                let mut m = m.clone();
                for &p in s {
                    let bp = BigUint::from(p);
                    while !m.is_zero() && (&m % &bp).is_zero() {
                        m /= &bp;
                    }
                }
                m
            }
        }
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Rationals => write!(f, "Q"),
            CoefficientRing::PrimeField(p) => write!(f, "Fp:{p}"),
            CoefficientRing::Integers => write!(f, "Z"),
            CoefficientRing::IntegersLocalized(s) => {
                let parts: Vec<String> = s.iter().map(|p| format!("1/{p}")).collect();
                write!(f, "Z[{}]", parts.join(","))
            }
        }
    }
}

/// Inverse of a mod p, p prime. None when p | a.
pub fn mod_inverse(a: &BigInt, p: u64) -> Option<BigInt> {
    let p_big = BigInt::from(p);
    let a = a.mod_floor(&p_big);
    if a.is_zero() {
        return None;
    }
    let egcd = a.extended_gcd(&p_big);
    if !egcd.gcd.is_one() {
        return None;
    }
    Some(egcd.x.mod_floor(&p_big))
}

/// The graded base ring A = R[t_1,...,t_n] with every t_j in degree 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialRingContext {
    pub torus_rank: usize,
    pub ring: CoefficientRing,
}

impl PolynomialRingContext {
    pub fn new(torus_rank: usize, ring: CoefficientRing) -> Self {
        PolynomialRingContext { torus_rank, ring }
    }
}

impl fmt::Display for PolynomialRingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[t1..t{}]", self.ring, self.torus_rank)
    }
}

/// A finitely generated R-module: free part plus invariant-factor torsion.
/// The torsion list is a divisor chain d_1 | d_2 | ... with every d_i > 1;
/// it is empty over a field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FgModule {
    pub free_rank: usize,
    pub torsion: Vec<BigUint>,
}

impl FgModule {
    pub fn free(rank: usize) -> Self {
        FgModule {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        FgModule::free(0)
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Number of generators in the canonical decomposition.
    pub fn generator_count(&self) -> usize {
        self.free_rank + self.torsion.len()
    }
}

impl fmt::Display for FgModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("R^{}", self.free_rank));
        }
        for t in &self.torsion {
            parts.push(format!("R/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}
