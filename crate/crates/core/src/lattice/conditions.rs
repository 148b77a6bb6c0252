//! Skeleton conditions on isotropy groups, in both the combinatorial
//! formulation (comparing p-skeleta with ordinary skeleta) and the
//! algebraic formulation through classifying-space dimensions. The two
//! checkers must always agree; that equivalence is a property test.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::subgroup::{decompose_subgroup, dim_from_decomposition, ClosedSubgroup};
use super::LatticeError;
use crate::ring::CoefficientRing;

/// One orbit-type stratum: a label, the isotropy subgroup, and the
/// dimension of its orbits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumDescriptor {
    pub name: String,
    pub isotropy: ClosedSubgroup,
    pub orbit_dim: usize,
}

impl StratumDescriptor {
    pub fn new(
        name: impl Into<String>,
        isotropy: ClosedSubgroup,
        orbit_dim: usize,
    ) -> Result<Self, LatticeError> {
        let name = name.into();
        let dec = decompose_subgroup(&isotropy);
        if orbit_dim != isotropy.torus_rank - dec.torus_rank {
            return Err(LatticeError::InconsistentStratum(
                name,
                orbit_dim,
                dec.torus_rank,
                isotropy.torus_rank,
            ));
        }
        Ok(StratumDescriptor {
            name,
            isotropy,
            orbit_dim,
        })
    }
}

/// Which of the two skeleton conditions was violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConditionKind {
    /// p-skeleta agree with skeleta (prime-field coefficients).
    SkeletonEquality,
    /// the (i-1)-st p-skeleton is contained in the i-th skeleton
    /// (subring-of-Q coefficients).
    SkeletonInclusion,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConditionViolation {
    pub skeleton_level: i64,
    pub prime: u64,
    pub stratum: String,
    pub condition: ConditionKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub ring: CoefficientRing,
    pub max_level: i64,
    pub holds: bool,
    pub violations: Vec<ConditionViolation>,
}

impl ConditionReport {
    fn from_violations(
        ring: &CoefficientRing,
        max_level: i64,
        mut violations: Vec<ConditionViolation>,
    ) -> Self {
        violations.sort_by(|a, b| {
            (a.skeleton_level, a.prime, &a.stratum).cmp(&(b.skeleton_level, b.prime, &b.stratum))
        });
        ConditionReport {
            ring: ring.clone(),
            max_level,
            holds: violations.is_empty(),
            violations,
        }
    }
}

fn condition_kind(ring: &CoefficientRing) -> ConditionKind {
    match ring {
        CoefficientRing::PrimeField(_) => ConditionKind::SkeletonEquality,
        _ => ConditionKind::SkeletonInclusion,
    }
}

/// Primes that can possibly matter: non-invertible primes dividing some
/// finite order of some stratum isotropy. All others give no constraint.
fn candidate_primes(strata: &[StratumDescriptor], ring: &CoefficientRing) -> BTreeSet<u64> {
    match ring {
        CoefficientRing::Rationals => BTreeSet::new(),
        CoefficientRing::PrimeField(p) => {
            let mut s = BTreeSet::new();
            s.insert(*p);
            s
        }
        _ => {
            let mut out = BTreeSet::new();
            for stratum in strata {
                let dec = decompose_subgroup(&stratum.isotropy);
                for m in &dec.finite_orders {
                    for p in small_prime_factors(m) {
                        if !ring.is_invertible(p).unwrap_or(true) {
                            out.insert(p);
                        }
                    }
                }
            }
            out
        }
    }
}

/// Prime factorization by trial division; isotropy orders are small.
fn small_prime_factors(m: &BigUint) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = m.clone();
    let mut p = 2u64;
    while !m.is_zero() && m > BigUint::from(1u32) {
        let bp = BigUint::from(p);
        if (&m % &bp).is_zero() {
            out.push(p);
            while (&m % &bp).is_zero() {
                m /= &bp;
            }
        }
        if &bp * &bp > m {
            if m > BigUint::from(1u32) {
                let digits = m.to_u64_digits();
                if digits.len() == 1 {
                    out.push(digits[0]);
                }
                break;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn validate_strata(strata: &[StratumDescriptor]) -> Result<(), LatticeError> {
    let ambient = strata.first().map(|s| s.isotropy.torus_rank);
    for s in strata {
        if Some(s.isotropy.torus_rank) != ambient {
            return Err(LatticeError::DimensionMismatch(
                s.isotropy.torus_rank,
                ambient.unwrap_or(0),
            ));
        }
        let dec = decompose_subgroup(&s.isotropy);
        if s.orbit_dim != s.isotropy.torus_rank - dec.torus_rank {
            return Err(LatticeError::InconsistentStratum(
                s.name.clone(),
                s.orbit_dim,
                dec.torus_rank,
                s.isotropy.torus_rank,
            ));
        }
    }
    Ok(())
}

/// Check the skeleton conditions for all levels i <= max_level directly
/// from skeleton membership. A stratum with orbit dimension o lies in the
/// i-th skeleton iff o <= i and in the (p,i)-skeleton iff
/// n - p_rank(isotropy, p) <= i.
pub fn check_conditions(
    strata: &[StratumDescriptor],
    ring: &CoefficientRing,
    max_level: i64,
) -> Result<ConditionReport, LatticeError> {
    validate_strata(strata)?;
    let kind = condition_kind(ring);
    let mut violations = Vec::new();
    for p in candidate_primes(strata, ring) {
        for stratum in strata {
            let n = stratum.isotropy.torus_rank as i64;
            let o = stratum.orbit_dim as i64;
            let pr = super::subgroup::p_rank(&stratum.isotropy, p)? as i64;
            let p_codim = n - pr;
            let hi = max_level.min(o - 1);
            let lo = match kind {
                ConditionKind::SkeletonEquality => p_codim,
                ConditionKind::SkeletonInclusion => p_codim + 1,
            };
            for i in lo.max(0)..=hi {
                violations.push(ConditionViolation {
                    skeleton_level: i,
                    prime: p,
                    stratum: stratum.name.clone(),
                    condition: kind,
                });
            }
        }
    }
    Ok(ConditionReport::from_violations(ring, max_level, violations))
}

/// The algebraic reformulation: a violation at level i is a stratum not in
/// the i-th skeleton whose classifying cohomology has dimension at least
/// d + n - i over the ring localized away from all relevant primes but p.
/// Agreement with `check_conditions` is the content of the equivalence
/// proposition and is enforced by tests.
pub fn check_conditions_algebraic(
    strata: &[StratumDescriptor],
    ring: &CoefficientRing,
    max_level: i64,
) -> Result<ConditionReport, LatticeError> {
    validate_strata(strata)?;
    let kind = condition_kind(ring);
    let d = ring.base_dimension() as i64;
    let mut violations = Vec::new();
    for p in candidate_primes(strata, ring) {
        for stratum in strata {
            let n = stratum.isotropy.torus_rank as i64;
            let o = stratum.orbit_dim as i64;
            let dec = decompose_subgroup(&stratum.isotropy);
            // The coefficient ring focused at p: the prime field itself, or
            // the integers with every other relevant prime inverted.
            let focused = match ring {
                CoefficientRing::PrimeField(q) => CoefficientRing::PrimeField(*q),
                _ => {
                    let mut others = BTreeSet::new();
                    for m in &dec.finite_orders {
                        for q in small_prime_factors(m) {
                            if q != p {
                                others.insert(q);
                            }
                        }
                    }
                    CoefficientRing::IntegersLocalized(others)
                }
            };
            let dim = dim_from_decomposition(&dec, &focused) as i64;
            for i in 0..=max_level.min(o - 1) {
                if dim >= d + n - i {
                    violations.push(ConditionViolation {
                        skeleton_level: i,
                        prime: p,
                        stratum: stratum.name.clone(),
                        condition: kind,
                    });
                }
            }
        }
    }
    Ok(ConditionReport::from_violations(ring, max_level, violations))
}
