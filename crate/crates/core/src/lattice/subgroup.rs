//! Closed subgroups of the torus presented by character matrices, their
//! canonical divisor-chain decomposition, and presentations of the
//! cohomology of their classifying spaces.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{smith_normal_form, IntMatrix};
use super::LatticeError;
use crate::grmod::GradedModule;
use crate::poly::Polynomial;
use crate::ring::{CoefficientRing, PolynomialRingContext};

/// A closed subgroup of T = (S^1)^n: the joint kernel of the rows of the
/// character matrix, each row read as a character T -> S^1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedSubgroup {
    pub torus_rank: usize,
    pub character_matrix: IntMatrix,
}

impl ClosedSubgroup {
    pub fn new(torus_rank: usize, character_matrix: IntMatrix) -> Result<Self, LatticeError> {
        if character_matrix.cols() != torus_rank && character_matrix.rows() > 0 {
            return Err(LatticeError::DimensionMismatch(
                character_matrix.cols(),
                torus_rank,
            ));
        }
        Ok(ClosedSubgroup {
            torus_rank,
            character_matrix,
        })
    }

    /// The full torus (no conditions).
    pub fn full_torus(torus_rank: usize) -> Self {
        ClosedSubgroup {
            torus_rank,
            character_matrix: IntMatrix::zeros(0, torus_rank),
        }
    }

    pub fn from_i64_rows(torus_rank: usize, rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        ClosedSubgroup::new(torus_rank, IntMatrix::from_i64_rows(rows))
    }
}

/// Canonical decomposition Z_{m_1} x ... x Z_{m_q} x (S^1)^r with the
/// divisor chain m_q | m_{q-1} | ... | m_1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupDecomposition {
    pub finite_orders: Vec<BigUint>,
    pub torus_rank: usize,
}

/// Decompose via the Smith normal form of the character matrix. The result
/// does not depend on the presentation of the subgroup.
pub fn decompose_subgroup(subgroup: &ClosedSubgroup) -> SubgroupDecomposition {
    let snf = smith_normal_form(&subgroup.character_matrix);
    let mut finite_orders: Vec<BigUint> = snf
        .invariant_factors
        .iter()
        .filter(|f| !f.is_one())
        .cloned()
        .collect();
    // SNF yields an ascending chain d_1 | d_2 | ...; the decomposition lists
    // the largest order first.
    finite_orders.reverse();
    SubgroupDecomposition {
        finite_orders,
        torus_rank: subgroup.torus_rank - snf.rank(),
    }
}

/// Rank of the maximal p-torus contained in the subgroup.
pub fn p_rank(subgroup: &ClosedSubgroup, p: u64) -> Result<usize, LatticeError> {
    if !crate::ring::is_prime(p) {
        return Err(LatticeError::InvalidPrime(p));
    }
    let dec = decompose_subgroup(subgroup);
    let bp = BigUint::from(p);
    let divisible = dec
        .finite_orders
        .iter()
        .filter(|m| (*m % &bp).is_zero())
        .count();
    Ok(dec.torus_rank + divisible)
}

/// dim over H^*(BT) of H^*(BT'; R), by the closed-form case analysis:
/// r + s when R is a field or s > 0, r + 1 when R is a proper subring of Q
/// and s = 0, where s counts finite orders that are not units in R.
pub fn dim_classifying(subgroup: &ClosedSubgroup, ring: &CoefficientRing) -> usize {
    let dec = decompose_subgroup(subgroup);
    dim_from_decomposition(&dec, ring)
}

pub fn dim_from_decomposition(dec: &SubgroupDecomposition, ring: &CoefficientRing) -> usize {
    let s = dec
        .finite_orders
        .iter()
        .filter(|m| !ring.is_invertible_int(m))
        .count();
    if ring.is_field() || s > 0 {
        dec.torus_rank + s
    } else {
        dec.torus_rank + 1
    }
}

/// H^*(BT'; R) as a cyclic A-module: A/(d_1 l_1, ..., d_s l_s) where the
/// l_i are the coordinate linear forms of the splitting coordinates
/// produced by the Smith normal form and the d_i its diagonal entries
/// (d_i = 1 kills the coordinate outright).
pub fn present_classifying_cohomology(
    subgroup: &ClosedSubgroup,
    ctx: &PolynomialRingContext,
) -> GradedModule {
    assert_eq!(ctx.torus_rank, subgroup.torus_rank);
    let n = subgroup.torus_rank;
    let snf = smith_normal_form(&subgroup.character_matrix);
    let mut ideal = Vec::new();
    for i in 0..snf.rank() {
        // coordinate form: row i of V^{-1}, scaled by d_i
        let coeffs: Vec<BigInt> = (0..n)
            .map(|j| snf.v_inv.get(i, j) * snf.d.get(i, i))
            .collect();
        ideal.push(Polynomial::linear_form(&coeffs));
    }
    GradedModule::cyclic(ctx.clone(), 0, ideal).expect("linear relations are homogeneous")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{make_ring, FgModule};

    fn subgroup(n: usize, rows: &[Vec<i64>]) -> ClosedSubgroup {
        ClosedSubgroup::from_i64_rows(n, rows).unwrap()
    }

    #[test]
    fn decompositions() {
        // Z_2 inside the circle, kernel of the squaring character.
        let d = decompose_subgroup(&subgroup(1, &[vec![2]]));
        assert_eq!(d.finite_orders, vec![BigUint::from(2u32)]);
        assert_eq!(d.torus_rank, 0);

        // Z_2 x Z_2 inside T^2.
        let d = decompose_subgroup(&subgroup(2, &[vec![2, 0], vec![0, 2]]));
        assert_eq!(
            d.finite_orders,
            vec![BigUint::from(2u32), BigUint::from(2u32)]
        );
        assert_eq!(d.torus_rank, 0);

        // No conditions: the whole torus.
        let d = decompose_subgroup(&ClosedSubgroup::full_torus(2));
        assert!(d.finite_orders.is_empty());
        assert_eq!(d.torus_rank, 2);
    }

    #[test]
    fn decomposition_orders_descend() {
        // diag(2, 4) is not in chain order as given; SNF sorts it out.
        let d = decompose_subgroup(&subgroup(2, &[vec![2, 0], vec![0, 4]]));
        assert_eq!(
            d.finite_orders,
            vec![BigUint::from(4u32), BigUint::from(2u32)]
        );
        for w in d.finite_orders.windows(2) {
            assert!((&w[0] % &w[1]).is_zero());
        }
    }

    #[test]
    fn p_ranks() {
        let z2z2 = subgroup(2, &[vec![2, 0], vec![0, 2]]);
        assert_eq!(p_rank(&z2z2, 2).unwrap(), 2);
        assert_eq!(p_rank(&z2z2, 3).unwrap(), 0);
        // S^1 x Z_4 in T^2: kernel of (t1, t2) -> t2^4.
        let s1z4 = subgroup(2, &[vec![0, 4]]);
        assert_eq!(p_rank(&s1z4, 2).unwrap(), 2);
        assert!(p_rank(&s1z4, 4).is_err());
    }

    #[test]
    fn classifying_dimensions() {
        let z = make_ring("Z").unwrap();
        let q = make_ring("Q").unwrap();
        let f3 = make_ring("Fp:3").unwrap();
        let z2 = subgroup(1, &[vec![2]]);
        assert_eq!(dim_classifying(&z2, &z), 1);
        assert_eq!(dim_classifying(&z2, &f3), 0);
        assert_eq!(dim_classifying(&z2, &q), 0);
        // S^1 in T^2: r = 1, s = 0, so r + 1 over Z.
        let s1 = subgroup(2, &[vec![0, 1]]);
        assert_eq!(dim_classifying(&s1, &z), 2);
        assert_eq!(dim_classifying(&s1, &q), 1);
    }

    #[test]
    fn classifying_presentations() {
        let zctx = PolynomialRingContext::new(1, make_ring("Z").unwrap());
        // B(Z_2): Z[t]/(2t)
        let m = present_classifying_cohomology(&subgroup(1, &[vec![2]]), &zctx);
        assert_eq!(m.graded_piece(0).unwrap(), FgModule::free(1));
        let p2 = m.graded_piece(2).unwrap();
        assert_eq!(p2.free_rank, 0);
        assert_eq!(p2.torsion, vec![BigUint::from(2u32)]);

        // Full torus: the free module A; degree 4 for n = 2 has rank 3.
        let zctx2 = PolynomialRingContext::new(2, make_ring("Z").unwrap());
        let m = present_classifying_cohomology(&ClosedSubgroup::full_torus(2), &zctx2);
        assert_eq!(m.graded_piece(4).unwrap(), FgModule::free(3));

        // B(Z_2) over F3: degree-2 piece vanishes.
        let f3ctx = PolynomialRingContext::new(1, make_ring("Fp:3").unwrap());
        let m = present_classifying_cohomology(&subgroup(1, &[vec![2]]), &f3ctx);
        assert!(m.graded_piece(2).unwrap().is_zero());
    }

    #[test]
    fn presentation_independence() {
        // Appending integer combinations of rows or left-multiplying by a
        // unimodular matrix leaves the decomposition unchanged.
        let base = subgroup(3, &[vec![2, 0, 4], vec![0, 6, 2]]);
        let d0 = decompose_subgroup(&base);
        let stacked = subgroup(
            3,
            &[
                vec![2, 0, 4],
                vec![0, 6, 2],
                vec![2, 6, 6],
                vec![4, -6, 6],
            ],
        );
        assert_eq!(decompose_subgroup(&stacked), d0);
        let mixed = subgroup(3, &[vec![2, 6, 6], vec![0, 6, 2]]);
        assert_eq!(decompose_subgroup(&mixed), d0);
    }
}
