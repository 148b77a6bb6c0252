//! Exact linear algebra on degreewise slices, dispatched by coefficient ring.
//!
//! Matrices are presented universally with rational entries; the PID
//! backend (Z, Z[1/S]) clears the global unit denominator and works with
//! Smith normal forms, while the field backend (Q, F_p) runs Gaussian
//! elimination. Localized rings reuse the integer path and strip unit
//! primes from every invariant factor.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::lattice::matrix::{smith_normal_form, IntMatrix};
use crate::ring::{mod_inverse, CoefficientRing, FgModule};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SliceError {
    #[error("matrix entry {0} is not an element of {1}")]
    EntryOutsideRing(String, String),
    #[error("submodule generators do not lie in the ambient span")]
    NotInSpan,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense exact matrix with rational entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigRational) -> Self {
        let mut m = RMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        RMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            BigRational::from_integer(m.get(i, j).clone())
        })
    }

    pub fn from_columns(rows: usize, cols: Vec<Vec<BigRational>>) -> Self {
        let mut m = RMatrix::zeros(rows, cols.len());
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn hstack(&self, other: &RMatrix) -> RMatrix {
        assert_eq!(self.rows, other.rows);
        RMatrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn mul(&self, other: &RMatrix) -> RMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = RMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).clone();
                    out.set(i, j, cur + a.clone() * b.clone());
                }
            }
        }
        out
    }

    /// Scale the whole matrix into integers: returns (integer matrix, the
    /// positive common denominator that was cleared).
    pub fn clear_denominators(&self) -> (IntMatrix, BigInt) {
        let mut lcm = BigInt::one();
        for v in &self.data {
            let d = v.denom();
            let g = lcm.gcd(d);
            lcm = &lcm / &g * d;
        }
        let m = IntMatrix::from_fn(self.rows, self.cols, |i, j| {
            let v = self.get(i, j);
            v.numer() * (&lcm / v.denom())
        });
        (m, lcm)
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }
}

impl fmt::Display for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Field backend: generic Gaussian elimination.
// ---------------------------------------------------------------------------

trait FieldCtx {
    type E: Clone + PartialEq + fmt::Debug;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn from_rat(&self, v: &BigRational) -> Self::E;
    fn to_rat(&self, v: &Self::E) -> BigRational;
}

struct QCtx;

impl FieldCtx for QCtx {
    type E = BigRational;
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        BigRational::one() / a
    }
    fn from_rat(&self, v: &BigRational) -> BigRational {
        v.clone()
    }
    fn to_rat(&self, v: &BigRational) -> BigRational {
        v.clone()
    }
}

struct FpCtx {
    p: u64,
}

impl FieldCtx for FpCtx {
    type E = u64;
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.p as u128 - *b as u128) % self.p as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> u64 {
        let big = mod_inverse(&BigInt::from(*a), self.p).expect("nonzero element");
        let (_, digits) = big.to_u64_digits();
        digits.first().copied().unwrap_or(0)
    }
    fn from_rat(&self, v: &BigRational) -> u64 {
        let p_big = BigInt::from(self.p);
        let num = v.numer().mod_floor(&p_big);
        let den = v.denom().mod_floor(&p_big);
        let inv = mod_inverse(&den, self.p).expect("denominator invertible mod p");
        let val = (num * inv).mod_floor(&p_big);
        let (_, digits) = val.to_u64_digits();
        digits.first().copied().unwrap_or(0)
    }
    fn to_rat(&self, v: &u64) -> BigRational {
        BigRational::from_integer(BigInt::from(*v))
    }
}

struct FMat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> FMat<E> {
    fn from_rmatrix<F: FieldCtx<E = E>>(f: &F, m: &RMatrix) -> Self {
        FMat {
            rows: m.rows(),
            cols: m.cols(),
            data: (0..m.rows())
                .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
                .map(|(i, j)| f.from_rat(m.get(i, j)))
                .collect(),
        }
    }

    fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }
}

/// Row-reduce in place; returns pivot (row, col) pairs in order.
fn rref<F: FieldCtx>(f: &F, m: &mut FMat<F::E>) -> Vec<(usize, usize)> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row >= m.rows {
            break;
        }
        // first nonzero entry in this column at or below `row`
        let mut pivot_row = None;
        for i in row..m.rows {
            if !f.is_zero(m.get(i, col)) {
                pivot_row = Some(i);
                break;
            }
        }
        let Some(pr) = pivot_row else { continue };
        // swap rows
        if pr != row {
            for j in 0..m.cols {
                let a = m.get(row, j).clone();
                let b = m.get(pr, j).clone();
                m.set(row, j, b);
                m.set(pr, j, a);
            }
        }
        // normalize pivot row
        let inv = f.inv(m.get(row, col));
        for j in 0..m.cols {
            let v = f.mul(m.get(row, j), &inv);
            m.set(row, j, v);
        }
        // eliminate all other rows
        for i in 0..m.rows {
            if i == row || f.is_zero(m.get(i, col)) {
                continue;
            }
            let factor = m.get(i, col).clone();
            for j in 0..m.cols {
                let delta = f.mul(&factor, m.get(row, j));
                let v = f.sub(m.get(i, j), &delta);
                m.set(i, j, v);
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    pivots
}

fn field_rank<F: FieldCtx>(f: &F, m: &RMatrix) -> usize {
    let mut fm = FMat::from_rmatrix(f, m);
    rref(f, &mut fm).len()
}

/// Kernel basis, columns in ambient coordinates.
fn field_kernel<F: FieldCtx>(f: &F, m: &RMatrix) -> RMatrix {
    let mut fm = FMat::from_rmatrix(f, m);
    let pivots = rref(f, &mut fm);
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free_cols: Vec<usize> = (0..m.cols()).filter(|c| !pivot_cols.contains(c)).collect();
    let mut columns = Vec::new();
    for &fc in &free_cols {
        let mut col = vec![BigRational::zero(); m.cols()];
        col[fc] = BigRational::one();
        for &(pr, pc) in &pivots {
            // x_pc = -sum(free coeffs)
            let v = fm.get(pr, fc).clone();
            col[pc] = -f.to_rat(&v);
        }
        columns.push(col);
    }
    RMatrix::from_columns(m.cols(), columns)
}

/// Indices of a column basis for the column space (pivot columns).
fn field_column_basis<F: FieldCtx>(f: &F, m: &RMatrix) -> Vec<usize> {
    let mut fm = FMat::from_rmatrix(f, m);
    rref(f, &mut fm).into_iter().map(|(_, c)| c).collect()
}

/// Solve m * y = b; None when inconsistent. Free coordinates set to zero.
fn field_solve<F: FieldCtx>(f: &F, m: &RMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    assert_eq!(m.rows(), b.len());
    let aug = m.hstack(&RMatrix::from_columns(m.rows(), vec![b.to_vec()]));
    let mut fm = FMat::from_rmatrix(f, &aug);
    let pivots = rref(f, &mut fm);
    let bcol = m.cols();
    if pivots.iter().any(|&(_, c)| c == bcol) {
        return None;
    }
    let mut y = vec![BigRational::zero(); m.cols()];
    for &(pr, pc) in &pivots {
        y[pc] = f.to_rat(fm.get(pr, bcol));
    }
    Some(y)
}

// ---------------------------------------------------------------------------
// PID backend helpers.
// ---------------------------------------------------------------------------

fn unit_denominator_ok(ring: &CoefficientRing, d: &BigInt) -> bool {
    ring.is_invertible_int(d.magnitude())
}

fn to_int_checked(ring: &CoefficientRing, m: &RMatrix) -> Result<IntMatrix, SliceError> {
    let (im, den) = m.clear_denominators();
    if !den.is_one() && !unit_denominator_ok(ring, &den) {
        return Err(SliceError::EntryOutsideRing(
            format!("denominator {den}"),
            ring.to_string(),
        ));
    }
    Ok(im)
}

/// Invariant factors filtered into ring torsion (unit parts stripped,
/// factors of 1 dropped).
fn torsion_from_factors(ring: &CoefficientRing, factors: &[BigUint]) -> Vec<BigUint> {
    factors
        .iter()
        .map(|f| ring.torsion_core(f))
        .filter(|c| !c.is_one())
        .collect()
}

// ---------------------------------------------------------------------------
// Public facade.
// ---------------------------------------------------------------------------

/// Rank of the matrix over the ring's fraction field (for Z and Z[1/S]
/// this equals the rank of the free part).
pub fn rank(ring: &CoefficientRing, m: &RMatrix) -> Result<usize, SliceError> {
    match ring {
        CoefficientRing::Rationals => Ok(field_rank(&QCtx, m)),
        CoefficientRing::PrimeField(p) => Ok(field_rank(&FpCtx { p: *p }, m)),
        _ => Ok(to_int_checked(ring, m)?.rank()),
    }
}

/// Presentation of coker(m) = R^rows / colspan(m).
pub fn cokernel(ring: &CoefficientRing, m: &RMatrix) -> Result<FgModule, SliceError> {
    match ring {
        CoefficientRing::Rationals | CoefficientRing::PrimeField(_) => {
            let r = rank(ring, m)?;
            Ok(FgModule::free(m.rows() - r))
        }
        _ => {
            let im = to_int_checked(ring, m)?;
            let snf = smith_normal_form(&im);
            Ok(FgModule {
                free_rank: m.rows() - snf.rank(),
                torsion: torsion_from_factors(ring, &snf.invariant_factors),
            })
        }
    }
}

/// Generators (a basis) of the kernel {x : m x = 0}, as columns.
pub fn kernel(ring: &CoefficientRing, m: &RMatrix) -> Result<RMatrix, SliceError> {
    match ring {
        CoefficientRing::Rationals => Ok(field_kernel(&QCtx, m)),
        CoefficientRing::PrimeField(p) => Ok(field_kernel(&FpCtx { p: *p }, m)),
        _ => {
            let im = to_int_checked(ring, m)?;
            Ok(RMatrix::from_int(&im.kernel_basis()))
        }
    }
}

/// Canonical generating columns for the column span (a lattice basis over
/// Z / Z[1/S], pivot columns over a field).
pub fn image_basis(ring: &CoefficientRing, m: &RMatrix) -> Result<RMatrix, SliceError> {
    match ring {
        CoefficientRing::Rationals => {
            let idx = field_column_basis(&QCtx, m);
            Ok(m_columns(m, &idx))
        }
        CoefficientRing::PrimeField(p) => {
            let idx = field_column_basis(&FpCtx { p: *p }, m);
            Ok(m_columns(m, &idx))
        }
        _ => {
            let im = to_int_checked(ring, m)?;
            Ok(RMatrix::from_int(&im.image_basis()))
        }
    }
}

fn m_columns(m: &RMatrix, indices: &[usize]) -> RMatrix {
    RMatrix::from_fn(m.rows(), indices.len(), |i, j| m.get(i, indices[j]).clone())
}

/// Is v contained in the column span of gens over the ring?
pub fn membership(ring: &CoefficientRing, gens: &RMatrix, v: &[BigRational]) -> Result<bool, SliceError> {
    match ring {
        CoefficientRing::Rationals => Ok(field_solve(&QCtx, gens, v).is_some()),
        CoefficientRing::PrimeField(p) => Ok(field_solve(&FpCtx { p: *p }, gens, v).is_some()),
        _ => {
            let aug = gens.hstack(&RMatrix::from_columns(gens.rows(), vec![v.to_vec()]));
            let im = to_int_checked(ring, &aug)?;
            let g = im.columns_subset(&(0..gens.cols()).collect::<Vec<_>>());
            let b = im.column(gens.cols());
            match g.solve_rational(&b) {
                None => Ok(false),
                Some((_, den)) => Ok(unit_denominator_ok(ring, &den)),
            }
        }
    }
}

/// Coordinates expressing v in the columns of gens, if any.
pub fn solve_coords(
    ring: &CoefficientRing,
    gens: &RMatrix,
    v: &[BigRational],
) -> Result<Option<Vec<BigRational>>, SliceError> {
    match ring {
        CoefficientRing::Rationals => Ok(field_solve(&QCtx, gens, v)),
        CoefficientRing::PrimeField(p) => Ok(field_solve(&FpCtx { p: *p }, gens, v)),
        _ => {
            let aug = gens.hstack(&RMatrix::from_columns(gens.rows(), vec![v.to_vec()]));
            let im = to_int_checked(ring, &aug)?;
            let g = im.columns_subset(&(0..gens.cols()).collect::<Vec<_>>());
            let b = im.column(gens.cols());
            match g.solve_rational(&b) {
                None => Ok(None),
                Some((y, den)) => {
                    if !unit_denominator_ok(ring, &den) {
                        Ok(None)
                    } else {
                        Ok(Some(
                            y.into_iter()
                                .map(|n| BigRational::new(n, den.clone()))
                                .collect(),
                        ))
                    }
                }
            }
        }
    }
}

/// Do two generating sets span the same submodule of R^rows?
pub fn span_eq(ring: &CoefficientRing, a: &RMatrix, b: &RMatrix) -> Result<bool, SliceError> {
    assert_eq!(a.rows(), b.rows());
    for j in 0..b.cols() {
        if !membership(ring, a, &b.column(j))? {
            return Ok(false);
        }
    }
    for j in 0..a.cols() {
        if !membership(ring, b, &a.column(j))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Generators of the preimage kernel {x : l x lies in colspan(target_rels)},
/// canonicalized. `target_rels` has the same row count as l.
pub fn preimage_kernel(
    ring: &CoefficientRing,
    l: &RMatrix,
    target_rels: &RMatrix,
) -> Result<RMatrix, SliceError> {
    let stacked = l.hstack(target_rels);
    let k = kernel(ring, &stacked)?;
    // project to the x block
    let proj = RMatrix::from_fn(l.cols(), k.cols(), |i, j| k.get(i, j).clone());
    image_basis(ring, &proj)
}

/// Presentation of span(g)/span(w) where span(w) is contained in span(g).
pub fn subquotient(
    ring: &CoefficientRing,
    g: &RMatrix,
    w: &RMatrix,
) -> Result<FgModule, SliceError> {
    assert_eq!(g.rows(), w.rows());
    let basis = image_basis(ring, g)?;
    if basis.cols() == 0 {
        if w.cols() > 0 && !w.is_zero() {
            return Err(SliceError::NotInSpan);
        }
        return Ok(FgModule::zero());
    }
    // Express every generator of W in the basis of G.
    let mut coord_cols = Vec::new();
    for j in 0..w.cols() {
        match solve_coords(ring, &basis, &w.column(j))? {
            Some(c) => coord_cols.push(c),
            None => return Err(SliceError::NotInSpan),
        }
    }
    let coords = RMatrix::from_columns(basis.cols(), coord_cols);
    match ring {
        CoefficientRing::Rationals | CoefficientRing::PrimeField(_) => {
            let r = rank(ring, &coords)?;
            Ok(FgModule::free(basis.cols() - r))
        }
        _ => {
            // Unit-scale each coordinate column to integers, then SNF.
            let int_coords = scale_columns_to_int(ring, &coords)?;
            let snf = smith_normal_form(&int_coords);
            Ok(FgModule {
                free_rank: basis.cols() - snf.rank(),
                torsion: torsion_from_factors(ring, &snf.invariant_factors),
            })
        }
    }
}

/// Scale each column by a positive ring unit so entries become integers.
fn scale_columns_to_int(ring: &CoefficientRing, m: &RMatrix) -> Result<IntMatrix, SliceError> {
    let mut out = IntMatrix::zeros(m.rows(), m.cols());
    for j in 0..m.cols() {
        let mut lcm = BigInt::one();
        for i in 0..m.rows() {
            let d = m.get(i, j).denom();
            let g = lcm.gcd(d);
            lcm = &lcm / &g * d;
        }
        if !lcm.is_one() && !unit_denominator_ok(ring, &lcm) {
            return Err(SliceError::EntryOutsideRing(
                format!("denominator {lcm}"),
                ring.to_string(),
            ));
        }
        for i in 0..m.rows() {
            let v = m.get(i, j);
            out.set(i, j, v.numer() * (&lcm / v.denom()));
        }
    }
    Ok(out)
}

/// A minimal generator of a cokernel, with its lift into the ambient module.
#[derive(Debug, Clone)]
pub struct CokerGenerator {
    pub lift: Vec<BigRational>,
    /// None for a free generator; Some(order) for a torsion generator.
    pub order: Option<BigUint>,
}

/// Structure and minimal generating lifts of coker(m) = R^rows / colspan(m).
pub fn minimal_cogenerators(
    ring: &CoefficientRing,
    m: &RMatrix,
) -> Result<(FgModule, Vec<CokerGenerator>), SliceError> {
    match ring {
        CoefficientRing::Rationals | CoefficientRing::PrimeField(_) => {
            // Pivot columns of the rref of m^T are the coordinates spanned by
            // the column space; complement coordinates lift a quotient basis.
            let transposed = RMatrix::from_fn(m.cols(), m.rows(), |i, j| m.get(j, i).clone());
            let pivot_coords: Vec<usize> = match ring {
                CoefficientRing::Rationals => field_column_basis(&QCtx, &transposed),
                CoefficientRing::PrimeField(p) => field_column_basis(&FpCtx { p: *p }, &transposed),
                _ => unreachable!(),
            };
            let mut gens = Vec::new();
            for i in 0..m.rows() {
                if !pivot_coords.contains(&i) {
                    let mut lift = vec![BigRational::zero(); m.rows()];
                    lift[i] = BigRational::one();
                    gens.push(CokerGenerator { lift, order: None });
                }
            }
            Ok((FgModule::free(gens.len()), gens))
        }
        _ => {
            let im = to_int_checked(ring, m)?;
            let snf = smith_normal_form(&im);
            let r = snf.rank();
            let mut gens = Vec::new();
            let mut torsion = Vec::new();
            for i in 0..r {
                let core = ring.torsion_core(&snf.invariant_factors[i]);
                if core.is_one() {
                    continue;
                }
                let lift: Vec<BigRational> = (0..m.rows())
                    .map(|row| BigRational::from_integer(snf.u_inv.get(row, i).clone()))
                    .collect();
                torsion.push(core.clone());
                gens.push(CokerGenerator {
                    lift,
                    order: Some(core),
                });
            }
            let mut free_rank = 0;
            for i in r..m.rows() {
                let lift: Vec<BigRational> = (0..m.rows())
                    .map(|row| BigRational::from_integer(snf.u_inv.get(row, i).clone()))
                    .collect();
                free_rank += 1;
                gens.push(CokerGenerator { lift, order: None });
            }
            Ok((FgModule { free_rank, torsion }, gens))
        }
    }
}

/// One degreewise homology computation: ker(l_out)/im(l_in + rels) inside a
/// term presented as coker(rels). `l_in` and `rels` have this term's free
/// rank as row count; `l_out` maps it into the next term's free slice,
/// whose relation slice is `next_rels`.
pub fn homology_slice(
    ring: &CoefficientRing,
    l_in: &RMatrix,
    rels: &RMatrix,
    l_out: &RMatrix,
    next_rels: &RMatrix,
) -> Result<(FgModule, RMatrix, RMatrix), SliceError> {
    let cycles = preimage_kernel(ring, l_out, next_rels)?;
    let boundaries = l_in.hstack(rels);
    let h = subquotient(ring, &cycles, &boundaries)?;
    Ok((h, cycles, boundaries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::make_ring;

    fn rm(rows: &[Vec<i64>]) -> RMatrix {
        RMatrix::from_fn(rows.len(), rows.first().map(|r| r.len()).unwrap_or(0), |i, j| {
            BigRational::from_integer(BigInt::from(rows[i][j]))
        })
    }

    #[test]
    fn cokernel_over_rings() {
        let m = rm(&[vec![2, 0], vec![0, 3]]);
        let z = make_ring("Z").unwrap();
        let c = cokernel(&z, &m).unwrap();
        assert_eq!(c.free_rank, 0);
        // invariant-factor form: Z/2 + Z/3 = Z/6
        assert_eq!(c.torsion, vec![BigUint::from(6u32)]);
        // localize away 2: only 3-torsion remains
        let z2 = make_ring("Z[1/2]").unwrap();
        let c = cokernel(&z2, &m).unwrap();
        assert_eq!(c.torsion, vec![BigUint::from(3u32)]);
        // fields kill everything
        let q = make_ring("Q").unwrap();
        assert!(cokernel(&q, &m).unwrap().is_zero());
        let f2 = make_ring("Fp:2").unwrap();
        let c = cokernel(&f2, &m).unwrap();
        // over F2 the matrix is [[0,0],[0,1]]: rank 1, coker free of rank 1
        assert_eq!(c.free_rank, 1);
    }

    #[test]
    fn kernel_mod_p_differs_from_integer_kernel() {
        let m = rm(&[vec![2]]);
        let z = make_ring("Z").unwrap();
        let f2 = make_ring("Fp:2").unwrap();
        assert_eq!(kernel(&z, &m).unwrap().cols(), 0);
        assert_eq!(kernel(&f2, &m).unwrap().cols(), 1);
    }

    #[test]
    fn membership_respects_localization() {
        let gens = rm(&[vec![2], vec![2]]);
        let v = vec![
            BigRational::from_integer(BigInt::from(1)),
            BigRational::from_integer(BigInt::from(1)),
        ];
        let z = make_ring("Z").unwrap();
        let z2 = make_ring("Z[1/2]").unwrap();
        assert!(!membership(&z, &gens, &v).unwrap());
        assert!(membership(&z2, &gens, &v).unwrap());
    }

    #[test]
    fn subquotient_torsion() {
        // G = Z^2 (identity), W = 2e1 + columns: H = Z/2 + Z
        let g = rm(&[vec![1, 0], vec![0, 1]]);
        let w = rm(&[vec![2], vec![0]]);
        let z = make_ring("Z").unwrap();
        let h = subquotient(&z, &g, &w).unwrap();
        assert_eq!(h.free_rank, 1);
        assert_eq!(h.torsion, vec![BigUint::from(2u32)]);
    }

    #[test]
    fn preimage_kernel_through_relations() {
        // l = [1], target relations span 2Z: preimage is 2Z
        let l = rm(&[vec![1]]);
        let rels = rm(&[vec![2]]);
        let z = make_ring("Z").unwrap();
        let pk = preimage_kernel(&z, &l, &rels).unwrap();
        assert_eq!(pk.cols(), 1);
        assert_eq!(
            *pk.get(0, 0),
            BigRational::from_integer(BigInt::from(2))
        );
    }

    #[test]
    fn minimal_cogenerators_structure() {
        // coker of diag(1, 2, 0-row): Z/2 + Z
        let m = rm(&[vec![1, 0], vec![0, 2], vec![0, 0]]);
        let z = make_ring("Z").unwrap();
        let (fg, gens) = minimal_cogenerators(&z, &m).unwrap();
        assert_eq!(fg.free_rank, 1);
        assert_eq!(fg.torsion, vec![BigUint::from(2u32)]);
        assert_eq!(gens.len(), 2);
    }
}
