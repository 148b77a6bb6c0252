//! Dense integer matrices with arbitrary-precision entries, and the Smith
//! normal form with full transform tracking (U, V and their inverses).

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

/// Rectangular matrix over Z, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        IntMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigInt) -> Self {
        let mut m = IntMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
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

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
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
                    out.set(i, j, cur + a * b);
                }
            }
        }
        out
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        IntMatrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns_subset(&self, indices: &[usize]) -> IntMatrix {
        IntMatrix::from_fn(self.rows, indices.len(), |i, j| {
            self.get(i, indices[j]).clone()
        })
    }

    pub fn from_columns(rows: usize, cols: Vec<Vec<BigInt>>) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows, cols.len());
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[i] += q * row[k]
    fn add_row_multiple(&mut self, i: usize, k: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let add = q * self.get(k, j);
            if !add.is_zero() {
                let v = self.get(i, j).clone();
                self.set(i, j, v + add);
            }
        }
    }

    /// col[j] += q * col[k]
    fn add_col_multiple(&mut self, j: usize, k: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let add = q * self.get(i, k);
            if !add.is_zero() {
                let v = self.get(i, j).clone();
                self.set(i, j, v + add);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }
}

impl fmt::Display for IntMatrix {
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

/// Smith normal form U * A * V = D with U, V unimodular and D diagonal
/// with nonnegative entries forming a divisor chain.
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    pub invariant_factors: Vec<BigUint>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }
}

/// Deterministic Smith normal form over Z.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let rows = a.rows();
    let cols = a.cols();
    let mut d = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    // Elementary operations applied coherently to (d, u, u_inv) or (d, v, v_inv).
    macro_rules! row_swap {
        ($i:expr, $k:expr) => {{
            d.swap_rows($i, $k);
            u.swap_rows($i, $k);
            u_inv.swap_cols($i, $k);
        }};
    }
    macro_rules! row_add {
        ($i:expr, $k:expr, $q:expr) => {{
            let q = $q;
            d.add_row_multiple($i, $k, &q);
            u.add_row_multiple($i, $k, &q);
            u_inv.add_col_multiple($k, $i, &(-q));
        }};
    }
    macro_rules! row_neg {
        ($i:expr) => {{
            d.negate_row($i);
            u.negate_row($i);
            u_inv.negate_col($i);
        }};
    }
    macro_rules! col_swap {
        ($j:expr, $k:expr) => {{
            d.swap_cols($j, $k);
            v.swap_cols($j, $k);
            v_inv.swap_rows($j, $k);
        }};
    }
    macro_rules! col_add {
        ($j:expr, $k:expr, $q:expr) => {{
            let q = $q;
            d.add_col_multiple($j, $k, &q);
            v.add_col_multiple($j, $k, &q);
            v_inv.add_row_multiple($k, $j, &(-q));
        }};
    }

    let limit = rows.min(cols);
    for k in 0..limit {
        // Locate a pivot: nonzero entry of minimal absolute value in the
        // trailing block, smallest (row, col) on ties.
        let find_pivot = |d: &IntMatrix| -> Option<(usize, usize)> {
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    let val = d.get(i, j);
                    if val.is_zero() {
                        continue;
                    }
                    match best {
                        None => best = Some((i, j)),
                        Some((bi, bj)) => {
                            if val.abs() < d.get(bi, bj).abs() {
                                best = Some((i, j));
                            }
                        }
                    }
                }
            }
            best
        };

        if find_pivot(&d).is_none() {
            break;
        }

        loop {
            let (pi, pj) = find_pivot(&d).expect("pivot exists");
            row_swap!(k, pi);
            col_swap!(k, pj);
            if d.get(k, k).is_negative() {
                row_neg!(k);
            }

            // Reduce column k below the pivot.
            let mut dirty = false;
            for i in k + 1..rows {
                if !d.get(i, k).is_zero() {
                    let q = -(d.get(i, k) / d.get(k, k));
                    row_add!(i, k, q);
                    if !d.get(i, k).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Reduce row k to the right of the pivot.
            for j in k + 1..cols {
                if !d.get(k, j).is_zero() {
                    let q = -(d.get(k, j) / d.get(k, k));
                    col_add!(j, k, q);
                    if !d.get(k, j).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Divisibility fix: the pivot must divide the trailing block.
            let pivot = d.get(k, k).clone();
            let mut offender = None;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(d.get(i, j) % &pivot).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    row_add!(k, i, BigInt::one());
                }
                None => break,
            }
        }
    }

    let mut invariant_factors = Vec::new();
    for k in 0..limit {
        let val = d.get(k, k);
        if val.is_zero() {
            break;
        }
        invariant_factors.push(val.magnitude().clone());
    }

    SnfResult {
        u,
        d,
        v,
        u_inv,
        v_inv,
        invariant_factors,
    }
}

impl IntMatrix {
    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank()
    }

    /// Basis of the kernel lattice {x : A x = 0}, as matrix columns.
    /// The kernel of an integer matrix is a saturated sublattice, so the
    /// returned columns are a genuine basis.
    pub fn kernel_basis(&self) -> IntMatrix {
        let snf = smith_normal_form(self);
        let r = snf.rank();
        let indices: Vec<usize> = (r..self.cols).collect();
        snf.v.columns_subset(&indices)
    }

    /// Basis of the image lattice {A x}, as matrix columns with the first
    /// nonzero entry of each column positive.
    pub fn image_basis(&self) -> IntMatrix {
        let snf = smith_normal_form(self);
        let r = snf.rank();
        let mut out = IntMatrix::from_fn(self.rows, r, |i, j| {
            snf.u_inv.get(i, j) * BigInt::from(snf.invariant_factors[j].clone())
        });
        for j in 0..r {
            let flip = (0..self.rows)
                .map(|i| out.get(i, j))
                .find(|v| !v.is_zero())
                .map(|v| v.is_negative())
                .unwrap_or(false);
            if flip {
                out.negate_col(j);
            }
        }
        out
    }

    /// Integer solutions Y of self * Y = B, or None when no integral
    /// solution exists. The particular solution with zero free part.
    pub fn solve(&self, b: &IntMatrix) -> Option<IntMatrix> {
        assert_eq!(self.rows, b.rows());
        let snf = smith_normal_form(self);
        let r = snf.rank();
        let ub = snf.u.mul(b);
        let mut z = IntMatrix::zeros(self.cols, b.cols());
        for j in 0..b.cols() {
            for i in 0..self.rows {
                let val = ub.get(i, j);
                if i < r {
                    let di = snf.d.get(i, i);
                    if !(val % di).is_zero() {
                        return None;
                    }
                    z.set(i, j, val / di);
                } else if !val.is_zero() {
                    return None;
                }
            }
        }
        Some(snf.v.mul(&z))
    }

    /// Canonical basis of the row lattice: Hermite normal form rows with
    /// positive pivots and entries above each pivot reduced to [0, pivot).
    pub fn row_hnf(&self) -> IntMatrix {
        let mut rows: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut r = 0usize;
        for col in 0..self.cols {
            loop {
                // smallest nonzero |entry| in this column at or below r
                let mut pivot: Option<usize> = None;
                for i in r..rows.len() {
                    if rows[i][col].is_zero() {
                        continue;
                    }
                    match pivot {
                        None => pivot = Some(i),
                        Some(p) => {
                            if rows[i][col].abs() < rows[p][col].abs() {
                                pivot = Some(i);
                            }
                        }
                    }
                }
                let Some(p) = pivot else { break };
                rows.swap(r, p);
                let mut done = true;
                for i in r + 1..rows.len() {
                    if !rows[i][col].is_zero() {
                        let q = &rows[i][col] / &rows[r][col];
                        for j in 0..self.cols {
                            let sub = &q * &rows[r][j];
                            rows[i][j] = &rows[i][j] - sub;
                        }
                        if !rows[i][col].is_zero() {
                            done = false;
                        }
                    }
                }
                if done {
                    if rows[r][col].is_negative() {
                        for j in 0..self.cols {
                            rows[r][j] = -rows[r][j].clone();
                        }
                    }
                    // reduce entries above the pivot into [0, pivot)
                    for i in 0..r {
                        let q = num_integer::Integer::div_floor(&rows[i][col], &rows[r][col]);
                        if !q.is_zero() {
                            for j in 0..self.cols {
                                let sub = &q * &rows[r][j];
                                rows[i][j] = &rows[i][j] - sub;
                            }
                        }
                    }
                    r += 1;
                    break;
                }
            }
            if r == rows.len() {
                break;
            }
        }
        IntMatrix::from_rows(rows.into_iter().take(r).collect())
    }

    /// Rational solution of self * y = b (single column), as numerators over
    /// a common positive denominator. None when no rational solution exists.
    pub fn solve_rational(&self, b: &[BigInt]) -> Option<(Vec<BigInt>, BigInt)> {
        assert_eq!(self.rows, b.len());
        let snf = smith_normal_form(self);
        let r = snf.rank();
        let bm = IntMatrix::from_columns(self.rows, vec![b.to_vec()]);
        let ub = snf.u.mul(&bm);
        // denominator = lcm of the needed d_i
        let mut denom = BigInt::one();
        for i in 0..r {
            if !ub.get(i, 0).is_zero() {
                let di = snf.d.get(i, i);
                let g = num_integer::Integer::gcd(&denom, di);
                denom = &denom / &g * di;
            }
        }
        for i in r..self.rows {
            if !ub.get(i, 0).is_zero() {
                return None;
            }
        }
        let mut z = IntMatrix::zeros(self.cols, 1);
        for i in 0..r {
            let di = snf.d.get(i, i);
            // z_i = denom * ub_i / d_i, exact by construction of denom
            let numer = &denom * ub.get(i, 0);
            debug_assert!((&numer % di).is_zero());
            z.set(i, 0, numer / di);
        }
        let y = snf.v.mul(&z);
        // reduce the common fraction
        let mut y = y.column(0);
        let mut g = denom.clone();
        for v in &y {
            g = num_integer::Integer::gcd(&g, v);
            if g.is_one() {
                break;
            }
        }
        if !g.is_one() && !g.is_zero() {
            for v in &mut y {
                *v = &*v / &g;
            }
            denom /= &g;
        }
        Some((y, denom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    fn check_snf(a: &IntMatrix) {
        let snf = smith_normal_form(a);
        // U * A * V = D
        assert_eq!(snf.u.mul(a).mul(&snf.v), snf.d);
        // inverses
        assert_eq!(snf.u.mul(&snf.u_inv), IntMatrix::identity(a.rows()));
        assert_eq!(snf.v.mul(&snf.v_inv), IntMatrix::identity(a.cols()));
        // diagonal, nonnegative, divisor chain
        for i in 0..snf.d.rows() {
            for j in 0..snf.d.cols() {
                if i != j {
                    assert!(snf.d.get(i, j).is_zero());
                }
            }
        }
        for w in snf.invariant_factors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "not a divisor chain");
        }
    }

    #[test]
    fn snf_examples() {
        let a = m(&[vec![2, 0], vec![0, 2]]);
        let snf = smith_normal_form(&a);
        assert_eq!(
            snf.invariant_factors,
            vec![BigUint::from(2u32), BigUint::from(2u32)]
        );
        check_snf(&a);

        let a = m(&[vec![1, 0]]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.invariant_factors, vec![BigUint::from(1u32)]);
        check_snf(&a);

        // Hand elimination: det = -4, entry gcd 2, so factors (2, 2).
        let a = m(&[vec![4, 6], vec![2, 2]]);
        let snf = smith_normal_form(&a);
        assert_eq!(
            snf.invariant_factors,
            vec![BigUint::from(2u32), BigUint::from(2u32)]
        );
        check_snf(&a);
    }

    #[test]
    fn snf_rectangular_and_zero() {
        check_snf(&m(&[vec![0, 0], vec![0, 0]]));
        check_snf(&m(&[vec![6, 10, 15]]));
        check_snf(&m(&[vec![2], vec![4], vec![6]]));
        let a = m(&[vec![-6, 111, -36, 6], vec![5, -672, 210, 74], vec![0, -255, 81, 24], vec![-7, 255, -81, -10]]);
        let snf = smith_normal_form(&a);
        assert_eq!(
            snf.invariant_factors,
            vec![
                BigUint::from(1u32),
                BigUint::from(3u32),
                BigUint::from(21u32)
            ]
        );
        check_snf(&a);
    }

    #[test]
    fn kernel_and_image() {
        let a = m(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = a.kernel_basis();
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        let im = a.image_basis();
        assert_eq!(im.cols(), 1);
        // image of [[2,0],[0,3]] is 2Z x 3Z
        let b = m(&[vec![2, 0], vec![0, 3]]);
        let im = b.image_basis();
        assert_eq!(im.cols(), 2);
    }

    #[test]
    fn solve_exact() {
        let a = m(&[vec![2, 0], vec![0, 3]]);
        let b = m(&[vec![4], vec![9]]);
        let y = a.solve(&b).unwrap();
        assert_eq!(a.mul(&y), b);
        let b_bad = m(&[vec![1], vec![1]]);
        assert!(a.solve(&b_bad).is_none());
        let (y, den) = a.solve_rational(&[BigInt::from(1), BigInt::from(1)]).unwrap();
        // y / den solves: a * y = den * b
        let ym = IntMatrix::from_columns(2, vec![y]);
        let lhs = a.mul(&ym);
        assert_eq!(*lhs.get(0, 0), den.clone());
        assert_eq!(*lhs.get(1, 0), den);
    }
}
