//! Complete simplicial fans: validation, orbit strata, the Stanley-Reisner
//! slice realization of equivariant cohomology, restriction to fixed
//! points, the derived moment graph, and the closed-form relative terms
//! with their signed incidence differentials.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gkm::{GkmEdge, GkmModel};
use super::SpaceError;
use crate::grmod::discover::SliceRealization;
use crate::grmod::GradedModule;
use crate::lattice::{smith_normal_form, ClosedSubgroup, IntMatrix, StratumDescriptor};
use crate::poly::{Monomial, Polynomial};
use crate::ring::{CoefficientRing, PolynomialRingContext};
use crate::slices::RMatrix;

/// A simplicial fan given by primitive rays and its maximal cones.
/// Faces are implied (every subset of a simplicial cone is a face).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanModel {
    pub torus_rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl FanModel {
    pub fn new(
        torus_rank: usize,
        rays: Vec<Vec<i64>>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Self, SpaceError> {
        let mut cones: Vec<Vec<usize>> = max_cones;
        for c in &mut cones {
            c.sort_unstable();
            c.dedup();
        }
        // canonical cone order keeps term summands, incidence data and the
        // derived moment graph aligned
        cones.sort();
        cones.dedup();
        let fan = FanModel {
            torus_rank,
            rays,
            max_cones: cones,
        };
        fan.validate()?;
        Ok(fan)
    }

    pub fn validate(&self) -> Result<(), SpaceError> {
        let n = self.torus_rank;
        if n == 0 {
            return Err(SpaceError::InvalidModel("torus rank must be positive".into()));
        }
        let mut seen = BTreeSet::new();
        for (i, ray) in self.rays.iter().enumerate() {
            if ray.len() != n {
                return Err(SpaceError::InvalidModel(format!(
                    "ray {i} has {} coordinates, expected {n}",
                    ray.len()
                )));
            }
            if ray.iter().all(|&v| v == 0) {
                return Err(SpaceError::InvalidModel(format!("ray {i} is zero")));
            }
            let g = ray.iter().fold(0i64, |acc, &v| gcd_i64(acc, v.abs()));
            if g != 1 {
                return Err(SpaceError::InvalidModel(format!(
                    "ray {i} is not primitive (content {g})"
                )));
            }
            if !seen.insert(ray.clone()) {
                return Err(SpaceError::InvalidModel(format!("ray {i} repeats")));
            }
        }
        for cone in &self.max_cones {
            for &r in cone {
                if r >= self.rays.len() {
                    return Err(SpaceError::InvalidModel(format!(
                        "cone references missing ray {r}"
                    )));
                }
            }
            let m = self.ray_matrix(cone);
            if m.rank() != cone.len() {
                return Err(SpaceError::InvalidModel(format!(
                    "cone {cone:?} is not simplicial (dependent rays)"
                )));
            }
        }
        Ok(())
    }

    fn ray_matrix(&self, cone: &[usize]) -> IntMatrix {
        if cone.is_empty() {
            return IntMatrix::zeros(0, self.torus_rank);
        }
        IntMatrix::from_i64_rows(
            &cone
                .iter()
                .map(|&r| self.rays[r].clone())
                .collect::<Vec<_>>(),
        )
    }

    pub fn maximal_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// All faces of all cones, the empty cone included, sorted by
    /// (dimension, ray list).
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        out.insert(Vec::new());
        for cone in &self.max_cones {
            for mask in 1u32..(1 << cone.len()) {
                let face: Vec<usize> = cone
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &r)| r)
                    .collect();
                out.insert(face);
            }
        }
        let mut faces: Vec<Vec<usize>> = out.into_iter().collect();
        faces.sort_by_key(|f| (f.len(), f.clone()));
        faces
    }

    pub fn faces_of_dim(&self, dim: usize) -> Vec<Vec<usize>> {
        self.faces().into_iter().filter(|f| f.len() == dim).collect()
    }

    /// Multiplicity of a cone: the product of the invariant factors of its
    /// ray matrix (1 exactly for smooth cones).
    pub fn multiplicity(&self, cone: &[usize]) -> BigInt {
        let snf = smith_normal_form(&self.ray_matrix(cone));
        let mut m = BigInt::one();
        for f in &snf.invariant_factors {
            m *= BigInt::from(f.clone());
        }
        m
    }

    pub fn is_smooth(&self) -> bool {
        self.max_cones
            .iter()
            .all(|c| self.multiplicity(c).is_one())
    }

    /// Completeness for a simplicial fan: all maximal cones have full
    /// dimension, every ridge lies in exactly two maximal cones, and the
    /// dual graph is connected.
    pub fn is_complete(&self) -> bool {
        let n = self.torus_rank;
        if self.max_cones.is_empty() || self.max_cones.iter().any(|c| c.len() != n) {
            return false;
        }
        let mut ridge_count: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for k in 0..cone.len() {
                let mut ridge = cone.clone();
                ridge.remove(k);
                ridge_count.entry(ridge).or_default().push(ci);
            }
        }
        if ridge_count.values().any(|v| v.len() != 2) {
            return false;
        }
        // dual graph connectivity
        let m = self.max_cones.len();
        let mut adj = vec![Vec::new(); m];
        for cones in ridge_count.values() {
            adj[cones[0]].push(cones[1]);
            adj[cones[1]].push(cones[0]);
        }
        let mut visited = vec![false; m];
        let mut stack = vec![0];
        visited[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    stack.push(w);
                }
            }
        }
        visited.iter().all(|&v| v)
    }

    /// Stabilizer of the orbit of a cone: the subtorus cut out by a basis
    /// of the characters vanishing on the cone (computed from the Smith
    /// normal form of the ray matrix).
    pub fn cone_isotropy(&self, cone: &[usize]) -> ClosedSubgroup {
        let rays = self.ray_matrix(cone);
        let kernel = rays.kernel_basis();
        // rows of the character matrix = kernel columns, sign-normalized
        let mut rows = Vec::new();
        for j in 0..kernel.cols() {
            let mut row: Vec<BigInt> = (0..kernel.rows()).map(|i| kernel.get(i, j).clone()).collect();
            if row.iter().find(|v| !v.is_zero()).map(|v| v.is_negative()).unwrap_or(false) {
                for v in &mut row {
                    *v = -v.clone();
                }
            }
            rows.push(row);
        }
        ClosedSubgroup::new(self.torus_rank, IntMatrix::from_rows(rows))
            .expect("kernel basis has n columns")
    }

    pub fn cone_name(cone: &[usize]) -> String {
        let parts: Vec<String> = cone.iter().map(|r| r.to_string()).collect();
        format!("cone[{}]", parts.join(","))
    }

    pub fn strata(&self) -> Result<Vec<StratumDescriptor>, SpaceError> {
        let mut out = Vec::new();
        for face in self.faces() {
            let iso = self.cone_isotropy(&face);
            out.push(StratumDescriptor::new(
                Self::cone_name(&face),
                iso,
                self.torus_rank - face.len(),
            )?);
        }
        Ok(out)
    }

    /// The one-skeleton as a moment graph: vertices are the maximal cones,
    /// edges the ridges, labelled by the primitive character vanishing on
    /// the ridge.
    pub fn derived_moment_graph(&self) -> Result<GkmModel, SpaceError> {
        let n = self.torus_rank;
        if !self.is_complete() {
            return Err(SpaceError::UnsupportedModelRing(
                "moment graph derivation needs a complete fan".into(),
            ));
        }
        let mut ridge_map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for k in 0..cone.len() {
                let mut ridge = cone.clone();
                ridge.remove(k);
                ridge_map.entry(ridge).or_default().push(ci);
            }
        }
        let vertices: Vec<String> = self.max_cones.iter().map(|c| Self::cone_name(c)).collect();
        let mut edges = Vec::new();
        for (ridge, cones) in ridge_map {
            let rays = self.ray_matrix(&ridge);
            let kernel = rays.kernel_basis();
            assert_eq!(kernel.cols(), 1, "ridge has corank one");
            let mut label: Vec<i64> = (0..n)
                .map(|i| super::bigint_to_i64(kernel.get(i, 0)))
                .collect();
            if label.iter().find(|v| **v != 0).map(|v| *v < 0).unwrap_or(false) {
                for v in &mut label {
                    *v = -*v;
                }
            }
            edges.push(GkmEdge {
                v: cones[0],
                w: cones[1],
                label,
            });
        }
        GkmModel::new(n, vertices, edges)
    }

    /// Monomials in the ray variables whose support spans a face.
    pub fn face_monomials(&self, x_degree: u32) -> Vec<Monomial> {
        let faces: BTreeSet<Vec<usize>> = self.faces().into_iter().collect();
        Monomial::of_degree(self.rays.len(), 2 * x_degree as i64)
            .into_iter()
            .filter(|m| {
                let support: Vec<usize> = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, _)| i)
                    .collect();
                faces.contains(&support)
            })
            .collect()
    }

    /// The Stanley-Reisner slice realization of equivariant cohomology:
    /// basis = face monomials per degree, action of t_a = multiplication
    /// by the characteristic linear form sum_rho <e_a, v_rho> x_rho.
    pub fn sr_realization(
        &self,
        ring: &CoefficientRing,
        max_degree: i64,
    ) -> Result<SliceRealization, SpaceError> {
        let n = self.torus_rank;
        let ctx = PolynomialRingContext::new(n, ring.clone());
        let mut basis_by_degree: Vec<Vec<Monomial>> = Vec::new();
        let mut index_by_degree: Vec<BTreeMap<Monomial, usize>> = Vec::new();
        for d in 0..=max_degree {
            let ms = if d % 2 == 0 {
                self.face_monomials((d / 2) as u32)
            } else {
                Vec::new()
            };
            let index = ms
                .iter()
                .cloned()
                .enumerate()
                .map(|(k, m)| (m, k))
                .collect();
            basis_by_degree.push(ms);
            index_by_degree.push(index);
        }
        let dims: Vec<usize> = basis_by_degree.iter().map(|b| b.len()).collect();
        let mut real = SliceRealization::new(ctx, max_degree, dims);
        let faces: BTreeSet<Vec<usize>> = self.faces().into_iter().collect();
        for a in 0..n {
            for d in 0..=max_degree - 2 {
                let src = &basis_by_degree[d as usize];
                let tgt_index = &index_by_degree[(d + 2) as usize];
                let mut cols = Vec::with_capacity(src.len());
                for m in src {
                    let mut col =
                        vec![BigRational::zero(); basis_by_degree[(d + 2) as usize].len()];
                    for (rho, ray) in self.rays.iter().enumerate() {
                        let coeff = ray[a];
                        if coeff == 0 {
                            continue;
                        }
                        let mut shifted = m.clone();
                        shifted.0[rho] += 1;
                        let support: Vec<usize> = shifted
                            .0
                            .iter()
                            .enumerate()
                            .filter(|(_, &e)| e > 0)
                            .map(|(i, _)| i)
                            .collect();
                        if !faces.contains(&support) {
                            continue;
                        }
                        let row = *tgt_index.get(&shifted).expect("face monomial indexed");
                        col[row] = col[row].clone()
                            + BigRational::from_integer(BigInt::from(coeff));
                    }
                    cols.push(col);
                }
                real.set_action(
                    a,
                    d,
                    RMatrix::from_columns(basis_by_degree[(d + 2) as usize].len(), cols),
                );
            }
        }
        Ok(real)
    }

    /// Rational dual basis of a maximal cone: row j pairs to 1 with ray j
    /// of the cone and to 0 with the others.
    fn dual_basis(&self, cone: &[usize]) -> Result<Vec<Vec<BigRational>>, SpaceError> {
        let rays = self.ray_matrix(cone);
        let mut duals = Vec::new();
        for j in 0..cone.len() {
            let e: Vec<BigInt> = (0..cone.len())
                .map(|i| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect();
            let (y, den) = rays
                .solve_rational(&e)
                .ok_or_else(|| SpaceError::InvalidModel("degenerate maximal cone".into()))?;
            duals.push(
                y.into_iter()
                    .map(|v| BigRational::new(v, den.clone()))
                    .collect(),
            );
        }
        Ok(duals)
    }

    /// Restriction of a face-monomial slice vector to a maximal cone, as a
    /// polynomial in the torus characters. Monomials supported outside the
    /// cone restrict to zero; ray variables inside restrict to the dual
    /// basis forms.
    pub fn restrict_to_cone(
        &self,
        cone: &[usize],
        degree: i64,
        vector: &[BigRational],
        ring: &CoefficientRing,
    ) -> Result<Polynomial, SpaceError> {
        let n = self.torus_rank;
        let duals = self.dual_basis(cone)?;
        let dual_polys: Vec<Polynomial> = duals
            .iter()
            .map(|row| {
                let mut p = Polynomial::zero(n);
                for (k, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        p = p.add(&Polynomial::monomial(
                            n,
                            Monomial::variable(n, k),
                            c.clone(),
                        ));
                    }
                }
                p
            })
            .collect();
        let monomials = if degree % 2 == 0 {
            self.face_monomials((degree / 2) as u32)
        } else {
            Vec::new()
        };
        assert_eq!(monomials.len(), vector.len());
        let mut out = Polynomial::zero(n);
        for (k, m) in monomials.iter().enumerate() {
            if vector[k].is_zero() {
                continue;
            }
            let mut term = Polynomial::constant(n, vector[k].clone());
            let mut dead = false;
            for (rho, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match cone.iter().position(|&r| r == rho) {
                    None => {
                        dead = true;
                        break;
                    }
                    Some(pos) => {
                        for _ in 0..e {
                            term = term.mul(&dual_polys[pos]);
                        }
                    }
                }
            }
            if !dead {
                out = out.add(&term);
            }
        }
        for (_, c) in out.terms() {
            if !ring.contains(c) {
                return Err(SpaceError::UnsupportedModelRing(format!(
                    "restriction coefficient {c} is not in {ring} (non-smooth cone over a ring where its multiplicity is not invertible)"
                )));
            }
        }
        Ok(out)
    }

    /// The relative skeleton term for level i: the direct sum over cones
    /// of dimension n - i of the classifying module of the cone stabilizer,
    /// generated in degree i.
    pub fn relative_module(
        &self,
        level: usize,
        ring: &CoefficientRing,
    ) -> Result<GradedModule, SpaceError> {
        let n = self.torus_rank;
        assert!(level <= n);
        let ctx = PolynomialRingContext::new(n, ring.clone());
        let cones = self.faces_of_dim(n - level);
        let mut parts = Vec::new();
        for cone in &cones {
            let iso = self.cone_isotropy(cone);
            let mut ideal = Vec::new();
            for i in 0..iso.character_matrix.rows() {
                let coeffs: Vec<BigInt> = (0..n)
                    .map(|j| iso.character_matrix.get(i, j).clone())
                    .collect();
                ideal.push(Polynomial::linear_form(&coeffs));
            }
            parts.push(GradedModule::cyclic(ctx.clone(), level as i64, ideal)?);
        }
        if parts.is_empty() {
            return Ok(GradedModule::zero(ctx));
        }
        Ok(GradedModule::direct_sum(&parts))
    }

    /// Canonical orientation basis of a cone's span: the Hermite basis of
    /// the lattice generated by its rays. Full-dimensional cones all
    /// inherit the standard orientation of the ambient lattice this way.
    fn orientation_basis(&self, cone: &[usize]) -> IntMatrix {
        self.ray_matrix(cone).row_hnf()
    }

    /// Geometric incidence sign of a facet: the sign of the determinant
    /// expressing (orientation basis of the facet, removed ray) in the
    /// orientation basis of the cone.
    fn incidence_sign(&self, cone: &[usize], facet: &[usize], removed_ray: usize) -> i64 {
        let cone_basis = self.orientation_basis(cone).transpose();
        let facet_basis = self.orientation_basis(facet);
        let k = cone.len();
        let mut coords: Vec<Vec<BigRational>> = Vec::with_capacity(k);
        for i in 0..facet_basis.rows() {
            let row: Vec<BigInt> = (0..self.torus_rank)
                .map(|j| facet_basis.get(i, j).clone())
                .collect();
            coords.push(solve_in_basis(&cone_basis, &row));
        }
        let u: Vec<BigInt> = self.rays[removed_ray].iter().map(|&v| BigInt::from(v)).collect();
        coords.push(solve_in_basis(&cone_basis, &u));
        match rational_determinant(&coords).cmp(&BigRational::zero()) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => panic!("degenerate incidence determinant"),
        }
    }

    /// Signed incidence entries from level-i summands to level-(i+1)
    /// summands: entry (row = target cone index, col = source cone index)
    /// is the geometric incidence sign when the target cone is a facet of
    /// the source cone. Validated by the composite-zero check of every
    /// assembled complex.
    pub fn incidence_matrix(&self, level: usize) -> Vec<Vec<i64>> {
        let n = self.torus_rank;
        let sources = self.faces_of_dim(n - level);
        let targets = self.faces_of_dim(n - level - 1);
        let tgt_index: BTreeMap<Vec<usize>, usize> = targets
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, f)| (f, k))
            .collect();
        let mut out = vec![vec![0i64; sources.len()]; targets.len()];
        for (sj, cone) in sources.iter().enumerate() {
            for k in 0..cone.len() {
                let mut facet = cone.clone();
                let removed = facet.remove(k);
                if let Some(&ti) = tgt_index.get(&facet) {
                    out[ti][sj] = self.incidence_sign(cone, &facet, removed);
                }
            }
        }
        out
    }
}

/// Coordinates of an integer vector in the columns of an integer basis.
fn solve_in_basis(basis_cols: &IntMatrix, v: &[BigInt]) -> Vec<BigRational> {
    let (y, den) = basis_cols
        .solve_rational(v)
        .expect("vector lies in the span of the basis");
    y.into_iter()
        .map(|n| BigRational::new(n, den.clone()))
        .collect()
}

/// Exact determinant by fraction-free forward elimination.
fn rational_determinant(rows: &[Vec<BigRational>]) -> BigRational {
    let n = rows.len();
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !m[i][col].is_zero());
        let Some(p) = pivot else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= m[col][col].clone();
        let inv = BigRational::one() / m[col][col].clone();
        for i in col + 1..n {
            if m[i][col].is_zero() {
                continue;
            }
            let factor = m[i][col].clone() * inv.clone();
            for j in col..n {
                let sub = factor.clone() * m[col][j].clone();
                m[i][j] = m[i][j].clone() - sub;
            }
        }
    }
    det
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd_i64(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::make_ring;

    fn p2() -> FanModel {
        FanModel::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap()
    }

    #[test]
    fn p2_structure() {
        let fan = p2();
        assert!(fan.validate().is_ok());
        assert!(fan.is_complete());
        assert!(fan.is_smooth());
        assert_eq!(fan.faces().len(), 7); // empty + 3 rays + 3 max cones
        assert_eq!(fan.faces_of_dim(1).len(), 3);
    }

    #[test]
    fn incomplete_fan_detected() {
        let half = FanModel::new(
            2,
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![0, 1]],
        )
        .unwrap();
        assert!(!half.is_complete());
    }

    #[test]
    fn sr_dimensions_match_series() {
        // H_T(P2) slice ranks are 1, 3, 6, 9, ... (coefficients of
        // (1 + q^2 + q^4) / (1 - q^2)^2).
        let fan = p2();
        let real = fan
            .sr_realization(&make_ring("Q").unwrap(), 12)
            .unwrap();
        assert_eq!(real.dim(0), 1);
        assert_eq!(real.dim(2), 3);
        assert_eq!(real.dim(4), 6);
        assert_eq!(real.dim(6), 9);
        assert_eq!(real.dim(8), 12);
    }

    #[test]
    fn moment_graph_of_p2() {
        let graph = p2().derived_moment_graph().unwrap();
        assert_eq!(graph.vertices.len(), 3);
        assert_eq!(graph.edges.len(), 3);
        for e in &graph.edges {
            // labels are primitive characters
            let g = e.label.iter().fold(0i64, |acc, &v| gcd_i64(acc, v));
            assert_eq!(g.abs(), 1);
        }
    }

    #[test]
    fn incidence_squares_to_zero() {
        let fan = p2();
        let d0 = fan.incidence_matrix(0); // rays x maxcones
        let d1 = fan.incidence_matrix(1); // {empty} x rays
        let rows = d1.len();
        let cols = d0[0].len();
        for i in 0..rows {
            for j in 0..cols {
                let mut acc = 0i64;
                for k in 0..d0.len() {
                    acc += d1[i][k] * d0[k][j];
                }
                assert_eq!(acc, 0, "composite incidence nonzero");
            }
        }
    }

    #[test]
    fn relative_modules_of_p2() {
        let q = make_ring("Q").unwrap();
        let fan = p2();
        // level 0: three copies of A
        let t0 = fan.relative_module(0, &q).unwrap();
        assert_eq!(t0.generator_degrees, vec![0, 0, 0]);
        assert!(t0.relations.is_empty());
        // level 1: three lines, generators in degree 1, slice ranks 3 at
        // every odd degree
        let t1 = fan.relative_module(1, &q).unwrap();
        assert_eq!(t1.generator_degrees, vec![1, 1, 1]);
        assert_eq!(t1.graded_piece(1).unwrap().free_rank, 3);
        assert_eq!(t1.graded_piece(3).unwrap().free_rank, 3);
        assert_eq!(t1.graded_piece(2).unwrap().free_rank, 0);
        // level 2: one copy of the residue field in degree 2
        let t2 = fan.relative_module(2, &q).unwrap();
        assert_eq!(t2.generator_degrees, vec![2]);
        assert_eq!(t2.graded_piece(2).unwrap().free_rank, 1);
        assert!(t2.graded_piece(4).unwrap().is_zero());
    }
}
