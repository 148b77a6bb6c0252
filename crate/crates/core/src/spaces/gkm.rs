//! One-skeleton assemblies of spinning spheres (moment graphs).
//!
//! The model is the union of invariant two-spheres S(alpha), one per edge,
//! glued along the fixed points. Equivariant cohomology is realized
//! degreewise by the Mayer-Vietoris data: the kernel of the difference map
//! into the edge classifying modules, plus (over prime fields dividing an
//! edge speed) the odd-degree cokernel contribution. Relative terms for
//! the skeleton pair use the closed form: the connecting cokernel of the
//! restriction is the edge classifying module shifted into degree 1.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::SpaceError;
use crate::grmod::discover::SliceRealization;
use crate::grmod::GradedModule;
use crate::lattice::{decompose_subgroup, ClosedSubgroup, IntMatrix, StratumDescriptor};
use crate::poly::{Monomial, Polynomial};
use crate::ring::{CoefficientRing, PolynomialRingContext};
use crate::slices::{self, RMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GkmEdge {
    pub v: usize,
    pub w: usize,
    pub label: Vec<i64>,
}

/// Edge record in the external file format (vertex names).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GkmEdgeFile {
    pub v: String,
    pub w: String,
    pub label: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GkmModel {
    pub torus_rank: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<GkmEdge>,
}

impl GkmModel {
    pub fn new(
        torus_rank: usize,
        vertices: Vec<String>,
        edges: Vec<GkmEdge>,
    ) -> Result<Self, SpaceError> {
        let model = GkmModel {
            torus_rank,
            vertices,
            edges,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), SpaceError> {
        let n = self.torus_rank;
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v.clone()) {
                return Err(SpaceError::InvalidModel(format!("vertex `{v}` repeats")));
            }
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.v >= self.vertices.len() || e.w >= self.vertices.len() || e.v == e.w {
                return Err(SpaceError::InvalidModel(format!("edge {k} endpoints invalid")));
            }
            if e.label.len() != n {
                return Err(SpaceError::InvalidModel(format!(
                    "edge {k} label has {} coordinates, expected {n}",
                    e.label.len()
                )));
            }
            if e.label.iter().all(|&v| v == 0) {
                return Err(SpaceError::InvalidModel(format!("edge {k} label is zero")));
            }
        }
        Ok(())
    }

    pub fn edge_subgroup(&self, edge: usize) -> ClosedSubgroup {
        let e = &self.edges[edge];
        ClosedSubgroup::new(
            self.torus_rank,
            IntMatrix::from_i64_rows(&[e.label.clone()]),
        )
        .expect("label length checked")
    }

    /// The finite speed of an edge: the content of its label (the order of
    /// the finite part of the equatorial isotropy).
    pub fn edge_speed(&self, edge: usize) -> u64 {
        let dec = decompose_subgroup(&self.edge_subgroup(edge));
        dec.finite_orders
            .first()
            .map(|m| m.to_u64_digits().first().copied().unwrap_or(u64::MAX))
            .unwrap_or(1)
    }

    /// Even classifying module of the equatorial isotropy of an edge.
    pub fn edge_module(&self, edge: usize, ring: &CoefficientRing) -> GradedModule {
        let ctx = PolynomialRingContext::new(self.torus_rank, ring.clone());
        crate::lattice::present_classifying_cohomology(&self.edge_subgroup(edge), &ctx)
    }

    /// Does this edge contribute odd classes over the given ring?
    pub fn edge_has_odd_part(&self, edge: usize, ring: &CoefficientRing) -> bool {
        match ring {
            CoefficientRing::PrimeField(p) => self.edge_speed(edge) % p == 0,
            _ => false,
        }
    }

    pub fn strata(&self) -> Result<Vec<StratumDescriptor>, SpaceError> {
        let n = self.torus_rank;
        let mut out = Vec::new();
        for name in &self.vertices {
            out.push(StratumDescriptor::new(
                format!("vertex.{name}"),
                ClosedSubgroup::full_torus(n),
                0,
            )?);
        }
        for (k, _) in self.edges.iter().enumerate() {
            out.push(StratumDescriptor::new(
                format!("edge.{k}"),
                self.edge_subgroup(k),
                1,
            )?);
        }
        Ok(out)
    }

    /// The free module over the fixed points: one copy of A per vertex.
    pub fn vertex_term(&self, ring: &CoefficientRing) -> GradedModule {
        let ctx = PolynomialRingContext::new(self.torus_rank, ring.clone());
        GradedModule::free(ctx, vec![0; self.vertices.len()])
    }

    /// Difference-map slice in the given degree: from the vertex-sum slice
    /// to the stacked free covers of the edge modules.
    fn difference_slice(&self, degree: i64) -> RMatrix {
        let n = self.torus_rank;
        let monos = Monomial::of_degree(n, degree);
        let block = monos.len();
        let rows = block * self.edges.len();
        let cols = block * self.vertices.len();
        let mut m = RMatrix::zeros(rows, cols);
        for (e, edge) in self.edges.iter().enumerate() {
            for k in 0..block {
                m.set(
                    e * block + k,
                    edge.v * block + k,
                    BigRational::from_integer(BigInt::one()),
                );
                m.set(
                    e * block + k,
                    edge.w * block + k,
                    BigRational::from_integer(-BigInt::one()),
                );
            }
        }
        m
    }

    fn stacked_edge_relations(&self, ring: &CoefficientRing, degree: i64) -> RMatrix {
        let n = self.torus_rank;
        let block = Monomial::of_degree(n, degree).len();
        let mut total_cols = 0;
        let mut blocks = Vec::new();
        for e in 0..self.edges.len() {
            let rel = self.edge_module(e, ring).relation_slice(degree);
            total_cols += rel.cols();
            blocks.push(rel);
        }
        let mut out = RMatrix::zeros(block * self.edges.len(), total_cols);
        let mut col_offset = 0;
        for (e, rel) in blocks.into_iter().enumerate() {
            for i in 0..rel.rows() {
                for j in 0..rel.cols() {
                    out.set(e * block + i, col_offset + j, rel.get(i, j).clone());
                }
            }
            col_offset += rel.cols();
        }
        out
    }

    /// Generators (a basis) of the equalizer sublattice inside the
    /// vertex-sum slice in the given degree: tuples whose edge differences
    /// restrict to zero in the edge classifying modules.
    pub fn equalizer_gens(
        &self,
        ring: &CoefficientRing,
        degree: i64,
    ) -> Result<RMatrix, SpaceError> {
        let diff = self.difference_slice(degree);
        let rels = self.stacked_edge_relations(ring, degree);
        Ok(slices::preimage_kernel(ring, &diff, &rels)
            .map_err(|e| SpaceError::Grmod(e.to_string()))?)
    }

    /// Mayer-Vietoris realization of equivariant cohomology: the kernel
    /// part in every degree plus, over prime fields dividing an edge
    /// speed, one odd block per such edge (a shifted copy of A).
    pub fn mv_realization(
        &self,
        ring: &CoefficientRing,
        max_degree: i64,
    ) -> Result<(SliceRealization, Vec<RMatrix>), SpaceError> {
        let n = self.torus_rank;
        let ctx = PolynomialRingContext::new(n, ring.clone());
        let odd_edges: Vec<usize> = (0..self.edges.len())
            .filter(|&e| self.edge_has_odd_part(e, ring))
            .collect();
        let mut kernel_bases = Vec::new();
        let mut dims = Vec::new();
        for d in 0..=max_degree {
            let kernel = self.equalizer_gens(ring, d)?;
            let odd: usize = odd_edges
                .iter()
                .map(|_| Monomial::of_degree(n, d - 2).len())
                .sum();
            dims.push(kernel.cols() + odd);
            kernel_bases.push(kernel);
        }
        let mut real = SliceRealization::new(ctx, max_degree, dims);
        for d in 0..=max_degree - 2 {
            let src_kernel = &kernel_bases[d as usize];
            let tgt_kernel = &kernel_bases[(d + 2) as usize];
            let src_odd_monos = Monomial::of_degree(n, d - 2);
            let tgt_odd_monos = Monomial::of_degree(n, d);
            let tgt_odd_index: BTreeMap<Monomial, usize> = tgt_odd_monos
                .iter()
                .cloned()
                .enumerate()
                .map(|(k, m)| (m, k))
                .collect();
            let tgt_dim = real.dim(d + 2);
            for a in 0..n {
                let mut cols = Vec::new();
                // kernel part: shift the ambient vector and solve in the
                // next kernel basis
                for j in 0..src_kernel.cols() {
                    let shifted =
                        shift_vertex_sum(self.vertices.len(), n, d, &src_kernel.column(j), a);
                    let sol = slices::solve_coords(ring, tgt_kernel, &shifted)
                        .map_err(|e| SpaceError::Grmod(e.to_string()))?
                        .ok_or_else(|| {
                            SpaceError::Grmod(
                                "equalizer not closed under the variable action".into(),
                            )
                        })?;
                    let mut col = vec![BigRational::zero(); tgt_dim];
                    col[..sol.len()].clone_from_slice(&sol);
                    cols.push(col);
                }
                // odd part: monomial multiplication inside each edge block
                for (block_idx, _) in odd_edges.iter().enumerate() {
                    for m in &src_odd_monos {
                        let mut col = vec![BigRational::zero(); tgt_dim];
                        let mut shifted = m.clone();
                        shifted.0[a] += 1;
                        let row = tgt_kernel.cols()
                            + block_idx * tgt_odd_monos.len()
                            + tgt_odd_index[&shifted];
                        col[row] = BigRational::one();
                        cols.push(col);
                    }
                }
                real.set_action(a, d, RMatrix::from_columns(tgt_dim, cols));
            }
        }
        Ok((real, kernel_bases))
    }

    /// Relative term of the skeleton pair (X, fixed points): per edge the
    /// classifying module shifted into degree 1, plus a second shifted
    /// copy over prime fields dividing the edge speed (the odd classes
    /// that restrict to zero). Returns the module together with, per edge,
    /// the generator index of its degree-1 summand.
    pub fn relative_module(
        &self,
        ring: &CoefficientRing,
    ) -> Result<(GradedModule, Vec<usize>), SpaceError> {
        let ctx = PolynomialRingContext::new(self.torus_rank, ring.clone());
        let mut parts = Vec::new();
        let mut edge_gen_index = Vec::new();
        let mut offset = 0usize;
        for e in 0..self.edges.len() {
            let base = self.edge_module(e, ring);
            edge_gen_index.push(offset);
            parts.push(base.shift(1));
            offset += 1;
            if self.edge_has_odd_part(e, ring) {
                parts.push(base.shift(2));
                offset += 1;
            }
        }
        if parts.is_empty() {
            return Ok((GradedModule::zero(ctx), edge_gen_index));
        }
        Ok((GradedModule::direct_sum(&parts), edge_gen_index))
    }
}

/// Multiply a slice vector of the vertex sum (one block of monomials per
/// vertex) by t_{var+1}.
pub fn shift_vertex_sum(
    vertices: usize,
    n: usize,
    degree: i64,
    v: &[BigRational],
    var: usize,
) -> Vec<BigRational> {
    let src = Monomial::of_degree(n, degree);
    let tgt = Monomial::of_degree(n, degree + 2);
    let tgt_index: BTreeMap<Monomial, usize> = tgt
        .iter()
        .cloned()
        .enumerate()
        .map(|(k, m)| (m, k))
        .collect();
    assert_eq!(v.len(), vertices * src.len());
    let mut out = vec![BigRational::zero(); vertices * tgt.len()];
    for vert in 0..vertices {
        for (k, m) in src.iter().enumerate() {
            let val = &v[vert * src.len() + k];
            if val.is_zero() {
                continue;
            }
            let mut shifted = m.clone();
            shifted.0[var] += 1;
            out[vert * tgt.len() + tgt_index[&shifted]] = val.clone();
        }
    }
    out
}

/// Entries of the connecting map from the vertex term into the relative
/// module: the signed quotient maps onto each edge's degree-1 summand.
pub fn connecting_entries(
    model: &GkmModel,
    relative: &GradedModule,
    edge_gen_index: &[usize],
) -> Vec<Vec<Polynomial>> {
    let n = model.torus_rank;
    let rows = relative.generator_degrees.len();
    let cols = model.vertices.len();
    let mut matrix = vec![vec![Polynomial::zero(n); cols]; rows];
    for (e, edge) in model.edges.iter().enumerate() {
        let row = edge_gen_index[e];
        matrix[row][edge.v] = Polynomial::integer(n, 1);
        matrix[row][edge.w] = Polynomial::integer(n, -1);
    }
    matrix
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grmod::discover::discover_presentation;
    use crate::ring::{make_ring, FgModule};

    fn sphere(speed: i64) -> GkmModel {
        GkmModel::new(
            1,
            vec!["north".into(), "south".into()],
            vec![GkmEdge {
                v: 0,
                w: 1,
                label: vec![speed],
            }],
        )
        .unwrap()
    }

    #[test]
    fn speed2_sphere_hilbert_over_f2() {
        // ranks by degree 0..4: 1, 0, 2, 0, 2
        let m = sphere(2);
        let f2 = make_ring("Fp:2").unwrap();
        let (real, _) = m.mv_realization(&f2, 10).unwrap();
        assert_eq!(real.dim(0), 1);
        assert_eq!(real.dim(1), 0);
        assert_eq!(real.dim(2), 2);
        assert_eq!(real.dim(3), 0);
        assert_eq!(real.dim(4), 2);
        let found = discover_presentation(&real, 3).unwrap();
        for d in 0..=10 {
            assert_eq!(
                found.module.graded_piece(d).unwrap(),
                FgModule::free(real.dim(d)),
                "degree {d}"
            );
        }
    }

    #[test]
    fn speed2_sphere_free_over_z() {
        let m = sphere(2);
        let z = make_ring("Z").unwrap();
        let (real, _) = m.mv_realization(&z, 10).unwrap();
        assert_eq!(real.dim(0), 1);
        assert_eq!(real.dim(2), 2);
        let found = discover_presentation(&real, 3).unwrap();
        assert_eq!(found.module.generator_degrees, vec![0, 2]);
        assert!(found.module.relations.is_empty());
    }

    #[test]
    fn smooth_sphere_matches_projective_line() {
        let m = sphere(1);
        let z = make_ring("Z").unwrap();
        let (real, _) = m.mv_realization(&z, 10).unwrap();
        // H_T(P1): ranks 1, 2, 2, ...
        assert_eq!(real.dim(0), 1);
        assert_eq!(real.dim(2), 2);
        assert_eq!(real.dim(4), 2);
    }

    #[test]
    fn relative_term_of_smooth_sphere() {
        // Z concentrated in degree 1.
        let m = sphere(1);
        let z = make_ring("Z").unwrap();
        let (rel, _) = m.relative_module(&z).unwrap();
        assert_eq!(rel.graded_piece(1).unwrap(), FgModule::free(1));
        assert!(rel.graded_piece(3).unwrap().is_zero());
        assert!(rel.graded_piece(0).unwrap().is_zero());
    }

    #[test]
    fn relative_term_of_speed2_sphere_over_z() {
        // Z in degree 1, Z/2 in every odd degree from 3 on.
        let m = sphere(2);
        let z = make_ring("Z").unwrap();
        let (rel, _) = m.relative_module(&z).unwrap();
        assert_eq!(rel.graded_piece(1).unwrap(), FgModule::free(1));
        let p3 = rel.graded_piece(3).unwrap();
        assert_eq!(p3.free_rank, 0);
        assert_eq!(p3.torsion, vec![2u32.into()]);
        assert!(rel.graded_piece(2).unwrap().is_zero());
    }
}
