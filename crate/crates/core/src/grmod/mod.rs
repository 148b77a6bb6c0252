//! Finitely presented graded modules over A = R[t_1,...,t_n], graded maps,
//! complexes, and degreewise homology.
//!
//! A module is a cokernel: free module on generators (arbitrary integer
//! degrees) modulo homogeneous polynomial relation columns. Every slice in
//! a fixed degree is a finitely generated R-module computed by exact
//! linear algebra; no Groebner bases are used anywhere.

pub mod discover;
pub mod resolution;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::poly::{Monomial, Polynomial};
use crate::ring::{FgModule, PolynomialRingContext};
use crate::slices::{self, RMatrix, SliceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrmodError {
    #[error("relation column {0} is not homogeneous")]
    InhomogeneousRelation(usize),
    #[error("relation column {0} has {1} entries, expected {2}")]
    RelationLength(usize, usize, usize),
    #[error("coefficient outside ring in relation column {0}")]
    CoefficientOutsideRing(usize),
    #[error("map entry ({0},{1}) has wrong degree")]
    MapDegree(usize, usize),
    #[error("map does not respect relations (source relation {0})")]
    MapNotWellDefined(usize),
    #[error("consecutive maps do not compose to zero at position {0}")]
    NotAComplex(usize),
    #[error("complex terms and maps are inconsistent at position {0}")]
    ComplexShape(usize),
    #[error("degree bound {0} too small: {1}")]
    DegreeBoundTooSmall(i64, String),
    #[error("operation requires a field coefficient ring, got {0}")]
    FieldRequired(String),
    #[error("operation requires a nonzero module")]
    ZeroModule,
    #[error("slice arithmetic failed: {0}")]
    Slice(#[from] SliceError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Homogeneous relation column: entries indexed by generator, with
/// deg(entry_i) + generator_degree_i constant over the nonzero entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationColumn {
    pub entries: Vec<Polynomial>,
    pub degree: i64,
}

/// Finitely presented graded A-module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedModule {
    pub ctx: PolynomialRingContext,
    pub generator_degrees: Vec<i64>,
    pub relations: Vec<RelationColumn>,
}

impl GradedModule {
    /// Free module on generators of the given degrees.
    pub fn free(ctx: PolynomialRingContext, generator_degrees: Vec<i64>) -> Self {
        GradedModule {
            ctx,
            generator_degrees,
            relations: Vec::new(),
        }
    }

    pub fn zero(ctx: PolynomialRingContext) -> Self {
        GradedModule::free(ctx, Vec::new())
    }

    /// Cyclic module A/(ideal generated by the given polynomials), generator
    /// in degree `shift`.
    pub fn cyclic(
        ctx: PolynomialRingContext,
        shift: i64,
        ideal: Vec<Polynomial>,
    ) -> Result<Self, GrmodError> {
        let mut m = GradedModule::free(ctx, vec![shift]);
        for p in ideal {
            if p.is_zero() {
                continue;
            }
            m.push_relation(vec![p])?;
        }
        Ok(m)
    }

    pub fn push_relation(&mut self, entries: Vec<Polynomial>) -> Result<(), GrmodError> {
        let idx = self.relations.len();
        if entries.len() != self.generator_degrees.len() {
            return Err(GrmodError::RelationLength(
                idx,
                entries.len(),
                self.generator_degrees.len(),
            ));
        }
        let mut degree = None;
        for (i, p) in entries.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (_, c) in p.terms() {
                if !self.ctx.ring.contains(c) {
                    return Err(GrmodError::CoefficientOutsideRing(idx));
                }
            }
            let d = p
                .homogeneous_degree()
                .ok_or(GrmodError::InhomogeneousRelation(idx))?
                + self.generator_degrees[i];
            match degree {
                None => degree = Some(d),
                Some(existing) if existing == d => {}
                _ => return Err(GrmodError::InhomogeneousRelation(idx)),
            }
        }
        if let Some(degree) = degree {
            self.relations.push(RelationColumn { entries, degree });
        }
        Ok(())
    }

    pub fn is_free_presentation(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn shift(&self, s: i64) -> GradedModule {
        GradedModule {
            ctx: self.ctx.clone(),
            generator_degrees: self.generator_degrees.iter().map(|d| d + s).collect(),
            relations: self
                .relations
                .iter()
                .map(|r| RelationColumn {
                    entries: r.entries.clone(),
                    degree: r.degree + s,
                })
                .collect(),
        }
    }

    pub fn direct_sum(parts: &[GradedModule]) -> GradedModule {
        assert!(!parts.is_empty(), "need at least one summand");
        let ctx = parts[0].ctx.clone();
        let mut generator_degrees = Vec::new();
        let mut relations = Vec::new();
        let mut offset = 0usize;
        let total: usize = parts.iter().map(|p| p.generator_degrees.len()).sum();
        for part in parts {
            assert_eq!(part.ctx, ctx, "mixed contexts in direct sum");
            generator_degrees.extend_from_slice(&part.generator_degrees);
            for rel in &part.relations {
                let mut entries = vec![Polynomial::zero(ctx.torus_rank); total];
                for (i, e) in rel.entries.iter().enumerate() {
                    entries[offset + i] = e.clone();
                }
                relations.push(RelationColumn {
                    entries,
                    degree: rel.degree,
                });
            }
            offset += part.generator_degrees.len();
        }
        GradedModule {
            ctx,
            generator_degrees,
            relations,
        }
    }

    /// Free-cover basis in the given degree: (generator, monomial) pairs,
    /// generator index ascending, monomials ascending lexicographic.
    pub fn free_basis(&self, degree: i64) -> Vec<(usize, Monomial)> {
        let mut out = Vec::new();
        for (i, &g) in self.generator_degrees.iter().enumerate() {
            for m in Monomial::of_degree(self.ctx.torus_rank, degree - g) {
                out.push((i, m));
            }
        }
        out
    }

    fn basis_index(basis: &[(usize, Monomial)]) -> BTreeMap<(usize, Monomial), usize> {
        basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, b)| (b, k))
            .collect()
    }

    /// Matrix of the degree-`degree` slice of the relation submodule inside
    /// the free cover slice: rows = free basis, columns = monomial multiples
    /// of relation columns.
    pub fn relation_slice(&self, degree: i64) -> RMatrix {
        let basis = self.free_basis(degree);
        let index = Self::basis_index(&basis);
        let mut columns: Vec<Vec<BigRational>> = Vec::new();
        for rel in &self.relations {
            for m in Monomial::of_degree(self.ctx.torus_rank, degree - rel.degree) {
                let mut col = vec![BigRational::zero(); basis.len()];
                for (i, entry) in rel.entries.iter().enumerate() {
                    if entry.is_zero() {
                        continue;
                    }
                    let shifted = entry.mul_monomial(&m);
                    for (mono, coeff) in shifted.terms() {
                        let key = (i, mono.clone());
                        let row = *index
                            .get(&key)
                            .expect("homogeneous relation stays in basis");
                        col[row] = coeff.clone();
                    }
                }
                columns.push(col);
            }
        }
        RMatrix::from_columns(basis.len(), columns)
    }

    /// The degree-`degree` piece as a finitely generated R-module.
    pub fn graded_piece(&self, degree: i64) -> Result<FgModule, GrmodError> {
        Ok(slices::cokernel(&self.ctx.ring, &self.relation_slice(degree))?)
    }

    /// Slices for degrees 0..=max_degree.
    pub fn hilbert_function(&self, max_degree: i64) -> Result<Vec<FgModule>, GrmodError> {
        (0..=max_degree).map(|j| self.graded_piece(j)).collect()
    }

    /// A column vector over the free cover in the given degree, from its
    /// polynomial description.
    pub fn element_slice(&self, entries: &[Polynomial], degree: i64) -> Vec<BigRational> {
        let basis = self.free_basis(degree);
        let index = Self::basis_index(&basis);
        let mut col = vec![BigRational::zero(); basis.len()];
        for (i, p) in entries.iter().enumerate() {
            for (mono, coeff) in p.terms() {
                if let Some(&row) = index.get(&(i, mono.clone())) {
                    col[row] = coeff.clone();
                }
            }
        }
        col
    }

    /// Convert a free-cover slice vector back into polynomial entries.
    pub fn vector_to_entries(&self, degree: i64, v: &[BigRational]) -> Vec<Polynomial> {
        let basis = self.free_basis(degree);
        assert_eq!(basis.len(), v.len());
        let mut entries = vec![Polynomial::zero(self.ctx.torus_rank); self.generator_degrees.len()];
        for (k, (i, m)) in basis.iter().enumerate() {
            if !v[k].is_zero() {
                let add = Polynomial::monomial(self.ctx.torus_rank, m.clone(), v[k].clone());
                entries[*i] = entries[*i].add(&add);
            }
        }
        entries
    }
}

impl fmt::Display for GradedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "module over {} with generators in degrees {:?} and {} relations",
            self.ctx,
            self.generator_degrees,
            self.relations.len()
        )
    }
}

/// Homogeneous map of graded modules, raising degrees by `degree_shift`.
/// Entry (i, j) sends source generator j into target generator i.
#[derive(Debug, Clone)]
pub struct GradedMap {
    pub source: Arc<GradedModule>,
    pub target: Arc<GradedModule>,
    pub degree_shift: i64,
    pub matrix: Vec<Vec<Polynomial>>,
}

impl GradedMap {
    pub fn new(
        source: Arc<GradedModule>,
        target: Arc<GradedModule>,
        degree_shift: i64,
        matrix: Vec<Vec<Polynomial>>,
    ) -> Result<Self, GrmodError> {
        assert_eq!(matrix.len(), target.generator_degrees.len());
        for (i, row) in matrix.iter().enumerate() {
            assert_eq!(row.len(), source.generator_degrees.len());
            for (j, p) in row.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let expected =
                    source.generator_degrees[j] + degree_shift - target.generator_degrees[i];
                if p.homogeneous_degree() != Some(expected) {
                    return Err(GrmodError::MapDegree(i, j));
                }
            }
        }
        Ok(GradedMap {
            source,
            target,
            degree_shift,
            matrix,
        })
    }

    pub fn zero(source: Arc<GradedModule>, target: Arc<GradedModule>, degree_shift: i64) -> Self {
        let vars = source.ctx.torus_rank;
        let matrix = vec![
            vec![Polynomial::zero(vars); source.generator_degrees.len()];
            target.generator_degrees.len()
        ];
        GradedMap {
            source,
            target,
            degree_shift,
            matrix,
        }
    }

    /// Image of a source free-cover column (entries over source generators)
    /// as entries over target generators.
    pub fn apply(&self, entries: &[Polynomial]) -> Vec<Polynomial> {
        let vars = self.target.ctx.torus_rank;
        let mut out = vec![Polynomial::zero(vars); self.target.generator_degrees.len()];
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if p.is_zero() || entries[j].is_zero() {
                    continue;
                }
                out[i] = out[i].add(&p.mul(&entries[j]));
            }
        }
        out
    }

    /// Matrix of the induced map from the source free slice in `degree` to
    /// the target free slice in `degree + degree_shift`.
    pub fn slice(&self, degree: i64) -> RMatrix {
        let src_basis = self.source.free_basis(degree);
        let tgt_basis = self.target.free_basis(degree + self.degree_shift);
        let tgt_index = GradedModule::basis_index(&tgt_basis);
        let mut columns = Vec::new();
        for (j, m) in &src_basis {
            let mut col = vec![BigRational::zero(); tgt_basis.len()];
            for (i, row) in self.matrix.iter().enumerate() {
                let p = &row[*j];
                if p.is_zero() {
                    continue;
                }
                let shifted = p.mul_monomial(m);
                for (mono, coeff) in shifted.terms() {
                    let row_idx = *tgt_index
                        .get(&(i, mono.clone()))
                        .expect("homogeneous map stays in basis");
                    col[row_idx] = coeff.clone();
                }
            }
            columns.push(col);
        }
        RMatrix::from_columns(tgt_basis.len(), columns)
    }

    /// Check that source relations land in the target relation submodule.
    /// Each relation is homogeneous, so a single slice membership per
    /// relation decides it exactly.
    pub fn validate(&self) -> Result<(), GrmodError> {
        let ring = &self.target.ctx.ring;
        for (c, rel) in self.source.relations.iter().enumerate() {
            let image = self.apply(&rel.entries);
            let degree = rel.degree + self.degree_shift;
            let v = self.target.element_slice(&image, degree);
            if v.iter().all(|x| x.is_zero()) {
                continue;
            }
            let rels = self.target.relation_slice(degree);
            if !slices::membership(ring, &rels, &v)? {
                return Err(GrmodError::MapNotWellDefined(c));
            }
        }
        Ok(())
    }

    /// Is this the zero map of presented modules? Exact: each generator
    /// image is homogeneous, so one membership test per generator decides.
    pub fn is_zero_map(&self) -> Result<bool, GrmodError> {
        let ring = &self.target.ctx.ring;
        for j in 0..self.source.generator_degrees.len() {
            let entries: Vec<Polynomial> =
                self.matrix.iter().map(|row| row[j].clone()).collect();
            if entries.iter().all(|p| p.is_zero()) {
                continue;
            }
            let degree = self.source.generator_degrees[j] + self.degree_shift;
            let v = self.target.element_slice(&entries, degree);
            if v.iter().all(|x| x.is_zero()) {
                continue;
            }
            let rels = self.target.relation_slice(degree);
            if !slices::membership(ring, &rels, &v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// second(self(x)): composite map.
    pub fn compose(&self, second: &GradedMap) -> GradedMap {
        let vars = self.source.ctx.torus_rank;
        let rows = second.target.generator_degrees.len();
        let cols = self.source.generator_degrees.len();
        let mut matrix = vec![vec![Polynomial::zero(vars); cols]; rows];
        for i in 0..rows {
            for j in 0..cols {
                let mut acc = Polynomial::zero(vars);
                for k in 0..self.target.generator_degrees.len() {
                    let a = &second.matrix[i][k];
                    let b = &self.matrix[k][j];
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                matrix[i][j] = acc;
            }
        }
        GradedMap {
            source: Arc::clone(&self.source),
            target: Arc::clone(&second.target),
            degree_shift: self.degree_shift + second.degree_shift,
            matrix,
        }
    }
}

/// A finite complex of graded modules: maps[p] : terms[p] -> terms[p+1].
#[derive(Debug, Clone)]
pub struct GradedComplex {
    pub terms: Vec<Arc<GradedModule>>,
    pub maps: Vec<GradedMap>,
}

impl GradedComplex {
    pub fn new(terms: Vec<Arc<GradedModule>>, maps: Vec<GradedMap>) -> Result<Self, GrmodError> {
        if maps.len() + 1 != terms.len() {
            return Err(GrmodError::ComplexShape(0));
        }
        for (p, map) in maps.iter().enumerate() {
            if !Arc::ptr_eq(&map.source, &terms[p]) && *map.source != *terms[p] {
                return Err(GrmodError::ComplexShape(p));
            }
            if !Arc::ptr_eq(&map.target, &terms[p + 1]) && *map.target != *terms[p + 1] {
                return Err(GrmodError::ComplexShape(p + 1));
            }
        }
        Ok(GradedComplex { terms, maps })
    }

    /// Validate well-definedness of every map and vanishing of every
    /// consecutive composite. Exact, not truncated.
    pub fn validate(&self) -> Result<(), GrmodError> {
        for map in &self.maps {
            map.validate()?;
        }
        for p in 0..self.maps.len().saturating_sub(1) {
            let composite = self.maps[p].compose(&self.maps[p + 1]);
            if !composite.is_zero_map()? {
                return Err(GrmodError::NotAComplex(p));
            }
        }
        Ok(())
    }

    /// Homology at a position, degree by degree in the term's own grading,
    /// for degrees 0..=max_degree. Returns (degree, homology, cycles,
    /// boundaries) tuples; the matrices witness the computation. Degrees
    /// are independent and evaluated in parallel; the result order is
    /// fixed, so reports do not depend on the worker count.
    pub fn homology_at(
        &self,
        position: usize,
        max_degree: i64,
    ) -> Result<Vec<HomologySlice>, GrmodError> {
        use rayon::prelude::*;
        assert!(position < self.terms.len());
        let term = &self.terms[position];
        let ring = &term.ctx.ring;
        (0..=max_degree)
            .into_par_iter()
            .map(|degree| {
                let b2 = term.free_basis(degree).len();
                let rels = term.relation_slice(degree);
                let l_in = if position > 0 {
                    let map = &self.maps[position - 1];
                    map.slice(degree - map.degree_shift)
                } else {
                    RMatrix::zeros(b2, 0)
                };
                let (l_out, next_rels) = if position < self.maps.len() {
                    let map = &self.maps[position];
                    let next = &self.terms[position + 1];
                    (
                        map.slice(degree),
                        next.relation_slice(degree + map.degree_shift),
                    )
                } else {
                    (RMatrix::zeros(0, b2), RMatrix::zeros(0, 0))
                };
                let (h, cycles, boundaries) =
                    slices::homology_slice(ring, &l_in, &rels, &l_out, &next_rels)?;
                Ok(HomologySlice {
                    degree,
                    homology: h,
                    cycles,
                    boundaries,
                })
            })
            .collect()
    }
}

/// One degree of homology at a complex position, with witness matrices.
#[derive(Debug, Clone)]
pub struct HomologySlice {
    pub degree: i64,
    pub homology: FgModule,
    pub cycles: RMatrix,
    pub boundaries: RMatrix,
}

/// Convenience: homology at one position as (degree, module) pairs.
pub fn homology_at(
    complex: &GradedComplex,
    position: usize,
    max_degree: i64,
) -> Result<Vec<(i64, FgModule)>, GrmodError> {
    Ok(complex
        .homology_at(position, max_degree)?
        .into_iter()
        .map(|s| (s.degree, s.homology))
        .collect())
}
