//! Dimension / depth / Cohen-Macaulay profile of the tail modules
//! H_T(X, X_i), computed over a field as iterated degreewise cokernels
//! along the verified sequence. The splitting of the long exact sequences
//! is checked on the way (each tail injects into the next relative term).

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{assemble, verify, AbseqError, SequenceKind, Verdict};
use crate::grmod::discover::{discover_presentation, realize_over_field, SliceRealization};
use crate::grmod::resolution::{
    depth, is_zero_module, krull_dim, DepthDimReport, DepthValue, DimValue,
};
use crate::grmod::{GradedMap, GradedModule, GrmodError};
use crate::ring::CoefficientRing;
use crate::slices::{self, RMatrix};
use crate::spaces::SpaceModel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRow {
    /// The tail module H_T(X, X_level).
    pub level: usize,
    pub is_zero: bool,
    pub report: DepthDimReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmProfile {
    pub ring: String,
    pub max_degree: i64,
    pub min_orbit_dim: usize,
    /// Krull dimension of H_T(X) and the closed-form value it must equal.
    pub total_dim: DimValue,
    pub expected_total_dim: i64,
    pub rows: Vec<ProfileRow>,
    /// Every tail injects into its relative term degreewise (the long
    /// exact sequences split).
    pub splitting_holds: bool,
}

/// A presented module over a field realized with explicit slice bases.
struct Realized {
    real: SliceRealization,
    bases: Vec<RMatrix>,
    rels: Vec<RMatrix>,
}

fn realize_presented(module: &GradedModule, bound: i64) -> Result<Realized, GrmodError> {
    let (real, bases) = realize_over_field(module, bound)?;
    let rels = (0..=bound).map(|d| module.relation_slice(d)).collect();
    Ok(Realized { real, bases, rels })
}

/// Coordinates of a free-cover slice vector in the realization basis,
/// modulo the relation span.
fn to_realization_coords(
    ring: &CoefficientRing,
    target: &Realized,
    degree: i64,
    v: &[BigRational],
) -> Result<Vec<BigRational>, GrmodError> {
    let basis = &target.bases[degree as usize];
    if basis.cols() == 0 {
        return Ok(Vec::new());
    }
    let ambient = basis.hstack(&target.rels[degree as usize]);
    let sol = slices::solve_coords(ring, &ambient, v)?
        .ok_or_else(|| GrmodError::Internal("vector not in target slice".into()))?;
    Ok(sol[..basis.cols()].to_vec())
}

/// One stage of the cokernel tower: a slice realization living in the
/// degrees of its surrounding term, with basis lifts into that term's
/// realization and the image that was quotiented out.
struct TowerStage {
    real: SliceRealization,
    lifts: Vec<RMatrix>,
}

/// Quotient realization of a term by an image (columns in term
/// realization coordinates per degree).
fn coker_stage(
    ring: &CoefficientRing,
    term: &Realized,
    image: Vec<RMatrix>,
    bound: i64,
) -> Result<TowerStage, GrmodError> {
    let n = term.real.ctx.torus_rank;
    let mut dims = Vec::new();
    let mut lifts = Vec::new();
    for d in 0..=bound {
        let (_, cogens) = slices::minimal_cogenerators(ring, &image[d as usize])?;
        let cols: Vec<Vec<BigRational>> = cogens.into_iter().map(|c| c.lift).collect();
        dims.push(cols.len());
        lifts.push(RMatrix::from_columns(term.real.dim(d), cols));
    }
    let mut real = SliceRealization::new(term.real.ctx.clone(), bound, dims);
    for d in 0..=bound - 2 {
        let src = &lifts[d as usize];
        let tgt = &lifts[(d + 2) as usize];
        let reduce = tgt.hstack(&image[(d + 2) as usize]);
        for a in 0..n {
            let mut cols = Vec::new();
            for j in 0..src.cols() {
                let moved = term
                    .real
                    .action_matrix(a, d)
                    .mul(&RMatrix::from_columns(src.rows(), vec![src.column(j)]));
                let sol = if tgt.cols() == 0 {
                    Vec::new()
                } else {
                    let s = slices::solve_coords(ring, &reduce, &moved.column(0))?
                        .ok_or_else(|| {
                            GrmodError::Internal("cokernel action escaped basis".into())
                        })?;
                    s[..tgt.cols()].to_vec()
                };
                cols.push(sol);
            }
            real.set_action(a, d, RMatrix::from_columns(tgt.cols(), cols));
        }
    }
    let _ = image;
    Ok(TowerStage { real, lifts })
}

/// The depth/dimension/Cohen-Macaulay profile of the tail modules along
/// the verified sequence, over a field.
pub fn cm_profile(
    model: &SpaceModel,
    ring: &CoefficientRing,
    max_degree: i64,
) -> Result<CmProfile, AbseqError> {
    if !ring.is_field() {
        return Err(AbseqError::FieldRequired(ring.to_string()));
    }
    let n = model.torus_rank();
    let k = model.min_orbit_dim()?;
    let kind = if k == 0 {
        SequenceKind::AtiyahBredonFull
    } else {
        SequenceKind::GoertschesToeben
    };
    let report = verify(model, ring, kind, max_degree)?;
    if report.verdict != Verdict::ExactUpToD {
        return Err(AbseqError::NotExact(format!("{:?}", report.verdict)));
    }
    let assembled = assemble(model, ring, kind, max_degree)?;

    // total dimension of H_T(X) against the closed form d + n - k
    let total = krull_dim(&assembled.cohomology.module, max_degree)?;
    let expected_total_dim = ring.base_dimension() as i64 + n as i64 - k as i64;

    // realize every term and walk the cokernel tower
    let bound = max_degree;
    let head = realize_presented(&assembled.cohomology.module, bound)?;
    let terms: Vec<Realized> = assembled
        .complex
        .terms
        .iter()
        .skip(1)
        .map(|t| realize_presented(t, bound))
        .collect::<Result<_, _>>()?;

    // image of the restriction inside term 0's realization
    let mut image: Vec<RMatrix> = Vec::new();
    for d in 0..=bound {
        let slice = assembled.complex.maps[0].slice(d);
        let mut cols = Vec::new();
        for j in 0..head.real.dim(d) {
            let free_vec = head.bases[d as usize].column(j);
            let mapped = slice.mul(&RMatrix::from_columns(free_vec.len(), vec![free_vec]));
            cols.push(to_realization_coords(ring, &terms[0], d, &mapped.column(0))?);
        }
        image.push(RMatrix::from_columns(terms[0].real.dim(d), cols));
    }

    let window = n as i64 + 2;
    let mut rows = Vec::new();
    let mut splitting_holds = true;
    let mut stage = coker_stage(ring, &terms[0], image, bound)?;
    for t in 1..=terms.len() {
        // stage realizes H_T(X, X_{k + t - 1}) in term (t-1) degrees
        let level = k + t - 1;
        if level < n {
            let found = discover_presentation(&stage.real, window)?;
            let module = found.module;
            let row = if is_zero_module(&module)? {
                ProfileRow {
                    level,
                    is_zero: true,
                    report: DepthDimReport {
                        depth: DepthValue::Infinite,
                        dim: DimValue::MinusInfinity,
                        is_cm: None,
                        certificate: "zero module".into(),
                    },
                }
            } else {
                let d = depth(&module, bound)?;
                let dim = krull_dim(&module, bound)?;
                let is_cm = match (d.depth, dim.dim) {
                    (DepthValue::Finite(a), DimValue::Finite(b)) => Some(a == b),
                    _ => None,
                };
                ProfileRow {
                    level,
                    is_zero: false,
                    report: DepthDimReport {
                        depth: d.depth,
                        dim: dim.dim,
                        is_cm,
                        certificate: format!("{}; {}", d.certificate, dim.certificate),
                    },
                }
            };
            rows.push(row);
        }
        if t == terms.len() {
            // past the last term the tail must vanish
            if !(0..=bound).all(|d| stage.real.dim(d) == 0) {
                return Err(AbseqError::EngineContradiction(
                    "tail module survives past the last term".into(),
                ));
            }
            break;
        }
        // map the stage into the next term, with degree shift one
        let map: &GradedMap = &assembled.complex.maps[t];
        let mut next_image: Vec<RMatrix> = Vec::new();
        for d in 0..=bound {
            let tgt_dim = terms[t].real.dim(d);
            if d == 0 {
                next_image.push(RMatrix::zeros(tgt_dim, 0));
                continue;
            }
            let src_d = d - 1;
            let slice = map.slice(src_d);
            let mut cols = Vec::new();
            for j in 0..stage.real.dim(src_d) {
                // lift in term (t-1) realization coords -> free cover -> map
                let lift = stage.lifts[src_d as usize].column(j);
                let free_vec = terms[t - 1].bases[src_d as usize]
                    .mul(&RMatrix::from_columns(lift.len(), vec![lift]));
                let mapped = slice.mul(&free_vec);
                cols.push(to_realization_coords(ring, &terms[t], d, &mapped.column(0))?);
            }
            let m = RMatrix::from_columns(tgt_dim, cols);
            // splitting: the tail injects into the relative term
            let rank = slices::rank(ring, &m).map_err(GrmodError::from)?;
            if rank != stage.real.dim(src_d) {
                splitting_holds = false;
            }
            next_image.push(m);
        }
        stage = coker_stage(ring, &terms[t], next_image, bound)?;
    }

    Ok(CmProfile {
        ring: ring.to_string(),
        max_degree,
        min_orbit_dim: k,
        total_dim: total.dim,
        expected_total_dim,
        rows,
        splitting_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::ring::make_ring;

    #[test]
    fn p1_profile() {
        let p1 = catalog::model("P1").unwrap();
        let q = make_ring("Q").unwrap();
        let profile = cm_profile(&p1, &q, 12).unwrap();
        assert_eq!(profile.rows.len(), 1);
        let row = &profile.rows[0];
        assert_eq!(row.level, 0);
        assert!(!row.is_zero);
        // H_T(X, X_0) is Q in degree 1: dimension 0 = depth, CM
        assert_eq!(row.report.dim, DimValue::Finite(0));
        assert_eq!(row.report.depth, DepthValue::Finite(0));
        assert_eq!(row.report.is_cm, Some(true));
        assert!(profile.splitting_holds);
        assert_eq!(profile.total_dim, DimValue::Finite(1));
        assert_eq!(profile.expected_total_dim, 1);
    }

    #[test]
    fn p2_profile_matches_the_claim() {
        let p2 = catalog::model("P2").unwrap();
        let q = make_ring("Q").unwrap();
        let profile = cm_profile(&p2, &q, 14).unwrap();
        assert_eq!(profile.rows.len(), 2);
        assert_eq!(profile.rows[0].report.dim, DimValue::Finite(1));
        assert_eq!(profile.rows[0].report.depth, DepthValue::Finite(1));
        assert_eq!(profile.rows[0].report.is_cm, Some(true));
        assert_eq!(profile.rows[1].report.dim, DimValue::Finite(0));
        assert_eq!(profile.rows[1].report.depth, DepthValue::Finite(0));
        assert_eq!(profile.rows[1].report.is_cm, Some(true));
        assert!(profile.splitting_holds);
        assert_eq!(profile.total_dim, DimValue::Finite(2));
    }

    #[test]
    fn free_circle_product_profile() {
        let m = catalog::model("FreeCircleTimes:P1").unwrap();
        let q = make_ring("Q").unwrap();
        let profile = cm_profile(&m, &q, 12).unwrap();
        assert_eq!(profile.min_orbit_dim, 1);
        assert_eq!(profile.total_dim, DimValue::Finite(1));
        assert_eq!(profile.expected_total_dim, 1);
    }
}
