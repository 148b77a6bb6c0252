//! Assembly and degreewise exactness verification of the skeleton
//! sequences, with hypothesis checking (isotropy conditions, freeness,
//! Cohen-Macaulayness) and auditable failure witnesses.

pub mod cs;
pub mod profile;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grmod::resolution::{is_cohen_macaulay, is_free, FreenessReport};
use crate::grmod::{GradedComplex, GradedMap, GradedModule, GrmodError};
use crate::lattice::{
    check_conditions, check_conditions_algebraic, ConditionReport, LatticeError,
};
use crate::poly::Polynomial;
use crate::ring::{CoefficientRing, FgModule};
use crate::spaces::cohomology::{equivariant_cohomology, inflate_polynomial, relative_term};
use crate::spaces::{gkm, SpaceError, SpaceModel};

pub use cs::{cs_compare, CsReport, CsVerdict};
pub use profile::{cm_profile, CmProfile, ProfileRow};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AbseqError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("module engine: {0}")]
    Grmod(#[from] GrmodError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("sign model failure: consecutive maps do not compose to zero ({0})")]
    SignModel(String),
    #[error("engine contradiction: exactness fails although every hypothesis holds ({0})")]
    EngineContradiction(String),
    #[error("the two condition checkers disagree; this is an engine defect")]
    CheckerMismatch,
    #[error("sequence not verified exact, cannot profile: {0}")]
    NotExact(String),
    #[error("operation requires a field coefficient ring, got {0}")]
    FieldRequired(String),
}

/// Which sequence to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceKind {
    ChangSkjelbred,
    AtiyahBredonFull,
    AtiyahBredonTruncated(usize),
    GoertschesToeben,
}

impl std::fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SequenceKind::ChangSkjelbred => write!(f, "cs"),
            SequenceKind::AtiyahBredonFull => write!(f, "full"),
            SequenceKind::AtiyahBredonTruncated(k) => write!(f, "truncated:{k}"),
            SequenceKind::GoertschesToeben => write!(f, "gt"),
        }
    }
}

/// An assembled sequence: the complex plus the data needed to check the
/// theorem hypotheses.
pub struct AssembledSequence {
    pub complex: GradedComplex,
    pub kind: SequenceKind,
    pub start_level: usize,
    /// Positions where exactness is asserted.
    pub check_positions: Vec<usize>,
    pub cohomology: crate::spaces::CohomologyData,
}

/// Build the requested sequence for the model.
pub fn assemble(
    model: &SpaceModel,
    ring: &CoefficientRing,
    kind: SequenceKind,
    max_degree: i64,
) -> Result<AssembledSequence, AbseqError> {
    let n = model.torus_rank();
    let k = model.min_orbit_dim()?;
    let data = equivariant_cohomology(model, ring, max_degree)?;
    let (start_level, end_level, check_through) = match kind {
        SequenceKind::AtiyahBredonFull => {
            require_fixed_points(kind, k)?;
            (0usize, n, usize::MAX)
        }
        SequenceKind::ChangSkjelbred => {
            require_fixed_points(kind, k)?;
            (0, 1.min(n), 1)
        }
        SequenceKind::AtiyahBredonTruncated(t) => {
            require_fixed_points(kind, k)?;
            if t > n {
                return Err(AbseqError::Unsupported(format!(
                    "truncation level {t} exceeds torus rank {n}"
                )));
            }
            (0, t, t)
        }
        SequenceKind::GoertschesToeben => (k, n, usize::MAX),
    };

    let mut terms: Vec<Arc<GradedModule>> = vec![Arc::clone(&data.module)];
    terms.push(Arc::clone(&data.skeleton_term));
    for level in (start_level + 1)..=end_level {
        terms.push(Arc::new(relative_term(model, level, ring)?));
    }
    let mut maps: Vec<GradedMap> = Vec::new();
    maps.push(data.restriction.clone());
    for (idx, level) in (start_level..end_level).enumerate() {
        let source = Arc::clone(&terms[idx + 1]);
        let target = Arc::clone(&terms[idx + 2]);
        let matrix = connecting_matrix(model, level, ring, &source, &target)?;
        maps.push(GradedMap::new(source, target, 1, matrix)?);
    }
    let positions = terms.len();
    let check_positions: Vec<usize> = (0..positions)
        .filter(|&p| p <= check_through)
        .collect();
    Ok(AssembledSequence {
        complex: GradedComplex::new(terms, maps)?,
        kind,
        start_level,
        check_positions,
        cohomology: data,
    })
}

fn require_fixed_points(kind: SequenceKind, k: usize) -> Result<(), AbseqError> {
    if k != 0 {
        return Err(AbseqError::Unsupported(format!(
            "{kind} needs fixed points; minimal orbit dimension is {k} (use the gt kind)"
        )));
    }
    Ok(())
}

/// Matrix of the connecting map relative(level) -> relative(level + 1),
/// degree shift one.
fn connecting_matrix(
    model: &SpaceModel,
    level: usize,
    ring: &CoefficientRing,
    source: &Arc<GradedModule>,
    target: &Arc<GradedModule>,
) -> Result<Vec<Vec<Polynomial>>, AbseqError> {
    let n = model.torus_rank();
    let rows = target.generator_degrees.len();
    let cols = source.generator_degrees.len();
    let zero = vec![vec![Polynomial::zero(n); cols]; rows];
    match model {
        SpaceModel::Fan(fan) => {
            let incidence = fan.incidence_matrix(level);
            let mut matrix = zero;
            for (i, row) in incidence.iter().enumerate() {
                for (j, &s) in row.iter().enumerate() {
                    if s != 0 {
                        matrix[i][j] = Polynomial::integer(n, s);
                    }
                }
            }
            Ok(matrix)
        }
        SpaceModel::Gkm(g) => {
            if level == 0 {
                let (relative, edge_gens) = g.relative_module(ring)?;
                debug_assert_eq!(&relative, target.as_ref());
                Ok(gkm::connecting_entries(g, &relative, &edge_gens))
            } else {
                Ok(zero)
            }
        }
        SpaceModel::SingleOrbit(_) => Ok(zero),
        SpaceModel::DisjointUnion(parts) => {
            let mut matrix = zero;
            let mut row_off = 0;
            let mut col_off = 0;
            for part in parts {
                let psrc = Arc::new(relative_term(part, level, ring)?);
                let ptgt = Arc::new(relative_term(part, level + 1, ring)?);
                let block = connecting_matrix(part, level, ring, &psrc, &ptgt)?;
                for (i, row) in block.iter().enumerate() {
                    for (j, p) in row.iter().enumerate() {
                        matrix[row_off + i][col_off + j] = p.clone();
                    }
                }
                row_off += ptgt.generator_degrees.len();
                col_off += psrc.generator_degrees.len();
            }
            Ok(matrix)
        }
        SpaceModel::FreeCircleProduct(base) => {
            if level == 0 {
                // relative(0) of the product is zero; nothing maps anywhere
                return Ok(zero);
            }
            let bsrc = Arc::new(relative_term(base, level - 1, ring)?);
            let btgt = Arc::new(relative_term(base, level, ring)?);
            let block = connecting_matrix(base, level - 1, ring, &bsrc, &btgt)?;
            Ok(block
                .into_iter()
                .map(|row| row.iter().map(inflate_polynomial).collect())
                .collect())
        }
        SpaceModel::Stratified(_) => Err(AbseqError::Unsupported(
            "strata-only models carry no sequence".into(),
        )),
    }
}

/// Verdict of a verification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ExactUpToD,
    FailsAt {
        position: usize,
        degree: i64,
        witness: Witness,
    },
    Inapplicable {
        reason: String,
    },
}

/// Explicit slice matrices of the first failure, for independent
/// re-checking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub homology: FgModule,
    pub cycle_generators: Vec<Vec<String>>,
    pub boundary_generators: Vec<Vec<String>>,
}

/// The state of the theorem hypotheses for the requested kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesesReport {
    pub conditions: ConditionReport,
    pub checkers_agree: bool,
    pub freeness: Option<FreenessReport>,
    pub cohen_macaulay: Option<bool>,
    pub cm_certificate: String,
    /// Some(true): all hypotheses hold. Some(false): one fails.
    /// None: not decidable (unknown Cohen-Macaulay certificate).
    pub satisfied: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionReport {
    pub position: usize,
    pub term: String,
    /// (degree, homology) for every degree with nonzero homology.
    pub nonzero: Vec<(i64, FgModule)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub kind: SequenceKind,
    pub ring: String,
    pub max_degree: i64,
    pub start_level: usize,
    pub verdict: Verdict,
    pub hypotheses: HypothesesReport,
    pub positions: Vec<PositionReport>,
    pub presentation_stable: bool,
}

impl ExactnessReport {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::ExactUpToD => 0,
            Verdict::FailsAt { .. } => 2,
            Verdict::Inapplicable { .. } => 3,
        }
    }
}

/// Assemble, check hypotheses, and verify exactness degreewise up to the
/// bound. A failure under satisfied hypotheses is an engine contradiction
/// and surfaces as a hard error.
pub fn verify(
    model: &SpaceModel,
    ring: &CoefficientRing,
    kind: SequenceKind,
    max_degree: i64,
) -> Result<ExactnessReport, AbseqError> {
    let n = model.torus_rank();
    let condition_level = match kind {
        SequenceKind::AtiyahBredonFull | SequenceKind::GoertschesToeben => n as i64,
        SequenceKind::ChangSkjelbred => 1,
        SequenceKind::AtiyahBredonTruncated(t) => t as i64,
    };
    let strata = model.strata()?;
    let conditions = check_conditions(&strata, ring, condition_level)?;
    let algebraic = check_conditions_algebraic(&strata, ring, condition_level)?;
    let checkers_agree = conditions == algebraic;
    if !checkers_agree {
        return Err(AbseqError::CheckerMismatch);
    }

    let assembled = assemble(model, ring, kind, max_degree)?;
    assembled
        .complex
        .validate()
        .map_err(|e| match e {
            GrmodError::NotAComplex(p) => AbseqError::SignModel(format!("at position {p}")),
            other => AbseqError::Grmod(other),
        })?;

    // hypotheses beyond the skeleton conditions
    let module = &assembled.cohomology.module;
    let (freeness, cohen_macaulay, cm_certificate) = match kind {
        SequenceKind::GoertschesToeben => {
            if ring.is_field() {
                match is_cohen_macaulay(module, max_degree) {
                    Ok(rep) => {
                        let cm = rep.is_cm;
                        (None, cm, rep.certificate)
                    }
                    Err(GrmodError::ZeroModule) => {
                        (None, Some(true), "zero module".to_string())
                    }
                    Err(e) => return Err(e.into()),
                }
            } else if let Some(dims) = &assembled.cohomology.shape_dims {
                let all_equal = dims.windows(2).all(|w| w[0] == w[1]);
                (
                    None,
                    Some(all_equal),
                    format!(
                        "closed form: direct sum of classifying modules of dimensions {dims:?}"
                    ),
                )
            } else {
                let rep = is_free(module, max_degree)?;
                if rep.free {
                    (
                        Some(rep),
                        Some(true),
                        "free over the base ring, hence Cohen-Macaulay of maximal dimension"
                            .to_string(),
                    )
                } else {
                    (
                        Some(rep),
                        None,
                        "no Cohen-Macaulay certificate over this ring".to_string(),
                    )
                }
            }
        }
        _ => {
            let rep = is_free(module, max_degree)?;
            let free = rep.free;
            (
                Some(rep),
                None,
                if free {
                    "freeness hypothesis".to_string()
                } else {
                    "freeness hypothesis fails".to_string()
                },
            )
        }
    };

    let freeness_ok = match kind {
        SequenceKind::GoertschesToeben => None,
        _ => freeness.as_ref().map(|f| f.free),
    };
    let satisfied = {
        let mut known_false = !conditions.holds;
        let mut unknown = false;
        if let Some(ok) = freeness_ok {
            known_false |= !ok;
        }
        if kind == SequenceKind::GoertschesToeben {
            match cohen_macaulay {
                Some(false) => known_false = true,
                Some(true) => {}
                None => unknown = true,
            }
        }
        if known_false {
            Some(false)
        } else if unknown {
            None
        } else {
            Some(true)
        }
    };

    // degreewise homology at every checked position, in parallel
    let results: Vec<Result<Vec<crate::grmod::HomologySlice>, GrmodError>> = assembled
        .check_positions
        .par_iter()
        .map(|&p| assembled.complex.homology_at(p, max_degree))
        .collect();
    let mut positions = Vec::new();
    let mut first_failure: Option<(usize, crate::grmod::HomologySlice)> = None;
    for (idx, res) in results.into_iter().enumerate() {
        let p = assembled.check_positions[idx];
        let slices = res?;
        let nonzero: Vec<(i64, FgModule)> = slices
            .iter()
            .filter(|s| !s.homology.is_zero())
            .map(|s| (s.degree, s.homology.clone()))
            .collect();
        if first_failure.is_none() {
            if let Some(s) = slices.iter().find(|s| !s.homology.is_zero()) {
                first_failure = Some((p, s.clone()));
            }
        }
        positions.push(PositionReport {
            position: p,
            term: assembled.complex.terms[p].to_string(),
            nonzero,
        });
    }

    let hypotheses = HypothesesReport {
        conditions,
        checkers_agree,
        freeness,
        cohen_macaulay,
        cm_certificate,
        satisfied,
    };

    let verdict = match (first_failure, hypotheses.satisfied) {
        (None, Some(false)) => Verdict::Inapplicable {
            reason: "hypotheses violated; no exactness failure up to the bound".into(),
        },
        (None, _) => Verdict::ExactUpToD,
        (Some((p, s)), Some(true)) => {
            return Err(AbseqError::EngineContradiction(format!(
                "position {p} degree {} has homology {}",
                s.degree, s.homology
            )));
        }
        (Some((p, s)), _) => Verdict::FailsAt {
            position: p,
            degree: s.degree,
            witness: Witness {
                homology: s.homology.clone(),
                cycle_generators: s.cycles.to_string_rows(),
                boundary_generators: s.boundaries.to_string_rows(),
            },
        },
    };

    Ok(ExactnessReport {
        kind,
        ring: ring.to_string(),
        max_degree,
        start_level: assembled.start_level,
        verdict,
        hypotheses,
        positions,
        presentation_stable: assembled.cohomology.stable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::ring::make_ring;

    #[test]
    fn p1_full_sequence_exact_over_z() {
        let p1 = catalog::model("P1").unwrap();
        let z = make_ring("Z").unwrap();
        let report = verify(&p1, &z, SequenceKind::AtiyahBredonFull, 14).unwrap();
        assert_eq!(report.verdict, Verdict::ExactUpToD);
        assert_eq!(report.hypotheses.satisfied, Some(true));
    }

    #[test]
    fn p2_full_sequence_exact_over_z_and_f2() {
        let p2 = catalog::model("P2").unwrap();
        for ring in ["Z", "Fp:2"] {
            let r = make_ring(ring).unwrap();
            let report = verify(&p2, &r, SequenceKind::AtiyahBredonFull, 12).unwrap();
            assert_eq!(report.verdict, Verdict::ExactUpToD, "ring {ring}");
        }
    }

    #[test]
    fn speed2_sphere_negative_over_f2_positive_over_z() {
        let sphere = catalog::model("SpinningSphere:2").unwrap();
        let f2 = make_ring("Fp:2").unwrap();
        let report = verify(&sphere, &f2, SequenceKind::AtiyahBredonTruncated(0), 8).unwrap();
        match &report.verdict {
            Verdict::FailsAt {
                position, degree, ..
            } => {
                assert_eq!(*position, 0);
                assert_eq!(*degree, 2);
            }
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(!report.hypotheses.conditions.holds);

        let z = make_ring("Z").unwrap();
        let report = verify(&sphere, &z, SequenceKind::AtiyahBredonFull, 8).unwrap();
        assert_eq!(report.verdict, Verdict::ExactUpToD);
        assert!(report.hypotheses.conditions.holds);
    }

    #[test]
    fn goertsches_toeben_for_free_circle_times_p1() {
        let m = catalog::model("FreeCircleTimes:P1").unwrap();
        for ring in ["Z", "Q"] {
            let r = make_ring(ring).unwrap();
            let report = verify(&m, &r, SequenceKind::GoertschesToeben, 12).unwrap();
            assert_eq!(report.verdict, Verdict::ExactUpToD, "ring {ring}");
            assert_eq!(report.start_level, 1);
        }
    }

    #[test]
    fn truncated_passes_when_full_passes() {
        let p2 = catalog::model("P2").unwrap();
        let z = make_ring("Z").unwrap();
        for k in 0..=2 {
            let report = verify(&p2, &z, SequenceKind::AtiyahBredonTruncated(k), 10).unwrap();
            assert_eq!(report.verdict, Verdict::ExactUpToD, "k = {k}");
        }
        let cs = verify(&p2, &z, SequenceKind::ChangSkjelbred, 10).unwrap();
        assert_eq!(cs.verdict, Verdict::ExactUpToD);
    }
}
