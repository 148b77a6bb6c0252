//! Degreewise comparison of the two images inside the fixed-point module:
//! the restriction image of the full space against the restriction image
//! of the one-skeleton (the equalizer of the moment graph).

use serde::{Deserialize, Serialize};

use super::AbseqError;
use crate::ring::CoefficientRing;
use crate::slices;
use crate::spaces::{equivariant_cohomology, GkmModel, SpaceError, SpaceModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CsVerdict {
    Equal,
    Differs {
        degree: i64,
        space_image_rank: usize,
        one_skeleton_image_rank: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsReport {
    pub ring: String,
    pub max_degree: i64,
    pub verdict: CsVerdict,
    /// Rank of the common image per degree (up to the first discrepancy).
    pub image_ranks: Vec<usize>,
}

impl CsReport {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            CsVerdict::Equal => 0,
            CsVerdict::Differs { .. } => 2,
        }
    }
}

/// Compare image(H_T(X) -> H_T(X_0)) with image(H_T(X_1) -> H_T(X_0))
/// degree by degree, as submodules of the fixed-point slice.
pub fn cs_compare(
    model: &SpaceModel,
    ring: &CoefficientRing,
    max_degree: i64,
) -> Result<CsReport, AbseqError> {
    let graph: GkmModel = match model {
        SpaceModel::Fan(f) => f.derived_moment_graph()?,
        SpaceModel::Gkm(g) => g.clone(),
        _ => {
            return Err(AbseqError::Space(SpaceError::UnsupportedModelRing(
                "the one-skeleton comparison needs a fan or moment-graph model".into(),
            )))
        }
    };
    let data = equivariant_cohomology(model, ring, max_degree)?;
    let mut image_ranks = Vec::new();
    for d in 0..=max_degree {
        let space_image = data.restriction.slice(d);
        let skeleton_image = graph.equalizer_gens(ring, d)?;
        if !slices::span_eq(ring, &space_image, &skeleton_image)
            .map_err(crate::grmod::GrmodError::from)?
        {
            return Ok(CsReport {
                ring: ring.to_string(),
                max_degree,
                verdict: CsVerdict::Differs {
                    degree: d,
                    space_image_rank: slices::rank(ring, &space_image)
                        .map_err(crate::grmod::GrmodError::from)?,
                    one_skeleton_image_rank: slices::rank(ring, &skeleton_image)
                        .map_err(crate::grmod::GrmodError::from)?,
                },
                image_ranks,
            });
        }
        image_ranks.push(
            slices::rank(ring, &skeleton_image).map_err(crate::grmod::GrmodError::from)?,
        );
    }
    Ok(CsReport {
        ring: ring.to_string(),
        max_degree,
        verdict: CsVerdict::Equal,
        image_ranks,
    })
}
