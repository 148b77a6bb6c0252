//! Combinatorial torus-space models: complete simplicial fans, one-skeleton
//! sphere assemblies (moment graphs), single orbits, disjoint unions, and
//! products with a freely acting circle. Each model knows its orbit-type
//! strata, skeleton filtration, and how to build the graded modules of its
//! equivariant cohomology and relative skeleton pairs.

pub mod cohomology;
pub mod fan;
pub mod gkm;

use serde::{Deserialize, Serialize};

use crate::lattice::{ClosedSubgroup, LatticeError, StratumDescriptor};
use crate::ring::CoefficientRing;

pub use cohomology::{equivariant_cohomology, relative_term, CohomologyData};
pub use fan::FanModel;
pub use gkm::{GkmEdge, GkmModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model/ring combination not supported: {0}")]
    UnsupportedModelRing(String),
    #[error("skeleton index {0} out of range -1..={1}")]
    IndexOutOfRange(i64, usize),
    #[error("the space is empty")]
    EmptySpace,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("module construction failed: {0}")]
    Grmod(String),
}

impl From<crate::grmod::GrmodError> for SpaceError {
    fn from(e: crate::grmod::GrmodError) -> Self {
        SpaceError::Grmod(e.to_string())
    }
}

/// A single orbit T/T'.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleOrbitModel {
    pub torus_rank: usize,
    pub isotropy: ClosedSubgroup,
}

/// Strata-only model (used for intermediate skeleta).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratifiedModel {
    pub torus_rank: usize,
    pub strata: Vec<StratumDescriptor>,
}

/// A combinatorial T-space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceModel {
    Fan(FanModel),
    Gkm(GkmModel),
    SingleOrbit(SingleOrbitModel),
    DisjointUnion(Vec<SpaceModel>),
    /// S^1 x base, the extra first circle coordinate acting freely.
    FreeCircleProduct(Box<SpaceModel>),
    Stratified(StratifiedModel),
}

/// Serializable model description (external interface).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SpaceFile {
    Fan {
        n: usize,
        rays: Vec<Vec<i64>>,
        cones: Vec<Vec<usize>>,
    },
    Gkm {
        n: usize,
        vertices: Vec<String>,
        edges: Vec<gkm::GkmEdgeFile>,
    },
    SingleOrbit {
        n: usize,
        character_matrix: Vec<Vec<i64>>,
    },
    DisjointUnion {
        parts: Vec<SpaceFile>,
    },
    FreeCircleProduct {
        base: Box<SpaceFile>,
    },
}

impl SpaceModel {
    pub fn torus_rank(&self) -> usize {
        match self {
            SpaceModel::Fan(f) => f.torus_rank,
            SpaceModel::Gkm(g) => g.torus_rank,
            SpaceModel::SingleOrbit(s) => s.torus_rank,
            SpaceModel::DisjointUnion(parts) => {
                parts.first().map(|p| p.torus_rank()).unwrap_or(0)
            }
            SpaceModel::FreeCircleProduct(base) => base.torus_rank() + 1,
            SpaceModel::Stratified(s) => s.torus_rank,
        }
    }

    pub fn validate(&self) -> Result<(), SpaceError> {
        match self {
            SpaceModel::Fan(f) => f.validate(),
            SpaceModel::Gkm(g) => g.validate(),
            SpaceModel::SingleOrbit(s) => {
                if s.isotropy.torus_rank != s.torus_rank {
                    return Err(SpaceError::InvalidModel(
                        "isotropy lives in a different torus".into(),
                    ));
                }
                Ok(())
            }
            SpaceModel::DisjointUnion(parts) => {
                let n = self.torus_rank();
                for p in parts {
                    if p.torus_rank() != n {
                        return Err(SpaceError::InvalidModel(
                            "disjoint union parts have different torus ranks".into(),
                        ));
                    }
                    p.validate()?;
                }
                Ok(())
            }
            SpaceModel::FreeCircleProduct(base) => base.validate(),
            SpaceModel::Stratified(_) => Ok(()),
        }
    }

    /// Orbit-type strata with their isotropy data.
    pub fn strata(&self) -> Result<Vec<StratumDescriptor>, SpaceError> {
        self.validate()?;
        match self {
            SpaceModel::Fan(f) => f.strata(),
            SpaceModel::Gkm(g) => g.strata(),
            SpaceModel::SingleOrbit(s) => {
                let dec = crate::lattice::decompose_subgroup(&s.isotropy);
                Ok(vec![StratumDescriptor::new(
                    "orbit",
                    s.isotropy.clone(),
                    s.torus_rank - dec.torus_rank,
                )?])
            }
            SpaceModel::DisjointUnion(parts) => {
                let mut out = Vec::new();
                for (k, part) in parts.iter().enumerate() {
                    for s in part.strata()? {
                        out.push(StratumDescriptor::new(
                            format!("part{k}.{}", s.name),
                            s.isotropy,
                            s.orbit_dim,
                        )?);
                    }
                }
                Ok(out)
            }
            SpaceModel::FreeCircleProduct(base) => {
                let n = self.torus_rank();
                let mut out = Vec::new();
                for s in base.strata()? {
                    // isotropy 1 x T': kill the first coordinate, then the
                    // base characters on the remaining ones.
                    let mut rows: Vec<Vec<i64>> = vec![first_coordinate_row(n)];
                    for i in 0..s.isotropy.character_matrix.rows() {
                        let mut row = vec![0i64];
                        for j in 0..s.isotropy.character_matrix.cols() {
                            row.push(bigint_to_i64(s.isotropy.character_matrix.get(i, j)));
                        }
                        rows.push(row);
                    }
                    let iso = ClosedSubgroup::from_i64_rows(n, &rows)?;
                    out.push(StratumDescriptor::new(
                        format!("circle.{}", s.name),
                        iso,
                        s.orbit_dim + 1,
                    )?);
                }
                Ok(out)
            }
            SpaceModel::Stratified(s) => Ok(s.strata.clone()),
        }
    }

    /// Minimal dimension of the orbits.
    pub fn min_orbit_dim(&self) -> Result<usize, SpaceError> {
        let strata = self.strata()?;
        strata
            .iter()
            .map(|s| s.orbit_dim)
            .min()
            .ok_or(SpaceError::EmptySpace)
    }

    /// The equivariant i-skeleton as a space model. Fans convert their
    /// zero- and one-skeleta into orbit unions and moment graphs; other
    /// intermediate skeleta are strata-only models.
    pub fn skeleton(&self, level: i64) -> Result<SpaceModel, SpaceError> {
        let n = self.torus_rank() as i64;
        if level < -1 || level > n {
            return Err(SpaceError::IndexOutOfRange(level, n as usize));
        }
        if level < 0 {
            return Ok(SpaceModel::Stratified(StratifiedModel {
                torus_rank: self.torus_rank(),
                strata: Vec::new(),
            }));
        }
        match self {
            SpaceModel::Fan(f) => {
                if level as usize >= f.torus_rank {
                    return Ok(self.clone());
                }
                match level {
                    0 => Ok(SpaceModel::DisjointUnion(
                        f.maximal_cones()
                            .iter()
                            .map(|_| {
                                SpaceModel::SingleOrbit(SingleOrbitModel {
                                    torus_rank: f.torus_rank,
                                    isotropy: ClosedSubgroup::full_torus(f.torus_rank),
                                })
                            })
                            .collect(),
                    )),
                    1 => Ok(SpaceModel::Gkm(f.derived_moment_graph()?)),
                    _ => Ok(SpaceModel::Stratified(StratifiedModel {
                        torus_rank: f.torus_rank,
                        strata: self
                            .strata()?
                            .into_iter()
                            .filter(|s| (s.orbit_dim as i64) <= level)
                            .collect(),
                    })),
                }
            }
            SpaceModel::Gkm(g) => {
                if level == 0 {
                    Ok(SpaceModel::DisjointUnion(
                        g.vertices
                            .iter()
                            .map(|_| {
                                SpaceModel::SingleOrbit(SingleOrbitModel {
                                    torus_rank: g.torus_rank,
                                    isotropy: ClosedSubgroup::full_torus(g.torus_rank),
                                })
                            })
                            .collect(),
                    ))
                } else {
                    Ok(self.clone())
                }
            }
            SpaceModel::SingleOrbit(s) => {
                let o = self.min_orbit_dim()? as i64;
                if level >= o {
                    Ok(self.clone())
                } else {
                    Ok(SpaceModel::Stratified(StratifiedModel {
                        torus_rank: s.torus_rank,
                        strata: Vec::new(),
                    }))
                }
            }
            SpaceModel::DisjointUnion(parts) => Ok(SpaceModel::DisjointUnion(
                parts
                    .iter()
                    .map(|p| p.skeleton(level))
                    .collect::<Result<_, _>>()?,
            )),
            SpaceModel::FreeCircleProduct(base) => {
                if level == 0 {
                    Ok(SpaceModel::Stratified(StratifiedModel {
                        torus_rank: self.torus_rank(),
                        strata: Vec::new(),
                    }))
                } else {
                    Ok(SpaceModel::FreeCircleProduct(Box::new(
                        base.skeleton(level - 1)?,
                    )))
                }
            }
            SpaceModel::Stratified(s) => Ok(SpaceModel::Stratified(StratifiedModel {
                torus_rank: s.torus_rank,
                strata: s
                    .strata
                    .iter()
                    .filter(|st| (st.orbit_dim as i64) <= level)
                    .cloned()
                    .collect(),
            })),
        }
    }

    /// Strata of the (p, i)-skeleton: those whose p-codimension
    /// n - p_rank(isotropy, p) is at most i.
    pub fn p_skeleton(
        &self,
        p: u64,
        level: i64,
    ) -> Result<Vec<StratumDescriptor>, SpaceError> {
        let n = self.torus_rank() as i64;
        if level < -1 || level > n {
            return Err(SpaceError::IndexOutOfRange(level, n as usize));
        }
        let mut out = Vec::new();
        for s in self.strata()? {
            let pr = crate::lattice::p_rank(&s.isotropy, p)? as i64;
            if n - pr <= level {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// Strata of the i-skeleton (orbit dimension at most i).
    pub fn skeleton_strata(&self, level: i64) -> Result<Vec<StratumDescriptor>, SpaceError> {
        Ok(self
            .strata()?
            .into_iter()
            .filter(|s| (s.orbit_dim as i64) <= level)
            .collect())
    }

    /// Condition check over the model's own strata.
    pub fn check_conditions(
        &self,
        ring: &CoefficientRing,
        max_level: i64,
    ) -> Result<crate::lattice::ConditionReport, SpaceError> {
        Ok(crate::lattice::check_conditions(
            &self.strata()?,
            ring,
            max_level,
        )?)
    }
}

fn first_coordinate_row(n: usize) -> Vec<i64> {
    let mut row = vec![0i64; n];
    row[0] = 1;
    row
}

pub(crate) fn bigint_to_i64(v: &num_bigint::BigInt) -> i64 {
    use num_traits::ToPrimitive;
    v.to_i64().expect("entry fits in i64")
}
