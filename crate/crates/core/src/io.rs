//! External file formats: strata files, fan files, moment-graph files,
//! module files, and the tagged space format that round-trips every
//! catalog model.

use serde::{Deserialize, Serialize};

use crate::grmod::GradedModule;
use crate::lattice::{ClosedSubgroup, IntMatrix, StratumDescriptor};
use crate::poly::Polynomial;
use crate::ring::{make_ring, PolynomialRingContext};
use crate::spaces::gkm::GkmEdgeFile;
use crate::spaces::{
    FanModel, GkmEdge, GkmModel, SingleOrbitModel, SpaceError, SpaceFile, SpaceModel,
};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("ring error: {0}")]
    Ring(#[from] crate::ring::RingError),
    #[error("lattice error: {0}")]
    Lattice(#[from] crate::lattice::LatticeError),
    #[error("module error: {0}")]
    Grmod(#[from] crate::grmod::GrmodError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StratumFileEntry {
    pub name: String,
    pub character_matrix: Vec<Vec<i64>>,
    pub orbit_dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrataFile {
    pub n: usize,
    pub strata: Vec<StratumFileEntry>,
}

pub fn parse_strata(json: &str) -> Result<Vec<StratumDescriptor>, IoError> {
    let file: StrataFile =
        serde_json::from_str(json).map_err(|e| IoError::Parse(e.to_string()))?;
    let mut out = Vec::new();
    for entry in file.strata {
        let iso = ClosedSubgroup::new(file.n, IntMatrix::from_i64_rows(&entry.character_matrix))?;
        out.push(StratumDescriptor::new(entry.name, iso, entry.orbit_dim)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
struct FanFilePlain {
    n: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
struct GkmFilePlain {
    n: usize,
    vertices: Vec<String>,
    edges: Vec<GkmEdgeFile>,
}

/// Parse a space description: the tagged format, a plain fan file, or a
/// plain moment-graph file.
pub fn parse_space(json: &str) -> Result<SpaceModel, IoError> {
    if let Ok(tagged) = serde_json::from_str::<SpaceFile>(json) {
        return space_from_file(tagged);
    }
    if let Ok(fan) = serde_json::from_str::<FanFilePlain>(json) {
        return Ok(SpaceModel::Fan(FanModel::new(fan.n, fan.rays, fan.cones)?));
    }
    if let Ok(gkm) = serde_json::from_str::<GkmFilePlain>(json) {
        return Ok(SpaceModel::Gkm(gkm_from_parts(
            gkm.n,
            gkm.vertices,
            gkm.edges,
        )?));
    }
    Err(IoError::Parse(
        "not a recognizable space description (fan, moment graph, or tagged model)".into(),
    ))
}

fn gkm_from_parts(
    n: usize,
    vertices: Vec<String>,
    edges: Vec<GkmEdgeFile>,
) -> Result<GkmModel, IoError> {
    let index = |name: &str| -> Result<usize, IoError> {
        vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| IoError::Parse(format!("unknown vertex `{name}`")))
    };
    let mut out_edges = Vec::new();
    for e in edges {
        out_edges.push(GkmEdge {
            v: index(&e.v)?,
            w: index(&e.w)?,
            label: e.label,
        });
    }
    Ok(GkmModel::new(n, vertices, out_edges)?)
}

pub fn space_from_file(file: SpaceFile) -> Result<SpaceModel, IoError> {
    match file {
        SpaceFile::Fan { n, rays, cones } => {
            Ok(SpaceModel::Fan(FanModel::new(n, rays, cones)?))
        }
        SpaceFile::Gkm { n, vertices, edges } => {
            Ok(SpaceModel::Gkm(gkm_from_parts(n, vertices, edges)?))
        }
        SpaceFile::SingleOrbit {
            n,
            character_matrix,
        } => Ok(SpaceModel::SingleOrbit(SingleOrbitModel {
            torus_rank: n,
            isotropy: ClosedSubgroup::new(n, IntMatrix::from_i64_rows(&character_matrix))?,
        })),
        SpaceFile::DisjointUnion { parts } => Ok(SpaceModel::DisjointUnion(
            parts
                .into_iter()
                .map(space_from_file)
                .collect::<Result<_, _>>()?,
        )),
        SpaceFile::FreeCircleProduct { base } => Ok(SpaceModel::FreeCircleProduct(Box::new(
            space_from_file(*base)?,
        ))),
    }
}

pub fn space_to_file(model: &SpaceModel) -> Result<SpaceFile, IoError> {
    match model {
        SpaceModel::Fan(f) => Ok(SpaceFile::Fan {
            n: f.torus_rank,
            rays: f.rays.clone(),
            cones: f.max_cones.clone(),
        }),
        SpaceModel::Gkm(g) => Ok(SpaceFile::Gkm {
            n: g.torus_rank,
            vertices: g.vertices.clone(),
            edges: g
                .edges
                .iter()
                .map(|e| GkmEdgeFile {
                    v: g.vertices[e.v].clone(),
                    w: g.vertices[e.w].clone(),
                    label: e.label.clone(),
                })
                .collect(),
        }),
        SpaceModel::SingleOrbit(s) => {
            let m = &s.isotropy.character_matrix;
            let rows = (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| crate::spaces::bigint_to_i64(m.get(i, j)))
                        .collect()
                })
                .collect();
            Ok(SpaceFile::SingleOrbit {
                n: s.torus_rank,
                character_matrix: rows,
            })
        }
        SpaceModel::DisjointUnion(parts) => Ok(SpaceFile::DisjointUnion {
            parts: parts
                .iter()
                .map(space_to_file)
                .collect::<Result<_, _>>()?,
        }),
        SpaceModel::FreeCircleProduct(base) => Ok(SpaceFile::FreeCircleProduct {
            base: Box::new(space_to_file(base)?),
        }),
        SpaceModel::Stratified(_) => Err(IoError::Parse(
            "strata-only skeleton models have no file form".into(),
        )),
    }
}

/// A relation in a module file: either a single component or a list of
/// components, each assigning a polynomial to a target generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationFileEntry {
    Single(RelationComponent),
    Many(Vec<RelationComponent>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationComponent {
    pub target: usize,
    pub poly: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleFile {
    pub n: usize,
    pub ring: String,
    pub generators: Vec<i64>,
    #[serde(default)]
    pub relations: Vec<RelationFileEntry>,
}

pub fn parse_module(json: &str) -> Result<GradedModule, IoError> {
    let file: ModuleFile =
        serde_json::from_str(json).map_err(|e| IoError::Parse(e.to_string()))?;
    let ring = make_ring(&file.ring)?;
    let ctx = PolynomialRingContext::new(file.n, ring);
    let mut module = GradedModule::free(ctx, file.generators.clone());
    for rel in file.relations {
        let comps = match rel {
            RelationFileEntry::Single(c) => vec![c],
            RelationFileEntry::Many(cs) => cs,
        };
        let mut entries = vec![Polynomial::zero(file.n); file.generators.len()];
        for c in comps {
            if c.target >= file.generators.len() {
                return Err(IoError::Parse(format!(
                    "relation targets generator {} of {}",
                    c.target,
                    file.generators.len()
                )));
            }
            let p = Polynomial::parse(file.n, &c.poly)
                .map_err(|e| IoError::Parse(e.to_string()))?;
            entries[c.target] = entries[c.target].add(&p);
        }
        module.push_relation(entries)?;
    }
    Ok(module)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_plain_fan_file() {
        let json = r#"{"n":2, "rays":[[1,0],[0,1],[-1,-1]], "cones":[[0,1],[1,2],[0,2]]}"#;
        let model = parse_space(json).unwrap();
        assert_eq!(model.torus_rank(), 2);
        assert_eq!(model.strata().unwrap().len(), 7);
    }

    #[test]
    fn parse_plain_gkm_file() {
        let json = r#"{"n":1, "vertices":["N","S"], "edges":[{"v":"N","w":"S","label":[2]}]}"#;
        let model = parse_space(json).unwrap();
        assert_eq!(model.strata().unwrap().len(), 3);
    }

    #[test]
    fn parse_strata_file() {
        let json = r#"{"n": 2, "strata": [{"name": "tw", "character_matrix": [[2,0],[0,2]], "orbit_dim": 2}]}"#;
        let strata = parse_strata(json).unwrap();
        assert_eq!(strata.len(), 1);
        assert_eq!(strata[0].orbit_dim, 2);
    }

    #[test]
    fn module_file_round_trip() {
        let json = r#"{"n":1, "ring":"Z", "generators":[0], "relations":[{"target":0,"poly":"2*t1"}]}"#;
        let module = parse_module(json).unwrap();
        let p2 = module.graded_piece(2).unwrap();
        assert_eq!(p2.torsion, vec![2u32.into()]);
    }

    #[test]
    fn space_file_round_trips_catalog() {
        for name in ["P1", "P2", "P1xP1", "Hirzebruch:2", "SpinningSphere:2", "FreeCircleTimes:P1"] {
            let model = crate::catalog::model(name).unwrap();
            let file = space_to_file(&model).unwrap();
            let json = serde_json::to_string(&file).unwrap();
            let back = parse_space(&json).unwrap();
            assert_eq!(back.strata().unwrap(), model.strata().unwrap(), "{name}");
        }
    }
}
