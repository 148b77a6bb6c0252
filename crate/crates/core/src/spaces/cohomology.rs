//! Equivariant cohomology and relative skeleton terms for each model
//! class, packaged with the restriction map to the minimal-orbit skeleton
//! term that the sequence assemblers consume.

use std::sync::Arc;

use crate::grmod::discover::discover_presentation;
use crate::grmod::{GradedMap, GradedModule};
use crate::lattice::{decompose_subgroup, dim_classifying, present_classifying_cohomology};
use crate::poly::Polynomial;
use crate::ring::{CoefficientRing, PolynomialRingContext};

use super::{SpaceError, SpaceModel};

/// H_T(X) with its restriction to the minimal-skeleton term.
#[derive(Debug, Clone)]
pub struct CohomologyData {
    pub module: Arc<GradedModule>,
    /// H_T(X_k) for k the minimal orbit dimension: the target of the first
    /// map of every sequence.
    pub skeleton_term: Arc<GradedModule>,
    pub restriction: GradedMap,
    /// Presentation discovery saw no new generators or relations in the
    /// trailing window.
    pub stable: bool,
    /// When H_T(X) is structurally a direct sum of shifted classifying
    /// modules of closed subgroups: their classifying dimensions (the
    /// closed-form Cohen-Macaulay certificate over non-field rings).
    pub shape_dims: Option<Vec<usize>>,
}

/// Working bound for presentation discovery: must certify at least up to
/// the requested degree plus the stability window.
fn discovery_bound(max_degree: i64, torus_rank: usize) -> i64 {
    max_degree + torus_rank as i64 + 2
}

/// Equivariant cohomology of a supported model, as a finitely presented
/// module plus restriction data.
pub fn equivariant_cohomology(
    model: &SpaceModel,
    ring: &CoefficientRing,
    max_degree: i64,
) -> Result<CohomologyData, SpaceError> {
    model.validate()?;
    match model {
        SpaceModel::Fan(fan) => {
            if !fan.is_complete() {
                return Err(SpaceError::UnsupportedModelRing(
                    "equivariant cohomology needs a complete fan".into(),
                ));
            }
            for cone in fan.maximal_cones() {
                let m = fan.multiplicity(cone);
                if !ring.is_invertible_int(m.magnitude()) {
                    return Err(SpaceError::UnsupportedModelRing(format!(
                        "cone {cone:?} has multiplicity {m}, not invertible in {ring}"
                    )));
                }
            }
            let bound = discovery_bound(max_degree, fan.torus_rank);
            let real = fan.sr_realization(ring, bound)?;
            let window = fan.torus_rank as i64 + 2;
            let found = discover_presentation(&real, window)?;
            let module = Arc::new(found.module);
            let skeleton_term = Arc::new(fan.relative_module(0, ring)?);
            // restriction matrix: per maximal cone, restrict each generator
            let max_cones = fan.maximal_cones();
            let mut matrix =
                vec![vec![Polynomial::zero(fan.torus_rank); module.generator_degrees.len()]; max_cones.len()];
            for (g, lift) in found.generator_lifts.iter().enumerate() {
                let degree = module.generator_degrees[g];
                for (ci, cone) in max_cones.iter().enumerate() {
                    matrix[ci][g] = fan.restrict_to_cone(cone, degree, lift, ring)?;
                }
            }
            let restriction =
                GradedMap::new(Arc::clone(&module), Arc::clone(&skeleton_term), 0, matrix)
                    .map_err(SpaceError::from)?;
            let shape_dims = free_shape(&module, ring);
            Ok(CohomologyData {
                module,
                skeleton_term,
                restriction,
                stable: found.stable,
                shape_dims,
            })
        }
        SpaceModel::Gkm(gkm) => {
            let bound = discovery_bound(max_degree, gkm.torus_rank);
            let (real, kernel_bases) = gkm.mv_realization(ring, bound)?;
            let window = gkm.torus_rank as i64 + 2;
            let found = discover_presentation(&real, window)?;
            let module = Arc::new(found.module);
            let skeleton_term = Arc::new(gkm.vertex_term(ring));
            let mut matrix = vec![
                vec![Polynomial::zero(gkm.torus_rank); module.generator_degrees.len()];
                gkm.vertices.len()
            ];
            for (g, lift) in found.generator_lifts.iter().enumerate() {
                let degree = module.generator_degrees[g];
                let kernel = &kernel_bases[degree as usize];
                // ambient vector in the vertex sum: kernel part of the lift
                let ker_coords = &lift[..kernel.cols()];
                let ambient = kernel.mul(&crate::slices::RMatrix::from_columns(
                    kernel.cols(),
                    vec![ker_coords.to_vec()],
                ));
                let entries =
                    skeleton_term.vector_to_entries(degree, &ambient.column(0));
                for (vi, e) in entries.into_iter().enumerate() {
                    matrix[vi][g] = e;
                }
            }
            let restriction =
                GradedMap::new(Arc::clone(&module), Arc::clone(&skeleton_term), 0, matrix)
                    .map_err(SpaceError::from)?;
            let shape_dims = free_shape(&module, ring);
            Ok(CohomologyData {
                module,
                skeleton_term,
                restriction,
                stable: found.stable,
                shape_dims,
            })
        }
        SpaceModel::SingleOrbit(orbit) => {
            let ctx = PolynomialRingContext::new(orbit.torus_rank, ring.clone());
            let module = Arc::new(present_classifying_cohomology(&orbit.isotropy, &ctx));
            let identity: Vec<Vec<Polynomial>> = (0..module.generator_degrees.len())
                .map(|i| {
                    (0..module.generator_degrees.len())
                        .map(|j| {
                            if i == j {
                                Polynomial::integer(ctx.torus_rank, 1)
                            } else {
                                Polynomial::zero(ctx.torus_rank)
                            }
                        })
                        .collect()
                })
                .collect();
            let restriction =
                GradedMap::new(Arc::clone(&module), Arc::clone(&module), 0, identity)
                    .map_err(SpaceError::from)?;
            Ok(CohomologyData {
                module: Arc::clone(&module),
                skeleton_term: module,
                restriction,
                stable: true,
                shape_dims: Some(vec![dim_classifying(&orbit.isotropy, ring)]),
            })
        }
        SpaceModel::DisjointUnion(parts) => {
            if parts.is_empty() {
                return Err(SpaceError::EmptySpace);
            }
            let datas: Vec<CohomologyData> = parts
                .iter()
                .map(|p| equivariant_cohomology(p, ring, max_degree))
                .collect::<Result<_, _>>()?;
            let module = Arc::new(GradedModule::direct_sum(
                &datas.iter().map(|d| (*d.module).clone()).collect::<Vec<_>>(),
            ));
            let skeleton_term = Arc::new(GradedModule::direct_sum(
                &datas
                    .iter()
                    .map(|d| (*d.skeleton_term).clone())
                    .collect::<Vec<_>>(),
            ));
            let rows = skeleton_term.generator_degrees.len();
            let cols = module.generator_degrees.len();
            let n = module.ctx.torus_rank;
            let mut matrix = vec![vec![Polynomial::zero(n); cols]; rows];
            let mut row_off = 0;
            let mut col_off = 0;
            for d in &datas {
                for (i, row) in d.restriction.matrix.iter().enumerate() {
                    for (j, p) in row.iter().enumerate() {
                        matrix[row_off + i][col_off + j] = p.clone();
                    }
                }
                row_off += d.skeleton_term.generator_degrees.len();
                col_off += d.module.generator_degrees.len();
            }
            let restriction =
                GradedMap::new(Arc::clone(&module), Arc::clone(&skeleton_term), 0, matrix)
                    .map_err(SpaceError::from)?;
            let shape_dims = datas
                .iter()
                .map(|d| d.shape_dims.clone())
                .collect::<Option<Vec<_>>>()
                .map(|v| v.into_iter().flatten().collect());
            Ok(CohomologyData {
                module,
                skeleton_term,
                restriction,
                stable: datas.iter().all(|d| d.stable),
                shape_dims,
            })
        }
        SpaceModel::FreeCircleProduct(base) => {
            let base_data = equivariant_cohomology(base, ring, max_degree)?;
            let module = Arc::new(inflate_module(&base_data.module));
            let skeleton_term = Arc::new(inflate_module(&base_data.skeleton_term));
            let matrix: Vec<Vec<Polynomial>> = base_data
                .restriction
                .matrix
                .iter()
                .map(|row| row.iter().map(inflate_polynomial).collect())
                .collect();
            let restriction =
                GradedMap::new(Arc::clone(&module), Arc::clone(&skeleton_term), 0, matrix)
                    .map_err(SpaceError::from)?;
            Ok(CohomologyData {
                module,
                skeleton_term,
                restriction,
                stable: base_data.stable,
                shape_dims: base_data.shape_dims,
            })
        }
        SpaceModel::Stratified(_) => Err(SpaceError::UnsupportedModelRing(
            "strata-only skeleton models carry no cohomology".into(),
        )),
    }
}

/// The relative term H_T(X_i, X_{i-1}) for supported models.
pub fn relative_term(
    model: &SpaceModel,
    level: usize,
    ring: &CoefficientRing,
) -> Result<GradedModule, SpaceError> {
    model.validate()?;
    let n = model.torus_rank();
    let ctx = PolynomialRingContext::new(n, ring.clone());
    if level > n {
        return Err(SpaceError::IndexOutOfRange(level as i64, n));
    }
    match model {
        SpaceModel::Fan(fan) => {
            if !fan.is_complete() {
                return Err(SpaceError::UnsupportedModelRing(
                    "relative terms need a complete fan".into(),
                ));
            }
            for cone in fan.maximal_cones() {
                let m = fan.multiplicity(cone);
                if !ring.is_invertible_int(m.magnitude()) {
                    return Err(SpaceError::UnsupportedModelRing(format!(
                        "cone {cone:?} has multiplicity {m}, not invertible in {ring}"
                    )));
                }
            }
            fan.relative_module(level, ring)
        }
        SpaceModel::Gkm(gkm) => match level {
            0 => Ok(gkm.vertex_term(ring)),
            1 => Ok(gkm.relative_module(ring)?.0),
            _ => Ok(GradedModule::zero(ctx)),
        },
        SpaceModel::SingleOrbit(orbit) => {
            let dec = decompose_subgroup(&orbit.isotropy);
            let o = orbit.torus_rank - dec.torus_rank;
            if level == o {
                Ok(present_classifying_cohomology(&orbit.isotropy, &ctx))
            } else {
                Ok(GradedModule::zero(ctx))
            }
        }
        SpaceModel::DisjointUnion(parts) => {
            if parts.is_empty() {
                return Err(SpaceError::EmptySpace);
            }
            let mods: Vec<GradedModule> = parts
                .iter()
                .map(|p| relative_term(p, level, ring))
                .collect::<Result<_, _>>()?;
            Ok(GradedModule::direct_sum(&mods))
        }
        SpaceModel::FreeCircleProduct(base) => {
            if level == 0 {
                return Ok(GradedModule::zero(ctx));
            }
            let inner = relative_term(base, level - 1, ring)?;
            Ok(inflate_module(&inner))
        }
        SpaceModel::Stratified(_) => Err(SpaceError::UnsupportedModelRing(
            "strata-only skeleton models carry no cohomology".into(),
        )),
    }
}

/// A free module is a sum of shifted copies of the classifying module of
/// the full torus; record the corresponding dimensions.
fn free_shape(module: &GradedModule, ring: &CoefficientRing) -> Option<Vec<usize>> {
    if module.relations.is_empty() {
        Some(vec![
            ring.base_dimension() + module.ctx.torus_rank;
            module.generator_degrees.len()
        ])
    } else {
        None
    }
}

/// Inflate a module along A -> A/(t_1): one extra first variable that
/// annihilates every generator.
pub fn inflate_module(module: &GradedModule) -> GradedModule {
    let n = module.ctx.torus_rank + 1;
    let ctx = PolynomialRingContext::new(n, module.ctx.ring.clone());
    let mut out = GradedModule::free(ctx, module.generator_degrees.clone());
    for rel in &module.relations {
        let entries: Vec<Polynomial> = rel.entries.iter().map(inflate_polynomial).collect();
        out.push_relation(entries).expect("inflated relation stays homogeneous");
    }
    for i in 0..module.generator_degrees.len() {
        let mut entries = vec![Polynomial::zero(n); module.generator_degrees.len()];
        entries[i] = Polynomial::variable(n, 0);
        out.push_relation(entries).expect("t1 relation is homogeneous");
    }
    out
}

/// Shift variables up by one: t_j becomes t_{j+1}.
pub fn inflate_polynomial(p: &Polynomial) -> Polynomial {
    let n = p.vars() + 1;
    let images: Vec<Polynomial> = (0..p.vars())
        .map(|j| Polynomial::variable(n, j + 1))
        .collect();
    p.substitute(&images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::grmod::resolution::is_free;
    use crate::ring::{make_ring, FgModule};

    #[test]
    fn p1_cohomology_is_free_of_rank_two() {
        let p1 = catalog::model("P1").unwrap();
        let z = make_ring("Z").unwrap();
        let data = equivariant_cohomology(&p1, &z, 12).unwrap();
        assert!(data.stable);
        // Hilbert ranks 1, 2, 2, ...
        assert_eq!(data.module.graded_piece(0).unwrap(), FgModule::free(1));
        assert_eq!(data.module.graded_piece(2).unwrap(), FgModule::free(2));
        assert_eq!(data.module.graded_piece(4).unwrap(), FgModule::free(2));
        let rep = is_free(&data.module, 12).unwrap();
        assert!(rep.free);
        assert_eq!(rep.generator_degrees, vec![0, 2]);
        data.restriction.validate().unwrap();
    }

    #[test]
    fn single_orbit_z2_in_circle() {
        let model = SpaceModel::SingleOrbit(super::super::SingleOrbitModel {
            torus_rank: 1,
            isotropy: crate::lattice::ClosedSubgroup::from_i64_rows(1, &[vec![2]]).unwrap(),
        });
        let z = make_ring("Z").unwrap();
        let data = equivariant_cohomology(&model, &z, 8).unwrap();
        let p2 = data.module.graded_piece(2).unwrap();
        assert_eq!(p2.torsion, vec![2u32.into()]);
        assert_eq!(data.shape_dims, Some(vec![1]));
    }

    #[test]
    fn free_circle_times_p1() {
        let m = catalog::model("FreeCircleTimes:P1").unwrap();
        let q = make_ring("Q").unwrap();
        let data = equivariant_cohomology(&m, &q, 10).unwrap();
        // inflated H_T(P1): ranks 1, 2, 2, ... but now over two variables
        // with t1 acting as zero
        assert_eq!(data.module.ctx.torus_rank, 2);
        assert_eq!(data.module.graded_piece(0).unwrap().free_rank, 1);
        assert_eq!(data.module.graded_piece(2).unwrap().free_rank, 2);
        assert_eq!(data.module.graded_piece(4).unwrap().free_rank, 2);
        data.restriction.validate().unwrap();
    }

    #[test]
    fn p2_relative_terms() {
        let p2 = catalog::model("P2").unwrap();
        let q = make_ring("Q").unwrap();
        let SpaceModel::Fan(_) = &p2 else { panic!() };
        // level 0: A^3; level 1: three classifying lines shifted by 1
        let t0 = relative_term(&p2, 0, &q).unwrap();
        assert_eq!(t0.graded_piece(0).unwrap().free_rank, 3);
        let t1 = relative_term(&p2, 1, &q).unwrap();
        assert_eq!(t1.graded_piece(1).unwrap().free_rank, 3);
        assert_eq!(t1.graded_piece(3).unwrap().free_rank, 3);
    }
}
