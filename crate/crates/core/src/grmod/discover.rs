//! Degreewise presentation discovery.
//!
//! A `SliceRealization` describes a graded module concretely: a free
//! R-module slice in every degree together with the multiplication maps by
//! the polynomial variables. `discover_presentation` extracts minimal
//! generators (a lift of a generating set of M/(A_{>0}M)) and minimal
//! relation columns degree by degree. By construction the presented module
//! reproduces the realization slice-for-slice in every degree up to the
//! bound, so the output is certified on that range; stability over the
//! trailing window is reported, not assumed.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::{GradedModule, GrmodError};
use crate::poly::Monomial;
use crate::ring::PolynomialRingContext;
use crate::slices::{self, RMatrix};

/// A graded module given by free slices and variable-action matrices.
#[derive(Debug, Clone)]
pub struct SliceRealization {
    pub ctx: PolynomialRingContext,
    pub max_degree: i64,
    /// dims[d] = rank of the slice in degree d, 0 <= d <= max_degree.
    pub dims: Vec<usize>,
    /// action[a][d]: dims[d+2] x dims[d] matrix of multiplication by t_{a+1}.
    pub action: Vec<Vec<RMatrix>>,
}

impl SliceRealization {
    pub fn new(ctx: PolynomialRingContext, max_degree: i64, dims: Vec<usize>) -> Self {
        assert_eq!(dims.len() as i64, max_degree + 1);
        let n = ctx.torus_rank;
        let mut action = Vec::with_capacity(n);
        for _ in 0..n {
            let mut per_degree = Vec::new();
            for d in 0..=(max_degree - 2).max(-1) {
                let rows = dims.get((d + 2) as usize).copied().unwrap_or(0);
                let cols = dims[d as usize];
                per_degree.push(RMatrix::zeros(rows, cols));
            }
            action.push(per_degree);
        }
        SliceRealization {
            ctx,
            max_degree,
            dims,
            action,
        }
    }

    pub fn dim(&self, degree: i64) -> usize {
        if degree < 0 || degree > self.max_degree {
            0
        } else {
            self.dims[degree as usize]
        }
    }

    pub fn set_action(&mut self, var: usize, degree: i64, matrix: RMatrix) {
        assert_eq!(matrix.cols(), self.dim(degree));
        assert_eq!(matrix.rows(), self.dim(degree + 2));
        self.action[var][degree as usize] = matrix;
    }

    pub fn action_matrix(&self, var: usize, degree: i64) -> &RMatrix {
        &self.action[var][degree as usize]
    }

    pub fn is_zero_up_to(&self, bound: i64) -> bool {
        (0..=bound.min(self.max_degree)).all(|d| self.dim(d) == 0)
    }

    fn apply_action(&self, var: usize, degree: i64, v: &[BigRational]) -> Vec<BigRational> {
        let m = self.action_matrix(var, degree);
        let col = RMatrix::from_columns(v.len(), vec![v.to_vec()]);
        m.mul(&col).column(0)
    }
}

/// The outcome of presentation discovery.
#[derive(Debug, Clone)]
pub struct DiscoveredPresentation {
    pub module: GradedModule,
    /// For each generator: its slice-coordinate lift in the realization.
    pub generator_lifts: Vec<Vec<BigRational>>,
    /// No new generators or relations appeared in the trailing window.
    pub stable: bool,
    pub last_generator_degree: Option<i64>,
    pub last_relation_degree: Option<i64>,
}

/// Discover minimal generators and minimal relations of the realization up
/// to its degree bound. `window` is the trailing-degrees stability window.
pub fn discover_presentation(
    real: &SliceRealization,
    window: i64,
) -> Result<DiscoveredPresentation, GrmodError> {
    let ring = real.ctx.ring.clone();
    let n = real.ctx.torus_rank;
    let mut module = GradedModule::free(real.ctx.clone(), Vec::new());
    let mut generator_lifts: Vec<Vec<BigRational>> = Vec::new();
    // eval cache: (generator, monomial) -> slice vector in the generator's
    // degree plus the monomial degree.
    let mut eval: BTreeMap<(usize, Monomial), Vec<BigRational>> = BTreeMap::new();
    let mut last_generator_degree = None;
    let mut last_relation_degree = None;

    for d in 0..=real.max_degree {
        let dim_d = real.dim(d);
        // Image of the variable actions from degree d-2.
        let action_cols: Vec<&RMatrix> = if d >= 2 {
            (0..n).map(|a| real.action_matrix(a, d - 2)).collect()
        } else {
            Vec::new()
        };
        let mut image = RMatrix::zeros(dim_d, 0);
        for m in action_cols {
            image = image.hstack(m);
        }
        // New generators: minimal cogenerators of slice_d / image.
        let (_, cogens) = slices::minimal_cogenerators(&ring, &image)?;
        for g in cogens {
            let idx = module.generator_degrees.len();
            module.generator_degrees.push(d);
            generator_lifts.push(g.lift.clone());
            eval.insert((idx, Monomial::one(n)), g.lift);
            last_generator_degree = Some(d);
        }

        // Evaluation matrix on the current free basis in degree d.
        let basis = module.free_basis(d);
        let mut eval_cols = Vec::with_capacity(basis.len());
        for (g, mono) in &basis {
            let v = eval_entry(real, &mut eval, *g, mono, module.generator_degrees[*g]);
            eval_cols.push(v);
        }
        let e_d = RMatrix::from_columns(dim_d, eval_cols);

        // Kernel of evaluation, minus multiples of known relations.
        let kernel = slices::kernel(&ring, &e_d)?;
        if kernel.cols() == 0 {
            continue;
        }
        let known = module.relation_slice(d);
        let mut coord_cols = Vec::new();
        for j in 0..known.cols() {
            let coords = slices::solve_coords(&ring, &kernel, &known.column(j))?
                .ok_or_else(|| {
                    GrmodError::Internal(
                        "known relation multiple escaped the evaluation kernel".into(),
                    )
                })?;
            coord_cols.push(coords);
        }
        let coords = RMatrix::from_columns(kernel.cols(), coord_cols);
        let (_, new_rels) = slices::minimal_cogenerators(&ring, &coords)?;
        for r in new_rels {
            // lift back to free-basis coordinates
            let lift_matrix = RMatrix::from_columns(kernel.cols(), vec![r.lift]);
            let ambient = kernel.mul(&lift_matrix).column(0);
            let entries = module.vector_to_entries(d, &ambient);
            module.push_relation(entries)?;
            last_relation_degree = Some(d);
        }
    }

    let last_event = last_generator_degree
        .unwrap_or(-1)
        .max(last_relation_degree.unwrap_or(-1));
    let stable = last_event + window <= real.max_degree;
    Ok(DiscoveredPresentation {
        module,
        generator_lifts,
        stable,
        last_generator_degree,
        last_relation_degree,
    })
}

fn eval_entry(
    real: &SliceRealization,
    cache: &mut BTreeMap<(usize, Monomial), Vec<BigRational>>,
    gen: usize,
    mono: &Monomial,
    gen_degree: i64,
) -> Vec<BigRational> {
    if let Some(v) = cache.get(&(gen, mono.clone())) {
        return v.clone();
    }
    // peel the smallest variable present
    let var = mono
        .0
        .iter()
        .position(|&e| e > 0)
        .expect("non-unit monomial");
    let mut smaller = mono.clone();
    smaller.0[var] -= 1;
    let inner = eval_entry(real, cache, gen, &smaller, gen_degree);
    let inner_degree = gen_degree + smaller.degree();
    let v = real.apply_action(var, inner_degree, &inner);
    cache.insert((gen, mono.clone()), v.clone());
    v
}

/// Realize a presented module over a field: slices become explicit bases
/// (complement-of-pivot lifts) and the variable actions are reduction
/// matrices. Fails on non-field rings, where slices need not be free.
pub fn realize_over_field(
    module: &GradedModule,
    max_degree: i64,
) -> Result<(SliceRealization, Vec<RMatrix>), GrmodError> {
    let ring = &module.ctx.ring;
    if !ring.is_field() {
        return Err(GrmodError::FieldRequired(ring.to_string()));
    }
    let n = module.ctx.torus_rank;
    let mut dims = Vec::new();
    let mut bases: Vec<RMatrix> = Vec::new();
    let mut rels: Vec<RMatrix> = Vec::new();
    for d in 0..=max_degree {
        let rel = module.relation_slice(d);
        let (_, cogens) = slices::minimal_cogenerators(ring, &rel)?;
        let lifts: Vec<Vec<BigRational>> = cogens.into_iter().map(|c| c.lift).collect();
        dims.push(lifts.len());
        bases.push(RMatrix::from_columns(rel.rows(), lifts));
        rels.push(rel);
    }
    let mut real = SliceRealization::new(module.ctx.clone(), max_degree, dims);
    for d in 0..=max_degree - 2 {
        let src_basis = &bases[d as usize];
        let tgt_basis = &bases[(d + 2) as usize];
        let tgt_rels = &rels[(d + 2) as usize];
        let solve_ambient = tgt_basis.hstack(tgt_rels);
        for a in 0..n {
            let mut cols = Vec::new();
            for j in 0..src_basis.cols() {
                let shifted = shift_by_variable(module, d, &src_basis.column(j), a);
                let sol = slices::solve_coords(ring, &solve_ambient, &shifted)?
                    .ok_or_else(|| GrmodError::Internal("slice action escaped basis".into()))?;
                cols.push(sol[..tgt_basis.cols()].to_vec());
            }
            real.set_action(a, d, RMatrix::from_columns(tgt_basis.cols(), cols));
        }
    }
    Ok((real, bases))
}

/// Multiply a free-cover slice vector by t_{var+1}: pure index bookkeeping
/// between the free bases in degrees d and d+2.
pub fn shift_by_variable(
    module: &GradedModule,
    degree: i64,
    v: &[BigRational],
    var: usize,
) -> Vec<BigRational> {
    let src = module.free_basis(degree);
    let tgt = module.free_basis(degree + 2);
    let index: BTreeMap<(usize, Monomial), usize> = tgt
        .iter()
        .cloned()
        .enumerate()
        .map(|(k, b)| (b, k))
        .collect();
    let mut out = vec![BigRational::zero(); tgt.len()];
    for (k, (g, m)) in src.iter().enumerate() {
        if v[k].is_zero() {
            continue;
        }
        let mut shifted = m.clone();
        shifted.0[var] += 1;
        let row = *index.get(&(*g, shifted)).expect("shift stays in basis");
        out[row] = v[k].clone();
    }
    out
}
