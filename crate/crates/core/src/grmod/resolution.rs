//! Minimal free resolutions over field coefficients, and the derived
//! depth / Krull dimension / Cohen-Macaulay / freeness certificates.
//!
//! Depth is computed as (number of variables) - (projective dimension),
//! the Auslander-Buchsbaum identity for graded modules over a polynomial
//! ring. Krull dimension over a field comes from the degree of the
//! Hilbert polynomial, fitted with exact finite differences on each
//! degree parity; over the integers it combines the rational dimension
//! with the dimensions modulo the finitely many relevant primes.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::discover::{discover_presentation, realize_over_field, shift_by_variable, SliceRealization};
use super::{GradedModule, GrmodError};
use crate::poly::Monomial;
use crate::ring::CoefficientRing;
use crate::slices::{self, RMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DepthValue {
    Finite(i64),
    Infinite,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DimValue {
    Finite(i64),
    MinusInfinity,
    Unknown,
}

impl fmt::Display for DepthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepthValue::Finite(v) => write!(f, "{v}"),
            DepthValue::Infinite => write!(f, "inf"),
            DepthValue::Unknown => write!(f, "unknown"),
        }
    }
}

impl fmt::Display for DimValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimValue::Finite(v) => write!(f, "{v}"),
            DimValue::MinusInfinity => write!(f, "-inf"),
            DimValue::Unknown => write!(f, "unknown"),
        }
    }
}

/// Depth, dimension and the Cohen-Macaulay flag, with a short account of
/// how each value was obtained.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DepthDimReport {
    pub depth: DepthValue,
    pub dim: DimValue,
    pub is_cm: Option<bool>,
    pub certificate: String,
}

/// A minimal graded free resolution: steps[i] holds the i-th Betti
/// generators (generator_degrees) and, as its relation columns, the
/// differential into step i.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub steps: Vec<GradedModule>,
    /// Discovery was stable in the trailing window at every stage.
    pub complete: bool,
}

impl Resolution {
    pub fn length(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    /// Betti generator degrees by homological position.
    pub fn betti(&self) -> Vec<Vec<i64>> {
        self.steps
            .iter()
            .map(|s| s.generator_degrees.clone())
            .collect()
    }
}

/// Exact test for the zero module: every generator lies in the relation
/// span in its own degree.
pub fn is_zero_module(module: &GradedModule) -> Result<bool, GrmodError> {
    let ring = &module.ctx.ring;
    for (i, &g) in module.generator_degrees.iter().enumerate() {
        let basis = module.free_basis(g);
        let mut v = vec![BigRational::zero(); basis.len()];
        let pos = basis
            .iter()
            .position(|(gen, m)| *gen == i && m.degree() == 0)
            .expect("generator appears in its own degree");
        v[pos] = BigRational::one();
        let rels = module.relation_slice(g);
        if !slices::membership(ring, &rels, &v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Default working bound from the design rule 2(n + max generator degree) + 8.
pub fn default_degree_bound(module: &GradedModule) -> i64 {
    let max_gen = module.generator_degrees.iter().copied().max().unwrap_or(0);
    2 * (module.ctx.torus_rank as i64 + max_gen.max(0)) + 8
}

fn stability_window(module: &GradedModule) -> i64 {
    module.ctx.torus_rank as i64 + 2
}

/// Minimal free resolution over a field, computed degreewise: minimal
/// generators, then iterated minimal syzygies of kernel realizations.
pub fn minimal_resolution(module: &GradedModule, max_degree: i64) -> Result<Resolution, GrmodError> {
    let ring = &module.ctx.ring;
    if !ring.is_field() {
        return Err(GrmodError::FieldRequired(ring.to_string()));
    }
    let window = stability_window(module);
    let n = module.ctx.torus_rank;
    let (mut real, _) = realize_over_field(module, max_degree)?;
    let mut steps = Vec::new();
    let mut complete = true;
    loop {
        let found = discover_presentation(&real, window)?;
        complete &= found.stable;
        let has_relations = !found.module.relations.is_empty();
        let lifts = found.generator_lifts.clone();
        let step_module = found.module.clone();
        steps.push(step_module);
        if !has_relations {
            break;
        }
        if steps.len() > n + 1 {
            return Err(GrmodError::DegreeBoundTooSmall(
                max_degree,
                "resolution exceeds the number of variables; raise the bound".into(),
            ));
        }
        real = kernel_realization(&real, &steps[steps.len() - 1], &lifts)?;
    }
    Ok(Resolution { steps, complete })
}

/// Realization of ker(F -> M) where F is free on the discovered generators
/// with the given slice lifts into `real`.
fn kernel_realization(
    real: &SliceRealization,
    free_cover: &GradedModule,
    lifts: &[Vec<BigRational>],
) -> Result<SliceRealization, GrmodError> {
    let ring = real.ctx.ring.clone();
    let max_degree = real.max_degree;
    // evaluation matrices per degree
    let mut eval_cache: BTreeMap<(usize, Monomial), Vec<BigRational>> = BTreeMap::new();
    for (i, lift) in lifts.iter().enumerate() {
        eval_cache.insert((i, Monomial::one(real.ctx.torus_rank)), lift.clone());
    }
    let mut kernels: Vec<RMatrix> = Vec::new();
    for d in 0..=max_degree {
        let basis = free_cover.free_basis(d);
        let mut cols = Vec::with_capacity(basis.len());
        for (g, m) in &basis {
            cols.push(eval_rec(real, &mut eval_cache, *g, m, free_cover.generator_degrees[*g]));
        }
        let e_d = RMatrix::from_columns(real.dim(d), cols);
        kernels.push(slices::kernel(&ring, &e_d)?);
    }
    let dims: Vec<usize> = kernels.iter().map(|k| k.cols()).collect();
    let mut out = SliceRealization::new(real.ctx.clone(), max_degree, dims);
    for d in 0..=max_degree - 2 {
        let src = &kernels[d as usize];
        let tgt = &kernels[(d + 2) as usize];
        for a in 0..real.ctx.torus_rank {
            let mut cols = Vec::new();
            for j in 0..src.cols() {
                let shifted = shift_by_variable(free_cover, d, &src.column(j), a);
                let sol = slices::solve_coords(&ring, tgt, &shifted)?.ok_or_else(|| {
                    GrmodError::Internal("kernel not closed under the variable action".into())
                })?;
                cols.push(sol);
            }
            out.set_action(a, d, RMatrix::from_columns(tgt.cols(), cols));
        }
    }
    Ok(out)
}

fn eval_rec(
    real: &SliceRealization,
    cache: &mut BTreeMap<(usize, Monomial), Vec<BigRational>>,
    gen: usize,
    mono: &Monomial,
    gen_degree: i64,
) -> Vec<BigRational> {
    if let Some(v) = cache.get(&(gen, mono.clone())) {
        return v.clone();
    }
    let var = mono
        .0
        .iter()
        .position(|&e| e > 0)
        .expect("non-unit monomial");
    let mut smaller = mono.clone();
    smaller.0[var] -= 1;
    let inner = eval_rec(real, cache, gen, &smaller, gen_degree);
    let inner_degree = gen_degree + smaller.degree();
    let m = real.action_matrix(var, inner_degree);
    let col = RMatrix::from_columns(inner.len(), vec![inner]);
    let v = m.mul(&col).column(0);
    cache.insert((gen, mono.clone()), v.clone());
    v
}

/// Depth over a field: n - projective dimension; infinity for the zero
/// module.
pub fn depth(module: &GradedModule, max_degree: i64) -> Result<DepthDimReport, GrmodError> {
    let ring = &module.ctx.ring;
    if !ring.is_field() {
        return Err(GrmodError::FieldRequired(ring.to_string()));
    }
    if is_zero_module(module)? {
        return Ok(DepthDimReport {
            depth: DepthValue::Infinite,
            dim: DimValue::MinusInfinity,
            is_cm: None,
            certificate: "zero module".into(),
        });
    }
    let res = minimal_resolution(module, max_degree)?;
    let pd = res.length() as i64;
    let depth = module.ctx.torus_rank as i64 - pd;
    Ok(DepthDimReport {
        depth: DepthValue::Finite(depth),
        dim: DimValue::Unknown,
        is_cm: None,
        certificate: format!(
            "projective dimension {pd} via minimal resolution (complete: {})",
            res.complete
        ),
    })
}

/// Krull dimension of the module over A.
pub fn krull_dim(module: &GradedModule, max_degree: i64) -> Result<DepthDimReport, GrmodError> {
    if is_zero_module(module)? {
        return Ok(DepthDimReport {
            depth: DepthValue::Infinite,
            dim: DimValue::MinusInfinity,
            is_cm: None,
            certificate: "zero module".into(),
        });
    }
    let ring = module.ctx.ring.clone();
    if ring.is_field() {
        let dim = field_dim(module, max_degree)?;
        return Ok(DepthDimReport {
            depth: DepthValue::Unknown,
            dim: DimValue::Finite(dim),
            is_cm: None,
            certificate: "Hilbert polynomial degree via exact finite differences".into(),
        });
    }
    // Subring of Q: combine the rational fiber with the relevant primes.
    let rational = swap_ring(module, CoefficientRing::Rationals);
    let mut best: i64 = i64::MIN;
    let mut cert = String::new();
    if !is_zero_module(&rational)? {
        let dq = field_dim(&rational, max_degree)?;
        best = best.max(dq + 1);
        cert.push_str(&format!("rational fiber dim {dq} (+1); "));
    } else {
        cert.push_str("rational fiber zero; ");
    }
    let primes = relevant_primes(module, max_degree)?;
    cert.push_str(&format!("primes examined: {:?}", primes));
    for p in primes {
        let fp = swap_ring(module, CoefficientRing::PrimeField(p));
        if is_zero_module(&fp)? {
            continue;
        }
        let dp = field_dim(&fp, max_degree)?;
        best = best.max(dp);
    }
    if best == i64::MIN {
        return Err(GrmodError::Internal(
            "nonzero module with empty support".into(),
        ));
    }
    Ok(DepthDimReport {
        depth: DepthValue::Unknown,
        dim: DimValue::Finite(best),
        is_cm: None,
        certificate: cert,
    })
}

fn swap_ring(module: &GradedModule, ring: CoefficientRing) -> GradedModule {
    let mut out = GradedModule {
        ctx: crate::ring::PolynomialRingContext::new(module.ctx.torus_rank, ring),
        generator_degrees: module.generator_degrees.clone(),
        relations: Vec::new(),
    };
    for rel in &module.relations {
        out.push_relation(rel.entries.clone())
            .expect("same entries stay homogeneous");
    }
    out
}

/// Primes that can carry extra dimension: divisors of slice torsion up to
/// the bound and of relation coefficient numerators (ring units removed).
fn relevant_primes(module: &GradedModule, max_degree: i64) -> Result<BTreeSet<u64>, GrmodError> {
    let ring = &module.ctx.ring;
    let mut out = BTreeSet::new();
    let mut consider = |m: &BigUint| {
        for p in factor_u64(m) {
            if !ring.is_invertible(p).unwrap_or(true) {
                out.insert(p);
            }
        }
    };
    for rel in &module.relations {
        for e in &rel.entries {
            for (_, c) in e.terms() {
                let core = ring.torsion_core(c.numer().magnitude());
                if !core.is_one() {
                    consider(&core);
                }
            }
        }
    }
    for d in 0..=max_degree {
        for t in module.graded_piece(d)?.torsion {
            consider(&t);
        }
    }
    Ok(out)
}

fn factor_u64(m: &BigUint) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = m.clone();
    let one = BigUint::one();
    let mut p = 2u64;
    while m > one {
        let bp = BigUint::from(p);
        if (&m % &bp).is_zero() {
            out.push(p);
            while (&m % &bp).is_zero() {
                m /= &bp;
            }
        }
        if &bp * &bp > m {
            if m > one {
                let digits = m.to_u64_digits();
                if digits.len() == 1 {
                    out.push(digits[0]);
                }
            }
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    out
}

/// Hilbert-polynomial degree fit over a field: 1 + max over parities of
/// the fitted polynomial degree in the half-degree variable.
fn field_dim(module: &GradedModule, max_degree: i64) -> Result<i64, GrmodError> {
    let n = module.ctx.torus_rank as i64;
    let window = (n + 2) as usize;
    let ranks: Vec<i64> = module
        .hilbert_function(max_degree)?
        .into_iter()
        .map(|f| f.free_rank as i64)
        .collect();
    let mut max_poly_degree: i64 = -1;
    for parity in 0..2i64 {
        let samples: Vec<i64> = (0..=max_degree)
            .filter(|d| d % 2 == parity)
            .map(|d| ranks[d as usize])
            .collect();
        if samples.iter().all(|&v| v == 0) {
            continue;
        }
        let deg = fitted_degree(&samples, n, window).ok_or_else(|| {
            GrmodError::DegreeBoundTooSmall(
                max_degree,
                "Hilbert function not yet polynomial on the trailing window".into(),
            )
        })?;
        max_poly_degree = max_poly_degree.max(deg);
    }
    Ok(1 + max_poly_degree)
}

/// Degree of the eventual polynomial: smallest difference order vanishing
/// on the trailing window, minus one. None when the (n+1)-st differences
/// do not vanish there (bound too small).
fn fitted_degree(samples: &[i64], n: i64, window: usize) -> Option<i64> {
    let needed = window + (n as usize) + 1;
    if samples.len() < needed {
        return None;
    }
    let mut current: Vec<i64> = samples.to_vec();
    for order in 0..=(n + 1) {
        if current.len() >= window && current[current.len() - window..].iter().all(|&v| v == 0) {
            return Some(order - 1);
        }
        current = current.windows(2).map(|w| w[1] - w[0]).collect();
    }
    None
}

/// Cohen-Macaulay test over a field for a nonzero module.
pub fn is_cohen_macaulay(
    module: &GradedModule,
    max_degree: i64,
) -> Result<DepthDimReport, GrmodError> {
    let ring = &module.ctx.ring;
    if !ring.is_field() {
        return Err(GrmodError::FieldRequired(ring.to_string()));
    }
    if is_zero_module(module)? {
        return Err(GrmodError::ZeroModule);
    }
    let d = depth(module, max_degree)?;
    let k = krull_dim(module, max_degree)?;
    let (DepthValue::Finite(dep), DimValue::Finite(dim)) = (d.depth, k.dim) else {
        return Err(GrmodError::Internal("nonzero module without depth/dim".into()));
    };
    Ok(DepthDimReport {
        depth: d.depth,
        dim: k.dim,
        is_cm: Some(dep == dim),
        certificate: format!("{}; {}", d.certificate, k.certificate),
    })
}

/// Freeness certificate.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FreenessReport {
    pub free: bool,
    pub generator_degrees: Vec<i64>,
    pub failure: Option<(i64, String)>,
    pub stable: bool,
}

/// Attempt to lift a basis of M/(A_{>0}M) to an isomorphism from a free
/// module, verified degreewise up to the bound.
pub fn is_free(module: &GradedModule, max_degree: i64) -> Result<FreenessReport, GrmodError> {
    let ring = module.ctx.ring.clone();
    let n = module.ctx.torus_rank;
    let window = stability_window(module);
    let mut gen_degrees: Vec<i64> = Vec::new();
    let mut gen_lifts: Vec<(i64, Vec<BigRational>)> = Vec::new();
    let mut last_gen = -1i64;
    for d in 0..=max_degree {
        let rel = module.relation_slice(d);
        let mut stack = rel.clone();
        if d >= 2 {
            let lower = module.free_basis(d - 2);
            for a in 0..n {
                let mut cols = Vec::new();
                for k in 0..lower.len() {
                    let mut unit = vec![BigRational::zero(); lower.len()];
                    unit[k] = BigRational::one();
                    cols.push(shift_by_variable(module, d - 2, &unit, a));
                }
                stack = stack.hstack(&RMatrix::from_columns(rel.rows(), cols));
            }
        }
        let (_, cogens) = slices::minimal_cogenerators(&ring, &stack)?;
        for g in cogens {
            if let Some(order) = g.order {
                return Ok(FreenessReport {
                    free: false,
                    generator_degrees: Vec::new(),
                    failure: Some((
                        d,
                        format!("minimal generators carry torsion of order {order} in degree {d}"),
                    )),
                    stable: true,
                });
            }
            gen_degrees.push(d);
            gen_lifts.push((d, g.lift));
            last_gen = d;
        }
    }
    let stable = last_gen + window <= max_degree;
    // candidate map from the free module on gen_degrees
    let free_cover = GradedModule::free(module.ctx.clone(), gen_degrees.clone());
    for d in 0..=max_degree {
        let rel = module.relation_slice(d);
        // slice of the candidate map: columns indexed by free_cover basis
        let basis = free_cover.free_basis(d);
        let mut cols = Vec::with_capacity(basis.len());
        for (g, m) in &basis {
            let (gdeg, lift) = &gen_lifts[*g];
            // multiply the lift by the monomial m inside module's free cover
            let mut v = lift.clone();
            let mut deg = *gdeg;
            for (var, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    v = shift_by_variable(module, deg, &v, var);
                    deg += 2;
                }
            }
            cols.push(v);
        }
        let phi = RMatrix::from_columns(rel.rows(), cols);
        // surjectivity
        if !slices::cokernel(&ring, &phi.hstack(&rel))?.is_zero() {
            return Ok(FreenessReport {
                free: false,
                generator_degrees: Vec::new(),
                failure: Some((d, "candidate generators do not span the slice".into())),
                stable,
            });
        }
        // injectivity of the induced map
        let ker = slices::preimage_kernel(&ring, &phi, &rel)?;
        if ker.cols() > 0 {
            return Ok(FreenessReport {
                free: false,
                generator_degrees: Vec::new(),
                failure: Some((d, "free cover has a kernel in this degree".into())),
                stable,
            });
        }
        // rank/torsion match
        let piece = module.graded_piece(d)?;
        if !piece.torsion.is_empty() {
            return Ok(FreenessReport {
                free: false,
                generator_degrees: Vec::new(),
                failure: Some((d, format!("slice has torsion {:?}", piece.torsion))),
                stable,
            });
        }
    }
    Ok(FreenessReport {
        free: true,
        generator_degrees: gen_degrees,
        failure: None,
        stable,
    })
}
