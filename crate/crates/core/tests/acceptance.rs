//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its timing. Expected values marked as derived are computed by the
//! independent oracles implemented in this file before being asserted.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use abexact::abseq::{cm_profile, cs_compare, verify, CsVerdict, SequenceKind, Verdict};
use abexact::catalog;
use abexact::grmod::discover::{discover_presentation, SliceRealization};
use abexact::grmod::resolution::{depth, krull_dim, DepthValue, DimValue};
use abexact::grmod::{GradedComplex, GradedMap, GradedModule};
use abexact::lattice::{
    check_conditions, check_conditions_algebraic, decompose_subgroup, dim_classifying,
    ClosedSubgroup, IntMatrix, StratumDescriptor,
};
use abexact::poly::Polynomial;
use abexact::ring::{make_ring, CoefficientRing, FgModule, PolynomialRingContext};
use abexact::slices::{self, RMatrix};
use abexact::spaces::{equivariant_cohomology, relative_term, SpaceModel};

fn ring_kinds() -> Vec<CoefficientRing> {
    vec![
        make_ring("Q").unwrap(),
        make_ring("Fp:2").unwrap(),
        make_ring("Fp:3").unwrap(),
        make_ring("Z").unwrap(),
        make_ring("Z[1/2]").unwrap(),
        make_ring("Z[1/2,1/3]").unwrap(),
    ]
}

fn trial_factor(m: &BigUint) -> Vec<u64> {
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
                out.push(m.to_u64_digits()[0]);
            }
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    out
}

/// Brute-force Krull dimension of R[t_1..t_q, t'_1..t'_r]/(m_1 t_1, ...,
/// m_q t_q) by minimal-prime pattern enumeration: for each subset of the
/// torsion variables placed in the prime, the remaining ones must share a
/// non-invertible prime divisor.
fn oracle_dim(orders: &[BigUint], r: usize, ring: &CoefficientRing) -> usize {
    let q = orders.len();
    let mut best = 0usize;
    for mask in 0u32..(1 << q) {
        let outside: Vec<usize> = (0..q).filter(|j| mask & (1 << j) == 0).collect();
        if outside.is_empty() {
            best = best.max(ring.base_dimension() + r);
            continue;
        }
        let mut g = orders[outside[0]].clone();
        for &j in &outside[1..] {
            g = num_integer::Integer::gcd(&g, &orders[j]);
        }
        let has_prime = trial_factor(&g)
            .into_iter()
            .any(|p| !ring.is_invertible(p).unwrap_or(true));
        if has_prime {
            best = best.max(outside.len() + r);
        }
    }
    best
}

fn random_subgroup(rng: &mut ChaCha8Rng, n: usize, max_entry: i64) -> ClosedSubgroup {
    let rows = rng.gen_range(0..=n + 1);
    let matrix: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..n).map(|_| rng.gen_range(-max_entry..=max_entry)).collect())
        .collect();
    ClosedSubgroup::new(n, IntMatrix::from_i64_rows(&matrix)).unwrap()
}

#[test]
fn acceptance_1_lemma_3_1_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let rings = ring_kinds();
    let mut checked = 0usize;
    while checked < 220 {
        let n = rng.gen_range(1..=4);
        let subgroup = random_subgroup(&mut rng, n, 20);
        let dec = decompose_subgroup(&subgroup);
        for ring in &rings {
            let fast = dim_classifying(&subgroup, ring);
            let brute = oracle_dim(&dec.finite_orders, dec.torus_rank, ring);
            assert_eq!(
                fast, brute,
                "dimension mismatch: orders {:?} r {} over {ring}",
                dec.finite_orders, dec.torus_rank
            );
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "budget exceeded: {elapsed:?}");
    println!("PASS criterion 1: dim oracle equivalence on {checked} subgroups x {} rings in {elapsed:?}", rings.len());
}

#[test]
fn acceptance_2_condition_checker_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let rings = ring_kinds();
    let mut checked = 0usize;
    while checked < 210 {
        let n = rng.gen_range(1..=4);
        let count = rng.gen_range(1..=4);
        let mut strata = Vec::new();
        for s in 0..count {
            let iso = random_subgroup(&mut rng, n, 6);
            let dec = decompose_subgroup(&iso);
            let orbit_dim = n - dec.torus_rank;
            strata.push(StratumDescriptor::new(format!("s{s}"), iso, orbit_dim).unwrap());
        }
        let k = rng.gen_range(0..=n as i64);
        for ring in &rings {
            let direct = check_conditions(&strata, ring, k).unwrap();
            let algebraic = check_conditions_algebraic(&strata, ring, k).unwrap();
            assert_eq!(direct, algebraic, "checker mismatch over {ring} k={k}");
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "budget exceeded: {elapsed:?}");
    println!("PASS criterion 2: checker equivalence on {checked} strata configurations in {elapsed:?}");
}

#[test]
fn acceptance_3_atiyah_bredon_instances() {
    let start = Instant::now();
    let models = ["P1", "P2", "P1xP1", "Hirzebruch:1", "Hirzebruch:2"];
    let rings = ["Q", "Z", "Fp:2", "Fp:3"];
    for name in models {
        let model = catalog::model(name).unwrap();
        for ring_name in rings {
            let ring = make_ring(ring_name).unwrap();
            let report = verify(&model, &ring, SequenceKind::AtiyahBredonFull, 20).unwrap();
            assert_eq!(
                report.verdict,
                Verdict::ExactUpToD,
                "{name} over {ring_name}"
            );
            assert_eq!(report.hypotheses.satisfied, Some(true), "{name}/{ring_name}");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "budget exceeded: {elapsed:?}");
    println!("PASS criterion 3: full exactness for 5 models x 4 rings at D=20 in {elapsed:?}");
}

/// Coefficients of (sum_g q^g) / (1 - q^2)^n in even degrees 0..=upto.
fn series_ranks(generator_degrees: &[i64], n: usize, upto: i64) -> Vec<usize> {
    let choose = |a: i64, b: i64| -> i64 {
        if b < 0 || a < b {
            return 0;
        }
        let mut acc = 1i64;
        for i in 0..b {
            acc = acc * (a - i) / (i + 1);
        }
        acc
    };
    (0..=upto)
        .map(|d| {
            generator_degrees
                .iter()
                .filter(|&&g| g <= d && (d - g) % 2 == 0)
                .map(|&g| choose((d - g) / 2 + n as i64 - 1, n as i64 - 1))
                .sum::<i64>() as usize
        })
        .collect()
}

#[test]
fn acceptance_4_chang_skjelbred_images() {
    let start = Instant::now();
    let z = make_ring("Z").unwrap();
    // expected common-image ranks: the Hilbert series of H_T(X)
    let cases = [("P2", vec![0i64, 2, 4]), ("P1xP1", vec![0, 2, 2, 4])];
    for (name, gens) in cases {
        let model = catalog::model(name).unwrap();
        let report = cs_compare(&model, &z, 20).unwrap();
        assert_eq!(report.verdict, CsVerdict::Equal, "{name}");
        let expected = series_ranks(&gens, 2, 20);
        assert_eq!(report.image_ranks, expected, "{name} image ranks");
    }
    // the quoted values for degrees 0..6 of the projective plane
    let expected = series_ranks(&[0, 2, 4], 2, 6);
    assert_eq!(expected, vec![1, 0, 3, 0, 6, 0, 9]);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "budget exceeded: {elapsed:?}");
    println!("PASS criterion 4: one-skeleton image comparison equal with derived ranks in {elapsed:?}");
}

#[test]
fn acceptance_5_conditions_matter() {
    let start = Instant::now();
    let sphere = catalog::model("SpinningSphere:2").unwrap();
    let f2 = make_ring("Fp:2").unwrap();
    let z = make_ring("Z").unwrap();

    // conditions flag the equality violation at level 0 over F2
    let conditions = check_conditions(&sphere.strata().unwrap(), &f2, 0).unwrap();
    assert!(!conditions.holds);
    assert_eq!(conditions.violations.len(), 1);
    assert_eq!(conditions.violations[0].skeleton_level, 0);
    assert_eq!(conditions.violations[0].prime, 2);

    // the first map acquires a kernel in degree 2
    let report = verify(&sphere, &f2, SequenceKind::AtiyahBredonTruncated(0), 8).unwrap();
    match &report.verdict {
        Verdict::FailsAt {
            position,
            degree,
            witness,
        } => {
            assert_eq!((*position, *degree), (0, 2));
            assert!(!witness.homology.is_zero());
        }
        other => panic!("expected failure over F2, got {other:?}"),
    }

    // over the integers the inclusion condition holds and the full
    // sequence verifies
    let conditions = check_conditions(&sphere.strata().unwrap(), &z, 1).unwrap();
    assert!(conditions.holds);
    let report = verify(&sphere, &z, SequenceKind::AtiyahBredonFull, 8).unwrap();
    assert_eq!(report.verdict, Verdict::ExactUpToD);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "budget exceeded: {elapsed:?}");
    println!("PASS criterion 5: speed-2 sphere fails over F2 and verifies over Z in {elapsed:?}");
}

#[test]
fn acceptance_6_tail_profile_of_the_plane() {
    let start = Instant::now();
    let p2 = catalog::model("P2").unwrap();
    let q = make_ring("Q").unwrap();
    let n = 2i64;
    let profile = cm_profile(&p2, &q, 16).unwrap();
    assert!(profile.splitting_holds);
    for row in &profile.rows {
        if row.is_zero {
            continue;
        }
        let expected = n - row.level as i64 - 1;
        assert_eq!(row.report.dim, DimValue::Finite(expected), "level {}", row.level);
        assert_eq!(row.report.is_cm, Some(true), "level {}", row.level);
    }
    // depth of the relative terms is at least n - i
    for level in 0..=2usize {
        let term = relative_term(&p2, level, &q).unwrap();
        let d = depth(&term, 16).unwrap();
        match d.depth {
            DepthValue::Finite(v) => assert!(
                v >= n - level as i64,
                "depth {v} < {} at level {level}",
                n - level as i64
            ),
            DepthValue::Infinite => {}
            DepthValue::Unknown => panic!("depth unknown at level {level}"),
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "budget exceeded: {elapsed:?}");
    println!("PASS criterion 6: tails are zero or Cohen-Macaulay of dimension n-i-1; relative depths >= n-i in {elapsed:?}");
}

#[test]
fn acceptance_7_fixed_point_free_sequence() {
    let start = Instant::now();
    let model = catalog::model("FreeCircleTimes:P1").unwrap();
    assert_eq!(model.min_orbit_dim().unwrap(), 1);
    for ring_name in ["Z", "Q"] {
        let ring = make_ring(ring_name).unwrap();
        let report = verify(&model, &ring, SequenceKind::GoertschesToeben, 16).unwrap();
        assert_eq!(report.verdict, Verdict::ExactUpToD, "over {ring_name}");
    }
    let q = make_ring("Q").unwrap();
    let data = equivariant_cohomology(&model, &q, 16).unwrap();
    let dim = krull_dim(&data.module, 16).unwrap();
    // d + n - k = 0 + 2 - 1
    assert_eq!(dim.dim, DimValue::Finite(1));
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "budget exceeded: {elapsed:?}");
    println!("PASS criterion 7: fixed-point-free sequence exact over Z and Q; dim H_T(X) = 1 in {elapsed:?}");
}

// --- criterion 8 helpers -------------------------------------------------

fn ctx(n: usize, ring: &str) -> PolynomialRingContext {
    PolynomialRingContext::new(n, make_ring(ring).unwrap())
}

fn poly(n: usize, s: &str) -> Polynomial {
    Polynomial::parse(n, s).unwrap()
}

/// Kernel basis of an integer matrix by the Hermite-form augmentation
/// trick: rows of HNF([B^T | I]) whose B^T-part vanishes.
fn hnf_kernel(b: &IntMatrix) -> IntMatrix {
    let rows = b.cols();
    let cols = b.rows();
    let aug = IntMatrix::from_fn(rows, cols + rows, |i, j| {
        if j < cols {
            b.get(j, i).clone()
        } else if j - cols == i {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    });
    let h = aug.row_hnf();
    let mut kernel_rows = Vec::new();
    for i in 0..h.rows() {
        if (0..cols).all(|j| h.get(i, j).is_zero()) {
            kernel_rows.push((0..rows).map(|j| h.get(i, cols + j).clone()).collect::<Vec<_>>());
        }
    }
    IntMatrix::from_rows(kernel_rows).transpose()
}

fn to_int(m: &RMatrix) -> IntMatrix {
    let (im, den) = m.clear_denominators();
    assert!(den.is_one(), "integral slice expected");
    im
}

/// Independent homology of a slice complex of free Z-modules:
/// ker(out) / im(incoming), via the Hermite kernel and invariant factors.
fn oracle_homology(l_in: &RMatrix, l_out: &RMatrix) -> FgModule {
    let b = to_int(l_out);
    let a = to_int(l_in);
    let kernel = hnf_kernel(&b);
    if kernel.cols() == 0 {
        assert!(a.is_zero(), "boundaries outside cycles");
        return FgModule::zero();
    }
    let coords = kernel.solve(&a).expect("boundaries lie in the kernel lattice");
    let snf = abexact::lattice::smith_normal_form(&coords);
    FgModule {
        free_rank: kernel.cols() - snf.rank(),
        torsion: snf
            .invariant_factors
            .iter()
            .filter(|f| !f.is_one())
            .cloned()
            .collect(),
    }
}

/// Random shear automorphism data for a free module: entry (row, col) and
/// a homogeneous polynomial of matching degree.
fn random_shear(
    rng: &mut ChaCha8Rng,
    n: usize,
    degrees: &[i64],
) -> Option<(usize, usize, Polynomial)> {
    if degrees.len() < 2 {
        return None;
    }
    for _ in 0..8 {
        let i = rng.gen_range(0..degrees.len());
        let j = rng.gen_range(0..degrees.len());
        if i == j {
            continue;
        }
        let diff = degrees[i] - degrees[j];
        if diff < 0 || diff % 2 != 0 {
            continue;
        }
        let monos = abexact::poly::Monomial::of_degree(n, diff);
        let m = monos[rng.gen_range(0..monos.len())].clone();
        let c = BigRational::from_integer(BigInt::from(rng.gen_range(-3i64..=3)));
        if c.is_zero() {
            continue;
        }
        return Some((j, i, Polynomial::monomial(n, m, c)));
    }
    None
}

fn identity_matrix(n: usize, degrees: &[i64]) -> Vec<Vec<Polynomial>> {
    (0..degrees.len())
        .map(|i| {
            (0..degrees.len())
                .map(|j| {
                    if i == j {
                        Polynomial::integer(n, 1)
                    } else {
                        Polynomial::zero(n)
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn acceptance_8a_homology_matches_dense_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut checked = 0usize;
    while checked < 110 {
        let n = rng.gen_range(1..=2usize);
        let c = ctx(n, "Z");
        let mid_count = rng.gen_range(2..=4usize);
        let mid_degrees: Vec<i64> = (0..mid_count)
            .map(|_| 2 * rng.gen_range(0..=2i64))
            .collect();
        // assign some middle slots an incoming generator, others an
        // outgoing one; the rest stay free
        let mut incoming = Vec::new();
        let mut outgoing = Vec::new();
        for slot in 0..mid_count {
            match rng.gen_range(0..3) {
                0 => incoming.push(slot),
                1 => outgoing.push(slot),
                _ => {}
            }
        }
        let src_degrees: Vec<i64> = incoming
            .iter()
            .map(|&s| mid_degrees[s] + 2 * rng.gen_range(0..=1i64))
            .collect();
        let tgt_degrees: Vec<i64> = outgoing
            .iter()
            .map(|&s| mid_degrees[s] - 2 * rng.gen_range(0..=1i64))
            .collect();
        let source = std::sync::Arc::new(GradedModule::free(c.clone(), src_degrees.clone()));
        let middle = std::sync::Arc::new(GradedModule::free(c.clone(), mid_degrees.clone()));
        let target = std::sync::Arc::new(GradedModule::free(c.clone(), tgt_degrees.clone()));
        // block maps
        let mut l1 = vec![vec![Polynomial::zero(n); src_degrees.len()]; mid_degrees.len()];
        for (col, &slot) in incoming.iter().enumerate() {
            let diff = src_degrees[col] - mid_degrees[slot];
            let monos = abexact::poly::Monomial::of_degree(n, diff);
            let m = monos[rng.gen_range(0..monos.len())].clone();
            let coeff = rng.gen_range(1..=4i64);
            l1[slot][col] = Polynomial::monomial(
                n,
                m,
                BigRational::from_integer(BigInt::from(coeff)),
            );
        }
        let mut l2 = vec![vec![Polynomial::zero(n); mid_degrees.len()]; tgt_degrees.len()];
        for (row, &slot) in outgoing.iter().enumerate() {
            let diff = mid_degrees[slot] - tgt_degrees[row];
            let monos = abexact::poly::Monomial::of_degree(n, diff);
            let m = monos[rng.gen_range(0..monos.len())].clone();
            let coeff = rng.gen_range(1..=4i64);
            l2[row][slot] = Polynomial::monomial(
                n,
                m,
                BigRational::from_integer(BigInt::from(coeff)),
            );
        }
        let mut map1 = GradedMap::new(source.clone(), middle.clone(), 0, l1).unwrap();
        let mut map2 = GradedMap::new(middle.clone(), target.clone(), 0, l2).unwrap();
        // conjugate by random shears of the middle term
        for _ in 0..rng.gen_range(1..=4) {
            if let Some((row, col, p)) = random_shear(&mut rng, n, &mid_degrees) {
                let mut u = identity_matrix(n, &mid_degrees);
                u[row][col] = p.clone();
                let mut u_inv = identity_matrix(n, &mid_degrees);
                u_inv[row][col] = p.neg();
                let u_map =
                    GradedMap::new(middle.clone(), middle.clone(), 0, u).unwrap();
                let u_inv_map =
                    GradedMap::new(middle.clone(), middle.clone(), 0, u_inv).unwrap();
                map1 = map1.compose(&u_map);
                map2 = u_inv_map.compose(&map2);
            }
        }
        let complex = GradedComplex::new(
            vec![source, middle, target],
            vec![map1.clone(), map2.clone()],
        )
        .unwrap();
        complex.validate().unwrap();
        let engine = complex.homology_at(1, 10).unwrap();
        for s in &engine {
            let l_in = map1.slice(s.degree);
            let l_out = map2.slice(s.degree);
            let expected = oracle_homology(&l_in, &l_out);
            assert_eq!(
                s.homology, expected,
                "degree {} of complex {checked}",
                s.degree
            );
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "budget exceeded: {elapsed:?}");
    println!("PASS criterion 8a: homology agrees with the dense oracle on {checked} complexes in {elapsed:?}");
}

fn random_module(rng: &mut ChaCha8Rng, n: usize, ring: &str) -> GradedModule {
    let c = ctx(n, ring);
    let gens: Vec<i64> = (0..rng.gen_range(1..=3usize))
        .map(|_| 2 * rng.gen_range(0..=3i64))
        .collect();
    let mut module = GradedModule::free(c, gens.clone());
    let rel_count = rng.gen_range(0..=5usize);
    for _ in 0..rel_count {
        let target = rng.gen_range(0..gens.len());
        let rel_degree = gens[target] + 2 * rng.gen_range(1..=2i64);
        let mut entries = vec![Polynomial::zero(n); gens.len()];
        for (i, &g) in gens.iter().enumerate() {
            let diff = rel_degree - g;
            if diff < 0 || diff % 2 != 0 {
                continue;
            }
            if i != target && rng.gen_bool(0.5) {
                continue;
            }
            let monos = abexact::poly::Monomial::of_degree(n, diff);
            let mut p = Polynomial::zero(n);
            for m in monos {
                let coeff = rng.gen_range(-2i64..=2);
                if coeff != 0 && rng.gen_bool(0.6) {
                    p = p.add(&Polynomial::monomial(
                        n,
                        m,
                        BigRational::from_integer(BigInt::from(coeff)),
                    ));
                }
            }
            entries[i] = p;
        }
        if entries.iter().any(|p| !p.is_zero()) {
            module.push_relation(entries).unwrap();
        }
    }
    module
}

#[test]
fn acceptance_8b_depth_bounded_by_dimension() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut nonzero = 0usize;
    for ring in ["Q", "Fp:2"] {
        for _ in 0..12 {
            // the rationals are the slow exact path; keep their corpus at
            // two variables and exercise three variables over F2
            let n = if ring == "Q" { 2 } else { rng.gen_range(2..=3usize) };
            let module = random_module(&mut rng, n, ring);
            let bound = 18;
            let (Ok(d), Ok(k)) = (depth(&module, bound), krull_dim(&module, bound)) else {
                continue;
            };
            match (d.depth, k.dim) {
                (DepthValue::Finite(dep), DimValue::Finite(dim)) => {
                    assert!(dep <= dim, "depth {dep} > dim {dim} over {ring}");
                    nonzero += 1;
                }
                (DepthValue::Infinite, DimValue::MinusInfinity) => {}
                other => panic!("inconsistent report {other:?}"),
            }
        }
    }
    assert!(nonzero >= 10, "corpus too degenerate: {nonzero}");
    let elapsed = start.elapsed();
    println!("PASS criterion 8b: depth <= dim on {nonzero} nonzero random modules in {elapsed:?}");
}

/// Realization of the image of a map from a free module into a realized
/// module over a field, built with public slice operations only.
fn image_realization(
    module: &GradedModule,
    map_columns: &[(i64, Vec<Polynomial>)],
    bound: i64,
) -> SliceRealization {
    let ring = &module.ctx.ring;
    let n = module.ctx.torus_rank;
    let c = module.ctx.clone();
    // free module on the column degrees, mapping by the given entries
    let free = GradedModule::free(c.clone(), map_columns.iter().map(|(d, _)| *d).collect());
    let matrix: Vec<Vec<Polynomial>> = (0..module.generator_degrees.len())
        .map(|i| map_columns.iter().map(|(_, col)| col[i].clone()).collect())
        .collect();
    let map = GradedMap::new(
        std::sync::Arc::new(free),
        std::sync::Arc::new(module.clone()),
        0,
        matrix,
    )
    .unwrap();
    // image slices inside the realized module
    let (real, bases) =
        abexact::grmod::discover::realize_over_field(module, bound).unwrap();
    let mut image_bases: Vec<RMatrix> = Vec::new();
    for d in 0..=bound {
        let slice = map.slice(d);
        let mut cols = Vec::new();
        for j in 0..slice.cols() {
            // to realization coordinates
            let ambient = bases[d as usize].hstack(&module.relation_slice(d));
            if bases[d as usize].cols() == 0 {
                cols.push(Vec::new());
                continue;
            }
            let sol = slices::solve_coords(ring, &ambient, &slice.column(j))
                .unwrap()
                .unwrap();
            cols.push(sol[..bases[d as usize].cols()].to_vec());
        }
        let m = RMatrix::from_columns(real.dim(d), cols);
        image_bases.push(slices::image_basis(ring, &m).unwrap());
    }
    let dims: Vec<usize> = image_bases.iter().map(|b| b.cols()).collect();
    let mut out = SliceRealization::new(c, bound, dims);
    for d in 0..=bound - 2 {
        let src = &image_bases[d as usize];
        let tgt = &image_bases[(d + 2) as usize];
        for a in 0..n {
            let mut cols = Vec::new();
            for j in 0..src.cols() {
                let moved = real
                    .action_matrix(a, d)
                    .mul(&RMatrix::from_columns(src.rows(), vec![src.column(j)]));
                let sol = slices::solve_coords(ring, tgt, &moved.column(0))
                    .unwrap()
                    .expect("image closed under action");
                cols.push(sol);
            }
            out.set_action(a, d, RMatrix::from_columns(tgt.cols(), cols));
        }
    }
    out
}

fn random_element(rng: &mut ChaCha8Rng, module: &GradedModule, degree: i64) -> Vec<Polynomial> {
    let n = module.ctx.torus_rank;
    module
        .generator_degrees
        .iter()
        .map(|&g| {
            let diff = degree - g;
            if diff < 0 || diff % 2 != 0 {
                return Polynomial::zero(n);
            }
            let mut p = Polynomial::zero(n);
            for m in abexact::poly::Monomial::of_degree(n, diff) {
                let coeff = rng.gen_range(-2i64..=2);
                if coeff != 0 {
                    p = p.add(&Polynomial::monomial(
                        n,
                        m,
                        BigRational::from_integer(BigInt::from(coeff)),
                    ));
                }
            }
            p
        })
        .collect()
}

#[test]
fn acceptance_8c_depth_of_quotients_and_dims_of_submodules() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let n = 2usize;
    let window = n as i64 + 2;
    let mut ses_checked = 0usize;
    let mut sub_checked = 0usize;
    for _attempt in 0..40 {
        if ses_checked >= 8 && sub_checked >= 8 {
            break;
        }
        // ambient module: a random quotient sum that is reasonably tame
        let base = match rng.gen_range(0..3) {
            0 => GradedModule::free(ctx(n, "Q"), vec![0, 2]),
            1 => GradedModule::cyclic(ctx(n, "Q"), 0, vec![poly(n, "t1")]).unwrap(),
            _ => GradedModule::direct_sum(&[
                GradedModule::cyclic(ctx(n, "Q"), 0, vec![poly(n, "t1")]).unwrap(),
                GradedModule::free(ctx(n, "Q"), vec![2]),
            ]),
        };
        let bound = 16i64;
        let degree = 2 * rng.gen_range(0..=2i64);
        let cols: Vec<(i64, Vec<Polynomial>)> = (0..rng.gen_range(1..=2usize))
            .map(|_| (degree, random_element(&mut rng, &base, degree)))
            .collect();
        if cols.iter().all(|(_, c)| c.iter().all(|p| p.is_zero())) {
            continue;
        }
        // U = image, N = base / image
        let image_real = image_realization(&base, &cols, bound);
        if image_real.is_zero_up_to(bound) {
            continue;
        }
        let u = discover_presentation(&image_real, window).unwrap().module;
        let mut quotient = base.clone();
        for (_, col) in &cols {
            if col.iter().any(|p| !p.is_zero()) {
                quotient.push_relation(col.clone()).unwrap();
            }
        }
        // Lemma: depth N >= min(depth U - 1, depth M)
        let du = depth(&u, bound).unwrap().depth;
        let dm = depth(&base, bound).unwrap().depth;
        let dn = depth(&quotient, bound).unwrap().depth;
        if let (DepthValue::Finite(du), DepthValue::Finite(dm)) = (du, dm) {
            match dn {
                DepthValue::Finite(dn) => {
                    assert!(
                        dn >= (du - 1).min(dm),
                        "depth({dn}) < min({du}-1, {dm})"
                    );
                }
                DepthValue::Infinite => {}
                DepthValue::Unknown => panic!("unknown depth"),
            }
            ses_checked += 1;
        }
        // Lemma: a nonzero submodule of a Cohen-Macaulay module has the
        // same dimension
        let cm_ambient = GradedModule::cyclic(ctx(n, "Q"), 0, vec![poly(n, "t1")]).unwrap();
        let sub_degree = 2 * rng.gen_range(0..=2i64);
        let sub_cols: Vec<(i64, Vec<Polynomial>)> =
            vec![(sub_degree, random_element(&mut rng, &cm_ambient, sub_degree))];
        let sub_real = image_realization(&cm_ambient, &sub_cols, bound);
        if !sub_real.is_zero_up_to(bound) {
            let sub = discover_presentation(&sub_real, window).unwrap().module;
            let d_sub = krull_dim(&sub, bound).unwrap().dim;
            let d_amb = krull_dim(&cm_ambient, bound).unwrap().dim;
            assert_eq!(d_sub, d_amb, "submodule dimension differs");
            sub_checked += 1;
        }
    }
    assert!(
        ses_checked >= 6 && sub_checked >= 6,
        "corpus too degenerate: {ses_checked}/{sub_checked}"
    );
    let elapsed = start.elapsed();
    println!("PASS criterion 8c: quotient-depth and submodule-dimension properties on {ses_checked}+{sub_checked} cases in {elapsed:?}");
}

#[test]
fn acceptance_8d_freeness_iff_maximal_cohen_macaulay() {
    let start = Instant::now();
    let n = 2usize;
    let bound = 16i64;
    // a free module in disguise: generators 0, 2 with the relation
    // t1 g0 = g1, presentation of a module isomorphic to A
    let mut disguised = GradedModule::free(ctx(n, "Q"), vec![0, 2]);
    let mut entries = vec![poly(n, "t1"), poly(n, "-1")];
    entries[0] = poly(n, "t1");
    entries[1] = poly(n, "-1");
    disguised.push_relation(entries).unwrap();
    let corpus: Vec<(GradedModule, &str)> = vec![
        (GradedModule::free(ctx(n, "Q"), vec![0, 4]), "free rank 2"),
        (disguised, "disguised free"),
        (
            GradedModule::cyclic(ctx(n, "Q"), 0, vec![poly(n, "t1")]).unwrap(),
            "A/(t1)",
        ),
        (
            GradedModule::cyclic(ctx(n, "Q"), 0, vec![poly(n, "t1^2")]).unwrap(),
            "A/(t1^2)",
        ),
        (
            GradedModule::direct_sum(&[
                GradedModule::cyclic(ctx(n, "Q"), 0, vec![poly(n, "t1")]).unwrap(),
                GradedModule::free(ctx(n, "Q"), vec![0]),
            ]),
            "A/(t1) + A",
        ),
        (
            GradedModule::cyclic(ctx(n, "Q"), 0, vec![poly(n, "t1*t2")]).unwrap(),
            "A/(t1 t2)",
        ),
    ];
    for (module, name) in corpus {
        let free = abexact::grmod::resolution::is_free(&module, bound).unwrap().free;
        let d = depth(&module, bound).unwrap().depth;
        let k = krull_dim(&module, bound).unwrap().dim;
        let cm_of_max_dim = matches!((d, k), (DepthValue::Finite(a), DimValue::Finite(b)) if a == b && b == n as i64);
        assert_eq!(free, cm_of_max_dim, "{name}");
    }
    let elapsed = start.elapsed();
    println!("PASS criterion 8d: freeness equals maximal Cohen-Macaulayness on the corpus in {elapsed:?}");
}

#[test]
fn acceptance_9_hilbert_of_relative_and_absolute_terms() {
    // Hilbert additivity along the verified short exact sequences: the
    // middle ranks are the sums of the outer ranks in every degree, for
    // the projective-plane sequence over the rationals.
    let start = Instant::now();
    let p2 = catalog::model("P2").unwrap();
    let q = make_ring("Q").unwrap();
    let data = equivariant_cohomology(&p2, &q, 16).unwrap();
    let h = data.module.hilbert_function(12).unwrap();
    let t0 = relative_term(&p2, 0, &q).unwrap().hilbert_function(12).unwrap();
    let t1 = relative_term(&p2, 1, &q).unwrap().hilbert_function(13).unwrap();
    let t2 = relative_term(&p2, 2, &q).unwrap().hilbert_function(14).unwrap();
    // exactness: alternating sum of slice ranks vanishes
    for d in 0..=12usize {
        let lhs = h[d].free_rank as i64 + t1[d + 1].free_rank as i64;
        let rhs = t0[d].free_rank as i64 + t2[d + 2].free_rank as i64;
        assert_eq!(lhs, rhs, "degree {d}");
    }
    let elapsed = start.elapsed();
    println!("PASS euler characteristic check: alternating ranks vanish degreewise in {elapsed:?}");
}

#[test]
fn acceptance_truncation_monotonicity() {
    // exactness of the full sequence implies exactness of each truncation
    let start = Instant::now();
    let z = make_ring("Z").unwrap();
    for name in ["P1", "P2", "P1xP1"] {
        let model = catalog::model(name).unwrap();
        let full = verify(&model, &z, SequenceKind::AtiyahBredonFull, 12).unwrap();
        assert_eq!(full.verdict, Verdict::ExactUpToD);
        for k in 0..=model.torus_rank() {
            let truncated =
                verify(&model, &z, SequenceKind::AtiyahBredonTruncated(k), 12).unwrap();
            assert_eq!(truncated.verdict, Verdict::ExactUpToD, "{name} k={k}");
        }
    }
    let elapsed = start.elapsed();
    println!("PASS truncation monotonicity on the golden fans in {elapsed:?}");
}
