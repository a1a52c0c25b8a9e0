//! Randomized self-checks: generate branch configurations with controlled
//! p-adic clustering and verify every structural identity of the pipeline
//! on them. Used by the `check` CLI subcommand and by the acceptance suite.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::arith::{prime_power, OddPrime};
use crate::atlas;
use crate::canon::LabeledTree;
use crate::error::{Error, Result};
use crate::fiber::{
    analyze_config, build_special_fiber, gauss_valuation_cross_check, GluingOrder,
    ReductionReport,
};
use crate::tree::{
    naive_tree_oracle, BranchConfig, NormalizationTrace, Parity, RawPoint,
};

const PRIMES: [u64; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
    89, 97,
];

/// Deterministic per-case RNG: the suite can be sharded by index.
pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn small_int(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::from_integer(BigInt::from(rng.random_range(-20i64..=20)))
}

/// A branch configuration with clustering driven by shared p-adic digits:
/// most points derive from an existing one by adding u * p^d, so discs of
/// every depth (occasionally negative) appear.
pub fn random_config(rng: &mut ChaCha8Rng, genus: usize) -> BranchConfig {
    let p = *PRIMES.choose(rng).unwrap();
    let prime = OddPrime::new(p).unwrap();
    let n = 2 * genus + 2;
    let with_infinity = rng.random_bool(0.2);
    let finite_needed = if with_infinity { n - 1 } else { n };
    let mut points: Vec<BigRational> = vec![small_int(rng)];
    while points.len() < finite_needed {
        let candidate = if rng.random_bool(0.65) {
            let base = points.choose(rng).unwrap().clone();
            let d: i64 = if rng.random_bool(0.1) {
                -rng.random_range(1..=2)
            } else {
                rng.random_range(1..=4)
            };
            let u = BigInt::from(rng.random_range(1..p));
            base + BigRational::from_integer(u) * prime_power(prime, d)
        } else {
            small_int(rng)
        };
        if !points.contains(&candidate) {
            points.push(candidate);
        }
    }
    let unit = loop {
        let u = rng.random_range(-9i64..=9);
        if u != 0 && u.unsigned_abs() % p != 0 {
            break u;
        }
    };
    let k: i64 = [0, 0, 0, 1, 1, 2][rng.random_range(0..6)];
    let c = BigRational::from_integer(BigInt::from(unit)) * prime_power(prime, k);
    let mut raw: Vec<RawPoint> = points.into_iter().map(RawPoint::Finite).collect();
    if with_infinity {
        raw.push(RawPoint::Infinity);
    }
    raw.shuffle(rng);
    BranchConfig::new(prime, c, raw).expect("generated input is valid")
}

/// Cached atlas code sets, one per genus; enumeration is the expensive part
/// of the closure check.
#[derive(Default)]
pub struct AtlasCache {
    codes: std::collections::BTreeMap<usize, std::collections::BTreeSet<String>>,
}

impl AtlasCache {
    pub fn codes_for(&mut self, genus: usize) -> Result<&std::collections::BTreeSet<String>> {
        if let std::collections::btree_map::Entry::Vacant(e) = self.codes.entry(genus) {
            let set = atlas::enumerate_types(genus)?
                .iter()
                .map(atlas::canonical_code)
                .collect();
            e.insert(set);
        }
        Ok(&self.codes[&genus])
    }
}

fn fail(msg: String) -> Error {
    Error::InternalInstability(msg)
}

/// The combinatorial face of a report compared across coordinate changes:
/// marked tree code, extension degree, fiber code, and the rank counts.
fn combinatorial_signature(report: &ReductionReport) -> (String, u64, String, String) {
    (
        report.tree.to_labeled().canonical_code(),
        report.decision.e,
        report.fiber.canonical_code(),
        format!(
            "t{},a{},n{},m{},pg{},f{}{}{}",
            report.jacobian.toric_rank,
            report.jacobian.abelian_rank,
            report.jacobian.n0,
            report.jacobian.m0,
            report.jacobian.potential_good,
            report.flags.marked_genus0_good_reduction as u8,
            report.flags.good_reduction_over_k as u8,
            report.flags.good_reduction_after_extension as u8,
        ),
    )
}

/// Tree code with mark indices renamed through `sigma` (new index i plays
/// the role of sigma[i]).
fn relabeled_tree_code(report: &ReductionReport, sigma: &[usize]) -> String {
    let tree = &report.tree;
    LabeledTree {
        vertex_labels: tree
            .vertices
            .iter()
            .map(|v| {
                let mut marks: Vec<usize> = v.marks.iter().map(|&m| sigma[m]).collect();
                marks.sort_unstable();
                let strs: Vec<String> = marks.iter().map(|m| m.to_string()).collect();
                format!("m{}", strs.join(","))
            })
            .collect(),
        edges: tree
            .edges
            .iter()
            .map(|e| (e.a, e.b, e.thickness.to_string()))
            .collect(),
    }
    .canonical_code()
}

/// Genus conservation, rank identity, edge census and |T| parity.
pub fn check_counting_identities(report: &ReductionReport) -> Result<()> {
    let g = report.config.genus;
    let total = report.fiber.total_genus() as i64 + report.fiber.betti();
    if total != g as i64 {
        return Err(fail(format!("genus conservation: {total} != {g}")));
    }
    let n0 = report
        .edge_classes
        .iter()
        .filter(|c| c.parity == Parity::Even)
        .count() as i64;
    let m0 = report
        .fiber
        .components
        .iter()
        .filter(|c| c.sheet != crate::fiber::Sheet::Only)
        .count() as i64
        / 2;
    if n0 - m0 != report.fiber.betti() {
        return Err(fail(format!(
            "rank identity: n0 - m0 = {} but Betti = {}",
            n0 - m0,
            report.fiber.betti()
        )));
    }
    if report.jacobian.toric_rank as i64 != n0 - m0 {
        return Err(fail("reported toric rank disagrees with counts".into()));
    }
    for comp in &report.fiber.components {
        if comp.t_size() % 2 != 0 {
            return Err(fail("odd |T|".into()));
        }
    }
    Ok(())
}

/// The two tree constructions agree up to isomorphism with marks and
/// thicknesses.
pub fn check_tree_oracle(report: &ReductionReport) -> Result<()> {
    let oracle = naive_tree_oracle(&report.config)?;
    let a = report.tree.to_labeled().canonical_code();
    let b = oracle.to_labeled().canonical_code();
    if a != b {
        return Err(fail(format!("tree oracle mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// Closed-form vertex valuations equal coefficient minima, everywhere.
pub fn check_gauss_oracle(report: &ReductionReport) -> Result<()> {
    for v in 0..report.tree.vertices.len() {
        gauss_valuation_cross_check(&report.config, &report.tree, v)?;
    }
    Ok(())
}

/// With e as decided, odd edges have even extended thickness, and all
/// reported thicknesses are positive.
pub fn check_extension_sufficiency(report: &ReductionReport) -> Result<()> {
    for (eid, class) in report.edge_classes.iter().enumerate() {
        let extended = report.decision.e * report.tree.edges[eid].thickness;
        if class.parity == Parity::Odd && !extended.is_multiple_of(2) {
            return Err(Error::ThicknessParity(extended));
        }
    }
    if report.fiber.edges.iter().any(|e| e.thickness == 0) {
        return Err(fail("nonpositive fiber thickness".into()));
    }
    Ok(())
}

/// Above either side of every base edge, the fiber is connected.
pub fn check_side_connectedness(report: &ReductionReport) -> Result<()> {
    for eid in 0..report.tree.edges.len() {
        for side in [report.tree.edges[eid].a, report.tree.edges[eid].b] {
            let base_side = report.tree.side_vertices(eid, side);
            let comps = report.fiber.components_above(&base_side);
            if !report.fiber.is_connected_on(&comps) {
                return Err(fail(format!(
                    "side preimage of edge {eid} at {side} is disconnected"
                )));
            }
        }
    }
    Ok(())
}

/// Rebuilding the fiber in reversed BFS order with swapped sheet pairing
/// gives an isomorphic graph.
pub fn check_gluing_independence(report: &ReductionReport) -> Result<()> {
    let other = build_special_fiber(
        &report.tree,
        &report.edge_classes,
        &report.decision,
        &report.config,
        GluingOrder {
            reverse_bfs: true,
            swap_pairing: true,
        },
    )?;
    if other.canonical_code() != report.fiber.canonical_code() {
        return Err(fail("gluing order changed the fiber graph".into()));
    }
    Ok(())
}

/// The abstract type of the computed tree appears in the atlas.
pub fn check_atlas_closure(report: &ReductionReport, cache: &mut AtlasCache) -> Result<()> {
    let code = report.tree.to_labeled_abstract().canonical_code();
    if !cache.codes_for(report.config.genus)?.contains(&code) {
        return Err(fail(format!(
            "tree type {code} missing from the genus-{} atlas",
            report.config.genus
        )));
    }
    Ok(())
}

fn analyze_points(
    base: &ReductionReport,
    c: BigRational,
    points: Vec<BigRational>,
) -> Result<ReductionReport> {
    let config = BranchConfig {
        p: base.config.p,
        c,
        points,
        genus: base.config.genus,
        trace: NormalizationTrace::Identity,
    };
    analyze_config(config)
}

/// Invariance of the combinatorial report under relabeling, translation,
/// unit scaling, inversion, and square twists; tree and fiber invariance
/// under non-square unit twists.
pub fn check_invariance(report: &ReductionReport, rng: &mut ChaCha8Rng) -> Result<()> {
    let cfg = &report.config;
    let base_sig = combinatorial_signature(report);
    let n = cfg.point_count();

    // Point relabeling: identical tree up to the induced mark renaming.
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    let shuffled: Vec<BigRational> =
        sigma.iter().map(|&i| cfg.points[i].clone()).collect();
    let relabeled = analyze_points(report, cfg.c.clone(), shuffled)?;
    if relabeled_tree_code(&relabeled, &sigma) != report.tree.to_labeled().canonical_code()
    {
        return Err(fail("relabeling changed the tree".into()));
    }

    // x -> x + b.
    let b = small_int(rng);
    let shifted: Vec<BigRational> = cfg.points.iter().map(|x| x + &b).collect();
    let sig = combinatorial_signature(&analyze_points(report, cfg.c.clone(), shifted)?);
    if sig != base_sig {
        return Err(fail("translation changed the combinatorial report".into()));
    }

    // x -> u x for a unit u; the leading coefficient picks up the square
    // u^(2g+2) under the matching coordinate change, drop it.
    let u = loop {
        let v = rng.random_range(-9i64..=9);
        if v != 0 && v.unsigned_abs() % cfg.p.get() != 0 {
            break BigRational::from_integer(BigInt::from(v));
        }
    };
    let scaled: Vec<BigRational> = cfg.points.iter().map(|x| x * &u).collect();
    let sig = combinatorial_signature(&analyze_points(report, cfg.c.clone(), scaled)?);
    if sig != base_sig {
        return Err(fail("unit scaling changed the combinatorial report".into()));
    }

    // x -> 1/(x - a) for a rational non-branch point a; the honest
    // transform of the same curve multiplies c by prod (a - xi).
    let a = {
        let mut a = BigRational::zero();
        while cfg.points.contains(&a) {
            a += BigRational::one();
        }
        a
    };
    let inverted: Vec<BigRational> = cfg
        .points
        .iter()
        .map(|x| BigRational::one() / (x - &a))
        .collect();
    let mut c_inv = cfg.c.clone();
    for x in &cfg.points {
        c_inv *= &a - x;
    }
    let sig = combinatorial_signature(&analyze_points(report, c_inv, inverted)?);
    if sig != base_sig {
        return Err(fail("inversion changed the combinatorial report".into()));
    }

    // c -> lambda^2 c.
    let lambda = loop {
        let num = rng.random_range(-6i64..=6);
        if num != 0 {
            break BigRational::new(BigInt::from(num), BigInt::from(rng.random_range(1i64..=6)))
                * prime_power(cfg.p, rng.random_range(0..=1));
        }
    };
    let twisted = analyze_points(
        report,
        &cfg.c * &lambda * &lambda,
        cfg.points.clone(),
    )?;
    let sig = combinatorial_signature(&twisted);
    if sig != base_sig {
        return Err(fail("square twist changed the combinatorial report".into()));
    }
    if twisted.fiber.canonical_code_with_split() != report.fiber.canonical_code_with_split()
    {
        return Err(fail("square twist moved a split flag".into()));
    }

    // Twist by a non-square unit: tree and fiber graph unchanged (only the
    // split flags may move).
    let nonsquare = first_nonsquare(cfg.p);
    let replaced = analyze_points(
        report,
        &cfg.c * BigRational::from_integer(BigInt::from(nonsquare)),
        cfg.points.clone(),
    )?;
    if replaced.tree.to_labeled().canonical_code()
        != report.tree.to_labeled().canonical_code()
        || replaced.fiber.canonical_code() != report.fiber.canonical_code()
    {
        return Err(fail("unit twist changed the tree or fiber graph".into()));
    }
    Ok(())
}

fn first_nonsquare(p: OddPrime) -> u64 {
    (2..p.get())
        .find(|&u| crate::arith::legendre(u, p) == Ok(-1))
        .expect("every odd prime has a non-square")
}

/// Everything checked on one case. `full` additionally runs the O(n^3)
/// oracle and the invariance transforms.
pub fn check_case(
    config: BranchConfig,
    rng: &mut ChaCha8Rng,
    cache: &mut AtlasCache,
    full: bool,
) -> Result<()> {
    let report = analyze_config(config)?;
    check_counting_identities(&report)?;
    check_gauss_oracle(&report)?;
    check_extension_sufficiency(&report)?;
    check_side_connectedness(&report)?;
    check_gluing_independence(&report)?;
    check_atlas_closure(&report, cache)?;
    if full {
        check_tree_oracle(&report)?;
        check_invariance(&report, rng)?;
    }
    Ok(())
}

/// Run `cases` randomized checks; deterministic for a fixed seed.
pub fn run_suite(seed: u64, cases: usize) -> Result<()> {
    let mut cache = AtlasCache::default();
    for index in 0..cases {
        let mut rng = case_rng(seed, index as u64);
        let genus = 1 + index % 4;
        let config = random_config(&mut rng, genus);
        check_case(config, &mut rng, &mut cache, true).map_err(|e| {
            fail(format!("case {index} (seed {seed}) failed: {e}"))
        })?;
    }
    Ok(())
}
