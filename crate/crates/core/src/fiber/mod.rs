//! From the marked genus-0 tree to the special fiber of the stable marked
//! model of the curve itself.
//!
//! Each tree vertex carries a double cover of its projective line, branched
//! over the marks and the odd double points on it; even double points have
//! two preimages of full (extended) thickness, odd ones a single preimage
//! of half thickness. Whether a ramified quadratic base extension is needed
//! is decided by the parities of the Gauss valuations of f on the vertex
//! charts.

use num_rational::BigRational;

use crate::arith::{
    self, gauss_valuation, odd_multiplicity_roots, reduce_unit_poly, substitute_affine,
    val, FpPoly,
};
use crate::canon::LabeledMultigraph;
use crate::error::{Error, Result};
use crate::tree::{
    build_cluster_hierarchy, classify_edges, mark_residues, stabilize, BranchConfig,
    EdgeClass, MarkedTree, P1Residue, Parity, RawPoint,
};

/// Whether a ramified degree-2 base extension is needed, with the Gauss
/// valuation of f on every vertex chart.
///
/// The criterion is the computable surrogate "all per-vertex Gauss
/// valuations of f are even"; reports carry it under the name
/// `gauss_valuation_parity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionDecision {
    /// Ramification index of the base extension, 1 or 2.
    pub e: u64,
    /// Gauss valuation of f on each vertex chart, indexed by vertex id.
    pub valuations: Vec<i64>,
    /// valuations mod 2.
    pub parities: Vec<u8>,
}

/// v(c) + sum_i min(v(a - xi_i), d) for a vertex with center a and depth d;
/// equals the Gauss valuation of f(a + p^d X) and is cross-checked against
/// it everywhere in the test suite.
pub fn vertex_f_valuation(config: &BranchConfig, tree: &MarkedTree, vertex: usize) -> i64 {
    let vert = &tree.vertices[vertex];
    let a = &config.points[vert.cluster.center()];
    let d = vert.cluster.depth;
    let mut total = val(&config.c, config.p).finite();
    for xi in &config.points {
        total += val(&(a - xi), config.p).min_finite(d);
    }
    total
}

/// e = 1 if every vertex valuation of f is even, else e = 2. After the
/// extension all working valuations and thicknesses are multiplied by e,
/// which makes the extended thickness at every odd double point even.
pub fn decide_extension(config: &BranchConfig, tree: &MarkedTree) -> ExtensionDecision {
    let valuations: Vec<i64> = (0..tree.vertices.len())
        .map(|v| vertex_f_valuation(config, tree, v))
        .collect();
    let parities: Vec<u8> = valuations.iter().map(|v| (v.rem_euclid(2)) as u8).collect();
    let e = if parities.iter().all(|&x| x == 0) { 1 } else { 2 };
    ExtensionDecision {
        e,
        valuations,
        parities,
    }
}

/// Which of the two sheets a fiber component lies on. `Only` for the
/// irreducible double cover over a vertex with branch points; `Plus` and
/// `Minus` for the two lines over a vertex without.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    Only,
    Plus,
    Minus,
}

impl std::fmt::Display for Sheet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sheet::Only => write!(f, "only"),
            Sheet::Plus => write!(f, "plus"),
            Sheet::Minus => write!(f, "minus"),
        }
    }
}

/// Arithmetic refinement for two-line components: split if the two lines
/// are individually defined over F_p, inert if they are conjugate over the
/// quadratic extension. Never used in genus or rank computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitClass {
    Split,
    Inert,
    NotApplicable,
}

impl std::fmt::Display for SplitClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplitClass::Split => write!(f, "split"),
            SplitClass::Inert => write!(f, "inert"),
            SplitClass::NotApplicable => write!(f, "not_applicable"),
        }
    }
}

/// Irreducible component of the special fiber of the curve's stable model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberComponent {
    pub base_vertex: usize,
    pub sheet: Sheet,
    /// Marks on the base vertex (empty unless sheet is Only).
    pub t_marks: Vec<usize>,
    /// Odd base edges at the base vertex (empty unless sheet is Only).
    pub t_odd_edges: Vec<usize>,
    pub genus: usize,
    pub split: SplitClass,
}

impl FiberComponent {
    pub fn t_size(&self) -> usize {
        self.t_marks.len() + self.t_odd_edges.len()
    }
}

/// Double point of the special fiber, lying above a base tree edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberEdge {
    pub a: usize,
    pub b: usize,
    pub base_edge: usize,
    /// In the extended ring's normalization when e = 2.
    pub thickness: u64,
    pub parity: Parity,
}

/// Dual graph of the special fiber of the stable marked model of C.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialFiberGraph {
    pub components: Vec<FiberComponent>,
    pub edges: Vec<FiberEdge>,
    /// mark index -> component id.
    pub lifted_marks: Vec<usize>,
}

impl SpecialFiberGraph {
    pub fn betti(&self) -> i64 {
        self.edges.len() as i64 - self.components.len() as i64 + 1
    }

    pub fn total_genus(&self) -> usize {
        self.components.iter().map(|c| c.genus).sum()
    }

    /// Canonical code of the dual graph decorated with genera, lifted mark
    /// sets, sheet pairing flags, thicknesses and parities. Split flags are
    /// excluded: they move under quadratic twists by non-squares while the
    /// graph does not.
    pub fn canonical_code(&self) -> String {
        self.to_labeled(false).canonical_code()
    }

    /// As [`Self::canonical_code`] but with split flags folded in.
    pub fn canonical_code_with_split(&self) -> String {
        self.to_labeled(true).canonical_code()
    }

    fn to_labeled(&self, with_split: bool) -> LabeledMultigraph {
        LabeledMultigraph {
            vertex_labels: self
                .components
                .iter()
                .enumerate()
                .map(|(cid, c)| {
                    let marks: Vec<String> = self
                        .lifted_marks
                        .iter()
                        .enumerate()
                        .filter(|&(_, &comp)| comp == cid)
                        .map(|(m, _)| m.to_string())
                        .collect();
                    let pair = matches!(c.sheet, Sheet::Plus | Sheet::Minus);
                    let split = if with_split {
                        format!(",{}", c.split)
                    } else {
                        String::new()
                    };
                    format!("g{},pair{},m{}{}", c.genus, pair as u8, marks.join("."), split)
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| (e.a, e.b, format!("t{},{}", e.thickness, e.parity)))
                .collect(),
        }
    }

    /// Component ids lying above the given base vertices.
    pub fn components_above(&self, base: &[usize]) -> Vec<usize> {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, c)| base.contains(&c.base_vertex))
            .map(|(i, _)| i)
            .collect()
    }

    /// Is the induced subgraph on `comps` connected?
    pub fn is_connected_on(&self, comps: &[usize]) -> bool {
        if comps.is_empty() {
            return true;
        }
        let mut seen: Vec<usize> = vec![comps[0]];
        let mut stack = vec![comps[0]];
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (x, y) in [(e.a, e.b), (e.b, e.a)] {
                    if x == v && comps.contains(&y) && !seen.contains(&y) {
                        seen.push(y);
                        stack.push(y);
                    }
                }
            }
        }
        seen.len() == comps.len()
    }
}

/// Gluing conventions for [`build_special_fiber`]; both choices produce
/// isomorphic graphs, which the test suite checks by canonical code.
#[derive(Debug, Clone, Copy, Default)]
pub struct GluingOrder {
    pub reverse_bfs: bool,
    pub swap_pairing: bool,
}

fn component_t_data(
    tree: &MarkedTree,
    classes: &[EdgeClass],
    vertex: usize,
) -> (Vec<usize>, Vec<usize>) {
    let marks = tree.vertices[vertex].marks.clone();
    let odd_edges: Vec<usize> = tree
        .edges
        .iter()
        .enumerate()
        .filter(|(eid, e)| {
            (e.a == vertex || e.b == vertex) && classes[*eid].parity == Parity::Odd
        })
        .map(|(eid, _)| eid)
        .collect();
    (marks, odd_edges)
}

/// Lift the marked tree to the dual graph of the curve's special fiber.
///
/// Components are created in BFS order starting from the vertex carrying
/// the lowest mark; a vertex with branch points lifts to one component of
/// genus |T|/2 - 1, one without lifts to a pair of lines. An odd base edge
/// contributes one double point of thickness e*delta/2, an even one two
/// double points of thickness e*delta.
pub fn build_special_fiber(
    tree: &MarkedTree,
    classes: &[EdgeClass],
    decision: &ExtensionDecision,
    config: &BranchConfig,
    order: GluingOrder,
) -> Result<SpecialFiberGraph> {
    let e = decision.e;
    // Start from the component containing the lowest-index mark.
    let start = tree
        .vertices
        .iter()
        .position(|v| v.marks.contains(&0))
        .expect("mark 0 sits on some vertex");

    // BFS order over base vertices.
    let adj = tree.adjacency();
    let mut bfs: Vec<(usize, Option<usize>)> = vec![(start, None)];
    let mut seen = vec![false; tree.vertices.len()];
    seen[start] = true;
    let mut head = 0;
    while head < bfs.len() {
        let (v, _) = bfs[head];
        head += 1;
        let mut nbrs: Vec<(usize, usize)> = adj[v]
            .iter()
            .copied()
            .filter(|&(u, _)| !seen[u])
            .collect();
        nbrs.sort_unstable();
        if order.reverse_bfs {
            nbrs.reverse();
        }
        for (u, eid) in nbrs {
            seen[u] = true;
            bfs.push((u, Some(eid)));
        }
    }

    let mut components: Vec<FiberComponent> = Vec::new();
    let mut edges: Vec<FiberEdge> = Vec::new();
    // Preimages of each base vertex: one id or a (plus, minus) pair.
    let mut lifts: Vec<Option<(usize, Option<usize>)>> = vec![None; tree.vertices.len()];

    for &(v, via) in &bfs {
        let (t_marks, t_odd_edges) = component_t_data(tree, classes, v);
        let t = t_marks.len() + t_odd_edges.len();
        if t % 2 != 0 {
            return Err(Error::InternalInstability(format!(
                "vertex {v} has odd |T| = {t}"
            )));
        }
        let lift = if t > 0 {
            let id = components.len();
            components.push(FiberComponent {
                base_vertex: v,
                sheet: Sheet::Only,
                t_marks,
                t_odd_edges,
                genus: t / 2 - 1,
                split: SplitClass::NotApplicable,
            });
            (id, None)
        } else {
            let plus = components.len();
            components.push(FiberComponent {
                base_vertex: v,
                sheet: Sheet::Plus,
                t_marks: vec![],
                t_odd_edges: vec![],
                genus: 0,
                split: SplitClass::NotApplicable,
            });
            let minus = components.len();
            components.push(FiberComponent {
                base_vertex: v,
                sheet: Sheet::Minus,
                t_marks: vec![],
                t_odd_edges: vec![],
                genus: 0,
                split: SplitClass::NotApplicable,
            });
            (plus, Some(minus))
        };
        lifts[v] = Some(lift);

        // Glue to the already-built part along the discovery edge.
        let Some(eid) = via else { continue };
        let edge = &tree.edges[eid];
        let other = if edge.a == v { edge.b } else { edge.a };
        let parent = lifts[other].expect("BFS parent already lifted");
        let delta = e * edge.thickness;
        match classes[eid].parity {
            Parity::Odd => {
                if !delta.is_multiple_of(2) {
                    return Err(Error::ThicknessParity(delta));
                }
                // Both sides are Only components: an odd edge belongs to
                // both T-sets.
                edges.push(FiberEdge {
                    a: parent.0,
                    b: lift.0,
                    base_edge: eid,
                    thickness: delta / 2,
                    parity: Parity::Odd,
                });
            }
            Parity::Even => match (parent.1, lift.1) {
                (None, None) => {
                    // Two parallel double points between the two covers.
                    for _ in 0..2 {
                        edges.push(FiberEdge {
                            a: parent.0,
                            b: lift.0,
                            base_edge: eid,
                            thickness: delta,
                            parity: Parity::Even,
                        });
                    }
                }
                (None, Some(minus)) => {
                    for target in [lift.0, minus] {
                        edges.push(FiberEdge {
                            a: parent.0,
                            b: target,
                            base_edge: eid,
                            thickness: delta,
                            parity: Parity::Even,
                        });
                    }
                }
                (Some(pminus), None) => {
                    for source in [parent.0, pminus] {
                        edges.push(FiberEdge {
                            a: source,
                            b: lift.0,
                            base_edge: eid,
                            thickness: delta,
                            parity: Parity::Even,
                        });
                    }
                }
                (Some(pminus), Some(minus)) => {
                    let (to_plus, to_minus) = if order.swap_pairing {
                        (minus, lift.0)
                    } else {
                        (lift.0, minus)
                    };
                    edges.push(FiberEdge {
                        a: parent.0,
                        b: to_plus,
                        base_edge: eid,
                        thickness: delta,
                        parity: Parity::Even,
                    });
                    edges.push(FiberEdge {
                        a: pminus,
                        b: to_minus,
                        base_edge: eid,
                        thickness: delta,
                        parity: Parity::Even,
                    });
                }
            },
        }
    }

    let lifted_marks: Vec<usize> = (0..config.point_count())
        .map(|m| {
            let v = tree
                .vertices
                .iter()
                .position(|vert| vert.marks.contains(&m))
                .expect("every mark sits on a vertex");
            lifts[v].expect("vertex lifted").0
        })
        .collect();

    let fiber = SpecialFiberGraph {
        components,
        edges,
        lifted_marks,
    };
    verify_fiber(&fiber, tree, classes, config)?;
    Ok(fiber)
}

fn verify_fiber(
    fiber: &SpecialFiberGraph,
    tree: &MarkedTree,
    classes: &[EdgeClass],
    config: &BranchConfig,
) -> Result<()> {
    let g = config.genus as i64;
    let fail = |msg: String| Err(Error::InternalInstability(msg));
    if !fiber.is_connected_on(&(0..fiber.components.len()).collect::<Vec<_>>()) {
        return fail("fiber graph disconnected".into());
    }
    if fiber.total_genus() as i64 + fiber.betti() != g {
        return fail(format!(
            "genus conservation failed: {} + {} != {g}",
            fiber.total_genus(),
            fiber.betti()
        ));
    }
    let odd = classes.iter().filter(|c| c.parity == Parity::Odd).count();
    let even = classes.len() - odd;
    if fiber.edges.len() != odd + 2 * even {
        return fail("edge census failed".into());
    }
    let pairs = tree
        .vertices
        .iter()
        .enumerate()
        .filter(|(v, _)| {
            let (m, o) = component_t_data(tree, classes, *v);
            m.is_empty() && o.is_empty()
        })
        .count();
    if fiber.components.len() != tree.vertices.len() + pairs {
        return fail("component census failed".into());
    }
    Ok(())
}

/// The reduced right-hand side F of y^2 = F on the chart of `vertex`: f is
/// pulled back along x = a + p^d X, divided by p to its Gauss valuation and
/// reduced mod p. Valid for e = 1 and e = 2 alike; after the extension p is
/// the square of the uniformizer, so f/p^v still differs from the cover's
/// defining unit by a square.
pub fn component_equation(
    config: &BranchConfig,
    tree: &MarkedTree,
    decision: &ExtensionDecision,
    vertex: usize,
) -> Result<FpPoly> {
    let vert = &tree.vertices[vertex];
    let a = &config.points[vert.cluster.center()];
    let d = vert.cluster.depth;
    let f = config.defining_poly();
    let sub = substitute_affine(&f, a, d, config.p);
    reduce_unit_poly(&sub, decision.valuations[vertex], config.p)
}

/// SPLIT or INERT for a two-line component: its reduced equation is a unit
/// constant times a square, and the Legendre symbol of that constant
/// decides whether the two lines are rational.
pub fn split_or_inert(equation: &FpPoly, component: &FiberComponent) -> Result<SplitClass> {
    if component.t_size() > 0 {
        return Ok(SplitClass::NotApplicable);
    }
    let odd = odd_multiplicity_roots(equation);
    if !odd.roots.is_empty() || !odd.even_part_is_square || !equation.degree().is_multiple_of(2) {
        return Err(Error::NotTwoLineComponent(equation.to_string()));
    }
    Ok(match arith::legendre(odd.constant, equation.prime())? {
        1 => SplitClass::Split,
        _ => SplitClass::Inert,
    })
}

/// Reduction type of the Jacobian, from the counts of Prop.-style data:
/// n0 even double points, m0 components with neither marks nor odd double
/// points; the toric rank n0 - m0 is recomputed as the first Betti number
/// of the fiber graph and both must agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobianReport {
    pub toric_rank: usize,
    pub abelian_rank: usize,
    pub n0: usize,
    pub m0: usize,
    pub potential_good: bool,
}

pub fn jacobian_report(
    fiber: &SpecialFiberGraph,
    tree: &MarkedTree,
    classes: &[EdgeClass],
) -> Result<JacobianReport> {
    let n0 = classes.iter().filter(|c| c.parity == Parity::Even).count();
    let m0 = tree
        .vertices
        .iter()
        .enumerate()
        .filter(|(v, vert)| {
            vert.marks.is_empty()
                && !tree.edges.iter().enumerate().any(|(eid, e)| {
                    (e.a == *v || e.b == *v) && classes[eid].parity == Parity::Odd
                })
        })
        .count();
    let from_counts = n0 as i64 - m0 as i64;
    let from_graph = fiber.betti();
    if from_counts != from_graph {
        return Err(Error::RankMismatch {
            from_counts,
            from_graph,
        });
    }
    let toric_rank = from_counts as usize;
    Ok(JacobianReport {
        toric_rank,
        abelian_rank: fiber.total_genus(),
        n0,
        m0,
        potential_good: n0 == 0,
    })
}

/// Good-reduction summary. The marked genus-0 curve has good reduction iff
/// its tree is a single vertex; the curve itself then has good reduction
/// over the base field iff additionally no extension is needed (e = 1),
/// and always after the degree-2 extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flags {
    pub marked_genus0_good_reduction: bool,
    pub good_reduction_over_k: bool,
    pub good_reduction_after_extension: bool,
}

/// The end-to-end result of the reduction computation.
#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub config: BranchConfig,
    pub tree: MarkedTree,
    pub edge_classes: Vec<EdgeClass>,
    pub decision: ExtensionDecision,
    pub fiber: SpecialFiberGraph,
    /// Reduced equation per fiber component (pairs share their vertex's).
    pub equations: Vec<FpPoly>,
    pub jacobian: JacobianReport,
    pub flags: Flags,
}

/// Run the whole pipeline on raw input: normalize, build and stabilize the
/// cluster tree, classify double points, decide the extension, lift to the
/// special fiber, reduce component equations, and report the Jacobian.
pub fn analyze(
    p: arith::OddPrime,
    c: BigRational,
    raw_points: Vec<RawPoint>,
) -> Result<ReductionReport> {
    let config = BranchConfig::new(p, c, raw_points)?;
    analyze_config(config)
}

pub fn analyze_config(config: BranchConfig) -> Result<ReductionReport> {
    let hierarchy = build_cluster_hierarchy(&config);
    let tree = stabilize(&hierarchy, &config)?;
    let edge_classes = classify_edges(&tree, &config);
    let decision = decide_extension(&config, &tree);
    let fiber = build_special_fiber(
        &tree,
        &edge_classes,
        &decision,
        &config,
        GluingOrder::default(),
    )?;
    let vertex_equations: Vec<FpPoly> = (0..tree.vertices.len())
        .map(|v| component_equation(&config, &tree, &decision, v))
        .collect::<Result<_>>()?;
    let mut equations = Vec::with_capacity(fiber.components.len());
    let mut components = fiber.components.clone();
    for comp in &mut components {
        let eq = vertex_equations[comp.base_vertex].clone();
        comp.split = split_or_inert(&eq, comp)?;
        equations.push(eq);
    }
    let fiber = SpecialFiberGraph {
        components,
        ..fiber
    };
    check_branch_locus(&config, &tree, &fiber, &equations)?;
    let jacobian = jacobian_report(&fiber, &tree, &edge_classes)?;
    let single = tree.vertices.len() == 1;
    let flags = Flags {
        marked_genus0_good_reduction: single,
        good_reduction_over_k: single && decision.e == 1,
        good_reduction_after_extension: single,
    };
    Ok(ReductionReport {
        config,
        tree,
        edge_classes,
        decision,
        fiber,
        equations,
        jacobian,
        flags,
    })
}

/// Branch-locus agreement on a finished report; also asserted inside
/// [`analyze_config`] on every run.
pub fn check_branch_locus_report(report: &ReductionReport) -> Result<()> {
    check_branch_locus(
        &report.config,
        &report.tree,
        &report.fiber,
        &report.equations,
    )
}

/// Branch-locus agreement, asserted on every run: the odd-multiplicity
/// roots of each reduced equation (plus infinity for odd degree) must
/// coincide with the chart residues of the T-set.
fn check_branch_locus(
    config: &BranchConfig,
    tree: &MarkedTree,
    fiber: &SpecialFiberGraph,
    equations: &[FpPoly],
) -> Result<()> {
    for (cid, comp) in fiber.components.iter().enumerate() {
        if comp.sheet == Sheet::Minus {
            continue;
        }
        let eq = &equations[cid];
        let odd = odd_multiplicity_roots(eq);
        let mut from_eq: Vec<P1Residue> =
            odd.roots.iter().map(|&r| P1Residue::Finite(r)).collect();
        if eq.degree() % 2 == 1 {
            from_eq.push(P1Residue::Infinity);
        }
        from_eq.sort_unstable();
        let residues = mark_residues(tree, config, comp.base_vertex)?;
        let mut from_t: Vec<P1Residue> = residues
            .marks
            .iter()
            .filter(|(m, _)| comp.t_marks.contains(m))
            .map(|&(_, r)| r)
            .chain(
                residues
                    .edges
                    .iter()
                    .filter(|(eid, _)| comp.t_odd_edges.contains(eid))
                    .map(|&(_, r)| r),
            )
            .collect();
        from_t.sort_unstable();
        if from_eq != from_t {
            return Err(Error::InternalInstability(format!(
                "branch locus mismatch on component {cid}: equation gives {from_eq:?}, T gives {from_t:?}"
            )));
        }
    }
    Ok(())
}

/// Gauss-valuation cross-check used by the randomized suites: the closed
/// form must match the coefficient minimum after substitution, exactly.
pub fn gauss_valuation_cross_check(
    config: &BranchConfig,
    tree: &MarkedTree,
    vertex: usize,
) -> Result<()> {
    let vert = &tree.vertices[vertex];
    let a = &config.points[vert.cluster.center()];
    let d = vert.cluster.depth;
    let f = config.defining_poly();
    let direct = gauss_valuation(&substitute_affine(&f, a, d, config.p), config.p)?;
    let closed = vertex_f_valuation(config, tree, vertex);
    if direct != closed {
        return Err(Error::InternalInstability(format!(
            "Gauss valuation mismatch on vertex {vertex}: {closed} vs {direct}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{integer, OddPrime};

    fn run(p: u64, c: i64, points: &[i64]) -> ReductionReport {
        analyze(
            OddPrime::new(p).unwrap(),
            integer(c),
            points
                .iter()
                .map(|&v| RawPoint::Finite(integer(v)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn f1_good_reduction() {
        let r = run(7, 1, &[0, 1, 2, 3]);
        assert_eq!(r.decision.e, 1);
        assert_eq!(r.decision.valuations, vec![0]);
        assert_eq!(r.fiber.components.len(), 1);
        assert_eq!(r.fiber.components[0].genus, 1);
        assert!(r.fiber.edges.is_empty());
        assert_eq!(r.jacobian.toric_rank, 0);
        assert_eq!(r.jacobian.abelian_rank, 1);
        assert!(r.flags.marked_genus0_good_reduction);
        assert!(r.flags.good_reduction_over_k);
        assert!(r.flags.good_reduction_after_extension);
        // X(X-1)(X-2)(X-3) over F_7
        assert_eq!(r.equations[0].coeffs(), &[0, 1, 4, 1, 1]);
        let odd = odd_multiplicity_roots(&r.equations[0]);
        assert_eq!(odd.roots, vec![0, 1, 2, 3]);
    }

    #[test]
    fn f2_two_cycle() {
        let r = run(5, 1, &[0, 5, 1, 6]);
        assert_eq!(r.decision.e, 1);
        assert_eq!(r.decision.valuations, vec![2, 2]);
        assert_eq!(r.fiber.components.len(), 2);
        assert!(r.fiber.components.iter().all(|c| c.genus == 0));
        assert_eq!(r.fiber.edges.len(), 2);
        assert!(r.fiber.edges.iter().all(|e| e.thickness == 2));
        assert_eq!(r.jacobian.toric_rank, 1);
        assert_eq!(r.jacobian.abelian_rank, 0);
        assert!(!r.jacobian.potential_good);
        assert!(!r.flags.marked_genus0_good_reduction);
        // X^2 + 4X = X(X-1) over F_5 on both charts
        assert_eq!(r.equations[0].coeffs(), &[0, 4, 1]);
        assert_eq!(r.equations[1].coeffs(), &[0, 4, 1]);
    }

    #[test]
    fn f3_two_elliptic_components() {
        let r = run(5, 1, &[0, 5, 10, 1, 6, 11]);
        assert_eq!(r.decision.e, 2);
        assert_eq!(r.decision.valuations, vec![3, 3]);
        assert_eq!(r.fiber.components.len(), 2);
        assert!(r.fiber.components.iter().all(|c| c.genus == 1));
        assert_eq!(r.fiber.edges.len(), 1);
        // base thickness 2, extended 4, halved at the odd point
        assert_eq!(r.fiber.edges[0].thickness, 2);
        assert_eq!(r.fiber.edges[0].parity, Parity::Odd);
        assert_eq!(r.jacobian.toric_rank, 0);
        assert_eq!(r.jacobian.abelian_rank, 2);
        assert!(r.jacobian.potential_good);
        // 4X(X-1)(X-2) = 4X^3 + 3X^2 + 3X over F_5
        assert_eq!(r.equations[0].coeffs(), &[0, 3, 3, 4]);
    }

    #[test]
    fn f4_twisted_thickness() {
        let r = run(5, 5, &[0, 5, 1, 6]);
        assert_eq!(r.decision.e, 2);
        assert_eq!(r.decision.valuations, vec![3, 3]);
        assert_eq!(r.fiber.edges.len(), 2);
        assert!(r.fiber.edges.iter().all(|e| e.thickness == 4));
        assert_eq!(r.jacobian.toric_rank, 1);
    }

    #[test]
    fn vertex_valuation_examples() {
        let cfg = crate::tree::BranchConfig::new(
            OddPrime::new(5).unwrap(),
            integer(1),
            [0, 5, 1, 6]
                .iter()
                .map(|&v| RawPoint::Finite(integer(v)))
                .collect(),
        )
        .unwrap();
        let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
        assert_eq!(vertex_f_valuation(&cfg, &tree, 0), 2);
        gauss_valuation_cross_check(&cfg, &tree, 0).unwrap();
        gauss_valuation_cross_check(&cfg, &tree, 1).unwrap();
    }

    #[test]
    fn split_inert_classification() {
        let p5 = OddPrime::new(5).unwrap();
        let pair = FiberComponent {
            base_vertex: 0,
            sheet: Sheet::Plus,
            t_marks: vec![],
            t_odd_edges: vec![],
            genus: 0,
            split: SplitClass::NotApplicable,
        };
        // 4(X-1)^2 = 4X^2 + 2X + 4: 4 is a square mod 5
        let sq = FpPoly::new(p5, vec![4, 2, 4]);
        assert_eq!(split_or_inert(&sq, &pair).unwrap(), SplitClass::Split);
        // 2(X-1)^2 = 2X^2 + X + 2: 2 is not
        let nsq = FpPoly::new(p5, vec![2, 1, 2]);
        assert_eq!(split_or_inert(&nsq, &pair).unwrap(), SplitClass::Inert);
        let only = FiberComponent {
            t_marks: vec![0, 1],
            sheet: Sheet::Only,
            ..pair.clone()
        };
        assert_eq!(
            split_or_inert(&sq, &only).unwrap(),
            SplitClass::NotApplicable
        );
        // X^3 is not a two-line equation
        let bad = FpPoly::new(p5, vec![0, 0, 0, 1]);
        assert!(matches!(
            split_or_inert(&bad, &pair),
            Err(Error::NotTwoLineComponent(_))
        ));
    }

    #[test]
    fn deep_clusters_contract_to_thick_edge() {
        // {0,25} and {1,26} sit at depth 2; the two depth gaps sum to 4.
        let r = run(5, 1, &[0, 25, 1, 26]);
        assert_eq!(r.decision.e, 1);
        assert_eq!(r.fiber.components.len(), 2);
        assert_eq!(r.fiber.edges.len(), 2);
        assert!(r.fiber.edges.iter().all(|e| e.thickness == 4));
        assert_eq!(r.jacobian.toric_rank, 1);
    }

    #[test]
    fn star_center_lifts_to_two_lines() {
        // Three 2-point clusters around an unmarked center vertex: the
        // center has empty T and lifts to a pair of lines.
        let r = run(5, 1, &[0, 5, 1, 6, 2, 7]);
        assert_eq!(r.decision.e, 1);
        assert_eq!(r.fiber.components.len(), 5);
        let pairs: Vec<&FiberComponent> = r
            .fiber
            .components
            .iter()
            .filter(|c| c.sheet != Sheet::Only)
            .collect();
        assert_eq!(pairs.len(), 2);
        // Equation on the center chart is a unit square: the pair splits.
        assert!(pairs.iter().all(|c| c.split == SplitClass::Split));
        assert_eq!(r.fiber.edges.len(), 6);
        assert_eq!(r.jacobian.toric_rank, 2);
        assert_eq!(r.jacobian.n0, 3);
        assert_eq!(r.jacobian.m0, 1);
        assert_eq!(r.jacobian.abelian_rank, 0);

        // Twisting by a nonsquare unit flips split to inert and nothing else.
        let t = run(5, 2, &[0, 5, 1, 6, 2, 7]);
        assert!(t
            .fiber
            .components
            .iter()
            .filter(|c| c.sheet != Sheet::Only)
            .all(|c| c.split == SplitClass::Inert));
        assert_eq!(r.fiber.canonical_code(), t.fiber.canonical_code());
        assert_ne!(
            r.fiber.canonical_code_with_split(),
            t.fiber.canonical_code_with_split()
        );
    }

    #[test]
    fn gluing_order_invariance() {
        for (p, c, points) in [
            (5u64, 1i64, vec![0i64, 5, 1, 6]),
            (5, 1, vec![0, 5, 10, 1, 6, 11]),
            (5, 1, vec![0, 25, 50, 1, 2, 3]),
            (3, 1, vec![0, 3, 9, 27, 1, 4, 2, 5]),
        ] {
            let cfg = crate::tree::BranchConfig::new(
                OddPrime::new(p).unwrap(),
                integer(c),
                points.iter().map(|&v| RawPoint::Finite(integer(v))).collect(),
            )
            .unwrap();
            let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
            let classes = classify_edges(&tree, &cfg);
            let decision = decide_extension(&cfg, &tree);
            let a = build_special_fiber(&tree, &classes, &decision, &cfg, GluingOrder::default())
                .unwrap();
            let b = build_special_fiber(
                &tree,
                &classes,
                &decision,
                &cfg,
                GluingOrder {
                    reverse_bfs: true,
                    swap_pairing: true,
                },
            )
            .unwrap();
            assert_eq!(a.canonical_code(), b.canonical_code());
        }
    }
}
