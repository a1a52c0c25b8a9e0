//! The stable marked genus-0 model of the branch locus, computed as a tree
//! of p-adic clusters.
//!
//! Branch points that are p-adically close sit in a common disc; the nested
//! family of such discs (the proper clusters) is the dual tree of the
//! special fiber of the stable marked model of (P^1, branch points), after
//! Knudsen stabilization. Edge thicknesses are depth differences of nested
//! discs, i.e. the annulus widths between them.

use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{self, val, OddPrime, RatPoly, Valuation};
use crate::canon::LabeledTree;
use crate::error::{Error, Result};

pub mod oracle;

pub use oracle::naive_tree_oracle;

/// A branch point as supplied by the caller, before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawPoint {
    Finite(BigRational),
    Infinity,
}

impl std::fmt::Display for RawPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RawPoint::Finite(q) => write!(f, "{}", arith::format_rational(q)),
            RawPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// The Moebius substitution applied to remove a branch point at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizationTrace {
    Identity,
    /// x was replaced by 1/(x - a); infinity went to 0.
    Inversion { a: BigRational },
}

/// A validated curve datum: odd prime, leading coefficient, and 2g+2
/// distinct finite rational branch points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchConfig {
    pub p: OddPrime,
    pub c: BigRational,
    pub points: Vec<BigRational>,
    pub genus: usize,
    pub trace: NormalizationTrace,
}

impl BranchConfig {
    /// Validate and normalize a raw branch locus. A point at infinity is
    /// moved to 0 via x -> 1/(x - a), where a is the smallest nonnegative
    /// integer distinct from all finite input points; the leading
    /// coefficient is transformed along with the defining equation.
    pub fn new(p: OddPrime, c: BigRational, raw: Vec<RawPoint>) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let n = raw.len();
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::WrongPointCount(n));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if raw[i] == raw[j] {
                    return Err(Error::DuplicatePoints(raw[i].to_string()));
                }
            }
        }
        let genus = (n - 2) / 2;
        let has_infinity = raw.iter().any(|q| matches!(q, RawPoint::Infinity));
        if !has_infinity {
            let points = raw
                .into_iter()
                .map(|q| match q {
                    RawPoint::Finite(v) => v,
                    RawPoint::Infinity => unreachable!(),
                })
                .collect();
            return Ok(BranchConfig {
                p,
                c,
                points,
                genus,
                trace: NormalizationTrace::Identity,
            });
        }
        // Smallest nonnegative integer distinct from all finite points.
        let finite: Vec<&BigRational> = raw
            .iter()
            .filter_map(|q| match q {
                RawPoint::Finite(v) => Some(v),
                RawPoint::Infinity => None,
            })
            .collect();
        let mut a = BigRational::zero();
        while finite.iter().any(|&v| *v == a) {
            a += BigRational::from_integer(1.into());
        }
        let mut new_c = c;
        for v in &finite {
            new_c *= &a - *v;
        }
        let points: Vec<BigRational> = raw
            .iter()
            .map(|q| match q {
                RawPoint::Finite(v) => {
                    BigRational::from_integer(1.into()) / (v - &a)
                }
                RawPoint::Infinity => BigRational::zero(),
            })
            .collect();
        debug_assert!(!new_c.is_zero());
        Ok(BranchConfig {
            p,
            c: new_c,
            points,
            genus,
            trace: NormalizationTrace::Inversion { a },
        })
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    /// The defining right-hand side c * prod (x - xi).
    pub fn defining_poly(&self) -> RatPoly {
        RatPoly::from_roots(&self.c, &self.points)
    }

    /// v(xi_i - xi_j); infinite only when i == j.
    pub fn pair_valuation(&self, i: usize, j: usize) -> Valuation {
        val(&(&self.points[i] - &self.points[j]), self.p)
    }
}

/// A proper cluster: at least two branch points cut out by a p-adic disc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    /// Sorted point indices, |members| >= 2.
    pub members: Vec<usize>,
    /// Minimum over member pairs of v(xi_i - xi_j).
    pub depth: i64,
}

impl Cluster {
    /// The disc center: the member with the smallest input index.
    pub fn center(&self) -> usize {
        self.members[0]
    }

    pub fn contains(&self, point: usize) -> bool {
        self.members.binary_search(&point).is_ok()
    }

    pub fn is_strict_subset_of(&self, other: &Cluster) -> bool {
        self.members.len() < other.members.len()
            && self.members.iter().all(|m| other.contains(*m))
    }
}

/// The nested family of all proper clusters, computed by single linkage
/// over the pairwise valuations. The full point set is always included;
/// depths strictly increase downward.
#[allow(clippy::needless_range_loop)] // symmetric matrix indexing
pub fn build_cluster_hierarchy(config: &BranchConfig) -> Vec<Cluster> {
    let n = config.point_count();
    let mut vals = Vec::new();
    let mut pair_val = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = config.pair_valuation(i, j).finite();
            pair_val[i][j] = v;
            pair_val[j][i] = v;
            vals.push(v);
        }
    }
    vals.sort_unstable();
    vals.dedup();
    // Scan thresholds from deepest to shallowest; at threshold d the classes
    // of the relation v(xi_i - xi_j) >= d are exactly the discs, because the
    // pairwise valuations satisfy the ultrametric inequality.
    let mut clusters: Vec<Cluster> = Vec::new();
    for &d in vals.iter().rev() {
        let mut class = vec![usize::MAX; n];
        let mut next = 0usize;
        for i in 0..n {
            if class[i] != usize::MAX {
                continue;
            }
            class[i] = next;
            // Ultrametric transitivity: one sweep suffices.
            for j in 0..n {
                if class[j] == usize::MAX && pair_val[i][j] >= d {
                    class[j] = next;
                }
            }
            next += 1;
        }
        for cid in 0..next {
            let members: Vec<usize> = (0..n).filter(|&i| class[i] == cid).collect();
            if members.len() < 2 {
                continue;
            }
            if !clusters.iter().any(|c| c.members == members) {
                clusters.push(Cluster { members, depth: d });
            }
        }
    }
    clusters.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then_with(|| a.members.cmp(&b.members))
    });
    clusters
}

/// A residue on the projective line over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum P1Residue {
    Finite(u64),
    Infinity,
}

impl std::fmt::Display for P1Residue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            P1Residue::Finite(r) => write!(f, "{r}"),
            P1Residue::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeVertex {
    pub cluster: Cluster,
    /// Sorted point indices marked on this vertex.
    pub marks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub thickness: u64,
}

/// The special fiber of the stable marked genus-0 model, as a marked
/// weighted tree. Vertices are numbered in BFS order from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedTree {
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<TreeEdge>,
    pub root: usize,
}

/// Side-mark parity of a double point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Classification of a tree edge by the number of marks on one side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeClass {
    pub edge: usize,
    /// Marks in the half away from the root.
    pub side_mark_count: usize,
    pub parity: Parity,
}

impl MarkedTree {
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (eid, e) in self.edges.iter().enumerate() {
            adj[e.a].push((e.b, eid));
            adj[e.b].push((e.a, eid));
        }
        adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.a == v || e.b == v)
            .count()
    }

    pub fn total_marks(&self) -> usize {
        self.vertices.iter().map(|v| v.marks.len()).sum()
    }

    /// Vertices in the half of the tree on the `side` endpoint of `edge`.
    pub fn side_vertices(&self, edge: usize, side: usize) -> Vec<usize> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![side];
        seen[side] = true;
        while let Some(v) = stack.pop() {
            for &(u, eid) in &adj[v] {
                if eid != edge && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        (0..self.vertices.len()).filter(|&v| seen[v]).collect()
    }

    /// For edge (a, b), the endpoint whose side does not contain the root.
    pub fn child_endpoint(&self, edge: usize) -> usize {
        let e = &self.edges[edge];
        if self.side_vertices(edge, e.a).contains(&self.root) {
            e.b
        } else {
            e.a
        }
    }

    /// Labeled tree with full mark index sets and thicknesses; its
    /// canonical code identifies trees up to isomorphism preserving marks.
    pub fn to_labeled(&self) -> LabeledTree {
        LabeledTree {
            vertex_labels: self
                .vertices
                .iter()
                .map(|v| {
                    let marks: Vec<String> =
                        v.marks.iter().map(|m| m.to_string()).collect();
                    format!("m{}", marks.join(","))
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| (e.a, e.b, e.thickness.to_string()))
                .collect(),
        }
    }

    /// Labeled tree with mark counts only (point labels forgotten).
    pub fn to_labeled_shape(&self) -> LabeledTree {
        LabeledTree {
            vertex_labels: self
                .vertices
                .iter()
                .map(|v| format!("n{}", v.marks.len()))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| (e.a, e.b, e.thickness.to_string()))
                .collect(),
        }
    }

    /// Labeled tree with mark counts and no thicknesses, matching the
    /// atlas encoding of abstract reduction types.
    pub fn to_labeled_abstract(&self) -> LabeledTree {
        LabeledTree {
            vertex_labels: self
                .vertices
                .iter()
                .map(|v| format!("n{}", v.marks.len()))
                .collect(),
            edges: self.edges.iter().map(|e| (e.a, e.b, String::new())).collect(),
        }
    }
}

/// Build the stable marked tree from the cluster hierarchy: one candidate
/// vertex per proper cluster, parent/child edges weighted by depth gaps,
/// marks on the smallest containing cluster, then Knudsen stabilization
/// (contract 2-edge markless vertices, drop 1-edge 1-mark vertices).
pub fn stabilize(hierarchy: &[Cluster], config: &BranchConfig) -> Result<MarkedTree> {
    let n = config.point_count();
    let mut alive: Vec<bool> = vec![true; hierarchy.len()];
    let mut marks: Vec<Vec<usize>> = vec![Vec::new(); hierarchy.len()];
    // (a, b, thickness), endpoints indexing `hierarchy`.
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();

    for (i, c) in hierarchy.iter().enumerate() {
        // Parent: the smallest cluster strictly containing c.
        let parent = hierarchy
            .iter()
            .enumerate()
            .filter(|(_, d)| c.is_strict_subset_of(d))
            .min_by_key(|(_, d)| d.members.len());
        if let Some((j, d)) = parent {
            edges.push((j, i, (c.depth - d.depth) as u64));
        }
    }
    for point in 0..n {
        let smallest = hierarchy
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(point))
            .min_by_key(|(_, c)| c.members.len())
            .map(|(i, _)| i)
            .expect("every point lies in the full cluster");
        marks[smallest].push(point);
    }

    // Stabilization loop.
    loop {
        let degree = |v: usize, edges: &[(usize, usize, u64)]| {
            edges.iter().filter(|(a, b, _)| *a == v || *b == v).count()
        };
        let unstable = (0..hierarchy.len())
            .find(|&v| alive[v] && degree(v, &edges) + marks[v].len() <= 2);
        let Some(v) = unstable else { break };
        let incident: Vec<usize> = edges
            .iter()
            .enumerate()
            .filter(|(_, (a, b, _))| *a == v || *b == v)
            .map(|(i, _)| i)
            .collect();
        match (incident.len(), marks[v].len()) {
            (2, 0) => {
                let (a1, b1, t1) = edges[incident[0]];
                let (a2, b2, t2) = edges[incident[1]];
                let u = if a1 == v { b1 } else { a1 };
                let w = if a2 == v { b2 } else { a2 };
                let merged = (u, w, t1 + t2);
                let (hi, lo) = (incident[1], incident[0]);
                edges.remove(hi);
                edges.remove(lo);
                edges.push(merged);
                alive[v] = false;
            }
            (1, 1) => {
                let (a, b, _) = edges[incident[0]];
                let u = if a == v { b } else { a };
                let m = marks[v].pop().unwrap();
                marks[u].push(m);
                edges.remove(incident[0]);
                alive[v] = false;
            }
            (d, m) => {
                return Err(Error::InternalInstability(format!(
                    "vertex with {d} edges and {m} marks"
                )));
            }
        }
    }

    // Root: the full-set cluster if it survived, else smallest depth with
    // ties broken by smallest center index.
    let survivors: Vec<usize> = (0..hierarchy.len()).filter(|&v| alive[v]).collect();
    let root_old = survivors
        .iter()
        .copied()
        .find(|&v| hierarchy[v].members.len() == n)
        .unwrap_or_else(|| {
            survivors
                .iter()
                .copied()
                .min_by_key(|&v| (hierarchy[v].depth, hierarchy[v].center()))
                .expect("at least one vertex survives")
        });

    // BFS renumbering with children ordered by smallest member index.
    let mut order: Vec<usize> = Vec::with_capacity(survivors.len());
    let mut new_id = vec![usize::MAX; hierarchy.len()];
    let mut queue = std::collections::VecDeque::from([root_old]);
    new_id[root_old] = 0;
    order.push(root_old);
    let mut edge_order: Vec<usize> = Vec::new();
    while let Some(v) = queue.pop_front() {
        let mut nbrs: Vec<(usize, usize)> = edges
            .iter()
            .enumerate()
            .filter_map(|(eid, (a, b, _))| {
                if *a == v {
                    Some((*b, eid))
                } else if *b == v {
                    Some((*a, eid))
                } else {
                    None
                }
            })
            .filter(|(u, _)| new_id[*u] == usize::MAX)
            .collect();
        nbrs.sort_by_key(|(u, _)| hierarchy[*u].members[0]);
        for (u, eid) in nbrs {
            new_id[u] = order.len();
            order.push(u);
            edge_order.push(eid);
            queue.push_back(u);
        }
    }
    if order.len() != survivors.len() {
        return Err(Error::InternalInstability(
            "stabilized tree is disconnected".into(),
        ));
    }

    let vertices: Vec<TreeVertex> = order
        .iter()
        .map(|&v| {
            let mut m = marks[v].clone();
            m.sort_unstable();
            TreeVertex {
                cluster: hierarchy[v].clone(),
                marks: m,
            }
        })
        .collect();
    let out_edges: Vec<TreeEdge> = edge_order
        .iter()
        .map(|&eid| {
            let (a, b, t) = edges[eid];
            let (x, y) = (new_id[a], new_id[b]);
            TreeEdge {
                a: x.min(y),
                b: x.max(y),
                thickness: t,
            }
        })
        .collect();

    let tree = MarkedTree {
        vertices,
        edges: out_edges,
        root: 0,
    };
    verify_tree(&tree, config)?;
    Ok(tree)
}

/// Invariant guard run on every constructed tree.
fn verify_tree(tree: &MarkedTree, config: &BranchConfig) -> Result<()> {
    let n = config.point_count();
    let v = tree.vertices.len();
    if tree.edges.len() + 1 != v {
        return Err(Error::InternalInstability(format!(
            "{} edges on {} vertices",
            tree.edges.len(),
            v
        )));
    }
    if tree.total_marks() != n {
        return Err(Error::InternalInstability("marks lost or duplicated".into()));
    }
    let mut seen = vec![false; n];
    for vert in &tree.vertices {
        for &m in &vert.marks {
            if seen[m] {
                return Err(Error::InternalInstability(format!(
                    "mark {m} on two vertices"
                )));
            }
            seen[m] = true;
        }
    }
    for (i, _) in tree.vertices.iter().enumerate() {
        let stability = tree.degree(i) + tree.vertices[i].marks.len();
        if stability < 3 && v > 1 {
            return Err(Error::InternalInstability(format!(
                "vertex {i} has only {stability} special points"
            )));
        }
    }
    for e in &tree.edges {
        if e.thickness == 0 {
            return Err(Error::InternalInstability("zero thickness edge".into()));
        }
    }
    // Chart residues must be pairwise distinct on every vertex.
    for i in 0..v {
        mark_residues(tree, config, i)?;
    }
    Ok(())
}

/// Classify every edge by the parity of the number of marks on the side
/// away from the root; the total 2g+2 is even, so the choice of side does
/// not change the parity.
pub fn classify_edges(tree: &MarkedTree, _config: &BranchConfig) -> Vec<EdgeClass> {
    tree.edges
        .iter()
        .enumerate()
        .map(|(eid, _)| {
            let side = tree.child_endpoint(eid);
            let r: usize = tree
                .side_vertices(eid, side)
                .into_iter()
                .map(|v| tree.vertices[v].marks.len())
                .sum();
            EdgeClass {
                edge: eid,
                side_mark_count: r,
                parity: if r.is_multiple_of(2) { Parity::Even } else { Parity::Odd },
            }
        })
        .collect()
}

/// Positions of the marks and edge directions of a vertex on its chart
/// X = (x - center)/p^depth, as points of P^1(F_p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueMap {
    pub marks: Vec<(usize, P1Residue)>,
    pub edges: Vec<(usize, P1Residue)>,
}

/// Reduce q to P^1(F_p): infinity when v(q) < 0.
fn p1_residue(q: &BigRational, p: OddPrime) -> P1Residue {
    match val(q, p) {
        Valuation::Finite(v) if v < 0 => P1Residue::Infinity,
        _ => P1Residue::Finite(arith::residue(q, p)),
    }
}

/// Residues of all marks and incident edge directions of `vertex`; errors
/// with [`Error::ResidueCollision`] if any two coincide (a construction
/// bug, not a user error).
pub fn mark_residues(
    tree: &MarkedTree,
    config: &BranchConfig,
    vertex: usize,
) -> Result<ResidueMap> {
    let vert = &tree.vertices[vertex];
    let center = &config.points[vert.cluster.center()];
    let d = vert.cluster.depth;
    let scale = arith::prime_power(config.p, -d);
    let mut marks = Vec::new();
    for &m in &vert.marks {
        let q = (&config.points[m] - center) * &scale;
        marks.push((m, p1_residue(&q, config.p)));
    }
    let mut edges = Vec::new();
    for (eid, e) in tree.edges.iter().enumerate() {
        let other = if e.a == vertex {
            e.b
        } else if e.b == vertex {
            e.a
        } else {
            continue;
        };
        let nbr = &tree.vertices[other].cluster;
        let res = if nbr.is_strict_subset_of(&vert.cluster) {
            // Child disc: all its points share one residue on this chart.
            let q = (&config.points[nbr.center()] - center) * &scale;
            p1_residue(&q, config.p)
        } else {
            // Direction out of this disc.
            P1Residue::Infinity
        };
        edges.push((eid, res));
    }
    let mut all: Vec<P1Residue> = marks
        .iter()
        .map(|(_, r)| *r)
        .chain(edges.iter().map(|(_, r)| *r))
        .collect();
    all.sort_unstable();
    for w in all.windows(2) {
        if w[0] == w[1] {
            return Err(Error::ResidueCollision(format!(
                "vertex {vertex} has two special points at {}",
                w[0]
            )));
        }
    }
    Ok(ResidueMap { marks, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{integer, rational};

    pub(crate) fn config(p: u64, c: i64, points: &[i64]) -> BranchConfig {
        BranchConfig::new(
            OddPrime::new(p).unwrap(),
            integer(c),
            points
                .iter()
                .map(|&v| RawPoint::Finite(integer(v)))
                .collect(),
        )
        .unwrap()
    }

    /// Naive pairwise-threshold oracle for the hierarchy: a subset is a
    /// proper cluster iff it equals a threshold class of some pair.
    fn hierarchy_oracle(cfg: &BranchConfig) -> Vec<Cluster> {
        let n = cfg.point_count();
        let mut out: Vec<Cluster> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = cfg.pair_valuation(i, j).finite();
                let members: Vec<usize> = (0..n)
                    .filter(|&k| k == i || cfg.pair_valuation(i, k).finite() >= d)
                    .collect();
                let depth = members
                    .iter()
                    .flat_map(|&a| {
                        members
                            .iter()
                            .filter(move |&&b| b > a)
                            .map(move |&b| cfg.pair_valuation(a, b).finite())
                    })
                    .min()
                    .unwrap();
                if !out.iter().any(|c| c.members == members) {
                    out.push(Cluster { members, depth });
                }
            }
        }
        out.sort_by(|a, b| {
            b.members
                .len()
                .cmp(&a.members.len())
                .then_with(|| a.members.cmp(&b.members))
        });
        out
    }

    #[test]
    fn hierarchy_single_cluster() {
        let cfg = config(7, 1, &[0, 1, 2, 3]);
        let h = build_cluster_hierarchy(&cfg);
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].members, vec![0, 1, 2, 3]);
        assert_eq!(h[0].depth, 0);
    }

    #[test]
    fn hierarchy_two_pairs() {
        // values {0,5,1,6} at p=5: clusters {0,5} and {1,6} at depth 1
        let cfg = config(5, 1, &[0, 5, 1, 6]);
        let h = build_cluster_hierarchy(&cfg);
        assert_eq!(h.len(), 3);
        assert_eq!(h[0].members, vec![0, 1, 2, 3]);
        assert_eq!(h[0].depth, 0);
        assert_eq!(h[1].members, vec![0, 1]);
        assert_eq!(h[1].depth, 1);
        assert_eq!(h[2].members, vec![2, 3]);
        assert_eq!(h[2].depth, 1);
        assert_eq!(h, hierarchy_oracle(&cfg));
    }

    #[test]
    fn hierarchy_two_triples() {
        let cfg = config(5, 1, &[0, 5, 10, 1, 6, 11]);
        let h = build_cluster_hierarchy(&cfg);
        assert_eq!(h.len(), 3);
        assert_eq!(h[1].members, vec![0, 1, 2]);
        assert_eq!(h[1].depth, 1);
        assert_eq!(h[2].members, vec![3, 4, 5]);
        assert_eq!(h[2].depth, 1);
        assert_eq!(h, hierarchy_oracle(&cfg));
    }

    #[test]
    fn hierarchy_matches_oracle_on_nested_input() {
        for points in [
            vec![0, 5, 25, 1],
            vec![0, 25, 50, 1, 2, 3],
            vec![0, 7, 49, 343, 1, 8],
        ] {
            let cfg = config(
                if points.contains(&7) { 7 } else { 5 },
                1,
                &points,
            );
            assert_eq!(build_cluster_hierarchy(&cfg), hierarchy_oracle(&cfg));
        }
    }

    #[test]
    fn stabilize_good_reduction() {
        let cfg = config(7, 1, &[0, 1, 2, 3]);
        let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
        assert_eq!(tree.vertices.len(), 1);
        assert!(tree.edges.is_empty());
        assert_eq!(tree.vertices[0].marks, vec![0, 1, 2, 3]);
    }

    #[test]
    fn stabilize_contracts_root() {
        let cfg = config(5, 1, &[0, 5, 1, 6]);
        let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
        assert_eq!(tree.vertices.len(), 2);
        assert_eq!(tree.edges.len(), 1);
        assert_eq!(tree.edges[0].thickness, 2);
        assert_eq!(tree.vertices[0].marks, vec![0, 1]);
        assert_eq!(tree.vertices[1].marks, vec![2, 3]);
    }

    #[test]
    fn stabilize_two_triples() {
        let cfg = config(5, 1, &[0, 5, 10, 1, 6, 11]);
        let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
        assert_eq!(tree.vertices.len(), 2);
        assert_eq!(tree.edges[0].thickness, 2);
        assert_eq!(tree.vertices[0].marks.len(), 3);
        assert_eq!(tree.vertices[1].marks.len(), 3);
    }

    #[test]
    fn stabilize_reattaches_single_mark() {
        // {0,5,25,1}: the full set has one child {0,5,25} and one mark (1);
        // the root is dropped and the mark lands at infinity on the child.
        let cfg = config(5, 1, &[0, 5, 25, 1]);
        let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
        assert_eq!(tree.vertices.len(), 2);
        assert_eq!(tree.vertices[0].marks, vec![1, 3]);
        assert_eq!(tree.vertices[0].cluster.members, vec![0, 1, 2]);
        assert_eq!(tree.vertices[1].marks, vec![0, 2]);
        assert_eq!(tree.edges[0].thickness, 1);
        let res = mark_residues(&tree, &cfg, 0).unwrap();
        assert!(res
            .marks
            .iter()
            .any(|&(m, r)| m == 3 && r == P1Residue::Infinity));
    }

    #[test]
    fn oracle_matches_stabilize_on_fixtures() {
        for (p, points) in [
            (7, vec![0, 1, 2, 3]),
            (5, vec![0, 5, 1, 6]),
            (5, vec![0, 5, 10, 1, 6, 11]),
            (5, vec![0, 5, 25, 1]),
            (5, vec![0, 25, 50, 1, 2, 3]),
            (3, vec![0, 3, 9, 27, 1, 4]),
        ] {
            let cfg = config(p, 1, &points);
            let a = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
            let b = oracle::naive_tree_oracle(&cfg).unwrap();
            assert_eq!(
                a.to_labeled().canonical_code(),
                b.to_labeled().canonical_code(),
                "oracle mismatch on p={p} points={points:?}"
            );
            assert_eq!(a.vertices.len(), b.vertices.len());
        }
    }

    #[test]
    fn classify_parity() {
        let cfg = config(5, 1, &[0, 5, 1, 6]);
        let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
        let classes = classify_edges(&tree, &cfg);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].side_mark_count, 2);
        assert_eq!(classes[0].parity, Parity::Even);

        let cfg = config(5, 1, &[0, 5, 10, 1, 6, 11]);
        let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
        let classes = classify_edges(&tree, &cfg);
        assert_eq!(classes[0].side_mark_count, 3);
        assert_eq!(classes[0].parity, Parity::Odd);

        let cfg = config(7, 1, &[0, 1, 2, 3]);
        let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
        assert!(classify_edges(&tree, &cfg).is_empty());
    }

    #[test]
    fn residues_on_charts() {
        let cfg = config(5, 1, &[0, 5, 1, 6]);
        let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
        // vertex 0 carries the cluster {0,5} with center 0, depth 1
        let res = mark_residues(&tree, &cfg, 0).unwrap();
        assert_eq!(res.marks, vec![(0, P1Residue::Finite(0)), (1, P1Residue::Finite(1))]);
        assert_eq!(res.edges, vec![(0, P1Residue::Infinity)]);
        // vertex 1 carries {1,6}: residues 0, 1 and the edge at infinity
        let res = mark_residues(&tree, &cfg, 1).unwrap();
        assert_eq!(res.marks, vec![(2, P1Residue::Finite(0)), (3, P1Residue::Finite(1))]);
        assert_eq!(res.edges, vec![(0, P1Residue::Infinity)]);

        let cfg = config(7, 1, &[0, 1, 2, 3]);
        let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
        let res = mark_residues(&tree, &cfg, 0).unwrap();
        let rs: Vec<P1Residue> = res.marks.iter().map(|&(_, r)| r).collect();
        assert_eq!(
            rs,
            vec![
                P1Residue::Finite(0),
                P1Residue::Finite(1),
                P1Residue::Finite(2),
                P1Residue::Finite(3)
            ]
        );

        let cfg = config(5, 1, &[0, 5, 10, 1, 6, 11]);
        let tree = stabilize(&build_cluster_hierarchy(&cfg), &cfg).unwrap();
        let res = mark_residues(&tree, &cfg, 1).unwrap();
        let rs: Vec<P1Residue> = res.marks.iter().map(|&(_, r)| r).collect();
        assert_eq!(
            rs,
            vec![P1Residue::Finite(0), P1Residue::Finite(1), P1Residue::Finite(2)]
        );
        assert_eq!(res.edges, vec![(0, P1Residue::Infinity)]);
    }

    #[test]
    fn normalize_identity() {
        let cfg = config(7, 1, &[0, 1, 2, 3]);
        assert_eq!(cfg.trace, NormalizationTrace::Identity);
        assert_eq!(cfg.genus, 1);
    }

    #[test]
    fn normalize_inversion() {
        let cfg = BranchConfig::new(
            OddPrime::new(5).unwrap(),
            integer(1),
            vec![
                RawPoint::Finite(integer(0)),
                RawPoint::Finite(integer(1)),
                RawPoint::Finite(integer(2)),
                RawPoint::Infinity,
            ],
        )
        .unwrap();
        assert_eq!(
            cfg.trace,
            NormalizationTrace::Inversion { a: integer(3) }
        );
        assert_eq!(
            cfg.points,
            vec![rational(-1, 3), rational(-1, 2), integer(-1), integer(0)]
        );
        // c picks up prod (a - xi) = 3 * 2 * 1 = 6
        assert_eq!(cfg.c, integer(6));
    }

    #[test]
    fn normalize_rejects_bad_input() {
        let p5 = OddPrime::new(5).unwrap();
        let dup = BranchConfig::new(
            p5,
            integer(1),
            vec![
                RawPoint::Finite(integer(0)),
                RawPoint::Finite(integer(0)),
                RawPoint::Finite(integer(1)),
                RawPoint::Finite(integer(2)),
            ],
        );
        assert_eq!(dup, Err(Error::DuplicatePoints("0".into())));
        let odd = BranchConfig::new(
            p5,
            integer(1),
            vec![
                RawPoint::Finite(integer(0)),
                RawPoint::Finite(integer(1)),
                RawPoint::Finite(integer(2)),
            ],
        );
        assert_eq!(odd, Err(Error::WrongPointCount(3)));
        let zero_c = BranchConfig::new(
            p5,
            integer(0),
            vec![
                RawPoint::Finite(integer(0)),
                RawPoint::Finite(integer(1)),
                RawPoint::Finite(integer(2)),
                RawPoint::Finite(integer(3)),
            ],
        );
        assert_eq!(zero_c, Err(Error::ZeroLeadingCoefficient));
    }

    #[test]
    fn negative_depths() {
        // points 0, 1/7, 1, 8/7 at p=7: two clusters of depth 0 inside a
        // depth -1 root, which contracts to a single edge of thickness 2.
        let cfg = BranchConfig::new(
            OddPrime::new(7).unwrap(),
            integer(1),
            vec![
                RawPoint::Finite(integer(0)),
                RawPoint::Finite(rational(1, 7)),
                RawPoint::Finite(integer(1)),
                RawPoint::Finite(rational(8, 7)),
            ],
        )
        .unwrap();
        let h = build_cluster_hierarchy(&cfg);
        assert_eq!(h[0].depth, -1);
        let tree = stabilize(&h, &cfg).unwrap();
        assert_eq!(tree.vertices.len(), 2);
        assert_eq!(tree.edges[0].thickness, 2);
    }
}
