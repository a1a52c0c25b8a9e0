//! Catalog of combinatorial reduction types: abstract stable 2g+2-marked
//! trees up to isomorphism, with the special-fiber combinatorics each one
//! produces.
//!
//! Marks are unlabeled here; the catalog counts configurations, not
//! pointed curves. Two-line components appear as single entries with a
//! pair flag rather than duplicated vertices.

use crate::canon::LabeledTree;
use crate::error::{Error, Result};
use crate::tree::Parity;

/// Stable marked tree with unlabeled marks and unweighted edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractMarkedTree {
    /// Mark count per vertex.
    pub marks: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl AbstractMarkedTree {
    pub fn total_marks(&self) -> usize {
        self.marks.iter().sum()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| *a == v || *b == v)
            .count()
    }

    pub fn is_stable(&self) -> bool {
        (0..self.marks.len()).all(|v| self.degree(v) + self.marks[v] >= 3)
            || (self.marks.len() == 1 && self.marks[0] >= 3)
    }

    fn to_labeled(&self) -> LabeledTree {
        LabeledTree {
            vertex_labels: self.marks.iter().map(|m| format!("n{m}")).collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| (a, b, String::new()))
                .collect(),
        }
    }

    /// Marks on the side of `edge` containing `side`.
    fn side_marks(&self, edge: usize, side: usize) -> usize {
        let mut seen = vec![false; self.marks.len()];
        seen[side] = true;
        let mut stack = vec![side];
        while let Some(v) = stack.pop() {
            for (eid, &(a, b)) in self.edges.iter().enumerate() {
                if eid == edge {
                    continue;
                }
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        (0..self.marks.len())
            .filter(|&v| seen[v])
            .map(|v| self.marks[v])
            .sum()
    }

    /// Parities of all edges; well defined because the total mark count is
    /// even.
    pub fn edge_parities(&self) -> Vec<Parity> {
        self.edges
            .iter()
            .enumerate()
            .map(|(eid, &(a, _))| {
                if self.side_marks(eid, a).is_multiple_of(2) {
                    Parity::Even
                } else {
                    Parity::Odd
                }
            })
            .collect()
    }
}

/// A string invariant that is complete for isomorphism of abstract marked
/// trees: center-rooted AHU code over mark-count labels.
pub fn canonical_code(tree: &AbstractMarkedTree) -> String {
    tree.to_labeled().canonical_code()
}

/// Reorder vertices into the canonical traversal order, so equal types are
/// byte-identical, not merely isomorphic.
fn canonicalize(tree: &AbstractMarkedTree) -> AbstractMarkedTree {
    let order = tree.to_labeled().canonical_order();
    let mut pos = vec![0usize; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let marks = order.iter().map(|&v| tree.marks[v]).collect();
    let mut edges: Vec<(usize, usize)> = tree
        .edges
        .iter()
        .map(|&(a, b)| (pos[a].min(pos[b]), pos[a].max(pos[b])))
        .collect();
    edges.sort_unstable();
    AbstractMarkedTree { marks, edges }
}

/// Fiber combinatorics of an abstract type, thicknesses omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractFiberType {
    /// Per base vertex: component genus and whether it is a line pair.
    pub components: Vec<AbstractComponent>,
    pub edges: Vec<AbstractFiberEdge>,
    pub betti: i64,
    pub toric_rank: usize,
    pub abelian_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractComponent {
    pub genus: usize,
    pub two_line: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractFiberEdge {
    pub base: (usize, usize),
    pub parity: Parity,
    /// Double points above the base edge: 1 for odd, 2 for even.
    pub lifts: usize,
}

/// Apply the special-fiber combinatorics to an abstract type: T-sets from
/// marks and odd edges, genus |T|/2 - 1, pairs over empty T, one or two
/// double points per edge by parity, ranks by counting.
pub fn derive_fiber_type(tree: &AbstractMarkedTree) -> AbstractFiberType {
    let parities = tree.edge_parities();
    let t_size: Vec<usize> = (0..tree.marks.len())
        .map(|v| {
            tree.marks[v]
                + tree
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(eid, &(a, b))| {
                        (a == v || b == v) && parities[*eid] == Parity::Odd
                    })
                    .count()
        })
        .collect();
    let components: Vec<AbstractComponent> = t_size
        .iter()
        .map(|&t| {
            debug_assert!(t % 2 == 0);
            if t > 0 {
                AbstractComponent {
                    genus: t / 2 - 1,
                    two_line: false,
                }
            } else {
                AbstractComponent {
                    genus: 0,
                    two_line: true,
                }
            }
        })
        .collect();
    let edges: Vec<AbstractFiberEdge> = tree
        .edges
        .iter()
        .zip(&parities)
        .map(|(&base, &parity)| AbstractFiberEdge {
            base,
            parity,
            lifts: if parity == Parity::Odd { 1 } else { 2 },
        })
        .collect();
    let vertex_count: usize = components
        .iter()
        .map(|c| if c.two_line { 2 } else { 1 })
        .sum();
    let edge_count: usize = edges.iter().map(|e| e.lifts).sum();
    let betti = edge_count as i64 - vertex_count as i64 + 1;
    let n0 = parities.iter().filter(|&&p| p == Parity::Even).count();
    let m0 = components.iter().filter(|c| c.two_line).count();
    debug_assert_eq!(betti, n0 as i64 - m0 as i64);
    let toric_rank = n0 - m0;
    AbstractFiberType {
        abelian_rank: components.iter().map(|c| c.genus).sum(),
        components,
        edges,
        betti,
        toric_rank,
    }
}

/// All isomorphism classes of stable 2g+2-marked trees, sorted by
/// canonical code. Tree shapes come from Prufer sequences, marks from
/// compositions, duplicates fall to the canonical code.
pub fn enumerate_types(g: usize) -> Result<Vec<AbstractMarkedTree>> {
    if g < 1 {
        return Err(Error::GenusTooSmall(g));
    }
    let n = 2 * g + 2;
    let mut by_code: std::collections::BTreeMap<String, AbstractMarkedTree> =
        std::collections::BTreeMap::new();
    // A stable tree with n marks has at most n-2 vertices (each leaf eats
    // two marks, each degree-2 vertex one).
    for v in 1..=(n - 2) {
        for shape in tree_shapes(v) {
            for marks in compositions(n, v) {
                let tree = AbstractMarkedTree {
                    marks,
                    edges: shape.clone(),
                };
                if !tree.is_stable() {
                    continue;
                }
                by_code
                    .entry(canonical_code(&tree))
                    .or_insert_with(|| canonicalize(&tree));
            }
        }
    }
    Ok(by_code.into_values().collect())
}

/// Unlabeled tree shapes on v vertices (edge lists up to isomorphism).
fn tree_shapes(v: usize) -> Vec<Vec<(usize, usize)>> {
    if v == 1 {
        return vec![vec![]];
    }
    if v == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut shapes = Vec::new();
    let mut prufer = vec![0usize; v - 2];
    loop {
        let edges = prufer_decode(&prufer, v);
        let code = LabeledTree {
            vertex_labels: vec![String::new(); v],
            edges: edges.iter().map(|&(a, b)| (a, b, String::new())).collect(),
        }
        .canonical_code();
        if seen.insert(code) {
            shapes.push(edges);
        }
        // Next sequence in base v.
        let mut i = 0;
        loop {
            if i == prufer.len() {
                return shapes;
            }
            prufer[i] += 1;
            if prufer[i] < v {
                break;
            }
            prufer[i] = 0;
            i += 1;
        }
    }
}

fn prufer_decode(seq: &[usize], v: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; v];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(v - 1);
    for &s in seq {
        let leaf = (0..v).find(|&u| degree[u] == 1).expect("a leaf remains");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..v).filter(|&u| degree[u] == 1).collect();
    debug_assert_eq!(rest.len(), 2);
    edges.push((rest[0], rest[1]));
    edges
}

/// All vectors of `parts` nonnegative integers summing to `total`.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; parts];
    fn rec(total: usize, idx: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if idx + 1 == cur.len() {
            cur[idx] = total;
            out.push(cur.clone());
            return;
        }
        for take in 0..=total {
            cur[idx] = take;
            rec(total - take, idx + 1, cur, out);
        }
    }
    rec(total, 0, &mut cur, &mut out);
    out
}
