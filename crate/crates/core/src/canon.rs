//! Canonical forms for small labeled trees and multigraphs.
//!
//! Tree codes are complete isomorphism invariants computed by rooting at
//! the graph center and recursively sorting child codes (AHU style), with
//! vertex and edge labels folded in. Multigraph codes use color refinement
//! with individualization and are complete for the small decorated dual
//! graphs that occur here.

use std::collections::BTreeMap;

/// Tree with string labels on vertices and edges. Vertices are 0..n.
#[derive(Debug, Clone)]
pub struct LabeledTree {
    pub vertex_labels: Vec<String>,
    /// (a, b, label); the tree axioms are the caller's responsibility.
    pub edges: Vec<(usize, usize, String)>,
}

impl LabeledTree {
    fn adjacency(&self) -> Vec<Vec<(usize, &str)>> {
        let mut adj = vec![Vec::new(); self.vertex_labels.len()];
        for (a, b, l) in &self.edges {
            adj[*a].push((*b, l.as_str()));
            adj[*b].push((*a, l.as_str()));
        }
        adj
    }

    /// Graph center: one or two vertices maximizing distance from leaves.
    fn centers(&self) -> Vec<usize> {
        let n = self.vertex_labels.len();
        if n <= 2 {
            return (0..n).collect();
        }
        let adj = self.adjacency();
        let mut degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
        let mut removed = vec![false; n];
        let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            let mut next = Vec::new();
            for &v in &layer {
                removed[v] = true;
                remaining -= 1;
                for &(u, _) in &adj[v] {
                    if !removed[u] {
                        degree[u] -= 1;
                        if degree[u] == 1 {
                            next.push(u);
                        }
                    }
                }
            }
            layer = next;
        }
        (0..n).filter(|&v| !removed[v]).collect()
    }

    fn rooted_code(&self, v: usize, parent: Option<usize>, adj: &[Vec<(usize, &str)>]) -> String {
        let mut children: Vec<String> = adj[v]
            .iter()
            .filter(|(u, _)| Some(*u) != parent)
            .map(|&(u, l)| format!("[{l}]{}", self.rooted_code(u, Some(v), adj)))
            .collect();
        children.sort();
        format!("({}|{})", self.vertex_labels[v], children.join(""))
    }

    /// Complete isomorphism invariant: equal codes iff there is a label
    /// preserving tree isomorphism.
    pub fn canonical_code(&self) -> String {
        if self.vertex_labels.is_empty() {
            return String::from("()");
        }
        let adj = self.adjacency();
        self.centers()
            .into_iter()
            .map(|c| self.rooted_code(c, None, &adj))
            .min()
            .unwrap()
    }

    /// Vertex order of a canonical traversal: root at the center realizing
    /// the canonical code, visit children in sorted-code order. Ties between
    /// equal-code siblings are broken by vertex index, which does not affect
    /// the code itself.
    pub fn canonical_order(&self) -> Vec<usize> {
        if self.vertex_labels.is_empty() {
            return vec![];
        }
        let adj = self.adjacency();
        let root = self
            .centers()
            .into_iter()
            .min_by_key(|&c| self.rooted_code(c, None, &adj))
            .unwrap();
        let mut order = Vec::new();
        let mut stack = vec![(root, None)];
        while let Some((v, parent)) = stack.pop() {
            order.push(v);
            let mut children: Vec<(String, usize)> = adj[v]
                .iter()
                .filter(|(u, _)| Some(*u) != parent)
                .map(|&(u, l)| (format!("[{l}]{}", self.rooted_code(u, Some(v), &adj)), u))
                .collect();
            children.sort();
            for (_, u) in children.into_iter().rev() {
                stack.push((u, Some(v)));
            }
        }
        order
    }
}

/// Undirected multigraph with string labels on vertices and edges.
#[derive(Debug, Clone)]
pub struct LabeledMultigraph {
    pub vertex_labels: Vec<String>,
    pub edges: Vec<(usize, usize, String)>,
}

impl LabeledMultigraph {
    /// Complete isomorphism invariant for small graphs: iterated color
    /// refinement, branching over every vertex of the first non-singleton
    /// color class, minimizing the resulting adjacency encoding.
    pub fn canonical_code(&self) -> String {
        let n = self.vertex_labels.len();
        if n == 0 {
            return String::from("{}");
        }
        let colors: Vec<String> = self.vertex_labels.clone();
        self.canonize(&self.refine(colors))
    }

    fn refine(&self, mut colors: Vec<String>) -> Vec<String> {
        loop {
            let mut refined: Vec<String> = Vec::with_capacity(colors.len());
            for v in 0..colors.len() {
                let mut nbrs: Vec<String> = self
                    .edges
                    .iter()
                    .filter_map(|(a, b, l)| {
                        if *a == v {
                            Some(format!("{l}~{}", colors[*b]))
                        } else if *b == v {
                            Some(format!("{l}~{}", colors[*a]))
                        } else {
                            None
                        }
                    })
                    .collect();
                nbrs.sort();
                refined.push(format!("{}<{}>", colors[v], nbrs.join(";")));
            }
            if partition_of(&refined) == partition_of(&colors) {
                return colors;
            }
            // Compress to ranks so repeated refinement does not blow up the
            // color strings. Ranks are assigned by sorted order of the
            // refined strings, which is isomorphism invariant.
            let mut sorted: Vec<&String> = refined.iter().collect();
            sorted.sort();
            sorted.dedup();
            let rank: BTreeMap<&String, usize> =
                sorted.iter().enumerate().map(|(i, s)| (*s, i)).collect();
            colors = refined.iter().map(|s| format!("r{}", rank[s])).collect();
        }
    }

    fn canonize(&self, colors: &[String]) -> String {
        // All singleton classes: emit the encoding directly.
        let mut class_of: BTreeMap<&String, Vec<usize>> = BTreeMap::new();
        for (v, c) in colors.iter().enumerate() {
            class_of.entry(c).or_default().push(v);
        }
        if let Some((_, members)) = class_of.iter().find(|(_, m)| m.len() > 1) {
            // Branch: individualize each member of the first ambiguous
            // class, refine, recurse, take the minimum encoding.
            members
                .iter()
                .map(|&v| {
                    let mut c2 = colors.to_vec();
                    c2[v] = format!("{}!", c2[v]);
                    self.canonize(&self.refine(c2))
                })
                .min()
                .unwrap()
        } else {
            let mut order: Vec<usize> = (0..colors.len()).collect();
            order.sort_by(|&a, &b| colors[a].cmp(&colors[b]));
            let mut pos = vec![0usize; colors.len()];
            for (i, &v) in order.iter().enumerate() {
                pos[v] = i;
            }
            let verts: Vec<&str> = order
                .iter()
                .map(|&v| self.vertex_labels[v].as_str())
                .collect();
            let mut edges: Vec<String> = self
                .edges
                .iter()
                .map(|(a, b, l)| {
                    let (x, y) = (pos[*a].min(pos[*b]), pos[*a].max(pos[*b]));
                    format!("{x}-{y}:{l}")
                })
                .collect();
            edges.sort();
            format!("{{{}||{}}}", verts.join(","), edges.join(","))
        }
    }
}

fn partition_of(colors: &[String]) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<&String, Vec<usize>> = BTreeMap::new();
    for (v, c) in colors.iter().enumerate() {
        classes.entry(c).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    out.sort();
    out
}
