//! Brute-force reference construction of the marked tree, kept independent
//! of the single-linkage path in the parent module.
//!
//! For every pair of branch points the enclosing disc is materialized
//! directly; marks hang off their smallest disc as pendants, and metric
//! degree-2 disc nodes (counting pendants) are suppressed, summing
//! thicknesses. The result must be isomorphic to [`super::stabilize`].

use std::collections::VecDeque;

use super::{BranchConfig, Cluster, MarkedTree, TreeEdge, TreeVertex};
use crate::error::{Error, Result};

/// O(n^3)-ish reference implementation of the stable marked tree.
pub fn naive_tree_oracle(config: &BranchConfig) -> Result<MarkedTree> {
    let n = config.point_count();
    // Every pair (i, j) spans the disc around xi_i of radius |xi_i - xi_j|.
    let mut discs: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = config.pair_valuation(i, j).finite();
            let members: Vec<usize> = (0..n)
                .filter(|&k| k == i || config.pair_valuation(k, i).finite() >= r)
                .collect();
            if !discs.contains(&members) {
                discs.push(members);
            }
        }
    }
    let clusters: Vec<Cluster> = discs
        .into_iter()
        .map(|members| {
            let depth = members
                .iter()
                .flat_map(|&i| {
                    members
                        .iter()
                        .filter(move |&&j| j > i)
                        .map(move |&j| config.pair_valuation(i, j).finite())
                })
                .min()
                .expect("disc has at least two members");
            Cluster { members, depth }
        })
        .collect();

    // Nodes: discs then one pendant per mark.
    let m = clusters.len();
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    for (i, c) in clusters.iter().enumerate() {
        let parent = clusters
            .iter()
            .enumerate()
            .filter(|(_, d)| c.is_strict_subset_of(d))
            .min_by_key(|(_, d)| d.members.len());
        if let Some((j, d)) = parent {
            edges.push((i, j, (c.depth - d.depth) as u64));
        }
    }
    // mark_home[k] = disc node currently carrying point k.
    let mut mark_home: Vec<usize> = (0..n)
        .map(|k| {
            clusters
                .iter()
                .enumerate()
                .filter(|(_, c)| c.contains(k))
                .min_by_key(|(_, c)| c.members.len())
                .map(|(i, _)| i)
                .expect("point lies in the full disc")
        })
        .collect();

    let mut alive = vec![true; m];
    loop {
        let metric_degree = |v: usize, edges: &[(usize, usize, u64)], homes: &[usize]| {
            edges.iter().filter(|(a, b, _)| *a == v || *b == v).count()
                + homes.iter().filter(|&&h| h == v).count()
        };
        let target =
            (0..m).find(|&v| alive[v] && metric_degree(v, &edges, &mark_home) <= 2);
        let Some(v) = target else { break };
        let incident: Vec<usize> = edges
            .iter()
            .enumerate()
            .filter(|(_, (a, b, _))| *a == v || *b == v)
            .map(|(i, _)| i)
            .collect();
        let pendants: Vec<usize> = (0..n).filter(|&k| mark_home[k] == v).collect();
        match (incident.len(), pendants.len()) {
            (2, 0) => {
                let (a1, b1, t1) = edges[incident[0]];
                let (a2, b2, t2) = edges[incident[1]];
                let u = if a1 == v { b1 } else { a1 };
                let w = if a2 == v { b2 } else { a2 };
                edges.remove(incident[1]);
                edges.remove(incident[0]);
                edges.push((u, w, t1 + t2));
                alive[v] = false;
            }
            (1, 1) => {
                let (a, b, _) = edges[incident[0]];
                let u = if a == v { b } else { a };
                mark_home[pendants[0]] = u;
                edges.remove(incident[0]);
                alive[v] = false;
            }
            (d, k) => {
                return Err(Error::InternalInstability(format!(
                    "oracle node with {d} disc edges and {k} pendants"
                )));
            }
        }
    }

    let survivors: Vec<usize> = (0..m).filter(|&v| alive[v]).collect();
    let root_old = survivors
        .iter()
        .copied()
        .find(|&v| clusters[v].members.len() == n)
        .unwrap_or_else(|| {
            survivors
                .iter()
                .copied()
                .min_by_key(|&v| (clusters[v].depth, clusters[v].center()))
                .expect("a disc survives")
        });

    let mut new_id = vec![usize::MAX; m];
    let mut order = vec![root_old];
    new_id[root_old] = 0;
    let mut edge_order = Vec::new();
    let mut queue = VecDeque::from([root_old]);
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
        nbrs.sort_by_key(|(u, _)| clusters[*u].members[0]);
        for (u, eid) in nbrs {
            new_id[u] = order.len();
            order.push(u);
            edge_order.push(eid);
            queue.push_back(u);
        }
    }
    if order.len() != survivors.len() {
        return Err(Error::InternalInstability(
            "oracle tree is disconnected".into(),
        ));
    }

    let vertices = order
        .iter()
        .map(|&v| {
            let mut marks: Vec<usize> = (0..n).filter(|&k| mark_home[k] == v).collect();
            marks.sort_unstable();
            TreeVertex {
                cluster: clusters[v].clone(),
                marks,
            }
        })
        .collect();
    let out_edges = edge_order
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
    Ok(MarkedTree {
        vertices,
        edges: out_edges,
        root: 0,
    })
}
