//! Canonical JSON documents for reports and the atlas catalog.
//!
//! Key order is the struct declaration order, lists are sorted by their
//! stable ids (vertices "v0", "v1", ... in BFS order from the root, fiber
//! components "c0", ... in construction order), so identical input yields
//! byte-identical output. Schema version "1"; additive changes bump it.

use serde::Serialize;

use hyperred_core::arith::format_rational;
use hyperred_core::atlas::{self, AbstractMarkedTree};
use hyperred_core::fiber::ReductionReport;
use hyperred_core::tree::NormalizationTrace;

use crate::input::{CurveData, RawInput};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize)]
struct ReportDocument {
    schema_version: &'static str,
    input: InputEcho,
    normalization: NormalizationDoc,
    genus: usize,
    branch_points: Vec<String>,
    leading_coefficient: String,
    extension: ExtensionDoc,
    tree: TreeDoc,
    special_fiber: FiberDoc,
    jacobian: JacobianDoc,
    flags: FlagsDoc,
}

#[derive(Serialize)]
struct InputEcho {
    p: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    roots: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs: Option<Vec<String>>,
}

#[derive(Serialize)]
struct NormalizationDoc {
    mobius: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<String>,
}

#[derive(Serialize)]
struct ExtensionDoc {
    e: u64,
    criterion: &'static str,
    vertex_data: Vec<VertexValuationDoc>,
}

#[derive(Serialize)]
struct VertexValuationDoc {
    vertex: String,
    valuation: i64,
    parity: u8,
}

#[derive(Serialize)]
struct TreeDoc {
    root: String,
    vertices: Vec<TreeVertexDoc>,
    edges: Vec<TreeEdgeDoc>,
}

#[derive(Serialize)]
struct TreeVertexDoc {
    id: String,
    center: String,
    depth: i64,
    members: Vec<usize>,
    marks: Vec<usize>,
}

#[derive(Serialize)]
struct TreeEdgeDoc {
    id: String,
    ends: [String; 2],
    thickness: u64,
    parity: String,
    side_mark_count: usize,
}

#[derive(Serialize)]
struct FiberDoc {
    components: Vec<ComponentDoc>,
    edges: Vec<FiberEdgeDoc>,
    marks: Vec<MarkDoc>,
}

#[derive(Serialize)]
struct ComponentDoc {
    id: String,
    base_vertex: String,
    sheet: String,
    genus: usize,
    t_marks: Vec<usize>,
    t_odd_edges: Vec<String>,
    split: String,
    equation: Vec<u64>,
}

#[derive(Serialize)]
struct FiberEdgeDoc {
    id: String,
    ends: [String; 2],
    base_edge: String,
    thickness: u64,
    parity: String,
}

#[derive(Serialize)]
struct MarkDoc {
    mark: usize,
    component: String,
}

#[derive(Serialize)]
struct JacobianDoc {
    toric_rank: usize,
    abelian_rank: usize,
    n0: usize,
    m0: usize,
    potential_good_reduction: bool,
}

#[derive(Serialize)]
struct FlagsDoc {
    marked_genus0_good_reduction: bool,
    #[serde(rename = "good_reduction_over_K")]
    good_reduction_over_k: bool,
    good_reduction_after_extension: bool,
}

fn vid(i: usize) -> String {
    format!("v{i}")
}

fn eid(i: usize) -> String {
    format!("e{i}")
}

fn cid(i: usize) -> String {
    format!("c{i}")
}

fn echo(input: &RawInput) -> InputEcho {
    match &input.data {
        CurveData::Roots { c, roots } => InputEcho {
            p: input.p,
            c: Some(format_rational(c)),
            roots: Some(roots.iter().map(|r| r.to_string()).collect()),
            coeffs: None,
        },
        CurveData::Coeffs { coeffs } => InputEcho {
            p: input.p,
            c: None,
            roots: None,
            coeffs: Some(coeffs.iter().map(format_rational).collect()),
        },
    }
}

/// Serialize a report as canonical JSON (trailing newline included).
pub fn emit_json(report: &ReductionReport, input: &RawInput) -> String {
    let (mobius, a) = match &report.config.trace {
        NormalizationTrace::Identity => ("identity", None),
        NormalizationTrace::Inversion { a } => ("inversion", Some(format_rational(a))),
    };
    let doc = ReportDocument {
        schema_version: SCHEMA_VERSION,
        input: echo(input),
        normalization: NormalizationDoc { mobius, a },
        genus: report.config.genus,
        branch_points: report
            .config
            .points
            .iter()
            .map(format_rational)
            .collect(),
        leading_coefficient: format_rational(&report.config.c),
        extension: ExtensionDoc {
            e: report.decision.e,
            criterion: "gauss_valuation_parity",
            vertex_data: report
                .decision
                .valuations
                .iter()
                .zip(&report.decision.parities)
                .enumerate()
                .map(|(i, (&valuation, &parity))| VertexValuationDoc {
                    vertex: vid(i),
                    valuation,
                    parity,
                })
                .collect(),
        },
        tree: TreeDoc {
            root: vid(report.tree.root),
            vertices: report
                .tree
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| TreeVertexDoc {
                    id: vid(i),
                    center: format_rational(&report.config.points[v.cluster.center()]),
                    depth: v.cluster.depth,
                    members: v.cluster.members.clone(),
                    marks: v.marks.clone(),
                })
                .collect(),
            edges: report
                .tree
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| TreeEdgeDoc {
                    id: eid(i),
                    ends: [vid(e.a), vid(e.b)],
                    thickness: e.thickness,
                    parity: report.edge_classes[i].parity.to_string(),
                    side_mark_count: report.edge_classes[i].side_mark_count,
                })
                .collect(),
        },
        special_fiber: FiberDoc {
            components: report
                .fiber
                .components
                .iter()
                .enumerate()
                .map(|(i, c)| ComponentDoc {
                    id: cid(i),
                    base_vertex: vid(c.base_vertex),
                    sheet: c.sheet.to_string(),
                    genus: c.genus,
                    t_marks: c.t_marks.clone(),
                    t_odd_edges: c.t_odd_edges.iter().map(|&e| eid(e)).collect(),
                    split: c.split.to_string(),
                    equation: report.equations[i].coeffs().to_vec(),
                })
                .collect(),
            edges: report
                .fiber
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| FiberEdgeDoc {
                    id: format!("f{i}"),
                    ends: [cid(e.a), cid(e.b)],
                    base_edge: eid(e.base_edge),
                    thickness: e.thickness,
                    parity: e.parity.to_string(),
                })
                .collect(),
            marks: report
                .fiber
                .lifted_marks
                .iter()
                .enumerate()
                .map(|(m, &c)| MarkDoc {
                    mark: m,
                    component: cid(c),
                })
                .collect(),
        },
        jacobian: JacobianDoc {
            toric_rank: report.jacobian.toric_rank,
            abelian_rank: report.jacobian.abelian_rank,
            n0: report.jacobian.n0,
            m0: report.jacobian.m0,
            potential_good_reduction: report.jacobian.potential_good,
        },
        flags: FlagsDoc {
            marked_genus0_good_reduction: report.flags.marked_genus0_good_reduction,
            good_reduction_over_k: report.flags.good_reduction_over_k,
            good_reduction_after_extension: report.flags.good_reduction_after_extension,
        },
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

#[derive(Serialize)]
struct AtlasDocument {
    schema_version: &'static str,
    genus: usize,
    count: usize,
    types: Vec<TypeDoc>,
}

#[derive(Serialize)]
struct TypeDoc {
    id: String,
    tree: AbstractTreeDoc,
    fiber: AbstractFiberDoc,
}

#[derive(Serialize)]
struct AbstractTreeDoc {
    vertices: Vec<AbstractVertexDoc>,
    edges: Vec<[String; 2]>,
}

#[derive(Serialize)]
struct AbstractVertexDoc {
    id: String,
    marks: usize,
}

#[derive(Serialize)]
struct AbstractFiberDoc {
    components: Vec<AbstractComponentDoc>,
    edges: Vec<AbstractEdgeDoc>,
    betti: i64,
    toric_rank: usize,
    abelian_rank: usize,
}

#[derive(Serialize)]
struct AbstractComponentDoc {
    base: String,
    genus: usize,
    two_line: bool,
}

#[derive(Serialize)]
struct AbstractEdgeDoc {
    base: [String; 2],
    parity: String,
    double_points: usize,
}

/// The catalog of all reduction types for a genus, as canonical JSON.
pub fn emit_atlas_json(genus: usize, types: &[AbstractMarkedTree]) -> String {
    let docs: Vec<TypeDoc> = types
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let fiber = atlas::derive_fiber_type(t);
            TypeDoc {
                id: format!("t{i}"),
                tree: AbstractTreeDoc {
                    vertices: t
                        .marks
                        .iter()
                        .enumerate()
                        .map(|(v, &marks)| AbstractVertexDoc { id: vid(v), marks })
                        .collect(),
                    edges: t.edges.iter().map(|&(a, b)| [vid(a), vid(b)]).collect(),
                },
                fiber: AbstractFiberDoc {
                    components: fiber
                        .components
                        .iter()
                        .enumerate()
                        .map(|(v, c)| AbstractComponentDoc {
                            base: vid(v),
                            genus: c.genus,
                            two_line: c.two_line,
                        })
                        .collect(),
                    edges: fiber
                        .edges
                        .iter()
                        .map(|e| AbstractEdgeDoc {
                            base: [vid(e.base.0), vid(e.base.1)],
                            parity: e.parity.to_string(),
                            double_points: e.lifts,
                        })
                        .collect(),
                    betti: fiber.betti,
                    toric_rank: fiber.toric_rank,
                    abelian_rank: fiber.abelian_rank,
                },
            }
        })
        .collect();
    let doc = AtlasDocument {
        schema_version: SCHEMA_VERSION,
        genus,
        count: types.len(),
        types: docs,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("atlas serializes");
    out.push('\n');
    out
}
