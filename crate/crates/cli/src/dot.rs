//! DOT rendering of the dual graphs, plus a small validator for the
//! emitted subset of the language.
//!
//! Components are circle nodes labeled "g=<genus>" (blank for genus 0),
//! marks are dashed edges to point-shaped leaves "P<i>", double points are
//! edges labeled with their thickness, and edges over even double points
//! carry a `parity="even"` attribute.

use hyperred_core::fiber::ReductionReport;
use hyperred_core::tree::Parity;

fn genus_label(genus: usize) -> String {
    if genus == 0 {
        String::new()
    } else {
        format!("g={genus}")
    }
}

/// The marked genus-0 tree as an undirected DOT graph.
pub fn emit_dot_tree(report: &ReductionReport) -> String {
    let mut out = String::from("graph marked_tree {\n");
    for (i, _) in report.tree.vertices.iter().enumerate() {
        out.push_str(&format!("  v{i} [shape=circle, label=\"\"];\n"));
    }
    for (m, _) in report.config.points.iter().enumerate() {
        out.push_str(&format!("  P{m} [shape=point, label=\"P{m}\"];\n"));
    }
    for (i, e) in report.tree.edges.iter().enumerate() {
        let parity = match report.edge_classes[i].parity {
            Parity::Even => ", parity=\"even\"",
            Parity::Odd => "",
        };
        out.push_str(&format!(
            "  v{} -- v{} [label=\"{}\"{}];\n",
            e.a, e.b, e.thickness, parity
        ));
    }
    for (i, v) in report.tree.vertices.iter().enumerate() {
        for &m in &v.marks {
            out.push_str(&format!("  v{i} -- P{m} [style=dashed];\n"));
        }
    }
    out.push_str("}\n");
    out
}

/// The special fiber of the curve as an undirected DOT graph.
pub fn emit_dot_fiber(report: &ReductionReport) -> String {
    let mut out = String::from("graph special_fiber {\n");
    for (i, c) in report.fiber.components.iter().enumerate() {
        out.push_str(&format!(
            "  c{i} [shape=circle, label=\"{}\"];\n",
            genus_label(c.genus)
        ));
    }
    for (m, _) in report.config.points.iter().enumerate() {
        out.push_str(&format!("  P{m} [shape=point, label=\"P{m}\"];\n"));
    }
    for e in &report.fiber.edges {
        let parity = match e.parity {
            Parity::Even => ", parity=\"even\"",
            Parity::Odd => "",
        };
        out.push_str(&format!(
            "  c{} -- c{} [label=\"{}\"{}];\n",
            e.a, e.b, e.thickness, parity
        ));
    }
    for (m, &c) in report.fiber.lifted_marks.iter().enumerate() {
        out.push_str(&format!("  c{c} -- P{m} [style=dashed];\n"));
    }
    out.push_str("}\n");
    out
}

/// Check that a string is a well-formed graph in the subset of DOT this
/// tool emits: `graph name { node and edge statements }`.
pub fn validate_dot(text: &str) -> Result<(), String> {
    let mut tokens = tokenize(text)?;
    tokens.reverse(); // pop from the back = read from the front
    expect(&mut tokens, "graph")?;
    let name = tokens.pop().ok_or("missing graph name")?;
    if !is_ident(&name) {
        return Err(format!("bad graph name '{name}'"));
    }
    expect(&mut tokens, "{")?;
    loop {
        let tok = tokens.pop().ok_or("unterminated graph block")?;
        if tok == "}" {
            break;
        }
        if !is_ident(&tok) {
            return Err(format!("expected node id, got '{tok}'"));
        }
        // Either an edge statement or a node statement.
        let next = tokens.pop().ok_or("unterminated statement")?;
        let after_attrs = if next == "--" {
            let other = tokens.pop().ok_or("dangling edge")?;
            if !is_ident(&other) {
                return Err(format!("bad edge endpoint '{other}'"));
            }
            tokens.pop().ok_or("unterminated edge statement")?
        } else {
            next
        };
        let terminator = if after_attrs == "[" {
            parse_attrs(&mut tokens)?;
            tokens.pop().ok_or("missing ';'")?
        } else {
            after_attrs
        };
        if terminator != ";" {
            return Err(format!("expected ';', got '{terminator}'"));
        }
    }
    if let Some(extra) = tokens.pop() {
        return Err(format!("trailing content '{extra}'"));
    }
    Ok(())
}

fn parse_attrs(tokens: &mut Vec<String>) -> Result<(), String> {
    loop {
        let key = tokens.pop().ok_or("unterminated attribute list")?;
        if key == "]" {
            return Ok(());
        }
        if !is_ident(&key) {
            return Err(format!("bad attribute name '{key}'"));
        }
        expect(tokens, "=")?;
        let value = tokens.pop().ok_or("missing attribute value")?;
        let quoted = value.starts_with('"') && value.ends_with('"') && value.len() >= 2;
        if !quoted && !is_ident(&value) {
            return Err(format!("bad attribute value '{value}'"));
        }
        let sep = tokens.pop().ok_or("unterminated attribute list")?;
        match sep.as_str() {
            "]" => return Ok(()),
            "," => continue,
            other => return Err(format!("expected ',' or ']', got '{other}'")),
        }
    }
}

fn expect(tokens: &mut Vec<String>, want: &str) -> Result<(), String> {
    match tokens.pop() {
        Some(t) if t == want => Ok(()),
        Some(t) => Err(format!("expected '{want}', got '{t}'")),
        None => Err(format!("expected '{want}', got end of input")),
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn tokenize(text: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '{' | '}' | '[' | ']' | ';' | ',' | '=' => {
                tokens.push(ch.to_string());
                chars.next();
            }
            '-' => {
                chars.next();
                if chars.next() != Some('-') {
                    return Err("stray '-'".into());
                }
                tokens.push("--".into());
            }
            '"' => {
                let mut s = String::from('"');
                chars.next();
                loop {
                    match chars.next() {
                        Some('"') => {
                            s.push('"');
                            break;
                        }
                        Some(c) => s.push(c),
                        None => return Err("unterminated string".into()),
                    }
                }
                tokens.push(s);
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(s);
            }
            other => return Err(format!("unexpected character '{other}'")),
        }
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyze_text;

    fn count(haystack: &str, needle: &str) -> usize {
        haystack.matches(needle).count()
    }

    #[test]
    fn tree_dot_for_good_reduction() {
        let (_, report) =
            analyze_text(r#"{"p":7,"roots":["0","1","2","3"],"c":"1"}"#).unwrap();
        let text = emit_dot_tree(&report);
        validate_dot(&text).unwrap();
        assert_eq!(count(&text, "shape=circle"), 1);
        assert_eq!(count(&text, "style=dashed"), 4);
        assert_eq!(count(&text, " -- v"), 0);
    }

    #[test]
    fn fiber_dot_for_two_cycle() {
        let (_, report) =
            analyze_text(r#"{"p":5,"roots":["0","5","1","6"],"c":"1"}"#).unwrap();
        let text = emit_dot_fiber(&report);
        validate_dot(&text).unwrap();
        assert_eq!(count(&text, "shape=circle"), 2);
        assert_eq!(count(&text, "label=\"2\""), 2);
        assert_eq!(count(&text, "parity=\"even\""), 2);
        assert_eq!(count(&text, "style=dashed"), 4);
    }

    #[test]
    fn fiber_dot_labels_genus() {
        let (_, report) =
            analyze_text(r#"{"p":5,"roots":["0","5","10","1","6","11"],"c":"1"}"#)
                .unwrap();
        let text = emit_dot_fiber(&report);
        validate_dot(&text).unwrap();
        assert_eq!(count(&text, "label=\"g=1\""), 2);
        assert_eq!(count(&text, "label=\"2\""), 1);
        assert_eq!(count(&text, "parity"), 0); // odd points carry no attribute
    }

    #[test]
    fn validator_accepts_emitted_shape() {
        let text = "graph g {\n  v0 [shape=circle, label=\"\"];\n  v0 -- v1 [label=\"2\", parity=\"even\"];\n  v0 -- P0 [style=dashed];\n}\n";
        validate_dot(text).unwrap();
    }

    #[test]
    fn validator_rejects_garbage() {
        assert!(validate_dot("digraph g { }").is_err());
        assert!(validate_dot("graph g { v0 -- ; }").is_err());
        assert!(validate_dot("graph g { v0 [label=\"x]; }").is_err());
        assert!(validate_dot("graph g { v0 [label=\"x\"] }").is_err());
        assert!(validate_dot("graph g { v0; } trailing").is_err());
    }
}
