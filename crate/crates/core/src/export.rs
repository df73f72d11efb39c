//! DOT, JSON and SVG renderings, plus a small DOT reader for round trips.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Result, SturmError};
use crate::kernel::analyze;
use crate::model::{ConnectionGraph, Label, MeanderPermutation, Tag, Vertex};

fn node_id(v: &Vertex) -> String {
    format!("v{}", v.id)
}

/// Directed graph with one `rank=same` group per Morse index, highest first.
pub fn graph_to_dot(graph: &ConnectionGraph, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", name.replace('"', "'"));
    out.push_str("  rankdir=TB;\n  node [shape=circle];\n");
    let mut levels: BTreeMap<i32, Vec<&Vertex>> = BTreeMap::new();
    for v in graph.vertices() {
        levels.entry(v.morse).or_default().push(v);
    }
    for (morse, vs) in levels.iter().rev() {
        let _ = write!(out, "  {{ rank=same; /* i={morse} */");
        for v in vs {
            let _ = write!(out, " {};", node_id(v));
        }
        out.push_str(" }\n");
    }
    for v in graph.vertices() {
        let _ = writeln!(
            out,
            "  {} [label=\"{}\", position={}, morse={}];",
            node_id(v),
            v.name(),
            v.position,
            v.morse
        );
    }
    for &(a, b) in graph.edges() {
        let _ = writeln!(out, "  v{a} -> v{b};");
    }
    out.push_str("}\n");
    out
}

fn parse_label(text: &str) -> Option<Label> {
    if text == "O" {
        return Some(Label::new(Tag::O, 0));
    }
    let (tag, rest) = text.split_at(1);
    let tag = match tag {
        "A" => Tag::A,
        "B" => Tag::B,
        "C" => Tag::C,
        "D" => Tag::D,
        _ => return None,
    };
    rest.parse().ok().map(|i| Label::new(tag, i))
}

fn attribute<'a>(attrs: &'a str, key: &str) -> Option<&'a str> {
    attrs.split(',').find_map(|kv| {
        let (k, v) = kv.split_once('=')?;
        (k.trim() == key).then(|| v.trim().trim_matches('"'))
    })
}

/// Reads what [`graph_to_dot`] writes: `vN [...]` node lines and `vA -> vB;` edges.
/// The `O` label loses its index, which the writer does not record.
pub fn graph_from_dot(text: &str) -> Result<ConnectionGraph> {
    let bad = |line: &str| SturmError::InvalidParameter(format!("unreadable DOT line: {line}"));
    let id_of = |s: &str| -> Option<usize> { s.trim().strip_prefix('v')?.parse().ok() };
    let mut vertices = Vec::new();
    let mut edges = BTreeSet::new();
    for raw in text.lines() {
        let line = raw.trim().trim_end_matches(';');
        if let Some((a, b)) = line.split_once("->") {
            let (a, b) = (id_of(a).ok_or_else(|| bad(raw))?, id_of(b).ok_or_else(|| bad(raw))?);
            edges.insert((a, b));
        } else if let Some((head, attrs)) = line.split_once('[') {
            let Some(id) = id_of(head) else { continue };
            let attrs = attrs.trim_end_matches(']');
            let number = |k| attribute(attrs, k).and_then(|v| v.parse::<i64>().ok());
            let position = number("position").ok_or_else(|| bad(raw))? as usize;
            let morse = number("morse").ok_or_else(|| bad(raw))? as i32;
            let label = attribute(attrs, "label").and_then(parse_label);
            vertices.push(Vertex {
                id,
                position,
                morse,
                label,
            });
        }
    }
    ConnectionGraph::new(vertices, edges)
}

pub fn graph_to_json(graph: &ConnectionGraph) -> String {
    serde_json::to_string_pretty(graph).expect("graph serializes")
}

pub fn analysis_json(sigma: &MeanderPermutation) -> Result<String> {
    Ok(serde_json::to_string_pretty(&analyze(sigma)?).expect("analysis serializes"))
}

/// Arc diagram: upper arcs above and lower arcs below a horizontal axis.
/// Each vertex is annotated with its axis index, meander index and Morse number.
pub fn meander_to_svg(sigma: &MeanderPermutation) -> Result<String> {
    let analysis = analyze(sigma)?;
    let diagram = crate::kernel::arcs_from_permutation(sigma)?;
    let n = sigma.len();
    let dx = 40.0;
    let margin = 40.0;
    let width = 2.0 * margin + dx * (n.saturating_sub(1)) as f64;
    let radius = |a: usize, b: usize| dx * (b - a) as f64 / 2.0;
    let max_r = diagram
        .upper()
        .iter()
        .chain(diagram.lower())
        .map(|&(a, b)| radius(a, b))
        .fold(dx / 2.0, f64::max);
    let axis_y = margin + max_r;
    let text_y = axis_y + max_r + 20.0;
    let height = text_y + 3.0 * 16.0 + margin / 2.0;
    let x = |j: usize| margin + dx * (j - 1) as f64;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\" font-size=\"11\">"
    );
    let _ = writeln!(
        out,
        "  <line x1=\"{:.1}\" y1=\"{axis_y:.1}\" x2=\"{:.1}\" y2=\"{axis_y:.1}\" stroke=\"#999\"/>",
        margin / 2.0,
        width - margin / 2.0
    );
    for (class, arcs, sweep) in [("upper", diagram.upper(), 1), ("lower", diagram.lower(), 0)] {
        for &(a, b) in arcs {
            let r = radius(a, b);
            let _ = writeln!(
                out,
                "  <path class=\"{class}\" d=\"M {:.1} {axis_y:.1} A {r:.1} {r:.1} 0 0 {sweep} {:.1} {axis_y:.1}\" \
                 fill=\"none\" stroke=\"black\"/>",
                x(a),
                x(b)
            );
        }
    }
    for j in 1..=n {
        let _ = writeln!(
            out,
            "  <circle cx=\"{:.1}\" cy=\"{axis_y:.1}\" r=\"3\" fill=\"black\"/>",
            x(j)
        );
        let rows = [
            ("black", j.to_string()),
            ("red", sigma.at(j).to_string()),
            ("blue", format!("i={}", analysis.morse_axis(j))),
        ];
        for (k, (color, text)) in rows.iter().enumerate() {
            let _ = writeln!(
                out,
                "  <text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\" text-anchor=\"middle\">{text}</text>",
                x(j),
                text_y + 16.0 * k as f64
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::connection_graph;

    fn graph(s: &str) -> ConnectionGraph {
        connection_graph(&analyze(&MeanderPermutation::parse(s).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn dot_ranks_for_line() {
        let dot = graph_to_dot(&graph("1 2 3"), "id3");
        assert_eq!(dot.matches("rank=same").count(), 2);
        assert!(dot.contains("v2 -> v1;"));
        assert!(dot.find("i=1").unwrap() < dot.find("i=0").unwrap());
    }

    #[test]
    fn dot_round_trip() {
        let g = graph("1 10 5 6 9 2 3 8 7 4 11");
        let back = graph_from_dot(&graph_to_dot(&g, "s")).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.morse_histogram(), g.morse_histogram());
    }

    #[test]
    fn svg_counts_arcs() {
        let svg = meander_to_svg(&MeanderPermutation::parse("1 6 3 4 5 2 7").unwrap()).unwrap();
        assert_eq!(svg.matches("class=\"upper\"").count(), 3);
        assert_eq!(svg.matches("class=\"lower\"").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 7);
    }

    #[test]
    fn json_graph_parses() {
        let g = graph("1 4 5 6 3 2 7");
        let back: ConnectionGraph = serde_json::from_str(&graph_to_json(&g)).unwrap();
        assert_eq!(back, g);
    }
}
