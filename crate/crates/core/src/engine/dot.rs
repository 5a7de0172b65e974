use std::fmt::Write;

use super::forest::{CompletionForest, NodeKind};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering of a forest. Edges carry their role sets, `≠` pairs
/// are dashed and `≐` pairs dotted.
pub fn to_dot(f: &CompletionForest) -> String {
    let tables = f.tables();
    let rbox = tables.rbox();
    let mut out = String::from("digraph forest {\n  node [shape=box];\n");
    for x in f.node_ids() {
        let mut title = x.to_string();
        if let NodeKind::Root(names) = f.kind(x) {
            let names: Vec<&str> = names.iter().map(|n| &**n).collect();
            write!(title, " [{}]", names.join(", ")).unwrap();
        }
        let label: Vec<String> = f.label_concepts(x).iter().map(|c| c.to_string()).collect();
        let shape = if f.is_root(x) { ", peripheries=2" } else { "" };
        writeln!(
            out,
            "  {} [label=\"{}\\n{}\"{}];",
            x,
            escape(&title),
            escape(&label.join("\\n")),
            shape
        )
        .unwrap();
    }
    for (x, y, roles) in f.edges() {
        let names: Vec<String> = roles.iter().map(|&r| rbox.role_at(r).to_string()).collect();
        writeln!(out, "  {} -> {} [label=\"{}\"];", x, y, escape(&names.join(", "))).unwrap();
    }
    for &(a, b) in f.inequalities() {
        writeln!(out, "  {} -> {} [style=dashed, dir=none, label=\"≠\"];", a, b).unwrap();
    }
    for &(a, b) in f.equalities() {
        writeln!(out, "  {} -> {} [style=dotted, dir=none, label=\"≐\"];", a, b).unwrap();
    }
    out.push_str("}\n");
    out
}
