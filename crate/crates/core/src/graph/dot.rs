use std::fmt::Write;

use super::Instance;

fn quote(id: &str) -> String {
    let mut out = String::with_capacity(id.len() + 2);
    out.push('"');
    for c in id.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders the instance as a Graphviz digraph. Even (or unique) successor
/// edges are solid, odd successor edges dashed. The origin is drawn as a
/// box and the destination as a double circle.
pub fn export_dot(instance: &Instance) -> String {
    let mut out = String::new();
    out.push_str("digraph switch_graph {\n");
    out.push_str("  node [shape=circle];\n");
    for v in instance.vertices() {
        let id = quote(instance.name(v));
        if v == instance.origin() {
            let _ = writeln!(out, "  {id} [shape=box, label={id}, xlabel=\"origin\"];");
        } else if v == instance.destination() {
            let _ = writeln!(
                out,
                "  {id} [shape=doublecircle, label={id}, xlabel=\"destination\"];"
            );
        } else {
            let _ = writeln!(out, "  {id};");
        }
    }
    for v in instance.vertices() {
        let tail = quote(instance.name(v));
        let even = quote(instance.name(instance.even(v)));
        let _ = writeln!(out, "  {tail} -> {even};");
        if instance.is_switch(v) {
            let odd = quote(instance.name(instance.odd(v)));
            let _ = writeln!(out, "  {tail} -> {odd} [style=dashed];");
        }
    }
    out.push_str("}\n");
    out
}
