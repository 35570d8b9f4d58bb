use std::collections::HashSet;
use std::fmt::Write;

use num_complex::Complex64;

use super::{DdHandle, DdPackage, Edge, NodeId};

fn label(w: Complex64) -> String {
    if w.im == 0.0 {
        format!("{:.6}", w.re)
    } else {
        format!("{:.6}{:+.6}i", w.re, w.im)
    }
}

fn node_name(id: NodeId) -> String {
    if id.is_terminal() {
        "t".to_string()
    } else {
        format!("n{}", id.index())
    }
}

impl DdPackage {
    /// Graphviz rendering. Nodes are labelled `q<level>`, edges carry their
    /// successor index and weight; zero edges are omitted.
    pub fn to_dot<D: DdHandle>(&self, d: &D) -> String {
        let mut out = String::from("digraph dd {\n  root [shape=point];\n  t [shape=box,label=\"1\"];\n");
        let root = d.root();
        let _ = writeln!(
            out,
            "  root -> {} [label=\"{}\"];",
            node_name(root.node),
            label(root.weight)
        );
        if root.is_zero() {
            out.push_str("}\n");
            return out;
        }
        let mut seen = HashSet::new();
        let mut stack = vec![root];
        while let Some(Edge { node, .. }) = stack.pop() {
            if node.is_terminal() || !seen.insert(node) {
                continue;
            }
            let n = self.node(node);
            let _ = writeln!(out, "  {} [shape=circle,label=\"q{}\"];", node_name(node), n.level);
            for (i, s) in n.succ[..n.arity as usize].iter().enumerate() {
                if s.is_zero() {
                    continue;
                }
                let _ = writeln!(
                    out,
                    "  {} -> {} [label=\"{}: {}\"];",
                    node_name(node),
                    node_name(s.node),
                    i,
                    label(s.weight)
                );
                stack.push(*s);
            }
        }
        out.push_str("}\n");
        out
    }
}
