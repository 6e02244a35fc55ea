//! The reduced dynamics graph: a binary forking tree of dynamics
//! prefixes, every edge labeled I or O and every node labeled with the
//! residue class sharing that prefix. Terminal nodes are complete
//! patterns; live leaves at the depth cap are truncation markers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::LineStatus;
use crate::nat::Nat;
use crate::residue::{ClassWalk, ResidueClass};
use crate::symbols::{DynString, Symbol};

/// Export cap: the tree roughly doubles per level.
pub const MAX_GRAPH_DEPTH: usize = 30;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum NodeKind {
    /// Still above the ratio line; has two children unless truncated.
    Live,
    /// A complete reduced-dynamics pattern; no children.
    Terminal,
}

impl NodeKind {
    fn as_str(self) -> &'static str {
        match self {
            NodeKind::Live => "live",
            NodeKind::Terminal => "terminal",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DynNode {
    pub prefix: DynString,
    pub class: ResidueClass,
    pub kind: NodeKind,
    /// Exactly two children (I-extension, then O-extension) on expanded
    /// live nodes; empty on terminals and on live leaves at the cap.
    pub children: Vec<DynNode>,
}

impl DynNode {
    pub fn is_truncated(&self) -> bool {
        self.kind == NodeKind::Live && self.children.is_empty()
    }

    #[cfg(test)]
    fn count_nodes(&self) -> usize {
        1 + self.children.iter().map(DynNode::count_nodes).sum::<usize>()
    }
}

fn build_odd_subtree(walk: &ClassWalk, prefix: &mut Vec<Symbol>, max_depth: usize) -> DynNode {
    let class = walk.class();
    let here = DynString::from_symbols(prefix.clone());
    match walk.status() {
        LineStatus::Terminal => DynNode {
            prefix: here,
            class,
            kind: NodeKind::Terminal,
            children: Vec::new(),
        },
        LineStatus::Below => unreachable!("tree never descends past the line"),
        LineStatus::Above => {
            let children = if walk.depth < max_depth {
                [Symbol::I, Symbol::O]
                    .into_iter()
                    .map(|sym| {
                        let mut child = walk.clone();
                        child.step(sym);
                        prefix.push(sym);
                        let node = build_odd_subtree(&child, prefix, max_depth);
                        prefix.pop();
                        node
                    })
                    .collect()
            } else {
                Vec::new()
            };
            DynNode {
                prefix: here,
                class,
                kind: NodeKind::Live,
                children,
            }
        }
    }
}

/// Builds the tree to the given depth. The root carries the full class
/// (everything mod 2^0); its O child is the terminal even class, its I
/// child roots the odd tree.
pub fn build_graph(max_depth: usize) -> Result<DynNode> {
    if !(1..=MAX_GRAPH_DEPTH).contains(&max_depth) {
        return Err(Error::Domain(format!(
            "graph depth must be in 1..={MAX_GRAPH_DEPTH}"
        )));
    }
    let mut walk = ClassWalk::start();
    walk.step(Symbol::I);
    let mut prefix = vec![Symbol::I];
    let odd = build_odd_subtree(&walk, &mut prefix, max_depth);
    let even = DynNode {
        prefix: DynString::from_symbols(vec![Symbol::O]),
        class: ResidueClass::new(Nat::ZERO, 1),
        kind: NodeKind::Terminal,
        children: Vec::new(),
    };
    Ok(DynNode {
        prefix: DynString::new(),
        class: ResidueClass::new(Nat::ZERO, 0),
        kind: NodeKind::Live,
        children: vec![odd, even],
    })
}

/// Deterministic DOT rendering: preorder node ids, class labels,
/// triangles for terminals, dashed boxes for truncated live leaves.
pub fn export_dot(tree: &DynNode) -> String {
    fn emit(node: &DynNode, next_id: &mut usize, out: &mut String) -> usize {
        let id = *next_id;
        *next_id += 1;
        let label = if node.prefix.is_empty() {
            "start".to_string()
        } else {
            format!("{} mod 2^{}", node.class.i(), node.class.exponent())
        };
        let attrs = if node.prefix.is_empty() {
            format!("label=\"{label}\", shape=square")
        } else {
            match node.kind {
                NodeKind::Terminal => format!("label=\"{label}\", shape=triangle"),
                NodeKind::Live if node.is_truncated() => {
                    format!("label=\"{label}\", shape=circle, style=dashed")
                }
                NodeKind::Live => format!("label=\"{label}\", shape=circle"),
            }
        };
        out.push_str(&format!("  n{id} [{attrs}];\n"));
        for child in &node.children {
            let edge = child.prefix.last().expect("children extend the prefix");
            let child_id = emit(child, next_id, out);
            out.push_str(&format!("  n{id} -> n{child_id} [label=\"{edge}\"];\n"));
        }
        id
    }
    let mut out = String::from("digraph reduced_dynamics {\n");
    let mut next_id = 0;
    emit(tree, &mut next_id, &mut out);
    out.push_str("}\n");
    out
}

#[derive(Serialize, Deserialize)]
struct NodeDto {
    prefix: String,
    i: Nat,
    t: usize,
    kind: String,
    children: Vec<NodeDto>,
}

impl NodeDto {
    fn from_node(node: &DynNode) -> NodeDto {
        NodeDto {
            prefix: node.prefix.to_plain(),
            i: node.class.i().clone(),
            t: node.class.exponent(),
            kind: node.kind.as_str().to_string(),
            children: node.children.iter().map(NodeDto::from_node).collect(),
        }
    }

    fn into_node(self) -> Result<DynNode> {
        let prefix = if self.prefix.is_empty() {
            DynString::new()
        } else {
            self.prefix.parse()?
        };
        let kind = match self.kind.as_str() {
            "live" => NodeKind::Live,
            "terminal" => NodeKind::Terminal,
            other => {
                return Err(Error::Domain(format!("unknown node kind: {other}")));
            }
        };
        Ok(DynNode {
            prefix,
            class: ResidueClass::new(self.i, self.t),
            kind,
            children: self
                .children
                .into_iter()
                .map(NodeDto::into_node)
                .collect::<Result<_>>()?,
        })
    }
}

pub fn export_json(tree: &DynNode) -> String {
    serde_json::to_string(&NodeDto::from_node(tree)).expect("tree serializes")
}

pub fn parse_json(text: &str) -> Result<DynNode> {
    let dto: NodeDto =
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("invalid graph JSON: {e}")))?;
    dto.into_node()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_forms;
    use crate::form::{is_reduced_form, FormStatus};

    fn find<'a>(node: &'a DynNode, prefix: &str) -> Option<&'a DynNode> {
        if node.prefix.to_plain() == prefix {
            return Some(node);
        }
        node.children.iter().find_map(|c| find(c, prefix))
    }

    fn cls(i: u64, t: usize) -> ResidueClass {
        ResidueClass::new(Nat::from(i), t)
    }

    #[test]
    fn labeled_nodes() {
        let tree = build_graph(5).unwrap();
        let node = find(&tree, "IIO").unwrap();
        assert_eq!(node.class, cls(3, 3));
        assert_eq!(node.kind, NodeKind::Live);

        let node = find(&tree, "O").unwrap();
        assert_eq!(node.class, cls(0, 1));
        assert_eq!(node.kind, NodeKind::Terminal);

        let node = find(&tree, "IIOIO").unwrap();
        assert_eq!(node.class, cls(11, 5));
        assert_eq!(node.kind, NodeKind::Terminal);

        let node = find(&tree, "IO").unwrap();
        assert_eq!(node.class, cls(1, 2));
        assert_eq!(node.kind, NodeKind::Terminal);
    }

    #[test]
    fn terminal_set_matches_enumeration() {
        fn collect<'a>(node: &'a DynNode, out: &mut Vec<&'a DynNode>) {
            if node.kind == NodeKind::Terminal {
                out.push(node);
            }
            for c in &node.children {
                collect(c, out);
            }
        }
        let depth = 9;
        let tree = build_graph(depth).unwrap();
        let mut terminals = Vec::new();
        collect(&tree, &mut terminals);
        let mut expected: Vec<(DynString, ResidueClass)> = enumerate_forms(depth)
            .map(|r| (r.pattern, r.class))
            .collect();
        let mut got: Vec<(DynString, ResidueClass)> = terminals
            .iter()
            .map(|n| (n.prefix.clone(), n.class.clone()))
            .collect();
        expected.sort();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn terminal_iff_reduced_form() {
        fn walk(node: &DynNode) {
            if !node.prefix.is_empty() {
                let want_terminal =
                    is_reduced_form(&node.prefix).status == FormStatus::ReducedForm;
                assert_eq!(node.kind == NodeKind::Terminal, want_terminal, "{}", node.prefix);
            }
            for c in &node.children {
                walk(c);
            }
        }
        walk(&build_graph(10).unwrap());
    }

    #[test]
    fn live_node_counts_match_unabsorbed_residues() {
        // live nodes at depth t = odd residues mod 2^t minus those absorbed
        // by terminals at shallower depths
        let depth = 12;
        let tree = build_graph(depth).unwrap();
        let counts = crate::enumerate::pattern_counts(depth);
        fn live_at(node: &DynNode, depth: usize, out: &mut u64) {
            if node.prefix.len() == depth && node.kind == NodeKind::Live {
                *out += 1;
            }
            for c in &node.children {
                live_at(c, depth, out);
            }
        }
        for t in 1..=depth {
            let mut live = 0;
            live_at(&tree, t, &mut live);
            let mut expected = Nat::two_pow(t as u64 - 1);
            for (idx, count) in counts.iter().enumerate() {
                let len = idx + 1;
                if len >= 2 && len <= t {
                    let absorbed = count << ((t - len) as u64);
                    expected = expected.checked_sub(&absorbed).expect("absorption fits");
                }
            }
            assert_eq!(Nat::from(live), expected, "depth {t}");
        }
    }

    #[test]
    fn depth_two_dot_is_stable() {
        let dot = export_dot(&build_graph(2).unwrap());
        let expected = "digraph reduced_dynamics {\n\
                        \x20 n0 [label=\"start\", shape=square];\n\
                        \x20 n1 [label=\"1 mod 2^1\", shape=circle];\n\
                        \x20 n2 [label=\"3 mod 2^2\", shape=circle, style=dashed];\n\
                        \x20 n1 -> n2 [label=\"I\"];\n\
                        \x20 n3 [label=\"1 mod 2^2\", shape=triangle];\n\
                        \x20 n1 -> n3 [label=\"O\"];\n\
                        \x20 n0 -> n1 [label=\"I\"];\n\
                        \x20 n4 [label=\"0 mod 2^1\", shape=triangle];\n\
                        \x20 n0 -> n4 [label=\"O\"];\n\
                        }\n";
        assert_eq!(dot, expected);
    }

    #[test]
    fn json_round_trip() {
        let tree = build_graph(6).unwrap();
        let json = export_json(&tree);
        let back = parse_json(&json).unwrap();
        assert_eq!(back, tree);
        // export is deterministic
        assert_eq!(export_json(&build_graph(6).unwrap()), json);
    }

    #[test]
    fn depth_cap_enforced() {
        assert!(build_graph(0).is_err());
        assert!(build_graph(31).is_err());
        assert!(build_graph(1).is_ok());
    }

    #[test]
    fn truncation_markers() {
        let tree = build_graph(3).unwrap();
        let node = find(&tree, "III").unwrap();
        assert!(node.is_truncated());
        let node = find(&tree, "IIO").unwrap();
        assert!(node.is_truncated());
        assert_eq!(tree.count_nodes(), find(&tree, "I").unwrap().count_nodes() + 2);
    }
}
