use std::collections::HashMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{Engine, EngineError, ShiftUniverse};

/// Parent index, path and set of a node awaiting expansion.
type Pending<U> = (
    Option<usize>,
    Vec<<U as ShiftUniverse>::Shift>,
    <U as ShiftUniverse>::Set,
);

/// Rank of the τ-tree `T_A`; an empty tree has rank 0 and a single node rank 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeRank {
    Rank(u32),
    NotWellFounded,
    Unknown,
}

struct ArenaNode<S> {
    set: S,
    depth: usize,
    children: Vec<usize>,
    /// Rank already known from an earlier call; the node is not expanded.
    known: Option<u32>,
}

impl<U: ShiftUniverse> Engine<U> {
    /// Builds the translation-quotient of `T_A` explicitly, then either finds a
    /// cycle or assigns ranks bottom-up.
    pub fn tree_rank(&self, set: &U::Set) -> Result<TreeRank, EngineError> {
        let u = self.universe();
        if u.in_ideal(set) {
            return Ok(TreeRank::Rank(0));
        }
        let budget = self.budget();
        let (root_normal, _) = u.normalize(set);
        let mut index: HashMap<U::Set, usize> = HashMap::new();
        let mut arena: Vec<ArenaNode<U::Set>> = Vec::new();
        index.insert(root_normal.clone(), 0);
        arena.push(ArenaNode {
            known: self.rank_memo.get(&root_normal).map(|r| *r),
            set: root_normal,
            depth: 0,
            children: Vec::new(),
        });
        let mut truncated = false;
        let mut next = 0;
        while next < arena.len() {
            let v = next;
            next += 1;
            if arena[v].known.is_some() {
                continue;
            }
            if arena[v].depth >= budget.max_depth {
                truncated = true;
                continue;
            }
            let node_set = arena[v].set.clone();
            let b = u.branching(&node_set)?;
            truncated |= !b.complete;
            let mut children = Vec::new();
            for g in &b.shifts {
                let child = u.child(&node_set, g)?;
                if u.in_ideal(&child) {
                    continue;
                }
                let (cn, _) = u.normalize(&child);
                let id = match index.get(&cn) {
                    Some(&id) => id,
                    None => {
                        if arena.len() >= budget.max_nodes {
                            truncated = true;
                            continue;
                        }
                        let id = arena.len();
                        index.insert(cn.clone(), id);
                        arena.push(ArenaNode {
                            known: self.rank_memo.get(&cn).map(|r| *r),
                            set: cn,
                            depth: arena[v].depth + 1,
                            children: Vec::new(),
                        });
                        id
                    }
                };
                if !children.contains(&id) {
                    children.push(id);
                }
            }
            arena[v].children = children;
        }

        // iterative three-colour search: a back edge is a translate-cycle
        let mut colour = vec![0u8; arena.len()];
        let mut order = Vec::with_capacity(arena.len());
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        colour[0] = 1;
        while let Some(top) = stack.last_mut() {
            let (v, k) = *top;
            if k < arena[v].children.len() {
                top.1 += 1;
                let w = arena[v].children[k];
                match colour[w] {
                    0 => {
                        colour[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return Ok(TreeRank::NotWellFounded),
                    _ => {}
                }
            } else {
                colour[v] = 2;
                order.push(v);
                stack.pop();
            }
        }
        if truncated {
            return Ok(TreeRank::Unknown);
        }

        let mut rank = vec![0u32; arena.len()];
        for &v in &order {
            rank[v] = match arena[v].known {
                Some(r) => r,
                None => {
                    1 + arena[v]
                        .children
                        .iter()
                        .map(|&w| rank[w])
                        .max()
                        .unwrap_or(0)
                }
            };
        }
        for &v in &order {
            self.rank_memo.insert(arena[v].set.clone(), rank[v]);
        }
        Ok(TreeRank::Rank(rank[0]))
    }

    /// Nodes of `T_A` up to `depth`, branching over the engine's shift cover.
    /// Children in 𝓕 along those shifts are listed as leaves.
    pub fn tree_dump(&self, set: &U::Set, depth: usize) -> Result<TauTreeDump, EngineError> {
        let u = self.universe();
        let mut nodes = Vec::new();
        let mut frontier: Vec<Pending<U>> = vec![(None, Vec::new(), set.clone())];
        let mut truncated_nodes = false;
        while let Some((parent, path, s)) = frontier.pop() {
            let in_f = u.in_ideal(&s);
            let rank = match self.tree_rank(&s)? {
                TreeRank::Rank(r) => Some(r),
                _ => None,
            };
            let id = nodes.len();
            nodes.push(TreeNode {
                parent,
                path: path.iter().map(|g| u.shift_json(g)).collect(),
                path_labels: path.iter().map(|g| u.format_shift(g)).collect(),
                set: u.format_set(&s, 120),
                in_f,
                rank,
            });
            if in_f || path.len() >= depth {
                continue;
            }
            let b = u.branching(&s)?;
            let mut kids = Vec::new();
            for g in &b.shifts {
                if nodes.len() + frontier.len() + kids.len() >= self.budget().max_nodes {
                    truncated_nodes = true;
                    break;
                }
                let child = u.child(&s, g)?;
                let mut p = path.clone();
                p.push(g.clone());
                kids.push((Some(id), p, child));
            }
            // stack order: first shift is dumped first
            frontier.extend(kids.into_iter().rev());
        }
        Ok(TauTreeDump {
            truncation_depth: depth,
            truncated: truncated_nodes,
            nodes,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub path: Vec<Value>,
    pub path_labels: Vec<String>,
    pub set: String,
    pub in_f: bool,
    pub rank: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TauTreeDump {
    pub truncation_depth: usize,
    /// The node budget cut the dump short.
    pub truncated: bool,
    pub nodes: Vec<TreeNode>,
}

impl TauTreeDump {
    /// Nodes belonging to `T_A`.
    pub fn tree_nodes(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| !n.in_f)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "truncation_depth": self.truncation_depth,
            "truncated": self.truncated,
            "nodes": self.nodes.iter().map(|n| json!({
                "path": n.path,
                "set": n.set,
                "in_f": n.in_f,
                "rank": n.rank,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out =
            String::from("digraph tau_tree {\n  node [shape=box, fontname=\"monospace\"];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let rank = n.rank.map_or("?".to_string(), |r| r.to_string());
            let label = format!(
                "({})\\n{}\\nrank {}",
                n.path_labels.join(","),
                dot_escape(&n.set),
                rank
            );
            let style = if n.in_f { ", style=dashed" } else { "" };
            let _ = writeln!(out, "  n{i} [label=\"{label}\"{style}];");
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(p) = n.parent {
                let g = n.path_labels.last().map(String::as_str).unwrap_or("");
                let _ = writeln!(out, "  n{p} -> n{i} [label=\"{}\"];", dot_escape(g));
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let indent = "  ".repeat(n.path_labels.len());
            let rank = n.rank.map_or("?".to_string(), |r| r.to_string());
            let tag = if n.in_f { "in F" } else { "in T_A" };
            let _ = writeln!(
                out,
                "{indent}({}) {} [{tag}, rank {rank}]",
                n.path_labels.join(","),
                n.set
            );
        }
        if self.truncated {
            out.push_str("(truncated by node budget)\n");
        }
        out
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
