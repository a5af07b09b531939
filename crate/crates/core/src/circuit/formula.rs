//! Negation-normal-form expansion of a NAND circuit into a binary tree of
//! OR/AND nodes over literals.

use super::netlist::{Circuit, Ref};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf { var: usize, negated: bool },
    Or,
    And,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub kind: NodeKind,
    /// Upper and lower child (unused for leaves).
    pub children: [usize; 2],
    pub parent: Option<usize>,
    /// Height: 0 for leaves.
    pub level: usize,
    /// Circuit gate this node was expanded from, and whether it is negated.
    pub gate: Option<(usize, bool)>,
}

/// Arena-stored tree; the root is the last node.
#[derive(Debug, Clone)]
pub struct Formula {
    pub nodes: Vec<Node>,
}

impl Formula {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn depth(&self) -> usize {
        self.nodes[self.root()].level
    }

    pub fn leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Leaf { .. })).count()
    }

    pub fn eval(&self, bits: &[bool]) -> Vec<bool> {
        let mut v = vec![false; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            v[i] = match n.kind {
                NodeKind::Leaf { var, negated } => bits[var] ^ negated,
                NodeKind::Or => v[n.children[0]] || v[n.children[1]],
                NodeKind::And => v[n.children[0]] && v[n.children[1]],
            };
        }
        v
    }

    /// Leaves in top-to-bottom order.
    pub fn leaf_order(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root()];
        while let Some(i) = stack.pop() {
            match self.nodes[i].kind {
                NodeKind::Leaf { .. } => out.push(i),
                _ => {
                    stack.push(self.nodes[i].children[1]);
                    stack.push(self.nodes[i].children[0]);
                }
            }
        }
        out
    }
}

/// Expands the circuit output. Returns `None` once `max_nodes` is exceeded.
pub fn nnf(c: &Circuit, max_nodes: usize) -> Option<Formula> {
    let mut f = Formula { nodes: Vec::new() };
    expand(c, Ref::Gate(c.output), false, &mut f, max_nodes)?;
    Some(f)
}

fn expand(c: &Circuit, r: Ref, negated: bool, f: &mut Formula, max: usize) -> Option<usize> {
    if f.nodes.len() >= max {
        return None;
    }
    let (kind, children, level, gate) = match r {
        Ref::Input(var) => (NodeKind::Leaf { var, negated }, [0, 0], 0, None),
        Ref::Gate(g) => {
            let gate = &c.gates[g];
            // NAND(a,b) = OR(!a,!b); its negation is AND(a,b).
            let sub = !negated;
            let a = expand(c, gate.a, sub, f, max)?;
            let b = expand(c, gate.b, sub, f, max)?;
            let kind = if negated { NodeKind::And } else { NodeKind::Or };
            let level = 1 + f.nodes[a].level.max(f.nodes[b].level);
            (kind, [a, b], level, Some((g, negated)))
        }
    };
    if f.nodes.len() >= max {
        return None;
    }
    f.nodes.push(Node { kind, children, parent: None, level, gate });
    let id = f.nodes.len() - 1;
    if !matches!(kind, NodeKind::Leaf { .. }) {
        f.nodes[children[0]].parent = Some(id);
        f.nodes[children[1]].parent = Some(id);
    }
    Some(id)
}
