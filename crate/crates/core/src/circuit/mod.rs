//! Circuit compiler: netlists to configurations whose target cell becomes
//! non-zero iff the circuit outputs 1.

pub mod budget;
pub mod formula;
pub mod gates;
pub mod layout;
pub mod netlist;
pub mod stream;
pub mod verify;

use std::sync::Arc;

use thiserror::Error;

use crate::grid::{predict, Cell, Configuration, Rect};
use crate::lattice::{combine_into, BridgeKind, BridgeSpec};
use crate::scheme::UpdateScheme;

pub use budget::{compute_budget, DelayLedger};
pub use layout::{layout, layout_with, Layout, LayoutError, LayoutOptions};
pub use netlist::{eval_circuit, parse_netlist, Circuit, NetlistError};
pub use stream::{emit_stream, StreamStats};
pub use verify::{verify, verify_embedding, GateTrace, VerifyReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

/// A layout with its input bits fixed.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub layout: Arc<Layout>,
    pub bits: Vec<bool>,
}

/// One overlay contribution, in physical coordinates once mapped.
#[derive(Debug, Clone)]
pub enum Piece {
    Bridge(BridgeSpec),
    Cells(Vec<(Cell, u8)>),
}

impl Embedding {
    pub fn new(layout: Arc<Layout>, bits: &[bool]) -> Result<Embedding, NetlistError> {
        if bits.len() != layout.n_inputs {
            return Err(NetlistError::ArityMismatch { want: layout.n_inputs, got: bits.len() });
        }
        Ok(Embedding { layout, bits: bits.to_vec() })
    }

    pub fn scheme(&self) -> &UpdateScheme {
        &self.layout.scheme
    }

    pub fn region(&self) -> Rect {
        self.layout.region()
    }

    pub fn target(&self) -> Cell {
        self.layout.target()
    }

    /// In cycles of the normalized word, counted after the wait steps.
    pub fn time_bound(&self) -> usize {
        self.layout.time_bound()
    }

    pub fn steps(&self) -> usize {
        self.layout.steps()
    }

    /// The overlay plan in layout-frame coordinates.
    pub fn pieces(&self) -> Vec<Piece> {
        let l = &self.layout;
        let mut kinds: Vec<BridgeKind> = l.bridges.iter().map(|b| b.kind).collect();
        let mut out = Vec::with_capacity(l.bridges.len() + l.sources.len());
        for s in &l.sources {
            let fires = self.bits[s.var] == s.fires_on;
            if s.extension.is_empty() {
                if fires {
                    kinds[s.bridge] = BridgeKind::Source;
                }
            } else {
                let cells = s
                    .extension
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| (p, if i == 0 && fires { 4 } else { 3 }))
                    .collect();
                out.push(Piece::Cells(cells));
            }
        }
        for (b, kind) in l.bridges.iter().zip(kinds) {
            out.push(Piece::Bridge(BridgeSpec { kind, ..*b }));
        }
        out
    }

    pub fn configuration(&self) -> Configuration {
        let l = &self.layout;
        let mut c = Configuration::new();
        for p in self.pieces() {
            match p {
                Piece::Bridge(b) => combine_into(&mut c, b.cells(&l.word).map(|(q, g)| (l.physical(q), g))),
                Piece::Cells(cells) => combine_into(&mut c, cells.into_iter().map(|(q, g)| (l.physical(q), g))),
            }
        }
        c
    }

    /// Whether the target cell is reached within the time bound.
    pub fn predict(&self) -> bool {
        predict(&self.configuration(), self.target(), self.steps(), self.scheme())
    }
}

pub fn compile(c: &Circuit, bits: &[bool], z: &UpdateScheme) -> Result<Embedding, CompileError> {
    let l = Arc::new(layout(c, z)?);
    Ok(Embedding::new(l, bits)?)
}

/// Pairs of bridges from different groups, not sharing an endpoint, whose
/// cells come closer than Chebyshev distance 2.
pub fn clearance_violations(l: &Layout) -> Vec<(usize, usize)> {
    use rustc_hash::FxHashMap;
    let mut owner: FxHashMap<Cell, Vec<usize>> = FxHashMap::default();
    for (i, b) in l.bridges.iter().enumerate() {
        for (p, _) in b.cells(&l.word) {
            let v = owner.entry(p).or_default();
            if !v.contains(&i) {
                v.push(i);
            }
        }
    }
    let ends = |b: &BridgeSpec| [(b.from, b.polarity), (b.to, b.polarity)];
    let mut bad = std::collections::BTreeSet::new();
    for (&(x, y), here) in &owner {
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(there) = owner.get(&(x + dx, y + dy)) else { continue };
                for &i in here {
                    for &j in there {
                        if i >= j || l.groups[i] == l.groups[j] {
                            continue;
                        }
                        let (a, b) = (&l.bridges[i], &l.bridges[j]);
                        if ends(a).iter().any(|e| ends(b).contains(e)) {
                            continue;
                        }
                        bad.insert((i, j));
                    }
                }
            }
        }
    }
    bad.into_iter().collect()
}
