//! Block geometry, Z-paths, bridges and the overlay algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::grid::{Cell, Configuration};
use crate::scheme::{Rule, UpdateScheme};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("cells or blocks are not diagonally connected")]
    NotDiagonal,
    #[error("sink index {0} outside 1..=k")]
    BadSinkIndex(usize),
    #[error("pin `{0}` names two different cells")]
    PinClash(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Polarity::Pos => 1,
            Polarity::Neg => -1,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Pos => "+",
            Polarity::Neg => "-",
        })
    }
}

/// Block of the `h x v` subdivision, addressed by its lattice index `(a, b)`;
/// its origin cell is `(a*h, b*v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub a: i64,
    pub b: i64,
}

impl Block {
    pub const fn new(a: i64, b: i64) -> Block {
        Block { a, b }
    }

    pub fn origin(self, z: &UpdateScheme) -> Cell {
        (self.a * z.h() as i64, self.b * z.v() as i64)
    }

    /// Upper-left cell for positive, lower-left for negative.
    pub fn source(self, pol: Polarity, z: &UpdateScheme) -> Cell {
        let (x, y) = self.origin(z);
        match pol {
            Polarity::Pos => (x, y),
            Polarity::Neg => (x, y + z.v() as i64 - 1),
        }
    }

    pub fn offset(self, da: i64, db: i64) -> Block {
        Block::new(self.a + da, self.b + db)
    }
}

pub fn block_of((x, y): Cell, z: &UpdateScheme) -> Block {
    Block::new(x.div_euclid(z.h() as i64), y.div_euclid(z.v() as i64))
}

/// The block together with its surrounding one-cell ring.
pub fn closure(b: Block, z: &UpdateScheme) -> Vec<Cell> {
    let (x0, y0) = b.origin(z);
    let mut v = Vec::with_capacity((z.h() + 2) * (z.v() + 2));
    for y in y0 - 1..=y0 + z.v() as i64 {
        for x in x0 - 1..=x0 + z.h() as i64 {
            v.push((x, y));
        }
    }
    v
}

pub fn diagonally_connected(b1: Block, b2: Block) -> bool {
    (b1.a - b2.a).abs() == 1 && (b1.b - b2.b).abs() == 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPath {
    pub start: Cell,
    pub alpha: i64,
    pub beta: i64,
    pub cells: Vec<Cell>,
}

impl ZPath {
    /// The first `l` steps of `z` from `start`.
    pub fn new(start: Cell, alpha: i64, beta: i64, z: &UpdateScheme, l: usize) -> ZPath {
        let (mut x, mut y) = start;
        let mut cells = Vec::with_capacity(l + 1);
        cells.push(start);
        for i in 0..l {
            match z.rule_at(i) {
                Rule::H => x += alpha,
                Rule::V => y += beta,
            }
            cells.push((x, y));
        }
        ZPath { start, alpha, beta, cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.cells.len() == 1
    }

    pub fn last(&self) -> Cell {
        *self.cells.last().unwrap()
    }
}

/// The Z-path of full length `k` joining `x` to `y`.
pub fn connect_path(x: Cell, y: Cell, z: &UpdateScheme) -> Result<ZPath, LatticeError> {
    let (dx, dy) = (y.0 - x.0, y.1 - x.1);
    let (h, v) = (z.h() as i64, z.v() as i64);
    if h == 0 || v == 0 || dx.abs() != h || dy.abs() != v {
        return Err(LatticeError::NotDiagonal);
    }
    Ok(ZPath::new(x, dx.signum(), dy.signum(), z, z.k()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BridgeKind {
    Plain,
    Source,
    /// `P(l) = 2` and every later path cell is dropped.
    SinkAt(usize),
}

impl fmt::Display for BridgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BridgeKind::Plain => f.write_str("plain"),
            BridgeKind::Source => f.write_str("source"),
            BridgeKind::SinkAt(l) => write!(f, "sink@{l}"),
        }
    }
}

/// Block-level description of a bridge, independent of the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BridgeSpec {
    pub from: Block,
    pub to: Block,
    pub polarity: Polarity,
    pub kind: BridgeKind,
}

impl BridgeSpec {
    pub fn new(from: Block, to: Block, polarity: Polarity, kind: BridgeKind) -> BridgeSpec {
        BridgeSpec { from, to, polarity, kind }
    }

    pub fn realize(&self, z: &UpdateScheme) -> Result<Bridge, LatticeError> {
        make_bridge(self.from, self.to, self.polarity, self.kind, z)
    }

    /// Overlay cells without building a `Bridge`; zeros after a sink are omitted.
    pub fn cells(&self, z: &UpdateScheme) -> impl Iterator<Item = (Cell, u8)> {
        let path = ZPath::new(self.from.source(self.polarity, z), self.to.a - self.from.a, self.to.b - self.from.b, z, z.k());
        let kind = self.kind;
        path.cells.into_iter().enumerate().filter_map(move |(i, p)| match kind {
            BridgeKind::Source if i == 0 => Some((p, 4)),
            BridgeKind::SinkAt(l) if i == l => Some((p, 2)),
            BridgeKind::SinkAt(l) if i > l => None,
            _ => Some((p, 3)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bridge {
    pub path: ZPath,
    pub kind: BridgeKind,
    pub polarity: Polarity,
    pub overlay: Configuration,
}

pub fn make_bridge(b1: Block, b2: Block, pol: Polarity, kind: BridgeKind, z: &UpdateScheme) -> Result<Bridge, LatticeError> {
    if !diagonally_connected(b1, b2) {
        return Err(LatticeError::NotDiagonal);
    }
    if let BridgeKind::SinkAt(l) = kind {
        if l == 0 || l > z.k() {
            return Err(LatticeError::BadSinkIndex(l));
        }
    }
    let path = connect_path(b1.source(pol, z), b2.source(pol, z), z)?;
    let overlay = Configuration::from_cells(BridgeSpec::new(b1, b2, pol, kind).cells(z));
    Ok(Bridge { path, kind, polarity: pol, overlay })
}

/// Cells that can gain a grain while the bridge transmits.
pub fn affected_neighbors(t: &Bridge, z: &UpdateScheme) -> BTreeSet<Cell> {
    let mut out: BTreeSet<Cell> = t.path.cells.iter().copied().collect();
    for (i, &(x, y)) in t.path.cells.iter().enumerate().skip(1) {
        match z.rule_at(i - 1) {
            Rule::H => out.extend([(x - 1, y), (x + 1, y)]),
            Rule::V => out.extend([(x, y - 1), (x, y + 1)]),
        }
    }
    out
}

pub fn plus(a: u8, b: u8) -> u8 {
    if a == 2 || b == 2 {
        2
    } else {
        a.max(b)
    }
}

/// Pointwise overlay sum: a 2 wins, otherwise the maximum.
pub fn combine(c1: &Configuration, c2: &Configuration) -> Configuration {
    let mut out = c1.clone();
    combine_into(&mut out, c2.iter());
    out
}

pub fn combine_into<I: IntoIterator<Item = (Cell, u8)>>(acc: &mut Configuration, cells: I) {
    for (p, g) in cells {
        let v = plus(acc.get(p), g);
        acc.set(p, v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PinDir {
    In,
    Out,
}

impl fmt::Display for PinDir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PinDir::In => "in",
            PinDir::Out => "out",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pin {
    pub block: Block,
    pub polarity: Polarity,
    pub dir: PinDir,
}

impl Pin {
    pub fn new(block: Block, polarity: Polarity, dir: PinDir) -> Pin {
        Pin { block, polarity, dir }
    }

    pub fn cell(&self, z: &UpdateScheme) -> Cell {
        self.block.source(self.polarity, z)
    }
}

/// A set of bridges with named pins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    pub bridges: Vec<BridgeSpec>,
    pub pins: BTreeMap<String, Pin>,
    /// Cycles from the primary input to the primary output.
    pub delay: usize,
}

impl Gadget {
    pub fn empty() -> Gadget {
        Gadget { bridges: Vec::new(), pins: BTreeMap::new(), delay: 0 }
    }

    /// The blocks touched by any bridge.
    pub fn footprint(&self) -> BTreeSet<Block> {
        self.bridges.iter().flat_map(|b| [b.from, b.to]).collect()
    }

    /// The ⊕-fold of every bridge overlay.
    pub fn overlay(&self, z: &UpdateScheme) -> Configuration {
        let mut c = Configuration::new();
        for b in &self.bridges {
            combine_into(&mut c, b.cells(z));
        }
        c
    }

    pub fn translate(&self, da: i64, db: i64) -> Gadget {
        let mv = |b: Block| b.offset(da, db);
        Gadget {
            bridges: self
                .bridges
                .iter()
                .map(|s| BridgeSpec { from: mv(s.from), to: mv(s.to), ..*s })
                .collect(),
            pins: self.pins.iter().map(|(n, p)| (n.clone(), Pin { block: mv(p.block), ..*p })).collect(),
            delay: self.delay,
        }
    }

    pub fn rename_pins(mut self, map: &[(&str, &str)]) -> Gadget {
        for (old, new) in map {
            if let Some(p) = self.pins.remove(*old) {
                self.pins.insert(new.to_string(), p);
            }
        }
        self
    }

    pub fn pin(&self, name: &str) -> Pin {
        *self.pins.get(name).unwrap_or_else(|| panic!("no pin `{name}`"))
    }

    /// Turns the first bridge leaving `pin` into a source bridge.
    pub fn fire(&mut self, pin: &str) {
        let p = self.pin(pin);
        let b = self
            .bridges
            .iter_mut()
            .find(|b| b.from == p.block && b.polarity == p.polarity)
            .unwrap_or_else(|| panic!("no bridge leaves pin `{pin}`"));
        b.kind = BridgeKind::Source;
    }
}

/// Union of bridges and pins. Pins with the same name must agree.
pub fn gadget_sum(g1: &Gadget, g2: &Gadget) -> Result<Gadget, LatticeError> {
    let mut out = g1.clone();
    for (name, pin) in &g2.pins {
        match out.pins.get(name) {
            Some(p) if p != pin => return Err(LatticeError::PinClash(name.clone())),
            _ => {
                out.pins.insert(name.clone(), *pin);
            }
        }
    }
    let seen: FxHashSet<BridgeSpec> = out.bridges.iter().copied().collect();
    out.bridges.extend(g2.bridges.iter().filter(|b| !seen.contains(b)).copied());
    out.delay = g1.delay.max(g2.delay);
    Ok(out)
}
