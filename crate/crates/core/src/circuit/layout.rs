//! Leveled placement of the formula tree.
//!
//! Columns are grouped by tree level. Level `l` has a routing zone followed
//! by a gate zone of width [`GATE_WIDTH`]. A routing zone spreads the live
//! rails to a staging pitch, equalizes their lags with meanders, then
//! converges them onto the gate pins (or pass-through rows) of the level.
//! Every rail entering a gate zone arrives with the same lag `T - column`.

use std::collections::HashMap;

use thiserror::Error;

use crate::grid::{Cell, Rect};
use crate::lattice::{Block, BridgeKind, BridgeSpec, Polarity};
use crate::scheme::{Rule, UpdateScheme};

use super::budget::{compute_budget, DelayLedger};
use super::formula::{nnf, Formula, NodeKind};
use super::gates::{template, GateKind, GateTemplate, GATE_DELAY, GATE_WIDTH, PIN_ROWS};
use super::netlist::Circuit;

/// Minimum row distance between rails while meandering.
pub(crate) const STAGING_PITCH: i64 = 10;
/// Free rows between the extents of neighbouring items.
const MARGIN: i64 = 5;
pub(crate) const MEANDER_WIDTH: i64 = 10;
/// Straight bridges at the head of every source rail.
const COORDINATOR: &str = "dddd";
const LEAF_PITCH: i64 = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("scheme {0} needs at least two H and two V per cycle")]
    DegenerateScheme(String),
    #[error("circuit too large: {0}")]
    CircuitTooLarge(String),
}

#[derive(Debug, Clone, Copy)]
pub struct LayoutOptions {
    pub max_nodes: usize,
    pub max_area: usize,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions { max_nodes: 20_000, max_area: 400_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Top,
    Bottom,
}

impl Side {
    pub fn polarity(self) -> Polarity {
        match self {
            Side::Top => Polarity::Neg,
            Side::Bottom => Polarity::Pos,
        }
    }
}

/// A rail that starts at a literal source.
#[derive(Debug, Clone)]
pub struct SourceRail {
    /// Index of the first bridge in [`Layout::bridges`].
    pub bridge: usize,
    pub var: usize,
    /// The rail fires iff `bits[var] == fires_on`.
    pub fires_on: bool,
    /// Cells fed before the first cycle, first one holds the signal.
    pub extension: Vec<Cell>,
}

/// One placed gate, in layout-frame coordinates.
#[derive(Debug, Clone)]
pub struct GateRecord {
    pub node: usize,
    pub kind: GateKind,
    pub level: usize,
    pub origin: Block,
    /// Circuit gate the node came from and whether it is its negation.
    pub circuit_gate: Option<(usize, bool)>,
    pub t_in: usize,
    pub t_out: usize,
    pub control: Cell,
    pub pass: Cell,
    pub top_out: Cell,
    pub bottom_out: Cell,
}

#[derive(Debug, Clone)]
pub struct LevelInfo {
    /// First column of the routing zone.
    pub start: i64,
    /// Gate input column.
    pub x: i64,
    pub lag: i64,
}

/// Input-independent part of an embedding.
#[derive(Debug, Clone)]
pub struct Layout {
    /// Scheme the configuration runs under.
    pub scheme: UpdateScheme,
    /// Normalized primitive word the layout is drawn for.
    pub word: UpdateScheme,
    pub rotated: bool,
    pub wait_steps: usize,
    pub n_inputs: usize,
    pub formula: Formula,
    pub bridges: Vec<BridgeSpec>,
    /// Clearance group of each bridge: one per rail segment or gate.
    pub groups: Vec<usize>,
    pub sources: Vec<SourceRail>,
    pub gates: Vec<GateRecord>,
    pub levels: Vec<LevelInfo>,
    /// Layout-frame target cell.
    pub target: Cell,
    /// Cycle at which the root's upper output is reached.
    pub out_cycle: usize,
    pub ledger: DelayLedger,
    /// Layout-frame bounding box.
    pub frame_region: Rect,
}

impl Layout {
    /// Layout frame to physical plane.
    pub fn physical(&self, (x, y): Cell) -> Cell {
        if self.rotated {
            (y, x)
        } else {
            (x, y)
        }
    }

    pub fn region(&self) -> Rect {
        let r = self.frame_region;
        if self.rotated {
            Rect::new(r.y0, r.x0, r.h, r.w)
        } else {
            r
        }
    }

    pub fn target(&self) -> Cell {
        self.physical(self.target)
    }

    /// Cycles of `word` to wait after the prefix.
    pub fn time_bound(&self) -> usize {
        self.out_cycle + 1
    }

    /// Physical steps after which the target is read.
    pub fn steps(&self) -> usize {
        self.wait_steps + self.time_bound() * self.word.k()
    }

    /// Cycles spent crossing each level's zone (routing plus gates),
    /// including the lag added by meanders.
    pub fn route_delays(&self) -> Vec<u64> {
        let mut lag_next: Vec<i64> = self.levels.iter().skip(1).map(|l| l.lag).collect();
        lag_next.push(self.levels.last().map_or(0, |l| l.lag + 4));
        self.levels.iter().zip(lag_next).map(|(l, n)| (l.x + GATE_WIDTH - l.start + n - l.lag) as u64).collect()
    }
}

#[derive(Debug, Clone)]
struct Rail {
    node: usize,
    side: Side,
    at: Block,
    lag: i64,
    group: usize,
}

struct Item {
    /// `(index into live rails, row offset, final move)`.
    rails: Vec<(usize, i64, char)>,
    ext: (i64, i64),
    gate: Option<usize>,
}

struct Builder<'a> {
    f: &'a Formula,
    k: usize,
    bridges: Vec<BridgeSpec>,
    groups: Vec<usize>,
    next_group: usize,
}

impl Builder<'_> {
    fn group(&mut self) -> usize {
        self.next_group += 1;
        self.next_group - 1
    }

    fn extend(&mut self, r: &mut Rail, moves: &str) {
        for m in moves.chars() {
            let (da, db) = crate::gadgets::move_delta(m).expect("internal move");
            let to = r.at.offset(da, db);
            self.bridges.push(BridgeSpec::new(r.at, to, r.side.polarity(), BridgeKind::Plain));
            self.groups.push(r.group);
            r.at = to;
            if da < 0 {
                r.lag += 2;
            }
        }
    }

    /// Which output rails of `node` its parent consumes.
    fn needed(&self, node: usize) -> (bool, bool) {
        let Some(p) = self.f.nodes[node].parent else {
            return (true, false);
        };
        let upper = self.f.nodes[p].children[0] == node;
        match (self.f.nodes[p].kind, upper) {
            (NodeKind::Or, true) | (NodeKind::And, false) => (true, true),
            (NodeKind::Or, false) => (true, false),
            (NodeKind::And, true) => (false, true),
            (NodeKind::Leaf { .. }, _) => unreachable!(),
        }
    }
}

fn moves_to(delta: i64, width: i64, last: char) -> String {
    let mut s = String::new();
    let d = if delta > 0 { 'd' } else { 'u' };
    for _ in 0..delta.abs() {
        s.push(d);
    }
    let pairs = (width - delta.abs()) / 2;
    let pair = if last == 'u' { "du" } else { "ud" };
    for _ in 0..pairs {
        s.push_str(pair);
    }
    s
}

/// Adds `2j` to the lag over `MEANDER_WIDTH` columns.
fn meander(j: i64) -> String {
    let mut s = String::new();
    if j > 0 {
        // entering the loop from below keeps the turn clear of the
        // bridge before it
        s.push_str("du");
        for _ in 0..j {
            s.push_str("uU");
        }
        s.push_str("uu");
        for _ in 0..2 * j + 2 {
            s.push('d');
        }
    }
    let mut width = if j > 0 { 2 * j + 6 } else { 0 };
    while width < MEANDER_WIDTH {
        width += 2;
        s.push_str("ud");
    }
    s
}

fn even_down(x: i64) -> i64 {
    x - x.rem_euclid(2)
}

/// Cells walked during `prefix` into `s`, moving right for H and down for V.
fn extension(s: Cell, prefix: &[Rule]) -> Vec<Cell> {
    let mut cells = vec![s];
    let mut p = s;
    for r in prefix.iter().rev() {
        p = match r {
            Rule::H => (p.0 - 1, p.1),
            Rule::V => (p.0, p.1 - 1),
        };
        cells.push(p);
    }
    cells.reverse();
    cells.pop();
    cells
}

/// Layout for the output of `c` under scheme `z` (any word containing both
/// symbols). Normalization and primitive roots are handled here.
pub fn layout(c: &Circuit, z: &UpdateScheme) -> Result<Layout, LayoutError> {
    layout_with(c, z, LayoutOptions::default())
}

pub fn layout_with(c: &Circuit, z: &UpdateScheme, opts: LayoutOptions) -> Result<Layout, LayoutError> {
    let degenerate = || LayoutError::DegenerateScheme(z.to_string());
    let norm = z.normalize().map_err(|_| degenerate())?;
    let word = norm.normalized.primitive_root();
    if word.h() < 2 || word.v() < 2 {
        return Err(degenerate());
    }
    let f = nnf(c, opts.max_nodes)
        .ok_or_else(|| LayoutError::CircuitTooLarge(format!("formula exceeds {} nodes", opts.max_nodes)))?;
    let mut b = Builder { f: &f, k: word.k(), bridges: Vec::new(), groups: Vec::new(), next_group: 0 };

    // Leaves.
    let mut live: Vec<Rail> = Vec::new();
    let mut sources = Vec::new();
    for (i, &leaf) in f.leaf_order().iter().enumerate() {
        let NodeKind::Leaf { var, negated } = f.nodes[leaf].kind else { unreachable!() };
        let (top, bottom) = b.needed(leaf);
        for (side, want, off) in [(Side::Top, top, 0), (Side::Bottom, bottom, 7)] {
            if !want {
                continue;
            }
            let g = b.group();
            let at = Block::new(0, LEAF_PITCH * i as i64 + off);
            let mut r = Rail { node: leaf, side, at, lag: 0, group: g };
            let first = b.bridges.len();
            b.extend(&mut r, COORDINATOR);
            let fires_on = (side == Side::Top) != negated;
            let s = at.source(side.polarity(), &word);
            sources.push(SourceRail { bridge: first, var, fires_on, extension: extension(s, &norm.prefix) });
            live.push(r);
        }
    }
    let mut e = COORDINATOR.len() as i64;

    let mut gates = Vec::new();
    let mut levels = Vec::new();
    let mut target = None;
    let mut out_cycle = 0;
    let depth = f.depth();
    for level in 1..=depth {
        // Items in top-to-bottom order.
        let mut items: Vec<Item> = Vec::new();
        let mut gate_of: HashMap<usize, usize> = HashMap::new();
        for (ri, r) in live.iter().enumerate() {
            let p = f.nodes[r.node].parent.expect("live rail has a consumer");
            if f.nodes[p].level == level {
                let t = template(kind_of(&f, p), b.k);
                let child = usize::from(f.nodes[p].children[1] == r.node);
                let slot = 2 * child + usize::from(r.side == Side::Bottom);
                debug_assert!(t.inputs[slot].is_some());
                let idx = *gate_of.entry(p).or_insert_with(|| {
                    items.push(Item { rails: Vec::new(), ext: t.rows, gate: Some(p) });
                    items.len() - 1
                });
                items[idx].rails.push((ri, PIN_ROWS[slot], GateTemplate::arrival(slot)));
            } else {
                let (off, ext) = match r.side {
                    Side::Top => (0, (-1, 1)),
                    Side::Bottom => (7, (6, 8)),
                };
                let same = ri > 0 && live[ri - 1].node == r.node && items.last().is_some_and(|it| it.gate.is_none());
                if same {
                    let it = items.last_mut().unwrap();
                    it.rails.push((ri, off, 'd'));
                    it.ext = (it.ext.0.min(ext.0), it.ext.1.max(ext.1));
                } else {
                    items.push(Item { rails: vec![(ri, off, 'd')], ext, gate: None });
                }
            }
        }

        let lam = live.iter().map(|r| r.lag).max().unwrap();
        let start = e;

        // Spread to the staging pitch.
        let mut stage: Vec<i64> = Vec::with_capacity(live.len());
        for (i, r) in live.iter().enumerate() {
            let mut s = r.at.b;
            if i > 0 {
                s = s.max(stage[i - 1] + STAGING_PITCH);
            }
            if (s - r.at.b).rem_euclid(2) == 1 {
                s += 1;
            }
            stage.push(s);
        }
        let shift = even_down(live.iter().zip(&stage).map(|(r, s)| s - r.at.b).max().unwrap() / 2);
        for s in &mut stage {
            *s -= shift;
        }
        let wa = live.iter().zip(&stage).map(|(r, s)| (s - r.at.b).abs()).max().unwrap();
        for (r, s) in live.iter_mut().zip(&stage) {
            let mv = moves_to(s - r.at.b, wa, 'd');
            b.extend(r, &mv);
        }

        // Equalize lags.
        for r in live.iter_mut() {
            let diff = lam - r.lag;
            assert!(diff % 2 == 0 && (0..=4).contains(&diff), "lag spread {diff}");
            b.extend(r, &meander(diff / 2));
        }
        let cb = e + wa + MEANDER_WIDTH;

        // Place items and converge.
        let mut anchors: Vec<i64> = Vec::with_capacity(items.len());
        let mut prefs = Vec::with_capacity(items.len());
        for (i, it) in items.iter().enumerate() {
            let want: Vec<i64> = it.rails.iter().map(|&(ri, off, _)| live[ri].at.b - off).collect();
            let lo = *want.iter().min().unwrap();
            let hi = *want.iter().max().unwrap();
            let pref = (lo + hi).div_euclid(2);
            let mut a = pref;
            if i > 0 {
                a = a.max(anchors[i - 1] + items[i - 1].ext.1 + MARGIN - it.ext.0);
            }
            if (a + cb).rem_euclid(2) == 1 {
                a += 1;
            }
            anchors.push(a);
            prefs.push(pref);
        }
        let shift = even_down(anchors.iter().zip(&prefs).map(|(a, p)| a - p).max().unwrap_or(0) / 2);
        for a in &mut anchors {
            *a -= shift;
        }
        let mut wc = 0;
        for (it, a) in items.iter().zip(&anchors) {
            for &(ri, off, _) in &it.rails {
                wc = wc.max((a + off - live[ri].at.b).abs());
            }
        }
        wc += 2;
        wc += wc.rem_euclid(2);
        for (it, a) in items.iter().zip(&anchors) {
            for &(ri, off, last) in &it.rails {
                let d = a + off - live[ri].at.b;
                let mv = moves_to(d, wc, last);
                b.extend(&mut live[ri], &mv);
            }
        }
        let x = cb + wc;
        debug_assert!(live.iter().all(|r| r.at.a == x && r.lag == lam));
        levels.push(LevelInfo { start, x, lag: lam });

        // Gate zone.
        let mut next: Vec<Rail> = Vec::new();
        for (it, &a) in items.iter().zip(&anchors) {
            match it.gate {
                None => {
                    for &(ri, _, _) in &it.rails {
                        let mut r = live[ri].clone();
                        let mv = if r.side == Side::Top { "ud" } else { "du" }.repeat(GATE_WIDTH as usize / 2);
                        b.extend(&mut r, &mv);
                        next.push(r);
                    }
                }
                Some(p) => {
                    let t = template(kind_of(&f, p), b.k);
                    let g = b.group();
                    for br in &t.bridges {
                        b.bridges.push(BridgeSpec { from: br.from.offset(x, a), to: br.to.offset(x, a), ..*br });
                        b.groups.push(g);
                    }
                    let t_in = (x + lam) as usize;
                    let t_out = t_in + GATE_DELAY;
                    let cell = |(blk, pol): (Block, Polarity)| blk.offset(x, a).source(pol, &word);
                    let top_out = t.top_out.offset(x, a);
                    let bottom_out = t.bottom_out.offset(x, a);
                    gates.push(GateRecord {
                        node: p,
                        kind: t.kind,
                        level,
                        origin: Block::new(x, a),
                        circuit_gate: f.nodes[p].gate,
                        t_in,
                        t_out,
                        control: cell(t.control),
                        pass: cell(t.pass),
                        top_out: cell((t.top_out, Polarity::Neg)),
                        bottom_out: cell((t.bottom_out, Polarity::Pos)),
                    });
                    if f.nodes[p].parent.is_none() {
                        let s = top_out.source(Polarity::Neg, &word);
                        target = Some((s.0 + 1, s.1));
                        out_cycle = t_out;
                        continue;
                    }
                    let (top, bottom) = b.needed(p);
                    let tails = match t.kind {
                        GateKind::Or => ("u", "dud"),
                        GateKind::And => ("udu", "d"),
                    };
                    for (side, want, from, tail) in [(Side::Top, top, top_out, tails.0), (Side::Bottom, bottom, bottom_out, tails.1)] {
                        if !want {
                            continue;
                        }
                        let lag = t_out as i64 - from.a;
                        let mut r = Rail { node: p, side, at: from, lag, group: b.group() };
                        b.extend(&mut r, tail);
                        next.push(r);
                    }
                }
            }
        }
        live = next;
        e = x + GATE_WIDTH;
    }

    let target = target.expect("root is a gate");
    let k = word.k() as i64;
    let (h, v) = (word.h() as i64, word.v() as i64);
    let (mut x0, mut y0, mut x1, mut y1) = (target.0, target.1, target.0, target.1);
    for br in &b.bridges {
        for blk in [br.from, br.to] {
            x0 = x0.min(blk.a * h);
            y0 = y0.min(blk.b * v);
            x1 = x1.max(blk.a * h + h);
            y1 = y1.max(blk.b * v + v);
        }
    }
    for s in &sources {
        for &(x, y) in &s.extension {
            x0 = x0.min(x);
            y0 = y0.min(y);
        }
    }
    // one ring for junk grains
    let frame_region = Rect::new(x0 - 1, y0 - 1, (x1 - x0 + 3) as usize, (y1 - y0 + 3) as usize);
    if frame_region.area() > opts.max_area {
        return Err(LayoutError::CircuitTooLarge(format!("region {}x{} exceeds {} cells", frame_region.w, frame_region.h, opts.max_area)));
    }
    let _ = k;

    Ok(Layout {
        scheme: z.clone(),
        word,
        rotated: norm.rotated,
        wait_steps: norm.wait_steps,
        n_inputs: c.n(),
        ledger: compute_budget(c.m()),
        bridges: b.bridges,
        groups: b.groups,
        formula: f,
        sources,
        gates,
        levels,
        target,
        out_cycle,
        frame_region,
    })
}

fn kind_of(f: &Formula, node: usize) -> GateKind {
    match f.nodes[node].kind {
        NodeKind::Or => GateKind::Or,
        NodeKind::And => GateKind::And,
        NodeKind::Leaf { .. } => unreachable!(),
    }
}
