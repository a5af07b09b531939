//! Layer-2 components built from bridges, their simulation and connection.
//!
//! Everything here is expressed at block level: a component is a list of
//! [`BridgeSpec`]s plus named pins, and is only turned into cells for a
//! concrete scheme.  Block moves are written with the letters
//! `d = (1,1)`, `u = (1,-1)`, `D = (-1,1)`, `U = (-1,-1)`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::grid::{Configuration, Simulator};
use crate::lattice::{diagonally_connected, Block, BridgeKind, BridgeSpec, Gadget, Pin, PinDir, Polarity};
use crate::scheme::UpdateScheme;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("blocks {0} and {1} of the chain are not diagonally connected")]
    BrokenChain(usize, usize),
    #[error("non-consecutive blocks {0} and {1} are diagonally connected")]
    IllegalDiagonalShortcut(usize, usize),
    #[error("components overlap or violate the clearance margin")]
    FootprintCollision,
    #[error("delay {d} not available in a retarder of side {l}")]
    DelayOutOfRange { l: usize, d: usize },
    #[error("horizon of {horizon} cycles ends before the last stimulus at cycle {last}")]
    HorizonTooSmall { horizon: usize, last: usize },
    #[error("polarity mismatch between connected pins")]
    PolarityMismatch,
    #[error("input `{0}` must be fed from the other side")]
    OrientationViolation(String),
    #[error("unknown pin `{0}`")]
    UnknownPin(String),
    #[error("invalid move `{0}`")]
    BadMove(char),
}

pub fn move_delta(m: char) -> Result<(i64, i64), GadgetError> {
    Ok(match m {
        'd' => (1, 1),
        'u' => (1, -1),
        'D' => (-1, 1),
        'U' => (-1, -1),
        _ => return Err(GadgetError::BadMove(m)),
    })
}

/// Blocks visited from `start` following a move string.
pub fn blocks_along(start: Block, moves: &str) -> Result<Vec<Block>, GadgetError> {
    let mut v = vec![start];
    for m in moves.chars() {
        let (da, db) = move_delta(m)?;
        let b = v.last().unwrap().offset(da, db);
        v.push(b);
    }
    Ok(v)
}

/// Chain of bridges along `blocks`, without validation.
pub fn chain(blocks: &[Block], pol: Polarity) -> Vec<BridgeSpec> {
    blocks.windows(2).map(|w| BridgeSpec::new(w[0], w[1], pol, BridgeKind::Plain)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiWire {
    pub blocks: Vec<Block>,
    pub polarity: Polarity,
    pub gadget: Gadget,
}

pub fn check_chain(blocks: &[Block]) -> Result<(), GadgetError> {
    for i in 1..blocks.len() {
        if !diagonally_connected(blocks[i - 1], blocks[i]) {
            return Err(GadgetError::BrokenChain(i - 1, i));
        }
    }
    for i in 0..blocks.len() {
        for j in i + 2..blocks.len() {
            if diagonally_connected(blocks[i], blocks[j]) || blocks[i] == blocks[j] {
                return Err(GadgetError::IllegalDiagonalShortcut(i, j));
            }
        }
    }
    Ok(())
}

/// A validated chain with pins `in` and `out`; delay equals its bridge count.
pub fn build_semi_wire(blocks: &[Block], pol: Polarity, source: bool) -> Result<SemiWire, GadgetError> {
    check_chain(blocks)?;
    if blocks.len() < 2 {
        return Err(GadgetError::BrokenChain(0, 0));
    }
    let mut g = Gadget::empty();
    g.bridges = chain(blocks, pol);
    g.pins.insert("in".into(), Pin::new(blocks[0], pol, PinDir::In));
    g.pins.insert("out".into(), Pin::new(*blocks.last().unwrap(), pol, PinDir::Out));
    g.delay = blocks.len() - 1;
    if source {
        g.bridges[0].kind = BridgeKind::Source;
    }
    Ok(SemiWire { blocks: blocks.to_vec(), polarity: pol, gadget: g })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    Duplicator,
    Merge,
    Crossing,
    Switch,
    /// Duplicate-and-rejoin diode on 14 blocks.
    Diode,
    /// The same principle on 4 blocks, used inside gates.
    CompactDiode,
    Retarder { side: usize, delay: usize },
    Coordinator { bridges: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSpec {
    pub kind: ComponentKind,
    pub polarity: Polarity,
    pub anchor: Block,
    pub gadget: Gadget,
}

fn pins(g: &mut Gadget, list: &[(&str, (i64, i64), Polarity, PinDir)]) {
    for (n, (a, b), p, d) in list {
        g.pins.insert(n.to_string(), Pin::new(Block::new(*a, *b), *p, *d));
    }
}

fn br(from: (i64, i64), to: (i64, i64), pol: Polarity, kind: BridgeKind) -> BridgeSpec {
    BridgeSpec::new(Block::new(from.0, from.1), Block::new(to.0, to.1), pol, kind)
}

use BridgeKind::Plain;
use PinDir::{In, Out};
use Polarity::{Neg, Pos};

/// Input `in` at (0,0); outputs one block up and one down, one column right.
pub fn duplicator(pol: Polarity) -> Gadget {
    let mut g = Gadget::empty();
    g.bridges = vec![br((0, 0), (1, -1), pol, Plain), br((0, 0), (1, 1), pol, Plain)];
    pins(&mut g, &[("in", (0, 0), pol, In), ("out_top", (1, -1), pol, Out), ("out_bottom", (1, 1), pol, Out)]);
    g.delay = 1;
    g
}

/// Inputs at (0,0) and (0,2), output at (1,1).
pub fn merge(pol: Polarity) -> Gadget {
    let mut g = Gadget::empty();
    g.bridges = vec![br((0, 0), (1, 1), pol, Plain), br((0, 2), (1, 1), pol, Plain)];
    pins(&mut g, &[("in_top", (0, 0), pol, In), ("in_bottom", (0, 2), pol, In), ("out", (1, 1), pol, Out)]);
    g.delay = 1;
    g
}

/// Positive crossing: the positive rail enters on top and leaves at the bottom;
/// the negative crossing has the positive input below.
pub fn crossing(pol: Polarity) -> Gadget {
    let mut g = Gadget::empty();
    match pol {
        Pos => {
            g.bridges = vec![
                br((0, 0), (1, 1), Pos, Plain),
                br((1, 1), (2, 2), Pos, Plain),
                br((0, 1), (1, 0), Neg, Plain),
                br((1, 0), (2, -1), Neg, Plain),
            ];
            pins(
                &mut g,
                &[("in_pos", (0, 0), Pos, In), ("in_neg", (0, 1), Neg, In), ("out_pos", (2, 2), Pos, Out), ("out_neg", (2, -1), Neg, Out)],
            );
        }
        Neg => {
            g.bridges = vec![
                br((0, -1), (1, 0), Neg, Plain),
                br((1, 0), (2, 1), Neg, Plain),
                br((0, 2), (1, 1), Pos, Plain),
                br((1, 1), (2, 0), Pos, Plain),
            ];
            pins(
                &mut g,
                &[("in_neg", (0, -1), Neg, In), ("in_pos", (0, 2), Pos, In), ("out_pos", (2, 0), Pos, Out), ("out_neg", (2, 1), Neg, Out)],
            );
        }
    }
    g.delay = 2;
    g
}

/// A switch passes `pass` to `out` only if `control` fired earlier. The
/// control bridge ends in a sink one step short of its target, on the
/// pass rail's second source cell.
pub fn switch(pol: Polarity, k: usize) -> Gadget {
    let sink = BridgeKind::SinkAt(k - 1);
    let mut g = Gadget::empty();
    match pol {
        Pos => {
            g.bridges = vec![br((0, 0), (1, 1), Pos, Plain), br((1, 1), (2, 2), Pos, Plain), br((0, 1), (1, 0), Neg, sink)];
            pins(&mut g, &[("pass", (0, 0), Pos, In), ("control", (0, 1), Neg, In), ("out", (2, 2), Pos, Out)]);
        }
        Neg => {
            g.bridges = vec![br((0, 1), (1, 0), Neg, Plain), br((1, 0), (2, -1), Neg, Plain), br((0, 0), (1, 1), Pos, sink)];
            pins(&mut g, &[("control", (0, 0), Pos, In), ("pass", (0, 1), Neg, In), ("out", (2, -1), Neg, Out)]);
        }
    }
    g.delay = 2;
    g
}

/// Duplicate at (0,0), rejoin at (2,0) where the lower branch ends in a sink
/// on the merge cell. Only two simultaneous arrivals refill it to a signal.
pub fn compact_diode(pol: Polarity, k: usize) -> Gadget {
    let mut g = Gadget::empty();
    g.bridges = vec![
        br((0, 0), (1, -1), pol, Plain),
        br((0, 0), (1, 1), pol, Plain),
        br((1, -1), (2, 0), pol, Plain),
        br((1, 1), (2, 0), pol, BridgeKind::SinkAt(k)),
    ];
    pins(&mut g, &[("in", (0, 0), pol, In), ("out", (2, 0), pol, Out)]);
    g.delay = 2;
    g
}

/// Three-bridge lead-in, duplication, two four-bridge branches rejoining on
/// a sink, three-bridge lead-out.
pub fn diode(pol: Polarity, k: usize) -> Gadget {
    let mut g = Gadget::empty();
    let lead_in = blocks_along(Block::new(0, 0), "udu").unwrap();
    let b3 = *lead_in.last().unwrap();
    let top = blocks_along(b3, "uudd").unwrap();
    let bottom = blocks_along(b3, "dduu").unwrap();
    let b10 = *top.last().unwrap();
    let lead_out = blocks_along(b10, "dud").unwrap();
    g.bridges.extend(chain(&lead_in, pol));
    g.bridges.extend(chain(&top, pol));
    let mut low = chain(&bottom, pol);
    low.last_mut().unwrap().kind = BridgeKind::SinkAt(k);
    g.bridges.extend(low);
    g.bridges.extend(chain(&lead_out, pol));
    let out = *lead_out.last().unwrap();
    pins(&mut g, &[("in", (0, 0), pol, In), ("out", (out.a, out.b), pol, Out)]);
    g.delay = 10;
    g
}

/// Largest retarder delay on a side-`side` footprint.
pub fn retarder_capacity(side: usize) -> usize {
    let (teeth, depth) = retarder_dims(side);
    side + 2 * (2 * teeth * depth + usize::from(side >= 6 + 6 * teeth))
}

fn retarder_dims(side: usize) -> (usize, usize) {
    if side < 8 {
        return (0, 0);
    }
    // a tooth of depth n spans rows -1..=2n+2; the box holds rows -4..side-4
    ((side - 6) / 6, (side - 7) / 2)
}

/// Serpentine from (0,0) to (side,0) with exactly `delay` bridges.
///
/// Each tooth (6 columns wide) descends and climbs back in zig-zag legs; a leg
/// pair of depth `2n+1` costs `n` left moves each, i.e. `4n` extra cycles.
/// One optional `uUuudddd` meander adds 2 more. Feasible delays are the even
/// values from `side` to [`retarder_capacity`] (side even).
pub fn retarder(pol: Polarity, side: usize, delay: usize) -> Result<Gadget, GadgetError> {
    let err = GadgetError::DelayOutOfRange { l: side, d: delay };
    if side % 2 == 1 || delay < side || (delay - side) % 2 == 1 || delay > retarder_capacity(side) {
        return Err(err);
    }
    let (teeth, depth) = retarder_dims(side);
    let mut lefts = (delay - side) / 2;
    let mut moves = String::new();
    let mut width = 0;
    if lefts % 2 == 1 {
        moves.push_str("uUuudddd");
        width += 6;
        lefts -= 1;
    }
    let mut pairs = lefts / 2;
    for _ in 0..teeth {
        if width + 6 > side {
            break;
        }
        let n = pairs.min(depth);
        pairs -= n;
        moves.push('d');
        moves.push_str(&"Dd".repeat(n));
        moves.push_str("du");
        moves.push('u');
        moves.push_str(&"Uu".repeat(n));
        moves.push_str("ud");
        width += 6;
    }
    if pairs > 0 {
        return Err(err);
    }
    while width < side {
        moves.push_str("ud");
        width += 2;
    }
    let blocks = blocks_along(Block::new(0, 0), &moves)?;
    check_chain(&blocks)?;
    let mut g = Gadget::empty();
    g.bridges = chain(&blocks, pol);
    pins(&mut g, &[("in", (0, 0), pol, In), ("out", (side as i64, 0), pol, Out)]);
    g.delay = delay;
    Ok(g)
}

/// Straight source wire of `m` bridges in one direction.
pub fn coordinator(pol: Polarity, m: usize) -> Gadget {
    let blocks = blocks_along(Block::new(0, 0), &"d".repeat(m)).unwrap();
    build_semi_wire(&blocks, pol, true).unwrap().gadget
}

pub fn build_component(kind: ComponentKind, pol: Polarity, anchor: Block, z: &UpdateScheme) -> Result<ComponentSpec, GadgetError> {
    let g = match kind {
        ComponentKind::Duplicator => duplicator(pol),
        ComponentKind::Merge => merge(pol),
        ComponentKind::Crossing => crossing(pol),
        ComponentKind::Switch => switch(pol, z.k()),
        ComponentKind::Diode => diode(pol, z.k()),
        ComponentKind::CompactDiode => compact_diode(pol, z.k()),
        ComponentKind::Retarder { side, delay } => retarder(pol, side, delay)?,
        ComponentKind::Coordinator { bridges } => coordinator(pol, bridges),
    };
    Ok(ComponentSpec { kind, polarity: pol, anchor, gadget: g.translate(anchor.a, anchor.b) })
}

/// Overlay with the cells of `fired` pins raised to 4.
pub fn overlay_with(g: &Gadget, fired: &[&str], z: &UpdateScheme) -> Result<Configuration, GadgetError> {
    let mut c = g.overlay(z);
    for name in fired {
        let p = g.pins.get(*name).ok_or_else(|| GadgetError::UnknownPin(name.to_string()))?;
        c.set(p.cell(z), 4);
    }
    Ok(c)
}

/// Arrival record for every pin of a simulated gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinTimes {
    /// First cycle boundary at which the pin cell holds a signal.
    pub cycle: BTreeMap<String, Option<usize>>,
    /// First step (any phase) at which the pin cell holds a signal.
    pub step: BTreeMap<String, Option<usize>>,
    /// Signals left anywhere at the horizon.
    pub residue: usize,
}

impl PinTimes {
    pub fn at(&self, pin: &str) -> Option<usize> {
        self.cycle.get(pin).copied().flatten()
    }

    pub fn ever(&self, pin: &str) -> Option<usize> {
        self.step.get(pin).copied().flatten()
    }
}

/// Runs `g` for `horizon` cycles, raising each stimulated input to 4 at the
/// start of its cycle.
pub fn simulate_component(
    g: &Gadget,
    stimuli: &BTreeMap<String, usize>,
    z: &UpdateScheme,
    horizon: usize,
) -> Result<PinTimes, GadgetError> {
    let last = stimuli.values().copied().max().unwrap_or(0);
    if horizon < last {
        return Err(GadgetError::HorizonTooSmall { horizon, last });
    }
    let mut cells = BTreeMap::new();
    for (n, p) in &g.pins {
        cells.insert(n.clone(), p.cell(z));
    }
    for n in stimuli.keys() {
        if !cells.contains_key(n) {
            return Err(GadgetError::UnknownPin(n.clone()));
        }
    }
    let k = z.k();
    let mut sim = Simulator::from_config(g.overlay(z));
    let mut cycle: BTreeMap<String, Option<usize>> = cells.keys().map(|n| (n.clone(), None)).collect();
    let mut step = cycle.clone();
    for t in 0..=horizon * k {
        if t % k == 0 {
            for (n, c) in stimuli {
                if *c * k == t {
                    sim.set(cells[n], 4);
                }
            }
        }
        for (n, &cell) in &cells {
            if sim.get(cell) >= 4 {
                if t % k == 0 && cycle[n].is_none() {
                    cycle.insert(n.clone(), Some(t / k));
                }
                if step[n].is_none() {
                    step.insert(n.clone(), Some(t));
                }
            }
        }
        if t < horizon * k {
            sim.apply(z.rule_at(t));
        }
    }
    Ok(PinTimes { cycle, step, residue: sim.firing().len() })
}

/// Chebyshev distance between blocks.
fn block_dist(a: Block, b: Block) -> i64 {
    (a.a - b.a).abs().max((a.b - b.b).abs())
}

/// Clearance, in whole blocks, kept between footprints that are not joined.
pub const CLEARANCE: i64 = 2;

/// Joins `out_pin` of `g1` to `in_pin` of `g2`, translating `g2`. The joined
/// pins are dropped, remaining pins of `g2` are prefixed with `b.`.
pub fn connect(g1: &Gadget, out_pin: &str, g2: &Gadget, in_pin: &str) -> Result<Gadget, GadgetError> {
    let po = *g1.pins.get(out_pin).ok_or_else(|| GadgetError::UnknownPin(out_pin.into()))?;
    let pi = *g2.pins.get(in_pin).ok_or_else(|| GadgetError::UnknownPin(in_pin.into()))?;
    if po.polarity != pi.polarity {
        return Err(GadgetError::PolarityMismatch);
    }
    let moved = g2.translate(po.block.a - pi.block.a, po.block.b - pi.block.b);
    let joint = po.block;

    // two-input gadgets: the upper input is fed from above, the lower from below
    let inputs: Vec<(&String, &Pin)> = moved.pins.iter().filter(|(_, p)| p.dir == PinDir::In).collect();
    if inputs.len() == 2 {
        let upper = inputs.iter().map(|(_, p)| p.block.b).min().unwrap();
        let feed = g1
            .bridges
            .iter()
            .find(|b| b.to == joint && b.polarity == po.polarity)
            .map(|b| b.from.b - joint.b);
        if let Some(dir) = feed {
            let from_above = dir < 0;
            if from_above != (joint.b == upper) {
                return Err(GadgetError::OrientationViolation(in_pin.into()));
            }
        }
    }

    let f1 = g1.footprint();
    let f2 = moved.footprint();
    for b in &f2 {
        if *b != joint && f1.contains(b) {
            return Err(GadgetError::FootprintCollision);
        }
    }
    let far = |b: &Block| block_dist(*b, joint) > CLEARANCE;
    for a in f1.iter().filter(|b| far(b)) {
        for b in f2.iter().filter(|b| far(b)) {
            if block_dist(*a, *b) <= CLEARANCE {
                return Err(GadgetError::FootprintCollision);
            }
        }
    }

    let mut out = g1.clone();
    out.pins.remove(out_pin);
    for (n, p) in moved.pins {
        if n != in_pin {
            out.pins.insert(format!("b.{n}"), p);
        }
    }
    out.bridges.extend(moved.bridges);
    out.delay = g1.delay + g2.delay;
    Ok(out)
}

/// First step at which `c` evolved under `w` has no signal, if within `limit`.
pub fn first_quiet_step(c: &Configuration, w: &UpdateScheme, limit: usize) -> Option<usize> {
    let mut sim = Simulator::from_config(c.clone());
    for t in 0..=limit {
        if sim.firing().is_empty() {
            return Some(t);
        }
        sim.apply(w.rule_at(t));
    }
    None
}

/// Every proper shift of `z` drains a length-`m` coordinator source wire
/// within `k*m` steps.
pub fn check_coordinator_kills_shifts(m: usize, z: &UpdateScheme) -> bool {
    let Ok(shifts) = z.shifted_cycles() else { return false };
    let c = coordinator(Pos, m).overlay(z);
    shifts.iter().all(|w| first_quiet_step(&c, w, z.k() * m).is_some())
}

/// Blocks touched by a set of gadgets, for collision checks by callers.
pub fn footprint_union<'a, I: IntoIterator<Item = &'a Gadget>>(gs: I) -> BTreeSet<Block> {
    gs.into_iter().flat_map(|g| g.footprint()).collect()
}
