//! The two gate templates. Each value travels on a pair of rails: the upper
//! rail (negative polarity) fires iff the value is 1, the lower rail
//! (positive) fires iff it is 0. Upper rails sit on blocks of even parity
//! `(a+b) % 2 == 0`, lower rails on odd ones.
//!
//! Input pins are in column 0 at rows 0, 7, 14, 21 (upper value: rows 0 and
//! 7). All used inputs must arrive in the same cycle `t`; both outputs are
//! reached at `t + GATE_DELAY`.

use crate::gadgets::{blocks_along, chain, compact_diode, crossing, duplicator, merge, switch};
use crate::lattice::{Block, BridgeSpec, Gadget, Polarity};

pub const GATE_DELAY: usize = 17;
pub const GATE_WIDTH: i64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Or,
    And,
}

/// Input pin slots, top to bottom.
pub const PIN_ROWS: [i64; 4] = [0, 7, 14, 21];

#[derive(Debug, Clone)]
pub struct GateTemplate {
    pub kind: GateKind,
    pub bridges: Vec<BridgeSpec>,
    /// `inputs[i]` is `None` for the dropped slot.
    pub inputs: [Option<Block>; 4],
    pub top_out: Block,
    pub bottom_out: Block,
    pub control: (Block, Polarity),
    pub pass: (Block, Polarity),
    /// Row range touched by bridges or used pins.
    pub rows: (i64, i64),
}

impl GateTemplate {
    pub fn polarity_of_slot(slot: usize) -> Polarity {
        if slot.is_multiple_of(2) {
            Polarity::Neg
        } else {
            Polarity::Pos
        }
    }

    /// Direction of the last routing move into a slot: `'u'` arrives from below.
    pub fn arrival(slot: usize) -> char {
        if slot == 0 {
            'u'
        } else {
            'd'
        }
    }
}

struct Builder {
    k: usize,
    bridges: Vec<BridgeSpec>,
}

impl Builder {
    fn add(&mut self, g: Gadget) -> Gadget {
        self.bridges.extend(g.bridges.iter().copied());
        g
    }

    fn path(&mut self, start: (i64, i64), moves: &str, pol: Polarity) -> (i64, i64) {
        let bs = blocks_along(Block::new(start.0, start.1), moves).expect("template moves");
        self.bridges.extend(chain(&bs, pol));
        let b = *bs.last().unwrap();
        (b.a, b.b)
    }

    fn at(&mut self, g: Gadget, p: (i64, i64)) -> Gadget {
        self.add(g.translate(p.0, p.1))
    }

    fn pin(g: &Gadget, name: &str) -> (i64, i64) {
        let b = g.pin(name).block;
        (b.a, b.b)
    }

    fn dup(&mut self, p: (i64, i64), pol: Polarity) -> ((i64, i64), (i64, i64)) {
        let g = self.at(duplicator(pol), p);
        (Self::pin(&g, "out_top"), Self::pin(&g, "out_bottom"))
    }

    fn merge(&mut self, top: (i64, i64), pol: Polarity) -> (i64, i64) {
        let g = self.at(merge(pol), top);
        Self::pin(&g, "out")
    }

    /// Positive crossing anchored at its positive input; returns (negative
    /// out, positive out).
    fn cross(&mut self, top: (i64, i64)) -> ((i64, i64), (i64, i64)) {
        let g = self.at(crossing(Polarity::Pos), top);
        (Self::pin(&g, "out_neg"), Self::pin(&g, "out_pos"))
    }

    fn switch(&mut self, pol: Polarity, top: (i64, i64)) -> (i64, i64) {
        let g = self.at(switch(pol, self.k), top);
        Self::pin(&g, "out")
    }

    fn diode(&mut self, p: (i64, i64), pol: Polarity) -> (i64, i64) {
        let g = self.at(compact_diode(pol, self.k), p);
        Self::pin(&g, "out")
    }
}

fn rows_of(bridges: &[BridgeSpec], extra: &[Block]) -> (i64, i64) {
    let it = bridges.iter().flat_map(|b| [b.from.b, b.to.b]).chain(extra.iter().map(|b| b.b));
    let (mut lo, mut hi) = (i64::MAX, i64::MIN);
    for r in it {
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}

fn blk(p: (i64, i64)) -> Block {
    Block::new(p.0, p.1)
}

/// OR: the lower rail of the second value is not needed.
pub fn or_gate(k: usize) -> GateTemplate {
    use Polarity::{Neg, Pos};
    let mut l = Builder { k, bridges: Vec::new() };
    l.path((0, 7), "d", Pos);
    let (ab1, ab2) = l.dup((1, 8), Pos);
    l.path((0, 14), "dDdduuuu", Neg);
    l.path(ab2, "dddd", Pos);
    let s = l.switch(Neg, (6, 13));
    let s = l.diode(s, Neg);
    l.path(s, "u", Neg);
    l.path(ab1, "uUuuddDdddudd", Pos);
    let (top_o, bot_o) = l.cross((11, 10));
    l.path((0, 0), "uUuudddddddddddu", Neg);
    l.path(top_o, "u", Neg);
    let out_t = l.merge((14, 6), Neg);
    let inputs = [Some(Block::new(0, 0)), Some(Block::new(0, 7)), Some(Block::new(0, 14)), None];
    let pins: Vec<Block> = inputs.iter().flatten().copied().collect();
    GateTemplate {
        kind: GateKind::Or,
        rows: rows_of(&l.bridges, &pins),
        bridges: l.bridges,
        inputs,
        top_out: blk(out_t),
        bottom_out: blk(bot_o),
        control: (Block::new(6, 13), Pos),
        pass: (Block::new(6, 14), Neg),
    }
}

/// AND: mirror image of the OR gate with polarities exchanged; the upper
/// rail of the first value is not needed.
pub fn and_gate(k: usize) -> GateTemplate {
    use Polarity::{Neg, Pos};
    let mut l = Builder { k, bridges: Vec::new() };
    l.path((0, 14), "u", Neg);
    let (bt2, bt1) = l.dup((1, 13), Neg);
    l.path((0, 7), "uuUudddd", Pos);
    l.path(bt2, "uuuu", Neg);
    let s = l.switch(Pos, (6, 7));
    let s = l.diode(s, Pos);
    l.path(s, "d", Pos);
    l.path(bt1, "dDdduuUuuuduu", Neg);
    let (top_o, bot_o) = l.cross((11, 10));
    l.path((0, 21), "dDdduuuuuuuuuuud", Pos);
    l.path(bot_o, "d", Pos);
    let out_b = l.merge((14, 13), Pos);
    let inputs = [None, Some(Block::new(0, 7)), Some(Block::new(0, 14)), Some(Block::new(0, 21))];
    let pins: Vec<Block> = inputs.iter().flatten().copied().collect();
    GateTemplate {
        kind: GateKind::And,
        rows: rows_of(&l.bridges, &pins),
        bridges: l.bridges,
        inputs,
        top_out: blk(top_o),
        bottom_out: blk(out_b),
        control: (Block::new(6, 8), Neg),
        pass: (Block::new(6, 7), Pos),
    }
}

pub fn template(kind: GateKind, k: usize) -> GateTemplate {
    match kind {
        GateKind::Or => or_gate(k),
        GateKind::And => and_gate(k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let g = or_gate(7);
        assert_eq!(g.top_out, Block::new(15, 7));
        assert_eq!(g.bottom_out, Block::new(13, 12));
        let g = and_gate(7);
        assert_eq!(g.top_out, Block::new(13, 9));
        assert_eq!(g.bottom_out, Block::new(15, 14));
        for t in [or_gate(7), and_gate(7)] {
            for (slot, b) in t.inputs.iter().enumerate() {
                if let Some(b) = b {
                    assert_eq!(b.b, PIN_ROWS[slot]);
                    let parity = (b.a + b.b).rem_euclid(2);
                    assert_eq!(parity == 0, GateTemplate::polarity_of_slot(slot) == Polarity::Neg);
                }
            }
            assert!(t.bridges.iter().all(|b| b.from.a >= 0 && b.to.a <= GATE_WIDTH));
        }
    }
}
