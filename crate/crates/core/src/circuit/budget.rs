//! Delay budget bookkeeping. The layout does not spend these budgets with
//! retarders; it equalizes lags directly. The ledger records the nominal
//! schedule and the layout is checked to stay inside it.

use crate::gadgets::CLEARANCE;

use super::gates::{GATE_DELAY, GATE_WIDTH};
use super::layout::{MEANDER_WIDTH, STAGING_PITCH};

/// Largest component delay (a gate) plus the route that clears it: the gate
/// zone, one meander, spreading and converging by a staging pitch each, and
/// the clearance margin on both sides.
pub fn c_d() -> u64 {
    (GATE_DELAY as i64 + GATE_WIDTH + MEANDER_WIDTH + 2 * STAGING_PITCH + 2 * CLEARANCE) as u64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileDelays {
    pub tile: usize,
    pub d_t: u64,
    /// `d_c[j]`: entry of the `j`-th crossing of the tile.
    pub d_c: Vec<u64>,
    /// `d_n[j][k]`: entry of the `k`-th NAND slot after crossing `j`.
    pub d_n: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayLedger {
    pub m: usize,
    pub c_d: u64,
    /// Per-tile routing allowance `c_D * m^4`.
    pub d: u64,
    pub tiles: Vec<TileDelays>,
}

impl DelayLedger {
    /// Total nominal schedule length.
    pub fn horizon(&self) -> u64 {
        (self.m as u64 + 1) * self.m as u64 * self.c_d * self.d
    }
}

pub fn compute_budget(m: usize) -> DelayLedger {
    let c = c_d();
    let mm = m as u64;
    let d = c * mm.pow(4);
    let tiles = (0..m)
        .map(|i| {
            let d_t = i as u64 * mm * c * d;
            let d_c: Vec<u64> = (0..=i).map(|j| d_t + j as u64 * c * d).collect();
            let d_n = d_c.iter().map(|&dc| (0..2).map(|k| dc + k * c * d).collect()).collect();
            TileDelays { tile: i, d_t, d_c, d_n }
        })
        .collect();
    DelayLedger { m, c_d: c, d, tiles }
}
