//! Column-by-column emission of an embedding.
//!
//! Only one column of cells is ever buffered. The plan (bridge list with
//! column ranges) is walked with a sweep pointer, and the cells of an active
//! bridge on the current column are recomputed from its Z-path.

use std::io::{self, Write};

use crate::grid::{cfg_header, Cell, Rect};
use crate::lattice::plus;

use super::{Embedding, Piece};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StreamStats {
    pub columns: usize,
    /// Largest number of cells held at once.
    pub peak_buffered_cells: usize,
    /// Largest number of plan entries overlapping one column.
    pub peak_active: usize,
    pub plan_len: usize,
}

pub fn emit_stream<W: Write>(e: &Embedding, out: &mut W, unary: bool) -> io::Result<StreamStats> {
    let l = &e.layout;
    let region = e.region();
    let (tx, ty) = e.target();
    writeln!(out, "# target={tx},{ty}")?;
    writeln!(out, "# time_bound={}", e.time_bound())?;
    writeln!(out, "# steps={}", e.steps())?;
    if unary {
        writeln!(out, "# time_unary={}", "1".repeat(e.time_bound()))?;
    }
    writeln!(out, "{} order=columns", cfg_header(Some(e.scheme()), region))?;

    let pieces = e.pieces();
    let cells_of = |i: usize| -> Vec<(Cell, u8)> {
        match &pieces[i] {
            Piece::Bridge(b) => b.cells(&l.word).map(|(q, g)| (l.physical(q), g)).collect(),
            Piece::Cells(c) => c.iter().map(|&(q, g)| (l.physical(q), g)).collect(),
        }
    };
    write_columns(out, region, pieces.len(), cells_of)
}

/// Writes the body for `region`, one column per line. Piece `i` of the plan
/// contributes `cells_of(i)`; overlapping contributions combine with the
/// overlay sum. Pieces are re-expanded per column instead of cached.
pub fn write_columns<W: Write, F: Fn(usize) -> Vec<(Cell, u8)>>(
    out: &mut W,
    region: Rect,
    n: usize,
    cells_of: F,
) -> io::Result<StreamStats> {
    let mut plan: Vec<(i64, i64, usize)> = (0..n)
        .filter_map(|i| {
            let xs = cells_of(i);
            let lo = xs.iter().map(|c| c.0 .0).min()?;
            let hi = xs.iter().map(|c| c.0 .0).max()?;
            Some((lo, hi, i))
        })
        .collect();
    plan.sort_unstable();

    let mut stats = StreamStats { plan_len: plan.len(), ..Default::default() };
    let mut column = vec![0u8; region.h];
    let mut active: Vec<(i64, usize)> = Vec::new();
    let mut next = 0;
    let mut line = String::with_capacity(region.h + 1);
    for x in region.x0..region.x0 + region.w as i64 {
        while next < plan.len() && plan[next].0 <= x {
            active.push((plan[next].1, plan[next].2));
            next += 1;
        }
        active.retain(|&(hi, _)| hi >= x);
        stats.peak_active = stats.peak_active.max(active.len());
        column.iter_mut().for_each(|c| *c = 0);
        let mut held = 0;
        for &(_, i) in &active {
            for ((cx, cy), g) in cells_of(i) {
                if cx == x && region.contains((cx, cy)) {
                    let slot = &mut column[(cy - region.y0) as usize];
                    if *slot == 0 {
                        held += 1;
                    }
                    *slot = plus(*slot, g);
                }
            }
        }
        stats.peak_buffered_cells = stats.peak_buffered_cells.max(held);
        assert!(held <= region.h, "column buffer overflow");
        line.clear();
        line.extend(column.iter().map(|&g| if g == 0 { '.' } else { (b'0' + g) as char }));
        writeln!(out, "{line}")?;
        stats.columns += 1;
    }
    Ok(stats)
}

/// Reads the `# key=value` header lines written by [`emit_stream`].
pub fn read_meta(text: &str, key: &str) -> Option<String> {
    let prefix = format!("# {key}=");
    text.lines().take_while(|l| l.starts_with('#')).find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
}
