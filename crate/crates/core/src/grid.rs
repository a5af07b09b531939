//! Configurations, the two local rules and cycle evolution.

use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::scheme::{parse_scheme, Rule, UpdateScheme};

pub type Cell = (i64, i64);

/// Largest grain count a cell may hold.
pub const MAX_GRAIN: u8 = 5;

/// Axis-aligned rectangle of cells, `w` columns by `h` rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn new(x0: i64, y0: i64, w: usize, h: usize) -> Rect {
        Rect { x0, y0, w, h }
    }

    pub fn contains(&self, (x, y): Cell) -> bool {
        x >= self.x0 && y >= self.y0 && x < self.x0 + self.w as i64 && y < self.y0 + self.h as i64
    }

    pub fn grow(&self, dx: usize, dy: usize) -> Rect {
        Rect::new(self.x0 - dx as i64, self.y0 - dy as i64, self.w + 2 * dx, self.h + 2 * dy)
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }
}

/// Sparse grain assignment; zero cells are never stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Configuration {
    cells: FxHashMap<Cell, u8>,
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.sorted()).finish()
    }
}

impl Configuration {
    pub fn new() -> Configuration {
        Configuration::default()
    }

    pub fn from_cells<I: IntoIterator<Item = (Cell, u8)>>(cells: I) -> Configuration {
        let mut c = Configuration::new();
        for (p, g) in cells {
            c.set(p, g);
        }
        c
    }

    pub fn get(&self, p: Cell) -> u8 {
        self.cells.get(&p).copied().unwrap_or(0)
    }

    /// Stores `g` at `p`; storing 0 removes the cell.
    pub fn set(&mut self, p: Cell, g: u8) {
        assert!(g <= MAX_GRAIN, "grain {g} out of range at {p:?}");
        if g == 0 {
            self.cells.remove(&p);
        } else {
            self.cells.insert(p, g);
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Cell, u8)> + '_ {
        self.cells.iter().map(|(p, g)| (*p, *g))
    }

    /// Cells in row-major order (y, then x).
    pub fn sorted(&self) -> Vec<(Cell, u8)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by_key(|((x, y), _)| (*y, *x));
        v
    }

    pub fn bounding_box(&self) -> Option<Rect> {
        let mut it = self.cells.keys();
        let &(x, y) = it.next()?;
        let (mut x0, mut y0, mut x1, mut y1) = (x, y, x, y);
        for &(x, y) in it {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        Some(Rect::new(x0, y0, (x1 - x0 + 1) as usize, (y1 - y0 + 1) as usize))
    }

    pub fn total_grains(&self) -> u64 {
        self.cells.values().map(|g| *g as u64).sum()
    }

    /// Cells holding at least 4 grains, row-major.
    pub fn signals(&self) -> Vec<Cell> {
        let mut v: Vec<Cell> = self.iter().filter(|(_, g)| *g >= 4).map(|(p, _)| p).collect();
        v.sort_by_key(|(x, y)| (*y, *x));
        v
    }

    /// Vertical parity property: all signals share the parity of their row.
    pub fn has_vpp(&self) -> bool {
        let mut parity = None;
        for (p, g) in self.iter() {
            if g >= 4 {
                let r = p.1.rem_euclid(2);
                match parity {
                    None => parity = Some(r),
                    Some(q) if q != r => return false,
                    _ => {}
                }
            }
        }
        true
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Configuration {
        Configuration { cells: self.cells.iter().map(|((x, y), g)| ((x + dx, y + dy), *g)).collect() }
    }

    /// Restriction to a window.
    pub fn window(&self, r: Rect) -> Configuration {
        Configuration { cells: self.cells.iter().filter(|(p, _)| r.contains(**p)).map(|(p, g)| (*p, *g)).collect() }
    }
}

fn axis(r: Rule) -> Cell {
    match r {
        Rule::H => (1, 0),
        Rule::V => (0, 1),
    }
}

/// One synchronous update: every signal loses two grains and hands one to each
/// neighbour on the rule's axis.
pub fn step(c: &Configuration, r: Rule) -> Configuration {
    let mut sim = Simulator::from_config(c.clone());
    sim.apply(r);
    sim.into_config()
}

/// Applies `z` cyclically for `t` steps, starting at its first symbol.
pub fn run_steps(c: &Configuration, z: &UpdateScheme, t: usize) -> Configuration {
    let mut sim = Simulator::from_config(c.clone());
    for i in 0..t {
        sim.apply(z.rule_at(i));
    }
    sim.into_config()
}

pub fn run_cycles(c: &Configuration, z: &UpdateScheme, i: usize) -> Configuration {
    run_steps(c, z, i * z.k())
}

/// Whether `x` is non-zero at some step `t <= steps`.
pub fn predict(c: &Configuration, x: Cell, steps: usize, z: &UpdateScheme) -> bool {
    first_nonzero(c, x, steps, z).is_some()
}

/// First step at which `x` holds grains, if any within `steps`.
pub fn first_nonzero(c: &Configuration, x: Cell, steps: usize, z: &UpdateScheme) -> Option<usize> {
    let mut sim = Simulator::from_config(c.clone());
    if sim.get(x) != 0 {
        return Some(0);
    }
    for t in 1..=steps {
        sim.apply(z.rule_at(t - 1));
        if sim.get(x) != 0 {
            return Some(t);
        }
        if sim.firing().is_empty() {
            return None;
        }
    }
    None
}

/// In-place evolution. Only signal cells are visited per step, so the cost of
/// a step is proportional to the number of signals, not to the region.
#[derive(Clone)]
pub struct Simulator {
    cells: FxHashMap<Cell, u8>,
    firing: Vec<Cell>,
    touched: Vec<Cell>,
    seen: FxHashSet<Cell>,
    steps: u64,
}

impl Simulator {
    pub fn from_config(c: Configuration) -> Simulator {
        let mut firing: Vec<Cell> = c.cells.iter().filter(|(_, g)| **g >= 4).map(|(p, _)| *p).collect();
        firing.sort_unstable();
        Simulator { cells: c.cells, firing, touched: Vec::new(), seen: FxHashSet::default(), steps: 0 }
    }

    pub fn get(&self, p: Cell) -> u8 {
        self.cells.get(&p).copied().unwrap_or(0)
    }

    /// Overwrites a cell between steps.
    pub fn set(&mut self, p: Cell, g: u8) {
        assert!(g <= MAX_GRAIN);
        let was = self.get(p) >= 4;
        if g == 0 {
            self.cells.remove(&p);
        } else {
            self.cells.insert(p, g);
        }
        if g >= 4 && !was {
            self.firing.push(p);
        } else if g < 4 && was {
            self.firing.retain(|q| *q != p);
        }
    }

    /// Current signal cells (unordered).
    pub fn firing(&self) -> &[Cell] {
        &self.firing
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn apply(&mut self, r: Rule) {
        self.steps += 1;
        if self.firing.is_empty() {
            return;
        }
        let (dx, dy) = axis(r);
        self.touched.clear();
        for &(x, y) in &self.firing {
            *self.cells.get_mut(&(x, y)).expect("signal cell present") -= 2;
            self.touched.push((x, y));
            for s in [-1, 1] {
                let q = (x + s * dx, y + s * dy);
                *self.cells.entry(q).or_insert(0) += 1;
                self.touched.push(q);
            }
        }
        self.firing.clear();
        self.seen.clear();
        for &p in &self.touched {
            if self.cells[&p] >= 4 && self.seen.insert(p) {
                self.firing.push(p);
            }
        }
    }

    /// Runs `n` steps of `z`, continuing from the current global step count.
    pub fn run(&mut self, z: &UpdateScheme, n: usize) {
        for _ in 0..n {
            let r = z.rule_at(self.steps as usize);
            self.apply(r);
        }
    }

    pub fn config(&self) -> Configuration {
        Configuration { cells: self.cells.clone() }
    }

    pub fn into_config(self) -> Configuration {
        Configuration { cells: self.cells }
    }
}

/// Brute-force reference over a dense box.
pub mod dense {
    use super::{axis, Cell, Configuration, Rect};
    use crate::scheme::{Rule, UpdateScheme};

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct DenseGrid {
        pub rect: Rect,
        data: Vec<u8>,
    }

    impl DenseGrid {
        /// Box covering `c` enlarged by `margin` cells on every side.
        pub fn from_config(c: &Configuration, margin: usize) -> DenseGrid {
            let rect = c.bounding_box().unwrap_or(Rect::new(0, 0, 1, 1)).grow(margin, margin);
            let mut g = DenseGrid { rect, data: vec![0; rect.area()] };
            for (p, v) in c.iter() {
                let i = g.index(p).unwrap();
                g.data[i] = v;
            }
            g
        }

        fn index(&self, (x, y): Cell) -> Option<usize> {
            if !self.rect.contains((x, y)) {
                return None;
            }
            Some((y - self.rect.y0) as usize * self.rect.w + (x - self.rect.x0) as usize)
        }

        pub fn get(&self, p: Cell) -> u8 {
            self.index(p).map(|i| self.data[i]).unwrap_or(0)
        }

        pub fn step(&mut self, r: Rule) {
            let (dx, dy) = axis(r);
            let (w, h) = (self.rect.w as i64, self.rect.h as i64);
            let fire: Vec<bool> = self.data.iter().map(|g| *g >= 4).collect();
            let at = |x: i64, y: i64| -> bool { x >= 0 && y >= 0 && x < w && y < h && fire[(y * w + x) as usize] };
            let mut next = self.data.clone();
            for y in 0..h {
                for x in 0..w {
                    let i = (y * w + x) as usize;
                    let mut g = self.data[i] as i32;
                    if fire[i] {
                        g -= 2;
                    }
                    g += at(x - dx, y - dy) as i32 + at(x + dx, y + dy) as i32;
                    next[i] = g as u8;
                }
            }
            self.data = next;
        }

        pub fn run(&mut self, z: &UpdateScheme, t: usize) {
            for i in 0..t {
                self.step(z.rule_at(i));
            }
        }

        /// True if any grain sits on the outermost ring, where the box could
        /// have lost mass.
        pub fn touches_border(&self) -> bool {
            let (w, h) = (self.rect.w, self.rect.h);
            (0..w).any(|x| self.data[x] != 0 || self.data[(h - 1) * w + x] != 0)
                || (0..h).any(|y| self.data[y * w] != 0 || self.data[y * w + w - 1] != 0)
        }

        pub fn to_config(&self) -> Configuration {
            let mut c = Configuration::new();
            for y in 0..self.rect.h {
                for x in 0..self.rect.w {
                    let g = self.data[y * self.rect.w + x];
                    if g != 0 {
                        c.set((self.rect.x0 + x as i64, self.rect.y0 + y as i64), g);
                    }
                }
            }
            c
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfgError {
    #[error("line {0}: expected `fungal-cfg v1 Z=<word> origin=<x>,<y> size=<w>x<h>`")]
    BadHeader(usize),
    #[error("line {line}: row has {got} cells, expected {want}")]
    RowWidth { line: usize, got: usize, want: usize },
    #[error("line {line}, column {col}: expected a digit 0-5 or '.'")]
    BadDigit { line: usize, col: usize },
    #[error("unexpected end of input: {0} rows missing")]
    MissingRows(usize),
    #[error("no configuration found")]
    Empty,
}

/// One parsed fungal-cfg document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfgDoc {
    pub scheme: Option<UpdateScheme>,
    pub rect: Rect,
    pub config: Configuration,
    /// Body lines are columns (left to right) rather than rows.
    pub column_major: bool,
}

pub fn cfg_header(scheme: Option<&UpdateScheme>, rect: Rect) -> String {
    let z = scheme.map(|z| z.to_string()).unwrap_or_else(|| "-".to_string());
    format!("fungal-cfg v1 Z={z} origin={},{} size={}x{}", rect.x0, rect.y0, rect.w, rect.h)
}

/// Rows of digits for `rect`, zeros shown as '.'.
pub fn render_rows(c: &Configuration, rect: Rect) -> String {
    let mut s = String::with_capacity((rect.w + 1) * rect.h);
    for y in rect.y0..rect.y0 + rect.h as i64 {
        for x in rect.x0..rect.x0 + rect.w as i64 {
            let g = c.get((x, y));
            s.push(if g == 0 { '.' } else { (b'0' + g) as char });
        }
        s.push('\n');
    }
    s
}

/// Serializes `c` over `rect` (default: its bounding box).
pub fn format_cfg(c: &Configuration, scheme: Option<&UpdateScheme>, rect: Option<Rect>) -> String {
    let rect = rect.or_else(|| c.bounding_box()).unwrap_or(Rect::new(0, 0, 0, 0));
    let mut s = cfg_header(scheme, rect);
    s.push('\n');
    s.push_str(&render_rows(c, rect));
    s
}

fn parse_header(line: &str, no: usize) -> Result<(Option<UpdateScheme>, Rect, bool), CfgError> {
    let bad = || CfgError::BadHeader(no);
    let mut parts = line.split_whitespace();
    if parts.next() != Some("fungal-cfg") || parts.next() != Some("v1") {
        return Err(bad());
    }
    let (mut scheme, mut origin, mut size, mut columns) = (None, None, None, false);
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(bad)?;
        match k {
            "Z" => {
                if v != "-" {
                    scheme = Some(parse_scheme(v).map_err(|_| bad())?);
                }
            }
            "origin" => {
                let (a, b) = v.split_once(',').ok_or_else(bad)?;
                origin = Some((a.parse::<i64>().map_err(|_| bad())?, b.parse::<i64>().map_err(|_| bad())?));
            }
            "size" => {
                let (a, b) = v.split_once('x').ok_or_else(bad)?;
                size = Some((a.parse::<usize>().map_err(|_| bad())?, b.parse::<usize>().map_err(|_| bad())?));
            }
            "order" => {
                columns = match v {
                    "rows" => false,
                    "columns" => true,
                    _ => return Err(bad()),
                }
            }
            _ => return Err(bad()),
        }
    }
    let (x0, y0) = origin.ok_or_else(bad)?;
    let (w, h) = size.ok_or_else(bad)?;
    Ok((scheme, Rect::new(x0, y0, w, h), columns))
}

/// Parses every document in `text`. Blank lines and `#` comments between
/// documents are skipped.
pub fn parse_cfg_all(text: &str) -> Result<Vec<CfgDoc>, CfgError> {
    let mut docs = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    while let Some((no, line)) = lines.next() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (scheme, rect, column_major) = parse_header(t, no)?;
        let (lines_n, width) = if column_major { (rect.w, rect.h) } else { (rect.h, rect.w) };
        let mut config = Configuration::new();
        for i in 0..lines_n {
            let (no, line) = lines.next().ok_or(CfgError::MissingRows(lines_n - i))?;
            let line = line.trim();
            let n = line.chars().count();
            if n != width {
                return Err(CfgError::RowWidth { line: no, got: n, want: width });
            }
            for (j, ch) in line.chars().enumerate() {
                let g = match ch {
                    '.' => 0,
                    '0'..='5' => ch as u8 - b'0',
                    _ => return Err(CfgError::BadDigit { line: no, col: j + 1 }),
                };
                let (dx, dy) = if column_major { (i, j) } else { (j, i) };
                config.set((rect.x0 + dx as i64, rect.y0 + dy as i64), g);
            }
        }
        docs.push(CfgDoc { scheme, rect, config, column_major });
    }
    Ok(docs)
}

pub fn parse_cfg(text: &str) -> Result<CfgDoc, CfgError> {
    parse_cfg_all(text)?.into_iter().next().ok_or(CfgError::Empty)
}
