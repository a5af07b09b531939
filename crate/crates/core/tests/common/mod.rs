#![allow(dead_code)]

use std::collections::BTreeMap;

use fungal::gadgets::{
    compact_diode, coordinator, crossing, diode, duplicator, first_quiet_step, merge, retarder, retarder_capacity,
    simulate_component, switch,
};
use fungal::grid::dense::DenseGrid;
use fungal::grid::{run_cycles, Simulator};
use fungal::lattice::{closure, make_bridge, Block, BridgeKind, Polarity};
use fungal::scheme::{Rule, UpdateScheme};
use fungal::{Cell, Configuration};
use rand::Rng;

/// Random normal (H…V), primitive scheme with both counts at least 2.
pub fn random_scheme<R: Rng>(rng: &mut R, kmax: usize) -> UpdateScheme {
    loop {
        let k = rng.gen_range(4..=kmax);
        let w: Vec<Rule> = (0..k).map(|_| if rng.gen_bool(0.5) { Rule::H } else { Rule::V }).collect();
        let z = UpdateScheme::from_rules(w).unwrap();
        if z.is_normal() && z.h() >= 2 && z.v() >= 2 && z.is_primitive() {
            return z;
        }
    }
}

/// Random netlist text with `n` inputs and `m` gates over NAND/AND/OR/NOT;
/// the last gate is the output.
pub fn random_netlist<R: Rng>(rng: &mut R, n: usize, m: usize) -> String {
    let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut s = format!("in {}\n", names.join(" "));
    for g in 1..=m {
        let a = names[rng.gen_range(0..names.len())].clone();
        let b = names[rng.gen_range(0..names.len())].clone();
        let line = match rng.gen_range(0..7) {
            0 => format!("NOT({a})"),
            1 => format!("AND({a},{b})"),
            2 => format!("OR({a},{b})"),
            _ => format!("NAND({a},{b})"),
        };
        s.push_str(&format!("g{g} = {line}\n"));
        names.push(format!("g{g}"));
    }
    s.push_str(&format!("out g{m}\n"));
    s
}

pub fn all_inputs(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u32 << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

/// Any word containing both symbols, length `2..=kmax`.
pub fn random_word<R: Rng>(rng: &mut R, kmax: usize) -> UpdateScheme {
    loop {
        let k = rng.gen_range(2..=kmax);
        let w: Vec<Rule> = (0..k).map(|_| if rng.gen_bool(0.5) { Rule::H } else { Rule::V }).collect();
        let z = UpdateScheme::from_rules(w).unwrap();
        if z.h() > 0 && z.v() > 0 {
            return z;
        }
    }
}

/// Any word whose normalized primitive root has `h, v >= 2`, i.e. one the
/// compiler accepts.
pub fn random_compilable<R: Rng>(rng: &mut R, kmax: usize) -> UpdateScheme {
    loop {
        let z = random_word(rng, kmax);
        let r = z.primitive_root();
        if r.h() >= 2 && r.v() >= 2 {
            return z;
        }
    }
}

pub fn random_config<R: Rng>(rng: &mut R, w: usize, h: usize) -> Configuration {
    let mut c = Configuration::new();
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            c.set((x, y), rng.gen_range(0..=5));
        }
    }
    c
}

/// Random configuration whose signals all sit on rows of one parity.
pub fn random_vpp_config<R: Rng>(rng: &mut R, w: usize, h: usize) -> Configuration {
    let parity = rng.gen_range(0..2);
    let mut c = Configuration::new();
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let g = if y % 2 == parity { rng.gen_range(0..=5) } else { rng.gen_range(0..=3) };
            c.set((x, y), g);
        }
    }
    c
}

pub fn check_conservation(c: &Configuration, z: &UpdateScheme, steps: usize) -> Result<(), String> {
    let total = c.total_grains();
    let mut sim = Simulator::from_config(c.clone());
    for t in 0..steps {
        sim.apply(z.rule_at(t));
        let now = sim.config().total_grains();
        if now != total {
            return Err(format!("step {}: {total} grains became {now}", t + 1));
        }
    }
    Ok(())
}

pub fn check_vpp(c: &Configuration, z: &UpdateScheme, steps: usize) -> Result<(), String> {
    if !c.has_vpp() {
        return Ok(());
    }
    let mut sim = Simulator::from_config(c.clone());
    for t in 0..steps {
        sim.apply(z.rule_at(t));
        if !sim.config().has_vpp() {
            return Err(format!("vpp lost at step {}", t + 1));
        }
    }
    Ok(())
}

/// A cell can only change once some initially non-zero cell lies within the
/// horizontal and vertical reach of the rules applied so far.
pub fn check_locality(c: &Configuration, z: &UpdateScheme, steps: usize) -> Result<(), String> {
    let seeds: Vec<Cell> = c.iter().map(|(p, _)| p).collect();
    let mut sim = Simulator::from_config(c.clone());
    let (mut nh, mut nv) = (0i64, 0i64);
    for t in 0..steps {
        let rule = z.rule_at(t);
        match rule {
            Rule::H => nh += 1,
            Rule::V => nv += 1,
        }
        sim.apply(rule);
        let now = sim.config();
        for (x, y) in c.iter().chain(now.iter()).map(|(p, _)| p) {
            if now.get((x, y)) == c.get((x, y)) {
                continue;
            }
            if !seeds.iter().any(|&(sx, sy)| (x - sx).abs() <= nh && (y - sy).abs() <= nv) {
                return Err(format!("cell ({x},{y}) changed at step {} outside reach", t + 1));
            }
        }
    }
    Ok(())
}

/// Sparse simulator against the dense reference, compared after every step.
pub fn check_dense(c: &Configuration, z: &UpdateScheme, steps: usize) -> Result<(), String> {
    let mut dense = DenseGrid::from_config(c, steps + 1);
    let mut sim = Simulator::from_config(c.clone());
    for t in 0..steps {
        dense.step(z.rule_at(t));
        sim.apply(z.rule_at(t));
        if dense.to_config() != sim.config() {
            return Err(format!("diverged at step {}", t + 1));
        }
    }
    Ok(())
}

/// A source bridge from block (0,0) towards `(alpha, beta)` with junk of at
/// most 3 grains on the rest of the closure; `flank` also fills the four
/// blocks beside the path.
pub fn junk_bridge<R: Rng>(rng: &mut R, z: &UpdateScheme, flank: bool) -> (Configuration, Cell) {
    let alpha = if rng.gen_bool(0.5) { 1 } else { -1 };
    let beta = if rng.gen_bool(0.5) { 1 } else { -1 };
    let pol = if rng.gen_bool(0.5) { Polarity::Pos } else { Polarity::Neg };
    let b1 = Block::new(0, 0);
    let t = make_bridge(b1, Block::new(alpha, beta), pol, BridgeKind::Source, z).unwrap();
    let mut junk_cells = closure(b1, z);
    if flank {
        for (da, db) in [(alpha, 0), (0, beta), (alpha, -beta), (-alpha, beta)] {
            junk_cells.extend(closure(Block::new(da, db), z));
        }
    }
    let mut c = Configuration::new();
    for p in junk_cells {
        c.set(p, rng.gen_range(0..=3));
    }
    for (p, g) in t.overlay.iter() {
        c.set(p, g);
    }
    (c, t.path.last())
}

pub fn check_junk_bridge(c: &Configuration, target: Cell, z: &UpdateScheme) -> Result<(), String> {
    let after = run_cycles(c, z, 1);
    if after.get(target) != 4 {
        return Err(format!("P(k)={target:?} holds {} after one cycle", after.get(target)));
    }
    Ok(())
}

fn stim(list: &[(&str, usize)]) -> BTreeMap<String, usize> {
    list.iter().map(|(n, c)| (n.to_string(), *c)).collect()
}

fn expect(what: &str, got: Option<usize>, want: Option<usize>) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

pub fn check_duplicator(z: &UpdateScheme) -> Result<(), String> {
    for pol in [Polarity::Pos, Polarity::Neg] {
        let t = simulate_component(&duplicator(pol), &stim(&[("in", 0)]), z, 3).map_err(|e| e.to_string())?;
        expect(&format!("duplicator {pol} top"), t.at("out_top"), Some(1))?;
        expect(&format!("duplicator {pol} bottom"), t.at("out_bottom"), Some(1))?;
    }
    Ok(())
}

pub fn check_merge(z: &UpdateScheme) -> Result<(), String> {
    for pol in [Polarity::Pos, Polarity::Neg] {
        for input in ["in_top", "in_bottom"] {
            let t = simulate_component(&merge(pol), &stim(&[(input, 0)]), z, 3).map_err(|e| e.to_string())?;
            expect(&format!("merge {pol} from {input}"), t.at("out"), Some(1))?;
        }
    }
    Ok(())
}

/// The opposite output must never hold a signal at a cycle boundary within
/// `2k` cycles. Returns how many runs showed it for a single mid-cycle step.
pub fn check_crossing(z: &UpdateScheme) -> Result<usize, String> {
    let horizon = 2 * z.k();
    let mut transients = 0;
    for pol in [Polarity::Pos, Polarity::Neg] {
        let g = crossing(pol);
        for (input, out, other) in [("in_pos", "out_pos", "out_neg"), ("in_neg", "out_neg", "out_pos")] {
            let t = simulate_component(&g, &stim(&[(input, 0)]), z, horizon).map_err(|e| e.to_string())?;
            expect(&format!("crossing {pol} {input}->{out}"), t.at(out), Some(2))?;
            expect(&format!("crossing {pol} {input} leak to {other}"), t.at(other), None)?;
            transients += usize::from(t.ever(other).is_some());
        }
    }
    Ok(transients)
}

pub fn check_switch(z: &UpdateScheme) -> Result<(), String> {
    for pol in [Polarity::Pos, Polarity::Neg] {
        let g = switch(pol, z.k());
        let off = simulate_component(&g, &stim(&[("pass", 0)]), z, 4).map_err(|e| e.to_string())?;
        expect(&format!("switch {pol} off"), off.ever("out"), None)?;
        if off.residue != 0 {
            return Err(format!("switch {pol} off leaves {} signals", off.residue));
        }
        let on = simulate_component(&g, &stim(&[("control", 0), ("pass", 1)]), z, 5).map_err(|e| e.to_string())?;
        expect(&format!("switch {pol} on"), on.at("out"), Some(3))?;
    }
    Ok(())
}

pub fn check_diodes(z: &UpdateScheme) -> Result<(), String> {
    for pol in [Polarity::Pos, Polarity::Neg] {
        for (name, g) in [("diode", diode(pol, z.k())), ("compact diode", compact_diode(pol, z.k()))] {
            let horizon = g.delay + 4;
            let fwd = simulate_component(&g, &stim(&[("in", 0)]), z, horizon).map_err(|e| e.to_string())?;
            expect(&format!("{name} {pol} forward"), fwd.at("out"), Some(g.delay))?;
            let back = simulate_component(&g, &stim(&[("out", 0)]), z, horizon).map_err(|e| e.to_string())?;
            expect(&format!("{name} {pol} backward"), back.ever("in"), None)?;
        }
    }
    Ok(())
}

/// Every feasible delay at side `side`.
pub fn check_retarder(z: &UpdateScheme, side: usize) -> Result<(), String> {
    for d in (side..=retarder_capacity(side)).step_by(2) {
        let g = retarder(Polarity::Pos, side, d).map_err(|e| e.to_string())?;
        let t = simulate_component(&g, &stim(&[("in", 0)]), z, d + 2).map_err(|e| e.to_string())?;
        expect(&format!("retarder L={side} d={d}"), t.at("out"), Some(d))?;
    }
    Ok(())
}

/// Proper shifts drain an `m`-bridge coordinator within `k*m` steps while
/// `z` itself carries the signal through all `m` cycles.
pub fn check_coordinator(z: &UpdateScheme, m: usize) -> Result<(), String> {
    let g = coordinator(Polarity::Pos, m);
    let c = g.overlay(z);
    for w in z.shifted_cycles().map_err(|e| e.to_string())? {
        if first_quiet_step(&c, &w, z.k() * m).is_none() {
            return Err(format!("shift {w} still carries a signal after {} steps", z.k() * m));
        }
    }
    let mut sim = Simulator::from_config(c);
    for i in 1..=m {
        sim.run(z, z.k());
        if sim.firing().is_empty() {
            return Err(format!("signal lost under {z} in cycle {i}"));
        }
    }
    if sim.get(g.pin("out").cell(z)) < 4 {
        return Err("signal did not reach the end of the wire".into());
    }
    Ok(())
}
