//! Simulation-backed checking of an embedding against the circuit.

use std::fmt;

use crate::grid::{Cell, Configuration, Simulator};
use crate::scheme::UpdateScheme;

use super::gates::GateKind;
use super::netlist::{eval_circuit, Circuit};
use super::{compile, CompileError, Embedding};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateTrace {
    pub node: usize,
    pub circuit_gate: Option<(usize, bool)>,
    pub kind: GateKind,
    pub level: usize,
    pub value: bool,
    pub expected_cycle: usize,
    pub top: Option<usize>,
    pub bottom: Option<usize>,
    pub control: Option<usize>,
    pub pass: Option<usize>,
}

impl GateTrace {
    /// The switch fires its pass rail before its control rail arrived.
    pub fn switch_violation(&self) -> bool {
        match (self.control, self.pass) {
            (Some(c), Some(p)) => c >= p,
            _ => false,
        }
    }

    fn divergence(&self) -> Option<usize> {
        let (want, other) = if self.value { (self.top, self.bottom) } else { (self.bottom, self.top) };
        let mut d = None;
        if want != Some(self.expected_cycle) {
            d = Some(want.map_or(self.expected_cycle, |w| w.min(self.expected_cycle)));
        }
        if let Some(o) = other {
            d = Some(d.map_or(o, |x: usize| x.min(o)));
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub expected: bool,
    pub predicted: bool,
    pub time_bound: usize,
    pub steps: usize,
    pub gates: Vec<GateTrace>,
    /// Node ids of gates whose switch ordering failed.
    pub switch_violations: Vec<usize>,
    /// First cycle at which a gate output deviated from its schedule.
    pub divergence: Option<usize>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.expected == self.predicted && self.switch_violations.is_empty() && self.divergence.is_none()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: expected {} predicted {} (T={} cycles, {} steps)",
            if self.pass() { "PASS" } else { "FAIL" },
            u8::from(self.expected),
            u8::from(self.predicted),
            self.time_bound,
            self.steps
        )?;
        let show = |o: Option<usize>| o.map_or("-".to_string(), |c| c.to_string());
        writeln!(f, "node  gate   kind lvl val  due  top  bot  ctl  pass")?;
        for g in &self.gates {
            let src = g.circuit_gate.map_or("-".into(), |(i, neg)| format!("{}{}", if neg { "!" } else { "" }, i));
            writeln!(
                f,
                "{:>4} {:>5} {:>5} {:>3} {:>3} {:>4} {:>4} {:>4} {:>4} {:>5}{}",
                g.node,
                src,
                format!("{:?}", g.kind),
                g.level,
                u8::from(g.value),
                g.expected_cycle,
                show(g.top),
                show(g.bottom),
                show(g.control),
                show(g.pass),
                if g.switch_violation() { "  switch order violated" } else { "" }
            )?;
        }
        if let Some(d) = self.divergence {
            writeln!(f, "first divergence at cycle {d}")?;
        }
        Ok(())
    }
}

/// Runs `config` (normally `e.configuration()`) and checks every gate
/// against its schedule. The expected output comes from `circuit`.
pub fn verify_embedding(e: &Embedding, config: &Configuration, circuit: &Circuit) -> VerifyReport {
    let l = &e.layout;
    let expected = eval_circuit(circuit, &e.bits).expect("arity checked by Embedding");
    let values = l.formula.eval(&e.bits);
    let z: &UpdateScheme = &l.scheme;
    let k = l.word.k();
    let t = e.time_bound();
    let target = e.target();

    let watch: Vec<[Cell; 4]> =
        l.gates.iter().map(|g| [g.top_out, g.bottom_out, g.control, g.pass].map(|c| l.physical(c))).collect();
    let mut seen: Vec<[Option<usize>; 4]> = vec![[None; 4]; watch.len()];

    let mut sim = Simulator::from_config(config.clone());
    let mut predicted = sim.get(target) != 0;
    let run = |sim: &mut Simulator, n: usize, predicted: &mut bool| {
        for _ in 0..n {
            sim.run(z, 1);
            *predicted |= sim.get(target) != 0;
        }
    };
    run(&mut sim, l.wait_steps, &mut predicted);
    for cycle in 0..=t {
        for (w, s) in watch.iter().zip(seen.iter_mut()) {
            for i in 0..4 {
                if s[i].is_none() && sim.get(w[i]) >= 4 {
                    s[i] = Some(cycle);
                }
            }
        }
        if cycle < t {
            run(&mut sim, k, &mut predicted);
        }
    }

    let gates: Vec<GateTrace> = l
        .gates
        .iter()
        .zip(&seen)
        .map(|(g, s)| GateTrace {
            node: g.node,
            circuit_gate: g.circuit_gate,
            kind: g.kind,
            level: g.level,
            value: values[g.node],
            expected_cycle: g.t_out,
            top: s[0],
            bottom: s[1],
            control: s[2],
            pass: s[3],
        })
        .collect();
    let switch_violations = gates.iter().filter(|g| g.switch_violation()).map(|g| g.node).collect();
    let divergence = gates.iter().filter_map(|g| g.divergence()).min();
    VerifyReport { expected, predicted, time_bound: t, steps: e.steps(), gates, switch_violations, divergence }
}

pub fn verify(c: &Circuit, bits: &[bool], z: &UpdateScheme) -> Result<VerifyReport, CompileError> {
    let e = compile(c, bits, z)?;
    Ok(verify_embedding(&e, &e.configuration(), c))
}
