//! Netlist text format, lowering to NAND, and evaluation.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("line {0}: cannot parse")]
    Syntax(usize),
    #[error("line {line}: `{name}` is defined further down")]
    ForwardReference { line: usize, name: String },
    #[error("line {line}: unknown name `{name}`")]
    UnknownReference { line: usize, name: String },
    #[error("line {line}: `{name}` defined twice")]
    DuplicateName { line: usize, name: String },
    #[error("more than one `out` line")]
    MultipleOutputs,
    #[error("no `out` line")]
    MissingOutput,
    #[error("line {line}: {got} inputs, at most 2 allowed")]
    FanInExceeded { line: usize, got: usize },
    #[error("line {line}: wrong number of inputs for {kind}")]
    BadArity { line: usize, kind: String },
    #[error("line {line}: unknown gate kind `{kind}`")]
    UnknownGateKind { line: usize, kind: String },
    #[error("the output must name a gate")]
    OutputNotGate,
    #[error("expected {want} input bits, got {got}")]
    ArityMismatch { want: usize, got: usize },
}

/// Reference to a circuit input or to an earlier gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ref {
    Input(usize),
    Gate(usize),
}

/// A NAND gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub id: String,
    pub a: Ref,
    pub b: Ref,
}

/// Single-output circuit made of NAND gates only, in topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub inputs: Vec<String>,
    pub gates: Vec<Gate>,
    pub output: usize,
}

impl Circuit {
    pub fn n(&self) -> usize {
        self.inputs.len()
    }

    pub fn m(&self) -> usize {
        self.gates.len()
    }

    fn name(&self, r: Ref) -> &str {
        match r {
            Ref::Input(i) => &self.inputs[i],
            Ref::Gate(g) => &self.gates[g].id,
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "in {}", self.inputs.join(" "))?;
        for g in &self.gates {
            writeln!(f, "{} = NAND({},{})", g.id, self.name(g.a), self.name(g.b))?;
        }
        writeln!(f, "out {}", self.gates[self.output].id)
    }
}

struct Lowering {
    gates: Vec<Gate>,
}

impl Lowering {
    fn nand(&mut self, id: String, a: Ref, b: Ref) -> Ref {
        self.gates.push(Gate { id, a, b });
        Ref::Gate(self.gates.len() - 1)
    }
}

/// Parses a netlist; lines may also be separated by `/`. `#` starts a comment.
/// AND, OR and NOT are rewritten into NANDs.
pub fn parse_netlist(text: &str) -> Result<Circuit, NetlistError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| l.split('#').next().unwrap().split('/').map(move |p| (i + 1, p.trim())))
        .filter(|(_, l)| !l.is_empty())
        .collect();

    let mut declared: HashMap<String, usize> = HashMap::new();
    for (no, l) in &lines {
        if let Some((lhs, _)) = l.split_once('=') {
            declared.entry(lhs.trim().to_string()).or_insert(*no);
        }
    }

    let mut inputs: Vec<String> = Vec::new();
    let mut names: HashMap<String, Ref> = HashMap::new();
    let mut low = Lowering { gates: Vec::new() };
    let mut output = None;

    for (no, l) in lines {
        if let Some(rest) = l.strip_prefix("in ").or(if l == "in" { Some("") } else { None }) {
            for name in rest.split_whitespace() {
                if names.contains_key(name) {
                    return Err(NetlistError::DuplicateName { line: no, name: name.into() });
                }
                names.insert(name.into(), Ref::Input(inputs.len()));
                inputs.push(name.into());
            }
        } else if let Some(rest) = l.strip_prefix("out ") {
            if output.is_some() {
                return Err(NetlistError::MultipleOutputs);
            }
            let name = rest.trim();
            match names.get(name) {
                Some(Ref::Gate(g)) => output = Some(*g),
                Some(Ref::Input(_)) => return Err(NetlistError::OutputNotGate),
                None => return Err(NetlistError::UnknownReference { line: no, name: name.into() }),
            }
        } else if let Some((lhs, rhs)) = l.split_once('=') {
            let id = lhs.trim().to_string();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(NetlistError::Syntax(no));
            }
            if names.contains_key(&id) {
                return Err(NetlistError::DuplicateName { line: no, name: id });
            }
            let rhs = rhs.trim();
            let (kind, args) = rhs.split_once('(').ok_or(NetlistError::Syntax(no))?;
            let args = args.strip_suffix(')').ok_or(NetlistError::Syntax(no))?;
            let kind = kind.trim().to_ascii_uppercase();
            let args: Vec<&str> = args.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            if args.len() > 2 {
                return Err(NetlistError::FanInExceeded { line: no, got: args.len() });
            }
            let mut refs = Vec::new();
            for a in &args {
                match names.get(*a) {
                    Some(r) => refs.push(*r),
                    None if declared.contains_key(*a) => {
                        return Err(NetlistError::ForwardReference { line: no, name: a.to_string() })
                    }
                    None => return Err(NetlistError::UnknownReference { line: no, name: a.to_string() }),
                }
            }
            let arity = |n: usize| {
                if refs.len() == n {
                    Ok(())
                } else {
                    Err(NetlistError::BadArity { line: no, kind: kind.clone() })
                }
            };
            let r = match kind.as_str() {
                "NAND" => {
                    arity(2)?;
                    low.nand(id.clone(), refs[0], refs[1])
                }
                "NOT" => {
                    arity(1)?;
                    low.nand(id.clone(), refs[0], refs[0])
                }
                "AND" => {
                    arity(2)?;
                    let t = low.nand(format!("{id}.0"), refs[0], refs[1]);
                    low.nand(id.clone(), t, t)
                }
                "OR" => {
                    arity(2)?;
                    let p = low.nand(format!("{id}.0"), refs[0], refs[0]);
                    let q = low.nand(format!("{id}.1"), refs[1], refs[1]);
                    low.nand(id.clone(), p, q)
                }
                _ => return Err(NetlistError::UnknownGateKind { line: no, kind }),
            };
            names.insert(id, r);
        } else {
            return Err(NetlistError::Syntax(no));
        }
    }
    let output = output.ok_or(NetlistError::MissingOutput)?;
    Ok(Circuit { inputs, gates: low.gates, output })
}

/// Value of every gate under `bits`.
pub fn eval_gates(c: &Circuit, bits: &[bool]) -> Result<Vec<bool>, NetlistError> {
    if bits.len() != c.n() {
        return Err(NetlistError::ArityMismatch { want: c.n(), got: bits.len() });
    }
    let mut v: Vec<bool> = Vec::with_capacity(c.m());
    for g in &c.gates {
        let get = |r: Ref, v: &Vec<bool>| match r {
            Ref::Input(i) => bits[i],
            Ref::Gate(j) => v[j],
        };
        let x = !(get(g.a, &v) && get(g.b, &v));
        v.push(x);
    }
    Ok(v)
}

pub fn eval_circuit(c: &Circuit, bits: &[bool]) -> Result<bool, NetlistError> {
    Ok(eval_gates(c, bits)?[c.output])
}
