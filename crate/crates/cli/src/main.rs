//! `fungal` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fungal::circuit::gates::{template, GateKind, PIN_ROWS};
use fungal::circuit::stream::read_meta;
use fungal::circuit::{emit_stream, layout, parse_netlist, verify_embedding, Embedding};
use fungal::gadgets::{build_component, overlay_with, ComponentKind};
use fungal::grid::dense::DenseGrid;
use fungal::grid::{format_cfg, parse_cfg, predict, CfgDoc, Rect, Simulator};
use fungal::lattice::{Block, Gadget, Pin, PinDir, Polarity};
use fungal::{parse_scheme, Cell, Configuration, Rule, UpdateScheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "fungal", version, about = "Fungal sandpile simulator and circuit compiler")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve a configuration.
    Simulate {
        file: PathBuf,
        /// Update scheme; defaults to the one in the file header.
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long, conflicts_with = "cycles")]
        steps: Option<usize>,
        #[arg(long)]
        cycles: Option<usize>,
        /// Write every intermediate step as its own panel.
        #[arg(long)]
        trace: bool,
        /// Use the bounding box of each result instead of the input window.
        #[arg(long)]
        fit: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw a configuration as text or as a PPM image.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
        /// Pixels per cell for PPM output.
        #[arg(long, default_value_t = 1)]
        scale: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a component and print its manifest and overlay.
    Gadget {
        #[arg(value_enum)]
        kind: GadgetName,
        #[arg(long)]
        scheme: String,
        #[arg(long, value_enum, default_value_t = Pol::Pos)]
        polarity: Pol,
        /// Retarder side length.
        #[arg(long, default_value_t = 24)]
        side: usize,
        /// Retarder delay in cycles.
        #[arg(long, default_value_t = 24)]
        delay: usize,
        /// Coordinator length in bridges.
        #[arg(long, default_value_t = 4)]
        bridges: usize,
        /// Pins to raise to a signal in the overlay.
        #[arg(long)]
        fire: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile a netlist for one input vector and stream the embedding.
    Compile {
        netlist: PathBuf,
        #[arg(long)]
        scheme: String,
        /// Input bits, first input first, e.g. `101`.
        #[arg(long)]
        inputs: String,
        /// Also write the time bound in unary.
        #[arg(long)]
        unary: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Answer the prediction query: does the target become non-zero?
    Predict {
        file: PathBuf,
        #[arg(long)]
        scheme: Option<String>,
        /// Target cell `x,y`; defaults to the embedding header.
        #[arg(long)]
        target: Option<String>,
        /// Step budget; defaults to the embedding header.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Compile, simulate and compare against direct evaluation.
    Verify {
        netlist: PathBuf,
        #[arg(long)]
        scheme: String,
        /// Input bits; all vectors when omitted.
        #[arg(long)]
        inputs: Option<String>,
        /// Print the per-gate timing trace for every vector.
        #[arg(long)]
        trace: bool,
    },
    /// Compare the sparse simulator with the dense reference.
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        size: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Pattern::Random)]
        pattern: Pattern,
        /// Apply the wrong axis in the sparse run at step 1 (negative control).
        #[arg(long)]
        inject_fault: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Ppm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pol {
    Pos,
    Neg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pattern {
    Random,
    /// Every cell holds 5.
    Five,
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetName {
    Duplicator,
    Merge,
    Crossing,
    Switch,
    Diode,
    CompactDiode,
    Retarder,
    Coordinator,
    OrGate,
    AndGate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(path: Option<&Path>, data: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, data).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(data).context("writing stdout"),
    }
}

fn scheme_arg(s: &str) -> Result<UpdateScheme> {
    parse_scheme(s).map_err(|e| anyhow!("bad scheme `{s}`: {e}"))
}

fn pick_scheme(flag: Option<&str>, doc: &CfgDoc) -> Result<UpdateScheme> {
    match (flag, &doc.scheme) {
        (Some(s), _) => scheme_arg(s),
        (None, Some(z)) => Ok(z.clone()),
        (None, None) => bail!("no scheme in file header; pass --scheme"),
    }
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(anyhow!("input bits must be 0 or 1, got `{c}`")),
        })
        .collect()
}

fn parse_cell(s: &str) -> Result<Cell> {
    let (x, y) = s.split_once(',').ok_or_else(|| anyhow!("cell must be `x,y`"))?;
    Ok((x.trim().parse()?, y.trim().parse()?))
}

fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Simulate { file, scheme, steps, cycles, trace, fit, output } => {
            let doc = parse_cfg(&read(&file)?)?;
            let z = pick_scheme(scheme.as_deref(), &doc)?;
            let n = match (steps, cycles) {
                (Some(s), _) => s,
                (None, Some(c)) => c * z.k(),
                (None, None) => bail!("give --steps or --cycles"),
            };
            let window = |c: &Configuration| if fit { c.bounding_box() } else { Some(doc.rect) };
            let mut out = String::new();
            let mut sim = Simulator::from_config(doc.config.clone());
            if trace {
                out.push_str("# t=0\n");
                out.push_str(&format_cfg(&doc.config, Some(&z), window(&doc.config)));
            }
            for t in 1..=n {
                sim.run(&z, 1);
                if trace {
                    let c = sim.config();
                    out.push_str(&format!("# t={t}\n"));
                    out.push_str(&format_cfg(&c, Some(&z), window(&c)));
                }
            }
            if !trace {
                let c = sim.into_config();
                out = format_cfg(&c, Some(&z), window(&c));
            }
            write_out(output.as_deref(), out.as_bytes())?;
            Ok(true)
        }
        Cmd::Render { file, format, scale, output } => {
            let doc = parse_cfg(&read(&file)?)?;
            let data = match format {
                Format::Ascii => format_cfg(&doc.config, doc.scheme.as_ref(), Some(doc.rect)).into_bytes(),
                Format::Ppm => ppm(&doc.config, doc.rect, scale.max(1)),
            };
            write_out(output.as_deref(), &data)?;
            Ok(true)
        }
        Cmd::Gadget { kind, scheme, polarity, side, delay, bridges, fire, output } => {
            let z = scheme_arg(&scheme)?;
            let pol = match polarity {
                Pol::Pos => Polarity::Pos,
                Pol::Neg => Polarity::Neg,
            };
            let g = build_gadget(kind, pol, side, delay, bridges, &z)?;
            let fired: Vec<&str> = fire.iter().map(String::as_str).collect();
            let cfg = overlay_with(&g, &fired, &z)?;
            let mut out = format!("# delay={}\n# bridges={}\n", g.delay, g.bridges.len());
            for (name, p) in &g.pins {
                let (x, y) = p.cell(&z);
                out.push_str(&format!(
                    "# pin {name} {} {} block={},{} cell={x},{y}\n",
                    p.dir, p.polarity, p.block.a, p.block.b
                ));
            }
            out.push_str(&format_cfg(&cfg, Some(&z), None));
            write_out(output.as_deref(), out.as_bytes())?;
            Ok(true)
        }
        Cmd::Compile { netlist, scheme, inputs, unary, output } => {
            let c = parse_netlist(&read(&netlist)?)?;
            let z = scheme_arg(&scheme)?;
            let bits = parse_bits(&inputs)?;
            let l = Arc::new(layout(&c, &z)?);
            let e = Embedding::new(l, &bits)?;
            let mut buf = Vec::new();
            emit_stream(&e, &mut buf, unary)?;
            write_out(output.as_deref(), &buf)?;
            Ok(true)
        }
        Cmd::Predict { file, scheme, target, steps } => {
            let text = read(&file)?;
            let doc = parse_cfg(&text)?;
            let z = pick_scheme(scheme.as_deref(), &doc)?;
            let target = match target.or_else(|| read_meta(&text, "target")) {
                Some(t) => parse_cell(&t)?,
                None => bail!("no target; pass --target"),
            };
            let steps = match steps {
                Some(s) => s,
                None => read_meta(&text, "steps").ok_or_else(|| anyhow!("no step budget; pass --steps"))?.parse()?,
            };
            println!("{}", u8::from(predict(&doc.config, target, steps, &z)));
            Ok(true)
        }
        Cmd::Verify { netlist, scheme, inputs, trace } => {
            let c = parse_netlist(&read(&netlist)?)?;
            let z = scheme_arg(&scheme)?;
            let vectors: Vec<Vec<bool>> = match inputs {
                Some(s) => vec![parse_bits(&s)?],
                None => (0..1u64 << c.n()).map(|m| (0..c.n()).map(|i| m >> i & 1 == 1).collect()).collect(),
            };
            let l = Arc::new(layout(&c, &z)?);
            let mut all = true;
            for bits in vectors {
                let e = Embedding::new(l.clone(), &bits)?;
                let r = verify_embedding(&e, &e.configuration(), &c);
                let tag: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                if trace || !r.pass() {
                    print!("inputs {tag}\n{r}");
                } else {
                    println!("inputs {tag}: PASS (output {})", u8::from(r.predicted));
                }
                all &= r.pass();
            }
            println!("{}", if all { "PASS" } else { "FAIL" });
            Ok(all)
        }
        Cmd::OracleCheck { seed, trials, size, steps, pattern, inject_fault } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for trial in 0..trials {
                let z = random_word(&mut rng);
                let mut c = Configuration::new();
                for y in 0..size as i64 {
                    for x in 0..size as i64 {
                        let g = match pattern {
                            Pattern::Random => rng.gen_range(0..=5),
                            Pattern::Five => 5,
                        };
                        c.set((x, y), g);
                    }
                }
                if let Some((t, cell)) = oracle_divergence(&c, &z, steps, inject_fault) {
                    println!("FAIL trial {trial} scheme {z}: first divergence at step {t}, cell ({},{})", cell.0, cell.1);
                    return Ok(false);
                }
            }
            println!("PASS {trials} trials, {size}x{size}, {steps} steps");
            Ok(true)
        }
    }
}

fn random_word(rng: &mut ChaCha8Rng) -> UpdateScheme {
    let k = rng.gen_range(2..=12);
    let mut w: Vec<Rule> = (0..k).map(|_| if rng.gen_bool(0.5) { Rule::H } else { Rule::V }).collect();
    w[0] = Rule::H;
    w[k - 1] = Rule::V;
    UpdateScheme::from_rules(w).expect("non-empty word")
}

/// First step and cell where the sparse run leaves the dense one.
fn oracle_divergence(c: &Configuration, z: &UpdateScheme, steps: usize, fault: bool) -> Option<(usize, Cell)> {
    let mut dense = DenseGrid::from_config(c, steps + 1);
    let mut sparse = Simulator::from_config(c.clone());
    for t in 1..=steps {
        let r = z.rule_at(t - 1);
        dense.step(r);
        sparse.apply(if fault && t == 1 { r.swap() } else { r });
        let (a, b) = (dense.to_config(), sparse.config());
        if a != b {
            let cell = a.iter().chain(b.iter()).map(|(p, _)| p).filter(|&p| a.get(p) != b.get(p)).min().unwrap();
            return Some((t, cell));
        }
    }
    None
}

const PALETTE: [[u8; 3]; 6] =
    [[255, 255, 255], [200, 215, 235], [120, 150, 200], [40, 60, 120], [250, 150, 30], [215, 25, 30]];

fn ppm(c: &Configuration, r: Rect, scale: usize) -> Vec<u8> {
    let (w, h) = (r.w * scale, r.h * scale);
    let mut out = format!("P3\n{w} {h}\n255\n");
    for py in 0..h {
        let row: Vec<String> = (0..w)
            .map(|px| {
                let g = c.get((r.x0 + (px / scale) as i64, r.y0 + (py / scale) as i64));
                let [cr, cg, cb] = PALETTE[g as usize];
                format!("{cr} {cg} {cb}")
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

fn build_gadget(kind: GadgetName, pol: Polarity, side: usize, delay: usize, bridges: usize, z: &UpdateScheme) -> Result<Gadget> {
    let ck = match kind {
        GadgetName::Duplicator => ComponentKind::Duplicator,
        GadgetName::Merge => ComponentKind::Merge,
        GadgetName::Crossing => ComponentKind::Crossing,
        GadgetName::Switch => ComponentKind::Switch,
        GadgetName::Diode => ComponentKind::Diode,
        GadgetName::CompactDiode => ComponentKind::CompactDiode,
        GadgetName::Retarder => ComponentKind::Retarder { side, delay },
        GadgetName::Coordinator => ComponentKind::Coordinator { bridges },
        GadgetName::OrGate => return Ok(gate_gadget(GateKind::Or, z)),
        GadgetName::AndGate => return Ok(gate_gadget(GateKind::And, z)),
    };
    Ok(build_component(ck, pol, Block::new(0, 0), z)?.gadget)
}

fn gate_gadget(kind: GateKind, z: &UpdateScheme) -> Gadget {
    let t = template(kind, z.k());
    let mut g = Gadget::empty();
    g.bridges = t.bridges.clone();
    g.delay = fungal::circuit::gates::GATE_DELAY;
    for (slot, name) in ["a_top", "a_bottom", "b_top", "b_bottom"].iter().enumerate() {
        if let Some(b) = t.inputs[slot] {
            debug_assert_eq!(b.b, PIN_ROWS[slot]);
            let pol = if slot % 2 == 0 { Polarity::Neg } else { Polarity::Pos };
            g.pins.insert(name.to_string(), Pin::new(b, pol, PinDir::In));
        }
    }
    g.pins.insert("top".into(), Pin::new(t.top_out, Polarity::Neg, PinDir::Out));
    g.pins.insert("bottom".into(), Pin::new(t.bottom_out, Polarity::Pos, PinDir::Out));
    g
}
