mod common;

use std::sync::Arc;

use fungal::circuit::layout::LayoutOptions;
use fungal::circuit::stream::read_meta;
use fungal::circuit::*;
use fungal::grid::parse_cfg;
use fungal::parse_scheme;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn z1() -> fungal::UpdateScheme {
    parse_scheme("HVVHHHV").unwrap()
}

#[test]
fn single_nand() {
    let c = parse_netlist("in x1 x2 / g1 = NAND(x1,x2) / out g1").unwrap();
    assert!(!compile(&c, &[true, true], &z1()).unwrap().predict());
    assert!(compile(&c, &[false, true], &z1()).unwrap().predict());
}

#[test]
fn and_of_or_all_inputs() {
    let c = parse_netlist("in x1 x2 x3\ng = OR(x2,x3)\nh = AND(x1,g)\nout h").unwrap();
    let l = Arc::new(layout(&c, &z1()).unwrap());
    for bits in common::all_inputs(3) {
        let e = Embedding::new(l.clone(), &bits).unwrap();
        let want = bits[0] && (bits[1] || bits[2]);
        assert_eq!(e.predict(), want, "{bits:?}");
        let r = verify_embedding(&e, &e.configuration(), &c);
        assert!(r.pass(), "{r}");
    }
}

#[test]
fn verify_reports_pass_and_switch_order() {
    let c = parse_netlist("in a b c\ng = NAND(a,b)\nh = NAND(g,c)\nout h").unwrap();
    for bits in common::all_inputs(3) {
        let r = verify(&c, &bits, &z1()).unwrap();
        assert!(r.pass(), "{r}");
        for g in &r.gates {
            if let (Some(ctl), Some(pass)) = (g.control, g.pass) {
                assert!(ctl < pass);
            }
        }
    }
}

#[test]
fn corrupted_embedding_fails() {
    let c = parse_netlist("in a b\ng = AND(a,b)\nout g").unwrap();
    let bits = [true, true];
    let e = compile(&c, &bits, &z1()).unwrap();
    let mut cfg = e.configuration();
    // cut a rail that must fire: the middle of the first bridge of a firing source
    let l = &e.layout;
    let s = l.sources.iter().find(|s| bits[s.var] == s.fires_on).unwrap();
    let cell = l.bridges[s.bridge + 2].cells(&l.word).nth(3).unwrap().0;
    cfg.set(l.physical(cell), 0);
    let r = verify_embedding(&e, &cfg, &c);
    assert!(!r.pass());
    assert!(r.divergence.is_some(), "{r}");
    assert!(r.to_string().starts_with("FAIL"));
}

#[test]
fn stream_round_trip() {
    let c = parse_netlist("in a b c\ng = OR(a,b)\nh = NAND(g,c)\nout h").unwrap();
    for z in ["HVVHHHV", "VHHV", "VHVHH", "HHVHHVV"] {
        let z = parse_scheme(z).unwrap();
        let e = compile(&c, &[true, false, true], &z).unwrap();
        let mut out = Vec::new();
        let st = emit_stream(&e, &mut out, true).unwrap();
        let text = String::from_utf8(out).unwrap();
        let doc = parse_cfg(&text).unwrap();
        assert!(doc.column_major);
        assert_eq!(doc.rect, e.region());
        assert_eq!(doc.config, e.configuration());
        assert_eq!(st.columns, e.region().w);
        assert!(st.peak_buffered_cells <= e.region().h);
        assert_eq!(read_meta(&text, "time_bound").unwrap(), e.time_bound().to_string());
        assert_eq!(read_meta(&text, "time_unary").unwrap().len(), e.time_bound());
        let (tx, ty) = e.target();
        assert_eq!(read_meta(&text, "target").unwrap(), format!("{tx},{ty}"));
    }
}

#[test]
fn region_is_zero_outside() {
    let c = parse_netlist("in a b\ng = OR(a,b)\nout g").unwrap();
    let e = compile(&c, &[false, true], &parse_scheme("VHHV").unwrap()).unwrap();
    let cfg = e.configuration();
    let r = e.region();
    assert!(cfg.iter().all(|(p, _)| r.contains(p)));
    assert_eq!(cfg.get(e.target()), 0);
}

#[test]
fn errors() {
    let c = parse_netlist("in a b\ng = NAND(a,b)\nout g").unwrap();
    assert!(matches!(layout(&c, &parse_scheme("HHHV").unwrap()), Err(LayoutError::DegenerateScheme(_))));
    assert!(matches!(layout(&c, &parse_scheme("HHHH").unwrap()), Err(LayoutError::DegenerateScheme(_))));
    let tight = LayoutOptions { max_area: 100, ..Default::default() };
    assert!(matches!(layout_with(&c, &z1(), tight), Err(LayoutError::CircuitTooLarge(_))));
    let few = LayoutOptions { max_nodes: 2, ..Default::default() };
    assert!(matches!(layout_with(&c, &z1(), few), Err(LayoutError::CircuitTooLarge(_))));
    assert!(matches!(compile(&c, &[true], &z1()), Err(CompileError::Netlist(NetlistError::ArityMismatch { .. }))));
}

#[test]
fn budget_covers_routes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let (n, m) = (rng.gen_range(1..=4), rng.gen_range(1..=8));
        let net = common::random_netlist(&mut rng, n, m);
        let c = parse_netlist(&net).unwrap();
        let l = layout(&c, &z1()).unwrap();
        let worst = *l.route_delays().iter().max().unwrap();
        assert!(worst <= l.ledger.d, "{net}: route {worst} > D {}", l.ledger.d);
        assert_eq!(l.ledger.d, compute_budget(c.m()).d);
    }
}

/// Chains keep the formula tree linear, so area and T should grow
/// polynomially (here: at most cubically) in the gate count.
#[test]
fn chain_growth_is_polynomial() {
    let mut rows = Vec::new();
    for m in 1..=10 {
        let mut net = String::from("in x1 x2\ng1 = NAND(x1,x2)\n");
        for i in 2..=m {
            net.push_str(&format!("g{i} = NAND(g{},x{})\n", i - 1, 1 + i % 2));
        }
        net.push_str(&format!("out g{m}\n"));
        let c = parse_netlist(&net).unwrap();
        let l = layout(&c, &z1()).unwrap();
        rows.push((m as f64, l.region().area() as f64, l.time_bound() as f64));
    }
    // log-log slope between m=5 and m=10
    let slope = |a: f64, b: f64| (b / a).ln() / (10f64 / 5.0).ln();
    let (_, a5, t5) = rows[4];
    let (_, a10, t10) = rows[9];
    assert!(slope(a5, a10) < 3.0, "{rows:?}");
    assert!(slope(t5, t10) < 2.0, "{rows:?}");
}
