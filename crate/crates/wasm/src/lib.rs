//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string. The `*_json` functions hold the logic
//! and are plain Rust so they can be tested natively.

use powermap::arith::{coprime_part, powmod};
use powermap::cycles::{average_cycle_length, cycle_count, PowerMapInstance};
use powermap::rational::{to_f64, Rational};
use powermap::stats::{self, SweepConfig};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest p drawn as a graph.
pub const GRAPH_CAP: u32 = 2000;
/// Largest x accepted by the in-browser sweep.
pub const SWEEP_CAP: f64 = 200_000.0;

fn frac(r: &Rational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string(), "approx": to_f64(r) })
}

pub fn cycle_report_json(e: u32, p: u32, k: u32) -> Result<String, String> {
    let inst = PowerMapInstance::new(e.into(), p.into(), k).map_err(|e| e.to_string())?;
    let report = cycle_count(&inst).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = report
        .contributions
        .iter()
        .map(|c| json!({ "d": c.d, "phi": c.phi_d, "ord": c.ord_d, "ratio": frac(&c.ratio) }))
        .collect();
    let mut out = json!({
        "e": e,
        "q": inst.n + 1,
        "q_minus_1": inst.n_fact.to_string(),
        "rho": report.rho,
        "rows": rows,
        "n_cycles": report.n_cycles,
    });
    if k == 1 {
        let c = average_cycle_length(&inst).map_err(|e| e.to_string())?;
        out["average"] = json!({ "value": frac(&c.value), "lower": frac(&c.lower), "upper": c.upper });
    }
    Ok(out.to_string())
}

/// Nodes 1..p-1 of x -> x^e mod p. A node is periodic iff x^rho = 1.
pub fn functional_graph_json(e: u32, p: u32) -> Result<String, String> {
    if p > GRAPH_CAP {
        return Err(format!("p = {p} exceeds the graph cap {GRAPH_CAP}"));
    }
    let inst = PowerMapInstance::prime_field(e.into(), p.into()).map_err(|e| e.to_string())?;
    let (e, p) = (u64::from(e), u64::from(p));
    let rho = coprime_part(p - 1, e);
    let nodes: Vec<Value> = (1..p)
        .map(|x| json!({ "x": x, "next": powmod(x, e, p), "periodic": powmod(x, rho, p) == 1 }))
        .collect();
    let n_cycles = cycle_count(&inst).map_err(|e| e.to_string())?.n_cycles;
    Ok(json!({ "e": e, "p": p, "n_cycles": n_cycles, "nodes": nodes }).to_string())
}

pub fn sweep_histogram_json(e: u32, x: f64, width: f64) -> Result<String, String> {
    if !(x <= SWEEP_CAP) {
        return Err(format!("x = {x} exceeds the in-browser cap {SWEEP_CAP}"));
    }
    let cfg = SweepConfig { workers: 1, ..SweepConfig::new(e.into(), x) };
    let sweep = stats::sweep(&cfg).map_err(|e| e.to_string())?;
    let hist = stats::exponent_table(&sweep.rows, width).map_err(|e| e.to_string())?;
    let buckets: Vec<Value> = hist
        .ranges()
        .map(|(lo, hi, n)| json!({ "lo": lo, "hi": hi, "count": n }))
        .collect();
    let s = &sweep.summary;
    Ok(json!({
        "e": e,
        "x": x,
        "count": s.count,
        "mean": s.mean,
        "benchmark": s.mean_vs_benchmark.1,
        "max": { "p": s.max_row.p, "n": s.max_row.n_cycles, "exponent": s.max_row.exponent },
        "buckets": buckets,
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|m| JsError::new(&m))
}

#[wasm_bindgen(js_name = cycleReport)]
pub fn cycle_report(e: u32, p: u32, k: u32) -> Result<String, JsError> {
    js(cycle_report_json(e, p, k))
}

#[wasm_bindgen(js_name = functionalGraph)]
pub fn functional_graph(e: u32, p: u32) -> Result<String, JsError> {
    js(functional_graph_json(e, p))
}

#[wasm_bindgen(js_name = sweepHistogram)]
pub fn sweep_histogram(e: u32, x: f64, width: f64) -> Result<String, JsError> {
    js(sweep_histogram_json(e, x, width))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn report_for_31() {
        let v = parse(cycle_report_json(2, 31, 1).unwrap());
        assert_eq!(v["n_cycles"], 5);
        assert_eq!(v["rho"], 15);
        assert_eq!(v["q_minus_1"], "2 * 3 * 5");
        assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn report_average() {
        let v = parse(cycle_report_json(2, 7, 1).unwrap());
        assert_eq!(v["average"]["value"]["num"], "5");
        assert_eq!(v["average"]["value"]["den"], "3");
        assert!(parse(cycle_report_json(2, 3, 4).unwrap()).get("average").is_none());
    }

    #[test]
    fn report_rejects_composite() {
        assert!(cycle_report_json(2, 9, 1).is_err());
    }

    #[test]
    fn graph_cycles_match_count() {
        for (e, p) in [(2, 7), (2, 31), (3, 7), (3, 101), (10, 1999)] {
            let v = parse(functional_graph_json(e, p).unwrap());
            let nodes = v["nodes"].as_array().unwrap();
            assert_eq!(nodes.len() as u32, p - 1);
            // periodic nodes are closed under the map and form n_cycles cycles
            let next = |x: u64| nodes[x as usize - 1]["next"].as_u64().unwrap();
            let periodic = |x: u64| nodes[x as usize - 1]["periodic"].as_bool().unwrap();
            let mut seen = vec![false; p as usize];
            let mut cycles = 0;
            for x in 1..u64::from(p) {
                if !periodic(x) || seen[x as usize] {
                    continue;
                }
                cycles += 1;
                let mut y = x;
                while !seen[y as usize] {
                    seen[y as usize] = true;
                    y = next(y);
                    assert!(periodic(y));
                }
                assert_eq!(y, x);
            }
            assert_eq!(v["n_cycles"], cycles);
        }
    }

    #[test]
    fn graph_cap() {
        assert!(functional_graph_json(2, 2003).is_err());
    }

    #[test]
    fn histogram_totals() {
        let v = parse(sweep_histogram_json(2, 10_000.0, 0.1).unwrap());
        let total: u64 = v["buckets"].as_array().unwrap().iter().map(|b| b["count"].as_u64().unwrap()).sum();
        assert_eq!(total, 1229);
        assert_eq!(v["count"], 1229);
        assert!(sweep_histogram_json(2, 1e6, 0.1).is_err());
        assert!(sweep_histogram_json(2, 1e3, 0.0).is_err());
    }
}
