//! wasm-bindgen exports for the static demo page in `www/`. Every function
//! returns a JSON string; errors come back as a thrown string.

use serde_json::json;
use wasm_bindgen::prelude::*;

use dormant::oper_p1::vertex_table;
use dormant::radii::{check_prime_level, enum_xi2};
use dormant::tqft_count::Counter;

fn fail(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn parse_radii(text: &str) -> Result<Vec<u64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|_| format!("bad radius {s:?}")))
        .collect()
}

/// Radius representatives of (Z/p^N)^x / {±1}.
#[wasm_bindgen]
pub fn radii(p: u32, level: u32) -> Result<String, JsValue> {
    check_prime_level(p, level).map_err(fail)?;
    let reps: Vec<u64> = enum_xi2(p, level).iter().map(|r| r.rep).collect();
    Ok(json!({ "p": p, "N": level, "radii": reps }).to_string())
}

/// Admissible triples on the 3-pointed line.
#[wasm_bindgen(js_name = vertexTable)]
pub fn vertex_table_json(p: u32, level: u32) -> Result<String, JsValue> {
    let t = vertex_table(p, level).map_err(fail)?;
    serde_json::to_string(&t).map_err(fail)
}

/// Count of dormant opers of type (g, r); `radii` is comma-separated.
#[wasm_bindgen]
pub fn count(p: u32, level: u32, g: u32, r: u32, radii: &str) -> Result<String, JsValue> {
    let rho = parse_radii(radii).map_err(fail)?;
    let c = Counter::new(vertex_table(p, level).map_err(fail)?);
    let res = c.count(g, r, &rho).map_err(fail)?;
    Ok(json!({
        "count": res.count,
        "graphs_checked": res.graphs_checked,
        "per_graph": res.certificate.iter().map(|gc| gc.count).collect::<Vec<_>>(),
    })
    .to_string())
}
