//! JSON rendering of run reports. Rationals are written as `"p/q"` strings.

use crate::graph::Instance;
use crate::rational::{to_pq, Cost};
use crate::solver::{certify_ratio, RunReport};
use crate::stp::write_stp;
use num_traits::Zero;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

pub fn instance_digest(inst: &Instance) -> String {
    hex::encode(Sha256::digest(write_stp(inst, None).as_bytes()))
}

fn pq(c: &Cost) -> Value {
    Value::String(to_pq(c))
}

fn opt_pq(c: &Option<Cost>) -> Value {
    c.as_ref().map_or(Value::Null, pq)
}

pub fn report_value(report: &RunReport) -> Value {
    let iterations: Vec<Value> = report
        .iterations
        .iter()
        .map(|it| {
            json!({
                "component": it.component,
                "terminals": it.terminals,
                "component_cost": pq(&it.component_cost),
                "dual_load": pq(&it.dual_load),
                "f": pq(&it.f),
                "mst": pq(&it.mst),
                "smst": pq(&it.smst),
                "loss": pq(&it.loss),
            })
        })
        .collect();
    let tree: Vec<Value> = report.final_tree.iter().map(|e| json!([e.u, e.v, to_pq(&e.cost)])).collect();
    let o = &report.oracle;
    let mut oracle = json!({
        "opt": opt_pq(&o.opt),
        "opt_r": opt_pq(&o.opt_r),
        "loss_star": opt_pq(&o.loss_star),
        "lp_value": opt_pq(&o.lp_value),
    });
    if let (Some(opt_r), Ok((_, ok))) = (o.opt_r, certify_ratio(report, report.b)) {
        if !opt_r.is_zero() {
            oracle["ratio"] = pq(&(report.final_cost / opt_r));
        }
        oracle["ratio_certified"] = Value::Bool(ok);
        oracle["lower_bound_below_opt_r"] = Value::Bool(report.lower_bound <= opt_r);
    }
    json!({
        "schema": SCHEMA,
        "instance_digest": report.digest,
        "n": report.n,
        "terminals": report.terminals,
        "r": report.r,
        "b": report.b,
        "catalog_size": report.catalog_size,
        "initial": { "mst": pq(&report.initial_mst), "smst": pq(&report.initial_smst) },
        "iterations": iterations,
        "raw_cost": pq(&report.raw_cost),
        "final_cost": pq(&report.final_cost),
        "final_tree": tree,
        "lower_bound": pq(&report.lower_bound),
        "theorem_bound": pq(&report.theorem_bound),
        "oracle": oracle,
    })
}

/// Pretty-printed JSON with a trailing newline; key order is fixed, so equal reports give
/// byte-identical output.
pub fn write_report(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(&report_value(report)).expect("report values serialize");
    s.push('\n');
    s
}
