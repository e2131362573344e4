//! JSON documents for barcodes, matchings, losses and gradient targets.
//!
//! Objects have sorted keys, floats use the shortest round-trip decimal form,
//! and infinite values are written as the strings `"inf"` / `"-inf"`.

use serde_json::{json, Map, Value};

use crate::loss::{CriticalVoxelReport, FeatureCountGap, LossBreakdown, Role, Volume};
use crate::matching::BettiMatchingResult;
use crate::persistence::{Barcode, Cell, Interval, PersistencePair};
use crate::volume::FiltrationMode;

pub fn number(v: f64) -> Value {
    if v.is_infinite() {
        Value::String(if v > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
    }
}

fn cell(c: &Cell) -> Value {
    json!({ "x": c.x, "y": c.y, "z": c.z, "type": c.kind })
}

pub fn interval(i: &Interval) -> Value {
    let mut m = Map::new();
    m.insert("birth".into(), number(i.birth));
    m.insert("death".into(), number(i.death));
    m.insert("birth_cell".into(), cell(&i.birth_cell));
    if let Some(d) = &i.death_cell {
        m.insert("death_cell".into(), cell(d));
    }
    Value::Object(m)
}

fn pairs(list: &[PersistencePair], mode: FiltrationMode) -> Value {
    Value::Array(list.iter().map(|p| interval(&p.interval(mode))).collect())
}

fn shape(s: [usize; 3]) -> Value {
    json!(s)
}

pub fn barcode(b: &Barcode) -> Value {
    let mut per_dim = Map::new();
    for d in b.dims.iter() {
        per_dim.insert(
            d.to_string(),
            json!({
                "finite": pairs(&b.pairs[d], b.mode),
                "essential": b.essential_intervals(d).iter().map(interval).collect::<Vec<_>>(),
            }),
        );
    }
    json!({
        "metadata": {
            "shape": shape(b.shape),
            "mode": b.mode.as_str(),
            "dims": b.dims.iter().collect::<Vec<_>>(),
        },
        "barcode": per_dim,
    })
}

pub fn matching(r: &BettiMatchingResult) -> Value {
    let mode = r.mode;
    let mut per_dim = Map::new();
    for d in &r.per_dim {
        let matched: Vec<Value> = d
            .matched
            .iter()
            .map(|m| {
                json!({
                    "i": interval(&m.pair_i.interval(mode)),
                    "j": interval(&m.pair_j.interval(mode)),
                    "comparison": interval(&m.comparison.interval(mode)),
                })
            })
            .collect();
        let essential = |cubes: &[crate::cube::Cube]| -> Vec<Value> {
            cubes
                .iter()
                .map(|c| {
                    interval(&Interval {
                        dim: d.dim,
                        birth: mode.report(c.birth),
                        death: f64::INFINITY,
                        birth_cell: Cell::of(d.dim, c),
                        death_cell: None,
                    })
                })
                .collect()
        };
        per_dim.insert(
            d.dim.to_string(),
            json!({
                "matched": matched,
                "unmatched_i": pairs(&d.unmatched_i, mode),
                "unmatched_j": pairs(&d.unmatched_j, mode),
                "essential_i": essential(&d.essential_i),
                "essential_j": essential(&d.essential_j),
            }),
        );
    }
    json!({
        "metadata": {
            "shape": shape(r.shape),
            "mode": mode.as_str(),
            "dims": r.dims.iter().collect::<Vec<_>>(),
            "extended": r.extended,
        },
        "matching": per_dim,
    })
}

pub fn loss(l: &LossBreakdown) -> Value {
    let mut per_dim = Map::new();
    for d in &l.per_dim {
        per_dim.insert(
            d.dim.to_string(),
            json!({
                "total": number(d.total()),
                "matched": number(d.matched),
                "unmatched_i": number(d.unmatched_i),
                "unmatched_j": number(d.unmatched_j),
            }),
        );
    }
    json!({
        "total": number(l.total),
        "matched": number(l.matched_term),
        "unmatched_i": number(l.unmatched_i_term),
        "unmatched_j": number(l.unmatched_j_term),
        "per_dim": per_dim,
    })
}

pub fn feature_counts(gaps: &[FeatureCountGap]) -> Value {
    let mut m = Map::new();
    for g in gaps {
        m.insert(
            g.dim.to_string(),
            json!({
                "count_i": g.count_i,
                "count_j": g.count_j,
                "difference": g.difference,
                "halved": number(g.halved()),
            }),
        );
    }
    Value::Object(m)
}

pub fn targets(report: &CriticalVoxelReport) -> Value {
    Value::Array(
        report
            .entries
            .iter()
            .map(|e| {
                json!({
                    "volume": match e.volume { Volume::I => "i", Volume::J => "j" },
                    "dim": e.dim,
                    "voxel": e.voxel,
                    "role": match e.role { Role::Birth => "birth", Role::Death => "death" },
                    "current": number(e.current),
                    "target": number(e.target),
                    "weight": number(e.weight),
                })
            })
            .collect(),
    )
}

/// Pretty-printed document with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
