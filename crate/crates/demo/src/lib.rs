//! Browser playground: three interactive views over the core toolbox.
//!
//! Each export returns a JSON string the static page renders onto canvases.
//! The functions are plain Rust on non-wasm targets, so the whole payload is
//! unit-testable on the host; build the browser bundle with
//! `wasm-pack build crates/demo --target web`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use tabaudit::attack::{AttackKind, AttackSpec, Instance};
use tabaudit::data::{generate_synthetic, stratified_split, Matrix, SyntheticSpec};
use tabaudit::geometry::{silhouette, spectrum_summary, twonn_intrinsic_dimension};
use tabaudit::readout::{accuracy, readout_by_name, Metric};
use tabaudit::rng::cell_rng;
use tabaudit::toy::{
    ablation_modes, orbit_bound, toy_predict, AblationMode, ModelKind, TaskKind, ToyTask,
};

fn err_json(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

/// Hand-crafted model grid, attention-mode ablation, and orbit bounds.
/// The grid itself is fixed at `m = 3`; the orbit bounds sweep up to `m`.
#[wasm_bindgen]
pub fn toy_grid(max_m: usize) -> String {
    let tasks = [TaskKind::A, TaskKind::B, TaskKind::C];
    let mut grid = Vec::new();
    for model in ModelKind::ALL {
        let mut row = Vec::new();
        for kind in tasks {
            let task = match ToyTask::new(kind, 3) {
                Ok(t) => t,
                Err(e) => return err_json(e),
            };
            match toy_predict(model, &task) {
                Ok(p) => row.push(json!({
                    "fraction": p.accuracy.to_string(),
                    "value": frac_f64(p.accuracy),
                })),
                Err(e) => return err_json(e),
            }
        }
        grid.push(json!({ "model": model.name(), "cells": row }));
    }

    let mut ablation = Vec::new();
    for mode in AblationMode::ALL {
        let task = ToyTask::new(TaskKind::A, 3).expect("m=3");
        match ablation_modes(&task, mode) {
            Ok(a) => ablation.push(json!({
                "mode": mode.name(),
                "fraction": a.to_string(),
                "value": frac_f64(a),
            })),
            Err(e) => return err_json(e),
        }
    }

    let mut bounds = Vec::new();
    for m in 2..=max_m.clamp(2, 14) {
        let mut per_task = Vec::new();
        for kind in tasks {
            match ToyTask::new(kind, m).and_then(|t| orbit_bound(&t)) {
                Ok(b) => per_task.push(frac_f64(b)),
                Err(e) => return err_json(e),
            }
        }
        bounds.push(json!({ "m": m, "bounds": per_task }));
    }

    json!({ "grid": grid, "ablation": ablation, "orbit_bounds": bounds }).to_string()
}

fn frac_f64(f: tabaudit::toy::Frac) -> f64 {
    *f.numer() as f64 / *f.denom() as f64
}

/// Run one attack against one readout on a 2-feature synthetic dataset and
/// return everything the scatter view needs.
#[wasm_bindgen]
pub fn attack_playground(dataset: &str, attack: &str, readout: &str, seed: u32) -> String {
    let seed = u64::from(seed);
    let spec = SyntheticSpec::new(dataset).with("n", 220.0).with("d", 2.0);
    let table = match generate_synthetic(&spec, 0) {
        Ok(t) => t,
        Err(e) => return err_json(e),
    };
    let split = match stratified_split(&table, seed, 0.8) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let Some(kind) = AttackKind::by_name(attack) else {
        return err_json(format!("unknown attack {attack:?}"));
    };
    let classifier = match readout_by_name(readout) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };

    let labels = table.labels().expect("synthetic tables are labeled");
    let query_labels: Vec<usize> = split.query_idx.iter().map(|&i| labels[i]).collect();
    let clean_probs = match classifier.classify(&table, &split) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    let clean_acc = accuracy(&clean_probs, &query_labels);

    let instance = Instance::from_split(&table, &split);
    let poisoned = match AttackSpec::new(kind, seed).apply(&instance) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    let pois_instance = Instance {
        context: poisoned.context.clone(),
        query: poisoned.query.clone(),
    };
    let (ptable, psplit) = match pois_instance.to_table_split(seed) {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    let pois_probs = match classifier.classify(&ptable, &psplit) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    let pois_acc = accuracy(&pois_probs, &query_labels);

    // context points: clean label vs poisoned label, plus appended rows
    let clean_n = instance.context.n_rows();
    let clean_labels = instance.context.labels().expect("labeled");
    let pois_labels = poisoned.context.labels().expect("labeled");
    let mut context_points = Vec::new();
    for i in 0..poisoned.context.n_rows() {
        let appended = i >= clean_n;
        context_points.push(json!({
            "x": poisoned.context.values().get(i, 0),
            "y": poisoned.context.values().get(i, 1),
            "label": pois_labels[i],
            "clean_label": if appended { Value::Null } else { json!(clean_labels[i]) },
            "flipped": !appended && pois_labels[i] != clean_labels[i],
            "appended": appended,
            "clean_x": if appended { Value::Null } else { json!(instance.context.values().get(i, 0)) },
            "clean_y": if appended { Value::Null } else { json!(instance.context.values().get(i, 1)) },
        }));
    }
    let mut query_points = Vec::new();
    for (row, &qi) in split.query_idx.iter().enumerate() {
        query_points.push(json!({
            "x": poisoned.query.values().get(row, 0),
            "y": poisoned.query.values().get(row, 1),
            "clean_x": table.values().get(qi, 0),
            "clean_y": table.values().get(qi, 1),
            "label": query_labels[row],
            "clean_pred": clean_probs.argmax(row),
            "poisoned_pred": pois_probs.argmax(row),
        }));
    }

    json!({
        "dataset": table.name(),
        "attack": kind.name(),
        "readout": classifier.name(),
        "classes": table.class_count(),
        "clean_accuracy": clean_acc,
        "poisoned_accuracy": pois_acc,
        "delta_pp": (pois_acc - clean_acc) * 100.0,
        "context": context_points,
        "queries": query_points,
    })
    .to_string()
}

/// Generate a point cloud on a chosen manifold and report its geometry
/// summaries alongside a 2D projection for plotting.
#[wasm_bindgen]
pub fn geometry_playground(manifold: &str, n: u32, noise: f64, ambient: u32, seed: u32) -> String {
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    let n = (n as usize).clamp(20, 4000);
    let ambient = (ambient as usize).clamp(2, 32);
    let noise = noise.clamp(0.0, 1.0);
    let mut rng = cell_rng("geometry_playground", u64::from(seed), manifold);

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut labels: Option<Vec<usize>> = None;
    match manifold {
        "line" => {
            for _ in 0..n {
                let mut v = vec![0.0; ambient];
                let t: f64 = rng.random();
                v[0] = t;
                v[1] = 0.5 * t;
                for x in v.iter_mut() {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    *x += noise * 0.05 * g;
                }
                rows.push(v);
            }
        }
        "plane" => {
            for _ in 0..n {
                let mut v = vec![0.0; ambient];
                v[0] = rng.random();
                v[1] = rng.random();
                for x in v.iter_mut().skip(2) {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    *x = noise * 0.05 * g;
                }
                rows.push(v);
            }
        }
        "gauss" => {
            for _ in 0..n {
                let v: Vec<f64> = (0..ambient)
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect();
                rows.push(v);
            }
        }
        "clusters" => {
            let mut l = Vec::with_capacity(n);
            for i in 0..n {
                let c = i % 3;
                let center = [(0.0, 0.0), (4.0, 0.0), (2.0, 3.5)][c];
                let mut v = vec![0.0; ambient];
                let g0: f64 = StandardNormal.sample(&mut rng);
                let g1: f64 = StandardNormal.sample(&mut rng);
                v[0] = center.0 + (0.2 + noise) * g0;
                v[1] = center.1 + (0.2 + noise) * g1;
                rows.push(v);
                l.push(c);
            }
            labels = Some(l);
        }
        other => return err_json(format!("unknown manifold {other:?}")),
    }

    let m = match Matrix::from_rows(&rows) {
        Ok(m) => m,
        Err(e) => return err_json(e),
    };
    let spectrum = match spectrum_summary(&m) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let twonn = twonn_intrinsic_dimension(&m, 0.0).map(|r| r.id).ok();
    let sil = labels
        .as_ref()
        .and_then(|l| silhouette(&m, l, Metric::Cosine).ok())
        .map(|s| s.score);

    let points: Vec<Value> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "x": r[0],
                "y": r[1],
                "label": labels.as_ref().map_or(Value::Null, |l| json!(l[i])),
            })
        })
        .collect();
    json!({
        "manifold": manifold,
        "effective_rank": spectrum.effective_rank,
        "participation_ratio": spectrum.participation_ratio,
        "twonn_id": twonn,
        "silhouette": sil,
        "singular_values": spectrum.singular_values,
        "points": points,
    })
    .to_string()
}
