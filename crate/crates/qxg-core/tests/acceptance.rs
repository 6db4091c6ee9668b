//! Acceptance suite: one test per shipping criterion, each printing a
//! single PASS/FAIL line (run with `--nocapture` to see them on success).
//!
//! Criteria are serialized through one lock so wall-clock measurements
//! are not distorted by sibling tests on the same cores.

use std::sync::Mutex;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestRunner};

use qxg_core::acquisition::{geqca, path_consistency, BoxOracle, QualitativeGraph};
use qxg_core::allen::{self, AllenRelation, AllenSet, Interval, ALL_RELATIONS};
use qxg_core::bench::{bench_scene, median, power_law_fit, BenchRow};
use qxg_core::builder::{build, BuildMethod, BuildOptions};
use qxg_core::calculus::{IntervalCalculus, RectangleCalculus};
use qxg_core::io::{decode_qxg, encode_qxg, read_scene, read_scene_file, write_scene, SizeReport};
use qxg_core::rectangle::{classify, BBox, RaRelation, RaSet, RA_RELATION_COUNT};
use qxg_core::scene::{synth_scene, Detection, FrameDetections, Scene, SynthParams};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn report(name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance {name} failed: {detail}");
}

const FIXTURE: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/tests/fixtures/four_frame_scene.jsonl"
);

// ---------------------------------------------------------------------
// independent endpoint-predicate oracle (ground truth for criteria 1-2)
// ---------------------------------------------------------------------

/// Classifies integer intervals by checking all 13 textbook endpoint
/// definitions independently; panics unless exactly one holds.
fn oracle_classify(alo: i64, ahi: i64, blo: i64, bhi: i64) -> usize {
    let defs = [
        ahi < blo,                           // p
        ahi == blo,                          // m
        alo < blo && blo < ahi && ahi < bhi, // o
        blo < alo && ahi < bhi,              // d
        alo == blo && ahi < bhi,             // s
        ahi == bhi && blo < alo,             // f
        alo == blo && ahi == bhi,            // eq
        bhi < alo,                           // pi
        bhi == alo,                          // mi
        blo < alo && alo < bhi && bhi < ahi, // oi
        alo < blo && bhi < ahi,              // di
        alo == blo && bhi < ahi,             // si
        ahi == bhi && alo < blo,             // fi
    ];
    let mut found = None;
    for (i, &holds) in defs.iter().enumerate() {
        if holds {
            assert!(
                found.is_none(),
                "definitions {found:?} and {i} both hold for [{alo},{ahi}] vs [{blo},{bhi}]"
            );
            found = Some(i);
        }
    }
    found.unwrap_or_else(|| panic!("no definition holds for [{alo},{ahi}] vs [{blo},{bhi}]"))
}

fn integer_intervals(max: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for lo in 0..=max {
        for hi in (lo + 1)..=max {
            out.push((lo, hi));
        }
    }
    out
}

#[test]
fn c01_interval_trichotomy() {
    let _guard = serial();
    let started = Instant::now();
    let intervals = integer_intervals(6);
    let mut pairs = 0u64;
    let mut pass = true;
    for &(alo, ahi) in &intervals {
        for &(blo, bhi) in &intervals {
            pairs += 1;
            let a = Interval::new(alo as f64, ahi as f64).unwrap();
            let b = Interval::new(blo as f64, bhi as f64).unwrap();
            let holding: Vec<AllenRelation> = ALL_RELATIONS
                .into_iter()
                .filter(|&r| allen::holds(a, r, b))
                .collect();
            if holding.len() != 1 {
                pass = false;
            }
            // and the one that holds is the textbook one
            if holding != [ALL_RELATIONS[oracle_classify(alo, ahi, blo, bhi)]] {
                pass = false;
            }
        }
    }
    let elapsed = started.elapsed();
    report(
        "01 interval trichotomy",
        pass && elapsed.as_secs_f64() < 1.0,
        &format!("{pairs} pairs, exactly one relation each, {elapsed:?}"),
    );
}

#[test]
fn c02_composition_table_matches_enumeration() {
    let _guard = serial();
    // derive the table by witness enumeration over endpoints 0..=8
    let intervals = integer_intervals(8);
    let mut derived = [[0u16; 13]; 13];
    for &(alo, ahi) in &intervals {
        for &(blo, bhi) in &intervals {
            let r1 = oracle_classify(alo, ahi, blo, bhi);
            for &(clo, chi) in &intervals {
                let r2 = oracle_classify(blo, bhi, clo, chi);
                let r3 = oracle_classify(alo, ahi, clo, chi);
                derived[r1][r2] |= 1 << r3;
            }
        }
    }
    let mut mismatches = 0;
    for (i, &r1) in ALL_RELATIONS.iter().enumerate() {
        for (j, &r2) in ALL_RELATIONS.iter().enumerate() {
            if r1.compose(r2) != AllenSet::from_bits(derived[i][j]) {
                mismatches += 1;
                eprintln!(
                    "compose({},{}) = {} but enumeration gives {}",
                    r1,
                    r2,
                    r1.compose(r2),
                    AllenSet::from_bits(derived[i][j])
                );
            }
        }
    }
    report(
        "02 composition table",
        mismatches == 0,
        &format!("{mismatches} mismatching entries out of 169"),
    );
}

#[test]
fn c03_four_frame_fixture() {
    let _guard = serial();
    let scene = read_scene_file(FIXTURE).expect("fixture parses");
    let mut pass = true;
    let mut notes = Vec::new();
    for method in [BuildMethod::Acquisition, BuildMethod::BruteForce] {
        let graph = build(
            &scene,
            &BuildOptions {
                method,
                ..Default::default()
            },
        )
        .unwrap();
        let expect = [
            ("o2", "o3", 1, "(p,pi)"),
            ("o1", "o3", 2, "(p,pi)"),
            ("o3", "o4", 2, "(p,oi)"),
            ("o1", "o3", 3, "(di,pi)"),
        ];
        for (a, b, frame, want) in expect {
            let got = graph.relation_at(a, b, frame).unwrap();
            let want_rel = RaRelation::from_text(want).unwrap();
            if got != Some(want_rel) {
                pass = false;
                notes.push(format!("V_{a}{b}[{frame}] = {got:?}, wanted {want}"));
            }
        }
        // o3 is gone in frame 4: no entry involving it there
        for other in ["o1", "o2", "o4"] {
            if graph.relation_at("o3", other, 4).unwrap().is_some() {
                pass = false;
                notes.push(format!("unexpected o3-{other} entry at frame 4"));
            }
        }
        // but the other pairs were all updated at frame 4
        for (a, b) in [("o1", "o2"), ("o1", "o4"), ("o2", "o4")] {
            if graph.relation_at(a, b, 4).unwrap().is_none() {
                pass = false;
                notes.push(format!("missing {a}-{b} entry at frame 4"));
            }
        }
    }
    let detail = if notes.is_empty() {
        "all stated relations reproduced by both methods".to_string()
    } else {
        notes.join("; ")
    };
    report("03 four-frame fixture", pass, &detail);
}

#[test]
fn c04_method_equivalence() {
    let _guard = serial();
    let mut mismatches = 0;
    for seed in 0..100u64 {
        let m = 2 + (seed as usize) % 49; // 2..=50
        let scene = synth_scene(seed, m, 40, &SynthParams::default()).unwrap();
        let acq = build(
            &scene,
            &BuildOptions {
                method: BuildMethod::Acquisition,
                ..Default::default()
            },
        )
        .unwrap();
        let bf = build(
            &scene,
            &BuildOptions {
                method: BuildMethod::BruteForce,
                ..Default::default()
            },
        )
        .unwrap();
        if acq != bf {
            mismatches += 1;
        }
    }
    report(
        "04 method equivalence",
        mismatches == 0,
        &format!("100 random scenes, {mismatches} graph mismatches"),
    );
}

#[test]
fn c05_query_reduction_and_speedup() {
    let _guard = serial();
    let scene = synth_scene(7, 100, 40, &SynthParams::steady()).unwrap();
    let rows = bench_scene(
        &scene,
        &[BuildMethod::BruteForce, BuildMethod::Acquisition],
        3,
        0.0,
    )
    .unwrap();
    let of = |method: BuildMethod| -> Vec<&BenchRow> {
        rows.iter().filter(|r| r.method == method).collect()
    };
    let bf = of(BuildMethod::BruteForce);
    let acq = of(BuildMethod::Acquisition);

    let mut min_query_ratio = f64::INFINITY;
    for (b, a) in bf.iter().zip(acq.iter()) {
        assert_eq!(b.frame, a.frame);
        if a.query_count > 0 {
            min_query_ratio = min_query_ratio.min(b.query_count as f64 / a.query_count as f64);
        }
    }
    let bf_median = median(&bf.iter().map(|r| r.wall_ms).collect::<Vec<_>>());
    let acq_median = median(&acq.iter().map(|r| r.wall_ms).collect::<Vec<_>>());
    let speedup = bf_median / acq_median;
    report(
        "05 query reduction and speedup",
        min_query_ratio >= 6.0 && speedup >= 3.0,
        &format!(
            "worst per-frame query ratio {min_query_ratio:.2}x (need >= 6), \
             median wall speedup {speedup:.1}x at m=100 (need >= 3)"
        ),
    );
}

#[test]
fn c06_throughput_at_285_objects() {
    let _guard = serial();
    let scene = synth_scene(7, 285, 40, &SynthParams::steady()).unwrap();
    let rows = bench_scene(&scene, &[BuildMethod::Acquisition], 3, 0.0).unwrap();
    let times: Vec<f64> = rows.iter().map(|r| r.wall_ms).collect();
    let worst = times.iter().cloned().fold(0.0, f64::max);
    let total_s: f64 = times.iter().sum::<f64>() / 1e3;
    let fps = rows.len() as f64 / total_s;
    report(
        "06 throughput",
        worst < 50.0 && fps >= 25.0,
        &format!("worst frame {worst:.2} ms (budget 50), sustained {fps:.0} frames/s (need >= 25)"),
    );
}

#[test]
fn c07_quadratic_complexity_shape() {
    let _guard = serial();
    let mut points = Vec::new();
    for m in [25usize, 50, 100, 200, 285] {
        let scene = synth_scene(13, m, 40, &SynthParams::steady()).unwrap();
        let rows = bench_scene(&scene, &[BuildMethod::Acquisition], 3, 0.0).unwrap();
        let t: Vec<f64> = rows.iter().map(|r| r.wall_ms).collect();
        points.push((m as f64, median(&t)));
    }
    let fit = power_law_fit(&points).expect("positive timings");
    let b = fit.exponent;
    report(
        "07 complexity shape",
        (1.7..=2.3).contains(&b),
        &format!("fitted per-frame time exponent b = {b:.3} over m = 25..285 (need 1.7..2.3)"),
    );
}

#[test]
fn c08_storage_reduction() {
    let _guard = serial();
    let mut reports = Vec::new();
    let mut dense_ratio = 0.0;
    let mut dense_bytes = 0usize;
    for m in [50usize, 100, 150, 230] {
        let scene = synth_scene(42, m, 40, &SynthParams::steady()).unwrap();
        let mut jsonl = Vec::new();
        write_scene(&scene, &mut jsonl).unwrap();
        let graph = build(&scene, &BuildOptions::default()).unwrap();
        let encoded = encode_qxg(&graph);
        if m == 100 {
            dense_ratio = jsonl.len() as f64 / encoded.len() as f64;
            dense_bytes = encoded.len();
        }
        reports.push(SizeReport::from_sizes(
            format!("m{m}.jsonl"),
            format!("m{m}.qxg"),
            jsonl.len() as u64,
            encoded.len() as u64,
        ));
    }
    let monotone = reports
        .windows(2)
        .all(|w| w[0].reduction_pct > w[1].reduction_pct);
    let reductions: Vec<String> = reports
        .iter()
        .map(|r| format!("{:.1}%", r.reduction_pct))
        .collect();
    report(
        "08 storage",
        dense_bytes < 1_000_000 && dense_ratio >= 5.0 && monotone,
        &format!(
            "m=100 graph {dense_bytes} B (budget 1 MB), scene/graph ratio {dense_ratio:.2} \
             (need >= 5), reductions over m=50/100/150/230: {} (must decrease)",
            reductions.join(" > ")
        ),
    );
}

// strategies for the round-trip criterion

fn arb_bbox() -> impl Strategy<Value = BBox> {
    (
        -100.0..100.0f64,
        -100.0..100.0f64,
        0.1..20.0f64,
        0.1..20.0f64,
    )
        .prop_map(|(x, y, w, h)| BBox::new(x, y, w, h).unwrap())
}

fn arb_scene() -> impl Strategy<Value = Scene> {
    let frame = proptest::collection::vec((any::<bool>(), arb_bbox()), 6);
    (
        "[a-z][a-z0-9-]{0,11}",
        proptest::collection::vec(frame, 0..=5),
    )
        .prop_map(|(scene_id, frames)| Scene {
            scene_id,
            sensor: "prop".to_string(),
            frames: frames
                .into_iter()
                .enumerate()
                .map(|(k, objects)| FrameDetections {
                    frame_index: k as u32 + 1,
                    entries: objects
                        .into_iter()
                        .enumerate()
                        .filter(|(_, (present, _))| *present)
                        .map(|(i, (_, bbox))| Detection {
                            id: format!("obj{i}"),
                            class_label: format!("class{}", i % 3),
                            bbox,
                        })
                        .collect(),
                })
                .collect(),
        })
}

#[test]
fn c09_lossless_round_trips() {
    let _guard = serial();
    let cases = 1000;

    let config = || ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    };
    let mut runner = TestRunner::new(config());
    let scene_result = runner.run(&arb_scene(), |scene| {
        let mut buf = Vec::new();
        write_scene(&scene, &mut buf).unwrap();
        let back = read_scene(buf.as_slice()).unwrap();
        prop_assert_eq!(back, scene);
        Ok(())
    });

    let mut runner = TestRunner::new(config());
    let graph_result = runner.run(&arb_scene(), |scene| {
        let graph = build(&scene, &BuildOptions::default()).unwrap();
        let back = decode_qxg(&encode_qxg(&graph)).unwrap();
        prop_assert_eq!(back, graph);
        Ok(())
    });

    report(
        "09 lossless round-trips",
        scene_result.is_ok() && graph_result.is_ok(),
        &format!(
            "{cases} scene write/parse cases: {scene_result:?}; \
             {cases} graph encode/decode cases: {graph_result:?}"
        ),
    );
}

#[test]
fn c10_acquisition_with_propagation() {
    let _guard = serial();
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    let mut rng = StdRng::seed_from_u64(2024);
    let mut pass = true;
    let mut notes = Vec::new();

    // realizable configurations, 3..=8 variables: singleton truth per edge
    for round in 0..30 {
        let n = 3 + (round % 6);
        let boxes: Vec<BBox> = (0..n)
            .map(|_| {
                BBox::new(
                    rng.gen_range(-40.0..40.0),
                    rng.gen_range(-40.0..40.0),
                    rng.gen_range(0.5..10.0),
                    rng.gen_range(0.5..10.0),
                )
                .unwrap()
            })
            .collect();
        let oracle = BoxOracle::new(&boxes);
        match geqca::<RectangleCalculus, _>(n, &oracle) {
            Err(e) => {
                pass = false;
                notes.push(format!("round {round}: unexpected {e}"));
            }
            Ok((graph, _)) => {
                for (i, j, label) in graph.edges() {
                    if label.single() != Some(classify(&boxes[i], &boxes[j])) {
                        pass = false;
                        notes.push(format!("round {round}: edge ({i},{j}) wrong or not singleton"));
                    }
                }
            }
        }
    }

    // propagation never removes the true relation from consistent supersets
    for round in 0..20 {
        let n = 3 + (round % 5);
        let boxes: Vec<BBox> = (0..n)
            .map(|_| {
                BBox::new(
                    rng.gen_range(-40.0..40.0),
                    rng.gen_range(-40.0..40.0),
                    rng.gen_range(0.5..10.0),
                    rng.gen_range(0.5..10.0),
                )
                .unwrap()
            })
            .collect();
        let mut graph = QualitativeGraph::<RectangleCalculus>::full(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let mut label = RaSet::singleton(classify(&boxes[i], &boxes[j]));
                for _ in 0..rng.gen_range(0..60) {
                    label.insert(RaRelation::from_flat_index(rng.gen_range(0..RA_RELATION_COUNT)).unwrap());
                }
                graph.set_label(i, j, label);
            }
        }
        match path_consistency(&mut graph) {
            Err(e) => {
                pass = false;
                notes.push(format!("safety round {round}: spurious {e}"));
            }
            Ok(()) => {
                for (i, j, label) in graph.edges() {
                    if !label.contains(classify(&boxes[i], &boxes[j])) {
                        pass = false;
                        notes.push(format!("safety round {round}: edge ({i},{j}) lost the truth"));
                    }
                }
            }
        }
    }

    // the crafted contradiction: m ; m = {p}, against eq
    let mut contradiction = QualitativeGraph::<IntervalCalculus>::full(3);
    contradiction.set_label(0, 1, AllenSet::singleton(AllenRelation::Meets));
    contradiction.set_label(1, 2, AllenSet::singleton(AllenRelation::Meets));
    contradiction.set_label(0, 2, AllenSet::singleton(AllenRelation::Equals));
    if path_consistency(&mut contradiction).is_ok() {
        pass = false;
        notes.push("crafted inconsistent instance was not detected".to_string());
    }

    let detail = if notes.is_empty() {
        "30 realizable configs decided correctly, 20 safety configs kept the truth, \
         contradiction detected"
            .to_string()
    } else {
        notes.join("; ")
    };
    report("10 acquisition with propagation", pass, &detail);
}
