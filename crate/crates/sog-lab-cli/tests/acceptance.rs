//! Replay determinism: recorded runs must reproduce byte-identical outputs
//! under different worker-thread counts.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

fn soglab(dir: &Path, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_soglab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn soglab");
    assert!(
        out.status.success(),
        "soglab {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn criterion_12_replay_is_thread_invariant() {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let runs: &[&[&str]] = &[
        &[
            "skeleton", "--n", "400", "--p", "0.5", "--margin", "40", "--reps", "60", "--seed",
            "12", "--out", "sk",
        ],
        &[
            "estimate-c", "--n", "600", "--p", "0.5", "--u", "exponential(1)", "--v",
            "exponential(1)", "--c", "0.4", "--method", "regenerative", "--reps", "40", "--seed",
            "12", "--out", "ec",
        ],
        &[
            "validate-ftw", "--u", "constant(1)", "--dt", "0.05", "--dw", "0.05", "--checkpoints",
            "1:0.5,1:1.5", "--reps", "4000", "--seed", "12", "--out", "vf",
        ],
        &[
            "cascade", "--u", "uniform(0,1)", "--v", "exponential(1)", "--horizon", "3", "--seed",
            "12", "--out", "ct",
        ],
    ];
    let mut verified = 0usize;
    for args in runs {
        soglab(dir.path(), args);
        let prefix = args[args.len() - 1];
        let manifest = format!("{prefix}.manifest.json");
        for threads in ["1", "4"] {
            let replayed = format!("{prefix}-t{threads}");
            // replay exits nonzero unless every digest matches the manifest
            soglab(dir.path(), &["replay", &manifest, "--threads", threads, "--out", &replayed]);
            let m: serde_json::Value =
                serde_json::from_str(&fs::read_to_string(dir.path().join(&manifest)).unwrap())
                    .unwrap();
            for f in m["output_files"].as_array().unwrap() {
                let orig = f["path"].as_str().unwrap();
                let suffix = orig.strip_prefix(&format!("{prefix}.")).unwrap();
                let copy = format!("{replayed}.{suffix}");
                assert_eq!(
                    fs::read(dir.path().join(orig)).unwrap(),
                    fs::read(dir.path().join(&copy)).unwrap(),
                    "{orig} vs {copy} differ"
                );
                verified += 1;
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = verified == 10;
    println!(
        "criterion 12: {} — {verified} replayed files byte-identical across thread counts 1 and 4 ({elapsed:.1}s < 120s)",
        if ok { "pass" } else { "FAIL" }
    );
    assert!(ok);
    assert!(elapsed < 120.0, "criterion 12 exceeded its runtime budget: {elapsed:.1}s");
}
