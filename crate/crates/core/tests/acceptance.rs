//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cren::convexroof::{optimize_cren, verify_decomposition, OptimizerConfig};
use cren::linalg::{hermitian_eig, partial_transpose, BipartiteDims};
use cren::measures::{
    cren_isotropic, cren_werner, g_function, negativity, pure_negativity, wootters_concurrence,
};
use cren::states::{
    isotropic_state, random_density, random_density_from_rng, random_product_mixture, random_pure,
    rng_from_seed, schmidt_decompose, werner_state, DensityMatrix,
};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn dims(a: usize, b: usize) -> BipartiteDims {
    BipartiteDims::new(a, b).unwrap()
}

/// Smallest `value - negativity` seen across optimizer runs, for criterion 8.
#[derive(Default)]
struct Soundness {
    runs: usize,
    min_slack: f64,
    witness_failures: usize,
}

impl Soundness {
    fn record(&mut self, rho: &DensityMatrix, value: f64, witness_ok: bool) {
        let slack = value - negativity(rho).unwrap().value;
        if self.runs == 0 || slack < self.min_slack {
            self.min_slack = slack;
        }
        self.runs += 1;
        if !witness_ok {
            self.witness_failures += 1;
        }
    }
}

fn optimize(rho: &DensityMatrix, sound: &mut Soundness) -> f64 {
    let r = optimize_cren(rho, &OptimizerConfig::default()).unwrap();
    let ok = verify_decomposition(&r.witness, rho, 1e-8).passed;
    sound.record(rho, r.value, ok);
    r.value
}

fn pure_consistency() -> Outcome {
    let all = [dims(2, 2), dims(2, 3), dims(3, 3), dims(3, 4)];
    let mut worst: f64 = 0.0;
    for i in 0..500u64 {
        let psi = random_pure(all[(i % 4) as usize], i);
        let mu = schmidt_decompose(&psi).probabilities;
        let closed = pure_negativity(&mu).unwrap().value;
        let pt = negativity(&psi.projector()).unwrap().value;
        worst = worst.max((closed - pt).abs());
    }
    Outcome {
        passed: worst <= 1e-9,
        detail: format!("500 states, worst |Δ| = {worst:.2e} (tol 1e-9)"),
    }
}

fn partial_transpose_spectrum() -> Outcome {
    let d = dims(3, 3);
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let psi = random_pure(d, 10_000 + i);
        let mu = schmidt_decompose(&psi).probabilities;
        let mut expected = mu.clone();
        for a in 0..mu.len() {
            for b in a + 1..mu.len() {
                let s = (mu[a] * mu[b]).sqrt();
                expected.extend([s, -s]);
            }
        }
        expected.sort_by(|x, y| y.total_cmp(x));
        let pt = partial_transpose(psi.projector().matrix(), d).unwrap();
        let got = hermitian_eig(&pt, 1e-10).unwrap().values;
        for (g, e) in got.iter().zip(&expected) {
            worst = worst.max((g - e).abs());
        }
    }
    Outcome {
        passed: worst <= 1e-9,
        detail: format!("100 states in 3⊗3, worst eigenvalue |Δ| = {worst:.2e} (tol 1e-9)"),
    }
}

fn isotropic_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [2, 3, 4] {
        for k in 0..=10 {
            let f = k as f64 / 10.0;
            let closed = cren_isotropic(f, d).unwrap().value;
            let n = negativity(&isotropic_state(f, d).unwrap()).unwrap().value;
            worst = worst.max((closed - n).abs());
        }
    }
    Outcome {
        passed: worst <= 1e-10,
        detail: format!("33 grid points, worst |Δ| = {worst:.2e} (tol 1e-10)"),
    }
}

fn werner_gap() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    for d in [2usize, 3, 4] {
        let df = d as f64;
        for k in 0..=5 {
            let w = 0.5 + k as f64 / 10.0;
            let n = negativity(&werner_state(w, d).unwrap()).unwrap().value;
            let expected = (2.0 / df) * (2.0 * w - 1.0) / (df - 1.0);
            worst = worst.max((n - expected).abs());
            if d >= 3 && w > 0.5 {
                min_gap = min_gap.min(cren_werner(w, d).unwrap().value - n);
            }
        }
    }
    Outcome {
        passed: worst <= 1e-10 && min_gap > 0.0,
        detail: format!(
            "worst |Δ| = {worst:.2e} (tol 1e-10), smallest cren - negativity for d ≥ 3 = {min_gap:.3e}"
        ),
    }
}

fn optimizer_families(sound: &mut Soundness) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut where_ = String::new();
    for d in [2, 3] {
        for f in [0.5, 0.75, 0.9, 1.0] {
            let v = optimize(&isotropic_state(f, d).unwrap(), sound);
            let gap = (v - cren_isotropic(f, d).unwrap().value).abs();
            if gap > worst {
                worst = gap;
                where_ = format!("isotropic d={d} F={f}");
            }
        }
        for w in [0.6, 0.75, 0.9, 1.0] {
            let v = optimize(&werner_state(w, d).unwrap(), sound);
            let gap = (v - cren_werner(w, d).unwrap().value).abs();
            if gap > worst {
                worst = gap;
                where_ = format!("werner d={d} W={w}");
            }
        }
    }
    Outcome {
        passed: worst <= 5e-3,
        detail: format!("16 states, worst |Δ| = {worst:.2e} at {where_} (tol 5e-3)"),
    }
}

fn wootters_oracle(sound: &mut Soundness) -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let rank = (i % 4) as usize + 1;
        let rho = random_density(dims(2, 2), rank, 1000 + i).unwrap();
        let v = optimize(&rho, sound);
        let c = wootters_concurrence(&rho).unwrap().value;
        worst = worst.max((v - c).abs());
    }
    Outcome {
        passed: worst <= 5e-3,
        detail: format!("50 states of ranks 1-4, worst |Δ| = {worst:.2e} (tol 5e-3)"),
    }
}

fn g_concavity() -> Outcome {
    let mut rng = rng_from_seed(2024);
    let mut worst = f64::INFINITY;
    for _ in 0..500 {
        let n = [2, 3, 4, 6][rng.random_range(0..4)];
        let d = dims(1, n);
        let r1 = rng.random_range(1..=n);
        let r2 = rng.random_range(1..=n);
        let a = random_density_from_rng(d, r1, &mut rng).unwrap();
        let b = random_density_from_rng(d, r2, &mut rng).unwrap();
        let (ga, gb) = (
            g_function(a.matrix()).unwrap(),
            g_function(b.matrix()).unwrap(),
        );
        for k in 1..=9 {
            let lambda = k as f64 / 10.0;
            let mix = a.mix(&b, lambda).unwrap();
            let violation = g_function(mix.matrix()).unwrap() - (lambda * ga + (1.0 - lambda) * gb);
            worst = worst.min(violation);
        }
    }
    Outcome {
        passed: worst >= -1e-9,
        detail: format!(
            "500 pairs × 9 weights, smallest concavity slack = {worst:.2e} (floor -1e-9)"
        ),
    }
}

fn upper_bound_soundness(sound: &Soundness) -> Outcome {
    Outcome {
        passed: sound.runs > 0 && sound.min_slack + 1e-6 >= 0.0 && sound.witness_failures == 0,
        detail: format!(
            "{} optimizer runs, smallest value - negativity = {:.2e} (floor -1e-6), {} witnesses failing verification",
            sound.runs, sound.min_slack, sound.witness_failures
        ),
    }
}

fn separable_detection(sound: &mut Soundness) -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [2, 3] {
        let mut rng = rng_from_seed(7 + d as u64);
        for i in 0..50 {
            let count = 2 + i % (d * d);
            let rho = random_product_mixture(dims(d, d), count, &mut rng).unwrap();
            worst = worst.max(optimize(&rho, sound));
        }
    }
    Outcome {
        passed: worst <= 5e-3,
        detail: format!("100 product mixtures, largest value = {worst:.2e} (tol 5e-3)"),
    }
}

fn cren_bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cren"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn cli_determinism(dir: &Path) -> Outcome {
    let mut problems = Vec::new();
    let sweep = |name: &str, mode: &str, seed: &str| {
        let out = dir.join(name);
        let o = cren_bin(&[
            "sweep",
            "werner",
            "--d",
            "2",
            "--grid",
            "0.5:1:0.25",
            "--mode",
            mode,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
            "--restarts",
            "4",
        ]);
        (o.status.code(), std::fs::read(out).unwrap_or_default())
    };
    for mode in ["closed", "both"] {
        let a = sweep(&format!("{mode}_a.csv"), mode, "7");
        let b = sweep(&format!("{mode}_b.csv"), mode, "7");
        if a.0 != Some(0) || b.0 != Some(0) {
            problems.push(format!("sweep {mode} exited {:?}/{:?}", a.0, b.0));
        } else if a.1 != b.1 || a.1.is_empty() {
            problems.push(format!(
                "sweep {mode} output differs between identical runs"
            ));
        }
    }

    let mut worst: f64 = 0.0;
    for (family, measure, d, param) in [
        ("isotropic", "isotropic-param", "2", 0.0),
        ("isotropic", "isotropic-param", "3", 0.37),
        ("isotropic", "isotropic-param", "4", 1.0),
        ("werner", "werner-param", "2", 0.1),
        ("werner", "werner-param", "3", 0.83),
        ("werner", "werner-param", "4", 1.0),
    ] {
        let path = dir.join(format!("{family}_{d}_{param}.json"));
        let p = path.to_str().unwrap();
        let param_s = param.to_string();
        let w = cren_bin(&["family", family, "--d", d, "--param", &param_s, "--out", p]);
        let m = cren_bin(&["measure", p, "--measure", measure]);
        if w.status.code() != Some(0) || m.status.code() != Some(0) {
            problems.push(format!("{family} d={d} round trip failed"));
            continue;
        }
        let rec: serde_json::Value = serde_json::from_slice(&m.stdout).unwrap();
        worst = worst.max((rec["value"].as_f64().unwrap() - param).abs());
    }
    if worst > 1e-12 {
        problems.push(format!("parameter recovery error {worst:.2e}"));
    }
    Outcome {
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("CSV byte-identical across reruns, worst parameter recovery {worst:.2e} (tol 1e-12)")
        } else {
            problems.join("; ")
        },
    }
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut sound = Soundness::default();
    let mut failures = 0;
    let mut report = |id: usize, name: &str, limit: Duration, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let passed = out.passed && in_time;
        if !passed {
            failures += 1;
        }
        println!(
            "{} [{id:>2}] {name}: {} in {:.2}s (limit {}s{})",
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", exceeded" },
        );
    };
    let secs = Duration::from_secs;

    report(1, "pure-state consistency", secs(10), &mut pure_consistency);
    report(
        2,
        "partial-transpose spectrum",
        secs(5),
        &mut partial_transpose_spectrum,
    );
    report(
        3,
        "isotropic closed form",
        secs(1),
        &mut isotropic_closed_form,
    );
    report(4, "werner gap", secs(1), &mut werner_gap);
    report(5, "optimizer vs closed forms", secs(300), &mut || {
        optimizer_families(&mut sound)
    });
    report(6, "2⊗2 concurrence oracle", secs(180), &mut || {
        wootters_oracle(&mut sound)
    });
    report(7, "g concavity", secs(10), &mut g_concavity);
    report(8, "upper-bound soundness", secs(1), &mut || {
        upper_bound_soundness(&sound)
    });
    report(9, "separable detection", secs(180), &mut || {
        separable_detection(&mut sound)
    });
    report(10, "cli determinism and round trip", secs(5), &mut || {
        cli_determinism(dir.path())
    });

    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
