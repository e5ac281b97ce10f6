use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn robact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

/// `|v><v|` for a real vector, as `[re, im]` pairs.
fn projector(v: &[f64]) -> Vec<[f64; 2]> {
    let n = v.len();
    (0..n * n).map(|k| [v[k / n] * v[k % n], 0.0]).collect()
}

fn mix(a: &[[f64; 2]], b: &[[f64; 2]], t: f64) -> Vec<[f64; 2]> {
    a.iter()
        .zip(b)
        .map(|(x, y)| [t * x[0] + (1.0 - t) * y[0], t * x[1] + (1.0 - t) * y[1]])
        .collect()
}

fn bell(d: usize) -> Vec<f64> {
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0 / (d as f64).sqrt();
    }
    v
}

/// `F phi_d + (1 - F)(I - phi_d)/(d^2 - 1)`.
fn isotropic(d: usize, fid: f64) -> Vec<[f64; 2]> {
    let n = d * d;
    let phi = projector(&bell(d));
    let w = (1.0 - fid) / (n as f64 - 1.0);
    (0..n * n)
        .map(|k| {
            let id = if k / n == k % n { 1.0 } else { 0.0 };
            [fid * phi[k][0] + w * (id - phi[k][0]), 0.0]
        })
        .collect()
}

/// Amplitudes on `A2 A3 B2 B3` (dims 2,2,2,2) from a predicate on `(i, a, j, b)`.
fn four_party(pick: impl Fn(usize, usize, usize, usize) -> bool) -> Vec<f64> {
    let mut v = vec![0.0; 16];
    for i in 0..2 {
        for a in 0..2 {
            for j in 0..2 {
                for b in 0..2 {
                    if pick(i, a, j, b) {
                        v[((i * 2 + a) * 2 + j) * 2 + b] = 0.5;
                    }
                }
            }
        }
    }
    v
}

fn lab_local() -> Vec<[f64; 2]> {
    projector(&four_party(|i, a, j, b| i == a && j == b))
}

fn swapping() -> Vec<[f64; 2]> {
    projector(&four_party(|i, a, j, b| i == j && a == b))
}

struct Docs(TempDir);

impl Docs {
    fn new() -> Self {
        Docs(tempfile::tempdir().unwrap())
    }

    fn raw(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn state(&self, name: &str, dims: [usize; 2], matrix: &[[f64; 2]]) -> PathBuf {
        self.raw(name, &json!({ "dims": dims, "matrix": matrix }).to_string())
    }

    fn resource(&self, name: &str, matrix: &[[f64; 2]]) -> PathBuf {
        let doc = json!({ "dims": [4, 4], "matrix": matrix, "fourParty": { "m": 2, "d": 2 } });
        self.raw(name, &doc.to_string())
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn robustness_of_bell_state_is_one() {
    let docs = Docs::new();
    let p = docs.state("bell.json", [2, 2], &projector(&bell(2)));
    let r = report(&robact(&["robustness", s(&p)]));
    assert_eq!(r["command"], "robustness");
    let res = &r["results"];
    assert!((f(&res["value"]) - 1.0).abs() < 1e-6);
    assert_eq!(res["relaxation"], "ppt-exact");
    assert!((f(&res["witness"]["valueOnTarget"]) + 1.0).abs() < 1e-6);
    assert!(f(&res["witness"]["normalizationBound"]) <= 1.0 + 1e-6);
    assert!(r["provenance"]["solverIterations"].as_u64().unwrap() > 0);
}

#[test]
fn separable_state_has_zero_robustness_and_zero_witness() {
    let docs = Docs::new();
    let p = docs.state("prod.json", [2, 2], &projector(&[1.0, 0.0, 0.0, 0.0]));
    let r = report(&robact(&["robustness", s(&p)]));
    assert!(f(&r["results"]["value"]).abs() < 1e-8);
    let w = r["results"]["witness"]["operator"]["matrix"].as_array().unwrap();
    assert!(w.iter().flat_map(|z| z.as_array().unwrap()).all(|x| f(x) == 0.0));
}

#[test]
fn qutrit_pair_reports_lower_bound_relaxation() {
    let docs = Docs::new();
    let p = docs.state("iso3.json", [3, 3], &isotropic(3, 0.8));
    let r = report(&robact(&["robustness", s(&p), "--tol", "1e-9"]));
    assert_eq!(r["results"]["relaxation"], "ppt-lower-bound");
    // isotropic robustness is dF - 1
    assert!((f(&r["results"]["value"]) - 1.4).abs() < 1e-6);
    assert_eq!(r["inputs"]["tolerance"], 1e-9);
}

#[test]
fn teleport_examples() {
    let docs = Docs::new();
    let p = docs.state("bell.json", [2, 2], &projector(&bell(2)));
    let r = report(&robact(&["teleport", s(&p), "-d", "2"]));
    assert!((f(&r["results"]["teleportFidelity"]) - 1.0).abs() < 1e-12);
    assert_eq!(r["results"]["beatsClassical"], true);
    assert!(r["results"].get("monteCarlo").is_none());

    for d in [2usize, 3, 4] {
        let p = docs.state("iso.json", [d, d], &isotropic(d, 1.0 / d as f64));
        let r = report(&robact(&["teleport", s(&p), "-d", &d.to_string()]));
        let fid = f(&r["results"]["teleportFidelity"]);
        assert!((fid - 2.0 / (d as f64 + 1.0)).abs() < 1e-12);
        assert_eq!(r["results"]["beatsClassical"], false);
    }
}

#[test]
fn teleport_monte_carlo_cross_check() {
    let docs = Docs::new();
    let p = docs.state("iso.json", [2, 2], &isotropic(2, 0.7));
    let args = ["teleport", s(&p), "-d", "2", "--samples", "20000", "--seed", "5", "--protocol", "direct"];
    let r = report(&robact(&args));
    let mc = &r["results"]["monteCarlo"];
    assert_eq!(mc["samples"], 20000);
    assert_eq!(mc["withinFourStdErrors"], true);
    assert!(f(&mc["stdError"]) > 0.0);
    assert_eq!(r["provenance"]["seed"], 5);
    assert_eq!(report(&robact(&args)), r);
}

#[test]
fn teleport_dimension_mismatch_is_input_error() {
    let docs = Docs::new();
    let p = docs.state("bell.json", [2, 2], &projector(&bell(2)));
    let out = robact(&["teleport", s(&p), "-d", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dims"));
}

#[test]
fn activation_with_lab_local_resource() {
    let docs = Docs::new();
    let rho = docs.resource("rho.json", &lab_local());
    let sigma = docs.state("sigma.json", [2, 2], &isotropic(2, 0.9));
    let r = report(&robact(&["activate", s(&rho), s(&sigma), "--restarts", "20"]));
    let res = &r["results"];
    // this resource turns sigma into a teleport fidelity with ratio 2F - 1
    assert!((f(&res["activationRatio"]) - 0.8).abs() < 1e-6);
    assert!(f(&res["detectionValue"]) < 0.0);
    assert_eq!(res["ratioWithinRobustness"], true);
    assert!((f(&res["robustness"]["value"]) - 0.8).abs() < 1e-6);
    assert_eq!(r["inputs"]["fourParty"], json!({ "m": 2, "d": 2 }));
}

#[test]
fn activation_ratio_is_not_positive_for_separable_sigma() {
    let docs = Docs::new();
    let rho = docs.resource("rho.json", &mix(&lab_local(), &swapping(), 0.5));
    let sigma = docs.state("sigma.json", [2, 2], &projector(&[0.0, 1.0, 0.0, 0.0]));
    let r = report(&robact(&["activate", s(&rho), s(&sigma), "--restarts", "20"]));
    assert!(f(&r["results"]["activationRatio"]) <= 1e-8);
    assert!(f(&r["results"]["robustness"]["value"]).abs() < 1e-8);
}

#[test]
fn swapping_resource_is_refused_as_degenerate() {
    let docs = Docs::new();
    let rho = docs.resource("rho.json", &swapping());
    let sigma = docs.state("sigma.json", [2, 2], &projector(&bell(2)));
    let out = robact(&["activate", s(&rho), s(&sigma), "--restarts", "20"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate spread"));
    assert!(out.stdout.is_empty());
}

#[test]
fn activation_input_errors() {
    let docs = Docs::new();
    let sigma = docs.state("sigma.json", [2, 2], &projector(&bell(2)));
    let no_fp = docs.state("plain.json", [4, 4], &lab_local());
    let out = robact(&["activate", s(&no_fp), s(&sigma)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fourParty"));

    let rho = docs.resource("rho.json", &lab_local());
    let wrong_m = docs.state("sigma3.json", [3, 3], &isotropic(3, 0.5));
    let out = robact(&["activate", s(&rho), s(&wrong_m)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_inputs_exit_with_code_two() {
    let docs = Docs::new();
    let mut non_hermitian = projector(&bell(2));
    non_hermitian[1] = [0.3, 0.0];
    let mut cases = vec![
        (docs.raw("garbage.json", "{ not json"), "line"),
        (docs.raw("short.json", r#"{"dims":[2,2],"matrix":[[1,0]]}"#), "expected 16 entries"),
        (docs.raw("pair.json", r#"{"dims":[1,1],"matrix":[[1,0,0]]}"#), "matrix[0]"),
        (docs.raw("zero.json", r#"{"dims":[0,2],"matrix":[]}"#), "dims"),
        (docs.raw("extra.json", r#"{"dims":[1,1],"matrix":[[1,0]],"foo":1}"#), "foo"),
        (docs.state("herm.json", [2, 2], &non_hermitian), "Hermitian"),
        (docs.state("trace.json", [1, 2], &projector(&[1.0, 1.0])), "trace"),
        (docs.state("neg.json", [1, 2], &[[1.5, 0.0], [0.0, 0.0], [0.0, 0.0], [-0.5, 0.0]]), "negative"),
    ];
    cases.push((docs.0.path().join("missing.json"), "missing.json"));
    for (path, needle) in cases {
        let out = robact(&["robustness", s(&path)]);
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(2), "{}: {err}", path.display());
        assert!(err.contains(needle), "{}: {err}", path.display());
    }
    assert_eq!(robact(&["robustness"]).status.code(), Some(2));
    assert_eq!(robact(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn reports_round_trip_and_matrices_feed_back_in() {
    let docs = Docs::new();
    let p = docs.state("iso.json", [2, 2], &isotropic(2, 0.75));
    let out_path = docs.0.path().join("report.json");
    let out = robact(&["robustness", s(&p), "--out", s(&out_path)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let first: Value = serde_json::from_str(&text).unwrap();
    let second: Value = serde_json::from_str(&serde_json::to_string(&first).unwrap()).unwrap();
    let a = first["results"]["witness"]["operator"]["matrix"].as_array().unwrap();
    let b = second["results"]["witness"]["operator"]["matrix"].as_array().unwrap();
    for (x, y) in a.iter().flat_map(|z| z.as_array().unwrap()).zip(b.iter().flat_map(|z| z.as_array().unwrap())) {
        assert!((f(x) - f(y)).abs() <= 1e-15);
    }
    assert_eq!(first, second);

    // the optimal noise is itself a valid input document
    let noise = docs.raw("noise.json", &first["results"]["optimalNoise"].to_string());
    let r = report(&robact(&["robustness", s(&noise)]));
    assert!(f(&r["results"]["value"]) < 1e-6);
}

#[test]
fn quick_verify_is_deterministic() {
    let docs = Docs::new();
    let a = docs.0.path().join("a.json");
    let b = docs.0.path().join("b.json");
    for p in [&a, &b] {
        let out = robact(&["verify", "--quick", "--seed", "7", "--out", s(p)]);
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(0), "{err}");
        assert_eq!(err.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
    }
    let (a, b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(a, b);
    let r: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(r["results"]["allPassed"], true);
    assert_eq!(r["results"]["criteria"].as_array().unwrap().len(), 10);
    assert_eq!(r["inputs"], json!({ "seed": 7, "quick": true }));
}
