use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

fn hypercap(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hypercap")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = hypercap(args);
    assert_eq!(code, 0, "{args:?}: {stderr}");
    serde_json::from_str(&stdout).expect("valid JSON")
}

fn temp_input(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn exact_permanent_of_identity() {
    let v = json(&["exact", "--input", &fixture("I3.json"), "--what", "permanent"]);
    assert_eq!(v["value"], "1");
    assert_eq!(v["command"], "exact");
    assert_eq!(v["config"]["what"], "permanent");
}

#[test]
fn exact_rational_values() {
    let v = json(&["exact", "--input", &fixture("J3.json")]);
    assert_eq!(v["value"], "2/9");
    let v = json(&["exact", "--input", &fixture("tuple_complex2.json"), "--what", "mixed-disc"]);
    // mixed derivative of det(t A + s B) for 2 x 2 matrices: tr A tr B - tr AB = 12 - 5
    assert_eq!(v["value"], "7", "{v}");
}

#[test]
fn perm_bounds_on_uniform_matrix() {
    let v = json(&["perm-bounds", "--input", &fixture("J3.json")]);
    let lower = v["coefficient_lower"].as_f64().unwrap();
    let upper = v["coefficient_upper"].as_f64().unwrap();
    let tol = v["config"]["tol"].as_f64().unwrap();
    assert!(lower >= 2.0 / 9.0 * (1.0 - tol) && lower <= 2.0 / 9.0, "{lower}");
    assert!((upper - 1.0).abs() < 1e-8);
    assert_eq!(v["factor_exact"], "2/9");
}

#[test]
fn capacity_report_fields() {
    let v = json(&["capacity", "--input", &fixture("regular3.json"), "--tol", "1e-6"]);
    for key in ["cap_estimate", "gap_bound", "minimizer", "status", "iterations"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["status"], "converged");
    // J₄ - I₄ is 3-regular, so Cap = 3⁴
    assert!((v["cap_estimate"].as_f64().unwrap() - 81.0).abs() < 1e-6);
}

#[test]
fn scale_and_approx() {
    let v = json(&["scale", "--input", &fixture("diag2.json")]);
    assert_eq!(v["status"], "converged");
    let v = json(&["scale", "--input", &fixture("det_identity3.json")]);
    assert!(v["ds_defect"].as_f64().unwrap() < 1e-8, "{v}");
    // capacity of the remark polynomial is not attained
    assert_eq!(hypercap(&["scale", "--input", &fixture("remark.json")]).0, 1);
    let v = json(&["approx-coef", "--input", &fixture("J3.json"), "--improve", "1"]);
    let f = v["estimate"].as_f64().unwrap();
    assert!(f >= 2.0 / 9.0 - 1e-12);
    assert_eq!(v["derivatives_taken"], 2);
}

#[test]
fn structure_commands() {
    let v = json(&["support", "--input", &fixture("remark.json"), "--r", "0,2,0,2"]);
    assert_eq!(v["member"], true);
    let v = json(&["support", "--input", &fixture("remark.json")]);
    assert_eq!(v["submodularity"]["submodular"], false);
    let v = json(&["newton", "--input", &fixture("J3.json"), "--point", "1,1,1"]);
    assert_eq!(v["member"], true);
    let v = json(&["newton", "--input", &fixture("remark.json"), "--point", "2,0,2,0"]);
    assert_eq!(v["member"], false);
    assert_eq!(hypercap(&["newton", "--input", &fixture("J3.json"), "--point", "3,-1,1"]).0, 2);
    let v = json(&["indecomposable", "--input", &fixture("diag2.json")]);
    assert_eq!(v["indecomposable"], false);
    assert!(v["decomposition"]["part"].is_array(), "{v}");
    let v = json(&["indecomposable", "--input", &fixture("J3.json")]);
    assert_eq!(v["indecomposable"], true);
}

#[test]
fn checks() {
    let v = json(&["check", "--input", &fixture("det_identity3.json"), "--trials", "50"]);
    assert_eq!(v["pass"], true);
    let v = json(&["check", "--input", &fixture("circle.json"), "--trials", "50", "--seed", "7"]);
    assert_eq!(v["pass"], false);
    assert_eq!(v["counterexample"]["kind"], "not-real-rooted");
    for kind in ["af", "newton"] {
        let v = json(&["check", "--input", &fixture("J3.json"), "--kind", kind, "--trials", "20"]);
        assert_eq!(v["pass"], true, "{kind}: {v}");
    }
}

#[test]
fn verify_quick_passes() {
    let (code, stdout, _) = hypercap(&["verify", "--level", "quick"]);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(v["failed"], 0);
    let (code, text, _) = hypercap(&["verify", "--format", "text"]);
    assert_eq!(code, 0);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 30);
}

#[test]
fn reports_are_deterministic() {
    let args = ["check", "--input", &fixture("tuple_complex2.json"), "--trials", "30"];
    assert_eq!(hypercap(&args).1, hypercap(&args).1);
}

#[test]
fn text_format() {
    let (code, text, _) = hypercap(&["exact", "--input", &fixture("I3.json"), "--format", "text"]);
    assert_eq!(code, 0);
    assert!(text.contains("value = 1\n"), "{text}");
}

#[test]
fn exit_codes() {
    let (code, _, stderr) = hypercap(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("Usage"));
    assert_eq!(hypercap(&["--help"]).0, 0);
    assert_eq!(hypercap(&["capacity"]).0, 2);
    assert_eq!(hypercap(&["capacity", "--input", "/no/such/file.json"]).0, 2);

    let bad = temp_input("{\"kind\":\"matrix\",\"n\":2,\"entries\":[[1,-1],[1,1]]}");
    let (code, _, stderr) = hypercap(&["capacity", "--input", bad.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("invalid input"), "{stderr}");

    let garbage = temp_input("not json");
    assert_eq!(hypercap(&["capacity", "--input", garbage.path().to_str().unwrap()]).0, 2);

    assert_eq!(hypercap(&["exact", "--input", &fixture("I3.json"), "--what", "mixed-disc"]).0, 2);
    let triangular = temp_input("{\"kind\":\"matrix\",\"n\":2,\"entries\":[[1,0],[1,1]]}");
    assert_eq!(hypercap(&["approx-coef", "--input", triangular.path().to_str().unwrap()]).0, 2);
    assert_eq!(hypercap(&["capacity", "--input", &fixture("I3.json"), "--tol", "0"]).0, 2);

    // 21 identity matrices: over the exact mixed discriminant cap
    let n = 21;
    let eye: Vec<Vec<u8>> = (0..n).map(|i| (0..n).map(|j| u8::from(i == j)).collect()).collect();
    let mats: Vec<Value> = (0..n).map(|_| serde_json::json!({"re": eye})).collect();
    let big = temp_input(&serde_json::json!({"kind": "tuple", "n": n, "matrices": mats}).to_string());
    let (code, _, stderr) = hypercap(&["exact", "--input", big.path().to_str().unwrap(), "--what", "mixed-disc"]);
    assert_eq!(code, 3, "{stderr}");
}
