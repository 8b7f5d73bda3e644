use std::path::PathBuf;
use std::process::{Command, Output};

fn iwa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwa")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("iwa-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn bernoulli_number() {
    let o = iwa(&["bernoulli", "12"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("-691/2730"));
    let j: serde_json::Value = serde_json::from_slice(&iwa(&["--json", "bernoulli", "12"]).stdout).unwrap();
    assert_eq!(j["B"], "-691/2730");
}

#[test]
fn kummer_congruence_value() {
    // L_5(-1, omega^2) = -(1 - 5) B_2 / 2 = 1/3, which is 17 mod 25
    let o = iwa(&["--precision", "2", "--json", "lp-eval", "--p", "5", "--chi", "teich:2", "--at", "-1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("17"), "{}", s);
}

#[test]
fn bad_character_is_invalid_input() {
    let o = iwa(&["lp-series", "--p", "5", "--chi", "foo"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown character"));
    // p must be prime
    assert_eq!(iwa(&["lp-series", "--p", "6", "--chi", "triv"]).status.code(), Some(2));
}

#[test]
fn irregular_pair_at_37() {
    let o = iwa(&["--precision", "3", "--json", "mu-lambda", "--p", "37", "--chi", "teich:31"]);
    assert!(o.status.success());
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["mu"], 0);
    assert_eq!(j["lambda"], 1);
}

#[test]
fn char_ideal_from_json_and_csv() {
    // det = (3 + T)(1 + T^2), whose ideal is (T + 3)
    let json = scratch("m.json", r#"{"p": 3, "M": 4, "N": 6, "entries": [[[3, 1], [0]], [[1], [1, 0, 1]]]}"#);
    let a = iwa(&["--json", "char-ideal", "--matrix", json.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let csv = scratch("m.csv", "# rows of T-coefficients\n3 1,0\n1,1;0;1\n");
    let b = iwa(&["--json", "--precision", "4", "--trunc", "6", "char-ideal", "--matrix", csv.to_str().unwrap(), "--p", "3"]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    let (ja, jb): (serde_json::Value, serde_json::Value) =
        (serde_json::from_slice(&a.stdout).unwrap(), serde_json::from_slice(&b.stdout).unwrap());
    assert_eq!(ja, jb);
    assert!(stdout(&a).contains("\"lambda\": 1"));
}

#[test]
fn singular_matrix_is_reported() {
    let json = scratch("z.json", r#"{"p": 3, "M": 4, "N": 6, "entries": [[[1], [1]], [[1], [1]]]}"#);
    let o = iwa(&["char-ideal", "--matrix", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_is_deterministic() {
    let args = ["--json", "verify", "compat", "--primes", "3,5", "--max-k", "2", "--max-cyclo", "20"];
    let a = iwa(&args);
    let b = iwa(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("duration_ms"));
}
