use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fsets(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsets"))
        .args(args)
        .current_dir(dir)
        .env_remove("FSETS_CATALOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(o: Output) -> String {
    assert!(o.status.success(), "failed: {}\n{}", String::from_utf8_lossy(&o.stderr), stdout(&o));
    stdout(&o)
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

#[test]
fn classify_proper_riccati() {
    let t = TempDir::new().unwrap();
    write(t.path(), "r.txt", "order: 1\nmap: (1 + x0)/(3 + x0)\n");
    let out = ok(fsets(t.path(), &["classify", "r.txt"]));
    assert_eq!(out.lines().next().unwrap(), "Proper, R=1/8, topology: ConvergentSequence");
}

#[test]
fn classify_with_bound_parameters() {
    let t = TempDir::new().unwrap();
    write(t.path(), "r.txt", "order: 1\nparams: a, b, c, d\nmap: (a*x0 + b)/(c*x0 + d)\n");
    let out = ok(fsets(t.path(), &["classify", "r.txt", "--set", "a=1", "--set", "b=1", "--set", "c=1", "--set", "d=3"]));
    assert!(out.starts_with("Proper, R=1/8"), "{out}");
}

#[test]
fn classify_reduction_and_constant() {
    let t = TempDir::new().unwrap();
    write(t.path(), "q.txt", "order: 3\nmap: x0*x1/(x0 - x2)\n");
    write(t.path(), "c.txt", "order: 2\nmap: 7\n");
    let out = ok(fsets(t.path(), &["classify", "q.txt"]));
    assert!(out.lines().next().unwrap().starts_with("reduces via"), "{out}");
    let out = ok(fsets(t.path(), &["classify", "c.txt", "--out", "o"]));
    assert_eq!(out.trim(), "Constant");
    let rep = json(&t.path().join("o/classify.json"));
    assert_eq!(rep["degenerate"][0], "constant");
}

#[test]
fn parse_error_exit_code() {
    let t = TempDir::new().unwrap();
    write(t.path(), "bad.txt", "order: 1\nmap: (x0 + \n");
    let o = fsets(t.path(), &["classify", "bad.txt"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn fs_closed_product_surfaces() {
    let t = TempDir::new().unwrap();
    write(t.path(), "p.txt", "order: 2\nmap: x1/(1 + x0*x1)\n");
    ok(fsets(t.path(), &["fs", "p.txt", "--method", "closed", "--depth", "6", "--out", "o"]));
    let a = json(&t.path().join("o/fs.json"));
    assert_eq!(a["verification"]["failures"], 0);
    assert_eq!(a["verification"]["status"]["kind"], "exact_verified");
    assert!(a["verification"]["checked"].as_u64().unwrap() > 0);
}

#[test]
fn fs_symbolic_words() {
    let t = TempDir::new().unwrap();
    write(t.path(), "w.txt", "field: complex\norder: 1\nmap: 1/(x0^2 - 1)\n");
    ok(fsets(t.path(), &["fs", "w.txt", "--method", "symbolic", "--depth", "6", "--out", "o"]));
    let a = json(&t.path().join("o/fs.json"));
    // 2 + 4 + .. + 64 words plus -1, 0, 1
    assert_eq!(a["description"]["points"].as_array().unwrap().len(), 126 + 3);
    assert_eq!(a["verification"]["failures"], 0);
}

#[test]
fn fs_cobweb_long_run() {
    let t = TempDir::new().unwrap();
    write(t.path(), "m.txt", "order: 1\nmap: 1 - 1/(2*x0^3)\n");
    ok(fsets(t.path(), &["fs", "m.txt", "--method", "cobweb", "--depth", "250", "--out", "o"]));
    let a = json(&t.path().join("o/fs.json"));
    assert_eq!(a["description"]["points"].as_array().unwrap().len(), 251);
    assert_eq!(a["verification"]["failures"], 0);
}

#[test]
fn fs_inapplicable_method_names_alternatives() {
    let t = TempDir::new().unwrap();
    write(t.path(), "p.txt", "order: 2\nmap: x1/(1 + x0*x1)\n");
    let o = fsets(t.path(), &["fs", "p.txt", "--method", "cobweb", "--out", "o"]);
    assert_eq!(o.status.code(), Some(4));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("applicable methods: closed"), "{err}");
}

#[test]
fn fs_curves_with_negative_region() {
    let t = TempDir::new().unwrap();
    write(t.path(), "p.txt", "order: 2\nmap: x1/(1 + x0*x1)\n");
    ok(fsets(t.path(), &["fs", "p.txt", "--method", "curves", "--depth", "3", "--region", "-3,3,-3,3", "--out", "o"]));
    assert!(t.path().join("o/curves.csv").exists());
    assert!(t.path().join("o/curves.svg").exists());
}

#[test]
fn grid_is_deterministic_and_replays() {
    let t = TempDir::new().unwrap();
    write(t.path(), "e.txt", "order: 2\nparams: A, B\nmap: A/x0 + B/x1\n");
    let args = ["grid", "e.txt", "--set", "A=1", "--set", "B=-1", "--res", "64", "--horizon", "8"];
    let mut a1 = args.to_vec();
    a1.extend(["--out", "g1", "--threads", "1"]);
    let mut a2 = args.to_vec();
    a2.extend(["--out", "g2", "--threads", "4"]);
    ok(fsets(t.path(), &a1));
    ok(fsets(t.path(), &a2));
    let p1 = std::fs::read(t.path().join("g1/raster.png")).unwrap();
    let p2 = std::fs::read(t.path().join("g2/raster.png")).unwrap();
    assert_eq!(p1, p2);
    let out = ok(fsets(t.path(), &["replay", "g1/manifest.json"]));
    assert!(out.contains("\"identical\": true"), "{out}");
}

#[test]
fn replay_detects_changed_input() {
    let t = TempDir::new().unwrap();
    write(t.path(), "e.txt", "order: 2\nmap: 1/x0 + 1/x1\n");
    ok(fsets(t.path(), &["grid", "e.txt", "--res", "16", "--out", "g"]));
    write(t.path(), "e.txt", "order: 2\nmap: 1/x0 - 1/x1\n");
    let o = fsets(t.path(), &["replay", "g/manifest.json"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn grid_rejects_bad_resolution() {
    let t = TempDir::new().unwrap();
    write(t.path(), "e.txt", "order: 2\nmap: 1/x0 + 1/x1\n");
    let o = fsets(t.path(), &["grid", "e.txt", "--res", "5000", "--out", "g"]);
    assert_eq!(o.status.code(), Some(9));
}

#[test]
fn catalog_round_trip() {
    let t = TempDir::new().unwrap();
    let out = ok(fsets(t.path(), &["catalog", "--root", "cat", "seed"]));
    assert_eq!(out.lines().count(), 26);
    let again = ok(fsets(t.path(), &["catalog", "--root", "cat", "seed"]));
    assert!(again.lines().all(|l| l.contains(" existing ")));
    let q = ok(fsets(t.path(), &["catalog", "--root", "cat", "query", "--family", "riccati1"]));
    let id = q.split_whitespace().next().unwrap().to_string();

    write(t.path(), "r.txt", "order: 1\nmap: (1 + x0)/(3 + x0)\n");
    ok(fsets(t.path(), &["fs", "r.txt", "--method", "closed", "--depth", "8", "--out", "o"]));
    ok(fsets(t.path(), &["catalog", "--root", "cat", "attach", &id, "o/fs.json"]));
    let q = ok(fsets(t.path(), &["catalog", "--root", "cat", "query", "--status", "exact"]));
    assert!(q.starts_with(&id), "{q}");

    // a result for a different equation is refused
    let other = if id == "eq-0002" { "eq-0003" } else { "eq-0002" };
    let o = fsets(t.path(), &["catalog", "--root", "cat", "attach", other, "o/fs.json"]);
    assert_eq!(o.status.code(), Some(5));

    ok(fsets(t.path(), &["catalog", "--root", "cat", "link", &id, other, "--kind", "conjugate"]));
    let show = ok(fsets(t.path(), &["catalog", "--root", "cat", "show", other]));
    assert!(show.contains("conjugate"));
    let v1 = ok(fsets(t.path(), &["catalog", "--root", "cat", "show", &id, "--version", "1"]));
    assert!(v1.contains("\"results\": []"));
    let export = ok(fsets(t.path(), &["catalog", "--root", "cat", "export"]));
    assert_eq!(export.matches("---").count(), 25);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let t = TempDir::new().unwrap();
    let o = fsets(t.path(), &["classify", "x.txt", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_lists_flags() {
    let t = TempDir::new().unwrap();
    let out = ok(fsets(t.path(), &["fs", "--help"]));
    for flag in ["--method", "--depth", "--set", "--out", "--seed", "--region"] {
        assert!(out.contains(flag), "missing {flag}");
    }
    let out = ok(fsets(t.path(), &["grid", "--help"]));
    for flag in ["--res", "--horizon", "--format", "--axes", "--threads"] {
        assert!(out.contains(flag), "missing {flag}");
    }
}
