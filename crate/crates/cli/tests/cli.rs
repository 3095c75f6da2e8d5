use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn spreadlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spreadlab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn lattice(dir: &Path, name: &str, seed: &str, side: &str, delta: &str) -> PathBuf {
    let out = spreadlab(
        dir,
        &[
            "--seed", seed, "gen", "--kind", "perturbed_lattice", "--side", side, "--delta", delta, "-o", name,
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    dir.join(name)
}

#[test]
fn gen_then_tra_di_and_dual_check_agree() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    lattice(d, "a.json", "1", "4", "1/4");
    lattice(d, "b.json", "2", "4", "1/4");

    let tra = spreadlab(d, &["tra", "a.json", "b.json", "--witness", "w.json"]);
    assert_eq!(code(&tra), 0);
    let tra = stdout_json(&tra);
    assert!(d.join("w.json").exists());

    let di = spreadlab(d, &["di", "a.json", "b.json", "--certificate", "c.json"]);
    assert_eq!(code(&di), 0);
    let di = stdout_json(&di);
    assert_eq!(tra["tra"], di["di"]);
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(d.join("c.json")).unwrap()).unwrap();
    assert!(cert["atoms"].as_array().is_some_and(|a| !a.is_empty()));

    let check = spreadlab(d, &["dual-check", "a.json", "b.json", "--csv-out", "dual.csv"]);
    assert_eq!(code(&check), 0);
    assert_eq!(stdout_json(&check)["agree"], json!(true));
    let csv = std::fs::read_to_string(d.join("dual.csv")).unwrap();
    assert!(csv.starts_with("agree,di,gap,method,tra\ntrue,"));
}

#[test]
fn relation_feasibility_matches_the_optimum() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    lattice(d, "a.json", "1", "4", "1/4");
    lattice(d, "b.json", "2", "4", "1/4");
    let tra = stdout_json(&spreadlab(d, &["tra", "a.json", "b.json"]));
    let value = tra["tra_f64"].as_f64().unwrap();

    let above = format!("{}", value + 0.01);
    let below = format!("{}", value - 0.01);
    let yes = stdout_json(&spreadlab(d, &["tra", "a.json", "b.json", "--relation", &above]));
    let no = stdout_json(&spreadlab(d, &["tra", "a.json", "b.json", "--relation", &below]));
    assert_eq!(yes["feasible"], json!(true));
    assert_eq!(no["feasible"], json!(false));
    let v = &no["violating_set"];
    assert!(v["mass"].as_f64().unwrap() > v["neighbourhood_mass"].as_f64().unwrap());

    let n = 16;
    let allowed = vec![vec![true; n]; n];
    std::fs::write(d.join("rel.json"), json!({ "allowed": allowed }).to_string()).unwrap();
    let all = stdout_json(&spreadlab(d, &["tra", "a.json", "b.json", "--relation-file", "rel.json"]));
    assert_eq!(all["feasible"], json!(true));
}

#[test]
fn duality_suite_writes_csv_and_exits_zero() {
    let tmp = TempDir::new().unwrap();
    let out = spreadlab(
        tmp.path(),
        &["--seed", "1", "suite", "duality", "--sizes", "4..8", "--count", "2", "--csv-out", "du.csv"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["failures"], json!(0));
    let csv = std::fs::read_to_string(tmp.path().join("du.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,tra,di,gap"));
    assert_eq!(lines.count(), 5 * 3 * 2);
    assert!(!tmp.path().join("spreadlab-replay.json").exists());
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&spreadlab(tmp.path(), &["suite", "bogus"])), 2);
}

#[test]
fn missing_input_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = spreadlab(tmp.path(), &["tra", "nope.json", "nope.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));
}

#[test]
fn bad_rational_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = spreadlab(tmp.path(), &["gen", "--kind", "perturbed_lattice", "--delta", "1/0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn same_seed_gives_identical_output() {
    let tmp = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = spreadlab(
            tmp.path(),
            &["--seed", "7", "suite", "duality", "--sizes", "4..5", "--count", "2", "--csv-out", name],
        );
        assert_eq!(code(&out), 0);
        (out.stdout, std::fs::read(tmp.path().join(name)).unwrap())
    };
    assert_eq!(run("x.csv"), run("y.csv"));

    let gen = |seed: &str| {
        spreadlab(tmp.path(), &["--seed", seed, "gen", "--kind", "poisson", "--side", "4", "--normalize"]).stdout
    };
    assert_eq!(gen("3"), gen("3"));
    assert_ne!(gen("3"), gen("4"));
}

#[test]
fn field_commands_round_trip() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    lattice(d, "a.json", "1", "4", "1/4");
    lattice(d, "b.json", "2", "4", "1/4");

    let poisson = spreadlab(d, &["--pitch", "1/4", "field", "poisson", "a.json", "-o", "f.json", "--potential", "u.json"]);
    assert_eq!(code(&poisson), 0, "{}", String::from_utf8_lossy(&poisson.stderr));
    let p = stdout_json(&poisson);
    assert_eq!(p["shape"], json!([16, 16]));
    assert!(p["max_weak_residual"].as_f64().unwrap() < 1e-8);

    let ra = stdout_json(&spreadlab(d, &["field", "ra", "f.json"]));
    let (lo, hi) = (ra["ra"].as_f64().unwrap(), ra["ra_tilde"].as_f64().unwrap());
    assert!(lo > 0.0 && hi > 0.0);

    spreadlab(d, &["tra", "a.json", "b.json", "--witness", "w.json"]);
    let asm = spreadlab(d, &["field", "assemble", "w.json", "--r", "1", "-o", "g.json"]);
    assert_eq!(code(&asm), 0, "{}", String::from_utf8_lossy(&asm.stderr));
    assert_eq!(stdout_json(&asm)["shape"], json!([32, 32]));
    assert!(d.join("g.json").exists());

    let b1 = stdout_json(&spreadlab(d, &["potential", "bound1", "u.json"]));
    let b2 = spreadlab(d, &["potential", "bound2", "u.json"]);
    assert_eq!(code(&b2), 0);
    let b2 = stdout_json(&b2);
    assert!(b2["bound"].as_f64().unwrap() <= b1["bound"].as_f64().unwrap());
    assert_eq!(b2["chain_holds"], json!(true));
}

#[test]
fn laczkovich_commands_pass() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let claim = spreadlab(d, &["laczkovich", "claim", "--dim", "3", "--M", "5", "--count", "200", "--csv-out", "c.csv"]);
    assert_eq!(code(&claim), 0);
    assert_eq!(stdout_json(&claim)["failures"], json!(0));
    let csv = std::fs::read_to_string(d.join("c.csv")).unwrap();
    assert_eq!(csv.lines().count(), 201);

    lattice(d, "l.json", "3", "16", "1/5");
    let bound = spreadlab(d, &["laczkovich", "bound", "l.json", "--rho", "2", "--count", "5"]);
    assert_eq!(code(&bound), 0, "{}", String::from_utf8_lossy(&bound.stderr));
    let b = stdout_json(&bound);
    assert_eq!(b["M"], json!(9));
    assert_eq!(b["chains_hold"], json!(true));
}

#[test]
fn replay_of_a_failing_check_fails_again() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    // all mass on one atom: ρ = 1 is far below the true discrepancy ratio
    let instance = json!({
        "dimension": 2,
        "domain": { "kind": "torus", "side": 8 },
        "atoms": [{ "x": [1, 1], "mass": 64 }],
    });
    let forged = json!({
        "suite": "laczkovich",
        "seed": 0,
        "checks": [{
            "check": "pipeline",
            "instance": instance,
            "rho": 1,
            "pitch": "1/8",
            "sets_seed": 0,
            "sets": 3,
        }],
    });
    std::fs::write(d.join("replay.json"), forged.to_string()).unwrap();
    let out = spreadlab(d, &["replay", "replay.json"]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["failures"], json!(1));
}

#[test]
fn json_out_mirrors_stdout() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    lattice(d, "a.json", "1", "4", "0");
    let out = spreadlab(d, &["--json-out", "r/dvl.json", "dvl", "a.json"]);
    assert_eq!(code(&out), 0);
    let mirrored: Value = serde_json::from_str(&std::fs::read_to_string(d.join("r/dvl.json")).unwrap()).unwrap();
    assert_eq!(mirrored, stdout_json(&out));
}
