use std::path::PathBuf;

use algebroid::report::{Outcome, Report};
use algebroid::{run, Run};

fn cli(args: &[&str]) -> Run {
    run(std::iter::once("algebroid").chain(args.iter().copied()))
}

fn structured(args: &[&str]) -> (i32, Report) {
    let mut full = args.to_vec();
    full.extend(["--format", "structured"]);
    let r = cli(&full);
    let mut rep: Report = serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}{}", r.stdout, r.stderr));
    assert!(rep.elapsed_ms.is_some());
    rep.elapsed_ms = None;
    (r.code, rep)
}

/// Set `UPDATE_GOLDEN=1` to rewrite the files.
fn golden(file: &str, args: &[&str], code: i32) {
    let (got_code, rep) = structured(args);
    assert_eq!(got_code, code, "{args:?}");
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(file);
    let text = rep.to_json();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, want, "{file}");
}

#[test]
fn golden_reports() {
    golden("check_zcr_kdv.json", &["check-zcr", "--zcr", "kdv_sl2"], 0);
    golden("check_zcr_heat.json", &["check-zcr", "--zcr", "kdv_sl2", "--pde", "heat"], 1);
    golden("q_squared_so3_n2.json", &["q-squared", "--algebra", "so3", "--n", "2"], 0);
    golden("cme_bad_so3.json", &["cme", "--algebra", "bad_so3"], 1);
    golden("classical_q_ce_so3.json", &["classical-q", "--algebroid", "ce_so3"], 0);
    golden("transport_q_shift.json", &["transport-q", "--gauge", "shift_x"], 0);
}

#[test]
fn reruns_are_identical() {
    for args in [
        &["bianchi", "--algebra", "sl2", "--samples", "3", "--seed", "7"][..],
        &["flow", "--algebra", "so3", "--samples", "2", "--seed", "3"],
        &["cochain", "--algebroid", "poisson_const", "--seed", "11"],
    ] {
        let (_, a) = structured(args);
        let (_, b) = structured(args);
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(cli(args).stdout, cli(args).stdout);
    }
    let (_, a) = structured(&["noether", "--algebra", "so3", "--samples", "2", "--seed", "1"]);
    let (_, b) = structured(&["noether", "--algebra", "so3", "--samples", "2", "--seed", "2"]);
    assert_ne!(a.stats, b.stats);
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["validate-algebra", "--algebra", "so3"]).code, 0);
    assert_eq!(cli(&["validate-algebra", "--algebra", "bad_so3"]).code, 1);
    assert_eq!(cli(&["q-squared"]).code, 2);
    assert_eq!(cli(&["q-squared", "--algebra", "no_such_model"]).code, 2);
    assert_eq!(cli(&["no-such-command"]).code, 2);
    assert_eq!(cli(&["q-squared", "--algebra", "so3", "--n", "0"]).code, 2);
    assert_eq!(cli(&["action-el", "--algebra", "so3", "--n", "2"]).code, 2);
    assert_eq!(cli(&["check-zcr", "--zcr", "kdv_sl2", "--max-jet-order", "2"]).code, 3);
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn model_files_from_disk() {
    let dir = std::env::temp_dir().join(format!("algebroid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let alg = dir.join("h3.toml");
    std::fs::write(&alg, "name = \"heisenberg\"\ndim = 3\nbrackets = [\"[e1,e2] = e3\"]\n").unwrap();
    let (code, rep) = structured(&["q-squared", "--algebra", alg.to_str().unwrap(), "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(rep.outcome, Outcome::Verified);
    assert_eq!(rep.inputs[0].source, alg.display().to_string());

    let cochain = dir.join("w.toml");
    std::fs::write(&cochain, "k = 1\n[[value]]\nat = [1]\nf = \"x1^2\"\n[[value]]\nat = [2]\nf = \"3\"\n").unwrap();
    let r = cli(&["cochain", "--algebroid", "affine_line", "--cochain", cochain.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);

    let broken = dir.join("broken.toml");
    std::fs::write(&broken, "name = \"x\"\ndim = 2\nbrackets = [\"[e1,e2] = e3 +\"]\n").unwrap();
    let r = cli(&["validate-algebra", "--algebra", broken.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("broken.toml"), "{}", r.stderr);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn functional_arguments() {
    let r = cli(&["schouten", "--algebra", "so3", "--f", "as1x*b2", "--g", "bs3*a1x"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("[[F,G]]: bs3*b2"), "{}", r.stdout);
    // an even generator is rejected
    assert_eq!(cli(&["flow", "--algebra", "so3", "--f", "a1x*bs2"]).code, 2);
    // mixed parity
    assert_eq!(cli(&["schouten", "--algebra", "so3", "--f", "b1 + a1x", "--g", "b2"]).code, 2);
}
