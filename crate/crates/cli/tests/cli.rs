//! Black-box tests of the `smithcalc` binary: the exit-code contract
//! (0 = verified, 1 = verification failure, 2 = usage error), output
//! determinism, the JSON schema marker, and the emit → tamper → replay
//! flow, all through `std::process::Command`.

use std::path::PathBuf;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_smithcalc"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        output.status.code().expect("no signal"),
        String::from_utf8(output.stdout).expect("utf-8 stdout"),
        String::from_utf8(output.stderr).expect("utf-8 stderr"),
    )
}

/// A scratch path unique to this test process.
fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("smithcalc-cli-test-{}-{name}", std::process::id()))
}

#[test]
fn verified_commands_exit_zero() {
    let commands: &[&[&str]] = &[
        &["classify", "sigma - 1"],
        &["classify", "-V_SO3", "--max-degree", "12"],
        &["verify-lemma", "pullchar"],
        &["verify-lemma", "difference_spin_plus"],
        &["verify-lemma", "difference_spin_minus"],
        &["verify-lemma", "four_sigma_spin"],
        &["verify-lemma", "two_vso3_spin"],
        &["equiv", "MTPinHminus", "MTSpinH ^ Thom(BZ2, sigma - 1)"],
        &["rewrite", "Thom(BZ2, 3*sigma)"],
        &["fibseq", "0", "sigma"],
        &["fibseq", "0", "V_SO3"],
        &["verify", "main-thm"],
        &["verify", "spinc-spinh"],
        &["ranks", "SpinH", "--max-degree", "40"],
        &["rank-equality", "--kmax", "8"],
        &["les-check"],
        &["catalog"],
    ];
    for args in commands {
        let (code, stdout, stderr) = run(args);
        assert_eq!(code, 0, "`{args:?}` should verify\nstdout: {stdout}\nstderr: {stderr}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[(&[&str], &str)] = &[
        (&["classify", "sigma +"], "parse error"),
        (&["equiv", "MTPinHminus", "garbage("], "parse error"),
        (&["verify-lemma", "bogus"], "unknown lemma"),
        (
            &["equiv", "MTSpinH", "MTSpinH", "--depth", "0"],
            "invalid search depth",
        ),
        (&["ranks", "SpinJ"], "unknown theory tag"),
        (&["rewrite"], "exactly one of"),
        (
            &["rewrite", "MTSpinH", "--replay", "somewhere.json"],
            "exactly one of",
        ),
        (&["fibseq", "sigma", "V_SO3"], "base mismatch"),
        (
            &["les-check", "--spec", "/nonexistent/les.json"],
            "cannot read",
        ),
        (&["catalog", "--catalog", "/nonexistent/cat.json"], "cannot read"),
    ];
    for (args, needle) in cases {
        let (code, stdout, stderr) = run(args);
        assert_eq!(code, 2, "`{args:?}` is a usage error\nstdout: {stdout}");
        assert!(
            stderr.contains(needle),
            "`{args:?}` stderr should mention `{needle}`, got: {stderr}"
        );
    }
    // Clap's own argument errors also exit 2.
    let (code, _, _) = run(&["no-such-subcommand"]);
    assert_eq!(code, 2);
}

#[test]
fn verification_failures_exit_one() {
    // A genuine non-equivalence: the search exhausts its depth.
    let (code, stdout, _) = run(&["equiv", "MTSpinC", "MTSpinH", "--depth", "3"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("equivalence: not found within depth 3"));

    // Domain errors of the fiber-sequence constructor.
    let (code, _, stderr) = run(&["fibseq", "0", "0"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("W must contain a genuine sphere bundle"));
    let (code, _, stderr) = run(&["fibseq", "0", "R^3"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("no sphere-bundle identification available for W"));
}

#[test]
fn json_documents_carry_schema_one() {
    let commands: &[&[&str]] = &[
        &["classify", "sigma - 1", "--format", "json"],
        &["verify-lemma", "pullchar", "--format", "json"],
        &["rewrite", "Thom(BZ2, 3*sigma)", "--format", "json"],
        &["fibseq", "0", "sigma", "--format", "json"],
        &["verify", "main-thm", "--format", "json"],
        &["verify", "spinc-spinh", "--format", "json"],
        &["ranks", "SpinC", "--max-degree", "24", "--format", "json"],
        &["rank-equality", "--kmax", "4", "--format", "json"],
        &["les-check", "--format", "json"],
        &["catalog", "--format", "json"],
    ];
    for args in commands {
        let (code, stdout, _) = run(args);
        assert_eq!(code, 0, "`{args:?}`");
        let doc: serde_json::Value =
            serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("`{args:?}`: {e}"));
        assert_eq!(doc["schema"], 1, "`{args:?}` carries the schema marker");
    }
}

#[test]
fn output_is_byte_for_byte_deterministic() {
    for args in [
        vec!["catalog", "--format", "json"],
        vec!["verify", "main-thm", "--format", "json"],
        vec!["verify", "spinc-spinh"],
        vec!["ranks", "SpinH", "--max-degree", "40", "--format", "json"],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first, second, "`{args:?}` runs identically twice");
    }
}

#[test]
fn emitted_certificate_replays_and_tampering_is_rejected() {
    let cert_path = scratch("cert.json");
    let cert_str = cert_path.to_str().unwrap();

    let (code, _, _) = run(&["verify", "main-thm", "--emit", cert_str]);
    assert_eq!(code, 0);

    let (code, stdout, _) = run(&["rewrite", "--replay", cert_str]);
    assert_eq!(code, 0);
    assert!(stdout.contains("replay: accepted"));

    // Corrupt the 4 sigma - 4 witness: its total class (1 + a)^4 = 1 + a^4
    // becomes 1 + a^2, which is no longer spin.
    let text = std::fs::read_to_string(&cert_path).unwrap();
    assert!(text.contains("1 + a^4"), "certificate records the witness class");
    let tampered_path = scratch("tampered.json");
    std::fs::write(&tampered_path, text.replace("1 + a^4", "1 + a^2")).unwrap();

    let (code, stdout, _) = run(&["rewrite", "--replay", tampered_path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stdout.contains("replay: rejected"), "stdout: {stdout}");

    // A syntactically broken certificate is a usage error, not a failure.
    let broken_path = scratch("broken.json");
    std::fs::write(&broken_path, "{ not json").unwrap();
    let (code, _, stderr) = run(&["rewrite", "--replay", broken_path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("invalid certificate file"));

    for p in [cert_path, tampered_path, broken_path] {
        let _ = std::fs::remove_file(p);
    }
}

#[test]
fn les_spec_files_drive_the_checker() {
    let series = |label: &str, coefficients: Vec<u64>| {
        serde_json::json!({ "label": label, "coefficients": coefficients })
    };

    // Zero C with shift 3: every degree is forced.
    let good_path = scratch("les-good.json");
    let good = serde_json::json!({
        "schema": 1,
        "shift": 3,
        "a": series("A", vec![1; 9]),
        "b": series("B", vec![1; 9]),
        "c": series("C", vec![0; 9]),
    });
    std::fs::write(&good_path, good.to_string()).unwrap();
    let (code, stdout, _) = run(&["les-check", "--spec", good_path.to_str().unwrap()]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("all requested degrees forced: yes"));

    // A nonzero C_6 flanks degree 8 (mod 4), so the claim is withheld.
    let flank_path = scratch("les-flank.json");
    let mut c = vec![0u64; 9];
    c[6] = 1;
    let flank = serde_json::json!({
        "schema": 1,
        "shift": 3,
        "modulus": 4,
        "residue": 0,
        "a": series("A", vec![1; 9]),
        "b": series("B", vec![1; 9]),
        "c": series("C", c),
    });
    std::fs::write(&flank_path, flank.to_string()).unwrap();
    let (code, stdout, _) = run(&["les-check", "--spec", flank_path.to_str().unwrap()]);
    assert_eq!(code, 1, "stdout: {stdout}");
    assert!(stdout.contains("withheld degrees: 8"));

    // Shift 0 needs the flank C_9, which is beyond the pattern's cutoff.
    let under_path = scratch("les-under.json");
    let under = serde_json::json!({
        "schema": 1,
        "shift": 0,
        "a": series("A", vec![1; 9]),
        "b": series("B", vec![1; 9]),
        "c": series("C", vec![0; 9]),
    });
    std::fs::write(&under_path, under.to_string()).unwrap();
    let (code, _, stderr) = run(&["les-check", "--spec", under_path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("underdetermined LES"));

    // Wrong schema number and malformed JSON are usage errors.
    let schema_path = scratch("les-schema.json");
    std::fs::write(
        &schema_path,
        serde_json::json!({
            "schema": 2,
            "shift": 3,
            "a": series("A", vec![1; 9]),
            "b": series("B", vec![1; 9]),
            "c": series("C", vec![0; 9]),
        })
        .to_string(),
    )
    .unwrap();
    let (code, _, stderr) = run(&["les-check", "--spec", schema_path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unsupported schema 2"));

    let bad_path = scratch("les-bad.json");
    std::fs::write(&bad_path, "[1, 2").unwrap();
    let (code, _, stderr) = run(&["les-check", "--spec", bad_path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("invalid LES spec file"));

    for p in [good_path, flank_path, under_path, schema_path, bad_path] {
        let _ = std::fs::remove_file(p);
    }
}

#[test]
fn catalog_files_override_the_bundled_entries() {
    let good_path = scratch("cat-good.json");
    let good = serde_json::json!([
        {
            "name": "example_2",
            "degree": 2,
            "free_rank": 1,
            "torsion": [2, 4],
            "citation": "worked example"
        }
    ]);
    std::fs::write(&good_path, good.to_string()).unwrap();
    let (code, stdout, _) = run(&["catalog", "--catalog", good_path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("example_2"));
    assert!(
        !stdout.contains("pin_minus_2"),
        "the file replaces the bundled entries"
    );

    // 6 is not a prime power, so the group is not in canonical form.
    let bad_path = scratch("cat-bad.json");
    let bad = serde_json::json!([
        {
            "name": "broken",
            "degree": 1,
            "free_rank": 0,
            "torsion": [6],
            "citation": "nowhere"
        }
    ]);
    std::fs::write(&bad_path, bad.to_string()).unwrap();
    let (code, _, stderr) = run(&["catalog", "--catalog", bad_path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("invalid catalog entry `broken`"));

    for p in [good_path, bad_path] {
        let _ = std::fs::remove_file(p);
    }
}

#[test]
fn certificate_emitted_by_equiv_matches_the_replay_contract() {
    let path = scratch("equiv-cert.json");
    let (code, _, _) = run(&[
        "equiv",
        "MTSpin ^ Thom(BZ2, -(3*sigma - 3))",
        "MTSpin ^ Thom(BZ2, sigma - 1)",
        "--emit",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["schema"], 1);
    assert!(doc["steps"].is_array());
    let (code, stdout, _) = run(&["rewrite", "--replay", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("replay: accepted"));
    let _ = std::fs::remove_file(path);
}
