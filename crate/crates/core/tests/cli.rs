use std::path::PathBuf;
use std::process::Command;

use shellcore::report::Record;

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name]
        .iter()
        .collect();
    path.to_string_lossy().into_owned()
}

fn shellcore(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_shellcore"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn analyze_traffic_lights() {
    let (out, _, code) = shellcore(&["analyze", &fixture("traffic_light.ts")]);
    assert_eq!(code, 0, "{out}");
    assert!(
        out.contains("injective: yes ⇒ ρ∀ complete for next-time"),
        "{out}"
    );
    assert!(out.contains("core for reversal: trivial {∅}"), "{out}");

    let (out, _, code) = shellcore(&["analyze", &fixture("traffic_light_abstract.ts")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("core for next-time: trivial {∅, M}"), "{out}");
}

#[test]
fn analyze_two_state_with_shell() {
    let (out, _, code) = shellcore(&["analyze", &fixture("two_state.ts"), "--ops", "next"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("core_next states: {∅, {1,2}}"), "{out}");
    assert!(out.contains("shell for {next}"), "{out}");
}

#[test]
fn analyze_reports_added_loops() {
    let (out, _, code) = shellcore(&["analyze", &fixture("one_way.ts")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("totalized: added self-loops at"), "{out}");
}

#[test]
fn check_first_example() {
    let (out, _, code) = shellcore(&[
        "check",
        &fixture("two_state.ts"),
        "--formula",
        "G p | F G q",
    ]);
    assert_eq!(code, 0);
    for line in ["α∀ = {1,2}", "state = {2}", "branchable: NO"] {
        assert!(out.contains(line), "{line} missing from {out}");
    }
}

#[test]
fn check_reversal_formula_from_file() {
    let (out, _, code) = shellcore(&[
        "check",
        &fixture("two_state.ts"),
        "--formula",
        "()(rev ()(rev p))",
    ]);
    assert_eq!(code, 0);
    assert!(
        out.contains("α∀ = {1}") && out.contains("state = ∅") && out.contains("branchable: NO"),
        "{out}"
    );

    let (out, _, code) = shellcore(&[
        "check",
        &fixture("two_state.ts"),
        "--formula-file",
        &fixture("formulas/det.ltl"),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("deterministic fragment: yes"), "{out}");
}

#[test]
fn expectations_set_the_exit_code() {
    let path = fixture("two_state.ts");
    assert_eq!(
        shellcore(&["check", &path, "--formula", "p", "--expect", "branchable"]).2,
        0
    );
    let (out, _, code) = shellcore(&[
        "check",
        &path,
        "--formula",
        "p",
        "--expect",
        "not-branchable",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("branchable: YES"), "{out}");
}

#[test]
fn shellcore_on_sign() {
    let (out, _, code) = shellcore(&[
        "shellcore",
        &fixture("sign_plus.lat"),
        "--function",
        "sq",
        "--domain",
        "Sign+",
        "--mode",
        "core",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("result = Sign (removed: [0,9])"), "{out}");

    let (out, _, _) = shellcore(&[
        "shellcore",
        &fixture("sign.lat"),
        "--function",
        "mult",
        "--domain",
        "Sign",
        "--mode",
        "shell",
    ]);
    assert!(out.contains("already complete; result = Sign"), "{out}");

    let (out, _, _) = shellcore(&[
        "shellcore",
        &fixture("sign.lat"),
        "--function",
        "add",
        "--domain",
        "Sign",
        "--mode",
        "core",
    ]);
    assert!(out.contains("round 1:"), "{out}");
}

#[test]
fn witness_windows() {
    let (out, _, code) = shellcore(&["witness", "F", "--window", "4"]);
    assert_eq!(code, 0, "{out}");
    assert!(
        out.contains("join of these closures: {{}, {4}, {-4,-3,-2,-1,0,1,2,3,4}}"),
        "{out}"
    );
    let (out, _, code) = shellcore(&["witness", "neg", "--window", "4"]);
    assert_eq!(code, 1);
    assert!(out.contains("even: incomplete at {-3}"), "{out}");
}

#[test]
fn examples_subcommand_subset() {
    let (out, _, code) = shellcore(&["paper-examples", "--window", "4", "--only", "1,2,3,7"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(
        out.lines().filter(|l| l.starts_with("[pass]")).count(),
        4,
        "{out}"
    );
    let (out, _, code) = shellcore(&["paper-examples", "--window", "4", "--only", "9"]);
    assert_eq!(code, 1);
    assert!(out.contains("[FAIL]"), "{out}");
}

#[test]
fn input_errors_exit_with_two() {
    let (_, err, code) = shellcore(&[
        "--bounds",
        "1,1,1,1",
        "analyze",
        &fixture("traffic_light.ts"),
    ]);
    assert_eq!(code, 2);
    assert!(
        err.contains("universe too small for fixture traffic_light.ts"),
        "{err}"
    );

    let (_, err, code) = shellcore(&["check", &fixture("two_state.ts"), "--formula", "p &"]);
    assert_eq!(code, 2, "{err}");
    let (_, _, code) = shellcore(&["check", &fixture("nope.ts"), "--formula", "p"]);
    assert_eq!(code, 2);
    let (_, _, code) = shellcore(&[
        "shellcore",
        &fixture("sign.lat"),
        "--function",
        "nope",
        "--domain",
        "Sign",
        "--mode",
        "core",
    ]);
    assert_eq!(code, 2);
    let (_, _, code) = shellcore(&["--bounds", "2,2", "analyze", &fixture("two_state.ts")]);
    assert_eq!(code, 2);
}

#[test]
fn structured_output_round_trips() {
    let (out, _, code) = shellcore(&[
        "--format",
        "structured",
        "check",
        &fixture("two_state.ts"),
        "--formula",
        "G p | F G q",
    ]);
    assert_eq!(code, 0);
    let record = Record::parse(&out).expect("structured output parses");
    assert_eq!(record.command, "check");
    assert_eq!(record.verdict("branchable").map(|v| v.holds), Some(false));
    assert_eq!(record.to_structured(), out);
}
