//! Compiles and runs a small C program against include/maoeda.h and the
//! built static library, verifying the header and the ABI end to end.

use std::path::PathBuf;
use std::process::Command;

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "maoeda.h"

int main(void) {
    MaoedaPlan *plan = NULL;
    if (maoeda_plan_new("dtlz2", 3, &plan) != MAOEDA_OK) return 1;
    if (maoeda_plan_set_runs(plan, 1) != MAOEDA_OK) return 2;
    if (maoeda_plan_set_seed(plan, 11) != MAOEDA_OK) return 3;
    if (maoeda_plan_set_neighbor_size(plan, 4) != MAOEDA_OK) return 4;
    if (maoeda_plan_set_budget_total(plan, 3000) != MAOEDA_OK) return 5;
    if (maoeda_plan_set_generation_cap(plan, 1) != MAOEDA_OK) return 6;

    MaoedaOutcome *outcome = NULL;
    if (maoeda_plan_execute(plan, &outcome) != MAOEDA_OK) {
        char buf[256];
        maoeda_last_error(buf, sizeof buf);
        fprintf(stderr, "execute failed: %s\n", buf);
        return 7;
    }
    if (maoeda_outcome_runs(outcome) != 1) return 8;
    double hv = -1.0;
    if (maoeda_outcome_hv_median(outcome, &hv) != MAOEDA_OK) return 9;
    if (!(hv >= 0.0)) return 10;

    if (maoeda_plan_new("bogus", 3, &plan) != MAOEDA_ERR_INVALID_ARGUMENT) return 11;
    char buf[256];
    size_t len = maoeda_last_error(buf, sizeof buf);
    if (len == 0 || strstr(buf, "bogus") == NULL) return 12;

    maoeda_outcome_free(outcome);
    maoeda_plan_free(plan);
    printf("hv=%f\n", hv);
    return 0;
}
"#;

fn target_debug_dir() -> PathBuf {
    // tests run from the crate dir; the workspace target sits two levels up
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    manifest.join("../../target/debug").canonicalize().unwrap()
}

#[test]
fn c_program_links_and_runs() {
    let cc = ["cc", "gcc", "clang"]
        .iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .copied();
    let Some(cc) = cc else {
        eprintln!("no C compiler available; skipping link smoke test");
        return;
    };

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = dir.path().join("smoke");

    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let lib = target_debug_dir().join("libmaoeda_ffi.a");
    if !lib.exists() {
        // `cargo test` compiles only the rlib; produce the staticlib here
        let status = Command::new(env!("CARGO"))
            .args(["build", "-p", "maoeda-ffi"])
            .current_dir(env!("CARGO_MANIFEST_DIR"))
            .status()
            .unwrap();
        assert!(status.success(), "cargo build -p maoeda-ffi failed");
    }
    assert!(lib.exists(), "static library not built at {}", lib.display());

    let out = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let run = Command::new(&bin).output().unwrap();
    assert!(
        run.status.success(),
        "smoke binary exited with {:?}:\n{}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("hv="));
}
