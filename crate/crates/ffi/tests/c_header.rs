//! Compiles and runs a C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "risfas.h"

int main(void) {
    double nodes[2], weights[2];
    if (risfas_gauss_laguerre(2, nodes, weights) != RISFAS_STATUS_OK) return 1;
    if (fabs(nodes[0] - (2.0 - sqrt(2.0))) > 1e-12) return 2;
    RisfasScenario *s = NULL;
    if (risfas_scenario_from_toml("avg_snr_e_db = 0.0\nports_e = 1", &s) != RISFAS_STATUS_OK) return 3;
    RisfasEstimate e;
    if (risfas_snr_cdf(s, RISFAS_NODE_EAVESDROPPER, 6.0 * log(2.0), &e) != RISFAS_STATUS_OK) return 4;
    risfas_scenario_free(s);
    if (risfas_scenario_from_toml("bogus = 1", &s) != RISFAS_STATUS_CONFIG) return 5;
    printf("%.12f %s\n", e.value, risfas_version());
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = crate_dir.join("include");
    assert!(header_dir.join("risfas.h").exists(), "header not generated");
    let lib = target_dir().join("librisfas_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler on PATH; header check only");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = dir.path().join("main");
    let out = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&header_dir)
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .arg("-o")
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.starts_with("0.500000000000 "), "{text}");
}
