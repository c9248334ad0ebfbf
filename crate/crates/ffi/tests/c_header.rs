//! Compiles and links a C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "qcap.h"

int main(void) {
    QcapChannel *ch = NULL;
    if (qcap_channel_from_spec("cd:d=2", &ch) != QCAP_STATUS_OK) return 10;
    QcapState *rho = NULL;
    if (qcap_state_maximally_mixed(2, &rho) != QCAP_STATUS_OK) return 11;
    double ic = 0.0;
    if (qcap_coherent_information(rho, ch, &ic) != QCAP_STATUS_OK) return 12;
    QcapChannel *bad = NULL;
    if (qcap_channel_from_spec("nonsense", &bad) != QCAP_STATUS_PARSE) return 13;
    if (qcap_last_error() == NULL) return 14;
    printf("%.12f\n", ic);
    qcap_state_free(rho);
    qcap_channel_free(ch);
    return fabs(ic + 1.0) < 1e-9 ? 0 : 15;
}
"#;

fn target_dir() -> PathBuf {
    // .../target/<profile>/deps/c_header-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links() {
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let lib = target_dir().join("libqcap_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "-1.000000000000");
}
