//! Compiles and runs a C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "surplus_lab.h"

int main(void) {
    SlExcursion *e = NULL;
    if (sl_excursion_from_steps("UUDUDD", &e) != SL_STATUS_OK) return 10;
    uint64_t b = 0;
    if (sl_excursion_weight(e, SL_MODE_BF, &b) != SL_STATUS_OK || b != 12) return 11;
    SlMap *m = NULL;
    if (sl_map_insert(e, "{\"mode\":\"bf\",\"i\":[2,4],\"k\":[1,1]}", &m) != SL_STATUS_OK) return 12;
    size_t faces = 0;
    if (sl_map_faces(m, &faces) != SL_STATUS_OK || faces != 2) return 13;
    char *json = NULL;
    if (sl_map_to_json(m, &json) != SL_STATUS_OK) return 14;
    printf("%s\n", json);
    sl_string_free(json);
    sl_excursion_free(e);
    e = NULL;
    if (sl_excursion_from_steps("DU", &e) == SL_STATUS_OK) return 15;
    if (strlen(sl_last_error()) == 0) return 16;
    uint64_t w = 0;
    if (sl_wright(3, &w) != SL_STATUS_OK || w != 60) return 17;
    sl_map_free(m);
    return 0;
}
"#;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/surplus_lab.h")).unwrap();
    for name in [
        "typedef struct SlExcursion SlExcursion",
        "typedef struct SlMap SlMap",
        "SL_STATUS_OK = 0",
        "sl_last_error",
        "sl_excursion_sample",
        "sl_map_insert",
        "sl_map_explore",
        "sl_psi_count",
        "sl_sg_check",
        "sl_wright",
        "sl_string_free",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    // target/<profile>/deps/header-… → target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libsurplus_lab_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let work = std::env::temp_dir().join(format!("surplus-lab-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("main.c");
    let bin = work.join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C build failed");
    let out = Command::new(&bin).output().unwrap();
    let _ = std::fs::remove_dir_all(&work);
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"involution\""));
}
