use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include "cohlab.h"
int main(void) {
    CohState *s = 0;
    double re[2] = {0.6, 0.8};
    CohMonotones m;
    if (coh_state_from_amplitudes(re, 0, 2, &s) != COH_STATUS_OK) return 1;
    if (coh_monotones(s, 0, &m) != COH_STATUS_OK) return 2;
    coh_state_free(s);
    return m.coherence_number == 2 ? 0 : 3;
}
"#;

#[test]
fn header_declares_the_exported_symbols() {
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = std::fs::read_to_string(include.join("cohlab.h")).unwrap();
    for name in [
        "coh_last_error_message",
        "coh_state_from_amplitudes",
        "coh_state_from_density",
        "coh_state_from_json",
        "coh_state_free",
        "coh_monotones",
        "coh_monotones_json",
        "coh_k_concurrence",
        "coh_specht_ratio",
        "coh_grover_point",
        "coh_grover_critical",
        "coh_grover_cost_performance",
        "coh_grover_trajectory",
        "coh_trajectory_point",
        "coh_trajectory_csv",
        "coh_trajectory_free",
        "COH_STATUS_PANIC",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which("cc") else { return };
    let dir = tempfile_dir();
    let src = dir.join("probe.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which(tool: &str) -> Result<PathBuf, ()> {
    std::env::var_os("PATH")
        .and_then(|paths| {
            std::env::split_paths(&paths)
                .map(|p| p.join(tool))
                .find(|p| p.is_file())
        })
        .ok_or(())
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cohlab-ffi-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
