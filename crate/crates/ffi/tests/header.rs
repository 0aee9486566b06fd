use std::path::Path;
use std::process::Command;

const HEADER: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/include/pmbox.h");

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(HEADER).expect("header is generated by the build script");
    for name in [
        "pmbox_last_error_message",
        "pmbox_inequality_builtin",
        "pmbox_classical_bound",
        "pmbox_protocol_score",
        "pmbox_seesaw",
        "typedef struct PmboxInequality PmboxInequality",
        "PMBOX_STATUS_GUARD_EXCEEDED",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    if !cc.status.success() {
        return;
    }
    let dir = std::env::temp_dir().join(format!("pmbox-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"pmbox.h\"\n\
         int main(void) {\n\
           PmboxInequality *h = NULL;\n\
           PmboxSeesawOptions o = pmbox_seesaw_default_options();\n\
           if (pmbox_inequality_builtin(\"S1\", &h) != PMBOX_STATUS_OK) return 1;\n\
           pmbox_inequality_free(h);\n\
           return (int)o.restarts == 0;\n\
         }\n",
    )
    .unwrap();
    let include = Path::new(HEADER).parent().unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
