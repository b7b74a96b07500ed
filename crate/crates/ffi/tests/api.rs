use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use xtt_ffi::*;

const LOLCAT: &str = include_str!("../../core/corpus/rules/lolcat.yaml");
const FIG2: &str = include_str!("../../core/corpus/rules/fig2.yaml");

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(xtt_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn load(yaml: &str) -> *mut XttTransducer {
    let mut t = ptr::null_mut();
    let status = unsafe { xtt_transducer_load(c(yaml).as_ptr(), &mut t) };
    assert_eq!(status, XttStatus::Ok, "{}", last_error());
    t
}

#[test]
fn lolcat_round_trip() {
    unsafe {
        let t = load(LOLCAT);
        let mut n = 0;
        assert_eq!(xtt_transducer_rule_count(t, &mut n), XttStatus::Ok);
        assert_eq!(n, 3);

        let mut r = ptr::null_mut();
        let input = c("(S let me show you my Pokémon)");
        assert_eq!(xtt_transduce(t, input.as_ptr(), 0, 0, &mut r), XttStatus::Ok);
        assert_eq!(xtt_result_output_count(r), 2);
        assert!(!xtt_result_truncated(r));

        let mut w = 0.0;
        assert_eq!(xtt_result_weight(r, 0, &mut w), XttStatus::Ok);
        assert!((w - 0.9).abs() < 1e-9);
        let mut tree: *mut c_char = ptr::null_mut();
        assert_eq!(xtt_result_tree(r, 0, &mut tree), XttStatus::Ok);
        assert_eq!(
            CStr::from_ptr(tree).to_str().unwrap(),
            "(S my Pokemans , let me show you them)"
        );
        xtt_string_free(tree);

        assert_eq!(xtt_result_weight(r, 2, &mut w), XttStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        xtt_result_free(r);

        assert_eq!(xtt_transduce(t, input.as_ptr(), 1, 0, &mut r), XttStatus::Ok);
        assert_eq!(xtt_result_output_count(r), 1);
        assert!(xtt_result_truncated(r));
        xtt_result_free(r);
        xtt_transducer_free(t);
    }
}

#[test]
fn stuck_and_classification() {
    unsafe {
        let t = load(FIG2);
        let mut class = XttClassification::default();
        assert_eq!(xtt_transducer_classify(t, &mut class), XttStatus::Ok);
        assert_eq!(
            class,
            XttClassification {
                linear: true,
                nondeleting: false,
                extended: false
            }
        );

        let mut r = ptr::null_mut();
        assert_eq!(
            xtt_transduce(t, c("(A (B D E) (C F G))").as_ptr(), 0, 0, &mut r),
            XttStatus::Ok
        );
        assert_eq!(xtt_result_output_count(r), 0);
        assert_eq!(xtt_result_stuck_count(r), 1);
        xtt_result_free(r);
        xtt_transducer_free(t);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(xtt_transducer_load(ptr::null(), &mut t), XttStatus::NullPointer);
        assert_eq!(
            xtt_transducer_load(c("- state: q\n").as_ptr(), &mut t),
            XttStatus::LoadError
        );
        assert!(t.is_null());
        assert!(last_error().contains("rule entry 1"), "{}", last_error());

        let bad_utf8 = [0xffu8, 0];
        assert_eq!(
            xtt_transducer_load(bad_utf8.as_ptr().cast(), &mut t),
            XttStatus::InvalidUtf8
        );

        let t = load(FIG2);
        let mut r = ptr::null_mut();
        assert_eq!(
            xtt_transduce(t, c("(A (B").as_ptr(), 0, 0, &mut r),
            XttStatus::ParseError
        );
        assert!(r.is_null());
        assert_eq!(
            xtt_transduce(ptr::null(), c("a").as_ptr(), 0, 0, &mut r),
            XttStatus::NullPointer
        );
        xtt_transducer_free(t);

        // null handles are tolerated by free and query functions
        xtt_transducer_free(ptr::null_mut());
        xtt_result_free(ptr::null_mut());
        xtt_string_free(ptr::null_mut());
        assert_eq!(xtt_result_output_count(ptr::null()), 0);
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/xtt.h")).unwrap();
    for name in [
        "xtt_last_error_message",
        "xtt_transducer_load",
        "xtt_transducer_free",
        "xtt_transducer_rule_count",
        "xtt_transducer_classify",
        "xtt_transduce",
        "xtt_result_free",
        "xtt_result_output_count",
        "xtt_result_stuck_count",
        "xtt_result_truncated",
        "xtt_result_weight",
        "xtt_result_tree",
        "xtt_string_free",
        "typedef struct XttTransducer XttTransducer;",
        "XTT_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Directory holding the static library built alongside this test binary.
fn staticlib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libxtt_ffi.a");
    lib.exists().then_some(lib)
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn c_program_links_and_runs() {
    let (Some(lib), true) = (staticlib(), have_cc()) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("xtt-smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("examples/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");

    let rules = crate_dir().join("../core/corpus/rules/fig4.yaml");
    let run = Command::new(&out)
        .arg(&rules)
        .arg("(S (NP John) (VP (V misses) (NP Mary)))")
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(
        String::from_utf8(run.stdout).unwrap(),
        "1.000000\t(S (NP Marie) (VP (V manque) (PP (P à) (NP Jean))))\noutputs=1 stuck=0 truncated=false\n"
    );
}
