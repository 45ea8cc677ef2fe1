use std::ffi::{CStr, CString};
use std::ptr;

use temporank_ffi::*;

fn last_error() -> String {
    let p = tr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn preset() -> *mut TrNetwork {
    let name = CString::new("paper-synthetic").unwrap();
    let mut net = ptr::null_mut();
    assert_eq!(unsafe { tr_network_preset(name.as_ptr(), &mut net) }, TrStatus::Ok);
    assert!(!net.is_null());
    net
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(tr_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn synthetic_trajectory_round_trip() {
    let net = preset();
    let mut n = 0;
    let mut continuous = 0;
    unsafe {
        assert_eq!(tr_network_node_count(net, &mut n), TrStatus::Ok);
        assert_eq!(tr_network_is_continuous(net, &mut continuous), TrStatus::Ok);
    }
    assert_eq!((n, continuous), (5, 1));

    let mut opts = tr_options_default();
    opts.grid_points = 11;
    let mut traj = ptr::null_mut();
    unsafe {
        assert_eq!(tr_trajectory_compute(net, &opts, &mut traj), TrStatus::Ok);
        let mut len = 0;
        assert_eq!(tr_trajectory_len(traj, &mut len), TrStatus::Ok);
        assert_eq!(len, 11);
        let mut t = 0.0;
        assert_eq!(tr_trajectory_instant(traj, 10, &mut t), TrStatus::Ok);
        assert_eq!(t, 1.0);
        let mut scores = [0.0; 5];
        assert_eq!(tr_trajectory_scores(traj, 5, scores.as_mut_ptr(), 5), TrStatus::Ok);
        assert!((scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(scores.iter().all(|&s| s > 0.0));

        for (node, &score) in scores.iter().enumerate() {
            let (mut lo, mut hi) = (0.0, 0.0);
            assert_eq!(tr_bounds(net, &opts, 5, node, &mut lo, &mut hi), TrStatus::Ok);
            assert!(lo - 1e-12 <= score && score <= hi + 1e-12);
        }

        let mut short = [0.0; 4];
        assert_eq!(tr_trajectory_scores(traj, 0, short.as_mut_ptr(), 4), TrStatus::InvalidInput);
        assert_eq!(tr_trajectory_instant(traj, 11, &mut t), TrStatus::InvalidInput);
        assert!(last_error().contains("outside"));
        tr_trajectory_free(traj);
        tr_network_free(net);
    }
}

#[test]
fn truncation_matches_discrete_solve() {
    let net = preset();
    let mut opts = tr_options_default();
    opts.truncate = 9;
    opts.solver = TrSolver::Power;
    let mut traj = ptr::null_mut();
    unsafe {
        assert_eq!(tr_trajectory_compute(net, &opts, &mut traj), TrStatus::Ok);
        let mut len = 0;
        tr_trajectory_len(traj, &mut len);
        assert_eq!(len, 9);
        tr_trajectory_free(traj);
        tr_network_free(net);
    }
}

#[test]
fn error_codes() {
    let mut net = ptr::null_mut();
    let missing = CString::new("/nonexistent/net.txt").unwrap();
    let unknown = CString::new("no-such-preset").unwrap();
    unsafe {
        assert_eq!(tr_network_load(missing.as_ptr(), &mut net), TrStatus::NotFound);
        assert!(last_error().contains("not found"));
        assert_eq!(tr_network_preset(unknown.as_ptr(), &mut net), TrStatus::InvalidInput);
        assert_eq!(tr_network_load(ptr::null(), &mut net), TrStatus::NullPointer);
        assert!(net.is_null());

        let net = preset();
        let mut opts = tr_options_default();
        opts.damping = 1.5;
        let mut traj = ptr::null_mut();
        assert_eq!(tr_trajectory_compute(net, &opts, &mut traj), TrStatus::ScheduleRange);
        assert_eq!(tr_trajectory_compute(net, ptr::null(), &mut traj), TrStatus::NullPointer);
        tr_network_free(net);
        tr_network_free(ptr::null_mut());
        tr_trajectory_free(ptr::null_mut());
    }
}

#[test]
fn parse_errors_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "nodes 2\ninstant 0\n1 3 1\n").unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut net = ptr::null_mut();
    assert_eq!(unsafe { tr_network_load(c.as_ptr(), &mut net) }, TrStatus::Parse);
    assert!(last_error().contains("line 3"), "{}", last_error());

    std::fs::write(&path, "nodes 2\ninstant 0\n1 2 1\n2 1 1\ninstant 1\n1 2 1\n").unwrap();
    assert_eq!(unsafe { tr_network_load(c.as_ptr(), &mut net) }, TrStatus::Ok);
    let mut traj = ptr::null_mut();
    let opts = tr_options_default();
    unsafe {
        assert_eq!(tr_trajectory_compute(net, &opts, &mut traj), TrStatus::Ok);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(tr_bounds(net, &opts, 1, 0, &mut lo, &mut hi), TrStatus::Ok);
        assert!(lo <= hi);
        assert_eq!(tr_bounds(net, &opts, 2, 0, &mut lo, &mut hi), TrStatus::InvalidInput);
        tr_trajectory_free(traj);
        tr_network_free(net);
    }
}

#[test]
fn kendall_tau_via_c_abi() {
    let x = [1.0, 2.0, 3.0, 4.0];
    let y = [4.0, 3.0, 2.0, 1.0];
    let mut tau = 0.0;
    unsafe {
        assert_eq!(tr_kendall_tau(x.as_ptr(), y.as_ptr(), 4, &mut tau), TrStatus::Ok);
        assert_eq!(tau, -1.0);
        let flat = [1.0; 4];
        assert_eq!(tr_kendall_tau(x.as_ptr(), flat.as_ptr(), 4, &mut tau), TrStatus::UndefinedTau);
        assert_eq!(tr_kendall_tau(ptr::null(), y.as_ptr(), 4, &mut tau), TrStatus::NullPointer);
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/temporank.h");
    let text = std::fs::read_to_string(header).unwrap();
    for symbol in ["tr_network_load", "tr_trajectory_compute", "tr_bounds", "tr_kendall_tau", "TR_STATUS_PANIC"] {
        assert!(text.contains(symbol), "{symbol} missing from header");
    }
    let Ok(out) = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", header])
        .output()
    else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn c_program_links_against_staticlib() {
    let deps = std::env::current_exe().unwrap();
    let profile_dir = deps.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libtemporank_ffi.a");
    if !lib.exists() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let manifest = env!("CARGO_MANIFEST_DIR");
    let Ok(build) = std::process::Command::new("cc")
        .arg(format!("{manifest}/examples/smoke.c"))
        .arg(format!("-I{manifest}/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
    else {
        return;
    };
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = std::process::Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let total: f64 = String::from_utf8(run.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-10);
}
