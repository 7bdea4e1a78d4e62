use std::path::Path;
use std::process::{Command, Output};

fn ris_mec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ris-mec"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn desk_config(dir: &Path) -> String {
    let path = dir.join("desk.toml");
    std::fs::write(&path, "n_ue = 2\nm_ap = 2\nk_y = 2\nk_z = 1\n").unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn end_to_end_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = desk_config(d);

    let out = ris_mec(d, &["gen-channels", "--config", &cfg, "--count", "2", "--out", "ch.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for scheme in ["bcd", "zf", "equal", "no-ris"] {
        let out = ris_mec(d, &["solve", "--config", &cfg, "--channels", "ch.json", "--index", "1", "--scheme", scheme]);
        assert!(out.status.success(), "{scheme}: {}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["kind"], "solution");
        assert!(v["data"]["solution"]["objective_bits"].as_f64().unwrap() > 0.0);
    }

    let out = ris_mec(
        d,
        &["gen-dataset", "--config", &cfg, "--count", "6", "--scenario", "los", "--sigma-dz", "1", "--out", "ds.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for net in ["csi", "loc1", "loc2"] {
        let mut args = vec![
            "train", "--net", net, "--dataset", "ds.json", "--epochs", "2", "--batch-size", "2", "--loss-csv",
        ];
        let csv = format!("{net}.csv");
        let ckpt = format!("{net}.json");
        args.extend([csv.as_str(), "--out", ckpt.as_str()]);
        let out = ris_mec(d, &args);
        assert!(out.status.success(), "{net}: {}", String::from_utf8_lossy(&out.stderr));
        let curves = std::fs::read_to_string(d.join(&csv)).unwrap();
        assert!(curves.starts_with("# loss v1\nepoch,train_loss,val_loss\n"));
        assert_eq!(curves.lines().count(), 4);
    }
    let out = ris_mec(
        d,
        &["eval", "--dataset", "ds.json", "--csi", "csi.json", "--loc1", "loc1.json", "--loc2", "loc2.json", "--samples-csv", "s.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["data"]["csi"]["mean_ratio"].as_f64().is_some());
    assert!(v["data"]["location"]["p10_ratio"].as_f64().is_some());

    let out = ris_mec(
        d,
        &["sweep", "--config", &cfg, "--variable", "sigma_dx", "--values", "0,0.001", "--reps", "2", "--schemes", "bcd,dnn-csi", "--csi", "csi.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# sweep v1"));
    assert_eq!(lines.next(), Some("variable,value,replication,scheme,tctb_bits,runtime_s,seed,error"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // usage error
    assert_eq!(ris_mec(d, &["solve", "--scheme", "sdr"]).status.code(), Some(1));
    assert_eq!(ris_mec(d, &["frobnicate"]).status.code(), Some(1));
    assert_eq!(ris_mec(d, &["--help"]).status.code(), Some(0));
    // invalid configuration
    std::fs::write(d.join("bad.toml"), "noise_w = -1.0\n").unwrap();
    assert_eq!(ris_mec(d, &["gen-channels", "--config", "bad.toml"]).status.code(), Some(1));
    std::fs::write(d.join("typo.toml"), "n_eu = 3\n").unwrap();
    assert_eq!(ris_mec(d, &["gen-channels", "--config", "typo.toml"]).status.code(), Some(1));
    // missing file
    assert_eq!(ris_mec(d, &["eval", "--dataset", "nope.json"]).status.code(), Some(1));
}

#[test]
fn solver_failures_map_to_exit_code_two() {
    use ris_mec::HarnessError;
    use ris_mec_core::Error;
    let numeric = HarnessError::from(Error::NonConvergence {
        iterations: 10,
        residual_a: 1.0,
        residual_b: 1.0,
    });
    assert_eq!(numeric.exit_code(), 2);
    assert_eq!(HarnessError::from(Error::NonFinite("x".into())).exit_code(), 2);
    assert_eq!(HarnessError::from(Error::Config("x".into())).exit_code(), 1);
}
