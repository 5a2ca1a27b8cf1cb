use vacuumgas_cli::config::{apply_override, RunConfig};

#[test]
fn probe() {
    // in-process command call
    let tmp = tempfile::tempdir().unwrap();
    let mut config = RunConfig::default();
    apply_override(&mut config, "correction.t_end=1000").unwrap();
    apply_override(&mut config, "correction.k_max=4").unwrap();
    vacuumgas_cli::commands::cmd_correction(&config, tmp.path()).unwrap();
    let in_proc = std::fs::read_to_string(tmp.path().join("correction_report.json")).unwrap();

    // spawned binary
    let tmp2 = tempfile::tempdir().unwrap();
    let st = std::process::Command::new(env!("CARGO_BIN_EXE_vacuumgas"))
        .args(["correction", "--out", tmp2.path().to_str().unwrap(),
               "--override", "correction.t_end=1000", "--override", "correction.k_max=4"])
        .status().unwrap();
    assert!(st.success());
    let spawned = std::fs::read_to_string(tmp2.path().join("correction_report.json")).unwrap();
    println!("in-proc == spawned: {}", in_proc == spawned);

    // library value vs in-process file
    let v: serde_json::Value = serde_json::from_str(&in_proc).unwrap();
    let params = vacuumgas::GasParameters::new(2.0, 1.0, 3.0).unwrap();
    let traj = vacuumgas::integrate_correction(&params, 1000.0, 1e-10).unwrap();
    let decay = traj.verify_decay_rates(4).unwrap();
    let j = v["decay_rows"][2]["fit"]["exponent"].as_f64().unwrap();
    println!("in-proc json k=2: {:?}, lib: {:?}, equal bits: {}", j, decay.row(2).fit.exponent, j.to_bits() == decay.row(2).fit.exponent.to_bits());
}
