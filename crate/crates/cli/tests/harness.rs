//! End-to-end harness behavior through the real binary: determinism of the
//! emitted bytes, exit-code contract, and the file formats.

use std::path::{Path, PathBuf};
use std::process::Command;

use vacuumgas_cli::table::read_table;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_vacuumgas")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

fn tree_bytes(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_path_buf();
                files.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn repeated_runs_are_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let out1 = tmp.path().join("a");
    let out2 = tmp.path().join("b");
    let common = [
        "--override",
        "run.t_end=20",
        "--override",
        "run.n_cells=64",
        "--override",
        "run.preset=bump",
    ];
    for out in [&out1, &out2] {
        let (code, _, err) = run(&[
            "simulate",
            "--out",
            out.to_str().unwrap(),
            common[0],
            common[1],
            common[2],
            common[3],
            common[4],
            common[5],
        ]);
        assert_eq!(code, 0, "{err}");
    }
    let a = tree_bytes(&out1);
    let b = tree_bytes(&out2);
    assert_eq!(a.len(), b.len());
    for ((pa, ba), (pb, bb)) in a.iter().zip(b.iter()) {
        assert_eq!(pa, pb);
        assert_eq!(ba, bb, "{} differs between runs", pa.display());
    }
}

#[test]
fn validation_failures_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let (code, _, err) = run(&[
        "simulate",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "params.gamma=0.5",
    ]);
    assert_eq!(code, 2, "{err}");
    let (code, _, _) = run(&[
        "simulate",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "run.warp=9",
    ]);
    assert_eq!(code, 2);
    // unreadable config file -> io error
    let (code, _, _) = run(&["simulate", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(code, 4);
}

#[test]
fn summary_columns_and_hash_header() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let (code, _, err) = run(&[
        "simulate",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "run.t_end=5",
        "--override",
        "run.n_cells=32",
        "--override",
        "run.amplitude=0",
    ]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(text.starts_with("# config_hash = "));
    let table = read_table(&out.join("summary.csv")).unwrap();
    assert_eq!(
        table.columns,
        vec![
            "t", "E0", "E1", "E2", "sup_w", "sup_wt", "x_minus", "x_plus", "mass", "eta_x_min",
            "dt"
        ]
    );
    // zero-amplitude run keeps w at machine zero throughout
    let sup_w = table.column("sup_w").unwrap();
    assert!(sup_w.iter().all(|&v| v <= 1e-13));
    // snapshots carry the advertised columns
    let snap = read_table(&out.join("snapshots/snap_000.csv")).unwrap();
    assert_eq!(
        snap.columns,
        vec!["x", "w", "w_t", "rho", "u", "rho_bar", "u_bar", "rho_diff", "u_diff"]
    );
}

#[test]
fn barenblatt_outputs_are_consistent() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let (code, _, err) = run(&[
        "barenblatt",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "run.t_end=100",
    ]);
    assert_eq!(code, 0, "{err}");
    let profile = read_table(&out.join("barenblatt_profile.csv")).unwrap();
    let half_width = profile.column("half_width").unwrap()[0];
    let boundary = read_table(&out.join("barenblatt_boundary.csv")).unwrap();
    let t = boundary.column("t").unwrap();
    let xp = boundary.column("x_plus").unwrap();
    let mass = boundary.column("mass").unwrap();
    // boundary column matches the closed form L (1+t)^{2/3} (default gas)
    for (ti, xi) in t.iter().zip(xp.iter()) {
        let expect = half_width * (1.0 + ti).powf(2.0 / 3.0);
        assert!((xi - expect).abs() <= 1e-9 * expect.max(1.0), "t={ti}");
    }
    // mass column constant to 1e-8
    for m in &mass {
        assert!((m - mass[0]).abs() <= 1e-8);
    }
}

#[test]
fn correction_table_and_report_are_the_library_values() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let (code, _, err) = run(&[
        "correction",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "correction.t_end=1000",
        "--override",
        "correction.k_max=4",
    ]);
    assert_eq!(code, 0, "{err}");
    let table = read_table(&out.join("correction.csv")).unwrap();
    assert_eq!(
        table.columns,
        vec!["t", "h", "h_t", "eta_x", "d1_eta_x", "d2_eta_x", "d3_eta_x", "d4_eta_x"]
    );
    // plumbing identity: the emitted decay rows equal a direct library call
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("correction_report.json")).unwrap())
            .unwrap();
    let params = vacuumgas::GasParameters::new(2.0, 1.0, 3.0).unwrap();
    let traj = vacuumgas::integrate_correction(&params, 1000.0, 1e-10).unwrap();
    let decay = traj.verify_decay_rates(4).unwrap();
    let rows = report["decay_rows"].as_array().unwrap();
    assert_eq!(rows.len(), decay.rows.len());
    for (json_row, lib_row) in rows.iter().zip(decay.rows.iter()) {
        assert_eq!(
            json_row["fit"]["exponent"].as_f64().unwrap(),
            lib_row.fit.exponent,
            "bit-for-bit fit exponent"
        );
        assert_eq!(
            json_row["sup_ratio_last_two_decades"].as_f64().unwrap(),
            lib_row.sup_ratio_last_two_decades
        );
    }
}

#[test]
fn rates_refit_reproduces_simulation_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let args = [
        "--out",
        out.to_str().unwrap(),
        "--override",
        "params.gamma=1.5",
        "--override",
        "params.lambda=0.5",
        "--override",
        "params.mu=1.0",
        "--override",
        "run.t_end=200",
        "--override",
        "run.n_cells=64",
        "--override",
        "run.preset=bump",
    ];
    let mut full = vec!["simulate"];
    full.extend_from_slice(&args);
    let (code, _, err) = run(&full);
    assert_eq!(code, 0, "{err}");
    let mut refit = vec!["rates"];
    refit.extend_from_slice(&args);
    let (code, _, err) = run(&refit);
    assert_eq!(code, 0, "{err}");
    let sim: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let rates: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("rates_report.json")).unwrap())
            .unwrap();
    // the re-fit from the CSV reproduces the in-run fit exactly (the CSV
    // round-trips every float)
    assert_eq!(sim["theorem2"], rates["theorem2"]);
    assert_eq!(
        rates["source_hash"].as_str().unwrap(),
        sim["config_hash"].as_str().unwrap()
    );
}

#[test]
fn sweep_isolates_failures_and_matches_single_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    // 2x1x1 grid; second gamma is fine, both complete
    let (code, _, err) = run(&[
        "sweep",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "sweep.gamma_list=2.0,1.5",
        "--override",
        "sweep.lambda_list=0.5",
        "--override",
        "sweep.mu_list=1.0",
        "--override",
        "run.t_end=50",
        "--override",
        "run.n_cells=32",
    ]);
    assert_eq!(code, 0, "{err}");
    let agg = read_table(&out.join("sweep.csv")).unwrap();
    assert_eq!(agg.rows.len(), 2, "aggregate row count = grid cardinality");
    assert!(out.join("cell_000/summary.csv").exists());
    assert!(out.join("cell_001/summary.csv").exists());

    // a one-cell sweep writes the same summary bytes as a direct simulate
    let single = tmp.path().join("single");
    let (code, _, _) = run(&[
        "simulate",
        "--out",
        single.to_str().unwrap(),
        "--override",
        "params.gamma=2.0",
        "--override",
        "params.lambda=0.5",
        "--override",
        "params.mu=1.0",
        "--override",
        "run.t_end=50",
        "--override",
        "run.n_cells=32",
    ]);
    assert_eq!(code, 0);
    let sweep_summary = std::fs::read(out.join("cell_000/summary.csv")).unwrap();
    let single_summary = std::fs::read(single.join("summary.csv")).unwrap();
    let strip_header = |b: &[u8]| {
        let s = String::from_utf8(b.to_vec()).unwrap();
        s.lines().skip(1).collect::<Vec<_>>().join("\n")
    };
    // identical data rows (the config hashes differ: sweep lists vs single)
    assert_eq!(strip_header(&sweep_summary), strip_header(&single_summary));
}

#[test]
fn hardy_study_emits_bounded_ratios() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let (code, _, err) = run(&[
        "hardy",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "hardy.n_list=100,200,400",
        "--override",
        "hardy.theta_list=1.5,2.0",
    ]);
    assert_eq!(code, 0, "{err}");
    let table = read_table(&out.join("hardy.csv")).unwrap();
    assert_eq!(table.rows.len(), 2 * 2 * 3);
    for r in table.column("ratio").unwrap() {
        assert!(r.is_finite() && r > 0.0);
    }
}

#[test]
fn refine_reports_orders() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let (code, _, err) = run(&[
        "refine",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "refine.n_list=50,100,200",
        "--override",
        "refine.t_probe=0.5",
        "--override",
        "run.preset=bump",
    ]);
    assert_eq!(code, 0, "{err}");
    let table = read_table(&out.join("refine.csv")).unwrap();
    let orders = table.column("observed_order").unwrap();
    assert!(orders[0] >= 1.5, "order {}", orders[0]);
    // non-doubling list is rejected up front
    let (code, _, _) = run(&[
        "refine",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "refine.n_list=50,100,150",
    ]);
    assert_eq!(code, 2);
}
