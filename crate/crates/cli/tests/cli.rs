use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ergovolume::analysis::steepest_point;

fn ergovolume(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergovolume")).args(args).env_remove("ERGOVOLUME_THREADS").output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header lines, column names and parsed rows.
fn parse_csv(text: &str) -> (Vec<&str>, Vec<&str>, Vec<Vec<String>>) {
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    let mut body = text.lines().skip(header.len());
    let columns = body.next().expect("column line").split(',').collect();
    let rows = body.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, columns, rows)
}

fn column(rows: &[Vec<String>], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn declared_rows(header: &[&str]) -> usize {
    header.iter().find_map(|l| l.strip_prefix("# rows: ")).unwrap().parse().unwrap()
}

fn error_line(out: &Output) -> String {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    text.trim_end().to_string()
}

#[test]
fn dressed_profile_rows_and_header() {
    let text = stdout(&ergovolume(&["tc-dressed", "--spins", "6", "--nph", "3"]));
    let (header, columns, rows) = parse_csv(&text);
    assert_eq!(columns, ["i", "volume"]);
    assert_eq!(rows.len(), 10);
    assert_eq!(declared_rows(&header), 10);
    assert!(header[0].starts_with("# ergovolume "));
    assert!(header.iter().any(|l| l.starts_with("# backend: dicke")));
    let v = column(&rows, 1);
    assert_eq!(v[0], 0.0);
    assert_eq!(v[9], 0.0);
    assert!(v[4] > 0.0);
    // 17 significant digits
    assert_eq!(rows[4][1].split('e').next().unwrap().len(), 18);
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["benchmark-compare", "--system", "dressed", "--spins", "5", "--nph", "2"];
    assert_eq!(stdout(&ergovolume(&args)), stdout(&ergovolume(&args)));
}

#[test]
fn config_file_is_echoed_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let text = "experiment = \"tc-dressed\"\nspins = 6\nnph = 3\n";
    fs::write(&cfg, text).unwrap();
    let out_path = dir.path().join("out.csv");
    let args = ["tc-dressed", "--config", cfg.to_str().unwrap(), "--nph", "1", "-o", out_path.to_str().unwrap()];
    assert!(ergovolume(&args).status.success());
    let csv = fs::read_to_string(&out_path).unwrap();
    let (header, _, rows) = parse_csv(&csv);
    assert_eq!(rows.len(), 8);
    let echoed: Vec<&str> = header.iter().filter_map(|l| l.strip_prefix("# config | ")).collect();
    assert_eq!(echoed.join("\n") + "\n", text);
    assert!(header.iter().any(|l| l.contains("spins=6 nph=1")));
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "experiment = \"dicke3-phase\"\n").unwrap();
    let out = ergovolume(&["tc-dressed", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_line(&out).starts_with("error: kind=config message=\""));

    fs::write(&cfg, "no_such_flag = 1\n").unwrap();
    let out = ergovolume(&["tc-dressed", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    error_line(&out);

    let out = ergovolume(&["tfim-ground", "--g-grid", "0:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_line(&out).starts_with("error: kind=invalid_argument"));

    let out = ergovolume(&["tc-dressed", "--threads", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_ergovolume"))
        .args(["tc-dressed", "--spins", "2", "--nph", "1"])
        .env("ERGOVOLUME_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = ergovolume(&["no-such-experiment"]);
    assert_eq!(out.status.code(), Some(2));
    error_line(&out);
}

#[test]
fn numerical_failure_exits_with_code_three() {
    let out = ergovolume(&["dicke3-phase", "--atoms", "2", "--grid", "1.2:1.2:1", "--nmax", "2", "--fixed-cutoff"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(error_line(&out).starts_with("error: kind=cutoff_insufficient"));
}

#[test]
fn help_and_version_succeed() {
    assert!(ergovolume(&["--help"]).status.success());
    assert!(ergovolume(&["--version"]).status.success());
}

#[test]
fn ising_ground_curve_rises_at_the_critical_point() {
    let text = stdout(&ergovolume(&["tfim-ground", "--spins", "20", "--g-grid", "0:2:0.05", "--backend", "freefermion"]));
    let (header, _, rows) = parse_csv(&text);
    assert_eq!(rows.len(), 41);
    assert_eq!(declared_rows(&header), 41);
    let point = steepest_point(&column(&rows, 0), &column(&rows, 1)).unwrap();
    assert!((point - 1.0).abs() <= 0.1, "{point}");
}

#[test]
fn contiguous_blocks_bound_the_full_volume_from_below() {
    let text = stdout(&ergovolume(&["tfim-ground", "--spins", "6", "--g-grid", "0.5:1.5:0.5", "--backend", "both"]));
    let (_, columns, rows) = parse_csv(&text);
    assert_eq!(columns, ["g", "volume_analytic", "volume_numeric"]);
    for r in &rows {
        let (a, n): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!(a <= n + 1e-9, "{a} {n}");
    }
}

#[test]
fn dicke3_grid_has_one_row_per_point() {
    let text = stdout(&ergovolume(&["dicke3-phase", "--atoms", "2", "--grid", "0:0.2:0.1"]));
    let (header, columns, rows) = parse_csv(&text);
    assert_eq!(columns, ["g1", "g2", "volume"]);
    assert_eq!(rows.len(), 9);
    assert_eq!(declared_rows(&header), 9);
    assert_eq!(column(&rows, 2)[0], 0.0);
}

#[test]
fn two_site_models_table() {
    let text = stdout(&ergovolume(&["appendix-a", "--g-grid", "0:1:0.5", "--model", "ising", "--restarts", "4"]));
    let (_, columns, rows) = parse_csv(&text);
    assert_eq!(columns, ["g", "state_label", "volume_original", "volume_quenched"]);
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let quenched: f64 = r[3].parse().unwrap();
        match r[1].as_str() {
            "ising:01" => assert_eq!(quenched, 0.0),
            "ising:singlet" => assert!((quenched - 2.0).abs() < 1e-12),
            other => panic!("unexpected label {other}"),
        }
    }
    // the interacting form credits the product state once the coupling is on
    let original: f64 = rows[4][2].parse().unwrap();
    assert!(original > 0.05, "{original}");
}

#[test]
fn rescaled_measures_span_unit_interval() {
    let text = stdout(&ergovolume(&["benchmark-compare", "--spins", "4", "--nph", "2", "--rescale"]));
    let (_, columns, rows) = parse_csv(&text);
    assert_eq!(columns, ["x", "erg_volume", "ggm", "gme_concurrence"]);
    for k in 1..4 {
        let col = column(&rows, k);
        assert!(col.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(col.contains(&1.0) && col.contains(&0.0));
    }
}

#[test]
fn short_quench_with_variational_column() {
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("quench.csv");
    let args = [
        "tfim-dynamics", "--spins", "3", "--t-grid", "0:0.2:0.1", "--depth", "1", "--restarts", "2",
        "--max-iterations", "3000", "-o", out.to_str().unwrap(),
    ];
    assert!(ergovolume(&args).status.success());
    let csv = fs::read_to_string(&out).unwrap();
    let (_, columns, rows) = parse_csv(&csv);
    assert_eq!(columns, ["t", "volume_exact", "volume_vqa", "ggm"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(column(&rows, 1)[0], 0.0);
    // variational passive energies bound the exact ones from above
    for r in &rows {
        let (exact, vqa): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!(vqa >= exact - 1e-6, "{exact} {vqa}");
    }
}
