use std::path::Path;
use std::process::{Command, Output};

use chlo_sv::filter::{run_filter, FilterConfig, ModelVariant};
use chlo_sv::io::{parse_bars, to_observations, RunConfig};
use chlo_sv::rng::{Purpose, RngStreams};
use chlo_sv::simulator::{simulate_dataset, SimConfig};

fn chlo_sv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chlo-sv")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_path(path).unwrap();
    rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn simulate_then_fit_matches_in_memory_fit() {
    let dir = tempfile::tempdir().unwrap();
    let bars = dir.path().join("bars.csv");
    let truth = dir.path().join("truth.csv");
    let fit = dir.path().join("fit.csv");
    let out = chlo_sv(&["simulate", "--periods", "30", "--seed", "21", "--output", s(&bars), "--truth", s(&truth)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = chlo_sv(&["fit", "--model", "rcsv", "--particles", "800", "--seed", "3", "--input", s(&bars), "--output", s(&fit)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let sim = SimConfig {
        n_periods: 30,
        seed: 21,
        ..SimConfig::default()
    };
    let mut rng = RngStreams::new(21).derive(0).stream(Purpose::Simulate, 0, 0);
    let data = simulate_dataset(&sim, &mut rng).unwrap();

    let t = csv_rows(&truth);
    assert_eq!(t[0], ["date", "log_sigma", "sigma"]);
    assert_eq!(t.len(), 31);
    for (row, want) in t[1..].iter().zip(&data.true_log_sigma) {
        assert_eq!(row[1].parse::<f64>().unwrap(), *want);
    }

    let parsed = to_observations(&parse_bars(&bars, true).unwrap(), false);
    for (a, b) in parsed.iter().zip(&data.bars) {
        assert!((a.close - b.close).abs() < 1e-14 && (a.open - b.open).abs() < 1e-14);
    }
    let cfg = FilterConfig {
        variant: ModelVariant::Rcsv,
        n_particles: 800,
        seed: 3,
        ..FilterConfig::default()
    };
    let snaps = run_filter(&data.bars, &cfg).unwrap();
    let rows = csv_rows(&fit);
    assert_eq!(rows.len(), 31);
    assert_eq!(&rows[0][..5], ["date", "time_index", "sigma_mean", "sigma_q05", "sigma_q95"]);
    assert_eq!(rows[0].len(), 21);
    for (row, snap) in rows[1..].iter().zip(&snaps) {
        assert_eq!(row[1].parse::<usize>().unwrap(), snap.time_index);
        let m: f64 = row[2].parse().unwrap();
        assert!((m - snap.sigma.mean).abs() <= 1e-9 * snap.sigma.mean, "{m} vs {}", snap.sigma.mean);
    }
}

#[test]
fn weekend_flag_is_neutral_on_chained_bars() {
    let dir = tempfile::tempdir().unwrap();
    let bars = dir.path().join("bars.csv");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(chlo_sv(&["simulate", "--periods", "15", "--output", s(&bars)]).status.success());
    let common = ["fit", "--particles", "500", "--input", s(&bars)];
    assert!(chlo_sv(&[&common[..], &["--output", s(&a)]].concat()).status.success());
    assert!(chlo_sv(&[&common[..], &["--output", s(&b), "--weekend-effect"]].concat()).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let bars = dir.path().join("bars.csv");
    std::fs::write(&cfg, format!("n_periods = 12\nseed = 4\noutput = \"{}\"\n", s(&bars))).unwrap();
    assert!(chlo_sv(&["simulate", "--config", s(&cfg)]).status.success());
    assert_eq!(csv_rows(&bars).len(), 13);
    assert!(chlo_sv(&["simulate", "--config", s(&cfg), "--periods", "7"]).status.success());
    assert_eq!(csv_rows(&bars).len(), 8);
    let loaded = RunConfig::load(&cfg).unwrap();
    assert_eq!(loaded.n_periods, 12);
}

#[test]
fn exit_codes_follow_error_categories() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");

    let missing = chlo_sv(&["fit", "--input", s(&dir.path().join("nope.csv")), "--output", s(&out)]);
    assert_eq!(missing.status.code(), Some(2));

    let no_output = chlo_sv(&["simulate"]);
    assert_eq!(no_output.status.code(), Some(2));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "date,open,high,low,close\n2000-01-03,10,9,8,10.5\n").unwrap();
    let strict = chlo_sv(&["fit", "--strict", "--input", s(&bad), "--output", s(&out)]);
    assert_eq!(strict.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("row 2"));
    let lenient = chlo_sv(&["fit", "--particles", "200", "--input", s(&bad), "--output", s(&out)]);
    assert!(lenient.status.success());

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "particles = \"many\"\n").unwrap();
    assert_eq!(chlo_sv(&["simulate", "--config", s(&cfg)]).status.code(), Some(2));

    let unknown = chlo_sv(&["fit", "--model", "garch"]);
    assert!(!unknown.status.success());
}
