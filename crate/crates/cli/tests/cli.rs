use std::fs;
use std::path::Path;
use std::process::Command;

use dsmimo_cli::{emit_outputs, parse_config_str, read_manifest_config, run_experiment_command, Invocation, Preset, RunMeta};
use dsmimo_core::engine::{ExclusionCount, SeReport, UserRecord};
use dsmimo_core::{DetectorKind, ExperimentConfig, ModelTemplate};

fn meta() -> RunMeta {
    RunMeta {
        label: "test".into(),
        preset_hash: None,
        overrides: vec![],
        wall_time_s: 0.0,
    }
}

fn record(detector: DetectorKind, se: f64) -> UserRecord {
    UserRecord {
        drop: 0,
        cell: 1,
        user: 2,
        model: ModelTemplate::DoubleScattering {
            scatterers: 21,
            antenna_spacing: 0.5,
        },
        detector,
        sinr: 2f64.powf(se / 0.975) - 1.0,
        se_bps_hz: se,
        clamped: false,
    }
}

fn report(records: Vec<UserRecord>, detectors: Vec<DetectorKind>) -> SeReport {
    SeReport {
        models: vec![records[0].model],
        exclusions: detectors
            .iter()
            .map(|&d| ExclusionCount {
                model: records[0].model,
                detector: d,
                cell_realizations: 0,
            })
            .collect(),
        records,
        detectors,
        tau_p: 5,
        tau_c: 200,
    }
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn single_sample_report_has_one_data_row() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(vec![record(DetectorKind::Mmse, 3.0)], vec![DetectorKind::Mmse]);
    let files = emit_outputs(&r, &ExperimentConfig::default(), &meta(), dir.path()).unwrap();
    let users = read(&files[0]);
    let lines: Vec<&str> = users.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "drop,cell,user,model,detector,S,d_l,sinr,se_bps_hz");
    assert!(lines[1].starts_with("0,1,2,ds_s21_dl0.5,mmse,21,0.5,"));
    let cdf = read(&files[1]);
    assert_eq!(cdf.lines().collect::<Vec<_>>(), vec!["model,detector,se_bps_hz,cdf", "ds_s21_dl0.5,mmse,3,1"]);
}

#[test]
fn file_names_embed_preset_model_detector_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(vec![record(DetectorKind::Zf, 1.0)], vec![DetectorKind::Zf]);
    let mut config = ExperimentConfig::default();
    config.sampling.seed = 17;
    let files = emit_outputs(&r, &config, &meta(), dir.path()).unwrap();
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        vec![
            "test_seed17_users.csv",
            "test_seed17_cdf.csv",
            "test_ds_s21_dl0.5_zf_seed17_cdf.csv",
            "test_seed17_manifest.toml"
        ]
    );
}

#[test]
fn two_detectors_give_two_cdf_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(
        vec![
            record(DetectorKind::Mr, 0.5),
            record(DetectorKind::Mr, 1.5),
            record(DetectorKind::Zf, 4.0),
        ],
        vec![DetectorKind::Mr, DetectorKind::Zf],
    );
    let files = emit_outputs(&r, &ExperimentConfig::default(), &meta(), dir.path()).unwrap();
    let cdf = read(&files[1]);
    let detectors: Vec<&str> = cdf.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(detectors, vec!["mr", "mr", "zf"]);
    assert!(cdf.contains("ds_s21_dl0.5,mr,0.5,0.5\n"));
    assert!(cdf.contains("ds_s21_dl0.5,zf,4,1\n"));
}

#[test]
fn manifest_echo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::default();
    config.network.antennas = 64;
    config.network.array_broadside_rad = Some(vec![0.0, 1.0, 2.0, 3.0]);
    config.models = vec![
        ModelTemplate::Rayleigh,
        ModelTemplate::DoubleScattering {
            scatterers: 11,
            antenna_spacing: 0.1,
        },
    ];
    config.detectors = vec![DetectorKind::Zf, DetectorKind::Mr];
    config.sampling.seed = 99;
    config.output_dir = "out dir".into();
    let r = report(vec![record(DetectorKind::Zf, 1.0)], vec![DetectorKind::Zf]);
    let files = emit_outputs(&r, &config, &meta(), dir.path()).unwrap();
    let manifest = files.last().unwrap();
    assert_eq!(read_manifest_config(manifest).unwrap(), config);
    let text = read(manifest);
    assert!(text.contains("workers = 1"));
    assert!(text.contains("cell_realizations = 0"));
    assert!(text.contains("wall_time_s"));
}

#[test]
fn emit_reports_io_errors_with_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let r = report(vec![record(DetectorKind::Zf, 1.0)], vec![DetectorKind::Zf]);
    match emit_outputs(&r, &ExperimentConfig::default(), &meta(), &blocker.join("sub")) {
        Err(dsmimo_core::Error::Io { path, .. }) => assert!(path.starts_with(&blocker)),
        other => panic!("unexpected {other:?}"),
    }
}

fn tiny(dir: &Path, seed: u64) -> Invocation {
    Invocation {
        preset: Some(Preset::Smoke),
        seed: Some(seed),
        out: Some(dir.to_path_buf()),
        drops: Some(2),
        realizations: Some(10),
        overrides: vec!["network.antennas=8".into(), "network.users_per_cell=2".into()],
        ..Invocation::default()
    }
}

#[test]
fn rerun_with_the_same_seed_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let fa = run_experiment_command(&tiny(a.path(), 5)).unwrap();
    let fb = run_experiment_command(&tiny(b.path(), 5)).unwrap();
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        if x.extension().unwrap() == "csv" {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
        }
    }
    let c = tempfile::tempdir().unwrap();
    let fc = run_experiment_command(&tiny(c.path(), 6)).unwrap();
    assert_ne!(fs::read(&fa[0]).unwrap(), fs::read(&fc[0]).unwrap());
}

#[test]
fn preset_manifest_records_hash_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_experiment_command(&tiny(dir.path(), 3)).unwrap();
    let text = read(files.last().unwrap());
    assert!(text.contains(&Preset::Smoke.hash()));
    assert!(text.contains("network.antennas=8"));
    assert!(text.contains("sampling.drops=2"));
}

#[test]
fn presets_are_frozen() {
    // Changing a preset's numbers changes its hash; update these pins only deliberately.
    let pinned = [
        (Preset::Fig1, "a2d5e06b5d629fc98012c95d148d377551ea6641d53459d723fd49cc90c4d08b"),
        (Preset::Fig3, "d206170268ca99603005d955be6781201514023944e4ae7fd47d2dd5545b1bfe"),
        (Preset::Fig4, "af3facf4cda675bd2f32abd0ca7ba60cfb03f571aa87a2e95a9018ddf47613af"),
        (Preset::Fig5, "185be2b2d974ba69c89ee74c10bd495f84bb04003c1725feab17fa7d51325e70"),
        (Preset::Fig7, "c9217b51f9062cd3bf797a152b0ba414cccd9e6fcb0683443d37f99c93d502f1"),
        (Preset::Fig8, "09cbe0d77e3b1e32676b9041620c6554d2c1e9fdb2ae0de1d89745e6a56ea8e0"),
        (Preset::Fig9, "18694dd00cfc815d80a30bc95196e591a3787353dca6c9333c223fb3d924d3b7"),
        (Preset::Smoke, "69fdf70eb2d6da6a31f2acd8945d2ec9b1910b3ecd4aea6a1c1cb094febab1ae"),
    ];
    for (preset, hash) in pinned {
        assert_eq!(preset.hash(), hash, "{preset}");
    }
}

#[test]
fn preset_defaults_match_the_documented_schema() {
    let c = parse_config_str(&ExperimentConfig::default(), Some(""), &[]).unwrap();
    assert_eq!(c, ExperimentConfig::default());
}

fn dsmimo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dsmimo"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let status = dsmimo()
        .args(["run", "--out", out, "--set", "pilot.reuse_factor=41"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stderr).contains("pilot.reuse_factor"));

    let status = dsmimo().args(["figure", "--preset", "fig6"]).output().unwrap();
    assert_eq!(status.status.code(), Some(2));

    let status = dsmimo()
        .args(["run", "--config", dir.path().join("missing.toml").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(4));

    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "x").unwrap();
    let status = dsmimo()
        .args([
            "smoke",
            "--drops",
            "1",
            "--realizations",
            "1",
            "--set",
            "network.antennas=8",
            "--out",
            blocker.join("x").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(4));
}

#[test]
fn binary_smoke_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dsmimo()
        .args([
            "smoke",
            "--drops",
            "1",
            "--realizations",
            "5",
            "--set",
            "network.antennas=8",
            "--seed",
            "4",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("smoke_seed4_users.csv").exists());
    assert!(dir.path().join("smoke_seed4_manifest.toml").exists());
}

#[test]
fn binary_diag_writes_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dsmimo()
        .args([
            "diag",
            "--preset",
            "fig3",
            "--realizations",
            "2000",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let grid = read(&dir.path().join("fig3_seed1_correlation.csv"));
    let lines: Vec<&str> = grid.lines().collect();
    assert_eq!(lines.len(), 101);
    assert_eq!(lines[0].split(',').count(), 101);
}
