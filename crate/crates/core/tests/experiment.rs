use std::fs;

use rml_v2x::engine::Mode;
use rml_v2x::experiment::{
    parse_config, read_rows, read_structured, run_sweep, write_results, Preset, ResultFormat, SweepSpec, RESULTS_HEADER,
};
use rml_v2x::Error;

fn quick(preset: Preset, seeds: u64) -> SweepSpec {
    let mut spec = SweepSpec::preset(preset, seeds);
    spec.base.scenario.sim_time_s = 2.0;
    spec
}

#[test]
fn config_files_load_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.toml");
    fs::write(&empty, "").unwrap();
    assert_eq!(parse_config(&empty).unwrap(), Default::default());

    let partial = dir.path().join("partial.toml");
    fs::write(&partial, "[scenario]\nn_blockages = 6\n").unwrap();
    let cfg = parse_config(&partial).unwrap();
    assert_eq!(cfg.scenario.n_blockages, 6);
    assert_eq!(cfg.scenario.n_vehicles, 20);

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[scenario]\ndt_s = -1\n").unwrap();
    assert!(matches!(parse_config(&bad), Err(Error::Validation(_))));

    assert!(matches!(
        parse_config(&dir.path().join("missing.toml")),
        Err(Error::Io { .. })
    ));
}

#[test]
fn single_point_gives_one_row_per_mode() {
    let mut spec = quick(Preset::Fig4To6, 1);
    spec.values = vec![4];
    let table = run_sweep(&spec, 2).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.rows[0].mode, Mode::Rml);
    assert_eq!(table.rows[1].mode, Mode::Baseline);
    assert!(table.rows.iter().all(|r| r.seed_count == 1 && r.pdr_sd == 0.0));

    let dir = tempfile::tempdir().unwrap();
    let mut one = table.clone();
    one.rows.truncate(1);
    let path = dir.path().join("one.csv");
    write_results(&one, &path, ResultFormat::Delimited).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], RESULTS_HEADER);
    assert!(lines[1].starts_with("blockages,4,rml,1,"));
}

#[test]
fn preset_sweep_writes_ten_rows_and_round_trips() {
    let spec = quick(Preset::Fig4To6, 2);
    let table = run_sweep(&spec, 4).unwrap();
    assert_eq!(table.rows.len(), 10);
    let values: Vec<u32> = table.rows.iter().map(|r| r.value).collect();
    assert_eq!(values, vec![2, 2, 4, 4, 6, 6, 8, 8, 10, 10]);

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("results.csv");
    let json = dir.path().join("results.json");
    write_results(&table, &csv, ResultFormat::Delimited).unwrap();
    write_results(&table, &json, ResultFormat::Structured).unwrap();
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 11);
    assert_eq!(read_rows(&csv).unwrap(), table.rows);
    assert_eq!(read_structured(&json).unwrap(), table);
}

#[test]
fn sweep_output_is_independent_of_thread_count() {
    let spec = quick(Preset::Fig7To9, 2);
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for jobs in [1, 3] {
        let path = dir.path().join(format!("r{jobs}.csv"));
        write_results(&run_sweep(&spec, jobs).unwrap(), &path, ResultFormat::Delimited).unwrap();
        files.push(fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn failing_point_is_named() {
    let mut spec = quick(Preset::Fig4To6, 1);
    spec.values = vec![2, 60];
    let err = run_sweep(&spec, 1).unwrap_err();
    match &err {
        Error::SweepPoint { value, axis, .. } => {
            assert_eq!(*value, 60);
            assert_eq!(axis, "blockages");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains("blockages=60"));
}

#[test]
fn empty_table_is_not_written() {
    let mut table = run_sweep(
        &{
            let mut s = quick(Preset::Fig4To6, 1);
            s.values = vec![2];
            s
        },
        1,
    )
    .unwrap();
    table.rows.clear();
    let dir = tempfile::tempdir().unwrap();
    assert!(write_results(&table, &dir.path().join("x.csv"), ResultFormat::Delimited).is_err());
}
