//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rml_v2x::channel::ChannelParams;
use rml_v2x::engine::{run_scenario, Mode, ScenarioConfig};
use rml_v2x::experiment::{run_sweep, Preset, SweepSpec, SweepTable};
use rml_v2x::geometry::{critical_blocking_distance, BlockageClass, BlockageGeometry, Position};
use rml_v2x::mobility::{Vehicle, VehicleId};
use rml_v2x::rml::{
    best_path, classify_blockage, flow_estimate, path_metric, BlockageMap, BlockageThreshold, FlowEstimate,
    PolicyParams, QPolicy, RelayPath, RelaySelector, SelectionMode, Snapshot,
};

/// Seeds per sweep point in the ordering criteria.
const SWEEP_SEEDS: u64 = 20;
const SWEEP_RUNTIME_LIMIT: Duration = Duration::from_secs(120);
const METRIC_TOL: f64 = 1e-9;
const METRIC_VECTORS: usize = 10_000;
const RELAY_WORLDS: usize = 500;
const Q_SEEDS: u64 = 100;
const Q_EPISODES: usize = 500;
const Q_REQUIRED: usize = 95;
const MONOTONE_PAIRS: usize = 1_000;
const LINEAR_SLACK: f64 = 1.5;
const VEHICLE_SCALING_LIMIT: f64 = 8.0;
const NULL_SEEDS: u64 = 20;
const NULL_TOL: f64 = 0.01;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(2, |n| n.get())
}

fn orderings(table: &SweepTable) -> (Vec<String>, bool) {
    let mut notes = Vec::new();
    let mut ok = true;
    for &v in &table.spec.values {
        let r = table.row(v, Mode::Rml).unwrap();
        let b = table.row(v, Mode::Baseline).unwrap();
        let pdr = r.pdr_mean >= b.pdr_mean;
        let lat = r.latency_ms_mean <= b.latency_ms_mean;
        let thr = r.throughput_mbps_mean >= b.throughput_mbps_mean;
        ok &= pdr && lat && thr;
        notes.push(format!(
            "{v}: pdr {:.4}/{:.4}{} lat {:.5}/{:.5}{} thr {:.4}/{:.4}{}",
            r.pdr_mean,
            b.pdr_mean,
            if pdr { "" } else { "!" },
            r.latency_ms_mean,
            b.latency_ms_mean,
            if lat { "" } else { "!" },
            r.throughput_mbps_mean,
            b.throughput_mbps_mean,
            if thr { "" } else { "!" },
        ));
    }
    (notes, ok)
}

fn c1_blockage_sweep() -> Verdict {
    let start = Instant::now();
    let table = run_sweep(&SweepSpec::preset(Preset::Fig4To6, SWEEP_SEEDS), jobs()).unwrap();
    let elapsed = start.elapsed();
    let (notes, ordered) = orderings(&table);
    let at10 = table.row(10, Mode::Rml).unwrap().pdr_mean;
    let pass = ordered && at10 >= 0.90 && elapsed <= SWEEP_RUNTIME_LIMIT;
    verdict(
        pass,
        format!(
            "rml/baseline [{}]; pdr(rml)@10 = {at10:.4} (>= 0.90); {:.1}s",
            notes.join("; "),
            elapsed.as_secs_f64()
        ),
    )
}

fn c2_vehicle_sweep() -> Verdict {
    let table = run_sweep(&SweepSpec::preset(Preset::Fig7To9, SWEEP_SEEDS), jobs()).unwrap();
    let (notes, ordered) = orderings(&table);
    let gap = table.row(10, Mode::Rml).unwrap().pdr_mean - table.row(10, Mode::Baseline).unwrap().pdr_mean;
    verdict(
        ordered && gap >= 0.15,
        format!("rml/baseline [{}]; gap@10 = {gap:.4} (>= 0.15)", notes.join("; ")),
    )
}

fn random_probs(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = rng.random_range(1..=8);
    (0..len).map(|_| rng.random_range(1e-6..=1.0)).collect()
}

fn c3_metric_algebra() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..METRIC_VECTORS {
        let ps = random_probs(&mut rng);
        let sum_ln: f64 = ps.iter().map(|p| p.ln()).sum();
        let ln_prod = ps.iter().product::<f64>().ln();
        let lib = path_metric(&ps).unwrap();
        worst = worst.max((sum_ln - ln_prod).abs()).max((lib.metric - ln_prod).abs());
    }
    let mut mismatches = 0;
    for _ in 0..METRIC_VECTORS / 10 {
        let n = rng.random_range(1..=6);
        let sets: Vec<Vec<f64>> = (0..n).map(|_| random_probs(&mut rng)).collect();
        let paths: Vec<RelayPath> = sets
            .iter()
            .map(|ps| RelayPath::new((0..ps.len() as u32).map(VehicleId).collect(), ps.clone()).unwrap())
            .collect();
        let products: Vec<f64> = sets.iter().map(|ps| ps.iter().product()).collect();
        let top = products.iter().cloned().fold(f64::MIN, f64::max);
        let chosen = best_path(&paths).unwrap();
        if products[chosen] < top * (1.0 - 1e-12) {
            mismatches += 1;
        }
    }
    verdict(
        worst < METRIC_TOL && mismatches == 0,
        format!("max |sum ln p - ln prod p| = {worst:.2e}; argmax mismatches {mismatches}"),
    )
}

fn c4_relay_oracle() -> Verdict {
    let channel = ChannelParams::default();
    let policy = QPolicy::new(PolicyParams::default());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    let mut mismatches = 0;
    for _ in 0..RELAY_WORLDS {
        let (terrain, blockages, vehicles) = common::random_world(&mut rng, 10);
        let bs_los = common::bs_visibility(&terrain, &blockages, &vehicles);
        let map = BlockageMap::default();
        let snapshot = Snapshot {
            terrain: &terrain,
            blockages: &blockages,
            vehicles: &vehicles,
            bs_los: &bs_los,
            map: &map,
        };
        for target in &vehicles {
            let mut selector = RelaySelector::default();
            let got = selector
                .select(
                    &snapshot,
                    target.id,
                    &policy,
                    &channel,
                    SelectionMode::GreedyNearest,
                    false,
                    &mut rng,
                )
                .chosen_relay_id;
            checked += 1;
            if got != common::oracle_nearest_relay(&terrain, &blockages, &vehicles, target.id) {
                mismatches += 1;
            }
        }
    }
    verdict(
        mismatches == 0,
        format!("{RELAY_WORLDS} worlds, {checked} targets, {mismatches} mismatches"),
    )
}

fn c5_q_convergence() -> Verdict {
    let fx = common::RelayFixture::new();
    let cands = common::ranked_candidates(&fx);
    let expected: Vec<f64> = cands.iter().map(|c| common::expected_reward(c, &fx.channel)).collect();
    let best = (0..expected.len())
        .max_by(|&a, &b| expected[a].total_cmp(&expected[b]))
        .unwrap();
    let hits = (0..Q_SEEDS)
        .filter(|&s| common::train_fixture(&fx, s, Q_EPISODES).0 == best)
        .count();
    let shown: Vec<String> = expected.iter().map(|e| format!("{e:.4}")).collect();
    verdict(
        hits >= Q_REQUIRED,
        format!(
            "expected rewards [{}], argmax {best}; greedy matches on {hits}/{Q_SEEDS} seeds (>= {Q_REQUIRED})",
            shown.join(", ")
        ),
    )
}

fn c6_critical_distance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    for _ in 0..MONOTONE_PAIRS {
        let h_s = rng.random_range(0.5..2.5);
        let h_bs = rng.random_range(h_s + 5.0..40.0);
        let h_l = rng.random_range(0.0..h_bs - 0.1);
        let w_v = rng.random_range(0.1..80.0);
        let o1 = rng.random_range(0.0..250.0);
        let o2 = o1 + rng.random_range(1e-3..100.0);
        let g = BlockageGeometry {
            omega_m: o1,
            w_v,
            h_bs,
            h_l,
            h_s,
        };
        let near = critical_blocking_distance(&g).unwrap();
        let far = critical_blocking_distance(&BlockageGeometry { omega_m: o2, ..g }).unwrap();
        if far.partial_cmp(&near) != Some(std::cmp::Ordering::Greater) {
            violations += 1;
        }
    }
    let tall = BlockageGeometry {
        omega_m: 50.0,
        w_v: 20.0,
        h_bs: 25.0,
        h_l: 25.0,
        h_s: 1.5,
    };
    let taller = BlockageGeometry { h_l: 30.0, ..tall };
    let infinite = critical_blocking_distance(&tall).unwrap() == f64::INFINITY
        && critical_blocking_distance(&taller).unwrap() == f64::INFINITY;
    let flat = BlockageGeometry {
        omega_m: 70.0,
        w_v: 50.0,
        h_bs: 25.0,
        h_l: 1.5,
        h_s: 1.5,
    };
    let exact = critical_blocking_distance(&flat).unwrap() == 70.0 + 50.0 / 2.0;
    verdict(
        violations == 0 && infinite && exact,
        format!("monotone violations {violations}/{MONOTONE_PAIRS}; h_l >= h_bs -> inf: {infinite}; h_l = h_s -> omega + w/2: {exact}"),
    )
}

fn c7_classification() -> Verdict {
    let thr = BlockageThreshold::default();
    let got: Vec<BlockageClass> = [4.87, 4.8768, 4.88]
        .iter()
        .map(|&h| classify_blockage(h, thr))
        .collect();
    let want = [
        BlockageClass::Temporary,
        BlockageClass::Temporary,
        BlockageClass::Permanent,
    ];
    verdict(got == want, format!("{{4.87, 4.8768, 4.88}} -> {got:?}"))
}

fn c8_flow() -> Verdict {
    let run = |n, t_s, t_e, arrivals, departures, m| {
        let mut f = FlowEstimate {
            n_current: n,
            m_constant: m,
            t_s,
            t_e,
            arrivals,
            departures,
            ..Default::default()
        };
        flow_estimate(&mut f).unwrap()
    };
    let got = [
        run(7, 1.0, 3.0, 5, 5, 0),
        run(10, 1.0, 2.0, 4, 2, 1),
        run(0, 1.0, 1.0, 0, 4, 0),
    ];
    verdict(
        got == [7.0, 10.0, 0.0],
        format!(
            "balanced 7 -> {}, hand 10 -> {}, clamped 0 -> {}",
            got[0], got[1], got[2]
        ),
    )
}

fn run_cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_rml-v2x"))
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn same_files(a: &Path, b: &Path, names: &[&str]) -> bool {
    names
        .iter()
        .all(|n| match (std::fs::read(a.join(n)), std::fs::read(b.join(n))) {
            (Ok(x), Ok(y)) => !x.is_empty() && x == y,
            _ => false,
        })
}

fn c9_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.toml");
    std::fs::write(&cfg, "[scenario]\nsim_time_s = 20.0\nn_blockages = 8\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = |name: &str| dir.path().join(name);
    let s = |p: &Path| p.to_str().unwrap().to_string();

    let sim = run_cli(&["simulate", "--config", cfg, "--seed", "9", "--out", &s(&out("sim_a"))])
        && run_cli(&["simulate", "--config", cfg, "--seed", "9", "--out", &s(&out("sim_b"))])
        && same_files(&out("sim_a"), &out("sim_b"), &["trace.csv", "metrics.json"]);
    let sweep = run_cli(&[
        "sweep",
        "--preset",
        "fig7-9",
        "--seeds",
        "2",
        "--jobs",
        "1",
        "--out",
        &s(&out("sw_a")),
    ]) && run_cli(&[
        "sweep",
        "--preset",
        "fig7-9",
        "--seeds",
        "2",
        "--jobs",
        "4",
        "--out",
        &s(&out("sw_b")),
    ]) && same_files(&out("sw_a"), &out("sw_b"), &["results.csv", "results.json"]);
    verdict(
        sim && sweep,
        format!("simulate repeat identical: {sim}; sweep repeat (1 vs 4 jobs) identical: {sweep}"),
    )
}

fn time_decisions(k: usize, reps: usize) -> f64 {
    let terrain = common::default_terrain();
    let target = Vehicle::car(VehicleId(0), Position::new(150.0, 30.0));
    let mut vehicles = vec![target];
    for i in 0..k {
        let angle = i as f64 / k as f64 * std::f64::consts::PI;
        let p = Position::new(150.0 + 60.0 * angle.cos(), 30.0 + 60.0 * angle.sin());
        vehicles.push(Vehicle::car(VehicleId(i as u32 + 1), p));
    }
    let blockages = Vec::new();
    let bs_los = vec![true; vehicles.len()];
    let map = BlockageMap::default();
    let snapshot = Snapshot {
        terrain: &terrain,
        blockages: &blockages,
        vehicles: &vehicles,
        bs_los: &bs_los,
        map: &map,
    };
    let channel = ChannelParams::default();
    let policy = QPolicy::new(PolicyParams {
        max_actions: k,
        ..Default::default()
    });
    let mut selector = RelaySelector::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let start = Instant::now();
    for _ in 0..reps {
        let d = selector.select(
            &snapshot,
            VehicleId(0),
            &policy,
            &channel,
            SelectionMode::Learned,
            true,
            &mut rng,
        );
        assert_eq!(d.n_candidates, k);
        std::hint::black_box(d);
    }
    start.elapsed().as_secs_f64() / reps as f64
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn c10_complexity() -> Verdict {
    let ks = [2usize, 4, 8, 16];
    let means: Vec<f64> = ks
        .iter()
        .map(|&k| median((0..7).map(|_| time_decisions(k, 2000)).collect()))
        .collect();
    // Least-squares line through (k, mean).
    let n = ks.len() as f64;
    let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, means.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&means).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let intercept = my - slope * mx;
    let ratios: Vec<f64> = xs
        .iter()
        .zip(&means)
        .map(|(x, y)| y / (intercept + slope * x))
        .collect();
    let linear = ratios.iter().all(|&r| r <= LINEAR_SLACK);

    // Ten seeds per batch; the two sizes are interleaved and the fastest
    // batch of each is kept, which filters out scheduler noise.
    let batch = |n_vehicles: usize| {
        let mut cfg = ScenarioConfig::default();
        cfg.scenario.n_vehicles = n_vehicles;
        cfg.scenario.n_blockages = 10;
        let start = Instant::now();
        for seed in 1..=10 {
            cfg.scenario.seed = seed;
            run_scenario(&cfg).unwrap();
        }
        start.elapsed().as_secs_f64()
    };
    let (mut small, mut large) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..5 {
        small = small.min(batch(10));
        large = large.min(batch(50));
    }
    let scale = large / small;
    let shown: Vec<String> = ks
        .iter()
        .zip(&means)
        .zip(&ratios)
        .map(|((k, m), r)| format!("k={k} {:.2}us ({r:.2}x fit)", m * 1e6))
        .collect();
    verdict(
        linear && scale <= VEHICLE_SCALING_LIMIT,
        format!(
            "{}; 50 vs 10 vehicles {scale:.2}x (<= {VEHICLE_SCALING_LIMIT})",
            shown.join(", ")
        ),
    )
}

fn c11_null() -> Verdict {
    let mean_pdr = |mode: Mode| {
        (1..=NULL_SEEDS)
            .map(|seed| {
                let mut cfg = ScenarioConfig::default();
                cfg.scenario.n_blockages = 0;
                cfg.scenario.mode = mode;
                cfg.scenario.seed = seed;
                run_scenario(&cfg).unwrap().metrics.pdr
            })
            .sum::<f64>()
            / NULL_SEEDS as f64
    };
    let (r, b) = (mean_pdr(Mode::Rml), mean_pdr(Mode::Baseline));
    verdict(
        (r - b).abs() < NULL_TOL,
        format!(
            "pdr rml {r:.4} baseline {b:.4}; |diff| {:.4} (< {NULL_TOL})",
            (r - b).abs()
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 11] = [
        ("1 blockage sweep orderings", c1_blockage_sweep),
        ("2 vehicle sweep orderings", c2_vehicle_sweep),
        ("3 metric algebra", c3_metric_algebra),
        ("4 nearest relay oracle", c4_relay_oracle),
        ("5 q-learning convergence", c5_q_convergence),
        ("6 critical distance properties", c6_critical_distance),
        ("7 classification boundary", c7_classification),
        ("8 flow estimate examples", c8_flow),
        ("9 determinism", c9_determinism),
        ("10 complexity scaling", c10_complexity),
        ("11 zero-blockage null", c11_null),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("[{}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
