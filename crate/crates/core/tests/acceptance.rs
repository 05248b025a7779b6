//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use neurogrid::gridworld::ObstacleLayout;
use neurogrid::guidance::compensate;
use neurogrid::harness::export::OutputFormat;
use neurogrid::harness::sweep::{
    dynamic_current_demo, run_named_sweep, run_ratio_family, sweep_directions_2d,
    sweep_directions_3d, sweep_obstacle_ratio, sweep_speeds, SweepKind, SweepSettings, SweepTable,
    SPEEDS,
};
use neurogrid::{plan_bnnp, shortest_path, Cell, CurrentSpec, GridMap, RunRecord, Variant, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn cbnnp(records: &[RunRecord]) -> impl Iterator<Item = &RunRecord> {
    records.iter().filter(|r| r.variant == Variant::Cbnnp)
}

fn check_optimal(tables: &[(SweepTable, f64)], expected: f64, per_run_ms: f64) -> Check {
    let mut n = 0;
    let mut slowest = 0.0f64;
    for (table, elapsed_ms) in tables {
        for r in cbnnp(&table.records) {
            n += 1;
            if !r.reached {
                return Err(format!("{} did not reach", r.scenario));
            }
            for (what, len) in [
                ("planned", r.planned_length),
                ("traveled", r.traveled_length),
            ] {
                if (len - expected).abs() > 1e-3 {
                    return Err(format!("{}: {what} length {len:.6}", r.scenario));
                }
            }
        }
        // each scenario is one condition: plan + both simulations
        let per_scenario = elapsed_ms / table.columns.len() as f64;
        slowest = slowest.max(table.records.iter().map(|r| r.wall_ms).fold(0.0, f64::max));
        if per_scenario > per_run_ms {
            return Err(format!("{}: {per_scenario:.1} ms per scenario", table.name));
        }
    }
    Ok(format!(
        "{n} runs at {expected}, slowest simulation {slowest:.2} ms"
    ))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

fn two_d(settings: &SweepSettings) -> Check {
    let (dirs, t1) = timed(|| sweep_directions_2d(settings).unwrap());
    let (speeds, t2) = timed(|| sweep_speeds(2, settings).unwrap());
    let msg = check_optimal(&[(dirs, t1), (speeds, t2)], 10.8995, 1000.0)?;
    if t1 + t2 > 30_000.0 {
        return Err(format!("2D sweeps took {:.1} s", (t1 + t2) / 1e3));
    }
    Ok(format!("{msg}, both 2D sweeps {:.0} ms", t1 + t2))
}

fn three_d(settings: &SweepSettings) -> Check {
    let (dirs, t1) = timed(|| sweep_directions_3d(settings).unwrap());
    let (speeds, t2) = timed(|| sweep_speeds(3, settings).unwrap());
    check_optimal(&[(dirs, t1), (speeds, t2)], 13.5386, 2000.0)
}

fn tracking(settings: &SweepSettings) -> Check {
    let mut records = Vec::new();
    records.extend(sweep_directions_2d(settings).unwrap().records);
    records.extend(sweep_speeds(2, settings).unwrap().records);
    records.extend(sweep_directions_3d(settings).unwrap().records);
    records.extend(sweep_speeds(3, settings).unwrap().records);
    records.extend(dynamic_current_demo(settings).unwrap().records());
    records.extend(sweep_obstacle_ratio(settings).unwrap().records);
    let mut n = 0;
    let mut worst = 0.0f64;
    for r in cbnnp(&records) {
        n += 1;
        worst = worst.max(r.deviation_max);
        if r.deviation_max > 1e-9 {
            return Err(format!("{}: deviation {:e}", r.scenario, r.deviation_max));
        }
    }
    Ok(format!("{n} compensated runs, worst deviation {worst:e} m"))
}

fn bnnp_qualitative(settings: &SweepSettings) -> Check {
    // (a)
    let dirs = sweep_directions_2d(settings).unwrap();
    let b0 = dirs
        .records
        .iter()
        .find(|r| r.variant == Variant::Bnnp && r.scenario.ends_with("/0"))
        .unwrap();
    let c0 = cbnnp(&dirs.records).next().unwrap();
    if !(b0.reached
        && (10.95..=12.0).contains(&b0.traveled_length)
        && b0.traveled_length > c0.traveled_length)
    {
        return Err(format!("(a) BNNP 0.05 m/s at 0 deg: {b0:?}"));
    }
    // (b)
    let mut worst_rate = 1.0f64;
    for &speed in SPEEDS.iter().filter(|&&s| s >= 0.2) {
        let family = run_ratio_family(
            0.2,
            &CurrentSpec::Static2d {
                speed,
                direction: 0.0,
            },
            settings,
        )
        .unwrap();
        let bad = family
            .iter()
            .filter(|f| f.bnnp.collision || f.bnnp.fail)
            .count();
        let rate = bad as f64 / family.len() as f64;
        worst_rate = worst_rate.min(rate);
        if rate < 0.8 {
            return Err(format!(
                "(b) {speed} m/s: C/F in {bad} of {} seeds",
                family.len()
            ));
        }
    }
    // (c)
    let speeds = sweep_speeds(2, settings).unwrap();
    let dev: Vec<f64> = [0.05, 0.2, 0.5, 0.8]
        .iter()
        .map(|s| {
            speeds
                .records
                .iter()
                .find(|r| r.variant == Variant::Bnnp && r.scenario == format!("speeds2d/{s}"))
                .unwrap()
                .deviation_max
        })
        .collect();
    if dev.windows(2).any(|w| w[1] < w[0]) {
        return Err(format!("(c) deviations {dev:?}"));
    }
    Ok(format!(
        "(a) {:.4} m vs {:.4} m; (b) worst C/F rate {:.2}; (c) deviations {:.3?}",
        b0.traveled_length, c0.traveled_length, worst_rate, dev
    ))
}

fn equivalent(map: &GridMap, a: Cell, b: Cell) -> Result<(), String> {
    let plan = plan_bnnp(map, a, b, 0.5).map_err(|e| e.to_string())?;
    let oracle = shortest_path(map, a, b);
    if !plan.is_reached() || plan.step_profile() != oracle.step_profile() {
        return Err(format!(
            "{a} -> {b} on {:?}: planner {:?} vs oracle {:?}",
            map.extent(),
            plan.step_profile(),
            oracle.step_profile()
        ));
    }
    Ok(())
}

fn corners(extent: &[usize]) -> Vec<Cell> {
    let axes: Vec<Vec<i64>> = extent.iter().map(|&e| vec![0, e as i64 - 1]).collect();
    let mut out = vec![vec![]];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| axis.iter().map(move |&v| [p.clone(), vec![v]].concat()))
            .collect();
    }
    out.iter().map(|c| Cell::from_slice(c).unwrap()).collect()
}

fn oracle_equivalence() -> Check {
    let mut pairs = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut extents: Vec<Vec<usize>> = Vec::new();
    for w in 1..=20 {
        for h in 1..=20 {
            extents.push(vec![w, h]);
        }
    }
    let sizes = [1, 2, 3, 4, 6, 9, 14, 20];
    for &x in &sizes {
        for &y in &sizes {
            for &z in &sizes {
                extents.push(vec![x, y, z]);
            }
        }
    }
    for extent in &extents {
        let map = GridMap::empty(extent).unwrap();
        let mut cells = corners(extent);
        for _ in 0..4 {
            let c: Vec<i64> = extent.iter().map(|&e| rng.gen_range(0..e as i64)).collect();
            cells.push(Cell::from_slice(&c).unwrap());
        }
        for &a in &cells {
            for &b in &cells {
                if a != b {
                    equivalent(&map, a, b)?;
                    pairs += 1;
                }
            }
        }
    }

    let mut reached = 0;
    for seed in 0..200u64 {
        let (w, h) = (rng.gen_range(4..=12usize), rng.gen_range(4..=12usize));
        let ratio = rng.gen_range(0.0..=0.3);
        let a = Cell::new2(rng.gen_range(0..w as i64), rng.gen_range(0..h as i64));
        let mut b = a;
        while b == a {
            b = Cell::new2(rng.gen_range(0..w as i64), rng.gen_range(0..h as i64));
        }
        let map = GridMap::random(&[w, h], ratio, seed, &[a, b], ObstacleLayout::Cells).unwrap();
        let plan = plan_bnnp(&map, a, b, 0.5).unwrap();
        if plan.waypoints.iter().any(|c| map.is_obstacle(c)) {
            return Err(format!("seed {seed}: plan crosses an obstacle"));
        }
        if plan.is_reached() {
            reached += 1;
            let oracle = shortest_path(&map, a, b);
            if plan.length() < oracle.length - 1e-12 {
                return Err(format!("seed {seed}: plan shorter than oracle"));
            }
        }
    }
    Ok(format!(
        "{pairs} empty-map pairs over {} extents match step counts; {reached} reached seeded plans >= oracle",
        extents.len()
    ))
}

fn compensation_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for dims in [2, 3] {
        for _ in 0..100_000 {
            let mut draw = || {
                let v: Vec<f64> = (0..dims).map(|_| rng.gen_range(-2.0..=2.0)).collect();
                Vector::from_slice(&v).unwrap()
            };
            let (v_d, v_cur) = (draw(), draw());
            let err = (compensate(&v_d, &v_cur).unwrap() + v_cur - v_d).norm();
            worst = worst.max(err);
            if err > 1e-12 {
                return Err(format!("{v_d} / {v_cur}: residual {err:e}"));
            }
        }
    }
    Ok(format!("2 x 100000 pairs, worst residual {worst:e}"))
}

fn ratio_sweep(settings: &SweepSettings) -> Check {
    let table = sweep_obstacle_ratio(settings).unwrap();
    let rows = |v| table.rows.iter().filter(move |r| r.algorithm == v);
    let collisions: usize = rows(Variant::Cbnnp).map(|r| r.collisions).sum();
    if collisions != 0 {
        return Err(format!("CBNNP collided {collisions} times"));
    }
    let rates: Vec<f64> = rows(Variant::Bnnp).map(|r| r.failure_rate).collect();
    if rates.windows(2).any(|w| w[1] < w[0]) {
        return Err(format!("BNNP C/F rates {rates:?}"));
    }
    Ok(format!("CBNNP collisions 0; BNNP C/F rates {rates:?}"))
}

fn determinism(settings: &SweepSettings) -> Check {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut files = Vec::new();
    for dir in &dirs {
        files.clear();
        for kind in SweepKind::ALL {
            let report =
                run_named_sweep(kind, settings, dir.path(), OutputFormat::Csv, false).unwrap();
            files.extend(
                report
                    .files
                    .into_iter()
                    .map(|p| p.file_name().unwrap().to_owned()),
            );
        }
    }
    for name in &files {
        let a = fs::read(dirs[0].path().join(name)).unwrap();
        let b = fs::read(dirs[1].path().join(name)).unwrap();
        if a != b {
            return Err(format!("{} differs between runs", name.to_string_lossy()));
        }
    }
    Ok(format!(
        "{} files byte-identical across two runs",
        files.len()
    ))
}

fn main() -> ExitCode {
    let settings = SweepSettings::default();
    let criteria: Vec<Criterion> = vec![
        ("2D optimal length", Box::new(|| two_d(&settings))),
        ("3D optimal length", Box::new(|| three_d(&settings))),
        ("CBNNP tracking exactness", Box::new(|| tracking(&settings))),
        (
            "BNNP qualitative agreement",
            Box::new(|| bnnp_qualitative(&settings)),
        ),
        ("Oracle equivalence", Box::new(oracle_equivalence)),
        ("Compensation identity", Box::new(compensation_identity)),
        ("Obstacle-ratio sweep", Box::new(|| ratio_sweep(&settings))),
        ("Determinism", Box::new(|| determinism(&settings))),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
