//! End-to-end acceptance checks, one line per criterion.
//!
//! Run a subset with `cargo test -p gapbridge-validation --test acceptance -- 1 3 5`.
//! `GAPBRIDGE_FULL_SCALE=1` runs the flow criteria on the full 2000-frame
//! cavity instead of the reduced one.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use gapbridge::{run, Command, ExperimentConfig, Invocation};
use gapbridge_core::dataset::{split_dataset, WindowOptions, WindowSet};
use gapbridge_core::io::save_trajectory;
use gapbridge_core::metrics::{dft, dft_magnitude, freq_percent_diff, pod_decompose, pod_of_matrix, Selector};
use gapbridge_core::nn::{mse_loss, Activation, DenseSpec, Network, NetworkSpec};
use gapbridge_core::solver::{
    solve_heat_1d, solve_lid_cavity_2d, CavityConfig, HeatConfig, HeatScheme, InitialProfile,
};
use gapbridge_core::{FieldView, Grid, Trajectory};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- helpers

fn write_config(dir: &Path, body: &str) -> ExperimentConfig {
    let path = dir.join("experiment.toml");
    fs::write(&path, body).unwrap();
    ExperimentConfig::load(&path).unwrap()
}

fn execute(cfg: &ExperimentConfig, command: Command) {
    let inv = Invocation::new(command, cfg.clone());
    let (_, res) = run(&inv);
    if let Err(e) = res {
        panic!("{} failed: {e}", command.as_str());
    }
}

fn read_csv(path: &Path) -> Vec<HashMap<String, String>> {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(str::to_string)).collect())
        .collect()
}

fn num(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key]
        .parse()
        .unwrap_or_else(|_| panic!("column {key} = {:?}", row[key]))
}

/// `(mse, mcs)` of one split/pair row of `eval/metrics.csv`.
fn metric(rows: &[HashMap<String, String>], split: &str, pair: &str) -> (f64, Option<f64>) {
    let r = rows
        .iter()
        .find(|r| r["split"] == split && r["pair"] == pair)
        .unwrap_or_else(|| panic!("no {split}/{pair} row"));
    (num(r, "mse"), r["mcs"].parse().ok())
}

fn retained_line(path: &Path) -> (usize, usize) {
    let text = fs::read_to_string(path).unwrap();
    let line = text.lines().find(|l| l.starts_with("# retained")).unwrap();
    let mut it = line
        .split_whitespace()
        .filter_map(|w| w.split_once('='))
        .map(|(_, v)| v.parse().unwrap());
    (it.next().unwrap(), it.next().unwrap())
}

// ------------------------------------------------------------- criterion 1

fn split_counts(curr: &Trajectory, aux: Option<&Trajectory>, act: &Trajectory, train: usize, seed: u64) -> [usize; 4] {
    let opts = WindowOptions {
        k: 3,
        time_range: Some((0.0, act.time(train - 1))),
        mask: None,
    };
    let ws = WindowSet::new(curr, aux, act, opts).unwrap();
    let b = split_dataset(&ws, train, [0.6, 0.1, 0.3], seed).unwrap();
    [
        b.train.len(),
        b.validation.len(),
        b.local_test.len(),
        b.future_test.len(),
    ]
}

fn zeros(grid: Grid, frames: usize, names: &[&str]) -> Trajectory {
    let len = grid.point_count() * frames * names.len();
    Trajectory::new(
        "zeros",
        grid,
        1e-3,
        names.iter().map(|s| s.to_string()).collect(),
        vec![0.0; len],
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let act = solve_heat_1d(&HeatConfig::default()).unwrap();
    let curr = solve_heat_1d(&HeatConfig {
        diffusivity: 1.0,
        ..HeatConfig::default()
    })
    .unwrap();
    let grid = Grid::rect(30, 30, 1.0, 1.0).unwrap();
    let flow = zeros(grid.clone(), 2000, &["u", "v"]);
    let forcing = zeros(grid, 2000, &["fx", "fy"]);
    let want1 = [4_144, 740, 2_220, 16_800];
    let want2 = [469_060, 77_844, 235_528, 784_000];
    let mut bad = Vec::new();
    for seed in [0, 1, 7, 12345] {
        let c1 = split_counts(&curr, None, &act, 150, seed);
        let c2 = split_counts(&flow, Some(&forcing), &flow, 1000, seed);
        if c1 != want1 || c2 != want2 {
            bad.push(format!("seed {seed}: {c1:?} {c2:?}"));
        }
    }
    check(
        bad.is_empty(),
        if bad.is_empty() {
            format!("System 1 {want1:?}, System 2 {want2:?} for seeds 0, 1, 7, 12345")
        } else {
            bad.join("; ")
        },
    )
}

// ------------------------------------------------------------- criterion 2

fn criterion_2() -> Outcome {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "system = \"heat1d\"\n\n[heat]\nd_act = 15.0\nd_curr = 1.0\n\n[train]\nepochs = 50\nbatch_size = 64\n",
    );
    let start = Instant::now();
    execute(&cfg, Command::Generate);
    execute(&cfg, Command::Train);
    execute(&cfg, Command::Evaluate);
    let seconds = start.elapsed().as_secs_f64();

    let out = cfg.out_dir();
    let history = read_csv(&out.join("history.csv"));
    let rows = read_csv(&out.join("eval/metrics.csv"));
    let cs: Vec<f64> = read_csv(&out.join("eval/cs_pod.csv"))
        .iter()
        .map(|r| num(r, "cs_pod"))
        .collect();
    let (ret_nn, ret_act) = retained_line(&out.join("eval/pod_eigenvalues.csv"));

    // POD of the whole U_act field as well as the predictable region.
    let act = gapbridge_core::io::load_trajectory(&out.join("u_act.traj")).unwrap();
    let all: Vec<usize> = (0..act.grid().point_count()).collect();
    let full = pod_decompose(&act, &all, 0..act.frame_count(), 0.99).unwrap().retained;

    let mut notes = Vec::new();
    let mut ok = history.len() == 50;
    for split in ["local_test", "future_test"] {
        let (nn, _) = metric(&rows, split, "nn_vs_act");
        let (cu, _) = metric(&rows, split, "curr_vs_act");
        ok &= nn <= cu / 10.0;
        notes.push(format!("{split} nn {nn:.3e} curr {cu:.3e} ({:.0}x)", cu / nn));
    }
    ok &= cs.len() == 2 && cs.iter().all(|&c| c >= 0.99);
    ok &= ret_nn == 2 && ret_act == 2 && full == 2;
    ok &= seconds <= 300.0;
    check(
        ok,
        format!(
            "{}; CS-POD {:?}; modes nn={ret_nn} act={ret_act} act(all frames)={full}; {} epochs; {seconds:.0}s",
            notes.join(", "),
            cs.iter().map(|c| format!("{c:.4}")).collect::<Vec<_>>(),
            history.len()
        ),
    )
}

// ------------------------------------------------------------- criterion 3

fn random_spec(rng: &mut ChaCha8Rng) -> NetworkSpec {
    let acts = [Activation::Relu, Activation::Tanh, Activation::Linear];
    let dense = |rng: &mut ChaCha8Rng| DenseSpec {
        width: rng.gen_range(1..=5),
        activation: acts[rng.gen_range(0..3)],
    };
    let stage1 = (0..rng.gen_range(0..=2)).map(|_| dense(rng)).collect();
    let stage2 = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(1..=5)).collect();
    let mut stage3: Vec<DenseSpec> = (0..rng.gen_range(0..=1)).map(|_| dense(rng)).collect();
    stage3.push(DenseSpec::linear(rng.gen_range(1..=3)));
    NetworkSpec {
        input_features: rng.gen_range(1..=5),
        seq_len: 3,
        stage1,
        stage2,
        stage3,
    }
}

fn gradient_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let spec = random_spec(&mut rng);
    let mut net = Network::init(&spec, seed).unwrap();
    let mut flat = net.flat_params();
    for v in &mut flat {
        *v += rng.gen_range(-0.3..0.3);
    }
    net.set_flat_params(&flat).unwrap();
    let batch = rng.gen_range(1..=4);
    let x = Array2::from_shape_fn((batch * 3, spec.input_features), |_| rng.gen_range(-1.5..1.5));
    let y = Array2::from_shape_fn((batch, spec.outputs()), |_| rng.gen_range(-1.0..1.0));
    let (pred, cache) = net.forward(x.view()).unwrap();
    let grad = net.backward(&cache, &pred, y.view()).flat_params();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..flat.len() {
        let mut p = flat.clone();
        let mut loss = |v: f64| {
            p[i] = v;
            net.set_flat_params(&p).unwrap();
            mse_loss(net.predict(x.view()).unwrap().view(), y.view())
        };
        let fd = (loss(flat[i] + h) - loss(flat[i] - h)) / (2.0 * h);
        worst = worst.max((fd - grad[i]).abs() / fd.abs().max(grad[i].abs()).max(1e-6));
    }
    worst
}

fn criterion_3() -> Outcome {
    let errors: Vec<f64> = (0..25).map(gradient_error).collect();
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    check(worst < 1e-4, format!("25 networks, max relative error {worst:.2e}"))
}

// ------------------------------------------------------------- criterion 4

fn criterion_4() -> Outcome {
    let mut worst_val: f64 = 0.0;
    let mut worst_cos: f64 = 0.0;
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(20, 10, |_, _| rng.gen_range(-1.0..1.0));
        let basis = pod_of_matrix(&x, 1.0).unwrap();
        let eig = SymmetricEigen::new(&x * x.transpose() / 10.0);
        let mut order: Vec<usize> = (0..20).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        for (i, &o) in order.iter().take(basis.retained).enumerate() {
            worst_val = worst_val.max((eig.eigenvalues[o] - basis.eigenvalues[i]).abs());
            let cos = eig.eigenvectors.column(o).dot(&basis.modes.column(i)).abs();
            worst_cos = worst_cos.max((1.0 - cos).abs());
        }
    }
    // Two orthonormal spatial modes with uncorrelated amplitudes.
    let n = 20;
    let v1 = DVector::from_fn(n, |i, _| (2.0 * PI * i as f64 / n as f64).sin()).normalize();
    let v2 = DVector::from_fn(n, |i, _| (2.0 * PI * i as f64 / n as f64).cos()).normalize();
    let x = DMatrix::from_fn(n, 50, |r, c| {
        let t = 2.0 * PI * c as f64 / 50.0;
        3.0 * t.sin() * v1[r] + 0.5 * t.cos() * v2[r]
    });
    let b = pod_of_matrix(&x, 0.99999).unwrap();
    let c1 = b.modes.column(0).dot(&v1).abs();
    let c2 = b.modes.column(1).dot(&v2).abs();
    check(
        worst_val < 1e-8 && worst_cos < 1e-8 && b.retained == 2 && c1 > 1.0 - 1e-8 && c2 > 1.0 - 1e-8,
        format!(
            "snapshots vs covariance: eigenvalue err {worst_val:.1e}, 1-|cos| {worst_cos:.1e}; 2-mode field |cos| {c1:.12}, {c2:.12}"
        ),
    )
}

// ------------------------------------------------------------- criterion 5

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut parseval: f64 = 0.0;
    for n in 1..=64usize {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let fast = dft(&x);
        for (k, c) in fast.iter().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &v) in x.iter().enumerate() {
                let a = -2.0 * PI * ((k * t) % n) as f64 / n as f64;
                re += v * a.cos();
                im += v * a.sin();
            }
            worst = worst.max((c.re - re).abs()).max((c.im - im).abs());
        }
        let e: f64 = x.iter().map(|v| v * v).sum();
        let s: f64 = fast.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
        parseval = parseval.max((e - s).abs() / e);
    }
    let dt = 1.0 / 64.0;
    let sine: Vec<f64> = (0..256).map(|i| (2.0 * PI * 5.0 * i as f64 * dt).sin()).collect();
    let peak = dft_magnitude(&sine, dt).unwrap().dominant_frequency();
    check(
        worst < 1e-9 && parseval < 1e-9 && peak == Some(5.0),
        format!("N=1..64 max |fast-naive| {worst:.1e}; Parseval rel err {parseval:.1e}; 5 Hz sine peak {peak:?}"),
    )
}

// ---------------------------------------------------------- criteria 6, 7

struct FlowRun {
    _tmp: TempDir,
    out: std::path::PathBuf,
}

fn full_scale() -> bool {
    std::env::var("GAPBRIDGE_FULL_SCALE").is_ok_and(|v| v == "1")
}

fn flow_run() -> FlowRun {
    let tmp = TempDir::new().unwrap();
    let body = if full_scale() {
        "system = \"lidcavity2d\"\n\n[cavity]\nframe_count = 2000\n\n[dataset]\ntrain_frames = 1000\n\n\
         [train]\nepochs = 50\n\n[evaluate]\nhorizon = true\nhorizon_interval = 250\n"
    } else {
        "system = \"lidcavity2d\"\n\n[cavity]\nframe_count = 600\n\n[dataset]\ntrain_frames = 400\n\n\
         [train]\nepochs = 20\n\n[evaluate]\nhorizon = true\nhorizon_interval = 50\n"
    };
    let cfg = write_config(tmp.path(), body);
    execute(&cfg, Command::Generate);
    execute(&cfg, Command::Train);
    execute(&cfg, Command::Evaluate);
    FlowRun {
        out: cfg.out_dir(),
        _tmp: tmp,
    }
}

fn criterion_6(run: &FlowRun) -> Outcome {
    let rows = read_csv(&run.out.join("eval/metrics.csv"));
    let (nn, mcs_nn) = metric(&rows, "local_test", "nn_vs_act");
    let (cu, mcs_cu) = metric(&rows, "local_test", "curr_vs_act");
    let (fnn, _) = metric(&rows, "future_test", "nn_vs_act");
    let (fcu, _) = metric(&rows, "future_test", "curr_vs_act");
    let (mcs_nn, mcs_cu) = (mcs_nn.unwrap_or(f64::NAN), mcs_cu.unwrap_or(f64::NAN));
    check(
        cu / nn >= 5.0 && mcs_nn > mcs_cu,
        format!(
            "local-test MSE nn {nn:.3e} curr {cu:.3e} ({:.1}x), MCS nn {mcs_nn:.4} curr {mcs_cu:.4}; future-test {:.2}x",
            cu / nn,
            fcu / fnn
        ),
    )
}

fn criterion_7(run: &FlowRun) -> Outcome {
    let rows = read_csv(&run.out.join("eval/horizon.csv"));
    let curr_at = |start: &str| {
        rows.iter()
            .find(|c| c["pair"] == "curr_vs_act" && c["start_frame"] == start)
            .map_or(f64::NAN, |c| num(c, "mse"))
    };
    let nn: Vec<(String, f64, f64)> = rows
        .iter()
        .filter(|r| r["pair"] == "nn_vs_act")
        .map(|r| {
            let span = format!("{}..{}", r["start_frame"], r["end_frame"]);
            (span, num(r, "mse"), curr_at(&r["start_frame"]))
        })
        .collect();
    let trend = nn
        .iter()
        .map(|(span, m, c)| format!("{span} nn {m:.3e} curr {c:.3e}"))
        .collect::<Vec<_>>()
        .join("; ");
    let ok = nn.len() >= 2 && nn[0].1 < nn[nn.len() - 1].1;
    check(ok, format!("{} intervals: {trend}", nn.len()))
}

// ------------------------------------------------------------- criterion 8

const WAVE_POINTS: usize = 32;

fn wave(freq: f64, phase: f64, frames: usize, dt: f64) -> Trajectory {
    let grid = Grid::line(WAVE_POINTS, 1.0).unwrap();
    let mut values = Vec::with_capacity(frames * WAVE_POINTS);
    for t in 0..frames {
        for p in 0..WAVE_POINTS {
            values.push((2.0 * PI * (freq * t as f64 * dt - grid.coord(p, 0)) + phase).sin());
        }
    }
    Trajectory::new("wave", grid, dt, vec!["u".into()], values).unwrap()
}

fn criterion_8() -> Outcome {
    // Constructed inputs: off-bin frequencies, so the peak lands on the
    // nearest bin and the metric may be off by at most one bin each side.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (n, dt) = (256, 1.0 / 64.0);
    let bin = 1.0 / (n as f64 * dt);
    let mut off_bin = 0;
    for _ in 0..50 {
        let fa = rng.gen_range(3.0..12.0);
        let fb = rng.gen_range(3.0..12.0);
        let d = freq_percent_diff(
            &wave_pair(fa, n, dt),
            &wave_pair(fb, n, dt),
            &[0, 1, 2],
            0..n,
            dt,
            Selector::Component(0),
        )
        .unwrap();
        let within = d
            .peaks
            .iter()
            .all(|&(_, pa, pb)| (pa - fa).abs() <= bin && (pb - fb).abs() <= bin);
        let lo = corners(fa, fb, bin).fold(f64::INFINITY, f64::min);
        let hi = corners(fa, fb, bin).fold(f64::NEG_INFINITY, f64::max);
        if !within || d.mean < lo - 1e-12 || d.mean > hi + 1e-12 {
            off_bin += 1;
        }
    }

    let tmp = TempDir::new().unwrap();
    let (frames, dt) = (202, 0.1);
    save_trajectory(&wave(0.5, 0.0, frames, dt), &tmp.path().join("act.traj")).unwrap();
    save_trajectory(&wave(0.45, 0.3, frames, dt), &tmp.path().join("curr.traj")).unwrap();
    let base = "system = \"external\"\n\n[external]\nact = \"act.traj\"\ncurr = \"curr.traj\"\n\n\
                [dataset]\ntrain_frames = 202\n\n[evaluate]\nfft = true\nfft_selector = \"magnitude\"\n\
                fft_frames = [2, 202]\n";
    let cfg = write_config(tmp.path(), base);
    execute(&cfg, Command::Train);
    execute(&cfg, Command::Fft);
    let nn = fs::read_to_string(cfg.out_dir().join("fft/summary.txt")).unwrap();
    let nn_diff: f64 = summary_value(&nn, "mean_relative_frequency_diff");

    // Same analysis with U_curr in place of the network, for reference.
    let curr = wave(0.45, 0.3, frames, dt);
    let act = wave(0.5, 0.0, frames, dt);
    let pts: Vec<usize> = (1..WAVE_POINTS - 1).collect();
    let curr_diff = freq_percent_diff(&curr, &act, &pts, 2..frames, dt, Selector::Magnitude)
        .unwrap()
        .mean;
    check(
        nn_diff < 0.05 && off_bin == 0,
        format!(
            "surrogate freq diff nn {nn_diff:.4} (curr {curr_diff:.4}); constructed inputs outside +-1 bin: {off_bin}/50"
        ),
    )
}

/// `|fa' - fb'| / fb'` at the corners and centre of the one-bin box.
fn corners(fa: f64, fb: f64, bin: f64) -> impl Iterator<Item = f64> {
    let d = [-bin, 0.0, bin];
    d.into_iter()
        .flat_map(move |x| d.into_iter().map(move |y| ((fa + x) - (fb + y)).abs() / (fb + y)))
        .chain(std::iter::once(if (fa - fb).abs() <= 2.0 * bin { 0.0 } else { f64::NAN }).filter(|v| !v.is_nan()))
}

fn wave_pair(freq: f64, n: usize, dt: f64) -> Trajectory {
    let grid = Grid::line(3, 1.0).unwrap();
    let values = (0..n)
        .flat_map(|t| (0..3).map(move |p| (2.0 * PI * freq * t as f64 * dt + p as f64).sin()))
        .collect();
    Trajectory::new("pair", grid, dt, vec!["u".into()], values).unwrap()
}

fn summary_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("{key} missing from summary"))
}

// ------------------------------------------------------------- criterion 9

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    for _ in 0..100 {
        let points = rng.gen_range(5..=60);
        let length = rng.gen_range(0.5..2.0);
        let diffusivity = rng.gen_range(0.1..20.0);
        let dx: f64 = length / (points - 1) as f64;
        let implicit = rng.gen_bool(0.25);
        let ratio = if implicit {
            rng.gen_range(0.1..5.0)
        } else {
            rng.gen_range(0.05..0.5)
        };
        let substeps = rng.gen_range(1..=3);
        let cfg = HeatConfig {
            diffusivity,
            length,
            points,
            dt: ratio * dx * dx / diffusivity * substeps as f64,
            substeps,
            frame_count: rng.gen_range(10..=80),
            initial: InitialProfile::Values((0..points).map(|_| rng.gen_range(-2.0..2.0)).collect()),
            left: rng.gen_range(-2.0..2.0),
            right: rng.gen_range(-2.0..2.0),
            scheme: if implicit {
                HeatScheme::Implicit
            } else {
                HeatScheme::Explicit
            },
        };
        let traj = solve_heat_1d(&cfg).unwrap();
        for f in 1..traj.frame_count() {
            let prev = traj.frame(f - 1);
            let lo = prev.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = prev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let tol = 1e-12 * hi.abs().max(lo.abs()).max(1.0);
            if traj.frame(f).iter().any(|&v| v < lo - tol || v > hi + tol) {
                violations += 1;
            }
        }
    }

    let smoke = solve_lid_cavity_2d(&CavityConfig {
        frame_count: 51,
        ..CavityConfig::default()
    })
    .unwrap();
    // Independent central-difference divergence over interior nodes.
    let n = 30;
    let h = 1.0 / (n - 1) as f64;
    let mut worst_div: f64 = 0.0;
    for f in 1..smoke.velocity.frame_count() {
        let fr = smoke.velocity.frame(f);
        let u = |i: usize, j: usize| fr[2 * (j * n + i)];
        let v = |i: usize, j: usize| fr[2 * (j * n + i) + 1];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let d = (u(i + 1, j) - u(i - 1, j) + v(i, j + 1) - v(i, j - 1)) / (2.0 * h);
                worst_div = worst_div.max(d.abs());
            }
        }
    }
    let reported = smoke.divergence.iter().cloned().fold(0.0, f64::max);

    let rest = solve_lid_cavity_2d(&CavityConfig {
        frame_count: 50,
        forcing_enabled: false,
        moving_lids_enabled: false,
        ..CavityConfig::default()
    })
    .unwrap();
    let at_rest = rest.velocity.values().iter().all(|&x| x == 0.0);
    check(
        violations == 0 && worst_div <= 1e-5 && reported <= 1e-5 && at_rest,
        format!(
            "heat max-principle violations {violations}/100 configs; cavity max|div| {worst_div:.2e} over {} steps; rest state exact: {at_rest}",
            smoke.divergence.len()
        ),
    )
}

// ------------------------------------------------------------------ main

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(e) => Err(format!(
            "panicked: {}",
            e.downcast_ref::<String>()
                .map(String::as_str)
                .or(e.downcast_ref::<&str>().copied())
                .unwrap_or("?")
        )),
    }
}

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |n: u32| selected.is_empty() || selected.contains(&n);
    let mut failed = 0;
    let mut report = |n: u32, start: Instant, o: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        match o {
            Ok(d) => println!("criterion {n}: PASS ({secs:.1}s) {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {n}: FAIL ({secs:.1}s) {d}")
            }
        }
    };
    let simple: [(u32, fn() -> Outcome); 5] = [
        (1, criterion_1),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (9, criterion_9),
    ];
    for (n, f) in simple {
        if wanted(n) {
            let t = Instant::now();
            report(n, t, guarded(f));
        }
    }
    if wanted(2) {
        let t = Instant::now();
        report(2, t, guarded(criterion_2));
    }
    if wanted(8) {
        let t = Instant::now();
        report(8, t, guarded(criterion_8));
    }
    if wanted(6) || wanted(7) {
        let t = Instant::now();
        match panic::catch_unwind(flow_run) {
            Ok(run) => {
                if wanted(6) {
                    report(6, t, guarded(|| criterion_6(&run)));
                }
                if wanted(7) {
                    report(7, Instant::now(), guarded(|| criterion_7(&run)));
                }
            }
            Err(_) => {
                for n in [6, 7].into_iter().filter(|&n| wanted(n)) {
                    report(n, t, Err("flow pipeline panicked".into()));
                }
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
