//! The six pipeline commands. Each writes a [`RunRecord`] into the output
//! directory whether it succeeds or fails.

use std::fmt::Write as _;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use gapbridge_core::dataset::{
    load_split, normalize, save_split, split_dataset, NormStats, SplitBundle, WindowIndex, WindowOptions, WindowSet,
};
use gapbridge_core::io::{export_csv, load_trajectory, save_trajectory};
use gapbridge_core::metrics::{
    compare_fields, cs_pod, dft_magnitude, freq_percent_diff, horizon_csv, horizon_evaluation, pod_decompose,
    MetricReport, MetricRow, PodBasis, Selector,
};
use gapbridge_core::nn::{load_checkpoint, predict_field, save_checkpoint, train, Checkpoint, Network, PredictedField};
use gapbridge_core::solver::{forcing_trajectory, solve_heat_1d, solve_lid_cavity_2d};
use gapbridge_core::{Error, FieldView, Trajectory};

use crate::config::{ExperimentConfig, SystemId};
use crate::error::CliError;
use crate::record::RunRecord;

pub const ACT_FILE: &str = "u_act.traj";
pub const CURR_FILE: &str = "u_curr.traj";
pub const AUX_FILE: &str = "aux.traj";
pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const NORM_FILE: &str = "norm_stats.csv";
pub const HISTORY_FILE: &str = "history.csv";
pub const SPLIT_DIR: &str = "split";
pub const SPLITS: [&str; 4] = ["train", "validation", "local_test", "future_test"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Train,
    Evaluate,
    Pod,
    Horizon,
    Fft,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Train => "train",
            Command::Evaluate => "evaluate",
            Command::Pod => "pod",
            Command::Horizon => "horizon",
            Command::Fft => "fft",
        }
    }
}

/// A resolved command line.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub checkpoint: Option<PathBuf>,
}

impl Invocation {
    pub fn new(command: Command, config: ExperimentConfig) -> Self {
        let out = config.out_dir();
        Invocation {
            command,
            config,
            out,
            checkpoint: None,
        }
    }

    fn checkpoint_path(&self) -> PathBuf {
        self.checkpoint
            .clone()
            .unwrap_or_else(|| self.out.join(CHECKPOINT_FILE))
    }
}

/// Runs the command and saves its record; the record is returned even
/// when the command fails.
pub fn run(inv: &Invocation) -> (RunRecord, Result<(), CliError>) {
    let mut rec = RunRecord::new(inv.command.as_str(), &inv.config.hash);
    let outcome = match inv.command {
        Command::Generate => cmd_generate(inv, &mut rec),
        Command::Train => cmd_train(inv, &mut rec),
        Command::Evaluate => cmd_evaluate(inv, &mut rec),
        Command::Pod => cmd_pod(inv, &mut rec),
        Command::Horizon => cmd_horizon(inv, &mut rec),
        Command::Fft => cmd_fft(inv, &mut rec),
    };
    rec.finish(&outcome);
    if let Ok(path) = rec.save(&inv.out) {
        rec.artifacts.push(path);
    }
    (rec, outcome)
}

fn write_text(rec: &mut RunRecord, path: &Path, body: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        let r = fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        });
        rec.stage("write", r)?;
    }
    let r = fs::write(path, body).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    });
    rec.stage("write", r)?;
    rec.artifact(path);
    Ok(())
}

fn store(rec: &mut RunRecord, traj: &Trajectory, path: &Path, csv: bool) -> Result<(), CliError> {
    rec.stage("write", save_trajectory(traj, path))?;
    rec.artifact(path);
    rec.artifact(&path.with_extension("bin"));
    if csv {
        let c = path.with_extension("csv");
        rec.stage("write", export_csv(traj, &c))?;
        rec.artifact(&c);
    }
    Ok(())
}

pub fn cmd_generate(inv: &Invocation, rec: &mut RunRecord) -> Result<(), CliError> {
    let cfg = &inv.config;
    let (act, curr, aux) = match cfg.system {
        SystemId::External => {
            return Err(CliError::Config("generation unsupported; use ingestion".into()));
        }
        SystemId::Heat1d => {
            let act = rec.stage("solve_act", solve_heat_1d(&cfg.heat.solver(cfg.heat.d_act)))?;
            let curr = rec.stage("solve_curr", solve_heat_1d(&cfg.heat.solver(cfg.heat.d_curr)))?;
            (act, curr, None)
        }
        SystemId::Lidcavity2d => {
            let act = rec.stage("solve_act", solve_lid_cavity_2d(&cfg.cavity.solver(true, true)))?;
            let curr = rec.stage(
                "solve_curr",
                solve_lid_cavity_2d(&cfg.cavity.solver(false, cfg.cavity.curr_lids)),
            )?;
            let v = act.velocity;
            let aux = rec.stage("forcing", forcing_trajectory(v.grid(), v.dt(), v.frame_count()))?;
            (v, curr.velocity, Some(aux))
        }
    };
    store(rec, &act, &inv.out.join(ACT_FILE), cfg.csv)?;
    store(rec, &curr, &inv.out.join(CURR_FILE), cfg.csv)?;
    if let Some(a) = aux {
        store(rec, &a, &inv.out.join(AUX_FILE), cfg.csv)?;
    }
    Ok(())
}

/// Paired trajectories plus optional auxiliary channels and mask.
pub struct Data {
    pub act: Trajectory,
    pub curr: Trajectory,
    pub aux: Option<Trajectory>,
    pub mask: Option<Vec<bool>>,
}

fn require(path: PathBuf) -> Result<PathBuf, CliError> {
    if path.exists() {
        Ok(path)
    } else {
        Err(CliError::MissingArtifact(path))
    }
}

fn load_mask(path: &Path) -> gapbridge_core::Result<Vec<bool>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut mask = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Format {
            path: path.to_path_buf(),
            message: format!("line {}: expected `point_index,eligible`", i + 1),
        };
        let (p, e) = line.split_once(',').ok_or_else(bad)?;
        if p.trim().parse::<usize>().ok() != Some(mask.len()) {
            return Err(bad());
        }
        mask.push(match e.trim() {
            "1" | "true" => true,
            "0" | "false" => false,
            _ => return Err(bad()),
        });
    }
    Ok(mask)
}

pub fn load_data(inv: &Invocation, rec: &mut RunRecord) -> Result<Data, CliError> {
    let cfg = &inv.config;
    let (act_p, curr_p, aux_p, mask_p) = match cfg.system {
        SystemId::External => {
            let e = &cfg.external;
            let r = |p: &Option<PathBuf>| p.as_ref().map(|p| cfg.resolve(p));
            (
                r(&e.act).expect("validated"),
                r(&e.curr).expect("validated"),
                r(&e.aux),
                r(&e.mask),
            )
        }
        SystemId::Heat1d => (inv.out.join(ACT_FILE), inv.out.join(CURR_FILE), None, None),
        SystemId::Lidcavity2d => (
            inv.out.join(ACT_FILE),
            inv.out.join(CURR_FILE),
            Some(inv.out.join(AUX_FILE)),
            None,
        ),
    };
    let act = rec.stage("load", load_trajectory(&require(act_p)?))?;
    let curr = rec.stage("load", load_trajectory(&require(curr_p)?))?;
    let aux = match aux_p {
        Some(p) => Some(rec.stage("load", load_trajectory(&require(p)?))?),
        None => None,
    };
    let mask = match mask_p {
        Some(p) => Some(rec.stage("load", load_mask(&require(p)?))?),
        None => None,
    };
    Ok(Data { act, curr, aux, mask })
}

fn windows<'a>(
    cfg: &ExperimentConfig,
    data: &'a Data,
    rec: &mut RunRecord,
) -> Result<(WindowSet<'a>, usize), CliError> {
    let n = data.act.frame_count();
    let k_train = cfg.train_frames(n);
    if k_train == 0 || k_train > n {
        return Err(CliError::Config(format!(
            "dataset.train_frames = {k_train} outside 1..={n}"
        )));
    }
    let opts = WindowOptions {
        k: cfg.k(),
        time_range: Some((0.0, data.act.time(k_train - 1))),
        mask: data.mask.clone(),
    };
    let ws = rec.stage(
        "windows",
        WindowSet::new(&data.curr, data.aux.as_ref(), &data.act, opts),
    )?;
    Ok((ws, k_train))
}

pub fn cmd_train(inv: &Invocation, rec: &mut RunRecord) -> Result<(), CliError> {
    let cfg = &inv.config;
    let data = load_data(inv, rec)?;
    let (ws, k_train) = windows(cfg, &data, rec)?;
    let bundle = rec.stage(
        "split",
        split_dataset(&ws, k_train, cfg.fractions(), cfg.dataset.split_seed),
    )?;
    let split_dir = inv.out.join(SPLIT_DIR);
    rec.stage("write", save_split(&bundle, &split_dir))?;
    rec.artifact(&split_dir.join("split_map.csv"));
    rec.artifact(&split_dir.join("split.txt"));
    let (samples, stats) = rec.stage("normalize", normalize(&ws, &bundle))?;
    let norm_path = inv.out.join(NORM_FILE);
    rec.stage("write", stats.save_csv(&norm_path))?;
    rec.artifact(&norm_path);

    let spec = cfg.network_spec(ws.feature_len(), ws.outputs())?;
    let net = rec.stage("init", Network::init(&spec, cfg.train.init_seed))?;
    let (net, history) = rec.stage(
        "train",
        train(&net, &samples.train, &samples.validation, &cfg.train_config()),
    )?;
    let history_path = inv.out.join(HISTORY_FILE);
    rec.stage("write", history.save_csv(&history_path))?;
    rec.artifact(&history_path);

    let ckpt_path = inv.checkpoint_path();
    let norm_ref = ckpt_path
        .parent()
        .filter(|d| *d == inv.out.as_path())
        .map(|_| NORM_FILE.to_string())
        .unwrap_or_else(|| norm_path.display().to_string());
    let ckpt = Checkpoint {
        network: net,
        init_seed: cfg.train.init_seed,
        shuffle_seed: cfg.train.shuffle_seed,
        norm_stats: Some(norm_ref),
        epochs: history.epochs(),
        final_train_loss: history.train_loss.last().copied().unwrap_or(f64::NAN),
        final_val_loss: history.val_loss.last().copied().unwrap_or(f64::NAN),
    };
    rec.stage("write", save_checkpoint(&ckpt, &ckpt_path))?;
    rec.artifact(&ckpt_path);
    rec.artifact(&ckpt_path.with_extension("bin"));
    Ok(())
}

/// Everything the evaluation-type commands share.
struct Trained {
    checkpoint: Checkpoint,
    norm: NormStats,
    bundle: SplitBundle,
}

fn load_trained(
    inv: &Invocation,
    ws: &WindowSet<'_>,
    k_train: usize,
    rec: &mut RunRecord,
) -> Result<Trained, CliError> {
    let ckpt_path = require(inv.checkpoint_path())?;
    let checkpoint = rec.stage("load_checkpoint", load_checkpoint(&ckpt_path))?;
    let norm_path = checkpoint
        .norm_stats_path(&ckpt_path)
        .unwrap_or_else(|| inv.out.join(NORM_FILE));
    let norm = rec.stage("load_checkpoint", NormStats::load_csv(&require(norm_path)?))?;
    require(inv.out.join(SPLIT_DIR).join("split_map.csv"))?;
    let bundle = rec.stage("load_split", load_split(&inv.out.join(SPLIT_DIR), ws))?;
    if bundle.train_frames != k_train {
        return Err(CliError::Config(format!(
            "saved split covers {} training frames, config implies {k_train}",
            bundle.train_frames
        )));
    }
    Ok(Trained {
        checkpoint,
        norm,
        bundle,
    })
}

/// `U_nn` over every predictable frame (or `U_act` in self-test mode).
enum NnField<'a> {
    Predicted(PredictedField),
    SelfTest(&'a Trajectory),
}

impl NnField<'_> {
    fn view(&self) -> &dyn FieldView {
        match self {
            NnField::Predicted(p) => p,
            NnField::SelfTest(t) => *t,
        }
    }
}

fn nn_field<'a>(
    inv: &Invocation,
    ws: &WindowSet<'_>,
    trained: &Trained,
    data: &'a Data,
    rec: &mut RunRecord,
) -> Result<NnField<'a>, CliError> {
    if inv.config.evaluate.self_test {
        return Ok(NnField::SelfTest(&data.act));
    }
    let frames = ws.first_frame()..ws.frame_count();
    let p = rec.stage(
        "predict",
        predict_field(&trained.checkpoint.network, ws, frames, &trained.norm),
    )?;
    Ok(NnField::Predicted(p))
}

fn predictable(ws: &WindowSet<'_>) -> Range<usize> {
    ws.first_frame()..ws.frame_count()
}

fn split_index<'b>(bundle: &'b SplitBundle, name: &str) -> &'b [WindowIndex] {
    match name {
        "train" => &bundle.train,
        "validation" => &bundle.validation,
        "local_test" => &bundle.local_test,
        _ => &bundle.future_test,
    }
}

fn pod_bases(
    inv: &Invocation,
    ws: &WindowSet<'_>,
    nn: &dyn FieldView,
    act: &dyn FieldView,
    rec: &mut RunRecord,
) -> Result<(PodBasis, PodBasis), CliError> {
    let e = inv.config.evaluate.energy;
    let pts = ws.eligible_points();
    let bn = rec.stage("pod", pod_decompose(nn, pts, predictable(ws), e))?;
    let ba = rec.stage("pod", pod_decompose(act, pts, predictable(ws), e))?;
    Ok((bn, ba))
}

fn fft_selector(raw: &str) -> Result<Selector, CliError> {
    if raw.eq_ignore_ascii_case("magnitude") {
        return Ok(Selector::Magnitude);
    }
    raw.trim().parse().map(Selector::Component).map_err(|_| {
        CliError::Config(format!(
            "evaluate.fft_selector `{raw}` is neither `magnitude` nor a component index"
        ))
    })
}

fn fft_analysis(
    inv: &Invocation,
    ws: &WindowSet<'_>,
    k_train: usize,
    bundle: &SplitBundle,
    nn: &dyn FieldView,
    act: &dyn FieldView,
    rec: &mut RunRecord,
) -> Result<f64, CliError> {
    let ev = &inv.config.evaluate;
    let selector = fft_selector(&ev.fft_selector)?;
    let frames = match ev.fft_frames {
        Some([a, b]) => a..b,
        None => ws.first_frame()..k_train,
    };
    if frames.start < ws.first_frame() || frames.end > ws.frame_count() || frames.len() < 2 {
        return Err(CliError::Config(format!(
            "evaluate.fft_frames {}..{} outside the predictable range {}..{}",
            frames.start,
            frames.end,
            ws.first_frame(),
            ws.frame_count()
        )));
    }
    if !SPLITS.contains(&ev.fft_split.as_str()) {
        return Err(CliError::Config(format!(
            "unknown evaluate.fft_split `{}`",
            ev.fft_split
        )));
    }
    let mut points: Vec<usize> = split_index(bundle, &ev.fft_split).iter().map(|i| i.point).collect();
    points.sort_unstable();
    points.dedup();
    let dt = ws.act().dt();
    let diff = rec.stage("fft", freq_percent_diff(nn, act, &points, frames.clone(), dt, selector))?;

    let mut peaks = String::from("point,f_nn,f_act,relative_diff\n");
    for (p, fa, fb) in &diff.peaks {
        let _ = writeln!(peaks, "{p},{fa},{fb},{}", (fa - fb).abs() / fb);
    }
    let dir = inv.out.join("fft");
    write_text(rec, &dir.join("peaks.csv"), &peaks)?;
    // Spectra at the first analysed point, for plotting.
    if let Some(&(p, _, _)) = diff.peaks.first() {
        let series = |f: &dyn FieldView| -> Vec<f64> {
            frames
                .clone()
                .map(|t| {
                    let v = f.at(t, p).expect("checked by freq_percent_diff");
                    match selector {
                        Selector::Component(c) => v[c],
                        Selector::Magnitude => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
                    }
                })
                .collect()
        };
        let sn = rec.stage("fft", dft_magnitude(&series(nn), dt))?;
        let sa = rec.stage("fft", dft_magnitude(&series(act), dt))?;
        let mut body = String::from("frequency,magnitude_nn,magnitude_act\n");
        for i in 0..sn.frequencies.len() {
            let _ = writeln!(body, "{},{},{}", sn.frequencies[i], sn.magnitudes[i], sa.magnitudes[i]);
        }
        write_text(rec, &dir.join(format!("spectrum_point{p}.csv")), &body)?;
    }
    let summary = format!(
        "selector={}\nframes={}..{}\nsplit={}\npoints_used={}\npoints_skipped={}\nmean_relative_frequency_diff={}\n",
        ev.fft_selector, frames.start, frames.end, ev.fft_split, diff.used, diff.skipped, diff.mean
    );
    write_text(rec, &dir.join("summary.txt"), &summary)?;
    Ok(diff.mean)
}

fn export_prediction(path: &Path, field: &dyn FieldView, rec: &mut RunRecord) -> Result<(), CliError> {
    let grid = field.grid();
    let mut out = String::from("frame,x");
    if grid.dims() == 2 {
        out.push_str(",y");
    }
    for c in 0..field.components() {
        let _ = write!(out, ",c{c}");
    }
    out.push('\n');
    for f in 0..field.frame_count() {
        for p in 0..grid.point_count() {
            if let Some(v) = field.at(f, p) {
                let _ = write!(out, "{f},{}", grid.coord(p, 0));
                if grid.dims() == 2 {
                    let _ = write!(out, ",{}", grid.coord(p, 1));
                }
                for x in v {
                    let _ = write!(out, ",{x}");
                }
                out.push('\n');
            }
        }
    }
    write_text(rec, path, &out)
}

pub fn cmd_evaluate(inv: &Invocation, rec: &mut RunRecord) -> Result<(), CliError> {
    let cfg = &inv.config;
    let data = load_data(inv, rec)?;
    let (ws, k_train) = windows(cfg, &data, rec)?;
    let trained = load_trained(inv, &ws, k_train, rec)?;
    let nn = nn_field(inv, &ws, &trained, &data, rec)?;
    let nn = nn.view();

    let mut report = MetricReport::default();
    for split in SPLITS {
        let index = split_index(&trained.bundle, split);
        if index.is_empty() {
            continue;
        }
        for (pair, field) in [("curr_vs_act", &data.curr as &dyn FieldView), ("nn_vs_act", nn)] {
            let metrics = rec.stage("metrics", compare_fields(field, &data.act, index))?;
            report.rows.push(MetricRow {
                split: split.to_string(),
                pair: pair.to_string(),
                metrics,
            });
        }
    }
    let (bn, ba) = pod_bases(inv, &ws, nn, &data.act, rec)?;
    report.cs_pod = rec.stage("pod", cs_pod(&bn, &ba))?.into_iter().enumerate().collect();
    if cfg.evaluate.horizon && k_train < ws.frame_count() {
        report.horizon = rec.stage(
            "horizon",
            horizon_evaluation(
                nn,
                &data.curr,
                &data.act,
                ws.eligible_points(),
                k_train,
                ws.frame_count(),
                cfg.evaluate.horizon_interval,
            ),
        )?;
    }
    if cfg.evaluate.fft {
        report.frequency_diff = Some(fft_analysis(inv, &ws, k_train, &trained.bundle, nn, &data.act, rec)?);
    }
    let dir = inv.out.join("eval");
    rec.stage("write", report.save(&dir))?;
    for name in ["metrics.csv", "cs_pod.csv", "summary.txt"] {
        rec.artifact(&dir.join(name));
    }
    if !report.horizon.is_empty() {
        rec.artifact(&dir.join("horizon.csv"));
    }
    let mut pod = "mode,eigenvalue_nn,eigenvalue_act\n".to_string();
    for i in 0..bn.eigenvalues.len().min(ba.eigenvalues.len()).min(20) {
        let _ = writeln!(pod, "{},{},{}", i + 1, bn.eigenvalues[i], ba.eigenvalues[i]);
    }
    let _ = writeln!(pod, "# retained nn={} act={}", bn.retained, ba.retained);
    write_text(rec, &dir.join("pod_eigenvalues.csv"), &pod)?;
    if cfg.csv {
        export_prediction(&dir.join("u_nn.csv"), nn, rec)?;
    }
    Ok(())
}

fn modes_csv(basis: &PodBasis, ws: &WindowSet<'_>) -> String {
    let grid = ws.grid();
    let m = ws.outputs();
    let p = basis.points.len();
    let mut out = String::from("point,component,x");
    if grid.dims() == 2 {
        out.push_str(",y");
    }
    for i in 0..basis.retained {
        let _ = write!(out, ",mode{}", i + 1);
    }
    out.push('\n');
    for c in 0..m {
        for (i, &pt) in basis.points.iter().enumerate() {
            let _ = write!(out, "{pt},{c},{}", grid.coord(pt, 0));
            if grid.dims() == 2 {
                let _ = write!(out, ",{}", grid.coord(pt, 1));
            }
            for j in 0..basis.retained {
                let _ = write!(out, ",{}", basis.modes[(c * p + i, j)]);
            }
            out.push('\n');
        }
    }
    out
}

fn eigen_csv(basis: &PodBasis) -> String {
    let total: f64 = basis.eigenvalues.iter().map(|l| l.max(0.0)).sum();
    let mut out = String::from("mode,eigenvalue,cumulative_energy,retained\n");
    let mut acc = 0.0;
    for (i, l) in basis.eigenvalues.iter().enumerate() {
        acc += l.max(0.0);
        let _ = writeln!(out, "{},{l},{},{}", i + 1, acc / total, u8::from(i < basis.retained));
    }
    out
}

/// POD of `U_act`, `U_curr` and (when a checkpoint exists) `U_nn`.
pub fn cmd_pod(inv: &Invocation, rec: &mut RunRecord) -> Result<(), CliError> {
    let cfg = &inv.config;
    let data = load_data(inv, rec)?;
    let (ws, k_train) = windows(cfg, &data, rec)?;
    let e = cfg.evaluate.energy;
    let pts = ws.eligible_points();
    let dir = inv.out.join("pod");
    let ba = rec.stage("pod", pod_decompose(&data.act, pts, predictable(&ws), e))?;
    let bc = rec.stage("pod", pod_decompose(&data.curr, pts, predictable(&ws), e))?;
    let mut cs = String::from("pair,mode,cs_pod\n");
    for (i, v) in rec.stage("pod", cs_pod(&bc, &ba))?.iter().enumerate() {
        let _ = writeln!(cs, "curr_vs_act,{},{v}", i + 1);
    }
    let mut bases = vec![("act", ba.clone()), ("curr", bc)];
    if cfg.evaluate.self_test || inv.checkpoint_path().exists() {
        let trained = load_trained(inv, &ws, k_train, rec)?;
        let nn = nn_field(inv, &ws, &trained, &data, rec)?;
        let bn = rec.stage("pod", pod_decompose(nn.view(), pts, predictable(&ws), e))?;
        for (i, v) in rec.stage("pod", cs_pod(&bn, &ba))?.iter().enumerate() {
            let _ = writeln!(cs, "nn_vs_act,{},{v}", i + 1);
        }
        bases.push(("nn", bn));
    }
    for (name, b) in &bases {
        write_text(rec, &dir.join(format!("eigenvalues_{name}.csv")), &eigen_csv(b))?;
        write_text(rec, &dir.join(format!("modes_{name}.csv")), &modes_csv(b, &ws))?;
    }
    write_text(rec, &dir.join("cs_pod.csv"), &cs)
}

pub fn cmd_horizon(inv: &Invocation, rec: &mut RunRecord) -> Result<(), CliError> {
    let cfg = &inv.config;
    let data = load_data(inv, rec)?;
    let (ws, k_train) = windows(cfg, &data, rec)?;
    if k_train >= ws.frame_count() {
        return Err(CliError::Config("no future frames after the training range".into()));
    }
    let trained = load_trained(inv, &ws, k_train, rec)?;
    let nn = nn_field(inv, &ws, &trained, &data, rec)?;
    let rows = rec.stage(
        "horizon",
        horizon_evaluation(
            nn.view(),
            &data.curr,
            &data.act,
            ws.eligible_points(),
            k_train,
            ws.frame_count(),
            cfg.evaluate.horizon_interval,
        ),
    )?;
    write_text(rec, &inv.out.join("horizon").join("horizon.csv"), &horizon_csv(&rows))
}

pub fn cmd_fft(inv: &Invocation, rec: &mut RunRecord) -> Result<(), CliError> {
    let cfg = &inv.config;
    let data = load_data(inv, rec)?;
    let (ws, k_train) = windows(cfg, &data, rec)?;
    let trained = load_trained(inv, &ws, k_train, rec)?;
    let nn = nn_field(inv, &ws, &trained, &data, rec)?;
    fft_analysis(inv, &ws, k_train, &trained.bundle, nn.view(), &data.act, rec).map(|_| ())
}
