//! Library-level walk through the heat experiment: solve both models, build
//! windows, train the default network and compare against U_curr.
//!
//! `cargo run --release -p gapbridge-core --example heat_bridge -- [seed]`

use gapbridge_core::dataset::{normalize, split_dataset, WindowOptions, WindowSet};
use gapbridge_core::metrics::{compare_fields, cs_pod, pod_decompose};
use gapbridge_core::nn::{predict_field, train, Network, NetworkSpec, TrainConfig};
use gapbridge_core::solver::{solve_heat_1d, HeatConfig};

fn main() -> gapbridge_core::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let act = solve_heat_1d(&HeatConfig::default())?;
    let curr = solve_heat_1d(&HeatConfig {
        diffusivity: 1.0,
        ..HeatConfig::default()
    })?;

    let train_frames = 150;
    let opts = WindowOptions {
        k: 3,
        time_range: Some((0.0, act.time(train_frames - 1))),
        mask: None,
    };
    let ws = WindowSet::new(&curr, None, &act, opts)?;
    let bundle = split_dataset(&ws, train_frames, [0.6, 0.1, 0.3], seed)?;
    let (data, stats) = normalize(&ws, &bundle)?;

    let net = Network::init(&NetworkSpec::heat_default(ws.feature_len(), 3), seed)?;
    let cfg = TrainConfig {
        shuffle_seed: seed,
        ..TrainConfig::default()
    };
    let (net, history) = train(&net, &data.train, &data.validation, &cfg)?;
    println!(
        "final train loss {:.3e}, validation {:.3e}",
        history.train_loss.last().unwrap_or(&f64::NAN),
        history.val_loss.last().unwrap_or(&f64::NAN)
    );

    let frames = ws.first_frame()..ws.frame_count();
    let pred = predict_field(&net, &ws, frames.clone(), &stats)?;
    for (name, index) in [("local test", &bundle.local_test), ("future test", &bundle.future_test)] {
        let nn = compare_fields(&pred, &act, index)?.mse;
        let cu = compare_fields(&curr, &act, index)?.mse;
        println!("{name:<12} mse nn {nn:.3e}  curr {cu:.3e}  ({:.0}x)", cu / nn);
    }
    let points = ws.eligible_points();
    let bn = pod_decompose(&pred, points, frames.clone(), 0.99)?;
    let ba = pod_decompose(&act, points, frames, 0.99)?;
    println!(
        "POD modes nn {} act {}, CS-POD {:?}",
        bn.retained,
        ba.retained,
        cs_pod(&bn, &ba)?
    );
    Ok(())
}
