//! Monte Carlo check of the terminal Lévy-area statistics.
//!
//! For two independent standard Wiener processes on `[0, T]`, the Itô area
//! `S = (1/2) int (W_1 dW_2 - W_2 dW_1)` has mean zero and variance `T^2 / 4`:
//! each left-point summand contributes `(Var[W_1(t)] + Var[W_2(t)]) dt / 4 =
//! t dt / 2`, and integrating gives `T^2 / 4`. The discrete sum carries a
//! `(1 - 1/steps)` factor, far inside the tolerance here.

use qrev_core::record::MeasurementRecord;
use qrev_core::{NoiseStream, StreamId};

#[test]
fn terminal_levy_area_statistics() {
    let t_total = 1.0;
    let steps = 200;
    let dt = t_total / steps as f64;
    let n = 20_000u64;
    let mut sum = [0.0f64; 3];
    let mut sum_sq = [0.0f64; 3];
    for traj in 0..n {
        let mut streams: Vec<NoiseStream> = (0..3)
            .map(|c| NoiseStream::new(77, StreamId { trajectory: traj, channel: c }))
            .collect();
        let mut rec = MeasurementRecord::with_levy_areas(dt).unwrap();
        for _ in 0..steps {
            let dw = [
                streams[0].wiener_increment(dt),
                streams[1].wiener_increment(dt),
                streams[2].wiener_increment(dt),
            ];
            rec.push(&dw).unwrap();
        }
        let a = rec.levy_areas().unwrap();
        for (k, v) in [a.s12, a.s23, a.s31].into_iter().enumerate() {
            sum[k] += v;
            sum_sq[k] += v * v;
        }
    }
    let expect = t_total * t_total / 4.0;
    for k in 0..3 {
        let mean = sum[k] / n as f64;
        let var = sum_sq[k] / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "area {k}: mean {mean}");
        // Monte Carlo standard error of the variance estimate is about
        // T^2 / (2 sqrt(n)) ~ 0.0035; the tolerance is ~4 sigma and cleanly
        // separates T^2/4 from T^2/2.
        assert!((var - expect).abs() < 0.015, "area {k}: var {var}");
    }
}
