//! Single-core throughput of contact estimation and shape solves.

use std::time::Instant;

use crate::equilibrium::{solve_displacement_control, ContactSpec, EquilibriumResult, SolverOptions};
use crate::error::Result;
use crate::model::params::RobotParams;
use crate::model::state::FrictionSigns;
use crate::perception::{estimate_contact, ContactEstimate, EstimatorConfig, ProximalFrame};
use crate::simulator::{synthesize_base_wrench, Simulator};
use crate::units::gf_to_newtons;

pub const ESTIMATE_TARGET_HZ: f64 = 50.0;
pub const SHAPE_TARGET_HZ: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchReport {
    pub frames: usize,
    pub estimate_median_ms: f64,
    pub shape_median_ms: f64,
}

impl BenchReport {
    pub fn estimate_hz(&self) -> f64 {
        1e3 / self.estimate_median_ms
    }

    pub fn shape_hz(&self) -> f64 {
        1e3 / self.shape_median_ms
    }

    pub fn lines(&self) -> Vec<String> {
        let verdict = |hz: f64, target: f64| if hz >= target { "PASS" } else { "FAIL" };
        vec![
            format!(
                "estimate_contact: median {:.3} ms, {:.1} solves/s (target {} solves/s) {}",
                self.estimate_median_ms,
                self.estimate_hz(),
                ESTIMATE_TARGET_HZ,
                verdict(self.estimate_hz(), ESTIMATE_TARGET_HZ)
            ),
            format!(
                "shape: median {:.3} ms, {:.1} solves/s (target {} solves/s) {}",
                self.shape_median_ms,
                self.shape_hz(),
                SHAPE_TARGET_HZ,
                verdict(self.shape_hz(), SHAPE_TARGET_HZ)
            ),
        ]
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Slow pull of cable 1 from 0.5 to 1 mm against a 20 gf lateral load at
/// mid-body. Every solve is warm-started from the previous frame, as in
/// streaming use; grid evaluation runs on the calling thread only.
pub fn run_benchmark(params: &RobotParams, frames: usize) -> Result<BenchReport> {
    params.validate()?;
    let frames = frames.max(1);
    let rest = params.rest_path_length();
    let contact = [ContactSpec::new([gf_to_newtons(20.0), 0.0, 0.0], 0.5 * params.backbone_length())];
    let mut sim = Simulator::with_options(params, SolverOptions::default());
    let set_at = |k: usize| [rest - 0.5 - 0.5 * k as f64 / frames as f64, rest + 3.0];
    for k in 1..=5 {
        sim.step([rest - 0.1 * k as f64, rest + 3.0], &contact)?;
    }
    let mut trace: Vec<ProximalFrame> = Vec::with_capacity(frames);
    for k in 0..frames {
        let r = sim.step(set_at(k), &contact)?;
        trace.push(ProximalFrame {
            timestamp: k as f64,
            wrench: synthesize_base_wrench(&r, &contact, params)?,
            tensions: r.input_tensions,
            set_lengths: set_at(k),
        });
    }
    let config = EstimatorConfig {
        parallel: false,
        ..EstimatorConfig::default()
    };
    let signs = FrictionSigns::uniform(params.joint_count, [params.friction_coeff, 0.0]);
    let mut prior: Option<ContactEstimate> = None;
    let mut times = Vec::with_capacity(frames);
    for f in &trace {
        let t = Instant::now();
        let e = estimate_contact(f, &signs, params, prior.as_ref(), &config)?;
        times.push(t.elapsed().as_secs_f64() * 1e3);
        prior = Some(e);
    }
    let estimate_median_ms = median(times);

    let mut prev: Option<EquilibriumResult> = None;
    let mut times = Vec::with_capacity(frames);
    for f in &trace {
        let t = Instant::now();
        let r = solve_displacement_control(f.set_lengths, &[], &signs, params, prev.as_ref(), &config.shape_solver)?;
        times.push(t.elapsed().as_secs_f64() * 1e3);
        prev = Some(r);
    }
    Ok(BenchReport {
        frames,
        estimate_median_ms,
        shape_median_ms: median(times),
    })
}
