//! Verification reports and seeded region samplers.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;

pub const TAU: f64 = std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub status: Status,
    pub parameters: Map<String, Value>,
    pub samples: u64,
    pub max_residual: f64,
    pub witness: Option<Vec<f64>>,
    pub message: Option<String>,
    pub wall_time_ms: f64,
    pub seed: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Accumulates a check: worst residual, witness, sample count.
pub struct ReportBuilder {
    check: String,
    parameters: Map<String, Value>,
    samples: u64,
    max_residual: f64,
    witness: Option<Vec<f64>>,
    message: Option<String>,
    failed: bool,
    seed: u64,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(check: &str, seed: u64) -> Self {
        ReportBuilder {
            check: check.to_string(),
            parameters: Map::new(),
            samples: 0,
            max_residual: 0.0,
            witness: None,
            message: None,
            failed: false,
            seed,
            started: Instant::now(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    /// Record one residual observation against a tolerance.
    pub fn observe(&mut self, residual: f64, tol: f64, point: &[f64]) {
        self.samples += 1;
        let residual = residual.abs();
        if residual > self.max_residual {
            self.max_residual = residual;
            if residual >= tol {
                self.witness = Some(point.to_vec());
            }
        }
        if residual >= tol {
            self.failed = true;
            if self.witness.is_none() {
                self.witness = Some(point.to_vec());
            }
        }
    }

    /// Record a boolean condition; on failure `point` becomes the witness.
    pub fn require(&mut self, ok: bool, point: &[f64], message: &str) {
        self.samples += 1;
        if !ok && !self.failed {
            self.failed = true;
            self.witness = Some(point.to_vec());
            self.message = Some(message.to_string());
        }
    }

    pub fn fail(&mut self, message: &str, witness: Option<&[f64]>) {
        self.failed = true;
        if self.message.is_none() {
            self.message = Some(message.to_string());
        }
        if self.witness.is_none() {
            self.witness = witness.map(|w| w.to_vec());
        }
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn finish(self) -> Report {
        Report {
            check: self.check,
            status: if self.failed { Status::Fail } else { Status::Pass },
            parameters: self.parameters,
            samples: self.samples,
            max_residual: self.max_residual,
            witness: self.witness,
            message: self.message,
            wall_time_ms: self.started.elapsed().as_secs_f64() * 1e3,
            seed: self.seed,
        }
    }

    pub fn finish_error(self, err: &Error) -> Report {
        Report {
            check: self.check,
            status: Status::Error,
            parameters: self.parameters,
            samples: self.samples,
            max_residual: self.max_residual,
            witness: self.witness,
            message: Some(err.to_string()),
            wall_time_ms: self.started.elapsed().as_secs_f64() * 1e3,
            seed: self.seed,
        }
    }
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A sampleable parameter/point region.
pub trait Region: Send + Sync {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
    fn contains(&self, p: &[f64]) -> bool;
}

/// The cylindrical box around the overtwisted disk: r < pi + delta,
/// |z| < h, with the axis excluded below `r_min` (the polar chart is
/// singular at r = 0).
#[derive(Debug, Clone)]
pub struct BoxRegion {
    pub delta: f64,
    pub h: f64,
    pub r_min: f64,
}

impl BoxRegion {
    pub fn new(delta: f64, h: f64) -> Self {
        BoxRegion { delta, h, r_min: 0.01 }
    }
}

impl Region for BoxRegion {
    fn dim(&self) -> usize {
        3
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let r = rng.gen_range(self.r_min..std::f64::consts::PI + self.delta);
        let th = rng.gen_range(0.0..TAU);
        let z = rng.gen_range(-self.h..self.h);
        vec![r, th, z]
    }
    fn contains(&self, p: &[f64]) -> bool {
        p[0] < std::f64::consts::PI + self.delta && p[2].abs() < self.h
    }
}

/// The radius-c disk bundle over the n-torus: q angles, ||p|| < c.
#[derive(Debug, Clone)]
pub struct CubeBundleRegion {
    pub n: usize,
    pub c: f64,
}

impl Region for CubeBundleRegion {
    fn dim(&self) -> usize {
        2 * self.n
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.n);
        for _ in 0..self.n {
            out.push(rng.gen_range(0.0..TAU));
        }
        // uniform in the n-ball of radius c
        let gauss: Vec<f64> = (0..self.n).map(|_| standard_normal(rng)).collect();
        let norm = gauss.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        let radius = self.c * rng.gen_range(0.0_f64..1.0).powf(1.0 / self.n as f64);
        for gz in gauss {
            out.push(radius * gz / norm);
        }
        out
    }
    fn contains(&self, p: &[f64]) -> bool {
        fiber_norm(p, self.n) < self.c
    }
}

/// Product of two regions with concatenated coordinates.
pub struct ProductRegion<A, B>(pub A, pub B);

impl<A: Region, B: Region> Region for ProductRegion<A, B> {
    fn dim(&self) -> usize {
        self.0.dim() + self.1.dim()
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut p = self.0.sample(rng);
        p.extend(self.1.sample(rng));
        p
    }
    fn contains(&self, p: &[f64]) -> bool {
        let (a, b) = p.split_at(self.0.dim());
        self.0.contains(a) && self.1.contains(b)
    }
}

/// Axis-aligned box given by per-coordinate intervals.
#[derive(Debug, Clone)]
pub struct IntervalRegion {
    pub bounds: Vec<(f64, f64)>,
}

impl Region for IntervalRegion {
    fn dim(&self) -> usize {
        self.bounds.len()
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect()
    }
    fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(&self.bounds).all(|(&x, &(lo, hi))| x >= lo && x <= hi)
    }
}

/// Euclidean norm of the last n entries (cotangent-fiber part).
pub fn fiber_norm(p: &[f64], n: usize) -> f64 {
    p[p.len() - n..].iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..TAU);
    (-2.0 * u1.ln()).sqrt() * u2.cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_reproducible() {
        let region = CubeBundleRegion { n: 3, c: 0.5 };
        let a: Vec<Vec<f64>> = {
            let mut rng = rng_for(7);
            (0..5).map(|_| region.sample(&mut rng)).collect()
        };
        let b: Vec<Vec<f64>> = {
            let mut rng = rng_for(7);
            (0..5).map(|_| region.sample(&mut rng)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn ball_sampling_stays_inside() {
        let region = CubeBundleRegion { n: 2, c: 0.3 };
        let mut rng = rng_for(1);
        for _ in 0..200 {
            let p = region.sample(&mut rng);
            assert!(region.contains(&p));
        }
    }
}
