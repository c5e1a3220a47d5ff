//! Adaptive ODE integration of the squeezing flow, the accumulated
//! conformal exponent G(r,t), and the derived constants r_M and the sharp
//! bound ln(2 r_M sin r_M / pi).

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::contact::{radial_speed, scaling_g, DEFAULT_DELTA};
use crate::dual::Real;
use crate::error::{Error, Result};
use crate::geometry::{ScalarField, VectorField};
use crate::report::{fiber_norm, rng_for, BoxRegion, CubeBundleRegion, Region, Report, ReportBuilder};

/// Step control settings for the embedded 5(4) pair.
#[derive(Clone, Copy, Debug)]
pub struct OdeSolverConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_time: f64,
}

impl Default for OdeSolverConfig {
    fn default() -> Self {
        OdeSolverConfig { rtol: 1e-10, atol: 1e-12, max_step: 0.05, max_time: 200.0 }
    }
}

impl OdeSolverConfig {
    fn validate(&self) -> Result<()> {
        if self.rtol <= 0.0 || self.atol <= 0.0 || self.max_step <= 0.0 || self.max_time <= 0.0 {
            return Err(Error::DomainError {
                context: "OdeSolverConfig".into(),
                message: "tolerances, max step, and max time must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Endpoint and step statistics of one trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct FlowResult {
    pub end: Vec<f64>,
    /// Accumulated companion integral (0 when no companion was supplied).
    pub g_accum: f64,
    pub accepted: u64,
    pub rejected: u64,
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct StepStats {
    accepted: u64,
    rejected: u64,
}

/// Integrate the autonomous system y' = f(y) from 0 to `t_end` (>= 0).
/// `on_step(t, y)` fires at the start point and after every accepted step;
/// returning `false` stops the integration early.
fn dopri5<F, C>(
    f: F,
    y0: &[f64],
    t_end: f64,
    cfg: &OdeSolverConfig,
    mut on_step: C,
) -> Result<(Vec<f64>, f64, StepStats)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
    C: FnMut(f64, &[f64]) -> bool,
{
    cfg.validate()?;
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut t = 0.0_f64;
    let mut stats = StepStats { accepted: 0, rejected: 0 };
    if !on_step(t, &y) || t_end == 0.0 {
        return Ok((y, t, stats));
    }
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    k[0] = f(&y)?;
    let mut h = cfg
        .max_step
        .min(t_end)
        .min(1e-2)
        .max(1e-8);
    loop {
        if t >= t_end {
            break;
        }
        h = h.min(t_end - t).min(cfg.max_step);
        if h < 1e-13 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }
        // stages 2..7 (k[6] is f at the 5th-order solution, FSAL)
        for s in 0..6 {
            let mut ys = y.clone();
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    acc += A[s][j] * kj[i];
                }
                ys[i] += h * acc;
            }
            k[s + 1] = f(&ys)?;
        }
        let mut y5 = y.clone();
        let mut err = 0.0_f64;
        for i in 0..dim {
            let mut acc5 = 0.0;
            let mut acc4 = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc5 += B5[j] * kj[i];
                acc4 += B4[j] * kj[i];
            }
            y5[i] += h * acc5;
            let scale = cfg.atol + cfg.rtol * y[i].abs().max(y5[i].abs());
            let e = h * (acc5 - acc4) / scale;
            err += e * e;
        }
        err = (err / dim as f64).sqrt();
        if err <= 1.0 {
            t += h;
            let k_last = k[6].clone();
            y = y5;
            k[0] = k_last;
            stats.accepted += 1;
            if !on_step(t, &y) {
                break;
            }
        } else {
            stats.rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok((y, t, stats))
}

/// Flow a point of a vector field's chart for time `t_end`, optionally
/// accumulating the integral of `companion` along the trajectory.
pub fn integrate_flow(
    v: &VectorField,
    point: &[f64],
    t_end: f64,
    cfg: &OdeSolverConfig,
    companion: Option<&ScalarField>,
) -> Result<FlowResult> {
    let chart = v.chart().clone();
    let dim = chart.dim();
    if point.len() != dim {
        return Err(Error::ArityMismatch { expected: dim, got: point.len() });
    }
    let mut y0 = point.to_vec();
    if companion.is_some() {
        y0.push(0.0);
    }
    let mut left: Option<f64> = None;
    let rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let mut dy = v.eval(&y[..dim])?;
        if let Some(g) = companion {
            dy.push(g.eval(&y[..dim])?);
        }
        Ok(dy)
    };
    let (end, _, stats) = dopri5(rhs, &y0, t_end, cfg, |t, y| {
        if chart.in_domain(&y[..dim]) {
            true
        } else {
            left = Some(t);
            false
        }
    })?;
    if let Some(t) = left {
        return Err(Error::LeftDomain { t });
    }
    let g_accum = if companion.is_some() { end[dim] } else { 0.0 };
    Ok(FlowResult {
        end: end[..dim].to_vec(),
        g_accum,
        accepted: stats.accepted,
        rejected: stats.rejected,
    })
}

fn radial_rhs(y: &[f64]) -> Result<Vec<f64>> {
    Ok(vec![radial_speed(y[0]), scaling_g(y[0])])
}

/// F(r,t): the radial trajectory through r at time t.
pub fn radial_f(r: f64, t: f64, cfg: &OdeSolverConfig) -> Result<f64> {
    Ok(radial_f_and_g(r, t, cfg)?.0)
}

/// (F(r,t), G(r,t)) via the augmented state.
pub fn radial_f_and_g(r: f64, t: f64, cfg: &OdeSolverConfig) -> Result<(f64, f64)> {
    let (end, _, _) = dopri5(radial_rhs, &[r, 0.0], t, cfg, |_, _| true)?;
    Ok((end[0], end[1]))
}

/// G(r,t) = integral of g(F(r,s)) ds over [0,t].
pub fn g_value(r: f64, t: f64, cfg: &OdeSolverConfig) -> Result<f64> {
    Ok(radial_f_and_g(r, t, cfg)?.1)
}

/// Root of u(r) = r cos r + sin r on (pi/2, pi): bisection to a 1e-3
/// bracket, then Newton until |u| < 1e-12.
pub fn find_r_m() -> Result<f64> {
    let u = |r: f64| r * r.cos() + r.sin();
    let mut lo = PI / 2.0;
    let mut hi = PI;
    if u(lo) <= 0.0 || u(hi) >= 0.0 {
        return Err(Error::BracketFailure { lo, hi });
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if u(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..50 {
        let val = u(r);
        if val.abs() < 1e-12 {
            return Ok(r);
        }
        let du = 2.0 * r.cos() - r * r.sin();
        r -= val / du;
    }
    Err(Error::BracketFailure { lo, hi })
}

fn r_m_cached() -> f64 {
    static CACHE: OnceLock<f64> = OnceLock::new();
    *CACHE.get_or_init(|| find_r_m().expect("r_M bracket"))
}

/// The distinguished constants of the radial model.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Constants {
    #[serde(rename = "r_M")]
    pub r_m: f64,
    pub sharp_bound: f64,
    pub ln76: f64,
    pub g_max: f64,
}

impl Constants {
    pub fn compute() -> Constants {
        let r_m = r_m_cached();
        let sharp_bound = (2.0 * r_m * r_m.sin() / PI).ln();
        let ln76 = (7.0_f64 / 6.0).ln();
        // maximize g on (pi/2, r_M): g' has a single root there
        let dg = |r: f64| scaling_g(r.lift_var()).der;
        let mut lo = PI / 2.0 + 1e-9;
        let mut hi = r_m - 1e-9;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if dg(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let g_max = scaling_g(0.5 * (lo + hi));
        Constants { r_m, sharp_bound, ln76, g_max }
    }
}

/// Closed-form peak value G(r, T_r) = ln(r_M sin r_M / (r sin r)) on
/// (pi/2, r_M].
pub fn g_closed_form(r: f64) -> Result<f64> {
    let r_m = r_m_cached();
    if r <= PI / 2.0 || r > r_m + 1e-12 {
        return Err(Error::DomainError {
            context: "g_closed_form".into(),
            message: format!("r = {r} outside (pi/2, r_M]"),
        });
    }
    Ok((r_m * r_m.sin() / (r * r.sin())).ln())
}

/// The unique T_r with F(r, T_r) = r_M, for r in (pi/2, r_M). Event
/// detection on accepted steps, then secant refinement to 1e-10.
pub fn find_t_r(r: f64, cfg: &OdeSolverConfig) -> Result<f64> {
    let r_m = r_m_cached();
    if r <= PI / 2.0 || r >= r_m {
        return Err(Error::DomainError {
            context: "find_t_r".into(),
            message: format!("r = {r} outside (pi/2, r_M)"),
        });
    }
    let mut bracket: Option<(f64, f64, f64, f64)> = None;
    let mut prev = (0.0, r - r_m);
    dopri5(radial_rhs, &[r, 0.0], cfg.max_time, cfg, |t, y| {
        let v = y[0] - r_m;
        if prev.1 < 0.0 && v >= 0.0 {
            bracket = Some((prev.0, prev.1, t, v));
            return false;
        }
        prev = (t, v);
        true
    })?;
    let (mut t0, mut v0, mut t1, mut v1) =
        bracket.ok_or(Error::BracketFailure { lo: 0.0, hi: cfg.max_time })?;
    let eval = |t: f64| -> Result<f64> { Ok(radial_f(r, t, cfg)? - r_m) };
    for _ in 0..100 {
        if (t1 - t0).abs() < 1e-10 {
            break;
        }
        let mut tn = t1 - v1 * (t1 - t0) / (v1 - v0);
        if !(tn > t0.min(t1) && tn < t0.max(t1)) {
            tn = 0.5 * (t0 + t1);
        }
        let vn = eval(tn)?;
        if v0 < 0.0 && vn >= 0.0 || v0 >= 0.0 && vn < 0.0 {
            t1 = tn;
            v1 = vn;
        } else {
            t0 = tn;
            v0 = vn;
        }
    }
    Ok(0.5 * (t0 + t1))
}

/// One row of the sup-G scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanRow {
    pub r: f64,
    pub max_g: f64,
    pub t_at_max: f64,
}

/// Result of the sup-G scan over the radial grid.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanResult {
    pub max_g: f64,
    pub witness_r: f64,
    pub witness_t: f64,
}

const CYLINDER_CUTOFF: f64 = 1e-8;

/// Track the running max of G along the trajectory through one radius,
/// stopping at the limit-cylinder cutoff or the time cap. The peak is
/// refined by a parabola through the three steps around the discrete max.
pub fn scan_one_radius(r: f64, cfg: &OdeSolverConfig) -> Result<ScanRow> {
    let limit = if r < PI / 2.0 { 0.0 } else { PI };
    let mut history: Vec<(f64, f64)> = Vec::new();
    let mut best = (0.0_f64, 0.0_f64);
    let mut best_idx = 0usize;
    dopri5(radial_rhs, &[r, 0.0], cfg.max_time, cfg, |t, y| {
        history.push((t, y[1]));
        if y[1] > best.1 {
            best = (t, y[1]);
            best_idx = history.len() - 1;
        }
        (y[0] - limit).abs() > CYLINDER_CUTOFF
    })?;
    let (mut t_at_max, mut max_g) = best;
    if best_idx > 0 && best_idx + 1 < history.len() {
        let (t0, g0) = history[best_idx - 1];
        let (t1, g1) = history[best_idx];
        let (t2, g2) = history[best_idx + 1];
        // vertex of the quadratic through the three samples around the peak
        let d1 = (g1 - g0) / (t1 - t0);
        let d2 = (g2 - g1) / (t2 - t1);
        let curv = (d2 - d1) / (0.5 * (t2 - t0));
        if curv < 0.0 {
            let tv = 0.5 * (t0 + t1) - d1 / curv;
            if tv > t0 && tv < t2 {
                let gv = g_value(r, tv, cfg)?;
                if gv > max_g {
                    max_g = gv;
                    t_at_max = tv;
                }
            }
        }
    }
    Ok(ScanRow { r, max_g, t_at_max })
}

/// Scan rows for each radius of a uniform grid on [0, pi + 0.1].
pub fn scan_rows(grid: usize, cfg: &OdeSolverConfig) -> Result<Vec<ScanRow>> {
    if grid < 100 {
        return Err(Error::DomainError {
            context: "scan_rows".into(),
            message: format!("grid {grid} below minimum 100"),
        });
    }
    let hi = PI + DEFAULT_DELTA;
    (0..grid)
        .map(|i| scan_one_radius(i as f64 * hi / (grid - 1) as f64, cfg))
        .collect()
}

/// Global max of G over the radial grid, with its witness (r, t).
pub fn sup_g_scan(grid: usize, cfg: &OdeSolverConfig) -> Result<ScanResult> {
    let rows = scan_rows(grid, cfg)?;
    let best = rows
        .iter()
        .max_by(|a, b| a.max_g.total_cmp(&b.max_g))
        .expect("grid is nonempty");
    Ok(ScanResult { max_g: best.max_g, witness_r: best.r, witness_t: best.t_at_max })
}

/// Total squeeze map with T = ln(h/h'): radial flow on (r, th, z), fiber
/// scaled by e^G. Point layout (r, th, z, q_1..q_n, p_1..p_n).
pub fn squeeze_point(h: f64, h_prime: f64, point: &[f64], cfg: &OdeSolverConfig) -> Result<Vec<f64>> {
    if h_prime <= 0.0 || h_prime > h {
        return Err(Error::DomainError {
            context: "squeeze_point".into(),
            message: format!("need 0 < h' <= h, got h = {h}, h' = {h_prime}"),
        });
    }
    if point.len() < 3 || (point.len() - 3) % 2 != 0 {
        return Err(Error::ArityMismatch { expected: 3, got: point.len() });
    }
    let t = (h / h_prime).ln();
    let (f, g) = radial_f_and_g(point[0], t, cfg)?;
    let n = (point.len() - 3) / 2;
    let mut out = vec![f, point[1], (-t).exp() * point[2]];
    out.extend_from_slice(&point[3..3 + n]);
    let scale = g.exp();
    for j in 0..n {
        out.push(scale * point[3 + n + j]);
    }
    Ok(out)
}

/// Sample B(h) x D_c, squeeze with T = ln(h/h'), and check the image lies
/// in B(h') x D_{< factor * c}. `max_fiber_factor` records the largest
/// observed e^G.
#[allow(clippy::too_many_arguments)]
pub fn verify_squeeze(
    h: f64,
    h_prime: f64,
    c: f64,
    n: usize,
    samples: u64,
    target_factor: f64,
    seed: u64,
    cfg: &OdeSolverConfig,
) -> Report {
    let mut builder = ReportBuilder::new("squeeze_containment", seed)
        .param("h", h)
        .param("h_prime", h_prime)
        .param("c", c)
        .param("n", n)
        .param("samples", samples)
        .param("target_factor", target_factor);
    if h <= 0.0 || h_prime <= 0.0 || h_prime > h || c <= 0.0 {
        return builder.finish_error(&Error::DomainError {
            context: "verify_squeeze".into(),
            message: "need h >= h' > 0 and c > 0".into(),
        });
    }
    let region =
        crate::report::ProductRegion(BoxRegion::new(DEFAULT_DELTA, h), CubeBundleRegion { n, c });
    let mut rng = rng_for(seed);
    let mut max_factor = 0.0_f64;
    for _ in 0..samples {
        let p = region.sample(&mut rng);
        let image = match squeeze_point(h, h_prime, &p, cfg) {
            Ok(im) => im,
            Err(e) => return builder.finish_error(&e),
        };
        let norm_before = fiber_norm(&p, n);
        let norm_after = fiber_norm(&image, n);
        if norm_before > 1e-14 {
            max_factor = max_factor.max(norm_after / norm_before);
        }
        builder.require(image[0] < PI + DEFAULT_DELTA, &p, "image radius escapes the box");
        builder.require(image[2].abs() < h_prime, &p, "image height exceeds h'");
        builder.require(
            norm_after < target_factor * c,
            &p,
            "image fiber norm exceeds the target disk",
        );
    }
    builder = builder.param("max_fiber_factor", max_factor);
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::make_field_x;
    use crate::geometry::Chart;

    fn cfg() -> OdeSolverConfig {
        OdeSolverConfig::default()
    }

    #[test]
    fn linear_decay() {
        let chart = Chart::new("line", &["z"]).unwrap();
        let v = VectorField::new(&chart, vec![ScalarField::parse(&chart, "-z").unwrap()]).unwrap();
        let out = integrate_flow(&v, &[1.0], 1.0, &cfg(), None).unwrap();
        assert!((out.end[0] - (-1.0_f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn pi_is_a_fixed_point_of_x() {
        let x = make_field_x();
        let out = integrate_flow(&x, &[PI, 0.3, 0.2], 7.0, &cfg(), None).unwrap();
        assert!((out.end[0] - PI).abs() < 1e-9);
    }

    #[test]
    fn attractor_at_pi() {
        let out = radial_f(2.0, 20.0, &cfg()).unwrap();
        assert!((out - PI).abs() < 1e-6);
        let out = radial_f(2.5, 30.0, &cfg()).unwrap();
        assert!((out - PI).abs() < 1e-6);
    }

    #[test]
    fn fixed_points_of_radial_flow() {
        for k in 0..=2 {
            let r0 = k as f64 * PI / 2.0;
            for t in [1.0, 10.0, 100.0] {
                let f = radial_f(r0, t, &cfg()).unwrap();
                assert!((f - r0).abs() < 1e-9, "k={k} t={t}: {f}");
            }
        }
    }

    #[test]
    fn monotone_decay_below_pi_half() {
        let mut prev = 1.0;
        for i in 1..=10 {
            let f = radial_f(1.0, i as f64, &cfg()).unwrap();
            assert!(f < prev);
            prev = f;
        }
    }

    #[test]
    fn g_zero_at_t_zero_and_negative_when_trapped() {
        assert_eq!(g_value(1.0, 0.0, &cfg()).unwrap(), 0.0);
        assert!(g_value(1.0, 10.0, &cfg()).unwrap() < 0.0);
    }

    #[test]
    fn g_non_increasing_past_t_r() {
        let t_r = find_t_r(2.0, &cfg()).unwrap();
        let mut prev = g_value(2.0, t_r, &cfg()).unwrap();
        for i in 1..=8 {
            let g = g_value(2.0, t_r + i as f64, &cfg()).unwrap();
            assert!(g <= prev + 1e-12);
            prev = g;
        }
    }

    #[test]
    fn r_m_value_and_residual() {
        let r_m = find_r_m().unwrap();
        assert!((r_m - 2.0288).abs() < 5e-4);
        assert!((r_m - 2.028757838110434).abs() < 1e-12);
        assert!((r_m * r_m.cos() + r_m.sin()).abs() < 1e-12);
        assert!(r_m > PI / 2.0 && r_m < PI);
    }

    #[test]
    fn constants_invariants() {
        let c = Constants::compute();
        assert!((c.sharp_bound - 0.1470921020460094).abs() < 1e-12);
        assert!((c.ln76 - 0.15415067982725836).abs() < 1e-15);
        assert!(0.0 < c.sharp_bound && c.sharp_bound < c.ln76 && c.ln76 < 0.1542);
        assert!((c.g_max - 0.08139507203834329).abs() < 1e-12);
        assert!(c.g_max > 0.0 && c.g_max < 0.1);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let t_r = find_t_r(1.8, &cfg()).unwrap();
        assert!((t_r - 0.6283542067200995).abs() < 1e-8);
        let g = g_value(1.8, t_r, &cfg()).unwrap();
        let closed = g_closed_form(1.8).unwrap();
        assert!((closed - 0.03738856648043359).abs() < 1e-12);
        assert!((g - closed).abs() < 1e-6, "{g} vs {closed}");
    }

    #[test]
    fn closed_form_endpoints() {
        assert!(g_closed_form(r_m_cached()).unwrap().abs() < 1e-12);
        let near_limit = g_closed_form(PI / 2.0 + 1e-9).unwrap();
        let sharp = Constants::compute().sharp_bound;
        assert!((near_limit - sharp).abs() < 1e-6);
        assert!(g_closed_form(1.0).is_err());
    }

    #[test]
    fn scan_respects_the_bound() {
        let scan = sup_g_scan(200, &cfg()).unwrap();
        let c = Constants::compute();
        assert!(scan.max_g < c.ln76 - 5e-3, "{}", scan.max_g);
        assert!(scan.max_g <= c.sharp_bound + 1e-4);
        assert!(scan.witness_r > PI / 2.0 && scan.witness_r < c.r_m);
    }

    #[test]
    fn tolerance_halving_stability() {
        let tight = OdeSolverConfig { rtol: 5e-11, atol: 5e-13, ..cfg() };
        for r in [0.5, 1.3, 2.0, 2.8] {
            let (f1, g1) = radial_f_and_g(r, 3.0, &cfg()).unwrap();
            let (f2, g2) = radial_f_and_g(r, 3.0, &tight).unwrap();
            assert!((f1 - f2).abs() < 1e-8 && (g1 - g2).abs() < 1e-8);
        }
    }

    #[test]
    fn squeeze_point_height_and_shape() {
        let p = [2.0, 0.3, 2.5, 0.1, 0.4];
        let im = squeeze_point(5.0, 1.0, &p, &cfg()).unwrap();
        let t = 5.0_f64.ln();
        assert!((im[2] - (-t).exp() * 2.5).abs() < 1e-9);
        assert_eq!(im[3], 0.1);
        let g = g_value(2.0, t, &cfg()).unwrap();
        assert!((im[4] - g.exp() * 0.4).abs() < 1e-9);
    }

    #[test]
    fn squeeze_identity_time() {
        let report = verify_squeeze(1.0, 1.0, 1.0, 1, 200, 7.0 / 6.0, 7, &cfg());
        assert_eq!(report.status, crate::report::Status::Pass);
    }

    #[test]
    fn squeeze_small_sample_pass() {
        let report = verify_squeeze(5.0, 1.0, 1.0, 1, 500, 7.0 / 6.0, 7, &cfg());
        assert_eq!(report.status, crate::report::Status::Pass, "{:?}", report.message);
    }

    #[test]
    fn squeeze_adversarial_target_fails() {
        let report = verify_squeeze(5.0, 0.05, 1.0, 1, 2000, 1.01, 7, &cfg());
        assert_eq!(report.status, crate::report::Status::Fail);
        assert!(report.witness.is_some());
    }
}
