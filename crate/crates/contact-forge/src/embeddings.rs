//! Explicit maps: torus unwrapping, the Legendrian unknot, the deformed
//! sphere, and the auxiliary rescaling maps, together with their pullback,
//! injectivity, and containment checks.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::contact::{
    alpha_ot_plus_lambda, box_bundle, cotangent, darboux_product, darboux_product_form,
    standard_contact, standard_contact_form, ContactModel,
};
use crate::dual::{NativeBody, Real, D1, D2, D3, D4};
use crate::error::{Error, Result};
use crate::geometry::{Chart, KForm, ScalarField, SmoothMap};
use crate::report::{fiber_norm, rng_for, Report, ReportBuilder};

const FIRST_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

// ---------------------------------------------------------------------------
// Unwrap maps
// ---------------------------------------------------------------------------

/// Parameters of the torus unwrap map.
#[derive(Clone, Debug)]
pub struct UnwrapParams {
    pub n: usize,
    pub hbars: Vec<f64>,
    /// Half-width of the s-range being unwrapped.
    pub c_range: f64,
    /// Height bound for the target z-coordinate.
    pub epsilon: f64,
    /// Radius of the target cotangent-fiber disk.
    pub delta: f64,
}

impl UnwrapParams {
    pub fn new(n: usize, hbars: Vec<f64>, c_range: f64, epsilon: f64, delta: f64) -> Result<Self> {
        let params = UnwrapParams { n, hbars, c_range, epsilon, delta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| Error::DomainError { context: "UnwrapParams".into(), message };
        if self.n == 0 || self.hbars.len() != self.n {
            return Err(fail(format!("need n >= 1 and {} step sizes, got {}", self.n, self.hbars.len())));
        }
        if self.c_range <= 0.0 || self.epsilon <= 0.0 || self.delta <= 0.0 {
            return Err(fail("range, epsilon, and delta must be positive".into()));
        }
        if self.hbars.iter().any(|&h| h <= 0.0) {
            return Err(fail("step sizes must be positive".into()));
        }
        let sum: f64 = self.hbars.iter().sum();
        if sum >= self.epsilon / self.c_range {
            return Err(fail(format!(
                "sum of step sizes {sum} must stay below epsilon/C = {}",
                self.epsilon / self.c_range
            )));
        }
        let cap = self.delta / (2.0 * (self.n as f64).sqrt());
        if self.hbars.iter().any(|&h| h >= cap) {
            return Err(fail(format!("each step size must stay below delta/(2 sqrt n) = {cap}")));
        }
        Ok(())
    }
}

/// Step sizes kappa * sqrt(p_j) over the first n primes, with kappa scaled
/// so both invariants hold with a 10% margin.
pub fn choose_hbars(n: usize, epsilon: f64, c_range: f64, delta: f64) -> Vec<f64> {
    let roots: Vec<f64> = FIRST_PRIMES[..n].iter().map(|&p| (p as f64).sqrt()).collect();
    let sum: f64 = roots.iter().sum();
    let max = roots.last().copied().unwrap_or(1.0);
    let kappa_sum = 0.9 * epsilon / (c_range * sum);
    let kappa_each = 0.9 * delta / (2.0 * (n as f64).sqrt() * max);
    let kappa = kappa_sum.min(kappa_each);
    roots.iter().map(|r| kappa * r).collect()
}

/// Source chart (r, th, s_1..s_n, t_1..t_n) of the unwrap map; s real
/// (universal cover).
pub fn unwrap_source_chart(n: usize) -> Result<Chart> {
    let mut names = vec!["r".to_string(), "th".to_string()];
    let mut periodic = vec![false, true];
    for j in 1..=n {
        names.push(format!("s{j}"));
        periodic.push(false);
    }
    for j in 1..=n {
        names.push(format!("t{j}"));
        periodic.push(false);
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Chart::with_periodic(&format!("unwrap_src{n}"), &refs, &periodic)
}

/// (r, th, s, t) -> (r, th, z = sum hbar_j s_j; q_j = s_j, p_j = t_j + hbar_j cos r).
pub fn unwrap_map(params: &UnwrapParams) -> Result<SmoothMap> {
    params.validate()?;
    let n = params.n;
    let source = unwrap_source_chart(n)?;
    let target = box_bundle(n)?;
    let mut comps: Vec<String> = vec!["r".into(), "th".into()];
    let z = params
        .hbars
        .iter()
        .enumerate()
        .map(|(j, h)| format!("{h:?}*s{}", j + 1))
        .collect::<Vec<_>>()
        .join(" + ");
    comps.push(z);
    for j in 1..=n {
        comps.push(format!("s{j}"));
    }
    for (j, h) in params.hbars.iter().enumerate() {
        comps.push(format!("t{} + {h:?}*cos(r)", j + 1));
    }
    let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
    SmoothMap::parse(&source, &target, &refs)
}

/// The pullback target r sin r dth - sum t_j ds_j on the unwrap source chart.
pub fn unwrap_target_form(n: usize) -> Result<KForm> {
    let chart = unwrap_source_chart(n)?;
    let mut form = KForm::zero(&chart, 1)?;
    form.add_term(&[1], ScalarField::parse(&chart, "r*sin(r)")?)?;
    for j in 0..n {
        form.add_term(&[2 + j], ScalarField::parse(&chart, &format!("-t{}", j + 1))?)?;
    }
    Ok(form)
}

fn reduce_angles(chart: &Chart, p: &mut [f64]) {
    for (i, &periodic) in chart.periodic().iter().enumerate() {
        if periodic {
            p[i] = p[i].rem_euclid(TAU);
        }
    }
}

fn angle_distance(chart: &Chart, a: &[f64], b: &[f64]) -> f64 {
    let mut d = 0.0_f64;
    for i in 0..chart.dim() {
        let raw = (a[i] - b[i]).abs();
        let di = if chart.periodic()[i] {
            let m = raw.rem_euclid(TAU);
            m.min(TAU - m)
        } else {
            raw
        };
        d = d.max(di);
    }
    d
}

/// Smallest normalized integer combination |sum m_j hbar_j| / max hbar over
/// nonzero vectors with |m_j| <= k, with its argmin.
pub fn min_integer_relation(hbars: &[f64], k: i64) -> (f64, Vec<i64>) {
    let n = hbars.len();
    let max_h = hbars.iter().cloned().fold(f64::MIN, f64::max);
    let mut best = (f64::INFINITY, vec![0i64; n]);
    let mut m = vec![-k; n];
    loop {
        if m.iter().any(|&v| v != 0) {
            let s: f64 = m.iter().zip(hbars).map(|(&mi, &h)| mi as f64 * h).sum();
            let v = s.abs() / max_h;
            if v < best.0 {
                best = (v, m.clone());
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            if m[i] < k {
                m[i] += 1;
                break;
            }
            m[i] = -k;
            i += 1;
        }
    }
}

/// Three sub-checks: the pullback identity, injectivity (random collisions
/// plus the integer-relation criterion), and image containment.
pub fn verify_unwrap(map: &SmoothMap, params: &UnwrapParams, samples: u64, seed: u64) -> Report {
    let n = params.n;
    let mut builder = ReportBuilder::new("unwrap_identities", seed)
        .param("n", n)
        .param("C", params.c_range)
        .param("epsilon", params.epsilon)
        .param("delta", params.delta)
        .param("samples", samples);
    if let Err(e) = params.validate() {
        return builder.finish_error(&e);
    }

    // (a) pullback identity
    let alpha = match alpha_ot_plus_lambda(n) {
        Ok(a) => a,
        Err(e) => return builder.finish_error(&e),
    };
    let pulled = match alpha.pullback(map) {
        Ok(p) => p,
        Err(e) => return builder.finish_error(&e),
    };
    let target = match unwrap_target_form(n) {
        Ok(t) => t,
        Err(e) => return builder.finish_error(&e),
    };
    let mut rng = rng_for(seed);
    let mut points: Vec<Vec<f64>> = Vec::new();
    for _ in 0..samples {
        let p = sample_unwrap_source(params, &mut rng);
        match pulled.max_coeff_residual(&target, &p) {
            Ok(r) => builder.observe(r, 1e-8, &p),
            Err(e) => return builder.finish_error(&e),
        }
        points.push(p);
    }

    // (b) injectivity: random collision sampling on angle-reduced images
    let source = map.source().clone();
    let target_chart = map.target().clone();
    let mut images: Vec<Vec<f64>> = Vec::new();
    for p in &points {
        let mut im = match map.eval(p) {
            Ok(im) => im,
            Err(e) => return builder.finish_error(&e),
        };
        reduce_angles(&target_chart, &mut im);
        images.push(im);
    }
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            let image_close = angle_distance(&target_chart, &images[i], &images[j]) < 1e-9;
            let source_close = angle_distance(&source, &points[i], &points[j]) < 1e-6;
            builder.require(!image_close || source_close, &points[i], "image collision");
        }
    }
    // and the exact integer-relation criterion for the s-period pattern
    let k = (params.c_range / PI).ceil() as i64;
    builder.set_param("K", k);
    let (min_rel, witness_m) = min_integer_relation(&params.hbars, k);
    builder.set_param("min_integer_relation", min_rel);
    if min_rel <= 1e-12 {
        let witness: Vec<f64> = witness_m.iter().map(|&m| m as f64).collect();
        builder.fail("integer relation among the step sizes", Some(&witness));
    }

    // (c) containment: z within (-epsilon, epsilon), fiber norm below delta
    for (p, im) in points.iter().zip(&images) {
        builder.require(im[2].abs() < params.epsilon, p, "image z escapes the height bound");
        builder.require(fiber_norm(im, n) < params.delta, p, "image fiber norm escapes delta");
    }
    builder.finish()
}

fn sample_unwrap_source(params: &UnwrapParams, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = params.n;
    let mut p = vec![rng.gen_range(0.01..PI), rng.gen_range(0.0..TAU)];
    for _ in 0..n {
        p.push(rng.gen_range(-params.c_range..params.c_range));
    }
    // keep the fiber ball small enough that t + hbar cos r stays inside delta
    let ball = 0.999 * params.delta / 2.0;
    let gauss: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
    let norm = gauss.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    let radius = ball * rng.gen_range(0.0_f64..1.0).powf(1.0 / n as f64);
    for g in gauss {
        p.push(radius * g / norm);
    }
    p
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..TAU);
    (-2.0 * u1.ln()).sqrt() * u2.cos()
}

// ---------------------------------------------------------------------------
// Bump function
// ---------------------------------------------------------------------------

/// C-infinity monotone step: exactly 0 below `lo`, exactly 1 above `hi`,
/// exponential partition of unity in between.
#[derive(Clone, Copy, Debug)]
pub struct BumpFunction {
    pub lo: f64,
    pub hi: f64,
}

impl Default for BumpFunction {
    fn default() -> Self {
        BumpFunction { lo: 0.1, hi: 0.9 }
    }
}

impl BumpFunction {
    pub fn eval_t<T: Real>(&self, t: T) -> T {
        if t.value() <= self.lo {
            return T::from_f64(0.0);
        }
        if t.value() >= self.hi {
            return T::from_f64(1.0);
        }
        let tau = (t - T::from_f64(self.lo)) / T::from_f64(self.hi - self.lo);
        let one = T::from_f64(1.0);
        let psi_a = (-(one / tau)).exp();
        let psi_b = (-(one / (one - tau))).exp();
        psi_a / (psi_a + psi_b)
    }

    /// Closed-form derivative (psi'(tau) = psi(tau)/tau^2).
    pub fn deriv_t<T: Real>(&self, t: T) -> T {
        if t.value() <= self.lo || t.value() >= self.hi {
            return T::from_f64(0.0);
        }
        let w = T::from_f64(self.hi - self.lo);
        let tau = (t - T::from_f64(self.lo)) / w;
        let one = T::from_f64(1.0);
        let taub = one - tau;
        let psi_a = (-(one / tau)).exp();
        let psi_b = (-(one / taub)).exp();
        let dpsi_a = psi_a / (tau * tau);
        let dpsi_b = psi_b / (taub * taub);
        let denom = (psi_a + psi_b) * (psi_a + psi_b);
        (dpsi_a * psi_b + psi_a * dpsi_b) / denom / w
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval_t(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.deriv_t(t)
    }
}

// ---------------------------------------------------------------------------
// Legendrian embeddings
// ---------------------------------------------------------------------------

/// A constrained parametrization into an ambient contact model. The
/// parameter chart carries a scalar constraint whose zero locus is the
/// submanifold; tangent vectors live in the constraint gradient's kernel.
#[derive(Clone, Debug)]
pub struct LegendrianEmbedding {
    pub ambient: ContactModel,
    pub map: SmoothMap,
    pub constraint: ScalarField,
}

impl LegendrianEmbedding {
    /// Orthonormal basis of the constraint kernel at a parameter point.
    pub fn tangent_basis(&self, p: &[f64]) -> Result<Vec<Vec<f64>>> {
        let dim = self.map.source().dim();
        let expected = dim - 1;
        let grad = self.constraint.gradient(p)?;
        let gnorm = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gnorm < 1e-8 {
            return Err(Error::DegenerateParametrization { rank: 0, expected });
        }
        let ghat: Vec<f64> = grad.iter().map(|x| x / gnorm).collect();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for i in 0..dim {
            let mut v: Vec<f64> = (0..dim).map(|j| if j == i { 1.0 } else { 0.0 }).collect();
            let gdot: f64 = v.iter().zip(&ghat).map(|(a, b)| a * b).sum();
            for (vj, gj) in v.iter_mut().zip(&ghat) {
                *vj -= gdot * gj;
            }
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
                for (vj, bj) in v.iter_mut().zip(b) {
                    *vj -= dot * bj;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for vj in v.iter_mut() {
                    *vj /= norm;
                }
                basis.push(v);
                if basis.len() == expected {
                    return Ok(basis);
                }
            }
        }
        Err(Error::DegenerateParametrization { rank: basis.len(), expected })
    }

    /// Random point on the constraint surface: scale a random direction
    /// until the constraint vanishes (the constraint is -1 at the origin
    /// and grows along rays for every surface used here).
    pub fn sample_parameter(&self, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let dim = self.map.source().dim();
        sample_on_constraint(&self.constraint, dim, rng)
    }
}

fn sample_on_constraint(
    constraint: &ScalarField,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let gauss: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
    let norm = gauss.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    let dir: Vec<f64> = gauss.iter().map(|x| x / norm).collect();
    let at = |rho: f64| -> Result<f64> {
        let p: Vec<f64> = dir.iter().map(|d| rho * d).collect();
        constraint.eval(&p)
    };
    let mut lo = 0.0_f64;
    let mut hi = 2.0_f64;
    let (vlo, vhi) = (at(lo)?, at(hi)?);
    if vlo >= 0.0 || vhi <= 0.0 {
        return Err(Error::BracketFailure { lo, hi });
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if at(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = 0.5 * (lo + hi);
    Ok(dir.iter().map(|d| rho * d).collect())
}

/// Parameter chart (x_1..x_n, s) for the round n-sphere in R^(n+1).
pub fn sphere_param_chart(n: usize) -> Result<Chart> {
    let mut names: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    names.push("s".to_string());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Chart::new(&format!("sphere_param{n}"), &refs)
}

/// The Legendrian unknot (x, s) -> (x, -s x, s^3/3) in standard contact
/// R^(2n+1), over the round sphere sum x_j^2 + s^2 = 1.
pub fn unknot_embedding(n: usize) -> Result<LegendrianEmbedding> {
    let param = sphere_param_chart(n)?;
    let ambient_chart = standard_contact(n)?;
    let mut comps: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    for j in 1..=n {
        comps.push(format!("-s*x{j}"));
    }
    comps.push("s^3/3".to_string());
    let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
    let map = SmoothMap::parse(&param, &ambient_chart, &refs)?;
    let constraint_text = (1..=n)
        .map(|j| format!("x{j}^2"))
        .chain(std::iter::once("s^2 - 1".to_string()))
        .collect::<Vec<_>>()
        .join(" + ");
    let constraint = ScalarField::parse(&param, &constraint_text)?;
    let ambient = ContactModel::new(standard_contact_form(n)?)?;
    Ok(LegendrianEmbedding { ambient, map, constraint })
}

/// Deformed-sphere parameter chart (x0, x_1..x_n, s).
pub fn deformed_param_chart(n: usize) -> Result<Chart> {
    let mut names = vec!["x0".to_string()];
    names.extend((1..=n).map(|j| format!("x{j}")));
    names.push("s".to_string());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Chart::new(&format!("deformed_param{n}"), &refs)
}

struct DeformedComponent {
    bump: BumpFunction,
    n: usize,
    /// Target p-index 1..=n.
    j: usize,
}

impl DeformedComponent {
    fn eval<T: Real>(&self, p: &[T]) -> Result<T> {
        let s = p[self.n + 1];
        let xj = p[self.j];
        let mut u = T::from_f64(0.0);
        for i in 1..=self.n {
            u = u + p[i] * p[i];
        }
        let g = self.bump.eval_t(u);
        let gp = self.bump.deriv_t(u);
        Ok(-(s * xj * (g + u * gp)))
    }
}

impl NativeBody for DeformedComponent {
    fn name(&self) -> &str {
        "deformed_sphere_p"
    }
    fn eval_f64(&self, p: &[f64]) -> Result<f64> {
        self.eval(p)
    }
    fn eval_d1(&self, p: &[D1]) -> Result<D1> {
        self.eval(p)
    }
    fn eval_d2(&self, p: &[D2]) -> Result<D2> {
        self.eval(p)
    }
    fn eval_d3(&self, p: &[D3]) -> Result<D3> {
        self.eval(p)
    }
    fn eval_d4(&self, p: &[D4]) -> Result<D4> {
        self.eval(p)
    }
}

struct DeformedConstraint {
    bump: BumpFunction,
    n: usize,
    /// Interpolation weight between the round (0) and deformed (1) sphere.
    tau: f64,
}

impl DeformedConstraint {
    fn eval<T: Real>(&self, p: &[T]) -> Result<T> {
        let x0 = p[0];
        let s = p[self.n + 1];
        let mut u = T::from_f64(0.0);
        for i in 1..=self.n {
            u = u + p[i] * p[i];
        }
        let g = self.bump.eval_t(u);
        let tau = T::from_f64(self.tau);
        let weight = T::from_f64(1.0) - tau + tau * g;
        Ok(x0 * x0 + s * s + u * weight - T::from_f64(1.0))
    }
}

impl NativeBody for DeformedConstraint {
    fn name(&self) -> &str {
        "deformed_sphere_constraint"
    }
    fn eval_f64(&self, p: &[f64]) -> Result<f64> {
        self.eval(p)
    }
    fn eval_d1(&self, p: &[D1]) -> Result<D1> {
        self.eval(p)
    }
    fn eval_d2(&self, p: &[D2]) -> Result<D2> {
        self.eval(p)
    }
    fn eval_d3(&self, p: &[D3]) -> Result<D3> {
        self.eval(p)
    }
    fn eval_d4(&self, p: &[D4]) -> Result<D4> {
        self.eval(p)
    }
}

/// The deformed sphere x0^2 + s^2 + g(x^2) x^2 = 1, embedded by
/// (x0, x, s) -> (x0, -s x0, s^3/3; x, -s x (g(x^2) + x^2 g'(x^2))).
pub fn deformed_sphere_embedding(n: usize, bump: BumpFunction) -> Result<LegendrianEmbedding> {
    let param = deformed_param_chart(n)?;
    let ambient_chart = darboux_product(n)?;
    let mut comps = vec![
        ScalarField::parse(&param, "x0")?,
        ScalarField::parse(&param, "-s*x0")?,
        ScalarField::parse(&param, "s^3/3")?,
    ];
    for j in 1..=n {
        comps.push(ScalarField::parse(&param, &format!("x{j}"))?);
    }
    for j in 1..=n {
        comps.push(ScalarField::native(&param, Arc::new(DeformedComponent { bump, n, j })));
    }
    let map = SmoothMap::new(&param, &ambient_chart, comps)?;
    let constraint =
        ScalarField::native(&param, Arc::new(DeformedConstraint { bump, n, tau: 1.0 }));
    let ambient = ContactModel::new(darboux_product_form(n)?)?;
    Ok(LegendrianEmbedding { ambient, map, constraint })
}

/// PASS iff the ambient contact form kills a full pushed-forward tangent
/// basis at every sampled parameter point.
pub fn verify_legendrian(emb: &LegendrianEmbedding, samples: u64, seed: u64) -> Report {
    let mut builder = ReportBuilder::new("legendrian_residual", seed)
        .param("map_chart", emb.map.source().name())
        .param("samples", samples);
    let mut rng = rng_for(seed);
    for _ in 0..samples {
        let p = match emb.sample_parameter(&mut rng) {
            Ok(p) => p,
            Err(e) => return builder.finish_error(&e),
        };
        match emb.constraint.eval(&p) {
            Ok(c) => {
                if c.abs() > 1e-10 {
                    return builder.finish_error(&Error::DomainError {
                        context: "verify_legendrian".into(),
                        message: format!("sampler left the constraint surface by {c:e}"),
                    });
                }
            }
            Err(e) => return builder.finish_error(&e),
        }
        let basis = match emb.tangent_basis(&p) {
            Ok(b) => b,
            Err(e) => return builder.finish_error(&e),
        };
        let image = match emb.map.eval(&p) {
            Ok(im) => im,
            Err(e) => return builder.finish_error(&e),
        };
        for v in &basis {
            let w = match emb.map.pushforward(&p, v) {
                Ok(w) => w,
                Err(e) => return builder.finish_error(&e),
            };
            match emb.ambient.alpha().evaluate(&image, &[&w]) {
                Ok(val) => builder.observe(val.abs(), 1e-8, &p),
                Err(e) => return builder.finish_error(&e),
            }
        }
    }
    builder.finish()
}

/// Smoothness of the linear interpolation between the round and deformed
/// spheres: the constraint gradient stays away from zero on each slice.
pub fn verify_interpolation_family(n: usize, bump: BumpFunction, samples: u64, seed: u64) -> Report {
    let mut builder = ReportBuilder::new("interpolation_family", seed)
        .param("n", n)
        .param("samples", samples);
    let param = match deformed_param_chart(n) {
        Ok(c) => c,
        Err(e) => return builder.finish_error(&e),
    };
    let mut rng = rng_for(seed);
    for &tau in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        let constraint =
            ScalarField::native(&param, Arc::new(DeformedConstraint { bump, n, tau }));
        for _ in 0..samples {
            let p = match sample_on_constraint(&constraint, n + 2, &mut rng) {
                Ok(p) => p,
                Err(e) => return builder.finish_error(&e),
            };
            let grad = match constraint.gradient(&p) {
                Ok(g) => g,
                Err(e) => return builder.finish_error(&e),
            };
            let gnorm = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
            builder.require(gnorm > 1e-6, &p, "constraint gradient degenerates");
        }
    }
    builder.finish()
}

// ---------------------------------------------------------------------------
// Auxiliary maps
// ---------------------------------------------------------------------------

/// Parameter of a named auxiliary map.
#[derive(Clone, Debug)]
pub enum AuxParam {
    Value(f64),
    Expr(String),
}

/// rescale_st(mu): (s, t) -> (s/mu, mu t); stretch_qp(t): (q, p) ->
/// (e^t q, e^-t p); fiber_rescale(f): (x, y, z; q, p) -> (x, y, z; q, e^f p).
pub fn named_auxiliary_map(kind: &str, n: usize, param: &AuxParam) -> Result<SmoothMap> {
    match (kind, param) {
        ("rescale_st", AuxParam::Value(mu)) => {
            if *mu <= 0.0 {
                return Err(Error::DomainError {
                    context: "rescale_st".into(),
                    message: format!("mu must be positive, got {mu}"),
                });
            }
            let chart = unwrap_source_chart(n)?;
            let inv = 1.0 / mu;
            let mut comps: Vec<String> = vec!["r".into(), "th".into()];
            for j in 1..=n {
                comps.push(format!("{inv:?}*s{j}"));
            }
            for j in 1..=n {
                comps.push(format!("{mu:?}*t{j}"));
            }
            let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
            SmoothMap::parse(&chart, &chart, &refs)
        }
        ("stretch_qp", AuxParam::Value(t)) => {
            let chart = cotangent(n)?;
            let a = t.exp();
            let b = (-t).exp();
            let mut comps: Vec<String> = Vec::new();
            for j in 1..=n {
                comps.push(format!("{a:?}*q{j}"));
            }
            for j in 1..=n {
                comps.push(format!("{b:?}*p{j}"));
            }
            let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
            SmoothMap::parse(&chart, &chart, &refs)
        }
        ("fiber_rescale", AuxParam::Expr(f)) => {
            let chart = darboux_product(n)?;
            let mut comps: Vec<String> = vec!["x".into(), "y".into(), "z".into()];
            for j in 1..=n {
                comps.push(format!("q{j}"));
            }
            for j in 1..=n {
                comps.push(format!("exp({f})*p{j}"));
            }
            let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
            SmoothMap::parse(&chart, &chart, &refs)
        }
        _ => Err(Error::UnknownKind(kind.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::make_lambda_can;
    use crate::report::Status;

    fn params_n1() -> UnwrapParams {
        // textbook n=1 choice: hbar = epsilon/C with margin
        UnwrapParams::new(1, vec![0.009], 10.0, 0.1, 0.5).unwrap()
    }

    #[test]
    fn choose_hbars_margins() {
        let h = choose_hbars(1, 0.1, 10.0, 0.5);
        assert_eq!(h.len(), 1);
        assert!(h[0] < 0.01);
        let h2 = choose_hbars(2, 0.1, 10.0, 0.5);
        assert!((h2[1] / h2[0] - (1.5_f64).sqrt()).abs() < 1e-14);
        let sum: f64 = h2.iter().sum();
        assert!(sum <= 0.9 * 0.1 / 10.0 + 1e-15);
        for n in 1..=3 {
            let h = choose_hbars(n, 0.1, 10.0, 0.5);
            UnwrapParams::new(n, h, 10.0, 0.1, 0.5).unwrap();
        }
    }

    #[test]
    fn unwrap_point_images() {
        let p = params_n1();
        let m = unwrap_map(&p).unwrap();
        let im = m.eval(&[PI, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(im[0], PI);
        assert_eq!(im[2], 0.0);
        assert_eq!(im[3], 0.0);
        assert!((im[4] + p.hbars[0]).abs() < 1e-15); // t + hbar cos(pi)
    }

    #[test]
    fn unwrap_jacobian_rank() {
        let p = UnwrapParams::new(2, choose_hbars(2, 0.1, 10.0, 0.5), 10.0, 0.1, 0.5).unwrap();
        let m = unwrap_map(&p).unwrap();
        let mut rng = rng_for(5);
        for _ in 0..20 {
            let pt = sample_unwrap_source(&p, &mut rng);
            let jac = m.jacobian(&pt).unwrap();
            let rank = jac.svd(false, false).rank(1e-8);
            assert_eq!(rank, 2 * p.n + 2);
        }
    }

    #[test]
    fn verify_unwrap_n1_passes() {
        let p = params_n1();
        let m = unwrap_map(&p).unwrap();
        let report = verify_unwrap(&m, &p, 200, 9);
        assert_eq!(report.status, Status::Pass, "{:?}", report.message);
        assert!(report.max_residual < 1e-8);
    }

    #[test]
    fn rational_ratio_fails_injectivity() {
        let h1 = 0.002;
        let p = UnwrapParams::new(2, vec![h1, 2.0 * h1], 10.0, 0.1, 0.5).unwrap();
        let m = unwrap_map(&p).unwrap();
        let report = verify_unwrap(&m, &p, 50, 9);
        assert_eq!(report.status, Status::Fail);
        let (min_rel, m_wit) = min_integer_relation(&p.hbars, 4);
        assert!(min_rel < 1e-12);
        // witness is a multiple of the (2, -1) pattern
        assert_eq!(m_wit[0], -2 * m_wit[1]);
        assert_ne!(m_wit[1], 0);
    }

    #[test]
    fn sqrt_prime_relation_clears_deadband() {
        for n in 1..=3 {
            let h = choose_hbars(n, 0.1, 10.0, 0.5);
            let (min_rel, _) = min_integer_relation(&h, 20);
            assert!(min_rel > 1e-9, "n={n}: {min_rel}");
        }
    }

    #[test]
    fn bump_clamps_and_monotone() {
        let b = BumpFunction::default();
        assert_eq!(b.value(0.05), 0.0);
        assert_eq!(b.value(0.1), 0.0);
        assert_eq!(b.value(0.9), 1.0);
        assert_eq!(b.value(0.95), 1.0);
        let mut prev = -1.0;
        for i in 0..=100 {
            let v = b.value(i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
        // derivative consistency against the dual tower
        for t in [0.2, 0.5, 0.77] {
            let ad = b.eval_t(t.lift_var()).der;
            assert!((ad - b.derivative(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn unknot_pole_and_equator_images() {
        let e = unknot_embedding(2).unwrap();
        let im = e.map.eval(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(im, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let im = e.map.eval(&[0.0, 0.0, 1.0]).unwrap();
        assert!((im[4] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unknot_is_legendrian() {
        let e = unknot_embedding(2).unwrap();
        let report = verify_legendrian(&e, 100, 13);
        assert_eq!(report.status, Status::Pass, "{:?}", report.message);
        assert!(report.max_residual < 1e-8);
    }

    #[test]
    fn deformed_sphere_is_legendrian() {
        let e = deformed_sphere_embedding(2, BumpFunction::default()).unwrap();
        let report = verify_legendrian(&e, 100, 13);
        assert_eq!(report.status, Status::Pass, "{:?}", report.message);
        assert!(report.max_residual < 1e-8);
    }

    #[test]
    fn deformed_sphere_clamp_regions() {
        let b = BumpFunction::default();
        let e = deformed_sphere_embedding(2, b).unwrap();
        // |x|^2 below the lower clamp: the u-term drops from the constraint
        let p = [0.8, 0.1, 0.2, (1.0_f64 - 0.8 * 0.8).sqrt()];
        assert!(e.constraint.eval(&p).unwrap().abs() < 1e-12);
        let im = e.map.eval(&p).unwrap();
        assert_eq!(im[5], 0.0);
        assert_eq!(im[6], 0.0);
        // |x|^2 above the upper clamp: p_j = -s x_j, the unknot pattern
        let (x1, x2) = (0.7, 0.676);
        let u = x1 * x1 + x2 * x2;
        assert!(u > 0.9);
        let s = (1.0 - u) as f64;
        let s = s.sqrt();
        let p = [0.0, x1, x2, s];
        assert!(e.constraint.eval(&p).unwrap().abs() < 1e-12);
        let im = e.map.eval(&p).unwrap();
        assert!((im[5] + s * x1).abs() < 1e-15);
        assert!((im[6] + s * x2).abs() < 1e-15);
    }

    #[test]
    fn non_legendrian_map_fails() {
        let param = sphere_param_chart(1).unwrap();
        let ambient_chart = Chart::new("amb3", &["x1", "y1", "z"]).unwrap();
        let map = SmoothMap::parse(&param, &ambient_chart, &["x1", "0", "s"]).unwrap();
        let mut alpha = KForm::zero(&ambient_chart, 1).unwrap();
        alpha.add_term(&[0], ScalarField::parse(&ambient_chart, "-y1").unwrap()).unwrap();
        alpha.add_term(&[2], ScalarField::constant(&ambient_chart, 1.0)).unwrap();
        let ambient = ContactModel::new(alpha).unwrap();
        let constraint = ScalarField::parse(&param, "x1^2 + s^2 - 1").unwrap();
        let emb = LegendrianEmbedding { ambient, map, constraint };
        let report = verify_legendrian(&emb, 50, 21);
        assert_eq!(report.status, Status::Fail);
        assert!(report.witness.is_some());
    }

    #[test]
    fn interpolation_family_smooth() {
        let report = verify_interpolation_family(2, BumpFunction::default(), 40, 17);
        assert_eq!(report.status, Status::Pass, "{:?}", report.message);
    }

    #[test]
    fn rescale_st_preserves_t_ds() {
        let n = 2;
        let m = named_auxiliary_map("rescale_st", n, &AuxParam::Value(2.5)).unwrap();
        let chart = unwrap_source_chart(n).unwrap();
        let mut form = KForm::zero(&chart, 1).unwrap();
        for j in 0..n {
            form.add_term(&[2 + j], ScalarField::parse(&chart, &format!("-t{}", j + 1)).unwrap())
                .unwrap();
        }
        let pulled = form.pullback(&m).unwrap();
        let mut rng = rng_for(2);
        for _ in 0..50 {
            let p: Vec<f64> = (0..chart.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            assert!(pulled.max_coeff_residual(&form, &p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn stretch_qp_preserves_lambda() {
        let n = 2;
        let m = named_auxiliary_map("stretch_qp", n, &AuxParam::Value(0.7)).unwrap();
        let lambda = make_lambda_can(n).unwrap();
        let pulled = lambda.pullback(&m).unwrap();
        let mut rng = rng_for(2);
        for _ in 0..50 {
            let p: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            assert!(pulled.max_coeff_residual(&lambda, &p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn fiber_rescale_conformal_identity() {
        let n = 1;
        let f = "0.3*sin(x)*cos(z)";
        let m = named_auxiliary_map("fiber_rescale", n, &AuxParam::Expr(f.into())).unwrap();
        let chart = darboux_product(n).unwrap();
        // e^f (dz - y dx) + lambda_can pulls back to e^f (dz - y dx - p dq)
        let ef = ScalarField::parse(&chart, &format!("exp({f})")).unwrap();
        let mut dzydx = KForm::zero(&chart, 1).unwrap();
        dzydx.add_term(&[0], ScalarField::parse(&chart, "-y").unwrap()).unwrap();
        dzydx.add_term(&[2], ScalarField::constant(&chart, 1.0)).unwrap();
        let mut lam = KForm::zero(&chart, 1).unwrap();
        lam.add_term(&[3], ScalarField::parse(&chart, "-p1").unwrap()).unwrap();
        let source_form = dzydx.scale_field(&ef).add(&lam).unwrap();
        let pulled = source_form.pullback(&m).unwrap();
        let expected = darboux_product_form(n).unwrap().scale_field(&ef);
        let mut rng = rng_for(6);
        for _ in 0..200 {
            let p: Vec<f64> = (0..chart.dim()).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let r = pulled.max_coeff_residual(&expected, &p).unwrap();
            assert!(r < 1e-8, "residual {r} at {p:?}");
        }
    }

    #[test]
    fn unknown_kind_rejected() {
        assert!(matches!(
            named_auxiliary_map("twist", 1, &AuxParam::Value(1.0)),
            Err(Error::UnknownKind(_))
        ));
    }

    #[test]
    fn rescale_then_unwrap_functorial() {
        let p = params_n1();
        let unwrap = unwrap_map(&p).unwrap();
        let rescale = named_auxiliary_map("rescale_st", 1, &AuxParam::Value(1.7)).unwrap();
        let composite = unwrap.after(&rescale).unwrap();
        let alpha = alpha_ot_plus_lambda(1).unwrap();
        let two_step = alpha.pullback(&unwrap).unwrap().pullback(&rescale).unwrap();
        let one_step = alpha.pullback(&composite).unwrap();
        let mut rng = rng_for(4);
        for _ in 0..50 {
            let pt = sample_unwrap_source(&p, &mut rng);
            assert!(two_step.max_coeff_residual(&one_step, &pt).unwrap() < 1e-8);
        }
    }
}
