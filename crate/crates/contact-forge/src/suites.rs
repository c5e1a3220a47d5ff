//! Named verification suites over the model library, plus CSV table
//! emission.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;

use crate::config::ScenarioConfig;
use crate::contact::{
    alpha_ot_plus_lambda, characteristic_foliation_vector, contact_condition_report, make_alpha_ot,
    make_field_x, make_scaling_g, moser_vector, polar3, polar_to_cartesian, reeb_at,
    scaling_g, standard_contact_form, ContactModel, OtFlavor, DEFAULT_DELTA,
};
use crate::embeddings::{
    choose_hbars, deformed_sphere_embedding, min_integer_relation, unknot_embedding, unwrap_map,
    verify_interpolation_family, verify_legendrian, verify_unwrap, BumpFunction, UnwrapParams,
};
use crate::error::{Error, Result};
use crate::flows::{
    find_t_r, g_closed_form, g_value, integrate_flow, radial_f, scan_rows, sup_g_scan, Constants,
    OdeSolverConfig,
};
use crate::geometry::{Chart, KForm, ScalarField, VectorField};
use crate::report::{rng_for, BoxRegion, CubeBundleRegion, ProductRegion, Report, ReportBuilder, Status};

pub const SUITE_NAMES: [&str; 9] = [
    "calculus",
    "conformal",
    "constants",
    "g-bound",
    "g-profile",
    "legendrian",
    "pointwise",
    "squeeze",
    "unwrap",
];

/// Run the selected suites (all when the selection is empty) in sorted
/// name order; reports come back sorted by check name.
pub fn run_suites(cfg: &ScenarioConfig, parallel: bool) -> Result<Vec<Report>> {
    let mut selected: Vec<&str> = if cfg.suites.is_empty() {
        SUITE_NAMES.to_vec()
    } else {
        let mut v = Vec::new();
        for name in &cfg.suites {
            let known = SUITE_NAMES
                .iter()
                .find(|s| **s == name.as_str())
                .ok_or_else(|| Error::ConfigError {
                    line: 0,
                    column: 0,
                    message: format!("unknown suite `{name}`"),
                })?;
            v.push(*known);
        }
        v
    };
    selected.sort_unstable();
    selected.dedup();

    let mut reports: Vec<Report> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = selected
                .iter()
                .map(|&name| scope.spawn(move || run_one_suite(name, cfg)))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("suite thread")).collect()
        })
    } else {
        selected.iter().flat_map(|&name| run_one_suite(name, cfg)).collect()
    };
    reports.sort_by(|a, b| a.check.cmp(&b.check));
    Ok(reports)
}

pub fn exit_code(reports: &[Report]) -> i32 {
    if reports.iter().any(|r| r.status == Status::Error) {
        2
    } else if reports.iter().any(|r| r.status == Status::Fail) {
        1
    } else {
        0
    }
}

fn run_one_suite(name: &str, cfg: &ScenarioConfig) -> Vec<Report> {
    match name {
        "calculus" => suite_calculus(cfg),
        "conformal" => suite_conformal(cfg),
        "constants" => suite_constants(cfg),
        "g-bound" => suite_g_bound(cfg),
        "g-profile" => suite_g_profile(cfg),
        "legendrian" => suite_legendrian(cfg),
        "pointwise" => suite_pointwise(cfg),
        "squeeze" => suite_squeeze(cfg),
        "unwrap" => suite_unwrap(cfg),
        _ => unreachable!("suite names are validated in run_suites"),
    }
}

fn ode() -> OdeSolverConfig {
    OdeSolverConfig::default()
}

// ---------------------------------------------------------------------------
// calculus
// ---------------------------------------------------------------------------

fn calculus_corpus() -> Result<(Chart, Vec<KForm>, Vec<VectorField>)> {
    let chart = polar3();
    let alpha = make_alpha_ot(OtFlavor::Polar);
    let zdr = KForm::one_form(&chart, &["z", "0", "0"])?;
    let mixed = KForm::one_form(&chart, &["sin(th)", "r*z", "exp(z/4)"])?;
    let forms = vec![alpha, zdr, mixed];
    let fields = vec![
        make_field_x(),
        VectorField::parse(&chart, &["z", "1", "-r"])?,
        VectorField::parse(&chart, &["sin(r)", "cos(z)", "r*th"])?,
    ];
    Ok((chart, forms, fields))
}

fn suite_calculus(cfg: &ScenarioConfig) -> Vec<Report> {
    let seed = cfg.seed;
    let region = BoxRegion::new(DEFAULT_DELTA, 1.0);
    let mut out = Vec::new();

    out.push(guarded("calculus_dd_zero", seed, |b| {
        let (_, forms, _) = calculus_corpus()?;
        let mut rng = rng_for(seed);
        for form in &forms {
            let dd = form.exterior_derivative()?.exterior_derivative()?;
            let zero = KForm::zero(dd.chart(), dd.degree())?;
            for _ in 0..50 {
                let p = crate::report::Region::sample(&region, &mut rng);
                b.observe(dd.max_coeff_residual(&zero, &p)?, 1e-10, &p);
            }
        }
        Ok(())
    }));

    out.push(guarded("calculus_naturality", seed, |b| {
        let map = polar_to_cartesian();
        let cart = make_alpha_ot(OtFlavor::Cartesian);
        let lhs = cart.exterior_derivative()?.pullback(&map)?;
        let rhs = cart.pullback(&map)?.exterior_derivative()?;
        let mut rng = rng_for(seed);
        for _ in 0..100 {
            let p = crate::report::Region::sample(&region, &mut rng);
            b.observe(lhs.max_coeff_residual(&rhs, &p)?, 1e-6, &p);
        }
        Ok(())
    }));

    out.push(guarded("calculus_leibniz", seed, |b| {
        let (_, forms, _) = calculus_corpus()?;
        let (a, c) = (&forms[0], &forms[1]);
        let lhs = a.wedge(c)?.exterior_derivative()?;
        let rhs = a
            .exterior_derivative()?
            .wedge(c)?
            .add(&a.wedge(&c.exterior_derivative()?)?.scale(-1.0))?;
        let mut rng = rng_for(seed);
        for _ in 0..100 {
            let p = crate::report::Region::sample(&region, &mut rng);
            b.observe(lhs.max_coeff_residual(&rhs, &p)?, 1e-8, &p);
        }
        Ok(())
    }));

    out.push(guarded("calculus_functoriality", seed, |b| {
        // (m2 . m1)* a = m1* (m2* a)
        let chart = polar3();
        let m1 = crate::geometry::SmoothMap::parse(&chart, &chart, &["r + z/7", "th", "z - r/9"])?;
        let m2 = polar_to_cartesian();
        let composite = m2.after(&m1)?;
        let cart = make_alpha_ot(OtFlavor::Cartesian);
        let one_step = cart.pullback(&composite)?;
        let two_step = cart.pullback(&m2)?.pullback(&m1)?;
        let mut rng = rng_for(seed);
        for _ in 0..100 {
            let p = crate::report::Region::sample(&region, &mut rng);
            b.observe(one_step.max_coeff_residual(&two_step, &p)?, 1e-8, &p);
        }
        Ok(())
    }));

    out.push(guarded("calculus_wedge_antisymmetry", seed, |b| {
        let (_, forms, _) = calculus_corpus()?;
        let (a, c) = (&forms[0], &forms[2]);
        let lhs = a.wedge(c)?;
        let rhs = c.wedge(a)?.scale(-1.0);
        let mut rng = rng_for(seed);
        for _ in 0..100 {
            let p = crate::report::Region::sample(&region, &mut rng);
            b.observe(lhs.max_coeff_residual(&rhs, &p)?, 1e-12, &p);
        }
        Ok(())
    }));

    out.push(guarded("calculus_lie_vs_flow", seed, |b| {
        let (_, forms, fields) = calculus_corpus()?;
        let a = &forms[2];
        let v = &fields[1];
        let lie = a.lie_derivative(v)?;
        let mut rng = rng_for(seed);
        for _ in 0..20 {
            let p = crate::report::Region::sample(&region, &mut rng);
            let w: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let fd = flow_pullback_difference(v, a, &p, &w)?;
            let exact = lie.evaluate(&p, &[&w])?;
            b.observe((fd - exact).abs(), 1e-4, &p);
        }
        Ok(())
    }));

    out
}

/// Central finite difference of (Phi_t^* a)(p)(w) in t at t = 0, with the
/// pushforward approximated by flowing perturbed points.
fn flow_pullback_difference(v: &VectorField, a: &KForm, p: &[f64], w: &[f64]) -> Result<f64> {
    let t = 1e-5;
    let cfg = ode();
    let minus = VectorField::new(
        v.chart(),
        v.components().iter().map(|c| c.neg()).collect(),
    )?;
    let pull = |field: &VectorField| -> Result<f64> {
        let eps = 1e-6;
        let dim = p.len();
        let image = integrate_flow(field, p, t, &cfg, None)?.end;
        let mut pushed = vec![0.0; dim];
        for i in 0..dim {
            let mut fwd = p.to_vec();
            let mut back = p.to_vec();
            fwd[i] += eps;
            back[i] -= eps;
            let f1 = integrate_flow(field, &fwd, t, &cfg, None)?.end;
            let f0 = integrate_flow(field, &back, t, &cfg, None)?.end;
            for (k, slot) in pushed.iter_mut().enumerate() {
                *slot += w[i] * (f1[k] - f0[k]) / (2.0 * eps);
            }
        }
        a.evaluate(&image, &[&pushed])
    };
    Ok((pull(v)? - pull(&minus)?) / (2.0 * t))
}

// ---------------------------------------------------------------------------
// conformal, constants, g-profile, g-bound
// ---------------------------------------------------------------------------

fn suite_conformal(cfg: &ScenarioConfig) -> Vec<Report> {
    let region = BoxRegion::new(DEFAULT_DELTA, 1.0);
    vec![crate::contact::verify_conformal_scaling(
        &make_field_x(),
        &make_alpha_ot(OtFlavor::Polar),
        &make_scaling_g(),
        cfg.samples,
        &region,
        cfg.seed,
    )]
}

fn suite_constants(cfg: &ScenarioConfig) -> Vec<Report> {
    vec![guarded("constants_values", cfg.seed, |b| {
        let c = Constants::compute();
        b.set_param("r_M", c.r_m);
        b.set_param("sharp_bound", c.sharp_bound);
        b.set_param("ln76", c.ln76);
        b.set_param("g_max", c.g_max);
        let u = c.r_m * c.r_m.cos() + c.r_m.sin();
        b.require((c.r_m - 2.0288).abs() < 5e-4, &[c.r_m], "r_M far from 2.0288");
        b.require(u.abs() < 1e-12, &[c.r_m], "r_M root residual too large");
        b.require(c.r_m > PI / 2.0 && c.r_m < PI, &[c.r_m], "r_M outside (pi/2, pi)");
        b.require(c.sharp_bound > 0.0, &[c.sharp_bound], "sharp bound not positive");
        b.require(
            c.sharp_bound < c.ln76 - 5e-3,
            &[c.sharp_bound],
            "sharp bound margin below ln(7/6) too small",
        );
        b.require(c.ln76 < 0.1542, &[c.ln76], "ln(7/6) out of range");
        b.require(c.g_max > 0.0 && c.g_max < 0.1, &[c.g_max], "g_max outside (0, 0.1)");
        Ok(())
    })]
}

fn suite_g_profile(cfg: &ScenarioConfig) -> Vec<Report> {
    vec![guarded("g_profile", cfg.seed, |b| {
        let c = Constants::compute();
        let hi = PI + DEFAULT_DELTA;
        let grid = 10_000usize;
        let dead_band = 1e-9;
        let mut max_g = f64::MIN;
        for i in 0..=grid {
            let r = i as f64 * hi / grid as f64;
            let g = scaling_g(r);
            max_g = max_g.max(g);
            let near_root = (r - PI / 2.0).abs() < 1e-3 || (r - c.r_m).abs() < 1e-3;
            if near_root && g.abs() < dead_band {
                continue;
            }
            let expect_positive = r > PI / 2.0 && r < c.r_m;
            b.require(
                (g > 0.0) == expect_positive,
                &[r, g],
                "g sign pattern violated",
            );
        }
        b.set_param("max_g", max_g);
        b.require(max_g > 0.0 && max_g < 0.1, &[max_g], "max of g outside (0, 0.1)");
        // crossings bracketed to 1e-6
        for root in [PI / 2.0, c.r_m] {
            b.require(
                scaling_g(root - 1e-6) * scaling_g(root + 1e-6) < 0.0,
                &[root],
                "sign change not bracketed at the expected root",
            );
        }
        Ok(())
    })]
}

fn suite_g_bound(cfg: &ScenarioConfig) -> Vec<Report> {
    let mut out = Vec::new();
    out.push(guarded("g_bound_scan", cfg.seed, |b| {
        let c = Constants::compute();
        let scan = sup_g_scan(cfg.grid.max(1000), &ode())?;
        b.set_param("max_G", scan.max_g);
        b.set_param("witness_r", scan.witness_r);
        b.set_param("witness_t", scan.witness_t);
        b.require(scan.max_g < c.ln76 - 5e-3, &[scan.witness_r], "scan max too close to ln(7/6)");
        b.require(
            scan.max_g >= c.sharp_bound - 1e-2,
            &[scan.witness_r],
            "scan max far below the sharp bound",
        );
        b.require(
            scan.max_g <= c.sharp_bound + 1e-4,
            &[scan.witness_r],
            "scan max exceeds the sharp bound",
        );
        b.require(
            scan.witness_r > PI / 2.0 && scan.witness_r < c.r_m,
            &[scan.witness_r],
            "scan witness outside (pi/2, r_M)",
        );
        Ok(())
    }));
    out.push(guarded("g_bound_closed_form", cfg.seed, |b| {
        let c = Constants::compute();
        for i in 1..=50 {
            let r = PI / 2.0 + i as f64 / 51.0 * (c.r_m - PI / 2.0);
            let t_r = find_t_r(r, &ode())?;
            let quad = g_value(r, t_r, &ode())?;
            let closed = g_closed_form(r)?;
            b.observe((quad - closed).abs(), 1e-6, &[r, t_r]);
        }
        Ok(())
    }));
    out
}

// ---------------------------------------------------------------------------
// pointwise solvers
// ---------------------------------------------------------------------------

fn suite_pointwise(cfg: &ScenarioConfig) -> Vec<Report> {
    let seed = cfg.seed;
    let mut out = Vec::new();

    out.push(guarded("pointwise_char_foliation", seed, |b| {
        let chart = Chart::with_domain("disk", &["r", "th"], &[false, true], |p| p[0] > 1e-3)?;
        let beta = KForm::one_form(&chart, &["0", "r*sin(r)"])?;
        let mut dvol = KForm::zero(&chart, 2)?;
        dvol.add_term(&[0, 1], ScalarField::parse(&chart, "r")?)?;
        for i in 1..=100 {
            let r = i as f64 * PI / 100.0;
            let x = characteristic_foliation_vector(&beta, &dvol, &[r, 0.4])?;
            let residual = (x[0] - r.sin()).abs().max(x[1].abs());
            b.observe(residual, 1e-8, &[r]);
        }
        Ok(())
    }));

    out.push(guarded("pointwise_char_foliation_n2", seed, |b| {
        // self-consistency of the defining equation on the 4-chart
        let chart =
            Chart::with_domain("sigma4", &["r", "th", "s1", "t1"], &[false, true, false, false], |p| {
                p[0] > 1e-3
            })?;
        let beta = KForm::one_form(&chart, &["0", "r*sin(r)", "-t1", "0"])?;
        let mut dvol = KForm::zero(&chart, 4)?;
        dvol.add_term(&[0, 1, 2, 3], ScalarField::parse(&chart, "r")?)?;
        let rhs = beta.wedge(&beta.exterior_derivative()?)?;
        let mut rng = rng_for(seed);
        for _ in 0..50 {
            let p = [
                rng.gen_range(0.1..PI),
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let x = characteristic_foliation_vector(&beta, &dvol, &p)?;
            let xf = VectorField::new(
                &chart,
                x.iter().map(|&c| ScalarField::constant(&chart, c)).collect(),
            )?;
            let lhs = dvol.interior_product(&xf)?;
            b.observe(lhs.max_coeff_residual(&rhs, &p)?, 1e-9, &p);
        }
        Ok(())
    }));

    out.push(guarded("pointwise_moser", seed, |b| {
        let alpha0 = standard_contact_form(2)?;
        let mut rng = rng_for(seed);
        for _ in 0..100 {
            let k: f64 = rng.gen_range(-0.5..0.5);
            let alpha1 = alpha0.scale(k.exp());
            let tau: f64 = rng.gen_range(0.0..1.0);
            let p: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = moser_vector(&alpha0, &alpha1, tau, &p)?;
            // recheck both defining equations at the returned vector
            let alpha_tau = alpha0.scale(1.0 - tau).add(&alpha1.scale(tau))?;
            let alpha_dot = alpha1.sub(&alpha0)?;
            let reeb = reeb_at(&alpha_tau, &p)?;
            let f_tau = pairing(&alpha_dot, &p, &reeb)?;
            let mut residual = pairing(&alpha_tau, &p, &x)?.abs();
            let d_tau = alpha_tau.exterior_derivative()?;
            for i in 0..5 {
                let e: Vec<f64> = (0..5).map(|j| if j == i { 1.0 } else { 0.0 }).collect();
                let lhs = d_tau.evaluate(&p, &[&x, &e])?;
                let rhs = f_tau * pairing(&alpha_tau, &p, &e)? - pairing(&alpha_dot, &p, &e)?;
                residual = residual.max((lhs - rhs).abs());
            }
            b.observe(residual, 1e-9, &p);
        }
        Ok(())
    }));

    out.push(guarded("pointwise_reeb", seed, |b| {
        let alpha = alpha_ot_plus_lambda(1)?;
        let region = ProductRegion(BoxRegion::new(DEFAULT_DELTA, 1.0), CubeBundleRegion { n: 1, c: 1.0 });
        let mut rng = rng_for(seed);
        for _ in 0..100 {
            let p = crate::report::Region::sample(&region, &mut rng);
            let r = reeb_at(&alpha, &p)?;
            let mut residual = (pairing(&alpha, &p, &r)? - 1.0).abs();
            let d = alpha.exterior_derivative()?;
            for i in 0..5 {
                let e: Vec<f64> = (0..5).map(|j| if j == i { 1.0 } else { 0.0 }).collect();
                residual = residual.max(d.evaluate(&p, &[&r, &e])?.abs());
            }
            b.observe(residual, 1e-9, &p);
        }
        Ok(())
    }));

    out
}

fn pairing(alpha: &KForm, p: &[f64], v: &[f64]) -> Result<f64> {
    alpha.evaluate(p, &[v])
}

// ---------------------------------------------------------------------------
// squeeze, unwrap, legendrian
// ---------------------------------------------------------------------------

fn suite_squeeze(cfg: &ScenarioConfig) -> Vec<Report> {
    let mut out = Vec::new();
    out.push(crate::flows::verify_squeeze(
        cfg.h,
        cfg.h_prime,
        cfg.c,
        cfg.n,
        cfg.samples,
        cfg.target_factor,
        cfg.seed,
        &ode(),
    ));
    let model = ContactModel::new(make_alpha_ot(OtFlavor::Polar)).expect("polar model");
    out.push(contact_condition_report(
        &model,
        cfg.samples,
        &BoxRegion::new(DEFAULT_DELTA, 1.0),
        cfg.seed,
    ));
    match alpha_ot_plus_lambda(cfg.n).and_then(ContactModel::new) {
        Ok(product) => {
            let region = ProductRegion(
                BoxRegion::new(DEFAULT_DELTA, 1.0),
                CubeBundleRegion { n: cfg.n, c: cfg.c },
            );
            let mut report = contact_condition_report(&product, cfg.samples, &region, cfg.seed);
            report.check = "contact_condition_product".into();
            out.push(report);
        }
        Err(e) => out.push(ReportBuilder::new("contact_condition_product", cfg.seed).finish_error(&e)),
    }
    out
}

fn suite_unwrap(cfg: &ScenarioConfig) -> Vec<Report> {
    let mut out = Vec::new();
    for (check, n) in [("unwrap_one_circle", 1usize), ("unwrap_torus", 3usize)] {
        let report = (|| -> Result<Report> {
            let hbars = choose_hbars(n, cfg.epsilon, cfg.big_c, cfg.delta);
            let params = UnwrapParams::new(n, hbars, cfg.big_c, cfg.epsilon, cfg.delta)?;
            let map = unwrap_map(&params)?;
            let mut report = verify_unwrap(&map, &params, cfg.samples.min(1000), cfg.seed);
            report.check = check.into();
            Ok(report)
        })();
        out.push(report.unwrap_or_else(|e| ReportBuilder::new(check, cfg.seed).finish_error(&e)));
    }
    // the rational-ratio counterexample must fail its injectivity sub-check
    out.push(guarded("unwrap_rational_counterexample", cfg.seed, |b| {
        let h1 = 0.4 * cfg.epsilon / (3.0 * cfg.big_c);
        let params = UnwrapParams::new(2, vec![h1, 2.0 * h1], cfg.big_c, cfg.epsilon, cfg.delta)?;
        let map = unwrap_map(&params)?;
        let inner = verify_unwrap(&map, &params, 50, cfg.seed);
        b.require(
            inner.status == Status::Fail,
            &params.hbars,
            "rational-ratio step sizes were not rejected",
        );
        let (min_rel, _) = min_integer_relation(&params.hbars, (cfg.big_c / PI).ceil() as i64);
        b.set_param("min_integer_relation", min_rel);
        Ok(())
    }));
    out
}

fn suite_legendrian(cfg: &ScenarioConfig) -> Vec<Report> {
    let samples = cfg.samples.min(500);
    let mut out = Vec::new();
    let unknot = (|| -> Result<Report> {
        let emb = unknot_embedding(2)?;
        let mut r = verify_legendrian(&emb, samples, cfg.seed);
        r.check = "legendrian_unknot".into();
        Ok(r)
    })();
    out.push(unwrap_report(unknot, "legendrian_unknot", cfg.seed));
    let deformed = (|| -> Result<Report> {
        let emb = deformed_sphere_embedding(2, BumpFunction::default())?;
        let mut r = verify_legendrian(&emb, samples, cfg.seed);
        r.check = "legendrian_deformed_sphere".into();
        Ok(r)
    })();
    out.push(unwrap_report(deformed, "legendrian_deformed_sphere", cfg.seed));
    out.push(verify_interpolation_family(2, BumpFunction::default(), samples.min(40), cfg.seed));
    out
}

fn unwrap_report(r: Result<Report>, check: &str, seed: u64) -> Report {
    r.unwrap_or_else(|e| ReportBuilder::new(check, seed).finish_error(&e))
}

/// Build a report from a closure, catching evaluation errors as ERROR
/// status instead of panicking.
fn guarded<F>(check: &str, seed: u64, body: F) -> Report
where
    F: FnOnce(&mut ReportBuilder) -> Result<()>,
{
    let mut builder = ReportBuilder::new(check, seed);
    match body(&mut builder) {
        Ok(()) => builder.finish(),
        Err(e) => builder.finish_error(&e),
    }
}

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------

/// Emit one of the scan tables as CSV with a header row and 17 significant
/// digits per value.
pub fn emit_table(kind: &str, points: usize, out: &mut dyn Write) -> Result<()> {
    match kind {
        "g_scan" => {
            writeln!(out, "r,g")?;
            let hi = PI + DEFAULT_DELTA;
            for i in 0..points {
                let r = i as f64 * hi / (points - 1).max(1) as f64;
                writeln!(out, "{},{}", sig17(r), sig17(scaling_g(r)))?;
            }
        }
        "G_scan" => {
            writeln!(out, "r,maxG,t_at_max")?;
            for row in scan_rows(points.max(100), &ode())? {
                writeln!(out, "{},{},{}", sig17(row.r), sig17(row.max_g), sig17(row.t_at_max))?;
            }
        }
        "flow_portrait" => {
            writeln!(out, "r0,t,r")?;
            let dt = 0.1;
            for &r0 in &[0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
                let mut r = r0;
                for k in 0..=points {
                    let t = k as f64 * dt;
                    writeln!(out, "{},{},{}", sig17(r0), sig17(t), sig17(r))?;
                    r = radial_f(r, dt, &ode())?;
                }
            }
        }
        other => return Err(Error::UnknownKind(other.to_string())),
    }
    Ok(())
}

fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_selection_runs_everything() {
        let cfg = ScenarioConfig { samples: 60, grid: 120, ..Default::default() };
        let reports = run_suites(&cfg, false).unwrap();
        assert!(reports.len() >= 15);
        let mut names: Vec<&str> = reports.iter().map(|r| r.check.as_str()).collect();
        let sorted = {
            let mut s = names.clone();
            s.sort_unstable();
            s
        };
        assert_eq!(names, sorted);
        names.dedup();
        assert_eq!(names.len(), reports.len(), "duplicate check names");
        for r in &reports {
            assert_eq!(r.status, Status::Pass, "{}: {:?}", r.check, r.message);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let cfg = ScenarioConfig {
            suites: vec!["constants".into(), "g-profile".into()],
            ..Default::default()
        };
        let seq = run_suites(&cfg, false).unwrap();
        let par = run_suites(&cfg, true).unwrap();
        assert_eq!(seq.len(), par.len());
        for (a, b) in seq.iter().zip(&par) {
            assert_eq!(a.check, b.check);
            assert_eq!(a.status, b.status);
            assert_eq!(a.max_residual, b.max_residual);
        }
    }

    #[test]
    fn unknown_suite_is_config_error() {
        let cfg = ScenarioConfig { suites: vec!["nonsense".into()], ..Default::default() };
        assert!(matches!(run_suites(&cfg, false), Err(Error::ConfigError { .. })));
    }

    #[test]
    fn g_scan_table_crossings() {
        let mut buf = Vec::new();
        emit_table("g_scan", 1000, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<(f64, f64)> = text
            .lines()
            .skip(1)
            .map(|l| {
                let mut it = l.split(',');
                (it.next().unwrap().parse().unwrap(), it.next().unwrap().parse().unwrap())
            })
            .collect();
        let max_g = rows.iter().map(|r| r.1).fold(f64::MIN, f64::max);
        assert!(max_g > 0.0 && max_g < 0.1);
        let mut crossings = Vec::new();
        for w in rows.windows(2) {
            if w[0].1.signum() != w[1].1.signum() {
                crossings.push(0.5 * (w[0].0 + w[1].0));
            }
        }
        assert_eq!(crossings.len(), 2);
        assert!((crossings[0] - PI / 2.0).abs() < 0.01);
        assert!((crossings[1] - 2.0288).abs() < 0.01);
    }

    #[test]
    fn flow_portrait_reaches_attractor() {
        let mut buf = Vec::new();
        emit_table("flow_portrait", 500, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let last_25 = text
            .lines()
            .filter(|l| l.starts_with("2.5"))
            .last()
            .unwrap();
        let r: f64 = last_25.split(',').nth(2).unwrap().parse().unwrap();
        assert!((r - PI).abs() < 1e-4);
    }

    #[test]
    fn unknown_table_kind() {
        let mut buf = Vec::new();
        assert!(matches!(emit_table("portrait", 10, &mut buf), Err(Error::UnknownKind(_))));
    }
}
