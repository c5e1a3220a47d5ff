//! Model contact forms, regions, and the pointwise solvers (Reeb vector,
//! Moser vector, characteristic foliation), plus the squeezing vector field
//! and its conformal scaling factor.

use nalgebra::{DMatrix, DVector};

use crate::dual::Real;
use crate::error::{Error, Result};
use crate::geometry::{Chart, KForm, ScalarField, SmoothMap, VectorField};
use crate::native_body;
use crate::report::{Region, ReportBuilder, Report};

/// Default radial margin of the box B(h): r < pi + delta.
pub const DEFAULT_DELTA: f64 = 0.1;
/// Radius below which polar-chart sweeps are excluded (the chart, not the
/// form, is singular at the axis).
pub const AXIS_EXCLUSION: f64 = 0.01;

const LSQ_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Charts
// ---------------------------------------------------------------------------

/// Cylindrical coordinates (r, th, z) with the axis excluded.
pub fn polar3() -> Chart {
    Chart::with_domain("polar3", &["r", "th", "z"], &[false, true, false], |p| p[0] > 1e-3)
        .unwrap()
}

/// Cartesian 3-chart covering the axis.
pub fn cartesian3() -> Chart {
    Chart::new("cart3", &["x", "y", "z"]).unwrap()
}

/// Cotangent chart of the n-torus: (q_1..q_n, p_1..p_n), q angles.
pub fn cotangent(n: usize) -> Result<Chart> {
    let mut names = Vec::new();
    for j in 1..=n {
        names.push(format!("q{j}"));
    }
    for j in 1..=n {
        names.push(format!("p{j}"));
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut periodic = vec![true; n];
    periodic.extend(vec![false; n]);
    Chart::with_periodic(&format!("cotangent{n}"), &refs, &periodic)
}

/// Product chart (r, th, z; q_1..q_n, p_1..p_n) for B(h) x D(T*T^n).
pub fn box_bundle(n: usize) -> Result<Chart> {
    let mut names = vec!["r".to_string(), "th".to_string(), "z".to_string()];
    let mut periodic = vec![false, true, false];
    for j in 1..=n {
        names.push(format!("q{j}"));
        periodic.push(true);
    }
    for j in 1..=n {
        names.push(format!("p{j}"));
        periodic.push(false);
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Chart::with_periodic(&format!("box_bundle{n}"), &refs, &periodic)
}

/// Standard contact chart (x_1..x_n, y_1..y_n, z) with dz - sum y_j dx_j.
pub fn standard_contact(n: usize) -> Result<Chart> {
    let mut names = Vec::new();
    for j in 1..=n {
        names.push(format!("x{j}"));
    }
    for j in 1..=n {
        names.push(format!("y{j}"));
    }
    names.push("z".to_string());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Chart::new(&format!("std{}", 2 * n + 1), &refs)
}

/// Chart (x, y, z; q_1..q_n, p_1..p_n) for the product Darboux model
/// dz - y dx - sum p_j dq_j.
pub fn darboux_product(n: usize) -> Result<Chart> {
    let mut names = vec!["x".to_string(), "y".to_string(), "z".to_string()];
    for j in 1..=n {
        names.push(format!("q{j}"));
    }
    for j in 1..=n {
        names.push(format!("p{j}"));
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Chart::new(&format!("darboux_prod{n}"), &refs)
}

// ---------------------------------------------------------------------------
// Radial coefficient functions (shared with the flows module)
// ---------------------------------------------------------------------------

/// Radial component of the squeezing field:
/// f(r) = -r cos r sin r / (r + cos r sin r), with a series fallback near 0.
pub fn radial_speed<T: Real>(r: T) -> T {
    if r.value().abs() < 1e-4 {
        // -r/2 (1 - r^2/3)
        let half = T::from_f64(0.5);
        let third = T::from_f64(1.0 / 3.0);
        -(r * half * (T::from_f64(1.0) - r * r * third))
    } else {
        let cs = r.cos() * r.sin();
        -(r * cs) / (r + cs)
    }
}

/// Conformal scaling factor g(r) = -cos r (r cos r + sin r)/(r + cos r sin r),
/// with a series fallback near 0.
pub fn scaling_g<T: Real>(r: T) -> T {
    if r.value().abs() < 1e-4 {
        // -(1 - r^2/2)
        -(T::from_f64(1.0) - r * r * T::from_f64(0.5))
    } else {
        let c = r.cos();
        let s = r.sin();
        -(c * (r * c + s)) / (r + c * s)
    }
}

fn radial_speed_body<T: Real>(p: &[T]) -> Result<T> {
    Ok(radial_speed(p[0]))
}

fn scaling_g_body<T: Real>(p: &[T]) -> Result<T> {
    Ok(scaling_g(p[0]))
}

/// cos(sqrt(u)) as a smooth function of u >= 0.
fn cos_sqrt<T: Real>(u: T) -> T {
    if u.value() < 1e-6 {
        let one = T::from_f64(1.0);
        one - u * T::from_f64(0.5) + u * u * T::from_f64(1.0 / 24.0)
            - u * u * u * T::from_f64(1.0 / 720.0)
    } else {
        u.sqrt().cos()
    }
}

/// sin(sqrt(u))/sqrt(u) as a smooth function of u >= 0, extended by 1 at 0.
fn sinc_sqrt<T: Real>(u: T) -> T {
    if u.value() < 1e-6 {
        let one = T::from_f64(1.0);
        one - u * T::from_f64(1.0 / 6.0) + u * u * T::from_f64(1.0 / 120.0)
            - u * u * u * T::from_f64(1.0 / 5040.0)
    } else {
        let s = u.sqrt();
        s.sin() / s
    }
}

fn cart_alpha_x<T: Real>(p: &[T]) -> Result<T> {
    let u = p[0] * p[0] + p[1] * p[1];
    Ok(-(p[1] * sinc_sqrt(u)))
}

fn cart_alpha_y<T: Real>(p: &[T]) -> Result<T> {
    let u = p[0] * p[0] + p[1] * p[1];
    Ok(p[0] * sinc_sqrt(u))
}

fn cart_alpha_z<T: Real>(p: &[T]) -> Result<T> {
    let u = p[0] * p[0] + p[1] * p[1];
    Ok(cos_sqrt(u))
}

// ---------------------------------------------------------------------------
// Model data types
// ---------------------------------------------------------------------------

/// A contact form on an odd-dimensional chart.
#[derive(Clone, Debug)]
pub struct ContactModel {
    chart: Chart,
    alpha: KForm,
    half_dim: usize,
}

impl ContactModel {
    pub fn new(alpha: KForm) -> Result<ContactModel> {
        let chart = alpha.chart().clone();
        if alpha.degree() != 1 {
            return Err(Error::DegreeOverflow { degree: alpha.degree(), dim: 1 });
        }
        if chart.dim() % 2 == 0 {
            return Err(Error::DomainError {
                context: "ContactModel".into(),
                message: format!("chart dimension {} is not odd", chart.dim()),
            });
        }
        let half_dim = (chart.dim() - 1) / 2;
        Ok(ContactModel { chart, alpha, half_dim })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn alpha(&self) -> &KForm {
        &self.alpha
    }

    pub fn half_dim(&self) -> usize {
        self.half_dim
    }

    /// alpha ^ (d alpha)^n, the defining top form.
    pub fn top_form(&self) -> Result<KForm> {
        let da = self.alpha.exterior_derivative()?;
        let mut acc = self.alpha.clone();
        for _ in 0..self.half_dim {
            acc = acc.wedge(&da)?;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OtFlavor {
    Polar,
    Cartesian,
}

/// The standard overtwisted contact form cos(r) dz + r sin(r) dth, or its
/// Cartesian counterpart which is smooth across the axis.
pub fn make_alpha_ot(flavor: OtFlavor) -> KForm {
    match flavor {
        OtFlavor::Polar => {
            // coefficients on (dr, dth, dz)
            KForm::one_form(&polar3(), &["0", "r*sin(r)", "cos(r)"]).unwrap()
        }
        OtFlavor::Cartesian => {
            let chart = cartesian3();
            let mut form = KForm::zero(&chart, 1).unwrap();
            form.add_term(&[0], ScalarField::native(&chart, native_body!("alpha_ot_x", cart_alpha_x)))
                .unwrap();
            form.add_term(&[1], ScalarField::native(&chart, native_body!("alpha_ot_y", cart_alpha_y)))
                .unwrap();
            form.add_term(&[2], ScalarField::native(&chart, native_body!("alpha_ot_z", cart_alpha_z)))
                .unwrap();
            form
        }
    }
}

/// The canonical Liouville form -sum p_j dq_j on the cotangent chart.
pub fn make_lambda_can(n: usize) -> Result<KForm> {
    let chart = cotangent(n)?;
    let mut form = KForm::zero(&chart, 1)?;
    for j in 0..n {
        form.add_term(&[j], ScalarField::parse(&chart, &format!("-p{}", j + 1))?)?;
    }
    Ok(form)
}

/// The Liouville field sum p_j d/dp_j on the cotangent chart.
pub fn liouville_field(n: usize) -> Result<VectorField> {
    let chart = cotangent(n)?;
    let mut comps = Vec::new();
    for _ in 0..n {
        comps.push(ScalarField::constant(&chart, 0.0));
    }
    for j in 0..n {
        comps.push(ScalarField::parse(&chart, &format!("p{}", j + 1))?);
    }
    VectorField::new(&chart, comps)
}

/// alpha_OT + lambda_can on the product chart (r, th, z; q, p).
pub fn alpha_ot_plus_lambda(n: usize) -> Result<KForm> {
    let chart = box_bundle(n)?;
    let mut form = KForm::zero(&chart, 1)?;
    form.add_term(&[1], ScalarField::parse(&chart, "r*sin(r)")?)?;
    form.add_term(&[2], ScalarField::parse(&chart, "cos(r)")?)?;
    for j in 0..n {
        form.add_term(&[3 + j], ScalarField::parse(&chart, &format!("-p{}", j + 1))?)?;
    }
    Ok(form)
}

/// dz - sum y_j dx_j on the standard contact chart.
pub fn standard_contact_form(n: usize) -> Result<KForm> {
    let chart = standard_contact(n)?;
    let mut form = KForm::zero(&chart, 1)?;
    for j in 0..n {
        form.add_term(&[j], ScalarField::parse(&chart, &format!("-y{}", j + 1))?)?;
    }
    form.add_term(&[2 * n], ScalarField::constant(&chart, 1.0))?;
    Ok(form)
}

/// dz - y dx - sum p_j dq_j on the product Darboux chart.
pub fn darboux_product_form(n: usize) -> Result<KForm> {
    let chart = darboux_product(n)?;
    let mut form = KForm::zero(&chart, 1)?;
    form.add_term(&[0], ScalarField::parse(&chart, "-y")?)?;
    form.add_term(&[2], ScalarField::constant(&chart, 1.0))?;
    for j in 0..n {
        form.add_term(&[3 + j], ScalarField::parse(&chart, &format!("-p{}", j + 1))?)?;
    }
    Ok(form)
}

/// The squeezing contact vector field X = -z d/dz + f(r) d/dr.
pub fn make_field_x() -> VectorField {
    let chart = polar3();
    VectorField::new(
        &chart,
        vec![
            ScalarField::native(&chart, native_body!("radial_speed", radial_speed_body)),
            ScalarField::constant(&chart, 0.0),
            ScalarField::parse(&chart, "-z").unwrap(),
        ],
    )
    .unwrap()
}

/// The conformal scaling factor g as a scalar field on the polar chart.
pub fn make_scaling_g() -> ScalarField {
    ScalarField::native(&polar3(), native_body!("scaling_g", scaling_g_body))
}

/// Expression-backed variant of g (valid away from the axis); the native
/// and expression representations must agree on every sweep.
pub fn make_scaling_g_expr() -> ScalarField {
    ScalarField::parse(&polar3(), "-(cos(r)*(r*cos(r)+sin(r))/(r+cos(r)*sin(r)))").unwrap()
}

// ---------------------------------------------------------------------------
// Pointwise solvers
// ---------------------------------------------------------------------------

fn one_form_values(alpha: &KForm, p: &[f64]) -> Result<Vec<f64>> {
    (0..alpha.chart().dim())
        .map(|i| alpha.coefficient_value(&[i], p))
        .collect()
}

fn two_form_matrix(da: &KForm, p: &[f64]) -> Result<DMatrix<f64>> {
    let dim = da.chart().dim();
    let mut m = DMatrix::zeros(dim, dim);
    for (index, field) in da.coefficients() {
        let v = field.eval(p)?;
        m[(index[0], index[1])] = v;
        m[(index[1], index[0])] = -v;
    }
    Ok(m)
}

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(b, 1e-13)
        .map_err(|_| Error::SingularSystem { residual: f64::INFINITY })?;
    let residual = (a * &x - b).amax();
    Ok((x, residual))
}

/// The Reeb vector of `alpha` at `p`: alpha(R) = 1, iota_R d(alpha) = 0,
/// solved as a consistent overdetermined linear system.
pub fn reeb_at(alpha: &KForm, p: &[f64]) -> Result<Vec<f64>> {
    let dim = alpha.chart().dim();
    let avals = one_form_values(alpha, p)?;
    let dmat = two_form_matrix(&alpha.exterior_derivative()?, p)?;
    let mut a = DMatrix::zeros(dim + 1, dim);
    let mut b = DVector::zeros(dim + 1);
    for j in 0..dim {
        a[(0, j)] = avals[j];
    }
    b[0] = 1.0;
    // rows 1..=dim: d(alpha)(R, e_i) = sum_j R_j D[j][i] = 0
    for i in 0..dim {
        for j in 0..dim {
            a[(i + 1, j)] = dmat[(j, i)];
        }
    }
    let (x, residual) = least_squares(&a, &b)?;
    if residual > LSQ_TOL {
        return Err(Error::SingularSystem { residual });
    }
    Ok(x.iter().copied().collect())
}

/// Reeb vector of a contact model at a point.
pub fn reeb_vector(model: &ContactModel, p: &[f64]) -> Result<Vec<f64>> {
    reeb_at(model.alpha(), p)
}

/// The Moser/Gray-stability vector at interpolation time `tau`:
/// alpha_tau(X) = 0 and d(alpha_tau)(X, .) = f_tau alpha_tau - alpha_dot,
/// with f_tau = alpha_dot(R_tau).
pub fn moser_vector(alpha0: &KForm, alpha1: &KForm, tau: f64, p: &[f64]) -> Result<Vec<f64>> {
    alpha0.chart().check_same(alpha1.chart())?;
    let dim = alpha0.chart().dim();
    let alpha_tau = alpha0.scale(1.0 - tau).add(&alpha1.scale(tau))?;
    let alpha_dot = alpha1.sub(alpha0)?;
    let reeb = reeb_at(&alpha_tau, p)?;
    let dot_vals = one_form_values(&alpha_dot, p)?;
    let tau_vals = one_form_values(&alpha_tau, p)?;
    let f_tau: f64 = dot_vals.iter().zip(&reeb).map(|(a, r)| a * r).sum();
    let dmat = two_form_matrix(&alpha_tau.exterior_derivative()?, p)?;

    let mut a = DMatrix::zeros(dim + 1, dim);
    let mut b = DVector::zeros(dim + 1);
    for j in 0..dim {
        a[(0, j)] = tau_vals[j];
    }
    for i in 0..dim {
        for j in 0..dim {
            a[(i + 1, j)] = dmat[(j, i)];
        }
        b[i + 1] = f_tau * tau_vals[i] - dot_vals[i];
    }
    let (x, residual) = least_squares(&a, &b)?;
    if residual > LSQ_TOL {
        return Err(Error::SingularSystem { residual });
    }
    Ok(x.iter().copied().collect())
}

/// Generator of the characteristic foliation:
/// X^i = (-1)^(i-1) (beta ^ (d beta)^(n-1))(e_1,..,e_i-hat,..,e_2n) / dvol(frame).
pub fn characteristic_foliation_vector(beta: &KForm, dvol: &KForm, p: &[f64]) -> Result<Vec<f64>> {
    beta.chart().check_same(dvol.chart())?;
    let dim = beta.chart().dim();
    if dim % 2 != 0 || beta.degree() != 1 || dvol.degree() != dim {
        return Err(Error::DomainError {
            context: "characteristic_foliation_vector".into(),
            message: "need a 1-form and a volume form on an even-dimensional chart".into(),
        });
    }
    let n = dim / 2;
    let frame: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let frame_refs: Vec<&[f64]> = frame.iter().map(|v| v.as_slice()).collect();
    let volume = dvol.evaluate(p, &frame_refs)?;
    if volume.abs() < 1e-12 {
        return Err(Error::DegenerateVolume(volume.abs()));
    }
    let mut rhs = beta.clone();
    if n > 1 {
        let db = beta.exterior_derivative()?;
        for _ in 0..n - 1 {
            rhs = rhs.wedge(&db)?;
        }
    }
    let mut x = Vec::with_capacity(dim);
    for i in 0..dim {
        let omitted: Vec<&[f64]> = frame_refs
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| *v)
            .collect();
        let value = rhs.evaluate(p, &omitted)?;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        x.push(sign * value / volume);
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Sampled verification reports
// ---------------------------------------------------------------------------

/// Check that alpha ^ (d alpha)^n has a nonvanishing, sign-constant top
/// coefficient over sampled region points.
pub fn contact_condition_report(
    model: &ContactModel,
    samples: u64,
    region: &dyn Region,
    seed: u64,
) -> Report {
    let mut builder = ReportBuilder::new("contact_condition", seed)
        .param("chart", model.chart().name())
        .param("samples", samples);
    let top = match model.top_form() {
        Ok(t) => t,
        Err(e) => return builder.finish_error(&e),
    };
    let full_index: Vec<usize> = (0..model.chart().dim()).collect();
    let mut rng = crate::report::rng_for(seed);
    let mut reference_sign = 0.0_f64;
    for _ in 0..samples {
        let p = region.sample(&mut rng);
        if !model.chart().in_domain(&p) {
            return builder
                .finish_error(&Error::DomainError {
                    context: "contact_condition_report".into(),
                    message: format!("sampler produced out-of-chart point {p:?}"),
                });
        }
        let v = match top.coefficient_value(&full_index, &p) {
            Ok(v) => v,
            Err(e) => return builder.finish_error(&e),
        };
        builder.require(v.abs() > 1e-10, &p, "top coefficient vanishes");
        if reference_sign == 0.0 {
            reference_sign = v.signum();
        } else {
            builder.require(v.signum() == reference_sign, &p, "top coefficient changes sign");
        }
    }
    builder.finish()
}

/// Check L_v alpha = g alpha over sampled points; residual is the worst
/// coefficient of the difference 1-form.
pub fn verify_conformal_scaling(
    v: &VectorField,
    alpha: &KForm,
    gfield: &ScalarField,
    samples: u64,
    region: &dyn Region,
    seed: u64,
) -> Report {
    let mut builder = ReportBuilder::new("conformal_scaling", seed).param("samples", samples);
    let lie = match alpha.lie_derivative(v) {
        Ok(l) => l,
        Err(e) => return builder.finish_error(&e),
    };
    let scaled = alpha.scale_field(gfield);
    let mut rng = crate::report::rng_for(seed);
    for _ in 0..samples {
        let p = region.sample(&mut rng);
        match lie.max_coeff_residual(&scaled, &p) {
            Ok(r) => builder.observe(r, 1e-7, &p),
            Err(e) => return builder.finish_error(&e),
        }
    }
    builder.finish()
}

/// Polar -> Cartesian chart change (x = r cos th, y = r sin th).
pub fn polar_to_cartesian() -> SmoothMap {
    SmoothMap::parse(&polar3(), &cartesian3(), &["r*cos(th)", "r*sin(th)", "z"]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{rng_for, BoxRegion};
    use std::f64::consts::PI;

    #[test]
    fn alpha_ot_on_dz_at_pi() {
        let alpha = make_alpha_ot(OtFlavor::Polar);
        let dz = [0.0, 0.0, 1.0];
        let v = alpha.evaluate(&[PI, 0.0, 0.0], &[&dz]).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_ot_cartesian_axis() {
        let alpha = make_alpha_ot(OtFlavor::Cartesian);
        let dz = [0.0, 0.0, 1.0];
        let v = alpha.evaluate(&[0.0, 0.0, 0.0], &[&dz]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polar_and_cartesian_agree_under_chart_change() {
        let cart = make_alpha_ot(OtFlavor::Cartesian);
        let polar = make_alpha_ot(OtFlavor::Polar);
        let pulled = cart.pullback(&polar_to_cartesian()).unwrap();
        let p = [1.0, 0.7, 0.3];
        let r = pulled.max_coeff_residual(&polar, &p).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn alpha_wedge_dalpha_closed_form() {
        // alpha_OT ^ d alpha_OT = (r + cos r sin r) dr^dth^dz
        let alpha = make_alpha_ot(OtFlavor::Polar);
        let top = ContactModel::new(alpha).unwrap().top_form().unwrap();
        let mut rng = rng_for(3);
        let region = BoxRegion::new(DEFAULT_DELTA, 1.0);
        for _ in 0..200 {
            let p = region.sample(&mut rng);
            let got = top.coefficient_value(&[0, 1, 2], &p).unwrap();
            let expected = p[0] + p[0].cos() * p[0].sin();
            assert!((got - expected).abs() < 1e-10, "at {p:?}: {got} vs {expected}");
        }
    }

    #[test]
    fn lambda_can_read_off() {
        let lambda = make_lambda_can(1).unwrap();
        let dq = [1.0, 0.0];
        let v = lambda.evaluate(&[0.5, 2.0], &[&dq]).unwrap();
        assert!((v + 2.0).abs() < 1e-15);
    }

    #[test]
    fn liouville_identity() {
        // iota_Y d lambda = lambda for Y = sum p_j d/dp_j
        let n = 2;
        let lambda = make_lambda_can(n).unwrap();
        let y = liouville_field(n).unwrap();
        let lhs = lambda.exterior_derivative().unwrap().interior_product(&y).unwrap();
        let mut rng = rng_for(11);
        for _ in 0..100 {
            let p: Vec<f64> = (0..2 * n).map(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0)).collect();
            let r = lhs.max_coeff_residual(&lambda, &p).unwrap();
            assert!(r < 1e-10, "residual {r} at {p:?}");
        }
    }

    #[test]
    fn d_lambda_sign_convention() {
        // d(-p dq) = dq ^ dp: coefficient +1 on (q1, p1)
        let lambda = make_lambda_can(1).unwrap();
        let d = lambda.exterior_derivative().unwrap();
        let v = d.coefficient_value(&[0, 1], &[0.3, -1.2]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x_radial_coefficient_and_g_values() {
        let x = make_field_x();
        let vals = x.eval(&[PI / 2.0, 0.0, 0.7]).unwrap();
        assert!(vals[0].abs() < 1e-15); // cos(pi/2) = 0
        assert!((vals[2] + 0.7).abs() < 1e-15);

        let g = make_scaling_g();
        assert!((g.eval(&[PI, 0.0, 0.0]).unwrap() + 1.0).abs() < 1e-14);
        assert!(g.eval(&[PI / 2.0, 0.0, 0.0]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn g_series_fallback_continuity() {
        let g = make_scaling_g();
        let at = |r: f64| g.eval(&[r, 0.0, 0.0]).unwrap();
        let closed = |r: f64| {
            -(r.cos() * (r * r.cos() + r.sin())) / (r + r.cos() * r.sin())
        };
        assert!((at(1e-4) - closed(1e-4)).abs() < 1e-8);
        // native and expression representation agree away from the axis
        let ge = make_scaling_g_expr();
        for r in [0.2, 1.0, 2.0, 3.0] {
            assert!((at(r) - ge.eval(&[r, 0.0, 0.0]).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn reeb_of_darboux_is_dz() {
        let alpha = standard_contact_form(1).unwrap();
        let r = reeb_at(&alpha, &[0.4, -1.1, 0.3]).unwrap();
        assert!((r[2] - 1.0).abs() < 1e-10);
        assert!(r[0].abs() < 1e-10 && r[1].abs() < 1e-10);
    }

    #[test]
    fn reeb_of_alpha_ot_at_axis_is_dz() {
        let alpha = make_alpha_ot(OtFlavor::Cartesian);
        let r = reeb_at(&alpha, &[0.0, 0.0, 0.0]).unwrap();
        assert!((r[2] - 1.0).abs() < 1e-10);
        assert!(r[0].abs() < 1e-10 && r[1].abs() < 1e-10);
    }

    #[test]
    fn reeb_self_check_on_product_model() {
        let alpha = alpha_ot_plus_lambda(1).unwrap();
        let p = [1.2, 0.4, -0.3, 0.9, 0.25];
        let r = reeb_vector(&ContactModel::new(alpha.clone()).unwrap(), &p).unwrap();
        let avals = one_form_values(&alpha, &p).unwrap();
        let a_of_r: f64 = avals.iter().zip(&r).map(|(a, x)| a * x).sum();
        assert!((a_of_r - 1.0).abs() < 1e-9);
        let dmat = two_form_matrix(&alpha.exterior_derivative().unwrap(), &p).unwrap();
        for i in 0..5 {
            let v: f64 = (0..5).map(|j| r[j] * dmat[(j, i)]).sum();
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn moser_zero_when_forms_agree() {
        let alpha = standard_contact_form(1).unwrap();
        let x = moser_vector(&alpha, &alpha, 0.3, &[0.2, 0.5, -0.1]).unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn moser_constraint_for_conformal_pair() {
        let alpha0 = standard_contact_form(1).unwrap();
        let alpha1 = alpha0.scale(0.1_f64.exp());
        let p = [0.7, -0.2, 0.4];
        let x = moser_vector(&alpha0, &alpha1, 0.5, &p).unwrap();
        let alpha_tau = alpha0.scale(0.5).add(&alpha1.scale(0.5)).unwrap();
        let vals = one_form_values(&alpha_tau, &p).unwrap();
        let a_of_x: f64 = vals.iter().zip(&x).map(|(a, v)| a * v).sum();
        assert!(a_of_x.abs() < 1e-10);
    }

    #[test]
    fn characteristic_foliation_of_disk_model() {
        // beta = r sin r dth, dvol = r dr^dth on the 2-disk: X = sin(r) d/dr
        let chart = Chart::with_domain("disk", &["r", "th"], &[false, true], |p| p[0] > 1e-3)
            .unwrap();
        let beta = KForm::one_form(&chart, &["0", "r*sin(r)"]).unwrap();
        let mut dvol = KForm::zero(&chart, 2).unwrap();
        dvol.add_term(&[0, 1], ScalarField::parse(&chart, "r").unwrap()).unwrap();
        let x = characteristic_foliation_vector(&beta, &dvol, &[1.0, 0.3]).unwrap();
        assert!((x[0] - 1.0_f64.sin()).abs() < 1e-12);
        assert!(x[1].abs() < 1e-12);
    }

    #[test]
    fn characteristic_foliation_singular_point_is_zero() {
        let chart = Chart::new("plane4", &["s", "t", "u", "v"]).unwrap();
        // beta vanishing at the origin: s dt - t ds
        let beta = KForm::one_form(&chart, &["-t", "s", "0", "0"]).unwrap();
        let mut dvol = KForm::zero(&chart, 4).unwrap();
        dvol.add_term(&[0, 1, 2, 3], ScalarField::constant(&chart, 1.0)).unwrap();
        let x = characteristic_foliation_vector(&beta, &dvol, &[0.0, 0.0, 0.5, 0.5]).unwrap();
        assert!(x.iter().all(|c| c.abs() < 1e-12));
    }
}
