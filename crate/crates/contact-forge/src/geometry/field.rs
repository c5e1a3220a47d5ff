//! Scalar fields on a chart.
//!
//! A field is either a parsed expression over the chart coordinates, a native
//! body (plain code evaluable at every dual level), or a derived node built by
//! the exterior-calculus operations.  Derived nodes evaluate lazily; partial
//! derivatives are taken by lifting the evaluation point one level up the
//! dual tower.

use std::sync::Arc;

use crate::dual::{NativeBody, Real};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::chart::Chart;
use crate::geometry::map::SmoothMap;

#[derive(Clone)]
pub enum FieldBody {
    Const(f64),
    Expr(Arc<Expr>),
    Native(Arc<dyn NativeBody>),
    Add(ScalarField, ScalarField),
    Sub(ScalarField, ScalarField),
    Mul(ScalarField, ScalarField),
    Neg(ScalarField),
    /// d/dx_i of the inner field.
    Partial(ScalarField, usize),
    /// Field on the map's target chart composed with the map.
    Compose(ScalarField, SmoothMap),
    /// One coefficient of the pullback of a form: sum over the form's
    /// multi-indices of (coefficient o map) times the Jacobian minor.
    PullbackCoeff {
        coeffs: Arc<Vec<(Vec<usize>, ScalarField)>>,
        map: SmoothMap,
        index: Vec<usize>,
    },
}

#[derive(Clone)]
pub struct ScalarField {
    chart: Chart,
    body: Arc<FieldBody>,
}

impl ScalarField {
    pub fn from_expr(chart: &Chart, e: Expr) -> Result<ScalarField> {
        for sym in e.symbols() {
            if chart.index_of(&sym).is_none() {
                return Err(Error::UnboundSymbol(sym));
            }
        }
        Ok(ScalarField { chart: chart.clone(), body: Arc::new(FieldBody::Expr(Arc::new(e))) })
    }

    pub fn parse(chart: &Chart, text: &str) -> Result<ScalarField> {
        Self::from_expr(chart, crate::expr::parse(text)?)
    }

    pub fn native(chart: &Chart, body: Arc<dyn NativeBody>) -> ScalarField {
        ScalarField { chart: chart.clone(), body: Arc::new(FieldBody::Native(body)) }
    }

    pub fn constant(chart: &Chart, v: f64) -> ScalarField {
        ScalarField { chart: chart.clone(), body: Arc::new(FieldBody::Const(v)) }
    }

    /// The coordinate function x_i as a field.
    pub fn coordinate(chart: &Chart, i: usize) -> ScalarField {
        ScalarField::from_expr(chart, Expr::Sym(chart.coords()[i].clone())).unwrap()
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(*self.body, FieldBody::Const(c) if c == 0.0)
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        if self.is_zero_const() {
            return other.clone();
        }
        if other.is_zero_const() {
            return self.clone();
        }
        ScalarField {
            chart: self.chart.clone(),
            body: Arc::new(FieldBody::Add(self.clone(), other.clone())),
        }
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        if other.is_zero_const() {
            return self.clone();
        }
        if self.is_zero_const() {
            return other.neg();
        }
        ScalarField {
            chart: self.chart.clone(),
            body: Arc::new(FieldBody::Sub(self.clone(), other.clone())),
        }
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        if self.is_zero_const() || other.is_zero_const() {
            return ScalarField::constant(&self.chart, 0.0);
        }
        if let FieldBody::Const(c) = *self.body {
            if c == 1.0 {
                return other.clone();
            }
        }
        if let FieldBody::Const(c) = *other.body {
            if c == 1.0 {
                return self.clone();
            }
        }
        ScalarField {
            chart: self.chart.clone(),
            body: Arc::new(FieldBody::Mul(self.clone(), other.clone())),
        }
    }

    pub fn neg(&self) -> ScalarField {
        if self.is_zero_const() {
            return self.clone();
        }
        ScalarField { chart: self.chart.clone(), body: Arc::new(FieldBody::Neg(self.clone())) }
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        if c == 0.0 {
            return ScalarField::constant(&self.chart, 0.0);
        }
        if c == 1.0 {
            return self.clone();
        }
        self.mul(&ScalarField::constant(&self.chart, c))
    }

    pub fn partial(&self, i: usize) -> ScalarField {
        if matches!(*self.body, FieldBody::Const(_)) {
            return ScalarField::constant(&self.chart, 0.0);
        }
        ScalarField {
            chart: self.chart.clone(),
            body: Arc::new(FieldBody::Partial(self.clone(), i)),
        }
    }

    /// Field on `map.target()` pulled back to `map.source()`.
    pub fn compose(&self, map: &SmoothMap) -> Result<ScalarField> {
        self.chart.check_same(map.target())?;
        Ok(ScalarField {
            chart: map.source().clone(),
            body: Arc::new(FieldBody::Compose(self.clone(), map.clone())),
        })
    }

    pub(crate) fn pullback_coeff(
        coeffs: Arc<Vec<(Vec<usize>, ScalarField)>>,
        map: &SmoothMap,
        index: Vec<usize>,
    ) -> ScalarField {
        ScalarField {
            chart: map.source().clone(),
            body: Arc::new(FieldBody::PullbackCoeff { coeffs, map: map.clone(), index }),
        }
    }

    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        self.eval_t::<f64>(p)
    }

    /// Directional derivative at `p` along `dir`.
    pub fn directional(&self, p: &[f64], dir: &[f64]) -> Result<f64> {
        let lifted: Vec<crate::dual::D1> = p
            .iter()
            .zip(dir)
            .map(|(&x, &d)| crate::dual::D1 { val: x, der: d })
            .collect();
        Ok(self.eval_t::<crate::dual::D1>(&lifted)?.der)
    }

    /// Gradient at `p` in chart coordinates.
    pub fn gradient(&self, p: &[f64]) -> Result<Vec<f64>> {
        (0..self.chart.dim())
            .map(|i| {
                let mut dir = vec![0.0; self.chart.dim()];
                dir[i] = 1.0;
                self.directional(p, &dir)
            })
            .collect()
    }

    pub fn eval_t<T: Real>(&self, p: &[T]) -> Result<T> {
        if p.len() != self.chart.dim() {
            return Err(Error::ArityMismatch { expected: self.chart.dim(), got: p.len() });
        }
        match &*self.body {
            FieldBody::Const(c) => Ok(T::from_f64(*c)),
            FieldBody::Expr(e) => {
                e.eval_with(&|name| self.chart.index_of(name).map(|i| p[i]))
            }
            FieldBody::Native(body) => T::call_native(body.as_ref(), p),
            FieldBody::Add(a, b) => Ok(a.eval_t(p)? + b.eval_t(p)?),
            FieldBody::Sub(a, b) => Ok(a.eval_t(p)? - b.eval_t(p)?),
            FieldBody::Mul(a, b) => Ok(a.eval_t(p)? * b.eval_t(p)?),
            FieldBody::Neg(a) => Ok(-a.eval_t(p)?),
            FieldBody::Partial(f, i) => Ok(T::der_part(f.eval_t::<T::Lift>(&lift_point(p, *i)?)?)),
            FieldBody::Compose(f, map) => {
                let q = map.eval_t(p)?;
                f.eval_t(&q)
            }
            FieldBody::PullbackCoeff { coeffs, map, index } => {
                eval_pullback_coeff(coeffs, map, index, p)
            }
        }
    }
}

/// Lift a point one dual level, seeding coordinate `seed`.
pub(crate) fn lift_point<T: Real>(p: &[T], seed: usize) -> Result<Vec<T::Lift>> {
    if !T::CAN_LIFT {
        return Err(Error::DerivativeDepthExceeded);
    }
    Ok(p.iter()
        .enumerate()
        .map(|(j, &x)| if j == seed { x.lift_var() } else { x.lift_const() })
        .collect())
}

fn eval_pullback_coeff<T: Real>(
    coeffs: &[(Vec<usize>, ScalarField)],
    map: &SmoothMap,
    index: &[usize],
    p: &[T],
) -> Result<T> {
    let q = map.eval_t(p)?;
    // Jacobian columns d(map)/dx_j for the source coordinates in `index`.
    let target_dim = map.target().dim();
    let mut jac_cols: Vec<Vec<T>> = Vec::with_capacity(index.len());
    for &j in index {
        let lifted = lift_point(p, j)?;
        let mut col = Vec::with_capacity(target_dim);
        for comp in map.components() {
            col.push(T::der_part(comp.eval_t::<T::Lift>(&lifted)?));
        }
        jac_cols.push(col);
    }
    let mut acc = T::from_f64(0.0);
    for (tgt_index, coeff) in coeffs {
        // minor[a][b] = d(map_{I_a})/dx_{J_b}
        let k = tgt_index.len();
        let mut minor = vec![T::from_f64(0.0); k * k];
        for (a, &i) in tgt_index.iter().enumerate() {
            for b in 0..k {
                minor[a * k + b] = jac_cols[b][i];
            }
        }
        acc = acc + coeff.eval_t(&q)? * det_t(&minor, k);
    }
    Ok(acc)
}

/// Determinant by Laplace expansion in generic scalar arithmetic.
/// Only used for small minors (degree of the pulled-back form).
pub(crate) fn det_t<T: Real>(m: &[T], n: usize) -> T {
    match n {
        0 => T::from_f64(1.0),
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        _ => {
            let mut acc = T::from_f64(0.0);
            let mut sub = vec![T::from_f64(0.0); (n - 1) * (n - 1)];
            for col in 0..n {
                let mut idx = 0;
                for r in 1..n {
                    for c in 0..n {
                        if c != col {
                            sub[idx] = m[r * n + c];
                            idx += 1;
                        }
                    }
                }
                let term = m[col] * det_t(&sub, n - 1);
                acc = if col % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &*self.body {
            FieldBody::Const(c) => write!(f, "{c}"),
            FieldBody::Expr(e) => write!(f, "{e}"),
            FieldBody::Native(b) => write!(f, "<{}>", b.name()),
            FieldBody::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            FieldBody::Sub(a, b) => write!(f, "({a:?} - {b:?})"),
            FieldBody::Mul(a, b) => write!(f, "({a:?})*({b:?})"),
            FieldBody::Neg(a) => write!(f, "-({a:?})"),
            FieldBody::Partial(a, i) => write!(f, "d_{}({a:?})", self.chart.coords()[*i]),
            FieldBody::Compose(a, m) => write!(f, "({a:?}) o {}", m.target().name()),
            FieldBody::PullbackCoeff { index, .. } => write!(f, "pullback[{index:?}]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart2() -> Chart {
        Chart::new("plane", &["x", "y"]).unwrap()
    }

    #[test]
    fn partial_of_expression() {
        let c = chart2();
        let f = ScalarField::parse(&c, "x*x*y + sin(x)").unwrap();
        let fx = f.partial(0);
        let p = [0.7, -1.3];
        let expected = 2.0 * p[0] * p[1] + p[0].cos();
        assert!((fx.eval(&p).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn second_partial_via_nesting() {
        let c = chart2();
        let f = ScalarField::parse(&c, "sin(x*y)").unwrap();
        let fxy = f.partial(0).partial(1);
        let p = [0.3, 0.9];
        // d^2/dxdy sin(xy) = cos(xy) - xy sin(xy)
        let expected = (p[0] * p[1]).cos() - p[0] * p[1] * (p[0] * p[1]).sin();
        assert!((fxy.eval(&p).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn symbols_must_belong_to_chart() {
        let c = chart2();
        assert!(matches!(
            ScalarField::parse(&c, "x + t"),
            Err(Error::UnboundSymbol(s)) if s == "t"
        ));
    }

    #[test]
    fn depth_cap_reported() {
        let c = chart2();
        let mut f = ScalarField::parse(&c, "sin(x)").unwrap();
        for _ in 0..5 {
            f = f.partial(0);
        }
        assert_eq!(f.eval(&[0.2, 0.0]), Err(Error::DerivativeDepthExceeded));
    }
}
