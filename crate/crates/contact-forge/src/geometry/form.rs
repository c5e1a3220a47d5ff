//! Differential k-forms and vector fields, with the exterior-calculus
//! operations evaluated numerically through the dual tower.
//!
//! Coefficients are stored on strictly increasing multi-indices only; an
//! absent index means a zero coefficient.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::chart::Chart;
use crate::geometry::field::{det_t, ScalarField};
use crate::geometry::map::SmoothMap;

/// A vector field: one component field per coordinate.
#[derive(Clone, Debug)]
pub struct VectorField {
    chart: Chart,
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(chart: &Chart, components: Vec<ScalarField>) -> Result<VectorField> {
        if components.len() != chart.dim() {
            return Err(Error::ArityMismatch { expected: chart.dim(), got: components.len() });
        }
        for c in &components {
            c.chart().check_same(chart)?;
        }
        Ok(VectorField { chart: chart.clone(), components })
    }

    pub fn parse(chart: &Chart, components: &[&str]) -> Result<VectorField> {
        let fields = components
            .iter()
            .map(|t| ScalarField::parse(chart, t))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(chart, fields)
    }

    /// The coordinate frame vector d/dx_i.
    pub fn frame(chart: &Chart, i: usize) -> VectorField {
        let components = (0..chart.dim())
            .map(|j| ScalarField::constant(chart, if i == j { 1.0 } else { 0.0 }))
            .collect();
        VectorField::new(chart, components).unwrap()
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval(p)).collect()
    }
}

/// A degree-k differential form on a chart.
#[derive(Clone)]
pub struct KForm {
    chart: Chart,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, ScalarField>,
}

impl KForm {
    pub fn zero(chart: &Chart, degree: usize) -> Result<KForm> {
        if degree > chart.dim() {
            return Err(Error::DegreeOverflow { degree, dim: chart.dim() });
        }
        Ok(KForm { chart: chart.clone(), degree, coeffs: BTreeMap::new() })
    }

    pub fn from_scalar(field: ScalarField) -> KForm {
        let chart = field.chart().clone();
        let mut form = KForm::zero(&chart, 0).unwrap();
        form.coeffs.insert(vec![], field);
        form
    }

    /// Add `field * dx_{I}` for a strictly increasing index `I`.
    pub fn add_term(&mut self, index: &[usize], field: ScalarField) -> Result<()> {
        if index.len() != self.degree {
            return Err(Error::ArityMismatch { expected: self.degree, got: index.len() });
        }
        if index.windows(2).any(|w| w[0] >= w[1]) || index.iter().any(|&i| i >= self.chart.dim()) {
            return Err(Error::DomainError {
                context: "KForm::add_term".into(),
                message: format!("index {index:?} is not strictly increasing within the chart"),
            });
        }
        field.chart().check_same(&self.chart)?;
        match self.coeffs.remove(index) {
            Some(existing) => {
                let sum = existing.add(&field);
                if !sum.is_zero_const() {
                    self.coeffs.insert(index.to_vec(), sum);
                }
            }
            None => {
                if !field.is_zero_const() {
                    self.coeffs.insert(index.to_vec(), field);
                }
            }
        }
        Ok(())
    }

    /// Build a 1-form from per-coordinate coefficient expressions.
    pub fn one_form(chart: &Chart, coefficients: &[&str]) -> Result<KForm> {
        let mut form = KForm::zero(chart, 1)?;
        for (i, text) in coefficients.iter().enumerate() {
            if text.trim() == "0" {
                continue;
            }
            form.add_term(&[i], ScalarField::parse(chart, text)?)?;
        }
        Ok(form)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&[usize], &ScalarField)> {
        self.coeffs.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, index: &[usize]) -> Option<&ScalarField> {
        self.coeffs.get(index)
    }

    pub fn add(&self, other: &KForm) -> Result<KForm> {
        self.chart.check_same(&other.chart)?;
        if self.degree != other.degree {
            return Err(Error::DegreeOverflow { degree: other.degree, dim: self.degree });
        }
        let mut out = self.clone();
        for (index, field) in &other.coeffs {
            out.add_term(index, field.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &KForm) -> Result<KForm> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> KForm {
        let mut out = KForm::zero(&self.chart, self.degree).unwrap();
        if c == 0.0 {
            return out;
        }
        for (index, field) in &self.coeffs {
            out.coeffs.insert(index.clone(), field.scale(c));
        }
        out
    }

    pub fn scale_field(&self, f: &ScalarField) -> KForm {
        let mut out = KForm::zero(&self.chart, self.degree).unwrap();
        for (index, field) in &self.coeffs {
            out.coeffs.insert(index.clone(), field.mul(f));
        }
        out
    }

    /// Wedge product by shuffle-sign summation.
    pub fn wedge(&self, other: &KForm) -> Result<KForm> {
        self.chart.check_same(&other.chart)?;
        let degree = self.degree + other.degree;
        if degree > self.chart.dim() {
            return Err(Error::DegreeOverflow { degree, dim: self.chart.dim() });
        }
        let mut out = KForm::zero(&self.chart, degree)?;
        for (ia, fa) in &self.coeffs {
            for (ib, fb) in &other.coeffs {
                if let Some((sign, merged)) = merge_indices(ia, ib) {
                    let term = fa.mul(fb);
                    let term = if sign < 0 { term.neg() } else { term };
                    out.add_term(&merged, term)?;
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative via dual-number partial derivatives of the
    /// coefficients.
    pub fn exterior_derivative(&self) -> Result<KForm> {
        if self.degree >= self.chart.dim() {
            return Err(Error::DegreeOverflow { degree: self.degree + 1, dim: self.chart.dim() });
        }
        let mut out = KForm::zero(&self.chart, self.degree + 1)?;
        for (index, field) in &self.coeffs {
            for i in 0..self.chart.dim() {
                if index.contains(&i) {
                    continue;
                }
                let pos = index.iter().filter(|&&j| j < i).count();
                let mut new_index = index.clone();
                new_index.insert(pos, i);
                let term = field.partial(i);
                let term = if pos % 2 == 1 { term.neg() } else { term };
                out.add_term(&new_index, term)?;
            }
        }
        Ok(out)
    }

    /// Interior product: (iota_v a)(w_1,...,w_{k-1}) = a(v, w_1,...,w_{k-1}).
    pub fn interior_product(&self, v: &VectorField) -> Result<KForm> {
        self.chart.check_same(v.chart())?;
        if self.degree == 0 {
            return Err(Error::DegreeOverflow { degree: 0, dim: self.chart.dim() });
        }
        let mut out = KForm::zero(&self.chart, self.degree - 1)?;
        for (index, field) in &self.coeffs {
            for (t, &i) in index.iter().enumerate() {
                let mut rest = index.clone();
                rest.remove(t);
                let term = v.components()[i].mul(field);
                let term = if t % 2 == 1 { term.neg() } else { term };
                out.add_term(&rest, term)?;
            }
        }
        Ok(out)
    }

    /// Lie derivative by the Cartan formula iota_v(da) + d(iota_v a).
    pub fn lie_derivative(&self, v: &VectorField) -> Result<KForm> {
        self.chart.check_same(v.chart())?;
        if self.degree == 0 {
            // L_v f = v(f), i.e. iota_v(df).
            return self.exterior_derivative()?.interior_product(v);
        }
        let ivd_a = self.interior_product(v)?;
        let d_ivd = if ivd_a.degree < self.chart.dim() {
            ivd_a.exterior_derivative()?
        } else {
            KForm::zero(&self.chart, self.degree)?
        };
        if self.degree == self.chart.dim() {
            // da = 0 for a top-degree form.
            return Ok(d_ivd);
        }
        self.exterior_derivative()?.interior_product(v)?.add(&d_ivd)
    }

    /// Pullback along `m`; `self` lives on `m.target()`.
    pub fn pullback(&self, m: &SmoothMap) -> Result<KForm> {
        self.chart.check_same(m.target())?;
        if self.degree > m.source().dim() {
            return Err(Error::DegreeOverflow { degree: self.degree, dim: m.source().dim() });
        }
        let source = m.source();
        let mut out = KForm::zero(source, self.degree)?;
        if self.degree == 0 {
            if let Some(field) = self.coeffs.get(&vec![]) {
                out.coeffs.insert(vec![], field.compose(m)?);
            }
            return Ok(out);
        }
        let coeffs: Arc<Vec<(Vec<usize>, ScalarField)>> =
            Arc::new(self.coeffs.iter().map(|(k, v)| (k.clone(), v.clone())).collect());
        if coeffs.is_empty() {
            return Ok(out);
        }
        for index in increasing_indices(source.dim(), self.degree) {
            let field = ScalarField::pullback_coeff(coeffs.clone(), m, index.clone());
            out.coeffs.insert(index, field);
        }
        Ok(out)
    }

    /// Full antisymmetric multilinear evaluation on a tuple of vectors.
    pub fn evaluate(&self, p: &[f64], vectors: &[&[f64]]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::ArityMismatch { expected: self.degree, got: vectors.len() });
        }
        if !self.chart.in_domain(p) {
            return Err(Error::DomainError {
                context: format!("KForm::evaluate on chart `{}`", self.chart.name()),
                message: format!("point {p:?} outside chart domain"),
            });
        }
        let k = self.degree;
        let mut acc = 0.0;
        for (index, field) in &self.coeffs {
            let mut minor = vec![0.0; k * k];
            for (a, &i) in index.iter().enumerate() {
                for (b, vec) in vectors.iter().enumerate() {
                    minor[a * k + b] = vec[i];
                }
            }
            acc += field.eval(p)? * det_t(&minor, k);
        }
        Ok(acc)
    }

    /// Evaluate one stored coefficient (absent index = 0).
    pub fn coefficient_value(&self, index: &[usize], p: &[f64]) -> Result<f64> {
        match self.coeffs.get(index) {
            Some(f) => f.eval(p),
            None => Ok(0.0),
        }
    }

    /// Max absolute coefficient difference against `other` at `p`,
    /// over the union of stored indices.
    pub fn max_coeff_residual(&self, other: &KForm, p: &[f64]) -> Result<f64> {
        let mut indices: Vec<&Vec<usize>> = self.coeffs.keys().collect();
        for k in other.coeffs.keys() {
            if !self.coeffs.contains_key(k) {
                indices.push(k);
            }
        }
        let mut worst = 0.0_f64;
        for index in indices {
            let a = self.coefficient_value(index, p)?;
            let b = other.coefficient_value(index, p)?;
            worst = worst.max((a - b).abs());
        }
        Ok(worst)
    }
}

impl std::fmt::Debug for KForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "KForm(deg {} on {}: ", self.degree, self.chart.name())?;
        for (index, field) in &self.coeffs {
            let names: Vec<&str> =
                index.iter().map(|&i| self.chart.coords()[i].as_str()).collect();
            write!(f, "[{}] {:?}; ", names.join("^"), field)?;
        }
        write!(f, ")")
    }
}

/// Merge two strictly increasing disjoint index sets; returns the shuffle
/// sign and the merged set, or `None` if they overlap.
fn merge_indices(a: &[usize], b: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i] < b[j]) {
            merged.push(a[i]);
            i += 1;
        } else if i >= a.len() || b[j] < a[i] {
            // b[j] jumps over the remaining elements of a
            inversions += a.len() - i;
            merged.push(b[j]);
            j += 1;
        } else {
            return None; // equal indices
        }
    }
    Some((if inversions % 2 == 0 { 1 } else { -1 }, merged))
}

/// All strictly increasing k-subsets of 0..dim.
pub fn increasing_indices(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(dim: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(dim, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(dim, k, 0, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart3() -> Chart {
        Chart::with_periodic("polar3", &["r", "th", "z"], &[false, true, false]).unwrap()
    }

    fn dx(chart: &Chart, i: usize) -> KForm {
        let mut f = KForm::zero(chart, 1).unwrap();
        f.add_term(&[i], ScalarField::constant(chart, 1.0)).unwrap();
        f
    }

    #[test]
    fn wedge_dr_dth() {
        let c = chart3();
        let w = dx(&c, 0).wedge(&dx(&c, 1)).unwrap();
        assert!((w.coefficient_value(&[0, 1], &[1.0, 2.0, 3.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wedge_antisymmetry() {
        let c = chart3();
        let w = dx(&c, 1).wedge(&dx(&c, 0)).unwrap();
        assert!((w.coefficient_value(&[0, 1], &[1.0, 2.0, 3.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn d_of_z_dr() {
        // d(z dr) = dz ^ dr = -dr ^ dz
        let c = chart3();
        let form = KForm::one_form(&c, &["z", "0", "0"]).unwrap();
        let d = form.exterior_derivative().unwrap();
        assert!((d.coefficient_value(&[0, 2], &[0.5, 0.1, 0.9]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn interior_product_frame() {
        let c = chart3();
        let w = dx(&c, 0).wedge(&dx(&c, 1)).unwrap();
        let ir = w.interior_product(&VectorField::frame(&c, 0)).unwrap();
        // iota_{d_r}(dr ^ dth) = dth
        assert!((ir.coefficient_value(&[1], &[1.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        // iota_{d_th}(dr) = 0
        let z = dx(&c, 0).interior_product(&VectorField::frame(&c, 1)).unwrap();
        assert_eq!(z.coefficients().count(), 0);
    }

    #[test]
    fn lie_derivative_of_dz_along_dz() {
        let c = chart3();
        let l = dx(&c, 2).lie_derivative(&VectorField::frame(&c, 2)).unwrap();
        let p = [1.0, 2.0, 3.0];
        for i in 0..3 {
            assert!(l.coefficient_value(&[i], &p).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn evaluate_form_antisymmetric() {
        let c = chart3();
        let w = dx(&c, 0).wedge(&dx(&c, 1)).unwrap();
        let e0 = [1.0, 0.0, 0.0];
        let e1 = [0.0, 1.0, 0.0];
        let p = [1.0, 0.5, 0.2];
        assert_eq!(w.evaluate(&p, &[&e0, &e1]).unwrap(), 1.0);
        assert_eq!(w.evaluate(&p, &[&e1, &e0]).unwrap(), -1.0);
        assert_eq!(w.evaluate(&p, &[&e0, &e0]).unwrap(), 0.0);
    }

    #[test]
    fn pullback_under_identity() {
        let c = chart3();
        let form = KForm::one_form(&c, &["cos(r)", "r*sin(r)", "0"]).unwrap();
        let id = SmoothMap::identity(&c);
        let pb = form.pullback(&id).unwrap();
        let p = [1.3, 0.4, -0.2];
        for i in 0..3 {
            let a = form.coefficient_value(&[i], &p).unwrap();
            let b = pb.coefficient_value(&[i], &p).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn top_degree_exterior_derivative_rejected() {
        let c = chart3();
        let vol = dx(&c, 0).wedge(&dx(&c, 1)).unwrap().wedge(&dx(&c, 2)).unwrap();
        assert!(matches!(vol.exterior_derivative(), Err(Error::DegreeOverflow { .. })));
    }
}
