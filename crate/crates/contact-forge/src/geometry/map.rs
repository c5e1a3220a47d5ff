//! Smooth maps between charts.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::dual::Real;
use crate::error::{Error, Result};
use crate::geometry::chart::Chart;
use crate::geometry::field::{lift_point, ScalarField};

struct MapData {
    source: Chart,
    target: Chart,
    components: Vec<ScalarField>,
}

/// A map between charts given by one scalar field per target coordinate.
#[derive(Clone)]
pub struct SmoothMap(Arc<MapData>);

impl SmoothMap {
    pub fn new(source: &Chart, target: &Chart, components: Vec<ScalarField>) -> Result<SmoothMap> {
        if components.len() != target.dim() {
            return Err(Error::ArityMismatch { expected: target.dim(), got: components.len() });
        }
        for comp in &components {
            comp.chart().check_same(source)?;
        }
        Ok(SmoothMap(Arc::new(MapData {
            source: source.clone(),
            target: target.clone(),
            components,
        })))
    }

    /// Components given as expression strings over the source coordinates.
    pub fn parse(source: &Chart, target: &Chart, components: &[&str]) -> Result<SmoothMap> {
        let fields = components
            .iter()
            .map(|text| ScalarField::parse(source, text))
            .collect::<Result<Vec<_>>>()?;
        SmoothMap::new(source, target, fields)
    }

    pub fn identity(chart: &Chart) -> SmoothMap {
        let components = (0..chart.dim()).map(|i| ScalarField::coordinate(chart, i)).collect();
        SmoothMap::new(chart, chart, components).unwrap()
    }

    pub fn source(&self) -> &Chart {
        &self.0.source
    }

    pub fn target(&self) -> &Chart {
        &self.0.target
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.0.components
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.eval_t::<f64>(p)
    }

    pub fn eval_t<T: Real>(&self, p: &[T]) -> Result<Vec<T>> {
        self.0.components.iter().map(|c| c.eval_t(p)).collect()
    }

    /// Jacobian matrix (target dim x source dim) at `p`.
    pub fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let rows = self.0.target.dim();
        let cols = self.0.source.dim();
        let mut jac = DMatrix::zeros(rows, cols);
        for j in 0..cols {
            let lifted = lift_point(p, j)?;
            for (i, comp) in self.0.components.iter().enumerate() {
                jac[(i, j)] = comp.eval_t(&lifted)?.der;
            }
        }
        Ok(jac)
    }

    /// Pushforward of a source-chart vector at `p`.
    pub fn pushforward(&self, p: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let mut lifted = Vec::with_capacity(p.len());
        for (&x, &d) in p.iter().zip(v) {
            lifted.push(crate::dual::D1 { val: x, der: d });
        }
        Ok(self.eval_t(&lifted)?.into_iter().map(|d| d.der).collect())
    }

    /// `self` after `inner` (i.e. the map `p -> self(inner(p))`).
    pub fn after(&self, inner: &SmoothMap) -> Result<SmoothMap> {
        self.0.source.check_same(inner.target())?;
        let components = self
            .0
            .components
            .iter()
            .map(|c| c.compose(inner))
            .collect::<Result<Vec<_>>>()?;
        SmoothMap::new(inner.source(), &self.0.target, components)
    }
}

impl std::fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SmoothMap({} -> {})", self.0.source.name(), self.0.target.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_to_cartesian_jacobian() {
        let polar = Chart::new("polar", &["r", "th"]).unwrap();
        let cart = Chart::new("cart", &["x", "y"]).unwrap();
        let m = SmoothMap::parse(&polar, &cart, &["r*cos(th)", "r*sin(th)"]).unwrap();
        let p = [2.0, 0.6];
        let jac = m.jacobian(&p).unwrap();
        assert!((jac[(0, 0)] - 0.6_f64.cos()).abs() < 1e-14);
        assert!((jac[(0, 1)] + 2.0 * 0.6_f64.sin()).abs() < 1e-14);
        assert!((jac[(1, 0)] - 0.6_f64.sin()).abs() < 1e-14);
        assert!((jac[(1, 1)] - 2.0 * 0.6_f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn composition_matches_pointwise() {
        let a = Chart::new("a", &["u"]).unwrap();
        let b = Chart::new("b", &["v"]).unwrap();
        let c = Chart::new("c", &["w"]).unwrap();
        let m1 = SmoothMap::parse(&a, &b, &["u*u"]).unwrap();
        let m2 = SmoothMap::parse(&b, &c, &["sin(v)"]).unwrap();
        let m = m2.after(&m1).unwrap();
        let got = m.eval(&[1.3]).unwrap()[0];
        assert!((got - (1.3_f64 * 1.3).sin()).abs() < 1e-14);
    }
}
