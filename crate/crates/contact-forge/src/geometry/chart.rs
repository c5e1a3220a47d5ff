//! Coordinate charts.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::MAX_DIM;

type DomainPred = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

struct ChartData {
    name: String,
    coords: Vec<String>,
    periodic: Vec<bool>,
    domain: Option<DomainPred>,
}

/// A named coordinate chart.  Angle coordinates are evaluated on the
/// universal cover; the periodic flags only matter for injectivity and
/// containment checks.
#[derive(Clone)]
pub struct Chart(Arc<ChartData>);

impl Chart {
    pub fn new(name: &str, coords: &[&str]) -> Result<Chart> {
        Self::build(name, coords, vec![false; coords.len()], None)
    }

    pub fn with_periodic(name: &str, coords: &[&str], periodic: &[bool]) -> Result<Chart> {
        Self::build(name, coords, periodic.to_vec(), None)
    }

    pub fn with_domain(
        name: &str,
        coords: &[&str],
        periodic: &[bool],
        domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Result<Chart> {
        Self::build(name, coords, periodic.to_vec(), Some(Arc::new(domain) as DomainPred))
    }

    fn build(name: &str, coords: &[&str], periodic: Vec<bool>, domain: Option<DomainPred>) -> Result<Chart> {
        if coords.len() > MAX_DIM {
            return Err(Error::DimensionCap(coords.len()));
        }
        if coords.is_empty() {
            return Err(Error::DomainError {
                context: format!("chart `{name}`"),
                message: "a chart needs at least one coordinate".into(),
            });
        }
        let mut seen = coords.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != coords.len() {
            return Err(Error::DomainError {
                context: format!("chart `{name}`"),
                message: "coordinate names must be distinct".into(),
            });
        }
        assert_eq!(periodic.len(), coords.len());
        Ok(Chart(Arc::new(ChartData {
            name: name.to_string(),
            coords: coords.iter().map(|s| s.to_string()).collect(),
            periodic,
            domain,
        })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn dim(&self) -> usize {
        self.0.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.0.coords
    }

    pub fn periodic(&self) -> &[bool] {
        &self.0.periodic
    }

    pub fn index_of(&self, coord: &str) -> Option<usize> {
        self.0.coords.iter().position(|c| c == coord)
    }

    pub fn in_domain(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && self.0.domain.as_ref().map_or(true, |d| d(p))
    }

    /// Same chart, by identity or by equal name and coordinates.
    pub fn same_as(&self, other: &Chart) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.name == other.0.name && self.0.coords == other.0.coords)
    }

    pub fn check_same(&self, other: &Chart) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::ChartMismatch(self.name().to_string(), other.name().to_string()))
        }
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({} [{}])", self.0.name, self.0.coords.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_coordinates() {
        assert!(Chart::new("bad", &["x", "x"]).is_err());
    }

    #[test]
    fn rejects_dimension_above_cap() {
        let names: Vec<String> = (0..MAX_DIM + 1).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        assert!(matches!(Chart::new("big", &refs), Err(Error::DimensionCap(_))));
    }

    #[test]
    fn domain_predicate() {
        let c = Chart::with_domain("polar", &["r", "th"], &[false, true], |p| p[0] > 1e-3).unwrap();
        assert!(c.in_domain(&[1.0, 0.0]));
        assert!(!c.in_domain(&[0.0, 0.0]));
    }
}
