//! Composite quadrature rules.

use std::num::NonZeroUsize;
use std::sync::{Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;

/// Reference Gauss–Legendre nodes on [-1, 1], cached by degree.
type NodeTable = std::sync::Arc<Vec<(f64, f64)>>;

fn reference_rule(degree: usize) -> NodeTable {
    static CACHE: OnceLock<Mutex<Vec<(usize, NodeTable)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    if let Some((_, rule)) = guard.iter().find(|(d, _)| *d == degree) {
        return rule.clone();
    }
    let degree_nz = NonZeroUsize::new(degree).expect("quadrature degree must be positive");
    let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(degree_nz)
        .as_node_weight_pairs()
        .to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rule = std::sync::Arc::new(pairs);
    guard.push((degree, rule.clone()));
    rule
}

/// Nodes and weights of a composite rule on a finite interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Gauss–Legendre rule of `degree` nodes repeated on `panels` equal
    /// sub-intervals of `[a, b]`.
    pub fn gauss_legendre(a: f64, b: f64, panels: usize, degree: usize) -> Self {
        let reference = reference_rule(degree);
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * degree);
        let mut weights = Vec::with_capacity(panels * degree);
        for p in 0..panels {
            let lo = a + width * p as f64;
            let half = 0.5 * width;
            let mid = lo + half;
            for &(x, w) in reference.iter() {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        Self { nodes, weights }
    }

    /// Uniform midpoint rule with `n` nodes on `[a, b]`.
    pub fn midpoint(a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / n as f64;
        Self {
            nodes: (0..n).map(|i| a + h * (i as f64 + 0.5)).collect(),
            weights: vec![h; n],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_complex<F: FnMut(f64) -> num_complex::Complex64>(
        &self,
        mut f: F,
    ) -> num_complex::Complex64 {
        self.iter().map(|(x, w)| f(x) * w).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = Rule::gauss_legendre(-1.0, 2.0, 3, 4);
        // degree 7 is exact for a 4-node rule on each panel
        let got = rule.integrate(|x| x.powi(7) - 3.0 * x.powi(2));
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert_relative_eq!(got, exact, max_relative = 1e-13);
    }

    #[test]
    fn gaussian_integral() {
        let rule = Rule::gauss_legendre(-10.0, 10.0, 20, 16);
        let got = rule.integrate(|x| (-x * x).exp());
        assert_relative_eq!(got, std::f64::consts::PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn midpoint_is_exact_for_trig_below_nyquist() {
        let tau = std::f64::consts::TAU;
        let rule = Rule::midpoint(0.0, tau, 64);
        let got = rule.integrate(|x| (5.0 * x).cos() + 1.0);
        assert_relative_eq!(got, tau, max_relative = 1e-14);
    }
}
