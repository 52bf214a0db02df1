//! Composite Gauss–Legendre rules on finite intervals.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes per panel of the composite rule.
pub const PANEL_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..(order + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared 16-point rule.
    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
    }
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if order == 0 {
        return (1.0, 0.0);
    }
    let n = order as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Interval and panel count of a composite Gauss–Legendre rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub lo: f64,
    pub hi: f64,
    pub panels: usize,
}

impl QuadratureSpec {
    pub fn new(lo: f64, hi: f64, panels: usize) -> Self {
        QuadratureSpec {
            lo,
            hi,
            panels: panels.max(1),
        }
    }

    pub fn node_count(&self) -> usize {
        self.panels * PANEL_ORDER
    }

    pub fn refined(&self) -> Self {
        QuadratureSpec {
            panels: self.panels * 2,
            ..*self
        }
    }

    /// Absolute nodes and weights.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let rule = GaussLegendre::standard();
        let width = (self.hi - self.lo) / self.panels as f64;
        let half = width / 2.0;
        let mut out = Vec::with_capacity(self.node_count());
        for k in 0..self.panels {
            let mid = self.lo + (k as f64 + 0.5) * width;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                out.push((mid + half * x, half * w));
            }
        }
        out
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.points().into_iter().map(|(x, w)| w * f(x)).sum()
    }
}
