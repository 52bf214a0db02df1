//! Wigner functions of the variational ground state.
//!
//! With `G_c(x, p) = exp(−ξ(x − c)² − p²/ξ)` every component is a sum of
//! Gaussian lobes and fringe terms:
//!
//! ```text
//! W⁺x = (1/2π)[α²G_{D_α} + β²G_{−D_β} + 2αβ G_{(D_α−D_β)/2} cos((D_α+D_β)p)]
//! W⁻x(x, p) = W⁺x(−x, p)
//! W_D = (1/2π)[α²G_0 cos(2D_α p) + β²G_0 cos(2D_β p)
//!              + αβ(G_{(D_α+D_β)/2} + G_{−(D_α+D_β)/2}) cos((D_α−D_β)p)]
//! W_T = W⁺x + W⁻x,   W_E = W_T/2 + W_D,   W_O = W_T/2 − W_D
//! ```
//!
//! The alive semi-cat keeps the polaron lobe and the fringe ridge of W⁺x;
//! the dead semi-cat is its mirror image.

use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianComponent, GaussianState};
use crate::quadrature::QuadratureSpec;
use crate::variational::{trial_state, Branch, GroundStateSolution, VariationalParams};

/// Points per axis of the default grid.
pub const DEFAULT_GRID_POINTS: usize = 512;
/// Smallest grid accepted for a ground-state field.
pub const MIN_GRID_POINTS: usize = 64;
/// Largest |W| tolerated on the grid boundary when integrating.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;
/// Convergence target of the refined negativity.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-4;
const MAX_NEGATIVITY_REFINEMENTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl PhaseGrid {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, nx: usize, np: usize) -> Result<Self> {
        let grid = PhaseGrid { x_min, x_max, p_min, p_max, nx, np };
        grid.check_shape()?;
        Ok(grid)
    }

    fn check_shape(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.p_min, self.p_max].iter().all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.p_min >= self.p_max {
            return Err(Error::config(format!("degenerate phase grid {self:?}")));
        }
        if self.nx < 2 || self.np < 2 {
            return Err(Error::config("phase grid needs at least two points per axis"));
        }
        Ok(())
    }

    /// Default grid for a state: x ∈ ±(max|D| + 6/√ξ), p ∈ ±6·max(1, √ξ),
    /// 512 points per axis, with p refined further when fringes demand it.
    pub fn default_for(vp: &VariationalParams) -> Self {
        let (x_half, p_half) = half_spans(vp, 6.0);
        let mut np = DEFAULT_GRID_POINTS;
        if let Some(dp) = max_fringe_spacing(vp) {
            let needed = (2.0 * p_half / dp).ceil() as usize + 1;
            np = np.max(needed);
        }
        PhaseGrid { x_min: -x_half, x_max: x_half, p_min: -p_half, p_max: p_half, nx: DEFAULT_GRID_POINTS, np }
    }

    /// Check the size, span and fringe-resolution requirements for `vp`.
    pub fn validate_for(&self, vp: &VariationalParams) -> Result<()> {
        self.check_shape()?;
        if self.nx < MIN_GRID_POINTS || self.np < MIN_GRID_POINTS {
            return Err(Error::config(format!(
                "phase grid {}x{} is below the minimum {MIN_GRID_POINTS} points per axis",
                self.nx, self.np
            )));
        }
        let (x_half, p_half) = half_spans(vp, 5.0);
        let slack = 1e-12 * (1.0 + x_half);
        if self.x_min > -x_half + slack || self.x_max < x_half - slack {
            return Err(Error::config(format!("x range must cover ±{x_half}")));
        }
        if self.p_min > -p_half + slack || self.p_max < p_half - slack {
            return Err(Error::config(format!("p range must cover ±{p_half}")));
        }
        if let Some(dp) = max_fringe_spacing(vp) {
            if self.dp() > dp * (1.0 + 1e-12) {
                return Err(Error::config(format!(
                    "p spacing {} does not resolve fringes (needs ≤ {dp})",
                    self.dp()
                )));
            }
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn p(&self, j: usize) -> f64 {
        if j + 1 == self.np {
            self.p_max
        } else {
            self.p_min + j as f64 * self.dp()
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same extent with every interval halved.
    pub fn refined(&self) -> Self {
        PhaseGrid { nx: 2 * self.nx - 1, np: 2 * self.np - 1, ..*self }
    }

    /// Same extent with `nx × np` points.
    pub fn resampled(&self, nx: usize, np: usize) -> Self {
        PhaseGrid { nx, np, ..*self }
    }
}

fn half_spans(vp: &VariationalParams, widths: f64) -> (f64, f64) {
    let d = vp.d_alpha.abs().max(vp.d_beta.abs());
    (d + widths / vp.xi.sqrt(), widths * vp.xi.sqrt().max(1.0))
}

/// Largest p spacing that resolves the fastest fringe by 16 points per period.
fn max_fringe_spacing(vp: &VariationalParams) -> Option<f64> {
    let (a, b) = (vp.d_alpha, vp.d_beta);
    let f = [(a + b).abs(), (a - b).abs(), 2.0 * a.abs(), 2.0 * b.abs()]
        .into_iter()
        .fold(0.0, f64::max);
    (f > 0.0).then(|| PI / (8.0 * f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    PlusX,
    MinusX,
    Total,
    Even,
    Odd,
    Interference,
    Alive,
    Dead,
}

impl Component {
    pub const ALL: [Component; 8] = [
        Component::PlusX,
        Component::MinusX,
        Component::Total,
        Component::Even,
        Component::Odd,
        Component::Interference,
        Component::Alive,
        Component::Dead,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::PlusX => "W_plus_x",
            Component::MinusX => "W_minus_x",
            Component::Total => "W_T",
            Component::Even => "W_E",
            Component::Odd => "W_O",
            Component::Interference => "W_D",
            Component::Alive => "W_alive",
            Component::Dead => "W_dead",
        }
    }
}

impl std::str::FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim_start_matches("W_").to_ascii_lowercase();
        match key.as_str() {
            "plus_x" | "plus" => Ok(Component::PlusX),
            "minus_x" | "minus" => Ok(Component::MinusX),
            "t" | "total" => Ok(Component::Total),
            "e" | "even" => Ok(Component::Even),
            "o" | "odd" => Ok(Component::Odd),
            "d" | "interference" => Ok(Component::Interference),
            "alive" => Ok(Component::Alive),
            "dead" => Ok(Component::Dead),
            _ => Err(Error::config(format!("unknown Wigner component '{s}'"))),
        }
    }
}

/// One separable term `w·exp(−ξ(x − c)²)·exp(−p²/ξ)·cos(ωp)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub weight: f64,
    pub center: f64,
    pub omega: f64,
}

/// Closed-form evaluator for one set of variational parameters.
#[derive(Debug, Clone, Copy)]
pub struct WignerKernels {
    alpha: f64,
    beta: f64,
    xi: f64,
    d_alpha: f64,
    d_beta: f64,
}

impl WignerKernels {
    pub fn new(vp: &VariationalParams) -> Self {
        WignerKernels { alpha: vp.alpha, beta: vp.beta, xi: vp.xi, d_alpha: vp.d_alpha, d_beta: vp.d_beta }
    }

    fn plus_x(&self, mirror: bool) -> Vec<Term> {
        let (a, b, da, db) = (self.alpha, self.beta, self.d_alpha, self.d_beta);
        let s = if mirror { -1.0 } else { 1.0 };
        let k = 1.0 / (2.0 * PI);
        vec![
            Term { weight: k * a * a, center: s * da, omega: 0.0 },
            Term { weight: k * b * b, center: -s * db, omega: 0.0 },
            Term { weight: k * 2.0 * a * b, center: s * (da - db) / 2.0, omega: da + db },
        ]
    }

    fn interference(&self, scale: f64) -> Vec<Term> {
        let (a, b, da, db) = (self.alpha, self.beta, self.d_alpha, self.d_beta);
        let k = scale / (2.0 * PI);
        let mid = (da + db) / 2.0;
        vec![
            Term { weight: k * a * a, center: 0.0, omega: 2.0 * da },
            Term { weight: k * b * b, center: 0.0, omega: 2.0 * db },
            Term { weight: k * a * b, center: mid, omega: da - db },
            Term { weight: k * a * b, center: -mid, omega: da - db },
        ]
    }

    fn alive(&self, mirror: bool) -> Vec<Term> {
        let (a, b, da, db) = (self.alpha, self.beta, self.d_alpha, self.d_beta);
        let s = if mirror { -1.0 } else { 1.0 };
        vec![
            Term { weight: a * a / (2.0 * PI), center: s * da, omega: 0.0 },
            Term { weight: a * b / PI, center: s * (da - db) / 2.0, omega: da + db },
        ]
    }

    fn halved(terms: Vec<Term>) -> Vec<Term> {
        terms.into_iter().map(|t| Term { weight: 0.5 * t.weight, ..t }).collect()
    }

    /// Separable terms summing to `component`.
    pub fn terms(&self, component: Component) -> Vec<Term> {
        match component {
            Component::PlusX => self.plus_x(false),
            Component::MinusX => self.plus_x(true),
            Component::Total => [self.plus_x(false), self.plus_x(true)].concat(),
            Component::Even => [
                Self::halved([self.plus_x(false), self.plus_x(true)].concat()),
                self.interference(1.0),
            ]
            .concat(),
            Component::Odd => [
                Self::halved([self.plus_x(false), self.plus_x(true)].concat()),
                self.interference(-1.0),
            ]
            .concat(),
            Component::Interference => self.interference(1.0),
            Component::Alive => self.alive(false),
            Component::Dead => self.alive(true),
        }
    }

    pub fn eval(&self, component: Component, x: f64, p: f64) -> f64 {
        let gp = (-p * p / self.xi).exp();
        self.terms(component)
            .iter()
            .map(|t| t.weight * (-self.xi * (x - t.center).powi(2)).exp() * gp * (t.omega * p).cos())
            .sum()
    }
}

/// Term factors tabulated on the grid axes.
struct Tabulated {
    x_factors: Vec<Vec<f64>>,
    p_factors: Vec<Vec<f64>>,
}

impl Tabulated {
    fn new(vp: &VariationalParams, component: Component, grid: &PhaseGrid) -> Self {
        let terms = WignerKernels::new(vp).terms(component);
        let xi = vp.xi;
        let x_factors = terms
            .iter()
            .map(|t| (0..grid.nx).map(|i| t.weight * (-xi * (grid.x(i) - t.center).powi(2)).exp()).collect())
            .collect();
        let p_factors = terms
            .iter()
            .map(|t| {
                (0..grid.np)
                    .map(|j| {
                        let p = grid.p(j);
                        (-p * p / xi).exp() * (t.omega * p).cos()
                    })
                    .collect()
            })
            .collect();
        Tabulated { x_factors, p_factors }
    }

    fn row(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (xf, pf) in self.x_factors.iter().zip(&self.p_factors) {
            let b = pf[j];
            for (v, a) in out.iter_mut().zip(xf) {
                *v += a * b;
            }
        }
    }
}

/// One closed-form component on a grid, rows indexed by p.
pub fn analytic_component(vp: &VariationalParams, component: Component, grid: &PhaseGrid) -> Vec<f64> {
    let tab = Tabulated::new(vp, component, grid);
    let mut values = vec![0.0; grid.len()];
    values
        .par_chunks_mut(grid.nx)
        .enumerate()
        .for_each(|(j, row)| tab.row(j, row));
    values
}

/// All named components on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    pub grid: PhaseGrid,
    pub components: Vec<(Component, Vec<f64>)>,
}

impl WignerField {
    pub fn get(&self, component: Component) -> &[f64] {
        self.components
            .iter()
            .find(|(c, _)| *c == component)
            .map(|(_, v)| v.as_slice())
            .expect("every component is evaluated")
    }
}

/// Evaluate every component for a solution on a validated grid.
pub fn analytic_field(solution: &GroundStateSolution, grid: &PhaseGrid) -> Result<WignerField> {
    let vp = &solution.params;
    grid.validate_for(vp)?;
    let components = Component::ALL
        .iter()
        .map(|&c| (c, analytic_component(vp, c, grid)))
        .collect();
    Ok(WignerField { grid: *grid, components })
}

/// `W(x, p) = (1/π)∫ψ(x − y)ψ(x + y)cos(2yp) dy` by composite Gauss–Legendre
/// over y, checked against one panel doubling.
pub fn numeric_field(state: &GaussianState, grid: &PhaseGrid) -> Result<Vec<f64>> {
    grid.check_shape()?;
    let spec = state.quadrature_spec();
    let reach = spec.hi;
    let p_top = grid.p_min.abs().max(grid.p_max.abs()).max(1.0);
    let width = (0.35 / state.squeeze().sqrt()).min(PI / (2.0 * p_top));
    let coarse = QuadratureSpec::new(0.0, reach, (reach / width).ceil() as usize);
    let fine = coarse.refined();
    let (cp, fp) = (coarse.points(), fine.points());
    let transform = |pts: &[(f64, f64)], x: f64, p: f64| -> f64 {
        2.0 / PI * pts
            .iter()
            .map(|&(y, w)| w * state.eval(x - y) * state.eval(x + y) * (2.0 * y * p).cos())
            .sum::<f64>()
    };
    let pairs = fill_pairs(grid, |x, p| (transform(&cp, x, p), transform(&fp, x, p)));
    let mut worst = 0.0f64;
    let values = pairs
        .into_iter()
        .map(|(c, f)| {
            worst = worst.max((c - f).abs());
            f
        })
        .collect();
    if worst > 1e-10 {
        return Err(Error::Numerical {
            what: "Wigner transform quadrature".into(),
            last_change: worst,
            iterations: 1,
        });
    }
    Ok(values)
}

fn fill_pairs<F: Fn(f64, f64) -> (f64, f64) + Sync>(grid: &PhaseGrid, f: F) -> Vec<(f64, f64)> {
    let mut values = vec![(0.0, 0.0); grid.len()];
    values.par_chunks_mut(grid.nx).enumerate().for_each(|(j, row)| {
        let p = grid.p(j);
        for (i, v) in row.iter_mut().enumerate() {
            *v = f(grid.x(i), p);
        }
    });
    values
}

/// A component assembled from transforms of the wavefunctions, independent
/// of the closed forms.
pub fn numeric_component(vp: &VariationalParams, component: Component, grid: &PhaseGrid) -> Result<Vec<f64>> {
    let scaled = |branch: Branch, s: f64| -> Result<Vec<f64>> {
        Ok(numeric_field(&trial_state(vp, branch), grid)?.into_iter().map(|v| s * v).collect())
    };
    let combine = |a: Vec<f64>, b: Vec<f64>, s: f64| -> Vec<f64> {
        a.into_iter().zip(b).map(|(u, v)| u + s * v).collect()
    };
    match component {
        Component::PlusX => scaled(Branch::Plus, 0.5),
        Component::MinusX => scaled(Branch::Minus, 0.5),
        Component::Total => Ok(combine(scaled(Branch::Plus, 0.5)?, scaled(Branch::Minus, 0.5)?, 1.0)),
        Component::Even => scaled(Branch::Even, 0.25),
        Component::Odd => scaled(Branch::Odd, 0.25),
        Component::Interference => {
            Ok(combine(scaled(Branch::Even, 0.125)?, scaled(Branch::Odd, 0.125)?, -1.0))
        }
        Component::Alive | Component::Dead => {
            let sign = if component == Component::Alive { 1.0 } else { -1.0 };
            let psi = GaussianState::new(
                vp.xi,
                vec![
                    GaussianComponent { weight: vp.alpha, center: sign * vp.d_alpha },
                    GaussianComponent { weight: vp.beta, center: -sign * vp.d_beta },
                ],
            )?;
            let anti = GaussianState::single(vp.xi, -sign * vp.d_beta)?;
            let full = numeric_field(&psi, grid)?;
            let lobe = numeric_field(&anti, grid)?;
            Ok(combine(full, lobe, -vp.beta * vp.beta).into_iter().map(|v| 0.5 * v).collect())
        }
    }
}

/// Composite Simpson weights on `n` equally spaced points; an even point
/// count closes with a 3/8 panel.
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    match n {
        0 | 1 => return w,
        2 => {
            w[0] = h / 2.0;
            w[1] = h / 2.0;
            return w;
        }
        _ => {}
    }
    let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
    let mut k = 0;
    while k + 2 <= simpson_end {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
        k += 2;
    }
    if n % 2 == 0 {
        let s = n - 4;
        for (off, c) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
            w[s + off] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// `∬ f(W) dx dp` by 2-D composite Simpson.
pub fn integrate_grid<F: Fn(f64) -> f64>(values: &[f64], grid: &PhaseGrid, f: F) -> f64 {
    let wx = simpson_weights(grid.nx, grid.dx());
    let wp = simpson_weights(grid.np, grid.dp());
    values
        .chunks(grid.nx)
        .zip(&wp)
        .map(|(row, wj)| wj * row.iter().zip(&wx).map(|(v, wi)| wi * f(*v)).sum::<f64>())
        .sum()
}

fn check_boundary(values: &[f64], grid: &PhaseGrid) -> Result<()> {
    let (nx, np) = (grid.nx, grid.np);
    let edge = (0..nx)
        .flat_map(|i| [values[i], values[(np - 1) * nx + i]])
        .chain((0..np).flat_map(|j| [values[j * nx], values[j * nx + nx - 1]]))
        .fold(0.0f64, |a, v| a.max(v.abs()));
    if edge >= BOUNDARY_TOLERANCE {
        return Err(Error::config(format!(
            "Wigner field reaches {edge:.3e} on the grid boundary; widen the grid"
        )));
    }
    Ok(())
}

/// `δ = ∬(|W| − W) dx dp` of a sampled component.
pub fn negativity(values: &[f64], grid: &PhaseGrid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::config(format!(
            "field has {} values but the grid has {}",
            values.len(),
            grid.len()
        )));
    }
    check_boundary(values, grid)?;
    Ok(integrate_grid(values, grid, |w| w.abs() - w).max(0.0))
}

/// Negativity of a closed-form component evaluated row by row, so large
/// grids are never stored.
fn streamed_negativity(vp: &VariationalParams, component: Component, grid: &PhaseGrid) -> Result<f64> {
    let tab = Tabulated::new(vp, component, grid);
    let wx = simpson_weights(grid.nx, grid.dx());
    let wp = simpson_weights(grid.np, grid.dp());
    let mut row = vec![0.0; grid.nx];
    let mut total = 0.0;
    let mut edge = 0.0f64;
    for (j, wj) in wp.iter().enumerate() {
        tab.row(j, &mut row);
        if j == 0 || j + 1 == grid.np {
            edge = row.iter().fold(edge, |a, v| a.max(v.abs()));
        } else {
            edge = edge.max(row[0].abs()).max(row[grid.nx - 1].abs());
        }
        total += wj * row.iter().zip(&wx).map(|(v, wi)| wi * (v.abs() - v)).sum::<f64>();
    }
    if edge >= BOUNDARY_TOLERANCE {
        return Err(Error::config(format!(
            "Wigner field reaches {edge:.3e} on the grid boundary; widen the grid"
        )));
    }
    Ok(total.max(0.0))
}

/// Negativity of a closed-form component, doubling the grid resolution
/// until successive values differ by less than [`NEGATIVITY_TOLERANCE`].
pub fn refined_negativity(vp: &VariationalParams, component: Component, grid: &PhaseGrid) -> Result<f64> {
    let mut g = *grid;
    let mut last = streamed_negativity(vp, component, &g)?;
    let mut change = f64::INFINITY;
    for _ in 0..MAX_NEGATIVITY_REFINEMENTS {
        g = g.refined();
        let next = streamed_negativity(vp, component, &g)?;
        change = (next - last).abs();
        last = next;
        if change < NEGATIVITY_TOLERANCE {
            return Ok(last);
        }
    }
    Err(Error::Numerical {
        what: "Wigner negativity".into(),
        last_change: change,
        iterations: MAX_NEGATIVITY_REFINEMENTS,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Negativities {
    /// δ of the full σz-basis state.
    pub total: f64,
    /// δ of the even cat ψ_E component.
    pub even: f64,
    /// δ of the odd cat ψ_O component.
    pub odd: f64,
}

/// Negativities of `W_T`, `W_E`, `W_O` on the default grid.
pub fn ground_state_negativities(vp: &VariationalParams) -> Result<Negativities> {
    let grid = PhaseGrid::default_for(vp);
    Ok(Negativities {
        total: refined_negativity(vp, Component::Total, &grid)?,
        even: refined_negativity(vp, Component::Even, &grid)?,
        odd: refined_negativity(vp, Component::Odd, &grid)?,
    })
}

/// Write a sampled field as CSV: two header lines, then one row per p.
pub fn write_grid_csv<W: Write>(mut out: W, grid: &PhaseGrid, values: &[f64]) -> std::io::Result<()> {
    writeln!(out, "# x: {:?} {:?} {}", grid.x_min, grid.x_max, grid.nx)?;
    writeln!(out, "# p: {:?} {:?} {}", grid.p_min, grid.p_max, grid.np)?;
    let mut line = String::new();
    for row in values.chunks(grid.nx) {
        line.clear();
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v:?}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn parse_axis(line: Option<std::io::Result<String>>, name: &str) -> Result<(f64, f64, usize)> {
    let line = line
        .ok_or_else(|| Error::Parse(format!("missing '# {name}:' header")))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let rest = line
        .strip_prefix(&format!("# {name}:"))
        .ok_or_else(|| Error::Parse(format!("expected '# {name}:' header, got '{line}'")))?;
    let parts: Vec<&str> = rest.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("axis header '{line}' needs min max count")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("'{s}': {e}")));
    let count = parts[2].parse::<usize>().map_err(|e| Error::Parse(format!("'{}': {e}", parts[2])))?;
    Ok((num(parts[0])?, num(parts[1])?, count))
}

pub fn read_grid_csv<R: BufRead>(input: R) -> Result<(PhaseGrid, Vec<f64>)> {
    let mut lines = input.lines();
    let (x_min, x_max, nx) = parse_axis(lines.next(), "x")?;
    let (p_min, p_max, np) = parse_axis(lines.next(), "p")?;
    let grid = PhaseGrid::new(x_min, x_max, p_min, p_max, nx, np)?;
    let mut values = Vec::with_capacity(grid.len());
    for (j, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let before = values.len();
        for field in line.split(',') {
            values.push(field.parse::<f64>().map_err(|e| Error::Parse(format!("row {j}: '{field}': {e}")))?);
        }
        if values.len() - before != nx {
            return Err(Error::Parse(format!("row {j} has {} values, expected {nx}", values.len() - before)));
        }
    }
    if values.len() != grid.len() {
        return Err(Error::Parse(format!("expected {np} rows, got {}", values.len() / nx)));
    }
    Ok((grid, values))
}

pub fn save_grid(path: &Path, grid: &PhaseGrid, values: &[f64]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_grid_csv(&mut w, grid, values).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_grid(path: &Path) -> Result<(PhaseGrid, Vec<f64>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_grid_csv(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_grid(vp: &VariationalParams, n: usize) -> PhaseGrid {
        PhaseGrid::default_for(vp).resampled(n, n)
    }

    #[test]
    fn vacuum_field() {
        let vp = VariationalParams::new(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let grid = PhaseGrid::default_for(&vp);
        assert_eq!((grid.nx, grid.np), (512, 512));
        let w = analytic_component(&vp, Component::Total, &grid);
        for j in (0..grid.np).step_by(37) {
            for i in (0..grid.nx).step_by(41) {
                let (x, p) = (grid.x(i), grid.p(j));
                let want = (-x * x - p * p).exp() / PI;
                assert!((w[j * grid.nx + i] - want).abs() < 1e-15);
            }
        }
        let n = numeric_field(&GaussianState::single(1.0, 0.0).unwrap(), &small_grid(&vp, 33)).unwrap();
        let g = small_grid(&vp, 33);
        for (k, v) in n.iter().enumerate() {
            let (x, p) = (g.x(k % 33), g.p(k / 33));
            assert!((v - (-x * x - p * p).exp() / PI).abs() < 1e-8);
        }
    }

    #[test]
    fn simpson_weights_integrate_cubics() {
        for n in [3, 4, 5, 8, 9, 64, 65] {
            let h = 2.0 / (n - 1) as f64;
            let w = simpson_weights(n, h);
            let s: f64 = w.iter().enumerate().map(|(i, wi)| wi * (-1.0 + i as f64 * h).powi(3)).sum();
            let s2: f64 = w.iter().enumerate().map(|(i, wi)| wi * (-1.0 + i as f64 * h).powi(2)).sum();
            assert!(s.abs() < 1e-14, "n={n}");
            assert!((s2 - 2.0 / 3.0).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn even_cat_fringe_zeros() {
        // Φ⁺ with D = 2: W_D ∝ cos(4p) at x = 0.
        let vp = VariationalParams::new(1.0, 1.0, 1.0, 1.0, 2.0).unwrap();
        let k = WignerKernels::new(&vp);
        let p0 = PI / 8.0;
        assert!(k.eval(Component::Interference, 0.0, p0).abs() < 1e-16);
        assert!(k.eval(Component::Interference, 0.0, 3.0 * p0).abs() < 1e-16);
        assert!(k.eval(Component::Interference, 0.0, 0.0) > 0.0);
        assert!(k.eval(Component::Interference, 0.0, 2.0 * p0) < 0.0);
    }

    #[test]
    fn normalisations() {
        let vp = VariationalParams::new(0.93, 0.7, 0.9, 0.6, 3.0).unwrap();
        let grid = PhaseGrid::default_for(&vp);
        grid.validate_for(&vp).unwrap();
        let total = integrate_grid(&analytic_component(&vp, Component::Total, &grid), &grid, |w| w);
        assert!((total - 1.0).abs() < 1e-8);
        let (up, down) = crate::observables::spin_probabilities(&vp);
        let even = integrate_grid(&analytic_component(&vp, Component::Even, &grid), &grid, |w| w);
        let odd = integrate_grid(&analytic_component(&vp, Component::Odd, &grid), &grid, |w| w);
        assert!((even - down).abs() < 1e-8);
        assert!((odd - up).abs() < 1e-8);
    }

    #[test]
    fn grid_validation() {
        let vp = VariationalParams::new(0.95, 0.8, 1.0, 1.0, 4.0).unwrap();
        let grid = PhaseGrid::default_for(&vp);
        assert!(grid.validate_for(&vp).is_ok());
        assert!(grid.resampled(32, grid.np).validate_for(&vp).is_err());
        assert!(grid.resampled(512, 64).validate_for(&vp).is_err());
        let narrow = PhaseGrid { x_min: -2.0, x_max: 2.0, ..grid };
        assert!(narrow.validate_for(&vp).is_err());
        assert!(PhaseGrid::new(1.0, -1.0, -1.0, 1.0, 64, 64).is_err());
    }

    #[test]
    fn gaussian_components_have_no_negativity() {
        for xi in [1.0, 0.3, 2.0] {
            let vp = VariationalParams::new(1.0, xi, 0.0, 0.0, 1.0).unwrap();
            let grid = PhaseGrid::default_for(&vp);
            let w = analytic_component(&vp, Component::Total, &grid);
            assert!(negativity(&w, &grid).unwrap() < 1e-6);
        }
    }

    #[test]
    fn truncated_support_is_rejected() {
        let vp = VariationalParams::new(1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let grid = PhaseGrid::new(-2.0, 2.0, -2.0, 2.0, 65, 65).unwrap();
        let w = analytic_component(&vp, Component::Total, &grid);
        assert!(matches!(negativity(&w, &grid), Err(Error::Config(_))));
    }

    #[test]
    fn cat_negativity_converges() {
        let vp = VariationalParams::new(1.0, 1.0, 1.0, 1.0, 2.5).unwrap();
        let grid = PhaseGrid::default_for(&vp);
        let odd = refined_negativity(&vp, Component::Odd, &grid).unwrap();
        assert!(odd > 0.05);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let vp = VariationalParams::new(0.9, 0.6, 1.2, 0.8, 2.0).unwrap();
        let grid = PhaseGrid::default_for(&vp).resampled(70, 66);
        let mut w = analytic_component(&vp, Component::Odd, &grid);
        w[3] = 1e-300;
        w[4] = -0.0;
        w[5] = 5e-324;
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &grid, &w).unwrap();
        let (g2, w2) = read_grid_csv(buf.as_slice()).unwrap();
        assert_eq!(g2, grid);
        assert_eq!(w.len(), w2.len());
        for (a, b) in w.iter().zip(&w2) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(read_grid_csv("# x: 0 1 2\n".as_bytes()).is_err());
        assert!(read_grid_csv("# x: 0 1 2\n# p: 0 1 2\n1,2\n3\n".as_bytes()).is_err());
        assert!(read_grid_csv("# x: 0 1 2\n# p: 0 1 2\n1,2\n3,abc\n".as_bytes()).is_err());
        assert!(read_grid_csv("# x: 0 1 2\n# p: 0 1 2\n1,2\n3,4\n".as_bytes()).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn closed_forms_match_transform(
            a in 0.3f64..=1.0, xi in 0.2f64..2.5, za in 0.0f64..1.2, zb in -0.5f64..1.2, gp in 0.5f64..3.0,
            which in 0usize..8,
        ) {
            let vp = VariationalParams::new(a, xi, za, zb, gp).unwrap();
            let grid = small_grid(&vp, 21);
            let c = Component::ALL[which];
            let closed = analytic_component(&vp, c, &grid);
            let numeric = numeric_component(&vp, c, &grid).unwrap();
            let err = closed.iter().zip(&numeric).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
            prop_assert!(err < 1e-9, "{:?}: {}", c, err);
        }

        #[test]
        fn symmetries_and_identities(
            a in 0.3f64..=1.0, xi in 0.2f64..2.5, za in 0.0f64..1.2, zb in -0.5f64..1.2, gp in 0.5f64..3.0,
            x in -5.0f64..5.0, p in -4.0f64..4.0,
        ) {
            let vp = VariationalParams::new(a, xi, za, zb, gp).unwrap();
            let k = WignerKernels::new(&vp);
            let e = |c, x, p| k.eval(c, x, p);
            prop_assert_eq!(e(Component::PlusX, x, p), e(Component::MinusX, -x, p));
            prop_assert_eq!(e(Component::Alive, x, p), e(Component::Dead, -x, p));
            prop_assert!((e(Component::Total, x, p) - e(Component::Total, -x, p)).abs() < 1e-15);
            for c in Component::ALL {
                prop_assert!((e(c, x, p) - e(c, x, -p)).abs() < 1e-15);
            }
            let t = e(Component::Total, x, p);
            prop_assert!((e(Component::Even, x, p) + e(Component::Odd, x, p) - t).abs() < 1e-14);
            let d = e(Component::Even, x, p) - e(Component::Odd, x, p);
            prop_assert!((d - 2.0 * e(Component::Interference, x, p)).abs() < 1e-14);
        }
    }
}
