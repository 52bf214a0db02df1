//! Polaron/antipolaron variational ground state.
//!
//! The trial state is
//!
//! ```text
//! Ψ = (ψ(x)|s⟩ − ψ(−x)|s̄⟩)/√2,   ψ = α φ_ξ(x − D_α) + β φ_ξ(x + D_β)
//! ```
//!
//! where `|s⟩` is the σx branch whose well sits at x = +g′, φ_ξ a unit
//! Gaussian of squeeze ξ, and `D = ζ·g′`. Normalisation fixes β given α, so
//! the free parameters are {α, ξ, ζ_α, ζ_β}. The energy is
//!
//! ```text
//! E = ⟨ψ| ½[p² + (x − g′)²] |ψ⟩ − (Δ/2)⟨ψ(x)|ψ(−x)⟩ + ε₀.
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_diag::{solve_ground, DEFAULT_ENERGY_TOL};
use crate::gaussian::{overlap_unchecked, GaussianComponent, GaussianState};
use crate::model::{hamiltonian_sigma_x, ModelParams, SpinX};
use crate::optimize::{nelder_mead, NelderMeadOptions, Termination};

/// σx branch hosting ψ₊ (well centre +g′).
pub const POLARON_BRANCH: SpinX = SpinX::Down;

/// Smallest admissible polaron weight.
const ALPHA_MIN: f64 = 1e-9;

/// β solving `α² + β² + 2αβt = 1`, taking the root that vanishes at α = 1.
pub fn beta_from_normalization(alpha: f64, t: f64) -> f64 {
    let disc = (alpha * alpha * t * t - alpha * alpha + 1.0).max(0.0);
    let beta = -alpha * t + disc.sqrt();
    if alpha >= 1.0 {
        0.0
    } else {
        beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalParams {
    pub alpha: f64,
    pub beta: f64,
    pub xi: f64,
    pub zeta_alpha: f64,
    pub zeta_beta: f64,
    pub d_alpha: f64,
    pub d_beta: f64,
    /// √(αβ).
    pub gamma: f64,
}

impl VariationalParams {
    /// Normalised parameters; β follows from the constraint.
    pub fn new(alpha: f64, xi: f64, zeta_alpha: f64, zeta_beta: f64, g_prime: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(xi > 0.0) || !xi.is_finite() {
            return Err(Error::domain(format!("squeeze must be positive, got {xi}")));
        }
        if !zeta_alpha.is_finite() || !zeta_beta.is_finite() || !g_prime.is_finite() {
            return Err(Error::domain("non-finite displacement"));
        }
        Ok(Self::assemble(alpha, xi, zeta_alpha, zeta_beta, g_prime))
    }

    fn assemble(alpha: f64, xi: f64, zeta_alpha: f64, zeta_beta: f64, g_prime: f64) -> Self {
        let d_alpha = zeta_alpha * g_prime;
        let d_beta = zeta_beta * g_prime;
        let t = overlap_unchecked(d_alpha, -d_beta, xi);
        let beta = beta_from_normalization(alpha, t);
        VariationalParams {
            alpha,
            beta,
            xi,
            zeta_alpha,
            zeta_beta,
            d_alpha,
            d_beta,
            gamma: (alpha * beta).max(0.0).sqrt(),
        }
    }

    /// `⟨ψ|ψ⟩ − 1`.
    pub fn normalization_residual(&self) -> f64 {
        trial_state(self, Branch::Plus).norm_sq() - 1.0
    }

    /// Relabel (α, D_α) ↔ (β, −D_β) so that the polaron displacement is
    /// non-negative; the wavefunction is unchanged.
    pub fn canonical(&self) -> Self {
        if self.d_alpha >= 0.0 || self.beta <= 0.0 {
            return *self;
        }
        VariationalParams {
            alpha: self.beta,
            beta: self.alpha,
            xi: self.xi,
            zeta_alpha: -self.zeta_beta,
            zeta_beta: -self.zeta_alpha,
            d_alpha: -self.d_beta,
            d_beta: -self.d_alpha,
            gamma: self.gamma,
        }
    }
}

/// Pieces of the trial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// ψ₊ = ψ(x).
    Plus,
    /// ψ₋ = ψ(−x).
    Minus,
    /// ψ_E = ψ₊ + ψ₋, paired with spin down in the σz basis.
    Even,
    /// ψ_O = ψ₊ − ψ₋, paired with spin up.
    Odd,
    /// Unit polaron at +D_α.
    Polaron,
    /// Unit antipolaron at −D_β.
    Antipolaron,
}

pub fn trial_state(vp: &VariationalParams, branch: Branch) -> GaussianState {
    let comp = |weight, center| GaussianComponent { weight, center };
    let plus = vec![comp(vp.alpha, vp.d_alpha), comp(vp.beta, -vp.d_beta)];
    let minus = vec![comp(vp.alpha, -vp.d_alpha), comp(vp.beta, vp.d_beta)];
    let components = match branch {
        Branch::Plus => plus,
        Branch::Minus => minus,
        Branch::Even => plus.into_iter().chain(minus).collect(),
        Branch::Odd => plus
            .into_iter()
            .chain(minus.into_iter().map(|c| comp(-c.weight, c.center)))
            .collect(),
        Branch::Polaron => vec![comp(1.0, vp.d_alpha)],
        Branch::Antipolaron => vec![comp(1.0, -vp.d_beta)],
    };
    GaussianState::new(vp.xi, components).expect("variational parameters are validated")
}

/// Variational energy `⟨Ψ|H|Ψ⟩` of normalised parameters.
pub fn energy(vp: &VariationalParams, model: &ModelParams) -> f64 {
    let well = hamiltonian_sigma_x(model, POLARON_BRANCH).center;
    let psi = trial_state(vp, Branch::Plus);
    psi.oscillator_energy(well) - model.delta / 2.0 * psi.parity_overlap() + model.eps0
}

/// The same energy written for ψ₋ in the mirrored well.
pub fn mirrored_energy(vp: &VariationalParams, model: &ModelParams) -> f64 {
    let well = hamiltonian_sigma_x(model, POLARON_BRANCH.flipped()).center;
    let psi = trial_state(vp, Branch::Minus);
    psi.oscillator_energy(well) - model.delta / 2.0 * psi.parity_overlap() + model.eps0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ansatz {
    /// Free {α, ξ, ζ_α, ζ_β}.
    #[serde(rename = "full4")]
    Full,
    /// ζ_β = ζ_α; free {α, ξ, ζ}.
    #[serde(rename = "eq19")]
    EqualDisplacement,
    /// α = 1, ξ = 1; free {ζ_α}.
    #[serde(rename = "eq15")]
    SinglePolaron,
}

impl Ansatz {
    pub fn label(self) -> &'static str {
        match self {
            Ansatz::Full => "full4",
            Ansatz::EqualDisplacement => "eq19",
            Ansatz::SinglePolaron => "eq15",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            Ansatz::Full => 4,
            Ansatz::EqualDisplacement => 3,
            Ansatz::SinglePolaron => 1,
        }
    }

    fn restriction(self) -> Option<Ansatz> {
        match self {
            Ansatz::Full => Some(Ansatz::EqualDisplacement),
            Ansatz::EqualDisplacement => Some(Ansatz::SinglePolaron),
            Ansatz::SinglePolaron => None,
        }
    }

    fn params_from_coords(self, x: &[f64], g_prime: f64) -> VariationalParams {
        let alpha_of = |u: f64| u.sin().powi(2).clamp(ALPHA_MIN, 1.0);
        let xi_of = |l: f64| l.clamp(-20.0, 20.0).exp();
        match self {
            Ansatz::Full => {
                VariationalParams::assemble(alpha_of(x[0]), xi_of(x[1]), x[2], x[3], g_prime)
            }
            Ansatz::EqualDisplacement => {
                VariationalParams::assemble(alpha_of(x[0]), xi_of(x[1]), x[2], x[2], g_prime)
            }
            Ansatz::SinglePolaron => VariationalParams::assemble(1.0, 1.0, x[0], x[0], g_prime),
        }
    }

    fn coords_from_params(self, vp: &VariationalParams) -> Vec<f64> {
        let u = vp.alpha.clamp(ALPHA_MIN, 1.0).sqrt().asin();
        let l = vp.xi.ln();
        match self {
            Ansatz::Full => vec![u, l, vp.zeta_alpha, vp.zeta_beta],
            Ansatz::EqualDisplacement => vec![u, l, vp.zeta_alpha],
            Ansatz::SinglePolaron => vec![vp.zeta_alpha],
        }
    }

    /// Initial simplex edges; the ζ edge moves D by about 0.3 whatever g′ is.
    fn steps(self, g_prime: f64) -> Vec<f64> {
        let z = 0.1 / (g_prime / 3.0).max(1.0);
        match self {
            Ansatz::Full => vec![0.2, 0.2, z, z],
            Ansatz::EqualDisplacement => vec![0.2, 0.2, z],
            Ansatz::SinglePolaron => vec![z],
        }
    }
}

impl std::str::FromStr for Ansatz {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full4" | "full" => Ok(Ansatz::Full),
            "eq19" | "equal-displacement" => Ok(Ansatz::EqualDisplacement),
            "eq15" | "single-polaron" => Ok(Ansatz::SinglePolaron),
            other => Err(Error::config(format!("unknown ansatz '{other}'"))),
        }
    }
}

impl std::fmt::Display for Ansatz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_evals: usize,
    pub restarts: usize,
    pub warm_start: Option<VariationalParams>,
    /// Fill `ed_energy`/`energy_error` from exact diagonalisation.
    pub compare_exact: bool,
    pub ed_energy_tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            f_tol: 1e-10,
            x_tol: 1e-8,
            max_evals: 20_000,
            restarts: 2,
            warm_start: None,
            compare_exact: true,
            ed_energy_tol: DEFAULT_ENERGY_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub seed: String,
    pub start_energy: f64,
    pub final_energy: f64,
    pub evaluations: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    ConvergedWithWarning(String),
}

impl SolveStatus {
    pub fn is_clean(&self) -> bool {
        matches!(self, SolveStatus::Converged)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateSolution {
    pub model: ModelParams,
    pub ansatz: Ansatz,
    pub params: VariationalParams,
    pub energy: f64,
    pub status: SolveStatus,
    pub trace: Vec<TraceEntry>,
    pub ed_energy: Option<f64>,
    /// `|E − E_exact| / |E_exact|`.
    pub energy_error: Option<f64>,
}

/// Mean-field displacement factor `√max(0, 1 − (g_c/g)⁴)`.
pub fn mean_field_zeta(model: &ModelParams) -> f64 {
    if model.g <= 0.0 {
        return 0.0;
    }
    (1.0 - (model.g_c / model.g).powi(4)).max(0.0).sqrt()
}

fn seed_params(model: &ModelParams, opts: &MinimizeOptions) -> Vec<(String, VariationalParams)> {
    let gp = model.g_prime;
    let z = mean_field_zeta(model);
    let mut seeds = vec![
        ("normal".to_string(), VariationalParams::assemble(0.9, 1.0, 0.0, 0.0, gp)),
        ("superradiant".to_string(), VariationalParams::assemble(0.9, 1.0, z, z, gp)),
        (
            "squeezed".to_string(),
            VariationalParams::assemble(0.6, (-0.7f64).exp(), 0.1 + z, 0.1 + z, gp),
        ),
    ];
    if let Some(w) = opts.warm_start {
        seeds.push((
            "warm".to_string(),
            VariationalParams::assemble(w.alpha, w.xi, w.zeta_alpha, w.zeta_beta, gp),
        ));
    }
    seeds
}

fn minimize_variational(
    model: &ModelParams,
    ansatz: Ansatz,
    opts: &MinimizeOptions,
) -> (VariationalParams, f64, Vec<TraceEntry>, Termination) {
    let gp = model.g_prime;
    let mut seeds = seed_params(model, opts);
    let mut trace = Vec::new();
    if let Some(inner) = ansatz.restriction() {
        let (p, _, inner_trace, _) = minimize_variational(model, inner, opts);
        trace.extend(inner_trace);
        seeds.push((format!("nested-{}", inner.label()), p));
    }
    let nm = NelderMeadOptions {
        step: ansatz.steps(gp),
        max_evals: opts.max_evals,
        f_tol: opts.f_tol,
        x_tol: opts.x_tol,
        restarts: opts.restarts,
    };
    let objective = |x: &[f64]| {
        let vp = ansatz.params_from_coords(x, gp);
        let e = energy(&vp, model);
        if e.is_finite() {
            e
        } else {
            f64::INFINITY
        }
    };
    let mut best: Option<(Vec<f64>, f64, Termination)> = None;
    for (label, seed) in seeds {
        let x0 = ansatz.coords_from_params(&seed);
        let start_energy = objective(&x0);
        let r = nelder_mead(objective, &x0, &nm);
        trace.push(TraceEntry {
            seed: format!("{}:{label}", ansatz.label()),
            start_energy,
            final_energy: r.f,
            evaluations: r.evaluations,
            termination: r.termination,
        });
        if best.as_ref().map_or(true, |b| r.f < b.1) {
            best = Some((r.x, r.f, r.termination));
        }
    }
    let (x, f, term) = best.expect("at least one seed");
    let vp = ansatz.params_from_coords(&x, gp).canonical();
    (vp, f, trace, term)
}

/// Minimise the variational energy of `ansatz` for `model`.
///
/// Seeds: the normal-phase state, the mean-field superradiant displacement,
/// a squeezed start, the optimum of the next-smaller ansatz, and an optional
/// warm start; each is polished by Nelder–Mead with restarts and the lowest
/// result is kept.
pub fn minimize_ground(
    model: &ModelParams,
    ansatz: Ansatz,
    opts: &MinimizeOptions,
) -> Result<GroundStateSolution> {
    let (params, _, trace, term) = minimize_variational(model, ansatz, opts);
    let energy = energy(&params, model);
    let status = match term {
        Termination::Converged => SolveStatus::Converged,
        Termination::Stagnated => {
            SolveStatus::ConvergedWithWarning("simplex collapsed before reaching energy tolerance".into())
        }
        Termination::MaxEvaluations => {
            SolveStatus::ConvergedWithWarning("evaluation budget exhausted".into())
        }
    };
    let mut solution = GroundStateSolution {
        model: *model,
        ansatz,
        params,
        energy,
        status,
        trace,
        ed_energy: None,
        energy_error: None,
    };
    if opts.compare_exact {
        attach_exact(&mut solution, opts.ed_energy_tol)?;
    }
    Ok(solution)
}

fn attach_exact(solution: &mut GroundStateSolution, tol: f64) -> Result<()> {
    let ed = solve_ground(&solution.model, tol)?;
    solution.ed_energy = Some(ed.energy);
    solution.energy_error = Some(((solution.energy - ed.energy) / ed.energy).abs());
    Ok(())
}

/// Continuation sweep over g/g_c at fixed ratio.
///
/// The grid is traversed upwards and downwards, each point warm-started from
/// its predecessor, and the lower energy is kept per point.
pub fn sweep(
    ratio: f64,
    g_over_gc: &[f64],
    ansatz: Ansatz,
    opts: &MinimizeOptions,
) -> Result<Vec<GroundStateSolution>> {
    let models = g_over_gc
        .iter()
        .map(|&r| ModelParams::from_ratio(ratio, r))
        .collect::<Result<Vec<_>>>()?;
    let mut inner = opts.clone();
    inner.compare_exact = false;

    let run = |order: &mut dyn Iterator<Item = usize>| -> Result<Vec<(usize, GroundStateSolution)>> {
        let mut out = Vec::new();
        let mut warm = opts.warm_start;
        for i in order {
            let mut o = inner.clone();
            o.warm_start = warm;
            let s = minimize_ground(&models[i], ansatz, &o)?;
            warm = Some(s.params);
            out.push((i, s));
        }
        Ok(out)
    };
    let mut best: Vec<Option<GroundStateSolution>> = vec![None; models.len()];
    for (i, s) in run(&mut (0..models.len()))? {
        best[i] = Some(s);
    }
    for (i, s) in run(&mut (0..models.len()).rev())? {
        let keep = best[i].as_ref().map_or(true, |b| s.energy < b.energy);
        if keep {
            best[i] = Some(s);
        }
    }
    let mut out: Vec<GroundStateSolution> = best.into_iter().map(|s| s.expect("filled")).collect();
    if opts.compare_exact {
        for s in &mut out {
            attach_exact(s, opts.ed_energy_tol)?;
        }
    }
    Ok(out)
}

/// `(g/g_c, ξ)` along a continuation sweep with the full ansatz.
pub fn squeezing_profile(ratio: f64, g_over_gc: &[f64], opts: &MinimizeOptions) -> Result<Vec<(f64, f64)>> {
    if g_over_gc.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("squeezing profile needs a non-decreasing g grid"));
    }
    let mut o = opts.clone();
    o.compare_exact = false;
    Ok(sweep(ratio, g_over_gc, Ansatz::Full, &o)?
        .into_iter()
        .map(|s| (s.model.g_over_gc(), s.params.xi))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{quadrature_expectation, quadrature_matrix_element, Kernel};

    #[test]
    fn beta_root_cases() {
        assert_eq!(beta_from_normalization(1.0, 0.3), 0.0);
        let b = beta_from_normalization(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        assert!((b - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        // 0.81 + b^2 + 0.9 b = 1  =>  b = (-0.9 + sqrt(1.57))/2
        let b = beta_from_normalization(0.9, 0.5);
        assert!((b - 0.17649820430708335).abs() < 1e-14);
        assert!((0.81 + b * b + 0.9 * b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn new_rejects_bad_weights() {
        assert!(VariationalParams::new(0.0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(VariationalParams::new(1.2, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(VariationalParams::new(0.5, 0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn degenerate_displacements() {
        let vp = VariationalParams::new(0.7, 1.0, 0.0, 0.0, 2.0).unwrap();
        assert!(trial_state(&vp, Branch::Odd).norm_sq().abs() < 1e-14);
        let e = trial_state(&vp, Branch::Even);
        assert!((e.norm_sq() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn minus_branch_mirrors_plus() {
        let vp = VariationalParams::new(0.8, 0.7, 0.9, 0.6, 2.3).unwrap();
        let p = trial_state(&vp, Branch::Plus);
        let m = trial_state(&vp, Branch::Minus);
        for i in 0..101 {
            let x = -10.0 + 0.2 * i as f64;
            assert_eq!(p.eval(x), m.eval(-x));
        }
    }

    #[test]
    fn even_and_odd_fock_parity() {
        let vp = VariationalParams::new(0.85, 0.8, 0.7, 0.5, 3.0).unwrap();
        let e = crate::gaussian::fock_amplitudes(&trial_state(&vp, Branch::Even), 60);
        let o = crate::gaussian::fock_amplitudes(&trial_state(&vp, Branch::Odd), 60);
        for n in 0..=60 {
            if n % 2 == 1 {
                assert!(e.amplitudes[n].abs() < 1e-12);
            } else {
                assert!(o.amplitudes[n].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decoupled_energy() {
        for alpha in [0.3, 0.8, 1.0] {
            let m = ModelParams::from_ratio(7.0, 0.0).unwrap();
            let vp = VariationalParams::new(alpha, 1.0, 0.0, 0.0, m.g_prime).unwrap();
            assert!((energy(&vp, &m) + 3.5).abs() < 1e-13);
        }
    }

    #[test]
    fn displaced_oscillator_energy() {
        let g = 1.4;
        let m = ModelParams::zero_splitting(g).unwrap();
        let vp = VariationalParams::new(1.0, 1.0, 1.0, 1.0, m.g_prime).unwrap();
        assert!((energy(&vp, &m) + g * g).abs() < 1e-13);
    }

    #[test]
    fn closed_form_energy_matches_quadrature_assembly() {
        let m = ModelParams::from_ratio(10.0, 2.0).unwrap();
        for (a, xi, za, zb) in [(0.95, 0.9, 0.8, 0.75), (0.6, 0.4, 0.2, -0.1), (0.99, 1.3, 1.1, 0.9)] {
            let vp = VariationalParams::new(a, xi, za, zb, m.g_prime).unwrap();
            let psi = trial_state(&vp, Branch::Plus);
            let spec = psi.quadrature_spec();
            let kin = quadrature_expectation(&psi, Kernel::Kinetic, &spec).unwrap();
            let pot = quadrature_expectation(&psi, Kernel::Potential { well_center: m.g_prime }, &spec)
                .unwrap();
            let flip = quadrature_expectation(&psi, Kernel::ParityFlipOverlap, &spec).unwrap();
            let quad = kin + pot - m.delta / 2.0 * flip + m.eps0;
            assert!((quad - energy(&vp, &m)).abs() < 1e-10);
            let norm = quadrature_matrix_element(&psi, &psi, Kernel::Overlap, &spec).unwrap();
            assert!((norm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn mirror_relabelling_preserves_energy_and_state() {
        let m = ModelParams::from_ratio(10.0, 1.2).unwrap();
        let vp = VariationalParams::new(0.4, 0.8, -0.9, -0.7, m.g_prime).unwrap();
        let c = vp.canonical();
        assert!(c.d_alpha >= 0.0);
        assert!((energy(&vp, &m) - energy(&c, &m)).abs() < 1e-12);
        assert!(c.normalization_residual().abs() < 1e-12);
        assert!((mirrored_energy(&vp, &m) - energy(&vp, &m)).abs() < 1e-12);
    }

    #[test]
    fn decoupled_optimum() {
        for r in [1.0, 10.0, 100.0] {
            let m = ModelParams::from_ratio(r, 0.0).unwrap();
            let s = minimize_ground(&m, Ansatz::Full, &MinimizeOptions::default()).unwrap();
            assert!((s.energy + r / 2.0).abs() < 1e-10);
            assert!((s.params.xi - 1.0).abs() < 1e-4);
            assert!(s.params.d_alpha.abs() < 1e-4 && s.params.d_beta.abs() < 1e-4);
        }
    }

    #[test]
    fn weights_at_reference_point() {
        let m = ModelParams::from_ratio(10.0, 2.0).unwrap();
        let s = minimize_ground(&m, Ansatz::Full, &MinimizeOptions::default()).unwrap();
        assert!((s.params.alpha - 0.996).abs() <= 0.01, "{:?}", s.params);
        assert!((s.params.beta - 0.087).abs() <= 0.01);
        assert!(s.params.normalization_residual().abs() < 1e-10);
        assert!(s.energy >= s.ed_energy.unwrap() - 1e-12);
    }

    #[test]
    fn ansatz_nesting() {
        for (r, k) in [(10.0, 1.25), (1.0, 1.0), (100.0, 1.6)] {
            let m = ModelParams::from_ratio(r, k).unwrap();
            let mut o = MinimizeOptions::default();
            o.compare_exact = false;
            let full = minimize_ground(&m, Ansatz::Full, &o).unwrap().energy;
            let eq = minimize_ground(&m, Ansatz::EqualDisplacement, &o).unwrap().energy;
            let single = minimize_ground(&m, Ansatz::SinglePolaron, &o).unwrap();
            assert!(full <= eq + 1e-12);
            assert!(eq <= single.energy + 1e-12);
            assert_eq!(single.params.beta, 0.0);
            assert_eq!(single.params.xi, 1.0);
        }
    }

    #[test]
    fn ansatz_parsing() {
        assert_eq!("full4".parse::<Ansatz>().unwrap(), Ansatz::Full);
        assert_eq!("eq19".parse::<Ansatz>().unwrap(), Ansatz::EqualDisplacement);
        assert_eq!("eq15".parse::<Ansatz>().unwrap(), Ansatz::SinglePolaron);
        assert!("eq7".parse::<Ansatz>().is_err());
    }
}
