//! Model parameters of the quantum Rabi Hamiltonian
//!
//! ```text
//! H = a†a + (Δ/2) σz + g σx (a† + a)
//! ```
//!
//! in units where the oscillator quantum ħω = 1. Rewriting the field in
//! position/momentum form (a = (x + ip)/√2) splits `H` into two displaced
//! oscillators, one per σx eigenvalue, coupled by the tunnelling term Δ/2:
//!
//! ```text
//! h_σ = ½[p² + (x + σ g′)²],   g′ = √2 g,   ε₀ = −(g′² + 1)/2
//! ```
//!
//! so the σx = ±1 wells are centred at x = ∓g′.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters and the coupling scales derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Qubit splitting Δ.
    pub delta: f64,
    /// Spin-boson coupling g.
    pub g: f64,
    /// Frequency ratio R = Δ/ħω (equal to `delta` with ħω = 1).
    pub ratio: f64,
    /// Dimensionless coupling g′ = √2 g.
    pub g_prime: f64,
    /// Bare critical coupling √Δ/2.
    pub g_c0: f64,
    /// Squeezing-corrected critical coupling √(1 + √(1 + g_c0⁴)).
    pub g_c: f64,
    /// Constant energy offset −(g′² + 1)/2.
    pub eps0: f64,
}

/// Bare and corrected critical couplings for a given splitting.
pub fn critical_couplings(delta: f64) -> (f64, f64) {
    let g_c0 = delta.sqrt() / 2.0;
    let g_c = (1.0 + (1.0 + g_c0.powi(4)).sqrt()).sqrt();
    (g_c0, g_c)
}

/// Build [`ModelParams`] from the splitting Δ and absolute coupling g.
pub fn derive_scales(delta: f64, g: f64) -> Result<ModelParams> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::domain(format!("splitting must be positive, got {delta}")));
    }
    if !(g >= 0.0) || !g.is_finite() {
        return Err(Error::domain(format!("coupling must be non-negative, got {g}")));
    }
    Ok(ModelParams::assemble(delta, g))
}

impl ModelParams {
    fn assemble(delta: f64, g: f64) -> Self {
        let (g_c0, g_c) = critical_couplings(delta);
        let g_prime = std::f64::consts::SQRT_2 * g;
        ModelParams {
            delta,
            g,
            ratio: delta,
            g_prime,
            g_c0,
            g_c,
            eps0: -(g_prime * g_prime + 1.0) / 2.0,
        }
    }

    /// Resolve an absolute coupling from the ratio R and g/g_c.
    pub fn from_ratio(ratio: f64, g_over_gc: f64) -> Result<Self> {
        if !(g_over_gc >= 0.0) || !g_over_gc.is_finite() {
            return Err(Error::domain(format!("g/g_c must be non-negative, got {g_over_gc}")));
        }
        if !(ratio > 0.0) || !ratio.is_finite() {
            return Err(Error::domain(format!("ratio must be positive, got {ratio}")));
        }
        let (_, g_c) = critical_couplings(ratio);
        derive_scales(ratio, g_over_gc * g_c)
    }

    /// The Δ = 0 limit: a pure displaced oscillator in each σx sector.
    ///
    /// `ratio` is zero here, so quantities normalised by g_c are only
    /// nominal (g_c = √2).
    pub fn zero_splitting(g: f64) -> Result<Self> {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::domain(format!("coupling must be non-negative, got {g}")));
        }
        Ok(ModelParams::assemble(0.0, g))
    }

    pub fn g_over_gc(&self) -> f64 {
        self.g / self.g_c
    }
}

/// Sign of the σx eigenvalue labelling a spin branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpinX {
    Up,
    Down,
}

impl SpinX {
    pub fn sign(self) -> f64 {
        match self {
            SpinX::Up => 1.0,
            SpinX::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SpinX::Up => SpinX::Down,
            SpinX::Down => SpinX::Up,
        }
    }
}

/// `½[kinetic·p² + stiffness·(x − center)²] + offset` for one σx branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacedOscillator {
    pub kinetic: f64,
    pub stiffness: f64,
    pub center: f64,
    /// Constant ε₀ shared by both branches.
    pub offset: f64,
}

/// Oscillator form of one σx branch; the branches are coupled by Δ/2.
pub fn hamiltonian_sigma_x(params: &ModelParams, branch: SpinX) -> DisplacedOscillator {
    DisplacedOscillator {
        kinetic: 1.0,
        stiffness: 1.0,
        center: -branch.sign() * params.g_prime,
        offset: params.eps0,
    }
}
