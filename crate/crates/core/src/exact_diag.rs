//! Exact ground state of the Rabi Hamiltonian.
//!
//! The Hamiltonian conserves the parity `Π = −σz·(−1)^{a†a}`, so each parity
//! sector is a single chain of states `|s_n, n⟩` with the spin fixed by the
//! photon number. For the ground (even) chain the sites are
//! `|↓,0⟩ ↔ |↑,1⟩ ↔ |↓,2⟩ ↔ …`, giving a symmetric tridiagonal matrix with
//! diagonal `n ∓ (−1)ⁿΔ/2` and off-diagonal `g√(n+1)`. Its lowest eigenpair
//! is found by Sturm-sequence bisection followed by inverse iteration.
//!
//! A dense spin⊗Fock matrix (and its σx-basis counterpart) is kept as an
//! independent check of the chain reduction.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{hamiltonian_sigma_x, ModelParams, SpinX};
use crate::observables::{entanglement_entropy, EntropyBase, FockDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    /// Chain headed by `|↓,0⟩`; contains the ground state for Δ > 0.
    Even,
    /// Chain headed by `|↑,0⟩`.
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// Whether chain site `n` carries spin up (σz = +1).
    pub fn spin_up_at(self, n: usize) -> bool {
        match self {
            Parity::Even => n % 2 == 1,
            Parity::Odd => n % 2 == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityChain {
    pub parity: Parity,
    pub n_max: usize,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

pub fn build_parity_chain(params: &ModelParams, parity: Parity, n_max: usize) -> Result<ParityChain> {
    if n_max < 4 {
        return Err(Error::domain(format!("parity chain needs n_max >= 4, got {n_max}")));
    }
    let diag = (0..=n_max)
        .map(|n| {
            let alternation = if n % 2 == 0 { 1.0 } else { -1.0 };
            n as f64 - parity.sign() * alternation * params.delta / 2.0
        })
        .collect();
    let offdiag = (0..n_max).map(|n| params.g * ((n + 1) as f64).sqrt()).collect();
    Ok(ParityChain {
        parity,
        n_max,
        diag,
        offdiag,
    })
}

impl ParityChain {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm count).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE
            * self
                .offdiag
                .iter()
                .map(|b| b * b)
                .fold(1.0, f64::max);
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let b = self.offdiag[i - 1];
            d = self.diag[i] - x - b * b / d;
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    fn norm_estimate(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(1.0)
    }

    /// `T·v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solve `(T − σ)x = rhs` by LDLᵀ; fails unless every pivot is positive.
    fn shifted_solve(&self, sigma: f64, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.diag.len();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = self.diag[0] - sigma;
        if !(d[0] > 0.0) {
            return None;
        }
        for i in 1..n {
            l[i - 1] = self.offdiag[i - 1] / d[i - 1];
            d[i] = self.diag[i] - sigma - l[i - 1] * self.offdiag[i - 1];
            if !(d[i] > 0.0) || !d[i].is_finite() {
                return None;
            }
        }
        let mut y = rhs.to_vec();
        for i in 1..n {
            y[i] -= l[i - 1] * y[i - 1];
        }
        for i in 0..n {
            y[i] /= d[i];
        }
        for i in (0..n - 1).rev() {
            y[i] -= l[i] * y[i + 1];
        }
        Some(y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

const MAX_SHIFT_RETRIES: usize = 5;

/// Lowest eigenpair of a parity chain.
///
/// Bisection brackets the eigenvalue to width `tol` (floored at a few ulps);
/// inverse iteration at a shift just below the bracket then converges to the
/// eigenvector with residual `‖Tv − Ev‖ ≤ 10·tol`.
pub fn ground_eigenpair(chain: &ParityChain, tol: f64) -> Result<Eigenpair> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::domain(format!("eigen tolerance must lie in (0, 1e-6], got {tol}")));
    }
    let (mut lo, mut hi) = chain.gershgorin();
    let scale = chain.norm_estimate();
    let floor = 4.0 * f64::EPSILON * scale;
    lo -= floor;
    hi += floor;
    for _ in 0..400 {
        let width = hi - lo;
        if width <= tol.max(floor) {
            break;
        }
        let mid = lo + width / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if chain.count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let n = chain.len();
    let target = (10.0 * tol).max(100.0 * f64::EPSILON * scale);
    let mut gap = (hi - lo).max(floor);
    let mut last_residual = f64::INFINITY;
    for _ in 0..MAX_SHIFT_RETRIES {
        let sigma = lo - gap;
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (i as f64).sin()).collect();
        normalize(&mut v);
        for sweep in 0..8 {
            match chain.shifted_solve(sigma, &v) {
                Some(mut y) => {
                    if normalize(&mut y) == 0.0 {
                        break;
                    }
                    v = y;
                }
                None => break,
            }
            if sweep >= 1 {
                let tv = chain.apply(&v);
                let rq: f64 = tv.iter().zip(&v).map(|(a, b)| a * b).sum();
                let residual = tv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - rq * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                last_residual = residual;
                if residual <= target {
                    if v[0] < 0.0 {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                    let energy = rq.clamp(lo, hi);
                    return Ok(Eigenpair {
                        energy,
                        vector: v,
                        residual,
                    });
                }
            }
        }
        gap *= 16.0;
    }
    Err(Error::Numerical {
        what: "inverse iteration did not converge".into(),
        last_change: last_residual,
        iterations: MAX_SHIFT_RETRIES,
    })
}

/// Spin⊗Fock matrix of the Rabi Hamiltonian in the σz basis, index `2n + s`
/// with `s = 0` for spin up.
pub fn dense_rabi_hamiltonian(params: &ModelParams, n_max: usize) -> DMatrix<f64> {
    let dim = 2 * (n_max + 1);
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..=n_max {
        h[(2 * n, 2 * n)] = n as f64 + params.delta / 2.0;
        h[(2 * n + 1, 2 * n + 1)] = n as f64 - params.delta / 2.0;
        if n < n_max {
            let c = params.g * ((n + 1) as f64).sqrt();
            for s in 0..2 {
                let i = 2 * n + s;
                let j = 2 * (n + 1) + (1 - s);
                h[(i, j)] = c;
                h[(j, i)] = c;
            }
        }
    }
    h
}

/// The same Hamiltonian assembled from the two displaced σx-branch
/// oscillators plus the Δ/2 spin flip, index `2n + b` with `b = 0` for σx = +1.
pub fn dense_sigma_x_hamiltonian(params: &ModelParams, n_max: usize) -> DMatrix<f64> {
    let dim = 2 * (n_max + 1);
    let mut h = DMatrix::zeros(dim, dim);
    for (b, branch) in [SpinX::Up, SpinX::Down].into_iter().enumerate() {
        let osc = hamiltonian_sigma_x(params, branch);
        let c = osc.center;
        // ½[p² + (x − c)²] = a†a + ½ − c·x + c²/2,  x = (a + a†)/√2
        for n in 0..=n_max {
            let i = 2 * n + b;
            h[(i, i)] = n as f64 + 0.5 + c * c / 2.0 + osc.offset;
            if n < n_max {
                let j = 2 * (n + 1) + b;
                let x = ((n + 1) as f64 / 2.0).sqrt();
                h[(i, j)] = -c * x;
                h[(j, i)] = -c * x;
            }
        }
    }
    for n in 0..=n_max {
        h[(2 * n, 2 * n + 1)] = params.delta / 2.0;
        h[(2 * n + 1, 2 * n)] = params.delta / 2.0;
    }
    h
}

fn sorted_eigenvalues(h: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Largest cutoff accepted by the dense routines.
pub const DENSE_N_MAX: usize = 200;

/// Full ascending spectrum of the dense spin⊗Fock matrix.
pub fn dense_oracle(params: &ModelParams, n_max: usize) -> Result<Vec<f64>> {
    if n_max > DENSE_N_MAX {
        return Err(Error::domain(format!(
            "dense oracle limited to n_max <= {DENSE_N_MAX}, got {n_max}"
        )));
    }
    Ok(sorted_eigenvalues(dense_rabi_hamiltonian(params, n_max)))
}

/// Spectrum of the σx-branch assembly, for comparison with [`dense_oracle`].
pub fn dense_sigma_x_spectrum(params: &ModelParams, n_max: usize) -> Result<Vec<f64>> {
    if n_max > DENSE_N_MAX {
        return Err(Error::domain(format!(
            "dense oracle limited to n_max <= {DENSE_N_MAX}, got {n_max}"
        )));
    }
    Ok(sorted_eigenvalues(dense_sigma_x_hamiltonian(params, n_max)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdObservables {
    pub mean_photon: f64,
    pub p_up: f64,
    pub p_down: f64,
    /// Spin entanglement entropy in nats.
    pub entropy: f64,
    pub fock: FockDistribution,
}

/// Observables of a chain eigenvector.
pub fn ed_observables(parity: Parity, vector: &[f64]) -> EdObservables {
    let populations: Vec<f64> = vector.iter().map(|v| v * v).collect();
    let mean_photon = populations
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum();
    let p_up: f64 = populations
        .iter()
        .enumerate()
        .filter(|(n, _)| parity.spin_up_at(*n))
        .map(|(_, p)| p)
        .sum();
    let p_down: f64 = populations
        .iter()
        .enumerate()
        .filter(|(n, _)| !parity.spin_up_at(*n))
        .map(|(_, p)| p)
        .sum();
    EdObservables {
        mean_photon,
        p_up,
        p_down,
        entropy: entanglement_entropy(p_up, EntropyBase::Natural),
        fock: FockDistribution::new(populations),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EDResult {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub parity: Parity,
    pub n_max: usize,
    /// Population of the top 5% of chain sites.
    pub tail_mass: f64,
    pub residual: f64,
    pub observables: EdObservables,
}

/// Tail population accepted at a converged truncation.
pub const TAIL_MASS_LIMIT: f64 = 1e-8;
/// Default tolerance on successive ground energies.
pub const DEFAULT_ENERGY_TOL: f64 = 1e-10;
/// Default bisection width.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-12;
/// Largest chain length tried before giving up.
pub const MAX_CHAIN_N: usize = 200_000;

fn tail_mass(vector: &[f64]) -> f64 {
    let n = vector.len();
    let top = ((n as f64) * 0.05).ceil() as usize;
    vector[n - top.max(1)..].iter().map(|v| v * v).sum()
}

/// Ground state of one parity chain at a fixed cutoff.
pub fn solve_chain(params: &ModelParams, parity: Parity, n_max: usize) -> Result<EDResult> {
    let chain = build_parity_chain(params, parity, n_max)?;
    let pair = ground_eigenpair(&chain, DEFAULT_EIGEN_TOL)?;
    let observables = ed_observables(parity, &pair.vector);
    Ok(EDResult {
        energy: pair.energy,
        tail_mass: tail_mass(&pair.vector),
        vector: pair.vector,
        parity,
        n_max,
        residual: pair.residual,
        observables,
    })
}

/// Initial cutoff `⌈4g′² + 20⌉`.
pub fn truncation_floor(params: &ModelParams) -> usize {
    (4.0 * params.g_prime * params.g_prime + 20.0).ceil() as usize
}

fn converge(params: &ModelParams, energy_tol: f64) -> Result<EDResult> {
    if !(energy_tol > 0.0) {
        return Err(Error::domain(format!("energy tolerance must be positive, got {energy_tol}")));
    }
    let mut n = truncation_floor(params);
    let mut current = solve_chain(params, Parity::Even, n)?;
    loop {
        let next_n = 2 * n;
        if next_n > MAX_CHAIN_N {
            return Err(Error::Resource(format!(
                "truncation did not converge below n_max = {MAX_CHAIN_N}"
            )));
        }
        let next = solve_chain(params, Parity::Even, next_n)?;
        let allowed = energy_tol.max(64.0 * f64::EPSILON * current.energy.abs());
        if (current.energy - next.energy).abs() < allowed && current.tail_mass < TAIL_MASS_LIMIT {
            return Ok(current);
        }
        n = next_n;
        current = next;
    }
}

/// Smallest doubling of the floor cutoff at which the ground energy is
/// stable to `energy_tol` and the tail population is negligible.
pub fn converge_truncation(params: &ModelParams, energy_tol: f64) -> Result<usize> {
    converge(params, energy_tol).map(|r| r.n_max)
}

/// Ground state at a converged truncation.
pub fn solve_ground(params: &ModelParams, energy_tol: f64) -> Result<EDResult> {
    converge(params, energy_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::derive_scales;

    #[test]
    fn small_chain_layout() {
        let m = derive_scales(1.0, 1.0).unwrap();
        let c = build_parity_chain(&m, Parity::Even, 4).unwrap();
        assert_eq!(c.diag.len(), 5);
        assert_eq!(c.offdiag.len(), 4);
        assert_eq!(&c.diag[..3], &[-0.5, 1.5, 1.5]);
        assert_eq!(c.offdiag[0], 1.0);
        assert!((c.offdiag[1] - 2f64.sqrt()).abs() < 1e-15);
        assert!(build_parity_chain(&m, Parity::Even, 3).is_err());
    }

    #[test]
    fn odd_chain_flips_splitting() {
        let m = derive_scales(2.3, 0.4).unwrap();
        let even = build_parity_chain(&m, Parity::Even, 10).unwrap();
        let odd = build_parity_chain(&m, Parity::Odd, 10).unwrap();
        let mut flipped = m;
        flipped.delta = -m.delta;
        let even_flipped = build_parity_chain(&flipped, Parity::Even, 10).unwrap();
        assert_eq!(odd.diag, even_flipped.diag);
        assert_eq!(even.offdiag, odd.offdiag);
    }

    #[test]
    fn decoupled_chain() {
        let m = derive_scales(3.0, 0.0).unwrap();
        let c = build_parity_chain(&m, Parity::Even, 8).unwrap();
        assert!(c.offdiag.iter().all(|&b| b == 0.0));
        let p = ground_eigenpair(&c, 1e-12).unwrap();
        assert!((p.energy + 1.5).abs() < 1e-11);
        assert!((p.vector[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn displaced_oscillator_limit() {
        let g = 1.7;
        let m = ModelParams::zero_splitting(g).unwrap();
        let c = build_parity_chain(&m, Parity::Even, 80).unwrap();
        let p = ground_eigenpair(&c, 1e-12).unwrap();
        assert!((p.energy + g * g).abs() < 1e-10);
        assert!(p.residual < 1e-10);
    }

    #[test]
    fn tolerance_bounds_are_enforced() {
        let m = derive_scales(1.0, 0.3).unwrap();
        let c = build_parity_chain(&m, Parity::Even, 10).unwrap();
        assert!(ground_eigenpair(&c, 0.0).is_err());
        assert!(ground_eigenpair(&c, 1e-3).is_err());
    }

    #[test]
    fn chain_matches_dense_oracle() {
        let m = derive_scales(1.0, 0.3).unwrap();
        let dense = dense_oracle(&m, 40).unwrap();
        let even = ground_eigenpair(&build_parity_chain(&m, Parity::Even, 40).unwrap(), 1e-12)
            .unwrap();
        let odd = ground_eigenpair(&build_parity_chain(&m, Parity::Odd, 40).unwrap(), 1e-12)
            .unwrap();
        assert!((dense[0] - even.energy).abs() < 1e-10);
        assert!((dense[1] - odd.energy).abs() < 1e-10);
    }

    #[test]
    fn dense_limits() {
        let m = derive_scales(0.8, 0.0).unwrap();
        let ev = dense_oracle(&m, 10).unwrap();
        let mut want: Vec<f64> = (0..=10)
            .flat_map(|n| [n as f64 - 0.4, n as f64 + 0.4])
            .collect();
        want.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
        let g = 0.9;
        let m = ModelParams::zero_splitting(g).unwrap();
        let ev = dense_oracle(&m, 60).unwrap();
        for k in 0..6 {
            let want = (k / 2) as f64 - g * g;
            assert!((ev[k] - want).abs() < 1e-9, "level {k}: {} vs {want}", ev[k]);
        }
        assert!(dense_oracle(&m, 201).is_err());
    }

    #[test]
    fn sigma_x_assembly_has_the_same_spectrum() {
        let m = derive_scales(1.0, 1.0).unwrap();
        let a = dense_oracle(&m, 40).unwrap();
        let b = dense_sigma_x_spectrum(&m, 40).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn squared_center_typo_breaks_equivalence() {
        // wells placed at ∓g′² instead of ∓g′ give a different spectrum
        let m = derive_scales(1.0, 1.0).unwrap();
        let mut wrong = m;
        wrong.g_prime = m.g_prime * m.g_prime;
        wrong.eps0 = -(m.g_prime * m.g_prime + 1.0) / 2.0;
        let a = dense_oracle(&m, 40).unwrap();
        let b = dense_sigma_x_spectrum(&wrong, 40).unwrap();
        assert!((a[0] - b[0]).abs() > 1e-3);
    }

    #[test]
    fn spin_mapping_matches_dense_ground_vector() {
        let m = derive_scales(2.0, 0.8).unwrap();
        let n_max = 60;
        let h = dense_rabi_hamiltonian(&m, n_max);
        let eig = SymmetricEigen::new(h);
        let k = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        let v = eig.eigenvectors.column(k);
        let dense_up: f64 = (0..=n_max).map(|n| v[2 * n].powi(2)).sum();
        let r = solve_chain(&m, Parity::Even, n_max).unwrap();
        assert!((dense_up - r.observables.p_up).abs() < 1e-10);
    }

    #[test]
    fn observables_in_simple_limits() {
        let m = derive_scales(2.0, 0.0).unwrap();
        let r = solve_ground(&m, 1e-10).unwrap();
        assert_eq!(r.n_max, 20);
        assert!(r.observables.mean_photon.abs() < 1e-20);
        assert!(r.observables.entropy < 1e-30);

        let g = 1.3;
        let m = ModelParams::zero_splitting(g).unwrap();
        let r = solve_ground(&m, 1e-10).unwrap();
        assert!((r.observables.mean_photon - g * g).abs() < 1e-6);
        assert!((r.energy + g * g).abs() < 1e-9);
    }

    #[test]
    fn population_sums() {
        let m = ModelParams::from_ratio(10.0, 1.3).unwrap();
        let r = solve_ground(&m, 1e-10).unwrap();
        let o = &r.observables;
        assert!((o.p_up + o.p_down - 1.0).abs() < 1e-12);
        assert!((o.fock.total() - 1.0).abs() < 1e-10);
        assert!(o.entropy >= 0.0 && o.entropy <= std::f64::consts::LN_2);
        let norm: f64 = r.vector.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(r.tail_mass < TAIL_MASS_LIMIT);
    }

    #[test]
    fn truncation_is_stable_under_one_more_doubling() {
        let m = ModelParams::from_ratio(100.0, 1.6).unwrap();
        let r = solve_ground(&m, 1e-10).unwrap();
        let bigger = solve_chain(&m, Parity::Even, 2 * r.n_max).unwrap();
        assert!((r.energy - bigger.energy).abs() < 1e-9);
    }

    #[test]
    fn truncation_scales_with_coupling() {
        let m = ModelParams::from_ratio(1000.0, 3.0).unwrap();
        let n = converge_truncation(&m, 1e-9).unwrap();
        let scale = m.g_prime * m.g_prime;
        assert!((n as f64) < 4.0 * 4.0 * scale + 100.0);
        assert!((n as f64) > scale / 4.0);
    }

    #[test]
    fn energy_decreases_with_cutoff() {
        let m = ModelParams::from_ratio(10.0, 2.0).unwrap();
        let mut prev = f64::INFINITY;
        for n in [4, 8, 16, 32, 64, 128] {
            let e = solve_chain(&m, Parity::Even, n).unwrap().energy;
            assert!(e <= prev + 1e-12);
            prev = e;
        }
    }
}
