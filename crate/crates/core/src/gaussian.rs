//! Displaced, equally squeezed Gaussian wave packets
//!
//! A component is `w·(ξ/π)^{1/4}·exp[−ξ(x − c)²/2]`. All matrix elements
//! between two such packets sharing the squeeze ξ have closed forms; the
//! quadrature routines below evaluate the same quantities directly from the
//! wavefunction and serve as the reference for every closed form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub weight: f64,
    pub center: f64,
}

/// Superposition of Gaussians with a common squeeze.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    squeeze: f64,
    components: Vec<GaussianComponent>,
}

fn check_squeeze(xi: f64) -> Result<()> {
    if xi > 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("squeeze must be positive, got {xi}")))
    }
}

/// `⟨φ_{c1}|φ_{c2}⟩ = exp[−ξ(c1 − c2)²/4]`.
pub fn overlap(c1: f64, c2: f64, xi: f64) -> Result<f64> {
    check_squeeze(xi)?;
    Ok(overlap_unchecked(c1, c2, xi))
}

#[inline]
pub(crate) fn overlap_unchecked(c1: f64, c2: f64, xi: f64) -> f64 {
    let d = c1 - c2;
    (-xi * d * d / 4.0).exp()
}

/// `⟨φ_{c1}| ½[p² + (x − well_center)²] |φ_{c2}⟩`.
pub fn h_matrix_element(c1: f64, c2: f64, xi: f64, well_center: f64) -> Result<f64> {
    check_squeeze(xi)?;
    Ok(h_matrix_element_unchecked(c1, c2, xi, well_center))
}

#[inline]
pub(crate) fn h_matrix_element_unchecked(c1: f64, c2: f64, xi: f64, well_center: f64) -> f64 {
    let d = c1 - c2;
    let kinetic = xi / 2.0 - xi * xi * d * d / 4.0;
    let shift = (c1 + c2) / 2.0 - well_center;
    let potential = shift * shift + 1.0 / (2.0 * xi);
    overlap_unchecked(c1, c2, xi) * 0.5 * (kinetic + potential)
}

impl GaussianState {
    pub fn new(squeeze: f64, components: Vec<GaussianComponent>) -> Result<Self> {
        check_squeeze(squeeze)?;
        if components.is_empty() {
            return Err(Error::domain("a Gaussian state needs at least one component"));
        }
        if components
            .iter()
            .any(|c| !c.weight.is_finite() || !c.center.is_finite())
        {
            return Err(Error::domain("non-finite component"));
        }
        Ok(GaussianState {
            squeeze,
            components,
        })
    }

    /// Unit-weight single packet.
    pub fn single(squeeze: f64, center: f64) -> Result<Self> {
        Self::new(
            squeeze,
            vec![GaussianComponent {
                weight: 1.0,
                center,
            }],
        )
    }

    pub fn squeeze(&self) -> f64 {
        self.squeeze
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    /// Pointwise sum with `sign·other`; both states must share ξ.
    pub fn combine(&self, other: &GaussianState, sign: f64) -> Result<Self> {
        if (self.squeeze - other.squeeze).abs() > 0.0 {
            return Err(Error::domain("cannot combine states with different squeezes"));
        }
        let mut components = self.components.clone();
        components.extend(other.components.iter().map(|c| GaussianComponent {
            weight: sign * c.weight,
            center: c.center,
        }));
        Self::new(self.squeeze, components)
    }

    /// ψ(−x).
    pub fn mirrored(&self) -> Self {
        GaussianState {
            squeeze: self.squeeze,
            components: self
                .components
                .iter()
                .map(|c| GaussianComponent {
                    weight: c.weight,
                    center: -c.center,
                })
                .collect(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let xi = self.squeeze;
        let norm = (xi / PI).powf(0.25);
        self.components
            .iter()
            .map(|c| {
                let d = x - c.center;
                c.weight * norm * (-xi * d * d / 2.0).exp()
            })
            .sum()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let xi = self.squeeze;
        let norm = (xi / PI).powf(0.25);
        self.components
            .iter()
            .map(|c| {
                let d = x - c.center;
                -xi * d * c.weight * norm * (-xi * d * d / 2.0).exp()
            })
            .sum()
    }

    fn bilinear<F: Fn(f64, f64) -> f64>(&self, other: &GaussianState, f: F) -> f64 {
        let mut s = 0.0;
        for a in &self.components {
            for b in &other.components {
                s += a.weight * b.weight * f(a.center, b.center);
            }
        }
        s
    }

    /// `⟨self|other⟩` from the closed form.
    pub fn inner(&self, other: &GaussianState) -> f64 {
        let xi = self.squeeze;
        self.bilinear(other, |a, b| overlap_unchecked(a, b, xi))
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    /// `⟨ψ(x)|ψ(−x)⟩`.
    pub fn parity_overlap(&self) -> f64 {
        self.inner(&self.mirrored())
    }

    /// `⟨self| ½[p² + (x − well)²] |self⟩`.
    pub fn oscillator_energy(&self, well_center: f64) -> f64 {
        let xi = self.squeeze;
        self.bilinear(self, |a, b| h_matrix_element_unchecked(a, b, xi, well_center))
    }

    /// `⟨a†a⟩ = (⟨x²⟩ + ⟨p²⟩ − 1)/2` for a normalised state.
    pub fn mean_photon(&self) -> f64 {
        let xi = self.squeeze;
        let x2 = self.bilinear(self, |a, b| {
            let m = (a + b) / 2.0;
            overlap_unchecked(a, b, xi) * (m * m + 1.0 / (2.0 * xi))
        });
        let p2 = self.bilinear(self, |a, b| {
            let d = a - b;
            overlap_unchecked(a, b, xi) * (xi / 2.0 - xi * xi * d * d / 4.0)
        });
        let n = self.norm_sq();
        ((x2 + p2) / n - 1.0) / 2.0
    }

    fn support(&self, halfwidth_scale: f64) -> (f64, f64) {
        let half = halfwidth_scale / self.squeeze.sqrt();
        let lo = self
            .components
            .iter()
            .map(|c| c.center)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .components
            .iter()
            .map(|c| c.center)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo - half, hi + half)
    }

    /// Default quadrature covering the state and its mirror image with at
    /// least 400 nodes.
    pub fn quadrature_spec(&self) -> QuadratureSpec {
        let (lo, hi) = self.support(8.0);
        let reach = lo.abs().max(hi.abs());
        let (lo, hi) = (-reach, reach);
        let per_panel = 0.5 / self.squeeze.sqrt();
        let panels = ((hi - lo) / per_panel).ceil() as usize;
        QuadratureSpec::new(lo, hi, panels.max(25))
    }

    /// Fock cutoff covering the mean plus six standard deviations (estimated).
    pub fn suggested_n_max(&self) -> usize {
        let mean = self.mean_photon().max(0.0);
        let xi = self.squeeze;
        let stretch = xi.max(1.0 / xi);
        let var = 2.0 * (mean + 1.0) * stretch + (xi - 1.0 / xi).powi(2);
        (mean + 6.0 * var.sqrt() + 10.0).ceil() as usize
    }
}

/// Integrand selector for [`quadrature_expectation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Overlap,
    /// `½⟨p²⟩`.
    Kinetic,
    /// `½⟨(x − well_center)²⟩`.
    Potential { well_center: f64 },
    XMoment(u32),
    /// `⟨ψ(x)|ψ(−x)⟩`.
    ParityFlipOverlap,
}

fn quadrature_once(
    left: &GaussianState,
    right: &GaussianState,
    kernel: Kernel,
    spec: &QuadratureSpec,
) -> f64 {
    spec.integrate(|x| match kernel {
        Kernel::Overlap => left.eval(x) * right.eval(x),
        Kernel::Kinetic => 0.5 * left.derivative(x) * right.derivative(x),
        Kernel::Potential { well_center } => {
            let d = x - well_center;
            0.5 * d * d * left.eval(x) * right.eval(x)
        }
        Kernel::XMoment(k) => x.powi(k as i32) * left.eval(x) * right.eval(x),
        Kernel::ParityFlipOverlap => left.eval(x) * right.eval(-x),
    })
}

const QUADRATURE_TOL: f64 = 1e-12;
const MAX_DOUBLINGS: usize = 10;

/// `⟨left|K|right⟩` by composite Gauss–Legendre with node doubling until two
/// successive values agree.
pub fn quadrature_matrix_element(
    left: &GaussianState,
    right: &GaussianState,
    kernel: Kernel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let need_lo = left.support(8.0).0.min(right.support(8.0).0);
    let need_hi = left.support(8.0).1.max(right.support(8.0).1);
    let need_lo = if kernel == Kernel::ParityFlipOverlap {
        need_lo.min(-right.support(8.0).1)
    } else {
        need_lo
    };
    let need_hi = if kernel == Kernel::ParityFlipOverlap {
        need_hi.max(-right.support(8.0).0)
    } else {
        need_hi
    };
    if spec.lo > need_lo || spec.hi < need_hi {
        return Err(Error::domain(format!(
            "quadrature interval [{}, {}] does not cover [{need_lo}, {need_hi}]",
            spec.lo, spec.hi
        )));
    }
    if spec.node_count() < 400 {
        return Err(Error::domain(format!(
            "quadrature needs at least 400 nodes, got {}",
            spec.node_count()
        )));
    }
    let mut spec = *spec;
    let mut prev = quadrature_once(left, right, kernel, &spec);
    let mut change = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        spec = spec.refined();
        let next = quadrature_once(left, right, kernel, &spec);
        change = (next - prev).abs();
        if change <= QUADRATURE_TOL * next.abs().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numerical {
        what: format!("quadrature of {kernel:?} did not converge"),
        last_change: change,
        iterations: MAX_DOUBLINGS,
    })
}

/// `⟨state|K|state⟩` by quadrature.
pub fn quadrature_expectation(
    state: &GaussianState,
    kernel: Kernel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    quadrature_matrix_element(state, state, kernel, spec)
}

/// Projection of a Gaussian state onto Fock states `|0⟩ … |n_max⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockAmplitudes {
    pub amplitudes: Vec<f64>,
    /// `⟨ψ|ψ⟩` from the closed form.
    pub norm_sq: f64,
    /// `⟨ψ|ψ⟩ − Σ a_n²`, the weight above the cutoff.
    pub tail: f64,
}

/// Tail weight above which a projection is reported as truncated.
pub const FOCK_TAIL_WARNING: f64 = 1e-6;

impl FockAmplitudes {
    pub fn captured(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    pub fn is_truncated(&self) -> bool {
        self.tail > FOCK_TAIL_WARNING * self.norm_sq.max(f64::MIN_POSITIVE)
    }

    pub fn warning(&self) -> Option<String> {
        self.is_truncated().then(|| {
            format!(
                "Fock cutoff {} leaves tail weight {:.3e}",
                self.amplitudes.len().saturating_sub(1),
                self.tail
            )
        })
    }
}

/// Normalised Hermite functions `h_0(x) … h_{n_max}(x)` written into `out`.
///
/// The three-term recursion runs on a rescaled sequence with the Gaussian
/// factor held as a separate exponent, so neither large `n` nor large `|x|`
/// overflows.
pub fn hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    const BIG: f64 = 1e150;
    let mut log_scale = -x * x / 2.0 - 0.25 * PI.ln();
    let mut factor = log_scale.exp();
    let mut prev = 0.0;
    let mut cur = 1.0;
    out[0] = cur * factor;
    for n in 0..out.len() - 1 {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += BIG.ln();
            factor = log_scale.exp();
        }
        out[n + 1] = cur * factor;
    }
}

/// Fock amplitudes `a_n = ⟨n|ψ⟩`, n = 0..=n_max.
pub fn fock_amplitudes(state: &GaussianState, n_max: usize) -> FockAmplitudes {
    let xi = state.squeeze;
    let norm = (xi / PI).powf(0.25);
    let mut amplitudes = vec![0.0; n_max + 1];
    let mut h = vec![0.0; n_max + 1];
    let k_max = (2.0 * n_max as f64 + 1.0).sqrt();
    let wavelength = 2.0 * PI / k_max;
    let half = 9.0 / xi.sqrt();
    let panel_width = (2.0 * wavelength).min(1.0 / xi.sqrt());
    let panels = ((2.0 * half) / panel_width).ceil() as usize;
    for comp in &state.components {
        if comp.weight == 0.0 {
            continue;
        }
        let spec = QuadratureSpec::new(comp.center - half, comp.center + half, panels.max(8));
        for (x, w) in spec.points() {
            let d = x - comp.center;
            let psi = comp.weight * norm * (-xi * d * d / 2.0).exp();
            if psi == 0.0 {
                continue;
            }
            hermite_functions(x, &mut h);
            let wpsi = w * psi;
            for (a, hn) in amplitudes.iter_mut().zip(&h) {
                *a += wpsi * hn;
            }
        }
    }
    let norm_sq = state.norm_sq();
    let captured: f64 = amplitudes.iter().map(|a| a * a).sum();
    FockAmplitudes {
        amplitudes,
        norm_sq,
        tail: norm_sq - captured,
    }
}
