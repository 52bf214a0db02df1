//! Scalar diagnostics of a ground state and the coupling-region classifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_diag::{EDResult, EdObservables};
use crate::gaussian::fock_amplitudes;
use crate::model::ModelParams;
use crate::variational::{trial_state, Branch, GroundStateSolution, VariationalParams};
use crate::wigner::Negativities;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EntropyBase {
    #[default]
    Natural,
    Bits,
}

impl EntropyBase {
    pub fn max_entropy(self) -> f64 {
        match self {
            EntropyBase::Natural => std::f64::consts::LN_2,
            EntropyBase::Bits => 1.0,
        }
    }
}

impl std::str::FromStr for EntropyBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "nat" | "nats" => Ok(EntropyBase::Natural),
            "2" | "bit" | "bits" => Ok(EntropyBase::Bits),
            other => Err(Error::config(format!("entropy base must be 'e' or '2', got '{other}'"))),
        }
    }
}

/// Von Neumann entropy of the reduced qubit, `−p ln p − (1−p) ln(1−p)`.
pub fn entanglement_entropy(p_up: f64, base: EntropyBase) -> f64 {
    let p = p_up.clamp(0.0, 1.0);
    let term = |q: f64| if q > 0.0 { -q * q.ln() } else { 0.0 };
    let s = (term(p) + term(1.0 - p)).clamp(0.0, std::f64::consts::LN_2);
    match base {
        EntropyBase::Natural => s,
        EntropyBase::Bits => s / std::f64::consts::LN_2,
    }
}

/// Photon-number populations `P(n)`, n = 0, 1, ….
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockDistribution {
    pub populations: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockEntry {
    pub n: usize,
    pub population: f64,
    pub even: bool,
}

impl FockDistribution {
    pub fn new(populations: Vec<f64>) -> Self {
        FockDistribution { populations }
    }

    pub fn len(&self) -> usize {
        self.populations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.populations.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.populations.iter().sum()
    }

    pub fn even_total(&self) -> f64 {
        self.populations.iter().step_by(2).sum()
    }

    pub fn odd_total(&self) -> f64 {
        self.populations.iter().skip(1).step_by(2).sum()
    }

    pub fn max_odd(&self) -> f64 {
        self.populations.iter().skip(1).step_by(2).fold(0.0, |a, &b| a.max(b))
    }

    /// Largest population among `n ≥ 1`.
    pub fn max_excited(&self) -> f64 {
        self.populations.iter().skip(1).fold(0.0, |a, &b| a.max(b))
    }

    pub fn entries(&self) -> Vec<FockEntry> {
        self.populations
            .iter()
            .enumerate()
            .map(|(n, &population)| FockEntry { n, population, even: n % 2 == 0 })
            .collect()
    }

    /// Populations up to `n_max` and the weight discarded above it.
    pub fn truncated(&self, n_max: usize) -> (FockDistribution, f64) {
        let keep = (n_max + 1).min(self.populations.len());
        let tail = self.populations[keep..].iter().sum();
        (FockDistribution::new(self.populations[..keep].to_vec()), tail)
    }
}

/// `m = (α²D_α² + β²D_β²)/2`.
pub fn mean_photon_m(vp: &VariationalParams) -> f64 {
    0.5 * (vp.alpha.powi(2) * vp.d_alpha.powi(2) + vp.beta.powi(2) * vp.d_beta.powi(2))
}

/// `δD = |D_α − D_β|`.
pub fn displacement_gap(vp: &VariationalParams) -> f64 {
    (vp.d_alpha - vp.d_beta).abs()
}

/// `(P₊, P₋) = ((1 − S)/2, (1 + S)/2)` with `S = ⟨ψ₊|ψ₋⟩`; P₊ is the
/// spin-up (odd-cat) weight.
pub fn spin_probabilities(vp: &VariationalParams) -> (f64, f64) {
    let s = trial_state(vp, Branch::Plus).parity_overlap().clamp(-1.0, 1.0);
    ((1.0 - s) / 2.0, (1.0 + s) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Vacuum.
    VS,
    /// Squeezed vacuum.
    SVS,
    /// Squeezed cat.
    SCS,
    /// Cat without squeezing.
    CSWS,
}

impl Region {
    pub fn from_g_over_gc(r: f64) -> Self {
        if r < 0.5 {
            Region::VS
        } else if r < 1.0 {
            Region::SVS
        } else if r < 1.5 {
            Region::SCS
        } else {
            Region::CSWS
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Region::VS => "VS",
            Region::SVS => "SVS",
            Region::SCS => "SCS",
            Region::CSWS => "CSWS",
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub region: Region,
    pub g_over_gc: f64,
    pub xi: f64,
    pub m: f64,
    /// Thresholds 0.5/1/1.5 on g/g_c; not a measured phase boundary.
    pub heuristic: bool,
}

/// Region by fixed g/g_c thresholds, annotated with the solution's ξ and m.
pub fn classify(model: &ModelParams, solution: &GroundStateSolution) -> Classification {
    let g_over_gc = model.g_over_gc();
    Classification {
        region: Region::from_g_over_gc(g_over_gc),
        g_over_gc,
        xi: solution.params.xi,
        m: mean_photon_m(&solution.params),
        heuristic: true,
    }
}

pub enum PhotonSource<'a> {
    Variational(&'a VariationalParams),
    Exact(&'a EDResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonStatistics {
    pub distribution: FockDistribution,
    pub n_max: usize,
    /// Weight above `n_max`.
    pub tail: f64,
    pub warning: Option<String>,
}

/// Photon-number distribution with the spin traced out.
///
/// For the variational state `P(n) = ¼⟨n|ψ_E⟩² + ¼⟨n|ψ_O⟩²`; without an
/// explicit cutoff one is chosen from the state's extent.
pub fn photon_statistics(source: PhotonSource<'_>, n_max: Option<usize>) -> PhotonStatistics {
    match source {
        PhotonSource::Variational(vp) => {
            let even = trial_state(vp, Branch::Even);
            let odd = trial_state(vp, Branch::Odd);
            let n_max = n_max.unwrap_or_else(|| even.suggested_n_max());
            let fe = fock_amplitudes(&even, n_max);
            let fo = fock_amplitudes(&odd, n_max);
            let populations = fe
                .amplitudes
                .iter()
                .zip(&fo.amplitudes)
                .map(|(a, b)| 0.25 * (a * a + b * b))
                .collect();
            let tail = 0.25 * (fe.tail + fo.tail).max(0.0);
            // The odd part can have vanishing norm, so judge the combined tail.
            let warning = (tail > crate::gaussian::FOCK_TAIL_WARNING)
                .then(|| format!("Fock cutoff {n_max} leaves tail weight {tail:.3e}"));
            PhotonStatistics { distribution: FockDistribution::new(populations), n_max, tail, warning }
        }
        PhotonSource::Exact(ed) => {
            let full = &ed.observables.fock;
            let n_max = n_max.unwrap_or(ed.n_max);
            let (distribution, tail) = full.truncated(n_max);
            let warning = (tail > crate::gaussian::FOCK_TAIL_WARNING)
                .then(|| format!("Fock cutoff {n_max} leaves tail weight {tail:.3e}"));
            PhotonStatistics { distribution, n_max, tail, warning }
        }
    }
}

/// Exact-diagonalisation summary carried by a phase point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdSummary {
    pub energy: f64,
    pub n_max: usize,
    pub mean_photon: f64,
    pub p_up: f64,
    pub entropy: f64,
}

impl EdSummary {
    pub fn new(ed: &EDResult, base: EntropyBase) -> Self {
        let EdObservables { mean_photon, p_up, .. } = ed.observables;
        EdSummary {
            energy: ed.energy,
            n_max: ed.n_max,
            mean_photon,
            p_up,
            entropy: entanglement_entropy(p_up, base),
        }
    }
}

/// All scalar diagnostics at one coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub model: ModelParams,
    pub solution: GroundStateSolution,
    pub ed: Option<EdSummary>,
    pub m: f64,
    pub delta_d: f64,
    pub p_up: f64,
    pub p_down: f64,
    pub entropy: f64,
    pub entropy_base: EntropyBase,
    pub classification: Classification,
    pub negativities: Option<Negativities>,
}

impl PhasePoint {
    pub fn new(
        solution: GroundStateSolution,
        ed: Option<&EDResult>,
        negativities: Option<Negativities>,
        base: EntropyBase,
    ) -> Self {
        let vp = solution.params;
        let (p_up, p_down) = spin_probabilities(&vp);
        PhasePoint {
            model: solution.model,
            classification: classify(&solution.model, &solution),
            ed: ed.map(|e| EdSummary::new(e, base)),
            m: mean_photon_m(&vp),
            delta_d: displacement_gap(&vp),
            p_up,
            p_down,
            entropy: entanglement_entropy(p_up, base),
            entropy_base: base,
            negativities,
            solution,
        }
    }
}
