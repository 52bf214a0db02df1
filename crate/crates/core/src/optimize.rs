//! Nelder–Mead simplex minimisation with restarts.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    /// Initial simplex edge per coordinate.
    pub step: Vec<f64>,
    pub max_evals: usize,
    /// Stop when the simplex value spread is below `f_tol·(1 + |f_best|)`...
    pub f_tol: f64,
    /// ...and its diameter is below `x_tol`.
    pub x_tol: f64,
    /// Re-inflated restarts from the incumbent after the first convergence.
    pub restarts: usize,
}

impl NelderMeadOptions {
    pub fn with_step(step: Vec<f64>) -> Self {
        NelderMeadOptions {
            step,
            max_evals: 20_000,
            f_tol: 1e-10,
            x_tol: 1e-8,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    /// Simplex collapsed below 1e-12 without meeting the value tolerance.
    Stagnated,
    MaxEvaluations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub diameter: f64,
    pub termination: Termination,
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let best = &simplex[0];
    simplex[1..]
        .iter()
        .map(|v| {
            v.iter()
                .zip(best)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn single_run<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    opts: &NelderMeadOptions,
    budget: usize,
) -> NelderMeadResult {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.step[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;
    let mut iterations = 0;
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let order = |simplex: &mut Vec<Vec<f64>>, values: &mut Vec<f64>| {
        let mut idx: Vec<usize> = (0..simplex.len()).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        *simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        *values = idx.iter().map(|&i| values[i]).collect();
    };

    loop {
        order(&mut simplex, &mut values);
        let spread = values[n] - values[0];
        let diam = diameter(&simplex);
        if spread <= opts.f_tol * (1.0 + values[0].abs()) && diam <= opts.x_tol {
            return NelderMeadResult {
                x: simplex[0].clone(),
                f: values[0],
                evaluations: evals,
                iterations,
                diameter: diam,
                termination: Termination::Converged,
            };
        }
        if diam < 1e-12 {
            return NelderMeadResult {
                x: simplex[0].clone(),
                f: values[0],
                evaluations: evals,
                iterations,
                diameter: diam,
                termination: Termination::Stagnated,
            };
        }
        if evals >= budget {
            return NelderMeadResult {
                x: simplex[0].clone(),
                f: values[0],
                evaluations: evals,
                iterations,
                diameter: diam,
                termination: Termination::MaxEvaluations,
            };
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(alpha);
        let fr = f(&reflected);
        evals += 1;
        if fr < values[0] {
            let expanded = along(gamma);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let c = along(rho);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = along(-rho);
            let fc = f(&c);
            (c, fc)
        };
        evals += 1;
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + sigma * (*x - b);
            }
            values[i] = f(&simplex[i]);
        }
        evals += n;
    }
}

/// Minimise `f` from `x0`, restarting from the incumbent with a fresh simplex
/// `opts.restarts` times. The best value never increases across restarts.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    assert_eq!(x0.len(), opts.step.len(), "step length must match dimension");
    let mut result = single_run(&mut f, x0, opts, opts.max_evals);
    for _ in 0..opts.restarts {
        let used = result.evaluations;
        if used >= opts.max_evals {
            break;
        }
        let next = single_run(&mut f, &result.x, opts, opts.max_evals - used);
        let evaluations = used + next.evaluations;
        let iterations = result.iterations + next.iterations;
        if next.f <= result.f {
            result = next;
        } else {
            result.termination = next.termination;
        }
        result.evaluations = evaluations;
        result.iterations = iterations;
    }
    result
}
