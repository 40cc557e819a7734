//! Offline variational optimization through the surrogate predictor: VQE and
//! a binary classifier whose objective and gradients are evaluated entirely
//! on the learned model, with no circuit simulation inside the loop.

use crate::circuit::{expectation, StateVector};
use crate::error::Error;
use crate::experiments::build_biqc9;
use crate::learner::{chunked_sum_with, EvalMode, FeatureModel, Predictor};
use crate::pauli::{parse_observable, Observable};
use crate::shadow::stream_rng;
use rand::Rng;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

/// Gradient-descent settings. Initial parameters are drawn uniformly from
/// [-pi, pi]^d using the seed.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub max_iters: usize,
    pub shift: f64,
    pub seed: u64,
}

impl OptimizerConfig {
    pub fn new(learning_rate: f64, max_iters: usize, seed: u64) -> Self {
        OptimizerConfig {
            learning_rate,
            max_iters,
            shift: crate::circuit::DEFAULT_SHIFT,
            seed,
        }
    }
}

/// Per-iteration record: iteration index, parameters, objective value.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub iter: usize,
    pub objective: f64,
    pub params: Vec<f64>,
}

/// Optimization history including the initialization row.
#[derive(Debug, Clone)]
pub struct TrainTrace {
    pub rows: Vec<TraceRow>,
}

impl TrainTrace {
    pub fn final_params(&self) -> &[f64] {
        &self.rows.last().expect("trace is never empty").params
    }

    pub fn final_objective(&self) -> f64 {
        self.rows.last().expect("trace is never empty").objective
    }

    /// CSV export: `iter,objective,theta_0,...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let d = self.rows[0].params.len();
        write!(out, "iter,objective").unwrap();
        for k in 0..d {
            write!(out, ",theta_{k}").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            write!(out, "{},{}", row.iter, fmt12(row.objective)).unwrap();
            for p in &row.params {
                write!(out, ",{}", fmt12(*p)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Twelve significant digits, stable across runs.
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Evaluation handle that avoids per-query cache lookups inside hot loops.
enum Surrogate<'a> {
    Features(Arc<FeatureModel>),
    KernelSum(&'a Predictor, &'a Observable),
}

impl<'a> Surrogate<'a> {
    fn new(pred: &'a Predictor, obs: &'a Observable) -> Result<Self, Error> {
        match pred.mode() {
            EvalMode::Features => Ok(Surrogate::Features(pred.features(obs)?)),
            EvalMode::KernelSum => Ok(Surrogate::KernelSum(pred, obs)),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Surrogate::Features(m) => m.predict(x),
            Surrogate::KernelSum(pred, obs) => {
                pred.predict(x, obs).expect("validated at construction")
            }
        }
    }
}

/// Parameter-shift derivative of the surrogate along coordinate k. The
/// surrogate is per-coordinate degree-1 trigonometric, so the rule is exact.
pub fn surrogate_gradient(
    pred: &Predictor,
    obs: &Observable,
    x: &[f64],
    k: usize,
    alpha: f64,
) -> Result<f64, Error> {
    if alpha.rem_euclid(PI).abs() < 1e-12 || (alpha.rem_euclid(PI) - PI).abs() < 1e-12 {
        return Err(Error::Guard(format!(
            "shift alpha = {alpha} is a multiple of pi"
        )));
    }
    let sur = Surrogate::new(pred, obs)?;
    Ok(shift_grad(&sur, x, k, alpha))
}

fn shift_grad(sur: &Surrogate, x: &[f64], k: usize, alpha: f64) -> f64 {
    let mut xp = x.to_vec();
    xp[k] += alpha;
    let mut xm = x.to_vec();
    xm[k] -= alpha;
    (sur.eval(&xp) - sur.eval(&xm)) / (2.0 * alpha.sin())
}

/// Gradient descent on theta -> h(theta, H) through the surrogate.
pub fn offline_vqe(
    pred: &Predictor,
    hamiltonian: &Observable,
    cfg: &OptimizerConfig,
) -> Result<TrainTrace, Error> {
    let d = pred.input_dim();
    let sur = Surrogate::new(pred, hamiltonian)?;
    let mut rng = stream_rng(cfg.seed, 0, 0);
    let mut theta: Vec<f64> = (0..d).map(|_| rng.gen_range(-PI..PI)).collect();
    let mut rows = Vec::with_capacity(cfg.max_iters + 1);
    rows.push(TraceRow {
        iter: 0,
        objective: sur.eval(&theta),
        params: theta.clone(),
    });
    for it in 1..=cfg.max_iters {
        let grad: Vec<f64> = (0..d).map(|k| shift_grad(&sur, &theta, k, cfg.shift)).collect();
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= cfg.learning_rate * g;
        }
        rows.push(TraceRow {
            iter: it,
            objective: sur.eval(&theta),
            params: theta.clone(),
        });
    }
    Ok(TrainTrace { rows })
}

/// Labelled sample: 3-dimensional input and a +-1 class.
pub type LabelledSample = (Vec<f64>, f64);

/// Hard cap on rejection-sampling draws per requested example.
const DRAW_CAP_FACTOR: usize = 1000;

/// Synthetic binary dataset: z ~ Unif[-pi, pi]^3, labelled by the sign of the
/// exact expectation of X on qubit 0 after the 9-slot encoder+ansatz circuit
/// at a hidden parameter point theta* drawn once from the seed. Rejection
/// sampling fills exactly n_pos positive and n_neg negative rows, interleaved
/// so every prefix split stays near-balanced.
pub fn synth_classification_dataset(
    seed: u64,
    n_pos: usize,
    n_neg: usize,
) -> Result<(Vec<LabelledSample>, Vec<f64>), Error> {
    let (circuit, initial) = build_biqc9()?;
    let obs = parse_observable("1.0*X0", 3)?;
    let mut theta_rng = stream_rng(seed, 0, 0);
    let theta_star: Vec<f64> = (0..6).map(|_| theta_rng.gen_range(-PI..PI)).collect();

    let mut pos = Vec::with_capacity(n_pos);
    let mut neg = Vec::with_capacity(n_neg);
    let cap = DRAW_CAP_FACTOR * (n_pos + n_neg);
    let mut draw = 0u64;
    while (pos.len() < n_pos || neg.len() < n_neg) && (draw as usize) < cap {
        draw += 1;
        let mut zrng = stream_rng(seed, draw, 0);
        let z: Vec<f64> = (0..3).map(|_| zrng.gen_range(-PI..PI)).collect();
        let mut x = z.clone();
        x.extend_from_slice(&theta_star);
        let value = expectation(&circuit, &x, &initial, &obs)?;
        let y = if value > 0.0 { 1.0 } else { -1.0 };
        if y > 0.0 && pos.len() < n_pos {
            pos.push((z, y));
        } else if y < 0.0 && neg.len() < n_neg {
            neg.push((z, y));
        }
    }
    if pos.len() < n_pos || neg.len() < n_neg {
        return Err(Error::Guard(format!(
            "rejection sampling cap {cap} reached with {}/{} positives and {}/{} negatives",
            pos.len(),
            n_pos,
            neg.len(),
            n_neg
        )));
    }
    let mut data = Vec::with_capacity(n_pos + n_neg);
    let mut pi_ = pos.into_iter();
    let mut ni = neg.into_iter();
    loop {
        match (pi_.next(), ni.next()) {
            (None, None) => break,
            (p, n) => {
                if let Some(p) = p {
                    data.push(p);
                }
                if let Some(n) = n {
                    data.push(n);
                }
            }
        }
    }
    Ok((data, theta_star))
}

/// Batch gradient descent on L(theta) = (1/m) sum 1/2 (g(z_i, theta) - y_i)^2
/// where g queries the surrogate at the concatenation (z_i, theta).
pub fn offline_classifier_train(
    pred: &Predictor,
    obs: &Observable,
    train: &[LabelledSample],
    cfg: &OptimizerConfig,
) -> Result<TrainTrace, Error> {
    if train.is_empty() {
        return Err(Error::Guard("empty training set".into()));
    }
    let z_dim = train[0].0.len();
    let theta_dim = pred
        .input_dim()
        .checked_sub(z_dim)
        .ok_or_else(|| Error::Dimension("predictor dimension below input dimension".into()))?;
    if theta_dim == 0 {
        return Err(Error::Dimension("no trainable slots".into()));
    }
    let sur = Surrogate::new(pred, obs)?;
    let m = train.len();
    let mut rng = stream_rng(cfg.seed, 0, 0);
    let mut theta: Vec<f64> = (0..theta_dim).map(|_| rng.gen_range(-PI..PI)).collect();

    let eval_loss = |theta: &[f64]| -> f64 {
        chunked_sum_with(m, 16, |i| {
            let (z, y) = &train[i];
            let mut x = z.clone();
            x.extend_from_slice(theta);
            let r = sur.eval(&x) - y;
            0.5 * r * r
        }) / m as f64
    };

    let mut rows = Vec::with_capacity(cfg.max_iters + 1);
    rows.push(TraceRow {
        iter: 0,
        objective: eval_loss(&theta),
        params: theta.clone(),
    });
    for it in 1..=cfg.max_iters {
        let mut grad = vec![0.0f64; theta_dim];
        for (k, gk) in grad.iter_mut().enumerate() {
            *gk = chunked_sum_with(m, 16, |i| {
                let (z, y) = &train[i];
                let mut x = z.clone();
                x.extend_from_slice(&theta);
                let g = sur.eval(&x);
                let mut xp = x.clone();
                xp[z_dim + k] += cfg.shift;
                let mut xm = x;
                xm[z_dim + k] -= cfg.shift;
                let dg = (sur.eval(&xp) - sur.eval(&xm)) / (2.0 * cfg.shift.sin());
                (g - y) * dg
            }) / m as f64;
        }
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= cfg.learning_rate * g;
        }
        rows.push(TraceRow {
            iter: it,
            objective: eval_loss(&theta),
            params: theta.clone(),
        });
    }
    Ok(TrainTrace { rows })
}

/// Fraction of samples whose predicted sign matches the label.
pub fn classifier_accuracy(
    pred: &Predictor,
    obs: &Observable,
    theta: &[f64],
    set: &[LabelledSample],
) -> Result<f64, Error> {
    if set.is_empty() {
        return Err(Error::Guard("empty evaluation set".into()));
    }
    let sur = Surrogate::new(pred, obs)?;
    let hits = chunked_sum_with(set.len(), 16, |i| {
        let (z, y) = &set[i];
        let mut x = z.clone();
        x.extend_from_slice(theta);
        let g = sur.eval(&x);
        let predicted = if g > 0.0 { 1.0 } else { -1.0 };
        if predicted == *y {
            1.0
        } else {
            0.0
        }
    });
    Ok(hits / set.len() as f64)
}

/// Exact re-evaluation of optimized parameters on the simulator.
pub fn exact_energy(
    circuit: &crate::circuit::Circuit,
    initial: &StateVector,
    hamiltonian: &Observable,
    theta: &[f64],
) -> Result<f64, Error> {
    expectation(circuit, theta, initial, hamiltonian)
}
