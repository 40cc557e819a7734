//! Kernel prediction models over shadow or exact-label training data, plus
//! risk evaluation, gradient-constant estimation, and sample-size planning.
//!
//! The shadow backend averages kernel-weighted shadow estimates over the
//! training set; the exact backend does the same with simulator-computed
//! labels. A precomputed-feature mode regroups the same sum as
//! sum_w beta_w Phi_w(x) for fast repeated queries against one observable.

use crate::circuit::{parameter_shift_grad, Circuit, StateVector, DEFAULT_SHIFT};
use crate::error::Error;
use crate::pauli::Observable;
use crate::shadow::{shadow_estimate, stream_rng, ShadowDataset};
use crate::trig::{cardinality, kernel, FrequencySet, TrigExpansion};
use rand::Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Fixed chunk width for deterministic parallel reductions. Partial sums are
/// produced per chunk in index order and combined pairwise, so results do not
/// depend on thread count.
const REDUCE_CHUNK: usize = 1024;

pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Deterministic parallel sum of f(0) + ... + f(n-1) with a fixed chunk
/// width, so the result does not depend on the thread count.
pub(crate) fn chunked_sum_with<F>(n: usize, chunk: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let n_chunks = n.div_ceil(chunk);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(n);
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            acc
        })
        .collect();
    pairwise_sum(&partials)
}

pub(crate) fn chunked_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    chunked_sum_with(n, REDUCE_CHUNK, f)
}

/// Training-data backend for a predictor.
pub enum Backend {
    /// Raw shadow records; labels are shadow estimates, computed per
    /// observable and cached.
    Shadow(ShadowDataset),
    /// Classically computed labels for one fixed observable.
    Exact { inputs: Vec<Vec<f64>>, labels: Vec<f64> },
}

/// How predictions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Direct kernel sum over training examples per query.
    KernelSum,
    /// Precompute beta_w once per observable, then evaluate
    /// sum_w beta_w Phi_w(x) per query.
    Features,
}

/// Default cap on the truncated frequency-set size for feature precomputation.
pub const DEFAULT_FEATURE_CAP: usize = 4_000_000;

pub struct Predictor {
    backend: Backend,
    lambda: usize,
    d: usize,
    mode: EvalMode,
    feature_cap: usize,
    label_cache: Mutex<HashMap<String, Arc<Vec<f64>>>>,
    feature_cache: Mutex<HashMap<String, Arc<FeatureModel>>>,
}

impl Predictor {
    pub fn from_shadow(dataset: ShadowDataset, lambda: usize, mode: EvalMode) -> Result<Self, Error> {
        let d = dataset.n_slots;
        if lambda > d {
            return Err(Error::Guard(format!(
                "truncation {lambda} exceeds input dimension {d}"
            )));
        }
        if dataset.size() == 0 {
            return Err(Error::Guard("empty training set".into()));
        }
        Ok(Predictor {
            backend: Backend::Shadow(dataset),
            lambda,
            d,
            mode,
            feature_cap: DEFAULT_FEATURE_CAP,
            label_cache: Mutex::new(HashMap::new()),
            feature_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Exact backend over (x, label) pairs computed for one fixed observable.
    pub fn from_exact(pairs: Vec<(Vec<f64>, f64)>, lambda: usize, mode: EvalMode) -> Result<Self, Error> {
        if pairs.is_empty() {
            return Err(Error::Guard("empty training set".into()));
        }
        let d = pairs[0].0.len();
        if lambda > d {
            return Err(Error::Guard(format!(
                "truncation {lambda} exceeds input dimension {d}"
            )));
        }
        let mut inputs = Vec::with_capacity(pairs.len());
        let mut labels = Vec::with_capacity(pairs.len());
        for (x, y) in pairs {
            if x.len() != d {
                return Err(Error::Dimension("inconsistent input dimensions".into()));
            }
            if x.iter().any(|v| v.abs() > std::f64::consts::PI + 1e-9) {
                return Err(Error::Guard(
                    "training inputs must lie in [-pi, pi]^d".into(),
                ));
            }
            inputs.push(x);
            labels.push(y);
        }
        Ok(Predictor {
            backend: Backend::Exact { inputs, labels },
            lambda,
            d,
            mode,
            feature_cap: DEFAULT_FEATURE_CAP,
            label_cache: Mutex::new(HashMap::new()),
            feature_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_feature_cap(mut self, cap: usize) -> Self {
        self.feature_cap = cap;
        self
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn input_dim(&self) -> usize {
        self.d
    }

    pub fn training_size(&self) -> usize {
        match &self.backend {
            Backend::Shadow(ds) => ds.size(),
            Backend::Exact { inputs, .. } => inputs.len(),
        }
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    fn training_input(&self, i: usize) -> &[f64] {
        match &self.backend {
            Backend::Shadow(ds) => &ds.records[i].x,
            Backend::Exact { inputs, .. } => &inputs[i],
        }
    }

    /// Labels g(x^(i), O): shadow estimates (computed once per observable and
    /// cached) or the stored exact labels.
    pub fn labels(&self, obs: &Observable) -> Result<Arc<Vec<f64>>, Error> {
        match &self.backend {
            Backend::Exact { labels, .. } => Ok(Arc::new(labels.clone())),
            Backend::Shadow(ds) => {
                let key = obs.to_string();
                if let Some(hit) = self.label_cache.lock().unwrap().get(&key) {
                    return Ok(hit.clone());
                }
                let labels: Vec<f64> = ds
                    .records
                    .par_iter()
                    .map(|r| shadow_estimate(r, obs))
                    .collect::<Result<Vec<_>, _>>()?;
                let arc = Arc::new(labels);
                self.label_cache
                    .lock()
                    .unwrap()
                    .insert(key, arc.clone());
                Ok(arc)
            }
        }
    }

    /// h(x, O) = (1/n) sum_i kappa_Lambda(x, x^(i)) g(x^(i), O).
    pub fn predict(&self, x: &[f64], obs: &Observable) -> Result<f64, Error> {
        if x.len() != self.d {
            return Err(Error::Dimension(format!(
                "query has {} entries, predictor expects {}",
                x.len(),
                self.d
            )));
        }
        match self.mode {
            EvalMode::KernelSum => self.predict_kernel_sum(x, obs),
            EvalMode::Features => Ok(self.features(obs)?.predict(x)),
        }
    }

    fn predict_kernel_sum(&self, x: &[f64], obs: &Observable) -> Result<f64, Error> {
        let labels = self.labels(obs)?;
        let n = self.training_size();
        let lambda = self.lambda;
        let total = chunked_sum(n, |i| {
            let xi = self.training_input(i);
            kernel(x, xi, lambda).expect("dimensions validated") * labels[i]
        });
        Ok(total / n as f64)
    }

    /// Precomputed features for one observable:
    /// beta_w = 2^|w| (1/n) sum_i Phi_w(x^(i)) g(x^(i), O). Cached.
    pub fn features(&self, obs: &Observable) -> Result<Arc<FeatureModel>, Error> {
        let key = obs.to_string();
        if let Some(hit) = self.feature_cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let card = cardinality(self.d, self.lambda);
        if card > self.feature_cap as u128 {
            return Err(Error::Guard(format!(
                "frequency set size {card} exceeds the feature cap {}",
                self.feature_cap
            )));
        }
        let labels = self.labels(obs)?;
        let model = Arc::new(FeatureModel::build(
            self.d,
            self.lambda,
            self.training_size(),
            |i| self.training_input(i),
            &labels,
        )?);
        self.feature_cache.lock().unwrap().insert(key, model.clone());
        Ok(model)
    }
}

/// A trained feature-space model: predict(x) = sum_w beta_w Phi_w(x).
pub struct FeatureModel {
    pub d: usize,
    pub lambda: usize,
    set: FrequencySet,
    pub beta: Vec<f64>,
}

/// Walks every monomial value Phi_w(x) in the canonical frequency order,
/// sharing partial products along combination prefixes: roughly two
/// multiplications per frequency instead of one per support entry.
struct ProductWalker {
    d: usize,
    lambda: usize,
    /// segment for depth j lives at [2^j - 1, 2^{j+1} - 1)
    buf: Vec<f64>,
}

impl ProductWalker {
    fn new(d: usize, lambda: usize) -> Self {
        ProductWalker {
            d,
            lambda,
            buf: vec![0.0; (1 << (lambda + 1)) - 1],
        }
    }

    fn run<F: FnMut(f64)>(&mut self, cosx: &[f64], sinx: &[f64], mut emit: F) {
        self.buf[0] = 1.0;
        for support in 0..=self.lambda {
            self.walk(0, 0, support, cosx, sinx, &mut emit);
        }
    }

    /// depth = positions already chosen; the depth-j segment holds the 2^j
    /// partial products with the first chosen position as the top mask bit.
    fn walk<F: FnMut(f64)>(
        &mut self,
        depth: usize,
        start: usize,
        target: usize,
        cosx: &[f64],
        sinx: &[f64],
        emit: &mut F,
    ) {
        if depth == target {
            let lo = (1 << depth) - 1;
            for m in 0..(1 << depth) {
                emit(self.buf[lo + m]);
            }
            return;
        }
        // positions remaining must suffice to reach the target support
        for p in start..=(self.d - (target - depth)) {
            let (c, s) = (cosx[p], sinx[p]);
            let src = (1 << depth) - 1;
            let dst = (1 << (depth + 1)) - 1;
            for m in 0..(1 << depth) {
                let v = self.buf[src + m];
                self.buf[dst + 2 * m] = v * c;
                self.buf[dst + 2 * m + 1] = v * s;
            }
            self.walk(depth + 1, p + 1, target, cosx, sinx, emit);
        }
    }
}

impl FeatureModel {
    fn build<'a, G>(
        d: usize,
        lambda: usize,
        n: usize,
        input: G,
        labels: &[f64],
    ) -> Result<Self, Error>
    where
        G: Fn(usize) -> &'a [f64] + Sync,
    {
        let set = FrequencySet::enumerate(d, lambda)?;
        let m = set.len();
        // fixed-size chunks over training examples, partials combined in order
        let n_chunks = n.div_ceil(REDUCE_CHUNK);
        let partials: Vec<Vec<f64>> = (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let lo = c * REDUCE_CHUNK;
                let hi = (lo + REDUCE_CHUNK).min(n);
                let mut acc = vec![0.0f64; m];
                let mut walker = ProductWalker::new(d, lambda);
                for i in lo..hi {
                    let x = input(i);
                    let g = labels[i];
                    if g == 0.0 {
                        continue;
                    }
                    let cosx: Vec<f64> = x.iter().map(|v| v.cos()).collect();
                    let sinx: Vec<f64> = x.iter().map(|v| v.sin()).collect();
                    let mut j = 0;
                    walker.run(&cosx, &sinx, |prod| {
                        acc[j] += g * prod;
                        j += 1;
                    });
                }
                acc
            })
            .collect();
        let mut beta = vec![0.0f64; m];
        for (j, b) in beta.iter_mut().enumerate() {
            let column: Vec<f64> = partials.iter().map(|p| p[j]).collect();
            *b = pairwise_sum(&column);
        }
        let inv_n = 1.0 / n as f64;
        for (j, w) in set.iter().enumerate() {
            beta[j] *= (1u64 << w.support()) as f64 * inv_n;
        }
        Ok(FeatureModel {
            d,
            lambda,
            set,
            beta,
        })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d, "query dimension mismatch");
        let cosx: Vec<f64> = x.iter().map(|v| v.cos()).collect();
        let sinx: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let mut walker = ProductWalker::new(self.d, self.lambda);
        let mut acc = 0.0;
        let mut j = 0;
        walker.run(&cosx, &sinx, |prod| {
            acc += self.beta[j] * prod;
            j += 1;
        });
        acc
    }

    pub fn frequency_set(&self) -> &FrequencySet {
        &self.set
    }

    /// Coefficient view of the model (absent entries are below the storage
    /// threshold).
    pub fn to_expansion(&self) -> TrigExpansion {
        let mut exp = TrigExpansion::new(self.d);
        for (w, b) in self.set.iter().zip(&self.beta) {
            exp.set(w.clone(), *b);
        }
        exp
    }

    pub fn from_expansion(exp: &TrigExpansion, lambda: usize) -> Result<Self, Error> {
        let set = FrequencySet::enumerate(exp.d, lambda)?;
        let beta: Vec<f64> = set.iter().map(|w| exp.get(w)).collect();
        Ok(FeatureModel {
            d: exp.d,
            lambda,
            set,
            beta,
        })
    }
}

/// A predictor restored from disk: either a standalone feature model or a
/// shadow-backed predictor with its labels already cached.
pub enum LoadedPredictor {
    Features {
        model: FeatureModel,
        observable: String,
    },
    Shadow {
        predictor: Predictor,
        observable: String,
    },
}

impl LoadedPredictor {
    pub fn predict(&self, x: &[f64]) -> Result<f64, Error> {
        match self {
            LoadedPredictor::Features { model, .. } => Ok(model.predict(x)),
            LoadedPredictor::Shadow {
                predictor,
                observable,
            } => {
                let n_qubits = match &predictor.backend {
                    Backend::Shadow(ds) => ds.n_qubits,
                    Backend::Exact { .. } => unreachable!("shadow variant holds shadow data"),
                };
                let obs = crate::pauli::parse_observable(observable, n_qubits)?;
                predictor.predict(x, &obs)
            }
        }
    }
}

/// Persists a predictor for one observable: a header line with the backend,
/// truncation, dimension and observable text, followed by either the feature
/// expansion (features mode) or a dataset-file reference plus the cached
/// labels (kernel-sum mode).
pub fn save_predictor(
    pred: &Predictor,
    obs: &Observable,
    dataset_path: Option<&std::path::Path>,
    path: &std::path::Path,
) -> Result<(), Error> {
    use std::fmt::Write as _;
    let mut out = String::new();
    match pred.mode {
        EvalMode::Features => {
            let model = pred.features(obs)?;
            writeln!(
                out,
                "backend=features lambda={} d={} observable={}",
                pred.lambda, pred.d, obs
            )
            .unwrap();
            out.push_str(&model.to_expansion().to_text());
        }
        EvalMode::KernelSum => {
            let dataset_path = dataset_path.ok_or_else(|| {
                Error::Guard("kernel-sum persistence needs the dataset file path".into())
            })?;
            let labels = pred.labels(obs)?;
            writeln!(
                out,
                "backend=shadow lambda={} d={} observable={} dataset={}",
                pred.lambda,
                pred.d,
                obs,
                dataset_path.display()
            )
            .unwrap();
            for g in labels.iter() {
                writeln!(out, "g= {g:.17e}").unwrap();
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn load_predictor(path: &std::path::Path) -> Result<LoadedPredictor, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty predictor file".into()))?;
    let mut fields = std::collections::HashMap::new();
    for kv in header.split_whitespace() {
        if let Some((k, v)) = kv.split_once('=') {
            // the observable text itself contains no spaces only if simple;
            // reassemble below for the observable key
            fields.insert(k.to_string(), v.to_string());
        }
    }
    // observable text may contain spaces; recover it from the raw header
    let observable = header
        .split_once("observable=")
        .map(|(_, rest)| {
            rest.split(" dataset=")
                .next()
                .unwrap_or(rest)
                .trim()
                .to_string()
        })
        .ok_or_else(|| Error::Format("missing observable in predictor header".into()))?;
    let backend = fields
        .get("backend")
        .ok_or_else(|| Error::Format("missing backend in predictor header".into()))?;
    let lambda: usize = fields
        .get("lambda")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Format("bad lambda in predictor header".into()))?;
    let d: usize = fields
        .get("d")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Format("bad d in predictor header".into()))?;
    match backend.as_str() {
        "features" => {
            let body: Vec<&str> = lines.collect();
            let exp = crate::trig::TrigExpansion::from_text(&body.join("\n"), d)?;
            let model = FeatureModel::from_expansion(&exp, lambda)?;
            Ok(LoadedPredictor::Features { model, observable })
        }
        "shadow" => {
            let dataset_path = header
                .split_once("dataset=")
                .map(|(_, rest)| rest.trim().to_string())
                .ok_or_else(|| Error::Format("missing dataset reference".into()))?;
            let dataset = crate::shadow::load_dataset(std::path::Path::new(&dataset_path))?;
            let labels: Vec<f64> = lines
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    l.strip_prefix("g=")
                        .map(str::trim)
                        .ok_or_else(|| Error::Format(format!("bad label line `{l}`")))?
                        .parse::<f64>()
                        .map_err(|_| Error::Format(format!("bad label value in `{l}`")))
                })
                .collect::<Result<_, _>>()?;
            if labels.len() != dataset.size() {
                return Err(Error::Format(format!(
                    "{} cached labels for {} records",
                    labels.len(),
                    dataset.size()
                )));
            }
            let obs = crate::pauli::parse_observable(&observable, dataset.n_qubits)?;
            let predictor = Predictor::from_shadow(dataset, lambda, EvalMode::KernelSum)?;
            predictor
                .label_cache
                .lock()
                .unwrap()
                .insert(obs.to_string(), Arc::new(labels));
            Ok(LoadedPredictor::Shadow {
                predictor,
                observable,
            })
        }
        other => Err(Error::Format(format!("unknown backend `{other}`"))),
    }
}

/// Root-mean-squared prediction error over a labelled test set.
pub fn rms_error(
    pred: &Predictor,
    obs: &Observable,
    test: &[(Vec<f64>, f64)],
) -> Result<f64, Error> {
    if test.is_empty() {
        return Err(Error::Guard("empty test set".into()));
    }
    let mut acc = 0.0;
    for (x, truth) in test {
        let e = pred.predict(x, obs)? - truth;
        acc += e * e;
    }
    Ok((acc / test.len() as f64).sqrt())
}

/// Monte-Carlo estimate of the uniform-average squared gradient norm
/// E_x ||grad_x Tr(rho(x) O)||^2, with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct GradientConstant {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

pub fn estimate_gradient_constant(
    circuit: &Circuit,
    initial: &StateVector,
    obs: &Observable,
    n_samples: usize,
    seed: u64,
) -> Result<GradientConstant, Error> {
    if n_samples == 0 {
        return Err(Error::Guard("need at least one sample".into()));
    }
    let d = circuit.n_slots();
    let values: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64, 0);
            let x: Vec<f64> = (0..d)
                .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            let mut sq = 0.0;
            for k in 0..d {
                let g = parameter_shift_grad(circuit, &x, initial, obs, k, DEFAULT_SHIFT)?;
                sq += g * g;
            }
            Ok(sq)
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    let mean = pairwise_sum(&values) / n_samples as f64;
    let var = if n_samples > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n_samples - 1) as f64
    } else {
        0.0
    };
    Ok(GradientConstant {
        mean,
        std_error: (var / n_samples as f64).sqrt(),
        samples: n_samples,
    })
}

/// Truncation from a gradient-constant bound: Lambda = max(1, ceil(4C/eps)),
/// clamped to the full expansion at d.
pub fn lambda_for_target(c: f64, epsilon: f64, d: usize) -> usize {
    let raw = (4.0 * c / epsilon).ceil();
    let lambda = if raw < 1.0 { 1 } else { raw as usize };
    lambda.min(d)
}

/// Shadow-backend sample size
/// n = ceil(|C(Lambda)| * 2 B^2 9^K / eps * ln(2 |C(Lambda)| / delta)).
pub fn sample_size(
    lambda: usize,
    b: f64,
    k: usize,
    epsilon: f64,
    delta: f64,
    d: usize,
) -> Result<u64, Error> {
    if !(0.0..1.0).contains(&epsilon) || epsilon == 0.0 || !(0.0..1.0).contains(&delta) || delta == 0.0
    {
        return Err(Error::Guard(
            "epsilon and delta must lie in (0, 1)".into(),
        ));
    }
    if lambda > d {
        return Err(Error::Guard(format!(
            "truncation {lambda} exceeds dimension {d}"
        )));
    }
    let card = cardinality(d, lambda) as f64;
    let n = card * 2.0 * b * b * 9f64.powi(k as i32) / epsilon * (2.0 * card / delta).ln();
    Ok(n.ceil().max(1.0) as u64)
}

/// Exact-backend sample size with the full expansion:
/// n = ceil(3^d B^2 ln(2 * 3^d / delta) / (2 eps)).
pub fn full_expansion_sample_size(d: usize, b: f64, epsilon: f64, delta: f64) -> Result<u64, Error> {
    if !(0.0..1.0).contains(&epsilon) || epsilon == 0.0 || !(0.0..1.0).contains(&delta) || delta == 0.0
    {
        return Err(Error::Guard(
            "epsilon and delta must lie in (0, 1)".into(),
        ));
    }
    let full = 3f64.powi(d as i32);
    let n = full * b * b * (2.0 * full / delta).ln() / (2.0 * epsilon);
    Ok(n.ceil().max(1.0) as u64)
}

/// Information-theoretic lower bound on the training-set size,
/// n >= (1 - eps)(c1 * d - ln 2) / (eps * T), with the unpinned constant
/// c1 in (0, 1) supplied by the caller.
pub fn sample_size_lower_bound(
    d: usize,
    epsilon: f64,
    shots: usize,
    c1: f64,
) -> Result<f64, Error> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Guard("epsilon must lie in (0, 1)".into()));
    }
    if !(c1 > 0.0 && c1 < 1.0) {
        return Err(Error::Guard("c1 must lie in (0, 1)".into()));
    }
    if shots == 0 {
        return Err(Error::Guard("shot count must be positive".into()));
    }
    let bound = (1.0 - epsilon) * (c1 * d as f64 - 2f64.ln()) / (epsilon * shots as f64);
    Ok(bound.max(0.0))
}

/// Planning record for a target accuracy under the shadow backend.
#[derive(Debug, Clone)]
pub struct SampleSizePlan {
    pub epsilon: f64,
    pub delta: f64,
    pub b: f64,
    pub k: usize,
    pub c: f64,
    pub lambda: usize,
    pub cardinality: u128,
    pub n: u64,
    pub full_expansion_n: u64,
}

pub fn plan(
    epsilon: f64,
    delta: f64,
    b: f64,
    k: usize,
    c: f64,
    d: usize,
) -> Result<SampleSizePlan, Error> {
    let lambda = lambda_for_target(c, epsilon, d);
    Ok(SampleSizePlan {
        epsilon,
        delta,
        b,
        k,
        c,
        lambda,
        cardinality: cardinality(d, lambda),
        n: sample_size(lambda, b, k, epsilon, delta, d)?,
        full_expansion_n: full_expansion_sample_size(d, b, epsilon, delta)?,
    })
}
