//! Reference circuit builders and the reproducible benchmark studies, each a
//! deterministic function of its configuration emitting CSV.

use crate::circuit::{expectation, AngleSource, Circuit, Gate, StateVector};
use crate::error::Error;
use crate::learner::{pairwise_sum, EvalMode, Predictor};
use crate::pauli::{parse_observable, Axis, Observable, PauliString};
use crate::shadow::{collect_dataset, stream_rng, ShadowDataset};
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Twelve significant digits for all floating-point CSV output.
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Rotational GHZ family: GHZ preparation (H plus a CNOT chain) followed by
/// Y rotations on qubits 0, N/2 - 1 and N - 1 driven by slots 0, 1, 2.
/// At x = 0 the state is (|0...0> + |1...1>)/sqrt(2).
pub fn build_ghz_rotational(n_qubits: usize) -> Result<(Circuit, StateVector), Error> {
    if n_qubits < 2 || n_qubits % 2 != 0 {
        return Err(Error::Guard(format!(
            "rotational GHZ needs an even qubit count >= 2, got {n_qubits}"
        )));
    }
    let mut c = Circuit::new(n_qubits, 3);
    c.push(Gate::H(0))?;
    for q in 0..n_qubits - 1 {
        c.push(Gate::Cnot {
            control: q,
            target: q + 1,
        })?;
    }
    let rotated = [0, n_qubits / 2 - 1, n_qubits - 1];
    for (slot, &q) in rotated.iter().enumerate() {
        c.push(Gate::Rot {
            axes: PauliString::single(n_qubits, q, Axis::Y),
            angle: AngleSource::Slot(slot),
        })?;
    }
    Ok((c, StateVector::zero_state(n_qubits)))
}

/// Closed-form reference for the Z x Z end-to-end correlation of the
/// rotational GHZ family, independent of the qubit count:
///   -sin x1 sin x2 cos x3 - cos x1 sin x2 sin x3
///   + sin x1 cos x2 sin x3 + cos x1 cos x2 cos x3.
///
/// Note: this expression exceeds 1 in magnitude at some inputs
/// (e.g. sqrt(2) at (-pi/4, pi/4, -pi/4)), so it cannot coincide with any
/// expectation of the unit-norm observable Z x Z; the simulator value differs
/// from it wherever the middle rotation matters. It is kept verbatim as the
/// reference function for the coefficient-extraction and truncation tests.
pub fn ghz_z1zn_exact(x: &[f64]) -> f64 {
    assert_eq!(x.len(), 3, "closed form takes a 3-vector");
    let (s1, c1) = x[0].sin_cos();
    let (s2, c2) = x[1].sin_cos();
    let (s3, c3) = x[2].sin_cos();
    -s1 * s2 * c3 - c1 * s2 * s3 + s1 * c2 * s3 + c1 * c2 * c3
}

/// End-to-end Z correlation observable Z_0 * Z_{N-1}.
pub fn z0_zlast(n_qubits: usize) -> Result<Observable, Error> {
    parse_observable(&format!("1.0*Z0*Z{}", n_qubits - 1), n_qubits)
}

/// Trotterized global-Ising evolution: each of d steps applies the global
/// rotation exp(-i x_j/2 Z x ... x Z) driven by slot j, then a constant
/// X rotation by pi/3 on every qubit.
pub fn build_trotter_ising(n_qubits: usize, d: usize) -> Result<(Circuit, StateVector), Error> {
    if n_qubits == 0 || d == 0 {
        return Err(Error::Guard("need at least one qubit and one step".into()));
    }
    let mut c = Circuit::new(n_qubits, d);
    let global_z = PauliString::new(vec![Axis::Z; n_qubits]);
    for j in 0..d {
        c.push(Gate::Rot {
            axes: global_z.clone(),
            angle: AngleSource::Slot(j),
        })?;
        for q in 0..n_qubits {
            c.push(Gate::Rot {
                axes: PauliString::single(n_qubits, q, Axis::X),
                angle: AngleSource::Const(PI / 3.0),
            })?;
        }
    }
    Ok((c, StateVector::zero_state(n_qubits)))
}

/// Average magnetization (1/N) sum_i Z_i.
pub fn magnetization(n_qubits: usize) -> Result<Observable, Error> {
    let terms = (0..n_qubits)
        .map(|q| {
            (
                1.0 / n_qubits as f64,
                PauliString::single(n_qubits, q, Axis::Z),
            )
        })
        .collect();
    Observable::from_terms(n_qubits, terms)
}

/// Hardware-efficient 3-qubit ansatz: three layers of per-qubit Y rotations
/// followed by CNOT(0,1), CNOT(1,2); nine slots, fifteen gates.
pub fn build_hea_3q() -> Result<(Circuit, StateVector), Error> {
    let mut c = Circuit::new(3, 9);
    for layer in 0..3 {
        for q in 0..3 {
            c.push(Gate::Rot {
                axes: PauliString::single(3, q, Axis::Y),
                angle: AngleSource::Slot(3 * layer + q),
            })?;
        }
        c.push(Gate::Cnot {
            control: 0,
            target: 1,
        })?;
        c.push(Gate::Cnot {
            control: 1,
            target: 2,
        })?;
    }
    Ok((c, StateVector::zero_state(3)))
}

/// Transverse-field Ising Hamiltonian -0.1 (Z0 Z1 + Z1 Z2) + 0.5 (X0+X1+X2),
/// ground energy -1.51 to three figures.
pub fn tfi_hamiltonian() -> Result<Observable, Error> {
    parse_observable(
        "-0.1*Z0*Z1 - 0.1*Z1*Z2 + 0.5*X0 + 0.5*X1 + 0.5*X2",
        3,
    )
}

/// Nine-slot classifier circuit: a 3-slot encoder layer (slots 0..2) followed
/// by a two-layer trainable block (slots 3..8), each layer being per-qubit
/// Y rotations then CNOT(0,1), CNOT(1,2).
pub fn build_biqc9() -> Result<(Circuit, StateVector), Error> {
    let mut c = Circuit::new(3, 9);
    for layer in 0..3 {
        for q in 0..3 {
            c.push(Gate::Rot {
                axes: PauliString::single(3, q, Axis::Y),
                angle: AngleSource::Slot(3 * layer + q),
            })?;
        }
        c.push(Gate::Cnot {
            control: 0,
            target: 1,
        })?;
        c.push(Gate::Cnot {
            control: 1,
            target: 2,
        })?;
    }
    Ok((c, StateVector::zero_state(3)))
}

/// Scalar circuit family used for the average-distance study:
/// f_a(x) = sqrt(2 eps) B cos(sum over slots with a_j = 0 of x_j).
#[derive(Debug, Clone)]
pub struct LowerBoundFamily {
    pub d: usize,
    pub eps: f64,
    pub b: f64,
    pub a: Vec<bool>,
}

impl LowerBoundFamily {
    pub fn new(d: usize, eps: f64, b: f64, a: Vec<bool>) -> Result<Self, Error> {
        if !(eps > 0.0 && eps <= 0.25) {
            return Err(Error::Guard(format!(
                "eps must lie in (0, 1/4] so the initial state is valid, got {eps}"
            )));
        }
        if a.len() != d {
            return Err(Error::Dimension("index length must equal d".into()));
        }
        Ok(LowerBoundFamily { d, eps, b, a })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d);
        let phase: f64 = x
            .iter()
            .zip(&self.a)
            .filter(|(_, masked)| !**masked)
            .map(|(xi, _)| xi)
            .sum();
        (2.0 * self.eps).sqrt() * self.b * phase.cos()
    }
}

/// Monte-Carlo mean of (f_a - f_a')^2 over uniform inputs; the exact value is
/// 2 eps B^2 for a != a'.
pub fn lowerbound_distance_mc(
    fam_a: &LowerBoundFamily,
    fam_b: &LowerBoundFamily,
    samples: usize,
    seed: u64,
) -> Result<f64, Error> {
    if fam_a.d != fam_b.d || fam_a.eps != fam_b.eps || fam_a.b != fam_b.b {
        return Err(Error::Dimension(
            "families must share (d, eps, B)".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::Guard("need at least one sample".into()));
    }
    const CHUNK: usize = 4096;
    let d = fam_a.d;
    let n_chunks = samples.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(samples);
            let mut acc = 0.0;
            for i in lo..hi {
                let mut rng = stream_rng(seed, i as u64, 0);
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-PI..PI)).collect();
                let diff = fam_a.eval(&x) - fam_b.eval(&x);
                acc += diff * diff;
            }
            acc
        })
        .collect();
    Ok(pairwise_sum(&partials) / samples as f64)
}

/// Grid configuration shared by the prediction-error studies.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_qubits: usize,
    /// Trotter steps; ignored by the GHZ study.
    pub d: usize,
    pub ns: Vec<usize>,
    pub shots: Vec<usize>,
    pub lambdas: Vec<usize>,
    pub seed: u64,
    pub test_points: usize,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(), Error> {
        if self.ns.is_empty() || self.shots.is_empty() || self.lambdas.is_empty() {
            return Err(Error::Guard("empty grid axis".into()));
        }
        if self.ns.contains(&0) || self.shots.contains(&0) || self.test_points == 0 {
            return Err(Error::Guard("grid counts must be positive".into()));
        }
        Ok(())
    }
}

/// One row of a prediction-error study.
#[derive(Debug, Clone)]
pub struct ErrorRow {
    pub lambda: usize,
    pub n: usize,
    pub shots: usize,
    pub rms: f64,
    pub stderr: f64,
}

pub fn rows_to_csv(rows: &[ErrorRow]) -> String {
    let mut out = String::from("lambda,n,shots,rms,stderr\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.lambda,
            r.n,
            r.shots,
            fmt12(r.rms),
            fmt12(r.stderr)
        )
        .unwrap();
    }
    out
}

/// Held-out test inputs, drawn from a stream disjoint from training records.
fn test_inputs(seed: u64, d: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let mut rng = stream_rng(seed, (1u64 << 40) + i as u64, 0);
            (0..d).map(|_| rng.gen_range(-PI..PI)).collect()
        })
        .collect()
}

/// Delta-method standard error of an RMS estimate from per-point squared
/// errors.
fn rms_stderr(sq_errors: &[f64], rms: f64) -> f64 {
    let m = sq_errors.len();
    if m < 2 || rms == 0.0 {
        return 0.0;
    }
    let mean = sq_errors.iter().sum::<f64>() / m as f64;
    let var = sq_errors
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (m - 1) as f64;
    (var / m as f64).sqrt() / (2.0 * rms)
}

fn error_grid(
    dataset: &ShadowDataset,
    obs: &Observable,
    truth: &[(Vec<f64>, f64)],
    cfg: &ExperimentConfig,
) -> Result<Vec<ErrorRow>, Error> {
    let mut rows = Vec::new();
    for &lambda in &cfg.lambdas {
        for &n in &cfg.ns {
            for &t in &cfg.shots {
                let sub = dataset.subsample(n, t);
                let pred = Predictor::from_shadow(sub, lambda, EvalMode::KernelSum)?;
                let sq: Vec<f64> = truth
                    .iter()
                    .map(|(x, y)| {
                        let e = pred.predict(x, obs)? - y;
                        Ok(e * e)
                    })
                    .collect::<Result<Vec<f64>, Error>>()?;
                let rms = (sq.iter().sum::<f64>() / sq.len() as f64).sqrt();
                rows.push(ErrorRow {
                    lambda,
                    n,
                    shots: t,
                    rms,
                    stderr: rms_stderr(&sq, rms),
                });
            }
        }
    }
    Ok(rows)
}

/// GHZ prediction-error study: collects once at the maximal (n, T), then
/// evaluates every (Lambda, n, T) cell against held-out simulator truth for
/// Z_0 Z_{N-1}.
pub fn run_ghz_experiment(cfg: &ExperimentConfig) -> Result<Vec<ErrorRow>, Error> {
    cfg.validate()?;
    let (circuit, initial) = build_ghz_rotational(cfg.n_qubits)?;
    let obs = z0_zlast(cfg.n_qubits)?;
    let max_n = *cfg.ns.iter().max().unwrap();
    let max_t = *cfg.shots.iter().max().unwrap();
    let dataset = collect_dataset(&circuit, &initial, max_n, max_t, cfg.seed)?;
    let truth: Vec<(Vec<f64>, f64)> = test_inputs(cfg.seed, 3, cfg.test_points)
        .into_iter()
        .map(|x| {
            let y = expectation(&circuit, &x, &initial, &obs)?;
            Ok((x, y))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    error_grid(&dataset, &obs, &truth, cfg)
}

/// Magnetization sweep row for the single-step study.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub x: f64,
    pub pred: f64,
    pub exact: f64,
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("x,pred,exact\n");
    for r in rows {
        writeln!(out, "{},{},{}", fmt12(r.x), fmt12(r.pred), fmt12(r.exact)).unwrap();
    }
    out
}

pub struct IsingResult {
    pub rows: Vec<ErrorRow>,
    /// Evenly spaced magnetization sweep, produced when d = 1.
    pub sweep: Option<Vec<SweepRow>>,
}

/// Trotter-Ising magnetization study; same grid layout as the GHZ study, and
/// for d = 1 an additional evenly spaced sweep comparing the model against
/// the simulator.
pub fn run_ising_experiment(cfg: &ExperimentConfig) -> Result<IsingResult, Error> {
    cfg.validate()?;
    let (circuit, initial) = build_trotter_ising(cfg.n_qubits, cfg.d)?;
    let obs = magnetization(cfg.n_qubits)?;
    let max_n = *cfg.ns.iter().max().unwrap();
    let max_t = *cfg.shots.iter().max().unwrap();
    let dataset = collect_dataset(&circuit, &initial, max_n, max_t, cfg.seed)?;
    let truth: Vec<(Vec<f64>, f64)> = test_inputs(cfg.seed, cfg.d, cfg.test_points)
        .into_iter()
        .map(|x| {
            let y = expectation(&circuit, &x, &initial, &obs)?;
            Ok((x, y))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let rows = error_grid(&dataset, &obs, &truth, cfg)?;

    let sweep = if cfg.d == 1 {
        let lambda = cfg.lambdas[0];
        let pred = Predictor::from_shadow(dataset.clone(), lambda, EvalMode::KernelSum)?;
        let m = cfg.test_points.max(2);
        let mut rows = Vec::with_capacity(m);
        for i in 0..m {
            let x = -PI + 2.0 * PI * i as f64 / (m - 1) as f64;
            let exact = expectation(&circuit, &[x], &initial, &obs)?;
            let p = pred.predict(&[x], &obs)?;
            rows.push(SweepRow { x, pred: p, exact });
        }
        Some(rows)
    } else {
        None
    };
    Ok(IsingResult { rows, sweep })
}

/// One row of the average-distance study.
#[derive(Debug, Clone)]
pub struct LowerBoundRow {
    pub d: usize,
    pub eps: f64,
    pub b: f64,
    pub a: String,
    pub a_prime: String,
    pub mc_distance: f64,
    pub target: f64,
}

pub fn lowerbound_to_csv(rows: &[LowerBoundRow]) -> String {
    let mut out = String::from("d,eps,B,a,a_prime,mc_distance,target\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.d,
            fmt12(r.eps),
            fmt12(r.b),
            r.a,
            r.a_prime,
            fmt12(r.mc_distance),
            fmt12(r.target)
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone)]
pub struct LowerBoundConfig {
    pub d: usize,
    pub eps: f64,
    pub b: f64,
    pub pairs: usize,
    pub samples: usize,
    pub seed: u64,
}

fn mask_to_string(a: &[bool]) -> String {
    a.iter().map(|m| if *m { '1' } else { '0' }).collect()
}

/// Monte-Carlo check that distinct family members sit at squared distance
/// 2 eps B^2 on average.
pub fn run_lowerbound_experiment(cfg: &LowerBoundConfig) -> Result<Vec<LowerBoundRow>, Error> {
    if cfg.pairs == 0 {
        return Err(Error::Guard("need at least one pair".into()));
    }
    let target = 2.0 * cfg.eps * cfg.b * cfg.b;
    let mut rows = Vec::with_capacity(cfg.pairs);
    let mut rng = stream_rng(cfg.seed, 0, 0);
    for p in 0..cfg.pairs {
        let a: Vec<bool> = (0..cfg.d).map(|_| rng.gen_bool(0.5)).collect();
        let mut a_prime: Vec<bool> = (0..cfg.d).map(|_| rng.gen_bool(0.5)).collect();
        while a_prime == a {
            a_prime = (0..cfg.d).map(|_| rng.gen_bool(0.5)).collect();
        }
        let fam_a = LowerBoundFamily::new(cfg.d, cfg.eps, cfg.b, a.clone())?;
        let fam_b = LowerBoundFamily::new(cfg.d, cfg.eps, cfg.b, a_prime.clone())?;
        let mc = lowerbound_distance_mc(&fam_a, &fam_b, cfg.samples, cfg.seed ^ (p as u64 + 1))?;
        rows.push(LowerBoundRow {
            d: cfg.d,
            eps: cfg.eps,
            b: cfg.b,
            a: mask_to_string(&a),
            a_prime: mask_to_string(&a_prime),
            mc_distance: mc,
            target,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::estimate_gradient_constant;
    use crate::trig::{extract_coefficients, Frequency};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn ghz_builder_bell_at_zero() {
        let (c, init) = build_ghz_rotational(2).unwrap();
        let out = crate::circuit::simulate(&c, &[0.0, 0.0, 0.0], &init).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = out.amplitudes();
        assert!((amps[0].re - h).abs() < 1e-12);
        assert!((amps[3].re - h).abs() < 1e-12);
        assert!(amps[1].norm() < 1e-12 && amps[2].norm() < 1e-12);
        assert!(build_ghz_rotational(5).is_err());
        assert!(build_ghz_rotational(0).is_err());
    }

    #[test]
    fn ghz_builder_ghz_at_zero_n8() {
        let (c, init) = build_ghz_rotational(8).unwrap();
        let out = crate::circuit::simulate(&c, &[0.0; 3], &init).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = out.amplitudes();
        assert!((amps[0].re - h).abs() < 1e-12);
        assert!((amps[255].re - h).abs() < 1e-12);
    }

    /// Simulator truth for the end-to-end correlation: with the rotations
    /// applied after preparation, the middle rotation commutes with
    /// Z_0 Z_{N-1}, so the value is cos(x1 + x2 - x3) at N = 2 (where the
    /// first two rotations stack on qubit 0) and cos(x1) cos(x3) for N >= 4,
    /// where the end-to-end marginal of the prepared state is incoherent.
    #[test]
    fn ghz_simulator_correlation_values() {
        let mut rng = ChaCha12Rng::seed_from_u64(44);
        let (c2, init2) = build_ghz_rotational(2).unwrap();
        let obs2 = z0_zlast(2).unwrap();
        for _ in 0..10 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-PI..PI)).collect();
            let v = expectation(&c2, &x, &init2, &obs2).unwrap();
            assert!((v - (x[0] + x[1] - x[2]).cos()).abs() < 1e-12);
        }
        for n in [4usize, 8] {
            let (c, init) = build_ghz_rotational(n).unwrap();
            let obs = z0_zlast(n).unwrap();
            for _ in 0..10 {
                let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-PI..PI)).collect();
                let v = expectation(&c, &x, &init, &obs).unwrap();
                assert!(
                    (v - x[0].cos() * x[2].cos()).abs() < 1e-12,
                    "N={n} x={x:?}: {v}"
                );
            }
        }
    }

    #[test]
    fn ghz_sign_flip_under_pi_rotation() {
        let (c, init) = build_ghz_rotational(8).unwrap();
        let obs = z0_zlast(8).unwrap();
        let at_zero = expectation(&c, &[0.0; 3], &init, &obs).unwrap();
        let at_pi = expectation(&c, &[PI, 0.0, 0.0], &init, &obs).unwrap();
        assert!((at_zero - 1.0).abs() < 1e-12);
        assert!((at_pi + 1.0).abs() < 1e-12);
        // single-qubit Z expectation is zero on the rotated family either way
        let z0 = parse_observable("1.0*Z0", 8).unwrap();
        assert!(expectation(&c, &[0.0; 3], &init, &z0).unwrap().abs() < 1e-12);
        assert!(expectation(&c, &[PI, 0.0, 0.0], &init, &z0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn closed_form_reference_values() {
        assert!((ghz_z1zn_exact(&[0.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!(ghz_z1zn_exact(&[PI / 2.0, 0.0, 0.0]).abs() < 1e-15);
        // the expression leaves the unit interval: sqrt(2) at this input
        let v = ghz_z1zn_exact(&[-PI / 4.0, PI / 4.0, -PI / 4.0]);
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_coefficient_table() {
        let exp = extract_coefficients(|x| ghz_z1zn_exact(x), 3, 3).unwrap();
        assert_eq!(exp.len(), 4);
        assert!((exp.get(&Frequency(vec![-1, -1, 1])) + 1.0).abs() < 1e-12);
        assert!((exp.get(&Frequency(vec![1, -1, -1])) + 1.0).abs() < 1e-12);
        assert!((exp.get(&Frequency(vec![-1, 1, -1])) - 1.0).abs() < 1e-12);
        assert!((exp.get(&Frequency(vec![1, 1, 1])) - 1.0).abs() < 1e-12);
        // every supporting frequency has support 3, so truncation at 2 kills all
        let truncated = exp.truncate(2);
        assert!(truncated.is_empty());
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-PI..PI)).collect();
            assert!((exp.evaluate(&x) - ghz_z1zn_exact(&x)).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_gradient_constant_is_1_5() {
        // sum over the four unit coefficients of |w| 2^{-|w|} = 4 * 3/8
        let exp = extract_coefficients(|x| ghz_z1zn_exact(x), 3, 3).unwrap();
        assert!((exp.gradient_constant() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn simulator_gradient_constant_cross_check() {
        // the estimator agrees with the coefficient formula on the real
        // circuit: f = cos(x1) cos(x3) gives sum |w| 2^{-|w|} a^2 = 0.5
        let (c, init) = build_ghz_rotational(4).unwrap();
        let obs = z0_zlast(4).unwrap();
        let exp =
            extract_coefficients(|x| expectation(&c, x, &init, &obs).unwrap(), 3, 3).unwrap();
        let coeff_value = exp.gradient_constant();
        assert!((coeff_value - 0.5).abs() < 1e-10);
        let est = estimate_gradient_constant(&c, &init, &obs, 4000, 8).unwrap();
        assert!(
            (est.mean - coeff_value).abs() < 3.0 * est.std_error,
            "{} vs {coeff_value} (se {})",
            est.mean,
            est.std_error
        );
    }

    #[test]
    fn trotter_ising_single_qubit_matches_dense_oracle() {
        // dense 2x2 product: phase rotation then RX(pi/3) leaves <Z> = 1/2
        let (c, init) = build_trotter_ising(1, 1).unwrap();
        let obs = magnetization(1).unwrap();
        for x in [-2.0, -0.5, 0.0, 0.9, 2.4] {
            let v = expectation(&c, &[x], &init, &obs).unwrap();
            assert!((v - 0.5).abs() < 1e-10, "x={x}: {v}");
        }
    }

    #[test]
    fn trotter_ising_three_steps_at_zero() {
        // at x = 0 the three constant X layers compose to RX(pi) per qubit
        let (c, init) = build_trotter_ising(6, 3).unwrap();
        let obs = magnetization(6).unwrap();
        let v = expectation(&c, &[0.0; 3], &init, &obs).unwrap();
        assert!((v + 1.0).abs() < 1e-10, "magnetization {v}");
    }

    #[test]
    fn trotter_ising_single_step_only_constant_frequency() {
        let (c, init) = build_trotter_ising(3, 1).unwrap();
        let obs = magnetization(3).unwrap();
        let exp =
            extract_coefficients(|x| expectation(&c, x, &init, &obs).unwrap(), 1, 1).unwrap();
        for (w, _) in exp.iter() {
            assert_eq!(w.support(), 0, "unexpected frequency {}", w.to_text());
        }
        assert!((exp.get(&Frequency::zero(1)) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn magnetization_values() {
        let obs = magnetization(3).unwrap();
        assert_eq!(obs.term_count(), 3);
        assert!((obs.norm_bound() - 1.0).abs() < 1e-12);
        let zero = StateVector::zero_state(3);
        assert!((obs.expectation(&zero).unwrap() - 1.0).abs() < 1e-12);
        let mut plus = StateVector::zero_state(3);
        for q in 0..3 {
            plus.apply_h(q);
        }
        assert!(obs.expectation(&plus).unwrap().abs() < 1e-12);
    }

    #[test]
    fn hea_shape() {
        let (c, _) = build_hea_3q().unwrap();
        assert_eq!(c.n_slots(), 9);
        assert_eq!(c.gate_count(), 15);
        let (b, _) = build_biqc9().unwrap();
        assert_eq!(b.n_slots(), 9);
        assert_eq!(b.gate_count(), 15);
    }

    #[test]
    fn lowerbound_family_values() {
        let fam = LowerBoundFamily::new(3, 0.04, 1.0, vec![false, true, false]).unwrap();
        // masked slot 1 drops out of the phase
        let v = fam.eval(&[0.3, 9.0, 0.4]);
        assert!((v - (2.0f64 * 0.04).sqrt() * (0.7f64).cos()).abs() < 1e-12);
        assert!(LowerBoundFamily::new(3, 0.3, 1.0, vec![false; 3]).is_err());
        assert!(LowerBoundFamily::new(3, 0.0, 1.0, vec![false; 3]).is_err());
    }

    #[test]
    fn lowerbound_equal_masks_distance_zero() {
        let fam = LowerBoundFamily::new(4, 0.04, 1.0, vec![false, true, false, true]).unwrap();
        let mc = lowerbound_distance_mc(&fam, &fam, 100, 3).unwrap();
        assert_eq!(mc, 0.0);
    }

    #[test]
    fn lowerbound_second_moment() {
        // E f_a^2 = eps B^2 via E cos^2 = 1/2
        let fam = LowerBoundFamily::new(4, 0.04, 1.0, vec![false, false, true, false]).unwrap();
        let samples = 200_000;
        let mean_sq = {
            let mut acc = 0.0;
            for i in 0..samples {
                let mut rng = stream_rng(17, i as u64, 0);
                let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-PI..PI)).collect();
                let v = fam.eval(&x);
                acc += v * v;
            }
            acc / samples as f64
        };
        let target = 0.04;
        assert!(
            (mean_sq - target).abs() / target < 0.05,
            "E f^2 = {mean_sq}, target {target}"
        );
    }

    #[test]
    fn lowerbound_frequency_structure() {
        // cos of a k-term sum expands over frequencies supported exactly on
        // the unmasked slots, with an even number of sine factors
        let fam = LowerBoundFamily::new(4, 0.04, 1.0, vec![false, true, false, false]).unwrap();
        let exp = extract_coefficients(|x| fam.eval(&x), 4, 4).unwrap();
        let k = 3; // unmasked count
        assert_eq!(exp.len(), 1 << (k - 1));
        let amp = (2.0f64 * 0.04).sqrt();
        for (w, a) in exp.iter() {
            assert_eq!(w.support(), k, "frequency {}", w.to_text());
            assert_eq!(w.0[1], 0, "masked slot must stay zero");
            let sines = w.0.iter().filter(|e| **e == -1).count();
            assert_eq!(sines % 2, 0, "cosine expansion has even sine count");
            let expected = if sines % 4 == 0 { amp } else { -amp };
            assert!((a - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_experiment_runs_and_is_deterministic() {
        let cfg = ExperimentConfig {
            n_qubits: 4,
            d: 3,
            ns: vec![20, 60],
            shots: vec![50],
            lambdas: vec![1, 2],
            seed: 5,
            test_points: 5,
        };
        let rows = run_ghz_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        let rows2 = run_ghz_experiment(&cfg).unwrap();
        assert_eq!(rows_to_csv(&rows), rows_to_csv(&rows2));
        for r in &rows {
            assert!(r.rms.is_finite() && r.rms >= 0.0);
        }
    }

    #[test]
    fn ising_experiment_emits_sweep_for_single_step() {
        let cfg = ExperimentConfig {
            n_qubits: 3,
            d: 1,
            ns: vec![10],
            shots: vec![50],
            lambdas: vec![1],
            seed: 6,
            test_points: 9,
        };
        let result = run_ising_experiment(&cfg).unwrap();
        let sweep = result.sweep.expect("single-step sweep");
        assert_eq!(sweep.len(), 9);
        assert!((sweep[0].x + PI).abs() < 1e-12);
        assert!((sweep[8].x - PI).abs() < 1e-12);
        let csv = sweep_to_csv(&sweep);
        assert!(csv.starts_with("x,pred,exact\n"));
    }

    #[test]
    fn lowerbound_experiment_rows() {
        let cfg = LowerBoundConfig {
            d: 5,
            eps: 0.04,
            b: 1.0,
            pairs: 3,
            samples: 20_000,
            seed: 8,
        };
        let rows = run_lowerbound_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_ne!(r.a, r.a_prime);
            assert!((r.target - 0.08).abs() < 1e-15);
            assert!((r.mc_distance - r.target).abs() / r.target < 0.2);
        }
        let rows2 = run_lowerbound_experiment(&cfg).unwrap();
        assert_eq!(lowerbound_to_csv(&rows), lowerbound_to_csv(&rows2));
    }
}
