//! Trigonometric-monomial machinery: frequency enumeration, basis evaluation,
//! the truncated kernel with an O(d*Lambda) evaluation path, exact coefficient
//! extraction on a 3-point quadrature grid, and the transfer-matrix
//! decompositions of Z rotations and general Pauli rotations.
//!
//! A frequency w in {0, +1, -1}^d selects the basis monomial
//! Phi_w(x) = prod_i {1, cos x_i, sin x_i}. Circuit mean values of programs
//! whose slots each drive a single rotation expand as f(x) = sum_w a_w Phi_w(x).
//!
//! Cardinality note: |C(d, L)| = sum_{l<=L} C(d,l) 2^l. At d = 30 this gives
//! 61, 1801, 34281, 472761 for L = 1..4; a printed reference value of 472761
//! attributed to L = 3 actually corresponds to L = 4.

use crate::error::Error;
use crate::pauli::PauliString;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Maximum input dimension accepted by the exact-quadrature extraction
/// (3^d function evaluations).
pub const MAX_EXTRACTION_DIM: usize = 12;

/// A frequency vector w in {0, +1, -1}^d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frequency(pub Vec<i8>);

impl Frequency {
    pub fn zero(d: usize) -> Self {
        Frequency(vec![0; d])
    }

    pub fn support(&self) -> usize {
        self.0.iter().filter(|e| **e != 0).count()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Ascii form over {0, +, -}, e.g. `+-0`.
    pub fn to_text(&self) -> String {
        self.0
            .iter()
            .map(|e| match e {
                0 => '0',
                1 => '+',
                _ => '-',
            })
            .collect()
    }

    pub fn from_text(text: &str) -> Result<Self, Error> {
        let entries = text
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::Parse(format!("bad frequency character `{other}`"))),
            })
            .collect::<Result<Vec<i8>, Error>>()?;
        Ok(Frequency(entries))
    }
}

/// Phi_w(x): product over coordinates of 1, cos x_i, or sin x_i.
pub fn phi(omega: &Frequency, x: &[f64]) -> f64 {
    assert_eq!(omega.dim(), x.len(), "frequency/input length mismatch");
    let mut p = 1.0;
    for (e, xi) in omega.0.iter().zip(x) {
        match e {
            0 => {}
            1 => p *= xi.cos(),
            _ => p *= xi.sin(),
        }
    }
    p
}

/// |C(d, Lambda)| = sum_{l=0}^{Lambda} C(d, l) 2^l.
pub fn cardinality(d: usize, lambda: usize) -> u128 {
    assert!(lambda <= d, "truncation exceeds dimension");
    let mut total: u128 = 0;
    let mut binom: u128 = 1; // C(d, l)
    let mut pow2: u128 = 1;
    for l in 0..=lambda {
        total += binom * pow2;
        binom = binom * (d as u128 - l as u128) / (l as u128 + 1);
        pow2 *= 2;
    }
    total
}

/// All frequencies with support <= Lambda in the canonical order:
/// ascending support, then lexicographic positions, then sign patterns
/// with +1 before -1.
#[derive(Debug, Clone)]
pub struct FrequencySet {
    pub d: usize,
    pub lambda: usize,
    entries: Vec<Frequency>,
}

impl FrequencySet {
    pub fn enumerate(d: usize, lambda: usize) -> Result<Self, Error> {
        if lambda > d {
            return Err(Error::Guard(format!(
                "truncation {lambda} exceeds dimension {d}"
            )));
        }
        let mut entries = Vec::with_capacity(cardinality(d, lambda) as usize);
        let mut positions = Vec::new();
        for support in 0..=lambda {
            positions.clear();
            emit_combinations(d, support, 0, &mut positions, &mut entries);
        }
        Ok(FrequencySet { d, lambda, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Frequency> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[Frequency] {
        &self.entries
    }
}

fn emit_combinations(
    d: usize,
    support: usize,
    start: usize,
    positions: &mut Vec<usize>,
    out: &mut Vec<Frequency>,
) {
    if positions.len() == support {
        // sign patterns: counter over the chosen positions, 0 bit -> +1, 1 bit -> -1,
        // first position most significant so +1 sorts before -1
        let k = positions.len();
        for mask in 0..(1u32 << k) {
            let mut entries = vec![0i8; d];
            for (j, &pos) in positions.iter().enumerate() {
                let bit = (mask >> (k - 1 - j)) & 1;
                entries[pos] = if bit == 0 { 1 } else { -1 };
            }
            out.push(Frequency(entries));
        }
        return;
    }
    for p in start..d {
        positions.push(p);
        emit_combinations(d, support, p + 1, positions, out);
        positions.pop();
    }
}

/// Truncated kernel sum_{|w| <= Lambda} 2^|w| Phi_w(x) Phi_w(x'),
/// evaluated as sum_{l <= Lambda} e_l(p_1..p_d) with p_i = 2 cos(x_i - x'_i),
/// the elementary symmetric polynomials computed by the usual O(d*Lambda) DP.
/// The identity 2 cos a cos b + 2 sin a sin b = 2 cos(a - b) collapses the
/// per-coordinate sign sum.
pub fn kernel(x: &[f64], x_prime: &[f64], lambda: usize) -> Result<f64, Error> {
    if x.len() != x_prime.len() {
        return Err(Error::Dimension(format!(
            "kernel inputs have lengths {} and {}",
            x.len(),
            x_prime.len()
        )));
    }
    if lambda > x.len() {
        return Err(Error::Guard(format!(
            "truncation {lambda} exceeds dimension {}",
            x.len()
        )));
    }
    let mut e = vec![0.0f64; lambda + 1];
    e[0] = 1.0;
    for (xi, xpi) in x.iter().zip(x_prime) {
        let p = 2.0 * (xi - xpi).cos();
        for l in (1..=lambda).rev() {
            e[l] += p * e[l - 1];
        }
    }
    Ok(e.iter().sum())
}

/// Reference kernel path: direct enumeration over the truncated frequency set.
/// Kept as the independent check against the DP path.
pub fn kernel_naive(x: &[f64], x_prime: &[f64], lambda: usize) -> Result<f64, Error> {
    let set = FrequencySet::enumerate(x.len(), lambda)?;
    if x.len() != x_prime.len() {
        return Err(Error::Dimension("kernel input length mismatch".into()));
    }
    Ok(set
        .iter()
        .map(|w| {
            let scale = (1u64 << w.support()) as f64;
            scale * phi(w, x) * phi(w, x_prime)
        })
        .sum())
}

/// Sparse expansion f(x) = sum_w a_w Phi_w(x); absent keys mean a_w = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigExpansion {
    pub d: usize,
    coeffs: BTreeMap<Frequency, f64>,
}

/// Coefficients smaller than this in magnitude are dropped from expansions.
pub const COEFF_EPS: f64 = 1e-12;

impl TrigExpansion {
    pub fn new(d: usize) -> Self {
        TrigExpansion {
            d,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, omega: Frequency, alpha: f64) {
        assert_eq!(omega.dim(), self.d);
        if alpha.abs() >= COEFF_EPS {
            self.coeffs.insert(omega, alpha);
        }
    }

    pub fn get(&self, omega: &Frequency) -> f64 {
        self.coeffs.get(omega).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Frequency, &f64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d, "input length mismatch");
        self.coeffs.iter().map(|(w, a)| a * phi(w, x)).sum()
    }

    /// Drops every coefficient with support above `lambda`.
    pub fn truncate(&self, lambda: usize) -> TrigExpansion {
        let mut out = TrigExpansion::new(self.d);
        for (w, a) in &self.coeffs {
            if w.support() <= lambda {
                out.set(w.clone(), *a);
            }
        }
        out
    }

    /// Uniform-average squared gradient norm, computed from coefficients:
    /// E ||grad f||^2 = sum_w |w| 2^{-|w|} a_w^2.
    pub fn gradient_constant(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(w, a)| {
                let s = w.support();
                s as f64 / (1u64 << s) as f64 * a * a
            })
            .sum()
    }

    /// One line per coefficient: `<w-string> <alpha>`, canonical order.
    pub fn to_text(&self) -> String {
        let mut keys: Vec<&Frequency> = self.coeffs.keys().collect();
        keys.sort_by_key(|w| (w.support(), w.to_text()));
        let mut out = String::new();
        for w in keys {
            writeln!(out, "{} {:.17e}", w.to_text(), self.coeffs[w]).unwrap();
        }
        out
    }

    pub fn from_text(text: &str, d: usize) -> Result<Self, Error> {
        let mut exp = TrigExpansion::new(d);
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let w = Frequency::from_text(
                it.next()
                    .ok_or_else(|| Error::Parse("missing frequency".into()))?,
            )?;
            if w.dim() != d {
                return Err(Error::Parse(format!(
                    "frequency `{}` has dimension {}, expected {d}",
                    w.to_text(),
                    w.dim()
                )));
            }
            let a: f64 = it
                .next()
                .ok_or_else(|| Error::Parse("missing coefficient".into()))?
                .parse()
                .map_err(|_| Error::Parse("bad coefficient".into()))?;
            exp.set(w, a);
        }
        Ok(exp)
    }
}

/// The three quadrature nodes per axis. A 3-point equispaced rule on the
/// circle integrates trigonometric polynomials of degree <= 2 exactly, and
/// Phi_w * f has per-axis degree <= 2 for conforming f.
pub const QUADRATURE_NODES: [f64; 3] = [
    -2.0 * std::f64::consts::PI / 3.0,
    0.0,
    2.0 * std::f64::consts::PI / 3.0,
];

/// Exact coefficient extraction: a_w = 2^|w| * average over the grid
/// {-2pi/3, 0, 2pi/3}^d of Phi_w(x) f(x). Exact when f has per-coordinate
/// trigonometric degree <= 1 (all mean values of single-reference-slot
/// circuits). Costs 3^d evaluations of f; guarded at d <= 12.
pub fn extract_coefficients<F>(f: F, d: usize, lambda: usize) -> Result<TrigExpansion, Error>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if d > MAX_EXTRACTION_DIM {
        return Err(Error::Guard(format!(
            "extraction dimension {d} exceeds the 3^d grid budget (max {MAX_EXTRACTION_DIM})"
        )));
    }
    if lambda > d {
        return Err(Error::Guard(format!(
            "truncation {lambda} exceeds dimension {d}"
        )));
    }
    let n_points = 3usize.pow(d as u32);
    // f on the full grid, axis 0 fastest (base-3 digits of the point index)
    let values: Vec<f64> = (0..n_points)
        .into_par_iter()
        .map(|idx| {
            let mut x = vec![0.0f64; d];
            let mut rem = idx;
            for xi in x.iter_mut() {
                *xi = QUADRATURE_NODES[rem % 3];
                rem /= 3;
            }
            f(&x)
        })
        .collect();

    // Per-axis moment sums turn the 3^d value tensor into the 3^d tensor of
    // sum_grid Phi_w(x) f(x), one axis at a time: for each axis the three
    // grid samples (f(-2pi/3), f(0), f(2pi/3)) are replaced by the moments
    // against (1, cos, sin) at the nodes.
    let sqrt3_half = 3.0f64.sqrt() / 2.0;
    let mut tensor = values;
    let mut stride = 1usize;
    for _axis in 0..d {
        let mut next = vec![0.0f64; n_points];
        let block = stride * 3;
        for base in (0..n_points).step_by(block) {
            for off in 0..stride {
                let fm = tensor[base + off];
                let f0 = tensor[base + off + stride];
                let fp = tensor[base + off + 2 * stride];
                // moments against 1, cos, sin over the three nodes
                next[base + off] = fm + f0 + fp;
                next[base + off + stride] = -0.5 * fm + f0 - 0.5 * fp;
                next[base + off + 2 * stride] = sqrt3_half * (fp - fm);
            }
        }
        tensor = next;
        stride *= 3;
    }

    let inv_points = 1.0 / n_points as f64;
    let set = FrequencySet::enumerate(d, lambda)?;
    let mut out = TrigExpansion::new(d);
    for w in set.iter() {
        // tensor index: digit 0 for w_i = 0, 1 for +1 (cos), 2 for -1 (sin)
        let mut idx = 0usize;
        let mut mul = 1usize;
        for e in &w.0 {
            let digit = match e {
                0 => 0,
                1 => 1,
                _ => 2,
            };
            idx += digit * mul;
            mul *= 3;
        }
        let scale = (1u64 << w.support()) as f64;
        out.set(w.clone(), scale * tensor[idx] * inv_points);
    }
    Ok(out)
}

/// Constant matrices of the Z-rotation transfer matrix in the single-qubit
/// Pauli basis (I, X, Y, Z): M(x) = D0 + cos(x) D1 + sin(x) D2 with
/// M[i][k] = Tr(R(x) P_i R(-x) P_k) / 2 for R(x) = exp(-i x/2 Z).
pub fn rz_ptm() -> ([[f64; 4]; 4], [[f64; 4]; 4], [[f64; 4]; 4]) {
    let mut d0 = [[0.0; 4]; 4];
    d0[0][0] = 1.0;
    d0[3][3] = 1.0;
    let mut d1 = [[0.0; 4]; 4];
    d1[1][1] = 1.0;
    d1[2][2] = 1.0;
    let mut d2 = [[0.0; 4]; 4];
    d2[1][2] = 1.0;
    d2[2][1] = -1.0;
    (d0, d1, d2)
}

/// Classification of a transfer-matrix entry of a Pauli-string rotation
/// exp(-i x/2 P_rot) at row P_i, column P_k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtmEntryClass {
    /// Entry is the constant delta_{ik} = 1 (commuting case, equal strings).
    ConstantDelta,
    /// Entry is cos(x).
    Cosine,
    /// Entry is +-sin(x).
    Sine,
    /// Entry vanishes identically.
    Zero,
}

/// Case analysis for the entry class: if P_i or P_k commutes with P_rot the
/// entry is the constant delta_{ik}; when both anticommute it is cos(x) on
/// the diagonal, +-sin(x) when P_rot P_i P_k is proportional to the identity,
/// and zero otherwise.
pub fn pauli_rot_ptm_class(
    p_rot: &PauliString,
    p_i: &PauliString,
    p_k: &PauliString,
) -> PtmEntryClass {
    assert_eq!(p_rot.n_qubits(), p_i.n_qubits());
    assert_eq!(p_rot.n_qubits(), p_k.n_qubits());
    if p_i.commutes_with(p_rot) || p_k.commutes_with(p_rot) {
        if p_i == p_k {
            PtmEntryClass::ConstantDelta
        } else {
            PtmEntryClass::Zero
        }
    } else {
        if p_i == p_k {
            return PtmEntryClass::Cosine;
        }
        let (rot_i, _) = p_rot.mul(p_i);
        let (prod, _) = rot_i.mul(p_k);
        if prod.is_identity() {
            PtmEntryClass::Sine
        } else {
            PtmEntryClass::Zero
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;

    #[test]
    fn phi_basics() {
        let w = Frequency::zero(3);
        assert_eq!(phi(&w, &[0.4, -1.0, 2.0]), 1.0);
        let w = Frequency(vec![1, 0, 0]);
        assert!((phi(&w, &[0.0, 9.0, 9.0]) - 1.0).abs() < 1e-15);
        let w = Frequency(vec![-1, 1]);
        assert!((phi(&w, &[PI / 2.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cardinalities_match_reference_values() {
        assert_eq!(cardinality(3, 1), 7);
        assert_eq!(cardinality(3, 2), 19);
        assert_eq!(cardinality(3, 3), 27);
        assert_eq!(cardinality(30, 1), 61);
        assert_eq!(cardinality(30, 2), 1801);
        assert_eq!(cardinality(30, 3), 34281);
        assert_eq!(cardinality(30, 4), 472761);
        assert_eq!(cardinality(5, 0), 1);
    }

    #[test]
    fn cardinality_recurrence() {
        for d in 1..=12usize {
            for l in 1..=d {
                let binom = (1..=l).fold(1u128, |acc, i| acc * (d - i + 1) as u128 / i as u128);
                assert_eq!(
                    cardinality(d, l),
                    cardinality(d, l - 1) + binom * (1u128 << l)
                );
            }
        }
    }

    #[test]
    fn enumeration_matches_cardinality_and_order() {
        let set = FrequencySet::enumerate(3, 2).unwrap();
        assert_eq!(set.len(), 19);
        // ascending support
        let supports: Vec<usize> = set.iter().map(|w| w.support()).collect();
        let mut sorted = supports.clone();
        sorted.sort_unstable();
        assert_eq!(supports, sorted);
        // first entries: zero, then +00, -00, 0+0, ...
        assert_eq!(set.entries()[0], Frequency(vec![0, 0, 0]));
        assert_eq!(set.entries()[1], Frequency(vec![1, 0, 0]));
        assert_eq!(set.entries()[2], Frequency(vec![-1, 0, 0]));
        assert_eq!(set.entries()[3], Frequency(vec![0, 1, 0]));
        // no duplicates
        let mut entries = set.entries().to_vec();
        entries.sort();
        entries.dedup();
        assert_eq!(entries.len(), 19);
        assert!(FrequencySet::enumerate(3, 4).is_err());
    }

    #[test]
    fn kernel_lambda_zero_is_one() {
        let x = [0.2, -1.0];
        let y = [2.0, 0.5];
        assert_eq!(kernel(&x, &y, 0).unwrap(), 1.0);
    }

    #[test]
    fn kernel_diagonal_full_expansion_is_three_pow_d() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for d in 1..=10usize {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-PI..PI)).collect();
            let v = kernel(&x, &x, d).unwrap();
            assert_eq!(v, 3f64.powi(d as i32), "d = {d}");
        }
    }

    #[test]
    fn kernel_dp_matches_naive() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for d in [2usize, 5, 8] {
            for lambda in 0..=d.min(3) {
                for _ in 0..10 {
                    let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-PI..PI)).collect();
                    let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-PI..PI)).collect();
                    let a = kernel(&x, &y, lambda).unwrap();
                    let b = kernel_naive(&x, &y, lambda).unwrap();
                    assert!((a - b).abs() < 1e-10, "d={d} lambda={lambda}: {a} vs {b}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn kernel_symmetry(xs in proptest::collection::vec(-std::f64::consts::PI..std::f64::consts::PI, 1..6),
                           ys_seed in 0u64..1000) {
            let mut rng = ChaCha12Rng::seed_from_u64(ys_seed);
            let ys: Vec<f64> = xs.iter().map(|_| rng.gen_range(-PI..PI)).collect();
            let lambda = xs.len().min(3);
            let a = kernel(&xs, &ys, lambda).unwrap();
            let b = kernel(&ys, &xs, lambda).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn phi_bounded(xs in proptest::collection::vec(-std::f64::consts::PI..std::f64::consts::PI, 1..6), mask in 0usize..729) {
            let d = xs.len();
            let entries: Vec<i8> = (0..d).map(|i| ((mask >> i) % 3) as i8 - 1).collect();
            let w = Frequency(entries);
            let v = phi(&w, &xs);
            prop_assert!(v.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn orthogonality_on_grid() {
        // grid average of Phi_w Phi_w' = 2^{-|w|} delta_{w,w'} for d <= 4
        for d in 1..=4usize {
            let set = FrequencySet::enumerate(d, d).unwrap();
            let n_points = 3usize.pow(d as u32);
            let grid: Vec<Vec<f64>> = (0..n_points)
                .map(|idx| {
                    let mut x = vec![0.0; d];
                    let mut rem = idx;
                    for xi in x.iter_mut() {
                        *xi = QUADRATURE_NODES[rem % 3];
                        rem /= 3;
                    }
                    x
                })
                .collect();
            for wa in set.iter() {
                for wb in set.iter() {
                    let avg: f64 = grid.iter().map(|x| phi(wa, x) * phi(wb, x)).sum::<f64>()
                        / n_points as f64;
                    let expected = if wa == wb {
                        1.0 / (1u64 << wa.support()) as f64
                    } else {
                        0.0
                    };
                    assert!(
                        (avg - expected).abs() < 1e-12,
                        "d={d} w={} w'={}: {avg} vs {expected}",
                        wa.to_text(),
                        wb.to_text()
                    );
                }
            }
        }
    }

    #[test]
    fn extract_single_cosine() {
        let f = |x: &[f64]| x[0].cos();
        let exp = extract_coefficients(f, 2, 2).unwrap();
        assert_eq!(exp.len(), 1);
        assert!((exp.get(&Frequency(vec![1, 0])) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extract_constant() {
        let f = |_: &[f64]| 2.5;
        let exp = extract_coefficients(f, 3, 3).unwrap();
        assert_eq!(exp.len(), 1);
        assert!((exp.get(&Frequency::zero(3)) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn extract_guard() {
        let f = |_: &[f64]| 0.0;
        assert!(extract_coefficients(f, 13, 1).is_err());
    }

    #[test]
    fn extract_evaluate_round_trip() {
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        // random conforming trig polynomial over d = 3
        let d = 3;
        let set = FrequencySet::enumerate(d, d).unwrap();
        let coeffs: Vec<f64> = set.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        let set2 = set.clone();
        let f = move |x: &[f64]| -> f64 {
            set2.iter()
                .zip(&coeffs)
                .map(|(w, c)| c * phi(w, x))
                .sum()
        };
        let exp = extract_coefficients(&f, d, d).unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-PI..PI)).collect();
            assert!((exp.evaluate(&x) - f(&x)).abs() < 1e-10);
        }
    }

    #[test]
    fn expansion_text_round_trip() {
        let mut exp = TrigExpansion::new(3);
        exp.set(Frequency(vec![1, -1, 0]), -1.0);
        exp.set(Frequency(vec![0, 0, 0]), 0.25);
        let text = exp.to_text();
        let back = TrigExpansion::from_text(&text, 3).unwrap();
        assert_eq!(exp, back);
    }

    #[test]
    fn rz_ptm_entries() {
        let (d0, d1, d2) = rz_ptm();
        // value at x = 0 is the identity
        for i in 0..4 {
            for k in 0..4 {
                let v = d0[i][k] + d1[i][k];
                assert_eq!(v, if i == k { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(d2[1][2], 1.0);
        assert_eq!(d2[2][1], -1.0);
        assert_eq!(d2[0][0], 0.0);
    }

    /// Dense 2x2 conjugation oracle: M[i][k] = Tr(R(x) P_i R(-x) P_k) / 2.
    fn rz_ptm_dense(x: f64) -> [[f64; 4]; 4] {
        let paulis: [[[Complex64; 2]; 2]; 4] = [
            [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
            [
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            ],
            [
                [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
                [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
            ],
            [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
            ],
        ];
        let rz = |t: f64| -> [[Complex64; 2]; 2] {
            [
                [
                    Complex64::from_polar(1.0, -t / 2.0),
                    Complex64::new(0.0, 0.0),
                ],
                [
                    Complex64::new(0.0, 0.0),
                    Complex64::from_polar(1.0, t / 2.0),
                ],
            ]
        };
        let mul = |a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]| -> [[Complex64; 2]; 2] {
            let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        c[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
            c
        };
        let mut m = [[0.0f64; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                let prod = mul(&mul(&mul(&rz(x), &paulis[i]), &rz(-x)), &paulis[k]);
                m[i][k] = 0.5 * (prod[0][0] + prod[1][1]).re;
            }
        }
        m
    }

    #[test]
    fn rz_ptm_matches_conjugation_oracle() {
        let (d0, d1, d2) = rz_ptm();
        for x in [0.3, 1.1] {
            let dense = rz_ptm_dense(x);
            for i in 0..4 {
                for k in 0..4 {
                    let v = d0[i][k] + x.cos() * d1[i][k] + x.sin() * d2[i][k];
                    assert!(
                        (v - dense[i][k]).abs() < 1e-12,
                        "x={x} entry ({i},{k}): {v} vs {}",
                        dense[i][k]
                    );
                }
            }
        }
    }

    #[test]
    fn ptm_class_examples() {
        let z = PauliString::single(1, 0, Axis::Z);
        let x = PauliString::single(1, 0, Axis::X);
        let y = PauliString::single(1, 0, Axis::Y);
        assert_eq!(pauli_rot_ptm_class(&z, &z, &z), PtmEntryClass::ConstantDelta);
        assert_eq!(pauli_rot_ptm_class(&z, &x, &x), PtmEntryClass::Cosine);
        assert_eq!(pauli_rot_ptm_class(&z, &x, &y), PtmEntryClass::Sine);
        assert_eq!(pauli_rot_ptm_class(&z, &x, &z), PtmEntryClass::Zero);
    }

    /// Brute-force check of the classification against dense conjugation for
    /// every one- and two-qubit Pauli triple.
    #[test]
    fn ptm_class_matches_dense_conjugation() {
        for n in 1..=2usize {
            let strings = all_paulis(n);
            for rot in &strings {
                if rot.is_identity() {
                    continue;
                }
                for pi in &strings {
                    for pk in &strings {
                        let class = pauli_rot_ptm_class(rot, pi, pk);
                        // sample the dense entry at three angles, fit to
                        // a + b cos + c sin
                        let f = |t: f64| dense_ptm_entry(rot, pi, pk, t, n);
                        let v0 = f(0.0);
                        let vp = f(2.0 * PI / 3.0);
                        let vm = f(-2.0 * PI / 3.0);
                        let a = (v0 + vp + vm) / 3.0;
                        let b = (2.0 * v0 - vp - vm) / 3.0;
                        let c = (vp - vm) / 3.0f64.sqrt();
                        let (ea, eb, ec_abs) = match class {
                            PtmEntryClass::ConstantDelta => (1.0, 0.0, 0.0),
                            PtmEntryClass::Cosine => (0.0, 1.0, 0.0),
                            PtmEntryClass::Sine => (0.0, 0.0, 1.0),
                            PtmEntryClass::Zero => (0.0, 0.0, 0.0),
                        };
                        assert!(
                            (a - ea).abs() < 1e-10
                                && (b - eb).abs() < 1e-10
                                && (c.abs() - ec_abs).abs() < 1e-10,
                            "rot={rot} i={pi} k={pk}: class {class:?} but fit ({a},{b},{c})"
                        );
                    }
                }
            }
        }
    }

    fn all_paulis(n: usize) -> Vec<PauliString> {
        let axes = [Axis::I, Axis::X, Axis::Y, Axis::Z];
        let mut out = Vec::new();
        for idx in 0..4usize.pow(n as u32) {
            let mut v = Vec::with_capacity(n);
            let mut rem = idx;
            for _ in 0..n {
                v.push(axes[rem % 4]);
                rem /= 4;
            }
            out.push(PauliString::new(v));
        }
        out
    }

    /// Tr(R(t) P_i R(-t) P_k) / 2^n with R = exp(-i t/2 P_rot), densely.
    fn dense_ptm_entry(rot: &PauliString, pi: &PauliString, pk: &PauliString, t: f64, n: usize) -> f64 {
        let dim = 1usize << n;
        let p_rot = dense(rot, dim);
        let p_i = dense(pi, dim);
        let p_k = dense(pk, dim);
        // R = cos(t/2) I - i sin(t/2) P_rot
        let c = (t / 2.0).cos();
        let s = (t / 2.0).sin();
        let mut r = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        let mut r_inv = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let base = if i == j {
                    Complex64::new(c, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                r[i][j] = base + Complex64::new(0.0, -s) * p_rot[i][j];
                r_inv[i][j] = base + Complex64::new(0.0, s) * p_rot[i][j];
            }
        }
        let m1 = matmul(&r, &p_i);
        let m2 = matmul(&m1, &r_inv);
        let m3 = matmul(&m2, &p_k);
        let mut tr = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            tr += m3[i][i];
        }
        tr.re / dim as f64
    }

    fn dense(p: &PauliString, dim: usize) -> Vec<Vec<Complex64>> {
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for col in 0..dim {
            let mut row = col;
            let mut phase = Complex64::new(1.0, 0.0);
            for (q, a) in p.axes().iter().enumerate() {
                let bit = (col >> q) & 1;
                match a {
                    Axis::I => {}
                    Axis::X => row ^= 1 << q,
                    Axis::Y => {
                        row ^= 1 << q;
                        phase *= if bit == 0 {
                            Complex64::new(0.0, 1.0)
                        } else {
                            Complex64::new(0.0, -1.0)
                        };
                    }
                    Axis::Z => {
                        if bit == 1 {
                            phase = -phase;
                        }
                    }
                }
            }
            m[row][col] = phase;
        }
        m
    }

    fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let n = a.len();
        let mut c = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for k in 0..n {
                if a[i][k].norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    }
}
