//! Pauli strings and observables: parsing, locality/norm accounting, and
//! exact expectation values against dense state vectors.

use crate::circuit::StateVector;
use crate::error::Error;
use num_complex::Complex64;
use std::fmt;

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    pub fn as_char(self) -> char {
        match self {
            Axis::I => 'I',
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Axis> {
        match c {
            'I' => Some(Axis::I),
            'X' => Some(Axis::X),
            'Y' => Some(Axis::Y),
            'Z' => Some(Axis::Z),
            _ => None,
        }
    }
}

/// Product of single-qubit Paulis `a * b`, returned as (axis, phase exponent)
/// with the phase being i^k for k in 0..4.
pub(crate) fn axis_mul(a: Axis, b: Axis) -> (Axis, u8) {
    use Axis::*;
    match (a, b) {
        (I, x) => (x, 0),
        (x, I) => (x, 0),
        (X, X) | (Y, Y) | (Z, Z) => (I, 0),
        // XY = iZ, YZ = iX, ZX = iY (cyclic), reversed order picks up -i.
        (X, Y) => (Z, 1),
        (Y, Z) => (X, 1),
        (Z, X) => (Y, 1),
        (Y, X) => (Z, 3),
        (Z, Y) => (X, 3),
        (X, Z) => (Y, 3),
    }
}

/// A tensor product of Pauli axes over a fixed qubit count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<Axis>,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        PauliString {
            axes: vec![Axis::I; n_qubits],
        }
    }

    pub fn new(axes: Vec<Axis>) -> Self {
        PauliString { axes }
    }

    /// Single non-identity axis at `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, axis: Axis) -> Self {
        let mut axes = vec![Axis::I; n_qubits];
        axes[qubit] = axis;
        PauliString { axes }
    }

    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, qubit: usize) -> Axis {
        self.axes[qubit]
    }

    /// Positions carrying a non-identity axis.
    pub fn support(&self) -> Vec<usize> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Axis::I)
            .map(|(q, _)| q)
            .collect()
    }

    /// Number of non-identity positions.
    pub fn locality(&self) -> usize {
        self.axes.iter().filter(|a| **a != Axis::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|a| *a == Axis::I)
    }

    /// True when the two strings commute as operators (even number of
    /// positions where both are non-identity and different).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.axes.len(), other.axes.len());
        let anti = self
            .axes
            .iter()
            .zip(&other.axes)
            .filter(|(a, b)| **a != Axis::I && **b != Axis::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Operator product `self * other` with its accumulated phase i^k.
    pub fn mul(&self, other: &PauliString) -> (PauliString, u8) {
        debug_assert_eq!(self.axes.len(), other.axes.len());
        let mut phase = 0u8;
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(&a, &b)| {
                let (c, k) = axis_mul(a, b);
                phase = (phase + k) % 4;
                c
            })
            .collect();
        (PauliString { axes }, phase)
    }

    /// `<psi|P|psi>` via bit-indexed traversal, O(2^N).
    pub fn expectation(&self, state: &StateVector) -> f64 {
        let n = self.axes.len();
        assert_eq!(
            state.n_qubits(),
            n,
            "pauli string length must match qubit count"
        );
        let amps = state.amplitudes();
        // X and Y flip the target bit; Y and Z contribute bit-dependent phases.
        let mut flip_mask = 0usize;
        for (q, a) in self.axes.iter().enumerate() {
            if matches!(a, Axis::X | Axis::Y) {
                flip_mask |= 1 << q;
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (z, amp) in amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut phase = Complex64::new(1.0, 0.0);
            for (q, a) in self.axes.iter().enumerate() {
                let bit = (z >> q) & 1;
                match a {
                    Axis::I | Axis::X => {}
                    Axis::Y => {
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
            acc += amps[z ^ flip_mask].conj() * phase * amp;
        }
        acc.re
    }
}

impl fmt::Display for PauliString {
    /// Factors on the support, ascending qubit index: `X0*Z3`. The identity
    /// string renders as `I` and is not part of the observable grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for (q, a) in self.axes.iter().enumerate() {
            if *a == Axis::I {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            write!(f, "{}{}", a.as_char(), q)?;
            first = false;
        }
        Ok(())
    }
}

/// Hermitian observable O = sum_i c_i P_i with merged, canonically ordered terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    terms: Vec<(f64, PauliString)>,
    n_qubits: usize,
}

impl Observable {
    /// Builds from raw terms: merges identical strings, drops exact zeros,
    /// and sorts canonically (by axes, then qubit index via the axis order).
    pub fn from_terms(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self, Error> {
        let mut merged: Vec<(f64, PauliString)> = Vec::new();
        for (c, p) in terms {
            if p.n_qubits() != n_qubits {
                return Err(Error::Dimension(format!(
                    "term acts on {} qubits, observable declared for {}",
                    p.n_qubits(),
                    n_qubits
                )));
            }
            match merged.iter_mut().find(|(_, q)| *q == p) {
                Some((c0, _)) => *c0 += c,
                None => merged.push((c, p)),
            }
        }
        merged.retain(|(c, _)| *c != 0.0);
        if merged.is_empty() {
            return Err(Error::Parse("empty observable".into()));
        }
        merged.sort_by(|(_, a), (_, b)| a.axes.cmp(&b.axes));
        Ok(Observable {
            terms: merged,
            n_qubits,
        })
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Norm bound B = sum |c_i|.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Maximum term locality K.
    pub fn max_locality(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, p)| p.locality())
            .max()
            .unwrap_or(0)
    }

    /// Term count q.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Exact expectation sum_i c_i <psi|P_i|psi>, in [-B, B].
    pub fn expectation(&self, state: &StateVector) -> Result<f64, Error> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "state has {} qubits, observable has {}",
                state.n_qubits(),
                self.n_qubits
            )));
        }
        state.check_normalized()?;
        Ok(self
            .terms
            .iter()
            .map(|(c, p)| c * p.expectation(state))
            .sum())
    }

    /// Scaled sum a*O1 + b*O2.
    pub fn linear_combination(
        a: f64,
        o1: &Observable,
        b: f64,
        o2: &Observable,
    ) -> Result<Observable, Error> {
        let mut terms: Vec<(f64, PauliString)> =
            o1.terms.iter().map(|(c, p)| (a * c, p.clone())).collect();
        terms.extend(o2.terms.iter().map(|(c, p)| (b * c, p.clone())));
        Observable::from_terms(o1.n_qubits, terms)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, p)) in self.terms.iter().enumerate() {
            if i == 0 {
                write!(f, "{}*{}", c, p)?;
            } else if *c < 0.0 {
                write!(f, " - {}*{}", -c, p)?;
            } else {
                write!(f, " + {}*{}", c, p)?;
            }
        }
        Ok(())
    }
}

/// Parses the observable grammar `term (+- term)*` with
/// `term = coeff * P q (* P q)*`, P in {X, Y, Z} and 0-based qubit indices.
///
/// Examples: `0.5*X0 + 0.5*X1`, `-0.1*Z0*Z1 + 0.5*X0`.
pub fn parse_observable(text: &str, n_qubits: usize) -> Result<Observable, Error> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::Parse("empty observable".into()));
    }
    let mut terms = Vec::new();
    // Split into signed chunks on top-level +/- (not inside a number's exponent).
    let mut chunks: Vec<(f64, String)> = Vec::new();
    let mut current = String::new();
    let mut sign = 1.0;
    let chars: Vec<char> = trimmed.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if (c == '+' || c == '-') && !current.trim().is_empty() {
            let prev = chars[i - 1];
            if prev == 'e' || prev == 'E' {
                current.push(c);
            } else {
                chunks.push((sign, current.trim().to_string()));
                current = String::new();
                sign = if c == '-' { -1.0 } else { 1.0 };
            }
        } else if (c == '+' || c == '-') && current.trim().is_empty() {
            sign *= if c == '-' { -1.0 } else { 1.0 };
        } else {
            current.push(c);
        }
        i += 1;
    }
    if !current.trim().is_empty() {
        chunks.push((sign, current.trim().to_string()));
    }
    if chunks.is_empty() {
        return Err(Error::Parse("empty observable".into()));
    }

    for (sign, chunk) in chunks {
        let factors: Vec<&str> = chunk.split('*').map(str::trim).collect();
        if factors.len() < 2 {
            return Err(Error::Parse(format!(
                "term `{chunk}` must be `coeff * P q (* P q)*`"
            )));
        }
        let coeff: f64 = factors[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient `{}` in `{chunk}`", factors[0])))?;
        let mut axes = vec![Axis::I; n_qubits];
        for factor in &factors[1..] {
            let mut it = factor.chars();
            let axis = it
                .next()
                .and_then(Axis::from_char)
                .filter(|a| *a != Axis::I)
                .ok_or_else(|| Error::Parse(format!("bad Pauli factor `{factor}`")))?;
            let qubit: usize = it
                .as_str()
                .parse()
                .map_err(|_| Error::Parse(format!("bad qubit index in `{factor}`")))?;
            if qubit >= n_qubits {
                return Err(Error::Parse(format!(
                    "qubit index {qubit} out of range (n_qubits = {n_qubits})"
                )));
            }
            if axes[qubit] != Axis::I {
                return Err(Error::Parse(format!(
                    "duplicate axis on qubit {qubit} in `{chunk}`"
                )));
            }
            axes[qubit] = axis;
        }
        terms.push((sign * coeff, PauliString::new(axes)));
    }
    Observable::from_terms(n_qubits, terms)
}
