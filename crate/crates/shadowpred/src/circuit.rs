//! Parameterized circuit IR and dense state-vector simulation, with analytic
//! gradients via the parameter-shift rule.
//!
//! The gate alphabet is H, S, CNOT and Pauli-string rotations
//! ROT(P, theta) = exp(-i theta/2 P). Rotation angles come either from an
//! input slot or a baked-in constant.

use crate::error::Error;
use crate::pauli::{Axis, Observable, PauliString};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;

pub const NORM_TOLERANCE: f64 = 1e-10;

/// Where a rotation gate takes its angle from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleSource {
    /// Index into the classical input vector x.
    Slot(usize),
    /// Fixed angle in radians.
    Const(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    S(usize),
    Cnot { control: usize, target: usize },
    Rot { axes: PauliString, angle: AngleSource },
}

/// Parameterized gate program over `n_qubits` qubits and `n_slots` input slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_slots: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_slots: usize) -> Self {
        Circuit {
            n_qubits,
            n_slots,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), Error> {
        self.validate_gate(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    fn validate_gate(&self, gate: &Gate) -> Result<(), Error> {
        let check_q = |q: usize| -> Result<(), Error> {
            if q >= self.n_qubits {
                Err(Error::Dimension(format!(
                    "qubit index {q} out of range (n_qubits = {})",
                    self.n_qubits
                )))
            } else {
                Ok(())
            }
        };
        match gate {
            Gate::H(q) | Gate::S(q) => check_q(*q),
            Gate::Cnot { control, target } => {
                check_q(*control)?;
                check_q(*target)?;
                if control == target {
                    return Err(Error::Dimension(
                        "CNOT control and target must differ".into(),
                    ));
                }
                Ok(())
            }
            Gate::Rot { axes, angle } => {
                if axes.n_qubits() != self.n_qubits {
                    return Err(Error::Dimension(format!(
                        "rotation axis string has {} qubits, circuit has {}",
                        axes.n_qubits(),
                        self.n_qubits
                    )));
                }
                if axes.is_identity() {
                    return Err(Error::Dimension("rotation axis string is identity".into()));
                }
                if let AngleSource::Slot(k) = angle {
                    if *k >= self.n_slots {
                        return Err(Error::Dimension(format!(
                            "slot index {k} out of range (n_slots = {})",
                            self.n_slots
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Numbers of rotation gates referencing each slot. Unused slots are
    /// permitted (a warning concern for callers, not an error).
    pub fn slot_reference_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_slots];
        for g in &self.gates {
            if let Gate::Rot {
                angle: AngleSource::Slot(k),
                ..
            } = g
            {
                counts[*k] += 1;
            }
        }
        counts
    }

    /// One gate per line; header `qubits N slots d`; `#` starts a comment.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "qubits {} slots {}", self.n_qubits, self.n_slots).unwrap();
        for g in &self.gates {
            match g {
                Gate::H(q) => writeln!(out, "H {q}").unwrap(),
                Gate::S(q) => writeln!(out, "S {q}").unwrap(),
                Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}").unwrap(),
                Gate::Rot { axes, angle } => {
                    let axes_text = axes.to_string();
                    match angle {
                        AngleSource::Slot(k) => writeln!(out, "ROT {axes_text} slot:{k}").unwrap(),
                        AngleSource::Const(t) => {
                            writeln!(out, "ROT {axes_text} const:{t:.17e}").unwrap()
                        }
                    }
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit, Error> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty circuit file".into()))?;
        let hw: Vec<&str> = header.split_whitespace().collect();
        if hw.len() != 4 || hw[0] != "qubits" || hw[2] != "slots" {
            return Err(Error::Parse(format!(
                "bad header `{header}`, expected `qubits N slots d`"
            )));
        }
        let n_qubits: usize = hw[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad qubit count `{}`", hw[1])))?;
        let n_slots: usize = hw[3]
            .parse()
            .map_err(|_| Error::Parse(format!("bad slot count `{}`", hw[3])))?;
        let mut circuit = Circuit::new(n_qubits, n_slots);
        for line in lines {
            let words: Vec<&str> = line.split_whitespace().collect();
            let gate = match words[0] {
                "H" | "S" => {
                    if words.len() != 2 {
                        return Err(Error::Parse(format!("bad gate line `{line}`")));
                    }
                    let q: usize = words[1]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad qubit in `{line}`")))?;
                    if words[0] == "H" {
                        Gate::H(q)
                    } else {
                        Gate::S(q)
                    }
                }
                "CNOT" => {
                    if words.len() != 3 {
                        return Err(Error::Parse(format!("bad gate line `{line}`")));
                    }
                    let c: usize = words[1]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad control in `{line}`")))?;
                    let t: usize = words[2]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad target in `{line}`")))?;
                    Gate::Cnot {
                        control: c,
                        target: t,
                    }
                }
                "ROT" => {
                    if words.len() != 3 {
                        return Err(Error::Parse(format!("bad gate line `{line}`")));
                    }
                    let axes = parse_axis_string(words[1], n_qubits)?;
                    let angle = if let Some(k) = words[2].strip_prefix("slot:") {
                        AngleSource::Slot(
                            k.parse()
                                .map_err(|_| Error::Parse(format!("bad slot in `{line}`")))?,
                        )
                    } else if let Some(t) = words[2].strip_prefix("const:") {
                        AngleSource::Const(
                            t.parse()
                                .map_err(|_| Error::Parse(format!("bad const in `{line}`")))?,
                        )
                    } else {
                        return Err(Error::Parse(format!(
                            "angle source must be slot:k or const:theta in `{line}`"
                        )));
                    };
                    Gate::Rot { axes, angle }
                }
                other => return Err(Error::Parse(format!("unknown gate `{other}`"))),
            };
            circuit.push(gate)?;
        }
        Ok(circuit)
    }

    /// FNV-1a hash of the canonical text form, as fixed-width hex.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.to_text().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

/// Parses `Z0`, `Z0*Z1*Z2`, `X1` into a PauliString of the given width.
fn parse_axis_string(text: &str, n_qubits: usize) -> Result<PauliString, Error> {
    let mut axes = vec![Axis::I; n_qubits];
    for factor in text.split('*') {
        let mut it = factor.chars();
        let axis = it
            .next()
            .and_then(Axis::from_char)
            .filter(|a| *a != Axis::I)
            .ok_or_else(|| Error::Parse(format!("bad axis factor `{factor}`")))?;
        let q: usize = it
            .as_str()
            .parse()
            .map_err(|_| Error::Parse(format!("bad qubit index in `{factor}`")))?;
        if q >= n_qubits {
            return Err(Error::Parse(format!(
                "qubit index {q} out of range (n_qubits = {n_qubits})"
            )));
        }
        if axes[q] != Axis::I {
            return Err(Error::Parse(format!("duplicate axis on qubit {q}")));
        }
        axes[q] = axis;
    }
    Ok(PauliString::new(axes))
}

/// Dense state vector over 2^N amplitudes, little-endian qubit indexing
/// (bit q of the basis index is qubit q).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, Error> {
        let dim = amps.len();
        if dim == 0 || dim & (dim - 1) != 0 {
            return Err(Error::Dimension(format!(
                "amplitude count {dim} is not a power of two"
            )));
        }
        let state = StateVector {
            n_qubits: dim.trailing_zeros() as usize,
            amps,
        };
        state.check_normalized()?;
        Ok(state)
    }

    /// Random normalized state for tests: i.i.d. uniform components, normalized.
    pub fn random<R: rand::Rng>(n_qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << n_qubits;
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        StateVector { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn check_normalized(&self) -> Result<(), Error> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Dimension(format!("state norm {norm} is not 1")));
        }
        Ok(())
    }

    pub fn apply_h(&mut self, q: usize) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = (a + b) * h;
                self.amps[j] = (a - b) * h;
            }
        }
    }

    pub fn apply_s(&mut self, q: usize) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a *= Complex64::new(0.0, 1.0);
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    /// exp(-i theta/2 P)|psi> = cos(theta/2)|psi> - i sin(theta/2) P|psi>,
    /// two O(2^N) passes, no matrix construction.
    pub fn apply_rot(&mut self, axes: &PauliString, theta: f64) {
        let c = (theta / 2.0).cos();
        let s = (theta / 2.0).sin();
        let n = self.n_qubits;
        debug_assert_eq!(axes.n_qubits(), n);
        let mut flip_mask = 0usize;
        for (q, a) in axes.axes().iter().enumerate() {
            if matches!(a, Axis::X | Axis::Y) {
                flip_mask |= 1 << q;
            }
        }
        let old = self.amps.clone();
        let minus_i_s = Complex64::new(0.0, -s);
        for (z, out) in self.amps.iter_mut().enumerate() {
            // phase of P acting on basis state z ^ flip_mask landing on z
            let src = z ^ flip_mask;
            let mut phase = Complex64::new(1.0, 0.0);
            for (q, a) in axes.axes().iter().enumerate() {
                let bit = (src >> q) & 1;
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
            *out = old[z] * c + old[src] * phase * minus_i_s;
        }
    }
}

/// Reduces an angle into [-pi, pi).
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = (x + PI).rem_euclid(two_pi) - PI;
    if y >= PI {
        y -= two_pi;
    }
    y
}

/// Applies U(x) to `initial`. Slot values outside [-pi, pi] are reduced mod 2 pi.
pub fn simulate(circuit: &Circuit, x: &[f64], initial: &StateVector) -> Result<StateVector, Error> {
    if x.len() != circuit.n_slots {
        return Err(Error::Dimension(format!(
            "input has {} entries, circuit has {} slots",
            x.len(),
            circuit.n_slots
        )));
    }
    if initial.n_qubits() != circuit.n_qubits {
        return Err(Error::Dimension(format!(
            "initial state has {} qubits, circuit has {}",
            initial.n_qubits(),
            circuit.n_qubits
        )));
    }
    initial.check_normalized()?;
    let mut state = initial.clone();
    for gate in &circuit.gates {
        match gate {
            Gate::H(q) => state.apply_h(*q),
            Gate::S(q) => state.apply_s(*q),
            Gate::Cnot { control, target } => state.apply_cnot(*control, *target),
            Gate::Rot { axes, angle } => {
                let theta = match angle {
                    AngleSource::Slot(k) => wrap_angle(x[*k]),
                    AngleSource::Const(t) => *t,
                };
                state.apply_rot(axes, theta);
            }
        }
    }
    Ok(state)
}

/// Tr(rho(x) O) for the pure state produced by the circuit.
pub fn expectation(
    circuit: &Circuit,
    x: &[f64],
    initial: &StateVector,
    obs: &Observable,
) -> Result<f64, Error> {
    let state = simulate(circuit, x, initial)?;
    obs.expectation(&state)
}

/// Parameter-shift derivative [f(x + a e_k) - f(x - a e_k)] / (2 sin a).
///
/// Exact for slots referenced by exactly one rotation gate. Multi-reference
/// slots are rejected; unreferenced slots have zero derivative.
pub fn parameter_shift_grad(
    circuit: &Circuit,
    x: &[f64],
    initial: &StateVector,
    obs: &Observable,
    slot: usize,
    alpha: f64,
) -> Result<f64, Error> {
    if slot >= circuit.n_slots {
        return Err(Error::Dimension(format!(
            "slot {slot} out of range (n_slots = {})",
            circuit.n_slots
        )));
    }
    if (alpha.rem_euclid(PI)).abs() < 1e-12 || (alpha.rem_euclid(PI) - PI).abs() < 1e-12 {
        return Err(Error::Guard(format!(
            "shift alpha = {alpha} is a multiple of pi"
        )));
    }
    let refs = circuit.slot_reference_counts()[slot];
    if refs > 1 {
        return Err(Error::Guard(format!(
            "slot {slot} is referenced by {refs} gates; parameter shift needs single-reference slots"
        )));
    }
    if refs == 0 {
        return Ok(0.0);
    }
    let mut xp = x.to_vec();
    xp[slot] += alpha;
    let mut xm = x.to_vec();
    xm[slot] -= alpha;
    let fp = expectation(circuit, &xp, initial, obs)?;
    let fm = expectation(circuit, &xm, initial, obs)?;
    Ok((fp - fm) / (2.0 * alpha.sin()))
}

/// Default shift for parameter-shift gradients; maximizes the sin denominator.
pub const DEFAULT_SHIFT: f64 = PI / 2.0;
