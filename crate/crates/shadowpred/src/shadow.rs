//! Pauli-basis classical shadows: snapshot collection from simulated states,
//! the inverse-channel estimator, and the on-disk training-dataset format.
//!
//! A snapshot stores one measurement basis letter and one outcome bit per
//! qubit. Records keep snapshots in packed form (2 bits per basis, 1 bit per
//! outcome), O(N*T) memory per record.

use crate::circuit::{simulate, Circuit, StateVector};
use crate::error::Error;
use crate::pauli::{Axis, Observable};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Measurement basis for one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasBasis {
    X,
    Y,
    Z,
}

impl MeasBasis {
    pub fn as_char(self) -> char {
        match self {
            MeasBasis::X => 'X',
            MeasBasis::Y => 'Y',
            MeasBasis::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'X' => Some(MeasBasis::X),
            'Y' => Some(MeasBasis::Y),
            'Z' => Some(MeasBasis::Z),
            _ => None,
        }
    }

    fn from_code(code: u8) -> Self {
        match code {
            0 => MeasBasis::X,
            1 => MeasBasis::Y,
            _ => MeasBasis::Z,
        }
    }

    fn code(self) -> u8 {
        match self {
            MeasBasis::X => 0,
            MeasBasis::Y => 1,
            MeasBasis::Z => 2,
        }
    }

    /// Matching non-identity Pauli axis.
    pub fn axis(self) -> Axis {
        match self {
            MeasBasis::X => Axis::X,
            MeasBasis::Y => Axis::Y,
            MeasBasis::Z => Axis::Z,
        }
    }
}

/// One shot: a basis letter and an outcome bit per qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub bases: Vec<MeasBasis>,
    pub bits: Vec<u8>,
}

/// Per-qubit estimator factor Tr((3 U^dag |b><b| U - I) P):
/// 1 for the identity axis, 0 on basis mismatch, otherwise +-3 by outcome.
pub fn snapshot_factor(basis: MeasBasis, bit: u8, axis: Axis) -> f64 {
    match axis {
        Axis::I => 1.0,
        _ if axis != basis.axis() => 0.0,
        _ => {
            if bit == 0 {
                3.0
            } else {
                -3.0
            }
        }
    }
}

/// Draws one snapshot: per-qubit uniform basis in {X, Y, Z}, then one full
/// N-bit outcome from the Born distribution of the basis-rotated state.
pub fn sample_snapshot<R: Rng>(state: &StateVector, rng: &mut R) -> Snapshot {
    let n = state.n_qubits();
    let bases: Vec<MeasBasis> = (0..n)
        .map(|_| MeasBasis::from_code(rng.gen_range(0..3u8)))
        .collect();
    let bits = sample_outcome(state, &bases, rng);
    Snapshot { bases, bits }
}

/// Rotates into the product basis and draws one basis-state index from the
/// full probability vector by CDF inversion.
fn sample_outcome<R: Rng>(state: &StateVector, bases: &[MeasBasis], rng: &mut R) -> Vec<u8> {
    let n = state.n_qubits();
    let mut rotated = state.clone();
    for (q, b) in bases.iter().enumerate() {
        match b {
            MeasBasis::Z => {}
            MeasBasis::X => rotated.apply_h(q),
            MeasBasis::Y => {
                // S^dag then H maps the Y eigenbasis onto the Z basis
                rotated.apply_sdg(q);
                rotated.apply_h(q);
            }
        }
    }
    let u: f64 = rng.gen::<f64>();
    let amps = rotated.amplitudes();
    let mut acc = 0.0;
    let mut index = amps.len() - 1;
    for (i, a) in amps.iter().enumerate() {
        acc += a.norm_sqr();
        if u < acc {
            index = i;
            break;
        }
    }
    (0..n).map(|q| ((index >> q) & 1) as u8).collect()
}

impl StateVector {
    /// S^dagger gate (phase -i on |1>), used for Y-basis rotation.
    pub fn apply_sdg(&mut self, q: usize) {
        let bit = 1usize << q;
        let amps = self.amplitudes_mut();
        for (i, a) in amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a *= Complex64::new(0.0, -1.0);
            }
        }
    }
}

/// Snapshots for one training input, stored packed.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowRecord {
    pub x: Vec<f64>,
    n_qubits: usize,
    shots: usize,
    bases: Vec<u8>, // 2 bits per (shot, qubit), shot-major
    bits: Vec<u8>,  // 1 bit per (shot, qubit), shot-major
}

impl ShadowRecord {
    pub fn from_snapshots(x: Vec<f64>, snapshots: &[Snapshot]) -> Self {
        assert!(!snapshots.is_empty(), "record needs at least one snapshot");
        let n = snapshots[0].bases.len();
        let shots = snapshots.len();
        let total = shots * n;
        let mut bases = vec![0u8; (2 * total).div_ceil(8)];
        let mut bits = vec![0u8; total.div_ceil(8)];
        for (t, snap) in snapshots.iter().enumerate() {
            assert_eq!(snap.bases.len(), n, "snapshots must share qubit count");
            for q in 0..n {
                let idx = t * n + q;
                let code = snap.bases[q].code();
                bases[idx / 4] |= code << (2 * (idx % 4));
                if snap.bits[q] != 0 {
                    bits[idx / 8] |= 1 << (idx % 8);
                }
            }
        }
        ShadowRecord {
            x,
            n_qubits: n,
            shots,
            bases,
            bits,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shots(&self) -> usize {
        self.shots
    }

    pub fn basis_at(&self, shot: usize, qubit: usize) -> MeasBasis {
        let idx = shot * self.n_qubits + qubit;
        MeasBasis::from_code((self.bases[idx / 4] >> (2 * (idx % 4))) & 0b11)
    }

    pub fn bit_at(&self, shot: usize, qubit: usize) -> u8 {
        let idx = shot * self.n_qubits + qubit;
        (self.bits[idx / 8] >> (idx % 8)) & 1
    }

    pub fn snapshot(&self, shot: usize) -> Snapshot {
        Snapshot {
            bases: (0..self.n_qubits).map(|q| self.basis_at(shot, q)).collect(),
            bits: (0..self.n_qubits).map(|q| self.bit_at(shot, q)).collect(),
        }
    }

    /// Record restricted to the first `shots` snapshots.
    pub fn truncated(&self, shots: usize) -> ShadowRecord {
        assert!(shots >= 1 && shots <= self.shots);
        let snaps: Vec<Snapshot> = (0..shots).map(|t| self.snapshot(t)).collect();
        ShadowRecord::from_snapshots(self.x.clone(), &snaps)
    }
}

/// Shadow estimate (1/T) sum_t sum_i c_i prod_j factor(...). Per-shot values
/// are unbounded (up to 3^K per unit coefficient) but average toward
/// Tr(rho(x) O).
pub fn shadow_estimate(record: &ShadowRecord, obs: &Observable) -> Result<f64, Error> {
    if obs.n_qubits() != record.n_qubits {
        return Err(Error::Dimension(format!(
            "observable has {} qubits, record has {}",
            obs.n_qubits(),
            record.n_qubits
        )));
    }
    let mut total = 0.0;
    for (c, p) in obs.terms() {
        let support: Vec<(usize, Axis)> = p
            .support()
            .into_iter()
            .map(|q| (q, p.axis(q)))
            .collect();
        let mut term_sum = 0.0;
        for t in 0..record.shots {
            let mut prod = 1.0;
            for &(q, axis) in &support {
                prod *= snapshot_factor(record.basis_at(t, q), record.bit_at(t, q), axis);
                if prod == 0.0 {
                    break;
                }
            }
            term_sum += prod;
        }
        total += c * term_sum / record.shots as f64;
    }
    Ok(total)
}

/// Training dataset: n records of T snapshots each, produced deterministically
/// from a master seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowDataset {
    pub n_qubits: usize,
    pub n_slots: usize,
    pub shots: usize,
    pub master_seed: u64,
    pub circuit_digest: String,
    pub records: Vec<ShadowRecord>,
}

impl ShadowDataset {
    pub fn size(&self) -> usize {
        self.records.len()
    }

    /// Dataset restricted to the first `n` records and `shots` snapshots.
    pub fn subsample(&self, n: usize, shots: usize) -> ShadowDataset {
        assert!(n >= 1 && n <= self.records.len());
        assert!(shots >= 1 && shots <= self.shots);
        let records = if shots == self.shots {
            self.records[..n].to_vec()
        } else {
            self.records[..n].iter().map(|r| r.truncated(shots)).collect()
        };
        ShadowDataset {
            n_qubits: self.n_qubits,
            n_slots: self.n_slots,
            shots,
            master_seed: self.master_seed,
            circuit_digest: self.circuit_digest.clone(),
            records,
        }
    }
}

/// Counter-style stream: one independent generator per (seed, record, shot).
/// Shot index 0 is reserved for the record's input draw.
pub fn stream_rng(master_seed: u64, record: u64, shot: u64) -> ChaCha12Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&record.to_le_bytes());
    seed[16..24].copy_from_slice(&shot.to_le_bytes());
    ChaCha12Rng::from_seed(seed)
}

/// Collects n records: x^(i) uniform over [-pi, pi]^d from stream
/// (seed, i, 0), snapshots of the simulated state from streams (seed, i, t).
/// Bit-reproducible for a fixed seed, independent of thread count.
pub fn collect_dataset(
    circuit: &Circuit,
    initial: &StateVector,
    n: usize,
    shots: usize,
    master_seed: u64,
) -> Result<ShadowDataset, Error> {
    if n == 0 || shots == 0 {
        return Err(Error::Guard(
            "dataset needs at least one record and one shot".into(),
        ));
    }
    let d = circuit.n_slots();
    let records: Vec<Result<ShadowRecord, Error>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut xrng = stream_rng(master_seed, i as u64, 0);
            let x: Vec<f64> = (0..d)
                .map(|_| xrng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            let state = simulate(circuit, &x, initial)?;
            let snaps: Vec<Snapshot> = (0..shots)
                .map(|t| {
                    let mut rng = stream_rng(master_seed, i as u64, t as u64 + 1);
                    sample_snapshot(&state, &mut rng)
                })
                .collect();
            Ok(ShadowRecord::from_snapshots(x, &snaps))
        })
        .collect();
    let records = records.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ShadowDataset {
        n_qubits: circuit.n_qubits(),
        n_slots: d,
        shots,
        master_seed,
        circuit_digest: circuit.digest(),
        records,
    })
}

const FORMAT_VERSION: u32 = 1;

pub fn dataset_to_string(ds: &ShadowDataset) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "qubits={} slots={} shots={} size={} seed={} circuit_digest={} version={}",
        ds.n_qubits,
        ds.n_slots,
        ds.shots,
        ds.records.len(),
        ds.master_seed,
        ds.circuit_digest,
        FORMAT_VERSION
    )
    .unwrap();
    for rec in &ds.records {
        let xs: Vec<String> = rec.x.iter().map(|v| format!("{v:.17e}")).collect();
        write!(out, "x= {} ; shots=", xs.join(",")).unwrap();
        for t in 0..rec.shots() {
            out.push(' ');
            for q in 0..rec.n_qubits() {
                out.push(rec.basis_at(t, q).as_char());
            }
            out.push(':');
            for q in 0..rec.n_qubits() {
                out.push(if rec.bit_at(t, q) == 0 { '0' } else { '1' });
            }
        }
        out.push('\n');
    }
    out
}

pub fn save_dataset(ds: &ShadowDataset, path: &Path) -> Result<(), Error> {
    fs::write(path, dataset_to_string(ds))?;
    Ok(())
}

pub fn dataset_from_string(text: &str) -> Result<ShadowDataset, Error> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty dataset file".into()))?;
    let mut fields = std::collections::HashMap::new();
    for kv in header.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad header field `{kv}`")))?;
        fields.insert(k.to_string(), v.to_string());
    }
    let get = |k: &str| -> Result<String, Error> {
        fields
            .get(k)
            .cloned()
            .ok_or_else(|| Error::Format(format!("missing header key `{k}`")))
    };
    let parse_usize = |k: &str| -> Result<usize, Error> {
        get(k)?
            .parse()
            .map_err(|_| Error::Format(format!("bad header value for `{k}`")))
    };
    let n_qubits = parse_usize("qubits")?;
    let n_slots = parse_usize("slots")?;
    let shots = parse_usize("shots")?;
    let size = parse_usize("size")?;
    let master_seed: u64 = get("seed")?
        .parse()
        .map_err(|_| Error::Format("bad header value for `seed`".into()))?;
    let circuit_digest = get("circuit_digest")?;
    let version: u32 = get("version")?
        .parse()
        .map_err(|_| Error::Format("bad header value for `version`".into()))?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported dataset version {version}"
        )));
    }
    if n_qubits == 0 || shots == 0 || size == 0 {
        return Err(Error::Format("degenerate header counts".into()));
    }

    let mut records = Vec::with_capacity(size);
    for (i, line) in lines.enumerate() {
        if i >= size {
            return Err(Error::Format(format!(
                "more records than header size {size}"
            )));
        }
        let rest = line
            .strip_prefix("x=")
            .ok_or_else(|| Error::Format(format!("record {i}: missing `x=`")))?;
        let (x_part, shots_part) = rest
            .split_once(';')
            .ok_or_else(|| Error::Format(format!("record {i}: missing `;`")))?;
        let x: Vec<f64> = if x_part.trim().is_empty() {
            Vec::new()
        } else {
            x_part
                .trim()
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Format(format!("record {i}: bad x value `{v}`")))
                })
                .collect::<Result<_, _>>()?
        };
        if x.len() != n_slots {
            return Err(Error::Format(format!(
                "record {i}: x has {} entries, header says {n_slots}",
                x.len()
            )));
        }
        let shots_part = shots_part
            .trim()
            .strip_prefix("shots=")
            .ok_or_else(|| Error::Format(format!("record {i}: missing `shots=`")))?;
        let mut snaps = Vec::with_capacity(shots);
        for token in shots_part.split_whitespace() {
            let (bases_s, bits_s) = token
                .split_once(':')
                .ok_or_else(|| Error::Format(format!("record {i}: bad shot token `{token}`")))?;
            if bases_s.len() != n_qubits || bits_s.len() != n_qubits {
                return Err(Error::Format(format!(
                    "record {i}: shot token width mismatch (expected {n_qubits} qubits)"
                )));
            }
            let bases = bases_s
                .chars()
                .map(|c| {
                    MeasBasis::from_char(c)
                        .ok_or_else(|| Error::Format(format!("record {i}: bad basis `{c}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let bits = bits_s
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(Error::Format(format!("record {i}: bad bit `{other}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            snaps.push(Snapshot { bases, bits });
        }
        if snaps.len() != shots {
            return Err(Error::Format(format!(
                "record {i}: {} shots, header says {shots}",
                snaps.len()
            )));
        }
        records.push(ShadowRecord::from_snapshots(x, &snaps));
    }
    if records.len() != size {
        return Err(Error::Format(format!(
            "header size {size} but only {} records present",
            records.len()
        )));
    }
    Ok(ShadowDataset {
        n_qubits,
        n_slots,
        shots,
        master_seed,
        circuit_digest,
        records,
    })
}

pub fn load_dataset(path: &Path) -> Result<ShadowDataset, Error> {
    let text = fs::read_to_string(path)?;
    dataset_from_string(&text)
}
