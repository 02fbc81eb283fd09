//! Dense statevector simulation, computational-basis measurement, and Bell
//! difference sampling.
//!
//! Qubit `q` is bit `q` of the basis index, so `|φ⟩|x⟩` with `φ` on the first
//! `t` qubits has amplitude `φ[i] * x[j]` at index `i + (j << t)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::clifford::{CliffordCircuit, CliffordGate};
use crate::error::{check_same_n, Error, Result};
use crate::f2lin::F2Vector;
use crate::textfmt::gate_lines;

const NORM_TOL: f64 = 1e-9;

/// Environment variable overriding the single-register qubit cap.
pub const MAX_QUBITS_ENV: &str = "STABLEARN_MAX_QUBITS";
/// Environment variable overriding the qubit cap of two-copy simulations.
pub const MAX_PAIR_QUBITS_ENV: &str = "STABLEARN_MAX_PAIR_QUBITS";

/// Simulation size limits, in qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimCaps {
    pub single: usize,
    /// Total qubits of a `|ψ⟩⊗|ψ⟩` register.
    pub pair: usize,
}

impl Default for SimCaps {
    fn default() -> Self {
        Self {
            single: 14,
            pair: 24,
        }
    }
}

impl SimCaps {
    /// Defaults overridden by [`MAX_QUBITS_ENV`] / [`MAX_PAIR_QUBITS_ENV`].
    pub fn from_env() -> Self {
        let read = |key: &str, default: usize| {
            std::env::var(key)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(default)
        };
        let d = Self::default();
        Self {
            single: read(MAX_QUBITS_ENV, d.single),
            pair: read(MAX_PAIR_QUBITS_ENV, d.pair),
        }
    }

    fn check_single(&self, n: usize) -> Result<()> {
        if n > self.single {
            return Err(Error::Capacity {
                what: "qubit count",
                requested: n,
                cap: self.single,
            });
        }
        Ok(())
    }

    fn check_pair(&self, n: usize) -> Result<()> {
        if 2 * n > self.pair {
            return Err(Error::Capacity {
                what: "two-copy qubit count",
                requested: 2 * n,
                cap: self.pair,
            });
        }
        Ok(())
    }
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// A normalised pure state on `n` qubits (`n = 0` is the scalar state).
#[derive(Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateVector")
            .field("n", &self.n)
            .field("amps", &self.amps)
            .finish()
    }
}

impl StateVector {
    /// `|0^n⟩`.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: u64) -> Self {
        assert!(n < 64 && index < (1u64 << n), "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    /// Normalises `amps`; fails on a wrong length or a zero vector.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << n {
            return Err(Error::InvalidParameter(format!(
                "{} amplitudes do not describe {n} qubits",
                amps.len()
            )));
        }
        let mut s = Self { n, amps };
        let norm = s.norm();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::InvalidParameter(
                "state has zero or non-finite norm".into(),
            ));
        }
        s.scale(1.0 / norm);
        Ok(s)
    }

    /// Wraps amplitudes already known to be normalised.
    pub(crate) fn from_raw(n: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n);
        Self { n, amps }
    }

    /// Haar-random state from normalised complex Gaussians.
    pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << n)
            .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
            .collect();
        Self::from_amplitudes(n, amps).expect("gaussian vector is nonzero")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn scale(&mut self, k: f64) {
        for a in self.amps.iter_mut() {
            *a *= k;
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_same_n(self.n, other.n)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|self⟩ ⊗ |high⟩`, with `self` on the low qubits.
    pub fn tensor(&self, high: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.amps.len() * high.amps.len());
        for h in &high.amps {
            for l in &self.amps {
                amps.push(l * h);
            }
        }
        StateVector {
            n: self.n + high.n,
            amps,
        }
    }

    /// Post-selects the qubits `low..n` on the basis string `outcome` and
    /// returns the normalised state of the first `low` qubits.
    pub fn condition_high(&self, low: usize, outcome: u64) -> Result<StateVector> {
        if low > self.n {
            return Err(Error::InvalidParameter(format!(
                "cannot keep {low} of {} qubits",
                self.n
            )));
        }
        let width = 1usize << low;
        let start = (outcome as usize) << low;
        if start + width > self.amps.len() {
            return Err(Error::InvalidParameter(format!(
                "outcome {outcome} out of range"
            )));
        }
        StateVector::from_amplitudes(low, self.amps[start..start + width].to_vec())
            .map_err(|_| Error::InvalidParameter(format!("outcome {outcome} has probability 0")))
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: q,
                n: self.n,
            })
        }
    }

    pub fn apply_h(&mut self, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    /// Phase gate `|0⟩⟨0| + i|1⟩⟨1|`.
    pub fn apply_s(&mut self, q: usize) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a = Complex64::new(-a.im, a.re);
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    pub fn apply_u1(&mut self, q: usize, m: &Unitary2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m.0[0][0] * a + m.0[0][1] * b;
                self.amps[i | bit] = m.0[1][0] * a + m.0[1][1] * b;
            }
        }
    }

    pub fn apply_clifford_gate(&mut self, g: &CliffordGate) -> Result<()> {
        g.validate(self.n)?;
        match *g {
            CliffordGate::H(q) => self.apply_h(q),
            CliffordGate::S(q) => self.apply_s(q),
            CliffordGate::Cnot { control, target } => self.apply_cnot(control, target),
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        match g {
            Gate::Clifford(c) => self.apply_clifford_gate(c)?,
            Gate::T(q) => {
                self.check_qubit(*q)?;
                self.apply_u1(*q, &Unitary2::t_gate());
            }
            Gate::U1 { qubit, matrix } => {
                self.check_qubit(*qubit)?;
                self.apply_u1(*qubit, matrix);
            }
        }
        Ok(())
    }

    /// `C|self⟩`.
    pub fn apply_circuit(&self, c: &CliffordCircuit) -> Result<StateVector> {
        check_same_n(self.n, c.n())?;
        let mut out = self.clone();
        for g in c.gates() {
            out.apply_clifford_gate(g)?;
        }
        Ok(out)
    }
}

/// A 2x2 complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2(pub [[Complex64; 2]; 2]);

impl Unitary2 {
    /// `diag(1, e^{iπ/4})`.
    pub fn t_gate() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Unitary2([
            [one, z],
            [z, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        ])
    }

    /// Haar-random single-qubit unitary (QR of a Ginibre matrix, phases fixed).
    pub fn haar_random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let g = |rng: &mut R| Complex64::new(standard_normal(rng), standard_normal(rng));
        let c0 = [g(rng), g(rng)];
        let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
        let u0 = [c0[0] / n0, c0[1] / n0];
        // The second column is orthogonal to the first, with a random phase.
        let phase = Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU);
        let u1 = [-u0[1].conj() * phase, u0[0].conj() * phase];
        Unitary2([[u0[0], u1[0]], [u0[1], u1[1]]])
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let m = &self.0;
        (0..2).all(|i| {
            (0..2).all(|j| {
                let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                (dot - expected).norm() <= tol
            })
        })
    }
}

/// A gate of a doped Clifford circuit.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Clifford(CliffordGate),
    /// `diag(1, e^{iπ/4})`.
    T(usize),
    U1 {
        qubit: usize,
        matrix: Unitary2,
    },
}

impl Gate {
    pub fn is_clifford(&self) -> bool {
        matches!(self, Gate::Clifford(_))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Clifford(c) => write!(f, "{c}"),
            Gate::T(q) => write!(f, "T {q}"),
            Gate::U1 { qubit, matrix } => {
                write!(f, "U1 {qubit}")?;
                for row in &matrix.0 {
                    for z in row {
                        write!(f, " {:?} {:?}", z.re, z.im)?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Clifford gates plus single-qubit non-Clifford gates.
#[derive(Clone, Debug, PartialEq)]
pub struct DopedCircuit {
    n: usize,
    gates: Vec<Gate>,
}

impl DopedCircuit {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            gates: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of non-Clifford gates.
    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| !g.is_clifford()).count()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        match &gate {
            Gate::Clifford(c) => c.validate(self.n)?,
            Gate::T(q) => {
                if *q >= self.n {
                    return Err(Error::IndexOutOfRange {
                        index: *q,
                        n: self.n,
                    });
                }
            }
            Gate::U1 { qubit, matrix } => {
                if *qubit >= self.n {
                    return Err(Error::IndexOutOfRange {
                        index: *qubit,
                        n: self.n,
                    });
                }
                if !matrix.is_unitary(NORM_TOL) {
                    return Err(Error::InvalidParameter(format!(
                        "U1 on qubit {qubit} is not unitary"
                    )));
                }
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Applies the gates left to right to `|0^n⟩`.
    pub fn prepare(&self, caps: &SimCaps) -> Result<StateVector> {
        caps.check_single(self.n)?;
        let mut s = StateVector::zero(self.n);
        for g in &self.gates {
            s.apply_gate(g)?;
        }
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(n: usize, text: &str) -> Result<Self> {
        let mut c = Self::new(n);
        for line in gate_lines(text) {
            let gate = match line.op {
                "H" | "S" => {
                    line.expect_args(1)?;
                    let q = line.qubit(0)?;
                    Gate::Clifford(if line.op == "H" {
                        CliffordGate::H(q)
                    } else {
                        CliffordGate::S(q)
                    })
                }
                "CNOT" => {
                    line.expect_args(2)?;
                    Gate::Clifford(CliffordGate::Cnot {
                        control: line.qubit(0)?,
                        target: line.qubit(1)?,
                    })
                }
                "T" => {
                    line.expect_args(1)?;
                    Gate::T(line.qubit(0)?)
                }
                "U1" => {
                    line.expect_args(9)?;
                    let c = |k: usize| -> Result<Complex64> {
                        Ok(Complex64::new(line.real(1 + 2 * k)?, line.real(2 + 2 * k)?))
                    };
                    Gate::U1 {
                        qubit: line.qubit(0)?,
                        matrix: Unitary2([[c(0)?, c(1)?], [c(2)?, c(3)?]]),
                    }
                }
                other => return Err(line.err(format!("unknown gate {other:?}"))),
            };
            c.push(gate).map_err(|e| line.err(e.to_string()))?;
        }
        Ok(c)
    }
}

/// Which single-qubit non-Clifford gate [`random_doped_circuit`] inserts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Doping {
    #[default]
    T,
    HaarU1,
}

/// `clifford_gates` uniformly random H/S/CNOT gates with exactly `t`
/// non-Clifford gates inserted at uniformly random positions and qubits.
pub fn random_doped_circuit<R: Rng + ?Sized>(
    n: usize,
    clifford_gates: usize,
    t: usize,
    doping: Doping,
    rng: &mut R,
) -> Result<DopedCircuit> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if t > clifford_gates.max(1) {
        return Err(Error::InvalidParameter(format!(
            "cannot place {t} doping gates among {clifford_gates} Clifford gates"
        )));
    }
    let mut gates: Vec<Gate> = (0..clifford_gates)
        .map(|_| Gate::Clifford(crate::clifford::random_gate(n, rng)))
        .collect();
    for _ in 0..t {
        let at = rng.gen_range(0..=gates.len());
        let qubit = rng.gen_range(0..n);
        let gate = match doping {
            Doping::T => Gate::T(qubit),
            Doping::HaarU1 => Gate::U1 {
                qubit,
                matrix: Unitary2::haar_random(rng),
            },
        };
        gates.insert(at, gate);
    }
    let mut circ = DopedCircuit::new(n);
    for g in gates {
        circ.push(g)?;
    }
    Ok(circ)
}

/// Probability that two independent measurements of `qubits` agree.
pub fn collision_probability(psi: &StateVector, qubits: &[usize]) -> Result<f64> {
    Ok(marginal_probabilities(psi, qubits)?
        .iter()
        .map(|p| p * p)
        .sum())
}

/// Inverse-CDF sampler over a fixed finite distribution.
#[derive(Clone, Debug)]
pub struct OutcomeSampler {
    cdf: Vec<f64>,
    last_positive: usize,
}

impl OutcomeSampler {
    pub fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last_positive = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Self { cdf, last_positive }
    }

    /// Draws an outcome index from one 64-bit uniform word.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.cdf.last().copied().unwrap_or(1.0);
        let u = (rng.gen::<u64>() as f64 / 18_446_744_073_709_551_616.0) * total;
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.last_positive)
    }
}

/// Probability of each basis string on `qubits`, bit `j` of the outcome
/// being qubit `qubits[j]`.
pub fn marginal_probabilities(psi: &StateVector, qubits: &[usize]) -> Result<Vec<f64>> {
    for &q in qubits {
        psi.check_qubit(q)?;
    }
    let mut out = vec![0.0; 1usize << qubits.len()];
    for (i, a) in psi.amps.iter().enumerate() {
        out[gather_bits(i, qubits)] += a.norm_sqr();
    }
    Ok(out)
}

#[inline]
fn gather_bits(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | (((index >> q) & 1) << j))
}

/// Projects onto `outcome` on `qubits` and renormalises.
pub fn collapse(psi: &StateVector, qubits: &[usize], outcome: u64) -> Result<StateVector> {
    let amps = psi
        .amps
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            if gather_bits(i, qubits) as u64 == outcome {
                a
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    StateVector::from_amplitudes(psi.n, amps)
        .map_err(|_| Error::InvalidParameter(format!("outcome {outcome} has probability 0")))
}

/// Measures `qubits` in the computational basis. Returns the packed outcome
/// (bit `j` for `qubits[j]`) and the collapsed state on all `n` qubits.
pub fn measure_computational<R: Rng + ?Sized>(
    psi: &StateVector,
    qubits: &[usize],
    rng: &mut R,
) -> Result<(u64, StateVector)> {
    let probs = marginal_probabilities(psi, qubits)?;
    let outcome = OutcomeSampler::new(&probs).sample(rng) as u64;
    let post = collapse(psi, qubits, outcome)?;
    Ok((outcome, post))
}

/// `|⟨ψ|φ⟩|²`.
pub fn fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr().min(1.0))
}

/// `sqrt(1 - |⟨ψ|φ⟩|²)`.
pub fn trace_distance(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok((1.0 - fidelity(psi, phi)?).max(0.0).sqrt())
}

/// Outcome distribution of one Bell-basis measurement of `|ψ⟩⊗|ψ⟩`, indexed
/// by the decoded vector's packed index.
///
/// Copy 1 sits on qubits `0..n`, copy 2 on `n..2n`. Each pair is measured
/// with `CNOT(i, n+i)` then `H(i)`; bit `m_i` (copy 1) becomes the Z bit
/// `b_i` and bit `m'_i` (copy 2) the X bit `a_i`.
pub fn bell_outcome_distribution(psi: &StateVector, caps: &SimCaps) -> Result<Vec<f64>> {
    let n = psi.n;
    if n == 0 {
        return Err(Error::InvalidParameter("Bell sampling needs n >= 1".into()));
    }
    caps.check_pair(n)?;
    if n > 32 {
        return Err(Error::Capacity {
            what: "Bell sampling qubit count",
            requested: n,
            cap: 32,
        });
    }
    let mut pair = psi.tensor(psi);
    for i in 0..n {
        pair.apply_cnot(i, n + i);
        pair.apply_h(i);
    }
    let mask = (1usize << n) - 1;
    let mut out = vec![0.0; 1usize << (2 * n)];
    for (z, a) in pair.amps.iter().enumerate() {
        let x_part = z >> n;
        let z_part = z & mask;
        out[x_part | (z_part << n)] += a.norm_sqr();
    }
    Ok(out)
}

/// `count` identical copies of a state handed out by a [`StateSource`].
#[derive(Clone, Debug)]
pub struct CopyBatch {
    state: Arc<StateVector>,
    count: u64,
}

impl CopyBatch {
    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Applies `circuit` to every copy.
    pub fn apply_circuit(&self, circuit: &CliffordCircuit) -> Result<CopyBatch> {
        Ok(CopyBatch {
            state: Arc::new(self.state.apply_circuit(circuit)?),
            count: self.count,
        })
    }

    /// Measures `qubits` on each copy independently; one outcome per copy.
    pub fn measure_each<R: Rng + ?Sized>(&self, qubits: &[usize], rng: &mut R) -> Result<Vec<u64>> {
        let sampler = OutcomeSampler::new(&marginal_probabilities(&self.state, qubits)?);
        Ok((0..self.count)
            .map(|_| sampler.sample(rng) as u64)
            .collect())
    }
}

/// A metered supply of copies of a fixed state.
///
/// Every copy handed out bumps the counter, and an optional limit models a
/// finite stock. Internally synchronised; `&StateSource` may be shared.
#[derive(Debug)]
pub struct StateSource {
    state: Arc<StateVector>,
    consumed: AtomicU64,
    limit: Option<u64>,
    caps: SimCaps,
    bell: OnceLock<std::result::Result<OutcomeSampler, Error>>,
}

impl StateSource {
    pub fn new(state: StateVector) -> Self {
        Self::build(state, None)
    }

    /// A source holding exactly `limit` copies.
    pub fn with_limit(state: StateVector, limit: u64) -> Self {
        Self::build(state, Some(limit))
    }

    fn build(state: StateVector, limit: Option<u64>) -> Self {
        Self {
            state: Arc::new(state),
            consumed: AtomicU64::new(0),
            limit,
            caps: SimCaps::from_env(),
            bell: OnceLock::new(),
        }
    }

    pub fn with_caps(mut self, caps: SimCaps) -> Self {
        self.caps = caps;
        self
    }

    pub fn n(&self) -> usize {
        self.state.n
    }

    pub fn copies_consumed(&self) -> u64 {
        self.consumed.load(Ordering::SeqCst)
    }

    pub fn remaining(&self) -> Option<u64> {
        self.limit.map(|l| l - self.copies_consumed())
    }

    /// The underlying state, for oracles and bookkeeping; does not consume copies.
    pub fn peek(&self) -> &StateVector {
        &self.state
    }

    pub fn take(&self, count: u64) -> Result<CopyBatch> {
        let limit = self.limit;
        self.consumed
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |used| match limit {
                Some(l) if used + count > l => None,
                _ => Some(used + count),
            })
            .map_err(|used| Error::InsufficientCopies {
                requested: count,
                available: limit.unwrap_or(u64::MAX) - used,
            })?;
        Ok(CopyBatch {
            state: Arc::clone(&self.state),
            count,
        })
    }

    fn bell_sampler(&self) -> Result<&OutcomeSampler> {
        self.bell
            .get_or_init(|| {
                bell_outcome_distribution(&self.state, &self.caps).map(|p| OutcomeSampler::new(&p))
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Consumes four copies: two Bell-basis measurements of `|ψ⟩⊗|ψ⟩`, whose
    /// decoded outcomes are added. The result is distributed as `q_ψ`.
    pub fn bell_difference_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<F2Vector> {
        let n = self.n();
        if n > 32 {
            return Err(Error::Capacity {
                what: "Bell sampling qubit count",
                requested: n,
                cap: 32,
            });
        }
        let sampler = self.bell_sampler()?;
        self.take(4)?;
        let first = sampler.sample(rng) as u64;
        let second = sampler.sample(rng) as u64;
        Ok(F2Vector::from_index(n, first ^ second))
    }
}
