//! Clifford circuits over {H, S, CNOT} and their action on F_2^{2n}.
//!
//! A gate acts on a row `(a | b)` by the tableau column rules:
//!
//! * `H(i)` swaps columns `i` and `n+i`;
//! * `S(i)` adds column `i` into column `n+i`;
//! * `CNOT(c, t)` adds column `c` into `t` and column `n+t` into `n+c`.
//!
//! These match conjugation `W -> C W C†` up to sign. Signs are not tracked.

use std::fmt;

use rand::Rng;

use crate::error::{check_same_n, Error, Result};
use crate::f2lin::{symplectic_product_unchecked, F2Vector, Subspace};
use crate::textfmt::gate_lines;

/// Upper bound on `gates / (n * d)` for [`isotropic_mapping_circuit`].
///
/// Step 1 emits at most `2n` gates per row, and steps 2 and 3 emit at most
/// `3d` gates in total, so `2nd + 3d <= 5nd`.
pub const MAPPING_GATE_CONSTANT: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Cnot { control: usize, target: usize },
}

impl CliffordGate {
    pub fn validate(&self, n: usize) -> Result<()> {
        let check = |q: usize| {
            if q < n {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange { index: q, n })
            }
        };
        match *self {
            CliffordGate::H(q) | CliffordGate::S(q) => check(q),
            CliffordGate::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::InvalidParameter(format!(
                        "CNOT control and target coincide ({control})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Applies the column rule to a single row.
    #[inline]
    pub fn act_on(&self, row: &mut F2Vector) {
        let n = row.n();
        match *self {
            CliffordGate::H(i) => {
                let (x, z) = (row.get(i), row.get(n + i));
                row.set(i, z);
                row.set(n + i, x);
            }
            CliffordGate::S(i) => {
                if row.get(i) {
                    row.flip(n + i);
                }
            }
            CliffordGate::Cnot { control, target } => {
                if row.get(control) {
                    row.flip(target);
                }
                if row.get(n + target) {
                    row.flip(n + control);
                }
            }
        }
    }

    /// Gates whose product is the inverse of this gate.
    pub fn inverse(&self) -> Vec<CliffordGate> {
        match *self {
            CliffordGate::S(q) => vec![CliffordGate::S(q); 3],
            g => vec![g],
        }
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CliffordGate::H(q) => write!(f, "H {q}"),
            CliffordGate::S(q) => write!(f, "S {q}"),
            CliffordGate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
        }
    }
}

/// Applies `gate` to every row in `rows`; the tableau update used by the
/// mapping algorithm.
pub fn gate_action(gate: &CliffordGate, rows: &mut [F2Vector]) -> Result<()> {
    for row in rows.iter_mut() {
        gate.validate(row.n())?;
        gate.act_on(row);
    }
    Ok(())
}

/// A gate sequence together with its symplectic action.
///
/// `images[j]` holds `C(e_j)`; it is updated in O(n) per appended gate.
#[derive(Clone, PartialEq, Eq)]
pub struct CliffordCircuit {
    n: usize,
    gates: Vec<CliffordGate>,
    images: Vec<F2Vector>,
}

impl fmt::Debug for CliffordCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CliffordCircuit")
            .field("n", &self.n)
            .field("gates", &self.gates)
            .finish()
    }
}

impl CliffordCircuit {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            gates: Vec::new(),
            images: (0..2 * n).map(|j| F2Vector::unit(n, j)).collect(),
        }
    }

    pub fn from_gates(n: usize, gates: impl IntoIterator<Item = CliffordGate>) -> Result<Self> {
        let mut c = Self::identity(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    /// Uniformly random sequence of `len` gates drawn from {H, S, CNOT}.
    pub fn random<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Self {
        let mut c = Self::identity(n);
        for _ in 0..len {
            c.push(random_gate(n, rng)).expect("random gate is valid");
        }
        c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: CliffordGate) -> Result<()> {
        gate.validate(self.n)?;
        for img in self.images.iter_mut() {
            gate.act_on(img);
        }
        self.gates.push(gate);
        Ok(())
    }

    /// `C(x)`.
    pub fn act(&self, x: &F2Vector) -> Result<F2Vector> {
        check_same_n(self.n, x.n())?;
        Ok(self.act_unchecked(x))
    }

    pub(crate) fn act_unchecked(&self, x: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zero(self.n);
        for (j, img) in self.images.iter().enumerate() {
            if x.get(j) {
                out.xor_assign(img);
            }
        }
        out
    }

    /// Columns of the 2n x 2n action matrix: `column(j) = C(e_j)`.
    pub fn matrix_columns(&self) -> &[F2Vector] {
        &self.images
    }

    pub fn inverse(&self) -> CliffordCircuit {
        let gates = self.gates.iter().rev().flat_map(|g| g.inverse());
        CliffordCircuit::from_gates(self.n, gates).expect("inverse of a valid circuit is valid")
    }

    /// Gates of `self` followed by the gates of `other`.
    pub fn then(&self, other: &CliffordCircuit) -> Result<CliffordCircuit> {
        check_same_n(self.n, other.n)?;
        let mut c = self.clone();
        for g in &other.gates {
            c.push(*g)?;
        }
        Ok(c)
    }

    /// `S^T J S = J`, checked on every pair of basis images.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|i| {
            (i..2 * n).all(|j| {
                let expected = j == i + n || i == j + n;
                symplectic_product_unchecked(&self.images[i], &self.images[j]) == expected
            })
        })
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
        let mut c = Self::identity(n);
        for line in gate_lines(text) {
            let gate = match line.op {
                "H" => {
                    line.expect_args(1)?;
                    CliffordGate::H(line.qubit(0)?)
                }
                "S" => {
                    line.expect_args(1)?;
                    CliffordGate::S(line.qubit(0)?)
                }
                "CNOT" => {
                    line.expect_args(2)?;
                    CliffordGate::Cnot {
                        control: line.qubit(0)?,
                        target: line.qubit(1)?,
                    }
                }
                other => return Err(line.err(format!("unknown Clifford gate {other:?}"))),
            };
            c.push(gate).map_err(|e| line.err(e.to_string()))?;
        }
        Ok(c)
    }
}

pub(crate) fn random_gate<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordGate {
    let kinds = if n >= 2 { 3 } else { 2 };
    match rng.gen_range(0..kinds) {
        0 => CliffordGate::H(rng.gen_range(0..n)),
        1 => CliffordGate::S(rng.gen_range(0..n)),
        _ => {
            let control = rng.gen_range(0..n);
            let mut target = rng.gen_range(0..n - 1);
            if target >= control {
                target += 1;
            }
            CliffordGate::Cnot { control, target }
        }
    }
}

struct Tableau {
    rows: Vec<F2Vector>,
    circuit: CliffordCircuit,
}

impl Tableau {
    fn apply(&mut self, gate: CliffordGate) {
        for row in self.rows.iter_mut() {
            gate.act_on(row);
        }
        self.circuit.push(gate).expect("mapping emits valid gates");
    }

    /// After `done` rows of step 1: the leading rows are `e_0..e_{done-1}`
    /// and the remaining rows vanish on X columns `< done` and on Z columns
    /// `n..n+done`.
    fn step_one_invariant(&self, done: usize) -> bool {
        let n = self.circuit.n();
        self.rows.iter().enumerate().all(|(r, row)| {
            if r < done {
                *row == F2Vector::unit(n, r)
            } else {
                (0..done).all(|c| !row.get(c) && !row.get(n + c))
            }
        })
    }
}

/// Builds a Clifford circuit `C` with `C(H) = 0^{2n-d} x F_2^d`.
///
/// Works on the RREF basis of `H` as a tableau:
///
/// 1. for each row `i`: normalise every pair `(m[i][j], m[i][n+j])`, `j >= i`,
///    to `(1,0)` or `(0,0)` with `H` / `S`; if `m[i][i] = 0` add the smallest
///    witness column `k > i` into column `i` with `CNOT(k, i)`; clear the rest
///    of the row with `CNOT(i, j)`; clear column `i` below the pivot with row
///    additions (bookkeeping only);
/// 2. Hadamard the first `d` qubits, giving `Z_0 .. Z_{d-1}`;
/// 3. for `i = 0..d`, `CNOT(n-1-i, d-1-i)` then `CNOT(d-1-i, n-1-i)`, moving
///    the Z block to the last `d` qubits, rightmost column first.
///
/// The gate count is at most `MAPPING_GATE_CONSTANT * n * d`.
pub fn isotropic_mapping_circuit(h: &Subspace) -> Result<CliffordCircuit> {
    let n = h.n();
    let d = h.dim();
    if d > n {
        return Err(Error::ImpossibleInput(format!(
            "isotropic subspace of dimension {d} cannot exist for n = {n}"
        )));
    }
    if !h.is_isotropic() {
        return Err(Error::PromiseViolation(
            "subspace passed to the mapping circuit is not isotropic".into(),
        ));
    }
    let mut tab = Tableau {
        rows: h.basis().to_vec(),
        circuit: CliffordCircuit::identity(n),
    };

    // Step 1
    for i in 0..d {
        debug_assert!(tab.step_one_invariant(i));
        for j in i..n {
            let (x, z) = (tab.rows[i].get(j), tab.rows[i].get(n + j));
            match (x, z) {
                (false, true) => tab.apply(CliffordGate::H(j)),
                (true, true) => tab.apply(CliffordGate::S(j)),
                _ => {}
            }
        }
        if !tab.rows[i].get(i) {
            let k = (i + 1..n).find(|&k| tab.rows[i].get(k)).ok_or_else(|| {
                Error::PromiseViolation(format!(
                    "row {i} has no witness column; input rows are dependent or not isotropic"
                ))
            })?;
            tab.apply(CliffordGate::Cnot {
                control: k,
                target: i,
            });
        }
        for j in i + 1..n {
            if tab.rows[i].get(j) {
                tab.apply(CliffordGate::Cnot {
                    control: i,
                    target: j,
                });
            }
        }
        let pivot = tab.rows[i].clone();
        for r in i + 1..d {
            if tab.rows[r].get(i) {
                tab.rows[r].xor_assign(&pivot);
            }
        }
    }
    debug_assert!(tab.step_one_invariant(d));

    // Step 2
    for q in 0..d {
        tab.apply(CliffordGate::H(q));
    }

    // Step 3
    for i in 0..d {
        let (hi, lo) = (n - 1 - i, d - 1 - i);
        if hi == lo {
            continue;
        }
        tab.apply(CliffordGate::Cnot {
            control: hi,
            target: lo,
        });
        tab.apply(CliffordGate::Cnot {
            control: lo,
            target: hi,
        });
    }

    debug_assert!(tab.circuit.len() <= MAPPING_GATE_CONSTANT * n * d.max(1));
    Ok(tab.circuit)
}
