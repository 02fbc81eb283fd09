//! Bit-packed linear algebra over F_2^{2n} with the symplectic form.
//!
//! A vector `x = (a | b)` stores the X-part `a` in bits `0..n` and the
//! Z-part `b` in bits `n..2n`. Bit `i` lives in word `i / 64` at position
//! `i % 64`. With this layout the symplectic product
//! `[x, y] = a·b' + b·a'` is the parity of `(x.a & y.b) ^ (x.b & y.a)`, and
//! swapping the two halves of a row turns it into the ordinary dot product.
//!
//! Subspaces are kept in reduced row echelon form with the pivot of each row
//! at its lowest set bit, rows sorted by pivot. That form is unique for a
//! given span, so two subspaces are equal iff their bases are equal.

use std::fmt;

use rand::Rng;

use crate::clifford::CliffordCircuit;
use crate::error::{check_same_n, Error, Result};

/// An element of F_2^{2n}.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    (2 * n).div_ceil(64)
}

impl F2Vector {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "F2Vector requires n >= 1");
        Self {
            n,
            words: vec![0; word_count(n)],
        }
    }

    /// Builds `(a | b)` from qubit masks, bit `q` of `a` being the X bit of qubit `q`.
    pub fn from_masks(n: usize, a: u64, b: u64) -> Self {
        assert!(n <= 64, "from_masks supports n <= 64");
        let mut v = Self::zero(n);
        for q in 0..n {
            if (a >> q) & 1 == 1 {
                v.set(q, true);
            }
            if (b >> q) & 1 == 1 {
                v.set(n + q, true);
            }
        }
        v
    }

    /// Interprets `index` as the packed 2n-bit integer of the layout (n <= 32).
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n <= 32, "from_index supports n <= 32");
        let mut v = Self::zero(n);
        v.words[0] = index;
        v
    }

    /// Parses a bit string of length 2n, a-part first, e.g. `"10|01"` or `"1001"`.
    pub fn from_bit_str(n: usize, s: &str) -> Result<Self> {
        let bits: Vec<char> = s.chars().filter(|c| *c != '|' && *c != ' ').collect();
        if bits.len() != 2 * n {
            return Err(Error::InvalidParameter(format!(
                "expected {} bits, got {}",
                2 * n,
                bits.len()
            )));
        }
        let mut v = Self::zero(n);
        for (i, c) in bits.into_iter().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "bad bit character {other:?}"
                    )))
                }
            }
        }
        Ok(v)
    }

    /// Standard basis vector `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.set(i, true);
        v
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v = Self::zero(n);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let rem = (2 * self.n) % 64;
        if rem != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << rem) - 1;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        2 * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < 2 * self.n);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < 2 * self.n);
        let m = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn x_bit(&self, qubit: usize) -> bool {
        self.get(qubit)
    }

    pub fn z_bit(&self, qubit: usize) -> bool {
        self.get(self.n + qubit)
    }

    /// X-part as a qubit mask (n <= 64).
    pub fn x_mask(&self) -> u64 {
        assert!(self.n <= 64);
        (0..self.n).fold(0, |m, q| m | (u64::from(self.get(q)) << q))
    }

    /// Z-part as a qubit mask (n <= 64).
    pub fn z_mask(&self) -> u64 {
        assert!(self.n <= 64);
        (0..self.n).fold(0, |m, q| m | (u64::from(self.get(self.n + q)) << q))
    }

    /// Packed 2n-bit integer (n <= 32); inverse of [`F2Vector::from_index`].
    pub fn index(&self) -> u64 {
        assert!(self.n <= 32);
        self.words[0]
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Lowest set bit, the pivot column of this row.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &F2Vector) {
        debug_assert_eq!(self.n, other.n);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn xor(&self, other: &F2Vector) -> F2Vector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Ordinary dot product over F_2.
    pub fn dot(&self, other: &F2Vector) -> bool {
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// `(a | b) -> (b | a)`.
    pub fn swap_halves(&self) -> F2Vector {
        let n = self.n;
        if 2 * n <= 64 {
            let mask = if n == 32 {
                u64::MAX >> 32
            } else {
                (1u64 << n) - 1
            };
            let w = self.words[0];
            let mut out = Self::zero(n);
            out.words[0] = ((w & mask) << n) | (w >> n);
            return out;
        }
        let mut out = Self::zero(n);
        for i in 0..n {
            out.set(i, self.get(n + i));
            out.set(n + i, self.get(i));
        }
        out
    }

    /// Bits in index order packed into hex digits, first bit of each nibble
    /// most significant; the final nibble is zero padded.
    pub fn to_hex(&self) -> String {
        let len = 2 * self.n;
        let mut s = String::with_capacity(len.div_ceil(4));
        for chunk in 0..len.div_ceil(4) {
            let mut nib = 0u32;
            for k in 0..4 {
                let i = chunk * 4 + k;
                nib <<= 1;
                if i < len && self.get(i) {
                    nib |= 1;
                }
            }
            s.push(char::from_digit(nib, 16).expect("nibble"));
        }
        s
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let len = 2 * n;
        if hex.len() != len.div_ceil(4) {
            return Err(Error::InvalidParameter(format!(
                "hex string {hex:?} has wrong length for n = {n}"
            )));
        }
        let mut v = Self::zero(n);
        for (chunk, c) in hex.chars().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidParameter(format!("bad hex digit {c:?}")))?;
            for k in 0..4 {
                let i = chunk * 4 + k;
                let bit = (nib >> (3 - k)) & 1 == 1;
                if i < len {
                    v.set(i, bit);
                } else if bit {
                    return Err(Error::InvalidParameter("nonzero hex padding".into()));
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..2 * self.n {
            if i == self.n {
                f.write_str("|")?;
            }
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `[x, y] = sum_i x.a_i y.b_i + x.b_i y.a_i (mod 2)`.
pub fn symplectic_product(x: &F2Vector, y: &F2Vector) -> Result<bool> {
    check_same_n(x.n, y.n)?;
    Ok(symplectic_product_unchecked(x, y))
}

#[inline]
pub(crate) fn symplectic_product_unchecked(x: &F2Vector, y: &F2Vector) -> bool {
    let n = x.n;
    if 2 * n <= 64 {
        let mask = if n == 32 {
            u64::MAX >> 32
        } else {
            (1u64 << n) - 1
        };
        let (xw, yw) = (x.words[0], y.words[0]);
        let t = ((xw & mask) & (yw >> n)) ^ ((xw >> n) & (yw & mask));
        return t.count_ones() & 1 == 1;
    }
    x.dot(&y.swap_halves())
}

/// A subspace of F_2^{2n}, stored as its canonical RREF basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    basis: Vec<F2Vector>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subspace")
            .field("n", &self.n)
            .field("basis", &self.basis)
            .finish()
    }
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            n,
            basis: Vec::new(),
        }
    }

    /// The whole space F_2^{2n}.
    pub fn full(n: usize) -> Self {
        Self {
            n,
            basis: (0..2 * n).map(|i| F2Vector::unit(n, i)).collect(),
        }
    }

    /// `0^{2n-d} x F_2^d`: Z operators on the last `d` qubits.
    pub fn trailing_z(n: usize, d: usize) -> Result<Self> {
        if d > n {
            return Err(Error::ImpossibleInput(format!(
                "trailing Z block of dimension {d} exceeds n = {n}"
            )));
        }
        Ok(Self {
            n,
            basis: (2 * n - d..2 * n).map(|i| F2Vector::unit(n, i)).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[F2Vector] {
        &self.basis
    }

    /// Pivot column of each basis row, strictly increasing.
    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.first_one().expect("basis rows are nonzero"))
            .collect()
    }

    fn reduce(&self, x: &mut F2Vector) {
        for row in &self.basis {
            let p = row.first_one().expect("nonzero row");
            if x.get(p) {
                x.xor_assign(row);
            }
        }
    }

    /// True iff `x` lies in the span.
    pub fn contains(&self, x: &F2Vector) -> Result<bool> {
        check_same_n(self.n, x.n)?;
        let mut v = x.clone();
        self.reduce(&mut v);
        Ok(v.is_zero())
    }

    /// Every pair of basis vectors commutes.
    pub fn is_isotropic(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, x)| {
            self.basis[i + 1..]
                .iter()
                .all(|y| !symplectic_product_unchecked(x, y))
        })
    }

    /// `self ⊆ other`.
    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        check_same_n(self.n, other.n)?;
        for v in &self.basis {
            if !other.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Symplectic complement `{a : [x, a] = 0 for all x in self}`.
    ///
    /// Swapping the X and Z blocks of every basis row turns the symplectic
    /// conditions into ordinary linear equations; the complement is the
    /// nullspace of the swapped matrix.
    pub fn symplectic_complement(&self) -> Subspace {
        let n = self.n;
        let swapped = row_reduce_unchecked(n, self.basis.iter().map(F2Vector::swap_halves));
        let pivots = swapped.pivots();
        let mut is_pivot = vec![false; 2 * n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut null = Vec::with_capacity(2 * n - pivots.len());
        for free in (0..2 * n).filter(|&c| !is_pivot[c]) {
            let mut v = F2Vector::unit(n, free);
            for (row, &p) in swapped.basis.iter().zip(&pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            null.push(v);
        }
        row_reduce_unchecked(n, null)
    }

    /// Iterates over all `2^dim` elements in Gray-code order.
    pub fn elements(&self) -> SubspaceElements<'_> {
        SubspaceElements {
            space: self,
            current: F2Vector::zero(self.n),
            step: 0,
            total: 1u128 << self.basis.len(),
        }
    }

    /// Image under `x -> C(x)`.
    pub fn map(&self, circuit: &CliffordCircuit) -> Result<Subspace> {
        check_same_n(self.n, circuit.n())?;
        let images: Vec<F2Vector> = self
            .basis
            .iter()
            .map(|v| circuit.act_unchecked(v))
            .collect();
        Ok(row_reduce_unchecked(self.n, images))
    }

    /// Span of `self ∪ other`.
    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        check_same_n(self.n, other.n)?;
        Ok(row_reduce_unchecked(
            self.n,
            self.basis.iter().chain(&other.basis).cloned(),
        ))
    }
}

pub struct SubspaceElements<'a> {
    space: &'a Subspace,
    current: F2Vector,
    step: u128,
    total: u128,
}

impl Iterator for SubspaceElements<'_> {
    type Item = F2Vector;

    fn next(&mut self) -> Option<F2Vector> {
        if self.step >= self.total {
            return None;
        }
        if self.step > 0 {
            let flip = self.step.trailing_zeros() as usize;
            self.current.xor_assign(&self.space.basis[flip]);
        }
        self.step += 1;
        Some(self.current.clone())
    }
}

/// Incrementally maintained RREF basis.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    n: usize,
    rows: Vec<F2Vector>,
}

impl SpanBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` to the span; returns true if the dimension grew.
    pub fn insert(&mut self, mut v: F2Vector) -> Result<bool> {
        check_same_n(self.n, v.n)?;
        for row in &self.rows {
            let p = row.first_one().expect("nonzero row");
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        let Some(p) = v.first_one() else {
            return Ok(false);
        };
        for row in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        let at = self
            .rows
            .partition_point(|r| r.first_one().expect("nonzero row") < p);
        self.rows.insert(at, v);
        Ok(true)
    }

    pub fn finish(self) -> Subspace {
        Subspace {
            n: self.n,
            basis: self.rows,
        }
    }
}

/// Canonical RREF basis of the span of `vectors`.
pub fn row_reduce(n: usize, vectors: &[F2Vector]) -> Result<Subspace> {
    let mut b = SpanBuilder::new(n);
    for v in vectors {
        b.insert(v.clone())?;
    }
    Ok(b.finish())
}

pub(crate) fn row_reduce_unchecked(
    n: usize,
    vectors: impl IntoIterator<Item = F2Vector>,
) -> Subspace {
    let mut b = SpanBuilder::new(n);
    for v in vectors {
        b.insert(v).expect("vectors share n");
    }
    b.finish()
}

/// A random `d`-dimensional isotropic subspace: the image of the trailing
/// Z block under a random Clifford circuit.
pub fn random_isotropic_subspace<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<Subspace> {
    if d > n {
        return Err(Error::ImpossibleInput(format!(
            "isotropic subspaces of F_2^{} have dimension at most {n}, requested {d}",
            2 * n
        )));
    }
    let start = Subspace::trailing_z(n, d)?;
    let circuit = CliffordCircuit::random(n, 4 * n * n + 8, rng);
    start.map(&circuit)
}
