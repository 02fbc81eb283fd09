//! Weyl operators and exact small-`n` oracles for the characteristic
//! distribution `p_ψ`, its self-convolution `q_ψ`, and the unsigned
//! stabilizer group.
//!
//! For `x = (a | b)`, `W_x = i^{a·b} X^a Z^b` where `a·b` is the integer dot
//! product. The phase makes every `W_x` Hermitian with `W_x² = I`.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{check_same_n, Error, Result};
use crate::f2lin::{row_reduce_unchecked, F2Vector, Subspace};
use crate::simstate::StateVector;

/// Default qubit cap for full `4^n` tables.
pub const ORACLE_CAP: usize = 7;
/// Default cap on the dimension of subspaces enumerated by [`subspace_mass`].
pub const ENUMERATION_CAP: usize = 24;

/// Tolerance for `|⟨ψ|W_x|ψ⟩| = 1` in [`unsigned_stabilizer_group`].
pub const STABILIZER_TOL: f64 = 1e-8;

#[inline]
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn masks(x: &F2Vector) -> (usize, usize) {
    (x.x_mask() as usize, x.z_mask() as usize)
}

/// `W_x|ψ⟩`: the amplitude at `z` moves to `z ^ a` with factor `i^{a·b} (-1)^{b·z}`.
pub fn weyl_apply(x: &F2Vector, psi: &StateVector) -> Result<StateVector> {
    check_same_n(psi.n(), x.n())?;
    let (a, b) = masks(x);
    let phase = i_pow((a & b).count_ones());
    let src = psi.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for (z, amp) in src.iter().enumerate() {
        let sign = if (b & z).count_ones() & 1 == 1 {
            -1.0
        } else {
            1.0
        };
        out[z ^ a] = amp * phase * sign;
    }
    Ok(StateVector::from_raw(psi.n(), out))
}

/// `⟨ψ|W_x|ψ⟩`, real because `W_x` is Hermitian.
pub fn weyl_expectation(psi: &StateVector, x: &F2Vector) -> Result<f64> {
    check_same_n(psi.n(), x.n())?;
    let (a, b) = masks(x);
    let amps = psi.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for (z, amp) in amps.iter().enumerate() {
        let term = amps[z ^ a].conj() * amp;
        if (b & z).count_ones() & 1 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    let value = acc * i_pow((a & b).count_ones());
    debug_assert!(value.im.abs() < 1e-9, "imaginary residue {}", value.im);
    Ok(value.re)
}

/// In-place unnormalised Walsh–Hadamard transform.
pub(crate) fn fwht(data: &mut [f64]) {
    let len = data.len();
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for i in block..block + h {
                let (u, v) = (data[i], data[i + h]);
                data[i] = u + v;
                data[i + h] = u - v;
            }
        }
        h *= 2;
    }
}

/// A real table over F_2^{2n}, indexed by the packed vector index.
#[derive(Clone, Debug, PartialEq)]
pub struct CharDistribution {
    n: usize,
    table: Vec<f64>,
}

impl CharDistribution {
    pub fn from_table(n: usize, table: Vec<f64>) -> Result<Self> {
        if n == 0 || n > 16 || table.len() != 1usize << (2 * n) {
            return Err(Error::InvalidParameter(format!(
                "table of length {} is not indexed by F_2^(2*{n})",
                table.len()
            )));
        }
        Ok(Self { n, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn get(&self, x: &F2Vector) -> f64 {
        self.table[x.index() as usize]
    }

    pub fn total(&self) -> f64 {
        self.table.iter().sum()
    }

    /// Vectors with mass above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<F2Vector> {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > threshold)
            .map(|(i, _)| F2Vector::from_index(self.n, i as u64))
            .collect()
    }

    /// Header: `n` as little-endian u32; body: `4^n` little-endian f64.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.n as u32).to_le_bytes())?;
        for p in &self.table {
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 4];
        r.read_exact(&mut head)?;
        let n = u32::from_le_bytes(head) as usize;
        if n == 0 || n > 16 {
            return Err(Error::InvalidParameter(format!("bad table header n = {n}")));
        }
        let mut table = Vec::with_capacity(1 << (2 * n));
        let mut buf = [0u8; 8];
        for _ in 0..1usize << (2 * n) {
            r.read_exact(&mut buf)?;
            table.push(f64::from_le_bytes(buf));
        }
        Self::from_table(n, table)
    }
}

/// Exact `p_ψ(x) = 2^{-n} ⟨ψ|W_x|ψ⟩²` for every `x`, with the default cap.
pub fn char_distribution(psi: &StateVector) -> Result<CharDistribution> {
    char_distribution_capped(psi, ORACLE_CAP)
}

/// For each X-part `a`, the expectations over all Z-parts `b` are one
/// Walsh–Hadamard transform of `z -> conj(ψ[z^a]) ψ[z]`.
pub fn char_distribution_capped(psi: &StateVector, cap: usize) -> Result<CharDistribution> {
    let n = psi.n();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "characteristic distribution needs n >= 1".into(),
        ));
    }
    if n > cap {
        return Err(Error::Capacity {
            what: "oracle qubit count",
            requested: n,
            cap,
        });
    }
    let dim = 1usize << n;
    let scale = 1.0 / dim as f64;
    let amps = psi.amplitudes();
    let mut table = vec![0.0; dim * dim];
    let mut re = vec![0.0; dim];
    let mut im = vec![0.0; dim];
    for a in 0..dim {
        for z in 0..dim {
            let f = amps[z ^ a].conj() * amps[z];
            re[z] = f.re;
            im[z] = f.im;
        }
        fwht(&mut re);
        fwht(&mut im);
        for b in 0..dim {
            let e = Complex64::new(re[b], im[b]) * i_pow((a & b).count_ones());
            table[a | (b << n)] = scale * e.re * e.re;
        }
    }
    Ok(CharDistribution { n, table })
}

/// `q(x) = Σ_a p(a) p(x + a)`, via the Walsh–Hadamard convolution theorem.
pub fn q_distribution(p: &CharDistribution) -> CharDistribution {
    let mut t = p.table.clone();
    fwht(&mut t);
    for v in t.iter_mut() {
        *v *= *v;
    }
    fwht(&mut t);
    let inv = 1.0 / t.len() as f64;
    for v in t.iter_mut() {
        *v = (*v * inv).max(0.0);
    }
    CharDistribution { n: p.n, table: t }
}

/// `Σ_{x ∈ T} dist(x)` by enumerating `T`.
pub fn subspace_mass(dist: &CharDistribution, t: &Subspace) -> Result<f64> {
    subspace_mass_capped(dist, t, ENUMERATION_CAP)
}

pub fn subspace_mass_capped(dist: &CharDistribution, t: &Subspace, cap: usize) -> Result<f64> {
    check_same_n(dist.n, t.n())?;
    if t.dim() > cap {
        return Err(Error::Capacity {
            what: "enumerated subspace dimension",
            requested: t.dim(),
            cap,
        });
    }
    Ok(t.elements().map(|x| dist.get(&x)).sum())
}

/// `Weyl(|ψ⟩) = {x : W_x|ψ⟩ = ±|ψ⟩}` by brute force over all `4^n` vectors.
pub fn unsigned_stabilizer_group(psi: &StateVector) -> Result<Subspace> {
    let p = char_distribution(psi)?;
    Ok(stabilizer_group_from(&p))
}

/// `{x : |⟨ψ|W_x|ψ⟩| ≥ 1 - STABILIZER_TOL}` read off a `p_ψ` table.
pub fn stabilizer_group_from(p: &CharDistribution) -> Subspace {
    let n = p.n;
    let threshold = (1.0 - STABILIZER_TOL).powi(2) / (1u64 << n) as f64;
    row_reduce_unchecked(
        n,
        p.table
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= threshold)
            .map(|(i, _)| F2Vector::from_index(n, i as u64)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simstate::Unitary2;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn v(n: usize, s: &str) -> F2Vector {
        F2Vector::from_bit_str(n, s).unwrap()
    }

    #[test]
    fn weyl_apply_examples() {
        let mut rng = StdRng::seed_from_u64(1);
        let psi = StateVector::haar_random(3, &mut rng);
        assert_eq!(weyl_apply(&F2Vector::zero(3), &psi).unwrap(), psi);
        let one = weyl_apply(&v(1, "1|0"), &StateVector::zero(1)).unwrap();
        assert_eq!(one, StateVector::basis(1, 1));
        // W_(1|1) = iXZ = Y, and Y|0⟩ = i|1⟩.
        let y0 = weyl_apply(&v(1, "1|1"), &StateVector::zero(1)).unwrap();
        assert!((y0.amplitudes()[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(y0.amplitudes()[0].norm() < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        let zero = StateVector::zero(3);
        assert_eq!(weyl_expectation(&zero, &F2Vector::zero(3)).unwrap(), 1.0);
        assert_eq!(weyl_expectation(&zero, &v(3, "000|101")).unwrap(), 1.0);
        assert_eq!(weyl_expectation(&zero, &v(3, "010|101")).unwrap(), 0.0);
    }

    #[test]
    fn walsh_table_matches_direct_expectations() {
        let mut rng = StdRng::seed_from_u64(2);
        for n in 1..=4 {
            let mut psi = StateVector::haar_random(n, &mut rng);
            psi.apply_u1(0, &Unitary2::haar_random(&mut rng));
            let p = char_distribution(&psi).unwrap();
            for idx in 0..1u64 << (2 * n) {
                let x = F2Vector::from_index(n, idx);
                let e = weyl_expectation(&psi, &x).unwrap();
                let direct = e * e / (1u64 << n) as f64;
                assert!((p.get(&x) - direct).abs() < 1e-12);
            }
            assert!((p.total() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_state_distribution() {
        let p = char_distribution(&StateVector::zero(3)).unwrap();
        for idx in 0..64u64 {
            let x = F2Vector::from_index(3, idx);
            let expected = if x.x_mask() == 0 { 1.0 / 8.0 } else { 0.0 };
            assert!((p.get(&x) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn q_matches_brute_force_convolution() {
        let mut rng = StdRng::seed_from_u64(3);
        for n in 1..=3 {
            let psi = StateVector::haar_random(n, &mut rng);
            let p = char_distribution(&psi).unwrap();
            let q = q_distribution(&p);
            let len = p.table().len();
            for x in 0..len {
                let brute: f64 = (0..len).map(|a| p.table()[a] * p.table()[x ^ a]).sum();
                assert!((q.table()[x] - brute).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn capacity_errors() {
        let psi = StateVector::zero(ORACLE_CAP + 1);
        assert!(matches!(
            char_distribution(&psi),
            Err(Error::Capacity { .. })
        ));
        let p = char_distribution(&StateVector::zero(2)).unwrap();
        assert!(matches!(
            subspace_mass_capped(&p, &Subspace::full(2), 3),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn subspace_mass_examples() {
        let mut rng = StdRng::seed_from_u64(4);
        let psi = StateVector::haar_random(3, &mut rng);
        let p = char_distribution(&psi).unwrap();
        assert!((subspace_mass(&p, &Subspace::full(3)).unwrap() - 1.0).abs() < 1e-9);
        assert!((subspace_mass(&p, &Subspace::zero(3)).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn binary_round_trip() {
        let p = char_distribution(&StateVector::zero(2)).unwrap();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 16 * 8);
        assert_eq!(&buf[..4], &2u32.to_le_bytes());
        assert_eq!(CharDistribution::read_from(&buf[..]).unwrap(), p);
        assert!(CharDistribution::read_from(&buf[..20]).is_err());
    }
}
