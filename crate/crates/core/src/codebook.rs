//! Phase matrices, complete complementary codes and their union.
//!
//! Set `(k, m)` is the N×N matrix with entries `k·s·π(t) + m·t mod N`, row `s`
//! and column `t`. For a fixed `k ∈ {1, …, p_0-1}` the N sets `m = 0…N-1` form
//! one complete complementary code; the union over all `k` is the QCSS.

use std::fmt;

use crate::error::{QcssError, Result};
use crate::modarith::{default_exponent_for, factorize, pi_perm, Factorization, Permutation};

/// One complementary set stored as integer phases over Z_N, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PhaseMatrix {
    n: u32,
    k: u32,
    m: u32,
    phases: Vec<u32>,
}

impl fmt::Debug for PhaseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhaseMatrix")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("m", &self.m)
            .finish_non_exhaustive()
    }
}

impl PhaseMatrix {
    /// Wraps raw row-major phases, checking shape and range only.
    pub fn from_phases(n: u32, k: u32, m: u32, phases: Vec<u32>) -> Result<Self> {
        let len = n as usize * n as usize;
        if phases.len() != len {
            return Err(QcssError::LengthMismatch {
                left: phases.len(),
                right: len,
            });
        }
        if let Some(&bad) = phases.iter().find(|&&p| p >= n) {
            return Err(QcssError::OutOfRange {
                value: bad as u64,
                modulus: n as u64,
            });
        }
        Ok(Self { n, k, m, phases })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn phases(&self) -> &[u32] {
        &self.phases
    }

    pub fn row(&self, s: usize) -> &[u32] {
        let n = self.n as usize;
        &self.phases[s * n..(s + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.phases.chunks_exact(self.n as usize)
    }

    pub fn get(&self, s: usize, t: usize) -> u32 {
        self.phases[s * self.n as usize + t]
    }

    /// Overwrites one entry (reduced mod N). Used to build corrupted copies
    /// for sensitivity checks.
    pub fn set(&mut self, s: usize, t: usize, phase: u32) {
        let n = self.n as usize;
        self.phases[s * n + t] = phase % self.n;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// One complete complementary code, all members sharing family index `k`.
    SingleCcc { k: u32 },
    /// The union of every code, ordered by `u = (k-1)·N + m`.
    FullQcss,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceFamily {
    n: u32,
    kind: FamilyKind,
    members: Vec<PhaseMatrix>,
}

impl SequenceFamily {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn members(&self) -> &[PhaseMatrix] {
        &self.members
    }

    pub fn members_mut(&mut self) -> &mut [PhaseMatrix] {
        &mut self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Set size K.
    pub fn set_size(&self) -> usize {
        self.members.len()
    }

    /// Flock size M (rows per set); equal to N for this construction.
    pub fn flock_size(&self) -> usize {
        self.n as usize
    }

    pub fn into_members(self) -> Vec<PhaseMatrix> {
        self.members
    }
}

/// Everything needed to build sets over one modulus: the factorization, the
/// chosen exponent and the permutation π derived from them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    factorization: Factorization,
    exponent: u64,
    perm: Permutation,
}

impl Codebook {
    /// Codebook with the smallest admissible exponent `e ≥ 2`.
    pub fn new(n: u64) -> Result<Self> {
        let f = factorize(n)?;
        let e = default_exponent_for(&f);
        Self::from_parts(f, e)
    }

    pub fn with_exponent(n: u64, exponent: u64) -> Result<Self> {
        Self::from_parts(factorize(n)?, exponent)
    }

    pub fn from_parts(factorization: Factorization, exponent: u64) -> Result<Self> {
        if factorization.n() > u32::MAX as u64 {
            return Err(QcssError::OutOfRange {
                value: factorization.n(),
                modulus: u32::MAX as u64,
            });
        }
        let perm = pi_perm(&factorization, exponent)?;
        Ok(Self {
            factorization,
            exponent,
            perm,
        })
    }

    pub fn n(&self) -> u64 {
        self.factorization.n()
    }

    pub fn p0(&self) -> u64 {
        self.factorization.p0()
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    /// Number of distinct codes, `p_0 - 1`.
    pub fn family_count(&self) -> u64 {
        self.p0() - 1
    }

    /// Global index `u = (k-1)·N + m` of set `(k, m)` inside the QCSS.
    pub fn global_index(&self, k: u64, m: u64) -> u64 {
        (k - 1) * self.n() + m
    }

    /// Inverse of [`Codebook::global_index`].
    pub fn family_and_set(&self, u: u64) -> (u64, u64) {
        (u / self.n() + 1, u % self.n())
    }

    fn check_k(&self, k: u64) -> Result<()> {
        if k == 0 || k >= self.p0() {
            return Err(QcssError::BadFamilyIndex { k, p0: self.p0() });
        }
        Ok(())
    }

    fn check_index(&self, value: u64) -> Result<()> {
        if value >= self.n() {
            return Err(QcssError::OutOfRange {
                value,
                modulus: self.n(),
            });
        }
        Ok(())
    }

    /// Phase of row `s`, column `t` in set `(k, m)`.
    pub fn phase(&self, k: u64, m: u64, s: u64, t: u64) -> Result<u64> {
        self.check_k(k)?;
        for v in [m, s, t] {
            self.check_index(v)?;
        }
        Ok(phase_with(k, m, s, t, &self.perm))
    }

    pub fn build_set(&self, k: u64, m: u64) -> Result<PhaseMatrix> {
        self.check_k(k)?;
        self.check_index(m)?;
        let n = self.n();
        let mut phases = Vec::with_capacity((n * n) as usize);
        for s in 0..n {
            // k·s reduced once per row keeps the products small.
            let ks = (k * s) % n;
            for t in 0..n {
                phases.push(((ks * self.perm.apply(t) + m * t) % n) as u32);
            }
        }
        Ok(PhaseMatrix {
            n: n as u32,
            k: k as u32,
            m: m as u32,
            phases,
        })
    }

    pub fn build_ccc(&self, k: u64) -> Result<SequenceFamily> {
        self.check_k(k)?;
        let members = (0..self.n())
            .map(|m| self.build_set(k, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(SequenceFamily {
            n: self.n() as u32,
            kind: FamilyKind::SingleCcc { k: k as u32 },
            members,
        })
    }

    pub fn build_qcss(&self) -> Result<SequenceFamily> {
        let mut members = Vec::with_capacity((self.family_count() * self.n()) as usize);
        for k in 1..self.p0() {
            members.extend(self.build_ccc(k)?.into_members());
        }
        Ok(SequenceFamily {
            n: self.n() as u32,
            kind: FamilyKind::FullQcss,
            members,
        })
    }
}

/// `(k·s·π(t) + m·t) mod N` without range checks on the indices.
pub fn phase_with(k: u64, m: u64, s: u64, t: u64, perm: &Permutation) -> u64 {
    let n = perm.modulus();
    let ks = (k % n) * (s % n) % n;
    (ks * perm.apply(t % n) + (m % n) * (t % n)) % n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn book35() -> Codebook {
        Codebook::new(35).unwrap()
    }

    #[test]
    fn default_codebook_uses_smallest_exponent() {
        assert_eq!(book35().exponent(), 5);
        assert_eq!(Codebook::new(15).unwrap().exponent(), 3);
    }

    #[test]
    fn phase_examples() {
        let b = book35();
        assert_eq!(b.phase(1, 0, 1, 2).unwrap(), 4);
        assert_eq!(b.phase(2, 0, 1, 3).unwrap(), 10);
        for t in 0..35 {
            assert_eq!(b.phase(3, 0, 0, t).unwrap(), 0);
        }
    }

    #[test]
    fn phase_rejects_bad_family_index() {
        let b = book35();
        assert_eq!(
            b.phase(0, 0, 0, 0),
            Err(QcssError::BadFamilyIndex { k: 0, p0: 5 })
        );
        assert_eq!(
            b.phase(5, 0, 0, 0),
            Err(QcssError::BadFamilyIndex { k: 5, p0: 5 })
        );
        assert!(b.build_set(1, 35).is_err());
        assert!(b.build_ccc(7).is_err());
    }

    #[test]
    fn prime_three_identity_digits() {
        // N = 3: ξ(x) = x³ ≡ x, so phases are s·t mod 3.
        let b = Codebook::new(3).unwrap();
        let c = b.build_set(1, 0).unwrap();
        for s in 0..3 {
            for t in 0..3 {
                assert_eq!(c.get(s, t) as usize, s * t % 3);
            }
        }
    }

    #[test]
    fn row_one_is_scaled_permutation() {
        let b = book35();
        for k in 1..3u64 {
            let c = b.build_set(k, 0).unwrap();
            let expected: Vec<u32> = b
                .perm()
                .table()
                .iter()
                .map(|&p| (k * p % 35) as u32)
                .collect();
            assert_eq!(c.row(1), &expected[..]);
        }
    }

    #[test]
    fn family_shapes() {
        let b = book35();
        let ccc = b.build_ccc(1).unwrap();
        assert_eq!(ccc.len(), 35);
        assert_eq!(ccc.kind(), FamilyKind::SingleCcc { k: 1 });
        assert!(ccc
            .members()
            .iter()
            .enumerate()
            .all(|(m, c)| c.m() as usize == m));
        assert!(ccc.members().iter().all(|c| c.phases().len() == 35 * 35));

        let q = b.build_qcss().unwrap();
        assert_eq!(q.set_size(), 140);
        assert_eq!(q.flock_size(), 35);
        for (u, c) in q.members().iter().enumerate() {
            assert_eq!(b.global_index(c.k() as u64, c.m() as u64), u as u64);
            assert_eq!(b.family_and_set(u as u64), (c.k() as u64, c.m() as u64));
        }
        assert_eq!(Codebook::new(15).unwrap().build_qcss().unwrap().len(), 30);
    }

    #[test]
    fn zero_row_of_first_set() {
        let c = book35().build_set(4, 0).unwrap();
        assert!(c.row(0).iter().all(|&p| p == 0));
    }

    #[test]
    fn from_phases_validates() {
        assert!(PhaseMatrix::from_phases(3, 1, 0, vec![0; 8]).is_err());
        assert!(PhaseMatrix::from_phases(3, 1, 0, vec![3; 9]).is_err());
        let mut c = PhaseMatrix::from_phases(3, 1, 0, vec![0; 9]).unwrap();
        c.set(1, 2, 4);
        assert_eq!(c.get(1, 2), 1);
    }
}
