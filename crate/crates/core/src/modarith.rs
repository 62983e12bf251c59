//! Exact integer arithmetic over Z_N for odd N.
//!
//! Every index `i ∈ Z_N` has a mixed-radix expansion whose digit bases are the
//! prime factors of N, smallest prime first, each prime repeated as many times
//! as its exponent. The weight of a digit is the product of all bases that
//! follow it, so the last digit (base `p_{n-1}`) has weight 1.
//!
//! The interleaving permutation [`pi_perm`] rewrites only that last digit
//! through the power map `x ↦ x^e mod p_{n-1}`, which is itself a
//! [`power_perm`].

use crate::error::{QcssError, Result};
use crate::par::Execution;

/// Canonical factorization of an odd modulus `n ≥ 3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    n: u64,
    primes: Vec<u64>,
    exponents: Vec<u32>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Least prime factor.
    pub fn p0(&self) -> u64 {
        self.primes[0]
    }

    /// Largest prime factor; the base of the digit that gets permuted.
    pub fn last_prime(&self) -> u64 {
        *self.primes.last().expect("factorization is never empty")
    }

    pub fn is_prime(&self) -> bool {
        self.primes.len() == 1 && self.exponents[0] == 1
    }

    /// Digit bases in expansion order: `e_0` copies of `p_0`, then `e_1`
    /// copies of `p_1`, and so on.
    pub fn digit_bases(&self) -> Vec<u64> {
        self.primes
            .iter()
            .zip(&self.exponents)
            .flat_map(|(&p, &e)| std::iter::repeat_n(p, e as usize))
            .collect()
    }

    pub fn digit_count(&self) -> usize {
        self.exponents.iter().map(|&e| e as usize).sum()
    }

    /// Human-readable alphabet label such as `Z_{3*5*7}`.
    pub fn alphabet_label(&self) -> String {
        let parts: Vec<String> = self.digit_bases().iter().map(|p| p.to_string()).collect();
        format!("Z_{{{}}}", parts.join("*"))
    }
}

/// Trial-division factorization of an odd `n ≥ 3`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 3 {
        return Err(QcssError::ModulusTooSmall(n));
    }
    if n.is_multiple_of(2) {
        return Err(QcssError::EvenModulus(n));
    }
    let mut primes = Vec::new();
    let mut exponents = Vec::new();
    let mut rest = n;
    let mut p = 3u64;
    while p * p <= rest {
        let mut e = 0u32;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            primes.push(p);
            exponents.push(e);
        }
        p += 2;
    }
    if rest > 1 {
        primes.push(rest);
        exponents.push(1);
    }
    Ok(Factorization {
        n,
        primes,
        exponents,
    })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `base^exp mod modulus` by square-and-multiply.
pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc = 1u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Mixed-radix digits of an element of Z_N, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitVector {
    digits: Vec<(u64, u64)>,
}

impl DigitVector {
    /// Builds a digit vector from `(value, base)` pairs.
    pub fn new(digits: Vec<(u64, u64)>) -> Result<Self> {
        if let Some(&(v, b)) = digits.iter().find(|(v, b)| v >= b) {
            return Err(QcssError::OutOfRange {
                value: v,
                modulus: b,
            });
        }
        Ok(Self { digits })
    }

    pub fn digits(&self) -> &[(u64, u64)] {
        &self.digits
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.digits.iter().map(|&(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

pub fn to_digits(i: u64, f: &Factorization) -> Result<DigitVector> {
    if i >= f.n {
        return Err(QcssError::OutOfRange {
            value: i,
            modulus: f.n,
        });
    }
    let bases = f.digit_bases();
    let mut digits = vec![(0, 0); bases.len()];
    let mut rest = i;
    for (slot, &b) in digits.iter_mut().zip(&bases).rev() {
        *slot = (rest % b, b);
        rest /= b;
    }
    Ok(DigitVector { digits })
}

pub fn from_digits(d: &DigitVector, f: &Factorization) -> Result<u64> {
    let bases = f.digit_bases();
    if d.len() != bases.len() {
        return Err(QcssError::ShapeMismatch {
            modulus: f.n,
            reason: format!("expected {} digits, got {}", bases.len(), d.len()),
        });
    }
    let mut acc = 0u64;
    for (pos, (&(v, b), &expected)) in d.digits.iter().zip(&bases).enumerate() {
        if b != expected {
            return Err(QcssError::ShapeMismatch {
                modulus: f.n,
                reason: format!("digit {pos} has base {b}, expected {expected}"),
            });
        }
        acc = acc * b + v;
    }
    Ok(acc)
}

/// A bijection on `{0, …, modulus-1}` stored as an image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    table: Vec<u64>,
}

impl Permutation {
    /// Wraps an image table, rejecting anything that is not a bijection.
    pub fn from_table(table: Vec<u64>) -> Result<Self> {
        let n = table.len() as u64;
        let mut seen = vec![false; table.len()];
        for &x in &table {
            if x >= n || std::mem::replace(&mut seen[x as usize], true) {
                return Err(QcssError::OutOfRange {
                    value: x,
                    modulus: n,
                });
            }
        }
        Ok(Self { table })
    }

    pub fn identity(n: u64) -> Self {
        Self {
            table: (0..n).collect(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.table.len() as u64
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as u64;
        }
        Self { table: inv }
    }
}

/// The power map `x ↦ x^e` on Z_p.
pub fn power_perm(p: u64, e: u64) -> Result<Permutation> {
    if p == 2 || !is_prime(p) {
        return Err(QcssError::NotPrime(p));
    }
    if e == 0 || gcd(p - 1, e) != 1 {
        return Err(QcssError::NotCoprime {
            prime: p,
            exponent: e,
        });
    }
    Ok(Permutation {
        table: (0..p).map(|x| pow_mod(x, e, p)).collect(),
    })
}

/// Smallest `e ≥ 2` with `gcd(p-1, e) = 1`.
pub fn default_exponent(p: u64) -> u64 {
    (2..)
        .find(|&e| gcd(p - 1, e) == 1)
        .expect("p - 1 + 1 is always coprime")
}

/// Default exponent for the largest prime of `f`.
pub fn default_exponent_for(f: &Factorization) -> u64 {
    default_exponent(f.last_prime())
}

/// Interleaving permutation on Z_N: expand, rewrite the final digit through
/// `x ↦ x^e mod p_{n-1}`, recombine.
pub fn pi_perm(f: &Factorization, e: u64) -> Result<Permutation> {
    let xi = power_perm(f.last_prime(), e)?;
    let table = (0..f.n)
        .map(|i| {
            let mut d = to_digits(i, f)?;
            let last = d.digits.last_mut().expect("at least one digit");
            last.0 = xi.apply(last.0);
            from_digits(&d, f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Permutation { table })
}

/// One `(τ, c)` pair whose equation does not have exactly one solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolutionCountViolation {
    pub tau: u64,
    pub c: u64,
    pub solutions: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniqueSolutionReport {
    pub ok: bool,
    /// Number of `(τ, c)` pairs examined.
    pub checked: u64,
    pub violations: Vec<SolutionCountViolation>,
}

/// Exhaustively counts solutions of `π(x+τ) ≡ c·π(x) (mod N)` for every
/// `τ ∈ Z_N` and every `c ∈ {2, …, p_0-1}`.
pub fn verify_unique_solution(f: &Factorization, perm: &Permutation) -> UniqueSolutionReport {
    verify_unique_solution_with(f, perm, Execution::default())
}

pub fn verify_unique_solution_with(
    f: &Factorization,
    perm: &Permutation,
    exec: Execution,
) -> UniqueSolutionReport {
    assert_eq!(perm.modulus(), f.n, "permutation modulus differs from N");
    let n = f.n;
    let p0 = f.p0();
    let per_tau = |tau: u64| -> Vec<SolutionCountViolation> {
        let mut counts = vec![0u64; p0 as usize];
        for x in 0..n {
            let lhs = perm.apply((x + tau) % n);
            let px = perm.apply(x);
            for c in 2..p0 {
                if (c * px) % n == lhs {
                    counts[c as usize] += 1;
                }
            }
        }
        (2..p0)
            .filter(|&c| counts[c as usize] != 1)
            .map(|c| SolutionCountViolation {
                tau,
                c,
                solutions: counts[c as usize],
            })
            .collect()
    };
    let violations: Vec<_> = exec
        .map_range(0..n, per_tau)
        .into_iter()
        .flatten()
        .collect();
    UniqueSolutionReport {
        ok: violations.is_empty(),
        checked: n * p0.saturating_sub(2),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        let f = factorize(15).unwrap();
        assert_eq!((f.primes(), f.exponents()), (&[3, 5][..], &[1, 1][..]));
        let f = factorize(35).unwrap();
        assert_eq!((f.primes(), f.exponents()), (&[5, 7][..], &[1, 1][..]));
        let f = factorize(45).unwrap();
        assert_eq!((f.primes(), f.exponents()), (&[3, 5][..], &[2, 1][..]));
        assert_eq!(f.digit_bases(), vec![3, 3, 5]);
        assert_eq!(f.alphabet_label(), "Z_{3*3*5}");
    }

    #[test]
    fn factorize_rejects_bad_moduli() {
        assert_eq!(factorize(4), Err(QcssError::EvenModulus(4)));
        assert_eq!(factorize(1), Err(QcssError::ModulusTooSmall(1)));
        assert_eq!(factorize(2), Err(QcssError::ModulusTooSmall(2)));
        assert!(factorize(3).unwrap().is_prime());
    }

    #[test]
    fn digits_of_seven_mod_fifteen() {
        let f = factorize(15).unwrap();
        let d = to_digits(7, &f).unwrap();
        assert_eq!(d.digits(), &[(1, 3), (2, 5)]);
        assert_eq!(from_digits(&d, &f).unwrap(), 7);
    }

    #[test]
    fn digits_mod_thirty_five() {
        let f = factorize(35).unwrap();
        assert_eq!(to_digits(9, &f).unwrap().digits(), &[(1, 5), (2, 7)]);
        let d = DigitVector::new(vec![(2, 5), (6, 7)]).unwrap();
        assert_eq!(from_digits(&d, &f).unwrap(), 20);
        assert!(to_digits(0, &f).unwrap().values().all(|v| v == 0));
    }

    #[test]
    fn digits_follow_block_weights() {
        // 45 = 3·3·5: weights 15, 5, 1.
        let f = factorize(45).unwrap();
        let d = to_digits(2 * 15 + 5 + 3, &f).unwrap();
        assert_eq!(d.digits(), &[(2, 3), (1, 3), (3, 5)]);
    }

    #[test]
    fn digit_errors() {
        let f = factorize(15).unwrap();
        assert!(matches!(
            to_digits(15, &f),
            Err(QcssError::OutOfRange { .. })
        ));
        let short = DigitVector::new(vec![(1, 3)]).unwrap();
        assert!(matches!(
            from_digits(&short, &f),
            Err(QcssError::ShapeMismatch { .. })
        ));
        let swapped = DigitVector::new(vec![(1, 5), (1, 3)]).unwrap();
        assert!(matches!(
            from_digits(&swapped, &f),
            Err(QcssError::ShapeMismatch { .. })
        ));
        assert!(DigitVector::new(vec![(3, 3)]).is_err());
    }

    #[test]
    fn power_perm_examples() {
        assert_eq!(power_perm(5, 3).unwrap().table(), &[0, 1, 3, 2, 4]);
        assert_eq!(power_perm(7, 5).unwrap().table(), &[0, 1, 4, 5, 2, 3, 6]);
        assert_eq!(power_perm(3, 3).unwrap().table(), &[0, 1, 2]);
    }

    #[test]
    fn power_perm_errors() {
        assert!(matches!(
            power_perm(7, 2),
            Err(QcssError::NotCoprime {
                prime: 7,
                exponent: 2
            })
        ));
        assert_eq!(power_perm(9, 5), Err(QcssError::NotPrime(9)));
        assert_eq!(power_perm(2, 1), Err(QcssError::NotPrime(2)));
    }

    #[test]
    fn default_exponents() {
        assert_eq!(default_exponent(5), 3);
        assert_eq!(default_exponent(7), 5);
        assert_eq!(default_exponent(3), 3);
        assert_eq!(default_exponent(11), 3);
        assert_eq!(default_exponent(31), 7);
    }

    #[test]
    fn pi_perm_fifteen() {
        let f = factorize(15).unwrap();
        let pi = pi_perm(&f, 3).unwrap();
        assert_eq!(
            pi.table(),
            &[0, 1, 3, 2, 4, 5, 6, 8, 7, 9, 10, 11, 13, 12, 14]
        );
    }

    #[test]
    fn pi_perm_thirty_five() {
        let f = factorize(35).unwrap();
        let pi = pi_perm(&f, 5).unwrap();
        assert_eq!(&pi.table()[..10], &[0, 1, 4, 5, 2, 3, 6, 7, 8, 11]);
        assert_eq!(pi.apply(2), 4);
        assert_eq!(pi.apply(9), 11);
    }

    #[test]
    fn pi_perm_identity_when_exponent_one() {
        let f = factorize(13).unwrap();
        assert_eq!(pi_perm(&f, 1).unwrap(), Permutation::identity(13));
        assert!(matches!(
            pi_perm(&factorize(35).unwrap(), 3),
            Err(QcssError::NotCoprime {
                prime: 7,
                exponent: 3
            })
        ));
    }

    #[test]
    fn unique_solution_small_cases() {
        let f = factorize(15).unwrap();
        let pi = pi_perm(&f, 3).unwrap();
        let report = verify_unique_solution(&f, &pi);
        assert!(report.ok);
        assert_eq!(report.checked, 15);

        let f = factorize(9).unwrap();
        let pi = pi_perm(&f, default_exponent_for(&f)).unwrap();
        assert!(verify_unique_solution(&f, &pi).ok);
    }

    #[test]
    fn unique_solution_detects_identity_failure() {
        // Affine maps always pass; swapping two images of π does not.
        let f = factorize(35).unwrap();
        let mut table = pi_perm(&f, 5).unwrap().table().to_vec();
        table.swap(3, 17);
        let bad = Permutation::from_table(table).unwrap();
        let report = verify_unique_solution(&f, &bad);
        assert!(!report.ok);
        assert!(report.violations.iter().all(|v| v.solutions != 1));
    }

    #[test]
    fn from_table_rejects_non_bijections() {
        assert!(Permutation::from_table(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_table(vec![0, 3, 1]).is_err());
        let p = Permutation::from_table(vec![2, 0, 1]).unwrap();
        assert_eq!(p.inverse().table(), &[1, 2, 0]);
    }
}
