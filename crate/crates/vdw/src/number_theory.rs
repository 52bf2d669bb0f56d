//! Primorials, Mobius values, and the lcm-based contractibility threshold.

use std::sync::OnceLock;

use num::rational::BigRational;
use num::{BigInt, BigUint, One};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NtError {
    #[error("argument must be >= 1")]
    Zero,
    #[error("argument must be > 1")]
    TooSmall,
    #[error("argument must be >= 3")]
    BelowLogLogRange,
}

const SIEVE_BOUND: u64 = 100_000;

/// Primes up to `SIEVE_BOUND`, computed once.
fn sieve() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = SIEVE_BOUND as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for p in 2..=n {
            if !composite[p] {
                primes.push(p as u64);
                let mut q = p * p;
                while q <= n {
                    composite[q] = true;
                    q += p;
                }
            }
        }
        primes
    })
}

/// Primes p <= x in increasing order.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    assert!(
        x <= SIEVE_BOUND,
        "prime range above {SIEVE_BOUND} not needed"
    );
    let s = sieve();
    let end = s.partition_point(|&p| p <= x);
    s[..end].to_vec()
}

/// Product of all primes p <= x; empty product for x < 2.
pub fn primorial(x: u64) -> BigUint {
    let mut acc = BigUint::one();
    for &p in primes_up_to(x).iter() {
        acc *= BigUint::from(p);
    }
    acc
}

/// Product of the first r primes, with the empty product 1 for r = 0.
pub fn nth_primorial(r: usize) -> BigUint {
    let s = sieve();
    assert!(r <= s.len());
    let mut acc = BigUint::one();
    for &p in &s[..r] {
        acc *= BigUint::from(p);
    }
    acc
}

/// The unique r >= 1 with nth_primorial(r-1) <= k < nth_primorial(r).
pub fn r_of_k(k: u64) -> Result<usize, NtError> {
    if k == 0 {
        return Err(NtError::Zero);
    }
    let k = BigUint::from(k);
    let mut r = 1;
    while nth_primorial(r) <= k {
        r += 1;
    }
    Ok(r)
}

/// Prime factorization as (prime, exponent) pairs in increasing prime order.
pub fn factorize(k: u64) -> Vec<(u64, u32)> {
    assert!(k >= 1);
    let mut k = k;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= k {
        if k % p == 0 {
            let mut e = 0;
            while k % p == 0 {
                k /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if k > 1 {
        out.push((k, 1));
    }
    out
}

pub fn is_squarefree(k: u64) -> bool {
    factorize(k).iter().all(|&(_, e)| e == 1)
}

/// Product of the distinct primes dividing k; radical(1) = 1.
pub fn radical(k: u64) -> Result<u64, NtError> {
    if k == 0 {
        return Err(NtError::Zero);
    }
    Ok(factorize(k).iter().map(|&(p, _)| p).product())
}

/// Mobius function via the factorization: 0 on non-squarefree k, else (-1)^omega.
pub fn mobius(k: u64) -> Result<i64, NtError> {
    if k == 0 {
        return Err(NtError::Zero);
    }
    let f = factorize(k);
    if f.iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.len() % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// Certificate for the contractibility bound at a given a:
/// L = lcm(1..=a), M = max over primes p of p^(alpha_p - 1) where p^alpha_p || L,
/// and vdW(n,k) is contractible whenever k >= L/M and k < n <= (a+1)k.
#[derive(Debug, Clone)]
pub struct BoundCertificate {
    pub a: u64,
    pub l: BigUint,
    /// Factorization of L as (prime, exponent) pairs.
    pub l_factorization: Vec<(u64, u32)>,
    pub m: BigUint,
    /// L/M as an exact rational (always an integer since M divides L).
    pub threshold: BigRational,
}

impl BoundCertificate {
    /// L/M as an integer.
    pub fn threshold_int(&self) -> BigUint {
        &self.l / &self.m
    }

    /// Human-readable statement of what the certificate guarantees.
    pub fn applies_to(&self) -> String {
        format!(
            "vdW(n,k) contractible when k >= {} and k < n <= {}*k",
            self.threshold_int(),
            self.a + 1
        )
    }
}

/// Computes the certificate for a; errors for a <= 1.
pub fn bound_certificate(a: u64) -> Result<BoundCertificate, NtError> {
    if a < 2 {
        return Err(NtError::TooSmall);
    }
    // v_p(lcm(1..=a)) is the largest alpha with p^alpha <= a.
    let mut l = BigUint::one();
    let mut m = BigUint::one();
    let mut fact = Vec::new();
    for p in primes_up_to(a) {
        let mut alpha = 0u32;
        let mut power = 1u64;
        while power <= a / p {
            power *= p;
            alpha += 1;
        }
        fact.push((p, alpha));
        l *= BigUint::from(p).pow(alpha);
        let half = BigUint::from(p).pow(alpha - 1);
        if half > m {
            m = half;
        }
    }
    let threshold = BigRational::new(BigInt::from(l.clone()), BigInt::from(m.clone()));
    Ok(BoundCertificate {
        a,
        l,
        l_factorization: fact,
        m,
        threshold,
    })
}

/// Largest a > 1 whose threshold L(a)/M(a) is at most k, if the pair (n,k)
/// additionally satisfies k < n <= (a+1)k; None otherwise.
///
/// The n > k guard keeps the witness honest: for n <= k the complex is a set of
/// isolated points and the contraction argument (which needs a positive b with
/// bk < n) does not apply.
pub fn contractibility_witness(n: u64, k: u64) -> Option<u64> {
    if k == 0 || n <= k {
        return None;
    }
    let k_big = BigUint::from(k);
    let mut best = None;
    let mut a = 2;
    loop {
        let cert = bound_certificate(a).expect("a >= 2");
        // threshold weakly increases with a, so stop at the first exceedance
        if cert.threshold_int() > k_big {
            break;
        }
        best = Some(a);
        a += 1;
    }
    let a = best?;
    if BigUint::from(n) <= BigUint::from(a + 1) * &k_big {
        Some(a)
    } else {
        None
    }
}

/// Checks that L(a)/M(a) is weakly increasing for 2 <= a <= a_max.
pub fn lm_monotone_check(a_max: u64) -> bool {
    let mut prev = bound_certificate(2).expect("a = 2").threshold;
    for a in 3..=a_max {
        let cur = bound_certificate(a).expect("a >= 2").threshold;
        if cur < prev {
            return false;
        }
        prev = cur;
    }
    true
}

/// Diagnostic ratio r(k) * ln(ln k) / ln(k); requires k >= 3 so ln(ln k) is defined.
pub fn asymptotic_ratio(k: u64) -> Result<f64, NtError> {
    if k < 3 {
        return Err(NtError::BelowLogLogRange);
    }
    let r = r_of_k(k).expect("k >= 3") as f64;
    let lk = (k as f64).ln();
    Ok(r * lk.ln() / lk)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primorial_values() {
        assert_eq!(primorial(1), BigUint::one());
        assert_eq!(primorial(2), BigUint::from(2u32));
        assert_eq!(primorial(10), BigUint::from(210u32));
        assert_eq!(nth_primorial(0), BigUint::one());
        assert_eq!(nth_primorial(4), BigUint::from(210u32));
    }

    #[test]
    fn r_of_k_values() {
        assert_eq!(r_of_k(1), Ok(1));
        assert_eq!(r_of_k(2), Ok(2));
        assert_eq!(r_of_k(5), Ok(2));
        assert_eq!(r_of_k(6), Ok(3));
        assert_eq!(r_of_k(29), Ok(3));
        assert_eq!(r_of_k(30), Ok(4));
        assert_eq!(r_of_k(0), Err(NtError::Zero));
    }

    #[test]
    fn mobius_and_radical() {
        assert_eq!(mobius(1), Ok(1));
        assert_eq!(mobius(4), Ok(0));
        assert_eq!(mobius(6), Ok(1));
        assert_eq!(mobius(30), Ok(-1));
        assert_eq!(radical(12), Ok(6));
        assert_eq!(radical(7), Ok(7));
        assert_eq!(radical(1), Ok(1));
        assert!(mobius(0).is_err());
    }

    #[test]
    fn certificates() {
        let c = bound_certificate(4).unwrap();
        assert_eq!(c.l, BigUint::from(12u32));
        assert_eq!(c.m, BigUint::from(2u32));
        assert_eq!(c.threshold_int(), BigUint::from(6u32));

        let c = bound_certificate(2).unwrap();
        assert_eq!(c.l, BigUint::from(2u32));
        assert_eq!(c.m, BigUint::one());
        assert_eq!(c.threshold_int(), BigUint::from(2u32));

        let c = bound_certificate(9).unwrap();
        assert_eq!(c.l, BigUint::from(2520u32));
        assert_eq!(c.m, BigUint::from(4u32));
        assert_eq!(c.threshold_int(), BigUint::from(630u32));

        assert!(bound_certificate(1).is_err());
    }

    #[test]
    fn witnesses() {
        assert_eq!(contractibility_witness(30, 6), Some(4));
        assert_eq!(contractibility_witness(35, 7), Some(4));
        assert_eq!(contractibility_witness(25, 5), None);
        assert_eq!(contractibility_witness(12, 4), Some(2));
        // isolated-point regime is excluded
        assert_eq!(contractibility_witness(5, 10), None);
        assert_eq!(contractibility_witness(3, 6), None);
    }

    #[test]
    fn monotone_thresholds() {
        assert!(lm_monotone_check(60));
    }

    #[test]
    fn ratio_domain() {
        assert!(asymptotic_ratio(2).is_err());
        assert!(asymptotic_ratio(16).unwrap() > 0.0);
    }
}
