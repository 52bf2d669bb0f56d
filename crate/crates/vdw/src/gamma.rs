//! Gamma families: sets F with {0,k} included in F, F inside [0,k], gcd(F) = 1.
//!
//! These are the building blocks of the fiber decomposition of vdW(n,k).
//! Each family carries a discrete Morse matching: a fixed-element toggle when
//! k is not squarefree, and a recursion through Gamma(k/p) when it is. The
//! matching is defined by a pointwise partner rule, so it can be evaluated on
//! single members without materializing the (exponentially large) family.

use num::integer::gcd;
use thiserror::Error;

use crate::face::Face;
use crate::number_theory::{factorize, is_squarefree, radical};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GammaError {
    #[error("k must be >= 1")]
    Zero,
    #[error("k = {0} is not squarefree")]
    NotSquarefree(u64),
}

/// Explicit member list of Gamma(k), in lexicographic order.
pub struct GammaFamily {
    k: u32,
    members: Vec<Face>,
}

impl GammaFamily {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn members(&self) -> &[Face] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, f: &Face) -> bool {
        gamma_contains(self.k, f)
    }
}

/// Membership in Gamma(k): contains 0 and k, lives in [0,k], gcd of elements 1.
pub fn gamma_contains(k: u32, f: &Face) -> bool {
    if !f.contains(0) || !f.contains(k) {
        return false;
    }
    if f.max_vertex().unwrap_or(0) > k {
        return false;
    }
    let mut g = 0u64;
    for v in f.vertices() {
        g = gcd(g, v as u64);
    }
    g == 1
}

/// Materializes Gamma(k). The family has on the order of 2^(k-1) members,
/// so this is only for small k; larger k go through `gamma_partner`.
pub fn gamma(k: u32) -> GammaFamily {
    assert!(k >= 1, "k must be >= 1");
    assert!(k <= 32, "gamma({k}) is too large to materialize");
    let mut members = Vec::new();
    let base = Face::singleton(0).with(k);
    for mask in 0u64..(1u64 << (k - 1)) {
        let mut f = base;
        let mut g = k as u64;
        for v in 1..k {
            if mask & (1 << (v - 1)) != 0 {
                f = f.with(v);
                g = gcd(g, v as u64);
            }
        }
        if g == 1 {
            members.push(f);
        }
    }
    members.sort();
    GammaFamily { k, members }
}

/// Which prime divisor drives the squarefree recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeChoice {
    Smallest,
    Largest,
}

/// Partner of a member of Gamma(k) under the Morse matching; None exactly on
/// the critical cell. Smallest-prime recursion; see `gamma_partner_choosing`
/// for the variant used to test choice independence.
pub fn gamma_partner(k: u32, f: &Face) -> Option<Face> {
    gamma_partner_choosing(k, f, PrimeChoice::Smallest)
}

/// Matching rule. For non-squarefree k the partner is F toggled at
/// radical(k). For squarefree k with chosen prime p and t = k/p:
/// members without t gain it; members with t lose it when the rest still has
/// gcd 1; otherwise the rest is p * G for G in Gamma(k/p) and we recurse.
pub fn gamma_partner_choosing(k: u32, f: &Face, choice: PrimeChoice) -> Option<Face> {
    assert!(gamma_contains(k, f), "{f:?} is not a member of Gamma({k})");
    if k == 1 {
        return None;
    }
    if !is_squarefree(k as u64) {
        let s = radical(k as u64).expect("k >= 1") as u32;
        return Some(f.toggled(s));
    }
    let primes = factorize(k as u64);
    let p = match choice {
        PrimeChoice::Smallest => primes.first().expect("k > 1").0 as u32,
        PrimeChoice::Largest => primes.last().expect("k > 1").0 as u32,
    };
    let t = k / p;
    if !f.contains(t) {
        return Some(f.with(t));
    }
    let rest = f.without(t);
    let mut g = 0u64;
    for v in rest.vertices() {
        g = gcd(g, v as u64);
    }
    if g == 1 {
        return Some(rest);
    }
    debug_assert_eq!(g, p as u64);
    let quotient = rest.deflate(p, 0);
    gamma_partner_choosing(t, &quotient, choice)
        .map(|q| q.affine(p, 0).expect("vertices shrink").with(t))
}

/// A matching on Gamma(k): lower/upper cover pairs plus the critical cell,
/// which is present exactly when k is squarefree.
#[derive(Debug, Clone)]
pub struct GammaMatching {
    pub pairs: Vec<(Face, Face)>,
    pub critical: Option<Face>,
}

/// Materialized matching on Gamma(k), pairs sorted by (lower dim, lower, upper).
pub fn match_gamma(k: u32) -> GammaMatching {
    let family = gamma(k);
    let mut pairs = Vec::new();
    let mut critical = None;
    for f in family.members() {
        match gamma_partner(k, f) {
            None => {
                assert!(critical.is_none(), "two critical cells in Gamma({k})");
                critical = Some(*f);
            }
            Some(u) if f.is_covered_by(&u) => pairs.push((*f, u)),
            Some(_) => {} // f is the upper member; recorded from its partner
        }
    }
    pairs.sort_by_key(|(l, u)| (l.dimension(), *l, *u));
    GammaMatching { pairs, critical }
}

/// The unique critical cell for squarefree k: {0, k} plus k/q for each prime q | k.
pub fn squarefree_critical_cell(k: u32) -> Result<Face, GammaError> {
    if k == 0 {
        return Err(GammaError::Zero);
    }
    if !is_squarefree(k as u64) {
        return Err(GammaError::NotSquarefree(k as u64));
    }
    let mut f = Face::singleton(0).with(k);
    for (q, _) in factorize(k as u64) {
        f = f.with(k / q as u32);
    }
    Ok(f)
}

/// Signed sum over Gamma(k) of (-1)^|F|, which equals the Mobius value mu(k).
///
/// Computed without enumeration: walk the free elements 1..k-1 and track the
/// gcd of the chosen set together with k, which is always a divisor of k.
/// The accumulator per divisor stays tiny (bounded by 2^omega(k)) because the
/// inclusion/exclusion signs cancel almost everything.
pub fn mobius_via_gamma(k: u32) -> i64 {
    assert!(k >= 1);
    let divisors: Vec<u64> = {
        let k = k as u64;
        let mut d: Vec<u64> = (1..=k).filter(|d| k % d == 0).collect();
        d.sort();
        d
    };
    let index = |d: u64| divisors.binary_search(&d).expect("divisor of k");
    let mut counts = vec![0i64; divisors.len()];
    counts[index(k as u64)] = 1;
    for e in 1..k as u64 {
        let mut next = counts.clone();
        for (i, &d) in divisors.iter().enumerate() {
            if counts[i] != 0 {
                next[index(gcd(d, e))] -= counts[i];
            }
        }
        counts = next;
    }
    counts[0]
}
