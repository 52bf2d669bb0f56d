//! The van der Waerden complex vdW(n,k) and its fiber decomposition.
//!
//! Facets are the (k+1)-term arithmetic progressions inside [1,n]; faces are
//! their subsets, together with the empty face and all singletons. Non-bottom
//! faces are fibered by (min, max, gcd of the translated face), and each fiber
//! is an affine copy of a Gamma family.

use std::collections::{BTreeMap, HashSet};

use num::integer::gcd;
use serde::Serialize;
use thiserror::Error;

use crate::face::Face;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("n and k must be >= 1")]
    ZeroParameter,
    #[error("ambient [1,{0}] exceeds the supported maximum vertex {max}", max = Face::MAX_VERTEX)]
    AmbientTooLarge(u64),
    #[error("vertex {v} outside the ambient interval [1,{n}]")]
    VertexOutOfRange { v: u32, n: u32 },
    #[error("the empty face has no span data")]
    EmptyFace,
    #[error("need 1 <= x < y <= n, got x={x}, y={y}, n={n}")]
    BadSpan { x: u32, y: u32, n: u32 },
    #[error("{{{x},{y}}} is not a face of vdW({n},{k})")]
    SpanNotAFace { x: u32, y: u32, n: u32, k: u32 },
    #[error("vdW({n},{k}) is too large to enumerate explicitly")]
    EnumerationTooLarge { n: u32, k: u32 },
}

/// A facet: the arithmetic progression {x, x+d, ..., x+k*d}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ApFacet {
    pub x: u32,
    pub d: u32,
    pub k: u32,
}

impl ApFacet {
    pub fn last(&self) -> u32 {
        self.x + self.k * self.d
    }

    pub fn expand(&self) -> Face {
        Face::from_vertices((0..=self.k).map(|j| self.x + j * self.d))
            .expect("facet vertices in range")
    }

    pub fn contains(&self, v: u32) -> bool {
        v >= self.x && v <= self.last() && (v - self.x) % self.d == 0
    }
}

/// All facets of vdW(n,k), ordered by (d, x).
///
/// The count is sum over d >= 1 of max(0, n - k*d).
pub fn facets(n: u32, k: u32) -> Vec<ApFacet> {
    assert!(n >= 1 && k >= 1);
    let mut out = Vec::new();
    let mut d = 1;
    while k as u64 * d as u64 <= (n - 1) as u64 {
        for x in 1..=(n - k * d) {
            out.push(ApFacet { x, d, k });
        }
        d += 1;
    }
    out
}

/// vdW(n,k) as an explicit face list, bucketed by dimension.
pub struct FaceSet {
    n: u32,
    k: u32,
    facets: Vec<ApFacet>,
    by_dim: Vec<Vec<Face>>,
    all: HashSet<Face>,
    empty_bucket: Vec<Face>,
}

/// Builds vdW(n,k) by expanding every facet's power set, then deduplicating.
/// The empty face and all singletons are always present.
pub fn enumerate_faces(n: u32, k: u32) -> Result<FaceSet, ComplexError> {
    if n == 0 || k == 0 {
        return Err(ComplexError::ZeroParameter);
    }
    if n > Face::MAX_VERTEX {
        return Err(ComplexError::AmbientTooLarge(n as u64));
    }
    let facet_list = facets(n, k);
    // Power-set expansion touches |facets| * 2^(k+1) subsets; refuse anything
    // past a fixed budget rather than thrash (this also keeps the u32 subset
    // mask below safe).
    const ENUMERATION_BUDGET: u128 = 1 << 24;
    let cost = facet_list.len() as u128 * (1u128 << (k as u128 + 1).min(64));
    if cost > ENUMERATION_BUDGET {
        return Err(ComplexError::EnumerationTooLarge { n, k });
    }
    let mut all: HashSet<Face> = HashSet::new();
    all.insert(Face::EMPTY);
    for v in 1..=n {
        all.insert(Face::singleton(v));
    }
    for f in &facet_list {
        let verts: Vec<u32> = f.expand().to_vec();
        for mask in 1u32..(1 << verts.len()) {
            let face = Face::from_vertices(
                verts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &v)| v),
            )
            .expect("facet vertices in range");
            all.insert(face);
        }
    }
    let max_dim = all.iter().map(|f| f.dimension()).max().unwrap_or(-1);
    let mut by_dim: Vec<Vec<Face>> = vec![Vec::new(); (max_dim + 1).max(0) as usize];
    for f in &all {
        if !f.is_empty() {
            by_dim[f.dimension() as usize].push(*f);
        }
    }
    for bucket in &mut by_dim {
        bucket.sort();
    }
    Ok(FaceSet {
        n,
        k,
        facets: facet_list,
        by_dim,
        all,
        empty_bucket: vec![Face::EMPTY],
    })
}

impl FaceSet {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn facets(&self) -> &[ApFacet] {
        &self.facets
    }

    /// Largest dimension of any face; -1 when only the empty face exists.
    pub fn dim(&self) -> i32 {
        self.by_dim.len() as i32 - 1
    }

    pub fn faces_of_dim(&self, d: i32) -> &[Face] {
        if d == -1 {
            return &self.empty_bucket;
        }
        self.by_dim
            .get(d as usize)
            .map(|b| b.as_slice())
            .unwrap_or(&[])
    }

    pub fn contains(&self, f: &Face) -> bool {
        self.all.contains(f)
    }

    /// Number of faces including the empty face.
    pub fn total_faces(&self) -> usize {
        1 + self.by_dim.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Non-empty faces in (dimension, lexicographic) order.
    pub fn iter_faces(&self) -> impl Iterator<Item = &Face> {
        self.by_dim.iter().flatten()
    }

    /// (dimension, count) pairs starting at dimension -1.
    pub fn f_vector(&self) -> Vec<(i32, usize)> {
        let mut out = vec![(-1, 1)];
        for (d, bucket) in self.by_dim.iter().enumerate() {
            out.push((d as i32, bucket.len()));
        }
        out
    }

    /// Unreduced Euler characteristic: alternating sum over dimensions >= 0.
    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(d, bucket)| {
                let c = bucket.len() as i64;
                if d % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }

    pub fn reduced_euler_characteristic(&self) -> i64 {
        self.euler_characteristic() - 1
    }
}

/// Membership test: empty face and subsets of facets are faces.
/// Vertices outside [1,n] are a domain error, not just "false".
pub fn is_face(f: &Face, n: u32, k: u32) -> Result<bool, ComplexError> {
    if n == 0 || k == 0 {
        return Err(ComplexError::ZeroParameter);
    }
    if f.is_empty() {
        return Ok(true);
    }
    for v in f.vertices() {
        if v < 1 || v > n {
            return Err(ComplexError::VertexOutOfRange { v, n });
        }
    }
    if f.cardinality() == 1 {
        return Ok(true);
    }
    let target = *f;
    Ok(facets(n, k)
        .iter()
        .any(|p| target.is_subset_of(&p.expand())))
}

/// gcd of the differences v - min(F) over v in F; 0 for singletons.
pub fn gcdtr(f: &Face) -> Result<u64, ComplexError> {
    let min = f.min_vertex().ok_or(ComplexError::EmptyFace)?;
    let mut g = 0u64;
    for v in f.vertices() {
        g = gcd(g, (v - min) as u64);
    }
    Ok(g)
}

/// Steps d such that some facet of step d contains both x and y.
pub fn step_set(
    n: u32,
    k: u32,
    x: u32,
    y: u32,
) -> Result<std::collections::BTreeSet<u32>, ComplexError> {
    if n == 0 || k == 0 {
        return Err(ComplexError::ZeroParameter);
    }
    if !(1 <= x && x < y && y <= n) {
        return Err(ComplexError::BadSpan { x, y, n });
    }
    let mut steps = std::collections::BTreeSet::new();
    for p in facets(n, k) {
        if p.contains(x) && p.contains(y) {
            steps.insert(p.d);
        }
    }
    if steps.is_empty() {
        return Err(ComplexError::SpanNotAFace { x, y, n, k });
    }
    Ok(steps)
}

/// Divisors d of y-x for which the full progression {x, x+d, ..., y} is a face.
///
/// This is a subset of {d : d | y-x, (y-x)/d <= k}, and the inclusion can be
/// strict: a short enough progression may still fit inside no facet.
pub fn d_set(
    n: u32,
    k: u32,
    x: u32,
    y: u32,
) -> Result<std::collections::BTreeSet<u32>, ComplexError> {
    if n == 0 || k == 0 {
        return Err(ComplexError::ZeroParameter);
    }
    if !(1 <= x && x < y && y <= n) {
        return Err(ComplexError::BadSpan { x, y, n });
    }
    let e = y - x;
    let facet_list = facets(n, k);
    let mut out = std::collections::BTreeSet::new();
    for d in 1..=e {
        if e % d != 0 {
            continue;
        }
        let prog = Face::from_vertices((0..=(e / d)).map(|j| x + j * d))
            .expect("progression vertices in range");
        if facet_list.iter().any(|p| prog.is_subset_of(&p.expand())) {
            out.insert(d);
        }
    }
    Ok(out)
}

/// Fiber label for the order-preserving map used by the patchwork argument.
///
/// Bottom collects the empty-span faces (singletons and {i,i+1}); every other
/// face maps to (min, max, gcdtr).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FiberKey {
    Bottom,
    Span { x: u32, y: u32, d: u32 },
}

impl FiberKey {
    /// The fiber poset order: Bottom is the unique minimum, and
    /// (x,y,d) <= (x',y',d') iff x' <= x < y <= y' and d' | d.
    pub fn leq_q(&self, other: &FiberKey) -> bool {
        match (self, other) {
            (FiberKey::Bottom, _) => true,
            (_, FiberKey::Bottom) => false,
            (
                FiberKey::Span { x, y, d },
                FiberKey::Span {
                    x: x2,
                    y: y2,
                    d: d2,
                },
            ) => x2 <= x && y <= y2 && d % d2 == 0,
        }
    }
}

/// Fiber label of a non-empty face.
pub fn fiber_key(f: &Face) -> Result<FiberKey, ComplexError> {
    let min = f.min_vertex().ok_or(ComplexError::EmptyFace)?;
    let max = f.max_vertex().expect("non-empty");
    if max - min <= 1 {
        return Ok(FiberKey::Bottom);
    }
    let d = gcdtr(f)? as u32;
    Ok(FiberKey::Span { x: min, y: max, d })
}

/// Groups the non-empty faces by fiber label. The buckets partition the
/// non-empty faces, and each Span bucket is an affine copy d*Gamma(j)+x
/// of the Gamma family with j = (y-x)/d.
pub fn decompose(fs: &FaceSet) -> BTreeMap<FiberKey, Vec<Face>> {
    let mut out: BTreeMap<FiberKey, Vec<Face>> = BTreeMap::new();
    for f in fs.iter_faces() {
        let key = fiber_key(f).expect("non-empty face");
        out.entry(key).or_default().push(*f);
    }
    for bucket in out.values_mut() {
        bucket.sort_by_key(|f| (f.dimension(), *f));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn facet_counts() {
        // no facet fits when n <= k
        assert!(facets(5, 5).is_empty());
        assert_eq!(facets(25, 5).len(), 50);
        let f72 = facets(7, 2);
        assert!(f72.contains(&ApFacet { x: 1, d: 3, k: 2 }));
        assert_eq!(
            f72.len(),
            (1..=3).map(|d| 7 - 2 * d as usize).sum::<usize>()
        );
    }

    #[test]
    fn complete_graph_for_k_one() {
        let fs = enumerate_faces(5, 1).unwrap();
        assert_eq!(fs.total_faces(), 16);
        assert_eq!(fs.dim(), 1);
        assert_eq!(fs.faces_of_dim(1).len(), 10);
        assert_eq!(fs.euler_characteristic(), -5);
        assert_eq!(fs.reduced_euler_characteristic(), -6);
    }

    #[test]
    fn no_monotonicity_in_k() {
        let f = Face::of(&[1, 4, 7]);
        assert_eq!(is_face(&f, 7, 2), Ok(true));
        assert_eq!(is_face(&f, 7, 3), Ok(false));
    }

    #[test]
    fn membership_domain_errors() {
        let f = Face::of(&[3, 9]);
        assert_eq!(
            is_face(&f, 7, 2),
            Err(ComplexError::VertexOutOfRange { v: 9, n: 7 })
        );
        assert_eq!(is_face(&Face::EMPTY, 4, 2), Ok(true));
    }

    #[test]
    fn enumeration_budget() {
        assert!(matches!(
            enumerate_faces(127, 40),
            Err(ComplexError::EnumerationTooLarge { n: 127, k: 40 })
        ));
        // no facets at all: cost is zero no matter how large k is
        assert!(enumerate_faces(50, 100).is_ok());
    }

    #[test]
    fn enumeration_matches_brute_force_on_small_cases() {
        for (n, k) in [(7u32, 2u32), (10, 2), (9, 3), (8, 4)] {
            let fs = enumerate_faces(n, k).unwrap();
            let mut count = 0usize;
            for mask in 0u32..(1 << n) {
                let face =
                    Face::from_vertices((1..=n).filter(|v| mask & (1 << (v - 1)) != 0)).unwrap();
                if is_face(&face, n, k).unwrap() {
                    count += 1;
                    assert!(fs.contains(&face), "missing {face:?}");
                }
            }
            assert_eq!(fs.total_faces(), count);
        }
        // frozen count for the first wedge example
        assert_eq!(enumerate_faces(10, 2).unwrap().total_faces(), 67);
    }

    #[test]
    fn downward_closure() {
        let fs = enumerate_faces(12, 3).unwrap();
        for f in fs.iter_faces() {
            for v in f.vertices() {
                assert!(fs.contains(&f.without(v)));
            }
        }
    }

    #[test]
    fn gcdtr_values() {
        assert_eq!(gcdtr(&Face::of(&[1, 4, 7])), Ok(3));
        assert_eq!(gcdtr(&Face::of(&[5])), Ok(0));
        assert_eq!(gcdtr(&Face::of(&[2, 3])), Ok(1));
        assert_eq!(gcdtr(&Face::EMPTY), Err(ComplexError::EmptyFace));
    }

    #[test]
    fn step_and_d_sets() {
        let s = step_set(7, 3, 1, 7).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![2]);

        let d = d_set(7, 3, 1, 7).unwrap();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![2, 6]);
        // ... strictly smaller than the divisor-count bound {2, 3, 6}

        // span (1,7) in vdW(10,2): only the step-3 facet {1,4,7} covers both
        // ends, while the bare pair {1,7} is additionally a full progression
        // with step 6 inside it
        let s = step_set(10, 2, 1, 7).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![3]);
        let d = d_set(10, 2, 1, 7).unwrap();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![3, 6]);
        assert_eq!(
            step_set(7, 2, 2, 7),
            Err(ComplexError::SpanNotAFace {
                x: 2,
                y: 7,
                n: 7,
                k: 2
            })
        );
        assert_eq!(
            step_set(7, 2, 5, 3),
            Err(ComplexError::BadSpan { x: 5, y: 3, n: 7 })
        );
    }

    #[test]
    fn fiber_keys() {
        assert_eq!(fiber_key(&Face::of(&[3])), Ok(FiberKey::Bottom));
        assert_eq!(fiber_key(&Face::of(&[4, 5])), Ok(FiberKey::Bottom));
        assert_eq!(
            fiber_key(&Face::of(&[1, 4, 7])),
            Ok(FiberKey::Span { x: 1, y: 7, d: 3 })
        );
        assert_eq!(fiber_key(&Face::EMPTY), Err(ComplexError::EmptyFace));
    }

    #[test]
    fn fiber_order() {
        let bottom = FiberKey::Bottom;
        let inner = FiberKey::Span { x: 3, y: 7, d: 4 };
        let outer = FiberKey::Span { x: 1, y: 7, d: 2 };
        assert!(bottom.leq_q(&inner));
        assert!(!inner.leq_q(&bottom));
        assert!(inner.leq_q(&outer));
        assert!(!outer.leq_q(&inner));
    }

    #[test]
    fn decompose_partitions_the_faces() {
        for (n, k) in [(7u32, 2u32), (10, 2), (12, 3)] {
            let fs = enumerate_faces(n, k).unwrap();
            let fibers = decompose(&fs);
            let total: usize = fibers.values().map(|v| v.len()).sum();
            assert_eq!(total + 1, fs.total_faces());
            for (key, faces) in &fibers {
                for f in faces {
                    assert_eq!(fiber_key(f).unwrap(), *key);
                }
            }
        }
    }

    #[test]
    fn two_element_fiber_is_its_own_pair() {
        let fs = enumerate_faces(10, 2).unwrap();
        let fibers = decompose(&fs);
        let key = FiberKey::Span { x: 1, y: 4, d: 3 };
        assert_eq!(fibers[&key], vec![Face::of(&[1, 4])]);
    }
}
