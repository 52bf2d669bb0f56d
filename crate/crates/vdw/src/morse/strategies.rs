//! Matching strategies: the general fiberwise matching, the contraction for
//! n/k within the certified bound, and hand-tuned minimal matchings for the
//! four wedge examples.

use std::collections::{BTreeMap, HashSet};

use num::integer::lcm;
use num::BigUint;

use crate::complex::{decompose, step_set, FaceSet, FiberKey};
use crate::face::Face;
use crate::gamma::{match_gamma, GammaMatching};
use crate::number_theory::bound_certificate;

use super::{patchwork, verify_matching, MorseError, MorseMatching, StrategyReport};

/// Pairs every singleton {i} with the edge {i, i+1} when that edge exists.
/// Leaves {n} critical, plus every singleton if there are no edges at all.
fn bottom_pairs(fs: &FaceSet) -> Vec<(Face, Face)> {
    (1..fs.n())
        .filter_map(|i| {
            let edge = Face::of(&[i, i + 1]);
            fs.contains(&edge).then_some((Face::singleton(i), edge))
        })
        .collect()
}

/// Non-bottom faces grouped by (min, max), faces in (dimension, lex) order.
fn span_fibers(fs: &FaceSet) -> BTreeMap<(u32, u32), Vec<Face>> {
    let mut out: BTreeMap<(u32, u32), Vec<Face>> = BTreeMap::new();
    for f in fs.iter_faces() {
        let x = f.min_vertex().expect("non-empty");
        let y = f.max_vertex().expect("non-empty");
        if y - x >= 2 {
            out.entry((x, y)).or_default().push(*f);
        }
    }
    out
}

/// Pairs each face not containing t with its union with t, whenever that
/// union is a face. Returns the pairs and whatever stayed unmatched.
fn toggle_pairs(faces: &[Face], t: u32, fs: &FaceSet) -> (Vec<(Face, Face)>, Vec<Face>) {
    let mut pairs = Vec::new();
    let mut matched: HashSet<Face> = HashSet::new();
    for f in faces {
        if f.contains(t) {
            continue;
        }
        let u = f.with(t);
        if fs.contains(&u) {
            pairs.push((*f, u));
            matched.insert(*f);
            matched.insert(u);
        }
    }
    let unmatched = faces
        .iter()
        .filter(|f| !matched.contains(f))
        .copied()
        .collect();
    (pairs, unmatched)
}

/// The general strategy: match the bottom layer along consecutive edges, and
/// match every fiber (x, y, d) by transporting the Gamma matching for
/// (y - x)/d through v -> d*v + x.
pub fn build_fiber_matching(fs: &FaceSet) -> StrategyReport {
    let mut cache: BTreeMap<u32, GammaMatching> = BTreeMap::new();
    let mut fiber_matchings: BTreeMap<FiberKey, MorseMatching> = BTreeMap::new();
    for key in decompose(fs).into_keys() {
        let pairs = match key {
            FiberKey::Bottom => bottom_pairs(fs),
            FiberKey::Span { x, y, d } => {
                let j = (y - x) / d;
                let gm = cache.entry(j).or_insert_with(|| match_gamma(j));
                gm.pairs
                    .iter()
                    .map(|(l, u)| {
                        (
                            l.affine(d, x).expect("fiber stays within the ambient"),
                            u.affine(d, x).expect("fiber stays within the ambient"),
                        )
                    })
                    .collect()
            }
        };
        fiber_matchings.insert(key, MorseMatching::new(fs.n(), fs.k(), pairs));
    }
    let matching = patchwork(fs, &fiber_matchings).expect("fiberwise matching is valid");
    StrategyReport::assemble(fs, matching)
}

/// The contraction strategy, valid when a >= 2, k >= L(a)/M(a) and
/// k < n <= (a+1)k. Each pair fiber (x, y) is perfectly matched by toggling
/// x + lcm(T), where T is the set of divisibility-minimal steps of the fiber;
/// only the vertex {n} survives, so the complex is contractible.
pub fn build_contraction_matching(fs: &FaceSet, a: u64) -> Result<StrategyReport, MorseError> {
    let n = fs.n() as u64;
    let k = fs.k() as u64;
    if a < 2 {
        return Err(MorseError::Precondition(format!(
            "need a >= 2, got a = {a}"
        )));
    }
    let cert = bound_certificate(a).expect("a >= 2 was checked");
    let threshold = cert.threshold_int();
    if BigUint::from(k) < threshold {
        return Err(MorseError::Precondition(format!(
            "need k >= L({a})/M({a}) = {threshold}, got k = {k}"
        )));
    }
    if n <= k {
        return Err(MorseError::Precondition(format!(
            "need n > k, got n = {n}, k = {k}"
        )));
    }
    if n > (a + 1) * k {
        return Err(MorseError::Precondition(format!(
            "need n <= (a+1)k = {}, got n = {n}",
            (a + 1) * k
        )));
    }

    let mut pairs = bottom_pairs(fs);
    for ((x, y), faces) in span_fibers(fs) {
        let steps = step_set(fs.n(), fs.k(), x, y).expect("span of an actual face");
        let minimal: Vec<u32> = steps
            .iter()
            .copied()
            .filter(|&t| steps.iter().all(|&s| s == t || t % s != 0))
            .collect();
        let ell = minimal.iter().fold(1u64, |acc, &t| lcm(acc, t as u64));
        let e = (y - x) as u64;
        if ell >= e {
            return Err(MorseError::InvariantViolation(format!(
                "lcm of minimal steps is {ell}, not below the span length {e} at ({x},{y})"
            )));
        }
        let (fiber_pairs, unmatched) = toggle_pairs(&faces, x + ell as u32, fs);
        if !unmatched.is_empty() {
            return Err(MorseError::InvariantViolation(format!(
                "toggling {} left {} unmatched faces in fiber ({x},{y})",
                x + ell as u32,
                unmatched.len()
            )));
        }
        pairs.extend(fiber_pairs);
    }

    let matching = MorseMatching::new(fs.n(), fs.k(), pairs);
    verify_matching(fs, &matching)?;
    let report = StrategyReport::assemble(fs, matching);
    if report.critical != [Face::singleton(fs.n())] {
        return Err(MorseError::InvariantViolation(format!(
            "expected {{{}}} as the only critical cell, found {}",
            fs.n(),
            report.critical.len()
        )));
    }
    Ok(report)
}

/// Toggle offset for the tuned matchings, by (k, span length). None means the
/// whole fiber is left alone. For k = 5 the rule for multiples of 5 must win
/// over the rule for multiples of 3 (at e = 15 only x + 3 keeps unions inside
/// the complex), and e = 12 gets the offset 6 with a leftover handled
/// separately.
fn toggle_offset(k: u32, e: u32) -> Option<u32> {
    match k {
        2 => (e % 2 == 0).then_some(e / 2),
        3 => match e {
            2 | 4 | 8 => Some(e / 2),
            _ if e % 3 == 0 => Some(e / 3),
            _ => None,
        },
        4 | 5 => match e {
            2 | 4 | 8 | 16 => Some(e / 2),
            12 => Some(6),
            _ if k == 5 && e % 5 == 0 => Some(e / 5),
            _ if e % 3 == 0 => Some(e / 3),
            _ => None,
        },
        _ => None,
    }
}

/// What may legitimately remain unmatched in the fiber (x, x+e), after the
/// special pairing at e = 12.
fn expected_critical(k: u32, e: u32, x: u32) -> Vec<Face> {
    match (k, e) {
        (2, 3) => vec![Face::of(&[x, x + 3])],
        (3, 6) | (4, 6) | (5, 6) => vec![Face::of(&[x, x + 3, x + 6])],
        (4, 12) | (5, 12) => vec![Face::of(&[x, x + 4, x + 12])],
        _ => Vec::new(),
    }
}

/// Hand-tuned matchings realizing the minimal Morse vector for
/// vdW(10,2), vdW(15,3), vdW(20,4) and vdW(25,5).
pub fn build_minimal_matching(fs: &FaceSet) -> Result<StrategyReport, MorseError> {
    let (n, k) = (fs.n(), fs.k());
    if !matches!((n, k), (10, 2) | (15, 3) | (20, 4) | (25, 5)) {
        return Err(MorseError::UnsupportedCase { n, k });
    }

    let mut pairs = bottom_pairs(fs);
    for ((x, y), faces) in span_fibers(fs) {
        let e = y - x;
        let mut leftover = match toggle_offset(k, e) {
            Some(off) => {
                let (fiber_pairs, unmatched) = toggle_pairs(&faces, x + off, fs);
                pairs.extend(fiber_pairs);
                unmatched
            }
            None => faces,
        };
        if k >= 4 && e == 12 {
            // Toggling x+6 cannot touch the three faces refining the step-4
            // progression; pair two of them directly.
            let l = Face::of(&[x, x + 8, x + 12]);
            let u = Face::of(&[x, x + 4, x + 8, x + 12]);
            let pos = leftover.iter().position(|f| *f == l);
            let pos_u = leftover.iter().position(|f| *f == u);
            match (pos, pos_u) {
                (Some(i), Some(j)) => {
                    pairs.push((l, u));
                    let mut keep: Vec<Face> = Vec::new();
                    for (idx, f) in leftover.iter().enumerate() {
                        if idx != i && idx != j {
                            keep.push(*f);
                        }
                    }
                    leftover = keep;
                }
                _ => {
                    return Err(MorseError::InvariantViolation(format!(
                        "fiber ({x},{y}) lacks the step-4 refinement faces"
                    )));
                }
            }
        }
        let expected = expected_critical(k, e, x);
        if leftover != expected {
            return Err(MorseError::InvariantViolation(format!(
                "fiber ({x},{y}) left {:?}, expected {:?}",
                leftover, expected
            )));
        }
    }

    let matching = MorseMatching::new(n, k, pairs);
    verify_matching(fs, &matching)?;
    Ok(StrategyReport::assemble(fs, matching))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::enumerate_faces;
    use crate::morse::critical_cells;

    #[test]
    fn bottom_layer_leaves_only_the_last_vertex() {
        let fs = enumerate_faces(8, 3).unwrap();
        let pairs = bottom_pairs(&fs);
        assert_eq!(pairs.len(), 7);
        // no edges at all when n <= k: everything stays critical
        let points = enumerate_faces(4, 7).unwrap();
        assert!(bottom_pairs(&points).is_empty());
    }

    #[test]
    fn fiber_strategy_on_the_complete_graph() {
        // vdW(6,1) is the complete graph on 6 vertices: one critical vertex
        // and C(5,2) = 10 critical edges
        let fs = enumerate_faces(6, 1).unwrap();
        let report = build_fiber_matching(&fs);
        assert!(report.acyclic);
        assert_eq!(report.morse_vector.count(0), 1);
        assert_eq!(report.morse_vector.count(1), 10);
        assert_eq!(
            report.homotopy_summary.as_deref(),
            Some("wedge of 10 spheres of dim 1")
        );
    }

    #[test]
    fn fiber_strategy_critical_cells_match_gamma_criticals() {
        let fs = enumerate_faces(12, 3).unwrap();
        let report = build_fiber_matching(&fs);
        assert!(report.acyclic);
        for c in &report.critical {
            if c.dimension() == 0 {
                continue;
            }
            // each positive-dimensional critical cell is the affine image of a
            // Gamma critical cell: {x, y} plus the points x + d*(j/q)
            let x = c.min_vertex().unwrap();
            let y = c.max_vertex().unwrap();
            let d = crate::complex::gcdtr(c).unwrap() as u32;
            let j = (y - x) / d;
            let expect = crate::gamma::squarefree_critical_cell(j)
                .unwrap()
                .affine(d, x)
                .unwrap();
            assert_eq!(*c, expect);
        }
    }

    #[test]
    fn contraction_certifies_small_cases() {
        // a = 2: threshold L/M = 2, so any k >= 2 with k < n <= 3k works
        for (n, k) in [(6u32, 2u32), (9, 3), (12, 4), (7, 3), (10, 4)] {
            let fs = enumerate_faces(n, k).unwrap();
            let report = build_contraction_matching(&fs, 2).unwrap();
            assert!(report.acyclic);
            assert_eq!(report.homotopy_summary.as_deref(), Some("contractible"));
            assert_eq!(report.critical, vec![Face::singleton(n)]);
        }
    }

    #[test]
    fn contraction_rejects_bad_parameters() {
        let fs = enumerate_faces(10, 2).unwrap();
        assert!(matches!(
            build_contraction_matching(&fs, 1),
            Err(MorseError::Precondition(_))
        ));
        // n = 10 > 3k = 6
        assert!(matches!(
            build_contraction_matching(&fs, 2),
            Err(MorseError::Precondition(_))
        ));
        // threshold L(4)/M(4) = 6 > k = 2
        assert!(matches!(
            build_contraction_matching(&fs, 4),
            Err(MorseError::Precondition(_))
        ));
        // isolated points: n <= k
        let points = enumerate_faces(4, 7).unwrap();
        assert!(matches!(
            build_contraction_matching(&points, 2),
            Err(MorseError::Precondition(_))
        ));
    }

    #[test]
    fn tuned_matching_inventories() {
        let cases: [(u32, u32, usize, usize); 4] = [
            // (n, k, top dimension, number of top critical cells)
            (10, 2, 1, 7),
            (15, 3, 2, 9),
            (20, 4, 2, 22),
            (25, 5, 2, 32),
        ];
        for (n, k, dim, count) in cases {
            let fs = enumerate_faces(n, k).unwrap();
            let report = build_minimal_matching(&fs).unwrap();
            assert!(report.acyclic, "vdW({n},{k})");
            assert_eq!(report.morse_vector.count(0), 1, "vdW({n},{k})");
            assert_eq!(report.morse_vector.count(dim), count, "vdW({n},{k})");
            assert_eq!(report.morse_vector.total(), count + 1, "vdW({n},{k})");
            assert_eq!(
                report.homotopy_summary.as_deref(),
                Some(format!("wedge of {count} spheres of dim {dim}").as_str())
            );
            assert_eq!(critical_cells(&fs, &report.matching), report.critical);
        }
    }

    #[test]
    fn tuned_matching_critical_cells_for_the_first_example() {
        let fs = enumerate_faces(10, 2).unwrap();
        let report = build_minimal_matching(&fs).unwrap();
        let mut expect = vec![Face::singleton(10)];
        for x in 1..=7 {
            expect.push(Face::of(&[x, x + 3]));
        }
        expect.sort_by_key(|f| (f.dimension(), *f));
        assert_eq!(report.critical, expect);
    }

    #[test]
    fn tuned_matching_rejects_other_parameters() {
        let fs = enumerate_faces(12, 2).unwrap();
        assert!(matches!(
            build_minimal_matching(&fs),
            Err(MorseError::UnsupportedCase { n: 12, k: 2 })
        ));
    }
}
