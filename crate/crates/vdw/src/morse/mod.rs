//! Discrete Morse matchings: verification, patchwork assembly, reporting.
//!
//! A matching is a set of disjoint cover pairs of non-empty faces. It is
//! acyclic when the face poset, with matched cover edges reversed, has no
//! directed cycle; such cycles always alternate between two consecutive
//! dimensions, which is what the verifier exploits.

mod strategies;

pub use strategies::{build_contraction_matching, build_fiber_matching, build_minimal_matching};

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::complex::{fiber_key, FaceSet, FiberKey};
use crate::face::Face;
use crate::homology::BettiReport;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingViolation {
    #[error("the empty face cannot be matched")]
    EmptyFaceMatched,
    #[error("face {0:?} is not in the complex")]
    FaceNotInComplex(Face),
    #[error("face {0:?} appears in more than one pair")]
    DuplicateFace(Face),
    #[error("pair ({0:?}, {1:?}) is not a cover pair")]
    NonCoverPair(Face, Face),
    #[error("directed cycle: {0:?}")]
    Cycle(Vec<Face>),
}

#[derive(Debug, Error)]
pub enum MorseError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no tuned matching for vdW({n},{k}); supported: (10,2), (15,3), (20,4), (25,5)")]
    UnsupportedCase { n: u32, k: u32 },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("pair ({lower:?}, {upper:?}) lies outside fiber {key:?}")]
    PairOutsideFiber {
        key: FiberKey,
        lower: Face,
        upper: Face,
    },
    #[error("invalid matching: {0}")]
    Matching(#[from] MatchingViolation),
}

/// A Morse matching on vdW(n,k), stored as (lower, upper) cover pairs
/// sorted by (lower dimension, lower face, upper face).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseMatching {
    n: u32,
    k: u32,
    pairs: Vec<(Face, Face)>,
}

impl MorseMatching {
    pub fn new(n: u32, k: u32, mut pairs: Vec<(Face, Face)>) -> MorseMatching {
        pairs.sort_by_key(|(l, u)| (l.dimension(), *l, *u));
        MorseMatching { n, k, pairs }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn pairs(&self) -> &[(Face, Face)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn matched_faces(&self) -> HashSet<Face> {
        let mut out = HashSet::with_capacity(2 * self.pairs.len());
        for (l, u) in &self.pairs {
            out.insert(*l);
            out.insert(*u);
        }
        out
    }
}

/// Searches for a directed cycle among the matched pairs. Edges run from a
/// lower face x to every other lower face obtained by dropping one element of
/// the partner u(x); only matched lower faces can continue a path, so the
/// pair list alone determines the cycles.
fn find_cycle(pairs: &[(Face, Face)]) -> Option<Vec<Face>> {
    let lower_index: HashMap<Face, usize> = pairs
        .iter()
        .enumerate()
        .map(|(i, (l, _))| (*l, i))
        .collect();
    // 0 = unseen, 1 = on the current path, 2 = finished
    let mut color = vec![0u8; pairs.len()];
    let mut path: Vec<usize> = Vec::new();
    for start in 0..pairs.len() {
        if color[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, Vec<u32>)> = vec![(start, pairs[start].1.to_vec())];
        color[start] = 1;
        path.push(start);
        while let Some((node, candidates)) = stack.last_mut() {
            if let Some(e) = candidates.pop() {
                let y = pairs[*node].1.without(e);
                if y == pairs[*node].0 {
                    continue;
                }
                if let Some(&next) = lower_index.get(&y) {
                    match color[next] {
                        0 => {
                            color[next] = 1;
                            path.push(next);
                            let cands = pairs[next].1.to_vec();
                            stack.push((next, cands));
                        }
                        1 => {
                            let pos = path.iter().position(|&i| i == next).expect("on path");
                            let mut cycle = Vec::new();
                            for &i in &path[pos..] {
                                cycle.push(pairs[i].0);
                                cycle.push(pairs[i].1);
                            }
                            return Some(cycle);
                        }
                        _ => {}
                    }
                }
            } else {
                color[*node] = 2;
                path.pop();
                stack.pop();
            }
        }
    }
    None
}

/// Full validity check against an arbitrary membership test: disjoint cover
/// pairs of non-empty member faces, and no directed cycle.
pub fn verify_pairs<F>(mut is_member: F, pairs: &[(Face, Face)]) -> Result<(), MatchingViolation>
where
    F: FnMut(&Face) -> bool,
{
    let mut seen = HashSet::with_capacity(2 * pairs.len());
    for (l, u) in pairs {
        if l.is_empty() {
            return Err(MatchingViolation::EmptyFaceMatched);
        }
        if !is_member(l) {
            return Err(MatchingViolation::FaceNotInComplex(*l));
        }
        if !is_member(u) {
            return Err(MatchingViolation::FaceNotInComplex(*u));
        }
        if !l.is_covered_by(u) {
            return Err(MatchingViolation::NonCoverPair(*l, *u));
        }
        if !seen.insert(*l) {
            return Err(MatchingViolation::DuplicateFace(*l));
        }
        if !seen.insert(*u) {
            return Err(MatchingViolation::DuplicateFace(*u));
        }
    }
    match find_cycle(pairs) {
        Some(cycle) => Err(MatchingViolation::Cycle(cycle)),
        None => Ok(()),
    }
}

/// Validity of a matching on the given complex.
pub fn verify_matching(fs: &FaceSet, m: &MorseMatching) -> Result<(), MatchingViolation> {
    verify_pairs(|f| fs.contains(f), m.pairs())
}

/// Union of per-fiber matchings. Every pair must stay inside its declared
/// fiber; the union is then verified as a whole, which is sound because the
/// fiber map is order-preserving.
pub fn patchwork(
    fs: &FaceSet,
    fiber_matchings: &BTreeMap<FiberKey, MorseMatching>,
) -> Result<MorseMatching, MorseError> {
    let mut pairs = Vec::new();
    for (key, m) in fiber_matchings {
        for (l, u) in m.pairs() {
            let lk = fiber_key(l).map_err(|_| MatchingViolation::EmptyFaceMatched)?;
            let uk = fiber_key(u).map_err(|_| MatchingViolation::EmptyFaceMatched)?;
            if lk != *key || uk != *key {
                return Err(MorseError::PairOutsideFiber {
                    key: *key,
                    lower: *l,
                    upper: *u,
                });
            }
            pairs.push((*l, *u));
        }
    }
    let out = MorseMatching::new(fs.n(), fs.k(), pairs);
    verify_matching(fs, &out)?;
    Ok(out)
}

/// Non-empty faces in no pair, in (dimension, lexicographic) order.
pub fn critical_cells(fs: &FaceSet, m: &MorseMatching) -> Vec<Face> {
    let matched = m.matched_faces();
    fs.iter_faces()
        .filter(|f| !matched.contains(f))
        .copied()
        .collect()
}

/// Critical cell counts per dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseVector {
    counts: BTreeMap<usize, usize>,
}

impl MorseVector {
    pub fn from_critical(critical: &[Face]) -> MorseVector {
        let mut counts = BTreeMap::new();
        for c in critical {
            *counts.entry(c.dimension() as usize).or_insert(0) += 1;
        }
        MorseVector { counts }
    }

    pub fn count(&self, dim: usize) -> usize {
        self.counts.get(&dim).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<usize, usize> {
        &self.counts
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Alternating sum of the counts; equals the unreduced Euler characteristic
    /// for any valid matching.
    pub fn euler(&self) -> i64 {
        self.counts
            .iter()
            .map(|(&d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

/// Outcome of running a matching strategy.
#[derive(Debug, Clone)]
pub struct StrategyReport {
    pub matching: MorseMatching,
    pub critical: Vec<Face>,
    pub morse_vector: MorseVector,
    pub acyclic: bool,
    /// Present only when the critical cells are one 0-cell, optionally plus
    /// cells of one single positive dimension.
    pub homotopy_summary: Option<String>,
}

impl StrategyReport {
    pub(crate) fn assemble(fs: &FaceSet, matching: MorseMatching) -> StrategyReport {
        let acyclic = verify_matching(fs, &matching).is_ok();
        let critical = critical_cells(fs, &matching);
        let morse_vector = MorseVector::from_critical(&critical);
        let homotopy_summary = homotopy_summary(&morse_vector, acyclic);
        StrategyReport {
            matching,
            critical,
            morse_vector,
            acyclic,
            homotopy_summary,
        }
    }
}

fn homotopy_summary(mv: &MorseVector, acyclic: bool) -> Option<String> {
    if !acyclic || mv.count(0) != 1 {
        return None;
    }
    let positive: Vec<(usize, usize)> = mv
        .counts()
        .iter()
        .filter(|&(&d, _)| d > 0)
        .map(|(&d, &c)| (d, c))
        .collect();
    match positive.as_slice() {
        [] => Some("contractible".to_string()),
        [(d, c)] => Some(format!("wedge of {c} spheres of dim {d}")),
        _ => None,
    }
}

/// Weak Morse inequalities plus the Euler identity against oracle Betti numbers:
/// c_i >= b~_i + [i = 0], and the alternating sums agree.
pub fn morse_inequalities_check(mv: &MorseVector, br: &BettiReport) -> bool {
    let top = br.betti.len().max(mv.max_dim().map_or(0, |d| d + 1));
    for i in 0..top {
        let b = br.betti.get(i).copied().unwrap_or(0) + u64::from(i == 0);
        if (mv.count(i) as u64) < b {
            return false;
        }
    }
    mv.euler() == 1 + br.reduced_euler()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingParseError {
    #[error("line {line}: expected `lower<TAB>upper`")]
    BadPairLine { line: usize },
    #[error("line {line}: cannot parse face")]
    BadFace { line: usize },
    #[error("line {line}: unknown directive {directive:?}")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: duplicate `# critical` section")]
    DuplicateCriticalSection { line: usize },
}

/// Serializes pairs one per line as `lower<TAB>upper` with comma-separated
/// vertex lists, followed by the critical cells under a `# critical` footer.
/// Output is byte-stable because pairs and cells are kept sorted.
pub fn write_matching(m: &MorseMatching, critical: &[Face]) -> String {
    let mut out = String::new();
    for (l, u) in m.pairs() {
        out.push_str(&format!("{l}\t{u}\n"));
    }
    if !critical.is_empty() {
        out.push_str("# critical\n");
        for c in critical {
            out.push_str(&format!("{c}\n"));
        }
    }
    out
}

/// Parses the `write_matching` format. Blank lines are ignored.
pub fn parse_matching(
    n: u32,
    k: u32,
    text: &str,
) -> Result<(MorseMatching, Vec<Face>), MatchingParseError> {
    let mut pairs = Vec::new();
    let mut critical = Vec::new();
    let mut in_critical = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "# critical" {
            if in_critical {
                return Err(MatchingParseError::DuplicateCriticalSection { line });
            }
            in_critical = true;
            continue;
        }
        if trimmed.starts_with('#') {
            return Err(MatchingParseError::UnknownDirective {
                line,
                directive: trimmed.to_string(),
            });
        }
        if in_critical {
            let f: Face = trimmed
                .parse()
                .map_err(|_| MatchingParseError::BadFace { line })?;
            critical.push(f);
        } else {
            let (a, b) = trimmed
                .split_once('\t')
                .ok_or(MatchingParseError::BadPairLine { line })?;
            let l: Face = a
                .trim()
                .parse()
                .map_err(|_| MatchingParseError::BadFace { line })?;
            let u: Face = b
                .trim()
                .parse()
                .map_err(|_| MatchingParseError::BadFace { line })?;
            pairs.push((l, u));
        }
    }
    Ok((MorseMatching::new(n, k, pairs), critical))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::enumerate_faces;

    #[test]
    fn empty_matching_verifies() {
        let fs = enumerate_faces(5, 1).unwrap();
        let m = MorseMatching::new(5, 1, vec![]);
        assert_eq!(verify_matching(&fs, &m), Ok(()));
        assert_eq!(critical_cells(&fs, &m).len(), 15);
    }

    #[test]
    fn duplicate_face_is_structural() {
        let fs = enumerate_faces(6, 2).unwrap();
        let m = MorseMatching::new(
            6,
            2,
            vec![
                (Face::of(&[1]), Face::of(&[1, 2])),
                (Face::of(&[2]), Face::of(&[1, 2])),
            ],
        );
        assert_eq!(
            verify_matching(&fs, &m),
            Err(MatchingViolation::DuplicateFace(Face::of(&[1, 2])))
        );
    }

    #[test]
    fn non_cover_pair_is_structural() {
        let fs = enumerate_faces(6, 2).unwrap();
        let m = MorseMatching::new(6, 2, vec![(Face::of(&[1]), Face::of(&[1, 2, 3]))]);
        assert_eq!(
            verify_matching(&fs, &m),
            Err(MatchingViolation::NonCoverPair(
                Face::of(&[1]),
                Face::of(&[1, 2, 3])
            ))
        );
    }

    #[test]
    fn missing_face_is_a_domain_error() {
        let fs = enumerate_faces(7, 2).unwrap();
        // {1,4,7} is a face of vdW(7,2) but {1,4,6,7} is not
        let m = MorseMatching::new(7, 2, vec![(Face::of(&[1, 4, 7]), Face::of(&[1, 4, 6, 7]))]);
        assert_eq!(
            verify_matching(&fs, &m),
            Err(MatchingViolation::FaceNotInComplex(Face::of(&[1, 4, 6, 7])))
        );
    }

    #[test]
    fn triangle_rotation_has_a_cycle() {
        let fs = enumerate_faces(6, 2).unwrap();
        let m = MorseMatching::new(
            6,
            2,
            vec![
                (Face::of(&[1]), Face::of(&[1, 2])),
                (Face::of(&[2]), Face::of(&[2, 3])),
                (Face::of(&[3]), Face::of(&[1, 3])),
            ],
        );
        match verify_matching(&fs, &m) {
            Err(MatchingViolation::Cycle(cycle)) => {
                assert!(cycle.len() >= 4);
                // consecutive entries alternate lower/upper cover pairs
                for pair in cycle.chunks(2) {
                    assert!(pair[0].is_covered_by(&pair[1]));
                }
            }
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn patchwork_of_nothing_is_empty() {
        let fs = enumerate_faces(7, 2).unwrap();
        let m = patchwork(&fs, &BTreeMap::new()).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn patchwork_rejects_escaping_pairs() {
        let fs = enumerate_faces(7, 2).unwrap();
        let mut fibers = BTreeMap::new();
        fibers.insert(
            FiberKey::Bottom,
            MorseMatching::new(7, 2, vec![(Face::of(&[1, 3]), Face::of(&[1, 2, 3]))]),
        );
        assert!(matches!(
            patchwork(&fs, &fibers),
            Err(MorseError::PairOutsideFiber { .. })
        ));
    }

    #[test]
    fn serialization_round_trip() {
        let fs = enumerate_faces(10, 2).unwrap();
        let report = build_minimal_matching(&fs).unwrap();
        let text = write_matching(&report.matching, &report.critical);
        let (m2, crit2) = parse_matching(10, 2, &text).unwrap();
        assert_eq!(m2.pairs(), report.matching.pairs());
        assert_eq!(crit2, report.critical);
        assert_eq!(write_matching(&m2, &crit2), text);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(
            parse_matching(5, 1, "1\t1,2\nbogus line\n"),
            Err(MatchingParseError::BadPairLine { line: 2 })
        );
        assert_eq!(
            parse_matching(5, 1, "1\tx,2\n"),
            Err(MatchingParseError::BadFace { line: 1 })
        );
        assert_eq!(
            parse_matching(5, 1, "# something\n"),
            Err(MatchingParseError::UnknownDirective {
                line: 1,
                directive: "# something".to_string()
            })
        );
    }

    #[test]
    fn counting_identity() {
        let fs = enumerate_faces(10, 2).unwrap();
        let report = build_fiber_matching(&fs);
        assert_eq!(
            fs.total_faces() - 1,
            2 * report.matching.len() + report.critical.len()
        );
        assert_eq!(report.morse_vector.euler(), fs.euler_characteristic());
    }
}
