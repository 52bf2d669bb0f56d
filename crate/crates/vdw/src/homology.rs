//! Reduced integer homology via boundary matrices and Smith normal form.
//!
//! Boundary matrices of simplicial complexes are sparse with entries +-1, so
//! almost all pivots are units: a cheap exact sparse phase strips those, and
//! whatever remains goes through a dense bignum Smith normal form. Ranks give
//! the Betti numbers, invariant factors above 1 give the torsion.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num::bigint::{BigInt, BigUint};
use num::{One, Signed, Zero};

use crate::complex::FaceSet;

/// The matrix of the boundary map from i-faces to (i-1)-faces, with faces
/// indexed by their position in the (dimension, lex) order. For i = 0 the
/// target is the empty face, making dimension-0 homology reduced.
#[derive(Debug, Clone)]
pub struct BoundaryMatrix {
    pub source_dim: i32,
    pub rows: usize,
    pub cols: usize,
    /// (row, col, coeff) triplets in column-major order; coeff is +-1.
    pub entries: Vec<(usize, usize, i8)>,
}

pub fn boundary_matrix(fs: &FaceSet, i: i32) -> BoundaryMatrix {
    assert!(i >= 0 && i <= fs.dim(), "no boundary map at dimension {i}");
    let targets = fs.faces_of_dim(i - 1);
    let index: HashMap<_, _> = targets.iter().enumerate().map(|(p, f)| (*f, p)).collect();
    let sources = fs.faces_of_dim(i);
    let mut entries = Vec::new();
    for (col, f) in sources.iter().enumerate() {
        for (j, v) in f.vertices().enumerate() {
            let sub = f.without(v);
            let row = index[&sub];
            let coeff: i8 = if j % 2 == 0 { 1 } else { -1 };
            entries.push((row, col, coeff));
        }
    }
    BoundaryMatrix {
        source_dim: i,
        rows: targets.len(),
        cols: sources.len(),
        entries,
    }
}

/// Degrees at or above this share the final overflow bucket.
const BUCKET_CAP: usize = 1024;

/// Bucket queues of row/column indices keyed by the degree they had when
/// enqueued. Entries go stale when the line changes again; consumers compare
/// against the live degree and discard mismatches, so each line's most recent
/// push is the only one that can be acted on.
struct DegreeBuckets {
    rows: Vec<VecDeque<u32>>,
    cols: Vec<VecDeque<u32>>,
    row_floor: usize,
    col_floor: usize,
}

impl DegreeBuckets {
    fn new() -> DegreeBuckets {
        DegreeBuckets {
            rows: vec![VecDeque::new(); BUCKET_CAP + 1],
            cols: vec![VecDeque::new(); BUCKET_CAP + 1],
            row_floor: 0,
            col_floor: 0,
        }
    }

    fn push_row(&mut self, r: usize, deg: usize) {
        if deg == 0 {
            return;
        }
        let b = deg.min(BUCKET_CAP);
        self.rows[b].push_back(r as u32);
        self.row_floor = self.row_floor.min(b);
    }

    fn push_col(&mut self, c: usize, deg: usize) {
        if deg == 0 {
            return;
        }
        let b = deg.min(BUCKET_CAP);
        self.cols[b].push_back(c as u32);
        self.col_floor = self.col_floor.min(b);
    }
}

/// A candidate pivot: the line's degree, the entry position, and the degree
/// of the crossing line.
struct Candidate {
    deg: usize,
    r: usize,
    c: usize,
    cross_deg: usize,
}

impl Candidate {
    /// Markowitz fill bound for eliminating this entry.
    fn score(&self) -> usize {
        (self.deg - 1) * (self.cross_deg - 1)
    }
}

/// Exact sparse elimination of unit pivots. Every eliminated pivot is an
/// invariant factor 1; the surviving submatrix has no +-1 entries.
struct SparseElim {
    rows_map: Vec<BTreeMap<usize, i128>>,
    cols_map: Vec<BTreeMap<usize, i128>>,
    buckets: DegreeBuckets,
}

impl SparseElim {
    fn new(bm: &BoundaryMatrix) -> SparseElim {
        let mut rows_map = vec![BTreeMap::new(); bm.rows];
        let mut cols_map = vec![BTreeMap::new(); bm.cols];
        for &(r, c, v) in &bm.entries {
            rows_map[r].insert(c, v as i128);
            cols_map[c].insert(r, v as i128);
        }
        let mut buckets = DegreeBuckets::new();
        for (r, row) in rows_map.iter().enumerate() {
            buckets.push_row(r, row.len());
        }
        for (c, col) in cols_map.iter().enumerate() {
            buckets.push_col(c, col.len());
        }
        SparseElim {
            rows_map,
            cols_map,
            buckets,
        }
    }

    /// Writes an entry and re-enqueues both lines at their new degrees; this
    /// is the only mutation point during row operations, so every degree or
    /// value change leaves a fresh bucket entry behind.
    fn set(&mut self, r: usize, c: usize, v: i128) {
        if v == 0 {
            self.rows_map[r].remove(&c);
            self.cols_map[c].remove(&r);
        } else {
            self.rows_map[r].insert(c, v);
            self.cols_map[c].insert(r, v);
        }
        self.buckets.push_row(r, self.rows_map[r].len());
        self.buckets.push_col(c, self.cols_map[c].len());
    }

    /// Clears column c with row operations against the unit pivot at (r, c),
    /// then drops row r and column c; the implicit column operations that
    /// would clear row r only touch the dropped row.
    fn eliminate_pivot(&mut self, r: usize, c: usize) {
        let p = self.rows_map[r][&c];
        debug_assert!(p == 1 || p == -1);
        let other_rows: Vec<usize> = self.cols_map[c]
            .keys()
            .copied()
            .filter(|&r2| r2 != r)
            .collect();
        let pivot_row: Vec<(usize, i128)> =
            self.rows_map[r].iter().map(|(&cc, &w)| (cc, w)).collect();
        for &r2 in &other_rows {
            let q = self.rows_map[r2][&c] * p; // division by p = +-1
            for &(cc, w) in &pivot_row {
                let delta = q.checked_mul(w).expect("elimination coefficient overflow");
                let old = self.rows_map[r2].get(&cc).copied().unwrap_or(0);
                let new = old
                    .checked_sub(delta)
                    .expect("elimination coefficient overflow");
                self.set(r2, cc, new);
            }
        }
        for (cc, _) in std::mem::take(&mut self.rows_map[r]) {
            self.cols_map[cc].remove(&r);
            self.buckets.push_col(cc, self.cols_map[cc].len());
        }
        // column c now holds only the pivot row, so no other row loses degree
        std::mem::take(&mut self.cols_map[c]);
    }

    /// Pops the lowest-degree row still matching its queued degree that has a
    /// unit entry; reports the unit entry whose column degree is smallest.
    /// Rows without unit entries stay parked until another change re-enqueues
    /// them.
    fn pop_row_candidate(&mut self) -> Option<Candidate> {
        while self.buckets.row_floor <= BUCKET_CAP {
            let b = self.buckets.row_floor;
            let Some(r) = self.buckets.rows[b].pop_front() else {
                self.buckets.row_floor += 1;
                continue;
            };
            let r = r as usize;
            let deg = self.rows_map[r].len();
            let fresh = if b < BUCKET_CAP {
                deg == b
            } else {
                deg >= BUCKET_CAP
            };
            if !fresh {
                continue;
            }
            let mut best: Option<(usize, usize)> = None;
            for (&c, &v) in &self.rows_map[r] {
                if v == 1 || v == -1 {
                    let cd = self.cols_map[c].len();
                    if best.is_none_or(|(bd, _)| cd < bd) {
                        best = Some((cd, c));
                    }
                }
            }
            if let Some((cd, c)) = best {
                return Some(Candidate {
                    deg,
                    r,
                    c,
                    cross_deg: cd,
                });
            }
        }
        None
    }

    /// Column-side mirror of [`Self::pop_row_candidate`].
    fn pop_col_candidate(&mut self) -> Option<Candidate> {
        while self.buckets.col_floor <= BUCKET_CAP {
            let b = self.buckets.col_floor;
            let Some(c) = self.buckets.cols[b].pop_front() else {
                self.buckets.col_floor += 1;
                continue;
            };
            let c = c as usize;
            let deg = self.cols_map[c].len();
            let fresh = if b < BUCKET_CAP {
                deg == b
            } else {
                deg >= BUCKET_CAP
            };
            if !fresh {
                continue;
            }
            let mut best: Option<(usize, usize)> = None;
            for (&r, &v) in &self.cols_map[c] {
                if v == 1 || v == -1 {
                    let rd = self.rows_map[r].len();
                    if best.is_none_or(|(bd, _)| rd < bd) {
                        best = Some((rd, r));
                    }
                }
            }
            if let Some((rd, r)) = best {
                return Some(Candidate {
                    deg,
                    r,
                    c,
                    cross_deg: rd,
                });
            }
        }
        None
    }

    /// Chooses the next unit pivot: the better of the best row-side and
    /// col-side candidates by Markowitz score. Returns None exactly when no
    /// unit entry remains anywhere (every line's latest state has been
    /// examined, and lines change only through re-enqueueing writes).
    fn find_unit_pivot(&mut self) -> Option<(usize, usize)> {
        let rcand = self.pop_row_candidate();
        let ccand = self.pop_col_candidate();
        match (rcand, ccand) {
            (None, None) => None,
            (Some(rc), None) => Some((rc.r, rc.c)),
            (None, Some(cc)) => Some((cc.r, cc.c)),
            (Some(rc), Some(cc)) => {
                if rc.score() <= cc.score() {
                    if (rc.r, rc.c) != (cc.r, cc.c) {
                        self.buckets.push_col(cc.c, cc.deg);
                    }
                    Some((rc.r, rc.c))
                } else {
                    self.buckets.push_row(rc.r, rc.deg);
                    Some((cc.r, cc.c))
                }
            }
        }
    }

    fn unit_eliminate(&mut self) -> usize {
        let mut rank = 0;
        while let Some((r, c)) = self.find_unit_pivot() {
            self.eliminate_pivot(r, c);
            rank += 1;
        }
        rank
    }

    fn residual_dense(&self) -> Vec<Vec<BigInt>> {
        let live_rows: Vec<usize> = (0..self.rows_map.len())
            .filter(|&r| !self.rows_map[r].is_empty())
            .collect();
        let live_cols: Vec<usize> = (0..self.cols_map.len())
            .filter(|&c| !self.cols_map[c].is_empty())
            .collect();
        let col_pos: HashMap<usize, usize> =
            live_cols.iter().enumerate().map(|(p, &c)| (c, p)).collect();
        let mut out = vec![vec![BigInt::zero(); live_cols.len()]; live_rows.len()];
        for (ri, &r) in live_rows.iter().enumerate() {
            for (&c, &v) in &self.rows_map[r] {
                out[ri][col_pos[&c]] = BigInt::from(v);
            }
        }
        out
    }
}

/// Dense Smith normal form; returns the nonzero invariant factors, each
/// dividing the next.
fn snf_dense(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut factors = Vec::new();
    let mut t = 0usize;
    while t < rows && t < cols {
        // smallest nonzero entry of the trailing submatrix becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j].is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => m[i][j].abs() < m[bi][bj].abs(),
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in (t + 1)..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = &m[i][t] / &m[t][t];
                if !q.is_zero() {
                    for j in t..cols {
                        let sub = &q * &m[t][j];
                        m[i][j] -= sub;
                    }
                }
                if !m[i][t].is_zero() {
                    // the remainder is smaller than the pivot; promote it
                    m.swap(t, i);
                    clean = false;
                }
            }
            for j in (t + 1)..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = &m[t][j] / &m[t][t];
                if !q.is_zero() {
                    for i in t..rows {
                        let sub = &q * &m[i][t];
                        m[i][j] -= sub;
                    }
                }
                if !m[t][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole trailing submatrix
            let mut merged = false;
            'search: for i in (t + 1)..rows {
                for j in (t + 1)..cols {
                    if (&m[i][j] % &m[t][t]).is_zero() {
                        continue;
                    }
                    for jj in t..cols {
                        let add = m[i][jj].clone();
                        m[t][jj] += add;
                    }
                    merged = true;
                    break 'search;
                }
            }
            if !merged {
                break;
            }
        }
        if m[t][t].is_negative() {
            let neg = -m[t][t].clone();
            m[t][t] = neg;
        }
        factors.push(m[t][t].clone());
        t += 1;
    }
    factors
}

/// Smith normal form of a dense integer matrix: the nonzero invariant
/// factors in divisibility order.
pub fn smith_normal_form(m: &[Vec<i64>]) -> Vec<BigUint> {
    let big: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    snf_dense(big)
        .into_iter()
        .map(|f| f.to_biguint().expect("factors are normalized positive"))
        .collect()
}

struct MatrixSummary {
    rank: usize,
    factors: Vec<BigUint>,
}

fn elimination_summary(bm: &BoundaryMatrix) -> MatrixSummary {
    let mut sp = SparseElim::new(bm);
    let unit = sp.unit_eliminate();
    let residual = sp.residual_dense();
    let dense = snf_dense(residual);
    let mut factors = vec![BigUint::one(); unit];
    factors.extend(
        dense
            .into_iter()
            .map(|f| f.to_biguint().expect("factors are normalized positive")),
    );
    let rank = factors.len();
    MatrixSummary { rank, factors }
}

/// Reduced Betti numbers and torsion coefficients of vdW(n,k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiReport {
    pub n: u32,
    pub k: u32,
    pub dim: i32,
    /// Reduced Betti numbers b~_0 ..= b~_dim.
    pub betti: Vec<u64>,
    /// Torsion coefficients of the homology in each dimension 0 ..= dim.
    pub torsion: Vec<Vec<BigUint>>,
}

impl BettiReport {
    /// Alternating sum of the reduced Betti numbers; equals the reduced Euler
    /// characteristic.
    pub fn reduced_euler(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn has_torsion(&self) -> bool {
        self.torsion.iter().any(|t| !t.is_empty())
    }

    /// Some((d, c)) when the homology is free and concentrated in a single
    /// dimension d with rank c — the signature of a wedge of c d-spheres.
    /// Trivial homology reports as Some((0, 0)); anything mixed is None.
    pub fn wedge_signature(&self) -> Option<(usize, u64)> {
        if self.has_torsion() {
            return None;
        }
        let nonzero: Vec<(usize, u64)> = self
            .betti
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b > 0)
            .map(|(i, &b)| (i, b))
            .collect();
        match nonzero.as_slice() {
            [] => Some((0, 0)),
            [(d, c)] => Some((*d, *c)),
            _ => None,
        }
    }
}

/// Computes the reduced homology of the complex: b~_i = f_i - rank d_i -
/// rank d_{i+1}, torsion in dimension i from the invariant factors of d_{i+1}.
pub fn reduced_homology(fs: &FaceSet) -> BettiReport {
    let dim = fs.dim();
    assert!(dim >= 0, "vdW(n,k) always has vertices");
    let mut ranks = vec![0usize; dim as usize + 2];
    let mut torsion: Vec<Vec<BigUint>> = vec![Vec::new(); dim as usize + 1];
    for i in 0..=dim {
        let s = elimination_summary(&boundary_matrix(fs, i));
        ranks[i as usize] = s.rank;
        if i >= 1 {
            torsion[i as usize - 1] = s
                .factors
                .into_iter()
                .filter(|f| *f > BigUint::one())
                .collect();
        }
    }
    let mut betti = Vec::with_capacity(dim as usize + 1);
    for i in 0..=dim as usize {
        let f_i = fs.faces_of_dim(i as i32).len() as i64;
        let b = f_i - ranks[i] as i64 - ranks[i + 1] as i64;
        assert!(b >= 0, "negative rank defect at dimension {i}");
        betti.push(b as u64);
    }
    BettiReport {
        n: fs.n(),
        k: fs.k(),
        dim,
        betti,
        torsion,
    }
}
