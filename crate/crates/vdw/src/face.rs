//! Finite vertex sets represented as fixed-width bitsets.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FaceError {
    #[error("vertex {0} exceeds the supported maximum {max}", max = Face::MAX_VERTEX)]
    VertexTooLarge(u64),
    #[error("cannot parse face from {0:?}")]
    Parse(String),
}

/// A face: a finite set of vertices drawn from 0..=127.
///
/// Stored as a u128 bitset, so subset tests and element toggles are O(1).
/// Simplicial complexes use vertices 1..=n; the Gamma families use ground
/// set [0, k], which is why vertex 0 is representable here.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Face {
    bits: u128,
}

impl Face {
    pub const EMPTY: Face = Face { bits: 0 };
    pub const MAX_VERTEX: u32 = 127;

    pub fn from_vertices<I>(vertices: I) -> Result<Face, FaceError>
    where
        I: IntoIterator<Item = u32>,
    {
        let mut bits = 0u128;
        for v in vertices {
            if v > Self::MAX_VERTEX {
                return Err(FaceError::VertexTooLarge(v as u64));
            }
            bits |= 1u128 << v;
        }
        Ok(Face { bits })
    }

    /// Panicking constructor for vertices known to be in range.
    pub fn of(vertices: &[u32]) -> Face {
        Face::from_vertices(vertices.iter().copied()).expect("vertex out of range")
    }

    pub fn singleton(v: u32) -> Face {
        assert!(v <= Self::MAX_VERTEX);
        Face { bits: 1u128 << v }
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn cardinality(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Dimension as a simplex: cardinality - 1, so the empty face has dimension -1.
    pub fn dimension(&self) -> i32 {
        self.cardinality() as i32 - 1
    }

    pub fn contains(&self, v: u32) -> bool {
        v <= Self::MAX_VERTEX && self.bits & (1u128 << v) != 0
    }

    pub fn min_vertex(&self) -> Option<u32> {
        if self.is_empty() {
            None
        } else {
            Some(self.bits.trailing_zeros())
        }
    }

    pub fn max_vertex(&self) -> Option<u32> {
        if self.is_empty() {
            None
        } else {
            Some(127 - self.bits.leading_zeros())
        }
    }

    pub fn with(&self, v: u32) -> Face {
        assert!(v <= Self::MAX_VERTEX);
        Face {
            bits: self.bits | (1u128 << v),
        }
    }

    pub fn without(&self, v: u32) -> Face {
        assert!(v <= Self::MAX_VERTEX);
        Face {
            bits: self.bits & !(1u128 << v),
        }
    }

    /// Symmetric difference with the singleton {v}.
    pub fn toggled(&self, v: u32) -> Face {
        assert!(v <= Self::MAX_VERTEX);
        Face {
            bits: self.bits ^ (1u128 << v),
        }
    }

    pub fn union(&self, other: &Face) -> Face {
        Face {
            bits: self.bits | other.bits,
        }
    }

    pub fn intersection(&self, other: &Face) -> Face {
        Face {
            bits: self.bits & other.bits,
        }
    }

    pub fn is_subset_of(&self, other: &Face) -> bool {
        self.bits & !other.bits == 0
    }

    /// True when `self` is covered by `other` in the Boolean lattice:
    /// a subset smaller by exactly one element.
    pub fn is_covered_by(&self, other: &Face) -> bool {
        self.is_subset_of(other) && self.cardinality() + 1 == other.cardinality()
    }

    pub fn vertices(&self) -> Vertices {
        Vertices { bits: self.bits }
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.vertices().collect()
    }

    /// The image under v -> scale*v + offset.
    pub fn affine(&self, scale: u32, offset: u32) -> Result<Face, FaceError> {
        assert!(scale >= 1);
        Face::from_vertices(self.vertices().map(|v| v * scale + offset))
    }

    /// Inverse of `affine`; every vertex must be offset + a multiple of scale.
    pub fn deflate(&self, scale: u32, offset: u32) -> Face {
        assert!(scale >= 1);
        let mut bits = 0u128;
        for v in self.vertices() {
            assert!(v >= offset && (v - offset) % scale == 0);
            bits |= 1u128 << ((v - offset) / scale);
        }
        Face { bits }
    }
}

/// Iterator over vertices in increasing order.
pub struct Vertices {
    bits: u128,
}

impl Iterator for Vertices {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.bits == 0 {
            None
        } else {
            let v = self.bits.trailing_zeros();
            self.bits &= self.bits - 1;
            Some(v)
        }
    }
}

impl Ord for Face {
    /// Lexicographic order on the increasing vertex sequences, so {1} < {1,2} < {2}.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.vertices().cmp(other.vertices())
    }
}

impl PartialOrd for Face {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Face {
    /// Comma-separated vertex list, e.g. "1,4,7"; the empty face prints as "".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in self.vertices() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for Face {
    type Err = FaceError;

    fn from_str(s: &str) -> Result<Face, FaceError> {
        if s.trim().is_empty() {
            return Err(FaceError::Parse(s.to_string()));
        }
        let mut vertices = Vec::new();
        for part in s.split(',') {
            let v: u32 = part
                .trim()
                .parse()
                .map_err(|_| FaceError::Parse(s.to_string()))?;
            vertices.push(v);
        }
        Face::from_vertices(vertices)
    }
}

impl Serialize for Face {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.cardinality() as usize))?;
        for v in self.vertices() {
            seq.serialize_element(&v)?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_counts_vertices() {
        assert_eq!(Face::EMPTY.dimension(), -1);
        assert_eq!(Face::singleton(3).dimension(), 0);
        assert_eq!(Face::of(&[1, 4, 7]).dimension(), 2);
    }

    #[test]
    fn order_is_lexicographic() {
        let a = Face::of(&[1]);
        let b = Face::of(&[1, 2]);
        let c = Face::of(&[1, 3]);
        let d = Face::of(&[2]);
        let e = Face::of(&[1, 4]);
        let f = Face::of(&[2, 3]);
        assert!(a < b && b < c && c < d);
        // same cardinality: first differing vertex decides
        assert!(e < f);
        let mut v = vec![d, c, b, a];
        v.sort();
        assert_eq!(v, vec![a, b, c, d]);
    }

    #[test]
    fn min_max_and_toggle() {
        let f = Face::of(&[2, 5, 9]);
        assert_eq!(f.min_vertex(), Some(2));
        assert_eq!(f.max_vertex(), Some(9));
        assert_eq!(f.toggled(5), Face::of(&[2, 9]));
        assert_eq!(f.toggled(4), Face::of(&[2, 4, 5, 9]));
    }

    #[test]
    fn cover_relation() {
        let f = Face::of(&[1, 3]);
        assert!(f.is_covered_by(&Face::of(&[1, 2, 3])));
        assert!(!f.is_covered_by(&Face::of(&[1, 2, 3, 4])));
        assert!(!Face::of(&[1, 4]).is_covered_by(&Face::of(&[1, 2, 3])));
    }

    #[test]
    fn affine_and_deflate_round_trip() {
        let g = Face::of(&[0, 1, 3]);
        let f = g.affine(2, 5).unwrap();
        assert_eq!(f, Face::of(&[5, 7, 11]));
        assert_eq!(f.deflate(2, 5), g);
    }

    #[test]
    fn display_and_parse() {
        let f = Face::of(&[1, 4, 7]);
        assert_eq!(f.to_string(), "1,4,7");
        assert_eq!("1,4,7".parse::<Face>().unwrap(), f);
        assert_eq!("10".parse::<Face>().unwrap(), Face::singleton(10));
        assert!("".parse::<Face>().is_err());
        assert!("1,,2".parse::<Face>().is_err());
    }

    #[test]
    fn vertex_range_is_checked() {
        assert_eq!(
            Face::from_vertices([200u32]),
            Err(FaceError::VertexTooLarge(200))
        );
    }
}
