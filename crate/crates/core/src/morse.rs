//! Combinatorial Morse theory of toric moment maps: a generic direction
//! pairs nonzero against every edge at every vertex, each vertex gets the
//! even index `2 * #{edges pairing negatively}`, and Betti numbers count
//! vertices by index.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::polytope::{HPolytope, PolytopeError, VertexData};

#[derive(Debug, Clone, PartialEq)]
pub enum MorseError {
    /// `<xi, u> = 0` for some edge direction `u` at some vertex.
    NonGenericDirection { vertex: Vec<BigRational>, edge: Vec<BigInt> },
    /// Vertices must all be simple to read off edge directions.
    NotSimple { vertex: Vec<BigRational> },
    Polytope(PolytopeError),
}

impl From<PolytopeError> for MorseError {
    fn from(e: PolytopeError) -> Self {
        MorseError::Polytope(e)
    }
}

impl fmt::Display for MorseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorseError::NonGenericDirection { vertex, edge } => {
                write!(f, "direction is orthogonal to edge {edge:?} at vertex {vertex:?}")
            }
            MorseError::NotSimple { vertex } => {
                write!(f, "vertex {vertex:?} is not simple")
            }
            MorseError::Polytope(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MorseError {}

/// Morse data of a generic linear functional on a Delzant polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct MorseReport {
    pub xi: Vec<i64>,
    /// `(vertex, even Morse index)` sorted by vertex.
    pub per_vertex: Vec<(Vec<BigRational>, u32)>,
    /// `betti[i] = b_{2i}`, the count of vertices of index `2i`.
    pub betti: Vec<usize>,
    /// Coefficients of the Poincare polynomial in all degrees `0..=2k`,
    /// zeros in odd positions.
    pub poincare: Vec<usize>,
    pub odd_betti_zero: bool,
}

fn pairing(xi: &[i64], edge: &[BigInt]) -> BigInt {
    xi.iter()
        .zip(edge)
        .map(|(c, e)| BigInt::from(*c) * e)
        .sum()
}

fn edges_of(v: &VertexData) -> Result<&Vec<Vec<BigInt>>, MorseError> {
    v.edges
        .as_ref()
        .ok_or_else(|| MorseError::NotSimple { vertex: v.point.clone() })
}

fn is_generic(xi: &[i64], vertices: &[VertexData]) -> Result<bool, MorseError> {
    for v in vertices {
        for edge in edges_of(v)? {
            if pairing(xi, edge).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Deterministic search for a direction pairing nonzero with every edge:
/// positive integer vectors enumerated by growing max-norm, lexicographic
/// within each shell.
pub fn generic_xi(p: &HPolytope) -> Result<Vec<i64>, MorseError> {
    let vertices = p.vertices()?;
    let k = p.dim();
    for bound in 1i64..=1024 {
        let mut xi = vec![1i64; k];
        'odometer: loop {
            if xi.iter().any(|&c| c == bound) && is_generic(&xi, &vertices)? {
                return Ok(xi);
            }
            let mut pos = k;
            while pos > 0 {
                pos -= 1;
                if xi[pos] < bound {
                    xi[pos] += 1;
                    for c in xi.iter_mut().skip(pos + 1) {
                        *c = 1;
                    }
                    continue 'odometer;
                }
            }
            break;
        }
    }
    // The edge directions span finitely many hyperplanes, so some positive
    // vector far below the cap clears all of them.
    unreachable!("no generic direction below the search cap")
}

/// Per-vertex Morse indices for a given direction; errors when the
/// direction is orthogonal to some edge.
pub fn morse_indices(p: &HPolytope, xi: &[i64]) -> Result<MorseReport, MorseError> {
    let vertices = p.vertices()?;
    let k = p.dim();
    assert_eq!(xi.len(), k, "direction must match the polytope dimension");
    let mut per_vertex = Vec::with_capacity(vertices.len());
    for v in &vertices {
        let mut negatives = 0u32;
        for edge in edges_of(v)? {
            let pair = pairing(xi, edge);
            if pair.is_zero() {
                return Err(MorseError::NonGenericDirection {
                    vertex: v.point.clone(),
                    edge: edge.clone(),
                });
            }
            if pair < BigInt::zero() {
                negatives += 1;
            }
        }
        per_vertex.push((v.point.clone(), 2 * negatives));
    }

    let mut betti = vec![0usize; k + 1];
    for (_, index) in &per_vertex {
        betti[(*index / 2) as usize] += 1;
    }
    let mut poincare = vec![0usize; 2 * k + 1];
    for (i, &b) in betti.iter().enumerate() {
        poincare[2 * i] = b;
    }
    Ok(MorseReport {
        xi: xi.to_vec(),
        per_vertex,
        betti,
        poincare,
        odd_betti_zero: true,
    })
}

/// Betti numbers from the index multiset of the deterministically chosen
/// generic direction.
pub fn betti(p: &HPolytope) -> Result<MorseReport, MorseError> {
    let xi = generic_xi(p)?;
    morse_indices(p, &xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::Facet;

    fn q(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn square() -> HPolytope {
        HPolytope::new(
            2,
            vec![
                Facet::new(vec![1, 0], q(1)),
                Facet::new(vec![-1, 0], q(0)),
                Facet::new(vec![0, 1], q(1)),
                Facet::new(vec![0, -1], q(0)),
            ],
        )
        .unwrap()
    }

    fn simplex2() -> HPolytope {
        HPolytope::new(
            2,
            vec![
                Facet::new(vec![-1, 0], q(0)),
                Facet::new(vec![0, -1], q(0)),
                Facet::new(vec![1, 1], q(1)),
            ],
        )
        .unwrap()
    }

    fn segment() -> HPolytope {
        HPolytope::new(
            1,
            vec![Facet::new(vec![1], q(1)), Facet::new(vec![-1], q(0))],
        )
        .unwrap()
    }

    fn hirzebruch() -> HPolytope {
        HPolytope::new(
            2,
            vec![
                Facet::new(vec![-1, 0], q(0)),
                Facet::new(vec![0, -1], q(0)),
                Facet::new(vec![0, 1], q(1)),
                Facet::new(vec![1, 1], q(2)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn generic_direction_search() {
        assert_eq!(generic_xi(&segment()).unwrap(), vec![1]);
        assert_eq!(generic_xi(&square()).unwrap(), vec![1, 1]);
        // (1,1) pairs to zero against the hypotenuse edge (-1,1).
        assert_eq!(generic_xi(&simplex2()).unwrap(), vec![1, 2]);
    }

    #[test]
    fn non_generic_direction_rejected() {
        let err = morse_indices(&simplex2(), &[1, 1]).unwrap_err();
        assert!(matches!(err, MorseError::NonGenericDirection { .. }));
    }

    #[test]
    fn square_indices() {
        let report = morse_indices(&square(), &[1, 2]).unwrap();
        let mut indices: Vec<u32> = report.per_vertex.iter().map(|(_, i)| *i).collect();
        indices.sort();
        assert_eq!(indices, vec![0, 2, 2, 4]);
        assert_eq!(report.betti, vec![1, 2, 1]);
        assert_eq!(report.poincare, vec![1, 0, 2, 0, 1]);
    }

    #[test]
    fn simplex_indices() {
        let report = morse_indices(&simplex2(), &[1, 2]).unwrap();
        let mut indices: Vec<u32> = report.per_vertex.iter().map(|(_, i)| *i).collect();
        indices.sort();
        assert_eq!(indices, vec![0, 2, 4]);
        assert_eq!(report.betti, vec![1, 1, 1]);
    }

    #[test]
    fn segment_indices() {
        let report = morse_indices(&segment(), &[1]).unwrap();
        let mut indices: Vec<u32> = report.per_vertex.iter().map(|(_, i)| *i).collect();
        indices.sort();
        assert_eq!(indices, vec![0, 2]);
        assert_eq!(report.betti, vec![1, 1]);
    }

    #[test]
    fn hirzebruch_betti() {
        assert_eq!(betti(&hirzebruch()).unwrap().betti, vec![1, 2, 1]);
    }

    #[test]
    fn betti_properties() {
        for p in [square(), simplex2(), segment(), hirzebruch()] {
            let report = betti(&p).unwrap();
            let total: usize = report.betti.iter().sum();
            assert_eq!(total, p.vertices().unwrap().len());
            assert_eq!(report.betti[0], 1);
            // Palindromic.
            let mut rev = report.betti.clone();
            rev.reverse();
            assert_eq!(report.betti, rev);
        }
    }

    #[test]
    fn min_and_max_vertices_have_extreme_indices() {
        for p in [square(), simplex2(), hirzebruch()] {
            let xi = generic_xi(&p).unwrap();
            let report = morse_indices(&p, &xi).unwrap();
            let value = |point: &[BigRational]| -> BigRational {
                point
                    .iter()
                    .zip(&xi)
                    .map(|(x, &c)| x * BigRational::from(BigInt::from(c)))
                    .sum()
            };
            let min = report
                .per_vertex
                .iter()
                .min_by_key(|(pt, _)| value(pt))
                .unwrap();
            let max = report
                .per_vertex
                .iter()
                .max_by_key(|(pt, _)| value(pt))
                .unwrap();
            assert_eq!(min.1, 0);
            assert_eq!(max.1, 2 * p.dim() as u32);
        }
    }

    #[test]
    fn betti_independent_of_direction() {
        let p = hirzebruch();
        let base = betti(&p).unwrap().betti;
        let candidates = [
            [1i64, 3],
            [2, 1],
            [3, 1],
            [1, 4],
            [5, 2],
            [2, 5],
            [4, 1],
            [7, 3],
            [3, 7],
            [5, 3],
        ];
        let mut tried = 0;
        for xi in candidates {
            match morse_indices(&p, &xi) {
                Ok(report) => {
                    assert_eq!(report.betti, base);
                    tried += 1;
                }
                Err(MorseError::NonGenericDirection { .. }) => {}
                Err(e) => panic!("unexpected error {e:?}"),
            }
        }
        assert!(tried >= 8);
    }
}
