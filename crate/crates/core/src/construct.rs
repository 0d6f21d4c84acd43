//! The surgery-certificate pipeline: validate a Delzant polytope against
//! the orthogonality condition, cut out the vertex-free slab, slice off
//! the moment polytope of the invariant submanifold, and assemble the
//! invariants of the surgered manifold, with audits for the torus rank
//! bound and for commutation of surgery with reduction.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::chart::checks::{verify_twist_form, CheckReport};
use crate::chart::models::model;
use crate::chart::{ChartError, SamplePlan};
use crate::polytope::{
    DelzantReport, FreenessWitness, HPolytope, OrthWitness, PolytopeError,
};

use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum CertifyError {
    NotDelzant(DelzantReport),
    OrthogonalityFailed(Vec<OrthWitness>),
    /// The hyperplane `{x_axis = 0}` misses the polytope.
    SliceEmpty,
    /// The sliced moment polytope failed its own Delzant validation.
    SliceNotDelzant(DelzantReport),
    FreenessFailed(Vec<FreenessWitness>),
    /// Reduction rank exceeds `n - 2`.
    BadReductionRank { requested: usize, max: usize },
    /// The fully reduced seed must be a segment.
    SegmentExpected { dim: usize, facets: usize },
    Polytope(PolytopeError),
    Chart(ChartError),
}

impl From<PolytopeError> for CertifyError {
    fn from(e: PolytopeError) -> Self {
        match e {
            PolytopeError::SliceEmpty => CertifyError::SliceEmpty,
            other => CertifyError::Polytope(other),
        }
    }
}

impl From<ChartError> for CertifyError {
    fn from(e: ChartError) -> Self {
        CertifyError::Chart(e)
    }
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::NotDelzant(r) => {
                let bad = r.verdicts.iter().filter(|v| !(v.simple && v.smooth)).count();
                write!(f, "input polytope is not Delzant ({bad} offending vertices)")
            }
            CertifyError::OrthogonalityFailed(w) => {
                write!(f, "orthogonality against the last axis failed ({} witnesses)", w.len())
            }
            CertifyError::SliceEmpty => write!(f, "the hyperplane slice is empty"),
            CertifyError::SliceNotDelzant(_) => write!(f, "sliced moment polytope is not Delzant"),
            CertifyError::FreenessFailed(w) => {
                write!(f, "subtorus does not act freely over the slice ({} witnesses)", w.len())
            }
            CertifyError::BadReductionRank { requested, max } => {
                write!(f, "reduction rank {requested} exceeds the maximum {max}")
            }
            CertifyError::SegmentExpected { dim, facets } => {
                write!(f, "expected a segment, got dimension {dim} with {facets} facets")
            }
            CertifyError::Polytope(e) => write!(f, "{e}"),
            CertifyError::Chart(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CertifyError {}

/// The type-change locus `A x {0} x T^2`: a `T^2`-fiber bundle over the
/// invariant submanifold, of codimension 2.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "camelCase"))]
pub struct TypeJumpLocus {
    /// Manifold dimension of the base `A`.
    pub base_dim: usize,
    pub fiber: String,
    /// Manifold dimension of the locus, `dim A + 2`.
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "camelCase"))]
pub struct CertificateAudits {
    pub delzant: bool,
    pub orthogonality: bool,
    pub rank_bound: bool,
    pub saturation: bool,
}

/// Output record of the construction pipeline on a seed polytope in
/// `R^{n-1}`: the surgered manifold has dimension `2n`, a residual torus
/// of rank `n - 2`, and type jumping along a codimension-2 locus.
#[derive(Debug, Clone, PartialEq)]
pub struct SurgeryCertificate {
    pub n: usize,
    pub input_polytope: HPolytope,
    /// Moment polytope of `A` (`None` when `A` is a point, `n = 2`).
    pub a_polytope: Option<HPolytope>,
    pub delta: BigRational,
    pub dim_m_tilde: usize,
    pub type_jump_locus: TypeJumpLocus,
    pub residual_torus_rank: usize,
    pub twist_class: String,
    pub audits: CertificateAudits,
}

/// Run the construction pipeline on a seed polytope. The surgery axis is
/// always the last coordinate.
pub fn certify(input: &HPolytope) -> Result<SurgeryCertificate, CertifyError> {
    let k = input.dim();
    let n = k + 1;
    let axis = k;

    let delzant = input.is_delzant()?;
    if !delzant.delzant {
        return Err(CertifyError::NotDelzant(delzant));
    }

    let a_polytope: Option<HPolytope>;
    if k == 1 {
        // Segment seed: the construction needs the hyperplane {x = 0} in
        // the interior, and the invariant submanifold is a point.
        let orth = segment_orth_check(input)?;
        if !orth.is_empty() {
            return Err(CertifyError::OrthogonalityFailed(orth));
        }
        a_polytope = None;
    } else {
        let orth = input.orth_check(axis)?;
        if !orth.ok {
            return Err(CertifyError::OrthogonalityFailed(orth.witnesses));
        }
        let slice = input.slice(&[axis])?;
        if !slice.delzant {
            return Err(CertifyError::SliceNotDelzant(slice.polytope.is_delzant()?));
        }
        a_polytope = Some(slice.polytope);
    }
    let delta = input.max_slab_delta(axis)?;

    let rank = n - 2;
    Ok(SurgeryCertificate {
        n,
        input_polytope: input.clone(),
        a_polytope,
        delta,
        dim_m_tilde: 2 * n,
        type_jump_locus: TypeJumpLocus {
            base_dim: 2 * (n - 2),
            fiber: String::from("T^2"),
            dim: 2 * n - 2,
        },
        residual_torus_rank: rank,
        twist_class: String::from("PD[A x {0} x S^1(theta2)]"),
        audits: CertificateAudits {
            delzant: true,
            orthogonality: true,
            rank_bound: rank <= n - 2,
            saturation: rank == n - 2,
        },
    })
}

/// Orthogonality for a segment: `{x = 0}` must meet the interior, away
/// from both vertices.
fn segment_orth_check(input: &HPolytope) -> Result<Vec<OrthWitness>, CertifyError> {
    let zero = alloc::vec![BigRational::from_integer(0.into())];
    if !input.contains(&zero) {
        return Err(CertifyError::SliceEmpty);
    }
    let mut witnesses = Vec::new();
    for v in input.vertices()? {
        if v.point[0] == zero[0] {
            witnesses.push(OrthWitness::VertexOnHyperplane { vertex: v.point });
        }
    }
    Ok(witnesses)
}

/// Audit of the torus rank bound `rank <= n - 2`, with the codimension of
/// the type-jump locus recorded as informational context (the locus is not
/// claimed to be fixed-point data).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "camelCase"))]
pub struct RankBoundReport {
    pub rank: usize,
    pub bound: usize,
    pub holds: bool,
    pub saturated: bool,
    pub locus_codimension: usize,
    pub note: String,
}

pub fn rank_bound_audit(cert: &SurgeryCertificate) -> RankBoundReport {
    let bound = cert.n - 2;
    let codim = cert.dim_m_tilde - cert.type_jump_locus.dim;
    RankBoundReport {
        rank: cert.residual_torus_rank,
        bound,
        holds: cert.residual_torus_rank <= bound,
        saturated: cert.residual_torus_rank == bound,
        locus_codimension: codim,
        note: format!(
            "informational: (dim - locus dim)/2 = {}; the locus is the type-jump set, not fixed-point data",
            codim / 2
        ),
    }
}

/// Certify the symplectic quotient by the subtorus spanned by the first
/// `r` coordinate directions: freeness over the zero slice, then the
/// pipeline on the sliced polytope.
pub fn reduce_certificate(
    input: &HPolytope,
    r: usize,
) -> Result<SurgeryCertificate, CertifyError> {
    let k = input.dim();
    let n = k + 1;
    if r > n - 2 {
        return Err(CertifyError::BadReductionRank { requested: r, max: n - 2 });
    }
    let axes: Vec<usize> = (1..=r).collect();
    let freeness = input.freeness_check(&axes)?;
    if !freeness.free {
        return Err(CertifyError::FreenessFailed(freeness.offending));
    }
    if r == 0 {
        return certify(input);
    }
    let sliced = input.slice(&axes)?;
    certify(&sliced.polytope)
}

/// Result of checking that surgery commutes with reduction at the level
/// of moment polytopes.
#[derive(Debug, Clone, PartialEq)]
pub struct CommuteReport {
    pub r: usize,
    /// `A` of the reduced certificate (left) against the reduction of the
    /// original `A` (right).
    pub reduced_a: Option<HPolytope>,
    pub a_reduced: Option<HPolytope>,
    pub equal: bool,
    pub delta_full: BigRational,
    pub delta_reduced: BigRational,
    pub common_delta: BigRational,
    pub pass: bool,
}

/// Compare `A(certify(slice(input, 1..r)))` with `slice(A(certify(input)), 1..r)`
/// exactly; the common slab half-width is the minimum of the two.
pub fn commute_check(input: &HPolytope, r: usize) -> Result<CommuteReport, CertifyError> {
    let cert = certify(input)?;
    let reduced = reduce_certificate(input, r)?;

    let axes: Vec<usize> = (1..=r).collect();
    let a_reduced: Option<HPolytope> = match (&cert.a_polytope, r) {
        (a, 0) => a.clone(),
        (None, _) => None,
        (Some(a), _) => {
            if r == a.dim() {
                // Slicing away every coordinate of A leaves the point; it
                // must actually contain the origin.
                let zero = alloc::vec![BigRational::from_integer(0.into()); a.dim()];
                if !a.contains(&zero) {
                    return Err(CertifyError::SliceEmpty);
                }
                None
            } else {
                Some(a.slice(&axes)?.polytope)
            }
        }
    };

    let equal = reduced.a_polytope == a_reduced;
    let delzant_ok = match (&reduced.a_polytope, &a_reduced) {
        (Some(l), Some(rhs)) => l.is_delzant()?.delzant && rhs.is_delzant()?.delzant,
        _ => true,
    };
    let common_delta = if cert.delta <= reduced.delta {
        cert.delta.clone()
    } else {
        reduced.delta.clone()
    };
    Ok(CommuteReport {
        r,
        reduced_a: reduced.a_polytope.clone(),
        a_reduced,
        equal,
        delta_full: cert.delta,
        delta_reduced: reduced.delta,
        common_delta,
        pass: equal && delzant_ok,
    })
}

/// Full reduction to the base case: the seed reduces to a segment (the
/// projective line), and the 4-dimensional surgery model carries the
/// nonvanishing transverse twist integral.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseCaseReport {
    pub segment: HPolytope,
    pub segment_delzant: bool,
    pub twist: CheckReport,
    pub pass: bool,
}

pub fn base_case_check(input: &HPolytope, plan: &SamplePlan) -> Result<BaseCaseReport, CertifyError> {
    let cert = certify(input)?;
    let k = input.dim();
    let r = cert.n - 2;

    let segment = if r == 0 {
        input.canonical_form()?
    } else {
        let axes: Vec<usize> = (1..=r).collect();
        let freeness = input.freeness_check(&axes)?;
        if !freeness.free {
            return Err(CertifyError::FreenessFailed(freeness.offending));
        }
        input.slice(&axes)?.polytope
    };
    let _ = k;
    if segment.dim() != 1 || segment.facets().len() != 2 {
        return Err(CertifyError::SegmentExpected {
            dim: segment.dim(),
            facets: segment.facets().len(),
        });
    }
    let segment_delzant = segment.is_delzant()?.delzant;

    let chart = model("product-surgery-0")?;
    let twist = verify_twist_form(&chart, plan)?;
    let integral_nonzero = twist.integral.map(|v| v.abs() > twist.tolerance).unwrap_or(false);

    let pass = segment_delzant && twist.pass && integral_nonzero;
    Ok(BaseCaseReport { segment, segment_delzant, twist, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::Facet;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn qr(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn boxp(bounds: &[(i64, i64)]) -> HPolytope {
        let k = bounds.len();
        let mut facets = Vec::new();
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            let mut plus = alloc::vec![0i64; k];
            plus[i] = 1;
            let mut minus = alloc::vec![0i64; k];
            minus[i] = -1;
            facets.push(Facet::new(plus, q(hi)));
            facets.push(Facet::new(minus, q(-lo)));
        }
        HPolytope::new(k, facets).unwrap()
    }

    fn prism() -> HPolytope {
        HPolytope::new(
            3,
            alloc::vec![
                Facet::new(alloc::vec![-1, 0, 0], q(0)),
                Facet::new(alloc::vec![0, -1, 0], q(0)),
                Facet::new(alloc::vec![1, 1, 0], q(1)),
                Facet::new(alloc::vec![0, 0, 1], q(1)),
                Facet::new(alloc::vec![0, 0, -1], q(1)),
            ],
        )
        .unwrap()
    }

    /// Prism over the shifted triangle, so the first coordinate hyperplane
    /// cuts through the interior.
    fn shifted_prism() -> HPolytope {
        HPolytope::new(
            3,
            alloc::vec![
                Facet::new(alloc::vec![-1, 0, 0], qr(1, 4)),
                Facet::new(alloc::vec![0, -1, 0], qr(1, 4)),
                Facet::new(alloc::vec![1, 1, 0], qr(1, 2)),
                Facet::new(alloc::vec![0, 0, 1], q(1)),
                Facet::new(alloc::vec![0, 0, -1], q(1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn certify_rectangle() {
        let cert = certify(&boxp(&[(0, 1), (-1, 1)])).unwrap();
        assert_eq!(cert.n, 3);
        assert_eq!(cert.dim_m_tilde, 6);
        assert_eq!(cert.residual_torus_rank, 1);
        assert_eq!(cert.delta, qr(1, 2));
        let a = cert.a_polytope.as_ref().unwrap();
        assert_eq!(a.dim(), 1);
        let verts: Vec<_> = a.vertices().unwrap().into_iter().map(|v| v.point).collect();
        assert_eq!(verts, alloc::vec![alloc::vec![q(0)], alloc::vec![q(1)]]);
        assert_eq!(cert.type_jump_locus.dim, 4);
        assert_eq!(cert.type_jump_locus.base_dim, 2);
        assert!(cert.audits.saturation);
    }

    #[test]
    fn certify_prism() {
        let cert = certify(&prism()).unwrap();
        assert_eq!(cert.n, 4);
        assert_eq!(cert.dim_m_tilde, 8);
        assert_eq!(cert.residual_torus_rank, 2);
        let a = cert.a_polytope.as_ref().unwrap();
        assert_eq!(a.dim(), 2);
        assert_eq!(a.vertices().unwrap().len(), 3);
        assert_eq!(cert.dim_m_tilde - cert.type_jump_locus.dim, 2);
    }

    #[test]
    fn certify_rejects_vertices_on_hyperplane() {
        // Scaled simplex: two vertices sit on {x2 = 0}.
        let simplex = HPolytope::new(
            2,
            alloc::vec![
                Facet::new(alloc::vec![-1, 0], q(0)),
                Facet::new(alloc::vec![0, -1], q(0)),
                Facet::new(alloc::vec![1, 1], q(2)),
            ],
        )
        .unwrap();
        assert!(matches!(
            certify(&simplex).unwrap_err(),
            CertifyError::OrthogonalityFailed(_)
        ));
    }

    #[test]
    fn certify_rejects_non_delzant() {
        let weighted = HPolytope::new(
            2,
            alloc::vec![
                Facet::new(alloc::vec![-1, 0], q(0)),
                Facet::new(alloc::vec![0, -1], q(0)),
                Facet::new(alloc::vec![2, 1], q(2)),
            ],
        )
        .unwrap();
        assert!(matches!(certify(&weighted).unwrap_err(), CertifyError::NotDelzant(_)));
    }

    #[test]
    fn rank_audit_saturation_and_violation() {
        let cert = certify(&boxp(&[(0, 1), (-1, 1)])).unwrap();
        let audit = rank_bound_audit(&cert);
        assert!(audit.holds && audit.saturated);
        assert_eq!(audit.rank, 1);
        assert_eq!(audit.locus_codimension, 2);

        let mut forged = cert;
        forged.residual_torus_rank = forged.n - 1;
        let audit = rank_bound_audit(&forged);
        assert!(!audit.holds);
    }

    #[test]
    fn reduce_and_commute_square() {
        let square = boxp(&[(-1, 1), (-1, 1)]);
        let reduced = reduce_certificate(&square, 1).unwrap();
        assert_eq!(reduced.n, 2);
        assert!(reduced.a_polytope.is_none());

        let report = commute_check(&square, 1).unwrap();
        assert!(report.pass);
        assert!(report.reduced_a.is_none() && report.a_reduced.is_none());
        assert_eq!(report.common_delta, qr(1, 2));
    }

    #[test]
    fn commute_shifted_prism() {
        let p = shifted_prism();
        let report = commute_check(&p, 1).unwrap();
        assert!(report.pass);
        let lhs = report.reduced_a.unwrap();
        let verts: Vec<_> = lhs.vertices().unwrap().into_iter().map(|v| v.point).collect();
        assert_eq!(verts, alloc::vec![alloc::vec![qr(-1, 4)], alloc::vec![qr(1, 2)]]);
    }

    #[test]
    fn commute_zero_reduction_is_identity() {
        let report = commute_check(&prism(), 0).unwrap();
        assert!(report.pass);
        assert_eq!(report.reduced_a, report.a_reduced);
    }

    #[test]
    fn reduce_requires_freeness() {
        // [0,1] x [-1,1]: the zero slice touches the facet x1 >= 0.
        let p = boxp(&[(0, 1), (-1, 1)]);
        assert!(matches!(
            reduce_certificate(&p, 1).unwrap_err(),
            CertifyError::FreenessFailed(_)
        ));
    }

    #[test]
    fn reduction_rank_capped() {
        let p = boxp(&[(-1, 1), (-1, 1)]);
        assert!(matches!(
            reduce_certificate(&p, 2).unwrap_err(),
            CertifyError::BadReductionRank { requested: 2, max: 1 }
        ));
    }

    #[test]
    fn base_case_square() {
        let plan = SamplePlan::random(7, 20).with_h(1e-5);
        let report = base_case_check(&boxp(&[(-1, 1), (-1, 1)]), &plan).unwrap();
        assert!(report.pass);
        assert!(report.segment_delzant);
        let integral = report.twist.integral.unwrap();
        assert!((integral + 1.0).abs() < 1e-6);
    }

    #[test]
    fn base_case_propagates_errors() {
        let simplex = HPolytope::new(
            2,
            alloc::vec![
                Facet::new(alloc::vec![-1, 0], q(0)),
                Facet::new(alloc::vec![0, -1], q(0)),
                Facet::new(alloc::vec![1, 1], q(2)),
            ],
        )
        .unwrap();
        let plan = SamplePlan::random(7, 5);
        assert!(matches!(
            base_case_check(&simplex, &plan).unwrap_err(),
            CertifyError::OrthogonalityFailed(_)
        ));
    }
}
