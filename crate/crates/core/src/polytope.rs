//! Exact rational H-polytopes and the Delzant combinatorics used by the
//! surgery pipeline: vertex enumeration, smoothness checks, hyperplane
//! orthogonality, slabs, slices, and freeness of subtorus actions.
//!
//! A polytope is `{ x : <a_i, x> <= b_i }` with primitive integer normals
//! `a_i` and rational offsets `b_i`. All computations are exact; every list
//! the module returns is sorted so reports are deterministic.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linalg::Mat;

#[derive(Debug, Clone, PartialEq)]
pub enum PolytopeError {
    BadDim(usize),
    ZeroNormal { facet: usize },
    NormalLength { facet: usize, got: usize, want: usize },
    Unbounded,
    Empty,
    /// The hyperplane slice is empty (orthogonality condition (i) fails, or
    /// a slice/freeness precondition).
    SliceEmpty,
    /// The slice is not full-dimensional in its subspace.
    SliceLowerDimensional { rank: usize, want: usize },
    /// A vertex lies on the slab hyperplane, so no positive slab width exists.
    VertexOnHyperplane { vertex: Vec<BigRational> },
    /// Requested slab half-width is not strictly inside the vertex-free bound.
    DeltaOutOfRange { max: BigRational },
    BadAxis { axis: usize, dim: usize },
}

impl fmt::Display for PolytopeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolytopeError::BadDim(d) => write!(f, "unsupported polytope dimension {d}"),
            PolytopeError::ZeroNormal { facet } => write!(f, "facet {facet} has zero normal"),
            PolytopeError::NormalLength { facet, got, want } => {
                write!(f, "facet {facet} normal has length {got}, expected {want}")
            }
            PolytopeError::Unbounded => write!(f, "polytope is unbounded"),
            PolytopeError::Empty => write!(f, "polytope is empty"),
            PolytopeError::SliceEmpty => write!(f, "hyperplane slice is empty"),
            PolytopeError::SliceLowerDimensional { rank, want } => {
                write!(f, "slice is not full-dimensional: affine rank {rank}, expected {want}")
            }
            PolytopeError::VertexOnHyperplane { vertex } => {
                write!(f, "vertex {vertex:?} lies on the slab hyperplane")
            }
            PolytopeError::DeltaOutOfRange { max } => {
                write!(f, "delta out of range: slab must stay strictly below {max}")
            }
            PolytopeError::BadAxis { axis, dim } => {
                write!(f, "axis {axis} out of range for dimension {dim}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PolytopeError {}

/// One inequality `<normal, x> <= offset` with primitive integer normal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Facet {
    pub normal: Vec<BigInt>,
    pub offset: BigRational,
}

impl Facet {
    pub fn new(normal: Vec<i64>, offset: BigRational) -> Self {
        Facet {
            normal: normal.into_iter().map(BigInt::from).collect(),
            offset,
        }
    }

    fn eval(&self, point: &[BigRational]) -> BigRational {
        self.normal
            .iter()
            .zip(point)
            .map(|(a, x)| BigRational::from(a.clone()) * x)
            .sum()
    }

    fn satisfied_by(&self, point: &[BigRational]) -> bool {
        self.eval(point) <= self.offset
    }

    fn active_at(&self, point: &[BigRational]) -> bool {
        self.eval(point) == self.offset
    }

    /// Divide through by the gcd of the normal entries.
    fn primitivize(mut self) -> Self {
        let mut g = BigInt::zero();
        for a in &self.normal {
            g = g.gcd(a);
        }
        if !g.is_zero() && !g.is_one() {
            for a in &mut self.normal {
                *a = &*a / &g;
            }
            self.offset /= BigRational::from(g);
        }
        self
    }
}

impl fmt::Debug for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}, x> <= {}", self.normal, self.offset)
    }
}

/// Rational H-representation of a bounded polytope.
#[derive(Clone, PartialEq)]
pub struct HPolytope {
    dim: usize,
    facets: Vec<Facet>,
}

/// A vertex with its tight facets and, at simple vertices, the primitive
/// integer edge directions pointing into the polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexData {
    pub point: Vec<BigRational>,
    pub active: Vec<usize>,
    pub edges: Option<Vec<Vec<BigInt>>>,
}

/// Per-vertex Delzant verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexVerdict {
    pub vertex: Vec<BigRational>,
    pub simple: bool,
    pub edges_primitive: bool,
    /// `|det| = 1` for the edge matrix; `None` when not simple.
    pub edge_det: Option<BigInt>,
    pub smooth: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelzantReport {
    pub verdicts: Vec<VertexVerdict>,
    pub delzant: bool,
}

/// Witnesses for failures of the hyperplane orthogonality condition.
#[derive(Debug, Clone, PartialEq)]
pub enum OrthWitness {
    /// A vertex lies on `{x_axis = 0}`: its face has zero tangent space.
    VertexOnHyperplane { vertex: Vec<BigRational> },
    /// A facet meeting the slice has a normal with nonzero axis component.
    FacetTilted { facet: usize, witness: Vec<BigRational> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthReport {
    pub ok: bool,
    pub witnesses: Vec<OrthWitness>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreenessWitness {
    pub vertex: Vec<BigRational>,
    pub facets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreenessReport {
    pub free: bool,
    pub offending: Vec<FreenessWitness>,
}

/// A slice outcome: the polytope in the coordinate subspace plus whether it
/// is itself Delzant.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceOutcome {
    pub polytope: HPolytope,
    pub delzant: bool,
}

impl HPolytope {
    /// Builds the polytope, normalizing every normal to a primitive integer
    /// vector, removing duplicate facets, and verifying boundedness.
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self, PolytopeError> {
        if dim == 0 || dim > 6 {
            return Err(PolytopeError::BadDim(dim));
        }
        let mut cleaned: Vec<Facet> = Vec::with_capacity(facets.len());
        for (i, facet) in facets.into_iter().enumerate() {
            if facet.normal.len() != dim {
                return Err(PolytopeError::NormalLength {
                    facet: i,
                    got: facet.normal.len(),
                    want: dim,
                });
            }
            if facet.normal.iter().all(Zero::is_zero) {
                return Err(PolytopeError::ZeroNormal { facet: i });
            }
            let facet = facet.primitivize();
            if !cleaned.contains(&facet) {
                cleaned.push(facet);
            }
        }
        let p = HPolytope { dim, facets: cleaned };
        if !p.is_bounded() {
            return Err(PolytopeError::Unbounded);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn contains(&self, point: &[BigRational]) -> bool {
        self.facets.iter().all(|f| f.satisfied_by(point))
    }

    fn normal_matrix(&self, rows: &[usize]) -> Mat<BigRational> {
        Mat::from_fn(rows.len(), self.dim, |i, j| {
            BigRational::from(self.facets[rows[i]].normal[j].clone())
        })
    }

    /// The recession cone `{d : A d <= 0}` must be trivial. Lines show up as
    /// rank deficiency; extreme rays show up as kernels of rank `k-1`
    /// subsets of normals.
    fn is_bounded(&self) -> bool {
        let all: Vec<usize> = (0..self.facets.len()).collect();
        if self.normal_matrix(&all).rank(0.0) < self.dim {
            return false;
        }
        for subset in combinations(self.facets.len(), self.dim - 1) {
            let sub = self.normal_matrix(&subset);
            let kernel = sub.kernel(0.0);
            if kernel.len() != 1 {
                continue;
            }
            let d = &kernel[0];
            for dir in [1i64, -1] {
                let signed: Vec<BigRational> =
                    d.iter().map(|x| x * BigRational::from(BigInt::from(dir))).collect();
                let escapes = self.facets.iter().all(|f| f.eval(&signed) <= BigRational::zero());
                if escapes {
                    return false;
                }
            }
        }
        true
    }

    /// All vertices by brute force over `dim`-subsets of facets, with active
    /// sets and (at simple vertices) primitive inward edge directions.
    /// Sorted lexicographically by coordinates.
    pub fn vertices(&self) -> Result<Vec<VertexData>, PolytopeError> {
        let k = self.dim;
        let mut points: Vec<Vec<BigRational>> = Vec::new();
        for subset in combinations(self.facets.len(), k) {
            let a = self.normal_matrix(&subset);
            let b: Vec<BigRational> = subset.iter().map(|&i| self.facets[i].offset.clone()).collect();
            let Some(x) = a.solve(&b, 0.0) else { continue };
            if !self.contains(&x) {
                continue;
            }
            if !points.contains(&x) {
                points.push(x);
            }
        }
        if points.is_empty() {
            return Err(PolytopeError::Empty);
        }
        points.sort();
        let mut out = Vec::with_capacity(points.len());
        for point in points {
            let active: Vec<usize> = (0..self.facets.len())
                .filter(|&i| self.facets[i].active_at(&point))
                .collect();
            let edges = if active.len() == k {
                Some(self.edge_directions(&active)?)
            } else {
                None
            };
            out.push(VertexData { point, active, edges });
        }
        Ok(out)
    }

    /// Edge directions at a simple vertex: drop one tight facet at a time,
    /// take the kernel line of the rest, orient into the polytope.
    fn edge_directions(&self, active: &[usize]) -> Result<Vec<Vec<BigInt>>, PolytopeError> {
        let k = self.dim;
        let mut edges = Vec::with_capacity(k);
        for (drop_pos, &dropped) in active.iter().enumerate() {
            let rest: Vec<usize> = active
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != drop_pos)
                .map(|(_, &i)| i)
                .collect();
            let kernel = self.normal_matrix(&rest).kernel(0.0);
            debug_assert_eq!(kernel.len(), 1, "simple vertex edge line");
            let mut dir = primitive_integer(&kernel[0]);
            // Inward: the dropped facet must become slack along the edge.
            let pairing: BigRational = self.facets[dropped]
                .normal
                .iter()
                .zip(&dir)
                .map(|(a, d)| BigRational::from(a.clone() * d.clone()))
                .sum();
            if pairing > BigRational::zero() {
                for d in &mut dir {
                    *d = -d.clone();
                }
            }
            edges.push(dir);
        }
        Ok(edges)
    }

    /// Delzant validation: simplicity, primitivity of edges, and unimodular
    /// edge matrices, reported per vertex.
    pub fn is_delzant(&self) -> Result<DelzantReport, PolytopeError> {
        let verts = self.vertices()?;
        let mut verdicts = Vec::with_capacity(verts.len());
        for v in &verts {
            let simple = v.active.len() == self.dim;
            let (edges_primitive, edge_det, smooth) = match &v.edges {
                Some(edges) => {
                    let primitive = edges.iter().all(|e| {
                        let mut g = BigInt::zero();
                        for x in e {
                            g = g.gcd(x);
                        }
                        g.is_one()
                    });
                    let det_mat = Mat::from_fn(self.dim, self.dim, |i, j| {
                        BigRational::from(edges[j][i].clone())
                    });
                    let det = det_mat.det(0.0);
                    debug_assert!(det.denom().is_one());
                    let det_int = det.numer().clone();
                    let smooth = det_int.abs().is_one();
                    (primitive, Some(det_int), smooth)
                }
                None => (false, None, false),
            };
            verdicts.push(VertexVerdict {
                vertex: v.point.clone(),
                simple,
                edges_primitive,
                edge_det,
                smooth,
            });
        }
        let delzant = verdicts.iter().all(|v| v.simple && v.edges_primitive && v.smooth);
        Ok(DelzantReport { verdicts, delzant })
    }

    /// Intersection with `{x_i = 0 : i in axes}` written in the remaining
    /// coordinates. No canonicalization, no dimension checks; `SliceEmpty`
    /// only for trivially infeasible constant constraints.
    fn slice_raw(&self, axes: &[usize]) -> Result<HPolytope, PolytopeError> {
        for &axis in axes {
            if axis == 0 || axis > self.dim {
                return Err(PolytopeError::BadAxis { axis, dim: self.dim });
            }
        }
        let keep: Vec<usize> = (1..=self.dim).filter(|i| !axes.contains(i)).collect();
        if keep.is_empty() {
            // Slicing away every coordinate leaves at most a point.
            return Err(PolytopeError::SliceLowerDimensional { rank: 0, want: 0 });
        }
        let mut facets = Vec::new();
        for f in &self.facets {
            let normal: Vec<BigInt> = keep.iter().map(|&i| f.normal[i - 1].clone()).collect();
            if normal.iter().all(Zero::is_zero) {
                if f.offset < BigRational::zero() {
                    return Err(PolytopeError::SliceEmpty);
                }
                continue;
            }
            let facet = Facet { normal, offset: f.offset.clone() }.primitivize();
            if !facets.contains(&facet) {
                // Same normal twice: keep the tighter offset.
                if let Some(existing) = facets
                    .iter_mut()
                    .find(|g: &&mut Facet| g.normal == facet.normal)
                {
                    if facet.offset < existing.offset {
                        existing.offset = facet.offset;
                    }
                } else {
                    facets.push(facet);
                }
            }
        }
        HPolytope::new(keep.len(), facets)
    }

    /// Embed a point of the sliced subspace back into ambient coordinates,
    /// zero on the dropped axes.
    fn lift(&self, axes: &[usize], point: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.dim];
        let mut it = point.iter();
        for i in 1..=self.dim {
            if !axes.contains(&i) {
                out[i - 1] = it.next().expect("length mismatch").clone();
            }
        }
        out
    }

    /// Orthogonality of the polytope against `{x_axis = 0}`: the slice must
    /// be nonempty, no vertex may lie on the hyperplane, and every facet
    /// attaining its bound on the slice must have zero axis component.
    pub fn orth_check(&self, axis: usize) -> Result<OrthReport, PolytopeError> {
        if axis == 0 || axis > self.dim {
            return Err(PolytopeError::BadAxis { axis, dim: self.dim });
        }
        let slice = self.slice_raw(&[axis])?;
        let slice_vertices = match slice.vertices() {
            Ok(v) => v,
            Err(PolytopeError::Empty) => return Err(PolytopeError::SliceEmpty),
            Err(e) => return Err(e),
        };
        let lifted: Vec<Vec<BigRational>> = slice_vertices
            .iter()
            .map(|v| self.lift(&[axis], &v.point))
            .collect();

        let mut witnesses = Vec::new();
        for v in self.vertices()? {
            if v.point[axis - 1].is_zero() {
                witnesses.push(OrthWitness::VertexOnHyperplane { vertex: v.point });
            }
        }
        // A facet meets the slice iff its maximum over the slice equals its
        // offset; the maximum of a linear functional is attained at a slice
        // vertex (exact LP by vertex enumeration).
        for (i, f) in self.facets.iter().enumerate() {
            let mut best: Option<(&Vec<BigRational>, BigRational)> = None;
            for w in &lifted {
                let val = f.eval(w);
                if best.as_ref().map(|(_, b)| val > *b).unwrap_or(true) {
                    best = Some((w, val));
                }
            }
            let Some((witness, max)) = best else { continue };
            if max == f.offset && !f.normal[axis - 1].is_zero() {
                witnesses.push(OrthWitness::FacetTilted { facet: i, witness: witness.clone() });
            }
        }
        Ok(OrthReport { ok: witnesses.is_empty(), witnesses })
    }

    /// Half the smallest nonzero `|v_axis|` over vertices: any slab of this
    /// half-width contains no vertices.
    pub fn max_slab_delta(&self, axis: usize) -> Result<BigRational, PolytopeError> {
        if axis == 0 || axis > self.dim {
            return Err(PolytopeError::BadAxis { axis, dim: self.dim });
        }
        let mut min: Option<BigRational> = None;
        for v in self.vertices()? {
            let coord = v.point[axis - 1].abs();
            if coord.is_zero() {
                return Err(PolytopeError::VertexOnHyperplane { vertex: v.point });
            }
            if min.as_ref().map(|m| coord < *m).unwrap_or(true) {
                min = Some(coord);
            }
        }
        let min = min.ok_or(PolytopeError::Empty)?;
        Ok(min / BigRational::from(BigInt::from(2)))
    }

    /// Append the slab facets `x_axis <= delta`, `-x_axis <= delta` and
    /// canonicalize. The slab must contain no vertex of the input.
    pub fn cut_slab(&self, axis: usize, delta: &BigRational) -> Result<HPolytope, PolytopeError> {
        if axis == 0 || axis > self.dim {
            return Err(PolytopeError::BadAxis { axis, dim: self.dim });
        }
        let bound = self.max_slab_delta(axis)? * BigRational::from(BigInt::from(2));
        if delta <= &BigRational::zero() || delta >= &bound {
            return Err(PolytopeError::DeltaOutOfRange { max: bound });
        }
        let mut facets = self.facets.clone();
        let mut plus = vec![BigInt::zero(); self.dim];
        plus[axis - 1] = BigInt::one();
        let mut minus = vec![BigInt::zero(); self.dim];
        minus[axis - 1] = -BigInt::one();
        facets.push(Facet { normal: plus, offset: delta.clone() });
        facets.push(Facet { normal: minus, offset: delta.clone() });
        HPolytope::new(self.dim, facets)?.canonical_form()
    }

    /// Remove facets whose contact set is not a genuine facet (affine
    /// dimension `dim - 1`) and sort. Requires a full-dimensional polytope.
    pub fn canonical_form(&self) -> Result<HPolytope, PolytopeError> {
        let verts = self.vertices()?;
        let mut facets = Vec::new();
        for f in &self.facets {
            let contact: Vec<&Vec<BigRational>> = verts
                .iter()
                .map(|v| &v.point)
                .filter(|p| f.active_at(p))
                .collect();
            if affine_rank(&contact) == self.dim - 1 && !facets.contains(f) {
                facets.push(f.clone());
            }
        }
        facets.sort();
        HPolytope::new(self.dim, facets)
    }

    /// Slice along several coordinate hyperplanes, canonicalize, and flag
    /// Delzantness. Errors when the slice is empty or lower-dimensional.
    pub fn slice(&self, axes: &[usize]) -> Result<SliceOutcome, PolytopeError> {
        let raw = self.slice_raw(axes)?;
        let verts = match raw.vertices() {
            Ok(v) => v,
            Err(PolytopeError::Empty) => return Err(PolytopeError::SliceEmpty),
            Err(e) => return Err(e),
        };
        let points: Vec<&Vec<BigRational>> = verts.iter().map(|v| &v.point).collect();
        let rank = affine_rank(&points);
        if rank != raw.dim {
            return Err(PolytopeError::SliceLowerDimensional { rank, want: raw.dim });
        }
        let polytope = raw.canonical_form()?;
        let delzant = polytope.is_delzant()?.delzant;
        Ok(SliceOutcome { polytope, delzant })
    }

    /// The subtorus with axes `S` acts freely over the slice iff at every
    /// slice vertex the span of the tight facet normals meets
    /// `span{e_i : i in S}` trivially.
    pub fn freeness_check(&self, axes: &[usize]) -> Result<FreenessReport, PolytopeError> {
        if axes.is_empty() {
            return Ok(FreenessReport { free: true, offending: Vec::new() });
        }
        let slice = self.slice_raw(axes)?;
        let slice_vertices = match slice.vertices() {
            Ok(v) => v,
            Err(PolytopeError::Empty) => return Err(PolytopeError::SliceEmpty),
            Err(e) => return Err(e),
        };
        let mut offending = Vec::new();
        for w in &slice_vertices {
            let lifted = self.lift(axes, &w.point);
            let active: Vec<usize> = (0..self.facets.len())
                .filter(|&i| self.facets[i].active_at(&lifted))
                .collect();
            if active.is_empty() {
                continue;
            }
            let normals = self.normal_matrix(&active);
            let normal_rank = normals.rank(0.0);
            // Stack the subtorus directions e_i on top of the normals: the
            // intersection is trivial iff ranks add.
            let mut rows: Vec<Vec<BigRational>> = Vec::new();
            for &i in axes {
                let mut row = vec![BigRational::zero(); self.dim];
                row[i - 1] = BigRational::one();
                rows.push(row);
            }
            for r in 0..active.len() {
                rows.push(normals.row(r).to_vec());
            }
            let stacked_rank = Mat::from_rows(rows).rank(0.0);
            if stacked_rank != axes.len() + normal_rank {
                offending.push(FreenessWitness { vertex: lifted, facets: active });
            }
        }
        Ok(FreenessReport { free: offending.is_empty(), offending })
    }
}

impl fmt::Debug for HPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HPolytope(dim={}, facets={:?})", self.dim, self.facets)
    }
}

/// Affine rank of a point set: the dimension of its affine hull.
fn affine_rank(points: &[&Vec<BigRational>]) -> usize {
    let Some((first, rest)) = points.split_first() else { return 0 };
    if rest.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<BigRational>> = rest
        .iter()
        .map(|p| p.iter().zip(first.iter()).map(|(a, b)| a - b).collect())
        .collect();
    Mat::from_rows(rows).rank(0.0)
}

/// Scale a rational vector to a primitive integer vector.
fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// All `r`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        // Advance the last index that can still move right.
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - r {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
