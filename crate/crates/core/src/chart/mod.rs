//! Numeric coordinate charts: evaluable scalar/form/vector fields over
//! `f64` coordinates, finite-difference exterior calculus, the twisted
//! Courant bracket, bump profiles, and sample plans.
//!
//! The named models (type-jumping spinor, B-symplectic annulus, gluing
//! source/target, surgery products) live in [`models`]; the verification
//! suites over them live in [`checks`].

pub mod checks;
pub mod models;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;
use rand_core::{RngCore, SeedableRng};

use crate::form::{AlgebraError, GVector, MultiForm};
use crate::gclin::{GCLinear, GclinError};
use crate::linalg::Mat;
use crate::scalar::Cf64;

pub use checks::{
    involutivity_check, verify_gluing, verify_moment, verify_spinor_match, verify_twist_form,
    CheckReport, JacobianMode,
};
pub use models::model;

/// Default central-difference step.
pub const DEFAULT_H: f64 = 1e-4;
/// Default residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default relative rank threshold for float annihilator computations.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum ChartError {
    UnknownModel(String),
    UnknownField(String),
    UnknownExclusion(String),
    OutsideDomain { point: Vec<f64> },
    /// The point sits inside a registered excluded zone.
    ExcludedZone { point: Vec<f64> },
    /// Finite differencing needs an interior margin of at least `h`.
    TooCloseToBoundary { point: Vec<f64> },
    DegenerateSpinor { point: Vec<f64> },
    MissingActionData,
    BadPlan(String),
    /// Bump profile requires `0 < r0 < r1`.
    BadBump { r0: f64, r1: f64 },
    /// Rejection sampling could not place enough points.
    SamplingExhausted { placed: usize, requested: usize },
    Gclin(GclinError),
    Algebra(AlgebraError),
}

impl From<GclinError> for ChartError {
    fn from(e: GclinError) -> Self {
        ChartError::Gclin(e)
    }
}

impl From<AlgebraError> for ChartError {
    fn from(e: AlgebraError) -> Self {
        ChartError::Algebra(e)
    }
}

impl fmt::Display for ChartError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartError::UnknownModel(n) => write!(f, "unknown model '{n}'"),
            ChartError::UnknownField(n) => write!(f, "unknown field '{n}'"),
            ChartError::UnknownExclusion(n) => write!(f, "unknown exclusion zone '{n}'"),
            ChartError::OutsideDomain { point } => write!(f, "point {point:?} outside chart domain"),
            ChartError::ExcludedZone { point } => write!(f, "point {point:?} in excluded zone"),
            ChartError::TooCloseToBoundary { point } => {
                write!(f, "point {point:?} too close to the domain boundary for the step size")
            }
            ChartError::DegenerateSpinor { point } => {
                write!(f, "spinor degenerates at sample point {point:?}")
            }
            ChartError::MissingActionData => write!(f, "chart carries no action data"),
            ChartError::BadPlan(msg) => write!(f, "invalid sample plan: {msg}"),
            ChartError::BadBump { r0, r1 } => {
                write!(f, "bump profile needs 0 < r0 < r1, got ({r0}, {r1})")
            }
            ChartError::SamplingExhausted { placed, requested } => {
                write!(f, "sampling exhausted: placed {placed} of {requested} points")
            }
            ChartError::Gclin(e) => write!(f, "{e}"),
            ChartError::Algebra(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ChartError {}

pub type ScalarFn = Box<dyn Fn(&[f64]) -> Cf64 + Send + Sync>;
pub type FormFn = Box<dyn Fn(&[f64]) -> MultiForm<Cf64> + Send + Sync>;
pub type VectorFn = Box<dyn Fn(&[f64]) -> Vec<Cf64> + Send + Sync>;
pub type SectionFn = Box<dyn Fn(&[f64]) -> Result<GVector<Cf64>, ChartError> + Send + Sync>;
pub type StructureFn = Box<dyn Fn(&[f64]) -> Result<GCLinear<Cf64>, ChartError> + Send + Sync>;
pub type PredicateFn = Box<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A scalar field with an optional analytic differential.
pub struct ScalarField {
    pub eval: ScalarFn,
    pub d_analytic: Option<FormFn>,
}

/// A degree-tagged form field (`degree: None` for mixed-degree spinors),
/// with an optional analytic exterior derivative.
pub struct FormField {
    pub degree: Option<u32>,
    pub eval: FormFn,
    pub d_analytic: Option<FormFn>,
}

impl FormField {
    pub fn of_degree(degree: u32, eval: FormFn) -> Self {
        FormField { degree: Some(degree), eval, d_analytic: None }
    }

    pub fn mixed(eval: FormFn) -> Self {
        FormField { degree: None, eval, d_analytic: None }
    }

    pub fn with_d(mut self, d: FormFn) -> Self {
        self.d_analytic = Some(d);
        self
    }
}

/// One torus generator of an action: the induced vector field, the moment
/// component, and the moment one-form component.
pub struct ActionGenerator {
    pub vector_field: VectorFn,
    pub moment: ScalarField,
    pub moment_one_form: FormField,
}

/// Torus action data; the generator count is the declared rank.
pub struct ActionData {
    pub generators: Vec<ActionGenerator>,
}

impl ActionData {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }
}

/// Smooth profile equal to 1 on `[0, r0]` and 0 on `[r1, inf)`, built from
/// the `exp(-1/t)` mollifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    pub r0: f64,
    pub r1: f64,
}

impl BumpProfile {
    pub fn new(r0: f64, r1: f64) -> Result<Self, ChartError> {
        if !(r0 > 0.0 && r1 > r0) {
            return Err(ChartError::BadBump { r0, r1 });
        }
        Ok(BumpProfile { r0, r1 })
    }

    fn mollifier(t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            Float::exp(-1.0 / t)
        }
    }

    fn mollifier_d(t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            Float::exp(-1.0 / t) / (t * t)
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= self.r0 {
            1.0
        } else if r >= self.r1 {
            0.0
        } else {
            let t = (self.r1 - r) / (self.r1 - self.r0);
            let s = Self::mollifier(t);
            let s_rev = Self::mollifier(1.0 - t);
            s / (s + s_rev)
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if r <= self.r0 || r >= self.r1 {
            0.0
        } else {
            let w = self.r1 - self.r0;
            let t = (self.r1 - r) / w;
            let s = Self::mollifier(t);
            let s_rev = Self::mollifier(1.0 - t);
            let ds = Self::mollifier_d(t);
            let ds_rev = Self::mollifier_d(1.0 - t);
            let step_d = (ds * s_rev + s * ds_rev) / ((s + s_rev) * (s + s_rev));
            -step_d / w
        }
    }
}

/// A named coordinate with periodicity flag and the box used by random
/// sampling.
pub struct Coordinate {
    pub name: String,
    pub periodic: bool,
    pub period: f64,
    pub sample_range: (f64, f64),
}

impl Coordinate {
    pub fn linear(name: &str, range: (f64, f64)) -> Self {
        Coordinate {
            name: String::from(name),
            periodic: false,
            period: 0.0,
            sample_range: range,
        }
    }

    pub fn periodic_unit(name: &str) -> Self {
        Coordinate {
            name: String::from(name),
            periodic: true,
            period: 1.0,
            sample_range: (0.0, 1.0),
        }
    }
}

/// A named coordinate domain carrying evaluable fields, excluded zones,
/// and optionally torus action data and a bump profile.
pub struct Chart {
    pub name: String,
    pub dim: u8,
    pub coords: Vec<Coordinate>,
    pub rank_tol: f64,
    pub bump: Option<BumpProfile>,
    pub action: Option<ActionData>,
    domain: PredicateFn,
    scalar_fields: BTreeMap<String, ScalarField>,
    form_fields: BTreeMap<String, FormField>,
    vector_fields: BTreeMap<String, VectorFn>,
    structure_fields: BTreeMap<String, StructureFn>,
    exclusions: BTreeMap<String, PredicateFn>,
}

impl Chart {
    pub fn new(name: &str, coords: Vec<Coordinate>, domain: PredicateFn) -> Self {
        let dim = coords.len() as u8;
        Chart {
            name: String::from(name),
            dim,
            coords,
            rank_tol: DEFAULT_RANK_TOL,
            bump: None,
            action: None,
            domain,
            scalar_fields: BTreeMap::new(),
            form_fields: BTreeMap::new(),
            vector_fields: BTreeMap::new(),
            structure_fields: BTreeMap::new(),
            exclusions: BTreeMap::new(),
        }
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c.name == name)
    }

    pub fn add_scalar_field(&mut self, name: &str, field: ScalarField) {
        self.scalar_fields.insert(String::from(name), field);
    }

    pub fn add_form_field(&mut self, name: &str, field: FormField) {
        self.form_fields.insert(String::from(name), field);
    }

    pub fn add_vector_field(&mut self, name: &str, field: VectorFn) {
        self.vector_fields.insert(String::from(name), field);
    }

    pub fn add_structure_field(&mut self, name: &str, field: StructureFn) {
        self.structure_fields.insert(String::from(name), field);
    }

    pub fn add_exclusion(&mut self, name: &str, zone: PredicateFn) {
        self.exclusions.insert(String::from(name), zone);
    }

    pub fn scalar_field(&self, name: &str) -> Result<&ScalarField, ChartError> {
        self.scalar_fields
            .get(name)
            .ok_or_else(|| ChartError::UnknownField(String::from(name)))
    }

    pub fn form_field(&self, name: &str) -> Result<&FormField, ChartError> {
        self.form_fields
            .get(name)
            .ok_or_else(|| ChartError::UnknownField(String::from(name)))
    }

    pub fn vector_field(&self, name: &str) -> Result<&VectorFn, ChartError> {
        self.vector_fields
            .get(name)
            .ok_or_else(|| ChartError::UnknownField(String::from(name)))
    }

    pub fn structure_field(&self, name: &str) -> Result<&StructureFn, ChartError> {
        self.structure_fields
            .get(name)
            .ok_or_else(|| ChartError::UnknownField(String::from(name)))
    }

    pub fn exclusion(&self, name: &str) -> Result<&PredicateFn, ChartError> {
        self.exclusions
            .get(name)
            .ok_or_else(|| ChartError::UnknownExclusion(String::from(name)))
    }

    pub fn in_domain(&self, p: &[f64]) -> bool {
        p.len() == self.dim as usize && (self.domain)(p)
    }

    pub fn check_point(&self, p: &[f64]) -> Result<(), ChartError> {
        if !self.in_domain(p) {
            return Err(ChartError::OutsideDomain { point: p.to_vec() });
        }
        Ok(())
    }

    /// Domain check plus exclusion-zone check (rejects points in the zone).
    pub fn check_point_excluding(&self, p: &[f64], zone: Option<&str>) -> Result<(), ChartError> {
        self.check_point(p)?;
        if let Some(name) = zone {
            if (self.exclusion(name)?)(p) {
                return Err(ChartError::ExcludedZone { point: p.to_vec() });
            }
        }
        Ok(())
    }

    /// Evaluate a form field; the declared degree is enforced.
    pub fn eval_form(&self, name: &str, p: &[f64]) -> Result<MultiForm<Cf64>, ChartError> {
        self.check_point(p)?;
        let field = self.form_field(name)?;
        let value = (field.eval)(p);
        if let Some(d) = field.degree {
            debug_assert!(
                value.is_zero() || value.homogeneous_degree() == Some(d),
                "field produced a value of the wrong degree"
            );
        }
        Ok(value)
    }

    pub fn eval_scalar(&self, name: &str, p: &[f64]) -> Result<Cf64, ChartError> {
        self.check_point(p)?;
        Ok((self.scalar_field(name)?.eval)(p))
    }

    /// Materialize a sample plan into concrete points, rejection-sampling
    /// the coordinate box for seeded plans and validating explicit lists.
    pub fn sample(&self, plan: &SamplePlan) -> Result<Vec<Vec<f64>>, ChartError> {
        plan.validate()?;
        let zone = plan.exclusion.as_deref();
        match &plan.points {
            PlanPoints::Explicit(points) => {
                for p in points {
                    self.check_point_excluding(p, zone)?;
                }
                Ok(points.clone())
            }
            PlanPoints::Random { seed, count } => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                let mut out = Vec::with_capacity(*count);
                let mut attempts = 0usize;
                let cap = 10_000 * (*count).max(1);
                while out.len() < *count && attempts < cap {
                    attempts += 1;
                    let p: Vec<f64> = self
                        .coords
                        .iter()
                        .map(|c| {
                            let u = uniform01(&mut rng);
                            c.sample_range.0 + u * (c.sample_range.1 - c.sample_range.0)
                        })
                        .collect();
                    if self.check_point_excluding(&p, zone).is_ok() {
                        out.push(p);
                    }
                }
                if out.len() < *count {
                    return Err(ChartError::SamplingExhausted { placed: out.len(), requested: *count });
                }
                Ok(out)
            }
        }
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart('{}', dim={})", self.name, self.dim)
    }
}

fn uniform01(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sample points plus the finite-difference step and residual tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub points: PlanPoints,
    pub h: f64,
    pub tol: f64,
    /// Name of a chart exclusion zone the points must avoid.
    pub exclusion: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanPoints {
    Explicit(Vec<Vec<f64>>),
    Random { seed: u64, count: usize },
}

impl SamplePlan {
    pub fn random(seed: u64, count: usize) -> Self {
        SamplePlan {
            points: PlanPoints::Random { seed, count },
            h: DEFAULT_H,
            tol: DEFAULT_TOL,
            exclusion: None,
        }
    }

    pub fn explicit(points: Vec<Vec<f64>>) -> Self {
        SamplePlan {
            points: PlanPoints::Explicit(points),
            h: DEFAULT_H,
            tol: DEFAULT_TOL,
            exclusion: None,
        }
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn excluding(mut self, zone: &str) -> Self {
        self.exclusion = Some(String::from(zone));
        self
    }

    pub fn seed(&self) -> Option<u64> {
        match self.points {
            PlanPoints::Random { seed, .. } => Some(seed),
            PlanPoints::Explicit(_) => None,
        }
    }

    fn validate(&self) -> Result<(), ChartError> {
        if !(self.h > 0.0) {
            return Err(ChartError::BadPlan(String::from("step h must be positive")));
        }
        if !(self.tol > 0.0) {
            return Err(ChartError::BadPlan(String::from("tolerance must be positive")));
        }
        Ok(())
    }
}

/// Checks that every axis-aligned neighbor `p +- h e_j` stays in the chart
/// domain (and outside the given exclusion zone).
fn check_margin(chart: &Chart, p: &[f64], h: f64, zone: Option<&str>) -> Result<(), ChartError> {
    chart.check_point_excluding(p, zone)?;
    let mut q = p.to_vec();
    for j in 0..p.len() {
        for step in [-h, h] {
            q[j] = p[j] + step;
            let ok = chart.check_point_excluding(&q, zone).is_ok();
            q[j] = p[j];
            if !ok {
                return Err(ChartError::TooCloseToBoundary { point: p.to_vec() });
            }
        }
    }
    Ok(())
}

/// Central-difference exterior derivative of a form field at `p`:
/// `d f = sum_j dx_j ^ (f(p + h e_j) - f(p - h e_j)) / 2h`, with `O(h^2)`
/// error and exact for coefficients of polynomial degree <= 2.
pub fn d_numeric(
    chart: &Chart,
    field: &FormField,
    p: &[f64],
    h: f64,
) -> Result<MultiForm<Cf64>, ChartError> {
    check_margin(chart, p, h, None)?;
    d_numeric_unchecked(chart.dim, &field.eval, p, h)
}

fn d_numeric_unchecked(
    dim: u8,
    eval: &FormFn,
    p: &[f64],
    h: f64,
) -> Result<MultiForm<Cf64>, ChartError> {
    let mut out = MultiForm::zero(dim);
    let mut q = p.to_vec();
    for j in 0..p.len() {
        q[j] = p[j] + h;
        let plus = eval(&q);
        q[j] = p[j] - h;
        let minus = eval(&q);
        q[j] = p[j];
        let partial = plus.sub(&minus)?.scale(&Cf64::new(1.0 / (2.0 * h), 0.0));
        let dxj = MultiForm::basis(dim, (j + 1) as u8);
        out = out.add(&dxj.wedge(&partial)?)?;
    }
    Ok(out)
}

/// Exterior derivative preferring the registered analytic derivative.
pub fn d_field(
    chart: &Chart,
    field: &FormField,
    p: &[f64],
    h: f64,
) -> Result<MultiForm<Cf64>, ChartError> {
    match &field.d_analytic {
        Some(d) => {
            chart.check_point(p)?;
            Ok(d(p))
        }
        None => d_numeric(chart, field, p, h),
    }
}

/// The covector part of a section as a 1-form.
fn cov_as_form(v: &GVector<Cf64>) -> MultiForm<Cf64> {
    MultiForm::one_form(&v.cov)
}

/// `H`-twisted Courant bracket of two sections at a point, every derivative
/// taken by central differences:
/// `[X+xi, Y+eta] = [X,Y] + L_X eta - L_Y xi - (1/2) d(eta(X) - xi(Y)) + i_Y i_X H`.
pub fn courant_bracket(
    chart: &Chart,
    a_field: &dyn Fn(&[f64]) -> Result<GVector<Cf64>, ChartError>,
    b_field: &dyn Fn(&[f64]) -> Result<GVector<Cf64>, ChartError>,
    h_field: &FormField,
    p: &[f64],
    h: f64,
) -> Result<GVector<Cf64>, ChartError> {
    check_margin(chart, p, h, None)?;
    let m = chart.dim;
    let n = m as usize;
    let a = a_field(p)?;
    let b = b_field(p)?;

    // Neighboring evaluations, shared by all the difference quotients.
    let mut a_plus = Vec::with_capacity(n);
    let mut a_minus = Vec::with_capacity(n);
    let mut b_plus = Vec::with_capacity(n);
    let mut b_minus = Vec::with_capacity(n);
    let mut q = p.to_vec();
    for j in 0..n {
        q[j] = p[j] + h;
        a_plus.push(a_field(&q)?);
        b_plus.push(b_field(&q)?);
        q[j] = p[j] - h;
        a_minus.push(a_field(&q)?);
        b_minus.push(b_field(&q)?);
        q[j] = p[j];
    }
    let inv2h = Cf64::new(1.0 / (2.0 * h), 0.0);

    // Lie bracket [X, Y]_i = X_k d_k Y_i - Y_k d_k X_i.
    let mut lie = vec![Cf64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = Cf64::new(0.0, 0.0);
        for k in 0..n {
            let dy = (b_plus[k].vec[i] - b_minus[k].vec[i]) * inv2h;
            let dx = (a_plus[k].vec[i] - a_minus[k].vec[i]) * inv2h;
            acc += a.vec[k] * dy - b.vec[k] * dx;
        }
        lie[i] = acc;
    }

    // d eta and d xi from the neighbor covectors.
    let d_of_cov = |plus: &[GVector<Cf64>],
                    minus: &[GVector<Cf64>]|
     -> Result<MultiForm<Cf64>, ChartError> {
        let mut out = MultiForm::zero(m);
        for j in 0..n {
            let diff = cov_as_form(&plus[j]).sub(&cov_as_form(&minus[j]))?.scale(&inv2h);
            out = out.add(&MultiForm::basis(m, (j + 1) as u8).wedge(&diff)?)?;
        }
        Ok(out)
    };
    let d_eta = d_of_cov(&b_plus, &b_minus)?;
    let d_xi = d_of_cov(&a_plus, &a_minus)?;

    // d of the scalars eta(X) and xi(Y).
    let pair = |v: &GVector<Cf64>, w: &GVector<Cf64>| -> Cf64 {
        let mut acc = Cf64::new(0.0, 0.0);
        for i in 0..n {
            acc += v.cov[i] * w.vec[i];
        }
        acc
    };
    let mut d_eta_x = vec![Cf64::new(0.0, 0.0); n];
    let mut d_xi_y = vec![Cf64::new(0.0, 0.0); n];
    for j in 0..n {
        d_eta_x[j] = (pair(&b_plus[j], &a_plus[j]) - pair(&b_minus[j], &a_minus[j])) * inv2h;
        d_xi_y[j] = (pair(&a_plus[j], &b_plus[j]) - pair(&a_minus[j], &b_minus[j])) * inv2h;
    }
    let d_eta_x = MultiForm::one_form(&d_eta_x);
    let d_xi_y = MultiForm::one_form(&d_xi_y);

    // Cartan: L_X eta = d(eta(X)) + i_X d eta, and likewise for L_Y xi.
    let lx_eta = d_eta_x.add(&d_eta.contract(&a.vec)?)?;
    let ly_xi = d_xi_y.add(&d_xi.contract(&b.vec)?)?;

    let half = Cf64::new(0.5, 0.0);
    let correction = d_eta_x.sub(&d_xi_y)?.scale(&half);

    let h_val = (h_field.eval)(p);
    let twist = h_val.contract(&a.vec)?.contract(&b.vec)?;

    let cov_total = lx_eta.sub(&ly_xi)?.sub(&correction)?.add(&twist)?;
    let mut cov = vec![Cf64::new(0.0, 0.0); n];
    for (i, c) in cov.iter_mut().enumerate() {
        *c = cov_total.coeff(1u16 << i);
    }
    Ok(GVector::new(lie, cov))
}

/// Pull a form at `map(p)` back through the Jacobian `jac` at `p`:
/// each target 1-form `dx_k` becomes the row-`k` 1-form of the Jacobian.
pub fn pullback(form: &MultiForm<Cf64>, jac: &Mat<Cf64>) -> Result<MultiForm<Cf64>, ChartError> {
    let m = form.dim();
    let mut rows: Vec<MultiForm<Cf64>> = Vec::with_capacity(m as usize);
    for k in 0..m as usize {
        rows.push(MultiForm::one_form(jac.row(k)));
    }
    let mut out = MultiForm::zero(m);
    for (mask, c) in form.terms() {
        let mut term = MultiForm::scalar(m, *c);
        for k in 0..m {
            if mask & (1 << k) != 0 {
                term = term.wedge(&rows[k as usize])?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// A smooth map between charts with an analytic Jacobian.
pub struct ChartMap {
    pub source: String,
    pub target: String,
    pub eval: Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    pub jacobian: Box<dyn Fn(&[f64]) -> Mat<Cf64> + Send + Sync>,
}

impl ChartMap {
    /// Central-difference Jacobian, for cross-checking the analytic one.
    pub fn jacobian_numeric(&self, p: &[f64], h: f64) -> Mat<Cf64> {
        let n = p.len();
        let mut q = p.to_vec();
        let mut jac: Mat<Cf64> = Mat::zeros(n, n);
        for j in 0..n {
            q[j] = p[j] + h;
            let plus = (self.eval)(&q);
            q[j] = p[j] - h;
            let minus = (self.eval)(&q);
            q[j] = p[j];
            for k in 0..n {
                // Row k holds the differential of target coordinate k.
                jac[(k, j)] = Cf64::new((plus[k] - minus[k]) / (2.0 * h), 0.0);
            }
        }
        jac
    }
}

/// Composite Simpson quadrature on `[a, b]` with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Cf64 {
        Cf64::new(x, 0.0)
    }

    /// A plain 2d chart on the square (-2, 2)^2.
    fn flat_chart() -> Chart {
        Chart::new(
            "flat",
            vec![
                Coordinate::linear("x1", (-1.5, 1.5)),
                Coordinate::linear("x2", (-1.5, 1.5)),
            ],
            Box::new(|p: &[f64]| p[0].abs() < 2.0 && p[1].abs() < 2.0),
        )
    }

    #[test]
    fn d_numeric_constant_form_is_zero() {
        let chart = flat_chart();
        let field = FormField::of_degree(
            1,
            Box::new(|_p: &[f64]| MultiForm::basis(2, 1).scale(&c(3.0))),
        );
        let d = d_numeric(&chart, &field, &[0.3, -0.4], 1e-4).unwrap();
        assert!(d.max_modulus() < 1e-12);
    }

    #[test]
    fn d_numeric_linear_coefficient_exact() {
        // d(x1 e2) = e1 ^ e2, exactly for linear coefficients.
        let chart = flat_chart();
        let field = FormField::of_degree(
            1,
            Box::new(|p: &[f64]| MultiForm::basis(2, 2).scale(&c(p[0]))),
        );
        let d = d_numeric(&chart, &field, &[0.7, 0.1], 1e-4).unwrap();
        let expect = MultiForm::monomial(2, &[1, 2], c(1.0));
        assert!(d.sub(&expect).unwrap().max_modulus() < 1e-10);
    }

    #[test]
    fn d_numeric_margin_enforced() {
        let chart = flat_chart();
        let field = FormField::of_degree(0, Box::new(|_p: &[f64]| MultiForm::one(2)));
        let err = d_numeric(&chart, &field, &[1.9999, 0.0], 1e-3).unwrap_err();
        assert!(matches!(err, ChartError::TooCloseToBoundary { .. }));
    }

    #[test]
    fn d_squared_vanishes() {
        // d(d f) ~ 0 within 10 h^2 for a smooth nonlinear field.
        let chart = flat_chart();
        let h = 1e-4;
        let inner: FormFn = Box::new(|p: &[f64]| {
            MultiForm::basis(2, 1)
                .scale(&c((p[0] * p[1]).sin()))
                .add(&MultiForm::basis(2, 2).scale(&c((p[0] - 0.3 * p[1] * p[1]).exp())))
                .unwrap()
        });
        let outer = FormField::of_degree(
            2,
            Box::new(move |p: &[f64]| d_numeric_unchecked(2, &inner, p, 1e-4).unwrap()),
        );
        let dd = d_numeric(&chart, &outer, &[0.2, 0.5], h).unwrap();
        assert!(dd.max_modulus() < 10.0 * h * h);
    }

    #[test]
    fn bump_profile_plateaus_and_transition() {
        let bump = BumpProfile::new(1.0, 1.5).unwrap();
        assert_eq!(bump.value(0.0), 1.0);
        assert_eq!(bump.value(1.0), 1.0);
        assert_eq!(bump.value(1.5), 0.0);
        assert_eq!(bump.value(2.3), 0.0);
        let mid = bump.value(1.25);
        assert!(mid > 0.0 && mid < 1.0);
        // Derivative matches a central difference mid-transition.
        let h = 1e-6;
        let fd = (bump.value(1.3 + h) - bump.value(1.3 - h)) / (2.0 * h);
        assert!((bump.derivative(1.3) - fd).abs() < 1e-6);
        assert!(BumpProfile::new(1.5, 1.0).is_err());
    }

    #[test]
    fn bump_derivative_integrates_to_minus_one() {
        let bump = BumpProfile::new(1.0, 1.5).unwrap();
        let integral = simpson(|r| bump.derivative(r), 0.0, 1.75, 4096);
        assert!((integral - (-1.0)).abs() < 1e-9);
    }

    #[test]
    fn courant_bracket_constant_fields_vanish() {
        let chart = flat_chart();
        let zero_h = FormField::of_degree(3, Box::new(|_p: &[f64]| MultiForm::zero(2)));
        let a: SectionFn =
            Box::new(|_p: &[f64]| Ok(GVector::new(vec![c(1.0), c(0.0)], vec![c(0.0), c(2.0)])));
        let b: SectionFn =
            Box::new(|_p: &[f64]| Ok(GVector::new(vec![c(0.0), c(1.0)], vec![c(-1.0), c(0.0)])));
        let z = courant_bracket(&chart, &a, &b, &zero_h, &[0.1, 0.2], 1e-4).unwrap();
        assert!(z.norm() < 1e-10);
    }

    #[test]
    fn courant_bracket_twist_term() {
        // A = d_r, B = d_theta1, H = dr ^ dtheta1 ^ dtheta3: i_B i_A H = dtheta3.
        let coords = vec![
            Coordinate::linear("r", (0.2, 0.9)),
            Coordinate::periodic_unit("theta1"),
            Coordinate::periodic_unit("theta2"),
            Coordinate::periodic_unit("theta3"),
        ];
        let chart = Chart::new("polar", coords, Box::new(|_p: &[f64]| true));
        let h_field = FormField::of_degree(
            3,
            Box::new(|_p: &[f64]| MultiForm::monomial(4, &[1, 2, 4], c(1.0))),
        );
        let a: SectionFn = Box::new(|_p: &[f64]| {
            Ok(GVector::new(vec![c(1.0), c(0.0), c(0.0), c(0.0)], vec![c(0.0); 4]))
        });
        let b: SectionFn = Box::new(|_p: &[f64]| {
            Ok(GVector::new(vec![c(0.0), c(1.0), c(0.0), c(0.0)], vec![c(0.0); 4]))
        });
        let z = courant_bracket(&chart, &a, &b, &h_field, &[0.5, 0.3, 0.4, 0.6], 1e-4).unwrap();
        assert!(z.vec.iter().all(|x| x.norm() < 1e-10));
        let expect = [c(0.0), c(0.0), c(0.0), c(1.0)];
        for (got, want) in z.cov.iter().zip(expect.iter()) {
            assert!((got - want).norm() < 1e-10);
        }
    }

    #[test]
    fn courant_bracket_antisymmetric_on_nonconstant_fields() {
        let chart = flat_chart();
        let zero_h = FormField::of_degree(3, Box::new(|_p: &[f64]| MultiForm::zero(2)));
        let a: SectionFn = Box::new(|p: &[f64]| {
            Ok(GVector::new(vec![c(p[1]), c(0.4)], vec![c(p[0] * p[0]), c(-p[1])]))
        });
        let b: SectionFn = Box::new(|p: &[f64]| {
            Ok(GVector::new(vec![c(0.3 * p[0]), c(1.0)], vec![c(p[1] * 0.2), c(p[0])]))
        });
        let p = [0.4, -0.3];
        let ab = courant_bracket(&chart, &a, &b, &zero_h, &p, 1e-4).unwrap();
        let ba = courant_bracket(&chart, &b, &a, &zero_h, &p, 1e-4).unwrap();
        let sum = ab.add(&ba);
        assert!(sum.norm() < 1e-8, "bracket should be skew, got {}", sum.norm());
        // Equal arguments bracket to zero.
        let aa = courant_bracket(&chart, &a, &a, &zero_h, &p, 1e-4).unwrap();
        assert!(aa.norm() < 1e-8);
    }

    #[test]
    fn pullback_by_identity_and_scaling() {
        let form = MultiForm::monomial(2, &[1, 2], c(3.0));
        let id = Mat::<Cf64>::identity(2);
        assert!(pullback(&form, &id).unwrap().sub(&form).unwrap().max_modulus() < 1e-15);
        let mut scale: Mat<Cf64> = Mat::zeros(2, 2);
        scale[(0, 0)] = c(2.0);
        scale[(1, 1)] = c(5.0);
        let pulled = pullback(&form, &scale).unwrap();
        assert!((pulled.coeff(0b11) - c(30.0)).norm() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_and_respects_exclusions() {
        let mut chart = flat_chart();
        chart.add_exclusion(
            "origin",
            Box::new(|p: &[f64]| p[0] * p[0] + p[1] * p[1] < 0.04),
        );
        let plan = SamplePlan::random(7, 50).excluding("origin");
        let first = chart.sample(&plan).unwrap();
        let second = chart.sample(&plan).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.len(), 50);
        for p in &first {
            assert!(p[0] * p[0] + p[1] * p[1] >= 0.04);
        }
        let other = chart.sample(&SamplePlan::random(8, 50).excluding("origin")).unwrap();
        assert_ne!(first, other);
    }

    #[test]
    fn explicit_plan_validation() {
        let chart = flat_chart();
        let bad = SamplePlan::explicit(vec![vec![5.0, 0.0]]);
        assert!(matches!(
            chart.sample(&bad).unwrap_err(),
            ChartError::OutsideDomain { .. }
        ));
        let bad_h = SamplePlan::explicit(vec![vec![0.0, 0.0]]).with_h(-1.0);
        assert!(matches!(chart.sample(&bad_h).unwrap_err(), ChartError::BadPlan(_)));
        assert!(matches!(
            chart.sample(&SamplePlan::random(1, 3).excluding("nope")).unwrap_err(),
            ChartError::UnknownExclusion(_)
        ));
    }

    #[test]
    fn simpson_matches_closed_forms() {
        let integral = simpson(|x| x * x, 0.0, 1.0, 128);
        assert!((integral - 1.0 / 3.0).abs() < 1e-12);
    }
}
