//! Verification suites over the chart models: twisted-bracket
//! involutivity of annihilator sections, the spinor match between the
//! type-jumping model and its B-symplectic description, the gluing
//! symplectomorphism, the twist form and its transverse integral, and the
//! generalized moment map conditions.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::form::{GVector, MultiForm};
use crate::gclin::annihilator;
use crate::linalg::vec_norm;
use crate::scalar::{Cf64, Scalar};

use super::models::{gluing_map, model};
use super::{d_field, ChartError, Chart, FormField, SamplePlan};

/// How `verify_gluing` obtains the Jacobian of the gluing map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianMode {
    Analytic,
    FiniteDifference,
}

/// Uniform result record for every chart check; serializes to
/// `{model, check, points, maxResidual, tolerance, pass, ...}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "camelCase"))]
pub struct CheckReport {
    pub model: String,
    pub check: String,
    pub points: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub seed: Option<u64>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub h: Option<f64>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub integral: Option<f64>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub orientation: Option<String>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Vec::is_empty", default))]
    pub notes: Vec<String>,
}

impl CheckReport {
    fn new(model: &str, check: &str, plan: &SamplePlan, points: usize, max_residual: f64) -> Self {
        CheckReport {
            model: String::from(model),
            check: String::from(check),
            points,
            max_residual,
            tolerance: plan.tol,
            pass: max_residual < plan.tol,
            seed: plan.seed(),
            h: Some(plan.h),
            integral: None,
            orientation: None,
            notes: Vec::new(),
        }
    }
}

/// Annihilator basis at a point, failing when the rank drops.
fn annihilator_basis(
    chart: &Chart,
    field: &FormField,
    q: &[f64],
) -> Result<Vec<GVector<Cf64>>, ChartError> {
    let phi = (field.eval)(q);
    if phi.is_zero() {
        return Err(ChartError::DegenerateSpinor { point: q.to_vec() });
    }
    let ann = annihilator(&phi, chart.rank_tol).map_err(ChartError::Gclin)?;
    if ann.rank() != chart.dim as usize {
        return Err(ChartError::DegenerateSpinor { point: q.to_vec() });
    }
    Ok(ann.basis().to_vec())
}

/// Distance from `b` to the column span of `cols`, relative to `max(1, |b|)`.
fn range_residual(cols: &[Vec<Cf64>], b: &[Cf64]) -> f64 {
    let mut ortho: Vec<Vec<Cf64>> = Vec::new();
    for col in cols {
        let mut w = col.clone();
        for u in &ortho {
            let mut proj = Cf64::new(0.0, 0.0);
            for (x, y) in u.iter().zip(w.iter()) {
                proj += x.conj() * y;
            }
            for (x, y) in u.iter().zip(w.iter_mut()) {
                *y -= proj * x;
            }
        }
        let n = vec_norm(&w);
        if n > 1e-13 {
            let inv = Cf64::new(1.0 / n, 0.0);
            for y in w.iter_mut() {
                *y *= inv;
            }
            ortho.push(w);
        }
    }
    let mut rem = b.to_vec();
    for u in &ortho {
        let mut proj = Cf64::new(0.0, 0.0);
        for (x, y) in u.iter().zip(rem.iter()) {
            proj += x.conj() * y;
        }
        for (x, y) in u.iter().zip(rem.iter_mut()) {
            *y -= proj * x;
        }
    }
    vec_norm(&rem) / Float::max(1.0, vec_norm(b))
}

/// Brackets all pairs of annihilator sections of a spinor field and
/// reports the worst pairing against the annihilator itself (membership in
/// a maximal isotropic is exactly vanishing pairing), together with the
/// least-squares residual of `d phi - H ^ phi = (X + xi) . phi`.
pub fn involutivity_check(
    chart: &Chart,
    spinor_name: &str,
    h_name: &str,
    plan: &SamplePlan,
) -> Result<CheckReport, ChartError> {
    let points = chart.sample(plan)?;
    let spinor = chart.form_field(spinor_name)?;
    let h_field = chart.form_field(h_name)?;
    let m = chart.dim as usize;

    let mut worst = 0.0f64;
    for p in &points {
        let basis = annihilator_basis(chart, spinor, p)?;
        let unit_basis: Vec<GVector<Cf64>> = basis
            .iter()
            .map(|v| v.scale(&Cf64::new(1.0 / v.norm(), 0.0)))
            .collect();

        for i in 0..m {
            for j in i + 1..m {
                let sec_i =
                    |q: &[f64]| annihilator_basis(chart, spinor, q).map(|b| b[i].clone());
                let sec_j =
                    |q: &[f64]| annihilator_basis(chart, spinor, q).map(|b| b[j].clone());
                let z = super::courant_bracket(chart, &sec_i, &sec_j, h_field, p, plan.h)?;
                let norm = z.norm();
                if norm < 1e-12 {
                    continue;
                }
                let unit = z.scale(&Cf64::new(1.0 / norm, 0.0));
                for b in &unit_basis {
                    let pairing = unit.natural_pairing(b)?;
                    worst = Float::max(worst, pairing.modulus());
                }
            }
        }

        // Condition (b): d phi - H ^ phi must lie in the Clifford image.
        let phi = (spinor.eval)(p);
        let d_phi = d_field(chart, spinor, p, plan.h)?;
        let rhs = d_phi.sub(&(h_field.eval)(p).wedge(&phi)?)?;
        let mut cols: Vec<Vec<Cf64>> = Vec::with_capacity(2 * m);
        for k in 1..=m as u8 {
            cols.push(GVector::basis_vec(chart.dim, k).clifford(&phi)?.dense());
        }
        for k in 1..=m as u8 {
            cols.push(GVector::basis_cov(chart.dim, k).clifford(&phi)?.dense());
        }
        worst = Float::max(worst, range_residual(&cols, &rhs.dense()));
    }

    Ok(CheckReport::new(&chart.name, "involutivity", plan, points.len(), worst))
}

/// Compares the annihilator of `rho` with the annihilator of
/// `e^{B + i gamma}` pointwise, as subspaces.
pub fn verify_spinor_match(chart: &Chart, plan: &SamplePlan) -> Result<CheckReport, ChartError> {
    let points = chart.sample(plan)?;
    let rho = chart.form_field("rho")?;
    let b_field = chart.form_field("B")?;
    let gamma = chart.form_field("gamma")?;

    let mut worst = 0.0f64;
    for p in &points {
        // The B-symplectic description breaks down on the type-jump locus.
        if p[0] * p[0] + p[1] * p[1] <= 1e-4 {
            return Err(ChartError::ExcludedZone { point: p.clone() });
        }
        let l_rho = annihilator(&(rho.eval)(p), chart.rank_tol).map_err(ChartError::Gclin)?;
        let exponent = (b_field.eval)(p).add(&(gamma.eval)(p).scale(&Cf64::i()))?;
        let l_b = annihilator(&exponent.exp_form()?, chart.rank_tol).map_err(ChartError::Gclin)?;
        if l_rho.rank() != chart.dim as usize || l_b.rank() != chart.dim as usize {
            return Err(ChartError::DegenerateSpinor { point: p.clone() });
        }
        worst = Float::max(worst, l_rho.subspace_distance(&l_b));
    }
    Ok(CheckReport::new(&chart.name, "spinor-match", plan, points.len(), worst))
}

/// Pulls the target symplectic form (and the complex spinor exponent)
/// back through the gluing map and compares with the source data.
pub fn verify_gluing(plan: &SamplePlan, mode: JacobianMode) -> Result<CheckReport, ChartError> {
    let source = model("glue-source")?;
    let target = model("glue-target")?;
    let map = gluing_map();

    let points = source.sample(plan)?;
    let mut worst = 0.0f64;
    for p in &points {
        let q = (map.eval)(p);
        target.check_point(&q)?;
        let jac = match mode {
            JacobianMode::Analytic => (map.jacobian)(p),
            JacobianMode::FiniteDifference => map.jacobian_numeric(p, plan.h),
        };

        let omega_pulled = super::pullback(&target.eval_form("omega", &q)?, &jac)?;
        let alpha = source.eval_form("alpha", p)?;
        worst = Float::max(worst, omega_pulled.sub(&alpha)?.max_modulus());

        let target_exp = target
            .eval_form("Btilde", &q)?
            .add(&target.eval_form("omega", &q)?.scale(&Cf64::i()))?;
        let source_exp = source
            .eval_form("B", p)?
            .add(&alpha.scale(&Cf64::i()))?;
        let pulled_exp = super::pullback(&target_exp, &jac)?;
        worst = Float::max(worst, pulled_exp.sub(&source_exp)?.max_modulus());
    }

    let mut report = CheckReport::new("glue-source", "gluing", plan, points.len(), worst);
    report.notes.push(String::from(match mode {
        JacobianMode::Analytic => "jacobian: analytic",
        JacobianMode::FiniteDifference => "jacobian: finite-difference",
    }));
    Ok(report)
}

/// Verifies `d Btilde = H` by finite differences, that `H` vanishes off
/// the bump annulus, and that the transverse integral of `H` over the
/// 3-cycle spanned by `(r, theta3, theta1)` equals `f(R) - f(0) = -1`.
pub fn verify_twist_form(chart: &Chart, plan: &SamplePlan) -> Result<CheckReport, ChartError> {
    let bump = chart
        .bump
        .ok_or_else(|| ChartError::BadPlan(String::from("chart has no bump profile")))?;
    let btilde = chart.form_field("Btilde")?;
    let h_field = chart.form_field("H")?;
    let ir = chart
        .coord_index("r")
        .ok_or_else(|| ChartError::UnknownField(String::from("r")))?;

    let mut points = chart.sample(plan)?;
    // Deterministic ladder across the transition annulus and beyond, so the
    // steep part of the profile is always exercised.
    let mid: Vec<f64> = chart
        .coords
        .iter()
        .map(|c| 0.5 * (c.sample_range.0 + c.sample_range.1))
        .collect();
    let mut ladder = Vec::new();
    for k in 0..10 {
        let mut p = mid.clone();
        p[ir] = bump.r0 + (0.05 + 0.1 * k as f64) * (bump.r1 - bump.r0);
        ladder.push(p);
    }
    for r_out in [0.5 * bump.r0, bump.r1 + 0.2] {
        let mut p = mid.clone();
        p[ir] = r_out;
        ladder.push(p);
    }
    points.extend(ladder);

    let mut worst = 0.0f64;
    for p in &points {
        let numeric = super::d_numeric(chart, btilde, p, plan.h)?;
        let analytic = (h_field.eval)(p);
        worst = Float::max(worst, numeric.sub(&analytic)?.max_modulus());
        let r = p[ir];
        if !(r >= bump.r0 && r <= bump.r1) && !analytic.is_zero() {
            // Support must stay inside the transition annulus.
            worst = Float::max(worst, analytic.max_modulus());
        }
    }

    // Quadrature of the (r, theta3, theta1)-oriented transverse cycle:
    // unit angular periods, so the integral is f(R) - f(0).
    let it1 = chart.coord_index("theta1").unwrap();
    let it3 = chart.coord_index("theta3").unwrap();
    let mask: u16 = (1 << ir) | (1 << it1) | (1 << it3);
    let r_max = bump.r1 + 0.25;
    let integrand = |r: f64| -> f64 {
        let mut p = mid.clone();
        p[ir] = r;
        let h_val = (h_field.eval)(&p);
        // Orientation (r, theta3, theta1) flips the stored (r, theta1,
        // theta3) component.
        -h_val.coeff(mask).re
    };
    let integral = super::simpson(integrand, 0.0, r_max, 4096);
    let expected = bump.value(r_max) - bump.value(0.0);
    worst = Float::max(worst, Float::abs(integral - expected));

    let mut report = CheckReport::new(&chart.name, "twist-form", plan, points.len(), worst);
    report.integral = Some(integral);
    report.orientation = Some(String::from("(r, theta3, theta1)"));
    report.notes.push(format!("expected integral {expected}"));
    Ok(report)
}

/// The three graded moment-map conditions for every action generator:
/// `-J d mu = xi_M + alpha`, `d alpha = i_{xi_M} H`, `alpha(xi_M) = 0`.
pub fn verify_moment(chart: &Chart, plan: &SamplePlan) -> Result<CheckReport, ChartError> {
    let action = chart.action.as_ref().ok_or(ChartError::MissingActionData)?;
    let j_field = chart.structure_field("J")?;
    let h_field = chart.form_field("H")?;
    let m = chart.dim as usize;

    let points = chart.sample(plan)?;
    let mut worst = 0.0f64;
    for p in &points {
        let j = j_field(p)?;
        let h_val = (h_field.eval)(p);
        for gen in &action.generators {
            let xi_m = (gen.vector_field)(p);
            let d_mu = match &gen.moment.d_analytic {
                Some(d) => d(p),
                None => {
                    super::check_margin(chart, p, plan.h, None)?;
                    let mut coeffs = vec![Cf64::new(0.0, 0.0); m];
                    let mut q = p.clone();
                    for k in 0..m {
                        q[k] = p[k] + plan.h;
                        let plus = (gen.moment.eval)(&q);
                        q[k] = p[k] - plan.h;
                        let minus = (gen.moment.eval)(&q);
                        q[k] = p[k];
                        coeffs[k] = (plus - minus) / Cf64::new(2.0 * plan.h, 0.0);
                    }
                    MultiForm::one_form(&coeffs)
                }
            };
            let alpha = (gen.moment_one_form.eval)(p);

            // (a) -J(d mu) = xi_M + alpha.
            let mut d_mu_coords = vec![Cf64::new(0.0, 0.0); m];
            let mut alpha_coords = vec![Cf64::new(0.0, 0.0); m];
            for k in 0..m {
                d_mu_coords[k] = d_mu.coeff(1 << k);
                alpha_coords[k] = alpha.coeff(1 << k);
            }
            let minus_j_dmu = j
                .apply(&GVector::new(vec![Cf64::new(0.0, 0.0); m], d_mu_coords))
                .scale(&Cf64::new(-1.0, 0.0));
            let expect = GVector::new(xi_m.clone(), alpha_coords);
            let diff = minus_j_dmu.add(&expect.scale(&Cf64::new(-1.0, 0.0)));
            worst = Float::max(worst, diff.norm());

            // (b) degree-2 part: d alpha - i_{xi_M} H = 0.
            let d_alpha = d_field(chart, &gen.moment_one_form, p, plan.h)?;
            let contracted = h_val.contract(&xi_m)?;
            worst = Float::max(worst, d_alpha.sub(&contracted)?.max_modulus());

            // (b) degree-0 part: alpha(xi_M) = 0.
            let mut pairing = Cf64::new(0.0, 0.0);
            for k in 0..m {
                pairing += alpha.coeff(1 << k) * xi_m[k];
            }
            worst = Float::max(worst, pairing.norm());
        }
    }

    let mut report = CheckReport::new(&chart.name, "moment", plan, points.len(), worst);
    report
        .notes
        .push(format!("generators: {}", action.generators.len()));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::models::GLUING_RADIUS;
    use crate::chart::{Coordinate, PlanPoints};
    use alloc::boxed::Box;

    fn c(x: f64) -> Cf64 {
        Cf64::new(x, 0.0)
    }

    /// Deterministic disc points for the Cartesian type-jump chart.
    fn disc_points(count: usize, r_min: f64, r_max: f64) -> Vec<Vec<f64>> {
        let golden = 0.618_033_988_749_895;
        (0..count)
            .map(|k| {
                let t = (k as f64 + 0.5) / count as f64;
                let r = r_min + t * (r_max - r_min);
                let angle = core::f64::consts::TAU * ((k as f64 * golden) % 1.0);
                vec![r * angle.cos(), r * angle.sin(), 0.3, 0.7]
            })
            .collect()
    }

    #[test]
    fn involutivity_bsymplectic_untwisted() {
        let chart = model("b-symplectic").unwrap();
        let plan = SamplePlan::random(11, 12);
        let report = involutivity_check(&chart, "phi", "H", &plan).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);
    }

    #[test]
    fn involutivity_cgu_off_locus() {
        let chart = model("cgu-model").unwrap();
        let plan = SamplePlan::random(13, 10).excluding("type-jump-locus");
        let report = involutivity_check(&chart, "rho", "H", &plan).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);
    }

    #[test]
    fn involutivity_negative_control() {
        // A non-closed omega: e^{i omega} fails condition (b) and its
        // annihilator sections fail to close under the bracket.
        let mut chart = Chart::new(
            "perturbed",
            alloc::vec![
                Coordinate::linear("x1", (-0.8, 0.8)),
                Coordinate::linear("x2", (-0.8, 0.8)),
                Coordinate::linear("x3", (-0.8, 0.8)),
                Coordinate::linear("x4", (-0.8, 0.8)),
            ],
            Box::new(|p: &[f64]| p.iter().all(|x| x.abs() < 1.0)),
        );
        chart.add_form_field(
            "phi",
            FormField {
                degree: None,
                eval: Box::new(|p: &[f64]| {
                    // omega = (1 + x3) e12 + e34 is not closed.
                    let omega = MultiForm::monomial(4, &[1, 2], c(1.0 + p[2]))
                        .add(&MultiForm::monomial(4, &[3, 4], c(1.0)))
                        .unwrap();
                    omega.scale(&Cf64::i()).exp_form().unwrap()
                }),
                d_analytic: None,
            },
        );
        chart.add_form_field(
            "H",
            FormField::of_degree(3, Box::new(|_p: &[f64]| MultiForm::zero(4))),
        );
        let plan = SamplePlan::random(5, 8);
        let report = involutivity_check(&chart, "phi", "H", &plan).unwrap();
        assert!(!report.pass, "negative control must fail, residual {}", report.max_residual);
        assert!(report.max_residual > 0.01);
    }

    #[test]
    fn spinor_match_on_disc() {
        let chart = model("cgu-model").unwrap();
        let mut points = disc_points(25, 0.12, 0.65);
        // The gluing radius itself.
        points.push(alloc::vec![GLUING_RADIUS, 0.0, 0.25, 0.5]);
        let plan = SamplePlan {
            points: PlanPoints::Explicit(points),
            h: 1e-4,
            tol: 1e-6,
            exclusion: None,
        };
        let report = verify_spinor_match(&chart, &plan).unwrap();
        assert!(report.pass, "distance {}", report.max_residual);
    }

    #[test]
    fn spinor_match_rejects_locus() {
        let chart = model("cgu-model").unwrap();
        let plan = SamplePlan::explicit(alloc::vec![alloc::vec![0.0, 0.0, 0.2, 0.4]]);
        assert!(matches!(
            verify_spinor_match(&chart, &plan).unwrap_err(),
            ChartError::ExcludedZone { .. }
        ));
    }

    #[test]
    fn gluing_analytic_is_tight() {
        let plan = SamplePlan::random(17, 25).with_tol(1e-9);
        let report = verify_gluing(&plan, JacobianMode::Analytic).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);
    }

    #[test]
    fn gluing_near_inner_edge() {
        let plan = SamplePlan {
            points: PlanPoints::Explicit(alloc::vec![
                alloc::vec![0.1, -0.2, GLUING_RADIUS + 1e-3, 0.3, 0.6, 0.9],
                alloc::vec![0.0, 0.0, 0.9, 0.1, 0.2, 0.3],
            ]),
            h: 1e-4,
            tol: 1e-9,
            exclusion: None,
        };
        let report = verify_gluing(&plan, JacobianMode::Analytic).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);
    }

    #[test]
    fn gluing_finite_difference_scales_with_h() {
        let points = alloc::vec![alloc::vec![0.2, 0.1, 0.8, 0.25, 0.5, 0.75]];
        let coarse = SamplePlan {
            points: PlanPoints::Explicit(points.clone()),
            h: 1e-2,
            tol: 1.0,
            exclusion: None,
        };
        let fine = SamplePlan {
            points: PlanPoints::Explicit(points),
            h: 1e-3,
            tol: 1.0,
            exclusion: None,
        };
        let r_coarse = verify_gluing(&coarse, JacobianMode::FiniteDifference)
            .unwrap()
            .max_residual;
        let r_fine = verify_gluing(&fine, JacobianMode::FiniteDifference)
            .unwrap()
            .max_residual;
        // O(h^2): shrinking h by 10 should shrink the residual by ~100.
        assert!(r_fine < r_coarse / 30.0, "coarse {r_coarse}, fine {r_fine}");
        assert!(r_coarse > 1e-9);
    }

    #[test]
    fn twist_form_integral() {
        let chart = model("glue-target").unwrap();
        let plan = SamplePlan::random(23, 40).with_h(1e-5);
        let report = verify_twist_form(&chart, &plan).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);
        let integral = report.integral.unwrap();
        assert!((integral + 1.0).abs() < 1e-6, "integral {integral}");
        assert_eq!(report.orientation.as_deref(), Some("(r, theta3, theta1)"));
    }

    #[test]
    fn twist_form_on_4d_model() {
        let chart = model("product-surgery-0").unwrap();
        let plan = SamplePlan::random(29, 40).with_h(1e-5);
        let report = verify_twist_form(&chart, &plan).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);
        assert!((report.integral.unwrap() + 1.0).abs() < 1e-6);
    }

    #[test]
    fn moment_conditions_on_product_surgery() {
        let chart = model("product-surgery").unwrap();
        let plan = SamplePlan::random(31, 20);
        let report = verify_moment(&chart, &plan).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);
    }

    #[test]
    fn moment_zero_generator_is_exact() {
        // A trivial generator: everything vanishes identically.
        let mut chart = model("product-surgery").unwrap();
        let m = chart.dim;
        chart.action = Some(super::super::ActionData {
            generators: alloc::vec![super::super::ActionGenerator {
                vector_field: Box::new(move |_p: &[f64]| alloc::vec![c(0.0); m as usize]),
                moment: super::super::ScalarField {
                    eval: Box::new(|_p: &[f64]| c(0.0)),
                    d_analytic: Some(Box::new(move |_p: &[f64]| MultiForm::zero(m))),
                },
                moment_one_form: FormField::of_degree(1, Box::new(move |_p: &[f64]| MultiForm::zero(m)))
                    .with_d(Box::new(move |_p: &[f64]| MultiForm::zero(m))),
            }],
        });
        let plan = SamplePlan::random(37, 5);
        let report = verify_moment(&chart, &plan).unwrap();
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn moment_symplectic_classical() {
        // Pure symplectic check: J from omega alone, alpha = 0, H = 0.
        let mut chart = model("product-surgery").unwrap();
        let omega_eval: Box<dyn Fn(&[f64]) -> MultiForm<Cf64> + Send + Sync> =
            Box::new(|p: &[f64]| {
                let denom = 1.0 + p[0] * p[0] + p[1] * p[1];
                MultiForm::monomial(6, &[1, 2], c(4.0 / (denom * denom)))
                    .add(&MultiForm::monomial(6, &[3, 4], c(p[2])))
                    .unwrap()
                    .add(&MultiForm::monomial(6, &[5, 6], c(1.0)))
                    .unwrap()
            });
        chart.add_structure_field(
            "J",
            Box::new(move |p: &[f64]| {
                crate::gclin::j_symplectic(&omega_eval(p), 1e-9).map_err(ChartError::Gclin)
            }),
        );
        chart.add_form_field(
            "H",
            FormField::of_degree(3, Box::new(|_p: &[f64]| MultiForm::zero(6))),
        );
        let plan = SamplePlan::random(41, 15);
        let report = verify_moment(&chart, &plan).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);
    }
}
