//! The built-in coordinate models: the type-jumping spinor on the disc
//! times a torus, the B-symplectic annulus, the gluing source/target
//! annuli (with a round-sphere base factor), and the surgery product
//! charts carrying the torus action.
//!
//! Conventions fixed here: all angles have unit period, `z1 = x1 + i y1`,
//! `dz2 = dtheta2 + i dtheta3`, the gluing radius is `1/sqrt(e)`, and the
//! bump profile defaults to plateaus at `r0 = 1`, `r1 = 1.5`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::form::MultiForm;
use crate::gclin::{b_transform_j, j_symplectic};
use crate::linalg::Mat;
use crate::scalar::Cf64;

use super::{
    ActionData, ActionGenerator, BumpProfile, Chart, ChartError, ChartMap, Coordinate, FormField,
    ScalarField,
};

fn c(x: f64) -> Cf64 {
    Cf64::new(x, 0.0)
}

fn mono(dim: u8, idx: &[u8], coeff: Cf64) -> MultiForm<Cf64> {
    MultiForm::monomial(dim, idx, coeff)
}

fn zero_form(dim: u8, degree: u32) -> FormField {
    FormField::of_degree(degree, Box::new(move |_p: &[f64]| MultiForm::zero(dim)))
        .with_d(Box::new(move |_p: &[f64]| MultiForm::zero(dim)))
}

/// Construct a named model chart.
///
/// Names: `cgu-model`, `b-symplectic`, `glue-source`, `glue-target`,
/// `product-surgery` (= `product-surgery-2`), `product-surgery-0`.
pub fn model(name: &str) -> Result<Chart, ChartError> {
    match name {
        "cgu-model" => Ok(cgu_model()),
        "b-symplectic" => Ok(b_symplectic()),
        "glue-source" => Ok(glue_source()),
        "glue-target" => Ok(glue_target(false)),
        "product-surgery" | "product-surgery-2" => Ok(glue_target(true)),
        "product-surgery-0" => Ok(product_surgery_4d()),
        other => Err(ChartError::UnknownModel(String::from(other))),
    }
}

pub const GLUING_RADIUS: f64 = 0.606_530_659_712_633_4; // 1/sqrt(e)

/// Type-jumping model on the unit disc times T^2, in coordinates
/// `(x1, y1, theta2, theta3)` with `z1 = x1 + i y1`. The spinor is
/// `rho = z1 + dz1 ^ dz2`; away from `z1 = 0` the fields `B`, `gamma`
/// give the same structure as the B-transform of `gamma`.
fn cgu_model() -> Chart {
    let coords = vec![
        Coordinate::linear("x1", (-0.68, 0.68)),
        Coordinate::linear("y1", (-0.68, 0.68)),
        Coordinate::periodic_unit("theta2"),
        Coordinate::periodic_unit("theta3"),
    ];
    let mut chart = Chart::new(
        "cgu-model",
        coords,
        Box::new(|p: &[f64]| p[0] * p[0] + p[1] * p[1] < 1.0),
    );

    // rho = z1 + dz1 ^ dz2, dz1 = e1 + i e2, dz2 = e3 + i e4.
    let dz1 = MultiForm::one_form(&[c(1.0), Cf64::i(), c(0.0), c(0.0)]);
    let dz2 = MultiForm::one_form(&[c(0.0), c(0.0), c(1.0), Cf64::i()]);
    let top = dz1.wedge(&dz2).expect("same dim");
    chart.add_form_field(
        "rho",
        FormField {
            degree: None,
            eval: Box::new(move |p: &[f64]| {
                MultiForm::scalar(4, Cf64::new(p[0], p[1])).add(&top).expect("same dim")
            }),
            // d rho = dz1, constant.
            d_analytic: Some(Box::new(move |_p: &[f64]| {
                MultiForm::one_form(&[c(1.0), Cf64::i(), c(0.0), c(0.0)])
            })),
        },
    );

    // B = dlog r ^ dtheta2 - dtheta1 ^ dtheta3 in Cartesian coordinates:
    // dlog r = (x dx + y dy)/r^2, dtheta1 = (x dy - y dx)/r^2. Closed.
    chart.add_form_field(
        "B",
        FormField::of_degree(
            2,
            Box::new(|p: &[f64]| {
                let (x, y) = (p[0], p[1]);
                let r2 = x * x + y * y;
                let dlog = MultiForm::one_form(&[c(x / r2), c(y / r2), c(0.0), c(0.0)]);
                let dth1 = MultiForm::one_form(&[c(-y / r2), c(x / r2), c(0.0), c(0.0)]);
                let e3 = MultiForm::basis(4, 3);
                let e4 = MultiForm::basis(4, 4);
                dlog.wedge(&e3)
                    .and_then(|a| dth1.wedge(&e4).map(|b| (a, b)))
                    .and_then(|(a, b)| a.sub(&b))
                    .expect("same dim")
            }),
        )
        .with_d(Box::new(|_p: &[f64]| MultiForm::zero(4))),
    );

    // gamma = dlog r ^ dtheta3 + dtheta1 ^ dtheta2. Closed, symplectic
    // away from the axis.
    chart.add_form_field(
        "gamma",
        FormField::of_degree(
            2,
            Box::new(|p: &[f64]| {
                let (x, y) = (p[0], p[1]);
                let r2 = x * x + y * y;
                let dlog = MultiForm::one_form(&[c(x / r2), c(y / r2), c(0.0), c(0.0)]);
                let dth1 = MultiForm::one_form(&[c(-y / r2), c(x / r2), c(0.0), c(0.0)]);
                let e3 = MultiForm::basis(4, 3);
                let e4 = MultiForm::basis(4, 4);
                dlog.wedge(&e4)
                    .and_then(|a| dth1.wedge(&e3).map(|b| (a, b)))
                    .and_then(|(a, b)| a.add(&b))
                    .expect("same dim")
            }),
        )
        .with_d(Box::new(|_p: &[f64]| MultiForm::zero(4))),
    );

    chart.add_form_field("H", zero_form(4, 3));

    chart.add_exclusion(
        "type-jump-locus",
        Box::new(|p: &[f64]| p[0] * p[0] + p[1] * p[1] <= 0.01),
    );
    chart
}

/// The B-symplectic annulus in polar coordinates `(r, theta1, theta2,
/// theta3)`, unit periods: `B = dlog r ^ dtheta2 - dtheta1 ^ dtheta3`,
/// `gamma = dlog r ^ dtheta3 + dtheta1 ^ dtheta2`, spinor `e^{B + i gamma}`.
fn b_symplectic() -> Chart {
    let coords = vec![
        Coordinate::linear("r", (0.15, 0.9)),
        Coordinate::periodic_unit("theta1"),
        Coordinate::periodic_unit("theta2"),
        Coordinate::periodic_unit("theta3"),
    ];
    let mut chart = Chart::new(
        "b-symplectic",
        coords,
        Box::new(|p: &[f64]| p[0] > 0.0 && p[0] < 1.0),
    );

    let b_at = |r: f64| -> MultiForm<Cf64> {
        // (1/r) e1^e3 - e2^e4
        mono(4, &[1, 3], c(1.0 / r))
            .sub(&mono(4, &[2, 4], c(1.0)))
            .expect("same dim")
    };
    let gamma_at = |r: f64| -> MultiForm<Cf64> {
        // (1/r) e1^e4 + e2^e3
        mono(4, &[1, 4], c(1.0 / r))
            .add(&mono(4, &[2, 3], c(1.0)))
            .expect("same dim")
    };

    chart.add_form_field(
        "B",
        FormField::of_degree(2, Box::new(move |p: &[f64]| b_at(p[0])))
            .with_d(Box::new(|_p: &[f64]| MultiForm::zero(4))),
    );
    chart.add_form_field(
        "gamma",
        FormField::of_degree(2, Box::new(move |p: &[f64]| gamma_at(p[0])))
            .with_d(Box::new(|_p: &[f64]| MultiForm::zero(4))),
    );
    chart.add_form_field(
        "phi",
        FormField {
            degree: None,
            eval: Box::new(move |p: &[f64]| {
                let exponent = b_at(p[0])
                    .add(&gamma_at(p[0]).scale(&Cf64::i()))
                    .expect("same dim");
                exponent.exp_form().expect("degree 2")
            }),
            d_analytic: None,
        },
    );
    chart.add_form_field("H", zero_form(4, 3));
    chart
}

/// Round-sphere area form in stereographic coordinates, as the first two
/// legs of an `m`-dimensional chart.
fn sphere_area(m: u8, a1: f64, a2: f64) -> MultiForm<Cf64> {
    let denom = 1.0 + a1 * a1 + a2 * a2;
    mono(m, &[1, 2], c(4.0 / (denom * denom)))
}

/// Gluing source: `A x (annulus) x T^2` in coordinates
/// `(a1, a2, r, theta1, theta2, theta3)`, `r` between the gluing radius
/// and 1, with `alpha = pi* sigma + gamma` and spinor `e^{B + i alpha}`.
fn glue_source() -> Chart {
    let coords = vec![
        Coordinate::linear("a1", (-1.2, 1.2)),
        Coordinate::linear("a2", (-1.2, 1.2)),
        Coordinate::linear("r", (GLUING_RADIUS + 0.012, 0.985)),
        Coordinate::periodic_unit("theta1"),
        Coordinate::periodic_unit("theta2"),
        Coordinate::periodic_unit("theta3"),
    ];
    let mut chart = Chart::new(
        "glue-source",
        coords,
        Box::new(|p: &[f64]| {
            p[2] > GLUING_RADIUS && p[2] < 1.0 && p[0] * p[0] + p[1] * p[1] < 9.0
        }),
    );

    // gamma = dlog r ^ dtheta3 + dtheta1 ^ dtheta2 = (1/r) e3^e6 + e4^e5.
    let gamma_at = |r: f64| -> MultiForm<Cf64> {
        mono(6, &[3, 6], c(1.0 / r))
            .add(&mono(6, &[4, 5], c(1.0)))
            .expect("same dim")
    };
    // B = dlog r ^ dtheta2 - dtheta1 ^ dtheta3 = (1/r) e3^e5 - e4^e6.
    let b_at = |r: f64| -> MultiForm<Cf64> {
        mono(6, &[3, 5], c(1.0 / r))
            .sub(&mono(6, &[4, 6], c(1.0)))
            .expect("same dim")
    };
    let alpha_at = move |p: &[f64]| -> MultiForm<Cf64> {
        sphere_area(6, p[0], p[1]).add(&gamma_at(p[2])).expect("same dim")
    };

    chart.add_form_field(
        "sigma",
        FormField::of_degree(2, Box::new(|p: &[f64]| sphere_area(6, p[0], p[1])))
            .with_d(Box::new(|_p: &[f64]| MultiForm::zero(6))),
    );
    chart.add_form_field(
        "gamma",
        FormField::of_degree(2, Box::new(move |p: &[f64]| gamma_at(p[2])))
            .with_d(Box::new(|_p: &[f64]| MultiForm::zero(6))),
    );
    chart.add_form_field(
        "B",
        FormField::of_degree(2, Box::new(move |p: &[f64]| b_at(p[2])))
            .with_d(Box::new(|_p: &[f64]| MultiForm::zero(6))),
    );
    chart.add_form_field(
        "alpha",
        FormField::of_degree(2, Box::new(move |p: &[f64]| alpha_at(p)))
            .with_d(Box::new(|_p: &[f64]| MultiForm::zero(6))),
    );
    chart.add_form_field(
        "phi",
        FormField {
            degree: None,
            eval: Box::new(move |p: &[f64]| {
                let exponent = b_at(p[2])
                    .add(&alpha_at(p).scale(&Cf64::i()))
                    .expect("same dim");
                exponent.exp_form().expect("degree 2")
            }),
            d_analytic: None,
        },
    );
    chart.add_form_field("H", zero_form(6, 3));
    chart
}

/// Gluing target / surgery product: `A x D' x T^2` in coordinates
/// `(a1, a2, r, theta1, theta2, theta3)` with
/// `omega = pi* sigma + r dr ^ dtheta1 + dtheta2 ^ dtheta3`, the extension
/// `Btilde = f(r) (r dr ^ dtheta2 - dtheta1 ^ dtheta3)`, and
/// `H = d Btilde = -f'(r) dr ^ dtheta1 ^ dtheta3`.
///
/// `with_action` additionally registers the rank-1 rotation action on the
/// sphere factor with its height moment map.
fn glue_target(with_action: bool) -> Chart {
    let bump = BumpProfile { r0: 1.0, r1: 1.5 };
    let coords = vec![
        Coordinate::linear("a1", (-1.2, 1.2)),
        Coordinate::linear("a2", (-1.2, 1.2)),
        Coordinate::linear("r", (0.08, 1.92)),
        Coordinate::periodic_unit("theta1"),
        Coordinate::periodic_unit("theta2"),
        Coordinate::periodic_unit("theta3"),
    ];
    let name = if with_action { "product-surgery" } else { "glue-target" };
    let mut chart = Chart::new(
        name,
        coords,
        Box::new(|p: &[f64]| p[2] > 0.0 && p[2] < 2.0 && p[0] * p[0] + p[1] * p[1] < 9.0),
    );
    chart.bump = Some(bump);

    let omega_at = |p: &[f64]| -> MultiForm<Cf64> {
        sphere_area(6, p[0], p[1])
            .add(&mono(6, &[3, 4], c(p[2])))
            .and_then(|f| f.add(&mono(6, &[5, 6], c(1.0))))
            .expect("same dim")
    };
    let btilde_at = move |r: f64| -> MultiForm<Cf64> {
        let f = bump.value(r);
        mono(6, &[3, 5], c(f * r))
            .sub(&mono(6, &[4, 6], c(f)))
            .expect("same dim")
    };
    let h_at = move |r: f64| -> MultiForm<Cf64> { mono(6, &[3, 4, 6], c(-bump.derivative(r))) };

    chart.add_form_field(
        "omega",
        FormField::of_degree(2, Box::new(omega_at))
            .with_d(Box::new(|_p: &[f64]| MultiForm::zero(6))),
    );
    chart.add_form_field(
        "Btilde",
        FormField::of_degree(2, Box::new(move |p: &[f64]| btilde_at(p[2])))
            .with_d(Box::new(move |p: &[f64]| h_at(p[2]))),
    );
    chart.add_form_field(
        "H",
        FormField::of_degree(3, Box::new(move |p: &[f64]| h_at(p[2])))
            .with_d(Box::new(|_p: &[f64]| MultiForm::zero(6))),
    );
    chart.add_form_field(
        "phi",
        FormField {
            degree: None,
            eval: Box::new(move |p: &[f64]| {
                let exponent = btilde_at(p[2])
                    .add(&omega_at(p).scale(&Cf64::i()))
                    .expect("same dim");
                exponent.exp_form().expect("degree 2")
            }),
            d_analytic: None,
        },
    );

    // The pointwise structure: the Btilde-shear of the symplectic J.
    chart.add_structure_field(
        "J",
        Box::new(move |p: &[f64]| {
            let omega = omega_at(p);
            let j = j_symplectic(&omega, super::DEFAULT_RANK_TOL).map_err(ChartError::Gclin)?;
            b_transform_j(&j, &btilde_at(p[2]), 1e-7).map_err(ChartError::Gclin)
        }),
    );

    if with_action {
        chart.action = Some(ActionData { generators: vec![sphere_rotation_generator(6)] });
    }
    chart
}

/// Rotation of the stereographic sphere factor about its axis: vector
/// field `-a2 d_1 + a1 d_2`, moment `2/(1 + |a|^2)`, zero moment one-form.
fn sphere_rotation_generator(m: u8) -> ActionGenerator {
    ActionGenerator {
        vector_field: Box::new(move |p: &[f64]| {
            let mut v = vec![c(0.0); m as usize];
            v[0] = c(-p[1]);
            v[1] = c(p[0]);
            v
        }),
        moment: ScalarField {
            eval: Box::new(|p: &[f64]| c(2.0 / (1.0 + p[0] * p[0] + p[1] * p[1]))),
            d_analytic: Some(Box::new(move |p: &[f64]| {
                let denom = 1.0 + p[0] * p[0] + p[1] * p[1];
                let scale = -4.0 / (denom * denom);
                let mut coeffs = vec![c(0.0); m as usize];
                coeffs[0] = c(scale * p[0]);
                coeffs[1] = c(scale * p[1]);
                MultiForm::one_form(&coeffs)
            })),
        },
        moment_one_form: FormField::of_degree(
            1,
            Box::new(move |_p: &[f64]| MultiForm::zero(m)),
        )
        .with_d(Box::new(move |_p: &[f64]| MultiForm::zero(m))),
    }
}

/// The base surgery piece with a point base: `D' x T^2` in coordinates
/// `(r, theta1, theta2, theta3)`, the 4-dimensional case of the target.
fn product_surgery_4d() -> Chart {
    let bump = BumpProfile { r0: 1.0, r1: 1.5 };
    let coords = vec![
        Coordinate::linear("r", (0.08, 1.92)),
        Coordinate::periodic_unit("theta1"),
        Coordinate::periodic_unit("theta2"),
        Coordinate::periodic_unit("theta3"),
    ];
    let mut chart = Chart::new(
        "product-surgery-0",
        coords,
        Box::new(|p: &[f64]| p[0] > 0.0 && p[0] < 2.0),
    );
    chart.bump = Some(bump);

    let omega_at = |r: f64| -> MultiForm<Cf64> {
        mono(4, &[1, 2], c(r))
            .add(&mono(4, &[3, 4], c(1.0)))
            .expect("same dim")
    };
    let btilde_at = move |r: f64| -> MultiForm<Cf64> {
        let f = bump.value(r);
        mono(4, &[1, 3], c(f * r))
            .sub(&mono(4, &[2, 4], c(f)))
            .expect("same dim")
    };
    let h_at = move |r: f64| -> MultiForm<Cf64> { mono(4, &[1, 2, 4], c(-bump.derivative(r))) };

    chart.add_form_field(
        "omega",
        FormField::of_degree(2, Box::new(move |p: &[f64]| omega_at(p[0])))
            .with_d(Box::new(|_p: &[f64]| MultiForm::zero(4))),
    );
    chart.add_form_field(
        "Btilde",
        FormField::of_degree(2, Box::new(move |p: &[f64]| btilde_at(p[0])))
            .with_d(Box::new(move |p: &[f64]| h_at(p[0]))),
    );
    chart.add_form_field(
        "H",
        FormField::of_degree(3, Box::new(move |p: &[f64]| h_at(p[0])))
            .with_d(Box::new(|_p: &[f64]| MultiForm::zero(4))),
    );
    chart.add_form_field(
        "phi",
        FormField {
            degree: None,
            eval: Box::new(move |p: &[f64]| {
                let exponent = btilde_at(p[0])
                    .add(&omega_at(p[0]).scale(&Cf64::i()))
                    .expect("same dim");
                exponent.exp_form().expect("degree 2")
            }),
            d_analytic: None,
        },
    );
    chart.add_structure_field(
        "J",
        Box::new(move |p: &[f64]| {
            let j = j_symplectic(&omega_at(p[0]), super::DEFAULT_RANK_TOL)
                .map_err(ChartError::Gclin)?;
            b_transform_j(&j, &btilde_at(p[0]), 1e-7).map_err(ChartError::Gclin)
        }),
    );
    chart.action = Some(ActionData { generators: Vec::new() });
    chart
}

/// The gluing diffeomorphism from the source annulus onto the punctured
/// target disc (identity on the sphere factor):
/// `(a, r, t1, t2, t3) -> (a, sqrt(log(e r^2)), t3, t2, -t1)`,
/// with its analytic Jacobian.
pub fn gluing_map() -> ChartMap {
    ChartMap {
        source: String::from("glue-source"),
        target: String::from("glue-target"),
        eval: Box::new(|p: &[f64]| {
            let r = p[2];
            let r_out = Float::sqrt(1.0 + 2.0 * Float::ln(r));
            vec![p[0], p[1], r_out, p[5], p[4], -p[3]]
        }),
        jacobian: Box::new(|p: &[f64]| {
            let r = p[2];
            let r_out = Float::sqrt(1.0 + 2.0 * Float::ln(r));
            let mut jac: Mat<Cf64> = Mat::zeros(6, 6);
            jac[(0, 0)] = c(1.0);
            jac[(1, 1)] = c(1.0);
            jac[(2, 2)] = c(1.0 / (r * r_out));
            jac[(3, 5)] = c(1.0);
            jac[(4, 4)] = c(1.0);
            jac[(5, 3)] = c(-1.0);
            jac
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gclin::{annihilator, type_of};
    use crate::scalar::Scalar;

    #[test]
    fn unknown_model_rejected() {
        assert!(matches!(model("nope"), Err(ChartError::UnknownModel(_))));
    }

    #[test]
    fn cgu_type_jumps_on_locus_only() {
        let chart = model("cgu-model").unwrap();
        let rho_on = chart.eval_form("rho", &[0.0, 0.0, 0.3, 0.7]).unwrap();
        assert_eq!(type_of(&rho_on, chart.rank_tol).unwrap(), 2);
        let rho_off = chart.eval_form("rho", &[0.5, 0.0, 0.3, 0.7]).unwrap();
        assert_eq!(type_of(&rho_off, chart.rank_tol).unwrap(), 0);
    }

    #[test]
    fn cgu_mukai_pairing_nonzero_including_locus() {
        let chart = model("cgu-model").unwrap();
        for p in [[0.0, 0.0, 0.1, 0.9], [0.4, -0.3, 0.2, 0.5], [0.05, 0.05, 0.0, 0.0]] {
            let rho = chart.eval_form("rho", &p).unwrap();
            let pairing = rho.mukai(&rho.conj()).unwrap();
            assert!(pairing.modulus() > 1.0, "pairing {pairing:?} at {p:?}");
        }
    }

    #[test]
    fn bsymplectic_gamma_is_symplectic() {
        let chart = model("b-symplectic").unwrap();
        let gamma = chart.eval_form("gamma", &[0.5, 0.1, 0.2, 0.3]).unwrap();
        let top = gamma.wedge(&gamma).unwrap();
        assert!(top.max_modulus() > 1.0);
    }

    #[test]
    fn rho_equals_scaled_b_spinor_off_locus() {
        // rho = z1 e^{B + i gamma}: same spinor line, same annihilator.
        let chart = model("cgu-model").unwrap();
        let p = [0.4, 0.2, 0.15, 0.85];
        let rho = chart.eval_form("rho", &p).unwrap();
        let b = chart.eval_form("B", &p).unwrap();
        let gamma = chart.eval_form("gamma", &p).unwrap();
        let exponent = b.add(&gamma.scale(&Cf64::i())).unwrap();
        let phi = exponent.exp_form().unwrap();
        let l1 = annihilator(&rho, chart.rank_tol).unwrap();
        let l2 = annihilator(&phi, chart.rank_tol).unwrap();
        assert!(l1.subspace_distance(&l2) < 1e-9);
        // And rho really is z1 * phi.
        let z1 = Cf64::new(p[0], p[1]);
        assert!(rho.sub(&phi.scale(&z1)).unwrap().max_modulus() < 1e-12);
    }

    #[test]
    fn gluing_map_jacobian_matches_numeric() {
        let map = gluing_map();
        let p = [0.3, -0.2, 0.8, 0.1, 0.4, 0.7];
        let analytic = (map.jacobian)(&p);
        let numeric = map.jacobian_numeric(&p, 1e-6);
        let diff = analytic.sub(&numeric).max_modulus();
        assert!(diff < 1e-8, "jacobian mismatch {diff}");
    }

    #[test]
    fn gluing_radius_maps_to_axis() {
        let map = gluing_map();
        let out = (map.eval)(&[0.0, 0.0, GLUING_RADIUS + 1e-12, 0.2, 0.3, 0.4]);
        assert!(out[2] < 1e-5);
        let out = (map.eval)(&[0.0, 0.0, 0.999999, 0.2, 0.3, 0.4]);
        assert!((out[2] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn target_btilde_derivative_is_h() {
        let chart = model("glue-target").unwrap();
        let field = chart.form_field("Btilde").unwrap();
        for r in [0.3, 1.1, 1.25, 1.4, 1.7] {
            let p = [0.2, -0.1, r, 0.3, 0.6, 0.9];
            let numeric = super::super::d_numeric(&chart, field, &p, 1e-5).unwrap();
            let analytic = chart.eval_form("H", &p).unwrap();
            let diff = numeric.sub(&analytic).unwrap().max_modulus();
            assert!(diff < 1e-6, "r={r}: dBtilde vs H diff {diff}");
        }
    }

    #[test]
    fn target_h_vanishes_off_annulus() {
        let chart = model("glue-target").unwrap();
        for r in [0.2, 0.7, 0.99, 1.51, 1.8] {
            let h = chart.eval_form("H", &[0.0, 0.0, r, 0.1, 0.2, 0.3]).unwrap();
            let inside = r > 1.0 && r < 1.5;
            assert_eq!(!h.is_zero(), inside, "H support at r={r}");
        }
    }

    #[test]
    fn four_dim_model_mirrors_target() {
        let chart = model("product-surgery-0").unwrap();
        let h = chart.eval_form("H", &[1.25, 0.1, 0.2, 0.3]).unwrap();
        assert!(h.max_modulus() > 0.0);
        assert_eq!(chart.action.as_ref().unwrap().rank(), 0);
        let j = (chart.structure_field("J").unwrap())(&[0.7, 0.1, 0.2, 0.3]).unwrap();
        assert!(j.j_squared_residual() < 1e-9);
    }
}
