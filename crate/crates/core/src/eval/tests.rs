use super::*;
use crate::params::{lift_order, make_zeta_param, tilde_of_cuntz, tilde_of_finite, L2GpParam};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(x: f64) -> Complex64 {
    c(x, 0.0)
}

fn balanced() -> FiniteGpParam<f64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    FiniteGpParam::new(2, 2, vec![r(h), r(h), r(0.0)]).unwrap()
}

fn mono(s: &str) -> Monomial {
    s.parse().unwrap()
}

fn all_monomials(n: usize, max_total: usize) -> Vec<Monomial> {
    let words = MultiIndex::all_up_to(n, max_total);
    let mut out = Vec::new();
    for a in &words {
        for b in &words {
            if a.len() + b.len() <= max_total {
                out.push(Monomial::new(a.clone(), b.clone()));
            }
        }
    }
    out
}

#[test]
fn partial_sums_of_balanced_vector() {
    let p = balanced();
    assert!((z_partial_sum(&p, 0).unwrap() - r(1.0)).norm() < 1e-15);
    assert!((z_partial_sum(&p, 1).unwrap() - r(0.5)).norm() < 1e-15);
    assert_eq!(z_partial_sum(&p, 2).unwrap(), r(0.0));
    assert!(z_partial_sum(&p, 3).is_err());
}

#[test]
fn balanced_moment_table_and_values() {
    let p = balanced();
    let t = moment_table(&p).unwrap();
    let expect_v = [1.0, 0.5, 0.0];
    for (a, e) in expect_v.iter().enumerate() {
        assert!((t.v[a] - r(*e)).norm() < 1e-15);
    }
    let expect_theta = [[1.0, 0.5], [0.5, 0.5]];
    for a in 0..2 {
        for b in 0..2 {
            assert!((t.theta(a, b) - r(expect_theta[a][b])).norm() < 1e-15);
        }
    }
    let s = GpState::Finite(p.clone());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((evaluate_monomial(&s, &mono("s1"), 1e-12).unwrap() - r(h)).norm() < 1e-15);
    assert!((evaluate_monomial(&s, &mono("s2 s1"), 1e-12).unwrap() - r(h)).norm() < 1e-15);
    assert!((evaluate_monomial(&s, &mono("s2"), 1e-12).unwrap() - r(0.5)).norm() < 1e-15);
    assert!(evaluate_monomial(&s, &mono("s2 s2"), 1e-12).unwrap().norm() < 1e-15);
    assert!((evaluate_monomial(&s, &Monomial::identity(), 1e-12).unwrap() - r(1.0)).norm() < 1e-15);
    assert_eq!(correlation_dimension(&p).unwrap(), 2);
}

#[test]
fn order_one_uses_cuntz_formula() {
    let p = FiniteGpParam::new(2, 1, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
    let t = moment_table(&p).unwrap();
    assert_eq!(t.theta, vec![vec![r(1.0)]]);
    assert_eq!(t.v, vec![r(1.0), c(0.0, -0.8)]);
    let s = GpState::Finite(p);
    let v = evaluate_monomial(&s, &mono("s1 s2 s2*"), 0.0).unwrap();
    assert!((v - c(0.6, 0.0) * c(0.0, -0.8) * c(0.0, 0.8)).norm() < 1e-15);
}

#[test]
fn boundary_and_near_boundary_refused() {
    let p = FiniteGpParam::new(2, 2, vec![r(0.0), r(0.0), r(1.0)]).unwrap();
    assert!(matches!(moment_table(&p), Err(Error::Boundary)));
    let t: f64 = 1.0 - 5e-9;
    let p = FiniteGpParam::new(2, 2, vec![r((1.0 - t * t).sqrt()), r(0.0), r(t)]).unwrap();
    assert!(matches!(moment_table(&p), Err(Error::NearBoundary { .. })));
}

#[test]
fn cuntz_equivalent_lift_has_rank_one() {
    let y = CuntzParam::new(2, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
    let (y1, y2) = (y.y()[0], y.y()[1]);
    let z = FiniteGpParam::new(2, 2, vec![y1, y2 * y1, y2 * y2]).unwrap();
    assert_eq!(correlation_dimension(&z).unwrap(), 1);
}

#[test]
fn geometric_from_cuntz_matches_cuntz_closed_form() {
    let y = CuntzParam::normalized(3, vec![c(0.3, 0.4), c(-0.5, 0.1), c(0.2, -0.3)]).unwrap();
    let inf = GpState::Infinite(tilde_of_cuntz(&y).unwrap());
    let cz = GpState::Cuntz(y);
    let a = StateEvaluator::new(&inf, 1e-12).unwrap();
    let b = StateEvaluator::new(&cz, 1e-12).unwrap();
    for m in all_monomials(3, 6) {
        assert!(
            (a.monomial(&m).unwrap() - b.monomial(&m).unwrap()).norm() < 1e-12,
            "{m}"
        );
    }
}

#[test]
fn explicit_family_reports_loose_tail() {
    let p = L2GpParam::explicit(2, vec![r(0.6), r(0.0)], 0.64).unwrap();
    let s = GpState::Infinite(p);
    assert!(matches!(
        evaluate_monomial(&s, &mono("s2"), 1e-9),
        Err(Error::TailBoundTooLoose { .. })
    ));
    assert!((evaluate_monomial(&s, &mono("s1"), 1e-9).unwrap() - r(0.6)).norm() < 1e-15);
    let tight = L2GpParam::explicit(2, vec![r(0.6), r(0.8)], 0.0).unwrap();
    let s = GpState::Infinite(tight);
    assert!((evaluate_monomial(&s, &mono("s2"), 1e-9).unwrap() - r(0.48)).norm() < 1e-15);
}

#[test]
fn zeta_state_defining_values() {
    let k = make_zeta_param(2.0_f64).unwrap();
    let s = GpState::Infinite(k.clone());
    let e = StateEvaluator::new(&s, 1e-10).unwrap();
    assert!((e.monomial(&mono("s1")).unwrap() - k.coord(1)).norm() < 1e-15);
    assert!((e.monomial(&mono("s2 s2 s1")).unwrap() - k.coord(3)).norm() < 1e-15);
    assert!((e.monomial(&Monomial::identity()).unwrap() - r(1.0)).norm() < 1e-10);
    // ω(s_2) = Σ z_{j+1} z_j
    let direct: f64 = (1..200_000)
        .map(|j| k.coord(j).re * k.coord(j + 1).re)
        .sum();
    let v = e.monomial(&mono("s2")).unwrap();
    assert!((v.re - direct).abs() < 1e-5 && v.re > direct);
}

#[test]
fn t_of_z_evaluates_to_one() {
    let p = balanced();
    let emb = p.embedding();
    let t = emb.linear_combination(p.z()).unwrap();
    let image = emb.expand_poly(&t).unwrap();
    let v = evaluate_poly(&GpState::Finite(p), &image, 1e-12).unwrap();
    assert!((v - r(1.0)).norm() < 1e-14);
}

#[test]
fn moment_matrix_examples() {
    let s = GpState::Finite(balanced());
    let one = moment_matrix(&s, &[MultiIndex::empty()], 0.0).unwrap();
    assert!((one[0][0] - r(1.0)).norm() < 1e-15);
    let words = [MultiIndex::empty(), MultiIndex::from([2])];
    let m = moment_matrix(&s, &words, 0.0).unwrap();
    let t = moment_table(&balanced()).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            assert!((m[a][b] - t.theta(a, b)).norm() < 1e-15);
        }
    }
}

#[test]
fn covariance_identity_is_exact() {
    let s = GpState::Finite(balanced());
    let id = SquareMatrix::identity(1);
    for m in all_monomials(2, 4) {
        assert!(covariance_check(&s, &id, &m, 1e-12).unwrap() < 1e-15);
    }
}

#[test]
fn mixture_and_flip() {
    let p = FiniteGpParam::new(2, 3, vec![r(0.0), r(0.0), r(0.0), c(0.0, 1.0)]).unwrap();
    let comps = crate::params::decompose_mixture(&p).unwrap();
    let w = vec![1.0 / 3.0; 3];
    let v = evaluate_mixture(&comps, &w, &mono("s2 s2 s2")).unwrap();
    assert!((v - c(0.0, -1.0)).norm() < 1e-12);
    assert!(evaluate_mixture(&comps, &w, &mono("s2 s1")).unwrap().norm() < 1e-12);

    // flipped state: η_z(f'(t_j)) = conj(z_j) with f' = (s1 s1, s1 s2, s2)
    let z = vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.4, -0.6)];
    let nz = crate::scalar::vec_norm(&z);
    let z: Vec<Complex64> = z.into_iter().map(|x| x / nz).collect();
    let images = crate::embedding::flipped_gp_images(2).unwrap();
    for (j, w) in images.iter().enumerate() {
        let v = evaluate_flipped(2, &z, &Monomial::word(w.clone()), 1e-12).unwrap();
        assert!((v - z[j].conj()).norm() < 1e-14);
    }
}

fn arb_param(max_last: f64) -> impl Strategy<Value = FiniteGpParam<f64>> {
    (2usize..4, 1usize..5)
        .prop_flat_map(move |(n, k)| {
            let m = (n - 1) * k + 1;
            (
                Just(n),
                Just(k),
                prop::collection::vec(-1.0f64..1.0, 2 * m),
                0.0f64..max_last,
            )
        })
        .prop_filter_map("nonzero head", |(n, k, raw, mag)| {
            let m = (n - 1) * k + 1;
            let mut v: Vec<Complex64> = (0..m - 1).map(|i| c(raw[2 * i], raw[2 * i + 1])).collect();
            let hn = crate::scalar::vec_norm(&v);
            if hn < 1e-2 {
                return None;
            }
            let s = (1.0 - mag * mag).sqrt() / hn;
            v.iter_mut().for_each(|x| *x *= s);
            v.push(Complex64::from_polar(mag, raw[2 * m - 1] * 3.0));
            FiniteGpParam::new(n, k, v).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_state_equals_tilde_state(p in arb_param(0.95)) {
        // Same state computed through the ℓ² shifted sums instead of Θ.
        let fin = StateEvaluator::new(&GpState::Finite(p.clone()), 1e-12).unwrap();
        let inf = StateEvaluator::new(&GpState::Infinite(tilde_of_finite(&p).unwrap()), 1e-12).unwrap();
        for m in all_monomials(p.n(), 4) {
            let a = fin.monomial(&m).unwrap();
            let b = inf.monomial(&m).unwrap();
            prop_assert!((a - b).norm() < 1e-9, "{} {} {}", m, a, b);
        }
    }

    #[test]
    fn hermitian_and_defining_equations(p in arb_param(0.95)) {
        let s = GpState::Finite(p.clone());
        let e = StateEvaluator::new(&s, 1e-12).unwrap();
        for m in all_monomials(p.n(), 4) {
            let a = e.monomial(&m.adjoint()).unwrap();
            let b = e.monomial(&m).unwrap().conj();
            prop_assert!((a - b).norm() < 1e-12);
        }
        let emb = p.embedding();
        for j in 1..=p.m() {
            let w = Monomial::word(emb.generator_image(j).unwrap());
            let v = e.monomial(&w).unwrap();
            prop_assert!((v - p.coord(j).conj()).norm() < 1e-12);
            // ‖π(f(t_j))*Ω - z_j Ω‖² = ω(f(t_j) f(t_j)*) - |z_j|²
            let ww = Monomial::new(w.left.clone(), w.left.clone());
            let defect = e.monomial(&ww).unwrap().re - p.coord(j).norm_sqr();
            prop_assert!(defect.abs() < 1e-9);
        }
        let t = moment_table(&p).unwrap();
        prop_assert!((t.theta(0, 0) - r(1.0)).norm() < 1e-12);
        prop_assert!((t.v[0] - r(1.0)).norm() < 1e-12);
        prop_assert!(t.spectrum()[0] >= -1e-9);
        prop_assert!(correlation_dimension(&p).unwrap() <= p.k());
    }

    #[test]
    fn lift_preserves_values(p in arb_param(0.9), q in 2usize..3) {
        let l = lift_order(&p, p.k() * q).unwrap();
        let a = StateEvaluator::new(&GpState::Finite(p.clone()), 1e-12).unwrap();
        let b = StateEvaluator::new(&GpState::Finite(l), 1e-12).unwrap();
        for m in all_monomials(p.n(), 4) {
            prop_assert!((a.monomial(&m).unwrap() - b.monomial(&m).unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn covariance_holds(p in arb_param(0.9), t in 0.0f64..6.3, ph in 0.0f64..6.3) {
        let g = if p.n() == 2 {
            SquareMatrix::from_rows(vec![vec![Complex64::from_polar(1.0, ph)]]).unwrap()
        } else {
            SquareMatrix::from_rows(vec![
                vec![Complex64::from_polar(t.cos(), ph), r(t.sin())],
                vec![-r(t.sin()), Complex64::from_polar(t.cos(), -ph)],
            ]).unwrap()
        };
        prop_assume!(p.n() <= 3);
        let s = GpState::Finite(p.clone());
        for m in all_monomials(p.n(), 3) {
            prop_assert!(covariance_check(&s, &g, &m, 1e-12).unwrap() < 1e-8);
        }
        let inf = GpState::Infinite(tilde_of_finite(&p).unwrap());
        for m in all_monomials(p.n(), 3) {
            prop_assert!(covariance_check(&inf, &g, &m, 1e-12).unwrap() < 1e-8);
        }
    }
}
