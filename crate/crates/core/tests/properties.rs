use std::collections::BTreeMap;

use dirac_core::basic_equation::{solve, sqrt_branch, SolveOptions};
use dirac_core::coefficients::{eval_s, Series};
use dirac_core::galerkin::spectrum;
use dirac_core::potentials::{classify_symmetry, weighted_norm, SymmetryClass, Weight, SYMMETRY_TOL};
use dirac_core::riesz::reduced_pi;
use dirac_core::{BoundaryCondition, FourierPotential, C64};
use proptest::prelude::*;

fn coeff(max: f64) -> impl Strategy<Value = C64> {
    (-max..max, -max..max).prop_map(|(re, im)| C64::new(re, im))
}

fn even_entries(max: f64) -> impl Strategy<Value = Vec<(i64, C64)>> {
    prop::collection::vec((-3i64..=3, coeff(max)), 1..5)
        .prop_map(|v| v.into_iter().map(|(h, c)| (2 * h, c)).collect())
}

fn small_potential() -> impl Strategy<Value = FourierPotential> {
    (even_entries(0.12), even_entries(0.12))
        .prop_map(|(p, q)| FourierPotential::from_coeffs(&p, &q).unwrap())
        .prop_filter("nonzero", |v| !v.is_zero())
}

proptest! {
    #[test]
    fn weighted_norm_is_absolutely_homogeneous(
        entries in prop::collection::vec((-8i64..=8, coeff(1.0)), 0..10),
        c in coeff(3.0),
        a in 0.0f64..3.0,
    ) {
        let seq: BTreeMap<i64, C64> = entries.iter().copied().collect();
        let scaled: BTreeMap<i64, C64> = seq.iter().map(|(&k, &x)| (k, x * c)).collect();
        let w = Weight::sobolev(a);
        let lhs = weighted_norm(&scaled, &w).unwrap();
        let rhs = c.norm() * weighted_norm(&seq, &w).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn weighted_norm_is_monotone_in_the_weight(
        entries in prop::collection::vec((-6i64..=6, coeff(1.0)), 0..10),
        base in prop::collection::vec(0.1f64..5.0, 7),
        bump in prop::collection::vec(0.0f64..2.0, 7),
    ) {
        let seq: BTreeMap<i64, C64> = entries.iter().copied().collect();
        let small: Vec<(u64, f64)> = base.iter().enumerate().map(|(k, &w)| (k as u64, w)).collect();
        let large: Vec<(u64, f64)> = base.iter().zip(&bump).enumerate().map(|(k, (&w, &d))| (k as u64, w + d)).collect();
        let n_small = weighted_norm(&seq, &Weight::table(&small).unwrap()).unwrap();
        let n_large = weighted_norm(&seq, &Weight::table(&large).unwrap()).unwrap();
        prop_assert!(n_small <= n_large * (1.0 + 1e-15));
    }

    #[test]
    fn conjugate_partner_lands_in_xt(p in even_entries(1.0), t in prop_oneof![-4.0f64..-0.05, 0.05f64..4.0]) {
        let p: Vec<_> = p.into_iter().filter(|(_, c)| c.norm() > 1e-3).collect();
        prop_assume!(!p.is_empty());
        let v = FourierPotential::with_conjugate_partner(&p, t).unwrap();
        match classify_symmetry(&v, SYMMETRY_TOL) {
            SymmetryClass::Xt { t: fitted, residual } => {
                prop_assert!((fitted - t).abs() <= 1e-12 * t.abs());
                prop_assert!(residual <= 1e-14 * v.max_coefficient());
            }
            other => prop_assert!(false, "expected X_t, got {other:?}"),
        }
    }

    #[test]
    fn reduced_pi_is_a_squared_cosine(ln_x in -700.0f64..700.0, ln_y in -700.0f64..700.0, psi in -4.0f64..4.0) {
        let pi = reduced_pi(ln_x, ln_y, psi);
        prop_assert!(pi.is_finite());
        prop_assert!((-1e-15..=1.0 + 1e-12).contains(&pi), "{pi}");
    }

    #[test]
    fn branch_square_roots_square_back(
        distance in 1.5f64..3.0,
        heading in -3.2f64..3.2,
        radius in 0.1f64..1.0,
        turns in 0.1f64..3.0,
        len in 24usize..200,
    ) {
        // Circles that stay clear of the origin, including ones crossing the cut.
        let centre = C64::from_polar(distance, heading);
        let samples: Vec<C64> = (0..len)
            .map(|k| centre + C64::from_polar(radius, turns * std::f64::consts::TAU * k as f64 / len as f64))
            .collect();
        let roots = sqrt_branch(&samples).unwrap();
        for (r, s) in roots.iter().zip(&samples) {
            prop_assert!((r * r - s).norm() <= 1e-12 * s.norm());
        }
        for w in roots.windows(2) {
            prop_assert!((w[1] - w[0]).norm() < (w[1] + w[0]).norm());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn diagonal_terms_agree_order_by_order(v in small_potential(), n in 3i64..9, z in coeff(0.2)) {
        let cv = eval_s(&v, n, z, None, None).unwrap();
        for o in &cv.orders {
            prop_assert!(o.s11.relative_distance(&o.s22) <= 1e-13 || (o.s11.abs() + o.s22.abs()) <= 1e-300);
        }
    }

    #[test]
    fn basic_equation_roots_have_small_residual(v in small_potential(), n in 4i64..10) {
        let roots = solve(n, &Series::new(&v), &SolveOptions::default()).unwrap();
        for (k, z) in [roots.z1, roots.z2].into_iter().enumerate() {
            let cv = eval_s(&v, n, z, None, None).unwrap();
            let bound = 1e-12 * cv.beta_product().abs().max(1.0);
            prop_assert!(roots.residuals[k] <= bound, "{} > {bound}", roots.residuals[k]);
        }
    }

    #[test]
    fn similar_potentials_share_spectra(v in small_potential(), c in prop_oneof![Just(2.0), Just(10.0), Just(-1.0)]) {
        for bc in [BoundaryCondition::PerPlus, BoundaryCondition::PerMinus] {
            let (_, _, a) = spectrum(&v, bc, 6).unwrap();
            let (_, _, b) = spectrum(&v.similarity(C64::new(c, 0.0)), bc, 6).unwrap();
            // Sum and product of each pair stay well conditioned even for
            // near-double eigenvalues, whose individual members do not.
            for (x, y) in a.triples.iter().zip(&b.triples) {
                prop_assert_eq!(x.n, y.n);
                let n = x.n as f64;
                let (sx, sy) = (x.lambda_minus + x.lambda_plus, y.lambda_minus + y.lambda_plus);
                let px = (x.lambda_minus - n) * (x.lambda_plus - n);
                let py = (y.lambda_minus - n) * (y.lambda_plus - n);
                prop_assert!((sx - sy).norm() < 1e-9, "{x:?} {y:?}");
                prop_assert!((px - py).norm() < 1e-9, "{x:?} {y:?}");
            }
        }
    }

    #[test]
    fn positive_xt_spectra_are_real(p in even_entries(0.12), t in 0.2f64..2.0) {
        let v = FourierPotential::with_conjugate_partner(&p, t).unwrap();
        prop_assume!(!v.is_zero());
        for bc in [BoundaryCondition::PerPlus, BoundaryCondition::PerMinus] {
            let (_, _, loc) = spectrum(&v, bc, 6).unwrap();
            for tr in &loc.triples {
                prop_assert!(tr.lambda_minus.im.abs() < 1e-8 && tr.lambda_plus.im.abs() < 1e-8, "{tr:?}");
            }
        }
    }
}
