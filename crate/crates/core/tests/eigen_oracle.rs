//! The dense eigensolver against an independent route: characteristic
//! polynomial by Faddeev–LeVerrier, roots by Aberth iteration, each root
//! polished by Newton on `det(zI - A)` with `d/dz log det = tr((zI - A)⁻¹)`.

use dirac_core::linalg::{eig, CMatrix, Lu};
use dirac_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn char_poly(a: &CMatrix) -> Vec<C64> {
    let n = a.rows();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    let mut m = CMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.matmul(&m);
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        m = next;
        coeffs[n - k] = -a.matmul(&m).trace() / k as f64;
    }
    coeffs
}

fn horner(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

fn aberth(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let radius = 1.0 + c.iter().take(n).map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(c, z[i]);
            let w = p / dp;
            let s: C64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = w / (C64::new(1.0, 0.0) - w * s);
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn polish(a: &CMatrix, mut z: C64) -> C64 {
    let n = a.rows();
    for _ in 0..5 {
        let shifted = CMatrix::from_fn(n, n, |i, j| if i == j { z - a[(i, j)] } else { -a[(i, j)] });
        let Ok(lu) = Lu::new(&shifted) else { break };
        let step = lu.trace_of_inverse().inv();
        z -= step;
        if step.norm() < 1e-16 {
            break;
        }
    }
    z
}

#[test]
fn random_matrices_match_polynomial_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..10 {
        let a = CMatrix::from_fn(8, 8, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let es = eig(&a).unwrap();
        let oracle: Vec<C64> = aberth(&char_poly(&a)).into_iter().map(|z| polish(&a, z)).collect();
        let mut used = [false; 8];
        for lam in &es.values {
            let (k, d) = oracle
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, z)| (k, (z - lam).norm()))
                .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap();
            used[k] = true;
            assert!(d < 1e-10, "trial {trial}: eigenvalue {lam} off by {d}");
        }
        assert!(es.max_residual() < 1e-12, "trial {trial}: residual {}", es.max_residual());
    }
}

#[test]
fn badly_scaled_matrix_is_balanced_before_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 12;
    let a = CMatrix::from_fn(n, n, |i, j| {
        let s = 10f64.powi(i as i32 - j as i32);
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * s
    });
    let es = eig(&a).unwrap();
    let tr: C64 = es.values.iter().sum();
    assert!((tr - a.trace()).norm() < 1e-8 * a.max_abs());
    for k in 0..n {
        assert!(es.residuals[k] < 1e-9 * a.max_abs());
    }
}
