use accelvi::integrators::StopRule;
use accelvi::linalg::{norm, Matrix};
use accelvi::objectives::{make_quadratic, make_rosenbrock, Objective, QuadraticForm};
use accelvi::wwj::{run, run_detailed, solve_subproblem, WwjParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    let m = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0f64..1.0));
    let mut a = m.transpose().matmul(&m).unwrap();
    for i in 0..n {
        a[(i, i)] += 0.05;
    }
    a
}

#[test]
fn newton_matches_closed_form_for_p2() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let n = rng.random_range(1..=6);
        let a = random_spd(&mut rng, n);
        let g: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let params = WwjParams::new(2, 0.5, rng.random_range(0.5..4.0), rng.random_range(0.01..0.5)).unwrap();
        let sol = solve_subproblem(&g, Some(&a), &params, 1).unwrap();
        let s = params.h * params.h / params.n_weight;
        for (di, gi) in sol.d.iter().zip(&g) {
            assert!((di + s * gi).abs() <= 1e-12 * (1.0 + (s * gi).abs()));
        }
    }
}

#[test]
fn cubic_model_is_solved() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let n = rng.random_range(1..=6);
        let a = random_spd(&mut rng, n);
        let g: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let params = WwjParams::new(3, 0.5, 2.0, rng.random_range(0.05..0.5)).unwrap();
        let sol = solve_subproblem(&g, Some(&a), &params, 1).unwrap();
        // stationarity of g·d + ½dᵀAd + (N/3h³)‖d‖³
        let c = params.n_weight / params.h.powi(3);
        let ad = a.mul_vec(&sol.d);
        let r: Vec<f64> = (0..n).map(|i| g[i] + ad[i] + c * norm(&sol.d) * sol.d[i]).collect();
        assert!(norm(&r) <= 1e-9 * norm(&g).max(1.0), "{}", norm(&r));
        assert!(sol.iterations <= 100);
    }
}

#[test]
fn cubic_model_with_indefinite_hessian() {
    let a = Matrix::from_rows(&[vec![-2.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let params = WwjParams::new(3, 0.5, 1.0, 0.2).unwrap();
    let sol = solve_subproblem(&[1e-3, 0.5], Some(&a), &params, 4).unwrap();
    assert!(sol.residual <= 1e-9);
}

#[test]
fn both_orders_converge_on_a_quadratic() {
    let f = make_quadratic(0.5, 5).unwrap();
    let x0 = [1.0; 5];
    let f0 = f.value(&x0);
    for p in [2, 3] {
        let params = WwjParams::new(p, 0.25, 4.0, 0.1).unwrap();
        let (t, res) = run_detailed(&f, &params, &x0, &StopRule::iterations(800)).unwrap();
        assert!(!t.diverged(), "p = {p}");
        assert!(t.last().f < 1e-3 * f0, "p = {p}: {}", t.last().f);
        assert!(res.iter().all(|&r| r <= 1e-8));
        assert_eq!(t.companion_y.as_ref().map(Vec::len), Some(t.records.len()));
    }
}

#[test]
fn rosenbrock_p3_has_small_inner_residuals() {
    let f = make_rosenbrock(2).unwrap();
    let params = WwjParams::new(3, 0.1, 10.0, 0.05).unwrap();
    let (t, res) = run_detailed(&f, &params, &[-1.0, 1.0], &StopRule::iterations(200)).unwrap();
    assert!(!t.diverged());
    assert!(res.iter().all(|&r| r <= 1e-8 * 1e3));
}

#[test]
fn p3_needs_a_hessian() {
    let f = accelvi::objectives::FnObjective::new("no-hessian", 1, |x: &[f64]| x[0] * x[0], |x: &[f64]| vec![2.0 * x[0]]);
    let params = WwjParams::new(3, 0.5, 1.0, 0.1).unwrap();
    assert!(run(&f, &params, &[1.0], &StopRule::iterations(5)).is_err());
    let params = WwjParams::new(2, 0.5, 1.0, 0.1).unwrap();
    assert!(run(&f, &params, &[1.0], &StopRule::iterations(5)).is_ok());
}

#[test]
fn identity_quadratic_from_the_minimiser_stays_put() {
    let f = QuadraticForm::identity(3);
    let params = WwjParams::new(2, 0.5, 1.0, 0.1).unwrap();
    let t = run(&f, &params, &[0.0; 3], &StopRule::iterations(20)).unwrap();
    assert!(t.records.iter().all(|r| r.x == vec![0.0; 3]));
}
