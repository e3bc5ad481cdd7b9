use periodlab::lewis_transform::{lewis_residual, BoundaryFunction, PeriodEvaluator};
use periodlab::maass_forms::load_fixture;
use periodlab::representations::Representation;
use periodlab::scalar::cvec;
use periodlab::special_functions::c;
use periodlab::transfer_operator::*;
use periodlab::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture_psi(name: &str) -> PeriodEvaluator {
    let form = load_fixture(name).unwrap();
    PeriodEvaluator::from_form(&form, &Representation::trivial(1)).unwrap()
}

fn synthetic_psi(eta: &Representation<Complex64>, nu: Complex64, seed: u64) -> PeriodEvaluator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = BoundaryFunction::random_synthetic(eta, 5, &mut rng).unwrap();
    PeriodEvaluator::from_upper_series(&f, nu, eta).unwrap()
}

fn random_word(rng: &mut ChaCha8Rng) -> SemigroupWord {
    let len = rng.gen_range(0..5);
    let letters: Vec<Generator> = (0..len)
        .map(|_| if rng.gen_bool(0.5) { Generator::T } else { Generator::TPrime })
        .collect();
    SemigroupWord::from_letters(&letters)
}

#[test]
fn fixed_point_of_l0_for_fixtures() {
    for name in ["even_13", "odd_9"] {
        let psi = fixture_psi(name);
        let op = TransferOperator::new(&psi, 4, 0.5).unwrap();
        for x in [0.5, 1.0, 2.0, 0.3] {
            let r = op.residual(x, 1000, TransferKind::L0).unwrap();
            assert!(r.residual_norm < 1e-9, "{name} x = {x}: {:e}", r.residual_norm);
        }
    }
}

#[test]
fn linf_follows_the_minus_argument() {
    let psi = fixture_psi("odd_9");
    let op = TransferOperator::new(&psi, 4, 0.5).unwrap();
    for x in [0.5, 2.0] {
        let good = op.residual(x, 1000, TransferKind::Linf).unwrap();
        let other = op.residual(x, 1000, TransferKind::LinfRemark).unwrap();
        assert!(good.residual_norm < 1e-9);
        assert!(other.residual_norm > 1e-2);
    }
}

#[test]
fn doubling_n_max_stays_within_tail() {
    let psi = fixture_psi("odd_9");
    let op = TransferOperator::new(&psi, 4, 0.5).unwrap();
    for which in [TransferKind::L0, TransferKind::Linf] {
        for x in [0.7, 1.6] {
            let a = op.apply(x, 500, which).unwrap();
            let b = op.apply(x, 1000, which).unwrap();
            assert!(cvec::dist(&a.value, &b.value) <= a.tail, "{which:?} x = {x}");
        }
    }
}

#[test]
fn slash_is_a_right_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sixth = Representation::sixth_root();
    let pair = sixth
        .direct_sum(&Representation::character(0, 4).unwrap())
        .unwrap();
    for (eta, nu) in [(sixth, c(0.2, 0.9)), (pair, c(-0.1, 2.0))] {
        let psi = synthetic_psi(&eta, nu, 3);
        for _ in 0..25 {
            let g1 = random_word(&mut rng);
            let g2 = random_word(&mut rng);
            let z = c(rng.gen_range(0.1..5.0), 0.0);
            let g2m = g2.matrix().clone();
            let inner = PeriodEvaluator::new(nu, &eta, {
                let psi = psi.clone();
                let eta = eta.clone();
                let g1m = g1.matrix().clone();
                move |w| slash(&psi, &eta, nu, &g1m, w)
            });
            let lhs = slash(&inner, &eta, nu, &g2m, z).unwrap();
            let rhs = slash(&psi, &eta, nu, &g1.matrix().mul(&g2m), z).unwrap();
            let d = cvec::dist(&lhs, &rhs);
            assert!(d <= 1e-12 * cvec::norm(&rhs).max(1.0), "{g1} {g2} at {z}: {d:e}");
        }
    }
}

#[test]
fn slash_form_of_lewis_equation() {
    let eta = Representation::sixth_root();
    let nu = c(0.15, 0.6);
    let psi = PeriodEvaluator::new(nu, &eta, |z: Complex64| Ok(vec![(z * 0.3).exp() + z.inv()]));
    let t_inv = eta.rho_t_inv().clone();
    for z in [c(0.4, 0.0), c(1.3, 0.2), c(2.0, -0.7)] {
        let t = slash(&psi, &eta, nu, &Generator::T.matrix(), z).unwrap();
        let tp = slash(&psi, &eta, nu, &Generator::TPrime.matrix(), z).unwrap();
        let lhs = cvec::sub(&cvec::add(&t, &tp), &psi.value(z).unwrap());
        let r = lewis_residual(&psi, &eta, nu, z).unwrap();
        let rhs = cvec::scale(&t_inv.apply(&r), c(-1.0, 0.0));
        assert!(cvec::dist(&lhs, &rhs) < 1e-13 * cvec::norm(&rhs).max(1.0));
    }
}

#[test]
fn continuation_reproduces_psi() {
    let eta = Representation::sixth_root();
    let nu = c(0.25, 1.1);
    let psi = synthetic_psi(&eta, nu, 9);
    for x in [0.3, 1.0, 4.5] {
        let z = c(x, 0.0);
        let base = psi.value(z).unwrap();
        let one = continue_psi(&psi, &eta, nu, z, 1).unwrap();
        assert!(cvec::dist(&one, &base) <= 1e-12 * cvec::norm(&base).max(1.0));
    }
    let psi = fixture_psi("odd_9");
    let triv = Representation::trivial(1);
    for z in [c(0.5, 0.0), c(1.7, 0.0), c(0.9, 0.2)] {
        let scale = cvec::norm(&psi.value(z).unwrap()).max(1.0);
        let mut prev = continue_psi(&psi, &triv, psi.nu(), z, 1).unwrap();
        for n in 2..6 {
            let next = continue_psi(&psi, &triv, psi.nu(), z, n).unwrap();
            assert!(cvec::dist(&prev, &next) <= 1e-8 * scale, "z = {z}, n = {n}");
            prev = next;
        }
    }
}

#[test]
fn continued_fixture_growth_on_rays() {
    let psi = fixture_psi("odd_9");
    let eta = Representation::trivial(1);
    let nu = psi.nu();
    let expo = 2.0 * nu.re + 1.0;
    for sign in [1.0, -1.0] {
        let ray = |r: f64| Complex64::from_polar(r, sign * std::f64::consts::PI / 3.0);
        let small: Vec<f64> = [0.1, 0.03, 0.01]
            .iter()
            .map(|&r| cvec::norm(&continue_psi(&psi, &eta, nu, ray(r), 2).unwrap()))
            .collect();
        let large: Vec<f64> = [10.0f64, 30.0, 100.0]
            .iter()
            .map(|&r| r.powf(expo) * cvec::norm(&continue_psi(&psi, &eta, nu, ray(r), 2).unwrap()))
            .collect();
        let s_max = small.iter().cloned().fold(0.0, f64::max);
        assert!(s_max <= 4.0 * small[0], "O(1) at 0 fails: {small:?}");
        assert!(large[2] <= 4.0 * large[0], "O(|z|^(-2 Re nu - 1)) fails: {large:?}");
    }
}

#[test]
fn l0_residual_tracks_lewis_violation() {
    let psi = fixture_psi("odd_9");
    let eta = Representation::trivial(1);
    let nu = psi.nu();
    let bump = PeriodEvaluator::new(nu, &eta, |_| Ok(vec![c(1.0, 0.0)]));
    let mut ratios = Vec::new();
    for delta in [1e-2, 1e-4, 1e-6] {
        let p = PeriodEvaluator::linear_combination(c(1.0, 0.0), &psi, c(delta, 0.0), &bump).unwrap();
        let op = TransferOperator::new(&p, 4, 0.5).unwrap();
        let l0 = op.residual(1.3, 500, TransferKind::L0).unwrap().residual_norm;
        let lewis = cvec::norm(&lewis_residual(&p, &eta, nu, c(1.3, 0.0)).unwrap());
        assert!(l0 >= 0.1 * delta && lewis >= 0.1 * delta, "delta = {delta}: {l0:e}, {lewis:e}");
        ratios.push(l0 / delta);
    }
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 1.01, "{ratios:?}");
}
