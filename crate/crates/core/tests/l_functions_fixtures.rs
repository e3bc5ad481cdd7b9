use periodlab::l_functions::{fe_check, hat_l_quadrature, hat_l_series};
use periodlab::maass_forms::load_fixture;
use periodlab::representations::Representation;
use periodlab::Complex64;

fn relative_fe(name: &str, s: Complex64, eps: u8) -> f64 {
    let f = load_fixture(name).unwrap();
    let eta = Representation::trivial(1);
    let r = fe_check(&f, &eta, s, eps, 0.3, 12.0).unwrap();
    r.fe_residual.unwrap() / r.scale
}

#[test]
fn functional_equation_on_critical_line() {
    for name in ["even_13", "odd_9"] {
        for eps in [0, 1] {
            for t in [0.0, 1.3] {
                let res = relative_fe(name, Complex64::new(0.5, t), eps);
                assert!(res < 1e-9, "{name} eps={eps} t={t}: {res:e}");
            }
        }
    }
}

#[test]
fn truncated_fixture_has_larger_residual() {
    let s = Complex64::new(0.5, 2.0);
    let good = relative_fe("even_13", s, 0);
    let low = relative_fe("even_13_low", s, 0);
    assert!(low > 10.0 * good, "{low:e} vs {good:e}");
}

#[test]
fn series_and_quadrature_agree() {
    let f = load_fixture("even_13").unwrap();
    let eta = Representation::trivial(1);
    let s = Complex64::new(2.5, 0.7);
    let a = hat_l_series(&f, s, 0, 1e-9).unwrap();
    let b = hat_l_quadrature(&f, &eta, s, 0, 1e-4, 12.0).unwrap();
    let d = (a.value[0] - b.value[0]).norm() / a.value[0].norm();
    assert!(d < 1e-8, "{d:e}");
}
