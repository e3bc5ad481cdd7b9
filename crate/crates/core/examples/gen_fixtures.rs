//! Regenerates the bundled Maass form fixtures for PSL(2, Z).
//!
//! Coefficients come from a Hejhal-style collocation solve: the Fourier
//! expansion on a horocycle `Im z = Y` is matched against its values at the
//! pulled-back points in the fundamental domain. The spectral parameter is
//! refined by a secant iteration on the Hecke relation `c_2 c_3 = c_6`.
//!
//! Usage: `cargo run --release --example gen_fixtures [out_dir]`

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use periodlab::maass_forms::{fixture_dir, scalar_form};
use periodlab::special_functions::bessel_k;
use periodlab::Complex64;

#[derive(Clone, Copy)]
struct Setup {
    odd: bool,
    m: usize,
    y: f64,
}

fn pullback(mut x: f64, mut y: f64) -> (f64, f64) {
    loop {
        x -= x.round();
        let r2 = x * x + y * y;
        if r2 >= 1.0 - 1e-15 {
            return (x, y);
        }
        x = -x / r2;
        y /= r2;
    }
}

fn k(r: f64, x: f64) -> f64 {
    bessel_k(Complex64::new(0.0, r), x).expect("K-Bessel").re
}

fn basis(odd: bool, n: usize, x: f64) -> f64 {
    let a = 2.0 * PI * n as f64 * x;
    if odd {
        a.sin()
    } else {
        a.cos()
    }
}

/// Coefficients `c_1 = 1, c_2, ..., c_M` at spectral parameter `r`.
fn solve(r: f64, s: Setup) -> Vec<f64> {
    let m = s.m;
    let q = m + 20;
    let pts: Vec<(f64, f64, f64)> = (1..=q)
        .map(|j| {
            let x = (j as f64 - 0.5) / (2.0 * q as f64);
            let (xs, ys) = pullback(x, s.y);
            (x, xs, ys)
        })
        .collect();
    let sy = s.y.sqrt();
    let ky: Vec<f64> = (1..=m).map(|n| k(r, 2.0 * PI * n as f64 * s.y)).collect();
    // w[j][n-1] = sqrt(y*) K(2 pi n y*) phi_n(x*)
    let w: Vec<Vec<f64>> = pts
        .iter()
        .map(|&(_, xs, ys)| {
            (1..=m)
                .map(|n| ys.sqrt() * k(r, 2.0 * PI * n as f64 * ys) * basis(s.odd, n, xs))
                .collect()
        })
        .collect();
    let mut v = DMatrix::<f64>::zeros(m, m);
    for l in 1..=m {
        for n in 1..=m {
            let mut acc = 0.0;
            for (j, &(x, _, _)) in pts.iter().enumerate() {
                acc += w[j][n - 1] * basis(s.odd, l, x);
            }
            let mut val = 2.0 * acc / q as f64;
            if l == n {
                val -= sy * ky[l - 1];
            }
            v[(l - 1, n - 1)] = val;
        }
    }
    // rows scaled by the size of the Fourier term they determine
    let scale: Vec<f64> = (0..m)
        .map(|l| v.row(l).iter().fold(0.0f64, |a, b| a.max(b.abs())))
        .collect();
    let a = DMatrix::from_fn(m, m - 1, |i, j| v[(i, j + 1)] / scale[i]);
    let b = DVector::from_fn(m, |i, _| -v[(i, 0)] / scale[i]);
    let x = a.svd(true, true).solve(&b, 1e-15).expect("least squares");
    let mut c = vec![1.0];
    c.extend(x.iter());
    c
}

fn hecke(c: &[f64]) -> f64 {
    c[1] * c[2] - c[5]
}

fn refine(r0: f64, s: Setup) -> (f64, Vec<f64>) {
    let mut ra = r0 - 1e-7;
    let mut rb = r0 + 1e-7;
    let mut fa = hecke(&solve(ra, s));
    let mut cb = solve(rb, s);
    let mut fb = hecke(&cb);
    for _ in 0..30 {
        if (rb - ra).abs() < 1e-14 || fb == 0.0 {
            break;
        }
        let rn = rb - fb * (rb - ra) / (fb - fa);
        ra = rb;
        fa = fb;
        rb = rn;
        cb = solve(rb, s);
        fb = hecke(&cb);
    }
    (rb, cb)
}

/// Size of the first dropped Fourier term at height 1/2, relative to the first.
fn truncation(r: f64, keep: usize) -> f64 {
    let y = 0.5;
    let n = keep as f64 + 1.0;
    n.sqrt() * (k(r, 2.0 * PI * n * y) / k(r, 2.0 * PI * y)).abs()
}

fn accuracy(r: f64, s: Setup, c: &[f64]) -> f64 {
    let alt = solve(r, Setup { y: 0.93 * s.y, ..s });
    let n = (s.m / 2).min(25).min(c.len());
    let drift = (0..n).map(|i| (c[i] - alt[i]).abs()).fold(0.0, f64::max);
    let h1 = (c[3] - (c[1] * c[1] - 1.0)).abs();
    let h2 = (c[1] * c[4] - c[9]).abs();
    let h3 = (c[2] * c[2] - 1.0 - c[8]).abs();
    drift.max(h1).max(h2).max(h3)
}

fn main() {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(fixture_dir);
    std::fs::create_dir_all(&out).expect("create fixture dir");
    let jobs = [
        ("even_13", 13.779751351891, Setup { odd: false, m: 70, y: 56.0 / (2.0 * PI * 70.0) }, 60),
        ("even_13_low", 13.779751351891, Setup { odd: false, m: 16, y: 27.0 / (2.0 * PI * 16.0) }, 12),
        ("odd_9", 9.533695261353557, Setup { odd: true, m: 70, y: 56.0 / (2.0 * PI * 70.0) }, 60),
    ];
    for (name, r0, setup, keep) in jobs {
        let (r, c) = refine(r0, setup);
        let acc = accuracy(r, setup, &c).max(truncation(r, keep));
        let kept: Vec<f64> = c.iter().take(keep).cloned().collect();
        let source = format!(
            "Hejhal collocation solve for PSL(2,Z), {} form, M={}, Y={:.6}, R={:.15}, secant on c2*c3=c6, first {} coefficients kept",
            if setup.odd { "odd" } else { "even" },
            setup.m,
            setup.y,
            r,
            keep
        );
        let form = scalar_form(Complex64::new(0.0, r), &kept, setup.odd)
            .expect("valid form")
            .with_source(source, acc);
        let path = out.join(format!("{name}.json"));
        form.save(&path).expect("write fixture");
        println!(
            "{name}: R = {r:.15}, c2 = {:.12}, c3 = {:.12}, accuracy {acc:.2e} -> {}",
            c[1],
            c[2],
            path.display()
        );
    }
}
