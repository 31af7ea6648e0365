//! Independent oracles: floating-point finite differences for operators in the
//! purely even case, brute-force enumeration for counts, closed forms for
//! orthogonal polynomials.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use superkepler::scalar::GaussianRational;
use superkepler::spectrum;
use superkepler::supercore::{Metric, SuperPolynomial};
use superkepler::superfunctions::{hamiltonian_apply, RadialExpFunction};
use superkepler::superweyl::{OperatorElement, Superspace};
use superkepler::symtensor::{self, SymSpace};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn f(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

fn eval_poly(p: &SuperPolynomial, x: &[f64]) -> (f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    for (m, c) in p.terms() {
        assert_eq!(m.odd.0, 0, "numeric evaluation needs a purely even function");
        let v: f64 = m.even.iter().zip(x).map(|(&e, xi)| xi.powi(e as i32)).product();
        re += f(c.re()) * v;
        im += f(c.im()) * v;
    }
    (re, im)
}

fn eval(func: &RadialExpFunction, x: &[f64]) -> (f64, f64) {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut re = 0.0;
    let mut im = 0.0;
    for (rate, frac) in func.parts() {
        let (a0, b0) = eval_poly(&frac.num0, x);
        let (a1, b1) = eval_poly(&frac.num1, x);
        let w = (-f(rate) * r).exp() / r.powi(frac.denom as i32);
        re += (a0 + a1 * r) * w;
        im += (b0 + b1 * r) * w;
    }
    (re, im)
}

fn numeric_laplacian(func: &RadialExpFunction, x: &[f64]) -> f64 {
    let h = 1e-3;
    let center = eval(func, x).0;
    (0..x.len())
        .map(|i| {
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[i] += h;
            down[i] -= h;
            (eval(func, &up).0 - 2.0 * center + eval(func, &down).0) / (h * h)
        })
        .sum()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-5 * (1.0 + a.abs().max(b.abs()))
}

const POINTS: [[f64; 3]; 3] = [[0.7, -0.4, 1.1], [1.5, 0.3, 0.2], [-0.9, 1.2, -0.6]];

fn samples(sp: &std::sync::Arc<Superspace>) -> Vec<RadialExpFunction> {
    let x = |a| sp.coordinate(a).clone();
    let r = |k| RadialExpFunction::r_power(sp, k);
    vec![
        RadialExpFunction::poly_exp(sp, &x(1) * &x(2), q(1, 1)),
        r(-1),
        RadialExpFunction::poly_exp(sp, &x(3) * &x(3), q(1, 2)).mul(&r(1)),
        RadialExpFunction::exp(sp, q(1, 2)).scale(&GaussianRational::from_int(2)).sub(&RadialExpFunction::exp(sp, q(1, 2)).mul(&r(1))),
        RadialExpFunction::poly_exp(sp, &(&x(1) - &x(3)) * &x(2), q(2, 3)).mul(&r(-2)),
    ]
}

#[test]
fn laplacian_agrees_with_finite_differences() {
    let sp = Superspace::new(Metric::new(3, 0));
    let lap = OperatorElement::laplacian(&sp);
    for func in samples(&sp) {
        let image = func.apply(&lap);
        for x in POINTS {
            let exact = eval(&image, &x).0;
            let numeric = numeric_laplacian(&func, &x);
            assert!(close(exact, numeric), "{func}: {exact} vs {numeric}");
        }
    }
}

#[test]
fn hamiltonian_agrees_with_finite_differences() {
    let sp = Superspace::new(Metric::new(3, 0));
    for func in samples(&sp) {
        let image = hamiltonian_apply(&func).unwrap();
        for x in POINTS {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let numeric = -0.5 * numeric_laplacian(&func, &x) - eval(&func, &x).0 / r;
            assert!(close(eval(&image, &x).0, numeric));
        }
    }
}

#[test]
fn derivatives_and_dilation_agree_numerically() {
    let sp = Superspace::new(Metric::new(3, 0));
    let h = 1e-5;
    for func in samples(&sp) {
        for x in POINTS {
            for a in 1..=3 {
                let mut up = x;
                let mut down = x;
                up[a - 1] += h;
                down[a - 1] -= h;
                let numeric = (eval(&func, &up).0 - eval(&func, &down).0) / (2.0 * h);
                assert!(close(eval(&func.derive(a), &x).0, numeric));
            }
            let lambda = q(5, 3);
            let scaled: Vec<f64> = x.iter().map(|v| v * f(&lambda)).collect();
            assert!(close(eval(&func.dilate(&lambda).unwrap(), &x).0, eval(&func, &scaled).0));
        }
    }
}

#[test]
fn level_states_are_numeric_eigenfunctions() {
    let table = superkepler::dynsym::GeneratorTable::build(3, 0).unwrap();
    for k in 0..=2 {
        let level = spectrum::build_level(k, &table);
        let e = f(&level.energy);
        for psi in spectrum::eigenstates(&level, None).unwrap() {
            // imaginary units may appear in the K_A; use whichever part is nonzero
            for x in POINTS {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let re_part = {
                    let h = 1e-3;
                    let c = eval(&psi, &x);
                    let lap: (f64, f64) = (0..3).fold((0.0, 0.0), |acc, i| {
                        let mut up = x;
                        let mut down = x;
                        up[i] += h;
                        down[i] -= h;
                        let (u, d) = (eval(&psi, &up), eval(&psi, &down));
                        (acc.0 + (u.0 - 2.0 * c.0 + d.0) / (h * h), acc.1 + (u.1 - 2.0 * c.1 + d.1) / (h * h))
                    });
                    ((-0.5 * lap.0 - c.0 / r, -0.5 * lap.1 - c.1 / r), c)
                };
                let ((hr, hi), (cr, ci)) = re_part;
                assert!(close(hr, e * cr) && close(hi, e * ci), "k={k}");
            }
        }
    }
}

fn brute_monomial_count(m: usize, n: usize, l: usize) -> u64 {
    // every exponent tuple with even entries in 0..=l and odd entries in 0..=1
    let total = m + 2 * n;
    let mut count = 0;
    let mut exps = vec![0usize; total];
    loop {
        if exps.iter().sum::<usize>() == l {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == total {
                return count;
            }
            let cap = if i < m { l } else { 1 };
            if exps[i] < cap {
                exps[i] += 1;
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn symmetric_power_counts() {
    for (m, n) in [(4, 1), (5, 1), (6, 2), (3, 0)] {
        for l in 0..=4 {
            let brute = brute_monomial_count(m, n, l);
            assert_eq!(symtensor::sym_dim(m, n, l as i64), brute);
            if m > 2 * n + 1 {
                assert_eq!(SymSpace::new(m, n).unwrap().basis(l).len() as u64, brute);
            }
        }
    }
}

#[test]
fn even_degeneracy_is_classical_harmonic_count() {
    fn c(a: i64, b: i64) -> u64 {
        if b < 0 || b > a {
            0
        } else {
            num_integer::binomial(a as u64, b as u64)
        }
    }
    for d in 3..8 {
        for l in 0..6i64 {
            let classical = c(d as i64 + l, l) - c(d as i64 + l - 2, l - 2);
            assert_eq!(spectrum::degeneracy(l as usize, d, 0), classical);
        }
    }
}

#[test]
fn laguerre_matches_closed_form() {
    // L_j^{(α)}(x) = Σ_i (-1)^i C(j+α, j-i) x^i / i!
    for alpha in 0..6i64 {
        for j in 0..6usize {
            let coeffs = spectrum::laguerre(j, &BigRational::from_integer(alpha.into()));
            for (i, c) in coeffs.iter().enumerate() {
                let top = j as i64 + alpha;
                let choose = num_integer::binomial(top as u64, (j - i) as u64);
                let fact: u64 = (1..=i as u64).product();
                let sign = if i % 2 == 0 { 1 } else { -1 };
                assert_eq!(*c, q(sign * choose as i64, fact as i64), "j={j} alpha={alpha} i={i}");
            }
        }
    }
}

#[test]
fn radial_solutions_satisfy_equation_numerically() {
    for (d, n) in [(3usize, 0usize), (4, 1), (7, 2)] {
        let sd = d as f64 - 2.0 * n as f64;
        for l in 0..3 {
            for j in 0..3 {
                let sol = spectrum::radial_solution(l, j, d, n, None).unwrap();
                let chi = |r: f64| -> f64 {
                    sol.chi.coeffs.iter().map(|(p, c)| f(c) * r.powi(*p)).sum::<f64>() * (-f(&sol.kappa) * r).exp()
                };
                for r in [0.5, 1.3, 2.7] {
                    let h = 1e-3;
                    let d1 = (chi(r + h) - chi(r - h)) / (2.0 * h);
                    let d2 = (chi(r + h) - 2.0 * chi(r) + chi(r - h)) / (h * h);
                    let lf = l as f64;
                    let lhs = -0.5 * (d2 + (sd - 1.0) / r * d1 - lf * (sd - 2.0 + lf) / (r * r) * chi(r)) - chi(r) / r;
                    assert!(close(lhs, f(&sol.energy) * chi(r)), "({d},{n}) l={l} j={j}");
                }
            }
        }
    }
}

#[test]
fn hydrogen_energies_follow_rydberg() {
    for k in 0..6 {
        let expected = -q(1, 2) / BigRational::from_integer(((k + 1) * (k + 1)).into());
        assert_eq!(spectrum::energy(k as usize, 3), expected);
        assert_eq!(spectrum::dilation_rate(k as usize, 3), BigRational::one() / BigRational::from_integer((k + 1).into()));
    }
    assert!(!spectrum::energy(0, 2).is_zero());
}
