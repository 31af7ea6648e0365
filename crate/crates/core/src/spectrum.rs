//! Bound states: ground state, the levels `H_k = U(g_{-1})(-k) Φ_0`, their
//! energies and degeneracies, dilated eigenfunctions, and the radial equation.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dynsym::{BracketEntry, BracketReport, Fault, Generator, GeneratorTable};
use crate::error::Result;
use crate::scalar::GaussianRational;
use crate::supercore::Metric;
use crate::superfunctions::{hamiltonian, independent_subset, RadialExpFunction};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `ℰ_k = -1/2 · (1/((d-1)/2 + k))^2` for superdimension `d`.
pub fn energy(k: usize, superdim: i64) -> BigRational {
    let denom = rat(superdim - 1 + 2 * k as i64, 2);
    -(rat(1, 2) / (&denom * &denom))
}

/// `μ_k = sqrt(-2ℰ_k) = 2/(d-1+2k)`.
pub fn dilation_rate(k: usize, superdim: i64) -> BigRational {
    rat(2, superdim - 1 + 2 * k as i64)
}

#[derive(Clone, Debug)]
pub struct BoundStateLevel {
    pub k: usize,
    pub energy: BigRational,
    pub rate: BigRational,
    pub degeneracy: u64,
    /// Independent elements of `H_k`, before dilation.
    pub basis: Vec<RadialExpFunction>,
    /// `K`-monomials (as index lists) that produced `basis`.
    pub words: Vec<Vec<usize>>,
}

/// `(ℰ_0, Ψ_0)` with `Ψ_0 = e^{-2R/(d-1)}`; the eigen-equation is checked before returning.
pub fn ground_state(d: usize, n: usize) -> Result<(BigRational, RadialExpFunction)> {
    let table = GeneratorTable::build(d, n)?;
    let sd = table.extended_metric().metric().superdim();
    let e0 = energy(0, sd);
    let psi = RadialExpFunction::exp(table.space(), dilation_rate(0, sd));
    let h = hamiltonian(table.space())?;
    assert_eq!(psi.apply(&h), psi.scale(&GaussianRational::real(e0.clone())), "ground state eigen-equation");
    Ok((e0, psi))
}

/// `Φ_0 = e^{-R}` (the constant prefactor is dropped).
pub fn phi0(table: &GeneratorTable) -> RadialExpFunction {
    RadialExpFunction::exp(table.space(), BigRational::one())
}

/// Annihilation conditions of `Φ_0` under the parabolic subalgebra.
pub fn verify_parabolic_hwv(d: usize, n: usize, fault: Option<Fault>) -> Result<BracketReport> {
    let table = GeneratorTable::build_with(d, n, fault)?;
    Ok(parabolic_report(&table))
}

pub fn parabolic_report(table: &GeneratorTable) -> BracketReport {
    let metric = *table.extended_metric().metric();
    let phi = phi0(table);
    let sd = metric.superdim();
    let mut entries = Vec::new();
    let mut push = |op: String, expected: String, ok: bool| entries.push(BracketEntry { left: op, right: "Phi_0".into(), expected, ok });
    for a in metric.indices() {
        for b in metric.indices() {
            push(format!("J_{a},{b}"), "0".into(), phi.apply(&table.generator(Generator::J(a, b))).is_zero());
        }
    }
    for a in metric.indices() {
        push(format!("A_{a}"), "0".into(), phi.apply(&table.generator(Generator::A(a))).is_zero());
        let xa = phi.mul_poly_left(table.space().lowered(a)).scale(&-GaussianRational::i());
        push(format!("M_{a}"), format!("-iX_{a} Phi_0"), phi.apply(&table.generator(Generator::M(a))) == xa);
        push(format!("M_{a} - iGamma_{a}"), "0".into(), phi.apply(&table.k_plus(a)).is_zero());
    }
    push("i(J_-1 - iJ_-2)".into(), "0".into(), phi.apply(&table.k_plus(0)).is_zero());
    let lambda = GaussianRational::ratio(-(sd - 1), 2);
    push("h_0".into(), format!("{lambda} Phi_0"), phi.apply(&table.h0()) == phi.scale(&lambda));
    BracketReport { entries }
}

fn binom(a: i64, b: i64) -> i64 {
    if b < 0 || a < 0 || b > a {
        0
    } else {
        binomial(a, b)
    }
}

/// `Σ_{k=0}^{l} C(D+k,k)(C(2n,l-k) - C(2n,l-2-k))`.
pub fn degeneracy(l: usize, d: usize, n: usize) -> u64 {
    let (l, d, n) = (l as i64, d as i64, n as i64);
    let total: i64 = (0..=l).map(|k| binom(d + k, k) * (binom(2 * n, l - k) - binom(2 * n, l - 2 - k))).sum();
    total as u64
}

/// Non-decreasing index lists of length `k` over `0..=dim`, odd indices at most once,
/// in graded lexicographic order.
pub fn k_words(k: usize, metric: &Metric) -> Vec<Vec<usize>> {
    fn rec(start: usize, left: usize, dim: usize, metric: &Metric, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for a in start..=dim {
            let odd = a > 0 && metric.parity(a) == 1;
            cur.push(a);
            rec(if odd { a + 1 } else { a }, left - 1, dim, metric, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, metric.dim(), metric, &mut Vec::new(), &mut out);
    out
}

/// `buildLevel`: all degree-`k` monomials in `K_A` applied to `Φ_0`, reduced to an independent set.
pub fn build_level(k: usize, table: &GeneratorTable) -> BoundStateLevel {
    let metric = *table.extended_metric().metric();
    let sd = metric.superdim();
    let ks: Vec<_> = (0..=metric.dim()).map(|a| table.k(a)).collect();
    let phi = phi0(table);
    // states by word, built from the shorter suffix
    let mut cache: BTreeMap<Vec<usize>, RadialExpFunction> = BTreeMap::new();
    cache.insert(Vec::new(), phi);
    let words = k_words(k, &metric);
    let mut states = Vec::with_capacity(words.len());
    for w in &words {
        states.push(apply_word(w, &ks, &mut cache));
    }
    let keep = independent_subset(&states);
    let basis: Vec<_> = keep.iter().map(|&i| states[i].clone()).collect();
    BoundStateLevel {
        k,
        energy: energy(k, sd),
        rate: dilation_rate(k, sd),
        degeneracy: basis.len() as u64,
        basis,
        words: keep.iter().map(|&i| words[i].clone()).collect(),
    }
}

fn apply_word(w: &[usize], ks: &[crate::superweyl::OperatorElement], cache: &mut BTreeMap<Vec<usize>, RadialExpFunction>) -> RadialExpFunction {
    if let Some(hit) = cache.get(w) {
        return hit.clone();
    }
    let inner = apply_word(&w[1..], ks, cache);
    let out = inner.apply(&ks[w[0]]);
    cache.insert(w.to_vec(), out.clone());
    out
}

/// Whether every basis state satisfies `h_0 v = (-(d-1)/2 - k) v`.
pub fn h0_eigen_check(level: &BoundStateLevel, table: &GeneratorTable) -> Vec<bool> {
    let sd = table.extended_metric().metric().superdim();
    let lambda = GaussianRational::ratio(-(sd - 1) - 2 * level.k as i64, 2);
    let h0 = table.h0();
    level.basis.iter().map(|v| v.apply(&h0) == v.scale(&lambda)).collect()
}

/// `eigenstates`: level states dilated by `μ_k` (by `1/μ_k` under the dilation fault).
pub fn eigenstates(level: &BoundStateLevel, fault: Option<Fault>) -> Result<Vec<RadialExpFunction>> {
    let rate = if fault == Some(Fault::Dilation) { level.rate.recip() } else { level.rate.clone() };
    level.basis.iter().map(|v| v.dilate(&rate)).collect()
}

/// Whether `Hψ = ℰψ` holds for each state.
pub fn verify_eigenstates(states: &[RadialExpFunction], energy: &BigRational) -> Result<Vec<bool>> {
    let Some(first) = states.first() else { return Ok(Vec::new()) };
    let h = hamiltonian(first.space())?;
    let e = GaussianRational::real(energy.clone());
    Ok(states.iter().map(|s| s.apply(&h) == s.scale(&e)).collect())
}

/// `Σ_p c_p r^p · e^{-κr}` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadialExpr {
    pub kappa: BigRational,
    pub coeffs: BTreeMap<i32, BigRational>,
}

impl RadialExpr {
    pub fn new(kappa: BigRational, coeffs: BTreeMap<i32, BigRational>) -> Self {
        let mut out = Self { kappa, coeffs };
        out.coeffs.retain(|_, c| !c.is_zero());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn derivative(&self) -> RadialExpr {
        let mut out: BTreeMap<i32, BigRational> = BTreeMap::new();
        for (&p, c) in &self.coeffs {
            if p != 0 {
                *out.entry(p - 1).or_insert_with(BigRational::zero) += c * BigRational::from_integer(p.into());
            }
            *out.entry(p).or_insert_with(BigRational::zero) -= c * &self.kappa;
        }
        RadialExpr::new(self.kappa.clone(), out)
    }

    pub fn shift(&self, by: i32) -> RadialExpr {
        RadialExpr::new(self.kappa.clone(), self.coeffs.iter().map(|(&p, c)| (p + by, c.clone())).collect())
    }

    pub fn scale(&self, s: &BigRational) -> RadialExpr {
        RadialExpr::new(self.kappa.clone(), self.coeffs.iter().map(|(&p, c)| (p, c * s)).collect())
    }

    pub fn add(&self, rhs: &RadialExpr) -> RadialExpr {
        assert_eq!(self.kappa, rhs.kappa, "exponential rates differ");
        let mut out = self.coeffs.clone();
        for (&p, c) in &rhs.coeffs {
            *out.entry(p).or_insert_with(BigRational::zero) += c;
        }
        RadialExpr::new(self.kappa.clone(), out)
    }
}

impl fmt::Display for RadialExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.coeffs.iter().map(|(p, c)| format!("({c})*r^{p}")).collect();
        write!(f, "[{}]*exp(-{}*r)", terms.join(" + "), self.kappa)
    }
}

/// `L_j^{(α)}(x)` as coefficients in `x`, by the three-term recurrence.
pub fn laguerre(j: usize, alpha: &BigRational) -> Vec<BigRational> {
    let one = BigRational::one();
    let mut prev = vec![one.clone()];
    if j == 0 {
        return prev;
    }
    let mut cur = vec![&one + alpha, -one.clone()];
    for k in 1..j {
        let kk = BigRational::from_integer(k.into());
        // (k+1) L_{k+1} = (2k+1+α-x) L_k - (k+α) L_{k-1}
        let mut next = vec![BigRational::zero(); k + 2];
        let lin = &kk * BigRational::from_integer(2.into()) + &one + alpha;
        for (i, c) in cur.iter().enumerate() {
            next[i] += &lin * c;
            next[i + 1] -= c;
        }
        let back = &kk + alpha;
        for (i, c) in prev.iter().enumerate() {
            next[i] -= &back * c;
        }
        let inv = (&kk + &one).recip();
        for c in next.iter_mut() {
            *c *= &inv;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Radial solution `χ_{l,j}` with its rate and energy.
#[derive(Clone, Debug)]
pub struct RadialSolution {
    pub l: usize,
    pub j: usize,
    pub kappa: BigRational,
    pub energy: BigRational,
    pub chi: RadialExpr,
}

/// `χ = r^l e^{-κr} L_j^{(2l+d-2)}(2κr)`, with `κ = 2/(d-1+2(l+j))` unless overridden.
pub fn radial_solution(l: usize, j: usize, d: usize, n: usize, kappa: Option<BigRational>) -> Result<RadialSolution> {
    let sd = Metric::kepler(d, n)?.superdim();
    let kappa = kappa.unwrap_or_else(|| dilation_rate(l + j, sd));
    let alpha = BigRational::from_integer((2 * l as i64 + sd - 2).into());
    let lag = laguerre(j, &alpha);
    let two_kappa = &kappa * BigRational::from_integer(2.into());
    let mut coeffs = BTreeMap::new();
    let mut pow = BigRational::one();
    for (i, c) in lag.iter().enumerate() {
        coeffs.insert((l + i) as i32, c * &pow);
        pow *= &two_kappa;
    }
    Ok(RadialSolution { l, j, energy: energy(l + j, sd), chi: RadialExpr::new(kappa.clone(), coeffs), kappa })
}

/// Left side of the radial equation minus `ℰ χ`.
pub fn radial_residual(sol: &RadialSolution, d: usize, n: usize) -> Result<RadialExpr> {
    let sd = Metric::kepler(d, n)?.superdim();
    let l = sol.l as i64;
    let chi = &sol.chi;
    let d1 = chi.derivative();
    let d2 = d1.derivative();
    let inner = d2
        .add(&d1.shift(-1).scale(&BigRational::from_integer((sd - 1).into())))
        .add(&chi.shift(-2).scale(&BigRational::from_integer((-l * (sd - 2 + l)).into())));
    Ok(inner
        .scale(&rat(-1, 2))
        .add(&chi.shift(-1).scale(&rat(-1, 1)))
        .add(&chi.scale(&-sol.energy.clone())))
}

/// Energies and formula degeneracies for `k = 0..=k_max`.
pub fn spectrum_table(d: usize, n: usize, k_max: usize) -> Result<Vec<BoundStateLevel>> {
    let sd = Metric::kepler(d, n)?.superdim();
    Ok((0..=k_max)
        .map(|k| BoundStateLevel {
            k,
            energy: energy(k, sd),
            rate: dilation_rate(k, sd),
            degeneracy: degeneracy(k, d, n),
            basis: Vec::new(),
            words: Vec::new(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energies() {
        assert_eq!(energy(0, 3), rat(-1, 2));
        assert_eq!(energy(3, 3), rat(-1, 32));
        assert_eq!(energy(0, 2), rat(-2, 1));
        assert_eq!(energy(2, 2), rat(-2, 25));
        assert_eq!(dilation_rate(1, 2), rat(2, 3));
    }

    #[test]
    fn ground_states() {
        let (e, psi) = ground_state(3, 0).unwrap();
        assert_eq!(e, rat(-1, 2));
        assert_eq!(psi.rates().cloned().collect::<Vec<_>>(), vec![rat(1, 1)]);
        let (e, psi) = ground_state(4, 1).unwrap();
        assert_eq!(e, rat(-2, 1));
        assert_eq!(psi.rates().cloned().collect::<Vec<_>>(), vec![rat(2, 1)]);
        assert_eq!(ground_state(5, 1).unwrap().0, rat(-1, 2));
        assert!(ground_state(3, 1).is_err());
    }

    #[test]
    fn degeneracy_values() {
        assert_eq!(degeneracy(0, 7, 2), 1);
        assert_eq!(degeneracy(1, 3, 0), 4);
        assert_eq!(degeneracy(2, 4, 1), 25);
        assert_eq!(degeneracy(1, 4, 1), 7);
        for l in 0..6 {
            assert_eq!(degeneracy(l, 3, 0), ((l + 1) * (l + 1)) as u64);
        }
    }

    #[test]
    fn words_respect_odd_multiplicity() {
        let m = Metric::new(4, 1);
        let w = k_words(2, &m);
        assert!(w.contains(&vec![0, 0]));
        assert!(w.contains(&vec![5, 6]));
        assert!(!w.contains(&vec![5, 5]));
        assert_eq!(w.len(), 5 * 6 / 2 + 5 * 2 + 1);
    }

    #[test]
    fn laguerre_low_orders() {
        let a = rat(1, 1);
        assert_eq!(laguerre(0, &a), vec![rat(1, 1)]);
        assert_eq!(laguerre(1, &a), vec![rat(2, 1), rat(-1, 1)]);
        // L_2^{(1)}(x) = (x^2 - 6x + 6)/2
        assert_eq!(laguerre(2, &a), vec![rat(3, 1), rat(-3, 1), rat(1, 2)]);
    }

    #[test]
    fn radial_examples() {
        let s = radial_solution(0, 0, 3, 0, None).unwrap();
        assert_eq!(s.chi, RadialExpr::new(rat(1, 1), [(0, rat(1, 1))].into_iter().collect()));
        assert!(radial_residual(&s, 3, 0).unwrap().is_zero());
        // L_1^{(1)}(r) = 2 - r
        let s = radial_solution(0, 1, 3, 0, None).unwrap();
        assert_eq!(s.chi, RadialExpr::new(rat(1, 2), [(0, rat(2, 1)), (1, rat(-1, 1))].into_iter().collect()));
        assert!(radial_residual(&s, 3, 0).unwrap().is_zero());
        let bad = radial_solution(0, 1, 3, 0, Some(rat(3, 2))).unwrap();
        assert!(!radial_residual(&bad, 3, 0).unwrap().is_zero());
    }

    #[test]
    fn first_levels_hydrogen() {
        let table = GeneratorTable::build(3, 0).unwrap();
        let l0 = build_level(0, &table);
        assert_eq!(l0.degeneracy, 1);
        let l1 = build_level(1, &table);
        assert_eq!(l1.degeneracy, 4);
        assert!(h0_eigen_check(&l1, &table).into_iter().all(|b| b));
        let states = eigenstates(&l1, None).unwrap();
        assert!(verify_eigenstates(&states, &rat(-1, 8)).unwrap().into_iter().all(|b| b));
        let wrong = eigenstates(&l1, Some(Fault::Dilation)).unwrap();
        assert!(!verify_eigenstates(&wrong, &rat(-1, 8)).unwrap().into_iter().all(|b| b));
    }

    #[test]
    fn parabolic_small() {
        let r = verify_parabolic_hwv(3, 0, None).unwrap();
        assert!(r.passed(), "{:?}", r.failed_entries().collect::<Vec<_>>());
        let r = verify_parabolic_hwv(3, 0, Some(Fault::Generator)).unwrap();
        assert!(!r.passed());
    }
}
