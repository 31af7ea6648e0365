//! Suite runners. Each returns a [`Suite`] with its check count and the labels of failed checks.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use superkepler::dynsym::{self, Fault, GeneratorTable, PairSelection};
use superkepler::scalar::rational_to_f64;
use superkepler::spectrum::{self, BoundStateLevel};
use superkepler::symtensor::{self, SymSpace};
use superkepler::Result;

#[derive(Clone, Debug, Serialize)]
pub struct Suite {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
    pub passed: bool,
    #[serde(skip)]
    pub elapsed_ms: u64,
}

impl Suite {
    fn collect(name: &str, start: Instant, results: impl IntoIterator<Item = (String, bool)>) -> Suite {
        let mut checks = 0;
        let mut failures = Vec::new();
        for (label, ok) in results {
            checks += 1;
            if !ok {
                failures.push(label);
            }
        }
        Suite {
            name: name.to_string(),
            checks,
            passed: failures.is_empty(),
            failures,
            elapsed_ms: start.elapsed().as_millis() as u64,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub k: usize,
    pub energy_exact: String,
    pub energy_decimal: f64,
    pub degeneracy: u64,
}

pub fn spectrum_rows(d: usize, n: usize, k_max: usize) -> Result<Vec<SpectrumRow>> {
    Ok(spectrum::spectrum_table(d, n, k_max)?
        .into_iter()
        .map(|level| SpectrumRow {
            k: level.k,
            energy_exact: level.energy.to_string(),
            energy_decimal: rational_to_f64(&level.energy),
            degeneracy: level.degeneracy,
        })
        .collect())
}

fn bracket_suite(name: &str, start: Instant, report: &dynsym::BracketReport) -> Suite {
    let results = report.entries.iter().map(|e| (format!("[{}, {}] expected {}", e.left, e.right, e.expected), e.ok));
    Suite::collect(name, start, results)
}

pub fn algebra(table: &GeneratorTable, selection: PairSelection) -> Suite {
    let start = Instant::now();
    let pairs = dynsym::select_pairs(table, selection);
    bracket_suite("algebra", start, &dynsym::verify_pairs(table, &pairs))
}

pub fn so21(table: &GeneratorTable) -> Suite {
    let start = Instant::now();
    Suite::collect("so21", start, dynsym::verify_so21(table))
}

pub fn k_squared(table: &GeneratorTable) -> Suite {
    let start = Instant::now();
    let mut results = vec![("(K)^2 = 0".to_string(), dynsym::k_squared(table, None).is_zero())];
    results.extend(dynsym::intermediate_identities(table));
    Suite::collect("k_squared", start, results)
}

pub fn grading(table: &GeneratorTable) -> Suite {
    let start = Instant::now();
    bracket_suite("grading", start, &dynsym::grading_report(table))
}

pub fn parabolic(table: &GeneratorTable) -> Suite {
    let start = Instant::now();
    bracket_suite("parabolic", start, &spectrum::parabolic_report(table))
}

fn level_checks(level: &BoundStateLevel, table: &GeneratorTable, d: usize, n: usize, fault: Option<Fault>) -> Result<Vec<(String, bool)>> {
    let k = level.k;
    let formula = spectrum::degeneracy(k, d, n);
    let mut out = vec![(format!("rank H_{k} = {} (formula {formula})", level.basis.len()), level.basis.len() as u64 == formula)];
    let states = spectrum::eigenstates(level, fault)?;
    for (i, ok) in spectrum::verify_eigenstates(&states, &level.energy)?.into_iter().enumerate() {
        out.push((format!("H psi = E_{k} psi for state {i} of level {k}"), ok));
    }
    for (i, ok) in spectrum::h0_eigen_check(level, table).into_iter().enumerate() {
        out.push((format!("h0 eigenvalue on state {i} of level {k}"), ok));
    }
    Ok(out)
}

/// Builds levels `0..=k_max` and checks rank, the eigen-equation and the `h_0` eigenvalue.
pub fn levels(table: &GeneratorTable, d: usize, n: usize, k_max: usize, fault: Option<Fault>) -> Result<(Suite, Vec<BoundStateLevel>)> {
    let start = Instant::now();
    let built: Vec<BoundStateLevel> = (0..=k_max).into_par_iter().map(|k| spectrum::build_level(k, table)).collect();
    let checks: Vec<Vec<(String, bool)>> = built.par_iter().map(|level| level_checks(level, table, d, n, fault)).collect::<Result<_>>()?;
    Ok((Suite::collect("levels", start, checks.into_iter().flatten()), built))
}

pub fn radial(d: usize, n: usize, k_max: usize) -> Result<Suite> {
    let start = Instant::now();
    let mut results = Vec::new();
    for l in 0..=k_max {
        for j in 0..=(k_max - l) {
            let sol = spectrum::radial_solution(l, j, d, n, None)?;
            let res = spectrum::radial_residual(&sol, d, n)?;
            results.push((format!("radial residual l={l} j={j}: {res}"), res.is_zero()));
        }
    }
    Ok(Suite::collect("radial", start, results))
}

/// Harmonic dimensions, decomposition and su(1,1) relations on `S(C^{M|2n})` up to degree `l_max`.
pub fn harmonic(sp: &SymSpace, l_max: usize) -> Suite {
    let start = Instant::now();
    let (m, n) = (sp.m(), sp.n());
    let mut results = vec![(format!("su(1,1) relations up to degree {l_max}"), symtensor::verify_su11(sp, l_max))];
    for l in 0..=l_max {
        let h = symtensor::harmonic_dim(sp, l) as u64;
        let expect = symtensor::sym_dim(m, n, l as i64) - symtensor::sym_dim(m, n, l as i64 - 2);
        results.push((format!("harmonic dim l={l}: {h} vs {expect}"), h == expect));
        results.push((format!("decomposition l={l}"), symtensor::verify_decomposition(sp, l, |p| sp.box_star(p))));
    }
    results.push((format!("osp invariance up to degree {l_max}"), symtensor::osp_invariance_check(sp, l_max)));
    Suite::collect("harmonic", start, results)
}

/// `degeneracy = harmonic dim on S(C^{D+1|2n}) = level rank`.
pub fn agreement(d: usize, n: usize, levels: &[BoundStateLevel]) -> Result<Suite> {
    let start = Instant::now();
    let sp = SymSpace::new(d + 1, n)?;
    let results = levels.iter().map(|level| {
        let l = level.k;
        let formula = spectrum::degeneracy(l, d, n);
        let harmonic = symtensor::harmonic_dim(&sp, l) as u64;
        let rank = level.basis.len() as u64;
        (format!("l={l}: formula {formula}, harmonic {harmonic}, rank {rank}"), formula == harmonic && harmonic == rank)
    });
    Ok(Suite::collect("agreement", start, results.collect::<Vec<_>>()))
}
