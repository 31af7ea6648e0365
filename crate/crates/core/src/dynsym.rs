//! Generators of `osp(2, D+1|2n)` as differential operators and exact checks of
//! their commutation relations.
//!
//! Labels `K, L` run over `-2, -1, 0, 1, ..., D+2n`. The basis consists of
//! `J_{KL}` with `K < L` together with `J_{aa}` for odd `a`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, SuperError};
use crate::linalg;
use crate::scalar::GaussianRational;
use crate::supercore::Metric;
use crate::superweyl::{OperatorElement, Superspace};

/// A generator label `(K, L)`.
pub type Label = (i32, i32);

/// Deliberate single-sign perturbations used as negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fault {
    /// `J_{-1}` gets the wrong sign on its constant term.
    Generator,
    /// `η_{-2,-2}` flips sign.
    Pairing,
    /// Eigenstates are dilated by `1/μ` instead of `μ`.
    Dilation,
}

impl std::str::FromStr for Fault {
    type Err = SuperError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generator" => Ok(Fault::Generator),
            "pairing" => Ok(Fault::Pairing),
            "dilation" => Ok(Fault::Dilation),
            other => Err(SuperError::InvalidLabel(other.to_string())),
        }
    }
}

fn sign(bit: u8) -> i64 {
    if bit & 1 == 1 {
        -1
    } else {
        1
    }
}

fn gr(n: i64) -> GaussianRational {
    GaussianRational::from_int(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtendedMetric {
    metric: Metric,
    flipped: bool,
}

impl ExtendedMetric {
    pub fn new(metric: Metric) -> Self {
        Self { metric, flipped: false }
    }

    /// The same metric with `η_{-2,-2}` negated.
    pub fn with_pairing_fault(metric: Metric) -> Self {
        Self { metric, flipped: true }
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn size(&self) -> usize {
        self.metric.dim() + 3
    }

    pub fn labels(&self) -> Vec<i32> {
        (-2..=self.metric.dim() as i32).collect()
    }

    pub fn is_valid(&self, k: i32) -> bool {
        (-2..=self.metric.dim() as i32).contains(&k)
    }

    /// `[K]`.
    pub fn parity(&self, k: i32) -> u8 {
        if k <= 0 {
            0
        } else {
            self.metric.parity(k as usize)
        }
    }

    /// `η_{KL}`.
    pub fn lower(&self, k: i32, l: i32) -> i64 {
        match (k <= 0, l <= 0) {
            (true, true) if k == l => {
                if k == 0 || (k == -2 && self.flipped) {
                    1
                } else {
                    -1
                }
            }
            (false, false) => self.metric.lower(k as usize, l as usize),
            _ => 0,
        }
    }

    /// `η^{AB}` of the block with `A, B >= 0`.
    pub fn upper0(&self, a: i32, b: i32) -> i64 {
        match (a == 0, b == 0) {
            (true, true) => 1,
            (false, false) => self.metric.upper(a as usize, b as usize),
            _ => 0,
        }
    }
}

/// Named operators of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Generator {
    /// `J_{-2} = T`.
    Jm2,
    Jm1,
    J0,
    Gamma(usize),
    A(usize),
    M(usize),
    J(usize, usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Jm2 => write!(f, "J_-2"),
            Generator::Jm1 => write!(f, "J_-1"),
            Generator::J0 => write!(f, "J_0"),
            Generator::Gamma(a) => write!(f, "Gamma_{a}"),
            Generator::A(a) => write!(f, "A_{a}"),
            Generator::M(a) => write!(f, "M_{a}"),
            Generator::J(a, b) => write!(f, "J_{a},{b}"),
        }
    }
}

/// All generators of one superspace.
pub struct GeneratorTable {
    space: Arc<Superspace>,
    eta: ExtendedMetric,
    euler: OperatorElement,
    t: OperatorElement,
    jm1: OperatorElement,
    j0: OperatorElement,
    gamma: Vec<OperatorElement>,
    a: Vec<OperatorElement>,
    m: Vec<OperatorElement>,
    jab: BTreeMap<(usize, usize), OperatorElement>,
    basis: BTreeMap<Label, OperatorElement>,
}

impl GeneratorTable {
    pub fn build(d: usize, n: usize) -> Result<Self> {
        Self::build_with(d, n, None)
    }

    pub fn build_with(d: usize, n: usize, fault: Option<Fault>) -> Result<Self> {
        let metric = Metric::kepler(d, n)?;
        let space = Superspace::new(metric);
        let eta = if fault == Some(Fault::Pairing) {
            ExtendedMetric::with_pairing_fault(metric)
        } else {
            ExtendedMetric::new(metric)
        };
        let sp = &space;
        let dim = metric.dim();
        let half_i = &GaussianRational::ratio(1, 2) * &GaussianRational::i();
        let minus_i = -GaussianRational::i();
        let one = GaussianRational::from_int(1);

        let euler = OperatorElement::euler(sp);
        let lap = OperatorElement::laplacian(sp);
        let r = OperatorElement::r_power(sp, 1);
        let small_d = metric.superdim();
        let t = euler.add_scalar(&GaussianRational::ratio(small_d - 1, 2));
        let lap_plus = lap.add_scalar(&one);
        let lap_minus = lap.add_scalar(&-&one);
        let jm1_const = if fault == Some(Fault::Generator) { one.clone() } else { -&one };
        let jm1 = r.compose(&lap.neg().add_scalar(&jm1_const)).scale(&half_i);
        let j0 = r.compose(&lap.neg().add_scalar(&one)).scale(&half_i);

        let mut gamma = Vec::with_capacity(dim);
        let mut a_ops = Vec::with_capacity(dim);
        let mut m_ops = Vec::with_capacity(dim);
        for a in metric.indices() {
            let pa = OperatorElement::partial(sp, a);
            let xa = OperatorElement::lowered_coordinate(sp, a);
            let t_pa = t.compose(&pa).scale(&minus_i);
            gamma.push(r.compose(&pa));
            a_ops.push(xa.compose(&lap_plus).scale(&half_i).add(&t_pa));
            m_ops.push(xa.compose(&lap_minus).scale(&half_i).add(&t_pa));
        }

        let mut jab = BTreeMap::new();
        for a in metric.indices() {
            for b in metric.indices() {
                let s = sign(metric.parity(a) & metric.parity(b));
                let xa = OperatorElement::lowered_coordinate(sp, a).compose(&OperatorElement::partial(sp, b));
                let xb = OperatorElement::lowered_coordinate(sp, b).compose(&OperatorElement::partial(sp, a));
                jab.insert((a, b), xa.sub(&xb.scale(&gr(s))));
            }
        }

        let mut table = Self { space: Arc::clone(&space), eta, euler, t, jm1, j0, gamma, a: a_ops, m: m_ops, jab, basis: BTreeMap::new() };
        for (k, l) in table.basis_labels() {
            let op = table.assemble(k, l);
            table.basis.insert((k, l), op);
        }
        Ok(table)
    }

    fn assemble(&self, k: i32, l: i32) -> OperatorElement {
        match (k, l) {
            (-2, -1) => self.j0.clone(),
            (-1, 0) => self.t.clone(),
            (-2, 0) => self.jm1.neg(),
            (-2, a) => self.gamma[a as usize - 1].clone(),
            (-1, a) => self.m[a as usize - 1].clone(),
            (0, a) => self.a[a as usize - 1].neg(),
            (a, b) => self.jab[&(a as usize, b as usize)].clone(),
        }
    }

    pub fn space(&self) -> &Arc<Superspace> {
        &self.space
    }

    pub fn extended_metric(&self) -> &ExtendedMetric {
        &self.eta
    }

    /// Labels of the basis in canonical order.
    pub fn basis_labels(&self) -> Vec<Label> {
        let labels = self.eta.labels();
        let mut out = Vec::new();
        for &k in &labels {
            for &l in &labels {
                if k < l || (k == l && self.eta.parity(k) == 1) {
                    out.push((k, l));
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `J_{KL}` for any pair of valid labels.
    pub fn get(&self, k: i32, l: i32) -> Result<OperatorElement> {
        for x in [k, l] {
            if !self.eta.is_valid(x) {
                return Err(SuperError::InvalidLabel(x.to_string()));
            }
        }
        if let Some(op) = self.basis.get(&(k, l)) {
            return Ok(op.clone());
        }
        if let Some(op) = self.basis.get(&(l, k)) {
            let s = -sign(self.eta.parity(k) & self.eta.parity(l));
            return Ok(op.scale(&gr(s)));
        }
        Ok(OperatorElement::zero(&self.space))
    }

    /// `[J_{KL}]` in the Grassmann grading.
    pub fn label_parity(&self, (k, l): Label) -> u8 {
        (self.eta.parity(k) + self.eta.parity(l)) & 1
    }

    pub fn generator(&self, g: Generator) -> OperatorElement {
        match g {
            Generator::Jm2 => self.t.clone(),
            Generator::Jm1 => self.jm1.clone(),
            Generator::J0 => self.j0.clone(),
            Generator::Gamma(a) => self.gamma[a - 1].clone(),
            Generator::A(a) => self.a[a - 1].clone(),
            Generator::M(a) => self.m[a - 1].clone(),
            Generator::J(a, b) => self.jab[&(a, b)].clone(),
        }
    }

    pub fn euler(&self) -> &OperatorElement {
        &self.euler
    }

    /// `T = E + (d-1)/2`.
    pub fn t(&self) -> &OperatorElement {
        &self.t
    }

    /// `h_0 = i J_0`.
    pub fn h0(&self) -> OperatorElement {
        self.j0.scale(&GaussianRational::i())
    }

    /// `K_0 = i(J_{-1} + i J_{-2})` and `K_a = M_a + i Γ_a`.
    pub fn k(&self, idx: usize) -> OperatorElement {
        let i = GaussianRational::i();
        if idx == 0 {
            self.jm1.add(&self.t.scale(&i)).scale(&i)
        } else {
            self.m[idx - 1].add(&self.gamma[idx - 1].scale(&i))
        }
    }

    /// `i(J_{-1} - i J_{-2})` and `M_a - i Γ_a`, the raising counterparts of `K_A`.
    pub fn k_plus(&self, idx: usize) -> OperatorElement {
        let i = GaussianRational::i();
        if idx == 0 {
            self.jm1.sub(&self.t.scale(&i)).scale(&i)
        } else {
            self.m[idx - 1].sub(&self.gamma[idx - 1].scale(&i))
        }
    }

    fn generator_parity(&self, g: Generator) -> u8 {
        let p = |a: usize| self.eta.metric().parity(a);
        match g {
            Generator::Jm2 | Generator::Jm1 | Generator::J0 => 0,
            Generator::Gamma(a) | Generator::A(a) | Generator::M(a) => p(a),
            Generator::J(a, b) => (p(a) + p(b)) & 1,
        }
    }

    /// Named generator (with sign) behind a basis label.
    fn named(&self, (k, l): Label) -> (i64, Generator) {
        match (k, l) {
            (-2, -1) => (1, Generator::J0),
            (-1, 0) => (1, Generator::Jm2),
            (-2, 0) => (-1, Generator::Jm1),
            (-2, a) => (1, Generator::Gamma(a as usize)),
            (-1, a) => (1, Generator::M(a as usize)),
            (0, a) => (-1, Generator::A(a as usize)),
            (a, b) => (1, Generator::J(a as usize, b as usize)),
        }
    }
}

/// One term `coef · J_{KL}` of an expected right-hand side.
pub type Combination = Vec<(i64, Label)>;

fn combination_string(c: &Combination) -> String {
    if c.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (coef, (a, b))) in c.iter().enumerate() {
        let sgn = if *coef < 0 { "-" } else if k > 0 { "+" } else { "" };
        if k > 0 {
            s.push(' ');
        }
        let mag = coef.abs();
        if mag == 1 {
            s.push_str(&format!("{sgn}J[{a},{b}]"));
        } else {
            s.push_str(&format!("{sgn}{mag}*J[{a},{b}]"));
        }
    }
    s
}

/// Structure-constant right-hand side of `[J_{KL}, J_{PQ}]`.
pub fn expected_combination(kl: Label, pq: Label, eta: &ExtendedMetric) -> Result<Combination> {
    let (k, l) = kl;
    let (p, q) = pq;
    for x in [k, l, p, q] {
        if !eta.is_valid(x) {
            return Err(SuperError::InvalidLabel(x.to_string()));
        }
    }
    let pr = |x: i32| eta.parity(x) as i64;
    let s = |e: i64| if e % 2 == 0 { 1 } else { -1 };
    let raw = [
        (eta.lower(p, l), (k, q)),
        (s(pr(k) * (pr(l) + pr(p))) * eta.lower(q, k), (l, p)),
        (-s(pr(p) * pr(q)) * eta.lower(q, l), (k, p)),
        (-s(pr(k) * pr(l)) * eta.lower(p, k), (l, q)),
    ];
    Ok(raw.into_iter().filter(|(c, _)| *c != 0).collect())
}

/// `expectedBracket`: the structure-constant right-hand side as an operator.
pub fn expected_bracket(kl: Label, pq: Label, eta: &ExtendedMetric, table: &GeneratorTable) -> Result<OperatorElement> {
    let comb = expected_combination(kl, pq, eta)?;
    let mut out = OperatorElement::zero(table.space());
    for (c, (a, b)) in comb {
        out = out.add(&table.get(a, b)?.scale(&gr(c)));
    }
    Ok(out)
}

/// Named relations among the generators, when one applies to the ordered pair.
fn named_relation(x: Generator, y: Generator, metric: &Metric) -> Option<Vec<(i64, Generator)>> {
    use Generator::*;
    let eta = |a: usize, b: usize| metric.lower(a, b);
    let p = |a: usize| metric.parity(a);
    let so21 = |g: Generator| matches!(g, Jm2 | Jm1 | J0);
    let vector = |g: Generator| matches!(g, Gamma(_) | A(_) | M(_));
    let with_index = |g: Generator, c: usize| match g {
        Gamma(_) => Gamma(c),
        A(_) => A(c),
        M(_) => M(c),
        other => other,
    };
    let index_of = |g: Generator| match g {
        Gamma(a) | A(a) | M(a) => a,
        _ => unreachable!(),
    };
    let out = match (x, y) {
        (Jm1, J0) => vec![(1, Jm2)],
        (Jm2, Jm1) => vec![(-1, J0)],
        (J0, Jm2) => vec![(1, Jm1)],
        (u, v) if u == v && so21(u) => vec![],
        (Jm2, Gamma(_)) => vec![],
        (Jm1, Gamma(a)) => vec![(1, A(a))],
        (J0, Gamma(a)) => vec![(1, M(a))],
        (Gamma(a), Gamma(b)) => vec![(1, J(a, b))],
        (Gamma(a), A(b)) => vec![(-eta(b, a), Jm1)],
        (Gamma(a), M(b)) => vec![(-eta(b, a), J0)],
        (A(a), A(b)) => vec![(-1, J(a, b))],
        (M(a), M(b)) => vec![(1, J(a, b))],
        (A(a), M(b)) => vec![(-eta(b, a), Jm2)],
        (J(_, _), u) if so21(u) => vec![],
        (J(a, b), v) if vector(v) => {
            let c = index_of(v);
            vec![(eta(c, b), with_index(v, a)), (-sign(p(b) & p(c)) * eta(c, a), with_index(v, b))]
        }
        _ => return None,
    };
    Some(out.into_iter().filter(|(c, _)| *c != 0).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketEntry {
    pub left: String,
    pub right: String,
    pub expected: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BracketReport {
    pub entries: Vec<BracketEntry>,
}

impl BracketReport {
    pub fn total(&self) -> usize {
        self.entries.len()
    }

    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.ok).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn failed_entries(&self) -> impl Iterator<Item = &BracketEntry> {
        self.entries.iter().filter(|e| !e.ok)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSelection {
    All,
    /// At least `count` distinct pairs drawn with the seed, plus every pair
    /// whose four indices are all `<= 3`.
    Sample { seed: u64, count: usize },
}

fn label_string((k, l): Label) -> String {
    format!("J[{k},{l}]")
}

/// Checks one ordered pair against the structure constants and, where one
/// exists, against the named relation.
pub fn check_pair(table: &GeneratorTable, kl: Label, pq: Label) -> Result<BracketEntry> {
    let eta = table.extended_metric();
    let comb = expected_combination(kl, pq, eta)?;
    let expected = expected_bracket(kl, pq, eta, table)?;
    let actual = table.get(kl.0, kl.1)?.bracket(&table.get(pq.0, pq.1)?);
    let mut ok = actual == expected;
    if ok {
        if let Some(named) = named_for_labels(table, kl, pq) {
            ok = named == expected;
        }
    }
    Ok(BracketEntry { left: label_string(kl), right: label_string(pq), expected: combination_string(&comb), ok })
}

fn named_for_labels(table: &GeneratorTable, kl: Label, pq: Label) -> Option<OperatorElement> {
    let (s1, x) = table.named(kl);
    let (s2, y) = table.named(pq);
    let metric = table.extended_metric().metric();
    let rel = match named_relation(x, y, metric) {
        Some(r) => r,
        None => {
            // [X, Y] = -(-1)^{|X||Y|} [Y, X]
            let r = named_relation(y, x, metric)?;
            let s = -sign(table.generator_parity(x) & table.generator_parity(y));
            r.into_iter().map(|(c, g)| (s * c, g)).collect()
        }
    };
    let mut out = OperatorElement::zero(table.space());
    for (c, g) in rel {
        out = out.add(&table.generator(g).scale(&gr(c * s1 * s2)));
    }
    Some(out)
}

/// Ordered pairs of basis labels selected for verification.
pub fn select_pairs(table: &GeneratorTable, selection: PairSelection) -> Vec<(Label, Label)> {
    let labels = table.basis_labels();
    let all: Vec<(Label, Label)> = labels.iter().flat_map(|&x| labels.iter().map(move |&y| (x, y))).collect();
    match selection {
        PairSelection::All => all,
        PairSelection::Sample { seed, count } => {
            let small = |(k, l): Label| k <= 3 && l <= 3;
            let mut chosen = vec![false; all.len()];
            for (i, (x, y)) in all.iter().enumerate() {
                chosen[i] = small(*x) && small(*y);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in sample(&mut rng, all.len(), count.min(all.len())).into_iter() {
                chosen[i] = true;
            }
            all.into_iter().zip(chosen).filter_map(|(p, c)| c.then_some(p)).collect()
        }
    }
}

/// `verifyAlgebra`: brackets of every selected pair, in canonical order.
pub fn verify_algebra(d: usize, n: usize, selection: PairSelection, fault: Option<Fault>) -> Result<BracketReport> {
    let table = GeneratorTable::build_with(d, n, fault)?;
    Ok(verify_pairs(&table, &select_pairs(&table, selection)))
}

pub fn verify_pairs(table: &GeneratorTable, pairs: &[(Label, Label)]) -> BracketReport {
    let entries = pairs
        .par_iter()
        .map(|&(x, y)| check_pair(table, x, y).expect("basis labels are valid"))
        .collect();
    BracketReport { entries }
}

/// `(K)^2 = Σ_{A,B} η^{BA} K_A K_B`.
pub fn k_squared(table: &GeneratorTable, k0_shift: Option<&GaussianRational>) -> OperatorElement {
    let eta = table.extended_metric();
    let dim = eta.metric().dim();
    let ks: Vec<OperatorElement> = (0..=dim)
        .map(|a| {
            let k = table.k(a);
            match (a, k0_shift) {
                (0, Some(c)) => k.add_scalar(c),
                _ => k,
            }
        })
        .collect();
    let mut out = OperatorElement::zero(table.space());
    for a in 0..=dim {
        for b in 0..=dim {
            let e = eta.upper0(b as i32, a as i32);
            if e != 0 {
                out = out.add(&ks[a].compose(&ks[b]).scale(&gr(e)));
            }
        }
    }
    out
}

/// `verifyKSquared`.
pub fn verify_k_squared(d: usize, n: usize) -> Result<bool> {
    let table = GeneratorTable::build(d, n)?;
    Ok(k_squared(&table, None).is_zero())
}

/// Named intermediate identities of the `(K)^2 = 0` computation and of the
/// bracket relations, each with its outcome.
pub fn intermediate_identities(table: &GeneratorTable) -> Vec<(String, bool)> {
    let sp = table.space();
    let metric = *sp.metric();
    let q = |n: i64, d: i64| GaussianRational::ratio(n, d);
    let one = gr(1);
    let i = GaussianRational::i();
    let e = table.euler();
    let t = table.t();
    let lap = OperatorElement::laplacian(sp);
    let r = OperatorElement::r_power(sp, 1);
    let r_inv = OperatorElement::r_power(sp, -1);
    let r2 = r.compose(&r);
    let lp = lap.add_scalar(&one);
    let lm = lap.add_scalar(&-&one);
    let r_lp = r.compose(&lp);
    let r_lm = r.compose(&lm);
    let small_d = metric.superdim();
    let idx: Vec<usize> = metric.indices().collect();
    let raise = |ops: &dyn Fn(usize) -> OperatorElement, a: usize| {
        let (b, s) = metric.upper_partner(a);
        ops(b).scale(&gr(s))
    };
    let sum = |f: &dyn Fn(usize) -> OperatorElement| idx.iter().fold(OperatorElement::zero(sp), |acc, &a| acc.add(&f(a)));

    let mut out = Vec::new();
    let mut check = |name: &str, lhs: OperatorElement, rhs: OperatorElement| out.push((name.to_string(), lhs == rhs));

    check("[R(lap+1), T] = R(lap-1)", r_lp.bracket(t), r_lm.clone());
    check(
        "[lap, R] = (2/R)((d-1)/2 + E)",
        lap.bracket(&r),
        r_inv.compose(&e.add_scalar(&q(small_d - 1, 2))).scale(&gr(2)),
    );
    let k0 = table.k(0);
    check("K_0 = R(lap+1)/2 - T", k0.clone(), r_lp.scale(&q(1, 2)).sub(t));
    check(
        "K_0^2",
        k0.compose(&k0),
        r_lp.compose(&r_lp).scale(&q(1, 4)).sub(&t.compose(&r_lp)).sub(&r_lm.scale(&q(1, 2))).add(&t.compose(t)),
    );
    let m = |a: usize| table.generator(Generator::M(a));
    let g = |a: usize| table.generator(Generator::Gamma(a));
    check(
        "sum M^a M_a",
        sum(&|a| raise(&m, a).compose(&m(a))),
        r2.compose(&lm).compose(&lm).scale(&q(-1, 4)).sub(&t.compose(&lp).scale(&q(1, 2))).sub(&t.compose(t)).add(e),
    );
    check("sum Gamma^a Gamma_a", sum(&|a| raise(&g, a).compose(&g(a))), e.add(&r2.compose(&lap)));
    check(
        "i sum (M^a Gamma_a + Gamma^a M_a)",
        sum(&|a| raise(&m, a).compose(&g(a)).add(&raise(&g, a).compose(&m(a)))).scale(&i),
        r_lm.scale(&q(1, 2)).add(&t.compose(&r_lp)),
    );
    check("R^2(lap+1)^2 = (R(lap+1))^2 - 2T(lap+1)", r2.compose(&lp).compose(&lp), r_lp.compose(&r_lp).sub(&t.compose(&lp).scale(&gr(2))));
    let x = |a: usize| OperatorElement::coordinate(sp, a);
    let xl = |a: usize| OperatorElement::lowered_coordinate(sp, a);
    let pd = |a: usize| OperatorElement::partial(sp, a);
    let pu = |a: usize| OperatorElement::raised_partial(sp, a);
    check(
        "sum X^a (lap-1) R d_a",
        sum(&|a| x(a).compose(&lm).compose(&r).compose(&pd(a))),
        t.compose(&r_inv).compose(e).scale(&gr(2)).add(&r.compose(e).compose(&lm)),
    );
    check(
        "sum R d^a X_a (lap-1)",
        sum(&|a| r.compose(&pu(a)).compose(&xl(a)).compose(&lm)),
        r.compose(&e.add_scalar(&gr(small_d))).compose(&lm),
    );
    check(
        "2 sum (T d^a R d_a + R d^a T d_a)",
        sum(&|a| t.compose(&pu(a)).compose(&r).compose(&pd(a)).add(&r.compose(&pu(a)).compose(t).compose(&pd(a)))).scale(&gr(2)),
        t.compose(&r_inv).compose(e).scale(&gr(2)).add(&t.compose(&r).compose(&lap).scale(&gr(4))),
    );
    let k = |a: usize| table.k(a);
    check(
        "sum K^a K_a",
        sum(&|a| raise(&k, a).compose(&k(a))),
        r_lp.compose(&r_lp).scale(&q(-1, 4)).add(&t.compose(&r_lp)).add(&r_lm.scale(&q(1, 2))).sub(&t.compose(t)),
    );

    let mut all_ok = [true; 12];
    for &a in &idx {
        let ta = t.compose(&pd(a));
        let jm2 = table.generator(Generator::Jm2);
        let jm1 = table.generator(Generator::Jm1);
        let j0 = table.generator(Generator::J0);
        all_ok[0] &= jm2.bracket(&g(a)).is_zero();
        all_ok[1] &= jm1.bracket(&g(a)) == table.generator(Generator::A(a));
        all_ok[2] &= j0.bracket(&g(a)) == m(a);
        all_ok[3] &= lap.bracket(&xl(a)) == pd(a).scale(&gr(2));
        for &b in &idx {
            let s = gr(sign(metric.parity(a) & metric.parity(b)));
            let eta_ba = gr(metric.lower(b, a));
            let tb = t.compose(&pd(b));
            let jab = table.generator(Generator::J(a, b));
            all_ok[4] &= ta.bracket(&tb).is_zero();
            all_ok[5] &= ta.bracket(&xl(b)) == t.scale(&eta_ba).add(&xl(b).compose(&pd(a)).scale(&s));
            all_ok[6] &= ta.bracket(&xl(b).compose(&lap)) == t.scale(&eta_ba).sub(&xl(b).compose(&pd(a)).scale(&s)).compose(&lap);
            let rpa = r.compose(&pd(a));
            let xb_over_r = r_inv.compose(&xl(b));
            all_ok[7] &= rpa.bracket(&tb) == xb_over_r.compose(t).compose(&pd(a)).scale(&-&s);
            all_ok[8] &= rpa.bracket(&xl(b).compose(&lap))
                == r.compose(&lap).scale(&eta_ba).sub(&xb_over_r.compose(t).compose(&pd(a)).scale(&(&s * &gr(2))));
            all_ok[9] &= jab.bracket(&lap).is_zero() && jab.bracket(&r).is_zero();
            all_ok[10] &= [&jm2, &jm1, &j0].iter().all(|j| jab.bracket(j).is_zero());
        }
        all_ok[11] &= e.bracket(&x(a)) == x(a) && e.bracket(&pd(a)) == pd(a).neg();
    }
    let names = [
        "[J_-2, Gamma_a] = 0",
        "[J_-1, Gamma_a] = A_a",
        "[J_0, Gamma_a] = M_a",
        "[lap, X_a] = 2 d_a",
        "[T d_a, T d_b] = 0",
        "[T d_a, X_b] = T eta_ba + (-1)^[a][b] X_b d_a",
        "[T d_a, X_b lap] = (T eta_ba - (-1)^[a][b] X_b d_a) lap",
        "[R d_a, T d_b] = -(-1)^[a][b] (X_b/R) T d_a",
        "[R d_a, X_b lap] = eta_ba R lap - (-1)^[a][b] (2X_b/R) T d_a",
        "[J_ab, lap] = [J_ab, R] = 0",
        "[J_ab, J_i] = 0",
        "[E, X^a] = X^a, [E, d_a] = -d_a",
    ];
    for (name, ok) in names.iter().zip(all_ok) {
        out.push((name.to_string(), ok));
    }
    out
}

/// `verifyGrading`: `ad_{h_0}` eigenvalues, abelian `g_{±1}`, and stability of `g_{±1}` under `g_0`.
pub fn verify_grading(d: usize, n: usize) -> Result<BracketReport> {
    let table = GeneratorTable::build(d, n)?;
    Ok(grading_report(&table))
}

pub fn grading_report(table: &GeneratorTable) -> BracketReport {
    let dim = table.extended_metric().metric().dim();
    let h0 = table.h0();
    let mut plus: Vec<(String, OperatorElement)> = vec![("i(J_-1 - iJ_-2)".into(), table.k_plus(0))];
    let mut minus: Vec<(String, OperatorElement)> = vec![("K_0".into(), table.k(0))];
    let mut zero: Vec<(String, OperatorElement)> = vec![("h_0".into(), h0.clone())];
    for a in 1..=dim {
        plus.push((format!("M_{a} - iGamma_{a}"), table.k_plus(a)));
        minus.push((format!("K_{a}"), table.k(a)));
        zero.push((format!("A_{a}"), table.generator(Generator::A(a))));
    }
    for a in 1..=dim {
        for b in 1..=dim {
            zero.push((format!("J_{a},{b}"), table.generator(Generator::J(a, b))));
        }
    }

    let span = |set: &[(String, OperatorElement)]| set.iter().map(|(_, o)| o.clone()).collect::<Vec<_>>();
    let plus_ops = span(&plus);
    let minus_ops = span(&minus);
    let mut jobs: Vec<Box<dyn Fn() -> BracketEntry + Sync + '_>> = Vec::new();
    for (set, lambda) in [(&plus, 1i64), (&minus, -1), (&zero, 0)] {
        for (name, y) in set.iter() {
            let h0 = &h0;
            jobs.push(Box::new(move || BracketEntry {
                left: "h_0".into(),
                right: name.clone(),
                expected: format!("{lambda}*{name}"),
                ok: h0.bracket(y) == y.scale(&gr(lambda)),
            }));
        }
    }
    for set in [&plus, &minus] {
        for (nx, x) in set.iter() {
            for (ny, y) in set.iter() {
                jobs.push(Box::new(move || BracketEntry { left: nx.clone(), right: ny.clone(), expected: "0".into(), ok: x.bracket(y).is_zero() }));
            }
        }
    }
    for (nz, z) in zero.iter() {
        for (target, label) in [(&plus_ops, "g_+1"), (&minus_ops, "g_-1")] {
            for y in target.iter() {
                jobs.push(Box::new(move || {
                    let br = z.bracket(y);
                    BracketEntry { left: nz.clone(), right: label.into(), expected: format!("in {label}"), ok: in_operator_span(target, &br) }
                }));
            }
        }
    }
    BracketReport { entries: jobs.par_iter().map(|f| f()).collect() }
}

/// Whether `x` lies in the span of `family`.
pub fn in_operator_span(family: &[OperatorElement], x: &OperatorElement) -> bool {
    let mut all: Vec<&OperatorElement> = family.iter().collect();
    all.push(x);
    let denoms = OperatorElement::common_denominators(all.iter().copied());
    let coords: Vec<_> = family.iter().map(|o| o.coordinates(&denoms)).collect();
    linalg::in_span(&coords, &x.coordinates(&denoms))
}

/// so(2,1) relations among `J_{-2}, J_{-1}, J_0`.
pub fn verify_so21(table: &GeneratorTable) -> Vec<(String, bool)> {
    let jm2 = table.generator(Generator::Jm2);
    let jm1 = table.generator(Generator::Jm1);
    let j0 = table.generator(Generator::J0);
    vec![
        ("[J_-1, J_0] = J_-2".into(), jm1.bracket(&j0) == jm2),
        ("[J_-2, J_-1] = -J_0".into(), jm2.bracket(&jm1) == j0.neg()),
        ("[J_0, J_-2] = J_-1".into(), j0.bracket(&jm2) == jm1),
    ]
}

/// Dimension of `osp(2, D+1|2n)`.
pub fn algebra_dim(d: usize, n: usize) -> usize {
    let m = d + 3;
    m * (m - 1) / 2 + m * 2 * n + n * (2 * n + 1)
}
