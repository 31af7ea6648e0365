//! The symmetric superalgebra `S(V)` of the natural `osp(M|2n)`-module in a
//! weight basis, the `su(1,1)` operators `□, □*, T`, harmonic spaces and the
//! branching rule.
//!
//! `v^1, ..., v^{M+2n}` are ordered by decreasing weight:
//! `ε_1..ε_m, δ_1..δ_n, [0], -δ_n..-δ_1, -ε_m..-ε_1` with `m = ⌊M/2⌋`.
//! `v^a` pairs with `v^{a'}`, `a' = M+2n+1-a`.

use std::collections::BTreeMap;

use num_integer::binomial;

use crate::error::{Result, SuperError};
use crate::linalg::{self, EchelonBasis};
use crate::scalar::GaussianRational;
use crate::supercore::{GrassmannWord, Shape, SuperMonomial, SuperPolynomial};

/// Weight basis of `V` with its invariant pairing.
#[derive(Clone, Debug)]
pub struct SymSpace {
    m: usize,
    n: usize,
    shape: Shape,
    /// Coordinate slot (1-based, even slots first) of each weight index.
    coord: Vec<usize>,
    parity: Vec<u8>,
    /// `η^{1,1'}` used by `□` is negated.
    pairing_fault: bool,
}

impl SymSpace {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m <= 2 * n + 1 {
            return Err(SuperError::SymmetricCondition { m, n });
        }
        let half = m / 2;
        let mut parity = Vec::new();
        parity.extend(std::iter::repeat_n(0, half));
        parity.extend(std::iter::repeat_n(1, n));
        if m % 2 == 1 {
            parity.push(0);
        }
        parity.extend(std::iter::repeat_n(1, n));
        parity.extend(std::iter::repeat_n(0, half));
        let (mut even, mut odd) = (0, m);
        let coord = parity
            .iter()
            .map(|&p| {
                if p == 0 {
                    even += 1;
                    even
                } else {
                    odd += 1;
                    odd
                }
            })
            .collect();
        Ok(Self { m, n, shape: Shape::new(m, 2 * n), coord, parity, pairing_fault: false })
    }

    /// The same space whose `□` uses a pairing with one sign flipped.
    pub fn with_pairing_fault(m: usize, n: usize) -> Result<Self> {
        Ok(Self { pairing_fault: true, ..Self::new(m, n)? })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m + 2 * self.n
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn parity(&self, a: usize) -> u8 {
        self.parity[a - 1]
    }

    pub fn partner(&self, a: usize) -> usize {
        self.dim() + 1 - a
    }

    /// `η^{ab} = <v^a, v^b>`.
    pub fn upper(&self, a: usize, b: usize) -> i64 {
        if b != self.partner(a) {
            return 0;
        }
        if self.parity(a) == 1 && a > b {
            -1
        } else {
            1
        }
    }

    /// `η_{ab}`, the inverse matrix.
    pub fn lower(&self, a: usize, b: usize) -> i64 {
        if self.parity(a) == 1 {
            -self.upper(a, b)
        } else {
            self.upper(a, b)
        }
    }

    fn box_upper(&self, a: usize, b: usize) -> i64 {
        let e = self.upper(a, b);
        if self.pairing_fault && (a, b) == (1, self.dim()) || self.pairing_fault && (a, b) == (self.dim(), 1) {
            -e
        } else {
            e
        }
    }

    /// Weight of `v^a` as `(ε_1..ε_m, δ_1..δ_n)` coordinates.
    pub fn weight(&self, a: usize) -> Vec<i64> {
        let half = self.m / 2;
        let mut w = vec![0; half + self.n];
        let total = self.dim();
        let (idx, sgn) = if a <= half + self.n { (a, 1) } else { (total + 1 - a, -1) };
        if idx <= half + self.n && !(self.m % 2 == 1 && a == half + self.n + 1) {
            w[idx - 1] = sgn;
        }
        w
    }

    pub fn v(&self, a: usize) -> SuperPolynomial {
        SuperPolynomial::coordinate(self.shape, self.coord[a - 1])
    }

    /// `v_a = Σ_b η_{ab} v^b`.
    pub fn v_lower(&self, a: usize) -> SuperPolynomial {
        let b = self.partner(a);
        self.v(b).scale(&GaussianRational::from_int(self.lower(a, b)))
    }

    pub fn derive(&self, a: usize, p: &SuperPolynomial) -> SuperPolynomial {
        p.derive(self.coord[a - 1])
    }

    /// `□* = (1/2) Σ v^a η_{ab} v^b`, acting by multiplication.
    pub fn box_star(&self, p: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero(self.shape);
        for a in 1..=self.dim() {
            let b = self.partner(a);
            let q = &(&self.v(a) * &self.v(b)) * p;
            out.add_assign(&q.scale(&GaussianRational::ratio(self.lower(a, b), 2)));
        }
        out
    }

    /// `□ = (1/2) Σ η^{ba} ∂_a ∂_b`.
    pub fn box_op(&self, p: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero(self.shape);
        for a in 1..=self.dim() {
            let b = self.partner(a);
            let q = self.derive(a, &self.derive(b, p));
            out.add_assign(&q.scale(&GaussianRational::ratio(self.box_upper(b, a), 2)));
        }
        out
    }

    /// `T = E + (M-2n)/2`.
    pub fn t_op(&self, p: &SuperPolynomial) -> SuperPolynomial {
        let shift = self.m as i64 - 2 * self.n as i64;
        p.scale_by_degree(|deg| GaussianRational::ratio(2 * deg as i64 + shift, 2))
    }

    /// `J_{ab} = v_a ∂_b - (-1)^{[a][b]} v_b ∂_a`.
    pub fn j_op(&self, a: usize, b: usize, p: &SuperPolynomial) -> SuperPolynomial {
        let s = if self.parity(a) & self.parity(b) == 1 { -1 } else { 1 };
        let first = &self.v_lower(a) * &self.derive(b, p);
        let second = &self.v_lower(b) * &self.derive(a, p);
        &first - &second.scale(&GaussianRational::from_int(s))
    }

    /// Degree-`l` monomials: even exponents over `M` slots, odd words over `2n` slots.
    pub fn basis(&self, l: usize) -> Vec<SuperMonomial> {
        let mut out = Vec::new();
        let odd_slots = 2 * self.n;
        for word in 0u32..(1u32 << odd_slots) {
            let k = word.count_ones() as usize;
            if k > l {
                continue;
            }
            let mut exps = vec![0u16; self.m];
            fill_exponents(&mut exps, 0, l - k, &mut |e| {
                out.push(SuperMonomial { even: e.iter().copied().collect(), odd: GrassmannWord(word) });
            });
        }
        out.sort();
        out
    }

    pub fn monomial(&self, mono: &SuperMonomial) -> SuperPolynomial {
        SuperPolynomial::term(mono.clone(), GaussianRational::from_int(1), self.shape)
    }
}

fn fill_exponents(exps: &mut Vec<u16>, pos: usize, left: usize, f: &mut dyn FnMut(&[u16])) {
    if pos + 1 == exps.len() {
        exps[pos] = left as u16;
        f(exps);
        exps[pos] = 0;
        return;
    }
    for e in 0..=left {
        exps[pos] = e as u16;
        fill_exponents(exps, pos + 1, left - e, f);
    }
    exps[pos] = 0;
}

/// `dim S(V)_l = Σ_k C(M-1+k, k) C(2n, l-k)`.
pub fn sym_dim(m: usize, n: usize, l: i64) -> u64 {
    if l < 0 {
        return 0;
    }
    let l = l as u64;
    let (m, n) = (m as u64, n as u64);
    (0..=l)
        .filter(|&k| l - k <= 2 * n)
        .map(|k| binomial(m - 1 + k, k) * binomial(2 * n, l - k))
        .sum()
}

/// `dim S_l - dim S_{l-2}`.
pub fn dim_irr(m: usize, n: usize, l: usize) -> u64 {
    sym_dim(m, n, l as i64) - sym_dim(m, n, l as i64 - 2)
}

fn coords(p: &SuperPolynomial) -> BTreeMap<SuperMonomial, GaussianRational> {
    p.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

/// Images of every basis monomial of `S_l` under `op`.
pub fn images(sp: &SymSpace, l: usize, op: impl Fn(&SuperPolynomial) -> SuperPolynomial) -> Vec<SuperPolynomial> {
    sp.basis(l).iter().map(|m| op(&sp.monomial(m))).collect()
}

fn rank_of(polys: &[SuperPolynomial]) -> usize {
    let c: Vec<_> = polys.iter().map(coords).collect();
    linalg::rank(&c)
}

/// `[T,□*] = 2□*`, `[T,□] = -2□`, `[□*,□] = -T` on `S_l` for every `l <= l_max`.
pub fn verify_su11(sp: &SymSpace, l_max: usize) -> bool {
    (0..=l_max).all(|l| {
        sp.basis(l).iter().all(|mono| {
            let p = sp.monomial(mono);
            let t_bs = &sp.t_op(&sp.box_star(&p)) - &sp.box_star(&sp.t_op(&p));
            let t_b = &sp.t_op(&sp.box_op(&p)) - &sp.box_op(&sp.t_op(&p));
            let bs_b = &sp.box_star(&sp.box_op(&p)) - &sp.box_op(&sp.box_star(&p));
            t_bs == sp.box_star(&p).scale(&GaussianRational::from_int(2))
                && t_b == sp.box_op(&p).scale(&GaussianRational::from_int(-2))
                && bs_b == -&sp.t_op(&p)
        })
    })
}

/// Nullspace dimension of `□` on `S_l`.
pub fn harmonic_dim(sp: &SymSpace, l: usize) -> usize {
    let imgs = images(sp, l, |p| sp.box_op(p));
    sp.basis(l).len() - rank_of(&imgs)
}

/// `ker □ ∩ □* S_{l-2} = 0` and the dimensions add up to `dim S_l`.
pub fn verify_decomposition(sp: &SymSpace, l: usize, box_star: impl Fn(&SuperPolynomial) -> SuperPolynomial) -> bool {
    if l < 2 {
        return harmonic_dim(sp, l) == sp.basis(l).len();
    }
    let lower = sp.basis(l - 2).len();
    let up = images(sp, l - 2, &box_star);
    let injective = rank_of(&up) == lower;
    // □ restricted to □*S_{l-2} has trivial kernel
    let round: Vec<_> = up.iter().map(|p| sp.box_op(p)).collect();
    let trivial_meet = rank_of(&round) == lower;
    injective && trivial_meet && harmonic_dim(sp, l) + lower == sp.basis(l).len()
}

/// Dimension of the span of the orbit of `(v^1)^l` under the `J_{ab}`, if `(v^1)^l` is harmonic.
pub fn cyclic_span_dim(sp: &SymSpace, l: usize) -> Option<usize> {
    let mut hw = SuperPolynomial::one(sp.shape());
    for _ in 0..l {
        hw = &hw * &sp.v(1);
    }
    if !sp.box_op(&hw).is_zero() {
        return None;
    }
    let cols: BTreeMap<SuperMonomial, usize> = sp.basis(l).into_iter().enumerate().map(|(i, m)| (m, i)).collect();
    let to_row = |p: &SuperPolynomial| -> BTreeMap<usize, GaussianRational> { p.terms().map(|(m, c)| (cols[m], c.clone())).collect() };
    let mut basis = EchelonBasis::new();
    basis.insert(&to_row(&hw));
    let mut frontier = vec![hw];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            for a in 1..=sp.dim() {
                for b in 1..=sp.dim() {
                    let q = sp.j_op(a, b, p);
                    if !q.is_zero() && basis.insert(&to_row(&q)) {
                        next.push(q);
                    }
                }
            }
        }
        frontier = next;
    }
    Some(basis.rank())
}

/// Harmonic, and its `J`-orbit spans the whole harmonic space.
pub fn cyclic_span_check(sp: &SymSpace, l: usize) -> bool {
    cyclic_span_dim(sp, l) == Some(harmonic_dim(sp, l))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branching {
    pub lhs: u64,
    pub terms: Vec<u64>,
    pub ok: bool,
}

/// `dimIrr(M,n,l) = Σ_k dimIrr(M-1,n,l-k)`, with the left side also checked against the nullspace of `□`.
pub fn branching_check(m: usize, n: usize, l: usize) -> Result<Branching> {
    let sp = SymSpace::new(m, n)?;
    if m <= 2 * n + 2 {
        return Err(SuperError::SymmetricCondition { m: m - 1, n });
    }
    let lhs = dim_irr(m, n, l);
    let terms: Vec<u64> = (0..=l).map(|k| dim_irr(m - 1, n, l - k)).collect();
    let ok = lhs == terms.iter().sum::<u64>() && harmonic_dim(&sp, l) as u64 == lhs;
    Ok(Branching { lhs, terms, ok })
}

/// `[J_{ab}, □] = [J_{ab}, □*] = [J_{ab}, T] = 0` on `S_l` for `l <= l_max`.
pub fn osp_invariance_check(sp: &SymSpace, l_max: usize) -> bool {
    let dim = sp.dim();
    (0..=l_max).all(|l| {
        sp.basis(l).iter().all(|mono| {
            let p = sp.monomial(mono);
            (1..=dim).all(|a| {
                (1..=dim).all(|b| {
                    let j = |q: &SuperPolynomial| sp.j_op(a, b, q);
                    j(&sp.box_op(&p)) == sp.box_op(&j(&p)) && j(&sp.box_star(&p)) == sp.box_star(&j(&p)) && j(&sp.t_op(&p)) == sp.t_op(&j(&p))
                })
            })
        })
    })
}

/// Structure relations of the `J_{ab}` as operators on `S_l`.
pub fn verify_j_relations(sp: &SymSpace, l: usize) -> bool {
    let dim = sp.dim();
    let pr = |a: usize| sp.parity(a) as i64;
    let s = |e: i64| if e % 2 == 0 { 1 } else { -1 };
    let basis = sp.basis(l);
    let idx: Vec<usize> = (1..=dim).collect();
    idx.iter().all(|&k| {
        idx.iter().all(|&ll| {
            idx.iter().all(|&p| {
                idx.iter().all(|&q| {
                    let par1 = (pr(k) + pr(ll)) % 2;
                    let par2 = (pr(p) + pr(q)) % 2;
                    basis.iter().all(|mono| {
                        let f = sp.monomial(mono);
                        let lhs = &sp.j_op(k, ll, &sp.j_op(p, q, &f)) - &sp.j_op(p, q, &sp.j_op(k, ll, &f)).scale(&GaussianRational::from_int(s(par1 * par2)));
                        let c = |x: i64| GaussianRational::from_int(x);
                        let mut rhs = sp.j_op(k, q, &f).scale(&c(sp.lower(p, ll)));
                        rhs.add_assign(&sp.j_op(ll, p, &f).scale(&c(s(pr(k) * (pr(ll) + pr(p))) * sp.lower(q, k))));
                        rhs.sub_assign(&sp.j_op(k, p, &f).scale(&c(s(pr(p) * pr(q)) * sp.lower(q, ll))));
                        rhs.sub_assign(&sp.j_op(ll, q, &f).scale(&c(s(pr(k) * pr(ll)) * sp.lower(p, k))));
                        lhs == rhs
                    })
                })
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition() {
        assert!(matches!(SymSpace::new(3, 1), Err(SuperError::SymmetricCondition { m: 3, n: 1 })));
        assert!(SymSpace::new(4, 1).is_ok());
    }

    #[test]
    fn basis_counts() {
        let sp = SymSpace::new(5, 1).unwrap();
        assert_eq!(sp.basis(2).len(), 26);
        for l in 0..5 {
            assert_eq!(sp.basis(l).len() as u64, sym_dim(5, 1, l as i64));
        }
        assert_eq!(sym_dim(4, 1, 2), 19);
    }

    #[test]
    fn pairing_is_inverse() {
        let sp = SymSpace::new(6, 2).unwrap();
        let d = sp.dim();
        for a in 1..=d {
            for b in 1..=d {
                let s: i64 = (1..=d).map(|c| sp.upper(a, c) * sp.lower(c, b)).sum();
                assert_eq!(s, i64::from(a == b));
            }
        }
    }

    #[test]
    fn weights() {
        let sp = SymSpace::new(5, 1).unwrap();
        assert_eq!(sp.weight(1), vec![1, 0, 0]);
        assert_eq!(sp.weight(3), vec![0, 0, 1]);
        assert_eq!(sp.weight(4), vec![0, 0, 0]);
        assert_eq!(sp.weight(7), vec![-1, 0, 0]);
    }

    #[test]
    fn t_is_scalar_and_box_kills_constants() {
        let sp = SymSpace::new(5, 1).unwrap();
        let one = SuperPolynomial::one(sp.shape());
        assert!(sp.box_op(&one).is_zero());
        for mono in sp.basis(2) {
            let p = sp.monomial(&mono);
            assert_eq!(sp.t_op(&p), p.scale(&GaussianRational::ratio(7, 2)));
        }
        // □□*(1) = T(1)
        assert_eq!(sp.box_op(&sp.box_star(&one)), sp.t_op(&one));
    }

    #[test]
    fn su11_and_dims() {
        for (m, n) in [(4, 1), (5, 1)] {
            let sp = SymSpace::new(m, n).unwrap();
            assert!(verify_su11(&sp, 3));
            for l in 0..4 {
                assert_eq!(harmonic_dim(&sp, l) as u64, dim_irr(m, n, l));
            }
        }
        let sp = SymSpace::new(5, 1).unwrap();
        assert_eq!(harmonic_dim(&sp, 1), 7);
        assert_eq!(harmonic_dim(&sp, 2), 25);
        assert!(!verify_su11(&SymSpace::with_pairing_fault(5, 1).unwrap(), 2));
    }

    #[test]
    fn unnormalized_relations_fail() {
        // without the factor 1/2 and with the shift (M+2n-1)/2, [□*, □] = -T cannot hold
        let sp = SymSpace::new(4, 1).unwrap();
        let one = SuperPolynomial::one(sp.shape());
        let four = GaussianRational::from_int(4);
        let lhs = -&sp.box_op(&sp.box_star(&one)).scale(&four);
        let t_lit = one.scale(&GaussianRational::ratio(4 + 2 - 1, 2));
        assert_ne!(lhs, -&t_lit);
    }

    #[test]
    fn decomposition_and_cycles() {
        let sp = SymSpace::new(5, 1).unwrap();
        for l in 2..4 {
            assert!(verify_decomposition(&sp, l, |p| sp.box_star(p)));
        }
        let v1sq = &sp.v(1) * &sp.v(1);
        assert!(!verify_decomposition(&sp, 2, |p| &v1sq * p));
        assert_eq!(cyclic_span_dim(&sp, 1), Some(7));
        assert_eq!(cyclic_span_dim(&sp, 2), Some(25));
        assert!(cyclic_span_check(&sp, 3));
    }

    #[test]
    fn branching_examples() {
        let b = branching_check(5, 1, 2).unwrap();
        assert_eq!(b, Branching { lhs: 25, terms: vec![18, 6, 1], ok: true });
        assert!(branching_check(5, 1, 0).unwrap().ok);
        assert!(branching_check(5, 1, 3).unwrap().ok);
        assert!(matches!(branching_check(4, 1, 2), Err(SuperError::SymmetricCondition { m: 3, n: 1 })));
    }

    #[test]
    fn invariance() {
        let sp = SymSpace::new(5, 1).unwrap();
        assert!(osp_invariance_check(&sp, 2));
        assert!(verify_j_relations(&sp, 1));
        assert!(!osp_invariance_check(&SymSpace::with_pairing_fault(5, 1).unwrap(), 2));
    }
}
