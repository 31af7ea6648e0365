//! Gaussian-rational polynomials in `D` even and `2n` odd coordinates, and the
//! orthosymplectic metric of `R^{D|2n}`.
//!
//! Coordinates are numbered `1..=D+2n`; `X^a` is even for `a <= D`. The odd
//! coordinates generate a Grassmann algebra whose monomials are stored as bitsets
//! in ascending index order, so every sign is fixed at construction time.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Result, SuperError};
use crate::scalar::GaussianRational;

/// Number of even and odd coordinates of a polynomial ring.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Shape {
    pub even: usize,
    pub odd: usize,
}

impl Shape {
    pub fn new(even: usize, odd: usize) -> Self {
        assert!(odd <= 32, "at most 32 odd coordinates are supported");
        Self { even, odd }
    }

    pub fn dim(&self) -> usize {
        self.even + self.odd
    }

    pub fn check(&self, other: &Shape) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(SuperError::ShapeMismatch { left: format!("{self}"), right: format!("{other}") })
        }
    }

    /// Resolves a 1-based coordinate index.
    pub fn coord(&self, a: usize) -> Coord {
        assert!(a >= 1 && a <= self.dim(), "coordinate {a} out of range for {self}");
        if a <= self.even {
            Coord::Even(a - 1)
        } else {
            Coord::Odd(a - self.even - 1)
        }
    }

    /// `[a]`: 0 for even, 1 for odd coordinates.
    pub fn parity(&self, a: usize) -> u8 {
        match self.coord(a) {
            Coord::Even(_) => 0,
            Coord::Odd(_) => 1,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R^{{{}|{}}}", self.even, self.odd)
    }
}

/// Storage slot of a coordinate: position among the even or among the odd ones.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Coord {
    Even(usize),
    Odd(usize),
}

/// A 1-based coordinate index with its parity `[a]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct IndexParity {
    pub index: usize,
    pub parity: u8,
}

/// Product of distinct odd generators in ascending order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct GrassmannWord(pub u32);

impl GrassmannWord {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn single(slot: usize) -> Self {
        Self(1 << slot)
    }

    pub fn degree(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn parity(&self) -> u8 {
        (self.0.count_ones() & 1) as u8
    }

    pub fn contains(&self, slot: usize) -> bool {
        self.0 & (1 << slot) != 0
    }

    pub fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..32).filter(move |s| self.contains(*s))
    }

    /// Number of generators in the word strictly below `slot`.
    pub fn count_below(&self, slot: usize) -> u32 {
        (self.0 & ((1u32 << slot) - 1)).count_ones()
    }

    /// Product `self · rhs` brought to ascending order: `None` when an index repeats.
    pub fn mul(&self, rhs: &GrassmannWord) -> Option<(i8, GrassmannWord)> {
        if self.0 & rhs.0 != 0 {
            return None;
        }
        let mut swaps = 0u32;
        let mut rest = rhs.0;
        while rest != 0 {
            let t = rest.trailing_zeros();
            rest &= rest - 1;
            // generators of `self` that must move past X_t
            swaps += (self.0 >> t).count_ones();
        }
        let sign = if swaps % 2 == 0 { 1 } else { -1 };
        Some((sign, GrassmannWord(self.0 | rhs.0)))
    }

    /// Left derivative with respect to the odd generator in `slot`.
    pub fn derive(&self, slot: usize) -> Option<(i8, GrassmannWord)> {
        if !self.contains(slot) {
            return None;
        }
        let sign = if self.count_below(slot) % 2 == 0 { 1 } else { -1 };
        Some((sign, GrassmannWord(self.0 & !(1 << slot))))
    }
}

pub type Exponents = SmallVec<[u16; 8]>;

/// `x^alpha · theta_S` with dense even exponents and an odd bitset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SuperMonomial {
    pub even: Exponents,
    pub odd: GrassmannWord,
}

impl SuperMonomial {
    pub fn one(shape: Shape) -> Self {
        Self { even: SmallVec::from_elem(0, shape.even), odd: GrassmannWord::empty() }
    }

    pub fn coordinate(shape: Shape, a: usize) -> Self {
        let mut m = Self::one(shape);
        match shape.coord(a) {
            Coord::Even(s) => m.even[s] = 1,
            Coord::Odd(s) => m.odd = GrassmannWord::single(s),
        }
        m
    }

    pub fn parity(&self) -> u8 {
        self.odd.parity()
    }

    pub fn even_degree(&self) -> u32 {
        self.even.iter().map(|&e| e as u32).sum()
    }

    pub fn degree(&self) -> u32 {
        self.even_degree() + self.odd.degree()
    }

    pub fn is_one(&self) -> bool {
        self.odd.0 == 0 && self.even.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, rhs: &SuperMonomial) -> Option<(i8, SuperMonomial)> {
        let (sign, odd) = self.odd.mul(&rhs.odd)?;
        let even = self.even.iter().zip(rhs.even.iter()).map(|(a, b)| a + b).collect();
        Some((sign, SuperMonomial { even, odd }))
    }
}

/// Finite `Q(i)`-combination of super-monomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SuperPolynomial {
    shape: Shape,
    terms: BTreeMap<SuperMonomial, GaussianRational>,
}

impl SuperPolynomial {
    pub fn zero(shape: Shape) -> Self {
        Self { shape, terms: BTreeMap::new() }
    }

    pub fn constant(shape: Shape, c: GaussianRational) -> Self {
        Self::term(SuperMonomial::one(shape), c, shape)
    }

    pub fn one(shape: Shape) -> Self {
        Self::constant(shape, GaussianRational::one())
    }

    pub fn term(m: SuperMonomial, c: GaussianRational, shape: Shape) -> Self {
        debug_assert_eq!(m.even.len(), shape.even);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { shape, terms }
    }

    /// The coordinate `X^a`.
    pub fn coordinate(shape: Shape, a: usize) -> Self {
        Self::term(SuperMonomial::coordinate(shape, a), GaussianRational::one(), shape)
    }

    pub fn from_terms(shape: Shape, terms: impl IntoIterator<Item = (SuperMonomial, GaussianRational)>) -> Self {
        let mut p = Self::zero(shape);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SuperMonomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &SuperMonomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The constant term, if the polynomial is a scalar.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: SuperMonomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, rhs: &SuperPolynomial) {
        debug_assert_eq!(self.shape, rhs.shape);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub_assign(&mut self, rhs: &SuperPolynomial) {
        debug_assert_eq!(self.shape, rhs.shape);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), &-c);
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> SuperPolynomial {
        if c.is_zero() {
            return Self::zero(self.shape);
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        Self { shape: self.shape, terms }
    }

    pub fn checked_add(&self, rhs: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.shape.check(&rhs.shape)?;
        let mut out = self.clone();
        out.add_assign(rhs);
        Ok(out)
    }

    pub fn checked_mul(&self, rhs: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.shape.check(&rhs.shape)?;
        let mut out = Self::zero(self.shape);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                if let Some((sign, m)) = m1.mul(m2) {
                    let c = c1 * c2;
                    out.add_term(m, &if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `Some(0)` or `Some(1)` when parity-homogeneous, `None` for mixed (the zero polynomial is even).
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|m| m.parity());
        let first = it.next().unwrap_or(0);
        it.all(|p| p == first).then_some(first)
    }

    /// Splits into (even part, odd part).
    pub fn split_parity(&self) -> (SuperPolynomial, SuperPolynomial) {
        let mut even = Self::zero(self.shape);
        let mut odd = Self::zero(self.shape);
        for (m, c) in &self.terms {
            let target = if m.parity() == 0 { &mut even } else { &mut odd };
            target.terms.insert(m.clone(), c.clone());
        }
        (even, odd)
    }

    /// Minimal total degree over the stored monomials.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    /// Left partial derivative `∂_a`.
    pub fn derive(&self, a: usize) -> SuperPolynomial {
        let mut out = Self::zero(self.shape);
        match self.shape.coord(a) {
            Coord::Even(s) => {
                for (m, c) in &self.terms {
                    let e = m.even[s];
                    if e > 0 {
                        let mut m2 = m.clone();
                        m2.even[s] -= 1;
                        out.add_term(m2, &(c * &GaussianRational::from_int(e as i64)));
                    }
                }
            }
            Coord::Odd(s) => {
                for (m, c) in &self.terms {
                    if let Some((sign, w)) = m.odd.derive(s) {
                        let m2 = SuperMonomial { even: m.even.clone(), odd: w };
                        out.add_term(m2, &if sign < 0 { -c } else { c.clone() });
                    }
                }
            }
        }
        out
    }

    /// Applies `f` to every coefficient (e.g. complex conjugation).
    pub fn map_coeffs(&self, f: impl Fn(&GaussianRational) -> GaussianRational) -> SuperPolynomial {
        let mut out = Self::zero(self.shape);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    /// Multiplies each monomial of total degree `k` by `weight(k)`.
    pub fn scale_by_degree(&self, weight: impl Fn(u32) -> GaussianRational) -> SuperPolynomial {
        let mut out = Self::zero(self.shape);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &(c * &weight(m.degree())));
        }
        out
    }

    /// Exact quotient by a divisor of the form `x_1^2 + rest`, where `rest` is even,
    /// central and free of `x_1`. Returns `None` if the division leaves a remainder.
    pub fn exact_div_monic_square(&self, rest: &SuperPolynomial) -> Option<SuperPolynomial> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.shape.even == 0 || self.min_degree().unwrap_or(0) < 2 {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = Self::zero(self.shape);
        loop {
            let lead = rem
                .terms
                .iter()
                .filter(|(m, _)| m.even[0] >= 2)
                .max_by_key(|(m, _)| m.even[0])
                .map(|(m, c)| (m.clone(), c.clone()));
            let Some((m, c)) = lead else { break };
            let mut q = m.clone();
            q.even[0] -= 2;
            rem.terms.remove(&m);
            let t = Self::term(q.clone(), c.clone(), self.shape);
            rem.sub_assign(&(&t * rest));
            quot.add_term(q, &c);
        }
        rem.is_zero().then_some(quot)
    }
}

impl Add for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn add(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.checked_add(rhs).expect("polynomial shape mismatch")
    }
}

impl Sub for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn sub(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.shape.check(&rhs.shape).expect("polynomial shape mismatch");
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl Mul for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn mul(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.checked_mul(rhs).expect("polynomial shape mismatch")
    }
}

impl Neg for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn neg(self) -> SuperPolynomial {
        self.scale(&GaussianRational::from_int(-1))
    }
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (s, &e) in m.even.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*X{}", s + 1)?,
                    _ => write!(f, "*X{}^{}", s + 1, e)?,
                }
            }
            for s in m.odd.slots() {
                write!(f, "*X{}", self.shape.even + s + 1)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The metric `η = I_D ⊕ [[0, -I_n], [I_n, 0]]` of `R^{D|2n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Metric {
    d: usize,
    n: usize,
}

impl Metric {
    /// Any `D >= 1`, `n >= 0`.
    pub fn new(d: usize, n: usize) -> Self {
        assert!(d >= 1, "at least one even coordinate is required");
        Self { d, n }
    }

    /// A metric for the Kepler problem, which needs `D > 2n + 1`.
    pub fn kepler(d: usize, n: usize) -> Result<Self> {
        if d > 2 * n + 1 {
            Ok(Self::new(d, n))
        } else {
            Err(SuperError::DimensionCondition { d, n })
        }
    }

    pub fn even_dim(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `D + 2n`.
    pub fn dim(&self) -> usize {
        self.d + 2 * self.n
    }

    /// Superdimension `d = D - 2n` (may be negative for general metrics).
    pub fn superdim(&self) -> i64 {
        self.d as i64 - 2 * self.n as i64
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.d, 2 * self.n)
    }

    pub fn parity(&self, a: usize) -> u8 {
        u8::from(a > self.d)
    }

    pub fn index(&self, a: usize) -> IndexParity {
        IndexParity { index: a, parity: self.parity(a) }
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.dim()
    }

    /// `η_{ab}`.
    pub fn lower(&self, a: usize, b: usize) -> i64 {
        let (d, n) = (self.d, self.n);
        if a <= d || b <= d {
            return i64::from(a == b);
        }
        if a <= d + n && b == a + n {
            -1
        } else if a > d + n && b + n == a {
            1
        } else {
            0
        }
    }

    /// `η^{ab}`, the entries of the inverse matrix.
    pub fn upper(&self, a: usize, b: usize) -> i64 {
        let (d, n) = (self.d, self.n);
        if a <= d || b <= d {
            return i64::from(a == b);
        }
        if a <= d + n && b == a + n {
            1
        } else if a > d + n && b + n == a {
            -1
        } else {
            0
        }
    }

    /// Index `b` and value `η_{ab}` of the unique nonzero entry in row `a`.
    pub fn lower_partner(&self, a: usize) -> (usize, i64) {
        let b = self.partner(a);
        (b, self.lower(a, b))
    }

    /// Index `b` and value `η^{ab}` of the unique nonzero entry in row `a`.
    pub fn upper_partner(&self, a: usize) -> (usize, i64) {
        let b = self.partner(a);
        (b, self.upper(a, b))
    }

    fn partner(&self, a: usize) -> usize {
        let (d, n) = (self.d, self.n);
        if a <= d {
            a
        } else if a <= d + n {
            a + n
        } else {
            a - n
        }
    }

    /// `X^a`.
    pub fn coordinate(&self, a: usize) -> SuperPolynomial {
        SuperPolynomial::coordinate(self.shape(), a)
    }

    /// `X_a = Σ_b η_{ab} X^b`.
    pub fn lowered_coordinate(&self, a: usize) -> SuperPolynomial {
        let (b, s) = self.lower_partner(a);
        self.coordinate(b).scale(&GaussianRational::from_int(s))
    }
}

/// `Q = Σ_a X^a X_a = r^2 + Θ^2`, the square of the radial element.
pub fn build_q(metric: &Metric) -> SuperPolynomial {
    let mut q = SuperPolynomial::zero(metric.shape());
    for a in metric.indices() {
        q.add_assign(&(&metric.coordinate(a) * &metric.lowered_coordinate(a)));
    }
    q
}

/// Bar conjugation: the conjugate-linear algebra automorphism fixing even
/// coordinates and sending each odd `X^μ` to `X_μ`.
pub fn bar_conjugate(p: &SuperPolynomial, metric: &Metric) -> SuperPolynomial {
    let shape = p.shape();
    let mut out = SuperPolynomial::zero(shape);
    for (m, c) in p.terms() {
        let mut image = SuperPolynomial::term(
            SuperMonomial { even: m.even.clone(), odd: GrassmannWord::empty() },
            c.conj(),
            shape,
        );
        for s in m.odd.slots() {
            image = &image * &metric.lowered_coordinate(shape.even + s + 1);
        }
        out.add_assign(&image);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metric(d: usize, n: usize) -> Metric {
        Metric::new(d, n)
    }

    #[test]
    fn grassmann_signs() {
        let t1 = GrassmannWord::single(0);
        let t2 = GrassmannWord::single(1);
        assert_eq!(t1.mul(&t2), Some((1, GrassmannWord(0b11))));
        assert_eq!(t2.mul(&t1), Some((-1, GrassmannWord(0b11))));
        assert_eq!(t1.mul(&t1), None);
        let t3 = GrassmannWord::single(2);
        // θ3 · θ1θ2 = θ1θ2θ3 after two transpositions
        assert_eq!(t3.mul(&GrassmannWord(0b11)), Some((1, GrassmannWord(0b111))));
        assert_eq!(t2.mul(&GrassmannWord(0b101)), Some((-1, GrassmannWord(0b111))));
    }

    #[test]
    fn poly_arith_examples() {
        let m = metric(3, 1);
        let x1 = m.coordinate(1);
        let x2 = m.coordinate(2);
        let t = m.coordinate(4);
        let u = m.coordinate(5);
        let lhs = &(&x1 + &t) * &t;
        assert_eq!(lhs, &x1 * &t);
        assert!((&(&t * &u) * &u).is_zero());
        assert!((&(&x1 * &x2) - &(&x2 * &x1)).is_zero());
        assert_eq!(&t * &u, -&(&u * &t));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = metric(3, 0).coordinate(1);
        let b = metric(3, 1).coordinate(1);
        assert!(matches!(a.checked_mul(&b), Err(SuperError::ShapeMismatch { .. })));
        assert!(a.checked_add(&b).is_err());
    }

    #[test]
    fn metric_inverse() {
        for (d, n) in [(3, 0), (4, 1), (6, 2)] {
            let m = metric(d, n);
            for a in m.indices() {
                for c in m.indices() {
                    let s: i64 = m.indices().map(|b| m.upper(a, b) * m.lower(b, c)).sum();
                    assert_eq!(s, i64::from(a == c));
                }
            }
        }
    }

    #[test]
    fn q_examples() {
        let m = metric(2, 0);
        let expect = &(&m.coordinate(1) * &m.coordinate(1)) + &(&m.coordinate(2) * &m.coordinate(2));
        assert_eq!(build_q(&m), expect);

        let m = metric(2, 1);
        let two = GaussianRational::from_int(2);
        let expect = &(&(&m.coordinate(1) * &m.coordinate(1)) + &(&m.coordinate(2) * &m.coordinate(2)))
            - &(&m.coordinate(3) * &m.coordinate(4)).scale(&two);
        assert_eq!(build_q(&m), expect);
    }

    #[test]
    fn bar_examples() {
        let m = metric(3, 1);
        let ix1 = m.coordinate(1).scale(&GaussianRational::i());
        assert_eq!(bar_conjugate(&ix1, &m), ix1.scale(&GaussianRational::from_int(-1)));
        assert_eq!(bar_conjugate(&m.coordinate(4), &m), -&m.coordinate(5));
        let p = &m.coordinate(1) * &m.coordinate(4);
        assert_eq!(bar_conjugate(&p, &m), -&(&m.coordinate(1) * &m.coordinate(5)));
        // bar(Q) = Q
        let q = build_q(&m);
        assert_eq!(bar_conjugate(&q, &m), q);
    }

    #[test]
    fn odd_derivative_sign() {
        let m = metric(2, 1);
        let p = &m.coordinate(3) * &m.coordinate(4);
        assert_eq!(p.derive(3), m.coordinate(4));
        assert_eq!(p.derive(4), -&m.coordinate(3));
    }

    #[test]
    fn q_division() {
        let m = metric(3, 1);
        let q = build_q(&m);
        let rest = &q - &(&m.coordinate(1) * &m.coordinate(1));
        let f = &(&m.coordinate(2) * &m.coordinate(4)) + &m.coordinate(1);
        let p = &(&q * &q) * &f;
        let quot = p.exact_div_monic_square(&rest).unwrap();
        assert_eq!(quot, &q * &f);
        assert!((&p + &m.coordinate(2)).exact_div_monic_square(&rest).is_none());
        assert!(f.exact_div_monic_square(&rest).is_none());
    }
}
