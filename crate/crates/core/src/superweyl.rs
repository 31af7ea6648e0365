//! The operator algebra generated by `X^a`, `∂_a` and `R^{±1}`.
//!
//! Every element is stored in the normal order `X-part · R^k · ∂-part`: for each
//! derivative multi-index the coefficient is a [`RadialFraction`]
//! `(N_0 + N_1 R) / R^m`. Even powers of `R` in numerators are rewritten with
//! `R^2 = Q`, and fractions are kept at their minimal denominator, so two
//! operators are equal exactly when their stored forms coincide.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, SuperError};
use crate::scalar::GaussianRational;
use crate::supercore::{build_q, Coord, GrassmannWord, Metric, Shape, SuperMonomial, SuperPolynomial};

/// A metric together with the cached polynomials every computation needs.
#[derive(Debug)]
pub struct Superspace {
    metric: Metric,
    q: SuperPolynomial,
    q_rest: SuperPolynomial,
    coords: Vec<SuperPolynomial>,
    lowered: Vec<SuperPolynomial>,
}

impl Superspace {
    pub fn new(metric: Metric) -> Arc<Self> {
        let q = build_q(&metric);
        let x1 = metric.coordinate(1);
        let q_rest = &q - &(&x1 * &x1);
        let coords = metric.indices().map(|a| metric.coordinate(a)).collect();
        let lowered = metric.indices().map(|a| metric.lowered_coordinate(a)).collect();
        Arc::new(Self { metric, q, q_rest, coords, lowered })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn shape(&self) -> Shape {
        self.metric.shape()
    }

    pub fn q(&self) -> &SuperPolynomial {
        &self.q
    }

    pub fn coordinate(&self, a: usize) -> &SuperPolynomial {
        &self.coords[a - 1]
    }

    /// `X_a`.
    pub fn lowered(&self, a: usize) -> &SuperPolynomial {
        &self.lowered[a - 1]
    }

    fn div_q(&self, p: &SuperPolynomial) -> Option<SuperPolynomial> {
        p.exact_div_monic_square(&self.q_rest)
    }
}

/// `(num0 + num1·R) · R^{-denom}` with polynomial numerators.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RadialFraction {
    pub denom: u32,
    pub num0: SuperPolynomial,
    pub num1: SuperPolynomial,
}

impl RadialFraction {
    pub fn zero(shape: Shape) -> Self {
        Self { denom: 0, num0: SuperPolynomial::zero(shape), num1: SuperPolynomial::zero(shape) }
    }

    pub fn from_poly(p: SuperPolynomial) -> Self {
        let shape = p.shape();
        Self { denom: 0, num0: p, num1: SuperPolynomial::zero(shape) }
    }

    pub fn constant(shape: Shape, c: GaussianRational) -> Self {
        Self::from_poly(SuperPolynomial::constant(shape, c))
    }

    /// `R^k` for any integer `k`.
    pub fn r_power(sp: &Superspace, k: i32) -> Self {
        let shape = sp.shape();
        let one = SuperPolynomial::one(shape);
        if k < 0 {
            return Self { denom: k.unsigned_abs(), num0: one, num1: SuperPolynomial::zero(shape) };
        }
        let mut q_pow = one;
        for _ in 0..k / 2 {
            q_pow = &q_pow * sp.q();
        }
        if k % 2 == 0 {
            Self::from_poly(q_pow)
        } else {
            Self { denom: 0, num0: SuperPolynomial::zero(shape), num1: q_pow }
        }
    }

    pub fn shape(&self) -> Shape {
        self.num0.shape()
    }

    pub fn is_zero(&self) -> bool {
        self.num0.is_zero() && self.num1.is_zero()
    }

    /// Number of stored monomials.
    pub fn size(&self) -> usize {
        self.num0.len() + self.num1.len()
    }

    /// Brings the fraction to its minimal denominator.
    pub fn normalize(mut self, sp: &Superspace) -> Self {
        if self.is_zero() {
            self.denom = 0;
            return self;
        }
        while self.denom > 0 {
            match sp.div_q(&self.num0) {
                Some(quot) => {
                    // (Q·P + N1·R)/R^m = (N1 + P·R)/R^{m-1}
                    self.num0 = std::mem::replace(&mut self.num1, quot);
                    self.denom -= 1;
                }
                None => break,
            }
        }
        self
    }

    /// Same value with the denominator raised to `target`.
    pub fn lifted(&self, sp: &Superspace, target: u32) -> (SuperPolynomial, SuperPolynomial) {
        assert!(target >= self.denom);
        let (mut n0, mut n1) = (self.num0.clone(), self.num1.clone());
        for _ in self.denom..target {
            // R·(n0 + n1·R) = n1·Q + n0·R
            let new0 = &n1 * sp.q();
            n1 = n0;
            n0 = new0;
        }
        (n0, n1)
    }

    pub fn add(&self, rhs: &RadialFraction, sp: &Superspace) -> RadialFraction {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let m = self.denom.max(rhs.denom);
        let (mut a0, mut a1) = self.lifted(sp, m);
        let (b0, b1) = rhs.lifted(sp, m);
        a0.add_assign(&b0);
        a1.add_assign(&b1);
        RadialFraction { denom: m, num0: a0, num1: a1 }.normalize(sp)
    }

    pub fn neg(&self) -> RadialFraction {
        self.scale(&GaussianRational::from_int(-1))
    }

    pub fn scale(&self, c: &GaussianRational) -> RadialFraction {
        if c.is_zero() {
            return Self::zero(self.shape());
        }
        RadialFraction { denom: self.denom, num0: self.num0.scale(c), num1: self.num1.scale(c) }
    }

    /// Product `self · rhs` (order matters for odd numerators).
    pub fn mul(&self, rhs: &RadialFraction, sp: &Superspace) -> RadialFraction {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(self.shape());
        }
        let mut n0 = &self.num0 * &rhs.num0;
        if !self.num1.is_zero() && !rhs.num1.is_zero() {
            n0.add_assign(&(&(&self.num1 * &rhs.num1) * sp.q()));
        }
        let mut n1 = &self.num0 * &rhs.num1;
        n1.add_assign(&(&self.num1 * &rhs.num0));
        RadialFraction { denom: self.denom + rhs.denom, num0: n0, num1: n1 }.normalize(sp)
    }

    /// `p · self` for a polynomial `p`.
    pub fn mul_poly_left(&self, p: &SuperPolynomial, sp: &Superspace) -> RadialFraction {
        RadialFraction { denom: self.denom, num0: p * &self.num0, num1: p * &self.num1 }.normalize(sp)
    }

    /// Splits into (even, odd) parts.
    pub fn split_parity(&self, sp: &Superspace) -> (RadialFraction, RadialFraction) {
        let (e0, o0) = self.num0.split_parity();
        let (e1, o1) = self.num1.split_parity();
        (
            RadialFraction { denom: self.denom, num0: e0, num1: e1 }.normalize(sp),
            RadialFraction { denom: self.denom, num0: o0, num1: o1 }.normalize(sp),
        )
    }

    pub fn parity(&self) -> Option<u8> {
        match (self.num0.parity(), self.num1.parity()) {
            (Some(a), _) if self.num1.is_zero() => Some(a),
            (_, Some(b)) if self.num0.is_zero() => Some(b),
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        }
    }

    /// `∂_a` applied to the fraction, using `∂_a(R^k) = k X_a R^{k-2}`.
    pub fn derive(&self, a: usize, sp: &Superspace) -> RadialFraction {
        let shape = self.shape();
        let m = self.denom;
        let xa = sp.lowered(a);
        let mut out = RadialFraction { denom: m, num0: self.num0.derive(a), num1: self.num1.derive(a) }.normalize(sp);
        if m > 0 && !self.num0.is_zero() {
            let piece = RadialFraction {
                denom: m + 2,
                num0: (xa * &self.num0).scale(&GaussianRational::from_int(-(m as i64))),
                num1: SuperPolynomial::zero(shape),
            };
            out = out.add(&piece.normalize(sp), sp);
        }
        if m != 1 && !self.num1.is_zero() {
            let piece = RadialFraction {
                denom: m + 1,
                num0: (xa * &self.num1).scale(&GaussianRational::from_int(1 - m as i64)),
                num1: SuperPolynomial::zero(shape),
            };
            out = out.add(&piece.normalize(sp), sp);
        }
        out
    }

    /// Substitutes `X -> s·X` (hence `R -> s·R`).
    pub fn substitute_scale(&self, s: &GaussianRational) -> RadialFraction {
        let m = self.denom as i32;
        RadialFraction {
            denom: self.denom,
            num0: self.num0.scale_by_degree(|k| s.powi(k as i32 - m)),
            num1: self.num1.scale_by_degree(|k| s.powi(k as i32 + 1 - m)),
        }
    }

    pub fn map_numerators(&self, f: impl Fn(&SuperPolynomial) -> SuperPolynomial) -> RadialFraction {
        RadialFraction { denom: self.denom, num0: f(&self.num0), num1: f(&self.num1) }
    }
}

/// Parity tag of an operator or function.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn from_bit(b: u8) -> Self {
        if b == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(&self) -> Option<u8> {
        match self {
            Parity::Even => Some(0),
            Parity::Odd => Some(1),
            Parity::Mixed => None,
        }
    }
}

/// One normal-ordered term `c · X^α θ_S · R^k · ∂^β ∂_T`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperatorTerm {
    pub coefficient: GaussianRational,
    pub x_part: SuperMonomial,
    pub r_exponent: i32,
    pub d_part: SuperMonomial,
}

/// A normal-ordered element of the Weyl-type algebra localized at `R`.
#[derive(Clone)]
pub struct OperatorElement {
    space: Arc<Superspace>,
    terms: BTreeMap<SuperMonomial, RadialFraction>,
}

impl PartialEq for OperatorElement {
    fn eq(&self, other: &Self) -> bool {
        self.space.metric == other.space.metric && self.terms == other.terms
    }
}

impl OperatorElement {
    pub fn zero(space: &Arc<Superspace>) -> Self {
        Self { space: Arc::clone(space), terms: BTreeMap::new() }
    }

    pub fn scalar(space: &Arc<Superspace>, c: GaussianRational) -> Self {
        Self::from_fraction(space, RadialFraction::constant(space.shape(), c))
    }

    pub fn identity(space: &Arc<Superspace>) -> Self {
        Self::scalar(space, GaussianRational::one())
    }

    /// Multiplication operator by a fraction.
    pub fn from_fraction(space: &Arc<Superspace>, f: RadialFraction) -> Self {
        let mut out = Self::zero(space);
        out.add_coefficient(SuperMonomial::one(space.shape()), f);
        out
    }

    pub fn multiplication(space: &Arc<Superspace>, p: SuperPolynomial) -> Self {
        Self::from_fraction(space, RadialFraction::from_poly(p))
    }

    /// `X^a`.
    pub fn coordinate(space: &Arc<Superspace>, a: usize) -> Self {
        Self::multiplication(space, space.coordinate(a).clone())
    }

    /// `X_a`.
    pub fn lowered_coordinate(space: &Arc<Superspace>, a: usize) -> Self {
        Self::multiplication(space, space.lowered(a).clone())
    }

    /// `R^k`.
    pub fn r_power(space: &Arc<Superspace>, k: i32) -> Self {
        Self::from_fraction(space, RadialFraction::r_power(space, k))
    }

    /// `∂_a`.
    pub fn partial(space: &Arc<Superspace>, a: usize) -> Self {
        let mut out = Self::zero(space);
        out.add_coefficient(SuperMonomial::coordinate(space.shape(), a), RadialFraction::constant(space.shape(), GaussianRational::one()));
        out
    }

    /// `∂^a = Σ_b η^{ab} ∂_b`.
    pub fn raised_partial(space: &Arc<Superspace>, a: usize) -> Self {
        let (b, s) = space.metric().upper_partner(a);
        Self::partial(space, b).scale(&GaussianRational::from_int(s))
    }

    /// `Δ = Σ_a ∂^a ∂_a`.
    pub fn laplacian(space: &Arc<Superspace>) -> Self {
        let mut out = Self::zero(space);
        for a in space.metric().indices() {
            out = out.add(&Self::raised_partial(space, a).compose(&Self::partial(space, a)));
        }
        out
    }

    /// The Euler operator `E = Σ_a X^a ∂_a`.
    pub fn euler(space: &Arc<Superspace>) -> Self {
        let mut out = Self::zero(space);
        for a in space.metric().indices() {
            out = out.add(&Self::coordinate(space, a).compose(&Self::partial(space, a)));
        }
        out
    }

    pub fn space(&self) -> &Arc<Superspace> {
        &self.space
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&SuperMonomial, &RadialFraction)> {
        self.terms.iter()
    }

    /// Expanded normal-ordered terms; within one derivative index all share the denominator.
    pub fn terms(&self) -> Vec<OperatorTerm> {
        let mut out = Vec::new();
        for (d, f) in &self.terms {
            for (num, shift) in [(&f.num0, 0), (&f.num1, 1)] {
                for (m, c) in num.terms() {
                    out.push(OperatorTerm {
                        coefficient: c.clone(),
                        x_part: m.clone(),
                        r_exponent: shift - f.denom as i32,
                        d_part: d.clone(),
                    });
                }
            }
        }
        out
    }

    pub fn num_terms(&self) -> usize {
        self.terms.values().map(|f| f.size()).sum()
    }

    fn add_coefficient(&mut self, d: SuperMonomial, f: RadialFraction) {
        if f.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(d) {
            Entry::Vacant(v) => {
                v.insert(f);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&f, &self.space);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn checked_add(&self, rhs: &OperatorElement) -> Result<OperatorElement> {
        self.check_space(rhs)?;
        let mut out = self.clone();
        for (d, f) in &rhs.terms {
            out.add_coefficient(d.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &OperatorElement) -> OperatorElement {
        self.checked_add(rhs).expect("operator space mismatch")
    }

    pub fn sub(&self, rhs: &OperatorElement) -> OperatorElement {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> OperatorElement {
        self.scale(&GaussianRational::from_int(-1))
    }

    pub fn scale(&self, c: &GaussianRational) -> OperatorElement {
        if c.is_zero() {
            return Self::zero(&self.space);
        }
        let terms = self.terms.iter().map(|(d, f)| (d.clone(), f.scale(c))).collect();
        Self { space: Arc::clone(&self.space), terms }
    }

    /// `self + c·1`.
    pub fn add_scalar(&self, c: &GaussianRational) -> OperatorElement {
        self.add(&Self::scalar(&self.space, c.clone()))
    }

    fn check_space(&self, rhs: &OperatorElement) -> Result<()> {
        self.space.shape().check(&rhs.space.shape())?;
        if self.space.metric != rhs.space.metric {
            return Err(SuperError::ShapeMismatch {
                left: format!("{:?}", self.space.metric),
                right: format!("{:?}", rhs.space.metric),
            });
        }
        Ok(())
    }

    /// Parity of the operator: `[x-part] + [∂-part]` for every term.
    pub fn parity(&self) -> Parity {
        let mut seen: Option<u8> = None;
        for (d, f) in &self.terms {
            for num in [&f.num0, &f.num1] {
                for (m, _) in num.terms() {
                    let p = (m.parity() + d.parity()) % 2;
                    match seen {
                        None => seen = Some(p),
                        Some(q) if q != p => return Parity::Mixed,
                        _ => {}
                    }
                }
            }
        }
        Parity::from_bit(seen.unwrap_or(0))
    }

    /// Splits into (even, odd) homogeneous parts.
    pub fn split_parity(&self) -> (OperatorElement, OperatorElement) {
        let mut even = Self::zero(&self.space);
        let mut odd = Self::zero(&self.space);
        for (d, f) in &self.terms {
            let (fe, fo) = f.split_parity(&self.space);
            let (to_even, to_odd) = if d.parity() == 0 { (fe, fo) } else { (fo, fe) };
            even.add_coefficient(d.clone(), to_even);
            odd.add_coefficient(d.clone(), to_odd);
        }
        (even, odd)
    }

    /// Zero test in the localization at `R`: every coefficient has vanishing numerators.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|f| f.is_zero())
    }

    /// `∂_a ∘ self`.
    fn left_partial(&self, a: usize) -> OperatorElement {
        let sp = &self.space;
        let shape = sp.shape();
        let coord = shape.coord(a);
        let mut out = Self::zero(sp);
        for (d, g) in &self.terms {
            out.add_coefficient(d.clone(), g.derive(a, sp));
            match coord {
                Coord::Even(s) => {
                    let mut d2 = d.clone();
                    d2.even[s] += 1;
                    out.add_coefficient(d2, g.clone());
                }
                Coord::Odd(s) => {
                    let Some((sign, w)) = GrassmannWord::single(s).mul(&d.odd) else { continue };
                    let d2 = SuperMonomial { even: d.even.clone(), odd: w };
                    let (ge, go) = g.split_parity(sp);
                    // ∂_a g = (∂_a g) + (-1)^{|g|} g ∂_a for odd a
                    let moved = ge.add(&go.neg(), sp);
                    out.add_coefficient(d2, if sign < 0 { moved.neg() } else { moved });
                }
            }
        }
        out
    }

    /// Associative product `self ∘ rhs` in normal order.
    pub fn checked_compose(&self, rhs: &OperatorElement) -> Result<OperatorElement> {
        self.check_space(rhs)?;
        let sp = &self.space;
        let mut cache: BTreeMap<SuperMonomial, OperatorElement> = BTreeMap::new();
        let mut out = Self::zero(sp);
        for (d, f) in &self.terms {
            let moved = derivative_composite(d, rhs, &mut cache);
            for (d2, g) in &moved.terms {
                out.add_coefficient(d2.clone(), f.mul(g, sp));
            }
        }
        Ok(out)
    }

    pub fn compose(&self, rhs: &OperatorElement) -> OperatorElement {
        self.checked_compose(rhs).expect("operator space mismatch")
    }

    /// Super-bracket `[A, B] = AB - (-1)^{|A||B|} BA`, extended bilinearly to mixed inputs.
    pub fn bracket(&self, rhs: &OperatorElement) -> OperatorElement {
        let (pa, pb) = (self.parity(), rhs.parity());
        if let (Some(a), Some(b)) = (pa.bit(), pb.bit()) {
            let ab = self.compose(rhs);
            let ba = rhs.compose(self);
            return if a & b == 1 { ab.add(&ba) } else { ab.sub(&ba) };
        }
        let (ae, ao) = self.split_parity();
        let (be, bo) = rhs.split_parity();
        let mut out = Self::zero(&self.space);
        for x in [&ae, &ao] {
            for y in [&be, &bo] {
                if !x.is_zero() && !y.is_zero() {
                    out = out.add(&x.bracket(y));
                }
            }
        }
        out
    }

    /// Conjugation by `exp(-E ln λ)`: `X -> X/λ`, `∂ -> λ∂`, `R^k -> λ^{-k} R^k`.
    pub fn dilation_conjugate(&self, lambda: &BigRational) -> Result<OperatorElement> {
        if !lambda.is_positive() {
            return Err(SuperError::NonPositiveScale(lambda.to_string()));
        }
        let inv = GaussianRational::real(lambda.recip());
        let lam = GaussianRational::real(lambda.clone());
        let mut out = Self::zero(&self.space);
        for (d, f) in &self.terms {
            let order = d.degree() as i32;
            let g = f.substitute_scale(&inv).map_numerators(|p| p.scale(&lam.powi(order)));
            out.add_coefficient(d.clone(), g);
        }
        Ok(out)
    }

    /// Replaces every coefficient numerator by `f(numerator)`.
    pub fn map_coefficients(&self, f: impl Fn(&SuperPolynomial) -> SuperPolynomial) -> OperatorElement {
        let mut out = Self::zero(&self.space);
        for (d, g) in &self.terms {
            out.add_coefficient(d.clone(), g.map_numerators(&f).normalize(&self.space));
        }
        out
    }

    /// Coordinates over a common denominator per derivative index, keyed by
    /// (derivative index, R-component, monomial). `denoms` fixes the denominator per index.
    pub fn coordinates(&self, denoms: &BTreeMap<SuperMonomial, u32>) -> BTreeMap<(SuperMonomial, u8, SuperMonomial), GaussianRational> {
        let mut out = BTreeMap::new();
        for (d, f) in &self.terms {
            let m = denoms.get(d).copied().unwrap_or(f.denom).max(f.denom);
            let (n0, n1) = f.lifted(&self.space, m);
            for (comp, num) in [(0u8, n0), (1u8, n1)] {
                for (mono, c) in num.terms() {
                    out.insert((d.clone(), comp, mono.clone()), c.clone());
                }
            }
        }
        out
    }

    /// Largest denominator per derivative index over a family of operators.
    pub fn common_denominators<'a>(ops: impl IntoIterator<Item = &'a OperatorElement>) -> BTreeMap<SuperMonomial, u32> {
        let mut out: BTreeMap<SuperMonomial, u32> = BTreeMap::new();
        for op in ops {
            for (d, f) in &op.terms {
                let e = out.entry(d.clone()).or_insert(0);
                *e = (*e).max(f.denom);
            }
        }
        out
    }
}

/// Leftmost factor of a normal-ordered derivative word: (coordinate index, remaining word).
pub(crate) fn split_first_derivative(d: &SuperMonomial, shape: Shape) -> Option<(usize, SuperMonomial)> {
    if let Some(s) = d.even.iter().position(|&e| e > 0) {
        let mut rest = d.clone();
        rest.even[s] -= 1;
        return Some((s + 1, rest));
    }
    if d.odd.0 == 0 {
        return None;
    }
    let s = d.odd.0.trailing_zeros() as usize;
    let rest = SuperMonomial { even: d.even.clone(), odd: GrassmannWord(d.odd.0 & !(1 << s)) };
    Some((shape.even + s + 1, rest))
}

fn derivative_composite(
    d: &SuperMonomial,
    rhs: &OperatorElement,
    cache: &mut BTreeMap<SuperMonomial, OperatorElement>,
) -> OperatorElement {
    if let Some(hit) = cache.get(d) {
        return hit.clone();
    }
    let result = match split_first_derivative(d, rhs.space.shape()) {
        None => rhs.clone(),
        Some((a, rest)) => derivative_composite(&rest, rhs, cache).left_partial(a),
    };
    cache.insert(d.clone(), result.clone());
    result
}

impl fmt::Display for OperatorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let shape = self.space.shape();
        for (k, (d, g)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[({}) + ({})*R]*R^-{}", g.num0, g.num1, g.denom)?;
            for (s, &e) in d.even.iter().enumerate() {
                for _ in 0..e {
                    write!(f, "*d{}", s + 1)?;
                }
            }
            for s in d.odd.slots() {
                write!(f, "*d{}", shape.even + s + 1)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OperatorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
