//! Functions of the form `Σ_c (N_0 + N_1 R) R^{-m} e^{-cR}` with exact rates `c >= 0`.
//!
//! This class is closed under `∂_a`, multiplication by polynomials and `R^{±1}`,
//! so every operator of [`crate::superweyl`] acts on it exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, SuperError};
use crate::linalg;
use crate::scalar::GaussianRational;
use crate::supercore::{bar_conjugate, SuperMonomial, SuperPolynomial};
use crate::superweyl::{split_first_derivative, OperatorElement, RadialFraction, Superspace};

/// Coordinate key of a function: (rate, R-component, monomial).
pub type FunctionKey = (BigRational, u8, SuperMonomial);

#[derive(Clone)]
pub struct RadialExpFunction {
    space: Arc<Superspace>,
    parts: BTreeMap<BigRational, RadialFraction>,
}

impl PartialEq for RadialExpFunction {
    fn eq(&self, other: &Self) -> bool {
        self.space.metric() == other.space.metric() && self.parts == other.parts
    }
}

impl RadialExpFunction {
    pub fn zero(space: &Arc<Superspace>) -> Self {
        Self { space: Arc::clone(space), parts: BTreeMap::new() }
    }

    /// `f · e^{-rate·R}`.
    pub fn from_fraction(space: &Arc<Superspace>, rate: BigRational, f: RadialFraction) -> Self {
        assert!(!rate.is_negative(), "exponential rates are nonnegative");
        let mut out = Self::zero(space);
        out.add_part(rate, f);
        out
    }

    /// `e^{-rate·R}`.
    pub fn exp(space: &Arc<Superspace>, rate: BigRational) -> Self {
        Self::from_fraction(space, rate, RadialFraction::constant(space.shape(), GaussianRational::one()))
    }

    /// `p · e^{-rate·R}`.
    pub fn poly_exp(space: &Arc<Superspace>, p: SuperPolynomial, rate: BigRational) -> Self {
        Self::from_fraction(space, rate, RadialFraction::from_poly(p))
    }

    /// `R^k` (rate zero).
    pub fn r_power(space: &Arc<Superspace>, k: i32) -> Self {
        Self::from_fraction(space, BigRational::zero(), RadialFraction::r_power(space, k))
    }

    pub fn space(&self) -> &Arc<Superspace> {
        &self.space
    }

    pub fn parts(&self) -> impl Iterator<Item = (&BigRational, &RadialFraction)> {
        self.parts.iter()
    }

    pub fn rates(&self) -> impl Iterator<Item = &BigRational> {
        self.parts.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.values().all(|f| f.is_zero())
    }

    fn add_part(&mut self, rate: BigRational, f: RadialFraction) {
        if f.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.parts.entry(rate) {
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

    fn check_space(&self, rhs: &RadialExpFunction) -> Result<()> {
        if self.space.metric() != rhs.space.metric() {
            return Err(SuperError::ShapeMismatch {
                left: format!("{:?}", self.space.metric()),
                right: format!("{:?}", rhs.space.metric()),
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &RadialExpFunction) -> RadialExpFunction {
        self.check_space(rhs).expect("function space mismatch");
        let mut out = self.clone();
        for (c, f) in &rhs.parts {
            out.add_part(c.clone(), f.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &RadialExpFunction) -> RadialExpFunction {
        self.add(&rhs.scale(&GaussianRational::from_int(-1)))
    }

    pub fn scale(&self, c: &GaussianRational) -> RadialExpFunction {
        let mut out = Self::zero(&self.space);
        if c.is_zero() {
            return out;
        }
        for (rate, f) in &self.parts {
            out.add_part(rate.clone(), f.scale(c));
        }
        out
    }

    /// Product of functions (rates add).
    pub fn mul(&self, rhs: &RadialExpFunction) -> RadialExpFunction {
        self.check_space(rhs).expect("function space mismatch");
        let mut out = Self::zero(&self.space);
        for (c1, f1) in &self.parts {
            for (c2, f2) in &rhs.parts {
                out.add_part(c1 + c2, f1.mul(f2, &self.space));
            }
        }
        out
    }

    /// `p · self`.
    pub fn mul_poly_left(&self, p: &SuperPolynomial) -> RadialExpFunction {
        let mut out = Self::zero(&self.space);
        for (c, f) in &self.parts {
            out.add_part(c.clone(), f.mul_poly_left(p, &self.space));
        }
        out
    }

    /// (even part, odd part) in the Grassmann grading.
    pub fn split_parity(&self) -> (RadialExpFunction, RadialExpFunction) {
        let mut even = Self::zero(&self.space);
        let mut odd = Self::zero(&self.space);
        for (c, f) in &self.parts {
            let (fe, fo) = f.split_parity(&self.space);
            even.add_part(c.clone(), fe);
            odd.add_part(c.clone(), fo);
        }
        (even, odd)
    }

    /// `Some(parity)` when homogeneous.
    pub fn parity(&self) -> Option<u8> {
        let (e, o) = self.split_parity();
        match (e.is_zero(), o.is_zero()) {
            (_, true) => Some(0),
            (true, false) => Some(1),
            _ => None,
        }
    }

    /// Left derivative `∂_a`, with `∂_a e^{-cR} = -c X_a R^{-1} e^{-cR}`.
    pub fn derive(&self, a: usize) -> RadialExpFunction {
        let sp = &self.space;
        let mut out = Self::zero(sp);
        for (c, f) in &self.parts {
            let mut g = f.derive(a, sp);
            if !c.is_zero() {
                let xa_over_r = RadialFraction {
                    denom: 1,
                    num0: sp.lowered(a).scale(&GaussianRational::real(-c)),
                    num1: SuperPolynomial::zero(sp.shape()),
                };
                g = g.add(&xa_over_r.mul(f, sp), sp);
            }
            out.add_part(c.clone(), g);
        }
        out
    }

    /// Module action of an operator.
    pub fn apply(&self, op: &OperatorElement) -> RadialExpFunction {
        assert_eq!(op.space().metric(), self.space.metric(), "operator/function space mismatch");
        let sp = &self.space;
        let mut cache: BTreeMap<SuperMonomial, RadialExpFunction> = BTreeMap::new();
        let mut out = Self::zero(sp);
        for (d, coef) in op.coefficients() {
            let derived = self.derivative_word(d, &mut cache);
            for (c, f) in &derived.parts {
                out.add_part(c.clone(), coef.mul(f, sp));
            }
        }
        out
    }

    fn derivative_word(&self, d: &SuperMonomial, cache: &mut BTreeMap<SuperMonomial, RadialExpFunction>) -> RadialExpFunction {
        if let Some(hit) = cache.get(d) {
            return hit.clone();
        }
        let result = match split_first_derivative(d, self.space.shape()) {
            None => self.clone(),
            Some((a, rest)) => self.derivative_word(&rest, cache).derive(a),
        };
        cache.insert(d.clone(), result.clone());
        result
    }

    /// Substitution `X -> λX` (so `R -> λR` and every rate `c -> λc`).
    pub fn dilate(&self, lambda: &BigRational) -> Result<RadialExpFunction> {
        if !lambda.is_positive() {
            return Err(SuperError::NonPositiveScale(lambda.to_string()));
        }
        let s = GaussianRational::real(lambda.clone());
        let mut out = Self::zero(&self.space);
        for (c, f) in &self.parts {
            out.add_part(c * lambda, f.substitute_scale(&s));
        }
        Ok(out)
    }

    /// Bar conjugation; `R` and real exponentials are fixed.
    pub fn bar(&self) -> RadialExpFunction {
        let metric = *self.space.metric();
        let mut out = Self::zero(&self.space);
        for (c, f) in &self.parts {
            let g = f.map_numerators(|p| bar_conjugate(p, &metric)).normalize(&self.space);
            out.add_part(c.clone(), g);
        }
        out
    }

    /// Exact coordinates with the given common denominator per rate.
    pub fn coordinates(&self, denoms: &BTreeMap<BigRational, u32>) -> BTreeMap<FunctionKey, GaussianRational> {
        let mut out = BTreeMap::new();
        for (c, f) in &self.parts {
            let m = denoms.get(c).copied().unwrap_or(f.denom).max(f.denom);
            let (n0, n1) = f.lifted(&self.space, m);
            for (comp, num) in [(0u8, n0), (1u8, n1)] {
                for (mono, v) in num.terms() {
                    out.insert((c.clone(), comp, mono.clone()), v.clone());
                }
            }
        }
        out
    }

    /// Largest denominator per rate over a family.
    pub fn common_denominators<'a>(fs: impl IntoIterator<Item = &'a RadialExpFunction>) -> BTreeMap<BigRational, u32> {
        let mut out: BTreeMap<BigRational, u32> = BTreeMap::new();
        for f in fs {
            for (c, g) in &f.parts {
                let e = out.entry(c.clone()).or_insert(0);
                *e = (*e).max(g.denom);
            }
        }
        out
    }

    /// `c` such that `self = c·other`, if it exists.
    pub fn ratio_to(&self, other: &RadialExpFunction) -> Option<GaussianRational> {
        let denoms = Self::common_denominators([self, other]);
        let a = self.coordinates(&denoms);
        let b = other.coordinates(&denoms);
        let (key, bv) = b.iter().next()?;
        let c = &a.get(key).cloned().unwrap_or_default() / bv;
        self.sub(&other.scale(&c)).is_zero().then_some(c)
    }
}

/// `H = -Δ/2 - 1/R`.
pub fn hamiltonian(space: &Arc<Superspace>) -> Result<OperatorElement> {
    let m = space.metric();
    if m.even_dim() <= 2 * m.n() + 1 {
        return Err(SuperError::DimensionCondition { d: m.even_dim(), n: m.n() });
    }
    Ok(OperatorElement::laplacian(space)
        .scale(&GaussianRational::ratio(-1, 2))
        .sub(&OperatorElement::r_power(space, -1)))
}

/// `H f = -Δf/2 - f/R`.
pub fn hamiltonian_apply(f: &RadialExpFunction) -> Result<RadialExpFunction> {
    Ok(f.apply(&hamiltonian(f.space())?))
}

/// Dimension of the `Q(i)`-span of a family of functions.
pub fn rank(fs: &[RadialExpFunction]) -> usize {
    let denoms = RadialExpFunction::common_denominators(fs);
    let coords: Vec<_> = fs.iter().map(|f| f.coordinates(&denoms)).collect();
    linalg::rank(&coords)
}

/// Indices of a maximal independent subfamily, in order.
pub fn independent_subset(fs: &[RadialExpFunction]) -> Vec<usize> {
    let denoms = RadialExpFunction::common_denominators(fs);
    let coords: Vec<_> = fs.iter().map(|f| f.coordinates(&denoms)).collect();
    linalg::independent_subset(&coords)
}

impl fmt::Display for RadialExpFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, g)) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[({}) + ({})*R]*R^-{}*exp(-{}*R)", g.num0, g.num1, g.denom, c)?;
        }
        Ok(())
    }
}

impl fmt::Debug for RadialExpFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
