use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use thiserror::Error;

use super::multi_index::MultiIndex;
use super::scalar::{rational_from_f64, CoeffKind, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("map component {component} has a nonzero constant term (not origin-preserving)")]
    NotOriginPreserving { component: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("term of degree {degree} exceeds truncation order {order}")]
    DegreeExceedsOrder { degree: u32, order: u32 },
    #[error("mixed coefficient kinds: {0} and {1}")]
    MixedKind(CoeffKind, CoeffKind),
    #[error("coefficient {0} cannot be converted exactly")]
    Inexact(f64),
}

/// Truncated polynomial in `nvars` variables, all terms of degree `<= order`.
///
/// The term map never stores an exact zero coefficient, so structural
/// equality is equality of jets.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<C> {
    nvars: usize,
    order: u32,
    terms: BTreeMap<MultiIndex, C>,
}

pub type RationalJet = Jet<BigRational>;
pub type FloatJet = Jet<f64>;

impl<C: Scalar> Jet<C> {
    pub fn zero(nvars: usize, order: u32) -> Self {
        Jet {
            nvars,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, order: u32, c: C) -> Self {
        Self::monomial(nvars, order, MultiIndex::zero(nvars), c)
    }

    pub fn one(nvars: usize, order: u32) -> Self {
        Self::constant(nvars, order, C::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, order: u32, i: usize) -> Self {
        Self::monomial(nvars, order, MultiIndex::var(nvars, i), C::one())
    }

    /// `c * m`, or the zero jet when `deg m > order`.
    pub fn monomial(nvars: usize, order: u32, m: MultiIndex, c: C) -> Self {
        let mut jet = Self::zero(nvars, order);
        jet.add_term(m, c);
        jet
    }

    /// Builds a jet, summing repeated monomials. Terms above `order` are an error.
    pub fn from_terms<I>(nvars: usize, order: u32, terms: I) -> Result<Self, JetError>
    where
        I: IntoIterator<Item = (MultiIndex, C)>,
    {
        let mut jet = Self::zero(nvars, order);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(JetError::DimensionMismatch(format!(
                    "monomial has {} exponents, expected {}",
                    m.nvars(),
                    nvars
                )));
            }
            if m.degree() > order {
                return Err(JetError::DegreeExceedsOrder {
                    degree: m.degree(),
                    order,
                });
            }
            jet.add_term(m, c);
        }
        Ok(jet)
    }

    /// Like [`Jet::from_terms`] but silently drops terms above `order`.
    pub fn from_terms_truncated<I>(nvars: usize, order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, C)>,
    {
        let mut jet = Self::zero(nvars, order);
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), nvars);
            jet.add_term(m, c);
        }
        jet
    }

    pub(crate) fn add_term(&mut self, m: MultiIndex, c: C) {
        if m.degree() > self.order || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn kind(&self) -> CoeffKind {
        C::KIND
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &MultiIndex) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of the monomial with the given exponents.
    pub fn coeff_of(&self, exps: &[u32]) -> C {
        self.coeff(&MultiIndex::new(exps.to_vec()))
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&MultiIndex::zero(self.nvars))
    }

    /// Lowest degree carrying a term.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree())
    }

    /// Highest degree carrying a term.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    /// Membership in `M^k`: every term has degree `>= k`.
    pub fn in_m_power(&self, k: u32) -> bool {
        self.min_degree().is_none_or(|d| d >= k)
    }

    /// Largest absolute coefficient, as a double.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        self.filter(|m, _| m.degree() == d)
    }

    /// Keeps the terms accepted by `keep`.
    pub fn filter<F: Fn(&MultiIndex, &C) -> bool>(&self, keep: F) -> Self {
        Jet {
            nvars: self.nvars,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(m, c)| keep(m, c))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-truncates (or extends) to order `k`. Extending keeps the polynomial.
    pub fn with_order(&self, k: u32) -> Self {
        Jet {
            nvars: self.nvars,
            order: k,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<(), JetError> {
        if self.nvars != other.nvars || self.order != other.order {
            return Err(JetError::DimensionMismatch(format!(
                "({} vars, order {}) vs ({} vars, order {})",
                self.nvars, self.order, other.nvars, other.order
            )));
        }
        Ok(())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: &C) -> Result<Self, JetError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        if s.is_zero() {
            return Ok(out);
        }
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone() * s.clone());
        }
        Ok(out)
    }

    /// Product with all terms above the order discarded.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, JetError> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.nvars, self.order);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in &other.terms {
                if da + mb.degree() > self.order {
                    // `other` is sorted by degree, nothing further fits
                    break;
                }
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars, self.order);
        }
        Jet {
            nvars: self.nvars,
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * s.clone()))
                .collect(),
        }
    }

    /// `self^e`, truncated.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars, self.order);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative in variable `i` (0-based). The ambient order
    /// is kept; the result has degree at most `order - 1`.
    pub fn partial(&self, i: usize) -> Result<Self, JetError> {
        if i >= self.nvars {
            return Err(JetError::VariableOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let mut out = Self::zero(self.nvars, self.order);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            let lowered = m.lower(i).expect("positive exponent");
            out.add_term(lowered, c.clone() * C::from_int(e as i64));
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars)
            .map(|i| self.partial(i).expect("index in range"))
            .collect()
    }

    /// Substitutes `x_i -> map[i]`. Every component must vanish at the origin
    /// and share variable count, order, and field; the result lives in the
    /// variables of `map`.
    pub fn compose(&self, map: &[Self]) -> Result<Self, JetError> {
        if map.len() != self.nvars {
            return Err(JetError::DimensionMismatch(format!(
                "map has {} components for {} variables",
                map.len(),
                self.nvars
            )));
        }
        let (m, order) = match map.first() {
            Some(first) => (first.nvars, first.order),
            None => (0, self.order),
        };
        for (k, comp) in map.iter().enumerate() {
            if comp.nvars != m || comp.order != order {
                return Err(JetError::DimensionMismatch(format!(
                    "map component {} has ({} vars, order {})",
                    k, comp.nvars, comp.order
                )));
            }
            if !comp.constant_term().is_zero() {
                return Err(JetError::NotOriginPreserving { component: k });
            }
        }
        if self.order != order {
            return Err(JetError::DimensionMismatch(format!(
                "germ order {} vs map order {}",
                self.order, order
            )));
        }
        // powers[i][e] = map[i]^e; exponents above the order vanish since
        // every component starts at degree >= 1
        let powers: Vec<Vec<Self>> = map
            .iter()
            .enumerate()
            .map(|(i, comp)| {
                let max_e = self
                    .terms
                    .keys()
                    .map(|mi| mi.exp(i))
                    .max()
                    .unwrap_or(0)
                    .min(order);
                let mut table = Vec::with_capacity(max_e as usize + 1);
                table.push(Self::one(m, order));
                for e in 1..=max_e as usize {
                    let next = &table[e - 1] * comp;
                    table.push(next);
                }
                table
            })
            .collect();
        let mut out = Self::zero(m, order);
        for (mi, c) in &self.terms {
            if mi.degree() > order {
                continue;
            }
            let mut prod = Self::constant(m, order, c.clone());
            for (i, &e) in mi.exps().iter().enumerate() {
                if e > 0 {
                    prod = &prod * &powers[i][e as usize];
                    if prod.is_zero() {
                        break;
                    }
                }
            }
            for (pm, pc) in prod.terms {
                out.add_term(pm, pc);
            }
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[C]) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    t = t * point[i].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Moves variable `i` to position `positions[i]` of a `new_nvars`-variable space.
    pub fn embed(&self, new_nvars: usize, positions: &[usize]) -> Self {
        assert_eq!(positions.len(), self.nvars);
        let mut out = Self::zero(new_nvars, self.order);
        for (m, c) in &self.terms {
            let mut exps = vec![0; new_nvars];
            for (i, &p) in positions.iter().enumerate() {
                exps[p] += m.exp(i);
            }
            out.add_term(MultiIndex::new(exps), c.clone());
        }
        out
    }

    /// Sets every variable outside `keep` to zero and re-indexes the rest in
    /// the order given.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut out = Self::zero(keep.len(), self.order);
        for (m, c) in &self.terms {
            let dropped: u32 = (0..self.nvars)
                .filter(|i| !keep.contains(i))
                .map(|i| m.exp(i))
                .sum();
            if dropped > 0 {
                continue;
            }
            let exps = keep.iter().map(|&i| m.exp(i)).collect();
            out.add_term(MultiIndex::new(exps), c.clone());
        }
        out
    }

    pub fn map_coeffs<D: Scalar, F: Fn(&C) -> D>(&self, f: F) -> Jet<D> {
        let mut out = Jet::zero(self.nvars, self.order);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Rounds every coefficient to the nearest double.
    pub fn to_float(&self) -> Jet<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    /// Renders the jet with graded-lex term order, e.g. `x^4 + 3*x^2*y^2 + y^4`.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            let mono = m.render(names);
            let body = if m.is_constant() {
                abs.to_coeff_string()
            } else if abs.is_one() {
                mono
            } else {
                format!("{}*{}", abs.to_coeff_string(), mono)
            };
            match (k, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
        out
    }
}

impl Jet<f64> {
    /// Exact rational image of a float jet.
    pub fn to_rational(&self) -> Result<Jet<BigRational>, JetError> {
        let mut out = Jet::zero(self.nvars, self.order);
        for (m, c) in &self.terms {
            let r = rational_from_f64(*c).ok_or(JetError::Inexact(*c))?;
            out.add_term(m.clone(), r);
        }
        Ok(out)
    }

    /// Drops coefficients with absolute value `<= tol`.
    pub fn chop(&self, tol: f64) -> Self {
        self.filter(|_, c| c.abs() > tol)
    }
}

impl<C: Scalar> Add for &Jet<C> {
    type Output = Jet<C>;

    fn add(self, rhs: &Jet<C>) -> Jet<C> {
        self.add_scaled(rhs, &C::one()).expect("incompatible jets")
    }
}

impl<C: Scalar> Sub for &Jet<C> {
    type Output = Jet<C>;

    fn sub(self, rhs: &Jet<C>) -> Jet<C> {
        self.add_scaled(rhs, &-C::one()).expect("incompatible jets")
    }
}

impl<C: Scalar> Mul for &Jet<C> {
    type Output = Jet<C>;

    fn mul(self, rhs: &Jet<C>) -> Jet<C> {
        self.checked_mul(rhs).expect("incompatible jets")
    }
}

impl<C: Scalar> Neg for &Jet<C> {
    type Output = Jet<C>;

    fn neg(self) -> Jet<C> {
        self.scale(&-C::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn mono(exps: &[u32], c: i64, order: u32) -> Jet<Q> {
        Jet::monomial(exps.len(), order, MultiIndex::new(exps.to_vec()), q(c))
    }

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn add_scale_examples() {
        let x2 = mono(&[2], 1, 4);
        assert_eq!(x2.add_scaled(&x2, &q(1)).unwrap(), mono(&[2], 2, 4));
        let x4 = mono(&[4], 1, 4);
        assert!(x4.add_scaled(&x4, &q(-1)).unwrap().is_zero());

        let a = &mono(&[4, 0], 1, 4) + &mono(&[2, 2], 3, 4);
        let b = mono(&[0, 4], 1, 4);
        let s = a.add_scaled(&b, &q(1)).unwrap();
        assert_eq!(s.render(&names()), "x^4 + 3*x^2*y^2 + y^4");
    }

    #[test]
    fn add_scale_rejects_mismatch() {
        let a = mono(&[2], 1, 4);
        let b = mono(&[2], 1, 6);
        assert!(matches!(
            a.add_scaled(&b, &q(1)),
            Err(JetError::DimensionMismatch(_))
        ));
        let c = mono(&[2, 0], 1, 4);
        assert!(a.checked_mul(&c).is_err());
    }

    #[test]
    fn mul_examples() {
        let one_plus = &Jet::one(1, 4) + &mono(&[2], 1, 4);
        let sq = &one_plus * &one_plus;
        assert_eq!(sq.render(&["x".into()]), "1 + 2*x^2 + x^4");
        assert!((&mono(&[2], 1, 4) * &mono(&[4], 1, 4)).is_zero());

        let a = &mono(&[2, 0], 1, 4) + &mono(&[0, 2], 1, 4);
        let b = &mono(&[2, 0], 1, 4) + &mono(&[0, 2], 3, 4);
        assert_eq!((&a * &b).render(&names()), "x^4 + 4*x^2*y^2 + 3*y^4");
    }

    #[test]
    fn compose_examples() {
        let x2 = mono(&[2], 1, 6);
        let id = vec![Jet::var(1, 6, 0)];
        assert_eq!(x2.compose(&id).unwrap(), x2);

        let x4 = mono(&[4], 1, 6);
        let scaled = vec![mono(&[1], 2, 6)];
        assert_eq!(x4.compose(&scaled).unwrap(), mono(&[4], 16, 6));
    }

    #[test]
    fn compose_rejects_constant_term() {
        let x2 = mono(&[2], 1, 4);
        let shifted = vec![&Jet::var(1, 4, 0) + &Jet::one(1, 4)];
        assert_eq!(
            x2.compose(&shifted),
            Err(JetError::NotOriginPreserving { component: 0 })
        );
    }

    #[test]
    fn partial_examples() {
        let x4 = mono(&[4], 1, 4);
        assert_eq!(x4.partial(0).unwrap(), mono(&[3], 4, 4));
        let f = &(&mono(&[4, 0], 1, 4) + &mono(&[2, 2], 3, 4)) + &mono(&[0, 4], 1, 4);
        assert_eq!(f.partial(1).unwrap().render(&names()), "6*x^2*y + 4*y^3");
        assert_eq!(
            f.partial(2),
            Err(JetError::VariableOutOfRange { index: 2, nvars: 2 })
        );
    }

    #[test]
    fn leibniz_spot_check() {
        let f = mono(&[2, 0], 1, 4);
        let g = mono(&[0, 2], 1, 4);
        let fg = &f * &g;
        for i in 0..2 {
            let lhs = fg.partial(i).unwrap();
            let rhs = &(&f * &g.partial(i).unwrap()) + &(&g * &f.partial(i).unwrap());
            assert_eq!(lhs, rhs);
        }
        assert_eq!(fg.partial(0).unwrap(), mono(&[1, 2], 2, 4));
        assert_eq!(fg.partial(1).unwrap(), mono(&[2, 1], 2, 4));
    }

    #[test]
    fn from_terms_rejects_high_degree() {
        let r = Jet::from_terms(1, 2, vec![(MultiIndex::new(vec![3]), q(1))]);
        assert!(matches!(r, Err(JetError::DegreeExceedsOrder { .. })));
    }

    #[test]
    fn restrict_and_embed() {
        let f = &mono(&[4, 0], 1, 4) + &mono(&[2, 2], 1, 4);
        let r = f.restrict(&[0]);
        assert_eq!(r, mono(&[4], 1, 4));
        let e = r.embed(2, &[1]);
        assert_eq!(e, mono(&[0, 4], 1, 4));
    }

    #[test]
    fn float_round_trip_to_rational() {
        let f: Jet<f64> = Jet::monomial(1, 4, MultiIndex::new(vec![2]), 0.5);
        let r = f.to_rational().unwrap();
        assert_eq!(
            r,
            Jet::monomial(1, 4, MultiIndex::new(vec![2]), Q::from_ratio(1, 2))
        );
        assert_eq!(r.to_float(), f);
    }
}
