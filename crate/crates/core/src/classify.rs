//! Classification of Z2-invariant germs of low codimension.
//!
//! Corank and splitting reduce a germ to its kernel variables; the reduced
//! germ is matched against the even normal forms `±x^{2k}` (corank 1) and the
//! quartic families in two variables (corank 2). Codimension, determinacy and
//! the universal unfolding are then computed on the exact normal form.

use std::fmt;

use nalgebra::DMatrix;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::group::SignAction;
use crate::local_algebra::{check_germ, codimension, determinacy_order, AlgebraError, AlgebraOpts};
use crate::poly::{rational_from_f64, CoeffKind, Jet, MultiIndex, RationalJet, Scalar};
use crate::unfolding::{universal_unfolding, Unfolding, UnfoldingError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Unfolding(#[from] UnfoldingError),
    #[error("germ has a nonzero linear term in variable {0}")]
    LinearPart(usize),
    #[error("the action does not flip every kernel variable independently")]
    NotFullOnKernel,
    #[error("splitting needs a diagonal Hessian")]
    NonDiagonalHessian,
    #[error("coefficient is not finite")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOpts {
    pub algebra: AlgebraOpts,
    /// Quartic coefficients below this fraction of the largest are zero.
    pub zero_tol: f64,
    /// Absolute threshold for zero Hessian entries and eigenvalues.
    pub hess_tol: f64,
}

impl Default for ClassifyOpts {
    fn default() -> Self {
        ClassifyOpts {
            algebra: AlgebraOpts::default(),
            zero_tol: 1e-9,
            hess_tol: 1e-6,
        }
    }
}

/// A modulus value, exact when it is rational.
#[derive(Debug, Clone, PartialEq)]
pub enum Modulus {
    Exact(BigRational),
    Approx(f64),
}

impl Modulus {
    fn from_scalar<C: Scalar>(v: &C) -> Self {
        match (C::KIND, v.to_exact()) {
            (CoeffKind::Rational, Some(q)) => Modulus::Exact(q),
            _ => Modulus::Approx(v.to_f64()),
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Modulus::Exact(q) => Scalar::to_f64(q),
            Modulus::Approx(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Modulus::Exact(_))
    }

    /// Exact value, or the exact dyadic value of the approximation.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Modulus::Exact(q) => Some(q.clone()),
            Modulus::Approx(v) => rational_from_f64(*v),
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Exact(q) => write!(f, "{}", q.to_coeff_string()),
            Modulus::Approx(v) => write!(f, "{v}"),
        }
    }
}

/// Normal-form rows of the classification tables.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Morse,
    /// `sign · x^{2k}`
    EvenPower {
        k: u32,
        sign: i8,
    },
    /// `sign · (x²+y²)(x²+αy²)`, `α > 1`
    PlusFamily {
        alpha: Modulus,
        sign: i8,
    },
    /// `sign · (x²-y²)(x²+αy²)`
    SaddleFamily {
        alpha: Modulus,
        sign: i8,
    },
    /// `sign · (x⁴+βx²y²+y⁴)`, `|β| < 2`
    QuarticBeta {
        beta: Modulus,
        sign: i8,
    },
    /// `x⁴ - y⁴`
    XMinus,
    BeyondTable {
        reason: String,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Morse => "morse",
            Family::EvenPower { .. } => "even_power",
            Family::PlusFamily { .. } => "plus_family",
            Family::SaddleFamily { .. } => "saddle_family",
            Family::QuarticBeta { .. } => "quartic_beta",
            Family::XMinus => "x_minus",
            Family::BeyondTable { .. } => "beyond_table",
        }
    }

    pub fn sign(&self) -> i8 {
        match self {
            Family::EvenPower { sign, .. }
            | Family::PlusFamily { sign, .. }
            | Family::SaddleFamily { sign, .. }
            | Family::QuarticBeta { sign, .. } => *sign,
            _ => 1,
        }
    }

    pub fn modulus(&self) -> Option<&Modulus> {
        match self {
            Family::PlusFamily { alpha, .. } | Family::SaddleFamily { alpha, .. } => Some(alpha),
            Family::QuarticBeta { beta, .. } => Some(beta),
            _ => None,
        }
    }

    pub fn is_beyond_table(&self) -> bool {
        matches!(self, Family::BeyondTable { .. })
    }

    /// Table values `(cod_Z2, σ)` of the row.
    pub fn table_values(&self) -> Option<(usize, u32)> {
        match self {
            Family::Morse => Some((0, 2)),
            Family::EvenPower { k, .. } => Some((*k as usize - 1, 2 * k)),
            Family::BeyondTable { .. } => None,
            _ => Some((3, 4)),
        }
    }
}

/// An equivalent description of the same germ class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Presentation {
    pub family: String,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorankInfo {
    pub corank: usize,
    /// Kernel coordinates when the Hessian is diagonal.
    pub kernel: Option<Vec<usize>>,
    /// Signs of the nonzero Hessian directions.
    pub signature: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub corank: usize,
    pub kernel: Vec<usize>,
    pub quad_signature: Vec<i8>,
    pub family: Family,
    pub presentations: Vec<Presentation>,
    pub cod_z2: Option<usize>,
    pub sigma: Option<u32>,
    /// Normal form in the kernel variables (all variables when corank 0).
    pub normal_form: Option<RationalJet>,
    pub unfolding: Option<Unfolding<BigRational>>,
}

impl ClassificationResult {
    /// Variable indices the normal form is written in.
    pub fn normal_form_vars(&self) -> Vec<usize> {
        if self.corank == 0 {
            (0..self.quad_signature.len()).collect()
        } else {
            self.kernel.clone()
        }
    }

    /// `f + u1*z1 + ...` in the given names (one per germ variable).
    pub fn unfolding_string(&self, names: &[String]) -> Option<String> {
        let u = self.unfolding.as_ref()?;
        let sub: Vec<String> = self
            .normal_form_vars()
            .iter()
            .map(|&i| {
                names
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| format!("x{}", i + 1))
            })
            .collect();
        Some(u.render_linear(&sub))
    }
}

fn quadratic_coeff<C: Scalar>(f: &Jet<C>, i: usize, j: usize) -> C {
    let mut e = vec![0; f.nvars()];
    e[i] += 1;
    e[j] += 1;
    f.coeff_of(&e)
}

/// Symmetric elimination `H = L D Lᵀ` with pivoting; returns `D`.
fn congruence_diagonal<C: Scalar>(mut h: Vec<Vec<C>>, tol: f64) -> Vec<C> {
    let n = h.len();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let nz = |v: &C| !v.is_negligible(tol);
        if let Some(p) = (k..n).find(|&i| nz(&h[i][i])) {
            h.swap(k, p);
            for row in h.iter_mut() {
                row.swap(k, p);
            }
        } else if let Some((i, j)) = (k..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| nz(&h[i][j]))
        {
            // x_i -> x_i + x_j makes the (i, i) entry 2 h_ij
            let row_j = h[j].clone();
            for (c, v) in row_j.into_iter().enumerate() {
                h[i][c] = h[i][c].clone() + v;
            }
            for row in h.iter_mut() {
                let v = row[j].clone();
                row[i] = row[i].clone() + v;
            }
            h.swap(k, i);
            for row in h.iter_mut() {
                row.swap(k, i);
            }
        } else {
            diag.extend((k..n).map(|_| C::zero()));
            return diag;
        }
        let pivot = h[k][k].clone();
        for i in k + 1..n {
            let m = h[i][k].clone() / pivot.clone();
            if m.is_zero() {
                continue;
            }
            for c in k..n {
                let v = h[k][c].clone() * m.clone();
                h[i][c] = h[i][c].clone() - v;
            }
            for r in k..n {
                let v = h[r][k].clone() * m.clone();
                h[r][i] = h[r][i].clone() - v;
            }
        }
        diag.push(pivot);
    }
    diag
}

/// Corank of the Hessian at 0, its kernel coordinates (diagonal case) and the
/// signs of the nondegenerate directions.
pub fn corank_and_kernel<C: Scalar>(
    f: &Jet<C>,
    action: &SignAction,
    opts: &ClassifyOpts,
) -> Result<CorankInfo, ClassifyError> {
    check_germ(f, action)?;
    let n = f.nvars();
    for i in 0..n {
        if !f.coeff(&MultiIndex::var(n, i)).is_zero() {
            return Err(ClassifyError::LinearPart(i));
        }
    }
    let tol = opts.hess_tol;
    let diagonal = (0..n).all(|i| (i + 1..n).all(|j| quadratic_coeff(f, i, j).is_negligible(tol)));
    if diagonal {
        let mut kernel = Vec::new();
        let mut signature = Vec::new();
        for i in 0..n {
            let h = quadratic_coeff(f, i, i) * C::from_int(2);
            if h.is_negligible(tol) {
                kernel.push(i);
            } else {
                signature.push(if h.is_negative() { -1 } else { 1 });
            }
        }
        return Ok(CorankInfo {
            corank: kernel.len(),
            kernel: Some(kernel),
            signature,
        });
    }
    let hess = |i: usize, j: usize| {
        let c = quadratic_coeff(f, i, j);
        if i == j {
            c * C::from_int(2)
        } else {
            c
        }
    };
    let values: Vec<f64> = if C::KIND == CoeffKind::Rational {
        let h: Vec<Vec<C>> = (0..n)
            .map(|i| (0..n).map(|j| hess(i, j)).collect())
            .collect();
        congruence_diagonal(h, tol)
            .iter()
            .map(|d| d.to_f64())
            .collect()
    } else {
        let m = DMatrix::from_fn(n, n, |i, j| hess(i, j).to_f64());
        m.symmetric_eigenvalues().iter().copied().collect()
    };
    let exact = C::KIND == CoeffKind::Rational;
    let zero = |v: f64| if exact { v == 0.0 } else { v.abs() <= tol };
    let mut signature: Vec<i8> = values
        .iter()
        .filter(|v| !zero(**v))
        .map(|v| if *v < 0.0 { -1 } else { 1 })
        .collect();
    signature.sort_by(|a, b| b.cmp(a));
    Ok(CorankInfo {
        corank: values.iter().filter(|v| zero(**v)).count(),
        kernel: None,
        signature,
    })
}

/// Removes every term mixing kernel and nondegenerate variables up to order
/// `k`, returning the germ in the kernel variables and the quadratic signs.
///
/// At degree `d` a term `c·m` containing a nondegenerate `y_j` (smallest such
/// `j`) is cancelled by `y_j -> y_j - c (m / y_j) / (2 a_j)`, where `a_j y_j²`
/// is the quadratic part. The substitution is equivariant and only changes
/// degrees above `d` otherwise.
pub fn split_reduce<C: Scalar>(
    f: &Jet<C>,
    action: &SignAction,
    k: u32,
    opts: &ClassifyOpts,
) -> Result<(Jet<C>, Vec<i8>), ClassifyError> {
    let info = corank_and_kernel(f, action, opts)?;
    let kernel = info.kernel.ok_or(ClassifyError::NonDiagonalHessian)?;
    let n = f.nvars();
    let outside: Vec<usize> = (0..n).filter(|i| !kernel.contains(i)).collect();
    let mut g = f.with_order(k);
    // the quadratic part is not touched by the substitutions
    let quad: Vec<C> = (0..n).map(|i| quadratic_coeff(&g, i, i)).collect();
    for d in 3..=k {
        loop {
            let target = g
                .terms()
                .filter(|(m, _)| m.degree() == d)
                .find_map(|(m, c)| {
                    outside
                        .iter()
                        .find(|&&j| m.exp(j) > 0)
                        .map(|&j| (m.clone(), c.clone(), j))
                });
            let Some((m, c, j)) = target else { break };
            let shift = m.lower(j).expect("y_j divides m");
            let scale = c / (quad[j].clone() * C::from_int(2));
            let map: Vec<Jet<C>> = (0..n)
                .map(|i| {
                    let x = Jet::var(n, k, i);
                    if i == j {
                        &x - &Jet::monomial(n, k, shift.clone(), scale.clone())
                    } else {
                        x
                    }
                })
                .collect();
            g = g.compose(&map).map_err(AlgebraError::from)?;
            if C::KIND == CoeffKind::Float {
                // the cancelled coefficient may leave rounding residue
                g = g.filter(|t, _| t != &m);
            }
        }
    }
    let signature = outside
        .iter()
        .map(|&j| if quad[j].is_negative() { -1 } else { 1 })
        .collect();
    Ok((g.restrict(&kernel), signature))
}

fn sign_of<C: Scalar>(v: &C) -> i8 {
    if v.is_negative() {
        -1
    } else {
        1
    }
}

fn beyond(reason: &str) -> Family {
    Family::BeyondTable {
        reason: reason.to_string(),
    }
}

/// `((r-2) + √(r(r-4))) / 2`, the root `α > 1` of `(1+α)²/α = r`.
fn plus_root<C: Scalar>(r: &C) -> Modulus {
    let two = C::from_int(2);
    let disc = r.clone() * (r.clone() - C::from_int(4));
    match disc.try_sqrt() {
        Some(s) => Modulus::from_scalar(&((r.clone() - two.clone() + s) / two)),
        None => {
            let r = r.to_f64();
            Modulus::Approx(((r - 2.0) + (r * (r - 4.0)).sqrt()) / 2.0)
        }
    }
}

/// `-((r-2) - √(r(r-4))) / 2`, the root `α ∈ (-1, 0)` of `(1-α)²/(-α) = r`.
fn saddle_root<C: Scalar>(r: &C) -> Modulus {
    let two = C::from_int(2);
    let disc = r.clone() * (r.clone() - C::from_int(4));
    match disc.try_sqrt() {
        Some(s) => Modulus::from_scalar(&(-(r.clone() - two.clone() - s) / two)),
        None => {
            let r = r.to_f64();
            Modulus::Approx(-((r - 2.0) - (r * (r - 4.0)).sqrt()) / 2.0)
        }
    }
}

/// Opposite outer signs: `α > 0` with `(α-1)/√α = β`, written via `r = β²·(-1)`.
fn opposite_root<C: Scalar>(r: &C, b_sign: i8) -> Modulus {
    let two = C::from_int(2);
    let disc = r.clone() * (r.clone() - C::from_int(4));
    let sgn = C::from_int(b_sign as i64);
    match disc.try_sqrt() {
        Some(s) => Modulus::from_scalar(&((two.clone() - r.clone() + sgn * s) / two)),
        None => {
            let r = r.to_f64();
            Modulus::Approx(((2.0 - r) + b_sign as f64 * (r * (r - 4.0)).sqrt()) / 2.0)
        }
    }
}

fn quartic_family<C: Scalar>(a: &C, b: &C, c: &C, tol: f64) -> (Family, Vec<Presentation>) {
    // with opposite outer signs the swap x <-> y flips the leading sign, so
    // the representative has a positive x^4 coefficient
    if (a.clone() * c.clone()).is_negative() && a.is_negative() {
        return quartic_family(c, b, a, tol);
    }
    let s = sign_of(a);
    let sc = C::from_int(s as i64);
    let bp = sc.clone() * b.clone();
    let cp = sc * c.clone();
    let r = b.clone() * b.clone() / (a.clone() * c.clone());
    let b_small = b.is_negligible(tol);
    if !cp.is_negative() {
        let four = C::from_int(4);
        if (r.clone() - four.clone()).is_negligible(tol * 4.0) {
            return (
                beyond("quartic with beta = +-2 (codimension >= 10)"),
                vec![],
            );
        }
        // β = b'/√(ac)
        let ac = a.clone() * c.clone();
        let beta = match ac.try_sqrt() {
            Some(q) => Modulus::from_scalar(&(bp.clone() / q)),
            None => Modulus::Approx(bp.to_f64() / ac.to_f64().sqrt()),
        };
        let present = vec![Presentation {
            family: "quartic_beta".into(),
            modulus: beta.value(),
        }];
        if r < four {
            (Family::QuarticBeta { beta, sign: s }, vec![])
        } else if bp.is_positive() {
            (
                Family::PlusFamily {
                    alpha: plus_root(&r),
                    sign: s,
                },
                present,
            )
        } else {
            (
                Family::SaddleFamily {
                    alpha: saddle_root(&r),
                    sign: s,
                },
                present,
            )
        }
    } else if b_small {
        (Family::XMinus, vec![])
    } else {
        let alpha = opposite_root(&r, sign_of(&bp));
        (Family::SaddleFamily { alpha, sign: s }, vec![])
    }
}

fn q(v: i64) -> BigRational {
    BigRational::from_int(v)
}

fn rational_monomial(n: usize, order: u32, exps: &[u32], c: BigRational) -> RationalJet {
    Jet::monomial(n, order, MultiIndex::new(exps.to_vec()), c)
}

/// Exact normal form of a table row in its own variables.
pub fn normal_form(family: &Family, quad_signature: &[i8]) -> Option<RationalJet> {
    let quartic = |a: BigRational, b: BigRational, c: BigRational, sign: i8| {
        let s = q(sign as i64);
        let mut j = rational_monomial(2, 4, &[4, 0], a * &s);
        j = &j + &rational_monomial(2, 4, &[2, 2], b * &s);
        &j + &rational_monomial(2, 4, &[0, 4], c * &s)
    };
    match family {
        Family::Morse => {
            let n = quad_signature.len();
            let mut j = Jet::zero(n, 4);
            for (i, s) in quad_signature.iter().enumerate() {
                let mut e = vec![0; n];
                e[i] = 2;
                j = &j + &rational_monomial(n, 4, &e, q(*s as i64));
            }
            Some(j)
        }
        Family::EvenPower { k, sign } => {
            Some(rational_monomial(1, 2 * k, &[2 * k], q(*sign as i64)))
        }
        Family::PlusFamily { alpha, sign } => {
            let a = alpha.to_rational()?;
            Some(quartic(q(1), q(1) + &a, a, *sign))
        }
        Family::SaddleFamily { alpha, sign } => {
            let a = alpha.to_rational()?;
            Some(quartic(q(1), &a - q(1), -a, *sign))
        }
        Family::QuarticBeta { beta, sign } => Some(quartic(q(1), beta.to_rational()?, q(1), *sign)),
        Family::XMinus => Some(quartic(q(1), q(0), q(-1), 1)),
        Family::BeyondTable { .. } => None,
    }
}

/// Matches a germ against the classification tables.
pub fn classify_germ<C: Scalar>(
    f: &Jet<C>,
    action: &SignAction,
    opts: &ClassifyOpts,
) -> Result<ClassificationResult, ClassifyError> {
    let info = corank_and_kernel(f, action, opts)?;
    let mut result = ClassificationResult {
        corank: info.corank,
        kernel: info.kernel.clone().unwrap_or_default(),
        quad_signature: info.signature.clone(),
        family: beyond("unclassified"),
        presentations: vec![],
        cod_z2: None,
        sigma: None,
        normal_form: None,
        unfolding: None,
    };
    if info.corank >= 3 {
        result.family = beyond("corank >= 3 (codimension >= 9)");
        return Ok(result);
    }
    if info.corank > 0 {
        let kernel = info
            .kernel
            .as_ref()
            .ok_or(ClassifyError::NonDiagonalHessian)?;
        if !action.restrict(kernel).is_full() {
            return Err(ClassifyError::NotFullOnKernel);
        }
    }
    let (family, presentations) = match info.corank {
        0 => (Family::Morse, vec![]),
        1 => {
            let (fhat, _) = split_reduce(f, action, f.order(), opts)?;
            let scale = fhat.max_abs_coeff();
            let lowest = fhat
                .terms()
                .find(|(_, c)| !c.is_negligible(opts.zero_tol * scale));
            match lowest {
                Some((m, c)) if m.degree() >= 4 => (
                    Family::EvenPower {
                        k: m.degree() / 2,
                        sign: sign_of(c),
                    },
                    vec![],
                ),
                _ => (beyond("reduced germ vanishes to the given order"), vec![]),
            }
        }
        _ => {
            let (fhat, _) = split_reduce(f, action, f.order().max(4), opts)?;
            let four = fhat.homogeneous_part(4);
            let scale = four.max_abs_coeff();
            let tol = opts.zero_tol * scale;
            let a = fhat.coeff_of(&[4, 0]);
            let b = fhat.coeff_of(&[2, 2]);
            let c = fhat.coeff_of(&[0, 4]);
            if scale == 0.0 || a.is_negligible(tol) || c.is_negligible(tol) {
                (beyond("degenerate quartic part (codimension >= 9)"), vec![])
            } else {
                // relative tolerance on the dimensionless ratio
                quartic_family(&a, &b, &c, opts.zero_tol)
            }
        }
    };
    result.family = family;
    result.presentations = presentations;
    if result.family.is_beyond_table() {
        return Ok(result);
    }
    let nf = normal_form(&result.family, &info.signature).ok_or(ClassifyError::NonFinite)?;
    let nf_action = SignAction::full(nf.nvars());
    let report = codimension(&nf, &nf_action, &opts.algebra)?;
    result.cod_z2 = report.finite();
    result.sigma = determinacy_order(&nf, &nf_action, &opts.algebra)?.order();
    result.unfolding = Some(universal_unfolding(&nf, &nf_action, &opts.algebra)?);
    result.normal_form = Some(nf);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = BigRational;

    fn jet(n: usize, order: u32, terms: &[(&[u32], i64)]) -> Jet<Q> {
        Jet::from_terms(
            n,
            order,
            terms
                .iter()
                .map(|(e, c)| (MultiIndex::new(e.to_vec()), Q::from_int(*c))),
        )
        .unwrap()
    }

    fn names2() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn corank_examples() {
        let opts = ClassifyOpts::default();
        let full = SignAction::full(2);
        let f = jet(2, 4, &[(&[4, 0], 1), (&[0, 2], 1)]);
        let i = corank_and_kernel(&f, &full, &opts).unwrap();
        assert_eq!(
            (i.corank, i.kernel, i.signature),
            (1, Some(vec![0]), vec![1])
        );
        let g = jet(2, 4, &[(&[4, 0], 1), (&[2, 2], 3), (&[0, 4], 1)]);
        assert_eq!(corank_and_kernel(&g, &full, &opts).unwrap().corank, 2);
        let h = jet(2, 4, &[(&[2, 0], 1), (&[0, 2], 1)]);
        assert_eq!(corank_and_kernel(&h, &full, &opts).unwrap().corank, 0);
    }

    #[test]
    fn non_diagonal_hessian_inertia() {
        let opts = ClassifyOpts::default();
        // 2xy has eigenvalues +-1; x^2 + 2xy + y^2 is rank one
        let f = jet(2, 4, &[(&[1, 1], 2)]);
        let i = corank_and_kernel(&f, &SignAction::overall(2), &opts).unwrap();
        assert_eq!((i.corank, i.kernel, i.signature), (0, None, vec![1, -1]));
        let g = jet(2, 4, &[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]);
        let i = corank_and_kernel(&g, &SignAction::trivial(2), &opts).unwrap();
        assert_eq!((i.corank, i.signature), (1, vec![1]));
        let gf = g.to_float();
        let i = corank_and_kernel(&gf, &SignAction::trivial(2), &opts).unwrap();
        assert_eq!((i.corank, i.signature), (1, vec![1]));
    }

    #[test]
    fn linear_part_is_rejected() {
        let f = jet(1, 4, &[(&[1], 1), (&[2], 1)]);
        assert_eq!(
            corank_and_kernel(&f, &SignAction::trivial(1), &ClassifyOpts::default()),
            Err(ClassifyError::LinearPart(0))
        );
    }

    #[test]
    fn split_examples() {
        let opts = ClassifyOpts::default();
        let full2 = SignAction::full(2);
        let f = jet(2, 8, &[(&[0, 2], 1), (&[2, 2], 1), (&[4, 0], 1)]);
        let (fhat, sig) = split_reduce(&f, &full2, 8, &opts).unwrap();
        // y^2 (1 + x^2) + x^4 splits exactly: f(x, 0) = x^4
        assert_eq!(fhat, jet(1, 8, &[(&[4], 1)]));
        assert_eq!(sig, vec![1]);

        let g = jet(3, 4, &[(&[4, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]);
        let (ghat, sig) = split_reduce(&g, &SignAction::full(3), 4, &opts).unwrap();
        assert_eq!(ghat, jet(1, 4, &[(&[4], 1)]));
        assert_eq!(sig, vec![1, 1]);

        let h = jet(2, 4, &[(&[4, 0], 1), (&[2, 2], 3), (&[0, 4], 1)]);
        let (hhat, sig) = split_reduce(&h, &full2, 4, &opts).unwrap();
        assert_eq!(hhat, h);
        assert!(sig.is_empty());
    }

    #[test]
    fn split_corrects_the_kernel_germ() {
        // y^2 + x^2 y + x^4 = (y + x^2/2)^2 + 3/4 x^4
        let opts = ClassifyOpts::default();
        let f = jet(2, 6, &[(&[0, 2], 1), (&[2, 1], 1), (&[4, 0], 1)]);
        let (fhat, sig) = split_reduce(&f, &SignAction::trivial(2), 6, &opts).unwrap();
        assert_eq!(fhat.coeff_of(&[4]), Q::from_ratio(3, 4));
        assert_eq!(fhat.len(), 1);
        assert_eq!(sig, vec![1]);
    }

    #[test]
    fn classify_examples() {
        let opts = ClassifyOpts::default();
        let x6 = jet(1, 6, &[(&[6], 1)]);
        let r = classify_germ(&x6, &SignAction::full(1), &opts).unwrap();
        assert_eq!(r.family, Family::EvenPower { k: 3, sign: 1 });
        assert_eq!((r.cod_z2, r.sigma), (Some(2), Some(6)));
        assert_eq!(
            r.unfolding_string(&["x".into()]).unwrap(),
            "f + u1*x^2 + u2*x^4"
        );

        let f = jet(2, 4, &[(&[4, 0], 1), (&[2, 2], 4), (&[0, 4], 3)]);
        let r = classify_germ(&f, &SignAction::full(2), &opts).unwrap();
        assert_eq!(
            r.family,
            Family::PlusFamily {
                alpha: Modulus::Exact(Q::from_int(3)),
                sign: 1
            }
        );
        assert_eq!((r.cod_z2, r.sigma), (Some(3), Some(4)));
        assert_eq!(
            r.unfolding_string(&names2()).unwrap(),
            "f + u1*x^2 + u2*y^2 + u3*x^2*y^2"
        );
    }

    #[test]
    fn quartic_beta_rows() {
        let opts = ClassifyOpts::default();
        let full = SignAction::full(2);
        let f = jet(2, 4, &[(&[4, 0], 1), (&[2, 2], 1), (&[0, 4], 1)]);
        let r = classify_germ(&f, &full, &opts).unwrap();
        assert_eq!(
            r.family,
            Family::QuarticBeta {
                beta: Modulus::Exact(Q::from_int(1)),
                sign: 1
            }
        );
        // beta = 3 lies in the (x^2+y^2)(x^2+alpha y^2) class
        let g = jet(2, 4, &[(&[4, 0], 1), (&[2, 2], 3), (&[0, 4], 1)]);
        let r = classify_germ(&g, &full, &opts).unwrap();
        let Family::PlusFamily { alpha, sign: 1 } = &r.family else {
            panic!("{:?}", r.family)
        };
        assert!((alpha.value() - (7.0 + 45f64.sqrt()) / 2.0).abs() < 1e-12);
        assert_eq!(r.presentations[0].modulus, 3.0);

        let h = jet(2, 4, &[(&[4, 0], -1), (&[2, 2], -2), (&[0, 4], -1)]);
        let r = classify_germ(&h, &full, &opts).unwrap();
        assert!(r.family.is_beyond_table());

        let xm = jet(2, 4, &[(&[4, 0], 1), (&[0, 4], -1)]);
        assert_eq!(
            classify_germ(&xm, &full, &opts).unwrap().family,
            Family::XMinus
        );
    }

    #[test]
    fn saddle_rows() {
        let opts = ClassifyOpts::default();
        let full = SignAction::full(2);
        // (x^2 - y^2)(x^2 - y^2/4) = x^4 - 5/4 x^2 y^2 + 1/4 y^4
        let f: Jet<Q> = Jet::from_terms(
            2,
            4,
            vec![
                (MultiIndex::new(vec![4, 0]), Q::from_int(4)),
                (MultiIndex::new(vec![2, 2]), Q::from_int(-5)),
                (MultiIndex::new(vec![0, 4]), Q::from_int(1)),
            ],
        )
        .unwrap();
        let r = classify_germ(&f, &full, &opts).unwrap();
        assert_eq!(
            r.family,
            Family::SaddleFamily {
                alpha: Modulus::Exact(Q::from_ratio(-1, 4)),
                sign: 1
            }
        );
        // (x^2 - y^2)(x^2 + 4 y^2) = x^4 + 3 x^2 y^2 - 4 y^4
        let g = jet(2, 4, &[(&[4, 0], 1), (&[2, 2], 3), (&[0, 4], -4)]);
        let r = classify_germ(&g, &full, &opts).unwrap();
        assert_eq!(
            r.family,
            Family::SaddleFamily {
                alpha: Modulus::Exact(Q::from_int(4)),
                sign: 1
            }
        );
        assert_eq!((r.cod_z2, r.sigma), (Some(3), Some(4)));
        // the swapped germ -4x^4 + 3x^2y^2 + y^4 is the same class
        let h = jet(2, 4, &[(&[4, 0], -4), (&[2, 2], 3), (&[0, 4], 1)]);
        assert_eq!(classify_germ(&h, &full, &opts).unwrap().family, r.family);
    }

    #[test]
    fn corank_three_is_beyond_table() {
        let f = jet(3, 4, &[(&[4, 0, 0], 1), (&[0, 4, 0], 1), (&[0, 0, 4], 1)]);
        let r = classify_germ(&f, &SignAction::full(3), &ClassifyOpts::default()).unwrap();
        assert!(r.family.is_beyond_table());
    }

    #[test]
    fn morse_row() {
        let f = jet(2, 4, &[(&[2, 0], 1), (&[0, 2], -1)]);
        let r = classify_germ(&f, &SignAction::full(2), &ClassifyOpts::default()).unwrap();
        assert_eq!(r.family, Family::Morse);
        assert_eq!((r.cod_z2, r.sigma), (Some(0), Some(2)));
        assert_eq!(r.unfolding_string(&names2()).unwrap(), "f");
    }
}
