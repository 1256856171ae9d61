//! Taylor jets of objectives at a point, symmetrized onto even germs.

use serde::{Deserialize, Serialize};

use super::model::Objective;
use crate::group::SignAction;
use crate::poly::{FloatJet, Jet, MultiIndex};

/// Above this residual the even-symmetry assumption is reported as violated.
pub const RESIDUAL_GATE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TaylorMethod {
    /// Analytic series when the objective provides them, else differences.
    #[default]
    Auto,
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorResult {
    /// Reynolds-projected jet without constant term.
    pub jet: FloatJet,
    /// Jet before projection, constant term dropped.
    pub raw: FloatJet,
    /// Largest non-invariant coefficient removed by the projection.
    pub residual: f64,
    /// Residual above [`RESIDUAL_GATE`].
    pub warning: bool,
    pub method: TaylorMethod,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Central-difference weights for the `k`-th derivative on offsets `-p..=p`.
fn stencil(k: u32) -> (i32, Vec<f64>) {
    // p = floor((k+1)/2) + 1 points each side gives second-order accuracy
    let p = (k as i32 + 1) / 2 + 1;
    let m = (2 * p + 1) as usize;
    // Solve the Vandermonde system sum_j w_j j^i = k! δ_ik
    let nodes: Vec<f64> = (-p..=p).map(f64::from).collect();
    let mut a = nalgebra::DMatrix::<f64>::zeros(m, m);
    let mut rhs = nalgebra::DVector::<f64>::zeros(m);
    for i in 0..m {
        for (j, x) in nodes.iter().enumerate() {
            a[(i, j)] = x.powi(i as i32);
        }
    }
    rhs[k as usize] = factorial(k);
    let w = a.lu().solve(&rhs).expect("Vandermonde system is regular");
    (p, w.iter().cloned().collect())
}

/// Mixed derivative `∂^e f(c)` by nested stencils with step `h`.
fn mixed_derivative(f: &dyn Objective, c: &[f64], e: &[u32], h: &[f64]) -> f64 {
    fn rec(f: &dyn Objective, c: &mut Vec<f64>, e: &[u32], h: &[f64], i: usize) -> f64 {
        if i == e.len() {
            return f.value(c);
        }
        if e[i] == 0 {
            return rec(f, c, e, h, i + 1);
        }
        let (p, w) = stencil(e[i]);
        let base = c[i];
        let mut acc = 0.0;
        for (j, wj) in (-p..=p).zip(&w) {
            if *wj == 0.0 {
                continue;
            }
            c[i] = base + f64::from(j) * h[i];
            acc += wj * rec(f, c, e, h, i + 1);
        }
        c[i] = base;
        acc / h[i].powi(e[i] as i32)
    }
    rec(f, &mut c.to_vec(), e, h, 0)
}

/// Taylor jet by nested central differences with one Richardson step.
pub fn finite_difference_jet(f: &dyn Objective, c: &[f64], order: u32) -> FloatJet {
    let n = f.dim();
    let h0: Vec<f64> = c.iter().map(|x| 1e-2 * x.abs().max(1.0)).collect();
    let h1: Vec<f64> = h0.iter().map(|x| x / 2.0).collect();
    let mut terms = Vec::new();
    for m in MultiIndex::up_to_degree(n, 1, order) {
        let d0 = mixed_derivative(f, c, m.exps(), &h0);
        let d1 = mixed_derivative(f, c, m.exps(), &h1);
        let d = (4.0 * d1 - d0) / 3.0;
        let denom: f64 = m.exps().iter().map(|&k| factorial(k)).product();
        terms.push((m, d / denom));
    }
    Jet::from_terms_truncated(n, order, terms)
}

/// Taylor jet of `f` about `c`, constant term dropped, projected onto germs
/// even in every coordinate.
pub fn taylor_at(f: &dyn Objective, c: &[f64], order: u32, method: TaylorMethod) -> TaylorResult {
    let (raw, used) = match method {
        TaylorMethod::FiniteDifference => (finite_difference_jet(f, c, order), method),
        TaylorMethod::Analytic | TaylorMethod::Auto => match f.jet(c, order) {
            Some(j) => (j, TaylorMethod::Analytic),
            None => (
                finite_difference_jet(f, c, order),
                TaylorMethod::FiniteDifference,
            ),
        },
    };
    let raw = raw.filter(|m, _| !m.is_constant());
    let action = SignAction::full(f.dim());
    let jet = action
        .reynolds(&raw)
        .expect("jet and action share the dimension");
    let residual = action
        .non_invariant_terms(&raw)
        .iter()
        .map(|m| raw.coeff(m).abs())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_GATE {
        log::debug!("Taylor jet at {c:?} is not even: residual {residual:.3e}");
    }
    TaylorResult {
        jet,
        raw,
        residual,
        warning: residual > RESIDUAL_GATE,
        method: used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::model::MeanFieldParams;

    #[test]
    fn stencils_are_exact_on_polynomials() {
        let (p, w) = stencil(2);
        assert_eq!(p, 2);
        let s: f64 = (-p..=p).zip(&w).map(|(j, w)| w * f64::from(j * j)).sum();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn large_lambda_limit_is_quadratic() {
        let p = MeanFieldParams::new(1.0, 0.0, 40.0, 50.0, 2.5, 1.5);
        let t = taylor_at(&p, &[0.0, 1.0], 4, TaylorMethod::Auto);
        let expect = Jet::from_terms_truncated(
            2,
            4,
            [
                (MultiIndex::new(vec![2, 0]), 2.5),
                (MultiIndex::new(vec![0, 2]), 1.5),
            ],
        );
        assert!((&t.jet - &expect).max_abs_coeff() < 1e-10);
        assert!(t.residual < 1e-12 && !t.warning);
        let off = taylor_at(&p, &[0.0, 0.0], 2, TaylorMethod::Auto);
        // linear c2 term -2δ is odd
        assert!((off.residual - 3.0).abs() < 1e-10 && off.warning);
    }

    #[test]
    fn finite_differences_agree_with_series() {
        let p = MeanFieldParams::new(1.0, 0.3, 2.0, 3.0, 2.0, 1.0);
        let c = [0.2, 0.7];
        let a = taylor_at(&p, &c, 4, TaylorMethod::Analytic);
        let f = taylor_at(&p, &c, 4, TaylorMethod::FiniteDifference);
        assert_eq!(f.method, TaylorMethod::FiniteDifference);
        for (m, v) in a.raw.terms() {
            let tol = if m.degree() <= 2 { 1e-7 } else { 1e-3 };
            assert!((f.raw.coeff(m) - v).abs() < tol * (1.0 + v.abs()), "{m:?}");
        }
    }
}
