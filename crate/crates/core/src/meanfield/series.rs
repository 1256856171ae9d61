//! Elementary functions of float jets by univariate series composition.

use crate::poly::{FloatJet, Jet};

/// `Σ coeffs[k] t^k` by Horner; `t` must have zero constant term.
pub fn compose_series(coeffs: &[f64], t: &FloatJet) -> FloatJet {
    let (n, order) = (t.nvars(), t.order());
    let mut acc = Jet::zero(n, order);
    for c in coeffs.iter().rev() {
        acc = &(&acc * t) + &Jet::constant(n, order, *c);
    }
    acc
}

fn split(a: &FloatJet) -> (f64, FloatJet) {
    let a0 = a.constant_term();
    (a0, a.filter(|m, _| !m.is_constant()))
}

fn terms(a: &FloatJet) -> usize {
    a.order() as usize + 1
}

pub fn exp(a: &FloatJet) -> FloatJet {
    let (a0, t) = split(a);
    let mut c = vec![1.0; terms(a)];
    for k in 1..c.len() {
        c[k] = c[k - 1] / k as f64;
    }
    compose_series(&c, &t).scale(&a0.exp())
}

/// Natural log; the constant term must be positive.
pub fn ln(a: &FloatJet) -> FloatJet {
    let (a0, t) = split(a);
    let t = t.scale(&(1.0 / a0));
    let mut c = vec![0.0; terms(a)];
    for (k, ck) in c.iter_mut().enumerate().skip(1) {
        *ck = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
    }
    &compose_series(&c, &t) + &Jet::constant(a.nvars(), a.order(), a0.ln())
}

/// Square root; the constant term must be positive.
pub fn sqrt(a: &FloatJet) -> FloatJet {
    let (a0, t) = split(a);
    let t = t.scale(&(1.0 / a0));
    let mut c = vec![1.0; terms(a)];
    for k in 1..c.len() {
        c[k] = c[k - 1] * (0.5 - (k - 1) as f64) / k as f64;
    }
    compose_series(&c, &t).scale(&a0.sqrt())
}

/// `(cosh t, sinh t)` for `t` without constant term.
fn cosh_sinh_nilpotent(t: &FloatJet) -> (FloatJet, FloatJet) {
    let n = t.order() as usize + 1;
    let mut ch = vec![0.0; n];
    let mut sh = vec![0.0; n];
    let mut fact = 1.0;
    for k in 0..n {
        if k > 0 {
            fact *= k as f64;
        }
        if k % 2 == 0 {
            ch[k] = 1.0 / fact;
        } else {
            sh[k] = 1.0 / fact;
        }
    }
    (compose_series(&ch, t), compose_series(&sh, t))
}

pub fn cosh(a: &FloatJet) -> FloatJet {
    let (a0, t) = split(a);
    let (c, s) = cosh_sinh_nilpotent(&t);
    &c.scale(&a0.cosh()) + &s.scale(&a0.sinh())
}

pub fn sinh(a: &FloatJet) -> FloatJet {
    let (a0, t) = split(a);
    let (c, s) = cosh_sinh_nilpotent(&t);
    &c.scale(&a0.sinh()) + &s.scale(&a0.cosh())
}

/// `e^{-shift} cosh(b √z)`, kept finite for large arguments.
///
/// Small `b² z(0)` uses the entire series `Σ (b² z)^k / (2k)!`, which stays
/// analytic through `z = 0`; otherwise `√z` is expanded about `z(0)`.
pub fn scaled_cosh_sqrt(z: &FloatJet, b: f64, shift: f64) -> FloatJet {
    let z0 = z.constant_term();
    if b * b * z0.abs() < 1.0 {
        let bz = z.scale(&(b * b));
        let mut coeffs = Vec::with_capacity(40);
        let mut c = 1.0;
        for k in 0..40 {
            if k > 0 {
                c /= ((2 * k - 1) * (2 * k)) as f64;
            }
            coeffs.push(c);
        }
        // Horner in a jet with a constant term, no nilpotency needed
        let (n, order) = (z.nvars(), z.order());
        let mut acc = Jet::zero(n, order);
        for c in coeffs.iter().rev() {
            acc = &(&acc * &bz) + &Jet::constant(n, order, *c);
        }
        return acc.scale(&(-shift).exp());
    }
    let s = sqrt(z).scale(&b);
    let (s0, t) = split(&s);
    // cosh(s0 + t) e^{-shift} = ½ e^{s0-shift} (e^t + e^{-2 s0} e^{-t})
    let up = exp(&t);
    let down = exp(&t.scale(&-1.0));
    (&up + &down.scale(&(-2.0 * s0).exp())).scale(&(0.5 * (s0 - shift).exp()))
}
