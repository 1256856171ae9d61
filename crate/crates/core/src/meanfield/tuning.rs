//! Couplings that make a critical point maximally degenerate.

use thiserror::Error;

use super::model::{objective_gradient, objective_jet, MeanFieldParams, StrongCoupling};
use super::solve::hessian_eigenvalues;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TuningError {
    #[error("no degenerate branch found: {0}")]
    NoRoot(String),
}

/// Pairing-model couplings with a corank-2 critical point on the `c1 = 0` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingTuning {
    pub params: MeanFieldParams,
    pub point: [f64; 2],
    /// `μ + 2δ c2 − λ` at the point.
    pub w: f64,
    pub hess_eigs: Vec<f64>,
}

struct Closed {
    b: f64,
    ch: f64,
    e: f64,
}

impl Closed {
    fn d(&self, w: f64) -> f64 {
        self.ch + self.e * (self.b * w).cosh()
    }
    fn n(&self, w: f64) -> f64 {
        self.e * (self.b * w).sinh() / self.d(w)
    }
    fn n_prime(&self, w: f64) -> f64 {
        let d = self.d(w);
        self.b * self.e * ((self.b * w).cosh() * self.ch + self.e) / (d * d)
    }
    fn delt(&self, w: f64) -> f64 {
        1.0 / (2.0 * self.n_prime(w))
    }
    fn gam(&self, w: f64) -> f64 {
        let a = w.abs();
        if a * self.b < 1e-8 {
            return 2.0 * self.d(w) / (self.e * self.b);
        }
        2.0 * a * self.d(w) / (self.e * (self.b * a).sinh())
    }
}

/// Tunes `(γ, δ)` at fixed `β, h, μ, λ` so that both Hessian eigenvalues
/// vanish at a critical point `(0, c2)`; picks the smallest `w > 0` root.
///
/// With `c1 = 0` the stationarity and degeneracy conditions reduce to
/// `c2 = 1 + n(w)`, `δ = 1/(2 n'(w))`, `γ = 2 D / (e^{−λβ} sinh(β|w|)/|w|)`,
/// leaving the scalar equation `μ + 2δ c2 − λ = w`.
pub fn tune_pairing(beta: f64, h: f64, mu: f64, lam: f64) -> Result<PairingTuning, TuningError> {
    let k = Closed {
        b: beta,
        ch: (beta * h).cosh(),
        e: (-lam * beta).exp(),
    };
    let g = |w: f64| mu + 2.0 * k.delt(w) * (1.0 + k.n(w)) - lam - w;
    let step = 1e-3;
    let mut root = None;
    let mut a = step;
    while a < 60.0 / beta {
        let b = a + step;
        let (ga, gb) = (g(a), g(b));
        if ga.is_finite() && gb.is_finite() && ga * gb <= 0.0 {
            root = Some((a, b));
            break;
        }
        a = b;
    }
    let (mut lo, mut hi) = root.ok_or_else(|| {
        TuningError::NoRoot(format!(
            "no sign change of the degeneracy equation for lam = {lam}"
        ))
    })?;
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if g(lo) * g(m) <= 0.0 {
            hi = m;
        } else {
            lo = m;
        }
    }
    let w = 0.5 * (lo + hi);
    let mut params = MeanFieldParams::new(beta, h, mu, lam, k.gam(w), k.delt(w));
    let mut c2 = 1.0 + k.n(w);
    polish(&mut params, &mut c2);
    let point = [0.0, c2];
    Ok(PairingTuning {
        hess_eigs: hessian_eigenvalues(&params, &point),
        w: mu + 2.0 * params.delt * c2 - lam,
        params,
        point,
    })
}

/// Newton on `(∂c2 O, H11, H22) = 0` in `(γ, δ, c2)`.
fn polish(p: &mut MeanFieldParams, c2: &mut f64) {
    let resid = |p: &MeanFieldParams, c2: f64| -> [f64; 3] {
        let j = objective_jet([0.0, c2], p, 2);
        [
            objective_gradient([0.0, c2], p)[1],
            2.0 * j.coeff_of(&[2, 0]),
            2.0 * j.coeff_of(&[0, 2]),
        ]
    };
    for _ in 0..8 {
        let r = resid(p, *c2);
        let scale = [1.0, p.gam.abs().max(1.0), p.delt.abs().max(1.0)];
        if r.iter().zip(scale).all(|(v, s)| v.abs() < 1e-14 * s) {
            return;
        }
        let x = [p.gam, p.delt, *c2];
        let mut jac = nalgebra::Matrix3::<f64>::zeros();
        for col in 0..3 {
            let hstep = 1e-6 * x[col].abs().max(1.0);
            let mut xp = x;
            let mut xm = x;
            xp[col] += hstep;
            xm[col] -= hstep;
            let mut pp = *p;
            let mut pm = *p;
            (pp.gam, pp.delt) = (xp[0], xp[1]);
            (pm.gam, pm.delt) = (xm[0], xm[1]);
            let (rp, rm) = (resid(&pp, xp[2]), resid(&pm, xm[2]));
            for row in 0..3 {
                jac[(row, col)] = (rp[row] - rm[row]) / (2.0 * hstep);
            }
        }
        let Some(d) = jac.lu().solve(&nalgebra::Vector3::new(-r[0], -r[1], -r[2])) else {
            return;
        };
        p.gam += d[0];
        p.delt += d[1];
        *c2 += d[2];
    }
}

/// Default pairing configuration `β = 1, h = 0, μ = 2, λ = 6`.
pub fn tune_theofin1() -> Result<PairingTuning, TuningError> {
    tune_pairing(1.0, 0.0, 2.0, 6.0)
}

/// The `(u1, u2)` where both `c²` and `c⁴` coefficients of the strong-coupling
/// family vanish at `c = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TricriticalPoint {
    pub model: StrongCoupling,
    pub c6: f64,
}

/// `u1` on the curve where the `c²` coefficient vanishes.
pub fn second_order_u1(u2: f64) -> f64 {
    2.0 * u2 * (u2.exp() + u2.cosh()) / u2.sinh()
}

pub fn tune_strong_coupling() -> Result<TricriticalPoint, TuningError> {
    let a4 = |u2: f64| {
        let m = StrongCoupling {
            u1: second_order_u1(u2),
            u2,
        };
        m.jet(0.0, 4).coeff_of(&[4])
    };
    let mut bracket = None;
    let mut a = 0.05;
    while a < 5.0 {
        let b = a + 0.01;
        if a4(a) * a4(b) <= 0.0 {
            bracket = Some((a, b));
            break;
        }
        a = b;
    }
    let (mut lo, mut hi) =
        bracket.ok_or_else(|| TuningError::NoRoot("quartic coefficient never vanishes".into()))?;
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if a4(lo) * a4(m) <= 0.0 {
            hi = m;
        } else {
            lo = m;
        }
    }
    let u2 = 0.5 * (lo + hi);
    let model = StrongCoupling {
        u1: second_order_u1(u2),
        u2,
    };
    Ok(TricriticalPoint {
        c6: model.jet(0.0, 6).coeff_of(&[6]),
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_tuning_default_branch() {
        let t = tune_theofin1().unwrap();
        assert!((t.w - 4.9682).abs() < 1e-3);
        assert!((t.params.delt - 3.89506).abs() < 1e-4);
        assert!((t.params.gam - 65.7073).abs() < 1e-3);
        assert!((t.point[1] - 1.1512).abs() < 1e-3);
        assert!(
            t.hess_eigs.iter().all(|e| e.abs() < 1e-8),
            "{:?}",
            t.hess_eigs
        );
    }

    #[test]
    fn tricritical_point() {
        let t = tune_strong_coupling().unwrap();
        assert!((t.model.u2 - 0.7494421094336724).abs() < 1e-9);
        assert!((t.model.u1 - 6.221147701252516).abs() < 1e-8);
        assert!((t.c6 - 15.55511220081205).abs() < 1e-6);
    }
}
