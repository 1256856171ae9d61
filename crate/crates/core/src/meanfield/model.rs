//! Closed-form objectives: the pairing pressure model and the strong-coupling
//! family.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::series;
use crate::poly::{FloatJet, Jet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter {0} must be finite")]
    NotFinite(&'static str),
    #[error("beta must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
}

/// Couplings of the pairing model. `gam` is the pairing coupling, `delt` the
/// density coupling and `lam` the on-site coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldParams {
    pub beta: f64,
    #[serde(default)]
    pub h: f64,
    pub mu: f64,
    pub lam: f64,
    pub gam: f64,
    pub delt: f64,
    /// Multiplies the `(μ + 2δ c2)` term of the pressure by `beta`.
    #[serde(default)]
    pub scale_density_by_beta: bool,
}

impl MeanFieldParams {
    pub fn new(beta: f64, h: f64, mu: f64, lam: f64, gam: f64, delt: f64) -> Self {
        MeanFieldParams {
            beta,
            h,
            mu,
            lam,
            gam,
            delt,
            scale_density_by_beta: false,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("beta", self.beta),
            ("h", self.h),
            ("mu", self.mu),
            ("lam", self.lam),
            ("gam", self.gam),
            ("delt", self.delt),
        ] {
            if !v.is_finite() {
                return Err(ModelError::NotFinite(name));
            }
        }
        if self.beta <= 0.0 {
            return Err(ModelError::NonPositiveBeta(self.beta));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<f64, ModelError> {
        Ok(match name {
            "beta" => self.beta,
            "h" => self.h,
            "mu" => self.mu,
            "lam" => self.lam,
            "gam" => self.gam,
            "delt" => self.delt,
            _ => return Err(ModelError::UnknownParam(name.to_string())),
        })
    }

    pub fn set(&mut self, name: &str, v: f64) -> Result<(), ModelError> {
        let slot = match name {
            "beta" => &mut self.beta,
            "h" => &mut self.h,
            "mu" => &mut self.mu,
            "lam" => &mut self.lam,
            "gam" => &mut self.gam,
            "delt" => &mut self.delt,
            _ => return Err(ModelError::UnknownParam(name.to_string())),
        };
        *slot = v;
        Ok(())
    }

    fn density_factor(&self) -> f64 {
        if self.scale_density_by_beta {
            self.beta
        } else {
            1.0
        }
    }
}

/// `ln[cosh(bh) + e^E cosh(x)]` and `q = e^E sinh(x) / (x D)` where `D` is the
/// bracket, both by log-sum-exp.
pub(crate) fn log_partition(bh: f64, e: f64, x: f64) -> (f64, f64) {
    let t = [bh, -bh, e + x, e - x];
    let m = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = t.iter().map(|v| (v - m).exp()).sum();
    let ln_d = m + s.ln() - std::f64::consts::LN_2;
    let q = if x < 1e-4 {
        2.0 * (e - m).exp() * (1.0 + x * x / 6.0 + x.powi(4) / 120.0) / s
    } else {
        ((t[2] - m).exp() - (t[3] - m).exp()) / (x * s)
    };
    (ln_d, q)
}

/// Jet of `ln[cosh(bh) + e^E cosh(b √z)]`.
fn log_partition_jet(bh: f64, e: f64, b: f64, z: &FloatJet) -> FloatJet {
    let z0 = z.constant_term().max(0.0);
    let m = bh.abs().max(e + b * z0.sqrt());
    let (n, order) = (z.nvars(), z.order());
    let base = 0.5 * ((bh - m).exp() + (-bh - m).exp());
    let inner = &Jet::constant(n, order, base) + &series::scaled_cosh_sqrt(z, b, m - e);
    &series::ln(&inner) + &Jet::constant(n, order, m)
}

/// `P0(c1, c2)` of the pairing model.
pub fn pressure_p0(c1: f64, c2: f64, p: &MeanFieldParams) -> f64 {
    let b = p.beta;
    let w = p.mu + 2.0 * p.delt * c2 - p.lam;
    let r = (w * w + p.gam * p.gam * c1 * c1).sqrt();
    let (ln_d, _) = log_partition(b * p.h, -p.lam * b, b * r);
    -std::f64::consts::LN_2 / b + p.density_factor() * (p.mu + 2.0 * p.delt * c2) + ln_d / b
}

/// `γ c1² + δ c2² − P0(c1, c2)`.
pub fn objective(c: [f64; 2], p: &MeanFieldParams) -> f64 {
    p.gam * c[0] * c[0] + p.delt * c[1] * c[1] - pressure_p0(c[0], c[1], p)
}

pub fn objective_gradient(c: [f64; 2], p: &MeanFieldParams) -> [f64; 2] {
    let b = p.beta;
    let w = p.mu + 2.0 * p.delt * c[1] - p.lam;
    let r = (w * w + p.gam * p.gam * c[0] * c[0]).sqrt();
    let (_, q) = log_partition(b * p.h, -p.lam * b, b * r);
    // dP0/dR = q b R
    let g1 = 2.0 * p.gam * c[0] - q * b * p.gam * p.gam * c[0];
    let g2 = 2.0 * p.delt * c[1] - 2.0 * p.delt * p.density_factor() - 2.0 * p.delt * q * b * w;
    [g1, g2]
}

/// Taylor jet of the objective about `c` in shifted coordinates.
pub fn objective_jet(c: [f64; 2], p: &MeanFieldParams, order: u32) -> FloatJet {
    let b = p.beta;
    let k = |v: f64| Jet::constant(2, order, v);
    let c1 = &Jet::var(2, order, 0) + &k(c[0]);
    let c2 = &Jet::var(2, order, 1) + &k(c[1]);
    let w = &c2.scale(&(2.0 * p.delt)) + &k(p.mu - p.lam);
    let z = &(&w * &w) + &(&c1 * &c1).scale(&(p.gam * p.gam));
    let ln_d = log_partition_jet(b * p.h, -p.lam * b, b, &z);
    let density = (&c2.scale(&(2.0 * p.delt)) + &k(p.mu)).scale(&p.density_factor());
    let p0 = &(&density + &ln_d.scale(&(1.0 / b))) + &k(-std::f64::consts::LN_2 / b);
    let quad = &(&c1 * &c1).scale(&p.gam) + &(&c2 * &c2).scale(&p.delt);
    &quad - &p0
}

/// `F(c) = u1 c² − ln(1 + e^{−u2} cosh √(u2² + u1² c²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongCoupling {
    pub u1: f64,
    pub u2: f64,
}

impl StrongCoupling {
    pub fn value(&self, c: f64) -> f64 {
        let r = (self.u2 * self.u2 + self.u1 * self.u1 * c * c).sqrt();
        let (ln_d, _) = log_partition(0.0, -self.u2, r);
        self.u1 * c * c - (ln_d + std::f64::consts::LN_2)
    }

    pub fn derivative(&self, c: f64) -> f64 {
        let r = (self.u2 * self.u2 + self.u1 * self.u1 * c * c).sqrt();
        let (_, q) = log_partition(0.0, -self.u2, r);
        2.0 * self.u1 * c - q * self.u1 * self.u1 * c
    }

    pub fn jet(&self, c: f64, order: u32) -> FloatJet {
        let k = |v: f64| Jet::constant(1, order, v);
        let cj = &Jet::var(1, order, 0) + &k(c);
        let z = &(&cj * &cj).scale(&(self.u1 * self.u1)) + &k(self.u2 * self.u2);
        let ln_d = &log_partition_jet(0.0, -self.u2, 1.0, &z) + &k(std::f64::consts::LN_2);
        &(&cj * &cj).scale(&self.u1) - &ln_d
    }

    pub fn get(&self, name: &str) -> Result<f64, ModelError> {
        match name {
            "u1" => Ok(self.u1),
            "u2" => Ok(self.u2),
            _ => Err(ModelError::UnknownParam(name.to_string())),
        }
    }

    pub fn set(&mut self, name: &str, v: f64) -> Result<(), ModelError> {
        match name {
            "u1" => self.u1 = v,
            "u2" => self.u2 = v,
            _ => return Err(ModelError::UnknownParam(name.to_string())),
        }
        Ok(())
    }
}

/// A smooth objective on a box of order parameters, even in the first one.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn value(&self, c: &[f64]) -> f64;

    /// Central differences unless overridden.
    fn gradient(&self, c: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let h = 1e-6 * c[i].abs().max(1.0);
                let mut a = c.to_vec();
                let mut b = c.to_vec();
                a[i] += h;
                b[i] -= h;
                (self.value(&a) - self.value(&b)) / (2.0 * h)
            })
            .collect()
    }

    /// Analytic Taylor jet about `c` in shifted coordinates, if available.
    fn jet(&self, _c: &[f64], _order: u32) -> Option<FloatJet> {
        None
    }

    /// Hessian from the 2-jet when available, else differences of the gradient.
    fn hessian(&self, c: &[f64]) -> Vec<Vec<f64>> {
        let d = self.dim();
        if let Some(j) = self.jet(c, 2) {
            let mut h = vec![vec![0.0; d]; d];
            for (i, row) in h.iter_mut().enumerate() {
                for (k, v) in row.iter_mut().enumerate() {
                    let mut e = vec![0u32; d];
                    e[i] += 1;
                    e[k] += 1;
                    let f = if i == k { 2.0 } else { 1.0 };
                    *v = f * j.coeff_of(&e);
                }
            }
            return h;
        }
        let mut h = vec![vec![0.0; d]; d];
        for k in 0..d {
            let step = 1e-5 * c[k].abs().max(1.0);
            let mut a = c.to_vec();
            let mut b = c.to_vec();
            a[k] += step;
            b[k] -= step;
            let (ga, gb) = (self.gradient(&a), self.gradient(&b));
            for i in 0..d {
                h[i][k] = (ga[i] - gb[i]) / (2.0 * step);
            }
        }
        for i in 0..d {
            for k in 0..i {
                let m = 0.5 * (h[i][k] + h[k][i]);
                h[i][k] = m;
                h[k][i] = m;
            }
        }
        h
    }
}

impl Objective for MeanFieldParams {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, c: &[f64]) -> f64 {
        objective([c[0], c[1]], self)
    }

    fn gradient(&self, c: &[f64]) -> Vec<f64> {
        objective_gradient([c[0], c[1]], self).to_vec()
    }

    fn jet(&self, c: &[f64], order: u32) -> Option<FloatJet> {
        Some(objective_jet([c[0], c[1]], self, order))
    }
}

impl Objective for StrongCoupling {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, c: &[f64]) -> f64 {
        StrongCoupling::value(self, c[0])
    }

    fn gradient(&self, c: &[f64]) -> Vec<f64> {
        vec![self.derivative(c[0])]
    }

    fn jet(&self, c: &[f64], order: u32) -> Option<FloatJet> {
        Some(StrongCoupling::jet(self, c[0], order))
    }
}

/// Built-in models selectable from a params file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    StrongCoupling(StrongCoupling),
    Pairing(MeanFieldParams),
}

impl ModelSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            ModelSpec::Pairing(p) => p.validate(),
            ModelSpec::StrongCoupling(s) => {
                if !s.u1.is_finite() {
                    return Err(ModelError::NotFinite("u1"));
                }
                if !s.u2.is_finite() {
                    return Err(ModelError::NotFinite("u2"));
                }
                Ok(())
            }
        }
    }

    pub fn get(&self, name: &str) -> Result<f64, ModelError> {
        match self {
            ModelSpec::Pairing(p) => p.get(name),
            ModelSpec::StrongCoupling(s) => s.get(name),
        }
    }

    pub fn set(&mut self, name: &str, v: f64) -> Result<(), ModelError> {
        match self {
            ModelSpec::Pairing(p) => p.set(name, v),
            ModelSpec::StrongCoupling(s) => s.set(name, v),
        }
    }

    pub fn as_objective(&self) -> &dyn Objective {
        match self {
            ModelSpec::Pairing(p) => p,
            ModelSpec::StrongCoupling(s) => s,
        }
    }

    /// Search box `(lo, hi)` per coordinate that contains every critical point.
    pub fn default_box(&self) -> Vec<(f64, f64)> {
        match self {
            ModelSpec::Pairing(_) => vec![(-1.5, 1.5), (-0.5, 2.5)],
            ModelSpec::StrongCoupling(_) => vec![(-1.5, 1.5)],
        }
    }
}

/// Adds `eps · c1⁴ c2²` to a two-variable objective.
#[derive(Debug, Clone, Copy)]
pub struct Perturbed<'a, M: ?Sized> {
    pub inner: &'a M,
    pub eps: f64,
}

impl<M: Objective + ?Sized> Objective for Perturbed<'_, M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, c: &[f64]) -> f64 {
        self.inner.value(c) + self.eps * c[0].powi(4) * c[1] * c[1]
    }

    fn gradient(&self, c: &[f64]) -> Vec<f64> {
        let mut g = self.inner.gradient(c);
        g[0] += 4.0 * self.eps * c[0].powi(3) * c[1] * c[1];
        g[1] += 2.0 * self.eps * c[0].powi(4) * c[1];
        g
    }

    fn jet(&self, c: &[f64], order: u32) -> Option<FloatJet> {
        let base = self.inner.jet(c, order)?;
        let k = |v: f64| Jet::constant(2, order, v);
        let c1 = &Jet::var(2, order, 0) + &k(c[0]);
        let c2 = &Jet::var(2, order, 1) + &k(c[1]);
        let extra = (&c1.pow(4) * &c2.pow(2)).scale(&self.eps);
        Some(&base + &extra)
    }
}
