//! Classification of critical points of mean-field objectives.

use super::model::{ModelSpec, Objective};
use super::taylor::{taylor_at, TaylorMethod, TaylorResult};
use crate::classify::{classify_germ, ClassificationResult, ClassifyError, ClassifyOpts};
use crate::group::SignAction;
use crate::poly::FloatJet;
use crate::unfolding::{is_transversal, TransversalityReport, Unfolding, UnfoldingError};

/// Jet order used for classification at critical points.
pub const CLASSIFY_ORDER: u32 = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalClassification {
    pub taylor: TaylorResult,
    pub classification: ClassificationResult,
}

/// Taylor jet at `c` matched against the classification tables.
pub fn classify_critical_point(
    f: &dyn Objective,
    c: &[f64],
    opts: &ClassifyOpts,
) -> Result<CriticalClassification, ClassifyError> {
    let taylor = taylor_at(f, c, CLASSIFY_ORDER, TaylorMethod::Auto);
    if taylor.warning {
        log::warn!(
            "Taylor jet at {c:?} is not even (residual {:.3e}); classifying its projection",
            taylor.residual
        );
    }
    let action = SignAction::full(f.dim());
    let classification = classify_germ(&taylor.jet, &action, opts)?;
    Ok(CriticalClassification {
        taylor,
        classification,
    })
}

/// Coupling names used as unfolding directions by default.
pub fn default_couplings(spec: &ModelSpec) -> Vec<&'static str> {
    match spec {
        ModelSpec::Pairing(_) => vec!["lam", "gam", "delt"],
        ModelSpec::StrongCoupling(_) => vec!["u1", "u2"],
    }
}

/// Symmetrized jet of `∂O/∂p` at `c` by central differences in the coupling.
pub fn coupling_speed(
    spec: &ModelSpec,
    name: &str,
    c: &[f64],
    order: u32,
) -> Result<FloatJet, UnfoldingError> {
    let p0 = spec
        .get(name)
        .map_err(|e| UnfoldingError::Shape(e.to_string()))?;
    let h = 1e-4 * p0.abs().max(1.0);
    let at = |v: f64| -> Result<FloatJet, UnfoldingError> {
        let mut s = *spec;
        s.set(name, v)
            .map_err(|e| UnfoldingError::Shape(e.to_string()))?;
        Ok(taylor_at(s.as_objective(), c, order, TaylorMethod::Auto).raw)
    };
    let d = (&at(p0 + h)? - &at(p0 - h)?).scale(&(0.5 / h));
    let action = SignAction::full(spec.as_objective().dim());
    Ok(action.reynolds(&d).expect("dimensions agree"))
}

/// Transversality of the unfolding by the named couplings at a critical
/// point, against the symmetrized Taylor jet there.
pub fn coupling_transversality(
    spec: &ModelSpec,
    c: &[f64],
    couplings: &[&str],
    opts: &ClassifyOpts,
) -> Result<TransversalityReport, UnfoldingError> {
    let f = spec.as_objective();
    let base = taylor_at(f, c, CLASSIFY_ORDER, TaylorMethod::Auto).jet;
    // entries below the classification thresholds are rounding noise; left in,
    // truncation at low order would promote them to pivots
    let floor = opts.zero_tol * base.max_abs_coeff();
    let base = base.filter(|m, v| {
        let t = if m.degree() == 2 {
            opts.hess_tol.max(floor)
        } else {
            floor
        };
        v.abs() >= t
    });
    let mut alphas = Vec::with_capacity(couplings.len());
    for name in couplings {
        alphas.push(coupling_speed(spec, name, c, CLASSIFY_ORDER)?);
    }
    let mut u = Unfolding::new(base, alphas)?;
    u.params = couplings.iter().map(|s| s.to_string()).collect();
    is_transversal(&u, &SignAction::full(f.dim()), &opts.algebra)
}
