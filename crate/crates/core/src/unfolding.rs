//! Invariant unfoldings, transversality and universal unfoldings.

use thiserror::Error;

use crate::group::SignAction;
use crate::local_algebra::{
    codimension, extended_system, greedy_complement, AlgebraError, AlgebraOpts,
};
use crate::poly::{Jet, MultiIndex, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnfoldingError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("base germ is not finitely determined within the order cap {0}; transversality is undecidable")]
    Undecidable(u32),
    #[error("parameter slice {param} is not invariant: term with exponents {mono:?}")]
    NonInvariantSlice { param: usize, mono: MultiIndex },
    #[error("unfolding shape error: {0}")]
    Shape(String),
}

/// Base germ `f` and initial speeds `α_i = ∂F/∂u_i (x, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unfolding<C> {
    pub base: Jet<C>,
    pub params: Vec<String>,
    pub alphas: Vec<Jet<C>>,
    /// `F(x, u)` in `n + r` variables, parameters last.
    pub full: Option<Jet<C>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransversalityReport {
    pub transversal: bool,
    pub order_used: u32,
    /// Complement monomials not reached by `T^ext + span{1, α_i}`.
    pub missing: Vec<MultiIndex>,
    pub minimal: bool,
    pub codim: usize,
}

pub fn default_param_names(r: usize) -> Vec<String> {
    (1..=r).map(|i| format!("u{i}")).collect()
}

impl<C: Scalar> Unfolding<C> {
    /// Unfolding with the given speeds and no full jet.
    pub fn new(base: Jet<C>, alphas: Vec<Jet<C>>) -> Result<Self, UnfoldingError> {
        for (i, a) in alphas.iter().enumerate() {
            if a.nvars() != base.nvars() {
                return Err(UnfoldingError::Shape(format!(
                    "alpha {} has {} variables, base has {}",
                    i + 1,
                    a.nvars(),
                    base.nvars()
                )));
            }
        }
        let params = default_param_names(alphas.len());
        Ok(Unfolding {
            base,
            params,
            alphas,
            full: None,
        })
    }

    pub fn r(&self) -> usize {
        self.alphas.len()
    }

    /// `F = f + Σ u_i α_i` in `n + r` variables, parameters last.
    pub fn linear_full(&self) -> Jet<C> {
        let n = self.base.nvars();
        let r = self.r();
        let top = self
            .alphas
            .iter()
            .filter_map(|a| a.max_degree())
            .max()
            .map_or(0, |d| d + 1);
        let order = self.base.order().max(top);
        let positions: Vec<usize> = (0..n).collect();
        let mut full = self.base.with_order(order).embed(n + r, &positions);
        for (i, a) in self.alphas.iter().enumerate() {
            let u = Jet::var(n + r, order, n + i);
            let lifted = a.with_order(order).embed(n + r, &positions);
            full = &full + &(&lifted * &u);
        }
        full
    }

    /// Drops speed `i`.
    pub fn without(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.alphas.remove(i);
        out.params.remove(i);
        out.full = None;
        out
    }

    /// Renders `f + u1*z1 + ...` with `f` standing for the base.
    pub fn render_linear(&self, names: &[String]) -> String {
        let mut s = "f".to_string();
        for (p, a) in self.params.iter().zip(&self.alphas) {
            let body = a.render(names);
            if a.len() == 1 && !body.starts_with('-') {
                s.push_str(&format!(" + {p}*{body}"));
            } else {
                s.push_str(&format!(" + {p}*({body})"));
            }
        }
        s
    }
}

/// Splits `F(x, u)` (parameters last) into the base and its speeds.
pub fn alphas_of<C: Scalar>(
    full: &Jet<C>,
    action: &SignAction,
) -> Result<Unfolding<C>, UnfoldingError> {
    let n = action.n();
    if full.nvars() < n {
        return Err(UnfoldingError::Shape(format!(
            "unfolding has {} variables, action needs at least {}",
            full.nvars(),
            n
        )));
    }
    let r = full.nvars() - n;
    let xs: Vec<usize> = (0..n).collect();
    let base = full.restrict(&xs);
    if let Some(m) = action.non_invariant_terms(&base).into_iter().next() {
        return Err(AlgebraError::NotInvariant(m).into());
    }
    let mut alphas = Vec::with_capacity(r);
    for i in 0..r {
        let a = full
            .partial(n + i)
            .map_err(AlgebraError::from)?
            .restrict(&xs);
        if let Some(mono) = action.non_invariant_terms(&a).into_iter().next() {
            return Err(UnfoldingError::NonInvariantSlice { param: i + 1, mono });
        }
        alphas.push(a);
    }
    Ok(Unfolding {
        base,
        params: default_param_names(r),
        alphas,
        full: Some(full.clone()),
    })
}

/// Rank test for `E(Γ) = T^ext + span{1, α_1, …, α_r}`.
pub fn is_transversal<C: Scalar>(
    u: &Unfolding<C>,
    action: &SignAction,
    opts: &AlgebraOpts,
) -> Result<TransversalityReport, UnfoldingError> {
    let report = codimension(&u.base, action, opts)?;
    let Some(codim) = report.finite() else {
        return Err(UnfoldingError::Undecidable(opts.cap));
    };
    for (i, a) in u.alphas.iter().enumerate() {
        if a.nvars() != u.base.nvars() {
            return Err(UnfoldingError::Shape(format!(
                "alpha {} has wrong variable count",
                i + 1
            )));
        }
        if let Some(mono) = action.non_invariant_terms(a).into_iter().next() {
            return Err(UnfoldingError::NonInvariantSlice { param: i + 1, mono });
        }
    }
    let order = report.order_used;
    let (cols, mut jets) = extended_system(&u.base, action, order);
    jets.extend(u.alphas.iter().map(|a| a.with_order(order)));
    let rows = cols.rows(&jets);
    let mut missing = greedy_complement(&rows, &cols, opts.tol);
    missing.sort();
    let transversal = missing.is_empty();
    Ok(TransversalityReport {
        transversal,
        order_used: order,
        missing,
        minimal: transversal && u.r() == codim,
        codim,
    })
}

/// `F = f + Σ u_i z_i` with `z_i` the codimension complement.
pub fn universal_unfolding<C: Scalar>(
    f: &Jet<C>,
    action: &SignAction,
    opts: &AlgebraOpts,
) -> Result<Unfolding<C>, UnfoldingError> {
    let report = codimension(f, action, opts)?;
    if report.finite().is_none() {
        return Err(UnfoldingError::Undecidable(opts.cap));
    }
    let alphas = report
        .complement
        .iter()
        .map(|z| Jet::monomial(f.nvars(), f.order().max(z.degree()), z.clone(), C::one()))
        .collect();
    let mut u = Unfolding::new(f.clone(), alphas)?;
    u.full = Some(u.linear_full());
    Ok(u)
}
