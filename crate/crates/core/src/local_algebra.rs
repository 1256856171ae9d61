//! Tangent spaces, codimension and determinacy at the jet level.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::group::{GroupError, MonomialField, SignAction};
use crate::poly::{Jet, JetError, MultiIndex, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("germ is not invariant under the action: term with exponents {0:?}")]
    NotInvariant(MultiIndex),
    #[error("germ has a nonzero constant term")]
    NonzeroConstant,
}

/// Escalation policy for the jet-order search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraOpts {
    /// Largest truncation order tried.
    pub cap: u32,
    /// Rank tolerance on the float path.
    pub tol: f64,
}

impl Default for AlgebraOpts {
    fn default() -> Self {
        AlgebraOpts { cap: 16, tol: 1e-8 }
    }
}

/// Jets spanning `jet_k(T_O)` or `jet_k(T^ext)`.
#[derive(Debug, Clone)]
pub struct TangentSpan<C> {
    pub nvars: usize,
    pub order: u32,
    pub extended: bool,
    pub fields: Vec<MonomialField>,
    pub basis_jets: Vec<Jet<C>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodimValue {
    Finite(usize),
    InfiniteSuspected,
}

impl Serialize for CodimValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CodimValue::Finite(v) => s.serialize_u64(*v as u64),
            CodimValue::InfiniteSuspected => s.serialize_str("infinite-suspected"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodimReport {
    pub value: CodimValue,
    pub order_used: u32,
    pub certified: bool,
    /// Invariant monomials spanning a complement of `T^ext + R` in graded-lex order.
    pub complement: Vec<MultiIndex>,
}

impl CodimReport {
    pub fn finite(&self) -> Option<usize> {
        match self.value {
            CodimValue::Finite(v) => Some(v),
            CodimValue::InfiniteSuspected => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Determinacy {
    Order(u32),
    UndeterminedAtCap,
}

impl Determinacy {
    pub fn order(&self) -> Option<u32> {
        match self {
            Determinacy::Order(k) => Some(*k),
            Determinacy::UndeterminedAtCap => None,
        }
    }
}

pub(crate) fn check_germ<C: Scalar>(f: &Jet<C>, action: &SignAction) -> Result<(), AlgebraError> {
    if f.nvars() != action.n() {
        return Err(GroupError::DimensionMismatch {
            action: action.n(),
            jet: f.nvars(),
        }
        .into());
    }
    if let Some(m) = action.non_invariant_terms(f).into_iter().next() {
        return Err(AlgebraError::NotInvariant(m));
    }
    if !f.constant_term().is_zero() {
        return Err(AlgebraError::NonzeroConstant);
    }
    Ok(())
}

/// Column index for a list of monomials.
pub(crate) struct Columns {
    pub monos: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl Columns {
    pub fn new(monos: Vec<MultiIndex>) -> Self {
        let index = monos
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        Columns { monos, index }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn row<C: Scalar>(&self, jet: &Jet<C>) -> Vec<(usize, C)> {
        jet.terms()
            .filter_map(|(m, c)| self.index.get(m).map(|&i| (i, c.clone())))
            .collect()
    }

    pub fn rows<C: Scalar>(&self, jets: &[Jet<C>]) -> Vec<Vec<(usize, C)>> {
        jets.iter().map(|j| self.row(j)).collect()
    }

    /// Column positions in graded-lex order (the stored order).
    pub fn ascending(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    /// Preference order for complement monomials: lower degree, then lower
    /// maximal exponent, then graded-lex.
    pub fn preference(&self) -> Vec<usize> {
        let mut order = self.ascending();
        order.sort_by(|&a, &b| {
            let (ma, mb) = (&self.monos[a], &self.monos[b]);
            ma.degree()
                .cmp(&mb.degree())
                .then(ma.max_exp().cmp(&mb.max_exp()))
                .then(ma.cmp(mb))
        });
        order
    }
}

/// Greedy complement of the row span in the preference order.
///
/// A set of coordinate vectors complements the row span iff the remaining
/// columns form a column basis; the greedy-first complement is therefore the
/// set of non-pivot columns when pivots are chosen in reverse preference.
pub(crate) fn greedy_complement<C: Scalar>(
    rows: &[Vec<(usize, C)>],
    cols: &Columns,
    tol: f64,
) -> Vec<MultiIndex> {
    let mut rev = cols.preference();
    rev.reverse();
    let pivots: BTreeSet<usize> = C::pivot_columns(rows, &rev, tol).into_iter().collect();
    (0..cols.len())
        .filter(|c| !pivots.contains(c))
        .map(|c| cols.monos[c].clone())
        .collect()
}

fn field_rows<C: Scalar>(f: &Jet<C>, fields: &[MonomialField], order: u32) -> Vec<Jet<C>> {
    let grad = f.with_order(order).gradient();
    fields
        .iter()
        .map(|phi| phi.apply_to(&grad))
        .filter(|j| !j.is_zero())
        .collect()
}

/// Spanning jets of the tangent space at truncation order `k`.
///
/// Fields have degree `>= 1`, or `>= 0` when `extended` (constant fields only
/// survive along coordinates fixed by the whole group).
pub fn tangent_span<C: Scalar>(
    f: &Jet<C>,
    action: &SignAction,
    k: u32,
    extended: bool,
) -> Result<TangentSpan<C>, AlgebraError> {
    check_germ(f, action)?;
    let lo = if extended { 0 } else { 1 };
    let fields = action.equivariant_fields(lo, k);
    let basis_jets = field_rows(f, &fields, k);
    Ok(TangentSpan {
        nvars: f.nvars(),
        order: k,
        extended,
        fields,
        basis_jets,
    })
}

/// Rows of `jet_N(T^ext) + R·1` over the invariant monomials of degree `0..=N`.
pub(crate) fn extended_system<C: Scalar>(
    f: &Jet<C>,
    action: &SignAction,
    order: u32,
) -> (Columns, Vec<Jet<C>>) {
    let cols = Columns::new(action.invariant_monomials(0, order));
    let fields = action.equivariant_fields(0, order);
    let mut jets = field_rows(f, &fields, order);
    jets.push(Jet::one(f.nvars(), order));
    (cols, jets)
}

struct Level {
    count: usize,
    certified: bool,
}

fn codim_level<C: Scalar>(
    f: &Jet<C>,
    action: &SignAction,
    order: u32,
    tol: f64,
) -> (Level, Columns, Vec<Vec<(usize, C)>>) {
    let (cols, jets) = extended_system(f, action, order);
    let rows = cols.rows(&jets);
    let pivots: BTreeSet<usize> = C::pivot_columns(&rows, &cols.ascending(), tol)
        .into_iter()
        .collect();
    let free: Vec<usize> = (0..cols.len()).filter(|c| !pivots.contains(c)).collect();
    // every invariant monomial of degree in [m, order] leads a tangent row
    let m = 1 + free
        .iter()
        .map(|&c| cols.monos[c].degree())
        .filter(|&d| d >= 1)
        .max()
        .unwrap_or(0);
    let certified = order as usize >= (m as usize + 1).max(f.nvars());
    (
        Level {
            count: free.len(),
            certified,
        },
        cols,
        rows,
    )
}

/// `dim E(Γ) / (T^ext + R·1)`, escalating the truncation order until the
/// count is certified and repeats.
pub fn codimension<C: Scalar>(
    f: &Jet<C>,
    action: &SignAction,
    opts: &AlgebraOpts,
) -> Result<CodimReport, AlgebraError> {
    check_germ(f, action)?;
    let mut prev: Option<usize> = None;
    for order in 1..=opts.cap {
        let (level, cols, rows) = codim_level(f, action, order, opts.tol);
        log::debug!(
            "codim order {order}: count {} certified {}",
            level.count,
            level.certified
        );
        if level.certified && prev == Some(level.count) {
            let mut complement = greedy_complement(&rows, &cols, opts.tol);
            complement.sort();
            return Ok(CodimReport {
                value: CodimValue::Finite(level.count),
                order_used: order,
                certified: true,
                complement,
            });
        }
        prev = Some(level.count);
    }
    Ok(CodimReport {
        value: CodimValue::InfiniteSuspected,
        order_used: opts.cap,
        certified: false,
        complement: Vec::new(),
    })
}

/// Verification order used for the determinacy certificate at level `k`.
pub fn certificate_order(k: u32, nvars: usize) -> u32 {
    (2 * k).max(k + 4).max(nvars as u32)
}

/// Checks `M^{k+1}(Γ) ⊂ M(Γ)·T_O`, which makes `f` `k`-determined.
///
/// At `N = certificate_order(k)` every invariant monomial of degree in
/// `[k+1, N]` must lead a row of `jet_N(M(Γ)·T_O)`; Nakayama's lemma then
/// lifts the inclusion from jets to germs. Returns `false` when `N` exceeds
/// the cap.
pub fn determinacy_certificate<C: Scalar>(
    f: &Jet<C>,
    action: &SignAction,
    k: u32,
    opts: &AlgebraOpts,
) -> Result<bool, AlgebraError> {
    check_germ(f, action)?;
    let order = certificate_order(k, f.nvars());
    if order > opts.cap {
        return Ok(false);
    }
    let invariants = action.invariant_monomials(1, order);
    let mut fields = BTreeSet::new();
    for psi in action.equivariant_fields(1, order) {
        for m in invariants
            .iter()
            .take_while(|m| m.degree() + psi.degree() <= order)
        {
            fields.insert(MonomialField {
                mono: psi.mono.mul(m),
                component: psi.component,
            });
        }
    }
    let fields: Vec<MonomialField> = fields.into_iter().collect();
    let jets = field_rows(f, &fields, order);
    let cols = Columns::new(invariants);
    let rows = cols.rows(&jets);
    let pivots: BTreeSet<usize> = C::pivot_columns(&rows, &cols.ascending(), opts.tol)
        .into_iter()
        .collect();
    Ok((0..cols.len())
        .filter(|&c| cols.monos[c].degree() > k)
        .all(|c| pivots.contains(&c)))
}

/// Smallest `k` passing [`determinacy_certificate`] within the cap.
pub fn determinacy_order<C: Scalar>(
    f: &Jet<C>,
    action: &SignAction,
    opts: &AlgebraOpts,
) -> Result<Determinacy, AlgebraError> {
    check_germ(f, action)?;
    let mut k = 1;
    while certificate_order(k, f.nvars()) <= opts.cap {
        if determinacy_certificate(f, action, k, opts)? {
            return Ok(Determinacy::Order(k));
        }
        k += 1;
    }
    Ok(Determinacy::UndeterminedAtCap)
}
