//! Diagonal sign groups acting on `R^n`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Jet, JetError, MultiIndex, Scalar};

/// Largest supported variable count; the group has at most `2^MAX_VARS` elements.
pub const MAX_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("generator {index} has length {len}, expected {n}")]
    GeneratorLength { index: usize, len: usize, n: usize },
    #[error("generator {index} has entry {value}; entries must be -1 or 1")]
    GeneratorEntry { index: usize, value: i64 },
    #[error("{0} variables exceed the supported maximum of {MAX_VARS}")]
    TooLarge(usize),
    #[error("action acts on {action} variables but the jet has {jet}")]
    DimensionMismatch { action: usize, jet: usize },
}

/// A subgroup of `{+1,-1}^n` acting by `x_i -> g_i x_i`.
///
/// Elements are stored as bit masks, bit `i` set when coordinate `i` flips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignAction {
    n: usize,
    generators: Vec<u32>,
    elements: Vec<u32>,
    fixed: Vec<usize>,
}

fn mask_of(signs: &[i8]) -> u32 {
    signs
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < 0)
        .fold(0, |m, (i, _)| m | (1 << i))
}

impl SignAction {
    /// Builds the group generated by the given sign vectors.
    pub fn new(n: usize, generators: &[Vec<i64>]) -> Result<Self, GroupError> {
        if n > MAX_VARS {
            return Err(GroupError::TooLarge(n));
        }
        let mut masks = Vec::with_capacity(generators.len());
        for (index, g) in generators.iter().enumerate() {
            if g.len() != n {
                return Err(GroupError::GeneratorLength {
                    index,
                    len: g.len(),
                    n,
                });
            }
            let mut signs = Vec::with_capacity(n);
            for &v in g {
                match v {
                    1 => signs.push(1i8),
                    -1 => signs.push(-1i8),
                    _ => return Err(GroupError::GeneratorEntry { index, value: v }),
                }
            }
            masks.push(mask_of(&signs));
        }
        Ok(Self::from_masks(n, masks))
    }

    fn from_masks(n: usize, generators: Vec<u32>) -> Self {
        // closure under xor: a sign group is an F2 vector space
        let mut elements = vec![0u32];
        for &g in &generators {
            if elements.contains(&g) {
                continue;
            }
            let shifted: Vec<u32> = elements.iter().map(|e| e ^ g).collect();
            elements.extend(shifted);
        }
        // identity first, then lexicographic with +1 before -1 per coordinate
        let key = |m: &u32| -> Vec<bool> { (0..n).map(|i| m & (1 << i) != 0).collect() };
        elements.sort_by_key(key);
        let union = generators.iter().fold(0u32, |a, g| a | g);
        let fixed = (0..n).filter(|i| union & (1 << i) == 0).collect();
        SignAction {
            n,
            generators,
            elements,
            fixed,
        }
    }

    /// Every coordinate flips independently.
    pub fn full(n: usize) -> Self {
        Self::from_masks(n, (0..n).map(|i| 1u32 << i).collect())
    }

    /// One simultaneous flip of all coordinates.
    pub fn overall(n: usize) -> Self {
        let all = if n == 0 { 0 } else { (1u32 << n) - 1 };
        Self::from_masks(n, if n == 0 { vec![] } else { vec![all] })
    }

    /// No symmetry.
    pub fn trivial(n: usize) -> Self {
        Self::from_masks(n, vec![])
    }

    /// Restriction to a subset of coordinates, in the order given.
    pub fn restrict(&self, coords: &[usize]) -> Self {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                coords
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| g & (1 << c) != 0)
                    .fold(0u32, |m, (k, _)| m | (1 << k))
            })
            .filter(|&m| m != 0)
            .collect();
        Self::from_masks(coords.len(), gens)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Group order `|Γ|`.
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Generators as sign vectors.
    pub fn generators(&self) -> Vec<Vec<i8>> {
        self.generators.iter().map(|&g| self.signs(g)).collect()
    }

    /// Group elements as sign vectors, identity first.
    pub fn elements(&self) -> Vec<Vec<i8>> {
        self.elements.iter().map(|&g| self.signs(g)).collect()
    }

    fn signs(&self, mask: u32) -> Vec<i8> {
        (0..self.n)
            .map(|i| if mask & (1 << i) != 0 { -1 } else { 1 })
            .collect()
    }

    /// Coordinates fixed by the whole group: the fixed subspace `R^n_Γ`.
    pub fn fixed_coords(&self) -> &[usize] {
        &self.fixed
    }

    /// True when every single-coordinate flip is in the group.
    pub fn is_full(&self) -> bool {
        let all = if self.n == 0 { 0 } else { (1u64 << self.n) - 1 };
        self.elements.len() as u64 == all + 1
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    // parity of the monomial character at a group element
    fn flips(m: &MultiIndex, mask: u32) -> bool {
        m.exps()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &e)| e)
            .sum::<u32>()
            % 2
            == 1
    }

    /// `m(γx) = m(x)` for every group element.
    pub fn is_invariant_monomial(&self, m: &MultiIndex) -> bool {
        self.generators.iter().all(|&g| !Self::flips(m, g))
    }

    /// `m·e_i` is equivariant: `m(γx) = γ_i m(x)` for every group element.
    pub fn is_equivariant_field(&self, m: &MultiIndex, i: usize) -> bool {
        self.generators
            .iter()
            .all(|&g| Self::flips(m, g) == (g & (1 << i) != 0))
    }

    /// Invariant monomials with degree in `lo..=hi`, graded-lex.
    pub fn invariant_monomials(&self, lo: u32, hi: u32) -> Vec<MultiIndex> {
        MultiIndex::up_to_degree(self.n, lo, hi)
            .into_iter()
            .filter(|m| self.is_invariant_monomial(m))
            .collect()
    }

    /// Equivariant monomial fields with degree in `lo..=hi`, component-major.
    pub fn equivariant_fields(&self, lo: u32, hi: u32) -> Vec<MonomialField> {
        let monos = MultiIndex::up_to_degree(self.n, lo, hi);
        (0..self.n)
            .flat_map(|i| {
                monos
                    .iter()
                    .filter(move |m| self.is_equivariant_field(m, i))
                    .map(move |m| MonomialField {
                        mono: m.clone(),
                        component: i,
                    })
            })
            .collect()
    }

    fn check_dim<C: Scalar>(&self, f: &Jet<C>) -> Result<(), GroupError> {
        if f.nvars() != self.n {
            return Err(GroupError::DimensionMismatch {
                action: self.n,
                jet: f.nvars(),
            });
        }
        Ok(())
    }

    /// `f(γx)` for the element with the given signs.
    pub fn apply<C: Scalar>(&self, signs: &[i8], f: &Jet<C>) -> Jet<C> {
        let mask = mask_of(signs);
        let mut out = Jet::zero(f.nvars(), f.order());
        for (m, c) in f.terms() {
            let c = if Self::flips(m, mask) {
                -c.clone()
            } else {
                c.clone()
            };
            out.add_term(m.clone(), c);
        }
        out
    }

    /// Reynolds average `(1/|Γ|) Σ f(γx)`.
    ///
    /// The average of a monomial character is 1 on invariant monomials and 0
    /// otherwise, so this keeps exactly the invariant terms.
    pub fn reynolds<C: Scalar>(&self, f: &Jet<C>) -> Result<Jet<C>, GroupError> {
        self.check_dim(f)?;
        Ok(f.filter(|m, _| self.is_invariant_monomial(m)))
    }

    /// Monomials of `f` that are not invariant, in graded-lex order.
    pub fn non_invariant_terms<C: Scalar>(&self, f: &Jet<C>) -> Vec<MultiIndex> {
        f.terms()
            .filter(|(m, _)| !self.is_invariant_monomial(m))
            .map(|(m, _)| m.clone())
            .collect()
    }

    pub fn is_invariant<C: Scalar>(&self, f: &Jet<C>) -> bool {
        f.nvars() == self.n && self.non_invariant_terms(f).is_empty()
    }
}

/// Monomial vector field `mono · e_component`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialField {
    pub mono: MultiIndex,
    pub component: usize,
}

impl MonomialField {
    pub fn degree(&self) -> u32 {
        self.mono.degree()
    }

    pub fn to_vector_jet<C: Scalar>(&self, order: u32) -> VectorJet<C> {
        let n = self.mono.nvars();
        let components = (0..n)
            .map(|i| {
                if i == self.component {
                    Jet::monomial(n, order, self.mono.clone(), C::one())
                } else {
                    Jet::zero(n, order)
                }
            })
            .collect();
        VectorJet { components }
    }

    /// `mono · ∂f/∂x_component`, the field applied to the gradient.
    pub fn apply_to<C: Scalar>(&self, grad: &[Jet<C>]) -> Jet<C> {
        let g = &grad[self.component];
        let mut out = Jet::zero(g.nvars(), g.order());
        for (m, c) in g.terms() {
            out.add_term(m.mul(&self.mono), c.clone());
        }
        out
    }
}

/// Vector field whose component `i` is the coefficient of `∂/∂x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorJet<C> {
    pub components: Vec<Jet<C>>,
}

impl<C: Scalar> VectorJet<C> {
    pub fn new(components: Vec<Jet<C>>) -> Result<Self, JetError> {
        if let Some(first) = components.first() {
            for c in &components {
                if c.nvars() != first.nvars() || c.order() != first.order() {
                    return Err(JetError::DimensionMismatch(
                        "vector field components differ in shape".into(),
                    ));
                }
            }
        }
        Ok(VectorJet { components })
    }

    /// `φ(γx) = γ φ(x)` for every group element.
    pub fn is_equivariant(&self, action: &SignAction) -> bool {
        action.elements().iter().all(|g| {
            self.components.iter().enumerate().all(|(i, comp)| {
                let lhs = action.apply(g, comp);
                let rhs = if g[i] < 0 { -comp } else { comp.clone() };
                lhs == rhs
            })
        })
    }

    /// `Σ φ_i ∂f/∂x_i`.
    pub fn apply_to(&self, grad: &[Jet<C>]) -> Result<Jet<C>, JetError> {
        let Some(first) = grad.first() else {
            return Err(JetError::DimensionMismatch("empty gradient".into()));
        };
        let mut out = Jet::zero(first.nvars(), first.order());
        for (phi, g) in self.components.iter().zip(grad) {
            out = out.add_scaled(&phi.checked_mul(g)?, &C::one())?;
        }
        Ok(out)
    }
}

/// Action description as it appears in input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionSpec {
    Named(String),
    Explicit { n: usize, generators: Vec<Vec<i64>> },
}

impl ActionSpec {
    pub fn build(&self, n: usize) -> Result<SignAction, String> {
        match self {
            ActionSpec::Named(name) => match name.as_str() {
                "full" => Ok(SignAction::full(n)),
                "overall" => Ok(SignAction::overall(n)),
                "trivial" => Ok(SignAction::trivial(n)),
                other => Err(format!(
                    "unknown action '{other}' (expected full, overall or trivial)"
                )),
            },
            ActionSpec::Explicit { n: an, generators } => {
                if *an != n {
                    return Err(format!("action is on {an} variables, germ has {n}"));
                }
                SignAction::new(n, generators).map_err(|e| e.to_string())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn elements_examples() {
        let a = SignAction::new(1, &[vec![-1]]).unwrap();
        assert_eq!(a.elements(), vec![vec![1], vec![-1]]);
        assert_eq!(SignAction::trivial(2).elements(), vec![vec![1, 1]]);
        let full = SignAction::new(2, &[vec![-1, 1], vec![1, -1]]).unwrap();
        assert_eq!(
            full.elements(),
            vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]]
        );
        assert_eq!(full, SignAction::full(2));
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(SignAction::new(2, &[vec![1]]).is_err());
        assert!(SignAction::new(1, &[vec![2]]).is_err());
        assert!(matches!(
            SignAction::new(25, &[]),
            Err(GroupError::TooLarge(25))
        ));
    }

    #[test]
    fn invariant_bases() {
        let full = SignAction::full(2);
        assert_eq!(
            full.invariant_monomials(1, 4),
            vec![
                mi(&[2, 0]),
                mi(&[0, 2]),
                mi(&[4, 0]),
                mi(&[2, 2]),
                mi(&[0, 4])
            ]
        );
        let overall = SignAction::overall(2);
        assert_eq!(
            overall.invariant_monomials(2, 2),
            vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]
        );
        assert!(full.invariant_monomials(3, 3).is_empty());
    }

    #[test]
    fn equivariant_bases() {
        let f1 = SignAction::full(1);
        let b: Vec<_> = f1
            .equivariant_fields(1, 3)
            .into_iter()
            .map(|f| f.mono)
            .collect();
        assert_eq!(b, vec![mi(&[1]), mi(&[3])]);

        let f2 = SignAction::full(2);
        let b: Vec<_> = f2
            .equivariant_fields(1, 3)
            .into_iter()
            .map(|f| (f.mono, f.component))
            .collect();
        assert_eq!(
            b,
            vec![
                (mi(&[1, 0]), 0),
                (mi(&[3, 0]), 0),
                (mi(&[1, 2]), 0),
                (mi(&[0, 1]), 1),
                (mi(&[2, 1]), 1),
                (mi(&[0, 3]), 1),
            ]
        );

        let t = SignAction::trivial(2);
        assert_eq!(t.equivariant_fields(1, 1).len(), 4);
    }

    #[test]
    fn reynolds_examples() {
        let a = SignAction::full(1);
        let f: Jet<Q> = Jet::from_terms(
            1,
            4,
            vec![(mi(&[2]), Q::from_int(1)), (mi(&[3]), Q::from_int(1))],
        )
        .unwrap();
        let p = a.reynolds(&f).unwrap();
        assert_eq!(p, Jet::monomial(1, 4, mi(&[2]), Q::from_int(1)));
        assert_eq!(a.reynolds(&p).unwrap(), p);
        let xy: Jet<Q> = Jet::monomial(2, 4, mi(&[1, 1]), Q::from_int(1));
        assert!(SignAction::full(2).reynolds(&xy).unwrap().is_zero());
    }

    #[test]
    fn fixed_coordinates() {
        let a = SignAction::new(3, &[vec![-1, 1, 1]]).unwrap();
        assert_eq!(a.fixed_coords(), &[1, 2]);
        let b: Vec<_> = a
            .equivariant_fields(0, 0)
            .into_iter()
            .map(|f| f.component)
            .collect();
        assert_eq!(b, vec![1, 2]);
    }
}
