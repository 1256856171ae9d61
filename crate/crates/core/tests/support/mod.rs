#![allow(dead_code)]

use num_rational::BigRational;
use proptest::prelude::*;

use catkit_core::group::SignAction;
use catkit_core::poly::{Jet, MultiIndex, Scalar};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::from_ratio(num, den)
}

pub fn poly<C: Scalar>(n: usize, order: u32, terms: &[(&[u32], C)]) -> Jet<C> {
    Jet::from_terms(
        n,
        order,
        terms
            .iter()
            .map(|(e, c)| (MultiIndex::new(e.to_vec()), c.clone())),
    )
    .unwrap()
}

pub fn coeff() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=4).prop_map(|(a, b)| q(a, b))
}

fn exps(n: usize, lo: u32, hi: u32) -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0u32..=hi, n).prop_filter("degree range", move |e| {
        let d: u32 = e.iter().sum();
        d >= lo && d <= hi
    })
}

/// Random exact jet with terms of degree in `[lo, order]`.
pub fn jet(n: usize, order: u32, lo: u32, max_terms: usize) -> impl Strategy<Value = Jet<Q>> {
    proptest::collection::vec((exps(n, lo, order), coeff()), 0..=max_terms).prop_map(move |ts| {
        Jet::from_terms(
            n,
            order,
            ts.into_iter().map(|(e, c)| (MultiIndex::new(e), c)),
        )
        .unwrap()
    })
}

/// Random origin-preserving map.
pub fn map(n: usize, order: u32) -> impl Strategy<Value = Vec<Jet<Q>>> {
    proptest::collection::vec(jet(n, order, 1, 4), n)
}

fn nonzero() -> impl Strategy<Value = Q> {
    coeff().prop_filter("nonzero", |c| *c != q(0, 1))
}

/// Equivariant change for the full sign action on two variables:
/// `x ↦ x(a + p x² + q y²)`, `y ↦ y(b + r x² + s y²)`, optionally swapped.
pub fn full_change(order: u32) -> impl Strategy<Value = Vec<Jet<Q>>> {
    (
        nonzero(),
        nonzero(),
        proptest::collection::vec(coeff(), 4),
        any::<bool>(),
    )
        .prop_map(move |(a, b, h, swap)| {
            let x = poly(
                2,
                order,
                &[
                    (&[1, 0], a),
                    (&[3, 0], h[0].clone()),
                    (&[1, 2], h[1].clone()),
                ],
            );
            let y = poly(
                2,
                order,
                &[
                    (&[0, 1], b),
                    (&[2, 1], h[2].clone()),
                    (&[0, 3], h[3].clone()),
                ],
            );
            if swap {
                vec![y, x]
            } else {
                vec![x, y]
            }
        })
}

/// Signed permutation with scalings, linear.
pub fn linear_change(order: u32) -> impl Strategy<Value = Vec<Jet<Q>>> {
    full_change(order).prop_map(|m| m.iter().map(|c| c.filter(|e, _| e.degree() == 1)).collect())
}

pub fn full2() -> SignAction {
    SignAction::full(2)
}

/// Table germs in two variables with random rational moduli and random
/// invariant terms of degree six.
pub fn corank2_germ() -> impl Strategy<Value = Jet<Q>> {
    let quartic = prop_oneof![
        // (x²+y²)(x²+αy²), α > 1
        (2i64..=40, 1i64..=8)
            .prop_filter("alpha > 1", |(n, d)| n > d)
            .prop_map(|(n, d)| {
                let a = q(n, d);
                (q(1, 1), q(1, 1) + a.clone(), a)
            }),
        // x⁴ + βx²y² + y⁴, |β| < 2
        (-15i64..=15).prop_map(|b| (q(1, 1), q(b, 8), q(1, 1))),
        // (x²−y²)(x²+αy²), α > 0
        (1i64..=30, 1i64..=6).prop_map(|(n, d)| {
            let a = q(n, d);
            (q(1, 1), a.clone() - q(1, 1), -a)
        }),
        Just((q(1, 1), q(0, 1), q(-1, 1))),
    ];
    (
        quartic,
        any::<bool>(),
        proptest::collection::vec(coeff(), 4),
    )
        .prop_map(|((a, b, c), neg, h)| {
            let s = if neg { q(-1, 1) } else { q(1, 1) };
            poly(
                2,
                6,
                &[
                    (&[4, 0], a * &s),
                    (&[2, 2], b * &s),
                    (&[0, 4], c * &s),
                    (&[6, 0], h[0].clone()),
                    (&[4, 2], h[1].clone()),
                    (&[2, 4], h[2].clone()),
                    (&[0, 6], h[3].clone()),
                ],
            )
        })
}

/// `±x^{2k}`, `k >= 2`, plus a random higher even term, in one variable.
pub fn even_power_germ() -> impl Strategy<Value = (u32, Jet<Q>)> {
    (2u32..=4, any::<bool>(), coeff()).prop_map(|(k, neg, h)| {
        let s = if neg { q(-1, 1) } else { q(1, 1) };
        (k, poly(1, 2 * k + 4, &[(&[2 * k], s), (&[2 * k + 2], h)]))
    })
}
