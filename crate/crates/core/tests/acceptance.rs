//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use catkit_core::classify::{classify_germ, ClassifyOpts, Family, Modulus};
use catkit_core::group::SignAction;
use catkit_core::local_algebra::{
    codimension, determinacy_certificate, determinacy_order, AlgebraOpts, Determinacy,
};
use catkit_core::meanfield::*;
use catkit_core::poly::{Jet, MultiIndex, Scalar};
use catkit_core::unfolding::{is_transversal, universal_unfolding, Unfolding};

type Q = BigRational;

fn poly<C: Scalar>(n: usize, order: u32, terms: &[(&[u32], C)]) -> Jet<C> {
    Jet::from_terms(
        n,
        order,
        terms
            .iter()
            .map(|(e, c)| (MultiIndex::new(e.to_vec()), c.clone())),
    )
    .unwrap()
}

fn qi(v: i64) -> Q {
    Q::from_int(v)
}

fn even_power(k: u32, order: u32) -> Jet<Q> {
    poly(1, order, &[(&[2 * k], qi(1))])
}

/// (x²+y²)(x²+αy²), x⁴+βx²y²+y⁴ and x⁴−y⁴ at the given order.
fn corank2_rows(order: u32) -> Vec<(&'static str, Jet<Q>)> {
    vec![
        (
            "(x^2+y^2)(x^2+3y^2)",
            poly(
                2,
                order,
                &[(&[4, 0], qi(1)), (&[2, 2], qi(4)), (&[0, 4], qi(3))],
            ),
        ),
        (
            "x^4+3x^2y^2+y^4",
            poly(
                2,
                order,
                &[(&[4, 0], qi(1)), (&[2, 2], qi(3)), (&[0, 4], qi(1))],
            ),
        ),
        (
            "x^4-y^4",
            poly(2, order, &[(&[4, 0], qi(1)), (&[0, 4], qi(-1))]),
        ),
    ]
}

fn names(n: usize) -> Vec<String> {
    ["x", "y"][..n].iter().map(|s| s.to_string()).collect()
}

fn exact_opts() -> AlgebraOpts {
    AlgebraOpts::default()
}

fn within(t: Instant, limit: Duration, what: &str) {
    let el = t.elapsed();
    assert!(el < limit, "{what} took {el:?}, limit {limit:?}");
}

fn c1_codimension_trivial() {
    let t = Instant::now();
    let triv1 = SignAction::trivial(1);
    for k in 1..=5u32 {
        let r = codimension(&even_power(k, 2 * k + 2), &triv1, &exact_opts()).unwrap();
        assert_eq!(r.finite(), Some((2 * k - 2) as usize), "x^{}", 2 * k);
    }
    let triv2 = SignAction::trivial(2);
    for b in [1, 3, -1] {
        let f = poly(
            2,
            6,
            &[(&[4, 0], qi(1)), (&[2, 2], qi(b)), (&[0, 4], qi(1))],
        );
        assert_eq!(
            codimension(&f, &triv2, &exact_opts()).unwrap().finite(),
            Some(8),
            "beta {b}"
        );
    }
    for (name, f) in corank2_rows(6)
        .into_iter()
        .filter(|(n, _)| !n.starts_with("x^4+3"))
    {
        assert_eq!(
            codimension(&f, &triv2, &exact_opts()).unwrap().finite(),
            Some(8),
            "{name}"
        );
    }
    within(t, Duration::from_secs(10), "criterion 1");
}

fn c2_codimension_z2() {
    let t = Instant::now();
    let full1 = SignAction::full(1);
    for k in 1..=5u32 {
        let r = codimension(&even_power(k, 2 * k + 2), &full1, &exact_opts()).unwrap();
        assert_eq!(r.finite(), Some((k - 1) as usize), "x^{}", 2 * k);
    }
    let full2 = SignAction::full(2);
    for (name, f) in corank2_rows(6) {
        assert_eq!(
            codimension(&f, &full2, &exact_opts()).unwrap().finite(),
            Some(3),
            "{name}"
        );
    }
    within(t, Duration::from_secs(10), "criterion 2");
}

fn c3_determinacy() {
    let t = Instant::now();
    let full1 = SignAction::full(1);
    for k in 1..=4u32 {
        let f = even_power(k, 2 * k + 2);
        assert_eq!(
            determinacy_order(&f, &full1, &exact_opts()).unwrap(),
            Determinacy::Order(2 * k),
            "x^{}",
            2 * k
        );
        assert!(determinacy_certificate(&f, &full1, 2 * k, &exact_opts()).unwrap());
        assert!(!determinacy_certificate(&f, &full1, 2 * k - 2, &exact_opts()).unwrap());
    }
    let full2 = SignAction::full(2);
    for (name, f) in corank2_rows(6) {
        assert_eq!(
            determinacy_order(&f, &full2, &exact_opts()).unwrap(),
            Determinacy::Order(4),
            "{name}"
        );
    }
    within(t, Duration::from_secs(30), "criterion 3");
}

fn c4_unfoldings() {
    let full1 = SignAction::full(1);
    for k in 1..=5u32 {
        let u = universal_unfolding(&even_power(k, 2 * k + 2), &full1, &exact_opts()).unwrap();
        let got: Vec<String> = u.alphas.iter().map(|a| a.render(&names(1))).collect();
        let want: Vec<String> = (1..k).map(|j| format!("x^{}", 2 * j)).collect();
        assert_eq!(got, want, "x^{}", 2 * k);
    }
    let full2 = SignAction::full(2);
    for (name, f) in corank2_rows(6) {
        let u = universal_unfolding(&f, &full2, &exact_opts()).unwrap();
        let got: Vec<String> = u.alphas.iter().map(|a| a.render(&names(2))).collect();
        assert_eq!(got, ["x^2", "y^2", "x^2*y^2"], "{name}");
    }
    let u = universal_unfolding(&corank2_rows(6)[2].1, &full2, &exact_opts()).unwrap();
    assert_eq!(
        u.render_linear(&names(2)),
        "f + u1*x^2 + u2*y^2 + u3*x^2*y^2"
    );
}

fn c5_transversality() {
    let full1 = SignAction::full(1);
    let x = names(1);
    let u = Unfolding::new(
        even_power(3, 8),
        vec![poly(1, 8, &[(&[2], qi(1))]), poly(1, 8, &[(&[4], qi(1))])],
    )
    .unwrap();
    let r = is_transversal(&u, &full1, &exact_opts()).unwrap();
    assert!(r.transversal && r.minimal, "{r:?}");
    for (drop, missing) in [(0, "x^2"), (1, "x^4")] {
        let r = is_transversal(&u.without(drop), &full1, &exact_opts()).unwrap();
        assert!(!r.transversal, "without {missing}");
        let got: Vec<String> = r.missing.iter().map(|m| m.render(&x)).collect();
        assert_eq!(got, [missing]);
    }
}

/// (x²+y²)(x²+αy²).
fn plus_member<C: Scalar>(alpha: C, order: u32) -> Jet<C> {
    poly(
        2,
        order,
        &[
            (&[4, 0], C::from_int(1)),
            (&[2, 2], C::from_int(1) + alpha.clone()),
            (&[0, 4], alpha),
        ],
    )
}

fn random_alpha(rng: &mut ChaCha8Rng) -> (i64, i64) {
    loop {
        let den = rng.gen_range(1..=40i64);
        let num = rng.gen_range(den + 1..5 * den);
        let a = num as f64 / den as f64;
        if (a - 1.0).abs() > 0.05 {
            return (num, den);
        }
    }
}

fn small_q(rng: &mut ChaCha8Rng) -> Q {
    Q::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

/// x ↦ x(a + p x² + q y²), y ↦ y(b + r x² + s y²), optionally swapped.
fn random_change(rng: &mut ChaCha8Rng, order: u32) -> Vec<Jet<Q>> {
    let mut unit = || loop {
        let v = Q::from_ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3));
        if v != qi(0) {
            return v;
        }
    };
    let (a, b) = (unit(), unit());
    let x = poly(
        2,
        order,
        &[
            (&[1, 0], a),
            (&[3, 0], small_q(rng)),
            (&[1, 2], small_q(rng)),
        ],
    );
    let y = poly(
        2,
        order,
        &[
            (&[0, 1], b),
            (&[2, 1], small_q(rng)),
            (&[0, 3], small_q(rng)),
        ],
    );
    if rng.gen_bool(0.5) {
        vec![y, x]
    } else {
        vec![x, y]
    }
}

fn c6_moduli() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let full2 = SignAction::full(2);
    let opts = ClassifyOpts::default();
    for _ in 0..100 {
        let a: f64 = loop {
            let a = rng.gen_range(1.0..5.0);
            if (a - 1.0f64).abs() > 0.05 {
                break a;
            }
        };
        let r = classify_germ(&plus_member(a, 6), &full2, &opts).unwrap();
        let Family::PlusFamily { alpha, sign: 1 } = &r.family else {
            panic!("alpha {a}: {:?}", r.family)
        };
        assert!(
            (alpha.value() - a).abs() < 1e-10,
            "alpha {a}: got {}",
            alpha.value()
        );
    }
    for _ in 0..100 {
        let (num, den) = random_alpha(&mut rng);
        let a = Q::from_ratio(num, den);
        let f = plus_member(a.clone(), 6);
        let r = classify_germ(&f, &full2, &opts).unwrap();
        assert_eq!(
            r.family,
            Family::PlusFamily {
                alpha: Modulus::Exact(a.clone()),
                sign: 1
            },
            "alpha {num}/{den}"
        );
        let phi = random_change(&mut rng, 6);
        let g = f.compose(&phi).unwrap();
        let rg = classify_germ(&g, &full2, &opts).unwrap();
        assert_eq!(rg.family, r.family, "alpha {num}/{den} under {phi:?}");
        assert_eq!(rg.cod_z2, Some(3));
    }
}

fn c7_meanfield_numerics() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let random_params = |rng: &mut ChaCha8Rng| {
        MeanFieldParams::new(
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..6.0),
            rng.gen_range(0.0..8.0),
            rng.gen_range(0.2..3.0),
        )
    };
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let c = [rng.gen_range(-1.5..1.5), rng.gen_range(-0.5..2.5)];
        let g = objective_gradient(c, &p);
        // Richardson-extrapolated central differences
        let fd = |i: usize| {
            let d = |h: f64| {
                let (mut a, mut b) = (c, c);
                a[i] += h;
                b[i] -= h;
                (objective(a, &p) - objective(b, &p)) / (2.0 * h)
            };
            let h = 1e-3;
            (4.0 * d(h / 2.0) - d(h)) / 3.0
        };
        let err = ((g[0] - fd(0)).powi(2) + (g[1] - fd(1)).powi(2)).sqrt();
        let scale = (g[0].powi(2) + g[1].powi(2)).sqrt();
        assert!(err <= 1e-6 * scale, "{p:?} at {c:?}: {g:?} err {err}");
    }
    let n = 401;
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let spec = ModelSpec::Pairing(p);
        let bx = spec.default_box();
        let step: Vec<f64> = bx
            .iter()
            .map(|(lo, hi)| (hi - lo) / (n - 1) as f64)
            .collect();
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for i in 0..n {
            for j in 0..n {
                let c = [bx[0].0 + step[0] * i as f64, bx[1].0 + step[1] * j as f64];
                let v = objective(c, &p);
                if v < best.0 {
                    best = (v, c);
                }
            }
        }
        let m = global_minimizer(&p, &bx, &SolveOpts::default()).unwrap();
        assert!(
            m.objective <= best.0 + 1e-12,
            "{p:?}: solver {m:?} above grid {best:?}"
        );
        assert!(
            (m.c[0].abs() - best.1[0].abs()).abs() <= step[0]
                && (m.c[1] - best.1[1]).abs() <= step[1],
            "{p:?}: solver {:?}, grid {:?}",
            m.c,
            best.1
        );
    }
    within(t, Duration::from_secs(60), "criterion 7");
}

fn c8_theofin1() {
    let t = Instant::now();
    let tuned = tune_theofin1().unwrap();
    assert!(
        tuned.hess_eigs.iter().all(|e| e.abs() < 1e-8),
        "{:?}",
        tuned.hess_eigs
    );
    let opts = ClassifyOpts::default();
    let r = classify_critical_point(&tuned.params, &tuned.point, &opts).unwrap();
    let c = &r.classification;
    assert_eq!(c.corank, 2);
    let beta = c
        .presentations
        .iter()
        .find(|p| p.family == "quartic_beta")
        .map(|p| p.modulus)
        .unwrap_or_else(|| panic!("{:?}", c.family));
    assert!(beta > 2.0, "normalized modulus {beta}");
    let spec = ModelSpec::Pairing(tuned.params);
    let tr =
        coupling_transversality(&spec, &tuned.point, &default_couplings(&spec), &opts).unwrap();
    assert!(tr.transversal, "{tr:?}");
    within(t, Duration::from_secs(120), "criterion 8");
}

/// Global minimizer `|c|` and the distinct `|c|` of all grid-local minima.
fn brute_oracle_1d(s: &StrongCoupling, n: usize) -> (f64, Vec<f64>) {
    let (lo, hi) = (-1.5, 1.5);
    let cs: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let vs: Vec<f64> = cs.iter().map(|&c| s.value(c)).collect();
    let mut best = 0;
    for i in 0..n {
        if vs[i] < vs[best] - 1e-13 || (vs[i] <= vs[best] + 1e-13 && cs[i].abs() < cs[best].abs()) {
            best = i;
        }
    }
    let mut minima: Vec<f64> = vec![];
    for i in 1..n - 1 {
        if vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1] {
            let a = cs[i].abs();
            if minima
                .iter()
                .all(|m| (m - a).abs() > 5.0 * (hi - lo) / (n - 1) as f64)
            {
                minima.push(a);
            }
        }
    }
    (cs[best].abs(), minima)
}

fn c9_strong_coupling() {
    let t = Instant::now();
    let tri = tune_strong_coupling().unwrap();
    let r = classify_critical_point(&tri.model, &[0.0], &ClassifyOpts::default()).unwrap();
    assert_eq!(r.classification.family, Family::EvenPower { k: 3, sign: 1 });
    assert_eq!(
        r.classification.unfolding_string(&names(1)).unwrap(),
        "f + u1*x^2 + u2*x^4"
    );

    let spec = ModelSpec::StrongCoupling(tri.model);
    let axes = parse_sweep("u2=0.1:2.1:0.1,u1=2:12:0.25").unwrap();
    let opts = PhaseOpts::default();
    let pd = phase_diagram(&spec, axes, &opts).unwrap();
    let s = pd.summary();
    assert_eq!(s.failed, 0);
    assert!(s.first_order_edges > 0 && s.second_order_edges > 0, "{s:?}");

    let oracle_step = 3.0 / 3000.0;
    let threshold = opts.jump_cells * grid_resolution(1, &spec.default_box(), &opts.solve)[0];
    let oracle: Vec<(f64, Vec<f64>)> = pd
        .cells
        .iter()
        .map(|c| brute_oracle_1d(&StrongCoupling { u1: c.p2, u2: c.p1 }, 3001))
        .collect();
    for (c, (b, _)) in pd.cells.iter().zip(&oracle) {
        assert!(
            (c.c[0].abs() - b).abs() <= 2.0 * oracle_step,
            "{c:?} vs oracle {b}"
        );
    }
    // oracle edges: a jump with coexisting minima is first order, any other
    // label change second order
    let (n1, n2) = (s.shape[0], s.shape[1]);
    let mut first = vec![false; pd.cells.len()];
    let mut second = vec![false; pd.cells.len()];
    let (mut n_first, mut n_second) = (0, 0);
    for i in 0..n1 {
        for j in 0..n2 {
            let k = i * n2 + j;
            let next = [
                (i + 1 < n1).then_some(k + n2),
                (j + 1 < n2).then_some(k + 1),
            ];
            for l in next.into_iter().flatten() {
                let (a, b) = (&oracle[k], &oracle[l]);
                let coexist = a.1.len() > 1 || b.1.len() > 1;
                if (a.0 - b.0).abs() > threshold && coexist {
                    first[k] = true;
                    first[l] = true;
                    n_first += 1;
                } else if (a.0 > opts.label_tol) != (b.0 > opts.label_tol) {
                    second[k] = true;
                    second[l] = true;
                    n_second += 1;
                }
            }
        }
    }
    assert!(
        n_first > 0 && n_second > 0,
        "oracle first {n_first}, second {n_second}"
    );
    let mut mismatched = vec![];
    for (k, c) in pd.cells.iter().enumerate() {
        if c.first_order_edge != first[k] || c.second_order_edge != second[k] {
            mismatched.push((
                c.p1,
                c.p2,
                c.first_order_edge,
                first[k],
                c.second_order_edge,
                second[k],
            ));
        }
    }
    assert!(
        mismatched.is_empty(),
        "cells disagreeing with the oracle: {mismatched:?}"
    );
    within(t, Duration::from_secs(120), "criterion 9");
}

fn c10_stability() {
    let t = Instant::now();
    let tuned = tune_theofin1().unwrap();
    let opts = ClassifyOpts::default();
    let base = classify_critical_point(&tuned.params, &tuned.point, &opts).unwrap();
    let pert = Perturbed {
        inner: &tuned.params,
        eps: 1e-3,
    };
    let r = classify_critical_point(&pert, &tuned.point, &opts).unwrap();
    let (fa, fb) = (&base.classification.family, &r.classification.family);
    assert_eq!(fa.name(), fb.name());
    assert_eq!(fa.sign(), fb.sign());
    let (a, b) = (fa.modulus().unwrap().value(), fb.modulus().unwrap().value());
    assert!((a - b).abs() <= 1e-3, "{a} vs {b}");
    within(t, Duration::from_secs(60), "criterion 10");
}

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 10] = [
        ("trivial-action codimensions", c1_codimension_trivial),
        ("Z2 codimensions", c2_codimension_z2),
        ("determinacy orders", c3_determinacy),
        ("universal unfolding monomials", c4_unfoldings),
        ("transversality of the even butterfly", c5_transversality),
        ("moduli recovery and invariance", c6_moduli),
        ("mean-field gradients and minimizers", c7_meanfield_numerics),
        ("tuned pairing point", c8_theofin1),
        (
            "strong-coupling tricritical point and diagram",
            c9_strong_coupling,
        ),
        ("stability under perturbation", c10_stability),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {:2}: {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        match panic::catch_unwind(AssertUnwindSafe(run)) {
            Ok(()) => println!("PASS {label} ({:.2?})", t.elapsed()),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL {label} ({:.2?}): {msg}", t.elapsed());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
