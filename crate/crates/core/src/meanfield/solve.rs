//! Critical points and global minimizers of objectives on a box.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::model::Objective;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOpts {
    /// Multistart seeds per axis.
    pub seeds_per_axis: usize,
    /// Coarse grid points per axis for global minimization (two variables).
    pub grid_2d: usize,
    /// Coarse grid points for one-variable objectives.
    pub grid_1d: usize,
    pub grad_tol: f64,
    pub max_iter: usize,
    pub dedupe: f64,
    /// Degenerate when the smallest |Hessian eigenvalue| is below this.
    pub degeneracy: f64,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts {
            seeds_per_axis: 21,
            grid_2d: 61,
            grid_1d: 301,
            grad_tol: 1e-10,
            max_iter: 200,
            dedupe: 1e-6,
            degeneracy: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub c: Vec<f64>,
    pub objective: f64,
    pub grad_norm: f64,
    pub hess_eigs: Vec<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimizer {
    pub c: Vec<f64>,
    pub objective: f64,
    pub grad_norm: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn inside(c: &[f64], bx: &[(f64, f64)], slack: f64) -> bool {
    c.iter().zip(bx).all(|(x, (lo, hi))| {
        let pad = slack * (hi - lo);
        *x >= lo - pad && *x <= hi + pad
    })
}

fn matrix(h: &[Vec<f64>]) -> DMatrix<f64> {
    let d = h.len();
    DMatrix::from_fn(d, d, |i, j| h[i][j])
}

/// Eigenvalues of the Hessian, ascending.
pub fn hessian_eigenvalues(f: &dyn Objective, c: &[f64]) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(matrix(&f.hessian(c)))
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    e.sort_by(|a, b| a.total_cmp(b));
    e
}

/// Damped Newton on the gradient from `seed`.
pub fn newton_critical(
    f: &dyn Objective,
    seed: &[f64],
    bx: &[(f64, f64)],
    opts: &SolveOpts,
) -> Option<Vec<f64>> {
    let mut x = seed.to_vec();
    let mut g = f.gradient(&x);
    let mut gn = norm(&g);
    for _ in 0..opts.max_iter {
        if gn <= opts.grad_tol {
            break;
        }
        let h = matrix(&f.hessian(&x));
        let rhs = -DVector::from_column_slice(&g);
        let d: Vec<f64> = match h.lu().solve(&rhs) {
            Some(d) if d.iter().all(|v| v.is_finite()) => d.iter().cloned().collect(),
            _ => rhs.iter().cloned().collect(),
        };
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-6 {
            let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            let gy = f.gradient(&y);
            let gyn = norm(&gy);
            if gyn.is_finite() && gyn < (1.0 - 1e-4 * t) * gn {
                x = y;
                g = gy;
                gn = gyn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || !inside(&x, bx, 0.1) {
            break;
        }
    }
    (gn <= opts.grad_tol.max(1e-8) && inside(&x, bx, 0.0)).then_some(x)
}

fn grid_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn grid(bx: &[(f64, f64)], n: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![]];
    for &(lo, hi) in bx {
        let axis = grid_axis(lo, hi, n);
        pts = pts
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    pts
}

pub fn annotate(f: &dyn Objective, c: Vec<f64>, opts: &SolveOpts) -> CriticalPoint {
    let hess_eigs = hessian_eigenvalues(f, &c);
    let degenerate = hess_eigs
        .iter()
        .map(|e| e.abs())
        .fold(f64::INFINITY, f64::min)
        < opts.degeneracy;
    CriticalPoint {
        objective: f.value(&c),
        grad_norm: norm(&f.gradient(&c)),
        hess_eigs,
        degenerate,
        c,
    }
}

/// Multistart Newton from a seed grid, deduplicated.
/// Distance to the nearby root suggested by one Newton step; near a root of
/// multiplicity `m` Newton moves by `1/m` of the distance, so the step is
/// inflated by a margin covering multiplicities up to ten.
fn root_radius(f: &dyn Objective, x: &[f64]) -> f64 {
    let g = DVector::from_column_slice(&f.gradient(x));
    let eig = SymmetricEigen::new(matrix(&f.hessian(x)));
    let scale = eig
        .eigenvalues
        .iter()
        .map(|e| e.abs())
        .fold(1e-300, f64::max);
    let mut step = 0.0f64;
    for (k, lam) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        step = step.max((v.dot(&g) / lam.abs().max(1e-14 * scale)).abs());
    }
    10.0 * step
}

pub fn find_critical_points(
    f: &dyn Objective,
    bx: &[(f64, f64)],
    opts: &SolveOpts,
) -> Vec<CriticalPoint> {
    // (point, gradient norm, distance-to-root estimate)
    let mut found: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    for seed in grid(bx, opts.seeds_per_axis) {
        let Some(x) = newton_critical(f, &seed, bx, opts) else {
            continue;
        };
        let gn = norm(&f.gradient(&x));
        let r = root_radius(f, &x);
        let dist = |y: &[f64]| {
            x.iter()
                .zip(y)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        match found
            .iter_mut()
            .find(|(y, _, ry)| dist(y) < opts.dedupe.max(2.0 * (r + *ry)))
        {
            Some(slot) => {
                if gn < slot.1 {
                    *slot = (x, gn, r);
                }
            }
            None => found.push((x, gn, r)),
        }
    }
    let mut found: Vec<Vec<f64>> = found.into_iter().map(|(x, ..)| x).collect();
    if found.is_empty() {
        log::warn!("no Newton seed converged inside the search box");
    }
    found.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    found.into_iter().map(|c| annotate(f, c, opts)).collect()
}

/// Modified Newton descent with Armijo backtracking.
pub fn local_minimize(
    f: &dyn Objective,
    seed: &[f64],
    bx: &[(f64, f64)],
    opts: &SolveOpts,
) -> Option<Minimizer> {
    let mut x = seed.to_vec();
    let mut fx = f.value(&x);
    let mut g = f.gradient(&x);
    for _ in 0..opts.max_iter {
        let gn = norm(&g);
        if gn <= opts.grad_tol {
            break;
        }
        let eig = SymmetricEigen::new(matrix(&f.hessian(&x)));
        let scale = eig
            .eigenvalues
            .iter()
            .map(|e| e.abs())
            .fold(1e-12, f64::max);
        let gv = DVector::from_column_slice(&g);
        let mut d = DVector::zeros(g.len());
        for (k, lam) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(k);
            let l = lam.abs().max(1e-8 * scale);
            d -= v * (v.dot(&gv) / l);
        }
        let slope = d.dot(&gv);
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-10 {
            let y: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| a + t * b).collect();
            let fy = f.value(&y);
            let gy = f.gradient(&y);
            let armijo = fy <= fx + 1e-4 * t * slope;
            // once f stalls in rounding, accept steps that shrink the gradient
            let flat = (fy - fx).abs() <= 1e-14 * fx.abs().max(1.0) && norm(&gy) < gn;
            if fy.is_finite() && (armijo || flat) {
                x = y;
                fx = fy;
                g = gy;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if !x.iter().all(|v| v.is_finite()) || !inside(&x, bx, 0.0) {
        return None;
    }
    Some(Minimizer {
        grad_norm: norm(&g),
        objective: fx,
        c: x,
    })
}

/// Coarse grid followed by descent from the best grid-local minima.
///
/// The first coordinate is reported with a nonnegative sign.
pub fn global_minimizer(
    f: &dyn Objective,
    bx: &[(f64, f64)],
    opts: &SolveOpts,
) -> Option<Minimizer> {
    let n = if f.dim() == 1 {
        opts.grid_1d
    } else {
        opts.grid_2d
    };
    let pts = grid(bx, n);
    let vals: Vec<f64> = pts.iter().map(|p| f.value(p)).collect();
    let idx = |ix: &[usize]| ix.iter().fold(0, |acc, &i| acc * n + i);
    let mut candidates: Vec<usize> = Vec::new();
    for (k, v) in vals.iter().enumerate() {
        let mut ix = vec![0; bx.len()];
        let mut r = k;
        for d in (0..bx.len()).rev() {
            ix[d] = r % n;
            r /= n;
        }
        let mut local = v.is_finite();
        for d in 0..bx.len() {
            for s in [-1i64, 1] {
                let j = ix[d] as i64 + s;
                if j < 0 || j >= n as i64 {
                    continue;
                }
                let mut jx = ix.clone();
                jx[d] = j as usize;
                if vals[idx(&jx)] < *v {
                    local = false;
                }
            }
        }
        if local {
            candidates.push(k);
        }
    }
    // ties (flat directions) prefer the smallest |c1|
    candidates.sort_by(|a, b| {
        vals[*a]
            .total_cmp(&vals[*b])
            .then(pts[*a][0].abs().total_cmp(&pts[*b][0].abs()))
    });
    candidates.truncate(6);
    let mut best: Option<Minimizer> = None;
    for k in candidates {
        let seed = &pts[k];
        let m = local_minimize(f, seed, bx, opts).unwrap_or(Minimizer {
            c: seed.clone(),
            objective: vals[k],
            grad_norm: norm(&f.gradient(seed)),
        });
        let better = best.as_ref().is_none_or(|b| {
            let tie = 1e-12 * b.objective.abs().max(1.0);
            m.objective < b.objective - tie
                || (m.objective <= b.objective + tie && m.c[0].abs() < b.c[0].abs())
        });
        if better {
            best = Some(m);
        }
    }
    best.map(|mut m| {
        m.c[0] = m.c[0].abs();
        m
    })
}

/// Resolution of the coarse minimization grid along each axis.
pub fn grid_resolution(dim: usize, bx: &[(f64, f64)], opts: &SolveOpts) -> Vec<f64> {
    let n = if dim == 1 { opts.grid_1d } else { opts.grid_2d };
    bx.iter()
        .map(|(lo, hi)| (hi - lo) / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::model::{MeanFieldParams, StrongCoupling};

    #[test]
    fn c1_axis_critical_point_exists() {
        let p = MeanFieldParams::new(1.0, 0.1, 1.0, 2.0, 3.0, 1.0);
        let bx = [(-1.5, 1.5), (-0.5, 2.5)];
        let pts = find_critical_points(&p, &bx, &SolveOpts::default());
        assert!(pts.iter().any(|c| c.c[0].abs() < 1e-9));
        assert!(pts.iter().all(|c| c.grad_norm < 1e-8));
    }

    #[test]
    fn small_u1_minimizer_is_origin() {
        let s = StrongCoupling { u1: 0.5, u2: 0.7 };
        let m = global_minimizer(&s, &[(-1.5, 1.5)], &SolveOpts::default()).unwrap();
        assert!(m.c[0].abs() < 1e-8);
    }

    #[test]
    fn large_u1_minimizer_is_paired() {
        let s = StrongCoupling { u1: 20.0, u2: 0.7 };
        let m = global_minimizer(&s, &[(-1.5, 1.5)], &SolveOpts::default()).unwrap();
        assert!(m.c[0] > 0.4 && m.c[0] < 0.5, "{m:?}");
    }
}
