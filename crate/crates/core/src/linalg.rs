//! Row reduction used for every rank question in the crate.
//!
//! Rows are sparse and bucketed by their leading position in the requested
//! column order, so an elimination step only touches rows that share a
//! leading column.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::poly::Scalar;

type IntRow = Vec<(usize, BigInt)>;
type FloatRow = Vec<(usize, f64)>;

fn positions(col_order: &[usize]) -> Vec<usize> {
    let ncols = col_order.iter().copied().max().map_or(0, |m| m + 1);
    let mut pos = vec![usize::MAX; ncols];
    for (p, &c) in col_order.iter().enumerate() {
        pos[c] = p;
    }
    pos
}

fn integer_row(row: &[(usize, BigRational)], pos: &[usize]) -> IntRow {
    let lcm = row
        .iter()
        .fold(BigInt::from(1), |acc, (_, v)| acc.lcm(v.denom()));
    let mut out: IntRow = row
        .iter()
        .filter(|(c, v)| !v.is_zero() && *c < pos.len() && pos[*c] != usize::MAX)
        .map(|(c, v)| (pos[*c], v.numer() * (&lcm / v.denom())))
        .collect();
    out.sort_by_key(|(p, _)| *p);
    merge_duplicates_int(&mut out);
    remove_content(&mut out);
    out
}

fn merge_duplicates_int(row: &mut IntRow) {
    let mut merged: IntRow = Vec::with_capacity(row.len());
    for (p, v) in row.drain(..) {
        match merged.last_mut() {
            Some((lp, lv)) if *lp == p => *lv += v,
            _ => merged.push((p, v)),
        }
    }
    merged.retain(|(_, v)| !v.is_zero());
    *row = merged;
}

fn remove_content(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g == BigInt::from(1) {
            return;
        }
    }
    if g > BigInt::from(1) {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
}

/// `a * row - b * pivot` where `a`, `b` are the leading entries; the result
/// has a zero at the shared leading position and is divided by its content.
fn eliminate_int(row: &IntRow, pivot: &IntRow) -> IntRow {
    let a = &pivot[0].1;
    let b = &row[0].1;
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let pi = row.get(i).map_or(usize::MAX, |e| e.0);
        let pj = pivot.get(j).map_or(usize::MAX, |e| e.0);
        let (p, v) = if pi < pj {
            i += 1;
            (pi, a * &row[i - 1].1)
        } else if pj < pi {
            j += 1;
            (pj, -(b * &pivot[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (pi, a * &row[i - 1].1 - b * &pivot[j - 1].1)
        };
        if !v.is_zero() {
            out.push((p, v));
        }
    }
    remove_content(&mut out);
    out
}

/// Exact pivot columns by fraction-free elimination over the integers.
pub fn pivot_columns_exact(rows: &[Vec<(usize, BigRational)>], col_order: &[usize]) -> Vec<usize> {
    let pos = positions(col_order);
    let mut buckets: Vec<Vec<IntRow>> = vec![Vec::new(); col_order.len()];
    for row in rows {
        let r = integer_row(row, &pos);
        if let Some(&(lead, _)) = r.first() {
            buckets[lead].push(r);
        }
    }
    let mut pivots = Vec::new();
    for p in 0..col_order.len() {
        let mut bucket = std::mem::take(&mut buckets[p]);
        if bucket.is_empty() {
            continue;
        }
        // the smallest leading entry keeps coefficient growth down
        let k = (0..bucket.len())
            .min_by_key(|&k| (bucket[k][0].1.bits(), bucket[k].len()))
            .expect("nonempty bucket");
        let pivot = bucket.swap_remove(k);
        pivots.push(col_order[p]);
        for r in bucket {
            let reduced = eliminate_int(&r, &pivot);
            if let Some(&(lead, _)) = reduced.first() {
                buckets[lead].push(reduced);
            }
        }
    }
    pivots
}

fn float_row(row: &[(usize, f64)], pos: &[usize], tol: f64) -> FloatRow {
    let mut out: FloatRow = row
        .iter()
        .filter(|(c, _)| *c < pos.len() && pos[*c] != usize::MAX)
        .map(|(c, v)| (pos[*c], *v))
        .collect();
    out.sort_by_key(|(p, _)| *p);
    let mut merged: FloatRow = Vec::with_capacity(out.len());
    for (p, v) in out {
        match merged.last_mut() {
            Some((lp, lv)) if *lp == p => *lv += v,
            _ => merged.push((p, v)),
        }
    }
    let scale = merged.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Vec::new();
    }
    merged
        .into_iter()
        .map(|(p, v)| (p, v / scale))
        .filter(|(_, v)| v.abs() > tol)
        .collect()
}

fn eliminate_float(row: &FloatRow, pivot: &FloatRow, tol: f64) -> FloatRow {
    let m = row[0].1 / pivot[0].1;
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let pi = row.get(i).map_or(usize::MAX, |e| e.0);
        let pj = pivot.get(j).map_or(usize::MAX, |e| e.0);
        let (p, v) = if pi < pj {
            i += 1;
            (pi, row[i - 1].1)
        } else if pj < pi {
            j += 1;
            (pj, -m * pivot[j - 1].1)
        } else {
            i += 1;
            j += 1;
            (pi, row[i - 1].1 - m * pivot[j - 1].1)
        };
        if v.abs() > tol {
            out.push((p, v));
        }
    }
    out
}

/// Floating-point pivot columns.
///
/// Rows are scaled to unit max-norm, then eliminated in the fixed column
/// order with partial pivoting among rows sharing a leading column. Entries
/// at or below `tol` (absolute, on the scaled rows) count as zero.
pub fn pivot_columns_float(
    rows: &[Vec<(usize, f64)>],
    col_order: &[usize],
    tol: f64,
) -> Vec<usize> {
    let pos = positions(col_order);
    let mut buckets: Vec<Vec<FloatRow>> = vec![Vec::new(); col_order.len()];
    for row in rows {
        let r = float_row(row, &pos, tol);
        if let Some(&(lead, _)) = r.first() {
            buckets[lead].push(r);
        }
    }
    let mut pivots = Vec::new();
    for p in 0..col_order.len() {
        let mut bucket = std::mem::take(&mut buckets[p]);
        if bucket.is_empty() {
            continue;
        }
        let k = (0..bucket.len())
            .max_by(|&a, &b| bucket[a][0].1.abs().total_cmp(&bucket[b][0].1.abs()))
            .expect("nonempty bucket");
        let pivot = bucket.swap_remove(k);
        pivots.push(col_order[p]);
        for r in bucket {
            let reduced = eliminate_float(&r, &pivot, tol);
            if let Some(&(lead, _)) = reduced.first() {
                buckets[lead].push(reduced);
            }
        }
    }
    pivots
}

/// Rank of a sparse row set with `ncols` columns.
pub fn rank<C: Scalar>(rows: &[Vec<(usize, C)>], ncols: usize, tol: f64) -> usize {
    let order: Vec<usize> = (0..ncols).collect();
    C::pivot_columns(rows, &order, tol).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn sparse(dense: &[Vec<i64>]) -> Vec<Vec<(usize, BigRational)>> {
        dense
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(c, v)| (c, q(*v)))
                    .collect()
            })
            .collect()
    }

    // dense rational elimination, independent of the bucketed code
    fn dense_rank(mut m: Vec<Vec<BigRational>>) -> usize {
        let ncols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            for i in 0..m.len() {
                if i != rank && !m[i][c].is_zero() {
                    let f = &m[i][c] / &m[rank][c];
                    for j in 0..ncols {
                        let d = &f * &m[rank][j];
                        m[i][j] -= d;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn profile_oracle(dense: &[Vec<i64>], order: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut prev = 0;
        for k in 0..order.len() {
            let sub: Vec<Vec<BigRational>> = dense
                .iter()
                .map(|r| order[..=k].iter().map(|&c| q(r[c])).collect())
                .collect();
            let r = dense_rank(sub);
            if r > prev {
                out.push(order[k]);
                prev = r;
            }
        }
        out
    }

    #[test]
    fn small_profile() {
        let m = vec![vec![1, 2, 0], vec![2, 4, 0], vec![0, 0, 5]];
        assert_eq!(pivot_columns_exact(&sparse(&m), &[0, 1, 2]), vec![0, 2]);
        assert_eq!(pivot_columns_exact(&sparse(&m), &[1, 0, 2]), vec![1, 2]);
        assert_eq!(pivot_columns_exact(&sparse(&m), &[2, 1, 0]), vec![2, 1]);
    }

    #[test]
    fn float_matches_exact_on_rank_deficient() {
        let m = vec![vec![1, 1, 0, 2], vec![0, 1, 1, 1], vec![1, 2, 1, 3]];
        let f: Vec<Vec<(usize, f64)>> = m
            .iter()
            .map(|r| r.iter().enumerate().map(|(c, v)| (c, *v as f64)).collect())
            .collect();
        assert_eq!(pivot_columns_float(&f, &[0, 1, 2, 3], 1e-8), vec![0, 1]);
        assert_eq!(pivot_columns_exact(&sparse(&m), &[0, 1, 2, 3]), vec![0, 1]);
    }

    proptest! {
        #[test]
        fn exact_profile_matches_dense_oracle(
            m in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 5), 0..6),
            shuffle in Just(()).prop_perturb(|_, mut rng| {
                let mut o: Vec<usize> = (0..5).collect();
                for i in (1..5).rev() {
                    let j = (rng.next_u32() as usize) % (i + 1);
                    o.swap(i, j);
                }
                o
            })
        ) {
            prop_assert_eq!(pivot_columns_exact(&sparse(&m), &shuffle), profile_oracle(&m, &shuffle));
        }

        #[test]
        fn float_profile_matches_exact_on_small_integers(
            m in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 5), 0..6)
        ) {
            let order: Vec<usize> = (0..5).collect();
            let f: Vec<Vec<(usize, f64)>> = m
                .iter()
                .map(|r| r.iter().enumerate().map(|(c, v)| (c, *v as f64)).collect())
                .collect();
            prop_assert_eq!(pivot_columns_float(&f, &order, 1e-9), pivot_columns_exact(&sparse(&m), &order));
        }
    }
}
