use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Which coefficient field a jet lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffKind {
    Rational,
    Float,
}

impl std::fmt::Display for CoeffKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoeffKind::Rational => write!(f, "rational"),
            CoeffKind::Float => write!(f, "float"),
        }
    }
}

/// Coefficient field for jets.
///
/// Implemented for `BigRational` (the exact path) and `f64` (the numeric
/// path). Row reduction is part of the trait because the two fields need
/// different elimination strategies: fraction-free integer elimination for
/// rationals, tolerance-gated partial pivoting for doubles.
pub trait Scalar: Num + Signed + Clone + Debug + PartialOrd + Send + Sync + 'static {
    const KIND: CoeffKind;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Nearest double.
    fn to_f64(&self) -> f64;

    /// `Some(sqrt)` when the square root is representable in the field.
    fn try_sqrt(&self) -> Option<Self>;

    /// Treat values below `tol` (absolute) as zero. Exact fields ignore `tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Pivot columns of a sparse row set, visiting columns in `col_order`.
    ///
    /// Rows are `(column, value)` lists. A column becomes a pivot iff it is
    /// linearly independent of the pivot columns chosen before it,
    /// restricted to the row space, so the result is the first column basis
    /// in `col_order`. `tol` is the rank tolerance (ignored when exact).
    fn pivot_columns(rows: &[Vec<(usize, Self)>], col_order: &[usize], tol: f64) -> Vec<usize>;

    /// Coefficient as written in reports and germ files.
    fn to_coeff_string(&self) -> String;

    /// Exact rational value; `None` for non-finite doubles.
    fn to_exact(&self) -> Option<BigRational>;
}

impl Scalar for BigRational {
    const KIND: CoeffKind = CoeffKind::Rational;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer();
        let d = self.denom();
        let rn = n.sqrt();
        let rd = d.sqrt();
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            Some(BigRational::new(rn, rd))
        } else {
            None
        }
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn pivot_columns(rows: &[Vec<(usize, Self)>], col_order: &[usize], _tol: f64) -> Vec<usize> {
        crate::linalg::pivot_columns_exact(rows, col_order)
    }

    fn to_coeff_string(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn to_exact(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

impl Scalar for f64 {
    const KIND: CoeffKind = CoeffKind::Float;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn try_sqrt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn pivot_columns(rows: &[Vec<(usize, Self)>], col_order: &[usize], tol: f64) -> Vec<usize> {
        crate::linalg::pivot_columns_float(rows, col_order, tol)
    }

    fn to_coeff_string(&self) -> String {
        format!("{}", self)
    }

    fn to_exact(&self) -> Option<BigRational> {
        rational_from_f64(*self)
    }
}

/// Exact conversion of a finite double to a rational (every double is dyadic).
pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_f64(v)
}

/// Parses `"p/q"`, `"p"`, or a decimal string such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let mut num: BigInt = digits.parse().ok()?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        return Some(BigRational::new(num, den));
    }
    let p: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(p))
}
