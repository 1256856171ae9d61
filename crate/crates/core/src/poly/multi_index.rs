use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a monomial `x_1^{e_1} ... x_n^{e_n}`.
///
/// Ordered graded-lexicographically: lower total degree first; within a
/// degree, a larger exponent on an earlier variable comes first, so
/// `x^2 < y^2` and `x^4 < x^2*y^2 < y^4`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exps: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex { exps }
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex { exps: vec![0; n] }
    }

    /// `x_i` in `n` variables.
    pub fn var(n: usize, i: usize) -> Self {
        let mut exps = vec![0; n];
        exps[i] = 1;
        MultiIndex { exps }
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn max_exp(&self) -> u32 {
        self.exps.iter().copied().max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.nvars(), other.nvars());
        MultiIndex {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `self / other`, if `other` divides `self`.
    pub fn div(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex { exps })
    }

    /// Lowers the exponent of variable `i` by one, if positive.
    pub fn lower(&self, i: usize) -> Option<MultiIndex> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[i] -= 1;
        Some(MultiIndex { exps })
    }

    pub fn raise(&self, i: usize) -> MultiIndex {
        let mut exps = self.exps.clone();
        exps[i] += 1;
        MultiIndex { exps }
    }

    /// All monomials of exactly degree `d` in `n` variables, in graded-lex order.
    pub fn of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        if n == 0 {
            if d == 0 {
                out.push(MultiIndex::zero(0));
            }
            return out;
        }
        let mut cur = vec![0u32; n];
        fill(&mut cur, 0, d, &mut out);
        out
    }

    /// All monomials with degree in `lo..=hi`, in graded-lex order.
    pub fn up_to_degree(n: usize, lo: u32, hi: u32) -> Vec<MultiIndex> {
        (lo..=hi)
            .flat_map(|d| MultiIndex::of_degree(n, d))
            .collect()
    }

    /// Renders with the given variable names, e.g. `x^2*y`.
    pub fn render(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let name = names
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| format!("x{}", i + 1));
                if e == 1 {
                    name
                } else {
                    format!("{}^{}", name, e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

// exponents of earlier variables are enumerated from high to low
fn fill(cur: &mut Vec<u32>, i: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if i + 1 == cur.len() {
        cur[i] = remaining;
        out.push(MultiIndex { exps: cur.clone() });
        return;
    }
    for e in (0..=remaining).rev() {
        cur[i] = e;
        fill(cur, i + 1, remaining - e, out);
    }
    cur[i] = 0;
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}
