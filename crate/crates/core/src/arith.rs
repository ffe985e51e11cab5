//! Exact rational scalars and the small linear-algebra kernel used by every
//! extremality decision: reduced row-echelon form, rank, null space and
//! linear solve over the rationals.
//!
//! Pivoting takes the first nonzero entry scanning down a column. There is no
//! magnitude pivoting because nothing is rounded.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact fraction in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"a/b"` or `"a"` (optional sign, surrounding whitespace ignored).
pub fn parse_rational(text: &str) -> Result<Rational, ArithError> {
    let s = text.trim();
    let bad = || ArithError::Parse(text.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(ArithError::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"a/b"` in lowest terms, integers without a denominator.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational, ArithError> {
    if b.is_zero() {
        Err(ArithError::DivisionByZero)
    } else {
        Ok(a / b)
    }
}

/// Scales a vector to integer entries with gcd 1 and a positive first nonzero
/// entry. The zero vector is returned unchanged.
pub fn normalize_direction(v: &[Rational]) -> Vec<Rational> {
    let Some(first) = v.iter().find(|x| !x.is_zero()) else {
        return v.to_vec();
    };
    let lcm = v
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if first.is_negative() {
        gcd = -gcd;
    }
    ints.into_iter().map(|x| Rational::from_integer(x / &gcd)).collect()
}

/// Dense row-major matrix of rationals with fixed dimensions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub reduced: RatMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    None,
    Unique(Vec<Rational>),
    Underdetermined {
        particular: Vec<Rational>,
        null_basis: Vec<Vec<Rational>>,
    },
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self, ArithError> {
        if data.len() != rows * cols {
            return Err(ArithError::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ArithError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ArithError::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Self {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|&(n, d)| ratio(n, d)).collect())
            .collect();
        Self::from_rows(rows).expect("rectangular literal")
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|row| row.iter().map(|&n| int(n)).collect()).collect();
        Self::from_rows(rows).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                out[(r, k)] = self[(r, c)].clone();
            }
        }
        out
    }

    /// `[self | column]`.
    pub fn augment(&self, column: &[Rational]) -> Result<Self, ArithError> {
        if column.len() != self.rows {
            return Err(ArithError::Dimension(format!(
                "augmenting {} rows with a column of length {}",
                self.rows,
                column.len()
            )));
        }
        let mut out = Self::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)].clone();
            }
            out[(r, self.cols)] = column[r].clone();
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, ArithError> {
        if v.len() != self.cols {
            return Err(ArithError::Dimension(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        (0..self.rows)
            .map(|r| self.row(r).iter().fold(Rational::zero(), |a, x| a + x))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<Rational> {
        let mut sums = vec![Rational::zero(); self.cols];
        for r in 0..self.rows {
            for (s, x) in sums.iter_mut().zip(self.row(r)) {
                *s += x;
            }
        }
        sums
    }

    pub fn total(&self) -> Rational {
        self.data.iter().fold(Rational::zero(), |a, x| a + x)
    }

    /// Reduced row-echelon form by Gauss-Jordan elimination.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let Some(found) = (prow..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(found, prow);
            let inv = m[(prow, col)].recip();
            for c in col..m.cols {
                let v = &m[(prow, c)] * &inv;
                m[(prow, c)] = v;
            }
            for r in 0..m.rows {
                if r == prow || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in col..m.cols {
                    if m[(prow, c)].is_zero() {
                        continue;
                    }
                    let v = &m[(r, c)] - &factor * &m[(prow, c)];
                    m[(r, c)] = v;
                }
            }
            pivots.push(col);
            prow += 1;
        }
        Rref {
            rank: pivots.len(),
            pivots,
            reduced: m,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of `{v : A v = 0}`, one vector per free column, each normalized by
    /// [`normalize_direction`]. Empty iff the columns are independent.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let rref = self.rref();
        kernel_from_rref(&rref, self.cols)
    }

    pub fn solve(&self, b: &[Rational]) -> Result<Solution, ArithError> {
        let aug = self.augment(b)?;
        let rref = aug.rref();
        if rref.pivots.last() == Some(&self.cols) {
            return Ok(Solution::None);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &p) in rref.pivots.iter().enumerate() {
            x[p] = rref.reduced[(r, self.cols)].clone();
        }
        if rref.rank == self.cols {
            return Ok(Solution::Unique(x));
        }
        Ok(Solution::Underdetermined {
            particular: x,
            null_basis: kernel_from_rref(&rref, self.cols),
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Kernel of the first `cols` columns of an RREF (trailing columns, e.g. an
/// augmented right-hand side, are ignored).
fn kernel_from_rref(rref: &Rref, cols: usize) -> Vec<Vec<Rational>> {
    let pivots: Vec<usize> = rref.pivots.iter().copied().filter(|&p| p < cols).collect();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rref.reduced[(r, free)].clone();
            }
            normalize_direction(&v)
        })
        .collect()
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(format_rational).collect())
            .collect();
        write!(f, "RatMatrix{rows:?}")
    }
}
