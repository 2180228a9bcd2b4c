//! Dense integer matrices, Smith normal form, and exact rational solves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rat;
use crate::error::Error;

/// Row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows in matrix literal".into()));
        }
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(e);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Column `j` as a vector of length `rows`.
    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Submatrix keeping the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> IntMatrix {
        let mut m = Self::zero(self.rows, cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            for i in 0..self.rows {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<Rat>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| Rat::from_integer(self[(i, j)].clone()))
                    .collect()
            })
            .collect();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..self.cols {
            let Some(p) = (row..self.rows).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(row, p);
            let pivot = a[row][col].clone();
            for i in 0..self.rows {
                if i != row && !a[i][col].is_zero() {
                    let factor = &a[i][col] / &pivot;
                    for j in col..self.cols {
                        let sub = &factor * &a[row][j];
                        a[i][j] -= sub;
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == self.rows {
                break;
            }
        }
        rank
    }

    /// Determinant of a square matrix by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| self[(i, j)].clone()).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num.div_floor(&prev);
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// Smith normal form `U * M * V = diag(d)` with `d_1 | d_2 | ...` and
/// unimodular transforms.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SnfResult {
    /// Product of the diagonal entries; equals `|det M|` for square `M`.
    pub fn diagonal_product(&self) -> BigInt {
        self.diagonal.iter().fold(BigInt::one(), |acc, d| acc * d)
    }

    /// Largest elementary divisor, i.e. the exponent of the cokernel torsion.
    pub fn largest_divisor(&self) -> BigInt {
        self.diagonal
            .iter()
            .rev()
            .find(|d| !d.is_zero())
            .cloned()
            .unwrap_or_else(BigInt::one)
    }
}

struct SnfState {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
}

impl SnfState {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.a.cols() {
            let tmp = self.a[(i, c)].clone();
            self.a[(i, c)] = self.a[(j, c)].clone();
            self.a[(j, c)] = tmp;
        }
        for c in 0..self.u.cols() {
            let tmp = self.u[(i, c)].clone();
            self.u[(i, c)] = self.u[(j, c)].clone();
            self.u[(j, c)] = tmp;
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.a.rows() {
            let tmp = self.a[(r, i)].clone();
            self.a[(r, i)] = self.a[(r, j)].clone();
            self.a[(r, j)] = tmp;
        }
        for r in 0..self.v.rows() {
            let tmp = self.v[(r, i)].clone();
            self.v[(r, i)] = self.v[(r, j)].clone();
            self.v[(r, j)] = tmp;
        }
    }

    /// row_i += q * row_j
    fn add_row(&mut self, i: usize, j: usize, q: &BigInt) {
        for c in 0..self.a.cols() {
            let add = q * &self.a[(j, c)];
            self.a[(i, c)] += add;
        }
        for c in 0..self.u.cols() {
            let add = q * &self.u[(j, c)];
            self.u[(i, c)] += add;
        }
    }

    /// col_i += q * col_j
    fn add_col(&mut self, i: usize, j: usize, q: &BigInt) {
        for r in 0..self.a.rows() {
            let add = q * &self.a[(r, j)];
            self.a[(r, i)] += add;
        }
        for r in 0..self.v.rows() {
            let add = q * &self.v[(r, j)];
            self.v[(r, i)] += add;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.a.cols() {
            let neg = -self.a[(i, c)].clone();
            self.a[(i, c)] = neg;
        }
        for c in 0..self.u.cols() {
            let neg = -self.u[(i, c)].clone();
            self.u[(i, c)] = neg;
        }
    }

    /// Smallest-absolute-value nonzero entry of the trailing submatrix.
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                if self.a[(i, j)].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((i, j)),
                    Some((bi, bj)) => {
                        if self.a[(i, j)].abs() < self.a[(bi, bj)].abs() {
                            best = Some((i, j));
                        }
                    }
                }
            }
        }
        best
    }
}

/// Smith normal form with smallest-absolute-value pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let rows = m.rows();
    let cols = m.cols();
    let mut s = SnfState {
        a: m.clone(),
        u: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
    };
    let steps = rows.min(cols);
    let mut t = 0;
    while t < steps {
        let Some((pi, pj)) = s.find_pivot(t) else {
            break;
        };
        s.swap_rows(t, pi);
        s.swap_cols(t, pj);

        // Clear row and column t; each reduction shrinks |pivot| so this
        // terminates.
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if s.a[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&s.a[(i, t)] / &s.a[(t, t)]);
                if !q.is_zero() {
                    s.add_row(i, t, &q);
                }
                if !s.a[(i, t)].is_zero() {
                    // Remainder is strictly smaller than the pivot; promote it.
                    s.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if s.a[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&s.a[(t, j)] / &s.a[(t, t)]);
                if !q.is_zero() {
                    s.add_col(j, t, &q);
                }
                if !s.a[(t, j)].is_zero() {
                    s.swap_cols(t, j);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }

        // The pivot must divide the trailing submatrix before we can move on.
        let pivot = s.a[(t, t)].clone();
        let offender = (t + 1..rows)
            .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !(&s.a[(i, j)] % &pivot).is_zero());
        if let Some((i, _)) = offender {
            s.add_row(t, i, &BigInt::one());
            continue;
        }
        t += 1;
    }

    for i in 0..steps {
        if s.a[(i, i)].is_negative() {
            s.negate_row(i);
        }
    }

    // Enforce the divisibility chain d_k | d_{k+1}.
    let mut k = 0;
    while k + 1 < steps {
        let p = s.a[(k, k)].clone();
        let q = s.a[(k + 1, k + 1)].clone();
        if p.is_zero() || (&q % &p).is_zero() {
            k += 1;
            continue;
        }
        // col_k += col_{k+1}, then a unimodular 2x2 row mix produces
        // (gcd, lcm) on the diagonal.
        s.add_col(k, k + 1, &BigInt::one());
        let ext = p.extended_gcd(&q);
        let g = ext.gcd.clone();
        let (x, y) = (ext.x.clone(), ext.y.clone());
        let p_g = &p / &g;
        let q_g = &q / &g;
        // rows (k, k+1) <- [[x, y], [-q/g, p/g]] * rows (k, k+1)
        for c in 0..cols {
            let rk = s.a[(k, c)].clone();
            let rk1 = s.a[(k + 1, c)].clone();
            s.a[(k, c)] = &x * &rk + &y * &rk1;
            s.a[(k + 1, c)] = &p_g * &rk1 - &q_g * &rk;
        }
        for c in 0..rows {
            let rk = s.u[(k, c)].clone();
            let rk1 = s.u[(k + 1, c)].clone();
            s.u[(k, c)] = &x * &rk + &y * &rk1;
            s.u[(k + 1, c)] = &p_g * &rk1 - &q_g * &rk;
        }
        // Clear the off-diagonal remnant in column k+1.
        let r = &s.a[(k, k + 1)] / &g;
        if !r.is_zero() {
            s.add_col(k + 1, k, &(-r));
        }
        if s.a[(k, k)].is_negative() {
            s.negate_row(k);
        }
        if s.a[(k + 1, k + 1)].is_negative() {
            s.negate_row(k + 1);
        }
        // The new gcd may break earlier links; rewind.
        k = k.saturating_sub(1);
    }

    let diagonal = (0..steps).map(|i| s.a[(i, i)].clone()).collect();
    SnfResult {
        diagonal,
        left: s.u,
        right: s.v,
    }
}

/// Solves `A x = b` over the rationals for square `A`; `None` when singular.
pub fn solve_square(a: &IntMatrix, b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "solve_square needs a square matrix");
    assert_eq!(b.len(), n, "right-hand side length mismatch");
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Rat::from_integer(a[(i, j)].clone()))
                .chain(std::iter::once(b[i].clone()))
                .collect()
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, p);
        let pivot = m[col][col].clone();
        for j in col..=n {
            m[col][j] = &m[col][j] / &pivot;
        }
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for j in col..=n {
                    let sub = &factor * &m[col][j];
                    m[i][j] -= sub;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat_int;

    fn snf_diag(rows: &[Vec<i64>]) -> Vec<i64> {
        let m = IntMatrix::from_rows(rows).unwrap();
        let s = smith_normal_form(&m);
        s.diagonal
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect()
    }

    fn check_round_trip(rows: &[Vec<i64>]) {
        let m = IntMatrix::from_rows(rows).unwrap();
        let s = smith_normal_form(&m);
        let prod = s.left.mul(&m).mul(&s.right);
        let mut diag = IntMatrix::zero(m.rows(), m.cols());
        for (i, d) in s.diagonal.iter().enumerate() {
            diag[(i, i)] = d.clone();
        }
        assert_eq!(prod, diag, "U*M*V mismatch for {rows:?}");
        for w in s.diagonal.windows(2) {
            if !w[0].is_zero() {
                assert!(
                    (&w[1] % &w[0]).is_zero(),
                    "divisibility chain broken: {:?}",
                    s.diagonal
                );
            } else {
                assert!(w[1].is_zero());
            }
        }
        assert_eq!(s.left.determinant().abs(), BigInt::one());
        assert_eq!(s.right.determinant().abs(), BigInt::one());
    }

    #[test]
    fn snf_identity() {
        assert_eq!(snf_diag(&[vec![1, 0], vec![0, 1]]), vec![1, 1]);
    }

    #[test]
    fn snf_one_by_one() {
        assert_eq!(snf_diag(&[vec![2]]), vec![2]);
    }

    #[test]
    fn snf_upper_triangular() {
        assert_eq!(snf_diag(&[vec![1, 1], vec![0, 2]]), vec![1, 2]);
        check_round_trip(&[vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn snf_divisibility_fix_needed() {
        // diag(2, 3) must become diag(1, 6)
        assert_eq!(snf_diag(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        check_round_trip(&[vec![2, 0], vec![0, 3]]);
    }

    #[test]
    fn snf_rectangular_and_zero() {
        assert_eq!(snf_diag(&[vec![2, 4, 4]]), vec![2]);
        check_round_trip(&[vec![2, 4, 4]]);
        assert_eq!(snf_diag(&[vec![0, 0], vec![0, 0]]), vec![0, 0]);
        check_round_trip(&[vec![6, 4], vec![4, 6], vec![2, 2]]);
    }

    #[test]
    fn determinant_matches_cofactor_values() {
        let m = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(m.determinant(), BigInt::from(-2));
        let m = IntMatrix::from_rows(&[vec![2, 0, 1], vec![1, 1, 0], vec![0, 3, 1]]).unwrap();
        assert_eq!(m.determinant(), BigInt::from(5));
        let sing = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(sing.determinant(), BigInt::zero());
    }

    #[test]
    fn solve_square_basic() {
        let a = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        let b = vec![rat_int(3), rat_int(2)];
        let x = solve_square(&a, &b).unwrap();
        assert_eq!(x, vec![rat_int(1), rat_int(1)]);
        let sing = IntMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(solve_square(&sing, &b).is_none());
    }

    #[test]
    fn rank_over_q() {
        assert_eq!(
            IntMatrix::from_rows(&[vec![1, 1], vec![1, 1]])
                .unwrap()
                .rank(),
            1
        );
        assert_eq!(
            IntMatrix::from_rows(&[vec![1, 0], vec![0, 1]])
                .unwrap()
                .rank(),
            2
        );
        assert_eq!(IntMatrix::from_rows(&[vec![1, 2, 3]]).unwrap().rank(), 1);
    }
}
