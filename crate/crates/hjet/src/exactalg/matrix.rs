//! Dense matrices over an exact scalar ring.
//!
//! Rank and determinant use fraction-free (Bareiss) elimination, so the
//! only divisions performed are exact. Matrices with polynomial entries
//! are ranked either symbolically (small dimensions) or by randomized
//! evaluation at integer points.

use num_traits::{One, Zero};
use rand::Rng;

use super::poly::MultiPoly;
use super::{Rational, Scalar};
use crate::error::{HjetError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix<S: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> ExactMatrix<S> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        for row in &rows {
            assert_eq!(row.len(), c, "ragged rows");
        }
        ExactMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn filled(rows: usize, cols: usize, zero: S) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![zero; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    /// Some entry to derive ring constants from; matrices here are never
    /// 0 x 0 when this is called.
    fn sample(&self) -> &S {
        &self.data[0]
    }

    pub fn transpose(&self) -> Self {
        ExactMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let zero = self.sample().zero();
        ExactMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = zero.clone();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(other.get(k, j)));
            }
            acc
        })
    }

    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        ExactMatrix::from_fn(row_idx.len(), col_idx.len(), |i, j| {
            self.get(row_idx[i], col_idx[j]).clone()
        })
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> ExactMatrix<T> {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| f(x)).collect(),
        }
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Rank by fraction-free Bareiss elimination with full pivoting.
    /// Deterministic; all divisions exact.
    pub fn rank_bareiss(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let mut m = self.clone();
        let mut prev = self.sample().one();
        let mut rank = 0usize;
        let (r, c) = (m.rows, m.cols);
        for step in 0.. {
            // find a pivot in the remaining block
            let mut pivot = None;
            'outer: for j in step..c {
                for i in step..r {
                    if !m.get(i, j).is_zero() {
                        pivot = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let (pi, pj) = match pivot {
                Some(p) => p,
                None => break,
            };
            rank += 1;
            m.swap_rows(step, pi);
            m.swap_cols(step, pj);
            if step + 1 >= r || step + 1 >= c {
                break;
            }
            let piv = m.get(step, step).clone();
            for i in (step + 1)..r {
                for j in (step + 1)..c {
                    let v = piv
                        .mul(m.get(i, j))
                        .sub(&m.get(i, step).mul(m.get(step, j)));
                    m.set(i, j, v.exact_div(&prev));
                }
                m.set(i, step, piv.zero());
            }
            prev = piv;
        }
        rank
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det_bareiss(&self) -> S {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        if self.rows == 0 {
            panic!("determinant of empty matrix is ring-ambiguous; handle upstream");
        }
        let mut m = self.clone();
        let zero = self.sample().zero();
        let mut prev = self.sample().one();
        let mut sign = false;
        let n = m.rows;
        for step in 0..n {
            let mut pivot = None;
            'outer: for j in step..n {
                for i in step..n {
                    if !m.get(i, j).is_zero() {
                        pivot = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let (pi, pj) = match pivot {
                Some(p) => p,
                None => return zero,
            };
            if pi != step {
                m.swap_rows(step, pi);
                sign = !sign;
            }
            if pj != step {
                m.swap_cols(step, pj);
                sign = !sign;
            }
            if step + 1 == n {
                break;
            }
            let piv = m.get(step, step).clone();
            for i in (step + 1)..n {
                for j in (step + 1)..n {
                    let v = piv
                        .mul(m.get(i, j))
                        .sub(&m.get(i, step).mul(m.get(step, j)));
                    m.set(i, j, v.exact_div(&prev));
                }
                m.set(i, step, piv.zero());
            }
            prev = piv;
        }
        let d = m.get(n - 1, n - 1).clone();
        if sign {
            d.neg()
        } else {
            d
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

/// Rank over the rationals; deterministic fraction-free elimination.
pub fn exact_rank(m: &ExactMatrix<Rational>) -> usize {
    m.rank_bareiss()
}

impl ExactMatrix<Rational> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, <Rational as Zero>::zero())
    }

    pub fn identity(n: usize) -> Self {
        ExactMatrix::from_fn(n, n, |i, j| {
            if i == j {
                <Rational as One>::one()
            } else {
                <Rational as Zero>::zero()
            }
        })
    }

    /// Reduced row echelon form with leftmost-pivot selection.
    /// Returns (rref, transform, pivot_cols) with transform * self = rref.
    pub fn rref(&self) -> (Self, Self, Vec<usize>) {
        let mut m = self.clone();
        let mut e = Self::identity(self.rows);
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let pr = (row..self.rows).find(|&i| !Zero::is_zero(m.get(i, col)));
            let pr = match pr {
                Some(i) => i,
                None => continue,
            };
            m.swap_rows(row, pr);
            e.swap_rows(row, pr);
            let inv = m.get(row, col).recip();
            for j in 0..self.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for j in 0..self.rows {
                let v = e.get(row, j) * &inv;
                e.set(row, j, v);
            }
            for i in 0..self.rows {
                if i == row || Zero::is_zero(m.get(i, col)) {
                    continue;
                }
                let f = m.get(i, col).clone();
                for j in 0..self.cols {
                    let v = m.get(i, j) - &f * m.get(row, j);
                    m.set(i, j, v);
                }
                for j in 0..self.rows {
                    let v = e.get(i, j) - &f * e.get(row, j);
                    e.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, e, pivots)
    }

    /// Deterministic right inverse R with self * R = Id: RREF with
    /// leftmost pivots, free columns set to zero.
    pub fn right_inverse(&self) -> Result<Self> {
        let (_, e, pivots) = self.rref();
        if pivots.len() < self.rows {
            return Err(HjetError::RankDeficient {
                rank: pivots.len(),
                required: self.rows,
            });
        }
        let mut r = Self::zeros(self.cols, self.rows);
        for (k, &j) in pivots.iter().enumerate() {
            for i in 0..self.rows {
                r.set(j, i, e.get(k, i).clone());
            }
        }
        Ok(r)
    }

    /// Basis of the right kernel, one vector per free column, in
    /// ascending free-column order. Deterministic.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (rref, _, pivots) = self.rref();
        let mut basis = Vec::new();
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![<Rational as Zero>::zero(); self.cols];
            v[free] = <Rational as One>::one();
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = -rref.get(k, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve self * x = b for a single solution (free variables zero).
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let aug = ExactMatrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let (rref, _, pivots) = aug.rref();
        // consistency: no pivot in the augmented column
        if pivots.iter().any(|&p| p == self.cols) {
            return Err(HjetError::Internal("inconsistent linear system".into()));
        }
        let mut x = vec![<Rational as Zero>::zero(); self.cols];
        for (k, &p) in pivots.iter().enumerate() {
            x[p] = rref.get(k, self.cols).clone();
        }
        Ok(x)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = <Rational as Zero>::zero();
                for j in 0..self.cols {
                    acc += self.get(i, j) * &v[j];
                }
                acc
            })
            .collect()
    }
}

impl ExactMatrix<MultiPoly> {
    pub fn eval(&self, point: &[Rational]) -> ExactMatrix<Rational> {
        self.map(|p| p.eval(point))
    }

    pub fn max_total_degree(&self) -> usize {
        self.data.iter().map(|p| p.total_degree()).max().unwrap_or(0)
    }
}

/// Outcome of a randomized rank computation: a certified lower bound for
/// the generic rank, together with the Schwartz-Zippel failure bound for
/// the event "generic rank is strictly larger".
#[derive(Clone, Debug)]
pub struct ProbabilisticRank {
    pub rank_lower_bound: usize,
    pub trials: usize,
    pub bound: u64,
    /// failure probability <= (d / bound)^trials where d is the maximal
    /// total degree of a maximal minor.
    pub failure_probability: Rational,
}

/// Randomized rank of a polynomial matrix: max over trials of the exact
/// rank at uniform integer points in [1, bound].
pub fn rank_probabilistic(
    m: &ExactMatrix<MultiPoly>,
    trials: usize,
    bound: u64,
    rng: &mut impl Rng,
) -> ProbabilisticRank {
    assert!(trials >= 1, "need at least one trial");
    assert!(bound >= 2, "need bound >= 2");
    let nvars = if m.rows() > 0 && m.cols() > 0 {
        m.sample().nvars()
    } else {
        0
    };
    let mut best = 0usize;
    for _ in 0..trials {
        let point: Vec<Rational> = (0..nvars)
            .map(|_| Rational::from_integer(rng.random_range(1..=bound).into()))
            .collect();
        let r = exact_rank(&m.eval(&point));
        best = best.max(r);
    }
    // A maximal minor has total degree at most min(rows, cols) * max
    // entry degree.
    let minor_deg = m.rows().min(m.cols()) * m.max_total_degree();
    let per_trial = Rational::new(minor_deg.into(), bound.into());
    let per_trial = if per_trial > <Rational as One>::one() {
        <Rational as One>::one()
    } else {
        per_trial
    };
    let mut fail = <Rational as One>::one();
    for _ in 0..trials {
        fail *= &per_trial;
    }
    ProbabilisticRank {
        rank_lower_bound: best,
        trials,
        bound,
        failure_probability: fail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::{var_set, MultiPoly};
    use crate::exactalg::{rat_int, Rational};
    use rand::SeedableRng;

    fn m(rows: Vec<Vec<i64>>) -> ExactMatrix<Rational> {
        ExactMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(rat_int).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_examples() {
        assert_eq!(exact_rank(&m(vec![vec![1, 0], vec![0, 1]])), 2);
        assert_eq!(exact_rank(&m(vec![vec![1, 2], vec![2, 4]])), 1);
        // contact-curve A block
        assert_eq!(exact_rank(&m(vec![vec![-1, 1, 0], vec![0, 0, 1]])), 2);
    }

    #[test]
    fn rank_invariance_under_row_ops() {
        let a = m(vec![vec![2, 3, 5], vec![7, 11, 13], vec![9, 14, 18]]);
        let base = exact_rank(&a);
        // permute rows
        let b = m(vec![vec![7, 11, 13], vec![9, 14, 18], vec![2, 3, 5]]);
        assert_eq!(exact_rank(&b), base);
        // scale a row
        let c = m(vec![vec![4, 6, 10], vec![7, 11, 13], vec![9, 14, 18]]);
        assert_eq!(exact_rank(&c), base);
    }

    #[test]
    fn det_matches_cofactor_small() {
        let a = m(vec![vec![2, 3], vec![5, 7]]);
        assert_eq!(a.det_bareiss(), rat_int(-1));
        let b = m(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]);
        assert_eq!(b.det_bareiss(), rat_int(-3));
    }

    #[test]
    fn right_inverse_examples() {
        let id2 = m(vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(id2.right_inverse().unwrap(), id2);

        let row = m(vec![vec![1, 0, 0]]);
        let r = row.right_inverse().unwrap();
        assert_eq!(r, m(vec![vec![1], vec![0], vec![0]]));

        // contact Lambda at the origin
        let lam = m(vec![vec![0, 0, 1]]);
        let r = lam.right_inverse().unwrap();
        assert_eq!(r, m(vec![vec![0], vec![0], vec![1]]));

        // contract M * R = Id on a wide full-rank matrix
        let wide = m(vec![vec![2, 1, 0, 3], vec![0, 1, 4, 1]]);
        let r = wide.right_inverse().unwrap();
        assert_eq!(wide.matmul(&r), ExactMatrix::identity(2));
    }

    #[test]
    fn right_inverse_rejects_rank_deficient() {
        let sing = m(vec![vec![1, 2], vec![2, 4]]);
        assert!(sing.right_inverse().is_err());
    }

    #[test]
    fn kernel_basis_annihilates() {
        let a = m(vec![vec![1, 2, 3], vec![0, 1, 1]]);
        let ker = a.kernel_basis();
        assert_eq!(ker.len(), 1);
        for v in &ker {
            assert!(a.mul_vec(v).iter().all(num_traits::Zero::is_zero));
        }
    }

    #[test]
    fn probabilistic_rank_examples() {
        let vs = var_set("X", 1);
        let x = MultiPoly::var(&vs, 0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);

        let m1 = ExactMatrix::from_rows(vec![vec![x.clone()]]);
        let r = rank_probabilistic(&m1, 3, 100, &mut rng);
        assert_eq!(r.rank_lower_bound, 1);

        let m2 = ExactMatrix::from_rows(vec![
            vec![x.clone(), x.clone()],
            vec![x.clone(), x.clone()],
        ]);
        let r = rank_probabilistic(&m2, 3, 100, &mut rng);
        assert_eq!(r.rank_lower_bound, 1);
    }

    #[test]
    fn probabilistic_never_exceeds_symbolic() {
        let vs = var_set("X", 2);
        let x = MultiPoly::var(&vs, 0);
        let y = MultiPoly::var(&vs, 1);
        let mp = ExactMatrix::from_rows(vec![
            vec![x.clone(), y.clone()],
            vec![y.clone(), x.clone()],
        ]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let r = rank_probabilistic(&mp, 5, 1 << 20, &mut rng);
        assert!(r.rank_lower_bound <= mp.rank_bareiss());
        assert_eq!(mp.rank_bareiss(), 2);
    }
}
