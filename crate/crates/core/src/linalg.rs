//! Exact dense elimination over any field implementing [`FieldOps`].

use crate::scalar::{CycNumber, Scalar};

pub trait FieldOps: Clone + PartialEq + Send + Sync {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Panics on zero.
    fn inv(&self) -> Self;
}

impl FieldOps for Scalar {
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Scalar::zero(self.domain())
    }
    fn one_like(&self) -> Self {
        Scalar::one(self.domain())
    }
    fn add(&self, o: &Self) -> Self {
        self.add_ref(o)
    }
    fn sub(&self, o: &Self) -> Self {
        self.sub_ref(o)
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_ref(o)
    }
    fn neg(&self) -> Self {
        self.neg_ref()
    }
    fn inv(&self) -> Self {
        Scalar::inv(self).expect("inverse of zero")
    }
}

impl FieldOps for CycNumber {
    fn is_zero(&self) -> bool {
        CycNumber::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        CycNumber::zero(self.conductor())
    }
    fn one_like(&self) -> Self {
        CycNumber::one(self.conductor())
    }
    fn add(&self, o: &Self) -> Self {
        CycNumber::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        CycNumber::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        CycNumber::mul(self, o)
    }
    fn neg(&self) -> Self {
        CycNumber::neg(self)
    }
    fn inv(&self) -> Self {
        CycNumber::inv(self).expect("inverse of zero")
    }
}

/// Reduced row echelon form in place. Columns are scanned in `col_order`
/// (all columns in natural order when `None`). Returns (row, column) pivots;
/// rows after the last pivot are zero.
pub fn rref<F: FieldOps>(rows: &mut [Vec<F>], col_order: Option<&[usize]>) -> Vec<(usize, usize)> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let natural: Vec<usize> = (0..ncols).collect();
    let order = col_order.unwrap_or(&natural);
    let mut pivots = Vec::new();
    let mut r = 0;
    for &c in order {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv();
        if !rows[r][c].one_like().eq(&rows[r][c]) {
            for x in rows[r].iter_mut() {
                if !x.is_zero() {
                    *x = x.mul(&inv);
                }
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = x.sub(&f.mul(p));
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    pivots
}

pub fn rank<F: FieldOps>(rows: &[Vec<F>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, None).len()
}

/// Basis of {x : M x = 0} for an m×n matrix given by rows (needs `zero` for the empty case).
pub fn nullspace<F: FieldOps>(rows: &[Vec<F>], ncols: usize, zero: &F) -> Vec<Vec<F>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, None);
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let one = zero.one_like();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![zero.clone(); ncols];
        v[free] = one.clone();
        for &(r, c) in &pivots {
            v[c] = m[r][free].neg();
        }
        basis.push(v);
    }
    basis
}

/// Solution set of the augmented system [A | b] (last column is b).
pub enum Solution<F> {
    Unique(Vec<F>),
    Inconsistent { row: usize },
    Underdetermined { free: Vec<usize> },
}

pub fn solve_augmented<F: FieldOps>(aug: &[Vec<F>]) -> Solution<F> {
    let mut m = aug.to_vec();
    let ncols = m[0].len() - 1;
    let order: Vec<usize> = (0..ncols).collect();
    let pivots = rref(&mut m, Some(&order));
    for (i, row) in m.iter().enumerate().skip(pivots.len()) {
        if !row[ncols].is_zero() {
            return Solution::Inconsistent { row: i };
        }
    }
    if pivots.len() < ncols {
        let pc: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        return Solution::Underdetermined { free: (0..ncols).filter(|c| !pc.contains(c)).collect() };
    }
    let mut x = vec![m[0][0].zero_like(); ncols];
    for &(r, c) in &pivots {
        x[c] = m[r][ncols].clone();
    }
    Solution::Unique(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> CycNumber {
        CycNumber::from_int(1, v)
    }

    #[test]
    fn rank_and_nullspace() {
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(1)]];
        assert_eq!(rank(&m), 2);
        let ns = nullspace(&m, 3, &q(0));
        assert_eq!(ns.len(), 1);
        for row in &m {
            let dot = row.iter().zip(&ns[0]).fold(q(0), |a, (x, y)| a.add(&x.mul(y)));
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn augmented() {
        let m = vec![vec![q(1), q(1), q(3)], vec![q(1), q(-1), q(1)]];
        match solve_augmented(&m) {
            Solution::Unique(x) => assert_eq!(x, vec![q(2), q(1)]),
            _ => panic!(),
        }
        let bad = vec![vec![q(1), q(1), q(3)], vec![q(2), q(2), q(1)]];
        assert!(matches!(solve_augmented(&bad), Solution::Inconsistent { .. }));
    }
}
