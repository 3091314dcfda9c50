//! 3×3 matrices, rank-3 tensors and the tensor operations on them.
//!
//! Index convention: `m[i][j]` is M^i_j (row i, column j). Composite indices
//! (i,j) flatten to `3*i + j`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{nullspace, solve_augmented, Solution};
use crate::scalar::{Domain, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("cyclicity system is inconsistent (equation {0})")]
    Inconsistent(String),
    #[error("cyclicity system leaves components {0:?} undetermined")]
    NotUnique(Vec<String>),
    #[error("plane relations have no cubic intersection")]
    NoIntersection,
    #[error("cubic intersection has dimension {0}")]
    Ambiguous(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("cyclic matrix is not uniquely determined")]
    CyclicMatrixUndetermined,
    #[error("relation families are not normalized: pairing entry ({0},{1})")]
    NormalizationViolated(usize, usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

pub fn idx3(i: usize, j: usize, k: usize) -> usize {
    9 * i + 3 * j + k
}

/// Renders a 0-based index tuple in the 1-based form used by the catalog ("123").
pub fn index_label(ix: &[usize]) -> String {
    ix.iter().map(|i| char::from(b'1' + *i as u8)).collect()
}

/// Parses a 1-based label such as "123".
pub fn parse_label(s: &str) -> Option<[usize; 3]> {
    let b = s.as_bytes();
    if b.len() != 3 || !b.iter().all(|c| (b'1'..=b'3').contains(c)) {
        return None;
    }
    Some([(b[0] - b'1') as usize, (b[1] - b'1') as usize, (b[2] - b'1') as usize])
}

#[derive(Clone, PartialEq)]
pub struct Matrix3 {
    pub m: [[Scalar; 3]; 3],
}

impl Matrix3 {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Scalar) -> Matrix3 {
        Matrix3 { m: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))) }
    }

    pub fn zero(dom: &Arc<Domain>) -> Matrix3 {
        Matrix3::from_fn(|_, _| Scalar::zero(dom))
    }

    pub fn identity(dom: &Arc<Domain>) -> Matrix3 {
        Matrix3::from_fn(|i, j| if i == j { Scalar::one(dom) } else { Scalar::zero(dom) })
    }

    pub fn diag(a: Scalar, b: Scalar, c: Scalar) -> Matrix3 {
        let dom = a.domain().clone();
        let d = [a, b, c];
        Matrix3::from_fn(|i, j| if i == j { d[i].clone() } else { Scalar::zero(&dom) })
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.m[0][0].domain()
    }

    pub fn mul(&self, o: &Matrix3) -> Matrix3 {
        Matrix3::from_fn(|i, j| {
            let mut acc = Scalar::zero(self.domain());
            for k in 0..3 {
                if !self.m[i][k].is_zero() && !o.m[k][j].is_zero() {
                    acc = acc + &self.m[i][k] * &o.m[k][j];
                }
            }
            acc
        })
    }

    pub fn add(&self, o: &Matrix3) -> Matrix3 {
        Matrix3::from_fn(|i, j| &self.m[i][j] + &o.m[i][j])
    }

    pub fn sub(&self, o: &Matrix3) -> Matrix3 {
        Matrix3::from_fn(|i, j| &self.m[i][j] - &o.m[i][j])
    }

    pub fn scale(&self, s: &Scalar) -> Matrix3 {
        Matrix3::from_fn(|i, j| &self.m[i][j] * s)
    }

    pub fn transpose(&self) -> Matrix3 {
        Matrix3::from_fn(|i, j| self.m[j][i].clone())
    }

    pub fn trace(&self) -> Scalar {
        &(&self.m[0][0] + &self.m[1][1]) + &self.m[2][2]
    }

    pub fn det(&self) -> Scalar {
        let m = &self.m;
        let a = &m[0][0] * &(&(&m[1][1] * &m[2][2]) - &(&m[1][2] * &m[2][1]));
        let b = &m[0][1] * &(&(&m[1][0] * &m[2][2]) - &(&m[1][2] * &m[2][0]));
        let c = &m[0][2] * &(&(&m[1][0] * &m[2][1]) - &(&m[1][1] * &m[2][0]));
        &(&a - &b) + &c
    }

    pub fn invert(&self) -> Result<Matrix3, TensorError> {
        let d = self.det();
        if d.is_zero() {
            return Err(TensorError::Singular);
        }
        let di = d.inv()?;
        let m = &self.m;
        let cof = |r: usize, c: usize| {
            let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
            let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
            &(&m[r1][c1] * &m[r2][c2]) - &(&m[r1][c2] * &m[r2][c1])
        };
        Ok(Matrix3::from_fn(|i, j| &cof(j, i) * &di))
    }

    pub fn pow(&self, e: i64) -> Result<Matrix3, TensorError> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut acc = Matrix3::identity(self.domain());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(|x| x.is_zero())
    }

    /// First nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<([usize; 2], Scalar)> {
        for i in 0..3 {
            for j in 0..3 {
                if !self.m[i][j].is_zero() {
                    return Some(([i, j], self.m[i][j].clone()));
                }
            }
        }
        None
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix3 {
        Matrix3::from_fn(|i, j| f(&self.m[i][j]))
    }
}

pub fn commutator(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    a.mul(b).sub(&b.mul(a))
}

impl fmt::Debug for Matrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self.m.iter().map(|r| r.iter().map(|x| x.render()).collect()).collect();
        write!(f, "{rows:?}")
    }
}

/// Dense n×n matrix of scalars (9×9 R-matrices, 27×27 triple products).
#[derive(Clone, PartialEq)]
pub struct SqMatrix {
    n: usize,
    data: Vec<Scalar>,
}

impl SqMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> SqMatrix {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SqMatrix { n, data }
    }

    pub fn zeros(dom: &Arc<Domain>, n: usize) -> SqMatrix {
        SqMatrix { n, data: vec![Scalar::zero(dom); n * n] }
    }

    pub fn identity(dom: &Arc<Domain>, n: usize) -> SqMatrix {
        SqMatrix::from_fn(n, |i, j| if i == j { Scalar::one(dom) } else { Scalar::zero(dom) })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.n + j] = v;
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.data[0].domain()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn mul(&self, o: &SqMatrix) -> SqMatrix {
        let n = self.n;
        let nz: Vec<Vec<usize>> = (0..n).map(|k| (0..n).filter(|&j| !o.get(k, j).is_zero()).collect()).collect();
        let mut out = SqMatrix::zeros(self.domain(), n);
        for i in 0..n {
            let mut row: Vec<Option<Scalar>> = vec![None; n];
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for &j in &nz[k] {
                    let t = a * o.get(k, j);
                    row[j] = Some(match row[j].take() {
                        Some(v) => v + t,
                        None => t,
                    });
                }
            }
            for (j, v) in row.into_iter().enumerate() {
                if let Some(v) = v {
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, o: &SqMatrix) -> SqMatrix {
        SqMatrix::from_fn(self.n, |i, j| self.get(i, j) + o.get(i, j))
    }

    pub fn sub(&self, o: &SqMatrix) -> SqMatrix {
        SqMatrix::from_fn(self.n, |i, j| self.get(i, j) - o.get(i, j))
    }

    pub fn scale(&self, s: &Scalar) -> SqMatrix {
        SqMatrix::from_fn(self.n, |i, j| self.get(i, j) * s)
    }

    pub fn trace(&self) -> Scalar {
        (0..self.n).fold(Scalar::zero(self.domain()), |acc, i| acc + self.get(i, i))
    }

    pub fn transpose(&self) -> SqMatrix {
        SqMatrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Kronecker product; row (a,b) ↦ a*other.n + b.
    pub fn kron(&self, o: &SqMatrix) -> SqMatrix {
        let m = o.n;
        SqMatrix::from_fn(self.n * m, |r, c| {
            let a = self.get(r / m, c / m);
            if a.is_zero() {
                return Scalar::zero(self.domain());
            }
            a * o.get(r % m, c % m)
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn first_nonzero(&self) -> Option<([usize; 2], Scalar)> {
        self.data.iter().position(|x| !x.is_zero()).map(|p| ([p / self.n, p % self.n], self.data[p].clone()))
    }

    pub fn invert(&self) -> Result<SqMatrix, TensorError> {
        let n = self.n;
        let dom = self.domain().clone();
        let mut aug: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                let mut row: Vec<Scalar> = (0..n).map(|j| self.get(i, j).clone()).collect();
                row.extend((0..n).map(|j| if i == j { Scalar::one(&dom) } else { Scalar::zero(&dom) }));
                row
            })
            .collect();
        let order: Vec<usize> = (0..n).collect();
        let piv = crate::linalg::rref(&mut aug, Some(&order));
        if piv.len() < n {
            return Err(TensorError::Singular);
        }
        Ok(SqMatrix::from_fn(n, |i, j| aug[i][n + j].clone()))
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> SqMatrix {
        SqMatrix { n: self.n, data: self.data.iter().map(f).collect() }
    }
}

impl fmt::Debug for SqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SqMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).render()).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        Ok(())
    }
}

/// Z⊗Z as a 9×9 matrix: (Z⊗Z)[(i,j),(k,l)] = Z^i_k Z^j_l.
pub fn tensor_square(z: &Matrix3) -> SqMatrix {
    SqMatrix::from_fn(9, |r, c| &z.m[r / 3][c / 3] * &z.m[r % 3][c % 3])
}

pub fn lift(m: &Matrix3) -> SqMatrix {
    SqMatrix::from_fn(3, |i, j| m.m[i][j].clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Lower,
    Upper,
}

#[derive(Clone, PartialEq)]
pub struct Tensor3 {
    pub v: Vec<Scalar>,
    pub variance: Variance,
}

impl Tensor3 {
    pub fn from_fn(variance: Variance, mut f: impl FnMut(usize, usize, usize) -> Scalar) -> Tensor3 {
        let mut v = Vec::with_capacity(27);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    v.push(f(i, j, k));
                }
            }
        }
        Tensor3 { v, variance }
    }

    pub fn zero(dom: &Arc<Domain>, variance: Variance) -> Tensor3 {
        Tensor3 { v: vec![Scalar::zero(dom); 27], variance }
    }

    /// The classical ε tensor.
    pub fn epsilon(dom: &Arc<Domain>, variance: Variance) -> Tensor3 {
        Tensor3::from_fn(variance, |i, j, k| Scalar::from_int(dom, levi_civita(i, j, k)))
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.v[idx3(i, j, k)]
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.v[0].domain()
    }

    pub fn add(&self, o: &Tensor3) -> Tensor3 {
        Tensor3 { v: self.v.iter().zip(&o.v).map(|(a, b)| a + b).collect(), variance: self.variance }
    }

    pub fn sub(&self, o: &Tensor3) -> Tensor3 {
        Tensor3 { v: self.v.iter().zip(&o.v).map(|(a, b)| a - b).collect(), variance: self.variance }
    }

    pub fn scale(&self, s: &Scalar) -> Tensor3 {
        Tensor3 { v: self.v.iter().map(|a| a * s).collect(), variance: self.variance }
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|x| x.is_zero())
    }

    pub fn first_nonzero(&self) -> Option<(usize, Scalar)> {
        self.v.iter().position(|x| !x.is_zero()).map(|p| (p, self.v[p].clone()))
    }

    /// Slice with the first index fixed: S[j][k] = T_{a j k}.
    pub fn first_slice(&self, a: usize) -> Matrix3 {
        Matrix3::from_fn(|j, k| self.get(a, j, k).clone())
    }

    /// Slice with the last index fixed: S[i][j] = T_{i j c}.
    pub fn last_slice(&self, c: usize) -> Matrix3 {
        Matrix3::from_fn(|i, j| self.get(i, j, c).clone())
    }

    /// Contraction with a matrix on every index: Σ T_{abc} L[a][i] L[b][j] L[c][k] (lower)
    /// or Σ L[i][a] L[j][b] L[k][c] T^{abc} (upper).
    pub fn transform_all(&self, l: &Matrix3) -> Tensor3 {
        let lt = match self.variance {
            Variance::Lower => l.clone(),
            Variance::Upper => l.transpose(),
        };
        let dom = self.domain().clone();
        // contract one slot at a time
        let step = |t: &[Scalar], slot: usize| -> Vec<Scalar> {
            let mut out = vec![Scalar::zero(&dom); 27];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let mut acc = Scalar::zero(&dom);
                        for a in 0..3 {
                            let (src, new) = match slot {
                                0 => (idx3(a, j, k), i),
                                1 => (idx3(i, a, k), j),
                                _ => (idx3(i, j, a), k),
                            };
                            if !t[src].is_zero() && !lt.m[a][new].is_zero() {
                                acc = acc + &t[src] * &lt.m[a][new];
                            }
                        }
                        out[idx3(i, j, k)] = acc;
                    }
                }
            }
            out
        };
        let v = step(&step(&step(&self.v, 0), 1), 2);
        Tensor3 { v, variance: self.variance }
    }
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (p, x) in self.v.iter().enumerate() {
            if !x.is_zero() {
                m.entry(&index_label(&[p / 9, (p / 3) % 3, p % 3]), &x.render());
            }
        }
        m.finish()
    }
}

pub fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    if i == j || j == k || i == k {
        0
    } else if (i, j, k) == (0, 1, 2) || (i, j, k) == (1, 2, 0) || (i, j, k) == (2, 0, 1) {
        1
    } else {
        -1
    }
}

/// Three 3×3 matrices E^α_{ij} (or F_α^{ij}).
#[derive(Clone, PartialEq, Debug)]
pub struct RelationFamily {
    pub mats: [Matrix3; 3],
}

impl RelationFamily {
    pub fn vectors(&self) -> Vec<Vec<Scalar>> {
        self.mats.iter().map(|m| m.m.iter().flatten().cloned().collect()).collect()
    }

    pub fn is_independent(&self) -> bool {
        crate::linalg::rank(&self.vectors()) == 3
    }
}

/// Orbit representatives of the rotation (i,j,k) ↦ (k,i,j).
pub const BASIC_COMPONENTS: [[usize; 3]; 11] = [
    [0, 0, 0],
    [1, 1, 1],
    [2, 2, 2],
    [1, 0, 0],
    [2, 0, 0],
    [0, 1, 1],
    [2, 1, 1],
    [0, 2, 2],
    [1, 2, 2],
    [0, 1, 2],
    [0, 2, 1],
];

fn rotation_orbit(ix: [usize; 3]) -> [[usize; 3]; 3] {
    let [i, j, k] = ix;
    [[i, j, k], [k, i, j], [j, k, i]]
}

/// Completes a tensor from given components using E_{ijk} = Σ_l Q^l_k E_{lij}
/// (lower) or F^{ijk} = Σ_l P^k_l F^{lij} (upper). Rotation orbits without a given
/// component are pinned to zero at their representative.
pub fn complete_by_cyclicity(
    components: &BTreeMap<[usize; 3], Scalar>,
    q: &Matrix3,
    variance: Variance,
) -> Result<Tensor3, TensorError> {
    let dom = q.domain().clone();
    let zero = Scalar::zero(&dom);
    let one = Scalar::one(&dom);
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut labels = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let mut r = vec![zero.clone(); 28];
                r[idx3(i, j, k)] = one.clone();
                for l in 0..3 {
                    let c = match variance {
                        Variance::Lower => &q.m[l][k],
                        Variance::Upper => &q.m[k][l],
                    };
                    r[idx3(l, i, j)] = &r[idx3(l, i, j)] - c;
                }
                rows.push(r);
                labels.push(format!("cyclic {}", index_label(&[i, j, k])));
            }
        }
    }
    let mut pinned: Vec<([usize; 3], Scalar)> = components.iter().map(|(k, v)| (*k, v.clone())).collect();
    for b in BASIC_COMPONENTS {
        let orbit = rotation_orbit(b);
        if !orbit.iter().any(|o| components.contains_key(o)) {
            pinned.push((b, zero.clone()));
        }
    }
    for (ix, val) in pinned {
        let mut r = vec![zero.clone(); 28];
        r[idx3(ix[0], ix[1], ix[2])] = one.clone();
        r[27] = val;
        rows.push(r);
        labels.push(format!("component {}", index_label(&ix)));
    }
    match solve_augmented(&rows) {
        Solution::Unique(x) => Ok(Tensor3 { v: x, variance }),
        Solution::Inconsistent { .. } => Err(TensorError::Inconsistent(
            "given components contradict the cyclic system".to_string(),
        )),
        Solution::Underdetermined { free } => Err(TensorError::NotUnique(
            free.iter().map(|&p| index_label(&[p / 9, (p / 3) % 3, p % 3])).collect(),
        )),
    }
}

/// Entrywise residual of the cyclicity identity.
pub fn cyclicity_residual(t: &Tensor3, q: &Matrix3) -> Tensor3 {
    Tensor3::from_fn(t.variance, |i, j, k| {
        let mut acc = t.get(i, j, k).clone();
        for l in 0..3 {
            let c = match t.variance {
                Variance::Lower => &q.m[l][k],
                Variance::Upper => &q.m[k][l],
            };
            acc = acc - c * t.get(l, i, j);
        }
        acc
    })
}

/// Q with E_{ijk} = Σ_l Q^l_k E_{lij} (lower) or P with F^{ijk} = Σ_l P^k_l F^{lij} (upper).
pub fn cyclic_matrix(t: &Tensor3) -> Result<Matrix3, TensorError> {
    let dom = t.domain().clone();
    let zero = Scalar::zero(&dom);
    // unknowns M[a][b] at 3a+b
    let mut rows = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let mut r = vec![zero.clone(); 10];
                for l in 0..3 {
                    let u = match t.variance {
                        Variance::Lower => 3 * l + k,
                        Variance::Upper => 3 * k + l,
                    };
                    r[u] = t.get(l, i, j).clone();
                }
                r[9] = t.get(i, j, k).clone();
                rows.push(r);
            }
        }
    }
    match solve_augmented(&rows) {
        Solution::Unique(x) => {
            let m = Matrix3::from_fn(|a, b| x[3 * a + b].clone());
            if m.det().is_zero() {
                return Err(TensorError::Singular);
            }
            Ok(m)
        }
        _ => Err(TensorError::CyclicMatrixUndetermined),
    }
}

/// Result of intersecting span{1⊗E^α} with span{E^α⊗1}.
#[derive(Clone, Debug)]
pub struct Intersection {
    pub tensor: Tensor3,
    /// e[i][α] with E = e_{iα}(1^i⊗E^α)
    pub e: Matrix3,
    /// f[α][i] with E = f_{αi}(E^α⊗1^i)
    pub f: Matrix3,
    pub degenerate: bool,
}

/// Solves e_{iα}(1^i⊗E^α) = f_{αi}(E^α⊗1^i). The result is scaled so that its first
/// nonzero entry (lexicographic) equals 1.
pub fn solve_intersection(rel: &RelationFamily) -> Result<Intersection, TensorError> {
    let dom = rel.mats[0].domain().clone();
    let zero = Scalar::zero(&dom);
    // unknowns: e[i][a] at 3i+a, f[a][i] at 9+3a+i
    let mut rows = Vec::new();
    for j in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                let mut r = vec![zero.clone(); 18];
                for a in 0..3 {
                    // (1^i⊗E^a)_{jkl} = δ_ij E^a_{kl}
                    r[3 * j + a] = &r[3 * j + a] + &rel.mats[a].m[k][l];
                    // (E^a⊗1^i)_{jkl} = E^a_{jk} δ_il
                    r[9 + 3 * a + l] = &r[9 + 3 * a + l] - &rel.mats[a].m[j][k];
                }
                rows.push(r);
            }
        }
    }
    let ns = nullspace(&rows, 18, &zero);
    match ns.len() {
        0 => return Err(TensorError::NoIntersection),
        1 => {}
        d => return Err(TensorError::Ambiguous(d)),
    }
    let x = &ns[0];
    let mut e = Matrix3::from_fn(|i, a| x[3 * i + a].clone());
    let mut f = Matrix3::from_fn(|a, i| x[9 + 3 * a + i].clone());
    let mut t = Tensor3::from_fn(Variance::Lower, |j, k, l| {
        let mut acc = Scalar::zero(&dom);
        for a in 0..3 {
            acc = acc + &e.m[j][a] * &rel.mats[a].m[k][l];
        }
        acc
    });
    if let Some((_, lead)) = t.first_nonzero() {
        let s = lead.inv()?;
        t = t.scale(&s);
        e = e.scale(&s);
        f = f.scale(&s);
    }
    let degenerate = e.det().is_zero() || f.det().is_zero();
    Ok(Intersection { tensor: t, e, f, degenerate })
}

/// X^i_j = Σ E_{jmn} F^{mni}.
pub fn char_matrix(e: &Tensor3, f: &Tensor3) -> Matrix3 {
    Matrix3::from_fn(|i, j| {
        let mut acc = Scalar::zero(e.domain());
        for m in 0..3 {
            for n in 0..3 {
                let a = e.get(j, m, n);
                let b = f.get(m, n, i);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc + a * b;
                }
            }
        }
        acc
    })
}

/// κ = E_{ijk} F^{ijk}.
pub fn kappa(e: &Tensor3, f: &Tensor3) -> Scalar {
    e.v.iter().zip(&f.v).fold(Scalar::zero(e.domain()), |acc, (a, b)| {
        if a.is_zero() || b.is_zero() {
            acc
        } else {
            acc + a * b
        }
    })
}

/// A^{ij}_{kl} = E_{klm} X^m_n F^{nij}, row (i,j), column (k,l).
pub fn antisymmetrizer(e: &Tensor3, f: &Tensor3, x: &Matrix3) -> SqMatrix {
    let dom = e.domain().clone();
    // G^{m}_{ij} = X^m_n F^{nij}
    let g: Vec<Scalar> = (0..27)
        .map(|p| {
            let (m, i, j) = (p / 9, (p / 3) % 3, p % 3);
            let mut acc = Scalar::zero(&dom);
            for n in 0..3 {
                if !x.m[m][n].is_zero() && !f.get(n, i, j).is_zero() {
                    acc = acc + &x.m[m][n] * f.get(n, i, j);
                }
            }
            acc
        })
        .collect();
    SqMatrix::from_fn(9, |r, c| {
        let (i, j, k, l) = (r / 3, r % 3, c / 3, c % 3);
        let mut acc = Scalar::zero(&dom);
        for m in 0..3 {
            let a = e.get(k, l, m);
            let b = &g[idx3(m, i, j)];
            if !a.is_zero() && !b.is_zero() {
                acc = acc + a * b;
            }
        }
        acc
    })
}

/// Unique splitting T = α ε + S^m_i ε_{mjk} + ε_{ijn} T^n_k + φ with S, T traceless, φ symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub alpha: Scalar,
    /// s.m[m][i] = S^m_i
    pub s: Matrix3,
    /// t.m[n][k] = T^n_k
    pub t: Matrix3,
    pub phi: Tensor3,
}

pub fn decompose(t: &Tensor3) -> Decomposition {
    let dom = t.domain().clone();
    let sixth = Scalar::from_ratio(&dom, 1, 6);
    let third = Scalar::from_ratio(&dom, 1, 3);
    let phi = Tensor3::from_fn(t.variance, |i, j, k| {
        let s = t.get(i, j, k) + t.get(j, k, i) + t.get(k, i, j) + t.get(j, i, k) + t.get(i, k, j) + t.get(k, j, i);
        &s * &sixth
    });
    let r = t.sub(&phi);
    let eps = Tensor3::epsilon(&dom, t.variance);
    let alpha = &kappa(&eps, &r) * &sixth;
    let r = r.sub(&eps.scale(&alpha));
    let c1 = Matrix3::from_fn(|p, i| {
        let mut acc = Scalar::zero(&dom);
        for j in 0..3 {
            for k in 0..3 {
                let e = levi_civita(p, j, k);
                if e != 0 {
                    acc = acc + Scalar::from_int(&dom, e) * r.get(i, j, k);
                }
            }
        }
        acc
    });
    let c2 = Matrix3::from_fn(|p, k| {
        let mut acc = Scalar::zero(&dom);
        for i in 0..3 {
            for j in 0..3 {
                let e = levi_civita(i, j, p);
                if e != 0 {
                    acc = acc + Scalar::from_int(&dom, e) * r.get(i, j, k);
                }
            }
        }
        acc
    });
    let two = Scalar::from_int(&dom, 2);
    let s = c1.scale(&two).add(&c2).scale(&third);
    let tm = c1.add(&c2.scale(&two)).scale(&third);
    Decomposition { alpha, s, t: tm, phi }
}

pub fn recompose(d: &Decomposition) -> Tensor3 {
    let dom = d.alpha.domain().clone();
    Tensor3::from_fn(d.phi.variance, |i, j, k| {
        let mut acc = d.phi.get(i, j, k).clone();
        let e = levi_civita(i, j, k);
        if e != 0 {
            acc = acc + Scalar::from_int(&dom, e) * &d.alpha;
        }
        for m in 0..3 {
            let a = levi_civita(m, j, k);
            if a != 0 {
                acc = acc + Scalar::from_int(&dom, a) * &d.s.m[m][i];
            }
            let b = levi_civita(i, j, m);
            if b != 0 {
                acc = acc + Scalar::from_int(&dom, b) * &d.t.m[m][k];
            }
        }
        acc
    })
}

/// Plane relation family: first-index slices E^α_{ij} = E_{αij}.
pub fn plane_family(e: &Tensor3) -> RelationFamily {
    RelationFamily { mats: std::array::from_fn(|a| e.first_slice(a)) }
}

/// Relation families normalized so that Σ E^α_{ij} F^{ij}_β = δ^α_β.
/// E^α are the first-index slices of E; F_β are recombined last-index slices of F.
pub fn normalized_families(e: &Tensor3, f: &Tensor3) -> Result<(RelationFamily, RelationFamily), TensorError> {
    let erel = plane_family(e);
    let raw: [Matrix3; 3] = std::array::from_fn(|b| f.last_slice(b));
    let pairing = Matrix3::from_fn(|a, b| pair(&erel.mats[a], &raw[b]));
    let gi = pairing.invert()?;
    let frel = RelationFamily {
        mats: std::array::from_fn(|b| {
            let mut acc = Matrix3::zero(e.domain());
            for c in 0..3 {
                acc = acc.add(&raw[c].scale(&gi.m[c][b]));
            }
            acc
        }),
    };
    Ok((erel, frel))
}

/// Σ_{ij} A_{ij} B^{ij}.
pub fn pair(a: &Matrix3, b: &Matrix3) -> Scalar {
    let mut acc = Scalar::zero(a.domain());
    for i in 0..3 {
        for j in 0..3 {
            if !a.m[i][j].is_zero() && !b.m[i][j].is_zero() {
                acc = acc + &a.m[i][j] * &b.m[i][j];
            }
        }
    }
    acc
}

/// The matrices e, f, g, h relating E, F to their relation families:
/// E_{ijk} = e_{iα}E^α_{jk} = f_{αk}E^α_{ij}, F^{ijk} = g^{iα}F^{jk}_α = F^{ij}_α h^{αk}.
#[derive(Clone, Debug)]
pub struct Frame {
    pub e: Matrix3,
    pub f: Matrix3,
    pub g: Matrix3,
    pub h: Matrix3,
}

pub fn frame(e: &Tensor3, f: &Tensor3, erel: &RelationFamily, frel: &RelationFamily) -> Frame {
    // the pairing is δ, so coefficients are read off by contracting with the dual family
    let em = Matrix3::from_fn(|i, a| pair(&e.first_slice(i), &frel.mats[a]));
    let fm = Matrix3::from_fn(|a, k| pair(&e.last_slice(k), &frel.mats[a]));
    let g = Matrix3::from_fn(|i, a| pair(&erel.mats[a], &f.first_slice(i)));
    let h = Matrix3::from_fn(|a, k| pair(&erel.mats[a], &f.last_slice(k)));
    Frame { e: em, f: fm, g, h }
}

/// M^{αi}_{jβ} = E^α_{jn}F^{ni}_β (row (α,i), column (j,β)) and
/// N^{iα}_{βj} = F^{in}_β E^α_{nj} (row (i,α), column (β,j)).
pub fn build_mn(erel: &RelationFamily, frel: &RelationFamily) -> Result<(SqMatrix, SqMatrix), TensorError> {
    let dom = erel.mats[0].domain().clone();
    for a in 0..3 {
        for b in 0..3 {
            let p = pair(&erel.mats[a], &frel.mats[b]);
            let want = if a == b { Scalar::one(&dom) } else { Scalar::zero(&dom) };
            if p != want {
                return Err(TensorError::NormalizationViolated(a, b));
            }
        }
    }
    let m = SqMatrix::from_fn(9, |r, c| {
        let (a, i, j, b) = (r / 3, r % 3, c / 3, c % 3);
        let mut acc = Scalar::zero(&dom);
        for n in 0..3 {
            acc = acc + &erel.mats[a].m[j][n] * &frel.mats[b].m[n][i];
        }
        acc
    });
    let n = SqMatrix::from_fn(9, |r, c| {
        let (i, a, b, j) = (r / 3, r % 3, c / 3, c % 3);
        let mut acc = Scalar::zero(&dom);
        for n in 0..3 {
            acc = acc + &frel.mats[b].m[i][n] * &erel.mats[a].m[n][j];
        }
        acc
    });
    Ok((m, n))
}

/// Tensor from sparse components given in the catalog label form.
pub fn components_map(pairs: &[(&str, Scalar)]) -> BTreeMap<[usize; 3], Scalar> {
    pairs.iter().map(|(k, v)| (parse_label(k).expect("bad component label"), v.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_scalar, Param};

    fn b_dom() -> Arc<Domain> {
        Domain::new(36, vec![Param::new("u", 1), Param::new("nu", 1)])
    }

    fn s(d: &Arc<Domain>, t: &str) -> Scalar {
        parse_scalar(t, d).unwrap()
    }

    #[test]
    fn b1_completion() {
        let d = b_dom();
        let q = Matrix3::diag(s(&d, "1"), s(&d, "u"), s(&d, "1/u"));
        let comp = components_map(&[("123", s(&d, "1")), ("132", s(&d, "-nu"))]);
        let e = complete_by_cyclicity(&comp, &q, Variance::Lower).unwrap();
        assert_eq!(e.get(2, 0, 1), &s(&d, "u"));
        assert_eq!(e.get(1, 2, 0), &s(&d, "1"));
        assert_eq!(e.get(1, 0, 2), &s(&d, "-nu/u"));
        assert_eq!(e.get(2, 1, 0), &s(&d, "-nu"));
        assert_eq!(e.v.iter().filter(|x| !x.is_zero()).count(), 6);
        assert_eq!(cyclic_matrix(&e).unwrap(), q);
    }

    #[test]
    fn epsilon_is_cyclic() {
        let d = Domain::standard();
        let eps = Tensor3::epsilon(&d, Variance::Lower);
        let comp = components_map(&[("123", s(&d, "1")), ("132", s(&d, "-1"))]);
        let id = Matrix3::identity(&d);
        assert_eq!(complete_by_cyclicity(&comp, &id, Variance::Lower).unwrap(), eps);
        let int = solve_intersection(&plane_family(&eps)).unwrap();
        assert_eq!(int.tensor, eps);
        assert!(!int.degenerate);
    }

    #[test]
    fn degenerate_intersection() {
        let d = Domain::standard();
        let unit = |i: usize, j: usize| {
            Matrix3::from_fn(|a, b| if (a, b) == (i, j) { Scalar::one(&d) } else { Scalar::zero(&d) })
        };
        let rel = RelationFamily { mats: [unit(2, 1), unit(2, 0), unit(1, 0)] };
        let int = solve_intersection(&rel).unwrap();
        assert!(int.degenerate);
        assert!(!int.tensor.get(2, 1, 0).is_zero());
    }

    #[test]
    fn decomposition_of_epsilon() {
        let d = Domain::standard();
        let eps = Tensor3::epsilon(&d, Variance::Lower);
        let dec = decompose(&eps);
        assert!(dec.alpha.is_one());
        assert!(dec.s.is_zero() && dec.t.is_zero() && dec.phi.is_zero());
    }

    #[test]
    fn invert_diag() {
        let d = b_dom();
        let q = Matrix3::diag(s(&d, "1"), s(&d, "u"), s(&d, "1/u"));
        assert_eq!(q.invert().unwrap(), Matrix3::diag(s(&d, "1"), s(&d, "1/u"), s(&d, "u")));
        let j3 = Matrix3::from_fn(|i, j| if j == i || j == i + 1 { Scalar::one(&d) } else { Scalar::zero(&d) });
        assert!(j3.det().is_one());
    }
}
