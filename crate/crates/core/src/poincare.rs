//! Graded dimensions of quadratic algebras, substitution systems and ambiguity resolution.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Display;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{Solution, SolutionRecord};
use crate::linalg::{rref, FieldOps};
use crate::modp::{Fp, ModField};
use crate::report::{Check, ConditionReport, Status};
use crate::rmatrix::{twist_solution, TwistData};
use crate::scalar::{CycNumber, Rat, Scalar, ScalarError};
use crate::tensor::{antisymmetrizer, Matrix3, Tensor3};

#[derive(Debug, Error)]
pub enum PoincareError {
    #[error("no admissible specialization found after {0} draws")]
    NoSpecialization(usize),
    #[error("specializations disagree at degree {degree}: {dims:?}")]
    Disagreement { degree: usize, dims: Vec<usize> },
    #[error("relations have rank {got}, expected {want}")]
    RelationRank { got: usize, want: usize },
    #[error("ordering is not a permutation of the generators")]
    BadOrdering,
    #[error("no substitution rule for {word}")]
    NonOrderable { word: String },
    #[error("relation entries are not constant after specialization")]
    NotConstant,
    #[error("step limit exceeded while reducing")]
    StepLimit,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Object {
    Plane,
    Coplane,
    Group,
}

impl Object {
    pub fn generators(self) -> usize {
        match self {
            Object::Group => 9,
            _ => 3,
        }
    }

    /// Number of independent quadratic relations.
    pub fn relation_rank(self) -> usize {
        match self {
            Object::Group => 36,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Object::Plane => "plane",
            Object::Coplane => "coplane",
            Object::Group => "group",
        }
    }
}

/// Commutative dimension C(n+d−1, n).
pub fn classical_dim(d: usize, n: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 0..n {
        acc = acc * (d + i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Plane relations E^α_{ij} x^i x^j (word (i,j) at 3i+j), one per first-index slice.
pub fn plane_relations(e: &Tensor3) -> Vec<Vec<Scalar>> {
    (0..3).map(|a| (0..9).map(|w| e.get(a, w / 3, w % 3).clone()).collect()).collect()
}

/// Coplane relations ξ_i ξ_j F^{ij}_α, one per last-index slice.
pub fn coplane_relations(f: &Tensor3) -> Vec<Vec<Scalar>> {
    (0..3).map(|c| (0..9).map(|w| f.get(w / 3, w % 3, c).clone()).collect()).collect()
}

/// Group relations E_α(A·A)S_{ij} = 0 and S^{ij}(A·A)F_α = 0 with S = 1 − A.
/// Generator A^m_p has index 3m+p; the word (g, h) has index 9g+h.
pub fn group_relations(e: &Tensor3, f: &Tensor3, x: &Matrix3) -> Vec<Vec<Scalar>> {
    let dom = e.domain().clone();
    let a = antisymmetrizer(e, f, x);
    let s = |p: usize, q: usize, i: usize, j: usize| {
        let d = if p == i && q == j { Scalar::one(&dom) } else { Scalar::zero(&dom) };
        d - a.get(3 * p + q, 3 * i + j)
    };
    let mut rows = Vec::with_capacity(54);
    for k in 0..3 {
        let ea = e.last_slice(k);
        for i in 0..3 {
            for j in 0..3 {
                let sl: Vec<Scalar> = (0..9).map(|pq| s(pq / 3, pq % 3, i, j)).collect();
                rows.push(word_row(|m, n| ea.m[m][n].clone(), |p, q| sl[3 * p + q].clone()));
            }
        }
    }
    for k in 0..3 {
        let fa = f.last_slice(k);
        for i in 0..3 {
            for j in 0..3 {
                let sl: Vec<Scalar> = (0..9).map(|mn| s(i, j, mn / 3, mn % 3)).collect();
                rows.push(word_row(|m, n| sl[3 * m + n].clone(), |p, q| fa.m[p][q].clone()));
            }
        }
    }
    rows
}

/// Row over words A^m_p A^n_q with coefficient l(m,n)·r(p,q).
fn word_row(l: impl Fn(usize, usize) -> Scalar, r: impl Fn(usize, usize) -> Scalar) -> Vec<Scalar> {
    let mut row = Vec::with_capacity(81);
    for g in 0..9 {
        for h in 0..9 {
            let (m, p, n, q) = (g / 3, g % 3, h / 3, h % 3);
            let a = l(m, n);
            row.push(if a.is_zero() { a } else { a * r(p, q) });
        }
    }
    row
}

pub fn relations(sol: &Solution, obj: Object) -> Vec<Vec<Scalar>> {
    match obj {
        Object::Plane => plane_relations(&sol.e),
        Object::Coplane => coplane_relations(&sol.f),
        Object::Group => group_relations(&sol.e, &sol.f, &sol.x),
    }
}

/// A basis of the row space in reduced echelon form.
pub fn relation_basis<F: FieldOps>(rows: &[Vec<F>]) -> Vec<Vec<F>> {
    let mut m = rows.to_vec();
    let n = rref(&mut m, None).len();
    m.truncate(n);
    m
}

type SparseRow<F> = Vec<(u32, F)>;

/// Rank by incremental sparse echelon reduction. Positions are column ranks
/// (smaller = more leading).
fn sparse_rank<F: FieldOps>(rows: Vec<SparseRow<F>>) -> usize {
    let mut pivots: HashMap<u32, SparseRow<F>> = HashMap::new();
    for mut row in rows {
        row.sort_by_key(|&(c, _)| c);
        loop {
            let Some((lead, lv)) = row.first().cloned() else { break };
            match pivots.get(&lead) {
                Some(p) => row = axpy(&row, &lv, p),
                None => {
                    let inv = lv.inv();
                    for (_, v) in row.iter_mut() {
                        *v = v.mul(&inv);
                    }
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// row − c·p for sorted sparse rows.
fn axpy<C: Copy + Ord, F: FieldOps>(row: &[(C, F)], c: &F, p: &[(C, F)]) -> Vec<(C, F)> {
    let mut out = Vec::with_capacity(row.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < p.len() {
        let take_row = j == p.len() || (i < row.len() && row[i].0 < p[j].0);
        let take_p = i == row.len() || (j < p.len() && p[j].0 < row[i].0);
        if take_row {
            out.push(row[i].clone());
            i += 1;
        } else if take_p {
            out.push((p[j].0, p[j].1.mul(c).neg()));
            j += 1;
        } else {
            let v = row[i].1.sub(&p[j].1.mul(c));
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Rank of sparse rows split into connected column blocks, blocks in parallel.
fn blocked_rank<F: FieldOps>(rows: Vec<SparseRow<F>>, ncols: usize) -> usize {
    let mut parent: Vec<u32> = (0..ncols as u32).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            p[x as usize] = p[p[x as usize] as usize];
            x = p[x as usize];
        }
        x
    }
    for r in &rows {
        if let Some(&(c0, _)) = r.first() {
            let a = find(&mut parent, c0);
            for &(c, _) in &r[1..] {
                let b = find(&mut parent, c);
                if a != b {
                    parent[b as usize] = a;
                }
            }
        }
    }
    let mut blocks: BTreeMap<u32, Vec<SparseRow<F>>> = BTreeMap::new();
    for r in rows {
        if let Some(&(c0, _)) = r.first() {
            let k = find(&mut parent, c0);
            blocks.entry(k).or_default().push(r);
        }
    }
    let blocks: Vec<Vec<SparseRow<F>>> = blocks.into_values().collect();
    blocks.into_par_iter().map(sparse_rank).sum()
}

/// Column ranks for words of length n: position of each word when words are sorted
/// descending in the degree-lexicographic order induced by `gen_rank`.
fn word_positions(d: usize, n: usize, gen_rank: &[usize]) -> Vec<u32> {
    let total = d.pow(n as u32);
    let key = |w: usize| {
        let mut k = 0usize;
        let mut rest = w;
        let mut digits = vec![0; n];
        for slot in digits.iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        for g in digits {
            k = k * d + gen_rank[g];
        }
        k
    };
    // key is a bijection onto 0..total; descending order puts the largest word first
    (0..total).map(|w| (total - 1 - key(w)) as u32).collect()
}

/// dim of the degree-n component: dⁿ − rank of all shifts V^a ⊗ R ⊗ V^b.
pub fn dimension_at_degree<F: FieldOps>(rels: &[Vec<F>], d: usize, n: usize, gen_rank: &[usize]) -> usize {
    if n < 2 {
        return d.pow(n as u32);
    }
    let basis = relation_basis(rels);
    let pos = word_positions(d, n, gen_rank);
    let mut rows = Vec::new();
    for shift in 0..n - 1 {
        let left = d.pow(shift as u32);
        let right = d.pow((n - 2 - shift) as u32);
        for r in &basis {
            let nz: Vec<(usize, &F)> = r.iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
            for a in 0..left {
                for b in 0..right {
                    rows.push(nz.iter().map(|&(w, v)| (pos[(a * d * d + w) * right + b], v.clone())).collect());
                }
            }
        }
    }
    d.pow(n as u32) - blocked_rank(rows, d.pow(n as u32))
}

/// Reduces `row` against `pivots` in the dense scratch vector `acc` (all zero on
/// entry and exit); stores it as a new pivot when something remains.
fn insert_reduced<F: FieldOps>(pivots: &mut [Option<SparseRow64<F>>], row: &[(u64, F)], acc: &mut [F]) -> bool {
    let Some(&(first, ref v0)) = row.first() else { return false };
    for (p, v) in row {
        acc[*p as usize] = v.clone();
    }
    let zero = v0.zero_like();
    let mut pos = first as usize;
    loop {
        while pos < acc.len() && acc[pos].is_zero() {
            pos += 1;
        }
        if pos == acc.len() {
            return false;
        }
        match &pivots[pos] {
            Some(p) => {
                let c = acc[pos].clone();
                for (q, v) in p {
                    let slot = &mut acc[*q as usize];
                    *slot = slot.sub(&c.mul(v));
                }
            }
            None => {
                let inv = acc[pos].inv();
                let mut out = Vec::new();
                for (q, slot) in acc.iter_mut().enumerate().skip(pos) {
                    if !slot.is_zero() {
                        out.push((q as u64, slot.mul(&inv)));
                        *slot = zero.clone();
                    }
                }
                pivots[pos] = Some(out);
                return true;
            }
        }
    }
}

type SparseRow64<F> = Vec<(u64, F)>;

/// Dimensions for degrees 1..=max_degree from the filtration
/// Iₙ = Iₙ₋₁⊗V + V^{n−2}⊗R, keeping an echelon basis of each Iₙ.
/// Word positions are base-d numbers with digit d−1−rank(g), so the smallest
/// position is the largest word in the deglex order induced by `order`
/// (generators lowest first). An ordering admitting a confluent substitution
/// system keeps the echelon bases sparse.
pub fn incremental_dimensions<F: FieldOps>(rels: &[Vec<F>], order: &[usize], max_degree: usize) -> Vec<usize> {
    let d = order.len();
    let mut dims: Vec<usize> = (1..=max_degree.min(1)).map(|_| d).collect();
    if max_degree < 2 {
        return dims;
    }
    let mut rank = vec![0; d];
    for (r, &g) in order.iter().enumerate() {
        rank[g] = r;
    }
    let digit = |g: usize| (d - 1 - rank[g]) as u64;
    let d64 = d as u64;
    let Some(zero) = rels.iter().flatten().next().map(|v| v.zero_like()) else {
        dims.extend((2..=max_degree).map(|n| d.pow(n as u32)));
        return dims;
    };
    let mut acc = vec![zero.clone(); d * d];
    let mut base: Vec<Option<SparseRow64<F>>> = vec![None; d * d];
    let mut rank = 0;
    for r in rels {
        let mut row: SparseRow64<F> = r
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(w, v)| (digit(w / d) * d64 + digit(w % d), v.clone()))
            .collect();
        row.sort_by_key(|&(c, _)| c);
        rank += insert_reduced(&mut base, &row, &mut acc) as usize;
    }
    dims.push(d * d - rank);
    for n in 3..=max_degree {
        let size = d.pow(n as u32);
        let mut next: Vec<Option<SparseRow64<F>>> = vec![None; size];
        let mut rank = 0;
        for row in base.iter().flatten() {
            for c in 0..d64 {
                let shifted: SparseRow64<F> = row.iter().map(|(p, v)| (p * d64 + c, v.clone())).collect();
                let lead = shifted[0].0 as usize;
                next[lead] = Some(shifted);
                rank += 1;
            }
        }
        // V⊗Iₙ₋₁ contains V^{n−2}⊗R
        let block = d64.pow(n as u32 - 1);
        let mut acc = vec![zero.clone(); size];
        for a in 0..d64 {
            for row in base.iter().flatten() {
                let shifted: SparseRow64<F> = row.iter().map(|(p, v)| (a * block + p, v.clone())).collect();
                rank += insert_reduced(&mut next, &shifted, &mut acc) as usize;
            }
        }
        dims.push(size - rank);
        base = next;
    }
    dims
}

/// Dimensions for degrees 1..=max_degree.
pub fn dimensions<F: FieldOps>(rels: &[Vec<F>], d: usize, max_degree: usize, gen_rank: &[usize]) -> Vec<usize> {
    (1..=max_degree).map(|n| dimension_at_degree(rels, d, n, gen_rank)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankField {
    /// Exact arithmetic in Q(ζ_N) at a rational point.
    Exact,
    /// Arithmetic mod a prime p ≡ 1 (mod N) at a rational point.
    Modular,
    /// Rational functions in the parameters.
    Symbolic,
}

#[derive(Debug, Clone)]
pub struct RankOptions {
    pub seed: u64,
    pub points: usize,
    pub symbolic: bool,
    /// Largest column count dⁿ ranked exactly; larger spans are ranked mod p.
    pub exact_columns: usize,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions { seed: 1, points: 3, symbolic: false, exact_columns: 729 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeDims {
    pub degree: usize,
    pub dim: usize,
    pub classical: usize,
    pub field: RankField,
    pub per_point: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoincareResult {
    pub generators: usize,
    pub points: Vec<BTreeMap<String, String>>,
    pub degrees: Vec<DegreeDims>,
}

impl PoincareResult {
    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.dim).collect()
    }

    pub fn is_classical(&self) -> bool {
        self.degrees.iter().all(|d| d.dim == d.classical)
    }
}

const MAX_DRAWS: usize = 500;

/// Random admissible rational points for the parameters of `rows`: values avoid
/// the excluded list, 0, ±1 and every pole of the entries.
pub fn sample_points(
    rows: &[Vec<Scalar>],
    excluded: &HashMap<String, Vec<Rat>>,
    seed: u64,
    count: usize,
) -> Result<Vec<HashMap<String, Rat>>, PoincareError> {
    let Some(dom) = rows.first().and_then(|r| r.first()).map(|x| x.domain().clone()) else {
        return Ok(vec![HashMap::new()]);
    };
    if dom.nvars() == 0 {
        return Ok(vec![HashMap::new()]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<HashMap<String, Rat>> = Vec::new();
    let trivial = [Rat::from_integer(0.into()), Rat::from_integer(1.into()), Rat::from_integer((-1).into())];
    for _ in 0..MAX_DRAWS {
        if out.len() == count {
            return Ok(out);
        }
        let mut pt = HashMap::new();
        for p in dom.params() {
            let num: i64 = rng.gen_range(1..=89) * if rng.gen_bool(0.5) { 1 } else { -1 };
            let den: i64 = rng.gen_range(11..=97);
            pt.insert(p.name.clone(), Rat::new(num.into(), den.into()));
        }
        let bad_value = pt.iter().any(|(name, v)| {
            trivial.contains(v) || excluded.get(name).is_some_and(|ex| ex.contains(v))
        });
        if bad_value || out.contains(&pt) {
            continue;
        }
        if rows.iter().flatten().all(|x| x.specialize(&pt).is_ok()) {
            out.push(pt);
        }
    }
    Err(PoincareError::NoSpecialization(MAX_DRAWS))
}

pub fn specialize_rows(rows: &[Vec<Scalar>], pt: &HashMap<String, Rat>) -> Result<Vec<Vec<CycNumber>>, PoincareError> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.specialize(pt)?.as_cyc().ok_or(PoincareError::NotConstant)).collect())
        .collect()
}

/// Reduction mod the `start`-th admissible prime (skipping primes dividing a denominator).
fn reduce_rows(rows: &[Vec<CycNumber>], conductor: u32, start: usize) -> Vec<Vec<Fp>> {
    (start..)
        .find_map(|k| {
            let mf = ModField::new(conductor, k);
            rows.iter().map(|r| r.iter().map(|x| mf.cyc(x)).collect::<Option<Vec<_>>>()).collect()
        })
        .expect("some prime avoids every denominator")
}

/// Dimensions of the quadratic algebra with relations `rels` on the generators
/// of `order` (lowest first; it only steers elimination), degrees 1..=max_degree.
pub fn poincare_dimensions(
    rels: &[Vec<Scalar>],
    order: &[usize],
    max_degree: usize,
    excluded: &HashMap<String, Vec<Rat>>,
    opts: &RankOptions,
) -> Result<PoincareResult, PoincareError> {
    let d = order.len();
    if !is_permutation(order) {
        return Err(PoincareError::BadOrdering);
    }
    if opts.symbolic {
        let dims = incremental_dimensions(rels, order, max_degree);
        let degrees = dims
            .iter()
            .enumerate()
            .map(|(k, &dim)| DegreeDims {
                degree: k + 1,
                dim,
                classical: classical_dim(d, k + 1),
                field: RankField::Symbolic,
                per_point: vec![dim],
            })
            .collect();
        return Ok(PoincareResult { generators: d, points: Vec::new(), degrees });
    }
    let conductor = rels.first().and_then(|r| r.first()).map_or(1, |x| x.domain().conductor());
    let pts = sample_points(rels, excluded, opts.seed, opts.points.max(1))?;
    let spec: Vec<Vec<Vec<CycNumber>>> = pts.iter().map(|p| specialize_rows(rels, p)).collect::<Result<_, _>>()?;
    let exact_top = (1..=max_degree).take_while(|&n| d.pow(n as u32) <= opts.exact_columns).last().unwrap_or(0);
    let exact: Vec<Vec<usize>> = spec.par_iter().map(|rows| incremental_dimensions(rows, order, exact_top)).collect();
    let modular: Vec<Vec<usize>> = if max_degree > exact_top {
        // parameter-free spans are still ranked at several primes
        let runs = if pts.len() == 1 { opts.points.max(1) } else { pts.len() };
        (0..runs)
            .into_par_iter()
            .map(|k| incremental_dimensions(&reduce_rows(&spec[k.min(spec.len() - 1)], conductor, k), order, max_degree))
            .collect()
    } else {
        Vec::new()
    };
    let mut degrees = Vec::new();
    for n in 1..=max_degree {
        let (field, per_point): (RankField, Vec<usize>) = if n <= exact_top {
            (RankField::Exact, exact.iter().map(|v| v[n - 1]).collect())
        } else {
            (RankField::Modular, modular.iter().map(|v| v[n - 1]).collect())
        };
        if per_point.iter().any(|&x| x != per_point[0]) {
            return Err(PoincareError::Disagreement { degree: n, dims: per_point });
        }
        degrees.push(DegreeDims { degree: n, dim: per_point[0], classical: classical_dim(d, n), field, per_point });
    }
    let points = pts
        .iter()
        .map(|p| p.iter().map(|(k, v)| (k.clone(), v.to_string())).collect())
        .collect();
    Ok(PoincareResult { generators: d, points, degrees })
}

pub fn default_max_degree(obj: Object) -> usize {
    match obj {
        Object::Group => 4,
        _ => 6,
    }
}

/// Relation rank and graded dimensions of one object of a solution.
pub fn check_poincare(
    sol: &Solution,
    excluded: &HashMap<String, Vec<Rat>>,
    obj: Object,
    order: Option<&[usize]>,
    max_degree: usize,
    opts: &RankOptions,
) -> (ConditionReport, Option<PoincareResult>) {
    let natural: Vec<usize> = (0..obj.generators()).collect();
    let order = order.unwrap_or(&natural);
    let mut rep = ConditionReport::new(format!("{} {}", sol.label, obj.name()));
    let rels = relations(sol, obj);
    let got = relation_basis(&rels).len();
    rep.push(Check::flag(
        &format!("{}_relation_rank", obj.name()),
        got == obj.relation_rank(),
        format!("rank {got}, expected {}", obj.relation_rank()),
    ));
    let name = format!("{}_dimensions", obj.name());
    match poincare_dimensions(&rels, order, max_degree, excluded, opts) {
        Ok(res) => {
            let detail = format!("{:?}", res.dims());
            let c = if res.is_classical() { Check::pass(&name).with_detail(detail) } else { Check::fail(&name, detail) };
            rep.push(c);
            (rep, Some(res))
        }
        Err(e) => {
            rep.push(Check::fail(&name, e.to_string()));
            (rep, None)
        }
    }
}

pub fn is_permutation(order: &[usize]) -> bool {
    let mut seen = vec![false; order.len()];
    order.iter().all(|&g| g < order.len() && !std::mem::replace(&mut seen[g], true))
}

/// Words are stored as generator ranks, so lexicographic order on words is the
/// degree-lexicographic order induced by the generator ordering.
type Word = Vec<u8>;

#[derive(Debug, Clone)]
pub struct RewriteSystem<F> {
    /// Generators lowest first.
    pub order: Vec<usize>,
    /// Anti-ordered pair (ranks) → linear combination of lower pairs.
    pub rules: BTreeMap<(u8, u8), Vec<((u8, u8), F)>>,
    pub ambiguities: Vec<AmbiguityOutcome>,
    names: Vec<String>,
    step_limit: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbiguityOutcome {
    pub word: String,
    pub resolved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<String>,
}

pub type LinComb<F> = BTreeMap<Word, F>;

pub fn generator_names(obj: Object) -> Vec<String> {
    match obj {
        Object::Plane => (1..=3).map(|i| format!("x{i}")).collect(),
        Object::Coplane => (1..=3).map(|i| format!("y{i}")).collect(),
        Object::Group => (0..9).map(|g| format!("A{}{}", g / 3 + 1, g % 3 + 1)).collect(),
    }
}

/// Plane ordering from the catalog's 1-based list; the coplane takes it reversed.
pub fn catalog_ordering(record: &SolutionRecord, obj: Object) -> Option<Vec<usize>> {
    let o = record.orderings.as_ref()?;
    match obj {
        Object::Plane => Some(o.plane.iter().map(|&i| i.wrapping_sub(1)).collect()),
        Object::Coplane => Some(o.plane.iter().rev().map(|&i| i.wrapping_sub(1)).collect()),
        Object::Group => o
            .group
            .iter()
            .map(|s| {
                let b = s.as_bytes();
                (b.len() == 2 && (b'1'..=b'3').contains(&b[0]) && (b'1'..=b'3').contains(&b[1]))
                    .then(|| 3 * (b[0] - b'1') as usize + (b[1] - b'1') as usize)
            })
            .collect(),
    }
}

const DEFAULT_STEP_LIMIT: usize = 1_000_000;

/// Solves the relations for their highest words in the order induced by `order`
/// (generators lowest first). Every anti-ordered pair must become a leading word.
pub fn build_rewrite_system<F: FieldOps>(
    rels: &[Vec<F>],
    order: &[usize],
    names: &[String],
) -> Result<RewriteSystem<F>, PoincareError> {
    let d = order.len();
    if !is_permutation(order) {
        return Err(PoincareError::BadOrdering);
    }
    let mut rank = vec![0u8; d];
    for (r, &g) in order.iter().enumerate() {
        rank[g] = r as u8;
    }
    let word = |c: usize| (rank[c / d], rank[c % d]);
    let mut cols: Vec<usize> = (0..d * d).collect();
    cols.sort_by(|&a, &b| word(b).cmp(&word(a)));
    let mut m = rels.to_vec();
    let pivots = rref(&mut m, Some(&cols));
    let want = d * (d - 1) / 2;
    if pivots.len() != want {
        return Err(PoincareError::RelationRank { got: pivots.len(), want });
    }
    let leads: BTreeSet<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let render_pair = |(a, b): (u8, u8)| format!("{}{}", names[order[a as usize]], names[order[b as usize]]);
    if let Some(&c) = cols.iter().find(|&&c| {
        let (a, b) = word(c);
        a > b && !leads.contains(&c)
    }) {
        return Err(PoincareError::NonOrderable { word: render_pair(word(c)) });
    }
    let mut rules = BTreeMap::new();
    for &(r, c) in &pivots {
        let rhs = cols
            .iter()
            .filter(|&&k| k != c && !m[r][k].is_zero())
            .map(|&k| (word(k), m[r][k].neg()))
            .collect();
        rules.insert(word(c), rhs);
    }
    Ok(RewriteSystem {
        order: order.to_vec(),
        rules,
        ambiguities: Vec::new(),
        names: names.to_vec(),
        step_limit: DEFAULT_STEP_LIMIT,
    })
}

impl<F: FieldOps + Display> RewriteSystem<F> {
    pub fn with_step_limit(mut self, limit: usize) -> Self {
        self.step_limit = limit;
        self
    }

    /// Word in generator indices → word in ranks.
    pub fn ranked(&self, gens: &[usize]) -> Word {
        gens.iter().map(|&g| self.order.iter().position(|&o| o == g).expect("generator") as u8).collect()
    }

    pub fn render_word(&self, w: &[u8]) -> String {
        w.iter().map(|&r| self.names[self.order[r as usize]].as_str()).collect::<Vec<_>>().join("·")
    }

    pub fn render(&self, lc: &LinComb<F>) -> String {
        if lc.is_empty() {
            return "0".into();
        }
        lc.iter().rev().map(|(w, c)| format!("({c})·{}", self.render_word(w))).collect::<Vec<_>>().join(" + ")
    }

    fn redex(&self, w: &[u8]) -> Option<usize> {
        w.windows(2).position(|p| p[0] > p[1])
    }

    /// Leftmost reduction of a linear combination. Largest words are expanded
    /// first; every rewrite yields lexicographically smaller words.
    pub fn normal_form(&self, input: LinComb<F>) -> Result<LinComb<F>, PoincareError> {
        let mut pending = input;
        let mut done: LinComb<F> = BTreeMap::new();
        let mut steps = 0;
        while let Some((w, c)) = pending.pop_last() {
            if c.is_zero() {
                continue;
            }
            let Some(i) = self.redex(&w) else {
                add_term(&mut done, w, c);
                continue;
            };
            steps += 1;
            if steps > self.step_limit {
                return Err(PoincareError::StepLimit);
            }
            for ((a, b), k) in &self.rules[&(w[i], w[i + 1])] {
                let mut v = w.clone();
                v[i] = *a;
                v[i + 1] = *b;
                add_term(&mut pending, v, c.mul(k));
            }
        }
        Ok(done)
    }

    pub fn normal_form_word(&self, w: &[u8], one: &F) -> Result<LinComb<F>, PoincareError> {
        self.normal_form(BTreeMap::from([(w.to_vec(), one.clone())]))
    }

    /// Number of words of length n free of anti-ordered adjacent pairs.
    pub fn normal_monomial_count(&self, n: usize) -> usize {
        let d = self.order.len();
        if n == 0 {
            return 1;
        }
        let mut counts = vec![1usize; d];
        for _ in 1..n {
            counts = (0..d)
                .map(|b| (0..d).filter(|&a| !self.rules.contains_key(&(a as u8, b as u8))).map(|a| counts[a]).sum())
                .collect();
        }
        counts.iter().sum()
    }

    /// Overlap words a·b·c with both a·b and b·c reducible.
    pub fn overlaps(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for &(a, b) in self.rules.keys() {
            for &(b2, c) in self.rules.keys() {
                if b == b2 {
                    out.push(vec![a, b, c]);
                }
            }
        }
        out.sort();
        out.reverse();
        out
    }

    fn resolve(&self, w: &[u8], one: &F) -> Result<(LinComb<F>, LinComb<F>), PoincareError> {
        let step = |i: usize| {
            let mut lc = BTreeMap::new();
            for ((a, b), k) in &self.rules[&(w[i], w[i + 1])] {
                let mut v = w.to_vec();
                v[i] = *a;
                v[i + 1] = *b;
                add_term(&mut lc, v, k.mul(one));
            }
            self.normal_form(lc)
        };
        Ok((step(0)?, step(1)?))
    }
}

fn add_term<F: FieldOps>(lc: &mut LinComb<F>, w: Word, c: F) {
    match lc.get_mut(&w) {
        Some(x) => {
            *x = x.add(&c);
            if x.is_zero() {
                lc.remove(&w);
            }
        }
        None => {
            if !c.is_zero() {
                lc.insert(w, c);
            }
        }
    }
}

/// Resolves every overlap ambiguity both ways; fills `rs.ambiguities`.
pub fn check_confluence<F: FieldOps + Display>(rs: &mut RewriteSystem<F>, one: &F) -> ConditionReport {
    let mut rep = ConditionReport::new("confluence");
    let words = rs.overlaps();
    let outcomes: Vec<AmbiguityOutcome> = words
        .par_iter()
        .map(|w| {
            let word = rs.render_word(w);
            match rs.resolve(w, one) {
                Ok((l, r)) if l == r => AmbiguityOutcome { word, resolved: true, left: None, right: None },
                Ok((l, r)) => AmbiguityOutcome { word, resolved: false, left: Some(rs.render(&l)), right: Some(rs.render(&r)) },
                Err(e) => AmbiguityOutcome { word, resolved: false, left: Some(e.to_string()), right: None },
            }
        })
        .collect();
    let ok = outcomes.iter().filter(|o| o.resolved).count();
    let mut c = Check::flag("ambiguities_resolved", ok == outcomes.len(), "");
    c.detail = Some(format!("{ok}/{} resolved", outcomes.len()));
    if let Some(bad) = outcomes.iter().find(|o| !o.resolved) {
        c.detail = Some(format!(
            "{ok}/{} resolved; {} diverges: {} vs {}",
            outcomes.len(),
            bad.word,
            bad.left.as_deref().unwrap_or(""),
            bad.right.as_deref().unwrap_or("")
        ));
    }
    rep.push(c);
    rs.ambiguities = outcomes;
    rep
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingOutcome {
    pub object: Object,
    pub ordering: Vec<String>,
    pub rules: usize,
    pub ambiguities: Vec<AmbiguityOutcome>,
    pub normal_counts: Vec<usize>,
}

/// Substitution system and confluence for one object under a catalog ordering.
/// Coefficients stay symbolic.
pub fn check_ordering(
    sol: &Solution,
    obj: Object,
    order: &[usize],
    max_degree: usize,
) -> (ConditionReport, Option<OrderingOutcome>) {
    let mut rep = ConditionReport::new(format!("{} {}", sol.label, obj.name()));
    let names = generator_names(obj);
    let rels = relations(sol, obj);
    let tag = obj.name();
    let mut rs = match build_rewrite_system(&rels, order, &names) {
        Ok(rs) => rs,
        Err(e) => {
            rep.push(Check::fail(&format!("{tag}_rewrite_system"), e.to_string()));
            return (rep, None);
        }
    };
    rep.push(Check::pass(&format!("{tag}_rewrite_system")).with_detail(format!("{} rules", rs.rules.len())));
    let one = Scalar::one(&sol.dom);
    let mut conf = check_confluence(&mut rs, &one);
    for c in conf.checks.iter_mut() {
        c.name = format!("{tag}_{}", c.name);
    }
    rep.extend(conf);
    let counts: Vec<usize> = (1..=max_degree).map(|n| rs.normal_monomial_count(n)).collect();
    let outcome = OrderingOutcome {
        object: obj,
        ordering: order.iter().map(|&g| names[g].clone()).collect(),
        rules: rs.rules.len(),
        ambiguities: rs.ambiguities.clone(),
        normal_counts: counts,
    };
    (rep, Some(outcome))
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Tries every generator permutation of the plane. `Expected` when none yields a
/// substitution system and the record carries no ordering.
pub fn check_non_orderable(sol: &Solution, record: &SolutionRecord, obj: Object) -> Check {
    let rels = relations(sol, obj);
    let names = generator_names(obj);
    let mut admissible = Vec::new();
    let mut first_failure = Vec::new();
    for p in permutations(obj.generators()) {
        match build_rewrite_system(&rels, &p, &names) {
            Ok(_) => admissible.push(p),
            Err(e) => first_failure.push(format!("{}: {e}", p.iter().map(|&g| names[g].as_str()).collect::<Vec<_>>().join("<"))),
        }
    }
    let name = format!("{}_non_orderable", obj.name());
    if admissible.is_empty() {
        let detail = format!("no permutation ordering admits a substitution system ({})", first_failure.join("; "));
        if record.orderings.is_none() {
            Check::expected(&name, detail)
        } else {
            Check::fail(&name, detail)
        }
    } else {
        let detail = format!("{} of {} permutations admissible", admissible.len(), first_failure.len() + admissible.len());
        if record.orderings.is_none() {
            Check::fail(&name, detail)
        } else {
            Check::pass(&name).with_detail(detail)
        }
    }
}

/// Substitution systems and confluence for the plane, coplane and group, or
/// non-orderability of plane and coplane when the record has no ordering.
pub fn confluence_checks(sol: &Solution, record: &SolutionRecord, max_degree: usize) -> (ConditionReport, Vec<OrderingOutcome>) {
    let mut rep = ConditionReport::new(format!("{} confluence", sol.label));
    let mut outs = Vec::new();
    if record.orderings.is_none() {
        rep.flags.push("non_orderable".into());
        rep.push(check_non_orderable(sol, record, Object::Plane));
        rep.push(check_non_orderable(sol, record, Object::Coplane));
        return (rep, outs);
    }
    for obj in [Object::Plane, Object::Coplane, Object::Group] {
        let Some(order) = catalog_ordering(record, obj) else {
            rep.push(Check::fail(&format!("{}_rewrite_system", obj.name()), "malformed catalog ordering"));
            continue;
        };
        let md = if obj == Object::Group { max_degree.min(4) } else { max_degree };
        let (r, o) = check_ordering(sol, obj, &order, md);
        rep.extend(r);
        outs.extend(o);
    }
    (rep, outs)
}

/// Graded dimensions of the solution and its twist by `z` agree.
pub fn check_twist_poincare_invariance(
    sol: &Solution,
    tw: &TwistData,
    excluded: &HashMap<String, Vec<Rat>>,
    obj: Object,
    max_degree: usize,
    opts: &RankOptions,
) -> ConditionReport {
    let mut rep = ConditionReport::new(format!("{} twisted {}", sol.label, obj.name()));
    let name = format!("{}_twist_dimensions", obj.name());
    let twisted = match twist_solution(sol, tw) {
        Ok(t) => t,
        Err(e) => {
            rep.push(Check::fail(&name, e.to_string()));
            return rep;
        }
    };
    let order: Vec<usize> = (0..obj.generators()).collect();
    let a = poincare_dimensions(&relations(sol, obj), &order, max_degree, excluded, opts);
    let b = poincare_dimensions(&relations(&twisted, obj), &order, max_degree, excluded, opts);
    rep.push(match (a, b) {
        (Ok(a), Ok(b)) if a.dims() == b.dims() => Check::pass(&name).with_detail(format!("{:?}", a.dims())),
        (Ok(a), Ok(b)) => Check::fail(&name, format!("{:?} vs twisted {:?}", a.dims(), b.dims())),
        (Err(e), _) | (_, Err(e)) => Check::fail(&name, e.to_string()),
    });
    rep
}

/// Whether every check is ok and at least one was not skipped.
pub fn report_ok(rep: &ConditionReport) -> bool {
    rep.checks.iter().all(|c| c.status.is_ok()) && rep.checks.iter().any(|c| c.status != Status::Skipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u64 = 2_147_483_647;

    fn fp(v: i64) -> Fp {
        Fp::new(v.rem_euclid(P as i64) as u64, P)
    }

    /// x_b·x_a − c·x_a·x_b (+ extra) as a row over words x_i·x_j ↦ 3i+j.
    fn skew(a: usize, b: usize, c: i64, extra: &[(usize, i64)]) -> Vec<Fp> {
        let mut r = vec![fp(0); 9];
        r[3 * b + a] = fp(1);
        r[3 * a + b] = fp(-c);
        for &(w, v) in extra {
            r[w] = r[w].add(&fp(v));
        }
        r
    }

    fn names() -> Vec<String> {
        generator_names(Object::Plane)
    }

    #[test]
    fn commuting_plane_rewrites_to_sorted_words() {
        let rels = vec![skew(0, 1, 1, &[]), skew(0, 2, 1, &[]), skew(1, 2, 1, &[])];
        let mut rs = build_rewrite_system(&rels, &[0, 1, 2], &names()).unwrap();
        assert_eq!(rs.rules.len(), 3);
        let nf = rs.normal_form_word(&rs.ranked(&[1, 0]), &fp(1)).unwrap();
        assert_eq!(nf, BTreeMap::from([(vec![0, 1], fp(1))]));
        let rep = check_confluence(&mut rs, &fp(1));
        assert!(rep.passed());
        assert_eq!(rs.ambiguities.len(), 1);
        assert_eq!((1..=6).map(|n| rs.normal_monomial_count(n)).collect::<Vec<_>>(), vec![3, 6, 10, 15, 21, 28]);
    }

    #[test]
    fn corrupted_rules_diverge() {
        // x3x2 → x2x3 + x1x1 breaks the overlap x3x2x1 once x2x1 picks up a factor 2
        let rels = vec![skew(0, 1, 2, &[]), skew(0, 2, 1, &[]), skew(1, 2, 1, &[(0, -1)])];
        let mut rs = build_rewrite_system(&rels, &[0, 1, 2], &names()).unwrap();
        let rep = check_confluence(&mut rs, &fp(1));
        assert!(!rep.passed());
        assert_eq!(rs.ambiguities[0].word, "x3·x2·x1");
        assert_eq!(rs.normal_monomial_count(3), 10);
        assert_eq!(incremental_dimensions(&rels, &[0, 1, 2], 3), vec![3, 6, 9]);
    }

    #[test]
    fn missing_lead_is_non_orderable() {
        let rels = vec![skew(0, 1, 1, &[]), skew(0, 2, 1, &[])];
        match build_rewrite_system(&rels, &[0, 1, 2], &names()) {
            Err(PoincareError::RelationRank { got: 2, want: 3 }) => {}
            other => panic!("{other:?}"),
        }
        // x3x2 + x1x1 is led by x1x1 when x1 is highest, so x2x3 has no rule
        let mut third = vec![fp(0); 9];
        third[3 * 2 + 1] = fp(1);
        third[0] = fp(1);
        let rels = vec![skew(0, 1, 1, &[]), skew(0, 2, 1, &[]), third];
        assert!(build_rewrite_system(&rels, &[0, 1, 2], &names()).is_ok());
        assert!(matches!(
            build_rewrite_system(&rels, &[2, 1, 0], &names()),
            Err(PoincareError::NonOrderable { .. })
        ));
    }

    #[test]
    fn permutations_are_distinct() {
        let ps = permutations(3);
        assert_eq!(ps.len(), 6);
        assert!(ps.iter().all(|p| is_permutation(p)));
        assert_eq!(ps.iter().collect::<BTreeSet<_>>().len(), 6);
    }

    #[test]
    fn classical_counts() {
        assert_eq!((1..=4).map(|n| classical_dim(9, n)).collect::<Vec<_>>(), vec![9, 45, 165, 495]);
        assert_eq!(classical_dim(3, 6), 28);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn incremental_matches_all_shifts(
            coeffs in prop::collection::vec(prop::collection::vec(-3i64..=3, 9), 1..=4),
            perm in 0usize..6,
        ) {
            let rels: Vec<Vec<Fp>> = coeffs.iter().map(|r| r.iter().map(|&v| fp(v)).collect()).collect();
            let order = &permutations(3)[perm];
            let mut gen_rank = vec![0; 3];
            for (r, &g) in order.iter().enumerate() {
                gen_rank[g] = r;
            }
            let fast = incremental_dimensions(&rels, order, 5);
            let slow = dimensions(&rels, 3, 5, &gen_rank);
            prop_assert_eq!(fast, slow);
        }
    }
}
