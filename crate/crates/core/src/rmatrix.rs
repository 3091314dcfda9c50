//! R̂ = 1 − (1+q)A, braid and Hecke checks, twists and automorphisms.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{flip, parse_sq, AutomorphismFamily, Solution, SolutionRecord};
use crate::conditions::tensor_checks;
use crate::linalg::{rank, solve_augmented, Solution as LinSolution};
use crate::report::{unflatten, Check, ConditionReport};
use crate::scalar::{parse_with, Domain, Param, Rat, Scalar, ScalarError};
use crate::tensor::{
    antisymmetrizer, char_matrix, cyclic_matrix, decompose, kappa, tensor_square, Matrix3, SqMatrix, Tensor3,
    TensorError, Variance,
};

#[derive(Debug, Error)]
pub enum RMatrixError {
    #[error("q^2 + q(1 - {0}) + 1 has no root of the searched form in the working field")]
    NonFactorable(String),
    #[error("Z is not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("[R, Z⊗Z] != 0")]
    CommutationViolated,
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug)]
pub struct RMatrix {
    /// Row (i,j) = 3i+j, column (k,l) = 3k+l.
    pub mat: SqMatrix,
    pub q: Scalar,
}

/// Roots of q² + q(1 − t) + 1 = 0 with t = tr(XQ).
///
/// The discriminant is (t−3)(t+1). Roots are searched among ±ζ_N^k·Π pᵢ^{eᵢ}
/// (pᵢ the root indeterminates, |eᵢ| ≤ 2·root order) and, for a rational discriminant,
/// among rationals.
pub fn solve_q(tr_xq: &Scalar) -> Result<(Scalar, Scalar), RMatrixError> {
    let dom = tr_xq.domain().clone();
    let one = Scalar::one(&dom);
    let b = &one - tr_xq;
    let eval = |q: &Scalar| q * q + &b * q + one.clone();
    let finish = |q1: Scalar| -> (Scalar, Scalar) {
        let q2 = q1.inv().expect("nonzero root");
        if q2 == q1 {
            (q1.clone(), q1)
        } else {
            (q1, q2)
        }
    };
    // rational discriminant
    if let Some(d) = (&(&b * &b) - &Scalar::from_int(&dom, 4)).as_cyc().and_then(|c| c.as_rational().cloned()) {
        if let Some(s) = rational_sqrt(&d) {
            let half = Scalar::from_ratio(&dom, 1, 2);
            let q1 = &(&Scalar::from_rat(&dom, s) - &b) * &half;
            if eval(&q1).is_zero() {
                return Ok(finish(q1));
            }
        }
    }
    let n = dom.conductor() as i64;
    let nv = dom.nvars();
    let mut exps: Vec<Vec<i64>> = vec![vec![]];
    for i in 0..nv {
        let r = dom.params()[i].root_order as i64;
        exps = exps
            .into_iter()
            .flat_map(|pre| {
                (-2 * r..=2 * r).map(move |e| {
                    let mut p = pre.clone();
                    p.push(e);
                    p
                })
            })
            .collect();
    }
    for ex in &exps {
        let mut mono = one.clone();
        for (i, &e) in ex.iter().enumerate() {
            let t = Scalar::param_root(&dom, &dom.params()[i].name)?;
            mono = mono * t.pow(e)?;
        }
        for k in 0..n {
            let z = Scalar::root_of_unity(&dom, n as u32, k)?;
            for sign in [1i64, -1] {
                let cand = &(&mono * &z) * &Scalar::from_int(&dom, sign);
                if eval(&cand).is_zero() {
                    return Ok(finish(cand));
                }
            }
        }
    }
    Err(RMatrixError::NonFactorable(tr_xq.render()))
}

fn rational_sqrt(r: &Rat) -> Option<Rat> {
    use num_traits::Signed;
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| Rat::new(sn, sd))
}

/// R̂^{ij}_{kl} = δ^i_k δ^j_l − (1+q) E_{klm} X^m_n F^{nij}.
pub fn build_rmatrix(e: &Tensor3, f: &Tensor3, x: &Matrix3, q: &Scalar) -> RMatrix {
    let a = antisymmetrizer(e, f, x);
    rmatrix_from_projector(&a, q)
}

pub fn rmatrix_from_projector(a: &SqMatrix, q: &Scalar) -> RMatrix {
    let dom = a.domain().clone();
    let c = Scalar::one(&dom) + q;
    RMatrix { mat: SqMatrix::identity(&dom, 9).sub(&a.scale(&c)), q: q.clone() }
}

fn sq_check(name: &str, m: &SqMatrix, dims: &[usize]) -> Check {
    let dims = dims.to_vec();
    Check::residual(name, m.entries(), move |p| unflatten(p, &dims))
}

/// (R̂⊗1)(1⊗R̂)(R̂⊗1) = (1⊗R̂)(R̂⊗1)(1⊗R̂) on the triple tensor power.
pub fn check_ybe(r: &SqMatrix) -> ConditionReport {
    let mut rep = ConditionReport::new("Yang-Baxter");
    rep.push(sq_check("ybe", &ybe_residual(r), &[3, 3, 3, 3, 3, 3]));
    rep
}

pub fn ybe_residual(r: &SqMatrix) -> SqMatrix {
    let dom = r.domain().clone();
    let id = SqMatrix::identity(&dom, 3);
    let r1 = r.kron(&id);
    let r2 = id.kron(r);
    let (lhs, rhs) = rayon::join(|| r1.mul(&r2).mul(&r1), || r2.mul(&r1).mul(&r2));
    lhs.sub(&rhs)
}

/// (R̂−1)(R̂+q) = 0, and R̂² = 1 when q = 1.
pub fn check_hecke(r: &SqMatrix, q: &Scalar) -> ConditionReport {
    let mut rep = ConditionReport::new("Hecke");
    let dom = r.domain().clone();
    let id = SqMatrix::identity(&dom, 9);
    let h = r.sub(&id).mul(&r.add(&id.scale(q)));
    rep.push(sq_check("hecke", &h, &[3, 3, 3, 3]));
    if q.is_one() {
        rep.push(sq_check("involution", &r.mul(r).sub(&id), &[3, 3, 3, 3]));
    }
    rep
}

/// Printed R-matrix of a record, converted to the braid convention.
pub fn appendix_matrix(record: &SolutionRecord, sol: &Solution) -> Result<Option<SqMatrix>, ScalarError> {
    let Some(rows) = &record.appendix_r else { return Ok(None) };
    let printed = parse_sq(rows, 9, &sol.dom, &sol.bindings)?;
    Ok(Some(flip(&sol.dom).mul(&printed)))
}

/// Entrywise equality of R̂ with the printed matrix, and YBE of the printed matrix itself.
pub fn check_appendix(record: &SolutionRecord, sol: &Solution, r: &SqMatrix) -> ConditionReport {
    let mut rep = ConditionReport::new("printed R-matrix");
    match appendix_matrix(record, sol) {
        Ok(None) => rep.push(Check::skipped("appendix_equal", "no printed matrix")),
        Ok(Some(m)) => {
            rep.push(sq_check("appendix_equal", &r.sub(&m), &[3, 3, 3, 3]));
            let mut y = check_ybe(&m);
            y.checks[0].name = "appendix_ybe".into();
            rep.extend(y);
        }
        Err(e) => rep.push(Check::fail("appendix_equal", e.to_string())),
    }
    rep
}

/// Twist E' = E(Z⁻¹⊗1⊗Z), F' = (Z⊗1⊗Z⁻¹)F, X' = Z⁻³X, Q' = Z³Q.
#[derive(Clone, Debug)]
pub struct TwistData {
    pub z: Matrix3,
    /// z^α_β with E^α(Z⊗Z) = z^α_β E^β (last-index slices), when Z is an automorphism.
    pub multiplier: Option<Matrix3>,
}

impl TwistData {
    pub fn new(z: Matrix3) -> Result<TwistData, RMatrixError> {
        z.invert()?;
        Ok(TwistData { z, multiplier: None })
    }

    /// Twist data with the multiplier solved from the solution's E.
    pub fn for_solution(sol: &Solution, z: Matrix3) -> Result<TwistData, RMatrixError> {
        let mut tw = TwistData::new(z)?;
        tw.multiplier = multiplier(&sol.e, &tw.z);
        Ok(tw)
    }
}

/// Coefficients of Zᵀ E^α Z in the slices E^β; `None` outside their span.
fn multiplier(e: &Tensor3, z: &Matrix3) -> Option<Matrix3> {
    let dom = Domain::merge(e.domain(), z.domain()).ok()?;
    let slices: Vec<Matrix3> = (0..3).map(|b| e.last_slice(b).map(|s| s.embed(&dom))).collect();
    let z = z.map(|s| s.embed(&dom));
    let mut out = Matrix3::zero(&dom);
    for (a, ea) in slices.iter().enumerate() {
        let target = z.transpose().mul(ea).mul(&z);
        let aug: Vec<Vec<Scalar>> = (0..9)
            .map(|p| {
                let mut row: Vec<Scalar> = slices.iter().map(|sb| sb.m[p / 3][p % 3].clone()).collect();
                row.push(target.m[p / 3][p % 3].clone());
                row
            })
            .collect();
        match solve_augmented(&aug) {
            LinSolution::Unique(c) => {
                for (b, v) in c.into_iter().enumerate() {
                    out.m[a][b] = v;
                }
            }
            _ => return None,
        }
    }
    Some(out)
}

pub struct Twisted {
    pub e: Tensor3,
    pub f: Tensor3,
    pub x: Matrix3,
    pub q_matrix: Matrix3,
}

pub fn twist_tensors(e: &Tensor3, f: &Tensor3, x: &Matrix3, q: &Matrix3, z: &Matrix3) -> Result<Twisted, RMatrixError> {
    let zi = z.invert()?;
    let dom = z.domain().clone();
    let et = Tensor3::from_fn(Variance::Lower, |i, b, k| {
        let mut acc = Scalar::zero(&dom);
        for a in 0..3 {
            if zi.m[a][i].is_zero() {
                continue;
            }
            for c in 0..3 {
                let v = e.get(a, b, c);
                if !v.is_zero() && !z.m[c][k].is_zero() {
                    acc = acc + v * &zi.m[a][i] * &z.m[c][k];
                }
            }
        }
        acc
    });
    let ft = Tensor3::from_fn(Variance::Upper, |i, j, k| {
        let mut acc = Scalar::zero(&dom);
        for a in 0..3 {
            if z.m[i][a].is_zero() {
                continue;
            }
            for c in 0..3 {
                let v = f.get(a, j, c);
                if !v.is_zero() && !zi.m[k][c].is_zero() {
                    acc = acc + &z.m[i][a] * v * &zi.m[k][c];
                }
            }
        }
        acc
    });
    Ok(Twisted { e: et, f: ft, x: z.pow(-3)?.mul(x), q_matrix: z.pow(3)?.mul(q) })
}

/// Twisted solution; fails unless Z passes [`check_automorphism`].
pub fn twist_solution(sol: &Solution, tw: &TwistData) -> Result<Solution, RMatrixError> {
    let rep = check_automorphism(sol, &tw.z);
    if !rep.passed() {
        let names: Vec<String> = rep.failures().iter().map(|c| c.name.clone()).collect();
        return Err(RMatrixError::NotAutomorphism(names.join(", ")));
    }
    let dom = Domain::merge(&sol.dom, tw.z.domain())?;
    let t = twist_tensors(&sol.e, &sol.f, &sol.x, &sol.q_matrix, &tw.z)?;
    let mut out = sol.clone();
    out.label = format!("{}^Z", sol.label);
    out.dom = dom;
    out.e = t.e;
    out.f = t.f;
    out.x = t.x;
    out.q_matrix = t.q_matrix;
    Ok(out)
}

/// R̂' = (Z⊗1) R̂ (Z⊗1)⁻¹; requires [R̂, Z⊗Z] = 0.
pub fn twist_rmatrix(r: &RMatrix, z: &Matrix3) -> Result<RMatrix, RMatrixError> {
    let zz = tensor_square(z);
    if !r.mat.mul(&zz).sub(&zz.mul(&r.mat)).is_zero() {
        return Err(RMatrixError::CommutationViolated);
    }
    let dom = z.domain().clone();
    let id = SqMatrix::from_fn(3, |i, j| if i == j { Scalar::one(&dom) } else { Scalar::zero(&dom) });
    let lift = SqMatrix::from_fn(3, |i, j| z.m[i][j].clone()).kron(&id);
    let inv = SqMatrix::from_fn(3, |i, j| z.invert().expect("invertible Z").m[i][j].clone()).kron(&id);
    Ok(RMatrix { mat: lift.mul(&r.mat).mul(&inv), q: r.q.clone() })
}

fn mat_check(name: &str, m: &Matrix3) -> Check {
    Check::residual(name, m.m.iter().flatten(), |p| unflatten(p, &[3, 3]))
}

/// Row spaces of {E^α(Z⊗Z)} and {(Z⁻¹⊗Z⁻¹)F_α} agree with the originals, full
/// invariance of E and F under Z⊗Z⊗Z, the decomposition form of the same
/// conditions, and [A, Z⊗Z] = 0.
pub fn check_automorphism(sol: &Solution, z: &Matrix3) -> ConditionReport {
    let mut rep = ConditionReport::new(format!("automorphism of {}", sol.label));
    let zi = match z.invert() {
        Ok(v) => v,
        Err(_) => {
            rep.push(Check::fail("z_invertible", "det Z = 0"));
            return rep;
        }
    };
    let (e, f) = (&sol.e, &sol.f);
    let flat = |m: &Matrix3| m.m.iter().flatten().cloned().collect::<Vec<_>>();
    let erows: Vec<Vec<Scalar>> = (0..3).map(|k| flat(&e.last_slice(k))).collect();
    let moved: Vec<Vec<Scalar>> = (0..3).map(|k| flat(&z.transpose().mul(&e.last_slice(k)).mul(z))).collect();
    let r = rank(&[erows.clone(), moved].concat());
    rep.push(Check::flag("e_row_space", r == rank(&erows), format!("joint rank {r}")));
    let frows: Vec<Vec<Scalar>> = (0..3).map(|k| flat(&f.last_slice(k))).collect();
    let fmoved: Vec<Vec<Scalar>> =
        (0..3).map(|k| flat(&zi.mul(&f.last_slice(k)).mul(&zi.transpose()))).collect();
    let r = rank(&[frows.clone(), fmoved].concat());
    rep.push(Check::flag("f_row_space", r == rank(&frows), format!("joint rank {r}")));

    let tcheck = |name: &str, t: &Tensor3| Check::residual(name, &t.v, |p| unflatten(p, &[3, 3, 3]));
    rep.push(tcheck("e_invariant", &e.transform_all(z).sub(e)));
    rep.push(tcheck("f_invariant", &f.transform_all(z).sub(f)));

    let det = z.det();
    let de = decompose(e);
    let df = decompose(f);
    rep.push(Check::residual("alpha_det", [&(&de.alpha * &(&det - &Scalar::one(&det.domain().clone())))], |_| vec![]));
    rep.push(mat_check("e_s_commutes", &de.s.mul(z).scale(&det).sub(&z.mul(&de.s))));
    rep.push(mat_check("e_t_commutes", &de.t.mul(z).scale(&det).sub(&z.mul(&de.t))));
    let (st, tt) = (df.s.transpose(), df.t.transpose());
    rep.push(mat_check("f_s_commutes", &z.mul(&st).scale(&det).sub(&st.mul(z))));
    rep.push(mat_check("f_t_commutes", &z.mul(&tt).scale(&det).sub(&tt.mul(z))));
    rep.push(tcheck("e_phi_invariant", &de.phi.transform_all(z).sub(&de.phi)));
    rep.push(tcheck("f_phi_invariant", &df.phi.transform_all(z).sub(&df.phi)));

    let a = antisymmetrizer(e, f, &sol.x);
    let zz = tensor_square(z);
    rep.push(sq_check("a_commutes_zz", &a.mul(&zz).sub(&zz.mul(&a)), &[3, 3, 3, 3]));
    rep
}

/// One concrete Z drawn from a catalog automorphism family.
#[derive(Clone, Debug)]
pub struct AutomorphismInstance {
    pub label: String,
    pub z: Matrix3,
}

/// Instances of an automorphism family: each stored sample, plus one symbolic
/// instance where every non-discrete symbol becomes a fresh parameter.
pub fn automorphism_instances(sol: &Solution, fam: &AutomorphismFamily) -> Result<Vec<AutomorphismInstance>, ScalarError> {
    let mut out = Vec::new();
    let build = |dom: &Arc<Domain>, b: &HashMap<String, Scalar>| -> Result<Matrix3, ScalarError> {
        let mut m = Matrix3::zero(dom);
        for i in 0..3 {
            for j in 0..3 {
                m.m[i][j] = parse_with(&fam.z[i][j], dom, b)?;
            }
        }
        Ok(m)
    };
    for s in &fam.samples {
        let mut b = sol.bindings.clone();
        for (k, v) in s {
            b.insert(k.clone(), parse_with(v, &sol.dom, &sol.bindings)?);
        }
        let parts: Vec<String> = s.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push(AutomorphismInstance { label: parts.join(","), z: build(&sol.dom, &b)? });
    }
    let free: Vec<String> = match fam.samples.first() {
        Some(s) => s.keys().filter(|k| !fam.discrete.contains_key(*k)).cloned().collect(),
        None => vec![],
    };
    if !free.is_empty() {
        let extra: Vec<Param> = free.iter().map(|n| Param::new(n, 1)).collect();
        let dom = sol.dom.extend(&extra)?;
        let mut b: HashMap<String, Scalar> = sol.bindings.iter().map(|(k, v)| (k.clone(), v.embed(&dom))).collect();
        let mut parts = vec![];
        for (k, v) in fam.samples.first().unwrap() {
            if fam.discrete.contains_key(k) {
                b.insert(k.clone(), parse_with(v, &dom, &sol.bindings)?);
                parts.push(format!("{k}={v}"));
            }
        }
        parts.push(format!("symbolic {}", free.join(",")));
        out.push(AutomorphismInstance { label: parts.join(","), z: build(&dom, &b)? });
    }
    Ok(out)
}

/// Re-expresses a solution over a larger domain.
pub fn embed_solution(sol: &Solution, dom: &Arc<Domain>) -> Solution {
    let m = |x: &Matrix3| x.map(|s| s.embed(dom));
    let t = |x: &Tensor3| Tensor3 { v: x.v.iter().map(|s| s.embed(dom)).collect(), variance: x.variance };
    Solution {
        label: sol.label.clone(),
        record_id: sol.record_id.clone(),
        dom: dom.clone(),
        x: m(&sol.x),
        q_matrix: m(&sol.q_matrix),
        e: t(&sol.e),
        f: t(&sol.f),
        q: sol.q.embed(dom),
        bindings: sol.bindings.iter().map(|(k, v)| (k.clone(), v.embed(dom))).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistOutcome {
    pub instance: String,
    pub report: ConditionReport,
}

/// Full twist-covariance check for one instance: automorphism conditions, the
/// twisted solution's tensor suite, invariance of tr(XQ) and κ, the X/Q
/// transformation rules, YBE of the twisted R̂ and its agreement with R̂ built
/// from the twisted data.
pub fn check_twist(sol: &Solution, z: &Matrix3) -> ConditionReport {
    let dom = Domain::merge(&sol.dom, z.domain()).expect("compatible domains");
    let sol = embed_solution(sol, &dom);
    let z = z.map(|s| s.embed(&dom));
    let mut rep = check_automorphism(&sol, &z);
    if !rep.passed() {
        return rep;
    }
    let t = match twist_tensors(&sol.e, &sol.f, &sol.x, &sol.q_matrix, &z) {
        Ok(t) => t,
        Err(e) => {
            rep.push(Check::fail("twist", e.to_string()));
            return rep;
        }
    };
    let mut inner = tensor_checks(&t.e, &t.f, &t.x, &t.q_matrix);
    for c in inner.checks.iter_mut() {
        c.name = format!("twisted_{}", c.name);
    }
    rep.extend(inner);
    rep.push(Check::equal("trace_invariant", &t.x.mul(&t.q_matrix).trace(), &sol.x.mul(&sol.q_matrix).trace()));
    rep.push(Check::equal("kappa_invariant", &kappa(&t.e, &t.f), &kappa(&sol.e, &sol.f)));
    match cyclic_matrix(&t.e) {
        Ok(qe) => rep.push(mat_check("q_transform", &qe.sub(&t.q_matrix))),
        Err(e) => rep.push(Check::fail("q_transform", e.to_string())),
    }
    rep.push(mat_check("x_transform", &char_matrix(&t.e, &t.f).sub(&t.x)));
    let r = build_rmatrix(&sol.e, &sol.f, &sol.x, &sol.q);
    match twist_rmatrix(&r, &z) {
        Ok(rt) => {
            let mut y = check_ybe(&rt.mat);
            y.checks[0].name = "twisted_ybe".into();
            rep.extend(y);
            let direct = build_rmatrix(&t.e, &t.f, &t.x, &sol.q);
            rep.push(sq_check("twisted_r_matches", &rt.mat.sub(&direct.mat), &[3, 3, 3, 3]));
        }
        Err(e) => rep.push(Check::fail("twisted_ybe", e.to_string())),
    }
    rep
}

/// Every automorphism instance of a record.
pub fn twist_suite(sol: &Solution, record: &SolutionRecord) -> Vec<TwistOutcome> {
    let mut jobs = Vec::new();
    for (n, fam) in record.automorphisms.iter().enumerate() {
        match automorphism_instances(sol, fam) {
            Ok(insts) => jobs.extend(insts.into_iter().map(|i| (format!("family {} {}", n + 1, i.label), Some(i.z)))),
            Err(e) => jobs.push((format!("family {}: {e}", n + 1), None)),
        }
    }
    jobs.into_par_iter()
        .map(|(label, z)| match z {
            Some(z) => TwistOutcome { report: check_twist(sol, &z), instance: label },
            None => {
                let mut r = ConditionReport::new("twist");
                r.push(Check::fail("instantiate", label.clone()));
                TwistOutcome { instance: label, report: r }
            }
        })
        .collect()
}

/// R̂ of a solution with its catalog q: YBE, Hecke and q-root checks. When YBE fails
/// the Galois-conjugate data (ζ ↦ ζ⁻¹) is tried and the outcome recorded.
pub fn rmatrix_checks(sol: &Solution) -> (ConditionReport, RMatrix) {
    let mut rep = ConditionReport::new(format!("R-matrix of {}", sol.label));
    let t = sol.x.mul(&sol.q_matrix).trace();
    match solve_q(&t) {
        Ok((q1, q2)) => {
            let ok = q1 == sol.q || q2 == sol.q;
            rep.push(Check::flag("q_root", ok, format!("roots {}, {}", q1.render(), q2.render())));
        }
        Err(e) => rep.push(Check::fail("q_root", e.to_string())),
    }
    let r = build_rmatrix(&sol.e, &sol.f, &sol.x, &sol.q);
    let ybe = check_ybe(&r.mat);
    if ybe.passed() {
        rep.extend(ybe);
        rep.extend(check_hecke(&r.mat, &sol.q));
        return (rep, r);
    }
    let c = |m: &Matrix3| m.map(|s| s.conj());
    let ct = |t: &Tensor3| Tensor3 { v: t.v.iter().map(|s| s.conj()).collect(), variance: t.variance };
    let rc = build_rmatrix(&ct(&sol.e), &ct(&sol.f), &c(&sol.x), &sol.q.conj());
    let yc = check_ybe(&rc.mat);
    if yc.passed() {
        rep.push(Check::pass("ybe").with_detail("conjugate branch"));
        rep.flag("conjugate_branch");
        rep.extend(check_hecke(&rc.mat, &sol.q.conj()));
        (rep, rc)
    } else {
        rep.extend(ybe);
        rep.extend(check_hecke(&r.mat, &sol.q));
        (rep, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
    use crate::scalar::parse_scalar;

    fn dom() -> Arc<Domain> {
        Domain::new(3, vec![Param::new("u", 1)])
    }

    #[test]
    fn q_roots() {
        let d = dom();
        let p = |t: &str| parse_scalar(t, &d).unwrap();
        let (a, b) = solve_q(&p("3")).unwrap();
        assert!(a.is_one() && b.is_one());
        let (a, b) = solve_q(&p("0")).unwrap();
        let want = [p("z3"), p("z3^2")];
        assert!(want.contains(&a) && want.contains(&b) && a != b);
        let (a, b) = solve_q(&p("1+u+u^-1")).unwrap();
        let want = [p("u"), p("u^-1")];
        assert!(want.contains(&a) && want.contains(&b) && a != b);
        assert!(solve_q(&p("1/2")).is_err());
    }

    #[test]
    fn trivial_braids() {
        let d = dom();
        assert!(check_ybe(&SqMatrix::identity(&d, 9)).passed());
        assert!(check_ybe(&flip(&d)).passed());
        let e = Tensor3::zero(&d, Variance::Lower);
        let f = Tensor3::zero(&d, Variance::Upper);
        let r = build_rmatrix(&e, &f, &Matrix3::identity(&d), &Scalar::one(&d));
        assert_eq!(r.mat, SqMatrix::identity(&d, 9));
    }

    #[test]
    fn d1_hecke() {
        let c = Catalog::builtin();
        for s in c.get("D1").unwrap().solutions().unwrap() {
            let (rep, _) = rmatrix_checks(&s);
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn c1_rejects_generic_z() {
        let c = Catalog::builtin();
        let s = c.get("C1").unwrap().solution().unwrap();
        let p = |t: &str| s.parse(t).unwrap();
        let z = Matrix3::from_fn(|i, j| if i == j { p("1") } else if i < j { p("2") } else { p("0") });
        assert!(!check_automorphism(&s, &z).passed());
    }

    #[test]
    fn identity_twist_is_neutral() {
        let c = Catalog::builtin();
        let s = c.get("A2").unwrap().solution().unwrap();
        let id = Matrix3::identity(&s.dom);
        let t = twist_solution(&s, &TwistData::new(id.clone()).unwrap()).unwrap();
        assert_eq!(t.e, s.e);
        assert_eq!(t.f, s.f);
        let r = build_rmatrix(&s.e, &s.f, &s.x, &s.q);
        assert_eq!(twist_rmatrix(&r, &id).unwrap().mat, r.mat);
    }
}
