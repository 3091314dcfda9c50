//! Tensor identities a candidate (E, F, X, Q) must satisfy.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::catalog::{validate_record, CatalogError, SolutionRecord, Tables};
use crate::poincare::{
    catalog_ordering, check_poincare, check_twist_poincare_invariance, confluence_checks, default_max_degree, Object, OrderingOutcome,
    PoincareResult, RankOptions,
};
use crate::report::{unflatten, Check, ConditionReport};
use crate::rmatrix::{automorphism_instances, rmatrix_checks, twist_suite, TwistData};
use crate::scalar::Scalar;
use crate::tensor::{
    antisymmetrizer, build_mn, char_matrix, commutator, cyclic_matrix, frame, kappa, normalized_families, pair,
    solve_intersection, tensor_square, Frame, Matrix3, RelationFamily, SqMatrix, Tensor3,
};

fn mat_check(name: &str, m: &Matrix3) -> Check {
    Check::residual(name, m.m.iter().flatten(), |p| unflatten(p, &[3, 3]))
}

fn sq_check(name: &str, m: &SqMatrix) -> Check {
    Check::residual(name, m.entries(), |p| unflatten(p, &[3, 3, 3, 3]))
}

fn tensor_check(name: &str, t: &Tensor3) -> Check {
    Check::residual(name, &t.v, |p| unflatten(p, &[3, 3, 3]))
}

/// E_{jmn}F^{mni} = X^i_j.
pub fn check_condition_a(e: &Tensor3, f: &Tensor3, x: &Matrix3) -> ConditionReport {
    let mut rep = ConditionReport::new("condition A");
    rep.push(mat_check("condition_a", &char_matrix(e, f).sub(x)));
    rep
}

/// (1+κ) A^{ib}_{aj} A^{cj}_{kd} W^d_b = W^c_a δ^i_k + δ^i_a δ^c_k with W = (XQ)⁻¹.
pub fn check_condition_b(a: &SqMatrix, xq: &Matrix3, kappa: &Scalar) -> ConditionReport {
    let mut rep = ConditionReport::new("condition B");
    let dom = a.domain().clone();
    let s = Scalar::one(&dom) + kappa;
    if s.is_zero() {
        rep.push(Check::skipped("condition_b", "1+kappa = 0"));
        rep.flag("kappa_minus_one");
        return rep;
    }
    let w = match xq.invert() {
        Ok(w) => w,
        Err(_) => {
            rep.push(Check::fail("condition_b", "XQ is singular"));
            return rep;
        }
    };
    let at = |i: usize, j: usize, k: usize, l: usize| a.get(3 * i + j, 3 * k + l);
    // B[c,j,k,b] = Σ_d A^{cj}_{kd} W^d_b
    let mut bt = vec![Scalar::zero(&dom); 81];
    for c in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for b in 0..3 {
                    let mut acc = Scalar::zero(&dom);
                    for d in 0..3 {
                        let x = at(c, j, k, d);
                        if !x.is_zero() && !w.m[d][b].is_zero() {
                            acc = acc + x * &w.m[d][b];
                        }
                    }
                    bt[27 * c + 9 * j + 3 * k + b] = acc;
                }
            }
        }
    }
    let mut res = Vec::with_capacity(81);
    for i in 0..3 {
        for c in 0..3 {
            for a_ in 0..3 {
                for k in 0..3 {
                    let mut acc = Scalar::zero(&dom);
                    for b in 0..3 {
                        for j in 0..3 {
                            let x = at(i, b, a_, j);
                            let y = &bt[27 * c + 9 * j + 3 * k + b];
                            if !x.is_zero() && !y.is_zero() {
                                acc = acc + x * y;
                            }
                        }
                    }
                    let mut r = &s * &acc;
                    if i == k {
                        r = r - &w.m[c][a_];
                    }
                    if i == a_ && c == k {
                        r = r - Scalar::one(&dom);
                    }
                    res.push(r);
                }
            }
        }
    }
    rep.push(Check::residual("condition_b", &res, |p| unflatten(p, &[3, 3, 3, 3])));
    rep
}

/// [P,Q] = [X,Q] = [Y,Q] = [X,P] = [Y,P] = 0.
pub fn check_characteristic_commutes(p: &Matrix3, q: &Matrix3, x: &Matrix3, y: &Matrix3) -> ConditionReport {
    let mut rep = ConditionReport::new("characteristic matrices commute");
    rep.push(mat_check("commute_pq", &commutator(p, q)));
    rep.push(mat_check("commute_xq", &commutator(x, q)));
    rep.push(mat_check("commute_yq", &commutator(y, q)));
    rep.push(mat_check("commute_xp", &commutator(x, p)));
    rep.push(mat_check("commute_yp", &commutator(y, p)));
    rep
}

/// E(Y⊗Y⊗Y) = E and (X⊗X⊗X)F = F, plus the frame form
/// E^α_{mn} g^{nβ} Y^m_k = h^{αl} E^β_{lk}.
pub fn check_ef_automorphism(
    e: &Tensor3,
    f: &Tensor3,
    x: &Matrix3,
    y: &Matrix3,
    erel: &RelationFamily,
    fr: &Frame,
) -> ConditionReport {
    let mut rep = ConditionReport::new("E, F invariance");
    rep.push(tensor_check("e_invariant", &e.transform_all(y).sub(e)));
    rep.push(tensor_check("f_invariant", &f.transform_all(x).sub(f)));
    let dom = e.domain().clone();
    let mut res = Vec::with_capacity(27);
    for a in 0..3 {
        for b in 0..3 {
            for k in 0..3 {
                let mut lhs = Scalar::zero(&dom);
                for m in 0..3 {
                    for n in 0..3 {
                        let v = &erel.mats[a].m[m][n];
                        if !v.is_zero() {
                            lhs = lhs + v * &fr.g.m[n][b] * &y.m[m][k];
                        }
                    }
                }
                let mut rhs = Scalar::zero(&dom);
                for l in 0..3 {
                    rhs = rhs + &fr.h.m[a][l] * &erel.mats[b].m[l][k];
                }
                res.push(lhs - rhs);
            }
        }
    }
    rep.push(Check::residual("frame_invariance", &res, |p| unflatten(p, &[3, 3, 3])));
    rep
}

/// A² = A, tr A = 3, [A, X⊗X] = [A, Q⊗Q] = 0.
pub fn check_projector(a: &SqMatrix, x: &Matrix3, q: &Matrix3) -> ConditionReport {
    let mut rep = ConditionReport::new("antisymmetrizer");
    let dom = a.domain().clone();
    rep.push(sq_check("projector_idempotent", &a.mul(a).sub(a)));
    rep.push(Check::equal("projector_trace", &a.trace(), &Scalar::from_int(&dom, 3)));
    let xx = tensor_square(x);
    rep.push(sq_check("projector_commutes_xx", &a.mul(&xx).sub(&xx.mul(a))));
    let qq = tensor_square(q);
    rep.push(sq_check("projector_commutes_qq", &a.mul(&qq).sub(&qq.mul(a))));
    rep
}

/// MN = α(1⊗1 + h⊗f), NM = α(1⊗1 + g⊗e), fM = e, Mg = h, eN = f, Nh = g with α = 1/(1+κ).
pub fn check_mn_structure(m: &SqMatrix, n: &SqMatrix, fr: &Frame, kappa: &Scalar) -> ConditionReport {
    let mut rep = ConditionReport::new("M, N structure");
    let dom = m.domain().clone();
    let s = Scalar::one(&dom) + kappa;
    let Ok(alpha) = s.inv() else {
        rep.push(Check::skipped("mn_product", "1+kappa = 0"));
        rep.flag("kappa_minus_one");
        return rep;
    };
    let delta = |a: usize, b: usize| if a == b { Scalar::one(&dom) } else { Scalar::zero(&dom) };
    let mn_want = SqMatrix::from_fn(9, |r, c| {
        let (a, i, b, j) = (r / 3, r % 3, c / 3, c % 3);
        &alpha * &(delta(a, b) * delta(i, j) + &fr.h.m[a][i] * &fr.f.m[b][j])
    });
    rep.push(sq_check("mn_product", &m.mul(n).sub(&mn_want)));
    let nm_want = SqMatrix::from_fn(9, |r, c| {
        let (i, a, j, b) = (r / 3, r % 3, c / 3, c % 3);
        &alpha * &(delta(a, b) * delta(i, j) + &fr.g.m[i][a] * &fr.e.m[j][b])
    });
    rep.push(sq_check("nm_product", &n.mul(m).sub(&nm_want)));
    let row = |v: &Matrix3, t: &SqMatrix| -> Matrix3 {
        // (vT)_{c} = Σ_r v_r T[r][c], v flattened row-major
        Matrix3::from_fn(|c0, c1| {
            let c = 3 * c0 + c1;
            let mut acc = Scalar::zero(&dom);
            for r in 0..9 {
                let x = &v.m[r / 3][r % 3];
                if !x.is_zero() && !t.get(r, c).is_zero() {
                    acc = acc + x * t.get(r, c);
                }
            }
            acc
        })
    };
    let col = |t: &SqMatrix, v: &Matrix3| -> Matrix3 {
        Matrix3::from_fn(|r0, r1| {
            let r = 3 * r0 + r1;
            let mut acc = Scalar::zero(&dom);
            for c in 0..9 {
                let x = &v.m[c / 3][c % 3];
                if !x.is_zero() && !t.get(r, c).is_zero() {
                    acc = acc + t.get(r, c) * x;
                }
            }
            acc
        })
    };
    rep.push(mat_check("f_m_is_e", &row(&fr.f, m).sub(&fr.e)));
    rep.push(mat_check("m_g_is_h", &col(m, &fr.g).sub(&fr.h)));
    rep.push(mat_check("e_n_is_f", &row(&fr.e, n).sub(&fr.f)));
    rep.push(mat_check("n_h_is_g", &col(n, &fr.h).sub(&fr.g)));
    rep
}

/// Everything derivable from one quadruple without R-matrix or series work.
#[derive(Clone, Debug)]
pub struct Derived {
    pub p: Matrix3,
    pub y: Matrix3,
    pub kappa: Scalar,
    pub a: SqMatrix,
    pub erel: RelationFamily,
    pub frel: RelationFamily,
    pub frame: Frame,
    pub m: SqMatrix,
    pub n: SqMatrix,
}

pub fn derive(e: &Tensor3, f: &Tensor3, x: &Matrix3, q: &Matrix3) -> Result<Derived, crate::tensor::TensorError> {
    let (erel, frel) = normalized_families(e, f)?;
    let fr = frame(e, f, &erel, &frel);
    let y = fr.g.mul(&fr.f);
    let (m, n) = build_mn(&erel, &frel)?;
    Ok(Derived {
        p: x.mul(x).mul(q),
        y,
        kappa: kappa(e, f),
        a: antisymmetrizer(e, f, x),
        erel,
        frel,
        frame: fr,
        m,
        n,
    })
}

/// Structural checks: cyclicity matrices, family normalization, the intersection
/// characterization of E, and the frame relations X = (eh)ᵀ, XY = 1, XQ = PY.
pub fn check_structure(e: &Tensor3, f: &Tensor3, x: &Matrix3, q: &Matrix3, d: &Derived) -> ConditionReport {
    let mut rep = ConditionReport::new("structure");
    let dom = e.domain().clone();
    match cyclic_matrix(e) {
        Ok(qe) => rep.push(mat_check("cyclic_q", &qe.sub(q))),
        Err(err) => rep.push(Check::fail("cyclic_q", err.to_string())),
    }
    match cyclic_matrix(f) {
        Ok(pf) => rep.push(mat_check("cyclic_p", &pf.sub(&d.p))),
        Err(err) => rep.push(Check::fail("cyclic_p", err.to_string())),
    }
    let norm = Matrix3::from_fn(|a, b| {
        let p = pair(&d.erel.mats[a], &d.frel.mats[b]);
        if a == b {
            p - Scalar::one(&dom)
        } else {
            p
        }
    });
    rep.push(mat_check("normalization", &norm));
    match solve_intersection(&d.erel) {
        Ok(int) => {
            let lead = e.first_nonzero().map(|(_, v)| v).unwrap_or_else(|| Scalar::one(&dom));
            let scaled = e.scale(&lead.inv().unwrap_or_else(|_| Scalar::one(&dom)));
            rep.push(tensor_check("intersection", &int.tensor.sub(&scaled)));
            if int.degenerate {
                rep.flag("degenerate_frame");
            }
        }
        Err(err) => rep.push(Check::fail("intersection", err.to_string())),
    }
    let fr = &d.frame;
    let xf = Matrix3::from_fn(|i, j| {
        let mut acc = Scalar::zero(&dom);
        for a in 0..3 {
            acc = acc + &fr.e.m[j][a] * &fr.h.m[a][i];
        }
        acc
    });
    rep.push(mat_check("x_from_frame", &xf.sub(x)));
    rep.push(mat_check("xy_identity", &x.mul(&d.y).sub(&Matrix3::identity(&dom))));
    rep.push(mat_check("xq_is_py", &x.mul(q).sub(&d.p.mul(&d.y))));
    if d.kappa.is_zero() {
        rep.flag("kappa_zero");
    }
    rep
}

/// All tensor-level checks, in a fixed order.
pub fn tensor_checks(e: &Tensor3, f: &Tensor3, x: &Matrix3, q: &Matrix3) -> ConditionReport {
    let mut rep = ConditionReport::new("tensor conditions");
    let d = match derive(e, f, x, q) {
        Ok(d) => d,
        Err(err) => {
            rep.push(Check::fail("derive", err.to_string()));
            rep.extend(check_condition_a(e, f, x));
            return rep;
        }
    };
    let xq = x.mul(q);
    let parts: Vec<ConditionReport> = {
        use rayon::prelude::*;
        let jobs: Vec<Box<dyn Fn() -> ConditionReport + Sync + Send>> = vec![
            Box::new(|| check_structure(e, f, x, q, &d)),
            Box::new(|| check_condition_a(e, f, x)),
            Box::new(|| check_condition_b(&d.a, &xq, &d.kappa)),
            Box::new(|| check_characteristic_commutes(&d.p, q, x, &d.y)),
            Box::new(|| check_ef_automorphism(e, f, x, &d.y, &d.erel, &d.frame)),
            Box::new(|| check_projector(&d.a, x, q)),
            Box::new(|| check_mn_structure(&d.m, &d.n, &d.frame, &d.kappa)),
        ];
        jobs.par_iter().map(|j| j()).collect()
    };
    for p in parts {
        rep.extend(p);
    }
    rep
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Depth {
    Tensor,
    Poincare,
    Confluence,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub depth: Depth,
    /// Overrides the per-object degree caps (planes 6, group 4).
    pub max_degree: Option<usize>,
    pub rank: RankOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { depth: Depth::Tensor, max_degree: None, rank: RankOptions::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionVerdict {
    pub label: String,
    pub sections: Vec<ConditionReport>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub poincare: BTreeMap<String, PoincareResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub orderings: Vec<OrderingOutcome>,
}

impl SolutionVerdict {
    pub fn passed(&self) -> bool {
        self.sections.iter().all(|r| r.passed())
    }
}

/// Every check for each discrete variant of a record, up to `opts.depth`.
pub fn verify_solution(
    record: &SolutionRecord,
    tables: &Tables,
    opts: &VerifyOptions,
) -> Result<Vec<SolutionVerdict>, CatalogError> {
    let excluded = record.excluded()?;
    let validation = validate_record(record, tables);
    let mut out = Vec::new();
    for sol in record.solutions()? {
        let mut sections = Vec::new();
        let mut tensor = tensor_checks(&sol.e, &sol.f, &sol.x, &sol.q_matrix);
        tensor.subject = format!("{} tensor conditions", sol.label);
        sections.push(tensor);
        sections.push(validation.clone());
        sections.push(rmatrix_checks(&sol).0);
        for t in twist_suite(&sol, record) {
            let mut rep = t.report;
            rep.subject = format!("{} twist {}", sol.label, t.instance);
            sections.push(rep);
        }
        let mut poincare = BTreeMap::new();
        let mut orderings = Vec::new();
        if opts.depth >= Depth::Poincare {
            for obj in [Object::Plane, Object::Coplane, Object::Group] {
                let md = opts.max_degree.unwrap_or(default_max_degree(obj));
                let order = catalog_ordering(record, obj);
                let (rep, res) = check_poincare(&sol, &excluded, obj, order.as_deref(), md, &opts.rank);
                sections.push(rep);
                if let Some(res) = res {
                    poincare.insert(obj.name().to_string(), res);
                }
            }
            for fam in &record.automorphisms {
                for inst in automorphism_instances(&sol, fam).map_err(|e| CatalogError::Invalid {
                    id: record.id.clone(),
                    field: "automorphisms".into(),
                    msg: e.to_string(),
                })? {
                    let Ok(tw) = TwistData::for_solution(&sol, inst.z) else { continue };
                    for (obj, cap) in [(Object::Plane, 4), (Object::Coplane, 4), (Object::Group, 3)] {
                        let md = opts.max_degree.unwrap_or(cap).min(cap);
                        let mut rep = check_twist_poincare_invariance(&sol, &tw, &excluded, obj, md, &opts.rank);
                        rep.subject = format!("{} twist {} {}", sol.label, inst.label, obj.name());
                        sections.push(rep);
                    }
                }
            }
        }
        if opts.depth >= Depth::Confluence {
            let md = opts.max_degree.unwrap_or(4);
            let (rep, outs) = confluence_checks(&sol, record, md);
            sections.push(rep);
            orderings = outs;
        }
        out.push(SolutionVerdict { label: sol.label.clone(), sections, poincare, orderings });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;

    #[test]
    fn b1_passes() {
        let c = Catalog::builtin();
        let s = c.get("B1").unwrap().solution().unwrap();
        let rep = tensor_checks(&s.e, &s.f, &s.x, &s.q_matrix);
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn scaled_f_fails_a() {
        let c = Catalog::builtin();
        let s = c.get("B1").unwrap().solution().unwrap();
        let two = Scalar::from_int(&s.dom, 2);
        let rep = check_condition_a(&s.e, &s.f.scale(&two), &s.x);
        let ch = rep.get("condition_a").unwrap();
        assert!(!ch.status.is_ok());
        assert!(ch.witness.is_some());
    }

    #[test]
    fn identity_projector_trace_fails() {
        let c = Catalog::builtin();
        let s = c.get("G2").unwrap().solution().unwrap();
        let id = SqMatrix::identity(&s.dom, 9);
        let rep = check_projector(&id, &s.x, &s.q_matrix);
        assert!(!rep.get("projector_trace").unwrap().status.is_ok());
        assert!(rep.get("projector_idempotent").unwrap().status.is_ok());
    }
}
