//! Linear-logic connectives over spaces and the structural matrices of the model,
//! with the exponential truncated at a fixed multiset degree.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

use crate::families::{
    mat_apply, mat_compose, multisets_upto, tensor_mat, tensor_vec, Coh, FamilyError, Label, Matrix, Multiset,
    Vector, Web,
};
use crate::laws::{everywhere, law_mat, law_vec, member_any, sample_morphism, sample_vec, then};
pub use crate::laws::{default_bases, Setup};
use crate::pcr::{Carrier, Partial, Scalar};
use crate::report::{Case, LawReport, SuiteReport};
use crate::spaces::{member_hom, SpaceError, SpaceRepr};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LlError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("web {0} is not {1}")]
    Shape(String, &'static str),
}

/// Truncation bounds: multiset degree for !, index bound for the summation object.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncCfg {
    pub bang_degree: usize,
    pub s_bound: usize,
}

impl Default for TruncCfg {
    fn default() -> Self {
        TruncCfg { bang_degree: 2, s_bound: 3 }
    }
}

/// Deliberate corruption of one structural matrix, to show the suites are not vacuous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    Dig,
    Seely2,
    Coalgebra,
}

/// Flip the entry at (a, b): a nonzero entry becomes 0, a zero entry becomes 1.
pub fn flip_entry(m: &mut Matrix, a: Label, b: Label) {
    let v = if m.get(&a, &b).is_zero() { m.carrier.one() } else { m.carrier.zero() };
    m.set(a, b, v);
}

pub fn bag(l: &Label) -> Option<&Multiset> {
    l.as_bag()
}

fn degree(l: &Label) -> usize {
    l.as_bag().map_or(0, Multiset::degree)
}

/// Σ of the inner degrees of a multiset of multisets.
pub fn total_degree(l: &Label) -> usize {
    l.as_bag().map_or(0, |m| m.items().iter().map(degree).sum())
}

fn bang_parts(w: &Web) -> Result<(&Arc<Web>, usize), LlError> {
    match w {
        Web::Bang { base, degree, .. } => Ok((base, *degree as usize)),
        _ => Err(LlError::Shape(w.to_string(), "an exponential web")),
    }
}

fn pair_parts(w: &Web) -> Result<(&Arc<Web>, &Arc<Web>), LlError> {
    w.pair_parts().ok_or_else(|| LlError::Shape(w.to_string(), "a pair web"))
}

pub fn bang_web(base: &Arc<Web>, d: usize, clique: Option<Arc<Coh>>) -> Arc<Web> {
    Arc::new(Web::Bang { base: base.clone(), degree: d as u32, clique })
}

/// (x^!)_m = Π_{a ∈ m} x_a on the multisets of `web` (an exponential over x's web).
pub fn promote(x: &Vector, web: &Arc<Web>) -> Vector {
    let d = web.bang_degree().expect("exponential web");
    let c = x.carrier;
    let support: Vec<Label> = x.support().cloned().collect();
    let mut out = BTreeMap::new();
    for m in multisets_upto(&support, d) {
        let l = Label::Bag(m);
        if !web.contains(&l) {
            continue;
        }
        let v = l.as_bag().unwrap().items().iter().fold(c.one(), |acc, a| c.mul(&acc, &x.get(a)));
        out.insert(l, v);
    }
    Vector::from_map(web, c, out)
}

/// Distinct orderings of a sorted sequence.
pub fn distinct_orderings(items: &[Label]) -> Vec<Vec<Label>> {
    let mut v = items.to_vec();
    v.sort();
    let mut out = vec![v.clone()];
    // lexicographic successor
    loop {
        let n = v.len();
        if n < 2 {
            break;
        }
        let mut i = n - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        out.push(v.clone());
    }
    out
}

/// (!s)_{m,[b1..bn]} = Σ over orderings (a1..an) of m of Π s_{ai,bi}, the b's in canonical order.
/// `rows` restricts the computed rows (needed when the domain web is too large to list).
pub fn bang_mat(
    s: &Matrix,
    dom: &Arc<Web>,
    cod: &Arc<Web>,
    rows: Option<&BTreeSet<Label>>,
) -> Result<Partial<Matrix>, LlError> {
    let (dbase, _) = bang_parts(dom)?;
    let (cbase, _) = bang_parts(cod)?;
    if **dbase != *s.dom || **cbase != *s.cod {
        return Err(FamilyError::WebMismatch(s.dom.to_string(), dbase.to_string()).into());
    }
    let c = s.carrier;
    let all;
    let rows: Box<dyn Iterator<Item = &Label>> = match rows {
        Some(r) => Box::new(r.iter()),
        None => {
            all = dom.labels();
            Box::new(all.iter())
        }
    };
    let mut entries = BTreeMap::new();
    for m in rows {
        let Some(ms) = m.as_bag() else { return Err(LlError::Shape(m.to_string(), "a multiset")) };
        let mut acc: BTreeMap<Label, Scalar> = BTreeMap::new();
        for order in distinct_orderings(ms.items()) {
            let rowsv: Vec<Vec<(&Label, &Scalar)>> = order.iter().map(|a| s.row(a).collect()).collect();
            let mut undefined = None;
            fill(&rowsv, 0, None, &mut Vec::new(), c.one(), c, &mut |bs, v| {
                let p = Label::Bag(Multiset::new(bs.to_vec()));
                if !cod.contains(&p) {
                    return;
                }
                let slot = acc.entry(p.clone()).or_insert_with(|| c.zero());
                match c.add(slot, &v) {
                    Some(t) => *slot = t,
                    None => undefined = Some(p),
                }
            });
            if let Some(p) = undefined {
                return Ok(Partial::undefined(format!("({m},{p})")));
            }
        }
        for (p, v) in acc {
            entries.insert((m.clone(), p), v);
        }
    }
    Ok(Partial::Defined(Matrix::from_map(dom, cod, c, entries)))
}

fn fill(
    rows: &[Vec<(&Label, &Scalar)>],
    i: usize,
    lower: Option<&Label>,
    chosen: &mut Vec<Label>,
    acc: Scalar,
    c: Carrier,
    emit: &mut dyn FnMut(&[Label], Scalar),
) {
    if i == rows.len() {
        emit(chosen, acc);
        return;
    }
    for (b, v) in &rows[i] {
        if lower.is_some_and(|l| *b < l) {
            continue;
        }
        chosen.push((*b).clone());
        let next = c.mul(&acc, v);
        let last = chosen.last().cloned();
        fill(rows, i + 1, last.as_ref(), chosen, next, c, emit);
        chosen.pop();
    }
}

/// λ: 1 ⊗ X ⊸ X.
pub fn lambda(x: &Arc<Web>, c: Carrier) -> Matrix {
    let dom = Web::pair(&Arc::new(Web::Unit), x);
    Matrix::kronecker(&dom, x, c, x.labels().into_iter().map(|a| (Label::pair(Label::Star, a.clone()), a)))
}

/// ρ: X ⊗ 1 ⊸ X.
pub fn rho(x: &Arc<Web>, c: Carrier) -> Matrix {
    let dom = Web::pair(x, &Arc::new(Web::Unit));
    Matrix::kronecker(&dom, x, c, x.labels().into_iter().map(|a| (Label::pair(a.clone(), Label::Star), a)))
}

/// α: (X ⊗ Y) ⊗ Z ⊸ X ⊗ (Y ⊗ Z).
pub fn alpha(x: &Arc<Web>, y: &Arc<Web>, z: &Arc<Web>, c: Carrier) -> Matrix {
    let dom = Web::pair(&Web::pair(x, y), z);
    let cod = Web::pair(x, &Web::pair(y, z));
    let ones = dom.labels().into_iter().map(|l| {
        let (ab, cc) = l.as_pair().unwrap();
        let (a, b) = ab.as_pair().unwrap();
        let r = Label::pair(a.clone(), Label::pair(b.clone(), cc.clone()));
        (l, r)
    });
    Matrix::kronecker(&dom, &cod, c, ones.collect::<Vec<_>>())
}

/// σ: X ⊗ Y ⊸ Y ⊗ X.
pub fn sigma(x: &Arc<Web>, y: &Arc<Web>, c: Carrier) -> Matrix {
    let dom = Web::pair(x, y);
    let cod = Web::pair(y, x);
    let ones = dom.labels().into_iter().map(|l| {
        let (a, b) = l.as_pair().unwrap();
        let r = Label::pair(b.clone(), a.clone());
        (l, r)
    });
    Matrix::kronecker(&dom, &cod, c, ones.collect::<Vec<_>>())
}

/// ev: (X ⊸ Y) ⊗ X ⊸ Y, ev_{((a,b),a'),b'} = δ_{aa'} δ_{bb'}.
pub fn ev(x: &Arc<Web>, y: &Arc<Web>, c: Carrier) -> Matrix {
    let arrow = Web::pair(x, y);
    let dom = Web::pair(&arrow, x);
    let ones = arrow.labels().into_iter().map(|ab| {
        let (a, b) = ab.as_pair().unwrap();
        let (a, b) = (a.clone(), b.clone());
        (Label::pair(ab, a), b)
    });
    Matrix::kronecker(&dom, y, c, ones.collect::<Vec<_>>())
}

/// cur(s)_{c,(a,b)} = s_{(c,a),b} for s: Z ⊗ X ⊸ Y; pure reshaping.
pub fn cur(s: &Matrix) -> Result<Matrix, LlError> {
    let (z, x) = pair_parts(&s.dom)?;
    let cod = Web::pair(x, &s.cod);
    let m = s
        .iter()
        .map(|((ca, b), v)| {
            let (cl, a) = ca.as_pair().unwrap();
            ((cl.clone(), Label::pair(a.clone(), b.clone())), v.clone())
        })
        .collect();
    Ok(Matrix::from_map(z, &cod, s.carrier, m))
}

/// Inverse of [`cur`].
pub fn uncur(t: &Matrix) -> Result<Matrix, LlError> {
    let (x, y) = pair_parts(&t.cod)?;
    let dom = Web::pair(&t.dom, x);
    let m = t
        .iter()
        .map(|((cl, ab), v)| {
            let (a, b) = ab.as_pair().unwrap();
            ((Label::pair(cl.clone(), a.clone()), b.clone()), v.clone())
        })
        .collect();
    Ok(Matrix::from_map(&dom, y, t.carrier, m))
}

/// der: !X ⊸ X, der_{[a],a} = 1.
pub fn der(bang: &Arc<Web>, c: Carrier) -> Result<Matrix, LlError> {
    let (base, _) = bang_parts(bang)?;
    let ones: Vec<_> = base
        .labels()
        .into_iter()
        .map(|a| (Label::Bag(Multiset::singleton(a.clone())), a))
        .filter(|(m, _)| bang.contains(m))
        .collect();
    Ok(Matrix::kronecker(bang, base, c, ones))
}

/// All multisets of elements of `inner` (nonempty parts plus empties) summing to `m`, of outer size ≤ `outer`.
pub fn splittings(m: &Multiset, outer: usize, inner: &Web) -> Vec<Multiset> {
    let mut parts_lists: Vec<Vec<Multiset>> = Vec::new();
    split_rec(m.clone(), None, &mut Vec::new(), &mut parts_lists);
    let empty = Label::Bag(Multiset::empty());
    let mut out = Vec::new();
    for parts in parts_lists {
        if parts.len() > outer {
            continue;
        }
        let labels: Vec<Label> = parts.into_iter().map(Label::Bag).collect();
        if !labels.iter().all(|l| inner.contains(l)) {
            continue;
        }
        for k in 0..=(outer - labels.len()) {
            let mut v = labels.clone();
            v.extend(std::iter::repeat_n(empty.clone(), k));
            out.push(Multiset::new(v));
        }
    }
    out
}

fn sub_multisets(m: &Multiset) -> Vec<Multiset> {
    let counts: Vec<(Label, usize)> = m.counts().into_iter().map(|(l, n)| (l.clone(), n)).collect();
    let mut out = vec![Vec::new()];
    for (l, n) in counts {
        let mut next = Vec::new();
        for base in &out {
            for k in 0..=n {
                let mut v: Vec<Label> = base.clone();
                v.extend(std::iter::repeat_n(l.clone(), k));
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter().map(Multiset::new).collect()
}

fn minus(m: &Multiset, p: &Multiset) -> Multiset {
    let mut rest = m.items().to_vec();
    for x in p.items() {
        let i = rest.iter().position(|y| y == x).expect("sub-multiset");
        rest.remove(i);
    }
    Multiset::new(rest)
}

fn split_rec(rest: Multiset, lower: Option<&Multiset>, acc: &mut Vec<Multiset>, out: &mut Vec<Vec<Multiset>>) {
    if rest.is_empty() {
        out.push(acc.clone());
        return;
    }
    for p in sub_multisets(&rest) {
        if p.is_empty() || lower.is_some_and(|l| p < *l) {
            continue;
        }
        let r = minus(&rest, &p);
        acc.push(p.clone());
        split_rec(r, Some(&p), acc, out);
        acc.pop();
    }
}

/// dig: !X ⊸ !!X, dig_{m,[m1..mk]} = δ(m = m1 + … + mk), rows optionally restricted.
pub fn dig(bang: &Arc<Web>, bangbang: &Arc<Web>, c: Carrier, rows: Option<&BTreeSet<Label>>) -> Result<Matrix, LlError> {
    let (inner, outer) = bang_parts(bangbang)?;
    if **inner != **bang {
        return Err(FamilyError::WebMismatch(inner.to_string(), bang.to_string()).into());
    }
    let rows: Vec<Label> = match rows {
        Some(r) => r.iter().cloned().collect(),
        None => bang.labels(),
    };
    let mut ones = Vec::new();
    for m in rows {
        let ms = m.as_bag().ok_or_else(|| LlError::Shape(m.to_string(), "a multiset"))?;
        for big in splittings(ms, outer, inner) {
            let l = Label::Bag(big);
            if bangbang.contains(&l) {
                ones.push((m.clone(), l));
            }
        }
    }
    Ok(Matrix::kronecker(bang, bangbang, c, ones))
}

/// seely0: 1 ⊸ !⊤ and its inverse; !⊤ has the single point [].
pub fn seely0(top_bang: &Arc<Web>, c: Carrier) -> Matrix {
    let one = Arc::new(Web::Unit);
    Matrix::kronecker(&one, top_bang, c, [(Label::Star, Label::Bag(Multiset::empty()))])
}

pub fn seely0_inv(top_bang: &Arc<Web>, c: Carrier) -> Matrix {
    seely0(top_bang, c).transpose()
}

fn tag_all(i: u32, m: &Multiset) -> Vec<Label> {
    m.items().iter().map(|a| Label::tag(i, a.clone())).collect()
}

/// seely2: !X ⊗ !Y ⊸ !(X & Y), (m1, m2) ↦ 1·m1 + 2·m2.
pub fn seely2(bx: &Arc<Web>, by: &Arc<Web>, bw: &Arc<Web>, c: Carrier) -> Matrix {
    let dom = Web::pair(bx, by);
    let mut ones = Vec::new();
    for l in dom.labels() {
        let (m1, m2) = l.as_pair().unwrap();
        let mut items = tag_all(1, m1.as_bag().unwrap());
        items.extend(tag_all(2, m2.as_bag().unwrap()));
        let t = Label::Bag(Multiset::new(items));
        if bw.contains(&t) {
            ones.push((l.clone(), t));
        }
    }
    Matrix::kronecker(&dom, bw, c, ones)
}

/// seely2⁻¹: !(X & Y) ⊸ !X ⊗ !Y, splitting a multiset by tag.
pub fn seely2_inv(bx: &Arc<Web>, by: &Arc<Web>, bw: &Arc<Web>, c: Carrier) -> Matrix {
    let cod = Web::pair(bx, by);
    let mut ones = Vec::new();
    for l in bw.labels() {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for it in l.as_bag().unwrap().items() {
            match it.as_tag() {
                Some((1, x)) => a.push(x.clone()),
                Some((_, y)) => b.push(y.clone()),
                None => {}
            }
        }
        let t = Label::pair(Label::Bag(Multiset::new(a)), Label::Bag(Multiset::new(b)));
        if cod.contains(&t) {
            ones.push((l, t));
        }
    }
    Matrix::kronecker(bw, &cod, c, ones)
}

/// inj_i: X_i ⊸ the tagged union of `parts` (tags from 1).
pub fn inj(i: usize, sum: &Arc<Web>, c: Carrier) -> Result<Matrix, LlError> {
    let Web::Tagged(parts) = &**sum else { return Err(LlError::Shape(sum.to_string(), "a tagged union")) };
    let xi = parts.get(i - 1).ok_or(LlError::Shape(sum.to_string(), "wide enough"))?;
    let ones: Vec<_> = xi.labels().into_iter().map(|a| (a.clone(), Label::tag(i as u32, a))).collect();
    Ok(Matrix::kronecker(xi, sum, c, ones))
}

pub fn proj(i: usize, sum: &Arc<Web>, c: Carrier) -> Result<Matrix, LlError> {
    Ok(inj(i, sum, c)?.transpose())
}

/// Σ_i inj_i x_i on the tagged union.
pub fn tuple(sum: &Arc<Web>, xs: &[Vector]) -> Vector {
    let c = xs.first().map_or(Carrier::Bool, |x| x.carrier);
    let m = xs
        .iter()
        .enumerate()
        .flat_map(|(i, x)| x.iter().map(move |(l, v)| (Label::tag(i as u32 + 1, l.clone()), v.clone())))
        .collect();
    Vector::from_map(sum, c, m)
}

// ---------------------------------------------------------------------------------------------
// suites

pub const LL_SUITES: [&str; 7] =
    ["ll.monoidal", "ll.closed", "ll.comonad", "ll.functor", "ll.seely", "ll.additive", "ll.membership"];

impl Setup {
    /// dig on !X with the scenario mutation applied.
    pub fn dig(&self, bx: &Arc<Web>, bbx: &Arc<Web>, rows: Option<&BTreeSet<Label>>) -> Result<Matrix, LlError> {
        let mut d = dig(bx, bbx, self.carrier(), rows)?;
        if self.mutation == Some(Mutation::Dig) {
            if let Some(a) = self.x().web.labels().first() {
                let m = Label::Bag(Multiset::singleton(a.clone()));
                let mm = Label::Bag(Multiset::singleton(m.clone()));
                if d.row_support().contains(&m) {
                    flip_entry(&mut d, m, mm);
                }
            }
        }
        Ok(d)
    }

    pub fn seely2(&self, bx: &Arc<Web>, by: &Arc<Web>, bw: &Arc<Web>) -> Matrix {
        let mut s = seely2(bx, by, bw, self.carrier());
        if self.mutation == Some(Mutation::Seely2) {
            if let Some(a) = self.x().web.labels().first() {
                let m1 = Label::Bag(Multiset::singleton(a.clone()));
                let l = Label::pair(m1, Label::Bag(Multiset::empty()));
                let t = Label::Bag(Multiset::singleton(Label::tag(1, a.clone())));
                flip_entry(&mut s, l, t);
            }
        }
        s
    }
}

fn compose(t: &Matrix, s: &Matrix) -> Result<Partial<Matrix>, LlError> {
    Ok(mat_compose(t, s)?)
}

fn ok<T>(v: T) -> Result<Partial<T>, LlError> {
    Ok(Partial::Defined(v))
}

fn lift<T>(r: Result<T, FamilyError>) -> Result<Partial<T>, LlError> {
    Ok(Partial::Defined(r?))
}

fn finish(suite: &mut SuiteReport, case: Case) {
    suite.push(case.finish());
}

pub fn run_ll_suite(id: &str, setup: &Setup) -> SuiteReport {
    let mut suite = SuiteReport::new(id, setup.model.tag());
    let res = match id {
        "ll.monoidal" => monoidal(setup, &mut suite),
        "ll.closed" => closed(setup, &mut suite),
        "ll.comonad" => comonad(setup, &mut suite),
        "ll.functor" => functor(setup, &mut suite),
        "ll.seely" => seely(setup, &mut suite),
        "ll.additive" => additive(setup, &mut suite),
        "ll.membership" => membership(setup, &mut suite),
        _ => Err(LlError::Shape(id.into(), "a known suite")),
    };
    if let Err(e) = res {
        let mut c = Case::new("setup");
        c.fail(e.to_string());
        suite.push(c.finish());
    }
    suite
}

pub fn run_ll_suites(setup: &Setup) -> LawReport {
    let mut r = LawReport::default();
    for id in LL_SUITES {
        r.push(run_ll_suite(id, setup));
    }
    r
}

fn monoidal(st: &Setup, suite: &mut SuiteReport) -> Result<(), LlError> {
    let c = st.carrier();
    let (x, y, z) = (st.x(), st.y(), st.z());
    let one = SpaceRepr::one(st.model);
    let mut s = st.sampler("ll.monoidal");
    let l = lambda(&x.web, c);
    let r = rho(&x.web, c);
    let a = alpha(&x.web, &y.web, &z.web, c);
    let sg = sigma(&x.web, &y.web, c);

    let mut cl = Case::new("lambda-action");
    let mut cr = Case::new("rho-action");
    let mut ca = Case::new("alpha-action");
    let mut cs = Case::new("sigma-action");
    let mut ct = Case::new("tensor-action");
    for _ in 0..st.samples {
        let u = sample_vec(&one, c, &mut s);
        let xv = sample_vec(x, c, &mut s);
        let yv = sample_vec(y, c, &mut s);
        let zv = sample_vec(z, c, &mut s);
        let rx = xv.scale(&u.get(&Label::Star));
        law_vec(&mut cl, "λ·(r⊗x) = r x", lift(tensor_vec(&u, &xv)).and_then(|v| then(Ok(v), |v| Ok(mat_apply(&l, &v)?))), ok(rx.clone()), |_| true);
        law_vec(&mut cr, "ρ·(x⊗r) = r x", then(lift(tensor_vec(&xv, &u)), |v| Ok(mat_apply(&r, &v)?)), ok(rx), |_| true);
        let lhs = then(lift(tensor_vec(&xv, &yv).and_then(|v| tensor_vec(&v, &zv))), |v| Ok(mat_apply(&a, &v)?));
        let rhs = lift(tensor_vec(&yv, &zv).and_then(|v| tensor_vec(&xv, &v)));
        law_vec(&mut ca, "α·((x⊗y)⊗z) = x⊗(y⊗z)", lhs, rhs, |_| true);
        let lhs = then(lift(tensor_vec(&xv, &yv)), |v| Ok(mat_apply(&sg, &v)?));
        law_vec(&mut cs, "σ·(x⊗y) = y⊗x", lhs, lift(tensor_vec(&yv, &xv)), |_| true);
        let f = sample_morphism(x, y, c, &mut s);
        let g = sample_morphism(y, z, c, &mut s);
        let lhs = then(lift(tensor_mat(&f, &g)), |fg| then(lift(tensor_vec(&xv, &yv)), |v| Ok(mat_apply(&fg, &v)?)));
        let rhs = then(Ok(mat_apply(&f, &xv)?), |fx| then(Ok(mat_apply(&g, &yv)?), |gy| lift(tensor_vec(&fx, &gy))));
        law_vec(&mut ct, "(f⊗g)·(x⊗y) = f·x ⊗ g·y", lhs, rhs, |_| true);
    }
    for cs in [cl, cr, ca, cs, ct] {
        finish(suite, cs);
    }

    let mut c1 = Case::new("sigma-involutive");
    let back = sigma(&y.web, &x.web, c);
    law_mat(&mut c1, "σ∘σ = id", compose(&back, &sg), ok(Matrix::identity(&sg.dom, c)), everywhere);
    finish(suite, c1);

    let mut c2 = Case::new("triangle");
    let unit = Arc::new(Web::Unit);
    let a1 = alpha(&x.web, &unit, &y.web, c);
    let lhs = then(lift(Ok(tensor_mat(&Matrix::identity(&x.web, c), &lambda(&y.web, c))?)), |m| compose(&m, &a1));
    let rhs = lift(tensor_mat(&rho(&x.web, c), &Matrix::identity(&y.web, c)));
    law_mat(&mut c2, "(id⊗λ)∘α = ρ⊗id", lhs, rhs, everywhere);
    finish(suite, c2);

    let mut c3 = Case::new("pentagon");
    let w = &x.web;
    let (xw, yw, zw) = (&y.web, &z.web, &x.web);
    let id = |v: &Arc<Web>| Matrix::identity(v, c);
    let xy = Web::pair(w, xw);
    let yz = Web::pair(yw, zw);
    let lhs = compose(&alpha(w, xw, &yz, c), &alpha(&xy, yw, zw, c));
    let step1 = tensor_mat(&alpha(w, xw, yw, c), &id(zw))?;
    let step2 = alpha(w, &Web::pair(xw, yw), zw, c);
    let step3 = tensor_mat(&id(w), &alpha(xw, yw, zw, c))?;
    let rhs = then(compose(&step2, &step1), |m| compose(&step3, &m));
    law_mat(&mut c3, "α∘α = (id⊗α)∘α∘(α⊗id)", lhs, rhs, everywhere);
    finish(suite, c3);

    let mut c4 = Case::new("hexagon");
    let (xw, yw, zw) = (&x.web, &y.web, &z.web);
    let lhs = then(compose(&alpha(yw, xw, zw, c), &tensor_mat(&sigma(xw, yw, c), &id(zw))?), |m| {
        compose(&tensor_mat(&id(yw), &sigma(xw, zw, c))?, &m)
    });
    let rhs = then(compose(&sigma(xw, &Web::pair(yw, zw), c), &alpha(xw, yw, zw, c)), |m| {
        compose(&alpha(yw, zw, xw, c), &m)
    });
    law_mat(&mut c4, "(id⊗σ)∘α∘(σ⊗id) = α∘σ∘α", lhs, rhs, everywhere);
    finish(suite, c4);

    let mut c5 = Case::new("sigma-natural");
    for _ in 0..st.samples {
        let f = sample_morphism(x, y, c, &mut s);
        let g = sample_morphism(z, x, c, &mut s);
        let lhs = compose(&sigma(&y.web, &x.web, c), &tensor_mat(&f, &g)?);
        let rhs = compose(&tensor_mat(&g, &f)?, &sigma(&x.web, &z.web, c));
        law_mat(&mut c5, "σ∘(f⊗g) = (g⊗f)∘σ", lhs, rhs, everywhere);
    }
    finish(suite, c5);
    Ok(())
}

fn closed(st: &Setup, suite: &mut SuiteReport) -> Result<(), LlError> {
    let c = st.carrier();
    let (x, y, z) = (st.x(), st.y(), st.z());
    let mut s = st.sampler("ll.closed");
    let e = ev(&x.web, &y.web, c);
    let zx = z.tensor(x)?;
    let mut c1 = Case::new("ev-action");
    let mut c2 = Case::new("cur-action");
    let mut c3 = Case::new("beta");
    let mut c4 = Case::new("cur-bijective");
    for _ in 0..st.samples {
        let f = sample_morphism(x, y, c, &mut s);
        let xv = sample_vec(x, c, &mut s);
        let fv = f.as_vector();
        let lhs = then(lift(tensor_vec(&fv, &xv)), |v| Ok(mat_apply(&e, &v)?));
        law_vec(&mut c1, "ev·(f⊗x) = f·x", lhs, Ok(mat_apply(&f, &xv)?), |_| true);

        let g = sample_morphism(&zx, y, c, &mut s);
        let zv = sample_vec(z, c, &mut s);
        let cg = cur(&g)?;
        let lhs = then(Ok(mat_apply(&cg, &zv)?), |h| then(lift(Matrix::from_vector(&h)), |h| Ok(mat_apply(&h, &xv)?)));
        let rhs = then(lift(tensor_vec(&zv, &xv)), |v| Ok(mat_apply(&g, &v)?));
        law_vec(&mut c2, "(cur g·z)·x = g·(z⊗x)", lhs, rhs, |_| true);

        let lhs = compose(&ev(&x.web, &y.web, c), &tensor_mat(&cg, &Matrix::identity(&x.web, c))?);
        law_mat(&mut c3, "ev∘(cur g⊗id) = g", lhs, ok(g.clone()), everywhere);
        law_mat(&mut c4, "uncur(cur g) = g", lift(Ok(uncur(&cg).map_err(|e| FamilyError::BadLabel(e.to_string()))?)), ok(g), everywhere);
    }
    for k in [c1, c2, c3, c4] {
        finish(suite, k);
    }
    let mut c5 = Case::new("eta");
    let arrow = Web::pair(&x.web, &y.web);
    law_mat(&mut c5, "cur(ev) = id", ok(cur(&e)?), ok(Matrix::identity(&arrow, c)), everywhere);
    finish(suite, c5);
    Ok(())
}

fn comonad(st: &Setup, suite: &mut SuiteReport) -> Result<(), LlError> {
    let c = st.carrier();
    let d = st.cfg.bang_degree;
    let (x, y) = (st.x(), st.y());
    let bx = x.bang(d);
    let by = y.bang(d);
    let bbx = bx.bang(d);
    let bby = by.bang(d);
    let mut s = st.sampler("ll.comonad");
    let dg = st.dig(&bx.web, &bbx.web, None)?;
    let der_x = der(&bx.web, c)?;
    let der_bx_rows = dg.col_support();
    let der_bx = der(&bbx.web, c)?.restrict(|a, _| der_bx_rows.contains(a));
    let in_region = |l: &Label| total_degree(l) <= d;

    let mut c1 = Case::new("der-action");
    let mut c2 = Case::new("dig-action");
    for _ in 0..st.samples {
        let xv = sample_vec(x, c, &mut s);
        let p = promote(&xv, &bx.web);
        law_vec(&mut c1, "der·x^! = x", Ok(mat_apply(&der_x, &p)?), ok(xv.clone()), |_| true);
        let pp = promote(&p, &bbx.web);
        law_vec(&mut c2, "dig·x^! = (x^!)^!", Ok(mat_apply(&dg, &p)?), ok(pp), in_region);
    }
    finish(suite, c1);
    finish(suite, c2);

    let id_bx = Matrix::identity(&bx.web, c);
    let mut c3 = Case::new("der-dig");
    law_mat(&mut c3, "der∘dig = id", compose(&der_bx, &dg), ok(id_bx.clone()), everywhere);
    finish(suite, c3);

    let mut c4 = Case::new("bang-der-dig");
    let rows = dg.col_support();
    let lhs = then(bang_mat(&der_x, &bbx.web, &bx.web, Some(&rows)), |bd| compose(&bd, &dg));
    law_mat(&mut c4, "!der∘dig = id", lhs, ok(id_bx), everywhere);
    finish(suite, c4);

    // dig∘dig and !dig∘dig land in !!!X, built sparsely from the rows they need
    let mut c5 = Case::new("dig-dig");
    let bbbx = bang_web(&bbx.web, d, bbx.coh.clone());
    let rows = dg.col_support();
    let dig_bx = dig(&bbx.web, &bbbx, c, Some(&rows))?;
    let lhs = compose(&dig_bx, &dg);
    let rhs = then(bang_mat(&dg, &bbx.web, &bbbx, Some(&rows)), |bdg| compose(&bdg, &dg));
    let region = |_: &Label, l: &Label| l.as_bag().map_or(0, |m| m.items().iter().map(degree).sum::<usize>()) <= d;
    law_mat(&mut c5, "dig∘dig = !dig∘dig", lhs, rhs, region);
    finish(suite, c5);

    let der_y = der(&by.web, c)?;
    let dig_y = st.dig(&by.web, &bby.web, None)?;
    let mut c6 = Case::new("der-natural");
    let mut c7 = Case::new("dig-natural");
    for _ in 0..st.samples.min(8) {
        let f = sample_morphism(x, y, c, &mut s);
        let bf = bang_mat(&f, &bx.web, &by.web, None);
        let lhs = then(bf.clone(), |bf| compose(&der_y, &bf));
        law_mat(&mut c6, "der∘!f = f∘der", lhs, compose(&f, &der_x), everywhere);
        let lhs = then(bf.clone(), |bf| compose(&dig_y, &bf));
        let rows = dg.col_support();
        let rhs = then(bf, |bf| then(bang_mat(&bf, &bbx.web, &bby.web, Some(&rows)), |bbf| compose(&bbf, &dg)));
        law_mat(&mut c7, "dig∘!f = !!f∘dig", lhs, rhs, |_, l| total_degree(l) <= d);
    }
    finish(suite, c6);
    finish(suite, c7);
    Ok(())
}

fn functor(st: &Setup, suite: &mut SuiteReport) -> Result<(), LlError> {
    let c = st.carrier();
    let d = st.cfg.bang_degree;
    let (x, y, z) = (st.x(), st.y(), st.z());
    let (bx, by, bz) = (x.bang(d), y.bang(d), z.bang(d));
    let mut s = st.sampler("ll.functor");

    let mut c1 = Case::new("bang-id");
    law_mat(&mut c1, "!id = id", bang_mat(&Matrix::identity(&x.web, c), &bx.web, &bx.web, None), ok(Matrix::identity(&bx.web, c)), everywhere);
    finish(suite, c1);

    let mut c2 = Case::new("bang-compose");
    let mut c3 = Case::new("bang-action");
    let mut c4 = Case::new("truncation-monotone");
    for _ in 0..st.samples.min(12) {
        let f = sample_morphism(x, y, c, &mut s);
        let g = sample_morphism(y, z, c, &mut s);
        let lhs = then(compose(&g, &f), |gf| bang_mat(&gf, &bx.web, &bz.web, None));
        let rhs = then(bang_mat(&f, &bx.web, &by.web, None), |bf| then(bang_mat(&g, &by.web, &bz.web, None), |bg| compose(&bg, &bf)));
        law_mat(&mut c2, "!(g∘f) = !g∘!f", lhs, rhs, everywhere);

        let xv = sample_vec(x, c, &mut s);
        let lhs = then(bang_mat(&f, &bx.web, &by.web, None), |bf| Ok(mat_apply(&bf, &promote(&xv, &bx.web))?));
        let rhs = then(Ok(mat_apply(&f, &xv)?), |fx| ok(promote(&fx, &by.web)));
        law_vec(&mut c3, "!f·x^! = (f·x)^!", lhs, rhs, |_| true);

        if d > 0 {
            let small_x = bang_web(&x.web, d - 1, x.coh.clone());
            let small_y = bang_web(&y.web, d - 1, y.coh.clone());
            let lhs = bang_mat(&f, &small_x, &small_y, None);
            let rhs = then(bang_mat(&f, &bx.web, &by.web, None), |m| {
                let kept = m.restrict(|a, _| degree(a) < d);
                lift(kept.rewebbed(&small_x, &small_y))
            });
            law_mat(&mut c4, "!f at d-1 = !f at d restricted", lhs, rhs, everywhere);
        }
    }
    for k in [c2, c3, c4] {
        finish(suite, k);
    }
    Ok(())
}

fn seely(st: &Setup, suite: &mut SuiteReport) -> Result<(), LlError> {
    let c = st.carrier();
    let d = st.cfg.bang_degree;
    let (x, y) = (st.x(), st.y());
    let top = SpaceRepr::top(st.model);
    let btop = top.bang(d);
    let mut c0 = Case::new("seely0-iso");
    let s0 = seely0(&btop.web, c);
    let s0i = seely0_inv(&btop.web, c);
    law_mat(&mut c0, "seely0⁻¹∘seely0 = id", compose(&s0i, &s0), ok(Matrix::identity(&Arc::new(Web::Unit), c)), everywhere);
    law_mat(&mut c0, "seely0∘seely0⁻¹ = id", compose(&s0, &s0i), ok(Matrix::identity(&btop.web, c)), everywhere);
    finish(suite, c0);

    let (bx, by) = (x.bang(d), y.bang(d));
    let w = SpaceRepr::with(st.model, &[x.clone(), y.clone()]);
    let bw = w.bang(d);
    let s2 = st.seely2(&bx.web, &by.web, &bw.web);
    let s2i = seely2_inv(&bx.web, &by.web, &bw.web, c);
    let mut c1 = Case::new("seely2-left-inverse");
    let dom = Web::pair(&bx.web, &by.web);
    let small = |a: &Label| {
        let (m1, m2) = a.as_pair().unwrap();
        degree(m1) + degree(m2) <= d
    };
    law_mat(&mut c1, "seely2⁻¹∘seely2 = id", compose(&s2i, &s2), ok(Matrix::identity(&dom, c)), |a, _| small(a));
    finish(suite, c1);
    let mut c2 = Case::new("seely2-right-inverse");
    law_mat(&mut c2, "seely2∘seely2⁻¹ = id", compose(&s2, &s2i), ok(Matrix::identity(&bw.web, c)), everywhere);
    finish(suite, c2);

    let mut c3 = Case::new("seely2-action");
    let mut s = st.sampler("ll.seely");
    for _ in 0..st.samples {
        let xv = sample_vec(x, c, &mut s);
        let yv = sample_vec(y, c, &mut s);
        let lhs = then(lift(tensor_vec(&promote(&xv, &bx.web), &promote(&yv, &by.web))), |v| Ok(mat_apply(&s2, &v)?));
        let rhs = ok(promote(&tuple(&w.web, &[xv, yv]), &bw.web));
        law_vec(&mut c3, "seely2·(x^!⊗y^!) = ⟨x,y⟩^!", lhs, rhs, |_| true);
    }
    finish(suite, c3);
    Ok(())
}

fn additive(st: &Setup, suite: &mut SuiteReport) -> Result<(), LlError> {
    let c = st.carrier();
    let parts = [st.x().clone(), st.y().clone(), st.z().clone()];
    let w = SpaceRepr::with(st.model, &parts);
    let p = SpaceRepr::plus(st.model, &parts);
    let mut s = st.sampler("ll.additive");

    let mut c1 = Case::new("proj-inj");
    for i in 1..=3 {
        for j in 1..=3 {
            let lhs = compose(&proj(i, &w.web, c)?, &inj(j, &w.web, c)?);
            let rhs = if i == j { Matrix::identity(&parts[i - 1].web, c) } else { Matrix::zero(&parts[j - 1].web, &parts[i - 1].web, c) };
            law_mat(&mut c1, &format!("proj{i}∘inj{j}"), lhs, ok(rhs), everywhere);
        }
    }
    finish(suite, c1);

    let mut c2 = Case::new("with-pairing");
    let mut c3 = Case::new("plus-in-with");
    let mut c4 = Case::new("inj-points");
    for _ in 0..st.samples {
        let xs: Vec<Vector> = parts.iter().map(|x| sample_vec(x, c, &mut s)).collect();
        let t = tuple(&w.web, &xs);
        for (i, xi) in xs.iter().enumerate() {
            law_vec(&mut c2, "proj_i·⟨x⟩ = x_i", Ok(mat_apply(&proj(i + 1, &w.web, c)?, &t)?), ok(xi.clone()), |_| true);
        }
        let pv = sample_vec(&p, c, &mut s);
        let in_plus = member_any(&p, &pv)?;
        if in_plus.is_refuted() {
            c3.vacuous();
        } else {
            let in_with = member_any(&w, &pv)?;
            c3.check(!in_with.is_refuted(), || format!("{pv} is a point of ⊕ but not of &: {in_with:?}"));
        }
        let i = s.below(3) + 1;
        let xi = &xs[i - 1];
        if !member_any(&parts[i - 1], xi)?.is_refuted() {
            let v = mat_apply(&inj(i, &w.web, c)?, xi)?.expect_defined("injection");
            let verdict = member_any(&p, &v)?;
            c4.check(!verdict.is_refuted(), || format!("inj{i}·{xi} refuted in ⊕: {verdict:?}"));
        }
    }
    for k in [c2, c3, c4] {
        finish(suite, k);
    }
    Ok(())
}

fn membership(st: &Setup, suite: &mut SuiteReport) -> Result<(), LlError> {
    let c = st.carrier();
    let d = st.cfg.bang_degree;
    let model = st.model;
    let (x, y, z) = (st.x(), st.y(), st.z());
    let one = SpaceRepr::one(model);
    let (bx, by) = (x.bang(d), y.bang(d));
    let w = SpaceRepr::with(model, &[x.clone(), y.clone()]);
    let bw = w.bang(d);
    let unit = Arc::new(Web::Unit);

    let mut structural: Vec<(&str, SpaceRepr, SpaceRepr, Matrix)> = vec![
        ("lambda", one.tensor(x)?, x.clone(), lambda(&x.web, c)),
        ("rho", x.tensor(&one)?, x.clone(), rho(&x.web, c)),
        ("alpha", x.tensor(y)?.tensor(z)?, x.tensor(&y.tensor(z)?)?, alpha(&x.web, &y.web, &z.web, c)),
        ("sigma", x.tensor(y)?, y.tensor(x)?, sigma(&x.web, &y.web, c)),
        ("ev", x.arrow(y)?.tensor(x)?, y.clone(), ev(&x.web, &y.web, c)),
        ("der", bx.clone(), x.clone(), der(&bx.web, c)?),
        ("seely2", bx.tensor(&by)?, bw.clone(), st.seely2(&bx.web, &by.web, &bw.web)),
        ("seely2-inv", bw.clone(), bx.tensor(&by)?, seely2_inv(&bx.web, &by.web, &bw.web, c)),
        ("inj1", x.clone(), w.clone(), inj(1, &w.web, c)?),
        ("proj1", w.clone(), x.clone(), proj(1, &w.web, c)?),
    ];
    if d <= 2 || x.web.size() <= 2 {
        let bbx = bx.bang(d);
        structural.push(("dig", bx.clone(), bbx.clone(), st.dig(&bx.web, &bbx.web, None)?));
    }
    let _ = unit;
    let mut c1 = Case::new("structural-not-refuted");
    let mut certified = Vec::new();
    for (name, a, b, m) in &structural {
        let v = member_hom(a, b, m)?;
        if v.is_certified() {
            certified.push(*name);
        }
        c1.check(!v.is_refuted(), || format!("{name}: {v:?}"));
    }
    c1.note(format!("certified: {}", certified.join(", ")));
    finish(suite, c1);

    // der on an exponential whose base predual dominates its points is certified
    let mut c2 = Case::new("der-certified");
    let v = member_hom(&bx, x, &der(&bx.web, c)?)?;
    if x.p_dominating || model.is_total() {
        c2.check(v.is_certified(), || format!("der: {v:?}"));
    } else {
        c2.check(!v.is_refuted(), || format!("der: {v:?}"));
        c2.note("base predual does not dominate: probe-sound only");
    }
    finish(suite, c2);

    let mut c3 = Case::new("composition-closed");
    let mut s = st.sampler("ll.membership");
    for _ in 0..st.samples {
        let f = sample_morphism(x, y, c, &mut s);
        let g = sample_morphism(y, z, c, &mut s);
        let vf = member_hom(x, y, &f)?;
        let vg = member_hom(y, z, &g)?;
        if vf.is_refuted() || vg.is_refuted() {
            c3.vacuous();
            continue;
        }
        match mat_compose(&g, &f)? {
            Partial::Defined(gf) => {
                let v = member_hom(x, z, &gf)?;
                let want_cert = vf.is_certified() && vg.is_certified();
                c3.check(!v.is_refuted() && (!want_cert || v.is_certified()), || format!("g∘f = {gf}: {v:?}"));
            }
            Partial::Undefined { at } => c3.fail(format!("composite of morphisms undefined at {at}")),
        }
    }
    finish(suite, c3);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{BaseData, ModelId};
    use crate::pcr::q;

    fn pcoh(n: u32) -> SpaceRepr {
        SpaceRepr::make(ModelId::Pcoh, &BaseData::web(n)).unwrap()
    }

    #[test]
    fn promotion_example() {
        let x = pcoh(1);
        let c = Carrier::NonnegRational;
        let v = Vector::from_entries(&x.web, c, [(Label::Atom(0), Scalar::Nonneg(q(1, 2)))]).unwrap();
        let bx = x.bang(2);
        let p = promote(&v, &bx.web);
        let a = Label::Atom(0);
        assert_eq!(p.get(&Label::bag(vec![])), c.one());
        assert_eq!(p.get(&Label::bag(vec![a.clone()])), Scalar::Nonneg(q(1, 2)));
        assert_eq!(p.get(&Label::bag(vec![a.clone(), a])), Scalar::Nonneg(q(1, 4)));
        assert_eq!(p.entries().len(), 3);
    }

    #[test]
    fn orderings_are_distinct() {
        let a = Label::Atom(0);
        let b = Label::Atom(1);
        assert_eq!(distinct_orderings(&[a.clone(), a.clone(), b.clone()]).len(), 3);
        assert_eq!(distinct_orderings(&[a.clone(), b.clone(), Label::Atom(2)]).len(), 6);
        assert_eq!(distinct_orderings(&[]).len(), 1);
    }

    #[test]
    fn splittings_of_a_pair() {
        let a = Label::Atom(0);
        let x = pcoh(1);
        let bx = x.bang(2);
        let m = Multiset::new(vec![a.clone(), a.clone()]);
        // [[a,a]], [[a,a],[]], [[a],[a]]
        assert_eq!(splittings(&m, 2, &bx.web).len(), 3);
    }

    #[test]
    fn coherence_bang_web_keeps_cliques() {
        let x = SpaceRepr::make(ModelId::Coh, &BaseData::graph(3, vec![(0, 1), (1, 2)])).unwrap();
        let bx = x.bang(2);
        let labels = bx.web.labels();
        assert!(!labels.contains(&Label::bag(vec![Label::Atom(0), Label::Atom(2)])));
        assert!(labels.contains(&Label::bag(vec![Label::Atom(0), Label::Atom(1)])));
        assert!(labels.contains(&Label::bag(vec![Label::Atom(2), Label::Atom(2)])));
        // [] + 3 singletons + 3 squares + 2 edges
        assert_eq!(labels.len(), 9);
    }

    #[test]
    fn der_is_certified_on_pcoh() {
        let x = pcoh(1);
        let bx = x.bang(2);
        let v = member_hom(&bx, &x, &der(&bx.web, Carrier::NonnegRational).unwrap()).unwrap();
        assert!(v.is_certified());
    }

    #[test]
    fn one_plus_one_injections_are_points() {
        let one = SpaceRepr::one(ModelId::Rel);
        let p = SpaceRepr::plus(ModelId::Rel, &[one.clone(), one]);
        for i in 1..=2 {
            let e = Vector::basis(&p.web, Carrier::Bool, Label::tag(i, Label::Star)).unwrap();
            assert!(p.member_point(&e).unwrap().is_certified());
        }
    }

    #[test]
    fn one_tensor_one_is_a_singleton() {
        let one = SpaceRepr::one(ModelId::Pcoh);
        let t = one.tensor(&one).unwrap();
        assert_eq!(t.web.size(), 1);
        assert_eq!(SpaceRepr::top(ModelId::Pcoh).web.size(), 0);
    }

    #[test]
    fn pcoh_suites_pass() {
        let st = Setup::new(ModelId::Pcoh, &default_bases(ModelId::Pcoh), TruncCfg { bang_degree: 2, s_bound: 2 }, 6, 1).unwrap();
        let r = run_ll_suites(&st);
        assert!(r.passed(), "{}", r.render_text());
    }

    #[test]
    fn corrupted_dig_is_caught() {
        let mut st = Setup::new(ModelId::Pcoh, &default_bases(ModelId::Pcoh), TruncCfg { bang_degree: 2, s_bound: 2 }, 4, 1).unwrap();
        st.mutation = Some(Mutation::Dig);
        let r = run_ll_suite("ll.comonad", &st);
        let f = r.case("der-dig").unwrap();
        assert!(f.witness.as_deref().unwrap().contains("der∘dig"), "{f:?}");
    }
}
