//! The analytic coalgebra h̄: D ⊸ !D, the Taylor functor T on the Kleisli category of !,
//! and both Kleisli compositions (through dig for !, Cauchy product for S).
//!
//! A Kleisli morphism X → Y is a matrix !X ⊸ Y holding the coefficients of a power series
//! truncated at the bang degree. T s sends a family (x_0, x_1, …) to the degree-graded
//! components of s(x_0 + x_1 ε + x_2 ε² + …).

use num_bigint::BigUint;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

use crate::families::{mat_apply, mat_compose, multisets_upto, tensor_mat, Coh, FamilyError, Label, Matrix, Multiset, Vector, Web};
use crate::laws::{everywhere, law_mat, law_vec, sample_morphism, sample_vec, then, Setup};
use crate::ll::{bang_mat, bang_web, der, dig, distinct_orderings, ev, flip_entry, promote, seely2, seely2_inv, total_degree, cur, LlError, Mutation, TruncCfg};
use crate::pcr::{Carrier, Partial, Scalar};
use crate::report::{Case, SuiteReport};
use crate::sample::Sampler;
use crate::spaces::{member_hom, MembershipVerdict, SpaceError, SpaceRepr};
use crate::summability::{at, d_space, d_web, ix, s_space, s_web, split_s, witness_vec, SumCtx, SumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TaylorError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Ll(#[from] LlError),
    #[error(transparent)]
    Sum(#[from] SumError),
    #[error("matrix on {0} does not fit {1}")]
    Shape(String, String),
    #[error("expected {0} family members, got {1}")]
    Arity(usize, usize),
}

/// Exponential of a web, keeping the clique condition of the coherence model.
fn bang_of(web: &Arc<Web>, coh: &Option<Arc<Coh>>, d: usize) -> (Arc<Web>, Option<Arc<Coh>>) {
    (bang_web(web, d, coh.clone()), coh.as_ref().map(|r| Arc::new(Coh::Bang(r.clone()))))
}

fn bag_of(l: &Label) -> &Multiset {
    l.as_bag().expect("exponential label")
}

/// h̄_{i,m} = δ(i = Σ m) on the exponential `bd` of D.
pub fn coalgebra_mat(bd: &Arc<Web>, c: Carrier) -> Result<Matrix, TaylorError> {
    let n = match bd.bang_base().map(|b| &**b) {
        Some(Web::Indices(n)) => *n as usize,
        _ => return Err(TaylorError::Shape(bd.to_string(), "an exponential of D".into())),
    };
    let ones = bd
        .labels()
        .into_iter()
        .filter_map(|m| {
            let s: usize = bag_of(&m).items().iter().map(|l| l.as_idx().unwrap_or(0) as usize).sum();
            (s < n).then(|| (ix(s), m))
        })
        .collect::<Vec<_>>();
    Ok(Matrix::kronecker(&d_web(n), bd, c, ones))
}

/// The exponential of D with the relation of the model's D.
pub fn bang_d(model: crate::spaces::ModelId, cfg: TruncCfg) -> Result<Arc<Web>, TaylorError> {
    let d = d_space(cfg.s_bound, model)?;
    Ok(bang_of(&d.web, &d.coh, cfg.bang_degree).0)
}

/// μ: !X ⊗ !Y ⊸ !(X ⊗ Y), μ_{(m1,m2),p} = δ(m1 = π1 p, m2 = π2 p).
pub fn monoidal_mat(bx: &Arc<Web>, by: &Arc<Web>, bxy: &Arc<Web>, c: Carrier) -> Matrix {
    let dom = Web::pair(bx, by);
    let mut ones = BTreeSet::new();
    for l in dom.labels() {
        let (m1, m2) = l.as_pair().unwrap();
        let (m1, m2) = (bag_of(m1), bag_of(m2));
        if m1.degree() != m2.degree() {
            continue;
        }
        for order in distinct_orderings(m2.items()) {
            let p = Label::Bag(Multiset::new(m1.items().iter().cloned().zip(order).map(|(a, b)| Label::pair(a, b)).collect()));
            if bxy.contains(&p) {
                ones.insert((l.clone(), p));
            }
        }
    }
    Matrix::kronecker(&dom, bxy, c, ones.into_iter().collect::<Vec<_>>())
}

/// A morphism X → Y of the Kleisli category of !: a matrix !X ⊸ Y truncated at `degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct KleisliMor {
    pub dom: SpaceRepr,
    pub cod: SpaceRepr,
    pub mat: Matrix,
    pub degree: usize,
    /// member_hom verdict in !X ⊸ Y, once computed.
    pub verdict: Option<MembershipVerdict>,
}

impl KleisliMor {
    pub fn new(dom: SpaceRepr, cod: SpaceRepr, mat: Matrix, degree: usize) -> Result<KleisliMor, TaylorError> {
        let bx = bang_of(&dom.web, &dom.coh, degree).0;
        if *mat.dom != *bx || *mat.cod != *cod.web {
            return Err(TaylorError::Shape(format!("{} ⊸ {}", mat.dom, mat.cod), format!("{bx} ⊸ {}", cod.web)));
        }
        Ok(KleisliMor { dom, cod, mat, degree, verdict: None })
    }

    pub fn bang_dom(&self) -> Arc<Web> {
        self.mat.dom.clone()
    }

    /// Record and return the membership verdict in !X ⊸ Y.
    pub fn check(&mut self) -> Result<&MembershipVerdict, TaylorError> {
        if self.verdict.is_none() {
            let bx = self.dom.bang(self.degree);
            self.verdict = Some(member_hom(&bx, &self.cod, &self.mat)?);
        }
        Ok(self.verdict.as_ref().unwrap())
    }

    /// The same coefficients without the constant term.
    pub fn without_constant(&self) -> KleisliMor {
        let empty = Label::Bag(Multiset::empty());
        KleisliMor { mat: self.mat.restrict(|a, _| *a != empty), verdict: None, ..self.clone() }
    }
}

/// der_functor(f) = f ∘ der.
pub fn der_functor(f: &Matrix, dom: &SpaceRepr, cod: &SpaceRepr, degree: usize) -> Result<KleisliMor, TaylorError> {
    let bx = bang_of(&dom.web, &dom.coh, degree).0;
    let m = mat_compose(f, &der(&bx, f.carrier)?)?.expect_defined("a single term per entry");
    KleisliMor::new(dom.clone(), cod.clone(), m, degree)
}

/// t ∘ !s ∘ dig. Exact on every row when s has no constant term.
pub fn kleisli_bang_compose(t: &KleisliMor, s: &KleisliMor) -> Result<Partial<KleisliMor>, TaylorError> {
    let d = s.degree;
    let c = s.mat.carrier;
    let (bx, bx_coh) = bang_of(&s.dom.web, &s.dom.coh, d);
    let bbx = bang_of(&bx, &bx_coh, d).0;
    let by = t.bang_dom();
    let dg = dig(&bx, &bbx, c, None)?;
    let rows = dg.col_support();
    let out = then(bang_mat(&s.mat, &bbx, &by, Some(&rows)).map_err(TaylorError::from), |bs| {
        then(Ok(mat_compose(&bs, &dg)?), |r| Ok(mat_compose(&t.mat, &r)?))
    })?;
    Ok(match out {
        Partial::Defined(m) => Partial::Defined(KleisliMor::new(s.dom.clone(), t.cod.clone(), m, d)?),
        Partial::Undefined { at } => Partial::Undefined { at },
    })
}

/// Cauchy product of f: X ⊸ S Y and g: Y ⊸ S Z: the k-th component is Σ_{i+j=k} g_j ∘ f_i.
pub fn kleisli_s_compose(g: &Matrix, f: &Matrix, n: usize) -> Result<Partial<Matrix>, TaylorError> {
    let k = SumCtx::new(n, f.carrier)?;
    let y = inner_of(&f.cod)?;
    let z = inner_of(&g.cod)?;
    if *y != *g.dom {
        return Err(FamilyError::WebMismatch(y.to_string(), g.dom.to_string()).into());
    }
    let cod = k.s(&z);
    let mut acc = Matrix::zero(&f.dom, &cod, f.carrier);
    for i in 0..n {
        let fi = mat_compose(&k.proj(i, &y)?, f)?.expect_defined("projection");
        for j in 0..n - i {
            let gj = mat_compose(&k.proj(j, &z)?, g)?.expect_defined("projection");
            let term = match mat_compose(&gj, &fi)? {
                Partial::Defined(t) => t,
                u => return Ok(u),
            };
            let placed = mat_compose(&k.inj(i + j, &z)?, &term)?.expect_defined("injection");
            match acc.add(&placed)? {
                Partial::Defined(v) => acc = v,
                u => return Ok(u),
            }
        }
    }
    Ok(Partial::Defined(acc))
}

fn inner_of(w: &Arc<Web>) -> Result<Arc<Web>, TaylorError> {
    match &**w {
        Web::Pair(d, x) if matches!(**d, Web::Indices(_)) => Ok(x.clone()),
        _ => Err(SumError::Shape(w.to_string(), "of the form S X").into()),
    }
}

/// [a]! / [(i,a)]! for a multiset of labels of S X: the number of ways to index the
/// copies of each a.
pub fn taylor_ratio(m: &Multiset) -> BigUint {
    let base = Multiset::new(m.items().iter().map(|l| split_s(l).map_or(l.clone(), |(_, a)| a.clone())).collect());
    base.factorial() / m.factorial()
}

/// Webs of the Taylor construction for a Kleisli morphism out of X at bound N.
struct TaylorWebs {
    k: SumCtx,
    sx: SpaceRepr,
    bsx: Arc<Web>,
    sy: Arc<Web>,
}

fn taylor_webs(s: &KleisliMor, n: usize) -> Result<TaylorWebs, TaylorError> {
    let sx = s_space(&s.dom, n)?;
    let bsx = bang_of(&sx.web, &sx.coh, s.degree).0;
    Ok(TaylorWebs { k: SumCtx::new(n, s.mat.carrier)?, sy: s_web(n, &s.cod.web), sx, bsx })
}

/// Closed form: (T s)_{[(i1,a1)..(ik,ak)],(j,b)} = δ(Σ i = j) · [a]!/[(i,a)]! · s_{[a],b}.
/// Undefined where the integer ratio has no image in the carrier and the coefficient is nonzero.
pub fn taylor_mat(s: &KleisliMor, cfg: TruncCfg) -> Result<Partial<Matrix>, TaylorError> {
    let w = taylor_webs(s, cfg.s_bound)?;
    let c = s.mat.carrier;
    let mut m = BTreeMap::new();
    for row in w.bsx.labels() {
        let ms = bag_of(&row);
        let mut j = 0;
        let mut base = Vec::new();
        for l in ms.items() {
            let (i, a) = split_s(l).expect("label of S X");
            j += i;
            base.push(a.clone());
        }
        if j >= cfg.s_bound {
            continue;
        }
        let src = Label::Bag(Multiset::new(base));
        let ratio = taylor_ratio(ms);
        let k = u64::try_from(&ratio).ok().and_then(|r| c.nat_embed(r));
        for (b, v) in s.mat.row(&src) {
            if v.is_zero() {
                continue;
            }
            match &k {
                Some(k) => {
                    m.insert((row.clone(), at(j, b)), c.mul(k, v));
                }
                None => return Ok(Partial::undefined(format!("({row},{}) ratio {ratio}", at(j, b)))),
            }
        }
    }
    Ok(Partial::Defined(Matrix::from_map(&w.bsx, &w.sy, c, m)))
}

/// Entries of T s whose ratio exceeds 1 with a nonzero coefficient, and all nonzero entries.
pub fn ratio_census(s: &KleisliMor, cfg: TruncCfg) -> Result<(usize, usize), TaylorError> {
    let w = taylor_webs(s, cfg.s_bound)?;
    let (mut big, mut all) = (0, 0);
    for row in w.bsx.labels() {
        let ms = bag_of(&row);
        let j: usize = ms.items().iter().map(|l| split_s(l).map_or(0, |(i, _)| i)).sum();
        if j >= cfg.s_bound {
            continue;
        }
        let src = Label::Bag(Multiset::new(ms.items().iter().map(|l| split_s(l).unwrap().1.clone()).collect()));
        let nz = s.mat.row(&src).filter(|(_, v)| !v.is_zero()).count();
        all += nz;
        if taylor_ratio(ms) > BigUint::from(1u32) {
            big += nz;
        }
    }
    Ok((big, all))
}

/// ∂: !S X ⊸ S !X, the curry of !ev ∘ μ ∘ (!S X ⊗ h̄).
pub fn distributive_mat(x: &SpaceRepr, cfg: TruncCfg, h: &Matrix) -> Result<Partial<Matrix>, TaylorError> {
    let (n, d) = (cfg.s_bound, cfg.bang_degree);
    let c = h.carrier;
    let dsp = d_space(n, x.model)?;
    let sx = s_space(x, n)?;
    let bsx = bang_of(&sx.web, &sx.coh, d).0;
    let sxd = sx.tensor(&dsp)?;
    let bsxd = bang_of(&sxd.web, &sxd.coh, d).0;
    let bx = bang_of(&x.web, &x.coh, d).0;
    let lift = tensor_mat(&Matrix::identity(&bsx, c), h)?;
    let mu = monoidal_mat(&bsx, &h.cod, &bsxd, c);
    let rows = mu.col_support();
    let out = then(Ok(mat_compose(&mu, &lift)?), |ml| {
        then(bang_mat(&ev(&dsp.web, &x.web, c), &bsxd, &bx, Some(&rows)).map_err(TaylorError::from), |bev| Ok(mat_compose(&bev, &ml)?))
    })?;
    Ok(match out {
        Partial::Defined(m) => Partial::Defined(cur(&m)?),
        u => u.map(|_| unreachable!()),
    })
}

/// T s through the coalgebra: S s ∘ ∂.
pub fn taylor_via_coalgebra(s: &KleisliMor, cfg: TruncCfg, h: &Matrix) -> Result<Partial<Matrix>, TaylorError> {
    let k = SumCtx::new(cfg.s_bound, s.mat.carrier)?;
    then(distributive_mat(&s.dom, cfg, h), |dl| Ok(mat_compose(&k.s_map(&s.mat), &dl)?))
}

/// T s as a Kleisli morphism S X → S Y (closed form).
pub fn taylor(s: &KleisliMor, cfg: TruncCfg) -> Result<Partial<KleisliMor>, TaylorError> {
    let w = taylor_webs(s, cfg.s_bound)?;
    let sy = s_space(&s.cod, cfg.s_bound)?;
    Ok(match taylor_mat(s, cfg)? {
        Partial::Defined(m) => Partial::Defined(KleisliMor::new(w.sx, sy, m, s.degree)?),
        Partial::Undefined { at } => Partial::Undefined { at },
    })
}

/// Components 0..N of T f applied to the promotion of the family `xs` (shorter families are
/// padded with zeros).
pub fn taylor_apply_series(f: &KleisliMor, xs: &[Vector], cfg: TruncCfg) -> Result<Vec<Partial<Vector>>, TaylorError> {
    let n = cfg.s_bound;
    if xs.is_empty() || xs.len() > n {
        return Err(TaylorError::Arity(n, xs.len()));
    }
    let w = taylor_webs(f, n)?;
    let t = taylor_mat(f, cfg)?;
    let wit = witness_vec(n, xs)?;
    let out = then(Ok::<_, TaylorError>(t), |t| Ok(mat_apply(&t, &promote(&wit, &w.bsx))?))?;
    (0..n)
        .map(|j| match &out {
            Partial::Defined(v) => Ok(mat_apply(&w.k.proj(j, &f.cod.web)?, v)?),
            Partial::Undefined { at } => Ok(Partial::Undefined { at: at.clone() }),
        })
        .collect()
}

/// Independent oracle for [`taylor_apply_series`]: expand s(Σ_i x_i ε^i) by enumerating every
/// multiset m of degree ≤ d of X and every tuple of indices attached to its elements.
pub fn series_oracle(f: &KleisliMor, xs: &[Vector], cfg: TruncCfg) -> Vec<Partial<Vector>> {
    let n = cfg.s_bound;
    let c = f.mat.carrier;
    let labels = f.dom.web.labels();
    let mut acc: Vec<BTreeMap<Label, Scalar>> = vec![BTreeMap::new(); n];
    let mut bad: Option<String> = None;
    let coeff = |i: usize, a: &Label| xs.get(i).map_or(c.zero(), |x| x.get(a));
    for m in multisets_upto(&labels, f.degree) {
        let src = Label::Bag(m.clone());
        let row: Vec<(Label, Scalar)> = f.mat.row(&src).map(|(b, v)| (b.clone(), v.clone())).collect();
        if row.is_empty() {
            continue;
        }
        let k = m.degree();
        // every index tuple (i_1..i_k) with Σ < N
        let mut idx = vec![0usize; k];
        loop {
            let j: usize = idx.iter().sum();
            if j < n {
                let mono = m.items().iter().zip(&idx).fold(c.one(), |p, (a, i)| c.mul(&p, &coeff(*i, a)));
                if !mono.is_zero() {
                    for (b, v) in &row {
                        let term = c.mul(&mono, v);
                        let slot = acc[j].entry(b.clone()).or_insert_with(|| c.zero());
                        match c.add(slot, &term) {
                            Some(t) => *slot = t,
                            None => bad = bad.or_else(|| Some(format!("component {j} at {b}"))),
                        }
                    }
                }
            }
            // odometer
            let mut p = 0;
            while p < k {
                idx[p] += 1;
                if idx[p] < n {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if p == k {
                break;
            }
        }
    }
    acc.into_iter()
        .map(|m| match &bad {
            Some(at) => Partial::undefined(at.clone()),
            None => Partial::Defined(Vector::from_map(&f.cod.web, c, m)),
        })
        .collect()
}

impl Setup {
    /// h̄ with the scenario mutation applied.
    pub fn coalgebra(&self, bd: &Arc<Web>) -> Result<Matrix, TaylorError> {
        let mut h = coalgebra_mat(bd, self.carrier())?;
        if self.mutation == Some(Mutation::Coalgebra) {
            flip_entry(&mut h, ix(0), Label::Bag(Multiset::singleton(ix(0))));
        }
        Ok(h)
    }
}

// ---------------------------------------------------------------------------------------------
// suites

pub const TAYLOR_SUITES: [&str; 3] = ["taylor.coalgebra", "taylor.functor", "taylor.series"];

pub fn run_taylor_suite(id: &str, st: &Setup) -> SuiteReport {
    let mut suite = SuiteReport::new(id, st.model.tag());
    let res = match id {
        "taylor.coalgebra" => coalgebra_suite(st, &mut suite),
        "taylor.functor" => functor_suite(st, &mut suite),
        "taylor.series" => series_suite(st, &mut suite),
        _ => Err(TaylorError::Shape(id.into(), "a known suite".into())),
    };
    if let Err(e) = res {
        let mut c = Case::new("setup");
        c.fail(e.to_string());
        suite.push(c.finish());
    }
    suite
}

fn compose(t: &Matrix, s: &Matrix) -> Result<Partial<Matrix>, TaylorError> {
    Ok(mat_compose(t, s)?)
}

fn chain(ms: &[&Matrix]) -> Result<Partial<Matrix>, TaylorError> {
    Ok(crate::families::compose_all(ms)?)
}

fn ok<T>(v: T) -> Result<Partial<T>, TaylorError> {
    Ok(Partial::Defined(v))
}

fn bang(s: &Matrix, dom: &Arc<Web>, cod: &Arc<Web>) -> Result<Partial<Matrix>, TaylorError> {
    Ok(bang_mat(s, dom, cod, None)?)
}

fn finish(suite: &mut SuiteReport, case: Case) {
    suite.push(case.finish());
}

fn index_sum(l: &Label) -> usize {
    l.as_bag().map_or(0, |m| m.items().iter().map(|i| i.as_idx().unwrap_or(0) as usize).sum())
}

/// Σ of all indices of a multiset of pairs of indices.
fn pair_index_sum(l: &Label) -> usize {
    l.as_bag().map_or(0, |m| {
        m.items()
            .iter()
            .map(|p| p.as_pair().map_or(0, |(i, j)| (i.as_idx().unwrap_or(0) + j.as_idx().unwrap_or(0)) as usize))
            .sum()
    })
}

/// Σ of the indices of a multiset of labels of S X.
fn s_index_sum(l: &Label) -> usize {
    l.as_bag().map_or(0, |m| m.items().iter().map(|x| split_s(x).map_or(0, |(i, _)| i)).sum())
}

fn coalgebra_suite(st: &Setup, suite: &mut SuiteReport) -> Result<(), TaylorError> {
    let c = st.carrier();
    let (n, d) = (st.cfg.s_bound, st.cfg.bang_degree);
    let k = SumCtx::new(n, c)?;
    let dsp = d_space(n, st.model)?;
    let dw = dsp.web.clone();
    let (bd, bd_coh) = bang_of(&dw, &dsp.coh, d);
    let bbd = bang_of(&bd, &bd_coh, d).0;
    let h = st.coalgebra(&bd)?;
    let mut s = st.sampler("taylor.coalgebra");
    let in_range = |m: &Label| index_sum(m) < n;

    let mut c1 = Case::new("coalgebra-action");
    for _ in 0..st.samples.min(32) {
        let v = crate::laws::random_vector(&dw, c, &mut s);
        let want = Vector::from_map(&bd, c, bd.labels().into_iter().filter(|m| in_range(m)).map(|m| {
            let x = v.get(&ix(index_sum(&m)));
            (m, x)
        }).filter(|(_, x)| !x.is_zero()).collect());
        law_vec(&mut c1, "(h̄·x)_m = x_(Σm)", Ok::<_, TaylorError>(mat_apply(&h, &v)?), ok(want), |_| true);
    }
    let delta = Vector::diag(&dw, c);
    law_vec(&mut c1, "h̄·Δ = Δ^!", Ok::<_, TaylorError>(mat_apply(&h, &delta)?), ok(promote(&delta, &bd)), in_range);
    finish(suite, c1);

    let mut c2 = Case::new("coalgebra-counit");
    law_mat(&mut c2, "der∘h̄ = id", compose(&der(&bd, c)?, &h), ok(Matrix::identity(&dw, c)), everywhere);
    finish(suite, c2);

    let mut c3 = Case::new("coalgebra-coassoc");
    let dg = dig(&bd, &bbd, c, None)?;
    let rows = h.col_support();
    let rhs = then(Ok(bang_mat(&h, &bd, &bbd, Some(&rows))?), |bh| compose(&bh, &h));
    law_mat(&mut c3, "dig∘h̄ = !h̄∘h̄", compose(&dg, &h), rhs, |_, m| total_degree(m) <= d);
    finish(suite, c3);

    // μ on D ⊗ D against the Seely composite !(der⊗der∘seely2⁻¹)∘dig∘seely2
    let mut c4 = Case::new("monoidal-composite");
    let ddsp = dsp.tensor(&dsp)?;
    let (bdd, _) = bang_of(&ddsp.web, &ddsp.coh, d);
    let mu = monoidal_mat(&bd, &bd, &bdd, c);
    let w = SpaceRepr::with(st.model, &[dsp.clone(), dsp.clone()]);
    let (bw, bw_coh) = bang_of(&w.web, &w.coh, d);
    let bbw = bang_of(&bw, &bw_coh, d).0;
    let s2 = seely2(&bd, &bd, &bw, c);
    let dg_w = dig(&bw, &bbw, c, Some(&s2.col_support()))?;
    let dd = tensor_mat(&der(&bd, c)?, &der(&bd, c)?)?;
    let split = compose(&dd, &seely2_inv(&bd, &bd, &bw, c))?.expect_defined("kronecker");
    let rhs = then(Ok(bang_mat(&split, &bbw, &bdd, Some(&dg_w.col_support()))?), |bs| chain(&[&bs, &dg_w, &s2]));
    let small = |l: &Label| l.as_pair().is_some_and(|(a, b)| bag_of(a).degree() + bag_of(b).degree() <= d);
    law_mat(&mut c4, "μ = !(der⊗der∘seely2⁻¹)∘dig∘seely2", ok(mu.clone()), rhs, |a, _| small(a));
    for _ in 0..st.samples.min(16) {
        let u = crate::laws::random_vector(&dw, c, &mut s);
        let v = crate::laws::random_vector(&dw, c, &mut s);
        let lhs = mat_apply(&mu, &crate::families::tensor_vec(&promote(&u, &bd), &promote(&v, &bd))?)?;
        let rhs = promote(&crate::families::tensor_vec(&u, &v)?, &bdd);
        law_vec(&mut c4, "μ·(x^!⊗y^!) = (x⊗y)^!", Ok::<_, TaylorError>(lhs), ok(rhs), |_| true);
    }
    finish(suite, c4);

    // analytic conditions: the bimonoid maps and ι_0 are coalgebra morphisms
    let mut c5 = Case::new("analytic-morphisms");
    let one = Arc::new(Web::Unit);
    let b1 = bang_web(&one, d, dsp.coh.clone());
    let h1 = Matrix::kronecker(&one, &b1, c, b1.labels().into_iter().map(|m| (Label::Star, m)).collect::<Vec<_>>());
    let hh = compose(&mu, &tensor_mat(&h, &h)?)?.expect_defined("disjoint supports");
    let delta_m = k.d_unit();
    let lhs = compose(&h, &delta_m);
    law_mat(&mut c5, "h̄∘Δ = !Δ∘h₁", lhs, then(bang(&delta_m, &b1, &bd), |b| compose(&b, &h1)), |_, m| in_range(m));
    let i0 = k.d_basis(0)?;
    law_mat(&mut c5, "h̄∘ι_0 = !ι_0∘h₁", compose(&h, &i0), then(bang(&i0, &b1, &bd), |b| compose(&b, &h1)), everywhere);
    let p0 = k.d_counit(0)?;
    law_mat(&mut c5, "h₁∘p̄_0 = !p̄_0∘h̄", compose(&h1, &p0), then(bang(&p0, &bd, &b1), |b| compose(&b, &h)), everywhere);
    let mbar = k.d_mult().rewebbed(&ddsp.web, &dw)?;
    let lhs = compose(&h, &mbar);
    let rows = hh.col_support();
    let rhs = then(Ok(bang_mat(&mbar, &bdd, &bd, Some(&rows))?), |b| compose(&b, &hh));
    law_mat(&mut c5, "h̄∘m̄ = !m̄∘h_(D⊗D)", lhs, rhs, everywhere);
    let cbar = k.d_comult().rewebbed(&dw, &ddsp.web)?;
    let lhs = compose(&hh, &cbar);
    let rhs = then(bang(&cbar, &bd, &bdd), |b| compose(&b, &h));
    law_mat(&mut c5, "h_(D⊗D)∘c̄ = !c̄∘h̄", lhs, rhs, |_, p| pair_index_sum(p) < n);
    finish(suite, c5);

    let mut c6 = Case::new("coalgebra-member");
    let bdsp = dsp.bang(d);
    let v = member_hom(&dsp, &bdsp, &h.rewebbed(&dsp.web, &bdsp.web)?)?;
    c6.check(!v.is_refuted(), || format!("h̄ refuted: {v:?}"));
    finish(suite, c6);
    Ok(())
}

/// A sampled Kleisli morphism X → Y; without constant term when `pure` is set.
fn sample_kleisli(x: &SpaceRepr, y: &SpaceRepr, d: usize, c: Carrier, s: &mut Sampler, pure: bool) -> Result<KleisliMor, TaylorError> {
    let bx = x.bang(d);
    let m = sample_morphism(&bx, y, c, s);
    let f = KleisliMor::new(x.clone(), y.clone(), m, d)?;
    Ok(if pure { f.without_constant() } else { f })
}

fn functor_suite(st: &Setup, suite: &mut SuiteReport) -> Result<(), TaylorError> {
    let c = st.carrier();
    let cfg = st.cfg;
    let (n, d) = (cfg.s_bound, cfg.bang_degree);
    let k = SumCtx::new(n, c)?;
    let (x, y, z) = (st.x(), st.y(), st.z());
    let bd = bang_d(st.model, cfg)?;
    let h = st.coalgebra(&bd)?;
    let mut s = st.sampler("taylor.functor");
    let sx = s_space(x, n)?;
    let sy = s_space(y, n)?;
    let (bsx, _) = bang_of(&sx.web, &sx.coh, d);

    let mut c1 = Case::new("degree-grading");
    let mut c2 = Case::new("closed-form-vs-coalgebra");
    let mut c3 = Case::new("s-compat");
    let mut census = (0, 0);
    for _ in 0..st.samples.min(8) {
        let f = sample_kleisli(x, y, d, c, &mut s, false)?;
        let tf = taylor_mat(&f, cfg)?;
        let (big, all) = ratio_census(&f, cfg)?;
        census = (census.0 + big, census.1 + all);
        if let Partial::Defined(t) = &tf {
            let bad = t.iter().find(|((m, jb), v)| !v.is_zero() && split_s(jb).map(|(j, _)| j) != Some(s_index_sum(m)));
            c1.check(bad.is_none(), || format!("entry {:?} off the grading", bad.map(|(k, _)| k)));
            let bx = f.bang_dom();
            let pi0 = bang(&k.proj(0, &x.web)?, &bsx, &bx);
            law_mat(&mut c3, "π_0∘T f = f∘!π_0", compose(&k.proj(0, &y.web)?, t), then(pi0, |p| compose(&f.mat, &p)), everywhere);
            let sig = bang(&k.sum(&x.web), &bsx, &bx);
            law_mat(&mut c3, "σ∘T f = f∘!σ", compose(&k.sum(&y.web), t), then(sig, |p| compose(&f.mat, &p)), |m, _| s_index_sum(m) < n);
        } else {
            c1.vacuous();
        }
        law_mat(&mut c2, "T f = S f∘∂", taylor_via_coalgebra(&f, cfg, &h), Ok(tf), everywhere);
    }
    c2.note(format!("{} of {} nonzero coefficients carry a ratio above 1", census.0, census.1));
    for k in [c1, c2, c3] {
        finish(suite, k);
    }

    let mut c4 = Case::new("identity");
    let der_x = der_functor(&Matrix::identity(&x.web, c), x, x, d)?;
    law_mat(&mut c4, "T der = der", taylor_mat(&der_x, cfg), ok(der(&bsx, c)?), everywhere);
    let zero = KleisliMor::new(x.clone(), y.clone(), Matrix::zero(&der_x.mat.dom, &y.web, c), d)?;
    law_mat(&mut c4, "T 0 = 0", taylor_mat(&zero, cfg), ok(Matrix::zero(&bsx, &sy.web, c)), everywhere);
    finish(suite, c4);

    let mut c5 = Case::new("linear-compat");
    for _ in 0..st.samples.min(8) {
        let f = sample_morphism(x, y, c, &mut s);
        let df = der_functor(&f, x, y, d)?;
        let rhs = der_functor(&k.s_map(&f), &sx, &sy, d)?;
        law_mat(&mut c5, "T(der_functor f) = der_functor(S f)", taylor_mat(&df, cfg), ok(rhs.mat), everywhere);
    }
    finish(suite, c5);

    let mut c6 = Case::new("kleisli-laws");
    for _ in 0..st.samples.min(6) {
        let f = sample_kleisli(x, y, d, c, &mut s, true)?;
        let g = sample_kleisli(y, z, d, c, &mut s, true)?;
        let u = sample_kleisli(z, x, d, c, &mut s, false)?;
        let idx = der_functor(&Matrix::identity(&x.web, c), x, x, d)?;
        let idy = der_functor(&Matrix::identity(&y.web, c), y, y, d)?;
        law_mat(&mut c6, "f∘id = f", mats(kleisli_bang_compose(&f, &idx)), ok(f.mat.clone()), everywhere);
        law_mat(&mut c6, "id∘f = f", mats(kleisli_bang_compose(&idy, &f)), ok(f.mat.clone()), everywhere);
        let lhs = then(kleisli_bang_compose(&g, &f), |gf| kleisli_bang_compose(&u, &gf));
        let rhs = then(kleisli_bang_compose(&u, &g), |ug| kleisli_bang_compose(&ug, &f));
        law_mat(&mut c6, "(u∘g)∘f = u∘(g∘f)", mats(lhs), mats(rhs), everywhere);
        let a = sample_morphism(x, y, c, &mut s);
        let b = sample_morphism(y, z, c, &mut s);
        let lhs = kleisli_bang_compose(&der_functor(&b, y, z, d)?, &der_functor(&a, x, y, d)?);
        let rhs = then(compose(&b, &a), |ba| ok(der_functor(&ba, x, z, d)?));
        law_mat(&mut c6, "der_functor b∘der_functor a = der_functor(b∘a)", mats(lhs), mats(rhs), everywhere);
    }
    finish(suite, c6);

    let mut c7 = Case::new("functoriality");
    for _ in 0..st.samples.min(4) {
        let f = sample_kleisli(x, y, d, c, &mut s, true)?;
        let g = sample_kleisli(y, z, d, c, &mut s, false)?;
        let lhs = then(kleisli_bang_compose(&g, &f), |gf| taylor_mat(&gf, cfg));
        let rhs = then(taylor(&g, cfg), |tg| then(taylor(&f, cfg), |tf| kleisli_bang_compose(&tg, &tf)));
        law_mat(&mut c7, "T(g∘f) = T g∘T f", lhs, mats(rhs), everywhere);
    }
    finish(suite, c7);

    let mut c8 = Case::new("cauchy-product");
    for _ in 0..st.samples.min(8) {
        let f = crate::laws::random_matrix(&x.web, &k.s(&y.web), c, &mut s);
        let g = crate::laws::random_matrix(&y.web, &k.s(&z.web), c, &mut s);
        let via_mult = chain(&[&k.mult(&z.web), &k.s_map(&g), &f]);
        law_mat(&mut c8, "g ⋆ f = τ∘S g∘f", kleisli_s_compose(&g, &f, n), via_mult, everywhere);
        law_mat(&mut c8, "ι_0 ⋆ f = f", kleisli_s_compose(&k.inj(0, &y.web)?, &f, n), ok(f.clone()), everywhere);
        law_mat(&mut c8, "g ⋆ ι_0 = g", kleisli_s_compose(&g, &k.inj(0, &y.web)?, n), ok(g.clone()), everywhere);
    }
    finish(suite, c8);

    let mut c9 = Case::new("taylor-member");
    for _ in 0..st.samples.min(4) {
        let f = sample_kleisli(x, y, d, c, &mut s, false)?;
        if let Partial::Defined(mut t) = taylor(&f, cfg)? {
            let v = t.check()?.clone();
            c9.check(!v.is_refuted(), || format!("T f refuted: {v:?}"));
        } else {
            c9.vacuous();
        }
    }
    finish(suite, c9);
    Ok(())
}

fn mats(r: Result<Partial<KleisliMor>, TaylorError>) -> Result<Partial<Matrix>, TaylorError> {
    r.map(|p| p.map(|k| k.mat))
}

fn series_suite(st: &Setup, suite: &mut SuiteReport) -> Result<(), TaylorError> {
    let c = st.carrier();
    let cfg = st.cfg;
    let (n, d) = (cfg.s_bound, cfg.bang_degree);
    let (x, y) = (st.x(), st.y());
    let sx = s_space(x, n)?;
    let mut s = st.sampler("taylor.series");
    let zero = Vector::zero(&x.web, c);

    let mut c1 = Case::new("oracle-equivalence");
    let mut c2 = Case::new("constant-family");
    let mut c3 = Case::new("linear-series");
    for _ in 0..st.samples.min(24) {
        let f = sample_kleisli(x, y, d, c, &mut s, false)?;
        let mut xs: Vec<Vector> = (0..n).map(|_| sample_vec(x, c, &mut s)).collect();
        if s.chance(1, 3) {
            // (x, u, 0, …): the first-order expansion
            for v in xs.iter_mut().skip(2) {
                *v = zero.clone();
            }
        }
        let wit = witness_vec(n, &xs)?;
        if x.coh.is_some() && crate::laws::member_any(&sx, &wit)?.is_refuted() {
            // outside the cliques of S X the truncated promotion forgets terms
            c1.vacuous();
            continue;
        }
        let got = taylor_apply_series(&f, &xs, cfg)?;
        let want = series_oracle(&f, &xs, cfg);
        for (j, (g, w)) in got.into_iter().zip(want).enumerate() {
            law_vec(&mut c1, &format!("component {j}"), Ok::<_, TaylorError>(g), Ok(w), |_| true);
        }

        let mut only = vec![zero.clone(); n];
        only[0] = xs[0].clone();
        let got = taylor_apply_series(&f, &only, cfg)?;
        let fx = mat_apply(&f.mat, &promote(&xs[0], &f.bang_dom()))?;
        law_vec(&mut c2, "component 0 = f(x)", Ok::<_, TaylorError>(got[0].clone()), Ok(fx), |_| true);
        for (j, g) in got.iter().enumerate().skip(1) {
            law_vec(&mut c2, &format!("component {j} = 0"), Ok::<_, TaylorError>(g.clone()), ok(Vector::zero(&y.web, c)), |_| true);
        }

        let g = sample_morphism(x, y, c, &mut s);
        let dg = der_functor(&g, x, y, d)?;
        let got = taylor_apply_series(&dg, &xs, cfg)?;
        for (j, (out, xj)) in got.into_iter().zip(&xs).enumerate() {
            law_vec(&mut c3, &format!("component {j} = g·x_{j}"), Ok::<_, TaylorError>(out), Ok(mat_apply(&g, xj)?), |_| true);
        }
    }
    for k in [c1, c2, c3] {
        finish(suite, k);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcr::q;
    use crate::spaces::{BaseData, ModelId};

    fn pcoh(size: u32) -> SpaceRepr {
        SpaceRepr::make(ModelId::Pcoh, &BaseData::web(size)).unwrap()
    }

    #[test]
    fn coalgebra_reads_the_index_sum() {
        let bd = bang_web(&d_web(4), 2, None);
        let h = coalgebra_mat(&bd, Carrier::Rational).unwrap();
        let x = Vector::from_entries(&d_web(4), Carrier::Rational, (0..4).map(|i| (ix(i), Scalar::Rational(q(i as i64 + 10, 1))))).unwrap();
        let hx = mat_apply(&h, &x).unwrap().expect_defined("sum");
        assert_eq!(hx.get(&Label::bag(vec![ix(1), ix(2)])), Scalar::Rational(q(13, 1)));
        assert_eq!(hx.get(&Label::bag(vec![])), Scalar::Rational(q(10, 1)));
        assert!(hx.get(&Label::bag(vec![ix(2), ix(3)])).is_zero());
    }

    #[test]
    fn ratio_counts_index_assignments() {
        let a = Label::Atom(0);
        let m = Multiset::new(vec![at(0, &a), at(0, &a), at(1, &a)]);
        assert_eq!(taylor_ratio(&m), BigUint::from(3u32));
    }

    #[test]
    fn taylor_of_derelict_is_derelict() {
        let x = pcor_x();
        let cfg = TruncCfg { bang_degree: 2, s_bound: 3 };
        let id = der_functor(&Matrix::identity(&x.web, Carrier::NonnegRational), &x, &x, 2).unwrap();
        let t = taylor_mat(&id, cfg).unwrap().expect_defined("total");
        let sx = s_space(&x, 3).unwrap();
        let bsx = bang_web(&sx.web, 2, None);
        assert_eq!(t, der(&bsx, Carrier::NonnegRational).unwrap());
    }

    fn pcor_x() -> SpaceRepr {
        pcoh(1)
    }

    #[test]
    fn monomials_compose_to_degree_two() {
        let k = SumCtx::new(3, Carrier::Rational).unwrap();
        let w = Arc::new(Web::Atoms(1));
        let f = k.inj(1, &w).unwrap();
        let g = k.inj(1, &w).unwrap();
        assert_eq!(kleisli_s_compose(&g, &f, 3).unwrap().expect_defined("single term"), k.inj(2, &w).unwrap());
    }

    #[test]
    fn square_expands_with_cross_term() {
        // f(y) = y², so f(x + u ε) = x² + 2xu ε + u² ε²
        let x = SpaceRepr::make(ModelId::Kothe, &BaseData::web(1)).unwrap();
        let c = Carrier::Rational;
        let a = Label::Atom(0);
        let bx = bang_web(&x.web, 2, None);
        let mut m = Matrix::zero(&bx, &x.web, c);
        m.set(Label::bag(vec![a.clone(), a.clone()]), a.clone(), Scalar::Rational(q(1, 1)));
        let f = KleisliMor::new(x.clone(), x.clone(), m, 2).unwrap();
        let v = |r: i64| Vector::from_entries(&x.web, c, [(a.clone(), Scalar::Rational(q(r, 1)))]).unwrap();
        let out = taylor_apply_series(&f, &[v(3), v(-5)], TruncCfg { bang_degree: 2, s_bound: 3 }).unwrap();
        let got: Vec<Scalar> = out.into_iter().map(|p| p.expect_defined("total").get(&a)).collect();
        assert_eq!(got, vec![Scalar::Rational(q(9, 1)), Scalar::Rational(q(-30, 1)), Scalar::Rational(q(25, 1))]);
    }

    #[test]
    fn mutated_coalgebra_is_caught() {
        let cfg = TruncCfg { bang_degree: 2, s_bound: 2 };
        let mut st = Setup::new(ModelId::Pcoh, &[BaseData::web(1), BaseData::web(1), BaseData::web(1)], cfg, 4, 1).unwrap();
        assert!(run_taylor_suite("taylor.coalgebra", &st).passed());
        st.mutation = Some(Mutation::Coalgebra);
        let r = run_taylor_suite("taylor.coalgebra", &st);
        assert!(r.case("coalgebra-counit").unwrap().witness.is_some());
    }
}
