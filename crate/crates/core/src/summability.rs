//! The summation object D on indices 0..N, the summability structure S = D ⊸ _,
//! its bimonad and strength matrices, the bimonoid on D, and the representability suite.
//!
//! A vector of S X is an N-indexed family of vectors of X, read off with the projections;
//! it is a point exactly when the family is summable.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

use crate::families::{
    abs_mat, abs_vec, mat_apply, mat_compose, scalar_product, tensor_mat, Coh, FamilyError, Label,
    Matrix, Vector, Web,
};
use crate::laws::{
    everywhere, law_mat, law_vec, member_any, random_matrix, random_vector, sample_morphism, sample_vec, then, Setup,
};
use crate::ll::{cur, ev, lambda, rho, sigma, LlError};
use crate::pcr::{Carrier, Partial};
use crate::report::{Case, SuiteReport};
use crate::sample::Sampler;
use crate::spaces::{all_vectors, is_covering, member_hom, ModelId, Oracle, SpaceError, SpaceRepr};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SumError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Ll(#[from] LlError),
    #[error("index {0} is outside the summation bound {1}")]
    Index(usize, usize),
    #[error("the summation bound must be at least 1")]
    ZeroBound,
    #[error("unknown structure map `{0}`")]
    UnknownKind(String),
    #[error("web {0} is not {1}")]
    Shape(String, &'static str),
}

pub fn d_web(n: usize) -> Arc<Web> {
    Arc::new(Web::Indices(n as u32))
}

/// Web of S X: pairs (i, a).
pub fn s_web(n: usize, x: &Arc<Web>) -> Arc<Web> {
    Web::pair(&d_web(n), x)
}

pub(crate) fn ix(i: usize) -> Label {
    Label::Idx(i as u32)
}

/// The label (i, a) of S X.
pub fn s_label(i: usize, a: &Label) -> Label {
    at(i, a)
}

pub(crate) fn at(i: usize, a: &Label) -> Label {
    Label::pair(ix(i), a.clone())
}

/// (i, a) from a label of S X.
pub fn split_s(l: &Label) -> Option<(usize, &Label)> {
    let (i, a) = l.as_pair()?;
    Some((i.as_idx()? as usize, a))
}

/// A space on `web` whose points are {Δ}⊥⊥, tested against the basis.
pub fn diag_space(web: Arc<Web>, model: ModelId) -> SpaceRepr {
    let c = model.carrier();
    let p = vec![Vector::diag(&web, c)];
    let q: Vec<Vector> = web.labels().into_iter().map(|l| Vector::basis(&web, c, l).expect("own label")).collect();
    let coh = (model == ModelId::Coh).then(|| Arc::new(Coh::Full));
    let oracle = match model {
        ModelId::Pcoh => Oracle::Cube,
        ModelId::Coh => Oracle::Clique(Arc::new(Coh::Full)),
        _ => Oracle::Total,
    };
    SpaceRepr {
        model,
        web,
        p,
        q,
        p_exact: true,
        q_certified: true,
        p_dominating: matches!(model, ModelId::Pcoh | ModelId::Coh | ModelId::Rel | ModelId::Fin),
        // the dual's points are singletons only in the coherence model
        q_dominating: model == ModelId::Coh,
        coh,
        oracle: Some(oracle),
    }
}

/// D = ({0..N-1}, ℓ∞) with P = {Δ} and Q = {e_i}.
pub fn d_space(n: usize, model: ModelId) -> Result<SpaceRepr, SumError> {
    if n == 0 {
        return Err(SumError::ZeroBound);
    }
    Ok(diag_space(d_web(n), model))
}

/// S X = D ⊸ X.
pub fn s_space(x: &SpaceRepr, n: usize) -> Result<SpaceRepr, SumError> {
    Ok(d_space(n, x.model)?.arrow(x)?)
}

/// The vector of S X holding the family (x_0, …, x_{N-1}).
pub fn witness_vec(n: usize, xs: &[Vector]) -> Result<Vector, SumError> {
    let first = xs.first().ok_or(SumError::ZeroBound)?;
    if xs.len() > n {
        return Err(SumError::Index(xs.len() - 1, n));
    }
    let web = s_web(n, &first.web);
    let c = first.carrier;
    let m = xs.iter().enumerate().flat_map(|(i, x)| x.iter().map(move |(a, v)| (at(i, a), v.clone()))).collect();
    Ok(Vector::from_map(&web, c, m))
}

/// The matrix Y ⊸ S X whose i-th projection is f_i.
pub fn witness_mat(n: usize, fs: &[Matrix]) -> Result<Matrix, SumError> {
    let first = fs.first().ok_or(SumError::ZeroBound)?;
    if fs.len() > n {
        return Err(SumError::Index(fs.len() - 1, n));
    }
    let cod = s_web(n, &first.cod);
    let m = fs
        .iter()
        .enumerate()
        .flat_map(|(i, f)| f.iter().map(move |((b, a), v)| ((b.clone(), at(i, a)), v.clone())))
        .collect();
    Ok(Matrix::from_map(&first.dom, &cod, first.carrier, m))
}

/// Pointwise sum of a nonempty list of matrices on the same webs.
pub fn sum_mats(ms: &[Matrix]) -> Result<Partial<Matrix>, FamilyError> {
    let mut acc = ms[0].clone();
    for m in &ms[1..] {
        match acc.add(m)? {
            Partial::Defined(v) => acc = v,
            u => return Ok(u),
        }
    }
    Ok(Partial::Defined(acc))
}

pub fn sum_vecs(vs: &[Vector]) -> Result<Partial<Vector>, FamilyError> {
    let mut acc = vs[0].clone();
    for v in &vs[1..] {
        match acc.add(v)? {
            Partial::Defined(w) => acc = w,
            u => return Ok(u),
        }
    }
    Ok(Partial::Defined(acc))
}

/// The structure maps of S and of the bimonoid on D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructKind {
    /// π_i: S X ⊸ X.
    Proj(usize),
    /// σ: S X ⊸ X.
    Sum,
    /// ι_i: X ⊸ S X.
    Inj(usize),
    /// τ: S S X ⊸ S X, the monad multiplication.
    Mult,
    /// θ: S X ⊸ S S X, the comonad comultiplication.
    Lift,
    /// c: S S X ⊸ S S X, the swap.
    Swap,
    /// φR: S X ⊗ Y ⊸ S (X ⊗ Y).
    StrR,
    /// φL: X ⊗ S Y ⊸ S (X ⊗ Y).
    StrL,
    /// ψ: S (X ⊸ Y) ⊸ (X ⊸ S Y).
    Pointwise,
    /// S (X & Y) ⊸ S X & S Y.
    WithIso,
    /// S X ⊗ S Y ⊸ S (X ⊗ Y).
    Dist,
    /// Δ: 1 ⊸ D.
    DUnit,
    /// m̄: D ⊗ D ⊸ D.
    DMult,
    /// p̄_0: D ⊸ 1.
    DCounit,
    /// c̄: D ⊸ D ⊗ D.
    DComult,
}

impl fmt::Display for StructKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructKind::Proj(i) => write!(f, "proj:{i}"),
            StructKind::Inj(i) => write!(f, "inj:{i}"),
            StructKind::Sum => f.write_str("sum"),
            StructKind::Mult => f.write_str("mult"),
            StructKind::Lift => f.write_str("lift"),
            StructKind::Swap => f.write_str("swap"),
            StructKind::StrR => f.write_str("str-r"),
            StructKind::StrL => f.write_str("str-l"),
            StructKind::Pointwise => f.write_str("pointwise"),
            StructKind::WithIso => f.write_str("with-iso"),
            StructKind::Dist => f.write_str("dist"),
            StructKind::DUnit => f.write_str("d-unit"),
            StructKind::DMult => f.write_str("d-mult"),
            StructKind::DCounit => f.write_str("d-counit"),
            StructKind::DComult => f.write_str("d-comult"),
        }
    }
}

impl FromStr for StructKind {
    type Err = SumError;

    fn from_str(s: &str) -> Result<Self, SumError> {
        let bad = || SumError::UnknownKind(s.into());
        if let Some((head, i)) = s.split_once(':') {
            let i: usize = i.parse().map_err(|_| bad())?;
            return match head {
                "proj" => Ok(StructKind::Proj(i)),
                "inj" => Ok(StructKind::Inj(i)),
                _ => Err(bad()),
            };
        }
        Ok(match s {
            "sum" => StructKind::Sum,
            "mult" => StructKind::Mult,
            "lift" => StructKind::Lift,
            "swap" => StructKind::Swap,
            "str-r" => StructKind::StrR,
            "str-l" => StructKind::StrL,
            "pointwise" => StructKind::Pointwise,
            "with-iso" => StructKind::WithIso,
            "dist" => StructKind::Dist,
            "d-unit" => StructKind::DUnit,
            "d-mult" => StructKind::DMult,
            "d-counit" => StructKind::DCounit,
            "d-comult" => StructKind::DComult,
            _ => return Err(bad()),
        })
    }
}

/// Matrix of a structure map; `y` is the second space for the binary ones and is ignored otherwise.
pub fn s_struct_mat(kind: StructKind, x: &Arc<Web>, y: &Arc<Web>, n: usize, c: Carrier) -> Result<Matrix, SumError> {
    let k = SumCtx::new(n, c)?;
    Ok(match kind {
        StructKind::Proj(i) => k.proj(i, x)?,
        StructKind::Sum => k.sum(x),
        StructKind::Inj(i) => k.inj(i, x)?,
        StructKind::Mult => k.mult(x),
        StructKind::Lift => k.lift(x),
        StructKind::Swap => k.swap(x),
        StructKind::StrR => k.str_r(x, y),
        StructKind::StrL => k.str_l(x, y),
        StructKind::Pointwise => k.pointwise(x, y),
        StructKind::WithIso => k.with_iso(&[x.clone(), y.clone()]),
        StructKind::Dist => k.dist(x, y),
        StructKind::DUnit => k.d_unit(),
        StructKind::DMult => k.d_mult(),
        StructKind::DCounit => k.d_counit(0)?,
        StructKind::DComult => k.d_comult(),
    })
}

/// Builds structure maps at bound N over one carrier. Index additions reaching N are dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SumCtx {
    pub n: usize,
    pub c: Carrier,
}

impl SumCtx {
    pub fn new(n: usize, c: Carrier) -> Result<SumCtx, SumError> {
        if n == 0 {
            return Err(SumError::ZeroBound);
        }
        Ok(SumCtx { n, c })
    }

    pub fn d(&self) -> Arc<Web> {
        d_web(self.n)
    }

    pub fn s(&self, x: &Arc<Web>) -> Arc<Web> {
        s_web(self.n, x)
    }

    fn index(&self, i: usize) -> Result<(), SumError> {
        if i < self.n {
            Ok(())
        } else {
            Err(SumError::Index(i, self.n))
        }
    }

    fn kron(&self, dom: &Arc<Web>, cod: &Arc<Web>, ones: Vec<(Label, Label)>) -> Matrix {
        Matrix::kronecker(dom, cod, self.c, ones)
    }

    pub fn proj(&self, i: usize, x: &Arc<Web>) -> Result<Matrix, SumError> {
        self.index(i)?;
        Ok(self.kron(&self.s(x), x, x.labels().into_iter().map(|a| (at(i, &a), a)).collect()))
    }

    pub fn inj(&self, i: usize, x: &Arc<Web>) -> Result<Matrix, SumError> {
        Ok(self.proj(i, x)?.transpose())
    }

    pub fn sum(&self, x: &Arc<Web>) -> Matrix {
        let ones = (0..self.n).flat_map(|i| x.labels().into_iter().map(move |a| (at(i, &a), a))).collect();
        self.kron(&self.s(x), x, ones)
    }

    /// S f = D ⊸ f.
    pub fn s_map(&self, f: &Matrix) -> Matrix {
        let m = f
            .iter()
            .flat_map(|((a, b), v)| (0..self.n).map(move |i| ((at(i, a), at(i, b)), v.clone())))
            .collect();
        Matrix::from_map(&self.s(&f.dom), &self.s(&f.cod), f.carrier, m)
    }

    /// τ_{(j,(k,a)),(j+k,a)} = 1.
    pub fn mult(&self, x: &Arc<Web>) -> Matrix {
        let sx = self.s(x);
        let mut ones = Vec::new();
        for j in 0..self.n {
            for k in 0..self.n - j {
                for a in x.labels() {
                    ones.push((at(j, &at(k, &a)), at(j + k, &a)));
                }
            }
        }
        self.kron(&self.s(&sx), &sx, ones)
    }

    /// θ_{(i,a),(i,(i,a))} = 1.
    pub fn lift(&self, x: &Arc<Web>) -> Matrix {
        let sx = self.s(x);
        let ones = (0..self.n).flat_map(|i| x.labels().into_iter().map(move |a| (at(i, &a), at(i, &at(i, &a))))).collect();
        self.kron(&sx, &self.s(&sx), ones)
    }

    pub fn swap(&self, x: &Arc<Web>) -> Matrix {
        let ssx = self.s(&self.s(x));
        let mut ones = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                for a in x.labels() {
                    ones.push((at(i, &at(j, &a)), at(j, &at(i, &a))));
                }
            }
        }
        self.kron(&ssx, &ssx, ones)
    }

    pub fn str_r(&self, x: &Arc<Web>, y: &Arc<Web>) -> Matrix {
        let dom = Web::pair(&self.s(x), y);
        let ones = dom
            .labels()
            .into_iter()
            .map(|l| {
                let (ia, b) = l.as_pair().unwrap();
                let (i, a) = split_s(ia).unwrap();
                let t = at(i, &Label::pair(a.clone(), b.clone()));
                (l, t)
            })
            .collect();
        self.kron(&dom, &self.s(&Web::pair(x, y)), ones)
    }

    pub fn str_l(&self, x: &Arc<Web>, y: &Arc<Web>) -> Matrix {
        let dom = Web::pair(x, &self.s(y));
        let ones = dom
            .labels()
            .into_iter()
            .map(|l| {
                let (a, ib) = l.as_pair().unwrap();
                let (i, b) = split_s(ib).unwrap();
                let t = at(i, &Label::pair(a.clone(), b.clone()));
                (l, t)
            })
            .collect();
        self.kron(&dom, &self.s(&Web::pair(x, y)), ones)
    }

    pub fn dist(&self, x: &Arc<Web>, y: &Arc<Web>) -> Matrix {
        let dom = Web::pair(&self.s(x), &self.s(y));
        let ones = dom
            .labels()
            .into_iter()
            .filter_map(|l| {
                let (ia, jb) = l.as_pair().unwrap();
                let (i, a) = split_s(ia).unwrap();
                let (j, b) = split_s(jb).unwrap();
                (i + j < self.n).then(|| (l.clone(), at(i + j, &Label::pair(a.clone(), b.clone()))))
            })
            .collect();
        self.kron(&dom, &self.s(&Web::pair(x, y)), ones)
    }

    pub fn pointwise(&self, x: &Arc<Web>, y: &Arc<Web>) -> Matrix {
        let dom = self.s(&Web::pair(x, y));
        let cod = Web::pair(x, &self.s(y));
        let ones = dom
            .labels()
            .into_iter()
            .map(|l| {
                let (i, ab) = split_s(&l).unwrap();
                let (a, b) = ab.as_pair().unwrap();
                let t = Label::pair(a.clone(), at(i, b));
                (l, t)
            })
            .collect();
        self.kron(&dom, &cod, ones)
    }

    /// ⟨S π_k⟩: S (&_k X_k) ⊸ &_k S X_k.
    pub fn with_iso(&self, parts: &[Arc<Web>]) -> Matrix {
        let w = Arc::new(Web::Tagged(parts.to_vec()));
        let sw = Arc::new(Web::Tagged(parts.iter().map(|p| self.s(p)).collect()));
        let ones = self
            .s(&w)
            .labels()
            .into_iter()
            .map(|l| {
                let (i, ka) = split_s(&l).unwrap();
                let (k, a) = ka.as_tag().unwrap();
                let t = Label::tag(k, at(i, a));
                (l, t)
            })
            .collect();
        self.kron(&self.s(&w), &sw, ones)
    }

    /// ι_i as a point 1 ⊸ D.
    pub fn d_basis(&self, i: usize) -> Result<Matrix, SumError> {
        self.index(i)?;
        Ok(self.kron(&Arc::new(Web::Unit), &self.d(), vec![(Label::Star, ix(i))]))
    }

    pub fn d_unit(&self) -> Matrix {
        self.kron(&Arc::new(Web::Unit), &self.d(), (0..self.n).map(|i| (Label::Star, ix(i))).collect())
    }

    /// p̄_i: D ⊸ 1.
    pub fn d_counit(&self, i: usize) -> Result<Matrix, SumError> {
        Ok(self.d_basis(i)?.transpose())
    }

    pub fn d_mult(&self) -> Matrix {
        let d = self.d();
        self.kron(&Web::pair(&d, &d), &d, (0..self.n).map(|i| (Label::pair(ix(i), ix(i)), ix(i))).collect())
    }

    /// c̄_{n,(i,j)} = δ(n = i + j).
    pub fn d_comult(&self) -> Matrix {
        let d = self.d();
        let mut ones = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n - i {
                ones.push((ix(i + j), Label::pair(ix(i), ix(j))));
            }
        }
        self.kron(&d, &Web::pair(&d, &d), ones)
    }
}

// ---------------------------------------------------------------------------------------------
// suites

pub const SUM_SUITES: [&str; 4] = ["sum.ss", "sum.bimonad", "sum.bimonoid", "sum.representable"];

pub fn run_summability_suite(id: &str, st: &Setup) -> SuiteReport {
    let mut suite = SuiteReport::new(id, st.model.tag());
    let res = match id {
        "sum.ss" => structure(st, &mut suite),
        "sum.bimonad" => bimonad(st, &mut suite),
        "sum.bimonoid" => bimonoid(st, &mut suite),
        "sum.representable" => representable(st, &mut suite),
        _ => Err(SumError::UnknownKind(id.into())),
    };
    if let Err(e) = res {
        let mut c = Case::new("setup");
        c.fail(e.to_string());
        suite.push(c.finish());
    }
    suite
}

fn compose(t: &Matrix, s: &Matrix) -> Result<Partial<Matrix>, SumError> {
    Ok(mat_compose(t, s)?)
}

fn chain(ms: &[&Matrix]) -> Result<Partial<Matrix>, SumError> {
    Ok(crate::families::compose_all(ms)?)
}

fn ok<T>(v: T) -> Result<Partial<T>, SumError> {
    Ok(Partial::Defined(v))
}

fn id(w: &Arc<Web>, c: Carrier) -> Matrix {
    Matrix::identity(w, c)
}

fn tensor(a: &Matrix, b: &Matrix) -> Result<Matrix, SumError> {
    Ok(tensor_mat(a, b)?)
}

/// Sum of the nested indices of a label of S…S X.
fn nested(l: &Label, depth: usize) -> usize {
    let mut total = 0;
    let mut cur = l;
    for _ in 0..depth {
        match split_s(cur) {
            Some((i, a)) => {
                total += i;
                cur = a;
            }
            None => break,
        }
    }
    total
}

/// Shrink a family so that it is likely summable: scale by 1/N in convex models,
/// otherwise give each label to a single member.
fn thin_vecs(x: &SpaceRepr, xs: &mut [Vector], s: &mut Sampler) {
    let n = xs.len();
    if x.model == ModelId::Pcoh {
        let k = xs[0].carrier.from_q(crate::pcr::q(1, n as i64)).expect("unit fraction");
        for v in xs.iter_mut() {
            *v = v.scale(&k);
        }
        return;
    }
    for l in x.web.labels() {
        let keep = s.below(n);
        for (i, v) in xs.iter_mut().enumerate() {
            if i != keep && !v.get(&l).is_zero() {
                let mut m = v.entries().clone();
                m.remove(&l);
                *v = Vector::from_map(&v.web, v.carrier, m);
            }
        }
    }
}

fn thin_mats(model: ModelId, fs: &mut [Matrix], s: &mut Sampler) {
    let n = fs.len();
    if model == ModelId::Pcoh {
        let k = fs[0].carrier.from_q(crate::pcr::q(1, n as i64)).expect("unit fraction");
        for f in fs.iter_mut() {
            *f = f.scale(&k);
        }
        return;
    }
    let keys: Vec<(Label, Label)> = fs[0].dom.labels().into_iter().flat_map(|a| fs[0].cod.labels().into_iter().map(move |b| (a.clone(), b))).collect();
    for (a, b) in keys {
        let keep = s.below(n);
        for (i, f) in fs.iter_mut().enumerate() {
            if i != keep {
                f.set(a.clone(), b.clone(), f.carrier.zero());
            }
        }
    }
}

fn positive(v: &Vector) -> Result<Vector, SumError> {
    Ok(if v.carrier.is_signed() { abs_vec(v)? } else { v.clone() })
}

fn positive_mat(m: &Matrix) -> Result<Matrix, SumError> {
    Ok(if m.carrier.is_signed() { abs_mat(m)? } else { m.clone() })
}

/// A family of points is summable when the sum of the absolute values exists and is a point.
pub fn family_summable(x: &SpaceRepr, xs: &[Vector]) -> Result<bool, SumError> {
    let abs = xs.iter().map(positive).collect::<Result<Vec<_>, _>>()?;
    Ok(match sum_vecs(&abs)? {
        Partial::Defined(t) => !x.member_point(&t)?.is_refuted(),
        Partial::Undefined { .. } => false,
    })
}

pub fn family_summable_hom(x: &SpaceRepr, y: &SpaceRepr, fs: &[Matrix]) -> Result<bool, SumError> {
    let abs = fs.iter().map(positive_mat).collect::<Result<Vec<_>, _>>()?;
    Ok(match sum_mats(&abs)? {
        Partial::Defined(t) => !member_hom(x, y, &t)?.is_refuted(),
        Partial::Undefined { .. } => false,
    })
}

fn finish(suite: &mut SuiteReport, case: Case) {
    suite.push(case.finish());
}

fn structure(st: &Setup, suite: &mut SuiteReport) -> Result<(), SumError> {
    let c = st.carrier();
    let n = st.cfg.s_bound;
    let k = SumCtx::new(n, c)?;
    let (x, y, z) = (st.x(), st.y(), st.z());
    let xw = &x.web;
    let sx = s_space(x, n)?;
    let mut s = st.sampler("sum.ss");

    let mut c0 = Case::new("d-space");
    let d = d_space(n, st.model)?;
    c0.check(is_covering(&d.p, &d.web) && is_covering(&d.q, &d.web), || "generators of D do not cover".into());
    for i in 0..n {
        for j in 0..n {
            let e = Vector::basis(&d.web, c, ix(i))?;
            let f = Vector::basis(&d.web, c, ix(j))?;
            let want = if i == j { c.one() } else { c.zero() };
            let got = scalar_product(&e, &f)?;
            c0.check(got == Partial::Defined(want.clone()), || format!("⟨ι_{i}, e_{j}⟩ = {got}, expected {want}"));
        }
    }
    // Q certification: against the oracle, exhaustively where the carrier is finite
    let pc = st.model.carrier();
    let vecs = match all_vectors(&d.web, pc) {
        Some(v) => v,
        None => (0..st.samples).map(|_| random_vector(&d.web, pc, &mut s)).collect(),
    };
    for v in &vecs {
        let by_q = !d.member_point(v)?.is_refuted();
        let truth = d.oracle_point(v).unwrap_or(true);
        c0.check(by_q == truth, || format!("D membership of {v}: generators say {by_q}, ground truth {truth}"));
    }
    finish(suite, c0);

    let mut c1 = Case::new("proj-inj");
    for i in 0..n {
        let si = k.inj(i, xw)?;
        let sum_i = compose(&k.sum(xw), &si);
        law_mat(&mut c1, &format!("σ∘ι_{i} = id"), sum_i, ok(id(xw, c)), everywhere);
        for j in 0..n {
            let want = if i == j { id(xw, c) } else { Matrix::zero(xw, xw, c) };
            law_mat(&mut c1, &format!("π_{j}∘ι_{i} = δ id"), compose(&k.proj(j, xw)?, &si), ok(want), everywhere);
        }
    }
    finish(suite, c1);

    let mut c2 = Case::new("factorization");
    let parts = (0..n).map(|i| Ok(mat_compose(&k.inj(i, xw)?, &k.proj(i, xw)?)?.expect_defined("kronecker"))).collect::<Result<Vec<_>, SumError>>()?;
    law_mat(&mut c2, "Σ ι_i∘π_i = id", Ok::<_, SumError>(sum_mats(&parts)?), ok(id(&k.s(xw), c)), everywhere);
    finish(suite, c2);

    let mut c3 = Case::new("jointly-monic");
    for _ in 0..st.samples {
        let f = random_matrix(&y.web, &k.s(xw), c, &mut s);
        let comps = (0..n).map(|i| Ok(mat_compose(&k.proj(i, xw)?, &f)?.expect_defined("projection"))).collect::<Result<Vec<_>, SumError>>()?;
        let rebuilt = witness_mat(n, &comps)?.rewebbed(&y.web, &k.s(xw))?;
        law_mat(&mut c3, "⟨π_i∘f⟩ = f", ok(rebuilt), ok(f.clone()), everywhere);
        let mut g = f.clone();
        let a = s.pick(&y.web.labels()).clone();
        let b = s.pick(&k.s(xw).labels()).clone();
        crate::ll::flip_entry(&mut g, a, b);
        let seen = (0..n).any(|i| {
            let p = k.proj(i, xw).unwrap();
            mat_compose(&p, &f).ok() != mat_compose(&p, &g).ok()
        });
        c3.check(seen, || format!("no projection separates {f} from {g}"));
    }
    finish(suite, c3);

    let mut c4 = Case::new("witness-roundtrip");
    let mut summable_seen = 0;
    for _ in 0..st.samples {
        let mut xs: Vec<Vector> = (0..n).map(|_| sample_vec(x, c, &mut s)).collect();
        if s.chance(1, 2) {
            thin_vecs(x, &mut xs, &mut s);
        }
        let w = witness_vec(n, &xs)?;
        for (i, xi) in xs.iter().enumerate() {
            law_vec(&mut c4, &format!("π_{i}·w = x_{i}"), Ok::<_, SumError>(mat_apply(&k.proj(i, xw)?, &w)?), ok(xi.clone()), |_| true);
        }
        law_vec(&mut c4, "σ·w = Σ x_i", Ok::<_, SumError>(mat_apply(&k.sum(xw), &w)?), Ok(sum_vecs(&xs)?), |_| true);
        let by_sum = family_summable(x, &xs)?;
        let by_witness = !member_any(&sx, &w)?.is_refuted();
        summable_seen += by_sum as usize;
        c4.check(by_sum == by_witness, || {
            format!("family {:?}: pointwise sum says summable={by_sum}, witness in S X says {by_witness}", xs.iter().map(|v| v.to_string()).collect::<Vec<_>>())
        });
        if x.q_certified {
            let abs = xs.iter().map(positive).collect::<Result<Vec<_>, _>>()?;
            if let Partial::Defined(t) = sum_vecs(&abs)? {
                if let Some(truth) = x.oracle_point(&t) {
                    c4.check(truth == by_sum, || format!("sum {t}: ground truth {truth}, generators {by_sum}"));
                }
            }
        }
    }
    c4.note(format!("{summable_seen} of {} sampled families summable", st.samples));
    finish(suite, c4);

    let mut c5 = Case::new("strong-distributivity");
    for _ in 0..st.samples.min(24) {
        let mut fs: Vec<Matrix> = (0..n).map(|_| sample_morphism(y, x, c, &mut s)).collect();
        thin_mats(st.model, &mut fs, &mut s);
        if !family_summable_hom(y, x, &fs)? {
            c5.vacuous();
            continue;
        }
        let big = witness_mat(n, &fs)?.rewebbed(&y.web, &k.s(xw))?;
        let total = sum_mats(&fs)?;
        law_mat(&mut c5, "σ∘F = Σ f_i", compose(&k.sum(xw), &big), Ok(total.clone()), everywhere);
        let g = sample_morphism(x, z, c, &mut s);
        let lhs = then(Ok(total.clone()), |t| compose(&g, &t));
        let sg = k.s_map(&g);
        let rhs = chain(&[&k.sum(&z.web), &sg, &big]);
        law_mat(&mut c5, "g∘Σ f_i = σ∘S g∘F", lhs, rhs, everywhere);
        let h = sample_morphism(z, y, c, &mut s);
        let lhs = then(Ok(total), |t| compose(&t, &h));
        law_mat(&mut c5, "(Σ f_i)∘h = σ∘(F∘h)", lhs, chain(&[&k.sum(xw), &big, &h]), everywhere);
    }
    finish(suite, c5);
    Ok(())
}

fn bimonad(st: &Setup, suite: &mut SuiteReport) -> Result<(), SumError> {
    let c = st.carrier();
    let n = st.cfg.s_bound;
    let k = SumCtx::new(n, c)?;
    let (x, y) = (st.x(), st.y());
    let xw = &x.web;
    let sxw = k.s(xw);
    let ssxw = k.s(&sxw);
    let tau = k.mult(xw);
    let theta = k.lift(xw);
    let sigma_x = k.sum(xw);
    let mut s = st.sampler("sum.bimonad");

    let mut c1 = Case::new("characterizations");
    for i in 0..n {
        // π_i∘τ = Σ_{j≤i} π_{i−j}∘π_j, with π_j the outer projection
        let lhs = compose(&k.proj(i, xw)?, &tau);
        let terms = (0..=i)
            .map(|j| Ok(mat_compose(&k.proj(i - j, xw)?, &k.proj(j, &sxw)?)?.expect_defined("kronecker")))
            .collect::<Result<Vec<_>, SumError>>()?;
        law_mat(&mut c1, &format!("π_{i}∘τ = Σ π_(i-j)∘π_j"), lhs, Ok(sum_mats(&terms)?), everywhere);
        for j in 0..n {
            let lhs = chain(&[&k.proj(i, xw)?, &k.proj(j, &sxw)?, &theta]);
            let want = if i == j { k.proj(i, xw)? } else { Matrix::zero(&sxw, xw, c) };
            law_mat(&mut c1, &format!("π_{i}∘π_{j}∘θ = δ π_{i}"), lhs, ok(want), everywhere);
            let lhs = chain(&[&k.proj(i, xw)?, &k.proj(j, &sxw)?, &k.swap(xw)]);
            let rhs = chain(&[&k.proj(j, xw)?, &k.proj(i, &sxw)?]);
            law_mat(&mut c1, &format!("π_{i}∘π_{j}∘c = π_{j}∘π_{i}"), lhs, rhs, everywhere);
        }
    }
    finish(suite, c1);

    let mut c2 = Case::new("monad-unit");
    let id_sx = id(&sxw, c);
    law_mat(&mut c2, "τ∘ι_0 = id", compose(&tau, &k.inj(0, &sxw)?), ok(id_sx.clone()), everywhere);
    law_mat(&mut c2, "τ∘S ι_0 = id", compose(&tau, &k.s_map(&k.inj(0, xw)?)), ok(id_sx.clone()), everywhere);
    finish(suite, c2);

    let mut c3 = Case::new("monad-assoc");
    let lhs = compose(&tau, &k.mult(&sxw));
    let rhs = compose(&tau, &k.s_map(&tau));
    law_mat(&mut c3, "τ∘τ_S = τ∘S τ", lhs, rhs, |a, _| nested(a, 3) < n);
    finish(suite, c3);

    let mut c4 = Case::new("comonad-counit");
    law_mat(&mut c4, "σ_S∘θ = id", compose(&k.sum(&sxw), &theta), ok(id_sx.clone()), everywhere);
    law_mat(&mut c4, "S σ∘θ = id", compose(&k.s_map(&sigma_x), &theta), ok(id_sx.clone()), everywhere);
    finish(suite, c4);

    let mut c5 = Case::new("comonad-coassoc");
    law_mat(&mut c5, "θ_S∘θ = S θ∘θ", compose(&k.lift(&sxw), &theta), compose(&k.s_map(&theta), &theta), everywhere);
    finish(suite, c5);

    let mut c6 = Case::new("bimonad-compat");
    law_mat(&mut c6, "σ∘ι_0 = id", compose(&sigma_x, &k.inj(0, xw)?), ok(id(xw, c)), everywhere);
    law_mat(&mut c6, "σ∘τ = σ∘σ_S", compose(&sigma_x, &tau), compose(&sigma_x, &k.sum(&sxw)), |a, _| nested(a, 2) < n);
    law_mat(&mut c6, "θ∘ι_0 = ι_0∘ι_0", compose(&theta, &k.inj(0, xw)?), compose(&k.inj(0, &sxw)?, &k.inj(0, xw)?), everywhere);
    let swap = k.swap(xw);
    law_mat(&mut c6, "c∘c = id", compose(&swap, &swap), ok(id(&ssxw, c)), everywhere);
    law_mat(&mut c6, "c∘ι_0 = S ι_0", compose(&swap, &k.inj(0, &sxw)?), ok(k.s_map(&k.inj(0, xw)?)), everywhere);
    law_mat(&mut c6, "S σ∘c = σ_S", compose(&k.s_map(&sigma_x), &swap), ok(k.sum(&sxw)), everywhere);
    finish(suite, c6);

    let mut c7 = Case::new("naturality");
    for _ in 0..st.samples.min(12) {
        let f = sample_morphism(x, y, c, &mut s);
        let sf = k.s_map(&f);
        let ssf = k.s_map(&sf);
        let yw = &y.web;
        law_mat(&mut c7, "τ∘SS f = S f∘τ", compose(&k.mult(yw), &ssf), compose(&sf, &tau), |a, _| nested(a, 2) < n);
        law_mat(&mut c7, "θ∘S f = SS f∘θ", compose(&k.lift(yw), &sf), compose(&ssf, &theta), everywhere);
        law_mat(&mut c7, "σ∘S f = f∘σ", compose(&k.sum(yw), &sf), compose(&f, &sigma_x), everywhere);
        for i in 0..n {
            law_mat(&mut c7, "π_i∘S f = f∘π_i", compose(&k.proj(i, yw)?, &sf), compose(&f, &k.proj(i, xw)?), everywhere);
        }
    }
    finish(suite, c7);

    let mut c8 = Case::new("strength");
    let yw = &y.web;
    let xy = Web::pair(xw, yw);
    let phr = k.str_r(xw, yw);
    let phl = k.str_l(xw, yw);
    law_mat(&mut c8, "σ∘φR = σ⊗Y", compose(&k.sum(&xy), &phr), ok(tensor(&sigma_x, &id(yw, c))?), everywhere);
    law_mat(&mut c8, "σ∘φL = X⊗σ", compose(&k.sum(&xy), &phl), ok(tensor(&id(xw, c), &k.sum(yw))?), everywhere);
    for i in 0..n {
        let lhs = compose(&k.proj(i, &xy)?, &phr);
        law_mat(&mut c8, "π_i∘φR = π_i⊗Y", lhs, ok(tensor(&k.proj(i, xw)?, &id(yw, c))?), everywhere);
        // π_i∘dist = Σ_{i1+i2=i} π_i1 ⊗ π_i2
        let lhs = compose(&k.proj(i, &xy)?, &k.dist(xw, yw));
        let terms = (0..=i).map(|a| tensor(&k.proj(a, xw)?, &k.proj(i - a, yw)?)).collect::<Result<Vec<_>, _>>()?;
        law_mat(&mut c8, "π_i∘dist = Σ π_i1⊗π_i2", lhs, Ok(sum_mats(&terms)?), everywhere);
    }
    finish(suite, c8);

    let mut c9 = Case::new("with-iso");
    let w = SpaceRepr::with(st.model, &[x.clone(), y.clone()]);
    let iso = k.with_iso(&[xw.clone(), yw.clone()]);
    let inv = iso.transpose();
    law_mat(&mut c9, "iso⁻¹∘iso = id", compose(&inv, &iso), ok(id(&k.s(&w.web), c)), everywhere);
    law_mat(&mut c9, "iso∘iso⁻¹ = id", compose(&iso, &inv), ok(id(&iso.cod, c)), everywhere);
    for (i, part) in [xw, yw].into_iter().enumerate() {
        let p_sw = crate::ll::proj(i + 1, &iso.cod, c)?;
        let p_w = crate::ll::proj(i + 1, &w.web, c)?;
        law_mat(&mut c9, "proj_k∘iso = S proj_k", compose(&p_sw, &iso), ok(k.s_map(&p_w).rewebbed(&k.s(&w.web), &k.s(part))?), everywhere);
    }
    finish(suite, c9);

    let mut c10 = Case::new("pointwise-iso");
    let psi = k.pointwise(xw, yw);
    law_mat(&mut c10, "ψ⁻¹∘ψ = id", compose(&psi.transpose(), &psi), ok(id(&psi.dom, c)), everywhere);
    let sxy = s_space(&x.arrow(y)?, n)?;
    let x_sy = x.arrow(&s_space(y, n)?)?;
    for _ in 0..st.samples {
        let v = sample_vec(&sxy, c, &mut s);
        let img = mat_apply(&psi, &v)?.expect_defined("relabelling");
        let a = member_any(&sxy, &v)?.is_refuted();
        let b = member_any(&x_sy, &img)?.is_refuted();
        c10.check(a == b, || format!("{v}: refuted in S(X⊸Y) is {a}, its image refuted in X⊸SY is {b}"));
    }
    finish(suite, c10);

    let mut c11 = Case::new("structure-not-refuted");
    let ssx = s_space(&sx_of(x, n)?, n)?;
    let sx = sx_of(x, n)?;
    let sy = s_space(y, n)?;
    let maps: Vec<(&str, &SpaceRepr, &SpaceRepr, Matrix)> = vec![
        ("π_0", &sx, x, k.proj(0, xw)?),
        ("σ", &sx, x, sigma_x.clone()),
        ("ι_0", x, &sx, k.inj(0, xw)?),
        ("τ", &ssx, &sx, tau.clone()),
        ("θ", &sx, &ssx, theta.clone()),
        ("c", &ssx, &ssx, swap.clone()),
    ];
    for (name, a, b, m) in &maps {
        let v = member_hom(a, b, m)?;
        c11.check(!v.is_refuted(), || format!("{name}: {v:?}"));
    }
    let sxt = sx.tensor(y)?;
    let sxy_t = s_space(&x.tensor(y)?, n)?;
    let v = member_hom(&sxt, &sxy_t, &phr)?;
    c11.check(!v.is_refuted(), || format!("φR: {v:?}"));
    let v = member_hom(&sx.tensor(&sy)?, &sxy_t, &k.dist(xw, yw))?;
    c11.check(!v.is_refuted(), || format!("dist: {v:?}"));
    finish(suite, c11);
    Ok(())
}

fn sx_of(x: &SpaceRepr, n: usize) -> Result<SpaceRepr, SumError> {
    s_space(x, n)
}

/// The middle-four interchange (A ⊗ B) ⊗ (C ⊗ E) ⊸ (A ⊗ C) ⊗ (B ⊗ E).
fn interchange(a: &Arc<Web>, b: &Arc<Web>, cw: &Arc<Web>, e: &Arc<Web>, c: Carrier) -> Matrix {
    let dom = Web::pair(&Web::pair(a, b), &Web::pair(cw, e));
    let cod = Web::pair(&Web::pair(a, cw), &Web::pair(b, e));
    let ones = dom
        .labels()
        .into_iter()
        .map(|l| {
            let (ab, ce) = l.as_pair().unwrap();
            let (x, y) = ab.as_pair().unwrap();
            let (u, v) = ce.as_pair().unwrap();
            let t = Label::pair(Label::pair(x.clone(), u.clone()), Label::pair(y.clone(), v.clone()));
            (l, t)
        })
        .collect::<Vec<_>>();
    Matrix::kronecker(&dom, &cod, c, ones)
}

fn bimonoid(st: &Setup, suite: &mut SuiteReport) -> Result<(), SumError> {
    let c = st.carrier();
    let n = st.cfg.s_bound;
    let k = SumCtx::new(n, c)?;
    let d = k.d();
    let dd = Web::pair(&d, &d);
    let unit = Arc::new(Web::Unit);
    let id_d = id(&d, c);
    let (delta, mbar, p0, cbar) = (k.d_unit(), k.d_mult(), k.d_counit(0)?, k.d_comult());
    let one_one = lambda(&unit, c); // 1 ⊗ 1 ⊸ 1
    let small = |l: &Label| l.as_pair().is_none_or(|(i, j)| outer_idx(i) + outer_idx(j) < n);

    let mut c1 = Case::new("monoid");
    let lhs = chain(&[&mbar, &tensor(&delta, &id_d)?, &lambda(&d, c).transpose()]);
    law_mat(&mut c1, "m̄∘(Δ⊗D)∘λ⁻¹ = id", lhs, ok(id_d.clone()), everywhere);
    let a = crate::ll::alpha(&d, &d, &d, c);
    let lhs = compose(&mbar, &tensor(&mbar, &id_d)?);
    let rhs = chain(&[&mbar, &tensor(&id_d, &mbar)?, &a]);
    law_mat(&mut c1, "m̄∘(m̄⊗D) = m̄∘(D⊗m̄)∘α", lhs, rhs, everywhere);
    law_mat(&mut c1, "m̄∘σ = m̄", compose(&mbar, &sigma(&d, &d, c)), ok(mbar.clone()), everywhere);
    finish(suite, c1);

    let mut c2 = Case::new("comonoid");
    let lhs = chain(&[&lambda(&d, c), &tensor(&p0, &id_d)?, &cbar]);
    law_mat(&mut c2, "λ∘(p̄_0⊗D)∘c̄ = id", lhs, ok(id_d.clone()), everywhere);
    let lhs = chain(&[&a, &tensor(&cbar, &id_d)?, &cbar]);
    let rhs = compose(&tensor(&id_d, &cbar)?, &cbar);
    law_mat(&mut c2, "α∘(c̄⊗D)∘c̄ = (D⊗c̄)∘c̄", lhs, rhs, everywhere);
    law_mat(&mut c2, "σ∘c̄ = c̄", compose(&sigma(&d, &d, c), &cbar), ok(cbar.clone()), everywhere);
    finish(suite, c2);

    let mut c3 = Case::new("bimonoid");
    let lhs = compose(&cbar, &mbar);
    let rhs = chain(&[&tensor(&mbar, &mbar)?, &interchange(&d, &d, &d, &d, c), &tensor(&cbar, &cbar)?]);
    law_mat(&mut c3, "c̄∘m̄ = (m̄⊗m̄)∘ex∘(c̄⊗c̄)", lhs, rhs, everywhere);
    let lhs = compose(&p0, &mbar);
    let rhs = compose(&one_one, &tensor(&p0, &p0)?);
    law_mat(&mut c3, "p̄_0∘m̄ = p̄_0⊗p̄_0", lhs, rhs, everywhere);
    let lhs = compose(&cbar, &delta);
    let rhs = compose(&tensor(&delta, &delta)?, &one_one.transpose());
    law_mat(&mut c3, "c̄∘Δ = Δ⊗Δ", lhs, rhs, |_, b| small(b));
    law_mat(&mut c3, "p̄_0∘Δ = id", compose(&p0, &delta), ok(id(&unit, c)), everywhere);
    finish(suite, c3);

    let mut c4 = Case::new("characterizations");
    for i in 0..n {
        let ii = k.d_basis(i)?;
        let terms = (0..=i)
            .map(|a| Ok(mat_compose(&tensor(&k.d_basis(a)?, &k.d_basis(i - a)?)?, &one_one.transpose())?.expect_defined("kronecker")))
            .collect::<Result<Vec<_>, SumError>>()?;
        law_mat(&mut c4, &format!("c̄∘ι_{i} = Σ ι_i⊗ι_j"), compose(&cbar, &ii), Ok(sum_mats(&terms)?), everywhere);
        law_mat(&mut c4, &format!("p̄_{i}∘Δ = id"), compose(&k.d_counit(i)?, &delta), ok(id(&unit, c)), everywhere);
        for j in 0..n {
            let lhs = chain(&[&mbar, &tensor(&ii, &k.d_basis(j)?)?, &one_one.transpose()]);
            let want = if i == j { ii.clone() } else { Matrix::zero(&unit, &d, c) };
            law_mat(&mut c4, &format!("m̄∘(ι_{i}⊗ι_{j}) = δ ι_{i}"), lhs, ok(want.clone()), everywhere);
            let want = if i == j { id(&unit, c) } else { Matrix::zero(&unit, &unit, c) };
            law_mat(&mut c4, &format!("p̄_{i}∘ι_{j} = δ"), compose(&k.d_counit(i)?, &k.d_basis(j)?), ok(want), everywhere);
        }
    }
    finish(suite, c4);

    let mut c5 = Case::new("structure-not-refuted");
    let ds = d_space(n, st.model)?;
    let dds = ds.tensor(&ds)?;
    let one = SpaceRepr::one(st.model);
    let maps: Vec<(&str, &SpaceRepr, &SpaceRepr, &Matrix)> =
        vec![("Δ", &one, &ds, &delta), ("m̄", &dds, &ds, &mbar), ("p̄_0", &ds, &one, &p0), ("c̄", &ds, &dds, &cbar)];
    for (name, a, b, m) in maps {
        let v = member_hom(a, b, &m.rewebbed(&a.web, &b.web)?)?;
        c5.check(!v.is_refuted(), || format!("{name}: {v:?}"));
    }
    let _ = dd;
    finish(suite, c5);
    Ok(())
}

fn outer_idx(l: &Label) -> usize {
    l.as_idx().map_or(0, |i| i as usize)
}

fn representable(st: &Setup, suite: &mut SuiteReport) -> Result<(), SumError> {
    let c = st.carrier();
    let n = st.cfg.s_bound;
    let k = SumCtx::new(n, c)?;
    let (x, y) = (st.x(), st.y());
    let (xw, yw) = (&x.web, &y.web);
    let d = d_space(n, st.model)?;
    let dw = k.d();
    let mut s = st.sampler("sum.representable");
    let rho_x_inv = rho(xw, c).transpose();

    let mut c1 = Case::new("uncurry-1");
    let xd = x.tensor(&d)?;
    for _ in 0..st.samples.min(32) {
        let mut fs: Vec<Matrix> = (0..n).map(|_| sample_morphism(x, y, c, &mut s)).collect();
        if s.chance(1, 2) {
            thin_mats(st.model, &mut fs, &mut s);
        }
        // h_{(a,i),b} = (f_i)_{a,b}
        let m = fs.iter().enumerate().flat_map(|(i, f)| f.iter().map(move |((a, b), v)| ((Label::pair(a.clone(), ix(i)), b.clone()), v.clone()))).collect();
        let h = Matrix::from_map(&xd.web, yw, c, m);
        for (i, f) in fs.iter().enumerate() {
            let lhs = chain(&[&h, &tensor(&id(xw, c), &k.d_basis(i)?)?, &rho_x_inv]);
            law_mat(&mut c1, &format!("h∘(X⊗ι_{i})∘ρ⁻¹ = f_{i}"), lhs, ok(f.clone()), everywhere);
            let ch = cur(&h)?;
            law_mat(&mut c1, &format!("π_{i}∘cur h = f_{i}"), compose(&k.proj(i, yw)?, &ch), ok(f.clone()), everywhere);
        }
        let lhs = chain(&[&h, &tensor(&id(xw, c), &k.d_unit())?, &rho_x_inv]);
        law_mat(&mut c1, "h∘(X⊗Δ)∘ρ⁻¹ = Σ f_i", lhs, Ok(sum_mats(&fs)?), everywhere);
        let by_sum = family_summable_hom(x, y, &fs)?;
        let by_h = !member_hom(&xd, y, &h)?.is_refuted();
        c1.check(by_sum == by_h, || format!("family summable={by_sum} but h ∈ X⊗D⊸Y is {by_h}"));
    }
    finish(suite, c1);

    let mut c2 = Case::new("uncurry-2");
    let xdd = xd.tensor(&d)?;
    let rho_xd_inv = rho(&xd.web, c).transpose();
    for _ in 0..st.samples.min(16) {
        let mut fs: Vec<Matrix> = (0..n * n).map(|_| sample_morphism(x, y, c, &mut s)).collect();
        if s.chance(1, 2) {
            thin_mats(st.model, &mut fs, &mut s);
        }
        // f_{i1,i2} = fs[i1*n+i2], h_{((a,i2),i1),b}
        let mut m = std::collections::BTreeMap::new();
        for i1 in 0..n {
            for i2 in 0..n {
                for ((a, b), v) in fs[i1 * n + i2].iter() {
                    m.insert((Label::pair(Label::pair(a.clone(), ix(i2)), ix(i1)), b.clone()), v.clone());
                }
            }
        }
        let h = Matrix::from_map(&xdd.web, yw, c, m);
        let cc = cur(&cur(&h)?)?;
        for i1 in 0..n {
            for i2 in 0..n {
                let f = &fs[i1 * n + i2];
                let inner = tensor(&id(xw, c), &k.d_basis(i2)?)?;
                let outer_m = tensor(&id(&xd.web, c), &k.d_basis(i1)?)?;
                let lhs = chain(&[&h, &outer_m, &rho_xd_inv, &inner, &rho_x_inv]);
                law_mat(&mut c2, "h∘(X⊗ι⊗ι)∘ρ⁻² = f", lhs, ok(f.clone()), everywhere);
                let lhs = chain(&[&k.proj(i1, yw)?, &k.proj(i2, &k.s(yw))?, &cc]);
                law_mat(&mut c2, "π_i1∘π_i2∘cur² h = f", lhs, ok(f.clone()), everywhere);
            }
        }
        let inner = tensor(&id(xw, c), &k.d_unit())?;
        let outer_m = tensor(&id(&xd.web, c), &k.d_unit())?;
        let lhs = chain(&[&h, &outer_m, &rho_xd_inv, &inner, &rho_x_inv]);
        law_mat(&mut c2, "h∘(X⊗Δ⊗Δ)∘ρ⁻² = Σ f", lhs, Ok(sum_mats(&fs)?), everywhere);
        let by_sum = family_summable_hom(x, y, &fs)?;
        let by_h = !member_hom(&xdd, y, &h)?.is_refuted();
        c2.check(by_sum == by_h, || format!("double family summable={by_sum} but h ∈ X⊗D⊗D⊸Y is {by_h}"));
    }
    finish(suite, c2);

    let mut c3 = Case::new("iterated-diagonal");
    let dd = d.tensor(&d)?;
    let flat = diag_space(dd.web.clone(), st.model);
    c3.check(dd.p.len() == 1 && dd.p[0] == flat.p[0], || format!("P of D⊗D is {:?}", dd.p.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
    let pc = st.model.carrier();
    let vecs = match all_vectors(&dd.web, pc) {
        Some(v) => v,
        None => (0..st.samples).map(|_| random_vector(&dd.web, pc, &mut s)).collect(),
    };
    for v in &vecs {
        let a = dd.member_point(v)?.is_refuted();
        let b = flat.member_point(v)?.is_refuted();
        c3.check(a == b, || format!("{v}: refuted in D⊗D is {a}, against Δ_(N×N) is {b}"));
    }
    finish(suite, c3);

    let mut c4 = Case::new("mate-projections");
    let sxw = k.s(xw);
    let e = ev(&dw, xw, c);
    let rho_inv = rho(&sxw, c).transpose();
    for i in 0..n {
        let lhs = chain(&[&e, &tensor(&id(&sxw, c), &k.d_basis(i)?)?, &rho_inv]);
        law_mat(&mut c4, &format!("ev∘(S X⊗ι_{i})∘ρ⁻¹ = π_{i}"), lhs, ok(k.proj(i, xw)?), everywhere);
    }
    let lhs = chain(&[&e, &tensor(&id(&sxw, c), &k.d_unit())?, &rho_inv]);
    law_mat(&mut c4, "ev∘(S X⊗Δ)∘ρ⁻¹ = σ", lhs, ok(k.sum(xw)), everywhere);
    finish(suite, c4);

    let mut c5 = Case::new("biproduct-collapse");
    let sx = s_space(x, n)?;
    let copies: Vec<SpaceRepr> = (0..n).map(|_| x.clone()).collect();
    let with = SpaceRepr::with(st.model, &copies);
    // S X ≅ &_i X by (i, a) ↦ (i+1, a)
    let ones = sxw
        .labels()
        .into_iter()
        .map(|l| {
            let (i, a) = split_s(&l).unwrap();
            let t = Label::tag(i as u32 + 1, a.clone());
            (l, t)
        })
        .collect::<Vec<_>>();
    let iso = Matrix::kronecker(&sxw, &with.web, c, ones);
    if st.model.is_total() {
        let v1 = member_hom(&sx, &with, &iso)?;
        let v2 = member_hom(&with, &sx, &iso.transpose())?;
        c5.check(v1.is_certified() && v2.is_certified(), || format!("S X ≅ &X: {v1:?}, {v2:?}"));
        let plus = SpaceRepr::plus(st.model, &copies);
        let idw = id(&with.web, c);
        let v3 = member_hom(&with, &plus, &idw)?;
        let v4 = member_hom(&plus, &with, &idw)?;
        c5.check(v3.is_certified() && v4.is_certified(), || format!("&X ≅ ⊕X: {v3:?}, {v4:?}"));
        let parts = (1..=n)
            .map(|i| Ok(mat_compose(&crate::ll::inj(i, &with.web, c)?, &crate::ll::proj(i, &with.web, c)?)?.expect_defined("kronecker")))
            .collect::<Result<Vec<_>, SumError>>()?;
        law_mat(&mut c5, "Σ inj_i∘proj_i = id", Ok::<_, SumError>(sum_mats(&parts)?), ok(idw), everywhere);
        for _ in 0..st.samples {
            let xs: Vec<Vector> = (0..n).map(|_| sample_vec(x, c, &mut s)).collect();
            let w = witness_vec(n, &xs)?;
            let v = member_any(&sx, &w)?;
            c5.check(!v.is_refuted(), || format!("family {w} not summable: {v:?}"));
        }
        c5.note(if c.is_complete() { "complete carrier: countable biproducts" } else { "every finite family summable at this truncation" });
    } else {
        // a constant family of a generator is not summable, so S X is strictly smaller than &X
        let g = x.p.iter().find(|v| !v.is_zero()).cloned().unwrap_or_else(|| Vector::zero(xw, x.carrier()));
        let w = witness_vec(n, &vec![g.clone(); n])?;
        let v = sx.member_point(&w)?;
        if n > 1 && !g.is_zero() {
            c5.check(v.is_refuted(), || format!("constant family of {g} accepted: {v:?}"));
        }
        c5.note("partial sums: S X is a proper subspace of the product");
    }
    finish(suite, c5);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::default_bases;
    use crate::ll::TruncCfg;
    use crate::pcr::{q, Scalar};
    use crate::spaces::BaseData;

    fn nn(a: i64, b: i64) -> Scalar {
        Scalar::Nonneg(q(a, b))
    }

    #[test]
    fn pcoh_d_is_the_unit_cube() {
        let d = d_space(2, ModelId::Pcoh).unwrap();
        let v = |a: Scalar, b: Scalar| Vector::from_entries(&d.web, Carrier::NonnegRational, [(ix(0), a), (ix(1), b)]).unwrap();
        assert!(d.member_point(&v(nn(1, 1), nn(1, 1))).unwrap().is_certified());
        assert!(d.member_point(&v(nn(3, 2), nn(0, 1))).unwrap().is_refuted());
    }

    #[test]
    fn comult_on_two() {
        let k = SumCtx::new(3, Carrier::Bool).unwrap();
        let hits: Vec<_> = k.d_comult().row(&ix(2)).map(|(b, _)| b.clone()).collect();
        assert_eq!(hits.len(), 3);
        for (i, j) in [(0, 2), (1, 1), (2, 0)] {
            assert!(hits.contains(&Label::pair(ix(i), ix(j))));
        }
    }

    #[test]
    fn halves_are_summable_but_ones_are_not() {
        let x = SpaceRepr::make(ModelId::Pcoh, &BaseData::web(1)).unwrap();
        let sx = s_space(&x, 2).unwrap();
        let c = Carrier::NonnegRational;
        let pt = |s: Scalar| Vector::from_entries(&x.web, c, [(Label::Atom(0), s)]).unwrap();
        let half = witness_vec(2, &[pt(nn(1, 2)), pt(nn(1, 2))]).unwrap();
        assert!(!sx.member_point(&half).unwrap().is_refuted());
        let ones = witness_vec(2, &[pt(nn(1, 1)), pt(nn(1, 1))]).unwrap();
        assert!(sx.member_point(&ones).unwrap().is_refuted());
    }

    #[test]
    fn s_of_one_is_indexed_by_n() {
        let sx = s_space(&SpaceRepr::one(ModelId::Rel), 4).unwrap();
        assert_eq!(sx.web.size(), 4);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in [StructKind::Proj(2), StructKind::Inj(0), StructKind::Mult, StructKind::DComult, StructKind::WithIso] {
            assert_eq!(k.to_string().parse::<StructKind>().unwrap(), k);
        }
        assert!("proj:x".parse::<StructKind>().is_err());
    }

    #[test]
    fn index_out_of_bound_is_an_error() {
        let w = Arc::new(Web::Atoms(1));
        assert_eq!(s_struct_mat(StructKind::Proj(3), &w, &w, 3, Carrier::Bool), Err(SumError::Index(3, 3)));
    }

    #[test]
    fn all_suites_pass_on_pcoh() {
        let st = Setup::new(ModelId::Pcoh, &default_bases(ModelId::Pcoh), TruncCfg { bang_degree: 2, s_bound: 3 }, 6, 3).unwrap();
        for id in SUM_SUITES {
            let r = run_summability_suite(id, &st);
            assert!(r.passed(), "{id}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }
}
