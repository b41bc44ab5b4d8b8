//! Spaces given by a web plus finite generator sets P (points = P⊥⊥) and Q (points = Q⊥),
//! the built-in models, and membership tests.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

mod suite;
pub use suite::{predual_conditions, run_spaces_suite, SPACES_SUITES};

use crate::families::{
    abs_mat, abs_vec, is_clique, mat_apply, scalar_product, tensor_vec, Coh, FamilyError, Label, Matrix, Vector,
    VectorRecord, Web,
};
use crate::pcr::{Ball, Carrier, FamilySpec, Partial, PcrInstance, Scalar, Tail};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("malformed base data: {0}")]
    BadBase(String),
    #[error("model {0} has no signed carrier")]
    NoSignedCarrier(ModelId),
    #[error("spaces of models {0} and {1} cannot be combined")]
    ModelMismatch(ModelId, ModelId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelId {
    /// Relations: complete booleans.
    Rel,
    /// Weighted relations over extended nonnegative rationals.
    Wrel,
    /// Probabilistic coherence spaces: nonnegative rationals, ball [0, 1].
    Pcoh,
    /// Coherence spaces over {0, ω}.
    Coh,
    /// Finiteness spaces: finitary booleans, signed version over finitary rationals.
    Fin,
    /// Köthe-style sequence spaces: nonnegative rationals, signed version over rationals.
    Kothe,
}

pub const ALL_MODELS: [ModelId; 6] =
    [ModelId::Rel, ModelId::Wrel, ModelId::Pcoh, ModelId::Coh, ModelId::Fin, ModelId::Kothe];

impl ModelId {
    pub fn tag(self) -> &'static str {
        match self {
            ModelId::Rel => "rel",
            ModelId::Wrel => "wrel",
            ModelId::Pcoh => "pcoh",
            ModelId::Coh => "coh",
            ModelId::Fin => "fin",
            ModelId::Kothe => "kothe",
        }
    }

    pub fn from_tag(s: &str) -> Result<ModelId, SpaceError> {
        ALL_MODELS.into_iter().find(|m| m.tag() == s).ok_or_else(|| SpaceError::UnknownModel(s.into()))
    }

    /// The positive rig and ball the spaces live over.
    pub fn pcr(self) -> PcrInstance {
        match self {
            ModelId::Rel => PcrInstance::new(Carrier::Bool),
            ModelId::Wrel => PcrInstance::new(Carrier::ExtendedNonneg),
            ModelId::Pcoh => PcrInstance::with_ball(Carrier::NonnegRational, Ball::UnitInterval),
            ModelId::Coh => PcrInstance::new(Carrier::Coherence),
            ModelId::Fin => PcrInstance::new(Carrier::FinitaryBool),
            ModelId::Kothe => PcrInstance::new(Carrier::NonnegRational),
        }
    }

    pub fn carrier(self) -> Carrier {
        self.pcr().carrier
    }

    /// The absolute rig whose |·| lands in the positive one.
    pub fn signed(self) -> Option<Carrier> {
        match self {
            ModelId::Fin => Some(Carrier::FinitaryRational),
            ModelId::Kothe => Some(Carrier::Rational),
            _ => None,
        }
    }

    /// Every vector on a finite web is a point, for every space of the model.
    pub fn is_total(self) -> bool {
        matches!(self, ModelId::Rel | ModelId::Wrel | ModelId::Fin | ModelId::Kothe)
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Independent description of the points of a space, used as ground truth in suites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Oracle {
    /// Every vector.
    Total,
    /// Entries at most 1.
    Cube,
    /// Entries summing to at most 1.
    Simplex,
    /// Support is a clique of the relation.
    Clique(Arc<Coh>),
}

impl Oracle {
    fn dual(&self) -> Oracle {
        match self {
            Oracle::Total => Oracle::Total,
            Oracle::Cube => Oracle::Simplex,
            Oracle::Simplex => Oracle::Cube,
            Oracle::Clique(c) => Oracle::Clique(Coh::dual(c)),
        }
    }

    pub fn is_point(&self, x: &Vector) -> bool {
        match self {
            Oracle::Total => true,
            Oracle::Cube => x.iter().all(|(_, s)| Ball::UnitInterval.contains(s)),
            Oracle::Simplex => {
                let sum = crate::pcr::sum_finite(x.carrier, x.iter().map(|(_, s)| s));
                sum.is_some_and(|s| Ball::UnitInterval.contains(&s))
            }
            Oracle::Clique(c) => {
                let items: Vec<Label> = x.support().cloned().collect();
                is_clique(c, &items)
            }
        }
    }
}

/// How the base space of a model is shaped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseData {
    pub size: u32,
    /// Coherence graph edges (coherence model).
    #[serde(default)]
    pub edges: Vec<(u32, u32)>,
    /// Use the simplex instead of the cube (probabilistic model).
    #[serde(default)]
    pub simplex: bool,
}

impl BaseData {
    pub fn web(size: u32) -> Self {
        BaseData { size, edges: Vec::new(), simplex: false }
    }

    pub fn graph(size: u32, edges: Vec<(u32, u32)>) -> Self {
        BaseData { size, edges, simplex: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceRepr {
    pub model: ModelId,
    pub web: Arc<Web>,
    /// Predual generators: points = P⊥⊥ when `p_exact`.
    pub p: Vec<Vector>,
    /// Dual predual generators: points = Q⊥ when `q_certified`.
    pub q: Vec<Vector>,
    pub p_exact: bool,
    pub q_certified: bool,
    /// Every point lies below some element of P (so promotions of P are an exact predual of !X).
    pub p_dominating: bool,
    /// Every point of the dual lies below some element of Q.
    pub q_dominating: bool,
    /// Coherence relation (coherence model only).
    pub coh: Option<Arc<Coh>>,
    pub oracle: Option<Oracle>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum MembershipVerdict {
    Certified,
    ProbeSound { probes: usize },
    Refuted { probe: String, pairing: String },
}

impl MembershipVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, MembershipVerdict::Refuted { .. })
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, MembershipVerdict::Certified)
    }
}

/// x ⊥ y: the scalar product is defined and lies in B.
pub fn orth_rel(pcr: &PcrInstance, x: &Vector, y: &Vector) -> Result<bool, FamilyError> {
    Ok(match scalar_product(x, y)? {
        Partial::Defined(s) => pcr.in_ball(&s),
        Partial::Undefined { .. } => false,
    })
}

/// Every web point has a generator with an invertible entry there.
pub fn is_covering(family: &[Vector], web: &Web) -> bool {
    web.labels().iter().all(|a| family.iter().any(|x| x.carrier.is_invertible(&x.get(a))))
}

fn basis_all(web: &Arc<Web>, c: Carrier) -> Vec<Vector> {
    web.labels().into_iter().map(|l| Vector::basis(web, c, l).expect("label of web")).collect()
}

fn indicator(web: &Arc<Web>, c: Carrier, set: &[Label]) -> Vector {
    Vector::from_map(web, c, set.iter().map(|l| (l.clone(), c.one())).collect())
}

/// Maximal cliques of a relation on a small web, by subset enumeration.
pub fn maximal_cliques(coh: &Coh, labels: &[Label]) -> Vec<Vec<Label>> {
    let n = labels.len();
    assert!(n <= 16, "clique enumeration is for small webs");
    let mut cliques: Vec<u32> = Vec::new();
    for mask in 0u32..(1 << n) {
        let items: Vec<Label> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| labels[i].clone()).collect();
        if is_clique(coh, &items) {
            cliques.push(mask);
        }
    }
    cliques
        .iter()
        .filter(|&&m| !cliques.iter().any(|&o| o != m && o & m == m))
        .map(|&m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| labels[i].clone()).collect())
        .collect()
}

impl SpaceRepr {
    pub fn pcr(&self) -> PcrInstance {
        self.model.pcr()
    }

    pub fn carrier(&self) -> Carrier {
        self.model.carrier()
    }

    fn total(model: ModelId, web: Arc<Web>, coh: Option<Arc<Coh>>) -> SpaceRepr {
        let c = model.carrier();
        let mut gens = basis_all(&web, c);
        if !web.is_empty() {
            gens.push(Vector::diag(&web, c));
        }
        if gens.is_empty() {
            gens.push(Vector::zero(&web, c));
        }
        SpaceRepr {
            model,
            web,
            p: gens.clone(),
            q: gens,
            p_exact: true,
            q_certified: true,
            p_dominating: false,
            q_dominating: false,
            coh,
            oracle: Some(Oracle::Total),
        }
    }

    /// Base space of a model.
    pub fn make(model: ModelId, base: &BaseData) -> Result<SpaceRepr, SpaceError> {
        let web = Arc::new(Web::Atoms(base.size));
        let c = model.carrier();
        match model {
            ModelId::Coh => {
                if base.size > 8 {
                    return Err(SpaceError::BadBase("coherence webs are limited to 8 vertices".into()));
                }
                for &(a, b) in &base.edges {
                    if a >= base.size || b >= base.size || a == b {
                        return Err(SpaceError::BadBase(format!("edge ({a},{b})")));
                    }
                }
                let rel = Arc::new(Coh::graph(base.edges.iter().copied()));
                Ok(SpaceRepr::coherence(web, rel))
            }
            ModelId::Pcoh => {
                let delta = Vector::diag(&web, c);
                let mut basis = basis_all(&web, c);
                let mut single = vec![delta];
                if base.size == 0 {
                    single = vec![Vector::zero(&web, c)];
                    basis = single.clone();
                }
                let (p, q, oracle) =
                    if base.simplex { (basis, single, Oracle::Simplex) } else { (single, basis, Oracle::Cube) };
                let cube = !base.simplex;
                Ok(SpaceRepr {
                    model,
                    web,
                    p,
                    q,
                    p_exact: true,
                    q_certified: true,
                    p_dominating: cube,
                    q_dominating: !cube,
                    coh: None,
                    oracle: Some(oracle),
                })
            }
            _ => Ok(SpaceRepr::total(model, web, None)),
        }
    }

    /// Coherence space of a relation on any web: P = maximal cliques, Q = maximal anticliques,
    /// each together with the basis vectors.
    pub fn coherence(web: Arc<Web>, rel: Arc<Coh>) -> SpaceRepr {
        let c = Carrier::Coherence;
        let labels = web.labels();
        let dual = Coh::dual(&rel);
        let mut p: Vec<Vector> = maximal_cliques(&rel, &labels).iter().map(|s| indicator(&web, c, s)).collect();
        let mut q: Vec<Vector> = maximal_cliques(&dual, &labels).iter().map(|s| indicator(&web, c, s)).collect();
        for e in basis_all(&web, c) {
            if !p.contains(&e) {
                p.push(e.clone());
            }
            if !q.contains(&e) {
                q.push(e);
            }
        }
        SpaceRepr {
            model: ModelId::Coh,
            web,
            p,
            q,
            p_exact: true,
            q_certified: true,
            p_dominating: true,
            q_dominating: true,
            coh: Some(rel.clone()),
            oracle: Some(Oracle::Clique(rel)),
        }
    }

    /// The tensor unit 1 = ({*}, B).
    pub fn one(model: ModelId) -> SpaceRepr {
        let web = Arc::new(Web::Unit);
        let c = model.carrier();
        let e = vec![Vector::basis(&web, c, Label::Star).expect("star")];
        let coh = (model == ModelId::Coh).then(|| Arc::new(Coh::Full));
        let oracle = match model {
            ModelId::Pcoh => Oracle::Cube,
            ModelId::Coh => Oracle::Clique(Arc::new(Coh::Full)),
            _ => Oracle::Total,
        };
        let bounded = matches!(model, ModelId::Pcoh | ModelId::Coh | ModelId::Rel | ModelId::Fin);
        SpaceRepr {
            model,
            web,
            p: e.clone(),
            q: e,
            p_exact: true,
            q_certified: true,
            p_dominating: bounded,
            q_dominating: bounded,
            coh,
            oracle: Some(oracle),
        }
    }

    pub fn bot(model: ModelId) -> SpaceRepr {
        SpaceRepr::one(model).dual()
    }

    /// ⊤ = (∅, {0}).
    pub fn top(model: ModelId) -> SpaceRepr {
        SpaceRepr::with(model, &[])
    }

    pub fn dual(&self) -> SpaceRepr {
        SpaceRepr {
            model: self.model,
            web: self.web.clone(),
            p: self.q.clone(),
            q: self.p.clone(),
            p_exact: self.q_certified,
            q_certified: self.p_exact,
            p_dominating: self.q_dominating,
            q_dominating: self.p_dominating,
            coh: self.coh.as_ref().map(Coh::dual),
            oracle: self.oracle.as_ref().map(Oracle::dual),
        }
    }

    fn same_model(&self, other: &SpaceRepr) -> Result<(), SpaceError> {
        if self.model == other.model {
            Ok(())
        } else {
            Err(SpaceError::ModelMismatch(self.model, other.model))
        }
    }

    /// X ⊗ Y: P = P_X ⊗ P_Y (exact when both are), Q = Q_X ⊗ Q_Y (never certified in general).
    pub fn tensor(&self, other: &SpaceRepr) -> Result<SpaceRepr, SpaceError> {
        self.same_model(other)?;
        let gens = |a: &[Vector], b: &[Vector]| -> Result<Vec<Vector>, FamilyError> {
            let mut out = Vec::new();
            for x in a {
                for y in b {
                    out.push(tensor_vec(x, y)?);
                }
            }
            Ok(out)
        };
        let web = Web::pair(&self.web, &other.web);
        let coh = match (&self.coh, &other.coh) {
            (Some(a), Some(b)) => Some(Arc::new(Coh::Tensor(a.clone(), b.clone()))),
            _ => None,
        };
        let total = self.model.is_total();
        let oracle = if total {
            Some(Oracle::Total)
        } else {
            coh.as_ref().map(|c| Oracle::Clique(c.clone()))
        };
        let mut p = gens(&self.p, &other.p)?;
        let mut q = gens(&self.q, &other.q)?;
        for v in p.iter_mut().chain(q.iter_mut()) {
            v.web = web.clone();
        }
        Ok(SpaceRepr {
            model: self.model,
            web,
            p,
            q,
            p_exact: self.p_exact && other.p_exact,
            q_certified: total,
            p_dominating: self.p_dominating && other.p_dominating,
            q_dominating: false,
            coh,
            oracle,
        })
    }

    /// X ⊸ Y = (X ⊗ Y⊥)⊥; Q = P_X ⊗ Q_Y is certified when P_X is exact and Q_Y certified.
    pub fn arrow(&self, other: &SpaceRepr) -> Result<SpaceRepr, SpaceError> {
        Ok(self.tensor(&other.dual())?.dual())
    }

    /// &_i X_i: Q = ⋃ inj_i Q_i, P = {Σ_i inj_i p_i}.
    pub fn with(model: ModelId, parts: &[SpaceRepr]) -> SpaceRepr {
        let c = model.carrier();
        let web = Arc::new(Web::Tagged(parts.iter().map(|x| x.web.clone()).collect()));
        let inj = |i: usize, v: &Vector| -> BTreeMap<Label, Scalar> {
            v.iter().map(|(l, s)| (Label::tag(i as u32 + 1, l.clone()), s.clone())).collect()
        };
        let mut q: Vec<Vector> = Vec::new();
        for (i, x) in parts.iter().enumerate() {
            for g in &x.q {
                q.push(Vector::from_map(&web, c, inj(i, g)));
            }
        }
        let mut tuples: Vec<BTreeMap<Label, Scalar>> = vec![BTreeMap::new()];
        for (i, x) in parts.iter().enumerate() {
            let mut next = Vec::new();
            for t in &tuples {
                for g in &x.p {
                    let mut m = t.clone();
                    m.extend(inj(i, g));
                    next.push(m);
                }
            }
            tuples = next;
        }
        let p: Vec<Vector> = tuples.into_iter().map(|m| Vector::from_map(&web, c, m)).collect();
        if q.is_empty() {
            q.push(Vector::zero(&web, c));
        }
        let coh = if model == ModelId::Coh {
            Some(Arc::new(Coh::With(parts.iter().map(|x| x.coh.clone().unwrap_or(Arc::new(Coh::Full))).collect())))
        } else {
            None
        };
        let oracle = if model.is_total() { Some(Oracle::Total) } else { coh.as_ref().map(|c| Oracle::Clique(c.clone())) };
        SpaceRepr {
            model,
            web,
            p,
            q,
            p_exact: parts.iter().all(|x| x.p_exact),
            q_certified: parts.iter().all(|x| x.q_certified),
            p_dominating: parts.iter().all(|x| x.p_dominating),
            // in the coherence model a point of the sum lives in one component
            q_dominating: model == ModelId::Coh && parts.iter().all(|x| x.q_dominating),
            coh,
            oracle,
        }
    }

    /// ⊕_i X_i = (&_i X_i⊥)⊥.
    pub fn plus(model: ModelId, parts: &[SpaceRepr]) -> SpaceRepr {
        let duals: Vec<SpaceRepr> = parts.iter().map(SpaceRepr::dual).collect();
        SpaceRepr::with(model, &duals).dual()
    }

    /// !X truncated at degree `d`. P holds promotions of a sample of points, Q holds
    /// e_[] and the probes (n!/m!) y'^m for y' in Q_X; Q is certified only for total models.
    /// When P_X dominates the points of X, its promotions dominate those of !X, so P is exact.
    pub fn bang(&self, d: usize) -> SpaceRepr {
        let c = self.carrier();
        let clique = self.coh.clone();
        let web = Arc::new(Web::Bang { base: self.web.clone(), degree: d as u32, clique: clique.clone() });
        let mut p: Vec<Vector> = Vec::new();
        let mut samples: Vec<Vector> = self.p.clone();
        if self.model == ModelId::Pcoh {
            // halved generators keep the sample inside the points
            let half = c.parse("1/2").expect("rational");
            samples.extend(self.p.iter().map(|x| x.scale(&half)));
        }
        samples.push(Vector::zero(&self.web, c));
        for x in &samples {
            let v = crate::ll::promote(x, &web);
            if !p.contains(&v) {
                p.push(v);
            }
        }
        let mut q = vec![Vector::basis(&web, c, Label::Bag(Default::default())).expect("empty multiset")];
        for y in &self.q {
            for n in 1..=d {
                if let Some(v) = power_probe(y, n, &web) {
                    if !v.is_zero() && !q.contains(&v) {
                        q.push(v);
                    }
                }
            }
        }
        let total = self.model.is_total();
        let coh = clique.map(|r| Arc::new(Coh::Bang(r)));
        let oracle = if total { Some(Oracle::Total) } else { coh.as_ref().map(|r| Oracle::Clique(r.clone())) };
        let dom = self.p_dominating && self.p_exact;
        SpaceRepr {
            model: self.model,
            web,
            p,
            q,
            p_exact: total || dom,
            q_certified: total,
            p_dominating: dom,
            q_dominating: false,
            coh,
            oracle,
        }
    }

    /// x ⊥ q for all q ∈ Q.
    pub fn member_point(&self, x: &Vector) -> Result<MembershipVerdict, SpaceError> {
        if x.is_zero() {
            return Ok(MembershipVerdict::Certified);
        }
        let pcr = self.pcr();
        for g in &self.q {
            let out = scalar_product(x, g)?;
            let ok = matches!(&out, Partial::Defined(s) if pcr.in_ball(s));
            if !ok {
                return Ok(MembershipVerdict::Refuted { probe: g.to_string(), pairing: out.to_string() });
            }
        }
        Ok(if self.q_certified {
            MembershipVerdict::Certified
        } else {
            MembershipVerdict::ProbeSound { probes: self.q.len() }
        })
    }

    /// |x| is a point, for a vector of the model's signed carrier.
    pub fn member_semimod(&self, x: &Vector) -> Result<MembershipVerdict, SpaceError> {
        if self.model.signed() != Some(x.carrier) {
            return Err(SpaceError::NoSignedCarrier(self.model));
        }
        self.member_point(&abs_vec(x)?)
    }

    /// Independent ground truth for membership, where the space has one.
    pub fn oracle_point(&self, x: &Vector) -> Option<bool> {
        self.oracle.as_ref().map(|o| o.is_point(x))
    }
}

/// The probe q(y)_m = (n!/m!) y^m on degree-n multisets of the web.
fn power_probe(y: &Vector, n: usize, web: &Arc<Web>) -> Option<Vector> {
    let c = y.carrier;
    let support: Vec<Label> = y.support().cloned().collect();
    let mut m = BTreeMap::new();
    for ms in crate::families::multisets_upto(&support, n) {
        if ms.degree() != n {
            continue;
        }
        let l = Label::Bag(ms.clone());
        if !web.contains(&l) {
            continue;
        }
        let mut v = c.one();
        for a in ms.items() {
            v = c.mul(&v, &y.get(a));
        }
        let ratio = crate::families::factorial(n) / ms.factorial();
        let k: u64 = ratio.try_into().ok()?;
        let coeff = c.nat_embed(k)?;
        m.insert(l, c.mul(&coeff, &v));
    }
    Some(Vector::from_map(web, c, m))
}

/// s ∈ (P_X ⊗ Q_Y)⊥. Certified when P_X is exact and Q_Y certified.
pub fn member_hom(x: &SpaceRepr, y: &SpaceRepr, s: &Matrix) -> Result<MembershipVerdict, SpaceError> {
    x.same_model(y)?;
    let s = if s.carrier == x.carrier() { s.clone() } else { abs_mat(s)? };
    if s.is_zero() {
        return Ok(MembershipVerdict::Certified);
    }
    let pcr = x.pcr();
    let sv = s.as_vector();
    for p in &x.p {
        for g in &y.q {
            let mut pq = tensor_vec(p, g)?;
            pq.web = sv.web.clone();
            let out = scalar_product(&sv, &pq)?;
            if !matches!(&out, Partial::Defined(v) if pcr.in_ball(v)) {
                return Ok(MembershipVerdict::Refuted { probe: format!("{p} (x) {g}"), pairing: out.to_string() });
            }
        }
    }
    Ok(if x.p_exact && y.q_certified {
        MembershipVerdict::Certified
    } else {
        MembershipVerdict::ProbeSound { probes: x.p.len() * y.q.len() }
    })
}

/// Conditions (3) and (4) of the predual characterization, via generators.
pub fn member_hom_by_application(x: &SpaceRepr, y: &SpaceRepr, s: &Matrix) -> Result<(bool, bool), SpaceError> {
    let mut c3 = true;
    for p in &x.p {
        c3 &= match mat_apply(s, p)? {
            Partial::Defined(v) => !y.member_point(&v)?.is_refuted(),
            Partial::Undefined { .. } => false,
        };
    }
    let xd = x.dual();
    let st = s.transpose();
    let mut c4 = true;
    for g in &y.q {
        c4 &= match mat_apply(&st, g)? {
            Partial::Defined(v) => !xd.member_point(&v)?.is_refuted(),
            Partial::Undefined { .. } => false,
        };
    }
    Ok((c3, c4))
}

/// Sample a point: a generator shrunk entrywise, or for convex models a combination of two.
pub fn sample_point(x: &SpaceRepr, s: &mut crate::sample::Sampler) -> Vector {
    let c = x.carrier();
    if x.model.is_total() {
        let m = x.web.labels().into_iter().map(|l| (l, s.scalar(c))).collect();
        return Vector::from_map(&x.web, c, m);
    }
    let g = s.pick(&x.p).clone();
    match x.model {
        ModelId::Pcoh => {
            let h = s.pick(&x.p).clone();
            let lam = s.unit_q();
            let a = c.from_q(lam.clone()).expect("unit");
            let b = c.from_q(crate::pcr::qi(1) - lam).expect("unit");
            let mut v = g.scale(&a).add(&h.scale(&b)).expect("same web").expect_defined("convex combination");
            let shrink: BTreeMap<Label, Scalar> =
                v.iter().map(|(l, e)| (l.clone(), c.mul(e, &c.from_q(s.unit_q()).unwrap()))).collect();
            v = Vector::from_map(&x.web, c, shrink);
            v
        }
        _ => {
            let m = g.iter().filter(|_| s.chance(3, 4)).map(|(l, e)| (l.clone(), e.clone())).collect();
            Vector::from_map(&x.web, c, m)
        }
    }
}

/// Vectors on the web taking values in a finite carrier, all of them.
pub fn all_vectors(web: &Arc<Web>, c: Carrier) -> Option<Vec<Vector>> {
    let vals = c.finite_values()?;
    let labels = web.labels();
    let n = labels.len();
    if n > 16 {
        return None;
    }
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u32..(1 << n) {
        let m = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| (labels[i].clone(), vals[1].clone())).collect();
        out.push(Vector::from_map(web, c, m));
    }
    Some(out)
}

/// A finite set of points whose orthogonal is the orthogonal of all points: every point for
/// finite carriers, extreme points for the cube and simplex.
pub fn ground_points(x: &SpaceRepr) -> Option<Vec<Vector>> {
    let c = x.carrier();
    let oracle = x.oracle.as_ref()?;
    match oracle {
        Oracle::Cube => {
            let labels = x.web.labels();
            let n = labels.len();
            Some(
                (0u32..(1 << n))
                    .map(|mask| {
                        let m = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| (labels[i].clone(), c.one())).collect();
                        Vector::from_map(&x.web, c, m)
                    })
                    .collect(),
            )
        }
        Oracle::Simplex => {
            let mut v = vec![Vector::zero(&x.web, c)];
            v.extend(basis_all(&x.web, c));
            Some(v)
        }
        _ => Some(all_vectors(&x.web, c)?.into_iter().filter(|v| oracle.is_point(v)).collect()),
    }
}

/// A sequence over ℕ given by a closed-form family, tested against sequence probes.
/// This is where finitary carriers can refute on infinite supports.
pub fn member_sequence(pcr: &PcrInstance, x: &FamilySpec, probes: &[FamilySpec]) -> MembershipVerdict {
    let c = pcr.carrier;
    for q in probes {
        let out = crate::pcr::try_sum(pcr, &sequence_product(c, x, q)).unwrap_or_else(|e| Partial::undefined(e.to_string()));
        if !matches!(&out, Partial::Defined(s) if pcr.in_ball(s)) {
            return MembershipVerdict::Refuted { probe: q.to_string(), pairing: out.to_string() };
        }
    }
    MembershipVerdict::Certified
}

/// Pointwise product of two sequences, finite parts read as positions 0, 1, ….
pub fn sequence_product(c: Carrier, x: &FamilySpec, y: &FamilySpec) -> FamilySpec {
    let mut x = x.clone();
    let mut y = y.clone();
    while x.finite.len() < y.finite.len() {
        x = crate::pcr::unroll_tail(c, &x);
    }
    while y.finite.len() < x.finite.len() {
        y = crate::pcr::unroll_tail(c, &y);
    }
    let finite = x
        .finite
        .iter()
        .zip(&y.finite)
        .enumerate()
        .map(|(i, ((_, a), (_, b)))| (format!("n{i}"), c.mul(a, b)))
        .collect();
    let tail = tail_product(c, &x.tail, &y.tail);
    FamilySpec { finite, tail }
}

fn tail_product(c: Carrier, a: &Tail, b: &Tail) -> Tail {
    use Tail::*;
    match (a, b) {
        (Zero, _) | (_, Zero) => Zero,
        (Constant(r), Constant(s)) | (Alternating(r), Alternating(s)) => Constant(c.mul(r, s)),
        (Constant(r), Alternating(s)) | (Alternating(r), Constant(s)) => Alternating(c.mul(r, s)),
        (Geometric { first, ratio }, Constant(s)) | (Constant(s), Geometric { first, ratio }) => {
            Geometric { first: c.mul(first, s), ratio: ratio.clone() }
        }
        (Geometric { first, ratio }, Alternating(s)) | (Alternating(s), Geometric { first, ratio }) => {
            Geometric { first: c.mul(first, s), ratio: -ratio.clone() }
        }
        (Geometric { first: f, ratio: p }, Geometric { first: g, ratio: q }) => {
            Geometric { first: c.mul(f, g), ratio: p * q }
        }
    }
}

/// On-disk form of a space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceRecord {
    pub model: ModelId,
    pub web: Web,
    pub p: Vec<Vec<(String, String)>>,
    pub q: Vec<Vec<(String, String)>>,
    pub p_exact: bool,
    pub q_certified: bool,
    #[serde(default)]
    pub p_dominating: bool,
    #[serde(default)]
    pub q_dominating: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coh: Option<Coh>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Oracle>,
}

impl SpaceRepr {
    pub fn to_record(&self) -> SpaceRecord {
        let entries = |v: &Vector| v.to_record().entries;
        SpaceRecord {
            model: self.model,
            web: (*self.web).clone(),
            p: self.p.iter().map(entries).collect(),
            q: self.q.iter().map(entries).collect(),
            p_exact: self.p_exact,
            q_certified: self.q_certified,
            p_dominating: self.p_dominating,
            q_dominating: self.q_dominating,
            coh: self.coh.as_deref().cloned(),
            oracle: self.oracle.clone(),
        }
    }

    pub fn from_record(r: &SpaceRecord) -> Result<SpaceRepr, SpaceError> {
        let web = Arc::new(r.web.clone());
        let c = r.model.carrier();
        let load = |es: &Vec<(String, String)>| -> Result<Vector, FamilyError> {
            Vector::from_record(&VectorRecord { web: r.web.clone(), carrier: c, entries: es.clone() })
                .map(|mut v| {
                    v.web = web.clone();
                    v
                })
        };
        Ok(SpaceRepr {
            model: r.model,
            web: web.clone(),
            p: r.p.iter().map(load).collect::<Result<_, _>>()?,
            q: r.q.iter().map(load).collect::<Result<_, _>>()?,
            p_exact: r.p_exact,
            q_certified: r.q_certified,
            p_dominating: r.p_dominating,
            q_dominating: r.q_dominating,
            coh: r.coh.clone().map(Arc::new),
            oracle: r.oracle.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcr::q as rq;

    fn nn(x: &SpaceRepr, vals: &[(i64, i64)]) -> Vector {
        let c = x.carrier();
        Vector::from_entries(
            &x.web,
            c,
            x.web.labels().into_iter().zip(vals.iter().map(|(a, b)| Scalar::Nonneg(rq(*a, *b)))),
        )
        .unwrap()
    }

    #[test]
    fn pcoh_orthogonality() {
        let x = SpaceRepr::make(ModelId::Pcoh, &BaseData::web(2)).unwrap();
        let a = nn(&x, &[(1, 2), (1, 2)]);
        let b = nn(&x, &[(1, 1), (1, 1)]);
        assert!(orth_rel(&x.pcr(), &a, &b).unwrap());
        assert!(orth_rel(&x.pcr(), &Vector::zero(&x.web, x.carrier()), &b).unwrap());
    }

    #[test]
    fn coherence_orthogonality_counts_overlap() {
        let x = SpaceRepr::make(ModelId::Coh, &BaseData::graph(2, vec![])).unwrap();
        let c = Carrier::Coherence;
        let w0 = Vector::basis(&x.web, c, Label::Atom(0)).unwrap();
        let both = Vector::diag(&x.web, c);
        assert!(orth_rel(&x.pcr(), &w0, &both).unwrap());
        assert!(!orth_rel(&x.pcr(), &both, &both).unwrap());
    }

    #[test]
    fn pcoh_singleton_points() {
        let x = SpaceRepr::make(ModelId::Pcoh, &BaseData::web(1)).unwrap();
        assert_eq!(x.p, x.q);
        assert!(x.member_point(&nn(&x, &[(3, 2)])).unwrap().is_refuted());
        assert!(x.member_point(&nn(&x, &[(1, 1)])).unwrap().is_certified());
        assert!(x.member_point(&Vector::zero(&x.web, x.carrier())).unwrap().is_certified());
    }

    #[test]
    fn edgeless_coherence_refutes_pair() {
        let x = SpaceRepr::make(ModelId::Coh, &BaseData::graph(2, vec![])).unwrap();
        let v = Vector::diag(&x.web, Carrier::Coherence);
        match x.member_point(&v).unwrap() {
            MembershipVerdict::Refuted { probe, .. } => assert_eq!(probe, "{a0:w, a1:w}"),
            other => panic!("{other:?}"),
        }
        let y = SpaceRepr::make(ModelId::Coh, &BaseData::graph(2, vec![(0, 1)])).unwrap();
        assert!(y.member_point(&v).unwrap().is_certified());
    }

    #[test]
    fn rel_points_are_everything() {
        let x = SpaceRepr::make(ModelId::Rel, &BaseData::web(3)).unwrap();
        for v in all_vectors(&x.web, Carrier::Bool).unwrap() {
            assert!(x.member_point(&v).unwrap().is_certified());
        }
    }

    #[test]
    fn dual_is_involutive() {
        let x = SpaceRepr::make(ModelId::Coh, &BaseData::graph(3, vec![(0, 1)])).unwrap();
        assert_eq!(x.dual().dual(), x);
        let one = SpaceRepr::one(ModelId::Pcoh);
        let bot = SpaceRepr::bot(ModelId::Pcoh);
        assert_eq!(bot.p, one.q);
        let y = SpaceRepr::make(ModelId::Pcoh, &BaseData::web(2)).unwrap();
        assert_eq!(y.dual().p, y.q);
        assert_eq!(y.dual().q, y.p);
    }

    #[test]
    fn coverings() {
        let w = Arc::new(Web::Atoms(3));
        let c = Carrier::NonnegRational;
        assert!(is_covering(&basis_all(&w, c), &w));
        assert!(is_covering(&[Vector::diag(&w, c)], &w));
        assert!(!is_covering(&[Vector::zero(&w, c)], &w));
    }

    #[test]
    fn hom_membership_examples() {
        let x = SpaceRepr::make(ModelId::Pcoh, &BaseData::web(1)).unwrap();
        let c = x.carrier();
        let two = Matrix::from_entries(&x.web, &x.web, c, [((Label::Atom(0), Label::Atom(0)), c.int(2).unwrap())]).unwrap();
        assert!(member_hom(&x, &x, &two).unwrap().is_refuted());
        assert!(member_hom(&x, &x, &Matrix::zero(&x.web, &x.web, c)).unwrap().is_certified());
        let one = SpaceRepr::one(ModelId::Pcoh);
        for (r, ok) in [((1, 2), true), ((1, 1), true), ((3, 2), false)] {
            let s = Matrix::from_entries(&one.web, &one.web, c, [((Label::Star, Label::Star), Scalar::Nonneg(rq(r.0, r.1)))]).unwrap();
            assert_eq!(member_hom(&one, &one, &s).unwrap().is_certified(), ok);
        }
    }

    #[test]
    fn semimodule_membership() {
        let x = SpaceRepr::make(ModelId::Kothe, &BaseData::web(2)).unwrap();
        let c = Carrier::Rational;
        let v = Vector::from_entries(&x.web, c, [(Label::Atom(0), c.parse("-1/2").unwrap()), (Label::Atom(1), c.parse("1/3").unwrap())]).unwrap();
        assert!(x.member_semimod(&v).unwrap().is_certified());
        assert!(x.member_semimod(&Vector::zero(&x.web, c)).unwrap().is_certified());
        assert!(x.member_semimod(&Vector::zero(&x.web, Carrier::Bool)).is_err());
    }

    #[test]
    fn finitary_sequence_with_full_support_is_refuted() {
        let pcr = PcrInstance::new(Carrier::FinitaryBool);
        let signed = Carrier::FinitaryRational;
        let x = FamilySpec::empty().with_tail(Tail::Alternating(signed.one()));
        let ax = crate::pcr::abs_family(signed, &x).unwrap();
        let delta = FamilySpec::empty().with_tail(Tail::Constant(Carrier::FinitaryBool.one()));
        assert!(member_sequence(&pcr, &ax, std::slice::from_ref(&delta)).is_refuted());
        let finite = crate::pcr::abs_family(signed, &FamilySpec::finite([signed.int(3).unwrap()])).unwrap();
        assert!(member_sequence(&pcr, &finite, &[delta]).is_certified());
    }

    #[test]
    fn coherence_edge_pair_is_a_point() {
        let x = SpaceRepr::make(ModelId::Coh, &BaseData::graph(2, vec![(0, 1)])).unwrap();
        assert!(x.member_point(&Vector::diag(&x.web, Carrier::Coherence)).unwrap().is_certified());
    }

    #[test]
    fn space_record_round_trip() {
        let x = SpaceRepr::make(ModelId::Coh, &BaseData::graph(3, vec![(0, 2)])).unwrap().tensor(&SpaceRepr::one(ModelId::Coh)).unwrap();
        let r = x.to_record();
        let json = serde_json::to_string(&r).unwrap();
        let back: SpaceRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(SpaceRepr::from_record(&back).unwrap(), x);
    }
}
