//! Shared plumbing for law suites: sampling of points and morphisms, partial equality checks.

use std::fmt::Display;
use std::sync::Arc;

use crate::families::{mat_apply, FamilyError, Label, Matrix, Vector, Web};
use crate::pcr::{Carrier, Partial, Scalar};
use crate::report::Case;
use crate::sample::Sampler;
use crate::ll::{Mutation, TruncCfg};
use crate::spaces::{member_hom, sample_point, BaseData, MembershipVerdict, ModelId, SpaceError, SpaceRepr};

/// Carrier used for sampled data: the signed one where the model has it.
pub fn data_carrier(model: ModelId) -> Carrier {
    model.signed().unwrap_or_else(|| model.carrier())
}

pub fn random_vector(web: &Arc<Web>, c: Carrier, s: &mut Sampler) -> Vector {
    let m = web.labels().into_iter().map(|l| (l, s.scalar(c))).collect();
    Vector::from_map(web, c, m)
}

/// A sampled point of X over `c` (signed carriers sample freely: every finite vector is in the semimodule).
pub fn sample_vec(x: &SpaceRepr, c: Carrier, s: &mut Sampler) -> Vector {
    if c != x.carrier() || x.model.is_total() {
        random_vector(&x.web, c, s)
    } else {
        sample_point(x, s)
    }
}

pub fn random_matrix(dom: &Arc<Web>, cod: &Arc<Web>, c: Carrier, s: &mut Sampler) -> Matrix {
    let mut m = Matrix::zero(dom, cod, c);
    let cols = cod.labels();
    for a in dom.labels() {
        for b in &cols {
            if s.chance(1, 2) {
                m.set(a.clone(), b.clone(), s.scalar(c));
            }
        }
    }
    m
}

/// A matrix X ⊸ Y not refuted by the generators: shrunk until the pairing test passes.
pub fn sample_morphism(x: &SpaceRepr, y: &SpaceRepr, c: Carrier, s: &mut Sampler) -> Matrix {
    let mut m = random_matrix(&x.web, &y.web, c, s);
    if x.model.is_total() {
        return m;
    }
    let half = c.from_q(crate::pcr::q(1, 2)).ok();
    for _ in 0..64 {
        match member_hom(x, y, &m) {
            Ok(v) if !v.is_refuted() => return m,
            _ => {}
        }
        match &half {
            Some(h) if x.model == ModelId::Pcoh => m = m.scale(h),
            _ => {
                // drop an entry: the only way down in a two-valued carrier or from ∞
                let keys: Vec<(Label, Label)> = m.iter().map(|(k, _)| k.clone()).collect();
                let (a, b) = s.pick(&keys).clone();
                m.set(a, b, c.zero());
            }
        }
    }
    Matrix::zero(&x.web, &y.web, c)
}

pub fn show_diff(what: &str, d: Option<(Label, Label, Scalar, Scalar)>) -> String {
    match d {
        Some((a, b, x, y)) => format!("{what}: entry ({a},{b}) is {x}, expected {y}"),
        None => format!("{what}: differs"),
    }
}

/// Law `lhs ⊑ rhs` restricted to `region`: vacuous when the left side is undefined.
pub fn law_mat<E: Display>(
    case: &mut Case,
    what: &str,
    lhs: Result<Partial<Matrix>, E>,
    rhs: Result<Partial<Matrix>, E>,
    region: impl Fn(&Label, &Label) -> bool,
) -> bool {
    match (lhs, rhs) {
        (Err(e), _) | (_, Err(e)) => case.check(false, || format!("{what}: {e}")),
        (Ok(Partial::Undefined { .. }), _) => {
            case.vacuous();
            true
        }
        (Ok(Partial::Defined(_)), Ok(Partial::Undefined { at })) => {
            case.check(false, || format!("{what}: right side undefined at {at}"))
        }
        (Ok(Partial::Defined(l)), Ok(Partial::Defined(r))) => {
            let d = l.first_difference(&r, &region);
            case.check(d.is_none(), || show_diff(what, d))
        }
    }
}

/// Vector version of [`law_mat`].
pub fn law_vec<E: Display>(
    case: &mut Case,
    what: &str,
    lhs: Result<Partial<Vector>, E>,
    rhs: Result<Partial<Vector>, E>,
    region: impl Fn(&Label) -> bool,
) -> bool {
    match (lhs, rhs) {
        (Err(e), _) | (_, Err(e)) => case.check(false, || format!("{what}: {e}")),
        (Ok(Partial::Undefined { .. }), _) => {
            case.vacuous();
            true
        }
        (Ok(Partial::Defined(_)), Ok(Partial::Undefined { at })) => {
            case.check(false, || format!("{what}: right side undefined at {at}"))
        }
        (Ok(Partial::Defined(l)), Ok(Partial::Defined(r))) => {
            let bad = l
                .entries()
                .keys()
                .chain(r.entries().keys())
                .find(|k| region(k) && l.get(k) != r.get(k))
                .cloned();
            case.check(bad.is_none(), || {
                let k = bad.unwrap();
                format!("{what}: entry {k} is {}, expected {}", l.get(&k), r.get(&k))
            })
        }
    }
}

/// Chain of partial results: an undefined step makes the whole chain undefined.
pub fn then<T, U, E>(r: Result<Partial<T>, E>, f: impl FnOnce(T) -> Result<Partial<U>, E>) -> Result<Partial<U>, E> {
    match r? {
        Partial::Defined(v) => f(v),
        Partial::Undefined { at } => Ok(Partial::Undefined { at }),
    }
}

/// Point test for positive vectors, semimodule test for signed ones.
pub fn member_any(x: &SpaceRepr, v: &Vector) -> Result<MembershipVerdict, SpaceError> {
    if v.carrier == x.carrier() {
        x.member_point(v)
    } else {
        x.member_semimod(v)
    }
}

pub fn everywhere(_: &Label, _: &Label) -> bool {
    true
}

/// s · x, with web errors lifted.
pub fn apply(s: &Matrix, x: &Vector) -> Result<Partial<Vector>, FamilyError> {
    mat_apply(s, x)
}

pub fn defined<T>(v: T) -> Result<Partial<T>, FamilyError> {
    Ok(Partial::Defined(v))
}

/// Base data used when a scenario does not give any: a 3-point web, a 2-point web, a 1-point web.
pub fn default_bases(model: ModelId) -> Vec<BaseData> {
    match model {
        ModelId::Coh => vec![
            BaseData::graph(3, vec![(0, 1), (1, 2)]),
            BaseData::graph(2, vec![]),
            BaseData::graph(1, vec![]),
        ],
        ModelId::Pcoh => {
            vec![BaseData::web(3), BaseData { size: 2, edges: vec![], simplex: true }, BaseData::web(1)]
        }
        _ => vec![BaseData::web(3), BaseData::web(2), BaseData::web(1)],
    }
}

/// Everything a law suite needs: model, base spaces X, Y, Z, truncation, sampling.
#[derive(Clone, Debug)]
pub struct Setup {
    pub model: ModelId,
    pub spaces: Vec<SpaceRepr>,
    pub cfg: TruncCfg,
    pub samples: usize,
    pub seed: u64,
    pub mutation: Option<Mutation>,
}

impl Setup {
    pub fn new(model: ModelId, bases: &[BaseData], cfg: TruncCfg, samples: usize, seed: u64) -> Result<Setup, SpaceError> {
        let mut spaces = bases.iter().map(|b| SpaceRepr::make(model, b)).collect::<Result<Vec<_>, _>>()?;
        let defaults = default_bases(model);
        while spaces.len() < 3 {
            spaces.push(SpaceRepr::make(model, &defaults[spaces.len()])?);
        }
        Ok(Setup { model, spaces, cfg, samples, seed, mutation: None })
    }

    pub fn x(&self) -> &SpaceRepr {
        &self.spaces[0]
    }

    pub fn y(&self) -> &SpaceRepr {
        &self.spaces[1]
    }

    pub fn z(&self) -> &SpaceRepr {
        &self.spaces[2]
    }

    pub fn carrier(&self) -> Carrier {
        data_carrier(self.model)
    }

    pub fn sampler(&self, tag: &str) -> Sampler {
        Sampler::derived(self.seed, &format!("{tag}/{}", self.model))
    }
}
