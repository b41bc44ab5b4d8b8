//! Webs, structured labels, and sparse partial linear algebra over them.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Bound;
use std::sync::Arc;
use thiserror::Error;

use crate::pcr::{Carrier, Partial, PcrError, Scalar, SumOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("web mismatch: {0} vs {1}")]
    WebMismatch(String, String),
    #[error("label {0} is not in web {1}")]
    LabelNotInWeb(String, String),
    #[error("map is not injective: {0} has two preimages")]
    NotInjective(String),
    #[error("cannot parse label `{0}`")]
    BadLabel(String),
    #[error(transparent)]
    Pcr(#[from] PcrError),
}

/// A point of a web. The constructor records where the point came from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Star,
    Atom(u32),
    Idx(u32),
    Pair(Box<Label>, Box<Label>),
    Tag(u32, Box<Label>),
    Bag(Multiset),
}

/// Finite multiset, stored as a sorted list with repetitions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset(Vec<Label>);

impl Multiset {
    pub fn new(mut items: Vec<Label>) -> Self {
        items.sort();
        Multiset(items)
    }

    pub fn empty() -> Self {
        Multiset(Vec::new())
    }

    pub fn singleton(l: Label) -> Self {
        Multiset(vec![l])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Elements in sorted order, with repetitions.
    pub fn items(&self) -> &[Label] {
        &self.0
    }

    /// Distinct elements with multiplicities.
    pub fn counts(&self) -> Vec<(&Label, usize)> {
        let mut out: Vec<(&Label, usize)> = Vec::new();
        for l in &self.0 {
            match out.last_mut() {
                Some((last, n)) if *last == l => *n += 1,
                _ => out.push((l, 1)),
            }
        }
        out
    }

    pub fn plus(&self, other: &Multiset) -> Multiset {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Multiset::new(v)
    }

    pub fn map(&self, f: impl Fn(&Label) -> Label) -> Multiset {
        Multiset::new(self.0.iter().map(f).collect())
    }

    /// m! = Π multiplicity!
    pub fn factorial(&self) -> num_bigint::BigUint {
        self.counts().iter().map(|(_, n)| factorial(*n)).product()
    }
}

pub fn factorial(n: usize) -> num_bigint::BigUint {
    (1..=n).map(num_bigint::BigUint::from).product()
}

impl Label {
    pub fn pair(a: Label, b: Label) -> Label {
        Label::Pair(Box::new(a), Box::new(b))
    }

    pub fn tag(i: u32, l: Label) -> Label {
        Label::Tag(i, Box::new(l))
    }

    pub fn bag(items: Vec<Label>) -> Label {
        Label::Bag(Multiset::new(items))
    }

    pub fn as_pair(&self) -> Option<(&Label, &Label)> {
        match self {
            Label::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_bag(&self) -> Option<&Multiset> {
        match self {
            Label::Bag(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_idx(&self) -> Option<u32> {
        match self {
            Label::Idx(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_tag(&self) -> Option<(u32, &Label)> {
        match self {
            Label::Tag(i, l) => Some((*i, l)),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Result<Label, FamilyError> {
        let mut p = LabelParser { s: s.as_bytes(), pos: 0 };
        let l = p.label().ok_or_else(|| FamilyError::BadLabel(s.to_string()))?;
        if p.pos != p.s.len() {
            return Err(FamilyError::BadLabel(s.to_string()));
        }
        Ok(l)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Star => write!(f, "*"),
            Label::Atom(i) => write!(f, "a{i}"),
            Label::Idx(i) => write!(f, "#{i}"),
            Label::Pair(a, b) => write!(f, "({a},{b})"),
            Label::Tag(i, l) => write!(f, "{i}:{l}"),
            Label::Bag(m) => write!(f, "{m}"),
        }
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

struct LabelParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl LabelParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Option<()> {
        (self.peek()? == c).then(|| self.pos += 1)
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn label(&mut self) -> Option<Label> {
        match self.peek()? {
            b'*' => {
                self.pos += 1;
                Some(Label::Star)
            }
            b'a' => {
                self.pos += 1;
                Some(Label::Atom(self.number()?))
            }
            b'#' => {
                self.pos += 1;
                Some(Label::Idx(self.number()?))
            }
            b'(' => {
                self.pos += 1;
                let a = self.label()?;
                self.eat(b',')?;
                let b = self.label()?;
                self.eat(b')')?;
                Some(Label::pair(a, b))
            }
            b'[' => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.eat(b']').is_some() {
                    return Some(Label::Bag(Multiset::empty()));
                }
                loop {
                    items.push(self.label()?);
                    if self.eat(b']').is_some() {
                        break;
                    }
                    self.eat(b',')?;
                }
                Some(Label::bag(items))
            }
            b'0'..=b'9' => {
                let i = self.number()?;
                self.eat(b':')?;
                Some(Label::tag(i, self.label()?))
            }
            _ => None,
        }
    }
}

/// Reflexive coherence relation on a web, used to decide which multisets a coherence
/// exponential keeps (those whose support is a clique).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coh {
    /// Every pair coherent.
    Full,
    /// Only equal points coherent.
    Discrete,
    /// Atoms a_i, a_j coherent when i = j or {i, j} is an edge.
    Graph { edges: BTreeSet<(u32, u32)> },
    /// Coherent when equal or not coherent in the inner relation.
    Dual(Arc<Coh>),
    Tensor(Arc<Coh>, Arc<Coh>),
    /// Points with different tags are coherent.
    With(Vec<Arc<Coh>>),
    /// Multisets are coherent when their union is a clique.
    Bang(Arc<Coh>),
}

impl Coh {
    pub fn graph(edges: impl IntoIterator<Item = (u32, u32)>) -> Coh {
        Coh::Graph { edges: edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect() }
    }

    pub fn dual(c: &Arc<Coh>) -> Arc<Coh> {
        match &**c {
            Coh::Dual(inner) => inner.clone(),
            Coh::Full => Arc::new(Coh::Discrete),
            Coh::Discrete => Arc::new(Coh::Full),
            _ => Arc::new(Coh::Dual(c.clone())),
        }
    }

    pub fn coherent(&self, a: &Label, b: &Label) -> bool {
        if a == b {
            return true;
        }
        match self {
            Coh::Full => true,
            Coh::Discrete => false,
            Coh::Graph { edges } => match (a, b) {
                (Label::Atom(i), Label::Atom(j)) => edges.contains(&((*i).min(*j), (*i).max(*j))),
                _ => false,
            },
            Coh::Dual(inner) => !inner.coherent(a, b),
            Coh::Tensor(x, y) => match (a.as_pair(), b.as_pair()) {
                (Some((a1, a2)), Some((b1, b2))) => x.coherent(a1, b1) && y.coherent(a2, b2),
                _ => false,
            },
            Coh::With(parts) => match (a.as_tag(), b.as_tag()) {
                (Some((i, x)), Some((j, y))) if i == j => {
                    parts.get(i as usize - 1).is_some_and(|c| c.coherent(x, y))
                }
                (Some(_), Some(_)) => true,
                _ => false,
            },
            Coh::Bang(inner) => match (a.as_bag(), b.as_bag()) {
                (Some(m), Some(n)) => {
                    let u = m.plus(n);
                    is_clique(inner, u.items())
                }
                _ => false,
            },
        }
    }
}

pub fn is_clique(c: &Coh, items: &[Label]) -> bool {
    items.iter().enumerate().all(|(i, a)| items[i + 1..].iter().all(|b| c.coherent(a, b)))
}

/// Index set of a space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Web {
    /// a0 .. a{n-1}
    Atoms(u32),
    /// The single point `*`.
    Unit,
    /// #0 .. #{n-1}
    Indices(u32),
    Pair(Arc<Web>, Arc<Web>),
    /// Disjoint union with tags 1..=n.
    Tagged(Vec<Arc<Web>>),
    /// Multisets of degree at most `degree`; with `clique`, only those whose support is a clique.
    Bang { base: Arc<Web>, degree: u32, clique: Option<Arc<Coh>> },
}

impl fmt::Display for Web {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Web::Atoms(n) => write!(f, "A{n}"),
            Web::Unit => write!(f, "1"),
            Web::Indices(n) => write!(f, "N{n}"),
            Web::Pair(a, b) => write!(f, "({a} x {b})"),
            Web::Tagged(parts) => {
                write!(f, "+[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")
            }
            Web::Bang { base, degree, clique } => {
                write!(f, "!{degree}{}({base})", if clique.is_some() { "c" } else { "" })
            }
        }
    }
}

impl Web {
    pub fn pair(a: &Arc<Web>, b: &Arc<Web>) -> Arc<Web> {
        Arc::new(Web::Pair(a.clone(), b.clone()))
    }

    pub fn contains(&self, l: &Label) -> bool {
        match (self, l) {
            (Web::Atoms(n), Label::Atom(i)) | (Web::Indices(n), Label::Idx(i)) => i < n,
            (Web::Unit, Label::Star) => true,
            (Web::Pair(a, b), Label::Pair(x, y)) => a.contains(x) && b.contains(y),
            (Web::Tagged(parts), Label::Tag(i, x)) => {
                *i >= 1 && parts.get(*i as usize - 1).is_some_and(|w| w.contains(x))
            }
            (Web::Bang { base, degree, clique }, Label::Bag(m)) => {
                m.degree() <= *degree as usize
                    && m.items().iter().all(|x| base.contains(x))
                    && clique.as_ref().is_none_or(|c| is_clique(c, m.items()))
            }
            _ => false,
        }
    }

    /// All labels in canonical order. Only call on webs of desk size.
    pub fn labels(&self) -> Vec<Label> {
        let mut out = match self {
            Web::Atoms(n) => (0..*n).map(Label::Atom).collect(),
            Web::Unit => vec![Label::Star],
            Web::Indices(n) => (0..*n).map(Label::Idx).collect(),
            Web::Pair(a, b) => {
                let lb = b.labels();
                let mut v = Vec::new();
                for x in a.labels() {
                    for y in &lb {
                        v.push(Label::pair(x.clone(), y.clone()));
                    }
                }
                v
            }
            Web::Tagged(parts) => parts
                .iter()
                .enumerate()
                .flat_map(|(i, w)| w.labels().into_iter().map(move |l| Label::tag(i as u32 + 1, l)))
                .collect(),
            Web::Bang { base, degree, clique } => multisets_upto(&base.labels(), *degree as usize)
                .into_iter()
                .filter(|m| clique.as_ref().is_none_or(|c| is_clique(c, m.items())))
                .map(Label::Bag)
                .collect::<Vec<_>>(),
        };
        out.sort();
        out
    }

    pub fn size(&self) -> usize {
        self.labels().len()
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Web::Atoms(n) | Web::Indices(n) => *n == 0,
            Web::Unit | Web::Bang { .. } => false,
            Web::Pair(a, b) => a.is_empty() || b.is_empty(),
            Web::Tagged(parts) => parts.iter().all(|p| p.is_empty()),
        }
    }

    pub fn bang_degree(&self) -> Option<usize> {
        match self {
            Web::Bang { degree, .. } => Some(*degree as usize),
            _ => None,
        }
    }

    pub fn bang_base(&self) -> Option<&Arc<Web>> {
        match self {
            Web::Bang { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn pair_parts(&self) -> Option<(&Arc<Web>, &Arc<Web>)> {
        match self {
            Web::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

/// All multisets over `items` of degree at most `d`.
pub fn multisets_upto(items: &[Label], d: usize) -> Vec<Multiset> {
    let mut out = vec![Multiset::empty()];
    let mut frontier: Vec<(Vec<Label>, usize)> = vec![(Vec::new(), 0)];
    for _ in 0..d {
        let mut next = Vec::new();
        for (m, start) in &frontier {
            for (j, it) in items.iter().enumerate().skip(*start) {
                let mut v = m.clone();
                v.push(it.clone());
                out.push(Multiset::new(v.clone()));
                next.push((v, j));
            }
        }
        frontier = next;
    }
    out
}

fn check_web(l: &Label, w: &Web) -> Result<(), FamilyError> {
    if w.contains(l) {
        Ok(())
    } else {
        Err(FamilyError::LabelNotInWeb(l.to_string(), w.to_string()))
    }
}

fn same_web(a: &Arc<Web>, b: &Arc<Web>) -> Result<(), FamilyError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(FamilyError::WebMismatch(a.to_string(), b.to_string()))
    }
}

/// Sparse web-indexed family; absent labels are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vector {
    pub web: Arc<Web>,
    pub carrier: Carrier,
    entries: BTreeMap<Label, Scalar>,
}

impl Vector {
    pub fn zero(web: &Arc<Web>, carrier: Carrier) -> Self {
        Vector { web: web.clone(), carrier, entries: BTreeMap::new() }
    }

    pub fn from_entries(
        web: &Arc<Web>,
        carrier: Carrier,
        entries: impl IntoIterator<Item = (Label, Scalar)>,
    ) -> Result<Self, FamilyError> {
        let mut v = Vector::zero(web, carrier);
        for (l, s) in entries {
            carrier.check(&s)?;
            check_web(&l, web)?;
            if !s.is_zero() {
                v.entries.insert(l, s);
            }
        }
        Ok(v)
    }

    /// Entries are trusted to be in the web and carrier.
    pub(crate) fn from_map(web: &Arc<Web>, carrier: Carrier, mut entries: BTreeMap<Label, Scalar>) -> Self {
        entries.retain(|_, s| !s.is_zero());
        Vector { web: web.clone(), carrier, entries }
    }

    pub fn basis(web: &Arc<Web>, carrier: Carrier, l: Label) -> Result<Self, FamilyError> {
        Vector::from_entries(web, carrier, [(l, carrier.one())])
    }

    /// Δ: every entry 1.
    pub fn diag(web: &Arc<Web>, carrier: Carrier) -> Self {
        Vector::constant(web, &carrier.one())
    }

    pub fn constant(web: &Arc<Web>, s: &Scalar) -> Self {
        let c = s.carrier();
        Vector::from_map(web, c, web.labels().into_iter().map(|l| (l, s.clone())).collect())
    }

    pub fn get(&self, l: &Label) -> Scalar {
        self.entries.get(l).cloned().unwrap_or_else(|| self.carrier.zero())
    }

    pub fn entries(&self) -> &BTreeMap<Label, Scalar> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Scalar)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Label> {
        self.entries.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, a: &Scalar) -> Vector {
        let m = self.entries.iter().map(|(l, s)| (l.clone(), self.carrier.mul(a, s))).collect();
        Vector::from_map(&self.web, self.carrier, m)
    }

    /// Pointwise partial sum.
    pub fn add(&self, other: &Vector) -> Result<Partial<Vector>, FamilyError> {
        same_web(&self.web, &other.web)?;
        self.carrier.check(&other.carrier.zero())?;
        let mut m = self.entries.clone();
        for (l, s) in &other.entries {
            let cur = m.get(l).cloned().unwrap_or_else(|| self.carrier.zero());
            match self.carrier.add(&cur, s) {
                Some(v) => {
                    m.insert(l.clone(), v);
                }
                None => return Ok(Partial::undefined(l.to_string())),
            }
        }
        Ok(Partial::Defined(Vector::from_map(&self.web, self.carrier, m)))
    }

    /// Entry-wise comparison in the canonical preorder.
    pub fn leq(&self, other: &Vector) -> bool {
        self.entries.iter().all(|(l, s)| self.carrier.leq(s, &other.get(l)))
    }

    /// Re-express the vector in another carrier with the same values.
    pub fn recarrier(&self, c: Carrier) -> Result<Vector, FamilyError> {
        let m = self
            .entries
            .iter()
            .map(|(l, s)| Ok((l.clone(), convert(s, c)?)))
            .collect::<Result<BTreeMap<_, _>, FamilyError>>()?;
        Ok(Vector::from_map(&self.web, c, m))
    }

    pub fn with_web(&self, web: &Arc<Web>) -> Result<Vector, FamilyError> {
        Vector::from_entries(web, self.carrier, self.entries.clone())
    }
}

/// Convert a scalar to another carrier when the value exists there.
pub fn convert(s: &Scalar, c: Carrier) -> Result<Scalar, FamilyError> {
    if s.carrier() == c {
        return Ok(s.clone());
    }
    if s.is_zero() {
        return Ok(c.zero());
    }
    match s {
        Scalar::Ext(None) => Err(PcrError::BadLiteral { carrier: c, literal: "inf".into() }.into()),
        _ => match s.as_q() {
            Some(v) => Ok(c.from_q(v.clone())?),
            None => Ok(c.one()),
        },
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (l, s)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}:{s}")?;
        }
        write!(f, "}}")
    }
}

/// ⟨x, y⟩ = Σ_a x_a y_a.
pub fn scalar_product(x: &Vector, y: &Vector) -> Result<SumOutcome, FamilyError> {
    same_web(&x.web, &y.web)?;
    x.carrier.check(&y.carrier.zero())?;
    let c = x.carrier;
    let (small, large) = if x.entries.len() <= y.entries.len() { (x, y) } else { (y, x) };
    let mut acc = c.zero();
    for (l, s) in &small.entries {
        if let Some(t) = large.entries.get(l) {
            match c.add(&acc, &c.mul(s, t)) {
                Some(v) => acc = v,
                None => return Ok(Partial::undefined(l.to_string())),
            }
        }
    }
    Ok(Partial::Defined(acc))
}

/// (x ⊗ y)_(a,b) = x_a y_b.
pub fn tensor_vec(x: &Vector, y: &Vector) -> Result<Vector, FamilyError> {
    x.carrier.check(&y.carrier.zero())?;
    let web = Web::pair(&x.web, &y.web);
    let mut m = BTreeMap::new();
    for (a, s) in &x.entries {
        for (b, t) in &y.entries {
            m.insert(Label::pair(a.clone(), b.clone()), x.carrier.mul(s, t));
        }
    }
    Ok(Vector::from_map(&web, x.carrier, m))
}

pub fn abs_vec(x: &Vector) -> Result<Vector, FamilyError> {
    let pos = x.carrier.counterpart().ok_or(PcrError::NotAbsolute(x.carrier))?;
    let m = x
        .entries
        .iter()
        .map(|(l, s)| Ok((l.clone(), x.carrier.abs(s)?)))
        .collect::<Result<BTreeMap<_, _>, PcrError>>()?;
    Ok(Vector::from_map(&x.web, pos, m))
}

/// Push a vector forward along an injective relabelling into `target`.
pub fn reindex(phi: &BTreeMap<Label, Label>, x: &Vector, target: &Arc<Web>) -> Result<Vector, FamilyError> {
    let mut seen = BTreeSet::new();
    for (a, b) in phi {
        check_web(a, &x.web)?;
        check_web(b, target)?;
        if !seen.insert(b) {
            return Err(FamilyError::NotInjective(b.to_string()));
        }
    }
    let mut m = BTreeMap::new();
    for (a, s) in &x.entries {
        let b = phi.get(a).ok_or_else(|| FamilyError::LabelNotInWeb(a.to_string(), "domain of the map".into()))?;
        m.insert(b.clone(), s.clone());
    }
    Ok(Vector::from_map(target, x.carrier, m))
}

/// Sparse matrix indexed by (domain label, codomain label); (s·x)_b = Σ_a s_(a,b) x_a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub dom: Arc<Web>,
    pub cod: Arc<Web>,
    pub carrier: Carrier,
    entries: BTreeMap<(Label, Label), Scalar>,
}

impl Matrix {
    pub fn zero(dom: &Arc<Web>, cod: &Arc<Web>, carrier: Carrier) -> Self {
        Matrix { dom: dom.clone(), cod: cod.clone(), carrier, entries: BTreeMap::new() }
    }

    pub fn from_entries(
        dom: &Arc<Web>,
        cod: &Arc<Web>,
        carrier: Carrier,
        entries: impl IntoIterator<Item = ((Label, Label), Scalar)>,
    ) -> Result<Self, FamilyError> {
        let mut m = Matrix::zero(dom, cod, carrier);
        for ((a, b), s) in entries {
            carrier.check(&s)?;
            check_web(&a, dom)?;
            check_web(&b, cod)?;
            if !s.is_zero() {
                m.entries.insert((a, b), s);
            }
        }
        Ok(m)
    }

    /// Entries are trusted to be in the webs and carrier.
    pub(crate) fn from_map(
        dom: &Arc<Web>,
        cod: &Arc<Web>,
        carrier: Carrier,
        mut entries: BTreeMap<(Label, Label), Scalar>,
    ) -> Self {
        entries.retain(|_, s| !s.is_zero());
        Matrix { dom: dom.clone(), cod: cod.clone(), carrier, entries }
    }

    /// Kronecker matrix with entry 1 at each listed position.
    pub(crate) fn kronecker(
        dom: &Arc<Web>,
        cod: &Arc<Web>,
        carrier: Carrier,
        ones: impl IntoIterator<Item = (Label, Label)>,
    ) -> Self {
        let one = carrier.one();
        Matrix::from_map(dom, cod, carrier, ones.into_iter().map(|k| (k, one.clone())).collect())
    }

    pub fn identity(web: &Arc<Web>, carrier: Carrier) -> Self {
        Matrix::kronecker(web, web, carrier, web.labels().into_iter().map(|l| (l.clone(), l)))
    }

    pub fn get(&self, a: &Label, b: &Label) -> Scalar {
        self.entries.get(&(a.clone(), b.clone())).cloned().unwrap_or_else(|| self.carrier.zero())
    }

    pub fn entries(&self) -> &BTreeMap<(Label, Label), Scalar> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Label, Label), &Scalar)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero entries of row `a`.
    pub fn row<'a>(&'a self, a: &Label) -> impl Iterator<Item = (&'a Label, &'a Scalar)> + 'a {
        let key = (a.clone(), Label::Star);
        let a = a.clone();
        self.entries
            .range((Bound::Included(key), Bound::Unbounded))
            .take_while(move |((x, _), _)| *x == a)
            .map(|((_, b), s)| (b, s))
    }

    /// Labels with a nonzero entry in the domain.
    pub fn row_support(&self) -> BTreeSet<Label> {
        self.entries.keys().map(|(a, _)| a.clone()).collect()
    }

    pub fn col_support(&self) -> BTreeSet<Label> {
        self.entries.keys().map(|(_, b)| b.clone()).collect()
    }

    pub fn set(&mut self, a: Label, b: Label, s: Scalar) {
        if s.is_zero() {
            self.entries.remove(&(a, b));
        } else {
            self.entries.insert((a, b), s);
        }
    }

    /// The same entries read as a vector on the pair web |dom| × |cod|.
    pub fn as_vector(&self) -> Vector {
        let web = Web::pair(&self.dom, &self.cod);
        let m = self.entries.iter().map(|((a, b), s)| (Label::pair(a.clone(), b.clone()), s.clone())).collect();
        Vector::from_map(&web, self.carrier, m)
    }

    pub fn from_vector(v: &Vector) -> Result<Matrix, FamilyError> {
        let (dom, cod) = v.web.pair_parts().ok_or_else(|| FamilyError::WebMismatch(v.web.to_string(), "pair web".into()))?;
        let m = v
            .iter()
            .map(|(l, s)| {
                let (a, b) = l.as_pair().expect("pair web labels are pairs");
                ((a.clone(), b.clone()), s.clone())
            })
            .collect();
        Ok(Matrix::from_map(dom, cod, v.carrier, m))
    }

    pub fn transpose(&self) -> Matrix {
        let m = self.entries.iter().map(|((a, b), s)| ((b.clone(), a.clone()), s.clone())).collect();
        Matrix::from_map(&self.cod, &self.dom, self.carrier, m)
    }

    pub fn scale(&self, a: &Scalar) -> Matrix {
        let m = self.entries.iter().map(|(k, s)| (k.clone(), self.carrier.mul(a, s))).collect();
        Matrix::from_map(&self.dom, &self.cod, self.carrier, m)
    }

    /// Keep only the entries satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(&Label, &Label) -> bool) -> Matrix {
        let m = self.entries.iter().filter(|((a, b), _)| keep(a, b)).map(|(k, s)| (k.clone(), s.clone())).collect();
        Matrix::from_map(&self.dom, &self.cod, self.carrier, m)
    }

    /// Same entries over other (compatible) webs.
    pub fn rewebbed(&self, dom: &Arc<Web>, cod: &Arc<Web>) -> Result<Matrix, FamilyError> {
        Matrix::from_entries(dom, cod, self.carrier, self.entries.clone())
    }

    /// Pointwise partial sum.
    pub fn add(&self, other: &Matrix) -> Result<Partial<Matrix>, FamilyError> {
        same_web(&self.dom, &other.dom)?;
        same_web(&self.cod, &other.cod)?;
        let mut m = self.entries.clone();
        for (k, s) in &other.entries {
            let cur = m.get(k).cloned().unwrap_or_else(|| self.carrier.zero());
            match self.carrier.add(&cur, s) {
                Some(v) => {
                    m.insert(k.clone(), v);
                }
                None => return Ok(Partial::undefined(format!("({},{})", k.0, k.1))),
            }
        }
        Ok(Partial::Defined(Matrix::from_map(&self.dom, &self.cod, self.carrier, m)))
    }

    /// First entry where the two matrices differ among positions satisfying `region`.
    pub fn first_difference(
        &self,
        other: &Matrix,
        region: impl Fn(&Label, &Label) -> bool,
    ) -> Option<(Label, Label, Scalar, Scalar)> {
        let keys: BTreeSet<&(Label, Label)> = self.entries.keys().chain(other.entries.keys()).collect();
        for (a, b) in keys {
            if !region(a, b) {
                continue;
            }
            let (x, y) = (self.get(a, b), other.get(a, b));
            if x != y {
                return Some((a.clone(), b.clone(), x, y));
            }
        }
        None
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, ((a, b), s)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({a},{b}):{s}")?;
        }
        write!(f, "}}")
    }
}

/// s · x.
pub fn mat_apply(s: &Matrix, x: &Vector) -> Result<Partial<Vector>, FamilyError> {
    same_web(&s.dom, &x.web)?;
    let c = s.carrier;
    c.check(&x.carrier.zero())?;
    let mut acc: BTreeMap<Label, Scalar> = BTreeMap::new();
    for (a, xa) in x.iter() {
        for (b, sab) in s.row(a) {
            let term = c.mul(sab, xa);
            let slot = acc.entry(b.clone()).or_insert_with(|| c.zero());
            match c.add(slot, &term) {
                Some(v) => *slot = v,
                None => return Ok(Partial::undefined(b.to_string())),
            }
        }
    }
    Ok(Partial::Defined(Vector::from_map(&s.cod, c, acc)))
}

/// t ∘ s, with (t ∘ s)_(a,c) = Σ_b s_(a,b) t_(b,c).
pub fn mat_compose(t: &Matrix, s: &Matrix) -> Result<Partial<Matrix>, FamilyError> {
    same_web(&s.cod, &t.dom)?;
    let c = s.carrier;
    c.check(&t.carrier.zero())?;
    let mut acc: BTreeMap<(Label, Label), Scalar> = BTreeMap::new();
    for ((a, b), sab) in s.iter() {
        for (cl, tbc) in t.row(b) {
            let term = c.mul(sab, tbc);
            let slot = acc.entry((a.clone(), cl.clone())).or_insert_with(|| c.zero());
            match c.add(slot, &term) {
                Some(v) => *slot = v,
                None => return Ok(Partial::undefined(format!("({a},{cl})"))),
            }
        }
    }
    Ok(Partial::Defined(Matrix::from_map(&s.dom, &t.cod, c, acc)))
}

/// Compose a chain applied right to left: `chain[0] ∘ chain[1] ∘ …`.
pub fn compose_all(chain: &[&Matrix]) -> Result<Partial<Matrix>, FamilyError> {
    let (last, rest) = chain.split_last().expect("nonempty chain");
    let mut acc = (*last).clone();
    for t in rest.iter().rev() {
        match mat_compose(t, &acc)? {
            Partial::Defined(m) => acc = m,
            u => return Ok(u),
        }
    }
    Ok(Partial::Defined(acc))
}

/// (s ⊗ s')_((a,a'),(b,b')) = s_(a,b) s'_(a',b').
pub fn tensor_mat(s: &Matrix, t: &Matrix) -> Result<Matrix, FamilyError> {
    s.carrier.check(&t.carrier.zero())?;
    let dom = Web::pair(&s.dom, &t.dom);
    let cod = Web::pair(&s.cod, &t.cod);
    let mut m = BTreeMap::new();
    for ((a, b), x) in s.iter() {
        for ((a2, b2), y) in t.iter() {
            m.insert(
                (Label::pair(a.clone(), a2.clone()), Label::pair(b.clone(), b2.clone())),
                s.carrier.mul(x, y),
            );
        }
    }
    Ok(Matrix::from_map(&dom, &cod, s.carrier, m))
}

pub fn abs_mat(s: &Matrix) -> Result<Matrix, FamilyError> {
    let pos = s.carrier.counterpart().ok_or(PcrError::NotAbsolute(s.carrier))?;
    let m = s
        .iter()
        .map(|(k, v)| Ok((k.clone(), s.carrier.abs(v)?)))
        .collect::<Result<BTreeMap<_, _>, PcrError>>()?;
    Ok(Matrix::from_map(&s.dom, &s.cod, pos, m))
}

/// On-disk form of a vector: canonical sorted entries as label and literal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorRecord {
    pub web: Web,
    pub carrier: Carrier,
    pub entries: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub dom: Web,
    pub cod: Web,
    pub carrier: Carrier,
    pub entries: Vec<(String, String, String)>,
}

impl Vector {
    pub fn to_record(&self) -> VectorRecord {
        VectorRecord {
            web: (*self.web).clone(),
            carrier: self.carrier,
            entries: self.entries.iter().map(|(l, s)| (l.to_string(), s.to_string())).collect(),
        }
    }

    pub fn from_record(r: &VectorRecord) -> Result<Vector, FamilyError> {
        let web = Arc::new(r.web.clone());
        let entries = r
            .entries
            .iter()
            .map(|(l, s)| Ok((Label::parse(l)?, r.carrier.parse(s)?)))
            .collect::<Result<Vec<_>, FamilyError>>()?;
        Vector::from_entries(&web, r.carrier, entries)
    }
}

impl Matrix {
    pub fn to_record(&self) -> MatrixRecord {
        MatrixRecord {
            dom: (*self.dom).clone(),
            cod: (*self.cod).clone(),
            carrier: self.carrier,
            entries: self.entries.iter().map(|((a, b), s)| (a.to_string(), b.to_string(), s.to_string())).collect(),
        }
    }

    pub fn from_record(r: &MatrixRecord) -> Result<Matrix, FamilyError> {
        let dom = Arc::new(r.dom.clone());
        let cod = Arc::new(r.cod.clone());
        let entries = r
            .entries
            .iter()
            .map(|(a, b, s)| Ok(((Label::parse(a)?, Label::parse(b)?), r.carrier.parse(s)?)))
            .collect::<Result<Vec<_>, FamilyError>>()?;
        Matrix::from_entries(&dom, &cod, r.carrier, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcr::{q, Scalar};

    fn atoms(n: u32) -> Arc<Web> {
        Arc::new(Web::Atoms(n))
    }

    fn nn(v: &[(i64, i64)]) -> Vec<Scalar> {
        v.iter().map(|(a, b)| Scalar::Nonneg(q(*a, *b))).collect()
    }

    fn vec_of(web: &Arc<Web>, c: Carrier, vals: Vec<Scalar>) -> Vector {
        Vector::from_entries(web, c, web.labels().into_iter().zip(vals)).unwrap()
    }

    #[test]
    fn label_text_round_trip() {
        let l = Label::pair(
            Label::bag(vec![Label::Atom(1), Label::Atom(0), Label::Atom(1)]),
            Label::tag(2, Label::pair(Label::Idx(3), Label::Star)),
        );
        let s = l.to_string();
        assert_eq!(s, "([a0,a1,a1],2:(#3,*))");
        assert_eq!(Label::parse(&s).unwrap(), l);
        assert_eq!(Label::parse("[]").unwrap(), Label::Bag(Multiset::empty()));
        assert!(Label::parse("(a0").is_err());
    }

    #[test]
    fn pcoh_scalar_product() {
        let w = atoms(2);
        let c = Carrier::NonnegRational;
        let x = vec_of(&w, c, nn(&[(1, 2), (1, 2)]));
        let y = Vector::diag(&w, c);
        assert_eq!(scalar_product(&x, &y).unwrap(), Partial::Defined(c.one()));
    }

    #[test]
    fn kronecker_pairing() {
        let w = atoms(3);
        let c = Carrier::Rational;
        for a in w.labels() {
            for b in w.labels() {
                let ea = Vector::basis(&w, c, a.clone()).unwrap();
                let eb = Vector::basis(&w, c, b.clone()).unwrap();
                let want = if a == b { c.one() } else { c.zero() };
                assert_eq!(scalar_product(&ea, &eb).unwrap(), Partial::Defined(want));
            }
        }
    }

    #[test]
    fn coherence_pairing_of_two_omegas_is_undefined() {
        let w = atoms(2);
        let c = Carrier::Coherence;
        let x = Vector::diag(&w, c);
        assert!(!scalar_product(&x, &x).unwrap().is_defined());
        let s = Matrix::kronecker(&w, &atoms(1), c, [(Label::Atom(0), Label::Atom(0)), (Label::Atom(1), Label::Atom(0))]);
        assert!(!mat_apply(&s, &x).unwrap().is_defined());
    }

    #[test]
    fn identity_and_zero_application() {
        let w = atoms(3);
        let c = Carrier::Rational;
        let x = vec_of(&w, c, vec![c.int(2).unwrap(), c.zero(), c.parse("-1/3").unwrap()]);
        assert_eq!(mat_apply(&Matrix::identity(&w, c), &x).unwrap(), Partial::Defined(x.clone()));
        assert_eq!(mat_apply(&Matrix::zero(&w, &w, c), &x).unwrap(), Partial::Defined(Vector::zero(&w, c)));
    }

    #[test]
    fn pcoh_two_by_two_composite() {
        let w = atoms(2);
        let c = Carrier::NonnegRational;
        let h = Scalar::Nonneg(q(1, 2));
        let t = Matrix::from_entries(&w, &w, c, w.labels().into_iter().flat_map(|a| {
            let h = h.clone();
            w.labels().into_iter().map(move |b| ((a.clone(), b), h.clone()))
        }))
        .unwrap();
        assert_eq!(mat_compose(&t, &t).unwrap(), Partial::Defined(t.clone()));
        assert_eq!(mat_compose(&t, &Matrix::identity(&w, c)).unwrap(), Partial::Defined(t.clone()));
    }

    #[test]
    fn permutations_compose() {
        let w = atoms(3);
        let c = Carrier::Bool;
        let cyc = |k: u32| {
            Matrix::kronecker(&w, &w, c, (0..3).map(|i| (Label::Atom(i), Label::Atom((i + k) % 3))))
        };
        assert_eq!(mat_compose(&cyc(1), &cyc(1)).unwrap(), Partial::Defined(cyc(2)));
    }

    #[test]
    fn tensor_of_vectors() {
        let c = Carrier::NonnegRational;
        let x = vec_of(&atoms(2), c, nn(&[(1, 2), (1, 2)]));
        let y = vec_of(&atoms(1), c, nn(&[(1, 3)]));
        let t = tensor_vec(&x, &y).unwrap();
        assert_eq!(t.get(&Label::pair(Label::Atom(1), Label::Atom(0))), Scalar::Nonneg(q(1, 6)));
        assert!(tensor_vec(&x, &Vector::zero(&atoms(4), c)).unwrap().is_zero());
    }

    #[test]
    fn abs_values() {
        let c = Carrier::Rational;
        let x = vec_of(&atoms(2), c, vec![c.parse("-1/2").unwrap(), c.parse("1/3").unwrap()]);
        let a = abs_vec(&x).unwrap();
        assert_eq!(a.get(&Label::Atom(0)), Scalar::Nonneg(q(1, 2)));
        assert!(abs_vec(&Vector::zero(&atoms(2), c)).unwrap().is_zero());
        assert!(abs_vec(&Vector::zero(&atoms(2), Carrier::Bool)).is_err());
    }

    #[test]
    fn reindex_pads_and_rejects_collisions() {
        let c = Carrier::Rational;
        let x = vec_of(&atoms(2), c, vec![c.int(1).unwrap(), c.int(2).unwrap()]);
        let phi: BTreeMap<Label, Label> =
            [(Label::Atom(0), Label::Atom(2)), (Label::Atom(1), Label::Atom(0))].into_iter().collect();
        let y = reindex(&phi, &x, &atoms(3)).unwrap();
        assert_eq!(y.get(&Label::Atom(2)), c.int(1).unwrap());
        assert_eq!(y.get(&Label::Atom(1)), c.zero());
        let bad: BTreeMap<Label, Label> =
            [(Label::Atom(0), Label::Atom(0)), (Label::Atom(1), Label::Atom(0))].into_iter().collect();
        assert!(matches!(reindex(&bad, &x, &atoms(3)), Err(FamilyError::NotInjective(_))));
    }

    #[test]
    fn coherent_bang_web_keeps_cliques() {
        let g = Arc::new(Coh::graph([(0, 1), (1, 2)]));
        let w = Web::Bang { base: atoms(3), degree: 2, clique: Some(g) };
        assert!(w.contains(&Label::bag(vec![Label::Atom(0), Label::Atom(1)])));
        assert!(!w.contains(&Label::bag(vec![Label::Atom(0), Label::Atom(2)])));
        // [], 3 singletons, 3 doubles, 2 edges
        assert_eq!(w.size(), 9);
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets_upto(&[Label::Atom(0), Label::Atom(1)], 2).len(), 6);
        let m = Multiset::new(vec![Label::Atom(0), Label::Atom(0), Label::Atom(1)]);
        assert_eq!(m.factorial(), num_bigint::BigUint::from(2u32));
    }

    #[test]
    fn matrix_record_round_trip() {
        let w = atoms(2);
        let c = Carrier::Coherence;
        let m = Matrix::kronecker(&w, &w, c, [(Label::Atom(0), Label::Atom(1))]);
        let r = m.to_record();
        let back = Matrix::from_record(&r).unwrap();
        assert_eq!(back, m);
        let mut wrong = r.clone();
        wrong.carrier = Carrier::NonnegRational;
        wrong.entries[0].2 = "w".into();
        assert!(Matrix::from_record(&wrong).is_err());
    }
}
