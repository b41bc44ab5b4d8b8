use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

use super::scalar::{Carrier, PcrInstance, Scalar, Q};
use super::PcrError;

/// Outcome of a partial operation: a value, or the index where definedness broke.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Partial<T> {
    Defined(T),
    Undefined { at: String },
}

pub type SumOutcome = Partial<Scalar>;

impl<T> Partial<T> {
    pub fn undefined(at: impl Into<String>) -> Self {
        Partial::Undefined { at: at.into() }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Partial::Defined(_))
    }

    pub fn defined(self) -> Option<T> {
        match self {
            Partial::Defined(v) => Some(v),
            Partial::Undefined { .. } => None,
        }
    }

    pub fn as_ref(&self) -> Option<&T> {
        match self {
            Partial::Defined(v) => Some(v),
            Partial::Undefined { .. } => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Partial<U> {
        match self {
            Partial::Defined(v) => Partial::Defined(f(v)),
            Partial::Undefined { at } => Partial::Undefined { at },
        }
    }

    pub fn expect_defined(self, what: &str) -> T {
        match self {
            Partial::Defined(v) => v,
            Partial::Undefined { at } => panic!("{what}: undefined at {at}"),
        }
    }
}

impl<T: PartialEq> Partial<T> {
    /// Same outcome, ignoring where an undefined result broke.
    pub fn same_outcome(&self, other: &Partial<T>) -> bool {
        match (self, other) {
            (Partial::Defined(a), Partial::Defined(b)) => a == b,
            (Partial::Undefined { .. }, Partial::Undefined { .. }) => true,
            _ => false,
        }
    }

    /// `self ⊑ other`: if `self` is defined, `other` is defined and equal.
    pub fn refines(&self, other: &Partial<T>) -> bool {
        match self {
            Partial::Undefined { .. } => true,
            Partial::Defined(a) => matches!(other, Partial::Defined(b) if a == b),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Partial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Partial::Defined(v) => write!(f, "{v}"),
            Partial::Undefined { at } => write!(f, "undefined@{at}"),
        }
    }
}

/// Infinite tail t_0, t_1, … following the finite part of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tail {
    Zero,
    /// t_k = r
    Constant(Scalar),
    /// t_k = (−1)^k r
    Alternating(Scalar),
    /// t_k = first · ratio^k
    Geometric {
        first: Scalar,
        #[serde(with = "super::scalar::q_str")]
        ratio: Q,
    },
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::Zero => write!(f, "zero"),
            Tail::Constant(r) => write!(f, "const({r})"),
            Tail::Alternating(r) => write!(f, "alt({r})"),
            Tail::Geometric { first, ratio } => write!(f, "geom({first},{ratio})"),
        }
    }
}

/// A family with finitely many labelled entries and a closed-form tail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub finite: Vec<(String, Scalar)>,
    pub tail: Tail,
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (l, s)) in self.finite.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}:{s}")?;
        }
        write!(f, "]")?;
        if self.tail != Tail::Zero {
            write!(f, " ++ {}", self.tail)?;
        }
        Ok(())
    }
}

impl FamilySpec {
    pub fn finite(values: impl IntoIterator<Item = Scalar>) -> Self {
        FamilySpec {
            finite: values.into_iter().enumerate().map(|(i, s)| (format!("x{i}"), s)).collect(),
            tail: Tail::Zero,
        }
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    pub fn empty() -> Self {
        FamilySpec { finite: Vec::new(), tail: Tail::Zero }
    }

    pub fn validate(&self, carrier: Carrier) -> Result<(), PcrError> {
        let mut seen = BTreeSet::new();
        for (l, s) in &self.finite {
            carrier.check(s)?;
            if !seen.insert(l.as_str()) {
                return Err(PcrError::DuplicateLabel(l.clone()));
            }
        }
        validate_tail(carrier, &self.tail)
    }

    /// Entry `k` of the tail.
    pub fn tail_entry(&self, carrier: Carrier, k: u32) -> Scalar {
        tail_entry(carrier, &self.tail, k)
    }
}

fn validate_tail(carrier: Carrier, tail: &Tail) -> Result<(), PcrError> {
    let bad = || PcrError::BadTail { carrier, tail: tail.to_string() };
    match tail {
        Tail::Zero => Ok(()),
        Tail::Constant(r) => carrier.check(r),
        Tail::Alternating(r) => {
            carrier.check(r)?;
            if carrier.is_signed() || r.is_zero() {
                Ok(())
            } else {
                Err(bad())
            }
        }
        Tail::Geometric { first, ratio } => {
            carrier.check(first)?;
            if !carrier.is_numeric() || first.as_q().is_none() {
                return Err(bad());
            }
            if ratio.is_negative() && !carrier.is_signed() {
                return Err(bad());
            }
            Ok(())
        }
    }
}

fn tail_entry(carrier: Carrier, tail: &Tail, k: u32) -> Scalar {
    match tail {
        Tail::Zero => carrier.zero(),
        Tail::Constant(r) => r.clone(),
        Tail::Alternating(r) => {
            if k.is_multiple_of(2) {
                r.clone()
            } else {
                carrier.neg(r).expect("signed carrier")
            }
        }
        Tail::Geometric { first, ratio } => {
            let f = first.as_q().expect("numeric");
            carrier.from_q(f * num_traits::pow(ratio.clone(), k as usize)).expect("same sign class")
        }
    }
}

/// Canonical form: trivial tails become `Zero`, degenerate ratios become simpler shapes.
/// Returns an extra finite entry when a geometric tail with ratio 0 is folded into the finite part.
pub fn normalize_tail(carrier: Carrier, tail: &Tail) -> (Option<Scalar>, Tail) {
    match tail {
        Tail::Zero => (None, Tail::Zero),
        Tail::Constant(r) | Tail::Alternating(r) if r.is_zero() => (None, Tail::Zero),
        Tail::Geometric { first, .. } if first.is_zero() => (None, Tail::Zero),
        Tail::Geometric { first, ratio } if ratio.is_zero() => (Some(first.clone()), Tail::Zero),
        Tail::Geometric { first, ratio } if ratio.is_one() => (None, Tail::Constant(first.clone())),
        Tail::Geometric { first, ratio } if (-ratio).is_one() => (None, Tail::Alternating(first.clone())),
        t => {
            let _ = carrier;
            (None, t.clone())
        }
    }
}

/// Closed-form sum of a tail.
pub fn tail_sum(carrier: Carrier, tail: &Tail) -> SumOutcome {
    let (head, t) = normalize_tail(carrier, tail);
    let body = match &t {
        Tail::Zero => Partial::Defined(carrier.zero()),
        Tail::Constant(r) => match carrier {
            Carrier::Bool => Partial::Defined(r.clone()),
            Carrier::ExtendedNonneg => Partial::Defined(Scalar::Ext(None)),
            _ => Partial::undefined("tail: constant nonzero"),
        },
        Tail::Alternating(_) => Partial::undefined("tail: alternating nonzero"),
        Tail::Geometric { first, ratio } => {
            let f = first.as_q().expect("numeric");
            let converges = ratio.abs() < Q::one();
            match carrier {
                Carrier::ExtendedNonneg if !converges => Partial::Defined(Scalar::Ext(None)),
                Carrier::ExtendedNonneg | Carrier::NonnegRational | Carrier::Rational if converges => {
                    Partial::Defined(carrier.from_q(f / (Q::one() - ratio)).expect("sign preserved"))
                }
                _ => Partial::undefined("tail: geometric not summable"),
            }
        }
    };
    match (head, body) {
        (Some(h), Partial::Defined(b)) => match carrier.add(&h, &b) {
            Some(s) => Partial::Defined(s),
            None => Partial::undefined("tail: head"),
        },
        (_, b) => b,
    }
}

/// Partial sum of a finite list, left to right.
pub fn sum_finite<'a>(carrier: Carrier, xs: impl IntoIterator<Item = &'a Scalar>) -> Option<Scalar> {
    let mut acc = carrier.zero();
    for x in xs {
        acc = carrier.add(&acc, x)?;
    }
    Some(acc)
}

/// Σ of a family per the carrier's summability rule.
pub fn try_sum(pcr: &PcrInstance, fam: &FamilySpec) -> Result<SumOutcome, PcrError> {
    fam.validate(pcr.carrier)?;
    Ok(sum_unchecked(pcr.carrier, fam))
}

pub(crate) fn sum_unchecked(carrier: Carrier, fam: &FamilySpec) -> SumOutcome {
    let mut acc = carrier.zero();
    for (l, x) in &fam.finite {
        match carrier.add(&acc, x) {
            Some(s) => acc = s,
            None => return Partial::undefined(l.clone()),
        }
    }
    match tail_sum(carrier, &fam.tail) {
        Partial::Defined(t) => match carrier.add(&acc, &t) {
            Some(s) => Partial::Defined(s),
            None => Partial::undefined("tail"),
        },
        u => u,
    }
}

/// Pointwise |·| of a family of an absolute carrier.
pub fn abs_family(carrier: Carrier, fam: &FamilySpec) -> Result<FamilySpec, PcrError> {
    let pos = carrier.counterpart().ok_or(PcrError::NotAbsolute(carrier))?;
    let mut finite = fam
        .finite
        .iter()
        .map(|(l, s)| Ok((l.clone(), carrier.abs(s)?)))
        .collect::<Result<Vec<_>, PcrError>>()?;
    let (head, tail) = normalize_tail(carrier, &fam.tail);
    if let Some(h) = head {
        finite.push(("~t0".into(), carrier.abs(&h)?));
    }
    let tail = match tail {
        Tail::Zero => Tail::Zero,
        Tail::Constant(r) | Tail::Alternating(r) => Tail::Constant(carrier.abs(&r)?),
        Tail::Geometric { first, ratio } => match pos {
            Carrier::NonnegRational => Tail::Geometric { first: carrier.abs(&first)?, ratio: ratio.abs() },
            _ => Tail::Constant(pos.one()),
        },
    };
    Ok(FamilySpec { finite, tail })
}

/// Scale every entry by `a` (right distributivity in a PCR).
pub fn scale_family(carrier: Carrier, a: &Scalar, fam: &FamilySpec) -> FamilySpec {
    let finite = fam.finite.iter().map(|(l, s)| (l.clone(), carrier.mul(a, s))).collect();
    let tail = match &fam.tail {
        Tail::Zero => Tail::Zero,
        Tail::Constant(r) => Tail::Constant(carrier.mul(a, r)),
        Tail::Alternating(r) => Tail::Alternating(carrier.mul(a, r)),
        Tail::Geometric { first, ratio } => match a {
            Scalar::Ext(None) => Tail::Constant(carrier.mul(a, first)),
            _ => Tail::Geometric { first: carrier.mul(a, first), ratio: ratio.clone() },
        },
    };
    let (head, tail) = normalize_tail(carrier, &tail);
    let mut out = FamilySpec { finite, tail };
    if let Some(h) = head {
        out.finite.push(("~t0".into(), h));
    }
    out
}

/// How the tail indices are split into blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailPartition {
    /// The whole tail is one block, optionally merged into finite block `b`.
    Whole(Option<usize>),
    /// Blocks {t_2k, t_2k+1}.
    Pairs,
    /// Two blocks: even and odd positions.
    Parity,
    /// Each t_k alone.
    Singletons,
}

/// A partition of a family: a block id per finite entry, plus a tail rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub blocks: Vec<usize>,
    pub tail: TailPartition,
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "blocks={:?} tail={:?}", self.blocks, self.tail)
    }
}

/// Inner sums of a partition, assembled into the outer family when all are defined.
pub fn partition_sums(carrier: Carrier, fam: &FamilySpec, part: &PartitionSpec) -> Partial<FamilySpec> {
    let n_blocks = part.blocks.iter().copied().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<&Scalar>> = vec![Vec::new(); n_blocks];
    for ((_, s), b) in fam.finite.iter().zip(&part.blocks) {
        members[*b].push(s);
    }
    let mut outer = Vec::new();
    let mut merged_tail: Option<usize> = None;
    if let TailPartition::Whole(Some(b)) = part.tail {
        if b < n_blocks {
            merged_tail = Some(b);
        }
    }
    for (b, xs) in members.iter().enumerate() {
        let Some(mut s) = sum_finite(carrier, xs.iter().copied()) else {
            return Partial::undefined(format!("block {b}"));
        };
        if merged_tail == Some(b) {
            let Partial::Defined(t) = tail_sum(carrier, &fam.tail) else {
                return Partial::undefined(format!("block {b} tail"));
            };
            match carrier.add(&s, &t) {
                Some(v) => s = v,
                None => return Partial::undefined(format!("block {b}")),
            }
        }
        outer.push((format!("b{b}"), s));
    }
    let (head, tail) = normalize_tail(carrier, &fam.tail);
    let mut outer_tail = Tail::Zero;
    match &part.tail {
        TailPartition::Whole(_) if merged_tail.is_some() => {}
        TailPartition::Whole(_) => {
            let Partial::Defined(t) = tail_sum(carrier, &fam.tail) else {
                return Partial::undefined("tail block");
            };
            outer.push(("bt".into(), t));
        }
        TailPartition::Singletons => {
            if let Some(h) = head {
                outer.push(("t0".into(), h));
            }
            outer_tail = tail;
        }
        TailPartition::Parity => {
            let (even, odd) = parity_split(carrier, &tail);
            let mut e = tail_sum(carrier, &even);
            if let Some(h) = head {
                // ratio-0 geometric: only t_0 is nonzero, and it is even
                e = Partial::Defined(h);
            }
            let (Partial::Defined(e), Partial::Defined(o)) = (e, tail_sum(carrier, &odd)) else {
                return Partial::undefined("parity block");
            };
            outer.push(("be".into(), e));
            outer.push(("bo".into(), o));
        }
        TailPartition::Pairs => {
            if let Some(h) = head {
                outer.push(("p0".into(), h));
            } else {
                match pair_tail(carrier, &tail) {
                    Some(t) => outer_tail = t,
                    None => return Partial::undefined("pair block"),
                }
            }
        }
    }
    let (h2, t2) = normalize_tail(carrier, &outer_tail);
    if let Some(h) = h2 {
        outer.push(("q0".into(), h));
    }
    Partial::Defined(FamilySpec { finite: outer, tail: t2 })
}

fn parity_split(carrier: Carrier, tail: &Tail) -> (Tail, Tail) {
    match tail {
        Tail::Zero => (Tail::Zero, Tail::Zero),
        Tail::Constant(r) => (Tail::Constant(r.clone()), Tail::Constant(r.clone())),
        Tail::Alternating(r) => (Tail::Constant(r.clone()), Tail::Constant(carrier.neg(r).expect("signed"))),
        Tail::Geometric { first, ratio } => {
            let q2 = ratio * ratio;
            let f = first.as_q().expect("numeric");
            let odd_first = carrier.from_q(f * ratio).expect("sign class");
            (
                Tail::Geometric { first: first.clone(), ratio: q2.clone() },
                Tail::Geometric { first: odd_first, ratio: q2 },
            )
        }
    }
}

fn pair_tail(carrier: Carrier, tail: &Tail) -> Option<Tail> {
    Some(match tail {
        Tail::Zero => Tail::Zero,
        Tail::Constant(r) => Tail::Constant(carrier.add(r, r)?),
        Tail::Alternating(_) => Tail::Zero,
        Tail::Geometric { first, ratio } => {
            let f = first.as_q().expect("numeric");
            Tail::Geometric {
                first: carrier.from_q(f * (Q::one() + ratio)).ok()?,
                ratio: ratio * ratio,
            }
        }
    })
}

/// Move t_0 into the finite part: a bijective reindexing of the family.
pub fn unroll_tail(carrier: Carrier, fam: &FamilySpec) -> FamilySpec {
    let mut out = fam.clone();
    let fresh = format!("u{}", fam.finite.len());
    match &fam.tail {
        Tail::Zero => {}
        Tail::Constant(r) => out.finite.push((fresh, r.clone())),
        Tail::Alternating(r) => {
            out.finite.push((fresh, r.clone()));
            out.tail = Tail::Alternating(carrier.neg(r).expect("signed"));
        }
        Tail::Geometric { first, ratio } => {
            out.finite.push((fresh, first.clone()));
            let f = first.as_q().expect("numeric");
            out.tail = Tail::Geometric { first: carrier.from_q(f * ratio).expect("sign class"), ratio: ratio.clone() };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcr::scalar::{q, qi};

    fn rat(s: &str) -> Scalar {
        Carrier::Rational.parse(s).unwrap()
    }

    #[test]
    fn coherence_two_omegas_undefined() {
        let c = Carrier::Coherence;
        let fam = FamilySpec::finite([c.one(), c.one()]);
        assert!(!try_sum(&PcrInstance::new(c), &fam).unwrap().is_defined());
    }

    #[test]
    fn empty_sum_is_zero_everywhere() {
        for c in crate::pcr::ALL_CARRIERS {
            assert_eq!(try_sum(&PcrInstance::new(c), &FamilySpec::empty()).unwrap(), Partial::Defined(c.zero()));
        }
    }

    #[test]
    fn alternating_unit_tail_is_not_summable() {
        let fam = FamilySpec::empty().with_tail(Tail::Alternating(rat("-1")));
        assert!(!try_sum(&PcrInstance::new(Carrier::Rational), &fam).unwrap().is_defined());
    }

    #[test]
    fn opposite_pair_sums_to_zero() {
        let fam = FamilySpec::finite([rat("-1"), rat("1")]);
        assert_eq!(
            try_sum(&PcrInstance::new(Carrier::Rational), &fam).unwrap(),
            Partial::Defined(rat("0"))
        );
    }

    #[test]
    fn geometric_closed_form() {
        let fam = FamilySpec::empty().with_tail(Tail::Geometric { first: rat("1"), ratio: q(-1, 2) });
        assert_eq!(
            try_sum(&PcrInstance::new(Carrier::Rational), &fam).unwrap(),
            Partial::Defined(Scalar::Rational(q(2, 3)))
        );
        let e = Carrier::ExtendedNonneg;
        let fam = FamilySpec::empty().with_tail(Tail::Geometric { first: e.one(), ratio: qi(2) });
        assert_eq!(try_sum(&PcrInstance::new(e), &fam).unwrap(), Partial::Defined(Scalar::Ext(None)));
    }

    #[test]
    fn tails_rejected_where_meaningless() {
        let b = Carrier::Bool;
        let fam = FamilySpec::empty().with_tail(Tail::Alternating(b.one()));
        assert!(try_sum(&PcrInstance::new(b), &fam).is_err());
        let n = Carrier::NonnegRational;
        let fam = FamilySpec::empty().with_tail(Tail::Geometric { first: n.one(), ratio: q(-1, 2) });
        assert!(try_sum(&PcrInstance::new(n), &fam).is_err());
    }

    #[test]
    fn pairing_an_alternating_tail_gives_zeros() {
        let c = Carrier::Rational;
        let fam = FamilySpec::empty().with_tail(Tail::Alternating(rat("-1")));
        let part = PartitionSpec { blocks: vec![], tail: TailPartition::Pairs };
        let outer = partition_sums(c, &fam, &part).defined().unwrap();
        assert_eq!(sum_unchecked(c, &outer), Partial::Defined(c.zero()));
    }

    #[test]
    fn parity_of_geometric_recombines() {
        let c = Carrier::Rational;
        let fam = FamilySpec::finite([rat("1/5")]).with_tail(Tail::Geometric { first: rat("3"), ratio: q(-1, 3) });
        let part = PartitionSpec { blocks: vec![0], tail: TailPartition::Parity };
        let outer = partition_sums(c, &fam, &part).defined().unwrap();
        assert_eq!(sum_unchecked(c, &outer), sum_unchecked(c, &fam));
    }

    #[test]
    fn abs_of_finitary_family() {
        let c = Carrier::FinitaryRational;
        let fam = FamilySpec::finite([c.int(3).unwrap(), c.zero()]);
        let a = abs_family(c, &fam).unwrap();
        assert_eq!(a.finite[0].1, Scalar::FinBool(true));
        assert_eq!(a.finite[1].1, Scalar::FinBool(false));
    }
}
