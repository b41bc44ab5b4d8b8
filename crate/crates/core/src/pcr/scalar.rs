use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::PcrError;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// The built-in carriers. Each absolute carrier names its positive counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Carrier {
    /// Complete boolean rig, 1 + 1 = 1.
    Bool,
    /// Boolean rig where only finite-support families are summable.
    FinitaryBool,
    /// {0, ω} with ω + ω undefined and ω the unit.
    Coherence,
    /// Nonnegative rationals with ∞, every family summable.
    ExtendedNonneg,
    /// Nonnegative rationals, convergent families summable.
    NonnegRational,
    /// Rationals, finite-support families summable.
    FinitaryRational,
    /// Rationals, absolutely convergent families summable.
    Rational,
}

pub const ALL_CARRIERS: [Carrier; 7] = [
    Carrier::Bool,
    Carrier::FinitaryBool,
    Carrier::Coherence,
    Carrier::ExtendedNonneg,
    Carrier::NonnegRational,
    Carrier::FinitaryRational,
    Carrier::Rational,
];

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Bool(bool),
    FinBool(bool),
    /// `true` is ω.
    Coh(bool),
    /// `None` is ∞.
    Ext(Option<Q>),
    Nonneg(Q),
    Finitary(Q),
    Rational(Q),
}

impl Carrier {
    pub fn tag(self) -> &'static str {
        match self {
            Carrier::Bool => "bool",
            Carrier::FinitaryBool => "finitary-bool",
            Carrier::Coherence => "coherence",
            Carrier::ExtendedNonneg => "extended-nonneg",
            Carrier::NonnegRational => "nonneg-rational",
            Carrier::FinitaryRational => "finitary-rational",
            Carrier::Rational => "rational",
        }
    }

    pub fn from_tag(s: &str) -> Result<Carrier, PcrError> {
        ALL_CARRIERS
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| PcrError::UnknownCarrier(s.to_string()))
    }

    pub fn zero(self) -> Scalar {
        match self {
            Carrier::Bool => Scalar::Bool(false),
            Carrier::FinitaryBool => Scalar::FinBool(false),
            Carrier::Coherence => Scalar::Coh(false),
            Carrier::ExtendedNonneg => Scalar::Ext(Some(Q::zero())),
            Carrier::NonnegRational => Scalar::Nonneg(Q::zero()),
            Carrier::FinitaryRational => Scalar::Finitary(Q::zero()),
            Carrier::Rational => Scalar::Rational(Q::zero()),
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            Carrier::Bool => Scalar::Bool(true),
            Carrier::FinitaryBool => Scalar::FinBool(true),
            Carrier::Coherence => Scalar::Coh(true),
            Carrier::ExtendedNonneg => Scalar::Ext(Some(Q::one())),
            Carrier::NonnegRational => Scalar::Nonneg(Q::one()),
            Carrier::FinitaryRational => Scalar::Finitary(Q::one()),
            Carrier::Rational => Scalar::Rational(Q::one()),
        }
    }

    /// Signed carriers admit negative values.
    pub fn is_signed(self) -> bool {
        matches!(self, Carrier::FinitaryRational | Carrier::Rational)
    }

    /// Every family is summable.
    pub fn is_complete(self) -> bool {
        matches!(self, Carrier::Bool | Carrier::ExtendedNonneg)
    }

    /// Partition associativity holds in both directions.
    pub fn is_strong(self) -> bool {
        !self.is_signed()
    }

    /// Values are rationals (possibly with ∞), so geometric tails make sense.
    pub fn is_numeric(self) -> bool {
        matches!(
            self,
            Carrier::ExtendedNonneg | Carrier::NonnegRational | Carrier::FinitaryRational | Carrier::Rational
        )
    }

    /// Only finite-support families are summable.
    pub fn is_finitary(self) -> bool {
        matches!(self, Carrier::FinitaryBool | Carrier::FinitaryRational)
    }

    /// The strong positive carrier receiving |·|, for absolute carriers.
    pub fn counterpart(self) -> Option<Carrier> {
        match self {
            Carrier::FinitaryRational => Some(Carrier::FinitaryBool),
            Carrier::Rational => Some(Carrier::NonnegRational),
            _ => None,
        }
    }

    /// The two-valued carriers, enumerable exhaustively.
    pub fn finite_values(self) -> Option<Vec<Scalar>> {
        match self {
            Carrier::Bool | Carrier::FinitaryBool | Carrier::Coherence => Some(vec![self.zero(), self.one()]),
            _ => None,
        }
    }

    pub fn from_q(self, v: Q) -> Result<Scalar, PcrError> {
        let neg = v.is_negative();
        let out = match self {
            Carrier::ExtendedNonneg if !neg => Scalar::Ext(Some(v)),
            Carrier::NonnegRational if !neg => Scalar::Nonneg(v),
            Carrier::FinitaryRational => Scalar::Finitary(v),
            Carrier::Rational => Scalar::Rational(v),
            Carrier::Bool | Carrier::FinitaryBool | Carrier::Coherence if v.is_zero() => self.zero(),
            Carrier::Bool | Carrier::FinitaryBool | Carrier::Coherence if v.is_one() => self.one(),
            _ => {
                return Err(PcrError::BadLiteral { carrier: self, literal: v.to_string() });
            }
        };
        Ok(out)
    }

    pub fn int(self, n: i64) -> Result<Scalar, PcrError> {
        self.from_q(qi(n))
    }

    /// Parse a literal: `0`, `1`, `w`, `inf`, or a signed `p/q`.
    pub fn parse(self, lit: &str) -> Result<Scalar, PcrError> {
        let bad = || PcrError::BadLiteral { carrier: self, literal: lit.to_string() };
        let t = lit.trim();
        match (self, t) {
            (Carrier::Coherence, "w") => Ok(self.one()),
            (Carrier::ExtendedNonneg, "inf") => Ok(Scalar::Ext(None)),
            (_, "w") | (_, "inf") => Err(bad()),
            _ => {
                let v = Q::from_str(t).map_err(|_| bad())?;
                self.from_q(v).map_err(|_| bad())
            }
        }
    }

    pub fn check(self, s: &Scalar) -> Result<(), PcrError> {
        if s.carrier() == self {
            Ok(())
        } else {
            Err(PcrError::CarrierMismatch { expected: self, found: s.carrier() })
        }
    }

    /// Partial binary sum. Finite sums in the built-in carriers fail only for ω + ω.
    pub fn add(self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        use Scalar::*;
        Some(match (a, b) {
            (Bool(x), Bool(y)) => Bool(*x || *y),
            (FinBool(x), FinBool(y)) => FinBool(*x || *y),
            (Coh(x), Coh(y)) => {
                if *x && *y {
                    return None;
                }
                Coh(*x || *y)
            }
            (Ext(x), Ext(y)) => Ext(match (x, y) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            }),
            (Nonneg(x), Nonneg(y)) => Nonneg(x + y),
            (Finitary(x), Finitary(y)) => Finitary(x + y),
            (Rational(x), Rational(y)) => Rational(x + y),
            _ => panic!("carrier mismatch in add: {a:?} + {b:?}"),
        })
    }

    /// Total multiplication; ∞·0 = 0 and ω·ω = ω.
    pub fn mul(self, a: &Scalar, b: &Scalar) -> Scalar {
        use Scalar::*;
        match (a, b) {
            (Bool(x), Bool(y)) => Bool(*x && *y),
            (FinBool(x), FinBool(y)) => FinBool(*x && *y),
            (Coh(x), Coh(y)) => Coh(*x && *y),
            (Ext(x), Ext(y)) => {
                if a.is_zero() || b.is_zero() {
                    return self.zero();
                }
                Ext(match (x, y) {
                    (Some(x), Some(y)) => Some(x * y),
                    _ => None,
                })
            }
            (Nonneg(x), Nonneg(y)) => Nonneg(x * y),
            (Finitary(x), Finitary(y)) => Finitary(x * y),
            (Rational(x), Rational(y)) => Rational(x * y),
            _ => panic!("carrier mismatch in mul: {a:?} * {b:?}"),
        }
    }

    /// Sum of `n` copies of `s`.
    pub fn times_nat(self, s: &Scalar, n: u64) -> Option<Scalar> {
        if n == 0 || s.is_zero() {
            return Some(self.zero());
        }
        match s {
            Scalar::Coh(_) => (n == 1).then(|| s.clone()),
            Scalar::Bool(_) | Scalar::FinBool(_) => Some(s.clone()),
            _ => {
                let k = self.from_q(Q::from_integer(BigInt::from(n))).expect("numeric carrier");
                Some(self.mul(&k, s))
            }
        }
    }

    /// The sum of `n` copies of 1.
    pub fn nat_embed(self, n: u64) -> Option<Scalar> {
        self.times_nat(&self.one(), n)
    }

    pub fn neg(self, s: &Scalar) -> Option<Scalar> {
        match s {
            Scalar::Finitary(x) => Some(Scalar::Finitary(-x)),
            Scalar::Rational(x) => Some(Scalar::Rational(-x)),
            _ if s.is_zero() => Some(s.clone()),
            _ => None,
        }
    }

    pub fn is_invertible(self, s: &Scalar) -> bool {
        match s {
            Scalar::Ext(None) => false,
            _ => !s.is_zero(),
        }
    }

    pub fn inverse(self, s: &Scalar) -> Result<Scalar, PcrError> {
        if !self.is_invertible(s) {
            return Err(PcrError::NotInvertible(s.to_string()));
        }
        Ok(match s {
            Scalar::Ext(Some(x)) => Scalar::Ext(Some(x.recip())),
            Scalar::Nonneg(x) => Scalar::Nonneg(x.recip()),
            Scalar::Finitary(x) => Scalar::Finitary(x.recip()),
            Scalar::Rational(x) => Scalar::Rational(x.recip()),
            other => other.clone(),
        })
    }

    /// |·| into the positive counterpart.
    pub fn abs(self, s: &Scalar) -> Result<Scalar, PcrError> {
        match s {
            Scalar::Finitary(x) => Ok(Scalar::FinBool(!x.is_zero())),
            Scalar::Rational(x) => Ok(Scalar::Nonneg(x.abs())),
            _ => Err(PcrError::NotAbsolute(self)),
        }
    }

    /// Canonical preorder: a ≤ b iff a + z = b for some z.
    pub fn leq(self, a: &Scalar, b: &Scalar) -> bool {
        use Scalar::*;
        match (a, b) {
            (Bool(x), Bool(y)) | (FinBool(x), FinBool(y)) | (Coh(x), Coh(y)) => !*x || *y,
            (Ext(_), Ext(None)) => true,
            (Ext(None), Ext(Some(_))) => false,
            (Ext(Some(x)), Ext(Some(y))) | (Nonneg(x), Nonneg(y)) => x <= y,
            (Finitary(_), Finitary(_)) | (Rational(_), Rational(_)) => true,
            _ => false,
        }
    }
}

impl Scalar {
    pub fn carrier(&self) -> Carrier {
        match self {
            Scalar::Bool(_) => Carrier::Bool,
            Scalar::FinBool(_) => Carrier::FinitaryBool,
            Scalar::Coh(_) => Carrier::Coherence,
            Scalar::Ext(_) => Carrier::ExtendedNonneg,
            Scalar::Nonneg(_) => Carrier::NonnegRational,
            Scalar::Finitary(_) => Carrier::FinitaryRational,
            Scalar::Rational(_) => Carrier::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Bool(b) | Scalar::FinBool(b) | Scalar::Coh(b) => !b,
            Scalar::Ext(Some(x)) | Scalar::Nonneg(x) | Scalar::Finitary(x) | Scalar::Rational(x) => x.is_zero(),
            Scalar::Ext(None) => false,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.carrier().one()
    }

    /// The rational value, when the scalar has one.
    pub fn as_q(&self) -> Option<&Q> {
        match self {
            Scalar::Ext(Some(x)) | Scalar::Nonneg(x) | Scalar::Finitary(x) | Scalar::Rational(x) => Some(x),
            _ => None,
        }
    }

    pub fn add(&self, other: &Scalar) -> Option<Scalar> {
        self.carrier().add(self, other)
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.carrier().mul(self, other)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Bool(b) | Scalar::FinBool(b) => write!(f, "{}", u8::from(*b)),
            Scalar::Coh(true) => write!(f, "w"),
            Scalar::Coh(false) => write!(f, "0"),
            Scalar::Ext(None) => write!(f, "inf"),
            Scalar::Ext(Some(x)) | Scalar::Nonneg(x) | Scalar::Finitary(x) | Scalar::Rational(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format!("{}:{}", self.carrier().tag(), self))
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        let (tag, lit) = s.split_once(':').ok_or_else(|| serde::de::Error::custom("expected carrier:literal"))?;
        let c = Carrier::from_tag(tag).map_err(serde::de::Error::custom)?;
        c.parse(lit).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing rationals as `p/q` strings.
pub mod q_str {
    use super::Q;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &Q, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Q, D::Error> {
        let s = String::deserialize(de)?;
        Q::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// The ball B of an instance: the subset of scalars an orthogonal pairing may land in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ball {
    All,
    UnitInterval,
}

impl Ball {
    pub fn contains(self, s: &Scalar) -> bool {
        match self {
            Ball::All => true,
            Ball::UnitInterval => match s {
                Scalar::Ext(None) => false,
                _ => s.as_q().is_none_or(|x| !x.is_negative() && *x <= Q::one()),
            },
        }
    }
}

/// Descriptor for a partial commutative rig.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PcrInstance {
    pub carrier: Carrier,
    /// Claimed partition associativity; the suite checks the claim.
    pub strong: bool,
    pub ball: Ball,
}

impl PcrInstance {
    pub fn new(carrier: Carrier) -> Self {
        PcrInstance { carrier, strong: carrier.is_strong(), ball: Ball::All }
    }

    pub fn with_ball(carrier: Carrier, ball: Ball) -> Self {
        PcrInstance { ball, ..PcrInstance::new(carrier) }
    }

    pub fn is_absolute(&self) -> bool {
        self.carrier.counterpart().is_some()
    }

    pub fn counterpart(&self) -> Option<PcrInstance> {
        self.carrier.counterpart().map(PcrInstance::new)
    }

    pub fn in_ball(&self, s: &Scalar) -> bool {
        self.ball.contains(s)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, PcrError> {
        self.carrier.check(a)?;
        self.carrier.check(b)?;
        Ok(self.carrier.mul(a, b))
    }

    pub fn is_invertible(&self, a: &Scalar) -> bool {
        self.carrier.is_invertible(a)
    }

    pub fn inverse(&self, a: &Scalar) -> Result<Scalar, PcrError> {
        self.carrier.check(a)?;
        self.carrier.inverse(a)
    }

    pub fn abs_val(&self, a: &Scalar) -> Result<Scalar, PcrError> {
        self.carrier.check(a)?;
        self.carrier.abs(a)
    }

    pub fn leq(&self, a: &Scalar, b: &Scalar) -> Result<bool, PcrError> {
        self.carrier.check(a)?;
        self.carrier.check(b)?;
        Ok(self.carrier.leq(a, b))
    }

    pub fn nat_embed(&self, n: u64) -> Option<Scalar> {
        self.carrier.nat_embed(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_is_its_own_unit_and_inverse() {
        let c = Carrier::Coherence;
        let w = c.parse("w").unwrap();
        assert_eq!(c.mul(&w, &w), w);
        assert!(c.is_invertible(&w));
        assert_eq!(c.inverse(&w).unwrap(), w);
        assert_eq!(c.add(&w, &w), None);
    }

    #[test]
    fn rational_product() {
        let c = Carrier::Rational;
        let a = c.parse("-1/2").unwrap();
        let b = c.parse("2/3").unwrap();
        assert_eq!(c.mul(&a, &b), c.parse("-1/3").unwrap());
    }

    #[test]
    fn infinity_absorbed_by_zero() {
        let c = Carrier::ExtendedNonneg;
        let inf = c.parse("inf").unwrap();
        assert_eq!(c.mul(&inf, &c.zero()), c.zero());
        assert_eq!(c.mul(&c.zero(), &inf), c.zero());
        assert_eq!(c.mul(&inf, &c.one()), inf);
    }

    #[test]
    fn invertibility() {
        let c = Carrier::NonnegRational;
        let h = c.parse("1/2").unwrap();
        assert_eq!(c.inverse(&h).unwrap(), c.int(2).unwrap());
        for c in ALL_CARRIERS {
            assert!(!c.is_invertible(&c.zero()));
            assert!(c.inverse(&c.zero()).is_err());
        }
        assert!(!Carrier::ExtendedNonneg.is_invertible(&Scalar::Ext(None)));
    }

    #[test]
    fn absolute_values() {
        let r = Carrier::Rational;
        assert_eq!(r.abs(&r.parse("-3/4").unwrap()).unwrap(), Scalar::Nonneg(q(3, 4)));
        assert_eq!(r.abs(&r.zero()).unwrap(), Scalar::Nonneg(qi(0)));
        let f = Carrier::FinitaryRational;
        assert_eq!(f.abs(&f.int(5).unwrap()).unwrap(), Scalar::FinBool(true));
        assert!(Carrier::Bool.abs(&Carrier::Bool.one()).is_err());
    }

    #[test]
    fn preorders() {
        let n = Carrier::NonnegRational;
        assert!(n.leq(&n.parse("1/3").unwrap(), &n.parse("1/2").unwrap()));
        let c = Carrier::Coherence;
        assert!(!c.leq(&c.one(), &c.zero()));
        assert!(c.leq(&c.zero(), &c.one()));
        let r = Carrier::Rational;
        assert!(r.leq(&r.int(5).unwrap(), &r.int(-1).unwrap()));
        let e = Carrier::ExtendedNonneg;
        assert!(e.leq(&e.int(7).unwrap(), &Scalar::Ext(None)));
    }

    #[test]
    fn nat_embedding() {
        assert_eq!(Carrier::Rational.nat_embed(3), Some(Carrier::Rational.int(3).unwrap()));
        assert_eq!(Carrier::Coherence.nat_embed(2), None);
        assert_eq!(Carrier::Coherence.nat_embed(1), Some(Carrier::Coherence.one()));
        for c in ALL_CARRIERS {
            assert_eq!(c.nat_embed(0), Some(c.zero()));
        }
        assert_eq!(Carrier::Bool.nat_embed(5), Some(Carrier::Bool.one()));
    }

    #[test]
    fn literals_round_trip() {
        for (c, lit) in [
            (Carrier::Coherence, "w"),
            (Carrier::ExtendedNonneg, "inf"),
            (Carrier::Rational, "-7/3"),
            (Carrier::Bool, "1"),
            (Carrier::NonnegRational, "0"),
        ] {
            let s = c.parse(lit).unwrap();
            assert_eq!(s.to_string(), lit);
            assert_eq!(c.parse(&s.to_string()).unwrap(), s);
        }
        assert!(Carrier::NonnegRational.parse("-1").is_err());
        assert!(Carrier::Bool.parse("w").is_err());
        assert!(Carrier::Coherence.parse("2").is_err());
    }

    #[test]
    fn unit_ball() {
        let b = Ball::UnitInterval;
        assert!(b.contains(&Scalar::Nonneg(q(1, 2))));
        assert!(!b.contains(&Scalar::Nonneg(q(3, 2))));
        assert!(!b.contains(&Scalar::Ext(None)));
    }
}
