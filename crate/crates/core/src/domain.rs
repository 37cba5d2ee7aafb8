//! Domain points, labeled examples, predictors and 0-1 losses.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distribution::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::rng::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointId {
    Flat(u64),
    Row { row: u32, col: u32 },
}

/// A point of the (countable) domain. Row points live in `X_n = {n} x [n]`;
/// the optional tag names the distribution a tagged domain copies it for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DomainPoint {
    tag: Option<u32>,
    id: PointId,
}

impl DomainPoint {
    pub fn flat(index: u64) -> Self {
        Self { tag: None, id: PointId::Flat(index) }
    }

    /// Row point `(row, col)` with `1 <= col <= row`.
    pub fn row(row: u32, col: u32) -> Result<Self> {
        if col == 0 || col > row {
            return Err(Error::InvalidPoint(format!("column {col} outside [1, {row}]")));
        }
        Ok(Self { tag: None, id: PointId::Row { row, col } })
    }

    pub fn with_tag(self, tag: u32) -> Self {
        Self { tag: Some(tag), ..self }
    }

    pub fn untagged(self) -> Self {
        Self { tag: None, ..self }
    }

    pub fn tag(&self) -> Option<u32> {
        self.tag
    }

    pub fn id(&self) -> PointId {
        self.id
    }

    pub fn as_flat(&self) -> Option<u64> {
        match self.id {
            PointId::Flat(i) => Some(i),
            PointId::Row { .. } => None,
        }
    }

    pub fn as_row(&self) -> Option<(u32, u32)> {
        match self.id {
            PointId::Row { row, col } => Some((row, col)),
            PointId::Flat(_) => None,
        }
    }
}

impl fmt::Display for DomainPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = self.tag {
            write!(f, "{t}:")?;
        }
        match self.id {
            PointId::Flat(i) => write!(f, "{i}"),
            PointId::Row { row, col } => write!(f, "({row},{col})"),
        }
    }
}

// JSON: `7`, `[row, col]`, or `["tag", inner]`. The tag is a string so a
// tagged flat point never reads as a row pair.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Flat(u64),
    Row(u32, u32),
    Tagged(String, Box<PointRepr>),
}

impl Serialize for DomainPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let inner = match self.id {
            PointId::Flat(i) => PointRepr::Flat(i),
            PointId::Row { row, col } => PointRepr::Row(row, col),
        };
        match self.tag {
            None => inner.serialize(s),
            Some(t) => PointRepr::Tagged(t.to_string(), Box::new(inner)).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for DomainPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        fn plain(r: PointRepr) -> Result<DomainPoint> {
            match r {
                PointRepr::Flat(i) => Ok(DomainPoint::flat(i)),
                PointRepr::Row(row, col) => DomainPoint::row(row, col),
                PointRepr::Tagged(..) => Err(Error::InvalidPoint("nested tag".into())),
            }
        }
        let p = match PointRepr::deserialize(d)? {
            PointRepr::Tagged(t, inner) => {
                let tag: u32 = t.parse().map_err(|_| D::Error::custom(format!("bad tag `{t}`")))?;
                plain(*inner).map(|p| p.with_tag(tag))
            }
            other => plain(other),
        };
        p.map_err(D::Error::custom)
    }
}

mod bit {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(serde::de::Error::custom(format!("label {v} is not 0 or 1"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LabeledExample {
    pub point: DomainPoint,
    #[serde(with = "bit")]
    pub label: bool,
}

impl LabeledExample {
    pub fn new(point: DomainPoint, label: bool) -> Self {
        Self { point, label }
    }
}

/// Ordered sample with duplicates; JSON shape `{"items": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample<T> {
    pub items: Vec<T>,
}

impl<T> Sample<T> {
    pub fn new(items: Vec<T>) -> Self {
        Self { items }
    }
}

/// Strip labels.
pub fn unlabeled(t: &[LabeledExample]) -> Vec<DomainPoint> {
    t.iter().map(|e| e.point).collect()
}

/// Something that assigns a label to domain points (a ground truth).
pub trait Labeling: Send + Sync {
    fn label_of(&self, x: &DomainPoint) -> Result<bool>;

    fn label_sample(&self, xs: &[DomainPoint]) -> Result<Vec<LabeledExample>> {
        xs.iter().map(|x| Ok(LabeledExample::new(*x, self.label_of(x)?))).collect()
    }
}

/// Output of a learner. `prob_one` is the probability of answering 1, so
/// deterministic predictors return 0 or 1 and losses can be taken exactly.
pub trait Predictor: Send + Sync {
    fn prob_one(&self, x: &DomainPoint) -> Result<f64>;

    fn predict(&self, x: &DomainPoint, rng: &mut RandomSource) -> Result<bool> {
        let p = self.prob_one(x)?;
        Ok(if p >= 1.0 {
            true
        } else if p <= 0.0 {
            false
        } else {
            rng.random_bool(p)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstantPredictor(pub bool);

impl Predictor for ConstantPredictor {
    fn prob_one(&self, _: &DomainPoint) -> Result<f64> {
        Ok(f64::from(u8::from(self.0)))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FairCoin;

impl Predictor for FairCoin {
    fn prob_one(&self, _: &DomainPoint) -> Result<f64> {
        Ok(0.5)
    }
}

/// Wrap a partial function as a predictor / labeling.
pub struct FnLabeling<F>(pub F);

impl<F> Labeling for FnLabeling<F>
where
    F: Fn(&DomainPoint) -> Option<bool> + Send + Sync,
{
    fn label_of(&self, x: &DomainPoint) -> Result<bool> {
        (self.0)(x).ok_or(Error::UndefinedPoint(*x))
    }
}

impl<F> Predictor for FnLabeling<F>
where
    F: Fn(&DomainPoint) -> Option<bool> + Send + Sync,
{
    fn prob_one(&self, x: &DomainPoint) -> Result<f64> {
        self.label_of(x).map(|b| f64::from(u8::from(b)))
    }
}

/// Fraction of `t` the predictor gets wrong (expected fraction when randomized).
/// Empty `t` has loss 0.
pub fn loss_sample(predictor: &dyn Predictor, t: &[LabeledExample]) -> Result<f64> {
    if t.is_empty() {
        return Ok(0.0);
    }
    let mut wrong = 0.0;
    for e in t {
        wrong += miss(predictor.prob_one(&e.point)?, e.label);
    }
    Ok(wrong / t.len() as f64)
}

/// Number of disagreements of a deterministic predictor on `t`.
pub fn mistakes(predictor: &dyn Predictor, t: &[LabeledExample]) -> Result<usize> {
    let mut n = 0;
    for e in t {
        if (predictor.prob_one(&e.point)? >= 0.5) != e.label {
            n += 1;
        }
    }
    Ok(n)
}

/// `sum_x D[x] * P[predictor(x) != truth(x)]`, exact.
pub fn loss_distribution(
    predictor: &dyn Predictor,
    d: &DiscreteDistribution,
    truth: &dyn Labeling,
) -> Result<f64> {
    let mut acc = 0.0;
    for &(x, w) in d.support() {
        acc += w * miss(predictor.prob_one(&x)?, truth.label_of(&x)?);
    }
    Ok(acc.clamp(0.0, 1.0))
}

#[inline]
fn miss(p_one: f64, y: bool) -> f64 {
    if y {
        1.0 - p_one
    } else {
        p_one
    }
}
