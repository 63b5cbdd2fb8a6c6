//! Fixed point data: canonical equivalence classes, the five dimension-6
//! rewrite operations, and the exact-arithmetic realizability validators.
//!
//! A fixed point of a torus action on a `2n`-manifold carries a sign
//! `ε ∈ {±1}` and a multiset of `n` nonzero weights in `Z^k`, considered up
//! to simultaneously flipping the sign of the point and the sign of any one
//! weight. [`FixedPointDatum`] stores the canonical representative of that
//! class (every weight with positive leading coordinate, sign adjusted by the
//! parity of flips), so class equality is plain structural equality.
//!
//! The validators ([`verify_abbv`], [`verify_signature`],
//! [`verify_min_weight_balance`], [`verify_sign_balance`]) are necessary
//! conditions for a collection of data to come from an actual action; all of
//! them are computed exactly. [`screen`] bundles the four into a report.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{
    canonical_weight, constancy_sample_points, eval_signature_sum, generic_covector, int,
    AlgebraError, Int, Rational, Sign, WeightVec,
};
use num::{One, Signed, Zero};

/// Errors from the fixed-point-data layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FpError {
    /// An underlying arithmetic error (zero weight, rank mismatch, …).
    Algebra(AlgebraError),
    /// A point had the wrong number of weights for the collection.
    PointArity { expected: usize, got: usize },
    /// A weight had the wrong number of coordinates for the collection.
    PointRank { expected: usize, got: usize },
    /// The operation is only defined for circle actions on 6-manifolds.
    UnsupportedShape { k: usize, n: usize },
    /// A rewrite move's parameters violate the operation's side conditions.
    SideCondition(&'static str),
    /// A rewrite move's removed/added lists do not match its schema.
    SchemaMismatch(&'static str),
    /// A rewrite move tried to remove a datum the collection does not have.
    MissingRemoved(String),
}

impl fmt::Display for FpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FpError::Algebra(e) => write!(f, "{e}"),
            FpError::PointArity { expected, got } => {
                write!(f, "expected {expected} weights per point, got {got}")
            }
            FpError::PointRank { expected, got } => {
                write!(f, "expected weights with {expected} coordinates, got {got}")
            }
            FpError::UnsupportedShape { k, n } => {
                write!(f, "operation requires k=1, n=3; collection has k={k}, n={n}")
            }
            FpError::SideCondition(msg) => write!(f, "side condition violated: {msg}"),
            FpError::SchemaMismatch(msg) => write!(f, "move does not match its schema: {msg}"),
            FpError::MissingRemoved(d) => {
                write!(f, "collection does not contain the datum to remove: {d}")
            }
        }
    }
}

impl std::error::Error for FpError {}

impl From<AlgebraError> for FpError {
    fn from(e: AlgebraError) -> Self {
        FpError::Algebra(e)
    }
}

/// The canonical fixed point datum `[ε, w_1, …, w_n]`.
///
/// Two raw data are equivalent when one arises from the other by flipping the
/// sign of the point together with the sign of one weight (repeatedly). The
/// stored representative has every weight canonical (first nonzero coordinate
/// positive) and the weights sorted, so `==` decides class equality.
///
/// Ordering compares the sorted weight lists lexicographically and breaks
/// ties by sign (`+` before `−`); collections keep their points in this
/// order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedPointDatum {
    weights: Vec<WeightVec>,
    sign: Sign,
}

impl FixedPointDatum {
    /// The sign `ε` of the canonical representative.
    #[inline]
    #[must_use]
    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// The canonical weights, sorted ascending.
    #[inline]
    #[must_use]
    pub fn weights(&self) -> &[WeightVec] {
        &self.weights
    }

    /// Number of weights (the half-dimension `n`).
    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// Torus rank of the weights.
    #[inline]
    #[must_use]
    pub fn k(&self) -> usize {
        self.weights[0].k()
    }
}

impl fmt::Display for FixedPointDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.sign)?;
        for w in &self.weights {
            write!(f, ",{w}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for FixedPointDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// In documents a datum is `{"sign": ±1, "weights": [[…], …]}`; weights may be
// written non-canonically and are canonicalized on load.
#[derive(Serialize, Deserialize)]
struct DatumRepr {
    sign: Sign,
    weights: Vec<WeightVec>,
}

impl Serialize for FixedPointDatum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DatumRepr {
            sign: self.sign,
            weights: self.weights.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FixedPointDatum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = DatumRepr::deserialize(d)?;
        make_datum(repr.sign, repr.weights).map_err(serde::de::Error::custom)
    }
}

/// Build the canonical datum for `(sign, raw_weights)`.
///
/// Every weight with a negative leading coordinate is flipped, the sign is
/// adjusted by the parity of flips, and the weights are sorted. Flipping any
/// raw weight together with the input sign therefore yields the same value.
///
/// # Examples
/// ```
/// use equigraph::algebra::{Sign, WeightVec};
/// use equigraph::fpdata::make_datum;
///
/// let w = |v: i64| WeightVec::scalar(v);
/// let a = make_datum(Sign::Plus, vec![w(1), w(2), w(-3)]).unwrap();
/// let b = make_datum(Sign::Minus, vec![w(1), w(2), w(3)]).unwrap();
/// assert_eq!(a, b); // (+,{1,2,−3}) and (−,{1,2,3}) are the same class
/// ```
pub fn make_datum(sign: Sign, raw_weights: Vec<WeightVec>) -> Result<FixedPointDatum, FpError> {
    if raw_weights.is_empty() {
        return Err(FpError::PointArity {
            expected: 1,
            got: 0,
        });
    }
    let k = raw_weights[0].k();
    let mut sign = sign;
    let mut weights = Vec::with_capacity(raw_weights.len());
    for w in &raw_weights {
        if w.k() != k {
            return Err(FpError::PointRank {
                expected: k,
                got: w.k(),
            });
        }
        let (cw, flipped) = canonical_weight(w);
        if flipped {
            sign = sign.flip();
        }
        weights.push(cw);
    }
    weights.sort();
    Ok(FixedPointDatum { weights, sign })
}

/// The datum of the orientation-reversed fixed point: same weights, opposite
/// sign. An involution.
#[must_use]
pub fn negate_datum(d: &FixedPointDatum) -> FixedPointDatum {
    FixedPointDatum {
        weights: d.weights.clone(),
        sign: d.sign.flip(),
    }
}

/// A multiset of fixed point data with uniform rank `k` and arity `n`.
///
/// Duplicates are significant: several standard models have repeated data.
/// Points are kept sorted, so `==` is multiset equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FixedPointCollection {
    k: usize,
    n: usize,
    points: Vec<FixedPointDatum>,
}

impl FixedPointCollection {
    /// Build a collection, checking that every point has `n` weights of rank
    /// `k`.
    pub fn new(
        k: usize,
        n: usize,
        mut points: Vec<FixedPointDatum>,
    ) -> Result<FixedPointCollection, FpError> {
        if k == 0 || n == 0 {
            return Err(FpError::UnsupportedShape { k, n });
        }
        for p in &points {
            if p.n() != n {
                return Err(FpError::PointArity {
                    expected: n,
                    got: p.n(),
                });
            }
            if p.k() != k {
                return Err(FpError::PointRank {
                    expected: k,
                    got: p.k(),
                });
            }
        }
        points.sort();
        Ok(FixedPointCollection { k, n, points })
    }

    /// Convenience constructor from raw `(sign, weights)` pairs.
    pub fn from_raw(
        k: usize,
        n: usize,
        raw: Vec<(Sign, Vec<WeightVec>)>,
    ) -> Result<FixedPointCollection, FpError> {
        let points = raw
            .into_iter()
            .map(|(s, ws)| make_datum(s, ws))
            .collect::<Result<Vec<_>, _>>()?;
        FixedPointCollection::new(k, n, points)
    }

    /// Torus rank.
    #[inline]
    #[must_use]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Half-dimension (weights per point).
    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// The points, sorted canonically.
    #[inline]
    #[must_use]
    pub fn points(&self) -> &[FixedPointDatum] {
        &self.points
    }

    #[inline]
    #[must_use]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The collection with every sign flipped (orientation reversal).
    #[must_use]
    pub fn negated(&self) -> FixedPointCollection {
        FixedPointCollection {
            k: self.k,
            n: self.n,
            points: self.points.iter().map(negate_datum).collect(),
        }
    }

    /// Remove one occurrence of each datum in `removed` and insert everything
    /// in `added`, keeping the sorted-multiset invariant.
    pub fn replace(
        &self,
        removed: &[FixedPointDatum],
        added: &[FixedPointDatum],
    ) -> Result<FixedPointCollection, FpError> {
        let mut points = self.points.clone();
        for d in removed {
            match points.iter().position(|p| p == d) {
                Some(i) => {
                    points.remove(i);
                }
                None => return Err(FpError::MissingRemoved(d.to_string())),
            }
        }
        points.extend(added.iter().cloned());
        FixedPointCollection::new(self.k, self.n, points)
    }

    /// Multiplicity of a datum in the collection.
    #[must_use]
    pub fn count(&self, d: &FixedPointDatum) -> usize {
        self.points.iter().filter(|p| *p == d).count()
    }
}

impl fmt::Display for FixedPointCollection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for FixedPointCollection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, n={}) {self}", self.k, self.n)
    }
}

#[derive(Serialize, Deserialize)]
struct CollectionRepr {
    k: usize,
    n: usize,
    points: Vec<FixedPointDatum>,
}

impl Serialize for FixedPointCollection {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CollectionRepr {
            k: self.k,
            n: self.n,
            points: self.points.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FixedPointCollection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = CollectionRepr::deserialize(d)?;
        FixedPointCollection::new(repr.k, repr.n, repr.points).map_err(serde::de::Error::custom)
    }
}

/// One of the five rewrite operations on circle 6-manifold data.
///
/// `removed` and `added` are the canonical data prescribed by the operation's
/// schema for the given parameters and orientation; [`T62Move::new`] fills
/// them in, and [`apply_t62`] re-checks them, so hand-built moves cannot
/// smuggle in an off-schema rewrite.
#[derive(Clone, PartialEq, Eq)]
pub struct T62Move {
    pub op_id: u8,
    /// The global `±` of the schema: `Plus` reads the top signs.
    pub orientation: Sign,
    pub a: WeightVec,
    /// Present exactly for operations 1–3.
    pub b: Option<WeightVec>,
    pub c: WeightVec,
    pub removed: Vec<FixedPointDatum>,
    pub added: Vec<FixedPointDatum>,
}

impl fmt::Debug for T62Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "op{}({}; A={}",
            self.op_id, self.orientation, self.a
        )?;
        if let Some(b) = &self.b {
            write!(f, ", B={b}")?;
        }
        write!(f, ", C={})", self.c)
    }
}

impl T62Move {
    /// Build a move from its identifier, orientation and parameters,
    /// deriving the removed/added data from the operation's schema.
    ///
    /// Parameters are scalar (`k = 1`) positive weights. Side conditions:
    /// op 2 needs `0 < A < B < C`; op 3 needs `0 < A, B < C` and `A ≠ B`;
    /// ops 4 and 5 need `0 < A < C` and `C ≠ 2A` (otherwise a produced
    /// weight would vanish).
    pub fn new(
        op_id: u8,
        orientation: Sign,
        a: &WeightVec,
        b: Option<&WeightVec>,
        c: &WeightVec,
    ) -> Result<T62Move, FpError> {
        for w in [Some(a), b, Some(c)].into_iter().flatten() {
            if w.k() != 1 {
                return Err(FpError::PointRank {
                    expected: 1,
                    got: w.k(),
                });
            }
            if !w.as_scalar().is_positive() {
                return Err(FpError::SideCondition("parameters must be positive"));
            }
        }
        let needs_b = matches!(op_id, 1..=3);
        if needs_b != b.is_some() {
            return Err(FpError::SchemaMismatch(
                "parameter B is present exactly for operations 1-3",
            ));
        }

        let av = a.as_scalar().clone();
        let cv = c.as_scalar().clone();
        let bv = b.map(|b| b.as_scalar().clone());
        let s = orientation;
        // Schema entries may be negative (e.g. A−B); make_datum canonicalizes
        // them, flipping the datum sign as required.
        let datum = |sign: Sign, xs: [Int; 3]| -> Result<FixedPointDatum, FpError> {
            let ws = xs
                .into_iter()
                .map(WeightVec::new_scalar)
                .collect::<Result<Vec<_>, _>>()?;
            make_datum(sign, ws)
        };

        let (removed, added) = match op_id {
            1 => {
                let bv = bv.unwrap();
                let removed = vec![
                    datum(Sign::Plus, [av.clone(), bv.clone(), cv.clone()])?,
                    datum(Sign::Minus, [av, bv, cv])?,
                ];
                (removed, vec![])
            }
            2 => {
                let bv = bv.unwrap();
                if !(av < bv && bv < cv) {
                    return Err(FpError::SideCondition("operation 2 requires 0 < A < B < C"));
                }
                let removed = vec![
                    datum(s, [av.clone(), bv.clone(), cv.clone()])?,
                    datum(s.flip(), [&cv - &av, &cv - &bv, cv.clone()])?,
                ];
                let added = vec![
                    datum(s, [av.clone(), &bv - &av, &cv - &av])?,
                    datum(s.flip(), [bv.clone(), &bv - &av, &cv - &bv])?,
                ];
                (removed, added)
            }
            3 => {
                let bv = bv.unwrap();
                if !(av < cv && bv < cv) {
                    return Err(FpError::SideCondition("operation 3 requires 0 < A, B < C"));
                }
                if av == bv {
                    return Err(FpError::SideCondition("operation 3 requires A ≠ B"));
                }
                let removed = vec![
                    datum(s, [av.clone(), bv.clone(), cv.clone()])?,
                    datum(s, [av.clone(), &cv - &bv, cv.clone()])?,
                ];
                let added = vec![
                    datum(s, [&cv - &bv, &cv - &av, av.clone()])?,
                    datum(s, [&cv - &bv, bv.clone(), av.clone()])?,
                    datum(s, [&cv - &bv, &av - &bv, av.clone()])?,
                    datum(s.flip(), [&cv - &av, &av - &bv, av.clone()])?,
                ];
                (removed, added)
            }
            4 => {
                check_a_c(&av, &cv)?;
                let removed = vec![
                    datum(s, [av.clone(), av.clone(), cv.clone()])?,
                    datum(s, [av.clone(), &cv - &av, cv.clone()])?,
                ];
                let added = half_exchange_added(s, &av, &cv)?;
                (removed, added)
            }
            5 => {
                check_a_c(&av, &cv)?;
                let removed = vec![
                    datum(s, [cv.clone(), av.clone(), av.clone()])?,
                    datum(s.flip(), [cv.clone(), &cv - &av, &cv - &av])?,
                ];
                let mut added = half_exchange_added(s, &av, &cv)?;
                added.extend([
                    datum(s, [av.clone(), &cv - (&av + &av), &cv - &av])?,
                    datum(s.flip(), [av.clone(), &cv - &av, &cv - &av])?,
                    datum(s.flip(), [av.clone(), &cv - &av, &cv - &av])?,
                    datum(s.flip(), [&cv - (&av + &av), &cv - &av, &cv - &av])?,
                ]);
                (removed, added)
            }
            _ => return Err(FpError::SchemaMismatch("op_id must be in 1..=5")),
        };

        Ok(T62Move {
            op_id,
            orientation,
            a: a.clone(),
            b: b.cloned(),
            c: c.clone(),
            removed,
            added,
        })
    }
}

fn check_a_c(av: &Int, cv: &Int) -> Result<(), FpError> {
    if !(av < cv) {
        return Err(FpError::SideCondition("operation requires 0 < A < C"));
    }
    if cv == &(av + av) {
        return Err(FpError::SideCondition("operation requires C ≠ 2A"));
    }
    Ok(())
}

// The four data shared by the tails of operations 4 and 5.
fn half_exchange_added(s: Sign, av: &Int, cv: &Int) -> Result<Vec<FixedPointDatum>, FpError> {
    let datum = |sign: Sign, xs: [Int; 3]| -> Result<FixedPointDatum, FpError> {
        let ws = xs
            .into_iter()
            .map(WeightVec::new_scalar)
            .collect::<Result<Vec<_>, _>>()?;
        make_datum(sign, ws)
    };
    let c2a = cv - (av + av);
    Ok(vec![
        datum(s, [cv - av, c2a.clone(), av.clone()])?,
        datum(s, [cv - av, av.clone(), av.clone()])?,
        datum(s, [cv - av, av.clone(), av.clone()])?,
        datum(s.flip(), [c2a, av.clone(), av.clone()])?,
    ])
}

impl WeightVec {
    // Internal: scalar constructor from an Int (public API takes i64).
    pub(crate) fn new_scalar(v: Int) -> Result<WeightVec, AlgebraError> {
        WeightVec::new(vec![v])
    }
}

// Moves serialize as (op, orientation, parameters); the removed/added lists
// are re-derived on deserialization, so a document cannot describe an
// off-schema rewrite.
#[derive(Serialize, Deserialize)]
struct MoveRepr {
    op: u8,
    orientation: Sign,
    a: WeightVec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<WeightVec>,
    c: WeightVec,
}

impl Serialize for T62Move {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        MoveRepr {
            op: self.op_id,
            orientation: self.orientation,
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for T62Move {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = MoveRepr::deserialize(de)?;
        T62Move::new(repr.op, repr.orientation, &repr.a, repr.b.as_ref(), &repr.c)
            .map_err(serde::de::Error::custom)
    }
}

/// Apply a rewrite move to a circle 6-manifold collection.
///
/// Checks the shape (`k = 1`, `n = 3`), re-derives the schema from the move's
/// parameters and compares it with the stored `removed`/`added` lists, and
/// verifies that the removed data are actually present.
pub fn apply_t62(
    c: &FixedPointCollection,
    m: &T62Move,
) -> Result<FixedPointCollection, FpError> {
    if c.k != 1 || c.n != 3 {
        return Err(FpError::UnsupportedShape { k: c.k, n: c.n });
    }
    let expected = T62Move::new(m.op_id, m.orientation, &m.a, m.b.as_ref(), &m.c)?;
    if sorted(&m.removed) != sorted(&expected.removed) {
        return Err(FpError::SchemaMismatch("removed list is off-schema"));
    }
    if sorted(&m.added) != sorted(&expected.added) {
        return Err(FpError::SchemaMismatch("added list is off-schema"));
    }
    c.replace(&m.removed, &m.added)
}

fn sorted(data: &[FixedPointDatum]) -> Vec<FixedPointDatum> {
    let mut v = data.to_vec();
    v.sort();
    v
}

/// Reduce a collection to circle (`k = 1`) data: for `k > 1`, pair every
/// weight against a deterministically chosen generic covector; for `k = 1`,
/// read off the scalars. Returns `(sign, positive scalar weights)` pairs —
/// the sign absorbs the parity of negative pairings, exactly as datum
/// canonicalization does.
#[must_use]
pub fn collection_to_circle(c: &FixedPointCollection) -> Vec<(Sign, Vec<Int>)> {
    if c.points.is_empty() {
        return vec![];
    }
    if c.k == 1 {
        return c
            .points
            .iter()
            .map(|p| {
                let ws = p.weights().iter().map(|w| w.as_scalar().clone()).collect();
                (p.sign(), ws)
            })
            .collect();
    }
    let all_weights: Vec<WeightVec> = c
        .points
        .iter()
        .flat_map(|p| p.weights().iter().cloned())
        .collect();
    let anchor = all_weights[0].clone();
    let xi = generic_covector(&all_weights, c.k, &anchor);
    c.points
        .iter()
        .map(|p| {
            let mut sign = p.sign();
            let mut scalars = Vec::with_capacity(p.n());
            for w in p.weights() {
                let v = w.dot(&xi);
                debug_assert!(!v.is_zero(), "covector is generic");
                if v.is_negative() {
                    sign = sign.flip();
                    scalars.push(-v);
                } else {
                    scalars.push(v);
                }
            }
            scalars.sort();
            (sign, scalars)
        })
        .collect()
}

/// The localization sum `Σ_p ε(p) / ∏_i w_{p,i}` over positive circle
/// weights, computed as an exact rational. A realizable collection must
/// return 0.
///
/// # Examples
/// ```
/// use equigraph::algebra::{Sign, WeightVec};
/// use equigraph::fpdata::{verify_abbv, FixedPointCollection};
///
/// let w = |v: i64| WeightVec::scalar(v);
/// // A single positive point cannot bound: the sum is 1, not 0.
/// let c = FixedPointCollection::from_raw(1, 3, vec![(Sign::Plus, vec![w(1), w(1), w(1)])])
///     .unwrap();
/// assert_eq!(verify_abbv(&c), num::BigRational::from_integer(1.into()));
/// ```
#[must_use]
pub fn verify_abbv(c: &FixedPointCollection) -> Rational {
    let mut sum = Rational::zero();
    for (sign, ws) in collection_to_circle(c) {
        let mut prod = Int::one();
        for w in ws {
            prod *= w;
        }
        sum += Rational::new(int(sign.as_i64()), prod);
    }
    sum
}

/// Why a signature check did not produce an integer constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignatureFailure {
    /// Two sample points gave different values, so the sum is not constant.
    NotConstant {
        t1: Int,
        v1: Rational,
        t2: Int,
        v2: Rational,
    },
    /// The sum is constant but not an integer.
    NotInteger(Rational),
    /// The half-dimension is odd (`dim ≡ 2 mod 4`) but the constant is not 0.
    NonzeroOddHalfDim(Int),
    /// Evaluation failed (zero weight or oversized exponent).
    Algebra(AlgebraError),
}

impl fmt::Display for SignatureFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignatureFailure::NotConstant { t1, v1, t2, v2 } => write!(
                f,
                "signature sum is not constant: value {v1} at t={t1} but {v2} at t={t2}"
            ),
            SignatureFailure::NotInteger(v) => {
                write!(f, "signature sum is the non-integer constant {v}")
            }
            SignatureFailure::NonzeroOddHalfDim(v) => write!(
                f,
                "signature must vanish in dimensions ≡ 2 mod 4, but the sum is {v}"
            ),
            SignatureFailure::Algebra(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SignatureFailure {}

/// The fixed-point signature sum, checked for integer constancy.
///
/// Evaluates `Σ_p ε(p) ∏_i (1+t^{w_i})/(1−t^{w_i})` at enough sample points
/// to certify that the rational function is constant (see
/// [`constancy_sample_points`]), and returns that constant. For a realizable
/// collection this is the signature of the manifold; when `2n ≡ 2 mod 4` it
/// must additionally vanish.
pub fn verify_signature(c: &FixedPointCollection) -> Result<Int, SignatureFailure> {
    let circle = collection_to_circle(c);
    let samples = constancy_sample_points(&circle).map_err(SignatureFailure::Algebra)?;
    let mut first: Option<(Int, Rational)> = None;
    for t in samples {
        let v = eval_signature_sum(&circle, &Rational::from_integer(t.clone()))
            .map_err(SignatureFailure::Algebra)?;
        match &first {
            None => first = Some((t, v)),
            Some((t1, v1)) => {
                if v != *v1 {
                    return Err(SignatureFailure::NotConstant {
                        t1: t1.clone(),
                        v1: v1.clone(),
                        t2: t,
                        v2: v,
                    });
                }
            }
        }
    }
    let value = match first {
        Some((_, v)) => v,
        None => Rational::zero(), // no sample points only if the sum is empty
    };
    if !value.is_integer() {
        return Err(SignatureFailure::NotInteger(value));
    }
    let value = value.to_integer();
    if c.n % 2 == 1 && !value.is_zero() {
        return Err(SignatureFailure::NonzeroOddHalfDim(value));
    }
    Ok(value)
}

/// Does the smallest positive circle weight occur equally often among `+`
/// points and `−` points? A realizable collection must balance.
#[must_use]
pub fn verify_min_weight_balance(c: &FixedPointCollection) -> bool {
    let circle = collection_to_circle(c);
    let Some(w_min) = circle.iter().flat_map(|(_, ws)| ws.iter()).min().cloned() else {
        return true; // vacuous for the empty collection
    };
    let mut plus = 0usize;
    let mut minus = 0usize;
    for (sign, ws) in &circle {
        let mult = ws.iter().filter(|w| **w == w_min).count();
        match sign {
            Sign::Plus => plus += mult,
            Sign::Minus => minus += mult,
        }
    }
    plus == minus
}

/// In dimensions `≡ 2 mod 4` (odd `n`) the numbers of `+` and `−` points
/// must agree; in dimensions divisible by 4 there is no constraint (an odd
/// point count itself forces `4 | dim`).
#[must_use]
pub fn verify_sign_balance(c: &FixedPointCollection) -> bool {
    if c.n % 2 == 0 {
        return true;
    }
    let plus = c.points.iter().filter(|p| p.sign() == Sign::Plus).count();
    plus * 2 == c.len()
}

/// Outcome of one screening check.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub check: &'static str,
    pub pass: bool,
    pub reason: String,
}

/// The four necessary conditions, evaluated together. `realizable_candidate`
/// is their conjunction: `false` proves the collection is not the fixed point
/// data of any action; `true` only means screening found no obstruction.
#[derive(Debug, Clone, Serialize)]
pub struct ScreeningReport {
    pub verdicts: Vec<Verdict>,
    pub realizable_candidate: bool,
}

/// Run all four validators and aggregate the verdicts.
#[must_use]
pub fn screen(c: &FixedPointCollection) -> ScreeningReport {
    let mut verdicts = Vec::with_capacity(4);

    let abbv = verify_abbv(c);
    verdicts.push(Verdict {
        check: "localization-sum",
        pass: abbv.is_zero(),
        reason: if abbv.is_zero() {
            "Σ ε(p)/∏w = 0".to_string()
        } else {
            format!("Σ ε(p)/∏w = {abbv}, expected 0")
        },
    });

    match verify_signature(c) {
        Ok(v) => verdicts.push(Verdict {
            check: "signature",
            pass: true,
            reason: format!("signature sum is the constant integer {v}"),
        }),
        Err(e) => verdicts.push(Verdict {
            check: "signature",
            pass: false,
            reason: e.to_string(),
        }),
    }

    let mw = verify_min_weight_balance(c);
    verdicts.push(Verdict {
        check: "min-weight-balance",
        pass: mw,
        reason: if mw {
            "smallest positive weight occurs equally often at + and − points".to_string()
        } else {
            "smallest positive weight count differs between + and − points".to_string()
        },
    });

    let sb = verify_sign_balance(c);
    verdicts.push(Verdict {
        check: "sign-balance",
        pass: sb,
        reason: if c.n % 2 == 0 {
            "no constraint in dimensions divisible by 4 \
             (an odd point count itself forces 4 | dim)"
                .to_string()
        } else if sb {
            "equal numbers of + and − points".to_string()
        } else {
            "unequal numbers of + and − points in dimension ≡ 2 mod 4".to_string()
        },
    });

    let realizable_candidate = verdicts.iter().all(|v| v.pass);
    ScreeningReport {
        verdicts,
        realizable_candidate,
    }
}
