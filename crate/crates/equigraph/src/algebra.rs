//! Exact integer and rational arithmetic underlying every validator.
//!
//! Everything in this crate is computed with arbitrary-precision integers and
//! rationals — **no floating point anywhere**. This module provides:
//!
//! * [`WeightVec`]: a nonzero integer vector in `Z^k`, used both as an edge
//!   label and as a weight at a fixed point;
//! * [`canonical_weight`]: the canonical representative of `{w, −w}` (first
//!   nonzero coordinate positive), which makes the sign-flip equivalence on
//!   fixed point data decidable by structural equality;
//! * [`spans_lattice`]: does a set of integer vectors generate all of `Z^k`?
//!   (the effectiveness condition on the weights at a fixed point);
//! * [`generic_covector`]: a deterministic search for an integer covector
//!   pairing nonzero against every given weight, used to reduce torus-rank
//!   `k > 1` checks to circle (`k = 1`) checks;
//! * [`eval_signature_sum`]: exact evaluation of the fixed-point signature
//!   sum `Σ_p ε(p) ∏_i (1+t^{w_i})/(1−t^{w_i})` at a rational point, plus the
//!   sampling plan ([`constancy_sample_points`]) that turns finitely many
//!   evaluations into a proof that the rational function is constant.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision integer used throughout the crate.
pub type Int = BigInt;

/// Arbitrary-precision rational (always stored reduced, denominator > 0).
pub type Rational = BigRational;

/// Shorthand for building an [`Int`] from a machine integer.
#[inline]
#[must_use]
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Shorthand for building a [`Rational`] from a machine-integer fraction.
///
/// # Panics
/// Panics if `d == 0`.
#[inline]
#[must_use]
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(int(n), int(d))
}

/// Errors from the arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    /// A weight or label was the zero vector, which is never allowed.
    ZeroWeight,
    /// A vector had the wrong number of coordinates.
    DimensionMismatch { expected: usize, got: usize },
    /// The signature sum was evaluated at a pole (`t ∈ {0, 1, −1}`).
    Pole(Rational),
    /// A weight magnitude was too large to use as an exponent.
    ExponentOverflow,
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::ZeroWeight => write!(f, "zero weight vector is not allowed"),
            AlgebraError::DimensionMismatch { expected, got } => {
                write!(f, "expected a vector of {expected} coordinates, got {got}")
            }
            AlgebraError::Pole(t) => write!(f, "signature sum has a pole at t = {t}"),
            AlgebraError::ExponentOverflow => {
                write!(f, "weight magnitude too large for exact exponentiation")
            }
        }
    }
}

impl std::error::Error for AlgebraError {}

/// The sign `ε ∈ {+1, −1}` attached to a fixed point or a fixed point datum.
///
/// Ordered with `Plus < Minus` so that data sorted by (weights, sign) have a
/// deterministic canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    /// `+1`
    Plus,
    /// `−1`
    Minus,
}

impl Sign {
    /// The opposite sign.
    #[inline]
    #[must_use]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `+1` or `−1` as a machine integer.
    #[inline]
    #[must_use]
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// Parse from `+1` / `−1`.
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self.flip()
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

// Signs travel through the file formats as the integers +1 / -1.
impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.as_i64())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_i64(v).ok_or_else(|| D::Error::custom(format!("sign must be +1 or -1, got {v}")))
    }
}

/// A nonzero integer vector in `Z^k`: an edge label or a fixed-point weight.
///
/// Comparison is lexicographic on the coordinates, which gives every multiset
/// of weights a deterministic sorted order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightVec(Vec<Int>);

impl WeightVec {
    /// Build a weight vector, rejecting the zero vector.
    pub fn new(coords: Vec<Int>) -> Result<WeightVec, AlgebraError> {
        if coords.is_empty() || coords.iter().all(Zero::is_zero) {
            return Err(AlgebraError::ZeroWeight);
        }
        Ok(WeightVec(coords))
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64s(coords: &[i64]) -> Result<WeightVec, AlgebraError> {
        WeightVec::new(coords.iter().map(|&c| int(c)).collect())
    }

    /// A rank-1 (scalar) weight, the common case for circle actions.
    ///
    /// # Panics
    /// Panics if `v == 0`.
    #[must_use]
    pub fn scalar(v: i64) -> WeightVec {
        assert!(v != 0, "scalar weight must be nonzero");
        WeightVec(vec![int(v)])
    }

    /// Number of coordinates (the torus rank `k`).
    #[inline]
    #[must_use]
    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// The coordinates.
    #[inline]
    #[must_use]
    pub fn coords(&self) -> &[Int] {
        &self.0
    }

    /// Coordinate-wise negation. Always valid: `−w` is nonzero iff `w` is.
    #[must_use]
    pub fn neg(&self) -> WeightVec {
        WeightVec(self.0.iter().map(|c| -c).collect())
    }

    /// Coordinate-wise sum; fails if the result is the zero vector.
    pub fn try_add(&self, rhs: &WeightVec) -> Result<WeightVec, AlgebraError> {
        self.zip_with(rhs, |a, b| a + b)
    }

    /// Coordinate-wise difference; fails if the result is the zero vector.
    pub fn try_sub(&self, rhs: &WeightVec) -> Result<WeightVec, AlgebraError> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(
        &self,
        rhs: &WeightVec,
        f: impl Fn(&Int, &Int) -> Int,
    ) -> Result<WeightVec, AlgebraError> {
        if self.k() != rhs.k() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.k(),
                got: rhs.k(),
            });
        }
        WeightVec::new(self.0.iter().zip(&rhs.0).map(|(a, b)| f(a, b)).collect())
    }

    /// Integer pairing `⟨self, xi⟩ = Σ_i self_i · xi_i`.
    ///
    /// # Panics
    /// Panics if the ranks disagree.
    #[must_use]
    pub fn dot(&self, xi: &WeightVec) -> Int {
        assert_eq!(self.k(), xi.k(), "pairing requires equal ranks");
        self.0
            .iter()
            .zip(&xi.0)
            .map(|(a, b)| a * b)
            .fold(Int::zero(), |acc, v| acc + v)
    }

    /// The scalar value of a rank-1 weight.
    ///
    /// # Panics
    /// Panics if `k ≠ 1`.
    #[must_use]
    pub fn as_scalar(&self) -> &Int {
        assert_eq!(self.k(), 1, "as_scalar requires k = 1");
        &self.0[0]
    }

    /// True if the first nonzero coordinate is positive.
    #[must_use]
    pub fn is_canonical(&self) -> bool {
        for c in &self.0 {
            match c.cmp(&Int::zero()) {
                Ordering::Greater => return true,
                Ordering::Less => return false,
                Ordering::Equal => {}
            }
        }
        false
    }
}

impl fmt::Display for WeightVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "(")?;
            for (i, c) in self.0.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
    }
}

impl fmt::Debug for WeightVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Coordinates are written as JSON numbers when they fit in an i64 and as
// decimal strings otherwise, so documents stay readable without losing
// exactness past 2^63.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoordRepr {
    Small(i64),
    Big(String),
}

impl Serialize for WeightVec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<CoordRepr> = self
            .0
            .iter()
            .map(|c| match i64::try_from(c) {
                Ok(v) => CoordRepr::Small(v),
                Err(_) => CoordRepr::Big(c.to_string()),
            })
            .collect();
        reprs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let reprs = Vec::<CoordRepr>::deserialize(d)?;
        let mut coords = Vec::with_capacity(reprs.len());
        for r in reprs {
            coords.push(match r {
                CoordRepr::Small(v) => int(v),
                CoordRepr::Big(s) => s
                    .parse::<Int>()
                    .map_err(|e| D::Error::custom(format!("bad integer coordinate {s:?}: {e}")))?,
            });
        }
        WeightVec::new(coords).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Canonical representative of the pair `{w, −w}`.
///
/// Returns `w` unchanged if its first nonzero coordinate is positive, and
/// `−w` otherwise, together with a flag reporting whether a flip happened.
/// Idempotent on its own output, and `canonical_weight(−w).0 ==
/// canonical_weight(w).0`.
///
/// # Examples
/// ```
/// use equigraph::algebra::{canonical_weight, WeightVec};
///
/// let (w, flipped) = canonical_weight(&WeightVec::scalar(-3));
/// assert_eq!(w, WeightVec::scalar(3));
/// assert!(flipped);
///
/// let (w, flipped) = canonical_weight(&WeightVec::from_i64s(&[0, -2]).unwrap());
/// assert_eq!(w, WeightVec::from_i64s(&[0, 2]).unwrap());
/// assert!(flipped);
/// ```
#[must_use]
pub fn canonical_weight(w: &WeightVec) -> (WeightVec, bool) {
    if w.is_canonical() {
        (w.clone(), false)
    } else {
        (w.neg(), true)
    }
}

/// Does the integer span of `ws` equal all of `Z^k`?
///
/// Computed by exact integer row reduction (Euclidean elimination to a row
/// echelon form): the span is `Z^k` exactly when the reduction finds `k`
/// pivots that are all `±1` — equivalently, all elementary divisors are 1.
///
/// # Examples
/// ```
/// use equigraph::algebra::{spans_lattice, WeightVec};
///
/// let w = |v: i64| WeightVec::scalar(v);
/// assert!(spans_lattice(&[w(2), w(3)], 1).unwrap()); // gcd 1
/// assert!(!spans_lattice(&[w(2), w(4)], 1).unwrap()); // gcd 2
///
/// let e1 = WeightVec::from_i64s(&[1, 0]).unwrap();
/// let e2 = WeightVec::from_i64s(&[0, 1]).unwrap();
/// assert!(spans_lattice(&[e1, e2], 2).unwrap());
/// ```
pub fn spans_lattice(ws: &[WeightVec], k: usize) -> Result<bool, AlgebraError> {
    for w in ws {
        if w.k() != k {
            return Err(AlgebraError::DimensionMismatch {
                expected: k,
                got: w.k(),
            });
        }
    }
    let mut rows: Vec<Vec<Int>> = ws.iter().map(|w| w.coords().to_vec()).collect();
    let m = rows.len();
    let mut rank = 0usize;
    for col in 0..k {
        if rank == m {
            break;
        }
        // Euclidean elimination in this column below `rank`.
        loop {
            let pivot = (rank..m)
                .filter(|&i| !rows[i][col].is_zero())
                .min_by_key(|&i| rows[i][col].abs());
            let Some(p) = pivot else { break };
            rows.swap(rank, p);
            let mut clean = true;
            for r in rank + 1..m {
                if !rows[r][col].is_zero() {
                    let q = &rows[r][col] / &rows[rank][col];
                    if !q.is_zero() {
                        for c in col..k {
                            let sub = &q * &rows[rank][c];
                            rows[r][c] -= sub;
                        }
                    }
                    if !rows[r][col].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if !rows[rank][col].is_zero() {
            if !rows[rank][col].abs().is_one() {
                // A pivot > 1 makes the lattice a proper sublattice in this
                // echelon basis, so the span cannot be all of Z^k.
                return Ok(false);
            }
            rank += 1;
        }
    }
    Ok(rank == k)
}

/// Deterministic search for an integer covector `ξ` with `⟨w, ξ⟩ ≠ 0` for
/// every `w ∈ ws` and `⟨anchor, ξ⟩ > 0`.
///
/// Scans L∞ boxes of radius 1, 2, 3, … in lexicographic coordinate order and
/// returns the first hit, so results are reproducible. Such a `ξ` always
/// exists for a finite set of nonzero weights, hence this never fails.
///
/// Pairing the rank-`k` weights of a collection against `ξ` turns a torus
/// check into a circle check, which is how all validators handle `k > 1`.
///
/// # Examples
/// ```
/// use equigraph::algebra::{generic_covector, WeightVec};
///
/// let ws = [WeightVec::scalar(1), WeightVec::scalar(2)];
/// assert_eq!(generic_covector(&ws, 1, &ws[0]), WeightVec::scalar(1));
/// ```
#[must_use]
pub fn generic_covector(ws: &[WeightVec], k: usize, anchor: &WeightVec) -> WeightVec {
    assert!(k >= 1, "rank must be at least 1");
    for radius in 1i64.. {
        let mut coords = vec![-radius; k];
        'scan: loop {
            if coords.iter().any(|&c| c != 0) {
                let xi = WeightVec(coords.iter().map(|&c| int(c)).collect());
                let hits = ws.iter().all(|w| !w.dot(&xi).is_zero());
                if hits && anchor.dot(&xi).is_positive() {
                    return xi;
                }
            }
            // Odometer increment in lexicographic order.
            for i in (0..k).rev() {
                if coords[i] < radius {
                    coords[i] += 1;
                    continue 'scan;
                }
                coords[i] = -radius;
            }
            break;
        }
    }
    unreachable!("a generic covector exists for every finite weight set")
}

/// Exact value of the fixed-point signature sum
/// `Σ_p ε(p) ∏_i (1 + t^{w_i}) / (1 − t^{w_i})`
/// at a rational `t`, for scalar (circle) weights.
///
/// Negative weights are handled exactly: `t^{-a}` is a rational, and the
/// corresponding factor equals the negated factor of `|a|`. The evaluation
/// refuses `t ∈ {0, 1, −1}` (poles) and zero weights.
///
/// # Examples
/// ```
/// use equigraph::algebra::{eval_signature_sum, int, rat, Sign};
///
/// // Fixed point data of a standard 4-dimensional projective plane:
/// let pts = vec![
///     (Sign::Plus, vec![int(1), int(2)]),
///     (Sign::Minus, vec![int(1), int(1)]),
///     (Sign::Plus, vec![int(2), int(1)]),
/// ];
/// assert_eq!(eval_signature_sum(&pts, &rat(2, 1)).unwrap(), rat(1, 1));
/// ```
pub fn eval_signature_sum(
    points: &[(Sign, Vec<Int>)],
    t: &Rational,
) -> Result<Rational, AlgebraError> {
    if t.is_zero() || t.abs().is_one() {
        return Err(AlgebraError::Pole(t.clone()));
    }
    if points.is_empty() {
        return Ok(Rational::zero());
    }
    let p = t.numer();
    let q = t.denom();

    // Collect |w| exponents and the per-point multiplicities so all terms can
    // share one common denominator — summing reduced rationals one at a time
    // would spend most of its time in gcd.
    let mut max_mult: BTreeMap<usize, usize> = BTreeMap::new();
    let mut point_mults: Vec<BTreeMap<usize, usize>> = Vec::with_capacity(points.len());
    for (_, ws) in points {
        let mut mults: BTreeMap<usize, usize> = BTreeMap::new();
        for w in ws {
            if w.is_zero() {
                return Err(AlgebraError::ZeroWeight);
            }
            let a = usize::try_from(w.abs()).map_err(|_| AlgebraError::ExponentOverflow)?;
            *mults.entry(a).or_insert(0) += 1;
        }
        for (&a, &m) in &mults {
            let e = max_mult.entry(a).or_insert(0);
            *e = (*e).max(m);
        }
        point_mults.push(mults);
    }

    let max_exp = max_mult.keys().copied().max().unwrap_or(0);
    let mut p_pow = Vec::with_capacity(max_exp + 1);
    let mut q_pow = Vec::with_capacity(max_exp + 1);
    p_pow.push(Int::one());
    q_pow.push(Int::one());
    for i in 1..=max_exp {
        p_pow.push(&p_pow[i - 1] * p);
        q_pow.push(&q_pow[i - 1] * q);
    }
    // For t = p/q and a > 0: (1 + t^a)/(1 − t^a) = (q^a + p^a)/(q^a − p^a).
    let num_of = |a: usize| &q_pow[a] + &p_pow[a];
    let den_of = |a: usize| &q_pow[a] - &p_pow[a];

    let mut common_den = Int::one();
    for (&a, &e) in &max_mult {
        for _ in 0..e {
            common_den *= den_of(a);
        }
    }
    debug_assert!(!common_den.is_zero(), "poles were excluded above");

    let mut total = Int::zero();
    for ((sign, ws), mults) in points.iter().zip(&point_mults) {
        let mut term = int(sign.as_i64());
        for w in ws {
            let a = usize::try_from(w.abs()).expect("checked above");
            term *= num_of(a);
            if w.is_negative() {
                // (1 + t^{-a})/(1 − t^{-a}) = −(1 + t^a)/(1 − t^a)
                term = -term;
            }
        }
        // Scale by the cofactor common_den / (this point's denominator).
        for (&a, &e) in &max_mult {
            let have = mults.get(&a).copied().unwrap_or(0);
            for _ in 0..(e - have) {
                term *= den_of(a);
            }
        }
        total += term;
    }
    Ok(Rational::new(total, common_den))
}

/// The sample points that certify constancy of the signature sum.
///
/// With `W = Σ_p Σ_i |w_{p,i}|` (scalar weights) the difference of the
/// signature sum and any constant, cleared of denominators, is a polynomial
/// of degree at most `D = 2W + 1`; agreeing at more than `D` points away from
/// the poles forces it to vanish identically. This returns the integers
/// `t = 2, 3, …, D+3`, all safely outside `{0, ±1}`.
pub fn constancy_sample_points(points: &[(Sign, Vec<Int>)]) -> Result<Vec<Int>, AlgebraError> {
    let mut w_total: usize = 0;
    for (_, ws) in points {
        for w in ws {
            if w.is_zero() {
                return Err(AlgebraError::ZeroWeight);
            }
            let a = usize::try_from(w.abs()).map_err(|_| AlgebraError::ExponentOverflow)?;
            w_total = w_total.checked_add(a).ok_or(AlgebraError::ExponentOverflow)?;
        }
    }
    let d = 2 * w_total + 1;
    Ok((2..=(d as i64) + 3).map(int).collect())
}
