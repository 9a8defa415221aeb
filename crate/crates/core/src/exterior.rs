//! Signed-index exterior algebra over a finite stage.
//!
//! Basis vectors are labelled by nonzero integers. Labels are ordered through
//! [`mu`], which sends `-n` to `2n` and `p` to `2p - 1`; every wedge basis
//! element is stored with its labels in ascending μ-order, and wedge basis
//! elements of equal degree compare lexicographically on their μ-words.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalars::Field;

/// A basis label `x_i`, `i != 0`. Ordered by μ, not by integer value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct SignedIndex(i32);

impl SignedIndex {
    pub fn new(i: i32) -> Result<Self> {
        if i == 0 {
            Err(Error::ZeroIndex)
        } else {
            Ok(SignedIndex(i))
        }
    }

    pub fn get(self) -> i32 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn mu(self) -> u64 {
        mu(self)
    }

    /// Inverse of [`mu`].
    pub fn from_mu(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroIndex);
        }
        let v = if m % 2 == 0 {
            -((m / 2) as i64)
        } else {
            m.div_ceil(2) as i64
        };
        let v = i32::try_from(v)
            .map_err(|_| Error::InvalidIndexSet(format!("μ value {m} out of range")))?;
        SignedIndex::new(v)
    }
}

impl TryFrom<i32> for SignedIndex {
    type Error = Error;
    fn try_from(i: i32) -> Result<Self> {
        SignedIndex::new(i)
    }
}

impl From<SignedIndex> for i32 {
    fn from(i: SignedIndex) -> i32 {
        i.0
    }
}

impl Ord for SignedIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        mu(*self).cmp(&mu(*other))
    }
}

impl PartialOrd for SignedIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SignedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for SignedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `-n ↦ 2n`, `p ↦ 2p - 1`.
pub fn mu(i: SignedIndex) -> u64 {
    let v = i.0 as i64;
    if v < 0 {
        (2 * -v) as u64
    } else {
        (2 * v - 1) as u64
    }
}

/// Shorthand for building labels in tests and examples. Panics on zero.
pub fn idx(i: i32) -> SignedIndex {
    SignedIndex::new(i).expect("label must be nonzero")
}

/// Finite truncation with labels `-neg..=-1` and `1..=pos`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Stage {
    neg: u32,
    pos: u32,
}

impl Stage {
    pub fn new(neg: u32, pos: u32) -> Result<Self> {
        if neg == 0 || pos == 0 {
            return Err(Error::InvalidStage {
                neg: neg as i64,
                pos: pos as i64,
            });
        }
        Ok(Stage { neg, pos })
    }

    pub fn neg(&self) -> u32 {
        self.neg
    }

    pub fn pos(&self) -> u32 {
        self.pos
    }

    pub fn symbol_count(&self) -> usize {
        (self.neg + self.pos) as usize
    }

    pub fn contains(&self, i: SignedIndex) -> bool {
        let v = i.get();
        (v < 0 && v.unsigned_abs() <= self.neg) || (v > 0 && v as u32 <= self.pos)
    }

    /// All labels of the stage in ascending μ-order.
    pub fn symbols(&self) -> Vec<SignedIndex> {
        let mut s: Vec<SignedIndex> = (1..=self.neg as i32)
            .map(|j| SignedIndex(-j))
            .chain((1..=self.pos as i32).map(SignedIndex))
            .collect();
        s.sort();
        s
    }

    /// Every wedge basis element of the given degree, in ascending order.
    pub fn basis(&self, degree: usize) -> Vec<WedgeIndex> {
        let symbols = self.symbols();
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(degree);
        fn rec(
            symbols: &[SignedIndex],
            start: usize,
            degree: usize,
            current: &mut Vec<SignedIndex>,
            out: &mut Vec<WedgeIndex>,
        ) {
            if current.len() == degree {
                out.push(WedgeIndex(current.clone()));
                return;
            }
            for k in start..symbols.len() {
                if symbols.len() - k < degree - current.len() {
                    break;
                }
                current.push(symbols[k]);
                rec(symbols, k + 1, degree, current, out);
                current.pop();
            }
        }
        if degree <= symbols.len() {
            rec(&symbols, 0, degree, &mut current, &mut out);
        }
        out
    }

    /// `(n, p) ≤ (m, q)` iff `n ≤ m` and `p ≤ q`.
    pub fn le(&self, other: &Stage) -> bool {
        self.neg <= other.neg && self.pos <= other.pos
    }

    pub fn with_extra_negative(&self) -> Stage {
        Stage {
            neg: self.neg + 1,
            pos: self.pos,
        }
    }

    pub fn with_extra_positive(&self) -> Stage {
        Stage {
            neg: self.neg,
            pos: self.pos + 1,
        }
    }

    /// The label `-neg`, removed by the ξ maps.
    pub fn last_negative(&self) -> SignedIndex {
        SignedIndex(-(self.neg as i32))
    }

    /// The label `pos`, removed by the θ maps.
    pub fn last_positive(&self) -> SignedIndex {
        SignedIndex(self.pos as i32)
    }

    pub fn check_index(&self, i: SignedIndex) -> Result<()> {
        if self.contains(i) {
            Ok(())
        } else {
            Err(Error::IndexOutsideStage {
                index: i,
                stage: *self,
            })
        }
    }
}

impl fmt::Debug for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.neg, self.pos)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.neg, self.pos)
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;
    /// Parses `n,p`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("stage must be `n,p`, got `{s}`"));
        let (n, p) = s.trim().split_once(',').ok_or_else(bad)?;
        let n = n.trim().parse::<u32>().map_err(|_| bad())?;
        let p = p.trim().parse::<u32>().map_err(|_| bad())?;
        Stage::new(n, p)
    }
}

/// Parity sign of a permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn apply<F: Field>(self, field: &F, v: &F::Elem) -> F::Elem {
        match self {
            Sign::Plus => v.clone(),
            Sign::Minus => field.neg(v),
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self != rhs)
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

/// Strictly μ-increasing list of labels: the wedge `x_{i_1} ∧ ⋯ ∧ x_{i_d}`.
///
/// The derived order is lexicographic on μ-words, which is the basis well
/// order within a fixed degree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WedgeIndex(Vec<SignedIndex>);

impl WedgeIndex {
    /// Validates that `indices` is strictly μ-increasing.
    pub fn new(indices: Vec<SignedIndex>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndexSet(format!(
                "{indices:?} is not strictly increasing in μ-order"
            )));
        }
        Ok(WedgeIndex(indices))
    }

    /// Sorts and deduplicates check: fails on repeated labels.
    pub fn from_set<I: IntoIterator<Item = SignedIndex>>(indices: I) -> Result<Self> {
        let mut v: Vec<SignedIndex> = indices.into_iter().collect();
        v.sort();
        WedgeIndex::new(v)
    }

    /// Parses raw integers as a set; panics on zero or repeated labels.
    pub fn of(raw: &[i32]) -> Self {
        WedgeIndex::from_set(raw.iter().map(|&i| idx(i))).expect("valid label set")
    }

    pub fn empty() -> Self {
        WedgeIndex(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[SignedIndex] {
        &self.0
    }

    pub fn contains(&self, i: SignedIndex) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Zero-based position of `i`.
    pub fn position(&self, i: SignedIndex) -> Option<usize> {
        self.0.binary_search(&i).ok()
    }

    pub fn without(&self, i: SignedIndex) -> Option<WedgeIndex> {
        let pos = self.position(i)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(WedgeIndex(v))
    }

    pub fn fits(&self, stage: &Stage) -> bool {
        self.0.iter().all(|&i| stage.contains(i))
    }

    pub fn mu_word(&self) -> Vec<u64> {
        self.0.iter().map(|&i| mu(i)).collect()
    }

    pub fn to_ints(&self) -> Vec<i32> {
        self.0.iter().map(|i| i.get()).collect()
    }

    /// Labels as a set bitmask over μ-values (bit `μ - 1`). Stages used here
    /// stay far below 64 symbols.
    pub fn mask(&self) -> u128 {
        self.0
            .iter()
            .fold(0u128, |m, &i| m | (1u128 << (mu(i) - 1)))
    }
}

impl fmt::Debug for WedgeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for WedgeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for WedgeIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_ints().serialize(s)
    }
}

impl<'de> Deserialize<'de> for WedgeIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<i32>::deserialize(d)?;
        let labels = raw
            .into_iter()
            .map(SignedIndex::new)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        WedgeIndex::from_set(labels).map_err(serde::de::Error::custom)
    }
}

/// Basis order on wedges of equal degree.
pub fn wedge_index_cmp(a: &WedgeIndex, b: &WedgeIndex) -> Result<Ordering> {
    if a.degree() != b.degree() {
        return Err(Error::DegreeMismatch {
            left: a.degree(),
            right: b.degree(),
        });
    }
    Ok(a.cmp(b))
}

/// Normal form of an oriented wedge: `None` if a label repeats, otherwise the
/// sorted index and the parity of the sorting permutation.
pub fn canonicalize(raw: &[SignedIndex]) -> Option<(WedgeIndex, Sign)> {
    let mut v = raw.to_vec();
    let mut swaps = 0usize;
    // insertion sort; inputs are short
    for k in 1..v.len() {
        let mut j = k;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((WedgeIndex(v), Sign::from_parity(swaps % 2 == 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Side {
    /// `∧(V)`
    Primal,
    /// `∧(V*)`
    Dual,
}

/// JSON form of one term: `{indexList, coeff}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TermJson {
    pub index_list: Vec<i32>,
    pub coeff: String,
}

/// Homogeneous element of `∧^d(V)` or `∧^d(V*)` at a stage, stored sparsely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExteriorElement<F: Field> {
    field: F,
    stage: Stage,
    degree: usize,
    side: Side,
    coeffs: BTreeMap<WedgeIndex, F::Elem>,
}

impl<F: Field> ExteriorElement<F> {
    pub fn zero(field: &F, stage: Stage, degree: usize, side: Side) -> Self {
        ExteriorElement {
            field: field.clone(),
            stage,
            degree,
            side,
            coeffs: BTreeMap::new(),
        }
    }

    /// Degree-0 element.
    pub fn scalar(field: &F, stage: Stage, side: Side, c: F::Elem) -> Self {
        let mut e = Self::zero(field, stage, 0, side);
        e.add_term(WedgeIndex::empty(), c);
        e
    }

    pub fn basis_element(field: &F, stage: Stage, side: Side, key: WedgeIndex) -> Result<Self> {
        let degree = key.degree();
        Self::from_terms(
            field,
            stage,
            degree,
            side,
            [(key.indices().to_vec(), field.one())],
        )
    }

    /// Builds an element from oriented terms; each label list is
    /// canonicalized (repeats vanish) and checked against the stage.
    pub fn from_terms<I>(
        field: &F,
        stage: Stage,
        degree: usize,
        side: Side,
        terms: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<SignedIndex>, F::Elem)>,
    {
        if degree > stage.symbol_count() {
            return Err(Error::DegreeTooLarge {
                degree,
                symbols: stage.symbol_count(),
            });
        }
        let mut e = Self::zero(field, stage, degree, side);
        for (raw, c) in terms {
            if raw.len() != degree {
                return Err(Error::DegreeMismatch {
                    left: raw.len(),
                    right: degree,
                });
            }
            for &i in &raw {
                stage.check_index(i)?;
            }
            if let Some((key, sign)) = canonicalize(&raw) {
                let c = sign.apply(field, &c);
                e.add_term(key, c);
            }
        }
        Ok(e)
    }

    /// Degree-1 element `Σ c_i x_i` (or `x_i*` on the dual side).
    pub fn linear(
        field: &F,
        stage: Stage,
        side: Side,
        terms: &[(SignedIndex, F::Elem)],
    ) -> Result<Self> {
        Self::from_terms(
            field,
            stage,
            1,
            side,
            terms.iter().map(|(i, c)| (vec![*i], c.clone())),
        )
    }

    pub(crate) fn from_map(
        field: &F,
        stage: Stage,
        degree: usize,
        side: Side,
        coeffs: BTreeMap<WedgeIndex, F::Elem>,
    ) -> Self {
        debug_assert!(coeffs
            .keys()
            .all(|k| k.degree() == degree && k.fits(&stage)));
        let mut coeffs = coeffs;
        coeffs.retain(|_, v| !field.is_zero(v));
        ExteriorElement {
            field: field.clone(),
            stage,
            degree,
            side,
            coeffs,
        }
    }

    fn add_term(&mut self, key: WedgeIndex, c: F::Elem) {
        let f = &self.field;
        if f.is_zero(&c) {
            return;
        }
        match self.coeffs.get_mut(&key) {
            Some(v) => {
                *v = f.add(v, &c);
                if f.is_zero(v) {
                    self.coeffs.remove(&key);
                }
            }
            None => {
                self.coeffs.insert(key, c);
            }
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, key: &WedgeIndex) -> F::Elem {
        self.coeffs
            .get(key)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WedgeIndex, &F::Elem)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &WedgeIndex> {
        self.coeffs.keys()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.stage != other.stage {
            return Err(Error::StageMismatch {
                left: self.stage,
                right: other.stage,
            });
        }
        if self.side != other.side {
            return Err(Error::SideMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        let coeffs = if f.is_zero(c) {
            BTreeMap::new()
        } else {
            self.coeffs
                .iter()
                .map(|(k, v)| (k.clone(), f.mul(v, c)))
                .collect()
        };
        ExteriorElement {
            coeffs,
            ..self.clone_empty()
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.neg(&self.field.one()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    fn clone_empty(&self) -> Self {
        ExteriorElement {
            field: self.field.clone(),
            stage: self.stage,
            degree: self.degree,
            side: self.side,
            coeffs: BTreeMap::new(),
        }
    }

    /// Wedge product, via canonicalization of concatenated label lists.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        if degree > self.stage.symbol_count() {
            return Err(Error::DegreeTooLarge {
                degree,
                symbols: self.stage.symbol_count(),
            });
        }
        let f = &self.field;
        let mut out = Self::zero(f, self.stage, degree, self.side);
        for (ka, va) in &self.coeffs {
            for (kb, vb) in &other.coeffs {
                if ka.mask() & kb.mask() != 0 {
                    continue;
                }
                let raw: Vec<SignedIndex> = ka.0.iter().chain(kb.0.iter()).copied().collect();
                if let Some((key, sign)) = canonicalize(&raw) {
                    out.add_term(key, sign.apply(f, &f.mul(va, vb)));
                }
            }
        }
        Ok(out)
    }

    /// Contraction of a dual element by `x_i` in the first slot:
    /// `(i_v ω)(w_1, …) = ω(v, w_1, …)`.
    pub fn interior(&self, i: SignedIndex) -> Result<Self> {
        if self.side != Side::Dual {
            return Err(Error::SideMismatch);
        }
        if self.degree == 0 {
            return Err(Error::DegreeMismatch { left: 0, right: 1 });
        }
        self.stage.check_index(i)?;
        let f = &self.field;
        let mut out = Self::zero(f, self.stage, self.degree - 1, Side::Dual);
        for (k, v) in &self.coeffs {
            if let Some(pos) = k.position(i) {
                let rest = k.without(i).expect("label present");
                out.add_term(rest, Sign::from_parity(pos % 2 == 1).apply(f, v));
            }
        }
        Ok(out)
    }

    /// Re-labels the element onto a stage containing every key.
    pub fn restage(&self, stage: Stage) -> Result<Self> {
        if let Some(bad) = self
            .coeffs
            .keys()
            .flat_map(|k| k.indices())
            .find(|&&i| !stage.contains(i))
        {
            return Err(Error::IndexOutsideStage { index: *bad, stage });
        }
        Ok(ExteriorElement {
            stage,
            ..self.clone()
        })
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.coeffs
            .iter()
            .map(|(k, v)| TermJson {
                index_list: k.to_ints(),
                coeff: self.field.format(v),
            })
            .collect()
    }
}

/// Evaluates a dual element on the oriented primal wedge `x_{u_1} ∧ ⋯ ∧ x_{u_d}`.
pub fn pairing<F: Field>(phi: &ExteriorElement<F>, u: &[SignedIndex]) -> Result<F::Elem> {
    if phi.side != Side::Dual {
        return Err(Error::SideMismatch);
    }
    if u.len() != phi.degree {
        return Err(Error::DegreeMismatch {
            left: phi.degree,
            right: u.len(),
        });
    }
    for &i in u {
        phi.stage.check_index(i)?;
    }
    Ok(match canonicalize(u) {
        None => phi.field.zero(),
        Some((key, sign)) => sign.apply(&phi.field, &phi.coeff(&key)),
    })
}

/// Bilinear pairing of a dual element with a primal element.
pub fn pair<F: Field>(phi: &ExteriorElement<F>, u: &ExteriorElement<F>) -> Result<F::Elem> {
    if phi.side != Side::Dual || u.side != Side::Primal {
        return Err(Error::SideMismatch);
    }
    if phi.stage != u.stage {
        return Err(Error::StageMismatch {
            left: phi.stage,
            right: u.stage,
        });
    }
    if phi.degree != u.degree {
        return Err(Error::DegreeMismatch {
            left: phi.degree,
            right: u.degree,
        });
    }
    let f = &phi.field;
    Ok(u.coeffs.iter().fold(f.zero(), |acc, (k, c)| {
        f.add(&acc, &f.mul(c, &phi.coeff(k)))
    }))
}

/// `(f_1 ∧ ⋯ ∧ f_d)(x_{u_1} ∧ ⋯ ∧ x_{u_d}) = det[f_a(x_{u_b})]`, evaluated
/// directly from the covectors without expanding the wedge.
pub fn covector_pairing<F: Field>(
    covectors: &[ExteriorElement<F>],
    u: &[SignedIndex],
) -> Result<F::Elem> {
    let Some(first) = covectors.first() else {
        return if u.is_empty() {
            Err(Error::InvalidIndexSet("no covectors given".into()))
        } else {
            Err(Error::DegreeMismatch {
                left: 0,
                right: u.len(),
            })
        };
    };
    if covectors.len() != u.len() {
        return Err(Error::DegreeMismatch {
            left: covectors.len(),
            right: u.len(),
        });
    }
    let f = first.field.clone();
    let mut rows = Vec::with_capacity(u.len());
    for c in covectors {
        if c.side != Side::Dual || c.degree != 1 {
            return Err(Error::SideMismatch);
        }
        rows.push(
            u.iter()
                .map(|&j| c.coeff(&WedgeIndex(vec![j])))
                .collect::<Vec<_>>(),
        );
    }
    Matrix::from_rows(&f, rows)?.determinant()
}

/// `f_1 ∧ ⋯ ∧ f_d` expanded into dual coordinates.
pub fn wedge_all<F: Field>(factors: &[ExteriorElement<F>]) -> Result<ExteriorElement<F>> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidIndexSet("empty wedge".into()))?;
    let mut acc = ExteriorElement::scalar(&first.field, first.stage, first.side, first.field.one());
    for f in factors {
        acc = acc.wedge(f)?;
    }
    Ok(acc)
}

/// η: `∧(V_{n,p}) → ∧(V_{n+1,p})`, inclusion of bases.
pub fn map_eta<F: Field>(u: &ExteriorElement<F>) -> Result<ExteriorElement<F>> {
    if u.side != Side::Primal {
        return Err(Error::SideMismatch);
    }
    u.restage(u.stage.with_extra_negative())
}

/// β: `u ↦ u ∧ x_{p+1}`, into stage `(n, p+1)`.
pub fn map_beta<F: Field>(u: &ExteriorElement<F>) -> Result<ExteriorElement<F>> {
    if u.side != Side::Primal {
        return Err(Error::SideMismatch);
    }
    let target = u.stage.with_extra_positive();
    let lifted = u.restage(target)?;
    let f = &u.field;
    let new = ExteriorElement::linear(
        f,
        target,
        Side::Primal,
        &[(target.last_positive(), f.one())],
    )?;
    lifted.wedge(&new)
}

/// ξ: drops every coordinate whose key contains `-(n+1)`; adjoint to η.
pub fn map_xi<F: Field>(omega: &ExteriorElement<F>) -> Result<ExteriorElement<F>> {
    if omega.side != Side::Dual {
        return Err(Error::SideMismatch);
    }
    let target = shrink_negative(omega.stage)?;
    let drop = omega.stage.last_negative();
    let coeffs = omega
        .coeffs
        .iter()
        .filter(|(k, _)| !k.contains(drop))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Ok(ExteriorElement::from_map(
        &omega.field,
        target,
        omega.degree,
        Side::Dual,
        coeffs,
    ))
}

/// θ: `ω ↦ i_{x_{p+1}} ω`, from stage `(n, p+1)` to `(n, p)`.
pub fn map_theta<F: Field>(omega: &ExteriorElement<F>) -> Result<ExteriorElement<F>> {
    let target = shrink_positive(omega.stage)?;
    let contracted = omega.interior(omega.stage.last_positive())?;
    contracted.restage(target)
}

/// Which transition map an order check applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OrderMap {
    /// β, into `(n, p+1)`.
    Beta,
    /// η, into `(n+1, p)`.
    Eta,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderCheck {
    pub map: OrderMap,
    pub stage: Stage,
    pub pairs: usize,
    /// Pairs `(u, v)` whose comparison differs from that of their images.
    pub violations: Vec<(WedgeIndex, WedgeIndex)>,
}

/// Compares every ordered pair of degree-`p` basis elements at `stage` with
/// the pair of their images under β or η.
pub fn order_check<F: Field>(field: &F, stage: Stage, map: OrderMap) -> Result<OrderCheck> {
    let basis = stage.basis(stage.pos() as usize);
    let images: Vec<WedgeIndex> = basis
        .iter()
        .map(|k| {
            let u = ExteriorElement::basis_element(field, stage, Side::Primal, k.clone())?;
            let img = match map {
                OrderMap::Beta => map_beta(&u)?,
                OrderMap::Eta => map_eta(&u)?,
            };
            let mut keys = img.support();
            match (keys.next(), keys.next()) {
                (Some(key), None) => Ok(key.clone()),
                _ => Err(Error::InvalidIndexSet(format!(
                    "image of {k} is not a single basis element"
                ))),
            }
        })
        .collect::<Result<_>>()?;
    let mut violations = Vec::new();
    let mut pairs = 0;
    for a in 0..basis.len() {
        for b in 0..basis.len() {
            pairs += 1;
            if wedge_index_cmp(&basis[a], &basis[b])? != wedge_index_cmp(&images[a], &images[b])? {
                violations.push((basis[a].clone(), basis[b].clone()));
            }
        }
    }
    Ok(OrderCheck {
        map,
        stage,
        pairs,
        violations,
    })
}

pub(crate) fn shrink_negative(stage: Stage) -> Result<Stage> {
    Stage::new(stage.neg - 1, stage.pos).map_err(|_| Error::StageTooSmall {
        stage,
        reason: "ξ needs at least two negative labels".into(),
    })
}

pub(crate) fn shrink_positive(stage: Stage) -> Result<Stage> {
    Stage::new(stage.neg, stage.pos - 1).map_err(|_| Error::StageTooSmall {
        stage,
        reason: "θ needs at least two positive labels".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{PrimeField, Rationals};

    fn s(raw: &[i32]) -> Vec<SignedIndex> {
        raw.iter().map(|&i| idx(i)).collect()
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(idx(-2)), 4);
        assert_eq!(mu(idx(1)), 1);
        assert_eq!(mu(idx(5)), 9);
        assert_eq!(SignedIndex::new(0), Err(Error::ZeroIndex));
        assert_eq!(SignedIndex::from_mu(4).unwrap(), idx(-2));
        assert_eq!(SignedIndex::from_mu(9).unwrap(), idx(5));
    }

    #[test]
    fn mu_is_a_bijection_on_a_large_window() {
        const N: i32 = 1_000_000;
        let mut seen = vec![false; 2 * N as usize + 1];
        for i in (-N..=N).filter(|&i| i != 0) {
            let m = mu(idx(i)) as usize;
            assert!(!seen[m], "μ collision at {i}");
            seen[m] = true;
        }
        assert!(!seen[0]);
        assert!(seen[1..].iter().all(|&b| b));
    }

    #[test]
    fn wedge_index_cmp_examples() {
        let a = WedgeIndex::of(&[1, -1]);
        let b = WedgeIndex::of(&[1, 2]);
        assert_eq!(a.mu_word(), vec![1, 2]);
        assert_eq!(b.mu_word(), vec![1, 3]);
        assert_eq!(wedge_index_cmp(&a, &b).unwrap(), Ordering::Less);
        assert_eq!(wedge_index_cmp(&a, &a).unwrap(), Ordering::Equal);
        let c = WedgeIndex::of(&[-1, 2]);
        assert_eq!(wedge_index_cmp(&c, &a).unwrap(), Ordering::Greater);
        assert!(wedge_index_cmp(&a, &WedgeIndex::of(&[1])).is_err());
    }

    #[test]
    fn wedge_index_rejects_unsorted() {
        assert!(WedgeIndex::new(s(&[2, 1])).is_err());
        assert!(WedgeIndex::new(s(&[1, 1])).is_err());
        assert!(WedgeIndex::from_set(s(&[1, 1])).is_err());
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(
            canonicalize(&s(&[1, 2])),
            Some((WedgeIndex::of(&[1, 2]), Sign::Plus))
        );
        assert_eq!(
            canonicalize(&s(&[2, 1])),
            Some((WedgeIndex::of(&[1, 2]), Sign::Minus))
        );
        assert_eq!(canonicalize(&s(&[1, 1])), None);
        assert_eq!(canonicalize(&s(&[3, -1, 1, 3])), None);
        assert_eq!(canonicalize(&s(&[1, 3, 1])), None);
        assert_eq!(canonicalize(&[]), Some((WedgeIndex::empty(), Sign::Plus)));
    }

    #[test]
    fn stage_basics() {
        let st = Stage::new(2, 3).unwrap();
        assert_eq!(st.symbols(), s(&[1, -1, 2, -2, 3]));
        assert_eq!(st.basis(2).len(), 10);
        assert!(st.basis(2).windows(2).all(|w| w[0] < w[1]));
        assert_eq!(st.basis(0), vec![WedgeIndex::empty()]);
        assert!(st.basis(6).is_empty());
        assert!(Stage::new(0, 1).is_err());
        assert_eq!("3,5".parse::<Stage>().unwrap(), Stage::new(3, 5).unwrap());
        assert!("3;5".parse::<Stage>().is_err());
        assert!(Stage::new(1, 2).unwrap().le(&st));
        assert!(!Stage::new(3, 1).unwrap().le(&st));
    }

    #[test]
    fn wedge_examples() {
        let q = Rationals;
        let st = Stage::new(1, 2).unwrap();
        let x =
            |i: i32| ExteriorElement::linear(&q, st, Side::Primal, &[(idx(i), q.one())]).unwrap();
        assert!(x(1).wedge(&x(1)).unwrap().is_zero());
        let w = x(2).wedge(&x(1)).unwrap();
        assert_eq!(w.coeff(&WedgeIndex::of(&[1, 2])), q.from_i64(-1));
        let w = x(-1).wedge(&x(1)).unwrap();
        assert_eq!(w.nnz(), 1);
        assert_eq!(w.coeff(&WedgeIndex::of(&[1, -1])), q.from_i64(-1));
    }

    #[test]
    fn wedge_rejects_mismatches() {
        let q = Rationals;
        let a = ExteriorElement::scalar(&q, Stage::new(1, 2).unwrap(), Side::Primal, q.one());
        let b = ExteriorElement::scalar(&q, Stage::new(2, 2).unwrap(), Side::Primal, q.one());
        let c = ExteriorElement::scalar(&q, Stage::new(1, 2).unwrap(), Side::Dual, q.one());
        assert!(matches!(a.wedge(&b), Err(Error::StageMismatch { .. })));
        assert_eq!(a.wedge(&c), Err(Error::SideMismatch));
    }

    #[test]
    fn pairing_examples() {
        let q = Rationals;
        let st = Stage::new(1, 2).unwrap();
        let cov = |terms: &[(i32, i64)]| {
            let t: Vec<_> = terms
                .iter()
                .map(|&(i, c)| (idx(i), q.from_i64(c)))
                .collect();
            ExteriorElement::linear(&q, st, Side::Dual, &t).unwrap()
        };
        let phi = cov(&[(1, 1)]).wedge(&cov(&[(2, 1)])).unwrap();
        assert_eq!(pairing(&phi, &s(&[1, 2])).unwrap(), q.one());
        assert_eq!(pairing(&phi, &s(&[2, 1])).unwrap(), q.from_i64(-1));
        let covs = [cov(&[(1, 1), (-1, 1)]), cov(&[(2, 1)])];
        let phi = wedge_all(&covs).unwrap();
        assert_eq!(pairing(&phi, &s(&[-1, 2])).unwrap(), q.one());
        assert_eq!(covector_pairing(&covs, &s(&[-1, 2])).unwrap(), q.one());
        assert!(pairing(&phi, &s(&[1])).is_err());
    }

    #[test]
    fn interior_examples() {
        let q = Rationals;
        let st = Stage::new(1, 3).unwrap();
        let xs =
            |i: i32| ExteriorElement::linear(&q, st, Side::Dual, &[(idx(i), q.one())]).unwrap();
        let c = xs(2).interior(idx(2)).unwrap();
        assert_eq!(c.degree(), 0);
        assert_eq!(c.coeff(&WedgeIndex::empty()), q.one());
        let w = xs(1).wedge(&xs(2)).unwrap();
        assert!(w.interior(idx(3)).unwrap().is_zero());
        let c = w.interior(idx(2)).unwrap();
        assert_eq!(c, xs(1).neg());
        let primal = ExteriorElement::linear(&q, st, Side::Primal, &[(idx(1), q.one())]).unwrap();
        assert_eq!(primal.interior(idx(1)), Err(Error::SideMismatch));
    }

    #[test]
    fn eta_and_beta_examples() {
        let f = PrimeField::new(7).unwrap();
        let st = Stage::new(1, 2).unwrap();
        let u =
            ExteriorElement::basis_element(&f, st, Side::Primal, WedgeIndex::of(&[1, 2])).unwrap();
        let e = map_eta(&u).unwrap();
        assert_eq!(e.stage(), Stage::new(2, 2).unwrap());
        assert_eq!(e.coeff(&WedgeIndex::of(&[1, 2])), 1);
        let b = map_beta(&u).unwrap();
        assert_eq!(b.stage(), Stage::new(1, 3).unwrap());
        assert_eq!(b.coeff(&WedgeIndex::of(&[1, 2, 3])), 1);
        assert!(map_beta(&ExteriorElement::zero(&f, st, 2, Side::Primal))
            .unwrap()
            .is_zero());

        let st31 = Stage::new(3, 1).unwrap();
        let u = ExteriorElement::basis_element(&f, st31, Side::Primal, WedgeIndex::of(&[-3, 1]))
            .unwrap();
        let b = map_beta(&u).unwrap();
        assert_eq!(b.coeff(&WedgeIndex::of(&[1, 2, -3])), f.from_i64(-1));
        let u =
            ExteriorElement::basis_element(&f, st, Side::Primal, WedgeIndex::of(&[-1, 1])).unwrap();
        assert_eq!(map_eta(&u).unwrap().coeff(&WedgeIndex::of(&[-1, 1])), 1);
    }

    #[test]
    fn xi_and_theta_examples() {
        let q = Rationals;
        let st = Stage::new(2, 2).unwrap();
        let c = q.from_i64(5);
        let omega = ExteriorElement::from_terms(
            &q,
            st,
            2,
            Side::Dual,
            [(s(&[1, 2]), q.one()), (s(&[-2, 1]), c)],
        )
        .unwrap();
        let x = map_xi(&omega).unwrap();
        assert_eq!(x.stage(), Stage::new(1, 2).unwrap());
        assert_eq!(x.nnz(), 1);
        assert_eq!(x.coeff(&WedgeIndex::of(&[1, 2])), q.one());

        let st3 = Stage::new(1, 3).unwrap();
        let full = ExteriorElement::basis_element(&q, st3, Side::Dual, WedgeIndex::of(&[1, 2, 3]))
            .unwrap();
        let t = map_theta(&full).unwrap();
        assert_eq!(t.stage(), Stage::new(1, 2).unwrap());
        assert_eq!(t.coeff(&WedgeIndex::of(&[1, 2])), q.one());
        let no3 = ExteriorElement::basis_element(&q, st3, Side::Dual, WedgeIndex::of(&[-1, 1, 2]))
            .unwrap();
        assert!(map_theta(&no3).unwrap().is_zero());

        assert!(map_xi(&ExteriorElement::zero(
            &q,
            Stage::new(1, 2).unwrap(),
            2,
            Side::Dual
        ))
        .is_err());
    }

    #[test]
    fn json_terms() {
        let q = Rationals;
        let st = Stage::new(1, 2).unwrap();
        let e = ExteriorElement::from_terms(
            &q,
            st,
            2,
            Side::Dual,
            [(s(&[2, -1]), q.parse("1/2").unwrap())],
        )
        .unwrap();
        let j = serde_json::to_string(&e.to_json()).unwrap();
        assert_eq!(j, r#"[{"indexList":[-1,2],"coeff":"-1/2"}]"#);
    }

    #[test]
    fn beta_and_eta_preserve_order() {
        let f = PrimeField::new(2).unwrap();
        for n in 1..=4 {
            for p in 1..=4 {
                let stage = Stage::new(n, p).unwrap();
                for map in [OrderMap::Beta, OrderMap::Eta] {
                    let r = order_check(&f, stage, map).unwrap();
                    assert!(r.violations.is_empty(), "{map:?} at {stage}");
                    let d = stage.basis(p as usize).len();
                    assert_eq!(r.pairs, d * d);
                }
            }
        }
    }

    fn stages_up_to(n: u32, p: u32) -> Vec<Stage> {
        (1..=n)
            .flat_map(|a| (1..=p).map(move |b| Stage::new(a, b).unwrap()))
            .collect()
    }

    #[test]
    fn xi_is_adjoint_to_eta() {
        let q = Rationals;
        for stage in stages_up_to(3, 3) {
            let big = stage.with_extra_negative();
            for d in 0..=stage.pos() as usize {
                for wk in big.basis(d) {
                    let w = ExteriorElement::basis_element(&q, big, Side::Dual, wk).unwrap();
                    let xw = map_xi(&w).unwrap();
                    for uk in stage.basis(d) {
                        let u =
                            ExteriorElement::basis_element(&q, stage, Side::Primal, uk).unwrap();
                        assert_eq!(
                            pair(&xw, &u).unwrap(),
                            pair(&w, &map_eta(&u).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn theta_is_adjoint_to_beta_up_to_a_sign() {
        let q = Rationals;
        for stage in stages_up_to(3, 3) {
            let big = stage.with_extra_positive();
            let p = stage.pos() as usize;
            // ⟨θω, u⟩ = (-1)^p ⟨ω, u ∧ x_{p+1}⟩ on degree-p elements
            let c = Sign::from_parity(p % 2 == 1);
            for wk in big.basis(p + 1) {
                let w = ExteriorElement::basis_element(&q, big, Side::Dual, wk).unwrap();
                let tw = map_theta(&w).unwrap();
                for uk in stage.basis(p) {
                    let u = ExteriorElement::basis_element(&q, stage, Side::Primal, uk).unwrap();
                    let rhs = pair(&w, &map_beta(&u).unwrap()).unwrap();
                    assert_eq!(pair(&tw, &u).unwrap(), c.apply(&q, &rhs));
                }
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        const STAGE: Stage = Stage { neg: 3, pos: 3 };

        fn element(side: Side) -> impl Strategy<Value = ExteriorElement<PrimeField>> {
            (0usize..=3).prop_flat_map(move |d| {
                let n = STAGE.basis(d).len();
                proptest::collection::vec(0u64..13, n).prop_map(move |c| {
                    let f = PrimeField::new(13).unwrap();
                    let terms = STAGE
                        .basis(d)
                        .into_iter()
                        .map(|k| k.indices().to_vec())
                        .zip(c);
                    ExteriorElement::from_terms(&f, STAGE, d, side, terms).unwrap()
                })
            })
        }

        fn covector() -> impl Strategy<Value = ExteriorElement<PrimeField>> {
            proptest::collection::vec(0u64..13, 6).prop_map(|c| {
                let f = PrimeField::new(13).unwrap();
                let terms: Vec<_> = STAGE.symbols().into_iter().zip(c).collect();
                ExteriorElement::linear(&f, STAGE, Side::Dual, &terms).unwrap()
            })
        }

        fn fits(a: &ExteriorElement<PrimeField>, b: &ExteriorElement<PrimeField>) -> bool {
            a.degree() + b.degree() <= STAGE.symbol_count()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(500))]

            #[test]
            fn wedge_is_associative(
                a in element(Side::Primal),
                b in element(Side::Primal),
                c in element(Side::Primal),
            ) {
                prop_assume!(a.degree() + b.degree() + c.degree() <= STAGE.symbol_count());
                let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
                let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
                prop_assert_eq!(left, right);
            }

            #[test]
            fn wedge_is_graded_anticommutative(a in element(Side::Primal), b in element(Side::Primal)) {
                prop_assume!(fits(&a, &b));
                let ab = a.wedge(&b).unwrap();
                let ba = b.wedge(&a).unwrap();
                let expected = if a.degree() * b.degree() % 2 == 1 { ba.neg() } else { ba };
                prop_assert_eq!(ab, expected);
            }

            #[test]
            fn interior_is_a_graded_derivation(
                a in proptest::collection::vec(covector(), 1..3),
                g in proptest::collection::vec(covector(), 1..3),
                v in 0usize..6,
            ) {
                let v = STAGE.symbols()[v];
                let alpha = wedge_all(&a).unwrap();
                let gamma = wedge_all(&g).unwrap();
                let lhs = alpha.wedge(&gamma).unwrap().interior(v).unwrap();
                let first = alpha.interior(v).unwrap().wedge(&gamma).unwrap();
                let second = alpha.wedge(&gamma.interior(v).unwrap()).unwrap();
                let second = if alpha.degree() % 2 == 1 { second.neg() } else { second };
                prop_assert_eq!(lhs, first.add(&second).unwrap());
            }

            #[test]
            fn wedge_of_covectors_pairs_as_a_determinant(
                c in proptest::collection::vec(covector(), 3),
                u in Just(()).prop_flat_map(|_| proptest::sample::subsequence(STAGE.symbols(), 3)).prop_shuffle(),
            ) {
                let w = wedge_all(&c).unwrap();
                prop_assert_eq!(pairing(&w, &u).unwrap(), covector_pairing(&c, &u).unwrap());
            }
        }
    }
}
