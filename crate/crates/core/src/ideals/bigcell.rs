//! Restriction of coordinate-ring elements to the big cell, as exact
//! polynomials in the parameters `α_i^j`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::Result;
use crate::exterior::{canonicalize, Stage, WedgeIndex};
use crate::grassmann::{lemma5_columns, lemma5_sign, split_labels, AlphaMatrix};
use crate::scalars::Field;
use crate::symmetry::Monomial;

use super::Polynomial;

/// Polynomial in the `n·p` variables `α_i^j`, stored as exponent vectors
/// (variable `α_i^j` at slot `(i-1)·n + (j-1)`).
#[derive(Clone)]
pub struct AlphaPoly<F: Field> {
    field: F,
    stage: Stage,
    terms: BTreeMap<Vec<u8>, F::Elem>,
}

impl<F: Field> AlphaPoly<F> {
    fn nvars(stage: Stage) -> usize {
        (stage.neg() * stage.pos()) as usize
    }

    pub fn zero(field: &F, stage: Stage) -> Self {
        AlphaPoly {
            field: field.clone(),
            stage,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &F, stage: Stage, c: F::Elem) -> Self {
        let mut out = Self::zero(field, stage);
        out.add_term(vec![0; Self::nvars(stage)], c);
        out
    }

    pub fn one(field: &F, stage: Stage) -> Self {
        Self::constant(field, stage, field.one())
    }

    /// The variable `α_i^j`.
    pub fn var(field: &F, stage: Stage, i: u32, j: u32) -> Self {
        assert!((1..=stage.pos()).contains(&i) && (1..=stage.neg()).contains(&j));
        let mut e = vec![0u8; Self::nvars(stage)];
        e[((i - 1) * stage.neg() + (j - 1)) as usize] = 1;
        let mut out = Self::zero(field, stage);
        out.add_term(e, field.one());
        out
    }

    fn add_term(&mut self, e: Vec<u8>, c: F::Elem) {
        let f = &self.field;
        if f.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = f.add(v, &c);
                if f.is_zero(v) {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &F::Elem)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let mut out = Self::zero(&self.field, self.stage);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), self.field.mul(v, c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = &self.field;
        let mut out = Self::zero(f, self.stage);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, f.mul(ca, cb));
            }
        }
        out
    }

    /// Value at concrete parameters.
    pub fn evaluate(&self, alpha: &AlphaMatrix<F>) -> F::Elem {
        let f = &self.field;
        let n = self.stage.neg();
        let mut acc = f.zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (slot, &k) in e.iter().enumerate() {
                let (i, j) = (slot as u32 / n + 1, slot as u32 % n + 1);
                for _ in 0..k {
                    term = f.mul(&term, alpha.get(i, j));
                }
            }
            acc = f.add(&acc, &term);
        }
        acc
    }
}

impl<F: Field> PartialEq for AlphaPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.stage == other.stage && self.terms == other.terms
    }
}

impl<F: Field> Eq for AlphaPoly<F> {}

impl<F: Field> fmt::Debug for AlphaPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.stage.neg() as usize;
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", self.field.format(c))?;
            for (slot, &p) in e.iter().enumerate().filter(|(_, p)| **p > 0) {
                write!(f, "·a{}^{}", slot / n + 1, slot % n + 1)?;
                if p > 1 {
                    write!(f, "**{p}")?;
                }
            }
        }
        Ok(())
    }
}

/// Determinant by expansion along the first row, with symbolic entries.
fn symbolic_det<F: Field>(field: &F, stage: Stage, m: &[Vec<AlphaPoly<F>>]) -> AlphaPoly<F> {
    let k = m.len();
    if k == 0 {
        return AlphaPoly::one(field, stage);
    }
    let mut acc = AlphaPoly::zero(field, stage);
    for c in 0..k {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<AlphaPoly<F>>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(cc, _)| *cc != c)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = m[0][c].mul(&symbolic_det(field, stage, &minor));
        acc = if c % 2 == 1 {
            acc.add(&term.scale(&field.neg(&field.one())))
        } else {
            acc.add(&term)
        };
    }
    acc
}

/// Big-cell value of the variable `X_S`: the signed minor of the symbolic
/// `α` for the negatives of `S` against the complement of its positives,
/// corrected by the sign that sorts the negatives-first word into μ-order.
pub fn restrict_variable<F: Field>(
    field: &F,
    stage: Stage,
    s: &WedgeIndex,
) -> Result<AlphaPoly<F>> {
    let mut negatives: Vec<u32> = s
        .indices()
        .iter()
        .filter(|i| i.is_negative())
        .map(|i| i.get().unsigned_abs())
        .collect();
    negatives.sort_unstable();
    let positives: Vec<u32> = s
        .indices()
        .iter()
        .filter(|i| !i.is_negative())
        .map(|i| i.get() as u32)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let cols = lemma5_columns(stage, &negatives, &positives)?;
    let rows: Vec<Vec<AlphaPoly<F>>> = negatives
        .iter()
        .map(|&nj| {
            cols.iter()
                .map(|&m| AlphaPoly::var(field, stage, m, nj))
                .collect()
        })
        .collect();
    let det = symbolic_det(field, stage, &rows);
    let (_, reorder) =
        canonicalize(&split_labels(&negatives, &positives)).expect("distinct labels");
    let negate = lemma5_sign(stage.pos(), &positives) != reorder.is_minus();
    Ok(if negate {
        det.scale(&field.neg(&field.one()))
    } else {
        det
    })
}

/// Product of the restrictions of the factors of `m`.
pub fn bigcell_restriction<F: Field>(field: &F, m: &Monomial) -> Result<AlphaPoly<F>> {
    let stage = m.stage();
    let mut out = AlphaPoly::one(field, stage);
    for w in m.factors() {
        out = out.mul(&restrict_variable(field, stage, w)?);
    }
    Ok(out)
}

/// Restriction of a polynomial; monomial restrictions are memoized in `cache`.
pub fn restrict_polynomial<F: Field>(
    p: &Polynomial<F>,
    cache: &mut HashMap<Monomial, AlphaPoly<F>>,
) -> Result<AlphaPoly<F>> {
    let f = p.field();
    let mut out = AlphaPoly::zero(f, p.stage());
    for (m, c) in p.terms() {
        if !cache.contains_key(m) {
            cache.insert(m.clone(), bigcell_restriction(f, m)?);
        }
        out = out.add(&cache[m].scale(c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{big_cell_point, pluecker_relations};
    use crate::scalars::{PrimeField, Rationals};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn st(n: u32, p: u32) -> Stage {
        Stage::new(n, p).unwrap()
    }

    #[test]
    fn restriction_examples() {
        let q = Rationals;
        let stage = st(1, 2);
        let base = Monomial::of(stage, &[&[1, 2]]);
        assert_eq!(
            bigcell_restriction(&q, &base).unwrap(),
            AlphaPoly::one(&q, stage)
        );
        let x = Monomial::of(stage, &[&[-1, 2]]);
        assert_eq!(
            bigcell_restriction(&q, &x).unwrap(),
            AlphaPoly::var(&q, stage, 1, 1)
        );
        let y = Monomial::of(stage, &[&[1, -1]]);
        assert_eq!(
            bigcell_restriction(&q, &y).unwrap(),
            AlphaPoly::var(&q, stage, 2, 1)
        );
    }

    #[test]
    fn restriction_matches_numeric_big_cell() {
        let f = PrimeField::new(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for stage in [st(2, 2), st(2, 3), st(3, 3), st(3, 2)] {
            for _ in 0..5 {
                let alpha = AlphaMatrix::random(&f, stage, &mut rng);
                let pt = big_cell_point(&alpha);
                for key in stage.basis(stage.pos() as usize) {
                    let r = restrict_variable(&f, stage, &key).unwrap();
                    assert_eq!(
                        r.evaluate(&alpha),
                        pt.coordinate(&key),
                        "{key:?} at {stage}"
                    );
                }
            }
        }
    }

    #[test]
    fn restriction_is_multiplicative() {
        let q = Rationals;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let stage = st(2, 3);
        for _ in 0..30 {
            let a = Monomial::random(stage, 2, &mut rng);
            let b = Monomial::random(stage, 1, &mut rng);
            let prod = bigcell_restriction(&q, &a.mul(&b).unwrap()).unwrap();
            let ra = bigcell_restriction(&q, &a).unwrap();
            let rb = bigcell_restriction(&q, &b).unwrap();
            assert_eq!(prod, ra.mul(&rb));
        }
    }

    #[test]
    fn pluecker_quadrics_restrict_to_zero() {
        for stage in [st(2, 2), st(2, 3), st(3, 3)] {
            let q = Rationals;
            let mut cache = HashMap::new();
            for r in pluecker_relations(&q, stage) {
                assert!(restrict_polynomial(&r, &mut cache).unwrap().is_zero());
            }
            let f = PrimeField::new(2).unwrap();
            let mut cache = HashMap::new();
            for r in pluecker_relations(&f, stage) {
                assert!(restrict_polynomial(&r, &mut cache).unwrap().is_zero());
            }
        }
    }
}
