use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exterior::{ExteriorElement, Side, Stage};
use crate::scalars::Field;
use crate::symmetry::Monomial;

/// Element of the stage coordinate ring `S•(∧^p V)`: a sparse map from
/// [`Monomial`] to coefficient, without stored zeros.
#[derive(Clone)]
pub struct Polynomial<F: Field> {
    field: F,
    stage: Stage,
    terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> Polynomial<F> {
    pub fn zero(field: &F, stage: Stage) -> Self {
        Polynomial {
            field: field.clone(),
            stage,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(field: &F, m: Monomial) -> Self {
        let mut p = Self::zero(field, m.stage());
        p.add_term(m, field.one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, F::Elem)>>(
        field: &F,
        stage: Stage,
        terms: I,
    ) -> Result<Self> {
        let mut p = Self::zero(field, stage);
        for (m, c) in terms {
            if m.stage() != stage {
                return Err(Error::StageMismatch {
                    left: stage,
                    right: m.stage(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, m: Monomial, c: F::Elem) {
        debug_assert_eq!(m.stage(), self.stage);
        let f = &self.field;
        if f.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = f.add(v, &c);
                if f.is_zero(v) {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn stage(&self) -> Stage {
        self.stage
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F::Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> F::Elem {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Largest monomial in the term order.
    pub fn leading(&self) -> Option<(&Monomial, &F::Elem)> {
        self.terms.iter().next_back()
    }

    pub fn is_homogeneous(&self, degree: usize) -> bool {
        self.terms.keys().all(|m| m.degree() == degree)
    }

    fn check_stage(&self, other: &Self) -> Result<()> {
        if self.stage != other.stage {
            return Err(Error::StageMismatch {
                left: self.stage,
                right: other.stage,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_stage(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let mut out = Self::zero(&self.field, self.stage);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), self.field.mul(v, c));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&self.field.neg(&self.field.one())))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_stage(other)?;
        let f = &self.field;
        let mut out = Self::zero(f, self.stage);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb)?, f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = self.field.inv(c).expect("stored coefficients are nonzero");
                self.scale(&inv)
            }
        }
    }

    /// Value at a dual coordinate vector: each variable `X_S` reads the
    /// coordinate at `S`.
    pub fn evaluate(&self, point: &ExteriorElement<F>) -> Result<F::Elem> {
        if point.side() != Side::Dual {
            return Err(Error::SideMismatch);
        }
        if point.stage() != self.stage {
            return Err(Error::StageMismatch {
                left: self.stage,
                right: point.stage(),
            });
        }
        let f = &self.field;
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for w in m.factors() {
                term = f.mul(&term, &point.coeff(w));
                if f.is_zero(&term) {
                    break;
                }
            }
            acc = f.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Coefficients as formatted strings, for reports.
    pub fn to_json(&self) -> Vec<(Vec<Vec<i32>>, String)> {
        self.terms
            .iter()
            .map(|(m, c)| (m.to_sets(), self.field.format(c)))
            .collect()
    }
}

impl<F: Field> PartialEq for Polynomial<F> {
    fn eq(&self, other: &Self) -> bool {
        self.stage == other.stage && self.terms == other.terms
    }
}

impl<F: Field> Eq for Polynomial<F> {}

impl<F: Field> fmt::Debug for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·{m:?}", self.field.format(c))?;
        }
        Ok(())
    }
}
