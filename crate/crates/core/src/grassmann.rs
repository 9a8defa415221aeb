//! The affine cone over `Gr(p, V*_{n,p})` at a stage.
//!
//! A [`ConePoint`] is a dual coordinate vector of degree `p`: its coordinate
//! at `S` is the value of the `p`-form on `x_S` (labels in μ-order).
//! Decomposability is decided by the quadratic shuffle relations.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{
    canonicalize, map_theta, map_xi, wedge_all, ExteriorElement, Side, SignedIndex, Stage,
    WedgeIndex,
};
use crate::ideals::Polynomial;
use crate::linalg::Matrix;
use crate::scalars::Field;
use crate::symmetry::{act_on_wedge, Monomial, Permutation};

/// Quadratic Plücker relation, as a degree-2 polynomial in the `X_S`.
pub type PlueckerRelation<F> = Polynomial<F>;

/// JSON form of one coordinate: `{"set": [...], "value": "..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordJson {
    pub set: Vec<i32>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConePoint<F: Field> {
    coords: ExteriorElement<F>,
}

impl<F: Field> ConePoint<F> {
    /// Wraps a dual element of degree `p` without checking the relations;
    /// call [`ConePoint::validate`] when the source is untrusted.
    pub fn new_unchecked(coords: ExteriorElement<F>) -> Result<Self> {
        if coords.side() != Side::Dual {
            return Err(Error::SideMismatch);
        }
        let p = coords.stage().pos() as usize;
        if coords.degree() != p {
            return Err(Error::DegreeMismatch {
                left: coords.degree(),
                right: p,
            });
        }
        Ok(ConePoint { coords })
    }

    /// Wraps and validates.
    pub fn new(coords: ExteriorElement<F>) -> Result<Self> {
        let pt = Self::new_unchecked(coords)?;
        pt.validate()?;
        Ok(pt)
    }

    pub fn zero(field: &F, stage: Stage) -> Self {
        ConePoint {
            coords: ExteriorElement::zero(field, stage, stage.pos() as usize, Side::Dual),
        }
    }

    /// `x_1* ∧ ⋯ ∧ x_p*`.
    pub fn base_point(field: &F, stage: Stage) -> Self {
        let key = WedgeIndex::from_set((1..=stage.pos() as i32).map(crate::exterior::idx))
            .expect("distinct labels");
        ConePoint {
            coords: ExteriorElement::basis_element(field, stage, Side::Dual, key)
                .expect("fits stage"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if is_cone_point(&self.coords)? {
            Ok(())
        } else {
            Err(Error::NotDecomposable)
        }
    }

    pub fn coords(&self) -> &ExteriorElement<F> {
        &self.coords
    }

    pub fn into_coords(self) -> ExteriorElement<F> {
        self.coords
    }

    pub fn stage(&self) -> Stage {
        self.coords.stage()
    }

    pub fn field(&self) -> &F {
        self.coords.field()
    }

    pub fn coordinate(&self, key: &WedgeIndex) -> F::Elem {
        self.coords.coeff(key)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn scale(&self, t: &F::Elem) -> Self {
        ConePoint {
            coords: self.coords.scale(t),
        }
    }

    pub fn to_json(&self) -> Vec<CoordJson> {
        self.coords
            .terms()
            .map(|(k, v)| CoordJson {
                set: k.to_ints(),
                value: self.field().format(v),
            })
            .collect()
    }
}

/// Plücker coordinates of the row space of `m` (`p` rows, columns in the
/// μ-order of the stage labels). Rank-deficient input gives the zero point.
pub fn pluecker_from_matrix<F: Field>(m: &Matrix<F>, stage: Stage) -> Result<ConePoint<F>> {
    let p = stage.pos() as usize;
    let ncols = stage.symbol_count();
    if m.rows() != p || m.cols() != ncols {
        return Err(Error::DimensionMismatch {
            rows: m.rows(),
            cols: m.cols(),
            expected_rows: p,
            expected_cols: ncols,
        });
    }
    let f = m.field();
    let symbols = stage.symbols();
    let rows: Vec<usize> = (0..p).collect();
    let mut coeffs = std::collections::BTreeMap::new();
    for key in stage.basis(p) {
        let cols: Vec<usize> = key
            .indices()
            .iter()
            .map(|i| symbols.binary_search(i).expect("key fits stage"))
            .collect();
        let d = m.submatrix(&rows, &cols).determinant()?;
        if !f.is_zero(&d) {
            coeffs.insert(key, d);
        }
    }
    Ok(ConePoint {
        coords: ExteriorElement::from_map(f, stage, p, Side::Dual, coeffs),
    })
}

/// Uniformly random `p × (n+p)` matrix over the field.
pub fn random_matrix<F: Field, R: Rng + ?Sized>(field: &F, stage: Stage, rng: &mut R) -> Matrix<F> {
    let rows = (0..stage.pos())
        .map(|_| {
            (0..stage.symbol_count())
                .map(|_| field.random(rng))
                .collect()
        })
        .collect();
    Matrix::from_rows(field, rows).expect("rectangular")
}

pub fn random_point<F: Field, R: Rng + ?Sized>(
    field: &F,
    stage: Stage,
    rng: &mut R,
) -> ConePoint<F> {
    pluecker_from_matrix(&random_matrix(field, stage, rng), stage).expect("shape matches stage")
}

/// Calls `visit` with the signed terms of every (p-1, p+1) shuffle relation:
/// for `I` of size `p-1` and `J = (j_0 < ⋯ < j_p)`,
/// `Σ_k (-1)^k X_{I ∪ j_k} X_{J ∖ j_k}`. Stops early if `visit` returns false.
fn for_each_shuffle<V>(stage: Stage, degree: usize, mut visit: V)
where
    V: FnMut(&[(WedgeIndex, WedgeIndex, bool)]) -> bool,
{
    if degree < 2 || degree + 1 > stage.symbol_count() {
        return;
    }
    let small = stage.basis(degree - 1);
    let large = stage.basis(degree + 1);
    let mut terms = Vec::with_capacity(degree + 1);
    for i in &small {
        for j in &large {
            terms.clear();
            for (k, &jk) in j.indices().iter().enumerate() {
                if i.contains(jk) {
                    continue;
                }
                let mut raw = i.indices().to_vec();
                raw.push(jk);
                let (left, sign) = canonicalize(&raw).expect("jk not in I");
                let right = j.without(jk).expect("jk in J");
                let negative = (k % 2 == 1) != sign.is_minus();
                terms.push((left, right, negative));
            }
            if !terms.is_empty() && !visit(&terms) {
                return;
            }
        }
    }
}

/// The (p-1, p+1) shuffle relations of the stage, expanded, with zero
/// relations dropped and duplicates (up to scaling) removed.
pub fn pluecker_relations<F: Field>(field: &F, stage: Stage) -> Vec<PlueckerRelation<F>> {
    let p = stage.pos() as usize;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for_each_shuffle(stage, p, |terms| {
        let mut poly = Polynomial::zero(field, stage);
        for (left, right, negative) in terms {
            let m = Monomial::new(stage, vec![left.clone(), right.clone()]).expect("degree-p keys");
            poly.add_term(m, field.sign(*negative));
        }
        if !poly.is_zero() {
            let key: Vec<(Monomial, F::Elem)> = poly
                .monic()
                .terms()
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect();
            if seen.insert(key) {
                out.push(poly);
            }
        }
        true
    });
    out
}

/// `true` iff every shuffle relation vanishes at `v` (so the zero vector is a
/// cone point).
pub fn is_cone_point<F: Field>(v: &ExteriorElement<F>) -> Result<bool> {
    if v.side() != Side::Dual {
        return Err(Error::SideMismatch);
    }
    let f = v.field();
    let mut ok = true;
    for_each_shuffle(v.stage(), v.degree(), |terms| {
        let mut acc = f.zero();
        for (left, right, negative) in terms {
            let prod = f.mul(&v.coeff(left), &v.coeff(right));
            acc = if *negative {
                f.sub(&acc, &prod)
            } else {
                f.add(&acc, &prod)
            };
        }
        ok = f.is_zero(&acc);
        ok
    });
    Ok(ok)
}

/// Big-cell parameters `α_i^j`, `1 ≤ i ≤ p`, `1 ≤ j ≤ n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaMatrix<F: Field> {
    field: F,
    stage: Stage,
    entries: Vec<F::Elem>,
}

impl<F: Field> AlphaMatrix<F> {
    pub fn zero(field: &F, stage: Stage) -> Self {
        let len = (stage.pos() * stage.neg()) as usize;
        AlphaMatrix {
            field: field.clone(),
            stage,
            entries: vec![field.zero(); len],
        }
    }

    /// `rows[i-1][j-1] = α_i^j`.
    pub fn from_rows(field: &F, stage: Stage, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        let (p, n) = (stage.pos() as usize, stage.neg() as usize);
        if rows.len() != p || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                rows: rows.len(),
                cols: rows.first().map_or(0, Vec::len),
                expected_rows: p,
                expected_cols: n,
            });
        }
        Ok(AlphaMatrix {
            field: field.clone(),
            stage,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn random<R: Rng + ?Sized>(field: &F, stage: Stage, rng: &mut R) -> Self {
        let mut a = Self::zero(field, stage);
        for e in a.entries.iter_mut() {
            *e = field.random(rng);
        }
        a
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// `α_i^j`.
    pub fn get(&self, i: u32, j: u32) -> &F::Elem {
        assert!((1..=self.stage.pos()).contains(&i) && (1..=self.stage.neg()).contains(&j));
        &self.entries[((i - 1) * self.stage.neg() + (j - 1)) as usize]
    }

    pub fn set(&mut self, i: u32, j: u32, v: F::Elem) {
        assert!((1..=self.stage.pos()).contains(&i) && (1..=self.stage.neg()).contains(&j));
        let k = ((i - 1) * self.stage.neg() + (j - 1)) as usize;
        self.entries[k] = v;
    }

    /// Shifted covectors `x_i* + Σ_j α_i^j x_{-j}*`.
    pub fn covectors(&self) -> Vec<ExteriorElement<F>> {
        let f = &self.field;
        (1..=self.stage.pos())
            .map(|i| {
                let mut terms = vec![(crate::exterior::idx(i as i32), f.one())];
                for j in 1..=self.stage.neg() {
                    terms.push((crate::exterior::idx(-(j as i32)), self.get(i, j).clone()));
                }
                ExteriorElement::linear(f, self.stage, Side::Dual, &terms)
                    .expect("labels fit stage")
            })
            .collect()
    }
}

/// `g(x_1* ∧ ⋯ ∧ x_p*)` for `g` in the big cell with parameters `α`,
/// expanded as the wedge of the shifted covectors.
pub fn big_cell_point<F: Field>(alpha: &AlphaMatrix<F>) -> ConePoint<F> {
    let coords = wedge_all(&alpha.covectors()).expect("p covectors at a stage with p labels");
    ConePoint { coords }
}

fn strictly_increasing(v: &[u32]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// Validates a split `(negatives, positives)` and returns the complementary
/// column set `{1..p} ∖ positives`.
pub(crate) fn lemma5_columns(
    stage: Stage,
    negatives: &[u32],
    positives: &[u32],
) -> Result<Vec<u32>> {
    let (n, p) = (stage.neg(), stage.pos());
    let q = negatives.len();
    if !strictly_increasing(negatives) || !strictly_increasing(positives) {
        return Err(Error::InvalidIndexSet(
            "index lists must be strictly increasing".into(),
        ));
    }
    if negatives.iter().any(|&j| j == 0 || j > n) {
        return Err(Error::InvalidIndexSet(format!(
            "negatives must lie in 1..={n}"
        )));
    }
    if positives.iter().any(|&d| d == 0 || d > p) {
        return Err(Error::InvalidIndexSet(format!(
            "positives must lie in 1..={p}"
        )));
    }
    if q + positives.len() != p as usize {
        return Err(Error::InvalidIndexSet(format!(
            "{q} negatives and {} positives do not make degree {p}",
            positives.len()
        )));
    }
    Ok((1..=p).filter(|m| !positives.contains(m)).collect())
}

/// Sign from moving rows `d_1 < ⋯ < d_{p-q}` of the `p × p` evaluation
/// matrix to the bottom, keeping their order:
/// `(-1)^{Σ_k (p - d_k - (p - q - k))}` with `k` counted from 1.
pub fn lemma5_sign(p: u32, positives: &[u32]) -> bool {
    let r = positives.len() as i64;
    let moves: i64 = positives
        .iter()
        .enumerate()
        .map(|(k0, &d)| p as i64 - d as i64 - (r - (k0 as i64 + 1)))
        .sum();
    moves.rem_euclid(2) == 1
}

/// Value of the big-cell point on `x_{-n_1} ∧ ⋯ ∧ x_{-n_q} ∧ x_{d_1} ∧ ⋯ ∧ x_{d_{p-q}}`
/// (negatives first), computed as a signed `q × q` minor of `α` on rows
/// `n_i` and columns `{1..p} ∖ {d_k}`.
pub fn lemma5_coordinate<F: Field>(
    alpha: &AlphaMatrix<F>,
    negatives: &[u32],
    positives: &[u32],
) -> Result<F::Elem> {
    let stage = alpha.stage;
    let cols = lemma5_columns(stage, negatives, positives)?;
    let f = &alpha.field;
    let rows: Vec<Vec<F::Elem>> = negatives
        .iter()
        .map(|&nj| cols.iter().map(|&m| alpha.get(m, nj).clone()).collect())
        .collect();
    let det = if rows.is_empty() {
        f.one()
    } else {
        Matrix::from_rows(f, rows)?.determinant()?
    };
    Ok(if lemma5_sign(stage.pos(), positives) {
        f.neg(&det)
    } else {
        det
    })
}

/// Negatives-first label list for a split.
pub fn split_labels(negatives: &[u32], positives: &[u32]) -> Vec<SignedIndex> {
    negatives
        .iter()
        .map(|&j| crate::exterior::idx(-(j as i32)))
        .chain(positives.iter().map(|&d| crate::exterior::idx(d as i32)))
        .collect()
}

/// Every valid `(negatives, positives)` split at a stage.
pub fn all_splits(stage: Stage) -> Vec<(Vec<u32>, Vec<u32>)> {
    let (n, p) = (stage.neg(), stage.pos());
    let mut out = Vec::new();
    for q in 0..=n.min(p) {
        for negs in subsets(n, q) {
            for pos in subsets(p, p - q) {
                out.push((negs.clone(), pos));
            }
        }
    }
    out
}

/// k-subsets of `{1..n}` in lexicographic order.
fn subsets(n: u32, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: u32, k: u32, start: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() as u32 == k {
            out.push(cur.clone());
            return;
        }
        for s in start..=n {
            cur.push(s);
            rec(n, k, s + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 1, &mut cur, &mut out);
    out
}

/// θ̃: cone at `(n, p+1)` to cone at `(n, p)`.
pub fn theta_tilde<F: Field>(omega: &ConePoint<F>) -> Result<ConePoint<F>> {
    omega.validate()?;
    ConePoint::new_unchecked(map_theta(&omega.coords)?)
}

/// ξ̃: cone at `(n+1, p)` to cone at `(n, p)`.
pub fn xi_tilde<F: Field>(omega: &ConePoint<F>) -> Result<ConePoint<F>> {
    omega.validate()?;
    ConePoint::new_unchecked(map_xi(&omega.coords)?)
}

/// Permutation-matrix action on dual coordinates:
/// `σ(x_{s_1}* ∧ ⋯) = x_{σ s_1}* ∧ ⋯`, re-sorted with sign.
pub fn act_on_point<F: Field>(sigma: &Permutation, omega: &ConePoint<F>) -> Result<ConePoint<F>> {
    let stage = omega.stage();
    let f = omega.field();
    let mut coeffs = std::collections::BTreeMap::new();
    for (k, v) in omega.coords.terms() {
        let (img, sign) = act_on_wedge(sigma, k, &stage)?;
        coeffs.insert(img, sign.apply(f, v));
    }
    Ok(ConePoint {
        coords: ExteriorElement::from_map(f, stage, stage.pos() as usize, Side::Dual, coeffs),
    })
}

/// Both paths around the square from `(n+1, p+1)` to `(n, p)`:
/// `(ξ̃ ∘ θ̃ ω, θ̃ ∘ ξ̃ ω)`.
pub fn diagram_paths<F: Field>(omega: &ConePoint<F>) -> Result<(ConePoint<F>, ConePoint<F>)> {
    let left = xi_tilde(&theta_tilde(omega)?)?;
    let right = theta_tilde(&xi_tilde(omega)?)?;
    Ok((left, right))
}

/// Every cone point at a stage over a finite field, by exhaustive
/// enumeration of coordinate vectors. `None` for infinite fields or when the
/// sweep would exceed `limit` vectors.
pub fn enumerate_cone_points<F: Field>(
    field: &F,
    stage: Stage,
    limit: u64,
) -> Result<Option<Vec<ConePoint<F>>>> {
    let Some(elems) = field.elements() else {
        return Ok(None);
    };
    let p = stage.pos() as usize;
    let keys = stage.basis(p);
    let q = elems.len() as u64;
    let total = match q.checked_pow(keys.len() as u32) {
        Some(t) if t <= limit => t,
        _ => return Ok(None),
    };
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut coeffs = std::collections::BTreeMap::new();
        for key in &keys {
            let v = &elems[(c % q) as usize];
            c /= q;
            if !field.is_zero(v) {
                coeffs.insert(key.clone(), v.clone());
            }
        }
        let v = ExteriorElement::from_map(field, stage, p, Side::Dual, coeffs);
        if is_cone_point(&v)? {
            out.push(ConePoint { coords: v });
        }
    }
    Ok(Some(out))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurjectivityReport {
    pub target: [u32; 2],
    pub targets: usize,
    pub theta_sources: usize,
    pub xi_sources: usize,
    /// Targets with no θ̃-preimage, as coordinate lists.
    pub theta_missing: Vec<Vec<CoordJson>>,
    /// Targets with no ξ̃-preimage.
    pub xi_missing: Vec<Vec<CoordJson>>,
}

impl SurjectivityReport {
    pub fn passed(&self) -> bool {
        self.theta_missing.is_empty() && self.xi_missing.is_empty()
    }
}

/// Exhaustive check over a finite field that every cone point at `target`
/// is hit by θ̃ from `(n, p+1)` and by ξ̃ from `(n+1, p)`.
pub fn surjectivity_check<F: Field>(
    field: &F,
    target: Stage,
    limit: u64,
) -> Result<Option<SurjectivityReport>> {
    let sweep = |s: Stage| enumerate_cone_points(field, s, limit);
    let (Some(targets), Some(theta_src), Some(xi_src)) = (
        sweep(target)?,
        sweep(target.with_extra_positive())?,
        sweep(target.with_extra_negative())?,
    ) else {
        return Ok(None);
    };
    let theta_img: HashSet<Vec<(WedgeIndex, F::Elem)>> = theta_src
        .iter()
        .map(|w| theta_tilde(w).map(|t| key_of(&t)))
        .collect::<Result<_>>()?;
    let xi_img: HashSet<Vec<(WedgeIndex, F::Elem)>> = xi_src
        .iter()
        .map(|w| xi_tilde(w).map(|t| key_of(&t)))
        .collect::<Result<_>>()?;
    let missing = |img: &HashSet<Vec<(WedgeIndex, F::Elem)>>| {
        targets
            .iter()
            .filter(|t| !img.contains(&key_of(t)))
            .map(ConePoint::to_json)
            .collect::<Vec<_>>()
    };
    Ok(Some(SurjectivityReport {
        target: [target.neg(), target.pos()],
        targets: targets.len(),
        theta_sources: theta_src.len(),
        xi_sources: xi_src.len(),
        theta_missing: missing(&theta_img),
        xi_missing: missing(&xi_img),
    }))
}

fn key_of<F: Field>(w: &ConePoint<F>) -> Vec<(WedgeIndex, F::Elem)> {
    w.coords
        .terms()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{idx, pairing};
    use crate::linalg::EchelonBasis;
    use crate::scalars::{PrimeField, Rationals};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn st(n: u32, p: u32) -> Stage {
        Stage::new(n, p).unwrap()
    }

    #[test]
    fn matrix_examples() {
        let q = Rationals;
        let stage = st(1, 2);
        // columns in μ-order: 1, -1, 2
        let id = Matrix::from_rows(
            &q,
            vec![
                vec![q.one(), q.zero(), q.zero()],
                vec![q.zero(), q.zero(), q.one()],
            ],
        )
        .unwrap();
        let pt = pluecker_from_matrix(&id, stage).unwrap();
        assert_eq!(pt, ConePoint::base_point(&q, stage));
        let zero = Matrix::zeros(&q, 2, 3);
        assert!(pluecker_from_matrix(&zero, stage).unwrap().is_zero());
        assert!(pluecker_from_matrix(&Matrix::zeros(&q, 2, 4), stage).is_err());

        let (a, b) = (q.from_i64(3), q.from_i64(-5));
        let m = Matrix::from_rows(
            &q,
            vec![
                vec![q.one(), a.clone(), q.zero()],
                vec![q.zero(), b.clone(), q.one()],
            ],
        )
        .unwrap();
        let alpha =
            AlphaMatrix::from_rows(&q, stage, vec![vec![a.clone()], vec![b.clone()]]).unwrap();
        let from_matrix = pluecker_from_matrix(&m, stage).unwrap();
        assert_eq!(from_matrix, big_cell_point(&alpha));
        assert_eq!(from_matrix.coordinate(&WedgeIndex::of(&[1, -1])), b);
        assert_eq!(from_matrix.coordinate(&WedgeIndex::of(&[-1, 2])), a);
    }

    /// Dimension of the degree-2 relations among coordinates, measured by
    /// evaluating all degree-2 monomials on random points.
    fn quadric_nullity(stage: Stage) -> usize {
        let f = PrimeField::new(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vars = stage.basis(stage.pos() as usize);
        let mut monos = Vec::new();
        for a in 0..vars.len() {
            for b in a..vars.len() {
                monos.push((a, b));
            }
        }
        let mut basis = EchelonBasis::new(&f);
        // columns: monomials; rows: sample points. rank = dim of the span of evaluations
        for _ in 0..(monos.len() + 20) {
            let pt = random_point(&f, stage, &mut rng);
            let vals: Vec<u64> = monos
                .iter()
                .map(|&(a, b)| f.mul(&pt.coordinate(&vars[a]), &pt.coordinate(&vars[b])))
                .collect();
            basis.insert(crate::linalg::SparseVec::from_dense(&f, &vals));
        }
        monos.len() - basis.rank()
    }

    fn relation_rank(stage: Stage) -> usize {
        let f = PrimeField::new(101).unwrap();
        let rels = pluecker_relations(&f, stage);
        let monos: Vec<Monomial> = {
            let vars = stage.basis(stage.pos() as usize);
            let mut v = Vec::new();
            for a in 0..vars.len() {
                for b in a..vars.len() {
                    v.push(Monomial::new(stage, vec![vars[a].clone(), vars[b].clone()]).unwrap());
                }
            }
            v
        };
        let mut basis = EchelonBasis::new(&f);
        for r in rels {
            let entries = r
                .terms()
                .map(|(m, c)| (monos.iter().position(|x| x == m).unwrap(), *c))
                .collect();
            basis.insert(crate::linalg::SparseVec::from_entries(&f, entries));
        }
        basis.rank()
    }

    #[test]
    fn one_quadric_for_two_planes_in_four_space() {
        let stage = st(2, 2);
        assert_eq!(quadric_nullity(stage), 1);
        assert_eq!(relation_rank(stage), 1);
        // three-planes in four-space: no quadrics at all
        let stage = st(1, 3);
        assert_eq!(quadric_nullity(stage), 0);
        assert!(pluecker_relations(&PrimeField::new(101).unwrap(), stage).is_empty());
    }

    #[test]
    fn relation_span_matches_evaluation_nullity() {
        for stage in [st(2, 3), st(3, 2), st(3, 3)] {
            assert_eq!(
                relation_rank(stage),
                quadric_nullity(stage),
                "stage {stage}"
            );
        }
    }

    #[test]
    fn no_relations_for_p_one() {
        assert!(pluecker_relations(&Rationals, st(3, 1)).is_empty());
    }

    #[test]
    fn relations_vanish_on_matrix_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = PrimeField::new(101).unwrap();
        for stage in [st(2, 2), st(2, 3), st(3, 3)] {
            let rels = pluecker_relations(&f, stage);
            for _ in 0..50 {
                let pt = random_point(&f, stage, &mut rng);
                for r in &rels {
                    assert_eq!(r.evaluate(pt.coords()).unwrap(), 0);
                }
                assert!(is_cone_point(pt.coords()).unwrap());
            }
        }
    }

    #[test]
    fn is_cone_point_examples() {
        let q = Rationals;
        let stage = st(2, 2);
        assert!(is_cone_point(ConePoint::zero(&q, stage).coords()).unwrap());
        let bad = ExteriorElement::from_terms(
            &q,
            stage,
            2,
            Side::Dual,
            [
                (vec![idx(1), idx(2)], q.one()),
                (vec![idx(-2), idx(-1)], q.one()),
            ],
        )
        .unwrap();
        assert!(!is_cone_point(&bad).unwrap());
        assert_eq!(ConePoint::new(bad), Err(Error::NotDecomposable));
    }

    #[test]
    fn big_cell_examples() {
        let q = Rationals;
        let stage = st(1, 2);
        assert_eq!(
            big_cell_point(&AlphaMatrix::zero(&q, stage)),
            ConePoint::base_point(&q, stage)
        );
        let alpha =
            AlphaMatrix::from_rows(&q, stage, vec![vec![q.from_i64(7)], vec![q.from_i64(11)]])
                .unwrap();
        let pt = big_cell_point(&alpha);
        assert_eq!(pt.coordinate(&WedgeIndex::of(&[1, 2])), q.one());
        assert_eq!(pt.coordinate(&WedgeIndex::of(&[1, -1])), q.from_i64(11));
        assert_eq!(pt.coordinate(&WedgeIndex::of(&[-1, 2])), q.from_i64(7));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = AlphaMatrix::random(&q, st(3, 3), &mut rng);
            let pt = big_cell_point(&a);
            assert!(pt.validate().is_ok());
            assert_eq!(pt.coordinate(&WedgeIndex::of(&[1, 2, 3])), q.one());
        }
    }

    #[test]
    fn lemma5_examples() {
        let q = Rationals;
        let stage = st(1, 2);
        let alpha =
            AlphaMatrix::from_rows(&q, stage, vec![vec![q.from_i64(2)], vec![q.from_i64(5)]])
                .unwrap();
        assert_eq!(lemma5_coordinate(&alpha, &[], &[1, 2]).unwrap(), q.one());
        assert_eq!(
            lemma5_coordinate(&alpha, &[1], &[1]).unwrap(),
            q.from_i64(-5)
        );
        let pt = big_cell_point(&alpha);
        assert_eq!(
            pairing(pt.coords(), &split_labels(&[1], &[1])).unwrap(),
            q.from_i64(-5)
        );

        // q = p: full minor, no row moves
        let stage = st(2, 2);
        let alpha = AlphaMatrix::from_rows(
            &q,
            stage,
            vec![
                vec![q.from_i64(1), q.from_i64(2)],
                vec![q.from_i64(3), q.from_i64(4)],
            ],
        )
        .unwrap();
        // rows n_i = 1, 2; columns m = 1, 2: det [[α_1^1, α_2^1], [α_1^2, α_2^2]] = 1*4 - 3*2
        assert_eq!(
            lemma5_coordinate(&alpha, &[1, 2], &[]).unwrap(),
            q.from_i64(-2)
        );
        assert!(!lemma5_sign(2, &[]));
        assert!(lemma5_coordinate(&alpha, &[1], &[]).is_err());
        assert!(lemma5_coordinate(&alpha, &[3], &[1]).is_err());
        assert!(lemma5_coordinate(&alpha, &[], &[2, 1]).is_err());
    }

    #[test]
    fn lemma5_matches_pairing_on_small_stages() {
        let f = PrimeField::new(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (n, p) in [(1, 1), (1, 3), (2, 2), (3, 2), (2, 4)] {
            let stage = st(n, p);
            for _ in 0..5 {
                let alpha = AlphaMatrix::random(&f, stage, &mut rng);
                let pt = big_cell_point(&alpha);
                for (negs, pos) in all_splits(stage) {
                    let direct = pairing(pt.coords(), &split_labels(&negs, &pos)).unwrap();
                    assert_eq!(lemma5_coordinate(&alpha, &negs, &pos).unwrap(), direct);
                }
            }
        }
    }

    #[test]
    fn theta_and_xi_examples() {
        let q = Rationals;
        let base = ConePoint::base_point(&q, st(2, 3));
        assert_eq!(
            theta_tilde(&base).unwrap(),
            ConePoint::base_point(&q, st(2, 2))
        );
        assert_eq!(
            xi_tilde(&base).unwrap(),
            ConePoint::base_point(&q, st(1, 3))
        );

        let no_top = ConePoint::new(
            ExteriorElement::basis_element(&q, st(2, 3), Side::Dual, WedgeIndex::of(&[1, -1, 2]))
                .unwrap(),
        )
        .unwrap();
        assert!(theta_tilde(&no_top).unwrap().is_zero());
        let with_last_neg = ConePoint::new(
            ExteriorElement::basis_element(&q, st(2, 3), Side::Dual, WedgeIndex::of(&[1, 2, -2]))
                .unwrap(),
        )
        .unwrap();
        assert!(xi_tilde(&with_last_neg).unwrap().is_zero());

        let bad = ConePoint::new_unchecked(
            ExteriorElement::from_terms(
                &q,
                st(2, 2),
                2,
                Side::Dual,
                [
                    (vec![idx(1), idx(2)], q.one()),
                    (vec![idx(-2), idx(-1)], q.one()),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(xi_tilde(&bad), Err(Error::NotDecomposable));
        assert_eq!(theta_tilde(&bad), Err(Error::NotDecomposable));
    }

    #[test]
    fn images_stay_on_the_cone() {
        let f = PrimeField::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let pt = random_point(&f, st(2, 3), &mut rng);
            assert!(theta_tilde(&pt).unwrap().validate().is_ok());
            assert!(xi_tilde(&pt).unwrap().validate().is_ok());
        }
    }

    #[test]
    fn act_on_point_matches_matrix_column_permutation() {
        let q = Rationals;
        let stage = st(1, 2);
        let pt = ConePoint::base_point(&q, stage);
        let t = Permutation::transposition(idx(1), idx(2));
        let img = act_on_point(&t, &pt).unwrap();
        assert_eq!(img.coordinate(&WedgeIndex::of(&[1, 2])), q.from_i64(-1));
    }

    #[test]
    fn diagram_commutes_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = PrimeField::new(101).unwrap();
        for stage in [st(2, 2), st(2, 3), st(3, 2), st(3, 3)] {
            for _ in 0..20 {
                let (a, b) = diagram_paths(&random_point(&f, stage, &mut rng)).unwrap();
                assert_eq!(a, b);
            }
        }
        assert!(diagram_paths(&ConePoint::base_point(&f, st(1, 2))).is_err());
    }

    #[test]
    fn gf2_sweep_matches_brute_force_factorization() {
        let f = PrimeField::new(2).unwrap();
        let stage = st(2, 2);
        let cone = enumerate_cone_points(&f, stage, 1 << 12).unwrap().unwrap();
        assert_eq!(cone.len(), 36);
        let covectors: Vec<ExteriorElement<PrimeField>> = (0..16u32)
            .map(|bits| {
                let terms: Vec<(SignedIndex, u64)> = stage
                    .symbols()
                    .into_iter()
                    .enumerate()
                    .map(|(k, s)| (s, u64::from(bits >> k & 1)))
                    .collect();
                ExteriorElement::linear(&f, stage, Side::Dual, &terms).unwrap()
            })
            .collect();
        let mut products = HashSet::new();
        for a in &covectors {
            for b in &covectors {
                products.insert(key_of(&ConePoint {
                    coords: a.wedge(b).unwrap(),
                }));
            }
        }
        let swept: HashSet<_> = cone.iter().map(key_of).collect();
        assert_eq!(swept, products);
        assert!(enumerate_cone_points(&Rationals, stage, 100)
            .unwrap()
            .is_none());
    }

    #[test]
    fn surjective_over_gf2_at_small_target() {
        let f = PrimeField::new(2).unwrap();
        let r = surjectivity_check(&f, st(1, 2), 1 << 16).unwrap().unwrap();
        assert_eq!(r.targets, 8);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn maps_are_scaling_and_permutation_equivariant() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let stage = st(3, 3);
        for _ in 0..30 {
            let w = random_point(&f, stage, &mut rng);
            let t = f.random(&mut rng);
            assert_eq!(
                theta_tilde(&w.scale(&t)).unwrap(),
                theta_tilde(&w).unwrap().scale(&t)
            );
            assert_eq!(
                xi_tilde(&w.scale(&t)).unwrap(),
                xi_tilde(&w).unwrap().scale(&t)
            );

            let sigma = Permutation::random(&st(3, 2), &mut rng);
            let lhs = theta_tilde(&act_on_point(&sigma, &w).unwrap()).unwrap();
            let rhs = act_on_point(&sigma, &theta_tilde(&w).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let sigma = Permutation::random(&st(2, 3), &mut rng);
            let lhs = xi_tilde(&act_on_point(&sigma, &w).unwrap()).unwrap();
            let rhs = act_on_point(&sigma, &xi_tilde(&w).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
