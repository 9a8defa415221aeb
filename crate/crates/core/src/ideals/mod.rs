//! Degree-2 pieces of the stage ideals `𝓘_n` and membership certificates.
//!
//! `𝓘_n` is generated by the orbits of `a_i b_i` for `3 ≤ i ≤ n` together with
//! the Plücker quadrics. All generators are quadrics, so membership of a
//! quadric is a question about the span of the generators in the degree-2
//! piece. Two independent deciders are provided: rank in the coordinates of
//! the degree-2 monomials, and rank after restriction to the big cell.

mod bigcell;
mod polynomial;

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bigcell::{bigcell_restriction, restrict_polynomial, restrict_variable, AlphaPoly};
pub use polynomial::Polynomial;

use crate::error::{Error, Result};
use crate::exterior::Stage;
use crate::grassmann::pluecker_relations;
use crate::linalg::{EchelonBasis, SparseVec};
use crate::scalars::Field;
use crate::symmetry::{antichain_element, orbit, Monomial};

/// Union of the orbits of `a_i b_i` for `i = 3..=n`, in term order.
pub fn stage_generators(n: u32, stage: Stage) -> Result<BTreeSet<Monomial>> {
    let mut out = BTreeSet::new();
    for i in 3..=n {
        out.extend(orbit(&antichain_element(i, &stage)?));
    }
    Ok(out)
}

/// The degree-2 monomials of a stage in term order, with their positions.
#[derive(Debug, Clone)]
pub struct Degree2Space {
    stage: Stage,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl Degree2Space {
    pub fn new(stage: Stage) -> Self {
        let vars = stage.basis(stage.pos() as usize);
        let mut basis = Vec::with_capacity(vars.len() * (vars.len() + 1) / 2);
        for a in 0..vars.len() {
            for b in a..vars.len() {
                basis.push(
                    Monomial::new(stage, vec![vars[a].clone(), vars[b].clone()])
                        .expect("stage variables"),
                );
            }
        }
        basis.sort();
        let index = basis
            .iter()
            .enumerate()
            .map(|(k, m)| (m.clone(), k))
            .collect();
        Degree2Space {
            stage,
            basis,
            index,
        }
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinate row of a homogeneous quadric.
    pub fn row<F: Field>(&self, p: &Polynomial<F>) -> Result<SparseVec<F>> {
        if p.stage() != self.stage {
            return Err(Error::StageMismatch {
                left: self.stage,
                right: p.stage(),
            });
        }
        let mut entries = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let k = self
                .position(m)
                .ok_or(Error::NonHomogeneous { expected: 2 })?;
            entries.push((k, c.clone()));
        }
        Ok(SparseVec::from_entries(p.field(), entries))
    }
}

/// One row per polynomial, one column per basis monomial of `space`.
pub fn degree2_matrix<F: Field>(
    polys: &[Polynomial<F>],
    space: &Degree2Space,
) -> Result<Vec<SparseVec<F>>> {
    polys.par_iter().map(|p| space.row(p)).collect()
}

/// Where a generator comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum GeneratorSource {
    Orbit { monomial: Vec<Vec<i32>> },
    Pluecker { relation: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorCoeff {
    pub generator: usize,
    pub source: GeneratorSource,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "camelCase")]
pub enum MembershipCertificate {
    #[serde(rename_all = "camelCase")]
    In { coefficients: Vec<GeneratorCoeff> },
    #[serde(rename_all = "camelCase")]
    NotIn {
        rank_generators: usize,
        rank_with_target: usize,
    },
}

impl MembershipCertificate {
    pub fn is_in(&self) -> bool {
        matches!(self, MembershipCertificate::In { .. })
    }
}

/// Generators of the degree-2 piece of `𝓘_n`: orbit monomials first, then the
/// Plücker quadrics.
#[derive(Debug, Clone)]
pub struct IdealGenerators<F: Field> {
    n: u32,
    stage: Stage,
    polys: Vec<Polynomial<F>>,
    sources: Vec<GeneratorSource>,
}

impl<F: Field> IdealGenerators<F> {
    pub fn new(field: &F, n: u32, stage: Stage) -> Result<Self> {
        let mut polys = Vec::new();
        let mut sources = Vec::new();
        for m in stage_generators(n, stage)? {
            sources.push(GeneratorSource::Orbit {
                monomial: m.to_sets(),
            });
            polys.push(Polynomial::monomial(field, m));
        }
        for (k, r) in pluecker_relations(field, stage).into_iter().enumerate() {
            sources.push(GeneratorSource::Pluecker { relation: k });
            polys.push(r);
        }
        Ok(IdealGenerators {
            n,
            stage,
            polys,
            sources,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn polys(&self) -> &[Polynomial<F>] {
        &self.polys
    }

    pub fn orbit_count(&self) -> usize {
        self.sources
            .iter()
            .filter(|s| matches!(s, GeneratorSource::Orbit { .. }))
            .count()
    }

    /// `Σ c_i g_i` for an `In` certificate; `None` for `NotIn`.
    pub fn reexpand(
        &self,
        field: &F,
        cert: &MembershipCertificate,
    ) -> Result<Option<Polynomial<F>>> {
        let MembershipCertificate::In { coefficients } = cert else {
            return Ok(None);
        };
        let mut acc = Polynomial::zero(field, self.stage);
        for gc in coefficients {
            let g = self
                .polys
                .get(gc.generator)
                .ok_or_else(|| Error::Input(format!("generator {} out of range", gc.generator)))?;
            acc = acc.add(&g.scale(&field.parse(&gc.coeff)?))?;
        }
        Ok(Some(acc))
    }

    fn coefficients(&self, field: &F, combination: &SparseVec<F>) -> Vec<GeneratorCoeff> {
        combination
            .entries()
            .iter()
            .map(|(k, c)| GeneratorCoeff {
                generator: *k,
                source: self.sources[*k].clone(),
                coeff: field.format(c),
            })
            .collect()
    }
}

fn certificate<F: Field>(
    field: &F,
    gens: &IdealGenerators<F>,
    basis: &EchelonBasis<F>,
    target: &SparseVec<F>,
) -> MembershipCertificate {
    let red = basis.reduce(target);
    if red.residual.is_zero() {
        MembershipCertificate::In {
            coefficients: gens.coefficients(field, &red.combination),
        }
    } else {
        MembershipCertificate::NotIn {
            rank_generators: basis.rank(),
            rank_with_target: basis.rank() + 1,
        }
    }
}

/// Membership decided by rank in the coordinates of the degree-2 monomials.
#[derive(Debug, Clone)]
pub struct Degree2Decider<F: Field> {
    field: F,
    gens: IdealGenerators<F>,
    space: Degree2Space,
    basis: EchelonBasis<F>,
}

impl<F: Field> Degree2Decider<F> {
    pub fn new(field: &F, gens: IdealGenerators<F>) -> Result<Self> {
        let space = Degree2Space::new(gens.stage);
        let rows = degree2_matrix(&gens.polys, &space)?;
        let mut basis = EchelonBasis::new(field);
        for r in rows {
            basis.insert(r);
        }
        Ok(Degree2Decider {
            field: field.clone(),
            gens,
            space,
            basis,
        })
    }

    pub fn generators(&self) -> &IdealGenerators<F> {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn certify(&self, target: &Polynomial<F>) -> Result<MembershipCertificate> {
        if !target.is_homogeneous(2) {
            return Err(Error::NonHomogeneous { expected: 2 });
        }
        let row = self.space.row(target)?;
        Ok(certificate(&self.field, &self.gens, &self.basis, &row))
    }
}

/// Membership decided by rank after restriction to the big cell, where the
/// Plücker quadrics vanish and only the orbit monomials contribute.
#[derive(Debug, Clone)]
pub struct BigCellDecider<F: Field> {
    field: F,
    gens: IdealGenerators<F>,
    columns: HashMap<Vec<u8>, usize>,
    basis: EchelonBasis<F>,
}

impl<F: Field> BigCellDecider<F> {
    pub fn new(field: &F, gens: IdealGenerators<F>) -> Result<Self> {
        let orbit_polys = &gens.polys[..gens.orbit_count()];
        let restricted: Vec<AlphaPoly<F>> = orbit_polys
            .par_iter()
            .map(|p| restrict_polynomial(p, &mut HashMap::new()))
            .collect::<Result<_>>()?;
        let exponents: BTreeSet<&Vec<u8>> = restricted
            .iter()
            .flat_map(|r| r.terms().map(|(e, _)| e))
            .collect();
        let columns: HashMap<Vec<u8>, usize> = exponents
            .into_iter()
            .enumerate()
            .map(|(k, e)| (e.clone(), k))
            .collect();
        let mut basis = EchelonBasis::new(field);
        for r in &restricted {
            let entries = r.terms().map(|(e, c)| (columns[e], c.clone())).collect();
            basis.insert(SparseVec::from_entries(field, entries));
        }
        Ok(BigCellDecider {
            field: field.clone(),
            gens,
            columns,
            basis,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn certify(&self, target: &Polynomial<F>) -> Result<MembershipCertificate> {
        if !target.is_homogeneous(2) {
            return Err(Error::NonHomogeneous { expected: 2 });
        }
        let r = restrict_polynomial(target, &mut HashMap::new())?;
        let mut entries = Vec::with_capacity(r.len());
        for (e, c) in r.terms() {
            match self.columns.get(e) {
                Some(&k) => entries.push((k, c.clone())),
                None => {
                    return Ok(MembershipCertificate::NotIn {
                        rank_generators: self.rank(),
                        rank_with_target: self.rank() + 1,
                    })
                }
            }
        }
        let row = SparseVec::from_entries(&self.field, entries);
        Ok(certificate(&self.field, &self.gens, &self.basis, &row))
    }
}

/// Is `target` in the degree-2 piece of `𝓘_n` at the stage?
pub fn membership_degree2<F: Field>(
    target: &Monomial,
    n: u32,
    stage: Stage,
    field: &F,
) -> Result<MembershipCertificate> {
    let decider = Degree2Decider::new(field, IdealGenerators::new(field, n, stage)?)?;
    decider.certify(&Polynomial::monomial(field, target.restage(stage)?))
}

/// The same question answered on the big cell. `In` certificates use only
/// orbit generators.
pub fn membership_via_bigcell<F: Field>(
    target: &Monomial,
    n: u32,
    stage: Stage,
    field: &F,
) -> Result<MembershipCertificate> {
    let decider = BigCellDecider::new(field, IdealGenerators::new(field, n, stage)?)?;
    decider.certify(&Polynomial::monomial(field, target.restage(stage)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChainEntry {
    pub ell: u32,
    pub in_own: MembershipCertificate,
    pub not_in_prev: MembershipCertificate,
    pub methods_agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChainReport {
    pub stage: [u32; 2],
    pub field: String,
    pub entries: Vec<ChainEntry>,
    pub verdict: bool,
}

/// For each `4 ≤ ℓ ≤ l_max`, certifies `a_ℓ b_ℓ ∈ 𝓘_ℓ` and `a_ℓ b_ℓ ∉ 𝓘_{ℓ-1}`
/// at the given stage, checking the second claim with both deciders.
pub fn chain_report<F: Field>(lmax: u32, stage: Stage, field: &F) -> Result<ChainReport> {
    let ells: Vec<u32> = (4..=lmax).collect();
    for &l in &ells {
        antichain_element(l, &stage)?;
    }
    let entries: Vec<ChainEntry> = ells
        .par_iter()
        .map(|&l| {
            let target = Polynomial::monomial(field, antichain_element(l, &stage)?);
            let own = Degree2Decider::new(field, IdealGenerators::new(field, l, stage)?)?;
            let prev_gens = IdealGenerators::new(field, l - 1, stage)?;
            let prev = Degree2Decider::new(field, prev_gens.clone())?;
            let prev_cell = BigCellDecider::new(field, prev_gens)?;
            let in_own = own.certify(&target)?;
            let not_in_prev = prev.certify(&target)?;
            let methods_agree = prev_cell.certify(&target)?.is_in() == not_in_prev.is_in();
            Ok(ChainEntry {
                ell: l,
                in_own,
                not_in_prev,
                methods_agree,
            })
        })
        .collect::<Result<_>>()?;
    let verdict = entries
        .iter()
        .all(|e| e.in_own.is_in() && !e.not_in_prev.is_in() && e.methods_agree);
    Ok(ChainReport {
        stage: [stage.neg(), stage.pos()],
        field: field.spec().to_string(),
        entries,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::scalars::{PrimeField, Rationals};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn st(n: u32, p: u32) -> Stage {
        Stage::new(n, p).unwrap()
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn degree2_space_dimension_and_order() {
        for (n, p) in [(1, 1), (2, 3), (3, 5)] {
            let space = Degree2Space::new(st(n, p));
            let vars = binom((n + p) as usize, p as usize);
            assert_eq!(space.dimension(), binom(vars + 1, 2));
            assert!(space.basis().windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(Degree2Space::new(st(3, 5)).dimension(), 1596);
    }

    #[test]
    fn degree2_matrix_rows() {
        let q = Rationals;
        let stage = st(2, 2);
        let space = Degree2Space::new(stage);
        assert!(degree2_matrix::<Rationals>(&[], &space).unwrap().is_empty());
        let m = Monomial::of(stage, &[&[1, 2], &[-1, 1]]);
        let rows = degree2_matrix(&[Polynomial::monomial(&q, m.clone())], &space).unwrap();
        assert_eq!(rows[0].entries(), &[(space.position(&m).unwrap(), q.one())]);
        let rel = &pluecker_relations(&q, stage)[0];
        let row = space.row(rel).unwrap();
        assert_eq!(row.len(), 3);
        for (m, c) in rel.terms() {
            assert_eq!(row.get(space.position(m).unwrap()), Some(c));
        }
        let cubic = Polynomial::monomial(&q, Monomial::of(stage, &[&[1, 2], &[1, 2], &[1, 2]]));
        assert_eq!(
            space.row(&cubic),
            Err(Error::NonHomogeneous { expected: 2 })
        );
    }

    #[test]
    fn generator_counts() {
        assert_eq!(stage_generators(3, st(3, 5)).unwrap().len(), 840);
        let g4 = stage_generators(4, st(3, 5)).unwrap();
        let o4 = orbit(&antichain_element(4, &st(3, 5)).unwrap());
        assert_eq!(g4.len(), 840 + o4.len());
        assert!(stage_generators(4, st(2, 3)).is_err());
    }

    #[test]
    fn trivial_memberships() {
        let f = PrimeField::new(2).unwrap();
        let stage = st(2, 3);
        let a3 = antichain_element(3, &stage).unwrap();
        let gens = IdealGenerators::new(&f, 3, stage).unwrap();
        let decider = Degree2Decider::new(&f, gens.clone()).unwrap();
        let cert = decider
            .certify(&Polynomial::monomial(&f, a3.clone()))
            .unwrap();
        let MembershipCertificate::In { coefficients } = &cert else {
            panic!("generator must be a member")
        };
        assert_eq!(coefficients.len(), 1);
        assert_eq!(coefficients[0].coeff, "1");
        for r in pluecker_relations(&f, stage) {
            assert!(decider.certify(&r).unwrap().is_in());
        }
        assert!(membership_via_bigcell(&a3, 3, stage, &f).unwrap().is_in());
    }

    fn random_target<F: Field, R: Rng>(
        f: &F,
        gens: &IdealGenerators<F>,
        rng: &mut R,
    ) -> Polynomial<F> {
        let stage = gens.stage();
        match rng.gen_range(0..3) {
            0 => Polynomial::monomial(f, Monomial::random(stage, 2, rng)),
            1 => {
                let g = &gens.polys()[rng.gen_range(0..gens.polys().len())];
                let h = &gens.polys()[rng.gen_range(0..gens.polys().len())];
                g.scale(&f.random_nonzero(rng))
                    .add(&h.scale(&f.random(rng)))
                    .unwrap()
            }
            _ => {
                let g = &gens.polys()[rng.gen_range(0..gens.polys().len())];
                let m = Polynomial::monomial(f, Monomial::random(stage, 2, rng));
                g.add(&m).unwrap()
            }
        }
    }

    fn check_soundness<F: Field>(
        f: &F,
        gens: &IdealGenerators<F>,
        target: &Polynomial<F>,
        cert: &MembershipCertificate,
    ) {
        if let Some(sum) = gens.reexpand(f, cert).unwrap() {
            assert_eq!(&sum, target);
        }
    }

    #[test]
    fn methods_agree_on_random_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let stage = st(2, 3);
        let q = Rationals;
        let gens = IdealGenerators::new(&q, 3, stage).unwrap();
        let d2 = Degree2Decider::new(&q, gens.clone()).unwrap();
        let bc = BigCellDecider::new(&q, gens.clone()).unwrap();
        let mut seen = [0usize; 2];
        for _ in 0..50 {
            let t = random_target(&q, &gens, &mut rng);
            if t.is_zero() {
                continue;
            }
            let c1 = d2.certify(&t).unwrap();
            let c2 = bc.certify(&t).unwrap();
            assert_eq!(c1.is_in(), c2.is_in(), "{t:?}");
            check_soundness(&q, &gens, &t, &c1);
            seen[c1.is_in() as usize] += 1;
        }
        assert!(seen[0] > 0 && seen[1] > 0);
    }

    #[test]
    fn not_in_ranks_match_dense_recomputation() {
        let f = PrimeField::new(7).unwrap();
        let stage = st(2, 3);
        let gens = IdealGenerators::new(&f, 3, stage).unwrap();
        let d2 = Degree2Decider::new(&f, gens.clone()).unwrap();
        let space = Degree2Space::new(stage);
        let rows = degree2_matrix(gens.polys(), &space).unwrap();
        let dense = |rows: &[SparseVec<PrimeField>]| {
            let data: Vec<Vec<u64>> = rows
                .iter()
                .map(|r| {
                    (0..space.dimension())
                        .map(|c| r.get(c).copied().unwrap_or(0))
                        .collect()
                })
                .collect();
            Matrix::from_rows(&f, data).unwrap().rank()
        };
        let base = dense(&rows);
        assert_eq!(base, d2.rank());
        let target = Polynomial::monomial(&f, Monomial::of(stage, &[&[1, 2, 3], &[1, 2, 3]]));
        let MembershipCertificate::NotIn {
            rank_generators,
            rank_with_target,
        } = d2.certify(&target).unwrap()
        else {
            panic!("square of the base variable is not in the ideal")
        };
        let mut with = rows.clone();
        with.push(space.row(&target).unwrap());
        assert_eq!((rank_generators, rank_with_target), (base, dense(&with)));
    }

    #[test]
    fn monotone_in_n() {
        let f = PrimeField::new(101).unwrap();
        let stage = st(3, 4);
        let d3 = Degree2Decider::new(&f, IdealGenerators::new(&f, 3, stage).unwrap()).unwrap();
        let d4 = Degree2Decider::new(&f, IdealGenerators::new(&f, 4, stage).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..40 {
            let t = Polynomial::monomial(&f, Monomial::random(stage, 2, &mut rng));
            if d3.certify(&t).unwrap().is_in() {
                assert!(d4.certify(&t).unwrap().is_in());
            }
        }
        let a4 = Polynomial::monomial(&f, antichain_element(4, &stage).unwrap());
        assert!(!d3.certify(&a4).unwrap().is_in());
        assert!(d4.certify(&a4).unwrap().is_in());
    }

    #[test]
    fn chain_vacuous_and_small() {
        let f = PrimeField::new(2).unwrap();
        let r = chain_report(3, st(3, 5), &f).unwrap();
        assert!(r.entries.is_empty() && r.verdict);
        let r = chain_report(4, st(3, 4), &Rationals).unwrap();
        assert!(r.verdict);
        assert!(chain_report(5, st(3, 5), &f).is_err());
    }

    #[test]
    fn certificate_json_shape() {
        let c = MembershipCertificate::NotIn {
            rank_generators: 3,
            rank_with_target: 4,
        };
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["verdict"], "notIn");
        assert_eq!(v["rankWithTarget"], 4);
    }
}
