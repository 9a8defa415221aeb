//! Permutations of signed labels acting on wedge variables and monomials, the
//! lexicographic term order, divisibility up to the symmetric group, and the
//! antichain `{a_n b_n}`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{canonicalize, idx, Sign, SignedIndex, Stage, WedgeIndex};

/// Finitely supported bijection of the nonzero integers.
///
/// Only moved points are stored, so equality is equality of maps.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Permutation {
    moved: BTreeMap<SignedIndex, SignedIndex>,
}

impl Permutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds from `(from, to)` pairs. The pairs must form a bijection of
    /// their domain onto itself; unlisted labels are fixed.
    pub fn from_pairs<I: IntoIterator<Item = (SignedIndex, SignedIndex)>>(
        pairs: I,
    ) -> Result<Self> {
        let mut moved = BTreeMap::new();
        let mut images = BTreeSet::new();
        for (a, b) in pairs {
            if moved.insert(a, b).is_some_and(|old| old != b) {
                return Err(Error::InvalidPermutation(format!("{a} has two images")));
            }
            images.insert(b);
        }
        let domain: BTreeSet<_> = moved.keys().copied().collect();
        if images.len() != moved.len() {
            return Err(Error::InvalidPermutation(
                "two labels share an image".into(),
            ));
        }
        if domain != images {
            return Err(Error::InvalidPermutation(
                "image set differs from domain set".into(),
            ));
        }
        moved.retain(|a, b| a != b);
        Ok(Permutation { moved })
    }

    pub fn transposition(a: SignedIndex, b: SignedIndex) -> Self {
        Permutation::from_pairs([(a, b), (b, a)]).expect("a transposition is a bijection")
    }

    /// Uniformly random permutation of the stage labels.
    pub fn random<R: Rng + ?Sized>(stage: &Stage, rng: &mut R) -> Self {
        let symbols = stage.symbols();
        let mut images = symbols.clone();
        images.shuffle(rng);
        Permutation::from_pairs(symbols.into_iter().zip(images)).expect("shuffle is a bijection")
    }

    /// Random permutation of the stage labels fixing `fixed`.
    pub fn random_fixing<R: Rng + ?Sized>(stage: &Stage, fixed: SignedIndex, rng: &mut R) -> Self {
        let symbols: Vec<_> = stage
            .symbols()
            .into_iter()
            .filter(|&s| s != fixed)
            .collect();
        let mut images = symbols.clone();
        images.shuffle(rng);
        Permutation::from_pairs(symbols.into_iter().zip(images)).expect("shuffle is a bijection")
    }

    pub fn apply(&self, i: SignedIndex) -> SignedIndex {
        self.moved.get(&i).copied().unwrap_or(i)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let domain: BTreeSet<SignedIndex> = self
            .moved
            .keys()
            .chain(other.moved.keys())
            .copied()
            .collect();
        Permutation::from_pairs(domain.into_iter().map(|i| (i, self.apply(other.apply(i)))))
            .expect("composition of bijections")
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            moved: self.moved.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }

    pub fn moved_points(&self) -> impl Iterator<Item = (SignedIndex, SignedIndex)> + '_ {
        self.moved.iter().map(|(&a, &b)| (a, b))
    }

    /// `true` if every moved label belongs to the stage.
    pub fn acts_on(&self, stage: &Stage) -> bool {
        self.moved.keys().all(|&i| stage.contains(i))
    }

    fn check_stage(&self, stage: &Stage) -> Result<()> {
        match self.moved.keys().find(|&&i| !stage.contains(i)) {
            Some(&i) => Err(Error::IndexOutsideStage {
                index: i,
                stage: *stage,
            }),
            None => Ok(()),
        }
    }

    pub fn to_pairs(&self) -> Vec<[i32; 2]> {
        self.moved.iter().map(|(a, b)| [a.get(), b.get()]).collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ[")?;
        for (k, (a, b)) in self.moved.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}↦{b}")?;
        }
        write!(f, "]")
    }
}

/// `σ` applied label-wise to `x_S`, re-sorted. Returns the image key and the
/// sign of the sorting permutation.
pub fn act_on_wedge(
    sigma: &Permutation,
    s: &WedgeIndex,
    stage: &Stage,
) -> Result<(WedgeIndex, Sign)> {
    sigma.check_stage(stage)?;
    for &i in s.indices() {
        stage.check_index(i)?;
    }
    let raw: Vec<SignedIndex> = s.indices().iter().map(|&i| sigma.apply(i)).collect();
    Ok(canonicalize(&raw).expect("a bijection keeps labels distinct"))
}

/// Commutative product of wedge variables `X_S` of degree `p` at a stage.
///
/// Factors are kept sorted, so equal multisets compare equal. The order on
/// monomials is the lexicographic term order on exponent vectors (see
/// [`term_cmp`]).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    stage: Stage,
    factors: Vec<WedgeIndex>,
}

impl Monomial {
    pub fn new(stage: Stage, mut factors: Vec<WedgeIndex>) -> Result<Self> {
        for w in &factors {
            if w.degree() != stage.pos() as usize {
                return Err(Error::DegreeMismatch {
                    left: w.degree(),
                    right: stage.pos() as usize,
                });
            }
            if let Some(&bad) = w.indices().iter().find(|&&i| !stage.contains(i)) {
                return Err(Error::IndexOutsideStage { index: bad, stage });
            }
        }
        factors.sort();
        Ok(Monomial { stage, factors })
    }

    pub fn unit(stage: Stage) -> Self {
        Monomial {
            stage,
            factors: Vec::new(),
        }
    }

    pub fn var(stage: Stage, w: WedgeIndex) -> Result<Self> {
        Monomial::new(stage, vec![w])
    }

    /// Convenience constructor from raw label sets; panics on invalid input.
    pub fn of(stage: Stage, sets: &[&[i32]]) -> Self {
        Monomial::new(stage, sets.iter().map(|s| WedgeIndex::of(s)).collect())
            .expect("valid monomial")
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[WedgeIndex] {
        &self.factors
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        if self.stage != other.stage {
            return Err(Error::StageMismatch {
                left: self.stage,
                right: other.stage,
            });
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        factors.sort();
        Ok(Monomial {
            stage: self.stage,
            factors,
        })
    }

    /// Ordinary (non-equivariant) quotient `other / self`, if `self` divides it.
    pub fn divides(&self, other: &Monomial) -> Option<Monomial> {
        if self.stage != other.stage {
            return None;
        }
        let mut rest = other.factors.clone();
        for f in &self.factors {
            let pos = rest.iter().position(|g| g == f)?;
            rest.remove(pos);
        }
        Some(Monomial {
            stage: self.stage,
            factors: rest,
        })
    }

    /// Exponents over the distinct variables, in ascending variable order.
    pub fn exponents(&self) -> Vec<(&WedgeIndex, usize)> {
        let mut out: Vec<(&WedgeIndex, usize)> = Vec::new();
        for w in &self.factors {
            match out.last_mut() {
                Some((last, c)) if *last == w => *c += 1,
                _ => out.push((w, 1)),
            }
        }
        out
    }

    /// Same label sets, viewed at a stage containing them (η-padding).
    pub fn restage(&self, stage: Stage) -> Result<Monomial> {
        Monomial::new(stage, self.factors.clone())
    }

    pub fn random<R: Rng + ?Sized>(stage: Stage, degree: usize, rng: &mut R) -> Monomial {
        let basis = stage.basis(stage.pos() as usize);
        let factors = (0..degree)
            .map(|_| basis[rng.gen_range(0..basis.len())].clone())
            .collect();
        Monomial::new(stage, factors).expect("basis elements fit the stage")
    }

    pub fn to_sets(&self) -> Vec<Vec<i32>> {
        self.factors.iter().map(WedgeIndex::to_ints).collect()
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (k, w) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, "·")?;
            }
            write!(f, "X{w:?}")?;
        }
        Ok(())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.stage
            .cmp(&other.stage)
            .then_with(|| exponent_lex(self, other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn exponent_lex(a: &Monomial, b: &Monomial) -> Ordering {
    let ea = a.exponents();
    let eb = b.exponents();
    let (mut i, mut j) = (0, 0);
    loop {
        match (ea.get(i), eb.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((va, ca)), Some((vb, cb))) => match va.cmp(vb) {
                // the smaller variable has a positive exponent only on one side
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => {
                    if ca != cb {
                        return ca.cmp(cb);
                    }
                    i += 1;
                    j += 1;
                }
            },
        }
    }
}

/// Term order: exponent vectors over the ascending variable list, compared
/// lexicographically from the left.
pub fn term_cmp(a: &Monomial, b: &Monomial) -> Result<Ordering> {
    if a.stage != b.stage {
        return Err(Error::StageMismatch {
            left: a.stage,
            right: b.stage,
        });
    }
    Ok(exponent_lex(a, b))
}

/// Factor-wise action; the sign is the product of the factor signs.
pub fn act_on_monomial(sigma: &Permutation, m: &Monomial) -> Result<(Monomial, Sign)> {
    let mut sign = Sign::Plus;
    let mut factors = Vec::with_capacity(m.degree());
    for w in &m.factors {
        let (img, s) = act_on_wedge(sigma, w, &m.stage)?;
        sign = sign * s;
        factors.push(img);
    }
    Ok((Monomial::new(m.stage, factors)?, sign))
}

/// Evidence for `x |_G y`: `σ(x) · cofactor = y` as unsigned monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityWitness {
    pub sigma: Permutation,
    pub cofactor: Monomial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub sigma: Vec<[i32; 2]>,
    pub cofactor: Vec<Vec<i32>>,
}

impl DivisibilityWitness {
    pub fn to_json(&self) -> WitnessJson {
        WitnessJson {
            sigma: self.sigma.to_pairs(),
            cofactor: self.cofactor.to_sets(),
        }
    }
}

/// Bit position of each stage label, and each factor as a bitmask over them.
struct SymbolTable {
    symbols: Vec<SignedIndex>,
    position: HashMap<SignedIndex, usize>,
}

impl SymbolTable {
    fn new(stage: &Stage) -> Self {
        let symbols = stage.symbols();
        let position = symbols.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        SymbolTable { symbols, position }
    }

    fn mask(&self, w: &WedgeIndex) -> u128 {
        w.indices()
            .iter()
            .fold(0u128, |m, i| m | (1u128 << self.position[i]))
    }
}

/// Multiset of per-symbol membership signatures over a list of factor masks.
fn signature_histogram(masks: &[u128], nsymbols: usize) -> HashMap<u64, usize> {
    let mut hist = HashMap::new();
    for s in 0..nsymbols {
        let sig = masks
            .iter()
            .enumerate()
            .filter(|(_, m)| *m >> s & 1 == 1)
            .fold(0u64, |acc, (k, _)| acc | (1 << k));
        *hist.entry(sig).or_insert(0) += 1;
    }
    hist
}

fn signatures(masks: &[u128], nsymbols: usize) -> Vec<u64> {
    (0..nsymbols)
        .map(|s| {
            masks
                .iter()
                .enumerate()
                .filter(|(_, m)| *m >> s & 1 == 1)
                .fold(0u64, |acc, (k, _)| acc | (1 << k))
        })
        .collect()
}

/// Decides `x |_G y` for `G` the full symmetric group on the stage labels.
///
/// Backtracks over injective assignments of the factors of `x` to factors of
/// `y`. A partial assignment is feasible iff every membership pattern (which
/// assigned factors contain a label) occurs equally often on both sides; at a
/// full assignment the matching patterns define `σ`. Signs are ignored.
pub fn divides_mod_group(x: &Monomial, y: &Monomial) -> Result<Option<DivisibilityWitness>> {
    if x.stage != y.stage {
        return Err(Error::StageMismatch {
            left: x.stage,
            right: y.stage,
        });
    }
    if x.degree() > y.degree() || x.degree() > 64 {
        return Ok(None);
    }
    let table = SymbolTable::new(&x.stage);
    let n = table.symbols.len();
    let xm: Vec<u128> = x.factors.iter().map(|w| table.mask(w)).collect();
    let ym: Vec<u128> = y.factors.iter().map(|w| table.mask(w)).collect();

    struct Search<'a> {
        xm: &'a [u128],
        ym: &'a [u128],
        n: usize,
        used: Vec<bool>,
        assigned: Vec<usize>,
    }

    impl Search<'_> {
        fn feasible(&self) -> bool {
            let xs: Vec<u128> = self.xm[..self.assigned.len()].to_vec();
            let ys: Vec<u128> = self.assigned.iter().map(|&j| self.ym[j]).collect();
            signature_histogram(&xs, self.n) == signature_histogram(&ys, self.n)
        }

        fn run(&mut self) -> bool {
            let k = self.assigned.len();
            if k == self.xm.len() {
                return true;
            }
            let x_union = self.xm[..k].iter().fold(0u128, |a, b| a | b);
            let y_union = self.assigned.iter().fold(0u128, |a, &j| a | self.ym[j]);
            let want = (self.xm[k] & x_union).count_ones();
            // candidates whose overlap with already-fixed labels matches, largest overlap first
            let mut cands: Vec<(u32, usize)> = (0..self.ym.len())
                .filter(|&j| !self.used[j])
                .map(|j| ((self.ym[j] & y_union).count_ones(), j))
                .filter(|&(ov, _)| ov == want)
                .collect();
            cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            let mut tried = BTreeSet::new();
            for (_, j) in cands {
                if !tried.insert(self.ym[j]) {
                    continue;
                }
                self.used[j] = true;
                self.assigned.push(j);
                if self.feasible() && self.run() {
                    return true;
                }
                self.assigned.pop();
                self.used[j] = false;
            }
            false
        }
    }

    let mut search = Search {
        xm: &xm,
        ym: &ym,
        n,
        used: vec![false; ym.len()],
        assigned: Vec::new(),
    };
    if !search.run() {
        return Ok(None);
    }

    let ys: Vec<u128> = search.assigned.iter().map(|&j| ym[j]).collect();
    let sig_x = signatures(&xm, n);
    let sig_y = signatures(&ys, n);
    let mut by_sig: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (s, &sig) in sig_y.iter().enumerate() {
        by_sig.entry(sig).or_default().push(s);
    }
    let mut pairs = Vec::with_capacity(n);
    for (s, &sig) in sig_x.iter().enumerate() {
        let t = by_sig
            .get_mut(&sig)
            .and_then(|v| {
                if v.is_empty() {
                    None
                } else {
                    Some(v.remove(0))
                }
            })
            .expect("histograms match");
        pairs.push((table.symbols[s], table.symbols[t]));
    }
    let sigma = Permutation::from_pairs(pairs)?;
    let cofactor = Monomial::new(
        y.stage,
        (0..y.factors.len())
            .filter(|j| !search.used[*j])
            .map(|j| y.factors[j].clone())
            .collect(),
    )?;
    Ok(Some(DivisibilityWitness { sigma, cofactor }))
}

/// `σ(x) · cofactor` as an unsigned monomial, for replaying a witness.
pub fn apply_witness(x: &Monomial, w: &DivisibilityWitness) -> Result<Monomial> {
    let (img, _) = act_on_monomial(&w.sigma, x)?;
    img.mul(&w.cofactor)
}

/// Label sets `A = {-2, 2, …, p}` and `B_n = {-(n-1), …, -1, 1, n+1, …, p}`.
pub fn antichain_sets(n: u32, stage: &Stage) -> Result<(WedgeIndex, WedgeIndex)> {
    if n < 3 {
        return Err(Error::InvalidIndexSet(format!(
            "antichain starts at n = 3, got {n}"
        )));
    }
    let p = stage.pos();
    if p < n || stage.neg() < n - 1 {
        return Err(Error::StageTooSmall {
            stage: *stage,
            reason: format!(
                "a_{n}·b_{n} needs at least {} negative and {n} positive labels",
                n - 1
            ),
        });
    }
    let a = WedgeIndex::from_set(std::iter::once(idx(-2)).chain((2..=p as i32).map(idx)))?;
    let b = WedgeIndex::from_set(
        (1..n as i32)
            .map(|j| idx(-j))
            .chain(std::iter::once(idx(1)))
            .chain((n as i32 + 1..=p as i32).map(idx)),
    )?;
    Ok((a, b))
}

/// The padded antichain monomial `X_A · X_{B_n}`.
pub fn antichain_element(n: u32, stage: &Stage) -> Result<Monomial> {
    let (a, b) = antichain_sets(n, stage)?;
    Monomial::new(*stage, vec![a, b])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AntichainPair {
    pub n: u32,
    pub m: u32,
    pub stage: [u32; 2],
    pub forward_witness: Option<WitnessJson>,
    pub backward_witness: Option<WitnessJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AntichainReport {
    pub stage: [u32; 2],
    pub max_n: u32,
    pub pairs: Vec<AntichainPair>,
    /// `a_n b_n |_G a_n b_n` for every n, which must hold.
    pub reflexive: Vec<(u32, bool)>,
    pub verdict: bool,
}

/// Runs the divisibility search in both directions for every `3 ≤ n < m ≤ max_n`.
pub fn antichain_verify(max_n: u32, stage: &Stage) -> Result<AntichainReport> {
    let elements: Vec<(u32, Monomial)> = (3..=max_n)
        .map(|n| antichain_element(n, stage).map(|m| (n, m)))
        .collect::<Result<_>>()?;
    let reflexive: Vec<(u32, bool)> = elements
        .iter()
        .map(|(n, m)| Ok((*n, divides_mod_group(m, m)?.is_some())))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..elements.len())
        .flat_map(|i| (i + 1..elements.len()).map(move |j| (i, j)))
        .collect();
    let pairs: Vec<AntichainPair> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let (n, x) = &elements[i];
            let (m, y) = &elements[j];
            Ok(AntichainPair {
                n: *n,
                m: *m,
                stage: [stage.neg(), stage.pos()],
                forward_witness: divides_mod_group(x, y)?.map(|w| w.to_json()),
                backward_witness: divides_mod_group(y, x)?.map(|w| w.to_json()),
            })
        })
        .collect::<Result<_>>()?;
    let verdict = reflexive.iter().all(|(_, ok)| *ok)
        && pairs
            .iter()
            .all(|p| p.forward_witness.is_none() && p.backward_witness.is_none());
    Ok(AntichainReport {
        stage: [stage.neg(), stage.pos()],
        max_n,
        pairs,
        reflexive,
        verdict,
    })
}

/// All distinct unsigned images of `m` under the symmetric group of the
/// stage, enumerated by distributing labels over membership patterns.
pub fn orbit(m: &Monomial) -> BTreeSet<Monomial> {
    let table = SymbolTable::new(&m.stage);
    let n = table.symbols.len();
    let masks: Vec<u128> = m.factors.iter().map(|w| table.mask(w)).collect();
    let hist: BTreeMap<u64, usize> = signature_histogram(&masks, n).into_iter().collect();
    let classes: Vec<(u64, usize)> = hist.into_iter().collect();

    let mut out = BTreeSet::new();
    let mut assignment = vec![0u64; n];
    let mut taken = vec![false; n];

    fn choose(
        classes: &[(u64, usize)],
        class: usize,
        need: usize,
        start: usize,
        taken: &mut Vec<bool>,
        assignment: &mut Vec<u64>,
        emit: &mut dyn FnMut(&[u64]),
    ) {
        if class == classes.len() {
            emit(assignment);
            return;
        }
        if need == 0 {
            let next_need = classes.get(class + 1).map_or(0, |c| c.1);
            choose(classes, class + 1, next_need, 0, taken, assignment, emit);
            return;
        }
        for s in start..taken.len() {
            if taken[s] {
                continue;
            }
            taken[s] = true;
            assignment[s] = classes[class].0;
            choose(classes, class, need - 1, s + 1, taken, assignment, emit);
            taken[s] = false;
        }
    }

    let degree = m.degree();
    let mut emit = |assign: &[u64]| {
        let factors = (0..degree)
            .map(|k| {
                WedgeIndex::from_set(
                    (0..n)
                        .filter(|&s| assign[s] >> k & 1 == 1)
                        .map(|s| table.symbols[s]),
                )
                .expect("distinct labels")
            })
            .collect();
        out.insert(Monomial::new(m.stage, factors).expect("same stage and degree"));
    };
    let first_need = classes.first().map_or(0, |c| c.1);
    choose(
        &classes,
        0,
        first_need,
        0,
        &mut taken,
        &mut assignment,
        &mut emit,
    );
    out
}
