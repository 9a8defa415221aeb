//! Matroids represented by cone points, deletion, contraction and minors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::SignedIndex;
use crate::grassmann::{theta_tilde, xi_tilde, ConePoint};
use crate::scalars::Field;

/// Matroid stored by its list of bases. The ground set is kept in μ-order
/// and each basis is a μ-sorted label list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matroid {
    ground: Vec<SignedIndex>,
    rank: usize,
    bases: BTreeSet<Vec<SignedIndex>>,
}

/// Why an operation produced no matroid of the expected rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "marker", rename_all = "camelCase")]
pub enum Marker {
    ZeroPoint,
    ColoopDeleted { element: SignedIndex },
    LoopContracted { element: SignedIndex },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derived {
    Matroid(Matroid),
    Marker(Marker),
}

impl Derived {
    pub fn matroid(&self) -> Option<&Matroid> {
        match self {
            Derived::Matroid(m) => Some(m),
            Derived::Marker(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatroidJson {
    pub ground: Vec<i32>,
    pub rank: usize,
    pub bases: Vec<Vec<i32>>,
}

impl Matroid {
    /// Checks that every basis has `rank` elements from the ground set and
    /// that the basis-exchange axiom holds.
    pub fn new<I>(ground: Vec<SignedIndex>, rank: usize, bases: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<SignedIndex>>,
    {
        let mut ground = ground;
        ground.sort();
        if ground.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMatroid("repeated ground element".into()));
        }
        let mut set = BTreeSet::new();
        for mut b in bases {
            b.sort();
            if b.len() != rank || b.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMatroid(format!(
                    "basis {b:?} does not have {rank} distinct elements"
                )));
            }
            if let Some(&e) = b.iter().find(|e| ground.binary_search(e).is_err()) {
                return Err(Error::NotInGroundSet(e));
            }
            set.insert(b);
        }
        if set.is_empty() {
            return Err(Error::InvalidMatroid("no bases".into()));
        }
        let m = Matroid {
            ground,
            rank,
            bases: set,
        };
        if !m.satisfies_exchange() {
            return Err(Error::InvalidMatroid("basis exchange fails".into()));
        }
        Ok(m)
    }

    /// `U_{r, ground}`: every `r`-subset is a basis.
    pub fn uniform(rank: usize, ground: Vec<SignedIndex>) -> Result<Self> {
        let mut ground = ground;
        ground.sort();
        let bases = subsets(&ground, rank);
        Matroid::new(ground, rank, bases)
    }

    pub fn ground(&self) -> &[SignedIndex] {
        &self.ground
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bases(&self) -> &BTreeSet<Vec<SignedIndex>> {
        &self.bases
    }

    pub fn is_loop(&self, e: SignedIndex) -> bool {
        self.bases.iter().all(|b| !b.contains(&e))
    }

    pub fn is_coloop(&self, e: SignedIndex) -> bool {
        self.bases.iter().all(|b| b.contains(&e))
    }

    pub fn is_independent(&self, set: &[SignedIndex]) -> bool {
        self.bases.iter().any(|b| set.iter().all(|e| b.contains(e)))
    }

    pub fn satisfies_exchange(&self) -> bool {
        self.bases.iter().all(|b1| {
            self.bases.iter().all(|b2| {
                b1.iter().filter(|x| !b2.contains(x)).all(|&x| {
                    b2.iter().filter(|y| !b1.contains(y)).any(|&y| {
                        let mut c: Vec<SignedIndex> =
                            b1.iter().copied().filter(|&e| e != x).collect();
                        c.push(y);
                        c.sort();
                        self.bases.contains(&c)
                    })
                })
            })
        })
    }

    fn check_element(&self, e: SignedIndex) -> Result<()> {
        if self.ground.binary_search(&e).is_err() {
            return Err(Error::NotInGroundSet(e));
        }
        Ok(())
    }

    /// `M ∖ e`. Deleting a coloop gives a marker.
    pub fn delete(&self, e: SignedIndex) -> Result<Derived> {
        self.check_element(e)?;
        let bases: BTreeSet<Vec<SignedIndex>> = self
            .bases
            .iter()
            .filter(|b| !b.contains(&e))
            .cloned()
            .collect();
        if bases.is_empty() {
            return Ok(Derived::Marker(Marker::ColoopDeleted { element: e }));
        }
        Ok(Derived::Matroid(Matroid {
            ground: self.ground.iter().copied().filter(|&g| g != e).collect(),
            rank: self.rank,
            bases,
        }))
    }

    /// `M / e`. Contracting a loop gives a marker.
    pub fn contract(&self, e: SignedIndex) -> Result<Derived> {
        self.check_element(e)?;
        let bases: BTreeSet<Vec<SignedIndex>> = self
            .bases
            .iter()
            .filter(|b| b.contains(&e))
            .map(|b| b.iter().copied().filter(|&g| g != e).collect())
            .collect();
        if bases.is_empty() {
            return Ok(Derived::Marker(Marker::LoopContracted { element: e }));
        }
        Ok(Derived::Matroid(Matroid {
            ground: self.ground.iter().copied().filter(|&g| g != e).collect(),
            rank: self.rank - 1,
            bases,
        }))
    }

    /// Image under a bijection of ground sets.
    pub fn relabel(&self, map: &BTreeMap<SignedIndex, SignedIndex>) -> Result<Matroid> {
        let ground: Vec<SignedIndex> = self
            .ground
            .iter()
            .map(|e| map.get(e).copied().ok_or(Error::NotInGroundSet(*e)))
            .collect::<Result<_>>()?;
        let bases = self
            .bases
            .iter()
            .map(|b| b.iter().map(|e| map[e]).collect::<Vec<_>>());
        Matroid::new(ground, self.rank, bases)
    }

    pub fn to_json(&self) -> MatroidJson {
        MatroidJson {
            ground: self.ground.iter().map(|e| e.get()).collect(),
            rank: self.rank,
            bases: self
                .bases
                .iter()
                .map(|b| b.iter().map(|e| e.get()).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &MatroidJson) -> Result<Matroid> {
        let conv = |v: &[i32]| {
            v.iter()
                .map(|&i| SignedIndex::new(i))
                .collect::<Result<Vec<_>>>()
        };
        let bases = json
            .bases
            .iter()
            .map(|b| conv(b))
            .collect::<Result<Vec<_>>>()?;
        Matroid::new(conv(&json.ground)?, json.rank, bases)
    }

    /// Number of bases through each element, in ground order.
    fn basis_counts(&self) -> Vec<usize> {
        self.ground
            .iter()
            .map(|e| self.bases.iter().filter(|b| b.contains(e)).count())
            .collect()
    }
}

fn subsets<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn rec<T: Copy>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Support matroid of a decomposable point: `S` is a basis iff the
/// coordinate at `S` is nonzero.
pub fn matroid_of<F: Field>(omega: &ConePoint<F>) -> Result<Derived> {
    omega.validate()?;
    if omega.is_zero() {
        return Ok(Derived::Marker(Marker::ZeroPoint));
    }
    let stage = omega.stage();
    let bases: Vec<Vec<SignedIndex>> = omega
        .coords()
        .support()
        .map(|k| k.indices().to_vec())
        .collect();
    Ok(Derived::Matroid(Matroid::new(
        stage.symbols(),
        stage.pos() as usize,
        bases,
    )?))
}

/// Bijection `ground(M) → ground(N)` carrying bases onto bases, if any.
pub fn isomorphism(m: &Matroid, n: &Matroid) -> Option<BTreeMap<SignedIndex, SignedIndex>> {
    if m.ground.len() != n.ground.len() || m.rank != n.rank || m.bases.len() != n.bases.len() {
        return None;
    }
    let cm = m.basis_counts();
    let cn = n.basis_counts();
    let mut sorted_m = cm.clone();
    let mut sorted_n = cn.clone();
    sorted_m.sort_unstable();
    sorted_n.sort_unstable();
    if sorted_m != sorted_n {
        return None;
    }

    fn search(
        m: &Matroid,
        n: &Matroid,
        cm: &[usize],
        cn: &[usize],
        k: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == cm.len() {
            let map: BTreeMap<SignedIndex, SignedIndex> =
                (0..k).map(|i| (m.ground[i], n.ground[image[i]])).collect();
            return m.bases.iter().all(|b| {
                let mut img: Vec<SignedIndex> = b.iter().map(|e| map[e]).collect();
                img.sort();
                n.bases.contains(&img)
            });
        }
        for t in 0..cn.len() {
            if used[t] || cn[t] != cm[k] {
                continue;
            }
            used[t] = true;
            image.push(t);
            if search(m, n, cm, cn, k + 1, image, used) {
                return true;
            }
            image.pop();
            used[t] = false;
        }
        false
    }

    let mut image = Vec::with_capacity(cm.len());
    let mut used = vec![false; cn.len()];
    if search(m, n, &cm, &cn, 0, &mut image, &mut used) {
        Some(
            image
                .iter()
                .enumerate()
                .map(|(i, &t)| (m.ground[i], n.ground[t]))
                .collect(),
        )
    } else {
        None
    }
}

/// `M ≅ N / contracted ∖ deleted` via `relabel: ground(M) → ground of the minor`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorWitness {
    pub contracted: Vec<SignedIndex>,
    pub deleted: Vec<SignedIndex>,
    pub relabel: Vec<(SignedIndex, SignedIndex)>,
}

/// Is `m` a minor of `n`? Every minor can be written `N / C ∖ D` with `C`
/// independent, so it suffices to try independent `C` of size
/// `rank(N) - rank(M)` and every `D` of the right size.
pub fn is_minor(m: &Matroid, n: &Matroid) -> Option<MinorWitness> {
    if m.rank > n.rank || m.ground.len() > n.ground.len() {
        return None;
    }
    let c_size = n.rank - m.rank;
    let d_size = n.ground.len() - m.ground.len();
    if c_size > d_size {
        return None;
    }
    let d_size = d_size - c_size;
    for c in subsets(&n.ground, c_size) {
        if !n.is_independent(&c) {
            continue;
        }
        let rest: Vec<SignedIndex> = n
            .ground
            .iter()
            .copied()
            .filter(|e| !c.contains(e))
            .collect();
        for d in subsets(&rest, d_size) {
            let bases: BTreeSet<Vec<SignedIndex>> = n
                .bases
                .iter()
                .filter(|b| c.iter().all(|e| b.contains(e)) && d.iter().all(|e| !b.contains(e)))
                .map(|b| b.iter().copied().filter(|e| !c.contains(e)).collect())
                .collect();
            if bases.is_empty() {
                continue;
            }
            let minor = Matroid {
                ground: rest.iter().copied().filter(|e| !d.contains(e)).collect(),
                rank: m.rank,
                bases,
            };
            if let Some(map) = isomorphism(m, &minor) {
                return Some(MinorWitness {
                    contracted: c,
                    deleted: d,
                    relabel: map.into_iter().collect(),
                });
            }
        }
    }
    None
}

/// Outcome of one side of the correspondence check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum CaseOutcome {
    Pass,
    Skipped { reason: String },
    Fail { reason: String },
}

impl CaseOutcome {
    pub fn is_fail(&self) -> bool {
        matches!(self, CaseOutcome::Fail { .. })
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, CaseOutcome::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub contraction: CaseOutcome,
    pub deletion: CaseOutcome,
}

fn compare(image: &Derived, expected: &Derived, what: &str) -> CaseOutcome {
    if image == expected {
        CaseOutcome::Pass
    } else {
        CaseOutcome::Fail {
            reason: format!("{what}: map gives {image:?}, matroid operation gives {expected:?}"),
        }
    }
}

/// Checks that θ̃ contracts the last positive label and ξ̃ deletes the last
/// negative label at the level of support matroids. A zero image is
/// expected exactly when the label is a loop (θ̃) or a coloop (ξ̃); such
/// cases are reported as skipped.
pub fn correspondence_check<F: Field>(omega: &ConePoint<F>) -> Result<CorrespondenceReport> {
    let m = match matroid_of(omega)? {
        Derived::Matroid(m) => m,
        Derived::Marker(_) => {
            let reason = "zero point has no matroid".to_string();
            return Ok(CorrespondenceReport {
                contraction: CaseOutcome::Skipped {
                    reason: reason.clone(),
                },
                deletion: CaseOutcome::Skipped { reason },
            });
        }
    };
    let stage = omega.stage();

    let contraction = if stage.pos() < 2 {
        CaseOutcome::Skipped {
            reason: format!("θ̃ needs two positive labels at {stage}"),
        }
    } else {
        let e = stage.last_positive();
        let image = matroid_of(&theta_tilde(omega)?)?;
        let expected = m.contract(e)?;
        match (&image, &expected) {
            (
                Derived::Marker(Marker::ZeroPoint),
                Derived::Marker(Marker::LoopContracted { .. }),
            ) => CaseOutcome::Skipped {
                reason: format!("{e} is a loop and θ̃ω = 0"),
            },
            _ => compare(&image, &expected, "contraction"),
        }
    };

    let deletion = if stage.neg() < 2 {
        CaseOutcome::Skipped {
            reason: format!("ξ̃ needs two negative labels at {stage}"),
        }
    } else {
        let e = stage.last_negative();
        let image = matroid_of(&xi_tilde(omega)?)?;
        let expected = m.delete(e)?;
        match (&image, &expected) {
            (Derived::Marker(Marker::ZeroPoint), Derived::Marker(Marker::ColoopDeleted { .. })) => {
                CaseOutcome::Skipped {
                    reason: format!("{e} is a coloop and ξ̃ω = 0"),
                }
            }
            _ => compare(&image, &expected, "deletion"),
        }
    };

    Ok(CorrespondenceReport {
        contraction,
        deletion,
    })
}
