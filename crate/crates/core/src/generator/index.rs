//! Constraint checks over clause ids with cached clause-level subsumption.
//! Agrees with `ConstraintStore::prunes` on programs built from registered
//! clauses.

use super::{ClauseInfo, ConstraintKind};
use crate::subsumption::clause_subsumes;
use std::collections::{HashMap, HashSet};

#[derive(Default)]
struct Bits(Vec<u64>);

impl Bits {
    fn set(&mut self, i: usize) {
        let w = i / 64;
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0.get(i / 64).is_some_and(|w| w & (1 << (i % 64)) != 0)
    }
}

#[derive(Default)]
struct Cache {
    checked: usize,
    bits: Bits,
}

#[derive(Default)]
pub(crate) struct FastIndex {
    /// Global constraint id of each specialization, generalization and
    /// elimination constraint.
    spec_ids: Vec<usize>,
    spec_clauses: Vec<Vec<u32>>,
    gen_ids: Vec<usize>,
    /// Clause ids of each generalization constraint, as target indices.
    gen_targets: Vec<Vec<usize>>,
    targets: Vec<u32>,
    target_of: HashMap<u32, usize>,
    gens_by_min_target: HashMap<usize, Vec<usize>>,
    elims: Vec<(usize, Vec<u32>)>,
    elims_by_min: HashMap<u32, Vec<usize>>,
    /// Per clause: which specializations have a clause subsuming it.
    spec_cache: HashMap<u32, Cache>,
    /// Per clause: which generalization targets it subsumes.
    gen_cache: HashMap<u32, Cache>,
    memo: HashMap<(u32, u32), bool>,
    seen: HashSet<(ConstraintKind, Vec<u32>)>,
    count: usize,
}

fn sub(memo: &mut HashMap<(u32, u32), bool>, reg: &[ClauseInfo], i: u32, j: u32) -> bool {
    if reg[i as usize].head != reg[j as usize].head {
        return false;
    }
    if i == j {
        return true;
    }
    *memo.entry((i, j)).or_insert_with(|| {
        clause_subsumes(&reg[i as usize].clause, &reg[j as usize].clause).is_some()
    })
}

impl FastIndex {
    pub fn add(&mut self, kind: ConstraintKind, ids: Vec<u32>, _reg: &[ClauseInfo]) -> bool {
        if ids.is_empty() || !self.seen.insert((kind, ids.clone())) {
            return false;
        }
        let id = self.count;
        self.count += 1;
        match kind {
            ConstraintKind::Specialization => {
                self.spec_ids.push(id);
                self.spec_clauses.push(ids);
            }
            ConstraintKind::Generalization => {
                let mut ts: Vec<usize> = ids
                    .iter()
                    .map(|c| {
                        *self.target_of.entry(*c).or_insert_with(|| {
                            self.targets.push(*c);
                            self.targets.len() - 1
                        })
                    })
                    .collect();
                ts.sort_unstable();
                let g = self.gen_ids.len();
                self.gens_by_min_target.entry(ts[0]).or_default().push(g);
                self.gen_ids.push(id);
                self.gen_targets.push(ts);
            }
            ConstraintKind::Elimination => {
                let e = self.elims.len();
                self.elims_by_min.entry(ids[0]).or_default().push(e);
                self.elims.push((id, ids));
            }
        }
        true
    }

    /// Some generalization constraint is subsumed clause-wise by `p`. Adding
    /// clauses to `p` keeps this true, so it may cut partial programs.
    pub fn gen_prunes(&mut self, p: &[u32], reg: &[ClauseInfo]) -> Option<usize> {
        if self.gen_ids.is_empty() {
            return None;
        }
        let mut union = Bits::default();
        for &j in p {
            let cache = self.gen_cache.entry(j).or_default();
            while cache.checked < self.targets.len() {
                let t = cache.checked;
                if sub(&mut self.memo, reg, j, self.targets[t]) {
                    cache.bits.set(t);
                }
                cache.checked += 1;
            }
            for (w, bits) in cache.bits.0.iter().enumerate() {
                if union.0.len() <= w {
                    union.0.resize(w + 1, 0);
                }
                union.0[w] |= bits;
            }
        }
        let mut best: Option<usize> = None;
        for (w, word) in union.0.iter().enumerate() {
            let mut word = *word;
            while word != 0 {
                let t = w * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                if let Some(gs) = self.gens_by_min_target.get(&t) {
                    for &g in gs {
                        if self.gen_targets[g].iter().all(|x| union.get(*x)) {
                            let id = self.gen_ids[g];
                            best = Some(best.map_or(id, |b| b.min(id)));
                        }
                    }
                }
            }
        }
        best
    }

    fn spec_prunes(&mut self, p: &[u32], reg: &[ClauseInfo]) -> Option<usize> {
        if self.spec_ids.is_empty() || p.is_empty() {
            return None;
        }
        let mut acc: Option<Vec<u64>> = None;
        for &j in p {
            let cache = self.spec_cache.entry(j).or_default();
            while cache.checked < self.spec_clauses.len() {
                let s = cache.checked;
                if self.spec_clauses[s].iter().any(|i| sub(&mut self.memo, reg, *i, j)) {
                    cache.bits.set(s);
                }
                cache.checked += 1;
            }
            acc = Some(match acc {
                None => cache.bits.0.clone(),
                Some(a) => a
                    .iter()
                    .zip(cache.bits.0.iter().chain(std::iter::repeat(&0)))
                    .map(|(x, y)| x & y)
                    .collect(),
            });
            if acc.as_ref().is_some_and(|a| a.iter().all(|w| *w == 0)) {
                return None;
            }
        }
        let a = acc?;
        for (w, word) in a.iter().enumerate() {
            if *word != 0 {
                return Some(self.spec_ids[w * 64 + word.trailing_zeros() as usize]);
            }
        }
        None
    }

    fn elim_prunes(&self, p: &[u32], reg: &[ClauseInfo]) -> Option<usize> {
        let mut best: Option<usize> = None;
        for &j in p {
            let Some(es) = self.elims_by_min.get(&j) else { continue };
            for &e in es {
                let (id, ids) = &self.elims[e];
                if !ids.iter().all(|c| p.contains(c)) {
                    continue;
                }
                let called = p
                    .iter()
                    .any(|c| ids.iter().any(|e| reg[*c as usize].calls.contains(&reg[*e as usize].head)));
                if !called {
                    best = Some(best.map_or(*id, |b| b.min(*id)));
                }
            }
        }
        best
    }

    /// The smallest id of a constraint pruning `p`.
    pub fn prunes(&mut self, p: &[u32], reg: &[ClauseInfo]) -> Option<usize> {
        [
            self.gen_prunes(p, reg),
            self.spec_prunes(p, reg),
            self.elim_prunes(p, reg),
        ]
        .into_iter()
        .flatten()
        .min()
    }
}
