//! Exact Engel decisions by cycle detection.
//!
//! The sequence `c_0 = x`, `c_{k+1} = (c_k, y)` lives in a finite group, so
//! it is eventually periodic. The identity is a fixed point of the map, so
//! either some `c_k = 1` or the sequence enters a cycle that avoids 1.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{SampleUnits, UnitGroup};
use crate::error::{Error, Result};
use crate::groups::GroupOps;

pub const DEFAULT_ENGEL_EXHAUSTIVE_MAX: usize = 4096;

/// Step cap per pair in the sampled tier; longer runs count as undecided.
pub const DEFAULT_MAX_ENGEL_STEPS: usize = 1 << 16;

const ROW_BLOCK: usize = 64;

/// Result of iterating one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngelOutcome {
    /// `c_depth = 1` and no earlier term is 1.
    Holds { depth: usize },
    /// `c_start = c_{start+period}` and no term is 1.
    Fails { start: usize, period: usize },
    /// Step cap reached before either.
    Undecided { steps: usize },
}

/// A failing pair with the position of its 1-free cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngelWitness<E> {
    pub x: E,
    pub y: E,
    pub start: usize,
    pub period: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngelMode {
    Exhaustive { cap: usize },
    Sampled { count: u64, seed: u64, max_steps: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngelVerdict<E> {
    pub engel: bool,
    pub witness: Option<EngelWitness<E>>,
    /// Largest depth among pairs tested up to the verdict.
    pub max_depth: usize,
    pub pairs_tested: u64,
    pub undecided: u64,
    pub exhaustive: bool,
}

/// One step of the sequence, carrying `c` and `c^-1` so that no inversion
/// is needed: `(c, y) = c^-1 y^-1 c y` and its inverse is `y^-1 c^-1 y c`.
struct Stepper<'a, G: GroupOps> {
    g: &'a G,
    y: G::Elem,
    yi: G::Elem,
}

impl<G: GroupOps> Stepper<'_, G> {
    fn step(&self, (c, d): &(G::Elem, G::Elem)) -> (G::Elem, G::Elem) {
        let g = self.g;
        let next = g.op(&g.op(d, &self.yi), &g.op(c, &self.y));
        let next_inv = g.op(&g.op(&self.yi, d), &g.op(&self.y, c));
        (next, next_inv)
    }
}

/// Decides whether `(x, y, ..., y) = 1` for some number of `y`s.
pub fn engel_pair_test<G: GroupOps>(g: &G, x: &G::Elem, y: &G::Elem, max_steps: usize) -> EngelOutcome {
    let id = g.identity();
    let s = Stepper { g, y: y.clone(), yi: g.inverse(y) };
    let start = (x.clone(), g.inverse(x));
    if start.0 == id {
        return EngelOutcome::Holds { depth: 0 };
    }
    // Brent: the hare visits c_1, c_2, ... in order.
    let mut power = 1usize;
    let mut lam = 1usize;
    let mut tortoise = start.0.clone();
    let mut hare = s.step(&start);
    let mut k = 1usize;
    loop {
        if hare.0 == id {
            return EngelOutcome::Holds { depth: k };
        }
        if hare.0 == tortoise {
            break;
        }
        if k >= max_steps {
            return EngelOutcome::Undecided { steps: k };
        }
        if power == lam {
            tortoise = hare.0.clone();
            power *= 2;
            lam = 0;
        }
        hare = s.step(&hare);
        lam += 1;
        k += 1;
    }
    let mut t = start.clone();
    let mut h = start;
    for _ in 0..lam {
        h = s.step(&h);
    }
    let mut mu = 0;
    while t.0 != h.0 {
        t = s.step(&t);
        h = s.step(&h);
        mu += 1;
    }
    EngelOutcome::Fails { start: mu, period: lam }
}

/// `c_0, ..., c_len`.
pub fn engel_trace<G: GroupOps>(g: &G, x: &G::Elem, y: &G::Elem, len: usize) -> Vec<G::Elem> {
    let s = Stepper { g, y: y.clone(), yi: g.inverse(y) };
    let mut cur = (x.clone(), g.inverse(x));
    let mut out = vec![cur.0.clone()];
    for _ in 0..len {
        cur = s.step(&cur);
        out.push(cur.0.clone());
    }
    out
}

/// Recomputes the sequence of a witness and confirms the 1-free cycle.
pub fn replay_witness<G: GroupOps>(g: &G, w: &EngelWitness<G::Elem>) -> bool {
    let trace = engel_trace(g, &w.x, &w.y, w.start + w.period);
    let id = g.identity();
    w.period > 0 && trace[w.start] == trace[w.start + w.period] && trace.iter().all(|c| *c != id)
}

/// Engel test of an enumerated unit group, exhaustive or sampled.
pub fn engel_group_test(v: &UnitGroup, mode: EngelMode) -> Result<EngelVerdict<usize>> {
    v.engel_test(mode)
}

/// Tests `count` seeded random pairs and stops at the first failure.
pub fn engel_sampled_test<G: SampleUnits>(g: &G, count: u64, seed: u64, max_steps: usize) -> EngelVerdict<G::Elem> {
    sampled(g, count, seed, max_steps)
}

fn sampled<G: SampleUnits>(g: &G, count: u64, seed: u64, max_steps: usize) -> EngelVerdict<G::Elem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verdict = EngelVerdict { engel: true, witness: None, max_depth: 0, pairs_tested: 0, undecided: 0, exhaustive: false };
    for _ in 0..count {
        let x = g.sample(&mut rng);
        let y = g.sample(&mut rng);
        verdict.pairs_tested += 1;
        match engel_pair_test(g, &x, &y, max_steps) {
            EngelOutcome::Holds { depth } => verdict.max_depth = verdict.max_depth.max(depth),
            EngelOutcome::Undecided { .. } => verdict.undecided += 1,
            EngelOutcome::Fails { start, period } => {
                verdict.engel = false;
                verdict.witness = Some(EngelWitness { x, y, start, period });
                break;
            }
        }
    }
    verdict
}

impl UnitGroup {
    /// Engel test over all ordered pairs, or over seeded samples.
    pub fn engel_test(&self, mode: EngelMode) -> Result<EngelVerdict<usize>> {
        match mode {
            EngelMode::Exhaustive { cap } => self.engel_exhaustive(cap),
            EngelMode::Sampled { count, seed, max_steps } => Ok(sampled(self, count, seed, max_steps)),
        }
    }

    fn engel_exhaustive(&self, cap: usize) -> Result<EngelVerdict<usize>> {
        let n = self.order();
        if n > cap {
            return Err(Error::BudgetExceeded { needed: n as u128, budget: cap as u64 });
        }
        self.ensure_table();
        let mut verdict = EngelVerdict { engel: true, witness: None, max_depth: 0, pairs_tested: 0, undecided: 0, exhaustive: true };
        for block in (0..n).step_by(ROW_BLOCK) {
            let rows: Vec<(usize, u64, Option<(usize, EngelOutcome)>)> = (block..(block + ROW_BLOCK).min(n))
                .into_par_iter()
                .map(|x| {
                    let mut depth = 0;
                    for y in 0..n {
                        match engel_pair_test(self, &x, &y, usize::MAX) {
                            EngelOutcome::Holds { depth: d } => depth = depth.max(d),
                            other => return (depth, y as u64 + 1, Some((y, other))),
                        }
                    }
                    (depth, n as u64, None)
                })
                .collect();
            for (x, (depth, tested, failure)) in (block..).zip(rows) {
                verdict.max_depth = verdict.max_depth.max(depth);
                verdict.pairs_tested += tested;
                if let Some((y, EngelOutcome::Fails { start, period })) = failure {
                    verdict.engel = false;
                    verdict.witness = Some(EngelWitness { x, y, start, period });
                    return Ok(verdict);
                }
            }
        }
        Ok(verdict)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::units;
    use super::*;
    use crate::groups::GroupSpec;

    #[test]
    fn pair_examples() {
        let v = units(2, "S3");
        assert_eq!(engel_pair_test(&v, &0, &5, 100), EngelOutcome::Holds { depth: 0 });
        assert_eq!(engel_pair_test(&v, &3, &3, 100), EngelOutcome::Holds { depth: 1 });
        let failing = (0..v.order())
            .flat_map(|x| (0..v.order()).map(move |y| (x, y)))
            .find(|&(x, y)| matches!(engel_pair_test(&v, &x, &y, usize::MAX), EngelOutcome::Fails { .. }));
        assert!(failing.is_some());
    }

    #[test]
    fn pair_test_agrees_with_naive_iteration() {
        let v = units(2, "S3");
        v.ensure_table();
        for x in 0..v.order() {
            for y in 0..v.order() {
                let mut c = x;
                let mut seen = vec![c];
                let naive = loop {
                    if c == 0 {
                        break EngelOutcome::Holds { depth: seen.len() - 1 };
                    }
                    c = v.comm(c, y);
                    if let Some(start) = seen.iter().position(|&s| s == c) {
                        break EngelOutcome::Fails { start, period: seen.len() - start };
                    }
                    seen.push(c);
                };
                assert_eq!(engel_pair_test(&v, &x, &y, usize::MAX), naive);
            }
        }
    }

    #[test]
    fn group_examples() {
        let v = units(3, "C3");
        let verdict = v.engel_test(EngelMode::Exhaustive { cap: 4096 }).unwrap();
        assert!(verdict.engel && verdict.max_depth <= 1);
        assert_eq!(verdict.pairs_tested, 81);

        let v = units(5, "S3");
        let verdict = v.engel_test(EngelMode::Exhaustive { cap: 4096 }).unwrap();
        assert!(!verdict.engel);
        let w = verdict.witness.unwrap();
        assert!(replay_witness(&v, &w));

        let v = units(2, "D4");
        assert!(v.engel_test(EngelMode::Exhaustive { cap: 4096 }).unwrap().engel);
        assert!(v.engel_test(EngelMode::Exhaustive { cap: 100 }).is_err());
    }

    #[test]
    fn finite_group_engel_matches_nilpotency() {
        for name in ["S3", "D4", "Q8", "C2xC3", "SD16", "S4", "D4xC3"] {
            let g = GroupSpec::parse(name).unwrap().build().unwrap();
            let all_hold = (0..g.order()).all(|x| {
                (0..g.order()).all(|y| matches!(engel_pair_test(&g, &x, &y, usize::MAX), EngelOutcome::Holds { .. }))
            });
            assert_eq!(all_hold, g.is_nilpotent(), "{name}");
        }
    }

    #[test]
    fn sampled_mode_is_deterministic() {
        let v = units(5, "S3");
        let mode = EngelMode::Sampled { count: 500, seed: 42, max_steps: DEFAULT_MAX_ENGEL_STEPS };
        let a = v.engel_test(mode).unwrap();
        let b = v.engel_test(mode).unwrap();
        assert_eq!(a, b);
        assert!(!a.engel);
        assert!(replay_witness(&v, a.witness.as_ref().unwrap()));
    }

    #[test]
    fn exhaustive_witness_is_independent_of_worker_count() {
        let v = units(2, "S3");
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| v.engel_test(EngelMode::Exhaustive { cap: 4096 }).unwrap());
        let b = three.install(|| v.engel_test(EngelMode::Exhaustive { cap: 4096 }).unwrap());
        assert_eq!(a, b);
    }
}
