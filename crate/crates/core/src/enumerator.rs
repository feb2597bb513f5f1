//! Injective listings of recursively enumerable sets of positive integers.
//!
//! Two kinds of backends exist: a dovetailed simulation of a [`MachineTable`]
//! (element `k` is listed when program `k` halts) and decidable test sets where
//! each unit of budget decides one more candidate.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::machine::{never_halts, MachineRun, MachineTable};

/// Extra bits kept beyond the largest exponent in a tail sum; terms past the
/// cutoff are bounded as a block.
const TAIL_CUTOFF_BITS: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecursiveSet {
    Evens,
    Odds,
    Squares,
    Primes,
}

impl RecursiveSet {
    pub fn name(self) -> &'static str {
        match self {
            RecursiveSet::Evens => "evens",
            RecursiveSet::Odds => "odds",
            RecursiveSet::Squares => "squares",
            RecursiveSet::Primes => "primes",
        }
    }

    pub fn contains(self, k: u64) -> bool {
        match self {
            RecursiveSet::Evens => k >= 2 && k.is_multiple_of(2),
            RecursiveSet::Odds => k % 2 == 1,
            RecursiveSet::Squares => {
                let r = k.isqrt();
                k >= 1 && r * r == k
            }
            RecursiveSet::Primes => {
                k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| !k.is_multiple_of(d))
            }
        }
    }
}

impl FromStr for RecursiveSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "evens" => Ok(RecursiveSet::Evens),
            "odds" => Ok(RecursiveSet::Odds),
            "squares" => Ok(RecursiveSet::Squares),
            "primes" => Ok(RecursiveSet::Primes),
            _ => Err(Error::param(format!(
                "unknown recursive set `{s}` (expected evens, odds, squares or primes)"
            ))),
        }
    }
}

/// Enumerator configuration, parsed from `halting`, `recursive:NAME` or `table:PATH`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumeratorSpec {
    Halting,
    Recursive(RecursiveSet),
    Table(PathBuf),
}

impl EnumeratorSpec {
    pub fn is_halting(&self) -> bool {
        !matches!(self, EnumeratorSpec::Recursive(_))
    }

    /// Builds the enumerator; loads and validates the table for `Table`.
    pub fn build(&self) -> Result<Enumerator> {
        Ok(match self {
            EnumeratorSpec::Halting => Enumerator::halting(MachineTable::bundled()),
            EnumeratorSpec::Recursive(set) => Enumerator::recursive(*set),
            EnumeratorSpec::Table(path) => Enumerator::halting(MachineTable::from_path(path)?),
        })
    }
}

impl FromStr for EnumeratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "halting" {
            return Ok(EnumeratorSpec::Halting);
        }
        if let Some(name) = s.strip_prefix("recursive:") {
            return Ok(EnumeratorSpec::Recursive(name.parse()?));
        }
        if let Some(path) = s.strip_prefix("table:") {
            if path.is_empty() {
                return Err(Error::param("table: requires a path"));
            }
            return Ok(EnumeratorSpec::Table(PathBuf::from(path)));
        }
        Err(Error::param(format!(
            "unknown enumerator `{s}` (expected halting, recursive:NAME or table:PATH)"
        )))
    }
}

impl fmt::Display for EnumeratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumeratorSpec::Halting => f.write_str("halting"),
            EnumeratorSpec::Recursive(s) => write!(f, "recursive:{}", s.name()),
            EnumeratorSpec::Table(p) => write!(f, "table:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone)]
enum Backend {
    Halting(Arc<MachineTable>),
    Recursive(RecursiveSet),
}

#[derive(Debug, Clone)]
pub struct Enumerator {
    backend: Backend,
}

impl Enumerator {
    pub fn halting(table: MachineTable) -> Self {
        Enumerator { backend: Backend::Halting(Arc::new(table)) }
    }

    pub fn recursive(set: RecursiveSet) -> Self {
        Enumerator { backend: Backend::Recursive(set) }
    }

    pub fn start(&self) -> EnumerationState {
        let progress = match &self.backend {
            Backend::Halting(_) => Progress::Dovetail { admitted: 0, cursor: 0, runs: Vec::new() },
            Backend::Recursive(_) => Progress::Decided { through: 0 },
        };
        EnumerationState {
            backend: self.backend.clone(),
            progress,
            enumerated: Vec::new(),
            members: BTreeSet::new(),
            steps_used: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Progress {
    /// `admitted` machines have started; `cursor` is the last index stepped in
    /// the current round (0 at the start of a round).
    Dovetail { admitted: usize, cursor: usize, runs: Vec<MachineRun> },
    /// Candidates `1..=through` have been decided.
    Decided { through: u64 },
}

/// Prefix of an enumeration together with the simulation state needed to extend it.
#[derive(Debug, Clone)]
pub struct EnumerationState {
    backend: Backend,
    progress: Progress,
    enumerated: Vec<u64>,
    members: BTreeSet<u64>,
    steps_used: u64,
}

impl EnumerationState {
    /// Spends up to `steps` more units of budget. Budget 0 returns an identical state.
    pub fn advance(&self, steps: u64) -> EnumerationState {
        let mut next = self.clone();
        next.advance_in_place(steps);
        next
    }

    pub fn advance_in_place(&mut self, steps: u64) {
        let mut remaining = steps;
        match (&self.backend, &mut self.progress) {
            (Backend::Halting(table), Progress::Dovetail { admitted, cursor, runs }) => {
                let total = table.len();
                while remaining > 0 {
                    if *cursor == 0 && *admitted < total {
                        *admitted += 1;
                        runs.push(MachineRun::default());
                    }
                    let next = (*cursor..*admitted).find(|&i| !runs[i].halted);
                    let Some(i) = next else {
                        if *admitted >= total && runs.iter().all(|r| r.halted) {
                            break;
                        }
                        *cursor = 0;
                        continue;
                    };
                    remaining -= 1;
                    self.steps_used += 1;
                    if runs[i].step(&table.programs[i]) {
                        let k = i as u64 + 1;
                        assert!(self.members.insert(k), "element {k} listed twice");
                        self.enumerated.push(k);
                    }
                    *cursor = i + 1;
                }
            }
            (Backend::Recursive(set), Progress::Decided { through }) => {
                while remaining > 0 {
                    remaining -= 1;
                    self.steps_used += 1;
                    *through += 1;
                    if set.contains(*through) {
                        assert!(self.members.insert(*through), "element listed twice");
                        self.enumerated.push(*through);
                    }
                }
            }
            _ => unreachable!("backend and progress kinds always match"),
        }
    }

    /// Advances in chunks until at least `count` elements are listed or the
    /// total budget `max_steps` is spent. Returns whether the count was reached.
    pub fn advance_until_count(&mut self, count: usize, max_steps: u64, chunk: u64) -> bool {
        let chunk = chunk.max(1);
        while self.enumerated.len() < count && self.steps_used < max_steps && !self.is_exhausted() {
            self.advance_in_place(chunk.min(max_steps - self.steps_used));
        }
        self.enumerated.len() >= count
    }

    /// True when a halting backend has no running machines left.
    pub fn is_exhausted(&self) -> bool {
        match (&self.backend, &self.progress) {
            (Backend::Halting(t), Progress::Dovetail { admitted, runs, .. }) => {
                *admitted >= t.len() && runs.iter().all(|r| r.halted)
            }
            _ => false,
        }
    }

    pub fn is_halting_backend(&self) -> bool {
        matches!(self.backend, Backend::Halting(_))
    }

    pub fn count(&self) -> usize {
        self.enumerated.len()
    }

    pub fn elements(&self) -> &[u64] {
        &self.enumerated
    }

    pub fn contains(&self, k: u64) -> bool {
        self.members.contains(&k)
    }

    pub fn steps_used(&self) -> u64 {
        self.steps_used
    }

    fn check_count(&self, m: usize) -> Result<()> {
        if m > self.enumerated.len() {
            return Err(Error::InsufficientEnumeration { requested: m, available: self.enumerated.len() });
        }
        Ok(())
    }

    /// `φ(j)` for `1 <= j <= count`.
    pub fn element(&self, j: usize) -> Result<u64> {
        if j == 0 {
            return Err(Error::param("elements are indexed from 1"));
        }
        self.check_count(j)?;
        Ok(self.enumerated[j - 1])
    }

    /// Exact `Σ_{j<=m} 2^-φ(j)`.
    pub fn partial_sum(&self, m: usize) -> Result<Dyadic> {
        self.check_count(m)?;
        Ok(sum_pow2(&self.enumerated[..m]))
    }

    /// Exact bound on the mass of every element not yet listed:
    /// `1 - Σ 2^-k` over the candidates already decided.
    ///
    /// For halting backends the decided candidates are exactly the listed
    /// elements. For decidable sets every candidate up to the decision frontier
    /// `K` is settled, so the bound is `2^-K`.
    pub fn tail_majorant(&self) -> Dyadic {
        match &self.progress {
            Progress::Decided { through } => Dyadic::pow2(-(*through as i64)),
            Progress::Dovetail { .. } => &Dyadic::one() - &sum_pow2(&self.enumerated),
        }
    }

    /// Mass of candidates certified absent from the set yet still counted in
    /// [`tail_majorant`](Self::tail_majorant): halting-table programs whose
    /// control flow cannot reach a halt. Zero for decidable sets.
    pub fn excluded_mass(&self) -> Dyadic {
        match &self.backend {
            Backend::Halting(table) => {
                let ks: Vec<u64> = table
                    .programs
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| never_halts(p))
                    .map(|(i, _)| i as u64 + 1)
                    .collect();
                sum_pow2(&ks)
            }
            Backend::Recursive(_) => Dyadic::zero(),
        }
    }

    /// `S_0, S_1, ..., S_count`.
    pub fn partial_sums(&self) -> Vec<Dyadic> {
        let mut out = Vec::with_capacity(self.enumerated.len() + 1);
        let mut acc = Dyadic::zero();
        out.push(acc.clone());
        for &k in &self.enumerated {
            acc = &acc + &Dyadic::pow2(-(k as i64));
            out.push(acc.clone());
        }
        out
    }

    /// Upper bound on `Σ_{j>m} 2^-φ(j)` over the full (infinite) listing: the
    /// listed elements beyond `m` plus the tail majorant.
    pub fn remaining_mass(&self, m: usize) -> Result<Dyadic> {
        self.check_count(m)?;
        let rest = &self.enumerated[m..];
        let Some(&smallest) = rest.iter().min() else {
            return Ok(self.tail_majorant());
        };
        let cutoff = smallest + TAIL_CUTOFF_BITS;
        let kept: Vec<u64> = rest.iter().copied().filter(|&k| k <= cutoff).collect();
        let mut bound = &sum_pow2(&kept) + &self.tail_majorant();
        if kept.len() < rest.len() {
            // distinct exponents above the cutoff sum to less than 2^-cutoff
            bound = &bound + &Dyadic::pow2(-(cutoff as i64));
        }
        Ok(bound)
    }

    pub fn golden(&self) -> GoldenEnumeration {
        GoldenEnumeration { budget: self.steps_used, elements: self.enumerated.clone() }
    }
}

fn sum_pow2(ks: &[u64]) -> Dyadic {
    let Some(&max) = ks.iter().max() else {
        return Dyadic::zero();
    };
    // Σ 2^-k = (Σ 2^(max-k)) · 2^-max, summed as one big integer
    let mut acc = num_bigint::BigInt::from(0);
    for &k in ks {
        acc += num_bigint::BigInt::from(1) << (max - k);
    }
    Dyadic::new(acc, -(max as i64))
}

/// Frozen enumeration prefix: `{budget, elements}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenEnumeration {
    pub budget: u64,
    pub elements: Vec<u64>,
}
