//! The GRAND query loop.
//!
//! Patterns are applied to the hard decision in policy order until the
//! candidate lands in the code or the truncation budget `T` is spent.
//! Membership is tested through column syndromes: the syndrome of
//! `θ(y) ⊕ e` is the hard-decision syndrome XOR the columns flipped by `e`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::bits::BitWord;
use crate::channel::{compute_llr, hard_decision};
use crate::codebook::BinaryCode;
use crate::error::{Error, Result};
use crate::pattern::{PatternEnumerator, RankPattern, Schedule, TieRule};

/// Reliability ranking of a channel output. Ranks are 1-based, ascending in
/// `|ℓ|`, ties broken by position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMap {
    /// `rank_of[i]`: rank of position `i`.
    pub rank_of: Vec<u8>,
    /// `position_of[r - 1]`: position holding rank `r`.
    pub position_of: Vec<u8>,
}

pub fn rank_map(llr: &[f64]) -> RankMap {
    assert!(llr.len() <= crate::pattern::MAX_N);
    let mut position_of: Vec<u8> = (0..llr.len() as u8).collect();
    position_of.sort_by(|&a, &b| {
        llr[a as usize]
            .abs()
            .total_cmp(&llr[b as usize].abs())
            .then(a.cmp(&b))
    });
    let mut rank_of = vec![0u8; llr.len()];
    for (r, &p) in position_of.iter().enumerate() {
        rank_of[p as usize] = r as u8 + 1;
    }
    RankMap {
        rank_of,
        position_of,
    }
}

/// Flips the positions holding the pattern's ranks.
pub fn apply_pattern(hard: &BitWord, p: &RankPattern, map: &RankMap) -> BitWord {
    let mut w = *hard;
    for &r in p.ranks() {
        w.flip(map.position_of[r as usize - 1] as usize);
    }
    w
}

/// A schedule flattened for the hot loop (ranks stored 0-based).
#[derive(Debug)]
struct CompiledSchedule {
    offsets: Vec<u32>,
    ranks: Vec<u8>,
}

impl CompiledSchedule {
    fn new(s: &Schedule, len: usize) -> Self {
        let mut offsets = Vec::with_capacity(len + 1);
        let mut ranks = Vec::new();
        offsets.push(0);
        for p in &s.patterns()[..len] {
            ranks.extend(p.ranks().iter().map(|r| r - 1));
            offsets.push(ranks.len() as u32);
        }
        CompiledSchedule { offsets, ranks }
    }

    #[inline]
    fn pattern(&self, t: usize) -> &[u8] {
        &self.ranks[self.offsets[t] as usize..self.offsets[t + 1] as usize]
    }
}

#[derive(Debug, Clone)]
enum PolicyKind {
    Static {
        schedule: Arc<Schedule>,
        compiled: Arc<CompiledSchedule>,
    },
    Sgrand,
}

/// Query order plus truncation budget.
#[derive(Debug, Clone)]
pub struct OrderingPolicy {
    kind: PolicyKind,
    truncation: usize,
}

impl OrderingPolicy {
    /// An ORB-type policy querying the first `truncation` patterns of `schedule`.
    pub fn static_schedule(schedule: Arc<Schedule>, truncation: usize) -> Result<Self> {
        if truncation == 0 || truncation > schedule.len() {
            return Err(Error::invalid(format!(
                "truncation {truncation} outside 1..={}",
                schedule.len()
            )));
        }
        let compiled = Arc::new(CompiledSchedule::new(&schedule, truncation));
        Ok(OrderingPolicy {
            kind: PolicyKind::Static { schedule, compiled },
            truncation,
        })
    }

    /// Soft GRAND: patterns generated online in ascending `Σ|ℓ|`.
    pub fn sgrand(truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::invalid("truncation must be at least 1"));
        }
        Ok(OrderingPolicy {
            kind: PolicyKind::Sgrand,
            truncation,
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn schedule(&self) -> Option<&Arc<Schedule>> {
        match &self.kind {
            PolicyKind::Static { schedule, .. } => Some(schedule),
            PolicyKind::Sgrand => None,
        }
    }

    pub fn is_sgrand(&self) -> bool {
        matches!(self.kind, PolicyKind::Sgrand)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Found,
    Abandoned,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub outcome: Outcome,
    /// Present iff the outcome is `Found`.
    pub codeword: Option<BitWord>,
    /// Query index of the hit, or the full budget when abandoned.
    pub queries_used: u64,
}

impl DecodeResult {
    pub fn is_found(&self) -> bool {
        self.outcome == Outcome::Found
    }
}

/// Per-decode instrumentation. The unit observer compiles away.
pub trait QueryObserver {
    #[inline]
    fn on_query(&mut self) {}

    #[inline]
    fn on_decode(&mut self, _result: &DecodeResult, _elapsed: Option<Duration>) {}

    /// Whether decodes should be timed.
    #[inline]
    fn timed(&self) -> bool {
        false
    }
}

impl QueryObserver for () {}

/// Running totals over many decodes.
#[derive(Debug, Clone, Default)]
pub struct QueryCounter {
    pub decodes: u64,
    pub queries: u64,
    pub abandoned: u64,
    pub wall: Duration,
    queries_this_decode: u64,
}

impl QueryCounter {
    pub fn new() -> Self {
        Self::default()
    }
}

impl QueryObserver for QueryCounter {
    fn on_query(&mut self) {
        self.queries_this_decode += 1;
    }

    fn on_decode(&mut self, result: &DecodeResult, elapsed: Option<Duration>) {
        debug_assert_eq!(self.queries_this_decode, result.queries_used);
        self.queries_this_decode = 0;
        self.decodes += 1;
        self.queries += result.queries_used;
        if result.outcome == Outcome::Abandoned {
            self.abandoned += 1;
        }
        if let Some(e) = elapsed {
            self.wall += e;
        }
    }

    fn timed(&self) -> bool {
        true
    }
}

/// A decoder bound to one code, with its column syndromes precomputed.
pub struct GrandDecoder<'c> {
    code: &'c dyn BinaryCode,
    column_syndromes: Vec<u128>,
}

impl<'c> GrandDecoder<'c> {
    pub fn new(code: &'c dyn BinaryCode) -> Self {
        GrandDecoder {
            column_syndromes: code.column_syndromes(),
            code,
        }
    }

    pub fn code(&self) -> &dyn BinaryCode {
        self.code
    }

    fn syndrome_of(&self, w: &BitWord) -> u128 {
        w.support().fold(0, |s, i| s ^ self.column_syndromes[i])
    }

    pub fn decode(&self, y: &[f64], sigma: f64, policy: &OrderingPolicy) -> Result<DecodeResult> {
        self.decode_observed(y, sigma, policy, &mut ())
    }

    pub fn decode_observed<O: QueryObserver>(
        &self,
        y: &[f64],
        sigma: f64,
        policy: &OrderingPolicy,
        observer: &mut O,
    ) -> Result<DecodeResult> {
        let n = self.code.n();
        if y.len() != n {
            return Err(Error::invalid(format!(
                "channel output has length {}, code length is {n}",
                y.len()
            )));
        }
        if let Some(s) = policy.schedule() {
            if s.n() != n {
                return Err(Error::invalid(format!(
                    "schedule is for n={}, code length is {n}",
                    s.n()
                )));
            }
        }
        let start = observer.timed().then(Instant::now);
        let llr = compute_llr(y, sigma)?;
        let map = rank_map(&llr);
        let hard = hard_decision(y);
        let base = self.syndrome_of(&hard);
        let by_rank: Vec<u128> = map
            .position_of
            .iter()
            .map(|&p| self.column_syndromes[p as usize])
            .collect();

        let hit = match &policy.kind {
            PolicyKind::Static { compiled, .. } => {
                let mut hit = None;
                for t in 0..policy.truncation {
                    observer.on_query();
                    let ranks = compiled.pattern(t);
                    let s = ranks.iter().fold(base, |s, &r| s ^ by_rank[r as usize]);
                    if s == 0 {
                        hit = Some((t, ranks.iter().map(|&r| r + 1).collect::<Vec<u8>>()));
                        break;
                    }
                }
                hit
            }
            PolicyKind::Sgrand => {
                let gamma: Vec<f64> = map
                    .position_of
                    .iter()
                    .map(|&p| llr[p as usize].abs())
                    .collect();
                let mut stream = PatternEnumerator::new(gamma, TieRule::Positions(map.position_of.clone()));
                let mut hit = None;
                for t in 0..policy.truncation {
                    let Some(p) = stream.next() else { break };
                    observer.on_query();
                    let s = p.ranks().iter().fold(base, |s, &r| s ^ by_rank[r as usize - 1]);
                    if s == 0 {
                        hit = Some((t, p.ranks().to_vec()));
                        break;
                    }
                }
                hit
            }
        };

        let result = match hit {
            Some((t, ranks)) => {
                let mut cw = hard;
                for r in ranks {
                    cw.flip(map.position_of[r as usize - 1] as usize);
                }
                debug_assert!(self.code.contains(&cw).unwrap_or(false));
                DecodeResult {
                    outcome: Outcome::Found,
                    codeword: Some(cw),
                    queries_used: t as u64 + 1,
                }
            }
            None => DecodeResult {
                outcome: Outcome::Abandoned,
                codeword: None,
                queries_used: policy.truncation as u64,
            },
        };
        observer.on_decode(&result, start.map(|s| s.elapsed()));
        Ok(result)
    }
}

/// One-shot decode; prefer [`GrandDecoder`] when decoding repeatedly.
pub fn decode(y: &[f64], code: &dyn BinaryCode, policy: &OrderingPolicy, sigma: f64) -> Result<DecodeResult> {
    GrandDecoder::new(code).decode(y, sigma, policy)
}

/// Soft GRAND's online pattern stream in the position domain.
pub struct SgrandStream {
    inner: PatternEnumerator<'static>,
    position_of: Vec<u8>,
    n: usize,
}

impl SgrandStream {
    /// Next position-domain pattern with its `Σ|ℓ|`.
    pub fn next_weighted(&mut self) -> Option<(BitWord, f64)> {
        let (p, w) = self.inner.next_weighted()?;
        let mut e = BitWord::zeros(self.n);
        for &r in p.ranks() {
            e.set(self.position_of[r as usize - 1] as usize, true);
        }
        Some((e, w))
    }
}

impl Iterator for SgrandStream {
    type Item = BitWord;

    fn next(&mut self) -> Option<BitWord> {
        self.next_weighted().map(|(e, _)| e)
    }
}

/// Every error pattern in ascending `Σ_{i ∈ e}|ℓ_i|`; equal sums go to the
/// smaller support, then the lexicographically smaller position set.
pub fn sgrand_policy(llr: &[f64]) -> SgrandStream {
    let map = rank_map(llr);
    let gamma: Vec<f64> = map.position_of.iter().map(|&p| llr[p as usize].abs()).collect();
    SgrandStream {
        inner: PatternEnumerator::new(gamma, TieRule::Positions(map.position_of.clone())),
        position_of: map.position_of,
        n: llr.len(),
    }
}
