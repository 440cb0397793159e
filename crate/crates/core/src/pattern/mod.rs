//! Rank-domain error patterns, ORB-type weight functions and schedules.
//!
//! A pattern is the set of ranks (1 = least reliable position) to flip.
//! A schedule lists patterns in query order and can be applied to any
//! channel output once its reliability ranking is known.

mod enumerate;
mod io;
mod weights;

pub use enumerate::{enumerate_schedule, PatternEnumerator, TieRule};
pub(crate) use io::header_value;
pub use io::{load_schedule, read_schedule, save_schedule, write_schedule};
pub use weights::{
    cdf_weight_function, fit_three_line, three_line_weight_function, ThreeLineParams,
};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported block length (ranks are stored as `u8`).
pub const MAX_N: usize = 128;

/// Default offline schedule length.
pub const DEFAULT_SCHEDULE_LEN: usize = 50_000;

/// Strictly ascending ranks in `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RankPattern(Vec<u8>);

impl RankPattern {
    pub fn empty() -> Self {
        RankPattern(Vec::new())
    }

    pub fn new(ranks: Vec<u8>, n: usize) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::invalid(format!("n={n} exceeds {MAX_N}")));
        }
        if ranks.iter().any(|&r| r == 0 || r as usize > n) {
            return Err(Error::invalid(format!("ranks {ranks:?} outside 1..={n}")));
        }
        if ranks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!("ranks {ranks:?} not strictly ascending")));
        }
        Ok(RankPattern(ranks))
    }

    pub(crate) fn from_sorted_unchecked(ranks: Vec<u8>) -> Self {
        debug_assert!(ranks.windows(2).all(|w| w[0] < w[1]));
        RankPattern(ranks)
    }

    pub fn ranks(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest rank in the pattern.
    pub fn max_rank(&self) -> Option<u8> {
        self.0.last().copied()
    }

    /// The ranks as a bitmask (bit `r - 1` for rank `r`).
    pub fn mask(&self) -> u128 {
        self.0.iter().fold(0u128, |m, &r| m | 1 << (r - 1))
    }

    pub fn from_mask(mask: u128) -> Self {
        let mut ranks = Vec::with_capacity(mask.count_ones() as usize);
        let mut rest = mask;
        while rest != 0 {
            ranks.push(rest.trailing_zeros() as u8 + 1);
            rest &= rest - 1;
        }
        RankPattern(ranks)
    }
}

impl fmt::Debug for RankPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}}")
    }
}

/// The total order used for ties: smaller support first, then lexicographic.
pub fn tie_order(a: &[u8], b: &[u8]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Unit,
    Rank,
    Cdf,
    #[serde(rename = "3line")]
    ThreeLine,
    /// Sorted channel reliabilities (online soft GRAND).
    Soft,
}

impl WeightKind {
    pub fn label(&self) -> &'static str {
        match self {
            WeightKind::Unit => "unit",
            WeightKind::Rank => "rank",
            WeightKind::Cdf => "cdf",
            WeightKind::ThreeLine => "3line",
            WeightKind::Soft => "soft",
        }
    }
}

impl std::str::FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(WeightKind::Unit),
            "rank" => Ok(WeightKind::Rank),
            "cdf" => Ok(WeightKind::Cdf),
            "3line" | "three_line" | "threeline" => Ok(WeightKind::ThreeLine),
            "soft" => Ok(WeightKind::Soft),
            _ => Err(Error::invalid(format!("unknown weight kind {s:?}"))),
        }
    }
}

/// Per-rank weights `gamma[r - 1]`, nondecreasing and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    kind: WeightKind,
    gamma: Vec<f64>,
}

impl WeightFunction {
    pub fn new(kind: WeightKind, gamma: Vec<f64>) -> Result<Self> {
        if gamma.len() > MAX_N {
            return Err(Error::invalid(format!("n={} exceeds {MAX_N}", gamma.len())));
        }
        if gamma.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        if gamma.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("weights must be nondecreasing in rank"));
        }
        Ok(WeightFunction { kind, gamma })
    }

    /// Plain GRAND: every flip costs one.
    pub fn unit(n: usize) -> Self {
        WeightFunction::new(WeightKind::Unit, vec![1.0; n]).expect("unit weights")
    }

    /// ORBGRAND: rank `r` costs `r`.
    pub fn rank(n: usize) -> Self {
        WeightFunction::new(WeightKind::Rank, (1..=n).map(|r| r as f64).collect())
            .expect("rank weights")
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn n(&self) -> usize {
        self.gamma.len()
    }
}

/// `Σ gamma[r]` over the pattern, summed in ascending rank order.
pub fn accumulated_weight(p: &RankPattern, wf: &WeightFunction) -> f64 {
    sum_weights(p.ranks(), wf.gamma())
}

#[inline]
pub(crate) fn sum_weights(ranks: &[u8], gamma: &[f64]) -> f64 {
    ranks.iter().fold(0.0, |s, &r| s + gamma[r as usize - 1])
}

/// Sum of ranks (ORBGRAND's logistic weight).
pub fn logistic_weight(p: &RankPattern) -> u32 {
    p.ranks().iter().map(|&r| r as u32).sum()
}

/// Every pattern of logistic weight `w` with ranks at most `n`, i.e. the
/// partitions of `w` into distinct parts `<= n`, in tie order.
pub fn patterns_at_logistic_weight(w: u32, n: usize) -> Vec<RankPattern> {
    fn extend(remaining: u32, min_part: u32, max_part: u32, cur: &mut Vec<u8>, out: &mut Vec<RankPattern>) {
        if remaining == 0 {
            out.push(RankPattern(cur.clone()));
            return;
        }
        let mut part = min_part;
        while part <= max_part && part <= remaining {
            // remaining after `part` must be 0 or use parts > part
            let rest = remaining - part;
            if rest == 0 || rest > part {
                cur.push(part as u8);
                extend(rest, part + 1, max_part, cur, out);
                cur.pop();
            }
            part += 1;
        }
    }
    let n = n.min(MAX_N) as u32;
    let mut out = Vec::new();
    extend(w, 1, n, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| tie_order(a.ranks(), b.ranks()));
    out
}

/// An ordered list of rank patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    n: usize,
    tag: String,
    patterns: Vec<RankPattern>,
}

impl Schedule {
    /// Validates: nonempty, starts with the empty pattern, ranks in range,
    /// no duplicates.
    pub fn new(n: usize, tag: impl Into<String>, patterns: Vec<RankPattern>) -> Result<Self> {
        let tag = tag.into();
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidSchedule(format!("n={n} outside 1..={MAX_N}")));
        }
        if tag.is_empty() || tag.chars().any(char::is_whitespace) {
            return Err(Error::InvalidSchedule(format!("bad tag {tag:?}")));
        }
        match patterns.first() {
            None => return Err(Error::InvalidSchedule("schedule is empty".into())),
            Some(p) if !p.is_empty() => {
                return Err(Error::InvalidSchedule("first pattern must be empty".into()))
            }
            _ => {}
        }
        let mut seen = std::collections::HashSet::with_capacity(patterns.len());
        for p in &patterns {
            if p.max_rank().is_some_and(|r| r as usize > n) {
                return Err(Error::InvalidSchedule(format!("pattern {p:?} exceeds n={n}")));
            }
            if !seen.insert(p.mask()) {
                return Err(Error::InvalidSchedule(format!("duplicate pattern {p:?}")));
            }
        }
        Ok(Schedule { n, tag, patterns })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn patterns(&self) -> &[RankPattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// The first `len` patterns.
    pub fn truncated(&self, len: usize) -> Result<Schedule> {
        if len == 0 || len > self.len() {
            return Err(Error::invalid(format!(
                "cannot truncate a {}-pattern schedule to {len}",
                self.len()
            )));
        }
        Ok(Schedule {
            n: self.n,
            tag: self.tag.clone(),
            patterns: self.patterns[..len].to_vec(),
        })
    }
}
