//! Arithmetic sequences `1 < a_1 < a_2 < ...` with `a_n | a_{n+1}`, described
//! through their ratio sequence `q_n = a_n / a_{n-1}` (with `a_0 = 1`).
//!
//! Every rule guarantees `q_n >= 2`, so divisibility and strict growth are
//! automatic. Terms are exact big integers; ratio prefixes are cached because
//! density scans walk the same prefix many times.

use std::sync::{Arc, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::density::IndexSet;
use crate::error::{Error, Result};

/// How `q_n` is produced.
#[derive(Clone, Debug, PartialEq)]
pub enum RatioRule {
    /// `q_n = q`.
    Constant(u64),
    /// `q_n = pattern[(n - 1) % len]`.
    Periodic(Vec<u64>),
    /// `q_n = n + offset`; requires `offset >= 1`.
    Affine { offset: i64 },
    /// `q_n = prefix[n - 1]` for `n <= prefix.len()`, then `tail` re-indexed
    /// from 1.
    TableWithTail { prefix: Vec<u64>, tail: Box<RatioRule> },
    /// `q_n = n - floor(sqrt n)^2 + 2`: the cells `{k^2 + i}` each get their
    /// own ratio, every cell has density zero.
    SquaresPartition,
    /// `q_n = v_2(n) + 2`: the cell with value `i + 1` has density `2^-i`.
    DyadicPartition,
    /// Partition of the indices into cells, each carrying its own rule.
    LevelCells(Vec<LevelCell>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelCell {
    pub set: IndexSet,
    pub rule: RatioRule,
}

impl LevelCell {
    pub fn constant(set: IndexSet, value: u64) -> Self {
        LevelCell { set, rule: RatioRule::Constant(value) }
    }
}

impl RatioRule {
    pub fn validate(&self) -> Result<()> {
        let small = |q: u64| {
            if q < 2 {
                Err(Error::InvalidRule(format!("ratio {q} is below 2")))
            } else {
                Ok(())
            }
        };
        match self {
            RatioRule::Constant(q) => small(*q),
            RatioRule::Periodic(p) => {
                if p.is_empty() {
                    return Err(Error::InvalidRule("empty periodic pattern".into()));
                }
                p.iter().try_for_each(|&q| small(q))
            }
            RatioRule::Affine { offset } => {
                if *offset < 1 {
                    Err(Error::InvalidRule(format!(
                        "affine offset {offset} gives q_1 = {} < 2",
                        1 + offset
                    )))
                } else {
                    Ok(())
                }
            }
            RatioRule::TableWithTail { prefix, tail } => {
                prefix.iter().try_for_each(|&q| small(q))?;
                tail.validate()
            }
            RatioRule::SquaresPartition | RatioRule::DyadicPartition => Ok(()),
            RatioRule::LevelCells(cells) => {
                if cells.is_empty() {
                    return Err(Error::InvalidRule("level rule without cells".into()));
                }
                cells.iter().try_for_each(|c| c.rule.validate())
            }
        }
    }

    pub fn ratio(&self, n: u64) -> Result<u64> {
        debug_assert!(n >= 1);
        Ok(match self {
            RatioRule::Constant(q) => *q,
            RatioRule::Periodic(p) => p[((n - 1) % p.len() as u64) as usize],
            RatioRule::Affine { offset } => (n as i64 + offset) as u64,
            RatioRule::TableWithTail { prefix, tail } => {
                let len = prefix.len() as u64;
                if n <= len {
                    prefix[(n - 1) as usize]
                } else {
                    tail.ratio(n - len)?
                }
            }
            RatioRule::SquaresPartition => {
                let r = n.sqrt();
                n - r * r + 2
            }
            RatioRule::DyadicPartition => n.trailing_zeros() as u64 + 2,
            RatioRule::LevelCells(cells) => {
                let cell = cells
                    .iter()
                    .find(|c| c.set.contains(n))
                    .ok_or(Error::UncoveredIndex(n))?;
                cell.rule.ratio(n)?
            }
        })
    }

    /// Global supremum of the ratios when the rule is structurally bounded.
    pub fn sup(&self) -> Option<u64> {
        match self {
            RatioRule::Constant(q) => Some(*q),
            RatioRule::Periodic(p) => p.iter().copied().max(),
            RatioRule::TableWithTail { prefix, tail } => {
                let t = tail.sup()?;
                Some(prefix.iter().copied().max().unwrap_or(t).max(t))
            }
            RatioRule::LevelCells(cells) => {
                cells.iter().map(|c| c.rule.sup()).try_fold(0, |acc, s| s.map(|s| acc.max(s)))
            }
            RatioRule::Affine { .. } | RatioRule::SquaresPartition | RatioRule::DyadicPartition => {
                None
            }
        }
    }

    /// True when `q_n -> infinity` along all of the natural numbers.
    pub fn diverges(&self) -> bool {
        match self {
            RatioRule::Affine { .. } => true,
            RatioRule::TableWithTail { tail, .. } => tail.diverges(),
            _ => false,
        }
    }

    /// Exact natural density of `{n : q_n = value}` when the structure pins it.
    pub fn level_density(&self, value: u64) -> Option<BigRational> {
        let zero = BigRational::zero;
        match self {
            RatioRule::Constant(q) => Some(if *q == value { BigRational::one() } else { zero() }),
            RatioRule::Periodic(p) => {
                let hits = p.iter().filter(|&&q| q == value).count();
                Some(crate::rational::from_u64(hits as u64, p.len() as u64))
            }
            // each value occurs at most once
            RatioRule::Affine { .. } | RatioRule::SquaresPartition => Some(zero()),
            RatioRule::DyadicPartition => {
                if value < 2 {
                    Some(zero())
                } else {
                    let den = num_traits::pow(BigInt::from(2u32), (value - 1) as usize);
                    Some(BigRational::new(BigInt::one(), den))
                }
            }
            RatioRule::TableWithTail { tail, .. } => tail.level_density(value),
            RatioRule::LevelCells(cells) => {
                let mut total = zero();
                for cell in cells {
                    let cell_density = cell.set.exact_density();
                    if cell_density.as_ref().is_some_and(Zero::is_zero) {
                        continue;
                    }
                    match &cell.rule {
                        RatioRule::Constant(q) if *q == value => total += cell_density?,
                        RatioRule::Constant(_) => {}
                        // the level inside the cell sits in a null set
                        rule if rule.level_density(value).is_some_and(|d| d.is_zero()) => {}
                        _ => return None,
                    }
                }
                Some(total)
            }
        }
    }

    /// `(start, period)` such that `q_{n + period} = q_n` for all `n >= start`.
    pub fn eventual_period(&self) -> Option<(u64, u64)> {
        match self {
            RatioRule::Constant(_) => Some((1, 1)),
            RatioRule::Periodic(p) => Some((1, p.len() as u64)),
            RatioRule::TableWithTail { prefix, tail } => {
                let (start, period) = tail.eventual_period()?;
                Some((start + prefix.len() as u64, period))
            }
            RatioRule::LevelCells(cells) => {
                let mut acc = (1, 1);
                for cell in cells {
                    acc = crate::density::join_periods(acc, cell.set.eventual_period()?)?;
                    acc = crate::density::join_periods(acc, cell.rule.eventual_period()?)?;
                }
                Some(acc)
            }
            RatioRule::Affine { .. } | RatioRule::SquaresPartition | RatioRule::DyadicPartition => {
                None
            }
        }
    }

    /// Largest index any cell membership test is allowed to probe.
    pub(crate) fn probe_bound(&self) -> Option<u64> {
        match self {
            RatioRule::LevelCells(cells) => cells
                .iter()
                .filter_map(|c| match (c.set.bound(), c.rule.probe_bound()) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                })
                .min(),
            RatioRule::TableWithTail { prefix, tail } => {
                tail.probe_bound().map(|b| b + prefix.len() as u64)
            }
            _ => None,
        }
    }
}

/// An arithmetic sequence together with its term and ratio caches.
#[derive(Debug)]
pub struct ArithmeticSequence {
    rule: RatioRule,
    terms: RwLock<Vec<BigUint>>,
    ratios: RwLock<Arc<Vec<u64>>>,
}

impl Clone for ArithmeticSequence {
    fn clone(&self) -> Self {
        ArithmeticSequence::from_valid(self.rule.clone())
    }
}

impl PartialEq for ArithmeticSequence {
    fn eq(&self, other: &Self) -> bool {
        self.rule == other.rule
    }
}

impl ArithmeticSequence {
    pub fn new(rule: RatioRule) -> Result<Self> {
        rule.validate()?;
        Ok(Self::from_valid(rule))
    }

    fn from_valid(rule: RatioRule) -> Self {
        ArithmeticSequence {
            rule,
            terms: RwLock::new(vec![BigUint::one()]),
            ratios: RwLock::new(Arc::new(vec![0])),
        }
    }

    pub fn constant(q: u64) -> Result<Self> {
        Self::new(RatioRule::Constant(q))
    }

    pub fn periodic(pattern: Vec<u64>) -> Result<Self> {
        Self::new(RatioRule::Periodic(pattern))
    }

    pub fn affine(offset: i64) -> Result<Self> {
        Self::new(RatioRule::Affine { offset })
    }

    /// Ratio `k^2 + i  ->  i + 2`: a d-splitting sequence that is not splitting.
    pub fn squares_partition() -> Self {
        Self::from_valid(RatioRule::SquaresPartition)
    }

    /// Ratio `2^(i-1)(2k-1)  ->  i + 1`: level sets of positive density, so the
    /// sequence is not d-splitting.
    pub fn dyadic_partition() -> Self {
        Self::from_valid(RatioRule::DyadicPartition)
    }

    pub fn rule(&self) -> &RatioRule {
        &self.rule
    }

    pub fn ratio(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::InvalidParameter("ratios are indexed from 1".into()));
        }
        if let Some(&q) = self.ratios.read().expect("ratio cache poisoned").get(n as usize) {
            return Ok(q);
        }
        self.rule.ratio(n)
    }

    /// `q_0..=q_{n_max}` with the unused slot `q_0 = 0`, so `v[n] = q_n`.
    pub fn ratios(&self, n_max: u64) -> Result<Arc<Vec<u64>>> {
        {
            let cached = self.ratios.read().expect("ratio cache poisoned");
            if cached.len() > n_max as usize {
                return Ok(Arc::clone(&cached));
            }
        }
        if let Some(b) = self.rule.probe_bound() {
            if n_max > b {
                return Err(Error::BeyondBound { index: n_max, bound: b });
            }
        }
        let mut cache = self.ratios.write().expect("ratio cache poisoned");
        if cache.len() <= n_max as usize {
            let mut v = Vec::with_capacity(n_max as usize + 1);
            v.extend_from_slice(&cache);
            for n in v.len() as u64..=n_max {
                v.push(self.rule.ratio(n)?);
            }
            *cache = Arc::new(v);
        }
        Ok(Arc::clone(&cache))
    }

    /// `a_n = q_1 q_2 ... q_n`, with `a_0 = 1`.
    pub fn term(&self, n: u64) -> Result<BigUint> {
        {
            let terms = self.terms.read().expect("term cache poisoned");
            if let Some(t) = terms.get(n as usize) {
                return Ok(t.clone());
            }
        }
        let ratios = self.ratios(n)?;
        let mut terms = self.terms.write().expect("term cache poisoned");
        while terms.len() <= n as usize {
            let k = terms.len();
            let next = &terms[k - 1] * ratios[k];
            terms.push(next);
        }
        Ok(terms[n as usize].clone())
    }

    /// `q_n q_{n+1} ... q_{n+k} = a_{n+k} / a_{n-1}`, computed from the ratios.
    pub fn ratio_product(&self, n: u64, k: u64) -> Result<BigUint> {
        let ratios = self.ratios(n + k)?;
        Ok(ratios[n as usize..=(n + k) as usize]
            .iter()
            .fold(BigUint::one(), |acc, &q| acc * q))
    }

    /// Checks that level cells are pairwise disjoint and cover `[1, n_max]`.
    pub fn check_partition(&self, n_max: u64) -> Result<()> {
        fn walk(rule: &RatioRule, n: u64) -> Result<()> {
            match rule {
                RatioRule::LevelCells(cells) => {
                    let mut hits = cells.iter().filter(|c| c.set.contains(n));
                    let first = hits.next().ok_or(Error::UncoveredIndex(n))?;
                    if hits.next().is_some() {
                        return Err(Error::OverlappingCells(n));
                    }
                    walk(&first.rule, n)
                }
                RatioRule::TableWithTail { prefix, tail } if n > prefix.len() as u64 => {
                    walk(tail, n - prefix.len() as u64)
                }
                _ => Ok(()),
            }
        }
        (1..=n_max).try_for_each(|n| walk(&self.rule, n))
    }
}
