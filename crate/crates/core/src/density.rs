//! Index sets, natural density and the `⊆^d` relation.
//!
//! A set is judged from a prefix `[1, N]`. The liminf/limsup of
//! `|A ∩ [1, n]| / n` are approximated by the min/max over the window
//! `n ∈ [N/2, N]`; when the set's structure pins the density exactly
//! (eventually periodic sets, squares, level sets of the worked examples, and
//! algebra over those) the exact value is carried along and preferred.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, from_u64};
use crate::sequences::{ArithmeticSequence, RatioRule};

/// Longest period tracked when deciding that a set is eventually periodic.
pub const PERIOD_CAP: u64 = 1 << 20;

/// Membership oracle with a declared safe enumeration bound.
#[derive(Clone)]
pub struct Predicate {
    pub label: String,
    pub test: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    pub bound: u64,
}

impl Predicate {
    pub fn new(label: impl Into<String>, bound: u64, test: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        Predicate { label: label.into(), test: Arc::new(test), bound }
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Predicate({:?}, bound {})", self.label, self.bound)
    }
}

impl PartialEq for Predicate {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.test, &other.test) && self.bound == other.bound
    }
}

/// A finitely described subset of `{1, 2, 3, ...}`.
#[derive(Clone, Debug, PartialEq)]
pub enum IndexSet {
    Finite(BTreeSet<u64>),
    /// `[lo, hi]`, unbounded above when `hi` is `None`.
    Interval { lo: u64, hi: Option<u64> },
    /// `{start, start + step, ...}`.
    Progression { start: u64, step: u64 },
    /// `{n : n mod modulus ∈ residues}`.
    Residues { modulus: u64, residues: Vec<u64> },
    /// `{k^2 : k >= 1}`.
    Squares,
    /// `{n : n - floor(sqrt n)^2 = i}`, i.e. the numbers `k^2 + i` with `i <= 2k`.
    ShiftedSquares(u64),
    /// `{n : q_n = value}`.
    LevelSet { seq: Arc<ArithmeticSequence>, value: u64 },
    /// `{n : q_n ∈ values}`.
    LevelValues { seq: Arc<ArithmeticSequence>, values: Arc<BTreeSet<u64>> },
    /// `{n : tails[q_n] < n}`: the tails of the listed level sets.
    LevelTails { seq: Arc<ArithmeticSequence>, tails: Arc<BTreeMap<u64, u64>> },
    /// Prefix data; `bits[n]` for `n <= bound`, never probed beyond.
    Sampled { bits: Arc<Vec<bool>>, bound: u64 },
    Predicate(Predicate),
    Union(Vec<IndexSet>),
    Intersection(Vec<IndexSet>),
    Difference(Box<IndexSet>, Box<IndexSet>),
    Complement(Box<IndexSet>),
    /// `A + k`: contains `n` iff `n - k >= 1` and `n - k ∈ A`.
    Shift(Box<IndexSet>, i64),
}

impl IndexSet {
    pub fn naturals() -> Self {
        IndexSet::Interval { lo: 1, hi: None }
    }

    pub fn empty() -> Self {
        IndexSet::Finite(BTreeSet::new())
    }

    pub fn evens() -> Self {
        IndexSet::Progression { start: 2, step: 2 }
    }

    pub fn odds() -> Self {
        IndexSet::Progression { start: 1, step: 2 }
    }

    pub fn finite(elems: impl IntoIterator<Item = u64>) -> Self {
        IndexSet::Finite(elems.into_iter().filter(|&n| n >= 1).collect())
    }

    pub fn level_set(seq: &Arc<ArithmeticSequence>, value: u64) -> Self {
        IndexSet::LevelSet { seq: Arc::clone(seq), value }
    }

    /// Wraps a prefix bitmap (`bits[0]` ignored) as a set bounded by its length.
    pub fn sampled(bits: Vec<bool>) -> Self {
        let bound = bits.len().saturating_sub(1) as u64;
        IndexSet::Sampled { bits: Arc::new(bits), bound }
    }

    pub fn union(self, other: IndexSet) -> Self {
        IndexSet::Union(vec![self, other])
    }

    pub fn intersect(self, other: IndexSet) -> Self {
        IndexSet::Intersection(vec![self, other])
    }

    pub fn minus(self, other: IndexSet) -> Self {
        IndexSet::Difference(Box::new(self), Box::new(other))
    }

    pub fn complement(self) -> Self {
        IndexSet::Complement(Box::new(self))
    }

    pub fn shift(self, k: i64) -> Self {
        if k == 0 {
            self
        } else {
            IndexSet::Shift(Box::new(self), k)
        }
    }

    /// `[lo, ∞) ∩ self`.
    pub fn from_index(self, lo: u64) -> Self {
        if lo <= 1 {
            self
        } else {
            self.intersect(IndexSet::Interval { lo, hi: None })
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            IndexSet::Finite(s) => s.contains(&n),
            IndexSet::Interval { lo, hi } => n >= *lo && hi.is_none_or(|h| n <= h),
            IndexSet::Progression { start, step } => {
                n >= *start && (n - start).is_multiple_of((*step).max(1)) && (*step > 0 || n == *start)
            }
            IndexSet::Residues { modulus, residues } => {
                let r = n % modulus;
                residues.iter().any(|&x| x % modulus == r)
            }
            IndexSet::Squares => n.sqrt().pow(2) == n,
            IndexSet::ShiftedSquares(i) => n - n.sqrt().pow(2) == *i,
            IndexSet::LevelSet { seq, value } => seq.ratio(n).is_ok_and(|q| q == *value),
            IndexSet::LevelValues { seq, values } => seq.ratio(n).is_ok_and(|q| values.contains(&q)),
            IndexSet::LevelTails { seq, tails } => seq
                .ratio(n)
                .is_ok_and(|q| tails.get(&q).is_some_and(|&t| n > t)),
            IndexSet::Sampled { bits, bound } => n <= *bound && bits.get(n as usize).copied().unwrap_or(false),
            IndexSet::Predicate(p) => n <= p.bound && (p.test)(n),
            IndexSet::Union(ch) => ch.iter().any(|c| c.contains(n)),
            IndexSet::Intersection(ch) => ch.iter().all(|c| c.contains(n)),
            IndexSet::Difference(a, b) => a.contains(n) && !b.contains(n),
            IndexSet::Complement(a) => !a.contains(n),
            IndexSet::Shift(a, k) => {
                let m = n as i64 - k;
                m >= 1 && a.contains(m as u64)
            }
        }
    }

    /// Largest index this set may be probed at, if limited.
    pub fn bound(&self) -> Option<u64> {
        fn min_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
            match (a, b) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            }
        }
        match self {
            IndexSet::Sampled { bound, .. } => Some(*bound),
            IndexSet::Predicate(p) => Some(p.bound),
            IndexSet::LevelSet { seq, .. }
            | IndexSet::LevelValues { seq, .. }
            | IndexSet::LevelTails { seq, .. } => {
                seq.rule().probe_bound()
            }
            IndexSet::Union(ch) | IndexSet::Intersection(ch) => {
                ch.iter().fold(None, |acc, c| min_opt(acc, c.bound()))
            }
            IndexSet::Difference(a, b) => min_opt(a.bound(), b.bound()),
            IndexSet::Complement(a) => a.bound(),
            IndexSet::Shift(a, k) => a.bound().map(|b| (b as i64 + k).max(0) as u64),
            _ => None,
        }
    }

    fn check_bound(&self, n_max: u64) -> Result<()> {
        match self.bound() {
            Some(b) if n_max > b => Err(Error::BeyondBound { index: n_max, bound: b }),
            _ => Ok(()),
        }
    }

    /// Cheap to enumerate without touching every index.
    fn is_sparse(&self) -> bool {
        match self {
            IndexSet::Finite(_) | IndexSet::Squares | IndexSet::ShiftedSquares(_) => true,
            IndexSet::Progression { step, .. } => *step >= 16,
            IndexSet::LevelSet { seq, .. } => {
                matches!(seq.rule(), RatioRule::SquaresPartition | RatioRule::Affine { .. })
            }
            IndexSet::LevelValues { seq, values } => {
                values.len() <= 64
                    && matches!(seq.rule(), RatioRule::SquaresPartition | RatioRule::Affine { .. })
            }
            IndexSet::Intersection(ch) => ch.iter().any(IndexSet::is_sparse),
            IndexSet::Difference(a, _) => a.is_sparse(),
            IndexSet::Union(ch) => ch.iter().all(IndexSet::is_sparse),
            IndexSet::Shift(a, _) => a.is_sparse(),
            _ => false,
        }
    }

    /// Sorted members in `[1, n_max]`.
    pub fn members(&self, n_max: u64) -> Result<Vec<u64>> {
        self.check_bound(n_max)?;
        if !self.is_sparse() {
            let bits = self.bitmap(n_max)?;
            return Ok((1..=n_max).filter(|&n| bits[n as usize]).collect());
        }
        Ok(match self {
            IndexSet::Finite(s) => s.range(1..=n_max).copied().collect(),
            IndexSet::Squares => (1..).map(|k: u64| k * k).take_while(|&s| s <= n_max).collect(),
            IndexSet::ShiftedSquares(i) => shifted_squares(*i, n_max),
            IndexSet::Progression { start, step } => {
                (0..).map(|j| start + j * step).take_while(|&n| n <= n_max).collect()
            }
            IndexSet::LevelSet { seq, value } => match seq.rule() {
                RatioRule::SquaresPartition if *value >= 2 => shifted_squares(value - 2, n_max),
                RatioRule::Affine { offset } => {
                    let n = *value as i64 - offset;
                    if n >= 1 && n as u64 <= n_max { vec![n as u64] } else { vec![] }
                }
                _ => vec![],
            },
            IndexSet::LevelValues { seq, values } => {
                let mut all = BTreeSet::new();
                for &v in values.iter() {
                    all.extend(IndexSet::level_set(seq, v).members(n_max)?);
                }
                all.into_iter().collect()
            }
            IndexSet::Intersection(ch) => {
                let (i, sparse) = ch.iter().enumerate().find(|(_, c)| c.is_sparse()).expect("sparse child");
                let others: Vec<&IndexSet> =
                    ch.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c).collect();
                sparse
                    .members(n_max)?
                    .into_iter()
                    .filter(|&n| others.iter().all(|c| c.contains(n)))
                    .collect()
            }
            IndexSet::Difference(a, b) => {
                a.members(n_max)?.into_iter().filter(|&n| !b.contains(n)).collect()
            }
            IndexSet::Union(ch) => {
                let mut all = BTreeSet::new();
                for c in ch {
                    all.extend(c.members(n_max)?);
                }
                all.into_iter().collect()
            }
            IndexSet::Shift(a, k) => {
                let src_max = (n_max as i64 - k).max(0) as u64;
                a.members(src_max)?
                    .into_iter()
                    .map(|m| m as i64 + k)
                    .filter(|&n| n >= 1 && n as u64 <= n_max)
                    .map(|n| n as u64)
                    .collect()
            }
            _ => unreachable!("dense variants take the bitmap path"),
        })
    }

    /// Membership flags `bits[0..=n_max]`, with `bits[0] = false`.
    pub fn bitmap(&self, n_max: u64) -> Result<Vec<bool>> {
        self.check_bound(n_max)?;
        let len = n_max as usize + 1;
        if self.is_sparse() {
            let mut bits = vec![false; len];
            for n in self.members(n_max)? {
                bits[n as usize] = true;
            }
            return Ok(bits);
        }
        let mut bits = match self {
            IndexSet::Interval { lo, hi } => {
                let hi = hi.map_or(n_max, |h| h.min(n_max));
                (0..len as u64).map(|n| n >= *lo && n <= hi).collect()
            }
            IndexSet::Progression { .. } | IndexSet::Residues { .. } | IndexSet::Predicate(_) => {
                (0..len as u64).map(|n| self.contains(n)).collect()
            }
            IndexSet::LevelSet { seq, value } => {
                let q = seq.ratios(n_max)?;
                q[..len].iter().map(|&v| v == *value).collect()
            }
            IndexSet::LevelValues { seq, values } => {
                let q = seq.ratios(n_max)?;
                q[..len].iter().map(|v| values.contains(v)).collect()
            }
            IndexSet::LevelTails { seq, tails } => {
                let q = seq.ratios(n_max)?;
                (0..len)
                    .map(|n| tails.get(&q[n]).is_some_and(|&t| n as u64 > t))
                    .collect()
            }
            IndexSet::Sampled { bits, .. } => bits[..len].to_vec(),
            IndexSet::Union(ch) => {
                let mut acc = vec![false; len];
                for c in ch {
                    for (a, b) in acc.iter_mut().zip(c.bitmap(n_max)?) {
                        *a |= b;
                    }
                }
                acc
            }
            IndexSet::Intersection(ch) => {
                let mut acc = vec![true; len];
                for c in ch {
                    for (a, b) in acc.iter_mut().zip(c.bitmap(n_max)?) {
                        *a &= b;
                    }
                }
                acc
            }
            IndexSet::Difference(a, b) => {
                let mut acc = a.bitmap(n_max)?;
                for (x, y) in acc.iter_mut().zip(b.bitmap(n_max)?) {
                    *x &= !y;
                }
                acc
            }
            IndexSet::Complement(a) => a.bitmap(n_max)?.into_iter().map(|b| !b).collect(),
            IndexSet::Shift(a, k) => {
                let mut acc = vec![false; len];
                if *k >= 0 {
                    let k = *k as usize;
                    if len > k {
                        let src = a.bitmap((len - 1 - k) as u64)?;
                        acc[k + 1..].copy_from_slice(&src[1..]);
                    }
                } else {
                    let k = k.unsigned_abs() as usize;
                    let src = a.bitmap(n_max + k as u64)?;
                    acc[1..].copy_from_slice(&src[1 + k..]);
                }
                acc
            }
            IndexSet::Finite(_) | IndexSet::Squares | IndexSet::ShiftedSquares(_) => unreachable!(),
        };
        bits[0] = false;
        Ok(bits)
    }

    /// `(start, period)` with `contains(n + period) == contains(n)` for `n >= start`.
    pub fn eventual_period(&self) -> Option<(u64, u64)> {
        match self {
            IndexSet::Finite(s) => Some((s.last().map_or(1, |m| m + 1), 1)),
            IndexSet::Interval { lo, hi } => Some((hi.map_or(*lo, |h| h + 1).max(1), 1)),
            IndexSet::Progression { start, step } => Some(((*start).max(1), (*step).max(1))),
            IndexSet::Residues { modulus, .. } => (*modulus <= PERIOD_CAP).then_some((1, *modulus)),
            IndexSet::LevelSet { seq, value } => match seq.rule() {
                RatioRule::DyadicPartition if *value < 2 => Some((1, 1)),
                RatioRule::DyadicPartition if *value - 1 <= 20 => Some((1, 1 << (value - 1))),
                RatioRule::Affine { offset } => Some(((*value as i64 - offset).max(0) as u64 + 1, 1)),
                rule => rule.eventual_period(),
            },
            IndexSet::LevelValues { seq, values } => match seq.rule() {
                RatioRule::DyadicPartition => {
                    let top = values.iter().copied().max().unwrap_or(1);
                    (top <= 21).then(|| (1, 1u64 << top.saturating_sub(1)))
                }
                RatioRule::Affine { offset } => {
                    let last = values.iter().map(|&v| (v as i64 - offset).max(0) as u64).max().unwrap_or(0);
                    Some((last + 1, 1))
                }
                rule => rule.eventual_period(),
            },
            IndexSet::Union(ch) => {
                let parts: Vec<_> = ch.iter().map(|c| c.eventual_period()).collect();
                if let Some(full) = ch.iter().zip(&parts).find_map(|(c, p)| p.filter(|p| c.eventually_all(*p))) {
                    return Some(full);
                }
                parts.into_iter().try_fold((1, 1), |acc, p| join_periods(acc, p?))
            }
            IndexSet::Intersection(ch) => {
                let parts: Vec<_> = ch.iter().map(|c| c.eventual_period()).collect();
                if let Some(empty) = ch.iter().zip(&parts).find_map(|(c, p)| p.filter(|p| c.eventually_none(*p))) {
                    return Some(empty);
                }
                parts.into_iter().try_fold((1, 1), |acc, p| join_periods(acc, p?))
            }
            IndexSet::Difference(a, b) => {
                let pa = a.eventual_period();
                if let Some(p) = pa.filter(|p| a.eventually_none(*p)) {
                    return Some(p);
                }
                let pb = b.eventual_period();
                if let Some(p) = pb.filter(|p| b.eventually_all(*p)) {
                    return Some(p);
                }
                join_periods(pa?, pb?)
            }
            IndexSet::Complement(a) => a.eventual_period(),
            IndexSet::Shift(a, k) => {
                let (start, period) = a.eventual_period()?;
                Some(((start as i64 + k).max(1) as u64, period))
            }
            _ => None,
        }
    }

    fn eventually_none(&self, (start, period): (u64, u64)) -> bool {
        (start..start + period).all(|n| !self.contains(n))
    }

    fn eventually_all(&self, (start, period): (u64, u64)) -> bool {
        (start..start + period).all(|n| self.contains(n))
    }

    /// Natural density when the structure pins it.
    pub fn exact_density(&self) -> Option<BigRational> {
        if let Some((start, period)) = self.eventual_period() {
            let hits = (start..start + period).filter(|&n| self.contains(n)).count();
            return Some(from_u64(hits as u64, period));
        }
        let zero = BigRational::zero();
        let one = BigRational::one();
        match self {
            IndexSet::Squares | IndexSet::ShiftedSquares(_) => Some(zero),
            IndexSet::LevelSet { seq, value } => seq.rule().level_density(*value),
            IndexSet::LevelValues { seq, values } => {
                values.iter().try_fold(zero, |acc, &v| Some(acc + seq.rule().level_density(v)?))
            }
            IndexSet::LevelTails { seq, tails } => {
                tails.keys().try_fold(zero, |acc, &v| Some(acc + seq.rule().level_density(v)?))
            }
            IndexSet::Union(ch) => {
                let ds: Vec<_> = ch.iter().map(IndexSet::exact_density).collect();
                if ds.iter().any(|d| d.as_ref() == Some(&one)) {
                    return Some(one);
                }
                let mut nonzero = ds.into_iter().filter(|d| d.as_ref() != Some(&zero));
                match (nonzero.next(), nonzero.next()) {
                    (None, _) => Some(zero),
                    (Some(d), None) => d,
                    _ => None,
                }
            }
            IndexSet::Intersection(ch) => {
                let ds: Vec<_> = ch.iter().map(IndexSet::exact_density).collect();
                if ds.iter().any(|d| d.as_ref() == Some(&zero)) {
                    return Some(zero);
                }
                let mut rest = ds.into_iter().filter(|d| d.as_ref() != Some(&one));
                match (rest.next(), rest.next()) {
                    (None, _) => Some(one),
                    (Some(d), None) => d,
                    _ => None,
                }
            }
            IndexSet::Difference(a, b) => {
                let (da, db) = (a.exact_density(), b.exact_density());
                if da.as_ref() == Some(&zero) || db.as_ref() == Some(&one) {
                    Some(zero)
                } else if db.as_ref() == Some(&zero) {
                    da
                } else if da.as_ref() == Some(&one) {
                    db.map(|d| one - d)
                } else {
                    None
                }
            }
            IndexSet::Complement(a) => a.exact_density().map(|d| one - d),
            IndexSet::Shift(a, _) => a.exact_density(),
            _ => None,
        }
    }

    /// `Some(true)` / `Some(false)` when finiteness is structurally known.
    pub fn known_finite(&self) -> Option<bool> {
        if let Some(p) = self.eventual_period() {
            return Some(self.eventually_none(p));
        }
        if self.exact_density().is_some_and(|d| !d.is_zero()) {
            return Some(false);
        }
        match self {
            IndexSet::Squares | IndexSet::ShiftedSquares(_) => Some(false),
            IndexSet::LevelSet { seq, value } => match seq.rule() {
                RatioRule::SquaresPartition => Some(*value < 2),
                _ => None,
            },
            IndexSet::LevelValues { seq, values } => match seq.rule() {
                RatioRule::SquaresPartition => Some(values.iter().all(|&v| v < 2)),
                _ => None,
            },
            IndexSet::Union(ch) => {
                let fs: Vec<_> = ch.iter().map(IndexSet::known_finite).collect();
                if fs.contains(&Some(false)) {
                    Some(false)
                } else if fs.iter().all(|f| *f == Some(true)) {
                    Some(true)
                } else {
                    None
                }
            }
            IndexSet::Intersection(ch) => ch.iter().any(|c| c.known_finite() == Some(true)).then_some(true),
            IndexSet::Difference(a, _) => (a.known_finite() == Some(true)).then_some(true),
            IndexSet::Complement(a) => (a.known_finite() == Some(true)).then_some(false),
            IndexSet::Shift(a, _) => a.known_finite(),
            _ => None,
        }
    }

    /// Short human readable description used in witnesses and reports.
    pub fn describe(&self) -> String {
        match self {
            IndexSet::Finite(s) if s.len() <= 8 => format!("{s:?}"),
            IndexSet::Finite(s) => format!("finite set of {} elements", s.len()),
            IndexSet::Interval { lo, hi: None } if *lo <= 1 => "N".into(),
            IndexSet::Interval { lo, hi: None } => format!("[{lo}, inf)"),
            IndexSet::Interval { lo, hi: Some(h) } => format!("[{lo}, {h}]"),
            IndexSet::Progression { start, step } => format!("{start} + {step}N"),
            IndexSet::Residues { modulus, residues } => format!("n mod {modulus} in {residues:?}"),
            IndexSet::Squares => "squares".into(),
            IndexSet::ShiftedSquares(i) => format!("squares + {i}"),
            IndexSet::LevelSet { value, .. } => format!("{{q_n = {value}}}"),
            IndexSet::LevelValues { values, .. } if values.len() <= 6 => format!("{{q_n in {values:?}}}"),
            IndexSet::LevelValues { values, .. } => format!("{{q_n in {} values}}", values.len()),
            IndexSet::LevelTails { tails, .. } => format!("tails of {} level sets", tails.len()),
            IndexSet::Sampled { bound, .. } => format!("sampled prefix to {bound}"),
            IndexSet::Predicate(p) => p.label.clone(),
            IndexSet::Union(ch) => join(ch, " ∪ "),
            IndexSet::Intersection(ch) => join(ch, " ∩ "),
            IndexSet::Difference(a, b) => format!("({}) \\ ({})", a.describe(), b.describe()),
            IndexSet::Complement(a) => format!("N \\ ({})", a.describe()),
            IndexSet::Shift(a, k) => format!("({}) {} {}", a.describe(), if *k < 0 { '-' } else { '+' }, k.abs()),
        }
    }
}

fn join(ch: &[IndexSet], sep: &str) -> String {
    if ch.len() > 6 {
        return format!("combination of {} sets", ch.len());
    }
    ch.iter().map(|c| format!("({})", c.describe())).collect::<Vec<_>>().join(sep)
}

fn shifted_squares(i: u64, n_max: u64) -> Vec<u64> {
    // k^2 + i is in the cell only while i <= 2k
    let k0 = i.div_ceil(2).max(1);
    (k0..).map(|k| k * k + i).take_while(|&n| n <= n_max).collect()
}

/// Combines two eventual periods; `None` when the joint period is too long.
pub fn join_periods(a: (u64, u64), b: (u64, u64)) -> Option<(u64, u64)> {
    let period = a.1.lcm(&b.1);
    (period <= PERIOD_CAP).then_some((a.0.max(b.0), period))
}

/// Three-valued outcome of judging a limit property from a prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tri {
    Holds,
    Fails,
    Inconclusive,
}

/// A verdict together with whether structure (rather than a prefix) settled it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Judgement {
    pub verdict: Tri,
    pub certain: bool,
}

impl Judgement {
    pub fn certain(verdict: Tri) -> Self {
        Judgement { verdict, certain: true }
    }

    pub fn evidence(verdict: Tri) -> Self {
        Judgement { verdict, certain: false }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Tri::Holds
    }

    pub fn fails(&self) -> bool {
        self.verdict == Tri::Fails
    }
}

/// Prefix statistics of a set (or of a set inside a reference set).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub prefix: u64,
    pub count: u64,
    #[serde(serialize_with = "rational::serialize")]
    pub point: BigRational,
    #[serde(serialize_with = "rational::serialize")]
    pub window_low: BigRational,
    #[serde(serialize_with = "rational::serialize")]
    pub window_high: BigRational,
    /// Members in `(N/2, N]`; zero is read as evidence of finiteness.
    pub tail_count: u64,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub exact: Option<BigRational>,
}

impl DensityEstimate {
    /// Statistics of `bits` over `[1, n_max]`.
    pub fn from_bitmap(bits: &[bool], n_max: u64, exact: Option<BigRational>) -> Result<Self> {
        Self::relative_inner(bits, None, n_max, exact)
    }

    /// Statistics of `A ∩ S` measured relative to `S`: the ratios are
    /// `|A ∩ S ∩ [1, n]| / |S ∩ [1, n]|`.
    pub fn relative(a: &[bool], s: &[bool], n_max: u64, exact: Option<BigRational>) -> Result<Self> {
        Self::relative_inner(a, Some(s), n_max, exact)
    }

    /// Same statistics as [`DensityEstimate::from_bitmap`], from the sorted
    /// members in `[1, n_max]`.
    pub fn from_members(members: &[u64], n_max: u64, exact: Option<BigRational>) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::EmptyPrefix("prefix length 0".into()));
        }
        let members = &members[..members.partition_point(|&m| m <= n_max)];
        let lo = (n_max / 2).max(1);
        let below = |n: u64| members.partition_point(|&m| m <= n) as u64;
        let less = |a: (u64, u64), b: (u64, u64)| (a.0 as u128) * (b.1 as u128) < (b.0 as u128) * (a.1 as u128);
        let start = (below(lo), lo);
        let (mut low, mut high) = (start, start);
        let first = members.partition_point(|&m| m <= lo);
        for (j, &m) in members.iter().enumerate().skip(first) {
            // the ratio peaks at a member and bottoms out just before one
            let at = (j as u64 + 1, m);
            let before = (j as u64, m - 1);
            if less(high, at) {
                high = at;
            }
            if m > lo && less(before, low) {
                low = before;
            }
        }
        let end = (members.len() as u64, n_max);
        if less(end, low) {
            low = end;
        }
        let count = members.len() as u64;
        Ok(DensityEstimate {
            prefix: n_max,
            count,
            point: from_u64(count, n_max),
            window_low: from_u64(low.0, low.1),
            window_high: from_u64(high.0, high.1),
            tail_count: count - below(n_max / 2),
            exact,
        })
    }

    fn relative_inner(a: &[bool], s: Option<&[bool]>, n_max: u64, exact: Option<BigRational>) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::EmptyPrefix("prefix length 0".into()));
        }
        let lo = (n_max / 2).max(1);
        let mut count = 0u64;
        let mut base = 0u64;
        let mut tail_count = 0u64;
        let mut low: Option<(u64, u64)> = None;
        let mut high: Option<(u64, u64)> = None;
        for n in 1..=n_max {
            let in_s = s.is_none_or(|s| s[n as usize]);
            if in_s {
                base += 1;
                if a[n as usize] {
                    count += 1;
                    if n > n_max / 2 {
                        tail_count += 1;
                    }
                }
            }
            if n >= lo && base > 0 {
                let r = (count, base);
                if low.is_none_or(|(c, b)| (r.0 as u128) * (b as u128) < (c as u128) * (r.1 as u128)) {
                    low = Some(r);
                }
                if high.is_none_or(|(c, b)| (r.0 as u128) * (b as u128) > (c as u128) * (r.1 as u128)) {
                    high = Some(r);
                }
            }
        }
        if base == 0 {
            return Err(Error::EmptyPrefix(format!("reference set has no element in [1, {n_max}]")));
        }
        let (low, high) = (low.expect("window nonempty"), high.expect("window nonempty"));
        Ok(DensityEstimate {
            prefix: n_max,
            count,
            point: from_u64(count, base),
            window_low: from_u64(low.0, low.1),
            window_high: from_u64(high.0, high.1),
            tail_count,
            exact,
        })
    }

    /// Judges `d = 0` at `threshold`.
    pub fn zero_verdict(&self, threshold: &BigRational) -> Judgement {
        if let Some(e) = &self.exact {
            return Judgement::certain(if e.is_zero() { Tri::Holds } else { Tri::Fails });
        }
        if self.tail_count == 0 || &self.window_high <= threshold {
            Judgement::evidence(Tri::Holds)
        } else if &self.window_low > threshold {
            Judgement::evidence(Tri::Fails)
        } else {
            Judgement::evidence(Tri::Inconclusive)
        }
    }

    /// Judges `d > 0` (positive upper density) at `threshold`.
    pub fn positive_verdict(&self, threshold: &BigRational) -> Judgement {
        let z = self.zero_verdict(threshold);
        let verdict = match z.verdict {
            Tri::Holds => Tri::Fails,
            Tri::Fails => Tri::Holds,
            Tri::Inconclusive => Tri::Inconclusive,
        };
        Judgement { verdict, certain: z.certain }
    }
}

/// `|A ∩ [1, n_max]|`.
pub fn count(a: &IndexSet, n_max: u64) -> Result<u64> {
    Ok(a.members(n_max)?.len() as u64)
}

pub fn density_estimate(a: &IndexSet, n_max: u64) -> Result<DensityEstimate> {
    let bits = a.bitmap(n_max)?;
    DensityEstimate::from_bitmap(&bits, n_max, a.exact_density())
}

/// Estimate of `A ∩ S` relative to `S`, with the exact ratio when both
/// densities are pinned and `d(S) > 0`.
pub fn relative_estimate(a: &IndexSet, s: &IndexSet, n_max: u64) -> Result<DensityEstimate> {
    let inside = a.clone().intersect(s.clone());
    let exact = match (inside.exact_density(), s.exact_density()) {
        (Some(num), _) if num.is_zero() => Some(num),
        (Some(num), Some(den)) if !den.is_zero() => Some(num / den),
        _ => None,
    };
    DensityEstimate::relative(&a.bitmap(n_max)?, &s.bitmap(n_max)?, n_max, exact)
}

/// `A ⊆^d B`, judged through the density of `A \ B`.
pub fn subset_d(a: &IndexSet, b: &IndexSet, n_max: u64, threshold: &BigRational) -> Result<(Judgement, DensityEstimate)> {
    rational::check_unit_open("threshold", threshold)?;
    let residual = density_estimate(&a.clone().minus(b.clone()), n_max)?;
    Ok((residual.zero_verdict(threshold), residual))
}

/// `L_k(A) = A ∪ (A + 1) ∪ ... ∪ (A + k)`.
pub fn shift_union(a: &IndexSet, k: u64) -> IndexSet {
    if k == 0 {
        return a.clone();
    }
    IndexSet::Union((0..=k as i64).map(|i| a.clone().shift(i)).collect())
}

/// Per-cell thresholds `t_m` such that the tails `cell_m ∩ (t_m, ∞)` use at
/// most `budget / 2^m` of relative mass at every `n ∈ [N/2, N]`.
pub fn cover_thresholds(cells: &[Vec<u64>], n_max: u64, budget: &BigRational) -> Result<Vec<u64>> {
    rational::check_unit_open("budget", budget)?;
    let (p, r) = rational::to_u128_pair(budget)
        .filter(|(_, r)| *r < 1 << 40)
        .ok_or_else(|| Error::InvalidParameter("budget denominator too large".into()))?;
    let lo = (n_max / 2).max(1);
    let mut out = Vec::with_capacity(cells.len());
    for (i, members) in cells.iter().enumerate() {
        let m = (i as u32 + 1).min(60);
        // allowance a = p / (r 2^m); need c(n) - j <= a n, i.e. j >= (c r 2^m - p n) / (r 2^m)
        let den = (r << m) as i128;
        let excess = |c: u64, n: u64| c as i128 * den - p as i128 * n as i128;
        let below_lo = members.partition_point(|&x| x < lo) as u64;
        let mut worst = excess(below_lo, lo);
        for (j, &x) in members.iter().enumerate().filter(|(_, &x)| x >= lo && x <= n_max) {
            worst = worst.max(excess(j as u64 + 1, x));
        }
        let need = if worst <= 0 { 0 } else { (worst + den - 1) / den } as usize;
        let t = if need == 0 { 0 } else { members[need.min(members.len()) - 1] };
        out.push(t);
    }
    Ok(out)
}

/// A set `C` covering all but finitely many points of every cell, of prefix
/// density at most `budget` on `[N/2, N]`.
pub fn diagonal_cover(cells: &[IndexSet], n_max: u64, budget: &BigRational) -> Result<IndexSet> {
    let half = rational::ratio(1, 2);
    let mut members = Vec::with_capacity(cells.len());
    for (i, cell) in cells.iter().enumerate() {
        let est = density_estimate(cell, n_max)?;
        if est.positive_verdict(&(budget * &half)).holds() {
            return Err(Error::BudgetUnachievable(format!(
                "cell {} ({}) has density about {:.4}",
                i + 1,
                cell.describe(),
                rational::to_f64(est.exact.as_ref().unwrap_or(&est.point))
            )));
        }
        members.push(cell.members(n_max)?);
    }
    let thresholds = cover_thresholds(&members, n_max, budget)?;
    Ok(IndexSet::Union(
        cells.iter().zip(thresholds).map(|(c, t)| c.clone().from_index(t + 1)).collect(),
    ))
}
