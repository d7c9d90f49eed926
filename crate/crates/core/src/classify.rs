//! Ratio behaviour along index sets: q-bounded and q-divergent sets, the
//! splitting and d-splitting properties, and extraction of a q-divergent
//! part of full relative density.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::density::{cover_thresholds, DensityEstimate, IndexSet, Judgement, Tri};
use crate::error::{Error, Result};
use crate::rational::{self, from_u64};
use crate::sequences::{ArithmeticSequence, RatioRule};

/// Default ceiling on the observed maximum for q-bounded evidence.
pub const DEFAULT_BOUND_CAP: u64 = 256;

/// `A_v = {n : q_n = v}` with its prefix statistics.
#[derive(Clone, Debug, Serialize)]
pub struct Level {
    pub value: u64,
    pub set: IndexSet,
    pub estimate: DensityEstimate,
}

/// Members of `within` (all of `[1, N]` when `None`) grouped by ratio value.
pub fn level_members(seq: &ArithmeticSequence, within: Option<&[bool]>, n_max: u64) -> Result<BTreeMap<u64, Vec<u64>>> {
    let ratios = seq.ratios(n_max)?;
    let mut out: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for n in 1..=n_max {
        if within.is_none_or(|w| w[n as usize]) {
            out.entry(ratios[n as usize]).or_default().push(n);
        }
    }
    Ok(out)
}

/// The level sets met in `[1, N]`, in increasing order of value.
pub fn level_sets(seq: &Arc<ArithmeticSequence>, n_max: u64) -> Result<Vec<Level>> {
    level_members(seq, None, n_max)?
        .into_iter()
        .map(|(value, members)| {
            let set = IndexSet::level_set(seq, value);
            let estimate = DensityEstimate::from_members(&members, n_max, set.exact_density())?;
            Ok(Level { value, set, estimate })
        })
        .collect()
}

fn v2(n: u64) -> u64 {
    n.trailing_zeros() as u64
}

/// A bound for `q_n` along `A` that follows from the structure of both.
pub fn bound_on(seq: &ArithmeticSequence, a: &IndexSet) -> Option<u64> {
    let rule = seq.rule();
    if let Some(s) = rule.sup() {
        return Some(s);
    }
    match a {
        IndexSet::Finite(s) => return s.iter().map(|&n| seq.ratio(n).ok()).try_fold(0, |m, q| Some(m.max(q?))),
        IndexSet::Interval { lo, hi: Some(h) } => {
            return (*lo..=*h).map(|n| seq.ratio(n).ok()).try_fold(0, |m, q| Some(m.max(q?)))
        }
        IndexSet::LevelSet { seq: s, value } if s.as_ref() == seq => return Some(*value),
        IndexSet::LevelValues { seq: s, values } if s.as_ref() == seq => return Some(values.iter().copied().max().unwrap_or(0)),
        IndexSet::Intersection(ch) => return ch.iter().filter_map(|c| bound_on(seq, c)).min(),
        IndexSet::Union(ch) => return ch.iter().map(|c| bound_on(seq, c)).try_fold(0, |m, b| Some(m.max(b?))),
        IndexSet::Difference(x, _) => return bound_on(seq, x),
        _ => {}
    }
    match (rule, a) {
        (RatioRule::DyadicPartition, IndexSet::Progression { start, step }) => {
            (v2(*start) < v2(*step)).then(|| v2(*start) + 2)
        }
        (RatioRule::DyadicPartition, IndexSet::Residues { modulus, residues }) => residues
            .iter()
            .map(|&r| {
                let r = r % modulus;
                (r != 0 && v2(r) < v2(*modulus)).then(|| v2(r) + 2)
            })
            .try_fold(0, |m, b| Some(m.max(b?))),
        (RatioRule::SquaresPartition, IndexSet::Squares) => Some(2),
        (RatioRule::SquaresPartition, IndexSet::ShiftedSquares(i)) => Some(i + 2),
        (RatioRule::LevelCells(cells), _) => cells.iter().find(|c| &c.set == a).and_then(|c| c.rule.sup()),
        _ => periodic_bound(rule, a),
    }
}

fn periodic_bound(rule: &RatioRule, a: &IndexSet) -> Option<u64> {
    let (start, period) = crate::density::join_periods(rule.eventual_period()?, a.eventual_period()?)?;
    (1..start + period).filter(|&n| a.contains(n)).map(|n| rule.ratio(n).ok()).try_fold(0, |m, q| Some(m.max(q?)))
}

/// Whether the structure forces `q_n -> ∞` along `A`.
pub fn diverges_on(seq: &ArithmeticSequence, a: &IndexSet) -> bool {
    if a.known_finite() == Some(true) {
        return false;
    }
    let rule = seq.rule();
    if rule.diverges() {
        return true;
    }
    let within_cell = |set: &IndexSet| match a {
        IndexSet::Intersection(ch) => ch.contains(set),
        IndexSet::Difference(x, _) => x.as_ref() == set,
        _ => a == set,
    };
    match rule {
        RatioRule::LevelCells(cells) => cells.iter().any(|c| c.rule.diverges() && within_cell(&c.set)),
        _ => false,
    }
}

fn ratio_maxima(members: &[u64], ratios: &[u64], split: u64) -> (u64, u64) {
    let mut first = 0;
    let mut second = 0;
    for &m in members {
        let q = ratios[m as usize];
        if m <= split {
            first = first.max(q);
        } else {
            second = second.max(q);
        }
    }
    (first, second)
}

/// Is `(q_n)` bounded along `A`? Also returns the largest ratio seen on `A ∩ [1, N]`.
pub fn is_q_bounded(a: &IndexSet, seq: &ArithmeticSequence, n_max: u64, cap: u64) -> Result<(Judgement, u64)> {
    let members = a.members(n_max)?;
    let ratios = seq.ratios(n_max)?;
    let (first, second) = ratio_maxima(&members, &ratios, n_max / 2);
    let observed = first.max(second);
    if a.known_finite() == Some(true) || bound_on(seq, a).is_some() {
        return Ok((Judgement::certain(Tri::Holds), observed));
    }
    if diverges_on(seq, a) {
        return Ok((Judgement::certain(Tri::Fails), observed));
    }
    let verdict = if observed > cap {
        Tri::Fails
    } else if second > first {
        Tri::Inconclusive
    } else {
        Tri::Holds
    };
    Ok((Judgement::evidence(verdict), observed))
}

/// Does `q_n -> ∞` along `A`? Evidence compares the running minimum of
/// `q_n` on `A ∩ (N/4, N/2]` with the one on `A ∩ (N/2, N]`.
pub fn is_q_divergent(a: &IndexSet, seq: &ArithmeticSequence, n_max: u64) -> Result<Judgement> {
    if diverges_on(seq, a) {
        return Ok(Judgement::certain(Tri::Holds));
    }
    if bound_on(seq, a).is_some() {
        return Ok(match a.known_finite() {
            Some(false) => Judgement::certain(Tri::Fails),
            Some(true) => Judgement::certain(Tri::Holds),
            None => Judgement::evidence(Tri::Fails),
        });
    }
    let members = a.members(n_max)?;
    let ratios = seq.ratios(n_max)?;
    let min_over = |lo: u64, hi: u64| {
        members.iter().filter(|&&m| m > lo && m <= hi).map(|&m| ratios[m as usize]).min()
    };
    Ok(match (min_over(n_max / 4, n_max / 2), min_over(n_max / 2, n_max)) {
        (Some(mid), Some(top)) if top > mid => Judgement::evidence(Tri::Holds),
        (Some(_), Some(_)) => Judgement::evidence(Tri::Fails),
        _ => Judgement::evidence(Tri::Inconclusive),
    })
}

/// Whether infinitely many level sets are infinite, when the rule says so.
fn infinitely_many_infinite_levels(rule: &RatioRule) -> Option<bool> {
    match rule {
        RatioRule::Constant(_) | RatioRule::Periodic(_) | RatioRule::Affine { .. } => Some(false),
        RatioRule::SquaresPartition | RatioRule::DyadicPartition => Some(true),
        RatioRule::TableWithTail { tail, .. } => infinitely_many_infinite_levels(tail),
        RatioRule::LevelCells(cells) => {
            cells.iter().all(|c| infinitely_many_infinite_levels(&c.rule) == Some(false)).then_some(false)
        }
    }
}

/// Whether infinitely many level sets have positive density, when the rule says so.
fn infinitely_many_positive_levels(rule: &RatioRule) -> Option<bool> {
    match rule {
        RatioRule::Constant(_) | RatioRule::Periodic(_) | RatioRule::Affine { .. } | RatioRule::SquaresPartition => {
            Some(false)
        }
        RatioRule::DyadicPartition => Some(true),
        RatioRule::TableWithTail { tail, .. } => infinitely_many_positive_levels(tail),
        RatioRule::LevelCells(cells) => cells
            .iter()
            .all(|c| infinitely_many_positive_levels(&c.rule) == Some(false))
            .then_some(false),
    }
}

/// Outcome of the splitting test; `m` is the cut `M` when it holds.
#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    pub verdict: Judgement,
    #[serde(rename = "M")]
    pub m: Option<u64>,
}

fn percentile_99(seq: &ArithmeticSequence, n_max: u64) -> Result<u64> {
    let mut values: Vec<u64> = seq.ratios(n_max)?[1..=n_max as usize].to_vec();
    values.sort_unstable();
    Ok(values[((values.len() - 1) * 99) / 100])
}

/// Splitting: all but finitely many level sets are finite. Searches the
/// cut `M` up to `m_cap` (default: the 99th percentile of observed ratios).
pub fn is_splitting(seq: &Arc<ArithmeticSequence>, n_max: u64, m_cap: Option<u64>) -> Result<SplitReport> {
    let rule = seq.rule();
    if let Some(s) = rule.sup() {
        return Ok(SplitReport { verdict: Judgement::certain(Tri::Holds), m: Some(s + 1) });
    }
    if rule.diverges() {
        return Ok(SplitReport { verdict: Judgement::certain(Tri::Holds), m: Some(2) });
    }
    if let Some(true) = infinitely_many_infinite_levels(rule) { return Ok(SplitReport { verdict: Judgement::certain(Tri::Fails), m: None }) }
    let cap = match m_cap {
        Some(c) => c,
        None => percentile_99(seq, n_max)?,
    };
    let levels = level_sets(seq, n_max)?;
    let infinite = |l: &Level| match l.set.known_finite() {
        Some(f) => !f,
        None => l.estimate.tail_count > 0,
    };
    let m = levels.iter().filter(|l| infinite(l)).map(|l| l.value + 1).max().unwrap_or(2);
    let verdict = if m <= cap { Tri::Holds } else { Tri::Fails };
    Ok(SplitReport { verdict: Judgement::evidence(verdict), m: (verdict == Tri::Holds).then_some(m) })
}

/// Density statistics of one level, as reported in split witnesses.
#[derive(Clone, Debug, Serialize)]
pub struct LevelDiagnostic {
    pub value: u64,
    pub count: u64,
    #[serde(serialize_with = "rational::serialize")]
    pub point: BigRational,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub exact: Option<BigRational>,
}

/// A d-splitting partition `ℕ = B ∪ D` with `B = {n : q_n < M}`.
#[derive(Clone, Debug, Serialize)]
pub struct SplitWitness {
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "B_spec")]
    pub b: IndexSet,
    #[serde(rename = "D_spec")]
    pub d: IndexSet,
    pub diagnostics: Vec<LevelDiagnostic>,
}

impl SplitWitness {
    fn build(seq: &Arc<ArithmeticSequence>, m: u64, levels: &[Level]) -> Self {
        let mut values: BTreeSet<u64> = levels.iter().map(|l| l.value).filter(|&v| v < m).collect();
        if let Some(s) = seq.rule().sup() {
            values.extend(2..=s.min(m.saturating_sub(1)));
        }
        let b = IndexSet::LevelValues { seq: seq.clone(), values: Arc::new(values) };
        let d = b.clone().complement();
        let diagnostics = levels
            .iter()
            .map(|l| LevelDiagnostic {
                value: l.value,
                count: l.estimate.count,
                point: l.estimate.point.clone(),
                exact: l.estimate.exact.clone(),
            })
            .collect();
        SplitWitness { m, b, d, diagnostics }
    }
}

/// d-splitting, decided level-wise: it holds iff only finitely many level
/// sets have positive upper density, and then `M` is one past the last such level.
pub fn is_d_splitting(
    seq: &Arc<ArithmeticSequence>,
    n_max: u64,
    threshold: &BigRational,
) -> Result<(Judgement, Option<SplitWitness>)> {
    rational::check_unit_open("threshold", threshold)?;
    let rule = seq.rule();
    if infinitely_many_positive_levels(rule) == Some(true) {
        return Ok((Judgement::certain(Tri::Fails), None));
    }
    let levels = level_sets(seq, n_max)?;
    if let Some(s) = rule.sup() {
        return Ok((Judgement::certain(Tri::Holds), Some(SplitWitness::build(seq, s + 1, &levels))));
    }
    if rule.diverges() {
        return Ok((Judgement::certain(Tri::Holds), Some(SplitWitness::build(seq, 2, &levels))));
    }
    let judged: Vec<(u64, Judgement)> =
        levels.iter().map(|l| (l.value, l.estimate.positive_verdict(threshold))).collect();
    let last_positive = judged.iter().filter(|(_, j)| j.holds()).map(|(v, _)| *v).max();
    let m = last_positive.map_or(2, |v| v + 1);
    if judged.iter().any(|(v, j)| *v >= m && j.verdict == Tri::Inconclusive) {
        return Ok((Judgement::evidence(Tri::Inconclusive), None));
    }
    let structural = infinitely_many_positive_levels(rule) == Some(false) && judged.iter().all(|(_, j)| j.certain);
    let verdict = if structural { Judgement::certain(Tri::Holds) } else { Judgement::evidence(Tri::Holds) };
    Ok((verdict, Some(SplitWitness::build(seq, m, &levels))))
}

/// A q-divergent `B ⊆ A` with `d(A \ B)` small, and the per-level cut-offs used.
#[derive(Clone, Debug, Serialize)]
pub struct Extraction {
    pub b: IndexSet,
    pub residual: DensityEstimate,
    /// Level value to the index past which that level is removed from `B`.
    pub thresholds: BTreeMap<u64, u64>,
}

impl Extraction {
    /// `max_{v <= bound} t_v`: past this index every member of `B` has `q_n > bound`.
    pub fn settled_beyond(&self, bound: u64) -> u64 {
        self.thresholds.range(..=bound).map(|(_, &t)| t).max().unwrap_or(0)
    }
}

/// Removes from `A` a set `C` of density at most `budget` that swallows all
/// but finitely many points of every level set of `A`, so `B = A \ C` is
/// q-divergent. Levels never met in `[1, N]` stay in `B`.
pub fn extract_q_divergent(
    a: &IndexSet,
    seq: &Arc<ArithmeticSequence>,
    n_max: u64,
    budget: &BigRational,
) -> Result<Extraction> {
    rational::check_unit_open("budget", budget)?;
    if diverges_on(seq, a) {
        let residual = DensityEstimate::from_members(&[], n_max, Some(BigRational::zero()))?;
        return Ok(Extraction { b: a.clone(), residual, thresholds: BTreeMap::new() });
    }
    let bits = a.bitmap(n_max)?;
    let cells = level_members(seq, Some(&bits), n_max)?;
    let half = budget / from_u64(2, 1);
    for (value, members) in &cells {
        let level = IndexSet::level_set(seq, *value).intersect(a.clone());
        let est = DensityEstimate::from_members(members, n_max, level.exact_density())?;
        if est.positive_verdict(&half).holds() {
            let d = est.exact.as_ref().unwrap_or(&est.point);
            return Err(Error::Precondition(format!(
                "level set at value {value} has density {} on {} (about {:.4})",
                if d.is_positive() && est.exact.is_some() { d.to_string() } else { "positive".into() },
                a.describe(),
                rational::to_f64(d)
            )));
        }
    }
    let member_lists: Vec<Vec<u64>> = cells.values().cloned().collect();
    let cut = cover_thresholds(&member_lists, n_max, budget)?;
    let thresholds: BTreeMap<u64, u64> = cells.keys().copied().zip(cut).collect();
    let cover = IndexSet::LevelTails { seq: seq.clone(), tails: Arc::new(thresholds.clone()) };
    let removed = a.clone().intersect(cover.clone());
    let residual = DensityEstimate::from_bitmap(&removed.bitmap(n_max)?, n_max, None)?;
    Ok(Extraction { b: a.clone().minus(cover), residual, thresholds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn seq(rule: RatioRule) -> Arc<ArithmeticSequence> {
        Arc::new(ArithmeticSequence::new(rule).unwrap())
    }

    #[test]
    fn bounded_examples() {
        let two = seq(RatioRule::Constant(2));
        assert_eq!(is_q_bounded(&IndexSet::naturals(), &two, 1000, 256).unwrap(), (Judgement::certain(Tri::Holds), 2));
        let aff = seq(RatioRule::Affine { offset: 1 });
        let (j, _) = is_q_bounded(&IndexSet::naturals(), &aff, 1000, 256).unwrap();
        assert_eq!(j, Judgement::certain(Tri::Fails));
        let dy = Arc::new(ArithmeticSequence::dyadic_partition());
        assert_eq!(
            is_q_bounded(&IndexSet::odds(), &dy, 1_000_000, 256).unwrap(),
            (Judgement::certain(Tri::Holds), 2)
        );
        // 4 mod 8 has valuation exactly 2
        assert_eq!(bound_on(&dy, &IndexSet::Progression { start: 4, step: 8 }), Some(4));
        assert_eq!(bound_on(&dy, &IndexSet::evens()), None);
        let (j, _) = is_q_bounded(&IndexSet::evens(), &dy, 100_000, 256).unwrap();
        assert_eq!(j.verdict, Tri::Inconclusive);
    }

    #[test]
    fn divergent_examples() {
        let aff = seq(RatioRule::Affine { offset: 1 });
        assert_eq!(is_q_divergent(&IndexSet::naturals(), &aff, 1000).unwrap(), Judgement::certain(Tri::Holds));
        let two = seq(RatioRule::Constant(2));
        assert_eq!(is_q_divergent(&IndexSet::naturals(), &two, 1000).unwrap(), Judgement::certain(Tri::Fails));
        let sq = Arc::new(ArithmeticSequence::squares_partition());
        assert_eq!(is_q_divergent(&IndexSet::naturals(), &sq, 100_000).unwrap(), Judgement::evidence(Tri::Fails));
        let cells = seq(RatioRule::LevelCells(vec![
            crate::sequences::LevelCell::constant(IndexSet::odds(), 3),
            crate::sequences::LevelCell { set: IndexSet::evens(), rule: RatioRule::Affine { offset: 1 } },
        ]));
        assert!(diverges_on(&cells, &IndexSet::evens()));
        assert_eq!(bound_on(&cells, &IndexSet::odds()), Some(3));
    }

    #[test]
    fn splitting_examples() {
        let three = seq(RatioRule::Constant(3));
        let r = is_splitting(&three, 1000, None).unwrap();
        assert_eq!((r.verdict, r.m), (Judgement::certain(Tri::Holds), Some(4)));
        let sq = Arc::new(ArithmeticSequence::squares_partition());
        assert!(is_splitting(&sq, 1_000_000, None).unwrap().verdict.fails());
        let aff = seq(RatioRule::Affine { offset: 1 });
        assert!(is_splitting(&aff, 1000, None).unwrap().verdict.holds());
        let table = seq(RatioRule::TableWithTail { prefix: vec![9, 9, 9], tail: Box::new(RatioRule::Periodic(vec![2, 3])) });
        assert!(is_splitting(&table, 10_000, None).unwrap().verdict.holds());
    }

    #[test]
    fn d_splitting_examples() {
        let t = ratio(1, 100);
        let sq = Arc::new(ArithmeticSequence::squares_partition());
        let (j, w) = is_d_splitting(&sq, 1_000_000, &t).unwrap();
        assert_eq!(j, Judgement::certain(Tri::Holds));
        let w = w.unwrap();
        assert_eq!(w.m, 2);
        assert!(w.b.members(10_000).unwrap().is_empty());
        assert_eq!(w.d.members(100).unwrap(), (1..=100).collect::<Vec<_>>());
        let dy = Arc::new(ArithmeticSequence::dyadic_partition());
        assert_eq!(is_d_splitting(&dy, 1_000_000, &t).unwrap().0, Judgement::certain(Tri::Fails));
        let two = seq(RatioRule::Constant(2));
        let (j, w) = is_d_splitting(&two, 1000, &t).unwrap();
        assert_eq!(j, Judgement::certain(Tri::Holds));
        assert!(w.unwrap().d.members(1000).unwrap().is_empty());
        let mixed = seq(RatioRule::LevelCells(vec![
            crate::sequences::LevelCell::constant(IndexSet::odds(), 3),
            crate::sequences::LevelCell { set: IndexSet::evens(), rule: RatioRule::Affine { offset: 1 } },
        ]));
        let (j, w) = is_d_splitting(&mixed, 10_000, &t).unwrap();
        assert_eq!(j, Judgement::certain(Tri::Holds));
        let w = w.unwrap();
        assert_eq!(w.m, 4);
        assert_eq!(w.b.members(10).unwrap(), vec![1, 2, 3, 5, 7, 9]);
    }

    #[test]
    fn splitting_implies_d_splitting() {
        let t = ratio(1, 100);
        let rules = vec![
            RatioRule::Constant(2),
            RatioRule::Periodic(vec![2, 5, 3]),
            RatioRule::Affine { offset: 1 },
            RatioRule::TableWithTail { prefix: vec![7], tail: Box::new(RatioRule::Affine { offset: 3 }) },
            RatioRule::SquaresPartition,
            RatioRule::DyadicPartition,
        ];
        for r in rules {
            let s = seq(r);
            if is_splitting(&s, 100_000, None).unwrap().verdict.holds() {
                assert!(is_d_splitting(&s, 100_000, &t).unwrap().0.holds(), "{:?}", s.rule());
            }
        }
    }

    #[test]
    fn witnesses_agree_up_to_density_zero() {
        let mixed = seq(RatioRule::LevelCells(vec![
            crate::sequences::LevelCell::constant(IndexSet::Residues { modulus: 3, residues: vec![0] }, 5),
            crate::sequences::LevelCell { set: IndexSet::Residues { modulus: 3, residues: vec![1, 2] }, rule: RatioRule::Affine { offset: 2 } },
        ]));
        let n = 50_000;
        let (_, w1) = is_d_splitting(&mixed, n, &ratio(1, 100)).unwrap();
        let (_, w2) = is_d_splitting(&mixed, 2 * n, &ratio(1, 50)).unwrap();
        let (b1, b2) = (w1.unwrap().b, w2.unwrap().b);
        let sym = b1.clone().minus(b2.clone()).union(b2.minus(b1));
        let est = crate::density::density_estimate(&sym, n).unwrap();
        assert!(est.point <= ratio(2, 100), "{est:?}");
    }

    #[test]
    fn level_set_examples() {
        let two = seq(RatioRule::Constant(2));
        let ls = level_sets(&two, 100).unwrap();
        assert_eq!(ls.len(), 1);
        assert_eq!((ls[0].value, ls[0].estimate.count, ls[0].estimate.exact.clone()), (2, 100, Some(ratio(1, 1))));
        let dy = Arc::new(ArithmeticSequence::dyadic_partition());
        let ls = level_sets(&dy, 1_000_000).unwrap();
        for l in ls.iter().filter(|l| l.value <= 6) {
            let expected = ratio(1, 1 << (l.value - 1));
            assert!((&l.estimate.point - &expected).abs() <= ratio(2, 100), "{}", l.value);
            assert_eq!(l.estimate.exact, Some(expected));
        }
        let per = seq(RatioRule::Periodic(vec![2, 3]));
        let ls = level_sets(&per, 10_000).unwrap();
        assert_eq!(ls.iter().map(|l| (l.value, l.estimate.count)).collect::<Vec<_>>(), vec![(2, 5000), (3, 5000)]);
    }

    #[test]
    fn extraction_examples() {
        let aff = seq(RatioRule::Affine { offset: 1 });
        let e = extract_q_divergent(&IndexSet::naturals(), &aff, 1000, &ratio(1, 100)).unwrap();
        assert_eq!(e.b, IndexSet::naturals());
        assert!(e.residual.exact.as_ref().is_some_and(|d| d.is_zero()));

        let sq = Arc::new(ArithmeticSequence::squares_partition());
        let n = 1_000_000;
        let e = extract_q_divergent(&IndexSet::naturals(), &sq, n, &ratio(1, 100)).unwrap();
        assert!(e.residual.window_high <= ratio(2, 100), "{:?}", e.residual);
        let b = e.b.members(n).unwrap();
        let ratios = sq.ratios(n).unwrap();
        for bound in 2..=10 {
            let t = e.settled_beyond(bound);
            let tail: Vec<u64> = b.iter().filter(|&&m| m > t).map(|&m| ratios[m as usize]).collect();
            assert!(!tail.is_empty() && tail.iter().all(|&q| q > bound), "bound {bound}");
        }

        let dy = Arc::new(ArithmeticSequence::dyadic_partition());
        match extract_q_divergent(&IndexSet::odds(), &dy, 10_000, &ratio(1, 100)) {
            Err(Error::Precondition(m)) => assert!(m.contains("value 2") && m.contains("1/2"), "{m}"),
            other => panic!("{other:?}"),
        }
    }
}
