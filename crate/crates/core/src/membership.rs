//! Symbolic membership tests for the statistically torsion elements of the
//! circle: an element `x` belongs when `a_n x -> 0` statistically.
//!
//! Exact reductions (zero support, q-bounded support, q-divergent support,
//! d-splitting ratios) decide membership; otherwise a family of probe sets
//! is searched for a violated condition and, failing that, the numerical
//! oracle is attached to an `Undecided` verdict.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::classify::{self, SplitWitness};
use crate::density::{density_estimate, relative_estimate, DensityEstimate, IndexSet, Judgement, Tri};
use crate::error::{Error, Result};
use crate::expansion::{
    self, canonicality_violation, digit_period, expand_element, periodic_set, ratio_filter, CircleElement,
    DigitRule, DigitValue, ExpansionPrefix, CANONICAL_WINDOW,
};
use crate::rational::{self, to_u128_pair};
use crate::sequences::ArithmeticSequence;
use crate::spec::SetSpec;
use crate::statconv::{oracle_from_norms, Evidence, NormTable, OracleReport};

/// Extra digits beyond `N` so shifted conditions can look at `c_{n+1}`.
const SLACK: u64 = 8;

/// Which probe sets the refutation search tries.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeConfig {
    /// Residue classes modulo `2..=max_modulus`.
    pub max_modulus: u64,
    /// Shifts `A + k` for `k <= max_shift`.
    pub max_shift: u64,
    /// Closures `A ∪ (A+1) ∪ ... ∪ (A+k)` for `k <= max_closure`.
    pub max_closure: u64,
    /// Level sets and bands `{q_n <= M}` for `M <= max_level`.
    pub max_level: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { max_modulus: 8, max_shift: 4, max_closure: 4, max_level: 16 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Params {
    pub n_max: u64,
    /// Density below which a set counts as null.
    #[serde(serialize_with = "rational::serialize")]
    pub threshold: BigRational,
    /// Tolerance for the symbolic limit conditions.
    #[serde(serialize_with = "rational::serialize")]
    pub eps: BigRational,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub eps_grid: Vec<BigRational>,
    #[serde(serialize_with = "rational::serialize")]
    pub delta: BigRational,
    pub bound_cap: u64,
    pub jobs: usize,
    pub probes: ProbeConfig,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n_max: 100_000,
            threshold: rational::ratio(1, 100),
            eps: rational::ratio(1, 10),
            eps_grid: vec![rational::ratio(1, 4), rational::ratio(1, 10)],
            delta: rational::ratio(1, 100),
            bound_cap: classify::DEFAULT_BOUND_CAP,
            jobs: 1,
            probes: ProbeConfig::default(),
        }
    }
}

impl Params {
    pub fn with_prefix(n_max: u64) -> Self {
        Params { n_max, ..Params::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 2 {
            return Err(Error::InvalidParameter(format!("prefix must be at least 2, got {}", self.n_max)));
        }
        rational::check_unit_open("threshold", &self.threshold)?;
        rational::check_unit_open("eps", &self.eps)?;
        rational::check_unit_open("delta", &self.delta)?;
        if self.eps_grid.is_empty() {
            return Err(Error::InvalidParameter("empty eps grid".into()));
        }
        self.eps_grid.iter().try_for_each(|e| rational::check_unit_open("eps", e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Member,
    NonMember,
    Undecided,
}

/// One checked condition and how it came out.
#[derive(Clone, Debug, Serialize)]
pub struct Condition {
    pub name: String,
    /// The set whose density (or relative density) was judged.
    pub set: String,
    pub verdict: Judgement,
    /// False when it is unclear whether the condition applies at all; a
    /// failure then does not refute membership.
    pub binding: bool,
    pub estimate: Option<DensityEstimate>,
    #[serde(skip)]
    subject: Option<IndexSet>,
}

/// The set and condition behind a decided verdict.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub condition: String,
    pub set: String,
    /// JSON form of the set, left out for prefix-sampled sets.
    pub set_spec: Option<SetSpec>,
    pub estimate: Option<DensityEstimate>,
}

impl Witness {
    fn from_condition(c: &Condition) -> Self {
        Witness {
            condition: c.name.clone(),
            set: c.set.clone(),
            set_spec: c.subject.as_ref().filter(|s| !has_sampled(s)).map(SetSpec::from),
            estimate: c.estimate.clone(),
        }
    }
}

fn has_sampled(s: &IndexSet) -> bool {
    match s {
        IndexSet::Sampled { .. } | IndexSet::Predicate(_) => true,
        IndexSet::Union(ch) | IndexSet::Intersection(ch) => ch.iter().any(has_sampled),
        IndexSet::Difference(a, b) => has_sampled(a) || has_sampled(b),
        IndexSet::Complement(a) | IndexSet::Shift(a, _) => has_sampled(a),
        _ => false,
    }
}

/// `B ∩ supp(x)`, `B \ supp(x)` and `D ∩ supp(x)` for a d-splitting partition.
#[derive(Clone, Debug, Serialize)]
pub struct SplitSupportDecomposition {
    pub b_s: IndexSet,
    pub b_n: IndexSet,
    pub d_s: IndexSet,
    pub b_s_estimate: DensityEstimate,
    pub b_n_estimate: DensityEstimate,
    pub d_s_estimate: DensityEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub rule_fired: String,
    pub witness: Option<Witness>,
    pub conditions: Vec<Condition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<SplitSupportDecomposition>,
    pub notes: Vec<String>,
    pub oracle_summary: Option<OracleReport>,
}

/// Result of one reduction: `None` outcome when its conditions were not settled.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub outcome: Option<Outcome>,
    pub conditions: Vec<Condition>,
}

impl CaseResult {
    fn from_conditions(conditions: Vec<Condition>) -> Self {
        let refuted = conditions.iter().any(|c| c.binding && c.verdict.fails());
        let outcome = if refuted {
            Some(Outcome::NonMember)
        } else if conditions.iter().all(|c| c.verdict.holds()) {
            Some(Outcome::Member)
        } else {
            None
        };
        CaseResult { outcome, conditions }
    }

    fn failed(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.binding && c.verdict.fails())
    }
}

/// A closing observation about membership and whether it applies.
#[derive(Clone, Debug, Serialize)]
pub struct BulletReport {
    pub id: String,
    pub applies: bool,
    pub implied: Option<Outcome>,
    pub detail: String,
}

/// Digits, supports and cached structure of one element over one sequence.
pub struct Analysis<'a> {
    pub x: &'a CircleElement,
    pub seq: &'a Arc<ArithmeticSequence>,
    pub params: &'a Params,
    pub prefix: ExpansionPrefix,
    pub supp: IndexSet,
    pub supp_q: IndexSet,
    /// Digits over one full period, when digits and ratios repeat together.
    periodic: Option<(u64, u64, ExpansionPrefix)>,
    eps: (u128, u128),
}

impl<'a> Analysis<'a> {
    pub fn new(x: &'a CircleElement, seq: &'a Arc<ArithmeticSequence>, params: &'a Params) -> Result<Self> {
        params.validate()?;
        let n_max = params.n_max;
        let len = match x {
            CircleElement::Digits(rule) => rule.bound().map_or(n_max + SLACK, |b| b.min(n_max + SLACK)),
            CircleElement::Rational(_) => n_max + SLACK,
        };
        if len <= n_max {
            return Err(Error::BeyondBound { index: n_max + 1, bound: len });
        }
        let prefix = expand_element(x, seq, len)?;
        let periodic = match digit_period(x, seq) {
            Some((start, period)) if start + period <= crate::density::PERIOD_CAP => {
                let p = if start + period - 1 <= len { prefix.clone() } else { expand_element(x, seq, start + period)? };
                Some((start, period, p))
            }
            _ => None,
        };
        let (supp, supp_q) = match expansion::structural_support(x, seq) {
            Some(s) => s,
            None => expansion::support(&prefix),
        };
        let eps = to_u128_pair(&params.eps).ok_or_else(|| Error::InvalidParameter("eps too large".into()))?;
        Ok(Analysis { x, seq, params, prefix, supp, supp_q, periodic, eps })
    }

    fn n(&self) -> u64 {
        self.params.n_max
    }

    /// `{n : pred(c_n, q_n)}`, structural when the digits allow it.
    pub fn digit_set(&self, pred: impl Fn(u64, u64) -> bool) -> IndexSet {
        if let Some((start, period, p)) = &self.periodic {
            return periodic_set(*start, *period, |n| pred(p.digit(n), p.ratio(n)));
        }
        if let Some(s) = self.level_digit_set(&pred) {
            return s;
        }
        let len = self.prefix.n_max as usize + 1;
        let p = &self.prefix;
        IndexSet::sampled((0..len).map(|n| n > 0 && pred(p.digits[n], p.ratios[n])).collect())
    }

    fn level_digit_set(&self, pred: &impl Fn(u64, u64) -> bool) -> Option<IndexSet> {
        let CircleElement::Digits(rule) = self.x else { return None };
        let pieces: Vec<(&IndexSet, &DigitValue)> = match rule {
            DigitRule::Indicator { support, value } => vec![(support, value)],
            DigitRule::Piecewise(ps) => ps.iter().map(|p| (&p.set, &p.value)).collect(),
            _ => return None,
        };
        if !pieces.iter().all(|(_, v)| v.level_determined()) {
            return None;
        }
        let mut parts = Vec::new();
        let mut covered: Vec<IndexSet> = Vec::new();
        for (set, value) in pieces {
            let own = if covered.is_empty() { set.clone() } else { set.clone().minus(IndexSet::Union(covered.clone())) };
            let filter = ratio_filter(self.seq, |q| value.digit(0, q).is_ok_and(|c| pred(c, q)))?;
            parts.push(restrict(own, filter));
            covered.push(set.clone());
        }
        let off = ratio_filter(self.seq, |q| pred(0, q))?;
        parts.push(restrict(IndexSet::Union(covered).complement(), off));
        parts.retain(|p| p != &IndexSet::empty());
        Some(match parts.len() {
            0 => IndexSet::empty(),
            1 => parts.pop().expect("one part"),
            _ => IndexSet::Union(parts),
        })
    }

    /// `{n : ||c_n / q_n|| >= eps}`: the circle distance stays large.
    pub fn circle_exceptions(&self) -> IndexSet {
        let (a, b) = self.eps;
        self.digit_set(move |c, q| (c.min(q - c) as u128) * b >= a * q as u128)
    }

    /// `{n : c_n / q_n >= eps}`: the real ratio stays away from 0.
    pub fn real_exceptions(&self) -> IndexSet {
        let (a, b) = self.eps;
        self.digit_set(move |c, q| c as u128 * b >= a * q as u128)
    }

    /// `{n : 1 - (c_n + 1) / q_n >= eps}`: `(c_n + 1)/q_n` stays away from 1.
    pub fn near_one_exceptions(&self) -> IndexSet {
        let (a, b) = self.eps;
        self.digit_set(move |c, q| (q - c - 1) as u128 * b >= a * q as u128)
    }

    fn zero(&self, name: impl Into<String>, set: IndexSet) -> Result<Condition> {
        let est = density_estimate(&set, self.n())?;
        Ok(Condition {
            name: name.into(),
            set: set.describe(),
            verdict: est.zero_verdict(&self.params.threshold),
            binding: true,
            estimate: Some(est),
            subject: Some(set),
        })
    }

    fn subset(&self, name: impl Into<String>, a: &IndexSet, b: &IndexSet) -> Result<Condition> {
        self.zero(name, a.clone().minus(b.clone()))
    }

    /// Limit along `along`: the exceptional indices inside it are relatively null.
    fn limit(&self, name: impl Into<String>, exceptional: IndexSet, along: &IndexSet) -> Result<Condition> {
        let name = name.into();
        match relative_estimate(&exceptional, along, self.n()) {
            Ok(est) => Ok(Condition {
                name,
                set: format!("{} within {}", exceptional.describe(), along.describe()),
                verdict: est.zero_verdict(&self.params.threshold),
                binding: true,
                estimate: Some(est),
                subject: Some(exceptional.intersect(along.clone())),
            }),
            Err(Error::EmptyPrefix(_)) => Ok(Condition {
                name,
                set: along.describe(),
                verdict: Judgement::evidence(Tri::Holds),
                binding: true,
                estimate: None,
                subject: None,
            }),
            Err(e) => Err(e),
        }
    }

    /// `d̄(A) > 0` at the configured threshold.
    fn positive(&self, a: &IndexSet) -> Result<Judgement> {
        Ok(density_estimate(a, self.n())?.positive_verdict(&self.params.threshold))
    }

    fn gate(mut c: Condition, applies: Judgement) -> Condition {
        c.binding = applies.holds();
        c
    }

    pub fn zero_support(&self) -> Result<Option<Condition>> {
        let c = self.zero("supp(x) has density zero", self.supp.clone())?;
        Ok(c.verdict.holds().then_some(c))
    }

    /// For q-bounded supports: `(supp+1) \ supp` and `supp \ supp_q` are null.
    pub fn bounded_support(&self) -> Result<CaseResult> {
        let shifted = self.supp.clone().shift(1);
        Ok(CaseResult::from_conditions(vec![
            self.subset("(supp(x)+1) \\ supp(x) has density zero", &shifted, &self.supp)?,
            self.subset("supp(x) \\ supp_q(x) has density zero", &self.supp, &self.supp_q)?,
        ]))
    }

    /// `{n : q_n <= M}` for the configured band limits.
    fn bands(&self) -> Vec<(u64, IndexSet)> {
        (2..=self.params.probes.max_level)
            .filter_map(|m| ratio_filter(self.seq, |q| q <= m).map(|s| (m, s)))
            .filter(|(_, s)| s != &IndexSet::empty())
            .collect()
    }

    /// For q-divergent supports: `c_n/q_n -> 0` in the circle along supp, and
    /// in the reals along every `D ⊆ supp` sitting just after a q-bounded set.
    pub fn divergent_support(&self) -> Result<CaseResult> {
        let mut conds = vec![self.limit("c_n/q_n -> 0 in the circle along supp(x)", self.circle_exceptions(), &self.supp)?];
        let real = self.real_exceptions();
        let mut seen_positive = false;
        for (m, band) in self.bands().into_iter().rev() {
            let d = band.shift(1).intersect(self.supp.clone());
            let applies = self.positive(&d)?;
            if applies.fails() {
                // smaller bands give smaller D
                break;
            }
            seen_positive |= applies.holds();
            let c = self.limit(format!("c_n/q_n -> 0 in the reals along ({{q <= {m}}}+1) ∩ supp(x)"), real.clone(), &d)?;
            conds.push(Self::gate(c, applies));
            if seen_positive && conds.last().is_some_and(|c| c.verdict.holds()) {
                // holding on the largest band covers every smaller one
                break;
            }
        }
        Ok(CaseResult::from_conditions(conds))
    }

    pub fn decompose(&self, w: &SplitWitness) -> Result<SplitSupportDecomposition> {
        let b_s = w.b.clone().intersect(self.supp.clone());
        let b_n = w.b.clone().minus(self.supp.clone());
        let d_s = w.d.clone().intersect(self.supp.clone());
        Ok(SplitSupportDecomposition {
            b_s_estimate: density_estimate(&b_s, self.n())?,
            b_n_estimate: density_estimate(&b_n, self.n())?,
            d_s_estimate: density_estimate(&d_s, self.n())?,
            b_s,
            b_n,
            d_s,
        })
    }

    /// Conditions for d-splitting ratio sequences, over `B ∩ supp`, `B \ supp` and `D ∩ supp`.
    pub fn d_splitting(&self, w: &SplitWitness) -> Result<(CaseResult, SplitSupportDecomposition)> {
        let dec = self.decompose(w)?;
        let mut conds = Vec::new();
        let on_b_s = dec.b_s_estimate.positive_verdict(&self.params.threshold);
        if !on_b_s.fails() {
            let after = dec.b_s.clone().shift(1);
            conds.push(Self::gate(self.subset("(B∩supp(x))+1 ⊆ supp(x) up to density zero", &after, &self.supp)?, on_b_s));
            conds.push(Self::gate(self.subset("B∩supp(x) ⊆ supp_q(x) up to density zero", &dec.b_s, &self.supp_q)?, on_b_s));
            let c = self.limit(
                "(c_{n+1}+1)/q_{n+1} -> 1 in the reals along B∩supp(x)",
                self.near_one_exceptions().shift(-1),
                &dec.b_s,
            )?;
            conds.push(Self::gate(c, on_b_s));
        }
        let on_b_n = dec.b_n_estimate.positive_verdict(&self.params.threshold);
        if !on_b_n.fails() {
            let c = self.limit("c_{n+1}/q_{n+1} -> 0 in the reals along B\\supp(x)", self.real_exceptions().shift(-1), &dec.b_n)?;
            conds.push(Self::gate(c, on_b_n));
        }
        let on_d_s = dec.d_s_estimate.positive_verdict(&self.params.threshold);
        if !on_d_s.fails() {
            let c = self.limit("c_n/q_n -> 0 in the circle along D∩supp(x)", self.circle_exceptions(), &dec.d_s)?;
            conds.push(Self::gate(c, on_d_s));
        }
        Ok((CaseResult::from_conditions(conds), dec))
    }

    /// The probe sets tried by the refutation search, with labels.
    pub fn probe_family(&self) -> Result<Vec<(String, IndexSet)>> {
        let cfg = &self.params.probes;
        let mut base: Vec<(String, IndexSet)> = Vec::new();
        for m in 2..=cfg.max_modulus {
            for r in 0..m {
                base.push((format!("n ≡ {r} mod {m}"), IndexSet::Residues { modulus: m, residues: vec![r] }));
            }
        }
        base.push(("non-squares".into(), IndexSet::Squares.complement()));
        let levels = classify::level_members(self.seq, None, self.n())?;
        for (&v, members) in levels.iter().take(cfg.max_level as usize) {
            let est = DensityEstimate::from_members(members, self.n(), None)?;
            if est.positive_verdict(&self.params.threshold).fails() {
                continue;
            }
            let level = IndexSet::level_set(self.seq, v);
            base.push((format!("{{q = {v}}} ∩ supp(x)"), level.clone().intersect(self.supp.clone())));
            base.push((format!("{{q = {v}}} \\ supp(x)"), level.clone().minus(self.supp.clone())));
            base.push((format!("{{q = {v}}}"), level));
        }
        base.push(("supp(x)".into(), self.supp.clone()));
        base.push(("supp(x) \\ supp_q(x)".into(), self.supp.clone().minus(self.supp_q.clone())));
        base.push(("complement of supp(x)".into(), self.supp.clone().complement()));
        let mut out = base.clone();
        for k in 1..=cfg.max_shift {
            out.extend(base.iter().map(|(l, s)| (format!("({l}) + {k}"), s.clone().shift(k as i64))));
        }
        for k in 1..=cfg.max_closure {
            out.extend(base.iter().map(|(l, s)| (format!("L_{k}({l})"), crate::density::shift_union(s, k))));
        }
        Ok(out)
    }

    /// Checks the per-set conditions on one probe; `Some` names the violated clause.
    pub fn probe(&self, label: &str, a: &IndexSet) -> Result<Option<(String, Condition)>> {
        if !self.positive(a)?.holds() {
            return Ok(None);
        }
        let cap = self.params.bound_cap;
        let bounded = classify::is_q_bounded(a, self.seq, self.n(), cap)?.0;
        let fail = |tag: &str, c: Condition| Ok(Some((format!("probe:{tag}"), Condition { name: format!("{} [A = {label}]", c.name), ..c })));
        if bounded.holds() {
            let next = a.clone().shift(1);
            let next_bounded = classify::is_q_bounded(&next, self.seq, self.n(), cap)?.0;
            if self.subset("A ⊆ supp(x)", a, &self.supp)?.verdict.holds() {
                let mut conds = vec![
                    self.subset("A+1 ⊆ supp(x) up to density zero", &next, &self.supp)?,
                    self.subset("A ⊆ supp_q(x) up to density zero", a, &self.supp_q)?,
                    self.limit("(c_{n+1}+1)/q_{n+1} -> 1 in the reals along A", self.near_one_exceptions().shift(-1), a)?,
                ];
                if next_bounded.holds() {
                    conds.push(self.subset("A+1 ⊆ supp_q(x) up to density zero", &next, &self.supp_q)?);
                }
                if let Some(c) = conds.into_iter().find(|c| c.verdict.fails()) {
                    return fail("a1", c);
                }
            } else if self.zero("A ∩ supp(x)", a.clone().intersect(self.supp.clone()))?.verdict.holds() {
                let mut conds =
                    vec![self.limit("c_{n+1}/q_{n+1} -> 0 in the reals along A", self.real_exceptions().shift(-1), a)?];
                if next_bounded.holds() {
                    conds.push(self.zero("(A+1) ∩ supp(x) has density zero", next.intersect(self.supp.clone()))?);
                }
                if let Some(c) = conds.into_iter().find(|c| c.verdict.fails()) {
                    return fail("a2", c);
                }
            }
        } else if classify::is_q_divergent(a, self.seq, self.n())?.holds() {
            let inside = a.clone().intersect(self.supp.clone());
            if self.positive(&inside)?.holds() {
                let c = self.limit("c_n/q_n -> 0 in the circle along A ∩ supp(x)", self.circle_exceptions(), &inside)?;
                if c.verdict.fails() {
                    return fail("b", c);
                }
            }
        }
        Ok(None)
    }

    /// Runs every probe; the first violation refutes membership.
    pub fn refute(&self) -> Result<Option<(String, Condition)>> {
        for (label, a) in self.probe_family()? {
            if let Some(hit) = self.probe(&label, &a)? {
                return Ok(Some(hit));
            }
        }
        Ok(None)
    }

    fn prefix_ratios_on(&self, set: &IndexSet) -> Result<Vec<(u64, u64, u64)>> {
        Ok(set
            .members(self.n())?
            .into_iter()
            .map(|n| (n, self.prefix.digit(n), self.prefix.ratio(n)))
            .collect())
    }

    /// The closing observations, judged on the prefix.
    pub fn bullets(&self) -> Result<Vec<BulletReport>> {
        let n = self.n();
        let t = &self.params.threshold;
        let supp_divergent = classify::is_q_divergent(&self.supp, self.seq, n)?.holds();
        let supp_bounded = classify::is_q_bounded(&self.supp, self.seq, n, self.params.bound_cap)?.0.holds();
        let supp_positive = self.positive(&self.supp)?.holds();
        let on_supp = self.prefix_ratios_on(&self.supp)?;
        let mut out = Vec::new();

        let vanishing = self.limit("", self.real_exceptions(), &self.supp)?.verdict.holds();
        let applies = supp_divergent && vanishing;
        out.push(BulletReport {
            id: "bullet:divergent-vanishing-ratio".into(),
            applies,
            implied: applies.then_some(Outcome::Member),
            detail: format!("supp q-divergent: {supp_divergent}; c_n/q_n -> 0 along supp: {vanishing}"),
        });

        let k = on_supp.iter().filter(|(m, _, _)| *m <= n / 2).map(|&(_, c, _)| c).max().unwrap_or(0);
        let large = self.digit_set(move |c, _| c > k).intersect(self.supp.clone());
        let bounded_digits = density_estimate(&large, n)?.zero_verdict(t).holds();
        let applies = supp_divergent && bounded_digits;
        out.push(BulletReport {
            id: "bullet:divergent-bounded-digits".into(),
            applies,
            implied: applies.then_some(Outcome::Member),
            detail: format!("supp q-divergent: {supp_divergent}; digits above {k} are null on supp: {bounded_digits}"),
        });

        let (split, witness) = classify::is_d_splitting(self.seq, n, t)?;
        let dense_divergent = split.holds()
            && witness.as_ref().is_some_and(|w| {
                density_estimate(&w.b, n).is_ok_and(|e| e.zero_verdict(t).holds())
            });
        let circle = self.limit("", self.circle_exceptions(), &self.supp)?.verdict;
        let implied = match (dense_divergent, circle.verdict) {
            (true, Tri::Holds) => Some(Outcome::Member),
            (true, Tri::Fails) => Some(Outcome::NonMember),
            _ => None,
        };
        out.push(BulletReport {
            id: "bullet:dense-divergent".into(),
            applies: dense_divergent && implied.is_some(),
            implied,
            detail: format!("density-one q-divergent set: {dense_divergent}; circle limit along supp: {:?}", circle.verdict),
        });

        let blocks = self.blocks();
        let applies = supp_bounded && blocks.is_some();
        out.push(BulletReport {
            id: "bullet:bounded-blocks".into(),
            applies,
            implied: applies.then_some(Outcome::NonMember),
            detail: match blocks {
                Some(l) => format!("blocks and gaps of supp bounded by {l}; supp q-bounded: {supp_bounded}"),
                None => format!("supp is not a union of bounded blocks with bounded gaps; supp q-bounded: {supp_bounded}"),
            },
        });

        let window = ratio_window(&on_supp, n / 2);
        let applies = supp_divergent && supp_positive && window.is_some();
        out.push(BulletReport {
            id: "bullet:ratio-window".into(),
            applies,
            implied: applies.then_some(Outcome::NonMember),
            detail: match window {
                Some((lo, hi)) => format!("c_n/q_n ∈ [{lo}, {hi}] on supp; supp q-divergent: {supp_divergent}"),
                None => "c_n/q_n leaves every window inside (0, 1)".into(),
            },
        });
        Ok(out)
    }

    /// `l` such that supp splits into maximal blocks of length at most `l`
    /// separated by gaps of length at most `l`, steady across the prefix.
    fn blocks(&self) -> Option<u64> {
        let bits = self.supp.bitmap(self.n()).ok()?;
        let n = self.n() as usize;
        let mut runs: Vec<(usize, usize, bool)> = Vec::new();
        let mut start = 1;
        for i in 2..=n + 1 {
            if i == n + 1 || bits[i] != bits[start] {
                runs.push((start, i - 1, bits[start]));
                start = i;
            }
        }
        // the last run may be cut off by the prefix; the first gap may be a lead-in
        let inner: Vec<_> = runs.iter().skip(1).take(runs.len().saturating_sub(2)).collect();
        if inner.iter().filter(|r| r.2).count() < 4 || !inner.iter().any(|r| !r.2) {
            return None;
        }
        let len = |r: &&(usize, usize, bool)| (r.1 - r.0 + 1) as u64;
        let early = inner.iter().filter(|r| r.1 <= n / 2).map(len).max()?;
        let late = inner.iter().filter(|r| r.0 > n / 2).map(len).max()?;
        (late <= early).then_some(early)
    }
}

fn restrict(base: IndexSet, filter: IndexSet) -> IndexSet {
    if filter == IndexSet::naturals() {
        base
    } else if filter == IndexSet::empty() {
        IndexSet::empty()
    } else {
        base.intersect(filter)
    }
}

/// `[min, max]` of `c_n/q_n` over support indices up to `half`, when it sits
/// inside `(0, 1)` and the later indices stay within it.
fn ratio_window(on_supp: &[(u64, u64, u64)], half: u64) -> Option<(BigRational, BigRational)> {
    let early: Vec<BigRational> = on_supp.iter().filter(|t| t.0 <= half).map(|&(_, c, q)| rational::from_u64(c, q)).collect();
    let lo = early.iter().min()?.clone();
    let hi = early.iter().max()?.clone();
    if lo <= BigRational::zero() || hi >= BigRational::one() {
        return None;
    }
    let steady = on_supp.iter().filter(|t| t.0 > half).all(|&(_, c, q)| {
        let r = rational::from_u64(c, q);
        lo <= r && r <= hi
    });
    steady.then_some((lo, hi))
}

fn decided(outcome: Outcome, rule: &str, case: CaseResult) -> Verdict {
    let witness = case.failed().map(Witness::from_condition);
    Verdict {
        outcome,
        rule_fired: rule.into(),
        witness,
        conditions: case.conditions,
        decomposition: None,
        notes: Vec::new(),
        oracle_summary: None,
    }
}

fn oracle_for(an: &Analysis) -> Result<OracleReport> {
    let p = an.params;
    let norms = Arc::new(NormTable::compute(an.x, an.seq, p.n_max)?);
    oracle_from_norms(norms, p.n_max, &p.eps_grid, &p.delta, p.jobs)
}

fn undecided(an: &Analysis, rule: &str, conditions: Vec<Condition>) -> Result<Verdict> {
    Ok(Verdict {
        outcome: Outcome::Undecided,
        rule_fired: rule.into(),
        witness: None,
        conditions,
        decomposition: None,
        notes: Vec::new(),
        oracle_summary: Some(oracle_for(an)?),
    })
}

/// `Member` when `supp(x)` is null, otherwise `None`.
pub fn check_zero_support(x: &CircleElement, seq: &Arc<ArithmeticSequence>, params: &Params) -> Result<Option<Verdict>> {
    let an = Analysis::new(x, seq, params)?;
    Ok(an.zero_support()?.map(|c| decided(Outcome::Member, "zero-support", CaseResult { outcome: Some(Outcome::Member), conditions: vec![c] })))
}

fn require(j: Judgement, what: &str) -> Result<()> {
    if j.holds() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} (verdict {:?})", j.verdict)))
    }
}

fn case_verdict(an: &Analysis, rule: &str, case: CaseResult) -> Result<Verdict> {
    match case.outcome {
        Some(o) => Ok(decided(o, rule, case)),
        None => undecided(an, rule, case.conditions),
    }
}

/// Membership for an element whose support is q-bounded.
pub fn check_cor_qbounded(x: &CircleElement, seq: &Arc<ArithmeticSequence>, params: &Params) -> Result<Verdict> {
    let an = Analysis::new(x, seq, params)?;
    require(classify::is_q_bounded(&an.supp, seq, params.n_max, params.bound_cap)?.0, "supp(x) is not q-bounded")?;
    case_verdict(&an, "bounded-support", an.bounded_support()?)
}

/// Membership for an element whose support is q-divergent.
pub fn check_cor_qdivergent(x: &CircleElement, seq: &Arc<ArithmeticSequence>, params: &Params) -> Result<Verdict> {
    let an = Analysis::new(x, seq, params)?;
    require(classify::is_q_divergent(&an.supp, seq, params.n_max)?, "supp(x) is not q-divergent")?;
    case_verdict(&an, "divergent-support", an.divergent_support()?)
}

/// Membership for a d-splitting ratio sequence with the given partition.
pub fn check_thm_dsplitting(
    x: &CircleElement,
    seq: &Arc<ArithmeticSequence>,
    witness: &SplitWitness,
    params: &Params,
) -> Result<Verdict> {
    let an = Analysis::new(x, seq, params)?;
    let (case, dec) = an.d_splitting(witness)?;
    let mut v = case_verdict(&an, "d-splitting", case)?;
    v.decomposition = Some(dec);
    Ok(v)
}

pub fn check_bullets(x: &CircleElement, seq: &Arc<ArithmeticSequence>, params: &Params) -> Result<Vec<BulletReport>> {
    Analysis::new(x, seq, params)?.bullets()
}

fn bullet_applies(an: &Analysis, id: &str) -> Result<Option<BulletReport>> {
    Ok(an.bullets()?.into_iter().find(|b| b.id == id && b.applies))
}

/// Full dispatcher: zero support, q-bounded support, q-divergent support,
/// d-splitting ratios, then the probe search with the oracle as fallback.
pub fn check_thm_main(x: &CircleElement, seq: &Arc<ArithmeticSequence>, params: &Params) -> Result<Verdict> {
    let an = Analysis::new(x, seq, params)?;
    let mut v = dispatch(&an)?;
    if let Some(at) = canonicality_violation(&an.prefix, CANONICAL_WINDOW) {
        v.notes.push(format!(
            "{CANONICAL_WINDOW} maximal digits in a row from index {at}: the digits may not be canonical"
        ));
    }
    Ok(v)
}

fn dispatch(an: &Analysis) -> Result<Verdict> {
    let p = an.params;
    if let Some(c) = an.zero_support()? {
        return Ok(decided(Outcome::Member, "zero-support", CaseResult { outcome: Some(Outcome::Member), conditions: vec![c] }));
    }
    let mut tried = Vec::new();
    if classify::is_q_bounded(&an.supp, an.seq, p.n_max, p.bound_cap)?.0.holds() {
        let case = an.bounded_support()?;
        if let Some(o) = case.outcome {
            if o == Outcome::NonMember {
                if let Some(b) = bullet_applies(an, "bullet:bounded-blocks")? {
                    let mut v = decided(o, &b.id, case);
                    v.notes.push(b.detail);
                    return Ok(v);
                }
            }
            return Ok(decided(o, "bounded-support", case));
        }
        tried.extend(case.conditions);
    }
    if classify::is_q_divergent(&an.supp, an.seq, p.n_max)?.holds() {
        let case = an.divergent_support()?;
        if let Some(o) = case.outcome {
            if o == Outcome::NonMember {
                if let Some(b) = bullet_applies(an, "bullet:ratio-window")? {
                    let mut v = decided(o, &b.id, case);
                    v.notes.push(b.detail);
                    return Ok(v);
                }
            }
            return Ok(decided(o, "divergent-support", case));
        }
        tried.extend(case.conditions);
    }
    if let (j, Some(w)) = classify::is_d_splitting(an.seq, p.n_max, &p.threshold)? {
        if j.holds() {
            let (case, dec) = an.d_splitting(&w)?;
            if let Some(o) = case.outcome {
                let mut v = decided(o, "d-splitting", case);
                v.decomposition = Some(dec);
                return Ok(v);
            }
            tried.extend(case.conditions);
        }
    }
    if let Some((rule, c)) = an.refute()? {
        let witness = Some(Witness::from_condition(&c));
        tried.push(c);
        return Ok(Verdict {
            outcome: Outcome::NonMember,
            rule_fired: rule,
            witness,
            conditions: tried,
            decomposition: None,
            notes: Vec::new(),
            oracle_summary: None,
        });
    }
    undecided(an, "undecided", tried)
}

/// Outcomes of every reduction that applies, run independently.
pub fn applicable_cases(an: &Analysis) -> Result<Vec<(String, Option<Outcome>)>> {
    let p = an.params;
    let mut out = Vec::new();
    if an.zero_support()?.is_some() {
        out.push(("zero-support".to_string(), Some(Outcome::Member)));
    }
    if classify::is_q_bounded(&an.supp, an.seq, p.n_max, p.bound_cap)?.0.holds() {
        out.push(("bounded-support".into(), an.bounded_support()?.outcome));
    }
    if classify::is_q_divergent(&an.supp, an.seq, p.n_max)?.holds() {
        out.push(("divergent-support".into(), an.divergent_support()?.outcome));
    }
    if let (j, Some(w)) = classify::is_d_splitting(an.seq, p.n_max, &p.threshold)? {
        if j.holds() {
            out.push(("d-splitting".into(), an.d_splitting(&w)?.0.outcome));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub symbolic: Verdict,
    pub oracle: OracleReport,
    /// `None` when either side is undecided.
    pub agree: Option<bool>,
    /// A decided symbolic verdict contradicts a decisive oracle.
    pub alarm: bool,
    pub discrepancies: Vec<String>,
    pub cases: Vec<(String, Option<Outcome>)>,
    /// Every applicable reduction that reached a verdict reached the same one.
    pub cases_agree: bool,
}

/// Symbolic verdict next to the numerical oracle.
pub fn compare(x: &CircleElement, seq: &Arc<ArithmeticSequence>, params: &Params) -> Result<ComparisonReport> {
    let an = Analysis::new(x, seq, params)?;
    let mut symbolic = dispatch(&an)?;
    let oracle = match symbolic.oracle_summary.take() {
        Some(o) => o,
        None => oracle_for(&an)?,
    };
    let agree = match (symbolic.outcome, oracle.verdict) {
        (Outcome::Undecided, _) | (_, Evidence::Inconclusive) => None,
        (Outcome::Member, Evidence::Converges) | (Outcome::NonMember, Evidence::Diverges) => Some(true),
        _ => Some(false),
    };
    let mut discrepancies = Vec::new();
    if agree == Some(false) {
        for r in &oracle.per_eps {
            discrepancies.push(format!(
                "{:?} by {} at eps {} (exceptional count {})",
                symbolic.outcome,
                symbolic.rule_fired,
                r.eps,
                r.exceptional_count
            ));
        }
        if let Some(w) = &symbolic.witness {
            discrepancies.push(format!("witness condition: {}", w.condition));
        }
    }
    let cases = applicable_cases(&an)?;
    let decided: Vec<Outcome> = cases.iter().filter_map(|(_, o)| *o).collect();
    let cases_agree = decided.windows(2).all(|w| w[0] == w[1]);
    if symbolic.outcome != Outcome::Undecided {
        symbolic.oracle_summary = None;
    }
    Ok(ComparisonReport { symbolic, oracle, agree, alarm: agree == Some(false), discrepancies, cases, cases_agree })
}
