//! Statistical convergence of `a_n x` to 0 in the circle, judged on a prefix.
//!
//! For a rational `x = p/d` the values `{a_n x} = (p a_n mod d) / d` are exact.
//! For digit elements `{a_n x} = Σ_{m>n} c_m / (q_{n+1} ... q_m)` is bracketed
//! by a fixed-point backward recursion started `TAIL_DIGITS` indices past the
//! prefix; an index whose bracket meets the ε-exceptional region counts as
//! exceptional.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::density::{DensityEstimate, IndexSet, Tri};
use crate::error::{Error, Result};
use crate::expansion::CircleElement;
use crate::rational::{self, frac_ge, to_u128_pair};
use crate::sequences::ArithmeticSequence;

/// Digits used past the prefix when bracketing digit elements.
pub const TAIL_DIGITS: u64 = 64;

/// Fixed-point scale of digit brackets.
const SCALE: u128 = 1 << 62;

/// Prefix evidence about a limit. A prefix never proves a density limit, so
/// the decided outcomes are named as evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Evidence {
    #[serde(rename = "ConvergesEvidence")]
    Converges,
    #[serde(rename = "DivergesEvidence")]
    Diverges,
    Inconclusive,
}

impl From<Tri> for Evidence {
    fn from(t: Tri) -> Self {
        match t {
            Tri::Holds => Evidence::Converges,
            Tri::Fails => Evidence::Diverges,
            Tri::Inconclusive => Evidence::Inconclusive,
        }
    }
}

impl Evidence {
    pub fn label(&self) -> &'static str {
        match self {
            Evidence::Converges => "ConvergesEvidence",
            Evidence::Diverges => "DivergesEvidence",
            Evidence::Inconclusive => "Inconclusive",
        }
    }
}

/// Judges an exceptional set: converges when it looks like a null set.
pub fn judge(exceptional: &[bool], n_max: u64, delta: &BigRational) -> Result<(Evidence, DensityEstimate)> {
    let est = DensityEstimate::from_bitmap(exceptional, n_max, None)?;
    Ok((est.zero_verdict(delta).verdict.into(), est))
}

/// Judges an exceptional set relative to the indices of `within`.
pub fn judge_within(
    exceptional: &[bool],
    within: &[bool],
    n_max: u64,
    delta: &BigRational,
) -> Result<(Evidence, DensityEstimate)> {
    let est = DensityEstimate::relative(exceptional, within, n_max, None)?;
    Ok((est.zero_verdict(delta).verdict.into(), est))
}

fn check_params(eps: &BigRational, delta: &BigRational) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    rational::check_unit_open("delta", delta)
}

/// `x_n -> 0` statistically, from `values[i] = x_{i+1}`, using `|x_n| >= eps`
/// as the exceptional event.
pub fn stat_limit_zero(values: &[BigRational], eps: &BigRational, delta: &BigRational) -> Result<Evidence> {
    check_params(eps, delta)?;
    if values.is_empty() {
        return Err(Error::EmptyPrefix("no values".into()));
    }
    let mut bits = vec![false; values.len() + 1];
    for (i, v) in values.iter().enumerate() {
        bits[i + 1] = &v.abs() >= eps;
    }
    Ok(judge(&bits, values.len() as u64, delta)?.0)
}

/// The prefix shadow of the density-one set along which `x_n -> 0`:
/// `{n <= N : |x_n| < eps}`.
pub fn density_one_witness(values: &[BigRational], eps: &BigRational) -> IndexSet {
    let mut bits = vec![false; values.len() + 1];
    for (i, v) in values.iter().enumerate() {
        bits[i + 1] = &v.abs() < eps;
    }
    IndexSet::sampled(bits)
}

/// `{a_n x}` for `n = 1..=N`, exact or bracketed.
#[derive(Clone, Debug)]
pub enum NormTable {
    /// `{a_n x} = num[n] / den`.
    Small { num: Vec<u64>, den: u64 },
    Big { num: Vec<BigUint>, den: BigUint },
    /// `lo[n] / SCALE <= {a_n x} <= hi[n] / SCALE`.
    Bracket { lo: Vec<u128>, hi: Vec<u128> },
}

impl NormTable {
    pub fn compute(x: &CircleElement, seq: &ArithmeticSequence, n_max: u64) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::EmptyPrefix("prefix length 0".into()));
        }
        match x {
            CircleElement::Rational(r) => Ok(rational_table(r, seq, n_max)?),
            CircleElement::Digits(rule) => {
                let end = n_max + TAIL_DIGITS;
                if let Some(b) = rule.bound() {
                    if b < end {
                        return Err(Error::BeyondBound { index: end, bound: b });
                    }
                }
                let digits = rule.digits(seq, end)?;
                let ratios = seq.ratios(end)?;
                Ok(bracket_table(&digits, &ratios, n_max, end))
            }
        }
    }

    pub fn len(&self) -> u64 {
        (match self {
            NormTable::Small { num, .. } => num.len(),
            NormTable::Big { num, .. } => num.len(),
            NormTable::Bracket { lo, .. } => lo.len(),
        }) as u64
            - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `exc[n]` is set when `circle_norm({a_n x}) >= eps` is possible.
    pub fn exceptional(&self, eps: &BigRational) -> Vec<bool> {
        let len = self.len() as usize + 1;
        let mut out = vec![false; len];
        if eps > &rational::ratio(1, 2) {
            return out;
        }
        let (a, b) = match to_u128_pair(eps) {
            Some(p) if p.0 < 1 << 60 && p.1 < 1 << 60 => p,
            _ => return self.exceptional_big(eps),
        };
        match self {
            NormTable::Small { num, den } => {
                let d = *den as u128;
                for n in 1..len {
                    let m = num[n] as u128;
                    let near = m.min(d - m);
                    out[n] = frac_ge(near, d, a, b);
                }
            }
            NormTable::Big { .. } => return self.exceptional_big(eps),
            NormTable::Bracket { lo, hi } => {
                for n in 1..len {
                    // small iff the bracket sits in [0, eps) or in (1 - eps, 1]
                    let below = !frac_ge(hi[n], SCALE, a, b);
                    let above = !frac_ge(b - a, b, lo[n], SCALE);
                    out[n] = !(below || above);
                }
            }
        }
        out
    }

    fn exceptional_big(&self, eps: &BigRational) -> Vec<bool> {
        (0..=self.len())
            .map(|n| n > 0 && self.possible_norm_ge(n, eps))
            .collect()
    }

    fn possible_norm_ge(&self, n: u64, eps: &BigRational) -> bool {
        let (lo, hi) = self.bounds(n);
        let one = BigRational::one();
        // the bracket misses [eps, 1 - eps] exactly when it lies on one side
        !(&hi < eps || lo > &one - eps)
    }

    /// Lower and upper bound of `{a_n x}`.
    pub fn bounds(&self, n: u64) -> (BigRational, BigRational) {
        let n = n as usize;
        match self {
            NormTable::Small { num, den } => {
                let r = rational::from_u64(num[n], *den);
                (r.clone(), r)
            }
            NormTable::Big { num, den } => {
                let r = BigRational::new(BigInt::from(num[n].clone()), BigInt::from(den.clone()));
                (r.clone(), r)
            }
            NormTable::Bracket { lo, hi } => {
                let s = BigInt::from(SCALE);
                (
                    BigRational::new(BigInt::from(lo[n]), s.clone()),
                    BigRational::new(BigInt::from(hi[n]), s),
                )
            }
        }
    }

    /// Exact `{a_n x}` when the table is exact.
    pub fn exact(&self, n: u64) -> Option<BigRational> {
        match self {
            NormTable::Bracket { .. } => None,
            _ => Some(self.bounds(n).0),
        }
    }
}

fn rational_table(x: &BigRational, seq: &ArithmeticSequence, n_max: u64) -> Result<NormTable> {
    let x = rational::fract(x);
    let ratios = seq.ratios(n_max)?;
    let len = n_max as usize + 1;
    if let (Some(d), Some(p)) = (x.denom().to_u64().filter(|&d| d < 1 << 63), x.numer().to_u64()) {
        let mut num = vec![0u64; len];
        num[0] = p;
        let mut m = p as u128;
        for n in 1..len {
            m = (ratios[n] as u128 % d as u128) * m % d as u128;
            num[n] = m as u64;
        }
        return Ok(NormTable::Small { num, den: d });
    }
    let den = x.denom().to_biguint().expect("positive");
    let mut m = x.numer().to_biguint().expect("nonnegative");
    let mut num = Vec::with_capacity(len);
    num.push(m.clone());
    for n in 1..len {
        m = (m * ratios[n]) % &den;
        num.push(m.clone());
    }
    Ok(NormTable::Big { num, den })
}

fn bracket_table(digits: &[u64], ratios: &[u64], n_max: u64, end: u64) -> NormTable {
    let len = n_max as usize + 1;
    let mut lo = vec![0u128; len];
    let mut hi = vec![0u128; len];
    // r_end ∈ [0, 1]; r_{n-1} = (c_n + r_n) / q_n
    let (mut l, mut h) = (0u128, SCALE);
    for n in (1..=end as usize).rev() {
        let q = ratios[n] as u128;
        let base = digits[n] as u128 * SCALE;
        l = (base + l) / q;
        h = (base + h).div_ceil(q);
        if n - 1 < len && n > 1 {
            lo[n - 1] = l;
            hi[n - 1] = h.min(SCALE);
        }
    }
    NormTable::Bracket { lo, hi }
}

/// Per-ε part of an oracle report.
#[derive(Clone, Debug, Serialize)]
pub struct EpsReport {
    #[serde(serialize_with = "rational::serialize")]
    pub eps: BigRational,
    pub exceptional_count: u64,
    pub estimate: DensityEstimate,
    pub verdict: Evidence,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub prefix: u64,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub eps_grid: Vec<BigRational>,
    #[serde(serialize_with = "rational::serialize")]
    pub delta: BigRational,
    pub per_eps: Vec<EpsReport>,
    pub verdict: Evidence,
    /// Indices with `circle_norm({a_n x}) < min ε`, reported on convergence.
    #[serde(serialize_with = "crate::spec::serialize_opt_set")]
    pub witness_dense_subset: Option<IndexSet>,
    #[serde(skip)]
    pub norms: Option<Arc<NormTable>>,
}

impl OracleReport {
    /// CSV rows `n,low,high,exc_<eps>...` with exact bounds written `num/den`.
    pub fn trace_csv(&self) -> String {
        let Some(norms) = &self.norms else {
            return String::new();
        };
        let flags: Vec<Vec<bool>> = self.eps_grid.iter().map(|e| norms.exceptional(e)).collect();
        let mut out = String::from("n,frac_low,frac_high");
        for e in &self.eps_grid {
            out.push_str(&format!(",exceptional_{}_{}", e.numer(), e.denom()));
        }
        out.push('\n');
        for n in 1..=self.prefix {
            let (lo, hi) = norms.bounds(n);
            out.push_str(&format!("{n},{lo},{hi}"));
            for f in &flags {
                out.push_str(if f[n as usize] { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }
}

/// Empirical test of `a_n x -> 0` statistically in the circle.
pub fn oracle_membership(
    x: &CircleElement,
    seq: &ArithmeticSequence,
    n_max: u64,
    eps_grid: &[BigRational],
    delta: &BigRational,
    jobs: usize,
) -> Result<OracleReport> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidParameter("empty eps grid".into()));
    }
    for eps in eps_grid {
        check_params(eps, delta)?;
    }
    let norms = Arc::new(NormTable::compute(x, seq, n_max)?);
    oracle_from_norms(norms, n_max, eps_grid, delta, jobs)
}

/// Oracle over precomputed values.
pub fn oracle_from_norms(
    norms: Arc<NormTable>,
    n_max: u64,
    eps_grid: &[BigRational],
    delta: &BigRational,
    jobs: usize,
) -> Result<OracleReport> {
    let mut grid = eps_grid.to_vec();
    grid.sort();
    grid.dedup();
    let one = |eps: &BigRational| -> Result<(EpsReport, Vec<bool>)> {
        let exc = norms.exceptional(eps);
        let (verdict, estimate) = judge(&exc, n_max, delta)?;
        Ok((EpsReport { eps: eps.clone(), exceptional_count: estimate.count, estimate, verdict }, exc))
    };
    let results: Vec<Result<(EpsReport, Vec<bool>)>> = if jobs > 1 && grid.len() > 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = grid.iter().map(|e| scope.spawn(move || one(e))).collect();
            handles.into_iter().map(|h| h.join().expect("oracle worker panicked")).collect()
        })
    } else {
        grid.iter().map(one).collect()
    };
    let mut per_eps = Vec::with_capacity(grid.len());
    let mut smallest_exc = None;
    for r in results {
        let (rep, exc) = r?;
        if smallest_exc.is_none() {
            smallest_exc = Some(exc);
        }
        per_eps.push(rep);
    }
    let verdict = if per_eps.iter().all(|r| r.verdict == Evidence::Converges) {
        Evidence::Converges
    } else if per_eps.iter().all(|r| r.verdict == Evidence::Diverges) {
        Evidence::Diverges
    } else {
        Evidence::Inconclusive
    };
    let witness_dense_subset = (verdict == Evidence::Converges).then(|| {
        let exc = smallest_exc.expect("grid is nonempty");
        let mut bits: Vec<bool> = exc.into_iter().map(|b| !b).collect();
        bits[0] = false;
        IndexSet::sampled(bits)
    });
    Ok(OracleReport {
        prefix: n_max,
        eps_grid: grid,
        delta: delta.clone(),
        per_eps,
        verdict,
        witness_dense_subset,
        norms: Some(norms),
    })
}

/// `a_n x -> 0` along a density-one part of `B`, judged relative to `B`.
pub fn restricted_oracle(
    x: &CircleElement,
    seq: &ArithmeticSequence,
    b: &IndexSet,
    n_max: u64,
    eps: &BigRational,
    delta: &BigRational,
) -> Result<Evidence> {
    check_params(eps, delta)?;
    let norms = NormTable::compute(x, seq, n_max)?;
    restricted_from_norms(&norms, b, n_max, eps, delta)
}

pub fn restricted_from_norms(
    norms: &NormTable,
    b: &IndexSet,
    n_max: u64,
    eps: &BigRational,
    delta: &BigRational,
) -> Result<Evidence> {
    let within = b.bitmap(n_max)?;
    if !within.iter().any(|&x| x) {
        return Err(Error::EmptyPrefix(format!("{} has no element in [1, {n_max}]", b.describe())));
    }
    let exc = norms.exceptional(eps);
    Ok(judge_within(&exc, &within, n_max, delta)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{DigitRule, DigitValue};
    use crate::rational::ratio;
    use num_traits::Zero;

    fn two() -> ArithmeticSequence {
        ArithmeticSequence::constant(2).unwrap()
    }

    fn grid() -> Vec<BigRational> {
        vec![ratio(1, 10), ratio(1, 20), ratio(1, 100)]
    }

    #[test]
    fn stat_limit_zero_examples() {
        let d = ratio(1, 100);
        let inv: Vec<BigRational> = (1..=10_000).map(|n| ratio(1, n)).collect();
        assert_eq!(stat_limit_zero(&inv, &ratio(1, 100), &d).unwrap(), Evidence::Converges);

        let sq: Vec<BigRational> = (1..=1_000_000u64)
            .map(|n| if IndexSet::Squares.contains(n) { ratio(1, 1) } else { ratio(0, 1) })
            .collect();
        assert_eq!(stat_limit_zero(&sq, &ratio(1, 2), &d).unwrap(), Evidence::Converges);

        let third: Vec<BigRational> = (1..=10_000).map(|_| ratio(1, 3)).collect();
        assert_eq!(stat_limit_zero(&third, &ratio(1, 10), &ratio(1, 10)).unwrap(), Evidence::Diverges);
        assert!(stat_limit_zero(&[], &ratio(1, 10), &d).is_err());
    }

    #[test]
    fn density_one_witness_examples() {
        let zeros = vec![ratio(0, 1); 50];
        assert_eq!(density_one_witness(&zeros, &ratio(1, 10)).members(50).unwrap(), (1..=50).collect::<Vec<_>>());
        let sq: Vec<BigRational> =
            (1..=100u64).map(|n| if IndexSet::Squares.contains(n) { ratio(1, 1) } else { ratio(0, 1) }).collect();
        assert_eq!(density_one_witness(&sq, &ratio(1, 2)).members(100).unwrap().len(), 90);
        let third = vec![ratio(1, 3); 50];
        assert!(density_one_witness(&third, &ratio(1, 10)).members(50).unwrap().is_empty());
    }

    #[test]
    fn oracle_on_classical_points() {
        let seq = two();
        let half = CircleElement::rational(1, 2).unwrap();
        let r = oracle_membership(&half, &seq, 1000, &grid(), &ratio(1, 100), 1).unwrap();
        assert_eq!(r.verdict, Evidence::Converges);
        assert!(r.per_eps.iter().all(|e| e.exceptional_count == 0));

        let third = CircleElement::rational(1, 3).unwrap();
        let r = oracle_membership(&third, &seq, 1000, &grid(), &ratio(1, 100), 2).unwrap();
        assert_eq!(r.verdict, Evidence::Diverges);
        let norms = r.norms.as_ref().unwrap();
        for n in 1..=1000 {
            assert_eq!(crate::expansion::circle_norm(&norms.exact(n).unwrap()), ratio(1, 3));
        }
    }

    #[test]
    fn digit_brackets_match_exact_values() {
        // all-ones binary digits on the odds give x = 2/3
        let seq = two();
        let rule = DigitRule::Indicator { support: IndexSet::odds(), value: DigitValue::One };
        let digits = NormTable::compute(&CircleElement::Digits(rule), &seq, 500).unwrap();
        let exact = NormTable::compute(&CircleElement::rational(2, 3).unwrap(), &seq, 500).unwrap();
        for n in 1..=500 {
            let (lo, hi) = digits.bounds(n);
            let v = exact.exact(n).unwrap();
            assert!(lo <= v && v <= hi, "n = {n}");
            assert!(&hi - &lo < ratio(1, 1_000_000));
        }
        for eps in grid() {
            assert_eq!(digits.exceptional(&eps), exact.exceptional(&eps));
        }
    }

    #[test]
    fn restricted_oracle_examples() {
        let seq = two();
        let d = ratio(1, 100);
        let third = CircleElement::rational(1, 3).unwrap();
        assert_eq!(
            restricted_oracle(&third, &seq, &IndexSet::odds(), 10_000, &ratio(1, 10), &d).unwrap(),
            Evidence::Diverges
        );
        let half = CircleElement::rational(1, 2).unwrap();
        assert_eq!(
            restricted_oracle(&half, &seq, &IndexSet::evens(), 10_000, &ratio(1, 10), &d).unwrap(),
            Evidence::Converges
        );
        assert!(restricted_oracle(&half, &seq, &IndexSet::empty(), 100, &ratio(1, 10), &d).is_err());
    }

    #[test]
    fn exceptional_sets_shrink_as_eps_grows() {
        let seq = ArithmeticSequence::constant(3).unwrap();
        let x = CircleElement::Digits(DigitRule::Indicator { support: IndexSet::Squares, value: DigitValue::One });
        let norms = NormTable::compute(&x, &seq, 20_000).unwrap();
        let mut last = u64::MAX;
        for eps in [ratio(1, 1000), ratio(1, 100), ratio(1, 20), ratio(1, 10), ratio(1, 3)] {
            let c = norms.exceptional(&eps).iter().filter(|&&b| b).count() as u64;
            assert!(c <= last);
            last = c;
        }
    }

    #[test]
    fn eventually_zero_sequences_have_no_exceptions() {
        let seq = ArithmeticSequence::affine(1).unwrap();
        let x = CircleElement::rational(7, 720).unwrap();
        let norms = NormTable::compute(&x, &seq, 100).unwrap();
        // 6! = 720 so a_5 x is already integral
        for n in 5..=100 {
            assert!(norms.exact(n).unwrap().is_zero());
        }
        let tail = norms.exceptional(&ratio(1, 100));
        assert!(tail[5..].iter().all(|&b| !b));
    }
}
