//! Canonical mixed-radix digits `x = Σ c_n / a_n` with `0 <= c_n < q_n`, exact
//! fractional parts `{a_n x}`, and the tail identities that tie them together:
//!
//! * `{a_{n-1} x} = c_n / q_n + {a_n x} / q_n`
//! * `{a_{n-1} x} = σ_{n,k} + {a_{n+k} x} / (q_n ... q_{n+k})`
//! * `σ_{n,k} <= {a_{n-1} x} < σ_{n,k} + c_{n+k+1} / (q_n ... q_{n+k+1}) + 2^-(k+2)`
//!
//! where `σ_{n,k} = Σ_{j=0}^{k} c_{n+j} / (q_n ... q_{n+j})`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::density::{join_periods, IndexSet, PERIOD_CAP};
use crate::error::{Error, Result};
use crate::rational::fract;
use crate::sequences::ArithmeticSequence;

/// Window length for the canonicality diagnostic.
pub const CANONICAL_WINDOW: u64 = 64;

/// Digit as a function of the index and its ratio.
#[derive(Clone)]
pub struct CustomDigits {
    pub label: String,
    pub f: Arc<dyn Fn(u64, u64) -> u64 + Send + Sync>,
}

impl fmt::Debug for CustomDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomDigits({:?})", self.label)
    }
}

impl PartialEq for CustomDigits {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.f, &other.f)
    }
}

/// The digit placed on a support index.
#[derive(Clone, Debug, PartialEq)]
pub enum DigitValue {
    One,
    QMinusOne,
    /// `q_n - k`, floored at zero.
    QMinus(u64),
    /// Exactly `k`; an error where `k >= q_n`.
    Fixed(u64),
    /// `min(k, q_n - 1)`.
    Capped(u64),
    /// `floor(q_n * num / den)`, with `num < den`.
    Fraction { num: u64, den: u64 },
    Custom(CustomDigits),
}

impl DigitValue {
    pub fn digit(&self, n: u64, q: u64) -> Result<u64> {
        let c = match self {
            DigitValue::One => 1,
            DigitValue::QMinusOne => q - 1,
            DigitValue::QMinus(k) => q.saturating_sub(*k),
            DigitValue::Fixed(k) => *k,
            DigitValue::Capped(k) => (*k).min(q - 1),
            DigitValue::Fraction { num, den } => ((q as u128 * *num as u128) / *den as u128) as u64,
            DigitValue::Custom(c) => (c.f)(n, q),
        };
        if c >= q {
            return Err(Error::DigitOutOfRange { index: n, digit: c, ratio: q });
        }
        Ok(c)
    }

    /// The digit is a function of `q_n` alone.
    pub fn level_determined(&self) -> bool {
        !matches!(self, DigitValue::Custom(_))
    }

    fn validate(&self) -> Result<()> {
        match self {
            DigitValue::Fraction { num, den } if *den == 0 || num >= den => Err(Error::InvalidDigitRule(
                format!("fraction {num}/{den} must lie in [0, 1)"),
            )),
            _ => Ok(()),
        }
    }
}

/// One piece of a piecewise digit rule.
#[derive(Clone, Debug, PartialEq)]
pub struct DigitPiece {
    pub set: IndexSet,
    pub value: DigitValue,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DigitRule {
    /// `c_n = value(q_n)` on `support`, zero elsewhere.
    Indicator { support: IndexSet, value: DigitValue },
    /// The first piece containing `n` decides the digit; zero if none does.
    Piecewise(Vec<DigitPiece>),
    EventuallyPeriodic { prefix: Vec<u64>, period: Vec<u64> },
    PrefixThenZero(Vec<u64>),
}

impl DigitRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            DigitRule::Indicator { value, .. } => value.validate(),
            DigitRule::Piecewise(pieces) => pieces.iter().try_for_each(|p| p.value.validate()),
            DigitRule::EventuallyPeriodic { period, .. } if period.is_empty() => {
                Err(Error::InvalidDigitRule("empty period".into()))
            }
            _ => Ok(()),
        }
    }

    /// `c_0..=c_{n_max}` with `c_0 = 0`.
    pub fn digits(&self, seq: &ArithmeticSequence, n_max: u64) -> Result<Vec<u64>> {
        let q = seq.ratios(n_max)?;
        let len = n_max as usize + 1;
        let mut c = vec![0u64; len];
        match self {
            DigitRule::Indicator { support, value } => {
                let bits = support.bitmap(n_max)?;
                for n in 1..len {
                    if bits[n] {
                        c[n] = value.digit(n as u64, q[n])?;
                    }
                }
            }
            DigitRule::Piecewise(pieces) => {
                let mut done = vec![false; len];
                for piece in pieces {
                    let bits = piece.set.bitmap(n_max)?;
                    for n in 1..len {
                        if bits[n] && !done[n] {
                            done[n] = true;
                            c[n] = piece.value.digit(n as u64, q[n])?;
                        }
                    }
                }
            }
            DigitRule::EventuallyPeriodic { prefix, period } => {
                for n in 1..len {
                    c[n] = if n <= prefix.len() {
                        prefix[n - 1]
                    } else {
                        period[(n - 1 - prefix.len()) % period.len()]
                    };
                }
            }
            DigitRule::PrefixThenZero(prefix) => {
                for (n, &d) in prefix.iter().enumerate().take(len - 1) {
                    c[n + 1] = d;
                }
            }
        }
        for n in 1..len {
            if c[n] >= q[n] {
                return Err(Error::DigitOutOfRange { index: n as u64, digit: c[n], ratio: q[n] });
            }
        }
        Ok(c)
    }

    /// Largest index the digits can be produced for.
    pub fn bound(&self) -> Option<u64> {
        match self {
            DigitRule::Indicator { support, .. } => support.bound(),
            DigitRule::Piecewise(pieces) => pieces.iter().filter_map(|p| p.set.bound()).min(),
            _ => None,
        }
    }
}

/// A point of the circle `R/Z`.
#[derive(Clone, Debug, PartialEq)]
pub enum CircleElement {
    /// Reduced rational in `[0, 1)`.
    Rational(BigRational),
    Digits(DigitRule),
}

impl CircleElement {
    /// `num/den` reduced modulo 1.
    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::InvalidRational("zero denominator".into()));
        }
        Ok(CircleElement::Rational(fract(&BigRational::new(num.into(), den))))
    }

    pub fn from_rational(x: &BigRational) -> Self {
        CircleElement::Rational(fract(x))
    }

    pub fn digits(rule: DigitRule) -> Result<Self> {
        rule.validate()?;
        Ok(CircleElement::Digits(rule))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            CircleElement::Rational(x) => Some(x),
            CircleElement::Digits(_) => None,
        }
    }
}

/// Digits `c_1..c_N` of an element together with the ratios they live on.
#[derive(Clone, Debug)]
pub struct ExpansionPrefix {
    pub n_max: u64,
    /// `ratios[n] = q_n`, slot 0 unused; may extend past `n_max`.
    pub ratios: Arc<Vec<u64>>,
    /// `digits[n] = c_n`, slot 0 unused.
    pub digits: Vec<u64>,
    /// Numerators of the greedy remainders `r_n = {a_n x}` over `den`, for
    /// rational inputs; `remainders[0] = x`.
    pub remainders: Option<(Vec<BigUint>, BigUint)>,
}

impl ExpansionPrefix {
    pub fn remainder(&self, n: u64) -> Option<BigRational> {
        let (nums, den) = self.remainders.as_ref()?;
        let num = nums.get(n as usize)?;
        Some(BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone())))
    }

    pub fn digit(&self, n: u64) -> u64 {
        self.digits[n as usize]
    }

    pub fn ratio(&self, n: u64) -> u64 {
        self.ratios[n as usize]
    }
}

/// Greedy digits of a rational: `c_n = floor(q_n r_{n-1})`, `r_n = q_n r_{n-1} - c_n`.
pub fn expand(x: &BigRational, seq: &ArithmeticSequence, n_max: u64) -> Result<ExpansionPrefix> {
    if x.is_negative() || x >= &BigRational::one() {
        return Err(Error::InvalidParameter(format!("{x} is not in [0, 1)")));
    }
    let ratios = seq.ratios(n_max)?;
    let den = x.denom().to_biguint().expect("positive denominator");
    let mut m = x.numer().to_biguint().expect("nonnegative numerator");
    let len = n_max as usize + 1;
    let mut digits = vec![0u64; len];
    let mut rems = Vec::with_capacity(len);
    rems.push(m.clone());
    if let (Some(d), Some(mut r)) = (den.to_u64().filter(|&d| d < 1 << 63), m.to_u64()) {
        let d = d as u128;
        for n in 1..len {
            let t = ratios[n] as u128 * r as u128;
            digits[n] = (t / d) as u64;
            r = (t % d) as u64;
            rems.push(BigUint::from(r));
        }
    } else {
        for n in 1..len {
            let (c, r) = (&m * ratios[n]).div_rem(&den);
            digits[n] = c.to_u64().expect("digit below ratio");
            m = r;
            rems.push(m.clone());
        }
    }
    Ok(ExpansionPrefix { n_max, ratios, digits, remainders: Some((rems, den)) })
}

/// Digits of any element over `[1, n_max]`.
pub fn expand_element(x: &CircleElement, seq: &ArithmeticSequence, n_max: u64) -> Result<ExpansionPrefix> {
    match x {
        CircleElement::Rational(r) => expand(r, seq, n_max),
        CircleElement::Digits(rule) => Ok(ExpansionPrefix {
            n_max,
            ratios: seq.ratios(n_max)?,
            digits: rule.digits(seq, n_max)?,
            remainders: None,
        }),
    }
}

/// `{a_n x}` for rational `x = p/d`, from `a_n mod d` (never forming `a_n x`).
pub fn frac_part(x: &BigRational, seq: &ArithmeticSequence, n: u64) -> Result<BigRational> {
    let x = fract(x);
    let den = x.denom().clone();
    let ratios = seq.ratios(n)?;
    let mut a = BigInt::one() % &den;
    for &q in &ratios[1..=n as usize] {
        a = (a * q) % &den;
    }
    let num = (a * x.numer()).mod_floor(&den);
    Ok(BigRational::new(num, den))
}

/// Distance to the nearest integer of `r ∈ [0, 1)`.
pub fn circle_norm(r: &BigRational) -> BigRational {
    let one_minus = BigRational::one() - r;
    if &one_minus < r {
        one_minus
    } else {
        r.clone()
    }
}

/// `σ_{n,k} = Σ_{j=0}^{k} c_{n+j} / (q_n ... q_{n+j})`.
pub fn sigma(prefix: &ExpansionPrefix, n: u64, k: u64) -> Result<BigRational> {
    if n == 0 || n + k > prefix.n_max {
        return Err(Error::EmptyPrefix(format!(
            "sigma({n}, {k}) needs digits up to {} but only {} are known",
            n + k,
            prefix.n_max
        )));
    }
    // Horner from the far end: s = (c_j + s) / q_j
    let mut s = BigRational::zero();
    for j in (n..=n + k).rev() {
        s = (s + BigInt::from(prefix.digit(j))) / BigInt::from(prefix.ratio(j));
    }
    Ok(s)
}

/// `Σ_{n<=N} c_n / a_n`, exactly.
pub fn reconstruct(prefix: &ExpansionPrefix) -> BigRational {
    let mut num = BigUint::zero();
    let mut a = BigUint::one();
    for n in 1..=prefix.n_max {
        let q = prefix.ratio(n);
        num = num * q + prefix.digit(n);
        a *= q;
    }
    BigRational::new(num.into(), a.into())
}

/// `{a_n x}` through the term itself, independent of the modular walk.
fn direct_frac(x: &BigRational, seq: &ArithmeticSequence, n: u64) -> Result<BigRational> {
    Ok(fract(&(x * BigInt::from(seq.term(n)?))))
}

/// Checks the product identity, the tail identities and the `σ` recursion at
/// `(n, k)` with zero tolerance.
pub fn verify_identities(x: &BigRational, seq: &ArithmeticSequence, n: u64, k: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidParameter("identities are indexed from n = 1".into()));
    }
    let x = fract(x);
    let extra = 8;
    let prefix = expand(&x, seq, n + k + extra + 1)?;
    let prod = BigInt::from(seq.ratio_product(n, k)?);
    let a_lo = BigInt::from(seq.term(n - 1)?);
    let a_hi = BigInt::from(seq.term(n + k)?);
    let products_agree = &a_lo * &prod == a_hi;

    let head = direct_frac(&x, seq, n - 1)?;
    let at_n = direct_frac(&x, seq, n)?;
    let tail = direct_frac(&x, seq, n + k)?;
    let s = sigma(&prefix, n, k)?;
    let split = head == &s + &tail / &prod;

    let q_n = BigInt::from(prefix.ratio(n));
    let one_step = head == (&at_n + BigInt::from(prefix.digit(n))) / &q_n;

    // the tail past n + k is again a σ plus a shorter tail
    let longer = sigma(&prefix, n, k + extra)?;
    let far = direct_frac(&x, seq, n + k + extra)?;
    let far_prod = BigInt::from(seq.ratio_product(n, k + extra)?);
    let tail_expansion = &tail / &prod == (&longer - &s) + far / far_prod;

    let next = sigma(&prefix, n, k + 1)?;
    let step_prod = &prod * BigInt::from(prefix.ratio(n + k + 1));
    let recursion = next == &s + BigRational::new(BigInt::from(prefix.digit(n + k + 1)), step_prod.clone());

    let remainder_agrees = prefix.remainder(n - 1).as_ref() == Some(&head);

    Ok(products_agree && split && one_step && tail_expansion && recursion && remainder_agrees)
}

/// `σ_{n,k} <= {a_{n-1} x} < σ_{n,k} + c_{n+k+1} / (q_n ... q_{n+k+1}) + 2^-(k+2)`.
pub fn convergence_bound_holds(x: &BigRational, seq: &ArithmeticSequence, n: u64, k: u64) -> Result<bool> {
    let x = fract(x);
    let prefix = expand(&x, seq, n + k + 1)?;
    let head = direct_frac(&x, seq, n - 1)?;
    let s = sigma(&prefix, n, k)?;
    let prod = BigInt::from(seq.ratio_product(n, k + 1)?);
    let slack = BigRational::new(BigInt::from(prefix.digit(n + k + 1)), prod)
        + BigRational::new(BigInt::one(), BigInt::one() << (k + 2));
    Ok(s <= head && head < s + slack)
}

/// `supp(x) ∩ [1, N]` and `supp_q(x) ∩ [1, N]` as sampled sets.
pub fn support(prefix: &ExpansionPrefix) -> (IndexSet, IndexSet) {
    let len = prefix.n_max as usize + 1;
    let mut supp = vec![false; len];
    let mut supp_q = vec![false; len];
    for n in 1..len {
        supp[n] = prefix.digits[n] != 0;
        supp_q[n] = prefix.digits[n] + 1 == prefix.ratios[n];
    }
    (IndexSet::sampled(supp), IndexSet::sampled(supp_q))
}

/// First index of a window of `w` consecutive maximal digits, if any; such a
/// run suggests a non-canonical tail.
pub fn canonicality_violation(prefix: &ExpansionPrefix, w: u64) -> Option<u64> {
    let mut run = 0u64;
    for n in 1..=prefix.n_max {
        if prefix.digit(n) + 1 == prefix.ratio(n) {
            run += 1;
            if run >= w {
                return Some(n + 1 - w);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// Largest ratio value probed when classifying a predicate on ratio values.
const VALUE_SCAN: u64 = 1 << 16;

/// `{n : pred(q_n)}` as a union of level sets (or the complement of one)
/// when `pred` settles into a constant answer for large values; the digit
/// formulas here are ratios of linear functions of `q`, so the scan over
/// `[2, 2^16]` sees the settled behaviour.
pub fn ratio_filter(seq: &Arc<ArithmeticSequence>, pred: impl Fn(u64) -> bool) -> Option<IndexSet> {
    let mut yes = BTreeSet::new();
    let mut no = BTreeSet::new();
    for v in 2..=VALUE_SCAN {
        if pred(v) {
            yes.insert(v);
        } else {
            no.insert(v);
        }
    }
    let settled = |set: &BTreeSet<u64>| set.range(VALUE_SCAN / 2..).next().is_none();
    let levels = |values: BTreeSet<u64>| match values.len() {
        0 => IndexSet::empty(),
        1 => IndexSet::level_set(seq, *values.first().expect("one value")),
        _ => IndexSet::LevelValues { seq: Arc::clone(seq), values: Arc::new(values) },
    };
    if settled(&yes) {
        Some(levels(yes))
    } else if settled(&no) {
        Some(if no.is_empty() { IndexSet::naturals() } else { levels(no).complement() })
    } else {
        None
    }
}

/// Exact `supp(x)` and `supp_q(x)` when the digit rule (or the rational and
/// the ratio rule together) has enough structure.
pub fn structural_support(x: &CircleElement, seq: &Arc<ArithmeticSequence>) -> Option<(IndexSet, IndexSet)> {
    match x {
        CircleElement::Digits(DigitRule::Indicator { support, value }) if value.level_determined() => {
            let nonzero = ratio_filter(seq, |q| value.digit(0, q).is_ok_and(|c| c != 0))?;
            let maximal = ratio_filter(seq, |q| value.digit(0, q).is_ok_and(|c| c + 1 == q))?;
            Some((restrict(support, nonzero), restrict(support, maximal)))
        }
        CircleElement::Digits(DigitRule::Piecewise(pieces))
            if pieces.iter().all(|p| p.value.level_determined()) =>
        {
            let mut supp = Vec::new();
            let mut supp_q = Vec::new();
            let mut earlier: Vec<IndexSet> = Vec::new();
            for p in pieces {
                let own = if earlier.is_empty() {
                    p.set.clone()
                } else {
                    p.set.clone().minus(IndexSet::Union(earlier.clone()))
                };
                let nonzero = ratio_filter(seq, |q| p.value.digit(0, q).is_ok_and(|c| c != 0))?;
                let maximal = ratio_filter(seq, |q| p.value.digit(0, q).is_ok_and(|c| c + 1 == q))?;
                supp.push(restrict(&own, nonzero));
                supp_q.push(restrict(&own, maximal));
                earlier.push(p.set.clone());
            }
            Some((IndexSet::Union(supp), IndexSet::Union(supp_q)))
        }
        CircleElement::Rational(r) if digit_period(x, seq).is_none() => {
            let end = rational_termination(r, seq, PERIOD_CAP)?;
            let prefix = expand(r, seq, end).ok()?;
            let supp = IndexSet::finite((1..=end).filter(|&n| prefix.digit(n) != 0));
            let supp_q = IndexSet::finite((1..=end).filter(|&n| prefix.digit(n) + 1 == prefix.ratio(n)));
            Some((supp, supp_q))
        }
        _ => {
            let (start, period) = digit_period(x, seq)?;
            let prefix = expand_element(x, seq, start + period - 1).ok()?;
            Some((
                periodic_set(start, period, |n| prefix.digit(n) != 0),
                periodic_set(start, period, |n| prefix.digit(n) + 1 == prefix.ratio(n)),
            ))
        }
    }
}

fn restrict(base: &IndexSet, filter: IndexSet) -> IndexSet {
    match filter {
        IndexSet::Interval { lo: 1, hi: None } => base.clone(),
        f => base.clone().intersect(f),
    }
}

/// The set `{n : member(n)}` for a predicate that is periodic from `start`
/// on with the given period; `member` is evaluated on `[1, start + period)`.
pub fn periodic_set(start: u64, period: u64, member: impl Fn(u64) -> bool) -> IndexSet {
    let head = IndexSet::finite((1..start).filter(|&n| member(n)));
    let residues: Vec<u64> = (start..start + period).filter(|&n| member(n)).map(|n| n % period).collect();
    let tail = match residues.len() as u64 {
        0 => return head,
        r if r == period => IndexSet::Interval { lo: start, hi: None },
        _ => IndexSet::Residues { modulus: period, residues }.from_index(start),
    };
    match head {
        IndexSet::Finite(s) if s.is_empty() => tail,
        head => head.union(tail),
    }
}

/// `(start, period)` past which both the digits and the ratios repeat.
pub fn digit_period(x: &CircleElement, seq: &ArithmeticSequence) -> Option<(u64, u64)> {
    let ratio_period = seq.rule().eventual_period()?;
    let own = match x {
        CircleElement::Rational(r) => rational_period(r, seq, ratio_period)?,
        CircleElement::Digits(DigitRule::EventuallyPeriodic { prefix, period }) => {
            (prefix.len() as u64 + 1, period.len() as u64)
        }
        CircleElement::Digits(DigitRule::PrefixThenZero(prefix)) => (prefix.len() as u64 + 1, 1),
        CircleElement::Digits(DigitRule::Indicator { support, value }) if value.level_determined() => {
            support.eventual_period()?
        }
        CircleElement::Digits(DigitRule::Piecewise(pieces))
            if pieces.iter().all(|p| p.value.level_determined()) =>
        {
            pieces.iter().try_fold((1, 1), |acc, p| join_periods(acc, p.set.eventual_period()?))?
        }
        CircleElement::Digits(_) => return None,
    };
    join_periods(own, ratio_period)
}

/// Index after which every digit of the rational is zero, i.e. the first `n`
/// with `a_n x` integral, searched up to `limit`.
pub fn rational_termination(x: &BigRational, seq: &ArithmeticSequence, limit: u64) -> Option<u64> {
    let den = x.denom().to_u64().filter(|&d| d < 1 << 63)? as u128;
    let mut m = x.numer().to_u64()? as u128;
    let bound = seq.rule().probe_bound().unwrap_or(u64::MAX).min(limit);
    let mut n = 0;
    while m != 0 {
        n += 1;
        if n > bound {
            return None;
        }
        m = (seq.ratio(n).ok()? as u128 * m) % den;
    }
    Some(n)
}

/// Cycle detection on the greedy state `(r_n, n mod period)`.
fn rational_period(x: &BigRational, seq: &ArithmeticSequence, (start, period): (u64, u64)) -> Option<(u64, u64)> {
    let den = x.denom().to_u64()? as u128;
    let mut m = x.numer().to_u64()? as u128;
    let limit = PERIOD_CAP;
    let first = start.max(1);
    // walk to the start of the periodic part of the ratios
    for n in 1..first {
        m = (seq.ratio(n).ok()? as u128 * m) % den;
    }
    let mut seen: HashMap<(u128, u64), u64> = HashMap::new();
    let mut n = first;
    loop {
        if m == 0 {
            return Some((n, 1));
        }
        let key = (m, (n - first) % period);
        if let Some(&prev) = seen.get(&key) {
            return Some((prev, n - prev));
        }
        if n - first > limit {
            return None;
        }
        seen.insert(key, n);
        m = (seq.ratio(n).ok()? as u128 * m) % den;
        n += 1;
    }
}
