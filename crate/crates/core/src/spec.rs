//! JSON formats for sequences, index sets and circle elements.
//!
//! Each format is a tagged serde mirror of the domain type. Parse errors carry
//! a JSON-pointer location such as `/rule/support/of/1`.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};

use crate::density::IndexSet;
use crate::error::{Error, Result};
use crate::expansion::{CircleElement, DigitPiece, DigitRule, DigitValue};
use crate::sequences::{ArithmeticSequence, LevelCell, RatioRule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeqSpec {
    ConstantRatio { q: u64 },
    PeriodicRatio { pattern: Vec<u64> },
    AffineRatio { offset: i64 },
    TableTail { prefix: Vec<u64>, tail: Box<SeqSpec> },
    #[serde(rename = "example_2_6", alias = "squares_partition")]
    SquaresPartition,
    #[serde(rename = "example_2_7", alias = "dyadic_partition")]
    DyadicPartition,
    LevelCells { cells: Vec<CellSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub set: SetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<SeqSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Naturals,
    Ap { start: u64, step: u64 },
    Residues { modulus: u64, residues: Vec<u64> },
    Squares,
    ShiftedSquares { offset: u64 },
    Finite { elems: Vec<u64> },
    Interval { lo: u64, #[serde(default, skip_serializing_if = "Option::is_none")] hi: Option<u64> },
    LevelSet { seq: Box<SeqSpec>, value: u64 },
    LevelValues { seq: Box<SeqSpec>, values: Vec<u64> },
    LevelTails { seq: Box<SeqSpec>, tails: Vec<(u64, u64)> },
    /// Run-length encoded prefix data: members are the closed runs `[a, b]`.
    Sampled { bound: u64, runs: Vec<(u64, u64)> },
    Predicate { label: String, bound: u64 },
    Union { of: Vec<SetSpec> },
    Intersection { of: Vec<SetSpec> },
    Difference { of: Box<SetSpec>, minus: Box<SetSpec> },
    Complement { of: Box<SetSpec> },
    Shift { of: Box<SetSpec>, k: i64 },
}

/// Integer written either as a JSON number or, when large, a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BigIntSpec {
    Small(i64),
    Text(String),
}

impl BigIntSpec {
    fn parse(&self, at: &str) -> Result<BigInt> {
        match self {
            BigIntSpec::Small(v) => Ok(BigInt::from(*v)),
            BigIntSpec::Text(s) => BigInt::from_str(s).map_err(|_| spec_err(at, format!("not an integer: {s:?}"))),
        }
    }
}

impl From<&BigInt> for BigIntSpec {
    fn from(v: &BigInt) -> Self {
        match v.to_i64() {
            Some(v) => BigIntSpec::Small(v),
            None => BigIntSpec::Text(v.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementSpec {
    Rational { num: BigIntSpec, den: BigIntSpec },
    DigitElement { rule: DigitRuleSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DigitRuleSpec {
    Indicator { support: SetSpec, value: DigitValueSpec },
    Piecewise { pieces: Vec<PieceSpec> },
    EventuallyPeriodic { prefix: Vec<u64>, period: Vec<u64> },
    PrefixThenZero { prefix: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub set: SetSpec,
    pub value: DigitValueSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DigitValueSpec {
    One,
    QMinusOne,
    QMinus(u64),
    Fixed(u64),
    Capped(u64),
    Fraction(u64, u64),
    Custom(String),
}

fn spec_err(at: &str, message: impl Into<String>) -> Error {
    Error::Spec { location: if at.is_empty() { "/".into() } else { at.into() }, message: message.into() }
}

fn located(at: &str, e: Error) -> Error {
    match e {
        Error::Spec { .. } => e,
        other => spec_err(at, other.to_string()),
    }
}

impl SeqSpec {
    pub fn to_rule(&self, at: &str) -> Result<RatioRule> {
        let rule = match self {
            SeqSpec::ConstantRatio { q } => RatioRule::Constant(*q),
            SeqSpec::PeriodicRatio { pattern } => RatioRule::Periodic(pattern.clone()),
            SeqSpec::AffineRatio { offset } => RatioRule::Affine { offset: *offset },
            SeqSpec::TableTail { prefix, tail } => RatioRule::TableWithTail {
                prefix: prefix.clone(),
                tail: Box::new(tail.to_rule(&format!("{at}/tail"))?),
            },
            SeqSpec::SquaresPartition => RatioRule::SquaresPartition,
            SeqSpec::DyadicPartition => RatioRule::DyadicPartition,
            SeqSpec::LevelCells { cells } => {
                let mut out = Vec::with_capacity(cells.len());
                for (i, c) in cells.iter().enumerate() {
                    let here = format!("{at}/cells/{i}");
                    let rule = match (&c.value, &c.ratio) {
                        (Some(v), None) => RatioRule::Constant(*v),
                        (None, Some(r)) => r.to_rule(&format!("{here}/ratio"))?,
                        _ => return Err(spec_err(&here, "a cell needs exactly one of `value` and `ratio`")),
                    };
                    out.push(LevelCell { set: c.set.to_set(&format!("{here}/set"))?, rule });
                }
                RatioRule::LevelCells(out)
            }
        };
        rule.validate().map_err(|e| located(at, e))?;
        Ok(rule)
    }

    pub fn to_sequence(&self, at: &str) -> Result<ArithmeticSequence> {
        ArithmeticSequence::new(self.to_rule(at)?).map_err(|e| located(at, e))
    }
}

impl From<&RatioRule> for SeqSpec {
    fn from(rule: &RatioRule) -> Self {
        match rule {
            RatioRule::Constant(q) => SeqSpec::ConstantRatio { q: *q },
            RatioRule::Periodic(p) => SeqSpec::PeriodicRatio { pattern: p.clone() },
            RatioRule::Affine { offset } => SeqSpec::AffineRatio { offset: *offset },
            RatioRule::TableWithTail { prefix, tail } => {
                SeqSpec::TableTail { prefix: prefix.clone(), tail: Box::new(SeqSpec::from(tail.as_ref())) }
            }
            RatioRule::SquaresPartition => SeqSpec::SquaresPartition,
            RatioRule::DyadicPartition => SeqSpec::DyadicPartition,
            RatioRule::LevelCells(cells) => SeqSpec::LevelCells {
                cells: cells
                    .iter()
                    .map(|c| match &c.rule {
                        RatioRule::Constant(v) => CellSpec { set: SetSpec::from(&c.set), value: Some(*v), ratio: None },
                        r => CellSpec { set: SetSpec::from(&c.set), value: None, ratio: Some(SeqSpec::from(r)) },
                    })
                    .collect(),
            },
        }
    }
}

impl From<&ArithmeticSequence> for SeqSpec {
    fn from(seq: &ArithmeticSequence) -> Self {
        SeqSpec::from(seq.rule())
    }
}

impl SetSpec {
    pub fn to_set(&self, at: &str) -> Result<IndexSet> {
        let seq_at = format!("{at}/seq");
        let children = |of: &[SetSpec]| -> Result<Vec<IndexSet>> {
            of.iter().enumerate().map(|(i, c)| c.to_set(&format!("{at}/of/{i}"))).collect()
        };
        Ok(match self {
            SetSpec::Naturals => IndexSet::naturals(),
            SetSpec::Ap { start, step } => {
                if *start == 0 || *step == 0 {
                    return Err(spec_err(at, "progressions need start >= 1 and step >= 1"));
                }
                IndexSet::Progression { start: *start, step: *step }
            }
            SetSpec::Residues { modulus, residues } => {
                if *modulus == 0 {
                    return Err(spec_err(at, "modulus must be positive"));
                }
                IndexSet::Residues { modulus: *modulus, residues: residues.clone() }
            }
            SetSpec::Squares => IndexSet::Squares,
            SetSpec::ShiftedSquares { offset } => IndexSet::ShiftedSquares(*offset),
            SetSpec::Finite { elems } => {
                if elems.contains(&0) {
                    return Err(spec_err(at, "indices start at 1"));
                }
                IndexSet::finite(elems.iter().copied())
            }
            SetSpec::Interval { lo, hi } => IndexSet::Interval { lo: (*lo).max(1), hi: *hi },
            SetSpec::LevelSet { seq, value } => {
                IndexSet::LevelSet { seq: Arc::new(seq.to_sequence(&seq_at)?), value: *value }
            }
            SetSpec::LevelValues { seq, values } => IndexSet::LevelValues {
                seq: Arc::new(seq.to_sequence(&seq_at)?),
                values: Arc::new(values.iter().copied().collect()),
            },
            SetSpec::LevelTails { seq, tails } => IndexSet::LevelTails {
                seq: Arc::new(seq.to_sequence(&seq_at)?),
                tails: Arc::new(tails.iter().copied().collect()),
            },
            SetSpec::Sampled { bound, runs } => {
                let mut bits = vec![false; *bound as usize + 1];
                for (i, &(a, b)) in runs.iter().enumerate() {
                    if a == 0 || a > b || b > *bound {
                        return Err(spec_err(&format!("{at}/runs/{i}"), format!("bad run [{a}, {b}]")));
                    }
                    bits[a as usize..=b as usize].iter_mut().for_each(|x| *x = true);
                }
                IndexSet::sampled(bits)
            }
            SetSpec::Predicate { label, .. } => {
                return Err(spec_err(at, format!("predicate set {label:?} cannot be rebuilt from JSON")))
            }
            SetSpec::Union { of } => IndexSet::Union(children(of)?),
            SetSpec::Intersection { of } => IndexSet::Intersection(children(of)?),
            SetSpec::Difference { of, minus } => {
                of.to_set(&format!("{at}/of"))?.minus(minus.to_set(&format!("{at}/minus"))?)
            }
            SetSpec::Complement { of } => of.to_set(&format!("{at}/of"))?.complement(),
            SetSpec::Shift { of, k } => IndexSet::Shift(Box::new(of.to_set(&format!("{at}/of"))?), *k),
        })
    }
}

impl From<&IndexSet> for SetSpec {
    fn from(set: &IndexSet) -> Self {
        let seq = |s: &Arc<ArithmeticSequence>| Box::new(SeqSpec::from(s.as_ref()));
        let all = |ch: &[IndexSet]| ch.iter().map(SetSpec::from).collect();
        match set {
            IndexSet::Finite(s) => SetSpec::Finite { elems: s.iter().copied().collect() },
            IndexSet::Interval { lo: 1, hi: None } => SetSpec::Naturals,
            IndexSet::Interval { lo, hi } => SetSpec::Interval { lo: *lo, hi: *hi },
            IndexSet::Progression { start, step } => SetSpec::Ap { start: *start, step: *step },
            IndexSet::Residues { modulus, residues } => {
                SetSpec::Residues { modulus: *modulus, residues: residues.clone() }
            }
            IndexSet::Squares => SetSpec::Squares,
            IndexSet::ShiftedSquares(i) => SetSpec::ShiftedSquares { offset: *i },
            IndexSet::LevelSet { seq: s, value } => SetSpec::LevelSet { seq: seq(s), value: *value },
            IndexSet::LevelValues { seq: s, values } => {
                SetSpec::LevelValues { seq: seq(s), values: values.iter().copied().collect() }
            }
            IndexSet::LevelTails { seq: s, tails } => {
                SetSpec::LevelTails { seq: seq(s), tails: tails.iter().map(|(&v, &t)| (v, t)).collect() }
            }
            IndexSet::Sampled { bits, bound } => SetSpec::Sampled { bound: *bound, runs: runs(bits, *bound) },
            IndexSet::Predicate(p) => SetSpec::Predicate { label: p.label.clone(), bound: p.bound },
            IndexSet::Union(ch) => SetSpec::Union { of: all(ch) },
            IndexSet::Intersection(ch) => SetSpec::Intersection { of: all(ch) },
            IndexSet::Difference(a, b) => {
                SetSpec::Difference { of: Box::new(SetSpec::from(a.as_ref())), minus: Box::new(SetSpec::from(b.as_ref())) }
            }
            IndexSet::Complement(a) => SetSpec::Complement { of: Box::new(SetSpec::from(a.as_ref())) },
            IndexSet::Shift(a, k) => SetSpec::Shift { of: Box::new(SetSpec::from(a.as_ref())), k: *k },
        }
    }
}

fn runs(bits: &[bool], bound: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = None;
    for n in 1..=bound {
        match (bits[n as usize], start) {
            (true, None) => start = Some(n),
            (false, Some(s)) => {
                out.push((s, n - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, bound));
    }
    out
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetSpec::from(self).serialize(s)
    }
}

pub fn serialize_opt_set<S: Serializer>(set: &Option<IndexSet>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match set {
        Some(set) => set.serialize(s),
        None => s.serialize_none(),
    }
}

impl DigitValueSpec {
    fn to_value(&self, at: &str) -> Result<DigitValue> {
        Ok(match self {
            DigitValueSpec::One => DigitValue::One,
            DigitValueSpec::QMinusOne => DigitValue::QMinusOne,
            DigitValueSpec::QMinus(k) => DigitValue::QMinus(*k),
            DigitValueSpec::Fixed(k) => DigitValue::Fixed(*k),
            DigitValueSpec::Capped(k) => DigitValue::Capped(*k),
            DigitValueSpec::Fraction(a, b) => DigitValue::Fraction { num: *a, den: *b },
            DigitValueSpec::Custom(label) => {
                return Err(spec_err(at, format!("custom digit rule {label:?} cannot be rebuilt from JSON")))
            }
        })
    }
}

impl From<&DigitValue> for DigitValueSpec {
    fn from(v: &DigitValue) -> Self {
        match v {
            DigitValue::One => DigitValueSpec::One,
            DigitValue::QMinusOne => DigitValueSpec::QMinusOne,
            DigitValue::QMinus(k) => DigitValueSpec::QMinus(*k),
            DigitValue::Fixed(k) => DigitValueSpec::Fixed(*k),
            DigitValue::Capped(k) => DigitValueSpec::Capped(*k),
            DigitValue::Fraction { num, den } => DigitValueSpec::Fraction(*num, *den),
            DigitValue::Custom(c) => DigitValueSpec::Custom(c.label.clone()),
        }
    }
}

impl DigitRuleSpec {
    fn to_rule(&self, at: &str) -> Result<DigitRule> {
        let rule = match self {
            DigitRuleSpec::Indicator { support, value } => DigitRule::Indicator {
                support: support.to_set(&format!("{at}/support"))?,
                value: value.to_value(&format!("{at}/value"))?,
            },
            DigitRuleSpec::Piecewise { pieces } => DigitRule::Piecewise(
                pieces
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let here = format!("{at}/pieces/{i}");
                        Ok(DigitPiece {
                            set: p.set.to_set(&format!("{here}/set"))?,
                            value: p.value.to_value(&format!("{here}/value"))?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            DigitRuleSpec::EventuallyPeriodic { prefix, period } => {
                DigitRule::EventuallyPeriodic { prefix: prefix.clone(), period: period.clone() }
            }
            DigitRuleSpec::PrefixThenZero { prefix } => DigitRule::PrefixThenZero(prefix.clone()),
        };
        rule.validate().map_err(|e| located(at, e))?;
        Ok(rule)
    }
}

impl From<&DigitRule> for DigitRuleSpec {
    fn from(rule: &DigitRule) -> Self {
        match rule {
            DigitRule::Indicator { support, value } => {
                DigitRuleSpec::Indicator { support: SetSpec::from(support), value: DigitValueSpec::from(value) }
            }
            DigitRule::Piecewise(pieces) => DigitRuleSpec::Piecewise {
                pieces: pieces
                    .iter()
                    .map(|p| PieceSpec { set: SetSpec::from(&p.set), value: DigitValueSpec::from(&p.value) })
                    .collect(),
            },
            DigitRule::EventuallyPeriodic { prefix, period } => {
                DigitRuleSpec::EventuallyPeriodic { prefix: prefix.clone(), period: period.clone() }
            }
            DigitRule::PrefixThenZero(prefix) => DigitRuleSpec::PrefixThenZero { prefix: prefix.clone() },
        }
    }
}

impl ElementSpec {
    pub fn to_element(&self, at: &str) -> Result<CircleElement> {
        match self {
            ElementSpec::Rational { num, den } => {
                let n = num.parse(&format!("{at}/num"))?;
                let d = den.parse(&format!("{at}/den"))?;
                if d <= BigInt::from(0) {
                    return Err(spec_err(&format!("{at}/den"), "denominator must be positive"));
                }
                CircleElement::rational(n, d)
            }
            ElementSpec::DigitElement { rule } => Ok(CircleElement::Digits(rule.to_rule(&format!("{at}/rule"))?)),
        }
    }
}

impl From<&CircleElement> for ElementSpec {
    fn from(x: &CircleElement) -> Self {
        match x {
            CircleElement::Rational(r) => {
                ElementSpec::Rational { num: BigIntSpec::from(r.numer()), den: BigIntSpec::from(r.denom()) }
            }
            CircleElement::Digits(rule) => ElementSpec::DigitElement { rule: DigitRuleSpec::from(rule) },
        }
    }
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        use serde_path_to_error::Segment;
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        "/".into()
    } else {
        out
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Seq,
    Set,
    Element,
    DigitRule,
}

impl Kind {
    fn of_key(key: &str) -> Option<Kind> {
        match key {
            "tail" | "ratio" | "seq" => Some(Kind::Seq),
            "set" | "support" | "of" | "minus" => Some(Kind::Set),
            "rule" => Some(Kind::DigitRule),
            _ => None,
        }
    }

    fn check(self, v: &serde_json::Value) -> std::result::Result<(), String> {
        let r = match self {
            Kind::Seq => serde_json::from_value::<SeqSpec>(v.clone()).map(drop),
            Kind::Set => serde_json::from_value::<SetSpec>(v.clone()).map(drop),
            Kind::Element => serde_json::from_value::<ElementSpec>(v.clone()).map(drop),
            Kind::DigitRule => serde_json::from_value::<DigitRuleSpec>(v.clone()).map(drop),
        };
        r.map_err(|e| e.to_string())
    }
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

// Tagged enums buffer their content, which hides the path from serde, so
// descend to the deepest typed object that still fails on its own.
fn blame(v: &serde_json::Value, at: &str, kind: Option<Kind>) -> Option<(String, String)> {
    use serde_json::Value;
    let message = match kind {
        Some(k) => match k.check(v) {
            Ok(()) => return None,
            Err(m) => Some(m),
        },
        None => None,
    };
    let typed = |c: &Value| c.get("type").is_some();
    let mut children: Vec<(String, &Value, Option<Kind>)> = Vec::new();
    match v {
        Value::Object(m) => {
            for (key, c) in m {
                let here = format!("{at}/{}", escape(key));
                match c {
                    Value::Array(items) => {
                        for (i, item) in items.iter().enumerate() {
                            let k = if typed(item) { Kind::of_key(key) } else { None };
                            children.push((format!("{here}/{i}"), item, k));
                        }
                    }
                    _ => children.push((here, c, if typed(c) { Kind::of_key(key) } else { None })),
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                children.push((format!("{at}/{i}"), item, None));
            }
        }
        _ => {}
    }
    for (here, c, k) in &children {
        if matches!(c, Value::Object(_) | Value::Array(_)) {
            if let Some(found) = blame(c, here, *k) {
                return Some(found);
            }
        }
    }
    let message = message?;
    Some((leaf_location(v, at, &message), message))
}

fn leaf_location(v: &serde_json::Value, at: &str, message: &str) -> String {
    use serde_json::Value;
    let quoted = |open: char, close: char| {
        let start = message.find(open)? + 1;
        let end = start + message[start..].find(close)?;
        Some(message[start..end].to_string())
    };
    if message.starts_with("unknown field") {
        if let Some(f) = quoted('`', '`') {
            return format!("{at}/{}", escape(&f));
        }
    }
    if message.starts_with("unknown variant") {
        return format!("{at}/type");
    }
    if message.starts_with("invalid type") || message.starts_with("invalid value") {
        let shown = quoted('"', '"').or_else(|| quoted('`', '`'));
        let mut stack = vec![(at.to_string(), v)];
        while let Some((here, node)) = stack.pop() {
            let matches = match (node, &shown) {
                (Value::String(s), Some(t)) => s == t,
                (Value::Number(n), Some(t)) => &n.to_string() == t,
                (Value::Bool(b), _) => message.contains(&format!("boolean `{b}`")),
                (Value::Null, _) => message.contains("null"),
                (Value::Object(_), _) => message.contains("invalid type: map") && here != at,
                (Value::Array(_), _) => message.contains("invalid type: sequence"),
                _ => false,
            };
            if matches {
                return here;
            }
            match node {
                Value::Object(m) => {
                    for (key, c) in m.iter().rev() {
                        if node == v || c.get("type").is_none() {
                            stack.push((format!("{here}/{}", escape(key)), c));
                        }
                    }
                }
                Value::Array(items) => {
                    for (i, c) in items.iter().enumerate().rev() {
                        stack.push((format!("{here}/{i}"), c));
                    }
                }
                _ => {}
            }
        }
    }
    if at.is_empty() {
        "/".into()
    } else {
        at.into()
    }
}

fn parse_as<T: DeserializeOwned>(text: &str, kind: Kind) -> Result<T> {
    let value: serde_json::Value = from_json(text)?;
    serde_json::from_value(value.clone()).map_err(|e| {
        let (location, message) = blame(&value, "", Some(kind)).unwrap_or(("/".into(), e.to_string()));
        Error::Spec { location, message }
    })
}

/// Deserializes with the failing location reported as a JSON pointer.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let location = pointer(e.path());
        Error::Spec { location, message: e.into_inner().to_string() }
    })
}

pub fn parse_sequence(text: &str) -> Result<ArithmeticSequence> {
    parse_as::<SeqSpec>(text, Kind::Seq)?.to_sequence("")
}

pub fn parse_set(text: &str) -> Result<IndexSet> {
    parse_as::<SetSpec>(text, Kind::Set)?.to_set("")
}

pub fn parse_element(text: &str) -> Result<CircleElement> {
    parse_as::<ElementSpec>(text, Kind::Element)?.to_element("")
}

pub fn sequence_json(seq: &ArithmeticSequence) -> String {
    serde_json::to_string(&SeqSpec::from(seq)).expect("spec serializes")
}

pub fn element_json(x: &CircleElement) -> String {
    serde_json::to_string(&ElementSpec::from(x)).expect("spec serializes")
}
