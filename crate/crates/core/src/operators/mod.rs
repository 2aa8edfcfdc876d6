//! The operator zoo: every linear map used by the constructions, with the capabilities
//! (norm bound, inverse, contractive right inverse) that the solvers rely on.
//!
//! Compound spaces (direct sums and products) carry the max norm over their blocks.
//! A direct sum with offset `K` places its left block on coordinates `0..K` and its right
//! block on `K..`; a product of `F` factors interleaves them, coordinate `i` of factor `j`
//! living at global index `i * F + j`.

mod poly;

pub use poly::PolyFunction;

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::rational::{format_rational, int, parse_rational, sqrt_upper, Rational};
use crate::vector::{Domain, NormKind, NormValue, SeqVector};
use crate::{Error, Result};

/// A weight sequence given as a finite prefix followed by a constant tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightSeq {
    pub prefix: Vec<Rational>,
    pub tail: Rational,
}

impl WeightSeq {
    pub fn constant(w: Rational) -> Self {
        WeightSeq { prefix: Vec::new(), tail: w }
    }

    pub fn get(&self, i: usize) -> &Rational {
        self.prefix.get(i).unwrap_or(&self.tail)
    }

    pub fn sup_abs(&self) -> Rational {
        self.prefix.iter().chain(std::iter::once(&self.tail)).map(|w| w.abs()).max().unwrap()
    }

    fn all_nonzero(&self) -> bool {
        self.prefix.iter().chain(std::iter::once(&self.tail)).all(|w| !w.is_zero())
    }

    fn recip(&self) -> WeightSeq {
        WeightSeq {
            prefix: self.prefix.iter().map(|w| w.recip()).collect(),
            tail: self.tail.recip(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OperatorSpec {
    /// e_i ↦ w_i e_{i-1} for i ≥ 1 (weights listed from w_1), e_0 ↦ 0.
    WeightedBackwardShift { weights: WeightSeq },
    /// e_0 ↦ e_0, e_i ↦ 2 e_{i-1}.
    DoublingShiftFixedLine,
    /// e_i ↦ w e_{i-1} on ℤ.
    BilateralShift { weight: Rational },
    /// e_i ↦ w_i e_{i+1} (weights listed from w_0). On ℤ the weight must be constant.
    ForwardShift { weights: WeightSeq, domain: Domain },
    /// e_i ↦ d_i e_i, with `default` beyond the listed entries and on negative indices.
    Diagonal { entries: Vec<Rational>, default: Rational },
    /// (v_0, v_1) ↦ (a v_0 - b v_1, b v_0 + a v_1), identity elsewhere; a² + b² = 1.
    RationalRotation { a: Rational, b: Rational },
    Identity,
    ScalarMultiple { lambda: Rational, inner: Box<OperatorSpec> },
    DirectSum { left: Box<OperatorSpec>, right: Box<OperatorSpec>, offset: i64 },
    Product { factors: Vec<OperatorSpec> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Left,
    Right,
}

#[derive(Clone, Debug)]
enum Layout {
    Flat,
    Split { offset: i64, left: Box<Layout>, right: Box<Layout> },
    Interleaved(Vec<Layout>),
}

impl Layout {
    fn norm(&self, v: &SeqVector, kind: NormKind) -> NormValue {
        match self {
            Layout::Flat => v.norm(kind),
            Layout::Split { offset, left, right } => {
                let l = left.norm(&left_part(v, *offset), kind);
                let r = right.norm(&right_part(v, *offset), kind);
                l.max(r)
            }
            Layout::Interleaved(factors) => {
                let f = factors.len() as i64;
                factors
                    .iter()
                    .enumerate()
                    .map(|(j, lay)| lay.norm(&factor_part(v, f, j as i64), kind))
                    .max()
                    .unwrap_or_else(|| NormValue::zero(kind))
            }
        }
    }
}

fn left_part(v: &SeqVector, offset: i64) -> SeqVector {
    v.remap(Domain::Naturals, |i| i < offset, |i| i)
}

fn right_part(v: &SeqVector, offset: i64) -> SeqVector {
    v.remap(Domain::Naturals, |i| i >= offset, |i| i - offset)
}

fn factor_part(v: &SeqVector, f: i64, j: i64) -> SeqVector {
    v.remap(v.domain(), |i| i.rem_euclid(f) == j, |i| i.div_euclid(f))
}

fn parse_value_rational(v: &Value, what: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(int(n.as_i64().unwrap())),
        other => Err(Error::Parse(format!(
            "{what}: expected a num/den string, found {other}"
        ))),
    }
}

fn field<'a>(obj: &'a Value, key: &str, op: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Config(format!("operator `{op}` is missing field `{key}`")))
}

fn rational_list(v: Option<&Value>, what: &str) -> Result<Vec<Rational>> {
    match v {
        None => Ok(Vec::new()),
        Some(Value::Array(items)) => items.iter().map(|x| parse_value_rational(x, what)).collect(),
        Some(other) => Err(Error::Config(format!("{what}: expected a list, found {other}"))),
    }
}

impl OperatorSpec {
    pub fn doubling() -> Self {
        OperatorSpec::DoublingShiftFixedLine
    }

    pub fn diagonal_const(d: Rational) -> Self {
        OperatorSpec::Diagonal { entries: Vec::new(), default: d }
    }

    pub fn rotation(a: Rational, b: Rational) -> Self {
        OperatorSpec::RationalRotation { a, b }
    }

    pub fn direct_sum(left: OperatorSpec, right: OperatorSpec, offset: i64) -> Self {
        OperatorSpec::DirectSum { left: Box::new(left), right: Box::new(right), offset }
    }

    pub fn product(factors: Vec<OperatorSpec>) -> Self {
        OperatorSpec::Product { factors }
    }

    /// Required index domain; `None` when the operator acts on either.
    pub fn domain(&self) -> Option<Domain> {
        use OperatorSpec::*;
        match self {
            WeightedBackwardShift { .. } | DoublingShiftFixedLine | DirectSum { .. } => {
                Some(Domain::Naturals)
            }
            BilateralShift { .. } => Some(Domain::Integers),
            ForwardShift { domain, .. } => Some(*domain),
            Diagonal { .. } | RationalRotation { .. } | Identity => None,
            ScalarMultiple { inner, .. } => inner.domain(),
            Product { factors } => factors.iter().find_map(|f| f.domain()),
        }
    }

    fn layout(&self) -> Layout {
        match self {
            OperatorSpec::ScalarMultiple { inner, .. } => inner.layout(),
            OperatorSpec::DirectSum { left, right, offset } => Layout::Split {
                offset: *offset,
                left: Box::new(left.layout()),
                right: Box::new(right.layout()),
            },
            OperatorSpec::Product { factors } => {
                Layout::Interleaved(factors.iter().map(|f| f.layout()).collect())
            }
            _ => Layout::Flat,
        }
    }

    /// Structural checks: rotation identity, block compatibility, domain agreement.
    pub fn validate(&self) -> Result<()> {
        use OperatorSpec::*;
        match self {
            RationalRotation { a, b } => {
                if a * a + b * b != Rational::one() {
                    return Err(Error::Config(format!(
                        "rotation needs a² + b² = 1, got a={}, b={}",
                        format_rational(a),
                        format_rational(b)
                    )));
                }
            }
            ForwardShift { weights, domain } => {
                if *domain == Domain::Integers && !weights.prefix.is_empty() {
                    return Err(Error::Config(
                        "a forward shift on ℤ takes a constant weight".into(),
                    ));
                }
            }
            ScalarMultiple { inner, .. } => inner.validate()?,
            DirectSum { left, right, offset } => {
                left.validate()?;
                right.validate()?;
                if *offset < 1 {
                    return Err(Error::Config("direct-sum offset must be at least 1".into()));
                }
                for block in [left, right] {
                    if block.domain() == Some(Domain::Integers) {
                        return Err(Error::Config(
                            "direct-sum blocks must act on ℕ-indexed sequences".into(),
                        ));
                    }
                }
                if !left.preserves_prefix(*offset) {
                    return Err(Error::Config(format!(
                        "left block does not keep coordinates 0..{offset} invariant"
                    )));
                }
            }
            Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::Config("product needs at least one factor".into()));
                }
                for f in factors {
                    f.validate()?;
                }
                let domains: Vec<Domain> = factors.iter().filter_map(|f| f.domain()).collect();
                if domains.windows(2).any(|w| w[0] != w[1]) {
                    return Err(Error::Config("product factors disagree on the domain".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Whether span{e_0, …, e_{k-1}} is mapped into itself.
    pub fn preserves_prefix(&self, k: i64) -> bool {
        use OperatorSpec::*;
        if k <= 0 {
            return true;
        }
        match self {
            WeightedBackwardShift { .. } | DoublingShiftFixedLine | Diagonal { .. } | Identity => {
                true
            }
            RationalRotation { .. } => k >= 2,
            BilateralShift { .. } | ForwardShift { .. } => false,
            ScalarMultiple { inner, .. } => inner.preserves_prefix(k),
            DirectSum { left, right, offset } => {
                if k <= *offset {
                    left.preserves_prefix(k)
                } else {
                    right.preserves_prefix(k - offset)
                }
            }
            Product { factors } => {
                let f = factors.len() as i64;
                factors.iter().enumerate().all(|(j, fac)| {
                    let j = j as i64;
                    let local = if k > j { (k - j + f - 1) / f } else { 0 };
                    fac.preserves_prefix(local)
                })
            }
        }
    }

    fn check_domain(&self, v: &SeqVector) -> Result<()> {
        match self.domain() {
            Some(d) if d != v.domain() => Err(Error::Domain(format!(
                "operator acts on {d:?}-indexed sequences, vector is over {:?}",
                v.domain()
            ))),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, v: &SeqVector) -> Result<SeqVector> {
        self.check_domain(v)?;
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &SeqVector) -> SeqVector {
        use OperatorSpec::*;
        let dom = v.domain();
        match self {
            WeightedBackwardShift { weights } => SeqVector::accumulate(
                dom,
                v.iter()
                    .filter(|(i, _)| *i >= 1)
                    .map(|(i, c)| (i - 1, c * weights.get(i as usize - 1))),
            ),
            DoublingShiftFixedLine => {
                let two = int(2);
                SeqVector::accumulate(
                    dom,
                    v.iter().map(|(i, c)| if i == 0 { (0, c.clone()) } else { (i - 1, c * &two) }),
                )
            }
            BilateralShift { weight } => {
                SeqVector::accumulate(dom, v.iter().map(|(i, c)| (i - 1, c * weight)))
            }
            ForwardShift { weights, .. } => SeqVector::accumulate(
                dom,
                v.iter().map(|(i, c)| {
                    let w = if i >= 0 { weights.get(i as usize) } else { &weights.tail };
                    (i + 1, c * w)
                }),
            ),
            Diagonal { entries, default } => SeqVector::accumulate(
                dom,
                v.iter().map(|(i, c)| {
                    let d = if i >= 0 { entries.get(i as usize).unwrap_or(default) } else { default };
                    (i, c * d)
                }),
            ),
            RationalRotation { a, b } => {
                let (x0, x1) = (v.get(0), v.get(1));
                let rest = v.iter().filter(|(i, _)| *i != 0 && *i != 1).map(|(i, c)| (i, c.clone()));
                SeqVector::accumulate(
                    dom,
                    rest.chain([(0, a * &x0 - b * &x1), (1, b * &x0 + a * &x1)]),
                )
            }
            Identity => v.clone(),
            ScalarMultiple { lambda, inner } => inner.apply_unchecked(v).scale(lambda),
            DirectSum { left, right, offset } => {
                let l = left.apply_unchecked(&left_part(v, *offset));
                let r = right.apply_unchecked(&right_part(v, *offset));
                let off = *offset;
                SeqVector::accumulate(
                    dom,
                    l.iter()
                        .map(|(i, c)| (i, c.clone()))
                        .chain(r.iter().map(|(i, c)| (i + off, c.clone()))),
                )
            }
            Product { factors } => {
                let f = factors.len() as i64;
                let mut out = Vec::new();
                for (j, fac) in factors.iter().enumerate() {
                    let img = fac.apply_unchecked(&factor_part(v, f, j as i64));
                    out.extend(img.iter().map(|(i, c)| (i * f + j as i64, c.clone())));
                }
                SeqVector::accumulate(dom, out)
            }
        }
    }

    pub fn inverse_spec(&self) -> Option<OperatorSpec> {
        use OperatorSpec::*;
        match self {
            WeightedBackwardShift { .. } | DoublingShiftFixedLine => None,
            BilateralShift { weight } if !weight.is_zero() => Some(ForwardShift {
                weights: WeightSeq::constant(weight.recip()),
                domain: Domain::Integers,
            }),
            BilateralShift { .. } => None,
            ForwardShift { weights, domain: Domain::Integers } if !weights.tail.is_zero() => {
                Some(BilateralShift { weight: weights.tail.recip() })
            }
            ForwardShift { .. } => None,
            Diagonal { entries, default } => {
                if default.is_zero() || entries.iter().any(|d| d.is_zero()) {
                    None
                } else {
                    Some(Diagonal {
                        entries: entries.iter().map(|d| d.recip()).collect(),
                        default: default.recip(),
                    })
                }
            }
            RationalRotation { a, b } => Some(RationalRotation { a: a.clone(), b: -b }),
            Identity => Some(Identity),
            ScalarMultiple { lambda, inner } => {
                if lambda.is_zero() {
                    return None;
                }
                Some(ScalarMultiple { lambda: lambda.recip(), inner: Box::new(inner.inverse_spec()?) })
            }
            DirectSum { left, right, offset } => Some(DirectSum {
                left: Box::new(left.inverse_spec()?),
                right: Box::new(right.inverse_spec()?),
                offset: *offset,
            }),
            Product { factors } => Some(Product {
                factors: factors.iter().map(|f| f.inverse_spec()).collect::<Option<_>>()?,
            }),
        }
    }

    /// Some right inverse, whether or not it is contractive. The inverse when one exists.
    pub fn right_inverse_spec(&self) -> Option<OperatorSpec> {
        use OperatorSpec::*;
        if let Some(inv) = self.inverse_spec() {
            return Some(inv);
        }
        match self {
            DoublingShiftFixedLine => Some(ForwardShift {
                weights: WeightSeq::constant(Rational::new(1.into(), 2.into())),
                domain: Domain::Naturals,
            }),
            // S e_j = e_{j+1} / w_{j+1}
            WeightedBackwardShift { weights } if weights.all_nonzero() => {
                Some(ForwardShift { weights: weights.recip(), domain: Domain::Naturals })
            }
            ScalarMultiple { lambda, inner } if !lambda.is_zero() => Some(ScalarMultiple {
                lambda: lambda.recip(),
                inner: Box::new(inner.right_inverse_spec()?),
            }),
            // the left block's right inverse must keep 0..offset invariant, so only a true inverse will do
            DirectSum { left, right, offset } => Some(DirectSum {
                left: Box::new(left.inverse_spec()?),
                right: Box::new(right.right_inverse_spec()?),
                offset: *offset,
            }),
            Product { factors } => Some(Product {
                factors: factors.iter().map(|f| f.right_inverse_spec()).collect::<Option<_>>()?,
            }),
            _ => None,
        }
    }

    /// Certified upper bound on the operator norm for the given p, with max norms on
    /// compound spaces.
    pub fn norm_bound(&self, kind: NormKind) -> Rational {
        use OperatorSpec::*;
        match self {
            ScalarMultiple { lambda, inner } => lambda.abs() * inner.norm_bound(kind),
            DirectSum { left, right, .. } => left.norm_bound(kind).max(right.norm_bound(kind)),
            Product { factors } => factors.iter().map(|f| f.norm_bound(kind)).max().unwrap(),
            _ => {
                let (col, row, two) = self.flat_norms();
                match kind {
                    NormKind::One => col,
                    NormKind::Infinity => row,
                    // Schur: ‖T‖₂ ≤ sqrt(‖T‖₁ ‖T‖∞)
                    NormKind::Two => two.unwrap_or_else(|| sqrt_upper(&(col * row), 10)),
                }
            }
        }
    }

    /// (max absolute column sum, max absolute row sum, exact ℓ2 norm if known).
    fn flat_norms(&self) -> (Rational, Rational, Option<Rational>) {
        use OperatorSpec::*;
        match self {
            WeightedBackwardShift { weights } | ForwardShift { weights, .. } => {
                let s = weights.sup_abs();
                (s.clone(), s.clone(), Some(s))
            }
            DoublingShiftFixedLine => (int(2), int(3), None),
            BilateralShift { weight } => (weight.abs(), weight.abs(), Some(weight.abs())),
            Diagonal { entries, default } => {
                let s = entries.iter().chain(std::iter::once(default)).map(|d| d.abs()).max().unwrap();
                (s.clone(), s.clone(), Some(s))
            }
            RationalRotation { a, b } => {
                let s = (a.abs() + b.abs()).max(Rational::one());
                (s.clone(), s, Some(Rational::one()))
            }
            Identity => (Rational::one(), Rational::one(), Some(Rational::one())),
            ScalarMultiple { .. } | DirectSum { .. } | Product { .. } => {
                unreachable!("compound operators are bounded blockwise")
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<OperatorSpec> {
        let op = v
            .get("op")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Config(format!("operator needs an \"op\" name: {v}")))?;
        let r = |key: &str| -> Result<Rational> { parse_value_rational(field(v, key, op)?, key) };
        let weights = || -> Result<WeightSeq> {
            let prefix = rational_list(v.get("weights"), "weights")?;
            let tail = match v.get("tail") {
                Some(t) => parse_value_rational(t, "tail")?,
                None => prefix
                    .last()
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("`{op}` needs weights or a tail")))?,
            };
            Ok(WeightSeq { prefix, tail })
        };
        let spec = match op {
            "weighted_backward_shift" => OperatorSpec::WeightedBackwardShift { weights: weights()? },
            "doubling_shift_fixed_line" => OperatorSpec::DoublingShiftFixedLine,
            "bilateral_shift" => OperatorSpec::BilateralShift {
                weight: match v.get("weight") {
                    Some(w) => parse_value_rational(w, "weight")?,
                    None => Rational::one(),
                },
            },
            "forward_shift" => {
                let domain = match v.get("domain").and_then(Value::as_str).unwrap_or("naturals") {
                    "naturals" => Domain::Naturals,
                    "integers" => Domain::Integers,
                    other => return Err(Error::Config(format!("unknown domain `{other}`"))),
                };
                OperatorSpec::ForwardShift { weights: weights()?, domain }
            }
            "diagonal" => OperatorSpec::Diagonal {
                entries: rational_list(v.get("entries"), "entries")?,
                default: r("default")?,
            },
            "rotation" => OperatorSpec::RationalRotation { a: r("a")?, b: r("b")? },
            "identity" => OperatorSpec::Identity,
            "scalar_multiple" => OperatorSpec::ScalarMultiple {
                lambda: r("lambda")?,
                inner: Box::new(OperatorSpec::from_json(field(v, "inner", op)?)?),
            },
            "direct_sum" => OperatorSpec::DirectSum {
                left: Box::new(OperatorSpec::from_json(field(v, "left", op)?)?),
                right: Box::new(OperatorSpec::from_json(field(v, "right", op)?)?),
                offset: field(v, "offset", op)?
                    .as_i64()
                    .ok_or_else(|| Error::Config("direct_sum offset must be an integer".into()))?,
            },
            "product" => OperatorSpec::Product {
                factors: field(v, "factors", op)?
                    .as_array()
                    .ok_or_else(|| Error::Config("product factors must be a list".into()))?
                    .iter()
                    .map(OperatorSpec::from_json)
                    .collect::<Result<_>>()?,
            },
            other => return Err(Error::Config(format!("unknown operator `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> Value {
        use OperatorSpec::*;
        let s = |r: &Rational| Value::String(format_rational(r));
        let list = |xs: &[Rational]| Value::Array(xs.iter().map(s).collect());
        match self {
            WeightedBackwardShift { weights } => json!({
                "op": "weighted_backward_shift", "weights": list(&weights.prefix), "tail": s(&weights.tail)
            }),
            DoublingShiftFixedLine => json!({"op": "doubling_shift_fixed_line"}),
            BilateralShift { weight } => json!({"op": "bilateral_shift", "weight": s(weight)}),
            ForwardShift { weights, domain } => json!({
                "op": "forward_shift", "weights": list(&weights.prefix), "tail": s(&weights.tail),
                "domain": if *domain == Domain::Naturals { "naturals" } else { "integers" }
            }),
            Diagonal { entries, default } => {
                json!({"op": "diagonal", "entries": list(entries), "default": s(default)})
            }
            RationalRotation { a, b } => json!({"op": "rotation", "a": s(a), "b": s(b)}),
            Identity => json!({"op": "identity"}),
            ScalarMultiple { lambda, inner } => {
                json!({"op": "scalar_multiple", "lambda": s(lambda), "inner": inner.to_json()})
            }
            DirectSum { left, right, offset } => json!({
                "op": "direct_sum", "left": left.to_json(), "right": right.to_json(), "offset": offset
            }),
            Product { factors } => json!({
                "op": "product", "factors": factors.iter().map(|f| f.to_json()).collect::<Vec<_>>()
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        use OperatorSpec::*;
        match self {
            WeightedBackwardShift { .. } => "weighted_backward_shift",
            DoublingShiftFixedLine => "doubling_shift_fixed_line",
            BilateralShift { .. } => "bilateral_shift",
            ForwardShift { .. } => "forward_shift",
            Diagonal { .. } => "diagonal",
            RationalRotation { .. } => "rotation",
            Identity => "identity",
            ScalarMultiple { .. } => "scalar_multiple",
            DirectSum { .. } => "direct_sum",
            Product { .. } => "product",
        }
    }
}

/// An operator specification bound to a norm, with its capabilities computed once.
#[derive(Clone, Debug)]
pub struct Operator {
    spec: OperatorSpec,
    kind: NormKind,
    layout: Layout,
    norm_bound: Rational,
    inverse: Option<(OperatorSpec, Rational)>,
    right_inverse: Option<(OperatorSpec, Rational)>,
}

impl Operator {
    pub fn new(spec: OperatorSpec, kind: NormKind) -> Result<Operator> {
        spec.validate()?;
        let norm_bound = spec.norm_bound(kind);
        let inverse = spec.inverse_spec().map(|s| {
            let b = s.norm_bound(kind);
            (s, b)
        });
        let right_inverse = spec
            .right_inverse_spec()
            .map(|s| {
                let b = s.norm_bound(kind);
                (s, b)
            })
            .filter(|(_, s)| *s < Rational::one());
        Ok(Operator { layout: spec.layout(), spec, kind, norm_bound, inverse, right_inverse })
    }

    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    /// The index domain vectors should live in (ℕ unless the operator needs ℤ).
    pub fn domain(&self) -> Domain {
        self.spec.domain().unwrap_or(Domain::Naturals)
    }

    pub fn zero(&self) -> SeqVector {
        SeqVector::zero(self.domain())
    }

    pub fn norm(&self, v: &SeqVector) -> NormValue {
        self.layout.norm(v, self.kind)
    }

    pub fn norm_bound(&self) -> &Rational {
        &self.norm_bound
    }

    pub fn apply(&self, v: &SeqVector) -> Result<SeqVector> {
        self.spec.apply(v)
    }

    /// Tⁿ v.
    pub fn power(&self, v: &SeqVector, n: usize) -> Result<SeqVector> {
        self.spec.check_domain(v)?;
        let mut cur = v.clone();
        for _ in 0..n {
            cur = self.spec.apply_unchecked(&cur);
        }
        Ok(cur)
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn inverse_norm_bound(&self) -> Option<&Rational> {
        self.inverse.as_ref().map(|(_, b)| b)
    }

    pub fn apply_inverse(&self, v: &SeqVector) -> Result<SeqVector> {
        let (inv, _) = self
            .inverse
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("`{}` is not invertible", self.spec.name())))?;
        inv.apply(v)
    }

    pub fn inverse_operator(&self) -> Result<Operator> {
        let (inv, _) = self
            .inverse
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("`{}` is not invertible", self.spec.name())))?;
        Operator::new(inv.clone(), self.kind)
    }

    /// Contraction factor s < 1 of the declared right inverse.
    pub fn right_inverse_contraction(&self) -> Option<&Rational> {
        self.right_inverse.as_ref().map(|(_, s)| s)
    }

    pub fn apply_right_inverse(&self, v: &SeqVector) -> Result<SeqVector> {
        let (s, _) = self.right_inverse.as_ref().ok_or_else(|| {
            Error::Unsupported(format!("`{}` has no contractive right inverse", self.spec.name()))
        })?;
        s.apply(v)
    }

    fn split(&self) -> Result<(&OperatorSpec, &OperatorSpec, i64)> {
        match &self.spec {
            OperatorSpec::DirectSum { left, right, offset } => Ok((left, right, *offset)),
            other => Err(Error::Unsupported(format!("`{}` is not a direct sum", other.name()))),
        }
    }

    pub fn is_direct_sum(&self) -> bool {
        matches!(self.spec, OperatorSpec::DirectSum { .. })
    }

    /// The restriction of a direct sum to one of its blocks, in local coordinates.
    pub fn block(&self, block: Block) -> Result<Operator> {
        let (l, r, _) = self.split()?;
        Operator::new(if block == Block::Left { l.clone() } else { r.clone() }, self.kind)
    }

    /// Coordinates of `v` in a block, reindexed from 0.
    pub fn block_component(&self, v: &SeqVector, block: Block) -> Result<SeqVector> {
        let (_, _, off) = self.split()?;
        Ok(match block {
            Block::Left => left_part(v, off),
            Block::Right => right_part(v, off),
        })
    }

    /// Zeroes every coordinate outside `block`, keeping global indices.
    pub fn project(&self, v: &SeqVector, block: Block) -> Result<SeqVector> {
        let (_, _, off) = self.split()?;
        Ok(match block {
            Block::Left => v.remap(v.domain(), |i| i < off, |i| i),
            Block::Right => v.remap(v.domain(), |i| i >= off, |i| i),
        })
    }

    /// Places block-local coordinates into the direct sum.
    pub fn embed_block(&self, local: &SeqVector, block: Block) -> Result<SeqVector> {
        let (_, _, off) = self.split()?;
        match block {
            Block::Left => {
                if local.max_index().is_some_and(|i| i >= off) {
                    return Err(Error::Domain(format!("left-block vector exceeds offset {off}")));
                }
                Ok(local.remap(Domain::Naturals, |_| true, |i| i))
            }
            Block::Right => Ok(local.remap(Domain::Naturals, |_| true, |i| i + off)),
        }
    }

    pub fn factor_count(&self) -> Option<usize> {
        match &self.spec {
            OperatorSpec::Product { factors } => Some(factors.len()),
            _ => None,
        }
    }

    fn factors(&self) -> Result<&[OperatorSpec]> {
        match &self.spec {
            OperatorSpec::Product { factors } => Ok(factors),
            other => Err(Error::Unsupported(format!("`{}` is not a product", other.name()))),
        }
    }

    pub fn factor(&self, j: usize) -> Result<Operator> {
        let fs = self.factors()?;
        let f = fs
            .get(j)
            .ok_or_else(|| Error::Domain(format!("product has {} factors, asked for {j}", fs.len())))?;
        Operator::new(f.clone(), self.kind)
    }

    pub fn factor_component(&self, v: &SeqVector, j: usize) -> Result<SeqVector> {
        let f = self.factors()?.len() as i64;
        Ok(factor_part(v, f, j as i64))
    }

    /// Interleaves one vector per factor into the product space.
    pub fn embed_factors(&self, parts: &[SeqVector]) -> Result<SeqVector> {
        let fs = self.factors()?;
        if parts.len() != fs.len() {
            return Err(Error::Domain(format!(
                "product has {} factors, got {} components",
                fs.len(),
                parts.len()
            )));
        }
        let f = fs.len() as i64;
        let dom = self.domain();
        let mut entries = Vec::new();
        for (j, p) in parts.iter().enumerate() {
            if p.domain() != dom {
                return Err(Error::Domain("factor component over the wrong domain".into()));
            }
            entries.extend(p.iter().map(|(i, c)| (i * f + j as i64, c.clone())));
        }
        SeqVector::from_entries(dom, entries)
    }

    /// ‖Tv‖ ≤ B‖v‖ for the certified bound B.
    pub fn check_norm_bound_on(&self, v: &SeqVector) -> Result<bool> {
        let tv = self.apply(v)?;
        Ok(self.norm(&tv).cmp(&self.norm(v).scaled(&self.norm_bound)) != Ordering::Greater)
    }
}

/// Ordered list of the named operator forms accepted in configs.
pub const OPERATOR_NAMES: &[&str] = &[
    "weighted_backward_shift",
    "doubling_shift_fixed_line",
    "bilateral_shift",
    "forward_shift",
    "diagonal",
    "rotation",
    "identity",
    "scalar_multiple",
    "direct_sum",
    "product",
];
