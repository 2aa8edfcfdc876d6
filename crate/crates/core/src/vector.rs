//! Finitely supported sequences over ℕ or ℤ and their exact p-norms.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{
    cmp_root_sums, exact_sqrt, format_rational, parse_rational, sqrt_floor, sqrt_lower, sqrt_upper,
    Rational,
};
use crate::Error;

/// Index set of the sequence space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Naturals,
    Integers,
}

impl Domain {
    pub fn contains(self, index: i64) -> bool {
        match self {
            Domain::Naturals => index >= 0,
            Domain::Integers => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    One,
    Two,
    Infinity,
}

impl NormKind {
    pub fn parse(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "1" | "one" | "l1" => Ok(NormKind::One),
            "2" | "two" | "l2" => Ok(NormKind::Two),
            "inf" | "infinity" | "linf" => Ok(NormKind::Infinity),
            other => Err(Error::Parse(format!("unknown norm `{other}` (expected 1, 2 or inf)"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NormKind::One => "1",
            NormKind::Two => "2",
            NormKind::Infinity => "inf",
        }
    }
}

/// An exact norm value. For p = 2 only the square is stored; the root is never rounded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormValue {
    kind: NormKind,
    raw: Rational,
}

impl NormValue {
    pub fn zero(kind: NormKind) -> Self {
        NormValue { kind, raw: Rational::zero() }
    }

    /// From a value known exactly (not squared).
    pub fn from_exact(kind: NormKind, value: Rational) -> Self {
        assert!(!value.is_negative());
        let raw = if kind == NormKind::Two { &value * &value } else { value };
        NormValue { kind, raw }
    }

    pub(crate) fn from_raw(kind: NormKind, raw: Rational) -> Self {
        NormValue { kind, raw }
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    /// The square of the norm.
    pub fn squared(&self) -> Rational {
        match self.kind {
            NormKind::Two => self.raw.clone(),
            _ => &self.raw * &self.raw,
        }
    }

    pub fn exact(&self) -> Option<Rational> {
        match self.kind {
            NormKind::Two => exact_sqrt(&self.raw),
            _ => Some(self.raw.clone()),
        }
    }

    pub fn upper_bound(&self) -> Rational {
        match self.kind {
            NormKind::Two => sqrt_upper(&self.raw, 64),
            _ => self.raw.clone(),
        }
    }

    pub fn lower_bound(&self) -> Rational {
        match self.kind {
            NormKind::Two => sqrt_lower(&self.raw, 64),
            _ => self.raw.clone(),
        }
    }

    /// A rational r with norm <= r < limit, if the norm itself is below `limit`.
    pub fn upper_bound_below(&self, limit: &Rational) -> Option<Rational> {
        if self.cmp_rational(limit) != Ordering::Less {
            return None;
        }
        if let Some(e) = self.exact() {
            return Some(e);
        }
        let mut bits = 64;
        loop {
            let u = sqrt_upper(&self.raw, bits);
            if &u < limit {
                return Some(u);
            }
            bits *= 2;
        }
    }

    /// |c| times this norm.
    pub fn scaled(&self, c: &Rational) -> NormValue {
        let c = c.abs();
        let raw = match self.kind {
            NormKind::Two => &self.raw * &c * &c,
            _ => &self.raw * &c,
        };
        NormValue { kind: self.kind, raw }
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        if r.is_negative() {
            return Ordering::Greater;
        }
        match self.kind {
            NormKind::Two => self.raw.cmp(&(r * r)),
            _ => self.raw.cmp(r),
        }
    }

    pub fn lt(&self, r: &Rational) -> bool {
        self.cmp_rational(r) == Ordering::Less
    }

    pub fn le(&self, r: &Rational) -> bool {
        self.cmp_rational(r) != Ordering::Greater
    }

    /// Exact order of this norm against `a + b` where `a` is a norm and `b` a rational.
    pub fn cmp_norm_plus(&self, a: &NormValue, b: &Rational) -> Ordering {
        if b.is_negative() {
            // |x| vs a - |b|  <=>  |x| + |b| vs a
            let lhs = [self.squared(), b * b];
            cmp_root_sums(&lhs, &[a.squared()])
        } else {
            cmp_root_sums(&[self.squared()], &[a.squared(), b * b])
        }
    }

    /// Exact order of this norm against the sum of two norms.
    pub fn cmp_sum(&self, a: &NormValue, b: &NormValue) -> Ordering {
        cmp_root_sums(&[self.squared()], &[a.squared(), b.squared()])
    }

    /// Smallest integer k >= 1 with k > this value.
    pub fn min_int_exceeding(&self) -> u64 {
        let f = match self.kind {
            NormKind::Two => sqrt_floor(&self.raw),
            _ => self.raw.floor().to_integer(),
        };
        let k: u64 = u64::try_from(f).expect("norm too large for an iteration count") + 1;
        k.max(1)
    }

    /// Smallest integer k >= 1 with k >= this value.
    pub fn min_int_at_least(&self) -> u64 {
        let f = match self.kind {
            NormKind::Two => sqrt_floor(&self.raw),
            _ => self.raw.floor().to_integer(),
        };
        let mut k = u64::try_from(f).expect("norm too large for an iteration count");
        if self.cmp_rational(&Rational::from_integer(k.into())) == Ordering::Greater {
            k += 1;
        }
        k.max(1)
    }
}

impl PartialOrd for NormValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NormValue {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.kind, other.kind, "comparing norms of different kinds");
        self.raw.cmp(&other.raw)
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact() {
            Some(e) => write!(f, "{}", format_rational(&e)),
            None => write!(f, "sqrt({})", format_rational(&self.raw)),
        }
    }
}

/// A finitely supported sequence of rationals. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeqVector {
    domain: Domain,
    entries: BTreeMap<i64, Rational>,
}

impl SeqVector {
    pub fn zero(domain: Domain) -> Self {
        SeqVector { domain, entries: BTreeMap::new() }
    }

    pub fn basis(domain: Domain, index: i64) -> Self {
        Self::single(domain, index, Rational::one())
    }

    pub fn single(domain: Domain, index: i64, value: Rational) -> Self {
        assert!(domain.contains(index), "index {index} outside {domain:?}");
        let mut v = Self::zero(domain);
        if !value.is_zero() {
            v.entries.insert(index, value);
        }
        v
    }

    /// Builds a vector, summing repeated indices and pruning zeros.
    pub fn from_entries<I>(domain: Domain, entries: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut map: BTreeMap<i64, Rational> = BTreeMap::new();
        for (i, c) in entries {
            if !domain.contains(i) {
                return Err(Error::Domain(format!("index {i} is outside {domain:?}")));
            }
            *map.entry(i).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(SeqVector { domain, entries: map })
    }

    /// Like `from_entries` for indices already known to be in the domain.
    pub(crate) fn accumulate<I>(domain: Domain, entries: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut map: BTreeMap<i64, Rational> = BTreeMap::new();
        for (i, c) in entries {
            debug_assert!(domain.contains(i));
            if c.is_zero() {
                continue;
            }
            match map.entry(i) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() += c;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
        SeqVector { domain, entries: map }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn get(&self, index: i64) -> Rational {
        self.entries.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn scale(&self, c: &Rational) -> SeqVector {
        if c.is_zero() {
            return Self::zero(self.domain);
        }
        SeqVector {
            domain: self.domain,
            entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }

    /// self += c * other. Panics on a domain mismatch, which operators rule out upstream.
    pub fn axpy(&mut self, c: &Rational, other: &SeqVector) {
        assert_eq!(self.domain, other.domain, "domain mismatch in axpy");
        if c.is_zero() {
            return;
        }
        for (i, x) in &other.entries {
            let add = x * c;
            match self.entries.entry(*i) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(add);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() += add;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
    }

    pub fn add(&self, other: &SeqVector) -> SeqVector {
        let mut out = self.clone();
        out.axpy(&Rational::one(), other);
        out
    }

    pub fn sub(&self, other: &SeqVector) -> SeqVector {
        let mut out = self.clone();
        out.axpy(&-Rational::one(), other);
        out
    }

    pub fn norm(&self, kind: NormKind) -> NormValue {
        let raw = match kind {
            NormKind::One => self.entries.values().map(|c| c.abs()).sum(),
            NormKind::Two => self.entries.values().map(|c| c * c).sum(),
            NormKind::Infinity => self
                .entries
                .values()
                .map(|c| c.abs())
                .max()
                .unwrap_or_else(Rational::zero),
        };
        NormValue::from_raw(kind, raw)
    }

    /// Restriction to indices satisfying `keep`, reindexed by `map`.
    pub(crate) fn remap<F, G>(&self, domain: Domain, keep: F, map: G) -> SeqVector
    where
        F: Fn(i64) -> bool,
        G: Fn(i64) -> i64,
    {
        SeqVector {
            domain,
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| keep(**i))
                .map(|(i, c)| (map(*i), c.clone()))
                .collect(),
        }
    }

    /// Parses the text form `{index:num/den, ...}`.
    pub fn parse(domain: Domain, s: &str) -> Result<Self, Error> {
        let t = s.trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("vector `{t}` must be wrapped in braces")))?;
        let mut entries = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for item in inner.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (i, c) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("entry `{item}` must be index:num/den")))?;
            let i: i64 = i
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad index in `{item}`")))?;
            if !seen.insert(i) {
                return Err(Error::Parse(format!("index {i} repeated in `{t}`")));
            }
            entries.push((i, parse_rational(c)?));
        }
        Self::from_entries(domain, entries)
    }
}

impl fmt::Display for SeqVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, (i, c)) in self.entries.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", i, format_rational(c))?;
        }
        write!(f, "}}")
    }
}

/// Exact ordering of ‖v‖_p against `bound`.
pub fn norm_compare(v: &SeqVector, bound: &Rational, kind: NormKind) -> Result<Ordering, Error> {
    if bound.is_negative() {
        return Err(Error::Domain("norm bound must be nonnegative".into()));
    }
    Ok(v.norm(kind).cmp_rational(bound))
}

/// a·v + b·w.
pub fn vec_combine(
    a: &Rational,
    v: &SeqVector,
    b: &Rational,
    w: &SeqVector,
) -> Result<SeqVector, Error> {
    if v.domain != w.domain {
        return Err(Error::Domain(format!(
            "cannot combine vectors over {:?} and {:?}",
            v.domain, w.domain
        )));
    }
    let mut out = v.scale(a);
    out.axpy(b, w);
    Ok(out)
}
