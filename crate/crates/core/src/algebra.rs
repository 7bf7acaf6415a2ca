//! Free graded-commutative algebras `Λ(V_odd) ⊗ Q[V_even]` over the rationals.
//!
//! A [`GeneratorSet`] fixes the generators of an algebra together with their
//! degrees. [`Monomial`]s are stored in canonical form (odd generators strictly
//! increasing by declaration index, even generators with positive exponents in
//! increasing index order), and an [`Element`] is a finite rational combination
//! of canonical monomials. Every arithmetic result is re-normalized, so two equal
//! elements always have identical term maps.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational coefficients.
pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("generator `{name}` has degree {degree}; generators must have degree at least 2")]
    DegreeTooLow { name: String, degree: u32 },
    #[error("Borel generator `{name}` must have degree 2, found {degree}")]
    BorelDegree { name: String, degree: u32 },
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("operands live over different generator sets")]
    GeneratorSetMismatch,
    #[error("expected {expected} entries, one per generator, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("image of generator `{generator}` has degree {found:?}, expected {expected}")]
    ImageDegree {
        generator: String,
        expected: u32,
        found: HomogeneousDegree,
    },
}

/// Marks whether a generator belongs to the base algebra or is one of the
/// degree-2 polynomial generators `t_i` of a Borel extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenKind {
    Base,
    Borel,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    name: String,
    degree: u32,
    kind: GenKind,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Generator {
            name: name.into(),
            degree,
            kind: GenKind::Base,
        }
    }

    pub fn borel(name: impl Into<String>) -> Self {
        Generator {
            name: name.into(),
            degree: 2,
            kind: GenKind::Borel,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn kind(&self) -> GenKind {
        self.kind
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }

    pub fn is_borel(&self) -> bool {
        self.kind == GenKind::Borel
    }
}

#[derive(Debug)]
struct GenSetInner {
    gens: Vec<Generator>,
    by_name: HashMap<String, usize>,
}

/// An ordered, validated list of generators. Cheap to clone.
#[derive(Clone)]
pub struct GeneratorSet {
    inner: Arc<GenSetInner>,
}

impl PartialEq for GeneratorSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.gens == other.inner.gens
    }
}

impl Eq for GeneratorSet {}

impl fmt::Debug for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.iter().map(|g| format!("{}:{}", g.name, g.degree)))
            .finish()
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl GeneratorSet {
    pub fn new(gens: Vec<Generator>) -> Result<Self, AlgebraError> {
        let mut by_name = HashMap::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if !valid_name(&g.name) {
                return Err(AlgebraError::InvalidName(g.name.clone()));
            }
            if g.degree < 2 {
                return Err(AlgebraError::DegreeTooLow {
                    name: g.name.clone(),
                    degree: g.degree,
                });
            }
            if g.kind == GenKind::Borel && g.degree != 2 {
                return Err(AlgebraError::BorelDegree {
                    name: g.name.clone(),
                    degree: g.degree,
                });
            }
            if by_name.insert(g.name.clone(), i).is_some() {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(GeneratorSet {
            inner: Arc::new(GenSetInner { gens, by_name }),
        })
    }

    /// Convenience constructor from `(name, degree)` pairs of base generators.
    pub fn from_degrees<'a>(
        pairs: impl IntoIterator<Item = (&'a str, u32)>,
    ) -> Result<Self, AlgebraError> {
        Self::new(pairs.into_iter().map(|(n, d)| Generator::new(n, d)).collect())
    }

    /// A new set consisting of these generators followed by `more`.
    pub fn extended(&self, more: impl IntoIterator<Item = Generator>) -> Result<Self, AlgebraError> {
        let mut gens = self.inner.gens.clone();
        gens.extend(more);
        Self::new(gens)
    }

    pub fn len(&self) -> usize {
        self.inner.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.gens.is_empty()
    }

    pub fn get(&self, i: usize) -> &Generator {
        &self.inner.gens[i]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.inner.gens
    }

    pub fn iter(&self) -> impl Iterator<Item = &Generator> {
        self.inner.gens.iter()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.inner.by_name.get(name).copied()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.inner.gens[i].degree
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.inner.gens[i].is_odd()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.inner.gens[i].name
    }

    pub fn odd_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_odd(i)).collect()
    }

    pub fn even_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_odd(i)).collect()
    }

    pub fn borel_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.get(i).is_borel()).collect()
    }

    /// True when the first `self.len()` generators of `other` coincide with ours.
    pub fn is_prefix_of(&self, other: &GeneratorSet) -> bool {
        self.len() <= other.len() && self.inner.gens[..] == other.inner.gens[..self.len()]
    }

    pub fn generator(&self, i: usize) -> Element {
        Element::from_monomial(self, Monomial::generator(i, self.is_odd(i)), Rational::one())
    }

    pub fn generator_by_name(&self, name: &str) -> Result<Element, AlgebraError> {
        self.index_of(name)
            .map(|i| self.generator(i))
            .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        let odd: u32 = m.odd.iter().map(|&i| self.degree(i as usize)).sum();
        let even: u32 = m
            .even
            .iter()
            .map(|&(i, e)| e * self.degree(i as usize))
            .sum();
        odd + even
    }

    fn admits(&self, m: &Monomial) -> bool {
        m.odd
            .iter()
            .all(|&i| (i as usize) < self.len() && self.is_odd(i as usize))
            && m
                .even
                .iter()
                .all(|&(i, _)| (i as usize) < self.len() && !self.is_odd(i as usize))
    }
}

/// A canonical monomial. The odd part is strictly increasing and the even part
/// is sorted by generator index with positive exponents; the derived ordering
/// is the canonical monomial order used throughout the crate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    odd: Vec<u32>,
    even: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn generator(index: usize, odd: bool) -> Self {
        if odd {
            Monomial {
                odd: vec![index as u32],
                even: Vec::new(),
            }
        } else {
            Monomial {
                odd: Vec::new(),
                even: vec![(index as u32, 1)],
            }
        }
    }

    /// Builds a monomial from an odd part given in any order and an even part.
    /// Returns `None` if an odd generator repeats, otherwise the canonical
    /// monomial and whether reordering the odd part introduced a sign.
    pub fn from_parts(odd: &[usize], even: &[(usize, u32)]) -> Option<(Monomial, bool)> {
        let mut odd: Vec<u32> = odd.iter().map(|&i| i as u32).collect();
        let negative = sort_with_sign(&mut odd)?;
        let mut acc: BTreeMap<u32, u32> = BTreeMap::new();
        for &(i, e) in even {
            if e > 0 {
                *acc.entry(i as u32).or_default() += e;
            }
        }
        Some((
            Monomial {
                odd,
                even: acc.into_iter().collect(),
            },
            negative,
        ))
    }

    pub fn is_one(&self) -> bool {
        self.odd.is_empty() && self.even.is_empty()
    }

    pub fn odd_part(&self) -> impl Iterator<Item = usize> + '_ {
        self.odd.iter().map(|&i| i as usize)
    }

    pub fn even_part(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.even.iter().map(|&(i, e)| (i as usize, e))
    }

    pub fn odd_len(&self) -> usize {
        self.odd.len()
    }

    pub fn has_odd(&self) -> bool {
        !self.odd.is_empty()
    }

    pub fn exponent(&self, index: usize) -> u32 {
        let i = index as u32;
        if self.odd.binary_search(&i).is_ok() {
            return 1;
        }
        self.even
            .iter()
            .find(|&&(j, _)| j == i)
            .map_or(0, |&(_, e)| e)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.exponent(index) > 0
    }

    /// All generator indices occurring in the monomial.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.odd
            .iter()
            .map(|&i| i as usize)
            .chain(self.even.iter().map(|&(i, _)| i as usize))
    }

    /// Product `self * other`; `None` when an odd generator repeats. The flag
    /// reports a negative Koszul sign.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let (odd, negative) = merge_odd(&self.odd, &other.odd)?;
        let mut even = Vec::with_capacity(self.even.len() + other.even.len());
        let (mut i, mut j) = (0, 0);
        while i < self.even.len() && j < other.even.len() {
            let (a, ea) = self.even[i];
            let (b, eb) = other.even[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    even.push((a, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    even.push((b, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    even.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        even.extend_from_slice(&self.even[i..]);
        even.extend_from_slice(&other.even[j..]);
        Some((Monomial { odd, even }, negative))
    }

    /// The monomial with one power of `index` removed from the even part.
    fn lower_even(&self, index: u32) -> Monomial {
        let even = self
            .even
            .iter()
            .filter_map(|&(i, e)| match (i == index, e) {
                (true, 1) => None,
                (true, e) => Some((i, e - 1)),
                (false, e) => Some((i, e)),
            })
            .collect();
        Monomial {
            odd: self.odd.clone(),
            even,
        }
    }

    fn odd_slice(&self, range: std::ops::Range<usize>) -> Monomial {
        Monomial {
            odd: self.odd[range].to_vec(),
            even: Vec::new(),
        }
    }

    fn even_only(&self) -> Monomial {
        Monomial {
            odd: Vec::new(),
            even: self.even.clone(),
        }
    }

    /// Renders the monomial using generator names, e.g. `x*y*t1^4`.
    pub fn display<'a>(&'a self, gens: &'a GeneratorSet) -> impl fmt::Display + 'a {
        MonomialDisplay { m: self, gens }
    }
}

struct MonomialDisplay<'a> {
    m: &'a Monomial,
    gens: &'a GeneratorSet,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for i in self.m.odd_part() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", self.gens.name(i))?;
        }
        for (i, e) in self.m.even_part() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", self.gens.name(i))?;
            } else {
                write!(f, "{}^{}", self.gens.name(i), e)?;
            }
        }
        Ok(())
    }
}

/// Merges two strictly increasing odd parts, counting the transpositions
/// needed to bring `a ++ b` into sorted order.
fn merge_odd(a: &[u32], b: &[u32]) -> Option<(Vec<u32>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                // b[j] jumps over every remaining element of a
                inversions += a.len() - i;
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, inversions % 2 == 1))
}

/// Sorts an odd part by merge sort, returning the parity of the permutation,
/// or `None` on a repeated entry.
fn sort_with_sign(v: &mut Vec<u32>) -> Option<bool> {
    if v.len() <= 1 {
        return Some(false);
    }
    let mid = v.len() / 2;
    let mut right = v.split_off(mid);
    let left_sign = sort_with_sign(v)?;
    let right_sign = sort_with_sign(&mut right)?;
    let (merged, sign) = merge_odd(v, &right)?;
    *v = merged;
    Some(left_sign ^ right_sign ^ sign)
}

/// Degree information of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomogeneousDegree {
    /// The zero element, which is homogeneous of every degree.
    Any,
    Exactly(u32),
    NotHomogeneous,
}

impl HomogeneousDegree {
    /// Whether an element with this degree information may sit in degree `k`.
    pub fn admits(self, k: u32) -> bool {
        match self {
            HomogeneousDegree::Any => true,
            HomogeneousDegree::Exactly(d) => d == k,
            HomogeneousDegree::NotHomogeneous => false,
        }
    }
}

/// A finite rational combination of canonical monomials over a fixed generator set.
#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    gens: GeneratorSet,
    terms: BTreeMap<Monomial, Rational>,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({})", self)
    }
}

impl Element {
    pub fn zero(gens: &GeneratorSet) -> Self {
        Element {
            gens: gens.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(gens: &GeneratorSet) -> Self {
        Self::constant(gens, Rational::one())
    }

    pub fn constant(gens: &GeneratorSet, c: Rational) -> Self {
        Self::from_monomial(gens, Monomial::one(), c)
    }

    pub fn from_monomial(gens: &GeneratorSet, m: Monomial, c: Rational) -> Self {
        debug_assert!(gens.admits(&m));
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Element {
            gens: gens.clone(),
            terms,
        }
    }

    /// Sums the given terms, merging duplicates and dropping zeros.
    pub fn from_terms(
        gens: &GeneratorSet,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut e = Element::zero(gens);
        for (m, c) in terms {
            debug_assert!(gens.admits(&m));
            e.add_term(m, c);
        }
        e
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn check_same(&self, other: &Element) -> Result<(), AlgebraError> {
        if self.gens == other.gens {
            Ok(())
        } else {
            Err(AlgebraError::GeneratorSetMismatch)
        }
    }

    pub fn try_add(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Normalized product with Koszul signs. Fails on mismatched generator sets.
    pub fn multiply(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.check_same(other)?;
        let mut out = Element::zero(&self.gens);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, negative)) = ma.mul(mb) {
                    let c = ca * cb;
                    out.add_term(m, if negative { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Element {
        if c.is_zero() {
            return Element::zero(&self.gens);
        }
        Element {
            gens: self.gens.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Element {
        let mut acc = Element::one(&self.gens);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplies every term by a monomial on the left (`left = true`) or right.
    pub fn mul_monomial(&self, m: &Monomial, left: bool) -> Element {
        let mut out = Element::zero(&self.gens);
        for (mm, c) in &self.terms {
            let prod = if left { m.mul(mm) } else { mm.mul(m) };
            if let Some((p, negative)) = prod {
                out.add_term(p, if negative { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    pub fn homogeneous_degree(&self) -> HomogeneousDegree {
        let mut degrees = self.terms.keys().map(|m| self.gens.monomial_degree(m));
        match degrees.next() {
            None => HomogeneousDegree::Any,
            Some(d) => {
                if degrees.all(|x| x == d) {
                    HomogeneousDegree::Exactly(d)
                } else {
                    HomogeneousDegree::NotHomogeneous
                }
            }
        }
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Element {
        Element {
            gens: self.gens.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Indices of all generators occurring in some term.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.terms.keys().flat_map(|m| m.support()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Reinterprets the element over a larger generator set that has ours as a prefix.
    pub fn embed(&self, larger: &GeneratorSet) -> Result<Element, AlgebraError> {
        if !self.gens.is_prefix_of(larger) {
            return Err(AlgebraError::GeneratorSetMismatch);
        }
        Ok(Element {
            gens: larger.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Sets every generator beyond the prefix `smaller` to zero and
    /// reinterprets the remainder over `smaller`.
    pub fn truncate(&self, smaller: &GeneratorSet) -> Result<Element, AlgebraError> {
        if !smaller.is_prefix_of(&self.gens) {
            return Err(AlgebraError::GeneratorSetMismatch);
        }
        let n = smaller.len();
        Ok(Element {
            gens: smaller.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.support().all(|i| i < n))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        })
    }

    /// Applies the algebra map sending generator `i` to `images[i]`, where all
    /// images live over `target`. The caller is responsible for images of odd
    /// generators being odd (otherwise the result is not multiplicative).
    pub fn substitute(
        &self,
        target: &GeneratorSet,
        images: &[Element],
    ) -> Result<Element, AlgebraError> {
        if images.len() != self.gens.len() {
            return Err(AlgebraError::Arity {
                expected: self.gens.len(),
                found: images.len(),
            });
        }
        if let Some(bad) = images.iter().find(|e| e.gens != *target) {
            let _ = bad;
            return Err(AlgebraError::GeneratorSetMismatch);
        }
        let mut out = Element::zero(target);
        let mut powers: HashMap<(usize, u32), Element> = HashMap::new();
        for (m, c) in &self.terms {
            let mut acc = Element::constant(target, c.clone());
            for i in m.odd_part() {
                acc = acc.multiply(&images[i])?;
                if acc.is_zero() {
                    break;
                }
            }
            if acc.is_zero() {
                continue;
            }
            for (i, e) in m.even_part() {
                let p = powers
                    .entry((i, e))
                    .or_insert_with(|| images[i].pow(e))
                    .clone();
                acc = acc.multiply(&p)?;
                if acc.is_zero() {
                    break;
                }
            }
            for (mm, cc) in acc.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// Leibniz extension of a derivation of degree +1 given on generators.
    pub(crate) fn derive(&self, images: &[Element]) -> Element {
        let mut out = Element::zero(&self.gens);
        for (m, c) in &self.terms {
            let odd: Vec<usize> = m.odd_part().collect();
            let evens = m.even_only();
            for (pos, &g) in odd.iter().enumerate() {
                let dg = &images[g];
                if dg.is_zero() {
                    continue;
                }
                let prefix = m.odd_slice(0..pos);
                let (suffix, _) = m
                    .odd_slice(pos + 1..odd.len())
                    .mul(&evens)
                    .expect("disjoint parts");
                let term = dg.mul_monomial(&prefix, true).mul_monomial(&suffix, false);
                let sign = if pos % 2 == 1 { -c.clone() } else { c.clone() };
                for (mm, cc) in term.terms {
                    out.add_term(mm, cc * &sign);
                }
            }
            for (g, e) in m.even_part() {
                let dg = &images[g];
                if dg.is_zero() {
                    continue;
                }
                // d(x^e) = e x^(e-1) dx, placed after the whole odd part
                let rest = m.lower_even(g as u32);
                let odd_part = Monomial {
                    odd: rest.odd.clone(),
                    even: Vec::new(),
                };
                let even_rest = rest.even_only();
                let term = dg
                    .mul_monomial(&odd_part, true)
                    .mul_monomial(&even_rest, false);
                let mut coeff = c * Rational::from_integer(BigInt::from(e));
                if odd.len() % 2 == 1 {
                    coeff = -coeff;
                }
                for (mm, cc) in term.terms {
                    out.add_term(mm, cc * &coeff);
                }
            }
        }
        out
    }

    /// Renders with the given generator set's names.
    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{}", abs)?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}*", abs)?;
                }
                write!(f, "{}", m.display(&self.gens))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f)
    }
}

impl Add for &Element {
    type Output = Element;
    /// Panics if the operands live over different generator sets; use
    /// [`Element::try_add`] for a fallible version.
    fn add(self, rhs: &Element) -> Element {
        self.try_add(rhs).expect("generator set mismatch")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.try_sub(rhs).expect("generator set mismatch")
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.multiply(rhs).expect("generator set mismatch")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Rational::one())
    }
}

/// All canonical monomials of total degree exactly `k`, in canonical order.
pub fn monomial_basis(gens: &GeneratorSet, k: u32) -> Vec<Monomial> {
    let all: Vec<usize> = (0..gens.len()).collect();
    monomial_basis_in(gens, &all, k)
}

/// Like [`monomial_basis`] but only using the generators listed in `vars`.
pub fn monomial_basis_in(gens: &GeneratorSet, vars: &[usize], k: u32) -> Vec<Monomial> {
    fn rec(
        gens: &GeneratorSet,
        vars: &[usize],
        pos: usize,
        remaining: u32,
        odd: &mut Vec<u32>,
        even: &mut Vec<(u32, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if remaining == 0 {
            let mut o = odd.clone();
            o.sort_unstable();
            let mut e = even.clone();
            e.sort_unstable();
            out.push(Monomial { odd: o, even: e });
            return;
        }
        if pos == vars.len() {
            return;
        }
        let g = vars[pos];
        let d = gens.degree(g);
        rec(gens, vars, pos + 1, remaining, odd, even, out);
        if gens.is_odd(g) {
            if d <= remaining {
                odd.push(g as u32);
                rec(gens, vars, pos + 1, remaining - d, odd, even, out);
                odd.pop();
            }
        } else {
            let mut e = 1;
            while e * d <= remaining {
                even.push((g as u32, e));
                rec(gens, vars, pos + 1, remaining - e * d, odd, even, out);
                even.pop();
                e += 1;
            }
        }
    }
    let mut vars = vars.to_vec();
    vars.sort_unstable();
    vars.dedup();
    let mut out = Vec::new();
    rec(gens, &vars, 0, k, &mut Vec::new(), &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Free-function form of [`Element::multiply`].
pub fn multiply(a: &Element, b: &Element) -> Result<Element, AlgebraError> {
    a.multiply(b)
}

/// Free-function form of [`Element::homogeneous_degree`].
pub fn homogeneous_degree(a: &Element) -> HomogeneousDegree {
    a.homogeneous_degree()
}
