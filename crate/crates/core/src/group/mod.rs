//! Group models with canonical normal forms and exact word metrics.
//!
//! Supported models are free groups, finite groups given by a table, free
//! products whose factors are free or finite, and direct products of a
//! finite group with a free group or such a free product. The word metric is
//! always taken with respect to the union of the factor generating sets.

mod automaton;
mod element;
mod finite;
mod parse;

use std::sync::Arc;

use num_bigint::BigUint;

pub use automaton::{AutState, GeodesicAutomaton};
pub use element::{invert_word, push_reduced, Element, Letter, Part, Syllable, Word};
pub use finite::FiniteGroup;
pub use parse::GroupConfig;

use crate::error::{Error, Result};

/// A factor of a free product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factor {
    Free { rank: usize },
    Finite(Arc<FiniteGroup>),
}

impl Factor {
    /// Number of generators this factor contributes (letters and their inverses for free factors).
    pub fn generator_count(&self) -> usize {
        match self {
            Factor::Free { rank } => 2 * rank,
            Factor::Finite(g) => g.gens().len(),
        }
    }

    fn part_length(&self, part: &Part) -> usize {
        match (self, part) {
            (Factor::Finite(g), Part::Finite(x)) => g.length(*x),
            (_, Part::Free(w)) => w.len(),
            _ => unreachable!("part kind checked by validate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Free { rank: usize },
    Finite(Arc<FiniteGroup>),
    FreeProduct(Vec<Factor>),
    DirectWithFinite { finite: Arc<FiniteGroup>, base: Box<GroupSpec> },
}

/// A generator of the word metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    /// Globally unique name ("a", "b^-1", ...).
    pub name: String,
    /// Name inside its factor, used by the "f<i>.<name>" word syntax.
    pub local: String,
    pub factor: Option<usize>,
    pub element: Element,
}

pub(crate) fn letter_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{i}")
    }
}

impl GroupSpec {
    pub fn free(rank: usize) -> Result<Self> {
        if rank == 0 || rank > Letter::MAX_RANK {
            return Err(Error::InvalidSpec(format!("free group rank {rank} out of range")));
        }
        Ok(GroupSpec::Free { rank })
    }

    pub fn cyclic(order: usize) -> Result<Self> {
        Ok(GroupSpec::Finite(Arc::new(FiniteGroup::cyclic(order)?)))
    }

    pub fn finite(group: FiniteGroup) -> Self {
        GroupSpec::Finite(Arc::new(group))
    }

    pub fn free_product(factors: Vec<GroupSpec>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::InvalidSpec("a free product needs at least two factors".into()));
        }
        if factors.len() > u16::MAX as usize {
            return Err(Error::InvalidSpec("too many factors".into()));
        }
        let factors = factors
            .into_iter()
            .map(|f| match f {
                GroupSpec::Free { rank } => Ok(Factor::Free { rank }),
                GroupSpec::Finite(g) => Ok(Factor::Finite(g)),
                _ => Err(Error::InvalidSpec(
                    "free product factors must be free or finite groups".into(),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupSpec::FreeProduct(factors))
    }

    pub fn direct_with_finite(finite: GroupSpec, base: GroupSpec) -> Result<Self> {
        let GroupSpec::Finite(finite) = finite else {
            return Err(Error::InvalidSpec("direct product needs a finite first factor".into()));
        };
        match base {
            GroupSpec::Free { .. } | GroupSpec::FreeProduct(_) => Ok(GroupSpec::DirectWithFinite {
                finite,
                base: Box::new(base),
            }),
            _ => Err(Error::InvalidSpec(
                "direct product base must be a free group or a free product".into(),
            )),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            GroupSpec::Free { .. } => false,
            GroupSpec::Finite(_) => true,
            GroupSpec::FreeProduct(_) => false,
            GroupSpec::DirectWithFinite { .. } => false,
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            GroupSpec::Free { .. } => Element::Free(Word::new()),
            GroupSpec::Finite(g) => Element::Finite(g.identity()),
            GroupSpec::FreeProduct(_) => Element::Product(Vec::new()),
            GroupSpec::DirectWithFinite { finite, base } => {
                Element::Direct(finite.identity(), Box::new(base.identity()))
            }
        }
    }

    pub fn is_identity(&self, x: &Element) -> bool {
        match (self, x) {
            (_, Element::Free(w)) => w.is_empty(),
            (GroupSpec::Finite(g), Element::Finite(i)) => *i == g.identity(),
            (_, Element::Product(s)) => s.is_empty(),
            (GroupSpec::DirectWithFinite { finite, base }, Element::Direct(f, b)) => {
                *f == finite.identity() && base.is_identity(b)
            }
            _ => false,
        }
    }

    /// Number of generators of the word metric.
    pub fn generator_count(&self) -> usize {
        match self {
            GroupSpec::Free { rank } => 2 * rank,
            GroupSpec::Finite(g) => g.gens().len(),
            GroupSpec::FreeProduct(fs) => fs.iter().map(Factor::generator_count).sum(),
            GroupSpec::DirectWithFinite { finite, base } => {
                base.generator_count() + finite.gens().len()
            }
        }
    }

    /// Generators in canonical order. Free groups list `a, a^-1, b, b^-1, ...`;
    /// free products concatenate their factors; direct products list the base
    /// generators before the finite ones.
    pub fn generators(&self) -> Vec<Generator> {
        let mut out = Vec::new();
        let mut next_letter = 0;
        self.push_generators(&mut out, &mut next_letter);
        out
    }

    fn push_generators(&self, out: &mut Vec<Generator>, next_letter: &mut usize) {
        match self {
            GroupSpec::Free { rank } => {
                push_free_generators(out, *rank, None, next_letter, &mut 0, Element::Free)
            }
            GroupSpec::Finite(g) => {
                push_finite_generators(out, g, None, next_letter, &mut 0, Element::Finite)
            }
            GroupSpec::FreeProduct(factors) => {
                for (i, f) in factors.iter().enumerate() {
                    let mut local = 0;
                    match f {
                        Factor::Free { rank } => {
                            push_free_generators(out, *rank, Some(i), next_letter, &mut local, |w| {
                                Element::Product(vec![Syllable {
                                    factor: i as u16,
                                    part: Part::Free(w),
                                }])
                            })
                        }
                        Factor::Finite(g) => {
                            push_finite_generators(out, g, Some(i), next_letter, &mut local, |x| {
                                Element::Product(vec![Syllable {
                                    factor: i as u16,
                                    part: Part::Finite(x),
                                }])
                            })
                        }
                    }
                }
            }
            GroupSpec::DirectWithFinite { finite, base } => {
                let fid = finite.identity();
                let mut base_gens = Vec::new();
                base.push_generators(&mut base_gens, next_letter);
                out.extend(base_gens.into_iter().map(|g| Generator {
                    element: Element::Direct(fid, Box::new(g.element)),
                    ..g
                }));
                let bid = base.identity();
                push_finite_generators(out, finite, None, next_letter, &mut 0, |x| {
                    Element::Direct(x, Box::new(bid.clone()))
                });
            }
        }
    }

    /// Element of the generator with global index `i`.
    pub fn generator(&self, i: usize) -> Element {
        match self {
            GroupSpec::Free { .. } => Element::Free(Word::from_elem(Letter::from_code(i as u8), 1)),
            GroupSpec::Finite(g) => Element::Finite(g.gens()[i]),
            GroupSpec::FreeProduct(factors) => {
                let (f, local) = split_product_index(factors, i);
                let part = match &factors[f] {
                    Factor::Free { .. } => Part::Free(Word::from_elem(Letter::from_code(local as u8), 1)),
                    Factor::Finite(g) => Part::Finite(g.gens()[local]),
                };
                Element::Product(vec![Syllable { factor: f as u16, part }])
            }
            GroupSpec::DirectWithFinite { finite, base } => {
                let nb = base.generator_count();
                if i < nb {
                    Element::Direct(finite.identity(), Box::new(base.generator(i)))
                } else {
                    Element::Direct(finite.gens()[i - nb], Box::new(base.identity()))
                }
            }
        }
    }

    /// Checks that `x` is a canonical normal form of an element of this group.
    pub fn validate(&self, x: &Element) -> Result<()> {
        let bad = |why: &str| Err(Error::GroupMismatch(why.to_string()));
        match (self, x) {
            (GroupSpec::Free { rank }, Element::Free(w)) => validate_word(w, *rank),
            (GroupSpec::Finite(g), Element::Finite(i)) => {
                if (*i as usize) < g.order() {
                    Ok(())
                } else {
                    bad("finite element index out of range")
                }
            }
            (GroupSpec::FreeProduct(factors), Element::Product(syls)) => {
                for (k, s) in syls.iter().enumerate() {
                    let Some(f) = factors.get(s.factor as usize) else {
                        return bad("syllable factor out of range");
                    };
                    if k > 0 && syls[k - 1].factor == s.factor {
                        return bad("adjacent syllables from the same factor");
                    }
                    match (f, &s.part) {
                        (Factor::Free { rank }, Part::Free(w)) => {
                            if w.is_empty() {
                                return bad("trivial syllable");
                            }
                            validate_word(w, *rank)?;
                        }
                        (Factor::Finite(g), Part::Finite(x)) => {
                            if *x as usize >= g.order() {
                                return bad("finite element index out of range");
                            }
                            if *x == g.identity() {
                                return bad("trivial syllable");
                            }
                        }
                        _ => return bad("syllable kind does not match its factor"),
                    }
                }
                Ok(())
            }
            (GroupSpec::DirectWithFinite { finite, base }, Element::Direct(f, b)) => {
                if *f as usize >= finite.order() {
                    return bad("finite coordinate out of range");
                }
                base.validate(b)
            }
            _ => bad("element kind does not match the group model"),
        }
    }

    /// Product `x * y` in normal form.
    pub fn mul(&self, x: &Element, y: &Element) -> Result<Element> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(self.mul_unchecked(x, y))
    }

    pub fn mul_unchecked(&self, x: &Element, y: &Element) -> Element {
        let mut out = x.clone();
        self.mul_assign(&mut out, y);
        out
    }

    /// In-place right multiplication `x <- x * y`. Both arguments must be valid.
    pub fn mul_assign(&self, x: &mut Element, y: &Element) {
        match (self, x, y) {
            (GroupSpec::Free { .. }, Element::Free(w), Element::Free(v)) => {
                for &l in v {
                    push_reduced(w, l);
                }
            }
            (GroupSpec::Finite(g), Element::Finite(a), Element::Finite(b)) => *a = g.mul(*a, *b),
            (GroupSpec::FreeProduct(factors), Element::Product(xs), Element::Product(ys)) => {
                for s in ys {
                    merge_syllable(factors, xs, s);
                }
            }
            (
                GroupSpec::DirectWithFinite { finite, base },
                Element::Direct(f, b),
                Element::Direct(g, c),
            ) => {
                *f = finite.mul(*f, *g);
                base.mul_assign(b, c);
            }
            _ => panic!("mul_assign on mismatched element kinds"),
        }
    }

    pub fn inv(&self, x: &Element) -> Result<Element> {
        self.validate(x)?;
        Ok(self.inv_unchecked(x))
    }

    pub fn inv_unchecked(&self, x: &Element) -> Element {
        match (self, x) {
            (_, Element::Free(w)) => Element::Free(invert_word(w)),
            (GroupSpec::Finite(g), Element::Finite(i)) => Element::Finite(g.inv(*i)),
            (GroupSpec::FreeProduct(factors), Element::Product(syls)) => Element::Product(
                syls.iter()
                    .rev()
                    .map(|s| Syllable {
                        factor: s.factor,
                        part: match (&factors[s.factor as usize], &s.part) {
                            (Factor::Finite(g), Part::Finite(x)) => Part::Finite(g.inv(*x)),
                            (_, Part::Free(w)) => Part::Free(invert_word(w)),
                            _ => unreachable!(),
                        },
                    })
                    .collect(),
            ),
            (GroupSpec::DirectWithFinite { finite, base }, Element::Direct(f, b)) => {
                Element::Direct(finite.inv(*f), Box::new(base.inv_unchecked(b)))
            }
            _ => panic!("inv on mismatched element kind"),
        }
    }

    /// Word length |x| = d(e, x).
    pub fn word_length(&self, x: &Element) -> usize {
        match (self, x) {
            (_, Element::Free(w)) => w.len(),
            (GroupSpec::Finite(g), Element::Finite(i)) => g.length(*i),
            (GroupSpec::FreeProduct(factors), Element::Product(syls)) => syls
                .iter()
                .map(|s| factors[s.factor as usize].part_length(&s.part))
                .sum(),
            (GroupSpec::DirectWithFinite { finite, base }, Element::Direct(f, b)) => {
                finite.length(*f) + base.word_length(b)
            }
            _ => panic!("word_length on mismatched element kind"),
        }
    }

    /// Canonical geodesic as a sequence of global generator indices.
    ///
    /// Free-group geodesics are unique. Inside finite factors the
    /// lexicographically least geodesic (by generator position) is used,
    /// and direct products put the base part before the finite part.
    pub fn geodesic_word(&self, x: &Element) -> Vec<usize> {
        match (self, x) {
            (_, Element::Free(w)) => w.iter().map(|l| l.code() as usize).collect(),
            (GroupSpec::Finite(g), Element::Finite(i)) => g.geodesic(*i),
            (GroupSpec::FreeProduct(factors), Element::Product(syls)) => {
                let offsets = product_offsets(factors);
                let mut out = Vec::new();
                for s in syls {
                    let off = offsets[s.factor as usize];
                    match (&factors[s.factor as usize], &s.part) {
                        (Factor::Finite(g), Part::Finite(x)) => {
                            out.extend(g.geodesic(*x).into_iter().map(|p| off + p))
                        }
                        (_, Part::Free(w)) => out.extend(w.iter().map(|l| off + l.code() as usize)),
                        _ => unreachable!(),
                    }
                }
                out
            }
            (GroupSpec::DirectWithFinite { finite, base }, Element::Direct(f, b)) => {
                let nb = base.generator_count();
                let mut out = base.geodesic_word(b);
                out.extend(finite.geodesic(*f).into_iter().map(|p| nb + p));
                out
            }
            _ => panic!("geodesic_word on mismatched element kind"),
        }
    }

    /// Evaluates a word of global generator indices.
    pub fn word_to_element(&self, word: &[usize]) -> Element {
        let mut x = self.identity();
        for &i in word {
            self.mul_assign(&mut x, &self.generator(i));
        }
        x
    }

    pub fn power(&self, x: &Element, k: i64) -> Element {
        let base = if k < 0 { self.inv_unchecked(x) } else { x.clone() };
        let mut out = self.identity();
        for _ in 0..k.unsigned_abs() {
            self.mul_assign(&mut out, &base);
        }
        out
    }

    /// Human-readable form using generator names along the canonical geodesic.
    pub fn format_element(&self, x: &Element) -> String {
        let word = self.geodesic_word(x);
        if word.is_empty() {
            return "e".into();
        }
        let gens = self.generators();
        word.iter().map(|&i| gens[i].name.as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn automaton(&self) -> GeodesicAutomaton {
        GeodesicAutomaton::new(self)
    }

    /// Exact sphere sizes Card S^k for k = 0..=n, counted on the geodesic automaton.
    pub fn sphere_counts(&self, n: usize) -> Vec<BigUint> {
        self.automaton().path_counts(n)
    }

    /// All elements with |g| = n, in lexicographic order of canonical geodesics.
    pub fn enumerate_sphere(&self, n: usize, cap: usize) -> Result<Vec<Element>> {
        let required = &self.sphere_counts(n)[n];
        check_cap("sphere enumeration", required, cap)?;
        let mut out = Vec::new();
        self.automaton().for_each_word(self, n, |_, x| out.push(x.clone()));
        Ok(out)
    }

    /// All elements with |g| <= n, by increasing length.
    pub fn enumerate_ball(&self, n: usize, cap: usize) -> Result<Vec<Element>> {
        let counts = self.sphere_counts(n);
        let total: BigUint = counts.iter().sum();
        check_cap("ball enumeration", &total, cap)?;
        let aut = self.automaton();
        let mut out = Vec::new();
        for k in 0..=n {
            aut.for_each_word(self, k, |_, x| out.push(x.clone()));
        }
        Ok(out)
    }

    /// Finite factors of a free product, or the group itself when finite.
    pub fn factors(&self) -> Vec<Factor> {
        match self {
            GroupSpec::Free { rank } => vec![Factor::Free { rank: *rank }],
            GroupSpec::Finite(g) => vec![Factor::Finite(g.clone())],
            GroupSpec::FreeProduct(fs) => fs.clone(),
            GroupSpec::DirectWithFinite { base, .. } => base.factors(),
        }
    }
}

fn check_cap(what: &'static str, required: &BigUint, cap: usize) -> Result<()> {
    let fits = required <= &BigUint::from(cap);
    if fits {
        Ok(())
    } else {
        let required = usize::try_from(required).unwrap_or(usize::MAX);
        Err(Error::CapExceeded {
            what,
            cap,
            required,
            lower_bound: false,
        })
    }
}

fn validate_word(w: &[Letter], rank: usize) -> Result<()> {
    if w.iter().any(|l| l.generator() >= rank) {
        return Err(Error::GroupMismatch("letter out of range".into()));
    }
    if w.windows(2).any(|p| p[1] == p[0].inverse()) {
        return Err(Error::GroupMismatch("word is not freely reduced".into()));
    }
    Ok(())
}

fn merge_syllable(factors: &[Factor], xs: &mut Vec<Syllable>, s: &Syllable) {
    if let Some(last) = xs.last_mut() {
        if last.factor == s.factor {
            let trivial = match (&factors[s.factor as usize], &mut last.part, &s.part) {
                (Factor::Finite(g), Part::Finite(a), Part::Finite(b)) => {
                    *a = g.mul(*a, *b);
                    *a == g.identity()
                }
                (_, Part::Free(w), Part::Free(v)) => {
                    for &l in v {
                        push_reduced(w, l);
                    }
                    w.is_empty()
                }
                _ => unreachable!("syllable kinds match their factor"),
            };
            if trivial {
                xs.pop();
            }
            return;
        }
    }
    xs.push(s.clone());
}

pub(crate) fn product_offsets(factors: &[Factor]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(factors.len());
    let mut acc = 0;
    for f in factors {
        offsets.push(acc);
        acc += f.generator_count();
    }
    offsets
}

fn split_product_index(factors: &[Factor], mut i: usize) -> (usize, usize) {
    for (f, factor) in factors.iter().enumerate() {
        let n = factor.generator_count();
        if i < n {
            return (f, i);
        }
        i -= n;
    }
    panic!("generator index out of range")
}

fn push_free_generators(
    out: &mut Vec<Generator>,
    rank: usize,
    factor: Option<usize>,
    next_letter: &mut usize,
    next_local: &mut usize,
    wrap: impl Fn(Word) -> Element,
) {
    for g in 0..rank {
        let name = letter_name(*next_letter);
        let local = letter_name(*next_local);
        *next_letter += 1;
        *next_local += 1;
        for inverse in [false, true] {
            let suffix = if inverse { "^-1" } else { "" };
            out.push(Generator {
                name: format!("{name}{suffix}"),
                local: format!("{local}{suffix}"),
                factor,
                element: wrap(Word::from_elem(Letter::new(g, inverse), 1)),
            });
        }
    }
}

fn push_finite_generators(
    out: &mut Vec<Generator>,
    g: &FiniteGroup,
    factor: Option<usize>,
    next_letter: &mut usize,
    next_local: &mut usize,
    wrap: impl Fn(u32) -> Element,
) {
    let mut names: Vec<(String, String)> = Vec::with_capacity(g.gens().len());
    for (p, &x) in g.gens().iter().enumerate() {
        let inv = g.inv(x);
        let earlier = g.gens()[..p].iter().position(|&y| y == inv);
        let pair = match earlier {
            Some(q) if inv != x => (format!("{}^-1", names[q].0), format!("{}^-1", names[q].1)),
            _ => {
                let pair = (letter_name(*next_letter), letter_name(*next_local));
                *next_letter += 1;
                *next_local += 1;
                pair
            }
        };
        names.push(pair);
    }
    for ((name, local), &x) in names.into_iter().zip(g.gens()) {
        out.push(Generator {
            name,
            local,
            factor,
            element: wrap(x),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn z2_star_z4() -> GroupSpec {
        GroupSpec::free_product(vec![GroupSpec::cyclic(2).unwrap(), GroupSpec::cyclic(4).unwrap()])
            .unwrap()
    }

    fn f2() -> GroupSpec {
        GroupSpec::free(2).unwrap()
    }

    fn w(g: &GroupSpec, s: &str) -> Element {
        g.parse_word(s).unwrap()
    }

    #[test]
    fn free_group_full_cancellation() {
        let g = f2();
        let x = w(&g, "a b");
        let y = w(&g, "b^-1 a^-1");
        assert!(g.is_identity(&g.mul(&x, &y).unwrap()));
    }

    #[test]
    fn free_product_cross_factor_cancellation() {
        let g = z2_star_z4();
        let x = w(&g, "a b");
        let y = w(&g, "b^-1 a");
        assert!(g.is_identity(&g.mul(&x, &y).unwrap()));
    }

    #[test]
    fn free_product_syllable_merge() {
        let g = z2_star_z4();
        let p = g.mul(&w(&g, "a b"), &w(&g, "b a")).unwrap();
        assert_eq!(g.format_element(&p), "a b b a");
        assert_eq!(g.word_length(&p), 4);
        match &p {
            Element::Product(s) => assert_eq!(s.len(), 3),
            _ => panic!(),
        }
    }

    #[test]
    fn inverses() {
        let g = f2();
        assert_eq!(g.inv(&w(&g, "a b a^-1")).unwrap(), w(&g, "a b^-1 a^-1"));
        let z4 = GroupSpec::cyclic(4).unwrap();
        assert_eq!(z4.inv(&Element::Finite(3)).unwrap(), Element::Finite(1));
        assert_eq!(g.inv(&g.identity()).unwrap(), g.identity());
    }

    #[test]
    fn word_lengths() {
        let g = f2();
        assert_eq!(g.word_length(&w(&g, "a b a^-1 b^-1")), 4);
        let h = z2_star_z4();
        assert_eq!(h.word_length(&w(&h, "a b^2 a")), 4);
        let z4 = GroupSpec::cyclic(4).unwrap();
        assert_eq!(z4.word_length(&Element::Finite(3)), 1);
    }

    #[test]
    fn geodesic_words() {
        let g = f2();
        let gens = g.generators();
        let word = g.geodesic_word(&w(&g, "a b^-1"));
        let names: Vec<_> = word.iter().map(|&i| gens[i].name.clone()).collect();
        assert_eq!(names, ["a", "b^-1"]);
        let h = z2_star_z4();
        assert_eq!(h.format_element(&w(&h, "a b^-1 b^-1")), "a b b");
        assert!(h.geodesic_word(&h.identity()).is_empty());
    }

    #[test]
    fn sphere_enumeration_examples() {
        assert_eq!(f2().enumerate_sphere(2, 100).unwrap().len(), 12);
        let h = z2_star_z4();
        let s2: Vec<String> =
            h.enumerate_sphere(2, 100).unwrap().iter().map(|x| h.format_element(x)).collect();
        assert_eq!(s2, ["a b", "a b^-1", "b a", "b b", "b^-1 a"]);
        for g in [f2(), h, GroupSpec::cyclic(5).unwrap()] {
            assert_eq!(g.enumerate_sphere(0, 1).unwrap(), vec![g.identity()]);
        }
    }

    #[test]
    fn sphere_cap_reports_required_size() {
        match f2().enumerate_sphere(3, 10) {
            Err(Error::CapExceeded { required, .. }) => assert_eq!(required, 36),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_rejects_non_normal_forms() {
        let g = f2();
        let bad = Element::Free(Word::from_slice(&[Letter::new(0, false), Letter::new(0, true)]));
        assert!(g.validate(&bad).is_err());
        let h = z2_star_z4();
        let bad = Element::Product(vec![
            Syllable { factor: 1, part: Part::Finite(1) },
            Syllable { factor: 1, part: Part::Finite(1) },
        ]);
        assert!(h.validate(&bad).is_err());
        assert!(h.mul(&Element::Finite(0), &h.identity()).is_err());
    }

    #[test]
    fn generator_names() {
        let h = z2_star_z4();
        let names: Vec<_> = h.generators().into_iter().map(|g| g.name).collect();
        assert_eq!(names, ["a", "b", "b^-1"]);
        let d = GroupSpec::direct_with_finite(GroupSpec::cyclic(2).unwrap(), f2()).unwrap();
        let names: Vec<_> = d.generators().into_iter().map(|g| g.name).collect();
        assert_eq!(names, ["a", "a^-1", "b", "b^-1", "c"]);
    }
}
