//! Finite permutation groups and homomorphisms between them.
//!
//! Groups are small (the fixtures top out at order 1152), so every group is
//! enumerated in full by breadth-first product closure. Elements are kept in
//! the canonical order (lexicographic on image arrays), and every "pick an
//! element" decision walks that order, which makes all derived data
//! reproducible.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

/// Default bound on the number of elements a closure may produce.
pub const DEFAULT_CAP: usize = 200_000;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "TATECOMPLEX_CAP";

/// Largest supported permutation degree.
pub const MAX_DEGREE: usize = 64;

/// Element cap in force: `TATECOMPLEX_CAP` if set and parseable, else the default.
pub fn element_cap() -> usize {
    std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|&c: &usize| c > 0).unwrap_or(DEFAULT_CAP)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group {label}: closure exceeds the element cap of {cap}")]
    CapExceeded { label: String, cap: usize },
    #[error("group {label}: degree {degree} outside 1..={MAX_DEGREE}")]
    BadDegree { label: String, degree: usize },
    #[error("group {label}: generator {index} is not a bijection of 1..{degree}")]
    NotAPermutation { label: String, index: usize, degree: usize },
    #[error("hom {id}: {detail}")]
    BadHom { id: String, detail: String },
    #[error("groups {a} and {b} act on different degrees")]
    DegreeMismatch { a: String, b: String },
}

/// A permutation of `0..n`, stored as its image array.
///
/// Products compose right to left: `(a * b)[i] = a[b[i]]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u8).collect())
    }

    /// Builds a permutation from 0-based images; `None` unless a bijection.
    pub fn from_images(images: Vec<u8>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Perm(images))
    }

    /// Builds a permutation from 1-based images (the file format).
    pub fn from_one_based(images: &[usize]) -> Option<Self> {
        if images.len() > MAX_DEGREE {
            return None;
        }
        let mut v = Vec::with_capacity(images.len());
        for &x in images {
            if x == 0 || x > images.len() {
                return None;
            }
            v.push((x - 1) as u8);
        }
        Perm::from_images(v)
    }

    /// Builds a permutation of degree `n` from disjoint cycles on 1-based points.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Option<Self> {
        let mut v: Vec<u8> = (0..n as u8).collect();
        for c in cycles {
            for (i, &p) in c.iter().enumerate() {
                let q = c[(i + 1) % c.len()];
                if p == 0 || p > n || q == 0 || q > n {
                    return None;
                }
                v[p - 1] = (q - 1) as u8;
            }
        }
        Perm::from_images(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut v = vec![0u8; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            v[x as usize] = i as u8;
        }
        Perm(v)
    }

    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.compose(self).compose(&g.inverse())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Cycle notation on 1-based points, `()` for the identity.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut any = false;
        for start in 0..n {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", i + 1)?;
                first = false;
                i = self.0[i] as usize;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl std::ops::Mul for &Perm {
    type Output = Perm;
    fn mul(self, rhs: &Perm) -> Perm {
        self.compose(rhs)
    }
}

/// Least `k >= 1` with `g^k = 1`.
pub fn element_order(g: &Perm) -> usize {
    // lcm of cycle lengths
    let n = g.degree();
    let mut seen = vec![false; n];
    let mut acc = 1usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = g.0[i] as usize;
            len += 1;
        }
        acc = lcm(acc, len);
    }
    acc
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Largest power of `l` dividing `n`.
pub fn l_part(n: usize, l: usize) -> usize {
    let mut p = 1;
    let mut m = n;
    while m > 0 && m.is_multiple_of(l) {
        p *= l;
        m /= l;
    }
    p
}

/// A finite permutation group, fully enumerated.
pub struct PermGroup {
    label: String,
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermGroup({}, degree {}, order {})", self.label, self.degree, self.order())
    }
}

impl PermGroup {
    /// Enumerates `<generators>` under the cap from the environment.
    pub fn new(label: impl Into<String>, degree: usize, generators: Vec<Perm>) -> Result<Self, GroupError> {
        Self::with_cap(label, degree, generators, element_cap())
    }

    pub fn with_cap(
        label: impl Into<String>,
        degree: usize,
        generators: Vec<Perm>,
        cap: usize,
    ) -> Result<Self, GroupError> {
        let label = label.into();
        if degree == 0 || degree > MAX_DEGREE {
            return Err(GroupError::BadDegree { label, degree });
        }
        for (i, g) in generators.iter().enumerate() {
            if g.degree() != degree {
                return Err(GroupError::NotAPermutation { label, index: i, degree });
            }
        }
        let elements =
            closure(&generators, degree, cap).ok_or_else(|| GroupError::CapExceeded { label: label.clone(), cap })?;
        Ok(Self::from_sorted(label, degree, generators, elements))
    }

    /// Builds the group from 1-based image arrays (file format).
    pub fn from_one_based(label: impl Into<String>, degree: usize, gens: &[Vec<usize>]) -> Result<Self, GroupError> {
        let label = label.into();
        let mut perms = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            match Perm::from_one_based(g) {
                Some(p) if p.degree() == degree => perms.push(p),
                _ => return Err(GroupError::NotAPermutation { label, index: i, degree }),
            }
        }
        Self::new(label, degree, perms)
    }

    fn from_sorted(label: String, degree: usize, generators: Vec<Perm>, mut elements: Vec<Perm>) -> Self {
        elements.sort();
        let index = elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        PermGroup { label, degree, generators, elements, index }
    }

    /// Subgroup on an element set already known to be closed; generators are
    /// picked greedily in canonical order.
    fn from_closed_set(label: String, degree: usize, mut elements: Vec<Perm>) -> Self {
        elements.sort();
        let generators = greedy_generators(&elements, degree);
        Self::from_sorted(label, degree, generators, elements)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Elements in canonical (lexicographic) order.
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.index.contains_key(g)
    }

    /// Position of `g` in the canonical order.
    pub fn index_of(&self, g: &Perm) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn is_abelian(&self) -> bool {
        let gs = &self.generators;
        gs.iter().all(|a| gs.iter().all(|b| a.compose(b) == b.compose(a)))
    }

    /// True iff `l` divides the order (Cauchy).
    pub fn has_order_l_element(&self, l: usize) -> bool {
        l > 1 && self.order().is_multiple_of(l)
    }

    /// Subgroup generated by `gens`, which must lie in this group.
    pub fn subgroup(&self, label: impl Into<String>, gens: Vec<Perm>) -> Result<PermGroup, GroupError> {
        let label = label.into();
        if let Some((i, _)) = gens.iter().enumerate().find(|(_, g)| !self.contains(g)) {
            return Err(GroupError::NotAPermutation { label, index: i, degree: self.degree });
        }
        PermGroup::with_cap(label, self.degree, gens, self.order())
    }

    /// True iff every element of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    pub fn same_elements(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }

    /// Intersection with another group acting on the same points.
    pub fn intersection(&self, other: &PermGroup, label: impl Into<String>) -> Result<PermGroup, GroupError> {
        if self.degree != other.degree {
            return Err(GroupError::DegreeMismatch { a: self.label.clone(), b: other.label.clone() });
        }
        let (small, big) = if self.order() <= other.order() { (self, other) } else { (other, self) };
        let common: Vec<Perm> = small.elements.iter().filter(|g| big.contains(g)).cloned().collect();
        Ok(PermGroup::from_closed_set(label.into(), self.degree, common))
    }

    /// Normalizer of a subgroup inside this group.
    pub fn normalizer(&self, sub: &PermGroup) -> PermGroup {
        let els: Vec<Perm> = self
            .elements
            .iter()
            .filter(|g| sub.generators.iter().all(|h| sub.contains(&h.conjugate_by(g))))
            .cloned()
            .collect();
        PermGroup::from_closed_set(format!("N({})", sub.label), self.degree, els)
    }

    /// A Sylow `l`-subgroup, grown one step at a time: while `P` is not
    /// Sylow, adjoin the first element (canonical order) of `N(P) \ P`
    /// whose `l`-th power lies in `P`.
    pub fn sylow_subgroup(&self, l: usize) -> PermGroup {
        let target = l_part(self.order(), l);
        let mut p = PermGroup::from_closed_set(format!("Syl{l}({})", self.label), self.degree, vec![self.identity()]);
        while p.order() < target {
            let n = self.normalizer(&p);
            let g = n
                .elements
                .iter()
                .find(|g| !p.contains(g) && p.contains(&pow(g, l)))
                .cloned()
                .expect("N(P)/P has an element of order l while P is not Sylow");
            let mut gens = p.generators.clone();
            gens.push(g);
            let els = closure(&gens, self.degree, self.order()).expect("subgroup of a finite group");
            p = PermGroup::from_sorted(p.label.clone(), self.degree, gens, els);
        }
        p
    }
}

fn pow(g: &Perm, k: usize) -> Perm {
    let mut r = Perm::identity(g.degree());
    for _ in 0..k {
        r = r.compose(g);
    }
    r
}

/// Breadth-first product closure; `None` once more than `cap` elements appear.
fn closure(gens: &[Perm], degree: usize, cap: usize) -> Option<Vec<Perm>> {
    let id = Perm::identity(degree);
    let mut seen: HashMap<Perm, ()> = HashMap::new();
    seen.insert(id.clone(), ());
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = g.compose(s);
            if !seen.contains_key(&h) {
                if seen.len() >= cap {
                    return None;
                }
                seen.insert(h.clone(), ());
                queue.push_back(h);
            }
        }
    }
    Some(seen.into_keys().collect())
}

fn greedy_generators(sorted: &[Perm], degree: usize) -> Vec<Perm> {
    let mut gens: Vec<Perm> = Vec::new();
    let mut span: HashMap<Perm, ()> = HashMap::from([(Perm::identity(degree), ())]);
    for g in sorted {
        if span.len() == sorted.len() {
            break;
        }
        if !span.contains_key(g) {
            gens.push(g.clone());
            let els = closure(&gens, degree, sorted.len()).expect("closed set bounds the span");
            span = els.into_iter().map(|p| (p, ())).collect();
        }
    }
    gens
}

/// Why a generator assignment fails to be an (injective) homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomViolation {
    ImageCount {
        expected: usize,
        found: usize,
    },
    ImageOutsideTarget {
        generator: usize,
        image: Perm,
    },
    /// `g * s` reached twice with different images.
    Product {
        element: Perm,
        generator: usize,
        first: Perm,
        second: Perm,
    },
    NotInjective {
        image_order: usize,
        source_order: usize,
    },
}

impl fmt::Display for HomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomViolation::ImageCount { expected, found } => {
                write!(f, "expected {expected} generator images, found {found}")
            }
            HomViolation::ImageOutsideTarget { generator, image } => {
                write!(f, "image {image} of generator {generator} is not in the target")
            }
            HomViolation::Product { element, generator, first, second } => {
                write!(f, "product {element} * s{generator} has two images {first} and {second}")
            }
            HomViolation::NotInjective { image_order, source_order } => {
                write!(f, "flagged injective but the image has {image_order} < {source_order} elements")
            }
        }
    }
}

/// A homomorphism given by images of the source generators.
pub struct GroupHom {
    id: String,
    source: Arc<PermGroup>,
    target: Arc<PermGroup>,
    images: Vec<Perm>,
    injective: bool,
    table: OnceLock<Result<Vec<Perm>, HomViolation>>,
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupHom({}: {} -> {})", self.id, self.source.label(), self.target.label())
    }
}

/// Id given to inclusion maps.
pub const INCLUSION: &str = "inclusion";

impl GroupHom {
    pub fn new(
        id: impl Into<String>,
        source: Arc<PermGroup>,
        target: Arc<PermGroup>,
        images: Vec<Perm>,
        injective: bool,
    ) -> Self {
        GroupHom { id: id.into(), source, target, images, injective, table: OnceLock::new() }
    }

    /// The inclusion of `source` into `target`, as a flagged-injective hom.
    pub fn inclusion(source: Arc<PermGroup>, target: Arc<PermGroup>) -> Self {
        let images = source.generators().to_vec();
        GroupHom::new(INCLUSION, source, target, images, true)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn source(&self) -> &Arc<PermGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PermGroup> {
        &self.target
    }

    pub fn images(&self) -> &[Perm] {
        &self.images
    }

    pub fn flagged_injective(&self) -> bool {
        self.injective
    }

    /// Image of every source element, indexed like `source.elements()`.
    ///
    /// Built by walking the Cayley graph of the source: every edge
    /// `g -> g*s` must carry `phi(g) -> phi(g)*phi(s)`, which is exactly the
    /// condition for the assignment to extend to a homomorphism.
    fn table(&self) -> &Result<Vec<Perm>, HomViolation> {
        self.table.get_or_init(|| {
            let src = &self.source;
            if self.images.len() != src.generators().len() {
                return Err(HomViolation::ImageCount { expected: src.generators().len(), found: self.images.len() });
            }
            for (i, im) in self.images.iter().enumerate() {
                if !self.target.contains(im) {
                    return Err(HomViolation::ImageOutsideTarget { generator: i, image: im.clone() });
                }
            }
            let mut table: Vec<Option<Perm>> = vec![None; src.order()];
            let id = src.identity();
            let id_ix = src.index_of(&id).expect("identity present");
            table[id_ix] = Some(self.target.identity());
            let mut queue = VecDeque::from([id_ix]);
            while let Some(ix) = queue.pop_front() {
                let g = &src.elements()[ix];
                let phi_g = table[ix].clone().expect("visited");
                for (k, s) in src.generators().iter().enumerate() {
                    let h = g.compose(s);
                    let hx = src.index_of(&h).expect("closed");
                    let img = phi_g.compose(&self.images[k]);
                    match &table[hx] {
                        None => {
                            table[hx] = Some(img);
                            queue.push_back(hx);
                        }
                        Some(prev) if *prev != img => {
                            return Err(HomViolation::Product {
                                element: g.clone(),
                                generator: k,
                                first: prev.clone(),
                                second: img,
                            })
                        }
                        Some(_) => {}
                    }
                }
            }
            let table: Vec<Perm> = table.into_iter().map(|p| p.expect("connected Cayley graph")).collect();
            if self.injective {
                let mut im = table.clone();
                im.sort();
                im.dedup();
                if im.len() != src.order() {
                    return Err(HomViolation::NotInjective { image_order: im.len(), source_order: src.order() });
                }
            }
            Ok(table)
        })
    }

    /// Full check: homomorphism, and injective when flagged.
    pub fn verify(&self) -> Result<(), HomViolation> {
        self.table().as_ref().map(|_| ()).map_err(Clone::clone)
    }

    /// Image of a source element; `None` if `g` is outside the source or the map is invalid.
    pub fn apply(&self, g: &Perm) -> Option<Perm> {
        let ix = self.source.index_of(g)?;
        self.table().as_ref().ok().map(|t| t[ix].clone())
    }

    /// Sorted, deduplicated image elements.
    pub fn image_elements(&self) -> Option<Vec<Perm>> {
        let mut im = self.table().as_ref().ok()?.clone();
        im.sort();
        im.dedup();
        Some(im)
    }

    /// The image as a subgroup of the target.
    pub fn image_group(&self) -> Option<PermGroup> {
        let els = self.image_elements()?;
        Some(PermGroup::from_closed_set(format!("im({})", self.id), self.target.degree(), els))
    }

    pub fn is_surjective(&self) -> bool {
        self.image_elements().is_some_and(|im| im.len() == self.target.order())
    }

    /// Preimage of a target element under an injective map.
    pub fn preimage(&self, y: &Perm) -> Option<Perm> {
        let table = self.table().as_ref().ok()?;
        table.iter().position(|x| x == y).map(|i| self.source.elements()[i].clone())
    }

    /// `self ∘ first` (apply `first`, then `self`).
    pub fn after(&self, first: &GroupHom, id: impl Into<String>) -> Option<GroupHom> {
        if !first.target.same_elements(&self.source) {
            return None;
        }
        let images = first.images.iter().map(|g| self.apply(g)).collect::<Option<Vec<_>>>()?;
        Some(GroupHom::new(id, first.source.clone(), self.target.clone(), images, self.injective && first.injective))
    }

    /// True iff both maps share source and target elements and agree on generators.
    pub fn agrees_with(&self, other: &GroupHom) -> bool {
        self.source.same_elements(&other.source)
            && self.target.same_elements(&other.target)
            && self.source.generators().iter().all(|g| self.apply(g) == other.apply(g))
    }
}

/// Short isomorphism-type name for small groups (`Z/n`, `Dn` for the
/// dihedral group of order `2n`, `S4`, `A4`, `Q8`, `(Z/2)^k`), falling back
/// to `order n`.
pub fn structure_name(g: &PermGroup) -> String {
    let n = g.order();
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for x in g.elements() {
        *counts.entry(element_order(x)).or_default() += 1;
    }
    let c = |k: usize| counts.get(&k).copied().unwrap_or(0);
    if n == 1 {
        return "1".into();
    }
    if c(n) > 0 {
        return format!("Z/{n}");
    }
    if c(2) == n - 1 {
        let k = n.trailing_zeros();
        return if k == 2 { "D2".into() } else { format!("(Z/2)^{k}") };
    }
    let half = n / 2;
    if n.is_multiple_of(2) && half >= 3 && c(half) > 0 && c(2) == half + usize::from(half.is_multiple_of(2)) {
        return format!("D{half}");
    }
    match (n, c(2), c(3), c(4)) {
        (24, 9, 8, 6) => "S4".into(),
        (12, 3, 8, _) => "A4".into(),
        (8, 1, _, 6) => "Q8".into(),
        _ => format!("order {n}"),
    }
}

/// `verify_hom`: true iff the map is a homomorphism (injective when flagged).
pub fn verify_hom(h: &GroupHom) -> bool {
    h.verify().is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: usize, cycles: &[&[usize]]) -> Perm {
        Perm::from_cycles(n, cycles).unwrap()
    }

    fn s4() -> Arc<PermGroup> {
        Arc::new(PermGroup::new("S4", 4, vec![c(4, &[&[1, 2]]), c(4, &[&[1, 2, 3, 4]])]).unwrap())
    }

    #[test]
    fn orders() {
        assert_eq!(PermGroup::new("1", 1, vec![]).unwrap().order(), 1);
        assert_eq!(s4().order(), 24);
        assert_eq!(element_order(&Perm::identity(4)), 1);
        assert_eq!(element_order(&c(4, &[&[1, 2]])), 2);
        assert_eq!(element_order(&c(4, &[&[1, 2, 3, 4]])), 4);
        assert_eq!(element_order(&c(5, &[&[1, 2], &[3, 4, 5]])), 6);
    }

    #[test]
    fn elements_are_canonically_sorted() {
        let g = s4();
        assert!(g.elements().windows(2).all(|w| w[0] < w[1]));
        assert!(g.elements()[0].is_identity());
    }

    #[test]
    fn cap_is_enforced() {
        let gens = vec![c(5, &[&[1, 2]]), c(5, &[&[1, 2, 3, 4, 5]])];
        let err = PermGroup::with_cap("S5", 5, gens, 100).unwrap_err();
        assert!(matches!(err, GroupError::CapExceeded { cap: 100, .. }));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(PermGroup::from_one_based("x", 3, &[vec![1, 1, 2]]).is_err());
        assert!(PermGroup::from_one_based("x", 3, &[vec![1, 2]]).is_err());
        assert!(PermGroup::from_one_based("x", 3, &[vec![2, 3, 1]]).is_ok());
    }

    #[test]
    fn order_l_elements() {
        let z3 = PermGroup::new("Z3", 3, vec![c(3, &[&[1, 2, 3]])]).unwrap();
        assert!(s4().has_order_l_element(2));
        assert!(!z3.has_order_l_element(2));
        let d8 = PermGroup::new("D8", 4, vec![c(4, &[&[1, 2, 3, 4]]), c(4, &[&[1, 3]])]).unwrap();
        assert!(d8.has_order_l_element(2));
    }

    #[test]
    fn sylow_orders() {
        let z2 = PermGroup::new("Z2", 2, vec![c(2, &[&[1, 2]])]).unwrap();
        assert_eq!(z2.sylow_subgroup(2).order(), 2);
        let g = s4();
        let p2 = g.sylow_subgroup(2);
        assert_eq!(p2.order(), 8);
        assert!(p2.is_subgroup_of(&g));
        assert_eq!(g.sylow_subgroup(3).order(), 3);
        assert_eq!(g.sylow_subgroup(5).order(), 1);
    }

    #[test]
    fn identity_and_sign_homs() {
        let g = s4();
        let id = GroupHom::new("id", g.clone(), g.clone(), g.generators().to_vec(), true);
        assert!(verify_hom(&id));
        let z2 = Arc::new(PermGroup::new("Z2", 2, vec![c(2, &[&[1, 2]])]).unwrap());
        let t = c(2, &[&[1, 2]]);
        let sign = GroupHom::new("sign", g.clone(), z2.clone(), vec![t.clone(), t.clone()], false);
        assert!(verify_hom(&sign));
        // a 4-cycle is odd, a transposition is odd; sending the 4-cycle to 1 breaks it
        let bad = GroupHom::new("bad", g, z2, vec![t, Perm::identity(2)], false);
        assert!(matches!(bad.verify(), Err(HomViolation::Product { .. })));
    }

    #[test]
    fn injectivity_flag_is_checked() {
        let z4 = Arc::new(PermGroup::new("Z4", 4, vec![c(4, &[&[1, 2, 3, 4]])]).unwrap());
        let z2 = Arc::new(PermGroup::new("Z2", 2, vec![c(2, &[&[1, 2]])]).unwrap());
        let h = GroupHom::new("q", z4, z2, vec![c(2, &[&[1, 2]])], true);
        assert!(matches!(h.verify(), Err(HomViolation::NotInjective { image_order: 2, source_order: 4 })));
    }

    #[test]
    fn normalizer_and_intersection() {
        let g = s4();
        let v4 = g.subgroup("V4", vec![c(4, &[&[1, 2], &[3, 4]]), c(4, &[&[1, 3], &[2, 4]])]).unwrap();
        assert_eq!(g.normalizer(&v4).order(), 24);
        let s3 = g.subgroup("S3", vec![c(4, &[&[1, 2]]), c(4, &[&[1, 2, 3]])]).unwrap();
        assert_eq!(s3.intersection(&v4, "1").unwrap().order(), 1);
        let d8 = g.sylow_subgroup(2);
        assert_eq!(d8.intersection(&v4, "V").unwrap().order(), 4);
    }

    #[test]
    fn composition_and_preimage() {
        let g = s4();
        let s3 = Arc::new(g.subgroup("S3", vec![c(4, &[&[1, 2]]), c(4, &[&[1, 2, 3]])]).unwrap());
        let inc = GroupHom::inclusion(s3.clone(), g.clone());
        let id = GroupHom::new("id", g.clone(), g.clone(), g.generators().to_vec(), true);
        let comp = id.after(&inc, "c").unwrap();
        assert!(comp.verify().is_ok());
        assert!(comp.agrees_with(&inc));
        let x = c(4, &[&[1, 3]]);
        assert_eq!(inc.preimage(&x), Some(x));
        assert_eq!(inc.preimage(&c(4, &[&[1, 4]])), None);
        assert!(!inc.is_surjective());
    }

    #[test]
    fn structure_names() {
        let g = |gens: Vec<Perm>, n| PermGroup::new("g", n, gens).unwrap();
        assert_eq!(structure_name(&s4()), "S4");
        assert_eq!(structure_name(&s4().sylow_subgroup(2)), "D4");
        assert_eq!(structure_name(&g(vec![c(4, &[&[1, 2]])], 4)), "Z/2");
        assert_eq!(structure_name(&g(vec![c(4, &[&[1, 2]]), c(4, &[&[3, 4]])], 4)), "D2");
        assert_eq!(structure_name(&g(vec![c(3, &[&[1, 2]]), c(3, &[&[1, 2, 3]])], 3)), "D3");
        assert_eq!(structure_name(&g(vec![c(4, &[&[1, 2, 3]]), c(4, &[&[1, 2], &[3, 4]])], 4)), "A4");
        assert_eq!(structure_name(&g(vec![], 2)), "1");
    }

    #[test]
    fn display_cycles() {
        assert_eq!(c(4, &[&[1, 2], &[3, 4]]).to_string(), "(1 2)(3 4)");
        assert_eq!(Perm::identity(3).to_string(), "()");
    }
}
