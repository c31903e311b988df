//! Centralizers, centers, central and derived series, Frattini subgroups,
//! conjugacy censuses, commuting probability, and subgroup lattices.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::enumeration::fp_rank;
use crate::groupcore::{factorize, prime_power, AbelianType, Class2Group, Group, SubgroupHandle, TableGroup};
use crate::{Error, Result};

/// Exact rational number (reduced, positive denominator).
pub type Rational = BigRational;

pub fn rational(num: u128, den: u128) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn center(g: &TableGroup) -> SubgroupHandle {
    let gens = g.generators();
    let elems: Vec<usize> = (0..g.order()).filter(|&x| gens.iter().all(|&y| g.commute(x, y))).collect();
    g.subgroup_from_elements(&elems).expect("center is a subgroup")
}

pub fn centralizer(g: &TableGroup, x: usize) -> SubgroupHandle {
    let elems: Vec<usize> = (0..g.order()).filter(|&y| g.commute(x, y)).collect();
    g.subgroup_from_elements(&elems).expect("centralizer is a subgroup")
}

/// Centralizer of a subgroup.
pub fn centralizer_of(g: &TableGroup, h: &SubgroupHandle) -> SubgroupHandle {
    let elems: Vec<usize> = (0..g.order()).filter(|&y| h.gens().iter().all(|&x| g.commute(x, y))).collect();
    g.subgroup_from_elements(&elems).expect("centralizer is a subgroup")
}

pub fn normalizer(g: &TableGroup, h: &SubgroupHandle) -> SubgroupHandle {
    let elems: Vec<usize> = (0..g.order()).filter(|&y| h.gens().iter().all(|&x| h.contains(g.conj(x, y)))).collect();
    g.subgroup_from_elements(&elems).expect("normalizer is a subgroup")
}

/// `γ_1 = G, γ_{i+1} = [γ_i, G]`, down to the first repeat.
pub fn lower_central_series(g: &TableGroup) -> Vec<SubgroupHandle> {
    let whole = g.whole();
    let mut s = vec![whole.clone()];
    loop {
        let next = g.commutator_subgroup(s.last().expect("nonempty"), &whole);
        if next.order() == s.last().expect("nonempty").order() {
            return s;
        }
        s.push(next);
    }
}

/// `Z_0 = 1, Z_{i+1}/Z_i = Z(G/Z_i)`, up to the first repeat.
pub fn upper_central_series(g: &TableGroup) -> Vec<SubgroupHandle> {
    let gens = g.generators();
    let mut s = vec![g.trivial_subgroup()];
    loop {
        let z = s.last().expect("nonempty");
        let elems: Vec<usize> = (0..g.order()).filter(|&x| gens.iter().all(|&y| z.contains(g.comm(x, y)))).collect();
        let next = g.subgroup_from_elements(&elems).expect("upper central term is a subgroup");
        if next.order() == z.order() {
            return s;
        }
        s.push(next);
    }
}

/// Nilpotency class, `None` for non-nilpotent groups. The trivial group has
/// class 0.
pub fn nilpotency_class(g: &TableGroup) -> Option<usize> {
    let s = lower_central_series(g);
    s.last().expect("nonempty").is_trivial().then(|| s.len() - 1)
}

#[derive(Clone, Debug)]
pub struct Series {
    pub lower: Vec<SubgroupHandle>,
    pub upper: Vec<SubgroupHandle>,
    pub derived: SubgroupHandle,
    pub class: Option<usize>,
}

pub fn series(g: &TableGroup) -> Series {
    let lower = lower_central_series(g);
    let class = lower.last().expect("nonempty").is_trivial().then(|| lower.len() - 1);
    Series { upper: upper_central_series(g), derived: g.derived_subgroup(), class, lower }
}

/// `G^p [G, G]` for a `p`-group.
pub fn frattini_power(g: &TableGroup) -> Result<SubgroupHandle> {
    if g.order() == 1 {
        return Ok(g.trivial_subgroup());
    }
    let (p, _) = prime_power(g.order() as u128)
        .ok_or_else(|| Error::InvalidArgument("power form of the Frattini subgroup needs a p-group".into()))?;
    let d = g.derived_subgroup();
    let mut gens = d.gens().to_vec();
    gens.extend(g.generators().iter().map(|&x| g.pow(x, p as i64)));
    Ok(g.subgroup(&gens))
}

/// Intersection of all maximal subgroups, from the subgroup lattice.
pub fn frattini_intersection(g: &TableGroup, cap: usize) -> Result<SubgroupHandle> {
    let lat = subgroup_classes(g, cap)?;
    let mut mask = vec![true; g.order()];
    for m in lat.maximal(g) {
        for conj in lat.class_members(g, m) {
            let cm = conj.mask();
            for (a, b) in mask.iter_mut().zip(cm) {
                *a &= b;
            }
        }
    }
    let elems: Vec<usize> = (0..g.order()).filter(|&x| mask[x]).collect();
    g.subgroup_from_elements(&elems)
}

/// Frattini subgroup; for `p`-groups within the lattice cap both forms are
/// computed and must agree.
pub fn frattini(g: &TableGroup) -> Result<SubgroupHandle> {
    match frattini_power(g) {
        Ok(f) => {
            if g.order() <= 64 {
                let i = frattini_intersection(g, 64)?;
                if i != f && i.elements() != f.elements() {
                    return Err(Error::Internal("Frattini subgroup forms disagree".into()));
                }
            }
            Ok(f)
        }
        Err(_) => frattini_intersection(g, DEFAULT_LATTICE_CAP),
    }
}

/// `log_p |G : Φ(G)|` for a `p`-group.
pub fn frattini_rank(g: &TableGroup) -> Result<usize> {
    if g.order() == 1 {
        return Ok(0);
    }
    let (p, _) = prime_power(g.order() as u128).ok_or_else(|| Error::InvalidArgument("not a p-group".into()))?;
    let f = frattini_power(g)?;
    let idx = (g.order() / f.order()) as u64;
    Ok(factorize(idx).first().map_or(0, |&(q, e)| {
        debug_assert_eq!(q, p);
        e as usize
    }))
}

// -------------------------------------------------------------------------
// census

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugacyCensus {
    pub k: u128,
    /// class size → number of classes
    pub sizes: BTreeMap<u128, u128>,
    /// one representative per class (table groups only)
    pub representatives: Vec<usize>,
}

pub fn census_table(g: &TableGroup) -> ConjugacyCensus {
    let n = g.order();
    let gens = g.generators();
    let mut seen = vec![false; n];
    let mut reps = Vec::new();
    let mut sizes = BTreeMap::new();
    let mut stack = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        reps.push(x);
        seen[x] = true;
        stack.push(x);
        let mut size = 0u128;
        while let Some(y) = stack.pop() {
            size += 1;
            for &s in &gens {
                let z = g.conj(y, s);
                if !seen[z] {
                    seen[z] = true;
                    stack.push(z);
                }
            }
        }
        *sizes.entry(size).or_insert(0) += 1;
    }
    ConjugacyCensus { k: reps.len() as u128, sizes, representatives: reps }
}

pub fn census_class2(c: &Class2Group) -> ConjugacyCensus {
    let p = c.p() as u128;
    let pw = p.pow(c.r() as u32);
    let mut sizes = BTreeMap::new();
    let mut k = 0u128;
    for v in Class2Group::vectors(c.p(), c.d()) {
        let b = c.breadth(&v) as u32;
        // |W|/p^b classes of size p^b
        let classes = pw / p.pow(b);
        k += classes;
        *sizes.entry(p.pow(b)).or_insert(0) += classes;
    }
    ConjugacyCensus { k, sizes, representatives: Vec::new() }
}

pub fn census(g: &Group) -> ConjugacyCensus {
    match g {
        Group::Table(t) => census_table(t),
        Group::Class2(c) => census_class2(c),
    }
}

pub fn cp(g: &Group) -> Rational {
    rational(census(g).k, g.order())
}

/// `|{(x, y) : xy = yx}|` by exhaustive count.
pub fn commuting_pairs(g: &TableGroup) -> u128 {
    let n = g.order();
    let mut count = 0u128;
    for x in 0..n {
        for y in 0..n {
            if g.commute(x, y) {
                count += 1;
            }
        }
    }
    count
}

// -------------------------------------------------------------------------
// stem, breadth, fingerprint

pub fn is_stem(g: &TableGroup) -> bool {
    center(g).is_subgroup_of(&g.derived_subgroup())
}

pub fn is_stem_class2(c: &Class2Group) -> bool {
    c.radical().is_empty()
}

/// Subgroup generated by the elements `x` with `|G : C_G(x)| ≤ p`, where
/// `p` is the smallest prime divisor of `|G|`.
pub fn minimal_breadth_subgroup(g: &TableGroup) -> SubgroupHandle {
    if g.order() == 1 {
        return g.trivial_subgroup();
    }
    let p = factorize(g.order() as u64)[0].0 as usize;
    let n = g.order();
    let gens: Vec<usize> = (0..n)
        .filter(|&x| {
            let c = (0..n).filter(|&y| g.commute(x, y)).count();
            n / c <= p
        })
        .collect();
    g.subgroup(&gens)
}

/// Structural version for class-2 groups: `span{v : breadth(v) ≤ 1} × W`.
/// Returns the span basis and whether the subgroup is abelian.
pub fn minimal_breadth_class2(c: &Class2Group) -> (Vec<Vec<u64>>, bool) {
    let p = c.p();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for v in Class2Group::vectors(p, c.d()) {
        if c.breadth(&v) <= 1 {
            let mut trial = rows.clone();
            trial.push(v.clone());
            if fp_rank(&trial, p) > rows.len() {
                rows.push(v);
            }
        }
    }
    let abelian = rows.iter().all(|a| rows.iter().all(|b| c.form_on(a, b).iter().all(|&x| x == 0)));
    (rows, abelian)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub central_quotient_order: u128,
    /// `None` when `[G, G]` is not abelian
    pub derived_type: Option<AbelianType>,
    pub class: Option<usize>,
    pub cp: (String, String),
    pub central_quotient_class_sizes: BTreeMap<u128, u128>,
}

pub fn fingerprint(g: &TableGroup) -> Result<Fingerprint> {
    let z = center(g);
    let q = g.quotient(&z)?;
    let d = g.derived_subgroup();
    let c = cp(&Group::Table(g.clone()));
    Ok(Fingerprint {
        central_quotient_order: q.order() as u128,
        derived_type: g.abelian_type_of(&d).ok(),
        class: nilpotency_class(g),
        cp: (c.numer().to_string(), c.denom().to_string()),
        central_quotient_class_sizes: census_table(&q).sizes,
    })
}

pub fn fingerprint_class2(c: &Class2Group) -> Fingerprint {
    let p = c.p() as u128;
    let zq = p.pow((c.d() - c.radical().len()) as u32);
    let cpv = cp(&Group::Class2(c.clone()));
    let mut sizes = BTreeMap::new();
    sizes.insert(1, zq);
    Fingerprint {
        central_quotient_order: zq,
        derived_type: Some(AbelianType(vec![c.p(); c.r()])),
        class: Some(c.class()),
        cp: (cpv.numer().to_string(), cpv.denom().to_string()),
        central_quotient_class_sizes: sizes,
    }
}

/// Multiset of element orders (order statistics).
pub fn order_statistics(g: &TableGroup) -> BTreeMap<u64, usize> {
    let mut m = BTreeMap::new();
    for x in 0..g.order() {
        *m.entry(g.element_order(x)).or_insert(0) += 1;
    }
    m
}

// -------------------------------------------------------------------------
// maximal and minimal normal subgroups

/// Maximal subgroups of a `p`-group: preimages of the hyperplanes of
/// `G/Φ(G)`.
pub fn maximal_subgroups(g: &TableGroup) -> Result<Vec<SubgroupHandle>> {
    if g.order() == 1 {
        return Ok(Vec::new());
    }
    let (p, _) = prime_power(g.order() as u128).ok_or_else(|| Error::InvalidArgument("not a p-group".into()))?;
    let phi = frattini_power(g)?;
    // basis of G/Φ from the generators
    let mut basis = Vec::new();
    let mut cur = phi.clone();
    for x in g.generators() {
        if !cur.contains(x) {
            basis.push(x);
            let mut gens = cur.gens().to_vec();
            gens.push(x);
            cur = g.subgroup(&gens);
        }
    }
    let k = basis.len();
    // coordinates of each element of G/Φ
    let (qg, label) = g.quotient_map(&phi)?;
    let mut coord: Vec<Option<Vec<u64>>> = vec![None; qg.order()];
    for v in Class2Group::vectors(p, k) {
        let mut x = g.identity();
        for (i, &e) in v.iter().enumerate() {
            x = g.mul(x, g.pow(basis[i], e as i64));
        }
        coord[label[x]] = Some(v);
    }
    let mut out = Vec::new();
    for f in Class2Group::vectors(p, k) {
        // normalized functionals: first nonzero coordinate is 1
        match f.iter().find(|&&a| a != 0) {
            Some(&1) => {}
            _ => continue,
        }
        let elems: Vec<usize> = (0..g.order())
            .filter(|&x| {
                let c = coord[label[x]].as_ref().expect("covered");
                c.iter().zip(&f).map(|(a, b)| a * b).sum::<u64>() % p == 0
            })
            .collect();
        out.push(g.subgroup_from_elements(&elems)?);
    }
    Ok(out)
}

/// Minimal normal subgroups: the inclusion-minimal normal closures of
/// elements of prime order.
pub fn minimal_normal_subgroups(g: &TableGroup) -> Vec<SubgroupHandle> {
    let mut closures: Vec<SubgroupHandle> = Vec::new();
    let mut covered = vec![false; g.order()];
    for x in 0..g.order() {
        if x == g.identity() || covered[x] {
            continue;
        }
        let o = g.element_order(x);
        if factorize(o).len() != 1 || factorize(o)[0].1 != 1 {
            continue;
        }
        let n = g.normal_closure(&[x]);
        for &y in n.elements() {
            if n.order() == g.normal_closure(&[y]).order() {
                covered[y] = true;
            }
        }
        if !closures.contains(&n) {
            closures.push(n);
        }
    }
    let minimal: Vec<SubgroupHandle> = closures
        .iter()
        .filter(|n| !closures.iter().any(|m| m.order() < n.order() && m.is_subgroup_of(n)))
        .cloned()
        .collect();
    let mut out: Vec<SubgroupHandle> = Vec::new();
    for m in minimal {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

/// All normal subgroups (lattice based).
pub fn normal_subgroups(g: &TableGroup, cap: usize) -> Result<Vec<SubgroupHandle>> {
    let lat = subgroup_classes(g, cap)?;
    Ok(lat.classes.iter().filter(|c| c.class_size == 1).map(|c| c.rep.clone()).collect())
}

// -------------------------------------------------------------------------
// subgroup lattice

pub const DEFAULT_LATTICE_CAP: usize = 256;

#[derive(Clone, Debug)]
pub struct SubgroupClass {
    pub rep: SubgroupHandle,
    pub class_size: usize,
}

/// Conjugacy classes of subgroups, in order of increasing subgroup order.
#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    pub classes: Vec<SubgroupClass>,
}

impl SubgroupLattice {
    /// Class representatives of the maximal subgroups.
    pub fn maximal(&self, g: &TableGroup) -> Vec<&SubgroupHandle> {
        let n = g.order();
        let proper: Vec<&SubgroupClass> = self.classes.iter().filter(|c| c.rep.order() < n).collect();
        proper
            .iter()
            .filter(|c| {
                !proper.iter().any(|d| {
                    d.rep.order() > c.rep.order()
                        && d.rep.order() % c.rep.order() == 0
                        && contains_conjugate(g, &d.rep, &c.rep)
                })
            })
            .map(|c| &c.rep)
            .collect()
    }

    /// All conjugates of a class representative.
    pub fn class_members(&self, g: &TableGroup, h: &SubgroupHandle) -> Vec<SubgroupHandle> {
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut out = Vec::new();
        for y in 0..g.order() {
            let mut e: Vec<usize> = h.elements().iter().map(|&x| g.conj(x, y)).collect();
            e.sort_unstable();
            if seen.insert(e.clone()) {
                out.push(g.subgroup_from_elements(&e).expect("conjugate subgroup"));
            }
        }
        out
    }
}

/// Whether some conjugate of `small` lies in `big`.
fn contains_conjugate(g: &TableGroup, big: &SubgroupHandle, small: &SubgroupHandle) -> bool {
    (0..g.order()).any(|y| small.gens().iter().all(|&h| big.contains(g.conj(h, y))))
}

type Bits = Vec<u64>;

fn to_bits(n: usize, elems: &[usize]) -> Bits {
    let mut b = vec![0u64; n.div_ceil(64)];
    for &x in elems {
        b[x / 64] |= 1 << (x % 64);
    }
    b
}

/// Enumerate subgroups of a solvable group up to conjugacy by cyclic
/// extension: every nontrivial subgroup `K` has a normal subgroup `H` of
/// prime index, so `K = ⟨H, x⟩` with `x ∈ N_G(H)`.
pub fn subgroup_classes(g: &TableGroup, cap: usize) -> Result<SubgroupLattice> {
    let n = g.order();
    if n > cap {
        return Err(Error::TableCap { order: n as u128, cap });
    }
    let mut seen: HashSet<Bits> = HashSet::new();
    let mut classes: Vec<SubgroupClass> = Vec::new();
    let triv = g.trivial_subgroup();
    seen.insert(to_bits(n, triv.elements()));
    classes.push(SubgroupClass { rep: triv, class_size: 1 });
    let mut i = 0;
    while i < classes.len() {
        let h = classes[i].rep.clone();
        i += 1;
        let norm = normalizer(g, &h);
        let mut covered = h.mask();
        for &x in norm.elements() {
            if covered[x] {
                continue;
            }
            let mut gens = h.gens().to_vec();
            gens.push(x);
            let k = g.subgroup(&gens);
            for &y in k.elements() {
                covered[y] = true;
            }
            let idx = k.order() / h.order();
            if factorize(idx as u64).iter().map(|f| f.1).sum::<u32>() != 1 {
                continue;
            }
            let bits = to_bits(n, k.elements());
            if seen.contains(&bits) {
                continue;
            }
            // register the whole conjugacy class
            let mut size = 0;
            for y in 0..n {
                let e: Vec<usize> = k.elements().iter().map(|&z| g.conj(z, y)).collect();
                if seen.insert(to_bits(n, &e)) {
                    size += 1;
                }
            }
            classes.push(SubgroupClass { rep: k, class_size: size });
        }
    }
    classes.sort_by_key(|c| (c.rep.order(), c.rep.elements().to_vec()));
    Ok(SubgroupLattice { classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupcore::direct_product;
    use crate::presentations::parse_pcp;

    fn d4() -> TableGroup {
        parse_pcp("gens 3\norder g1 = 2\norder g2 = 2\norder g3 = 2\npow g2 = g3\nconj g2 g1 = g2 g3\n")
            .unwrap()
            .enumerate_group(64)
            .unwrap()
    }

    fn s3() -> TableGroup {
        parse_pcp("gens 2\norder g1 = 2\norder g2 = 3\nconj g2 g1 = g2^2\n").unwrap().enumerate_group(64).unwrap()
    }

    #[test]
    fn centers_and_classes() {
        let g = d4();
        assert_eq!(center(&g).order(), 2);
        let c = census_table(&g);
        assert_eq!(c.k, 5);
        assert_eq!(commuting_pairs(&g), 5 * 8);
        assert_eq!(cp(&Group::Table(g.clone())), rational(5, 8));
        assert_eq!(nilpotency_class(&g), Some(2));
        let ab = TableGroup::cyclic(6).unwrap();
        assert_eq!(center(&ab).order(), 6);
        assert_eq!(nilpotency_class(&ab), Some(1));
        assert_eq!(nilpotency_class(&s3()), None);
        assert_eq!(census_table(&s3()).k, 3);
    }

    #[test]
    fn frattini_forms_agree() {
        let g = d4();
        let f = frattini(&g).unwrap();
        assert_eq!(f.order(), 2);
        assert_eq!(frattini_rank(&g).unwrap(), 2);
        let e = direct_product(&TableGroup::cyclic(2).unwrap(), &TableGroup::cyclic(2).unwrap(), 64).unwrap();
        assert!(frattini(&e).unwrap().is_trivial());
        assert_eq!(frattini_intersection(&s3(), 64).unwrap().order(), 1);
    }

    #[test]
    fn lattice_counts() {
        // D4 has 10 subgroups in 8 classes
        let lat = subgroup_classes(&d4(), 256).unwrap();
        assert_eq!(lat.classes.len(), 8);
        assert_eq!(lat.classes.iter().map(|c| c.class_size).sum::<usize>(), 10);
        // S3: 1, three C2 (one class), C3, S3
        let lat = subgroup_classes(&s3(), 256).unwrap();
        assert_eq!(lat.classes.len(), 4);
        assert_eq!(normal_subgroups(&d4(), 256).unwrap().len(), 6);
    }

    #[test]
    fn maximal_and_minimal_normal() {
        let e = direct_product(&TableGroup::cyclic(3).unwrap(), &TableGroup::cyclic(3).unwrap(), 64).unwrap();
        assert_eq!(maximal_subgroups(&e).unwrap().len(), 4);
        assert_eq!(maximal_subgroups(&d4()).unwrap().len(), 3);
        let q8 = parse_pcp(
            "gens 3\norder g1 = 2\norder g2 = 2\norder g3 = 2\npow g1 = g3\npow g2 = g3\nconj g2 g1 = g2 g3\n",
        )
        .unwrap()
        .enumerate_group(64)
        .unwrap();
        let mn = minimal_normal_subgroups(&q8);
        assert_eq!(mn.len(), 1);
        assert_eq!(mn[0].order(), 2);
        assert_eq!(minimal_normal_subgroups(&e).len(), 4);
    }

    #[test]
    fn stem_and_breadth() {
        assert!(is_stem(&d4()));
        assert!(!is_stem(&TableGroup::cyclic(2).unwrap()));
        let ab = TableGroup::cyclic(4).unwrap();
        assert_eq!(minimal_breadth_subgroup(&ab).order(), 4);
        assert_eq!(minimal_breadth_subgroup(&d4()).order(), 8);
    }

    #[test]
    fn fingerprints() {
        let a = fingerprint(&TableGroup::cyclic(4).unwrap()).unwrap();
        let b =
            fingerprint(&direct_product(&TableGroup::cyclic(2).unwrap(), &TableGroup::cyclic(2).unwrap(), 16).unwrap())
                .unwrap();
        assert_eq!(a, b);
        let g = fingerprint(&d4()).unwrap();
        let h = fingerprint(&direct_product(&d4(), &TableGroup::cyclic(2).unwrap(), 64).unwrap()).unwrap();
        assert_eq!(g, h);
    }
}
