//! Finite groups: explicit multiplication tables and class-2 groups given
//! by an alternating commutator form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::enumeration::{fp_nullspace, fp_rank, fp_rref};
use crate::presentations::{Element, PcPresentation, Word, DEFAULT_TABLE_CAP};
use crate::{Error, Result};

// -------------------------------------------------------------------------
// number theory helpers

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// If `n` is a power of a prime `p`, return `(p, k)` with `n = p^k`.
pub fn prime_power(n: u128) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let f = factorize(u64::try_from(n).ok()?);
    (f.len() == 1).then(|| f[0])
}

// -------------------------------------------------------------------------
// abelian types

/// Invariant factors `d_1 | d_2 | …` of a finite abelian group, each > 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianType(pub Vec<u64>);

impl AbelianType {
    pub fn trivial() -> Self {
        AbelianType(Vec::new())
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_orders(&[n])
    }

    /// Normalize any list of cyclic orders `Z/a ⊕ Z/b ⊕ …` into invariant
    /// factors.
    pub fn from_orders(orders: &[u64]) -> Self {
        let mut parts: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &a in orders {
            for (p, e) in factorize(a) {
                parts.entry(p).or_default().push(p.pow(e));
            }
        }
        Self::from_primary(parts)
    }

    fn from_primary(mut parts: BTreeMap<u64, Vec<u64>>) -> Self {
        let len = parts.values().map(|v| v.len()).max().unwrap_or(0);
        let mut inv = vec![1u64; len];
        for v in parts.values_mut() {
            v.sort_unstable();
            // align largest powers with the last factors
            let off = len - v.len();
            for (i, &q) in v.iter().enumerate() {
                inv[off + i] *= q;
            }
        }
        AbelianType(inv.into_iter().filter(|&d| d > 1).collect())
    }

    /// Type of a finite abelian group from the multiset of its element
    /// orders.
    pub fn from_element_orders(orders: &[u64]) -> Self {
        let n = orders.len() as u64;
        let mut parts: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for (p, e) in factorize(n) {
            // omega[k] = #{x : x^{p^k} = 1}
            let mut omega = Vec::with_capacity(e as usize + 1);
            for k in 0..=e {
                let pk = p.pow(k);
                omega.push(orders.iter().filter(|&&o| pk % p_part(o, p) == 0).count() as u64);
            }
            // number of cyclic factors of order ≥ p^k is log_p(omega[k]/omega[k-1])
            let mut at_least = Vec::new();
            for k in 1..=e as usize {
                let ratio = omega[k] / omega[k - 1];
                at_least.push(ilog(ratio, p));
            }
            let mut v = Vec::new();
            for k in 1..=at_least.len() {
                let here = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
                for _ in 0..here {
                    v.push(p.pow(k as u32));
                }
            }
            parts.insert(p, v);
        }
        Self::from_primary(parts)
    }

    pub fn order(&self) -> u128 {
        self.0.iter().map(|&d| d as u128).product()
    }

    pub fn exponent(&self) -> u64 {
        self.0.last().copied().unwrap_or(1)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    /// Type of the direct sum.
    pub fn merge(&self, other: &AbelianType) -> AbelianType {
        let mut all = self.0.clone();
        all.extend_from_slice(&other.0);
        Self::from_orders(&all)
    }
}

fn p_part(mut o: u64, p: u64) -> u64 {
    let mut q = 1;
    while o % p == 0 {
        o /= p;
        q *= p;
    }
    q
}

fn ilog(mut x: u64, p: u64) -> u32 {
    let mut k = 0;
    while x > 1 {
        x /= p;
        k += 1;
    }
    k
}

impl fmt::Display for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// -------------------------------------------------------------------------
// subgroups

/// A subgroup of a table group, stored as a sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupHandle {
    parent_order: usize,
    elements: Vec<usize>,
    gens: Vec<usize>,
}

impl SubgroupHandle {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn parent_order(&self) -> usize {
        self.parent_order
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.elements.len() == self.parent_order
    }

    pub fn is_subgroup_of(&self, other: &SubgroupHandle) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn index_in_parent(&self) -> usize {
        self.parent_order / self.elements.len()
    }

    /// Membership mask over the parent's elements.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.parent_order];
        for &x in &self.elements {
            m[x] = true;
        }
        m
    }
}

// -------------------------------------------------------------------------
// table groups

#[derive(Debug)]
struct PcOrigin {
    pc: PcPresentation,
    elements: Vec<Element>,
}

/// Finite group given by its multiplication table.
#[derive(Clone, Debug)]
pub struct TableGroup {
    name: String,
    n: usize,
    table: Arc<Vec<u16>>,
    inv: Vec<u16>,
    identity: usize,
    gens: Option<Vec<usize>>,
    origin: Option<Arc<PcOrigin>>,
}

impl TableGroup {
    /// Assemble from a row-major table, validating the Latin-square property
    /// and finding the identity and inverses.
    pub fn from_parts(
        n: usize,
        table: Vec<u16>,
        gens: Option<Vec<usize>>,
        origin: Option<(PcPresentation, Vec<Element>)>,
    ) -> Result<TableGroup> {
        if n == 0 || table.len() != n * n {
            return Err(Error::InvalidArgument("table size mismatch".into()));
        }
        if n > u16::MAX as usize + 1 {
            return Err(Error::TableCap { order: n as u128, cap: u16::MAX as usize + 1 });
        }
        let mut seen = vec![0u32; n];
        let mut stamp = 0u32;
        for x in 0..n {
            stamp += 1;
            for y in 0..n {
                let z = table[x * n + y] as usize;
                if z >= n || seen[z] == stamp {
                    return Err(Error::InvalidArgument("multiplication table is not a Latin square".into()));
                }
                seen[z] = stamp;
            }
        }
        for y in 0..n {
            stamp += 1;
            for x in 0..n {
                let z = table[x * n + y] as usize;
                if seen[z] == stamp {
                    return Err(Error::InvalidArgument("multiplication table is not a Latin square".into()));
                }
                seen[z] = stamp;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] as usize == x && table[x * n + e] as usize == x))
            .ok_or_else(|| Error::InvalidArgument("no identity element".into()))?;
        let mut inv = vec![0u16; n];
        for x in 0..n {
            let y =
                (0..n).find(|&y| table[x * n + y] as usize == identity).expect("Latin square row contains identity");
            if table[y * n + x] as usize != identity {
                return Err(Error::InvalidArgument("left and right inverses differ".into()));
            }
            inv[x] = y as u16;
        }
        let origin = origin.map(|(pc, elements)| Arc::new(PcOrigin { pc, elements }));
        let name = origin.as_ref().map_or_else(|| format!("table{n}"), |o| o.pc.name().to_string());
        Ok(TableGroup { name, n, table: Arc::new(table), inv, identity, gens, origin })
    }

    /// Build from nested rows (tests and small examples).
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<TableGroup> {
        let n = rows.len();
        let mut t = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::InvalidArgument("ragged table".into()));
            }
            t.extend(r.iter().map(|&x| x as u16));
        }
        Self::from_parts(n, t, None, None)
    }

    pub fn cyclic(n: usize) -> Result<TableGroup> {
        let mut t = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                t.push(((x + y) % n) as u16);
            }
        }
        let gens = if n > 1 { vec![1] } else { vec![] };
        let mut g = Self::from_parts(n, t, Some(gens), None)?;
        g.name = format!("C{n}");
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inv[x] as usize
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn pow(&self, x: usize, k: i64) -> usize {
        let b = if k < 0 { self.inv(x) } else { x };
        let mut acc = self.identity;
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(acc, b);
        }
        acc
    }

    /// `x^y = y⁻¹ x y`
    #[inline]
    pub fn conj(&self, x: usize, y: usize) -> usize {
        self.mul(self.mul(self.inv(y), x), y)
    }

    /// `[x, y] = x⁻¹ y⁻¹ x y`
    #[inline]
    pub fn comm(&self, x: usize, y: usize) -> usize {
        self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))
    }

    #[inline]
    pub fn commute(&self, x: usize, y: usize) -> bool {
        self.mul(x, y) == self.mul(y, x)
    }

    pub fn element_order(&self, x: usize) -> u64 {
        let mut k = 1;
        let mut y = x;
        while y != self.identity {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let g = self.generators();
        g.iter().all(|&a| g.iter().all(|&b| self.commute(a, b)))
    }

    /// The polycyclic presentation this table was enumerated from, if any.
    pub fn pc_origin(&self) -> Option<&PcPresentation> {
        self.origin.as_ref().map(|o| &o.pc)
    }

    pub fn element_label(&self, x: usize) -> String {
        match &self.origin {
            Some(o) => {
                let s = o.elements[x].to_string();
                s
            }
            None => format!("#{x}"),
        }
    }

    /// Parse an element: a pc word when the table came from a presentation,
    /// `#k` for a raw index otherwise.
    pub fn parse_element(&self, text: &str) -> Result<usize> {
        let t = text.trim();
        if let Some(k) = t.strip_prefix('#') {
            let k: usize = k.parse().map_err(|_| Error::InvalidArgument(format!("bad element `{t}`")))?;
            return if k < self.n { Ok(k) } else { Err(Error::InvalidArgument(format!("element `{t}` out of range"))) };
        }
        let o = self
            .origin
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("group has no generator names; use #k, got `{t}`")))?;
        let w = Word::parse(t, o.pc.num_gens())?;
        let e = o.pc.collect(&w)?;
        Ok(o.pc.element_index(&e))
    }

    /// Generators: the stored list, or a greedy generating set.
    pub fn generators(&self) -> Vec<usize> {
        if let Some(g) = &self.gens {
            return g.clone();
        }
        let mut gens = Vec::new();
        let mut cur = vec![false; self.n];
        cur[self.identity] = true;
        let mut count = 1;
        for x in 0..self.n {
            if !cur[x] {
                gens.push(x);
                let h = self.subgroup(&gens);
                for &y in h.elements() {
                    cur[y] = true;
                }
                count = h.order();
            }
            if count == self.n {
                break;
            }
        }
        gens
    }

    // ---------------------------------------------------------------------
    // subgroups

    fn handle_from_mask(&self, mask: &[bool], gens: Vec<usize>) -> SubgroupHandle {
        let elements = (0..self.n).filter(|&x| mask[x]).collect();
        SubgroupHandle { parent_order: self.n, elements, gens }
    }

    /// Closure of `gens`.
    pub fn subgroup(&self, gens: &[usize]) -> SubgroupHandle {
        let mut mask = vec![false; self.n];
        mask[self.identity] = true;
        let mut list = vec![self.identity];
        let gens: Vec<usize> = gens.iter().copied().filter(|&g| g != self.identity).collect();
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            i += 1;
            for &g in &gens {
                let y = self.mul(x, g);
                if !mask[y] {
                    mask[y] = true;
                    list.push(y);
                }
            }
        }
        self.handle_from_mask(&mask, gens)
    }

    pub fn whole(&self) -> SubgroupHandle {
        SubgroupHandle { parent_order: self.n, elements: (0..self.n).collect(), gens: self.generators() }
    }

    pub fn trivial_subgroup(&self) -> SubgroupHandle {
        self.subgroup(&[])
    }

    pub fn join(&self, a: &SubgroupHandle, b: &SubgroupHandle) -> SubgroupHandle {
        let mut g = a.gens.clone();
        g.extend_from_slice(&b.gens);
        self.subgroup(&g)
    }

    pub fn intersection(&self, a: &SubgroupHandle, b: &SubgroupHandle) -> SubgroupHandle {
        let mb = b.mask();
        let mut mask = vec![false; self.n];
        for &x in a.elements() {
            if mb[x] {
                mask[x] = true;
            }
        }
        let gens = self.generators_of_mask(&mask);
        self.handle_from_mask(&mask, gens)
    }

    /// Greedy generating set of a subgroup given by its mask.
    fn generators_of_mask(&self, mask: &[bool]) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut cur = vec![false; self.n];
        cur[self.identity] = true;
        for x in 0..self.n {
            if mask[x] && !cur[x] {
                gens.push(x);
                let h = self.subgroup(&gens);
                for &y in h.elements() {
                    cur[y] = true;
                }
            }
        }
        gens
    }

    /// Subgroup with the given elements (must be closed).
    pub fn subgroup_from_elements(&self, elems: &[usize]) -> Result<SubgroupHandle> {
        let mut mask = vec![false; self.n];
        for &x in elems {
            mask[x] = true;
        }
        let gens = self.generators_of_mask(&mask);
        let h = self.handle_from_mask(&mask, gens);
        if h.order() != self.subgroup(&h.gens).order() {
            return Err(Error::InvalidArgument("element set is not a subgroup".into()));
        }
        Ok(h)
    }

    pub fn is_normal(&self, h: &SubgroupHandle) -> bool {
        let gens = self.generators();
        h.gens.iter().all(|&x| gens.iter().all(|&g| h.contains(self.conj(x, g))))
    }

    /// Smallest normal subgroup containing `gens`.
    pub fn normal_closure(&self, gens: &[usize]) -> SubgroupHandle {
        let ggens = self.generators();
        let mut h = self.subgroup(gens);
        loop {
            let mut extra = None;
            'outer: for &x in &h.gens.clone() {
                for &g in &ggens {
                    let c = self.conj(x, g);
                    if !h.contains(c) {
                        extra = Some(c);
                        break 'outer;
                    }
                }
            }
            match extra {
                Some(c) => {
                    let mut g = h.gens.clone();
                    g.push(c);
                    h = self.subgroup(&g);
                }
                None => return h,
            }
        }
    }

    /// `[A, B]` for normal subgroups `A`, `B`: normal closure of the
    /// commutators of their generators.
    pub fn commutator_subgroup(&self, a: &SubgroupHandle, b: &SubgroupHandle) -> SubgroupHandle {
        let mut c = Vec::new();
        for &x in a.gens() {
            for &y in b.gens() {
                let z = self.comm(x, y);
                if z != self.identity && !c.contains(&z) {
                    c.push(z);
                }
            }
        }
        self.normal_closure(&c)
    }

    pub fn derived_subgroup(&self) -> SubgroupHandle {
        let w = self.whole();
        self.commutator_subgroup(&w, &w)
    }

    /// Coset labels for a normal subgroup: `labels[x]` is the index of `xN`,
    /// cosets numbered by their smallest element.
    fn coset_labels(&self, nsub: &SubgroupHandle) -> (Vec<usize>, Vec<usize>) {
        let mut label = vec![usize::MAX; self.n];
        let mut reps = Vec::new();
        for x in 0..self.n {
            if label[x] == usize::MAX {
                let id = reps.len();
                reps.push(x);
                for &m in nsub.elements() {
                    label[self.mul(x, m)] = id;
                }
            }
        }
        (label, reps)
    }

    /// Quotient `G/N` with the projection map.
    pub fn quotient_map(&self, nsub: &SubgroupHandle) -> Result<(TableGroup, Vec<usize>)> {
        if nsub.parent_order != self.n {
            return Err(Error::InvalidArgument("subgroup belongs to another group".into()));
        }
        if !self.is_normal(nsub) {
            return Err(Error::NotNormal);
        }
        let (label, reps) = self.coset_labels(nsub);
        let q = reps.len();
        let mut t = Vec::with_capacity(q * q);
        for &a in &reps {
            for &b in &reps {
                t.push(label[self.mul(a, b)] as u16);
            }
        }
        let mut gens: Vec<usize> = Vec::new();
        for g in self.generators() {
            let l = label[g];
            if l != label[self.identity] && !gens.contains(&l) {
                gens.push(l);
            }
        }
        let mut g = TableGroup::from_parts(q, t, Some(gens), None)?;
        g.name = format!("{}/N{}", self.name, nsub.order());
        Ok((g, label))
    }

    pub fn quotient(&self, nsub: &SubgroupHandle) -> Result<TableGroup> {
        Ok(self.quotient_map(nsub)?.0)
    }

    /// The subgroup as a group in its own right, with its embedding.
    pub fn subgroup_table(&self, h: &SubgroupHandle) -> Result<(TableGroup, Vec<usize>)> {
        let elems = h.elements();
        let m = elems.len();
        let mut pos = HashMap::with_capacity(m);
        for (i, &x) in elems.iter().enumerate() {
            pos.insert(x, i);
        }
        let mut t = Vec::with_capacity(m * m);
        for &a in elems {
            for &b in elems {
                t.push(pos[&self.mul(a, b)] as u16);
            }
        }
        let gens = h.gens().iter().map(|g| pos[g]).collect();
        let mut g = TableGroup::from_parts(m, t, Some(gens), None)?;
        g.name = format!("{}<{}>", self.name, m);
        Ok((g, elems.to_vec()))
    }

    pub fn abelian_type_of(&self, h: &SubgroupHandle) -> Result<AbelianType> {
        for &a in h.gens() {
            for &b in h.gens() {
                if !self.commute(a, b) {
                    return Err(Error::NotAbelian);
                }
            }
        }
        let orders: Vec<u64> = h.elements().iter().map(|&x| self.element_order(x)).collect();
        Ok(AbelianType::from_element_orders(&orders))
    }

    pub fn abelian_type(&self) -> Result<AbelianType> {
        self.abelian_type_of(&self.whole())
    }

    // ---------------------------------------------------------------------
    // polycyclic structure

    /// A polycyclic presentation of this group together with the bijection
    /// between its normal forms (by mixed-radix index) and table elements.
    /// Uses the originating presentation when there is one, otherwise a
    /// generating sequence refining the derived series.
    pub fn pc_model(&self) -> Result<PcModel> {
        if let Some(o) = &self.origin {
            let table_of: Vec<usize> = (0..self.n).collect();
            return Ok(PcModel { pc: o.pc.clone(), table_of: table_of.clone(), pc_of: table_of });
        }
        self.derived_pc()
    }

    fn derived_pc(&self) -> Result<PcModel> {
        // derived series
        let mut series = vec![self.whole()];
        loop {
            let last = series.last().expect("nonempty");
            if last.is_trivial() {
                break;
            }
            let (sub, emb) = self.subgroup_table(last)?;
            let d = sub.derived_subgroup();
            if d.order() == last.order() {
                return Err(Error::EngineInapplicable("group is not solvable".into()));
            }
            let elems: Vec<usize> = d.elements().iter().map(|&x| emb[x]).collect();
            series.push(self.subgroup_from_elements(&elems)?);
        }
        // refine bottom-up into prime steps
        let mut pcgs_rev: Vec<usize> = Vec::new();
        let mut orders_rev: Vec<u32> = Vec::new();
        let mut cur = self.trivial_subgroup();
        for level in series.iter().rev().skip(1) {
            while cur.order() < level.order() {
                let x = *level.elements().iter().find(|&&x| !cur.contains(x)).expect("proper");
                // order of x modulo cur
                let mut m = 1u64;
                let mut y = x;
                while !cur.contains(y) {
                    y = self.mul(y, x);
                    m += 1;
                }
                let q = factorize(m)[0].0;
                let g = self.pow(x, (m / q) as i64);
                pcgs_rev.push(g);
                orders_rev.push(q as u32);
                let mut gens = cur.gens.clone();
                gens.push(g);
                cur = self.subgroup(&gens);
            }
        }
        let pcgs: Vec<usize> = pcgs_rev.iter().rev().copied().collect();
        let orders: Vec<u32> = orders_rev.iter().rev().copied().collect();
        let k = pcgs.len();
        // exponent vectors: G_i = { g_i^e h : h ∈ G_{i+1} }
        let mut exps: HashMap<usize, Vec<u32>> = HashMap::with_capacity(self.n);
        exps.insert(self.identity, vec![0; k]);
        let mut members = vec![self.identity];
        for i in (0..k).rev() {
            let base = members.clone();
            let mut p = self.identity;
            for e in 1..orders[i] {
                p = self.mul(p, pcgs[i]);
                for &h in &base {
                    let x = self.mul(p, h);
                    let mut v = exps[&h].clone();
                    v[i] = e;
                    if exps.insert(x, v).is_some() {
                        return Err(Error::Internal("pc sequence does not give unique normal forms".into()));
                    }
                    members.push(x);
                }
            }
        }
        if exps.len() != self.n {
            return Err(Error::Internal("pc sequence does not cover the group".into()));
        }
        let word_of = |x: usize| {
            let v = &exps[&x];
            Word(v.iter().enumerate().filter(|&(_, &e)| e != 0).map(|(g, &e)| (g, e as i64)).collect())
        };
        let mut power_words = Vec::with_capacity(k);
        for i in 0..k {
            power_words.push(word_of(self.pow(pcgs[i], orders[i] as i64)));
        }
        let mut conj = BTreeMap::new();
        for j in 0..k {
            for i in 0..j {
                let c = self.conj(pcgs[j], pcgs[i]);
                if c != pcgs[j] {
                    conj.insert((j, i), word_of(c));
                }
            }
        }
        let pc = PcPresentation::new(format!("{}-pc", self.name), orders, power_words, conj)?;
        let mut table_of = vec![0usize; self.n];
        let mut pc_of = vec![0usize; self.n];
        for (&x, v) in &exps {
            let idx = pc.element_index(&Element(v.clone()));
            table_of[idx] = x;
            pc_of[x] = idx;
        }
        Ok(PcModel { pc, table_of, pc_of })
    }
}

/// A pc presentation with its identification with a table group.
#[derive(Clone, Debug)]
pub struct PcModel {
    pub pc: PcPresentation,
    /// pc normal-form index → table element
    pub table_of: Vec<usize>,
    /// table element → pc normal-form index
    pub pc_of: Vec<usize>,
}

impl PcModel {
    pub fn element(&self, table_elem: usize) -> Element {
        self.pc.element_at(self.pc_of[table_elem])
    }

    pub fn table_elem(&self, e: &Element) -> usize {
        self.table_of[self.pc.element_index(e)]
    }
}

/// `G × H` as a table, elements `(g, h)` numbered `g·|H| + h`.
pub fn direct_product(g: &TableGroup, h: &TableGroup, cap: usize) -> Result<TableGroup> {
    let (a, b) = (g.order(), h.order());
    let n = a * b;
    if n > cap || n > u16::MAX as usize + 1 {
        return Err(Error::TableCap { order: n as u128, cap });
    }
    let mut t = Vec::with_capacity(n * n);
    for x in 0..n {
        let (x1, x2) = (x / b, x % b);
        for y in 0..n {
            let (y1, y2) = (y / b, y % b);
            t.push((g.mul(x1, y1) * b + h.mul(x2, y2)) as u16);
        }
    }
    let mut gens: Vec<usize> = g.generators().iter().map(|&x| x * b + h.identity()).collect();
    gens.extend(h.generators().iter().map(|&y| g.identity() * b + y));
    let mut out = TableGroup::from_parts(n, t, Some(gens), None)?;
    out.name = format!("{} x {}", g.name(), h.name());
    Ok(out)
}

// -------------------------------------------------------------------------
// class-2 groups

/// One side of a class-2 relation: an `F_p`-combination of basis wedges
/// `e_i ∧ e_j`, given as `((i, j), coefficient)`.
pub type WedgeComb = Vec<((usize, usize), i64)>;

/// `lhs = rhs` in the free alternating module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Class2Relation {
    pub lhs: WedgeComb,
    pub rhs: WedgeComb,
}

impl Class2Relation {
    pub fn equal(a: (usize, usize), b: (usize, usize)) -> Self {
        Class2Relation { lhs: vec![(a, 1)], rhs: vec![(b, 1)] }
    }

    pub fn zero(a: (usize, usize)) -> Self {
        Class2Relation { lhs: vec![(a, 1)], rhs: vec![] }
    }
}

/// Elements are pairs `(v, w)` with `v ∈ V = F_p^d` and `w ∈ W = F_p^r`;
/// `(v, w)(v', w') = (v + v', w + w' + β(v, v'))` where `β` is the strictly
/// upper triangular part of the commutator form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class2Group {
    name: String,
    p: u64,
    d: usize,
    r: usize,
    /// `c[i][j]` = `c(e_i, e_j)` in W coordinates, alternating.
    c: Vec<Vec<Vec<u64>>>,
    relations: Vec<Class2Relation>,
}

pub type Class2Element = (Vec<u64>, Vec<u64>);

pub fn generator_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{}", i + 1)
    }
}

fn pair_index(i: usize, j: usize, d: usize) -> usize {
    // position of (i, j), i < j, in lexicographic order
    i * d - i * (i + 1) / 2 + (j - i - 1)
}

/// Class-2 group on `d` generators of order `p` whose derived subgroup is the
/// free alternating module on the generators modulo `relations`.
pub fn group_from_class2(p: u64, d: usize, relations: &[Class2Relation]) -> Result<Class2Group> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let m = d * d.saturating_sub(1) / 2;
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let add = |row: &mut Vec<u64>, ((i, j), k): ((usize, usize), i64), sign: i64| -> Result<()> {
        if i >= d || j >= d {
            return Err(Error::Relations(format!("generator index out of range in {}∧{}", i + 1, j + 1)));
        }
        if i == j {
            return Ok(());
        }
        let (a, b, s) = if i < j { (i, j, sign) } else { (j, i, -sign) };
        let idx = pair_index(a, b, d);
        let v = (k * s).rem_euclid(p as i64) as u64;
        row[idx] = (row[idx] + v) % p;
        Ok(())
    };
    for rel in relations {
        let mut row = vec![0u64; m];
        for &t in &rel.lhs {
            add(&mut row, t, 1)?;
        }
        for &t in &rel.rhs {
            add(&mut row, t, -1)?;
        }
        rows.push(row);
    }
    let pivots = if rows.is_empty() { Vec::new() } else { fp_rref(&mut rows, p) };
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    let r = free.len();
    // image of each basis wedge in W (coordinates on the free columns)
    let mut image = vec![vec![0u64; r]; m];
    for (k, &f) in free.iter().enumerate() {
        image[f][k] = 1;
    }
    for (row, &pc) in pivots.iter().enumerate() {
        for (k, &f) in free.iter().enumerate() {
            image[pc][k] = (p - rows[row][f] % p) % p;
        }
    }
    let mut c = vec![vec![vec![0u64; r]; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let v = image[pair_index(i, j, d)].clone();
            c[j][i] = v.iter().map(|&x| (p - x) % p).collect();
            c[i][j] = v;
        }
    }
    Ok(Class2Group { name: format!("class2(p={p},d={d})"), p, d, r, c, relations: relations.to_vec() })
}

impl Class2Group {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Rank of `V = G/[G,G]`.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Rank of `W = [G,G]`.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn relations(&self) -> &[Class2Relation] {
        &self.relations
    }

    pub fn log_order(&self) -> usize {
        self.d + self.r
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.log_order() as u32)
    }

    pub fn class(&self) -> usize {
        if self.r > 0 {
            2
        } else if self.d > 0 {
            1
        } else {
            0
        }
    }

    /// `c(e_i, e_j)`.
    pub fn form(&self, i: usize, j: usize) -> &[u64] {
        &self.c[i][j]
    }

    /// `c(v, v')`.
    pub fn form_on(&self, v: &[u64], u: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut out = vec![0u64; self.r];
        for i in 0..self.d {
            if v[i] == 0 {
                continue;
            }
            for j in 0..self.d {
                if u[j] == 0 || i == j {
                    continue;
                }
                let s = v[i] * u[j] % p;
                for (o, &x) in out.iter_mut().zip(&self.c[i][j]) {
                    *o = (*o + s * x) % p;
                }
            }
        }
        out
    }

    fn beta(&self, v: &[u64], u: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut out = vec![0u64; self.r];
        for i in 0..self.d {
            if v[i] == 0 {
                continue;
            }
            for j in i + 1..self.d {
                if u[j] == 0 {
                    continue;
                }
                let s = v[i] * u[j] % p;
                for (o, &x) in out.iter_mut().zip(&self.c[i][j]) {
                    *o = (*o + s * x) % p;
                }
            }
        }
        out
    }

    pub fn identity(&self) -> Class2Element {
        (vec![0; self.d], vec![0; self.r])
    }

    pub fn mul(&self, x: &Class2Element, y: &Class2Element) -> Class2Element {
        let p = self.p;
        let v = x.0.iter().zip(&y.0).map(|(a, b)| (a + b) % p).collect();
        let b = self.beta(&x.0, &y.0);
        let w = x.1.iter().zip(&y.1).zip(&b).map(|((a, c), e)| (a + c + e) % p).collect();
        (v, w)
    }

    pub fn inv(&self, x: &Class2Element) -> Class2Element {
        let p = self.p;
        let v = x.0.iter().map(|&a| (p - a) % p).collect();
        let b = self.beta(&x.0, &x.0);
        let w = x.1.iter().zip(&b).map(|(&a, &e)| (2 * p - a - e) % p).collect();
        (v, w)
    }

    pub fn comm(&self, x: &Class2Element, y: &Class2Element) -> Class2Element {
        let xy = self.mul(x, y);
        let yx = self.mul(y, x);
        self.mul(&self.inv(&yx), &xy)
    }

    /// All vectors of `F_p^k` in lexicographic order.
    pub fn vectors(p: u64, k: usize) -> impl Iterator<Item = Vec<u64>> {
        let total = (p as u128).pow(k as u32);
        (0..total).map(move |mut idx| {
            let mut v = vec![0u64; k];
            for i in (0..k).rev() {
                v[i] = (idx % p as u128) as u64;
                idx /= p as u128;
            }
            v
        })
    }

    /// Rank of `u ↦ c(v, u)`, so `|G : C_G(x)| = p^rank` for `x = (v, w)`.
    pub fn breadth(&self, v: &[u64]) -> usize {
        let rows: Vec<Vec<u64>> = (0..self.d)
            .map(|j| {
                let mut e = vec![0u64; self.d];
                e[j] = 1;
                self.form_on(v, &e)
            })
            .collect();
        if self.r == 0 {
            0
        } else {
            fp_rank(&rows, self.p)
        }
    }

    /// Basis of the radical `{v : c(v, ·) = 0}`.
    pub fn radical(&self) -> Vec<Vec<u64>> {
        let mut rows = Vec::new();
        for j in 0..self.d {
            for t in 0..self.r {
                rows.push((0..self.d).map(|i| self.c[i][j][t]).collect::<Vec<u64>>());
            }
        }
        if rows.is_empty() {
            return fp_nullspace(&[vec![0; self.d]], self.d, self.p);
        }
        fp_nullspace(&rows, self.d, self.p)
    }

    /// `log_p |Z(G)|`.
    pub fn center_log(&self) -> usize {
        self.radical().len() + self.r
    }

    /// `log_p |C_G(x)|` for `x = (v, w)`.
    pub fn centralizer_log(&self, v: &[u64]) -> usize {
        self.d - self.breadth(v) + self.r
    }

    /// Number of conjugacy classes `Σ_v |W| / |c(v, V)|`.
    pub fn class_number(&self) -> u128 {
        let pw = (self.p as u128).pow(self.r as u32);
        Self::vectors(self.p, self.d).map(|v| pw / (self.p as u128).pow(self.breadth(&v) as u32)).sum()
    }

    /// Polycyclic presentation on `e_1, …, e_d, f_1, …, f_r`.
    pub fn to_pcp(&self) -> Result<PcPresentation> {
        let (d, r, p) = (self.d, self.r, self.p);
        let orders = vec![p as u32; d + r];
        let power_words = vec![Word::identity(); d + r];
        let mut conj = BTreeMap::new();
        for i in 0..d {
            for j in i + 1..d {
                // e_j^{e_i} = e_j [e_j, e_i] = e_j f^{c(e_j, e_i)}
                let mut terms = vec![(j, 1i64)];
                for (t, &x) in self.c[j][i].iter().enumerate() {
                    if x != 0 {
                        terms.push((d + t, x as i64));
                    }
                }
                if terms.len() > 1 {
                    conj.insert((j, i), Word(terms));
                }
            }
        }
        PcPresentation::new(self.name.clone(), orders, power_words, conj)
    }

    /// Normal form `e^v f^{w'}` of a class-2 element.
    pub fn to_pc_element(&self, x: &Class2Element) -> Element {
        let p = self.p;
        let corr = self.triangle(&x.0);
        let mut e: Vec<u32> = x.0.iter().map(|&a| a as u32).collect();
        e.extend(x.1.iter().zip(&corr).map(|(&w, &c)| ((w + p - c) % p) as u32));
        Element(e)
    }

    pub fn from_pc_element(&self, e: &Element) -> Class2Element {
        let p = self.p;
        let v: Vec<u64> = e.0[..self.d].iter().map(|&a| a as u64).collect();
        let corr = self.triangle(&v);
        let w = e.0[self.d..].iter().zip(&corr).map(|(&a, &c)| (a as u64 + c) % p).collect();
        (v, w)
    }

    /// `Σ_{i<j} v_i v_j c(e_i, e_j)`.
    fn triangle(&self, v: &[u64]) -> Vec<u64> {
        self.beta(v, v)
    }

    pub fn to_table(&self, cap: usize) -> Result<TableGroup> {
        let pc = self.to_pcp()?;
        Ok(pc.enumerate_group(cap)?.with_name(self.name.clone()))
    }

    /// Parse the JSON relation format.
    pub fn from_json(text: &str) -> Result<Class2Group> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Relations(format!("bad JSON: {e}")))?;
        let p = v.get("p").and_then(|x| x.as_u64()).ok_or_else(|| Error::Relations("missing `p`".into()))?;
        let d =
            v.get("rank").and_then(|x| x.as_u64()).ok_or_else(|| Error::Relations("missing `rank`".into()))? as usize;
        let empty = Vec::new();
        let rels = match v.get("relations") {
            Some(serde_json::Value::Array(a)) => a,
            None => &empty,
            Some(_) => return Err(Error::Relations("`relations` must be an array".into())),
        };
        let mut out = Vec::new();
        for r in rels {
            let pair = r
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Relations(format!("relation must be a two-element array, got {r}")))?;
            out.push(Class2Relation { lhs: parse_side(&pair[0], d)?, rhs: parse_side(&pair[1], d)? });
        }
        let mut g = group_from_class2(p, d, &out)?;
        if let Some(name) = v.get("name").and_then(|x| x.as_str()) {
            g.name = name.to_string();
        }
        Ok(g)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let side = |s: &WedgeComb| -> serde_json::Value {
            if s.is_empty() {
                return serde_json::json!(0);
            }
            if s.len() == 1 && s[0].1 == 1 {
                let ((i, j), _) = s[0];
                return serde_json::json!([generator_name(i), generator_name(j)]);
            }
            serde_json::Value::Array(
                s.iter().map(|&((i, j), k)| serde_json::json!([generator_name(i), generator_name(j), k])).collect(),
            )
        };
        serde_json::json!({
            "name": self.name,
            "p": self.p,
            "rank": self.d,
            "relations": self.relations.iter().map(|r| serde_json::json!([side(&r.lhs), side(&r.rhs)])).collect::<Vec<_>>(),
        })
    }
}

fn parse_gen_name(v: &serde_json::Value, d: usize) -> Result<usize> {
    let s = v.as_str().ok_or_else(|| Error::Relations(format!("generator name expected, got {v}")))?;
    let idx = if s.len() == 1 && s.as_bytes()[0].is_ascii_lowercase() {
        (s.as_bytes()[0] - b'a') as usize
    } else if let Some(k) = s.strip_prefix('x').or_else(|| s.strip_prefix('g')).and_then(|k| k.parse::<usize>().ok()) {
        if k == 0 {
            return Err(Error::Relations(format!("bad generator `{s}`")));
        }
        k - 1
    } else {
        return Err(Error::Relations(format!("bad generator `{s}`")));
    };
    if idx >= d {
        return Err(Error::Relations(format!("generator `{s}` out of range for rank {d}")));
    }
    Ok(idx)
}

/// `0`, `["a","b"]`, or a list of terms `["a","b",k]`.
fn parse_side(v: &serde_json::Value, d: usize) -> Result<WedgeComb> {
    match v {
        serde_json::Value::Number(n) if n.as_i64() == Some(0) => Ok(Vec::new()),
        serde_json::Value::Array(a) if a.len() == 2 && a[0].is_string() => {
            Ok(vec![((parse_gen_name(&a[0], d)?, parse_gen_name(&a[1], d)?), 1)])
        }
        serde_json::Value::Array(a) => a
            .iter()
            .map(|t| {
                let t = t
                    .as_array()
                    .filter(|t| t.len() == 3)
                    .ok_or_else(|| Error::Relations(format!("term must be [x, y, coeff], got {t}")))?;
                let k = t[2].as_i64().ok_or_else(|| Error::Relations(format!("bad coefficient {}", t[2])))?;
                Ok(((parse_gen_name(&t[0], d)?, parse_gen_name(&t[1], d)?), k))
            })
            .collect(),
        _ => Err(Error::Relations(format!("relation side must be 0, a wedge pair, or a term list; got {v}"))),
    }
}

// -------------------------------------------------------------------------
// uniform interface

/// A finite group handled by one of the two backends.
#[derive(Clone, Debug)]
pub enum Group {
    Table(TableGroup),
    Class2(Class2Group),
}

impl Group {
    pub fn name(&self) -> &str {
        match self {
            Group::Table(t) => t.name(),
            Group::Class2(c) => c.name(),
        }
    }

    pub fn order(&self) -> u128 {
        match self {
            Group::Table(t) => t.order() as u128,
            Group::Class2(c) => c.order(),
        }
    }

    pub fn as_table(&self) -> Option<&TableGroup> {
        match self {
            Group::Table(t) => Some(t),
            Group::Class2(_) => None,
        }
    }

    pub fn as_class2(&self) -> Option<&Class2Group> {
        match self {
            Group::Class2(c) => Some(c),
            Group::Table(_) => None,
        }
    }

    /// Multiplication table, enumerated if needed.
    pub fn to_table(&self, cap: usize) -> Result<TableGroup> {
        match self {
            Group::Table(t) => {
                if t.order() > cap {
                    Err(Error::TableCap { order: t.order() as u128, cap })
                } else {
                    Ok(t.clone())
                }
            }
            Group::Class2(c) => {
                if c.order() > cap as u128 {
                    return Err(Error::TableCap { order: c.order(), cap });
                }
                c.to_table(cap)
            }
        }
    }

    pub fn table_if_small(&self) -> Option<TableGroup> {
        self.to_table(DEFAULT_TABLE_CAP).ok()
    }

    /// Polycyclic presentation (no table needed for class-2 groups).
    pub fn pc_presentation(&self) -> Result<PcPresentation> {
        match self {
            Group::Table(t) => Ok(t.pc_model()?.pc),
            Group::Class2(c) => c.to_pcp(),
        }
    }
}

impl From<TableGroup> for Group {
    fn from(t: TableGroup) -> Self {
        Group::Table(t)
    }
}

impl From<Class2Group> for Group {
    fn from(c: Class2Group) -> Self {
        Group::Class2(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::parse_pcp;

    #[test]
    fn abelian_type_normalization() {
        assert_eq!(AbelianType::from_orders(&[4, 6]), AbelianType(vec![2, 12]));
        assert_eq!(AbelianType::from_orders(&[1, 1]), AbelianType::trivial());
        assert_eq!(AbelianType::from_orders(&[8, 2]), AbelianType(vec![2, 8]));
        assert_eq!(AbelianType(vec![2, 8]).to_string(), "Z/2 + Z/8");
        assert_eq!(AbelianType::trivial().to_string(), "0");
    }

    #[test]
    fn abelian_type_from_tables() {
        let c12 = TableGroup::cyclic(12).unwrap();
        assert_eq!(c12.abelian_type().unwrap(), AbelianType(vec![12]));
        let k = direct_product(&TableGroup::cyclic(2).unwrap(), &TableGroup::cyclic(2).unwrap(), 64).unwrap();
        assert_eq!(k.abelian_type().unwrap(), AbelianType(vec![2, 2]));
        let g = direct_product(&TableGroup::cyclic(4).unwrap(), &TableGroup::cyclic(6).unwrap(), 64).unwrap();
        assert_eq!(g.abelian_type().unwrap(), AbelianType(vec![2, 12]));
        assert_eq!(TableGroup::cyclic(1).unwrap().abelian_type().unwrap(), AbelianType::trivial());
    }

    #[test]
    fn nonabelian_rejected() {
        let q = parse_pcp("gens 3\norder g1 = 2\norder g2 = 2\norder g3 = 2\nconj g2 g1 = g2 g3\n").unwrap();
        let t = q.enumerate_group(64).unwrap();
        assert_eq!(t.abelian_type(), Err(Error::NotAbelian));
    }

    #[test]
    fn free_class2_on_two_involutions() {
        let g = group_from_class2(2, 2, &[]).unwrap();
        assert_eq!(g.order(), 8);
        let a = (vec![1, 0], vec![0]);
        let b = (vec![0, 1], vec![0]);
        assert_eq!(g.comm(&a, &b), (vec![0, 0], vec![1]));
        assert_eq!(g.mul(&a, &a), g.identity());
        let ab = g.mul(&a, &b);
        assert_eq!(g.mul(&ab, &ab), (vec![0, 0], vec![1]));
        assert_eq!(g.class_number(), 5);
    }

    #[test]
    fn class2_examples() {
        let g2 = group_from_class2(
            3,
            4,
            &[Class2Relation::equal((0, 1), (2, 3)), Class2Relation::zero((0, 2)), Class2Relation::zero((0, 3))],
        )
        .unwrap();
        assert_eq!(g2.order(), 3u128.pow(7));
        assert_eq!(g2.class(), 2);
        let k = group_from_class2(5, 4, &[Class2Relation::equal((0, 1), (2, 3))]).unwrap();
        assert_eq!(k.order(), 5u128.pow(9));
        assert!(matches!(group_from_class2(4, 2, &[]), Err(Error::NotPrime(4))));
    }

    #[test]
    fn class2_json_round_trip() {
        let text = r#"{"p":3,"rank":4,"relations":[[["a","b"],["c","d"]],[["a","c"],0],[["a","d"],0]]}"#;
        let g = Class2Group::from_json(text).unwrap();
        assert_eq!(g.order(), 2187);
        let h = Class2Group::from_json(&g.to_json().to_string()).unwrap();
        assert_eq!(g.form(0, 1), h.form(0, 1));
        assert!(Class2Group::from_json(r#"{"p":3,"rank":2,"relations":[[["a","z"],0]]}"#).is_err());
        let w = Class2Group::from_json(r#"{"p":5,"rank":4,"relations":[[["b","d"],[["a","c",2]]]]}"#).unwrap();
        assert_eq!(w.r(), 5);
    }

    #[test]
    fn class2_pc_agrees_with_structure() {
        let g = group_from_class2(3, 3, &[Class2Relation::zero((1, 2))]).unwrap();
        let pc = g.to_pcp().unwrap();
        assert!(pc.consistency_check().unwrap().consistent);
        let n = g.order() as usize;
        let elems: Vec<Class2Element> = (0..n).map(|i| g.from_pc_element(&pc.element_at(i))).collect();
        for x in &elems {
            assert_eq!(&g.from_pc_element(&g.to_pc_element(x)), x);
        }
        for i in (0..n).step_by(7) {
            for j in (0..n).step_by(5) {
                let z = pc.multiply(&pc.element_at(i), &pc.element_at(j)).unwrap();
                assert_eq!(g.from_pc_element(&z), g.mul(&elems[i], &elems[j]));
            }
        }
    }

    #[test]
    fn subgroup_quotient_product() {
        let c6 = TableGroup::cyclic(6).unwrap();
        let h = c6.subgroup(&[2]);
        assert_eq!(h.order(), 3);
        assert!(c6.is_normal(&h));
        let q = c6.quotient(&h).unwrap();
        assert_eq!(q.order(), 2);
        assert!(c6.subgroup(&[c6.identity()]).is_trivial());
        let p = direct_product(&c6, &q, 4096).unwrap();
        assert_eq!(p.order(), 12);
        let s3 =
            parse_pcp("gens 2\norder g1 = 2\norder g2 = 3\nconj g2 g1 = g2^2\n").unwrap().enumerate_group(64).unwrap();
        let t = s3.subgroup(&[1 * 3]);
        assert_eq!(t.order(), 2);
        assert!(!s3.is_normal(&t));
        assert_eq!(s3.quotient(&t).unwrap_err(), Error::NotNormal);
        assert_eq!(s3.derived_subgroup().order(), 3);
    }

    #[test]
    fn derived_pc_of_quotient() {
        let s3 =
            parse_pcp("gens 2\norder g1 = 2\norder g2 = 3\nconj g2 g1 = g2^2\n").unwrap().enumerate_group(64).unwrap();
        let d = direct_product(&s3, &TableGroup::cyclic(4).unwrap(), 4096).unwrap();
        let m = d.pc_model().unwrap();
        assert_eq!(m.pc.nominal_order(), 24);
        assert!(m.pc.consistency_check().unwrap().consistent);
        for x in 0..24 {
            for y in 0..24 {
                let z = m.pc.multiply(&m.element(x), &m.element(y)).unwrap();
                assert_eq!(m.table_elem(&z), d.mul(x, y));
            }
        }
    }

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(5) && !is_prime(1) && !is_prime(9));
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(prime_power(243), Some((3, 5)));
        assert_eq!(prime_power(12), None);
    }
}
