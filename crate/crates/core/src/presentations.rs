//! Finite polycyclic presentations.
//!
//! A presentation on generators `g_1, …, g_n` fixes relative orders `m_i`,
//! power relations `g_i^{m_i} = w_ii` and conjugate relations
//! `g_j^{g_i} = w_ij` for `j > i`, where every right-hand side only involves
//! generators of index greater than `i`. Elements are stored in normal form
//! `g_1^{e_1} ⋯ g_n^{e_n}` with `0 ≤ e_i < m_i`.
//!
//! Conventions: `[x, y] = x⁻¹y⁻¹xy` and `x^y = y⁻¹xy`, so the text line
//! `conj g3 g1 = g3 g4` says `[g3, g1] = g4`.
//!
//! Collection works from the left: multiplying a normal form by `g_i` moves
//! `g_i` past the tail `g_{i+1}^{e_{i+1}} ⋯` by conjugating that tail. The
//! same collector can accumulate *tails*, i.e. a vector recording how many
//! times each defining relation was applied. That is what the linear wedge
//! engine uses to build the relative covering group `F/[R,F]`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::groupcore::TableGroup;
use crate::{Error, Result};

/// Step budget for one collection call.
pub const DEFAULT_STEP_BUDGET: u64 = 100_000_000;

/// Default cap on the order of an enumerated multiplication table.
pub const DEFAULT_TABLE_CAP: usize = 4096;

/// A word in the pc generators: `(generator index, exponent)` pairs with
/// zero-based indices and nonzero exponents. Words are kept as written.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<(usize, i64)>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(i: usize) -> Self {
        Word(vec![(i, 1)])
    }

    pub fn from_terms(terms: &[(usize, i64)]) -> Self {
        Word(terms.iter().copied().filter(|&(_, e)| e != 0).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Smallest generator index occurring in the word.
    pub fn min_index(&self) -> Option<usize> {
        self.0.iter().map(|&(g, _)| g).min()
    }

    /// Parse `g3^2 g4 g5^-1` or `1` (identity). Indices are one-based in text.
    pub fn parse(text: &str, n: usize) -> Result<Word> {
        parse_word_tokens(&tokenize_line(text), 1, n)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .map(|&(g, e)| if e == 1 { format!("g{}", g + 1) } else { format!("g{}^{}", g + 1, e) })
            .collect();
        write!(f, "{}", terms.join(" "))
    }
}

/// Normal form of a group element: the exponent vector `e_1, …, e_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element(pub Vec<u32>);

impl Element {
    pub fn identity(n: usize) -> Self {
        Element(vec![0; n])
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn to_word(&self) -> Word {
        Word(self.0.iter().enumerate().filter(|&(_, &e)| e != 0).map(|(g, &e)| (g, e as i64)).collect())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_word())
    }
}

/// Receives relation applications during collection.
pub(crate) trait Tails {
    fn add(&mut self, idx: usize, k: i64);
}

impl Tails for () {
    #[inline]
    fn add(&mut self, _idx: usize, _k: i64) {}
}

impl Tails for Vec<i64> {
    #[inline]
    fn add(&mut self, idx: usize, k: i64) {
        self[idx] += k;
    }
}

struct Steps {
    used: u64,
    budget: u64,
}

impl Steps {
    fn new(budget: u64) -> Self {
        Steps { used: 0, budget }
    }

    #[inline]
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.budget {
            Err(Error::CollectionBudget(self.budget))
        } else {
            Ok(())
        }
    }
}

type SparseNf = Vec<(usize, u32)>;

/// A finite polycyclic presentation together with its compiled relations.
#[derive(Clone, Debug)]
pub struct PcPresentation {
    name: String,
    orders: Vec<u32>,
    power_words: Vec<Word>,
    conj_words: BTreeMap<(usize, usize), Word>,
    power_nf: Vec<SparseNf>,
    /// `conj_nf[j][i]` for `i < j`: normal form of `g_j^{g_i}`.
    conj_nf: Vec<Vec<SparseNf>>,
    budget: u64,
}

/// Outcome of the overlap consistency tests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub consistent: bool,
    /// `∏ m_i`; the group order when consistent.
    pub order: u128,
    pub failures: Vec<String>,
}

/// Element of the tails extension: a normal form times a central tail vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Tailed {
    pub exps: Vec<u32>,
    pub tail: Vec<i64>,
}

impl PcPresentation {
    /// Build and compile a presentation. `power_words[i]` is the right-hand
    /// side of `g_i^{m_i}`; `conj_words[(j, i)]` (with `j > i`) that of
    /// `g_j^{g_i}`. Missing conjugates mean `g_j` commutes with `g_i`.
    pub fn new(
        name: impl Into<String>,
        orders: Vec<u32>,
        power_words: Vec<Word>,
        conj_words: BTreeMap<(usize, usize), Word>,
    ) -> Result<Self> {
        let n = orders.len();
        if power_words.len() != n {
            return Err(Error::InvalidArgument(format!("expected {n} power words, got {}", power_words.len())));
        }
        for (i, &m) in orders.iter().enumerate() {
            if m < 2 {
                return Err(Error::InvalidArgument(format!("relative order of g{} is {m}, must be at least 2", i + 1)));
            }
        }
        for (i, w) in power_words.iter().enumerate() {
            check_word(w, n, i, &format!("pow g{}", i + 1))?;
        }
        for (&(j, i), w) in &conj_words {
            if j <= i || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "conjugate relation g{}^g{} needs {} > {} within 1..={n}",
                    j + 1,
                    i + 1,
                    j + 1,
                    i + 1
                )));
            }
            check_word(w, n, i, &format!("conj g{} g{}", j + 1, i + 1))?;
        }
        let conj_nf = (0..n).map(|j| (0..j).map(|_| vec![(j, 1)]).collect()).collect();
        let mut p = PcPresentation {
            name: name.into(),
            orders,
            power_words,
            conj_words,
            power_nf: vec![Vec::new(); n],
            conj_nf,
            budget: DEFAULT_STEP_BUDGET,
        };
        p.compile()?;
        Ok(p)
    }

    /// Normalize the relation words from the bottom generator upwards; the
    /// relations of `g_i` only need those of later generators.
    fn compile(&mut self) -> Result<()> {
        let n = self.orders.len();
        for i in (0..n).rev() {
            let w = self.power_words[i].clone();
            let e = self.collect_word_with(&w)?;
            self.power_nf[i] = sparse(&e.0);
            for j in i + 1..n {
                if let Some(w) = self.conj_words.get(&(j, i)).cloned() {
                    let e = self.collect_word_with(&w)?;
                    self.conj_nf[j][i] = sparse(&e.0);
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn num_gens(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn power_word(&self, i: usize) -> &Word {
        &self.power_words[i]
    }

    pub fn conj_word(&self, j: usize, i: usize) -> Option<&Word> {
        self.conj_words.get(&(j, i))
    }

    /// `∏ m_i` as a big integer; equals `|G|` for consistent presentations.
    pub fn nominal_order(&self) -> u128 {
        self.orders.iter().map(|&m| m as u128).product()
    }

    pub fn set_step_budget(&mut self, budget: u64) {
        self.budget = budget;
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.num_gens())
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut e = self.identity();
        e.0[i] = 1 % self.orders[i];
        e
    }

    /// Normal form of the power relation right-hand side of `g_i`.
    pub fn power_element(&self, i: usize) -> Element {
        dense(&self.power_nf[i], self.num_gens())
    }

    /// Normal form of `g_j^{g_i}`, `j > i`.
    pub fn conj_element(&self, j: usize, i: usize) -> Element {
        dense(&self.conj_nf[j][i], self.num_gens())
    }

    pub fn is_valid(&self, x: &Element) -> bool {
        x.0.len() == self.num_gens() && x.0.iter().zip(&self.orders).all(|(&e, &m)| e < m)
    }

    // ---------------------------------------------------------------------
    // collection

    pub(crate) fn num_tails(&self) -> usize {
        let n = self.num_gens();
        n + n * (n.saturating_sub(1)) / 2
    }

    #[inline]
    pub(crate) fn power_tail(&self, i: usize) -> usize {
        i
    }

    #[inline]
    pub(crate) fn conj_tail(&self, j: usize, i: usize) -> usize {
        self.num_gens() + j * (j - 1) / 2 + i
    }

    fn mul_gen<T: Tails>(&self, x: &mut [u32], i: usize, tails: &mut T, steps: &mut Steps) -> Result<()> {
        steps.tick()?;
        let n = x.len();
        let has_suffix = x[i + 1..].iter().any(|&e| e != 0);
        if !has_suffix {
            x[i] += 1;
            if x[i] == self.orders[i] {
                x[i] = 0;
                tails.add(self.power_tail(i), 1);
                self.mul_sparse(x, &self.power_nf[i], tails, steps)?;
            }
            return Ok(());
        }
        let suffix: SparseNf = (i + 1..n).filter(|&j| x[j] != 0).map(|j| (j, x[j])).collect();
        for e in &mut x[i + 1..] {
            *e = 0;
        }
        x[i] += 1;
        if x[i] == self.orders[i] {
            x[i] = 0;
            tails.add(self.power_tail(i), 1);
            self.mul_sparse(x, &self.power_nf[i], tails, steps)?;
        }
        for (j, e) in suffix {
            tails.add(self.conj_tail(j, i), e as i64);
            for _ in 0..e {
                self.mul_sparse(x, &self.conj_nf[j][i], tails, steps)?;
            }
        }
        Ok(())
    }

    fn mul_sparse<T: Tails>(&self, x: &mut [u32], nf: &[(usize, u32)], tails: &mut T, steps: &mut Steps) -> Result<()> {
        for &(k, e) in nf {
            for _ in 0..e {
                self.mul_gen(x, k, tails, steps)?;
            }
        }
        Ok(())
    }

    fn mul_dense<T: Tails>(&self, x: &mut [u32], y: &[u32], tails: &mut T, steps: &mut Steps) -> Result<()> {
        for (k, &e) in y.iter().enumerate() {
            for _ in 0..e {
                self.mul_gen(x, k, tails, steps)?;
            }
        }
        Ok(())
    }

    /// Inverse of `x` in place: returns `z` with `x·z` collecting to the
    /// identity, and adds the tails of that collection to `tails`.
    fn inverse_into<T: Tails>(&self, x: &[u32], tails: &mut T, steps: &mut Steps) -> Result<Vec<u32>> {
        let n = x.len();
        let mut cur = x.to_vec();
        let mut z = vec![0u32; n];
        for i in 0..n {
            let k = (self.orders[i] - cur[i]) % self.orders[i];
            z[i] = k;
            for _ in 0..k {
                self.mul_gen(&mut cur, i, tails, steps)?;
            }
        }
        debug_assert!(cur.iter().all(|&e| e == 0));
        Ok(z)
    }

    fn collect_word_with(&self, w: &Word) -> Result<Element> {
        let n = self.num_gens();
        let mut steps = Steps::new(self.budget);
        let mut x = vec![0u32; n];
        for &(g, e) in &w.0 {
            if g >= n {
                return Err(Error::InvalidArgument(format!("generator g{} out of range", g + 1)));
            }
            if e > 0 {
                for _ in 0..e {
                    self.mul_gen(&mut x, g, &mut (), &mut steps)?;
                }
            } else {
                let ginv = self.inverse_into(&self.generator(g).0, &mut (), &mut steps)?;
                for _ in 0..(-e) {
                    self.mul_dense(&mut x, &ginv, &mut (), &mut steps)?;
                }
            }
        }
        Ok(Element(x))
    }

    /// Normal form of a word.
    pub fn collect(&self, w: &Word) -> Result<Element> {
        self.collect_word_with(w)
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        let mut steps = Steps::new(self.budget);
        let mut z = x.0.clone();
        self.mul_dense(&mut z, &y.0, &mut (), &mut steps)?;
        Ok(Element(z))
    }

    /// `x · g_i`.
    pub fn multiply_generator(&self, x: &Element, i: usize) -> Result<Element> {
        let mut steps = Steps::new(self.budget);
        let mut z = x.0.clone();
        self.mul_gen(&mut z, i, &mut (), &mut steps)?;
        Ok(Element(z))
    }

    pub fn inverse(&self, x: &Element) -> Result<Element> {
        let mut steps = Steps::new(self.budget);
        Ok(Element(self.inverse_into(&x.0, &mut (), &mut steps)?))
    }

    /// `x^k` for any integer `k`.
    pub fn power(&self, x: &Element, k: i64) -> Result<Element> {
        let base = if k < 0 { self.inverse(x)? } else { x.clone() };
        let mut acc = self.identity();
        let mut b = base;
        let mut k = k.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.multiply(&acc, &b)?;
            }
            k >>= 1;
            if k > 0 {
                b = self.multiply(&b, &b)?;
            }
        }
        Ok(acc)
    }

    /// `x^y = y⁻¹ x y`.
    pub fn conjugate(&self, x: &Element, y: &Element) -> Result<Element> {
        let yi = self.inverse(y)?;
        let t = self.multiply(&yi, x)?;
        self.multiply(&t, y)
    }

    /// `[x, y] = x⁻¹ y⁻¹ x y`.
    pub fn commutator(&self, x: &Element, y: &Element) -> Result<Element> {
        let xy = self.multiply(x, y)?;
        let yx = self.multiply(y, x)?;
        let yxi = self.inverse(&yx)?;
        self.multiply(&yxi, &xy)
    }

    // ---------------------------------------------------------------------
    // tails extension

    pub(crate) fn tailed_identity(&self) -> Tailed {
        Tailed { exps: vec![0; self.num_gens()], tail: vec![0; self.num_tails()] }
    }

    pub(crate) fn tailed_lift(&self, x: &Element) -> Tailed {
        Tailed { exps: x.0.clone(), tail: vec![0; self.num_tails()] }
    }

    pub(crate) fn tailed_mul(&self, a: &Tailed, b: &Tailed) -> Result<Tailed> {
        let mut steps = Steps::new(self.budget);
        let mut exps = a.exps.clone();
        let mut tail: Vec<i64> = a.tail.iter().zip(&b.tail).map(|(x, y)| x + y).collect();
        self.mul_dense(&mut exps, &b.exps, &mut tail, &mut steps)?;
        Ok(Tailed { exps, tail })
    }

    pub(crate) fn tailed_inv(&self, a: &Tailed) -> Result<Tailed> {
        let mut steps = Steps::new(self.budget);
        let mut tau = vec![0i64; self.num_tails()];
        let z = self.inverse_into(&a.exps, &mut tau, &mut steps)?;
        let tail = a.tail.iter().zip(&tau).map(|(t, s)| -t - s).collect();
        Ok(Tailed { exps: z, tail })
    }

    /// `[a, b]` in the tails extension.
    pub(crate) fn tailed_comm(&self, a: &Tailed, b: &Tailed) -> Result<Tailed> {
        let ab = self.tailed_mul(a, b)?;
        let ba = self.tailed_mul(b, a)?;
        let bai = self.tailed_inv(&ba)?;
        self.tailed_mul(&bai, &ab)
    }

    /// Tail of `[x̃, ỹ]` for commuting `x, y`: the lifts' products `xy` and
    /// `yx` share their normal form, so the commutator is the difference of
    /// the accumulated tails.
    pub(crate) fn commuting_tail(&self, x: &Element, y: &Element) -> Result<Option<Vec<i64>>> {
        let mut steps = Steps::new(self.budget);
        let r = self.num_tails();
        let mut t1 = vec![0i64; r];
        let mut a = x.0.clone();
        self.mul_dense(&mut a, &y.0, &mut t1, &mut steps)?;
        let mut t2 = vec![0i64; r];
        let mut b = y.0.clone();
        self.mul_dense(&mut b, &x.0, &mut t2, &mut steps)?;
        if a != b {
            return Ok(None);
        }
        Ok(Some(t1.iter().zip(&t2).map(|(u, v)| u - v).collect()))
    }

    // ---------------------------------------------------------------------
    // consistency

    /// Evaluate every overlap both ways and hand the pair of results to
    /// `visit`. `T` decides whether tails are tracked.
    fn run_overlaps<T: Tails + Clone>(
        &self,
        zero: &T,
        mut visit: impl FnMut(String, (Vec<u32>, T), (Vec<u32>, T)),
    ) -> Result<()> {
        let n = self.num_gens();
        let mut steps = Steps::new(self.budget.saturating_mul(16));
        let gen = |i: usize| self.generator(i).0;
        let pow_elem = |i: usize, k: u32| {
            let mut v = vec![0u32; n];
            v[i] = k;
            v
        };

        // (g_k g_j) g_i = g_k (g_j g_i), k > j > i
        for k in 0..n {
            for j in 0..k {
                for i in 0..j {
                    let mut tl = zero.clone();
                    let mut l = gen(k);
                    self.mul_gen(&mut l, j, &mut tl, &mut steps)?;
                    self.mul_gen(&mut l, i, &mut tl, &mut steps)?;

                    let mut tr = zero.clone();
                    let mut inner = gen(j);
                    self.mul_gen(&mut inner, i, &mut tr, &mut steps)?;
                    let mut r = gen(k);
                    self.mul_dense(&mut r, &inner, &mut tr, &mut steps)?;
                    visit(format!("(g{} g{}) g{}", k + 1, j + 1, i + 1), (l, tl), (r, tr));
                }
            }
        }
        for j in 0..n {
            let mj = self.orders[j];
            for i in 0..j {
                // (g_j^{m_j}) g_i = g_j^{m_j-1} (g_j g_i)
                let mut tl = zero.clone();
                let mut l = pow_elem(j, mj - 1);
                self.mul_gen(&mut l, j, &mut tl, &mut steps)?;
                self.mul_gen(&mut l, i, &mut tl, &mut steps)?;
                let mut tr = zero.clone();
                let mut inner = gen(j);
                self.mul_gen(&mut inner, i, &mut tr, &mut steps)?;
                let mut r = pow_elem(j, mj - 1);
                self.mul_dense(&mut r, &inner, &mut tr, &mut steps)?;
                visit(format!("g{}^{} g{}", j + 1, mj, i + 1), (l, tl), (r, tr));

                // g_j (g_i^{m_i}) = (g_j g_i) g_i^{m_i-1}
                let mi = self.orders[i];
                let mut tl = zero.clone();
                let mut inner = pow_elem(i, mi - 1);
                self.mul_gen(&mut inner, i, &mut tl, &mut steps)?;
                let mut l = gen(j);
                self.mul_dense(&mut l, &inner, &mut tl, &mut steps)?;
                let mut tr = zero.clone();
                let mut r = gen(j);
                for _ in 0..mi {
                    self.mul_gen(&mut r, i, &mut tr, &mut steps)?;
                }
                visit(format!("g{} g{}^{}", j + 1, i + 1, mi), (l, tl), (r, tr));
            }
        }
        // g_i (g_i^{m_i}) = (g_i^{m_i}) g_i
        for i in 0..n {
            let mi = self.orders[i];
            let mut tl = zero.clone();
            let mut inner = pow_elem(i, mi - 1);
            self.mul_gen(&mut inner, i, &mut tl, &mut steps)?;
            let mut l = gen(i);
            self.mul_dense(&mut l, &inner, &mut tl, &mut steps)?;
            let mut tr = zero.clone();
            let mut r = pow_elem(i, mi - 1);
            self.mul_gen(&mut r, i, &mut tr, &mut steps)?;
            self.mul_gen(&mut r, i, &mut tr, &mut steps)?;
            visit(format!("g{}^{}", i + 1, mi + 1), (l, tl), (r, tr));
        }
        Ok(())
    }

    /// Run the standard overlap tests. A pass means the presented group has
    /// order `∏ m_i`.
    pub fn consistency_check(&self) -> Result<ConsistencyReport> {
        let mut failures = Vec::new();
        self.run_overlaps(&(), |label, (l, _), (r, _)| {
            if l != r {
                failures.push(format!("{label}: {} != {}", Element(l).to_word(), Element(r).to_word()));
            }
        })?;
        Ok(ConsistencyReport { consistent: failures.is_empty(), order: self.nominal_order(), failures })
    }

    /// Relations among the tails forced by consistency of the tails
    /// extension. Requires the presentation itself to be consistent.
    pub(crate) fn tail_relations(&self) -> Result<Vec<Vec<i64>>> {
        let zero = vec![0i64; self.num_tails()];
        let mut rels = Vec::new();
        let mut mismatch = None;
        self.run_overlaps(&zero, |label, (l, tl), (r, tr)| {
            if l != r {
                mismatch.get_or_insert(label);
                return;
            }
            let d: Vec<i64> = tl.iter().zip(&tr).map(|(a, b)| a - b).collect();
            if d.iter().any(|&x| x != 0) {
                rels.push(d);
            }
        })?;
        if let Some(label) = mismatch {
            return Err(Error::Inconsistent(vec![label]));
        }
        Ok(rels)
    }

    // ---------------------------------------------------------------------
    // enumeration

    /// Mixed-radix index of a normal form (first generator most significant).
    pub fn element_index(&self, x: &Element) -> usize {
        let mut idx = 0usize;
        for (e, &m) in x.0.iter().zip(&self.orders) {
            idx = idx * m as usize + *e as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> Element {
        let n = self.num_gens();
        let mut e = vec![0u32; n];
        for i in (0..n).rev() {
            let m = self.orders[i] as usize;
            e[i] = (idx % m) as u32;
            idx /= m;
        }
        Element(e)
    }

    /// Build the multiplication table of the presented group.
    pub fn enumerate_group(&self, cap: usize) -> Result<TableGroup> {
        let order = self.nominal_order();
        if order > cap as u128 || order > u16::MAX as u128 + 1 {
            return Err(Error::TableCap { order, cap });
        }
        let report = self.consistency_check()?;
        if !report.consistent {
            return Err(Error::Inconsistent(report.failures));
        }
        let n = self.num_gens();
        let size = order as usize;
        let elements: Vec<Element> = (0..size).map(|i| self.element_at(i)).collect();
        // right multiplication by each generator
        let mut rgen = vec![0u32; size * n];
        for (x, e) in elements.iter().enumerate() {
            for i in 0..n {
                let y = self.multiply_generator(e, i)?;
                rgen[x * n + i] = self.element_index(&y) as u32;
            }
        }
        let strides: Vec<usize> = (0..n).map(|i| self.orders[i + 1..].iter().map(|&m| m as usize).product()).collect();
        let mut table = vec![0u16; size * size];
        for x in 0..size {
            table[x * size] = x as u16;
        }
        for y in 1..size {
            let ey = &elements[y].0;
            let k = (0..n).rev().find(|&k| ey[k] != 0).expect("nonidentity");
            let yp = y - strides[k];
            for x in 0..size {
                let xyp = table[x * size + yp] as usize;
                table[x * size + y] = rgen[xyp * n + k] as u16;
            }
        }
        let gens: Vec<usize> = (0..n).map(|i| self.element_index(&self.generator(i))).collect();
        TableGroup::from_parts(size, table, Some(gens), Some((self.clone(), elements)))
    }
}

fn sparse(e: &[u32]) -> SparseNf {
    e.iter().enumerate().filter(|&(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect()
}

fn dense(s: &[(usize, u32)], n: usize) -> Element {
    let mut e = vec![0u32; n];
    for &(i, x) in s {
        e[i] = x;
    }
    Element(e)
}

fn check_word(w: &Word, n: usize, lhs_min: usize, what: &str) -> Result<()> {
    for &(g, e) in &w.0 {
        if g >= n {
            return Err(Error::InvalidArgument(format!("{what}: generator g{} out of range", g + 1)));
        }
        if g <= lhs_min {
            return Err(Error::InvalidArgument(format!(
                "{what}: right-hand side uses g{}, only g{}.. allowed",
                g + 1,
                lhs_min + 2
            )));
        }
        if e == 0 {
            return Err(Error::InvalidArgument(format!("{what}: zero exponent")));
        }
    }
    Ok(())
}

// -------------------------------------------------------------------------
// .pcp text format

#[derive(Debug, Clone)]
struct Token {
    text: String,
    col: usize,
}

fn tokenize_line(line: &str) -> Vec<Token> {
    let line = match line.find('#') {
        Some(p) => &line[..p],
        None => line,
    };
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    for (ci, &(_, ch)) in chars.iter().enumerate() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: chars[s..ci].iter().map(|c| c.1).collect(), col: s + 1 });
            }
        } else if ch == '=' {
            if let Some(s) = start.take() {
                out.push(Token { text: chars[s..ci].iter().map(|c| c.1).collect(), col: s + 1 });
            }
            out.push(Token { text: "=".into(), col: ci + 1 });
        } else if start.is_none() {
            start = Some(ci);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: chars[s..].iter().map(|c| c.1).collect(), col: s + 1 });
    }
    out
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, col, msg: msg.into() }
}

fn parse_gen(tok: &Token, line: usize, n: usize) -> Result<usize> {
    let body = tok
        .text
        .strip_prefix('g')
        .ok_or_else(|| syntax(line, tok.col, format!("expected generator, found `{}`", tok.text)))?;
    let i: usize = body.parse().map_err(|_| syntax(line, tok.col, format!("bad generator `{}`", tok.text)))?;
    if i == 0 || i > n {
        return Err(Error::Presentation { line, msg: format!("generator g{i} out of range 1..={n}") });
    }
    Ok(i - 1)
}

fn parse_word_tokens(toks: &[Token], line: usize, n: usize) -> Result<Word> {
    if toks.is_empty() {
        return Err(syntax(line, 1, "missing word"));
    }
    if toks.len() == 1 && toks[0].text == "1" {
        return Ok(Word::identity());
    }
    let mut terms = Vec::new();
    for t in toks {
        let (g, e) = match t.text.split_once('^') {
            Some((g, e)) => {
                let exp: i64 =
                    e.parse().map_err(|_| syntax(line, t.col + g.len() + 1, format!("bad exponent `{e}`")))?;
                (g, exp)
            }
            None => (t.text.as_str(), 1),
        };
        let gi = parse_gen(&Token { text: g.to_string(), col: t.col }, line, n)?;
        if e != 0 {
            terms.push((gi, e));
        }
    }
    Ok(Word(terms))
}

fn expect_eq(toks: &[Token], at: usize, line: usize) -> Result<()> {
    match toks.get(at) {
        Some(t) if t.text == "=" => Ok(()),
        Some(t) => Err(syntax(line, t.col, format!("expected `=`, found `{}`", t.text))),
        None => Err(syntax(line, toks.last().map_or(1, |t| t.col + t.text.len()), "expected `=`")),
    }
}

/// Parse the line-oriented `.pcp` format.
pub fn parse_pcp(text: &str) -> Result<PcPresentation> {
    let mut name = String::from("unnamed");
    let mut n: Option<usize> = None;
    let mut orders: Vec<Option<u32>> = Vec::new();
    let mut powers: Vec<Option<Word>> = Vec::new();
    let mut conjs: BTreeMap<(usize, usize), Word> = BTreeMap::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let toks = tokenize_line(raw);
        if toks.is_empty() {
            continue;
        }
        let kw = &toks[0];
        let need_n = |n: Option<usize>| n.ok_or_else(|| syntax(line, kw.col, "`gens` must come first"));
        match kw.text.as_str() {
            "group" => {
                if toks.len() < 2 {
                    return Err(syntax(line, kw.col + 5, "missing group name"));
                }
                name = toks[1..].iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
            }
            "gens" => {
                if n.is_some() {
                    return Err(syntax(line, kw.col, "duplicate `gens`"));
                }
                let t = toks.get(1).ok_or_else(|| syntax(line, kw.col + 4, "missing generator count"))?;
                let v: usize =
                    t.text.parse().map_err(|_| syntax(line, t.col, format!("bad generator count `{}`", t.text)))?;
                if toks.len() > 2 {
                    return Err(syntax(line, toks[2].col, "unexpected token"));
                }
                n = Some(v);
                orders = vec![None; v];
                powers = vec![None; v];
            }
            "order" => {
                let nn = need_n(n)?;
                let g = parse_gen(toks.get(1).ok_or_else(|| syntax(line, kw.col + 5, "missing generator"))?, line, nn)?;
                expect_eq(&toks, 2, line)?;
                let t = toks.get(3).ok_or_else(|| syntax(line, toks[2].col + 1, "missing order"))?;
                let m: u32 = t.text.parse().map_err(|_| syntax(line, t.col, format!("bad order `{}`", t.text)))?;
                if toks.len() > 4 {
                    return Err(syntax(line, toks[4].col, "unexpected token"));
                }
                if m < 2 {
                    return Err(Error::Presentation {
                        line,
                        msg: format!("relative order of g{} is {m}, must be >= 2", g + 1),
                    });
                }
                if orders[g].replace(m).is_some() {
                    return Err(Error::Presentation { line, msg: format!("duplicate order for g{}", g + 1) });
                }
            }
            "pow" => {
                let nn = need_n(n)?;
                let g = parse_gen(toks.get(1).ok_or_else(|| syntax(line, kw.col + 3, "missing generator"))?, line, nn)?;
                expect_eq(&toks, 2, line)?;
                let w = parse_word_tokens(&toks[3..], line, nn)?;
                if let Some(bad) = w.0.iter().find(|&&(k, _)| k <= g) {
                    return Err(Error::Presentation {
                        line,
                        msg: format!("pow g{}: right-hand side uses g{}, only g{}.. allowed", g + 1, bad.0 + 1, g + 2),
                    });
                }
                if powers[g].replace(w).is_some() {
                    return Err(Error::Presentation { line, msg: format!("duplicate power relation for g{}", g + 1) });
                }
            }
            "conj" => {
                let nn = need_n(n)?;
                let j = parse_gen(toks.get(1).ok_or_else(|| syntax(line, kw.col + 4, "missing generator"))?, line, nn)?;
                let i =
                    parse_gen(toks.get(2).ok_or_else(|| syntax(line, kw.col + 4, "missing conjugator"))?, line, nn)?;
                if j <= i {
                    return Err(Error::Presentation {
                        line,
                        msg: format!("conj g{} g{}: left index must exceed the conjugator's", j + 1, i + 1),
                    });
                }
                expect_eq(&toks, 3, line)?;
                let w = parse_word_tokens(&toks[4..], line, nn)?;
                if let Some(bad) = w.0.iter().find(|&&(k, _)| k <= i) {
                    return Err(Error::Presentation {
                        line,
                        msg: format!("conj g{} g{}: right-hand side uses g{}", j + 1, i + 1, bad.0 + 1),
                    });
                }
                if conjs.insert((j, i), w).is_some() {
                    return Err(Error::Presentation {
                        line,
                        msg: format!("duplicate relation conj g{} g{}", j + 1, i + 1),
                    });
                }
            }
            other => return Err(syntax(line, kw.col, format!("unknown directive `{other}`"))),
        }
    }
    let n = n.ok_or_else(|| syntax(1, 1, "missing `gens` line"))?;
    let mut ord = Vec::with_capacity(n);
    for (i, o) in orders.into_iter().enumerate() {
        ord.push(o.ok_or_else(|| Error::Presentation { line: 0, msg: format!("missing order for g{}", i + 1) })?);
    }
    let powers = powers.into_iter().map(|w| w.unwrap_or_default()).collect();
    PcPresentation::new(name, ord, powers, conjs)
}

/// Render a presentation in the `.pcp` format.
pub fn to_pcp_text(p: &PcPresentation) -> String {
    let mut s = format!("group {}\ngens {}\n", p.name, p.num_gens());
    for (i, m) in p.orders.iter().enumerate() {
        s += &format!("order g{} = {m}\n", i + 1);
    }
    for (i, w) in p.power_words.iter().enumerate() {
        if !w.is_empty() {
            s += &format!("pow g{} = {w}\n", i + 1);
        }
    }
    for (&(j, i), w) in &p.conj_words {
        s += &format!("conj g{} g{} = {w}\n", j + 1, i + 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX21: &str = "\
group e64
gens 6
order g1 = 2
order g2 = 2
order g3 = 2
order g4 = 2
order g5 = 2
order g6 = 2
pow g3 = g4 g5
pow g4 = g5
conj g2 g1 = g2 g6
conj g3 g1 = g3 g4
conj g3 g2 = g3 g5
conj g4 g1 = g4 g5
";

    fn e64() -> PcPresentation {
        parse_pcp(EX21).unwrap()
    }

    #[test]
    fn parses_example_presentation() {
        let p = e64();
        assert_eq!(p.num_gens(), 6);
        assert_eq!(p.name(), "e64");
        assert_eq!(p.nominal_order(), 64);
    }

    #[test]
    fn empty_presentation_is_trivial() {
        let p = parse_pcp("gens 0\n").unwrap();
        assert_eq!(p.num_gens(), 0);
        assert_eq!(p.nominal_order(), 1);
        let t = p.enumerate_group(16).unwrap();
        assert_eq!(t.order(), 1);
    }

    #[test]
    fn rejects_conj_with_small_left_index() {
        let err = parse_pcp(
            "gens 5\norder g1 = 2\norder g2 = 2\norder g3 = 2\norder g4 = 2\norder g5 = 2\nconj g2 g5 = g2\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Presentation { line: 7, .. }), "{err:?}");
    }

    #[test]
    fn reports_syntax_position() {
        let err = parse_pcp("gens 2\norder g1 = 2\norder g2 = x\n").unwrap_err();
        assert_eq!(err, Error::Syntax { line: 3, col: 12, msg: "bad order `x`".into() });
        let err = parse_pcp("gens 2\norder g1 2\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, col: 10, .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_orders_and_indices() {
        assert!(matches!(parse_pcp("gens 1\norder g1 = 1\n"), Err(Error::Presentation { .. })));
        assert!(matches!(parse_pcp("gens 1\norder g2 = 2\n"), Err(Error::Presentation { .. })));
        assert!(matches!(
            parse_pcp("gens 2\norder g1 = 2\norder g2 = 2\npow g2 = g1\n"),
            Err(Error::Presentation { .. })
        ));
        assert!(parse_pcp("gens 2\norder g1 = 2\n").is_err());
    }

    #[test]
    fn collects_power_relation() {
        let p = e64();
        let x = p.collect(&Word(vec![(2, 1), (2, 1)])).unwrap();
        assert_eq!(x.0, vec![0, 0, 0, 1, 1, 0]);
        assert!(p.collect(&Word::identity()).unwrap().is_identity());
    }

    #[test]
    fn collects_commutator_relation() {
        let p = e64();
        let a = p.collect(&Word(vec![(1, 1), (0, 1)])).unwrap();
        let b = p.collect(&Word(vec![(0, 1), (1, 1), (5, 1)])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn element_operations() {
        let p = e64();
        let g1 = p.generator(0);
        let g3 = p.generator(2);
        let g4 = p.generator(3);
        assert_eq!(p.commutator(&g3, &g1).unwrap(), g4);
        for idx in 0..64 {
            let x = p.element_at(idx);
            assert!(p.commutator(&x, &x).unwrap().is_identity());
            let xi = p.inverse(&x).unwrap();
            assert!(p.multiply(&xi, &x).unwrap().is_identity());
            assert!(p.multiply(&x, &xi).unwrap().is_identity());
            assert_eq!(p.collect(&x.to_word()).unwrap(), x);
        }
        let g4i = p.inverse(&g4).unwrap();
        assert!(p.multiply(&g4i, &g4).unwrap().is_identity());
        assert_eq!(p.power(&g4, 4).unwrap(), p.identity());
        assert_eq!(p.power(&g4, -1).unwrap(), g4i);
        // x^y = x [x, y]
        let c = p.conjugate(&g3, &g1).unwrap();
        assert_eq!(c, p.multiply(&g3, &g4).unwrap());
    }

    #[test]
    fn negative_exponents_in_input() {
        let p = parse_pcp("gens 1\norder g1 = 5\n").unwrap();
        let x = p.collect(&Word(vec![(0, -2)])).unwrap();
        assert_eq!(x.0, vec![3]);
        let q = parse_pcp("gens 2\norder g1 = 2\norder g2 = 3\nconj g2 g1 = g2^-1\n").unwrap();
        assert!(q.consistency_check().unwrap().consistent);
        assert_eq!(q.conj_element(1, 0).0, vec![0, 2]);
    }

    #[test]
    fn consistency_detects_mutation() {
        let ok = parse_pcp("gens 2\norder g1 = 2\norder g2 = 2\npow g1 = g2\n").unwrap();
        let r = ok.consistency_check().unwrap();
        assert!(r.consistent);
        assert_eq!(r.order, 4);
        let bad = parse_pcp("gens 2\norder g1 = 2\norder g2 = 2\npow g1 = g2\nconj g2 g1 = 1\n").unwrap();
        let r = bad.consistency_check().unwrap();
        assert!(!r.consistent);
        assert!(!r.failures.is_empty());
        assert!(matches!(bad.enumerate_group(64), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn example_presentation_is_consistent() {
        let r = e64().consistency_check().unwrap();
        assert!(r.consistent, "{:?}", r.failures);
        assert_eq!(r.order, 64);
    }

    #[test]
    fn table_agrees_with_collection() {
        let p = e64();
        let t = p.enumerate_group(4096).unwrap();
        assert_eq!(t.order(), 64);
        for x in 0..64 {
            for y in 0..64 {
                let z = p.multiply(&p.element_at(x), &p.element_at(y)).unwrap();
                assert_eq!(t.mul(x, y), p.element_index(&z));
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let p = e64();
        let q = parse_pcp(&to_pcp_text(&p)).unwrap();
        assert_eq!(to_pcp_text(&p), to_pcp_text(&q));
    }
}
