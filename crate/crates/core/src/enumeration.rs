//! General algebraic engines: coset enumeration, Smith normal form over the
//! integers, and linear algebra over `F_p`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

// -------------------------------------------------------------------------
// F_p linear algebra

pub fn fp_inv(a: u64, p: u64) -> u64 {
    let (g, x, _) = ext_gcd(a as i128 % p as i128, p as i128);
    assert_eq!(g, 1, "{a} is not invertible mod {p}");
    x.rem_euclid(p as i128) as u64
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Reduce `m` to reduced row echelon form over `F_p` in place and return the
/// pivot columns. Zero rows end up at the bottom.
pub fn fp_rref(m: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| m[i][c] % p != 0) else { continue };
        m.swap(r, piv);
        let inv = fp_inv(m[r][c] % p, p);
        for x in m[r].iter_mut() {
            *x = *x % p * inv % p;
        }
        for i in 0..rows {
            if i != r && m[i][c] % p != 0 {
                let f = m[i][c] % p;
                for j in 0..cols {
                    let sub = f * m[r][j] % p;
                    m[i][j] = (m[i][j] % p + p - sub) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn fp_rank(m: &[Vec<u64>], p: u64) -> usize {
    let mut w = m.to_vec();
    fp_rref(&mut w, p).len()
}

/// Basis of `{x : m·x = 0}` over `F_p`, one vector per free column.
pub fn fp_nullspace(m: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut w = m.to_vec();
    let pivots = fp_rref(&mut w, p);
    let mut basis = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![0u64; cols];
        x[f] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = (p - w[row][f] % p) % p;
        }
        basis.push(x);
    }
    basis
}

// -------------------------------------------------------------------------
// integer matrices

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row_dst += f · row_src
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * f;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col_dst += f · col_src
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * f;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self.data[r * self.cols + j];
            self.data[r * self.cols + j] = v;
        }
    }
}

/// `U·A·V = D` with `D` diagonal, `d_1 | d_2 | …`, `U` and `V` unimodular.
#[derive(Clone, Debug)]
pub struct SnfResult {
    /// Diagonal of `D`, length `min(rows, cols)`, nonnegative.
    pub d: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries.
    pub fn invariants(&self) -> Vec<BigInt> {
        self.d.iter().filter(|x| !x.is_zero()).cloned().collect()
    }

    pub fn rank(&self) -> usize {
        self.d.iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form with transforming matrices. The postconditions
/// (`U·A·V = D`, divisibility chain) are checked on every call.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows, a.cols);
    let mut w = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let k = m.min(n);
    let mut t = 0;
    while t < k {
        // smallest nonzero entry of the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = w.get(i, j);
                if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < w.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        w.swap_rows(t, bi);
        u.swap_rows(t, bi);
        w.swap_cols(t, bj);
        v.swap_cols(t, bj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if !w.get(i, t).is_zero() {
                    let q = -(w.get(i, t) / w.get(t, t));
                    if !q.is_zero() {
                        w.add_row(i, t, &q);
                        u.add_row(i, t, &q);
                    }
                    if !w.get(i, t).is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !w.get(t, j).is_zero() {
                    let q = -(w.get(t, j) / w.get(t, t));
                    if !q.is_zero() {
                        w.add_col(j, t, &q);
                        v.add_col(j, t, &q);
                    }
                    if !w.get(t, j).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // bring the smallest remainder in row/column t to the pivot
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..m {
                    let x = w.get(i, t);
                    if !x.is_zero() && x.abs() < w.get(bi, bj).abs() {
                        bi = i;
                        bj = t;
                    }
                }
                for j in t + 1..n {
                    let x = w.get(t, j);
                    if !x.is_zero() && x.abs() < w.get(bi, bj).abs() {
                        bi = t;
                        bj = j;
                    }
                }
                w.swap_rows(t, bi);
                u.swap_rows(t, bi);
                w.swap_cols(t, bj);
                v.swap_cols(t, bj);
                continue;
            }
            let piv = w.get(t, t).clone();
            let mut bad = None;
            'find: for i in t + 1..m {
                for j in t + 1..n {
                    if !w.get(i, j).is_multiple_of(&piv) {
                        bad = Some(i);
                        break 'find;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    w.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if w.get(t, t).is_negative() {
            w.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let d: Vec<BigInt> = (0..k).map(|i| w.get(i, i).clone()).collect();

    // postconditions
    let check = u.mul(a).mul(&v);
    for i in 0..m {
        for j in 0..n {
            let want = if i == j { d[i].clone() } else { BigInt::zero() };
            assert_eq!(check.get(i, j), &want, "SNF: U·A·V differs from D at ({i},{j})");
        }
    }
    for i in 1..k {
        if !d[i].is_zero() {
            assert!(!d[i - 1].is_zero() && d[i].is_multiple_of(&d[i - 1]), "SNF: divisibility chain broken");
        }
    }
    SnfResult { d, u, v }
}

/// Invariants of `Z^cols / ⟨rows⟩`: torsion invariant factors (each > 1)
/// and the free rank.
pub fn abelian_invariants(rows: &[Vec<i64>], cols: usize) -> (Vec<BigInt>, usize) {
    if rows.is_empty() {
        return (Vec::new(), cols);
    }
    let snf = smith_normal_form(&IntMatrix::from_rows(rows, cols));
    let torsion = snf.invariants().into_iter().filter(|x| !x.is_one()).collect();
    (torsion, cols - snf.rank())
}

// -------------------------------------------------------------------------
// coset enumeration

/// Generator `g` is letter `2g`, its inverse `2g + 1`.
pub type Letter = u32;

#[inline]
pub fn letter(gen: usize, inverse: bool) -> Letter {
    (2 * gen + inverse as usize) as Letter
}

#[inline]
fn inv(l: Letter) -> Letter {
    l ^ 1
}

/// A finitely presented group whose relators are produced on demand, in a
/// fixed order, every time they are requested.
pub trait RelatorSource {
    fn num_gens(&self) -> usize;
    fn for_each_relator(&self, f: &mut dyn FnMut(&[Letter]));
}

/// Presentation with an explicit relator list.
#[derive(Clone, Debug)]
pub struct FpPresentation {
    gens: usize,
    relators: Vec<Vec<Letter>>,
}

impl FpPresentation {
    /// Relators as signed one-based generator indices: `3` is `g3`, `-3` its
    /// inverse.
    pub fn new(gens: usize, relators: &[Vec<i32>]) -> Result<Self> {
        let relators = relators.iter().map(|r| signed_word(r, gens)).collect::<Result<_>>()?;
        Ok(FpPresentation { gens, relators })
    }
}

impl RelatorSource for FpPresentation {
    fn num_gens(&self) -> usize {
        self.gens
    }

    fn for_each_relator(&self, f: &mut dyn FnMut(&[Letter])) {
        for r in &self.relators {
            f(r);
        }
    }
}

/// Convert a signed one-based word to letters.
pub fn signed_word(w: &[i32], gens: usize) -> Result<Vec<Letter>> {
    w.iter()
        .map(|&x| {
            let g = x.unsigned_abs() as usize;
            if x == 0 || g > gens {
                Err(Error::InvalidArgument(format!("generator {x} out of range")))
            } else {
                Ok(letter(g - 1, x < 0))
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct TcCaps {
    /// Maximum number of coset rows ever allocated.
    pub max_cosets: usize,
    /// Maximum number of reduction passes over the relator stream.
    pub max_passes: usize,
    /// Maximum number of table entries (rows × columns), a memory guard.
    pub max_entries: usize,
}

impl Default for TcCaps {
    fn default() -> Self {
        TcCaps { max_cosets: 1_000_000, max_passes: 64, max_entries: 1 << 28 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TcStats {
    pub reduction_passes: usize,
    pub live_generators: usize,
    pub reduced_relators: usize,
    pub defined: usize,
    pub max_live: usize,
    pub coincidences: usize,
}

const TRIVIAL: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

/// Complete coset table for the action of a finitely presented group on the
/// cosets of a subgroup. Generators identified with each other (or with the
/// identity) during preprocessing share a column.
#[derive(Clone, Debug)]
pub struct CosetTable {
    index: usize,
    /// original generator → reduced letter, or `TRIVIAL`
    gen_map: Vec<u32>,
    cols: usize,
    table: Vec<u32>,
    stats: TcStats,
}

impl CosetTable {
    /// Number of cosets; coset 0 is the subgroup itself.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn stats(&self) -> &TcStats {
        &self.stats
    }

    pub fn num_gens(&self) -> usize {
        self.gen_map.len()
    }

    /// Reduced letter of an original letter, `None` when the generator is
    /// trivial in the group.
    pub fn reduced_letter(&self, l: Letter) -> Option<Letter> {
        let m = self.gen_map[(l >> 1) as usize];
        (m != TRIVIAL).then_some(m ^ (l & 1))
    }

    /// Image of coset `c` under an original letter.
    pub fn act(&self, c: usize, l: Letter) -> usize {
        match self.reduced_letter(l) {
            None => c,
            Some(r) => self.table[c * self.cols + r as usize] as usize,
        }
    }

    pub fn act_reduced(&self, c: usize, r: Letter) -> usize {
        self.table[c * self.cols + r as usize] as usize
    }

    pub fn act_word(&self, mut c: usize, w: &[Letter]) -> usize {
        for &l in w {
            c = self.act(c, l);
        }
        c
    }

    pub fn reduced_cols(&self) -> usize {
        self.cols
    }

    /// Check completeness, the permutation property, transitivity, and that
    /// every relator fixes every coset.
    pub fn verify(&self, src: &dyn RelatorSource) -> Result<()> {
        self.verify_structure()?;
        let mut bad = None;
        src.for_each_relator(&mut |r| {
            if bad.is_some() {
                return;
            }
            for c in 0..self.index {
                if self.act_word(c, r) != c {
                    bad = Some(c);
                    return;
                }
            }
        });
        if let Some(c) = bad {
            return Err(Error::Internal(format!("relator does not fix coset {c}")));
        }
        Ok(())
    }

    fn verify_structure(&self) -> Result<()> {
        for c in 0..self.index {
            for l in 0..self.cols {
                let d = self.table[c * self.cols + l];
                if d == NONE || d as usize >= self.index {
                    return Err(Error::Internal(format!("coset table entry ({c},{l}) undefined")));
                }
                if self.table[d as usize * self.cols + (l ^ 1)] as usize != c {
                    return Err(Error::Internal(format!("coset table entry ({c},{l}) not inverted")));
                }
            }
        }
        let mut seen = vec![false; self.index];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(c) = stack.pop() {
            for l in 0..self.cols {
                let d = self.table[c * self.cols + l] as usize;
                if !seen[d] {
                    seen[d] = true;
                    count += 1;
                    stack.push(d);
                }
            }
        }
        if count != self.index {
            return Err(Error::Internal("coset table is not transitive".into()));
        }
        Ok(())
    }
}

/// Union-find on generators where each node records whether it equals its
/// parent or the parent's inverse. Node `n` stands for the identity.
struct SignedUf {
    parent: Vec<u32>,
    flip: Vec<bool>,
    involution: Vec<bool>,
}

impl SignedUf {
    fn new(n: usize) -> Self {
        SignedUf { parent: (0..=n as u32).collect(), flip: vec![false; n + 1], involution: vec![false; n + 1] }
    }

    fn trivial(&self) -> u32 {
        (self.parent.len() - 1) as u32
    }

    fn find(&mut self, x: u32) -> (u32, bool) {
        let mut path = Vec::new();
        let mut cur = x;
        let mut acc = false;
        while self.parent[cur as usize] != cur {
            path.push(cur);
            acc ^= self.flip[cur as usize];
            cur = self.parent[cur as usize];
        }
        let root = cur;
        // compress: recompute flips from the node upward
        let mut rem = acc;
        for &node in &path {
            let f = self.flip[node as usize];
            self.parent[node as usize] = root;
            self.flip[node as usize] = rem;
            rem ^= f;
        }
        (root, acc)
    }

    /// Substitute an original letter: `None` when trivial.
    fn subst(&mut self, l: Letter) -> Option<Letter> {
        let (root, f) = self.find(l >> 1);
        if root == self.trivial() {
            None
        } else {
            Some(2 * root + ((l & 1) ^ f as u32))
        }
    }

    /// Impose `a = 1` for a class letter. Returns whether anything changed.
    fn kill(&mut self, a: Letter) -> bool {
        let r = a >> 1;
        let t = self.trivial();
        if r == t {
            return false;
        }
        self.parent[r as usize] = t;
        self.flip[r as usize] = false;
        true
    }

    /// Impose `a·b = 1` for class letters `a`, `b`.
    fn join(&mut self, a: Letter, b: Letter) -> bool {
        let (ra, rb) = (a >> 1, b >> 1);
        if ra == rb {
            // a·a = 1 (a·a⁻¹ was reduced away)
            let changed = !self.involution[ra as usize];
            self.involution[ra as usize] = true;
            return changed;
        }
        let f = ((a & 1) ^ (b & 1) ^ 1) == 1;
        let (child, root) = if ra < rb { (rb, ra) } else { (ra, rb) };
        self.parent[child as usize] = root;
        self.flip[child as usize] = f;
        if self.involution[child as usize] {
            self.involution[root as usize] = true;
        }
        true
    }
}

/// Freely and cyclically reduce in place.
fn cyclic_reduce(w: &mut Vec<Letter>) {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.iter() {
        if out.last() == Some(&inv(l)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    let mut s = 0;
    let mut e = out.len();
    while e - s >= 2 && out[s] == inv(out[e - 1]) {
        s += 1;
        e -= 1;
    }
    w.clear();
    w.extend_from_slice(&out[s..e]);
}

fn free_reduce(w: &mut Vec<Letter>) {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.iter() {
        if out.last() == Some(&inv(l)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    *w = out;
}

/// Lexicographically least rotation of `w` or of its inverse.
fn canonical(w: &[Letter]) -> Vec<Letter> {
    let n = w.len();
    let winv: Vec<Letter> = w.iter().rev().map(|&l| inv(l)).collect();
    let mut best: Option<Vec<Letter>> = None;
    for src in [w, &winv[..]] {
        for s in 0..n {
            let rot: Vec<Letter> = (0..n).map(|i| src[(s + i) % n]).collect();
            if best.as_ref().map_or(true, |b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

struct Reduced {
    gen_map: Vec<u32>,
    k: usize,
    relators: Vec<Vec<Letter>>,
    passes: usize,
}

/// Identify generators through relators of length at most two, to a fixed
/// point, then collect the remaining relators without duplicates.
fn reduce(src: &dyn RelatorSource, max_passes: usize) -> Result<Reduced> {
    let n = src.num_gens();
    let mut uf = SignedUf::new(n);
    let mut passes = 0;
    let mut buf: Vec<Letter> = Vec::new();
    loop {
        if passes >= max_passes {
            return Err(Error::PassCap(max_passes));
        }
        passes += 1;
        let mut changed = false;
        src.for_each_relator(&mut |r| {
            buf.clear();
            for &l in r {
                if let Some(s) = uf.subst(l) {
                    buf.push(s);
                }
            }
            cyclic_reduce(&mut buf);
            match buf.len() {
                1 => changed |= uf.kill(buf[0]),
                2 => changed |= uf.join(buf[0], buf[1]),
                _ => {}
            }
        });
        if !changed {
            break;
        }
    }
    // renumber surviving roots
    let t = uf.trivial();
    let mut root_id = vec![u32::MAX; n + 1];
    let mut k = 0u32;
    let mut gen_map = vec![TRIVIAL; n];
    for (g, slot) in gen_map.iter_mut().enumerate() {
        let (root, f) = uf.find(g as u32);
        if root == t {
            continue;
        }
        if root_id[root as usize] == u32::MAX {
            root_id[root as usize] = k;
            k += 1;
        }
        *slot = 2 * root_id[root as usize] + f as u32;
    }
    let mut set: HashSet<Vec<Letter>> = HashSet::new();
    let mut relators = Vec::new();
    for (root, &id) in root_id.iter().enumerate() {
        if id != u32::MAX && uf.involution[root] {
            let r = vec![2 * id, 2 * id];
            if set.insert(r.clone()) {
                relators.push(r);
            }
        }
    }
    src.for_each_relator(&mut |r| {
        buf.clear();
        for &l in r {
            let m = gen_map[(l >> 1) as usize];
            if m != TRIVIAL {
                buf.push(m ^ (l & 1));
            }
        }
        cyclic_reduce(&mut buf);
        if buf.len() >= 2 {
            let c = canonical(&buf);
            if !set.contains(&c) {
                set.insert(c.clone());
                relators.push(c);
            }
        }
    });
    Ok(Reduced { gen_map, k: k as usize, relators, passes })
}

struct Enumerator<'a> {
    cols: usize,
    table: Vec<u32>,
    fwd: Vec<u32>,
    live: usize,
    relators: &'a [Vec<Letter>],
    /// per letter: (relator, position) occurrences
    occ: Vec<Vec<(u32, u32)>>,
    deductions: Vec<(u32, Letter)>,
    caps: TcCaps,
    stats: TcStats,
}

impl<'a> Enumerator<'a> {
    fn new(k: usize, relators: &'a [Vec<Letter>], caps: TcCaps) -> Self {
        let cols = 2 * k;
        let mut occ = vec![Vec::new(); cols];
        for (ri, r) in relators.iter().enumerate() {
            for (pi, &l) in r.iter().enumerate() {
                occ[l as usize].push((ri as u32, pi as u32));
            }
        }
        Enumerator {
            cols,
            table: vec![NONE; cols],
            fwd: vec![0],
            live: 1,
            relators,
            occ,
            deductions: Vec::new(),
            caps,
            stats: TcStats::default(),
        }
    }

    fn rows(&self) -> usize {
        self.fwd.len()
    }

    #[inline]
    fn get(&self, c: u32, l: Letter) -> u32 {
        self.table[c as usize * self.cols + l as usize]
    }

    #[inline]
    fn set(&mut self, c: u32, l: Letter, d: u32) {
        self.table[c as usize * self.cols + l as usize] = d;
    }

    fn is_live(&self, c: u32) -> bool {
        self.fwd[c as usize] == c
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.fwd[r as usize] != r {
            r = self.fwd[r as usize];
        }
        let mut x = c;
        while self.fwd[x as usize] != r {
            let nx = self.fwd[x as usize];
            self.fwd[x as usize] = r;
            x = nx;
        }
        r
    }

    fn define(&mut self, c: u32, l: Letter) -> Result<()> {
        let rows = self.rows();
        if rows >= self.caps.max_cosets || (rows + 1) * self.cols > self.caps.max_entries {
            return Err(Error::CosetCap {
                cap: self.caps.max_cosets.min(self.caps.max_entries / self.cols.max(1)),
                defined: self.stats.defined,
                live: self.live,
            });
        }
        let d = rows as u32;
        self.fwd.push(d);
        self.table.extend(std::iter::repeat(NONE).take(self.cols));
        self.live += 1;
        self.stats.defined += 1;
        self.stats.max_live = self.stats.max_live.max(self.live);
        self.set(c, l, d);
        self.set(d, inv(l), c);
        self.deductions.push((c, l));
        Ok(())
    }

    fn merge(&mut self, a: u32, b: u32, queue: &mut Vec<u32>) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.fwd[hi as usize] = lo;
        self.live -= 1;
        queue.push(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.stats.coincidences += 1;
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut qi = 0;
        while qi < queue.len() {
            let e = queue[qi];
            qi += 1;
            for x in 0..self.cols as Letter {
                let f = self.get(e, x);
                if f == NONE {
                    continue;
                }
                self.set(f, inv(x), NONE);
                let mu = self.rep(e);
                let nu = self.rep(f);
                let mux = self.get(mu, x);
                if mux != NONE {
                    self.merge(nu, mux, &mut queue);
                } else {
                    let nux = self.get(nu, inv(x));
                    if nux != NONE {
                        self.merge(mu, nux, &mut queue);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, inv(x), mu);
                        self.deductions.push((mu, x));
                    }
                }
            }
        }
    }

    /// Scan the closed word `w` (given by accessor) at coset `c` without
    /// defining cosets: record a deduction or coincidence when possible.
    /// Returns whether the table changed.
    fn scan(&mut self, c: u32, len: usize, w: impl Fn(usize) -> Letter) -> bool {
        let mut f = c;
        let mut i = 0usize;
        let mut b = c;
        let mut j = len as isize - 1;
        while (i as isize) <= j {
            let n = self.get(f, w(i));
            if n == NONE {
                break;
            }
            f = n;
            i += 1;
        }
        if (i as isize) > j {
            if f != b {
                self.coincidence(f, b);
                return true;
            }
            return false;
        }
        while j >= i as isize {
            let n = self.get(b, inv(w(j as usize)));
            if n == NONE {
                break;
            }
            b = n;
            j -= 1;
        }
        if j < i as isize {
            self.coincidence(f, b);
            true
        } else if j == i as isize {
            let l = w(i);
            self.set(f, l, b);
            self.set(b, inv(l), f);
            self.deductions.push((f, l));
            true
        } else {
            false
        }
    }

    /// Scan-and-fill at `c`, defining cosets as needed (subgroup generators).
    fn scan_and_fill(&mut self, c: u32, w: &[Letter]) -> Result<()> {
        if w.is_empty() {
            return Ok(());
        }
        loop {
            let c = self.rep(c);
            let mut f = c;
            let mut i = 0usize;
            let mut b = c;
            let mut j = w.len() as isize - 1;
            while (i as isize) <= j && self.get(f, w[i]) != NONE {
                f = self.get(f, w[i]);
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize && self.get(b, inv(w[j as usize])) != NONE {
                b = self.get(b, inv(w[j as usize]));
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.set(f, w[i], b);
                self.set(b, inv(w[i]), f);
                self.deductions.push((f, w[i]));
                return Ok(());
            }
            self.define(f, w[i])?;
            self.process_deductions();
        }
    }

    fn process_deductions(&mut self) {
        while let Some((c, l)) = self.deductions.pop() {
            if !self.is_live(c) {
                continue;
            }
            let d = self.get(c, l);
            for (start, letter_) in [(c, l), (d, inv(l))] {
                if start == NONE || !self.is_live(start) {
                    continue;
                }
                let occs = std::mem::take(&mut self.occ[letter_ as usize]);
                for &(ri, pi) in &occs {
                    if !self.is_live(start) {
                        break;
                    }
                    let rel: &'a [Letter] = &self.relators[ri as usize];
                    let n = rel.len();
                    let pi = pi as usize;
                    self.scan(start, n, |i| rel[(pi + i) % n]);
                }
                self.occ[letter_ as usize] = occs;
            }
        }
    }

    /// Full scan of all relators at all live cosets; returns whether anything
    /// changed.
    fn lookahead(&mut self) -> bool {
        let mut changed = false;
        let mut c = 0u32;
        while (c as usize) < self.rows() {
            if self.is_live(c) {
                for ri in 0..self.relators.len() {
                    if !self.is_live(c) {
                        break;
                    }
                    let rel: &'a [Letter] = &self.relators[ri];
                    let n = rel.len();
                    changed |= self.scan(c, n, |i| rel[i]);
                    self.process_deductions();
                }
            }
            c += 1;
        }
        changed
    }

    fn run(&mut self, subgroup: &[Vec<Letter>]) -> Result<()> {
        for h in subgroup {
            self.scan_and_fill(0, h)?;
            self.process_deductions();
        }
        let mut c = 0u32;
        loop {
            // next undefined entry in coset order
            let mut found = None;
            while (c as usize) < self.rows() {
                if self.is_live(c) {
                    if let Some(l) = (0..self.cols as Letter).find(|&l| self.get(c, l) == NONE) {
                        found = Some((c, l));
                        break;
                    }
                }
                c += 1;
            }
            match found {
                Some((cc, l)) => {
                    self.define(cc, l)?;
                    self.process_deductions();
                    for h in subgroup {
                        self.scan_and_fill(0, h)?;
                        self.process_deductions();
                    }
                }
                None => {
                    if self.lookahead() {
                        c = 0;
                        continue;
                    }
                    return Ok(());
                }
            }
        }
    }
}

/// Todd–Coxeter enumeration of the cosets of `⟨subgroup⟩` (words as letter
/// sequences over the original generators).
///
/// Generators are first identified through relators that become short once
/// known identifications are substituted; the remaining relators are
/// deduplicated and enumerated with deduction processing.
pub fn todd_coxeter(src: &dyn RelatorSource, subgroup: &[Vec<Letter>], caps: TcCaps) -> Result<CosetTable> {
    let red = reduce(src, caps.max_passes)?;
    let sub: Vec<Vec<Letter>> = subgroup
        .iter()
        .map(|w| {
            let mut v: Vec<Letter> = w
                .iter()
                .filter_map(|&l| {
                    let m = red.gen_map[(l >> 1) as usize];
                    (m != TRIVIAL).then_some(m ^ (l & 1))
                })
                .collect();
            free_reduce(&mut v);
            v
        })
        .collect();
    let mut en = Enumerator::new(red.k, &red.relators, caps);
    en.stats.reduction_passes = red.passes;
    en.stats.live_generators = red.k;
    en.stats.reduced_relators = red.relators.len();
    en.run(&sub)?;

    // compact
    let rows = en.rows();
    let mut new_id = vec![u32::MAX; rows];
    let mut idx = 0u32;
    for c in 0..rows as u32 {
        if en.is_live(c) {
            new_id[c as usize] = idx;
            idx += 1;
        }
    }
    let cols = en.cols;
    let mut table = vec![NONE; idx as usize * cols];
    for c in 0..rows as u32 {
        if en.is_live(c) {
            let nc = new_id[c as usize] as usize;
            for l in 0..cols {
                let d = en.table[c as usize * cols + l];
                table[nc * cols + l] = if d == NONE { NONE } else { new_id[d as usize] };
            }
        }
    }
    let ct = CosetTable { index: idx as usize, gen_map: red.gen_map, cols, table, stats: en.stats.clone() };
    ct.verify_structure()?;
    for r in &red.relators {
        for c in 0..ct.index {
            let mut x = c;
            for &l in r {
                x = ct.act_reduced(x, l);
            }
            if x != c {
                return Err(Error::Internal("reduced relator does not fix a coset".into()));
            }
        }
    }
    for h in subgroup {
        if ct.act_word(0, h) != 0 {
            return Err(Error::Internal("subgroup generator moves the base coset".into()));
        }
    }
    Ok(ct)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tc(gens: usize, rels: &[Vec<i32>], sub: &[Vec<i32>]) -> CosetTable {
        let p = FpPresentation::new(gens, rels).unwrap();
        let s: Vec<Vec<Letter>> = sub.iter().map(|w| signed_word(w, gens).unwrap()).collect();
        let t = todd_coxeter(&p, &s, TcCaps::default()).unwrap();
        t.verify(&p).unwrap();
        t
    }

    #[test]
    fn cyclic_six() {
        assert_eq!(tc(1, &[vec![1; 6]], &[]).index(), 6);
    }

    #[test]
    fn symmetric_three() {
        let rels = vec![vec![1, 1, 1], vec![2, 2], vec![1, 2, 1, 2]];
        assert_eq!(tc(2, &rels, &[]).index(), 6);
        assert_eq!(tc(2, &rels, &[vec![2]]).index(), 3);
    }

    #[test]
    fn larger_groups() {
        // A5 = <a,b | a^2, b^3, (ab)^5>
        let rels = vec![vec![1, 1], vec![2, 2, 2], [1, 2].repeat(5)];
        assert_eq!(tc(2, &rels, &[]).index(), 60);
        // Q8
        let q8 = vec![vec![1, 1, 1, 1], vec![1, 1, -2, -2], vec![-2, 1, 2, 1]];
        assert_eq!(tc(2, &q8, &[]).index(), 8);
        // Z/3 x Z/4 with redundant generator c = ab
        let rels = vec![vec![1, 1, 1], vec![2, 2, 2, 2], vec![-1, -2, 1, 2], vec![3, -2, -1]];
        assert_eq!(tc(3, &rels, &[]).index(), 12);
    }

    #[test]
    fn trivial_and_identified_generators() {
        let t = tc(3, &[vec![1], vec![2, -3], vec![2, 2]], &[]);
        assert_eq!(t.index(), 2);
        assert_eq!(t.stats().live_generators, 1);
        let t = tc(2, &[vec![1, 2]], &[vec![1]]);
        assert_eq!(t.index(), 1);
    }

    #[test]
    fn coset_cap_reported() {
        let p = FpPresentation::new(1, &[vec![1; 50]]).unwrap();
        let err = todd_coxeter(&p, &[], TcCaps { max_cosets: 10, ..TcCaps::default() }).unwrap_err();
        assert!(matches!(err, Error::CosetCap { .. }));
    }

    #[test]
    fn index_does_not_depend_on_cap() {
        let rels = vec![vec![1, 1], vec![2, 2, 2], [1, 2].repeat(5)];
        let p = FpPresentation::new(2, &rels).unwrap();
        for cap in [60, 200, 10_000] {
            let t = todd_coxeter(&p, &[], TcCaps { max_cosets: cap, ..TcCaps::default() });
            if let Ok(t) = t {
                assert_eq!(t.index(), 60);
            }
        }
        assert_eq!(todd_coxeter(&p, &[], TcCaps { max_cosets: 10_000, ..TcCaps::default() }).unwrap().index(), 60);
    }

    #[test]
    fn snf_examples() {
        let d = smith_normal_form(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 8]], 2)).invariants();
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(8)]);
        let d = smith_normal_form(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]], 2)).invariants();
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(4)]);
        let z = smith_normal_form(&IntMatrix::zeros(3, 2));
        assert!(z.invariants().is_empty());
        let d = smith_normal_form(&IntMatrix::from_rows(&[vec![4, 0], vec![0, 6]], 2)).invariants();
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn abelian_invariants_with_free_part() {
        let (t, f) = abelian_invariants(&[vec![2, 0, 0], vec![0, 3, 0]], 3);
        assert_eq!(t, vec![BigInt::from(6)]);
        assert_eq!(f, 1);
    }

    #[test]
    fn fp_examples() {
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(fp_rank(&id, 2), 3);
        assert!(fp_nullspace(&id, 3, 2).is_empty());
        assert_eq!(fp_nullspace(&[vec![1, 2]], 2, 5), vec![vec![3, 1]]);
        assert_eq!(fp_inv(2, 5), 3);
    }
}
