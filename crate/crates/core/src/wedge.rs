//! Nonabelian exterior square `G ∧ G`, its curly quotient `G ⋏ G`, the
//! Schur multiplier `M(G)` and the Bogomolov multiplier `B0(G)`.
//!
//! Two engines:
//!
//! * `tc`: coset enumeration over the defining presentation on the symbols
//!   `x ∧ y`, with relators `xy ∧ z = (x^y ∧ z^y)(y ∧ z)`,
//!   `x ∧ yz = (x ∧ z)(x^z ∧ y^z)`, `x ∧ x = 1`, and for the curly variant
//!   `x ∧ y = 1` whenever `[x, y] = 1`.
//! * `metab`: linear algebra in the relative covering group `H = F/[R,F]`
//!   of a pc presentation, built from consistency tails. Then
//!   `G ∧ G ≅ [H, H]`, `M(G)` is the torsion of `R/[R,F]`, and `B0(G)` is
//!   `M(G)` modulo the commutators of lifts of commuting pairs.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::center;
use crate::enumeration::{
    letter, smith_normal_form, todd_coxeter, CosetTable, IntMatrix, Letter, RelatorSource, TcCaps,
};
use crate::groupcore::{AbelianType, Class2Group, Group, PcModel, TableGroup};
use crate::presentations::{Element, PcPresentation, Tailed};
use crate::{Error, Result};

/// Default order cap for the coset enumeration engine.
pub const DEFAULT_TC_CAP: usize = 256;
/// Hard ceiling for the coset enumeration engine.
pub const MAX_TC_CAP: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `G ⋏ G`, kernel `B0(G)`
    Curly,
    /// `G ∧ G`, kernel `M(G)`
    Exterior,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EngineKind {
    #[serde(rename = "tc")]
    Tc,
    #[serde(rename = "metab")]
    Linear,
}

impl EngineKind {
    pub fn tag(self) -> &'static str {
        match self {
            EngineKind::Tc => "tc",
            EngineKind::Linear => "metab",
        }
    }
}

/// Engine selection for the dispatchers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineChoice {
    Auto,
    Tc,
    Linear,
}

impl std::str::FromStr for EngineChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(EngineChoice::Auto),
            "tc" => Ok(EngineChoice::Tc),
            "metab" => Ok(EngineChoice::Linear),
            _ => Err(Error::InvalidArgument(format!("unknown engine `{s}` (auto, tc, metab)"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WedgeOptions {
    pub engine: EngineChoice,
    /// order cap for the tc engine
    pub tc_cap: usize,
    pub caps: TcCaps,
    /// run both engines and compare when the order is at most this
    pub cross_check_upto: usize,
}

impl Default for WedgeOptions {
    fn default() -> Self {
        WedgeOptions {
            engine: EngineChoice::Auto,
            tc_cap: DEFAULT_TC_CAP,
            caps: TcCaps::default(),
            cross_check_upto: 0,
        }
    }
}

// -------------------------------------------------------------------------
// wedge words

/// Product of `(x ∧ y)^e` factors; elements are pc normal forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WedgeWord {
    pub factors: Vec<(Element, Element, i64)>,
}

impl WedgeWord {
    pub fn new(factors: Vec<(Element, Element, i64)>) -> Self {
        WedgeWord { factors }
    }

    pub fn inverse(&self) -> WedgeWord {
        WedgeWord { factors: self.factors.iter().rev().map(|(x, y, e)| (x.clone(), y.clone(), -e)).collect() }
    }

    /// Parse `(g3 w g2)(g4^1 w g1)^-1`; components are pc words, where the
    /// letters `a`, `b`, … may stand for `g1`, `g2`, ….
    pub fn parse(text: &str, pc: &PcPresentation) -> Result<WedgeWord> {
        let bad = |m: &str| Error::InvalidArgument(format!("wedge word `{text}`: {m}"));
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        let mut factors = Vec::new();
        let skip_ws = |i: &mut usize| {
            while *i < chars.len() && chars[*i].is_whitespace() {
                *i += 1;
            }
        };
        loop {
            skip_ws(&mut i);
            if i == chars.len() {
                break;
            }
            if chars[i] != '(' {
                return Err(bad("expected `(`"));
            }
            let close = chars[i..].iter().position(|&c| c == ')').ok_or_else(|| bad("missing `)`"))? + i;
            let inner: String = chars[i + 1..close].iter().collect();
            let parts: Vec<&str> = inner.split(|c: char| c == '⋏' || c == '∧').flat_map(|s| s.split(" w ")).collect();
            let parts: Vec<&str> = if parts.len() == 2 {
                parts
            } else {
                // allow "x w y" without surrounding spaces only as separate token
                let toks: Vec<&str> = inner.split_whitespace().collect();
                let pos = toks.iter().position(|&t| t == "w").ok_or_else(|| bad("missing `w` separator"))?;
                let (a, b) = toks.split_at(pos);
                return Self::parse_rest(text, pc, &chars, close, factors, (a.join(" "), b[1..].join(" ")));
            };
            let (x, y) = (parse_element(parts[0], pc)?, parse_element(parts[1], pc)?);
            i = close + 1;
            let e = parse_exponent(&chars, &mut i).map_err(|m| bad(&m))?;
            factors.push((x, y, e));
        }
        Ok(WedgeWord { factors })
    }

    fn parse_rest(
        text: &str,
        pc: &PcPresentation,
        chars: &[char],
        close: usize,
        mut factors: Vec<(Element, Element, i64)>,
        first: (String, String),
    ) -> Result<WedgeWord> {
        let bad = |m: &str| Error::InvalidArgument(format!("wedge word `{text}`: {m}"));
        let (x, y) = (parse_element(&first.0, pc)?, parse_element(&first.1, pc)?);
        let mut i = close + 1;
        let e = parse_exponent(chars, &mut i).map_err(|m| bad(&m))?;
        factors.push((x, y, e));
        let rest: String = chars[i..].iter().collect();
        let tail = WedgeWord::parse(&rest, pc)?;
        factors.extend(tail.factors);
        Ok(WedgeWord { factors })
    }
}

fn parse_exponent(chars: &[char], i: &mut usize) -> std::result::Result<i64, String> {
    if *i < chars.len() && chars[*i] == '^' {
        *i += 1;
        let start = *i;
        if *i < chars.len() && (chars[*i] == '-' || chars[*i] == '+') {
            *i += 1;
        }
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        let s: String = chars[start..*i].iter().collect();
        s.parse().map_err(|_| format!("bad exponent `{s}`"))
    } else {
        Ok(1)
    }
}

/// Parse a pc word where `gK` or a single letter names a generator.
pub fn parse_element(text: &str, pc: &PcPresentation) -> Result<Element> {
    let mut terms = Vec::new();
    let n = pc.num_gens();
    let t = text.trim();
    if t == "1" || t.is_empty() {
        return Ok(pc.identity());
    }
    for tok in t.split_whitespace() {
        let (g, e) = match tok.split_once('^') {
            Some((g, e)) => {
                (g, e.parse::<i64>().map_err(|_| Error::InvalidArgument(format!("bad exponent in `{tok}`")))?)
            }
            None => (tok, 1),
        };
        let idx = if let Some(k) = g.strip_prefix('g').and_then(|k| k.parse::<usize>().ok()) {
            k.checked_sub(1)
        } else if g.len() == 1 && g.as_bytes()[0].is_ascii_lowercase() && g != "w" {
            Some((g.as_bytes()[0] - b'a') as usize)
        } else {
            None
        };
        let idx = idx.filter(|&i| i < n).ok_or_else(|| Error::InvalidArgument(format!("unknown generator `{g}`")))?;
        if e != 0 {
            terms.push((idx, e));
        }
    }
    pc.collect(&crate::presentations::Word(terms))
}

impl fmt::Display for WedgeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (x, y, e) in &self.factors {
            write!(f, "({x} w {y})")?;
            if *e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for WedgeWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

// -------------------------------------------------------------------------
// results

/// Outcome of a wedge computation.
#[derive(Clone, Debug, Serialize)]
pub struct WedgeResult {
    pub engine: EngineKind,
    pub variant: Variant,
    pub group: String,
    /// `|G ⋏ G|` or `|G ∧ G|`
    pub wedge_order: u128,
    /// `|[G, G]|`, the order of the commutator image
    pub image_order: u128,
    /// `B0(G)` or `M(G)`
    pub kernel: AbelianType,
    /// wedge words generating the kernel
    pub generators: Vec<WedgeWord>,
    /// whether `generators` was verified to generate the whole kernel
    pub generators_complete: bool,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    key: u64,
    #[serde(skip)]
    model: Arc<Model>,
}

impl WedgeResult {
    pub fn engine_tag(&self) -> &'static str {
        self.engine.tag()
    }
}

#[derive(Debug)]
enum Model {
    Tc(TcModel),
    Linear(LinearModel),
}

/// Image of a wedge word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WedgeValue {
    /// commutator image in `[G, G]`
    pub commutator: String,
    pub in_kernel: bool,
    pub nontrivial: bool,
    /// kernel coordinates (invariant-factor basis) when in the kernel
    pub kernel_coords: Option<Vec<u64>>,
}

/// Identity of a group for staleness checks.
pub fn group_key(g: &Group) -> u64 {
    let mut h = DefaultHasher::new();
    match g {
        Group::Table(t) => {
            t.order().hash(&mut h);
            for x in 0..t.order() {
                for y in 0..t.order() {
                    (t.mul(x, y) as u16).hash(&mut h);
                }
            }
        }
        Group::Class2(c) => {
            c.p().hash(&mut h);
            c.d().hash(&mut h);
            format!("{:?}", c.relations()).hash(&mut h);
        }
    }
    h.finish()
}

fn pc_of(g: &Group) -> Result<(PcPresentation, Option<PcModel>)> {
    match g {
        Group::Table(t) => {
            let m = t.pc_model()?;
            Ok((m.pc.clone(), Some(m)))
        }
        Group::Class2(c) => Ok((c.to_pcp()?, None)),
    }
}

// -------------------------------------------------------------------------
// tc engine

struct WedgeRelators<'a> {
    g: &'a TableGroup,
    variant: Variant,
}

impl<'a> RelatorSource for WedgeRelators<'a> {
    fn num_gens(&self) -> usize {
        self.g.order() * self.g.order()
    }

    fn for_each_relator(&self, f: &mut dyn FnMut(&[Letter])) {
        let g = self.g;
        let n = g.order();
        let s = |x: usize, y: usize, inv: bool| letter(x * n + y, inv);
        for x in 0..n {
            f(&[s(x, x, false)]);
        }
        if self.variant == Variant::Curly {
            for x in 0..n {
                for y in 0..n {
                    if x != y && g.commute(x, y) {
                        f(&[s(x, y, false)]);
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = g.mul(x, y);
                let yinv = g.inv(y);
                for z in 0..n {
                    // xy ∧ z = (x^y ∧ z^y)(y ∧ z)
                    let xy_ = g.mul(g.mul(yinv, x), y);
                    let zy = g.mul(g.mul(yinv, z), y);
                    f(&[s(xy, z, true), s(xy_, zy, false), s(y, z, false)]);
                    // x ∧ yz = (x ∧ z)(x^z ∧ y^z)  (here with y, z renamed)
                    let yz = g.mul(y, z);
                    let zinv = g.inv(z);
                    let xz = g.mul(g.mul(zinv, x), z);
                    let yzc = g.mul(g.mul(zinv, y), z);
                    f(&[s(x, yz, true), s(x, z, false), s(xz, yzc, false)]);
                }
            }
        }
    }
}

#[derive(Debug)]
struct TcModel {
    table: CosetTable,
    n: usize,
    /// commutator image of each coset (table element)
    kappa: Vec<usize>,
    /// BFS tree: (parent coset, reduced letter)
    parent: Vec<(usize, Letter)>,
    /// representative symbol `(x, y)` of each reduced generator, oriented so
    /// the reduced generator equals `x ∧ y`
    class_rep: Vec<(usize, usize)>,
    kernel: Vec<usize>,
    pcm: Option<PcModel>,
}

impl TcModel {
    fn word_of(&self, mut c: usize) -> Vec<Letter> {
        let mut w = Vec::new();
        while c != 0 {
            let (p, l) = self.parent[c];
            w.push(l);
            c = p;
        }
        w.reverse();
        w
    }

    fn mul_cosets(&self, a: usize, b: usize) -> usize {
        let mut c = a;
        for l in self.word_of(b) {
            c = self.table.act_reduced(c, l);
        }
        c
    }

    fn order_of(&self, c: usize) -> u64 {
        let w = self.word_of(c);
        let mut k = 1;
        let mut cur = c;
        while cur != 0 {
            for &l in &w {
                cur = self.table.act_reduced(cur, l);
            }
            k += 1;
        }
        k
    }

    fn as_wedge_word(&self, c: usize) -> Option<WedgeWord> {
        let pcm = self.pcm.as_ref()?;
        let mut factors: Vec<(Element, Element, i64)> = Vec::new();
        for l in self.word_of(c) {
            let (x, y) = self.class_rep[(l >> 1) as usize];
            let e = if l & 1 == 1 { -1 } else { 1 };
            let (ex, ey) = (pcm.element(x), pcm.element(y));
            match factors.last_mut() {
                Some(last) if last.0 == ex && last.1 == ey => last.2 += e,
                _ => factors.push((ex, ey, e)),
            }
        }
        factors.retain(|f| f.2 != 0);
        Some(WedgeWord { factors })
    }
}

/// Coset enumeration engine for `G ⋏ G` (curly) or `G ∧ G` (exterior).
pub fn curly_wedge_tc(g: &TableGroup, variant: Variant, order_cap: usize, caps: TcCaps) -> Result<WedgeResult> {
    let start = Instant::now();
    let cap = order_cap.min(MAX_TC_CAP);
    if g.order() > cap {
        return Err(Error::TableCap { order: g.order() as u128, cap });
    }
    let n = g.order();
    let src = WedgeRelators { g, variant };
    let table = todd_coxeter(&src, &[], caps)?;
    if (n as u64).pow(3) * 2 * (table.index() as u64) <= 400_000_000 {
        table.verify(&src)?;
    }
    let idx = table.index();
    let k = table.reduced_cols() / 2;

    // representative symbol per reduced generator
    let mut class_rep = vec![(usize::MAX, usize::MAX); k];
    for sym in 0..n * n {
        if let Some(r) = table.reduced_letter(letter(sym, false)) {
            let cls = (r >> 1) as usize;
            if class_rep[cls].0 == usize::MAX && r & 1 == 0 {
                class_rep[cls] = (sym / n, sym % n);
            }
        }
    }
    for sym in 0..n * n {
        if let Some(r) = table.reduced_letter(letter(sym, false)) {
            let cls = (r >> 1) as usize;
            if class_rep[cls].0 == usize::MAX {
                // only inverted members: use (y, x), since y ∧ x = (x ∧ y)^{-1}
                class_rep[cls] = (sym % n, sym / n);
            }
        }
    }
    // every symbol of a class must have the same commutator image
    for sym in 0..n * n {
        let (x, y) = (sym / n, sym % n);
        let c = g.comm(x, y);
        match table.reduced_letter(letter(sym, false)) {
            None => {
                if c != g.identity() {
                    return Err(Error::Internal(format!("symbol {x}∧{y} is trivial but [x,y] is not")));
                }
            }
            Some(r) => {
                let (a, b) = class_rep[(r >> 1) as usize];
                let rc = g.comm(a, b);
                let want = if r & 1 == 1 { g.inv(rc) } else { rc };
                if want != c {
                    return Err(Error::Internal("identified symbols have different commutators".into()));
                }
            }
        }
    }
    // BFS for words and commutator images
    let mut kappa = vec![usize::MAX; idx];
    let mut parent = vec![(0usize, 0 as Letter); idx];
    kappa[0] = g.identity();
    let mut queue = std::collections::VecDeque::from([0usize]);
    let val = |l: Letter| {
        let (a, b) = class_rep[(l >> 1) as usize];
        let c = g.comm(a, b);
        if l & 1 == 1 {
            g.inv(c)
        } else {
            c
        }
    };
    while let Some(c) = queue.pop_front() {
        for l in 0..(2 * k) as Letter {
            let d = table.act_reduced(c, l);
            if kappa[d] == usize::MAX {
                kappa[d] = g.mul(kappa[c], val(l));
                parent[d] = (c, l);
                queue.push_back(d);
            }
        }
    }
    for c in 0..idx {
        for l in 0..(2 * k) as Letter {
            if kappa[table.act_reduced(c, l)] != g.mul(kappa[c], val(l)) {
                return Err(Error::Internal("commutator map is not well defined on the coset table".into()));
            }
        }
    }
    let kernel: Vec<usize> = (0..idx).filter(|&c| kappa[c] == g.identity()).collect();
    let image: HashSet<usize> = kappa.iter().copied().collect();
    let derived = g.derived_subgroup();
    if image.len() != derived.order() {
        return Err(Error::Internal(format!(
            "commutator image has order {} but [G,G] has order {}",
            image.len(),
            derived.order()
        )));
    }
    let pcm = g.pc_model().ok();
    let model = TcModel { table, n, kappa, parent, class_rep, kernel, pcm };
    // kernel structure
    for &a in &model.kernel {
        for &b in &model.kernel {
            if model.mul_cosets(a, b) != model.mul_cosets(b, a) {
                return Err(Error::Internal("kernel of the commutator map is not abelian".into()));
            }
        }
    }
    let orders: Vec<u64> = model.kernel.iter().map(|&c| model.order_of(c)).collect();
    let kernel_type = AbelianType::from_element_orders(&orders);
    // generators: shortest words first
    let mut by_len: Vec<usize> = model.kernel.iter().copied().filter(|&c| c != 0).collect();
    by_len.sort_by_key(|&c| (model.word_of(c).len(), c));
    let mut gens_cosets: Vec<usize> = Vec::new();
    let mut span: HashSet<usize> = HashSet::from([0]);
    for c in by_len {
        if span.len() == model.kernel.len() {
            break;
        }
        if span.contains(&c) {
            continue;
        }
        gens_cosets.push(c);
        let mut frontier: Vec<usize> = span.iter().copied().collect();
        while let Some(a) = frontier.pop() {
            for &gc in &gens_cosets {
                let b = model.mul_cosets(a, gc);
                if span.insert(b) {
                    frontier.push(b);
                }
            }
        }
    }
    let generators: Vec<WedgeWord> = gens_cosets.iter().filter_map(|&c| model.as_wedge_word(c)).collect();
    let complete = generators.len() == gens_cosets.len();
    Ok(WedgeResult {
        engine: EngineKind::Tc,
        variant,
        group: g.name().to_string(),
        wedge_order: idx as u128,
        image_order: derived.order() as u128,
        kernel: kernel_type,
        generators,
        generators_complete: complete,
        elapsed: start.elapsed(),
        key: group_key(&Group::Table(g.clone())),
        model: Arc::new(Model::Tc(model)),
    })
}

// -------------------------------------------------------------------------
// linear engine

/// Full-rank sublattice of `Z^k` in Hermite form, used for quotients of
/// `⊕ Z/d_i`.
#[derive(Clone, Debug)]
struct Lattice {
    k: usize,
    rows: Vec<Vec<i128>>,
    moduli: Vec<i128>,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

impl Lattice {
    /// The lattice spanned by `d_i e_i`.
    fn diagonal(moduli: &[i128]) -> Self {
        let k = moduli.len();
        let rows = (0..k)
            .map(|i| {
                let mut r = vec![0i128; k];
                r[i] = moduli[i];
                r
            })
            .collect();
        Lattice { k, rows, moduli: moduli.to_vec() }
    }

    fn insert(&mut self, v: &[i128]) -> bool {
        let mut v: Vec<i128> = v.iter().zip(&self.moduli).map(|(x, m)| x.rem_euclid(*m)).collect();
        let mut changed = false;
        for c in 0..self.k {
            if v[c] == 0 {
                continue;
            }
            let a = self.rows[c][c];
            let b = v[c];
            if b % a == 0 {
                let q = b / a;
                for j in c..self.k {
                    v[j] -= q * self.rows[c][j];
                }
            } else {
                let (g, s, t) = ext_gcd(a, b);
                let new_row: Vec<i128> = (0..self.k).map(|j| s * self.rows[c][j] + t * v[j]).collect();
                let new_v: Vec<i128> = (0..self.k).map(|j| (a / g) * v[j] - (b / g) * self.rows[c][j]).collect();
                self.rows[c] = new_row;
                v = new_v;
                changed = true;
            }
            for j in c + 1..self.k {
                v[j] = v[j].rem_euclid(self.moduli[j]);
            }
        }
        if changed {
            self.normalize();
        }
        changed
    }

    fn normalize(&mut self) {
        for c in 0..self.k {
            if self.rows[c][c] < 0 {
                for x in self.rows[c].iter_mut() {
                    *x = -*x;
                }
            }
        }
        for c in (0..self.k).rev() {
            let piv = self.rows[c][c];
            for i in 0..c {
                let q = self.rows[i][c].div_euclid(piv);
                if q != 0 {
                    for j in c..self.k {
                        let v = self.rows[c][j];
                        self.rows[i][j] -= q * v;
                    }
                }
            }
        }
    }

    fn index(&self) -> u128 {
        self.rows.iter().enumerate().map(|(i, r)| r[i] as u128).product()
    }

    /// Invariant factors of `Z^k / lattice` and the coordinate change.
    fn quotient(&self) -> (Vec<i128>, Vec<Vec<i128>>) {
        let rows: Vec<Vec<i64>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| i64::try_from(x).expect("lattice entry fits")).collect())
            .collect();
        if self.k == 0 {
            return (Vec::new(), Vec::new());
        }
        let snf = smith_normal_form(&IntMatrix::from_rows(&rows, self.k));
        let d: Vec<i128> = snf.d.iter().map(|x| x.to_i128().expect("fits")).collect();
        let v: Vec<Vec<i128>> =
            (0..self.k).map(|i| (0..self.k).map(|j| snf.v.get(i, j).to_i128().expect("fits")).collect()).collect();
        (d, v)
    }
}

#[derive(Debug)]
struct LinearModel {
    pc: PcPresentation,
    /// SNF column transform of the tail relations (`r × r`)
    v: Vec<Vec<i128>>,
    /// per transformed coordinate: 0 = free, 1 = trivial, d > 1 = torsion
    diag: Vec<i128>,
    torsion: Vec<usize>,
    /// quotient of the torsion coordinates by the killed subgroup
    q_diag: Vec<i128>,
    q_v: Vec<Vec<i128>>,
}

impl LinearModel {
    fn transform(&self, t: &[i64]) -> Vec<i128> {
        let r = t.len();
        (0..r).map(|j| (0..r).map(|i| t[i] as i128 * self.v[i][j]).sum()).collect()
    }

    /// Torsion coordinates of a tail lying in `R ∩ [F, F]`.
    fn torsion_coords(&self, t: &[i64]) -> Result<Vec<i128>> {
        let y = self.transform(t);
        for (j, &d) in self.diag.iter().enumerate() {
            if d == 0 && y[j] != 0 {
                return Err(Error::Internal("commutator tail has a free component".into()));
            }
        }
        Ok(self.torsion.iter().map(|&j| y[j].rem_euclid(self.diag[j])).collect())
    }

    /// Coordinates in the kernel (`M(G)` or `B0(G)`), in its invariant-factor
    /// basis, dropping trivial factors.
    fn kernel_coords(&self, t: &[i64]) -> Result<Vec<u64>> {
        let y = self.torsion_coords(t)?;
        let k = y.len();
        let z: Vec<i128> = (0..k).map(|j| (0..k).map(|i| y[i] * self.q_v[i][j]).sum()).collect();
        Ok(self.q_diag.iter().zip(&z).filter(|(&d, _)| d > 1).map(|(&d, &x)| x.rem_euclid(d) as u64).collect())
    }

    fn comm_lift(&self, x: &Element, y: &Element) -> Result<Tailed> {
        self.pc.tailed_comm(&self.pc.tailed_lift(x), &self.pc.tailed_lift(y))
    }

    fn eval(&self, w: &WedgeWord) -> Result<Tailed> {
        let mut acc = self.pc.tailed_identity();
        for (x, y, e) in &w.factors {
            let c = self.comm_lift(x, y)?;
            let f = if *e < 0 { self.pc.tailed_inv(&c)? } else { c };
            for _ in 0..e.unsigned_abs() {
                acc = self.pc.tailed_mul(&acc, &f)?;
            }
        }
        Ok(acc)
    }
}

/// What the linear engine needs to know about `G`.
struct LinearInput {
    pc: PcPresentation,
    /// representatives of `G/Z(G)`
    reps: Vec<Element>,
    center_gens: Vec<Element>,
    commute: Box<dyn Fn(usize, usize) -> bool + Sync>,
    derived_order: u128,
    name: String,
}

fn linear_input(g: &Group) -> Result<LinearInput> {
    match g {
        Group::Table(t) => {
            let pcm = t.pc_model()?;
            let z = center(t);
            let (_, label) = t.quotient_map(&z)?;
            let mut seen = HashSet::new();
            let mut reps_t = Vec::new();
            for x in 0..t.order() {
                if seen.insert(label[x]) {
                    reps_t.push(x);
                }
            }
            let reps = reps_t.iter().map(|&x| pcm.element(x)).collect();
            let center_gens = z.gens().iter().map(|&x| pcm.element(x)).collect();
            let tt = t.clone();
            let rt = reps_t.clone();
            Ok(LinearInput {
                pc: pcm.pc.clone(),
                reps,
                center_gens,
                commute: Box::new(move |i, j| tt.commute(rt[i], rt[j])),
                derived_order: t.derived_subgroup().order() as u128,
                name: t.name().to_string(),
            })
        }
        Group::Class2(c) => {
            let pc = c.to_pcp()?;
            let p = c.p();
            let rad = c.radical();
            // complement of the radical, extending it to a basis
            let mut basis = rad.clone();
            let mut comp = Vec::new();
            for i in 0..c.d() {
                let mut e = vec![0u64; c.d()];
                e[i] = 1;
                let mut trial = basis.clone();
                trial.push(e.clone());
                if crate::enumeration::fp_rank(&trial, p) > basis.len() {
                    basis = trial;
                    comp.push(e);
                }
            }
            let vs: Vec<Vec<u64>> = Class2Group::vectors(p, comp.len())
                .map(|a| {
                    let mut v = vec![0u64; c.d()];
                    for (k, &ak) in a.iter().enumerate() {
                        for (vi, ci) in v.iter_mut().zip(&comp[k]) {
                            *vi = (*vi + ak * ci) % p;
                        }
                    }
                    v
                })
                .collect();
            let reps = vs.iter().map(|v| c.to_pc_element(&(v.clone(), vec![0; c.r()]))).collect();
            let mut center_gens: Vec<Element> =
                rad.iter().map(|v| c.to_pc_element(&(v.clone(), vec![0; c.r()]))).collect();
            for t in 0..c.r() {
                let mut w = vec![0u64; c.r()];
                w[t] = 1;
                center_gens.push(c.to_pc_element(&(vec![0; c.d()], w)));
            }
            let cc = c.clone();
            Ok(LinearInput {
                pc,
                reps,
                center_gens,
                commute: Box::new(move |i, j| cc.form_on(&vs[i], &vs[j]).iter().all(|&x| x == 0)),
                derived_order: c.order() / (p as u128).pow(c.d() as u32),
                name: c.name().to_string(),
            })
        }
    }
}

/// Linear engine (tag `metab`).
pub fn linear_wedge(g: &Group, variant: Variant) -> Result<WedgeResult> {
    let start = Instant::now();
    let input = linear_input(g)?;
    let pc = &input.pc;
    let report = pc.consistency_check()?;
    if !report.consistent {
        return Err(Error::Inconsistent(report.failures));
    }
    let r = pc.num_tails();
    let rels = pc.tail_relations()?;
    let (diag, v) = if rels.is_empty() {
        (vec![0i128; r], (0..r).map(|i| (0..r).map(|j| (i == j) as i128).collect()).collect::<Vec<Vec<i128>>>())
    } else {
        let snf = smith_normal_form(&IntMatrix::from_rows(&rels, r));
        let mut d: Vec<i128> = snf.d.iter().map(|x| x.to_i128().expect("fits")).collect();
        d.resize(r, 0);
        let v = (0..r).map(|i| (0..r).map(|j| snf.v.get(i, j).to_i128().expect("fits")).collect()).collect();
        (d, v)
    };
    let free = diag.iter().filter(|&&d| d == 0).count();
    if free != pc.num_gens() {
        return Err(Error::Internal(format!("tail module has free rank {free}, expected {}", pc.num_gens())));
    }
    let torsion: Vec<usize> = (0..r).filter(|&j| diag[j] > 1).collect();
    let moduli: Vec<i128> = torsion.iter().map(|&j| diag[j]).collect();
    let mut model = LinearModel { pc: pc.clone(), v, diag, torsion, q_diag: Vec::new(), q_v: Vec::new() };
    let mut lattice = Lattice::diagonal(&moduli);
    if variant == Variant::Curly {
        let m = input.reps.len();
        let chunks: Vec<Vec<Vec<i128>>> = (0..m)
            .into_par_iter()
            .map(|i| -> Result<Vec<Vec<i128>>> {
                let mut out = Vec::new();
                for j in i + 1..m {
                    if (input.commute)(i, j) {
                        let t = pc
                            .commuting_tail(&input.reps[i], &input.reps[j])?
                            .ok_or_else(|| Error::Internal("commuting pair does not commute in pc form".into()))?;
                        out.push(model.torsion_coords(&t)?);
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut seen: HashSet<Vec<i128>> = HashSet::new();
        for chunk in chunks {
            for vct in chunk {
                if vct.iter().any(|&x| x != 0) && seen.insert(vct.clone()) {
                    lattice.insert(&vct);
                }
            }
        }
        for z in &input.center_gens {
            for i in 0..pc.num_gens() {
                let t = pc
                    .commuting_tail(z, &pc.generator(i))?
                    .ok_or_else(|| Error::Internal("central element does not commute".into()))?;
                lattice.insert(&model.torsion_coords(&t)?);
            }
        }
    }
    let (q_diag, q_v) = lattice.quotient();
    model.q_diag = q_diag;
    model.q_v = q_v;
    let kernel =
        AbelianType::from_orders(&model.q_diag.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect::<Vec<_>>());
    if kernel.order() != lattice.index() {
        return Err(Error::Internal("kernel order mismatch in the linear engine".into()));
    }
    let (generators, complete) = find_generators(&model, &input, &kernel, variant)?;
    Ok(WedgeResult {
        engine: EngineKind::Linear,
        variant,
        group: input.name.clone(),
        wedge_order: input.derived_order * kernel.order(),
        image_order: input.derived_order,
        kernel,
        generators,
        generators_complete: complete,
        elapsed: start.elapsed(),
        key: group_key(g),
        model: Arc::new(Model::Linear(model)),
    })
}

/// Look for kernel generators of the form `(x ∧ y)(u ∧ v)^{-1}` with
/// `[x, y] = [u, v]` (and single `x ∧ y` with `[x, y] = 1`), first over pc
/// generators, then over central-quotient representatives.
fn find_generators(
    model: &LinearModel,
    input: &LinearInput,
    kernel: &AbelianType,
    variant: Variant,
) -> Result<(Vec<WedgeWord>, bool)> {
    if kernel.is_trivial() {
        return Ok((Vec::new(), true));
    }
    let moduli: Vec<i128> = model.q_diag.iter().filter(|&&d| d > 1).copied().collect();
    let mut lat = Lattice::diagonal(&moduli);
    let mut gens = Vec::new();
    let pc = &model.pc;
    let n = pc.num_gens();
    let mut pools: Vec<Vec<Element>> = vec![(0..n).map(|i| pc.generator(i)).collect()];
    if input.reps.len() <= 128 {
        pools.push(input.reps.clone());
    }
    for pool in pools {
        let mut base: HashMap<Element, (Element, Element, Vec<i64>)> = HashMap::new();
        for (a, x) in pool.iter().enumerate() {
            for y in pool.iter().skip(a + 1) {
                let c = model.comm_lift(x, y)?;
                let comm = Element(c.exps.clone());
                let candidate = if comm.is_identity() {
                    if variant == Variant::Curly {
                        continue;
                    }
                    Some((WedgeWord::new(vec![(x.clone(), y.clone(), 1)]), c.tail.clone()))
                } else {
                    match base.get(&comm) {
                        None => {
                            base.insert(comm, (x.clone(), y.clone(), c.tail.clone()));
                            None
                        }
                        Some((u, v, t0)) => {
                            let t: Vec<i64> = c.tail.iter().zip(t0).map(|(a, b)| a - b).collect();
                            Some((WedgeWord::new(vec![(x.clone(), y.clone(), 1), (u.clone(), v.clone(), -1)]), t))
                        }
                    }
                };
                if let Some((w, t)) = candidate {
                    let coords = model.kernel_coords(&t)?;
                    let cv: Vec<i128> = coords.iter().map(|&x| x as i128).collect();
                    if lat.insert(&cv) {
                        gens.push(w);
                        if lat.index() == 1 {
                            return Ok((gens, true));
                        }
                    }
                }
            }
        }
    }
    Ok((gens, false))
}

// -------------------------------------------------------------------------
// dispatch

fn pick(g: &Group, opts: &WedgeOptions) -> EngineKind {
    match opts.engine {
        EngineChoice::Tc => EngineKind::Tc,
        EngineChoice::Linear => EngineKind::Linear,
        EngineChoice::Auto => {
            if g.pc_presentation().is_ok() {
                EngineKind::Linear
            } else {
                EngineKind::Tc
            }
        }
    }
}

fn run(g: &Group, variant: Variant, kind: EngineKind, opts: &WedgeOptions) -> Result<WedgeResult> {
    match kind {
        EngineKind::Linear => linear_wedge(g, variant),
        EngineKind::Tc => {
            let cap = opts.tc_cap.min(MAX_TC_CAP);
            let t = g.to_table(cap).map_err(|_| {
                Error::EngineInapplicable(format!(
                    "tc engine needs a table of order at most {cap}, group has order {}",
                    g.order()
                ))
            })?;
            curly_wedge_tc(&t, variant, cap, opts.caps)
        }
    }
}

fn wedge_dispatch(g: &Group, variant: Variant, opts: &WedgeOptions) -> Result<WedgeResult> {
    let kind = pick(g, opts);
    let res = run(g, variant, kind, opts)?;
    if opts.engine == EngineChoice::Auto && g.order() <= opts.cross_check_upto as u128 {
        let other = if kind == EngineKind::Linear { EngineKind::Tc } else { EngineKind::Linear };
        if let Ok(o) = run(g, variant, other, opts) {
            if o.kernel != res.kernel || o.wedge_order != res.wedge_order {
                return Err(Error::Internal(format!(
                    "engines disagree on {}: {} gives {}, {} gives {}",
                    g.name(),
                    res.engine_tag(),
                    res.kernel,
                    o.engine_tag(),
                    o.kernel
                )));
            }
        }
    }
    Ok(res)
}

/// `B0(G)` through `G ⋏ G`.
pub fn b0(g: &Group, opts: &WedgeOptions) -> Result<WedgeResult> {
    wedge_dispatch(g, Variant::Curly, opts)
}

/// `M(G)` through `G ∧ G`.
pub fn schur_multiplier(g: &Group, opts: &WedgeOptions) -> Result<WedgeResult> {
    wedge_dispatch(g, Variant::Exterior, opts)
}

/// Evaluate a wedge word in the wedge group of `res`.
pub fn evaluate_wedge_word(g: &Group, res: &WedgeResult, w: &WedgeWord) -> Result<WedgeValue> {
    if group_key(g) != res.key {
        return Err(Error::StaleResult);
    }
    match res.model.as_ref() {
        Model::Linear(m) => {
            for (x, y, _) in &w.factors {
                if !m.pc.is_valid(x) || !m.pc.is_valid(y) {
                    return Err(Error::InvalidArgument("wedge word element is not a normal form of this group".into()));
                }
            }
            let h = m.eval(w)?;
            let comm = Element(h.exps.clone());
            if !comm.is_identity() {
                return Ok(WedgeValue {
                    commutator: comm.to_string(),
                    in_kernel: false,
                    nontrivial: true,
                    kernel_coords: None,
                });
            }
            let coords = m.kernel_coords(&h.tail)?;
            let nontrivial = coords.iter().any(|&x| x != 0);
            Ok(WedgeValue { commutator: comm.to_string(), in_kernel: true, nontrivial, kernel_coords: Some(coords) })
        }
        Model::Tc(m) => {
            let pcm = m
                .pcm
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("group has no pc model for element names".into()))?;
            let mut c = 0usize;
            for (x, y, e) in &w.factors {
                if !pcm.pc.is_valid(x) || !pcm.pc.is_valid(y) {
                    return Err(Error::InvalidArgument("wedge word element is not a normal form of this group".into()));
                }
                let sym = pcm.table_elem(x) * m.n + pcm.table_elem(y);
                let l = letter(sym, *e < 0);
                for _ in 0..e.unsigned_abs() {
                    c = m.table.act(c, l);
                }
            }
            let comm = m.kappa[c];
            let in_kernel = m.kernel.contains(&c);
            Ok(WedgeValue {
                commutator: pcm.element(comm).to_string(),
                in_kernel,
                nontrivial: c != 0,
                kernel_coords: None,
            })
        }
    }
}

/// Convenience: evaluate and report whether `w` is a nontrivial element of
/// the kernel.
pub fn is_nontrivial_kernel_element(g: &Group, res: &WedgeResult, w: &WedgeWord) -> Result<bool> {
    let v = evaluate_wedge_word(g, res, w)?;
    Ok(v.in_kernel && v.nontrivial)
}

/// Parse a wedge word against a group's pc presentation.
pub fn parse_wedge_word(g: &Group, text: &str) -> Result<WedgeWord> {
    let (pc, _) = pc_of(g)?;
    WedgeWord::parse(text, &pc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupcore::{direct_product, group_from_class2};
    use crate::presentations::parse_pcp;

    fn table(src: &str) -> TableGroup {
        parse_pcp(src).unwrap().enumerate_group(4096).unwrap()
    }

    fn klein() -> TableGroup {
        direct_product(&TableGroup::cyclic(2).unwrap(), &TableGroup::cyclic(2).unwrap(), 16).unwrap()
    }

    #[test]
    fn klein_four() {
        let k = klein();
        let c = curly_wedge_tc(&k, Variant::Curly, 256, TcCaps::default()).unwrap();
        assert_eq!(c.wedge_order, 1);
        assert!(c.kernel.is_trivial());
        let e = curly_wedge_tc(&k, Variant::Exterior, 256, TcCaps::default()).unwrap();
        assert_eq!(e.wedge_order, 2);
        assert_eq!(e.kernel, AbelianType(vec![2]));
        let g = Group::Table(k);
        let l = linear_wedge(&g, Variant::Exterior).unwrap();
        assert_eq!(l.kernel, AbelianType(vec![2]));
        assert_eq!(linear_wedge(&g, Variant::Curly).unwrap().kernel, AbelianType::trivial());
    }

    #[test]
    fn cyclic_and_quaternion() {
        for n in 1..=12 {
            let g = Group::Table(TableGroup::cyclic(n).unwrap());
            assert!(linear_wedge(&g, Variant::Exterior).unwrap().kernel.is_trivial());
            let t = curly_wedge_tc(g.as_table().unwrap(), Variant::Exterior, 256, TcCaps::default()).unwrap();
            assert!(t.kernel.is_trivial());
        }
        let q8 =
            table("gens 3\norder g1 = 2\norder g2 = 2\norder g3 = 2\npow g1 = g3\npow g2 = g3\nconj g2 g1 = g2 g3\n");
        let t = curly_wedge_tc(&q8, Variant::Exterior, 256, TcCaps::default()).unwrap();
        assert!(t.kernel.is_trivial());
        assert_eq!(t.wedge_order, 2);
        let l = linear_wedge(&Group::Table(q8), Variant::Exterior).unwrap();
        assert!(l.kernel.is_trivial());
    }

    #[test]
    fn dihedral_multiplier() {
        let d4 = table("gens 3\norder g1 = 2\norder g2 = 2\norder g3 = 2\npow g2 = g3\nconj g2 g1 = g2 g3\n");
        let t = curly_wedge_tc(&d4, Variant::Exterior, 256, TcCaps::default()).unwrap();
        assert_eq!(t.kernel, AbelianType(vec![2]));
        let l = linear_wedge(&Group::Table(d4.clone()), Variant::Exterior).unwrap();
        assert_eq!(l.kernel, AbelianType(vec![2]));
        let c = curly_wedge_tc(&d4, Variant::Curly, 256, TcCaps::default()).unwrap();
        assert!(c.kernel.is_trivial());
    }

    #[test]
    fn elementary_abelian_rank_three() {
        let g = group_from_class2(
            3,
            3,
            &[
                crate::groupcore::Class2Relation::zero((0, 1)),
                crate::groupcore::Class2Relation::zero((0, 2)),
                crate::groupcore::Class2Relation::zero((1, 2)),
            ],
        )
        .unwrap();
        let r = linear_wedge(&Group::Class2(g.clone()), Variant::Exterior).unwrap();
        assert_eq!(r.kernel, AbelianType(vec![3, 3, 3]));
        assert!(r.generators_complete);
        let t = curly_wedge_tc(&g.to_table(64).unwrap(), Variant::Exterior, 256, TcCaps::default()).unwrap();
        assert_eq!(t.kernel, AbelianType(vec![3, 3, 3]));
    }

    #[test]
    fn wedge_word_parsing() {
        let pc = parse_pcp("gens 3\norder g1 = 2\norder g2 = 2\norder g3 = 2\n").unwrap();
        let w = WedgeWord::parse("(g1 w g2)(g3^1 w g1)^-1", &pc).unwrap();
        assert_eq!(w.factors.len(), 2);
        assert_eq!(w.factors[1].2, -1);
        assert_eq!(w.to_string(), "(g1 w g2)(g3 w g1)^-1");
        let v = WedgeWord::parse("(a w b c)", &pc).unwrap();
        assert_eq!(v.factors[0].1, pc.collect(&crate::presentations::Word(vec![(1, 1), (2, 1)])).unwrap());
        assert!(WedgeWord::parse("(g1 g2)", &pc).is_err());
        assert!(WedgeWord::parse("(g9 w g1)", &pc).is_err());
    }

    #[test]
    fn stale_result_detected() {
        let g = Group::Table(klein());
        let r = linear_wedge(&g, Variant::Curly).unwrap();
        let h = Group::Table(TableGroup::cyclic(4).unwrap());
        let w = WedgeWord::new(vec![]);
        assert_eq!(evaluate_wedge_word(&h, &r, &w), Err(Error::StaleResult));
    }
}
