//! Decision procedures: commuting-probability thresholds, the cubefree
//! criterion, B0-minimality, the structural checklist for B0-minimal groups,
//! and report assembly.

use serde::Serialize;

use crate::analytics::{
    census, center, cp, frattini, frattini_rank, is_stem, is_stem_class2, minimal_breadth_class2,
    minimal_breadth_subgroup, nilpotency_class, rational, subgroup_classes, upper_central_series, Rational,
    DEFAULT_LATTICE_CAP,
};
use crate::groupcore::{factorize, prime_power, AbelianType, Class2Group, Group, SubgroupHandle, TableGroup};
use crate::wedge::{b0, curly_wedge_tc, schur_multiplier, EngineChoice, Variant, WedgeOptions, WedgeResult};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `cp(G) > (2p² + p − 2)/p⁵ ⇒ B0(G) = 0` for `p`-groups
    CpPrimeBound,
    /// `cp(G) > 1/4 ⇒ B0(G) = 0`
    CpQuarter,
    /// `cp(G) > 5/8 ⇒ G abelian`
    CpFiveEighths,
    /// `|[G, G]|` cubefree `⇒ B0(G) = 0`
    CubefreeDerived,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    #[serde(rename = "applies")]
    Applies,
    #[serde(rename = "inapplicable")]
    Inapplicable,
    #[serde(rename = "counterexample!")]
    Counterexample,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub rule: Rule,
    pub outcome: Outcome,
    pub statement: &'static str,
    /// conclusion when the hypothesis holds
    pub conclusion: Option<String>,
    /// whether the conclusion was checked against a computation
    pub confirmed: Option<bool>,
    pub cp: String,
    pub bound: Option<String>,
    /// prime factorization of `|[G, G]|`
    pub derived_order: Vec<(u64, u32)>,
    /// hypothesis fails only at equality while the conclusion fails
    pub sharp: bool,
}

fn rat_str(r: &Rational) -> String {
    if r.denom() == &1.into() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn derived_order(g: &Group) -> u128 {
    match g {
        Group::Table(t) => t.derived_subgroup().order() as u128,
        Group::Class2(c) => (c.p() as u128).pow(c.r() as u32),
    }
}

fn is_abelian(g: &Group) -> bool {
    match g {
        Group::Table(t) => t.is_abelian(),
        Group::Class2(c) => c.r() == 0,
    }
}

/// Evaluate all threshold rules. `b0` is the computed Bogomolov multiplier,
/// used to confirm conclusions.
pub fn threshold_verdicts(g: &Group, b0: Option<&AbelianType>) -> Vec<Verdict> {
    let c = cp(g);
    let cps = rat_str(&c);
    let dord = derived_order(g);
    let dfac: Vec<(u64, u32)> = if dord <= 1 { Vec::new() } else { factorize(dord as u64) };
    let b0_trivial = b0.map(|b| b.is_trivial());
    let mut out = Vec::new();
    let make = |rule, statement, bound: Option<&Rational>, holds: bool, conclusion: &str, actual: Option<bool>| {
        let equal = bound.map_or(false, |b| &c == b);
        let (outcome, confirmed) = if holds {
            match actual {
                Some(false) => (Outcome::Counterexample, Some(false)),
                a => (Outcome::Applies, a),
            }
        } else {
            (Outcome::Inapplicable, None)
        };
        Verdict {
            rule,
            outcome,
            statement,
            conclusion: holds.then(|| conclusion.to_string()),
            confirmed,
            cp: cps.clone(),
            bound: bound.map(rat_str),
            derived_order: dfac.clone(),
            sharp: equal && actual == Some(false),
        }
    };
    if let Some((p, _)) = prime_power(g.order()) {
        let p = p as u128;
        let bound = rational(2 * p * p + p - 2, p.pow(5));
        out.push(make(
            Rule::CpPrimeBound,
            "for a p-group, cp(G) > (2p^2 + p - 2)/p^5 implies B0(G) = 0",
            Some(&bound),
            c > bound,
            "B0(G) = 0",
            b0_trivial,
        ));
    } else {
        out.push(Verdict {
            rule: Rule::CpPrimeBound,
            outcome: Outcome::Inapplicable,
            statement: "for a p-group, cp(G) > (2p^2 + p - 2)/p^5 implies B0(G) = 0",
            conclusion: None,
            confirmed: None,
            cp: cps.clone(),
            bound: None,
            derived_order: dfac.clone(),
            sharp: false,
        });
    }
    let quarter = rational(1, 4);
    out.push(make(
        Rule::CpQuarter,
        "cp(G) > 1/4 implies B0(G) = 0",
        Some(&quarter),
        c > quarter,
        "B0(G) = 0",
        b0_trivial,
    ));
    let five8 = rational(5, 8);
    out.push(make(
        Rule::CpFiveEighths,
        "cp(G) > 5/8 implies G is abelian",
        Some(&five8),
        c > five8,
        "G is abelian",
        Some(is_abelian(g)),
    ));
    let cubefree = dfac.iter().all(|&(_, e)| e < 3);
    let mut v =
        make(Rule::CubefreeDerived, "|[G,G]| cubefree implies B0(G) = 0", None, cubefree, "B0(G) = 0", b0_trivial);
    v.sharp = false;
    out.push(v);
    out
}

pub fn has_counterexample(vs: &[Verdict]) -> bool {
    vs.iter().any(|v| v.outcome == Outcome::Counterexample)
}

// -------------------------------------------------------------------------
// minimality

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Section {
    Subgroup { order: usize, generators: Vec<String>, b0: AbelianType },
    Quotient { order: usize, normal_generators: Vec<String>, b0: AbelianType },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum MinimalityOutcome {
    Minimal,
    NotMinimal {
        witness: Section,
    },
    #[serde(rename = "not_applicable_B0_trivial")]
    NotApplicableB0Trivial,
    Inconclusive {
        reason: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalityVerdict {
    #[serde(flatten)]
    pub outcome: MinimalityOutcome,
    pub subgroup_classes_examined: usize,
    pub normal_subgroups_examined: usize,
}

fn labels(g: &TableGroup, h: &SubgroupHandle) -> Vec<String> {
    h.gens().iter().map(|&x| g.element_label(x)).collect()
}

fn section_b0(t: TableGroup, opts: &WedgeOptions) -> Result<AbelianType> {
    let o = WedgeOptions { engine: EngineChoice::Auto, cross_check_upto: 0, ..*opts };
    Ok(b0(&Group::Table(t), &o)?.kernel)
}

/// Decide B0-minimality by examining every proper quotient and every proper
/// subgroup up to conjugacy.
pub fn b0_minimality(g: &Group, lattice_cap: usize, opts: &WedgeOptions) -> Result<MinimalityVerdict> {
    let own = b0(g, &WedgeOptions { cross_check_upto: 0, ..*opts })?;
    let done =
        |outcome, s, n| MinimalityVerdict { outcome, subgroup_classes_examined: s, normal_subgroups_examined: n };
    if own.kernel.is_trivial() {
        return Ok(done(MinimalityOutcome::NotApplicableB0Trivial, 0, 0));
    }
    if g.order() > lattice_cap as u128 {
        return Ok(done(
            MinimalityOutcome::Inconclusive {
                reason: format!("order {} exceeds the subgroup lattice cap {lattice_cap}", g.order()),
            },
            0,
            0,
        ));
    }
    let t = g.to_table(lattice_cap)?;
    let lat = subgroup_classes(&t, lattice_cap)?;
    let n = t.order();
    let mut normals = 0;
    for c in lat.classes.iter().filter(|c| c.class_size == 1 && c.rep.order() > 1 && c.rep.order() < n) {
        normals += 1;
        let q = t.quotient(&c.rep)?;
        let b = section_b0(q.clone(), opts)?;
        if !b.is_trivial() {
            let witness = Section::Quotient { order: q.order(), normal_generators: labels(&t, &c.rep), b0: b };
            reverify(&q, &witness, opts)?;
            return Ok(done(MinimalityOutcome::NotMinimal { witness }, 0, normals));
        }
    }
    let mut subs = 0;
    for c in lat.classes.iter().filter(|c| c.rep.order() > 1 && c.rep.order() < n) {
        subs += 1;
        let (h, _) = t.subgroup_table(&c.rep)?;
        if h.is_abelian() {
            continue;
        }
        let b = section_b0(h.clone(), opts)?;
        if !b.is_trivial() {
            let witness = Section::Subgroup { order: h.order(), generators: labels(&t, &c.rep), b0: b };
            reverify(&h, &witness, opts)?;
            return Ok(done(MinimalityOutcome::NotMinimal { witness }, subs, normals));
        }
    }
    Ok(done(MinimalityOutcome::Minimal, subs, normals))
}

fn reverify(s: &TableGroup, w: &Section, opts: &WedgeOptions) -> Result<()> {
    let want = match w {
        Section::Subgroup { b0, .. } | Section::Quotient { b0, .. } => b0,
    };
    if s.order() <= opts.tc_cap {
        let r = curly_wedge_tc(s, Variant::Curly, opts.tc_cap, opts.caps)?;
        if &r.kernel != want {
            return Err(Error::Internal(format!("witness B0 {} not confirmed by tc ({})", want, r.kernel)));
        }
    }
    Ok(())
}

// -------------------------------------------------------------------------
// structural checklist

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Checklist {
    pub items: Vec<CheckItem>,
    pub passed: bool,
}

impl Checklist {
    fn new(items: Vec<CheckItem>) -> Self {
        let passed = items.iter().all(|i| i.status != CheckStatus::Fail);
        Checklist { items, passed }
    }

    pub fn get(&self, name: &str) -> Option<&CheckItem> {
        self.items.iter().find(|i| i.name == name)
    }
}

fn item(name: &'static str, ok: bool, detail: impl Into<String>) -> CheckItem {
    CheckItem { name, status: if ok { CheckStatus::Pass } else { CheckStatus::Fail }, detail: detail.into() }
}

fn na(name: &'static str, detail: impl Into<String>) -> CheckItem {
    CheckItem { name, status: CheckStatus::NotApplicable, detail: detail.into() }
}

/// Smallest `e` with `x^e ∈ small` for all `x ∈ big`, as an lcm.
fn relative_exponent(g: &TableGroup, big: &SubgroupHandle, small: &SubgroupHandle) -> u64 {
    let mut e = 1u64;
    for &x in big.elements() {
        let mut k = 1u64;
        let mut y = x;
        while !small.contains(y) {
            y = g.mul(y, x);
            k += 1;
        }
        e = num_integer::lcm(e, k);
    }
    e
}

fn subgroups_commute(g: &TableGroup, a: &SubgroupHandle, b: &SubgroupHandle) -> bool {
    a.gens().iter().all(|&x| b.gens().iter().all(|&y| g.commute(x, y)))
}

/// Structural properties shared by all B0-minimal groups.
pub fn structural_checklist(g: &Group, b0: &AbelianType) -> Result<Checklist> {
    let (p, _) = prime_power(g.order()).ok_or_else(|| Error::InvalidArgument("checklist needs a p-group".into()))?;
    let exp_b0 = item("b0_prime_exponent", b0.exponent() == p, format!("exp B0 = {}", b0.exponent()));
    match g {
        Group::Table(t) => table_checklist(t, p, exp_b0),
        Group::Class2(c) => Ok(class2_checklist(c, exp_b0)),
    }
}

fn table_checklist(t: &TableGroup, p: u64, exp_b0: CheckItem) -> Result<Checklist> {
    let phi = frattini(t)?;
    let rank = frattini_rank(t)?;
    let class = nilpotency_class(t).ok_or_else(|| Error::InvalidArgument("group is not nilpotent".into()))?;
    let upper = upper_central_series(t);
    let z = center(t);
    let mut items = vec![
        item("frattini_abelian", subgroups_commute(t, &phi, &phi), format!("|Phi| = {}", phi.order())),
        item("frattini_rank", rank <= 4 && (class < 3 || rank <= 3), format!("rank {rank}, class {class}")),
        exp_b0,
    ];
    let z2 = upper.get(2).cloned().unwrap_or_else(|| upper.last().expect("nonempty").clone());
    items.push(item("z2_centralizes_frattini", subgroups_commute(t, &z2, &phi), format!("|Z2| = {}", z2.order())));
    let exps: Vec<u64> = (2..upper.len()).map(|i| relative_exponent(t, &upper[i], &upper[i - 1])).collect();
    items.push(item(
        "upper_central_factor_exponents",
        exps.iter().all(|&e| e == p),
        format!("exp Z_i/Z_(i-1) for i >= 2: {exps:?}"),
    ));
    if is_stem(t) {
        let ez = relative_exponent(t, &z, &t.trivial_subgroup());
        let ok = (p * p) % ez == 0 && (class != 2 || ez == p);
        items.push(item("stem_center_exponent", ok, format!("exp Z = {ez}, class {class}")));
    } else {
        items.push(na("stem_center_exponent", "not a stem group"));
    }
    if p == 2 {
        let m = minimal_breadth_subgroup(t);
        items.push(item("minimal_breadth_abelian", subgroups_commute(t, &m, &m), format!("|M| = {}", m.order())));
    } else {
        items.push(na("minimal_breadth_abelian", "odd p"));
    }
    Ok(Checklist::new(items))
}

/// Exponent of the center of a class-2 group: `p`, or `4` when `p = 2` and
/// some radical vector squares nontrivially.
fn class2_center_exponent(c: &Class2Group) -> u64 {
    let p = c.p();
    if p == 2 {
        for v in c.radical() {
            let x = (v, vec![0; c.r()]);
            if c.mul(&x, &x).1.iter().any(|&a| a != 0) {
                return 4;
            }
        }
    }
    if c.radical().is_empty() && c.r() == 0 {
        1
    } else {
        p
    }
}

fn class2_checklist(c: &Class2Group, exp_b0: CheckItem) -> Checklist {
    let p = c.p();
    let class = c.class();
    let d = c.d();
    let mut items = vec![
        item("frattini_abelian", true, "Phi = [G,G] is central"),
        item("frattini_rank", d <= 4 && (class < 3 || d <= 3), format!("rank {d}, class {class}")),
        exp_b0,
        item("z2_centralizes_frattini", true, "class 2: Phi is central"),
    ];
    let factor = if class >= 2 { vec![p] } else { Vec::new() };
    items.push(item(
        "upper_central_factor_exponents",
        factor.iter().all(|&e| e == p),
        format!("exp Z_i/Z_(i-1) for i >= 2: {factor:?}"),
    ));
    if is_stem_class2(c) {
        let ez = class2_center_exponent(c);
        let ok = (p * p) % ez == 0 && (class != 2 || ez == p);
        items.push(item("stem_center_exponent", ok, format!("exp Z = {ez}, class {class}")));
    } else {
        items.push(na("stem_center_exponent", "not a stem group"));
    }
    if p == 2 {
        let (basis, ab) = minimal_breadth_class2(c);
        items.push(item("minimal_breadth_abelian", ab, format!("rank of span = {}", basis.len())));
    } else {
        items.push(na("minimal_breadth_abelian", "odd p"));
    }
    Checklist::new(items)
}

// -------------------------------------------------------------------------
// report

#[derive(Clone, Copy, Debug)]
pub struct ReportOptions {
    pub wedge: WedgeOptions,
    pub schur: bool,
    pub minimality: bool,
    /// force the checklist even when minimality is not established
    pub checklist: bool,
    pub lattice_cap: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            wedge: WedgeOptions::default(),
            schur: false,
            minimality: false,
            checklist: false,
            lattice_cap: DEFAULT_LATTICE_CAP,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CpField {
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct WedgeField {
    #[serde(rename = "type")]
    pub kind: Vec<u64>,
    pub engine: &'static str,
    pub generators: Vec<String>,
    pub wedge_order: String,
}

impl From<&WedgeResult> for WedgeField {
    fn from(r: &WedgeResult) -> Self {
        WedgeField {
            kind: r.kernel.0.clone(),
            engine: r.engine_tag(),
            generators: r.generators.iter().map(|w| w.to_string()).collect(),
            wedge_order: r.wedge_order.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub group: String,
    pub order: String,
    pub class: Option<usize>,
    pub k: String,
    pub cp: CpField,
    pub center: Option<Vec<u64>>,
    pub derived: Option<Vec<u64>>,
    pub stem: bool,
    pub frattini_rank: Option<usize>,
    pub b0: WedgeField,
    pub m: Option<WedgeField>,
    pub verdicts: Vec<Verdict>,
    pub minimality: Option<MinimalityVerdict>,
    pub checklist: Option<Checklist>,
}

fn class2_center_type(c: &Class2Group) -> AbelianType {
    let p = c.p();
    let rad = c.radical();
    let mut fours = 0usize;
    if p == 2 {
        let images: Vec<Vec<u64>> = rad
            .iter()
            .map(|v| {
                let x = (v.clone(), vec![0; c.r()]);
                c.mul(&x, &x).1
            })
            .filter(|w| w.iter().any(|&a| a != 0))
            .collect();
        fours = if images.is_empty() { 0 } else { crate::enumeration::fp_rank(&images, 2) };
    }
    let twos = rad.len() + c.r() - 2 * fours;
    let mut v = vec![p; twos];
    v.extend(std::iter::repeat(p * p).take(fours));
    AbelianType::from_orders(&v)
}

/// Full analysis of one group.
pub fn report(g: &Group, opts: &ReportOptions) -> Result<Report> {
    let cen = census(g);
    let c = cp(g);
    let b = b0(g, &opts.wedge)?;
    let m = if opts.schur { Some(WedgeField::from(&schur_multiplier(g, &opts.wedge)?)) } else { None };
    let verdicts = threshold_verdicts(g, Some(&b.kernel));
    let minimality = if opts.minimality { Some(b0_minimality(g, opts.lattice_cap, &opts.wedge)?) } else { None };
    let is_min = matches!(minimality.as_ref().map(|m| &m.outcome), Some(MinimalityOutcome::Minimal));
    let checklist = if (is_min || opts.checklist) && prime_power(g.order()).is_some() {
        Some(structural_checklist(g, &b.kernel)?)
    } else {
        None
    };
    let (class, center_t, derived_t, stem, frank) = match g {
        Group::Table(t) => {
            let z = center(t);
            let d = t.derived_subgroup();
            let frank = if prime_power(t.order() as u128).is_some() { frattini_rank(t).ok() } else { None };
            (
                nilpotency_class(t),
                t.abelian_type_of(&z).ok().map(|a| a.0),
                t.abelian_type_of(&d).ok().map(|a| a.0),
                is_stem(t),
                frank,
            )
        }
        Group::Class2(c2) => (
            Some(c2.class()),
            Some(class2_center_type(c2).0),
            Some(vec![c2.p(); c2.r()]),
            is_stem_class2(c2),
            Some(c2.d()),
        ),
    };
    Ok(Report {
        group: g.name().to_string(),
        order: g.order().to_string(),
        class,
        k: cen.k.to_string(),
        cp: CpField { num: c.numer().to_string(), den: c.denom().to_string() },
        center: center_t,
        derived: derived_t,
        stem,
        frattini_rank: frank,
        b0: WedgeField::from(&b),
        m,
        verdicts,
        minimality,
        checklist,
    })
}

/// Center type of any group.
pub fn center_type(g: &Group) -> Result<AbelianType> {
    match g {
        Group::Table(t) => t.abelian_type_of(&center(t)),
        Group::Class2(c) => Ok(class2_center_type(c)),
    }
}

/// Stem test for any group.
pub fn stem(g: &Group) -> bool {
    match g {
        Group::Table(t) => is_stem(t),
        Group::Class2(c) => is_stem_class2(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build;

    #[test]
    fn heis3_thresholds() {
        let g = build("heis:3").unwrap();
        let vs = threshold_verdicts(&g, Some(&AbelianType::trivial()));
        assert_eq!(vs[0].outcome, Outcome::Applies);
        assert_eq!(vs[0].cp, "11/27");
        assert_eq!(vs[0].confirmed, Some(true));
        assert!(!has_counterexample(&vs));
    }

    #[test]
    fn fake_b0_triggers_counterexample() {
        let g = build("heis:3").unwrap();
        let vs = threshold_verdicts(&g, Some(&AbelianType(vec![3])));
        assert!(has_counterexample(&vs));
        let json = serde_json::to_string(&vs).unwrap();
        assert!(json.contains("counterexample!"));
    }

    #[test]
    fn e64_sharp_quarter() {
        let g = build("e64").unwrap();
        let vs = threshold_verdicts(&g, Some(&AbelianType(vec![2])));
        let q = vs.iter().find(|v| v.rule == Rule::CpQuarter).unwrap();
        assert_eq!(q.outcome, Outcome::Inapplicable);
        assert!(q.sharp);
    }

    #[test]
    fn minimality_small_cases() {
        let o = WedgeOptions::default();
        let c8 = build("cyclic:8").unwrap();
        assert_eq!(b0_minimality(&c8, 256, &o).unwrap().outcome, MinimalityOutcome::NotApplicableB0Trivial);
        let e = build("e64").unwrap();
        assert_eq!(b0_minimality(&e, 256, &o).unwrap().outcome, MinimalityOutcome::Minimal);
        let big = build("g2:3").unwrap();
        assert!(matches!(b0_minimality(&big, 256, &o).unwrap().outcome, MinimalityOutcome::Inconclusive { .. }));
    }

    #[test]
    fn class2_center_types() {
        let g = build("g2:2").unwrap();
        let t = g.to_table(4096).unwrap();
        assert_eq!(center_type(&g).unwrap(), t.abelian_type_of(&center(&t)).unwrap());
        let g = build("g1:2").unwrap();
        let t = g.to_table(4096).unwrap();
        assert_eq!(center_type(&g).unwrap(), t.abelian_type_of(&center(&t)).unwrap());
    }
}
