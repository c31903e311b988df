//! Reproduction suites: recompute the invariants of the catalog groups and
//! compare them with their expected records.

use serde::Serialize;

use crate::analytics::{census, center, cp, maximal_subgroups, nilpotency_class, rational};
use crate::catalog::{build, expected, Origin, LIST_KEYS};
use crate::groupcore::{Group, TableGroup};
use crate::pairings::check_catalog_pairing;
use crate::verdicts::{b0_minimality, center_type, has_counterexample, stem, threshold_verdicts, MinimalityOutcome};
use crate::wedge::{b0, curly_wedge_tc, Variant, WedgeOptions};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Thresholds,
    Class2,
    Gn,
    Pairings,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "thresholds" => Ok(Suite::Thresholds),
            "class2" => Ok(Suite::Class2),
            "gn" => Ok(Suite::Gn),
            "pairings" => Ok(Suite::Pairings),
            _ => Err(Error::InvalidArgument(format!("unknown suite `{s}` (all, thresholds, class2, gn, pairings)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// a threshold rule was violated
    pub counterexample: bool,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into(), counterexample: false }
}

fn eq_check<T: PartialEq + std::fmt::Debug>(name: String, got: T, want: T, origin: Origin) -> Check {
    let ok = got == want;
    check(name, ok, format!("got {got:?}, expected {want:?} [{origin}]"))
}

/// Compare a catalog entry with its expected record.
pub fn check_entry(key: &str, opts: &WedgeOptions, minimality: bool) -> Result<Vec<Check>> {
    let g = build(key)?;
    let e = expected(key)?;
    let mut out = Vec::new();
    if let Some(o) = &e.order {
        out.push(eq_check(format!("{key} order"), g.order(), o.value, o.origin));
    }
    if let Some(c) = &e.class {
        let got = match &g {
            Group::Table(t) => nilpotency_class(t),
            Group::Class2(c2) => Some(c2.class()),
        };
        out.push(eq_check(format!("{key} class"), got, Some(c.value), c.origin));
    }
    let cen = census(&g);
    if let Some(k) = &e.k {
        out.push(eq_check(format!("{key} k"), cen.k, k.value, k.origin));
    }
    if let Some(c) = &e.cp {
        let got = cp(&g);
        out.push(eq_check(format!("{key} cp"), got.to_string(), rational(c.value.0, c.value.1).to_string(), c.origin));
    }
    if let Some(s) = &e.stem {
        out.push(eq_check(format!("{key} stem"), stem(&g), s.value, s.origin));
    }
    if let Some(z) = &e.center {
        out.push(eq_check(format!("{key} center"), center_type(&g)?, z.value.clone(), z.origin));
    }
    let b = b0(&g, opts)?;
    if let Some(want) = &e.b0 {
        out.push(check(
            format!("{key} B0 ({})", b.engine_tag()),
            &b.kernel == &want.value,
            format!("got {}, expected {} [{}]", b.kernel, want.value, want.origin),
        ));
    }
    if minimality {
        if let Some(m) = &e.b0_minimal {
            let v = b0_minimality(&g, crate::analytics::DEFAULT_LATTICE_CAP, opts)?;
            match (&v.outcome, m.value) {
                (MinimalityOutcome::Inconclusive { reason }, _) => {
                    out.push(check(format!("{key} minimality"), true, format!("inconclusive: {reason}")))
                }
                (o, want) => {
                    let got = *o == MinimalityOutcome::Minimal;
                    out.push(check(format!("{key} minimality"), got == want, format!("{o:?} [{}]", m.origin)));
                }
            }
        }
    }
    Ok(out)
}

fn thresholds(opts: &WedgeOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for key in LIST_KEYS {
        let g = build(key)?;
        let b = b0(&g, opts)?;
        let vs = threshold_verdicts(&g, Some(&b.kernel));
        let bad = has_counterexample(&vs);
        let sharp: Vec<String> = vs.iter().filter(|v| v.sharp).map(|v| format!("{:?}", v.rule)).collect();
        let mut c =
            check(format!("{key} thresholds"), !bad, format!("cp {}, B0 {}, sharp {:?}", vs[0].cp, b.kernel, sharp));
        c.counterexample = bad;
        out.push(c);
    }
    for key in ["gn:6", "g2:2", "g2:3", "g2:5"] {
        let g = build(key)?;
        let b = b0(&g, opts)?;
        let vs = threshold_verdicts(&g, Some(&b.kernel));
        out.push(check(format!("{key} sharpness exhibit"), vs.iter().any(|v| v.sharp), format!("B0 {}", b.kernel)));
    }
    Ok(out)
}

fn class2(opts: &WedgeOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for key in ["g1:2", "g1:3", "g1:5", "g2:2", "g2:3", "g2:5", "g19:3", "g19:5", "g18:3", "g20:3"] {
        out.extend(check_entry(key, opts, false)?);
    }
    Ok(out)
}

/// Invariants of `G_n`, its maximal subgroups and the two quotients.
pub fn gn_checks(n: usize, opts: &WedgeOptions, tc: bool) -> Result<Vec<Check>> {
    let key = format!("gn:{n}");
    let mut out = check_entry(&key, opts, false)?;
    let g = build(&key)?;
    let t = g.as_table().expect("table group").clone();
    let d = t.derived_subgroup();
    out.push(eq_check(format!("{key} derived"), t.abelian_type_of(&d)?.0, vec![2, 1 << (n - 4)], Origin::Literature));
    if tc {
        let r = curly_wedge_tc(&t, Variant::Curly, opts.tc_cap, opts.caps)?;
        out.push(eq_check(format!("{key} B0 (tc)"), r.kernel.0, vec![2], Origin::Literature));
    }
    let mut all_ok = true;
    let mut detail = Vec::new();
    for m in maximal_subgroups(&t)? {
        let (h, _) = t.subgroup_table(&m)?;
        let hg = Group::Table(h);
        let c = cp(&hg);
        let bb = b0(&hg, opts)?;
        let ok = c > rational(1, 4) && bb.kernel.is_trivial();
        all_ok &= ok;
        detail.push(format!("{}:{}", c, bb.kernel));
    }
    out.push(check(format!("{key} maximal subgroups"), all_ok, detail.join(" ")));
    let gn = pc_generator(&t, n - 1)?;
    let gn1 = pc_generator(&t, n - 2)?;
    for (label, x) in [("<g_n>", gn), ("<g_(n-1) g_n>", t.mul(gn1, gn))] {
        let q = Group::Table(t.quotient(&t.subgroup(&[x]))?);
        let bb = b0(&q, opts)?;
        out.push(check(format!("{key} B0(G/{label})"), bb.kernel.is_trivial(), format!("{}", bb.kernel)));
    }
    let z = center(&t);
    out.push(check(
        format!("{key} center contains g_(n-1), g_n"),
        z.contains(gn) && z.contains(gn1) && z.order() == 4,
        format!("|Z| = {}", z.order()),
    ));
    Ok(out)
}

/// Table index of the pc generator `g_(i+1)`.
fn pc_generator(t: &TableGroup, i: usize) -> Result<usize> {
    let pc = t.pc_origin().ok_or_else(|| Error::InvalidArgument("group has no pc presentation".into()))?;
    Ok(pc.element_index(&pc.generator(i)))
}

fn pairings() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for key in ["g18:3", "g18:5", "g20:3", "g20:5", "gn:6", "gn:7", "gn:8", "gn:9"] {
        let g = build(key)?;
        let (_, words) = crate::pairings::catalog_pairing(key).expect("catalog pairing");
        let cert = check_catalog_pairing(key, &g)?.expect("catalog pairing");
        let got: Vec<Vec<u64>> = cert.values.iter().map(|(_, v)| v.clone()).collect();
        let want: Vec<Vec<u64>> = words.iter().map(|(_, v)| v.clone()).collect();
        out.push(check(
            format!("{key} pairing"),
            cert.verified && got == want,
            format!("verified {}, values {:?}, expected {:?}", cert.verified, got, want),
        ));
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, opts: &WedgeOptions) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::Thresholds => thresholds(opts)?,
        Suite::Class2 => class2(opts)?,
        Suite::Gn => {
            let mut v = Vec::new();
            for n in 6..=9 {
                v.extend(gn_checks(n, opts, false)?);
            }
            v
        }
        Suite::Pairings => pairings()?,
        Suite::All => {
            let mut v = check_entry("e64", opts, true)?;
            v.extend(check_entry("e256", opts, true)?);
            for s in [Suite::Class2, Suite::Gn, Suite::Pairings, Suite::Thresholds] {
                v.extend(run_suite(s, opts)?);
            }
            v
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        assert_eq!("gn".parse::<Suite>().unwrap(), Suite::Gn);
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn e64_entry() {
        let checks = check_entry("e64", &WedgeOptions::default(), true).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }
}
