//! B0-pairings: maps `φ: G × G → (Z/p)^r` satisfying
//! `φ(xy, z) = φ(x^y, z^y) + φ(y, z)`, `φ(x, yz) = φ(x, z) + φ(x^z, y^z)` and
//! `φ(x, y) = 0` whenever `[x, y] = 1`. Such a map factors through `G ⋏ G`,
//! so a nonzero value on a wedge word certifies that the word is nontrivial.
//!
//! Specs are sums of coordinate determinants
//! `coeff · (a_i b_j − a_j b_i)` on normal-form exponent vectors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::groupcore::{Class2Group, Group, TableGroup};
use crate::wedge::{group_key, parse_wedge_word, WedgeWord};
use crate::{Error, Result};

/// Exhaustive verification bound.
pub const EXHAUSTIVE_CAP: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingTerm {
    pub coord: usize,
    /// one-based generator indices
    pub i: usize,
    pub j: usize,
    pub coeff: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingSpec {
    pub p: u64,
    pub target_rank: usize,
    pub terms: Vec<PairingTerm>,
}

impl PairingSpec {
    pub fn from_json(text: &str) -> Result<PairingSpec> {
        let s: PairingSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad pairing JSON: {e}")))?;
        s.check_shape()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    fn check_shape(&self) -> Result<()> {
        if !crate::groupcore::is_prime(self.p) {
            return Err(Error::NotPrime(self.p));
        }
        for t in &self.terms {
            if t.coord >= self.target_rank {
                return Err(Error::InvalidArgument(format!("term coordinate {} out of range", t.coord)));
            }
            if t.i == 0 || t.j == 0 {
                return Err(Error::InvalidArgument("generator indices are one-based".into()));
            }
            if t.coeff.rem_euclid(self.p as i64) == 0 {
                return Err(Error::InvalidArgument(format!("coefficient {} vanishes mod {}", t.coeff, self.p)));
            }
        }
        Ok(())
    }

    fn check_for(&self, n: usize) -> Result<()> {
        self.check_shape()?;
        if let Some(t) = self.terms.iter().find(|t| t.i > n || t.j > n) {
            return Err(Error::InvalidArgument(format!(
                "pairing uses generator {} but the group has {n}",
                t.i.max(t.j)
            )));
        }
        Ok(())
    }

    /// `φ(a, b)` on exponent vectors.
    pub fn eval(&self, a: &[u32], b: &[u32]) -> Vec<u64> {
        let p = self.p as i64;
        let mut out = vec![0i64; self.target_rank];
        for t in &self.terms {
            let (i, j) = (t.i - 1, t.j - 1);
            let det = a[i] as i64 * b[j] as i64 - a[j] as i64 * b[i] as i64;
            out[t.coord] = (out[t.coord] + t.coeff * det).rem_euclid(p);
        }
        out.into_iter().map(|x| x as u64).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairingMode {
    Exhaustive,
    Structured,
}

impl std::str::FromStr for PairingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(PairingMode::Exhaustive),
            "structured" => Ok(PairingMode::Structured),
            _ => Err(Error::InvalidArgument(format!("unknown pairing mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// commuting pair with nonzero value
    CommutingPair { x: String, y: String },
    /// failure of `φ(xy, z) = φ(x^y, z^y) + φ(y, z)`
    LeftAxiom { x: String, y: String, z: String },
    /// failure of `φ(x, yz) = φ(x, z) + φ(x^z, y^z)`
    RightAxiom { x: String, y: String, z: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingCertificate {
    pub verified: bool,
    pub mode: PairingMode,
    pub witness: Option<Witness>,
    /// `φ*` on nominated words, filled by [`certify_nontrivial`] callers
    pub values: Vec<(String, Vec<u64>)>,
    #[serde(skip)]
    spec: Option<PairingSpec>,
    #[serde(skip)]
    key: u64,
}

fn exps_table(t: &TableGroup) -> Result<Vec<Vec<u32>>> {
    let m = t.pc_model()?;
    Ok((0..t.order()).map(|x| m.element(x).exps().to_vec()).collect())
}

/// Check the pairing axioms.
pub fn verify_pairing(g: &Group, spec: &PairingSpec, mode: PairingMode) -> Result<PairingCertificate> {
    let witness = match mode {
        PairingMode::Exhaustive => {
            let t = match g {
                Group::Table(t) => t.clone(),
                Group::Class2(c) => {
                    if c.order() > EXHAUSTIVE_CAP as u128 {
                        return Err(Error::ModeInapplicable(format!(
                            "exhaustive mode needs order at most {EXHAUSTIVE_CAP}, group has order {}",
                            c.order()
                        )));
                    }
                    c.to_table(EXHAUSTIVE_CAP)?
                }
            };
            if t.order() > EXHAUSTIVE_CAP {
                return Err(Error::ModeInapplicable(format!(
                    "exhaustive mode needs order at most {EXHAUSTIVE_CAP}, group has order {}",
                    t.order()
                )));
            }
            exhaustive(&t, spec)?
        }
        PairingMode::Structured => match g {
            Group::Class2(c) => structured(c, spec)?,
            Group::Table(_) => {
                return Err(Error::ModeInapplicable("structured mode needs a class-2 group".into()));
            }
        },
    };
    Ok(PairingCertificate {
        verified: witness.is_none(),
        mode,
        witness,
        values: Vec::new(),
        spec: Some(spec.clone()),
        key: group_key(g),
    })
}

fn exhaustive(t: &TableGroup, spec: &PairingSpec) -> Result<Option<Witness>> {
    let n = t.order();
    let exps = exps_table(t)?;
    let m = t.pc_model()?;
    spec.check_for(m.pc.num_gens())?;
    let r = spec.target_rank;
    // φ table, flattened
    let mut phi = vec![0u64; n * n * r];
    for x in 0..n {
        for y in 0..n {
            let v = spec.eval(&exps[x], &exps[y]);
            phi[(x * n + y) * r..(x * n + y + 1) * r].copy_from_slice(&v);
        }
    }
    let p = spec.p;
    let f = |x: usize, y: usize| &phi[(x * n + y) * r..(x * n + y + 1) * r];
    let name = |x: usize| m.element(x).to_string();
    for x in 0..n {
        for y in 0..n {
            if t.commute(x, y) && f(x, y).iter().any(|&v| v != 0) {
                return Ok(Some(Witness::CommutingPair { x: name(x), y: name(y) }));
            }
        }
    }
    let sum_eq = |a: &[u64], b: &[u64], c: &[u64]| a.iter().zip(b).zip(c).all(|((a, b), c)| *a == (b + c) % p);
    let found = (0..n).into_par_iter().find_map_first(|x| {
        for y in 0..n {
            let xy = t.mul(x, y);
            let xy_c = t.conj(x, y);
            for z in 0..n {
                if !sum_eq(f(xy, z), f(xy_c, t.conj(z, y)), f(y, z)) {
                    return Some((0, x, y, z));
                }
                let yz = t.mul(y, z);
                if !sum_eq(f(x, yz), f(x, z), f(t.conj(x, z), t.conj(y, z))) {
                    return Some((1, x, y, z));
                }
            }
        }
        None
    });
    Ok(found.map(|(k, x, y, z)| {
        let (x, y, z) = (name(x), name(y), name(z));
        if k == 0 {
            Witness::LeftAxiom { x, y, z }
        } else {
            Witness::RightAxiom { x, y, z }
        }
    }))
}

fn structured(c: &Class2Group, spec: &PairingSpec) -> Result<Option<Witness>> {
    spec.check_for(c.d() + c.r())?;
    if spec.terms.iter().any(|t| t.i > c.d() || t.j > c.d()) {
        return Err(Error::ModeInapplicable("structured mode needs terms on the generators of V".into()));
    }
    let vs: Vec<Vec<u64>> = Class2Group::vectors(c.p(), c.d()).collect();
    let to_u32 = |v: &[u64]| -> Vec<u32> {
        let mut e: Vec<u32> = v.iter().map(|&x| x as u32).collect();
        e.resize(c.d() + c.r(), 0);
        e
    };
    let found = (0..vs.len()).into_par_iter().find_map_first(|i| {
        for j in 0..vs.len() {
            if c.form_on(&vs[i], &vs[j]).iter().all(|&x| x == 0)
                && spec.eval(&to_u32(&vs[i]), &to_u32(&vs[j])).iter().any(|&v| v != 0)
            {
                return Some((i, j));
            }
        }
        None
    });
    Ok(found.map(|(i, j)| {
        let w = vec![0u64; c.r()];
        Witness::CommutingPair {
            x: c.to_pc_element(&(vs[i].clone(), w.clone())).to_string(),
            y: c.to_pc_element(&(vs[j].clone(), w)).to_string(),
        }
    }))
}

/// `φ*(w)`; a nonzero value proves `w ≠ 1` in `G ⋏ G`.
pub fn certify_nontrivial(g: &Group, cert: &PairingCertificate, w: &WedgeWord) -> Result<Vec<u64>> {
    let spec = match &cert.spec {
        Some(s) if cert.verified && cert.key == group_key(g) => s,
        _ => return Err(Error::UnverifiedPairing),
    };
    let p = spec.p as i64;
    let mut acc = vec![0i64; spec.target_rank];
    for (x, y, e) in &w.factors {
        let v = spec.eval(x.exps(), y.exps());
        for (a, b) in acc.iter_mut().zip(v) {
            *a = (*a + e * b as i64).rem_euclid(p);
        }
    }
    Ok(acc.into_iter().map(|x| x as u64).collect())
}

/// Known certificate for a catalog key: spec and nominated words with the
/// expected values of `φ*`.
pub fn catalog_pairing(key: &str) -> Option<(PairingSpec, Vec<(String, Vec<u64>)>)> {
    let (head, arg) = key.split_once(':')?;
    let term = |coord, i, j, coeff| PairingTerm { coord, i, j, coeff };
    match head {
        "g2" | "g18" => {
            let p: u64 = arg.parse().ok()?;
            Some((
                PairingSpec { p, target_rank: 1, terms: vec![term(0, 1, 2, 1)] },
                vec![("(a w b)(c w d)^-1".into(), vec![1])],
            ))
        }
        "g1" | "g20" => {
            let p: u64 = arg.parse().ok()?;
            if p == 2 {
                return None;
            }
            let w = crate::catalog::primitive_root(p);
            Some((
                PairingSpec { p, target_rank: 2, terms: vec![term(0, 1, 2, p as i64 - 1), term(1, 2, 4, 1)] },
                vec![("(c w d)(a w b)^-1".into(), vec![1, 0]), (format!("(b w d)(a w c)^-{w}"), vec![0, 1])],
            ))
        }
        "gn" => {
            let n: usize = arg.parse().ok()?;
            Some((
                PairingSpec { p: 2, target_rank: 1, terms: vec![term(0, 2, 3, 1)] },
                vec![(format!("(g3 w g2)(g1 w g{})^-1", n - 2), vec![1])],
            ))
        }
        _ => None,
    }
}

/// Verify a catalog certificate and evaluate its nominated words.
pub fn check_catalog_pairing(key: &str, g: &Group) -> Result<Option<PairingCertificate>> {
    let Some((spec, words)) = catalog_pairing(key) else {
        return Ok(None);
    };
    let mode = if g.as_class2().is_some() { PairingMode::Structured } else { PairingMode::Exhaustive };
    let mut cert = verify_pairing(g, &spec, mode)?;
    if cert.verified {
        for (text, _) in &words {
            let w = parse_wedge_word(g, text)?;
            let v = certify_nontrivial(g, &cert, &w)?;
            cert.values.push((text.clone(), v));
        }
    }
    Ok(Some(cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build;

    #[test]
    fn g2_pairing_and_counterexample() {
        let g = build("g2:3").unwrap();
        let (spec, words) = catalog_pairing("g2:3").unwrap();
        let cert = verify_pairing(&g, &spec, PairingMode::Structured).unwrap();
        assert!(cert.verified && cert.witness.is_none());
        let w = parse_wedge_word(&g, &words[0].0).unwrap();
        assert_eq!(certify_nontrivial(&g, &cert, &w).unwrap(), vec![1]);
        let bad = PairingSpec { p: 3, target_rank: 1, terms: vec![PairingTerm { coord: 0, i: 1, j: 4, coeff: 1 }] };
        let c1 = verify_pairing(&g, &bad, PairingMode::Structured).unwrap();
        let c2 = verify_pairing(&g, &bad, PairingMode::Structured).unwrap();
        assert!(!c1.verified);
        assert!(matches!(c1.witness, Some(Witness::CommutingPair { .. })));
        assert_eq!(c1.witness, c2.witness);
        assert_eq!(certify_nontrivial(&g, &c1, &w), Err(Error::UnverifiedPairing));
    }

    #[test]
    fn zero_spec_verifies() {
        let g = build("e64").unwrap();
        let spec = PairingSpec { p: 2, target_rank: 1, terms: vec![] };
        assert!(verify_pairing(&g, &spec, PairingMode::Exhaustive).unwrap().verified);
        assert!(matches!(verify_pairing(&g, &spec, PairingMode::Structured), Err(Error::ModeInapplicable(_))));
    }

    #[test]
    fn json_round_trip() {
        let s =
            PairingSpec::from_json(r#"{"p":3,"target_rank":1,"terms":[{"coord":0,"i":1,"j":2,"coeff":1}]}"#).unwrap();
        assert_eq!(PairingSpec::from_json(&s.to_json()).unwrap(), s);
        assert!(
            PairingSpec::from_json(r#"{"p":3,"target_rank":1,"terms":[{"coord":1,"i":1,"j":2,"coeff":1}]}"#).is_err()
        );
        assert!(
            PairingSpec::from_json(r#"{"p":3,"target_rank":1,"terms":[{"coord":0,"i":1,"j":2,"coeff":3}]}"#).is_err()
        );
    }

    #[test]
    fn gn_pairing_exhaustive() {
        let g = build("gn:6").unwrap();
        let cert = check_catalog_pairing("gn:6", &g).unwrap().unwrap();
        assert!(cert.verified);
        assert_eq!(cert.values[0].1, vec![1]);
    }
}
