//! Named groups and their expected invariants.
//!
//! Keys: `e64`, `e256`, `gn:<n>` (n ≥ 6), `g1:<p>`, `g2:<p>`, `g18:<p>`,
//! `g19:<p>`, `g20:<p>`, `k9:<p>` (odd p where noted), and the sanity keys
//! `cyclic:<n>`, `klein`, `q8`, `d4`, `heis:<p>`, `elab:<p>,<k>`.

use serde::Serialize;

use crate::analytics::rational;
use crate::groupcore::{direct_product, group_from_class2, is_prime, AbelianType, Class2Relation, Group, TableGroup};
use crate::presentations::{parse_pcp, DEFAULT_TABLE_CAP};
use crate::{Error, Result};

pub use crate::analytics::{maximal_subgroups, minimal_normal_subgroups};

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// stated in the literature that defines the group
    Literature,
    /// obtained by an independent brute-force computation
    Derived,
    /// elementary
    Trivial,
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Origin::Literature => "literature",
            Origin::Derived => "derived",
            Origin::Trivial => "trivial",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tagged<T> {
    pub value: T,
    pub origin: Origin,
}

fn lit<T>(value: T) -> Option<Tagged<T>> {
    Some(Tagged { value, origin: Origin::Literature })
}

fn triv<T>(value: T) -> Option<Tagged<T>> {
    Some(Tagged { value, origin: Origin::Trivial })
}

/// Expected invariants; `None` means not asserted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub order: Option<Tagged<u128>>,
    pub class: Option<Tagged<usize>>,
    pub k: Option<Tagged<u128>>,
    /// reduced `(num, den)`
    pub cp: Option<Tagged<(u128, u128)>>,
    pub b0: Option<Tagged<AbelianType>>,
    pub stem: Option<Tagged<bool>>,
    pub b0_minimal: Option<Tagged<bool>>,
    pub center: Option<Tagged<AbelianType>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub key: String,
    pub description: String,
    pub expected: Expected,
}

fn reduced(num: u128, den: u128) -> (u128, u128) {
    let r = rational(num, den);
    (r.numer().try_into().expect("small numerator"), r.denom().try_into().expect("small denominator"))
}

fn bad_key(key: &str) -> Error {
    Error::UnknownKey(key.to_string())
}

/// Smallest primitive root modulo a prime (1 for p = 2).
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = crate::groupcore::factorize(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("primes have primitive roots")
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn parse_prime(key: &str, s: &str, odd: bool) -> Result<u64> {
    let p: u64 = s.parse().map_err(|_| bad_key(key))?;
    if !is_prime(p) || (odd && p == 2) {
        return Err(Error::InvalidArgument(format!(
            "`{key}`: {p} is not {}",
            if odd { "an odd prime" } else { "a prime" }
        )));
    }
    Ok(p)
}

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;

/// Relations of `G1` (`[a,b]=[c,d]`, `[b,d]=[a,b]^ε [a,c]^ω`, `[a,d]=1`).
pub fn g1_relations(p: u64) -> Vec<Class2Relation> {
    let eps = if p == 2 { 1 } else { 0 };
    let omega = primitive_root(p) as i64;
    let mut rhs = vec![((A, C), omega)];
    if eps == 1 {
        rhs.insert(0, ((A, B), 1));
    }
    vec![
        Class2Relation::equal((A, B), (C, D)),
        Class2Relation { lhs: vec![((B, D), 1)], rhs },
        Class2Relation::zero((A, D)),
    ]
}

/// Relations of `G2` (`[a,b]=[c,d]`, `[a,c]=[a,d]=1`).
pub fn g2_relations() -> Vec<Class2Relation> {
    vec![Class2Relation::equal((A, B), (C, D)), Class2Relation::zero((A, C)), Class2Relation::zero((A, D))]
}

/// Relations of `G19` (`[a,d]=1`, `[b,c]=[c,d]`, `[b,d]=[a,c]`).
pub fn g19_relations() -> Vec<Class2Relation> {
    vec![Class2Relation::zero((A, D)), Class2Relation::equal((B, C), (C, D)), Class2Relation::equal((B, D), (A, C))]
}

/// pc text for `G_n`.
pub fn gn_pcp(n: usize) -> String {
    let mut s = format!("group gn:{n}\ngens {n}\n");
    for i in 1..=n {
        s += &format!("order g{i} = 2\n");
    }
    for i in 3..n - 2 {
        s += &format!("pow g{i} = g{} g{}\n", i + 1, i + 2);
    }
    s += &format!("pow g{} = g{}\n", n - 2, n - 1);
    s += &format!("conj g2 g1 = g2 g{n}\n");
    for i in 3..n - 1 {
        s += &format!("conj g{i} g1 = g{i} g{}\n", i + 1);
    }
    s += &format!("conj g3 g2 = g3 g{}\n", n - 1);
    s
}

pub const E64_PCP: &str = "group e64
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

pub const E256_PCP: &str = "group e256
gens 8
order g1 = 2
order g2 = 2
order g3 = 2
order g4 = 2
order g5 = 2
order g6 = 2
order g7 = 2
order g8 = 2
pow g1 = g5
pow g4 = g6
pow g5 = g7
pow g7 = g8
conj g2 g1 = g2 g4
conj g3 g1 = g3 g8
conj g3 g2 = g3 g6 g8
conj g4 g1 = g4 g6
conj g4 g2 = g4 g6
";

const Q8_PCP: &str = "group q8
gens 3
order g1 = 2
order g2 = 2
order g3 = 2
pow g1 = g3
pow g2 = g3
conj g2 g1 = g2 g3
";

const D4_PCP: &str = "group d4
gens 3
order g1 = 2
order g2 = 2
order g3 = 2
pow g2 = g3
conj g2 g1 = g2 g3
";

fn from_pcp(text: &str, key: &str) -> Result<Group> {
    let pc = parse_pcp(text)?;
    let report = pc.consistency_check()?;
    if !report.consistent {
        return Err(Error::Inconsistent(report.failures));
    }
    Ok(Group::Table(pc.enumerate_group(DEFAULT_TABLE_CAP)?.with_name(key)))
}

fn class2(p: u64, d: usize, rels: &[Class2Relation], key: &str) -> Result<Group> {
    Ok(Group::Class2(group_from_class2(p, d, rels)?.with_name(key)))
}

/// Build the group for a catalog key.
pub fn build(key: &str) -> Result<Group> {
    let (head, arg) = match key.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (key, None),
    };
    match (head, arg) {
        ("e64", None) => from_pcp(E64_PCP, key),
        ("e256", None) => from_pcp(E256_PCP, key),
        ("klein", None) => {
            let c2 = TableGroup::cyclic(2)?;
            Ok(Group::Table(direct_product(&c2, &c2, 16)?.with_name(key)))
        }
        ("q8", None) => from_pcp(Q8_PCP, key),
        ("d4", None) => from_pcp(D4_PCP, key),
        ("gn", Some(a)) => {
            let n: usize = a.parse().map_err(|_| bad_key(key))?;
            if n < 6 {
                return Err(Error::InvalidArgument(format!("`{key}`: n must be at least 6")));
            }
            from_pcp(&gn_pcp(n), key)
        }
        ("cyclic", Some(a)) => {
            let n: usize = a.parse().map_err(|_| bad_key(key))?;
            if n == 0 || n > DEFAULT_TABLE_CAP {
                return Err(Error::InvalidArgument(format!("`{key}`: order out of range")));
            }
            Ok(Group::Table(TableGroup::cyclic(n)?.with_name(key)))
        }
        ("g1", Some(a)) | ("g20", Some(a)) => {
            let p = parse_prime(key, a, head == "g20")?;
            class2(p, 4, &g1_relations(p), key)
        }
        ("g2", Some(a)) | ("g18", Some(a)) => {
            let p = parse_prime(key, a, head == "g18")?;
            class2(p, 4, &g2_relations(), key)
        }
        ("g19", Some(a)) => {
            let p = parse_prime(key, a, true)?;
            class2(p, 4, &g19_relations(), key)
        }
        ("k9", Some(a)) => {
            let p = parse_prime(key, a, false)?;
            class2(p, 4, &[Class2Relation::equal((A, B), (C, D))], key)
        }
        ("heis", Some(a)) => {
            let p = parse_prime(key, a, false)?;
            class2(p, 2, &[], key)
        }
        ("elab", Some(a)) => {
            let (ps, ks) = a.split_once(',').ok_or_else(|| bad_key(key))?;
            let p = parse_prime(key, ps, false)?;
            let k: usize = ks.parse().map_err(|_| bad_key(key))?;
            let rels: Vec<Class2Relation> =
                (0..k).flat_map(|i| (i + 1..k).map(move |j| Class2Relation::zero((i, j)))).collect();
            class2(p, k, &rels, key)
        }
        _ => Err(bad_key(key)),
    }
}

/// Expected invariants for a catalog key.
pub fn expected(key: &str) -> Result<Expected> {
    let (head, arg) = match key.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (key, None),
    };
    let z2 = AbelianType(vec![2]);
    Ok(match (head, arg) {
        ("e64", None) => Expected {
            order: lit(64),
            class: lit(3),
            k: lit(16),
            cp: lit((1, 4)),
            b0: lit(z2),
            stem: lit(true),
            b0_minimal: lit(true),
            center: None,
        },
        ("e256", None) => Expected {
            order: lit(256),
            cp: lit((1, 4)),
            k: lit(64),
            b0: lit(z2),
            stem: lit(false),
            b0_minimal: lit(true),
            center: lit(AbelianType(vec![2, 8])),
            class: None,
        },
        ("gn", Some(a)) => {
            let n: u32 = a.parse().map_err(|_| bad_key(key))?;
            if n < 6 {
                return Err(Error::InvalidArgument(format!("`{key}`: n must be at least 6")));
            }
            let k = 2u128.pow(n - 4) + 3 * 2u128.pow(n - 5) + 6;
            Expected {
                order: lit(2u128.pow(n)),
                class: lit(n as usize - 3),
                k: lit(k),
                cp: lit(reduced(k, 2u128.pow(n))),
                b0: lit(z2),
                stem: lit(true),
                b0_minimal: lit(true),
                center: lit(AbelianType(vec![2, 2])),
            }
        }
        ("g1", Some(a)) | ("g20", Some(a)) => {
            let p = parse_prime(key, a, head == "g20")? as u128;
            let k = p.pow(4) + 2 * p.pow(3) - p * p - p;
            Expected {
                order: lit(p.pow(7)),
                class: lit(2),
                k: lit(k),
                cp: lit(reduced(p.pow(3) + 2 * p * p - p - 1, p.pow(6))),
                b0: lit(AbelianType(vec![p as u64, p as u64])),
                stem: lit(true),
                b0_minimal: lit(true),
                center: None,
            }
        }
        ("g2", Some(a)) | ("g18", Some(a)) => {
            let p = parse_prime(key, a, head == "g18")? as u128;
            let k = 2 * p.pow(4) + p.pow(3) - 2 * p * p;
            Expected {
                order: lit(p.pow(7)),
                class: lit(2),
                k: lit(k),
                cp: lit(reduced(2 * p * p + p - 2, p.pow(5))),
                b0: lit(AbelianType(vec![p as u64])),
                stem: lit(true),
                b0_minimal: lit(true),
                center: None,
            }
        }
        ("g19", Some(a)) => {
            let p = parse_prime(key, a, true)? as u128;
            Expected {
                order: lit(p.pow(7)),
                class: lit(2),
                b0: lit(AbelianType::trivial()),
                b0_minimal: lit(false),
                ..Default::default()
            }
        }
        ("k9", Some(a)) => {
            let p = parse_prime(key, a, false)? as u128;
            Expected { order: lit(p.pow(9)), class: lit(2), b0_minimal: lit(false), ..Default::default() }
        }
        ("cyclic", Some(a)) => {
            let n: u128 = a.parse().map_err(|_| bad_key(key))?;
            Expected {
                order: triv(n),
                class: triv(if n == 1 { 0 } else { 1 }),
                k: triv(n),
                cp: triv((1, 1)),
                b0: triv(AbelianType::trivial()),
                b0_minimal: triv(false),
                ..Default::default()
            }
        }
        ("klein", None) => Expected {
            order: triv(4),
            class: triv(1),
            k: triv(4),
            cp: triv((1, 1)),
            b0: triv(AbelianType::trivial()),
            stem: triv(false),
            b0_minimal: triv(false),
            center: triv(AbelianType(vec![2, 2])),
        },
        ("q8", None) | ("d4", None) => Expected {
            order: triv(8),
            class: triv(2),
            k: triv(5),
            cp: triv((5, 8)),
            b0: triv(AbelianType::trivial()),
            stem: triv(true),
            b0_minimal: triv(false),
            center: triv(z2),
        },
        ("heis", Some(a)) => {
            let p = parse_prime(key, a, false)? as u128;
            Expected {
                order: triv(p.pow(3)),
                class: triv(2),
                k: triv(p * p + p - 1),
                cp: triv(reduced(p * p + p - 1, p.pow(3))),
                b0: triv(AbelianType::trivial()),
                stem: triv(true),
                b0_minimal: triv(false),
                center: triv(AbelianType(vec![p as u64])),
            }
        }
        ("elab", Some(a)) => {
            let (ps, ks) = a.split_once(',').ok_or_else(|| bad_key(key))?;
            let p = parse_prime(key, ps, false)? as u128;
            let k: u32 = ks.parse().map_err(|_| bad_key(key))?;
            Expected {
                order: triv(p.pow(k)),
                class: triv(if k == 0 { 0 } else { 1 }),
                k: triv(p.pow(k)),
                cp: triv((1, 1)),
                b0: triv(AbelianType::trivial()),
                b0_minimal: triv(false),
                ..Default::default()
            }
        }
        _ => return Err(bad_key(key)),
    })
}

fn describe(key: &str) -> String {
    let head = key.split(':').next().unwrap_or(key);
    match head {
        "e64" => "order-64 group of class 3 with B0 = Z/2, the smallest B0-minimal group".into(),
        "e256" => "order-256 non-stem B0-minimal group isoclinic to e64".into(),
        "gn" => "2-group G_n of order 2^n and class n-3, B0-minimal".into(),
        "g1" | "g20" => "class-2 group [a,b]=[c,d], [b,d]=[a,b]^e [a,c]^w, [a,d]=1 of order p^7".into(),
        "g2" | "g18" => "class-2 group [a,b]=[c,d], [a,c]=[a,d]=1 of order p^7".into(),
        "g19" => "class-2 group [a,d]=1, [b,c]=[c,d], [b,d]=[a,c] of order p^7".into(),
        "k9" => "class-2 group with the single relation [a,b]=[c,d], order p^9".into(),
        "cyclic" => "cyclic group".into(),
        "klein" => "Klein four-group".into(),
        "q8" => "quaternion group of order 8".into(),
        "d4" => "dihedral group of order 8".into(),
        "heis" => "Heisenberg group of order p^3".into(),
        "elab" => "elementary abelian group".into(),
        _ => String::new(),
    }
}

/// Default listing, in stable order.
pub const LIST_KEYS: &[&str] = &[
    "e64", "e256", "gn:6", "gn:7", "gn:8", "gn:9", "g1:2", "g1:3", "g1:5", "g2:2", "g2:3", "g2:5", "g18:3", "g18:5",
    "g19:3", "g19:5", "g20:3", "g20:5", "k9:3", "cyclic:1", "cyclic:8", "klein", "q8", "d4", "heis:3", "heis:5",
    "elab:2,3", "elab:3,2",
];

pub fn list() -> Vec<CatalogEntry> {
    LIST_KEYS
        .iter()
        .map(|&k| CatalogEntry {
            key: k.to_string(),
            description: describe(k),
            expected: expected(k).expect("listed keys are valid"),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(2), 1);
        assert_eq!(primitive_root(3), 2);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
    }

    #[test]
    fn gn6_is_e64_text() {
        let a = parse_pcp(&gn_pcp(6)).unwrap();
        let b = parse_pcp(E64_PCP).unwrap();
        for i in 0..6 {
            assert_eq!(a.power_word(i), b.power_word(i));
        }
    }

    #[test]
    fn orders() {
        for k in LIST_KEYS {
            let g = build(k).unwrap();
            assert_eq!(Some(g.order()), expected(k).unwrap().order.map(|t| t.value), "{k}");
        }
    }

    #[test]
    fn key_errors() {
        assert!(matches!(build("nosuch"), Err(Error::UnknownKey(_))));
        assert!(matches!(build("gn:5"), Err(Error::InvalidArgument(_))));
        assert!(matches!(build("g18:2"), Err(Error::InvalidArgument(_))));
        assert!(matches!(build("g1:4"), Err(Error::InvalidArgument(_))));
        assert_eq!(build("cyclic:1").unwrap().order(), 1);
    }
}
