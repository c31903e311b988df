//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wedgelab::analytics::{
    census, census_table, center, commuting_pairs, cp, frattini, maximal_subgroups, minimal_normal_subgroups,
    nilpotency_class, rational, Rational, DEFAULT_LATTICE_CAP,
};
use wedgelab::catalog::{build, LIST_KEYS};
use wedgelab::enumeration::{smith_normal_form, todd_coxeter, FpPresentation, IntMatrix, TcCaps};
use wedgelab::groupcore::{direct_product, AbelianType, Group, TableGroup};
use wedgelab::pairings::{check_catalog_pairing, verify_pairing, PairingMode, PairingSpec, PairingTerm};
use wedgelab::verdicts::{
    b0_minimality, center_type, has_counterexample, stem, structural_checklist, threshold_verdicts, MinimalityOutcome,
};
use wedgelab::wedge::{
    b0, curly_wedge_tc, evaluate_wedge_word, linear_wedge, parse_wedge_word, schur_multiplier, EngineChoice,
    EngineKind, Variant, WedgeOptions,
};

const TC_CAP: usize = 256;
const TABLE_CAP: usize = 4096;
const E64_TC_LIMIT: Duration = Duration::from_secs(60);
const E64_METAB_LIMIT: Duration = Duration::from_secs(1);
const MINIMALITY_LIMIT: Duration = Duration::from_secs(600);
const E256_METAB_LIMIT: Duration = Duration::from_secs(5);
const E256_TC_LIMIT: Duration = Duration::from_secs(900);
const FAMILY_LIMIT: Duration = Duration::from_secs(120);
const GN9_LIMIT: Duration = Duration::from_secs(1800);
const PAIRING_LIMIT: Duration = Duration::from_secs(300);

type R<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Default)]
struct Crit {
    fails: Vec<String>,
    checks: usize,
}

impl Crit {
    fn ok(&mut self, name: impl AsRef<str>, cond: bool, detail: impl std::fmt::Display) {
        self.checks += 1;
        if !cond {
            self.fails.push(format!("{}: {}", name.as_ref(), detail));
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, name: impl AsRef<str>, got: T, want: T) {
        let d = format!("got {got:?}, expected {want:?}");
        self.ok(name, got == want, d);
    }

    fn within(&mut self, name: impl AsRef<str>, took: Duration, limit: Duration) {
        let d = format!("{took:?} > {limit:?}");
        self.ok(name, took <= limit, d);
    }
}

fn tc_opts() -> WedgeOptions {
    WedgeOptions { engine: EngineChoice::Tc, tc_cap: 512, ..Default::default() }
}

fn metab() -> WedgeOptions {
    WedgeOptions { engine: EngineChoice::Linear, ..Default::default() }
}

fn ab(v: &[u64]) -> AbelianType {
    AbelianType(v.to_vec())
}

fn table(g: &Group) -> TableGroup {
    g.to_table(TABLE_CAP).expect("table")
}

fn word_nontrivial_in_b0(c: &mut Crit, g: &Group, res: &wedgelab::wedge::WedgeResult, text: &str) -> R<()> {
    let w = parse_wedge_word(g, text)?;
    let v = evaluate_wedge_word(g, res, &w)?;
    c.ok(
        format!("{} {text} nontrivial in B0 ({})", g.name(), res.engine_tag()),
        v.in_kernel && v.nontrivial,
        format!("{v:?}"),
    );
    Ok(())
}

fn criterion_1(c: &mut Crit) -> R<()> {
    let g = build("e64")?;
    let t = table(&g);
    c.eq("order", g.order(), 64);
    c.eq("class", nilpotency_class(&t), Some(3));
    c.eq("k", census(&g).k, 16);
    c.eq("cp", cp(&g), rational(1, 4));
    let s = Instant::now();
    let m = linear_wedge(&g, Variant::Curly)?;
    c.within("metab time", s.elapsed(), E64_METAB_LIMIT);
    let s = Instant::now();
    let r = curly_wedge_tc(&t, Variant::Curly, TC_CAP, TcCaps::default())?;
    c.within("tc time", s.elapsed(), E64_TC_LIMIT);
    c.eq("B0 metab", m.kernel.clone(), ab(&[2]));
    c.eq("B0 tc", r.kernel.clone(), ab(&[2]));
    c.eq("engine tags", (m.engine, r.engine), (EngineKind::Linear, EngineKind::Tc));
    for res in [&m, &r] {
        word_nontrivial_in_b0(c, &g, res, "(g3 w g2)(g4 w g1)")?;
    }
    let s = Instant::now();
    let v = b0_minimality(&g, DEFAULT_LATTICE_CAP, &metab())?;
    c.within("minimality time", s.elapsed(), MINIMALITY_LIMIT);
    c.eq("minimality", v.outcome, MinimalityOutcome::Minimal);
    Ok(())
}

fn criterion_2(c: &mut Crit) -> R<()> {
    let g = build("e256")?;
    let s = Instant::now();
    let m = linear_wedge(&g, Variant::Curly)?;
    c.within("metab time", s.elapsed(), E256_METAB_LIMIT);
    c.eq("B0 metab", m.kernel.clone(), ab(&[2]));
    word_nontrivial_in_b0(c, &g, &m, "(g3 w g2)(g4 w g2)(g3 w g1)")?;
    c.eq("center", center_type(&g)?, ab(&[2, 8]));
    c.eq("stem", stem(&g), false);
    c.eq("cp", cp(&g), rational(1, 4));
    c.eq("cp equals cp(e64)", cp(&g), cp(&build("e64")?));
    c.eq("minimality", b0_minimality(&g, DEFAULT_LATTICE_CAP, &metab())?.outcome, MinimalityOutcome::Minimal);
    let s = Instant::now();
    let r = curly_wedge_tc(&table(&g), Variant::Curly, TC_CAP, TcCaps::default())?;
    c.within("tc time", s.elapsed(), E256_TC_LIMIT);
    c.eq("B0 tc", r.kernel.clone(), ab(&[2]));
    word_nontrivial_in_b0(c, &g, &r, "(g3 w g2)(g4 w g2)(g3 w g1)")?;
    Ok(())
}

fn criterion_3(c: &mut Crit) -> R<()> {
    for p in [2u128, 3, 5] {
        let pu = p as u64;
        let s = Instant::now();
        let g1 = build(&format!("g1:{p}"))?;
        let g2 = build(&format!("g2:{p}"))?;
        c.eq(format!("B0(G1) p={p}"), b0(&g1, &metab())?.kernel, ab(&[pu, pu]));
        c.eq(format!("B0(G2) p={p}"), b0(&g2, &metab())?.kernel, ab(&[pu]));
        let p2 = p * p;
        let p3 = p2 * p;
        let p4 = p3 * p;
        c.eq(format!("cp(G1) p={p}"), cp(&g1), rational(p3 + 2 * p2 - p - 1, p3 * p3));
        c.eq(format!("cp(G2) p={p}"), cp(&g2), rational(2 * p2 + p - 2, p4 * p));
        if p != 2 {
            c.eq(format!("k(G2) p={p}"), census(&g2).k, 2 * p4 + p3 - 2 * p2);
            c.eq(format!("k(G1) p={p}"), census(&g1).k, p4 + 2 * p3 - p2 - p);
            let g19 = build(&format!("g19:{p}"))?;
            c.ok(format!("B0(G19) p={p}"), b0(&g19, &metab())?.kernel.is_trivial(), "nontrivial");
        }
        if p <= 3 {
            // class-2 census against a full conjugation census
            for g in [&g1, &g2] {
                c.eq(format!("{} k by table", g.name()), census_table(&table(g)).k, census(g).k);
            }
        }
        if p == 2 {
            for g in [&g1, &g2] {
                c.eq(format!("{} B0 tc", g.name()), b0(g, &tc_opts())?.kernel, b0(g, &metab())?.kernel);
            }
        }
        c.within(format!("p={p} time"), s.elapsed(), FAMILY_LIMIT * 3);
    }
    Ok(())
}

fn pc_gen(t: &TableGroup, i: usize) -> usize {
    let pc = t.pc_origin().expect("pc");
    pc.element_index(&pc.generator(i))
}

/// Sections of `G_n` used by the threshold criterion.
fn gn_sections(t: &TableGroup, n: usize) -> R<Vec<(String, Group)>> {
    let mut out = Vec::new();
    for (i, m) in maximal_subgroups(t)?.iter().enumerate() {
        out.push((format!("gn:{n} M{i}"), Group::Table(t.subgroup_table(m)?.0)));
    }
    let gn = pc_gen(t, n - 1);
    let gn1 = pc_gen(t, n - 2);
    out.push((format!("gn:{n}/<g_n>"), Group::Table(t.quotient(&t.subgroup(&[gn]))?)));
    out.push((format!("gn:{n}/<g_(n-1)g_n>"), Group::Table(t.quotient(&t.subgroup(&[t.mul(gn1, gn)]))?)));
    Ok(out)
}

fn criterion_4(c: &mut Crit, sections: &mut Vec<(String, Group)>) -> R<()> {
    for n in 6..=9usize {
        let s = Instant::now();
        let key = format!("gn:{n}");
        let g = build(&key)?;
        let t = table(&g);
        c.eq(format!("{key} order"), g.order(), 1u128 << n);
        c.eq(format!("{key} class"), nilpotency_class(&t), Some(n - 3));
        c.eq(format!("{key} center"), center_type(&g)?, ab(&[2, 2]));
        c.eq(format!("{key} derived"), t.abelian_type_of(&t.derived_subgroup())?, ab(&[2, 1 << (n - 4)]));
        let k = (1u128 << (n - 4)) + 3 * (1u128 << (n - 5)) + 6;
        c.eq(format!("{key} k"), census(&g).k, k);
        let want_cp: Rational = rational(1, 16) + rational(3, 32) + rational(6, 1 << n);
        c.eq(format!("{key} cp"), cp(&g), want_cp);
        c.eq(format!("{key} B0 metab"), linear_wedge(&g, Variant::Curly)?.kernel, ab(&[2]));
        if n <= 8 {
            c.eq(
                format!("{key} B0 tc"),
                curly_wedge_tc(&t, Variant::Curly, TC_CAP, TcCaps::default())?.kernel,
                ab(&[2]),
            );
        }
        let secs = gn_sections(&t, n)?;
        for (name, h) in &secs {
            let bb = b0(h, &metab())?.kernel;
            if name.contains('/') {
                c.ok(format!("{name} B0 trivial"), bb.is_trivial(), &bb);
            } else {
                let hc = cp(h);
                c.ok(
                    format!("{name} cp > 1/4 and B0 trivial"),
                    hc > rational(1, 4) && bb.is_trivial(),
                    format!("cp {hc}, B0 {bb}"),
                );
            }
        }
        sections.extend(secs);
        if n == 9 {
            c.within("gn:9 time", s.elapsed(), GN9_LIMIT);
        }
    }
    Ok(())
}

fn criterion_5(c: &mut Crit) -> R<()> {
    let s = Instant::now();
    let keys = ["g18:3", "g18:5", "g20:3", "g20:5", "gn:6", "gn:7", "gn:8", "gn:9"];
    for key in keys {
        let g = build(key)?;
        let cert = check_catalog_pairing(key, &g)?.expect("catalog pairing");
        c.ok(format!("{key} pairing verified"), cert.verified, format!("{:?}", cert.witness));
        let got: Vec<Vec<u64>> = cert.values.iter().map(|(_, v)| v.clone()).collect();
        let want: Vec<Vec<u64>> = if key.starts_with("g20") { vec![vec![1, 0], vec![0, 1]] } else { vec![vec![1]] };
        c.eq(format!("{key} values"), got, want);
    }
    // det(1,4) on G2 is not a B0-pairing
    for p in [3u64, 5] {
        let g = build(&format!("g2:{p}"))?;
        let spec = PairingSpec { p, target_rank: 1, terms: vec![PairingTerm { coord: 0, i: 1, j: 4, coeff: 1 }] };
        let cert = verify_pairing(&g, &spec, PairingMode::Structured)?;
        c.ok(
            format!("g2:{p} det(1,4) rejected"),
            !cert.verified && cert.witness.is_some(),
            format!("{:?}", cert.witness),
        );
    }
    c.within("pairings time", s.elapsed(), PAIRING_LIMIT);
    Ok(())
}

fn criterion_6(c: &mut Crit, extra: &[(String, Group)]) -> R<()> {
    let mut groups: Vec<(String, Group)> =
        LIST_KEYS.iter().map(|k| Ok((k.to_string(), build(k)?))).collect::<R<_>>()?;
    for key in ["e64", "e256"] {
        let t = table(&build(key)?);
        for (i, m) in maximal_subgroups(&t)?.iter().enumerate() {
            groups.push((format!("{key} M{i}"), Group::Table(t.subgroup_table(m)?.0)));
        }
        for (i, nsub) in minimal_normal_subgroups(&t).iter().enumerate() {
            groups.push((format!("{key}/N{i}"), Group::Table(t.quotient(nsub)?)));
        }
    }
    let mut parents = std::collections::HashMap::new();
    for (name, g) in &groups {
        parents.insert(name.clone(), cp(g));
    }
    groups.extend(extra.iter().cloned());
    let mut sharp = Vec::new();
    for (name, g) in &groups {
        let bb = b0(g, &metab())?.kernel;
        let vs = threshold_verdicts(g, Some(&bb));
        c.ok(format!("{name} no counterexample"), !has_counterexample(&vs), format!("{vs:?}"));
        if vs.iter().any(|v| v.sharp) {
            sharp.push(name.clone());
        }
        // sections have cp at least that of the parent
        let parent = name.split([' ', '/']).next().unwrap_or(name);
        if parent != name {
            let pc = match parents.get(parent) {
                Some(x) => x.clone(),
                None => cp(&build(parent)?),
            };
            c.ok(format!("{name} cp monotone"), cp(g) >= pc, format!("{} < {pc}", cp(g)));
        }
    }
    for key in ["gn:6", "g2:2", "g2:3", "g2:5"] {
        c.ok(format!("{key} sharpness exhibit"), sharp.iter().any(|s| s == key), format!("sharp set {sharp:?}"));
    }
    let g6 = build("gn:6")?;
    c.eq("gn:6 cp", cp(&g6), rational(1, 4));
    Ok(())
}

fn criterion_7(c: &mut Crit) -> R<()> {
    let keys = ["e64", "e256", "gn:6", "gn:7", "gn:8", "gn:9", "g1:2", "g1:3", "g1:5", "g2:2", "g2:3", "g2:5"];
    for key in keys {
        let g = build(key)?;
        let bb = b0(&g, &metab())?.kernel;
        let cl = structural_checklist(&g, &bb)?;
        c.ok(format!("{key} checklist"), cl.passed, format!("{:?}", cl.items));
        c.ok(format!("{key} exp B0 prime"), bb.exponent() == bb.0[0], &bb);
    }
    // class-2 analytics against the table backend
    for key in ["g1:2", "g2:2", "g1:3", "g2:3"] {
        let g = build(key)?;
        let t = Group::Table(table(&g));
        let bb = b0(&g, &metab())?.kernel;
        let a = structural_checklist(&g, &bb)?;
        let b = structural_checklist(&t, &bb)?;
        let sa: Vec<_> = a.items.iter().map(|i| (i.name, i.status)).collect();
        let sb: Vec<_> = b.items.iter().map(|i| (i.name, i.status)).collect();
        c.eq(format!("{key} checklist class2 vs table"), sa, sb);
        c.eq(format!("{key} center class2 vs table"), center_type(&g)?, center_type(&t)?);
        let tt = table(&g);
        c.ok(
            format!("{key} frattini abelian"),
            {
                let f = frattini(&tt)?;
                f.elements().iter().all(|&x| f.elements().iter().all(|&y| tt.commute(x, y)))
            },
            "nonabelian",
        );
    }
    Ok(())
}

fn snf_postconditions(c: &mut Crit, rng: &mut ChaCha8Rng) {
    for trial in 0..200 {
        let rows = rng.gen_range(1..7);
        let cols = rng.gen_range(1..7);
        let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-9..10)).collect()).collect();
        let a = IntMatrix::from_rows(&data, cols);
        let r = smith_normal_form(&a);
        let d = r.u.mul(&a).mul(&r.v);
        let mut ok = true;
        for i in 0..rows {
            for j in 0..cols {
                let want = if i == j { r.d[i].clone() } else { BigInt::from(0) };
                ok &= *d.get(i, j) == want;
            }
        }
        for w in r.d.windows(2) {
            let zero = BigInt::from(0);
            ok &= w[1] == zero || (w[0] != zero && &w[1] % &w[0] == zero);
        }
        c.ok(format!("snf trial {trial}"), ok, format!("{data:?}"));
    }
}

fn coset_postconditions(c: &mut Crit) -> R<()> {
    // (relators, index of the trivial subgroup)
    let cases: Vec<(usize, Vec<Vec<i32>>, usize)> = vec![
        (2, vec![vec![1, 1], vec![2, 2, 2], vec![1, 2, 1, 2, 1, 2, 1, 2, 1, 2]], 60),
        (2, vec![vec![1, 1, 1, 1], vec![1, 1, -2, -2], vec![-2, 1, 2, 1]], 8),
        (2, vec![vec![1; 8], vec![2, 2], vec![2, 1, 2, 1]], 16),
        (1, vec![vec![1; 12]], 12),
    ];
    for (gens, rels, want) in cases {
        let src = FpPresentation::new(gens, &rels)?;
        let mut indices = Vec::new();
        for cap in [want * 4, 100_000] {
            let caps = TcCaps { max_cosets: cap, ..TcCaps::default() };
            let t = todd_coxeter(&src, &[], caps)?;
            t.verify(&src)?;
            indices.push(t.index());
        }
        c.eq(format!("coset index {rels:?}"), indices, vec![want, want]);
    }
    Ok(())
}

fn criterion_8(c: &mut Crit) -> R<()> {
    // Erdős–Turán on every table group of order at most 512
    let mut tables: Vec<(String, TableGroup)> = Vec::new();
    for key in LIST_KEYS {
        let g = build(key)?;
        if g.order() <= 512 {
            tables.push((key.to_string(), table(&g)));
        }
    }
    for key in ["e64", "gn:7"] {
        let t = table(&build(key)?);
        for (i, m) in maximal_subgroups(&t)?.iter().enumerate() {
            tables.push((format!("{key} M{i}"), t.subgroup_table(m)?.0));
        }
    }
    let e64 = table(&build("e64")?);
    let e64z2 = direct_product(&e64, &TableGroup::cyclic(2)?, 512)?.with_name("e64xZ2");
    tables.push(("e64xZ2".into(), e64z2.clone()));
    for (name, t) in &tables {
        let k = census_table(t).k;
        c.eq(format!("{name} commuting pairs"), commuting_pairs(t), k * t.order() as u128);
    }

    // engine agreement
    let agree = [
        "e64", "gn:7", "gn:8", "e256", "q8", "d4", "klein", "heis:3", "heis:5", "g1:2", "g2:2", "elab:2,3", "elab:3,2",
        "cyclic:8",
    ];
    let mut agreed = 0;
    for key in agree {
        let g = build(key)?;
        let t = table(&g);
        for variant in [Variant::Curly, Variant::Exterior] {
            if variant == Variant::Exterior && g.order() > 128 {
                continue;
            }
            let a = linear_wedge(&g, variant)?;
            let b = curly_wedge_tc(&t, variant, TC_CAP, TcCaps::default())?;
            c.eq(
                format!("{key} {variant:?} engines"),
                (&a.kernel, a.wedge_order, a.image_order),
                (&b.kernel, b.wedge_order, b.image_order),
            );
        }
        agreed += 1;
    }
    c.ok("engine agreement count", agreed >= 10, agreed);

    // Schur oracles
    for p in [2u64, 3, 5] {
        let g = build(&format!("elab:{p},2"))?;
        for opts in [metab(), tc_opts()] {
            c.eq(format!("M((Z/{p})^2) {:?}", opts.engine), schur_multiplier(&g, &opts)?.kernel, ab(&[p]));
        }
    }
    for n in 1..=12 {
        let g = Group::Table(TableGroup::cyclic(n)?);
        for opts in [metab(), tc_opts()] {
            c.ok(format!("M(Z/{n}) {:?}", opts.engine), schur_multiplier(&g, &opts)?.kernel.is_trivial(), "nontrivial");
        }
    }

    let g = Group::Table(e64z2);
    c.eq("B0(e64 x Z/2) metab", b0(&g, &metab())?.kernel, ab(&[2]));
    c.eq("B0(e64 x Z/2) tc", b0(&g, &tc_opts())?.kernel, ab(&[2]));

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    snf_postconditions(c, &mut rng);
    coset_postconditions(c)?;

    // center of a direct product
    let z = center(&table(&g));
    c.eq("Z(e64 x Z/2) order", z.order(), 8);
    Ok(())
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut sections = Vec::new();
    for i in 1..=8 {
        let mut c = Crit::default();
        let start = Instant::now();
        let res = match i {
            1 => criterion_1(&mut c),
            2 => criterion_2(&mut c),
            3 => criterion_3(&mut c),
            4 => criterion_4(&mut c, &mut sections),
            5 => criterion_5(&mut c),
            6 => criterion_6(&mut c, &sections),
            7 => criterion_7(&mut c),
            _ => criterion_8(&mut c),
        };
        if let Err(e) = res {
            c.fails.push(format!("error: {e}"));
        }
        let pass = c.fails.is_empty();
        all_ok &= pass;
        println!(
            "criterion {i}: {} ({} checks, {:.1?})",
            if pass { "PASS" } else { "FAIL" },
            c.checks,
            start.elapsed()
        );
        for f in &c.fails {
            println!("    {f}");
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
