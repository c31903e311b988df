use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use wedgelab::analytics::{census, cp};
use wedgelab::catalog;
use wedgelab::enumeration::TcCaps;
use wedgelab::groupcore::{Class2Group, Group};
use wedgelab::pairings::{certify_nontrivial, verify_pairing, PairingMode, PairingSpec};
use wedgelab::presentations::{parse_pcp, DEFAULT_TABLE_CAP};
use wedgelab::reproduce::{run_suite, Suite};
use wedgelab::verdicts::{b0_minimality, has_counterexample, report, ReportOptions};
use wedgelab::wedge::{
    b0, evaluate_wedge_word, parse_wedge_word, schur_multiplier, EngineChoice, WedgeOptions, DEFAULT_TC_CAP, MAX_TC_CAP,
};
use wedgelab::Error;

#[derive(Parser)]
#[command(name = "wedgelab", version, about = "Bogomolov and Schur multipliers of finite groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Wedge engine: auto, tc or metab
    #[arg(long, global = true, default_value = "auto")]
    engine: String,
    /// Cap on multiplication tables; also bounds the tc engine (at most 512)
    #[arg(long, global = true)]
    max_order: Option<usize>,
    /// Cap on the number of cosets in one enumeration
    #[arg(long, global = true)]
    coset_cap: Option<usize>,
    /// Emit JSON, to stdout or to the given path
    #[arg(long, global = true, num_args = 0..=1, value_name = "PATH")]
    json: Option<Option<PathBuf>>,
    /// Worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for sampled checks; results never depend on it
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full report: invariants, B0, thresholds, optional minimality
    Analyze {
        group: String,
        /// Also compute the Schur multiplier
        #[arg(long)]
        schur: bool,
        /// Also decide B0-minimality
        #[arg(long)]
        minimality: bool,
        /// Run the structural checklist even when minimality is not established
        #[arg(long)]
        checklist: bool,
    },
    /// Bogomolov multiplier, optionally evaluating wedge words
    B0 {
        group: String,
        /// Wedge word such as "(g3 w g2)(g4 w g1)"
        #[arg(long = "word")]
        words: Vec<String>,
    },
    /// Schur multiplier
    Schur { group: String },
    /// Commuting probability
    Cp { group: String },
    /// Conjugacy class census
    Census { group: String },
    /// B0-minimality verdict
    Minimality {
        group: String,
        #[arg(long, default_value_t = 256)]
        lattice_cap: usize,
    },
    /// Verify a B0-pairing and evaluate it on wedge words
    Pairing {
        group: String,
        /// Pairing JSON file
        spec: PathBuf,
        #[arg(long, default_value = "auto")]
        mode: String,
        #[arg(long = "word")]
        words: Vec<String>,
    },
    /// List catalog entries or show one expected record
    Catalog { key: Option<String> },
    /// Run a reproduction suite: all, thresholds, class2, gn, pairings
    Reproduce { suite: String },
}

enum Failure {
    Usage(String),
    Compute(String),
    Counterexample(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownKey(_) | Error::InvalidArgument(_) | Error::Syntax { .. } | Error::Presentation { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Compute(e.to_string()),
        }
    }
}

struct Ctx {
    wedge: WedgeOptions,
    table_cap: usize,
    json: Option<Option<PathBuf>>,
}

impl Ctx {
    fn emit(&self, value: &Value, human: impl FnOnce() -> String) -> Result<(), Failure> {
        match &self.json {
            None => {
                out(&human());
                Ok(())
            }
            Some(None) => {
                out(&serde_json::to_string_pretty(value).expect("serializable"));
                Ok(())
            }
            Some(Some(path)) => std::fs::write(path, serde_json::to_string_pretty(value).expect("serializable") + "\n")
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        }
    }
}

fn load(r: &str, table_cap: usize) -> Result<Group, Failure> {
    let (scheme, loc) = r
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("group reference `{r}` needs a scheme (catalog:, file:, class2:)")))?;
    let read = |p: &str| std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {p}: {e}")));
    match scheme {
        "catalog" => Ok(catalog::build(loc)?),
        "file" => {
            let pc = parse_pcp(&read(loc)?)?;
            let rep = pc.consistency_check()?;
            if !rep.consistent {
                return Err(Failure::Compute(format!("inconsistent presentation: {}", rep.failures.join("; "))));
            }
            Ok(Group::Table(pc.enumerate_group(table_cap)?))
        }
        "class2" => Ok(Group::Class2(Class2Group::from_json(&read(loc)?)?)),
        _ => Err(Failure::Usage(format!("unknown group scheme `{scheme}` in `{r}`"))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot configure threads: {e}")))?;
    }
    let engine: EngineChoice = g.engine.parse()?;
    let mut caps = TcCaps::default();
    if let Some(c) = g.coset_cap {
        caps.max_cosets = c;
    }
    let tc_cap = g.max_order.map_or(DEFAULT_TC_CAP, |m| m.min(MAX_TC_CAP));
    let ctx = Ctx {
        wedge: WedgeOptions { engine, tc_cap, caps, cross_check_upto: 128 },
        table_cap: g.max_order.unwrap_or(DEFAULT_TABLE_CAP),
        json: g.json.clone(),
    };
    let _ = g.seed;
    match cli.cmd {
        Cmd::Analyze { group, schur, minimality, checklist } => {
            let grp = load(&group, ctx.table_cap)?;
            let opts = ReportOptions { wedge: ctx.wedge, schur, minimality, checklist, ..Default::default() };
            let rep = report(&grp, &opts)?;
            let v = serde_json::to_value(&rep).expect("serializable");
            ctx.emit(&v, || {
                let mut s = format!(
                    "group {}\norder {}\nclass {}\nk {}\ncp {}/{}\nB0 {} ({})",
                    rep.group,
                    rep.order,
                    rep.class.map_or("-".into(), |c| c.to_string()),
                    rep.k,
                    rep.cp.num,
                    rep.cp.den,
                    type_str(&rep.b0.kind),
                    rep.b0.engine
                );
                for w in &rep.b0.generators {
                    s += &format!("\n  generator {w}");
                }
                if let Some(m) = &rep.m {
                    s += &format!("\nM {} ({})", type_str(&m.kind), m.engine);
                }
                for vd in &rep.verdicts {
                    s += &format!("\nverdict {:?}: {}", vd.rule, serde_json::to_value(vd.outcome).expect("ser"));
                    if vd.sharp {
                        s += " (sharp)";
                    }
                }
                if let Some(m) = &rep.minimality {
                    s += &format!("\nminimality {}", serde_json::to_value(&m.outcome).expect("ser"));
                }
                if let Some(c) = &rep.checklist {
                    s += &format!("\nchecklist {}", if c.passed { "pass" } else { "FAIL" });
                }
                s
            })?;
            if has_counterexample(&rep.verdicts) {
                return Err(Failure::Counterexample(format!("threshold rule violated on {}", rep.group)));
            }
        }
        Cmd::B0 { group, words } => {
            let grp = load(&group, ctx.table_cap)?;
            let r = b0(&grp, &ctx.wedge)?;
            let mut vals = Vec::new();
            for w in &words {
                let ww = parse_wedge_word(&grp, w)?;
                vals.push((w.clone(), evaluate_wedge_word(&grp, &r, &ww)?));
            }
            let v = json!({
                "group": r.group,
                "b0": {"type": r.kernel.0, "engine": r.engine_tag(),
                       "generators": r.generators.iter().map(|w| w.to_string()).collect::<Vec<_>>()},
                "wedge_order": r.wedge_order.to_string(),
                "words": vals.iter().map(|(w, e)| json!({"word": w, "value": e})).collect::<Vec<_>>(),
            });
            ctx.emit(&v, || {
                let mut s = format!("B0({}) = {} [{}], |G^G| = {}", r.group, r.kernel, r.engine_tag(), r.wedge_order);
                for w in &r.generators {
                    s += &format!("\n  generator {w}");
                }
                for (w, e) in &vals {
                    s += &format!(
                        "\n  {w}: {}, {}",
                        if e.nontrivial { "nontrivial" } else { "trivial" },
                        if e.in_kernel { "in B0" } else { "not in B0" }
                    );
                }
                s
            })?;
        }
        Cmd::Schur { group } => {
            let grp = load(&group, ctx.table_cap)?;
            let r = schur_multiplier(&grp, &ctx.wedge)?;
            let v = json!({"group": r.group, "m": {"type": r.kernel.0, "engine": r.engine_tag()},
                           "wedge_order": r.wedge_order.to_string()});
            ctx.emit(&v, || format!("M({}) = {} [{}]", r.group, r.kernel, r.engine_tag()))?;
        }
        Cmd::Cp { group } => {
            let grp = load(&group, ctx.table_cap)?;
            let c = cp(&grp);
            let v = json!({"group": grp.name(), "cp": {"num": c.numer().to_string(), "den": c.denom().to_string()}});
            ctx.emit(&v, || format!("{}/{}", c.numer(), c.denom()))?;
        }
        Cmd::Census { group } => {
            let grp = load(&group, ctx.table_cap)?;
            let c = census(&grp);
            let sizes: Vec<Value> =
                c.sizes.iter().map(|(s, n)| json!({"size": s.to_string(), "classes": n.to_string()})).collect();
            let v = json!({"group": grp.name(), "k": c.k.to_string(), "sizes": sizes});
            ctx.emit(&v, || {
                let mut s = format!("k = {}", c.k);
                for (size, n) in &c.sizes {
                    s += &format!("\n  {n} classes of size {size}");
                }
                s
            })?;
        }
        Cmd::Minimality { group, lattice_cap } => {
            let grp = load(&group, ctx.table_cap)?;
            let m = b0_minimality(&grp, lattice_cap, &ctx.wedge)?;
            let v = serde_json::to_value(&m).expect("serializable");
            ctx.emit(&v, || v.to_string())?;
        }
        Cmd::Pairing { group, spec, mode, words } => {
            let grp = load(&group, ctx.table_cap)?;
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", spec.display())))?;
            let sp = PairingSpec::from_json(&text)?;
            let mode = match mode.as_str() {
                "auto" => {
                    if grp.as_class2().is_some() {
                        PairingMode::Structured
                    } else {
                        PairingMode::Exhaustive
                    }
                }
                m => m.parse()?,
            };
            let mut cert = verify_pairing(&grp, &sp, mode)?;
            if cert.verified {
                for w in &words {
                    let ww = parse_wedge_word(&grp, w)?;
                    let val = certify_nontrivial(&grp, &cert, &ww)?;
                    cert.values.push((w.clone(), val));
                }
            }
            let v = serde_json::to_value(&cert).expect("serializable");
            ctx.emit(&v, || {
                let mut s = format!("verified: {}", cert.verified);
                if let Some(w) = &cert.witness {
                    s += &format!("\nwitness: {}", serde_json::to_string(w).expect("ser"));
                }
                for (w, val) in &cert.values {
                    s += &format!("\n  phi*({w}) = {val:?}");
                }
                s
            })?;
        }
        Cmd::Catalog { key } => match key {
            None => {
                let entries = catalog::list();
                let v = serde_json::to_value(&entries).expect("serializable");
                ctx.emit(&v, || {
                    entries.iter().map(|e| format!("{:10} {}", e.key, e.description)).collect::<Vec<_>>().join("\n")
                })?;
            }
            Some(k) => {
                let e = catalog::expected(&k)?;
                let v = serde_json::to_value(&e).expect("serializable");
                ctx.emit(&v, || serde_json::to_string_pretty(&v).expect("ser"))?;
            }
        },
        Cmd::Reproduce { suite } => {
            let s: Suite = suite.parse()?;
            let checks = run_suite(s, &ctx.wedge)?;
            let v = serde_json::to_value(&checks).expect("serializable");
            ctx.emit(&v, || {
                checks
                    .iter()
                    .map(|c| format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
                    .collect::<Vec<_>>()
                    .join("\n")
            })?;
            if checks.iter().any(|c| c.counterexample) {
                return Err(Failure::Counterexample("threshold rule violated".into()));
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(Failure::Compute(format!("{failed} of {} checks failed", checks.len())));
            }
            eprintln!("{} checks passed", checks.len());
        }
    }
    Ok(())
}

/// Print a line to stdout, ignoring a closed pipe.
fn out(s: &str) {
    use std::io::Write;
    let mut o = std::io::stdout().lock();
    let _ = writeln!(o, "{s}");
}

fn type_str(t: &[u64]) -> String {
    if t.is_empty() {
        "0".into()
    } else {
        t.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" + ")
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Counterexample(m)) => {
            eprintln!("counterexample!: {m}");
            ExitCode::from(3)
        }
    }
}
