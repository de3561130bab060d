//! `defectlab` command-line front end.
//!
//! Exit codes: 0 when every requested check passes, 2 when a check fails,
//! 1 on bad input, 64 on a usage error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{b_lower_bound, theorem_parameters, verify_lemma_new};
use crate::error::{Error, Result};
use crate::exact_algebra::{parse_rational, rat_int, rat_string, Rational};
use crate::filtration::{build_filtration, verify_cz};
use crate::gaussmap::{affine_invariance_holds, gauss_defect_pipeline, gauss_map, is_invertible, MPolyJson, PolyImmersion};
use crate::nevanlinna::{divisor_truncation_check, fmt_report, smt_margin, MeromorphicCurve, RGrid, SmtConfig};
use crate::polyring::{HomPoly, LocusConfig};
use crate::position::{
    check_subgeneral, normalize_degrees, position_constants, replace_hypersurfaces, HypersurfaceFamily,
    DEFAULT_H_FLOOR, DEFAULT_RETRY_BUDGET,
};
use crate::report;
use crate::selftest;
use crate::wronskian::{admissible_search, is_identically_zero, wronskian_eval, wronskian_symbolic, SymbolicTuple, WronskianValue};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CHECK: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "defectlab", version, about = "Exact and numeric checks for truncated defect relations")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for the JSON report (and CSV profiles); stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parameters N, u, p and the right-hand side, with both exact bound checks.
    Bounds(BoundsArgs),
    /// Checks k-subgeneral position of a family file.
    CheckPosition(PositionArgs),
    /// Replaces k+1 members by n+1 forms in general position.
    Replace(ReplaceArgs),
    /// Builds the filtration of V_N attached to a replaced family.
    Filtration(FiltrationArgs),
    /// Admissible set and generalized Wronskian of a polynomial tuple.
    Wronskian(WronskianArgs),
    /// T, N, N^[M] and m profiles of a curve against one hypersurface.
    Nevanlinna(NevanlinnaArgs),
    /// Margin of the second-main-theorem inequality and the divisor check.
    Smt(SmtArgs),
    /// Gauss map of a polynomial immersion, optionally with the defect pipeline.
    Gauss(GaussArgs),
    /// Runs the acceptance battery.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    d: u64,
    /// Positive rational, e.g. `1/2`.
    #[arg(long, allow_hyphen_values = true)]
    eps: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    rho: String,
    /// Filtration weight to use instead of the closed-form lower bound.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
}

#[derive(Args, Debug)]
struct PositionArgs {
    family: PathBuf,
    /// Defaults to the `k` recorded in the family file.
    #[arg(long)]
    k: Option<usize>,
    /// Also estimate the sphere constants with this many samples.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct ReplaceArgs {
    family: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated labels; defaults to the first k+1 members.
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_RETRY_BUDGET)]
    budget: usize,
}

#[derive(Args, Debug)]
struct FiltrationArgs {
    family: PathBuf,
    #[arg(long = "N", alias = "big-n")]
    big_n: u32,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<String>>,
    /// Use the first n members as P_1..P_n without replacement.
    #[arg(long)]
    direct: bool,
    /// Include (and verify) the adapted basis.
    #[arg(long)]
    basis: bool,
}

#[derive(Args, Debug)]
struct WronskianArgs {
    /// `{"m": int, "entries": [{"terms": [...]}, ...]}`.
    tuple: PathBuf,
    /// Evaluation point, comma-separated complex numbers like `1.5,-2+0.5i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Option<Vec<String>>,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    #[arg(long, default_value_t = 1.0)]
    r0: f64,
    /// `geom:a,b,G`, `lin:a,b,G`, or a comma-separated list of radii.
    #[arg(long, default_value = "geom:2,64,24")]
    grid: String,
    #[arg(long, default_value_t = crate::nevanlinna::DEFAULT_NODES)]
    nodes: usize,
}

impl GridArgs {
    fn build(&self) -> Result<RGrid> {
        RGrid::parse(&self.grid, self.r0, self.nodes)
    }
}

#[derive(Args, Debug)]
struct NevanlinnaArgs {
    curve: PathBuf,
    /// A single HomPoly file.
    hypersurface: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    /// Truncation level M for N^[M].
    #[arg(long)]
    trunc: Option<u32>,
    #[arg(long)]
    skip_defect: bool,
}

#[derive(Args, Debug)]
struct SmtArgs {
    curve: PathBuf,
    family: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    eps: String,
    #[arg(long = "N", alias = "big-n")]
    big_n: u32,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Also check the divisor inequality at every zero.
    #[arg(long)]
    divisor: bool,
}

#[derive(Args, Debug)]
struct GaussArgs {
    immersion: PathBuf,
    /// Family of hypersurfaces in the Plücker space for the defect pipeline.
    #[arg(long)]
    family: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    eps: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    rho: String,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Comma-separated criterion numbers; all by default.
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TupleJson {
    m: usize,
    entries: Vec<MPolyJson>,
}

/// What a subcommand hands back for writing.
struct Outcome {
    name: &'static str,
    report: Value,
    pass: bool,
    csv: Option<String>,
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match dispatch(&cli).and_then(|o| emit(&cli, o)) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_CHECK,
        Err(e) => {
            eprintln!("defectlab: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("DEFECTLAB_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        // A second call in the same process (tests) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::AmbientMismatch { .. } | Error::Parse(_) | Error::DivisionByZero(_) => EXIT_INPUT,
        _ => EXIT_CHECK,
    }
}

fn emit(cli: &Cli, o: Outcome) -> Result<bool> {
    let mut report = o.report;
    if let Value::Object(m) = &mut report {
        m.insert("command".into(), json!(o.name));
        m.insert("seed".into(), json!(cli.seed));
        m.insert("pass".into(), json!(o.pass));
    }
    let text = report::render(&report)?;
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            let path = dir.join(format!("{}.json", o.name));
            fs::write(&path, text).map_err(|e| io_err(&path, e))?;
            if let Some(csv) = o.csv {
                let path = dir.join(format!("{}.csv", o.name));
                fs::write(&path, csv).map_err(|e| io_err(&path, e))?;
            }
        }
        None => print!("{text}"),
    }
    Ok(o.pass)
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn read_family(path: &Path) -> Result<HypersurfaceFamily> {
    HypersurfaceFamily::from_json(&read(path)?)
}

fn family_k(fam: &HypersurfaceFamily, k: Option<usize>) -> Result<usize> {
    let k = k.or(fam.k).ok_or_else(|| Error::InvalidInput("pass --k or record k in the family file".into()))?;
    if k < fam.n {
        return Err(Error::InvalidInput(format!("k = {k} must be at least n = {}", fam.n)));
    }
    Ok(k)
}

fn positive_rational(s: &str, what: &str) -> Result<Rational> {
    let x = parse_rational(s)?;
    if x <= rat_int(0) {
        return Err(Error::InvalidInput(format!("{what} must be positive, got {s}")));
    }
    Ok(x)
}

fn value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed;
    let cfg = LocusConfig::default();
    match &cli.command {
        Command::Bounds(a) => bounds(a),
        Command::CheckPosition(a) => {
            let fam = read_family(&a.family)?;
            let k = family_k(&fam, a.k)?;
            let verdict = check_subgeneral(&fam, k, &cfg)?;
            let mut report = value(&verdict)?;
            report["k"] = json!(k);
            if let Some(samples) = a.samples {
                let (normalized, _) = normalize_degrees(&fam)?;
                report["constants"] = value(&position_constants(&normalized, samples, seed, DEFAULT_H_FLOOR)?)?;
            }
            Ok(Outcome { name: "check-position", pass: verdict.holds(), report, csv: None })
        }
        Command::Replace(a) => {
            let fam = read_family(&a.family)?;
            let (fam, _) = normalize_degrees(&fam)?;
            let subset = subset_or_default(&fam, a.k, &a.subset)?;
            let rep = replace_hypersurfaces(&fam, &subset, seed, a.budget, &cfg)?;
            let span_ok = rep.verify_span_form(&fam)?;
            let chain_ok = rep.prefix_dims.iter().enumerate().all(|(i, &dim)| dim <= rep.n as i64 - (i as i64 + 1));
            let mut report = value(&rep)?;
            report["span_form_verified"] = json!(span_ok);
            report["dimension_chain_holds"] = json!(chain_ok);
            Ok(Outcome { name: "replace", pass: span_ok && chain_ok, report, csv: None })
        }
        Command::Filtration(a) => filtration(a, seed, &cfg),
        Command::Wronskian(a) => wronskian(a, seed),
        Command::Nevanlinna(a) => {
            let f = MeromorphicCurve::from_json(&read(&a.curve)?)?;
            let q: HomPoly = serde_json::from_str(&read(&a.hypersurface)?)?;
            let rep = fmt_report(&f, &q, &a.grid.build()?, a.trunc, !a.skip_defect)?;
            let mut csv = Vec::new();
            rep.profile.write_csv(&mut csv)?;
            Ok(Outcome {
                name: "nevanlinna",
                pass: rep.pass,
                report: value(&rep)?,
                csv: Some(String::from_utf8(csv).map_err(|e| Error::InvalidInput(e.to_string()))?),
            })
        }
        Command::Smt(a) => {
            let f = MeromorphicCurve::from_json(&read(&a.curve)?)?;
            let fam = read_family(&a.family)?;
            let k = family_k(&fam, a.k)?;
            let mut smt_cfg = SmtConfig::new(k, positive_rational(&a.eps, "eps")?, a.big_n, seed);
            smt_cfg.samples = a.samples;
            let rep = smt_margin(&f, &fam, &smt_cfg, &a.grid.build()?)?;
            let mut pass = rep.pass;
            let mut report = json!({ "margin": value(&rep)? });
            if a.divisor {
                let div = divisor_truncation_check(&f, &fam, k, a.big_n, Some(rep.b), seed, &cfg)?;
                pass &= div.pass;
                report["divisor"] = value(&div)?;
            }
            Ok(Outcome { name: "smt", pass, report, csv: None })
        }
        Command::Gauss(a) => gauss(a, seed),
        Command::Selftest(a) => {
            let ids: Vec<u32> = match &a.only {
                Some(ids) => ids.clone(),
                None => selftest::CRITERIA.iter().map(|c| c.0).collect(),
            };
            let mut results = Vec::new();
            for id in ids {
                let r = selftest::run_criterion(id, seed)
                    .ok_or_else(|| Error::InvalidInput(format!("no criterion {id}; valid ids are 1..=11")))?;
                eprintln!("{} [{:>2}] {} ({:.1} s): {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.elapsed_secs, r.detail);
                results.push(r);
            }
            let pass = results.iter().all(|r| r.passed);
            Ok(Outcome { name: "selftest", pass, report: json!({ "criteria": value(&results)? }), csv: None })
        }
    }
}

fn subset_or_default(fam: &HypersurfaceFamily, k: Option<usize>, subset: &Option<Vec<String>>) -> Result<Vec<String>> {
    match subset {
        Some(s) => Ok(s.clone()),
        None => {
            let k = family_k(fam, k)?;
            if fam.q() < k + 1 {
                return Err(Error::InvalidInput(format!("family has {} members, need k+1 = {}", fam.q(), k + 1)));
            }
            Ok(fam.labels().into_iter().take(k + 1).collect())
        }
    }
}

fn bounds(a: &BoundsArgs) -> Result<Outcome> {
    if a.n == 0 || a.d == 0 || a.k < a.n {
        return Err(Error::InvalidInput("need n ≥ 1, d ≥ 1 and k ≥ n".into()));
    }
    let eps = positive_rational(&a.eps, "eps")?;
    let rho = parse_rational(&a.rho)?;
    if rho < rat_int(0) {
        return Err(Error::InvalidInput("rho must be nonnegative".into()));
    }
    let params = theorem_parameters(a.n, a.k, a.d, &eps, &rho)?.with_corollary();
    let b = a.b.as_deref().map(|s| positive_rational(s, "b")).transpose()?;
    let lemma = verify_lemma_new(&params, b.as_ref())?;
    let mut report = value(&params)?;
    report["rhs"] = json!(rat_string(&params.rhs_full));
    let mut lemma_v = value(&lemma)?;
    // `a` and `b` name the two verdicts; the weight itself moves to `b_value`.
    if let Value::Object(m) = &mut lemma_v {
        let weight = m.remove("b");
        let check = m.remove("b_check");
        m.insert("b_value".into(), weight.unwrap_or(Value::Null));
        m.insert("b".into(), check.unwrap_or(Value::Null));
    }
    report["lemma_new"] = lemma_v;
    Ok(Outcome { name: "bounds", pass: lemma.passed(), report, csv: None })
}

fn filtration(a: &FiltrationArgs, seed: u64, cfg: &LocusConfig) -> Result<Outcome> {
    let fam = read_family(&a.family)?;
    let (fam, d) = normalize_degrees(&fam)?;
    let n = fam.n;
    let mut report = json!({});
    let forms: Vec<HomPoly> = if a.direct {
        if fam.q() < n {
            return Err(Error::InvalidInput(format!("need at least n = {n} members")));
        }
        fam.polys().into_iter().take(n).collect()
    } else {
        let subset = subset_or_default(&fam, a.k, &a.subset)?;
        let rep = replace_hypersurfaces(&fam, &subset, seed, DEFAULT_RETRY_BUDGET, cfg)?;
        report["replacement"] = value(&rep)?;
        rep.outputs[..n].to_vec()
    };
    if !a.big_n.is_multiple_of(d) {
        return Err(Error::InvalidInput(format!("N = {} must be divisible by d = {d}", a.big_n)));
    }
    let table = build_filtration(&forms, a.big_n, cfg)?;
    let cz = verify_cz(&table);
    let mut pass = cz.pass;
    if a.basis {
        let ok = table.verify_basis(seed).is_ok();
        report["basis_verified"] = json!(ok);
        pass &= ok;
    }
    let b = table.weights.iter().copied().min().unwrap_or(0);
    report["table"] = value(&if a.basis { table.clone() } else { table.without_basis() })?;
    report["jump_law"] = value(&cz)?;
    report["b"] = json!(b);
    if a.big_n > (n as u32 + 1) * d {
        let formula = b_lower_bound(n as u64, d as u64, &a.big_n.into())?;
        report["b_formula"] = json!(rat_string(&formula));
        report["b_meets_formula"] = json!(rat_int(b as i64) >= formula);
    }
    Ok(Outcome { name: "filtration", pass, report, csv: None })
}

fn parse_complex(s: &str) -> Result<Complex64> {
    s.trim().replace('I', "i").parse::<Complex64>().map_err(|_| Error::Parse(format!("not a complex number: {s}")))
}

fn wronskian(a: &WronskianArgs, seed: u64) -> Result<Outcome> {
    let j: TupleJson = serde_json::from_str(&read(&a.tuple)?)?;
    let entries = j.entries.iter().map(|e| e.to_mpoly(j.m)).collect::<Result<Vec<_>>>()?;
    let f = SymbolicTuple::new(j.m, entries)?;
    let set = admissible_search(&f)?;
    let w = wronskian_symbolic(&f, &set);
    let zero = is_identically_zero(&f, &set, seed);
    let names: Vec<String> = (1..=j.m).map(|i| format!("z{i}")).collect();
    let mut report = json!({
        "admissible_set": value(&set)?,
        "weight": set.weight(),
        "wronskian": MPolyJson::from_mpoly(&w).terms.iter().map(|t| json!({"exp": t.exp, "coef": t.coef})).collect::<Vec<_>>(),
        "wronskian_text": w.fmt_with(&names),
        "identically_zero": zero,
    });
    if let Some(pt) = &a.point {
        let pt = pt.iter().map(|s| parse_complex(s)).collect::<Result<Vec<_>>>()?;
        if pt.len() != j.m {
            return Err(Error::InvalidInput(format!("point needs {} coordinates", j.m)));
        }
        if let WronskianValue::Numeric(v) = wronskian_eval(&f, &set, Some(&pt))? {
            report["value"] = json!({"re": v.re, "im": v.im});
        }
    }
    Ok(Outcome { name: "wronskian", pass: set.is_admissible() && !zero && !w.is_zero(), report, csv: None })
}

fn gauss(a: &GaussArgs, seed: u64) -> Result<Outcome> {
    let f = PolyImmersion::from_json(&read(&a.immersion)?)?;
    let g = gauss_map(&f)?;
    let names: Vec<String> = (1..=f.m).map(|i| format!("z{i}")).collect();
    let relations = g.check_pluecker_relations();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mat, shift) = loop {
        let mat: Vec<Vec<Rational>> = (0..f.m).map(|_| (0..f.m).map(|_| rat_int(rng.random_range(-3..=3))).collect()).collect();
        if is_invertible(&mat) {
            let shift: Vec<Rational> = (0..f.m).map(|_| rat_int(rng.random_range(-3..=3))).collect();
            break (mat, shift);
        }
    };
    let invariant = affine_invariance_holds(&f, &mat, &shift)?;
    let mut pass = relations.is_ok() && invariant;
    let mut report = json!({
        "m": g.m,
        "n": g.n,
        "plucker_dimension": g.n_amb,
        "subsets": g.subsets,
        "coordinates": g.pluecker.iter().map(|p| p.fmt_with(&names)).collect::<Vec<_>>(),
        "common_factor": g.common_factor.fmt_with(&names),
        "degenerate": g.degenerate,
        "affine_invariance": invariant,
    });
    report["plucker_relations"] = match relations {
        Ok(count) => json!({"checked": count, "holds": true}),
        Err((i, j)) => json!({"holds": false, "failing": [i, j]}),
    };
    if let Some(path) = &a.family {
        let fam = read_family(path)?;
        let k = family_k(&fam, a.k)?;
        let eps = positive_rational(&a.eps, "eps")?;
        let rho = parse_rational(&a.rho)?;
        let rep = gauss_defect_pipeline(&f, &fam, k, &eps, &rho, &a.grid.build()?)?;
        pass &= rep.pass;
        report["defects"] = value(&rep)?;
    }
    Ok(Outcome { name: "gauss", pass, report, csv: None })
}
