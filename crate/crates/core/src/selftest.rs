//! The acceptance battery: eleven seeded checks with fixed tolerances.

use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{b_lower_bound, theorem_parameters, verify_lemma_new};
use crate::error::Result;
use crate::exact_algebra::{rat, rat_int, Rational};
use crate::filtration::{build_filtration, verify_cz};
use crate::gaussmap::{affine_invariance_holds, column_subsets, gauss_map, is_invertible, jacobian_minors};
use crate::nevanlinna::{
    defect_estimate, divisor_truncation_check, monomial_wronskian, pointwise_gap, profile, veronese_check,
    MeromorphicCurve, NevanlinnaProfile, RGrid, FMT_TOL,
};
use crate::polyring::mpoly::gcd_all;
use crate::polyring::{is_empty_locus, monomial_basis, projective_locus, HomPoly, LocusConfig, MPoly};
use crate::position::{replace_hypersurfaces, HypersurfaceFamily, DEFAULT_RETRY_BUDGET};
use crate::samples::{
    random_binary_family, random_curve, random_empty_family, random_form, random_immersion, random_mpoly,
    random_subgeneral_family,
};
use crate::wronskian::{admissible_search, dependence, det_laplace, wronskian_symbolic, SymbolicTuple};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Wall time; kept out of reports so they stay byte-identical across runs.
    #[serde(skip)]
    pub elapsed_secs: f64,
    pub limit_secs: f64,
}

pub const CRITERIA: [(u32, &str, f64); 11] = [
    (1, "filtration jump dimensions", 120.0),
    (2, "binary emptiness oracle", 30.0),
    (3, "hypersurface replacement", 300.0),
    (4, "parameter bounds", 10.0),
    (5, "first main theorem residual", 120.0),
    (6, "Wronskian scaling law", 30.0),
    (7, "Veronese characteristic", 60.0),
    (8, "divisor truncation inequality", 60.0),
    (9, "pointwise product gap", 60.0),
    (10, "defect sandwich and monotonicity", 60.0),
    (11, "Gauss map minors", 60.0),
];

/// Runs one criterion; errors inside a check count as failures.
pub fn run_criterion(id: u32, seed: u64) -> Option<CriterionResult> {
    let &(_, name, limit) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(id as u64));
    let outcome = match id {
        1 => filtration_law(rng),
        2 => emptiness_oracle(rng),
        3 => replacement(rng),
        4 => parameter_bounds(),
        5 => fmt_residual(rng),
        6 => scaling_law(rng),
        7 => veronese(rng),
        8 => divisor_claim(rng),
        9 => pointwise(seed),
        10 => sandwich(rng),
        11 => gauss_minors(rng),
        _ => unreachable!(),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let (ok, mut detail) = match outcome {
        Ok((ok, detail)) => (ok, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = elapsed < limit;
    if !in_time {
        detail.push_str(&format!("; exceeded {limit} s"));
    }
    Some(CriterionResult { id, name: name.into(), passed: ok && in_time, detail, elapsed_secs: elapsed, limit_secs: limit })
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0, seed)).collect()
}

type Outcome = Result<(bool, String)>;

fn filtration_law(mut rng: ChaCha8Rng) -> Outcome {
    let cfg = LocusConfig::default();
    let (mut tables, mut bad) = (0, Vec::new());
    for n in 1..=2usize {
        for d in 1..=2u32 {
            for big_n in (d..=12).step_by(d as usize) {
                for _ in 0..10 {
                    let fam = random_empty_family(&mut rng, n, d, &cfg)?;
                    let family = HypersurfaceFamily::from_polys(n, Some(n), fam)?;
                    let labels = family.labels();
                    let rep = replace_hypersurfaces(&family, &labels, rng.random(), DEFAULT_RETRY_BUDGET, &cfg)?;
                    let table = build_filtration(&rep.outputs[..n], big_n, &cfg)?;
                    tables += 1;
                    if !verify_cz(&table).pass {
                        bad.push(format!("n={n} d={d} N={big_n}"));
                    }
                }
            }
        }
    }
    Ok((bad.is_empty(), format!("{tables} filtrations, {} with a wrong jump {:?}", bad.len(), bad)))
}

fn emptiness_oracle(mut rng: ChaCha8Rng) -> Outcome {
    let cfg = LocusConfig::default();
    let mut mismatches = 0;
    let mut empty = 0;
    for _ in 0..200 {
        let fam = random_binary_family(&mut rng);
        let polys: Vec<MPoly> = fam.iter().map(|q| q.poly().clone()).collect();
        let oracle = gcd_all(&polys).expect("nonempty").is_constant();
        let verdict = projective_locus(&fam, &cfg)?.is_empty();
        mismatches += (verdict != oracle) as usize;
        empty += oracle as usize;
    }
    Ok((mismatches == 0, format!("200 families ({empty} with empty locus), {mismatches} mismatches")))
}

fn replacement(mut rng: ChaCha8Rng) -> Outcome {
    let cfg = LocusConfig::default();
    let mut failures = Vec::new();
    let mut repeated = 0;
    for case in 0..100 {
        let n = rng.random_range(1..=2usize);
        let k = rng.random_range(n..=4);
        let d = rng.random_range(1..=2u32);
        let q = k + 1 + rng.random_range(0..=1);
        let fam = random_subgeneral_family(&mut rng, n, k, d, q, &cfg)?;
        let polys = fam.polys();
        repeated += (1..polys.len()).any(|i| polys[..i].contains(&polys[i])) as usize;
        let subset: Vec<String> = fam.labels().into_iter().take(k + 1).collect();
        let ok = match replace_hypersurfaces(&fam, &subset, rng.random(), DEFAULT_RETRY_BUDGET, &cfg) {
            Ok(rep) => {
                let chain = rep.prefix_dims.iter().enumerate().all(|(i, &dim)| dim <= n as i64 - (i as i64 + 1));
                rep.verify_span_form(&fam)? && is_empty_locus(&rep.outputs, &cfg)? && chain
            }
            Err(_) => false,
        };
        if !ok {
            failures.push(format!("case {case}: n={n} k={k} d={d}"));
        }
    }
    Ok((failures.is_empty(), format!("100 families ({repeated} with a repeated member), failures {failures:?}")))
}

fn parameter_bounds() -> Outcome {
    let eps = [rat(1, 4), rat(1, 2), rat_int(1), rat_int(2)];
    let mut cases = 0;
    let mut bad = Vec::new();
    for n in 1..=4u64 {
        for k in n..=6 {
            for d in 1..=3u64 {
                for e in &eps {
                    let params = theorem_parameters(n, k, d, e, &rat_int(0))?;
                    let b = b_lower_bound(n, d, &params.big_n)?;
                    cases += 1;
                    if !verify_lemma_new(&params, Some(&b))?.passed() {
                        bad.push(format!("n={n} k={k} d={d} eps={e}"));
                    }
                }
            }
        }
    }
    let spot = theorem_parameters(1, 1, 1, &rat_int(1), &rat_int(0))?;
    let spot_ok = spot.big_n == BigInt::from(18) && spot.u == BigInt::from(19);
    Ok((
        bad.is_empty() && spot_ok,
        format!("{cases} parameter sets, failures {bad:?}; spot N={} u={}", spot.big_n, spot.u),
    ))
}

fn random_pair(rng: &mut ChaCha8Rng) -> (MeromorphicCurve, HomPoly) {
    loop {
        let n = rng.random_range(1..=3);
        let f = random_curve(rng, n, 4);
        let d = rng.random_range(1..=2);
        let q = random_form(rng, n, d, 0.6);
        if !f.compose(&q).is_zero() {
            return (f, q);
        }
    }
}

fn fmt_residual(mut rng: ChaCha8Rng) -> Outcome {
    let grid = RGrid::parse("geom:2,64,24", 1.0, 4096)?;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (f, q) = random_pair(&mut rng);
        worst = worst.max(profile(&f, &q, &grid, None)?.residual_variation());
    }
    Ok((worst <= FMT_TOL, format!("20 pairs, largest residual variation {worst:.3e} (tolerance {FMT_TOL:e})")))
}

fn scaling_law(mut rng: ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    for _ in 0..25 {
        let m = rng.random_range(1..=2);
        let len = rng.random_range(2..=3);
        let f = loop {
            let entries: Vec<MPoly> = (0..len).map(|_| random_mpoly(&mut rng, m, 3, 3)).collect();
            let f = SymbolicTuple::new(m, entries)?;
            if dependence(&f).is_none() {
                break f;
            }
        };
        let h = random_mpoly(&mut rng, m, 3, 3);
        let a = admissible_search(&f)?;
        let w = wronskian_symbolic(&f, &a);
        if !a.is_admissible() || w.is_zero() || wronskian_symbolic(&f.scaled_by(&h), &a) != h.pow(len as u32).mul(&w) {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("25 tuples, {bad} violations")))
}

fn veronese(mut rng: ChaCha8Rng) -> Outcome {
    // T_F − d·T_f converges like r^{-2}, so the battery looks far out; the
    // isometric quadratic map is exact and is also checked on the near grid.
    let far = RGrid::parse("geom:1e4,1e6,24", 1.0, 4096)?;
    let near = RGrid::parse("geom:2,64,24", 1.0, 4096)?;
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for n in 1..=2usize {
        for d in 1..=2u32 {
            let basis = monomial_basis(n, d);
            let standard: Vec<HomPoly> =
                basis.monomials().iter().map(|e| HomPoly::monomial(n, e.clone(), rat_int(1))).collect();
            for _ in 0..3 {
                let f = random_curve(&mut rng, n, 3);
                let mixed = loop {
                    let rows: Vec<Vec<Rational>> = (0..basis.len())
                        .map(|_| (0..basis.len()).map(|_| rat_int(rng.random_range(-3..=3))).collect())
                        .collect();
                    if is_invertible(&rows) {
                        break rows.iter().map(|r| HomPoly::from_vector(&basis, r)).collect::<Vec<_>>();
                    }
                };
                for forms in [&standard, &mixed] {
                    worst = worst.max(veronese_check(&f, forms, &far)?.variation);
                    runs += 1;
                }
            }
        }
    }
    let mono = |e: [u32; 2], c: i64| HomPoly::monomial(1, e.to_vec(), rat_int(c));
    let iso = vec![mono([2, 0], 1).add(&mono([0, 2], 1))?, mono([1, 1], 2), mono([2, 0], 1).add(&mono([0, 2], -1))?];
    let line = MeromorphicCurve::from_int(&[&[1], &[0, 1]])?;
    for f in [line, random_curve(&mut rng, 1, 3)] {
        worst = worst.max(veronese_check(&f, &iso, &near)?.variation);
        runs += 1;
    }
    Ok((worst <= FMT_TOL, format!("{runs} maps, largest variation {worst:.3e} (tolerance {FMT_TOL:e})")))
}

fn three_lines() -> Result<HypersurfaceFamily> {
    let (w0, w1) = (HomPoly::var(1, 0), HomPoly::var(1, 1));
    let s = w0.add(&w1)?;
    HypersurfaceFamily::from_polys(1, Some(1), vec![w0, w1, s])
}

fn divisor_claim(mut rng: ChaCha8Rng) -> Outcome {
    let cfg = LocusConfig::default();
    let mut cases: Vec<(MeromorphicCurve, HypersurfaceFamily, usize, u32)> = vec![
        (MeromorphicCurve::from_int(&[&[1], &[0, 1]])?, three_lines()?, 1, 2),
        (MeromorphicCurve::from_int(&[&[1], &[0, 0, 0, 1]])?, three_lines()?, 1, 2),
        (MeromorphicCurve::from_int(&[&[1, 1], &[0, 0, 0, 0, 1]])?, three_lines()?, 1, 2),
        (MeromorphicCurve::from_int(&[&[1], &[0, 0, 0, 0, 0, 0, 1]])?, three_lines()?, 1, 4),
    ];
    while cases.len() < 16 {
        let n = rng.random_range(1..=2usize);
        let k = rng.random_range(n..=n + 1);
        let d = rng.random_range(1..=2u32);
        // The Wronskian has binom(N+n, n) rows; keep it small in the plane.
        let big_n = if n == 1 { d * rng.random_range(1..=3u32) } else { d };
        let fam = random_subgeneral_family(&mut rng, n, k, d, k + 2, &cfg)?;
        let f = random_curve(&mut rng, n, 4);
        let composed_ok = fam.members.iter().all(|m| !f.compose(&m.poly).is_zero());
        if composed_ok && monomial_wronskian(&f, big_n).is_ok() {
            cases.push((f, fam, k, big_n));
        }
    }
    let (mut zeros, mut truncated, mut bad) = (0, 0, Vec::new());
    for (i, (f, fam, k, big_n)) in cases.iter().enumerate() {
        let rep = divisor_truncation_check(f, fam, *k, *big_n, None, i as u64, &cfg)?;
        zeros += rep.entries.len();
        truncated += rep.entries.iter().filter(|e| e.nu_q.iter().any(|&v| v as usize >= rep.u)).count();
        if !rep.pass {
            bad.push(i);
        }
    }
    Ok((
        bad.is_empty() && truncated > 0,
        format!("{} curves, {zeros} zero factors ({truncated} with multiplicity ≥ u), failing cases {bad:?}", cases.len()),
    ))
}

fn pointwise(seed: u64) -> Outcome {
    let f = MeromorphicCurve::from_int(&[&[1], &[0, 1]])?;
    let gap = pointwise_gap(&f, &three_lines()?, 1, 2.0, 10_000, seed, DEFAULT_RETRY_BUDGET, &LocusConfig::default())?;
    Ok((
        gap.stable,
        format!(
            "max gap {:.6} with 1e4 samples, {:.6} with 2e4, relative change {:.2e}",
            gap.max_gap, gap.max_gap_doubled, gap.relative_change
        ),
    ))
}

fn sandwich(mut rng: ChaCha8Rng) -> Outcome {
    let grid = RGrid::parse("geom:2,1e4,32", 1.0, 4096)?;
    let mut profiles: Vec<NevanlinnaProfile> = Vec::new();
    for _ in 0..20 {
        let (f, q) = random_pair(&mut rng);
        for trunc in [None, Some(1), Some(3)] {
            profiles.push(profile(&f, &q, &grid, trunc)?);
        }
    }
    let line = MeromorphicCurve::from_int(&[&[1], &[0, 1]])?;
    let square = MeromorphicCurve::from_int(&[&[1], &[0, 0, 1]])?;
    let (w0, w1) = (HomPoly::var(1, 0), HomPoly::var(1, 1));
    profiles.push(profile(&line, &w1, &grid, Some(1))?);
    profiles.push(profile(&square, &w0, &grid, None)?);
    profiles.push(profile(&line, &w0.add(&w1)?, &grid, None)?);
    let mut bad = Vec::new();
    for (i, p) in profiles.iter().enumerate() {
        let monotone = p.monotone();
        let capped = p.trunc.is_none_or(|m| {
            let ones: Vec<f64> = p.rows.iter().map(|r| r.n_full).collect();
            p.rows.iter().zip(&ones).all(|(r, full)| r.n_trunc <= full + 1e-12)
                && p.rows.iter().all(|r| r.n_trunc <= m as f64 * r.n_full + 1e-12)
        });
        if !(monotone && capped && defect_estimate(p)?.in_range) {
            bad.push(i);
        }
    }
    Ok((bad.is_empty(), format!("{} profiles, failing {bad:?}", profiles.len())))
}

fn gauss_minors(mut rng: ChaCha8Rng) -> Outcome {
    let mut bad = Vec::new();
    let mut relations = 0;
    for i in 0..20 {
        let m = 1 + i % 2;
        let n = if m == 2 { [3, 4][i / 2 % 2] } else { rng.random_range(2..=4) };
        let f = random_immersion(&mut rng, m, n, 3);
        let jac = f.jacobian();
        let oracle: Vec<MPoly> = column_subsets(m, n)
            .iter()
            .map(|cols| det_laplace(&jac.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect::<Vec<_>>()))
            .collect();
        let rep = gauss_map(&f)?;
        let rebuilt: Vec<MPoly> = rep.pluecker.iter().map(|p| p.mul(&rep.common_factor)).collect();
        let mut ok = jacobian_minors(&f) == oracle && rebuilt == oracle;
        if m == 2 && n == 4 {
            ok &= rep.check_pluecker_relations().is_ok();
            relations += 1;
        }
        let a: Vec<Vec<Rational>> = loop {
            let a: Vec<Vec<Rational>> =
                (0..m).map(|_| (0..m).map(|_| rat_int(rng.random_range(-2..=2))).collect()).collect();
            if is_invertible(&a) {
                break a;
            }
        };
        let c: Vec<Rational> = (0..m).map(|_| rat_int(rng.random_range(-2..=2))).collect();
        ok &= affine_invariance_holds(&f, &a, &c)?;
        if !ok {
            bad.push(i);
        }
    }
    Ok((
        bad.is_empty() && relations > 0,
        format!("20 immersions ({relations} with m=2, n=4 relation checks), failing {bad:?}"),
    ))
}
