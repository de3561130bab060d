//! Seeded random inputs shared by the self-test battery and the test suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exact_algebra::rat_int;
use crate::gaussmap::{jacobian_minors, PolyImmersion};
use crate::nevanlinna::MeromorphicCurve;
use crate::polyring::{is_empty_locus, monomial_basis, HomPoly, LocusConfig, MPoly};
use crate::position::{check_subgeneral, HypersurfaceFamily};

/// Nonzero form with integer coefficients in `[-3, 3]`, each monomial kept with probability `density`.
pub fn random_form(rng: &mut ChaCha8Rng, n: usize, d: u32, density: f64) -> HomPoly {
    let basis = monomial_basis(n, d);
    loop {
        let mut terms = Vec::new();
        for e in basis.monomials() {
            if rng.random_bool(density) {
                terms.push((e.clone(), rat_int(rng.random_range(-3..=3))));
            }
        }
        let q = HomPoly::from_terms(n, d, terms).expect("degree matches basis");
        if !q.is_zero() {
            return q;
        }
    }
}

/// Nonzero polynomial in `m` variables of total degree `≤ maxdeg` with up to `terms` terms.
pub fn random_mpoly(rng: &mut ChaCha8Rng, m: usize, maxdeg: u32, terms: usize) -> MPoly {
    loop {
        let t: Vec<(Vec<u32>, _)> = (0..terms)
            .map(|_| {
                let deg = rng.random_range(0..=maxdeg);
                let basis = monomial_basis(m - 1, deg);
                let e = basis.monomials()[rng.random_range(0..basis.len())].clone();
                (e, rat_int(rng.random_range(-4..=4)))
            })
            .collect();
        let p = MPoly::from_terms(m, t).expect("exponents have m entries");
        if !p.is_zero() {
            return p;
        }
    }
}

/// `n+1` forms of degree `d` with empty common zero locus.
pub fn random_empty_family(rng: &mut ChaCha8Rng, n: usize, d: u32, cfg: &LocusConfig) -> Result<Vec<HomPoly>> {
    loop {
        let fam: Vec<HomPoly> = (0..=n).map(|_| random_form(rng, n, d, 0.7)).collect();
        if is_empty_locus(&fam, cfg)? {
            return Ok(fam);
        }
    }
}

/// A `k`-subgeneral family of `q ≥ k+1` forms of degree `d`. When `k > n`, a
/// member may be repeated, which is allowed as long as the position check passes.
pub fn random_subgeneral_family(
    rng: &mut ChaCha8Rng,
    n: usize,
    k: usize,
    d: u32,
    q: usize,
    cfg: &LocusConfig,
) -> Result<HypersurfaceFamily> {
    loop {
        let mut polys: Vec<HomPoly> = Vec::with_capacity(q);
        for i in 0..q {
            if i > 0 && k > n && rng.random_bool(0.2) {
                let j = rng.random_range(0..i);
                polys.push(polys[j].clone());
            } else {
                polys.push(random_form(rng, n, d, 0.6));
            }
        }
        let fam = HypersurfaceFamily::from_polys(n, Some(k), polys)?;
        if check_subgeneral(&fam, k, cfg)?.holds() {
            return Ok(fam);
        }
    }
}

/// Binary forms built from a few shared linear factors, so common roots are frequent.
pub fn random_binary_family(rng: &mut ChaCha8Rng) -> Vec<HomPoly> {
    let pool: Vec<HomPoly> = (0..3).map(|_| random_form(rng, 1, 1, 0.8)).collect();
    let size = rng.random_range(1..=4);
    (0..size)
        .map(|_| {
            let deg = rng.random_range(1..=4u32);
            if rng.random_bool(0.6) {
                let shared = pool[rng.random_range(0..pool.len())].clone();
                if deg == 1 {
                    shared
                } else {
                    shared.mul(&random_form(rng, 1, deg - 1, 0.7))
                }
            } else {
                random_form(rng, 1, deg, 0.7)
            }
        })
        .collect()
}

/// Nonconstant reduced curve in `P^n` with integer coefficients and component degrees `≤ maxdeg`.
pub fn random_curve(rng: &mut ChaCha8Rng, n: usize, maxdeg: usize) -> MeromorphicCurve {
    loop {
        let comps: Vec<Vec<i64>> = (0..=n)
            .map(|_| {
                let deg = rng.random_range(0..=maxdeg);
                let mut c: Vec<i64> = (0..=deg).map(|_| rng.random_range(-4..=4)).collect();
                if c[deg] == 0 {
                    c[deg] = 1;
                }
                c
            })
            .collect();
        let refs: Vec<&[i64]> = comps.iter().map(Vec::as_slice).collect();
        if let Ok(f) = MeromorphicCurve::from_int(&refs) {
            if !f.is_constant() {
                return f;
            }
        }
    }
}

/// Immersion `C^m → C^n` whose Jacobian has generic rank `m`.
pub fn random_immersion(rng: &mut ChaCha8Rng, m: usize, n: usize, maxdeg: u32) -> PolyImmersion {
    loop {
        let comps = (0..n).map(|_| random_mpoly(rng, m, maxdeg, 3)).collect();
        let f = PolyImmersion::new(m, n, comps).expect("shape is consistent");
        if jacobian_minors(&f).iter().any(|p| !p.is_zero()) {
            return f;
        }
    }
}
