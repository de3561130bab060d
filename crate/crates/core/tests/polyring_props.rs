use defectlab::exact_algebra::Rational;
use defectlab::polyring::mpoly::gcd_all;
use defectlab::polyring::{
    hilbert_value, ideal_graded_piece, is_empty_locus, monomial_basis, projective_locus, HomPoly, LocusConfig,
};
use defectlab::samples::{random_binary_family, random_form};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn binary_emptiness_matches_gcd() {
    let cfg = LocusConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut empties = 0;
    for _ in 0..200 {
        let fam = random_binary_family(&mut rng);
        let polys: Vec<_> = fam.iter().map(|q| q.poly().clone()).collect();
        let g = gcd_all(&polys).unwrap();
        let oracle = g.is_constant();
        let locus = projective_locus(&fam, &cfg).unwrap();
        assert_eq!(locus.is_empty(), oracle, "{fam:?}");
        assert_eq!(is_empty_locus(&fam, &cfg).unwrap(), oracle);
        if !oracle {
            assert_eq!(locus.dim(), 0);
        }
        empties += oracle as usize;
    }
    assert!(empties > 20 && empties < 180, "degenerate sample: {empties}");
}

#[test]
fn hilbert_is_monotone_in_generators() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let n = rng.random_range(1..=2);
        let mut gens = Vec::new();
        let mut prev: Vec<usize> = (0..6).map(|d| hilbert_value(n, &gens, d)).collect();
        for _ in 0..4 {
            let d = rng.random_range(1..=2);
            gens.push(random_form(&mut rng, n, d, 0.6));
            let cur: Vec<usize> = (0..6).map(|d| hilbert_value(n, &gens, d)).collect();
            for (a, b) in cur.iter().zip(&prev) {
                assert!(a <= b);
            }
            prev = cur;
        }
        // Once zero, the Hilbert function stays zero.
        let h: Vec<usize> = (1..8).map(|d| hilbert_value(n, &gens, d)).collect();
        if let Some(z) = h.iter().position(|&x| x == 0) {
            assert!(h[z..].iter().all(|&x| x == 0));
            assert!(projective_locus(&gens, &LocusConfig::default()).unwrap().is_empty());
        }
    }
}

#[test]
fn shifted_pieces_are_nested() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..15 {
        let n = rng.random_range(1..=2);
        let gens: Vec<HomPoly> = (0..rng.random_range(1..=3)).map(|_| random_form(&mut rng, n, 2, 0.5)).collect();
        for d in 2..5 {
            let (low, _) = ideal_graded_piece(n, &gens, d).unwrap();
            let (high, _) = ideal_graded_piece(n, &gens, d + 1).unwrap();
            let lo = monomial_basis(n, d);
            let hi = monomial_basis(n, d + 1);
            for r in 0..low.dim() {
                let f = HomPoly::from_vector(&lo, low.basis().row(r));
                for i in 0..=n {
                    let g = f.mul(&HomPoly::var(n, i));
                    assert!(high.contains_vector(&g.to_vector(&hi)).unwrap());
                }
            }
        }
    }
}

fn coeff_by_convolution(p: &HomPoly, q: &HomPoly, e: &[u32]) -> Rational {
    let mut acc = Rational::zero();
    for (a, ca) in p.poly().terms() {
        for (b, cb) in q.poly().terms() {
            if a.iter().zip(b).zip(e).all(|((x, y), z)| x + y == *z) {
                acc += ca * cb;
            }
        }
    }
    acc
}

#[test]
fn products_match_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n = rng.random_range(1..=3);
        let (dp, dq) = (rng.random_range(0..=3), rng.random_range(0..=3));
        let p = random_form(&mut rng, n, dp, 0.6);
        let q = random_form(&mut rng, n, dq, 0.6);
        let prod = p.mul(&q);
        assert_eq!(prod.degree(), dp + dq);
        let basis = monomial_basis(n, dp + dq);
        let e = &basis.monomials()[rng.random_range(0..basis.len())];
        assert_eq!(prod.poly().coeff(e), coeff_by_convolution(&p, &q, e));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn monomial_basis_counts(n in 0usize..4, d in 0u32..6) {
        let b = monomial_basis(n, d);
        prop_assert_eq!(b.len(), defectlab::polyring::dim_graded(n, d));
        prop_assert!(b.monomials().iter().all(|m| m.iter().sum::<u32>() == d));
        prop_assert!(b.monomials().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn json_round_trip(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_form(&mut rng, 2, 3, 0.5).scale(&defectlab::exact_algebra::rat(3, 7));
        let s = serde_json::to_string(&q).unwrap();
        let back: HomPoly = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, q);
    }
}
