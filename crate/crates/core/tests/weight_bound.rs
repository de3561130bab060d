use defectlab::bounds::b_lower_bound;
use defectlab::exact_algebra::rat_int;
use defectlab::filtration::build_filtration;
use defectlab::polyring::LocusConfig;
use defectlab::position::{replace_hypersurfaces, HypersurfaceFamily, DEFAULT_RETRY_BUDGET};
use defectlab::samples::random_empty_family;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The weight b of generated filtrations against the closed-form lower bound,
/// over the range N > (n+1)d where the bound is claimed.
#[test]
fn weights_dominate_the_closed_form_bound() {
    let cfg = LocusConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut below = Vec::new();
    let mut checked = 0;
    for n in 1..=2usize {
        for d in 1..=2u32 {
            for big_n in (d * (n as u32 + 1) + d..=12).step_by(d as usize) {
                for _ in 0..3 {
                    let fam = random_empty_family(&mut rng, n, d, &cfg).unwrap();
                    let family = HypersurfaceFamily::from_polys(n, Some(n), fam).unwrap();
                    let rep = replace_hypersurfaces(&family, &family.labels(), rng.random(), DEFAULT_RETRY_BUDGET, &cfg).unwrap();
                    let table = build_filtration(&rep.outputs[..n], big_n, &cfg).unwrap();
                    let b = *table.weights.iter().min().unwrap();
                    let bound = b_lower_bound(n as u64, d as u64, &BigInt::from(big_n)).unwrap();
                    checked += 1;
                    if rat_int(b as i64) < bound {
                        below.push((n, d, big_n, b, bound.to_string()));
                    }
                }
            }
        }
    }
    println!("{checked} filtrations, below bound: {below:?}");
    assert!(checked > 20);
    assert!(below.is_empty(), "weights below the closed-form bound: {below:?}");
}
