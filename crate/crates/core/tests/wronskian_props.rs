use defectlab::polyring::MPoly;
use defectlab::samples::random_mpoly;
use defectlab::wronskian::{admissible_search, dependence, wronskian_symbolic, SymbolicTuple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn independent_tuple(rng: &mut ChaCha8Rng, m: usize, len: usize, maxdeg: u32) -> SymbolicTuple {
    loop {
        let entries: Vec<MPoly> = (0..len).map(|_| random_mpoly(rng, m, maxdeg, 3)).collect();
        let f = SymbolicTuple::new(m, entries).unwrap();
        if dependence(&f).is_none() {
            return f;
        }
    }
}

#[test]
fn scaling_law_on_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..25 {
        let m = rng.random_range(1..=2);
        let len = rng.random_range(2..=3);
        let f = independent_tuple(&mut rng, m, len, 3);
        let h = random_mpoly(&mut rng, m, 3, 3);
        let a = admissible_search(&f).unwrap();
        assert!(a.is_admissible());
        let lhs = wronskian_symbolic(&f.scaled_by(&h), &a);
        let rhs = h.pow(len as u32).mul(&wronskian_symbolic(&f, &a));
        assert_eq!(lhs, rhs);
        assert!(!rhs.is_zero());
    }
}

#[test]
fn one_variable_search_is_ordinary() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let len = rng.random_range(1..=4);
        let f = independent_tuple(&mut rng, 1, len, 4);
        let a = admissible_search(&f).unwrap();
        let expect: Vec<Vec<u32>> = (0..len as u32).map(|i| vec![i]).collect();
        assert_eq!(a.alphas, expect);
    }
}

#[test]
fn search_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let f = independent_tuple(&mut rng, 2, 3, 2);
        assert_eq!(admissible_search(&f).unwrap(), admissible_search(&f.clone()).unwrap());
    }
}
