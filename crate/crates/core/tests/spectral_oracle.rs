mod common;

use graphscape::spectral::{dense_spectrum, InertiaCounter, PIVOT_TOL};
use rand::Rng;

#[test]
fn inertia_counts_match_dense_eigenvalues() {
    let mut rng = common::rng(2024);
    let mut sizes = Vec::new();
    for _ in 0..200 {
        let op = common::random_operator(&mut rng, 300);
        sizes.push(op.dim());
        let ev = dense_spectrum(&op).unwrap();
        let counter = InertiaCounter::new(&op, PIVOT_TOL);
        let (lo, hi) = op.gershgorin();
        let mut tested = 0;
        while tested < 50 {
            let e = rng.gen_range(lo - 0.5..hi + 0.5);
            if ev.iter().any(|l| (l - e).abs() < 1e-6) {
                continue;
            }
            let exact = ev.iter().filter(|&&l| l <= e).count();
            let r = counter.count(e).unwrap();
            assert_eq!(r.n_at, 0, "n = {}, E = {e}", op.dim());
            assert_eq!(r.n_below, exact, "n = {}, E = {e}", op.dim());
            assert_eq!(r.n_below + r.n_at + r.n_above, op.dim());
            tested += 1;
        }
    }
    eprintln!("sizes {:?}", sizes);
}
