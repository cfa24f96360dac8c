//! Property tests for operators, norms and serialization.

use std::f64::consts::PI;
use std::sync::Arc;

use hwmlab_core::commutator::{adjoint_leibniz, double_commutator, leibniz};
use hwmlab_core::dump::{read_fields, write_fields};
use hwmlab_core::norms::{lorentz_norm, lorentz_norm_values, lp_norm, sobolev_quotient, LorentzParams};
use hwmlab_core::random::{derive_seed, random_field, random_sphere_field, rng_from_seed, BandSpec};
use hwmlab_core::spectral::{frac_laplacian, riesz_transform};
use hwmlab_core::{ScalarField, TorusGrid};
use proptest::prelude::*;

fn grid(d: usize, n: usize) -> Arc<TorusGrid> {
    Arc::new(TorusGrid::cubic(d, n, 2.0 * PI).unwrap())
}

fn field(g: &Arc<TorusGrid>, seed: u64, k: usize) -> ScalarField {
    random_field(g, &BandSpec::new(k), &mut rng_from_seed(seed)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn frac_laplacian_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0, s in 0.1f64..2.0) {
        let g = grid(2, 16);
        let f = field(&g, seed, 3);
        let h = field(&g, seed ^ 1, 3);
        let lhs = frac_laplacian(&(&f.scale(a) + &h.scale(b)), s);
        let rhs = &frac_laplacian(&f, s).scale(a) + &frac_laplacian(&h, s).scale(b);
        prop_assert!(lhs.max_diff(&rhs) <= 1e-12 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn frac_laplacian_is_self_adjoint(seed in any::<u64>(), s in 0.1f64..2.0) {
        let g = grid(3, 8);
        let f = field(&g, seed, 2);
        let h = field(&g, seed ^ 7, 2);
        prop_assert!(rel(frac_laplacian(&f, s).inner(&h), f.inner(&frac_laplacian(&h, s))) <= 1e-11);
    }

    #[test]
    fn riesz_transform_is_skew_adjoint(seed in any::<u64>(), axis in 0usize..2) {
        let g = grid(2, 16);
        let f = field(&g, seed, 4);
        let h = field(&g, seed ^ 3, 4);
        let a = riesz_transform(&f, axis).unwrap().inner(&h);
        let b = -f.inner(&riesz_transform(&h, axis).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn leibniz_is_symmetric_and_bilinear(seed in any::<u64>(), s in 0.1f64..1.9, c in -2.0f64..2.0) {
        let g = grid(1, 64);
        let f = field(&g, seed, 6);
        let h = field(&g, seed ^ 5, 6);
        let fh = leibniz(&f, &h, s);
        prop_assert!(fh.max_diff(&leibniz(&h, &f, s)) <= 1e-12 * (1.0 + fh.max_abs()));
        prop_assert!(leibniz(&f.scale(c), &h, s).max_diff(&fh.scale(c)) <= 1e-12 * (1.0 + fh.max_abs()));
        let dc = double_commutator(&f, &h, 0.5, 0.5);
        prop_assert!(double_commutator(&f.scale(2.0), &h, 0.5, 0.5).max_diff(&dc.scale(2.0)) <= 1e-12 * (1.0 + dc.max_abs()));
    }

    #[test]
    fn adjoint_pairing_on_random_triples(seed in any::<u64>(), sigma in 0.1f64..1.9) {
        let g = grid(2, 16);
        let (f, h, w) = (field(&g, seed, 3), field(&g, seed ^ 11, 3), field(&g, seed ^ 13, 3));
        prop_assert!(rel(adjoint_leibniz(&f, &h, sigma).inner(&w), h.inner(&leibniz(&f, &w, sigma))) <= 1e-10);
    }

    #[test]
    fn lorentz_norm_is_rearrangement_invariant(values in prop::collection::vec(-5.0f64..5.0, 1..200), shift in 0usize..200, p in 1.1f64..8.0, q in 1.0f64..6.0) {
        let lp = LorentzParams::finite(p, q).unwrap();
        let mut moved = values.clone();
        let k = shift % values.len();
        moved.rotate_left(k);
        moved.reverse();
        for v in moved.iter_mut().step_by(2) {
            *v = -*v;
        }
        prop_assert!(rel(lorentz_norm_values(&values, 0.1, lp), lorentz_norm_values(&moved, 0.1, lp)) <= 1e-12);
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), c in 0.01f64..100.0, p in 1.1f64..10.0) {
        let g = grid(2, 16);
        let f = field(&g, seed, 3);
        let fc = f.scale(-c);
        prop_assert!(rel(lp_norm(&fc, p), c * lp_norm(&f, p)) <= 1e-12);
        let lp = LorentzParams::finite(p, 2.0).unwrap();
        prop_assert!(rel(lorentz_norm(&fc, lp), c * lorentz_norm(&f, lp)) <= 1e-12);
    }

    #[test]
    fn sobolev_quotient_is_scale_invariant(seed in any::<u64>(), c in 0.01f64..100.0) {
        let g = grid(3, 8);
        let f = field(&g, seed, 2);
        prop_assert!(rel(sobolev_quotient(&f.scale(c), 1.0, 2.0).unwrap(), sobolev_quotient(&f, 1.0, 2.0).unwrap()) <= 1e-12);
    }

    #[test]
    fn dump_round_trips(seed in any::<u64>(), d in 1usize..4) {
        let g = grid(d, 8);
        let u = random_sphere_field(&g, &BandSpec::new(2), [0.0, 0.0, 1.0], &mut rng_from_seed(seed)).unwrap();
        let [a, b, c] = u.comps();
        let mut bytes = Vec::new();
        write_fields(&mut bytes, &[a, b, c]).unwrap();
        let back = read_fields(bytes.as_slice()).unwrap();
        prop_assert_eq!(back.len(), 3);
        for (x, y) in back.iter().zip([a, b, c]) {
            prop_assert_eq!(x.values(), y.values());
            prop_assert_eq!(x.grid(), y.grid());
        }
    }

    #[test]
    fn seeded_draws_are_reproducible(base in any::<u64>(), stream in 0u64..8, index in 0u64..1000) {
        let g = grid(2, 16);
        let s = derive_seed(base, stream, index);
        let (a, b) = (field(&g, s, 4), field(&g, s, 4));
        prop_assert_eq!(a.values(), b.values());
        prop_assert_ne!(s, derive_seed(base, stream, index + 1));
    }
}

#[test]
fn dump_file_round_trip_on_disk() {
    let g = grid(2, 8);
    let f = field(&g, 42, 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.hwmf");
    write_fields(std::fs::File::create(&path).unwrap(), &[&f]).unwrap();
    let back = read_fields(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back[0].values(), f.values());
}

#[test]
fn truncated_dump_is_rejected() {
    let g = grid(1, 8);
    let f = field(&g, 1, 2);
    let mut bytes = Vec::new();
    write_fields(&mut bytes, &[&f]).unwrap();
    bytes.truncate(bytes.len() - 3);
    assert!(read_fields(bytes.as_slice()).is_err());
    bytes[0] = b'X';
    assert!(read_fields(bytes.as_slice()).is_err());
}
