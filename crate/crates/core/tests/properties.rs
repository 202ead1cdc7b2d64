//! Property tests over the generator families and storage formats.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::{bits, dense_spmv_oracle, rel_inf_err, test_rhs};
use spmv_core::formats::{
    build_ellpack, build_ellpack_r, build_pjds, permute_vector, PermuteDirection,
};
use spmv_core::kernels::{
    spmv_csr, spmv_ellpack, spmv_ellpack_r, spmv_pjds, spmv_split, vector_checksum,
};
use spmv_core::matrix::{coo_to_csr, generate, histogram, Distribution, GeneratorSpec};

fn arb_distribution(n_rows: usize) -> impl Strategy<Value = Distribution> {
    let max_len = n_rows.min(24);
    prop_oneof![
        (1..=max_len).prop_map(|k| Distribution::Constant { row_len: k }),
        (1..=max_len, 1..=max_len).prop_map(|(a, b)| Distribution::Uniform {
            lo: a.min(b),
            hi: a.max(b),
        }),
        (1..=max_len, 0.1f64..=1.0).prop_map(move |(peak, frac)| Distribution::Clustered {
            peak_fraction: frac,
            peak_len: peak,
            tail_lo: 1,
        }),
        Just(Distribution::Adversarial),
        Just(Distribution::Banded {
            offsets: vec![-2, 0, 3]
        }),
    ]
}

fn arb_spec() -> impl Strategy<Value = GeneratorSpec> {
    (8usize..=96)
        .prop_flat_map(|n| (Just(n), arb_distribution(n), any::<u64>()))
        .prop_map(|(n_rows, distribution, seed)| GeneratorSpec {
            n_rows,
            distribution,
            seed,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every format reproduces the source entry multiset, pJDS through its
    /// row permutation.
    #[test]
    fn formats_preserve_entries(spec in arb_spec(), warp in 1usize..=16) {
        let m = generate(&spec).unwrap();
        let source: Vec<(usize, usize, u64)> = (0..m.n_rows)
            .flat_map(|i| {
                m.row_cols(i).iter().zip(m.row_values(i)).map(move |(c, v)| (i, *c, v.to_bits()))
            })
            .collect();

        let e = build_ellpack_r(&m, warp).unwrap();
        let mut got: Vec<(usize, usize, u64)> = Vec::with_capacity(m.nnz());
        for i in 0..m.n_rows {
            for j in 0..e.rowmax[i] {
                let (v, c) = e.slot(i, j);
                got.push((i, c, v.to_bits()));
            }
        }
        got.sort_unstable();
        let mut want = source.clone();
        want.sort_unstable();
        prop_assert_eq!(&got, &want);

        let p = build_pjds(&m, warp).unwrap();
        let mut got: Vec<(usize, usize, u64)> = Vec::with_capacity(m.nnz());
        for new in 0..p.n_rows {
            let old = p.permutation[new];
            for j in 0..p.rowmax[new] {
                let k = p.col_start[j] + new;
                got.push((old, p.col_idx[k], p.values[k].to_bits()));
            }
        }
        got.sort_unstable();
        prop_assert_eq!(&got, &want);
    }

    /// pJDS never stores more than ELLPACK(-R) at the same block size.
    #[test]
    fn pjds_storage_never_exceeds_ellpack(spec in arb_spec(), warp in 1usize..=16) {
        let m = generate(&spec).unwrap();
        let e = build_ellpack(&m, warp).unwrap();
        let er = build_ellpack_r(&m, warp).unwrap();
        let p = build_pjds(&m, warp).unwrap();
        prop_assert_eq!(e.stored_entries(), er.stored_entries());
        prop_assert!(p.stored_entries() <= e.stored_entries());
        prop_assert!(p.stored_entries() >= m.nnz());
        let f = p.footprint(spmv_core::Precision::Dp);
        prop_assert!((0.0..1.0).contains(&f.data_reduction_vs_ellpack));
        prop_assert!(f.padding_overhead_fraction >= 0.0);
    }

    /// col_start extents equal a direct per-block recount.
    #[test]
    fn col_start_matches_recount(spec in arb_spec(), b_r in 1usize..=16) {
        let m = generate(&spec).unwrap();
        let p = build_pjds(&m, b_r).unwrap();
        for j in 0..p.width {
            let active = (0..p.n_blocks()).filter(|&b| p.block_max(b) > j).count();
            prop_assert_eq!(p.col_start[j + 1] - p.col_start[j], b_r * active);
        }
    }

    /// Histogram bins always sum to the row count and mean to nnz/n.
    #[test]
    fn histogram_consistent(spec in arb_spec()) {
        let m = generate(&spec).unwrap();
        let h = histogram(&m);
        prop_assert_eq!(h.n_rows(), m.n_rows);
        prop_assert_eq!(h.mean_len, m.nnz() as f64 / m.n_rows as f64);
        let recount: usize = h.bins.iter().map(|(len, count)| len * count).sum();
        prop_assert_eq!(recount, m.nnz());
    }

    /// COO -> CSR -> COO preserves the entry multiset exactly.
    #[test]
    fn coo_round_trip(spec in arb_spec()) {
        let m = generate(&spec).unwrap();
        let coo = m.to_coo();
        let back = coo_to_csr(&coo).unwrap();
        prop_assert_eq!(&m, &back);
    }

    /// Kernel agreement across formats against the dense oracle.
    #[test]
    fn kernels_agree_with_oracle(spec in arb_spec(), b_r in 1usize..=8) {
        let m = generate(&spec).unwrap();
        let x = test_rhs(m.n_cols, spec.seed);
        let want = dense_spmv_oracle(&m, &x);

        let y = spmv_csr(&m, &x).unwrap();
        prop_assert!(rel_inf_err(&y, &want) <= 1e-13);

        let (y, _) = spmv_ellpack(&build_ellpack(&m, b_r).unwrap(), &x).unwrap();
        prop_assert!(rel_inf_err(&y, &want) <= 1e-13);

        let (y, _) = spmv_ellpack_r(&build_ellpack_r(&m, b_r).unwrap(), &x).unwrap();
        prop_assert!(rel_inf_err(&y, &want) <= 1e-13);

        let p = build_pjds(&m, b_r).unwrap();
        let (yp, _) = spmv_pjds(&p, &x).unwrap();
        let y = permute_vector(&yp, &p.permutation, PermuteDirection::Inverse).unwrap();
        prop_assert!(rel_inf_err(&y, &want) <= 1e-13);
    }

    /// Permutation round trip is exact for arbitrary vectors.
    #[test]
    fn permutation_round_trip(n in 1usize..200, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut rng);
        let v = test_rhs(n, seed);
        let fwd = permute_vector(&v, &p, PermuteDirection::Forward).unwrap();
        let back = permute_vector(&fwd, &p, PermuteDirection::Inverse).unwrap();
        prop_assert_eq!(bits(&v), bits(&back));
        // checksum is permutation invariant
        prop_assert_eq!(vector_checksum(&v), vector_checksum(&fwd));
    }

    /// A degenerate split (everything local) is bitwise identical to CSR.
    #[test]
    fn split_identity(spec in arb_spec()) {
        let m = generate(&spec).unwrap();
        let x = test_rhs(m.n_cols, spec.seed ^ 1);
        let y = spmv_split(&m, 0..m.n_cols, &BTreeMap::new(), &x, &[]).unwrap();
        let want = spmv_csr(&m, &x).unwrap();
        prop_assert_eq!(bits(&y), bits(&want));
    }

    /// Kernels are bitwise deterministic across repeated runs.
    #[test]
    fn kernels_deterministic(spec in arb_spec()) {
        let m = generate(&spec).unwrap();
        let x = test_rhs(m.n_cols, !spec.seed);
        let p = build_pjds(&m, 4).unwrap();
        let (a, _) = spmv_pjds(&p, &x).unwrap();
        let (b, _) = spmv_pjds(&p, &x).unwrap();
        prop_assert_eq!(bits(&a), bits(&b));
    }
}
