use proptest::prelude::*;

use efpp_core::estimators::{RecordFlags, ReplicateRecord};

prop_compose! {
    fn arb_record()(
        n in 1u64..1_000_000,
        replicate_index in 0u64..1_000_000,
        seed in any::<u64>(),
        t_n in prop::option::weighted(0.9, 0.0..1e6f64),
        wandering in prop::option::weighted(0.9, 0.0..1e4f64),
        raw_lambdas in prop::collection::vec(-1e3..1e3f64, 0..6),
        values in prop::collection::vec(prop::option::of(0.0..1e3f64), 6),
        failed in any::<bool>(),
        touched_boundary in any::<bool>(),
        f_n_violated in any::<bool>(),
    ) -> ReplicateRecord {
        let mut lambdas = raw_lambdas;
        lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        lambdas.dedup();
        let slab: Vec<(f64, Option<f64>)> = lambdas.into_iter().zip(values).collect();
        ReplicateRecord {
            n,
            replicate_index,
            seed,
            t_n,
            wandering,
            slab,
            flags: RecordFlags { failed, touched_boundary, f_n_violated },
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Serialize-parse identity over random records, including null
    /// observations and full-precision floats.
    #[test]
    fn jsonl_round_trip_is_identity(rec in arb_record()) {
        let line = serde_json::to_string(&rec).unwrap();
        prop_assert!(!line.contains('\n'));
        let back: ReplicateRecord = serde_json::from_str(&line).unwrap();
        prop_assert_eq!(&back, &rec);
        // Serialization is canonical: a second pass gives the same bytes.
        let line2 = serde_json::to_string(&back).unwrap();
        prop_assert_eq!(line, line2);
    }
}
