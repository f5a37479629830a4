//! Property tests for the disk-list layer and the ingest/reference pair:
//! randomized round trips and structural laws that hold for any input, kept
//! separate from the acceptance suite so each file states one kind of
//! guarantee.

use proptest::prelude::*;

use bwtlcp::ingest::{load_collection, Alphabet, InputFormat};
use bwtlcp::oracle::{compare_p, oracle_bwt_lcp, suffix_lcp, SuffixRef};
use bwtlcp::seqlist::{ListSpec, ListStore, Width};

fn store() -> (tempfile::TempDir, ListStore) {
    let dir = tempfile::tempdir().unwrap();
    let store = ListStore::open(dir.path(), 512).unwrap();
    (dir, store)
}

fn write_list(store: &ListStore, name: &str, spec: ListSpec, values: &[i64]) {
    let mut w = store.create(name, spec).unwrap();
    for &v in values {
        w.append(v).unwrap();
    }
    w.finish().unwrap();
}

fn spec_strategy() -> impl Strategy<Value = ListSpec> {
    (prop_oneof![Just(Width::W1), Just(Width::W4), Just(Width::W8)], any::<bool>())
        .prop_map(|(width, signed)| ListSpec { width, signed })
}

fn values_for(spec: ListSpec) -> impl Strategy<Value = Vec<i64>> {
    let (low, high): (i64, i64) = match (spec.width, spec.signed) {
        (Width::W1, false) => (0, u8::MAX as i64),
        (Width::W1, true) => (i8::MIN as i64, i8::MAX as i64),
        (Width::W4, false) => (0, u32::MAX as i64),
        (Width::W4, true) => (i32::MIN as i64, i32::MAX as i64),
        (Width::W8, false) => (0, i64::MAX),
        (Width::W8, true) => (i64::MIN, i64::MAX),
    };
    proptest::collection::vec(low..=high, 0..200)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lists_round_trip_across_all_encodings(
        (spec, values) in spec_strategy().prop_flat_map(|s| values_for(s).prop_map(move |v| (s, v)))
    ) {
        let (_dir, store) = store();
        write_list(&store, "trip", spec, &values);
        let file = store.open_sealed("trip").unwrap();
        prop_assert_eq!(file.len(), values.len() as u64);
        prop_assert_eq!(file.read_all().unwrap(), values);
    }

    #[test]
    fn concatenation_is_exactly_the_joined_contents(
        lists in proptest::collection::vec(
            proptest::collection::vec(0i64..=255, 0..50),
            1..6,
        )
    ) {
        let (_dir, store) = store();
        let spec = ListSpec::SYMBOL;
        let mut files = Vec::new();
        for (i, values) in lists.iter().enumerate() {
            write_list(&store, &format!("part_{i}"), spec, values);
            files.push(store.open_sealed(&format!("part_{i}")).unwrap());
        }
        let refs: Vec<_> = files.iter().collect();
        let joined = store.concat("joined", spec, &refs).unwrap();
        let expected: Vec<i64> = lists.concat();
        prop_assert_eq!(joined.read_all().unwrap(), expected);
    }

    #[test]
    fn interleaving_components_by_a_random_encoding_round_trips(
        lengths in proptest::collection::vec(0usize..40, 1..5),
        seed in any::<u64>(),
    ) {
        use rand::prelude::*;
        use rand::seq::SliceRandom;

        let (_dir, store) = store();
        let spec = ListSpec::SYMBOL;
        // Component q holds the values q, q, q, ... so the merged output
        // must literally equal the encoding that produced it.
        let mut files = Vec::new();
        for (q, &len) in lengths.iter().enumerate() {
            let values = vec![q as i64; len];
            write_list(&store, &format!("comp_{q}"), spec, &values);
            files.push(store.open_sealed(&format!("comp_{q}")).unwrap());
        }
        let mut encoding: Vec<i64> = lengths
            .iter()
            .enumerate()
            .flat_map(|(q, &len)| std::iter::repeat(q as i64).take(len))
            .collect();
        encoding.shuffle(&mut StdRng::seed_from_u64(seed));
        write_list(&store, "encoding", ListSpec::level_for(lengths.len() as u64), &encoding);
        let encoding_file = store.open_sealed("encoding").unwrap();

        let out = store.create("merged", spec).unwrap();
        let merged =
            bwtlcp::seqlist::reconstruct_interleave(&encoding_file, &files, out).unwrap();
        prop_assert_eq!(merged.read_all().unwrap(), encoding);
    }

    #[test]
    fn parsing_then_decoding_recovers_the_input_lines(
        rows in proptest::collection::vec(
            proptest::collection::vec(0usize..4, 1..12),
            1..12,
        ).prop_filter("equal lengths", |rows| {
            rows.iter().all(|r| r.len() == rows[0].len())
        })
    ) {
        let alphabet = Alphabet::new("ACGT").unwrap();
        let letters = [b'A', b'C', b'G', b'T'];
        let text: String = rows
            .iter()
            .map(|row| {
                row.iter().map(|&c| letters[c] as char).collect::<String>() + "\n"
            })
            .collect();
        let collection =
            load_collection(std::io::Cursor::new(text), InputFormat::Lines, &alphabet).unwrap();
        prop_assert_eq!(collection.m(), rows.len());
        for (i, row) in rows.iter().enumerate() {
            let codes: Vec<u8> = row.iter().map(|&c| c as u8 + 1).collect();
            prop_assert_eq!(collection.row(i), &codes[..]);
        }
    }

    #[test]
    fn prefix_comparison_is_a_strict_total_order_per_depth(
        k in 1usize..6,
        m in 1usize..5,
        seed in any::<u64>(),
        p in 0usize..7,
    ) {
        use rand::prelude::*;
        let mut rng = StdRng::seed_from_u64(seed);
        let rows: Vec<Vec<u8>> = (0..m)
            .map(|_| (0..k).map(|_| rng.random_range(1..=4)).collect())
            .collect();
        let ids = (1..=m).map(|i| format!("line {i}")).collect();
        let collection =
            bwtlcp::ingest::StringCollection::from_rows(rows, ids).unwrap();
        let mut suffixes = Vec::new();
        for len in 0..=k {
            for string in 0..m {
                suffixes.push(SuffixRef { string, len });
            }
        }
        for &a in &suffixes {
            prop_assert_eq!(compare_p(&collection, a, a, p), std::cmp::Ordering::Equal);
            for &b in &suffixes {
                let ab = compare_p(&collection, a, b, p);
                let ba = compare_p(&collection, b, a, p);
                prop_assert_eq!(ab, ba.reverse());
                if a != b {
                    // Distinct suffixes never tie: length and string index
                    // break every prefix tie.
                    prop_assert_ne!(ab, std::cmp::Ordering::Equal);
                }
            }
        }
    }

    #[test]
    fn reference_lcp_matches_pairwise_recomputation(
        k in 1usize..6,
        m in 1usize..6,
        seed in any::<u64>(),
    ) {
        use rand::prelude::*;
        let mut rng = StdRng::seed_from_u64(seed);
        let rows: Vec<Vec<u8>> = (0..m)
            .map(|_| (0..k).map(|_| rng.random_range(1..=2)).collect())
            .collect();
        let ids = (1..=m).map(|i| format!("line {i}")).collect();
        let collection =
            bwtlcp::ingest::StringCollection::from_rows(rows, ids).unwrap();
        let output = oracle_bwt_lcp(&collection);
        // Symmetry of the pairwise LCP plus the output's own cap law.
        for len_a in 0..=k {
            for len_b in 0..=k {
                let a = SuffixRef { string: 0, len: len_a };
                let b = SuffixRef { string: m - 1, len: len_b };
                prop_assert_eq!(
                    suffix_lcp(&collection, a, b),
                    suffix_lcp(&collection, b, a),
                );
            }
        }
        prop_assert_eq!(output.lcp[0], -1);
        for &v in &output.lcp[1..] {
            prop_assert!((0..=k as i64).contains(&v));
        }
    }
}
