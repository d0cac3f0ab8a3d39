use lenkit::data::{booleanize, load_csv, read_csv, save_csv, split, DataError, Dataset};
use lenkit::nn::Matrix;
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = Dataset> {
    (1usize..6, 1usize..20, 2usize..4).prop_flat_map(|(k, n, c)| {
        (
            prop::collection::vec(prop::collection::vec(0.0f64..=1.0, k), n),
            prop::collection::vec(0..c, n),
            Just(c),
        )
            .prop_map(|(rows, y, c)| Dataset::from_rows(&rows, y, c).unwrap())
    })
}

proptest! {
    #[test]
    fn csv_round_trip(data in dataset()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        save_csv(&data, &path, "label").unwrap();
        let back = load_csv(&path, "label").unwrap();
        prop_assert_eq!(&back.concept_names, &data.concept_names);
        prop_assert_eq!(&back.y.iter().map(|&c| &back.class_names[c]).collect::<Vec<_>>(),
                        &data.y.iter().map(|&c| &data.class_names[c]).collect::<Vec<_>>());
        for (a, b) in back.x.as_slice().iter().zip(data.x.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn split_partitions_rows(n in 1usize..200, fv in 0.0f64..0.4, fs in 0.0f64..0.4, seed in any::<u64>()) {
        let ft = 1.0 - fv - fs;
        match split(n, (ft, fv, fs), seed) {
            Ok(s) => {
                let mut all: Vec<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
                prop_assert_eq!(s.validation.len(), (n as f64 * fv).round() as usize);
                prop_assert_eq!(s.test.len(), (n as f64 * fs).round() as usize);
                prop_assert_eq!(split(n, (ft, fv, fs), seed).unwrap(), s);
            }
            Err(DataError::Split(_)) => {
                let sizes = [(n as f64 * fv).round(), (n as f64 * fs).round()];
                let starved = (fv > 0.0 && sizes[0] == 0.0) || (fs > 0.0 && sizes[1] == 0.0)
                    || sizes[0] + sizes[1] >= n as f64;
                prop_assert!(starved);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn booleanize_matches_elementwise_and_is_monotone(
        rows in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 3), 1..10),
        t1 in 0.0f64..=1.0,
        t2 in 0.0f64..=1.0,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let x = Matrix::from_vec(rows.len(), 3, rows.concat()).unwrap();
        let a = booleanize(&x, lo).unwrap();
        let b = booleanize(&x, hi).unwrap();
        for (r, row) in rows.iter().enumerate() {
            for c in 0..3 {
                prop_assert_eq!(a[r][c], row[c] > lo);
                prop_assert!(!b[r][c] || a[r][c]);
            }
        }
    }
}

#[test]
fn splits_vary_with_seed() {
    let base = split(10, (0.6, 0.2, 0.2), 0).unwrap();
    let distinct = (1..100).filter(|&s| split(10, (0.6, 0.2, 0.2), s).unwrap() != base).count();
    assert!(distinct >= 95, "only {distinct} of 99 seeds differ");
}

#[test]
fn xor_fixture_loads() {
    let d = load_csv(concat!(env!("CARGO_MANIFEST_DIR"), "/data/xor.csv"), "label").unwrap();
    assert_eq!((d.len(), d.n_concepts(), d.n_classes()), (4, 2, 2));
    assert_eq!(d.y, vec![0, 1, 1, 0]);
}

#[test]
fn csv_errors_name_the_row() {
    let err = |text: &str| read_csv(text.as_bytes(), "label").unwrap_err();
    assert!(matches!(
        err("a,b,label\n0,1,0\n0,1.5,1\n"),
        DataError::OutOfRange { row: 2, ref column, .. } if column == "b"
    ));
    assert!(matches!(err("a,b,label\n0,x,0\n"), DataError::NotNumeric { row: 1, .. }));
    assert!(matches!(err("a,b,y\n0,1,0\n"), DataError::MissingLabelColumn(_)));
    assert!(matches!(err("a,b,label\n0,1\n"), DataError::Ragged { row: 1, .. } | DataError::Csv(_)));
    assert!(matches!(err("a,b,label\n"), DataError::Empty));
}

#[test]
fn string_labels_become_sorted_classes() {
    let d = read_csv("a,label\n0,cat\n1,dog\n0.5,cat\n".as_bytes(), "label").unwrap();
    assert_eq!(d.class_names, vec!["cat", "dog"]);
    assert_eq!(d.y, vec![0, 1, 0]);
    let d = read_csv("a,label\n0,10\n1,9\n".as_bytes(), "label").unwrap();
    assert_eq!(d.class_names, vec!["9", "10"]);
}
