use inquest::fixture::{generate, PROTHOMALO, PROTHOMALO_COLUMNS};
use inquest::ml::{execute_mql, kmeans, Encoding, ExecContext, Execution, FeatureMatrix, Provenance};
use inquest::mql::parse_statement;
use inquest::store::{run_aggregation, Aggregate, AggregationPlan, GroupKey, Registry, Value};
use inquest_testkit::adjusted_rand_index;
use inquest_testkit::data::blobs;
use inquest_testkit::tally::Csv;

fn registry_for(rows: usize, seed: u64) -> (tempfile::TempDir, Registry, inquest::fixture::GroundTruth, Csv) {
    let dir = tempfile::tempdir().unwrap();
    let fx = generate(rows, seed);
    let paths = fx.write(dir.path()).unwrap();
    let reg = Registry::open(&paths.manifest).unwrap();
    let csv = Csv::parse(&fx.prothomalo_csv);
    (dir, reg, fx.truth, csv)
}

fn counts(table: &inquest::Table, key: &str) -> Vec<(String, u64)> {
    let k = table.column(key).unwrap();
    let c = table.column("count").unwrap();
    k.iter()
        .zip(c)
        .map(|(k, c)| {
            (
                k.to_string(),
                match c {
                    Value::Int(v) => *v as u64,
                    other => panic!("{other:?}"),
                },
            )
        })
        .collect()
}

#[test]
fn monthly_and_district_tallies_match_ground_truth() {
    for rows in [300, 5000] {
        let (_dir, reg, truth, csv) = registry_for(rows, 42);
        let monthly = run_aggregation(
            &AggregationPlan::new(PROTHOMALO)
                .group(GroupKey::Month("last-published-at".into()))
                .aggregate(Aggregate::count_all()),
            &reg,
        )
        .unwrap();
        let got: Vec<(String, u64)> = counts(&monthly, "month");
        let want: Vec<(String, u64)> = truth.monthly.clone().into_iter().collect();
        assert_eq!(got, want, "{rows} rows: monthly");
        assert_eq!(truth.monthly, csv.monthly("last-published-at"));

        let districts = run_aggregation(
            &AggregationPlan::new(PROTHOMALO)
                .group(GroupKey::Column("district-tag".into()))
                .aggregate(Aggregate::count_all())
                .sort_by("count", true),
            &reg,
        )
        .unwrap();
        let got = counts(&districts, "district-tag");
        for (d, n) in &got {
            assert_eq!(truth.districts[d], *n, "{rows} rows: {d}");
        }
        assert_eq!(got.len(), truth.districts.len());
        assert_eq!(got[0].0, truth.top_district);
        assert_eq!(truth.districts, csv.tally("district-tag"));
    }
}

#[test]
fn fixture_has_the_eight_named_columns() {
    let (_dir, reg, _, _) = registry_for(300, 42);
    let t = reg.table(PROTHOMALO).unwrap();
    let names: Vec<&str> = t.column_names().collect();
    assert_eq!(names, PROTHOMALO_COLUMNS);
}

#[test]
fn headline_clusters_recover_planted_topics() {
    for rows in [30, 300] {
        let (_dir, reg, truth, _) = registry_for(rows, 42);
        let stmt =
            parse_statement("GENERATE DISPLAY OF CLUSTER OF 3 ALGORITHM KMeans FEATURES headline FROM ProthomAlo;")
                .unwrap();
        let Execution::Ml(result) = execute_mql(&stmt, &ExecContext::new(&reg)).unwrap() else { panic!() };
        let clustering = result.clustering.expect("clustering");
        let ari = adjusted_rand_index(&clustering.assignments, &truth.topics);
        assert!(ari >= 0.9, "{rows} rows: ARI {ari}");
        assert!(clustering.inertia_non_increasing());
    }
}

#[test]
fn blob_clusters_recover_planted_groups() {
    let planted = blobs(40, 42);
    let prov = vec![
        Provenance { column: "x".into(), encoding: Encoding::Numeric },
        Provenance { column: "y".into(), encoding: Encoding::Numeric },
    ];
    let x = FeatureMatrix::from_rows(planted.rows.clone(), prov).unwrap();
    let c = kmeans(&x, 3, 42).unwrap();
    assert!(adjusted_rand_index(&c.assignments, &planted.labels) >= 0.9);
    assert!(c.inertia_non_increasing());
}
