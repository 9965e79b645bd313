//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p occg-cli --test acceptance -- --nocapture`.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use occg_core::testing::{arb_graph, arb_log, arb_rich_graph, arb_rich_log};
use occg_core::{dsl, export_json, import_json, load_log, monitor_all, CsvSpec};
use proptest::test_runner::{Config, TestCaseError, TestRunner};

type Criterion = (&'static str, fn() -> String);

const AC1_TOLERANCE: f64 = 1e-9;
const AC1_BUDGET: Duration = Duration::from_secs(1);
const AC2_CASES: u32 = 1000;
const AC2_BUDGET: Duration = Duration::from_secs(30);
const AC3_CASES: u32 = 1000;
const AC3_MAX_EVENTS: usize = 20;
const AC3_MAX_OBJECTS: usize = 8;
const AC3_BUDGET: Duration = Duration::from_secs(30);
const AC4_CASES: u32 = 200;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn ac1() -> String {
    assert_eq!(support::worked::TOLERANCE, AC1_TOLERANCE);
    let start = Instant::now();
    let bad = support::worked::mismatches();
    let took = start.elapsed();
    assert!(bad.is_empty(), "{bad:?}");
    assert!(took < AC1_BUDGET, "took {took:?}");
    format!("worked values and the act/type/trace sets match within {AC1_TOLERANCE:e} in {took:?}")
}

fn ac2() -> String {
    let start = Instant::now();
    runner(AC2_CASES)
        .run(&(arb_log(16, 6), arb_graph()), |(log, cg)| {
            support::checks::properties(&log, &cg)
        })
        .unwrap();
    let took = start.elapsed();
    assert!(took < AC2_BUDGET, "took {took:?}");
    format!("{AC2_CASES} randomized cases in {took:?}")
}

fn ac3() -> String {
    let start = Instant::now();
    runner(AC3_CASES)
        .run(
            &(arb_log(AC3_MAX_EVENTS, AC3_MAX_OBJECTS), arb_graph()),
            |(log, cg)| {
                assert!(
                    log.events().len() <= AC3_MAX_EVENTS && log.objects().len() <= AC3_MAX_OBJECTS
                );
                support::checks::oracle_agrees(&log, &cg)
            },
        )
        .unwrap();
    let took = start.elapsed();
    assert!(took < AC3_BUDGET, "took {took:?}");
    format!("{AC3_CASES} logs (<= {AC3_MAX_EVENTS} events, <= {AC3_MAX_OBJECTS} objects) match brute force in {took:?}")
}

fn ac4() -> String {
    runner(AC4_CASES)
        .run(&arb_rich_log(10, 6), |log| {
            let back =
                import_json(&export_json(&log)).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let attrs_equal = log
                .events()
                .iter()
                .zip(back.events())
                .all(|(a, b)| a.attrs == b.attrs)
                && log
                    .objects()
                    .iter()
                    .zip(back.objects())
                    .all(|(a, b)| a.attrs == b.attrs);
            if back != log || !attrs_equal || !log.relation().eq(back.relation()) {
                return Err(TestCaseError::fail("JSON round trip changed the log"));
            }
            Ok(())
        })
        .unwrap();
    runner(AC4_CASES)
        .run(&arb_rich_graph(), |cg| {
            let text = dsl::serialize(&cg);
            let parsed =
                dsl::parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            if parsed != vec![cg] {
                return Err(TestCaseError::fail(format!(
                    "DSL round trip changed\n{text}"
                )));
            }
            Ok(())
        })
        .unwrap();
    format!("{AC4_CASES} JSON logs and {AC4_CASES} DSL graphs round-trip")
}

fn ac5() -> String {
    let dir = fixtures();
    let spec = |name: &str| -> CsvSpec {
        serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
    };
    let cases = [
        (
            "production.occg",
            "production.csvspec.json",
            "production_2022_01.csv",
            [false, true, true, false],
        ),
        (
            "production.occg",
            "production.csvspec.json",
            "production_2022_02.csv",
            [true, true, true, true],
        ),
        (
            "production.occg",
            "production.csvspec.json",
            "production_2022_03.csv",
            [true, true, true, false],
        ),
        (
            "p2p.occg",
            "p2p.csvspec.json",
            "p2p_2021_08.csv",
            [true, true, false, false],
        ),
        (
            "p2p.occg",
            "p2p.csvspec.json",
            "p2p_2021_11.csv",
            [true, true, false, false],
        ),
        (
            "p2p.occg",
            "p2p.csvspec.json",
            "p2p_2022_02.csv",
            [false, false, true, true],
        ),
    ];
    let mut graphs_seen = 0;
    for (occg, spec_file, log_file, expected) in cases {
        let graphs = dsl::parse(&std::fs::read_to_string(dir.join(occg)).unwrap()).unwrap();
        assert_eq!(graphs.len(), 4, "{occg}");
        assert!(graphs.iter().all(|g| g.validate().is_empty()));
        graphs_seen += graphs.len();
        let log = load_log(&dir.join(log_file), Some(&spec(spec_file))).unwrap();
        let verdicts = monitor_all(&log, &graphs).unwrap();
        let flags: Vec<bool> = verdicts.iter().map(|v| v.violated).collect();
        assert_eq!(flags, expected, "{log_file}");
        assert!(
            verdicts.iter().all(|v| v.warnings.is_empty()),
            "{log_file}: unexpected warnings"
        );
    }
    format!(
        "8 graphs parse and validate; {} window flags match ({graphs_seen} verdicts)",
        cases.len()
    )
}

fn ac6() -> String {
    let dir = fixtures();
    let bin = env!("CARGO_BIN_EXE_occg");
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.schema.json")).unwrap())
            .unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let monitor = |log: &str, occg: &str, spec: &str, extra: &[&str]| {
        Command::new(bin)
            .arg("monitor")
            .arg(dir.join(log))
            .arg(dir.join(occg))
            .arg("--csv-spec")
            .arg(dir.join(spec))
            .args(extra)
            .output()
            .unwrap()
    };
    for (log, occg, spec, golden) in [
        (
            "production_2022_01.csv",
            "production.occg",
            "production.csvspec.json",
            "golden/production_2022_01.json",
        ),
        (
            "p2p_2021_11.csv",
            "p2p.occg",
            "p2p.csvspec.json",
            "golden/p2p_2021_11.json",
        ),
    ] {
        let out = monitor(log, occg, spec, &["--format", "json"]);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{log}: {errors:?}");
        assert_eq!(
            text,
            std::fs::read_to_string(dir.join(golden)).unwrap(),
            "{golden}"
        );
    }
    let vacuous = Command::new(bin)
        .args(["monitor", "--format", "json"])
        .arg(dir.join("table1.jsonocel"))
        .arg(dir.join("p2p.occg"))
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&vacuous.stdout).unwrap();
    assert!(validator.is_valid(&doc));

    let prod = (
        "production_2022_01.csv",
        "production.occg",
        "production.csvspec.json",
    );
    assert_eq!(monitor(prod.0, prod.1, prod.2, &[]).status.code(), Some(0));
    assert_eq!(
        monitor(prod.0, prod.1, prod.2, &["--fail-on-violation"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        monitor(
            prod.0,
            prod.1,
            prod.2,
            &["--fail-on-violation", "--format", "json"]
        )
        .status
        .code(),
        Some(3)
    );
    assert_eq!(
        monitor(
            prod.0,
            prod.1,
            prod.2,
            &["--from", "2022-02-01", "--to", "2022-01-01"]
        )
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        monitor("missing.csv", prod.1, prod.2, &[]).status.code(),
        Some(2)
    );
    "JSON reports match the schema and goldens; exit codes 0/1/2/3 hold".to_string()
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 6] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
    ];
    let mut failed = Vec::new();
    for (id, check) in criteria {
        match catch_unwind(AssertUnwindSafe(check)) {
            Ok(detail) => println!("[PASS] {id}: {detail}"),
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("[FAIL] {id}: {msg}");
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
