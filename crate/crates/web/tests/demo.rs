use normdebt_web::{check_fd, classify_csv, planted_csv, prioritize};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn classify_reports_level_keys_and_risk() {
    let v = parse(&classify_csv("A,B\n1,x\n1,y\n2,x\n", 1.0, 3).unwrap());
    assert_eq!(v["keys"], serde_json::json!([["A", "B"]]));
    assert_eq!(v["rdi"].as_f64().unwrap() * 3.0, 1.0);
    assert_eq!(v["rows"], 3);
}

#[test]
fn planted_tables_classify_to_their_level() {
    for (slug, level) in [("partial-fd", "1NF"), ("transitive-fd", "2NF"), ("non-fd-mvd", "BCNF"), ("clean", "4NF")] {
        let csv = planted_csv(slug, 11).unwrap();
        assert_eq!(parse(&classify_csv(&csv, 1.0, 3).unwrap())["level"], level, "{slug}");
    }
    assert!(planted_csv("nonsense", 1).is_err());
}

#[test]
fn fd_check_reports_witness() {
    let v = parse(&check_fd("A,B\n1,x\n1,y\n2,z\n", "A", "B", 1.0).unwrap());
    assert_eq!(v["holds"], false);
    assert_eq!(v["confidence"], 0.5);
    assert_eq!(v["witness"], serde_json::json!([0, 1]));
    assert!(check_fd("A,B\n1,x\n", "A", "C", 1.0).unwrap_err().contains('C'));
}

#[test]
fn prioritize_builds_matrix_and_option() {
    let rows = r#"[
        {"table": "Cheap", "rdi": 0.9, "weight": 30, "size_mb": 4.0, "tasks": 2},
        {"table": "Costly", "rdi": 0.1, "weight": 5, "size_mb": 0.1, "tasks": 40}
    ]"#;
    let v = parse(&prioritize(rows, 51.38, 7.5, "aggregate").unwrap());
    assert_eq!(v["rate"], "6.42");
    assert_eq!(v["option"]["tables"], serde_json::json!(["Cheap"]));
    assert_eq!(v["option"]["total"], "12.84");
    assert_eq!(v["conventional"], "269.64");
    assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
    assert!(prioritize(rows, 51.38, 7.5, "nope").is_err());
    assert!(prioritize(rows, -1.0, 7.5, "tc").is_err());
}
