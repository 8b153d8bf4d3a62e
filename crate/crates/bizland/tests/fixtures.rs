use std::path::PathBuf;

use bizland::commands;
use bizland::report::StateRecord;
use bizland::{Failure, Loaded};
use bizland_core::network::validate_state;
use bizland_core::pricing::social_cost_total;
use bizland_core::{fixtures, Model};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str) -> Loaded {
    Loaded::from_path(&fixture(name)).unwrap()
}

#[test]
fn shipped_files_match_built_in_fixtures() {
    let pairs: [(&str, Model); 4] = [
        ("s2.toml", fixtures::symmetric()),
        ("t2.toml", fixtures::tiny()),
        ("t2_agglomerating.toml", fixtures::tiny_agglomerating()),
        ("six_node.toml", fixtures::six_node(fixtures::SWEEP_BASE)),
    ];
    for (name, model) in pairs {
        assert_eq!(load(name).model, model, "{name}");
    }
    let sweep = load("six_node.toml").scenario.sweep.unwrap();
    assert_eq!(sweep.count, fixtures::SWEEP_SCENARIOS);
    for k in 1..=sweep.count {
        assert_eq!(sweep.demands(k), fixtures::sweep_demands(k).to_vec());
    }
}

#[test]
fn symmetric_report_splits_evenly() {
    let r = commands::solve(&load("s2.toml")).unwrap();
    for od in &r.state.od {
        assert!((od.demand - 5.0).abs() < 1e-8);
    }
    for d in &r.state.destinations {
        assert!((d.firms - 2.0).abs() < 1e-8);
    }
}

#[test]
fn report_costs_recompute_from_serialized_state() {
    let loaded = load("t2.toml");
    let r = commands::solve(&loaded).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let record: StateRecord = serde_json::from_value(value["state"].clone()).unwrap();
    let state = record.to_state(&loaded.model).unwrap();
    assert!(validate_state(&state, &loaded.model.network, &loaded.model.routes, 1e-9).is_valid());
    let cost = social_cost_total(&loaded.model, &state);
    assert_eq!(value["cost"]["total"].as_f64().unwrap(), cost.total);
    assert_eq!(value["cost"]["travelers"].as_f64().unwrap(), cost.travelers);
}

#[test]
fn network_rows_echo_verbatim() {
    let r = commands::solve(&load("t2.toml")).unwrap();
    assert_eq!(r.network.links[0], "1 2 2 0.1 2");
    assert_eq!(r.network.firms, vec!["5"]);
}

#[test]
fn checks_of_shipped_instances() {
    assert_eq!(commands::check(&load("t2.toml")).uniqueness, "satisfied");
    let bad = commands::check(&load("t2_agglomerating.toml"));
    assert_eq!(bad.uniqueness, "violated");
    assert!(bad.witness.unwrap().value >= 0.0);
}

#[test]
fn oracle_rejects_six_node() {
    let err = commands::oracle(&load("six_node.toml")).unwrap_err();
    assert!(matches!(err, Failure::Guard(_)));
}
