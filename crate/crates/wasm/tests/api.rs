use esdlab_wasm::{esd_time_json, negativity_curve_json, sweep_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn curve_shape() {
    let v = parse(&negativity_curve_json("excited-psi-plus", 0.1, 0.1, "none", 0.0, 1.0, 101).unwrap());
    assert_eq!(v["t"].as_array().unwrap().len(), 101);
    let neg = v["negativity"].as_array().unwrap();
    assert!(neg[0].as_f64().unwrap() > 0.0);
    assert_eq!(neg[100].as_f64().unwrap(), 0.0);
    assert!((v["t_esd"].as_f64().unwrap() - 0.4115).abs() < 1e-3);
}

#[test]
fn switched_curve_dies_later() {
    let v = parse(&negativity_curve_json("excited-psi-plus", 0.1, 0.1, "11-44", 0.0, 1.5, 151).unwrap());
    assert!((v["t_esd"].as_f64().unwrap() - 0.9817).abs() < 5e-3);
}

#[test]
fn esd_time_null_for_survivors() {
    let v = parse(&esd_time_json("bell-psi-plus", 0.0, 0.0, "", 0.0).unwrap());
    assert!(v["t_esd"].is_null());
}

#[test]
fn sweep_summary() {
    let v = parse(&sweep_json("excited-psi-plus", 0.1, 0.1, "11-44", 0.41, 0.01).unwrap());
    assert_eq!(v["t_sw"].as_array().unwrap().len(), 42);
    assert!((v["t_end_max"].as_f64().unwrap() - 0.9817).abs() < 5e-3);
}

#[test]
fn bad_input_is_an_error() {
    assert!(esd_time_json("ghz", 0.0, 0.0, "", 0.0).is_err());
    assert!(sweep_json("excited-psi-plus", 0.1, 0.1, "none", 0.4, 0.01).is_err());
    assert!(negativity_curve_json("excited-psi-plus", -1.0, 0.0, "", 0.0, 1.0, 10).is_err());
    assert!(negativity_curve_json("excited-psi-plus", 0.0, 0.0, "", 0.0, 1.0, 1).is_err());
}

#[test]
fn every_demo_preset_sweeps() {
    for preset in ["excited-psi-plus", "werner-singlet(0.5)", "werner-singlet(0.8)", "werner-triplet(0.6)", "bell-psi-plus", "bell-phi-plus"] {
        for swap in ["11-44", "b-only"] {
            let v = parse(&sweep_json(preset, 0.3, 0.0, swap, 1.0, 0.05).unwrap());
            assert_eq!(v["t_end"].as_array().unwrap().len(), 21, "{preset} {swap}");
            negativity_curve_json(preset, 0.3, 0.0, swap, 0.2, 2.0, 401).unwrap();
        }
    }
}
