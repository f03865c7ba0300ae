use modebeam::geometry::{AntennaKind, BendAxis, PortId};
use modebeam_cli::{parse_scenario, parse_scenario_str, CliError, Configuration, Scenario, Target};

fn parse(text: &str) -> Result<Scenario, CliError> {
    parse_scenario_str(text, false, &mut |_| {})
}

#[test]
fn minimal_file_fills_defaults() {
    let s = parse(r#"{"antenna": "antenna1", "configuration": "A"}"#).unwrap();
    assert_eq!(s.antenna, AntennaKind::Antenna1);
    assert_eq!(s.bend_radius, None);
    assert_eq!(s.frequency, None);
    assert_eq!(s.allowed_ports.len(), 4);
    let setup = modebeam_cli::runner::Setup::new(&s).unwrap();
    assert_eq!(setup.frequency(), 5.7);
}

#[test]
fn bent_configuration_defaults_radius() {
    let s = parse(r#"{"antenna": "antenna1", "configuration": "B"}"#).unwrap();
    let bend = s.bend().unwrap();
    assert_eq!(bend.radius, 10.0);
    assert_eq!(bend.axis, BendAxis::X);
    let c = parse(r#"{"antenna": "antenna2", "configuration": "C", "bend_radius": 20}"#).unwrap();
    assert_eq!(c.bend().unwrap().axis, BendAxis::Y);
    assert_eq!(c.configuration, Configuration::C);
}

#[test]
fn unknown_port_is_rejected() {
    let e = parse(r#"{"antenna": "antenna2", "configuration": "A", "allowed_ports": ["F9"]}"#).unwrap_err();
    assert!(matches!(e, CliError::Config(_)));
    // F4 exists on antenna1 only
    let e = parse(r#"{"antenna": "antenna2", "configuration": "A", "allowed_ports": ["F4"]}"#).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn flat_configuration_rejects_radius() {
    assert!(parse(r#"{"antenna": "antenna1", "configuration": "A", "bend_radius": 10}"#).is_err());
}

#[test]
fn unknown_keys_warn_or_fail() {
    let text = r#"{"antenna": "antenna1", "configuration": "A", "colour": "red",
                   "steering": [{"plane": "xz", "theta": 20, "extra": 1}]}"#;
    let mut warnings = Vec::new();
    let s = parse_scenario_str(text, false, &mut |w| warnings.push(w)).unwrap();
    assert_eq!(warnings.len(), 2);
    assert_eq!(s.steering.len(), 1);
    assert!(parse_scenario_str(text, true, &mut |_| {}).is_err());
}

#[test]
fn malformed_input_reports_position() {
    let e = parse("{\n  \"antenna\": \"antenna1\",\n  oops\n}").unwrap_err();
    assert!(e.to_string().contains("line 3"), "{e}");
    assert!(parse(r#"{"antenna": "antenna3", "configuration": "A"}"#).is_err());
    assert!(parse(r#"{"antenna": "antenna1", "configuration": "A", "frequency": -1}"#).is_err());
    assert!(parse(r#"{"antenna": "antenna1", "configuration": "A", "frequency": "auto"}"#).is_ok());
}

#[test]
fn shipped_scenarios_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let s = parse_scenario(&path, true, &mut |_| {}).unwrap();
        assert!(!s.steering.is_empty(), "{}", path.display());
        n += 1;
    }
    assert_eq!(n, 6);
    let s = parse(r#"{"antenna": "antenna1", "configuration": "C", "allowed_ports": ["F1", "F3", "F4"],
                      "steering": [{"plane": "yz", "theta": -20}, {"phi": 45}]}"#)
    .unwrap();
    assert!(!s.allowed_ports.contains(&PortId::F2));
    assert_eq!(s.steering[0].label(), "yz_theta-20");
    assert!(matches!(s.steering[1], Target::Azimuth { .. }));
}
