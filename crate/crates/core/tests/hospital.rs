mod common;

use std::time::{Duration, Instant};

use ca2om_core::carm::{Cardinality, Max};
use ca2om_core::dm::StateKind;
use ca2om_core::emit::{render_model_json, render_std_dot};
use ca2om_core::om::model::{ArgKind, AttrType, Class, DataType, ObjectModel, Origin, Relationship};
use ca2om_core::pipeline::{self, Options};

/// (name, id, type, data type, size, requested, null allowed)
type AttrRow<'a> = (&'a str, bool, AttrType, DataType, Option<u32>, bool, bool);

fn attr_rows(class: &Class) -> Vec<AttrRow<'_>> {
    class
        .attributes
        .iter()
        .map(|a| (a.name.as_str(), a.id, a.attr_type, a.data_type, a.size, a.requested, a.null_allowed))
        .collect()
}

fn relationship<'a>(om: &'a ObjectModel, a: &str, b: &str) -> &'a Relationship {
    om.relationships
        .iter()
        .find(|r| r.class_a == a && r.class_b == b)
        .unwrap_or_else(|| panic!("no relationship {a} -- {b}"))
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(common::golden_path(name)).unwrap()
}

#[test]
fn model_json_matches_the_golden_file() {
    let out = common::derive_hospital();
    assert_eq!(render_model_json(&out.object_model), golden("model.json"));
}

#[test]
fn medical_treatment_attributes() {
    let out = common::derive_hospital();
    let class = out.object_model.class("MEDICAL_TREATMENT").unwrap();
    use AttrType::*;
    use DataType as D;
    let rows = attr_rows(class);
    assert_eq!(
        rows[..4],
        [
            ("treatment_number", true, Constant, D::Autonumeric, None, true, false),
            ("initial_date", false, Variable, D::Date, None, true, false),
            ("final_date", false, Variable, D::Date, None, true, false),
            ("comments", false, Variable, D::String, Some(200), true, true),
        ]
    );
    // added by the extension in TREAT 2
    assert_eq!(rows[4], ("delivery_date", false, Variable, D::Date, None, false, true));
    assert_eq!(rows.len(), 5);
}

#[test]
fn creation_service_arguments() {
    let out = common::derive_hospital();
    let class = out.object_model.class("MEDICAL_TREATMENT").unwrap();
    let svc = class.service("new_medical_treatment").unwrap();
    let rows: Vec<(&str, String, Option<u32>, bool)> = svc
        .arguments
        .iter()
        .map(|a| {
            let ty = match a.kind {
                ArgKind::DataValued => a.data_type.unwrap().to_string(),
                ArgKind::ObjectValued => a.class.clone().unwrap(),
            };
            (a.name.as_str(), ty, a.size, a.null_allowed)
        })
        .collect();
    let table = [
        ("p_atrtreatment_number", "Autonumeric".to_string(), None, false),
        ("p_atrinitial_date", "Date".to_string(), None, false),
        ("p_atrfinal_date", "Date".to_string(), None, false),
        ("p_atrcomments", "String".to_string(), Some(200), true),
        ("p_agrPatient", "PATIENT".to_string(), None, false),
    ];
    assert_eq!(rows[..5], table);
    // the second reference field of the form
    assert_eq!(rows[5..], [("p_agrNurse", "NURSE".to_string(), None, false)]);
}

#[test]
fn relationships() {
    let out = common::derive_hospital();
    let om = &out.object_model;

    let nesting = relationship(om, "MEDICAL_TREATMENT", "MEDICATION");
    assert_eq!(nesting.origin, Origin::Nesting);
    assert_eq!(nesting.card_b.max, Max::Many);
    assert_eq!(nesting.card_a, Cardinality::ONE_ONE);

    let patient = relationship(om, "MEDICAL_TREATMENT", "PATIENT");
    assert_eq!(patient.origin, Origin::Reference);
    assert_eq!(patient.card_b, Cardinality::ONE_ONE);

    let dispensary = relationship(om, "MEDICAL_TREATMENT", "DISPENSARY");
    assert_eq!(dispensary.origin, Origin::Extension);
    assert_eq!((dispensary.card_a, dispensary.card_b), (Cardinality::ZERO_MANY, Cardinality::ZERO_ONE));

    for class in ["MEDICAL_TREATMENT", "DISPENSARY"] {
        let c = om.class(class).unwrap();
        for svc in ["ins_dispensary", "del_dispensary"] {
            assert!(c.service(svc).is_some(), "{class} lacks {svc}");
        }
    }
}

#[test]
fn event_services_and_transaction() {
    let out = common::derive_hospital();
    let om = &out.object_model;
    let class = om.class("MEDICAL_TREATMENT").unwrap();
    let names: Vec<&str> = class.services.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "new_medical_treatment",
            "Treat1_prescribe_medication",
            "set_delivery_date",
            "ins_dispensary",
            "del_dispensary"
        ]
    );
    let eoe = class.service("Treat1_prescribe_medication").unwrap();
    assert_eq!(eoe.arguments.len(), 1);
    assert_eq!(eoe.arguments[0].name, "p_thisMedicalTreatment");

    let set = class.service("set_delivery_date").unwrap();
    let args: Vec<&str> = set.arguments.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(args, ["p_thisMedicalTreatment", "p_atrdelivery_date"]);

    assert_eq!(om.transactions.len(), 1);
    let tx = &om.transactions[0];
    assert_eq!(tx.name, "Treat2_assign_dispensary");
    assert_eq!(tx.owner_class, "MEDICAL_TREATMENT");
    assert_eq!(tx.components, ["set_delivery_date", "ins_dispensary"]);
}

#[test]
fn medical_treatment_state_diagram() {
    let out = common::derive_hospital();
    let std = out.diagrams.iter().find(|d| d.class_name == "MEDICAL_TREATMENT").unwrap();
    let states: Vec<(&str, StateKind)> = std.states.iter().map(|s| (s.name.as_str(), s.kind)).collect();
    assert_eq!(
        states,
        [
            ("Pre_creation", StateKind::PreCreation),
            ("TREAT 1ed", StateKind::Intermediate),
            ("TREAT 2ed", StateKind::Intermediate)
        ]
    );
    let transitions: Vec<(&str, &str, &str)> = std
        .transitions
        .iter()
        .map(|t| (t.from.as_str(), t.to.as_str(), t.service.as_str()))
        .collect();
    assert_eq!(
        transitions,
        [
            ("Pre_creation", "TREAT 1ed", "Treat1_prescribe_medication"),
            ("TREAT 1ed", "TREAT 2ed", "Treat2_assign_dispensary")
        ]
    );
    assert_eq!(render_std_dot(std), golden("std_MEDICAL_TREATMENT.dot"));
}

#[test]
fn only_expected_warnings() {
    let out = common::derive_hospital();
    let codes: Vec<&str> = out.diagnostics.iter().map(|d| d.code.as_str()).collect();
    assert_eq!(codes, ["OM8", "OM23"]);
    assert!(out.diagnostics.iter().all(|d| !d.is_error()));
}

#[test]
fn trace_links_fields_to_attributes() {
    let out = common::derive_hospital();
    let rows = out.trace.rows();
    for row in [
        "OM6\tTREAT 1/MEDICAL TREATMENT/Treatment number\tMEDICAL_TREATMENT.treatment_number",
        "OM24\tTREAT 2/DISPENSARY/Delivery date\tMEDICAL_TREATMENT.delivery_date",
        "OM4\tTREAT 1\tMEDICAL_TREATMENT",
        "OM23\tTREAT 2\tMEDICAL_TREATMENT",
    ] {
        assert!(rows.iter().any(|r| r == row), "missing trace row {row:?}");
    }
    assert!(out.trace.untraced(&out.object_model).is_empty());
}

#[test]
fn strict_mode_rejects_the_synthesized_identifier() {
    let model = common::hospital();
    let err = pipeline::derive(&model, &Options { strict: true, ..Options::default() }).unwrap_err();
    assert!(err.iter().any(|d| d.is_error() && d.code == "OM8"), "{err:?}");
}

#[test]
fn derives_in_under_a_second() {
    let carm = common::read_fixture("hospital.carm");
    let ann = common::read_fixture("hospital.ann");
    let start = Instant::now();
    let model = pipeline::load(&[("hospital.carm", &carm)], Some(("hospital.ann", &ann))).unwrap();
    let out = pipeline::derive(&model, &Options::default()).unwrap();
    let _ = render_model_json(&out.object_model);
    assert!(start.elapsed() < Duration::from_secs(1), "took {:?}", start.elapsed());
}
