#![allow(dead_code)]

pub mod generate;
pub mod oracles;

use std::path::PathBuf;

use ca2om_core::carm::RequirementsModel;
use ca2om_core::pipeline::{self, Options, Output};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("reading fixture {name}: {e}"))
}

pub fn load_fixture(name: &str) -> RequirementsModel {
    let text = read_fixture(name);
    pipeline::load(&[(name, &text)], None).unwrap_or_else(|d| panic!("{name} does not parse: {d:?}"))
}

pub fn hospital() -> RequirementsModel {
    let carm = read_fixture("hospital.carm");
    let ann = read_fixture("hospital.ann");
    pipeline::load(&[("hospital.carm", &carm)], Some(("hospital.ann", &ann))).expect("hospital fixture loads")
}

pub fn derive_hospital() -> Output {
    pipeline::derive(&hospital(), &Options::default()).expect("hospital fixture derives")
}
