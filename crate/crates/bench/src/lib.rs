//! Inputs shared by the benchmarks.

use gf2class_core::families::{make_family, Family, FamilySpec};

pub fn family(spec: &str) -> Family {
    make_family(spec.parse::<FamilySpec>().expect("valid family")).expect("constructible family")
}
