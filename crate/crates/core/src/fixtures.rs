//! The worked examples shipped in `fixtures/`, embedded at build time.

use crate::error::ParseError;
use crate::kripke::{KripkeError, TransitionSystem};
use crate::lattice::{parse_lat, LatFile};

pub const TWO_STATE: &str = include_str!("../../../fixtures/two_state.ts");
pub const TRAFFIC_LIGHT: &str = include_str!("../../../fixtures/traffic_light.ts");
pub const TRAFFIC_LIGHT_ABSTRACT: &str =
    include_str!("../../../fixtures/traffic_light_abstract.ts");
pub const EVEN_ODD: &str = include_str!("../../../fixtures/even_odd.ts");
pub const ONE_WAY: &str = include_str!("../../../fixtures/one_way.ts");
pub const SIGN: &str = include_str!("../../../fixtures/sign.lat");
pub const SIGN_PLUS: &str = include_str!("../../../fixtures/sign_plus.lat");
pub const FIRST_FORMULA: &str = include_str!("../../../fixtures/formulas/first.ltl");
pub const NEXT_PREV_FORMULA: &str = include_str!("../../../fixtures/formulas/next_prev.ltl");
pub const DET_FORMULA: &str = include_str!("../../../fixtures/formulas/det.ltl");

/// `(file name, contents)` of every transition system fixture.
pub const SYSTEMS: [(&str, &str); 5] = [
    ("two_state.ts", TWO_STATE),
    ("traffic_light.ts", TRAFFIC_LIGHT),
    ("traffic_light_abstract.ts", TRAFFIC_LIGHT_ABSTRACT),
    ("even_odd.ts", EVEN_ODD),
    ("one_way.ts", ONE_WAY),
];

pub fn system(text: &str) -> Result<TransitionSystem, KripkeError> {
    TransitionSystem::parse(text)
}

pub fn lattice(text: &str) -> Result<LatFile, ParseError> {
    parse_lat(text)
}
