//! Bundled rewriting certificates and the extra relator they rely on.
//!
//! The headline certificate reduces a ten-letter relator to the empty word
//! in five insertions. Its start word is the image of a generator under a
//! mutually inverse substitution pair, multiplied by the generator's
//! inverse. Four insertions use built-in relator instances; the fifth uses
//! `exiarel1`, a thirty-letter consequence of the built-in families whose
//! template ships in `data/extras.json`. The unit tests re-derive both the
//! template and the certificate from scratch and compare them against the
//! bundled files, so the data can never drift from the engine.

use crate::alphabet::{AutGen, IAGen, IAWord};
use crate::relations::Registry;
use crate::rewrite::Certificate;
use crate::theta::ThetaTable;

/// JSON template definitions for relators beyond the built-in families.
pub const EXTRAS_JSON: &str = include_str!("../data/extras.json");

/// Bundled certificates as (name, JSON) pairs. The first strict-replays
/// a five-step reduction, the second exercises cyclic rotation, and the
/// third inserts a product of two relators that only lax replay accepts.
pub const BUNDLED: &[(&str, &str)] = &[
    (
        "worked-reduction",
        include_str!("../data/certs/worked-reduction.json"),
    ),
    ("rotation", include_str!("../data/certs/rotation.json")),
    (
        "composite-insert",
        include_str!("../data/certs/composite-insert.json"),
    ),
];

/// Registry with every bundled extra template loaded and probed.
pub fn standard_registry() -> Registry {
    let mut reg = Registry::new();
    reg.load_extras_json(EXTRAS_JSON)
        .expect("bundled extras must register");
    reg
}

/// Parses one bundled certificate by name.
pub fn bundled_certificate(name: &str) -> Option<Certificate> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| Certificate::from_json(json).expect("bundled certificate must parse"))
}

/// All bundled certificates in declaration order.
pub fn bundled_certificates() -> Vec<(&'static str, Certificate)> {
    BUNDLED
        .iter()
        .map(|(name, json)| {
            (
                *name,
                Certificate::from_json(json).expect("bundled certificate must parse"),
            )
        })
        .collect()
}

/// Start word of the worked reduction, rebuilt from the substitution
/// table: apply the rules for M(1,2) and then M(1,-2) to Mc[2,1,5] and
/// multiply by Mc[2,5,1].
pub fn worked_start() -> IAWord {
    let theta = ThetaTable::standard();
    let t = IAWord::generator(IAGen::commtv(2, 1, 5));
    let image = theta.apply_gen(&AutGen::transv(1, -2), &theta.apply_gen(&AutGen::transv(1, 2), &t));
    image.mul(&IAWord::generator(IAGen::commtv(2, 5, 1)))
}
