//! The bundled requirements models.

use thiserror::Error;

use crate::model::RequirementsModel;
use crate::parser::{parse_model, Diagnostic, SourceFile};
use crate::pipeline::{load_model, LoadOptions, LoadedModel};

pub struct Fixture {
    pub name: &'static str,
    pub file: &'static str,
    pub source: &'static str,
    /// For the faulty variants, the fixture they were derived from.
    pub base: Option<&'static str>,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture { name: "atm", file: "atm.rqm", source: include_str!("../../../fixtures/atm.rqm"), base: None },
    Fixture {
        name: "miniCocome",
        file: "mini_cocome.rqm",
        source: include_str!("../../../fixtures/mini_cocome.rqm"),
        base: None,
    },
    Fixture {
        name: "libmsSubset",
        file: "libms_subset.rqm",
        source: include_str!("../../../fixtures/libms_subset.rqm"),
        base: None,
    },
    Fixture {
        name: "loanpsSubset",
        file: "loanps_subset.rqm",
        source: include_str!("../../../fixtures/loanps_subset.rqm"),
        base: None,
    },
    Fixture {
        name: "cashPaymentMissingGuard",
        file: "cash_payment_missing_guard.rqm",
        source: include_str!("../../../fixtures/cash_payment_missing_guard.rqm"),
        base: Some("miniCocome"),
    },
    Fixture {
        name: "withdrawWrongGuard",
        file: "withdraw_wrong_guard.rqm",
        source: include_str!("../../../fixtures/withdraw_wrong_guard.rqm"),
        base: Some("atm"),
    },
    Fixture {
        name: "endSaleSignTypo",
        file: "endsale_sign_typo.rqm",
        source: include_str!("../../../fixtures/endsale_sign_typo.rqm"),
        base: Some("miniCocome"),
    },
];

/// The four case-study models, without the faulty variants.
pub const CASE_STUDIES: &[&str] = &["atm", "miniCocome", "libmsSubset", "loanpsSubset"];

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    Unknown(String),
    #[error("fixture `{name}` does not load: {}", .diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid { name: String, diagnostics: Vec<Diagnostic> },
}

pub fn fixture(name: &str) -> Result<&'static Fixture, FixtureError> {
    FIXTURES.iter().find(|f| f.name == name).ok_or_else(|| FixtureError::Unknown(name.to_string()))
}

fn source_of(f: &Fixture) -> SourceFile {
    SourceFile::new(format!("fixtures/{}", f.file), f.source)
}

pub fn load_fixture(name: &str) -> Result<RequirementsModel, FixtureError> {
    let f = fixture(name)?;
    parse_model(&[source_of(f)]).map_err(|diagnostics| FixtureError::Invalid { name: name.to_string(), diagnostics })
}

/// Parses, resolves and compiles a fixture.
pub fn load_fixture_compiled(name: &str, opts: LoadOptions) -> Result<LoadedModel, FixtureError> {
    let f = fixture(name)?;
    load_model(&[source_of(f)], opts).map_err(|diagnostics| FixtureError::Invalid { name: name.to_string(), diagnostics })
}
