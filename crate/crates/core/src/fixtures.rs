//! The shipped deployment example model.

/// Document text of `fixtures/deployment.bdn.json`.
pub const DEPLOYMENT: &str = include_str!("../../../fixtures/deployment.bdn.json");

pub fn deployment() -> crate::model::BdnModel {
    crate::model::parse_model(DEPLOYMENT).expect("the deployment fixture is valid")
}
