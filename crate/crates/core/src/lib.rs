//! Social navigation with a spatial-temporal world model, social constraint
//! predicates and a deductive action selector.

pub mod config;
pub mod constraints;
pub mod deduction;
pub mod geometry;
pub mod metrics;
pub mod planner;
pub mod reasoner;
pub mod simulator;
pub mod world_model;

pub use config::ScenarioConfig;
pub use geometry::Vec2;
