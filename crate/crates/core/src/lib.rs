pub mod dynamics;
pub mod field;
pub mod geometry;
pub mod model;
pub mod estimators;
pub mod cli;
