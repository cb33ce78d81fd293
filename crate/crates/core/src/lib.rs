pub mod dynamics;
pub mod embedding;
pub mod fixtures;
pub mod generate;
pub mod geom;
pub mod graph;
pub mod region;
pub mod scenario;
pub mod strategy;
pub mod verify;
