pub mod acceptance;
pub mod axioms;
pub mod cli;
pub mod corpus;
pub mod critical;
pub mod derivation;
pub mod error;
pub mod family;
pub mod figures;
pub mod field;
pub mod fixtures;
pub mod flow;
pub mod integrate;
pub mod io;
pub mod manifest;
pub mod oracles;
pub mod radial;
pub mod selector;
