pub mod automata;
pub mod cli;
pub mod graph;
pub mod linalg;
pub mod lp;
pub mod ltl;
pub mod mdp;
pub mod mec;
pub mod policy;
pub mod product;
pub mod rational;
pub mod simplex;
pub mod verify;
