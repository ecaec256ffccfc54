pub mod bitset;
pub mod brooks;
pub mod exact;
pub mod gen;
pub mod graph;
pub mod io;
pub mod mis;
pub mod packing;
pub mod pipelines;
pub mod verify;
