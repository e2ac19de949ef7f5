pub mod benchmark;
pub mod blocks;
pub mod correspond;
pub mod losses;
pub mod synth;
