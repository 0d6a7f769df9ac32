pub mod classify;
pub mod cluster;
pub mod fit;
pub mod prep;
pub mod synth;
pub mod topics;
