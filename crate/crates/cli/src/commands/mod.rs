pub mod grotzsch;
pub mod phase;
pub mod radial;
pub mod verify;
