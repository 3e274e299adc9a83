#![forbid(unsafe_code)]

pub mod codec;
pub mod commit;
pub mod identity;
pub mod ordering;
pub mod ratio;
pub mod signatures;
pub mod vdf;
