pub mod code;
pub mod construct;
pub mod gf;
pub mod ledger;
pub mod protocol;
pub mod emulation;
pub mod array;
pub mod service;
