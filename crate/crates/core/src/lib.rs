pub mod qlattice;
pub mod modfun;
pub mod wronskian;
pub mod bigreal;
pub mod precision;
pub mod registry;
