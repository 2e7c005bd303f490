pub mod protocol;
pub mod sweep;
pub mod table;
pub mod validate;
