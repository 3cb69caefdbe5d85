pub mod bench;
pub mod cancel;
pub mod dc;
pub mod discovery;
pub mod index;
pub mod oracle;
pub mod relation;
pub mod synth;
pub mod verify;
