//! Lexicon-driven detection of asks and framings in short messages.

pub mod bundled;
pub mod detect;
pub mod lexicon;
pub mod morphvar;
pub mod respond;
pub mod textseg;
pub mod topask;
pub mod pipeline;
pub mod evalkit;
