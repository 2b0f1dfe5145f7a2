//! CLI plumbing (placeholder while the core is built).
pub mod placeholder {}
