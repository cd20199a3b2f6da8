//! Enumeration and state-space caps.
//!
//! Full-partition enumeration is exponential; the caps keep memory
//! predictable. `CFP_MAX_N` raises every cap at once, at the caller's own
//! resource risk.

/// Default cap on N for full partition enumeration (q(128) ≈ 4.35e6).
pub const DEFAULT_ENUMERATION_CAP: usize = 128;

/// Default cap on N for the pair separation chain.
pub const DEFAULT_SEPARATION_CAP: usize = 20;

/// Default cap on N for the pair reunion chain, whose pair-augmented state
/// space grows faster than q(N).
pub const DEFAULT_REUNION_CAP: usize = 14;

fn env_override() -> Option<usize> {
    std::env::var("CFP_MAX_N").ok()?.trim().parse().ok()
}

/// Effective cap for full partition enumeration.
pub fn max_enumeration_n() -> usize {
    env_override().unwrap_or(DEFAULT_ENUMERATION_CAP)
}

/// Effective cap for separation-chain construction.
pub fn max_separation_n() -> usize {
    env_override().unwrap_or(DEFAULT_SEPARATION_CAP)
}

/// Effective cap for reunion-chain construction.
pub fn max_reunion_n() -> usize {
    env_override().unwrap_or(DEFAULT_REUNION_CAP)
}
