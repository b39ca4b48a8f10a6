//! Desk-scale limits on field order.

use crate::error::{config, Result};

pub const MAX_Q_VAR: &str = "PARAFALC_MAX_Q";
pub const EXHAUSTIVE_MAX_Q: u64 = 121;
pub const FOURIER_MAX_Q: u64 = 81;

/// Rough throughput used for the time estimate printed with --allow-large.
const PAIRS_PER_SECOND: f64 = 2e8;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub exhaustive: u64,
    pub fourier: u64,
}

impl Default for Envelope {
    fn default() -> Self {
        Envelope { exhaustive: EXHAUSTIVE_MAX_Q, fourier: FOURIER_MAX_Q }
    }
}

impl Envelope {
    /// Defaults, with both limits replaced by PARAFALC_MAX_Q when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_Q_VAR) {
            Ok(v) => {
                let q = v
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| config(format!("{MAX_Q_VAR}={v:?} is not a non-negative integer")))?;
                Ok(Envelope { exhaustive: q, fourier: q })
            }
            Err(std::env::VarError::NotPresent) => Ok(Envelope::default()),
            Err(e) => Err(config(format!("{MAX_Q_VAR}: {e}"))),
        }
    }

    /// Rejects q above the exhaustive limit unless `allow_large`; `pairs`
    /// feeds the printed estimate.
    pub fn check_exhaustive(&self, q: u64, pairs: f64, allow_large: bool) -> Result<()> {
        Self::check(q, self.exhaustive, "exhaustive", pairs, allow_large)
    }

    pub fn check_fourier(&self, q: u64, pairs: f64, allow_large: bool) -> Result<()> {
        Self::check(q, self.fourier, "Fourier", pairs, allow_large)
    }

    fn check(q: u64, limit: u64, what: &str, pairs: f64, allow_large: bool) -> Result<()> {
        if q <= limit {
            return Ok(());
        }
        if !allow_large {
            return Err(config(format!(
                "q = {q} exceeds the {what} limit {limit}; pass --allow-large or set {MAX_Q_VAR}"
            )));
        }
        eprintln!(
            "note: q = {q} is above the {what} limit {limit}; about {pairs:.3e} pair evaluations, roughly {:.1} s",
            pairs / PAIRS_PER_SECOND
        );
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits() {
        let e = Envelope::default();
        assert!(e.check_exhaustive(121, 0.0, false).is_ok());
        assert!(e.check_exhaustive(125, 0.0, false).is_err());
        assert!(e.check_exhaustive(125, 1e6, true).is_ok());
        assert!(e.check_fourier(81, 0.0, false).is_ok());
        assert!(e.check_fourier(121, 0.0, false).is_err());
    }
}
