use crate::error::{Error, Result};

/// Resource caps. Exceeding one is an error, never a silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest ambient dimension accepted by the iterative algorithms and
    /// the exhaustive orbit-type checks.
    pub max_dim: usize,
    /// Largest character group order accepted on input.
    pub max_group_order: u64,
    /// Largest dimension for Hilbert basis enumeration.
    pub max_hilbert_dim: usize,
    /// Largest number of lattice points visited by a Hilbert basis
    /// enumeration or a matrix group closure.
    pub max_enumeration: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_dim: 16,
            max_group_order: 10_000,
            max_hilbert_dim: 4,
            max_enumeration: 20_000_000,
        }
    }
}

impl Caps {
    /// Parses overrides of the form `max_dim=8,max_group_order=500`.
    /// Unknown keys and non-positive values are rejected.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::input(format!("malformed cap override `{part}`")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("cap `{key}` needs a positive integer")))?;
            if value == 0 {
                return Err(Error::input(format!("cap `{key}` must be positive")));
            }
            match key.trim() {
                "max_dim" => self.max_dim = value as usize,
                "max_group_order" => self.max_group_order = value,
                "max_hilbert_dim" => self.max_hilbert_dim = value as usize,
                "max_enumeration" => self.max_enumeration = value,
                other => return Err(Error::input(format!("unknown cap `{other}`"))),
            }
        }
        Ok(self)
    }
}
