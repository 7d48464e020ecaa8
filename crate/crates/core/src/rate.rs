//! Rate units.
//!
//! Discrete sources are coded in bits per source symbol, continuous ones in
//! bits per second. The two are separate types; converting between them
//! requires an explicit symbol rate.

use std::fmt;

/// Code rate in bits per source symbol.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct BitsPerSymbol(pub f64);

/// Code rate in bits per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct BitsPerSecond(pub f64);

impl BitsPerSymbol {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Bits per second when symbols arrive at `symbols_per_second`.
    pub fn at_symbol_rate(self, symbols_per_second: f64) -> BitsPerSecond {
        BitsPerSecond(self.0 * symbols_per_second)
    }
}

impl BitsPerSecond {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Bits per symbol when symbols arrive at `symbols_per_second`.
    pub fn per_symbol(self, symbols_per_second: f64) -> BitsPerSymbol {
        BitsPerSymbol(self.0 / symbols_per_second)
    }
}

impl fmt::Display for BitsPerSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits/symbol", self.0)
    }
}

impl fmt::Display for BitsPerSecond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits/s", self.0)
    }
}
