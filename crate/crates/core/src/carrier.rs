use std::fmt;
use std::str::FromStr;

/// Which of the two drive tones a pulse is played at: ω₋ = ω_d − δω or
/// ω₊ = ω_d + δω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Carrier {
    Minus,
    Plus,
}

impl Carrier {
    pub fn symbol(self) -> char {
        match self {
            Carrier::Minus => '-',
            Carrier::Plus => '+',
        }
    }

    pub fn flipped(self) -> Carrier {
        match self {
            Carrier::Minus => Carrier::Plus,
            Carrier::Plus => Carrier::Minus,
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown carrier sign {0:?} (expected \"+\" or \"-\")")]
pub struct ParseCarrierError(pub String);

impl FromStr for Carrier {
    type Err = ParseCarrierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "-" | "\u{2212}" | "minus" => Ok(Carrier::Minus),
            "+" | "plus" => Ok(Carrier::Plus),
            other => Err(ParseCarrierError(other.to_string())),
        }
    }
}
