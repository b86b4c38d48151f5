use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};

/// Cardinalities that occur at desk scale: finite counts, ℵ₀, 2^ℵ₀ and 2^2^ℵ₀.
///
/// The derived order is the cardinal order. Sums and products involving an
/// infinite value are the maximum, except that anything times zero is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Card {
    Fin(u64),
    Aleph0,
    Continuum,
    PowerContinuum,
}

impl Card {
    pub const ZERO: Card = Card::Fin(0);

    pub fn is_infinite(self) -> bool {
        !matches!(self, Card::Fin(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Card::Fin(n) => Some(n),
            _ => None,
        }
    }

    /// `min(self, n)` as a plain count.
    pub fn truncate(self, n: u64) -> u64 {
        match self {
            Card::Fin(m) => m.min(n),
            _ => n,
        }
    }

    pub fn parse(s: &str) -> Option<Card> {
        match s {
            "omega" | "aleph0" => Some(Card::Aleph0),
            "continuum" => Some(Card::Continuum),
            "powcont" => Some(Card::PowerContinuum),
            _ => s.parse().ok().map(Card::Fin),
        }
    }
}

impl Add for Card {
    type Output = Card;
    fn add(self, rhs: Card) -> Card {
        match (self, rhs) {
            (Card::Fin(a), Card::Fin(b)) => Card::Fin(a.saturating_add(b)),
            (a, b) => a.max(b),
        }
    }
}

impl Mul for Card {
    type Output = Card;
    fn mul(self, rhs: Card) -> Card {
        match (self, rhs) {
            (Card::Fin(0), _) | (_, Card::Fin(0)) => Card::Fin(0),
            (Card::Fin(a), Card::Fin(b)) => Card::Fin(a.saturating_mul(b)),
            (a, b) => a.max(b),
        }
    }
}

impl Sum for Card {
    fn sum<I: Iterator<Item = Card>>(iter: I) -> Card {
        iter.fold(Card::ZERO, Add::add)
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Fin(n) => write!(f, "{n}"),
            Card::Aleph0 => f.write_str("aleph0"),
            Card::Continuum => f.write_str("continuum"),
            Card::PowerContinuum => f.write_str("powcont"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::Card::*;
    use super::*;

    #[test]
    fn order_and_arithmetic() {
        assert!(Fin(1_000_000) < Aleph0 && Aleph0 < Continuum && Continuum < PowerContinuum);
        assert_eq!(Fin(2) + Fin(3), Fin(5));
        assert_eq!(Fin(2) + Aleph0, Aleph0);
        assert_eq!(Aleph0 * PowerContinuum, PowerContinuum);
        assert_eq!(Fin(0) * PowerContinuum, Fin(0));
        assert_eq!(Fin(3) * Aleph0, Aleph0);
        assert_eq!([Fin(1), Fin(2)].into_iter().sum::<Card>(), Fin(3));
    }

    #[test]
    fn text_round_trip() {
        for c in [Fin(0), Fin(7), Aleph0, Continuum, PowerContinuum] {
            assert_eq!(Card::parse(&c.to_string()), Some(c));
        }
        assert_eq!(Card::parse("omega"), Some(Aleph0));
        assert_eq!(Card::parse("-1"), None);
    }
}
