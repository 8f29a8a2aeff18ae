//! Letters and words over a coloured alphabet `X1 ⊔ X2` and its formal inverses.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A generator of colour 1 or 2, possibly formally inverted.
///
/// `gen` indexes the generator list of the semigroup of that colour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub color: u8,
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(color: u8, gen: usize, inverse: bool) -> Self {
        Letter { color, gen, inverse }
    }

    pub fn pos(color: u8, gen: usize) -> Self {
        Letter::new(color, gen, false)
    }

    pub fn inv(self) -> Self {
        Letter { inverse: !self.inverse, ..self }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}_{}", self.color, self.gen)?;
        if self.inverse {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// Words are plain letter sequences; no free reduction is ever applied.
pub type Word = Vec<Letter>;

/// Formal inverse of a word: reversed, each letter inverted.
pub fn inverse_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inv()).collect()
}

/// Recolours every letter of `w`.
pub fn recolor(w: &[Letter], color: u8) -> Word {
    w.iter().map(|l| Letter { color, ..*l }).collect()
}
