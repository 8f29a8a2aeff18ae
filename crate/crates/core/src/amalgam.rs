//! Amalgams `[S1, S2; U]`, their standard presentation and word syntax.

use crate::error::{Error, Result};
use crate::fis::{Elem, FiniteInverseSemigroup, SubsemigroupEmbedding};
use crate::stephen::Presentation;
use crate::word::{Letter, Word};

/// Two finite inverse semigroups with embeddings of a common `U`.
///
/// Colour `i ∈ {1, 2}` selects `S_i`, its generators `X_i` and `φ_i`.
#[derive(Clone, Debug)]
pub struct Amalgam {
    s: [FiniteInverseSemigroup; 2],
    u: FiniteInverseSemigroup,
    phi: [SubsemigroupEmbedding; 2],
    tables: [Presentation; 2],
    r_union: Presentation,
    w_pres: Presentation,
}

/// `⟨X1 ⊔ X2 | R1 ∪ R2 ∪ W⟩`.
#[derive(Clone, Debug)]
pub struct StandardPresentation {
    pub r: Presentation,
    /// `(c1(φ1(u)), c2(φ2(u)))` for each `u ∈ U`, in element order.
    pub w: Vec<(Word, Word)>,
}

fn slot(color: u8) -> usize {
    debug_assert!(color == 1 || color == 2);
    usize::from(color) - 1
}

impl Amalgam {
    pub fn new(
        s1: FiniteInverseSemigroup,
        s2: FiniteInverseSemigroup,
        u: FiniteInverseSemigroup,
        phi1: Vec<Elem>,
        phi2: Vec<Elem>,
    ) -> Result<Self> {
        let p1 = SubsemigroupEmbedding::new(&u, &s1, phi1)?;
        let p2 = SubsemigroupEmbedding::new(&u, &s2, phi2)?;
        let tables = [Presentation::from_table(&s1, 1), Presentation::from_table(&s2, 2)];
        let r_union = tables[0].union(&tables[1]);
        let mut a = Amalgam { s: [s1, s2], u, phi: [p1, p2], tables, r_union, w_pres: Presentation::default() };
        a.w_pres = Presentation { relations: a.standard_presentation().w };
        Ok(a)
    }

    pub fn factor(&self, color: u8) -> &FiniteInverseSemigroup {
        &self.s[slot(color)]
    }

    pub fn u(&self) -> &FiniteInverseSemigroup {
        &self.u
    }

    pub fn embedding(&self, color: u8) -> &SubsemigroupEmbedding {
        &self.phi[slot(color)]
    }

    /// `φ_color(u)`.
    pub fn phi(&self, color: u8, u: Elem) -> Elem {
        self.phi[slot(color)].apply(u)
    }

    /// `R_color`, the table presentation of one factor.
    pub fn table_presentation(&self, color: u8) -> &Presentation {
        &self.tables[slot(color)]
    }

    /// Canonical word of `φ_color(u)` in colour `color`.
    pub fn u_word(&self, u: Elem, color: u8) -> Word {
        self.factor(color).canonical_word(self.phi(color, u), color)
    }

    pub fn standard_presentation(&self) -> StandardPresentation {
        StandardPresentation {
            r: self.r_union.clone(),
            w: self.u.elements().map(|u| (self.u_word(u, 1), self.u_word(u, 2))).collect(),
        }
    }

    /// `R1 ∪ R2`.
    pub fn r_presentation(&self) -> &Presentation {
        &self.r_union
    }

    /// `W` as a presentation, for expansions.
    pub fn w_presentation(&self) -> &Presentation {
        &self.w_pres
    }

    pub fn u_idempotents(&self) -> Vec<Elem> {
        self.u.idempotents()
    }

    /// Checks that every letter names a generator of its colour.
    pub fn check_word(&self, w: &[Letter]) -> Result<()> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        for l in w {
            if l.color != 1 && l.color != 2 {
                return Err(Error::WrongColor(l.color));
            }
            if l.gen >= self.factor(l.color).generators().len() {
                return Err(Error::BadWord(l.to_string()));
            }
        }
        Ok(())
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let s = self.factor(l.color);
        let base = s.element_name(s.generators()[l.gen]);
        if l.inverse {
            format!("{base}^-1")
        } else {
            base.to_string()
        }
    }

    pub fn word_to_string(&self, w: &[Letter]) -> String {
        w.iter().map(|&l| self.letter_name(l)).collect()
    }

    /// Parses a word by longest match against generator names of both
    /// factors. Each name may be followed by `^-1` or `⁻¹`; whitespace separates.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut names: Vec<(String, u8, usize)> = Vec::new();
        for color in [1u8, 2] {
            let s = self.factor(color);
            for (g, &e) in s.generators().iter().enumerate() {
                names.push((s.element_name(e).to_string(), color, g));
            }
        }
        let mut rest = text.trim();
        let mut w = Vec::new();
        while !rest.is_empty() {
            let best = names
                .iter()
                .filter(|(n, _, _)| !n.is_empty() && rest.starts_with(n.as_str()))
                .max_by_key(|(n, _, _)| n.len());
            let Some((name, color, gen)) = best else {
                return Err(Error::UnknownName(rest.chars().take(8).collect()));
            };
            let ties = names
                .iter()
                .filter(|(n, _, _)| n.len() == name.len() && rest.starts_with(n.as_str()))
                .count();
            if ties > 1 {
                return Err(Error::BadWord(format!("ambiguous generator name `{name}`")));
            }
            rest = &rest[name.len()..];
            let mut inverse = false;
            for suffix in ["^-1", "⁻¹"] {
                if let Some(r) = rest.strip_prefix(suffix) {
                    rest = r;
                    inverse = true;
                    break;
                }
            }
            w.push(Letter::new(*color, *gen, inverse));
            rest = rest.trim_start();
        }
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(w)
    }
}
