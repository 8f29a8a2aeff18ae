use thiserror::Error;

/// Errors produced while validating inputs or running the constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("multiplication table is empty")]
    EmptyTable,
    #[error("table is not square: row {row} has {len} entries, expected {expected}")]
    RaggedTable { row: usize, len: usize, expected: usize },
    #[error("table entry {value} at ({row}, {col}) is out of range")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("multiplication is not associative: ({0}{1}){2} != {0}({1}{2})")]
    NotAssociative(String, String, String),
    #[error("element {0} has no unique inverse")]
    NoUniqueInverse(String),
    #[error("idempotents {0} and {1} do not commute")]
    IdempotentsDontCommute(String, String),
    #[error("generators do not generate the semigroup (missing {0})")]
    GeneratorsDontGenerate(String),
    #[error("element {0} is not idempotent")]
    NotIdempotent(String),
    #[error("embedding is not injective: {0} and {1} have the same image")]
    NotInjective(String, String),
    #[error("embedding is not a homomorphism at ({0}, {1})")]
    NotHomomorphism(String, String),
    #[error("embedding map has length {got}, expected {expected}")]
    EmbeddingArity { got: usize, expected: usize },
    #[error("empty word")]
    EmptyWord,
    #[error("unknown element or generator name `{0}`")]
    UnknownName(String),
    #[error("cannot parse word `{0}`")]
    BadWord(String),
    #[error("letter of colour {0} does not belong to this semigroup")]
    WrongColor(u8),
    #[error("edge budget exceeded ({0} edges)")]
    EdgeBudget(usize),
    #[error("lobe budget exceeded ({0} lobes)")]
    LobeBudget(usize),
    #[error("lobe graph is not a tree (cycle through lobes {0:?})")]
    LobeGraphNotTree(Vec<usize>),
    #[error("lobe {0} is not closed")]
    LobeNotClosed(usize),
    #[error("vertex {0} is not a bud")]
    NotABud(usize),
    #[error("lobes {0} and {1} are not adjacent at the given vertex")]
    NotAdjacent(usize, usize),
    #[error("lobes {0} and {1} are not isomorphic")]
    NotIsomorphicLobes(usize, usize),
    #[error("the Schützenberger graph has a single host")]
    NotMultiHost,
    #[error("no lift found for automorphism: {0}")]
    NoLiftFound(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("document error: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that come from exhausting a configured budget.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::EdgeBudget(_) | Error::LobeBudget(_))
    }
}
