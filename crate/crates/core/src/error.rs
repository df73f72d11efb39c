use thiserror::Error;

/// Errors raised by the combinatorial engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SturmError {
    #[error("cannot parse permutation token {token:?}")]
    Parse { token: String },

    #[error("empty permutation")]
    Empty,

    #[error("not a bijection on 1..{n}: {detail}")]
    NotABijection { n: usize, detail: String },

    #[error("permutation has even length {0}; Morse and zero numbers need an odd vertex count")]
    EvenLength(usize),

    #[error("permutation is not dissipative (requires sigma(1)=1 and sigma(N)=N)")]
    NotDissipative,

    #[error("permutation is not a meander: arcs ({a1},{b1}) and ({a2},{b2}) cross on the {side} side")]
    NotMeander {
        side: &'static str,
        a1: usize,
        b1: usize,
        a2: usize,
        b2: usize,
    },

    #[error("negative Morse number {morse} at meander position {position}")]
    NotMorse { position: usize, morse: i32 },

    #[error("invalid arc diagram: {0}")]
    BadDiagram(String),

    #[error("arc diagram terminals are not one upper-only and one lower-only position")]
    BadTerminals,

    #[error("curve traversal visited only {visited} of {n} vertices ({components} components)")]
    NotConnected {
        visited: usize,
        n: usize,
        components: usize,
    },

    #[error("internal consistency failure: {0}")]
    ConsistencyFailure(String),

    #[error("connection graph is not a Sturm ball")]
    NotABall,

    #[error("no edge-reversing involution exists on the graph minus its top vertex")]
    NotReversible,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),

    #[error("unknown verification suite {0:?}")]
    UnknownSuite(String),
}

pub type Result<T, E = SturmError> = std::result::Result<T, E>;
