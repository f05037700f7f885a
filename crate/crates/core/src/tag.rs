//! Semantic tags for solver variables.

use std::fmt;

use esmc_sat::AuxTag;

/// Role of a Boolean variable in either compilation stage. The registry keeps
/// a bijection between these and solver variable ids, which backs the
/// variable-legend sidecar written next to exported WCNF files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    /// Data qubit `qubit` is placed on physical node `node`.
    Map { qubit: usize, node: usize },
    /// Node `node` belongs to the ancilla bridge of stabilizer `stab`.
    Anc { stab: usize, node: usize },
    /// Elected bridge root (measured qubit) of `stab`.
    Root { stab: usize, node: usize },
    /// Bridge node visited by traversal round `round` (root-election form).
    Visit { stab: usize, node: usize, round: usize },
    /// Visited-by-round variable of the per-start-vertex traversal.
    VisitFrom {
        stab: usize,
        start: usize,
        node: usize,
        round: usize,
    },
    /// Data qubit `qubit` of `stab` couples through bridge node `node`.
    Cp { stab: usize, qubit: usize, node: usize },
    /// Bridges of stabilizers `a` and `b` are node-disjoint.
    Compat { a: usize, b: usize },
    /// Encoding-phase gate selector: CNOT `from -> to`, or the root Hadamard
    /// when `from == to`.
    Enc { stab: usize, from: usize, to: usize },
    /// Decoding-phase analogue of `Enc`.
    Dec { stab: usize, from: usize, to: usize },
    /// Gate `gate` executes at time step `step`.
    Time { gate: usize, step: usize },
    /// Prefix ladder: gate `gate` has executed at step `<= step`.
    Ladder { gate: usize, step: usize },
    /// Anonymous encoding auxiliary.
    Aux(u32),
}

impl AuxTag for Tag {
    fn aux(ordinal: u32) -> Tag {
        Tag::Aux(ordinal)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Tag::Map { qubit, node } => write!(f, "map(q{qubit},p{node})"),
            Tag::Anc { stab, node } => write!(f, "anc(s{stab},p{node})"),
            Tag::Root { stab, node } => write!(f, "root(s{stab},p{node})"),
            Tag::Visit { stab, node, round } => write!(f, "v(s{stab},p{node},t{round})"),
            Tag::VisitFrom {
                stab,
                start,
                node,
                round,
            } => write!(f, "v(s{stab},start{start},p{node},t{round})"),
            Tag::Cp { stab, qubit, node } => write!(f, "cp(s{stab},q{qubit},p{node})"),
            Tag::Compat { a, b } => write!(f, "compat(s{a},s{b})"),
            Tag::Enc { stab, from, to } => write!(f, "enc(s{stab},p{from},p{to})"),
            Tag::Dec { stab, from, to } => write!(f, "dec(s{stab},p{from},p{to})"),
            Tag::Time { gate, step } => write!(f, "time(g{gate},t{step})"),
            Tag::Ladder { gate, step } => write!(f, "u(g{gate},t{step})"),
            Tag::Aux(n) => write!(f, "aux{n}"),
        }
    }
}
