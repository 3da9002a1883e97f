use serde::{Deserialize, Serialize};

/// Search limits shared by every bounded layer of the deciders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    /// Maximum word length explored by breadth-first searches.
    pub depth: usize,
    /// Entries with absolute value above this bound are pruned.
    pub norm: u64,
    /// Largest finite closure accepted before declaring a group infinite.
    pub closure: usize,
    /// Largest generator count accepted by the identity decider.
    pub subsets: usize,
    /// Number of doublings allowed in exponent searches.
    pub doublings: u32,
    /// Maximum number of factors in an emitted certificate.
    pub word_factors: usize,
    /// Entry bound for the basis search behind the invariant-cone test.
    pub cone_basis: i64,
    /// Enables the closed-form layers of the Heisenberg decider.
    pub h3_closed_form: bool,
    /// Maximum number of states held by a breadth-first search.
    pub states: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            depth: 12,
            norm: 1_000_000,
            closure: 24,
            subsets: 16,
            doublings: 24,
            word_factors: 1 << 20,
            cone_basis: 4,
            h3_closed_form: true,
            states: 2_000_000,
        }
    }
}

impl Caps {
    /// All searches disabled.
    pub fn zero() -> Self {
        Caps {
            depth: 0,
            norm: 0,
            doublings: 0,
            word_factors: 0,
            ..Caps::default()
        }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_norm(mut self, norm: u64) -> Self {
        self.norm = norm;
        self
    }
}
