use std::fmt;

/// Identifier of a qubit in a pattern's computation space.
///
/// Qubit names are opaque tokens: nonempty, no whitespace, and none of the
/// delimiter characters used by the text format. Two qubits are the same
/// exactly when their tokens are equal. Ordering is plain token order and is
/// used everywhere a deterministic qubit order is needed (printing, sorting
/// of signal domains, canonical forms).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitId(String);

/// Characters with syntactic meaning in the pattern text format; they cannot
/// appear inside a qubit token.
const RESERVED: &[char] = &['(', ')', '{', '}', ';', ',', '+', '*', '/', '=', ':', '#', '-'];

impl QubitId {
    /// Create a qubit id, rejecting tokens that could not round-trip through
    /// the text format.
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidQubitName> {
        let name = name.into();
        if name.is_empty() {
            return Err(InvalidQubitName(name));
        }
        if name.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c)) {
            return Err(InvalidQubitName(name));
        }
        Ok(QubitId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Error for qubit tokens that are empty or contain reserved characters.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid qubit name {0:?}")]
pub struct InvalidQubitName(pub String);

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shorthand used pervasively in tests and constructors; panics on a bad
/// token, which is a programming error there.
pub fn q(name: &str) -> QubitId {
    QubitId::new(name).expect("valid qubit name")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_plain_tokens() {
        for name in ["1", "2'", "a", "A", "1_d", "q17"] {
            assert!(QubitId::new(name).is_ok(), "{name}");
        }
    }

    #[test]
    fn rejects_reserved_and_empty() {
        for name in ["", "a b", "x;y", "s+1", "p(q)", "a-b"] {
            assert!(QubitId::new(name).is_err(), "{name:?}");
        }
    }

    #[test]
    fn ordering_is_token_order() {
        assert!(q("1") < q("2"));
        assert!(q("10") < q("2"));
        assert!(q("A") < q("a"));
    }
}
