use std::collections::BTreeSet;
use std::fmt;

use crate::qubit::QubitId;

/// A Z2 sum of measurement outcomes, optionally with a constant bit:
/// `s = c + Σ_{i∈deps} s_i` with addition mod 2.
///
/// The empty sum with constant 0 is the canonical zero signal; constant 1
/// with no dependencies is the always-on signal used by unconditional
/// corrections.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signal {
    pub constant: bool,
    pub deps: BTreeSet<QubitId>,
}

impl Signal {
    pub fn zero() -> Self {
        Signal::default()
    }

    pub fn one() -> Self {
        Signal { constant: true, deps: BTreeSet::new() }
    }

    /// The single-outcome signal `s_i`.
    pub fn outcome(i: QubitId) -> Self {
        let mut deps = BTreeSet::new();
        deps.insert(i);
        Signal { constant: false, deps }
    }

    pub fn from_deps<I: IntoIterator<Item = QubitId>>(deps: I) -> Self {
        Signal { constant: false, deps: deps.into_iter().collect() }
    }

    pub fn is_zero(&self) -> bool {
        !self.constant && self.deps.is_empty()
    }

    /// Z2 addition: XOR on the constant, symmetric difference on the
    /// dependency set.
    pub fn add(&self, other: &Signal) -> Signal {
        let deps = self
            .deps
            .symmetric_difference(&other.deps)
            .cloned()
            .collect();
        Signal { constant: self.constant ^ other.constant, deps }
    }

    pub fn add_assign(&mut self, other: &Signal) {
        *self = self.add(other);
    }

    pub fn depends_on(&self, i: &QubitId) -> bool {
        self.deps.contains(i)
    }

    /// The substitution `s[t + s_i / s_i]`: every occurrence of the outcome
    /// `s_i` is replaced by `t + s_i`. In Z2 terms, if `i` is in the domain
    /// the whole of `t` is added (so `s_i` itself survives unless `t` also
    /// contains it); otherwise nothing changes.
    pub fn shift_outcome(&self, i: &QubitId, t: &Signal) -> Signal {
        if self.depends_on(i) {
            self.add(t)
        } else {
            self.clone()
        }
    }

    pub fn rename(&self, f: impl Fn(&QubitId) -> QubitId) -> Signal {
        Signal {
            constant: self.constant,
            deps: self.deps.iter().map(|i| f(i)).collect(),
        }
    }
}

impl fmt::Display for Signal {
    /// Renders `s<dep>` terms sorted by qubit token, constant last: `s1+s2+1`.
    /// The zero signal renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for dep in &self.deps {
            if !first {
                f.write_str("+")?;
            }
            write!(f, "s{dep}")?;
            first = false;
        }
        if self.constant {
            if !first {
                f.write_str("+")?;
            }
            f.write_str("1")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::q;

    #[test]
    fn addition_is_z2() {
        let s1 = Signal::outcome(q("1"));
        let s2 = Signal::outcome(q("2"));
        let sum = s1.add(&s2);
        assert_eq!(sum.deps.len(), 2);
        // adding s1 again cancels it
        let back = sum.add(&s1);
        assert_eq!(back, s2);
        // constants xor
        assert_eq!(Signal::one().add(&Signal::one()), Signal::zero());
    }

    #[test]
    fn display_sorts_deps_and_puts_constant_last() {
        let mut s = Signal::outcome(q("2"));
        s.add_assign(&Signal::outcome(q("1")));
        s.add_assign(&Signal::one());
        assert_eq!(s.to_string(), "s1+s2+1");
        assert_eq!(Signal::zero().to_string(), "0");
        assert_eq!(Signal::one().to_string(), "1");
    }

    #[test]
    fn shift_outcome_adds_t_when_i_present() {
        // s = s1, shift s1 by t = s2: s1 -> s1 + s2
        let s = Signal::outcome(q("1"));
        let t = Signal::outcome(q("2"));
        let shifted = s.shift_outcome(&q("1"), &t);
        assert_eq!(shifted, s.add(&t));
        // untouched when i not in the domain
        assert_eq!(s.shift_outcome(&q("3"), &t), s);
        // s = s1, t = s1: the occurrences cancel
        let cancel = s.shift_outcome(&q("1"), &s);
        assert!(cancel.is_zero());
    }
}
