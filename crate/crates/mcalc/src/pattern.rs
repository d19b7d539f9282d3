use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::command::Command;
use crate::qubit::QubitId;

/// A measurement pattern: computation space `V`, ordered inputs `I`, ordered
/// outputs `O`, and a command sequence.
///
/// The sequence is stored in execution order (`seq[0]` runs first); the text
/// format displays it reversed, matching the right-to-left convention of the
/// measurement calculus. Inputs and outputs are ordered lists because their
/// order fixes the row/column conventions of branch maps; they may overlap.
///
/// Non-input qubits without an explicit `N` command are implicitly prepared
/// in `|+>` before anything runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub space: BTreeSet<QubitId>,
    pub inputs: Vec<QubitId>,
    pub outputs: Vec<QubitId>,
    pub seq: Vec<Command>,
}

/// Which definiteness condition a [`Violation`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// A command depends on an outcome not yet measured.
    D0,
    /// A command acts on a qubit already measured.
    D1,
    /// A command acts on a qubit not yet prepared and not an input.
    D2,
    /// A qubit is measured but listed as an output, or unmeasured but not an
    /// output.
    D3,
    /// A command or input/output list mentions a qubit outside the space, or
    /// the input/output lists contain duplicates.
    Scope,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::D0 => "D0",
            Condition::D1 => "D1",
            Condition::D2 => "D2",
            Condition::D3 => "D3",
            Condition::Scope => "scope",
        };
        f.write_str(s)
    }
}

/// One failed definiteness check: the condition, the offending command index
/// in execution order (`None` for whole-pattern conditions like D3), and the
/// qubit involved.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub index: Option<usize>,
    pub qubit: QubitId,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{} at command {} (qubit {})", self.condition, i, self.qubit),
            None => write!(f, "{} (qubit {})", self.condition, self.qubit),
        }
    }
}

/// Interface mismatch raised by [`Pattern::compose`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComposeError {
    #[error("output/input interfaces differ: outputs of first are [{0}], inputs of second are [{1}]")]
    InterfaceMismatch(String, String),
    #[error("qubit {0} is shared but not part of the interface")]
    SharedNonInterface(QubitId),
}

/// Qubit collision raised by [`Pattern::tensor`].
#[derive(Debug, Clone, PartialEq, Error)]
#[error("tensor operands share qubits: {}", join(.0))]
pub struct TensorError(pub Vec<QubitId>);

/// Bad renaming map raised by [`Pattern::rename`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenameError {
    #[error("renaming is not defined on qubit {0}")]
    Partial(QubitId),
    #[error("renaming maps {0} and {1} to the same qubit {2}")]
    NotInjective(QubitId, QubitId, QubitId),
}

fn join(qs: &[QubitId]) -> String {
    qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ")
}

impl Pattern {
    /// Build a pattern from its parts. The space is the union of the given
    /// qubits, inputs, and outputs plus everything the commands mention.
    pub fn new<I, O, Q>(space: Q, inputs: I, outputs: O, seq: Vec<Command>) -> Pattern
    where
        I: IntoIterator<Item = QubitId>,
        O: IntoIterator<Item = QubitId>,
        Q: IntoIterator<Item = QubitId>,
    {
        let inputs: Vec<_> = inputs.into_iter().collect();
        let outputs: Vec<_> = outputs.into_iter().collect();
        let mut space: BTreeSet<_> = space.into_iter().collect();
        space.extend(inputs.iter().cloned());
        space.extend(outputs.iter().cloned());
        for c in &seq {
            space.extend(c.touched_qubits().into_iter().cloned());
        }
        Pattern { space, inputs, outputs, seq }
    }

    /// The trivial identity pattern on one qubit: empty command sequence,
    /// the qubit both input and output.
    pub fn identity(qubit: QubitId) -> Pattern {
        Pattern::new([qubit.clone()], [qubit.clone()], [qubit], Vec::new())
    }

    /// Number of measurements (one-qubit measurements count 1, two-qubit
    /// measurements count 2 outcomes but are a single command).
    pub fn measurement_count(&self) -> usize {
        self.seq.iter().filter(|c| c.is_measurement()).count()
    }

    /// Number of measurement outcomes, i.e. the branch-string length.
    pub fn outcome_count(&self) -> usize {
        self.seq.iter().map(|c| c.measured_qubits().len()).sum()
    }

    /// The measured qubits in execution order; for `M2` the first qubit
    /// precedes the second.
    pub fn measured_order(&self) -> Vec<QubitId> {
        self.seq
            .iter()
            .flat_map(|c| c.measured_qubits().into_iter().cloned())
            .collect()
    }

    /// Check the definiteness conditions. An empty result means the pattern
    /// is runnable: no signal is read before its outcome exists (D0), no
    /// qubit is used after its measurement (D1) or before its preparation
    /// (D2), and the measured qubits are exactly the non-outputs (D3).
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        let input_set: BTreeSet<_> = self.inputs.iter().collect();
        if input_set.len() != self.inputs.len() {
            if let Some(d) = first_duplicate(&self.inputs) {
                out.push(Violation { condition: Condition::Scope, index: None, qubit: d });
            }
        }
        let output_set: BTreeSet<_> = self.outputs.iter().collect();
        if output_set.len() != self.outputs.len() {
            if let Some(d) = first_duplicate(&self.outputs) {
                out.push(Violation { condition: Condition::Scope, index: None, qubit: d });
            }
        }
        for q in self.inputs.iter().chain(self.outputs.iter()) {
            if !self.space.contains(q) {
                out.push(Violation { condition: Condition::Scope, index: None, qubit: q.clone() });
            }
        }

        // Qubits with an explicit N are prepared by it; other non-inputs are
        // implicitly |+> from the start.
        let explicit_prep: BTreeSet<&QubitId> = self
            .seq
            .iter()
            .filter_map(|c| match c {
                Command::N { qubit, .. } => Some(qubit),
                _ => None,
            })
            .collect();

        let mut prepared: BTreeSet<&QubitId> = self
            .space
            .iter()
            .filter(|q| !explicit_prep.contains(q) || input_set.contains(q))
            .collect();
        let mut measured: BTreeMap<&QubitId, usize> = BTreeMap::new();
        let mut seen_n: BTreeSet<&QubitId> = BTreeSet::new();

        for (idx, cmd) in self.seq.iter().enumerate() {
            for q in cmd.touched_qubits() {
                if !self.space.contains(q) {
                    out.push(Violation {
                        condition: Condition::Scope,
                        index: Some(idx),
                        qubit: q.clone(),
                    });
                }
            }
            for sig in cmd.signals() {
                for dep in &sig.deps {
                    if !measured.contains_key(dep) {
                        out.push(Violation {
                            condition: Condition::D0,
                            index: Some(idx),
                            qubit: dep.clone(),
                        });
                    }
                }
            }
            match cmd {
                Command::N { qubit, .. } => {
                    if input_set.contains(qubit) || seen_n.contains(qubit) {
                        out.push(Violation {
                            condition: Condition::D2,
                            index: Some(idx),
                            qubit: qubit.clone(),
                        });
                    }
                    if measured.contains_key(qubit) {
                        out.push(Violation {
                            condition: Condition::D1,
                            index: Some(idx),
                            qubit: qubit.clone(),
                        });
                    }
                    seen_n.insert(qubit);
                    prepared.insert(qubit);
                }
                Command::S { qubit, .. } => {
                    // shifts rewrite a recorded outcome, so the qubit must
                    // already be measured
                    if !measured.contains_key(qubit) {
                        out.push(Violation {
                            condition: Condition::D0,
                            index: Some(idx),
                            qubit: qubit.clone(),
                        });
                    }
                }
                _ => {
                    for q in cmd.quantum_qubits() {
                        if measured.contains_key(q) {
                            out.push(Violation {
                                condition: Condition::D1,
                                index: Some(idx),
                                qubit: q.clone(),
                            });
                        }
                        if !prepared.contains(q) && self.space.contains(q) {
                            out.push(Violation {
                                condition: Condition::D2,
                                index: Some(idx),
                                qubit: q.clone(),
                            });
                        }
                    }
                    for q in cmd.measured_qubits() {
                        measured.entry(q).or_insert(idx);
                    }
                }
            }
        }

        for q in &self.space {
            let is_measured = measured.contains_key(q);
            let is_output = output_set.contains(q);
            if is_measured && is_output {
                out.push(Violation {
                    condition: Condition::D3,
                    index: measured.get(q).copied(),
                    qubit: q.clone(),
                });
            }
            if !is_measured && !is_output {
                out.push(Violation { condition: Condition::D3, index: None, qubit: q.clone() });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Sequential composition: `self` runs after `other` (`self ∘ other`).
    /// Requires the shared qubits to be exactly `other.outputs = self.inputs`
    /// with matching order; the result has `other`'s inputs, `self`'s
    /// outputs, and the concatenated command sequence.
    pub fn compose(&self, other: &Pattern) -> Result<Pattern, ComposeError> {
        if other.outputs != self.inputs {
            return Err(ComposeError::InterfaceMismatch(
                join(&other.outputs),
                join(&self.inputs),
            ));
        }
        let interface: BTreeSet<_> = self.inputs.iter().cloned().collect();
        for shared in other.space.intersection(&self.space) {
            if !interface.contains(shared) {
                return Err(ComposeError::SharedNonInterface(shared.clone()));
            }
        }
        let mut seq = other.seq.clone();
        seq.extend(self.seq.iter().cloned());
        Ok(Pattern::new(
            other.space.union(&self.space).cloned().collect::<Vec<_>>(),
            other.inputs.clone(),
            self.outputs.clone(),
            seq,
        ))
    }

    /// Parallel composition on disjoint spaces; inputs and outputs
    /// concatenate in operand order.
    pub fn tensor(&self, other: &Pattern) -> Result<Pattern, TensorError> {
        let shared: Vec<_> = self.space.intersection(&other.space).cloned().collect();
        if !shared.is_empty() {
            return Err(TensorError(shared));
        }
        let mut seq = self.seq.clone();
        seq.extend(other.seq.iter().cloned());
        let mut inputs = self.inputs.clone();
        inputs.extend(other.inputs.iter().cloned());
        let mut outputs = self.outputs.clone();
        outputs.extend(other.outputs.iter().cloned());
        Ok(Pattern::new(
            self.space.union(&other.space).cloned().collect::<Vec<_>>(),
            inputs,
            outputs,
            seq,
        ))
    }

    /// Rename qubits throughout (space, interfaces, commands, signal
    /// domains) by a map that must be defined and injective on the space.
    pub fn rename(&self, map: &BTreeMap<QubitId, QubitId>) -> Result<Pattern, RenameError> {
        let mut seen: BTreeMap<&QubitId, &QubitId> = BTreeMap::new();
        for q in &self.space {
            let to = map.get(q).ok_or_else(|| RenameError::Partial(q.clone()))?;
            if let Some(prev) = seen.insert(to, q) {
                return Err(RenameError::NotInjective(prev.clone(), q.clone(), to.clone()));
            }
        }
        let f = |q: &QubitId| map.get(q).cloned().unwrap_or_else(|| q.clone());
        Ok(Pattern {
            space: self.space.iter().map(|q| f(q)).collect(),
            inputs: self.inputs.iter().map(|q| f(q)).collect(),
            outputs: self.outputs.iter().map(|q| f(q)).collect(),
            seq: self.seq.iter().map(|c| c.rename(&f)).collect(),
        })
    }

    /// The command sequence in display order (reverse of execution), as used
    /// by the text format.
    pub fn display_seq(&self) -> impl Iterator<Item = &Command> {
        self.seq.iter().rev()
    }
}

fn first_duplicate(list: &[QubitId]) -> Option<QubitId> {
    let mut seen = BTreeSet::new();
    for q in list {
        if !seen.insert(q) {
            return Some(q.clone());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::{Angle, DependentAngle};
    use crate::qubit::q;
    use crate::signal::Signal;
    use crate::zoo;

    fn h_pattern() -> Pattern {
        // execution order: E(1,2), M(1;0), X(2;s1)
        Pattern::new(
            [q("1"), q("2")],
            [q("1")],
            [q("2")],
            vec![
                Command::E { a: q("1"), b: q("2") },
                Command::M { qubit: q("1"), angle: DependentAngle::constant(Angle::ZERO) },
                Command::X { qubit: q("2"), signal: Signal::outcome(q("1")) },
            ],
        )
    }

    #[test]
    fn h_pattern_is_valid() {
        assert_eq!(h_pattern().validate(), vec![]);
    }

    #[test]
    fn correction_before_measurement_is_d0() {
        let p = Pattern::new(
            [q("1"), q("2")],
            [q("1")],
            [q("2")],
            vec![
                Command::X { qubit: q("2"), signal: Signal::outcome(q("1")) },
                Command::E { a: q("1"), b: q("2") },
                Command::M { qubit: q("1"), angle: DependentAngle::constant(Angle::ZERO) },
            ],
        );
        let v = p.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].condition, Condition::D0);
        assert_eq!(v[0].index, Some(0));
        assert_eq!(v[0].qubit, q("1"));
    }

    #[test]
    fn reuse_after_measurement_and_measured_output() {
        // M(1;0) then E(1,2), with both qubits declared outputs
        let p = Pattern::new(
            [q("1"), q("2")],
            [q("1"), q("2")],
            [q("1"), q("2")],
            vec![
                Command::M { qubit: q("1"), angle: DependentAngle::constant(Angle::ZERO) },
                Command::E { a: q("1"), b: q("2") },
            ],
        );
        let v = p.validate();
        assert!(v.iter().any(|x| x.condition == Condition::D1 && x.index == Some(1)));
        assert!(v.iter().any(|x| x.condition == Condition::D3 && x.qubit == q("1")));
    }

    #[test]
    fn compose_j_patterns_concatenates() {
        let alpha = Angle::exact(1, 4);
        let beta = Angle::exact(1, 3);
        let j1 = zoo::j_pattern(alpha, q("1"), q("2"));
        let j2 = zoo::j_pattern(beta, q("2"), q("3"));
        let c = j2.compose(&j1).unwrap();
        assert_eq!(c.inputs, vec![q("1")]);
        assert_eq!(c.outputs, vec![q("3")]);
        assert_eq!(c.space.len(), 3);
        assert_eq!(c.seq.len(), 6);
        assert!(c.is_valid());
    }

    #[test]
    fn compose_with_identity_is_noop() {
        let p = h_pattern();
        let id = Pattern::identity(q("1"));
        let c = p.compose(&id).unwrap();
        assert_eq!(c, p);
    }

    #[test]
    fn compose_rejects_overlap_outside_interface() {
        // both patterns use qubit "9" internally
        let mut p1 = h_pattern();
        p1.space.insert(q("9"));
        p1.outputs = vec![q("2")];
        let mut p2 = Pattern::identity(q("2"));
        p2.space.insert(q("9"));
        let err = p2.compose(&p1).unwrap_err();
        assert_eq!(err, ComposeError::SharedNonInterface(q("9")));
    }

    #[test]
    fn compose_rejects_order_mismatch() {
        let mut p1 = Pattern::identity(q("a"));
        p1.space.insert(q("b"));
        p1.inputs = vec![q("a"), q("b")];
        p1.outputs = vec![q("a"), q("b")];
        let mut p2 = p1.clone();
        p2.inputs = vec![q("b"), q("a")];
        assert!(matches!(p2.compose(&p1), Err(ComposeError::InterfaceMismatch(..))));
    }

    #[test]
    fn tensor_disjoint_and_rejects_shared() {
        let a = Pattern::identity(q("1"));
        let h = h_pattern().rename(&[(q("1"), q("3")), (q("2"), q("4"))].into()).unwrap();
        let t = a.tensor(&h).unwrap();
        assert_eq!(t.inputs, vec![q("1"), q("3")]);
        assert_eq!(t.outputs, vec![q("1"), q("4")]);
        assert!(t.is_valid());
        assert!(h_pattern().tensor(&h_pattern()).is_err());
    }

    #[test]
    fn tensor_with_empty_pattern() {
        let empty = Pattern::new([], [], [], vec![]);
        let p = h_pattern();
        let t = p.tensor(&empty).unwrap();
        assert_eq!(t.seq, p.seq);
        assert_eq!(t.inputs, p.inputs);
    }

    #[test]
    fn rename_roundtrip() {
        let p = h_pattern();
        let fwd: BTreeMap<_, _> = [(q("1"), q("x")), (q("2"), q("y"))].into();
        let back: BTreeMap<_, _> = [(q("x"), q("1")), (q("y"), q("2"))].into();
        let there = p.rename(&fwd).unwrap();
        assert!(there.is_valid());
        assert_eq!(there.rename(&back).unwrap(), p);
        // identity rename
        let ident: BTreeMap<_, _> = [(q("1"), q("1")), (q("2"), q("2"))].into();
        assert_eq!(p.rename(&ident).unwrap(), p);
    }

    #[test]
    fn rename_rejects_bad_maps() {
        let p = h_pattern();
        let partial: BTreeMap<_, _> = [(q("1"), q("x"))].into();
        assert!(matches!(p.rename(&partial), Err(RenameError::Partial(_))));
        let collide: BTreeMap<_, _> = [(q("1"), q("x")), (q("2"), q("x"))].into();
        assert!(matches!(p.rename(&collide), Err(RenameError::NotInjective(..))));
    }

    #[test]
    fn composition_preserves_validity() {
        let alpha = Angle::float(0.3);
        let j1 = zoo::j_pattern(alpha, q("1"), q("2"));
        let j2 = zoo::j_pattern(alpha, q("2"), q("3"));
        let j3 = zoo::j_pattern(alpha, q("3"), q("4"));
        let c = j3.compose(&j2.compose(&j1).unwrap()).unwrap();
        assert!(c.is_valid());
    }
}
