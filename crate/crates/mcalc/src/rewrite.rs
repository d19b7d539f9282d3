//! The local rewrite system: pushing entanglements to the front and
//! corrections to the back, standardization into NEMC form, the termination
//! measure, signal shifting, and canonical forms for the pattern-equivalence
//! relation.

use std::fmt;

use thiserror::Error;

use crate::command::Command;
use crate::pattern::{Pattern, Violation};
use crate::signal::Signal;

/// The rewrite rule applied at a position. Names follow the usual rule
/// naming of the measurement calculus: `EX`/`EZ`/`MX`/`MZ` propagate
/// corrections through entanglements and measurements, `FREE_*` are the
/// disjoint-qubit commutations, `SHIFT_*`/`SPLIT` belong to the
/// signal-shifting extension, `EP`/`MP` to the phase model, and
/// `T_MX`/`T_MZ` to the two-qubit measurements of the teleportation model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Ex,
    Ex2,
    Ez,
    Ez2,
    Mx,
    Mz,
    FreeE,
    FreeX,
    FreeZ,
    Split,
    ShiftX,
    ShiftZ,
    ShiftM,
    ShiftS,
    Ep,
    Mp,
    TMx,
    TMz,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Ex => "EX",
            Rule::Ex2 => "EX2",
            Rule::Ez => "EZ",
            Rule::Ez2 => "EZ2",
            Rule::Mx => "MX",
            Rule::Mz => "MZ",
            Rule::FreeE => "FREE_E",
            Rule::FreeX => "FREE_X",
            Rule::FreeZ => "FREE_Z",
            Rule::Split => "SPLIT",
            Rule::ShiftX => "SHIFT_X",
            Rule::ShiftZ => "SHIFT_Z",
            Rule::ShiftM => "SHIFT_M",
            Rule::ShiftS => "SHIFT_S",
            Rule::Ep => "EP",
            Rule::Mp => "MP",
            Rule::TMx => "T_MX",
            Rule::TMz => "T_MZ",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RewriteError {
    #[error("pattern fails validation: {}", format_violations(.0))]
    NotValid(Vec<Violation>),
    #[error("pattern is not in NEMC standard form")]
    NotStandard,
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// The termination measure `(d_E, d_C)`: the strictly increasing depths of
/// the `E` commands (in their fixed relative order) and the summed depths of
/// the corrections. Depth counts 1-based from the execution start for `E`
/// and from the sequence end for corrections. Compared lexicographically;
/// every applicable rewrite step strictly decreases it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    pub entangle_depths: Vec<usize>,
    pub correction_depth: usize,
}

impl PartialOrd for Measure {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Measure {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.entangle_depths
            .cmp(&other.entangle_depths)
            .then(self.correction_depth.cmp(&other.correction_depth))
    }
}

/// Compute the termination measure of a pattern. Preparations,
/// measurements, and shifts contribute nothing.
pub fn measure_of(p: &Pattern) -> Measure {
    let n = p.seq.len();
    let mut entangle_depths = Vec::new();
    let mut correction_depth = 0;
    for (k, cmd) in p.seq.iter().enumerate() {
        if cmd.is_entanglement() {
            entangle_depths.push(k + 1);
        } else if cmd.is_correction() {
            correction_depth += n - (k + 1);
        }
    }
    Measure { entangle_depths, correction_depth }
}

fn disjoint(a: &Command, b: &Command) -> bool {
    let bq = b.quantum_qubits();
    a.quantum_qubits().iter().all(|q| !bq.contains(q))
}

/// Try to match a rewrite rule on the execution-adjacent pair at `at`:
/// `seq[at]` runs first, `seq[at+1]` second (so the pair reads
/// `seq[at+1]·seq[at]` in display order). Returns the rule tag and the
/// replacement commands in execution order.
///
/// Preparation commands never participate: hoisting them to the front is a
/// separate, trivially-commuting stage of the standardization algorithm.
fn match_at(seq: &[Command], at: usize, allow_shift_swap: bool) -> Option<(Rule, Vec<Command>)> {
    let first = &seq[at];
    let second = &seq[at + 1];
    if first.is_preparation() || second.is_preparation() {
        return None;
    }
    match (second, first) {
        // --- entanglement meets an earlier correction ---
        (Command::E { a, b }, Command::X { qubit, signal }) => {
            if qubit == a {
                Some((
                    Rule::Ex,
                    vec![
                        second.clone(),
                        Command::Z { qubit: b.clone(), signal: signal.clone() },
                        first.clone(),
                    ],
                ))
            } else if qubit == b {
                Some((
                    Rule::Ex2,
                    vec![
                        second.clone(),
                        Command::Z { qubit: a.clone(), signal: signal.clone() },
                        first.clone(),
                    ],
                ))
            } else {
                Some((Rule::FreeE, vec![second.clone(), first.clone()]))
            }
        }
        (Command::E { a, b }, Command::Z { qubit, .. }) => {
            let rule = if qubit == a {
                Rule::Ez
            } else if qubit == b {
                Rule::Ez2
            } else {
                Rule::FreeE
            };
            Some((rule, vec![second.clone(), first.clone()]))
        }
        (Command::E { a, b }, Command::P { qubit, .. }) => {
            let rule = if qubit == a || qubit == b { Rule::Ep } else { Rule::FreeE };
            Some((rule, vec![second.clone(), first.clone()]))
        }
        (Command::E { .. }, Command::E { .. }) => None,
        // shifts are classical; an entanglement commutes past them freely
        (Command::E { .. }, Command::S { .. }) => {
            Some((Rule::FreeE, vec![second.clone(), first.clone()]))
        }
        (Command::E { .. }, Command::M { .. } | Command::M2 { .. }) => {
            if disjoint(second, first) {
                Some((Rule::FreeE, vec![second.clone(), first.clone()]))
            } else {
                None
            }
        }

        // --- measurement absorbs an earlier correction on its qubit ---
        (Command::M { qubit: m, angle }, Command::X { qubit, signal }) => {
            if m == qubit {
                let mut angle = angle.clone();
                angle.x_action(signal);
                angle.absorb_pauli_actions();
                Some((Rule::Mx, vec![Command::M { qubit: m.clone(), angle }]))
            } else {
                Some((Rule::FreeX, vec![second.clone(), first.clone()]))
            }
        }
        (Command::M { qubit: m, angle }, Command::Z { qubit, signal }) => {
            if m == qubit {
                let mut angle = angle.clone();
                angle.z_action(signal);
                angle.absorb_pauli_actions();
                Some((Rule::Mz, vec![Command::M { qubit: m.clone(), angle }]))
            } else {
                Some((Rule::FreeZ, vec![second.clone(), first.clone()]))
            }
        }
        (Command::M { qubit: m, angle }, Command::P { qubit, angle: beta, signal }) => {
            if m == qubit {
                let mut angle = angle.clone();
                angle.p_action(beta, signal);
                Some((Rule::Mp, vec![Command::M { qubit: m.clone(), angle }]))
            } else {
                Some((Rule::FreeZ, vec![second.clone(), first.clone()]))
            }
        }

        // --- two-qubit measurement absorbs an earlier correction ---
        (Command::M2 { a, b, alpha, beta }, Command::X { qubit, signal }) => {
            if qubit == a || qubit == b {
                let (mut alpha, mut beta) = (alpha.clone(), beta.clone());
                if qubit == a {
                    alpha.x_action(signal);
                    beta.z_action(signal);
                } else {
                    beta.x_action(signal);
                    alpha.z_action(signal);
                }
                alpha.absorb_pauli_actions();
                beta.absorb_pauli_actions();
                Some((Rule::TMx, vec![Command::M2 { a: a.clone(), b: b.clone(), alpha, beta }]))
            } else {
                Some((Rule::FreeX, vec![second.clone(), first.clone()]))
            }
        }
        (Command::M2 { a, b, alpha, beta }, Command::Z { qubit, signal }) => {
            if qubit == a || qubit == b {
                let (mut alpha, mut beta) = (alpha.clone(), beta.clone());
                if qubit == a {
                    alpha.z_action(signal);
                } else {
                    beta.z_action(signal);
                }
                alpha.absorb_pauli_actions();
                beta.absorb_pauli_actions();
                Some((Rule::TMz, vec![Command::M2 { a: a.clone(), b: b.clone(), alpha, beta }]))
            } else {
                Some((Rule::FreeZ, vec![second.clone(), first.clone()]))
            }
        }
        (Command::M2 { .. }, Command::P { .. }) => {
            if disjoint(second, first) {
                Some((Rule::FreeZ, vec![second.clone(), first.clone()]))
            } else {
                None
            }
        }

        // --- an earlier shift propagates toward the end ---
        (Command::X { qubit, signal }, Command::S { qubit: i, signal: t }) => Some((
            Rule::ShiftX,
            vec![
                Command::X { qubit: qubit.clone(), signal: signal.shift_outcome(i, t) },
                first.clone(),
            ],
        )),
        (Command::Z { qubit, signal }, Command::S { qubit: i, signal: t }) => Some((
            Rule::ShiftZ,
            vec![
                Command::Z { qubit: qubit.clone(), signal: signal.shift_outcome(i, t) },
                first.clone(),
            ],
        )),
        (Command::P { qubit, angle, signal }, Command::S { qubit: i, signal: t }) => Some((
            Rule::ShiftZ,
            vec![
                Command::P {
                    qubit: qubit.clone(),
                    angle: *angle,
                    signal: signal.shift_outcome(i, t),
                },
                first.clone(),
            ],
        )),
        (Command::M { qubit, angle }, Command::S { qubit: i, signal: t }) => {
            let mut angle = angle.clone();
            angle.shift_outcome(i, t);
            Some((Rule::ShiftM, vec![Command::M { qubit: qubit.clone(), angle }, first.clone()]))
        }
        (Command::M2 { a, b, alpha, beta }, Command::S { qubit: i, signal: t }) => {
            let (mut alpha, mut beta) = (alpha.clone(), beta.clone());
            alpha.shift_outcome(i, t);
            beta.shift_outcome(i, t);
            Some((
                Rule::ShiftM,
                vec![Command::M2 { a: a.clone(), b: b.clone(), alpha, beta }, first.clone()],
            ))
        }
        (Command::S { qubit: j, signal: s }, Command::S { qubit: i, signal: t }) => {
            if allow_shift_swap {
                Some((
                    Rule::ShiftS,
                    vec![
                        Command::S { qubit: j.clone(), signal: s.shift_outcome(i, t) },
                        first.clone(),
                    ],
                ))
            } else {
                None
            }
        }

        // everything else is already in the right relative order
        _ => None,
    }
}

/// Apply one rewrite rule at position `at` if any matches there; returns the
/// rewritten pattern with the rule tag.
pub fn step(p: &Pattern, at: usize) -> Option<(Pattern, Rule)> {
    if at + 1 >= p.seq.len() {
        return None;
    }
    let (rule, repl) = match_at(&p.seq, at, true)?;
    let mut out = p.clone();
    out.seq.splice(at..at + 2, repl);
    Some((out, rule))
}

fn display_window(cmds: &[Command]) -> String {
    cmds.iter().rev().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

/// Move all preparation commands to the front, keeping their relative
/// order. By the definiteness conditions nothing before a qubit's `N` can
/// touch that qubit, so this is a sound bulk commutation.
fn hoist_preparations(seq: &mut Vec<Command>) {
    let (preps, rest): (Vec<_>, Vec<_>) = seq.drain(..).partition(|c| c.is_preparation());
    seq.extend(preps);
    seq.extend(rest);
}

fn drop_trailing_shifts(seq: &mut Vec<Command>) {
    while seq.last().is_some_and(|c| c.is_shift()) {
        seq.pop();
    }
}

/// Standardize with a deterministic leftmost strategy, optionally tracing
/// each applied rule.
fn standardize_impl(p: &Pattern, mut trace: Option<&mut Vec<String>>) -> Pattern {
    let mut out = p.clone();
    hoist_preparations(&mut out.seq);
    let mut k = 0;
    while k + 1 < out.seq.len() {
        // shift-shift swaps are excluded: coexisting shifts are all headed
        // for the end, where they are deleted
        if let Some((rule, repl)) = match_at(&out.seq, k, false) {
            if let Some(lines) = trace.as_deref_mut() {
                lines.push(format!(
                    "RULE {rule} @ {k} : {} => {}",
                    display_window(&out.seq[k..k + 2]),
                    display_window(&repl),
                ));
            }
            out.seq.splice(k..k + 2, repl);
            k = k.saturating_sub(1);
        } else {
            k += 1;
        }
    }
    drop_trailing_shifts(&mut out.seq);
    out
}

/// Rewrite a valid pattern to its unique NEMC standard form: preparations,
/// then entanglements, then measurements, then corrections. Idempotent, and
/// semantics-preserving branch by branch.
pub fn standardize(p: &Pattern) -> Result<Pattern, RewriteError> {
    let violations = p.validate();
    if !violations.is_empty() {
        return Err(RewriteError::NotValid(violations));
    }
    Ok(standardize_impl(p, None))
}

/// [`standardize`], also returning one trace line per applied rule.
pub fn standardize_trace(p: &Pattern) -> Result<(Pattern, Vec<String>), RewriteError> {
    let violations = p.validate();
    if !violations.is_empty() {
        return Err(RewriteError::NotValid(violations));
    }
    let mut lines = Vec::new();
    let out = standardize_impl(p, Some(&mut lines));
    Ok((out, lines))
}

/// Standardize applying matches in an order picked by `choose`: at each
/// step, `choose(n)` selects among the `n` currently applicable positions.
/// Used to exercise confluence; the result, after [`equiv_canonical`], is
/// independent of the choices.
pub fn standardize_with<F: FnMut(usize) -> usize>(
    p: &Pattern,
    mut choose: F,
) -> Result<Pattern, RewriteError> {
    let violations = p.validate();
    if !violations.is_empty() {
        return Err(RewriteError::NotValid(violations));
    }
    let mut out = p.clone();
    hoist_preparations(&mut out.seq);
    loop {
        let matches: Vec<usize> = (0..out.seq.len().saturating_sub(1))
            .filter(|&k| match_at(&out.seq, k, false).is_some())
            .collect();
        if matches.is_empty() {
            break;
        }
        let k = matches[choose(matches.len()) % matches.len()];
        let (_, repl) = match_at(&out.seq, k, false).expect("match just found");
        out.seq.splice(k..k + 2, repl);
    }
    drop_trailing_shifts(&mut out.seq);
    Ok(out)
}

/// Structural NEMC check: preparations, then entanglements, then
/// measurements, then corrections, with no shift commands.
pub fn is_standard(p: &Pattern) -> bool {
    let phase_of = |c: &Command| -> Option<u8> {
        if c.is_preparation() {
            Some(0)
        } else if c.is_entanglement() {
            Some(1)
        } else if c.is_measurement() {
            Some(2)
        } else if c.is_correction() {
            Some(3)
        } else {
            None // shift
        }
    };
    let mut current = 0;
    for c in &p.seq {
        match phase_of(c) {
            None => return false,
            Some(ph) if ph < current => return false,
            Some(ph) => current = ph,
        }
    }
    true
}

/// Eliminate the Z-actions of measurements in a standard pattern by signal
/// shifting: each π-trigger becomes a shift command that is propagated to
/// the end of the sequence (substituting into everything it passes) and then
/// dropped. The CPTP semantics is unchanged; branch labels permute.
pub fn shift_signals(p: &Pattern) -> Result<Pattern, RewriteError> {
    if !is_standard(p) {
        return Err(RewriteError::NotStandard);
    }
    let mut out = p.clone();
    let mut k = 0;
    while k < out.seq.len() {
        let shifts = split_measurement(&mut out.seq[k]);
        for (qubit, t) in shifts {
            for j in k + 1..out.seq.len() {
                out.seq[j] = substituted(&out.seq[j], &qubit, &t);
            }
        }
        k += 1;
    }
    Ok(out)
}

/// Remove the π-term of a measurement's angle expression(s), returning the
/// shifts `S_i^t` that the removal splits off.
fn split_measurement(cmd: &mut Command) -> Vec<(crate::qubit::QubitId, Signal)> {
    let take_pi = |angle: &mut crate::angle::DependentAngle| -> Signal {
        let t = angle.t_signal();
        if !t.is_zero() {
            angle
                .terms
                .retain(|term| !(term.coeff == crate::angle::Angle::PI && term.sign.is_zero()));
        }
        t
    };
    match cmd {
        Command::M { qubit, angle } => {
            let t = take_pi(angle);
            if t.is_zero() {
                vec![]
            } else {
                vec![(qubit.clone(), t)]
            }
        }
        Command::M2 { a, b, alpha, beta } => {
            let mut shifts = Vec::new();
            let u = take_pi(alpha);
            if !u.is_zero() {
                shifts.push((a.clone(), u));
            }
            let v = take_pi(beta);
            if !v.is_zero() {
                shifts.push((b.clone(), v));
            }
            shifts
        }
        _ => vec![],
    }
}

/// The effect of commuting a shift `S_i^t` past `cmd`: the command's
/// signals get the substitution `s_i ↦ t + s_i`.
fn substituted(cmd: &Command, i: &crate::qubit::QubitId, t: &Signal) -> Command {
    match cmd {
        Command::X { qubit, signal } => {
            Command::X { qubit: qubit.clone(), signal: signal.shift_outcome(i, t) }
        }
        Command::Z { qubit, signal } => {
            Command::Z { qubit: qubit.clone(), signal: signal.shift_outcome(i, t) }
        }
        Command::P { qubit, angle, signal } => {
            Command::P { qubit: qubit.clone(), angle: *angle, signal: signal.shift_outcome(i, t) }
        }
        Command::S { qubit, signal } => {
            Command::S { qubit: qubit.clone(), signal: signal.shift_outcome(i, t) }
        }
        Command::M { qubit, angle } => {
            let mut angle = angle.clone();
            angle.shift_outcome(i, t);
            Command::M { qubit: qubit.clone(), angle }
        }
        Command::M2 { a, b, alpha, beta } => {
            let (mut alpha, mut beta) = (alpha.clone(), beta.clone());
            alpha.shift_outcome(i, t);
            beta.shift_outcome(i, t);
            Command::M2 { a: a.clone(), b: b.clone(), alpha, beta }
        }
        other => other.clone(),
    }
}

/// Canonical representative of the pattern-equivalence class of a standard
/// pattern: preparations sorted by qubit, entanglements sorted by their
/// unordered pair, measurement angles in normal form, and the correction
/// block merged per qubit (duplicates added in Z2, identities dropped) and
/// ordered so that X precedes Z on each qubit in display order. Two standard
/// patterns are equivalent iff their canonical forms are identical.
pub fn equiv_canonical(p: &Pattern) -> Result<Pattern, RewriteError> {
    if !is_standard(p) {
        return Err(RewriteError::NotStandard);
    }
    let mut preps = Vec::new();
    let mut entangles = Vec::new();
    let mut measures = Vec::new();
    let mut corrections = Vec::new();
    for cmd in &p.seq {
        if cmd.is_preparation() {
            preps.push(cmd.clone());
        } else if cmd.is_entanglement() {
            entangles.push(cmd.clone());
        } else if cmd.is_measurement() {
            let mut cmd = cmd.clone();
            match &mut cmd {
                Command::M { angle, .. } => angle.canonicalize(),
                Command::M2 { alpha, beta, .. } => {
                    alpha.canonicalize();
                    beta.canonicalize();
                }
                _ => unreachable!(),
            }
            measures.push(cmd);
        } else {
            corrections.push(cmd.clone());
        }
    }
    preps.sort_by_key(|c| match c {
        Command::N { qubit, .. } => qubit.clone(),
        _ => unreachable!(),
    });
    entangles.sort_by_key(|c| match c {
        Command::E { a, b } => (a.min(b).clone(), a.max(b).clone()),
        _ => unreachable!(),
    });

    // merge duplicate X and Z corrections per qubit; phase corrections are
    // not involutive and only get a deterministic order
    let mut x_merged: std::collections::BTreeMap<crate::qubit::QubitId, Signal> =
        Default::default();
    let mut z_merged: std::collections::BTreeMap<crate::qubit::QubitId, Signal> =
        Default::default();
    let mut phases = Vec::new();
    for c in corrections {
        match c {
            Command::X { qubit, signal } => x_merged.entry(qubit).or_default().add_assign(&signal),
            Command::Z { qubit, signal } => z_merged.entry(qubit).or_default().add_assign(&signal),
            p @ Command::P { .. } => phases.push(p),
            _ => unreachable!("correction block"),
        }
    }
    phases.sort_by_key(|c| match c {
        Command::P { qubit, angle, signal } => (qubit.clone(), angle.to_string(), signal.clone()),
        _ => unreachable!(),
    });
    let mut tail: Vec<Command> = Vec::new();
    let qubits: std::collections::BTreeSet<_> =
        x_merged.keys().chain(z_merged.keys()).cloned().collect();
    for qubit in qubits {
        // Z first in execution order puts X first in display order
        if let Some(sig) = z_merged.remove(&qubit) {
            if !sig.is_zero() {
                tail.push(Command::Z { qubit: qubit.clone(), signal: sig });
            }
        }
        if let Some(sig) = x_merged.remove(&qubit) {
            if !sig.is_zero() {
                tail.push(Command::X { qubit, signal: sig });
            }
        }
    }
    tail.extend(phases);

    let mut seq = preps;
    seq.extend(entangles);
    seq.extend(measures);
    seq.extend(tail);
    Ok(Pattern {
        space: p.space.clone(),
        inputs: p.inputs.clone(),
        outputs: p.outputs.clone(),
        seq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::{Angle, DependentAngle};
    use crate::command::Command;
    use crate::qubit::q;
    use crate::zoo::{self, j_pattern};

    fn display(p: &Pattern) -> String {
        p.display_seq().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn ex_rule_creates_z() {
        // display E(1,2) X(1;s9) => X(1;s9) Z(2;s9) E(1,2)
        let p = Pattern::new(
            [q("1"), q("2"), q("9")],
            [q("1"), q("2"), q("9")],
            [q("1"), q("2")],
            vec![
                Command::M { qubit: q("9"), angle: DependentAngle::constant(Angle::ZERO) },
                Command::X { qubit: q("1"), signal: Signal::outcome(q("9")) },
                Command::E { a: q("1"), b: q("2") },
            ],
        );
        let (next, rule) = step(&p, 1).expect("rule applies");
        assert_eq!(rule, Rule::Ex);
        assert_eq!(display(&next), "X(1;s9) Z(2;s9) E(1,2) M(9;0)");
    }

    #[test]
    fn mx_on_x_basis_drops_dependency() {
        // display M(1;0) X(1;s9) => M(1;0)
        let p = Pattern::new(
            [q("1"), q("9")],
            [q("1"), q("9")],
            [],
            vec![
                Command::M { qubit: q("9"), angle: DependentAngle::constant(Angle::ZERO) },
                Command::X { qubit: q("1"), signal: Signal::outcome(q("9")) },
                Command::M { qubit: q("1"), angle: DependentAngle::constant(Angle::ZERO) },
            ],
        );
        let (next, rule) = step(&p, 1).expect("rule applies");
        assert_eq!(rule, Rule::Mx);
        match &next.seq[1] {
            Command::M { angle, .. } => assert!(angle.is_independent()),
            other => panic!("expected measurement, got {other}"),
        }
    }

    #[test]
    fn ee_commutation_is_forbidden() {
        let p = Pattern::new(
            [q("1"), q("2"), q("3")],
            [q("1"), q("2"), q("3")],
            [q("1"), q("2"), q("3")],
            vec![
                Command::E { a: q("1"), b: q("2") },
                Command::E { a: q("2"), b: q("3") },
            ],
        );
        assert!(step(&p, 0).is_none());
    }

    #[test]
    fn measure_worked_examples() {
        // display E X Z E, execution [E, Z, X, E]: m = (1,4,3)
        let exze = Pattern::new(
            [q("1"), q("2"), q("3"), q("4")],
            [q("1"), q("2"), q("3"), q("4")],
            [q("1"), q("2"), q("3"), q("4")],
            vec![
                Command::E { a: q("1"), b: q("2") },
                Command::Z { qubit: q("3"), signal: Signal::one() },
                Command::X { qubit: q("4"), signal: Signal::one() },
                Command::E { a: q("3"), b: q("4") },
            ],
        );
        let m = measure_of(&exze);
        assert_eq!(m.entangle_depths, vec![1, 4]);
        assert_eq!(m.correction_depth, 3);

        // display E E X, execution [X, E, E]: m = (2,3,2)
        let eex = Pattern::new(
            [q("1"), q("3"), q("4")],
            [q("1"), q("3"), q("4")],
            [q("1"), q("3"), q("4")],
            vec![
                Command::X { qubit: q("1"), signal: Signal::one() },
                Command::E { a: q("1"), b: q("3") },
                Command::E { a: q("3"), b: q("4") },
            ],
        );
        let m = measure_of(&eex);
        assert_eq!(m.entangle_depths, vec![2, 3]);
        assert_eq!(m.correction_depth, 2);

        // no entanglements, no corrections
        let bare = Pattern::new([q("1")], [q("1")], [], vec![Command::M {
            qubit: q("1"),
            angle: DependentAngle::constant(Angle::ZERO),
        }]);
        let m = measure_of(&bare);
        assert!(m.entangle_depths.is_empty());
        assert_eq!(m.correction_depth, 0);
    }

    #[test]
    fn eex_step_moves_measure_down() {
        // the rewrite EEX => EXZE takes (2,3,2) to (1,4,3)
        let eex = Pattern::new(
            [q("1"), q("3"), q("4")],
            [q("1"), q("3"), q("4")],
            [q("1"), q("3"), q("4")],
            vec![
                Command::X { qubit: q("1"), signal: Signal::one() },
                Command::E { a: q("1"), b: q("3") },
                Command::E { a: q("3"), b: q("4") },
            ],
        );
        let before = measure_of(&eex);
        let (next, rule) = step(&eex, 0).expect("EX applies");
        assert_eq!(rule, Rule::Ex);
        let after = measure_of(&next);
        assert_eq!(after.entangle_depths, vec![1, 4]);
        assert_eq!(after.correction_depth, 3);
        assert!(after < before);
    }

    #[test]
    fn standardize_teleport_chain() {
        let alpha = Angle::exact(1, 4);
        let beta = Angle::exact(1, 3);
        let composite = j_pattern(beta, q("2"), q("3"))
            .compose(&j_pattern(alpha, q("1"), q("2")))
            .unwrap();
        let std = standardize(&composite).unwrap();
        let canon = equiv_canonical(&std).unwrap();
        assert_eq!(
            display(&canon),
            "X(3;s2) Z(3;s1) M(2;-pi/3;s=s1) M(1;-pi/4) E(2,3) E(1,2)"
        );
        // idempotence
        assert_eq!(standardize(&std).unwrap(), std);
        assert_eq!(equiv_canonical(&canon).unwrap(), canon);
        assert!(is_standard(&std));
    }

    #[test]
    fn standardize_cnot() {
        let (cnot, _) = zoo::make(&zoo::Family::Cnot).unwrap();
        let canon = equiv_canonical(&standardize(&cnot).unwrap()).unwrap();
        assert_eq!(
            display(&canon),
            "X(4;s3) Z(4;s2) Z(1;s2) M(3;0) M(2;0) E(3,4) E(2,3) E(1,3)"
        );
    }

    #[test]
    fn standardize_then_shift_five_qubit_z_rotation() {
        // H(4,5) ∘ Rx(α)(2,3,4) ∘ H(1,2)
        let alpha = Angle::exact(1, 5);
        let h12 = j_pattern(Angle::ZERO, q("1"), q("2"));
        let (rx, _) = zoo::make(&zoo::Family::Rx(alpha)).unwrap();
        let rx234 =
            rx.rename(&[(q("1"), q("2")), (q("2"), q("3")), (q("3"), q("4"))].into()).unwrap();
        let h45 = j_pattern(Angle::ZERO, q("4"), q("5"));
        let composite = h45.compose(&rx234.compose(&h12).unwrap()).unwrap();

        let std = standardize(&composite).unwrap();
        let canon = equiv_canonical(&std).unwrap();
        assert_eq!(
            display(&canon),
            "X(5;s4) Z(5;s3) M(4;0;t=s2) M(3;-pi/5;s=s2;t=s1) M(2;0) M(1;0) E(4,5) E(3,4) E(2,3) E(1,2)"
        );

        let shifted = equiv_canonical(&shift_signals(&std).unwrap()).unwrap();
        assert_eq!(
            display(&shifted),
            "X(5;s2+s4) Z(5;s1+s3) M(4;0) M(3;-pi/5;s=s2) M(2;0) M(1;0) E(4,5) E(3,4) E(2,3) E(1,2)"
        );
    }

    #[test]
    fn shift_ghz_makes_measurements_independent() {
        let (ghz, _) = zoo::make(&zoo::Family::Ghz(4)).unwrap();
        let shifted = shift_signals(&standardize(&ghz).unwrap()).unwrap();
        for cmd in &shifted.seq {
            if let Command::M { angle, .. } = cmd {
                assert!(angle.is_independent(), "{cmd}");
            }
        }
        let canon = equiv_canonical(&shifted).unwrap();
        assert_eq!(
            display(&canon),
            "X(4';s2+s3+s4) X(3';s2+s3) X(2';s2) M(4;0) M(3;0) M(2;0) E(4,4') E(3',4) E(3,3') E(2',3) E(2,2') E(1,2)"
        );
    }

    #[test]
    fn already_shifted_pattern_is_unchanged() {
        let (tele, _) = zoo::make(&zoo::Family::Teleport).unwrap();
        let std = standardize(&tele).unwrap();
        let shifted = shift_signals(&std).unwrap();
        assert_eq!(shifted, std); // all t-signals are zero after mx absorption
    }

    #[test]
    fn canonical_resolves_correction_order() {
        // execution [E(1,2), X(1;s9), X(2;s8)] standardized from either
        // correction order reaches one canonical form, despite the
        // asymmetric Z creation of the EX rule
        let base = |swap: bool| {
            let mut seq = vec![
                Command::M { qubit: q("9"), angle: DependentAngle::constant(Angle::ZERO) },
                Command::M { qubit: q("8"), angle: DependentAngle::constant(Angle::ZERO) },
            ];
            let x1 = Command::X { qubit: q("1"), signal: Signal::outcome(q("9")) };
            let x2 = Command::X { qubit: q("2"), signal: Signal::outcome(q("8")) };
            if swap {
                seq.push(x2.clone());
                seq.push(x1.clone());
            } else {
                seq.push(x1.clone());
                seq.push(x2.clone());
            }
            seq.push(Command::E { a: q("1"), b: q("2") });
            Pattern::new(
                [q("1"), q("2"), q("8"), q("9")],
                [q("1"), q("2"), q("8"), q("9")],
                [q("1"), q("2")],
                seq,
            )
        };
        let a = equiv_canonical(&standardize(&base(false)).unwrap()).unwrap();
        let b = equiv_canonical(&standardize(&base(true)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn canonical_orders_and_merges_corrections() {
        // Z then X on the same qubit displays as X before Z; duplicate
        // corrections merge and identities drop
        let p = Pattern::new(
            [q("1"), q("9")],
            [q("1"), q("9")],
            [q("1")],
            vec![
                Command::M { qubit: q("9"), angle: DependentAngle::constant(Angle::ZERO) },
                Command::X { qubit: q("1"), signal: Signal::outcome(q("9")) },
                Command::Z { qubit: q("1"), signal: Signal::outcome(q("9")) },
                Command::X { qubit: q("1"), signal: Signal::one() },
                Command::X { qubit: q("1"), signal: Signal::one() },
            ],
        );
        let canon = equiv_canonical(&p).unwrap();
        assert_eq!(display(&canon), "X(1;s9) Z(1;s9) M(9;0)");
    }

    #[test]
    fn trace_reports_rules() {
        let composite = j_pattern(Angle::ZERO, q("2"), q("3"))
            .compose(&j_pattern(Angle::ZERO, q("1"), q("2")))
            .unwrap();
        let (_, lines) = standardize_trace(&composite).unwrap();
        assert!(lines.iter().any(|l| l.starts_with("RULE EX @ ")));
        assert!(lines.iter().any(|l| l.contains(" => ")));
    }

    #[test]
    fn standardize_rejects_invalid() {
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
        assert!(matches!(standardize(&p), Err(RewriteError::NotValid(_))));
    }
}
