use std::fmt;

use crate::angle::{Angle, DependentAngle};
use crate::qubit::QubitId;
use crate::signal::Signal;

/// One command of a measurement pattern.
///
/// The variants follow the standard command names of the one-way model and
/// its extensions: preparations `N`, entanglements `E` (controlled-Z),
/// measurements `M`, Pauli corrections `X`/`Z`, signal shifts `S`, phase
/// corrections `P`, and two-qubit graph-basis measurements `M2`.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    /// Prepare qubit `i` in `|+_angle>`; the plain model uses angle 0.
    N { qubit: QubitId, angle: Angle },
    /// Entangle `a` and `b` with controlled-Z. The pair is ordered as
    /// syntax: `E(a,b)` and `E(b,a)` are distinct commands (the rewrite
    /// system never flips them) even though the operator is symmetric.
    E { a: QubitId, b: QubitId },
    /// Destructive measurement of `qubit` in the `|±_angle>` basis.
    M { qubit: QubitId, angle: DependentAngle },
    /// Pauli X correction, applied when `signal` evaluates to 1.
    X { qubit: QubitId, signal: Signal },
    /// Pauli Z correction, applied when `signal` evaluates to 1.
    Z { qubit: QubitId, signal: Signal },
    /// Signal shift: adds `signal` to the recorded outcome of `qubit`.
    S { qubit: QubitId, signal: Signal },
    /// Phase correction `diag(1, e^{i·angle})`, applied when `signal` is 1.
    P { qubit: QubitId, angle: Angle, signal: Signal },
    /// Two-qubit measurement in the graph basis
    /// `CZ(|±_alpha> ⊗ |±_beta>)`; consumes both qubits.
    M2 {
        a: QubitId,
        b: QubitId,
        alpha: DependentAngle,
        beta: DependentAngle,
    },
}

impl Command {
    /// The qubits whose quantum state the command touches. Signal shifts
    /// touch none: they act on the classical outcome record only.
    pub fn quantum_qubits(&self) -> Vec<&QubitId> {
        match self {
            Command::N { qubit, .. }
            | Command::M { qubit, .. }
            | Command::X { qubit, .. }
            | Command::Z { qubit, .. }
            | Command::P { qubit, .. } => vec![qubit],
            Command::E { a, b } | Command::M2 { a, b, .. } => vec![a, b],
            Command::S { .. } => vec![],
        }
    }

    /// All qubits the command mentions, including the shift target.
    pub fn touched_qubits(&self) -> Vec<&QubitId> {
        match self {
            Command::S { qubit, .. } => vec![qubit],
            other => other.quantum_qubits(),
        }
    }

    /// The signals the command reads (its classical dependencies).
    pub fn signals(&self) -> Vec<&Signal> {
        match self {
            Command::N { .. } | Command::E { .. } => vec![],
            Command::M { angle, .. } => angle.signals(),
            Command::X { signal, .. }
            | Command::Z { signal, .. }
            | Command::S { signal, .. }
            | Command::P { signal, .. } => vec![signal],
            Command::M2 { alpha, beta, .. } => {
                let mut v = alpha.signals();
                v.extend(beta.signals());
                v
            }
        }
    }

    /// The qubits measured by this command, if any.
    pub fn measured_qubits(&self) -> Vec<&QubitId> {
        match self {
            Command::M { qubit, .. } => vec![qubit],
            Command::M2 { a, b, .. } => vec![a, b],
            _ => vec![],
        }
    }

    pub fn is_entanglement(&self) -> bool {
        matches!(self, Command::E { .. })
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Command::M { .. } | Command::M2 { .. })
    }

    /// Pauli and phase corrections; these are the commands the free
    /// commutation rules treat as corrections.
    pub fn is_correction(&self) -> bool {
        matches!(self, Command::X { .. } | Command::Z { .. } | Command::P { .. })
    }

    pub fn is_preparation(&self) -> bool {
        matches!(self, Command::N { .. })
    }

    pub fn is_shift(&self) -> bool {
        matches!(self, Command::S { .. })
    }

    pub fn rename(&self, f: &impl Fn(&QubitId) -> QubitId) -> Command {
        match self {
            Command::N { qubit, angle } => Command::N { qubit: f(qubit), angle: *angle },
            Command::E { a, b } => Command::E { a: f(a), b: f(b) },
            Command::M { qubit, angle } => Command::M { qubit: f(qubit), angle: angle.rename(f) },
            Command::X { qubit, signal } => {
                Command::X { qubit: f(qubit), signal: signal.rename(f) }
            }
            Command::Z { qubit, signal } => {
                Command::Z { qubit: f(qubit), signal: signal.rename(f) }
            }
            Command::S { qubit, signal } => {
                Command::S { qubit: f(qubit), signal: signal.rename(f) }
            }
            Command::P { qubit, angle, signal } => Command::P {
                qubit: f(qubit),
                angle: *angle,
                signal: signal.rename(f),
            },
            Command::M2 { a, b, alpha, beta } => Command::M2 {
                a: f(a),
                b: f(b),
                alpha: alpha.rename(f),
                beta: beta.rename(f),
            },
        }
    }
}

impl fmt::Display for Command {
    /// The single-token text form used in `.mc` files, e.g. `X(2;s1)`,
    /// `M(1;-pi/2;s=s1;t=s2+1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::N { qubit, angle } => {
                if angle.is_zero() && angle.is_exact() {
                    write!(f, "N({qubit})")
                } else {
                    write!(f, "N({qubit};{angle})")
                }
            }
            Command::E { a, b } => write!(f, "E({a},{b})"),
            Command::M { qubit, angle } => {
                write!(f, "M({qubit};{}", angle.base)?;
                write_dependent_suffix(f, angle)?;
                f.write_str(")")
            }
            Command::X { qubit, signal } => write!(f, "X({qubit};{signal})"),
            Command::Z { qubit, signal } => write!(f, "Z({qubit};{signal})"),
            Command::S { qubit, signal } => write!(f, "S({qubit};{signal})"),
            Command::P { qubit, angle, signal } => write!(f, "P({qubit};{angle};{signal})"),
            Command::M2 { a, b, alpha, beta } => {
                write!(f, "M2({a},{b};{},{}", alpha.base, beta.base)?;
                let (s, u) = (alpha.s_signal().clone(), alpha.t_signal());
                let (t, v) = (beta.s_signal().clone(), beta.t_signal());
                if !(s.is_zero() && t.is_zero() && u.is_zero() && v.is_zero()) {
                    write!(f, ";s={s};t={t};u={u};v={v}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn write_dependent_suffix(f: &mut fmt::Formatter<'_>, angle: &DependentAngle) -> fmt::Result {
    if !angle.sign.is_zero() {
        write!(f, ";s={}", angle.sign)?;
    }
    let t = angle.t_signal();
    if !t.is_zero() {
        write!(f, ";t={t}")?;
    }
    for term in &angle.terms {
        if term.coeff == Angle::PI && term.sign.is_zero() {
            continue; // already printed as t=
        }
        write!(f, ";p={},{}", term.coeff, term.trigger)?;
        if !term.sign.is_zero() {
            write!(f, ",{}", term.sign)?;
        }
    }
    Ok(())
}
