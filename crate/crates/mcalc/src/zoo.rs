//! Constructors for the standard pattern families, each paired with the
//! unitary (or target state) it is supposed to realize, for oracle testing.

use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

use crate::angle::{Angle, DependentAngle};
use crate::command::Command;
use crate::linalg::{self, CMat, CVec};
use crate::pattern::Pattern;
use crate::qubit::{q, QubitId};
use crate::signal::Signal;

/// A pattern family, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// The generator `J(α)`; `J(0)` is Hadamard.
    J(Angle),
    /// Controlled-Z on two qubits that are both inputs and outputs.
    Cz,
    /// Hadamard (`J(0)`).
    H,
    /// X-rotation by α (3 qubits).
    Rx(Angle),
    /// Z-rotation by α (3 qubits).
    Rz(Angle),
    /// Phase gate `diag(1, e^{iα})`; same pattern as `Rz`, different
    /// reference.
    Phase(Angle),
    /// General rotation from the J-decomposition `J(0)J(-α)J(-β)J(-γ)`
    /// (5 qubits).
    Rot(Angle, Angle, Angle),
    /// Controlled-X on 4 qubits with overlapping input/output on the
    /// control.
    Cnot,
    /// The identity by double teleportation, `J(0)∘J(0)`.
    Teleport,
    /// Preparation of the n-qubit GHZ state `(|0…0> + |1…1>)/√2`.
    Ghz(usize),
    /// Controlled-U for `U` given by the four J-decomposition angles
    /// `(α, β, γ, δ)`; 14 qubits.
    Cu(Angle, Angle, Angle, Angle),
}

/// What a family is checked against.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// The pattern realizes this unitary (up to a global phase).
    Unitary(CMat),
    /// The pattern prepares this state from no inputs (up to a global
    /// phase).
    State(CVec),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZooError {
    #[error("GHZ needs at least 2 qubits, got {0}")]
    GhzTooSmall(usize),
}

/// The `J(α)` pattern `X_out^{s_in} M_in^{-α} E(in,out)` on a chosen pair of
/// qubits.
pub fn j_pattern(alpha: Angle, input: QubitId, output: QubitId) -> Pattern {
    Pattern::new(
        [input.clone(), output.clone()],
        [input.clone()],
        [output.clone()],
        vec![
            Command::E { a: input.clone(), b: output.clone() },
            Command::M { qubit: input.clone(), angle: DependentAngle::constant(alpha.neg()) },
            Command::X { qubit: output, signal: Signal::outcome(input) },
        ],
    )
}

/// Build a family's pattern and its reference.
pub fn make(family: &Family) -> Result<(Pattern, Reference), ZooError> {
    Ok(match family {
        Family::J(alpha) => (
            j_pattern(*alpha, q("1"), q("2")),
            Reference::Unitary(linalg::j_matrix(alpha.radians())),
        ),
        Family::H => (
            j_pattern(Angle::ZERO, q("1"), q("2")),
            Reference::Unitary(linalg::hadamard()),
        ),
        Family::Cz => {
            let p = Pattern::new(
                [q("1"), q("2")],
                [q("1"), q("2")],
                [q("1"), q("2")],
                vec![Command::E { a: q("1"), b: q("2") }],
            );
            (p, Reference::Unitary(linalg::cz_matrix()))
        }
        Family::Rx(alpha) => (rx_pattern(*alpha), Reference::Unitary(linalg::rx_matrix(alpha.radians()))),
        Family::Rz(alpha) => (rz_pattern(*alpha), Reference::Unitary(linalg::rz_matrix(alpha.radians()))),
        Family::Phase(alpha) => {
            (rz_pattern(*alpha), Reference::Unitary(linalg::phase_matrix(alpha.radians())))
        }
        Family::Rot(alpha, beta, gamma) => {
            let chain = [gamma.neg(), beta.neg(), alpha.neg(), Angle::ZERO];
            let mut pattern: Option<Pattern> = None;
            for (k, theta) in chain.iter().enumerate() {
                let step = j_pattern(*theta, num_qubit(k + 1), num_qubit(k + 2));
                pattern = Some(match pattern {
                    None => step,
                    Some(p) => step.compose(&p).expect("chain interfaces line up"),
                });
            }
            let u = linalg::j_matrix(0.0)
                * linalg::j_matrix(-alpha.radians())
                * linalg::j_matrix(-beta.radians())
                * linalg::j_matrix(-gamma.radians());
            (pattern.unwrap(), Reference::Unitary(u))
        }
        Family::Cnot => (cnot_pattern(), Reference::Unitary(linalg::cnot_matrix())),
        Family::Teleport => {
            let first = j_pattern(Angle::ZERO, q("1"), q("2"));
            let second = j_pattern(Angle::ZERO, q("2"), q("3"));
            (
                second.compose(&first).expect("teleport chain composes"),
                Reference::Unitary(linalg::identity(2)),
            )
        }
        Family::Ghz(n) => {
            if *n < 2 {
                return Err(ZooError::GhzTooSmall(*n));
            }
            (ghz_pattern(*n), Reference::State(ghz_state(*n)))
        }
        Family::Cu(alpha, beta, gamma, delta) => (
            cu_pattern(*alpha, *beta, *gamma, *delta),
            Reference::Unitary(cu_reference(
                alpha.radians(),
                beta.radians(),
                gamma.radians(),
                delta.radians(),
            )),
        ),
    })
}

fn num_qubit(k: usize) -> QubitId {
    q(&k.to_string())
}

/// The 3-qubit x-rotation `X3^{s2} Z3^{s1} [M2^{-α}]^{s1} M1^0 E23 E12`.
fn rx_pattern(alpha: Angle) -> Pattern {
    Pattern::new(
        [q("1"), q("2"), q("3")],
        [q("1")],
        [q("3")],
        vec![
            Command::E { a: q("1"), b: q("2") },
            Command::E { a: q("2"), b: q("3") },
            Command::M { qubit: q("1"), angle: DependentAngle::constant(Angle::ZERO) },
            Command::M {
                qubit: q("2"),
                angle: DependentAngle::plain(alpha.neg(), Signal::outcome(q("1")), Signal::zero()),
            },
            Command::Z { qubit: q("3"), signal: Signal::outcome(q("1")) },
            Command::X { qubit: q("3"), signal: Signal::outcome(q("2")) },
        ],
    )
}

/// The 3-qubit z-rotation `X3^{s2} Z3^{s1} M2^0 M1^{-α} E12 E23`.
fn rz_pattern(alpha: Angle) -> Pattern {
    Pattern::new(
        [q("1"), q("2"), q("3")],
        [q("1")],
        [q("3")],
        vec![
            Command::E { a: q("1"), b: q("2") },
            Command::E { a: q("2"), b: q("3") },
            Command::M { qubit: q("1"), angle: DependentAngle::constant(alpha.neg()) },
            Command::M { qubit: q("2"), angle: DependentAngle::constant(Angle::ZERO) },
            Command::Z { qubit: q("3"), signal: Signal::outcome(q("1")) },
            Command::X { qubit: q("3"), signal: Signal::outcome(q("2")) },
        ],
    )
}

/// Controlled-X from `(I ⊗ H)·CZ·(I ⊗ H)` with the control shared between
/// input and output.
fn cnot_pattern() -> Pattern {
    let ident = Pattern::identity(q("1"));
    let h23 = j_pattern(Angle::ZERO, q("2"), q("3"));
    let h34 = j_pattern(Angle::ZERO, q("3"), q("4"));
    let cz13 = Pattern::new(
        [q("1"), q("3")],
        [q("1"), q("3")],
        [q("1"), q("3")],
        vec![Command::E { a: q("1"), b: q("3") }],
    );
    let stage1 = ident.tensor(&h23).expect("disjoint");
    let stage3 = ident.tensor(&h34).expect("disjoint");
    stage3
        .compose(&cz13.compose(&stage1).expect("interface"))
        .expect("interface")
}

/// The GHZ(n) preparation chain over qubits `1, 2, 2', …, n, n'` with
/// outputs `1, 2', …, n'`.
fn ghz_pattern(n: usize) -> Pattern {
    let mut seq = Vec::new();
    let mut outputs = vec![q("1")];
    for k in 2..=n {
        let cur = num_qubit(k);
        let cur_p = q(&format!("{k}'"));
        let prev = if k == 2 { q("1") } else { q(&format!("{}'", k - 1)) };
        seq.push(Command::E { a: prev, b: cur.clone() });
        seq.push(Command::E { a: cur.clone(), b: cur_p.clone() });
        seq.push(Command::M { qubit: cur.clone(), angle: DependentAngle::constant(Angle::ZERO) });
        seq.push(Command::X { qubit: cur_p.clone(), signal: Signal::outcome(cur) });
        outputs.push(cur_p);
    }
    Pattern::new([], [], outputs, seq)
}

fn ghz_state(n: usize) -> CVec {
    let dim = 1usize << n;
    let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[0] = a;
    v[dim - 1] = a;
    v
}

/// Unreduced multiple-of-π arithmetic. Halving does not commute with
/// reduction modulo 2π, so the controlled-U angles are computed on raw
/// fractions and reduced only at the end.
#[derive(Clone, Copy)]
enum RawAngle {
    Ex(i64, i64),
    Fl(f64),
}

impl RawAngle {
    fn from(a: Angle) -> RawAngle {
        match a {
            Angle::Exact { num, den } => RawAngle::Ex(num, den),
            Angle::Float(r) => RawAngle::Fl(r),
        }
    }

    fn pi() -> RawAngle {
        RawAngle::Ex(1, 1)
    }

    fn add(self, o: RawAngle) -> RawAngle {
        match (self, o) {
            (RawAngle::Ex(n1, d1), RawAngle::Ex(n2, d2)) => RawAngle::Ex(n1 * d2 + n2 * d1, d1 * d2),
            _ => RawAngle::Fl(self.radians() + o.radians()),
        }
    }

    fn neg(self) -> RawAngle {
        match self {
            RawAngle::Ex(n, d) => RawAngle::Ex(-n, d),
            RawAngle::Fl(r) => RawAngle::Fl(-r),
        }
    }

    fn half(self) -> RawAngle {
        match self {
            RawAngle::Ex(n, d) => RawAngle::Ex(n, 2 * d),
            RawAngle::Fl(r) => RawAngle::Fl(r / 2.0),
        }
    }

    fn radians(self) -> f64 {
        match self {
            RawAngle::Ex(n, d) => n as f64 * std::f64::consts::PI / d as f64,
            RawAngle::Fl(r) => r,
        }
    }

    fn reduce(self) -> Angle {
        match self {
            RawAngle::Ex(n, d) => Angle::exact(n, d),
            RawAngle::Fl(r) => Angle::float(r),
        }
    }
}

/// The controlled-U pattern from the J-decomposition, over the target chain
/// `a…k` and the control chain `A,B,C`, with `α' = α + (β+γ+δ)/2`.
fn cu_pattern(alpha: Angle, beta: Angle, gamma: Angle, delta: Angle) -> Pattern {
    let (a, b, g, d) = (
        RawAngle::from(alpha),
        RawAngle::from(beta),
        RawAngle::from(gamma),
        RawAngle::from(delta),
    );
    let pi = RawAngle::pi();
    let alpha_p = a.add(b.add(g).add(d).half()).reduce();
    // measurement angles along the target chain, in execution order
    let m_a = b.add(d.neg()).add(pi).half().reduce();
    let m_c = pi.add(d).add(b).half().reduce();
    let m_d = g.neg().half().reduce();
    let m_e = Angle::exact(-1, 2);
    let m_g = Angle::exact(1, 2);
    let m_h = g.half().reduce();
    let m_i = b.add(pi).neg().reduce();

    let chain = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k"];
    let meas = [m_a, Angle::ZERO, m_c, m_d, m_e, Angle::ZERO, m_g, m_h, m_i, Angle::ZERO];

    let mut seq = Vec::new();
    for (k, angle) in meas.iter().enumerate() {
        let cur = q(chain[k]);
        let next = q(chain[k + 1]);
        seq.push(Command::E { a: cur.clone(), b: next.clone() });
        seq.push(Command::M { qubit: cur.clone(), angle: DependentAngle::constant(*angle) });
        seq.push(Command::X { qubit: next, signal: Signal::outcome(cur) });
        if k == 0 {
            seq.push(Command::E { a: q("A"), b: q("b") });
        }
        if k == 4 {
            seq.push(Command::E { a: q("A"), b: q("f") });
        }
    }
    for (cur, next, angle) in [("A", "B", alpha_p.neg()), ("B", "C", Angle::ZERO)] {
        seq.push(Command::E { a: q(cur), b: q(next) });
        seq.push(Command::M { qubit: q(cur), angle: DependentAngle::constant(angle) });
        seq.push(Command::X { qubit: q(next), signal: Signal::outcome(q(cur)) });
    }
    Pattern::new([], [q("A"), q("a")], [q("C"), q("k")], seq)
}

/// The 4×4 operator realized by the controlled-U decomposition, composed
/// numerically. Control is the most significant qubit.
fn cu_reference(alpha: f64, beta: f64, gamma: f64, delta: f64) -> CMat {
    let alpha_p = alpha + (beta + gamma + delta) / 2.0;
    let j1 = |t: f64| linalg::kron(&linalg::j_matrix(t), &linalg::identity(2));
    let j2 = |t: f64| linalg::kron(&linalg::identity(2), &linalg::j_matrix(t));
    let cz = {
        let mut m = linalg::identity(4);
        m[(3, 3)] = Complex64::new(-1.0, 0.0);
        m
    };
    // application order: rightmost factor acts first
    j1(0.0)
        * j1(alpha_p)
        * j2(0.0)
        * j2(beta + std::f64::consts::PI)
        * j2(-gamma / 2.0)
        * j2(-std::f64::consts::FRAC_PI_2)
        * j2(0.0)
        * cz.clone()
        * j2(std::f64::consts::FRAC_PI_2)
        * j2(gamma / 2.0)
        * j2((-std::f64::consts::PI - delta - beta) / 2.0)
        * j2(0.0)
        * cz
        * j2((-beta + delta - std::f64::consts::PI) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_validate() {
        let families = [
            Family::J(Angle::exact(1, 4)),
            Family::Cz,
            Family::H,
            Family::Rx(Angle::exact(1, 3)),
            Family::Rz(Angle::exact(1, 3)),
            Family::Phase(Angle::exact(1, 2)),
            Family::Rot(Angle::exact(1, 4), Angle::exact(1, 3), Angle::exact(1, 5)),
            Family::Cnot,
            Family::Teleport,
            Family::Ghz(4),
            Family::Cu(
                Angle::exact(1, 4),
                Angle::exact(1, 3),
                Angle::exact(1, 5),
                Angle::exact(1, 7),
            ),
        ];
        for f in &families {
            let (p, _) = make(f).unwrap();
            assert_eq!(p.validate(), vec![], "{f:?}");
        }
    }

    #[test]
    fn ghz_needs_two() {
        assert!(make(&Family::Ghz(1)).is_err());
    }

    #[test]
    fn cnot_interfaces_overlap_on_control() {
        let (p, _) = make(&Family::Cnot).unwrap();
        assert_eq!(p.inputs, vec![q("1"), q("2")]);
        assert_eq!(p.outputs, vec![q("1"), q("4")]);
        assert_eq!(p.space.len(), 4);
    }

    #[test]
    fn cu_size() {
        let (p, _) = make(&Family::Cu(
            Angle::exact(1, 4),
            Angle::exact(1, 3),
            Angle::exact(1, 5),
            Angle::exact(1, 7),
        ))
        .unwrap();
        assert_eq!(p.space.len(), 14);
        assert_eq!(p.outcome_count(), 12);
    }

    #[test]
    fn cu_reference_is_block_controlled() {
        // the decomposition must produce a unitary that, up to phase, is
        // controlled: |0><0| ⊗ I + |1><1| ⊗ U
        let m = cu_reference(0.3, 0.7, 1.1, 1.9);
        assert!(linalg::isometry_defect(&m) < 1e-9);
        // off-diagonal control blocks vanish
        for r in 0..2 {
            for c_ in 2..4 {
                assert!(m[(r, c_)].norm() < 1e-9);
                assert!(m[(c_, r)].norm() < 1e-9);
            }
        }
        // upper-left block is the identity up to phase
        let block = m.view((0, 0), (2, 2)).clone_owned();
        assert!(linalg::equal_up_to_phase(&block, &linalg::identity(2), 1e-9));
    }
}
