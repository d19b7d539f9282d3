use std::f64::consts::PI;
use std::fmt;

use crate::qubit::QubitId;
use crate::signal::Signal;

/// Tolerance for float-angle comparisons (modulo 2π).
pub const ANGLE_TOL: f64 = 1e-9;

/// A measurement or preparation angle.
///
/// Exact angles are rational multiples of π, kept reduced with a positive
/// denominator and numerator normalized into `(-den, den]` so the angle lies
/// in `(-π, π]`. Float angles are raw radians; all comparisons are modulo 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// `num/den * π`, reduced, `den > 0`, `num/den` in `(-1, 1]`.
    Exact { num: i64, den: i64 },
    /// Radians.
    Float(f64),
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Angle {
    pub const ZERO: Angle = Angle::Exact { num: 0, den: 1 };
    pub const PI: Angle = Angle::Exact { num: 1, den: 1 };

    /// `num/den * π`, reduced modulo 2π into `(-π, π]`.
    pub fn exact(num: i64, den: i64) -> Angle {
        assert!(den != 0, "zero denominator");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num, den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        // reduce num/den into (-den, den], i.e. the angle into (-π, π]
        let period = 2 * den;
        num = num.rem_euclid(period);
        if num > den {
            num -= period;
        }
        Angle::Exact { num, den }
    }

    pub fn pi_over(den: i64) -> Angle {
        Angle::exact(1, den)
    }

    /// Radians, normalized into `(-π, π]`.
    pub fn float(radians: f64) -> Angle {
        let mut r = radians.rem_euclid(2.0 * PI);
        if r > PI {
            r -= 2.0 * PI;
        }
        Angle::Float(r)
    }

    pub fn radians(&self) -> f64 {
        match *self {
            Angle::Exact { num, den } => num as f64 * PI / den as f64,
            Angle::Float(r) => r,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::Exact { .. })
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Angle::Exact { num, .. } => num == 0,
            Angle::Float(r) => circle_dist(r, 0.0) <= ANGLE_TOL,
        }
    }

    pub fn neg(&self) -> Angle {
        match *self {
            Angle::Exact { num, den } => Angle::exact(-num, den),
            Angle::Float(r) => Angle::float(-r),
        }
    }

    /// Addition modulo 2π; exact + exact stays exact.
    pub fn add(&self, other: &Angle) -> Angle {
        match (*self, *other) {
            (Angle::Exact { num: n1, den: d1 }, Angle::Exact { num: n2, den: d2 }) => {
                Angle::exact(n1 * d2 + n2 * d1, d1 * d2)
            }
            _ => Angle::float(self.radians() + other.radians()),
        }
    }

    pub fn add_pi(&self) -> Angle {
        self.add(&Angle::PI)
    }

    /// Equality modulo 2π: exact angles compare exactly, anything involving a
    /// float compares within [`ANGLE_TOL`].
    pub fn approx_eq(&self, other: &Angle) -> bool {
        match (self, other) {
            (Angle::Exact { num: n1, den: d1 }, Angle::Exact { num: n2, den: d2 }) => {
                n1 == n2 && d1 == d2
            }
            _ => circle_dist(self.radians(), other.radians()) <= ANGLE_TOL,
        }
    }

    /// True for exact multiples of π (0 or π): the X-action on such a
    /// measurement angle is trivial.
    pub fn is_multiple_of_pi(&self) -> bool {
        matches!(*self, Angle::Exact { den: 1, .. })
    }

    /// True for exact odd multiples of π/2 (±π/2): the X- and Z-actions on
    /// such a measurement angle coincide.
    pub fn is_odd_half_pi(&self) -> bool {
        matches!(*self, Angle::Exact { num: 1 | -1, den: 2 })
    }

    /// True for the four Pauli measurement angles {0, π/2, π, -π/2}.
    pub fn is_pauli(&self) -> bool {
        self.is_multiple_of_pi() || self.is_odd_half_pi()
    }
}

/// Distance between two angles on the circle.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

impl fmt::Display for Angle {
    /// Exact angles render as reduced `k*pi/d` (`0`, `pi`, `-pi/2`,
    /// `3*pi/4`); float angles as decimal radians.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::Exact { num: 0, .. } => f.write_str("0"),
            Angle::Exact { num, den } => {
                if num < 0 {
                    f.write_str("-")?;
                }
                let n = num.abs();
                if n != 1 {
                    write!(f, "{n}*")?;
                }
                f.write_str("pi")?;
                if den != 1 {
                    write!(f, "/{den}")?;
                }
                Ok(())
            }
            Angle::Float(r) => write!(f, "{r:?}"),
        }
    }
}

/// One additive term of a dependent angle: `(-1)^{sign} * coeff * trigger`.
///
/// The common case is the π-term recording the Z-action of corrections; the
/// phase model introduces other coefficients, and absorbing a correction into
/// an already sign-dependent angle puts a sign on the term itself.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTerm {
    pub coeff: Angle,
    pub trigger: Signal,
    pub sign: Signal,
}

impl AngleTerm {
    pub fn new(coeff: Angle, trigger: Signal) -> Self {
        AngleTerm { coeff, trigger, sign: Signal::zero() }
    }
}

/// A measurement angle with outcome dependencies:
///
/// `eval(Γ) = (-1)^{sign_Γ} * base + Σ_k (-1)^{sign_kΓ} * coeff_k * trigger_kΓ`
///
/// In the plain one-way model this specializes to `(-1)^s α + t π`, the
/// dependent measurement with X-action signal `s` and Z-action signal `t`
/// (the single term has coefficient π and no sign of its own).
#[derive(Debug, Clone, PartialEq)]
pub struct DependentAngle {
    pub base: Angle,
    pub sign: Signal,
    pub terms: Vec<AngleTerm>,
}

impl DependentAngle {
    pub fn constant(base: Angle) -> Self {
        DependentAngle { base, sign: Signal::zero(), terms: Vec::new() }
    }

    /// The plain-model form `t[M^α]s`.
    pub fn plain(base: Angle, s: Signal, t: Signal) -> Self {
        let mut a = DependentAngle { base, sign: s, terms: Vec::new() };
        if !t.is_zero() {
            a.terms.push(AngleTerm::new(Angle::PI, t));
        }
        a
    }

    /// The X-action signal (`s` of `t[M^α]s`).
    pub fn s_signal(&self) -> &Signal {
        &self.sign
    }

    /// The Z-action signal: the trigger of the π-coefficient term, zero when
    /// absent. Only meaningful after [`Self::canonicalize`], which merges all
    /// π-terms into at most one.
    pub fn t_signal(&self) -> Signal {
        self.terms
            .iter()
            .find(|t| t.coeff == Angle::PI && t.sign.is_zero())
            .map(|t| t.trigger.clone())
            .unwrap_or_default()
    }

    /// Whether the whole expression is outcome-independent.
    pub fn is_independent(&self) -> bool {
        self.sign.is_zero() && self.terms.is_empty()
    }

    /// Every signal occurring in the expression, for dependency analysis.
    pub fn signals(&self) -> Vec<&Signal> {
        let mut out = vec![&self.sign];
        for t in &self.terms {
            out.push(&t.trigger);
            out.push(&t.sign);
        }
        out
    }

    /// All qubits whose outcomes the angle depends on.
    pub fn dep_qubits(&self) -> impl Iterator<Item = &QubitId> {
        self.signals().into_iter().flat_map(|s| s.deps.iter().collect::<Vec<_>>())
    }

    /// The X-action of a correction carried past this measurement: flips the
    /// sign of the whole expression.
    pub fn x_action(&mut self, r: &Signal) {
        self.sign.add_assign(r);
        for t in &mut self.terms {
            t.sign.add_assign(r);
        }
        self.canonicalize();
    }

    /// The Z-action: adds π gated on `r`.
    pub fn z_action(&mut self, r: &Signal) {
        self.terms.push(AngleTerm::new(Angle::PI, r.clone()));
        self.canonicalize();
    }

    /// The phase-correction action: subtracts β gated on `r`.
    pub fn p_action(&mut self, beta: &Angle, r: &Signal) {
        self.terms.push(AngleTerm::new(beta.neg(), r.clone()));
        self.canonicalize();
    }

    /// Evaluate under an outcome map given as a predicate on qubits.
    pub fn eval(&self, outcome: &impl Fn(&QubitId) -> bool) -> f64 {
        let sig = |s: &Signal| -> bool {
            let mut b = s.constant;
            for d in &s.deps {
                b ^= outcome(d);
            }
            b
        };
        let mut acc = if sig(&self.sign) { -self.base.radians() } else { self.base.radians() };
        for t in &self.terms {
            if sig(&t.trigger) {
                acc += if sig(&t.sign) { -t.coeff.radians() } else { t.coeff.radians() };
            }
        }
        acc
    }

    /// Substitution `s_i ↦ t + s_i` in every signal of the expression (used
    /// by signal shifting).
    pub fn shift_outcome(&mut self, i: &QubitId, t: &Signal) {
        self.sign = self.sign.shift_outcome(i, t);
        for term in &mut self.terms {
            term.trigger = term.trigger.shift_outcome(i, t);
            term.sign = term.sign.shift_outcome(i, t);
        }
        self.canonicalize();
    }

    pub fn rename(&self, f: &impl Fn(&QubitId) -> QubitId) -> DependentAngle {
        DependentAngle {
            base: self.base,
            sign: self.sign.rename(f),
            terms: self
                .terms
                .iter()
                .map(|t| AngleTerm {
                    coeff: t.coeff,
                    trigger: t.trigger.rename(f),
                    sign: t.sign.rename(f),
                })
                .collect(),
        }
    }

    /// Normalize the representation without changing the evaluated angle:
    ///
    /// * a constant bit in the sign flips the base (`(-1)^{1+s}α = (-1)^s(-α)`);
    /// * π-terms lose their sign (`±π ≡ π`), merge into one, and a constant
    ///   trigger bit folds into the base (`(-1)^s α + π ≡ (-1)^s (α+π)`);
    /// * zero-coefficient and zero-trigger terms disappear;
    /// * for other terms a constant trigger bit folds out when no signs are
    ///   involved (`c·(1+t) = c + (-c)·t`);
    /// * terms sort on a canonical key.
    pub fn canonicalize(&mut self) {
        if self.sign.constant {
            self.base = self.base.neg();
            self.sign.constant = false;
        }
        let mut pi_trigger = Signal::zero();
        let mut rest: Vec<AngleTerm> = Vec::new();
        for mut term in self.terms.drain(..) {
            if term.coeff.is_zero() || term.trigger.is_zero() {
                continue;
            }
            if term.sign.constant {
                // (-1)^{1+σ}·c·t = (-1)^σ·(-c)·t
                term.coeff = term.coeff.neg();
                term.sign.constant = false;
            }
            let is_pi = term.coeff.is_exact() && term.coeff.approx_eq(&Angle::PI);
            if is_pi {
                pi_trigger.add_assign(&term.trigger);
            } else {
                if term.trigger.constant && term.sign.is_zero() && self.sign.is_zero() {
                    // c·(1 + t') = c + (-c)·t'
                    self.base = self.base.add(&term.coeff);
                    term.coeff = term.coeff.neg();
                    term.trigger.constant = false;
                    if term.trigger.is_zero() {
                        continue;
                    }
                }
                rest.push(term);
            }
        }
        if pi_trigger.constant {
            self.base = self.base.add_pi();
            pi_trigger.constant = false;
        }
        if !pi_trigger.is_zero() {
            rest.push(AngleTerm::new(Angle::PI, pi_trigger));
        }
        rest.sort_by(|a, b| {
            let key = |t: &AngleTerm| (t.coeff.radians(), t.trigger.clone(), t.sign.clone());
            key(a).partial_cmp(&key(b)).expect("angle terms are comparable")
        });
        self.terms = rest;
    }

    /// True when the expression is a plain-model one: exact Pauli base with
    /// at most a π-term.
    fn is_plain_pauli(&self) -> bool {
        self.base.is_pauli()
            && self
                .terms
                .iter()
                .all(|t| t.coeff == Angle::PI && t.sign.is_zero())
    }

    /// Apply the special-angle absorptions: for a base that is a multiple of
    /// π the X-action is trivial and the sign drops; for a base that is an
    /// odd multiple of π/2 the X-action coincides with the Z-action and the
    /// sign folds into the π-term. Returns true if anything changed.
    pub fn absorb_pauli_actions(&mut self) -> bool {
        if self.sign.is_zero() || !self.is_plain_pauli() {
            return false;
        }
        if self.base.is_multiple_of_pi() {
            self.sign = Signal::zero();
        } else {
            let s = std::mem::take(&mut self.sign);
            self.terms.push(AngleTerm::new(Angle::PI, s));
        }
        self.canonicalize();
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::q;

    #[test]
    fn exact_reduction_lands_in_half_open_range() {
        assert_eq!(Angle::exact(3, 2), Angle::exact(-1, 2));
        assert_eq!(Angle::exact(-1, 1), Angle::PI);
        assert_eq!(Angle::exact(4, 2), Angle::ZERO);
        assert_eq!(Angle::exact(2, -4), Angle::exact(-1, 2));
        assert_eq!(Angle::exact(47, 120).to_string(), "47*pi/120");
    }

    #[test]
    fn display_forms() {
        assert_eq!(Angle::ZERO.to_string(), "0");
        assert_eq!(Angle::PI.to_string(), "pi");
        assert_eq!(Angle::exact(-1, 2).to_string(), "-pi/2");
        assert_eq!(Angle::exact(3, 4).to_string(), "3*pi/4");
        assert_eq!(Angle::float(0.5).to_string(), "0.5");
    }

    #[test]
    fn arithmetic_stays_exact() {
        let a = Angle::exact(1, 3).add(&Angle::exact(1, 6));
        assert_eq!(a, Angle::exact(1, 2));
        assert_eq!(Angle::exact(1, 2).add_pi(), Angle::exact(-1, 2));
        assert_eq!(Angle::exact(1, 2).neg(), Angle::exact(-1, 2));
    }

    #[test]
    fn float_comparison_is_mod_2pi() {
        let a = Angle::float(0.1);
        let b = Angle::float(0.1 + 2.0 * PI);
        assert!(a.approx_eq(&b));
        assert!(a.approx_eq(&Angle::Float(0.1 + 5e-10)));
        assert!(!a.approx_eq(&Angle::float(0.2)));
    }

    #[test]
    fn plain_eval_matches_msem() {
        // t[M^α]s evaluates to (-1)^s α + t π
        let alpha = Angle::exact(1, 4);
        let a = DependentAngle::plain(alpha, Signal::outcome(q("1")), Signal::outcome(q("2")));
        let g00 = |_: &QubitId| false;
        assert!((a.eval(&g00) - PI / 4.0).abs() < 1e-12);
        let g10 = |i: &QubitId| i == &q("1");
        assert!((a.eval(&g10) + PI / 4.0).abs() < 1e-12);
        let g01 = |i: &QubitId| i == &q("2");
        assert!((a.eval(&g01) - (PI / 4.0 + PI)).abs() < 1e-12);
        let g11 = |_: &QubitId| true;
        assert!((a.eval(&g11) - (-PI / 4.0 + PI)).abs() < 1e-12);
    }

    #[test]
    fn sign_constant_folds_into_base() {
        // 1+s2 in the sign position is the same measurement as -α with s2
        let mut a = DependentAngle::plain(
            Angle::exact(1, 4),
            Signal::one().add(&Signal::outcome(q("2"))),
            Signal::zero(),
        );
        a.canonicalize();
        assert_eq!(a.base, Angle::exact(-1, 4));
        assert_eq!(a.sign, Signal::outcome(q("2")));
    }

    #[test]
    fn x_action_flips_whole_expression() {
        // expression (-1)^{s1}·(-π/2)·s2 from the sign-modulated term
        let mut a = DependentAngle::constant(Angle::ZERO);
        a.terms.push(AngleTerm::new(Angle::exact(-1, 2), Signal::outcome(q("2"))));
        a.x_action(&Signal::outcome(q("1")));
        let g = |i: &QubitId| i == &q("2");
        assert!((a.eval(&g) + PI / 2.0).abs() < 1e-12);
        let g2 = |_: &QubitId| true;
        assert!((a.eval(&g2) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_absorption() {
        // s[M^x] loses its sign entirely
        let mut x = DependentAngle::plain(Angle::ZERO, Signal::outcome(q("1")), Signal::zero());
        assert!(x.absorb_pauli_actions());
        assert!(x.is_independent());
        // s[M^y] folds the sign into the π-term
        let mut y = DependentAngle::plain(
            Angle::exact(1, 2),
            Signal::outcome(q("1")),
            Signal::outcome(q("2")),
        );
        assert!(y.absorb_pauli_actions());
        assert!(y.sign.is_zero());
        assert_eq!(
            y.t_signal(),
            Signal::outcome(q("1")).add(&Signal::outcome(q("2")))
        );
        // a generic angle is untouched
        let mut g = DependentAngle::plain(Angle::exact(1, 4), Signal::outcome(q("1")), Signal::zero());
        assert!(!g.absorb_pauli_actions());
    }

    #[test]
    fn z_then_x_order_of_actions_commutes() {
        let s1 = Signal::outcome(q("1"));
        let s2 = Signal::outcome(q("2"));
        let alpha = Angle::float(0.7);
        let mut a = DependentAngle::constant(alpha);
        a.z_action(&s2);
        a.x_action(&s1);
        let mut b = DependentAngle::constant(alpha);
        b.x_action(&s1);
        b.z_action(&s2);
        for bits in 0..4u8 {
            let g = |i: &QubitId| {
                (i == &q("1") && bits & 1 != 0) || (i == &q("2") && bits & 2 != 0)
            };
            assert!(circle_dist(a.eval(&g), b.eval(&g)) < 1e-12, "bits {bits}");
        }
    }
}
