//! Operational and denotational semantics on a small dense simulator:
//! running single branches on unnormalized states, assembling branch maps,
//! evaluating the CPTP map, classifying determinism, and extracting realized
//! unitaries.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::command::Command;
use crate::linalg::{self, CMat};
use crate::pattern::{Pattern, Violation};
use crate::qubit::QubitId;

/// Comparison tolerance for all semantic equalities.
pub const SEM_TOL: f64 = 1e-9;

/// Dense-simulation resource guard: branch enumeration refuses patterns
/// beyond this many qubits or measurement outcomes.
pub const MAX_QUBITS: usize = 16;
pub const MAX_OUTCOMES: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("pattern fails validation: {0:?}")]
    NotValid(Vec<Violation>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expected {expected} outcome bits, got {got}")]
    OutcomeCount { expected: usize, got: usize },
    #[error("pattern too large to enumerate: {qubits} qubits, {outcomes} outcomes \
             (limits {MAX_QUBITS}/{MAX_OUTCOMES})")]
    TooLarge { qubits: usize, outcomes: usize },
    #[error("pattern is not strongly deterministic")]
    NotStronglyDeterministic,
    #[error("extracted map deviates from an isometry by {0:.3e}")]
    EmbeddingDefect(f64),
    #[error("patterns are not comparable: {0}")]
    ShapeMismatch(String),
    #[error("not a density operator: {0}")]
    BadDensity(String),
}

/// An unnormalized pure state over an ordered list of active qubits; the
/// first qubit is the most significant index bit. States are not
/// renormalized after measurements, so the squared norm carries the branch
/// probability.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub active: Vec<QubitId>,
    pub amplitudes: Vec<Complex64>,
}

impl QuantumState {
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// The classical record of measurement outcomes accumulated during a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutcomeMap {
    entries: BTreeMap<QubitId, bool>,
}

impl OutcomeMap {
    pub fn get(&self, q: &QubitId) -> Option<bool> {
        self.entries.get(q).copied()
    }

    fn set(&mut self, q: QubitId, v: bool) {
        self.entries.insert(q, v);
    }

    fn flip(&mut self, q: &QubitId, v: bool) {
        if let Some(e) = self.entries.get_mut(q) {
            *e ^= v;
        }
    }

    fn signal(&self, s: &crate::signal::Signal) -> bool {
        let mut b = s.constant;
        for d in &s.deps {
            b ^= self.entries.get(d).copied().unwrap_or(false);
        }
        b
    }

    fn angle(&self, a: &crate::angle::DependentAngle) -> f64 {
        a.eval(&|q: &QubitId| self.entries.get(q).copied().unwrap_or(false))
    }
}

/// The complete branch-map family of a pattern: for every outcome string
/// `s` (bit `k` is the `k`-th measured outcome in execution order) the
/// linear map `A_s` from the input space to the output space, with rows
/// ordered by the output list and columns by the input list.
#[derive(Debug, Clone)]
pub struct BranchMapSet {
    pub inputs: Vec<QubitId>,
    pub outputs: Vec<QubitId>,
    pub measured_order: Vec<QubitId>,
    pub maps: BTreeMap<String, CMat>,
}

impl BranchMapSet {
    pub fn input_dim(&self) -> usize {
        1 << self.inputs.len()
    }

    pub fn output_dim(&self) -> usize {
        1 << self.outputs.len()
    }

    /// `‖Σ_s A_s† A_s − I‖_∞`; zero for every valid pattern.
    pub fn kraus_defect(&self) -> f64 {
        let d = self.input_dim();
        let mut acc = CMat::zeros(d, d);
        for a in self.maps.values() {
            acc += a.adjoint() * a;
        }
        linalg::max_abs_diff(&acc, &linalg::identity(d))
    }

    /// The Choi matrix `Σ_{k,l} |k><l| ⊗ T(|k><l|)` of the realized CPTP
    /// map.
    pub fn choi(&self) -> CMat {
        choi_from_kraus(self.input_dim(), self.maps.values())
    }
}

/// Assemble the Choi matrix of `ρ ↦ Σ A ρ A†` from Kraus operators.
pub fn choi_from_kraus<'a>(d_in: usize, kraus: impl Iterator<Item = &'a CMat>) -> CMat {
    let kraus: Vec<&CMat> = kraus.collect();
    let d_out = kraus.first().map_or(1, |a| a.nrows());
    let mut choi = CMat::zeros(d_in * d_out, d_in * d_out);
    for a in kraus {
        for k in 0..d_in {
            for l in 0..d_in {
                for r in 0..d_out {
                    for c in 0..d_out {
                        choi[(k * d_out + r, l * d_out + c)] += a[(r, k)] * a[(c, l)].conj();
                    }
                }
            }
        }
    }
    choi
}

/// A density operator: Hermitian, positive semidefinite, trace at most 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMat,
}

impl DensityOperator {
    pub fn new(matrix: CMat) -> Result<Self, SimError> {
        if matrix.nrows() != matrix.ncols() || !matrix.nrows().is_power_of_two() {
            return Err(SimError::BadDensity(format!(
                "shape {}x{} is not a square power of two",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = linalg::max_abs_diff(&matrix, &matrix.adjoint());
        if herm > SEM_TOL {
            return Err(SimError::BadDensity(format!("not Hermitian (defect {herm:.3e})")));
        }
        let eigs = matrix.clone().symmetric_eigenvalues();
        if let Some(min) = eigs.iter().cloned().reduce(f64::min) {
            if min < -SEM_TOL {
                return Err(SimError::BadDensity(format!("negative eigenvalue {min:.3e}")));
            }
        }
        let trace = matrix.trace().re;
        if trace > 1.0 + SEM_TOL {
            return Err(SimError::BadDensity(format!("trace {trace} exceeds 1")));
        }
        Ok(DensityOperator { matrix })
    }

    pub fn from_pure(state: &[Complex64]) -> Result<Self, SimError> {
        let d = state.len();
        let mut m = CMat::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] = state[r] * state[c].conj();
            }
        }
        DensityOperator::new(m)
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// Determinism classification by comparison of branch maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Determinism {
    /// Some branches are not proportional: outputs depend on outcomes.
    NotDeterministic,
    /// All branch maps are pairwise proportional: pure states go to pure
    /// states, but branch probabilities may differ.
    Deterministic,
    /// All branch maps are equal: the pattern realizes `2^{m/2} A_s`, a
    /// unitary embedding.
    StronglyDeterministic,
}

impl std::fmt::Display for Determinism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Determinism::NotDeterministic => "not deterministic",
            Determinism::Deterministic => "deterministic",
            Determinism::StronglyDeterministic => "strongly deterministic",
        };
        f.write_str(s)
    }
}

/// Dense evolution of a batch of columns (one per input basis vector); rows
/// are indexed by the current active qubits, first qubit most significant.
struct Evolver {
    qubits: Vec<QubitId>,
    /// `2^qubits.len()` rows by `cols` columns.
    mat: CMat,
}

impl Evolver {
    fn start(inputs: &[QubitId], columns: CMat) -> Evolver {
        Evolver { qubits: inputs.to_vec(), mat: columns }
    }

    fn bit_shift(&self, q: &QubitId) -> usize {
        let pos = self
            .qubits
            .iter()
            .position(|x| x == q)
            .expect("qubit active (guaranteed by validation)");
        self.qubits.len() - 1 - pos
    }

    /// Tensor in a fresh qubit in `|+_α>` as the least significant bit.
    fn add_qubit(&mut self, q: QubitId, alpha: f64) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c0 = Complex64::new(s, 0.0);
        let c1 = Complex64::from_polar(s, alpha);
        let (rows, cols) = self.mat.shape();
        let mut next = CMat::zeros(rows * 2, cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = self.mat[(r, c)];
                next[(2 * r, c)] = v * c0;
                next[(2 * r + 1, c)] = v * c1;
            }
        }
        self.mat = next;
        self.qubits.push(q);
    }

    fn cz(&mut self, a: &QubitId, b: &QubitId) {
        let (ma, mb) = (1usize << self.bit_shift(a), 1usize << self.bit_shift(b));
        for r in 0..self.mat.nrows() {
            if r & ma != 0 && r & mb != 0 {
                for c in 0..self.mat.ncols() {
                    self.mat[(r, c)] = -self.mat[(r, c)];
                }
            }
        }
    }

    fn x(&mut self, q: &QubitId) {
        let m = 1usize << self.bit_shift(q);
        for r in 0..self.mat.nrows() {
            if r & m == 0 {
                let other = r | m;
                for c in 0..self.mat.ncols() {
                    self.mat.swap((r, c), (other, c));
                }
            }
        }
    }

    fn z(&mut self, q: &QubitId) {
        self.phase(q, std::f64::consts::PI);
    }

    fn phase(&mut self, q: &QubitId, beta: f64) {
        let m = 1usize << self.bit_shift(q);
        let e = Complex64::from_polar(1.0, beta);
        for r in 0..self.mat.nrows() {
            if r & m != 0 {
                for c in 0..self.mat.ncols() {
                    self.mat[(r, c)] *= e;
                }
            }
        }
    }

    /// Project qubit `q` onto `<+_α|` (outcome 0) or `<-_α|` (outcome 1)
    /// and drop it from the register. No renormalization.
    fn measure(&mut self, q: &QubitId, alpha: f64, outcome: bool) {
        let shift = self.bit_shift(q);
        let pos = self.qubits.len() - 1 - shift;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b0 = Complex64::new(s, 0.0);
        let b1 = {
            let v = Complex64::from_polar(s, -alpha);
            if outcome {
                -v
            } else {
                v
            }
        };
        let rows = self.mat.nrows() / 2;
        let cols = self.mat.ncols();
        let mut next = CMat::zeros(rows, cols);
        let low_mask = (1usize << shift) - 1;
        for r in 0..rows {
            let base = ((r >> shift) << (shift + 1)) | (r & low_mask);
            let one = base | (1 << shift);
            for c in 0..cols {
                next[(r, c)] = b0 * self.mat[(base, c)] + b1 * self.mat[(one, c)];
            }
        }
        self.mat = next;
        self.qubits.remove(pos);
    }

    /// Reorder the register to `order` (a permutation of the active
    /// qubits).
    fn permute(&mut self, order: &[QubitId]) {
        debug_assert_eq!(order.len(), self.qubits.len());
        if order == self.qubits.as_slice() {
            return;
        }
        let n = order.len();
        let shifts: Vec<usize> = order.iter().map(|q| self.bit_shift(q)).collect();
        let rows = self.mat.nrows();
        let cols = self.mat.ncols();
        let mut next = CMat::zeros(rows, cols);
        for r_new in 0..rows {
            let mut r_old = 0usize;
            for (p_new, shift_old) in shifts.iter().enumerate() {
                if r_new & (1 << (n - 1 - p_new)) != 0 {
                    r_old |= 1 << shift_old;
                }
            }
            for c in 0..cols {
                next[(r_new, c)] = self.mat[(r_old, c)];
            }
        }
        self.mat = next;
        self.qubits = order.to_vec();
    }

    fn fork(&self) -> Evolver {
        Evolver { qubits: self.qubits.clone(), mat: self.mat.clone() }
    }
}

/// Qubits without an explicit preparation command that are not inputs; they
/// start in `|+>`.
fn implicit_preparations(p: &Pattern) -> Vec<QubitId> {
    let explicit: std::collections::BTreeSet<&QubitId> = p
        .seq
        .iter()
        .filter_map(|c| match c {
            Command::N { qubit, .. } => Some(qubit),
            _ => None,
        })
        .collect();
    p.space
        .iter()
        .filter(|q| !p.inputs.contains(q) && !explicit.contains(q))
        .cloned()
        .collect()
}

fn checked(p: &Pattern) -> Result<(), SimError> {
    let violations = p.validate();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(SimError::NotValid(violations))
    }
}

fn apply_deterministic(ev: &mut Evolver, cmd: &Command, outcomes: &mut OutcomeMap) {
    match cmd {
        Command::N { qubit, angle } => ev.add_qubit(qubit.clone(), angle.radians()),
        Command::E { a, b } => ev.cz(a, b),
        Command::X { qubit, signal } => {
            if outcomes.signal(signal) {
                ev.x(qubit);
            }
        }
        Command::Z { qubit, signal } => {
            if outcomes.signal(signal) {
                ev.z(qubit);
            }
        }
        Command::P { qubit, angle, signal } => {
            if outcomes.signal(signal) {
                ev.phase(qubit, angle.radians());
            }
        }
        Command::S { qubit, signal } => {
            let v = outcomes.signal(signal);
            outcomes.flip(qubit, v);
        }
        Command::M { .. } | Command::M2 { .. } => unreachable!("measurement handled by caller"),
    }
}

/// Execute one branch of a pattern on an input state (a vector over the
/// input space in input-list order), choosing measurement outcomes from
/// `outcomes` in execution order (`M2` consumes two bits, first qubit
/// first). Returns the unnormalized output state over the output qubits and
/// the branch probability (its squared norm, for a unit input).
pub fn run_branch(
    p: &Pattern,
    input: &[Complex64],
    outcomes: &[bool],
) -> Result<(QuantumState, f64), SimError> {
    checked(p)?;
    let d_in = 1usize << p.inputs.len();
    if input.len() != d_in {
        return Err(SimError::DimensionMismatch { expected: d_in, got: input.len() });
    }
    let expected = p.outcome_count();
    if outcomes.len() != expected {
        return Err(SimError::OutcomeCount { expected, got: outcomes.len() });
    }

    let col = CMat::from_column_slice(d_in, 1, input);
    let mut ev = Evolver::start(&p.inputs, col);
    for q in implicit_preparations(p) {
        ev.add_qubit(q, 0.0);
    }
    let mut record = OutcomeMap::default();
    let mut next_bit = 0usize;
    for cmd in &p.seq {
        match cmd {
            Command::M { qubit, angle } => {
                let alpha = record.angle(angle);
                let bit = outcomes[next_bit];
                next_bit += 1;
                ev.measure(qubit, alpha, bit);
                record.set(qubit.clone(), bit);
            }
            Command::M2 { a, b, alpha, beta } => {
                let aa = record.angle(alpha);
                let bb = record.angle(beta);
                let (bit_a, bit_b) = (outcomes[next_bit], outcomes[next_bit + 1]);
                next_bit += 2;
                ev.cz(a, b);
                ev.measure(a, aa, bit_a);
                ev.measure(b, bb, bit_b);
                record.set(a.clone(), bit_a);
                record.set(b.clone(), bit_b);
            }
            other => apply_deterministic(&mut ev, other, &mut record),
        }
    }
    ev.permute(&p.outputs);
    let state = QuantumState {
        active: ev.qubits.clone(),
        amplitudes: ev.mat.column(0).iter().cloned().collect(),
    };
    let prob = state.norm_sq();
    Ok((state, prob))
}

fn guard(p: &Pattern) -> Result<(), SimError> {
    let qubits = p.space.len();
    let outcomes = p.outcome_count();
    if qubits > MAX_QUBITS || outcomes > MAX_OUTCOMES {
        return Err(SimError::TooLarge { qubits, outcomes });
    }
    Ok(())
}

/// Enumerate all `2^m` branches and assemble the branch map of each: column
/// `k` of `A_s` is the branch output on the `k`-th input basis vector.
/// Shared deterministic prefixes are evolved once; the state forks at each
/// measurement.
pub fn branch_maps(p: &Pattern) -> Result<BranchMapSet, SimError> {
    checked(p)?;
    guard(p)?;
    let d_in = 1usize << p.inputs.len();
    let mut ev = Evolver::start(&p.inputs, linalg::identity(d_in));
    for q in implicit_preparations(p) {
        ev.add_qubit(q, 0.0);
    }
    let mut maps = BTreeMap::new();
    recurse_branches(p, ev, OutcomeMap::default(), 0, String::new(), &mut maps);
    Ok(BranchMapSet {
        inputs: p.inputs.clone(),
        outputs: p.outputs.clone(),
        measured_order: p.measured_order(),
        maps,
    })
}

fn recurse_branches(
    p: &Pattern,
    mut ev: Evolver,
    mut record: OutcomeMap,
    mut idx: usize,
    prefix: String,
    out: &mut BTreeMap<String, CMat>,
) {
    while idx < p.seq.len() {
        match &p.seq[idx] {
            Command::M { qubit, angle } => {
                let alpha = record.angle(angle);
                for bit in [false, true] {
                    let mut ev2 = ev.fork();
                    ev2.measure(qubit, alpha, bit);
                    let mut rec2 = record.clone();
                    rec2.set(qubit.clone(), bit);
                    let mut pref2 = prefix.clone();
                    pref2.push(if bit { '1' } else { '0' });
                    recurse_branches(p, ev2, rec2, idx + 1, pref2, out);
                }
                return;
            }
            Command::M2 { a, b, alpha, beta } => {
                let aa = record.angle(alpha);
                let bb = record.angle(beta);
                ev.cz(a, b);
                for bit_a in [false, true] {
                    for bit_b in [false, true] {
                        let mut ev2 = ev.fork();
                        ev2.measure(a, aa, bit_a);
                        ev2.measure(b, bb, bit_b);
                        let mut rec2 = record.clone();
                        rec2.set(a.clone(), bit_a);
                        rec2.set(b.clone(), bit_b);
                        let mut pref2 = prefix.clone();
                        pref2.push(if bit_a { '1' } else { '0' });
                        pref2.push(if bit_b { '1' } else { '0' });
                        recurse_branches(p, ev2, rec2, idx + 1, pref2, out);
                    }
                }
                return;
            }
            other => {
                apply_deterministic(&mut ev, other, &mut record);
                idx += 1;
            }
        }
    }
    ev.permute(&p.outputs);
    out.insert(prefix, ev.mat);
}

/// Apply the realized CPTP map `ρ ↦ Σ_s A_s ρ A_s†`.
pub fn apply_cptp(p: &Pattern, rho: &DensityOperator) -> Result<DensityOperator, SimError> {
    let bms = branch_maps(p)?;
    if rho.dim() != bms.input_dim() {
        return Err(SimError::DimensionMismatch { expected: bms.input_dim(), got: rho.dim() });
    }
    let d_out = bms.output_dim();
    let mut acc = CMat::zeros(d_out, d_out);
    for a in bms.maps.values() {
        acc += a * rho.matrix() * a.adjoint();
    }
    DensityOperator::new(acc)
}

/// Classify the determinism of a pattern from its branch maps.
pub fn classify(p: &Pattern) -> Result<Determinism, SimError> {
    Ok(classify_maps(&branch_maps(p)?))
}

pub fn classify_maps(bms: &BranchMapSet) -> Determinism {
    let maps: Vec<&CMat> = bms.maps.values().collect();
    let first = maps[0];
    if maps.iter().all(|m| linalg::max_abs_diff(m, first) <= SEM_TOL) {
        return Determinism::StronglyDeterministic;
    }
    // proportionality via the Cauchy-Schwarz equality condition on
    // normalized maps, so the test is scale-free; zero maps (dead branches)
    // are proportional to everything
    let norms: Vec<f64> =
        maps.iter().map(|m| m.iter().map(|x| x.norm_sqr()).sum::<f64>()).collect();
    let live: Vec<usize> = (0..maps.len()).filter(|&i| norms[i] > SEM_TOL * SEM_TOL).collect();
    for w in live.windows(2) {
        let (i, j) = (w[0], w[1]);
        let inner: Complex64 =
            maps[i].iter().zip(maps[j].iter()).map(|(x, y)| x.conj() * y).sum();
        let cs = inner.norm_sqr() / (norms[i] * norms[j]);
        if (1.0 - cs).abs() > SEM_TOL {
            return Determinism::NotDeterministic;
        }
    }
    Determinism::Deterministic
}

/// For a strongly deterministic pattern, the realized unitary embedding
/// `2^{m/2} A_{0…0}`; verifies `A†A = I`.
pub fn extract_unitary(p: &Pattern) -> Result<CMat, SimError> {
    let bms = branch_maps(p)?;
    extract_unitary_from(&bms)
}

pub fn extract_unitary_from(bms: &BranchMapSet) -> Result<CMat, SimError> {
    if classify_maps(bms) != Determinism::StronglyDeterministic {
        return Err(SimError::NotStronglyDeterministic);
    }
    let m = bms.measured_order.len() as f64;
    let scale = Complex64::new(2f64.powf(m / 2.0), 0.0);
    let u = bms.maps.values().next().expect("at least one branch") * scale;
    let defect = linalg::isometry_defect(&u);
    if defect > SEM_TOL {
        return Err(SimError::EmbeddingDefect(defect));
    }
    Ok(u)
}

/// How [`semantic_equal`] compares two patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualMode {
    /// Branch-by-branch equality of the maps `A_s` (requires matching
    /// outcome counts).
    PerBranch,
    /// Equality of the Choi matrices of the realized CPTP maps.
    Choi,
}

/// Compare two patterns semantically, within [`SEM_TOL`].
pub fn semantic_equal(p1: &Pattern, p2: &Pattern, mode: EqualMode) -> Result<bool, SimError> {
    let b1 = branch_maps(p1)?;
    let b2 = branch_maps(p2)?;
    if b1.input_dim() != b2.input_dim() || b1.output_dim() != b2.output_dim() {
        return Err(SimError::ShapeMismatch(format!(
            "interfaces {}->{} vs {}->{}",
            b1.inputs.len(),
            b1.outputs.len(),
            b2.inputs.len(),
            b2.outputs.len()
        )));
    }
    match mode {
        EqualMode::PerBranch => {
            if b1.measured_order.len() != b2.measured_order.len() {
                return Err(SimError::ShapeMismatch(format!(
                    "measurement counts {} vs {}",
                    b1.measured_order.len(),
                    b2.measured_order.len()
                )));
            }
            Ok(b1.maps.iter().all(|(k, a)| linalg::max_abs_diff(a, &b2.maps[k]) <= SEM_TOL))
        }
        EqualMode::Choi => Ok(linalg::max_abs_diff(&b1.choi(), &b2.choi()) <= SEM_TOL),
    }
}
