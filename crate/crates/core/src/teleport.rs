//! Measurement-based realization of the dissipative reverse drift.
//!
//! One exact reverse step factors as `exp(-p dt + sqrt(p) dX P) =
//! exp(-p dt + sqrt(p) dW P) * exp(sqrt(p) dY P)` with `dY = dX - dW`. The
//! first factor is ordinary weak-measurement backaction; the second is a
//! non-unitary drift that a gate-model machine cannot apply directly. The
//! protocol simulated here applies it by gate teleportation: each round
//! consumes resource states, produces a Pauli byproduct `P = (x) sigma_1^j
//! sigma_3^l` with Born probabilities fixed by the Kraus operators
//! `K = R^{2^r} P`, and the byproduct either commutes with the drift axis
//! (success, correctable) or flips the drift into its inverse (failure). After
//! `r` consecutive failures the round teleports `R^{2^r}`, so one eventual
//! success leaves exactly `R * state` thanks to the cancellation
//! `R^n sigma_3 R^n sigma_3 = lambda_min^n I`. A budget caps the attempts per
//! step and prices each attempt in Bell pairs.
//!
//! Rounds are sampled directly from the POVM algebra; Bell measurement
//! circuitry and the ancilla post-selection are priced into the resource
//! ledger but not simulated gate by gate, since the outcome statistics are
//! completely determined by the Kraus operators.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_complex::Complex64;
// Needed for f64 math in the pure no_std graph; redundant (and flagged
// unused) whenever some enabled feature links std into the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::bridge::BridgeState;
use crate::channel::{measurement_increment, ChannelConfig, TrajectoryResult};
use crate::error::{CoreError, Result};
use crate::expm::{apply_exp_affine_pauli, exp_affine_pauli};
use crate::noise::{NoiseStream, StreamId, CHANNEL_PROTOCOL, CHANNEL_REVERSE};
use crate::operator::Operator;
use crate::pauli::{Axis, Mode, PauliString};
use crate::record::MeasurementRecord;
use crate::state::{fidelity, QuantumState};

/// The normalized drift `R^{2^r}` with `R = exp(dY sqrt(p) L) / ||.||`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftOp {
    pub word: PauliString,
    pub dy: f64,
    pub p: f64,
    /// Applies `R` raised to `2^power_log2`.
    pub power_log2: u32,
}

impl DriftOp {
    /// Exponent of a single `R`: `beta = dY sqrt(p)`.
    pub fn beta(&self) -> f64 {
        self.dy * self.p.sqrt()
    }

    /// Smallest eigenvalue `exp(-2 |beta|)` of a single normalized `R`.
    pub fn lambda_min(&self) -> f64 {
        (-2.0 * self.beta().abs()).exp()
    }

    pub fn power(&self) -> f64 {
        (2.0f64).powi(self.power_log2 as i32)
    }

    /// Dense normalized operator (largest singular value exactly 1).
    pub fn operator(&self) -> Result<Operator> {
        let b = self.power() * self.beta();
        exp_affine_pauli(Complex64::new(-b.abs(), 0.0), Complex64::new(b, 0.0), &self.word)
    }

    /// Apply in place; the normalizing scalar goes into the log norm offset.
    pub fn apply(&self, state: &mut QuantumState) -> Result<()> {
        let b = self.power() * self.beta();
        apply_exp_affine_pauli(
            state,
            Complex64::new(-b.abs(), 0.0),
            Complex64::new(b, 0.0),
            &self.word,
        )
    }
}

/// Whether a teleportation byproduct is correctable in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Good,
    Bad,
}

/// One Bell-measurement outcome.
#[derive(Debug, Clone)]
pub struct TeleportOutcome {
    /// `sigma_1` exponent bits, one per qubit.
    pub j: u32,
    /// `sigma_3` exponent bits, one per qubit.
    pub l: u32,
    /// The byproduct word `(x) sigma_1^{j_u} sigma_3^{l_u}` (phase dropped).
    pub byproduct: PauliString,
    pub branch: Branch,
    /// Normalized `K_outcome * state`.
    pub post_state: QuantumState,
}

/// All `4^m` byproduct words with their bit codes, in `(j << m) | l` order.
pub fn byproduct_words(qubits: usize) -> Vec<(u32, u32, PauliString)> {
    let m = qubits;
    let mut out = Vec::with_capacity(1 << (2 * m));
    for code in 0..(1u32 << (2 * m)) {
        let j = code >> m;
        let l = code & ((1 << m) - 1);
        let axes = (0..m)
            .map(|site| {
                let bit = m - 1 - site;
                match ((j >> bit) & 1, (l >> bit) & 1) {
                    (0, 0) => Axis::I,
                    (1, 0) => Axis::X,
                    (0, 1) => Axis::Z,
                    _ => Axis::Y,
                }
            })
            .collect();
        out.push((j, l, PauliString::new(axes).expect("m >= 1")));
    }
    out
}

/// Classification of a byproduct against the drift axis `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct ByproductClass {
    pub branch: Branch,
    /// For bad byproducts, the fixed anticommuting factor `P_*`: the
    /// lexicographically smallest single-factor word (factor `X` or `Z`, the
    /// byproduct generators) that anticommutes with `L`.
    pub canonical: Option<PauliString>,
    /// Pauli correction commuting with `L`: the byproduct itself when good,
    /// `P_* . P` when bad (overall sign dropped as a global phase).
    pub correction: PauliString,
}

/// Split a byproduct into branch, canonical anticommuting factor, and the
/// commuting correction.
pub fn classify_byproduct(byproduct: &PauliString, l_word: &PauliString) -> Result<ByproductClass> {
    if byproduct.qubits() != l_word.qubits() {
        return Err(CoreError::DimensionMismatch(byproduct.dim(), l_word.dim()));
    }
    if byproduct.commutes_with(l_word)? {
        return Ok(ByproductClass {
            branch: Branch::Good,
            canonical: None,
            correction: byproduct.clone(),
        });
    }
    let star = canonical_anticommuting_factor(l_word)?;
    let correction = star.mul_phase_free(byproduct)?;
    Ok(ByproductClass { branch: Branch::Bad, canonical: Some(star), correction })
}

/// The fixed `P_*` for a drift axis: smallest (by word spelling) single-site
/// `X`- or `Z`-factor string that anticommutes with `L`.
fn canonical_anticommuting_factor(l_word: &PauliString) -> Result<PauliString> {
    let m = l_word.qubits();
    let mut best: Option<PauliString> = None;
    for site in 0..m {
        for axis in [Axis::X, Axis::Z] {
            let mut axes = alloc::vec![Axis::I; m];
            axes[site] = axis;
            let candidate = PauliString::new(axes)?;
            if !candidate.commutes_with(l_word)? {
                let better = match &best {
                    None => true,
                    Some(b) => candidate.to_string() < b.to_string(),
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
    }
    best.ok_or(CoreError::InvalidConfig(
        "drift axis must not be the identity word",
    ))
}

/// One teleportation round: sample a Bell outcome with the exact Born
/// probabilities and return the (normalized) post-measurement state.
///
/// The outcome distribution collapses to two numbers: every byproduct in a
/// commutation class is equally likely, with class weights
/// `(1 +- tanh(2^{r+1} beta) <L>) / 2`. Each round consumes exactly two
/// uniform draws.
pub fn teleport_round(
    state: &QuantumState,
    drift: &DriftOp,
    stream: &mut NoiseStream,
) -> Result<TeleportOutcome> {
    if state.dim() != drift.word.dim() {
        return Err(CoreError::DimensionMismatch(drift.word.dim(), state.dim()));
    }
    if drift.word.is_identity() {
        return Err(CoreError::InvalidConfig(
            "drift axis must not be the identity word",
        ));
    }
    let m = drift.word.qubits();
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for entry in byproduct_words(m) {
        if entry.2.commutes_with(&drift.word)? {
            good.push(entry);
        } else {
            bad.push(entry);
        }
    }
    let t = (2.0 * drift.power() * drift.beta()).tanh();
    let ex = state.pauli_expectation(&drift.word)?;
    let p_good = (0.5 * (1.0 + t * ex)).clamp(0.0, 1.0);
    let u_branch = stream.uniform();
    let u_index = stream.uniform();
    let (branch, class) = if u_branch < p_good {
        (Branch::Good, &good)
    } else {
        (Branch::Bad, &bad)
    };
    let idx = ((u_index * class.len() as f64) as usize).min(class.len() - 1);
    let (j, l, byproduct) = class[idx].clone();
    let mut post_state = state.clone();
    // K = R^{2^r} P: byproduct first, then the drift.
    byproduct.affine_apply(
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        post_state.amplitudes_mut(),
    );
    drift.apply(&mut post_state)?;
    let post_state = post_state.normalized()?;
    Ok(TeleportOutcome { j, l, byproduct, branch, post_state })
}

/// Result of trying to apply one drift `R` through repeated teleportation.
#[derive(Debug, Clone, PartialEq)]
pub enum DriftApplicationOutcome {
    Success { attempts: u32 },
    /// Budget exhausted; the state left in place is the erroneous one.
    Exhausted { attempts: u32 },
}

impl DriftApplicationOutcome {
    pub fn attempts(&self) -> u32 {
        match *self {
            DriftApplicationOutcome::Success { attempts }
            | DriftApplicationOutcome::Exhausted { attempts } => attempts,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, DriftApplicationOutcome::Success { .. })
    }
}

/// Resource budget of one protocol step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResourceBudget {
    /// Target probability of a step failing outright.
    pub epsilon: f64,
    /// Maximum attempts per step.
    pub d: u32,
    /// Post-selected Bell pairs consumed per attempt and qubit,
    /// `ceil(log2(1/delta))`.
    pub n_bell_per_r: u32,
    /// Ancilla post-selection failure probability.
    pub delta: f64,
}

impl ResourceBudget {
    /// Smallest sufficient budget for a drift of size `dy` at rate `p`.
    pub fn sufficient(epsilon: f64, delta: f64, p: f64, dy: f64) -> Result<Self> {
        if !(0.0 < delta && delta < 1.0) {
            return Err(CoreError::InvalidConfig("delta must lie in (0, 1)"));
        }
        let d = d_min(epsilon, p, dy)?;
        let n_bell_per_r = (1.0 / delta).log2().ceil().max(1.0) as u32;
        Ok(ResourceBudget { epsilon, d, n_bell_per_r, delta })
    }

    /// The declared-sufficiency inequality `((1 + eta) / 2)^d <= epsilon`
    /// with `eta = |tanh(2^d sqrt(p) dy)|`.
    pub fn is_sufficient_for(&self, p: f64, dy: f64) -> bool {
        let eta = ((2.0f64).powi(self.d as i32) * p.sqrt() * dy).tanh().abs();
        self.d >= 1 && ((1.0 + eta) / 2.0).powi(self.d as i32) <= self.epsilon
    }
}

/// State-independent failure bound of attempt `r`:
/// `(1 + |tanh(2^{r+1} sqrt(p) dy)|) / 2`.
pub fn worst_case_fail_prob(r: u32, p: f64, dy: f64) -> f64 {
    0.5 * (1.0 + ((2.0f64).powi(r as i32 + 1) * p.sqrt() * dy).tanh().abs())
}

/// Smallest attempt count `d` with `d (1 - log2(1 + eta)) >= log2(1/epsilon)`,
/// `eta = |tanh(2^d sqrt(p) dy)|`, by ascending search up to 64.
pub fn d_min(epsilon: f64, p: f64, dy: f64) -> Result<u32> {
    if !(0.0 < epsilon && epsilon < 1.0) {
        return Err(CoreError::InvalidConfig("epsilon must lie in (0, 1)"));
    }
    let target = (1.0 / epsilon).log2();
    for d in 1..=64u32 {
        let eta = ((2.0f64).powi(d as i32) * p.sqrt() * dy).tanh().abs();
        if d as f64 * (1.0 - (1.0 + eta).log2()) >= target {
            return Ok(d);
        }
    }
    Err(CoreError::InfeasibleBudget(64))
}

/// Apply `R(dy)` to the state through escalating teleportation: attempt `r`
/// teleports `R^{2^r}`, failures are corrected to `R^{-(2^r - 1)} state` form,
/// and the first success leaves the state proportional to `R * state`.
pub fn run_drift_application(
    state: &mut QuantumState,
    dy: f64,
    p: f64,
    word: &PauliString,
    budget: &ResourceBudget,
    stream: &mut NoiseStream,
) -> Result<DriftApplicationOutcome> {
    if budget.d < 1 {
        return Err(CoreError::InvalidConfig("budget must allow at least one attempt"));
    }
    for r in 0..budget.d {
        let drift = DriftOp { word: word.clone(), dy, p, power_log2: r };
        let outcome = teleport_round(state, &drift, stream)?;
        // Correct by the byproduct itself (self-inverse up to global phase):
        // good outcomes become R^{2^r} state, bad ones R^{-2^r} state.
        *state = outcome.post_state;
        outcome.byproduct.affine_apply(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            state.amplitudes_mut(),
        );
        state.renormalize()?;
        if matches!(outcome.branch, Branch::Good) {
            return Ok(DriftApplicationOutcome::Success { attempts: r + 1 });
        }
    }
    Ok(DriftApplicationOutcome::Exhausted { attempts: budget.d })
}

/// One full protocol step: weak-measurement backaction
/// `exp(-p dt + sqrt(p) dW P)`, then the teleported drift `R(dY)`.
/// A degenerate `dY = 0` skips teleportation (`R = I`).
pub fn protocol_step(
    state: &mut QuantumState,
    dw: f64,
    dy: f64,
    cfg: &ChannelConfig,
    budget: &ResourceBudget,
    stream: &mut NoiseStream,
) -> Result<DriftApplicationOutcome> {
    apply_exp_affine_pauli(
        state,
        Complex64::new(-cfg.p * cfg.dt, 0.0),
        Complex64::new(cfg.p.sqrt() * dw, 0.0),
        &cfg.pauli,
    )?;
    state.renormalize()?;
    if dy == 0.0 {
        return Ok(DriftApplicationOutcome::Success { attempts: 0 });
    }
    run_drift_application(state, dy, cfg.p, &cfg.pauli, budget, stream)
}

/// Ledger of what a protocol run consumed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BudgetReport {
    pub epsilon: f64,
    pub delta: f64,
    pub d: u32,
    pub n_bell_per_r: u32,
    /// Bell pairs per attempt: `n_bell_per_r` per qubit of the drift axis.
    pub bell_per_attempt: u64,
    /// Worst case per step: `d` attempts.
    pub worst_case_bell_per_step: u64,
    pub steps_run: usize,
    pub total_attempts: u64,
    pub total_bell_pairs: u64,
    pub failed: bool,
}

/// Outcome of a teleported reverse pass.
#[derive(Debug, Clone)]
pub struct TeleportRunResult {
    pub result: TrajectoryResult,
    pub attempts_per_step: Vec<u32>,
    /// Step index at which the budget was exhausted; the run stops there and
    /// the final state is the erroneous one.
    pub failed_at_step: Option<usize>,
    pub report: BudgetReport,
}

/// Reverse pass on `[T, 2T]` realized by the protocol: weak measurement plus
/// teleported drift each step, driven by the same bridge as the reverse
/// engine. Only the dissipative coupling has a non-unitary drift to teleport.
pub fn run_teleport_reverse_sampled(
    cfg: &ChannelConfig,
    start: &QuantumState,
    w_horizon: f64,
    budget: &ResourceBudget,
    trajectory: u64,
    score: Option<&QuantumState>,
    stride: usize,
) -> Result<TeleportRunResult> {
    cfg.validate()?;
    if cfg.mode != Mode::Dissipative {
        return Err(CoreError::InvalidConfig(
            "the teleport protocol realizes the dissipative reverse drift",
        ));
    }
    if cfg.pauli.is_identity() && cfg.p > 0.0 {
        return Err(CoreError::InvalidConfig(
            "drift axis must not be the identity word",
        ));
    }
    if start.dim() != cfg.dim() {
        return Err(CoreError::DimensionMismatch(cfg.dim(), start.dim()));
    }
    let stride = stride.max(1);
    let steps = cfg.steps();
    let t0 = cfg.horizon;
    let mut state = start.clone();
    let mut bridge = BridgeState::real(w_horizon, t0, 2.0 * cfg.horizon, 0.0);
    let mut record = MeasurementRecord::new(cfg.dt, 1)?;
    let mut measure_stream =
        NoiseStream::new(cfg.seed, StreamId { trajectory, channel: CHANNEL_REVERSE });
    let mut protocol_stream =
        NoiseStream::new(cfg.seed, StreamId { trajectory, channel: CHANNEL_PROTOCOL });
    let mut times = alloc::vec![t0];
    let mut states = alloc::vec![state.clone()];
    let mut attempts_per_step = Vec::with_capacity(steps);
    let mut failed_at_step = None;
    let mut total_attempts = 0u64;
    for n in 0..steps {
        let dw = measurement_increment(
            &state,
            &cfg.pauli,
            cfg.mode,
            cfg.p,
            cfg.dt,
            &mut measure_stream,
        )?;
        let dx = bridge.step(dw, cfg.dt)?.re;
        let dy = dx - dw;
        let outcome = protocol_step(&mut state, dw, dy, cfg, budget, &mut protocol_stream)?;
        attempts_per_step.push(outcome.attempts());
        total_attempts += u64::from(outcome.attempts());
        record.push(&[dw])?;
        let idx = n + 1;
        if !outcome.is_success() {
            // Budget exhausted: record the erroneous state and stop.
            failed_at_step = Some(n);
            times.push(t0 + idx as f64 * cfg.dt);
            states.push(state.clone());
            break;
        }
        if idx == steps || idx % stride == 0 {
            times.push(t0 + idx as f64 * cfg.dt);
            states.push(state.clone());
        }
    }
    let terminal_fidelity = score.map(|s| fidelity(&state, s)).transpose()?;
    let qubits = cfg.pauli.qubits() as u64;
    let bell_per_attempt = u64::from(budget.n_bell_per_r) * qubits;
    let report = BudgetReport {
        epsilon: budget.epsilon,
        delta: budget.delta,
        d: budget.d,
        n_bell_per_r: budget.n_bell_per_r,
        bell_per_attempt,
        worst_case_bell_per_step: bell_per_attempt * u64::from(budget.d),
        steps_run: attempts_per_step.len(),
        total_attempts,
        total_bell_pairs: total_attempts * bell_per_attempt,
        failed: failed_at_step.is_some(),
    };
    Ok(TeleportRunResult {
        result: TrajectoryResult { times, states, record, terminal_fidelity },
        attempts_per_step,
        failed_at_step,
        report,
    })
}
