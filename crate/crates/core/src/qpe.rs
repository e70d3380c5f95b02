//! Parallel amplitude estimation of candidate supports.
//!
//! For a single candidate `C` with support `s = sin^2(theta)`, the operator
//! `G_C = (2|X_N><X_N| - I) O_C` rotates the uniform transaction state by
//! `2 theta` and has eigenvalues `e^{+-2i theta}`. Running phase estimation
//! with `T = 2^t` grid points leaves the estimation register concentrated
//! near `y = T theta / pi` or `T - T theta / pi`, and `sin^2(pi y / T)`
//! estimates `s`. Because the k-itemset oracle reads the candidate from item
//! registers, one controlled-power circuit estimates every candidate of a
//! superposition at once.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::data::{Itemset, TransactionDb};
use crate::oracle::{apply_phase_oracle_k, Ancillas, OracleMode, OracleRegisters, OracleTable, QueryCounter};
use crate::qsim::{ControlledUnitary, Controls, QsimError, Register, RegisterLayout, Statevector, DEFAULT_QUBIT_CAP};
use crate::{Error, Result};

/// Slack for comparing decoded grid values against thresholds.
pub const GRID_EPS: f64 = 1e-12;

/// `ceil(log2(n))`, at least 1.
pub fn register_width(n: usize) -> usize {
    (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1) as usize
}

pub fn check_grid_size(t: usize) -> Result<u32> {
    if t < 2 || !t.is_power_of_two() {
        return Err(Error::InvalidGridSize(t));
    }
    Ok(t.trailing_zeros())
}

/// Rotation angle of the single-candidate Grover operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverSpectrum {
    pub theta: f64,
    pub support: f64,
    /// `s` is 0 or 1; the two eigenvectors coincide there.
    pub degenerate: bool,
}

impl GroverSpectrum {
    pub fn from_support(s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::SupportOutOfRange(s));
        }
        Ok(GroverSpectrum {
            theta: s.sqrt().asin(),
            support: s,
            degenerate: s == 0.0 || s == 1.0,
        })
    }

    /// `(e^{2i theta}, e^{-2i theta})`.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        (Complex64::from_polar(1.0, 2.0 * self.theta), Complex64::from_polar(1.0, -2.0 * self.theta))
    }
}

/// Probability of every estimation-register outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDistribution {
    probs: Vec<f64>,
}

impl PhaseDistribution {
    pub fn from_probs(probs: Vec<f64>) -> Self {
        PhaseDistribution { probs }
    }

    pub fn t(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, y: usize) -> f64 {
        self.probs[y]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total_variation(&self, other: &[f64]) -> f64 {
        0.5 * self.probs.iter().zip(other).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// Mixes several distributions with the given weights.
    pub fn mixture(parts: &[(f64, &PhaseDistribution)]) -> PhaseDistribution {
        let t = parts.first().map_or(0, |(_, d)| d.t());
        let mut probs = vec![0.0; t];
        for (w, d) in parts {
            for (p, q) in probs.iter_mut().zip(&d.probs) {
                *p += w * q;
            }
        }
        PhaseDistribution { probs }
    }
}

/// `|<y|E_T(omega)>|^2` with `Delta = T omega - y`:
/// `sin^2(pi Delta) / (T^2 sin^2(pi Delta / T))`, or the point mass when
/// `Delta` is an integer.
fn branch_probability(t: usize, t_omega: f64, y: usize) -> f64 {
    let tf = t as f64;
    let delta = t_omega - y as f64;
    let nearest = delta.round();
    if (delta - nearest).abs() < 1e-12 {
        return if (nearest as i64).rem_euclid(t as i64) == 0 { 1.0 } else { 0.0 };
    }
    let num = (PI * delta).sin();
    let den = tf * (PI * delta / tf).sin();
    (num * num) / (den * den)
}

/// Closed-form law of the estimation register after phase estimation on a
/// candidate of support `s`.
pub fn analytic_phase_distribution(s: f64, t: usize) -> Result<PhaseDistribution> {
    check_grid_size(t)?;
    let spec = GroverSpectrum::from_support(s)?;
    let mut probs = vec![0.0; t];
    if spec.support == 0.0 {
        probs[0] = 1.0;
    } else if spec.support == 1.0 {
        probs[t / 2] = 1.0;
    } else {
        let w = spec.theta / PI;
        for (y, p) in probs.iter_mut().enumerate() {
            *p = 0.5 * branch_probability(t, t as f64 * w, y) + 0.5 * branch_probability(t, t as f64 * (1.0 - w), y);
        }
    }
    Ok(PhaseDistribution { probs })
}

/// A decoded support `sin^2(pi y / T)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportEstimate {
    /// Canonical grid index `min(y, T - y)`.
    pub y: usize,
    pub t: usize,
    pub value: f64,
    /// `2 pi sqrt(v(1-v)) / T + pi^2 / T^2` at the estimate.
    pub epsilon_scale: f64,
}

impl SupportEstimate {
    /// Distance in value to the adjacent grid point.
    pub fn grid_step(&self) -> f64 {
        (grid_value(self.y + 1, self.t) - self.value).abs()
    }
}

fn grid_value(y: usize, t: usize) -> f64 {
    let s = (PI * y as f64 / t as f64).sin();
    s * s
}

pub fn decode_support(y: usize, t: usize) -> Result<SupportEstimate> {
    check_grid_size(t)?;
    if y >= t {
        return Err(Error::GridIndexOutOfRange { y, t });
    }
    let canonical = y.min(t - y);
    let value = grid_value(canonical, t);
    let tf = t as f64;
    Ok(SupportEstimate {
        y: canonical,
        t,
        value,
        epsilon_scale: 2.0 * PI * (value * (1.0 - value)).sqrt() / tf + PI * PI / (tf * tf),
    })
}

/// Applies `G = ((2|X_N><X_N| - I) (x) I) O^(k)`, optionally under controls.
pub struct GroverOperator<'a> {
    table: &'a OracleTable,
    regs: &'a OracleRegisters,
    mode: OracleMode,
    uniform: Vec<Complex64>,
    counter: &'a mut QueryCounter,
}

impl<'a> GroverOperator<'a> {
    pub fn new(table: &'a OracleTable, regs: &'a OracleRegisters, mode: OracleMode, counter: &'a mut QueryCounter) -> Result<Self> {
        let n = table.n_transactions();
        if n > regs.transaction.dim() {
            return Err(QsimError::LimitTooLarge {
                limit: n,
                dim: regs.transaction.dim(),
            }
            .into());
        }
        Ok(GroverOperator {
            table,
            regs,
            mode,
            uniform: vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n],
            counter,
        })
    }
}

impl ControlledUnitary for GroverOperator<'_> {
    type Error = Error;

    fn qubits(&self) -> Vec<usize> {
        self.regs.qubits()
    }

    fn apply(&mut self, state: &mut Statevector, controls: Controls) -> Result<()> {
        apply_phase_oracle_k(state, self.table, self.regs, self.mode, controls, self.counter)?;
        state.reflect_register_about(self.regs.transaction, &self.uniform, controls)?;
        self.counter.add_grover_applications(1);
        Ok(())
    }
}

pub fn apply_grover_operator(
    state: &mut Statevector,
    table: &OracleTable,
    regs: &OracleRegisters,
    mode: OracleMode,
    counter: &mut QueryCounter,
) -> Result<()> {
    GroverOperator::new(table, regs, mode, counter)?.apply(state, Controls::none())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PaeOptions {
    pub oracle_mode: OracleMode,
    pub qubit_cap: usize,
}

impl Default for PaeOptions {
    fn default() -> Self {
        PaeOptions {
            oracle_mode: OracleMode::Circuit,
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }
}

/// Register handles of a parallel-amplitude-estimation state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaeRegisters {
    pub estimation: Register,
    pub oracle: OracleRegisters,
    /// Candidate index register, present for k > 1.
    pub index: Option<Register>,
    pub t: usize,
    pub k: usize,
}

impl PaeRegisters {
    /// Registers read out in the final measurement: estimation, index (if any), items.
    pub fn readout(&self) -> Vec<Register> {
        let mut r = vec![self.estimation];
        r.extend(self.index);
        r.extend(self.oracle.items.iter().copied());
        r
    }

    /// Splits a joint readout value into `(y, item values)`.
    pub fn decode_readout(&self, joint: usize) -> (usize, Vec<usize>) {
        let y = joint & (self.t - 1);
        let mut rest = joint >> self.estimation.width;
        if let Some(ix) = self.index {
            rest >>= ix.width;
        }
        let items = self
            .oracle
            .items
            .iter()
            .map(|r| {
                let v = rest & (r.dim() - 1);
                rest >>= r.width;
                v
            })
            .collect();
        (y, items)
    }
}

/// Layout for estimating k-itemset supports, before any state is prepared.
pub fn pae_layout(
    n_transactions: usize,
    n_items: usize,
    n_candidates: usize,
    k: usize,
    t: usize,
    options: &PaeOptions,
) -> Result<(RegisterLayout, PaeRegisters)> {
    let tq = check_grid_size(t)? as usize;
    let mut b = RegisterLayout::builder()
        .qubit_cap(options.qubit_cap)
        .register("estimation", tq)
        .register("transaction", register_width(n_transactions));
    if k > 1 {
        b = b.register("index", register_width(n_candidates));
    }
    let m = register_width(n_items);
    for l in 0..k {
        b = b.register(format!("item{l}"), m);
    }
    if options.oracle_mode == OracleMode::Circuit {
        b = b.register("ancilla", k).register("kickback", 1);
    }
    let layout = b.build()?;
    let ancillas = match options.oracle_mode {
        OracleMode::Circuit => Some(Ancillas {
            data: layout.register("ancilla")?,
            kickback: layout.register("kickback")?.offset,
        }),
        OracleMode::Diagonal => None,
    };
    let regs = PaeRegisters {
        estimation: layout.register("estimation")?,
        oracle: OracleRegisters {
            transaction: layout.register("transaction")?,
            items: (0..k).map(|l| layout.register(&format!("item{l}"))).collect::<Result<_, _>>()?,
            ancillas,
        },
        index: layout.find("index"),
        t,
        k,
    };
    Ok((layout, regs))
}

/// Checks that `candidates` is a nonempty list of distinct, in-range k-itemsets.
pub fn validate_candidates(db: &TransactionDb, candidates: &[Itemset], k: usize) -> Result<()> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let mut seen = std::collections::HashSet::new();
    for c in candidates {
        if c.len() != k {
            return Err(Error::CandidateSize {
                itemset: c.clone(),
                size: c.len(),
                k,
            });
        }
        c.check_bounds(db.n_items())?;
        if !seen.insert(c) {
            return Err(Error::DuplicateCandidate(c.clone()));
        }
    }
    Ok(())
}

/// Loads the candidate superposition: `sum_j |C_j>` for k = 1, the paired
/// `sum_j |j>|C_j>` otherwise.
fn load_candidates(state: &mut Statevector, regs: &PaeRegisters, candidates: &[Itemset]) -> Result<()> {
    let amp = Complex64::new(1.0 / (candidates.len() as f64).sqrt(), 0.0);
    let mut targets: Vec<Register> = Vec::new();
    targets.extend(regs.index);
    targets.extend(regs.oracle.items.iter().copied());
    let width: usize = targets.iter().map(|r| r.width).sum();
    let mut joint = vec![Complex64::new(0.0, 0.0); 1 << width];
    for (j, c) in candidates.iter().enumerate() {
        let mut v = 0usize;
        let mut shift = 0;
        if let Some(ix) = regs.index {
            v |= j;
            shift += ix.width;
        }
        for (item, r) in c.items().iter().zip(&regs.oracle.items) {
            v |= (*item as usize) << shift;
            shift += r.width;
        }
        joint[v] = amp;
    }
    state.inject_state(&targets, &joint)?;
    Ok(())
}

/// Steps 1 to 3: uniform estimation register, `|X_N>`, candidate
/// superposition, `sum_y |y><y| (x) G^y` as controlled powers `G^(2^p)`,
/// then the inverse Fourier transform. Costs exactly `T - 1` Grover
/// applications.
pub fn parallel_amplitude_estimation(
    db: &TransactionDb,
    candidates: &[Itemset],
    k: usize,
    t: usize,
    options: &PaeOptions,
    counter: &mut QueryCounter,
) -> Result<(Statevector, PaeRegisters)> {
    let table = OracleTable::new(db);
    pae_with_table(&table, db, candidates, k, t, options, counter)
}

pub(crate) fn pae_with_table(
    table: &OracleTable,
    db: &TransactionDb,
    candidates: &[Itemset],
    k: usize,
    t: usize,
    options: &PaeOptions,
    counter: &mut QueryCounter,
) -> Result<(Statevector, PaeRegisters)> {
    validate_candidates(db, candidates, k)?;
    let (layout, regs) = pae_layout(db.n_transactions(), db.n_items(), candidates.len(), k, t, options)?;
    let mut state = Statevector::new(layout);
    state.prepare_uniform(regs.estimation, t)?;
    state.prepare_uniform(regs.oracle.transaction, db.n_transactions())?;
    load_candidates(&mut state, &regs, candidates)?;
    if let Some(anc) = regs.oracle.ancillas {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let kick = Register {
            offset: anc.kickback,
            width: 1,
        };
        state.inject_state(&[kick], &[Complex64::new(h, 0.0), Complex64::new(-h, 0.0)])?;
    }
    let mut grover = GroverOperator::new(table, &regs.oracle, options.oracle_mode, counter)?;
    for p in 0..regs.estimation.width {
        state.apply_controlled_power(regs.estimation.qubit(p), &mut grover, p as u32)?;
    }
    state.inverse_qft(regs.estimation)?;
    Ok((state, regs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::exact_support;
    use crate::qsim::UNITARY_TOL;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn register_widths() {
        assert_eq!(register_width(1), 1);
        assert_eq!(register_width(2), 1);
        assert_eq!(register_width(3), 2);
        assert_eq!(register_width(4), 2);
        assert_eq!(register_width(5), 3);
        assert_eq!(register_width(16), 4);
        assert_eq!(register_width(17), 5);
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_support(0, 8).unwrap().value, 0.0);
        assert!(close(decode_support(4, 8).unwrap().value, 1.0, 1e-15));
        assert!(close(decode_support(1, 8).unwrap().value, 0.146_446_609_406_726_24, 1e-15));
        let a = decode_support(7, 8).unwrap();
        assert_eq!(a.y, 1);
        assert_eq!(a.value, decode_support(1, 8).unwrap().value);
        assert!(decode_support(8, 8).is_err());
        assert!(decode_support(1, 6).is_err());
    }

    #[test]
    fn spectrum() {
        let g = GroverSpectrum::from_support(0.5).unwrap();
        assert!(close(g.theta, PI / 4.0, 1e-15));
        assert!(close(g.theta.sin().powi(2), 0.5, 1e-12));
        assert!(!g.degenerate);
        let (p, m) = g.eigenvalues();
        assert!((p - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((m - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!(GroverSpectrum::from_support(0.0).unwrap().degenerate);
        assert!(GroverSpectrum::from_support(1.0).unwrap().degenerate);
        assert!(GroverSpectrum::from_support(1.5).is_err());
    }

    #[test]
    fn analytic_examples() {
        let d = analytic_phase_distribution(0.5, 8).unwrap();
        assert!(close(d.prob(2), 0.5, 1e-12) && close(d.prob(6), 0.5, 1e-12));
        assert!(close(d.probs().iter().sum::<f64>(), 1.0, 1e-12));
        let d = analytic_phase_distribution(0.0, 16).unwrap();
        assert_eq!(d.prob(0), 1.0);
        let d = analytic_phase_distribution(1.0, 16).unwrap();
        assert_eq!(d.prob(8), 1.0);
        assert!(analytic_phase_distribution(-0.1, 8).is_err());
        assert!(analytic_phase_distribution(0.5, 12).is_err());
        for s in [0.1, 0.3, 0.77, 0.999] {
            for t in [8, 16, 64] {
                let d = analytic_phase_distribution(s, t).unwrap();
                assert!(close(d.probs().iter().sum::<f64>(), 1.0, 1e-12), "s={s} t={t}");
                // Symmetric under y -> T - y.
                for y in 1..t {
                    assert!(close(d.prob(y), d.prob(t - y), 1e-12));
                }
            }
        }
    }

    /// Dense N x N matrix of `G_C` for one candidate, as an independent oracle.
    fn dense_single_grover(db: &TransactionDb, c: &Itemset) -> Vec<Vec<f64>> {
        let n = db.n_transactions();
        let sign: Vec<f64> = (0..n).map(|i| if db.row_contains(i, c) { -1.0 } else { 1.0 }).collect();
        (0..n)
            .map(|r| (0..n).map(|col| (2.0 / n as f64 - if r == col { 1.0 } else { 0.0 }) * sign[col]).collect())
            .collect()
    }

    fn product_db() -> TransactionDb {
        TransactionDb::from_bit_strings(&["1101", "0111", "1100", "1010", "0110"]).unwrap()
    }

    #[test]
    fn grover_factorizes_on_product_input() {
        let db = product_db();
        let table = OracleTable::new(&db);
        let c = Itemset::new([0, 1]).unwrap();
        let opts = PaeOptions::default();
        let (layout, regs) = pae_layout(5, 4, 1, 2, 2, &opts).unwrap();
        let mut state = Statevector::new(layout);
        state.prepare_uniform(regs.oracle.transaction, 5).unwrap();
        load_candidates(&mut state, &regs, std::slice::from_ref(&c)).unwrap();
        let anc = regs.oracle.ancillas.unwrap();
        state.apply_x(anc.kickback).unwrap();
        state.apply_h(anc.kickback).unwrap();

        let g = dense_single_grover(&db, &c);
        let mut x: Vec<f64> = vec![1.0 / 5f64.sqrt(); 5];
        let mut counter = QueryCounter::new();
        for y in 1..=8 {
            apply_grover_operator(&mut state, &table, &regs.oracle, OracleMode::Circuit, &mut counter).unwrap();
            x = (0..5).map(|r| (0..5).map(|col| g[r][col] * x[col]).sum()).collect();
            let got = state.marginal_probabilities(&[regs.oracle.transaction]);
            for i in 0..5 {
                assert!(close(got[i], x[i] * x[i], 1e-12), "y={y} i={i}");
            }
            // The item registers stay at |C>.
            let items = state.marginal_probabilities(&regs.oracle.items);
            assert!(close(items[1 << regs.oracle.items[0].width], 1.0, 1e-12));
        }
        assert_eq!(counter.grover_applications(), 8);
        assert_eq!(counter.basic_oracle_calls(), 32);
    }

    #[test]
    fn grover_rotation_angles() {
        // s = 1/2: two applications rotate |X_N> by pi, so <X_N|G^2|X_N> = -1.
        let db = TransactionDb::from_bit_strings(&["1", "0", "1", "0"]).unwrap();
        let table = OracleTable::new(&db);
        let opts = PaeOptions {
            oracle_mode: OracleMode::Diagonal,
            ..Default::default()
        };
        let (layout, regs) = pae_layout(4, 1, 1, 1, 2, &opts).unwrap();
        let mut state = Statevector::new(layout);
        state.prepare_uniform(regs.oracle.transaction, 4).unwrap();
        let start = state.clone();
        let mut counter = QueryCounter::new();
        for _ in 0..2 {
            apply_grover_operator(&mut state, &table, &regs.oracle, OracleMode::Diagonal, &mut counter).unwrap();
        }
        assert!((start.inner(&state).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        // s = 0: G acts as identity on |X_N>|C>.
        let db = TransactionDb::from_bit_strings(&["0", "0", "0"]).unwrap();
        let table = OracleTable::new(&db);
        let (layout, regs) = pae_layout(3, 1, 1, 1, 2, &opts).unwrap();
        let mut state = Statevector::new(layout);
        state.prepare_uniform(regs.oracle.transaction, 3).unwrap();
        let start = state.clone();
        apply_grover_operator(&mut state, &table, &regs.oracle, OracleMode::Diagonal, &mut counter).unwrap();
        assert!((start.inner(&state).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    fn estimation_distribution(db: &TransactionDb, cands: &[Itemset], k: usize, t: usize, mode: OracleMode) -> (Vec<f64>, QueryCounter) {
        let mut counter = QueryCounter::new();
        let opts = PaeOptions {
            oracle_mode: mode,
            ..Default::default()
        };
        let (state, regs) = parallel_amplitude_estimation(db, cands, k, t, &opts, &mut counter).unwrap();
        assert!(close(state.norm(), 1.0, 1e-10));
        (state.marginal_probabilities(&[regs.estimation]), counter)
    }

    #[test]
    fn pae_single_candidate_grid_cases() {
        let half = TransactionDb::from_bit_strings(&["1", "1", "0", "0"]).unwrap();
        let (p, counter) = estimation_distribution(&half, &[Itemset::singleton(0)], 1, 8, OracleMode::Circuit);
        assert!(close(p[2], 0.5, 1e-12) && close(p[6], 0.5, 1e-12));
        assert_eq!(counter.grover_applications(), 7);
        assert_eq!(counter.basic_oracle_calls(), 14);

        let zero = TransactionDb::from_bit_strings(&["01", "01", "01"]).unwrap();
        for t in [4, 8, 16] {
            let (p, _) = estimation_distribution(&zero, &[Itemset::singleton(0)], 1, t, OracleMode::Circuit);
            assert!(close(p[0], 1.0, 1e-12));
        }
    }

    #[test]
    fn pae_two_candidates_is_mixture() {
        // Item 0 has support 1/2, item 1 support 1.
        let db = TransactionDb::from_bit_strings(&["11", "11", "01", "01"]).unwrap();
        let cands = [Itemset::singleton(0), Itemset::singleton(1)];
        let (p, _) = estimation_distribution(&db, &cands, 1, 8, OracleMode::Circuit);
        let a = analytic_phase_distribution(0.5, 8).unwrap();
        let b = analytic_phase_distribution(1.0, 8).unwrap();
        let mix = PhaseDistribution::mixture(&[(0.5, &a), (0.5, &b)]);
        assert!(mix.total_variation(&p) < 1e-9);
    }

    #[test]
    fn pae_matches_analytic_off_grid() {
        // s = 3/10 on N = 10: off-grid for T = 16.
        let rows: Vec<&str> = (0..10).map(|i| if i < 3 { "1" } else { "0" }).collect();
        let db = TransactionDb::from_bit_strings(&rows).unwrap();
        let (p, _) = estimation_distribution(&db, &[Itemset::singleton(0)], 1, 16, OracleMode::Diagonal);
        let law = analytic_phase_distribution(0.3, 16).unwrap();
        assert!(law.total_variation(&p) < 1e-9);
    }

    #[test]
    fn pae_pairs_with_index_register() {
        let db = product_db();
        let cands = vec![Itemset::new([0, 1]).unwrap(), Itemset::new([1, 2]).unwrap(), Itemset::new([2, 3]).unwrap()];
        let t = 8;
        let mut counter = QueryCounter::new();
        let (state, regs) = parallel_amplitude_estimation(&db, &cands, 2, t, &PaeOptions::default(), &mut counter).unwrap();
        assert_eq!(counter.basic_oracle_calls(), 2 * 2 * (t as u64 - 1));
        let ix = regs.index.unwrap();
        let joint = state.marginal_probabilities(&[regs.estimation, ix]);
        for (j, c) in cands.iter().enumerate() {
            let s = exact_support(&db, c).unwrap().value();
            let law = analytic_phase_distribution(s, t).unwrap();
            let cond: Vec<f64> = (0..t).map(|y| joint[y | j << regs.estimation.width] * cands.len() as f64).collect();
            assert!(law.total_variation(&cond) < 1e-9, "candidate {c}");
        }
        assert!(close(state.norm(), 1.0, UNITARY_TOL * 100.0));
    }

    #[test]
    fn pae_validation_errors() {
        let db = product_db();
        let mut c = QueryCounter::new();
        let opts = PaeOptions::default();
        assert!(matches!(parallel_amplitude_estimation(&db, &[], 1, 8, &opts, &mut c), Err(Error::NoCandidates)));
        let pair = Itemset::new([0, 1]).unwrap();
        assert!(matches!(
            parallel_amplitude_estimation(&db, std::slice::from_ref(&pair), 1, 8, &opts, &mut c),
            Err(Error::CandidateSize { .. })
        ));
        assert!(matches!(
            parallel_amplitude_estimation(&db, &[pair.clone(), pair.clone()], 2, 8, &opts, &mut c),
            Err(Error::DuplicateCandidate(_))
        ));
        assert!(matches!(
            parallel_amplitude_estimation(&db, std::slice::from_ref(&pair), 2, 12, &opts, &mut c),
            Err(Error::InvalidGridSize(12))
        ));
        let tiny = PaeOptions {
            qubit_cap: 8,
            ..Default::default()
        };
        assert!(matches!(
            parallel_amplitude_estimation(&db, &[pair], 2, 8, &tiny, &mut c),
            Err(Error::Qsim(QsimError::QubitCapExceeded { cap: 8, .. }))
        ));
    }
}
