//! Query oracles over the transaction matrix and the cost ledger.
//!
//! The basic oracle `O|i>|j>|a> = |i>|j>|a xor D_ij>` is the only primitive
//! that reads the database. The k-itemset phase oracle
//! `|i>|j_1..j_k> -> (-1)^{D_ij_1 ... D_ij_k} |i>|j_1..j_k>` is built from it
//! by computing the k bits into ancillas, kicking the product back onto a
//! `|->` qubit with a k-controlled NOT, and uncomputing: 2k basic queries per
//! call. A direct diagonal implementation exists for speed; both charge the
//! counter identically.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::data::TransactionDb;
use crate::qsim::{Controls, Register, Statevector, NORM_TOL};
use crate::{Error, Result};

/// Query and gate counts of one experiment. Counters only ever increase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounter {
    basic_oracle_calls: u64,
    phase_oracle_k_calls: u64,
    grover_applications: u64,
    amplification_iterations: u64,
    measurements: u64,
    classical_row_scans: u64,
    generalized_cnot_gates: u64,
}

impl QueryCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basic_oracle_calls(&self) -> u64 {
        self.basic_oracle_calls
    }

    pub fn phase_oracle_k_calls(&self) -> u64 {
        self.phase_oracle_k_calls
    }

    pub fn grover_applications(&self) -> u64 {
        self.grover_applications
    }

    pub fn amplification_iterations(&self) -> u64 {
        self.amplification_iterations
    }

    pub fn measurements(&self) -> u64 {
        self.measurements
    }

    pub fn classical_row_scans(&self) -> u64 {
        self.classical_row_scans
    }

    /// Elementary-gate cost of all k-controlled NOTs applied so far.
    pub fn generalized_cnot_gates(&self) -> u64 {
        self.generalized_cnot_gates
    }

    pub fn add_basic_oracle_calls(&mut self, n: u64) {
        self.basic_oracle_calls += n;
    }

    pub fn add_phase_oracle_k_calls(&mut self, n: u64) {
        self.phase_oracle_k_calls += n;
    }

    pub fn add_grover_applications(&mut self, n: u64) {
        self.grover_applications += n;
    }

    pub fn add_amplification_iterations(&mut self, n: u64) {
        self.amplification_iterations += n;
    }

    pub fn add_measurements(&mut self, n: u64) {
        self.measurements += n;
    }

    pub fn add_classical_row_scans(&mut self, n: u64) {
        self.classical_row_scans += n;
    }

    pub fn add_generalized_cnot_gates(&mut self, n: u64) {
        self.generalized_cnot_gates += n;
    }

    /// Charges `times` applications of a Grover operator on k-itemsets
    /// without simulating them (one phase oracle, hence 2k basic queries, each).
    pub fn charge_grover(&mut self, k: usize, times: u64) {
        self.grover_applications += times;
        self.phase_oracle_k_calls += times;
        self.basic_oracle_calls += 2 * k as u64 * times;
        self.generalized_cnot_gates += generalized_cnot_cost(k) * times;
    }

    /// Adds every counter of `other` into `self`.
    pub fn absorb(&mut self, other: &QueryCounter) {
        self.basic_oracle_calls += other.basic_oracle_calls;
        self.phase_oracle_k_calls += other.phase_oracle_k_calls;
        self.grover_applications += other.grover_applications;
        self.amplification_iterations += other.amplification_iterations;
        self.measurements += other.measurements;
        self.classical_row_scans += other.classical_row_scans;
        self.generalized_cnot_gates += other.generalized_cnot_gates;
    }
}

/// Elementary-gate cost model of a k-controlled NOT: one CNOT for k = 1,
/// otherwise 2k - 3 Toffolis using k - 2 borrowed work qubits.
pub fn generalized_cnot_cost(k: usize) -> u64 {
    match k {
        0 => 0,
        1 => 1,
        k => 2 * k as u64 - 3,
    }
}

/// Dense copy of D for oracle kernels. Reads outside the N x M matrix give 0,
/// so padded basis states of power-of-two registers are never marked.
#[derive(Clone, Debug)]
pub struct OracleTable {
    n_transactions: usize,
    n_items: usize,
    bits: Vec<bool>,
}

impl OracleTable {
    pub fn new(db: &TransactionDb) -> Self {
        let (n, m) = (db.n_transactions(), db.n_items());
        let mut bits = vec![false; n * m];
        for (i, row) in db.rows().enumerate() {
            for &j in row {
                bits[i * m + j as usize] = true;
            }
        }
        OracleTable {
            n_transactions: n,
            n_items: m,
            bits,
        }
    }

    pub fn n_transactions(&self) -> usize {
        self.n_transactions
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        i < self.n_transactions && j < self.n_items && self.bits[i * self.n_items + j]
    }

    /// `tau(i, X)`: whether transaction `i` holds every item in `items`.
    pub fn tau(&self, i: usize, items: impl IntoIterator<Item = usize>) -> bool {
        items.into_iter().all(|j| self.get(i, j))
    }
}

/// How the k-itemset phase oracle is realized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    /// Basic-oracle compute, k-controlled NOT onto `|->`, uncompute.
    #[default]
    Circuit,
    /// Direct sign flip on the diagonal. Needs no ancillas.
    Diagonal,
}

/// Work qubits of the circuit construction: k data qubits and one kickback qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ancillas {
    pub data: Register,
    pub kickback: usize,
}

/// Registers the phase oracle acts on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRegisters {
    pub transaction: Register,
    pub items: Vec<Register>,
    pub ancillas: Option<Ancillas>,
}

impl OracleRegisters {
    pub fn k(&self) -> usize {
        self.items.len()
    }

    /// Every qubit the oracle touches.
    pub fn qubits(&self) -> Vec<usize> {
        let mut q: Vec<usize> = self.transaction.qubits().collect();
        for r in &self.items {
            q.extend(r.qubits());
        }
        if let Some(a) = &self.ancillas {
            q.extend(a.data.qubits());
            q.push(a.kickback);
        }
        q
    }
}

/// `|i>|j>|a> -> |i>|j>|a xor D_ij>` on the active slices.
pub fn apply_basic_oracle(
    state: &mut Statevector,
    table: &OracleTable,
    i_reg: Register,
    j_reg: Register,
    a_qubit: usize,
    controls: Controls,
    counter: &mut QueryCounter,
) -> Result<()> {
    state.flip_if(a_qubit, controls, |idx| table.get(i_reg.value(idx), j_reg.value(idx)))?;
    counter.add_basic_oracle_calls(1);
    Ok(())
}

/// `|x_1..x_k>|y> -> |x_1..x_k>|y xor x_1...x_k>`.
pub fn generalized_cnot(
    state: &mut Statevector,
    control_qubits: &[usize],
    target: usize,
    controls: Controls,
    counter: &mut QueryCounter,
) -> Result<()> {
    if control_qubits.contains(&target) {
        return Err(crate::qsim::QsimError::ControlOverlap(target).into());
    }
    let all = control_qubits.iter().fold(controls, |c, &q| c.and(q));
    state.flip_if(target, all, |_| true)?;
    counter.add_generalized_cnot_gates(generalized_cnot_cost(control_qubits.len()));
    Ok(())
}

fn check_ancillas(state: &Statevector, anc: &Ancillas) -> Result<()> {
    let data_mask = anc.data.mask();
    let kb = 1usize << anc.kickback;
    let amps = state.amplitudes();
    let mut stray = 0.0;
    let mut plus_part = 0.0;
    for (i, a) in amps.iter().enumerate() {
        if i & data_mask != 0 {
            stray += a.norm_sqr();
        } else if i & kb == 0 {
            // |-> component requires amp(i | kb) = -amp(i).
            plus_part += (a + amps[i | kb]).norm_sqr() / 2.0;
        }
    }
    if stray > NORM_TOL {
        return Err(Error::AncillaState(format!("data qubits carry weight {stray:e} off |0>")));
    }
    if plus_part > NORM_TOL {
        return Err(Error::AncillaState(format!("kickback qubit has weight {plus_part:e} on |+>")));
    }
    Ok(())
}

/// Phase-flips `|i>|j_1..j_k>` iff transaction `i` contains every `j_l`.
///
/// In circuit mode the ancilla data qubits must be `|0>` and the kickback
/// qubit `|->`; both are restored. Each call costs 2k basic queries and one
/// phase-oracle query in either mode.
pub fn apply_phase_oracle_k(
    state: &mut Statevector,
    table: &OracleTable,
    regs: &OracleRegisters,
    mode: OracleMode,
    controls: Controls,
    counter: &mut QueryCounter,
) -> Result<()> {
    let k = regs.k();
    if k == 0 {
        return Err(Error::Config("phase oracle needs at least one item register".into()));
    }
    match mode {
        OracleMode::Circuit => {
            let anc = regs
                .ancillas
                .ok_or_else(|| Error::AncillaState("circuit mode needs ancilla registers".into()))?;
            if anc.data.width != k {
                return Err(Error::AncillaState(format!("{} data qubits for k = {k}", anc.data.width)));
            }
            check_ancillas(state, &anc)?;
            for (l, item) in regs.items.iter().enumerate() {
                apply_basic_oracle(state, table, regs.transaction, *item, anc.data.qubit(l), controls, counter)?;
            }
            let data: Vec<usize> = anc.data.qubits().collect();
            generalized_cnot(state, &data, anc.kickback, controls, counter)?;
            for (l, item) in regs.items.iter().enumerate().rev() {
                apply_basic_oracle(state, table, regs.transaction, *item, anc.data.qubit(l), controls, counter)?;
            }
        }
        OracleMode::Diagonal => {
            let minus = Complex64::new(-1.0, 0.0);
            let one = Complex64::new(1.0, 0.0);
            state.apply_phase(controls, |idx| {
                let i = regs.transaction.value(idx);
                if table.tau(i, regs.items.iter().map(|r| r.value(idx))) {
                    minus
                } else {
                    one
                }
            })?;
            counter.add_basic_oracle_calls(2 * k as u64);
            counter.add_generalized_cnot_gates(generalized_cnot_cost(k));
        }
    }
    counter.add_phase_oracle_k_calls(1);
    Ok(())
}
