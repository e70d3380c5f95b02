//! The mining driver: amplitude amplification of the estimation state onto
//! frequent outcomes, the measurement loop for one itemset size, and the
//! level-wise loop over all sizes.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classical::{cand_gen, initial_candidates, IterationStats};
use crate::data::{exact_support, ExactSupport, Itemset, TransactionDb};
use crate::oracle::{OracleMode, OracleTable, QueryCounter};
use crate::qpe::{decode_support, pae_with_table, PaeOptions, PaeRegisters, SupportEstimate, GRID_EPS};
use crate::qsim::{sample_index, Statevector, DEFAULT_QUBIT_CAP};
use crate::{Error, Result};

/// Good-probability below which the frequent subspace is treated as empty.
pub const MIN_GOOD_PROBABILITY: f64 = 1e-12;

/// Growth factor of the exponential schedule.
pub const BBHT_LAMBDA: f64 = 6.0 / 5.0;

/// Rounds after which the exponential schedule gives up.
pub const BBHT_MAX_ROUNDS: usize = 10_000;

/// Grid outcomes whose decoded support reaches the threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct GoodSet {
    t: usize,
    min_supp: f64,
    members: Vec<bool>,
}

impl GoodSet {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn min_supp(&self) -> f64 {
        self.min_supp
    }

    pub fn contains(&self, y: usize) -> bool {
        self.members.get(y).copied().unwrap_or(false)
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.t).filter(|&y| self.members[y]).collect()
    }
}

/// Outcomes `y` of a `T`-point grid with `sin^2(pi y / T) >= min_supp`.
///
/// The comparison tolerates `GRID_EPS` of rounding so that on-grid
/// thresholds such as `sin^2(pi/4) = 1/2` are inclusive.
pub fn good_set(t: usize, min_supp: f64) -> Result<GoodSet> {
    crate::qpe::check_grid_size(t)?;
    if !(min_supp > 0.0 && min_supp <= 1.0) {
        return Err(Error::InvalidMinSupport(min_supp));
    }
    let members = (0..t)
        .map(|y| (PI * y as f64 / t as f64).sin().powi(2) >= min_supp - GRID_EPS)
        .collect();
    Ok(GoodSet { t, min_supp, members })
}

/// How the state is steered onto frequent outcomes before measurement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AmplificationMode {
    /// Renormalize onto the good subspace directly. Not a physical
    /// operation and charged nothing.
    IdealProjection,
    /// Grover iterations with the good probability known in advance.
    GroverKnown,
    /// Exponential schedule for an unknown good probability.
    #[default]
    Bbht,
}

impl std::fmt::Display for AmplificationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AmplificationMode::IdealProjection => "ideal-projection",
            AmplificationMode::GroverKnown => "grover-known",
            AmplificationMode::Bbht => "bbht",
        })
    }
}

/// Probability that the estimation register reads a good outcome.
pub fn good_probability(state: &Statevector, regs: &PaeRegisters, good: &GoodSet) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| good.contains(regs.estimation.value(*i)))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Iterations that rotate good-probability `p` closest to one.
pub fn grover_known_iterations(p: f64) -> usize {
    let theta = p.sqrt().min(1.0).asin();
    (PI / (4.0 * theta) - 0.5).round().max(0.0) as usize
}

/// Largest schedule bound: the square root of the readout space size.
fn bbht_cap(regs: &PaeRegisters) -> f64 {
    let width: usize = regs.readout().iter().map(|r| r.width).sum();
    ((1usize << width) as f64).sqrt().max(1.0)
}

/// One iteration `Q = (2|psi3><psi3| - I) S_good`.
fn grover_iteration(state: &mut Statevector, psi3: &Statevector, regs: &PaeRegisters, good: &GoodSet) -> Result<()> {
    let est = regs.estimation;
    state.apply_phase(crate::qsim::Controls::none(), |i| {
        if good.contains(est.value(i)) {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })?;
    state.reflect_about_state(psi3)?;
    Ok(())
}

fn charge_iterations(counter: &mut QueryCounter, regs: &PaeRegisters, n: usize) {
    counter.charge_grover(regs.k, 2 * (regs.t as u64 - 1) * n as u64);
    counter.add_amplification_iterations(n as u64);
}

/// Charges one preparation of the estimation state and one measurement.
fn charge_round(counter: &mut QueryCounter, regs: &PaeRegisters) {
    counter.charge_grover(regs.k, regs.t as u64 - 1);
    counter.add_measurements(1);
}

/// Output of [`amplitude_amplify`].
#[derive(Clone, Debug)]
pub struct Amplified {
    pub state: Statevector,
    /// Grover iterations applied to the returned state.
    pub iterations: usize,
    /// Preparations of the input state used, including the returned one.
    pub rounds: usize,
    /// Good-probability of the input state.
    pub good_probability: f64,
}

/// Steers `psi3` onto the good outcomes.
///
/// Charges the iterations of the returned state. The exponential schedule
/// also charges every discarded round: one fresh preparation, its
/// iterations and an estimation-register measurement. Its returned state is
/// collapsed onto the good outcome it observed.
pub fn amplitude_amplify<R: Rng + ?Sized>(
    psi3: &Statevector,
    regs: &PaeRegisters,
    good: &GoodSet,
    mode: AmplificationMode,
    rng: &mut R,
    counter: &mut QueryCounter,
) -> Result<Amplified> {
    let p = good_probability(psi3, regs, good);
    if p <= MIN_GOOD_PROBABILITY {
        return Err(Error::NoGoodOutcomes);
    }
    match mode {
        AmplificationMode::IdealProjection => {
            let mut state = psi3.clone();
            let est = regs.estimation;
            state.project(|i| good.contains(est.value(i)))?;
            Ok(Amplified {
                state,
                iterations: 0,
                rounds: 1,
                good_probability: p,
            })
        }
        AmplificationMode::GroverKnown => {
            let r = grover_known_iterations(p);
            let mut state = psi3.clone();
            for _ in 0..r {
                grover_iteration(&mut state, psi3, regs, good)?;
            }
            charge_iterations(counter, regs, r);
            Ok(Amplified {
                state,
                iterations: r,
                rounds: 1,
                good_probability: p,
            })
        }
        AmplificationMode::Bbht => {
            let cap = bbht_cap(regs);
            let mut m = 1.0f64;
            for round in 1..=BBHT_MAX_ROUNDS {
                let j = (rng.gen::<f64>() * m).floor() as usize;
                let mut state = psi3.clone();
                for _ in 0..j {
                    grover_iteration(&mut state, psi3, regs, good)?;
                }
                charge_iterations(counter, regs, j);
                let y = state.measure(&[regs.estimation], rng)?[0];
                if good.contains(y) {
                    return Ok(Amplified {
                        state,
                        iterations: j,
                        rounds: round,
                        good_probability: p,
                    });
                }
                charge_round(counter, regs);
                m = (m * BBHT_LAMBDA).min(cap);
            }
            Err(Error::AmplificationDidNotConverge(BBHT_MAX_ROUNDS))
        }
    }
}

/// Readout distributions of `Q^j |psi3>`, extended lazily in `j`.
struct Ladder<'a> {
    psi3: &'a Statevector,
    regs: &'a PaeRegisters,
    good: &'a GoodSet,
    top: Statevector,
    readout: Vec<Vec<f64>>,
    good_prob: Vec<f64>,
}

impl<'a> Ladder<'a> {
    fn new(psi3: &'a Statevector, regs: &'a PaeRegisters, good: &'a GoodSet) -> Self {
        let mut ladder = Ladder {
            psi3,
            regs,
            good,
            top: psi3.clone(),
            readout: Vec::new(),
            good_prob: Vec::new(),
        };
        ladder.record();
        ladder
    }

    fn record(&mut self) {
        self.readout.push(self.top.marginal_probabilities(&self.regs.readout()));
        self.good_prob.push(good_probability(&self.top, self.regs, self.good));
    }

    fn rung(&mut self, j: usize) -> Result<&[f64]> {
        while self.readout.len() <= j {
            grover_iteration(&mut self.top, self.psi3, self.regs, self.good)?;
            self.record();
        }
        Ok(&self.readout[j])
    }
}

/// Knobs of the measurement loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiningOptions {
    pub oracle_mode: OracleMode,
    /// Consecutive measurements without a new itemset before stopping.
    pub patience: usize,
    /// Hard limit on measurement rounds per itemset size.
    pub max_shots: usize,
    pub qubit_cap: usize,
    /// Recheck boundary-uncertain itemsets against exact supports.
    pub verify_uncertain: bool,
    /// Largest itemset size mined by [`qarm_full`].
    pub max_k: usize,
}

impl Default for MiningOptions {
    fn default() -> Self {
        MiningOptions {
            oracle_mode: OracleMode::Circuit,
            patience: 25,
            max_shots: 100_000,
            qubit_cap: DEFAULT_QUBIT_CAP,
            verify_uncertain: false,
            max_k: usize::MAX,
        }
    }
}

impl MiningOptions {
    fn pae(&self) -> PaeOptions {
        PaeOptions {
            oracle_mode: self.oracle_mode,
            qubit_cap: self.qubit_cap,
        }
    }
}

/// One mined itemset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoundItemset {
    pub itemset: Itemset,
    pub estimate: SupportEstimate,
    /// The estimate is within one grid step of the threshold.
    pub boundary_uncertain: bool,
    /// Good measurements that named this itemset.
    pub observations: u64,
    /// Exact support, filled in by the verification pass.
    pub exact: Option<ExactSupport>,
}

/// Outcome of mining one itemset size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiningResult {
    pub k: usize,
    pub n_candidates: usize,
    pub found: Vec<FoundItemset>,
    pub counters: QueryCounter,
    pub mode: AmplificationMode,
    /// Measurement rounds, each preceded by one preparation of the estimation state.
    pub shots_used: u64,
}

impl MiningResult {
    pub fn itemsets(&self) -> Vec<Itemset> {
        self.found.iter().map(|f| f.itemset.clone()).collect()
    }
}

/// One amplified sample: `Some((y, candidate))` when the outcome was good.
struct Shot {
    outcome: Option<(usize, usize)>,
    rounds: usize,
    iterations: usize,
}

struct Sampler<'a> {
    ladder: Ladder<'a>,
    mode: AmplificationMode,
    regs: &'a PaeRegisters,
    good: &'a GoodSet,
    item_to_candidate: HashMap<usize, usize>,
    known_r: usize,
    cap: f64,
    ideal: Option<Vec<f64>>,
}

impl Sampler<'_> {
    fn candidate_of(&self, joint: usize) -> Option<usize> {
        match self.regs.index {
            Some(ix) => Some((joint >> self.regs.estimation.width) & (ix.dim() - 1)),
            None => {
                let (_, items) = self.regs.decode_readout(joint);
                self.item_to_candidate.get(&items[0]).copied()
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&mut self, j: usize, rng: &mut R) -> Result<(usize, Option<usize>)> {
        let probs = self.ladder.rung(j)?;
        let joint = sample_index(probs, rng);
        let y = joint & (self.regs.t - 1);
        Ok((y, self.candidate_of(joint)))
    }

    fn shot<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Shot> {
        match self.mode {
            AmplificationMode::IdealProjection => {
                let probs = self.ideal.get_or_insert_with(|| {
                    conditional_on_good(&self.ladder.readout[0], self.regs, self.good)
                });
                let joint = sample_index(probs, rng);
                let y = joint & (self.regs.t - 1);
                Ok(Shot {
                    outcome: self.candidate_of(joint).map(|c| (y, c)),
                    rounds: 1,
                    iterations: 0,
                })
            }
            AmplificationMode::GroverKnown => {
                let (y, c) = self.draw(self.known_r, rng)?;
                Ok(Shot {
                    outcome: c.filter(|_| self.good.contains(y)).map(|c| (y, c)),
                    rounds: 1,
                    iterations: self.known_r,
                })
            }
            AmplificationMode::Bbht => {
                let mut m = 1.0f64;
                let mut iterations = 0;
                for round in 1..=BBHT_MAX_ROUNDS {
                    let j = (rng.gen::<f64>() * m).floor() as usize;
                    iterations += j;
                    let (y, c) = self.draw(j, rng)?;
                    if self.good.contains(y) {
                        return Ok(Shot {
                            outcome: c.map(|c| (y, c)),
                            rounds: round,
                            iterations,
                        });
                    }
                    m = (m * BBHT_LAMBDA).min(self.cap);
                }
                Err(Error::AmplificationDidNotConverge(BBHT_MAX_ROUNDS))
            }
        }
    }
}

/// Most frequent canonical grid outcome; ties go to the smaller `y`.
fn modal_outcome(counts: &BTreeMap<usize, u64>) -> usize {
    let mut best = (0usize, 0u64);
    for (&y, &n) in counts {
        if n > best.1 {
            best = (y, n);
        }
    }
    best.0
}

/// Mines the frequent itemsets of one size.
///
/// Repeats {prepare, amplify, measure estimation, index and item registers}
/// until `options.patience` consecutive rounds bring no new itemset. Every
/// round is charged one preparation (`2k(T-1)` basic queries) and every
/// Grover iteration twice that, so
/// `basic_oracle_calls = 2k(T-1) * (shots_used + 2 * amplification_iterations)`.
#[allow(clippy::too_many_arguments)]
pub fn qarm_mine_k<R: Rng + ?Sized>(
    db: &TransactionDb,
    candidates: &[Itemset],
    k: usize,
    t: usize,
    min_supp: f64,
    mode: AmplificationMode,
    rng: &mut R,
    options: &MiningOptions,
) -> Result<MiningResult> {
    let table = OracleTable::new(db);
    mine_k_with_table(&table, db, candidates, k, t, min_supp, mode, rng, options)
}

#[allow(clippy::too_many_arguments)]
fn mine_k_with_table<R: Rng + ?Sized>(
    table: &OracleTable,
    db: &TransactionDb,
    candidates: &[Itemset],
    k: usize,
    t: usize,
    min_supp: f64,
    mode: AmplificationMode,
    rng: &mut R,
    options: &MiningOptions,
) -> Result<MiningResult> {
    let good = good_set(t, min_supp)?;
    let mut scratch = QueryCounter::new();
    let (psi3, regs) = pae_with_table(table, db, candidates, k, t, &options.pae(), &mut scratch)?;
    debug_assert_eq!(scratch.basic_oracle_calls(), 2 * k as u64 * (t as u64 - 1));

    let mut counter = QueryCounter::new();
    let mut result = MiningResult {
        k,
        n_candidates: candidates.len(),
        found: Vec::new(),
        counters: counter,
        mode,
        shots_used: 0,
    };
    let p = good_probability(&psi3, &regs, &good);
    if p <= MIN_GOOD_PROBABILITY {
        // One round observes a bad outcome and nothing is frequent.
        charge_round(&mut counter, &regs);
        result.shots_used = 1;
        result.counters = counter;
        return Ok(result);
    }

    let item_to_candidate = if regs.index.is_none() {
        candidates.iter().enumerate().map(|(c, x)| (x.items()[0] as usize, c)).collect()
    } else {
        HashMap::new()
    };
    let mut sampler = Sampler {
        ladder: Ladder::new(&psi3, &regs, &good),
        mode,
        regs: &regs,
        good: &good,
        item_to_candidate,
        known_r: grover_known_iterations(p),
        cap: bbht_cap(&regs),
        ideal: None,
    };

    let mut observed: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
    let mut streak = 0;
    while streak < options.patience && (result.shots_used as usize) < options.max_shots {
        let shot = sampler.shot(rng)?;
        for _ in 0..shot.rounds {
            charge_round(&mut counter, &regs);
        }
        charge_iterations(&mut counter, &regs, shot.iterations);
        result.shots_used += shot.rounds as u64;
        match shot.outcome {
            Some((y, c)) => {
                let ystar = y.min(t - y);
                let entry = observed.entry(c).or_default();
                if entry.is_empty() {
                    streak = 0;
                } else {
                    streak += 1;
                }
                *entry.entry(ystar).or_insert(0) += 1;
            }
            None => streak += 1,
        }
    }

    for (c, counts) in observed {
        let estimate = decode_support(modal_outcome(&counts), t)?;
        let boundary_uncertain = (estimate.value - min_supp).abs() < estimate.grid_step();
        let mut found = FoundItemset {
            itemset: candidates[c].clone(),
            estimate,
            boundary_uncertain,
            observations: counts.values().sum(),
            exact: None,
        };
        if options.verify_uncertain && boundary_uncertain {
            let exact = exact_support(db, &found.itemset)?;
            counter.add_classical_row_scans(k as u64 * db.n_transactions() as u64);
            if exact.value() < min_supp - GRID_EPS {
                continue;
            }
            found.exact = Some(exact);
        }
        result.found.push(found);
    }
    result.found.sort_by(|a, b| a.itemset.cmp(&b.itemset));
    result.counters = counter;
    Ok(result)
}

/// All levels of a quantum mining run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullResult {
    pub levels: Vec<MiningResult>,
    pub stats: Vec<IterationStats>,
    pub counters: QueryCounter,
}

impl FullResult {
    pub fn found(&self) -> impl Iterator<Item = &FoundItemset> {
        self.levels.iter().flat_map(|l| l.found.iter())
    }
}

/// Level-wise mining: `C^(1)` is every occurring item, `C^(k+1)` is the
/// classical candidate generation applied to the mined `F^(k)`.
pub fn qarm_full<R: Rng + ?Sized>(
    db: &TransactionDb,
    min_supp: f64,
    t: usize,
    mode: AmplificationMode,
    rng: &mut R,
    options: &MiningOptions,
) -> Result<FullResult> {
    good_set(t, min_supp)?;
    let table = OracleTable::new(db);
    let mut out = FullResult {
        levels: Vec::new(),
        stats: Vec::new(),
        counters: QueryCounter::new(),
    };
    let mut candidates = initial_candidates(db);
    let mut k = 1;
    while !candidates.is_empty() && k <= options.max_k {
        let level = mine_k_with_table(&table, db, &candidates, k, t, min_supp, mode, rng, options)?;
        out.stats.push(IterationStats::new(k, candidates.len(), level.found.len()));
        out.counters.absorb(&level.counters);
        candidates = cand_gen(&level.itemsets());
        out.levels.push(level);
        k += 1;
    }
    Ok(out)
}

/// Distance, in grid steps of the phase `T theta / pi`, between support `s`
/// and the threshold.
pub fn grid_steps_from_threshold(s: f64, min_supp: f64, t: usize) -> f64 {
    let u = |x: f64| t as f64 * x.clamp(0.0, 1.0).sqrt().asin() / PI;
    (u(s) - u(min_supp)).abs()
}

/// Exact law of the readout registers after amplification, used to compare modes.
pub fn readout_distribution(state: &Statevector, regs: &PaeRegisters) -> Vec<f64> {
    state.marginal_probabilities(&regs.readout())
}

/// Probability mass of `probs` restricted to good `y`, renormalized.
pub fn conditional_on_good(probs: &[f64], regs: &PaeRegisters, good: &GoodSet) -> Vec<f64> {
    let mask = regs.t - 1;
    let mut out: Vec<f64> = probs
        .iter()
        .enumerate()
        .map(|(j, &p)| if good.contains(j & mask) { p } else { 0.0 })
        .collect();
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        out.iter_mut().for_each(|p| *p /= total);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{apriori, fre_exam};
    use crate::data::{ItemId, Ratio};
    use crate::qpe::parallel_amplitude_estimation;
    use crate::qsim::seeded_rng;

    fn set(items: &[ItemId]) -> Itemset {
        Itemset::new(items.iter().copied()).unwrap()
    }

    fn tv(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
    }

    /// N=4: item 0 in rows {0,1}, item 1 in every row, item 2 nowhere.
    fn spec_db() -> TransactionDb {
        TransactionDb::from_bit_strings(&["110", "110", "010", "010"]).unwrap()
    }

    fn singletons(m: ItemId) -> Vec<Itemset> {
        (0..m).map(Itemset::singleton).collect()
    }

    #[test]
    fn good_set_examples() {
        assert_eq!(good_set(8, 0.5).unwrap().members(), vec![2, 3, 4, 5, 6]);
        assert_eq!(good_set(8, 1.0).unwrap().members(), vec![4]);
        assert_eq!(good_set(8, 0.999).unwrap().members(), vec![4]);
        assert!(matches!(good_set(8, 0.0), Err(Error::InvalidMinSupport(_))));
        assert!(good_set(8, 1.5).is_err());
        assert!(good_set(6, 0.5).is_err());
        for t in [8, 16, 32, 64] {
            for s in [0.01, 0.1, 0.3, 0.5, 0.77] {
                let g = good_set(t, s).unwrap();
                assert!(!g.contains(0));
                for y in 1..t {
                    assert_eq!(g.contains(y), g.contains(t - y));
                }
            }
        }
    }

    #[test]
    fn grover_iteration_counts() {
        assert_eq!(grover_known_iterations(1.0), 0);
        assert_eq!(grover_known_iterations(0.25), 1);
        assert_eq!(grover_known_iterations(0.5), 0);
        assert_eq!(grover_known_iterations(1.0 / 64.0), 6);
    }

    fn psi3(db: &TransactionDb, cands: &[Itemset], k: usize, t: usize) -> (Statevector, PaeRegisters) {
        parallel_amplitude_estimation(db, cands, k, t, &PaeOptions::default(), &mut QueryCounter::new()).unwrap()
    }

    #[test]
    fn full_good_probability_needs_no_iterations() {
        let db = TransactionDb::from_bit_strings(&["1", "1"]).unwrap();
        let (state, regs) = psi3(&db, &singletons(1), 1, 8);
        let good = good_set(8, 0.5).unwrap();
        let mut counter = QueryCounter::new();
        let out = amplitude_amplify(&state, &regs, &good, AmplificationMode::GroverKnown, &mut seeded_rng(1), &mut counter).unwrap();
        assert_eq!(out.iterations, 0);
        assert!((out.good_probability - 1.0).abs() < 1e-12);
        assert!(tv(out.state.amplitudes().iter().map(|a| a.re).collect::<Vec<_>>().as_slice(), &state.amplitudes().iter().map(|a| a.re).collect::<Vec<_>>()) < 1e-12);
        assert_eq!(counter, QueryCounter::new());
    }

    #[test]
    fn quarter_good_probability_one_iteration() {
        // Supports {1, 0, 0, 0} over four candidates: good mass is exactly 1/4.
        let db = TransactionDb::from_rows(4, [vec![0], vec![0]]).unwrap();
        let (state, regs) = psi3(&db, &singletons(4), 1, 8);
        let good = good_set(8, 0.5).unwrap();
        assert!((good_probability(&state, &regs, &good) - 0.25).abs() < 1e-12);
        let mut counter = QueryCounter::new();
        let out = amplitude_amplify(&state, &regs, &good, AmplificationMode::GroverKnown, &mut seeded_rng(1), &mut counter).unwrap();
        assert_eq!(out.iterations, 1);
        assert!((good_probability(&out.state, &regs, &good) - 1.0).abs() < 1e-12);
        assert_eq!(counter.basic_oracle_calls(), 2 * 2 * 7);
        assert_eq!(counter.amplification_iterations(), 1);
    }

    #[test]
    fn amplification_preserves_good_conditional() {
        let db = TransactionDb::from_bit_strings(&["1101", "0111", "1100", "1010", "0110", "0001", "1000"]).unwrap();
        let cands = singletons(4);
        let (state, regs) = psi3(&db, &cands, 1, 16);
        let good = good_set(16, 0.4).unwrap();
        let mut rng = seeded_rng(5);
        let ideal = amplitude_amplify(&state, &regs, &good, AmplificationMode::IdealProjection, &mut rng, &mut QueryCounter::new()).unwrap();
        let ideal_law = readout_distribution(&ideal.state, &regs);
        assert!(tv(&conditional_on_good(&ideal_law, &regs, &good), &ideal_law) < 1e-12);
        let base = conditional_on_good(&readout_distribution(&state, &regs), &regs, &good);
        assert!(tv(&base, &ideal_law) < 1e-12);
        let grover = amplitude_amplify(&state, &regs, &good, AmplificationMode::GroverKnown, &mut rng, &mut QueryCounter::new()).unwrap();
        let grover_law = conditional_on_good(&readout_distribution(&grover.state, &regs), &regs, &good);
        assert!(tv(&grover_law, &ideal_law) < 0.02);
        assert!(good_probability(&grover.state, &regs, &good) >= ideal.good_probability.max(1.0 - ideal.good_probability) - 1e-9);
    }

    #[test]
    fn bbht_lands_in_good_subspace() {
        let db = TransactionDb::from_rows(8, [vec![0], vec![0], vec![1]]).unwrap();
        let (state, regs) = psi3(&db, &singletons(8), 1, 8);
        let good = good_set(8, 0.6).unwrap();
        let mut rng = seeded_rng(9);
        for _ in 0..20 {
            let mut counter = QueryCounter::new();
            let out = amplitude_amplify(&state, &regs, &good, AmplificationMode::Bbht, &mut rng, &mut counter).unwrap();
            assert!((good_probability(&out.state, &regs, &good) - 1.0).abs() < 1e-9);
            let extra = out.rounds as u64 - 1;
            assert_eq!(counter.measurements(), extra);
            assert_eq!(counter.basic_oracle_calls(), 2 * 7 * (extra + 2 * counter.amplification_iterations()));
        }
    }

    #[test]
    fn zero_good_probability_is_an_error() {
        let db = TransactionDb::from_bit_strings(&["00", "00"]).unwrap();
        let (state, regs) = psi3(&db, &singletons(2), 1, 8);
        let good = good_set(8, 0.5).unwrap();
        for mode in [AmplificationMode::IdealProjection, AmplificationMode::GroverKnown, AmplificationMode::Bbht] {
            let r = amplitude_amplify(&state, &regs, &good, mode, &mut seeded_rng(0), &mut QueryCounter::new());
            assert!(matches!(r, Err(Error::NoGoodOutcomes)));
        }
    }

    fn assert_counter_law(r: &MiningResult, t: usize) {
        let a = 2 * r.k as u64 * (t as u64 - 1);
        let c = &r.counters;
        assert_eq!(c.basic_oracle_calls(), a * (r.shots_used + 2 * c.amplification_iterations()));
        assert_eq!(c.measurements(), r.shots_used);
    }

    #[test]
    fn mine_k_spec_database() {
        let db = spec_db();
        for mode in [AmplificationMode::IdealProjection, AmplificationMode::GroverKnown, AmplificationMode::Bbht] {
            for seed in 0..5 {
                let mut rng = seeded_rng(seed);
                let r = qarm_mine_k(&db, &singletons(3), 1, 8, 0.5, mode, &mut rng, &MiningOptions::default()).unwrap();
                let got: Vec<(Itemset, f64)> = r.found.iter().map(|f| (f.itemset.clone(), f.estimate.value)).collect();
                assert_eq!(got.len(), 2, "{mode} {seed}");
                assert_eq!(got[0].0, set(&[0]));
                assert!((got[0].1 - 0.5).abs() < 1e-12);
                assert_eq!(got[1].0, set(&[1]));
                assert!((got[1].1 - 1.0).abs() < 1e-12);
                assert_counter_law(&r, 8);

                let r = qarm_mine_k(&db, &singletons(3), 1, 8, 0.9, mode, &mut rng, &MiningOptions::default()).unwrap();
                assert_eq!(r.itemsets(), vec![set(&[1])]);
                assert_counter_law(&r, 8);
            }
        }
    }

    #[test]
    fn mine_k_all_zero_supports_is_empty() {
        let db = spec_db();
        let r = qarm_mine_k(&db, &[set(&[2])], 1, 8, 0.5, AmplificationMode::Bbht, &mut seeded_rng(0), &MiningOptions::default()).unwrap();
        assert!(r.found.is_empty());
        assert_eq!(r.shots_used, 1);
        assert_counter_law(&r, 8);
    }

    #[test]
    fn mine_k_pairs_with_index_register() {
        let db = TransactionDb::from_bit_strings(&["110", "110", "011", "011"]).unwrap();
        let cands = vec![set(&[0, 1]), set(&[0, 2]), set(&[1, 2])];
        let r = qarm_mine_k(&db, &cands, 2, 8, 0.5, AmplificationMode::GroverKnown, &mut seeded_rng(3), &MiningOptions::default()).unwrap();
        let want: Vec<Itemset> = fre_exam(&db, &cands, &Ratio::new(1, 2).unwrap(), &mut QueryCounter::new())
            .unwrap()
            .into_iter()
            .map(|f| f.itemset)
            .collect();
        assert_eq!(r.itemsets(), want);
        assert_counter_law(&r, 8);
    }

    #[test]
    fn boundary_flag_and_verification() {
        // Support 3/8 sits between grid values 0.1464 and 0.5 at T = 8.
        let db = TransactionDb::from_bit_strings(&["1", "1", "1", "0", "0", "0", "0", "0"]).unwrap();
        let opts = MiningOptions::default();
        let r = qarm_mine_k(&db, &singletons(1), 1, 8, 0.45, AmplificationMode::IdealProjection, &mut seeded_rng(2), &opts).unwrap();
        assert_eq!(r.found.len(), 1);
        assert!(r.found[0].boundary_uncertain);
        assert!(r.found[0].exact.is_none());
        let opts = MiningOptions {
            verify_uncertain: true,
            ..opts
        };
        let r = qarm_mine_k(&db, &singletons(1), 1, 8, 0.45, AmplificationMode::IdealProjection, &mut seeded_rng(2), &opts).unwrap();
        assert!(r.found.is_empty());
        assert_eq!(r.counters.classical_row_scans(), 8);
    }

    #[test]
    fn full_run_single_frequent_item() {
        let db = TransactionDb::from_bit_strings(&["01", "01", "01", "01"]).unwrap();
        let r = qarm_full(&db, 0.5, 8, AmplificationMode::Bbht, &mut seeded_rng(0), &MiningOptions::default()).unwrap();
        assert_eq!(r.stats, vec![IterationStats::new(1, 1, 1)]);
        let total: u64 = r.levels.iter().map(|l| l.counters.basic_oracle_calls()).sum();
        assert_eq!(r.counters.basic_oracle_calls(), total);
    }

    #[test]
    fn full_run_matches_apriori_on_toy() {
        let db = TransactionDb::from_bit_strings(&["11", "11", "10", "01"]).unwrap();
        let r = qarm_full(&db, 0.5, 8, AmplificationMode::GroverKnown, &mut seeded_rng(4), &MiningOptions::default()).unwrap();
        let classical = apriori(&db, &Ratio::new(1, 2).unwrap(), &mut QueryCounter::new()).unwrap();
        assert_eq!(r.stats, classical.stats);
        let mut got: Vec<Itemset> = r.found().map(|f| f.itemset.clone()).collect();
        got.sort();
        let mut want: Vec<Itemset> = classical.frequents.iter().map(|f| f.itemset.clone()).collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn full_run_on_empty_database() {
        let db = TransactionDb::from_bit_strings(&["000", "000"]).unwrap();
        let r = qarm_full(&db, 0.5, 8, AmplificationMode::Bbht, &mut seeded_rng(0), &MiningOptions::default()).unwrap();
        assert!(r.levels.is_empty());
        assert!(r.stats.is_empty());
    }

    #[test]
    fn same_seed_same_result() {
        let db = TransactionDb::from_bit_strings(&["1101", "0111", "1100", "1010", "0110"]).unwrap();
        let run = |seed| qarm_full(&db, 0.3, 16, AmplificationMode::Bbht, &mut seeded_rng(seed), &MiningOptions::default()).unwrap();
        assert_eq!(run(11), run(11));
    }
}
