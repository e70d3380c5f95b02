//! Dense statevector engine over a named register layout.
//!
//! Qubit `q` is bit `q` of the basis index. Registers are contiguous bit
//! ranges allocated from qubit 0 upward in declaration order, so a register
//! value is `(index >> offset) & (2^width - 1)`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{FftDirection, FftPlanner};
use thiserror::Error;

/// Norm drift allowed after any public operation.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance for unitarity and exact-equality checks.
pub const UNITARY_TOL: f64 = 1e-12;
pub const DEFAULT_QUBIT_CAP: usize = 26;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Generator used for every measurement. One per experiment, seeded.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error, PartialEq)]
pub enum QsimError {
    #[error("layout needs {required} qubits but the cap is {cap}")]
    QubitCapExceeded { required: usize, cap: usize },
    #[error("unknown register {0:?}")]
    UnknownRegister(String),
    #[error("register {0:?} declared twice")]
    DuplicateRegister(String),
    #[error("register {0:?} has zero width")]
    ZeroWidth(String),
    #[error("register at qubit {offset} is not in |0> (weight {weight:e} elsewhere)")]
    RegisterNotZero { offset: usize, weight: f64 },
    #[error("limit {limit} exceeds register dimension {dim}")]
    LimitTooLarge { limit: usize, dim: usize },
    #[error("amplitudes have norm {norm}, expected 1")]
    NotNormalized { norm: f64 },
    #[error("expected {expected} amplitudes, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("control qubit {0} overlaps the target")]
    ControlOverlap(usize),
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("states have different layouts")]
    LayoutMismatch,
    #[error("measurement selected a zero-norm branch")]
    ZeroNormBranch,
}

/// A contiguous block of qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Register {
    pub offset: usize,
    pub width: usize,
}

impl Register {
    pub fn dim(&self) -> usize {
        1 << self.width
    }

    /// Bit mask of this register within a basis index.
    pub fn mask(&self) -> usize {
        (self.dim() - 1) << self.offset
    }

    pub fn value(&self, index: usize) -> usize {
        (index >> self.offset) & (self.dim() - 1)
    }

    pub fn with_value(&self, index: usize, value: usize) -> usize {
        (index & !self.mask()) | ((value & (self.dim() - 1)) << self.offset)
    }

    /// Global qubit index of bit `p` of this register.
    pub fn qubit(&self, p: usize) -> usize {
        assert!(p < self.width);
        self.offset + p
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        self.offset..self.offset + self.width
    }
}

/// Ordered, gap-free named registers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    names: Vec<String>,
    regs: Vec<Register>,
    n_qubits: usize,
}

#[derive(Clone, Debug)]
pub struct LayoutBuilder {
    entries: Vec<(String, usize)>,
    cap: usize,
}

impl LayoutBuilder {
    pub fn register(mut self, name: impl Into<String>, width: usize) -> Self {
        self.entries.push((name.into(), width));
        self
    }

    pub fn qubit_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn required_qubits(&self) -> usize {
        self.entries.iter().map(|(_, w)| w).sum()
    }

    pub fn build(self) -> Result<RegisterLayout, QsimError> {
        let required = self.required_qubits();
        if required > self.cap {
            return Err(QsimError::QubitCapExceeded {
                required,
                cap: self.cap,
            });
        }
        let mut names: Vec<String> = Vec::new();
        let mut regs = Vec::new();
        let mut offset = 0;
        for (name, width) in self.entries {
            if width == 0 {
                return Err(QsimError::ZeroWidth(name));
            }
            if names.contains(&name) {
                return Err(QsimError::DuplicateRegister(name));
            }
            regs.push(Register { offset, width });
            names.push(name);
            offset += width;
        }
        Ok(RegisterLayout {
            names,
            regs,
            n_qubits: offset,
        })
    }
}

impl RegisterLayout {
    pub fn builder() -> LayoutBuilder {
        LayoutBuilder {
            entries: Vec::new(),
            cap: DEFAULT_QUBIT_CAP,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn find(&self, name: &str) -> Option<Register> {
        self.names.iter().position(|n| n == name).map(|p| self.regs[p])
    }

    pub fn register(&self, name: &str) -> Result<Register, QsimError> {
        self.find(name).ok_or_else(|| QsimError::UnknownRegister(name.to_string()))
    }

    pub fn registers(&self) -> impl Iterator<Item = (&str, Register)> {
        self.names.iter().map(String::as_str).zip(self.regs.iter().copied())
    }
}

/// Conjunction of control qubits: an index is active iff all are 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Controls(usize);

impl Controls {
    pub fn none() -> Self {
        Controls(0)
    }

    pub fn qubit(q: usize) -> Self {
        Controls(1 << q)
    }

    pub fn and(self, q: usize) -> Self {
        Controls(self.0 | 1 << q)
    }

    pub fn mask(&self) -> usize {
        self.0
    }

    #[inline]
    pub fn active(&self, index: usize) -> bool {
        index & self.0 == self.0
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0 >> q & 1 == 1
    }
}

/// A unitary acting on a fixed set of qubits that can be applied under controls.
pub trait ControlledUnitary {
    type Error: From<QsimError>;

    /// Qubits the unitary may change or read.
    fn qubits(&self) -> Vec<usize>;

    fn apply(&mut self, state: &mut Statevector, controls: Controls) -> Result<(), Self::Error>;
}

/// Small explicit unitary, row-major over the listed qubits (first qubit least significant).
#[derive(Clone, Debug)]
pub struct DenseUnitary {
    pub qubits: Vec<usize>,
    pub matrix: Vec<Complex64>,
}

impl ControlledUnitary for DenseUnitary {
    type Error = QsimError;

    fn qubits(&self) -> Vec<usize> {
        self.qubits.clone()
    }

    fn apply(&mut self, state: &mut Statevector, controls: Controls) -> Result<(), QsimError> {
        state.apply_matrix(&self.qubits, &self.matrix, controls)
    }
}

#[derive(Clone, Debug)]
pub struct Statevector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// The all-zero basis state.
    pub fn new(layout: RegisterLayout) -> Self {
        let mut amps = vec![ZERO; layout.dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        Statevector { layout, amps }
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self, QsimError> {
        if amps.len() != layout.dim() {
            return Err(QsimError::LengthMismatch {
                expected: layout.dim(),
                got: amps.len(),
            });
        }
        check_normalized(&amps)?;
        Ok(Statevector { layout, amps })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn register(&self, name: &str) -> Result<Register, QsimError> {
        self.layout.register(name)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64, QsimError> {
        if self.layout != other.layout {
            return Err(QsimError::LayoutMismatch);
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    fn check_qubit(&self, q: usize) -> Result<(), QsimError> {
        if q >= self.layout.n_qubits {
            return Err(QsimError::QubitOutOfRange {
                qubit: q,
                n_qubits: self.layout.n_qubits,
            });
        }
        Ok(())
    }

    fn check_controls(&self, controls: Controls, targets: usize) -> Result<(), QsimError> {
        if controls.mask() >> self.layout.n_qubits != 0 {
            return Err(QsimError::QubitOutOfRange {
                qubit: usize::BITS as usize - 1 - controls.mask().leading_zeros() as usize,
                n_qubits: self.layout.n_qubits,
            });
        }
        let overlap = controls.mask() & targets;
        if overlap != 0 {
            return Err(QsimError::ControlOverlap(overlap.trailing_zeros() as usize));
        }
        Ok(())
    }

    /// Probability weight outside `register = 0`.
    fn weight_off_zero(&self, reg: Register) -> f64 {
        let mask = reg.mask();
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn require_zero(&self, reg: Register) -> Result<(), QsimError> {
        let weight = self.weight_off_zero(reg);
        if weight > NORM_TOL {
            return Err(QsimError::RegisterNotZero {
                offset: reg.offset,
                weight,
            });
        }
        Ok(())
    }

    /// Loads `sum_{i<limit} |i> / sqrt(limit)` into a register that is in |0>.
    pub fn prepare_uniform(&mut self, reg: Register, limit: usize) -> Result<(), QsimError> {
        if limit == 0 || limit > reg.dim() {
            return Err(QsimError::LimitTooLarge { limit, dim: reg.dim() });
        }
        let amps = vec![Complex64::new(1.0 / (limit as f64).sqrt(), 0.0); limit];
        self.inject_state(&[reg], &amps)
    }

    /// Loads a normalized superposition into registers that are all in |0>.
    ///
    /// `amplitudes[v]` is the amplitude of joint value `v`, where the first
    /// register holds the least significant bits. Missing trailing entries are 0.
    pub fn inject_state(&mut self, regs: &[Register], amplitudes: &[Complex64]) -> Result<(), QsimError> {
        let total_width: usize = regs.iter().map(|r| r.width).sum();
        let joint_dim = 1usize << total_width;
        if amplitudes.len() > joint_dim {
            return Err(QsimError::LimitTooLarge {
                limit: amplitudes.len(),
                dim: joint_dim,
            });
        }
        let mut seen = 0usize;
        for r in regs {
            if r.offset + r.width > self.layout.n_qubits {
                return Err(QsimError::QubitOutOfRange {
                    qubit: r.offset + r.width - 1,
                    n_qubits: self.layout.n_qubits,
                });
            }
            if seen & r.mask() != 0 {
                return Err(QsimError::ControlOverlap(r.offset));
            }
            seen |= r.mask();
        }
        check_normalized(amplitudes)?;
        for r in regs {
            self.require_zero(*r)?;
        }
        let placed: Vec<(usize, Complex64)> = amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != ZERO)
            .map(|(v, a)| (scatter_joint(regs, v), *a))
            .collect();
        let mut out = vec![ZERO; self.amps.len()];
        for (base, amp) in self.amps.iter().enumerate() {
            if base & seen != 0 || *amp == ZERO {
                continue;
            }
            for &(bits, a) in &placed {
                out[base | bits] = amp * a;
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Swaps the target bit on every active index where `pred` holds.
    /// `pred` must not depend on the target bit.
    pub fn flip_if<F>(&mut self, target: usize, controls: Controls, pred: F) -> Result<(), QsimError>
    where
        F: Fn(usize) -> bool,
    {
        self.check_qubit(target)?;
        self.check_controls(controls, 1 << target)?;
        let bit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & bit == 0 && controls.active(i) && pred(i) {
                self.amps.swap(i, i | bit);
            }
        }
        Ok(())
    }

    /// Multiplies active amplitudes by `phase(index)`, which must have modulus 1.
    pub fn apply_phase<F>(&mut self, controls: Controls, phase: F) -> Result<(), QsimError>
    where
        F: Fn(usize) -> Complex64,
    {
        self.check_controls(controls, 0)?;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if controls.active(i) {
                *a *= phase(i);
            }
        }
        Ok(())
    }

    /// Applies a dense `2^q x 2^q` matrix on the listed qubits.
    pub fn apply_matrix(&mut self, qubits: &[usize], matrix: &[Complex64], controls: Controls) -> Result<(), QsimError> {
        let d = 1usize << qubits.len();
        if matrix.len() != d * d {
            return Err(QsimError::LengthMismatch {
                expected: d * d,
                got: matrix.len(),
            });
        }
        let mut target_mask = 0;
        for &q in qubits {
            self.check_qubit(q)?;
            target_mask |= 1 << q;
        }
        self.check_controls(controls, target_mask)?;
        let offsets: Vec<usize> = (0..d)
            .map(|v| qubits.iter().enumerate().filter(|(b, _)| v >> b & 1 == 1).fold(0, |acc, (_, &q)| acc | 1 << q))
            .collect();
        let mut buf = vec![ZERO; d];
        for base in 0..self.amps.len() {
            if base & target_mask != 0 || !controls.active(base) {
                continue;
            }
            for (v, off) in offsets.iter().enumerate() {
                buf[v] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                self.amps[base | off] = (0..d).map(|c| matrix[r * d + c] * buf[c]).sum();
            }
        }
        Ok(())
    }

    pub fn apply_single(&mut self, qubit: usize, gate: [[Complex64; 2]; 2], controls: Controls) -> Result<(), QsimError> {
        let m = [gate[0][0], gate[0][1], gate[1][0], gate[1][1]];
        self.apply_matrix(&[qubit], &m, controls)
    }

    pub fn apply_x(&mut self, qubit: usize) -> Result<(), QsimError> {
        self.flip_if(qubit, Controls::none(), |_| true)
    }

    pub fn apply_h(&mut self, qubit: usize) -> Result<(), QsimError> {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_single(qubit, [[h, h], [h, -h]], Controls::none())
    }

    /// Applies `op^(2^exponent)` on the slices where `control` is 1.
    pub fn apply_controlled_power<U: ControlledUnitary + ?Sized>(
        &mut self,
        control: usize,
        op: &mut U,
        exponent: u32,
    ) -> Result<(), U::Error> {
        self.check_qubit(control)?;
        if op.qubits().contains(&control) {
            return Err(QsimError::ControlOverlap(control).into());
        }
        for _ in 0..1u64 << exponent {
            op.apply(self, Controls::qubit(control))?;
        }
        Ok(())
    }

    fn fourier(&mut self, reg: Register, direction: FftDirection) -> Result<(), QsimError> {
        if reg.offset + reg.width > self.layout.n_qubits {
            return Err(QsimError::QubitOutOfRange {
                qubit: reg.offset + reg.width - 1,
                n_qubits: self.layout.n_qubits,
            });
        }
        let t = reg.dim();
        let fft: Arc<dyn rustfft::Fft<f64>> = FftPlanner::new().plan_fft(t, direction);
        let scale = 1.0 / (t as f64).sqrt();
        let mask = reg.mask();
        let mut fiber = vec![ZERO; t];
        let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (v, f) in fiber.iter_mut().enumerate() {
                *f = self.amps[reg.with_value(base, v)];
            }
            if fiber.iter().all(|a| *a == ZERO) {
                continue;
            }
            fft.process_with_scratch(&mut fiber, &mut scratch);
            for (v, f) in fiber.iter().enumerate() {
                self.amps[reg.with_value(base, v)] = f * scale;
            }
        }
        Ok(())
    }

    /// `F_T |x> = sum_y e^{2 pi i x y / T} |y> / sqrt(T)` on one register.
    pub fn qft(&mut self, reg: Register) -> Result<(), QsimError> {
        self.fourier(reg, FftDirection::Inverse)
    }

    /// The adjoint of [`Statevector::qft`].
    pub fn inverse_qft(&mut self, reg: Register) -> Result<(), QsimError> {
        self.fourier(reg, FftDirection::Forward)
    }

    /// `state <- 2 <ref|state> ref - state`.
    pub fn reflect_about_state(&mut self, reference: &Statevector) -> Result<(), QsimError> {
        if reference.layout != self.layout {
            return Err(QsimError::LayoutMismatch);
        }
        check_normalized(&reference.amps)?;
        let overlap = reference.inner(self)? * 2.0;
        for (a, r) in self.amps.iter_mut().zip(&reference.amps) {
            *a = overlap * r - *a;
        }
        Ok(())
    }

    /// Reflection `2|r><r| - I` on one register, identity elsewhere, applied
    /// only where `controls` hold.
    pub fn reflect_register_about(&mut self, reg: Register, reference: &[Complex64], controls: Controls) -> Result<(), QsimError> {
        if reference.len() > reg.dim() {
            return Err(QsimError::LengthMismatch {
                expected: reg.dim(),
                got: reference.len(),
            });
        }
        check_normalized(reference)?;
        self.check_controls(controls, reg.mask())?;
        let mask = reg.mask();
        let support: Vec<(usize, Complex64)> = reference
            .iter()
            .enumerate()
            .filter(|(_, r)| **r != ZERO)
            .map(|(v, r)| (v << reg.offset, *r))
            .collect();
        for base in 0..self.amps.len() {
            if base & mask != 0 || !controls.active(base) {
                continue;
            }
            let overlap: Complex64 = support.iter().map(|&(bits, r)| r.conj() * self.amps[base | bits]).sum::<Complex64>() * 2.0;
            for v in 0..reg.dim() {
                let idx = base | v << reg.offset;
                self.amps[idx] = -self.amps[idx];
            }
            for &(bits, r) in &support {
                self.amps[base | bits] += overlap * r;
            }
        }
        Ok(())
    }

    /// Born-rule distribution of the joint value of `regs` (first register least significant).
    pub fn marginal_probabilities(&self, regs: &[Register]) -> Vec<f64> {
        let total_width: usize = regs.iter().map(|r| r.width).sum();
        let mut probs = vec![0.0; 1 << total_width];
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p != 0.0 {
                probs[gather_joint(regs, i)] += p;
            }
        }
        probs
    }

    /// Samples the joint value of `regs`, collapses and renormalizes the state.
    /// Returns one outcome per register.
    pub fn measure<R: Rng + ?Sized>(&mut self, regs: &[Register], rng: &mut R) -> Result<Vec<usize>, QsimError> {
        let probs = self.marginal_probabilities(regs);
        let joint = sample_index(&probs, rng);
        let p = probs[joint];
        if p <= f64::MIN_POSITIVE {
            return Err(QsimError::ZeroNormBranch);
        }
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if gather_joint(regs, i) == joint {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        let mut outcomes = Vec::with_capacity(regs.len());
        let mut rest = joint;
        for r in regs {
            outcomes.push(rest & (r.dim() - 1));
            rest >>= r.width;
        }
        Ok(outcomes)
    }

    /// Zeroes every amplitude where `keep` is false and renormalizes.
    /// Returns the probability of the kept subspace.
    pub fn project<F: Fn(usize) -> bool>(&mut self, keep: F) -> Result<f64, QsimError> {
        let mut p = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if keep(i) {
                p += a.norm_sqr();
            } else {
                *a = ZERO;
            }
        }
        if p <= f64::MIN_POSITIVE {
            return Err(QsimError::ZeroNormBranch);
        }
        let scale = 1.0 / p.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= scale);
        Ok(p)
    }
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

fn check_normalized(amps: &[Complex64]) -> Result<(), QsimError> {
    let norm = norm_sqr(amps).sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(QsimError::NotNormalized { norm });
    }
    Ok(())
}

/// Joint value of several registers, first register least significant.
pub fn gather_joint(regs: &[Register], index: usize) -> usize {
    let mut v = 0;
    let mut shift = 0;
    for r in regs {
        v |= r.value(index) << shift;
        shift += r.width;
    }
    v
}

/// Basis-index bits holding joint value `v` (inverse of [`gather_joint`] on those registers).
pub fn scatter_joint(regs: &[Register], mut v: usize) -> usize {
    let mut bits = 0;
    for r in regs {
        bits |= (v & (r.dim() - 1)) << r.offset;
        v >>= r.width;
    }
    bits
}

/// Draws an index with probability proportional to `weights`.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_nonzero = i;
            if target < acc {
                return i;
            }
        }
    }
    last_nonzero
}
