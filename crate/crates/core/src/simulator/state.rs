use num_complex::Complex64;
use rustc_hash::FxHashMap;

use super::SimError;
use crate::circuit::{GateKind, Instruction, Operation};

/// Amplitudes below this magnitude are dropped after every gate.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Widest register a basis key can hold.
pub const MAX_QUBITS: usize = 128;

/// Basis states keyed by a bit mask with qubit 0 in the least significant
/// bit. Absent keys have amplitude zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    num_qubits: usize,
    amps: FxHashMap<u128, Complex64>,
}

impl SparseState {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self, SimError> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, key: u128) -> Result<Self, SimError> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits {
                num_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut amps = FxHashMap::default();
        amps.insert(key, Complex64::new(1.0, 0.0));
        Ok(Self { num_qubits, amps })
    }

    /// Basis state with exactly the listed qubits set.
    pub fn from_ones(
        num_qubits: usize,
        ones: impl IntoIterator<Item = usize>,
    ) -> Result<Self, SimError> {
        Self::basis(num_qubits, ones.into_iter().fold(0, |k, q| k | 1 << q))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn support(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, key: u128) -> Complex64 {
        self.amps.get(&key).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u128, Complex64)> + '_ {
        self.amps.iter().map(|(&k, &a)| (k, a))
    }

    /// Entries sorted by basis key.
    pub fn sorted(&self) -> Vec<(u128, Complex64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable_by_key(|&(k, _)| k);
        v
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps
            .values()
            .map(|a| a.norm_sqr())
            .fold(0.0, |s, p| s + p)
    }

    pub fn probability_of_one(&self, qubit: usize) -> f64 {
        let bit = 1u128 << qubit;
        self.amps
            .iter()
            .filter(|(&k, _)| k & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .fold(0.0, |s, p| s + p)
    }

    /// Projects `qubit` onto `value` and renormalises. Returns the outcome
    /// probability alongside the collapsed state.
    pub fn collapse(&self, qubit: usize, value: bool) -> (f64, Self) {
        let bit = 1u128 << qubit;
        let kept: FxHashMap<u128, Complex64> = self
            .amps
            .iter()
            .filter(|(&k, _)| (k & bit != 0) == value)
            .map(|(&k, &a)| (k, a))
            .collect();
        let p: f64 = kept.values().map(|a| a.norm_sqr()).fold(0.0, |s, p| s + p);
        let scale = if p > 0.0 { 1.0 / p.sqrt() } else { 0.0 };
        let amps = kept.into_iter().map(|(k, a)| (k, a * scale)).collect();
        (
            p,
            Self {
                num_qubits: self.num_qubits,
                amps,
            },
        )
    }

    /// Flips `qubit` on every basis state; used to reset the outcome-1 branch.
    pub(crate) fn flip(&mut self, qubit: usize) {
        let bit = 1u128 << qubit;
        self.amps = self.amps.drain().map(|(k, a)| (k ^ bit, a)).collect();
    }

    /// Applies a unitary instruction in place, ignoring its classical
    /// condition. Returns the probability mass removed by pruning.
    pub fn apply_gate(&mut self, inst: &Instruction) -> Result<f64, SimError> {
        let Operation::Gate(kind) = inst.op else {
            return Err(SimError::NotUnitary);
        };
        let target = inst.targets[0];
        if inst.qubits().any(|q| q >= self.num_qubits) {
            return Err(SimError::QubitOutOfRange);
        }
        let cmask = inst.controls.iter().fold(0u128, |m, &c| m | 1 << c);
        let tbit = 1u128 << target;
        match kind {
            GateKind::X | GateKind::Cx | GateKind::Mcx => {
                self.amps = self
                    .amps
                    .drain()
                    .map(|(k, a)| {
                        if k & cmask == cmask {
                            (k ^ tbit, a)
                        } else {
                            (k, a)
                        }
                    })
                    .collect();
                Ok(0.0)
            }
            GateKind::Cz | GateKind::Cp(_) => {
                let phase = match kind {
                    GateKind::Cp(t) => Complex64::from_polar(1.0, t),
                    _ => Complex64::new(-1.0, 0.0),
                };
                let mask = cmask | tbit;
                for (_, a) in self.amps.iter_mut().filter(|(&k, _)| k & mask == mask) {
                    *a *= phase;
                }
                Ok(self.prune())
            }
            GateKind::H => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                Ok(self.rotate(cmask, tbit, [[r, r], [r, -r]]))
            }
            GateKind::Ry(theta) | GateKind::Mcry(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                Ok(self.rotate(cmask, tbit, [[c, -s], [s, c]]))
            }
        }
    }

    /// Applies a real single-qubit matrix `m` (row = output bit) on `tbit`
    /// wherever all `cmask` bits are set.
    fn rotate(&mut self, cmask: u128, tbit: u128, m: [[f64; 2]; 2]) -> f64 {
        let mut out: FxHashMap<u128, Complex64> =
            FxHashMap::with_capacity_and_hasher(self.amps.len() * 2, Default::default());
        for (k, a) in self.amps.drain() {
            if k & cmask != cmask {
                *out.entry(k).or_default() += a;
                continue;
            }
            let input = usize::from(k & tbit != 0);
            let (k0, k1) = (k & !tbit, k | tbit);
            if m[0][input] != 0.0 {
                *out.entry(k0).or_default() += a * m[0][input];
            }
            if m[1][input] != 0.0 {
                *out.entry(k1).or_default() += a * m[1][input];
            }
        }
        self.amps = out;
        self.prune()
    }

    fn prune(&mut self) -> f64 {
        let mut removed = 0.0;
        self.amps.retain(|_, a| {
            let keep = a.norm() >= PRUNE_THRESHOLD;
            if !keep {
                removed += a.norm_sqr();
            }
            keep
        });
        removed
    }

    /// Applies a purely unitary, unconditioned instruction list.
    pub fn apply_all<'a>(
        &mut self,
        insts: impl IntoIterator<Item = &'a Instruction>,
    ) -> Result<f64, SimError> {
        let mut pruned = 0.0;
        for inst in insts {
            pruned += self.apply_gate(inst)?;
        }
        Ok(pruned)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-15;

    fn close(a: Complex64, re: f64) -> bool {
        (a.re - re).abs() < EPS && a.im.abs() < EPS
    }

    #[test]
    fn x_flips() {
        let mut s = SparseState::zero(1).unwrap();
        s.apply_gate(&Instruction::x(0)).unwrap();
        assert_eq!(s.sorted(), vec![(1, Complex64::new(1.0, 0.0))]);
    }

    #[test]
    fn hadamard_splits() {
        let mut s = SparseState::zero(1).unwrap();
        s.apply_gate(&Instruction::h(0)).unwrap();
        assert_eq!(s.amplitude(0).re, std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(s.amplitude(1).re, std::f64::consts::FRAC_1_SQRT_2);
        s.apply_gate(&Instruction::h(0)).unwrap();
        assert_eq!(s.support(), 1);
        assert!(close(s.amplitude(0), 1.0));
    }

    #[test]
    fn toffoli_truth_table() {
        // Qubits 2 and 1 control qubit 0; key bit i is qubit i.
        let toffoli = Instruction::mcx(vec![2, 1], 0);
        let mut s = SparseState::basis(3, 0b110).unwrap();
        s.apply_gate(&toffoli).unwrap();
        assert_eq!(s.sorted()[0].0, 0b111);
        let mut s = SparseState::basis(3, 0b100).unwrap();
        s.apply_gate(&toffoli).unwrap();
        assert_eq!(s.sorted()[0].0, 0b100);
    }

    #[test]
    fn ry_and_phases() {
        let mut s = SparseState::zero(2).unwrap();
        s.apply_gate(&Instruction::ry(std::f64::consts::FRAC_PI_2, 0))
            .unwrap();
        assert!((s.amplitude(1).re - std::f64::consts::FRAC_1_SQRT_2).abs() < EPS);
        s.apply_gate(&Instruction::x(1)).unwrap();
        s.apply_gate(&Instruction::cz(0, 1)).unwrap();
        assert!((s.amplitude(0b11).re + std::f64::consts::FRAC_1_SQRT_2).abs() < EPS);
        s.apply_gate(&Instruction::cp(std::f64::consts::PI, 0, 1))
            .unwrap();
        assert!((s.amplitude(0b11).re - std::f64::consts::FRAC_1_SQRT_2).abs() < EPS);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn controls_that_fail_leave_amplitudes_untouched() {
        let mut s = SparseState::zero(3).unwrap();
        s.apply_gate(&Instruction::ry(0.3, 0)).unwrap();
        let before = s.amplitude(0);
        s.apply_gate(&Instruction::mcry(1.1, vec![0], 1)).unwrap();
        s.apply_gate(&Instruction::mcx(vec![0, 1], 2)).unwrap();
        assert_eq!(s.amplitude(0), before);
    }

    #[test]
    fn measurement_collapse() {
        let mut s = SparseState::zero(4).unwrap();
        s.apply_all(
            &crate::wstate::build_w(&[0, 1, 2, 3], crate::wstate::WStrategy::Chain).unwrap(),
        )
        .unwrap();
        assert!((s.probability_of_one(0) - 0.25).abs() < 1e-12);
        let (p1, one) = s.collapse(0, true);
        let (p0, zero) = s.collapse(0, false);
        assert!((p1 - 0.25).abs() < 1e-12 && (p0 - 0.75).abs() < 1e-12);
        assert_eq!(one.support(), 1);
        assert!(close(one.amplitude(0b0001), 1.0) || (one.amplitude(1).re - 1.0).abs() < 1e-12);
        assert_eq!(zero.support(), 3);
        for k in [0b0010, 0b0100, 0b1000] {
            assert!((zero.amplitude(k).re - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_unitary_and_wide_registers() {
        let mut s = SparseState::zero(1).unwrap();
        assert_eq!(
            s.apply_gate(&Instruction::measure(0, 0)),
            Err(SimError::NotUnitary)
        );
        assert_eq!(
            s.apply_gate(&Instruction::x(3)),
            Err(SimError::QubitOutOfRange)
        );
        assert!(matches!(
            SparseState::zero(129),
            Err(SimError::TooManyQubits { .. })
        ));
    }
}
