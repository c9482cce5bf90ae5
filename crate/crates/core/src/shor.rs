//! Period finding with one recycled phase qubit, `n + 2` clean wires and
//! `n - 1` dirty wires, plus the classical side of factoring.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Builder, Register, Wire};
use crate::error::{Error, Result};
use crate::lowering::{coprime_multiplier, scaling_modulus, ResourceReport};
use crate::modular::{mod_bimultiply, mod_inverse, register_size};
use crate::sim::bootstrap::{inverse, qft};
use crate::sim::classical::{extract_permutation, Permutation};
use crate::sim::semiclassical::{run_semiclassical_from, Instruction, Program, Record};
use crate::sim::statevector::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ShorParams {
    pub r: u64,
    pub base: u64,
    /// Phase bits sampled per run.
    pub p: usize,
}

impl ShorParams {
    /// Checks the modulus and base; `p` defaults to `2n`.
    pub fn new(r: u64, base: u64) -> Result<Self> {
        if r < 3 || r.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("modulus {r} must be odd and at least 3")));
        }
        if base <= 1 || base >= r {
            return Err(Error::InvalidParameter(format!("base {base} must lie strictly between 1 and {r}")));
        }
        mod_inverse(base, r)?;
        Ok(ShorParams { r, base, p: 2 * register_size(r) })
    }

    pub fn with_p(mut self, p: usize) -> Self {
        self.p = p;
        self
    }

    pub fn n(&self) -> usize {
        register_size(self.r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QubitBudget {
    pub clean: usize,
    pub dirty: usize,
    pub total: usize,
}

/// Wire assignment: work register `x`, ancilla register `y` (MSB clean),
/// then the phase qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub x: Register,
    pub y: Register,
    pub phase: Wire,
}

impl Layout {
    pub fn new(n: usize) -> Self {
        Layout { x: Register::range(0, n), y: Register::range(n as u32, n), phase: Wire(2 * n as u32) }
    }

    pub fn width(&self) -> usize {
        self.x.len() + self.y.len() + 1
    }

    pub fn clean_wires(&self) -> Vec<Wire> {
        let mut w = self.x.wires().to_vec();
        w.push(self.y.msb());
        w.push(self.phase);
        w
    }

    pub fn dirty_wires(&self) -> Vec<Wire> {
        self.y.wires()[..self.y.len() - 1].to_vec()
    }

    fn declare(&self, b: &mut Builder) {
        b.add_operand(self.width());
    }
}

/// An assembled run: the program plus its qubit accounting.
#[derive(Clone, Debug)]
pub struct PeriodFinding {
    pub params: ShorParams,
    pub layout: Layout,
    pub program: Program,
    pub budget: QubitBudget,
    /// Slot holding phase bit `i` is `i`; the work-register readout follows.
    pub work_slot: usize,
}

pub fn mod_pow(base: u64, mut e: u64, r: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = (base % r) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % r as u128;
        }
        b = b * b % r as u128;
        e >>= 1;
    }
    acc as u64
}

/// Permutation of `(x, y) -> (k·x, k⁻¹·y)` controlled by the phase wire
/// (or uncontrolled), over the whole layout.
fn bimultiply_permutation(layout: &Layout, k: u64, r: u64, controlled: bool, swap: bool) -> Result<Permutation> {
    let mut b = Builder::new();
    layout.declare(&mut b);
    let (a, c) = if swap { (&layout.y, &layout.x) } else { (&layout.x, &layout.y) };
    let controls: &[Wire] = if controlled { &[layout.phase] } else { &[] };
    mod_bimultiply(&mut b, k, r, a, c, controls)?;
    let circuit = b.finish()?;
    if circuit.width != layout.width() || circuit.ledger.clean_highwater + circuit.ledger.dirty_highwater != 0 {
        return Err(Error::LedgerViolation("bimultiplication reached outside its registers".into()));
    }
    extract_permutation(&circuit)
}

/// Builds the semiclassical program for one sample of `p` phase bits,
/// ending with the measurement-driven fixup that returns the dirty wires to
/// their initial values and the clean wires to zero.
pub fn build_period_finding(params: ShorParams) -> Result<PeriodFinding> {
    let ShorParams { r, base, p } = params;
    let n = params.n();
    let layout = Layout::new(n);
    let mut ins = vec![Instruction::X(layout.x.get(0))];
    for i in 0..p {
        let k = pow_pow2(base, p - 1 - i, r);
        ins.push(Instruction::H(layout.phase));
        if k != 1 {
            ins.push(Instruction::Classical(Arc::new(bimultiply_permutation(&layout, k, r, true, false)?)));
        }
        let terms = (0..i).map(|b| (b, -2.0 * PI * 2f64.powi(b as i32 - i as i32 - 1))).collect();
        ins.push(Instruction::ConditionedPhase { wire: layout.phase, terms });
        ins.push(Instruction::H(layout.phase));
        ins.push(Instruction::Measure { wire: layout.phase, slot: i });
        ins.push(Instruction::Reset(layout.phase));
    }
    let work_slot = p;
    ins.push(Instruction::MeasureRegister { register: layout.x.clone(), slot: work_slot });
    ins.push(fixup_instruction(&layout, r, work_slot));
    ins.push(Instruction::X(layout.x.get(0)));
    let program = Program { width: layout.width(), slots: p + 1, instructions: ins };
    let budget = QubitBudget { clean: layout.clean_wires().len(), dirty: layout.dirty_wires().len(), total: layout.width() };
    Ok(PeriodFinding { params, layout, program, budget, work_slot })
}

/// `B^{2^e} mod r` by repeated squaring.
pub fn pow_pow2(base: u64, e: usize, r: u64) -> u64 {
    (0..e).fold(base % r, |acc, _| mod_pow(acc, 2, r))
}

/// Multiplies `y` by the measured work value `w` (and `x` by `w⁻¹`),
/// undoing the `w⁻¹` the loop left on the ancilla register.
fn fixup_instruction(layout: &Layout, r: u64, work_slot: usize) -> Instruction {
    let layout = layout.clone();
    let cache: Arc<Mutex<HashMap<u64, Arc<Permutation>>>> = Arc::default();
    Instruction::Adaptive(Arc::new(move |record: &Record| {
        let w = record.values[work_slot];
        let perm = apply_fixup(&layout, r, w, &cache)?;
        Ok(vec![Instruction::Classical(perm)])
    }))
}

fn apply_fixup(
    layout: &Layout,
    r: u64,
    w: u64,
    cache: &Mutex<HashMap<u64, Arc<Permutation>>>,
) -> Result<Arc<Permutation>> {
    mod_inverse(w, r)?;
    if let Some(p) = cache.lock().expect("cache lock").get(&w) {
        return Ok(p.clone());
    }
    let perm = Arc::new(bimultiply_permutation(layout, w, r, false, true)?);
    cache.lock().expect("cache lock").insert(w, perm.clone());
    Ok(perm)
}

/// Result of one period-finding run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodResult {
    pub samples: Vec<u64>,
    pub period: Option<u64>,
    pub trials: usize,
}

/// Samples `s` (phase bits, LSB first) from one run starting with the
/// ancilla register at `dirty`. Returns the sample and the final state.
pub fn sample_once(pf: &PeriodFinding, dirty: u64, seed: u64) -> Result<(u64, StateVector)> {
    let start = pf.layout.y.place(0, dirty);
    let state = StateVector::basis(pf.layout.width(), start)?;
    let (record, state) = run_semiclassical_from(&pf.program, state, seed)?;
    let s = (0..pf.params.p).fold(0u64, |acc, i| acc | ((record.values[i] & 1) << i));
    Ok((s, state))
}

/// Repeats runs until the samples pin down the order of `B`, up to `runs`.
pub fn find_period(params: ShorParams, runs: usize, seed: u64) -> Result<PeriodResult> {
    let pf = build_period_finding(params)?;
    let mut samples = Vec::new();
    let mut acc = 1u64;
    for t in 0..runs {
        let (s, _) = sample_once(&pf, 0, derive_seed(seed, t as u64))?;
        samples.push(s);
        if let Some(l) = order_from_sample(s, params.p, params.r, params.base) {
            acc = acc.lcm(&l);
            let l = reduce_order(acc, params.base, params.r);
            if mod_pow(params.base, l, params.r) == 1 {
                return Ok(PeriodResult { samples, period: Some(l), trials: t + 1 });
            }
        }
    }
    Ok(PeriodResult { samples, period: None, trials: runs })
}

/// Denominators of the convergents of `s / 2^p` that are below `r`,
/// largest first.
pub fn continued_fractions(s: u64, p: usize, r: u64) -> Vec<u64> {
    if s == 0 {
        return Vec::new();
    }
    let (mut num, mut den) = (s as u128, 1u128 << p);
    let (mut k_prev, mut k) = (1u128, 0u128);
    let mut out = Vec::new();
    while den != 0 {
        let a = num / den;
        (num, den) = (den, num - a * den);
        (k_prev, k) = (k, a * k + k_prev);
        if k >= r as u128 {
            break;
        }
        if k > 1 && !out.contains(&(k as u64)) {
            out.push(k as u64);
        }
    }
    out.reverse();
    out
}

/// Smallest `l < r` with `B^l = 1` among small multiples of the candidate
/// denominators of `s`.
fn order_from_sample(s: u64, p: usize, r: u64, base: u64) -> Option<u64> {
    continued_fractions(s, p, r)
        .into_iter()
        .flat_map(|d| (1..).map(move |m| d * m).take_while(move |&l| l < r))
        .filter(|&l| mod_pow(base, l, r) == 1)
        .min()
}

/// Strips prime factors from a multiple of the order while it stays one.
fn reduce_order(mut l: u64, base: u64, r: u64) -> u64 {
    if mod_pow(base, l, r) != 1 {
        return l;
    }
    let mut q = 2;
    let mut rest = l;
    while q * q <= rest || rest > 1 {
        if q * q > rest {
            q = rest;
        }
        if rest.is_multiple_of(q) {
            while rest.is_multiple_of(q) {
                rest /= q;
            }
            while l.is_multiple_of(q) && mod_pow(base, l / q, r) == 1 {
                l /= q;
            }
        }
        q += 1;
    }
    l
}

/// SplitMix64 step, used to give every trial its own seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trial {
    pub base: u64,
    /// `gcd(B, R) > 1`; no quantum run was needed.
    pub lucky: bool,
    pub sample: Option<u64>,
    pub period: Option<u64>,
    pub factors: Option<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorReport {
    pub r: u64,
    pub factors: Option<(u64, u64)>,
    /// How the factors were found when no quantum trial was involved.
    pub classical: Option<String>,
    pub trials: Vec<Trial>,
    pub budget: Option<QubitBudget>,
}

fn is_prime(r: u64) -> bool {
    r >= 2 && (2..).take_while(|d| d * d <= r).all(|d| !r.is_multiple_of(d))
}

/// `Some(q)` when `r = q^e` with `q` prime and `e >= 2`.
fn prime_power_root(r: u64) -> Option<u64> {
    let q = (2..).take_while(|d| d * d <= r).find(|d| r.is_multiple_of(*d))?;
    let mut m = r;
    while m.is_multiple_of(q) {
        m /= q;
    }
    (m == 1).then_some(q)
}

/// Factors `r` by period finding on random bases, trials in parallel.
/// Even moduli and prime powers are split classically.
pub fn factor(r: u64, max_trials: usize, seed: u64) -> Result<FactorReport> {
    factor_with(r, max_trials, seed, None)
}

/// As [`factor`], sampling `p` phase bits per run instead of `2n`.
pub fn factor_with(r: u64, max_trials: usize, seed: u64, p: Option<usize>) -> Result<FactorReport> {
    if r < 4 || is_prime(r) {
        return Err(Error::InvalidParameter(format!("{r} is not composite")));
    }
    let mut report = FactorReport { r, factors: None, classical: None, trials: Vec::new(), budget: None };
    if r.is_multiple_of(2) {
        report.factors = Some((2, r / 2));
        report.classical = Some("even modulus".into());
        return Ok(report);
    }
    if let Some(q) = prime_power_root(r) {
        report.factors = Some((q, r / q));
        report.classical = Some("prime power".into());
        return Ok(report);
    }
    let n = register_size(r);
    report.budget = Some(QubitBudget { clean: n + 2, dirty: n - 1, total: 2 * n + 1 });
    let trials = (0..max_trials)
        .into_par_iter()
        .map(|t| run_trial(r, derive_seed(seed, t as u64), p))
        .collect::<Result<Vec<_>>>()?;
    report.factors = trials.iter().find_map(|t| t.factors);
    report.trials = trials;
    Ok(report)
}

fn run_trial(r: u64, seed: u64, p: Option<usize>) -> Result<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = rng.gen_range(2..r - 1);
    let g = base.gcd(&r);
    if g > 1 {
        return Ok(Trial { base, lucky: true, sample: None, period: None, factors: Some(ordered(g, r / g)) });
    }
    let mut params = ShorParams::new(r, base)?;
    if let Some(p) = p {
        params = params.with_p(p);
    }
    let pf = build_period_finding(params)?;
    let (s, _) = sample_once(&pf, rng.gen_range(0..1u64 << (params.n() - 1)), rng.gen())?;
    let period = order_from_sample(s, params.p, r, base);
    let factors = period.and_then(|l| split_with_period(r, base, l));
    Ok(Trial { base, lucky: false, sample: Some(s), period, factors })
}

fn split_with_period(r: u64, base: u64, l: u64) -> Option<(u64, u64)> {
    if l % 2 == 1 {
        return None;
    }
    let half = mod_pow(base, l / 2, r);
    if half == r - 1 {
        return None;
    }
    [half + r - 1, half + 1]
        .into_iter()
        .map(|v| (v % r).gcd(&r))
        .find(|&g| g > 1 && g < r)
        .map(|g| ordered(g, r / g))
}

fn ordered(a: u64, b: u64) -> (u64, u64) {
    (a.min(b), a.max(b))
}

/// Exact distribution of the `p`-bit phase sample, from a dense simulation
/// with a full `p`-qubit phase register and the inverse Fourier transform.
pub fn dense_phase_distribution(r: u64, base: u64, p: usize) -> Result<Vec<f64>> {
    let n = register_size(r);
    let x = Register::range(0, n);
    let phase = Register::range(n as u32, p);
    let mut s = StateVector::basis(n + p, 1)?;
    for &w in phase.wires() {
        s.h(w)?;
    }
    for j in 0..p {
        let k = pow_pow2(base, j, r);
        let (pw, xr) = (phase.get(j), x.clone());
        s.apply_map(|v| {
            let xv = xr.value_of(v);
            if (v >> pw.0) & 1 == 1 && xv < r {
                xr.place(v, xv * k % r)
            } else {
                v
            }
        })?;
    }
    for g in inverse(&qft(&phase)) {
        g.apply(&mut s)?;
    }
    Ok(s.distribution(&phase))
}


/// Multipliers standing in for `B^{2^j}`: distinct units other than 1,
/// starting near `r/3`.
fn benchmark_multipliers(r: u64, count: usize) -> Vec<u64> {
    let start = coprime_multiplier(r);
    (0..r)
        .map(|i| (start + i) % r)
        .filter(|&k| k > 1 && k.gcd(&r) == 1)
        .cycle()
        .take(count)
        .collect()
}

/// Gates and depth of the reversible part of a `2n`-bit period-finding run
/// at size `n`, modulus [`scaling_modulus`]: `2n` controlled
/// bimultiplications with nontrivial multipliers and one uncontrolled fixup.
pub fn count_period_finding(n: usize) -> Result<ResourceReport> {
    count_period_finding_mod(n, scaling_modulus(n))
}

/// As [`count_period_finding`] with an explicit `n`-bit modulus.
pub fn count_period_finding_mod(n: usize, r: u64) -> Result<ResourceReport> {
    if r < 3 || r.is_multiple_of(2) || r >> n != 0 {
        return Err(Error::InvalidParameter(format!("{r} is not an odd {n}-bit modulus")));
    }
    let layout = Layout::new(n);
    let mut b = Builder::counting();
    layout.declare(&mut b);
    b.x(layout.x.get(0))?;
    let ks = benchmark_multipliers(r, 2 * n + 1);
    for &k in &ks[..2 * n] {
        mod_bimultiply(&mut b, k, r, &layout.x, &layout.y, &[layout.phase])?;
    }
    mod_bimultiply(&mut b, ks[2 * n], r, &layout.y, &layout.x, &[])?;
    b.x(layout.x.get(0))?;
    let width = b.width();
    let (counter, ledger) = b.finish_counts()?;
    Ok(ResourceReport::from_counter(&counter, &ledger, width))
}

/// Gates and depth of the reversible part of one run with `params`: the
/// controlled bimultiplications by `B^(2^i)` that are not the identity,
/// plus a fixup counted with `B` standing in for the measured multiplier.
pub fn count_run(params: &ShorParams) -> Result<ResourceReport> {
    let ShorParams { r, base, p } = *params;
    let layout = Layout::new(params.n());
    let mut b = Builder::counting();
    layout.declare(&mut b);
    b.x(layout.x.get(0))?;
    for i in 0..p {
        let k = pow_pow2(base, p - 1 - i, r);
        if k != 1 {
            mod_bimultiply(&mut b, k, r, &layout.x, &layout.y, &[layout.phase])?;
        }
    }
    mod_bimultiply(&mut b, base, r, &layout.y, &layout.x, &[])?;
    b.x(layout.x.get(0))?;
    let width = b.width();
    let (counter, ledger) = b.finish_counts()?;
    Ok(ResourceReport::from_counter(&counter, &ledger, width))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergents() {
        assert_eq!(continued_fractions(192, 8, 15), vec![4]);
        assert_eq!(continued_fractions(128, 8, 15), vec![2]);
        assert!(continued_fractions(0, 8, 15).is_empty());
    }

    #[test]
    fn order_recovery_for_21() {
        // 2 has order 6 mod 21; samples near j·2^10/6.
        for j in 1..6u64 {
            let s = (j * 1024 + 3) / 6;
            let l = order_from_sample(s, 10, 21, 2).unwrap();
            assert_eq!(6 % l, 0);
        }
    }

    #[test]
    fn budgets() {
        for (r, want) in [(15, (6, 3, 9)), (21, (7, 4, 11))] {
            let b = build_period_finding(ShorParams::new(r, 2).unwrap()).unwrap().budget;
            assert_eq!((b.clean, b.dirty, b.total), want);
        }
    }

    #[test]
    fn lucky_and_classical_cases() {
        assert_eq!(split_with_period(15, 2, 4), Some((3, 5)));
        assert_eq!(factor(25, 4, 1).unwrap().factors, Some((5, 5)));
        assert_eq!(factor(16, 4, 1).unwrap().factors, Some((2, 8)));
        assert!(factor(13, 4, 1).is_err());
        assert_eq!(prime_power_root(27), Some(3));
        assert_eq!(prime_power_root(15), None);
    }

    #[test]
    fn seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
