//! Operation nodes, lowering dispatch and resource reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::circuit::{AncillaLedger, Builder, Circuit, Gate, GateKind, Register, Wire};
use crate::error::{Error, Result};
use crate::modular;

/// Every construction the lowering pass knows how to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    AddReg,
    Offset,
    Increment,
    CompareReg,
    CompareConst,
    MultiNot,
    Mcx,
    BitRotate,
    BitReverse,
    BiFlip,
    BiFlipReg,
    PivotFlip,
    PivotFlipReg,
    ModOffset,
    ModAddReg,
    ModNegate,
    ModDouble,
    ModHalve,
    ModScaleAdd,
    ModBimultiply,
}

/// A high-level operation awaiting lowering.
///
/// Operand conventions, in order: `AddReg`, `CompareReg`, `BiFlipReg`,
/// `PivotFlipReg`, `ModAddReg`: `[input, target]`; `ModScaleAdd`: `[x, y]`;
/// `ModBimultiply`: `[x, y]`; `CompareConst`: `[y]` plus `flag`; `CompareReg`
/// also takes `flag`; `MultiNot`/`Mcx`: `[targets]`; the rest: `[target]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpNode {
    pub kind: OpKind,
    pub k: u128,
    pub r: u64,
    pub shift: usize,
    pub flag: Option<Wire>,
    pub operands: Vec<Register>,
    pub controls: Vec<Wire>,
}

impl OpNode {
    pub fn new(kind: OpKind, operands: Vec<Register>, controls: Vec<Wire>) -> Self {
        OpNode { kind, k: 0, r: 0, shift: 0, flag: None, operands, controls }
    }

    pub fn with_k(mut self, k: u128) -> Self {
        self.k = k;
        self
    }

    pub fn with_r(mut self, r: u64) -> Self {
        self.r = r;
        self
    }

    pub fn with_shift(mut self, shift: usize) -> Self {
        self.shift = shift;
        self
    }

    pub fn with_flag(mut self, flag: Wire) -> Self {
        self.flag = Some(flag);
        self
    }

    fn operand(&self, i: usize) -> Result<&Register> {
        self.operands
            .get(i)
            .ok_or_else(|| Error::InvalidParameter(format!("{:?} needs operand {i}", self.kind)))
    }

    fn flag(&self) -> Result<Wire> {
        self.flag.ok_or_else(|| Error::InvalidParameter(format!("{:?} needs a flag wire", self.kind)))
    }

    fn k64(&self) -> Result<u64> {
        u64::try_from(self.k).map_err(|_| Error::InvalidParameter(format!("constant {} too large", self.k)))
    }

    fn check_disjoint(&self) -> Result<()> {
        let mut seen: Vec<Wire> = Vec::new();
        let flag = self.flag.iter().copied();
        let all = self.operands.iter().flat_map(|r| r.wires().iter().copied()).chain(flag);
        for w in all.chain(self.controls.iter().copied()) {
            if seen.contains(&w) {
                return Err(Error::InvalidParameter(format!("wire {w} used twice by {:?}", self.kind)));
            }
            seen.push(w);
        }
        Ok(())
    }
}

/// Lowers `node` into `b`; the result contains only X, CX and CCX gates.
pub fn lower(node: &OpNode, b: &mut Builder) -> Result<()> {
    node.check_disjoint()?;
    let c = &node.controls[..];
    match node.kind {
        OpKind::AddReg => arith::add_reg(b, node.operand(0)?, node.operand(1)?, c),
        OpKind::Offset => arith::offset(b, node.k, node.operand(0)?, c),
        OpKind::Increment => arith::increment(b, node.operand(0)?, c),
        OpKind::CompareReg => {
            arith::compare_lt_toggle(b, node.operand(0)?, node.operand(1)?, node.flag()?, c)
        }
        OpKind::CompareConst => arith::compare_lt_toggle_const(b, node.k, node.operand(0)?, node.flag()?, c),
        OpKind::MultiNot | OpKind::Mcx => arith::multi_not(b, c, node.operand(0)?.wires()),
        OpKind::BitRotate => arith::bit_rotate(b, node.operand(0)?, node.shift, c),
        OpKind::BitReverse => arith::bit_reverse(b, node.operand(0)?, c),
        OpKind::BiFlip => modular::bi_flip(b, node.k, node.operand(0)?, c),
        OpKind::BiFlipReg => modular::bi_flip_reg(b, node.operand(0)?, node.operand(1)?, c),
        OpKind::PivotFlip => modular::pivot_flip(b, node.k, node.operand(0)?, c),
        OpKind::PivotFlipReg => modular::pivot_flip_reg(b, node.operand(0)?, node.operand(1)?, c),
        OpKind::ModOffset => modular::mod_offset(b, node.k64()?, node.r, node.operand(0)?, c),
        OpKind::ModAddReg => modular::mod_add_reg(b, node.operand(0)?, node.r, node.operand(1)?, c),
        OpKind::ModNegate => modular::mod_negate(b, node.r, node.operand(0)?, c),
        OpKind::ModDouble => modular::mod_double(b, node.r, node.operand(0)?, c),
        OpKind::ModHalve => modular::mod_halve(b, node.r, node.operand(0)?, c),
        OpKind::ModScaleAdd => {
            modular::mod_scale_add(b, node.k64()?, node.r, node.operand(0)?, node.operand(1)?, c)
        }
        OpKind::ModBimultiply => {
            modular::mod_bimultiply(b, node.k64()?, node.r, node.operand(0)?, node.operand(1)?, c)
        }
    }
}

/// Gate tallies and per-wire ASAP depth, fed one gate at a time.
#[derive(Clone, Debug, Default)]
pub struct ResourceCounter {
    pub not_count: u64,
    pub cnot_count: u64,
    pub toffoli_count: u64,
    /// Gates with more than two controls; zero after lowering.
    pub wide_count: u64,
    levels: Vec<u64>,
    depth: u64,
}

impl ResourceCounter {
    pub fn new(width: usize) -> Self {
        ResourceCounter { levels: vec![0; width], ..Default::default() }
    }

    pub(crate) fn grow(&mut self, width: usize) {
        if self.levels.len() < width {
            self.levels.resize(width, 0);
        }
    }

    pub fn record(&mut self, gate: &Gate) {
        match gate.kind() {
            GateKind::Not => self.not_count += 1,
            GateKind::Cnot => self.cnot_count += 1,
            GateKind::Toffoli => self.toffoli_count += 1,
            GateKind::Mcx(_) => self.wide_count += 1,
        }
        let top = gate.wires().map(|w| w.index()).max().unwrap_or(0);
        self.grow(top + 1);
        let level = gate.wires().map(|w| self.levels[w.index()]).max().unwrap_or(0) + 1;
        for w in gate.wires() {
            self.levels[w.index()] = level;
        }
        self.depth = self.depth.max(level);
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }

    pub fn total(&self) -> u64 {
        self.not_count + self.cnot_count + self.toffoli_count + self.wide_count
    }
}

/// Gate counts, depth and ancilla usage of a circuit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub not_count: u64,
    pub cnot_count: u64,
    pub toffoli_count: u64,
    pub depth: u64,
    pub clean_highwater: usize,
    pub dirty_highwater: usize,
    pub total_width: usize,
}

impl ResourceReport {
    pub fn from_counter(counter: &ResourceCounter, ledger: &AncillaLedger, width: usize) -> Self {
        ResourceReport {
            not_count: counter.not_count,
            cnot_count: counter.cnot_count,
            toffoli_count: counter.toffoli_count,
            depth: counter.depth(),
            clean_highwater: ledger.clean_highwater,
            dirty_highwater: ledger.dirty_highwater,
            total_width: width,
        }
    }

    pub fn total_gates(&self) -> u64 {
        self.not_count + self.cnot_count + self.toffoli_count
    }

    /// One `key=value` pair per line.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn from_key_value(text: &str) -> Result<Self> {
        let mut r = ResourceReport::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::Parse { line: i + 1, message: m };
            let (k, v) = line.split_once('=').ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
            let v: u64 = v.trim().parse().map_err(|_| err(format!("bad number `{v}`")))?;
            match k.trim() {
                "not_count" => r.not_count = v,
                "cnot_count" => r.cnot_count = v,
                "toffoli_count" => r.toffoli_count = v,
                "depth" => r.depth = v,
                "clean_highwater" => r.clean_highwater = v as usize,
                "dirty_highwater" => r.dirty_highwater = v as usize,
                "total_width" => r.total_width = v as usize,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn fields(&self) -> [(&'static str, u64); 7] {
        [
            ("not_count", self.not_count),
            ("cnot_count", self.cnot_count),
            ("toffoli_count", self.toffoli_count),
            ("depth", self.depth),
            ("clean_highwater", self.clean_highwater as u64),
            ("dirty_highwater", self.dirty_highwater as u64),
            ("total_width", self.total_width as u64),
        ]
    }
}

/// Counts gates by kind and computes conflict depth (controls included).
pub fn measure_resources(circuit: &Circuit) -> ResourceReport {
    let mut counter = ResourceCounter::new(circuit.width);
    for g in &circuit.gates {
        counter.record(g);
    }
    ResourceReport::from_counter(&counter, &circuit.ledger, circuit.width)
}

/// Families whose growth with register size can be fitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingFamily {
    SameSizeAdder,
    Offset,
    ModScaleAdd,
    ControlledBimultiply,
    PeriodFinding,
}

/// Log-log slopes of gate count and depth against register size.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub gate_slope: f64,
    pub depth_slope: f64,
    pub points: Vec<(usize, ResourceReport)>,
}

/// Odd modulus with exactly `n` bits used by the scaling families.
pub fn scaling_modulus(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Measures `family` at each size without storing gates and fits slopes.
pub fn fit_scaling(family: ScalingFamily, sizes: &[usize]) -> Result<ScalingFit> {
    if sizes.len() < 4 {
        return Err(Error::DegenerateFit(format!("need at least 4 sizes, got {}", sizes.len())));
    }
    let points = sizes
        .iter()
        .map(|&n| count_family(family, n).map(|r| (n, r)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = points.iter().map(|(n, _)| *n as f64).collect();
    let gates: Vec<f64> = points.iter().map(|(_, r)| r.total_gates() as f64).collect();
    let depths: Vec<f64> = points.iter().map(|(_, r)| r.depth as f64).collect();
    Ok(ScalingFit { gate_slope: loglog_slope(&xs, &gates)?, depth_slope: loglog_slope(&xs, &depths)?, points })
}

fn count_family(family: ScalingFamily, n: usize) -> Result<ResourceReport> {
    match family {
        ScalingFamily::PeriodFinding => crate::shor::count_period_finding(n),
        _ => {
            let mut b = Builder::counting();
            match family {
                ScalingFamily::SameSizeAdder => {
                    let a = b.add_operand(n);
                    let t = b.add_operand(n);
                    arith::add_reg(&mut b, &a, &t, &[])?;
                }
                ScalingFamily::Offset => {
                    let t = b.add_operand(n);
                    b.add_dirty_pool(1);
                    arith::offset(&mut b, 0x5555_5555_5555_5555_5555_5555_5555_5555 & arith::mask(n), &t, &[])?;
                }
                ScalingFamily::ModScaleAdd | ScalingFamily::ControlledBimultiply => {
                    let r = scaling_modulus(n);
                    let x = b.add_operand(n);
                    let y = b.add_operand(n);
                    let c = b.add_operand(1);
                    let k = coprime_multiplier(r);
                    if family == ScalingFamily::ModScaleAdd {
                        modular::mod_scale_add(&mut b, k, r, &x, &y, c.wires())?;
                    } else {
                        modular::mod_bimultiply(&mut b, k, r, &x, &y, c.wires())?;
                    }
                }
                ScalingFamily::PeriodFinding => unreachable!(),
            }
            let width = b.width();
            let (counter, ledger) = b.finish_counts()?;
            Ok(ResourceReport::from_counter(&counter, &ledger, width))
        }
    }
}

/// A fixed multiplier near `r/3` that is invertible modulo `r`.
pub fn coprime_multiplier(r: u64) -> u64 {
    use num_integer::Integer;
    (r / 3 + 1..r).find(|k| k.gcd(&r) == 1).unwrap_or(1)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::DegenerateFit("need matching series of length >= 2".into()));
    }
    if xs.iter().chain(ys).any(|v| *v <= 0.0 || !v.is_finite()) {
        return Err(Error::DegenerateFit("values must be positive".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all sizes equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
