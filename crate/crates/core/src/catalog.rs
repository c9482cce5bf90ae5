//! Named constructions with fixed wire layouts and reference oracles.
//!
//! Every construction is laid out as its operand registers, then its control
//! wires, then a pool of dirty wires. With no explicit pool size the
//! smallest pool the construction can be built with is used.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::arith::mask;
use crate::circuit::{BuildOptions, Builder, Circuit, CompareStrategy, IncrementStrategy, Register, Wire};
use crate::error::{Error, Result};
use crate::lowering::{lower, OpKind, OpNode};
use crate::modular::{mod_inverse, register_size};
use crate::sim::classical::{check_contract, Contract, Counterexample, Verdict};

/// Largest register size accepted for non-modular constructions.
pub const MAX_SIZE: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Construction {
    Add,
    AddWide,
    Offset,
    IncrementMany,
    IncrementSingle,
    CompareCarry,
    CompareOffset,
    CompareReg,
    MultiNot,
    Mcx,
    Rotate,
    Reverse,
    BiFlip,
    BiFlipReg,
    PivotFlip,
    PivotFlipReg,
    ModOffset,
    ModAdd,
    ModNegate,
    ModDouble,
    ModHalve,
    ScaleAdd,
    Bimultiply,
}

use Construction::*;

impl Construction {
    pub const ALL: [Construction; 23] = [
        Add,
        AddWide,
        Offset,
        IncrementMany,
        IncrementSingle,
        CompareCarry,
        CompareOffset,
        CompareReg,
        MultiNot,
        Mcx,
        Rotate,
        Reverse,
        BiFlip,
        BiFlipReg,
        PivotFlip,
        PivotFlipReg,
        ModOffset,
        ModAdd,
        ModNegate,
        ModDouble,
        ModHalve,
        ScaleAdd,
        Bimultiply,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Add => "add",
            AddWide => "add_wide",
            Offset => "offset",
            IncrementMany => "increment",
            IncrementSingle => "increment_single",
            CompareCarry => "compare",
            CompareOffset => "compare_offset",
            CompareReg => "compare_reg",
            MultiNot => "multi_not",
            Mcx => "mcx",
            Rotate => "rotate",
            Reverse => "reverse",
            BiFlip => "bi_flip",
            BiFlipReg => "bi_flip_reg",
            PivotFlip => "pivot_flip",
            PivotFlipReg => "pivot_flip_reg",
            ModOffset => "mod_offset",
            ModAdd => "mod_add",
            ModNegate => "mod_negate",
            ModDouble => "mod_double",
            ModHalve => "mod_halve",
            ScaleAdd => "scale_add",
            Bimultiply => "bimultiply",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Add => "t += a, equal sizes",
            AddWide => "t += a, target wider than input (-m sets |a|)",
            Offset => "t += K",
            IncrementMany => "t += 1 with n borrowed wires",
            IncrementSingle => "t += 1 with one borrowed wire",
            CompareCarry => "flag ^= [y < K], carry chain",
            CompareOffset => "flag ^= [y < K], offset pair",
            CompareReg => "flag ^= [y < a]",
            MultiNot => "NOT on every target",
            Mcx => "one target, -c controls",
            Rotate => "left rotation by K",
            Reverse => "bit reversal",
            BiFlip => "t -> !(t - K)",
            BiFlipReg => "t -> !t + a",
            PivotFlip => "reverse the states below K",
            PivotFlipReg => "reverse the states below a",
            ModOffset => "t -> t + K mod R",
            ModAdd => "t -> t + a mod R",
            ModNegate => "t -> -t mod R",
            ModDouble => "t -> 2t mod R",
            ModHalve => "t -> t/2 mod R",
            ScaleAdd => "y -> y + K·x mod R",
            Bimultiply => "(x, y) -> (K·x, K⁻¹·y) mod R",
        }
    }

    pub fn is_modular(self) -> bool {
        matches!(self, ModOffset | ModAdd | ModNegate | ModDouble | ModHalve | ScaleAdd | Bimultiply)
    }

    fn options(self) -> BuildOptions {
        let mut o = BuildOptions::default();
        match self {
            IncrementMany => o.increment = IncrementStrategy::ManyDirty,
            IncrementSingle => o.increment = IncrementStrategy::SingleDirty,
            CompareCarry => o.compare = CompareStrategy::Carry,
            CompareOffset => o.compare = CompareStrategy::Offset,
            _ => {}
        }
        o
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "increment_many" => Some(IncrementMany),
            "compare_carry" => Some(CompareCarry),
            "mod_scale_add" => Some(ScaleAdd),
            "mod_bimultiply" => Some(Bimultiply),
            "bit_rotate" => Some(Rotate),
            "bit_reverse" => Some(Reverse),
            _ => None,
        };
        alias
            .or_else(|| Construction::ALL.into_iter().find(|c| c.name() == s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown construction `{s}`")))
    }
}

/// Parameters of one instance. `n` is ignored by modular constructions,
/// whose size follows from `r`, and by `mcx`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Params {
    pub n: usize,
    /// Input width of `add_wide`; defaults to `n - 1`.
    pub m: Option<usize>,
    pub k: u64,
    pub r: u64,
    pub controls: usize,
    /// Dirty pool size; `None` picks the smallest that works.
    pub pool: Option<usize>,
}

/// Register positions of an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub operands: Vec<Register>,
    pub controls: Vec<Wire>,
    pub pool: Register,
}

impl Layout {
    pub fn width(&self) -> usize {
        self.operands.iter().map(Register::len).sum::<usize>() + self.controls.len() + self.pool.len()
    }
}

/// A built construction together with what it must compute.
pub struct Instance {
    pub construction: Construction,
    /// Resolved parameters: `n` set for modular constructions, pool filled in.
    pub params: Params,
    pub layout: Layout,
    pub circuit: Circuit,
}

impl Instance {
    pub fn contract(&self) -> Result<Contract> {
        contract(self.construction, &self.params, &self.layout)
    }

    /// Header line identifying the instance in the gate-list text format.
    pub fn header(&self) -> String {
        header(self.construction, &self.params)
    }
}

fn header(c: Construction, p: &Params) -> String {
    let mut s = format!("# op {} n={} k={} r={} controls={} pool={}", c, p.n, p.k, p.r, p.controls, p.pool.unwrap_or(0));
    if let Some(m) = p.m {
        s.push_str(&format!(" m={m}"));
    }
    s
}

/// Reads the `# op` header written by [`Instance::header`], if present.
pub fn parse_header(text: &str) -> Option<Result<(Construction, Params)>> {
    let line = text.lines().map(str::trim).find_map(|l| l.strip_prefix("# op "))?;
    Some(parse_header_line(line))
}

fn parse_header_line(line: &str) -> Result<(Construction, Params)> {
    let mut parts = line.split_whitespace();
    let c: Construction = parts.next().unwrap_or_default().parse()?;
    let mut p = Params { pool: Some(0), ..Params::default() };
    for kv in parts {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("bad header field `{kv}`")))?;
        let v: u64 = v.parse().map_err(|_| Error::InvalidParameter(format!("bad header value `{kv}`")))?;
        match k {
            "n" => p.n = v as usize,
            "m" => p.m = Some(v as usize),
            "k" => p.k = v,
            "r" => p.r = v,
            "controls" => p.controls = v as usize,
            "pool" => p.pool = Some(v as usize),
            _ => return Err(Error::InvalidParameter(format!("unknown header field `{k}`"))),
        }
    }
    Ok((c, p))
}

/// Checks parameters and fills in `n` for modular constructions.
pub fn resolve(c: Construction, p: &Params) -> Result<Params> {
    let mut p = *p;
    let bad = |m: String| Err(Error::InvalidParameter(m));
    if c.is_modular() {
        if p.r < 3 || p.r.is_multiple_of(2) {
            return bad(format!("{c} needs an odd modulus of at least 3 (-R), got {}", p.r));
        }
        if p.r >= 1 << 31 {
            return bad(format!("modulus {} too large", p.r));
        }
        p.n = register_size(p.r);
        match c {
            ModOffset | ScaleAdd if p.k >= p.r => return bad(format!("K={} must be below R={}", p.k, p.r)),
            Bimultiply => {
                mod_inverse(p.k, p.r)?;
            }
            _ => {}
        }
        return Ok(p);
    }
    if c == Mcx {
        p.n = 1;
        return Ok(p);
    }
    if p.n == 0 || p.n > MAX_SIZE {
        return bad(format!("{c} needs 1 <= n <= {MAX_SIZE}, got {}", p.n));
    }
    let size = 1u64 << p.n;
    match c {
        AddWide => {
            let m = p.m.unwrap_or(p.n.saturating_sub(1));
            if m == 0 || m >= p.n {
                return bad(format!("add_wide needs 1 <= m < n, got m={m} n={}", p.n));
            }
            p.m = Some(m);
        }
        Offset | BiFlip if p.k >= size => return bad(format!("K={} does not fit in {} bits", p.k, p.n)),
        CompareCarry | CompareOffset | PivotFlip if p.k > size => {
            return bad(format!("K={} exceeds 2^{}", p.k, p.n));
        }
        _ => {}
    }
    Ok(p)
}

/// Wire positions for `pool` dirty wires.
pub fn layout(c: Construction, p: &Params, pool: usize) -> Layout {
    let n = p.n;
    let sizes: Vec<usize> = match c {
        AddWide => vec![p.m.unwrap_or(n - 1), n],
        Add | CompareReg | BiFlipReg | PivotFlipReg | ModAdd | ScaleAdd | Bimultiply => vec![n, n],
        Mcx => vec![1],
        _ => vec![n],
    };
    let mut next = 0u32;
    let mut take = |len: usize| {
        let r = Register::range(next, len);
        next += len as u32;
        r
    };
    let mut operands: Vec<Register> = sizes.into_iter().map(&mut take).collect();
    if matches!(c, CompareCarry | CompareOffset | CompareReg) {
        operands.push(take(1));
    }
    let controls = take(p.controls).wires().to_vec();
    let pool = take(pool);
    Layout { operands, controls, pool }
}

fn node(c: Construction, p: &Params, l: &Layout) -> OpNode {
    let ops = l.operands.clone();
    let ctl = l.controls.clone();
    let k = p.k as u128;
    let flagged = |kind: OpKind, regs: Vec<Register>| {
        let flag = regs.last().expect("flag register").get(0);
        OpNode::new(kind, regs[..regs.len() - 1].to_vec(), ctl.clone()).with_flag(flag)
    };
    match c {
        Add | AddWide => OpNode::new(OpKind::AddReg, ops, ctl),
        Offset => OpNode::new(OpKind::Offset, ops, ctl).with_k(k),
        IncrementMany | IncrementSingle => OpNode::new(OpKind::Increment, ops, ctl),
        CompareCarry | CompareOffset => flagged(OpKind::CompareConst, ops).with_k(k),
        CompareReg => flagged(OpKind::CompareReg, ops),
        MultiNot => OpNode::new(OpKind::MultiNot, ops, ctl),
        Mcx => OpNode::new(OpKind::Mcx, ops, ctl),
        Rotate => OpNode::new(OpKind::BitRotate, ops, ctl).with_shift(p.k as usize % p.n),
        Reverse => OpNode::new(OpKind::BitReverse, ops, ctl),
        BiFlip => OpNode::new(OpKind::BiFlip, ops, ctl).with_k(k),
        BiFlipReg => OpNode::new(OpKind::BiFlipReg, ops, ctl),
        PivotFlip => OpNode::new(OpKind::PivotFlip, ops, ctl).with_k(k),
        PivotFlipReg => OpNode::new(OpKind::PivotFlipReg, ops, ctl),
        ModOffset => OpNode::new(OpKind::ModOffset, ops, ctl).with_k(k).with_r(p.r),
        ModAdd => OpNode::new(OpKind::ModAddReg, ops, ctl).with_r(p.r),
        ModNegate => OpNode::new(OpKind::ModNegate, ops, ctl).with_r(p.r),
        ModDouble => OpNode::new(OpKind::ModDouble, ops, ctl).with_r(p.r),
        ModHalve => OpNode::new(OpKind::ModHalve, ops, ctl).with_r(p.r),
        ScaleAdd => OpNode::new(OpKind::ModScaleAdd, ops, ctl).with_k(k).with_r(p.r),
        Bimultiply => OpNode::new(OpKind::ModBimultiply, ops, ctl).with_k(k).with_r(p.r),
    }
}

fn build_with_pool(c: Construction, p: &Params, pool: usize) -> Result<Instance> {
    let l = layout(c, p, pool);
    let mut b = Builder::new();
    b.set_options(c.options());
    b.add_operand(l.width() - pool);
    b.add_dirty_pool(pool);
    lower(&node(c, p, &l), &mut b)?;
    let circuit = b.finish()?;
    Ok(Instance { construction: c, params: Params { pool: Some(pool), ..*p }, layout: l, circuit })
}

/// Builds `c`. Without an explicit pool, `mcx` gets `c - 2` wires (the
/// linear-count reduction) and everything else the smallest pool that works.
pub fn build(c: Construction, params: &Params) -> Result<Instance> {
    let p = resolve(c, params)?;
    if let Some(pool) = p.pool {
        return build_with_pool(c, &p, pool);
    }
    if c == Mcx {
        return build_with_pool(c, &p, p.controls.saturating_sub(2));
    }
    let limit = 2 * p.n + p.controls + 4;
    let mut last = None;
    for pool in 0..=limit {
        match build_with_pool(c, &p, pool) {
            Err(e @ (Error::InsufficientFreeWires { .. } | Error::CleanPoolExhausted { .. })) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

fn inverse_of(k: u64, r: u64) -> u64 {
    mod_inverse(k, r).expect("checked by resolve")
}

/// The contract of `c` under layout `l`. `p` must be resolved.
pub fn contract(c: Construction, p: &Params, l: &Layout) -> Result<Contract> {
    let Params { n, k, r, .. } = *p;
    let m = mask(n) as u64;
    let operands = l.operands.clone();
    let controls = l.controls.clone();
    let below = move |v: &[u64]| v.iter().all(|&x| x < r);
    let contract = match c {
        Add | AddWide => Contract::new(operands, controls, move |v| Some(vec![v[0], (v[1] + v[0]) & m])),
        Offset => Contract::new(operands, controls, move |v| Some(vec![(v[0] + k) & m])),
        IncrementMany | IncrementSingle => Contract::new(operands, controls, move |v| Some(vec![(v[0] + 1) & m])),
        CompareCarry | CompareOffset => {
            Contract::new(operands, controls, move |v| Some(vec![v[0], v[1] ^ (v[0] < k) as u64]))
        }
        CompareReg => Contract::new(operands, controls, move |v| Some(vec![v[0], v[1], v[2] ^ (v[1] < v[0]) as u64])),
        MultiNot => Contract::new(operands, controls, move |v| Some(vec![!v[0] & m])),
        Mcx => Contract::new(operands, controls, |v| Some(vec![v[0] ^ 1])),
        Rotate => {
            let s = k as usize % n;
            Contract::new(operands, controls, move |v| Some(vec![((v[0] << s) | (v[0] >> (n - s))) & m]))
        }
        Reverse => Contract::new(operands, controls, move |v| {
            Some(vec![(0..n).fold(0, |acc, i| acc | (((v[0] >> i) & 1) << (n - 1 - i)))])
        }),
        BiFlip => Contract::new(operands, controls, move |v| Some(vec![!v[0].wrapping_sub(k) & m])),
        BiFlipReg => Contract::new(operands, controls, move |v| Some(vec![v[0], (!v[1]).wrapping_add(v[0]) & m])),
        PivotFlip => Contract::new(operands, controls, move |v| Some(vec![pivot(v[0], k)])),
        PivotFlipReg => Contract::new(operands, controls, move |v| Some(vec![v[0], pivot(v[1], v[0])])),
        ModOffset => Contract::new(operands, controls, move |v| below(v).then(|| vec![(v[0] + k) % r])),
        ModAdd => Contract::new(operands, controls, move |v| below(v).then(|| vec![v[0], (v[1] + v[0]) % r])),
        ModNegate => Contract::new(operands, controls, move |v| below(v).then(|| vec![(r - v[0]) % r])),
        ModDouble => Contract::new(operands, controls, move |v| below(v).then(|| vec![2 * v[0] % r])),
        ModHalve => {
            let half = r.div_ceil(2);
            Contract::new(operands, controls, move |v| below(v).then(|| vec![v[0] * half % r]))
        }
        ScaleAdd => Contract::new(operands, controls, move |v| below(v).then(|| vec![v[0], (v[1] + k * v[0]) % r])),
        Bimultiply => {
            let inv = inverse_of(k, r);
            Contract::new(operands, controls, move |v| below(v).then(|| vec![k * v[0] % r, inv * v[1] % r]))
        }
    };
    Ok(contract)
}

fn pivot(v: u64, k: u64) -> u64 {
    if v < k {
        k - 1 - v
    } else {
        v
    }
}

/// Outcome of checking one instance.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub construction: Construction,
    pub params: Params,
    pub width: usize,
    pub outcome: std::result::Result<u64, CaseFailure>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CaseFailure {
    Counterexample(Counterexample),
    Error(Error),
}

impl fmt::Display for CaseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseFailure::Counterexample(c) => write!(f, "counterexample {c}"),
            CaseFailure::Error(e) => write!(f, "error: {e}"),
        }
    }
}

/// Builds and checks one instance; `None` when it is wider than `max_width`.
pub fn check_case(c: Construction, p: &Params, max_width: usize) -> Option<CaseResult> {
    let inst = match build(c, p) {
        Ok(i) => i,
        Err(e) => return Some(CaseResult { construction: c, params: *p, width: 0, outcome: Err(CaseFailure::Error(e)) }),
    };
    let width = inst.circuit.width;
    if width > max_width {
        return None;
    }
    let outcome = inst
        .contract()
        .and_then(|ct| check_contract(&inst.circuit, &ct))
        .map_err(CaseFailure::Error)
        .and_then(|v| match v {
            Verdict::Pass { checked } => Ok(checked),
            Verdict::Fail(cx) => Err(CaseFailure::Counterexample(cx)),
        });
    Some(CaseResult { construction: c, params: inst.params, width, outcome })
}

/// Up to 16 values of `0..domain`: all of them when few, otherwise both
/// ends plus a spread of interior points.
fn spread(domain: u64) -> Vec<u64> {
    if domain <= 16 {
        return (0..domain).collect();
    }
    let mut v = vec![0, 1, domain - 2, domain - 1];
    v.extend((1..=12).map(|i| (i * 0x9E37_79B9u64) % domain));
    v.sort_unstable();
    v.dedup();
    v
}

/// Odd moduli with `n` bits: all when few, otherwise eight spread out.
fn moduli(n: usize) -> Vec<u64> {
    let lo = (1u64 << (n - 1)) + 1;
    let all: Vec<u64> = (lo..1u64 << n).step_by(2).filter(|&r| r >= 3).collect();
    if all.len() <= 8 {
        return all;
    }
    let step = (all.len() - 1) as f64 / 7.0;
    let mut v: Vec<u64> = (0..8).map(|i| all[(i as f64 * step).round() as usize]).collect();
    v.dedup();
    v
}

/// Instances whose operand and control wires alone fit in `max_width`.
/// Builds wider than `max_width` are dropped by [`check_case`].
pub fn sweep_cases(max_width: usize) -> Vec<(Construction, Params)> {
    let mut cases = Vec::new();
    for c in Construction::ALL {
        if c == Mcx {
            cases.extend((0..max_width).map(|controls| (c, Params { controls, ..Params::default() })));
            continue;
        }
        for controls in 0..=3usize {
            for n in 1..=max_width {
                let base = Params { n, controls, ..Params::default() };
                let words = layout(c, &base, 0).width();
                if c.is_modular() {
                    if n < 2 || words > max_width {
                        continue;
                    }
                    for r in moduli(n) {
                        let ks: Vec<u64> = match c {
                            ModOffset | ScaleAdd => spread(r),
                            Bimultiply => spread(r).into_iter().filter(|&k| mod_inverse(k, r).is_ok()).collect(),
                            _ => vec![0],
                        };
                        cases.extend(ks.into_iter().map(|k| (c, Params { r, k, ..base })));
                    }
                    continue;
                }
                if words > max_width {
                    continue;
                }
                let size = 1u64 << n;
                let ks = match c {
                    Offset | BiFlip => spread(size),
                    CompareCarry | CompareOffset | PivotFlip => spread(size + 1),
                    Rotate => (0..n as u64).collect(),
                    _ => vec![0],
                };
                match c {
                    AddWide => {
                        for m in 1..n {
                            cases.push((c, Params { m: Some(m), ..base }));
                        }
                    }
                    _ => cases.extend(ks.into_iter().map(|k| (c, Params { k, ..base }))),
                }
            }
        }
    }
    cases
}

/// Checks every sweep case in parallel.
pub fn run_sweep(max_width: usize) -> Vec<CaseResult> {
    sweep_cases(max_width).par_iter().filter_map(|(c, p)| check_case(*c, p, max_width)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for c in Construction::ALL {
            assert_eq!(c.name().parse::<Construction>().unwrap(), c);
        }
        assert_eq!("mod_bimultiply".parse::<Construction>().unwrap(), Bimultiply);
        assert!("nope".parse::<Construction>().is_err());
    }

    #[test]
    fn offset_uses_one_dirty_wire() {
        let inst = build(Offset, &Params { n: 4, k: 5, ..Params::default() }).unwrap();
        assert_eq!(inst.circuit.width, 5);
        assert!(check_contract(&inst.circuit, &inst.contract().unwrap()).unwrap().passed());
    }

    #[test]
    fn header_round_trip() {
        let inst = build(AddWide, &Params { n: 4, controls: 1, ..Params::default() }).unwrap();
        let (c, p) = parse_header(&inst.header()).unwrap().unwrap();
        assert_eq!(c, AddWide);
        assert_eq!(p, inst.params);
    }

    #[test]
    fn invalid_parameters() {
        assert!(build(Offset, &Params { n: 3, k: 8, ..Params::default() }).is_err());
        assert!(build(ModDouble, &Params { r: 8, ..Params::default() }).is_err());
        assert!(build(Bimultiply, &Params { r: 15, k: 6, ..Params::default() }).is_err());
        assert!(build(AddWide, &Params { n: 1, ..Params::default() }).is_err());
    }

    #[test]
    fn small_sweep_passes() {
        let results = run_sweep(6);
        assert!(results.len() > 100);
        for r in &results {
            assert!(r.outcome.is_ok(), "{} {:?}: {}", r.construction, r.params, r.outcome.as_ref().unwrap_err());
        }
    }
}
