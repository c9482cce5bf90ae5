//! Wires, registers, gates, circuits and the builder that hands out ancillae.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::arith::mcx;
use crate::error::{Error, Result};
use crate::lowering::ResourceCounter;

/// Index of one bit in the global wire pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Wire(pub u32);

impl Wire {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ordered view over wires, least significant first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Register {
    wires: Vec<Wire>,
}

impl Register {
    pub fn new(wires: Vec<Wire>) -> Result<Self> {
        let mut seen: Vec<u32> = wires.iter().map(|w| w.0).collect();
        seen.sort_unstable();
        if let Some(pair) = seen.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::DuplicateWire(pair[0]));
        }
        Ok(Register { wires })
    }

    /// Contiguous register `start, start+1, ..., start+len-1`.
    pub fn range(start: u32, len: usize) -> Self {
        Register { wires: (start..start + len as u32).map(Wire).collect() }
    }

    pub fn empty() -> Self {
        Register { wires: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.wires.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wires.is_empty()
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn get(&self, i: usize) -> Wire {
        self.wires[i]
    }

    pub fn msb(&self) -> Wire {
        *self.wires.last().expect("empty register has no msb")
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Register {
        Register { wires: self.wires[range].to_vec() }
    }

    pub fn low(&self, len: usize) -> Register {
        self.slice(0..len)
    }

    pub fn high_from(&self, start: usize) -> Register {
        self.slice(start..self.len())
    }

    /// `self` followed by `other` (other becomes the high part).
    pub fn concat(&self, other: &Register) -> Register {
        let mut wires = self.wires.clone();
        wires.extend_from_slice(&other.wires);
        Register { wires }
    }

    /// `[w]` followed by `self`, so `w` becomes the new LSB.
    pub fn with_lsb(&self, w: Wire) -> Register {
        let mut wires = Vec::with_capacity(self.len() + 1);
        wires.push(w);
        wires.extend_from_slice(&self.wires);
        Register { wires }
    }

    pub fn contains(&self, w: Wire) -> bool {
        self.wires.contains(&w)
    }

    /// Reads the register value out of a packed basis state.
    pub fn value_of(&self, state: u64) -> u64 {
        self.wires
            .iter()
            .enumerate()
            .fold(0, |acc, (i, w)| acc | (((state >> w.0) & 1) << i))
    }

    /// Writes `value` into the register's bits of `state`.
    pub fn place(&self, state: u64, value: u64) -> u64 {
        self.wires.iter().enumerate().fold(state, |acc, (i, w)| {
            (acc & !(1u64 << w.0)) | (((value >> i) & 1) << w.0)
        })
    }

    /// Bit mask of this register's wires.
    pub fn mask(&self) -> u64 {
        self.wires.iter().fold(0, |acc, w| acc | (1u64 << w.0))
    }
}

impl From<Vec<Wire>> for Register {
    /// Panics on duplicates; use [`Register::new`] for fallible construction.
    fn from(wires: Vec<Wire>) -> Self {
        Register::new(wires).expect("register with duplicate wires")
    }
}

/// Classification used in resource reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not,
    Cnot,
    Toffoli,
    Mcx(usize),
}

/// Controlled NOT with any number of controls.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub controls: SmallVec<[Wire; 2]>,
    pub target: Wire,
}

impl Gate {
    pub fn x(t: Wire) -> Self {
        Gate { controls: SmallVec::new(), target: t }
    }

    pub fn cx(c: Wire, t: Wire) -> Self {
        Gate { controls: SmallVec::from_slice(&[c]), target: t }
    }

    pub fn ccx(c1: Wire, c2: Wire, t: Wire) -> Self {
        Gate { controls: SmallVec::from_slice(&[c1, c2]), target: t }
    }

    pub fn mcx(controls: &[Wire], t: Wire) -> Self {
        Gate { controls: SmallVec::from_slice(controls), target: t }
    }

    pub fn kind(&self) -> GateKind {
        match self.controls.len() {
            0 => GateKind::Not,
            1 => GateKind::Cnot,
            2 => GateKind::Toffoli,
            c => GateKind::Mcx(c),
        }
    }

    pub fn wires(&self) -> impl Iterator<Item = Wire> + '_ {
        self.controls.iter().copied().chain(std::iter::once(self.target))
    }

    pub fn touches(&self, w: Wire) -> bool {
        self.target == w || self.controls.contains(&w)
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        for w in self.wires() {
            if w.index() >= width {
                return Err(Error::WireOutOfRange { wire: w.0, width });
            }
        }
        if self.controls.contains(&self.target) {
            return Err(Error::MalformedGate(format!("target {} is also a control", self.target)));
        }
        for (i, c) in self.controls.iter().enumerate() {
            if self.controls[..i].contains(c) {
                return Err(Error::MalformedGate(format!("control {c} repeated")));
            }
        }
        Ok(())
    }

    /// Applies the gate to a packed basis state.
    #[inline]
    pub fn apply(&self, state: u64) -> u64 {
        let on = self.controls.iter().all(|c| (state >> c.0) & 1 == 1);
        state ^ ((on as u64) << self.target.0)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.controls.len() {
            0 => write!(f, "X {}", self.target),
            1 => write!(f, "CX {} {}", self.controls[0], self.target),
            2 => write!(f, "CCX {} {} {}", self.controls[0], self.controls[1], self.target),
            _ => {
                write!(f, "MCX")?;
                for c in &self.controls {
                    write!(f, " {c}")?;
                }
                write!(f, " {}", self.target)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BorrowKind {
    Clean,
    Dirty,
}

/// Borrow accounting for one circuit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaLedger {
    pub clean_highwater: usize,
    pub dirty_highwater: usize,
    pub active_borrows: Vec<(Wire, BorrowKind)>,
}

/// A flat gate list over `width` wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub width: usize,
    pub gates: Vec<Gate>,
    pub ledger: AncillaLedger,
    /// Wires that must enter (and leave) in state 0.
    pub clean_wires: Vec<Wire>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit { width, gates: Vec::new(), ledger: AncillaLedger::default(), clean_wires: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn is_lowered(&self) -> bool {
        self.gates.iter().all(|g| g.controls.len() <= 2)
    }

    /// Same gates in reverse order. Every gate here is self-inverse.
    pub fn inverse(&self) -> Circuit {
        let mut c = self.clone();
        c.gates.reverse();
        c
    }

    /// Applies all gates to a packed basis state.
    pub fn apply(&self, state: u64) -> u64 {
        self.gates.iter().fold(state, |s, g| g.apply(s))
    }

    /// Renders the gate-list text format.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 * self.gates.len() + 32);
        let _ = writeln!(out, "# width {}", self.width);
        if !self.clean_wires.is_empty() {
            out.push_str("# clean");
            for w in &self.clean_wires {
                let _ = write!(out, " {w}");
            }
            out.push('\n');
        }
        for g in &self.gates {
            let _ = writeln!(out, "{g}");
        }
        out
    }

    /// Parses the gate-list text format. A missing width header is inferred
    /// from the largest wire index.
    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut width: Option<usize> = None;
        let mut clean = Vec::new();
        let mut gates = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: line_no, message };
            if let Some(comment) = line.strip_prefix('#') {
                let mut parts = comment.split_whitespace();
                match parts.next() {
                    Some("width") => {
                        let w = parts
                            .next()
                            .ok_or_else(|| parse_err("width header without a value".into()))?;
                        width = Some(w.parse().map_err(|_| parse_err(format!("bad width `{w}`")))?);
                    }
                    Some("clean") => {
                        for tok in parts {
                            let w: u32 =
                                tok.parse().map_err(|_| parse_err(format!("bad wire `{tok}`")))?;
                            clean.push(Wire(w));
                        }
                    }
                    _ => {}
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let op = parts.next().unwrap_or_default();
            let args: Vec<Wire> = parts
                .map(|tok| tok.parse::<u32>().map(Wire).map_err(|_| parse_err(format!("bad wire `{tok}`"))))
                .collect::<Result<_>>()?;
            let expected = match op {
                "X" => Some(1),
                "CX" => Some(2),
                "CCX" => Some(3),
                "MCX" => None,
                other => return Err(parse_err(format!("unknown gate `{other}`"))),
            };
            if let Some(n) = expected {
                if args.len() != n {
                    return Err(parse_err(format!("{op} takes {n} wires, got {}", args.len())));
                }
            } else if args.is_empty() {
                return Err(parse_err("MCX needs a target".into()));
            }
            let (target, controls) = args.split_last().expect("nonempty");
            gates.push((line_no, Gate::mcx(controls, *target)));
        }
        let inferred = gates
            .iter()
            .flat_map(|(_, g)| g.wires())
            .chain(clean.iter().copied())
            .map(|w| w.index() + 1)
            .max()
            .unwrap_or(0);
        let width = width.unwrap_or(inferred);
        let mut circuit = Circuit::new(width);
        for (line, g) in gates {
            g.validate(width).map_err(|e| Error::Parse { line, message: e.to_string() })?;
            circuit.gates.push(g);
        }
        for w in &clean {
            if w.index() >= width {
                return Err(Error::WireOutOfRange { wire: w.0, width });
            }
        }
        circuit.clean_wires = clean;
        Ok(circuit)
    }
}

/// Which increment construction to prefer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum IncrementStrategy {
    /// Subtraction pair when enough borrowable wires exist, else the split form.
    #[default]
    Auto,
    ManyDirty,
    SingleDirty,
}

/// Which constant comparison to prefer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CompareStrategy {
    /// Carry chain when n-1 wires are borrowable, otherwise offsets.
    #[default]
    Auto,
    Offset,
    Carry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct BuildOptions {
    pub increment: IncrementStrategy,
    pub compare: CompareStrategy,
    /// Replace the pivot flip at R inside modular offsets by a bi-flip.
    pub biflip_at_modulus: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WireRole {
    Operand,
    CleanPool,
    DirtyPool,
}

enum Sink {
    Store(Vec<Gate>),
    Count(ResourceCounter),
}

/// Emits gates and brokers ancillae.
///
/// Borrowed wires stay lendable: a nested construction may borrow a wire held
/// by an enclosing one, because it restores the wire before returning.
pub struct Builder {
    roles: Vec<WireRole>,
    holds: Vec<SmallVec<[BorrowKind; 2]>>,
    ledger: AncillaLedger,
    clean_in_use: usize,
    dirty_in_use: usize,
    sink: Sink,
    blocks: Vec<Vec<Gate>>,
    options: BuildOptions,
    /// Wires preferred by borrows; `None` means no preference.
    confine: Option<Vec<bool>>,
}

impl Default for Builder {
    fn default() -> Self {
        Self::new()
    }
}

impl Builder {
    pub fn new() -> Self {
        Builder {
            roles: Vec::new(),
            holds: Vec::new(),
            ledger: AncillaLedger::default(),
            clean_in_use: 0,
            dirty_in_use: 0,
            sink: Sink::Store(Vec::new()),
            blocks: Vec::new(),
            options: BuildOptions::default(),
            confine: None,
        }
    }

    /// A builder that only tallies resources instead of storing gates.
    pub fn counting() -> Self {
        Builder { sink: Sink::Count(ResourceCounter::new(0)), ..Self::new() }
    }

    /// A builder with `width` operand wires already allocated.
    pub fn with_width(width: usize) -> Self {
        let mut b = Self::new();
        b.add_operand(width);
        b
    }

    pub fn set_options(&mut self, options: BuildOptions) {
        self.options = options;
    }

    pub fn options(&self) -> BuildOptions {
        self.options
    }

    pub fn width(&self) -> usize {
        self.roles.len()
    }

    pub fn is_counting(&self) -> bool {
        matches!(self.sink, Sink::Count(_))
    }

    fn add_wires(&mut self, n: usize, role: WireRole) -> Register {
        let start = self.roles.len() as u32;
        for _ in 0..n {
            self.roles.push(role);
            self.holds.push(SmallVec::new());
        }
        if let Sink::Count(c) = &mut self.sink {
            c.grow(self.roles.len());
        }
        Register::range(start, n)
    }

    pub fn add_operand(&mut self, n: usize) -> Register {
        self.add_wires(n, WireRole::Operand)
    }

    pub fn add_clean_pool(&mut self, n: usize) -> Register {
        self.add_wires(n, WireRole::CleanPool)
    }

    pub fn add_dirty_pool(&mut self, n: usize) -> Register {
        self.add_wires(n, WireRole::DirtyPool)
    }

    pub fn role(&self, w: Wire) -> WireRole {
        self.roles[w.index()]
    }

    pub fn ledger(&self) -> &AncillaLedger {
        &self.ledger
    }

    fn outermost(&self, w: Wire) -> Option<BorrowKind> {
        self.holds[w.index()].first().copied()
    }

    fn adjust_usage(&mut self, w: Wire, before: Option<BorrowKind>) {
        if self.roles[w.index()] == WireRole::Operand {
            return;
        }
        let after = self.outermost(w);
        if before == after {
            return;
        }
        match before {
            Some(BorrowKind::Clean) => self.clean_in_use -= 1,
            Some(BorrowKind::Dirty) => self.dirty_in_use -= 1,
            None => {}
        }
        match after {
            Some(BorrowKind::Clean) => self.clean_in_use += 1,
            Some(BorrowKind::Dirty) => self.dirty_in_use += 1,
            None => {}
        }
        self.ledger.clean_highwater = self.ledger.clean_highwater.max(self.clean_in_use);
        self.ledger.dirty_highwater = self.ledger.dirty_highwater.max(self.dirty_in_use);
    }

    fn hold(&mut self, w: Wire, kind: BorrowKind) {
        let before = self.outermost(w);
        self.holds[w.index()].push(kind);
        self.ledger.active_borrows.push((w, kind));
        self.adjust_usage(w, before);
    }

    fn unhold(&mut self, w: Wire, kind: BorrowKind) -> Result<()> {
        let before = self.outermost(w);
        let stack = &mut self.holds[w.index()];
        let pos = stack
            .iter()
            .rposition(|k| *k == kind)
            .ok_or_else(|| Error::LedgerViolation(format!("wire {w} released but not borrowed as {kind:?}")))?;
        stack.remove(pos);
        let entry = self
            .ledger
            .active_borrows
            .iter()
            .rposition(|e| *e == (w, kind))
            .expect("ledger out of sync");
        self.ledger.active_borrows.remove(entry);
        self.adjust_usage(w, before);
        Ok(())
    }

    /// Lowest-indexed `count` wires outside `excluded`.
    pub fn borrow_dirty(&mut self, count: usize, excluded: &[Wire]) -> Result<Vec<Wire>> {
        let picked = self.eligible_dirty(count, excluded);
        if picked.len() < count {
            return Err(Error::InsufficientFreeWires { needed: count, available: picked.len() });
        }
        for &w in &picked {
            self.hold(w, BorrowKind::Dirty);
        }
        Ok(picked)
    }

    /// Number of wires a dirty borrow excluding `excluded` could obtain.
    pub fn available_dirty(&self, excluded: &[Wire]) -> usize {
        (0..self.width()).filter(|&i| !excluded.contains(&Wire(i as u32))).count()
    }

    /// Like [`Builder::available_dirty`] but skipping idle pool wires.
    /// Constructions choosing between a wide and a narrow borrow use this so
    /// the wide form never widens the pool footprint.
    pub fn available_busy(&self, excluded: &[Wire]) -> usize {
        (0..self.width())
            .filter(|&i| {
                let busy = self.roles[i] == WireRole::Operand || !self.holds[i].is_empty();
                busy && !excluded.contains(&Wire(i as u32))
            })
            .count()
    }

    /// Preferred wires first (lowest index), then the rest.
    fn eligible_dirty(&self, count: usize, excluded: &[Wire]) -> Vec<Wire> {
        let all = (0..self.width() as u32).map(Wire).filter(|w| !excluded.contains(w));
        match &self.confine {
            None => all.take(count).collect(),
            Some(mask) => {
                let (inside, outside): (Vec<Wire>, Vec<Wire>) = all.partition(|w| mask[w.index()]);
                inside.into_iter().chain(outside).take(count).collect()
            }
        }
    }

    /// Runs `f` with borrows steered towards `preferred` (intersected with any
    /// enclosing preference). Only placement changes, so independent
    /// constructions confined to disjoint wires can overlap in depth.
    pub fn confined<T>(&mut self, preferred: &[Wire], f: impl FnOnce(&mut Builder) -> Result<T>) -> Result<T> {
        let mut mask = vec![false; self.width()];
        for w in preferred {
            mask[w.index()] = true;
        }
        if let Some(outer) = &self.confine {
            for (m, o) in mask.iter_mut().zip(outer) {
                *m &= *o;
            }
        }
        let saved = self.confine.replace(mask);
        let out = f(self);
        self.confine = saved;
        out
    }

    pub fn release_dirty(&mut self, wires: &[Wire]) -> Result<()> {
        for &w in wires {
            self.unhold(w, BorrowKind::Dirty)?;
        }
        Ok(())
    }

    /// Lowest-indexed idle clean-pool wires.
    pub fn borrow_clean(&mut self, count: usize) -> Result<Vec<Wire>> {
        let free: Vec<Wire> = (0..self.width() as u32)
            .map(Wire)
            .filter(|w| self.roles[w.index()] == WireRole::CleanPool && self.holds[w.index()].is_empty())
            .take(count)
            .collect();
        if free.len() < count {
            return Err(Error::CleanPoolExhausted { needed: count, available: free.len() });
        }
        for &w in &free {
            self.hold(w, BorrowKind::Clean);
        }
        Ok(free)
    }

    pub fn release_clean(&mut self, wires: &[Wire]) -> Result<()> {
        for &w in wires {
            self.unhold(w, BorrowKind::Clean)?;
        }
        Ok(())
    }

    /// Holds idle dirty-pool wires as a register for the whole assembly.
    pub fn borrow_dirty_register(&mut self, count: usize) -> Result<Register> {
        let free: Vec<Wire> = (0..self.width() as u32)
            .map(Wire)
            .filter(|w| self.roles[w.index()] == WireRole::DirtyPool && self.holds[w.index()].is_empty())
            .take(count)
            .collect();
        if free.len() < count {
            return Err(Error::InsufficientFreeWires { needed: count, available: free.len() });
        }
        for &w in &free {
            self.hold(w, BorrowKind::Dirty);
        }
        Ok(Register::from(free))
    }

    /// Emits a gate, reducing more than two controls with borrowed wires.
    pub fn emit(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width())?;
        if gate.controls.len() <= 2 {
            self.push_lowered(gate);
            return Ok(());
        }
        let candidates = self.eligible_dirty(self.width(), &gate.wires().collect::<Vec<_>>());
        let lowered = mcx::lower_mcx_in(&gate, &candidates)?;
        let fresh = mcx::helper_wires(&gate, &lowered)
            .into_iter()
            .filter(|w| self.roles[w.index()] != WireRole::Operand && self.holds[w.index()].is_empty())
            .count();
        self.ledger.dirty_highwater = self.ledger.dirty_highwater.max(self.dirty_in_use + fresh);
        for g in lowered {
            self.push_lowered(g);
        }
        Ok(())
    }

    fn push_lowered(&mut self, gate: Gate) {
        if let Some(block) = self.blocks.last_mut() {
            block.push(gate);
            return;
        }
        match &mut self.sink {
            Sink::Store(gates) => gates.push(gate),
            Sink::Count(counter) => counter.record(&gate),
        }
    }

    pub fn x(&mut self, t: Wire) -> Result<()> {
        self.emit(Gate::x(t))
    }

    pub fn cx(&mut self, c: Wire, t: Wire) -> Result<()> {
        self.emit(Gate::cx(c, t))
    }

    pub fn ccx(&mut self, c1: Wire, c2: Wire, t: Wire) -> Result<()> {
        self.emit(Gate::ccx(c1, c2, t))
    }

    /// X on `t` controlled by every wire of `controls`.
    pub fn mcx(&mut self, controls: &[Wire], t: Wire) -> Result<()> {
        self.emit(Gate::mcx(controls, t))
    }

    /// Runs `f` and emits the reverse of the gate block it produced.
    pub fn inverted<T>(&mut self, f: impl FnOnce(&mut Builder) -> Result<T>) -> Result<T> {
        self.blocks.push(Vec::new());
        let out = f(self);
        let block = self.blocks.pop().expect("block stack underflow");
        let out = out?;
        for g in block.into_iter().rev() {
            self.push_lowered(g);
        }
        Ok(out)
    }

    fn check_closed(&self) -> Result<()> {
        if !self.blocks.is_empty() {
            return Err(Error::LedgerViolation("unterminated inverted block".into()));
        }
        if let Some((w, k)) = self.ledger.active_borrows.first() {
            return Err(Error::LedgerViolation(format!("wire {w} still borrowed as {k:?}")));
        }
        Ok(())
    }

    fn clean_wires(&self) -> Vec<Wire> {
        (0..self.width() as u32).map(Wire).filter(|w| self.roles[w.index()] == WireRole::CleanPool).collect()
    }

    /// Closes the builder into a circuit. Fails if borrows remain open.
    pub fn finish(self) -> Result<Circuit> {
        self.check_closed()?;
        let clean_wires = self.clean_wires();
        let width = self.width();
        match self.sink {
            Sink::Store(gates) => Ok(Circuit { width, gates, ledger: self.ledger, clean_wires }),
            Sink::Count(_) => Err(Error::InvalidParameter("counting builder has no gate list".into())),
        }
    }

    /// Closes a counting builder into its tallies.
    pub fn finish_counts(self) -> Result<(ResourceCounter, AncillaLedger)> {
        self.check_closed()?;
        match self.sink {
            Sink::Count(counter) => Ok((counter, self.ledger)),
            Sink::Store(gates) => {
                let mut counter = ResourceCounter::new(self.roles.len());
                for g in &gates {
                    counter.record(g);
                }
                Ok((counter, self.ledger))
            }
        }
    }
}

/// Collects the wires of several registers and loose wires.
pub fn wires_of(registers: &[&Register], extra: &[Wire]) -> Vec<Wire> {
    let mut out: Vec<Wire> = registers.iter().flat_map(|r| r.wires().iter().copied()).collect();
    out.extend_from_slice(extra);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn borrow_lowest_index() {
        let mut b = Builder::with_width(8);
        let got = b.borrow_dirty(2, &[Wire(0), Wire(1), Wire(2)]).unwrap();
        assert_eq!(got, vec![Wire(3), Wire(4)]);
        b.release_dirty(&got).unwrap();
        b.finish().unwrap();
    }

    #[test]
    fn borrow_exhausted() {
        let mut b = Builder::with_width(3);
        let err = b.borrow_dirty(1, &[Wire(0), Wire(1), Wire(2)]).unwrap_err();
        assert_eq!(err, Error::InsufficientFreeWires { needed: 1, available: 0 });
    }

    #[test]
    fn clean_zero_is_noop() {
        let mut b = Builder::new();
        b.add_clean_pool(2);
        assert!(b.borrow_clean(0).unwrap().is_empty());
        assert_eq!(b.ledger().clean_highwater, 0);
        assert_eq!(b.borrow_clean(3).unwrap_err(), Error::CleanPoolExhausted { needed: 3, available: 2 });
    }

    #[test]
    fn unreleased_borrow_fails_finish() {
        let mut b = Builder::with_width(4);
        b.borrow_dirty(1, &[]).unwrap();
        assert!(matches!(b.finish(), Err(Error::LedgerViolation(_))));
    }

    #[test]
    fn highwater_counts_pool_wires_only() {
        let mut b = Builder::new();
        b.add_operand(2);
        b.add_dirty_pool(3);
        let a = b.borrow_dirty(2, &[]).unwrap();
        assert_eq!(b.ledger().dirty_highwater, 0);
        let d = b.borrow_dirty(2, &a).unwrap();
        assert_eq!(d, vec![Wire(2), Wire(3)]);
        assert_eq!(b.ledger().dirty_highwater, 2);
        b.release_dirty(&d).unwrap();
        b.release_dirty(&a).unwrap();
        let d = b.borrow_dirty(1, &[Wire(0), Wire(1)]).unwrap();
        b.release_dirty(&d).unwrap();
        assert_eq!(b.finish().unwrap().ledger.dirty_highwater, 2);
    }

    #[test]
    fn emit_and_apply() {
        let mut c = Circuit::new(3);
        c.push(Gate::x(Wire(0))).unwrap();
        assert_eq!(c.apply(0b000), 0b001);
        let t = Gate::ccx(Wire(0), Wire(1), Wire(2));
        assert_eq!(t.apply(0b011), 0b111);
        assert_eq!(t.apply(0b001), 0b001);
        assert!(matches!(c.push(Gate::x(Wire(3))), Err(Error::WireOutOfRange { wire: 3, width: 3 })));
        assert!(matches!(c.push(Gate::cx(Wire(1), Wire(1))), Err(Error::MalformedGate(_))));
    }

    #[test]
    fn inverted_reverses() {
        let mut b = Builder::with_width(3);
        b.inverted(|b| {
            b.x(Wire(0))?;
            b.cx(Wire(0), Wire(1))
        })
        .unwrap();
        let c = b.finish().unwrap();
        assert_eq!(c.gates, vec![Gate::cx(Wire(0), Wire(1)), Gate::x(Wire(0))]);
    }

    #[test]
    fn text_round_trip() {
        let mut c = Circuit::new(4);
        c.push(Gate::x(Wire(0))).unwrap();
        c.push(Gate::cx(Wire(0), Wire(3))).unwrap();
        c.push(Gate::ccx(Wire(1), Wire(3), Wire(2))).unwrap();
        c.clean_wires = vec![Wire(2)];
        let back = Circuit::from_text(&c.to_text()).unwrap();
        assert_eq!(back.gates, c.gates);
        assert_eq!(back.width, 4);
        assert_eq!(back.clean_wires, c.clean_wires);
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = Circuit::from_text("# width 2\nX 0\nCX 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = Circuit::from_text("# width 2\nX 5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(Circuit::from_text("FOO 1\n").is_err());
    }

    #[test]
    fn register_helpers() {
        let r = Register::new(vec![Wire(3), Wire(1)]).unwrap();
        assert_eq!(r.value_of(0b1000), 1);
        assert_eq!(r.place(0, 0b10), 0b10);
        assert_eq!(Register::new(vec![Wire(1), Wire(1)]), Err(Error::DuplicateWire(1)));
    }
}
