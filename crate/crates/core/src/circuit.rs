//! Boolean circuits: netlist parsing, reuse-aware planning and evaluation
//! with the gate protocols.
//!
//! Netlist format, one statement per line, `#` starts a comment:
//!
//! ```text
//! in a b c
//! g1 AND a b
//! g2 XOR g1 c
//! g3 ANDN a b c
//! out g2 g3
//! ```
//!
//! The planner walks the gates in order and tracks what each variable has
//! already shared with the helper, choosing the cheapest AND variant.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{Engine, Mutation, ShareHandle, DEFAULT_W_MAX};
use crate::netsim::{cost_of, CostReport, Transcript};
use crate::sharing::{Bit, BitValue, KeySource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Xor,
    Not,
    And,
    AndN,
}

impl GateKind {
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::Xor => "XOR",
            GateKind::Not => "NOT",
            GateKind::And => "AND",
            GateKind::AndN => "ANDN",
        }
    }

    fn parse(s: &str) -> Option<GateKind> {
        match s.to_ascii_uppercase().as_str() {
            "XOR" => Some(GateKind::Xor),
            "NOT" => Some(GateKind::Not),
            "AND" => Some(GateKind::And),
            "ANDN" => Some(GateKind::AndN),
            _ => None,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub id: String,
    pub kind: GateKind,
    pub operands: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub inputs: Vec<String>,
    pub gates: Vec<Gate>,
    pub outputs: Vec<String>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s, "in" | "out")
}

/// Parses and validates a netlist.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    // first pass: where is every name defined
    let mut defined_at: HashMap<String, usize> = HashMap::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            lines.push((i + 1, line));
        }
    }
    let err = |line: usize, message: String| Error::Parse { line, message };
    for &(n, line) in &lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let names: Vec<&str> = match fields[0] {
            "in" => fields[1..].to_vec(),
            "out" => continue,
            id => vec![id],
        };
        for name in names {
            if !valid_name(name) {
                return Err(err(n, format!("invalid name `{name}`")));
            }
            if let Some(prev) = defined_at.insert(name.to_string(), n) {
                return Err(err(
                    n,
                    format!("duplicate id `{name}` (first defined on line {prev})"),
                ));
            }
        }
    }

    let mut c = Circuit::default();
    let check_ref = |n: usize, r: &str| -> Result<()> {
        match defined_at.get(r) {
            Some(&at) if at < n => Ok(()),
            Some(&at) if at == n => Err(err(n, format!("`{r}` refers to itself"))),
            Some(&at) => Err(err(
                n,
                format!("forward reference to `{r}` (defined on line {at})"),
            )),
            None => Err(err(n, format!("unknown name `{r}`"))),
        }
    };
    for &(n, line) in &lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "in" => {
                if fields.len() < 2 {
                    return Err(err(n, "`in` needs at least one name".into()));
                }
                c.inputs.extend(fields[1..].iter().map(|s| s.to_string()));
            }
            "out" => {
                if fields.len() < 2 {
                    return Err(err(n, "`out` needs at least one reference".into()));
                }
                for r in &fields[1..] {
                    check_ref(n, r)?;
                    c.outputs.push(r.to_string());
                }
            }
            id => {
                let Some(kind) = fields.get(1).and_then(|k| GateKind::parse(k)) else {
                    return Err(err(
                        n,
                        format!("expected a gate kind after `{id}` (XOR, NOT, AND, ANDN)"),
                    ));
                };
                let ops = &fields[2..];
                let ok = match kind {
                    GateKind::Not => ops.len() == 1,
                    GateKind::Xor | GateKind::And => ops.len() == 2,
                    GateKind::AndN => ops.len() >= 2,
                };
                if !ok {
                    let want = match kind {
                        GateKind::Not => "1 operand",
                        GateKind::AndN => "at least 2 operands",
                        _ => "2 operands",
                    };
                    return Err(err(
                        n,
                        format!("arity mismatch: {kind} takes {want}, got {}", ops.len()),
                    ));
                }
                for r in ops {
                    check_ref(n, r)?;
                }
                c.gates.push(Gate {
                    id: id.to_string(),
                    kind,
                    operands: ops.iter().map(|s| s.to_string()).collect(),
                });
            }
        }
    }
    Ok(c)
}

impl Circuit {
    /// Renders the circuit in netlist format.
    pub fn to_netlist(&self) -> String {
        let mut out = format!("in {}\n", self.inputs.join(" "));
        for g in &self.gates {
            out.push_str(&format!("{} {} {}\n", g.id, g.kind, g.operands.join(" ")));
        }
        if !self.outputs.is_empty() {
            out.push_str(&format!("out {}\n", self.outputs.join(" ")));
        }
        out
    }

    pub fn and_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| g.kind == GateKind::And)
            .count()
    }

    /// True if the circuit consists of two-input ANDs over inputs only and
    /// covers every unordered pair of inputs exactly once.
    pub fn is_all_pairs(&self) -> bool {
        let v = self.inputs.len();
        if v < 2 || self.gates.len() != v * (v - 1) / 2 {
            return false;
        }
        let inputs: BTreeSet<&str> = self.inputs.iter().map(String::as_str).collect();
        let mut seen = BTreeSet::new();
        self.gates.iter().all(|g| {
            g.kind == GateKind::And
                && g.operands.iter().all(|o| inputs.contains(o.as_str()))
                && g.operands[0] != g.operands[1]
                && seen.insert(BTreeSet::from([
                    g.operands[0].clone(),
                    g.operands[1].clone(),
                ]))
        })
    }

    /// Parses `name=0|1` assignments into input order.
    pub fn assignment(&self, pairs: &[String]) -> Result<Vec<bool>> {
        let mut given: HashMap<&str, bool> = HashMap::new();
        for p in pairs {
            let (name, bit) = p
                .split_once('=')
                .ok_or_else(|| Error::MissingInput(format!("malformed assignment `{p}`")))?;
            let bit = match bit {
                "0" => false,
                "1" => true,
                _ => return Err(Error::MissingInput(format!("`{p}` is not 0 or 1"))),
            };
            given.insert(name, bit);
        }
        self.inputs
            .iter()
            .map(|i| {
                given
                    .get(i.as_str())
                    .copied()
                    .ok_or_else(|| Error::MissingInput(i.clone()))
            })
            .collect()
    }
}

/// All `v(v-1)/2` pairwise ANDs of `x0..x{v-1}`. Pair `{i, i+d mod v}` is
/// oriented with `x_i` on the left, so every variable appears on both
/// sides once `v >= 3`.
pub fn all_pairs(v: usize) -> Circuit {
    let inputs: Vec<String> = (0..v).map(|i| format!("x{i}")).collect();
    let mut gates = Vec::new();
    for d in 1..=v / 2 {
        for i in 0..v {
            if v.is_multiple_of(2) && d == v / 2 && i >= v / 2 {
                continue;
            }
            let j = (i + d) % v;
            gates.push(Gate {
                id: format!("p{i}_{j}"),
                kind: GateKind::And,
                operands: vec![inputs[i].clone(), inputs[j].clone()],
            });
        }
    }
    let outputs = gates.iter().map(|g| g.id.clone()).collect();
    Circuit {
        inputs,
        gates,
        outputs,
    }
}

/// `4v + t`: bits needed for `t` pairwise ANDs over `v` variables.
pub fn cost_bound(v: u64, t: u64) -> Result<u64> {
    if v < 1 || t < v || t > v * v.saturating_sub(1) / 2 {
        return Err(Error::CostBoundRange { v, t });
    }
    Ok(4 * v + t)
}

/// `v(v-1)/2 + 4v`, the comparison-table formula for all pairs.
pub fn all_pairs_formula(v: u64) -> u64 {
    v * v.saturating_sub(1) / 2 + 4 * v
}

/// Direct evaluation on plaintext bits.
pub fn eval_plain(c: &Circuit, inputs: &[bool]) -> Result<Vec<bool>> {
    if inputs.len() != c.inputs.len() {
        return Err(Error::MissingInput(format!(
            "expected {} inputs, got {}",
            c.inputs.len(),
            inputs.len()
        )));
    }
    let mut wire: HashMap<&str, bool> = c
        .inputs
        .iter()
        .map(String::as_str)
        .zip(inputs.iter().copied())
        .collect();
    for g in &c.gates {
        let ops: Vec<bool> = g.operands.iter().map(|o| wire[o.as_str()]).collect();
        let v = match g.kind {
            GateKind::Xor => ops[0] ^ ops[1],
            GateKind::Not => !ops[0],
            GateKind::And | GateKind::AndN => ops.iter().all(|&b| b),
        };
        wire.insert(&g.id, v);
    }
    Ok(c.outputs.iter().map(|o| wire[o.as_str()]).collect())
}

/// Three-party AND variant chosen for a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AndChoice {
    /// Neither operand at the helper yet: 5 bits.
    Fresh,
    /// Left operand already resident: 3 bits.
    ReuseLeft,
    /// Right operand already resident: 3 bits.
    ReuseRight,
    /// Both resident: 1 bit.
    ReuseBoth,
    /// Left resident, right re-keyed in place: 2 bits.
    ReuseReencrypt,
}

impl AndChoice {
    pub fn name(self) -> &'static str {
        match self {
            AndChoice::Fresh => "fresh",
            AndChoice::ReuseLeft => "reuse_left",
            AndChoice::ReuseRight => "reuse_right",
            AndChoice::ReuseBoth => "reuse_both",
            AndChoice::ReuseReencrypt => "reuse_reencrypt",
        }
    }

    pub fn bits(self) -> u64 {
        match self {
            AndChoice::Fresh => 5,
            AndChoice::ReuseLeft | AndChoice::ReuseRight => 3,
            AndChoice::ReuseBoth => 1,
            AndChoice::ReuseReencrypt => 2,
        }
    }
}

/// One fan-in AND node of a (possibly decomposed) ANDN gate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaninNode {
    /// Operand wires; entries starting with `#` name earlier nodes.
    pub operands: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    /// XOR or NOT, evaluated locally.
    Local,
    /// Output is the same share as the named wire (`a AND a`, `ANDN a a`).
    Copy(String),
    And {
        left: String,
        right: String,
        choice: AndChoice,
        /// The right operand first gets a second encryption (1 bit).
        reencrypt_right: bool,
    },
    /// Fan-in nodes in evaluation order; the last is the gate output.
    AndN(Vec<FaninNode>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GatePlan {
    pub gate: String,
    pub step: Step,
    pub predicted_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub gates: Vec<GatePlan>,
    /// Inputs that the client also shares in a second slot.
    pub second_slots: Vec<String>,
    pub w_max: usize,
}

impl Schedule {
    pub fn predicted_bits(&self) -> u64 {
        self.gates.iter().map(|g| g.predicted_bits).sum()
    }
}

#[derive(Default, Clone)]
struct Residency {
    left: bool,
    right: bool,
    second: bool,
}

/// Greedy plan with default fan-in cap.
pub fn plan(c: &Circuit) -> Schedule {
    plan_with(c, DEFAULT_W_MAX)
}

/// Greedy plan: a variable's first left use shares its first slot with the
/// helper, its first right use its second slot; later uses reuse them.
/// Derived wires get their second slot by re-encryption on first right use.
pub fn plan_with(c: &Circuit, w_max: usize) -> Schedule {
    let w_max = w_max.max(2);
    let inputs: BTreeSet<&str> = c.inputs.iter().map(String::as_str).collect();
    let mut alias: HashMap<String, String> = HashMap::new();
    let canon = |alias: &HashMap<String, String>, w: &str| -> String {
        alias.get(w).cloned().unwrap_or_else(|| w.to_string())
    };
    let mut state: HashMap<String, Residency> = HashMap::new();
    let mut second_slots = Vec::new();
    let mut gates = Vec::new();
    for g in &c.gates {
        let ops: Vec<String> = g.operands.iter().map(|o| canon(&alias, o)).collect();
        let (step, bits) = match g.kind {
            GateKind::Xor | GateKind::Not => (Step::Local, 0),
            GateKind::And if ops[0] == ops[1] => {
                alias.insert(g.id.clone(), ops[0].clone());
                (Step::Copy(ops[0].clone()), 0)
            }
            GateKind::And => {
                let (l, r) = (&ops[0], &ops[1]);
                let left_resident = state.get(l).is_some_and(|s| s.left);
                let rs = state.get(r).cloned().unwrap_or_default();
                let mut reencrypt_right = false;
                if !rs.second {
                    if inputs.contains(r.as_str()) {
                        second_slots.push(r.clone());
                    } else {
                        reencrypt_right = true;
                    }
                }
                let choice = match (left_resident, rs.right) {
                    (false, false) => AndChoice::Fresh,
                    (true, false) => AndChoice::ReuseLeft,
                    (false, true) => AndChoice::ReuseRight,
                    (true, true) => AndChoice::ReuseBoth,
                };
                state.entry(l.clone()).or_default().left = true;
                let e = state.entry(r.clone()).or_default();
                e.right = true;
                e.second = true;
                let bits = choice.bits() + reencrypt_right as u64;
                (
                    Step::And {
                        left: l.clone(),
                        right: r.clone(),
                        choice,
                        reencrypt_right,
                    },
                    bits,
                )
            }
            GateKind::AndN => {
                let mut uniq: Vec<String> = Vec::new();
                for o in ops {
                    if !uniq.contains(&o) {
                        uniq.push(o);
                    }
                }
                if uniq.len() == 1 {
                    alias.insert(g.id.clone(), uniq[0].clone());
                    (Step::Copy(uniq[0].clone()), 0)
                } else {
                    let nodes = fanin_tree(uniq, w_max);
                    let bits = nodes.iter().map(|n| 6 * (1u64 << n.operands.len())).sum();
                    (Step::AndN(nodes), bits)
                }
            }
        };
        gates.push(GatePlan {
            gate: g.id.clone(),
            step,
            predicted_bits: bits,
        });
    }
    Schedule {
        gates,
        second_slots,
        w_max,
    }
}

/// Balanced decomposition into nodes of fan-in at most `w_max`.
fn fanin_tree(mut level: Vec<String>, w_max: usize) -> Vec<FaninNode> {
    let mut nodes = Vec::new();
    loop {
        let groups = level.len().div_ceil(w_max);
        let base = level.len() / groups;
        let extra = level.len() % groups;
        let mut next = Vec::new();
        let mut it = level.into_iter();
        for gi in 0..groups {
            let size = base + usize::from(gi < extra);
            let group: Vec<String> = it.by_ref().take(size).collect();
            if group.len() == 1 {
                next.push(group[0].clone());
            } else {
                nodes.push(FaninNode { operands: group });
                next.push(format!("#{}", nodes.len() - 1));
            }
        }
        if next.len() == 1 {
            return nodes;
        }
        level = next;
    }
}

/// Evaluates `c` under schedule `s`, generically over the bit algebra.
/// `secrets` are in input order. Returns the revealed outputs and the
/// transcript.
pub fn execute<V: BitValue>(
    c: &Circuit,
    s: &Schedule,
    secrets: &[V],
    keys: &mut dyn KeySource<V>,
    mutation: Option<Mutation>,
) -> Result<(Vec<V>, Transcript<V>)> {
    if secrets.len() != c.inputs.len() {
        return Err(Error::MissingInput(format!(
            "expected {} inputs, got {}",
            c.inputs.len(),
            secrets.len()
        )));
    }
    let mut e = Engine::new(keys)
        .with_w_max(s.w_max)
        .with_mutation(mutation);
    let mut first: HashMap<String, ShareHandle> = HashMap::new();
    let mut second: HashMap<String, ShareHandle> = HashMap::new();
    for (name, v) in c.inputs.iter().zip(secrets) {
        first.insert(name.clone(), e.share_input(name, v.clone())?);
    }
    for name in &s.second_slots {
        second.insert(name.clone(), e.share_input_second(name)?);
    }
    for (g, p) in c.gates.iter().zip(&s.gates) {
        e.set_scope(Some(&g.id));
        let out = match (&p.step, g.kind) {
            (Step::Local, GateKind::Xor) => {
                e.xor_gate(&first[&g.operands[0]], &first[&g.operands[1]])?
            }
            (Step::Local, _) => e.not_gate(&first[&g.operands[0]])?,
            (Step::Copy(w), _) => {
                if let Some(h) = second.get(w).cloned() {
                    second.insert(g.id.clone(), h);
                }
                first[w].clone()
            }
            (
                Step::And {
                    left,
                    right,
                    choice,
                    reencrypt_right,
                },
                _,
            ) => {
                if *reencrypt_right {
                    let h = e.reencrypt(&first[right])?;
                    second.insert(right.clone(), h);
                }
                let (x, y) = (&first[left], &second[right]);
                match choice {
                    AndChoice::Fresh | AndChoice::ReuseRight => e.and3(x, y)?,
                    AndChoice::ReuseLeft => e.and3_reuse_left(x, y)?,
                    AndChoice::ReuseBoth => e.and3_reuse_both(x, y)?,
                    AndChoice::ReuseReencrypt => e.and3_reuse_reencrypt(x, y)?,
                }
            }
            (Step::AndN(nodes), _) => {
                let mut done: Vec<ShareHandle> = Vec::new();
                for n in nodes {
                    let xs: Vec<ShareHandle> = n
                        .operands
                        .iter()
                        .map(|o| match o.strip_prefix('#') {
                            Some(i) => done[i.parse::<usize>().expect("node index")].clone(),
                            None => first[o].clone(),
                        })
                        .collect();
                    done.push(e.fanin_and(&xs)?);
                }
                done.pop().expect("at least one node")
            }
        };
        first.insert(g.id.clone(), out);
    }
    e.set_scope(Some("out"));
    let outputs = c
        .outputs
        .iter()
        .map(|o| e.reveal(&first[o]))
        .collect::<Result<Vec<_>>>()?;
    Ok((outputs, e.finish()))
}

/// Outcome of a concrete evaluation.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub outputs: Vec<bool>,
    pub cost: CostReport,
    pub transcript: Transcript<Bit>,
}

/// Evaluates on concrete bits drawn from `keys`.
pub fn evaluate(
    c: &Circuit,
    s: &Schedule,
    inputs: &[bool],
    keys: &mut dyn KeySource<Bit>,
) -> Result<Evaluation> {
    let secrets: Vec<Bit> = inputs.iter().map(|&b| Bit(b)).collect();
    let (out, transcript) = execute(c, s, &secrets, keys, None)?;
    Ok(Evaluation {
        outputs: out.into_iter().map(Bit::as_bool).collect(),
        cost: cost_of(&transcript),
        transcript,
    })
}

/// Per-gate predicted and measured bits, keyed by gate id.
pub fn per_gate_bits(s: &Schedule, cost: &CostReport) -> BTreeMap<String, (u64, u64)> {
    let measured: HashMap<&str, u64> = cost
        .per_gate
        .iter()
        .map(|g| (g.gate.as_str(), g.bits))
        .collect();
    s.gates
        .iter()
        .map(|g| {
            (
                g.gate.clone(),
                (
                    g.predicted_bits,
                    measured.get(g.gate.as_str()).copied().unwrap_or(0),
                ),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sharing::TapeSet;

    #[test]
    fn parse_single_and() {
        let c = parse_circuit("in a b\ng1 AND a b\nout g1").unwrap();
        assert_eq!(c.inputs, ["a", "b"]);
        assert_eq!(c.gates.len(), 1);
        assert_eq!(c.outputs, ["g1"]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let cases = [
            (
                "in a b\ng1 AND a g2\ng2 NOT a\nout g1",
                2,
                "forward reference",
            ),
            ("in a\ng1 AND a zz\n", 2, "unknown name"),
            ("in a b\ng1 AND a\n", 2, "arity mismatch"),
            ("in a b\n\n# c\ng1 NOT a\ng1 NOT b\n", 5, "duplicate id"),
            ("in a\ng1 NAND a a\n", 2, "expected a gate kind"),
            ("in a\ng1 NOT g1\n", 2, "refers to itself"),
            ("in a\nout b\n", 2, "unknown name"),
        ];
        for (text, line, needle) in cases {
            match parse_circuit(text) {
                Err(Error::Parse { line: l, message }) => {
                    assert_eq!(l, line, "{text:?}: {message}");
                    assert!(message.contains(needle), "{text:?}: {message}");
                }
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn netlist_round_trip() {
        let c = all_pairs(5);
        assert_eq!(parse_circuit(&c.to_netlist()).unwrap(), c);
        assert!(c.is_all_pairs());
    }

    #[test]
    fn all_pairs_counts() {
        for v in 2..12 {
            let c = all_pairs(v);
            assert_eq!(c.and_count(), v * (v - 1) / 2);
            assert!(c.is_all_pairs());
        }
        assert_eq!(all_pairs(4).gates.len(), 6);
    }

    #[test]
    fn cost_bound_examples() {
        assert_eq!(cost_bound(4, 6).unwrap(), 22);
        assert_eq!(cost_bound(10, 45).unwrap(), 85);
        assert_eq!(cost_bound(10, 45).unwrap(), all_pairs_formula(10));
        assert!(cost_bound(4, 7).is_err());
        assert!(cost_bound(4, 3).is_err());
        assert!(cost_bound(0, 0).is_err());
    }

    #[test]
    fn planner_examples() {
        let c = parse_circuit("in a b c\ng1 AND a b\ng2 AND a c\nout g1 g2").unwrap();
        let s = plan(&c);
        assert_eq!(s.gates[0].predicted_bits, 5);
        assert!(matches!(
            s.gates[1].step,
            Step::And {
                choice: AndChoice::ReuseLeft,
                ..
            }
        ));
        assert_eq!(s.gates[1].predicted_bits, 3);

        let c = parse_circuit("in a\ng1 AND a a\nout g1").unwrap();
        assert_eq!(plan(&c).gates[0].step, Step::Copy("a".into()));
    }

    #[test]
    fn fanin_tree_is_balanced() {
        let ops: Vec<String> = (0..7).map(|i| format!("x{i}")).collect();
        let nodes = fanin_tree(ops, 3);
        let sizes: Vec<usize> = nodes.iter().map(|n| n.operands.len()).collect();
        assert_eq!(sizes, [3, 2, 2, 3]);
        assert!(nodes.iter().all(|n| n.operands.len() <= 3));
    }

    #[test]
    fn evaluation_matches_prediction() {
        let c = parse_circuit(
            "in a b c\ng1 AND a b\ng2 AND b c\ng3 AND c a\ng4 AND g1 g2\ng5 ANDN a b c\ng6 XOR g4 g5\nout g3 g6",
        )
        .unwrap();
        let s = plan(&c);
        for m in 0..8u8 {
            let inputs: Vec<bool> = (0..3).map(|i| m >> i & 1 == 1).collect();
            let mut tapes = TapeSet::from_u64(m as u64);
            let ev = evaluate(&c, &s, &inputs, &mut tapes).unwrap();
            assert_eq!(ev.outputs, eval_plain(&c, &inputs).unwrap());
            assert_eq!(ev.cost.computation_bits, s.predicted_bits());
            for (gate, (predicted, measured)) in per_gate_bits(&s, &ev.cost) {
                assert_eq!(predicted, measured, "gate {gate}");
            }
        }
    }
}
