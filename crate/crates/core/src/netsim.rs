//! Round-synchronous simulator of the client and the computing parties.
//!
//! A [`Sim`] is pure bookkeeping: every value a party holds is stored under a
//! label together with the first round in which it may be read. A message sent
//! in round `r` becomes readable by its receiver in round `r + 1`. Reading a
//! value earlier, or one that was never delivered, is a causality violation.
//!
//! The resulting [`Transcript`] is the ground truth for communication cost
//! ([`cost_of`]) and for the per-party views the audits enumerate
//! ([`view_of`]).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sharing::{Bit, KeySource, PartyPair, Rat};

pub type Round = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PartyId {
    Client,
    #[serde(rename = "KH")]
    Kh,
    #[serde(rename = "EVH")]
    Evh,
    Helper,
    Helper2,
}

impl PartyId {
    pub const ALL: [PartyId; 5] = [
        PartyId::Client,
        PartyId::Kh,
        PartyId::Evh,
        PartyId::Helper,
        PartyId::Helper2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            PartyId::Client => "Client",
            PartyId::Kh => "KH",
            PartyId::Evh => "EVH",
            PartyId::Helper => "Helper",
            PartyId::Helper2 => "Helper2",
        }
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for PartyId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        PartyId::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown party `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    SecretSharing,
    Computation,
    Reveal,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::SecretSharing => "SecretSharing",
            Phase::Computation => "Computation",
            Phase::Reveal => "Reveal",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [Phase::SecretSharing, Phase::Computation, Phase::Reveal]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown phase `{s}`"))
    }
}

/// Anything that can travel in a message.
pub trait Payload: Clone + fmt::Debug {
    /// Number of transmitted bits.
    fn bit_len(&self) -> usize;
    /// Whitespace-free rendering used by the text transcript format.
    fn render(&self) -> String;
}

impl Payload for Bit {
    fn bit_len(&self) -> usize {
        1
    }

    fn render(&self) -> String {
        self.as_u8().to_string()
    }
}

/// Plain bit string, the payload type of parsed transcripts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BitString(pub Vec<bool>);

impl Payload for BitString {
    fn bit_len(&self) -> usize {
        self.0.len()
    }

    fn render(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl FromStr for BitString {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid bit `{other}`")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(BitString)
    }
}

fn push_uint(out: &mut Vec<bool>, v: &BigUint) {
    let bits = v.bits();
    for i in (0..32).rev() {
        out.push((bits >> i) & 1 == 1);
    }
    for i in (0..bits).rev() {
        out.push(v.bit(i));
    }
}

/// Rationals travel as `sign | len(num):32 | num | len(den):32 | den`.
pub fn encode_rat(r: &Rat) -> BitString {
    let mut out = Vec::new();
    out.push(r.numer().sign() == Sign::Minus);
    push_uint(&mut out, r.numer().magnitude());
    push_uint(&mut out, r.denom().magnitude());
    BitString(out)
}

pub fn decode_rat(bits: &BitString) -> Option<Rat> {
    let b = &bits.0;
    let mut pos = 1;
    let read_uint = |pos: &mut usize| -> Option<BigUint> {
        let len_bits = b.get(*pos..*pos + 32)?;
        let len = len_bits.iter().fold(0u64, |acc, &x| (acc << 1) | x as u64) as usize;
        *pos += 32;
        let mag = b.get(*pos..*pos + len)?;
        *pos += len;
        let mut v = BigUint::from(0u8);
        for &x in mag {
            v = (v << 1u8) + BigUint::from(x as u8);
        }
        Some(v)
    };
    let negative = *b.first()?;
    let num = read_uint(&mut pos)?;
    let den = read_uint(&mut pos)?;
    if pos != b.len() || den == BigUint::from(0u8) {
        return None;
    }
    let sign = if negative { Sign::Minus } else { Sign::Plus };
    Some(Rat::new(
        BigInt::from_biguint(sign, num),
        BigInt::from_biguint(Sign::Plus, den),
    ))
}

impl Payload for Rat {
    fn bit_len(&self) -> usize {
        encode_rat(self).bit_len()
    }

    fn render(&self) -> String {
        encode_rat(self).render()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message<V> {
    pub round: Round,
    pub from: PartyId,
    pub to: PartyId,
    pub phase: Phase,
    pub label: String,
    pub payload: V,
}

/// How a value entered a party's view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    Initial,
    Drawn,
    Received,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewEntry<V> {
    pub label: String,
    pub origin: Origin,
    pub value: V,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript<V> {
    pub messages: Vec<Message<V>>,
    /// Everything each party stores at the end, in insertion order.
    pub final_holdings: BTreeMap<PartyId, Vec<(String, V)>>,
    /// Initial holdings, tape draws and received messages, in order.
    pub views: BTreeMap<PartyId, Vec<ViewEntry<V>>>,
}

impl<V> Default for Transcript<V> {
    fn default() -> Self {
        Transcript {
            messages: Vec::new(),
            final_holdings: BTreeMap::new(),
            views: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCost {
    pub gate: String,
    pub bits: u64,
    pub rounds: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub computation_bits: u64,
    pub sharing_bits: u64,
    pub reveal_bits: u64,
    pub rounds: u32,
    pub per_gate: Vec<GateCost>,
}

fn round_span(rounds: impl Iterator<Item = Round>) -> u32 {
    let (mut lo, mut hi) = (Round::MAX, 0);
    let mut any = false;
    for r in rounds {
        any = true;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    if any {
        hi - lo + 1
    } else {
        0
    }
}

/// Gate attribution: everything before the first `/` of a label.
pub fn label_scope(label: &str) -> &str {
    label.split_once('/').map_or("-", |(scope, _)| scope)
}

pub fn cost_of<V: Payload>(t: &Transcript<V>) -> CostReport {
    let mut report = CostReport::default();
    let mut per_gate: Vec<(String, u64, Vec<Round>)> = Vec::new();
    for m in &t.messages {
        let bits = m.payload.bit_len() as u64;
        match m.phase {
            Phase::SecretSharing => report.sharing_bits += bits,
            Phase::Reveal => report.reveal_bits += bits,
            Phase::Computation => {
                report.computation_bits += bits;
                let scope = label_scope(&m.label);
                match per_gate.iter_mut().find(|(g, _, _)| g == scope) {
                    Some((_, b, rounds)) => {
                        *b += bits;
                        rounds.push(m.round);
                    }
                    None => per_gate.push((scope.to_string(), bits, vec![m.round])),
                }
            }
        }
    }
    report.rounds = round_span(
        t.messages
            .iter()
            .filter(|m| m.phase == Phase::Computation)
            .map(|m| m.round),
    );
    report.per_gate = per_gate
        .into_iter()
        .map(|(gate, bits, rounds)| GateCost {
            gate,
            bits,
            rounds: round_span(rounds.into_iter()),
        })
        .collect();
    report
}

/// The complete semi-honest view of `p`: initial holdings, tape draws and
/// received messages, in the order they happened.
pub fn view_of<V: Clone>(t: &Transcript<V>, p: PartyId) -> Vec<ViewEntry<V>> {
    t.views.get(&p).cloned().unwrap_or_default()
}

/// Writes the messages as `round from to phase label bits` lines.
pub fn write_transcript<V: Payload, W: Write>(t: &Transcript<V>, mut w: W) -> io::Result<()> {
    for m in &t.messages {
        writeln!(
            w,
            "{} {} {} {} {} {}",
            m.round,
            m.from,
            m.to,
            m.phase,
            m.label,
            m.payload.render()
        )?;
    }
    Ok(())
}

pub fn transcript_to_string<V: Payload>(t: &Transcript<V>) -> String {
    let mut out = Vec::new();
    write_transcript(t, &mut out).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("transcript text is ASCII")
}

/// Parses the text format. Blank lines and `#` comments are skipped.
pub fn parse_transcript(text: &str) -> Result<Transcript<BitString>> {
    let mut t = Transcript::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::TranscriptFormat {
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [round, from, to, phase, label, bits] = fields[..] else {
            return Err(err(format!("expected 6 fields, found {}", fields.len())));
        };
        let payload: BitString = bits.parse().map_err(err)?;
        if payload.0.is_empty() {
            return Err(err("empty payload".into()));
        }
        t.messages.push(Message {
            round: round
                .parse()
                .map_err(|e: std::num::ParseIntError| err(e.to_string()))?,
            from: from.parse().map_err(err)?,
            to: to.parse().map_err(err)?,
            phase: phase.parse().map_err(err)?,
            label: label.to_string(),
            payload,
        });
    }
    Ok(t)
}

#[derive(Debug, Clone)]
struct Held<V> {
    value: V,
    ready: Round,
}

/// Per-party stores, message log and view log of one protocol execution.
#[derive(Debug, Clone)]
pub struct Sim<V> {
    store: [HashMap<String, Held<V>>; PartyId::ALL.len()],
    order: Vec<(PartyId, String)>,
    messages: Vec<Message<V>>,
    views: BTreeMap<PartyId, Vec<ViewEntry<V>>>,
}

impl<V> Default for Sim<V> {
    fn default() -> Self {
        Sim {
            store: Default::default(),
            order: Vec::new(),
            messages: Vec::new(),
            views: BTreeMap::new(),
        }
    }
}

impl<V: Payload> Sim<V> {
    pub fn new() -> Self {
        Self::default()
    }

    fn insert(&mut self, party: PartyId, label: &str, value: V, ready: Round) -> Result<()> {
        let slot = &mut self.store[party.index()];
        if slot.contains_key(label) {
            return Err(Error::DuplicateLabel {
                party,
                label: label.to_string(),
            });
        }
        slot.insert(label.to_string(), Held { value, ready });
        self.order.push((party, label.to_string()));
        Ok(())
    }

    fn observe(&mut self, party: PartyId, label: &str, origin: Origin, value: V) {
        self.views.entry(party).or_default().push(ViewEntry {
            label: label.to_string(),
            origin,
            value,
        });
    }

    /// A value `party` holds before the protocol starts.
    pub fn hold_initial(&mut self, party: PartyId, label: &str, value: V) -> Result<()> {
        self.insert(party, label, value.clone(), 0)?;
        self.observe(party, label, Origin::Initial, value);
        Ok(())
    }

    /// Records a pre-shared tape draw at both ends of `pair`.
    pub fn record_draw(&mut self, pair: PartyPair, label: &str, value: V) -> Result<()> {
        let (a, b) = pair.parties();
        self.insert(a, label, value.clone(), 0)?;
        self.observe(a, label, Origin::Drawn, value.clone());
        if !pair.is_private() {
            self.insert(b, label, value.clone(), 0)?;
            self.observe(b, label, Origin::Drawn, value);
        }
        Ok(())
    }

    /// Stores a locally computed value, readable from round `ready`.
    pub fn put(&mut self, party: PartyId, label: &str, value: V, ready: Round) -> Result<()> {
        self.insert(party, label, value, ready)
    }

    pub fn holds(&self, party: PartyId, label: &str) -> bool {
        self.store[party.index()].contains_key(label)
    }

    /// First round in which `party` may read `label`.
    pub fn ready(&self, party: PartyId, label: &str) -> Result<Round> {
        self.store[party.index()]
            .get(label)
            .map(|h| h.ready)
            .ok_or_else(|| Error::Causality {
                party,
                label: label.to_string(),
                round: Round::MAX,
            })
    }

    /// Latest readiness over several held values.
    pub fn ready_all(&self, items: &[(PartyId, &str)]) -> Result<Round> {
        items
            .iter()
            .try_fold(0, |acc, &(p, l)| Ok(acc.max(self.ready(p, l)?)))
    }

    /// Reads a value in `round`; fails if it is not there yet.
    pub fn get(&self, party: PartyId, label: &str, round: Round) -> Result<V> {
        match self.store[party.index()].get(label) {
            Some(h) if h.ready <= round => Ok(h.value.clone()),
            _ => Err(Error::Causality {
                party,
                label: label.to_string(),
                round,
            }),
        }
    }

    /// `from` sends the value it holds under `src` in `round`; `to` stores it
    /// under `dst`, readable from `round + 1`.
    pub fn forward(
        &mut self,
        round: Round,
        phase: Phase,
        from: PartyId,
        src: &str,
        to: PartyId,
        dst: &str,
    ) -> Result<()> {
        let misrouted = match phase {
            Phase::SecretSharing => from != PartyId::Client,
            Phase::Reveal => to != PartyId::Client,
            Phase::Computation => from == PartyId::Client || to == PartyId::Client,
        };
        if misrouted {
            return Err(Error::PhaseViolation { phase, from, to });
        }
        let value = self.get(from, src, round)?;
        self.insert(to, dst, value.clone(), round + 1)?;
        self.observe(to, dst, Origin::Received, value.clone());
        self.messages.push(Message {
            round,
            from,
            to,
            phase,
            label: dst.to_string(),
            payload: value,
        });
        Ok(())
    }

    /// [`Sim::forward`] keeping the label.
    pub fn send(
        &mut self,
        round: Round,
        phase: Phase,
        from: PartyId,
        to: PartyId,
        label: &str,
    ) -> Result<()> {
        self.forward(round, phase, from, label, to, label)
    }

    pub fn messages(&self) -> &[Message<V>] {
        &self.messages
    }

    pub fn finish(self) -> Transcript<V> {
        let Sim {
            mut store,
            order,
            messages,
            views,
        } = self;
        let mut final_holdings: BTreeMap<PartyId, Vec<(String, V)>> = BTreeMap::new();
        for key in order {
            if let Some(h) = store[key.0.index()].remove(&key.1) {
                final_holdings
                    .entry(key.0)
                    .or_default()
                    .push((key.1, h.value));
            }
        }
        Transcript {
            messages,
            final_holdings,
            views,
        }
    }
}

/// A simulator together with the key source feeding its tape draws.
pub struct Session<'k, V> {
    pub sim: Sim<V>,
    keys: &'k mut dyn KeySource<V>,
}

impl<'k, V: Payload> Session<'k, V> {
    pub fn new(keys: &'k mut dyn KeySource<V>) -> Self {
        Session {
            sim: Sim::new(),
            keys,
        }
    }

    /// Draws a pre-shared key; both ends of `pair` hold it from round 0.
    pub fn draw(&mut self, pair: PartyPair, label: &str) -> Result<V> {
        let v = self.keys.draw(pair, label);
        self.sim.record_draw(pair, label, v.clone())?;
        Ok(v)
    }

    pub fn finish(self) -> Transcript<V> {
        self.sim.finish()
    }
}

/// Runs `protocol` against `keys` and returns its outputs with the transcript.
pub fn run_protocol<V, F>(
    keys: &mut dyn KeySource<V>,
    protocol: F,
) -> Result<(Vec<V>, Transcript<V>)>
where
    V: Payload,
    F: FnOnce(&mut Session<'_, V>) -> Result<Vec<V>>,
{
    let mut session = Session::new(keys);
    let outputs = protocol(&mut session)?;
    Ok((outputs, session.finish()))
}
