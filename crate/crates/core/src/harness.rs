//! Exhaustive correctness and secrecy audits.
//!
//! A protocol is audited purely through its [`Transcript`]s: the harness
//! runs it for every secret assignment and inspects what each party saw.
//! Two exact routes are available:
//!
//! * **Brute force** enumerates every assignment of the `r` tape bits
//!   (`r <= 24`) and compares the resulting view multisets.
//! * **Symbolic** runs the protocol once over [`Anf`] polynomials, with one
//!   variable per secret and per tape bit. A view component of the form
//!   `r ^ g` where the tape bit `r` occurs nowhere else in the view is
//!   uniform and independent of everything else, so it is set aside; the
//!   remaining components are enumerated over their (small) support.
//!
//! Both routes decide exact multiset equality; for `r <= 24` they are
//! cross-checked against each other in the tests.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anf::{Anf, VarSet, MAX_VARS};
use crate::circuit::{eval_plain, execute, Circuit, Schedule};
use crate::error::{Error, Result};
use crate::gates::{self, Engine, Mutation, DEFAULT_W_MAX};
use crate::netsim::{cost_of, view_of, CostReport, PartyId, Transcript};
use crate::sharing::{Bit, BitValue, KeySource, PartyPair, TapeSet};

/// Largest number of tape bits either route enumerates.
pub const ENUMERATION_BUDGET: usize = 24;

/// Largest `2^(secrets + tape bits)` the automatic route brute-forces.
pub const AUTO_BRUTE_FORCE_BRANCHES: u128 = 1 << 18;

/// Outputs and transcript of one run.
#[derive(Debug, Clone)]
pub struct Execution<B> {
    pub outputs: Vec<B>,
    pub transcript: Transcript<B>,
}

/// Anything the harness can audit.
pub trait Protocol: Sync {
    fn name(&self) -> String;
    /// Number of secret input bits.
    fn arity(&self) -> usize;
    /// Parties whose views must not depend on the secrets.
    fn parties(&self) -> Vec<PartyId>;
    /// Plaintext function the outputs must equal.
    fn expected(&self, secrets: &[bool]) -> Vec<bool>;
    fn execute<B: BitValue>(
        &self,
        secrets: &[B],
        keys: &mut dyn KeySource<B>,
    ) -> Result<Execution<B>>;
}

// ---- key sources ---------------------------------------------------------

/// Replays the bits of an integer, least significant first, counting draws.
#[derive(Debug, Clone, Default)]
pub struct EnumeratedKeys {
    pub assignment: u64,
    pub drawn: usize,
}

impl EnumeratedKeys {
    pub fn new(assignment: u64) -> Self {
        EnumeratedKeys {
            assignment,
            drawn: 0,
        }
    }
}

impl KeySource<Bit> for EnumeratedKeys {
    fn draw(&mut self, _pair: PartyPair, _label: &str) -> Bit {
        let bit = self.drawn < 64 && self.assignment >> self.drawn & 1 == 1;
        self.drawn += 1;
        Bit(bit)
    }
}

/// Hands out a fresh polynomial variable per draw.
#[derive(Debug, Clone)]
pub struct SymbolicKeys {
    first: usize,
    next: usize,
    /// Draw labels, indexed by `variable - first`.
    pub labels: Vec<String>,
}

impl SymbolicKeys {
    /// Tape variables start at `first` (after the secret variables).
    pub fn new(first: usize) -> Self {
        SymbolicKeys {
            first,
            next: first,
            labels: Vec::new(),
        }
    }

    pub fn drawn(&self) -> usize {
        self.next - self.first
    }

    fn check(&self) -> Result<()> {
        if self.next > MAX_VARS {
            Err(Error::VariableLimit(MAX_VARS))
        } else {
            Ok(())
        }
    }
}

impl KeySource<Anf> for SymbolicKeys {
    fn draw(&mut self, _pair: PartyPair, label: &str) -> Anf {
        let v = self.next;
        self.next += 1;
        self.labels.push(label.to_string());
        if v < MAX_VARS {
            Anf::var(v)
        } else {
            Anf::zero()
        }
    }
}

fn bits_of(m: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| m >> i & 1 == 1).collect()
}

fn render_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Number of tape bits one run of `p` draws.
pub fn tape_bits<P: Protocol>(p: &P) -> Result<usize> {
    let mut keys = EnumeratedKeys::default();
    let secrets = vec![Bit::ZERO; p.arity()];
    p.execute(&secrets, &mut keys)?;
    Ok(keys.drawn)
}

// ---- view distributions -------------------------------------------------

/// Multiset of complete views of one party, per secret assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewDistribution {
    pub party: PartyId,
    pub tape_bits: usize,
    /// Secret assignment -> (view -> multiplicity).
    pub by_secret: BTreeMap<Vec<bool>, BTreeMap<Vec<bool>, u64>>,
}

impl ViewDistribution {
    /// True iff every secret assignment yields the same multiset.
    pub fn is_uniform_across_secrets(&self) -> bool {
        let mut it = self.by_secret.values();
        match it.next() {
            Some(first) => it.all(|m| m == first),
            None => true,
        }
    }

    pub fn cardinality(&self, secret: &[bool]) -> u64 {
        self.by_secret.get(secret).map_or(0, |m| m.values().sum())
    }
}

struct BruteForce {
    tape_bits: usize,
    views: BTreeMap<PartyId, ViewDistribution>,
    branches: u128,
    failures: Vec<String>,
}

fn check_budget(bits: usize) -> Result<()> {
    if bits > ENUMERATION_BUDGET {
        Err(Error::EnumerationBudget {
            bits,
            limit: ENUMERATION_BUDGET,
        })
    } else {
        Ok(())
    }
}

type Merged = (BTreeMap<PartyId, BTreeMap<Vec<bool>, u64>>, Vec<String>);

fn brute_force<P: Protocol>(p: &P) -> Result<BruteForce> {
    let r = tape_bits(p)?;
    check_budget(r)?;
    let n = p.arity();
    let parties = p.parties();
    let mut views: BTreeMap<PartyId, ViewDistribution> = parties
        .iter()
        .map(|&party| {
            (
                party,
                ViewDistribution {
                    party,
                    tape_bits: r,
                    by_secret: BTreeMap::new(),
                },
            )
        })
        .collect();
    let mut failures = Vec::new();
    for s in 0..1u64 << n {
        let secret = bits_of(s, n);
        let want = p.expected(&secret);
        let secret_bits: Vec<Bit> = secret.iter().map(|&b| Bit(b)).collect();
        let (merged, fails): Merged = (0..1u64 << r)
            .into_par_iter()
            .map(|t| -> Result<Merged> {
                let mut keys = EnumeratedKeys::new(t);
                let ex = p.execute(&secret_bits, &mut keys)?;
                if keys.drawn != r {
                    return Err(Error::DrawCountMismatch {
                        expected: r,
                        found: keys.drawn,
                    });
                }
                let got: Vec<bool> = ex.outputs.iter().map(|b| b.0).collect();
                let fails = if got != want {
                    vec![format!(
                        "secrets {} tape {t:0r$b}: got {} want {}",
                        render_bits(&secret),
                        render_bits(&got),
                        render_bits(&want)
                    )]
                } else {
                    Vec::new()
                };
                let mut m = BTreeMap::new();
                for &party in &parties {
                    let view: Vec<bool> = view_of(&ex.transcript, party)
                        .into_iter()
                        .map(|e| e.value.0)
                        .collect();
                    m.insert(party, BTreeMap::from([(view, 1u64)]));
                }
                Ok((m, fails))
            })
            .try_reduce(
                || (BTreeMap::new(), Vec::new()),
                |mut a, b| {
                    for (party, views) in b.0 {
                        let slot = a.0.entry(party).or_default();
                        for (v, c) in views {
                            *slot.entry(v).or_insert(0) += c;
                        }
                    }
                    a.1.extend(b.1);
                    Ok(a)
                },
            )?;
        for (party, m) in merged {
            views
                .get_mut(&party)
                .expect("party listed")
                .by_secret
                .insert(secret.clone(), m);
        }
        failures.extend(fails);
    }
    failures.sort();
    Ok(BruteForce {
        tape_bits: r,
        views,
        branches: (1u128 << n) << r,
        failures,
    })
}

/// Exact view distribution of `party` by brute force over all tapes.
pub fn enumerate_views<P: Protocol>(p: &P, party: PartyId) -> Result<ViewDistribution> {
    let mut bf = brute_force(p)?;
    bf.views
        .remove(&party)
        .ok_or_else(|| Error::UnknownProtocol(format!("{party} takes no part in {}", p.name())))
}

// ---- symbolic route -----------------------------------------------------

struct Symbolic {
    tape_bits: usize,
    outputs: Vec<Anf>,
    transcript: Transcript<Anf>,
}

fn symbolic_run<P: Protocol>(p: &P) -> Result<Symbolic> {
    let n = p.arity();
    let secrets: Vec<Anf> = (0..n).map(Anf::var).collect();
    let mut keys = SymbolicKeys::new(n);
    let ex = p.execute(&secrets, &mut keys)?;
    keys.check()?;
    Ok(Symbolic {
        tape_bits: keys.drawn(),
        outputs: ex.outputs,
        transcript: ex.transcript,
    })
}

fn secret_set(n: usize) -> VarSet {
    let mut s = VarSet::empty();
    for v in 0..n {
        s.insert(v);
    }
    s
}

fn assignment_set(secret: &[bool]) -> VarSet {
    let mut s = VarSet::empty();
    for (i, &b) in secret.iter().enumerate() {
        if b {
            s.insert(i);
        }
    }
    s
}

/// Result of the symbolic secrecy analysis of one view.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    /// Components set aside as one-time padded.
    pub eliminated: usize,
    /// Tape bits the remaining components depend on.
    pub residual_bits: usize,
}

/// Drops view components that are one-time padded by a tape bit occurring
/// nowhere else; returns the indices of the remaining ones.
fn eliminate(view: &[Anf], n_secrets: usize) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..view.len()).collect();
    loop {
        let mut occurrences: BTreeMap<usize, usize> = BTreeMap::new();
        for &i in &remaining {
            for m in view[i].terms() {
                for v in m.iter() {
                    *occurrences.entry(v).or_insert(0) += 1;
                }
            }
        }
        let pick = remaining.iter().position(|&i| {
            view[i].terms().any(|m| {
                m.len() == 1 && {
                    let v = m.iter().next().expect("one variable");
                    v >= n_secrets && occurrences[&v] == 1
                }
            })
        });
        match pick {
            Some(pos) => {
                remaining.remove(pos);
            }
            None => return remaining,
        }
    }
}

fn symbolic_distribution(
    view: &[Anf],
    n_secrets: usize,
    party: PartyId,
    tape_bits: usize,
) -> Result<(ViewDistribution, Reduction)> {
    let kept = eliminate(view, n_secrets);
    let secrets = secret_set(n_secrets);
    let support: Vec<usize> = kept
        .iter()
        .fold(VarSet::empty(), |acc, &i| acc.union(&view[i].support()))
        .iter()
        .filter(|v| !secrets.contains(*v))
        .collect();
    check_budget(support.len())?;
    let mut by_secret = BTreeMap::new();
    for s in 0..1u64 << n_secrets {
        let secret = bits_of(s, n_secrets);
        let fixed = assignment_set(&secret);
        let restricted: Vec<Anf> = kept
            .iter()
            .map(|&i| view[i].restrict(&secrets, &fixed))
            .collect();
        let counts = (0..1u64 << support.len())
            .into_par_iter()
            .fold(BTreeMap::new, |mut m: BTreeMap<Vec<bool>, u64>, t| {
                let mut a = VarSet::empty();
                for (j, &v) in support.iter().enumerate() {
                    if t >> j & 1 == 1 {
                        a.insert(v);
                    }
                }
                let key: Vec<bool> = restricted.iter().map(|f| f.eval(&a)).collect();
                *m.entry(key).or_insert(0) += 1;
                m
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, c) in b {
                    *a.entry(k).or_insert(0) += c;
                }
                a
            });
        by_secret.insert(secret, counts);
    }
    Ok((
        ViewDistribution {
            party,
            tape_bits,
            by_secret,
        },
        Reduction {
            eliminated: view.len() - kept.len(),
            residual_bits: support.len(),
        },
    ))
}

// ---- holdings -----------------------------------------------------------

/// Pairs of values held by one party whose XOR (or a single value) is a
/// non-constant function of the secrets alone, i.e. a ciphertext together
/// with its key.
pub fn decrypting_pairs(t: &Transcript<Anf>, n_secrets: usize) -> Vec<(PartyId, String, String)> {
    let secrets = secret_set(n_secrets);
    let reveals = |f: &Anf| f.is_constant().is_none() && f.support().is_subset(&secrets);
    let mut found = Vec::new();
    for (&party, held) in &t.final_holdings {
        if party == PartyId::Client {
            continue;
        }
        for (i, (la, a)) in held.iter().enumerate() {
            if reveals(a) {
                found.push((party, la.clone(), la.clone()));
            }
            for (lb, b) in &held[i + 1..] {
                if reveals(&a.xor(b)) {
                    found.push((party, la.clone(), lb.clone()));
                }
            }
        }
    }
    found
}

/// Symbolic run of `p` followed by [`decrypting_pairs`].
pub fn holdings_check<P: Protocol>(p: &P) -> Result<Vec<(PartyId, String, String)>> {
    let s = symbolic_run(p)?;
    Ok(decrypting_pairs(&s.transcript, p.arity()))
}

// ---- checks and reports -------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    /// Brute force for small branch counts, symbolic otherwise.
    Auto,
    BruteForce,
    Symbolic,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Auto => "auto",
            Route::BruteForce => "brute-force",
            Route::Symbolic => "symbolic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyVerdict {
    pub party: PartyId,
    pub pass: bool,
    /// Size of each per-secret multiset (`2^tape_bits`).
    pub multiset_size: u128,
    /// Distinct views over all secret assignments.
    pub distinct_views: usize,
    /// Symbolic route only.
    pub reduction: Option<Reduction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectnessVerdict {
    pub pass: bool,
    /// Secret assignments times tape assignments covered.
    pub branches: u128,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub protocol: String,
    pub route: Route,
    pub tape_bits: usize,
    pub correctness: CorrectnessVerdict,
    pub parties: Vec<PartyVerdict>,
    /// Set for deliberately leaky mutants, which are expected to fail.
    pub expect_leak: bool,
}

impl AuditReport {
    pub fn secure(&self) -> bool {
        self.parties.iter().all(|p| p.pass)
    }

    pub fn pass(&self) -> bool {
        self.correctness.pass && self.secure()
    }

    /// Passed, or failed secrecy while expected to leak.
    pub fn as_expected(&self) -> bool {
        if self.expect_leak {
            !self.secure()
        } else {
            self.pass()
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "protocol {} route={} tape_bits={} correctness={} branches={}\n",
            self.protocol,
            self.route,
            self.tape_bits,
            verdict(self.correctness.pass),
            self.correctness.branches
        );
        for f in self.correctness.failures.iter().take(5) {
            out.push_str(&format!("  failure: {f}\n"));
        }
        for p in &self.parties {
            out.push_str(&format!(
                "  {:<8} secrecy={} multiset={} distinct_views={}",
                p.party.name(),
                verdict(p.pass),
                p.multiset_size,
                p.distinct_views
            ));
            if let Some(r) = &p.reduction {
                out.push_str(&format!(
                    " padded={} residual_bits={}",
                    r.eliminated, r.residual_bits
                ));
            }
            out.push('\n');
        }
        let summary = match (self.pass(), self.expect_leak) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (deliberately leaky mutant)",
            (true, true) => "PASS (mutant leak went undetected)",
        };
        out.push_str(&format!("  verdict: {summary}\n"));
        out
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn party_verdict(d: &ViewDistribution, reduction: Option<Reduction>) -> PartyVerdict {
    let distinct: BTreeSet<&Vec<bool>> = d.by_secret.values().flat_map(|m| m.keys()).collect();
    PartyVerdict {
        party: d.party,
        pass: d.is_uniform_across_secrets(),
        multiset_size: 1u128 << d.tape_bits.min(127),
        distinct_views: distinct.len(),
        reduction,
    }
}

fn symbolic_correctness<P: Protocol>(p: &P, s: &Symbolic) -> CorrectnessVerdict {
    let n = p.arity();
    let secrets = secret_set(n);
    let mut failures = Vec::new();
    for m in 0..1u64 << n {
        let secret = bits_of(m, n);
        let want = p.expected(&secret);
        let fixed = assignment_set(&secret);
        for (i, (out, w)) in s.outputs.iter().zip(&want).enumerate() {
            let got = out.restrict(&secrets, &fixed);
            if got.is_constant() != Some(*w) {
                failures.push(format!(
                    "secrets {} output {i}: {got} is not the constant {}",
                    render_bits(&secret),
                    u8::from(*w)
                ));
            }
        }
        if s.outputs.len() != want.len() {
            failures.push(format!(
                "{} outputs, expected {}",
                s.outputs.len(),
                want.len()
            ));
        }
    }
    CorrectnessVerdict {
        pass: failures.is_empty(),
        branches: (1u128 << n) << s.tape_bits.min(100),
        failures,
    }
}

/// Every (secret, tape) branch reveals the expected value.
pub fn correctness_check<P: Protocol>(p: &P, route: Route) -> Result<CorrectnessVerdict> {
    Ok(audit(p, route)?.correctness)
}

/// Per-party exact comparison of view multisets across secrets.
pub fn perfect_security_check<P: Protocol>(p: &P, route: Route) -> Result<Vec<PartyVerdict>> {
    Ok(audit(p, route)?.parties)
}

/// Full audit of `p` along `route`.
pub fn audit<P: Protocol>(p: &P, route: Route) -> Result<AuditReport> {
    let use_brute = match route {
        Route::BruteForce => true,
        Route::Symbolic => false,
        Route::Auto => (1u128 << p.arity()) << tape_bits(p)? <= AUTO_BRUTE_FORCE_BRANCHES,
    };
    let (route, tape_bits, correctness, parties) = if use_brute {
        let bf = brute_force(p)?;
        let parties = bf.views.values().map(|d| party_verdict(d, None)).collect();
        let correctness = CorrectnessVerdict {
            pass: bf.failures.is_empty(),
            branches: bf.branches,
            failures: bf.failures,
        };
        (Route::BruteForce, bf.tape_bits, correctness, parties)
    } else {
        let s = symbolic_run(p)?;
        let correctness = symbolic_correctness(p, &s);
        let mut parties = Vec::new();
        for party in p.parties() {
            let view: Vec<Anf> = view_of(&s.transcript, party)
                .into_iter()
                .map(|e| e.value)
                .collect();
            let (d, red) = symbolic_distribution(&view, p.arity(), party, s.tape_bits)?;
            parties.push(party_verdict(&d, Some(red)));
        }
        (Route::Symbolic, s.tape_bits, correctness, parties)
    };
    Ok(AuditReport {
        protocol: p.name(),
        route,
        tape_bits,
        correctness,
        parties,
        expect_leak: false,
    })
}

// ---- shipped scenarios --------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    /// `a AND b` with two helpers.
    And4,
    /// `a AND b`, nothing resident at the helper.
    And3,
    /// `a AND b`, `b AND c`, then `a AND c` with both operands resident.
    ReuseBoth,
    /// `a AND b`, then `a AND c` reusing `a`.
    ReuseLeft,
    /// `a AND b`, then `a AND b` again with `b` re-encrypted in place.
    ReuseReencrypt,
    /// One fan-in AND of `w` inputs.
    Fanin(usize),
}

/// A gate-level protocol instance, optionally with an injected leak.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub mutation: Option<Mutation>,
}

/// Scope whose messages form the gate a scenario is about.
pub const TARGET_SCOPE: &str = "target";

impl Scenario {
    pub fn new(kind: ScenarioKind) -> Self {
        Scenario {
            kind,
            mutation: None,
        }
    }

    pub fn mutant(kind: ScenarioKind, m: Mutation) -> Self {
        Scenario {
            kind,
            mutation: Some(m),
        }
    }

    fn base_name(&self) -> String {
        match self.kind {
            ScenarioKind::And4 => "and4".into(),
            ScenarioKind::And3 => "and3".into(),
            ScenarioKind::ReuseBoth => "reuse-both".into(),
            ScenarioKind::ReuseLeft => "reuse-left".into(),
            ScenarioKind::ReuseReencrypt => "reuse-reencrypt".into(),
            ScenarioKind::Fanin(w) => format!("fanin-{w}"),
        }
    }

    /// Looks up a shipped protocol or mutant by name.
    pub fn by_name(name: &str) -> Result<Scenario> {
        if let Some(w) = name.strip_prefix("fanin-").and_then(|w| w.parse().ok()) {
            return Ok(Scenario::new(ScenarioKind::Fanin(w)));
        }
        scenarios()
            .into_iter()
            .chain(mutants())
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::UnknownProtocol(name.to_string()))
    }

    /// Concrete run with tapes from `seed`.
    pub fn measure(&self, seed: [u8; 32], secrets: &[bool]) -> Result<(Vec<bool>, CostReport)> {
        let mut tapes = TapeSet::new(seed);
        let bits: Vec<Bit> = secrets.iter().map(|&b| Bit(b)).collect();
        let ex = self.execute(&bits, &mut tapes)?;
        Ok((
            ex.outputs.into_iter().map(Bit::as_bool).collect(),
            cost_of(&ex.transcript),
        ))
    }
}

impl Protocol for Scenario {
    fn name(&self) -> String {
        match self.mutation {
            None => self.base_name(),
            Some(Mutation::MaskedKeyToEvh) => format!("mutant-{}-mask-leak", self.base_name()),
            Some(_) => format!("mutant-{}-leak", self.base_name()),
        }
    }

    fn arity(&self) -> usize {
        match self.kind {
            ScenarioKind::And4 | ScenarioKind::And3 | ScenarioKind::ReuseReencrypt => 2,
            ScenarioKind::ReuseBoth | ScenarioKind::ReuseLeft => 3,
            ScenarioKind::Fanin(w) => w,
        }
    }

    fn parties(&self) -> Vec<PartyId> {
        let mut p = vec![PartyId::Kh, PartyId::Evh, PartyId::Helper];
        if self.kind == ScenarioKind::And4 {
            p.push(PartyId::Helper2);
        }
        p
    }

    fn expected(&self, s: &[bool]) -> Vec<bool> {
        match self.kind {
            ScenarioKind::And4 | ScenarioKind::And3 => vec![s[0] & s[1]],
            ScenarioKind::ReuseBoth => vec![s[0] & s[1], s[1] & s[2], s[0] & s[2]],
            ScenarioKind::ReuseLeft => vec![s[0] & s[1], s[0] & s[2]],
            ScenarioKind::ReuseReencrypt => vec![s[0] & s[1], s[0] & s[1]],
            ScenarioKind::Fanin(_) => vec![s.iter().all(|&b| b)],
        }
    }

    fn execute<B: BitValue>(
        &self,
        secrets: &[B],
        keys: &mut dyn KeySource<B>,
    ) -> Result<Execution<B>> {
        let names = ["a", "b", "c"];
        let kind = self.kind;
        let (outputs, transcript) = gates::run(
            keys,
            self.mutation,
            DEFAULT_W_MAX,
            |e: &mut Engine<'_, B>| {
                let mut outs = Vec::new();
                match kind {
                    ScenarioKind::And4 => {
                        let x = e.share_input("a", secrets[0].clone())?;
                        let y = e.share_input("b", secrets[1].clone())?;
                        e.set_scope(Some(TARGET_SCOPE));
                        outs.push(e.and4(&x, &y)?);
                    }
                    ScenarioKind::And3 => {
                        let x = e.share_input("a", secrets[0].clone())?;
                        e.share_input("b", secrets[1].clone())?;
                        let y = e.share_input_second("b")?;
                        e.set_scope(Some(TARGET_SCOPE));
                        outs.push(e.and3(&x, &y)?);
                    }
                    ScenarioKind::ReuseBoth | ScenarioKind::ReuseLeft => {
                        let first: Vec<_> = names
                            .iter()
                            .zip(secrets)
                            .map(|(n, v)| e.share_input(n, v.clone()))
                            .collect::<Result<_>>()?;
                        let b2 = e.share_input_second("b")?;
                        let c2 = e.share_input_second("c")?;
                        e.set_scope(Some("ab"));
                        outs.push(e.and3(&first[0], &b2)?);
                        if kind == ScenarioKind::ReuseBoth {
                            e.set_scope(Some("bc"));
                            outs.push(e.and3(&first[1], &c2)?);
                            e.set_scope(Some(TARGET_SCOPE));
                            outs.push(e.and3_reuse_both(&first[0], &c2)?);
                        } else {
                            e.set_scope(Some(TARGET_SCOPE));
                            outs.push(e.and3_reuse_left(&first[0], &c2)?);
                        }
                    }
                    ScenarioKind::ReuseReencrypt => {
                        let x = e.share_input("a", secrets[0].clone())?;
                        e.share_input("b", secrets[1].clone())?;
                        let y = e.share_input_second("b")?;
                        e.set_scope(Some("ab"));
                        outs.push(e.and3(&x, &y)?);
                        e.set_scope(Some(TARGET_SCOPE));
                        outs.push(e.and3_reuse_reencrypt(&x, &y)?);
                    }
                    ScenarioKind::Fanin(w) => {
                        let xs: Vec<_> = (0..w)
                            .map(|i| e.share_input(&format!("x{i}"), secrets[i].clone()))
                            .collect::<Result<_>>()?;
                        e.set_scope(Some(TARGET_SCOPE));
                        outs.push(e.fanin_and(&xs)?);
                    }
                }
                e.set_scope(Some("out"));
                outs.iter().map(|h| e.reveal(h)).collect()
            },
        )?;
        Ok(Execution {
            outputs,
            transcript,
        })
    }
}

/// The shipped protocols, in audit order.
pub fn scenarios() -> Vec<Scenario> {
    use ScenarioKind::*;
    [
        And4,
        And3,
        ReuseBoth,
        ReuseLeft,
        ReuseReencrypt,
        Fanin(1),
        Fanin(2),
        Fanin(3),
    ]
    .into_iter()
    .map(Scenario::new)
    .collect()
}

/// One leaky mutant per protocol (two for the fresh three-party AND).
pub fn mutants() -> Vec<Scenario> {
    use ScenarioKind::*;
    vec![
        Scenario::mutant(And3, Mutation::K2ToKh),
        Scenario::mutant(And3, Mutation::MaskedKeyToEvh),
        Scenario::mutant(And4, Mutation::And4KeyToEvh),
        Scenario::mutant(ReuseBoth, Mutation::ReuseBothK7ToEvh),
        Scenario::mutant(ReuseLeft, Mutation::ReuseLeftK6ToHelper),
        Scenario::mutant(ReuseReencrypt, Mutation::ReencryptCtToHelper),
        Scenario::mutant(Fanin(2), Mutation::FaninKeyToEvh),
    ]
}

/// A planned circuit as an auditable protocol.
#[derive(Debug, Clone)]
pub struct CircuitProtocol {
    pub name: String,
    pub circuit: Circuit,
    pub schedule: Schedule,
}

impl Protocol for CircuitProtocol {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn arity(&self) -> usize {
        self.circuit.inputs.len()
    }

    fn parties(&self) -> Vec<PartyId> {
        vec![PartyId::Kh, PartyId::Evh, PartyId::Helper]
    }

    fn expected(&self, secrets: &[bool]) -> Vec<bool> {
        eval_plain(&self.circuit, secrets).expect("arity checked by the harness")
    }

    fn execute<B: BitValue>(
        &self,
        secrets: &[B],
        keys: &mut dyn KeySource<B>,
    ) -> Result<Execution<B>> {
        let (outputs, transcript) = execute(&self.circuit, &self.schedule, secrets, keys, None)?;
        Ok(Execution {
            outputs,
            transcript,
        })
    }
}

/// Audits a scenario, marking mutants as expected to leak.
pub fn audit_scenario(s: &Scenario, route: Route) -> Result<AuditReport> {
    let mut r = audit(s, route)?;
    r.expect_leak = s.mutation.is_some();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elimination_keeps_shared_pads() {
        // view (s0 ^ r2, r2): neither component is padded by a private bit
        let v = vec![Anf::var(0).xor(&Anf::var(2)), Anf::var(2)];
        assert_eq!(eliminate(&v, 2), vec![0, 1]);
        // view (s0 ^ r2, r3): the first is padded
        let v = vec![Anf::var(0).xor(&Anf::var(2)), Anf::var(3)];
        assert!(eliminate(&v, 2).is_empty());
        // view (s0 & r2 ^ r3): r3 pads it
        let v = vec![Anf::var(0).and(&Anf::var(2)).xor(&Anf::var(3))];
        assert!(eliminate(&v, 2).is_empty());
        // view (s0 & r2): nothing to eliminate
        let v = vec![Anf::var(0).and(&Anf::var(2))];
        assert_eq!(eliminate(&v, 2), vec![0]);
    }

    #[test]
    fn tape_bit_counts() {
        assert_eq!(tape_bits(&Scenario::new(ScenarioKind::And3)).unwrap(), 8);
        assert_eq!(tape_bits(&Scenario::new(ScenarioKind::And4)).unwrap(), 4);
    }

    #[test]
    fn names_round_trip() {
        for s in scenarios().into_iter().chain(mutants()) {
            assert_eq!(Scenario::by_name(&s.name()).unwrap(), s);
        }
        assert!(Scenario::by_name("nope").is_err());
    }
}
