//! Exponentiation `c^a` of a public base by an additively encrypted exponent.
//!
//! The exponent is held as `a + K` by EVH, with `K` known to KH and the
//! helper. Using `c^(a+K) / c^K = c^a`:
//!
//! 1. EVH sends `X = c^(a+K) + K1` to the helper (`K1` pre-shared with KH).
//! 2. KH picks a private `K2` and sends `K3 = K1/c^K - K2` to the helper.
//! 3. The helper sends `Z = X/c^K - K3 = c^a + K2` to EVH.
//!
//! EVH ends with `c^a + K2`, KH with `K2`. The blinding is statistical: keys
//! are integers from `[0, B * 2^lambda)`, so the helper's view depends on `a`
//! through the edges of the key range only. [`statistical_leakage`] measures
//! that dependence exactly.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netsim::{cost_of, view_of, CostReport, PartyId, Phase, Round, Sim, Transcript};
use crate::sharing::{IntKeySource, PartyPair, Rat};

use PartyId::{Client, Evh, Helper, Kh};

/// Largest number of key states [`statistical_leakage`] will enumerate.
pub const LEAKAGE_STATE_LIMIT: u128 = 1 << 20;

/// Key ranges of the additive protocols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecurityParam {
    pub lambda: u32,
    /// Bound `B` on the magnitude of `c^a` (and of `c^-a`).
    pub value_bound: u64,
    /// Size of the range `[0, n)` the exponent's own key `K` comes from.
    pub exponent_key_range: u32,
}

impl SecurityParam {
    pub fn new(lambda: u32, value_bound: u64) -> Self {
        SecurityParam {
            lambda,
            value_bound,
            exponent_key_range: 4,
        }
    }

    pub fn with_exponent_key_range(mut self, n: u32) -> Self {
        self.exponent_key_range = n;
        self
    }

    /// `B * 2^lambda`, the range of the blinding keys `K1` and `K2`.
    pub fn key_range(&self) -> BigUint {
        BigUint::from(self.value_bound) << self.lambda
    }
}

/// Who chooses `K2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyFlow {
    /// KH draws `K2` privately and sends `K3 = K1/c^K - K2`.
    Corrected,
    /// The helper draws `K2` (shared with KH) and KH sends
    /// `K3 = -K1/c^K - K2`. Kept to demonstrate that it fails.
    HelperChosen,
}

/// Labels of an additively encrypted value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveShare {
    /// `a + K` at EVH.
    pub evh_ct: String,
    /// `K` at KH.
    pub kh_key: String,
    /// `K` at the helper, when the helper has it.
    pub helper_key: Option<String>,
}

/// Result of one complete run: client sharing, exponentiation, reveal.
#[derive(Debug, Clone)]
pub struct ExpoOutcome {
    pub value: Rat,
    pub cost: CostReport,
    pub transcript: Transcript<Rat>,
}

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// `c^e` for integer `e`, exact.
pub fn rat_pow(c: &Rat, e: &Rat) -> Result<Rat> {
    if !e.is_integer() {
        return Err(Error::NonIntegerExponent);
    }
    let e = e
        .to_integer()
        .to_i32()
        .ok_or_else(|| Error::ValueBound(format!("exponent {e} too large")))?;
    Ok(c.pow(e))
}

fn check_base(c: &Rat) -> Result<()> {
    if c.is_positive() {
        Ok(())
    } else {
        Err(Error::BaseDomain)
    }
}

/// Validates `c` and `a` against `sp` and returns `c^a`.
pub fn checked_power(c: &Rat, a: &Rat, sp: &SecurityParam) -> Result<Rat> {
    check_base(c)?;
    let v = rat_pow(c, a)?;
    let bound = int(sp.value_bound as i64);
    if v > bound || v.recip() > bound {
        return Err(Error::ValueBound(format!(
            "{c}^{a} = {v} is outside [1/{b}, {b}]",
            b = sp.value_bound
        )));
    }
    Ok(v)
}

fn local(
    sim: &mut Sim<Rat>,
    p: PartyId,
    out: &str,
    inputs: &[&str],
    f: impl FnOnce(&[Rat]) -> Result<Rat>,
) -> Result<()> {
    let vals = inputs
        .iter()
        .map(|l| sim.get(p, l, Round::MAX))
        .collect::<Result<Vec<_>>>()?;
    let ready = sim.ready_all(&inputs.iter().map(|l| (p, *l)).collect::<Vec<_>>())?;
    sim.put(p, out, f(&vals)?, ready)
}

fn msg(sim: &mut Sim<Rat>, from: PartyId, label: &str, to: PartyId) -> Result<()> {
    let round = sim.ready(from, label)?.max(1);
    sim.send(round, Phase::Computation, from, to, label)
}

fn draw(
    sim: &mut Sim<Rat>,
    keys: &mut dyn IntKeySource,
    pair: PartyPair,
    label: &str,
    range: &BigUint,
) -> Result<()> {
    let v = keys.draw_int(pair, label, range)?;
    sim.record_draw(pair, label, v)
}

/// The client encrypts the integer `a` as `a + K`; `K` comes from the
/// client-KH tape and is also sent to the helper.
pub fn share_additive(
    sim: &mut Sim<Rat>,
    keys: &mut dyn IntKeySource,
    var: &str,
    a: &Rat,
    sp: &SecurityParam,
) -> Result<AdditiveShare> {
    if !a.is_integer() {
        return Err(Error::NonIntegerExponent);
    }
    let (held, key, ct) = (
        format!("in.{var}"),
        format!("in.{var}/K"),
        format!("in.{var}/ct"),
    );
    sim.hold_initial(Client, &held, a.clone())?;
    draw(
        sim,
        keys,
        PartyPair::new(Client, Kh),
        &key,
        &BigUint::from(sp.exponent_key_range),
    )?;
    local(sim, Client, &ct, &[&held, &key], |v| Ok(&v[0] + &v[1]))?;
    sim.send(0, Phase::SecretSharing, Client, Evh, &ct)?;
    sim.send(0, Phase::SecretSharing, Client, Helper, &key)?;
    Ok(AdditiveShare {
        evh_ct: ct,
        kh_key: key.clone(),
        helper_key: Some(key),
    })
}

/// Computes an additive share of `c^a` from a share of `a`.
pub fn exp_public_base(
    sim: &mut Sim<Rat>,
    keys: &mut dyn IntKeySource,
    c: &Rat,
    x: &AdditiveShare,
    sp: &SecurityParam,
    flow: KeyFlow,
) -> Result<AdditiveShare> {
    check_base(c)?;
    let helper_key = x
        .helper_key
        .as_deref()
        .ok_or_else(|| Error::NotResident("the exponent key is not at the helper".into()))?;
    let range = sp.key_range();
    draw(sim, keys, PartyPair::new(Evh, Kh), "exp/K1", &range)?;
    local(sim, Evh, "exp/X", &[&x.evh_ct, "exp/K1"], |v| {
        Ok(rat_pow(c, &v[0])? + &v[1])
    })?;
    msg(sim, Evh, "exp/X", Helper)?;

    let (k2_pair, sign) = match flow {
        KeyFlow::Corrected => (PartyPair::private(Kh), Rat::one()),
        KeyFlow::HelperChosen => (PartyPair::new(Helper, Kh), -Rat::one()),
    };
    draw(sim, keys, k2_pair, "exp/K2", &range)?;
    local(sim, Kh, "exp/K3", &[&x.kh_key, "exp/K1", "exp/K2"], |v| {
        Ok(&sign * &v[1] / rat_pow(c, &v[0])? - &v[2])
    })?;
    msg(sim, Kh, "exp/K3", Helper)?;

    local(
        sim,
        Helper,
        "exp/Z",
        &[helper_key, "exp/X", "exp/K3"],
        |v| Ok(&v[1] / rat_pow(c, &v[0])? - &v[2]),
    )?;
    msg(sim, Helper, "exp/Z", Evh)?;
    Ok(AdditiveShare {
        evh_ct: "exp/Z".into(),
        kh_key: "exp/K2".into(),
        helper_key: None,
    })
}

/// EVH and KH send their parts to the client, which subtracts.
pub fn reveal_additive(sim: &mut Sim<Rat>, x: &AdditiveShare) -> Result<Rat> {
    let r_ct = sim.ready(Evh, &x.evh_ct)?;
    let r_key = sim.ready(Kh, &x.kh_key)?;
    sim.forward(r_ct, Phase::Reveal, Evh, &x.evh_ct, Client, "out/ct")?;
    sim.forward(r_key, Phase::Reveal, Kh, &x.kh_key, Client, "out/K")?;
    local(sim, Client, "out", &["out/ct", "out/K"], |v| {
        Ok(&v[0] - &v[1])
    })?;
    sim.get(Client, "out", Round::MAX)
}

/// Shares `a`, computes `c^a` and reveals it.
pub fn run_exp(
    c: &Rat,
    a: &Rat,
    sp: &SecurityParam,
    flow: KeyFlow,
    keys: &mut dyn IntKeySource,
) -> Result<ExpoOutcome> {
    checked_power(c, a, sp)?;
    let mut sim = Sim::new();
    let x = share_additive(&mut sim, keys, "a", a, sp)?;
    let y = exp_public_base(&mut sim, keys, c, &x, sp, flow)?;
    let value = reveal_additive(&mut sim, &y)?;
    let transcript = sim.finish();
    Ok(ExpoOutcome {
        value,
        cost: cost_of(&transcript),
        transcript,
    })
}

/// Key source replaying fixed values in draw order.
#[derive(Debug, Clone)]
pub struct FixedInts {
    values: Vec<Rat>,
    next: usize,
}

impl FixedInts {
    pub fn new(values: Vec<Rat>) -> Self {
        FixedInts { values, next: 0 }
    }
}

impl IntKeySource for FixedInts {
    fn draw_int(&mut self, _pair: PartyPair, _label: &str, range: &BigUint) -> Result<Rat> {
        let v = self
            .values
            .get(self.next)
            .cloned()
            .ok_or(Error::DrawCountMismatch {
                expected: self.values.len(),
                found: self.next + 1,
            })?;
        self.next += 1;
        if v.is_negative() || v >= Rat::from_integer(BigInt::from(range.clone())) {
            return Err(Error::ValueBound(format!(
                "fixed key {v} outside [0, {range})"
            )));
        }
        Ok(v)
    }
}

/// Exact total-variation distance between the helper's views for exponents
/// `a1` and `a2`, by enumerating every `(K, K1, K2)`.
pub fn statistical_leakage(
    c: &Rat,
    a1: &Rat,
    a2: &Rat,
    sp: &SecurityParam,
    flow: KeyFlow,
) -> Result<Rat> {
    checked_power(c, a1, sp)?;
    checked_power(c, a2, sp)?;
    let n = sp.key_range();
    let states = n
        .to_u128()
        .and_then(|n| n.checked_mul(n))
        .and_then(|nn| nn.checked_mul(sp.exponent_key_range as u128))
        .unwrap_or(u128::MAX);
    if states > LEAKAGE_STATE_LIMIT {
        return Err(Error::RangeTooLarge {
            states,
            limit: LEAKAGE_STATE_LIMIT,
        });
    }
    let n = n.to_u64().expect("bounded by the state limit");
    let d1 = helper_views(c, a1, sp, flow, n)?;
    let d2 = helper_views(c, a2, sp, flow, n)?;
    let mut diff = BigInt::zero();
    for (view, c1) in &d1 {
        let c2 = d2.get(view).copied().unwrap_or(0);
        diff += BigInt::from(c1.abs_diff(c2));
    }
    for (view, c2) in &d2 {
        if !d1.contains_key(view) {
            diff += BigInt::from(*c2);
        }
    }
    Ok(Rat::new(diff, BigInt::from(2 * states)))
}

type HelperView = Vec<Rat>;

fn helper_views(
    c: &Rat,
    a: &Rat,
    sp: &SecurityParam,
    flow: KeyFlow,
    n: u64,
) -> Result<HashMap<HelperView, u64>> {
    let parts: Vec<HashMap<HelperView, u64>> = (0..sp.exponent_key_range as i64)
        .into_par_iter()
        .flat_map(|k| (0..n as i64).into_par_iter().map(move |k1| (k, k1)))
        .map(|(k, k1)| {
            let mut local = HashMap::new();
            for k2 in 0..n as i64 {
                let mut keys = FixedInts::new(vec![int(k), int(k1), int(k2)]);
                let out = run_exp(c, a, sp, flow, &mut keys)?;
                let view: HelperView = view_of(&out.transcript, Helper)
                    .into_iter()
                    .map(|e| e.value)
                    .collect();
                *local.entry(view).or_insert(0) += 1;
            }
            Ok(local)
        })
        .collect::<Result<_>>()?;
    let mut merged = HashMap::new();
    for part in parts {
        for (v, count) in part {
            *merged.entry(v).or_insert(0) += count;
        }
    }
    Ok(merged)
}

/// `max_K (c^K |d| + |d|) / (B * 2^lambda)` with `d = c^a1 - c^a2`: an upper
/// bound on [`statistical_leakage`] for the corrected flow. Integer key
/// offsets only hide integers, so every `c^(a+K)` must be integral.
pub fn leakage_bound(c: &Rat, a1: &Rat, a2: &Rat, sp: &SecurityParam) -> Result<Rat> {
    let d = (checked_power(c, a1, sp)? - checked_power(c, a2, sp)?).abs();
    for k in 0..sp.exponent_key_range {
        for a in [a1, a2] {
            if !rat_pow(c, &(a + int(k as i64)))?.is_integer() {
                return Err(Error::ValueBound(format!(
                    "{c}^({a}+{k}) is not an integer; the bound needs integral powers"
                )));
            }
        }
    }
    let kmax = int(sp.exponent_key_range as i64 - 1).max(Rat::zero());
    let widest = rat_pow(c, &kmax)?.max(Rat::one());
    let spread = &widest * &d + &d;
    Ok(spread / Rat::from_integer(BigInt::from(sp.key_range())))
}
