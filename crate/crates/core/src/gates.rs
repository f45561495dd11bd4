//! Boolean gate protocols between the keyholder (KH), the encrypted-value
//! holder (EVH) and one or two helpers.
//!
//! Every protocol is written once against [`BitValue`] and executed inside an
//! [`Engine`], which wraps the simulator. Values never leave the simulator:
//! a [`ShareHandle`] only names the labels under which EVH stores the
//! ciphertext and KH stores the key, so every read goes through the
//! causality check and every transfer is a recorded message.
//!
//! Operand orientation for the three-party AND: the left operand uses a
//! [`Slot::First`] encryption (key known to KH only), the right operand a
//! [`Slot::Second`] encryption whose key the helper also knows.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netsim::{PartyId, Phase, Round, Session, Transcript};
use crate::sharing::{BitValue, KeySource, PartyPair};

use PartyId::{Client, Evh, Helper, Helper2, Kh};

/// Default cap on the fan-in of a single AND gate.
pub const DEFAULT_W_MAX: usize = 16;

/// Which of the (at most two) live encryptions of a variable a handle names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    /// Key known to KH only; used as left AND operand.
    First,
    /// Key known to KH and the helper; used as right AND operand.
    Second,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::First => "First",
            Slot::Second => "Second",
        })
    }
}

/// Labels of a left operand resident at the helper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelperShareLeft {
    /// `ENC_{K_a}(a)` at the helper.
    pub enc_a: String,
    /// `ENC_{K_6}(K_a)` at the helper.
    pub enc_key: String,
    /// `K_6`, held by KH and EVH.
    pub k6: String,
}

/// Labels of a right operand resident at the helper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelperShareRight {
    /// `K_2` and `K_5`, held by EVH and the helper.
    pub k2: String,
    pub k5: String,
    /// `K_b ^ K_2` at the helper.
    pub masked_key: String,
    /// `ENC_{K_b ^ K_2}(b)` at EVH.
    pub evh_double: String,
    /// `ENC_{K_b ^ K_2}(b)` and `ENC_{K_5}(K_b ^ K_2)` at KH.
    pub kh_double: String,
    pub kh_enc_key: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HelperState {
    NotShared,
    SharedLeft(HelperShareLeft),
    SharedRight(HelperShareRight),
}

impl HelperState {
    pub fn name(&self) -> &'static str {
        match self {
            HelperState::NotShared => "NotShared",
            HelperState::SharedLeft(_) => "SharedLeft",
            HelperState::SharedRight(_) => "SharedRight",
        }
    }
}

/// A secret's distributed representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShareHandle {
    id: usize,
    pub var: String,
    pub slot: Slot,
}

#[derive(Debug, Clone)]
struct SlotRecord {
    var: String,
    slot: Slot,
    /// Ciphertext label at EVH.
    ct: String,
    /// Key label at KH.
    key: String,
    /// Key label at the helper (second slots only).
    helper_key: Option<String>,
    helper: HelperState,
    live: bool,
}

/// Deliberate protocol faults, each adding one message that leaks. The audit
/// must reject every one of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mutation {
    /// EVH also sends `K_2` to KH when sharing a right operand.
    K2ToKh,
    /// KH also sends `ENC_{K_6}(K_a)` to EVH, which knows `K_6`.
    MaskedKeyToEvh,
    /// In the four-party AND the helper forwards `K_b` to EVH.
    And4KeyToEvh,
    /// KH sends the fresh `K_7` of a reuse-both AND to EVH.
    ReuseBothK7ToEvh,
    /// KH sends `K_6` to the helper in a reuse-left AND.
    ReuseLeftK6ToHelper,
    /// EVH forwards the re-encrypted ciphertext to the helper.
    ReencryptCtToHelper,
    /// KH sends a fan-in term key `K_tK` to EVH.
    FaninKeyToEvh,
}

/// Number of terms the fan-in AND expands into.
pub fn fanin_terms(w: usize) -> usize {
    1 << w
}

/// Protocol executor over one simulated network.
pub struct Engine<'k, V> {
    pub net: Session<'k, V>,
    slots: Vec<SlotRecord>,
    mutation: Option<Mutation>,
    w_max: usize,
    scope: Option<String>,
    auto_scopes: usize,
    prefixes: HashSet<String>,
    secrets: HashSet<String>,
}

impl<'k, V: BitValue> Engine<'k, V> {
    pub fn new(keys: &'k mut dyn KeySource<V>) -> Self {
        Engine {
            net: Session::new(keys),
            slots: Vec::new(),
            mutation: None,
            w_max: DEFAULT_W_MAX,
            scope: None,
            auto_scopes: 0,
            prefixes: HashSet::new(),
            secrets: HashSet::new(),
        }
    }

    pub fn with_w_max(mut self, w_max: usize) -> Self {
        self.w_max = w_max;
        self
    }

    pub fn with_mutation(mut self, mutation: Option<Mutation>) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn w_max(&self) -> usize {
        self.w_max
    }

    /// Attributes the messages of subsequent operations to `scope` (a gate
    /// id). With `None`, each operation gets its own `g<n>` scope.
    pub fn set_scope(&mut self, scope: Option<&str>) {
        self.scope = scope.map(str::to_string);
    }

    pub fn finish(self) -> Transcript<V> {
        self.net.finish()
    }

    // ---- bookkeeping -------------------------------------------------

    fn scoped<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        if self.scope.is_some() {
            return f(self);
        }
        self.auto_scopes += 1;
        self.scope = Some(format!("g{}", self.auto_scopes));
        let out = f(self);
        self.scope = None;
        out
    }

    fn open(&mut self, kind: &str) -> String {
        let base = match &self.scope {
            Some(s) => format!("{s}/{kind}"),
            None => kind.to_string(),
        };
        let mut prefix = base.clone();
        let mut n = 1;
        while !self.prefixes.insert(prefix.clone()) {
            n += 1;
            prefix = format!("{base}{n}");
        }
        prefix
    }

    fn record(&self, h: &ShareHandle) -> Result<&SlotRecord> {
        match self.slots.get(h.id) {
            Some(r) if r.live => Ok(r),
            _ => Err(Error::NotResident(format!(
                "`{}` is not a live share",
                h.var
            ))),
        }
    }

    fn live_count(&self, var: &str) -> usize {
        self.slots.iter().filter(|r| r.live && r.var == var).count()
    }

    pub fn live_slots(&self, var: &str) -> usize {
        self.live_count(var)
    }

    fn add_slot(&mut self, rec: SlotRecord) -> ShareHandle {
        let h = ShareHandle {
            id: self.slots.len(),
            var: rec.var.clone(),
            slot: rec.slot,
        };
        self.slots.push(rec);
        h
    }

    fn val(&self, p: PartyId, label: &str) -> Result<V> {
        self.net.sim.get(p, label, Round::MAX)
    }

    /// Local computation at `p`; the result is readable as soon as its
    /// inputs are.
    fn local(
        &mut self,
        p: PartyId,
        out: &str,
        inputs: &[&str],
        f: impl FnOnce(&[V]) -> V,
    ) -> Result<()> {
        let vals = inputs
            .iter()
            .map(|l| self.val(p, l))
            .collect::<Result<Vec<_>>>()?;
        let ready = inputs.iter().try_fold(0, |acc, l| {
            Ok::<_, Error>(acc.max(self.net.sim.ready(p, l)?))
        })?;
        self.net.sim.put(p, out, f(&vals), ready)
    }

    /// Computation-phase message, sent in the first round the value is
    /// available (never before round 1).
    fn msg(&mut self, from: PartyId, src: &str, to: PartyId, dst: &str) -> Result<()> {
        let round = self.net.sim.ready(from, src)?.max(1);
        self.net
            .sim
            .forward(round, Phase::Computation, from, src, to, dst)
    }

    fn draw(&mut self, a: PartyId, b: PartyId, label: &str) -> Result<()> {
        self.net.draw(PartyPair::new(a, b), label).map(|_| ())
    }

    fn leak(
        &mut self,
        m: Mutation,
        from: PartyId,
        src: &str,
        to: PartyId,
        prefix: &str,
    ) -> Result<()> {
        if self.mutation == Some(m) {
            self.msg(from, src, to, &format!("{prefix}.leak"))?;
        }
        Ok(())
    }

    // ---- inspection --------------------------------------------------

    pub fn helper_state(&self, h: &ShareHandle) -> Result<HelperState> {
        Ok(self.record(h)?.helper.clone())
    }

    /// EVH's ciphertext of `h`.
    pub fn ciphertext(&self, h: &ShareHandle) -> Result<V> {
        self.val(Evh, &self.record(h)?.ct)
    }

    /// KH's key of `h`.
    pub fn key(&self, h: &ShareHandle) -> Result<V> {
        self.val(Kh, &self.record(h)?.key)
    }

    /// Labels of `h` at EVH and KH.
    pub fn labels(&self, h: &ShareHandle) -> Result<(String, String)> {
        let r = self.record(h)?;
        Ok((r.ct.clone(), r.key.clone()))
    }

    // ---- sharing and reveal ------------------------------------------

    /// The client encrypts `secret` with a key pre-shared with KH and sends
    /// the ciphertext to EVH. Returns the first slot.
    pub fn share_input(&mut self, var: &str, secret: V) -> Result<ShareHandle> {
        let held = format!("in.{var}");
        self.net.sim.hold_initial(Client, &held, secret)?;
        self.secrets.insert(var.to_string());
        self.client_slot(var, Slot::First)
    }

    /// A second encryption of an already shared input, created by the
    /// client; its key also goes to the helper.
    pub fn share_input_second(&mut self, var: &str) -> Result<ShareHandle> {
        if !self.secrets.contains(var) {
            return Err(Error::MissingInput(var.to_string()));
        }
        self.client_slot(var, Slot::Second)
    }

    fn client_slot(&mut self, var: &str, slot: Slot) -> Result<ShareHandle> {
        if self.live_count(var) >= 2 {
            return Err(Error::SlotBudget(var.to_string()));
        }
        let tag = match slot {
            Slot::First => 1,
            Slot::Second => 2,
        };
        let key = format!("in.{var}.{tag}/K");
        let ct = format!("in.{var}.{tag}/ct");
        self.draw(Client, Kh, &key)?;
        self.local(Client, &ct, &[&format!("in.{var}"), &key], |v| {
            v[0].xor(&v[1])
        })?;
        self.net
            .sim
            .forward(0, Phase::SecretSharing, Client, &ct, Evh, &ct)?;
        let helper_key = if slot == Slot::Second {
            self.net
                .sim
                .forward(0, Phase::SecretSharing, Client, &key, Helper, &key)?;
            Some(key.clone())
        } else {
            None
        };
        Ok(self.add_slot(SlotRecord {
            var: var.to_string(),
            slot,
            ct,
            key,
            helper_key,
            helper: HelperState::NotShared,
            live: true,
        }))
    }

    /// EVH and KH send their halves to the client, which decrypts.
    pub fn reveal(&mut self, h: &ShareHandle) -> Result<V> {
        let (ct, key) = self.labels(h)?;
        let p = self.open("reveal");
        let r_ct = self.net.sim.ready(Evh, &ct)?;
        let r_key = self.net.sim.ready(Kh, &key)?;
        let (c_label, k_label, out) = (format!("{p}.ct"), format!("{p}.K"), format!("{p}.out"));
        self.net
            .sim
            .forward(r_ct, Phase::Reveal, Evh, &ct, Client, &c_label)?;
        self.net
            .sim
            .forward(r_key, Phase::Reveal, Kh, &key, Client, &k_label)?;
        self.local(Client, &out, &[&c_label, &k_label], |v| v[0].xor(&v[1]))?;
        self.val(Client, &out)
    }

    // ---- local gates -------------------------------------------------

    /// EVH XORs ciphertexts, KH XORs keys. No communication.
    pub fn xor_gate(&mut self, x: &ShareHandle, y: &ShareHandle) -> Result<ShareHandle> {
        let (rx, ry) = (self.record(x)?.clone(), self.record(y)?.clone());
        self.scoped(|e| {
            let p = e.open("xor");
            let (ct, key) = (format!("{p}.ct"), format!("{p}.K"));
            e.local(Evh, &ct, &[&rx.ct, &ry.ct], |v| v[0].xor(&v[1]))?;
            e.local(Kh, &key, &[&rx.key, &ry.key], |v| v[0].xor(&v[1]))?;
            let (slot, helper_key) = match (&rx.helper_key, &ry.helper_key) {
                (Some(a), Some(b)) => {
                    let hk = format!("{p}.Kh");
                    e.local(Helper, &hk, &[a, b], |v| v[0].xor(&v[1]))?;
                    (Slot::Second, Some(hk))
                }
                _ => (Slot::First, None),
            };
            Ok(e.add_slot(SlotRecord {
                var: p,
                slot,
                ct,
                key,
                helper_key,
                helper: HelperState::NotShared,
                live: true,
            }))
        })
    }

    /// EVH flips its ciphertext; the key is unchanged. No communication.
    pub fn not_gate(&mut self, x: &ShareHandle) -> Result<ShareHandle> {
        let rx = self.record(x)?.clone();
        self.scoped(|e| {
            let p = e.open("not");
            let ct = format!("{p}.ct");
            e.local(Evh, &ct, &[&rx.ct], |v| v[0].not())?;
            Ok(e.add_slot(SlotRecord {
                var: p,
                slot: rx.slot,
                ct,
                key: rx.key,
                helper_key: rx.helper_key,
                helper: HelperState::NotShared,
                live: true,
            }))
        })
    }

    // ---- four-party AND ----------------------------------------------

    /// AND with two helpers: each helper computes one cross term, EVH
    /// combines the ciphertext parts and KH the key parts.
    pub fn and4(&mut self, x: &ShareHandle, y: &ShareHandle) -> Result<ShareHandle> {
        if x.id == y.id {
            return Err(aliasing(x));
        }
        let (rx, ry) = (self.record(x)?.clone(), self.record(y)?.clone());
        for r in [&rx, &ry] {
            if r.slot != Slot::First {
                return Err(Error::SlotOrientation {
                    var: r.var.clone(),
                    expected: Slot::First.to_string(),
                });
            }
        }
        self.scoped(|e| {
            let p = e.open("and4");
            let l = |s: &str| format!("{p}.{s}");
            e.msg(Evh, &rx.ct, Helper, &l("ENC_{Ka}(a)"))?;
            e.msg(Kh, &ry.key, Helper, &l("Kb"))?;
            e.msg(Evh, &ry.ct, Helper2, &l("ENC_{Kb}(b)"))?;
            e.msg(Kh, &rx.key, Helper2, &l("Ka"))?;
            e.draw(Helper, Kh, &l("K3"))?;
            e.draw(Helper2, Kh, &l("K4"))?;

            e.local(Helper, &l("t1"), &[&l("ENC_{Ka}(a)"), &l("Kb")], |v| {
                v[0].and(&v[1])
            })?;
            e.local(Helper, &l("ENC_{K3}(t1)"), &[&l("t1"), &l("K3")], |v| {
                v[0].xor(&v[1])
            })?;
            e.msg(Helper, &l("ENC_{K3}(t1)"), Evh, &l("ENC_{K3}(t1)"))?;
            e.local(Helper2, &l("t2"), &[&l("Ka"), &l("ENC_{Kb}(b)")], |v| {
                v[0].and(&v[1])
            })?;
            e.local(Helper2, &l("ENC_{K4}(t2)"), &[&l("t2"), &l("K4")], |v| {
                v[0].xor(&v[1])
            })?;
            e.msg(Helper2, &l("ENC_{K4}(t2)"), Evh, &l("ENC_{K4}(t2)"))?;
            e.leak(Mutation::And4KeyToEvh, Helper, &l("Kb"), Evh, &p)?;

            e.local(Evh, &l("t0"), &[&rx.ct, &ry.ct], |v| v[0].and(&v[1]))?;
            e.local(
                Evh,
                &l("ct"),
                &[&l("t0"), &l("ENC_{K3}(t1)"), &l("ENC_{K4}(t2)")],
                |v| v[0].xor(&v[1]).xor(&v[2]),
            )?;
            e.local(Kh, &l("t3"), &[&rx.key, &ry.key], |v| v[0].and(&v[1]))?;
            e.local(Kh, &l("K"), &[&l("t3"), &l("K3"), &l("K4")], |v| {
                v[0].xor(&v[1]).xor(&v[2])
            })?;
            Ok(e.add_slot(SlotRecord {
                var: p.clone(),
                slot: Slot::First,
                ct: l("ct"),
                key: l("K"),
                helper_key: None,
                helper: HelperState::NotShared,
                live: true,
            }))
        })
    }

    // ---- three-party AND building blocks -----------------------------

    fn check_operands(&self, x: &ShareHandle, y: &ShareHandle) -> Result<(SlotRecord, SlotRecord)> {
        if x.id == y.id {
            return Err(aliasing(x));
        }
        let (rx, ry) = (self.record(x)?.clone(), self.record(y)?.clone());
        if rx.slot != Slot::First {
            return Err(Error::SlotOrientation {
                var: rx.var,
                expected: Slot::First.to_string(),
            });
        }
        if ry.slot != Slot::Second || ry.helper_key.is_none() {
            return Err(Error::SlotOrientation {
                var: ry.var,
                expected: Slot::Second.to_string(),
            });
        }
        Ok((rx, ry))
    }

    /// EVH sends `ENC_{K_a}(a)` and KH sends `ENC_{K_6}(K_a)` to the helper.
    fn share_left(&mut self, x: &ShareHandle) -> Result<()> {
        let rx = self.record(x)?.clone();
        let p = self.open("left");
        let l = |s: &str| format!("{p}.{s}");
        self.draw(Kh, Evh, &l("K6"))?;
        self.local(Kh, &l("ENC_{K6}(Ka)"), &[&rx.key, &l("K6")], |v| {
            v[0].xor(&v[1])
        })?;
        self.msg(Evh, &rx.ct, Helper, &l("ENC_{Ka}(a)"))?;
        self.msg(Kh, &l("ENC_{K6}(Ka)"), Helper, &l("ENC_{K6}(Ka)"))?;
        self.leak(Mutation::MaskedKeyToEvh, Kh, &l("ENC_{K6}(Ka)"), Evh, &p)?;
        self.slots[x.id].helper = HelperState::SharedLeft(HelperShareLeft {
            enc_a: l("ENC_{Ka}(a)"),
            enc_key: l("ENC_{K6}(Ka)"),
            k6: l("K6"),
        });
        Ok(())
    }

    /// EVH double-encrypts `b` for KH; the helper sends KH the masked
    /// double key.
    fn share_right(&mut self, y: &ShareHandle) -> Result<()> {
        let ry = self.record(y)?.clone();
        let hk = ry.helper_key.clone().expect("checked by check_operands");
        let p = self.open("right");
        let l = |s: &str| format!("{p}.{s}");
        self.draw(Evh, Helper, &l("K2"))?;
        self.draw(Evh, Helper, &l("K5"))?;
        self.local(Evh, &l("ENC_{Kb^K2}(b)"), &[&ry.ct, &l("K2")], |v| {
            v[0].xor(&v[1])
        })?;
        self.msg(Evh, &l("ENC_{Kb^K2}(b)"), Kh, &l("ENC_{Kb^K2}(b)"))?;
        self.local(Helper, &l("Kb^K2"), &[&hk, &l("K2")], |v| v[0].xor(&v[1]))?;
        self.local(
            Helper,
            &l("ENC_{K5}(Kb^K2)"),
            &[&l("Kb^K2"), &l("K5")],
            |v| v[0].xor(&v[1]),
        )?;
        self.msg(Helper, &l("ENC_{K5}(Kb^K2)"), Kh, &l("ENC_{K5}(Kb^K2)"))?;
        self.leak(Mutation::K2ToKh, Evh, &l("K2"), Kh, &p)?;
        self.slots[y.id].helper = HelperState::SharedRight(HelperShareRight {
            k2: l("K2"),
            k5: l("K5"),
            masked_key: l("Kb^K2"),
            evh_double: l("ENC_{Kb^K2}(b)"),
            kh_double: l("ENC_{Kb^K2}(b)"),
            kh_enc_key: l("ENC_{K5}(Kb^K2)"),
        });
        Ok(())
    }

    /// The one-bit step shared by all three-party AND variants: the helper
    /// returns `ENC_{K_7}(t_4)` to EVH, EVH and KH finish locally.
    fn combine(&mut self, x: &ShareHandle, y: &ShareHandle) -> Result<(ShareHandle, String)> {
        let (rx, ry) = (self.record(x)?.clone(), self.record(y)?.clone());
        let HelperState::SharedLeft(left) = rx.helper else {
            return Err(Error::NotResident(format!(
                "`{}` is not shared as left operand",
                rx.var
            )));
        };
        let HelperState::SharedRight(right) = ry.helper else {
            return Err(Error::NotResident(format!(
                "`{}` is not shared as right operand",
                ry.var
            )));
        };
        let p = self.open("and");
        let l = |s: &str| format!("{p}.{s}");
        self.local(
            Helper,
            &l("t4"),
            &[&left.enc_a, &left.enc_key, &right.masked_key],
            |v| v[0].and(&v[2]).xor(&v[1].and(&v[2])),
        )?;
        self.draw(Kh, Helper, &l("K7"))?;
        self.local(Helper, &l("ENC_{K7}(t4)"), &[&l("t4"), &l("K7")], |v| {
            v[0].xor(&v[1])
        })?;
        self.msg(Helper, &l("ENC_{K7}(t4)"), Evh, &l("ENC_{K7}(t4)"))?;
        self.draw(Evh, Kh, &l("K8"))?;

        self.local(Evh, &l("t0"), &[&rx.ct, &right.evh_double], |v| {
            v[0].and(&v[1])
        })?;
        self.local(
            Evh,
            &l("ct"),
            &[&l("t0"), &right.k5, &left.k6, &l("ENC_{K7}(t4)"), &l("K8")],
            |v| v[0].xor(&v[1].and(&v[2])).xor(&v[3]).xor(&v[4]),
        )?;
        self.local(Kh, &l("t2"), &[&rx.key, &right.kh_double], |v| {
            v[0].and(&v[1])
        })?;
        self.local(Kh, &l("t3"), &[&left.k6, &right.kh_enc_key], |v| {
            v[0].and(&v[1])
        })?;
        self.local(
            Kh,
            &l("K"),
            &[&l("t2"), &l("t3"), &l("K7"), &l("K8")],
            |v| v[0].xor(&v[1]).xor(&v[2]).xor(&v[3]),
        )?;
        let h = self.add_slot(SlotRecord {
            var: p.clone(),
            slot: Slot::First,
            ct: l("ct"),
            key: l("K"),
            helper_key: None,
            helper: HelperState::NotShared,
            live: true,
        });
        Ok((h, p))
    }

    fn and3_inner(&mut self, x: &ShareHandle, y: &ShareHandle) -> Result<(ShareHandle, String)> {
        let (rx, ry) = self.check_operands(x, y)?;
        if rx.helper == HelperState::NotShared {
            self.share_left(x)?;
        }
        if ry.helper == HelperState::NotShared {
            self.share_right(y)?;
        }
        self.combine(x, y)
    }

    // ---- three-party AND variants ------------------------------------

    /// Three-party AND. Operands not yet resident at the helper are shared
    /// first (2 bits each); the combine step costs 1 bit.
    pub fn and3(&mut self, x: &ShareHandle, y: &ShareHandle) -> Result<ShareHandle> {
        self.scoped(|e| e.and3_inner(x, y).map(|(h, _)| h))
    }

    /// Both operands already resident: only `ENC_{K_7'}(t_4)` is sent.
    pub fn and3_reuse_both(&mut self, x: &ShareHandle, y: &ShareHandle) -> Result<ShareHandle> {
        let (rx, ry) = self.check_operands(x, y)?;
        require_left(&rx)?;
        require_right(&ry)?;
        self.scoped(|e| {
            let (h, p) = e.combine(x, y)?;
            e.leak(Mutation::ReuseBothK7ToEvh, Kh, &format!("{p}.K7"), Evh, &p)?;
            Ok(h)
        })
    }

    /// Left operand already resident; the right one is shared now.
    pub fn and3_reuse_left(&mut self, x: &ShareHandle, y: &ShareHandle) -> Result<ShareHandle> {
        let (rx, _) = self.check_operands(x, y)?;
        require_left(&rx)?;
        let HelperState::SharedLeft(left) = rx.helper else {
            unreachable!("checked by require_left")
        };
        self.scoped(|e| {
            let (h, p) = e.and3_inner(x, y)?;
            e.leak(Mutation::ReuseLeftK6ToHelper, Kh, &left.k6, Helper, &p)?;
            Ok(h)
        })
    }

    /// Left operand resident; the right operand's resident share is
    /// re-encrypted under a fresh key `K_b'` (1 bit) and reused, then
    /// combined (1 bit). The old encryption of `y` is retired; the handle
    /// `y` names the new one afterwards.
    pub fn and3_reuse_reencrypt(
        &mut self,
        x: &ShareHandle,
        y: &ShareHandle,
    ) -> Result<ShareHandle> {
        let (rx, ry) = self.check_operands(x, y)?;
        require_left(&rx)?;
        require_right(&ry)?;
        let HelperState::SharedRight(right) = ry.helper.clone() else {
            unreachable!("checked by require_right")
        };
        self.scoped(|e| {
            let p = e.open("reenc");
            let l = |s: &str| format!("{p}.{s}");
            e.draw(Kh, Helper, &l("Kb'"))?;
            e.local(Kh, &l("ENC_{Kb'}(Kb)"), &[&ry.key, &l("Kb'")], |v| {
                v[0].xor(&v[1])
            })?;
            e.msg(Kh, &l("ENC_{Kb'}(Kb)"), Evh, &l("ENC_{Kb'}(Kb)"))?;
            e.local(Evh, &l("ct"), &[&ry.ct, &l("ENC_{Kb'}(Kb)")], |v| {
                v[0].xor(&v[1])
            })?;
            e.local(Evh, &l("ENC_{Kb'^K2}(b)"), &[&l("ct"), &right.k2], |v| {
                v[0].xor(&v[1])
            })?;
            e.local(
                Kh,
                &l("ENC_{Kb'^K2}(b)"),
                &[&right.kh_double, &ry.key, &l("Kb'")],
                |v| v[0].xor(&v[1]).xor(&v[2]),
            )?;
            e.local(
                Kh,
                &l("ENC_{K5}(Kb'^K2)"),
                &[&right.kh_enc_key, &ry.key, &l("Kb'")],
                |v| v[0].xor(&v[1]).xor(&v[2]),
            )?;
            e.local(Helper, &l("Kb'^K2"), &[&l("Kb'"), &right.k2], |v| {
                v[0].xor(&v[1])
            })?;
            e.leak(Mutation::ReencryptCtToHelper, Evh, &l("ct"), Helper, &p)?;

            let rec = &mut e.slots[y.id];
            rec.ct = l("ct");
            rec.key = l("Kb'");
            rec.helper_key = Some(l("Kb'"));
            rec.helper = HelperState::SharedRight(HelperShareRight {
                k2: right.k2.clone(),
                k5: right.k5.clone(),
                masked_key: l("Kb'^K2"),
                evh_double: l("ENC_{Kb'^K2}(b)"),
                kh_double: l("ENC_{Kb'^K2}(b)"),
                kh_enc_key: l("ENC_{K5}(Kb'^K2)"),
            });
            e.combine(x, y).map(|(h, _)| h)
        })
    }

    /// KH picks `K'` (shared with the helper) and sends `ENC_{K'}(K_x)` to
    /// EVH, which re-keys its ciphertext. Returns a new second slot.
    pub fn reencrypt(&mut self, x: &ShareHandle) -> Result<ShareHandle> {
        let rx = self.record(x)?.clone();
        if self.live_count(&rx.var) >= 2 {
            return Err(Error::SlotBudget(rx.var));
        }
        self.scoped(|e| {
            let p = e.open("reenc");
            let l = |s: &str| format!("{p}.{s}");
            e.draw(Kh, Helper, &l("K'"))?;
            e.local(Kh, &l("ENC_{K'}(Kx)"), &[&rx.key, &l("K'")], |v| {
                v[0].xor(&v[1])
            })?;
            e.msg(Kh, &l("ENC_{K'}(Kx)"), Evh, &l("ENC_{K'}(Kx)"))?;
            e.local(Evh, &l("ct"), &[&rx.ct, &l("ENC_{K'}(Kx)")], |v| {
                v[0].xor(&v[1])
            })?;
            Ok(e.add_slot(SlotRecord {
                var: rx.var.clone(),
                slot: Slot::Second,
                ct: l("ct"),
                key: l("K'"),
                helper_key: Some(l("K'")),
                helper: HelperState::NotShared,
                live: true,
            }))
        })
    }

    /// AND of `w` operands in one gate. Each of the `2^w` subsets `S` gives
    /// a term `(AND of ciphertexts in S) & (AND of keys outside S)`; EVH and
    /// KH compute the two factors locally, re-share them as fresh secrets
    /// (EVH's factor as a first slot, KH's as a second slot, 1 bit) and AND
    /// them with the three-party protocol. All terms run in parallel.
    pub fn fanin_and(&mut self, xs: &[ShareHandle]) -> Result<ShareHandle> {
        let w = xs.len();
        if w == 0 {
            return Err(Error::EmptyGate);
        }
        if w > self.w_max {
            return Err(Error::FanInBudget { w, max: self.w_max });
        }
        let recs = xs
            .iter()
            .map(|x| self.record(x).cloned())
            .collect::<Result<Vec<_>>>()?;
        if w == 1 {
            return Ok(xs[0].clone());
        }
        self.scoped(|e| {
            let p = e.open("fanin");
            let mut outs = Vec::with_capacity(fanin_terms(w));
            for s in 0..fanin_terms(w) {
                let pt = format!("{p}.{s}");
                let l = |n: &str| format!("{pt}.{n}");
                let in_s: Vec<&str> = (0..w)
                    .filter(|j| s >> j & 1 == 1)
                    .map(|j| recs[j].ct.as_str())
                    .collect();
                let out_s: Vec<&str> = (0..w)
                    .filter(|j| s >> j & 1 == 0)
                    .map(|j| recs[j].key.as_str())
                    .collect();
                e.local(Evh, &l("tE"), &in_s, and_all)?;
                e.local(Kh, &l("tK"), &out_s, and_all)?;

                e.draw(Evh, Kh, &l("K_tE"))?;
                e.local(Evh, &l("ENC(tE)"), &[&l("tE"), &l("K_tE")], |v| {
                    v[0].xor(&v[1])
                })?;
                let te = e.add_slot(SlotRecord {
                    var: l("tE"),
                    slot: Slot::First,
                    ct: l("ENC(tE)"),
                    key: l("K_tE"),
                    helper_key: None,
                    helper: HelperState::NotShared,
                    live: true,
                });

                e.draw(Kh, Helper, &l("K_tK"))?;
                e.local(Kh, &l("ENC(tK)"), &[&l("tK"), &l("K_tK")], |v| {
                    v[0].xor(&v[1])
                })?;
                e.msg(Kh, &l("ENC(tK)"), Evh, &l("ENC(tK)"))?;
                if s == 0 {
                    e.leak(Mutation::FaninKeyToEvh, Kh, &l("K_tK"), Evh, &pt)?;
                }
                let tk = e.add_slot(SlotRecord {
                    var: l("tK"),
                    slot: Slot::Second,
                    ct: l("ENC(tK)"),
                    key: l("K_tK"),
                    helper_key: Some(l("K_tK")),
                    helper: HelperState::NotShared,
                    live: true,
                });

                let (term, _) = e.and3_inner(&te, &tk)?;
                e.slots[te.id].live = false;
                e.slots[tk.id].live = false;
                outs.push(e.record(&term)?.clone());
                e.slots[term.id].live = false;
            }
            let cts: Vec<&str> = outs.iter().map(|r| r.ct.as_str()).collect();
            let keys: Vec<&str> = outs.iter().map(|r| r.key.as_str()).collect();
            let (ct, key) = (format!("{p}.ct"), format!("{p}.K"));
            e.local(Evh, &ct, &cts, xor_all)?;
            e.local(Kh, &key, &keys, xor_all)?;
            Ok(e.add_slot(SlotRecord {
                var: p,
                slot: Slot::First,
                ct,
                key,
                helper_key: None,
                helper: HelperState::NotShared,
                live: true,
            }))
        })
    }
}

fn and_all<V: BitValue>(v: &[V]) -> V {
    v.iter().fold(V::constant(true), |acc, x| acc.and(x))
}

fn xor_all<V: BitValue>(v: &[V]) -> V {
    v.iter().fold(V::constant(false), |acc, x| acc.xor(x))
}

fn aliasing(x: &ShareHandle) -> Error {
    Error::OperandAliasing {
        var: x.var.clone(),
        slot: x.slot.to_string(),
    }
}

fn require_left(r: &SlotRecord) -> Result<()> {
    match r.helper {
        HelperState::SharedLeft(_) => Ok(()),
        _ => Err(Error::NotResident(format!(
            "`{}` is not shared as left operand",
            r.var
        ))),
    }
}

fn require_right(r: &SlotRecord) -> Result<()> {
    match r.helper {
        HelperState::SharedRight(_) => Ok(()),
        _ => Err(Error::NotResident(format!(
            "`{}` is not shared as right operand",
            r.var
        ))),
    }
}

/// Runs `f` on a fresh engine and returns its result with the transcript.
pub fn run<V, T>(
    keys: &mut dyn KeySource<V>,
    mutation: Option<Mutation>,
    w_max: usize,
    f: impl FnOnce(&mut Engine<'_, V>) -> Result<T>,
) -> Result<(T, Transcript<V>)>
where
    V: BitValue,
{
    let mut engine = Engine::new(keys).with_mutation(mutation).with_w_max(w_max);
    let out = f(&mut engine)?;
    Ok((out, engine.finish()))
}
