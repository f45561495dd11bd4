//! Bit-level XOR encryption, additive encryption over exact rationals and the
//! pairwise pre-shared randomness every protocol draws its keys from.
//!
//! A secret bit `m` is split into a ciphertext `m ^ K` and a key `K`. The
//! keyholder only ever stores keys, the encrypted-value holder only
//! ciphertexts. Keys drawn from a [`RandomTape`] are known to both parties of
//! the tape without any message being sent.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{BitAnd, BitXor, Not};

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_rational::BigRational;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netsim::{PartyId, Payload};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// A single bit.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Bit(pub bool);

impl Bit {
    pub const ZERO: Bit = Bit(false);
    pub const ONE: Bit = Bit(true);

    pub fn as_bool(self) -> bool {
        self.0
    }

    pub fn as_u8(self) -> u8 {
        self.0 as u8
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        Bit(b)
    }
}

impl TryFrom<u8> for Bit {
    type Error = u8;

    fn try_from(v: u8) -> std::result::Result<Self, u8> {
        match v {
            0 => Ok(Bit::ZERO),
            1 => Ok(Bit::ONE),
            other => Err(other),
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl BitXor for Bit {
    type Output = Bit;
    fn bitxor(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

impl BitAnd for Bit {
    type Output = Bit;
    fn bitand(self, rhs: Bit) -> Bit {
        Bit(self.0 & rhs.0)
    }
}

impl Not for Bit {
    type Output = Bit;
    fn not(self) -> Bit {
        Bit(!self.0)
    }
}

/// Algebra the Boolean protocols are written against.
///
/// Protocols are generic over it so the same code runs on concrete bits (for
/// execution and brute-force enumeration) and on symbolic polynomials (for the
/// exact secrecy and correctness audits).
pub trait BitValue: Payload + PartialEq {
    fn constant(bit: bool) -> Self;
    fn xor(&self, rhs: &Self) -> Self;
    fn and(&self, rhs: &Self) -> Self;

    fn not(&self) -> Self {
        self.xor(&Self::constant(true))
    }
}

impl BitValue for Bit {
    fn constant(bit: bool) -> Self {
        Bit(bit)
    }

    fn xor(&self, rhs: &Self) -> Self {
        *self ^ *rhs
    }

    fn and(&self, rhs: &Self) -> Self {
        *self & *rhs
    }
}

/// A XOR ciphertext together with the name of the key that produced it.
///
/// The label is bookkeeping for tests and audits; it is never transmitted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ciphertext {
    pub value: Bit,
    pub key_label: String,
}

/// `ENC_K(m) = m ^ K`.
pub fn xor_encrypt(m: Bit, k: Bit) -> Bit {
    m ^ k
}

/// Same as [`xor_encrypt`], keeping the key's name attached.
pub fn xor_encrypt_labeled(m: Bit, k: Bit, key_label: impl Into<String>) -> Ciphertext {
    Ciphertext {
        value: xor_encrypt(m, k),
        key_label: key_label.into(),
    }
}

/// `DEC_K(c) = c ^ K`.
pub fn xor_decrypt(c: &Ciphertext, k: Bit) -> Bit {
    c.value ^ k
}

/// Additive blinding without modulus: `x + k`.
pub fn add_encrypt(x: &Rat, k: &Rat) -> Rat {
    x + k
}

pub fn add_decrypt(c: &Rat, k: &Rat) -> Rat {
    c - k
}

/// An unordered pair of parties sharing a tape. A pair of a party with
/// itself is that party's private randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartyPair(PartyId, PartyId);

impl PartyPair {
    pub fn new(a: PartyId, b: PartyId) -> Self {
        if a <= b {
            PartyPair(a, b)
        } else {
            PartyPair(b, a)
        }
    }

    pub fn private(p: PartyId) -> Self {
        PartyPair(p, p)
    }

    pub fn parties(self) -> (PartyId, PartyId) {
        (self.0, self.1)
    }

    pub fn is_private(self) -> bool {
        self.0 == self.1
    }

    pub fn contains(self, p: PartyId) -> bool {
        self.0 == p || self.1 == p
    }

    fn code(self) -> u64 {
        (self.0.index() * PartyId::ALL.len() + self.1.index()) as u64
    }

    /// Every pair (and private tape) over the five roles.
    pub fn all() -> Vec<PartyPair> {
        let mut out = Vec::new();
        for (i, &a) in PartyId::ALL.iter().enumerate() {
            for &b in &PartyId::ALL[i..] {
                out.push(PartyPair::new(a, b));
            }
        }
        out
    }
}

impl fmt::Display for PartyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// Deterministic keyed stream of key material shared by one pair of parties.
///
/// The draw at position `counter` depends only on `(seed, pair, counter)`,
/// so replaying a tape reproduces it bit for bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomTape {
    pair: PartyPair,
    seed: [u8; 32],
    counter: u64,
}

impl RandomTape {
    pub fn new(pair: PartyPair, seed: [u8; 32]) -> Self {
        RandomTape {
            pair,
            seed,
            counter: 0,
        }
    }

    pub fn pair(&self) -> PartyPair {
        self.pair
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Moves the tape to an absolute position.
    pub fn seek(&mut self, counter: u64) {
        self.counter = counter;
    }

    fn stream(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::from_seed(self.seed);
        // 6 bits of pair code, 58 bits of counter.
        rng.set_stream((self.pair.code() << 58) | (self.counter & ((1 << 58) - 1)));
        rng
    }

    pub fn draw_key_bit(&mut self) -> Bit {
        let bit = Bit(self.stream().next_u32() & 1 == 1);
        self.counter += 1;
        bit
    }

    /// Uniform integer in `[0, range)`.
    pub fn draw_key_int(&mut self, range: &BigUint) -> Result<Rat> {
        if range == &BigUint::from(0u8) {
            return Err(Error::EmptyKeyRange);
        }
        let v = self.stream().gen_biguint_below(range);
        self.counter += 1;
        Ok(Rat::from_integer(BigInt::from(v)))
    }
}

/// Source of key bits for the Boolean protocols.
///
/// The label names the key being drawn (`"g1/K7"`); concrete tapes ignore it,
/// symbolic sources use it to name variables.
pub trait KeySource<B> {
    fn draw(&mut self, pair: PartyPair, label: &str) -> B;
}

/// Source of integer keys for the additive protocols.
pub trait IntKeySource {
    fn draw_int(&mut self, pair: PartyPair, label: &str, range: &BigUint) -> Result<Rat>;
}

/// One tape per pair of parties, all derived from one seed.
#[derive(Debug, Clone)]
pub struct TapeSet {
    tapes: BTreeMap<PartyPair, RandomTape>,
}

impl TapeSet {
    pub fn new(seed: [u8; 32]) -> Self {
        let tapes = PartyPair::all()
            .into_iter()
            .map(|pair| (pair, RandomTape::new(pair, seed)))
            .collect();
        TapeSet { tapes }
    }

    /// Seeds from a `u64`, little-endian in the first eight bytes.
    pub fn from_u64(seed: u64) -> Self {
        let mut bytes = [0u8; 32];
        bytes[..8].copy_from_slice(&seed.to_le_bytes());
        Self::new(bytes)
    }

    pub fn tape(&mut self, pair: PartyPair) -> &mut RandomTape {
        self.tapes
            .get_mut(&pair)
            .expect("tape set covers every pair")
    }

    /// Total number of draws so far across all tapes.
    pub fn draws(&self) -> u64 {
        self.tapes.values().map(RandomTape::counter).sum()
    }
}

impl KeySource<Bit> for TapeSet {
    fn draw(&mut self, pair: PartyPair, _label: &str) -> Bit {
        self.tape(pair).draw_key_bit()
    }
}

impl IntKeySource for TapeSet {
    fn draw_int(&mut self, pair: PartyPair, _label: &str, range: &BigUint) -> Result<Rat> {
        self.tape(pair).draw_key_int(range)
    }
}

/// Parses a hex seed of up to 64 digits (right-aligned into 32 bytes).
pub fn parse_seed(hex_seed: &str) -> std::result::Result<[u8; 32], String> {
    let s = hex_seed.trim_start_matches("0x");
    if s.is_empty() || s.len() > 64 {
        return Err(format!("seed must have 1..=64 hex digits, got {}", s.len()));
    }
    let padded = format!("{s:0>64}");
    let bytes = hex::decode(padded).map_err(|e| e.to_string())?;
    let mut out = [0u8; 32];
    out.copy_from_slice(&bytes);
    Ok(out)
}
