//! Boolean functions in algebraic normal form (XOR of AND-monomials).
//!
//! Running a protocol over [`Anf`] instead of concrete bits yields every held
//! and transmitted value as a polynomial in the secret and tape variables.
//! Two polynomials are equal iff they agree on all assignments, which is what
//! lets the audits reason about all tape assignments at once.

use std::collections::BTreeSet;
use std::fmt;

use crate::netsim::Payload;
use crate::sharing::BitValue;

/// Upper bound on distinct variables in one symbolic run.
pub const MAX_VARS: usize = 256;

/// A set of variables, used both as a monomial and as an assignment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarSet([u64; MAX_VARS / 64]);

impl VarSet {
    pub fn empty() -> Self {
        VarSet::default()
    }

    pub fn single(var: usize) -> Self {
        let mut s = VarSet::default();
        s.insert(var);
        s
    }

    pub fn insert(&mut self, var: usize) {
        assert!(var < MAX_VARS, "variable {var} out of range");
        self.0[var / 64] |= 1 << (var % 64);
    }

    pub fn contains(&self, var: usize) -> bool {
        var < MAX_VARS && self.0[var / 64] & (1 << (var % 64)) != 0
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0) {
            *a |= b;
        }
        out
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.0.iter().zip(other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    i * 64 + b
                })
            })
        })
    }
}

/// XOR of monomials; the empty monomial is the constant 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Anf {
    terms: BTreeSet<VarSet>,
}

impl Anf {
    pub fn zero() -> Self {
        Anf::default()
    }

    pub fn one() -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(VarSet::empty());
        Anf { terms }
    }

    pub fn var(v: usize) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(VarSet::single(v));
        Anf { terms }
    }

    fn toggle(terms: &mut BTreeSet<VarSet>, m: VarSet) {
        if !terms.remove(&m) {
            terms.insert(m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &VarSet> {
        self.terms.iter()
    }

    pub fn is_constant(&self) -> Option<bool> {
        match self.terms.len() {
            0 => Some(false),
            1 if self.terms.contains(&VarSet::empty()) => Some(true),
            _ => None,
        }
    }

    /// Variables the function syntactically depends on.
    pub fn support(&self) -> VarSet {
        self.terms
            .iter()
            .fold(VarSet::empty(), |acc, m| acc.union(m))
    }

    pub fn eval(&self, assignment: &VarSet) -> bool {
        self.terms
            .iter()
            .filter(|m| m.is_subset(assignment))
            .count()
            % 2
            == 1
    }

    /// Fixes the variables in `fixed` to the values in `values`; the others
    /// stay symbolic.
    pub fn restrict(&self, fixed: &VarSet, values: &VarSet) -> Anf {
        let mut terms = BTreeSet::new();
        'outer: for m in &self.terms {
            let mut rest = *m;
            for v in m.iter() {
                if fixed.contains(v) {
                    if !values.contains(v) {
                        continue 'outer;
                    }
                    rest.0[v / 64] &= !(1 << (v % 64));
                }
            }
            Self::toggle(&mut terms, rest);
        }
        Anf { terms }
    }
}

impl BitValue for Anf {
    fn constant(bit: bool) -> Self {
        if bit {
            Anf::one()
        } else {
            Anf::zero()
        }
    }

    fn xor(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        for m in &rhs.terms {
            Self::toggle(&mut terms, *m);
        }
        Anf { terms }
    }

    fn and(&self, rhs: &Self) -> Self {
        let mut terms = BTreeSet::new();
        for a in &self.terms {
            for b in &rhs.terms {
                Self::toggle(&mut terms, a.union(b));
            }
        }
        Anf { terms }
    }
}

impl fmt::Display for Anf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|m| {
                if m.is_empty() {
                    "1".to_string()
                } else {
                    m.iter()
                        .map(|v| format!("x{v}"))
                        .collect::<Vec<_>>()
                        .join("*")
                }
            })
            .collect();
        f.write_str(&rendered.join("+"))
    }
}

impl Payload for Anf {
    fn bit_len(&self) -> usize {
        1
    }

    fn render(&self) -> String {
        self.to_string()
    }
}
