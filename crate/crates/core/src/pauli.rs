//! Phase-free N-qubit Pauli operators in binary symplectic form.
//!
//! A qubit carries `X` when only its x bit is set, `Z` when only its z bit is
//! set and `Y` when both are. Composition is a bitwise XOR and two operators
//! commute iff their symplectic inner product vanishes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::code::CodeLayout;
use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// The three non-identity letters in the fixed tie-break order.
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    #[inline]
    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    #[inline]
    pub fn anticommutes(self, other: Pauli) -> bool {
        (self.x_bit() & other.z_bit()) ^ (self.z_bit() & other.x_bit())
    }

    /// Product up to phase.
    #[inline]
    pub fn compose(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.x_bit() ^ other.x_bit(), self.z_bit() ^ other.z_bit())
    }

    /// The non-identity letter different from both `a` and `b` (which must be
    /// distinct non-identity letters).
    pub fn third(a: Pauli, b: Pauli) -> Pauli {
        a.compose(b)
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | '_' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// N-qubit Pauli operator, phase ignored.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliOperator { n, x: vec![0; w], z: vec![0; w] }
    }

    /// Operator acting as `letter` on each listed qubit.
    pub fn from_sparse(n: usize, terms: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let mut op = Self::identity(n);
        for (q, p) in terms {
            op.apply(q, p);
        }
        op
    }

    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Self {
        Self::from_sparse(n, [(qubit, letter)])
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, q: usize) -> Pauli {
        debug_assert!(q < self.n);
        let (w, b) = (q / WORD, q % WORD);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    /// Overwrite the letter on qubit `q`.
    pub fn set(&mut self, q: usize, p: Pauli) {
        let (w, b) = (q / WORD, q % WORD);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | ((p.x_bit() as u64) << b);
        self.z[w] = (self.z[w] & !mask) | ((p.z_bit() as u64) << b);
    }

    /// Multiply qubit `q` by `p` (XOR).
    #[inline]
    pub fn apply(&mut self, q: usize, p: Pauli) {
        debug_assert!(q < self.n);
        let (w, b) = (q / WORD, q % WORD);
        self.x[w] ^= (p.x_bit() as u64) << b;
        self.z[w] ^= (p.z_bit() as u64) << b;
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    /// Qubits on which the operator is not the identity, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli::I).collect()
    }

    pub fn compose_in_place(&mut self, other: &PauliOperator) -> Result<()> {
        self.check_len(other)?;
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn compose(&self, other: &PauliOperator) -> Result<PauliOperator> {
        let mut out = self.clone();
        out.compose_in_place(other)?;
        Ok(out)
    }

    /// Symplectic inner product, `true` when the operators anticommute.
    pub fn anticommutes(&self, other: &PauliOperator) -> Result<bool> {
        self.check_len(other)?;
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        Ok(acc & 1 == 1)
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        self.anticommutes(other).map(|a| !a)
    }

    fn check_len(&self, other: &PauliOperator) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<Pauli> = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::Parse(format!("bad Pauli letter {c:?}"))))
            .collect::<Result<_>>()?;
        Ok(PauliOperator::from_sparse(letters.len(), letters.into_iter().enumerate()))
    }
}

/// Stabilizer measurement outcomes, one bit per stabilizer id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Syndrome {
    bits: Vec<bool>,
}

impl Syndrome {
    pub fn zeros(n: usize) -> Self {
        Syndrome { bits: vec![false; n] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Syndrome { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    pub fn defects(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn xor(&self, other: &Syndrome) -> Syndrome {
        Syndrome {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
        }
    }
}

/// Logical operator pair of a code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalPair {
    pub xbar: PauliOperator,
    pub zbar: PauliOperator,
}

/// Logical action of a residual operator that commutes with every stabilizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalClass {
    None,
    XbarFlip,
    ZbarFlip,
    YbarFlip,
}

impl LogicalClass {
    pub fn is_failure(self) -> bool {
        self != LogicalClass::None
    }
}

/// Measure every stabilizer of `code` against `error`.
pub fn extract_syndrome(error: &PauliOperator, code: &CodeLayout) -> Result<Syndrome> {
    let n = code.num_qubits();
    if error.num_qubits() != n {
        return Err(Error::LengthMismatch { left: error.num_qubits(), right: n });
    }
    let bits = (0..code.num_stabilizers())
        .map(|s| {
            code.incidences(s)
                .fold(false, |acc, (q, letter)| acc ^ error.get(q).anticommutes(letter))
        })
        .collect();
    Ok(Syndrome { bits })
}

/// Classify the logical action of `residual`.
pub fn is_logical_failure(
    residual: &PauliOperator,
    logicals: &LogicalPair,
    code: &CodeLayout,
) -> Result<LogicalClass> {
    if !extract_syndrome(residual, code)?.is_trivial() {
        return Err(Error::NonTrivialSyndrome);
    }
    Ok(classify(residual, logicals)?)
}

/// Classification without the syndrome check; `residual` must already commute
/// with the stabilizers.
pub fn classify(residual: &PauliOperator, logicals: &LogicalPair) -> Result<LogicalClass> {
    let flips_x = residual.anticommutes(&logicals.zbar)?;
    let flips_z = residual.anticommutes(&logicals.xbar)?;
    Ok(match (flips_x, flips_z) {
        (false, false) => LogicalClass::None,
        (true, false) => LogicalClass::XbarFlip,
        (false, true) => LogicalClass::ZbarFlip,
        (true, true) => LogicalClass::YbarFlip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_pairs() {
        let x0 = PauliOperator::single(2, 0, Pauli::X);
        let z0 = PauliOperator::single(2, 0, Pauli::Z);
        let z1 = PauliOperator::single(2, 1, Pauli::Z);
        assert!(!x0.commutes(&z0).unwrap());
        assert!(x0.commutes(&z1).unwrap());
        let xz: PauliOperator = "XZ".parse().unwrap();
        let zx: PauliOperator = "ZX".parse().unwrap();
        assert!(xz.commutes(&zx).unwrap());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let a = PauliOperator::identity(3);
        let b = PauliOperator::identity(4);
        assert!(matches!(a.commutes(&b), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn text_round_trip() {
        let s = "IXZYIIXYZ";
        let op: PauliOperator = s.parse().unwrap();
        assert_eq!(op.to_string(), s);
        assert_eq!(op.weight(), 6);
        assert!("IXQ".parse::<PauliOperator>().is_err());
    }

    #[test]
    fn letter_table() {
        for a in Pauli::NON_IDENTITY {
            for b in Pauli::NON_IDENTITY {
                assert_eq!(a.anticommutes(b), a != b);
            }
            assert!(!a.anticommutes(Pauli::I));
        }
        assert_eq!(Pauli::third(Pauli::X, Pauli::Z), Pauli::Y);
        assert_eq!(Pauli::third(Pauli::Y, Pauli::Z), Pauli::X);
    }

    fn arb_op(n: usize) -> impl Strategy<Value = PauliOperator> {
        prop::collection::vec(0u8..4, n).prop_map(move |v| {
            PauliOperator::from_sparse(
                n,
                v.into_iter().enumerate().map(|(i, k)| (i, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k as usize])),
            )
        })
    }

    proptest! {
        #[test]
        fn symplectic_product_matches_letterwise_count(a in arb_op(130), b in arb_op(130)) {
            let count = (0..130).filter(|&q| a.get(q).anticommutes(b.get(q))).count();
            prop_assert_eq!(a.anticommutes(&b).unwrap(), count % 2 == 1);
        }

        #[test]
        fn composition_is_an_involution(a in arb_op(70), b in arb_op(70)) {
            let ab = a.compose(&b).unwrap();
            prop_assert_eq!(ab.compose(&b).unwrap(), a.clone());
            prop_assert_eq!(PauliOperator::from_str(&ab.to_string()).unwrap(), ab);
        }
    }
}
