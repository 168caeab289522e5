//! Arithmetic over GF(2^m) with log/antilog tables.
//!
//! Symbols use the polynomial basis fixed by the primitive polynomial: bit `i`
//! of the integer value is the coefficient of `alpha^i`. With `x^3 + x + 1`,
//! `alpha^3` is `0b011`, which prints as the bit tuple `(1,1,0)` when the
//! constant term is listed first.

use std::fmt;
use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};

/// Default primitive polynomial for GF(2^8): x^8 + x^4 + x^3 + x^2 + 1.
pub const GF256_POLY: u32 = 0x11d;

/// A field element in polynomial representation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u16);

impl Symbol {
    pub const ZERO: Symbol = Symbol(0);
    pub const ONE: Symbol = Symbol(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Field addition is XOR in characteristic two and needs no tables.
impl Add for Symbol {
    type Output = Symbol;

    #[inline]
    fn add(self, rhs: Symbol) -> Symbol {
        Symbol(self.0 ^ rhs.0)
    }
}

impl AddAssign for Symbol {
    #[inline]
    fn add_assign(&mut self, rhs: Symbol) {
        self.0 ^= rhs.0;
    }
}

/// GF(2^m) defined by a primitive polynomial, with precomputed tables.
#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    m: u32,
    poly: u32,
    /// `exp[i] = alpha^i` for `i < 2(q-1)` so products skip the modulo.
    exp: Vec<u16>,
    /// `log[s]` for nonzero `s`; `log[0]` is unused.
    log: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("m", &self.m)
            .field("poly", &format_args!("{:#x}", self.poly))
            .finish()
    }
}

impl Field {
    /// Builds GF(2^m) from `poly`, given as a bit mask including the `x^m` term.
    pub fn new(m: u32, poly: u32) -> Result<Field> {
        if !(2..=16).contains(&m) {
            return Err(Error::BadFieldDegree(m));
        }
        if poly >> m != 1 {
            return Err(Error::PolynomialDegree { poly, m });
        }
        let q = 1usize << m;
        let order = q - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; q];
        let mut x: u32 = 1;
        for i in 0..order {
            if i > 0 && x == 1 {
                return Err(Error::NonPrimitivePolynomial { poly, order: i });
            }
            exp[i] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            // alpha^(q-1) must close the cycle; anything else means the powers
            // wandered into a sub-cycle that never returned to 1.
            return Err(Error::NonPrimitivePolynomial { poly, order: 0 });
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Field { m, poly, exp, log })
    }

    /// GF(256) with [`GF256_POLY`].
    pub fn gf256() -> Field {
        Field::new(8, GF256_POLY).expect("default polynomial is primitive")
    }

    /// Extension degree, i.e. bits per symbol.
    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of field elements, 2^m.
    #[inline]
    pub fn order(&self) -> usize {
        1 << self.m
    }

    pub fn symbol(&self, value: u32) -> Result<Symbol> {
        if (value as usize) < self.order() {
            Ok(Symbol(value as u16))
        } else {
            Err(Error::InvalidSymbol { value, m: self.m })
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.order() as u32).map(|v| Symbol(v as u16))
    }

    pub fn nonzero_symbols(&self) -> impl Iterator<Item = Symbol> {
        (1..self.order() as u32).map(|v| Symbol(v as u16))
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a + b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a.is_zero() || b.is_zero() {
            return Symbol::ZERO;
        }
        let i = self.log[a.index()] as usize + self.log[b.index()] as usize;
        Symbol(self.exp[i])
    }

    pub fn inv(&self, a: Symbol) -> Result<Symbol> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let order = self.order() - 1;
        let l = self.log[a.index()] as usize;
        Ok(Symbol(self.exp[(order - l) % order]))
    }

    pub fn div(&self, a: Symbol, b: Symbol) -> Result<Symbol> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `alpha^e` for any exponent.
    pub fn alpha_pow(&self, e: usize) -> Symbol {
        Symbol(self.exp[e % (self.order() - 1)])
    }

    /// Discrete logarithm base alpha; `None` for zero.
    pub fn log(&self, a: Symbol) -> Option<usize> {
        (!a.is_zero()).then(|| self.log[a.index()] as usize)
    }

    /// The m-bit representation, constant-term coefficient first.
    pub fn to_bits(&self, s: Symbol) -> Vec<u8> {
        (0..self.m).map(|i| ((s.0 >> i) & 1) as u8).collect()
    }

    pub fn from_bits(&self, bits: &[u8]) -> Result<Symbol> {
        if bits.len() != self.m as usize {
            return Err(Error::LengthMismatch {
                expected: self.m as usize,
                actual: bits.len(),
            });
        }
        let mut v = 0u16;
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::BadParameters(format!("bit value {b}")));
            }
            v |= (b as u16) << i;
        }
        Ok(Symbol(v))
    }

    /// Concatenated bit representation of a symbol sequence.
    pub fn symbols_to_bits(&self, symbols: &[Symbol]) -> Vec<u8> {
        let mut out = Vec::with_capacity(symbols.len() * self.m as usize);
        for &s in symbols {
            for i in 0..self.m {
                out.push(((s.0 >> i) & 1) as u8);
            }
        }
        out
    }
}
