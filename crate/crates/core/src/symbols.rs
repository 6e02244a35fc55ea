//! Dynamics strings: finite sequences over the alphabet {I, O}.
//!
//! Text forms: plain (`IIOO`) and run-length (`I^2O^2`, exponents ≥ 2).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One combined Collatz transformation: I = (3x+1)/2, O = x/2.
///
/// `I < O` in the derived order; enumeration relies on that.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Symbol {
    I,
    O,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::I => 'I',
            Symbol::O => 'O',
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// An ordered sequence of transformations. Empty only as the length-0
/// prefix convention.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DynString(Vec<Symbol>);

impl DynString {
    pub fn new() -> DynString {
        DynString(Vec::new())
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> DynString {
        DynString(symbols)
    }

    /// n copies of one symbol (`I^n`, `O^n`).
    pub fn repeated(sym: Symbol, n: usize) -> DynString {
        DynString(vec![sym; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// 0-based access.
    pub fn get(&self, index: usize) -> Option<Symbol> {
        self.0.get(index).copied()
    }

    pub fn first(&self) -> Option<Symbol> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.0.last().copied()
    }

    pub fn push(&mut self, sym: Symbol) {
        self.0.push(sym);
    }

    pub fn pop(&mut self) -> Option<Symbol> {
        self.0.pop()
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.0.iter().copied()
    }

    /// Concatenation s ∥ sym.
    pub fn appended(&self, sym: Symbol) -> DynString {
        let mut v = self.0.clone();
        v.push(sym);
        DynString(v)
    }

    /// The contiguous segment starting at 1-based position `start` with
    /// length `len`; `len` 0 yields the empty string.
    pub fn segment(&self, start: usize, len: usize) -> Result<DynString> {
        let n = self.0.len();
        if start < 1 || start > n || len > n - (start - 1) {
            return Err(Error::OutOfBounds {
                start,
                len,
                within: n,
            });
        }
        Ok(DynString(self.0[start - 1..start - 1 + len].to_vec()))
    }

    /// The prefix of the given length.
    pub fn prefix(&self, len: usize) -> Result<DynString> {
        if len > self.0.len() {
            return Err(Error::OutOfBounds {
                start: 1,
                len,
                within: self.0.len(),
            });
        }
        Ok(DynString(self.0[..len].to_vec()))
    }

    pub fn count_i(&self) -> usize {
        self.0.iter().filter(|&&s| s == Symbol::I).count()
    }

    pub fn count_o(&self) -> usize {
        self.0.iter().filter(|&&s| s == Symbol::O).count()
    }

    pub fn to_plain(&self) -> String {
        self.0.iter().map(|s| s.as_char()).collect()
    }

    /// Run-length form; runs of length 1 stay bare (`I^3OIO^2`).
    pub fn to_rle(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.0.len() {
            let sym = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == sym {
                run += 1;
            }
            out.push(sym.as_char());
            if run > 1 {
                out.push('^');
                out.push_str(&run.to_string());
            }
            i += run;
        }
        out
    }
}

impl fmt::Display for DynString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain())
    }
}

impl fmt::Debug for DynString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain())
    }
}

/// Run cap while parsing RLE exponents, to bound allocation.
const MAX_RUN: usize = 100_000_000;

impl FromStr for DynString {
    type Err = Error;

    /// Parses both the plain and the run-length form.
    fn from_str(text: &str) -> Result<DynString> {
        let bytes = text.as_bytes();
        if bytes.is_empty() {
            return Err(Error::Syntax {
                offset: 0,
                message: "empty dynamics string".into(),
            });
        }
        let mut out = Vec::with_capacity(bytes.len());
        let mut pos = 0;
        while pos < bytes.len() {
            let sym = match bytes[pos] {
                b'I' => Symbol::I,
                b'O' => Symbol::O,
                _ => {
                    return Err(Error::Syntax {
                        offset: pos,
                        message: "expected 'I' or 'O'".into(),
                    })
                }
            };
            pos += 1;
            if pos < bytes.len() && bytes[pos] == b'^' {
                let digits_at = pos + 1;
                let mut end = digits_at;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                if end == digits_at {
                    return Err(Error::Syntax {
                        offset: digits_at,
                        message: "expected a run length after '^'".into(),
                    });
                }
                let run: usize = text[digits_at..end].parse().map_err(|_| Error::Syntax {
                    offset: digits_at,
                    message: "run length too large".into(),
                })?;
                if run < 2 {
                    return Err(Error::Syntax {
                        offset: digits_at,
                        message: "run length must be at least 2".into(),
                    });
                }
                if run > MAX_RUN {
                    return Err(Error::Syntax {
                        offset: digits_at,
                        message: "run length too large".into(),
                    });
                }
                out.extend(std::iter::repeat_n(sym, run));
                pos = end;
            } else {
                out.push(sym);
            }
        }
        Ok(DynString(out))
    }
}

impl serde::Serialize for DynString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_plain())
    }
}

impl<'de> serde::Deserialize<'de> for DynString {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<DynString, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
