//! Markings of the reduced torus skeleton and Dehn-twist words.
//!
//! A marking is an integer matrix of determinant +1 whose columns are the
//! homology classes of the skeleton's two loops in a fixed reference basis.
//! A twist along a loop acts by right multiplication with a generator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cobordism::{hash_bytes, Move, Trace, TraceStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("matrix {0} has determinant {1}, not +1")]
    NotUnimodular(Matrix2, i128),
    #[error("integer overflow")]
    Overflow,
    #[error("cannot parse matrix {0:?}: expected \"a,b;c,d\"")]
    Parse(String),
}

/// 2x2 integer matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix2(pub [[i64; 2]; 2]);

pub type TorusMarking = Matrix2;

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2([[1, 0], [0, 1]]);

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Matrix2([[a, b], [c, d]])
    }

    pub fn det(&self) -> i128 {
        let [[a, b], [c, d]] = self.0;
        a as i128 * d as i128 - b as i128 * c as i128
    }

    pub fn checked_mul(&self, o: &Matrix2) -> Result<Matrix2, TorusError> {
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let x = self.0[i][0] as i128 * o.0[0][j] as i128 + self.0[i][1] as i128 * o.0[1][j] as i128;
                *cell = i64::try_from(x).map_err(|_| TorusError::Overflow)?;
            }
        }
        Ok(Matrix2(out))
    }

    /// Inverse of a determinant-one matrix.
    pub fn unimodular_inverse(&self) -> Result<Matrix2, TorusError> {
        self.require_unimodular()?;
        let [[a, b], [c, d]] = self.0;
        let neg = |x: i64| x.checked_neg().ok_or(TorusError::Overflow);
        Ok(Matrix2([[d, neg(b)?], [neg(c)?, a]]))
    }

    pub fn require_unimodular(&self) -> Result<(), TorusError> {
        match self.det() {
            1 => Ok(()),
            d => Err(TorusError::NotUnimodular(*self, d)),
        }
    }

    pub fn max_abs(&self) -> u64 {
        self.0.iter().flatten().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.0;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

impl FromStr for Matrix2 {
    type Err = TorusError;

    /// Parses `"a,b;c,d"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TorusError::Parse(s.to_string());
        let rows: Vec<&str> = s.split(';').collect();
        if rows.len() != 2 {
            return Err(bad());
        }
        let mut m = [[0i64; 2]; 2];
        for (i, row) in rows.iter().enumerate() {
            let cells: Vec<&str> = row.split(',').collect();
            if cells.len() != 2 {
                return Err(bad());
            }
            for (j, cell) in cells.iter().enumerate() {
                m[i][j] = cell.trim().parse().map_err(|_| bad())?;
            }
        }
        Ok(Matrix2(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gen {
    G1,
    G2,
}

impl Gen {
    /// Loop of the reduced torus skeleton the twist runs along.
    pub fn loop_edge(self) -> usize {
        match self {
            Gen::G1 => 0,
            Gen::G2 => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: Gen,
    /// +1 or -1.
    pub sign: i8,
}

impl Letter {
    pub fn new(gen: Gen, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Letter { gen, sign }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, sign: -self.sign }
    }

    pub fn matrix(self) -> Matrix2 {
        let m = twist_matrix(self.gen);
        if self.sign > 0 {
            m
        } else {
            m.unimodular_inverse().expect("generators are unimodular")
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistWord(pub Vec<Letter>);

impl TwistWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &TwistWord) -> TwistWord {
        TwistWord(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Cancels adjacent inverse pairs.
    pub fn freely_reduced(&self) -> TwistWord {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        TwistWord(out)
    }
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("(empty)");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| {
                let g = match l.gen {
                    Gen::G1 => "G1",
                    Gen::G2 => "G2",
                };
                if l.sign > 0 {
                    g.to_string()
                } else {
                    format!("{g}^-1")
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

pub fn twist_matrix(gen: Gen) -> Matrix2 {
    match gen {
        Gen::G1 => Matrix2::new(1, 1, 0, 1),
        Gen::G2 => Matrix2::new(1, 0, -1, 1),
    }
}

pub fn apply_twist(m: &TorusMarking, gen: Gen, sign: i8) -> Result<TorusMarking, TorusError> {
    m.checked_mul(&Letter::new(gen, sign).matrix())
}

pub fn apply_word(m: &TorusMarking, w: &TwistWord) -> Result<TorusMarking, TorusError> {
    w.0.iter().try_fold(*m, |acc, l| acc.checked_mul(&l.matrix()))
}

pub fn evaluate(w: &TwistWord) -> Result<Matrix2, TorusError> {
    apply_word(&Matrix2::IDENTITY, w)
}

/// Nearest integer to `num / den`, ties toward zero.
fn nearest_quotient(num: i64, den: i64) -> i64 {
    let (n, d) = (num as i128, den as i128);
    let q = n / d;
    let r = n - q * d;
    let adj = if 2 * r.abs() > d.abs() { (r.signum() * d.signum()) as i64 } else { 0 };
    q as i64 + adj
}

/// Word in G1, G2 evaluating to `target`. Reduces the first column by
/// Euclid's algorithm with nearest-integer quotients, then finishes with a
/// power of G1, prefixed by `(G1 G2 G1)^2 = -I` when the diagonal is -1.
pub fn decompose(target: &Matrix2) -> Result<TwistWord, TorusError> {
    target.require_unimodular()?;
    let mut m = *target;
    let mut word = Vec::new();
    let mut left = |m: &mut Matrix2, l: Letter, times: u64| -> Result<(), TorusError> {
        let x = l.matrix();
        for _ in 0..times {
            *m = x.checked_mul(m)?;
            word.push(l.inverse());
        }
        Ok(())
    };
    loop {
        let [[a, _], [c, _]] = m.0;
        if c == 0 {
            break;
        }
        if a == 0 {
            left(&mut m, Letter::new(Gen::G1, -1), 1)?;
        } else if c.unsigned_abs() >= a.unsigned_abs() {
            let q = nearest_quotient(c, a);
            left(&mut m, Letter::new(Gen::G2, if q > 0 { 1 } else { -1 }), q.unsigned_abs())?;
        } else {
            let q = nearest_quotient(a, c);
            left(&mut m, Letter::new(Gen::G1, if q > 0 { -1 } else { 1 }), q.unsigned_abs())?;
        }
    }
    let [[a, b], _] = m.0;
    let shift = if a == 1 {
        b
    } else {
        let half_turn = [Gen::G1, Gen::G2, Gen::G1].map(|g| Letter::new(g, 1));
        word.extend(half_turn.iter().chain(&half_turn));
        b.checked_neg().ok_or(TorusError::Overflow)?
    };
    let sign = if shift > 0 { 1 } else { -1 };
    word.extend(std::iter::repeat_n(Letter::new(Gen::G1, sign), shift.unsigned_abs() as usize));
    Ok(TwistWord(word).freely_reduced())
}

fn marking_hash(m: &Matrix2) -> String {
    let bytes: Vec<u8> = m.0.iter().flatten().flat_map(|x| x.to_be_bytes()).collect();
    hash_bytes(&bytes)
}

/// Trace of twist moves taking marking `a` to marking `b` on the reduced
/// torus skeleton.
pub fn torus_cobordism_trace(a: &TorusMarking, b: &TorusMarking) -> Result<Trace, TorusError> {
    let word = decompose(&a.unimodular_inverse()?.checked_mul(b)?)?;
    b.require_unimodular()?;
    let mut cur = *a;
    let mut steps = Vec::with_capacity(word.len());
    for l in &word.0 {
        let next = cur.checked_mul(&l.matrix())?;
        steps.push(TraceStep {
            mv: Move::TwistMacro { loop_edge: l.gen.loop_edge(), direction: l.sign },
            pre: marking_hash(&cur),
            post: marking_hash(&next),
            region: None,
        });
        cur = next;
    }
    debug_assert_eq!(cur, *b);
    Ok(Trace { steps })
}

/// Replays a twist trace from marking `a`.
pub fn replay_twists(a: &TorusMarking, trace: &Trace) -> Result<TorusMarking, TorusError> {
    trace.steps.iter().try_fold(*a, |m, s| match s.mv {
        Move::TwistMacro { loop_edge, direction } => {
            let gen = if loop_edge == 0 { Gen::G1 } else { Gen::G2 };
            apply_twist(&m, gen, direction)
        }
        _ => Ok(m),
    })
}
