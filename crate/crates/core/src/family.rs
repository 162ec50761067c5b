//! Family expressions such as `Q(2,4) x C(6) x P(4)` and the graphs they denote.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr := term ('x' term)*
//! term := 'K(' int ',' int ')' | 'C(' int ')' | 'P(' int ')' | 'Q(' int ',' int ')'
//! ```
//!
//! Parsing checks syntax only; parameter validity is checked by [`build_family`].

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Atom {
    /// `K(s,t)`, complete bipartite.
    K(u32, u32),
    /// `C(n)`, cycle on `n` vertices.
    C(u32),
    /// `P(n)`, path on `n` vertices.
    P(u32),
    /// `Q(i,t)`, the `i`-fold product of `K(t,t)`.
    Q(u32, u32),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Atom::K(s, t) => write!(f, "K({s},{t})"),
            Atom::C(n) => write!(f, "C({n})"),
            Atom::P(n) => write!(f, "P({n})"),
            Atom::Q(i, t) => write!(f, "Q({i},{t})"),
        }
    }
}

impl Atom {
    pub fn build(self) -> Result<Graph> {
        match self {
            Atom::K(s, t) => graph::make_complete_bipartite(s as usize, t as usize),
            Atom::C(n) => graph::make_cycle(n as usize),
            Atom::P(n) => graph::make_path(n as usize),
            Atom::Q(i, t) => {
                if i == 0 {
                    return Err(Error::InvalidParameter("Q(i,t) needs i >= 1".into()));
                }
                let k = graph::make_complete_bipartite(t as usize, t as usize)?;
                let mut g = k.clone();
                for _ in 1..i {
                    g = graph::cartesian_product(&g, &k)?;
                }
                Ok(g)
            }
        }
    }

    /// Expands `Q(i,t)` into `i` copies of `K(t,t)`; other atoms are unchanged.
    pub fn expand(self) -> Vec<Atom> {
        match self {
            Atom::Q(i, t) => vec![Atom::K(t, t); i as usize],
            a => vec![a],
        }
    }
}

/// Expression tree; products associate to the left.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FamilyExpr {
    Atom(Atom),
    Product(Box<FamilyExpr>, Box<FamilyExpr>),
}

impl FamilyExpr {
    pub fn from_atoms<I: IntoIterator<Item = Atom>>(atoms: I) -> Option<Self> {
        let mut it = atoms.into_iter();
        let first = FamilyExpr::Atom(it.next()?);
        Some(it.fold(first, |acc, a| {
            FamilyExpr::Product(Box::new(acc), Box::new(FamilyExpr::Atom(a)))
        }))
    }

    /// Atoms in left-to-right order.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Atom>) {
        match self {
            FamilyExpr::Atom(a) => out.push(*a),
            FamilyExpr::Product(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }
}

impl fmt::Display for FamilyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyExpr::Atom(a) => write!(f, "{a}"),
            FamilyExpr::Product(l, r) => match r.as_ref() {
                FamilyExpr::Atom(_) => write!(f, "{l} x {r}"),
                _ => write!(f, "{l} x ({r})"),
            },
        }
    }
}

impl std::str::FromStr for FamilyExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_family_expr(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.peek() {
            Some(b) if b == c => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => self.error(format!("expected '{}', found '{}'", c as char, b as char)),
            None => self.error(format!("expected '{}', found end of input", c as char)),
        }
    }

    fn int(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            self.pos = start;
            return self.error("expected integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().or_else(|_| {
            self.pos = start;
            self.error("integer out of range")
        })
    }

    fn term(&mut self) -> Result<Atom> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let head = match self.peek() {
            Some(c) => c,
            None => return self.error("expected K, C, P or Q, found end of input"),
        };
        self.pos += 1;
        let atom = match head {
            b'K' | b'Q' => {
                self.expect(b'(')?;
                let a = self.int()?;
                self.expect(b',')?;
                let b = self.int()?;
                self.expect(b')')?;
                if head == b'K' {
                    Atom::K(a, b)
                } else {
                    Atom::Q(a, b)
                }
            }
            b'C' | b'P' => {
                self.expect(b'(')?;
                let a = self.int()?;
                self.expect(b')')?;
                if head == b'C' {
                    Atom::C(a)
                } else {
                    Atom::P(a)
                }
            }
            other => {
                self.pos = start;
                return self.error(format!("expected K, C, P or Q, found '{}'", other as char));
            }
        };
        Ok(atom)
    }
}

pub fn parse_family_expr(text: &str) -> Result<FamilyExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut expr = FamilyExpr::Atom(p.term()?);
    loop {
        match p.peek() {
            None => break,
            Some(b'x') => {
                p.pos += 1;
                let rhs = p.term()?;
                expr = FamilyExpr::Product(Box::new(expr), Box::new(FamilyExpr::Atom(rhs)));
            }
            Some(c) => {
                return p.error(format!(
                    "expected 'x' or end of input, found '{}'",
                    c as char
                ))
            }
        }
    }
    Ok(expr)
}

/// Left fold of the Cartesian product over the atoms of `expr`.
pub fn build_family(expr: &FamilyExpr) -> Result<Graph> {
    let mut atoms = expr.atoms().into_iter();
    let mut g = atoms
        .next()
        .expect("expression has at least one atom")
        .build()?;
    for a in atoms {
        g = graph::cartesian_product(&g, &a.build()?)?;
    }
    Ok(g)
}

/// Parameters of `Q_i^{(2r)} □ F_1 □ ... □ F_j` where each `F_α` is an even
/// cycle or path on `2 m_α` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyParams {
    pub i: u32,
    pub r: u32,
    pub m_list: Vec<u32>,
}

impl FamilyParams {
    pub fn new(i: u32, r: u32, m_list: Vec<u32>) -> Self {
        FamilyParams { i, r, m_list }
    }

    pub fn j(&self) -> usize {
        self.m_list.len()
    }

    /// `∏ m_α`.
    pub fn product_m(&self) -> BigInt {
        self.m_list
            .iter()
            .fold(BigInt::one(), |acc, &m| acc * BigInt::from(m))
    }

    /// `Σ 1/m_α` as an exact rational.
    pub fn inv_sum(&self) -> BigRational {
        self.m_list.iter().fold(BigRational::zero(), |acc, &m| {
            acc + BigRational::new(BigInt::one(), BigInt::from(m))
        })
    }
}

/// Kind of a non-cube factor in a supported construction shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearFactor {
    /// Even cycle `C(2m)`.
    Cycle(u32),
    /// Path `P(2m)`.
    Path(u32),
}

impl LinearFactor {
    /// Half the vertex count, `m`.
    pub fn half(self) -> u32 {
        match self {
            LinearFactor::Cycle(m) | LinearFactor::Path(m) => m,
        }
    }

    pub fn atom(self) -> Atom {
        match self {
            LinearFactor::Cycle(m) => Atom::C(2 * m),
            LinearFactor::Path(m) => Atom::P(2 * m),
        }
    }
}

/// `Q(i,2r) x F_1 x ... x F_j`, the shape the constructions accept, together
/// with the position of every expanded atom of the original expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionShape {
    pub i: u32,
    pub r: u32,
    pub factors: Vec<LinearFactor>,
    /// `order[k]` is the index, among the original expression's expanded atoms,
    /// of the `k`-th atom of the normalized expression.
    pub order: Vec<usize>,
}

impl ConstructionShape {
    /// Normalizes `expr`: cube factors first, then cycles and paths in their
    /// given order.
    pub fn from_expr(expr: &FamilyExpr) -> Result<Self> {
        let atoms: Vec<Atom> = expr.atoms().into_iter().flat_map(Atom::expand).collect();
        let mut cube = Vec::new();
        let mut rest = Vec::new();
        let mut part: Option<u32> = None;
        for (pos, atom) in atoms.iter().enumerate() {
            match *atom {
                Atom::K(s, t) => {
                    if s != t || t % 2 != 0 || t == 0 {
                        return Err(Error::UnsupportedFamily(format!(
                            "{atom}: cube factors must be K(2r,2r)"
                        )));
                    }
                    if part.is_some_and(|p| p != t) {
                        return Err(Error::UnsupportedFamily(
                            "all cube factors must share the same part size".into(),
                        ));
                    }
                    part = Some(t);
                    cube.push(pos);
                }
                Atom::C(n) => {
                    if n < 4 || n % 2 != 0 {
                        return Err(Error::InvalidParameter(format!(
                            "cycle needs even n >= 4, got {n}"
                        )));
                    }
                    rest.push((pos, LinearFactor::Cycle(n / 2)));
                }
                Atom::P(n) => {
                    if n < 2 {
                        return Err(Error::InvalidParameter(format!(
                            "path needs n >= 2, got {n}"
                        )));
                    }
                    if n % 2 != 0 {
                        return Err(Error::UnsupportedFamily(format!(
                            "{atom}: path factors must have an even number of vertices"
                        )));
                    }
                    rest.push((pos, LinearFactor::Path(n / 2)));
                }
                Atom::Q(..) => unreachable!("expanded"),
            }
        }
        let Some(t) = part else {
            return Err(Error::UnsupportedFamily(
                "no K(2r,2r) or Q(i,2r) factor".into(),
            ));
        };
        let order = cube
            .iter()
            .copied()
            .chain(rest.iter().map(|p| p.0))
            .collect();
        Ok(ConstructionShape {
            i: cube.len() as u32,
            r: t / 2,
            factors: rest.into_iter().map(|p| p.1).collect(),
            order,
        })
    }

    /// Expanded atoms of the normalized expression.
    pub fn atoms(&self) -> Vec<Atom> {
        std::iter::repeat_n(Atom::K(2 * self.r, 2 * self.r), self.i as usize)
            .chain(self.factors.iter().map(|f| f.atom()))
            .collect()
    }

    pub fn expr(&self) -> FamilyExpr {
        FamilyExpr::from_atoms(self.atoms()).expect("i >= 1")
    }
}
