//! Closed-form genus values, evaluated exactly over the rationals.
//!
//! Cycle parameters `m` denote `C_{2m}`. Path parameters denote `P_m` in
//! [`white_path_genus`] and `P_{2m}` everywhere else.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaTag {
    WhitePath,
    WhiteCycle,
    Cube,
    Hypercube,
    Ringel,
    CubeCycle,
    MainCycles,
    BipartiteCycles,
    CubePath,
    MainPaths,
}

impl FormulaTag {
    pub const ALL: [FormulaTag; 10] = [
        FormulaTag::WhitePath,
        FormulaTag::WhiteCycle,
        FormulaTag::Cube,
        FormulaTag::Hypercube,
        FormulaTag::Ringel,
        FormulaTag::CubeCycle,
        FormulaTag::MainCycles,
        FormulaTag::BipartiteCycles,
        FormulaTag::CubePath,
        FormulaTag::MainPaths,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaTag::WhitePath => "white-path",
            FormulaTag::WhiteCycle => "white-cycle",
            FormulaTag::Cube => "cube",
            FormulaTag::Hypercube => "hypercube",
            FormulaTag::Ringel => "ringel",
            FormulaTag::CubeCycle => "cube-cycle",
            FormulaTag::MainCycles => "main-cycles",
            FormulaTag::BipartiteCycles => "bipartite-cycles",
            FormulaTag::CubePath => "cube-path",
            FormulaTag::MainPaths => "main-paths",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        FormulaTag::ALL.into_iter().find(|t| t.name() == name)
    }
}

impl fmt::Display for FormulaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenusValue {
    pub value: u64,
    pub source: FormulaTag,
}

fn int(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

/// `2^e` for any integer `e`.
fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

fn powu(base: u32, e: u32) -> BigRational {
    int(num_traits::pow(BigInt::from(base), e as usize))
}

fn product(ms: &[u32]) -> BigRational {
    int(ms
        .iter()
        .fold(BigInt::one(), |acc, &m| acc * BigInt::from(m)))
}

fn inv_sum(ms: &[u32]) -> BigRational {
    ms.iter().fold(BigRational::zero(), |acc, &m| {
        acc + BigRational::new(BigInt::one(), BigInt::from(m))
    })
}

fn finish(x: BigRational, source: FormulaTag) -> Result<GenusValue> {
    if !x.is_integer() || x.is_negative() {
        return Err(Error::NotApplicable(format!(
            "{source} evaluates to {x}, not a non-negative integer"
        )));
    }
    let value = x
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::Overflow(source.to_string()))?;
    Ok(GenusValue { value, source })
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

/// Repeated product of paths `P_{m_1} □ ... □ P_{m_j}`:
/// `1 + (1/4)(∏ m_k)(j - 2 - Σ 1/m_k)`, for `j >= 3` and even `m_1, m_2, m_3`.
pub fn white_path_genus(m_list: &[u32]) -> Result<GenusValue> {
    if m_list.len() < 3 || m_list[..3].iter().any(|m| m % 2 != 0) {
        return Err(Error::NotApplicable(
            "needs j >= 3 with m_1, m_2, m_3 even".into(),
        ));
    }
    require(m_list.iter().all(|&m| m >= 2), || {
        "paths need m_k >= 2".into()
    })?;
    let j = m_list.len() as i64;
    let v = int(1)
        + BigRational::new(BigInt::one(), BigInt::from(4))
            * product(m_list)
            * (int(j - 2) - inv_sum(m_list));
    finish(v, FormulaTag::WhitePath)
}

/// `C_{2m_1} □ ... □ C_{2m_j}`: `1 + 2^{j-2}(j-2) ∏ m_k`, `j >= 2`.
pub fn white_cycle_genus(m_list: &[u32]) -> Result<GenusValue> {
    require(m_list.len() >= 2, || "needs j >= 2".into())?;
    require(m_list.iter().all(|&m| m >= 2), || {
        "cycles need m_k >= 2".into()
    })?;
    let j = m_list.len() as i64;
    let v = int(1) + pow2(j - 2) * int(j - 2) * product(m_list);
    finish(v, FormulaTag::WhiteCycle)
}

/// `j`-fold product of `K_{t,t}`: `1 + 2^{j-3} t^j (jt - 4)`, for even `t`
/// with `j >= 1`, or `t` in `{1, 3}` with `j >= 2`.
pub fn cube_genus(j: u32, t: u32) -> Result<GenusValue> {
    let ok = (t.is_multiple_of(2) && t > 0 && j >= 1) || ((t == 1 || t == 3) && j >= 2);
    if !ok {
        return Err(Error::NotApplicable(format!(
            "cube genus needs even t and j >= 1, or t in {{1,3}} and j >= 2 (got j={j}, t={t})"
        )));
    }
    let v = int(1) + pow2(j as i64 - 3) * powu(t, j) * (int(j as i64 * t as i64) - int(4));
    finish(v, FormulaTag::Cube)
}

/// `Q_n`: `1 + 2^{n-3}(n - 4)`, `n >= 2`.
pub fn hypercube_genus(n: u32) -> Result<GenusValue> {
    require(n >= 2, || format!("hypercube needs n >= 2, got {n}"))?;
    let v = int(1) + pow2(n as i64 - 3) * int(n as i64 - 4);
    finish(v, FormulaTag::Hypercube)
}

/// `K_{2r,2r}`: `(r - 1)^2`.
pub fn ringel_genus(r: u32) -> Result<GenusValue> {
    require(r >= 1, || "needs r >= 1".into())?;
    let d = int(r as i64 - 1);
    finish(d.clone() * d, FormulaTag::Ringel)
}

/// `Q_i^{(2r)} □ C_{2s}`: `1 + 2^{2i-1} s r^i (ir - 1)`, `s >= 2`.
pub fn cube_cycle_genus(i: u32, r: u32, s: u32) -> Result<GenusValue> {
    require(i >= 1 && r >= 1, || "needs i, r >= 1".into())?;
    require(s >= 2, || format!("needs s >= 2, got {s}"))?;
    let v = int(1) + pow2(2 * i as i64 - 1) * int(s) * powu(r, i) * int(i as i64 * r as i64 - 1);
    finish(v, FormulaTag::CubeCycle)
}

/// `Q_i^{(2r)} □ C_{2m_1} □ ... □ C_{2m_j}`:
/// `1 + M 2^{2i+j-2} r^i (j + ir - 2)` with `M = ∏ m_α`.
pub fn main_cycles_genus(i: u32, r: u32, m_list: &[u32]) -> Result<GenusValue> {
    require(i >= 1 && r >= 1, || "needs i, r >= 1".into())?;
    require(!m_list.is_empty(), || "needs at least one cycle".into())?;
    require(m_list.iter().all(|&m| m >= 2), || {
        "cycles need m >= 2".into()
    })?;
    let j = m_list.len() as i64;
    let v = int(1)
        + product(m_list)
            * pow2(2 * i as i64 + j - 2)
            * powu(r, i)
            * int(j + i as i64 * r as i64 - 2);
    finish(v, FormulaTag::MainCycles)
}

/// `C_{2m_1} □ ... □ C_{2m_j} □ K_{2r,2r}`: `1 + r 2^j M (j + r - 2)`.
pub fn bipartite_cycles_genus(r: u32, m_list: &[u32]) -> Result<GenusValue> {
    require(r >= 1, || "needs r >= 1".into())?;
    require(!m_list.is_empty(), || "needs at least one cycle".into())?;
    require(m_list.iter().all(|&m| m >= 2), || {
        "cycles need m >= 2".into()
    })?;
    let j = m_list.len() as i64;
    let v = int(1) + int(r) * pow2(j) * product(m_list) * int(j + r as i64 - 2);
    finish(v, FormulaTag::BipartiteCycles)
}

/// `Q_i^{(2r)} □ P_{2s}`: `1 + 2^{2i-2} r^i (2s(ir - 1) - 1)`, `s >= 1`.
pub fn cube_path_genus(i: u32, r: u32, s: u32) -> Result<GenusValue> {
    require(i >= 1 && r >= 1 && s >= 1, || "needs i, r, s >= 1".into())?;
    let v = int(1)
        + pow2(2 * i as i64 - 2)
            * powu(r, i)
            * (int(2 * s as i64 * (i as i64 * r as i64 - 1)) - int(1));
    finish(v, FormulaTag::CubePath)
}

/// `Q_i^{(2r)} □ P_{2m_1} □ ... □ P_{2m_j}`:
/// `1 + 2^{2i+j-3} r^i M (2ir + 2j - Σ 1/m_α - 4)`.
pub fn main_paths_genus(i: u32, r: u32, m_list: &[u32]) -> Result<GenusValue> {
    require(i >= 1 && r >= 1, || "needs i, r >= 1".into())?;
    require(!m_list.is_empty(), || "needs at least one path".into())?;
    require(m_list.iter().all(|&m| m >= 1), || {
        "paths need m >= 1".into()
    })?;
    let j = m_list.len() as i64;
    let v = int(1)
        + pow2(2 * i as i64 + j - 3)
            * powu(r, i)
            * product(m_list)
            * (int(2 * i as i64 * r as i64 + 2 * j) - inv_sum(m_list) - int(4));
    finish(v, FormulaTag::MainPaths)
}

/// Genus forced by a quadrilateral embedding: `1 + m/4 - n/2`, if integral.
pub fn quadrilateral_genus(n: u64, m: u64) -> Option<u64> {
    let v = int(1) + BigRational::new(BigInt::from(m), BigInt::from(4))
        - BigRational::new(BigInt::from(n), BigInt::from(2));
    (v.is_integer() && !v.is_negative())
        .then(|| v.to_integer().to_u64())
        .flatten()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(r: Result<GenusValue>) -> u64 {
        r.unwrap().value
    }

    #[test]
    fn white() {
        assert_eq!(g(white_path_genus(&[4, 4, 4])), 5);
        assert_eq!(g(white_path_genus(&[2, 2, 2])), 0);
        assert_eq!(g(white_path_genus(&[2, 2, 2, 2])), 1);
        assert!(matches!(
            white_path_genus(&[3, 4, 4]),
            Err(Error::NotApplicable(_))
        ));
        assert!(matches!(
            white_path_genus(&[4, 4]),
            Err(Error::NotApplicable(_))
        ));

        assert_eq!(g(white_cycle_genus(&[2, 2])), 1);
        assert_eq!(g(white_cycle_genus(&[3, 2])), 1);
        assert_eq!(g(white_cycle_genus(&[2, 2, 2])), 17);
        assert!(white_cycle_genus(&[2]).is_err());
        assert!(white_cycle_genus(&[1, 2]).is_err());
    }

    #[test]
    fn cubes() {
        assert_eq!(g(cube_genus(1, 4)), 1);
        assert_eq!(g(cube_genus(2, 2)), 1);
        assert_eq!(g(cube_genus(2, 4)), 33);
        assert_eq!(g(cube_genus(2, 3)), 10);
        assert!(matches!(cube_genus(1, 3), Err(Error::NotApplicable(_))));
        assert!(matches!(cube_genus(3, 5), Err(Error::NotApplicable(_))));

        assert_eq!(g(hypercube_genus(2)), 0);
        assert_eq!(g(hypercube_genus(3)), 0);
        assert_eq!(g(hypercube_genus(4)), 1);
        assert_eq!(g(hypercube_genus(6)), 17);
        assert!(hypercube_genus(1).is_err());

        assert_eq!(g(ringel_genus(1)), 0);
        assert_eq!(g(ringel_genus(2)), 1);
        assert_eq!(g(ringel_genus(3)), 4);
    }

    #[test]
    fn cycles() {
        assert_eq!(g(cube_cycle_genus(1, 1, 2)), 1);
        assert_eq!(g(cube_cycle_genus(1, 2, 3)), 13);
        assert_eq!(g(cube_cycle_genus(2, 2, 2)), 193);
        assert!(cube_cycle_genus(1, 2, 1).is_err());

        assert_eq!(g(main_cycles_genus(1, 2, &[2])), 9);
        assert_eq!(g(main_cycles_genus(1, 1, &[2, 2])), 17);
        assert_eq!(g(main_cycles_genus(2, 2, &[2])), 193);

        assert_eq!(g(bipartite_cycles_genus(2, &[2])), 9);
        assert_eq!(g(bipartite_cycles_genus(1, &[2])), 1);
        assert_eq!(g(bipartite_cycles_genus(2, &[2, 2])), 65);
    }

    #[test]
    fn paths() {
        assert_eq!(g(cube_path_genus(1, 2, 2)), 7);
        assert_eq!(g(cube_path_genus(1, 1, 2)), 0);
        assert_eq!(g(cube_path_genus(2, 2, 1)), 81);

        assert_eq!(g(main_paths_genus(1, 2, &[2, 2])), 49);
        assert_eq!(g(main_paths_genus(1, 2, &[1])), 3);
        assert_eq!(g(main_paths_genus(1, 1, &[2])), 0);
        assert!(main_paths_genus(1, 1, &[0]).is_err());
    }

    #[test]
    fn quadrilateral_counts() {
        assert_eq!(quadrilateral_genus(8, 16), Some(1));
        assert_eq!(quadrilateral_genus(256, 1280), Some(193));
        assert_eq!(quadrilateral_genus(6, 9), None);
    }

    #[test]
    fn tags_round_trip() {
        for t in FormulaTag::ALL {
            assert_eq!(FormulaTag::from_name(t.name()), Some(t));
            assert_eq!(
                serde_json::to_string(&t).unwrap(),
                format!("\"{}\"", t.name())
            );
        }
    }
}
