//! Closed-form sum-DoF regions versus the normalized feedback delay `λ`, the
//! two-user comparison table, time sharing, finite-`n` rates and spatial
//! scaling. All values are exact rationals.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Q = Rational64;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn qi(n: usize) -> Q {
    Q::from_integer(n as i64)
}

/// Exact rational with a real rendering, as serialized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub num: i64,
    pub den: i64,
    pub real: f64,
}

impl From<Q> for ExactValue {
    fn from(r: Q) -> Self {
        ExactValue { num: *r.numer(), den: *r.denom(), real: to_real(r) }
    }
}

impl TryFrom<ExactValue> for Q {
    type Error = Error;
    fn try_from(v: ExactValue) -> Result<Q> {
        if v.den == 0 {
            return Err(Error::Config("rational with zero denominator".into()));
        }
        Ok(Q::new(v.num, v.den))
    }
}

/// Real value rounded to 12 decimals so that renderings are stable.
pub fn to_real(r: Q) -> f64 {
    let x = *r.numer() as f64 / *r.denom() as f64;
    (x * 1e12).round() / 1e12
}

/// Serde adapter writing a rational as `{num, den, real}`.
pub mod exact {
    use super::{ExactValue, Q};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Q, s: S) -> Result<S::Ok, S::Error> {
        ExactValue::from(*r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let v = ExactValue::deserialize(d)?;
        Q::try_from(v).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Plateau,
    Timeshare,
    Saturated,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Plateau => "plateau",
            Regime::Timeshare => "timeshare",
            Regime::Saturated => "saturated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    #[serde(with = "exact")]
    pub lambda: Q,
    #[serde(with = "exact")]
    pub dof: Q,
    pub regime: Regime,
}

/// A three-piece region: flat `plateau` up to `knee`, the line
/// `slope·λ + intercept` until `λ = 1`, then flat `saturation`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Piecewise {
    pub plateau: Q,
    pub knee: Q,
    pub slope: Q,
    pub intercept: Q,
    pub saturation: Q,
}

impl Piecewise {
    pub fn at(&self, lambda: Q) -> Result<TradeoffPoint> {
        check_lambda(lambda)?;
        let (dof, regime) = if lambda <= self.knee {
            (self.plateau, Regime::Plateau)
        } else if lambda < Q::one() {
            (self.slope * lambda + self.intercept, Regime::Timeshare)
        } else {
            (self.saturation, Regime::Saturated)
        };
        Ok(TradeoffPoint { lambda, dof, regime })
    }

    fn flat(value: Q) -> Self {
        Piecewise { plateau: value, knee: Q::from_integer(i64::MAX), slope: Q::zero(), intercept: value, saturation: value }
    }
}

fn check_lambda(lambda: Q) -> Result<()> {
    if lambda < Q::zero() {
        return Err(Error::Config(format!("lambda must be non-negative, got {lambda}")));
    }
    Ok(())
}

fn check_positive(pairs: &[(&str, usize)]) -> Result<()> {
    match pairs.iter().find(|(_, v)| *v == 0) {
        Some((name, _)) => Err(Error::Config(format!("{name} must be positive"))),
        None => Ok(()),
    }
}

/// Scheme length of the two-user scheme: `2 + ⌈(2A − B)/B⌉` for `B ≤ A`, 3 for
/// `A < B < 2A`, 1 for `B ≥ 2A`.
pub fn two_user_length(a: usize, b: usize) -> usize {
    if b <= a {
        2 + (2 * a - b).div_ceil(b)
    } else if b < 2 * a {
        3
    } else {
        1
    }
}

pub fn theorem1_pieces(a: usize, b: usize) -> Result<Piecewise> {
    check_positive(&[("A", a), ("B", b)])?;
    if b >= 2 * a {
        return Ok(Piecewise::flat(qi(2 * a)));
    }
    let t = two_user_length(a, b) as i64;
    let (a4, m) = (4 * a as i64, (2 * a).min(b) as i64);
    Ok(Piecewise {
        plateau: q(a4, t),
        knee: q(2, t),
        slope: q(a4 - t * m, 2 - t),
        intercept: q(2 * m - a4, 2 - t),
        saturation: Q::from_integer(m),
    })
}

pub fn theorem1_region(a: usize, b: usize, lambda: Q) -> Result<TradeoffPoint> {
    theorem1_pieces(a, b)?.at(lambda)
}

pub fn theorem2_pieces(k: usize) -> Result<Piecewise> {
    if k < 2 {
        return Err(Error::Config(format!("K must be at least 2, got {k}")));
    }
    let k = k as i64;
    Ok(Piecewise {
        plateau: q(2 * (2 * k - 1), 3 * k - 1),
        knee: q(2, 3 * k - 1),
        slope: q(-1, 3),
        intercept: q(4, 3),
        saturation: Q::one(),
    })
}

pub fn theorem2_region(k: usize, lambda: Q) -> Result<TradeoffPoint> {
    theorem2_pieces(k)?.at(lambda)
}

pub fn theorem3_pieces(m: usize, n: usize) -> Result<Piecewise> {
    check_positive(&[("M", m)])?;
    if n < 3 {
        return Err(Error::Unsupported(format!("N must be at least 3, got {n}")));
    }
    let (m, n) = (m as i64, n as i64);
    let ma = m * (n - 1);
    let t = ma + 1;
    Ok(Piecewise {
        plateau: q(m * n * (n - 1), t),
        knee: q(2, t),
        slope: q(1 - m * (n - 1) * (n - 1), ma - 1),
        intercept: q(m * n * (n - 1) - 2, ma - 1),
        saturation: Q::one(),
    })
}

pub fn theorem3_region(m: usize, n: usize, lambda: Q) -> Result<TradeoffPoint> {
    theorem3_pieces(m, n)?.at(lambda)
}

pub fn corollary1_pieces(a: usize, b: usize) -> Result<Piecewise> {
    check_positive(&[("A", a), ("B", b)])?;
    if 2 * b > a {
        return Err(Error::Unsupported(format!("needs 2B ≤ A, got A={a}, B={b}")));
    }
    let t = two_user_length(a, b) as i64;
    let (a, b) = (a as i64, b as i64);
    Ok(Piecewise {
        plateau: q(4 * a, t),
        knee: q(2, t),
        slope: q(4 * b * t - 12 * a, 3 * (t - 2)),
        intercept: q(12 * a - 8 * b, 3 * (t - 2)),
        saturation: q(4 * b, 3),
    })
}

pub fn corollary1_region(a: usize, b: usize, lambda: Q) -> Result<TradeoffPoint> {
    corollary1_pieces(a, b)?.at(lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableCase {
    /// `2B ≤ A`
    Wide2,
    /// `B < A < 2B`
    Wide1,
    /// `3B/4 < A ≤ B`
    Square,
    /// `B/2 < A ≤ 3B/4`
    Tall,
    /// `A ≤ B/2`
    VeryTall,
}

impl TableCase {
    pub fn classify(a: usize, b: usize) -> Self {
        if 2 * b <= a {
            TableCase::Wide2
        } else if b < a {
            TableCase::Wide1
        } else if 4 * a > 3 * b {
            TableCase::Square
        } else if 2 * a > b {
            TableCase::Tall
        } else {
            TableCase::VeryTall
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TableCase::Wide2 => "2B<=A",
            TableCase::Wide1 => "B<A<2B",
            TableCase::Square => "3B/4<A<=B",
            TableCase::Tall => "B/2<A<=3B/4",
            TableCase::VeryTall => "A<=B/2",
        }
    }
}

/// Sum-DoF of the two-user network under four CSIT models: local
/// temperately-delayed (`stia`), global completely-delayed (`gak`), perfect
/// (`ia`) and none (`vv`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub a: usize,
    pub b: usize,
    pub case: TableCase,
    #[serde(with = "exact")]
    pub stia: Q,
    #[serde(with = "exact")]
    pub gak: Q,
    #[serde(with = "exact")]
    pub ia: Q,
    #[serde(with = "exact")]
    pub vv: Q,
}

pub fn table1_row(a: usize, b: usize) -> Result<Table1Row> {
    check_positive(&[("A", a), ("B", b)])?;
    let case = TableCase::classify(a, b);
    let (ai, bi) = (a as i64, b as i64);
    let (aq, bq) = (qi(a), qi(b));
    let t = two_user_length(a, b) as i64;
    let (stia, gak, ia, vv) = match case {
        TableCase::Wide2 => (q(4 * ai, t), q(4 * bi, 3), qi(2 * b), bq),
        TableCase::Wide1 => (
            q(4 * ai, t),
            q(2 * bi * (ai + 2 * bi), ai + 4 * bi),
            qi(2 * b).min(q(4 * ai, 3)),
            bq,
        ),
        TableCase::Square => (q(4 * ai, 3), q(6 * bi, 5), qi(2 * a).min(q(4 * bi, 3)), bq),
        TableCase::Tall => (q(4 * ai, 3), q(4 * ai * bi, 2 * ai + bi), qi(2 * a).min(q(4 * bi, 3)), bq),
        TableCase::VeryTall => (aq * 2, aq * 2, aq * 2, aq * 2),
    };
    Ok(Table1Row { a, b, case, stia, gak, ia, vv })
}

/// Linear interpolation between two operating points.
pub fn timeshare(p1: &TradeoffPoint, p2: &TradeoffPoint, lambda: Q) -> Result<TradeoffPoint> {
    if p1.lambda >= p2.lambda {
        return Err(Error::Config(format!(
            "segment endpoints must be increasing, got {} and {}",
            p1.lambda, p2.lambda
        )));
    }
    if lambda < p1.lambda || lambda > p2.lambda {
        return Err(Error::OutsideSegment(format!("{lambda} not in [{}, {}]", p1.lambda, p2.lambda)));
    }
    let w = (lambda - p1.lambda) / (p2.lambda - p1.lambda);
    let regime = if lambda == p1.lambda {
        p1.regime
    } else if lambda == p2.lambda {
        p2.regime
    } else {
        Regime::Timeshare
    };
    Ok(TradeoffPoint { lambda, dof: p1.dof + (p2.dof - p1.dof) * w, regime })
}

/// Rate of the two-user scheme when `n` slot sets share `T` blocks and the
/// `T(T − 1)` leftover slots carry `min(2A, B)` symbols each. Flat `2A` for
/// `B ≥ 2A`.
pub fn asymptotic_dof_t1(a: usize, b: usize, n: u64) -> Q {
    if b >= 2 * a {
        return qi(2 * a);
    }
    let t = two_user_length(a, b) as i64;
    let m = (2 * a).min(b) as i64;
    let n = n as i64;
    q(4 * a as i64 * n + m * t * (t - 1), t * n + t * (t - 1))
}

/// As [`asymptotic_dof_t1`] for the MISO X scheme, one symbol per leftover slot.
pub fn asymptotic_dof_t3(m: usize, n_rx: usize, n: u64) -> Q {
    let (m, nr, n) = (m as i64, n_rx as i64, n as i64);
    let t = m * (nr - 1) + 1;
    q(m * nr * (nr - 1) * n + t * (t - 1), t * n + t * (t - 1))
}

/// Multiplies the DoF of a point by an integer antenna-scaling factor.
pub fn scale_dof(point: &TradeoffPoint, factor: u64) -> Result<TradeoffPoint> {
    if factor == 0 {
        return Err(Error::Config("scaling factor must be at least 1".into()));
    }
    Ok(TradeoffPoint { dof: point.dof * Q::from_integer(factor as i64), ..*point })
}

/// A region to sample in `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum Region {
    Theorem1 { a: usize, b: usize },
    Theorem2 { k: usize },
    Theorem3 { m: usize, n: usize },
    Corollary1 { a: usize, b: usize },
}

impl Region {
    pub fn pieces(&self) -> Result<Piecewise> {
        match *self {
            Region::Theorem1 { a, b } => theorem1_pieces(a, b),
            Region::Theorem2 { k } => theorem2_pieces(k),
            Region::Theorem3 { m, n } => theorem3_pieces(m, n),
            Region::Corollary1 { a, b } => corollary1_pieces(a, b),
        }
    }

    pub fn sample(&self, grid: &[Q]) -> Result<Vec<TradeoffPoint>> {
        let p = self.pieces()?;
        grid.iter().map(|&l| p.at(l)).collect()
    }
}

/// Parses `p/q`, an integer or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse {s:?} as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(q(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 15 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        let scale = 10i64.pow(frac.len() as u32);
        let f: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let mag = int.abs().checked_mul(scale).and_then(|x| x.checked_add(f)).ok_or_else(bad)?;
        return Ok(q(if neg { -mag } else { mag }, scale));
    }
    s.parse::<i64>().map(Q::from_integer).map_err(|_| bad())
}
