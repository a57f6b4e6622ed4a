//! Color values and their textual syntax.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A color as declared in a game's alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Int(i64),
    Rat(BigRational),
    Vector(Vec<BigRational>),
    Sym(String),
}

impl Color {
    pub fn canonical(self) -> Color {
        match self {
            Color::Rat(r) if r.is_integer() => match r.to_integer().to_i64() {
                Some(i) => Color::Int(i),
                None => Color::Rat(r),
            },
            c => c,
        }
    }

    pub fn int(&self) -> Option<i64> {
        match self {
            Color::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn scalar(&self) -> Option<BigRational> {
        match self {
            Color::Int(i) => Some(BigRational::from_integer(BigInt::from(*i))),
            Color::Rat(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn vector(&self) -> Option<&[BigRational]> {
        match self {
            Color::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn parse(token: &str) -> Result<Color, String> {
        let t = token.trim();
        if t.is_empty() {
            return Err("empty color".into());
        }
        if let Some(inner) = t.strip_prefix('(') {
            let inner = inner.strip_suffix(')').ok_or_else(|| format!("unclosed vector color `{t}`"))?;
            let comps = inner.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
            if comps.is_empty() {
                return Err(format!("empty vector color `{t}`"));
            }
            return Ok(Color::Vector(comps));
        }
        if t.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+') {
            return Ok(Color::Rat(parse_rational(t)?).canonical());
        }
        if t.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Ok(Color::Sym(t.to_string()));
        }
        Err(format!("invalid color `{t}`"))
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let bad = || format!("invalid number `{s}`");
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

pub fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Int(i) => write!(f, "{i}"),
            Color::Rat(r) => f.write_str(&fmt_rational(r)),
            Color::Vector(v) => {
                let parts: Vec<String> = v.iter().map(fmt_rational).collect();
                write!(f, "({})", parts.join(","))
            }
            Color::Sym(s) => f.write_str(s),
        }
    }
}

/// Rationals scaled by a shared positive denominator so sums stay in `i128`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scaled {
    pub den: i128,
    pub values: Vec<Vec<i128>>,
}

impl Scaled {
    pub fn new(rows: &[Vec<BigRational>]) -> Result<Scaled, String> {
        let mut lcm = BigInt::one();
        for r in rows.iter().flatten() {
            lcm = num_integer::lcm(lcm, r.denom().abs());
        }
        let den = lcm.to_i128().ok_or("denominators too large")?;
        let lcm_r = BigRational::from_integer(lcm);
        let values = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|r| (r * &lcm_r).to_integer().to_i128().ok_or_else(|| "color value too large".to_string()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Scaled { den, values })
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn scalar(&self, c: usize) -> i128 {
        self.values[c][0]
    }

    pub fn to_f64(&self, v: i128) -> f64 {
        v as f64 / self.den as f64
    }
}

pub fn add_into(acc: &mut [i128], v: &[i128]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = a.checked_add(*x).expect("partial sum overflow");
    }
}

pub fn norm_inf(v: &[i128]) -> i128 {
    v.iter().map(|x| x.abs()).max().unwrap_or(0)
}
