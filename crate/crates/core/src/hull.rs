//! Exact convex-hull membership of the origin by Carathéodory subset search.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// The origin as a positive convex combination of some of the input points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HullCertificate {
    /// Indices into the point list given to [`zero_in_hull`].
    pub support: Vec<usize>,
    pub weights: Vec<String>,
    /// Positive integers proportional to the weights.
    pub multiplicities: Vec<u64>,
}

/// Solves `a x = b` exactly; `None` unless the solution exists and is unique.
pub fn solve_unique(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let p = (pivot_row..rows).find(|&r| !m[r][c].is_zero())?;
        m.swap(pivot_row, p);
        let inv = m[pivot_row][c].recip();
        for x in m[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..=cols {
                    let delta = &f * &m[pivot_row][k];
                    m[r][k] = &m[r][k] - delta;
                }
            }
        }
        pivots.push(c);
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| m[c][cols].clone()).collect())
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            if rec(i + 1, n, k, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(0, n, k, &mut Vec::new(), f)
}

/// Finds a convex combination of `points` equal to the zero vector.
pub fn zero_in_hull(points: &[Vec<BigRational>]) -> Option<HullCertificate> {
    zero_in_hull_where(points, &|_| true)
}

/// As [`zero_in_hull`], restricted to supports accepted by `accept`.
pub fn zero_in_hull_where(points: &[Vec<BigRational>], accept: &dyn Fn(&[usize]) -> bool) -> Option<HullCertificate> {
    let d = points.first()?.len();
    let mut found = None;
    for k in 1..=points.len().min(d + 1) {
        let hit = combinations(points.len(), k, &mut |subset| {
            if !accept(subset) {
                return false;
            }
            let mut a: Vec<Vec<BigRational>> = (0..d).map(|i| subset.iter().map(|&j| points[j][i].clone()).collect()).collect();
            a.push(vec![BigRational::one(); k]);
            let mut b = vec![BigRational::zero(); d];
            b.push(BigRational::one());
            match solve_unique(&a, &b) {
                Some(l) if l.iter().all(|x| x.is_positive()) => {
                    found = Some((subset.to_vec(), l));
                    true
                }
                _ => false,
            }
        });
        if hit {
            break;
        }
    }
    let (support, weights) = found?;
    let lcm = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scale = BigRational::from_integer(lcm);
    let ints: Vec<BigInt> = weights.iter().map(|w| (w * &scale).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let multiplicities = ints.iter().map(|x| (x / &g).to_u64().expect("multiplicity too large")).collect();
    Some(HullCertificate { support, weights: weights.iter().map(crate::color::fmt_rational).collect(), multiplicities })
}
