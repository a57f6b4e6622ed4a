//! Selecting an index that every coordinate value can be routed to.

use serde::Serialize;

use crate::responses::product;

/// `index` is the chosen coordinate; `witnesses[x]` has `witnesses[x][index] == x` and `f(witnesses[x]) == index`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Selection {
    pub index: usize,
    pub witnesses: Vec<Vec<usize>>,
}

/// Smallest index `i` such that each `x < sizes[i]` has a tuple `y` with `y[i] = x` and `f(y) = i`;
/// witnesses are the lexicographically smallest such tuples.
pub fn fpi_select(f: &dyn Fn(&[usize]) -> usize, sizes: &[usize]) -> Selection {
    let k = sizes.len();
    let mut wit: Vec<Vec<Option<Vec<usize>>>> = sizes.iter().map(|&n| vec![None; n]).collect();
    for y in product(sizes) {
        let i = f(&y);
        assert!(i < k, "selector value {i} outside 0..{k}");
        let x = y[i];
        if wit[i][x].is_none() {
            wit[i][x] = Some(y);
        }
    }
    for (i, w) in wit.into_iter().enumerate() {
        if w.iter().all(Option::is_some) {
            return Selection { index: i, witnesses: w.into_iter().map(Option::unwrap).collect() };
        }
    }
    unreachable!("some index always admits witnesses")
}

impl Selection {
    pub fn validate(&self, f: &dyn Fn(&[usize]) -> usize, sizes: &[usize]) -> bool {
        self.witnesses.len() == sizes[self.index]
            && self
                .witnesses
                .iter()
                .enumerate()
                .all(|(x, y)| y.len() == sizes.len() && y.iter().zip(sizes).all(|(a, b)| a < b) && y[self.index] == x && f(y) == self.index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_selector() {
        let s = fpi_select(&|_| 1, &[2, 3]);
        assert_eq!(s.index, 1);
        assert_eq!(s.witnesses, vec![vec![0, 0], vec![0, 1], vec![0, 2]]);
    }

    #[test]
    fn every_two_by_two_table() {
        for bits in 0u32..16 {
            let f = move |y: &[usize]| (bits >> (y[0] * 2 + y[1]) & 1) as usize;
            let s = fpi_select(&f, &[2, 2]);
            assert!(s.validate(&f, &[2, 2]), "table {bits:04b}");
        }
    }
}
