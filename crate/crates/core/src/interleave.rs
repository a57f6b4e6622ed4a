//! Interleavings of finite and ultimately periodic words.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::UpWord;

/// Reads the next unconsumed letter of `parts[schedule[j]]` for each `j`.
pub fn interleave_finite<T: Clone>(parts: &[Vec<T>], schedule: &[usize]) -> Result<Vec<T>> {
    let mut pos = vec![0usize; parts.len()];
    let mut out = Vec::with_capacity(schedule.len());
    for (j, &p) in schedule.iter().enumerate() {
        let part = parts.get(p).ok_or_else(|| Error::Validation(format!("schedule step {j} names missing part {p}")))?;
        let x = part.get(pos[p]).ok_or_else(|| Error::Validation(format!("schedule step {j} overruns part {p}")))?;
        out.push(x.clone());
        pos[p] += 1;
    }
    Ok(out)
}

/// Lexicographically smallest schedule producing `whole` from prefixes of `parts`.
pub fn is_interleaving<T: PartialEq>(whole: &[T], parts: &[Vec<T>]) -> Option<Vec<usize>> {
    // dead[v] marks consumption vectors from which the rest of `whole` cannot be produced.
    let mut dead: HashMap<Vec<usize>, ()> = HashMap::new();
    let mut pos = vec![0usize; parts.len()];
    let mut schedule = Vec::with_capacity(whole.len());
    fn search<T: PartialEq>(
        whole: &[T],
        parts: &[Vec<T>],
        pos: &mut Vec<usize>,
        schedule: &mut Vec<usize>,
        dead: &mut HashMap<Vec<usize>, ()>,
    ) -> bool {
        let j = schedule.len();
        if j == whole.len() {
            return true;
        }
        if dead.contains_key(pos) {
            return false;
        }
        for p in 0..parts.len() {
            if parts[p].get(pos[p]) == Some(&whole[j]) {
                pos[p] += 1;
                schedule.push(p);
                if search(whole, parts, pos, schedule, dead) {
                    return true;
                }
                schedule.pop();
                pos[p] -= 1;
            }
        }
        dead.insert(pos.clone(), ());
        false
    }
    search(whole, parts, &mut pos, &mut schedule, &mut dead).then_some(schedule)
}

/// Interleaves two ultimately periodic words along an ultimately periodic schedule over `{0, 1}`.
pub fn interleave_up(w: [&UpWord; 2], schedule: &UpWord) -> Result<UpWord> {
    if schedule.stem.iter().chain(&schedule.cycle).any(|&p| p > 1) {
        return Err(Error::Validation("schedule letters must be 0 or 1".into()));
    }
    let mut pos = [0usize; 2];
    let mut out = Vec::new();
    let mut seen: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut t = 0usize;
    loop {
        let key = (w[0].fold(pos[0]), w[1].fold(pos[1]), schedule.fold(t));
        let settled = pos[0] >= w[0].stem.len() || schedule_skips(schedule, 0);
        let settled = settled && (pos[1] >= w[1].stem.len() || schedule_skips(schedule, 1));
        if t >= schedule.stem.len() && settled {
            if let Some(&start) = seen.get(&key) {
                let cycle = out[start..].to_vec();
                out.truncate(start);
                return Ok(UpWord::new(out, cycle).normalized());
            }
            seen.insert(key, out.len());
        }
        let p = schedule.at(t);
        out.push(w[p].at(pos[p]));
        pos[p] += 1;
        t += 1;
    }
}

fn schedule_skips(schedule: &UpWord, p: usize) -> bool {
    !schedule.cycle.contains(&p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digits(s: &str) -> Vec<u32> {
        s.chars().map(|c| c.to_digit(10).unwrap()).collect()
    }

    #[test]
    fn produces_listed_words() {
        let parts = vec![digits("024"), digits("13")];
        assert_eq!(interleave_finite(&parts, &[0, 1, 0, 1, 0]).unwrap(), digits("01234"));
        assert_eq!(interleave_finite(&parts, &[1, 0, 0, 1, 0]).unwrap(), digits("10234"));
        assert_eq!(interleave_finite(&parts, &[1, 0, 1, 0, 0]).unwrap(), digits("10324"));
        assert!(interleave_finite(&parts, &[1, 1, 1]).is_err());
    }

    #[test]
    fn recognizes_listed_words() {
        let parts = vec![digits("024"), digits("13")];
        assert_eq!(is_interleaving(&digits("01234"), &parts), Some(vec![0, 1, 0, 1, 0]));
        assert!(is_interleaving(&digits("31024"), &parts).is_none());
        assert!(is_interleaving(&digits("01432"), &parts).is_none());
        assert_eq!(is_interleaving::<u32>(&[], &[vec![], vec![]]), Some(vec![]));
    }

    #[test]
    fn lexicographically_smallest_schedule() {
        let parts = vec![vec![1], vec![1]];
        assert_eq!(is_interleaving(&[1], &parts), Some(vec![0]));
    }

    #[test]
    fn up_alternation() {
        let zeros = UpWord::periodic(vec![0]);
        let ones = UpWord::periodic(vec![1]);
        let alt = UpWord::periodic(vec![0, 1]);
        assert_eq!(interleave_up([&zeros, &ones], &alt).unwrap(), UpWord::periodic(vec![0, 1]));
        let only_first = UpWord::periodic(vec![0]);
        let w = UpWord::new(vec![5], vec![2, 3]);
        assert_eq!(interleave_up([&w, &ones], &only_first).unwrap(), UpWord::new(vec![5], vec![2, 3]));
    }
}
