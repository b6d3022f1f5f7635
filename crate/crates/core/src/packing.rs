//! Packing of per-item coordinate masks: choose at most one mask per item so
//! that chosen masks are pairwise disjoint.

use alloc::vec;
use alloc::vec::Vec;

/// Maximum number of items that can be packed, together with one optimal
/// selection as `(item, mask)` pairs in item order.
///
/// Branch and bound: items with fewer choices are branched on first, and a
/// branch is cut as soon as the items left cannot beat the best count.
pub(crate) fn max_packing(choices: &[Vec<u64>]) -> (usize, Vec<(usize, u64)>) {
    let mut items: Vec<usize> = (0..choices.len()).filter(|&i| !choices[i].is_empty()).collect();
    items.sort_by_key(|&i| choices[i].len());

    struct Search<'a> {
        choices: &'a [Vec<u64>],
        items: Vec<usize>,
        best: usize,
        best_pick: Vec<(usize, u64)>,
        pick: Vec<(usize, u64)>,
    }

    impl Search<'_> {
        fn run(&mut self, pos: usize, used: u64) {
            if self.pick.len() > self.best {
                self.best = self.pick.len();
                self.best_pick = self.pick.clone();
            }
            if pos == self.items.len()
                || self.pick.len() + (self.items.len() - pos) <= self.best
                || self.best == self.items.len()
            {
                return;
            }
            let item = self.items[pos];
            for &mask in &self.choices[item] {
                if mask & used == 0 {
                    self.pick.push((item, mask));
                    self.run(pos + 1, used | mask);
                    self.pick.pop();
                    if self.best == self.items.len() {
                        return;
                    }
                }
            }
            self.run(pos + 1, used);
        }
    }

    let mut s = Search { choices, items, best: 0, best_pick: Vec::new(), pick: Vec::new() };
    s.run(0, 0);
    let mut pick = s.best_pick;
    pick.sort();
    (s.best, pick)
}

/// One mask per item, pairwise disjoint, if possible. Items are filled in the
/// given order trying masks in the given order, so with ascending mask lists
/// the result is the lexicographically smallest system.
pub(crate) fn pack_all(choices: &[&[u64]]) -> Option<Vec<u64>> {
    fn go(choices: &[&[u64]], used: u64, out: &mut Vec<u64>) -> bool {
        let Some((first, rest)) = choices.split_first() else {
            return true;
        };
        for &mask in *first {
            if mask & used == 0 {
                out.push(mask);
                if go(rest, used | mask, out) {
                    return true;
                }
                out.pop();
            }
        }
        false
    }
    let mut out = Vec::with_capacity(choices.len());
    go(choices, 0, &mut out).then_some(out)
}

/// Flags, indexed by item bitmask, marking every subfamily of items that can
/// be packed simultaneously. Requires fewer than 32 items.
pub(crate) fn packable_subfamilies(choices: &[Vec<u64>]) -> Vec<bool> {
    let k = choices.len();
    let mut reached = vec![false; 1 << k];
    fn go(pos: usize, used: u64, family: usize, choices: &[Vec<u64>], reached: &mut [bool]) {
        if pos == choices.len() {
            reached[family] = true;
            return;
        }
        go(pos + 1, used, family, choices, reached);
        for &mask in &choices[pos] {
            if mask & used == 0 {
                go(pos + 1, used | mask, family | (1 << pos), choices, reached);
            }
        }
    }
    go(0, 0, 0, choices, &mut reached);
    reached
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_basics() {
        assert_eq!(max_packing(&[]).0, 0);
        assert_eq!(max_packing(&[vec![], vec![]]).0, 0);
        assert_eq!(max_packing(&[vec![0b01], vec![0b10]]), (2, vec![(0, 0b01), (1, 0b10)]));
        assert_eq!(max_packing(&[vec![0b01], vec![0b01]]).0, 1);
        // Greedy on the first item would block both others.
        let choices = [vec![0b011, 0b100], vec![0b001], vec![0b010]];
        assert_eq!(max_packing(&choices).0, 3);
        // The empty mask always fits.
        assert_eq!(max_packing(&[vec![0], vec![0], vec![0b1]]).0, 3);
    }

    #[test]
    fn pack_all_prefers_small_masks() {
        assert_eq!(pack_all(&[&[0b01, 0b10], &[0b10, 0b100]]), Some(vec![0b01, 0b10]));
        assert_eq!(pack_all(&[&[0b1], &[0b1]]), None);
        assert_eq!(pack_all(&[]), Some(vec![]));
    }

    #[test]
    fn subfamilies() {
        let r = packable_subfamilies(&[vec![0b1], vec![0b1], vec![0b10]]);
        assert!(r[0b000] && r[0b001] && r[0b010] && r[0b100] && r[0b101] && r[0b110]);
        assert!(!r[0b011] && !r[0b111]);
    }
}
