//! Quiver fixtures on five vertices `c1 < … < c5`, found by exhaustive search
//! over arrow multiplicities subject to exact path-count data.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use num_traits::FromPrimitive;

use crate::error::{Error, Result};
use crate::quiveralg::{path_count_matrix, Quiver, RQuiver};
use crate::scalarfield::Rat;

/// Largest multiplicity considered for a single arrow slot.
pub const MAX_MULTIPLICITY: u32 = 12;

/// Arrow slots `(tail, head)` with `tail > head`, in search order.
const SLOTS: [(usize, usize); 10] = [
    (1, 0),
    (2, 1),
    (3, 2),
    (4, 3),
    (2, 0),
    (3, 1),
    (4, 2),
    (3, 0),
    (4, 1),
    (4, 0),
];

/// Target path counts: for each length `r`, the nonzero entries of the
/// `r`-th power; every other entry must vanish.
#[derive(Clone, Debug)]
pub struct PathData {
    pub targets: Vec<(usize, BTreeMap<(usize, usize), u128>)>,
}

impl PathData {
    fn target(&self, r: usize, from: usize, to: usize) -> Option<u128> {
        self.targets
            .iter()
            .find(|(len, _)| *len == r)
            .map(|(_, m)| m.get(&(from, to)).copied().unwrap_or(0))
    }
}

/// Path-count data for `gamma1`, `gamma2` or `gamma3` (vertices 0-based).
pub fn gamma_data(which: usize) -> Option<PathData> {
    let m = |entries: &[((usize, usize), u128)]| entries.iter().copied().collect::<BTreeMap<_, _>>();
    let targets = match which {
        1 => vec![(2, m(&[((4, 0), 10), ((3, 0), 3)])), (3, m(&[])), (4, m(&[]))],
        2 => vec![
            (2, m(&[((4, 0), 5), ((4, 1), 2), ((3, 0), 3), ((2, 0), 3)])),
            (3, m(&[((4, 0), 6)])),
            (4, m(&[])),
        ],
        3 => vec![
            (2, m(&[((4, 1), 4), ((3, 0), 6), ((2, 0), 3)])),
            (3, m(&[((4, 0), 12)])),
            (4, m(&[])),
        ],
        _ => return None,
    };
    Some(PathData { targets })
}

/// Preferred degrees `(in, out)` at `c2` and `c4`; the search minimizes the
/// total deviation from them.
const DEGREE_GOALS: [(usize, u32, u32); 2] = [(1, 3, 3), (3, 2, 2)];

fn score(a: &[[u32; 5]; 5], assigned: &[bool; 10]) -> u32 {
    let mut s = 0;
    for &(v, want_in, want_out) in &DEGREE_GOALS {
        let (mut din, mut dout) = (0, 0);
        let (mut open_in, mut open_out) = (false, false);
        for (k, &(t, h)) in SLOTS.iter().enumerate() {
            if h == v {
                din += a[t][h];
                open_in |= !assigned[k];
            }
            if t == v {
                dout += a[t][h];
                open_out |= !assigned[k];
            }
        }
        let dev = |d: u32, want: u32, open: bool| if open { d.saturating_sub(want) } else { d.abs_diff(want) };
        s += dev(din, want_in, open_in) + dev(dout, want_out, open_out);
    }
    s
}

fn power_counts(a: &[[u32; 5]; 5], r: usize) -> [[u128; 5]; 5] {
    let mut p = [[0u128; 5]; 5];
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = 1;
    }
    for _ in 0..r {
        let mut next = [[0u128; 5]; 5];
        for i in 0..5 {
            for k in 0..5 {
                if p[i][k] == 0 {
                    continue;
                }
                for j in 0..5 {
                    next[i][j] += p[i][k] * a[k][j] as u128;
                }
            }
        }
        p = next;
    }
    p
}

/// Position in [`SLOTS`] of the last slot lying on some length-`r` path from
/// `i` to `j`, or `None` if there is no such path.
fn last_slot(r: usize, i: usize, j: usize) -> Option<usize> {
    let mut last = None;
    let mut stack = vec![(i, 0usize, None::<usize>)];
    while let Some((v, len, hi)) = stack.pop() {
        if len == r {
            if v == j {
                last = last.max(hi);
            }
            continue;
        }
        for (k, &(t, h)) in SLOTS.iter().enumerate() {
            if t == v {
                stack.push((h, len + 1, hi.max(Some(k))));
            }
        }
    }
    last
}

/// With unassigned slots at zero every count is a lower bound, so a count
/// above its target rules the partial assignment out. Counts whose slots
/// are all among the first `assigned` must match exactly.
fn within_bounds(a: &[[u32; 5]; 5], data: &PathData, last: &[[[Option<usize>; 5]; 5]], assigned: usize) -> bool {
    for (n, (r, _)) in data.targets.iter().enumerate() {
        let p = power_counts(a, *r);
        for i in 0..5 {
            for j in 0..5 {
                let t = data.target(*r, i, j).unwrap_or(0);
                let fixed = last[n][i][j].map_or(true, |k| k < assigned);
                if p[i][j] > t || (fixed && p[i][j] != t) {
                    return false;
                }
            }
        }
    }
    true
}

struct Search<'a> {
    data: &'a PathData,
    a: [[u32; 5]; 5],
    assigned: [bool; 10],
    last: Vec<[[Option<usize>; 5]; 5]>,
    best: Option<((u32, u32), Vec<u32>)>,
}

impl Search<'_> {
    fn key(&self) -> (u32, u32) {
        (score(&self.a, &self.assigned), SLOTS.iter().map(|&(t, h)| self.a[t][h]).sum())
    }

    /// True if some count already exceeds its target, which only gets worse
    /// as slot `k` grows.
    fn exceeds(&self, k: usize) -> bool {
        !within_bounds(&self.a, self.data, &self.last, k)
    }

    fn run(&mut self, k: usize) {
        if let Some((best, _)) = &self.best {
            if self.key() > *best {
                return;
            }
        }
        if k == SLOTS.len() {
            if !within_bounds(&self.a, self.data, &self.last, SLOTS.len()) {
                return;
            }
            let key = self.key();
            let values: Vec<u32> = SLOTS.iter().map(|&(t, h)| self.a[t][h]).collect();
            let better = match &self.best {
                None => true,
                Some((b, v)) => (key, &values) < (*b, v),
            };
            if better {
                self.best = Some((key, values));
            }
            return;
        }
        let (t, h) = SLOTS[k];
        self.assigned[k] = true;
        for m in 0..=MAX_MULTIPLICITY {
            self.a[t][h] = m;
            if !within_bounds(&self.a, self.data, &self.last, k + 1) {
                if self.exceeds(k) {
                    break;
                }
                continue;
            }
            self.run(k + 1);
        }
        self.a[t][h] = 0;
        self.assigned[k] = false;
    }
}

/// Arrow multiplicities `(tail, head, count)` of the best solution: the
/// fewest deviations from the preferred degrees, then the fewest arrows,
/// then the lexicographically smallest slot vector.
pub fn search_gamma(data: &PathData) -> Option<Vec<(usize, usize, u32)>> {
    let last = data
        .targets
        .iter()
        .map(|(r, _)| std::array::from_fn(|i| std::array::from_fn(|j| last_slot(*r, i, j))))
        .collect();
    let mut s = Search { data, a: [[0; 5]; 5], assigned: [false; 10], last, best: None };
    s.run(0);
    let (_, values) = s.best?;
    let mut arrows: Vec<(usize, usize, u32)> =
        SLOTS.iter().zip(values).filter(|(_, m)| *m > 0).map(|(&(t, h), m)| (t, h, m)).collect();
    arrows.sort_unstable_by_key(|&(t, h, _)| (Reverse(t), Reverse(h)));
    Some(arrows)
}

fn critical_labels() -> Vec<String> {
    (1..=5).map(|i| format!("c{i}")).collect()
}

fn critical_grading() -> Vec<Rat> {
    (0..5).map(|k| Rat::from_i64(2 * k).unwrap()).collect()
}

/// Builds `gamma1`, `gamma2` or `gamma3`, graded by `0 < 2 < 4 < 6 < 8`.
pub fn gamma(which: usize) -> Result<RQuiver> {
    let data = gamma_data(which).ok_or_else(|| Error::Invalid(format!("no quiver gamma{which}")))?;
    let arrows = search_gamma(&data)
        .ok_or_else(|| Error::Invariant(format!("gamma{which}: no quiver satisfies the path counts")))?;
    let mut q = Quiver::new(critical_labels());
    for (t, h, m) in arrows {
        q.add_arrows(t, h, m as usize);
    }
    for (r, _) in &data.targets {
        let p = path_count_matrix(&q, *r);
        for (i, row) in p.iter().enumerate() {
            for (j, &count) in row.iter().enumerate() {
                debug_assert_eq!(count, data.target(*r, i, j).unwrap_or(0));
            }
        }
    }
    RQuiver::new(q, critical_grading())
}

/// Two vertices joined by two parallel arrows.
pub fn bott_quiver() -> RQuiver {
    let mut q = Quiver::new(vec!["c1".into(), "c2".into()]);
    q.add_arrows(1, 0, 2);
    RQuiver::new(q, vec![Rat::from_i64(0).unwrap(), Rat::from_i64(1).unwrap()]).expect("graded")
}

/// Names accepted by [`build_quiver`].
pub const QUIVER_NAMES: &[&str] = &["gamma1", "gamma2", "gamma3", "bott_quiver"];

/// Builds a named quiver fixture.
pub fn build_quiver(name: &str) -> Result<RQuiver> {
    match name {
        "gamma1" => gamma(1),
        "gamma2" => gamma(2),
        "gamma3" => gamma(3),
        "bott_quiver" => Ok(bott_quiver()),
        _ => Err(Error::Invalid(format!("unknown quiver fixture {name:?}"))),
    }
}
