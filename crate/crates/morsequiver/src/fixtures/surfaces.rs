use super::builder::{Loop, SurfaceBuilder};
use crate::scalarfield::{int, Rat, ScalarField};

/// Mesh resolution shared by the surface fixtures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resolution {
    /// Rings per segment between consecutive critical levels.
    pub levels: usize,
    /// Vertices per tube ring (multiple of 4).
    pub tube: usize,
    /// Vertices per waist ring (multiple of 12).
    pub waist: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            levels: 3,
            tube: 12,
            waist: 24,
        }
    }
}

impl Resolution {
    pub fn validate(&self) -> Result<(), String> {
        if self.levels < 2 {
            return Err("at least 2 rings per segment are needed".into());
        }
        if self.tube < 8 || self.tube % 4 != 0 {
            return Err("tube rings need a multiple of 4 vertices, at least 8".into());
        }
        if self.waist < 12 || self.waist % 12 != 0 {
            return Err("waist rings need a multiple of 12 vertices".into());
        }
        Ok(())
    }
}

/// `count` rings strictly between heights `lo` and `hi`.
fn rings(b: &mut SurfaceBuilder, n: usize, lo: i64, hi: i64, count: usize, low_even: bool) -> Vec<Vec<u32>> {
    let step = Rat::new((hi - lo).into(), ((count + 1) as i64).into());
    let eps = &step / int(8);
    (1..=count)
        .map(|k| {
            let h = int(lo) + &step * int(k as i64);
            b.ring(n, &h, &eps, low_even)
        })
        .collect()
}

/// Gap between the pinch vertex and the arc so that it fans over three
/// vertices of a ring of length `m`.
fn fan_gap(m: usize) -> f64 {
    1.5 / m as f64
}

/// Splits the top ring of a tube into branches at the given cut indices.
/// Returns the loop for each branch (pinch vertex first).
fn branch_loops(s: u32, ring: &[u32], cuts: &[usize], m: usize) -> Vec<Loop> {
    let n = ring.len();
    (0..cuts.len())
        .map(|i| {
            let a = cuts[i];
            let mut bnd = cuts[(i + 1) % cuts.len()];
            if bnd <= a {
                bnd += n;
            }
            let arc: Vec<u32> = (a..=bnd).map(|k| ring[k % n]).collect();
            Loop::pinched(s, &arc, fan_gap(m))
        })
        .collect()
}

/// Pinch `s` splits `waist` upward into branches whose first rings are given;
/// each branch ring fans at index 0.
fn split_up(b: &mut SurfaceBuilder, s: u32, waist: &[u32], cuts: &[usize], firsts: &[Vec<u32>]) {
    let loops = branch_loops(s, waist, cuts, firsts[0].len());
    for (l, up) in loops.iter().zip(firsts) {
        b.zip(l, &Loop::uniform(up, 0));
    }
}

/// Pinch `s` merges branches (last rings given, fanning at `fan`) upward
/// into `waist`.
fn merge_up(b: &mut SurfaceBuilder, s: u32, lasts: &[Vec<u32>], fan: usize, waist: &[u32], cuts: &[usize]) {
    let loops = branch_loops(s, waist, cuts, lasts[0].len());
    for (l, down) in loops.iter().zip(lasts) {
        b.zip(&Loop::uniform(down, fan), l);
    }
}

pub fn sphere(res: Resolution) -> ScalarField {
    let mut b = SurfaceBuilder::new();
    let lo = b.vertex(int(0));
    let hi = b.vertex(int(2));
    let rs = rings(&mut b, res.waist, 0, 2, 2 * res.levels, true);
    b.cone(lo, &rs[0]);
    b.tube(&rs);
    b.cone(hi, rs.last().unwrap());
    b.finish()
}

/// Height function on an upright torus: min, split saddle, merge saddle, max.
///
/// With `axisymmetric` the merge saddle's fan sits directly above the split
/// saddle's fan, so descending flow from the upper saddle reaches the lower.
pub fn torus_standard(res: Resolution, axisymmetric: bool) -> ScalarField {
    let (n, m, l) = (res.waist, res.tube, res.levels);
    let mut b = SurfaceBuilder::new();
    let c: Vec<u32> = (0..4).map(|k| b.vertex(int(2 * k))).collect();
    let bottom = rings(&mut b, n, 0, 2, l, true);
    let tubes: Vec<Vec<Vec<u32>>> = (0..2).map(|_| rings(&mut b, m, 2, 4, l, true)).collect();
    let top = rings(&mut b, n, 4, 6, l, false);
    let cuts = [n / 4, 3 * n / 4];
    let fan = if axisymmetric { 0 } else { m / 2 };

    b.cone(c[0], &bottom[0]);
    b.tube(&bottom);
    let firsts: Vec<Vec<u32>> = tubes.iter().map(|t| t[0].clone()).collect();
    split_up(&mut b, c[1], bottom.last().unwrap(), &cuts, &firsts);
    for t in &tubes {
        b.tube(t);
    }
    let lasts: Vec<Vec<u32>> = tubes.iter().map(|t| t.last().unwrap().clone()).collect();
    merge_up(&mut b, c[2], &lasts, fan, &top[0], &cuts);
    b.tube(&top);
    b.cone(c[3], top.last().unwrap());
    b.finish()
}

/// Torus whose second critical point is a monkey saddle splitting one circle
/// into three: one branch is capped by a local maximum, the other two merge
/// at an ordinary saddle below the global maximum.
pub fn torus_degenerate(res: Resolution) -> ScalarField {
    let (n, m, l) = (res.waist, res.tube, res.levels);
    let mut b = SurfaceBuilder::new();
    let c: Vec<u32> = (0..5).map(|k| b.vertex(int(2 * k))).collect();
    let bottom = rings(&mut b, n, 0, 2, l, true);
    let p = rings(&mut b, m, 2, 4, l, true);
    let q = rings(&mut b, m, 2, 6, 2 * l, true);
    let s = rings(&mut b, m, 2, 6, 2 * l, true);
    let top = rings(&mut b, n, 6, 8, l, false);

    b.cone(c[0], &bottom[0]);
    b.tube(&bottom);
    split_up(
        &mut b,
        c[1],
        bottom.last().unwrap(),
        &[0, n / 3, 2 * n / 3],
        &[p[0].clone(), q[0].clone(), s[0].clone()],
    );
    b.tube(&p);
    b.cone(c[2], p.last().unwrap());
    b.tube(&q);
    b.tube(&s);
    merge_up(
        &mut b,
        c[3],
        &[q.last().unwrap().clone(), s.last().unwrap().clone()],
        m / 2,
        &top[0],
        &[n / 4, 3 * n / 4],
    );
    b.tube(&top);
    b.cone(c[4], top.last().unwrap());
    b.finish()
}

/// Torus lying on its side: the height has a circle of minima and a circle of
/// maxima.
pub fn torus_bott(res: Resolution) -> ScalarField {
    let (m, l) = (res.tube, res.levels);
    let mut b = SurfaceBuilder::new();
    let cmin = b.flat_ring(m, &int(0));
    let cmax = b.flat_ring(m, &int(2));
    let up = rings(&mut b, m, 0, 2, l, true);
    let mut down = rings(&mut b, m, 0, 2, l, true);
    down.reverse();
    b.zip_rings(&cmin, &up[0]);
    b.tube(&up);
    b.zip_rings(up.last().unwrap(), &cmax);
    b.zip_rings(&cmax, &down[0]);
    b.tube(&down);
    b.zip_rings(down.last().unwrap(), &cmin);
    b.finish()
}

/// Genus-2 surface with a monkey saddle, two Morse–Bott maximum circles and
/// two minima.
///
/// Values: c1 = 0 (min), c7 = 1 (min), c2 = 2 (monkey saddle), c6 = 3
/// (split saddle), C3 = 4 (max circle), c4 = 6 (merge saddle), C5 = 8 (max
/// circle).
pub fn genus2(res: Resolution) -> ScalarField {
    let (n, m, l) = (res.waist, res.tube, res.levels);
    let mut b = SurfaceBuilder::new();
    let c1 = b.vertex(int(0));
    let c7 = b.vertex(int(1));
    let c2 = b.vertex(int(2));
    let c6 = b.vertex(int(3));
    let c3 = b.flat_ring(m, &int(4));
    let c4 = b.vertex(int(6));
    let c5 = b.flat_ring(n, &int(8));

    // first sheet: c1, c2, branches P Q S, Q and S merge at c4 into T
    let w1 = rings(&mut b, n, 0, 2, l, true);
    let p = rings(&mut b, m, 2, 4, l, true);
    let q = rings(&mut b, m, 2, 6, 2 * l, true);
    let s = rings(&mut b, m, 2, 6, 2 * l, true);
    let t = rings(&mut b, n, 6, 8, l, false);
    // second sheet: c7, c6 splits into D3 and D5
    let w2 = rings(&mut b, n, 1, 3, l, true);
    let d3 = rings(&mut b, m, 3, 4, l, true);
    let d5 = rings(&mut b, n, 3, 8, 3 * l, true);

    b.cone(c1, &w1[0]);
    b.tube(&w1);
    split_up(
        &mut b,
        c2,
        w1.last().unwrap(),
        &[0, n / 3, 2 * n / 3],
        &[p[0].clone(), q[0].clone(), s[0].clone()],
    );
    b.tube(&p);
    b.zip_rings(p.last().unwrap(), &c3);
    b.tube(&q);
    b.tube(&s);
    merge_up(
        &mut b,
        c4,
        &[q.last().unwrap().clone(), s.last().unwrap().clone()],
        m / 2,
        &t[0],
        &[n / 4, 3 * n / 4],
    );
    b.tube(&t);
    b.zip_rings(t.last().unwrap(), &c5);

    b.cone(c7, &w2[0]);
    b.tube(&w2);
    let d5_first = d5[0].clone();
    let loops = branch_loops(c6, w2.last().unwrap(), &[n / 4, 3 * n / 4], m);
    b.zip(&loops[0], &Loop::uniform(&d3[0], 0));
    b.zip(&loops[1], &Loop::uniform(&d5_first, 0));
    b.tube(&d3);
    b.zip_rings(d3.last().unwrap(), &c3);
    b.tube(&d5);
    b.zip_rings(d5.last().unwrap(), &c5);
    b.finish()
}

/// Disk of concentric rings around a centre at value 0; ring `k` vertex `i`
/// has value `k * pattern[i mod len]`.
fn chart(res: Resolution, pattern: &[i64]) -> ScalarField {
    let m = 12;
    let mut b = SurfaceBuilder::new();
    let centre = b.vertex(int(0));
    let rs: Vec<Vec<u32>> = (1..=res.levels + 1)
        .map(|k| {
            (0..m)
                .map(|i| b.vertex(int(k as i64 * pattern[i % pattern.len()])))
                .collect()
        })
        .collect();
    b.cone(centre, &rs[0]);
    b.tube(&rs);
    b.finish()
}

/// Disk around a monkey saddle: three rising and three falling sectors.
pub fn hexagon_chart(res: Resolution) -> ScalarField {
    chart(res, &[3, 1, -3, -1])
}

/// Disk around a nondegenerate saddle.
pub fn saddle_chart(res: Resolution) -> ScalarField {
    chart(res, &[3, 1, 3, -3, -1, -3])
}
