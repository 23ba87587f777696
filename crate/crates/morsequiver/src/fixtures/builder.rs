use std::collections::HashSet;

use crate::chains::SimplicialComplex;
use crate::scalarfield::{Rat, ScalarField};

/// A cycle of vertices with angular positions in [0, 1), used for zipping.
#[derive(Clone, Debug)]
pub struct Loop {
    pub verts: Vec<u32>,
    pub angles: Vec<f64>,
}

impl Loop {
    /// Evenly spaced positions starting at index `start` (placed at angle 0).
    pub fn uniform(verts: &[u32], start: usize) -> Loop {
        let n = verts.len();
        Loop {
            verts: (0..n).map(|k| verts[(start + k) % n]).collect(),
            angles: (0..n).map(|k| k as f64 / n as f64).collect(),
        }
    }

    /// Loop through a pinch vertex `s` (angle 0) followed by an arc of ring
    /// vertices spread over [gap, 1 − gap].
    pub fn pinched(s: u32, arc: &[u32], gap: f64) -> Loop {
        let m = arc.len();
        let mut verts = vec![s];
        let mut angles = vec![0.0];
        for (k, &v) in arc.iter().enumerate() {
            verts.push(v);
            let t = if m == 1 { 0.5 } else { k as f64 / (m - 1) as f64 };
            angles.push(gap + t * (1.0 - 2.0 * gap));
        }
        Loop { verts, angles }
    }
}

/// Incremental builder for closed or bounded triangulated surfaces.
#[derive(Clone, Debug, Default)]
pub struct SurfaceBuilder {
    values: Vec<Rat>,
    tris: Vec<Vec<u32>>,
}

impl SurfaceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, value: Rat) -> u32 {
        self.values.push(value);
        (self.values.len() - 1) as u32
    }

    /// Ring of `n` vertices at height `h`, alternating `h − eps` and `h + eps`;
    /// index 0 is low when `low_even` holds.
    pub fn ring(&mut self, n: usize, h: &Rat, eps: &Rat, low_even: bool) -> Vec<u32> {
        (0..n)
            .map(|i| {
                let low = (i % 2 == 0) == low_even;
                self.vertex(if low { h - eps } else { h + eps })
            })
            .collect()
    }

    /// Ring of `n` vertices all at height `h` (a plateau circle).
    pub fn flat_ring(&mut self, n: usize, h: &Rat) -> Vec<u32> {
        (0..n).map(|_| self.vertex(h.clone())).collect()
    }

    pub fn triangle(&mut self, a: u32, b: u32, c: u32) {
        self.tris.push(vec![a, b, c]);
    }

    /// Cone from `apex` over a cycle.
    pub fn cone(&mut self, apex: u32, ring: &[u32]) {
        for k in 0..ring.len() {
            self.triangle(apex, ring[k], ring[(k + 1) % ring.len()]);
        }
    }

    /// Annulus between two cycles, merging vertices by angular position.
    pub fn zip(&mut self, lower: &Loop, upper: &Loop) {
        let (p, q) = (lower.verts.len(), upper.verts.len());
        let angle = |l: &Loop, k: usize| {
            let n = l.verts.len();
            l.angles[k % n] + (k / n) as f64
        };
        let (mut i, mut j) = (0, 0);
        while i < p || j < q {
            let advance_lower = j == q || (i < p && angle(lower, i + 1) <= angle(upper, j + 1));
            if advance_lower {
                self.triangle(lower.verts[i % p], lower.verts[(i + 1) % p], upper.verts[j % q]);
                i += 1;
            } else {
                self.triangle(lower.verts[i % p], upper.verts[j % q], upper.verts[(j + 1) % q]);
                j += 1;
            }
        }
    }

    /// Annulus between two rings, each starting at its own index 0.
    pub fn zip_rings(&mut self, lower: &[u32], upper: &[u32]) {
        self.zip(&Loop::uniform(lower, 0), &Loop::uniform(upper, 0));
    }

    /// Stack of rings zipped consecutively.
    pub fn tube(&mut self, rings: &[Vec<u32>]) {
        for w in rings.windows(2) {
            self.zip_rings(&w[0], &w[1]);
        }
    }

    /// Finishes the surface; panics if two triangles coincide.
    pub fn finish(self) -> ScalarField {
        let mut seen = HashSet::new();
        for t in &self.tris {
            let mut s = t.clone();
            s.sort_unstable();
            assert!(seen.insert(s), "duplicate triangle {t:?}");
        }
        let cx = SimplicialComplex::from_facets(self.values.len(), self.tris).expect("valid triangulation");
        ScalarField::new(cx, self.values).expect("value per vertex")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{homology, ChainComplex, FieldTag};
    use crate::scalarfield::{int, rat};

    #[test]
    fn zipped_sphere() {
        let mut b = SurfaceBuilder::new();
        let lo = b.vertex(int(0));
        let hi = b.vertex(int(3));
        let r1 = b.ring(6, &int(1), &rat(1, 8), true);
        let r2 = b.ring(8, &int(2), &rat(1, 8), true);
        b.cone(lo, &r1);
        b.zip_rings(&r1, &r2);
        b.cone(hi, &r2);
        let sf = b.finish();
        let h = homology(&ChainComplex::of_complex(&sf.complex, FieldTag::F2), FieldTag::F2);
        assert_eq!(h.coefficients(), &[1, 0, 1]);
    }

    #[test]
    fn pinched_loop_fan() {
        let mut b = SurfaceBuilder::new();
        let s = b.vertex(int(1));
        let arc = b.ring(5, &int(0), &rat(1, 8), true);
        let up = b.ring(8, &int(2), &rat(1, 8), true);
        b.zip(&Loop::pinched(s, &arc, 1.5 / 8.0), &Loop::uniform(&up, 0));
        let sf = b.finish();
        // the pinch vertex sees exactly three upper vertices
        let nb: Vec<u32> = sf.complex.neighbors(s).into_iter().filter(|v| up.contains(v)).collect();
        assert_eq!(nb.len(), 3);
    }
}
