//! Deterministic sampling helpers shared by the estimators: low-discrepancy
//! directions, golden-section line search and a coordinate polish.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Which side of the true extremum an empirical estimate lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    /// Empirical infimum: the true value is at most this.
    Upper,
    /// Empirical supremum: the true value is at least this.
    Lower,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub samples: usize,
    pub seed: u64,
    /// Coordinate-polish sweeps applied to each refined candidate.
    pub refine_iters: usize,
    /// Number of best raw candidates handed to the polish.
    pub refine_top: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            samples: 4096,
            seed: 42,
            refine_iters: 200,
            refine_top: 4,
        }
    }
}

impl SamplerConfig {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

const PRIMES: [u32; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// Halton sequence in `[0,1)^dim` with a seeded Cranley-Patterson rotation.
#[derive(Debug, Clone)]
pub struct Halton {
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim <= PRIMES.len(), "Halton dimension too large");
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let shift = (0..dim).map(|_| rng.gen::<f64>()).collect();
        Halton { shift, index: 1 }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        self.shift
            .iter()
            .enumerate()
            .map(|(k, s)| (radical_inverse(i, PRIMES[k]) + s).fract())
            .collect()
    }
}

/// Low-discrepancy directions on the Euclidean sphere of `R^dim`.
///
/// In two dimensions the angles are an evenly spaced rotated grid; above that
/// Halton points are pushed through Box-Muller and normalized.
pub struct DirectionSampler {
    dim: usize,
    count: usize,
    k: usize,
    offset: f64,
    halton: Option<Halton>,
}

impl DirectionSampler {
    pub fn new(dim: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offset = rng.gen::<f64>();
        let halton = if dim > 2 {
            Some(Halton::new(2 * dim.div_ceil(2), seed))
        } else {
            None
        };
        DirectionSampler {
            dim,
            count: count.max(1),
            k: 0,
            offset,
            halton,
        }
    }

    pub fn next_direction(&mut self) -> Vec<f64> {
        let k = self.k;
        self.k += 1;
        match self.dim {
            1 => vec![if k % 2 == 0 { 1.0 } else { -1.0 }],
            2 => {
                let a = std::f64::consts::TAU * ((k as f64 + self.offset) / self.count as f64);
                vec![a.cos(), a.sin()]
            }
            _ => {
                let u = self.halton.as_mut().unwrap().next_point();
                let mut v = Vec::with_capacity(self.dim);
                for pair in u.chunks(2) {
                    let r = (-2.0 * (1.0 - pair[0]).ln()).sqrt();
                    let th = std::f64::consts::TAU * pair[1];
                    v.push(r * th.cos());
                    v.push(r * th.sin());
                }
                v.truncate(self.dim);
                let n = euclid(&v);
                if n < 1e-12 {
                    let mut e = vec![0.0; self.dim];
                    e[k % self.dim] = 1.0;
                    e
                } else {
                    v.iter().map(|c| c / n).collect()
                }
            }
        }
    }
}

pub fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Signed coordinate axes `±e_i`, used as deterministic extreme candidates.
pub fn axis_directions(dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = s;
            out.push(e);
        }
    }
    out
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal function on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Derivative-free coordinate polish: for each coordinate, a golden-section
/// search on a bracket of half-width `width` around the current point; the
/// bracket halves after a sweep with no improvement. Minimizes `f`.
pub fn coordinate_polish<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    start: &[f64],
    width: f64,
    sweeps: usize,
) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut fx = f(&x);
    let mut w = width;
    let mut probe = x.clone();
    for _ in 0..sweeps {
        if w < 1e-13 {
            break;
        }
        let mut improved = false;
        for i in 0..x.len() {
            let base = x[i];
            let (s, fs) = golden_section(
                |s| {
                    probe.copy_from_slice(&x);
                    probe[i] = base + s;
                    f(&probe)
                },
                -w,
                w,
                40,
            );
            if fs < fx {
                x[i] = base + s;
                fx = fs;
                improved = true;
            }
        }
        if !improved {
            w *= 0.5;
        }
    }
    (x, fx)
}

/// Keeps the `k` lowest-scoring items seen so far, ties resolved by arrival order.
#[derive(Debug, Clone)]
pub struct TopK<T> {
    k: usize,
    items: Vec<(f64, T)>,
}

impl<T> TopK<T> {
    pub fn new(k: usize) -> Self {
        TopK {
            k: k.max(1),
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, score: f64, item: T) {
        if !score.is_finite() {
            return;
        }
        if self.items.len() == self.k && score >= self.items[self.k - 1].0 {
            return;
        }
        let pos = self.items.partition_point(|(s, _)| *s <= score);
        self.items.insert(pos, (score, item));
        self.items.truncate(self.k);
    }

    pub fn into_vec(self) -> Vec<(f64, T)> {
        self.items
    }

    pub fn best(&self) -> Option<&(f64, T)> {
        self.items.first()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 80);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polish_reaches_separable_minimum() {
        let mut f = |v: &[f64]| (v[0] - 1.0).powi(2) + 3.0 * (v[1] + 2.0).powi(2);
        let (x, fx) = coordinate_polish(&mut f, &[0.0, 0.0], 4.0, 200);
        assert!((x[0] - 1.0).abs() < 1e-7 && (x[1] + 2.0).abs() < 1e-7);
        assert!(fx < 1e-13);
    }

    #[test]
    fn directions_are_unit_and_deterministic() {
        for dim in 1..6 {
            let mut a = DirectionSampler::new(dim, 64, 7);
            let mut b = DirectionSampler::new(dim, 64, 7);
            for _ in 0..64 {
                let u = a.next_direction();
                assert_eq!(u, b.next_direction());
                assert!((euclid(&u) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn top_k_keeps_smallest() {
        let mut t = TopK::new(3);
        for (i, s) in [5.0, 1.0, 4.0, 0.5, 3.0, f64::NAN].iter().enumerate() {
            t.push(*s, i);
        }
        let v: Vec<usize> = t.into_vec().into_iter().map(|(_, i)| i).collect();
        assert_eq!(v, vec![3, 1, 4]);
    }
}
