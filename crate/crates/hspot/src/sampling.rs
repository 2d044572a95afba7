//! Seeded sampling of inequality families with a local search for the supremum of
//! `lhs/rhs`.
//!
//! Every sample draws its randomness through a [`Replay`] source that records the words it
//! consumed. Perturbing those words and replaying gives a nearby point of the same region, so
//! the best samples can be improved by a random hill climb.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::report::VerificationReport;

/// Random source that replays stored words, then falls back to fresh ones and records them.
pub(crate) struct Replay {
    words: Vec<u64>,
    pos: usize,
    fresh: ChaCha8Rng,
}

impl Replay {
    fn new(seed: u64) -> Self {
        Self::with_words(Vec::new(), seed)
    }

    fn with_words(words: Vec<u64>, seed: u64) -> Self {
        Self { words, pos: 0, fresh: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn into_words(mut self) -> Vec<u64> {
        self.words.truncate(self.pos);
        self.words
    }
}

impl RngCore for Replay {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        if self.pos == self.words.len() {
            let w = self.fresh.next_u64();
            self.words.push(w);
        }
        self.pos += 1;
        self.words[self.pos - 1]
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

const CANDIDATES: usize = 32;
const STEPS: usize = 1500;

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

struct Sample {
    ratio: f64,
    words: Vec<u64>,
}

fn draw_all<F>(samples: usize, seed: u64, draw: &mut F) -> Result<Vec<Sample>>
where
    F: FnMut(&mut Replay) -> Result<(f64, f64)>,
{
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let mut src = Replay::new(master.next_u64());
            let (lhs, rhs) = draw(&mut src)?;
            Ok(Sample { ratio: ratio(lhs, rhs), words: src.into_words() })
        })
        .collect()
}

/// Raw ratios `lhs/rhs`, one per sample.
pub(crate) fn sample_ratios<F>(samples: usize, seed: u64, mut draw: F) -> Result<Vec<f64>>
where
    F: FnMut(&mut Replay) -> Result<(f64, f64)>,
{
    Ok(draw_all(samples, seed, &mut draw)?.into_iter().map(|s| s.ratio).collect())
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Growth of a single climb beyond which the ratio is treated as unbounded.
const DIVERGENCE: f64 = 1e6;

/// Largest ratio reachable from the best samples by shrinking random perturbations, with the
/// largest factor by which one climb improved on its starting sample.
fn refine<F>(pool: &[Sample], seed: u64, draw: &mut F) -> (f64, f64)
where
    F: FnMut(&mut Replay) -> Result<(f64, f64)>,
{
    let mut order: Vec<&Sample> = pool.iter().filter(|s| s.ratio.is_finite()).collect();
    order.sort_by(|a, b| b.ratio.total_cmp(&a.ratio));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut best = pool.iter().map(|s| s.ratio).fold(0.0f64, f64::max);
    let mut growth = 1.0f64;
    for start in order.into_iter().take(CANDIDATES) {
        let (mut cur, mut words) = (start.ratio, start.words.clone());
        let mut width = 0.05;
        for step in 0..STEPS {
            if width < 1e-10 {
                // converged; restart with wide moves from the current best
                width = 0.05;
            }
            let scale = width * u64::MAX as f64;
            // alternate moves along one coordinate with moves along all of them
            let only = if step % 2 == 0 { Some(rng.gen_range(0..words.len().max(1))) } else { None };
            let trial: Vec<u64> = words
                .iter()
                .enumerate()
                .map(|(i, &w)| {
                    if only.is_some_and(|j| j != i) {
                        return w;
                    }
                    (w as f64 + gaussian(&mut rng) * scale).clamp(0.0, u64::MAX as f64) as u64
                })
                .collect();
            let mut src = Replay::with_words(trial, rng.next_u64());
            if let Ok((lhs, rhs)) = draw(&mut src) {
                let r = ratio(lhs, rhs);
                if r.is_finite() && r > cur {
                    cur = r;
                    words = src.into_words();
                    width = (width * 2.0).min(0.25);
                    continue;
                }
            }
            width *= 0.97;
        }
        best = best.max(cur);
        if start.ratio > 0.0 {
            growth = growth.max(cur / start.ratio);
        }
    }
    (best, growth)
}

/// Explicit-constant families pass when every raw ratio is at most one. Families with an
/// unnamed constant pass when the refined supremum over all samples is at most twice the
/// refined supremum over the first tenth and no climb grows without bound.
pub(crate) fn bound_report<F>(
    name: &str,
    explicit: bool,
    samples: usize,
    seed: u64,
    anchor: &str,
    mut draw: F,
) -> Result<VerificationReport>
where
    F: FnMut(&mut Replay) -> Result<(f64, f64)>,
{
    let pool = draw_all(samples, seed, &mut draw)?;
    if pool.iter().any(|s| s.ratio.is_nan()) {
        return Ok(VerificationReport::at_most(format!("{name} n={samples} nan-ratio"), f64::NAN, 1.0, 0.0, anchor));
    }
    if explicit {
        let violations = pool.iter().filter(|s| !(s.ratio <= 1.0 + 1e-12)).count();
        let sup = pool.iter().map(|s| s.ratio).fold(0.0f64, f64::max);
        return Ok(VerificationReport::at_most(
            format!("{name} n={samples} violations={violations}"),
            sup,
            1.0,
            1e-12,
            anchor,
        ));
    }
    let head = (samples / 10).max(1).min(samples);
    let (small, g1) = refine(&pool[..head], seed, &mut draw);
    let (large, g2) = refine(&pool, seed.wrapping_add(1), &mut draw);
    let large = large.max(small);
    if g1.max(g2) > DIVERGENCE {
        let check = format!("{name} n={samples} fitted-constant diverging");
        return Ok(VerificationReport::with_verdict(check, large, 2.0 * small, 0.0, false, anchor));
    }
    Ok(VerificationReport::at_most(format!("{name} n={samples} fitted-constant"), large, 2.0 * small, 0.0, anchor))
}
