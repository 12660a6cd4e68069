use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::RdsSpec;
use crate::scalar::Scalar;
use crate::Rational;

/// Independent ChaCha streams carved out of one trial key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    /// Draws for times `0, 1, 2, …`.
    Forward = 0,
    /// Draws for times `−1, −2, …`.
    Backward = 1,
    /// Measurement noise (the `y` coordinate of patterns).
    Auxiliary = 2,
    /// Sample points for sup estimates.
    Sampling = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// I.i.d. exponent choices `j` with `P(j) = q_j`, indexed by integer time.
///
/// `draw(t)` is the exponent used by `φ(θ^t ω)`. Every draw is a pure
/// function of `(seed, trial, t)`, so shifting and splitting streams never
/// depends on how far an earlier consumer read.
#[derive(Clone, Debug)]
pub struct NoiseProcess {
    cumulative: Vec<f64>,
    key: u64,
    offset: i64,
}

impl NoiseProcess {
    pub fn new(probabilities: &[Rational], seed: u64, trial: u64) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probabilities
            .iter()
            .map(|q| {
                acc += Scalar::to_f64(q);
                acc
            })
            .collect();
        if let Some(last) = cumulative.last_mut() {
            *last = f64::INFINITY;
        }
        let key = splitmix64(seed ^ splitmix64(trial.wrapping_add(0x5EED)));
        NoiseProcess { cumulative, key, offset: 0 }
    }

    pub fn for_spec(spec: &RdsSpec, trial: u64) -> Self {
        Self::new(spec.probabilities(), spec.seed(), trial)
    }

    /// The noise seen from `θ^m ω`.
    pub fn shifted(&self, m: i64) -> Self {
        NoiseProcess { offset: self.offset + m, ..self.clone() }
    }

    pub fn rng(&self, stream: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.key);
        rng.set_stream(stream as u64);
        rng
    }

    fn choose(&self, word: u64) -> usize {
        let u = (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        self.cumulative.iter().position(|&c| u < c).unwrap_or(self.cumulative.len() - 1)
    }

    fn locate(&self, t: i64) -> (Stream, u64) {
        let abs = self.offset + t;
        if abs >= 0 {
            (Stream::Forward, abs as u64)
        } else {
            (Stream::Backward, (-abs - 1) as u64)
        }
    }

    fn word_at(&self, stream: Stream, pos: u64) -> ChaCha8Rng {
        let mut rng = self.rng(stream);
        rng.set_word_pos(2 * pos as u128);
        rng
    }

    pub fn draw(&self, t: i64) -> usize {
        let (stream, pos) = self.locate(t);
        self.choose(self.word_at(stream, pos).next_u64())
    }

    /// Draws for times `0, 1, 2, …`.
    pub fn forward(&self) -> impl Iterator<Item = usize> + '_ {
        self.sequence(0, 1)
    }

    /// Draws for times `−1, −2, …`, as used by pullback products.
    pub fn backward(&self) -> impl Iterator<Item = usize> + '_ {
        self.sequence(-1, -1)
    }

    fn sequence(&self, start: i64, dir: i64) -> impl Iterator<Item = usize> + '_ {
        let mut t = start;
        let mut cached: Option<(Stream, u64, ChaCha8Rng)> = None;
        std::iter::from_fn(move || {
            let (stream, pos) = self.locate(t);
            t += dir;
            // stream positions grow only while moving away from time 0
            if (stream == Stream::Forward) != (dir > 0) {
                return Some(self.draw(t - dir));
            }
            let word = match &mut cached {
                Some((s, next, rng)) if *s == stream && *next == pos => {
                    *next += 1;
                    rng.next_u64()
                }
                _ => {
                    let mut rng = self.word_at(stream, pos);
                    let word = rng.next_u64();
                    cached = Some((stream, pos + 1, rng));
                    word
                }
            };
            Some(self.choose(word))
        })
    }
}
