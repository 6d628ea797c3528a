//! Pilot sequences, observation synthesis and the count reduction of binary
//! observations.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::log_q;

/// Ordering of the balanced pilot symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PilotLayout {
    /// `+1, -1, +1, -1, ...`
    #[default]
    Alternating,
    /// `N/2` ones followed by `N/2` minus-ones.
    Block,
    /// Seeded permutation of the block layout.
    Shuffled(u64),
}

impl std::str::FromStr for PilotLayout {
    type Err = Error;

    /// Accepts `alternating`, `block` and `shuffled:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alternating" => Ok(Self::Alternating),
            "block" => Ok(Self::Block),
            _ => s
                .strip_prefix("shuffled:")
                .and_then(|seed| seed.parse().ok())
                .map(Self::Shuffled)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown pilot layout `{s}`"))),
        }
    }
}

/// A balanced BPSK pilot: entries in `{-1, +1}` summing to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PilotSequence {
    symbols: Vec<i8>,
}

impl PilotSequence {
    pub fn new(symbols: Vec<i8>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidArgument("pilot sequence is empty".into()));
        }
        if let Some(bad) = symbols.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!("pilot symbol {bad} is not ±1")));
        }
        let sum: i64 = symbols.iter().map(|&s| s as i64).sum();
        if sum != 0 {
            return Err(Error::InvalidArgument(format!(
                "pilot sequence is unbalanced (sum {sum})"
            )));
        }
        Ok(Self { symbols })
    }

    pub fn symbols(&self) -> &[i8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn half_len(&self) -> usize {
        self.symbols.len() / 2
    }
}

/// Builds a balanced pilot of even length `n >= 2`.
pub fn make_pilot(n: usize, layout: PilotLayout) -> Result<PilotSequence> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "pilot length must be even and at least 2, got {n}"
        )));
    }
    let half = n / 2;
    let symbols = match layout {
        PilotLayout::Alternating => (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect(),
        PilotLayout::Block | PilotLayout::Shuffled(_) => {
            let mut s: Vec<i8> = std::iter::repeat_n(1, half)
                .chain(std::iter::repeat_n(-1, half))
                .collect();
            if let PilotLayout::Shuffled(seed) = layout {
                s.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            }
            s
        }
    };
    Ok(PilotSequence { symbols })
}

/// Unquantized receive signal `y = zeta x + eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealObservation {
    pub samples: Vec<f64>,
}

/// Hard-limited receive signal `r = sign(y - alpha)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryObservation {
    pub signs: Vec<i8>,
}

/// Independent noise substream for trial `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// `synth_ideal` with a caller-provided generator.
pub fn synth_ideal_with<R: rand::Rng + ?Sized>(
    pilot: &PilotSequence,
    zeta: f64,
    rng: &mut R,
) -> IdealObservation {
    let samples = pilot
        .symbols()
        .iter()
        .map(|&x| {
            let eta: f64 = StandardNormal.sample(rng);
            zeta * x as f64 + eta
        })
        .collect();
    IdealObservation { samples }
}

/// Draws `y = zeta x + eta` with standard-normal noise from a seeded stream.
pub fn synth_ideal(pilot: &PilotSequence, zeta: f64, seed: u64) -> IdealObservation {
    synth_ideal_with(pilot, zeta, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Hard limiter; a sample exactly at the threshold maps to `+1`.
pub fn quantize(y: &IdealObservation, alpha: f64) -> BinaryObservation {
    let signs = y
        .samples
        .iter()
        .map(|&v| if v >= alpha { 1 } else { -1 })
        .collect();
    BinaryObservation { signs }
}

impl BinaryObservation {
    /// Per-sample log-likelihood `sum_n ln Q(r_n (alpha - zeta x_n))`.
    pub fn log_likelihood(&self, pilot: &PilotSequence, zeta: f64, alpha: f64) -> Result<f64> {
        check_lengths(self.signs.len(), pilot.len())?;
        Ok(self
            .signs
            .iter()
            .zip(pilot.symbols())
            .map(|(&r, &x)| log_q(r as f64 * (alpha - zeta * x as f64)))
            .sum())
    }
}

fn check_lengths(obs: usize, pilot: usize) -> Result<()> {
    if obs != pilot {
        return Err(Error::InvalidArgument(format!(
            "observation length {obs} does not match pilot length {pilot}"
        )));
    }
    Ok(())
}

/// Counts of `r_n = +1` split by pilot symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountStatistic {
    /// `#{n : x_n = +1, r_n = +1}`
    pub k_plus: u64,
    /// `#{n : x_n = -1, r_n = +1}`
    pub k_minus: u64,
    /// `M = N / 2`
    pub half_n: u64,
}

impl CountStatistic {
    pub fn new(k_plus: u64, k_minus: u64, half_n: u64) -> Result<Self> {
        if half_n == 0 || k_plus > half_n || k_minus > half_n {
            return Err(Error::InvalidArgument(format!(
                "invalid counts k+={k_plus}, k-={k_minus}, M={half_n}"
            )));
        }
        Ok(Self {
            k_plus,
            k_minus,
            half_n,
        })
    }

    /// Log-likelihood of the binary observation expressed through the counts.
    pub fn log_likelihood(&self, zeta: f64, alpha: f64) -> f64 {
        let m = self.half_n as f64;
        let (kp, km) = (self.k_plus as f64, self.k_minus as f64);
        binomial_term(kp, m, alpha - zeta) + binomial_term(km, m, alpha + zeta)
    }
}

// k ln Q(t) + (m - k) ln(1 - Q(t)), with empty factors contributing nothing
fn binomial_term(k: f64, m: f64, t: f64) -> f64 {
    let mut acc = 0.0;
    if k > 0.0 {
        acc += k * log_q(t);
    }
    if m - k > 0.0 {
        acc += (m - k) * log_q(-t);
    }
    acc
}

/// Reduces a binary observation to its sufficient statistic.
pub fn count_stats(r: &BinaryObservation, pilot: &PilotSequence) -> Result<CountStatistic> {
    check_lengths(r.signs.len(), pilot.len())?;
    let (mut k_plus, mut k_minus) = (0u64, 0u64);
    for (&ri, &xi) in r.signs.iter().zip(pilot.symbols()) {
        if ri == 1 {
            if xi == 1 {
                k_plus += 1;
            } else {
                k_minus += 1;
            }
        }
    }
    Ok(CountStatistic {
        k_plus,
        k_minus,
        half_n: pilot.half_len() as u64,
    })
}
