//! Symmetric random walks: step measures, exact convolution powers, entropy
//! rates, sampled trajectories, escape rate, and the law-of-large-numbers
//! check for word length.
//!
//! Exactness first: distributions of `X_n` are computed as exact hash-table
//! convolutions over canonical forms whenever the support fits the element
//! budget, and every sampled quantity is driven by seeded ChaCha8 streams
//! with per-trial seeds split from one master seed, so results are
//! reproducible bit for bit at any thread count.
//!
//! The entropy rate `h = lim H(mu^{*n}) / n` is reported from the deepest
//! exact level as the bias-corrected increment
//! `n (H_n - H_{n-1}) - (n-1) (H_{n-1} - H_{n-2})`. Raw increments converge
//! to `h` from above but carry a slowly decaying `O(1/n)` term produced by
//! the diffusive spread of the word-length distribution; the two-point
//! combination cancels any `c/n` term exactly and lands an order of
//! magnitude closer at the depths exact convolution can reach. Raw
//! increments and the Cesaro sequence are reported alongside, and the
//! estimate is clamped into `[0, min_n H_n/n]`, the envelope guaranteed by
//! subadditivity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::{Generator, GroupError, GroupPresentation, NormalForm};
use crate::DetHashMap;

/// Errors from measure construction and walk computations.
#[derive(Debug, Error)]
pub enum WalkError {
    #[error(transparent)]
    Group(#[from] GroupError),
    /// A measure with no support.
    #[error("step measure has empty support")]
    EmptyMeasure,
    /// A weight that is zero, negative, or not finite.
    #[error("weight for {token} must be positive and finite")]
    NonPositiveWeight { token: String },
    /// Weights that do not sum to 1 within tolerance.
    #[error("weights sum to {total}, expected 1 within 1e-9")]
    NotNormalized { total: f64 },
    /// A group measure with `w(g) != w(g^-1)`.
    #[error("measure is not symmetric at {token}")]
    AsymmetricMeasure { token: String },
    /// Convolution support exceeded the element budget.
    #[error("support budget {budget} exhausted after {completed} of {requested} convolutions")]
    SupportBudget {
        completed: u32,
        requested: u32,
        budget: usize,
    },
    /// Fewer than two exact levels: no increment to report.
    #[error("entropy rate needs at least 2 exact convolution levels, reached {reached}")]
    InsufficientDepth { reached: u32 },
    /// A drift whose confidence interval touches zero (or a nonpositive
    /// reference), making `l`-normalized quantities meaningless.
    #[error("drift {value} +/- {std_error} is not distinguishable from zero")]
    UndefinedDrift { value: f64, std_error: f64 },
    /// An exact convolution level lost probability mass (internal check).
    #[error("convolution level {level} has mass {total}, expected 1 within 1e-9")]
    MassLeak { level: u32, total: f64 },
    /// A structurally invalid parameter (zero steps, zero trials, ...).
    #[error("invalid parameter: {what}")]
    InvalidParameter { what: &'static str },
}

/// How a numeric estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    /// Mean of end-point statistics over sampled trajectories.
    MonteCarloWalk,
    /// Two-point slope of sampled trajectory lengths (comparison walks).
    MonteCarloSlope,
    /// Exact convolution increments with a spread-based uncertainty.
    ExactIncrementSpread,
}

/// A point estimate with an uncertainty and its provenance.
///
/// `std_error` is a standard error for Monte Carlo methods and a
/// stability spread (half the range of the last few estimates) for exact
/// increment methods; it measures the sequence's own settling, not total
/// distance from the limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateCI {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub method: MethodTag,
}

/// Seed streams, so each consumer of randomness draws from its own space.
pub(crate) const STREAM_DRIFT: u64 = 1;
pub(crate) const STREAM_LLN: u64 = 2;
pub(crate) const STREAM_LLN_REF: u64 = 3;
pub(crate) const STREAM_OPTIMIZER: u64 = 4;
pub(crate) const STREAM_COMPARE: u64 = 5;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for trial `index` of stream `stream` from one master
/// seed. Trials are independent of execution order and thread count.
pub(crate) fn child_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(stream)).wrapping_add(index))
}

/// Adjustments applied when building a measure from raw user weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureAdjustment {
    /// Total of the raw weights before normalization.
    pub original_total: f64,
    /// Whether inverse letters were filled in or averaged.
    pub symmetrized: bool,
    /// Whether the total was rescaled to 1.
    pub renormalized: bool,
}

/// A probability measure on the alphabet, symmetric for group
/// presentations (`w(g) = w(g^-1)` exactly, enforced at construction).
///
/// The identity carries no mass by construction: weights are attached to
/// letters only.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMeasure {
    presentation: GroupPresentation,
    /// Sorted by letter; every weight positive; total within 1e-9 of 1.
    entries: Vec<(Generator, f64)>,
}

impl SymmetricMeasure {
    /// The uniform measure on the whole alphabet.
    pub fn uniform(p: GroupPresentation) -> Self {
        let letters = p.alphabet();
        let w = 1.0 / letters.len() as f64;
        SymmetricMeasure {
            presentation: p,
            entries: letters.into_iter().map(|g| (g, w)).collect(),
        }
    }

    /// Builds a measure from explicit weights, which must already be
    /// normalized and (for groups) symmetric within 1e-12. Symmetric pairs
    /// are snapped to their exact average so downstream arithmetic sees
    /// perfect symmetry.
    pub fn from_weights(
        p: GroupPresentation,
        weights: &[(Generator, f64)],
    ) -> Result<Self, WalkError> {
        let (measure, adjustment) = Self::build(p, weights, false)?;
        if adjustment.symmetrized {
            return Err(WalkError::AsymmetricMeasure {
                token: "?".into(), // unreachable: build() reports the letter
            });
        }
        Ok(measure)
    }

    /// Builds a measure from raw weights, completing symmetry for groups
    /// and rescaling the total to 1. Every raw entry names its inverse
    /// pair: the pair's total is split equally between the two sides, so
    /// "z1 0.3" alone gives z1 and z1^-1 weight 0.15 each (before any
    /// rescale). Returns what was adjusted, so callers can report it.
    pub fn from_raw_weights(
        p: GroupPresentation,
        weights: &[(Generator, f64)],
    ) -> Result<(Self, MeasureAdjustment), WalkError> {
        Self::build(p, weights, true)
    }

    fn build(
        p: GroupPresentation,
        weights: &[(Generator, f64)],
        lenient: bool,
    ) -> Result<(Self, MeasureAdjustment), WalkError> {
        if weights.is_empty() {
            return Err(WalkError::EmptyMeasure);
        }
        let mut by_letter: DetHashMap<Generator, f64> = DetHashMap::default();
        for &(g, w) in weights {
            p.validate_letter(g)?;
            if !(w.is_finite() && w > 0.0) {
                return Err(WalkError::NonPositiveWeight {
                    token: g.to_string(),
                });
            }
            *by_letter.entry(g).or_insert(0.0) += w;
        }
        let original_total: f64 = {
            let mut letters: Vec<&Generator> = by_letter.keys().collect();
            letters.sort();
            letters.iter().map(|g| by_letter[g]).sum()
        };

        let mut symmetrized = false;
        let mut entries: Vec<(Generator, f64)> = Vec::new();
        if p.is_group() {
            let mut indices: Vec<u32> = by_letter.keys().map(|g| g.index()).collect();
            indices.sort_unstable();
            indices.dedup();
            for i in indices {
                let pos = Generator::positive(i);
                let neg = Generator::negative(i);
                let wp = by_letter.get(&pos).copied();
                let wn = by_letter.get(&neg).copied();
                let (a, b) = (wp.unwrap_or(0.0), wn.unwrap_or(0.0));
                if wp != wn {
                    if !lenient && (a - b).abs() > 1e-12 {
                        return Err(WalkError::AsymmetricMeasure {
                            token: pos.to_string(),
                        });
                    }
                    symmetrized = symmetrized || wp.is_none() || wn.is_none() || a != b;
                }
                // Each side carries half of the pair's raw total.
                let w = 0.5 * (a + b);
                entries.push((pos, w));
                entries.push((neg, w));
            }
        } else {
            entries = by_letter.into_iter().collect();
            entries.sort_by_key(|&(g, _)| g);
        }

        let total: f64 = entries.iter().map(|&(_, w)| w).sum();
        let mut renormalized = false;
        if (total - 1.0).abs() > 1e-9 {
            if !lenient {
                return Err(WalkError::NotNormalized { total });
            }
            renormalized = true;
        }
        for e in &mut entries {
            e.1 /= total;
        }

        Ok((
            SymmetricMeasure {
                presentation: p,
                entries,
            },
            MeasureAdjustment {
                original_total,
                symmetrized,
                renormalized,
            },
        ))
    }

    pub fn presentation(&self) -> GroupPresentation {
        self.presentation
    }

    /// Weighted letters, sorted by letter.
    pub fn weights(&self) -> &[(Generator, f64)] {
        &self.entries
    }

    /// Weight of one letter (0 when outside the support).
    pub fn weight(&self, g: Generator) -> f64 {
        self.entries
            .iter()
            .find(|&&(h, _)| h == g)
            .map_or(0.0, |&(_, w)| w)
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    /// Total variation distance to another measure on the same alphabet.
    pub fn total_variation(&self, other: &SymmetricMeasure) -> Result<f64, WalkError> {
        if self.presentation != other.presentation {
            return Err(WalkError::Group(GroupError::MixedPresentations {
                left: self.presentation.to_string(),
                right: other.presentation.to_string(),
            }));
        }
        let mut letters: Vec<Generator> = self
            .entries
            .iter()
            .chain(&other.entries)
            .map(|&(g, _)| g)
            .collect();
        letters.sort();
        letters.dedup();
        let sum: f64 = letters
            .iter()
            .map(|&g| (self.weight(g) - other.weight(g)).abs())
            .sum();
        Ok(0.5 * sum)
    }

    /// The measure viewed as weighted single-letter group elements, the
    /// form the convolution engine consumes.
    pub fn element_steps(&self) -> Vec<(NormalForm, f64)> {
        self.entries
            .iter()
            .map(|&(g, w)| {
                (
                    NormalForm::from_parts(self.presentation, vec![g]),
                    w,
                )
            })
            .collect()
    }

    /// Cumulative sampler over the support.
    pub fn sampler(&self) -> LetterSampler {
        LetterSampler::new(self.entries.iter().map(|&(g, w)| (g, w)).collect())
    }
}

/// Inversion-sampling table for letters (or any discrete support).
pub struct LetterSampler {
    letters: Vec<Generator>,
    cumulative: Vec<f64>,
}

impl LetterSampler {
    fn new(entries: Vec<(Generator, f64)>) -> Self {
        let mut letters = Vec::with_capacity(entries.len());
        let mut cumulative = Vec::with_capacity(entries.len());
        let mut acc = 0.0;
        for (g, w) in entries {
            acc += w;
            letters.push(g);
            cumulative.push(acc);
        }
        LetterSampler {
            letters,
            cumulative,
        }
    }

    /// Draws one letter.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Generator {
        let u: f64 = rng.random();
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.letters.len() - 1);
        self.letters[idx]
    }
}

/// An exact distribution of `X_n` over canonical forms.
#[derive(Debug, Clone)]
pub struct Distribution {
    presentation: GroupPresentation,
    steps: u32,
    table: DetHashMap<NormalForm, f64>,
}

impl Distribution {
    pub fn presentation(&self) -> GroupPresentation {
        self.presentation
    }

    /// How many convolutions produced this distribution.
    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn support_size(&self) -> usize {
        self.table.len()
    }

    pub fn probability(&self, nf: &NormalForm) -> f64 {
        self.table.get(nf).copied().unwrap_or(0.0)
    }

    pub fn table(&self) -> &DetHashMap<NormalForm, f64> {
        &self.table
    }

    /// Total mass (should be 1 within accumulated rounding).
    pub fn mass(&self) -> f64 {
        self.table.values().sum()
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(self)
    }
}

/// Shannon entropy of an exact distribution, in bits. Zero-probability
/// entries contribute nothing.
pub fn entropy_bits(d: &Distribution) -> f64 {
    let mut h = 0.0;
    for &p in d.table.values() {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

pub(crate) struct ConvOutcome {
    pub reached: u32,
    pub budget_limited: bool,
    pub final_dist: Option<Distribution>,
}

/// Runs exact convolution levels `1..=max_n`, calling `visit` on each
/// completed level. Stops early (without error) when the next level would
/// exceed `element_budget`; with `eager_stop` the level is not even started
/// if the worst-case support (current size times step count) already
/// exceeds the budget, which callers that can fall back to sampling use to
/// avoid building a doomed table.
pub(crate) fn run_convolutions<F>(
    p: GroupPresentation,
    steps: &[(NormalForm, f64)],
    max_n: u32,
    element_budget: usize,
    eager_stop: bool,
    mut visit: F,
) -> Result<ConvOutcome, WalkError>
where
    F: FnMut(&Distribution),
{
    if steps.is_empty() {
        return Err(WalkError::EmptyMeasure);
    }
    let mut current: DetHashMap<NormalForm, f64> = DetHashMap::default();
    current.insert(p.identity(), 1.0);
    let mut dist = Distribution {
        presentation: p,
        steps: 0,
        table: current,
    };

    let mut reached = 0;
    let mut budget_limited = false;
    while reached < max_n {
        if eager_stop && dist.table.len().saturating_mul(steps.len()) > element_budget {
            budget_limited = true;
            break;
        }
        let mut next: DetHashMap<NormalForm, f64> =
            DetHashMap::with_capacity_and_hasher(dist.table.len(), Default::default());
        let mut exceeded = false;
        'outer: for (u, &pu) in &dist.table {
            for (s, w) in steps {
                let mut letters = u.letters().to_vec();
                for &g in s.letters() {
                    p.push_letter_unchecked(&mut letters, g);
                }
                let v = NormalForm::from_parts(p, letters);
                *next.entry(v).or_insert(0.0) += pu * w;
                if next.len() > element_budget {
                    exceeded = true;
                    break 'outer;
                }
            }
        }
        if exceeded {
            budget_limited = true;
            break;
        }
        reached += 1;
        let total: f64 = next.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(WalkError::MassLeak {
                level: reached,
                total,
            });
        }
        dist = Distribution {
            presentation: p,
            steps: reached,
            table: next,
        };
        visit(&dist);
    }

    Ok(ConvOutcome {
        reached,
        budget_limited,
        final_dist: if reached > 0 { Some(dist) } else { None },
    })
}

/// The exact distribution of `X_n` (the `n`-fold convolution power).
/// `n = 0` is the point mass at the identity. Exceeding the element budget
/// is an error carrying how far the computation got.
pub fn convolve_power(
    p: GroupPresentation,
    mu: &SymmetricMeasure,
    n: u32,
    element_budget: usize,
) -> Result<Distribution, WalkError> {
    if n == 0 {
        let mut table = DetHashMap::default();
        table.insert(p.identity(), 1.0);
        return Ok(Distribution {
            presentation: p,
            steps: 0,
            table,
        });
    }
    let steps = mu.element_steps();
    let outcome = run_convolutions(p, &steps, n, element_budget, false, |_| {})?;
    if outcome.reached < n {
        return Err(WalkError::SupportBudget {
            completed: outcome.reached,
            requested: n,
            budget: element_budget,
        });
    }
    Ok(outcome.final_dist.expect("reached >= 1"))
}

/// The full entropy profile of a walk up to the deepest exact level.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyRate {
    /// Bias-corrected estimate of `h` (see module docs), clamped into
    /// `[0, min_n H_n/n]`.
    pub estimate: EstimateCI,
    /// `H(mu^{*n})` for `n = 1..=reached`.
    pub entropies: Vec<f64>,
    /// `H_n / n`.
    pub cesaro: Vec<f64>,
    /// `H_n - H_{n-1}` (the first entry is `H_1`).
    pub increments: Vec<f64>,
    /// `n d_n - (n-1) d_{n-1}` for `n = 2..=reached`.
    pub corrected: Vec<f64>,
    /// Deepest exact level.
    pub reached: u32,
    /// Whether the element budget, not `max_n`, ended the sequence.
    pub budget_limited: bool,
}

/// Computes `H(mu^{*n})` exactly for `n = 1..=max_n` (stopping early at the
/// element budget) and estimates the entropy rate from the deepest levels.
/// Needs at least two exact levels.
pub fn entropy_rate(
    p: GroupPresentation,
    mu: &SymmetricMeasure,
    max_n: u32,
    element_budget: usize,
) -> Result<EntropyRate, WalkError> {
    entropy_rate_over_steps(p, &mu.element_steps(), max_n, element_budget)
}

/// [`entropy_rate`] over an explicit step distribution, for walks whose
/// steps are words rather than single letters.
pub(crate) fn entropy_rate_over_steps(
    p: GroupPresentation,
    steps: &[(NormalForm, f64)],
    max_n: u32,
    element_budget: usize,
) -> Result<EntropyRate, WalkError> {
    let mut entropies: Vec<f64> = Vec::with_capacity(max_n as usize);
    let outcome = run_convolutions(p, steps, max_n, element_budget, false, |d| {
        entropies.push(d.entropy_bits());
    })?;
    if outcome.reached < 2 {
        return Err(WalkError::InsufficientDepth {
            reached: outcome.reached,
        });
    }

    let cesaro: Vec<f64> = entropies
        .iter()
        .enumerate()
        .map(|(i, &h)| h / (i as f64 + 1.0))
        .collect();
    let mut increments = Vec::with_capacity(entropies.len());
    increments.push(entropies[0]);
    for i in 1..entropies.len() {
        increments.push(entropies[i] - entropies[i - 1]);
    }
    let corrected: Vec<f64> = (1..increments.len())
        .map(|i| {
            let n = (i + 1) as f64;
            n * increments[i] - (n - 1.0) * increments[i - 1]
        })
        .collect();

    let envelope = cesaro.iter().cloned().fold(f64::INFINITY, f64::min);
    let raw = *corrected.last().expect("reached >= 2");
    let value = raw.min(envelope + 1e-9).max(0.0);
    let tail = &corrected[corrected.len().saturating_sub(3)..];
    let spread = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - tail.iter().cloned().fold(f64::INFINITY, f64::min);

    Ok(EntropyRate {
        estimate: EstimateCI {
            value,
            std_error: 0.5 * spread,
            samples: outcome.reached as u64,
            method: MethodTag::ExactIncrementSpread,
        },
        entropies,
        cesaro,
        increments,
        corrected,
        reached: outcome.reached,
        budget_limited: outcome.budget_limited,
    })
}

/// One sampled trajectory: canonical length after every step.
#[derive(Debug, Clone, Serialize)]
pub struct WalkTrajectory {
    pub seed: u64,
    /// `lengths[t]` is `l(X_{t+1})`.
    pub lengths: Vec<u32>,
}

/// Samples one trajectory of `steps` letters from its own ChaCha8 stream.
pub fn sample_walk(
    p: GroupPresentation,
    mu: &SymmetricMeasure,
    steps: u32,
    seed: u64,
) -> WalkTrajectory {
    let sampler = mu.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut letters: Vec<Generator> = Vec::new();
    let mut lengths = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        let g = sampler.sample(&mut rng);
        p.push_letter_unchecked(&mut letters, g);
        lengths.push(letters.len() as u32);
    }
    WalkTrajectory { seed, lengths }
}

/// Escape rate `l = lim E[l(X_n)] / n`, estimated as the mean of
/// `l(X_n)/n` over independent trajectories. Deterministic for a fixed
/// master seed: trial `i` always uses seed `child_seed(master, DRIFT, i)`
/// and the reduction runs in trial order.
pub fn drift(
    p: GroupPresentation,
    mu: &SymmetricMeasure,
    steps: u32,
    trials: u32,
    master_seed: u64,
) -> Result<EstimateCI, WalkError> {
    if steps == 0 {
        return Err(WalkError::InvalidParameter { what: "steps" });
    }
    if trials == 0 {
        return Err(WalkError::InvalidParameter { what: "trials" });
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let t = sample_walk(p, mu, steps, child_seed(master_seed, STREAM_DRIFT, i as u64));
            *t.lengths.last().expect("steps >= 1") as f64 / steps as f64
        })
        .collect();
    Ok(mean_with_se(&values, MethodTag::MonteCarloWalk))
}

pub(crate) fn mean_with_se(values: &[f64], method: MethodTag) -> EstimateCI {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    EstimateCI {
        value: mean,
        std_error: (var / n).sqrt(),
        samples: values.len() as u64,
        method,
    }
}

/// Parameters for [`lln_check`].
#[derive(Debug, Clone, Copy)]
pub struct LlnParams {
    pub steps: u32,
    /// Relative half-width of the concentration band around `l`.
    pub epsilon: f64,
    /// Reference drift; measured from fresh trajectories when `None`.
    pub reference: Option<f64>,
    /// Monte Carlo trials (also used to measure the reference).
    pub trials: u32,
    /// Element budget for the exact-distribution path.
    pub element_budget: usize,
    pub master_seed: u64,
}

/// How a concentration fraction was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LlnMethod {
    /// Integrated the exact distribution of `X_n`.
    ExactDistribution { support: usize },
    /// Counted sampled trajectories.
    MonteCarlo { trials: u32 },
}

/// Result of the word-length law-of-large-numbers check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LlnReport {
    /// Probability mass (or trajectory fraction) with
    /// `|l(X_n)/n - l| <= epsilon * l`.
    pub fraction: f64,
    pub method: LlnMethod,
    /// The drift the band was centred on.
    pub reference_drift: f64,
    pub steps: u32,
    pub epsilon: f64,
}

/// Measures how concentrated `l(X_n)/n` is around the drift: exactly, by
/// integrating the convolution power when its support fits the budget,
/// otherwise by Monte Carlo. Fails with [`WalkError::UndefinedDrift`] when
/// the reference drift is not positive beyond its own noise.
pub fn lln_check(
    p: GroupPresentation,
    mu: &SymmetricMeasure,
    params: LlnParams,
) -> Result<LlnReport, WalkError> {
    if !(params.epsilon > 0.0 && params.epsilon.is_finite()) {
        return Err(WalkError::InvalidParameter { what: "epsilon" });
    }
    if params.steps == 0 {
        return Err(WalkError::InvalidParameter { what: "steps" });
    }
    if params.trials == 0 {
        return Err(WalkError::InvalidParameter { what: "trials" });
    }

    let l_ref = match params.reference {
        Some(l) => {
            if !(l > 0.0 && l.is_finite()) {
                return Err(WalkError::UndefinedDrift {
                    value: l,
                    std_error: 0.0,
                });
            }
            l
        }
        None => {
            // Diffusive presentations have true escape rate 0, which a
            // finite-trial confidence interval on E|X_n|/n can never
            // certify (the mean shrinks like n^-1/2 but its standard
            // error shrinks faster). Catch them structurally.
            if !p.has_linear_escape() {
                return Err(WalkError::UndefinedDrift {
                    value: 0.0,
                    std_error: 0.0,
                });
            }
            let est = drift(
                p,
                mu,
                params.steps,
                params.trials,
                child_seed(params.master_seed, STREAM_LLN_REF, 0),
            )?;
            if est.value - 1.96 * est.std_error <= 0.0 {
                return Err(WalkError::UndefinedDrift {
                    value: est.value,
                    std_error: est.std_error,
                });
            }
            est.value
        }
    };

    let n = params.steps as f64;
    let lo = (1.0 - params.epsilon) * l_ref * n;
    let hi = (1.0 + params.epsilon) * l_ref * n;

    // Exact when the whole distribution of X_n fits the budget; the eager
    // stop abandons the attempt as soon as a level could not fit.
    let steps_elems = mu.element_steps();
    let outcome = run_convolutions(
        p,
        &steps_elems,
        params.steps,
        params.element_budget,
        true,
        |_| {},
    )?;
    if outcome.reached == params.steps {
        let dist = outcome.final_dist.expect("steps >= 1");
        let mut fraction = 0.0;
        for (nf, &mass) in dist.table() {
            let len = nf.len() as f64;
            if len >= lo && len <= hi {
                fraction += mass;
            }
        }
        return Ok(LlnReport {
            fraction,
            method: LlnMethod::ExactDistribution {
                support: dist.support_size(),
            },
            reference_drift: l_ref,
            steps: params.steps,
            epsilon: params.epsilon,
        });
    }

    let hits: Vec<f64> = (0..params.trials)
        .into_par_iter()
        .map(|i| {
            let t = sample_walk(
                p,
                mu,
                params.steps,
                child_seed(params.master_seed, STREAM_LLN, i as u64),
            );
            let len = *t.lengths.last().expect("steps >= 1") as f64;
            if len >= lo && len <= hi {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let fraction = hits.iter().sum::<f64>() / hits.len() as f64;
    Ok(LlnReport {
        fraction,
        method: LlnMethod::MonteCarlo {
            trials: params.trials,
        },
        reference_drift: l_ref,
        steps: params.steps,
        epsilon: params.epsilon,
    })
}
