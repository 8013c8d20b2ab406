//! The fundamental relation between the three walk constants: for every
//! symmetric measure, entropy rate is at most escape rate times growth,
//! `h <= l * v`, so `q = h / (l v) <= 1`. This module assembles full
//! reports of the three constants, classifies how close a system sits to
//! the extremal case `q = 1`, searches over step measures for the largest
//! `q`, and compares alternative generating systems of one group under
//! their own word metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::enumeration::{
    closed_form_volume, enumerate_ball, moebius_root_volume, sphere_ratio_fit, EnumError,
    SphereCounts, VolumeEstimate,
};
use crate::group::{GroupError, GroupPresentation, NormalForm, PresentationKind, Word};
use crate::walks::{
    child_seed, drift, entropy_rate, entropy_rate_over_steps, mean_with_se, EntropyRate,
    EstimateCI, MethodTag, SymmetricMeasure, WalkError, STREAM_COMPARE, STREAM_OPTIMIZER,
};
use crate::{DetHashMap, DetHashSet};

/// Errors from report assembly, optimization, and comparison.
#[derive(Debug, Error)]
pub enum IneqError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    /// Drift (or the volume normalization) indistinguishable from zero.
    #[error("drift {value} +/- {std_error} cannot normalize q")]
    UndefinedDrift { value: f64, std_error: f64 },
    /// The computed ratio exceeded 1 beyond every tolerance, which signals
    /// a broken estimate rather than a mathematical possibility.
    #[error("q = {q} exceeds 1 beyond tolerance {tol}; estimates are inconsistent")]
    QSanity { q: f64, tol: f64 },
    /// No optimizer restart produced a usable objective.
    #[error("measure optimization failed: {reason}")]
    OptimizationFailed { reason: String },
    /// A candidate generating system that cannot be used.
    #[error("system {label}: {reason}")]
    InvalidSystem { label: String, reason: String },
    /// Too many comparison walks left the distance table.
    #[error(
        "system {label}: {fraction:.3} of walks left the distance table (limit {limit}); \
         increase the table radius or reduce the walk length"
    )]
    UnreliableComparison {
        label: String,
        fraction: f64,
        limit: f64,
    },
}

/// The ratio `q = h / (l v)` with a propagated uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QRatio {
    pub value: f64,
    pub sigma: f64,
}

/// Where a system sits relative to the extremal case `q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `|1 - q| <= max(0.05, 2 sigma)`.
    ConsistentWithEquality,
    /// `q + 2 sigma < 0.95`.
    StrictlyBelow,
    /// Drift or growth indistinguishable from zero; `q` is meaningless.
    UndefinedDrift,
    /// Neither band: the estimate sits between the two thresholds.
    Inconclusive,
}

fn classify(q: QRatio) -> Verdict {
    let tol = (0.05_f64).max(2.0 * q.sigma);
    if (1.0 - q.value).abs() <= tol {
        Verdict::ConsistentWithEquality
    } else if q.value + 2.0 * q.sigma < 0.95 {
        Verdict::StrictlyBelow
    } else {
        Verdict::Inconclusive
    }
}

/// Combines the three constants into `q` with first-order error
/// propagation. Fails with [`IneqError::UndefinedDrift`] when the drift's
/// 95% interval touches zero or the growth exponent vanishes (abelian
/// kinds), since `q` has no meaning there.
pub fn q_ratio(
    entropy: &EstimateCI,
    escape: &EstimateCI,
    volume: &VolumeEstimate,
) -> Result<QRatio, IneqError> {
    if escape.value - 1.96 * escape.std_error <= 0.0 || volume.bits_per_step <= 1e-12 {
        return Err(IneqError::UndefinedDrift {
            value: escape.value,
            std_error: escape.std_error,
        });
    }
    let l = escape.value;
    let v = volume.bits_per_step;
    let h = entropy.value;
    let value = h / (l * v);
    let sigma = ((entropy.std_error / (l * v)).powi(2)
        + (h * escape.std_error / (l * l * v)).powi(2)
        + (h * volume.uncertainty / (l * v * v)).powi(2))
    .sqrt();
    let q = QRatio { value, sigma };
    let tol = (0.05_f64).max(3.0 * sigma);
    if value > 1.0 + tol {
        return Err(IneqError::QSanity { q: value, tol });
    }
    Ok(q)
}

/// Budgets for one full three-constant report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReportBudgets {
    /// BFS radius for the growth fit (locally free groups only).
    pub ball_radius: u32,
    /// Element cap for that BFS.
    pub ball_element_cap: usize,
    /// Exact convolution depth for the entropy rate.
    pub conv_depth: u32,
    /// Element budget per convolution level.
    pub conv_element_budget: usize,
    /// Steps per sampled trajectory for the escape rate.
    pub walk_steps: u32,
    /// Number of sampled trajectories.
    pub walk_trials: u32,
    /// Sphere-ratio window for fitted growth.
    pub fit_window: usize,
    pub master_seed: u64,
}

impl Default for ReportBudgets {
    fn default() -> Self {
        ReportBudgets {
            ball_radius: 7,
            ball_element_cap: 2_000_000,
            // Depth 12 keeps the corrected entropy estimate within ~0.03 of
            // the limit for the rank-2 free group, so extremal systems are
            // classified consistent rather than falling in the gap between
            // verdict bands.
            conv_depth: 12,
            conv_element_budget: 10_000_000,
            walk_steps: 10_000,
            walk_trials: 200,
            fit_window: 4,
            master_seed: 42,
        }
    }
}

/// The three constants of one (presentation, measure) pair, with the
/// derived ratio and classification.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub presentation: GroupPresentation,
    pub volume: VolumeEstimate,
    pub drift: EstimateCI,
    /// Full entropy profile; the headline number is `entropy.estimate`.
    pub entropy: EntropyRate,
    pub q: Option<QRatio>,
    pub verdict: Verdict,
    /// `h <= l v + 3 sigma_combined`.
    pub inequality_satisfied: bool,
    /// `l v + 3 sigma_combined - h` (nonnegative iff satisfied).
    pub inequality_slack: f64,
}

fn fitted_group_volume(
    p: GroupPresentation,
    radius: u32,
    cap: usize,
    window: usize,
) -> Result<VolumeEstimate, IneqError> {
    let spheres = match enumerate_ball(p, radius, cap) {
        Ok(ball) => ball.spheres,
        // A truncated ball still carries completed levels; fit those.
        Err(EnumError::BallBudget { partial, .. }) => partial.spheres,
        Err(e) => return Err(e.into()),
    };
    Ok(sphere_ratio_fit(&spheres, window)?)
}

fn volume_for(p: GroupPresentation, b: &ReportBudgets) -> Result<VolumeEstimate, IneqError> {
    if let Some(exact) = closed_form_volume(p) {
        return Ok(exact);
    }
    if p.kind() == PresentationKind::LocallyFreeSemigroup {
        return Ok(moebius_root_volume(p.rank())?);
    }
    fitted_group_volume(p, b.ball_radius, b.ball_element_cap, b.fit_window)
}

/// Computes growth, escape rate, and entropy rate for one walk and
/// classifies its ratio `q`.
///
/// The growth exponent uses the best method for the presentation (closed
/// form, clique-polynomial root, or a sphere-ratio fit over an enumerated
/// ball). Escape rate is sampled; entropy is exact convolution. When drift
/// or growth is indistinguishable from zero the verdict is
/// [`Verdict::UndefinedDrift`] and `q` is omitted, but the inequality flag
/// is still evaluated (it degenerates to `h <= 3 sigma` there).
pub fn fundamental_report(
    p: GroupPresentation,
    mu: &SymmetricMeasure,
    b: &ReportBudgets,
) -> Result<ConstantsReport, IneqError> {
    let volume = volume_for(p, b)?;
    let escape = drift(p, mu, b.walk_steps, b.walk_trials, b.master_seed)?;
    let entropy = entropy_rate(p, mu, b.conv_depth, b.conv_element_budget)?;

    let (q, verdict) = match q_ratio(&entropy.estimate, &escape, &volume) {
        Ok(q) => (Some(q), classify(q)),
        Err(IneqError::UndefinedDrift { .. }) => (None, Verdict::UndefinedDrift),
        Err(e) => return Err(e),
    };

    let h = entropy.estimate.value;
    let l = escape.value;
    let v = volume.bits_per_step;
    let sigma_combined = (entropy.estimate.std_error.powi(2)
        + (v * escape.std_error).powi(2)
        + (l * volume.uncertainty).powi(2))
    .sqrt();
    let bound = l * v + 3.0 * sigma_combined;

    Ok(ConstantsReport {
        presentation: p,
        volume,
        drift: escape,
        entropy,
        q,
        verdict,
        inequality_satisfied: h <= bound + 1e-12,
        inequality_slack: bound - h,
    })
}

/// Budgets for the measure search: cheap inner evaluations under common
/// random numbers, then one full-budget certification of the winner.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimizeBudgets {
    pub restarts: u32,
    pub max_evals_per_restart: u32,
    pub inner_conv_depth: u32,
    pub inner_element_budget: usize,
    pub inner_walk_steps: u32,
    pub inner_walk_trials: u32,
    /// Smallest weight any alphabet pair may carry.
    pub weight_floor: f64,
    /// Budgets for the final certification report.
    pub full: ReportBudgets,
    pub master_seed: u64,
}

impl Default for OptimizeBudgets {
    fn default() -> Self {
        OptimizeBudgets {
            restarts: 4,
            max_evals_per_restart: 60,
            inner_conv_depth: 7,
            inner_element_budget: 400_000,
            inner_walk_steps: 600,
            inner_walk_trials: 200,
            weight_floor: 1e-4,
            full: ReportBudgets::default(),
            master_seed: 42,
        }
    }
}

/// One objective evaluation in the search trace.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TracePoint {
    pub restart: u32,
    /// 1-based evaluation index within the restart.
    pub eval: u32,
    /// Best objective seen so far across all restarts (non-decreasing).
    pub best_q: f64,
}

/// Outcome of the measure search.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    /// The winning measure's weights, letter by letter.
    #[serde(skip)]
    pub measure: SymmetricMeasure,
    /// Full-budget certification of the winner.
    pub report: ConstantsReport,
    pub trace: Vec<TracePoint>,
    /// Total inner objective evaluations.
    pub evaluations: u64,
}

/// Maps `m - 1` free logits to `m` weights on the probability simplex with
/// a floor: softmax with the last logit pinned to 0, then an affine squeeze
/// so every weight is at least `floor`. Zero logits give exactly the
/// uniform point.
fn weights_from_logits(theta: &[f64], m: usize, floor: f64) -> Vec<f64> {
    debug_assert_eq!(theta.len() + 1, m);
    let mx = theta.iter().cloned().fold(0.0_f64, f64::max);
    let mut exps: Vec<f64> = theta.iter().map(|t| (t - mx).exp()).collect();
    exps.push((-mx).exp());
    let s: f64 = exps.iter().sum();
    exps.iter()
        .map(|e| floor + (1.0 - m as f64 * floor) * e / s)
        .collect()
}

/// Nelder-Mead simplex minimization, bounded by an evaluation budget.
/// Deterministic: no randomness, stable tie handling.
fn nelder_mead<F>(start: &[f64], step: f64, max_evals: u32, f: &mut F) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let d = start.len();
    debug_assert!(d >= 1);
    let mut evals = 0u32;
    let eval = |x: &[f64], f: &mut F, evals: &mut u32| -> f64 {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let fx = eval(start, f, &mut evals);
    simplex.push((start.to_vec(), fx));
    for i in 0..d {
        if evals >= max_evals {
            break;
        }
        let mut x = start.to_vec();
        x[i] += step;
        let fx = eval(&x, f, &mut evals);
        simplex.push((x, fx));
    }

    while simplex.len() == d + 1 && evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        if worst - best < 1e-6 {
            break;
        }

        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / d as f64;
            }
        }
        let worst_x = simplex[d].0.clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst_x)
            .map(|(c, w)| c + (c - w))
            .collect();
        let fr = eval(&reflect, f, &mut evals);

        if fr < best {
            if evals < max_evals {
                let expand: Vec<f64> = centroid
                    .iter()
                    .zip(&worst_x)
                    .map(|(c, w)| c + 2.0 * (c - w))
                    .collect();
                let fe = eval(&expand, f, &mut evals);
                simplex[d] = if fe < fr { (expand, fe) } else { (reflect, fr) };
            } else {
                simplex[d] = (reflect, fr);
            }
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflect, fr);
        } else {
            let towards = if fr < worst { &reflect } else { &worst_x };
            let contract: Vec<f64> = centroid
                .iter()
                .zip(towards)
                .map(|(c, t)| c + 0.5 * (t - c))
                .collect();
            let fc = eval(&contract, f, &mut evals);
            if fc < fr.min(worst) {
                simplex[d] = (contract, fc);
            } else {
                // Shrink toward the best vertex.
                let best_x = simplex[0].0.clone();
                for i in 1..=d {
                    if evals >= max_evals {
                        break;
                    }
                    let x: Vec<f64> = best_x
                        .iter()
                        .zip(&simplex[i].0)
                        .map(|(b, xi)| b + 0.5 * (xi - b))
                        .collect();
                    let fx = eval(&x, f, &mut evals);
                    simplex[i] = (x, fx);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    simplex.swap_remove(0).into()
}

fn measure_from_slot_weights(
    p: GroupPresentation,
    weights: &[f64],
) -> Result<SymmetricMeasure, WalkError> {
    let mut entries = Vec::new();
    if p.is_group() {
        for (i, &w) in weights.iter().enumerate() {
            entries.push((crate::group::Generator::positive(i as u32 + 1), 0.5 * w));
            entries.push((crate::group::Generator::negative(i as u32 + 1), 0.5 * w));
        }
    } else {
        for (i, &w) in weights.iter().enumerate() {
            entries.push((crate::group::Generator::positive(i as u32 + 1), w));
        }
    }
    SymmetricMeasure::from_weights(p, &entries)
}

/// Searches symmetric step measures for the largest ratio `q` on the
/// standard alphabet.
///
/// Weights live on one slot per generator pair (per generator for the
/// semigroup), parametrized through a floored softmax, so every candidate
/// is automatically a symmetric probability measure. Restart 0 starts at
/// the uniform measure; further restarts start from seeded random logits.
/// Within a restart, every drift evaluation reuses the same trial seeds
/// (common random numbers), making the objective a deterministic function
/// of the weights. The best candidate is re-certified at full budgets.
pub fn optimize_measure(
    p: GroupPresentation,
    b: &OptimizeBudgets,
) -> Result<OptimizationResult, IneqError> {
    if b.restarts == 0 {
        return Err(IneqError::OptimizationFailed {
            reason: "at least one restart is required".into(),
        });
    }
    let slots = p.rank() as usize;
    let floor = b.weight_floor.clamp(0.0, 0.5 / slots as f64);
    let volume = volume_for(p, &b.full)?;

    let mut trace: Vec<TracePoint> = Vec::new();
    let mut evaluations: u64 = 0;
    let mut best_q = f64::NEG_INFINITY;
    let mut best_weights: Option<Vec<f64>> = None;

    // q for one weight vector at inner budgets; None when drift (or depth)
    // is unusable there.
    let eval_weights = |weights: &[f64], crn_seed: u64| -> Option<f64> {
        let mu = measure_from_slot_weights(p, weights).ok()?;
        let h = entropy_rate(p, &mu, b.inner_conv_depth, b.inner_element_budget).ok()?;
        let l = drift(p, &mu, b.inner_walk_steps, b.inner_walk_trials, crn_seed).ok()?;
        match q_ratio(&h.estimate, &l, &volume) {
            Ok(q) => Some(q.value),
            Err(_) => None,
        }
    };

    if slots == 1 {
        // One slot: the only measure is uniform; evaluate and certify.
        let crn = child_seed(b.master_seed, STREAM_OPTIMIZER, 0);
        evaluations += 1;
        match eval_weights(&[1.0], crn) {
            Some(q) => {
                best_q = q;
                best_weights = Some(vec![1.0]);
                trace.push(TracePoint {
                    restart: 0,
                    eval: 1,
                    best_q: q,
                });
            }
            None => {
                return Err(IneqError::OptimizationFailed {
                    reason: "the only candidate measure has undefined drift or depth".into(),
                })
            }
        }
    }

    for restart in 0..b.restarts {
        if slots == 1 {
            break;
        }
        let crn = child_seed(b.master_seed, STREAM_OPTIMIZER, restart as u64);
        let start: Vec<f64> = if restart == 0 {
            vec![0.0; slots - 1]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(child_seed(
                b.master_seed,
                STREAM_OPTIMIZER,
                1_000 + restart as u64,
            ));
            (0..slots - 1).map(|_| rng.random::<f64>() * 3.0 - 1.5).collect()
        };

        let mut eval_count = 0u32;
        let mut objective = |theta: &[f64]| -> f64 {
            let weights = weights_from_logits(theta, slots, floor);
            eval_count += 1;
            evaluations += 1;
            match eval_weights(&weights, crn) {
                Some(q) => {
                    if q > best_q {
                        best_q = q;
                        best_weights = Some(weights);
                    }
                    trace.push(TracePoint {
                        restart,
                        eval: eval_count,
                        best_q,
                    });
                    -q
                }
                None => {
                    if best_q > f64::NEG_INFINITY {
                        trace.push(TracePoint {
                            restart,
                            eval: eval_count,
                            best_q,
                        });
                    }
                    f64::INFINITY
                }
            }
        };
        let _ = nelder_mead(&start, 0.25, b.max_evals_per_restart, &mut objective);
    }

    let weights = best_weights.ok_or_else(|| IneqError::OptimizationFailed {
        reason: "every evaluation had undefined drift".into(),
    })?;
    let measure = measure_from_slot_weights(p, &weights).map_err(IneqError::Walk)?;
    let report = fundamental_report(p, &measure, &b.full)?;
    Ok(OptimizationResult {
        measure,
        report,
        trace,
        evaluations,
    })
}

/// A candidate generating system: words over the base alphabet.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub label: String,
    pub words: Vec<Word>,
}

/// How the step measure on a candidate system's elements is chosen.
#[derive(Debug, Clone, Copy)]
pub enum MeasurePolicy {
    Uniform,
    /// Search element weights for the largest q before reporting.
    Optimized { restarts: u32, max_evals: u32 },
}

/// Budgets for system comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompareBudgets {
    /// Radius of the distance table in the candidate metric.
    pub table_radius: u32,
    pub table_element_cap: usize,
    /// Every base generator must appear within this candidate-metric depth.
    pub generation_depth: u32,
    pub pilot_trials: u32,
    pub walk_trials: u32,
    /// Hard cap on walk length (the pilot may choose fewer steps).
    pub max_steps: u32,
    pub conv_depth: u32,
    pub conv_element_budget: usize,
    pub fit_window: usize,
    /// Largest tolerable fraction of walks leaving the table.
    pub discard_limit: f64,
    pub master_seed: u64,
}

impl Default for CompareBudgets {
    fn default() -> Self {
        CompareBudgets {
            table_radius: 12,
            table_element_cap: 2_000_000,
            generation_depth: 4,
            pilot_trials: 32,
            walk_trials: 400,
            max_steps: 64,
            conv_depth: 10,
            conv_element_budget: 2_000_000,
            fit_window: 4,
            discard_limit: 0.10,
            master_seed: 42,
        }
    }
}

/// One system's constants in its own word metric.
#[derive(Debug, Clone, Serialize)]
pub struct SystemReport {
    pub label: String,
    /// Canonical comma-separated element list (sorted, inverses included).
    pub canonical: String,
    pub element_count: usize,
    pub volume: VolumeEstimate,
    pub drift: EstimateCI,
    pub entropy: EstimateCI,
    /// Deepest exact convolution level behind `entropy`.
    pub conv_depth_reached: u32,
    pub q: Option<QRatio>,
    pub verdict: Verdict,
    /// Steps per comparison walk (chosen by the pilot).
    pub walk_steps: u32,
    /// Fraction of walks discarded for leaving the distance table.
    pub discarded_fraction: f64,
}

/// Systems ordered by their ratio `q`, best first.
#[derive(Debug, Clone, Serialize)]
pub struct Ranking {
    pub systems: Vec<SystemReport>,
}

struct ElementSampler {
    elements: Vec<NormalForm>,
    cumulative: Vec<f64>,
}

impl ElementSampler {
    fn new(weights: &[(NormalForm, f64)]) -> Self {
        let mut elements = Vec::with_capacity(weights.len());
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for (nf, w) in weights {
            acc += w;
            elements.push(nf.clone());
            cumulative.push(acc);
        }
        ElementSampler {
            elements,
            cumulative,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> &NormalForm {
        let u: f64 = rng.random();
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.elements.len() - 1);
        &self.elements[idx]
    }
}

fn fnv64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Canonicalizes a system spec: normal forms, inverses added for groups,
/// duplicates removed, sorted by (length, letters).
fn canonical_elements(
    p: GroupPresentation,
    spec: &SystemSpec,
) -> Result<Vec<NormalForm>, IneqError> {
    let mut set: DetHashSet<NormalForm> = DetHashSet::default();
    let mut elements: Vec<NormalForm> = Vec::new();
    let mut push = |nf: NormalForm, elements: &mut Vec<NormalForm>| {
        if set.insert(nf.clone()) {
            elements.push(nf);
        }
    };
    for word in &spec.words {
        let nf = p.normalize(word).map_err(IneqError::Group)?;
        if nf.is_identity() {
            return Err(IneqError::InvalidSystem {
                label: spec.label.clone(),
                reason: "contains a word equal to the identity".into(),
            });
        }
        if p.is_group() {
            let inv = p.invert(&nf).map_err(IneqError::Group)?;
            push(inv, &mut elements);
        }
        push(nf, &mut elements);
    }
    if elements.is_empty() {
        return Err(IneqError::InvalidSystem {
            label: spec.label.clone(),
            reason: "contains no words".into(),
        });
    }
    elements.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.letters().cmp(b.letters()))
    });
    Ok(elements)
}

struct DistanceTable {
    dist: DetHashMap<NormalForm, u32>,
    spheres: SphereCounts,
}

/// BFS over multiplication by system elements, committing whole levels
/// only, up to the radius or the element cap.
fn distance_table(
    p: GroupPresentation,
    elements: &[NormalForm],
    radius: u32,
    element_cap: usize,
) -> Result<DistanceTable, IneqError> {
    let mut dist: DetHashMap<NormalForm, u32> = DetHashMap::default();
    dist.insert(p.identity(), 0);
    let mut frontier = vec![p.identity()];
    let mut counts: Vec<u64> = vec![1];

    for level in 0..radius {
        let mut next: Vec<NormalForm> = Vec::new();
        let mut seen: DetHashSet<NormalForm> = DetHashSet::default();
        for u in &frontier {
            for s in elements {
                let v = p.multiply(u, s).map_err(IneqError::Group)?;
                if !dist.contains_key(&v) && seen.insert(v.clone()) {
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        if dist.len() + next.len() > element_cap {
            break;
        }
        for v in &next {
            dist.insert(v.clone(), level + 1);
        }
        counts.push(next.len() as u64);
        frontier = next;
    }

    Ok(DistanceTable {
        dist,
        spheres: SphereCounts::new(p, counts),
    })
}

struct TableWalks {
    slopes: Vec<f64>,
    discarded: usize,
    steps_used: u32,
}

fn walk_the_table(
    p: GroupPresentation,
    sampler: &ElementSampler,
    table: &DetHashMap<NormalForm, u32>,
    budgets: &CompareBudgets,
    sys_master: u64,
) -> TableWalks {
    // Pilot: when does a typical walk leave the table?
    let mut exits: Vec<u32> = (0..budgets.pilot_trials)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(child_seed(sys_master, 1, i as u64));
            let mut letters: Vec<crate::group::Generator> = Vec::new();
            for t in 1..=budgets.max_steps {
                let e = sampler.sample(&mut rng);
                for &g in e.letters() {
                    p.push_letter_unchecked(&mut letters, g);
                }
                let nf = NormalForm::from_parts(p, letters.clone());
                if !table.contains_key(&nf) {
                    return t;
                }
            }
            budgets.max_steps
        })
        .collect();
    exits.sort_unstable();
    let median = exits[exits.len() / 2];
    let steps_used = ((0.6 * median as f64) as u32)
        .clamp(4, budgets.max_steps);
    let half = steps_used / 2;

    let mut slopes = Vec::with_capacity(budgets.walk_trials as usize);
    let mut discarded = 0usize;
    for i in 0..budgets.walk_trials {
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed(sys_master, 2, i as u64));
        let mut letters: Vec<crate::group::Generator> = Vec::new();
        let mut d_half = 0u32;
        let mut d_end = None;
        for t in 1..=steps_used {
            let e = sampler.sample(&mut rng);
            for &g in e.letters() {
                p.push_letter_unchecked(&mut letters, g);
            }
            let nf = NormalForm::from_parts(p, letters.clone());
            match table.get(&nf) {
                Some(&d) => {
                    if t == half {
                        d_half = d;
                    }
                    if t == steps_used {
                        d_end = Some(d);
                    }
                }
                None => break,
            }
        }
        match d_end {
            Some(d) => {
                slopes.push((d as f64 - d_half as f64) / (steps_used - half) as f64);
            }
            None => discarded += 1,
        }
    }
    TableWalks {
        slopes,
        discarded,
        steps_used,
    }
}

fn optimize_element_weights(
    p: GroupPresentation,
    elements: &[NormalForm],
    table: &DistanceTable,
    budgets: &CompareBudgets,
    sys_master: u64,
    restarts: u32,
    max_evals: u32,
) -> Vec<f64> {
    // Slots: inverse pairs for groups, single elements for the semigroup.
    let mut slot_of: Vec<usize> = Vec::with_capacity(elements.len());
    let mut slots = 0usize;
    if p.is_group() {
        let mut assigned: DetHashMap<NormalForm, usize> = DetHashMap::default();
        for e in elements {
            if let Some(&s) = assigned.get(e) {
                slot_of.push(s);
                continue;
            }
            let inv = p.invert(e).expect("group");
            let s = slots;
            slots += 1;
            assigned.insert(e.clone(), s);
            assigned.insert(inv, s);
            slot_of.push(s);
        }
    } else {
        slot_of = (0..elements.len()).collect();
        slots = elements.len();
    }
    let sides: Vec<f64> = {
        let mut count = vec![0.0; slots];
        for &s in &slot_of {
            count[s] += 1.0;
        }
        count
    };
    let uniform_slots = vec![1.0 / slots as f64; slots];
    if slots == 1 {
        return vec![1.0 / elements.len() as f64; elements.len()];
    }

    let element_weights = |slot_weights: &[f64]| -> Vec<f64> {
        slot_of
            .iter()
            .map(|&s| slot_weights[s] / sides[s])
            .collect()
    };

    let inner_depth = budgets.conv_depth.saturating_sub(3).max(3);
    let mut best = (f64::NEG_INFINITY, uniform_slots.clone());
    for restart in 0..restarts {
        let crn = child_seed(sys_master, 4, restart as u64);
        let start: Vec<f64> = if restart == 0 {
            vec![0.0; slots - 1]
        } else {
            let mut rng =
                ChaCha8Rng::seed_from_u64(child_seed(sys_master, 5, restart as u64));
            (0..slots - 1).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
        };
        let mut objective = |theta: &[f64]| -> f64 {
            let sw = weights_from_logits(theta, slots, 1e-4);
            let ew = element_weights(&sw);
            let steps: Vec<(NormalForm, f64)> = elements
                .iter()
                .cloned()
                .zip(ew.iter().cloned())
                .collect();
            let h = match entropy_rate_over_steps(
                p,
                &steps,
                inner_depth,
                budgets.conv_element_budget / 4,
            ) {
                Ok(h) => h,
                Err(_) => return f64::INFINITY,
            };
            let sampler = ElementSampler::new(&steps);
            let inner_budgets = CompareBudgets {
                walk_trials: budgets.walk_trials / 2,
                ..*budgets
            };
            let walks = walk_the_table(p, &sampler, &table.dist, &inner_budgets, crn);
            if walks.slopes.len() < 2 {
                return f64::INFINITY;
            }
            let l = mean_with_se(&walks.slopes, MethodTag::MonteCarloSlope);
            let v = match sphere_ratio_fit(&table.spheres, budgets.fit_window) {
                Ok(v) => v,
                Err(_) => return f64::INFINITY,
            };
            match q_ratio(&h.estimate, &l, &v) {
                Ok(q) => {
                    if q.value > best.0 {
                        best = (q.value, sw.clone());
                    }
                    -q.value
                }
                Err(_) => f64::INFINITY,
            }
        };
        let _ = nelder_mead(&start, 0.25, max_evals, &mut objective);
    }
    element_weights(&best.1)
}

/// Compares candidate generating systems of one presentation in their own
/// word metrics and ranks them by `q`.
///
/// Each system is canonicalized, checked to generate the group (every base
/// letter within `generation_depth` in the candidate metric), and measured:
/// growth from a BFS distance table, escape rate as a two-point slope of
/// table distances along sampled walks (the slope cancels the constant
/// offset that plain `d/n` carries at short horizons), entropy from exact
/// convolutions of the element measure. Walks that leave the table are
/// discarded; more than `discard_limit` of them is an error. Duplicate
/// specs produce identical entries, and the ranking does not depend on
/// input order.
pub fn compare_systems(
    p: GroupPresentation,
    specs: &[SystemSpec],
    policy: MeasurePolicy,
    budgets: &CompareBudgets,
) -> Result<Ranking, IneqError> {
    let mut memo: DetHashMap<String, SystemReport> = DetHashMap::default();
    let mut systems: Vec<SystemReport> = Vec::with_capacity(specs.len());

    for spec in specs {
        let elements = canonical_elements(p, spec)?;
        let canonical = elements
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        if let Some(hit) = memo.get(&canonical) {
            let mut entry = hit.clone();
            entry.label = spec.label.clone();
            systems.push(entry);
            continue;
        }

        let table = distance_table(p, &elements, budgets.table_radius, budgets.table_element_cap)?;

        // Generation check: every base letter reachable, and close.
        for g in p.alphabet() {
            let letter = NormalForm::from_parts(p, vec![g]);
            let ok = table
                .dist
                .get(&letter)
                .is_some_and(|&d| d <= budgets.generation_depth);
            if !ok {
                return Err(IneqError::InvalidSystem {
                    label: spec.label.clone(),
                    reason: format!(
                        "does not reach the base generator {g} within depth {}",
                        budgets.generation_depth
                    ),
                });
            }
        }

        let volume = sphere_ratio_fit(&table.spheres, budgets.fit_window)?;
        let sys_master = child_seed(budgets.master_seed, STREAM_COMPARE, fnv64(canonical.as_bytes()));

        let element_weights: Vec<f64> = match policy {
            MeasurePolicy::Uniform => {
                vec![1.0 / elements.len() as f64; elements.len()]
            }
            MeasurePolicy::Optimized {
                restarts,
                max_evals,
            } => optimize_element_weights(
                p,
                &elements,
                &table,
                budgets,
                sys_master,
                restarts,
                max_evals,
            ),
        };
        let steps: Vec<(NormalForm, f64)> = elements
            .iter()
            .cloned()
            .zip(element_weights.iter().cloned())
            .collect();

        let entropy = entropy_rate_over_steps(
            p,
            &steps,
            budgets.conv_depth,
            budgets.conv_element_budget,
        )
        .map_err(IneqError::Walk)?;

        let sampler = ElementSampler::new(&steps);
        let walks = walk_the_table(p, &sampler, &table.dist, budgets, sys_master);
        let total = walks.slopes.len() + walks.discarded;
        let discarded_fraction = walks.discarded as f64 / total.max(1) as f64;
        if discarded_fraction > budgets.discard_limit || walks.slopes.len() < 2 {
            return Err(IneqError::UnreliableComparison {
                label: spec.label.clone(),
                fraction: discarded_fraction,
                limit: budgets.discard_limit,
            });
        }
        let escape = mean_with_se(&walks.slopes, MethodTag::MonteCarloSlope);

        let (q, verdict) = match q_ratio(&entropy.estimate, &escape, &volume) {
            Ok(q) => (Some(q), classify(q)),
            Err(IneqError::UndefinedDrift { .. }) => (None, Verdict::UndefinedDrift),
            Err(e) => return Err(e),
        };

        let report = SystemReport {
            label: spec.label.clone(),
            canonical: canonical.clone(),
            element_count: elements.len(),
            volume,
            drift: escape,
            entropy: entropy.estimate,
            conv_depth_reached: entropy.reached,
            q,
            verdict,
            walk_steps: walks.steps_used,
            discarded_fraction,
        };
        memo.insert(canonical, report.clone());
        systems.push(report);
    }

    systems.sort_by(|a, b| {
        let qa = a.q.map(|q| q.value);
        let qb = b.q.map(|q| q.value);
        match (qa, qb) {
            (Some(x), Some(y)) => y
                .partial_cmp(&x)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.canonical.cmp(&b.canonical))
                .then_with(|| a.label.cmp(&b.label)),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => a
                .canonical
                .cmp(&b.canonical)
                .then_with(|| a.label.cmp(&b.label)),
        }
    });
    Ok(Ranking { systems })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Generator;

    fn p(spec: &str) -> GroupPresentation {
        spec.parse().unwrap()
    }

    fn exact(value: f64) -> EstimateCI {
        EstimateCI {
            value,
            std_error: 0.0,
            samples: 1,
            method: MethodTag::ExactIncrementSpread,
        }
    }

    fn exact_volume(bits: f64) -> VolumeEstimate {
        VolumeEstimate {
            bits_per_step: bits,
            method: crate::enumeration::VolumeMethod::ClosedForm,
            uncertainty: 0.0,
            window: None,
        }
    }

    #[test]
    fn q_of_the_exact_free_constants_is_one() {
        let h = exact(0.5 * 3f64.log2());
        let l = exact(0.5);
        let v = exact_volume(3f64.log2());
        let q = q_ratio(&h, &l, &v).unwrap();
        assert!((q.value - 1.0).abs() < 1e-15);
        assert_eq!(q.sigma, 0.0);
        assert_eq!(classify(q), Verdict::ConsistentWithEquality);
    }

    #[test]
    fn q_is_invariant_under_a_change_of_log_base() {
        // Switching log base scales h and v by the same constant; l is not
        // a logarithmic quantity.
        let c = std::f64::consts::LN_2;
        let q1 = q_ratio(&exact(0.6), &exact(0.5), &exact_volume(1.5)).unwrap();
        let q2 = q_ratio(&exact(0.6 * c), &exact(0.5), &exact_volume(1.5 * c)).unwrap();
        assert!((q1.value - q2.value).abs() < 4.0 * f64::EPSILON);
    }

    #[test]
    fn q_requires_a_drift_bounded_away_from_zero() {
        let l = EstimateCI {
            value: 0.01,
            std_error: 0.02,
            samples: 100,
            method: MethodTag::MonteCarloWalk,
        };
        assert!(matches!(
            q_ratio(&exact(0.1), &l, &exact_volume(1.0)),
            Err(IneqError::UndefinedDrift { .. })
        ));
        // Zero growth also leaves q undefined.
        assert!(matches!(
            q_ratio(&exact(0.0), &exact(0.3), &exact_volume(0.0)),
            Err(IneqError::UndefinedDrift { .. })
        ));
    }

    #[test]
    fn q_sanity_rejects_estimates_far_above_one() {
        assert!(matches!(
            q_ratio(&exact(1.2), &exact(0.5), &exact_volume(1.58496)),
            Err(IneqError::QSanity { .. })
        ));
    }

    #[test]
    fn verdict_bands_cover_all_regions() {
        let consistent = QRatio {
            value: 0.97,
            sigma: 0.001,
        };
        assert_eq!(classify(consistent), Verdict::ConsistentWithEquality);
        let below = QRatio {
            value: 0.80,
            sigma: 0.01,
        };
        assert_eq!(classify(below), Verdict::StrictlyBelow);
        let between = QRatio {
            value: 0.94,
            sigma: 0.010,
        };
        assert_eq!(classify(between), Verdict::Inconclusive);
        let noisy = QRatio {
            value: 0.90,
            sigma: 0.06,
        };
        assert_eq!(classify(noisy), Verdict::ConsistentWithEquality);
    }

    #[test]
    fn softmax_weights_hit_uniform_at_zero_logits() {
        let w = weights_from_logits(&[0.0, 0.0], 3, 1e-4);
        for wi in &w {
            assert!((wi - 1.0 / 3.0).abs() < 1e-12);
        }
        let total: f64 = w.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let skewed = weights_from_logits(&[3.0, -3.0], 3, 1e-3);
        assert!(skewed.iter().all(|&wi| wi >= 1e-3));
        assert!(skewed[0] > skewed[2] && skewed[2] > skewed[1]);
    }

    #[test]
    fn nelder_mead_minimizes_a_quadratic() {
        let mut f = |x: &[f64]| (x[0] - 1.5).powi(2) + 2.0 * (x[1] + 0.5).powi(2);
        let (x, fx) = nelder_mead(&[0.0, 0.0], 0.5, 200, &mut f);
        assert!(fx < 1e-4, "{fx}");
        assert!((x[0] - 1.5).abs() < 0.02);
        assert!((x[1] + 0.5).abs() < 0.02);
    }

    #[test]
    fn free_group_report_is_consistent_with_equality() {
        let f2 = p("free:2");
        let mu = SymmetricMeasure::uniform(f2);
        let b = ReportBudgets {
            conv_depth: 12,
            walk_steps: 4_000,
            walk_trials: 100,
            ..ReportBudgets::default()
        };
        let report = fundamental_report(f2, &mu, &b).unwrap();
        assert_eq!(report.verdict, Verdict::ConsistentWithEquality);
        let q = report.q.unwrap();
        assert!(q.value > 0.93 && q.value < 1.01, "{}", q.value);
        assert!(report.inequality_satisfied);
        assert!((report.drift.value - 0.5).abs() < 0.01);
        assert!((report.volume.bits_per_step - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn abelian_report_has_undefined_q_and_vanishing_entropy() {
        let a2 = p("abelian:2");
        let mu = SymmetricMeasure::uniform(a2);
        let b = ReportBudgets {
            conv_depth: 10,
            walk_steps: 2_000,
            walk_trials: 50,
            ..ReportBudgets::default()
        };
        let report = fundamental_report(a2, &mu, &b).unwrap();
        assert_eq!(report.verdict, Verdict::UndefinedDrift);
        assert!(report.q.is_none());
        assert!(report.entropy.estimate.value < 0.02);
        assert!(report.inequality_satisfied);
        assert_eq!(report.volume.bits_per_step, 0.0);
    }

    #[test]
    fn optimizer_fails_cleanly_when_q_is_never_defined() {
        // On the integers, growth is zero: every evaluation is undefined.
        let z = p("free:1");
        let b = OptimizeBudgets {
            restarts: 2,
            max_evals_per_restart: 4,
            inner_conv_depth: 4,
            inner_element_budget: 10_000,
            inner_walk_steps: 100,
            inner_walk_trials: 16,
            ..OptimizeBudgets::default()
        };
        assert!(matches!(
            optimize_measure(z, &b),
            Err(IneqError::OptimizationFailed { .. })
        ));
    }

    #[test]
    fn optimizer_on_the_free_group_stays_near_uniform() {
        let f2 = p("free:2");
        let b = OptimizeBudgets {
            restarts: 2,
            max_evals_per_restart: 20,
            inner_conv_depth: 5,
            inner_element_budget: 50_000,
            inner_walk_steps: 300,
            inner_walk_trials: 64,
            full: ReportBudgets {
                conv_depth: 8,
                walk_steps: 2_000,
                walk_trials: 64,
                ..ReportBudgets::default()
            },
            ..OptimizeBudgets::default()
        };
        let result = optimize_measure(f2, &b).unwrap();
        // The trace's best-so-far column never decreases.
        for w in result.trace.windows(2) {
            assert!(w[1].best_q >= w[0].best_q);
        }
        assert!(result.evaluations >= result.trace.len() as u64);
        let q = result.report.q.unwrap();
        assert!(q.value > 0.8 && q.value < 1.05, "{}", q.value);
        // The maximizer is the uniform measure; the search stays close.
        let uniform = SymmetricMeasure::uniform(f2);
        let tv = result.measure.total_variation(&uniform).unwrap();
        assert!(tv < 0.15, "{tv}");
    }

    #[test]
    fn comparison_rejects_systems_with_identity_words() {
        let f2 = p("free:2");
        let spec = SystemSpec {
            label: "bad".into(),
            words: vec![Word::parse("a a^-1").unwrap()],
        };
        assert!(matches!(
            compare_systems(f2, &[spec], MeasurePolicy::Uniform, &CompareBudgets::default()),
            Err(IneqError::InvalidSystem { .. })
        ));
    }

    #[test]
    fn comparison_rejects_non_generating_systems() {
        let f2 = p("free:2");
        // Squares generate an index-infinity subgroup; z1 is unreachable.
        let spec = SystemSpec {
            label: "squares".into(),
            words: vec![Word::parse("a a").unwrap(), Word::parse("b b").unwrap()],
        };
        let b = CompareBudgets {
            table_radius: 5,
            table_element_cap: 100_000,
            ..CompareBudgets::default()
        };
        let err = compare_systems(f2, &[spec], MeasurePolicy::Uniform, &b).unwrap_err();
        match err {
            IneqError::InvalidSystem { label, reason } => {
                assert_eq!(label, "squares");
                assert!(reason.contains("does not reach"), "{reason}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn comparison_distance_table_matches_word_length_for_the_standard_system() {
        let f2 = p("free:2");
        let elements = canonical_elements(
            f2,
            &SystemSpec {
                label: "std".into(),
                words: vec![Word::parse("a").unwrap(), Word::parse("b").unwrap()],
            },
        )
        .unwrap();
        assert_eq!(elements.len(), 4);
        let table = distance_table(f2, &elements, 6, 1_000_000).unwrap();
        for (nf, &d) in &table.dist {
            assert_eq!(nf.len() as u32, d, "{nf}");
        }
        assert_eq!(table.spheres.counts(), &[1, 4, 12, 36, 108, 324, 972]);
    }

    #[test]
    fn comparison_flags_walks_that_outrun_the_table() {
        let f2 = p("free:2");
        let spec = SystemSpec {
            label: "std".into(),
            words: vec![Word::parse("a").unwrap(), Word::parse("b").unwrap()],
        };
        let b = CompareBudgets {
            table_radius: 4,
            fit_window: 3,
            max_steps: 60,
            pilot_trials: 8,
            walk_trials: 50,
            conv_depth: 4,
            ..CompareBudgets::default()
        };
        assert!(matches!(
            compare_systems(f2, &[spec], MeasurePolicy::Uniform, &b),
            Err(IneqError::UnreliableComparison { .. })
        ));
    }

    #[test]
    fn standard_free_system_ranks_consistent_with_equality() {
        let f2 = p("free:2");
        let standard = SystemSpec {
            label: "standard".into(),
            words: vec![Word::parse("a").unwrap(), Word::parse("b").unwrap()],
        };
        let doubled = SystemSpec {
            label: "doubled".into(),
            words: vec![
                Word::parse("a").unwrap(),
                Word::parse("b").unwrap(),
                Word::parse("a b").unwrap(),
            ],
        };
        let b = CompareBudgets {
            table_radius: 11,
            table_element_cap: 600_000,
            conv_depth: 9,
            conv_element_budget: 600_000,
            walk_trials: 300,
            max_steps: 40,
            ..CompareBudgets::default()
        };
        let ranking =
            compare_systems(f2, &[doubled.clone(), standard.clone()], MeasurePolicy::Uniform, &b)
                .unwrap();
        assert_eq!(ranking.systems.len(), 2);
        for s in &ranking.systems {
            let q = s.q.unwrap();
            assert!(q.value <= 1.05, "{}: {}", s.label, q.value);
        }
        let std_entry = ranking
            .systems
            .iter()
            .find(|s| s.label == "standard")
            .unwrap();
        let qs = std_entry.q.unwrap();
        assert!(qs.value > 0.88 && qs.value <= 1.02, "{}", qs.value);

        // Permutation invariance: same ranking regardless of input order.
        let swapped =
            compare_systems(f2, &[standard, doubled], MeasurePolicy::Uniform, &b).unwrap();
        let labels: Vec<&str> = ranking.systems.iter().map(|s| s.label.as_str()).collect();
        let labels_swapped: Vec<&str> =
            swapped.systems.iter().map(|s| s.label.as_str()).collect();
        assert_eq!(labels, labels_swapped);
        for (a, b) in ranking.systems.iter().zip(&swapped.systems) {
            assert_eq!(a.q.unwrap().value.to_bits(), b.q.unwrap().value.to_bits());
        }
    }

    #[test]
    fn duplicate_specs_produce_identical_entries() {
        let f2 = p("free:2");
        let mk = |label: &str| SystemSpec {
            label: label.into(),
            words: vec![Word::parse("a").unwrap(), Word::parse("b").unwrap()],
        };
        let b = CompareBudgets {
            table_radius: 8,
            table_element_cap: 50_000,
            conv_depth: 6,
            conv_element_budget: 50_000,
            walk_trials: 60,
            max_steps: 24,
            ..CompareBudgets::default()
        };
        let ranking = compare_systems(
            f2,
            &[mk("one"), mk("two")],
            MeasurePolicy::Uniform,
            &b,
        )
        .unwrap();
        assert_eq!(ranking.systems.len(), 2);
        let (a, c) = (&ranking.systems[0], &ranking.systems[1]);
        assert_eq!(a.canonical, c.canonical);
        assert_eq!(a.q.unwrap().value.to_bits(), c.q.unwrap().value.to_bits());
        assert_ne!(a.label, c.label);
    }

    #[test]
    fn measure_from_slots_splits_pairs_for_groups() {
        let f2 = p("free:2");
        let mu = measure_from_slot_weights(f2, &[0.7, 0.3]).unwrap();
        assert!((mu.weight(Generator::positive(1)) - 0.35).abs() < 1e-15);
        assert!((mu.weight(Generator::negative(1)) - 0.35).abs() < 1e-15);
        let m3 = p("lfsemigroup:3");
        let nu = measure_from_slot_weights(m3, &[0.5, 0.25, 0.25]).unwrap();
        assert!((nu.weight(Generator::positive(1)) - 0.5).abs() < 1e-15);
    }
}
