//! Exact growth data: sphere/ball enumeration, path counting, and the three
//! ways to obtain the growth exponent `v` (bits per step).
//!
//! `v` is defined as the limit of `log2 |W_n| / n`, where `W_n` is the
//! sphere of radius `n` in the word metric. Free and free abelian groups
//! have closed forms (`log2(2k-1)` and `0`). The locally free semigroup has
//! a rational growth series `1 / mu_k(t)` whose denominator, the clique
//! polynomial of the commutation graph, gives both an exact linear
//! recurrence for sphere counts and an exact `v` via its smallest root. The
//! locally free group has no closed form here, so `v` is fitted from the
//! tail of enumerated sphere ratios.

use serde::Serialize;
use thiserror::Error;

use crate::group::{GroupError, GroupPresentation, NormalForm, PresentationKind};
use crate::{DetHashMap, DetHashSet};

/// Errors from enumeration and volume estimation.
#[derive(Debug, Error)]
pub enum EnumError {
    #[error(transparent)]
    Group(#[from] GroupError),
    /// Ball enumeration hit its element cap; completed levels are inside.
    #[error("element budget {cap} exhausted after completing radius {}", partial.spheres.radius())]
    BallBudget {
        partial: Box<BallEnumeration>,
        cap: usize,
    },
    /// Path counting hit its element cap.
    #[error("element budget {cap} exhausted after {completed} of {requested} convolution steps")]
    PathBudget {
        completed: u32,
        requested: u32,
        cap: usize,
    },
    /// A checked integer operation overflowed.
    #[error("integer overflow while {context}")]
    Overflow { context: String },
    /// Sphere counts unusable for a ratio fit (zeros or too short).
    #[error("growth sequence degenerate or too short for a window of {window} ratios")]
    DegenerateGrowth { window: usize },
    /// The clique polynomial had no root in `(0, 1]`; cannot happen for
    /// valid ranks, kept as a guard.
    #[error("no root of the clique polynomial found in (0, 1]")]
    RootNotFound,
    /// A ratio-fit volume was requested without sphere counts to fit.
    #[error("sphere counts are required to fit the growth of {presentation}")]
    MissingCounts { presentation: String },
    /// Ratio window too small to report a spread.
    #[error("ratio window must span at least 2 ratios, got {window}")]
    BadWindow { window: usize },
}

/// Sphere sizes `|W_n|` for `n = 0..=radius`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SphereCounts {
    presentation: GroupPresentation,
    counts: Vec<u64>,
}

impl SphereCounts {
    pub(crate) fn new(presentation: GroupPresentation, counts: Vec<u64>) -> Self {
        SphereCounts {
            presentation,
            counts,
        }
    }

    pub fn presentation(&self) -> GroupPresentation {
        self.presentation
    }

    /// Largest enumerated radius.
    pub fn radius(&self) -> u32 {
        (self.counts.len() - 1) as u32
    }

    /// All counts, indexed by radius (`counts()[0] == 1`).
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `|W_n|`, if within the enumerated radius.
    pub fn sphere(&self, n: u32) -> Option<u64> {
        self.counts.get(n as usize).copied()
    }

    /// Ball size `|B_n|` (cumulative sum, overflow-checked).
    pub fn ball(&self, n: u32) -> Result<u64, EnumError> {
        let mut total: u64 = 0;
        for &c in self.counts.get(..=n as usize).into_iter().flatten() {
            total = total.checked_add(c).ok_or_else(|| EnumError::Overflow {
                context: "summing ball size".into(),
            })?;
        }
        Ok(total)
    }

    /// Successive `log2(|W_{n+1}| / |W_n|)` for `n = 0..radius-1`.
    /// Entries where either sphere is empty are `NaN`.
    pub fn log_ratios(&self) -> Vec<f64> {
        self.counts
            .windows(2)
            .map(|w| {
                if w[0] == 0 || w[1] == 0 {
                    f64::NAN
                } else {
                    (w[1] as f64).log2() - (w[0] as f64).log2()
                }
            })
            .collect()
    }
}

/// Fully materialized balls: one vector of canonical forms per radius.
#[derive(Debug, Clone)]
pub struct BallEnumeration {
    pub spheres: SphereCounts,
    /// `levels[n]` holds exactly the elements at distance `n`, in discovery
    /// order (deterministic).
    pub levels: Vec<Vec<NormalForm>>,
}

/// Breadth-first enumeration of the ball of the given radius.
///
/// Stops with [`EnumError::BallBudget`] if the total element count would
/// exceed `element_cap`; the error carries every fully completed level. In
/// debug builds each newly discovered element is asserted to have canonical
/// length equal to its BFS level, which is the invariant tying the word
/// metric to the enumeration.
pub fn enumerate_ball(
    p: GroupPresentation,
    radius: u32,
    element_cap: usize,
) -> Result<BallEnumeration, EnumError> {
    let alphabet = p.alphabet();
    let mut seen: DetHashSet<NormalForm> = DetHashSet::default();
    seen.insert(p.identity());
    let mut levels: Vec<Vec<NormalForm>> = vec![vec![p.identity()]];

    for depth in 0..radius {
        let mut next: Vec<NormalForm> = Vec::new();
        for u in &levels[depth as usize] {
            let base = u.letters();
            for &g in &alphabet {
                let mut letters = base.to_vec();
                p.push_letter_unchecked(&mut letters, g);
                let v = NormalForm::from_parts(p, letters);
                if seen.contains(&v) {
                    continue;
                }
                debug_assert_eq!(
                    v.len(),
                    depth as usize + 1,
                    "BFS level must equal canonical length"
                );
                if seen.len() + 1 > element_cap {
                    let counts = levels.iter().map(|l| l.len() as u64).collect();
                    return Err(EnumError::BallBudget {
                        partial: Box::new(BallEnumeration {
                            spheres: SphereCounts::new(p, counts),
                            levels,
                        }),
                        cap: element_cap,
                    });
                }
                seen.insert(v.clone());
                next.push(v);
            }
        }
        levels.push(next);
    }

    let counts = levels.iter().map(|l| l.len() as u64).collect();
    Ok(BallEnumeration {
        spheres: SphereCounts::new(p, counts),
        levels,
    })
}

/// Exact path counts of the nearest-neighbour walk: how many length-`n`
/// letter sequences multiply to each element.
#[derive(Debug, Clone)]
pub struct PathCounts {
    presentation: GroupPresentation,
    steps: u32,
    exact: DetHashMap<NormalForm, u128>,
    cumulative: DetHashMap<NormalForm, u128>,
}

impl PathCounts {
    pub fn presentation(&self) -> GroupPresentation {
        self.presentation
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    /// Counts of sequences of length exactly `steps`.
    pub fn exact(&self) -> &DetHashMap<NormalForm, u128> {
        &self.exact
    }

    /// Counts of sequences of length at most `steps`.
    pub fn cumulative(&self) -> &DetHashMap<NormalForm, u128> {
        &self.cumulative
    }

    /// Exact-length count for one element (0 when unreachable).
    pub fn exact_paths_to(&self, nf: &NormalForm) -> u128 {
        self.exact.get(nf).copied().unwrap_or(0)
    }

    /// At-most-length count for one element.
    pub fn cumulative_paths_to(&self, nf: &NormalForm) -> u128 {
        self.cumulative.get(nf).copied().unwrap_or(0)
    }
}

/// Counts all products of `steps` alphabet letters, with overflow-checked
/// accumulators. `element_cap` bounds the support table size.
pub fn count_paths(
    p: GroupPresentation,
    steps: u32,
    element_cap: usize,
) -> Result<PathCounts, EnumError> {
    let alphabet = p.alphabet();
    let mut exact: DetHashMap<NormalForm, u128> = DetHashMap::default();
    exact.insert(p.identity(), 1);
    let mut cumulative = exact.clone();

    for done in 0..steps {
        let mut next: DetHashMap<NormalForm, u128> = DetHashMap::default();
        for (u, &c) in &exact {
            let base = u.letters();
            for &g in &alphabet {
                let mut letters = base.to_vec();
                p.push_letter_unchecked(&mut letters, g);
                let v = NormalForm::from_parts(p, letters);
                let slot = next.entry(v).or_insert(0);
                *slot = slot.checked_add(c).ok_or_else(|| EnumError::Overflow {
                    context: format!("counting paths of length {}", done + 1),
                })?;
                if next.len() > element_cap {
                    return Err(EnumError::PathBudget {
                        completed: done,
                        requested: steps,
                        cap: element_cap,
                    });
                }
            }
        }
        for (v, &c) in &next {
            let slot = cumulative.entry(v.clone()).or_insert(0);
            *slot = slot.checked_add(c).ok_or_else(|| EnumError::Overflow {
                context: "accumulating cumulative path counts".into(),
            })?;
        }
        exact = next;
    }

    Ok(PathCounts {
        presentation: p,
        steps,
        exact,
        cumulative,
    })
}

/// The clique polynomial of the chain commutation graph on `k` generators:
/// `sum_j (-1)^j C(k - j + 1, j) t^j`, summing over independent sets of
/// non-adjacent chain positions. The growth series of `lfsemigroup:k` is its
/// reciprocal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoebiusPolynomial {
    rank: u32,
    /// Coefficient of `t^j` at index `j`.
    pub coefficients: Vec<i64>,
}

/// Builds the clique polynomial for `lfsemigroup:k`.
pub fn moebius_polynomial(k: u32) -> Result<MoebiusPolynomial, EnumError> {
    // Validates the rank against the same cap as presentations.
    GroupPresentation::new(PresentationKind::LocallyFreeSemigroup, k)?;
    let mut coefficients = Vec::new();
    for j in 0..=(k as u64 + 1) / 2 {
        let c = binomial(k as u64 - j + 1, j)?;
        let signed = i64::try_from(c).map_err(|_| EnumError::Overflow {
            context: format!("clique polynomial coefficient j={j}"),
        })?;
        coefficients.push(if j % 2 == 0 { signed } else { -signed });
    }
    Ok(MoebiusPolynomial {
        rank: k,
        coefficients,
    })
}

fn binomial(n: u64, k: u64) -> Result<u128, EnumError> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| EnumError::Overflow {
                context: format!("binomial({n}, {k})"),
            })?;
        acc /= (i + 1) as u128;
    }
    Ok(acc)
}

impl MoebiusPolynomial {
    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Horner evaluation at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * t + c as f64)
    }

    /// Smallest root in `(0, 1]`, the reciprocal growth of the monoid.
    ///
    /// Grid scan with step `min(1e-3, 1/(k+2)^2)` to bracket the first sign
    /// change (the step is below the smallest root spacing for chain
    /// graphs), then bisection to width `1e-13`.
    pub fn smallest_positive_root(&self) -> Result<f64, EnumError> {
        let k = self.rank as f64;
        let step = (1e-3_f64).min(1.0 / ((k + 2.0) * (k + 2.0)));
        let mut lo = 0.0_f64;
        let mut hi = step;
        loop {
            if self.eval(hi) <= 0.0 {
                break;
            }
            lo = hi;
            hi += step;
            if lo > 1.0 + 2.0 * step {
                return Err(EnumError::RootNotFound);
            }
        }
        for _ in 0..200 {
            if hi - lo < 1e-13 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Sphere counts of `lfsemigroup:k` from the linear recurrence
/// `|W_n| = -sum_{j>=1} mu_j |W_{n-j}|`, overflow-checked.
pub fn spheres_from_moebius(
    m: &MoebiusPolynomial,
    radius: u32,
) -> Result<SphereCounts, EnumError> {
    let p = GroupPresentation::new(PresentationKind::LocallyFreeSemigroup, m.rank)?;
    let mut counts: Vec<i128> = vec![1];
    for n in 1..=radius as usize {
        let mut acc: i128 = 0;
        for (j, &mu_j) in m.coefficients.iter().enumerate().skip(1) {
            if j > n {
                break;
            }
            let term = (mu_j as i128)
                .checked_mul(counts[n - j])
                .ok_or_else(|| EnumError::Overflow {
                    context: format!("sphere recurrence at radius {n}"),
                })?;
            acc = acc.checked_sub(term).ok_or_else(|| EnumError::Overflow {
                context: format!("sphere recurrence at radius {n}"),
            })?;
        }
        counts.push(acc);
    }
    let counts = counts
        .into_iter()
        .map(|c| {
            u64::try_from(c).map_err(|_| EnumError::Overflow {
                context: "sphere count out of u64 range".into(),
            })
        })
        .collect::<Result<Vec<u64>, _>>()?;
    Ok(SphereCounts::new(p, counts))
}

/// How a growth exponent was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    /// Exact closed form (free and free abelian).
    ClosedForm,
    /// Smallest root of the clique polynomial (locally free semigroup).
    MoebiusRoot,
    /// Mean of the last few sphere log-ratios (locally free group).
    SphereRatioFit,
}

/// A growth exponent `v` in bits per step, with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate {
    /// The exponent `v = lim log2 |W_n| / n`.
    pub bits_per_step: f64,
    pub method: VolumeMethod,
    /// Half-spread of the fitted ratios; 0 for the exact methods.
    pub uncertainty: f64,
    /// Sphere index range `(first, last)` the fit averaged over, if fitted.
    pub window: Option<(u32, u32)>,
}

/// Exact `v` where a closed form exists: `log2(2k - 1)` for `free:k`, `0`
/// for `abelian:k` (polynomial growth). `None` for the locally free kinds.
pub fn closed_form_volume(p: GroupPresentation) -> Option<VolumeEstimate> {
    let bits = match p.kind() {
        PresentationKind::Free => ((2 * p.rank() - 1) as f64).log2(),
        PresentationKind::FreeAbelian => 0.0,
        _ => return None,
    };
    Some(VolumeEstimate {
        bits_per_step: bits,
        method: VolumeMethod::ClosedForm,
        uncertainty: 0.0,
        window: None,
    })
}

/// Exact `v` for `lfsemigroup:k` as `log2(1/rho)` with `rho` the smallest
/// root of the clique polynomial.
pub fn moebius_root_volume(k: u32) -> Result<VolumeEstimate, EnumError> {
    let m = moebius_polynomial(k)?;
    let rho = m.smallest_positive_root()?;
    Ok(VolumeEstimate {
        bits_per_step: -rho.log2(),
        method: VolumeMethod::MoebiusRoot,
        uncertainty: 0.0,
        window: None,
    })
}

/// Fits `v` as the mean of the last `window` sphere log-ratios, reporting
/// their half-spread as the uncertainty.
pub fn sphere_ratio_fit(
    counts: &SphereCounts,
    window: usize,
) -> Result<VolumeEstimate, EnumError> {
    if window < 2 {
        return Err(EnumError::BadWindow { window });
    }
    let ratios = counts.log_ratios();
    if ratios.len() < window || ratios.iter().any(|r| r.is_nan()) {
        return Err(EnumError::DegenerateGrowth { window });
    }
    let tail = &ratios[ratios.len() - window..];
    let mean = tail.iter().sum::<f64>() / window as f64;
    let max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let first = (ratios.len() - window) as u32;
    Ok(VolumeEstimate {
        bits_per_step: mean,
        method: VolumeMethod::SphereRatioFit,
        uncertainty: 0.5 * (max - min),
        window: Some((first, counts.radius() - 1)),
    })
}

/// Growth exponent by the best available method for the presentation:
/// closed form, else clique-polynomial root, else a ratio fit over the
/// supplied sphere counts (required only for `lfgroup`).
pub fn log_volume(
    p: GroupPresentation,
    counts: Option<&SphereCounts>,
    window: usize,
) -> Result<VolumeEstimate, EnumError> {
    if let Some(exact) = closed_form_volume(p) {
        return Ok(exact);
    }
    if p.kind() == PresentationKind::LocallyFreeSemigroup {
        return moebius_root_volume(p.rank());
    }
    let counts = counts.ok_or_else(|| EnumError::MissingCounts {
        presentation: p.to_string(),
    })?;
    sphere_ratio_fit(counts, window)
}
