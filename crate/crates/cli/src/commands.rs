//! Subcommand definitions, config echoes, and execution.
//!
//! Each subcommand is split into two phases. `prepare` resolves every
//! input (parses the presentation, inlines measure and system files) and
//! builds the canonical config echo that the result cache is keyed on.
//! `execute` runs the actual computation and shapes the outputs object.
//! Keeping the phases separate means a cache hit never pays for the
//! computation, only for input resolution.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};
use walklab::enumeration::{
    enumerate_ball, log_volume, moebius_polynomial, spheres_from_moebius, EnumError,
};
use walklab::group::{GroupPresentation, PresentationKind};
use walklab::inequality::{
    compare_systems, fundamental_report, optimize_measure, CompareBudgets, MeasurePolicy,
    OptimizeBudgets, ReportBudgets, SystemSpec,
};
use walklab::walks::{
    drift, entropy_rate, lln_check, LlnParams, MeasureAdjustment, SymmetricMeasure,
};

use crate::error::CliError;
use crate::inputs::{load_system, resolve_measure, systems_echo};

#[derive(Debug, clap::Subcommand)]
pub enum Cmd {
    /// Exact sphere and ball sizes, with the growth exponent in bits per step.
    Growth {
        /// Presentation spec: free:K, abelian:K, lfgroup:K, or lfsemigroup:K.
        #[arg(long)]
        group: String,
        /// Largest radius to enumerate.
        #[arg(long, default_value_t = 8)]
        max_n: u32,
        /// Element budget; enumeration stops after the last complete level.
        #[arg(long, default_value_t = 10_000_000)]
        cap: usize,
        /// Trailing sphere-ratio window when the growth must be fitted.
        #[arg(long, default_value_t = 4)]
        window: usize,
        /// Also write a CSV table (n, sphere, ball) to this path.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Escape rate of the sampled walk: mean word length per step.
    Drift {
        #[arg(long)]
        group: String,
        /// Weight file path, or the literal "uniform".
        #[arg(long, default_value = "uniform", value_name = "FILE|uniform")]
        measure: String,
        /// Steps per trajectory.
        #[arg(long, default_value_t = 10_000)]
        steps: u32,
        /// Independent trajectories.
        #[arg(long, default_value_t = 200)]
        trials: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Exact convolution entropies and the entropy rate in bits per step.
    Entropy {
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "uniform", value_name = "FILE|uniform")]
        measure: String,
        /// Deepest exact convolution power.
        #[arg(long, default_value_t = 10)]
        max_n: u32,
        /// Support budget per convolution level.
        #[arg(long, default_value_t = 10_000_000)]
        budget: usize,
        /// Also write a CSV table of the entropy profile to this path.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Growth, escape rate, entropy rate, and the ratio q with a verdict.
    Report {
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "uniform", value_name = "FILE|uniform")]
        measure: String,
        /// BFS radius when the growth must be fitted.
        #[arg(long, default_value_t = 7)]
        ball_radius: u32,
        /// Element budget for that BFS.
        #[arg(long, default_value_t = 2_000_000)]
        ball_cap: usize,
        /// Exact convolution depth for the entropy rate.
        #[arg(long, default_value_t = 12)]
        conv_depth: u32,
        /// Support budget per convolution level.
        #[arg(long, default_value_t = 10_000_000)]
        conv_budget: usize,
        /// Steps per sampled trajectory.
        #[arg(long, default_value_t = 10_000)]
        steps: u32,
        /// Independent trajectories.
        #[arg(long, default_value_t = 200)]
        trials: u32,
        /// Trailing sphere-ratio window for fitted growth.
        #[arg(long, default_value_t = 4)]
        window: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Search step measures for the largest ratio q on one presentation.
    Optimize {
        #[arg(long)]
        group: String,
        /// Independent search restarts (the first starts from uniform).
        #[arg(long, default_value_t = 4)]
        restarts: u32,
        /// Objective evaluations per restart.
        #[arg(long, default_value_t = 60)]
        max_evals: u32,
        /// Convolution depth of the cheap inner objective.
        #[arg(long, default_value_t = 7)]
        inner_conv_depth: u32,
        /// Support budget of the inner objective.
        #[arg(long, default_value_t = 400_000)]
        inner_budget: usize,
        /// Walk steps of the inner objective.
        #[arg(long, default_value_t = 600)]
        inner_steps: u32,
        /// Walk trials of the inner objective.
        #[arg(long, default_value_t = 200)]
        inner_trials: u32,
        /// Smallest weight any letter pair may carry.
        #[arg(long, default_value_t = 1e-4)]
        weight_floor: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Rank generating systems of one group by their ratio q.
    Compare {
        #[arg(long)]
        group: String,
        /// One file per candidate system; the label is the file stem.
        #[arg(long, required = true, num_args = 1.., value_name = "FILE")]
        systems: Vec<PathBuf>,
        /// How step weights on each system's elements are chosen.
        #[arg(long, value_enum, default_value_t = PolicyArg::Uniform)]
        policy: PolicyArg,
        /// Search restarts per system under the optimized policy.
        #[arg(long, default_value_t = 2)]
        opt_restarts: u32,
        /// Objective evaluations per restart under the optimized policy.
        #[arg(long, default_value_t = 40)]
        opt_evals: u32,
        /// Radius of the distance table in the candidate metric.
        #[arg(long, default_value_t = 12)]
        table_radius: u32,
        /// Element budget for the distance table.
        #[arg(long, default_value_t = 2_000_000)]
        table_cap: usize,
        /// Depth within which every base letter must be reachable.
        #[arg(long, default_value_t = 4)]
        generation_depth: u32,
        /// Pilot trajectories that choose the walk length.
        #[arg(long, default_value_t = 32)]
        pilot_trials: u32,
        /// Main walk trajectories per system.
        #[arg(long, default_value_t = 400)]
        trials: u32,
        /// Hard cap on walk length.
        #[arg(long, default_value_t = 64)]
        max_steps: u32,
        /// Exact convolution depth per system.
        #[arg(long, default_value_t = 10)]
        conv_depth: u32,
        /// Support budget per convolution level.
        #[arg(long, default_value_t = 2_000_000)]
        conv_budget: usize,
        /// Trailing sphere-ratio window for the fitted growth.
        #[arg(long, default_value_t = 4)]
        window: usize,
        /// Largest tolerable fraction of walks leaving the table.
        #[arg(long, default_value_t = 0.10)]
        discard_limit: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Concentration of the normalized word length around the escape rate.
    Lln {
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "uniform", value_name = "FILE|uniform")]
        measure: String,
        /// Walk length the concentration is measured at.
        #[arg(long, default_value_t = 400)]
        steps: u32,
        /// Relative half-width of the band around the escape rate.
        #[arg(long = "eps", default_value_t = 0.2)]
        epsilon: f64,
        /// Fixed reference escape rate; measured afresh when omitted.
        #[arg(long)]
        reference: Option<f64>,
        /// Trajectories (also used to measure the reference).
        #[arg(long, default_value_t = 10_000)]
        trials: u32,
        /// Support budget for the exact-distribution path.
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyArg {
    Uniform,
    Optimized,
}

/// A resolved, hashable, ready-to-run invocation.
pub struct Prepared {
    pub command: &'static str,
    pub config: Value,
    /// CSV side-file path, for the subcommands that offer one.
    pub csv: Option<PathBuf>,
    pub job: Job,
}

/// The parsed inputs of one subcommand, ready for [`execute`].
pub enum Job {
    Growth {
        p: GroupPresentation,
        max_n: u32,
        cap: usize,
        window: usize,
    },
    Drift {
        p: GroupPresentation,
        measure: SymmetricMeasure,
        adjustment: Option<MeasureAdjustment>,
        steps: u32,
        trials: u32,
        seed: u64,
    },
    Entropy {
        p: GroupPresentation,
        measure: SymmetricMeasure,
        adjustment: Option<MeasureAdjustment>,
        max_n: u32,
        budget: usize,
    },
    Report {
        p: GroupPresentation,
        measure: SymmetricMeasure,
        adjustment: Option<MeasureAdjustment>,
        budgets: ReportBudgets,
    },
    Optimize {
        p: GroupPresentation,
        budgets: OptimizeBudgets,
    },
    Compare {
        p: GroupPresentation,
        systems: Vec<SystemSpec>,
        policy: MeasurePolicy,
        budgets: CompareBudgets,
    },
    Lln {
        p: GroupPresentation,
        measure: SymmetricMeasure,
        adjustment: Option<MeasureAdjustment>,
        params: LlnParams,
    },
}

fn val<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("output serialization cannot fail")
}

/// Resolves all inputs and builds the canonical config echo. The echo
/// holds the presentation in canonical spelling and file contents rather
/// than file paths, so the config hash is content-keyed.
pub fn prepare(cmd: &Cmd) -> Result<Prepared, CliError> {
    match cmd {
        Cmd::Growth {
            group,
            max_n,
            cap,
            window,
            csv,
        } => {
            let p: GroupPresentation = group.parse()?;
            Ok(Prepared {
                command: "growth",
                config: json!({
                    "cap": cap,
                    "group": p.to_string(),
                    "max_n": max_n,
                    "window": window,
                }),
                csv: csv.clone(),
                job: Job::Growth {
                    p,
                    max_n: *max_n,
                    cap: *cap,
                    window: *window,
                },
            })
        }
        Cmd::Drift {
            group,
            measure,
            steps,
            trials,
            seed,
        } => {
            let p: GroupPresentation = group.parse()?;
            let resolved = resolve_measure(p, measure)?;
            Ok(Prepared {
                command: "drift",
                config: json!({
                    "group": p.to_string(),
                    "measure": resolved.echo,
                    "seed": seed,
                    "steps": steps,
                    "trials": trials,
                }),
                csv: None,
                job: Job::Drift {
                    p,
                    measure: resolved.measure,
                    adjustment: resolved.adjustment,
                    steps: *steps,
                    trials: *trials,
                    seed: *seed,
                },
            })
        }
        Cmd::Entropy {
            group,
            measure,
            max_n,
            budget,
            csv,
        } => {
            let p: GroupPresentation = group.parse()?;
            let resolved = resolve_measure(p, measure)?;
            Ok(Prepared {
                command: "entropy",
                config: json!({
                    "budget": budget,
                    "group": p.to_string(),
                    "max_n": max_n,
                    "measure": resolved.echo,
                }),
                csv: csv.clone(),
                job: Job::Entropy {
                    p,
                    measure: resolved.measure,
                    adjustment: resolved.adjustment,
                    max_n: *max_n,
                    budget: *budget,
                },
            })
        }
        Cmd::Report {
            group,
            measure,
            ball_radius,
            ball_cap,
            conv_depth,
            conv_budget,
            steps,
            trials,
            window,
            seed,
        } => {
            let p: GroupPresentation = group.parse()?;
            let resolved = resolve_measure(p, measure)?;
            let budgets = ReportBudgets {
                ball_radius: *ball_radius,
                ball_element_cap: *ball_cap,
                conv_depth: *conv_depth,
                conv_element_budget: *conv_budget,
                walk_steps: *steps,
                walk_trials: *trials,
                fit_window: *window,
                master_seed: *seed,
            };
            Ok(Prepared {
                command: "report",
                config: json!({
                    "ball_cap": ball_cap,
                    "ball_radius": ball_radius,
                    "conv_budget": conv_budget,
                    "conv_depth": conv_depth,
                    "group": p.to_string(),
                    "measure": resolved.echo,
                    "seed": seed,
                    "steps": steps,
                    "trials": trials,
                    "window": window,
                }),
                csv: None,
                job: Job::Report {
                    p,
                    measure: resolved.measure,
                    adjustment: resolved.adjustment,
                    budgets,
                },
            })
        }
        Cmd::Optimize {
            group,
            restarts,
            max_evals,
            inner_conv_depth,
            inner_budget,
            inner_steps,
            inner_trials,
            weight_floor,
            seed,
        } => {
            let p: GroupPresentation = group.parse()?;
            let full = ReportBudgets {
                master_seed: *seed,
                ..ReportBudgets::default()
            };
            let budgets = OptimizeBudgets {
                restarts: *restarts,
                max_evals_per_restart: *max_evals,
                inner_conv_depth: *inner_conv_depth,
                inner_element_budget: *inner_budget,
                inner_walk_steps: *inner_steps,
                inner_walk_trials: *inner_trials,
                weight_floor: *weight_floor,
                full,
                master_seed: *seed,
            };
            Ok(Prepared {
                command: "optimize",
                config: json!({
                    "full": {
                        "ball_cap": full.ball_element_cap,
                        "ball_radius": full.ball_radius,
                        "conv_budget": full.conv_element_budget,
                        "conv_depth": full.conv_depth,
                        "steps": full.walk_steps,
                        "trials": full.walk_trials,
                        "window": full.fit_window,
                    },
                    "group": p.to_string(),
                    "inner_budget": inner_budget,
                    "inner_conv_depth": inner_conv_depth,
                    "inner_steps": inner_steps,
                    "inner_trials": inner_trials,
                    "max_evals": max_evals,
                    "restarts": restarts,
                    "seed": seed,
                    "weight_floor": weight_floor,
                }),
                csv: None,
                job: Job::Optimize { p, budgets },
            })
        }
        Cmd::Compare {
            group,
            systems,
            policy,
            opt_restarts,
            opt_evals,
            table_radius,
            table_cap,
            generation_depth,
            pilot_trials,
            trials,
            max_steps,
            conv_depth,
            conv_budget,
            window,
            discard_limit,
            seed,
        } => {
            let p: GroupPresentation = group.parse()?;
            let specs = systems
                .iter()
                .map(|path| load_system(p, path))
                .collect::<Result<Vec<_>, _>>()?;
            let policy_value = match policy {
                PolicyArg::Uniform => MeasurePolicy::Uniform,
                PolicyArg::Optimized => MeasurePolicy::Optimized {
                    restarts: *opt_restarts,
                    max_evals: *opt_evals,
                },
            };
            let policy_echo = match policy_value {
                MeasurePolicy::Uniform => json!("uniform"),
                MeasurePolicy::Optimized { restarts, max_evals } => json!({
                    "optimized": { "max_evals": max_evals, "restarts": restarts }
                }),
            };
            let budgets = CompareBudgets {
                table_radius: *table_radius,
                table_element_cap: *table_cap,
                generation_depth: *generation_depth,
                pilot_trials: *pilot_trials,
                walk_trials: *trials,
                max_steps: *max_steps,
                conv_depth: *conv_depth,
                conv_element_budget: *conv_budget,
                fit_window: *window,
                discard_limit: *discard_limit,
                master_seed: *seed,
            };
            Ok(Prepared {
                command: "compare",
                config: json!({
                    "conv_budget": conv_budget,
                    "conv_depth": conv_depth,
                    "discard_limit": discard_limit,
                    "generation_depth": generation_depth,
                    "group": p.to_string(),
                    "max_steps": max_steps,
                    "pilot_trials": pilot_trials,
                    "policy": policy_echo,
                    "seed": seed,
                    "systems": systems_echo(&specs),
                    "table_cap": table_cap,
                    "table_radius": table_radius,
                    "trials": trials,
                    "window": window,
                }),
                csv: None,
                job: Job::Compare {
                    p,
                    systems: specs,
                    policy: policy_value,
                    budgets,
                },
            })
        }
        Cmd::Lln {
            group,
            measure,
            steps,
            epsilon,
            reference,
            trials,
            budget,
            seed,
        } => {
            let p: GroupPresentation = group.parse()?;
            let resolved = resolve_measure(p, measure)?;
            let params = LlnParams {
                steps: *steps,
                epsilon: *epsilon,
                reference: *reference,
                trials: *trials,
                element_budget: *budget,
                master_seed: *seed,
            };
            Ok(Prepared {
                command: "lln",
                config: json!({
                    "budget": budget,
                    "eps": epsilon,
                    "group": p.to_string(),
                    "measure": resolved.echo,
                    "reference": reference,
                    "seed": seed,
                    "steps": steps,
                    "trials": trials,
                }),
                csv: None,
                job: Job::Lln {
                    p,
                    measure: resolved.measure,
                    adjustment: resolved.adjustment,
                    params,
                },
            })
        }
    }
}

/// Runs a prepared job. Returns the outputs object and the exit code:
/// 0 for a complete answer, 3 for a budget-truncated one that is still
/// worth reporting. Everything else surfaces as an error.
pub fn execute(job: Job) -> Result<(Value, u8), CliError> {
    match job {
        Job::Growth {
            p,
            max_n,
            cap,
            window,
        } => {
            let (spheres, truncated) = match enumerate_ball(p, max_n, cap) {
                Ok(ball) => (ball.spheres, false),
                Err(EnumError::BallBudget { partial, .. }) => (partial.spheres, true),
                Err(e) => return Err(e.into()),
            };
            let volume = match log_volume(p, Some(&spheres), window) {
                Ok(v) => Some(v),
                // A truncated table can be too short to fit; report the
                // counts anyway and leave the exponent out.
                Err(EnumError::DegenerateGrowth { .. }) if truncated => None,
                Err(e) => return Err(e.into()),
            };
            let clique_check = if p.kind() == PresentationKind::LocallyFreeSemigroup {
                let poly = moebius_polynomial(p.rank())?;
                let expected = spheres_from_moebius(&poly, spheres.radius())?;
                Some(json!({
                    "agrees": expected.counts() == spheres.counts(),
                    "expected_spheres": expected.counts(),
                }))
            } else {
                None
            };
            let mut balls: Vec<u64> = Vec::with_capacity(spheres.counts().len());
            let mut acc = 0u64;
            for &s in spheres.counts() {
                acc += s;
                balls.push(acc);
            }
            let outputs = json!({
                "balls": balls,
                "clique_check": clique_check,
                "radius_reached": spheres.radius(),
                "spheres": spheres.counts(),
                "truncated": truncated,
                "units": {
                    "balls": "elements",
                    "spheres": "elements",
                    "volume.bits_per_step": "bits per step",
                },
                "volume": val(&volume),
            });
            Ok((outputs, if truncated { 3 } else { 0 }))
        }
        Job::Drift {
            p,
            measure,
            adjustment,
            steps,
            trials,
            seed,
        } => {
            let estimate = drift(p, &measure, steps, trials, seed)?;
            let outputs = json!({
                "drift": val(&estimate),
                "measure_adjustment": val(&adjustment),
                "units": {
                    "drift.value": "word-length letters per step",
                    "drift.std_error": "word-length letters per step",
                },
            });
            Ok((outputs, 0))
        }
        Job::Entropy {
            p,
            measure,
            adjustment,
            max_n,
            budget,
        } => {
            let rate = entropy_rate(p, &measure, max_n, budget)?;
            let code = if rate.budget_limited { 3 } else { 0 };
            let outputs = json!({
                "entropy": val(&rate),
                "measure_adjustment": val(&adjustment),
                "units": {
                    "entropy.entropies": "bits",
                    "entropy.cesaro": "bits per step",
                    "entropy.increments": "bits per step",
                    "entropy.corrected": "bits per step",
                    "entropy.estimate.value": "bits per step",
                },
            });
            Ok((outputs, code))
        }
        Job::Report {
            p,
            measure,
            adjustment,
            budgets,
        } => {
            let report = fundamental_report(p, &measure, &budgets)?;
            let outputs = json!({
                "measure_adjustment": val(&adjustment),
                "report": val(&report),
                "units": {
                    "report.volume.bits_per_step": "bits per step",
                    "report.drift.value": "word-length letters per step",
                    "report.entropy.estimate.value": "bits per step",
                    "report.q.value": "dimensionless",
                    "report.inequality_slack": "bits per step",
                },
            });
            Ok((outputs, 0))
        }
        Job::Optimize { p, budgets } => {
            let result = optimize_measure(p, &budgets)?;
            let weights: Vec<Value> = result
                .measure
                .weights()
                .iter()
                .map(|(g, w)| json!([g.to_string(), w]))
                .collect();
            let mut outputs = val(&result);
            let map = outputs.as_object_mut().expect("optimize outputs are an object");
            map.insert("weights".into(), Value::Array(weights));
            map.insert(
                "units".into(),
                json!({
                    "weights": "probability per letter",
                    "report.q.value": "dimensionless",
                    "report.entropy.estimate.value": "bits per step",
                }),
            );
            Ok((outputs, 0))
        }
        Job::Compare {
            p,
            systems,
            policy,
            budgets,
        } => {
            let ranking = compare_systems(p, &systems, policy, &budgets)?;
            let outputs = json!({
                "ranking": val(&ranking.systems),
                "units": {
                    "volume.bits_per_step": "bits per step (system metric)",
                    "drift.value": "system-metric letters per step",
                    "entropy.value": "bits per step",
                    "q.value": "dimensionless",
                },
            });
            Ok((outputs, 0))
        }
        Job::Lln {
            p,
            measure,
            adjustment,
            params,
        } => {
            let report = lln_check(p, &measure, params)?;
            let outputs = json!({
                "lln": val(&report),
                "measure_adjustment": val(&adjustment),
                "units": {
                    "lln.fraction": "probability",
                    "lln.reference_drift": "word-length letters per step",
                },
            });
            Ok((outputs, 0))
        }
    }
}

/// Rebuilds a subcommand's CSV side file from its outputs object. Works
/// on cached outputs too, so `--csv` behaves identically on hits.
pub fn csv_for(command: &str, outputs: &Value) -> Option<String> {
    match command {
        "growth" => {
            let spheres = outputs.get("spheres")?.as_array()?;
            let balls = outputs.get("balls")?.as_array()?;
            let mut table = String::from("n,sphere,ball\n");
            for (n, (s, b)) in spheres.iter().zip(balls).enumerate() {
                table.push_str(&format!("{n},{s},{b}\n"));
            }
            Some(table)
        }
        "entropy" => {
            let rate = outputs.get("entropy")?;
            let entropies = rate.get("entropies")?.as_array()?;
            let cesaro = rate.get("cesaro")?.as_array()?;
            let increments = rate.get("increments")?.as_array()?;
            let corrected = rate.get("corrected")?.as_array()?;
            let mut table = String::from("n,entropy_bits,cesaro_bits,increment_bits,corrected_bits\n");
            for i in 0..entropies.len() {
                let fixed = if i == 0 {
                    String::new()
                } else {
                    corrected.get(i - 1)?.to_string()
                };
                table.push_str(&format!(
                    "{},{},{},{},{fixed}\n",
                    i + 1,
                    entropies[i],
                    cesaro[i],
                    increments[i]
                ));
            }
            Some(table)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prep(cmd: &Cmd) -> Prepared {
        prepare(cmd).expect("prepare should succeed")
    }

    #[test]
    fn growth_config_canonicalizes_the_presentation_spelling() {
        let a = prep(&Cmd::Growth {
            group: "free:2".into(),
            max_n: 8,
            cap: 1000,
            window: 4,
            csv: None,
        });
        let b = prep(&Cmd::Growth {
            group: "free:02".into(),
            max_n: 8,
            cap: 1000,
            window: 4,
            csv: None,
        });
        assert_eq!(a.config, b.config);
        assert_eq!(a.config["group"], json!("free:2"));
    }

    #[test]
    fn growth_reports_closed_form_volume_and_exact_counts() {
        let job = Job::Growth {
            p: "free:2".parse().unwrap(),
            max_n: 4,
            cap: 1_000_000,
            window: 4,
        };
        let (out, code) = execute(job).unwrap();
        assert_eq!(code, 0);
        assert_eq!(out["spheres"], json!([1, 4, 12, 36, 108]));
        assert_eq!(out["balls"], json!([1, 5, 17, 53, 161]));
        assert_eq!(out["truncated"], json!(false));
        let v = out["volume"]["bits_per_step"].as_f64().unwrap();
        assert!((v - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn truncated_growth_still_reports_complete_levels_with_code_3() {
        let job = Job::Growth {
            p: "lfgroup:3".parse().unwrap(),
            max_n: 8,
            cap: 5,
            window: 4,
        };
        let (out, code) = execute(job).unwrap();
        assert_eq!(code, 3);
        assert_eq!(out["truncated"], json!(true));
        assert_eq!(out["spheres"], json!([1]));
        assert!(out["volume"].is_null());
    }

    #[test]
    fn semigroup_growth_carries_the_clique_polynomial_check() {
        let job = Job::Growth {
            p: "lfsemigroup:3".parse().unwrap(),
            max_n: 6,
            cap: 1_000_000,
            window: 4,
        };
        let (out, code) = execute(job).unwrap();
        assert_eq!(code, 0);
        assert_eq!(out["clique_check"]["agrees"], json!(true));
        assert_eq!(out["spheres"][0], json!(1));
        assert_eq!(out["spheres"][1], json!(3));
        assert_eq!(out["spheres"][2], json!(8));
    }

    #[test]
    fn growth_csv_matches_the_outputs_object() {
        let outputs = json!({
            "spheres": [1, 4, 12],
            "balls": [1, 5, 17],
        });
        let table = csv_for("growth", &outputs).unwrap();
        assert_eq!(table, "n,sphere,ball\n0,1,1\n1,4,5\n2,12,17\n");
    }

    #[test]
    fn entropy_csv_leaves_the_first_corrected_cell_blank() {
        let outputs = json!({
            "entropy": {
                "entropies": [2.0, 3.5],
                "cesaro": [2.0, 1.75],
                "increments": [2.0, 1.5],
                "corrected": [1.0],
            }
        });
        let table = csv_for("entropy", &outputs).unwrap();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].ends_with(','), "row for n=1 has no corrected value");
        assert!(lines[2].ends_with(",1.0"));
    }

    #[test]
    fn measure_echo_distinguishes_uniform_from_a_file() {
        let uniform = prep(&Cmd::Drift {
            group: "free:2".into(),
            measure: "uniform".into(),
            steps: 100,
            trials: 10,
            seed: 1,
        });
        assert_eq!(uniform.config["measure"], json!("uniform"));
        assert_eq!(uniform.config["seed"], json!(1));
    }

    #[test]
    fn lln_undefined_drift_surfaces_as_exit_code_4() {
        let job = Job::Lln {
            p: "abelian:1".parse().unwrap(),
            measure: SymmetricMeasure::uniform("abelian:1".parse().unwrap()),
            adjustment: None,
            params: LlnParams {
                steps: 64,
                epsilon: 0.2,
                reference: None,
                trials: 200,
                element_budget: 100_000,
                master_seed: 42,
            },
        };
        let err = execute(job).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
