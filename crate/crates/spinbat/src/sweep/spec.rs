//! Declarative sweep descriptions and their validation.

use std::f64::consts::{FRAC_PI_4, PI};
use std::path::PathBuf;

use crate::channels::NoiseKind;
use crate::sweep::table::OutputFormat;
use crate::sweep::SweepError;

/// Guard on the total number of grid points in one run.
pub const MAX_GRID_POINTS: usize = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    SingleQubitNoise,
    TwoQubitNoiseless,
    TwoQubitNoise,
    RegionMap,
    AsymptoticMap,
    DiagonalDistribution,
    Verify,
}

/// One sweep axis: a fixed value, an inclusive-endpoint grid, or an explicit
/// list.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisSpec {
    Fixed(f64),
    Grid { start: f64, stop: f64, count: usize },
    List(Vec<f64>),
}

impl AxisSpec {
    /// Parse the flag syntax: `start:stop:count`, `v1,v2,...`, or a single
    /// number.
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("grid '{text}' must be start:stop:count"));
            }
            let start: f64 = parts[0]
                .trim()
                .parse()
                .map_err(|e| format!("bad start: {e}"))?;
            let stop: f64 = parts[1]
                .trim()
                .parse()
                .map_err(|e| format!("bad stop: {e}"))?;
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|e| format!("bad count: {e}"))?;
            Ok(AxisSpec::Grid { start, stop, count })
        } else if text.contains(',') {
            let values: Result<Vec<f64>, _> =
                text.split(',').map(|v| v.trim().parse::<f64>()).collect();
            Ok(AxisSpec::List(
                values.map_err(|e| format!("bad list entry: {e}"))?,
            ))
        } else {
            Ok(AxisSpec::Fixed(
                text.parse().map_err(|e| format!("bad number: {e}"))?,
            ))
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AxisSpec::Fixed(_) => 1,
            AxisSpec::Grid { count, .. } => *count,
            AxisSpec::List(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Materialize the axis. Grids include both endpoints; the last point is
    /// exactly `stop`.
    pub fn values(&self) -> Vec<f64> {
        match self {
            AxisSpec::Fixed(v) => vec![*v],
            AxisSpec::List(v) => v.clone(),
            AxisSpec::Grid { start, stop, count } => {
                if *count == 1 {
                    return vec![*start];
                }
                let step = (stop - start) / (*count as f64 - 1.0);
                (0..*count)
                    .map(|i| {
                        if i == count - 1 {
                            *stop
                        } else {
                            start + step * i as f64
                        }
                    })
                    .collect()
            }
        }
    }

    /// The single value of a non-swept axis, if it is one.
    pub fn fixed(&self) -> Option<f64> {
        match self {
            AxisSpec::Fixed(v) => Some(*v),
            AxisSpec::List(v) if v.len() == 1 => Some(v[0]),
            AxisSpec::Grid {
                start, count: 1, ..
            } => Some(*start),
            _ => None,
        }
    }

    fn validate(&self, field: &'static str) -> Result<(), SweepError> {
        let bad = |reason: String| SweepError::InvalidSpec {
            field: field.to_string(),
            reason,
        };
        match self {
            AxisSpec::Fixed(v) => {
                if !v.is_finite() {
                    return Err(bad(format!("{v} is not finite")));
                }
            }
            AxisSpec::List(v) => {
                if v.is_empty() {
                    return Err(bad("list must not be empty".into()));
                }
                if let Some(x) = v.iter().find(|x| !x.is_finite()) {
                    return Err(bad(format!("{x} is not finite")));
                }
            }
            AxisSpec::Grid { start, stop, count } => {
                if !start.is_finite() || !stop.is_finite() {
                    return Err(bad("grid endpoints must be finite".into()));
                }
                if *count < 1 {
                    return Err(bad("grid count must be at least 1".into()));
                }
                if start > stop {
                    return Err(bad(format!("start {start} exceeds stop {stop}")));
                }
            }
        }
        Ok(())
    }

    fn require_fixed(&self, field: &'static str) -> Result<f64, SweepError> {
        self.fixed().ok_or_else(|| SweepError::InvalidSpec {
            field: field.to_string(),
            reason: "this experiment needs a fixed value here, not a sweep".into(),
        })
    }
}

/// Model parameters, each either fixed or swept.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    pub omega_t: AxisSpec,
    pub j: AxisSpec,
    pub jz: AxisSpec,
    pub gamma: AxisSpec,
    pub d: AxisSpec,
    pub omega: AxisSpec,
    pub t: AxisSpec,
}

impl Default for ParamSet {
    fn default() -> Self {
        Self {
            // 401 points over one full period so the peak phase π/2 sits
            // exactly on the grid.
            omega_t: AxisSpec::Grid {
                start: 0.0,
                stop: 2.0 * PI,
                count: 401,
            },
            j: AxisSpec::Fixed(0.1),
            jz: AxisSpec::Fixed(0.5),
            gamma: AxisSpec::Fixed(0.2),
            d: AxisSpec::List(vec![0.3, 1.2, 2.5]),
            omega: AxisSpec::Fixed(1.0),
            t: AxisSpec::Grid {
                start: 0.0,
                stop: 2.0 * PI,
                count: 401,
            },
        }
    }
}

impl ParamSet {
    /// Defaults for the (Jz, D) asymptotic map.
    pub fn map_defaults() -> Self {
        Self {
            jz: AxisSpec::Grid {
                start: 0.0,
                stop: 3.0,
                count: 200,
            },
            d: AxisSpec::Grid {
                start: 0.0,
                stop: 3.0,
                count: 200,
            },
            t: AxisSpec::Fixed(FRAC_PI_4),
            ..Self::default()
        }
    }

    /// Defaults for the region/energy-gap scan.
    pub fn regions_defaults() -> Self {
        Self {
            d: AxisSpec::Grid {
                start: 0.0,
                stop: 3.0,
                count: 600,
            },
            ..Self::default()
        }
    }

    /// Defaults for the diagonal-population trajectory.
    pub fn diag_defaults() -> Self {
        Self {
            d: AxisSpec::Fixed(2.5),
            t: AxisSpec::Fixed(FRAC_PI_4),
            ..Self::default()
        }
    }
}

/// Noise protocol for a sweep; `n` may hold several application counts.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub p: f64,
    pub n: Vec<usize>,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            kind: NoiseKind::PhaseFlip,
            p: 0.1,
            n: vec![0, 1, 10, 50],
        }
    }
}

/// A full sweep description: experiment, parameters, noise, and output.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub experiment: Experiment,
    pub params: ParamSet,
    pub noise: Option<NoiseSpec>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    /// For the asymptotic map: cross-check every k-th grid point against
    /// N = 500 brute-force channel iteration.
    pub brute_every: Option<usize>,
    /// Randomized draws per verification suite.
    pub draws: usize,
    /// Seed for the verification suites.
    pub seed: u64,
}

impl SweepSpec {
    pub fn new(experiment: Experiment) -> Self {
        let params = match experiment {
            Experiment::AsymptoticMap => ParamSet::map_defaults(),
            Experiment::RegionMap => ParamSet::regions_defaults(),
            Experiment::DiagonalDistribution => ParamSet::diag_defaults(),
            _ => ParamSet::default(),
        };
        Self {
            experiment,
            params,
            noise: None,
            format: OutputFormat::Csv,
            out: None,
            workers: None,
            brute_every: None,
            draws: 500,
            seed: 42,
        }
    }

    fn noise_required(&self, field: &'static str) -> Result<&NoiseSpec, SweepError> {
        self.noise.as_ref().ok_or_else(|| SweepError::InvalidSpec {
            field: field.to_string(),
            reason: "this experiment needs a noise protocol".into(),
        })
    }

    /// Total number of grid points the experiment will evaluate.
    pub fn grid_points(&self) -> usize {
        let n_len = self.noise.as_ref().map_or(1, |n| n.n.len().max(1));
        match self.experiment {
            Experiment::SingleQubitNoise => n_len.saturating_mul(self.params.omega_t.len()),
            Experiment::TwoQubitNoiseless => {
                self.params.d.len().saturating_mul(self.params.t.len())
            }
            Experiment::TwoQubitNoise => self
                .params
                .d
                .len()
                .saturating_mul(n_len)
                .saturating_mul(self.params.t.len()),
            Experiment::RegionMap => self.params.d.len(),
            Experiment::AsymptoticMap => self.params.jz.len().saturating_mul(self.params.d.len()),
            Experiment::DiagonalDistribution => {
                self.noise
                    .as_ref()
                    .and_then(|n| n.n.first().copied())
                    .unwrap_or(0)
                    + 1
            }
            Experiment::Verify => 0,
        }
    }

    /// Validate field domains and per-experiment shape requirements; error
    /// messages carry the offending field path.
    pub fn validate(&self) -> Result<(), SweepError> {
        let p = &self.params;
        p.omega_t.validate("params.omega_t")?;
        p.j.validate("params.j")?;
        p.jz.validate("params.jz")?;
        p.gamma.validate("params.gamma")?;
        p.d.validate("params.d")?;
        p.omega.validate("params.omega")?;
        p.t.validate("params.t")?;
        if let Some(noise) = &self.noise {
            if !noise.p.is_finite() || !(0.0..=1.0).contains(&noise.p) {
                return Err(SweepError::InvalidSpec {
                    field: "noise.p".into(),
                    reason: format!("probability {} is outside [0, 1]", noise.p),
                });
            }
            if noise.n.is_empty() {
                return Err(SweepError::InvalidSpec {
                    field: "noise.n".into(),
                    reason: "need at least one application count".into(),
                });
            }
        }
        if self.workers == Some(0) {
            return Err(SweepError::InvalidSpec {
                field: "workers".into(),
                reason: "worker count must be at least 1".into(),
            });
        }
        if self.brute_every == Some(0) {
            return Err(SweepError::InvalidSpec {
                field: "brute_every".into(),
                reason: "stride must be at least 1".into(),
            });
        }

        match self.experiment {
            Experiment::SingleQubitNoise => {
                self.noise_required("noise")?;
            }
            Experiment::TwoQubitNoiseless => {
                p.j.require_fixed("params.j")?;
                p.jz.require_fixed("params.jz")?;
                p.gamma.require_fixed("params.gamma")?;
                p.omega.require_fixed("params.omega")?;
            }
            Experiment::TwoQubitNoise => {
                p.j.require_fixed("params.j")?;
                p.jz.require_fixed("params.jz")?;
                p.gamma.require_fixed("params.gamma")?;
                p.omega.require_fixed("params.omega")?;
                self.noise_required("noise")?;
            }
            Experiment::RegionMap => {
                p.j.require_fixed("params.j")?;
                p.jz.require_fixed("params.jz")?;
                p.gamma.require_fixed("params.gamma")?;
            }
            Experiment::AsymptoticMap => {
                p.j.require_fixed("params.j")?;
                p.gamma.require_fixed("params.gamma")?;
                p.omega.require_fixed("params.omega")?;
                p.t.require_fixed("params.t")?;
                let noise = self.noise_required("noise")?;
                if noise.kind == NoiseKind::PhaseFlip {
                    return Err(SweepError::InvalidSpec {
                        field: "noise.kind".into(),
                        reason: "the asymptotic map supports ad or bf noise".into(),
                    });
                }
            }
            Experiment::DiagonalDistribution => {
                p.j.require_fixed("params.j")?;
                p.jz.require_fixed("params.jz")?;
                p.gamma.require_fixed("params.gamma")?;
                p.omega.require_fixed("params.omega")?;
                p.d.require_fixed("params.d")?;
                p.t.require_fixed("params.t")?;
                let noise = self.noise_required("noise")?;
                if noise.kind == NoiseKind::PhaseFlip {
                    return Err(SweepError::InvalidSpec {
                        field: "noise.kind".into(),
                        reason: "phase-flip leaves the diagonal fixed; use ad or bf".into(),
                    });
                }
                if noise.n.len() != 1 {
                    return Err(SweepError::InvalidSpec {
                        field: "noise.n".into(),
                        reason: "the trajectory needs exactly one step count".into(),
                    });
                }
            }
            Experiment::Verify => {
                if self.draws == 0 {
                    return Err(SweepError::InvalidSpec {
                        field: "draws".into(),
                        reason: "need at least one draw".into(),
                    });
                }
            }
        }

        let points = self.grid_points();
        if points > MAX_GRID_POINTS {
            return Err(SweepError::InvalidSpec {
                field: "params".into(),
                reason: format!("grid has {points} points, above the {MAX_GRID_POINTS} guard"),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parse_accepts_all_three_shapes() {
        assert_eq!(AxisSpec::parse("2.5").unwrap(), AxisSpec::Fixed(2.5));
        assert_eq!(
            AxisSpec::parse("0.3,1.2,2.5").unwrap(),
            AxisSpec::List(vec![0.3, 1.2, 2.5])
        );
        assert_eq!(
            AxisSpec::parse("0:3.25:100").unwrap(),
            AxisSpec::Grid {
                start: 0.0,
                stop: 3.25,
                count: 100
            }
        );
        assert!(AxisSpec::parse("1:2").is_err());
        assert!(AxisSpec::parse("abc").is_err());
    }

    #[test]
    fn grid_values_hit_both_endpoints() {
        let axis = AxisSpec::Grid {
            start: 0.0,
            stop: 3.0,
            count: 7,
        };
        let values = axis.values();
        assert_eq!(values.len(), 7);
        assert_eq!(values[0], 0.0);
        assert_eq!(values[6], 3.0);
        for w in values.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn validation_reports_field_paths() {
        let mut spec = SweepSpec::new(Experiment::RegionMap);
        spec.params.d = AxisSpec::Grid {
            start: 2.0,
            stop: 1.0,
            count: 5,
        };
        let err = spec.validate().unwrap_err();
        assert!(err.to_string().contains("params.d"), "{err}");
    }

    #[test]
    fn single_requires_noise() {
        let spec = SweepSpec::new(Experiment::SingleQubitNoise);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn grid_guard_rejects_oversized_sweeps() {
        let mut spec = SweepSpec::new(Experiment::AsymptoticMap);
        spec.noise = Some(NoiseSpec {
            kind: NoiseKind::AmplitudeDamping,
            p: 0.1,
            n: vec![500],
        });
        spec.params.jz = AxisSpec::Grid {
            start: 0.0,
            stop: 3.0,
            count: 20_000,
        };
        spec.params.d = AxisSpec::Grid {
            start: 0.0,
            stop: 3.0,
            count: 20_000,
        };
        let err = spec.validate().unwrap_err();
        assert!(err.to_string().contains("guard"), "{err}");
    }
}
