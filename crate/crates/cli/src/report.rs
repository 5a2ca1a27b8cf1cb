//! JSON report bodies. These mirror the library report types with plain
//! serializable structs so field order (and therefore output bytes) is fixed.

use serde::Serialize;
use vacuumgas::correction::{
    CorrectionBounds, DecayReport, DecayRow, PhasePlaneReport,
};
use vacuumgas::rates::{
    EnergyDecayReport, RateComparison, RateFit, Theorem2Report,
};

#[derive(Debug, Clone, Serialize)]
pub struct ParamsDto {
    pub gamma: f64,
    pub lambda: f64,
    pub mu: f64,
    pub delta: f64,
    pub alpha: f64,
    pub similarity_exponent: f64,
    pub global_existence_regime: bool,
    pub derivative_count_m: usize,
}

impl From<&vacuumgas::GasParameters> for ParamsDto {
    fn from(p: &vacuumgas::GasParameters) -> Self {
        ParamsDto {
            gamma: p.gamma(),
            lambda: p.lambda(),
            mu: p.mu(),
            delta: p.delta(),
            alpha: p.alpha(),
            similarity_exponent: p.similarity_exponent(),
            global_existence_regime: p.in_global_existence_regime(),
            derivative_count_m: p.derivative_count_m(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileDto {
    pub a: f64,
    pub b: f64,
    pub mass: f64,
    pub half_width: f64,
}

impl From<&vacuumgas::BarenblattProfile> for ProfileDto {
    fn from(p: &vacuumgas::BarenblattProfile) -> Self {
        ProfileDto {
            a: p.a,
            b: p.b,
            mass: p.mass,
            half_width: p.half_width,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RateFitDto {
    pub window_lo: f64,
    pub window_hi: f64,
    pub exponent: f64,
    pub log_intercept: f64,
    pub r_squared: f64,
    pub std_error: f64,
    pub samples_used: usize,
    pub samples_excluded: usize,
    pub log_factor: bool,
}

impl From<&RateFit> for RateFitDto {
    fn from(f: &RateFit) -> Self {
        RateFitDto {
            window_lo: f.t_lo,
            window_hi: f.t_hi,
            exponent: f.exponent,
            log_intercept: f.log_intercept,
            r_squared: f.r_squared,
            std_error: f.std_error,
            samples_used: f.samples_used,
            samples_excluded: f.samples_excluded,
            log_factor: f.log_factor,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RateRowDto {
    pub name: String,
    pub fit: RateFitDto,
    pub exponent_theory: f64,
    pub exponent_theory_delta0: f64,
    pub deviation: f64,
    pub one_sided: bool,
}

impl From<&RateComparison> for RateRowDto {
    fn from(r: &RateComparison) -> Self {
        RateRowDto {
            name: r.name.clone(),
            fit: (&r.fit).into(),
            exponent_theory: r.exponent_theory,
            exponent_theory_delta0: r.exponent_theory_delta0,
            deviation: r.deviation,
            one_sided: r.one_sided,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedDto {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Dto {
    pub rows: Vec<RateRowDto>,
    pub skipped: Vec<SkippedDto>,
}

impl From<&Theorem2Report> for Theorem2Dto {
    fn from(r: &Theorem2Report) -> Self {
        Theorem2Dto {
            rows: r.rows.iter().map(Into::into).collect(),
            skipped: r
                .skipped
                .iter()
                .map(|s| SkippedDto {
                    name: s.name.clone(),
                    reason: s.reason.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundednessDto {
    pub name: String,
    pub ratio_sup: f64,
    pub final_decade_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyDecayDto {
    pub boundedness: Vec<BoundednessDto>,
    pub fits: Vec<RateRowDto>,
    pub skipped: Vec<SkippedDto>,
}

impl From<&EnergyDecayReport> for EnergyDecayDto {
    fn from(r: &EnergyDecayReport) -> Self {
        EnergyDecayDto {
            boundedness: r
                .boundedness
                .iter()
                .map(|b| BoundednessDto {
                    name: b.name.clone(),
                    ratio_sup: b.ratio_sup,
                    final_decade_drift: b.final_decade_drift,
                })
                .collect(),
            fits: r.fits.iter().map(Into::into).collect(),
            skipped: r
                .skipped
                .iter()
                .map(|s| SkippedDto {
                    name: s.name.clone(),
                    reason: s.reason.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhasePlaneDto {
    pub found: bool,
    pub reason: Option<String>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub z_max: Option<f64>,
    pub h_max: Option<f64>,
    pub z_min: Option<f64>,
    pub intervals_ok: Option<[bool; 4]>,
    pub h_end_over_h_max: Option<f64>,
}

impl PhasePlaneDto {
    pub fn found(r: &PhasePlaneReport) -> Self {
        PhasePlaneDto {
            found: true,
            reason: None,
            t0: Some(r.t0),
            t1: Some(r.t1),
            t2: Some(r.t2),
            z_max: Some(r.z_max),
            h_max: Some(r.h_max),
            z_min: Some(r.z_min),
            intervals_ok: Some(r.intervals_ok),
            h_end_over_h_max: Some(r.h_end_over_h_max),
        }
    }

    pub fn not_found(reason: String) -> Self {
        PhasePlaneDto {
            found: false,
            reason: Some(reason),
            t0: None,
            t1: None,
            t2: None,
            z_max: None,
            h_max: None,
            z_min: None,
            intervals_ok: None,
            h_end_over_h_max: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecadeEnvelopeDto {
    pub t_lo: f64,
    pub t_hi: f64,
    pub sup: f64,
    pub inf: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayRowDto {
    pub k: usize,
    pub branch: String,
    pub exponent_theory: f64,
    pub log_factor: bool,
    pub boundary_case: bool,
    pub fit: RateFitDto,
    pub sup_ratio_last_two_decades: f64,
    pub inf_ratio_full_range: f64,
    pub decade_envelope_sups: Vec<DecadeEnvelopeDto>,
}

impl From<&DecayRow> for DecayRowDto {
    fn from(r: &DecayRow) -> Self {
        use vacuumgas::correction::DecayBranch;
        let (branch, boundary_case) = match r.branch {
            DecayBranch::Power { .. } => ("power".to_string(), false),
            DecayBranch::LogCorrected { boundary_case, .. } => {
                ("log_corrected".to_string(), boundary_case)
            }
        };
        DecayRowDto {
            k: r.k,
            branch,
            exponent_theory: r.branch.exponent(),
            log_factor: r.branch.is_log(),
            boundary_case,
            fit: (&r.fit).into(),
            sup_ratio_last_two_decades: r.sup_ratio_last_two_decades,
            inf_ratio_full_range: r.inf_ratio_full_range,
            decade_envelope_sups: r
                .decade_envelope_sups
                .iter()
                .map(|d| DecadeEnvelopeDto {
                    t_lo: d.t_lo,
                    t_hi: d.t_hi,
                    sup: d.sup,
                    inf: d.inf,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrectionBoundsDto {
    pub max_h: f64,
    pub min_h: f64,
    pub envelope_sup: f64,
    pub envelope_inf: f64,
}

impl From<&CorrectionBounds> for CorrectionBoundsDto {
    fn from(b: &CorrectionBounds) -> Self {
        CorrectionBoundsDto {
            max_h: b.max_h,
            min_h: b.min_h,
            envelope_sup: b.envelope_sup,
            envelope_inf: b.envelope_inf,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrectionReport {
    pub config_hash: String,
    pub params: ParamsDto,
    pub bounds: CorrectionBoundsDto,
    pub phase_plane: PhasePlaneDto,
    pub decay_rows: Vec<DecayRowDto>,
}

pub fn decay_rows(report: &DecayReport) -> Vec<DecayRowDto> {
    report.rows.iter().map(Into::into).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub config_hash: String,
    pub params: ParamsDto,
    pub profile: ProfileDto,
    pub outcome: String,
    pub degeneracy_time: Option<f64>,
    pub degeneracy_eta_x_min: Option<f64>,
    pub steps: u64,
    pub samples: usize,
    pub theorem2: Theorem2Dto,
    pub energy_decay: EnergyDecayDto,
    /// sup over samples of weighted_sup_total / desk_total.
    pub embedding_ratio_sup: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefineEntry {
    pub n: usize,
    /// max-norm difference to the next finer grid at shared nodes.
    pub diff_to_next: Option<f64>,
    /// observed order from this grid's triplet (needs two successors).
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefineReport {
    pub config_hash: String,
    pub t_probe: f64,
    pub entries: Vec<RefineEntry>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}
