use std::f64::consts::{E, PI};
use std::path::{Path, PathBuf};

use free_entropy::asymptotics::{gamma_ratio_limit_series, normalized_log_ball_volume, selberg_mc_check};
use free_entropy::entropy::{
    chi_constant, free_dimension, free_family_bounds, h1_identity, h1_shift, hausdorff_entropy_bounds,
};
use free_entropy::ext_real::to_json as ext;
use free_entropy::microstates::{
    build_a, build_b, offdiag_sum_series, packing_constant_log, packing_constant_series, pair_partition,
    regularized_product_series, sk_counting_check, volume_upper_bound_log, SeriesReport, K_CAP,
};
use free_entropy::spec_file::{parse_spec, MeasureSpec};
use free_entropy::{offdiag_energy, regularized_energy, EnergyOptions, SpectralMeasure};
use serde_json::{json, Value};

use crate::args::{Command, EnergyKnobs, Format, MicrostateArg, SeriesArg};
use crate::failure::Failure;

/// Energies swept by `report`.
pub const REPORT_EPS: [f64; 3] = [1.0, 0.1, 0.01];

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

pub struct Output {
    pub command: &'static str,
    pub inputs: Value,
    pub outputs: Value,
    pub provenance: Value,
    pub table: Option<Table>,
    /// A failure that still lets the document be written first.
    pub deferred: Option<Failure>,
}

impl Output {
    fn new(command: &'static str, inputs: Value, outputs: Value, provenance: Value) -> Self {
        Output { command, inputs, outputs, provenance, table: None, deferred: None }
    }
}

struct Loaded {
    path: PathBuf,
    spec: MeasureSpec,
    measure: SpectralMeasure,
}

impl Loaded {
    fn echo(&self) -> Value {
        json!({"path": self.path.display().to_string(), "spec": self.spec})
    }
}

fn read_spec(path: &Path) -> Result<MeasureSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    Ok(parse_spec(&text)?)
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let spec = read_spec(path)?;
    let measure = spec.to_measure()?.checked()?;
    Ok(Loaded { path: path.to_path_buf(), spec, measure })
}

fn options(knobs: &EnergyKnobs) -> Result<EnergyOptions, Failure> {
    if !(knobs.tol > 0.0) || !knobs.tol.is_finite() {
        return Err(Failure::usage(format!("--tol must be positive, got {}", knobs.tol)));
    }
    if knobs.floor.is_nan() {
        return Err(Failure::usage("--floor must be a number"));
    }
    Ok(EnergyOptions { tol: knobs.tol, divergence_floor: knobs.floor })
}

fn knob_echo(knobs: &EnergyKnobs) -> Value {
    json!({"tol": knobs.tol, "floor": knobs.floor})
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Some(e)) = (base.as_object_mut(), extra.as_object()) {
        for (k, v) in e {
            b.insert(k.clone(), v.clone());
        }
    }
    base
}

fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::usage(format!("--{name} must be positive, got {x}")))
    }
}

const ENERGY_FORMULA: &str = "E = ∫∫_{R²-D} log|s-t| dμ(s) dμ(t)";
const DIM_FORMULA: &str = "alpha = 1 - Σ c_i²";
const CHI_FORMULA: &str = "chi = E + 3/4 + 1/2 log(2π)";
const H1_FORMULA: &str = "H1 = chi + 1/2 log(2/(πe))";
const UPPER_FORMULA: &str = "upper = E + log 16 + 1/4";
const LOWER_FORMULA: &str = "lower = E - alpha log 2 - 1/2 log(288e) + 3/4";

/// Rejects format/command combinations before anything is computed.
pub fn check_format(command: &Command, format: Format) -> Result<(), Failure> {
    let tabular = matches!(command, Command::Series { .. } | Command::Microstate { .. });
    if format == Format::Csv && !tabular {
        return Err(Failure::usage("--format csv is only available for series and microstate"));
    }
    Ok(())
}

pub fn run(command: &Command) -> Result<Output, Failure> {
    match command {
        Command::Validate { measure } => validate(measure),
        Command::Energy { measure, knobs } => energy(measure, knobs),
        Command::Chi { measure, knobs } => chi_cmd(measure, knobs),
        Command::Dim { measure } => dim(measure),
        Command::Bounds { measure, knobs } => bounds(measure, knobs),
        Command::FamilyBounds { measures, knobs } => family(measures, knobs),
        Command::Microstate { kind, measure, k, eps, t } => microstate(*kind, measure, *k, *eps, *t),
        Command::Series { which, ks, measure, eps, tol, floor } => {
            series(*which, ks, measure.as_deref(), *eps, *tol, *floor)
        }
        Command::Selberg { k, eps, samples, seed } => selberg(*k, *eps, *samples, *seed),
        Command::Report { measures, knobs } => report(measures, knobs),
    }
}

fn validate(path: &Path) -> Result<Output, Failure> {
    let spec = read_spec(path)?;
    let measure = spec.to_measure()?;
    let report = measure.validate();
    let inputs = json!({"measures": [{"path": path.display().to_string(), "spec": spec}]});
    let mut out = Output::new(
        "validate",
        inputs,
        json!({"valid": report.is_valid(), "violations": report.violations, "mass_defect": report.mass_defect, "tail_mass": report.tail_mass}),
        json!({"mass_defect": "Σ c_i + c + tail - 1"}),
    );
    if let Some(first) = report.violations.first() {
        out.deferred = Some(Failure::from(free_entropy::Error::InvalidMeasure(first.clone())));
    }
    Ok(out)
}

fn energy(path: &Path, knobs: &EnergyKnobs) -> Result<Output, Failure> {
    let opts = options(knobs)?;
    let l = load(path)?;
    let e = offdiag_energy(&l.measure, opts)?;
    let mut out = Output::new(
        "energy",
        merge(json!({"measures": [l.echo()]}), knob_echo(knobs)),
        json!({"energy": e}),
        json!({"energy": ENERGY_FORMULA}),
    );
    if !e.is_finite() {
        out.deferred = Some(Failure::divergent("energy"));
    }
    Ok(out)
}

fn chi_cmd(path: &Path, knobs: &EnergyKnobs) -> Result<Output, Failure> {
    let opts = options(knobs)?;
    let l = load(path)?;
    let inputs = merge(json!({"measures": [l.echo()]}), knob_echo(knobs));
    let provenance = json!({"chi": CHI_FORMULA, "energy": ENERGY_FORMULA});
    if l.measure.has_atoms() {
        let outputs = json!({"chi": ext(f64::NEG_INFINITY), "reason": "atoms put mass on the diagonal"});
        return Ok(Output::new("chi", inputs, outputs, provenance));
    }
    let e = offdiag_energy(&l.measure, opts)?;
    let chi = e.value + chi_constant();
    let mut out = Output::new("chi", inputs, json!({"chi": ext(chi), "energy": e}), provenance);
    if !e.is_finite() {
        out.deferred = Some(Failure::divergent("energy"));
    }
    Ok(out)
}

fn dim(path: &Path) -> Result<Output, Failure> {
    let l = load(path)?;
    let d = free_dimension(&l.measure);
    Ok(Output::new(
        "dim",
        json!({"measures": [l.echo()]}),
        json!({"alpha": d.alpha, "tail_bound": d.tail_bound}),
        json!({"alpha": DIM_FORMULA, "tail_bound": "(truncated tail mass)²"}),
    ))
}

fn bounds(path: &Path, knobs: &EnergyKnobs) -> Result<Output, Failure> {
    let opts = options(knobs)?;
    let l = load(path)?;
    let b = hausdorff_entropy_bounds(&l.measure, opts)?;
    let mut outputs = json!({"bounds": b});
    if !l.measure.has_atoms() && b.energy.is_finite() {
        let h1 = b.energy.value + chi_constant() + h1_shift();
        outputs["h1_identity"] = json!(h1);
        outputs["h1_within_bounds"] = json!(b.lower <= h1 && h1 <= b.upper);
    }
    let mut out = Output::new(
        "bounds",
        merge(json!({"measures": [l.echo()]}), knob_echo(knobs)),
        outputs,
        json!({"alpha": DIM_FORMULA, "energy": ENERGY_FORMULA, "upper": UPPER_FORMULA, "lower": LOWER_FORMULA, "h1_identity": H1_FORMULA}),
    );
    if !b.energy.is_finite() {
        out.deferred = Some(Failure::divergent("energy"));
    }
    Ok(out)
}

fn family_provenance() -> Value {
    json!({
        "beta": "beta = Σ alpha_i",
        "k1": "K1 = -(n/2) log(288e) + 3n/4 - beta log 2",
        "k2": "K2 = n log(16 sqrt(n)) + n/4",
        "lower": "Σ E_i + K1",
        "upper": "Σ E_i + K2",
    })
}

fn family(paths: &[PathBuf], knobs: &EnergyKnobs) -> Result<Output, Failure> {
    let opts = options(knobs)?;
    let loaded = paths.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    let measures: Vec<SpectralMeasure> = loaded.iter().map(|l| l.measure.clone()).collect();
    let f = free_family_bounds(&measures, opts)?;
    let divergent = f.energies.iter().any(|e| !e.is_finite());
    let mut out = Output::new(
        "family-bounds",
        merge(json!({"measures": loaded.iter().map(Loaded::echo).collect::<Vec<_>>()}), knob_echo(knobs)),
        json!({"family": f}),
        family_provenance(),
    );
    if divergent {
        out.deferred = Some(Failure::divergent("an energy of the family"));
    }
    Ok(out)
}

fn microstate(kind: MicrostateArg, path: &Path, k: usize, eps: Option<f64>, t: Option<f64>) -> Result<Output, Failure> {
    if k == 0 || k > K_CAP {
        return Err(Failure::usage(format!("--k must lie in [1, {K_CAP}], got {k}")));
    }
    let volume_knobs = match (kind, eps, t) {
        (_, None, None) => None,
        (MicrostateArg::A, Some(e), Some(t)) => Some((positive("eps", e)?, t)),
        (MicrostateArg::A, _, _) => return Err(Failure::usage("--eps and --t must be given together")),
        (MicrostateArg::B, _, _) => return Err(Failure::usage("--eps and --t apply to microstate a only")),
    };
    if let Some((_, t)) = volume_knobs {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Failure::usage(format!("--t must be non-negative, got {t}")));
        }
    }
    let l = load(path)?;
    let mut inputs = json!({"measures": [l.echo()], "k": k});
    let mut provenance = json!({"partition": "S_k = pairs i < j with equal eigenvalues, W_k = the rest"});
    let (m, mut outputs) = match kind {
        MicrostateArg::A => {
            let a = build_a(&l.measure, k)?;
            let p = pair_partition(&a);
            let mut outputs = json!({"microstate": a, "partition": p});
            if let Some((eps, t)) = volume_knobs {
                inputs["eps"] = json!(eps);
                inputs["t"] = json!(t);
                let v = volume_upper_bound_log(&a, eps, t)?;
                outputs["volume_bound"] = json!(v);
                provenance["volume_bound"] = json!(
                    "log of k^{k/2} eps^k Γ(k/2+1)^-1 (1+2a)^{k(k-1)/2} e^{2k² eps} π^{k²/2} 2^{k(k-1)/2} (Π j!)^-1 Π_{i<j}((a_i-a_j)² + eps), ((a+2a²)/(a+2))^{1/2} = t/eps + 1/4"
                );
            }
            (a, outputs)
        }
        MicrostateArg::B => {
            let b = build_b(&l.measure, k)?;
            let p = pair_partition(&b);
            let check = sk_counting_check(&l.measure, &b);
            let c = packing_constant_log(&l.measure, k)?;
            provenance["counting_check"] = json!("2 #S_k + k <= (1 - alpha) k²");
            provenance["packing_constant"] = json!(
                "log C_k = log D_k + Σ_{W_k} log(b_i-b_j)² - log k! + (2 #S_k + k - k²) log 2 + log Π Γ(j+1)Γ(j)²/Γ(k+j)"
            );
            (b.clone(), json!({"microstate": b, "partition": p, "counting_check": check, "packing_constant": c}))
        }
    };
    outputs["kind"] = json!(match kind {
        MicrostateArg::A => "A",
        MicrostateArg::B => "B",
    });
    let mut out = Output::new("microstate", inputs, outputs, provenance);
    out.table = Some(Table { header: vec!["eigenvalue"], rows: m.eigenvalues.iter().map(|&x| vec![x]).collect() });
    Ok(out)
}

fn series_table(ks: &[usize], values: &[f64], target: f64) -> Table {
    Table {
        header: vec!["k", "value", "target", "gap"],
        rows: ks.iter().zip(values).map(|(&k, &v)| vec![k as f64, v, target, v - target]).collect(),
    }
}

fn series(
    which: SeriesArg,
    ks: &[usize],
    measure: Option<&Path>,
    eps: Option<f64>,
    tol: Option<f64>,
    floor: Option<f64>,
) -> Result<Output, Failure> {
    let name = match which {
        SeriesArg::Gamma => "gamma",
        SeriesArg::Regularized => "regularized",
        SeriesArg::Offdiag => "offdiag",
        SeriesArg::Packing => "packing",
        SeriesArg::Ball => "ball",
    };
    let needs_measure = !matches!(which, SeriesArg::Gamma | SeriesArg::Ball);
    if needs_measure != measure.is_some() {
        return Err(Failure::usage(if needs_measure {
            format!("series {name} needs --measure")
        } else {
            format!("series {name} takes no --measure")
        }));
    }
    if (which == SeriesArg::Regularized) != eps.is_some() {
        return Err(Failure::usage(if eps.is_none() {
            "series regularized needs --eps".to_string()
        } else {
            format!("series {name} takes no --eps")
        }));
    }
    if !needs_measure && (tol.is_some() || floor.is_some()) {
        return Err(Failure::usage(format!("series {name} takes no --tol or --floor")));
    }
    if which == SeriesArg::Regularized && floor.is_some() {
        return Err(Failure::usage("series regularized takes no --floor"));
    }
    if ks.is_empty() || ks.windows(2).any(|w| w[0] >= w[1]) || ks[0] == 0 || *ks.last().unwrap() > K_CAP {
        return Err(Failure::usage(format!("--ks must be strictly increasing within [1, {K_CAP}]")));
    }
    let knobs = EnergyKnobs {
        tol: tol.unwrap_or(free_entropy::energy::DEFAULT_TOL),
        floor: floor.unwrap_or(free_entropy::energy::DEFAULT_DIVERGENCE_FLOOR),
    };
    let opts = options(&knobs)?;
    let eps = eps.map(|e| positive("eps", e)).transpose()?;

    let mut inputs = json!({"series": name, "ks": ks});
    let (outputs, provenance, table) = match which {
        SeriesArg::Gamma => {
            let s = gamma_ratio_limit_series(ks)?;
            let table = series_table(ks, &s.normalized_values, s.limit);
            (json!({"series": s}), json!({"value": "k^-2 log Π_{j<=k} Γ(j+1)Γ(j)²/Γ(k+j)", "target": "-log 4"}), table)
        }
        SeriesArg::Ball => {
            let values: Vec<f64> = ks.iter().map(|&k| normalized_log_ball_volume(k)).collect();
            let target = 0.5 * (2.0 * PI * E).ln();
            let table = series_table(ks, &values, target);
            let gaps: Vec<f64> = values.iter().map(|v| v - target).collect();
            (
                json!({"series": {"ks": ks, "values": values, "target": target, "gaps": gaps}}),
                json!({"value": "k^-2 [(k²/2) log(πk) - log Γ(k²/2 + 1)] + 1/2 log k", "target": "1/2 log(2πe)"}),
                table,
            )
        }
        _ => {
            let l = load(measure.expect("checked above"))?;
            inputs = merge(inputs, json!({"measures": [l.echo()], "tol": knobs.tol}));
            let (report, provenance): (SeriesReport, Value) = match which {
                SeriesArg::Regularized => {
                    let eps = eps.expect("checked above");
                    inputs["eps"] = json!(eps);
                    (
                        regularized_product_series(&l.measure, eps, ks, knobs.tol)?,
                        json!({"value": "k^-2 Σ_{i,j} log((a_i-a_j)² + eps) over A_k", "target": "∫∫ log(|y-z|² + eps) dμ dμ", "alternate": "k^-2 Σ_{i<j}, target half the integral"}),
                    )
                }
                SeriesArg::Offdiag => {
                    inputs["floor"] = json!(knobs.floor);
                    (
                        offdiag_sum_series(&l.measure, ks, opts)?,
                        json!({"value": "k^-2 Σ_{W_k} log(b_i-b_j)² over B_k", "target": "2E", "alternate": "E"}),
                    )
                }
                _ => {
                    inputs["floor"] = json!(knobs.floor);
                    (
                        packing_constant_series(&l.measure, ks, opts)?,
                        json!({"value": "k^-2 log C_k + 1/2 log k", "target": "1/2 log π + 3/4 - log 4 - alpha log 2 + E", "alternate": "target with 2E"}),
                    )
                }
            };
            let table = series_table(ks, &report.values, report.target);
            (json!({"series": report}), provenance, table)
        }
    };
    let mut out = Output::new("series", inputs, outputs, provenance);
    out.table = Some(table);
    Ok(out)
}

fn selberg(k: usize, eps: f64, samples: u64, seed: u64) -> Result<Output, Failure> {
    positive("eps", eps)?;
    if samples < 2 {
        return Err(Failure::usage("--samples must be at least 2"));
    }
    let r = selberg_mc_check(k, eps, samples, seed)?;
    Ok(Output::new(
        "selberg",
        json!({"k": k, "eps": eps, "samples": samples, "seed": seed}),
        json!({"selberg": r}),
        json!({
            "closed_form": "(2 eps)^{k²} Π_{j<=k} Γ(j+1)Γ(j)²/Γ(k+j)",
            "mc_estimate": "(2 eps)^k mean of Π_{i<j}(t_i-t_j)² over uniform points of [-eps, eps]^k",
            "z_score": "(mc_estimate - closed_form) / std_error",
        }),
    ))
}

fn report(paths: &[PathBuf], knobs: &EnergyKnobs) -> Result<Output, Failure> {
    let opts = options(knobs)?;
    let loaded = paths.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    let mut sections = Vec::new();
    let mut divergent = false;
    for l in &loaded {
        let m = &l.measure;
        let d = free_dimension(m);
        let b = hausdorff_entropy_bounds(m, opts)?;
        divergent |= !b.energy.is_finite();
        let chi = if m.has_atoms() { f64::NEG_INFINITY } else { b.energy.value + chi_constant() };
        let mut section = json!({
            "path": l.path.display().to_string(),
            "dimension": {"alpha": d.alpha, "tail_bound": d.tail_bound},
            "energy": b.energy,
            "chi": ext(chi),
            "bounds": {"lower": ext(b.lower), "upper": ext(b.upper)},
        });
        if !m.has_atoms() {
            let h1 = h1_identity(m, opts)?;
            section["h1_identity"] = ext(h1);
            if h1.is_finite() {
                section["h1_within_bounds"] = json!(b.lower <= h1 && h1 <= b.upper);
            }
        }
        let reg = REPORT_EPS
            .iter()
            .map(|&eps| Ok(json!({"eps": eps, "value": regularized_energy(m, eps, knobs.tol)?})))
            .collect::<Result<Vec<_>, Failure>>()?;
        section["regularized_energies"] = json!(reg);
        sections.push(section);
    }
    let mut outputs = json!({"measures": sections});
    let mut provenance = json!({
        "alpha": DIM_FORMULA,
        "energy": ENERGY_FORMULA,
        "chi": CHI_FORMULA,
        "h1_identity": H1_FORMULA,
        "upper": UPPER_FORMULA,
        "lower": LOWER_FORMULA,
        "regularized_energies": "∫∫ log(|y-z|² + eps) dμ dμ",
    });
    if loaded.len() >= 2 {
        let measures: Vec<SpectralMeasure> = loaded.iter().map(|l| l.measure.clone()).collect();
        outputs["family"] = json!(free_family_bounds(&measures, opts)?);
        provenance = merge(provenance, json!({"family": family_provenance()}));
    }
    let mut out = Output::new(
        "report",
        merge(json!({"measures": loaded.iter().map(Loaded::echo).collect::<Vec<_>>()}), knob_echo(knobs)),
        outputs,
        provenance,
    );
    if divergent {
        out.deferred = Some(Failure::divergent("an energy"));
    }
    Ok(out)
}
