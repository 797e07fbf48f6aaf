//! Subcommand implementations. Each reads its inputs through a [`Recorder`]
//! and writes one output, plus a manifest sidecar when the output is a file.

use anyhow::{bail, Context, Result};
use assouad_kit::closed_form::{
    affinity_dimension_of, carpet_dimensions, carpet_measure_dimensions, carpet_spectrum, kleinian_dimensions,
    lalley_gatzouras_family, percolation_theory, self_similar_measure_dimensions, sequence_dimensions,
    sequence_spectrum, similarity_dimension, spiral_report, spiral_spectrum, theta_grid, AffinityReport, DimKind,
    DimensionReport, SpectrumCurve, SpectrumKind,
};
use assouad_kit::estimators::{
    estimate_assouad_dimension, estimate_spectrum, fit_box_dimension, CenterPolicy, FitReport,
};
use assouad_kit::families::{generate_sequence, generate_spiral, SequenceSpec, SpiralSpec};
use assouad_kit::ifs::{attractor_by_depth, carpet_attractor, parse_system, presets, LoadedSystem, WeightedMeasureSpec};
use assouad_kit::io::{pointset_from_str, pointset_to_string};
use assouad_kit::percolation::{large_deviation_check, simulate, stats, tree_to_pointset, PercolationConfig};
use assouad_kit::PointSet64;
use serde::Serialize;

use crate::manifest::{emit, Recorder};
use crate::plot::{render, Bounds};
use crate::{
    verify as suites, CheckFailed, CurveFormat, DimensionArgs, Emit, EstimateArgs, Family, GenerateArgs,
    GenerateFamily, Kind, Method, PercolateArgs, PlotArgs, Preset, SpectrumArgs, SystemArgs, VerifyArgs,
};

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn load_system(args: &SystemArgs, rec: &mut Recorder) -> Result<LoadedSystem<f64>> {
    let base = match (&args.preset, &args.system) {
        (Some(p), _) => match p {
            Preset::Cantor => LoadedSystem::Ifs {
                ifs: presets::cantor(),
                measure: None,
            },
            Preset::TwoThreeCarpet => carpet_system(presets::two_three_carpet()),
            Preset::ThreeFiveCarpet => carpet_system(presets::three_five_carpet()),
            Preset::TwoFourCarpet => carpet_system(presets::two_four_carpet()),
        },
        (None, Some(path)) => {
            let text = rec.read_input(path)?;
            parse_system(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, None) => bail!("give --preset or --system"),
    };
    let Some(w) = &args.weights else {
        return Ok(base);
    };
    Ok(match base {
        LoadedSystem::Carpet { spec, .. } => LoadedSystem::Carpet {
            measure: Some(WeightedMeasureSpec::carpet(spec.clone(), w.clone())?),
            spec,
        },
        LoadedSystem::Ifs { ifs, .. } => LoadedSystem::Ifs {
            measure: Some(WeightedMeasureSpec::ifs(ifs.clone(), w.clone())?),
            ifs,
        },
    })
}

fn carpet_system(spec: assouad_kit::ifs::CarpetSpec) -> LoadedSystem<f64> {
    LoadedSystem::Carpet { spec, measure: None }
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    let mut rec = Recorder::start();
    let set: PointSet64 = match a.family {
        GenerateFamily::Attractor => match load_system(&a.system, &mut rec)? {
            LoadedSystem::Carpet { spec, .. } => carpet_attractor(&spec, a.depth)?,
            LoadedSystem::Ifs { ifs, .. } => attractor_by_depth(&ifs, a.depth)?,
        },
        GenerateFamily::ChaosGame => {
            let system = load_system(&a.system, &mut rec)?;
            let measure = system
                .measure()
                .context("the chaos game needs weights (--weights or a document with weights)")?;
            rec.seed(a.seed);
            measure.chaos_game(a.points, a.seed)?
        }
        GenerateFamily::Sequence => {
            let spec = match a.geometric {
                Some(c) => SequenceSpec::geometric(c, a.n_max),
                None => SequenceSpec::polynomial(a.p, a.n_max),
            };
            generate_sequence(&spec)?
        }
        GenerateFamily::Spiral => generate_spiral(&SpiralSpec::with_turns(a.p, a.turns, a.samples_per_turn))?,
    };
    emit(a.output.as_deref(), &pointset_to_string(&set), rec)
}

#[derive(Serialize)]
struct DimensionOutput {
    schema: &'static str,
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<DimensionReport<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measure: Option<DimensionReport<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    similarity_dimension: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    affinity: Option<AffinityReport<f64>>,
}

impl DimensionOutput {
    fn new(family: &str) -> Self {
        Self {
            schema: "assouad-kit dimension v1",
            family: family.to_string(),
            report: None,
            measure: None,
            similarity_dimension: None,
            affinity: None,
        }
    }
}

fn system_dimensions(system: &LoadedSystem<f64>, separated: bool, levels: usize) -> Result<DimensionOutput> {
    match system {
        LoadedSystem::Carpet { spec, measure } => {
            let mut out = DimensionOutput::new("carpet");
            out.report = Some(carpet_dimensions(spec));
            out.measure = measure.as_ref().map(|mu| carpet_measure_dimensions(mu, separated)).transpose()?;
            Ok(out)
        }
        LoadedSystem::Ifs { ifs, measure } => {
            let mut out = DimensionOutput::new("ifs");
            match ifs.similarity_ratios() {
                Some(ratios) => {
                    let s = similarity_dimension(&ratios)?;
                    out.similarity_dimension = Some(s);
                    if separated {
                        let mut r = DimensionReport::default();
                        for kind in DimKind::ALL {
                            r.set(kind, s, "self-similar set with separation: all dimensions coincide");
                        }
                        out.report = Some(r);
                    }
                    out.measure = measure
                        .as_ref()
                        .map(|mu| self_similar_measure_dimensions(&ratios, mu.weights(), separated))
                        .transpose()?;
                }
                None => {
                    out.affinity = Some(affinity_dimension_of(ifs, levels)?);
                    if measure.is_some() {
                        bail!("closed-form measure dimensions need a carpet or a similarity system");
                    }
                }
            }
            Ok(out)
        }
    }
}

fn family_dimensions(family: &Family, rec: &mut Recorder) -> Result<DimensionOutput> {
    Ok(match family {
        Family::System {
            system,
            separated,
            levels,
        } => system_dimensions(&load_system(system, rec)?, *separated, *levels)?,
        Family::Sequence { p } => {
            let mut out = DimensionOutput::new("sequence");
            out.report = Some(sequence_dimensions(*p)?);
            out
        }
        Family::Spiral { p } => {
            let mut out = DimensionOutput::new("spiral");
            out.report = Some(spiral_report(*p)?);
            out
        }
        Family::Percolation { d, m, p } => {
            let mut out = DimensionOutput::new("percolation");
            out.report = Some(percolation_theory(*d, *m, *p)?);
            out
        }
        Family::LalleyGatzouras { lambda } => {
            let mut out = DimensionOutput::new("lalley-gatzouras");
            out.report = Some(lalley_gatzouras_family(*lambda)?.report);
            out
        }
        Family::Kleinian {
            delta,
            k_min,
            k_max,
            d,
            no_parabolic,
        } => {
            let k = kleinian_dimensions(*delta, *k_min, *k_max, *d, !no_parabolic)?;
            let mut out = DimensionOutput::new("kleinian");
            out.report = Some(k.limit_set);
            out.measure = Some(k.measure);
            out
        }
    })
}

pub fn dimension(a: DimensionArgs) -> Result<()> {
    let mut rec = Recorder::start();
    let out = family_dimensions(&a.family, &mut rec)?;
    emit(a.output.as_deref(), &json(&out)?, rec)
}

fn spectrum_curve(family: &Family, kind: Kind, grid: usize, rec: &mut Recorder) -> Result<SpectrumCurve<f64>> {
    let theta = theta_grid::<f64>(grid);
    let sk = match kind {
        Kind::Assouad => SpectrumKind::Assouad,
        Kind::Lower => SpectrumKind::Lower,
    };
    let pick = |(a, l): (f64, f64)| if matches!(kind, Kind::Assouad) { a } else { l };
    let assouad_only = || {
        if matches!(kind, Kind::Lower) {
            bail!("only the Assouad spectrum has a closed form for this family");
        }
        Ok(())
    };
    let curve = match family {
        Family::System { system, .. } => match load_system(system, rec)? {
            LoadedSystem::Carpet { spec, .. } => SpectrumCurve::sample(theta, sk, "carpet formula", |t| {
                carpet_spectrum(&spec, t).map(pick)
            })?,
            LoadedSystem::Ifs { .. } => bail!("closed-form spectra are available for carpets, not general IFSs"),
        },
        Family::Sequence { p } => {
            assouad_only()?;
            SpectrumCurve::sample(theta, sk, format!("sequence formula, p = {p}"), |t| sequence_spectrum(*p, t))?
        }
        Family::Spiral { p } => {
            assouad_only()?;
            SpectrumCurve::sample(theta, sk, format!("spiral formula, p = {p}"), |t| spiral_spectrum(*p, t))?
        }
        Family::LalleyGatzouras { lambda } => {
            let lg = lalley_gatzouras_family(*lambda)?;
            SpectrumCurve::sample(theta, sk, format!("lalley-gatzouras formula, λ = {lambda}"), |t| {
                lg.spectrum(t).map(pick)
            })?
        }
        Family::Percolation { d, m, p } => {
            assouad_only()?;
            let b = percolation_theory(*d, *m, *p)?.box_dim().context("percolation box dimension")?;
            SpectrumCurve::sample(theta, sk, "percolation: spectrum equals box dimension", |_| Ok(b))?
        }
        Family::Kleinian { .. } => bail!("no closed-form spectrum is implemented for Kleinian limit sets"),
    };
    Ok(curve)
}

pub fn spectrum(a: SpectrumArgs) -> Result<()> {
    let mut rec = Recorder::start();
    let curve = spectrum_curve(&a.family, a.kind, a.grid, &mut rec)?;
    let text = match a.format {
        CurveFormat::Csv => curve.to_csv(),
        CurveFormat::Json => json(&curve)?,
    };
    emit(a.output.as_deref(), &text, rec)
}

#[derive(Serialize)]
struct EstimateOutput<'a> {
    schema: &'static str,
    input: String,
    points: usize,
    report: &'a FitReport<f64>,
}

pub fn estimate(a: EstimateArgs) -> Result<()> {
    let mut rec = Recorder::start();
    let text = rec.read_input(&a.input)?;
    let set: PointSet64 = pointset_from_str(&text).with_context(|| format!("parsing {}", a.input.display()))?;
    let k_max = match a.k_max {
        Some(k) => k,
        None => set
            .finest_valid_exponent()
            .context("the sample resolution admits no dyadic scale")?,
    };
    let policy = if a.all_centers {
        CenterPolicy::All
    } else {
        rec.seed(a.seed);
        CenterPolicy::Hashed {
            max_centers: a.max_centers,
            seed: a.seed,
        }
    };
    let kind = match a.method {
        Method::LowerSpectrum => SpectrumKind::Lower,
        _ => SpectrumKind::Assouad,
    };
    if let Some(n) = a.curve {
        if !matches!(a.method, Method::Spectrum | Method::LowerSpectrum) {
            bail!("--curve needs --method spectrum or lower-spectrum");
        }
        let provenance = format!("estimated from {} (k = {}..{k_max})", set.label(), a.k_min);
        let curve = SpectrumCurve::sample(theta_grid(n), kind, provenance, |t| {
            estimate_spectrum(&set, t, a.k_min, k_max, &policy, kind).map(|r| r.estimate)
        })?;
        return emit(a.output.as_deref(), &curve.to_csv(), rec);
    }
    let report = match a.method {
        Method::Box => fit_box_dimension(&set, a.k_min, k_max)?,
        Method::Assouad => estimate_assouad_dimension(&set, a.ratio_floor, a.k_min, k_max, &policy)?,
        Method::Spectrum | Method::LowerSpectrum => estimate_spectrum(&set, a.theta, a.k_min, k_max, &policy, kind)?,
    };
    let out = EstimateOutput {
        schema: "assouad-kit estimate v1",
        input: a.input.display().to_string(),
        points: set.len(),
        report: &report,
    };
    emit(a.output.as_deref(), &json(&out)?, rec)
}

pub fn percolate(a: PercolateArgs) -> Result<()> {
    let mut rec = Recorder::start();
    let config = PercolationConfig::new(a.d, a.m, a.p, a.depth, a.seed)?;
    rec.seed(a.seed);
    let text = match a.emit {
        Emit::Pointset => pointset_to_string(&tree_to_pointset::<f64>(&simulate(&config)?)?),
        Emit::Stats => json(&stats(&simulate(&config)?))?,
        Emit::Deviation => json(&large_deviation_check(&config, a.runs, a.epsilon)?)?,
    };
    emit(a.output.as_deref(), &text, rec)
}

pub fn verify(a: VerifyArgs) -> Result<()> {
    let rec = Recorder::start();
    let names = suites::resolve(&a.suite)?;
    let report = suites::run(&names)?;
    let text = if a.json { json(&report)? } else { suites::render_text(&report) };
    emit(a.output.as_deref(), &text, rec)?;
    if report.failed > 0 {
        return Err(CheckFailed(report.failed).into());
    }
    Ok(())
}

pub fn plot(a: PlotArgs) -> Result<()> {
    let mut rec = Recorder::start();
    let curves = a
        .curves
        .iter()
        .map(|path| {
            let text = rec.read_input(path)?;
            SpectrumCurve::from_csv(&text).with_context(|| format!("parsing {}", path.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    let bounds = a.bounds.as_deref().map(Bounds::parse).transpose()?;
    let svg = render(&curves, bounds, a.d)?;
    emit(a.output.as_deref(), &svg, rec)
}
