//! generate -> analyze -> reconstruct / glue, then export.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::builtins::{self, lightcone_ring, lightcone_samples, FrontSample, Generator};
use crate::completion::{
    admissibility_check, glue, loop_cover_report, reconstruct_generator, Admissibility, AdmissibilityReport,
    CompletionError, CoverReport, Patch, RelTol, SampleId, RECON_TOL,
};
use crate::frontgen::{invariant_suite, InvariantResult, NullFront, Sigma};
use crate::geometry::{FrontKind, GeneratingFront};
use crate::lorentz::{lorentz_dot, LorentzVector};
use crate::singular::{self, FourVertexAudit, SingularLocus, Verdict};

use super::config::{JobConfig, Mode, DEFAULT_CURVE_GRID, DEFAULT_SURFACE_GRID};
use super::export;
use super::CliError;

pub const SCHEMA_VERSION: u32 = 1;
/// Light-cone sampling: dyadic half-width of the parameter grid.
const LIGHTCONE_HALF: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorInfo {
    pub name: String,
    pub kind: Option<FrontKind>,
    pub dim: usize,
    pub nodes: usize,
    pub sigma: Sigma,
    pub t_window: (f64, f64),
    pub t_count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counts {
    pub vertices: Option<usize>,
    pub non_cuspidal: usize,
    pub cuspidal_arcs: Option<usize>,
    pub locus_points: usize,
    pub undetermined: usize,
    pub unbounded_arcs: usize,
    pub constant_curvature: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonCuspidalPoint {
    pub param: Vec<f64>,
    pub t: f64,
    pub class: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Completeness {
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Reconstruction {
    pub samples: usize,
    pub rejected: usize,
    pub distinct_rulings: usize,
    /// `max |<F, F>|` over the samples (light cone only).
    pub max_null_violation: Option<f64>,
    /// Against the generator at the sampled parameters.
    pub max_position_error: Option<f64>,
    pub max_normal_error: Option<f64>,
    pub lift_embedded: bool,
    pub double_cover: bool,
    pub cover: Option<CoverReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairAdmissibility {
    pub patches: (usize, usize),
    #[serde(flatten)]
    pub report: AdmissibilityReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Gluing {
    pub patch_count: usize,
    pub class_count: Option<usize>,
    /// Distinct generator nodes among the inputs.
    pub deduplicated_samples: usize,
    pub hausdorff: bool,
    pub closed: Option<bool>,
    pub components: Option<usize>,
    pub lift_violation: Option<f64>,
    pub ruling_mismatch: Option<f64>,
    pub offending_pairs: Vec<(SampleId, SampleId)>,
    pub admissibility: Admissibility,
    pub pairs: Vec<PairAdmissibility>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub generator: GeneratorInfo,
    pub mode: Mode,
    pub seed: u64,
    pub counts: Option<Counts>,
    pub non_cuspidal_count: Option<usize>,
    pub non_cuspidal_points: Vec<NonCuspidalPoint>,
    pub embedded: Option<bool>,
    pub completeness: Option<Completeness>,
    pub four_vertex: Option<FourVertexAudit>,
    pub invariant_suite: Vec<InvariantResult>,
    pub reconstruction: Option<Reconstruction>,
    pub gluing: Option<Gluing>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

pub struct Outcome {
    pub report: Report,
    /// One line for stderr.
    pub summary: String,
    /// Report text when no report path was given.
    pub stdout: Option<String>,
}

fn computation<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Computation(e.to_string())
}

/// Builds the normal-form front of a built-in generator.
pub fn build_front(job: &JobConfig) -> Result<Option<NullFront>, CliError> {
    let generator = builtins::lookup(&job.generator, &job.params).ok_or_else(|| {
        if job.generator == "fourier" {
            CliError::Config("generator 'fourier' needs a [generator.fourier] table".into())
        } else {
            CliError::UnknownGenerator(job.generator.clone())
        }
    })?;
    let g = match generator {
        Generator::Curve { curve, domain, flip } => {
            let g = GeneratingFront::build_curve(curve, domain, job.grid.unwrap_or(DEFAULT_CURVE_GRID)).map_err(computation)?;
            if flip {
                g.flipped()
            } else {
                g
            }
        }
        Generator::Surface { map, domain, orientation } => {
            let n = job.grid.unwrap_or(DEFAULT_SURFACE_GRID);
            GeneratingFront::build_surface(map, domain, (n, n), orientation).map_err(computation)?
        }
        Generator::LightCone => return Ok(None),
    };
    NullFront::normal_form(Arc::new(g), job.sigma, job.t_window, job.t_count).map(Some).map_err(|e| match e {
        crate::frontgen::FrontError::EmptyWindow(a, b) => CliError::Window(a, b),
        e => computation(e),
    })
}

/// Runs the job. All computation happens before the first file is written.
pub fn execute(job: &JobConfig) -> Result<Outcome, CliError> {
    let front = build_front(job)?;
    if front.is_none() && (job.mesh.is_some() || job.locus.is_some() || job.slices.is_some()) {
        return Err(CliError::Config("the light cone is sample data: only --report applies".into()));
    }
    let (report, artifacts) = match &front {
        Some(front) => front_report(job, front)?,
        None => (lightcone_report(job)?, Vec::new()),
    };
    for (path, text) in &artifacts {
        export::write_file(path, text)?;
    }
    let json = report.to_json();
    let stdout = match &job.report {
        Some(path) => {
            export::write_file(path, &json)?;
            None
        }
        None => Some(json),
    };
    let summary = summary_line(&report);
    Ok(Outcome { report, summary, stdout })
}

fn summary_line(r: &Report) -> String {
    let mut parts = vec![format!("{}: {} nodes", r.generator.name, r.generator.nodes)];
    if let Some(c) = &r.counts {
        parts.push(format!("{} non-cuspidal", c.non_cuspidal));
    }
    if let Some(c) = &r.completeness {
        parts.push(format!("{:?}", c.verdict).to_lowercase());
    }
    if let Some(rec) = &r.reconstruction {
        parts.push(if rec.double_cover { "double cover".into() } else { format!("{} rulings", rec.distinct_rulings) });
    }
    if let Some(g) = &r.gluing {
        parts.push(match g.class_count {
            Some(c) => format!("{c} classes"),
            None => "non-Hausdorff".into(),
        });
    }
    let failed = r.invariant_suite.iter().filter(|i| !i.passed).count();
    if failed > 0 {
        parts.push(format!("{failed} invariant(s) violated"));
    }
    parts.join(", ")
}

type Artifacts = Vec<(std::path::PathBuf, String)>;

fn front_report(job: &JobConfig, front: &NullFront) -> Result<(Report, Artifacts), CliError> {
    let g = front.generator();
    let (a, b) = front.window();
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        generator: GeneratorInfo {
            name: job.generator.clone(),
            kind: Some(g.kind()),
            dim: g.dim(),
            nodes: g.len(),
            sigma: front.sigma(),
            t_window: front.window(),
            t_count: front.t_count(),
        },
        mode: job.mode,
        seed: job.seed,
        counts: None,
        non_cuspidal_count: None,
        non_cuspidal_points: Vec::new(),
        embedded: None,
        completeness: None,
        four_vertex: None,
        invariant_suite: invariant_suite(front, &[a, 0.5 * (a + b), b]),
        reconstruction: None,
        gluing: None,
    };
    let mut artifacts = Vec::new();

    let locus = if job.mode == Mode::Analyze || job.locus.is_some() {
        Some(singular::analyze(front).map_err(computation)?)
    } else {
        None
    };
    if job.mode == Mode::Analyze {
        let locus = locus.as_ref().expect("computed above");
        analysis(&mut report, front, locus)?;
    }
    match job.mode {
        Mode::Reconstruct => report.reconstruction = Some(front_reconstruction(job, front)?),
        Mode::Glue => report.gluing = Some(front_gluing(job, front)?),
        Mode::Generate | Mode::Analyze => {}
    }

    if let Some(path) = &job.mesh {
        artifacts.push((path.clone(), export::mesh_obj(front, job.raw_axes)?));
    }
    if let (Some(path), Some(locus)) = (&job.locus, &locus) {
        artifacts.push((path.clone(), export::locus_csv(locus, front)));
    }
    if let Some(path) = &job.slices {
        artifacts.push((path.clone(), export::slices_csv(front)));
    }
    Ok((report, artifacts))
}

fn analysis(report: &mut Report, front: &NullFront, locus: &SingularLocus) -> Result<(), CliError> {
    let g = front.generator();
    let curve = g.kind().is_curve();
    let non_cuspidal = locus.non_cuspidal_count();
    report.counts = Some(Counts {
        vertices: locus.vertices.as_ref().and_then(|v| v.count()),
        non_cuspidal,
        cuspidal_arcs: curve.then(|| locus.cuspidal_arcs(g.kind().is_closed())),
        locus_points: locus.points.len(),
        undetermined: locus.count("undetermined"),
        unbounded_arcs: locus.unbounded.len(),
        constant_curvature: locus.constant_curvature,
    });
    report.non_cuspidal_count = Some(non_cuspidal);
    report.non_cuspidal_points = locus
        .non_cuspidal()
        .map(|p| NonCuspidalPoint { param: p.param.clone(), t: p.t, class: p.class.label() })
        .collect();
    let c = singular::completeness_check(front).map_err(computation)?;
    report.completeness = Some(Completeness { verdict: c.verdict, reasons: c.reasons });
    if curve {
        let audit = singular::four_vertex_audit(front).map_err(computation)?;
        report.embedded = Some(audit.embedded);
        report.four_vertex = Some(audit);
    }
    Ok(())
}

/// Samples the front at random rulings and parameters, rebuilds `(g, nu)`
/// from the samples alone and compares with the generator.
fn front_reconstruction(job: &JobConfig, front: &NullFront) -> Result<Reconstruction, CliError> {
    let g = front.generator();
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    let (a, b) = front.window();
    let s = front.sigma().sign();
    let mut samples = Vec::with_capacity(job.samples);
    let mut expected = Vec::with_capacity(job.samples);
    for _ in 0..job.samples {
        let t = rng.random_range(a..=b);
        let i = rng.random_range(0..g.len());
        let mut param = g.node(i).param.clone();
        if g.kind().is_curve() && g.analytic().is_some() {
            param[0] += g.spacing() * rng.random_range(-0.5..0.5);
        }
        let (f, nu) = match g.evaluate(&param) {
            Some(fnu) => fnu,
            None => (g.node(i).position.clone(), g.node(i).normal.clone()),
        };
        let point = if g.analytic().is_some() { front.evaluate(t, &param).map_err(computation)? } else { front.point_at(t, i) };
        let signed: Vec<f64> = nu.iter().map(|n| s * n).collect();
        let mut xi = vec![1.0];
        xi.extend(&signed);
        samples.push(FrontSample { point, normal: LorentzVector::new(xi).map_err(computation)? });
        expected.push((f, signed));
    }
    let rec = reconstruct_generator(&samples, RECON_TOL);
    let mut pos_err: f64 = 0.0;
    let mut nu_err: f64 = 0.0;
    for (r, (f, nu)) in rec.recovered.iter().zip(&expected) {
        if let Some(r) = r {
            pos_err = r.g.iter().zip(f.iter()).fold(pos_err, |m, (x, y)| m.max((x - y).abs()));
            nu_err = r.nu.iter().zip(nu).fold(nu_err, |m, (x, y)| m.max((x - y).abs()));
        }
    }
    let lift = front.lift_embedding_check(crate::frontgen::LIFT_TOL);
    Ok(Reconstruction {
        samples: samples.len(),
        rejected: rec.rejected.len(),
        distinct_rulings: rec.classes.len(),
        max_null_violation: None,
        max_position_error: Some(pos_err),
        max_normal_error: Some(nu_err),
        lift_embedded: lift.injective,
        double_cover: false,
        cover: None,
    })
}

fn lightcone_report(job: &JobConfig) -> Result<Report, CliError> {
    let samples = lightcone_samples(LIGHTCONE_HALF);
    let rec = reconstruct_generator(&samples, RECON_TOL);
    let null = samples.iter().map(|s| lorentz_dot(s.point.coords(), s.point.coords()).abs()).fold(0.0, f64::max);
    let cover = loop_cover_report(&lightcone_ring(LIGHTCONE_HALF), RECON_TOL);
    let reconstruction = Reconstruction {
        samples: samples.len(),
        rejected: rec.rejected.len(),
        distinct_rulings: rec.classes.len(),
        max_null_violation: Some(null),
        max_position_error: None,
        max_normal_error: None,
        lift_embedded: cover.lift.injective,
        double_cover: cover.double_cover,
        cover: Some(cover),
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        generator: GeneratorInfo {
            name: job.generator.clone(),
            kind: None,
            dim: 2,
            nodes: samples.len(),
            sigma: Sigma::Plus,
            t_window: job.t_window,
            t_count: 0,
        },
        mode: Mode::Reconstruct,
        seed: job.seed,
        counts: None,
        non_cuspidal_count: None,
        non_cuspidal_points: Vec::new(),
        embedded: None,
        completeness: None,
        four_vertex: None,
        invariant_suite: Vec::new(),
        reconstruction: Some(reconstruction),
        gluing: None,
    })
}

/// Node ranges of `count` overlapping windows along a curve generator.
pub fn window_nodes(nodes: usize, closed: bool, count: usize) -> Vec<Vec<usize>> {
    let base = nodes / count;
    let overlap = (base / 4).max(crate::completion::NEIGHBOURS + 1);
    (0..count)
        .map(|k| {
            let lo = (k * base) as isize - overlap as isize;
            let hi = if k + 1 == count { nodes } else { (k + 1) * base } as isize + overlap as isize;
            if closed {
                (lo..hi).map(|i| i.rem_euclid(nodes as isize) as usize).collect()
            } else {
                (lo.max(0)..hi.min(nodes as isize)).map(|i| i as usize).collect()
            }
        })
        .collect()
}

fn front_gluing(job: &JobConfig, front: &NullFront) -> Result<Gluing, CliError> {
    let g = front.generator();
    if !g.kind().is_curve() {
        return Err(CliError::Computation("gluing is implemented for curve generators".into()));
    }
    let closed = g.kind() == FrontKind::ClosedCurve;
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    let (a, b) = front.window();
    let windows = window_nodes(g.len(), closed, job.patches);
    let mut patches = Vec::with_capacity(windows.len());
    let mut covered = vec![false; g.len()];
    for w in &windows {
        let ts = [rng.random_range(a..=b), rng.random_range(a..=b)];
        patches.push(Patch::from_front(front, w, &ts).map_err(computation)?);
        for &i in w {
            covered[i] = true;
        }
    }
    let tol = RelTol { pos_tol: job.tolerances.pos_tol, nu_tol: job.tolerances.nu_tol, neighbours: job.tolerances.neighbours };
    let mut pairs = Vec::new();
    for i in 0..patches.len() {
        for j in i + 1..patches.len() {
            let report = admissibility_check(&patches[i], &patches[j], &tol, job.tolerances.transversality_angle);
            pairs.push(PairAdmissibility { patches: (i, j), report });
        }
    }
    let admissibility = if pairs.iter().any(|p| p.report.verdict == Admissibility::Inadmissible) {
        Admissibility::Inadmissible
    } else {
        Admissibility::Admissible
    };
    let deduplicated_samples = covered.iter().filter(|&&c| c).count();
    let patch_count = patches.len();
    Ok(match glue(patches, tol) {
        Ok(atlas) => Gluing {
            patch_count,
            class_count: Some(atlas.class_count()),
            deduplicated_samples,
            hausdorff: true,
            closed: Some(atlas.is_single_closed_curve()),
            components: Some(atlas.components.len()),
            lift_violation: Some(atlas.lift_violation),
            ruling_mismatch: Some(atlas.ruling_mismatch),
            offending_pairs: Vec::new(),
            admissibility,
            pairs,
        },
        Err(CompletionError::NonHausdorff { pairs: offending }) => Gluing {
            patch_count,
            class_count: None,
            deduplicated_samples,
            hausdorff: false,
            closed: None,
            components: None,
            lift_violation: None,
            ruling_mismatch: None,
            offending_pairs: offending,
            admissibility,
            pairs,
        },
        Err(e) => return Err(computation(e)),
    })
}
