//! Job configuration: a TOML file, overridden field by field from the command
//! line.

use std::path::PathBuf;

use serde::Deserialize;

use crate::builtins::{BuiltinParams, Fourier};
use crate::completion::{NEIGHBOURS, NU_TOL, TRANSVERSALITY_ANGLE};
use crate::frontgen::Sigma;

use super::CliError;

pub const MIN_GRID: usize = 16;
pub const DEFAULT_CURVE_GRID: usize = 512;
pub const DEFAULT_SURFACE_GRID: usize = 64;
pub const DEFAULT_T_COUNT: usize = 64;
pub const DEFAULT_WINDOW: (f64, f64) = (-1.0, 1.0);
pub const DEFAULT_PATCHES: usize = 3;
pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, serde::Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Generate,
    #[default]
    Analyze,
    Reconstruct,
    Glue,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub name: Option<String>,
    pub radius: Option<f64>,
    pub semi_axes: Option<(f64, f64)>,
    pub bump_amplitude: Option<f64>,
    pub bump_width: Option<f64>,
    pub inflection_amplitude: Option<f64>,
    pub fourier: Option<FourierSection>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierSection {
    #[serde(default)]
    pub x_cos: Vec<f64>,
    #[serde(default)]
    pub x_sin: Vec<f64>,
    #[serde(default)]
    pub y_cos: Vec<f64>,
    #[serde(default)]
    pub y_sin: Vec<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontSection {
    pub sigma: Option<String>,
    pub t_window: Option<(f64, f64)>,
    pub grid: Option<usize>,
    pub t_count: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub patches: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSection {
    pub pos_tol: Option<f64>,
    pub nu_tol: Option<f64>,
    pub neighbours: Option<usize>,
    pub transversality_angle: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub mesh: Option<PathBuf>,
    pub locus: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub slices: Option<PathBuf>,
    pub raw_axes: Option<bool>,
}

/// The file format. Every field is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub generator: GeneratorSection,
    #[serde(default)]
    pub front: FrontSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub tolerances: TolerancesSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub pos_tol: Option<f64>,
    pub nu_tol: f64,
    pub neighbours: usize,
    pub transversality_angle: f64,
}

/// A validated job.
#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub generator: String,
    pub params: BuiltinParams,
    pub sigma: Sigma,
    pub t_window: (f64, f64),
    /// Nodes per generator axis; `None` picks the per-kind default.
    pub grid: Option<usize>,
    pub t_count: usize,
    pub mode: Mode,
    pub seed: u64,
    pub samples: usize,
    pub patches: usize,
    pub tolerances: Tolerances,
    pub mesh: Option<PathBuf>,
    pub locus: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub slices: Option<PathBuf>,
    pub raw_axes: bool,
}

/// Command-line values that override the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub example: Option<String>,
    pub sigma: Option<String>,
    pub t_window: Option<String>,
    pub grid: Option<String>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub mesh: Option<PathBuf>,
    pub locus: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub slices: Option<PathBuf>,
    pub raw_axes: bool,
}

fn parse_pair<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| CliError::Config(format!("bad {what} '{s}'"))))
        .collect()
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

impl JobConfig {
    pub fn resolve(file: ConfigFile, cli: Overrides) -> Result<Self, CliError> {
        let generator = cli
            .example
            .or(file.generator.name.clone())
            .ok_or_else(|| CliError::Config("no generator: pass --example or set generator.name".into()))?;

        let defaults = BuiltinParams::default();
        let g = &file.generator;
        let params = BuiltinParams {
            radius: positive("radius", g.radius.unwrap_or(defaults.radius))?,
            semi_axes: g.semi_axes.unwrap_or(defaults.semi_axes),
            bump_amplitude: g.bump_amplitude.unwrap_or(defaults.bump_amplitude),
            bump_width: positive("bump_width", g.bump_width.unwrap_or(defaults.bump_width))?,
            inflection_amplitude: g.inflection_amplitude.unwrap_or(defaults.inflection_amplitude),
            fourier: g.fourier.clone().map(|f| Fourier { x_cos: f.x_cos, x_sin: f.x_sin, y_cos: f.y_cos, y_sin: f.y_sin }),
        };
        positive("semi-axis", params.semi_axes.0)?;
        positive("semi-axis", params.semi_axes.1)?;

        let sigma_text = cli.sigma.or(file.front.sigma).unwrap_or_else(|| "+".into());
        let sigma: Sigma = sigma_text.parse().map_err(|_| CliError::Config(format!("sigma must be + or -, got '{sigma_text}'")))?;

        let t_window = match cli.t_window {
            Some(s) => match parse_pair::<f64>(&s, "t-window")?.as_slice() {
                [a, b] => (*a, *b),
                _ => return Err(CliError::Config(format!("t-window needs two values, got '{s}'"))),
            },
            None => file.front.t_window.unwrap_or(DEFAULT_WINDOW),
        };
        if !(t_window.0.is_finite() && t_window.1.is_finite() && t_window.1 > t_window.0) {
            return Err(CliError::Window(t_window.0, t_window.1));
        }

        let (grid, t_count) = match cli.grid {
            Some(s) => match parse_pair::<usize>(&s, "grid")?.as_slice() {
                [n] => (Some(*n), file.front.t_count.unwrap_or(DEFAULT_T_COUNT)),
                [n, m] => (Some(*n), *m),
                _ => return Err(CliError::Config(format!("grid is N or N,M, got '{s}'"))),
            },
            None => (file.front.grid, file.front.t_count.unwrap_or(DEFAULT_T_COUNT)),
        };
        for (name, v) in [("grid", grid.unwrap_or(MIN_GRID)), ("t_count", t_count)] {
            if v < MIN_GRID {
                return Err(CliError::Config(format!("{name} must be at least {MIN_GRID}, got {v}")));
            }
        }

        let t = &file.tolerances;
        let tolerances = Tolerances {
            pos_tol: t.pos_tol.map(|v| positive("pos_tol", v)).transpose()?,
            nu_tol: positive("nu_tol", t.nu_tol.unwrap_or(NU_TOL))?,
            neighbours: t.neighbours.unwrap_or(NEIGHBOURS),
            transversality_angle: positive("transversality_angle", t.transversality_angle.unwrap_or(TRANSVERSALITY_ANGLE))?,
        };
        if tolerances.neighbours == 0 {
            return Err(CliError::Config("neighbours must be positive".into()));
        }

        let a = &file.analysis;
        let patches = a.patches.unwrap_or(DEFAULT_PATCHES);
        if patches == 0 {
            return Err(CliError::Config("patches must be positive".into()));
        }
        let o = file.output;
        Ok(Self {
            generator,
            params,
            sigma,
            t_window,
            grid,
            t_count,
            mode: cli.mode.or(a.mode).unwrap_or_default(),
            seed: cli.seed.or(a.seed).unwrap_or(0),
            samples: a.samples.unwrap_or(DEFAULT_SAMPLES),
            patches,
            tolerances,
            mesh: cli.mesh.or(o.mesh),
            locus: cli.locus.or(o.locus),
            report: cli.report.or(o.report),
            slices: cli.slices.or(o.slices),
            raw_axes: cli.raw_axes || o.raw_axes.unwrap_or(false),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example(name: &str) -> Overrides {
        Overrides { example: Some(name.into()), ..Default::default() }
    }

    #[test]
    fn defaults() {
        let job = JobConfig::resolve(ConfigFile::default(), example("ellipse")).unwrap();
        assert_eq!(job.t_window, DEFAULT_WINDOW);
        assert_eq!(job.t_count, DEFAULT_T_COUNT);
        assert_eq!(job.mode, Mode::Analyze);
        assert_eq!(job.sigma, Sigma::Plus);
    }

    #[test]
    fn cli_overrides_file() {
        let file = ConfigFile::parse(
            "[generator]\nname = \"circle\"\nradius = 2.0\n[front]\nt_window = [0.0, 3.0]\ngrid = 128\n[analysis]\nmode = \"glue\"\n",
        )
        .unwrap();
        let cli = Overrides { example: Some("ellipse".into()), grid: Some("64,32".into()), ..Default::default() };
        let job = JobConfig::resolve(file, cli).unwrap();
        assert_eq!(job.generator, "ellipse");
        assert_eq!(job.params.radius, 2.0);
        assert_eq!(job.t_window, (0.0, 3.0));
        assert_eq!((job.grid, job.t_count), (Some(64), 32));
        assert_eq!(job.mode, Mode::Glue);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |o: Overrides| JobConfig::resolve(ConfigFile::default(), o).unwrap_err();
        assert!(matches!(bad(Overrides { t_window: Some("1,1".into()), ..example("circle") }), CliError::Window(..)));
        assert!(matches!(bad(Overrides { grid: Some("8".into()), ..example("circle") }), CliError::Config(_)));
        assert!(matches!(bad(Overrides { sigma: Some("x".into()), ..example("circle") }), CliError::Config(_)));
        assert!(matches!(ConfigFile::parse("[front]\nbogus = 1\n").unwrap_err(), CliError::Config(_)));
    }
}
