//! Declarative batch runs from a versioned TOML file.
//!
//! ```toml
//! version = 1
//! out = "results"            # optional, relative to this file
//!
//! [defaults]                 # optional; any of patch, bins, alpha, seed,
//! patch = 7                  # normalize, mask
//!
//! [[case]]
//! name = "subject-01"        # becomes the case's output subdirectory
//! command = "fusion"         # map | fusion | translation | perturb
//! mri = "mri.png"
//! pet = "pet.png"
//! fused = "fused.png"
//! alpha = 0.5                # per-case override
//!
//! [[case]]
//! name = "subject-01-noise"
//! command = "perturb"
//! mri = "mri.png"
//! pet = "pet.png"
//! fused = "fused.png"
//! noise = [{ kind = "gaussian", variance = 0.01 }, { kind = "blur", seed = 3 }]
//! ```
//!
//! `map` cases take `source` and `target`; `translation` cases take
//! `source`, `reference` and `predicted`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use confmap::{Noise, NoiseSpec};
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::CliError;
use crate::run::{run_fusion, run_map, run_perturb, run_translation, STATS_FILE};
use crate::settings::{Overrides, Settings};
use crate::table::{write_tsv, StatsRecord};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchFile {
    pub version: u32,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub defaults: Overrides,
    #[serde(default, rename = "case")]
    pub cases: Vec<CaseSpec>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CaseSpec {
    pub name: String,
    #[serde(flatten)]
    pub job: Job,
    #[serde(flatten)]
    pub overrides: Overrides,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Map {
        source: PathBuf,
        target: PathBuf,
    },
    Fusion {
        mri: PathBuf,
        pet: PathBuf,
        fused: PathBuf,
    },
    Translation {
        source: PathBuf,
        reference: PathBuf,
        predicted: PathBuf,
    },
    Perturb {
        mri: PathBuf,
        pet: PathBuf,
        fused: PathBuf,
        #[serde(default)]
        noise: Vec<NoiseEntry>,
    },
}

impl Job {
    pub fn command(&self) -> &'static str {
        match self {
            Job::Map { .. } => "map",
            Job::Fusion { .. } => "fusion",
            Job::Translation { .. } => "translation",
            Job::Perturb { .. } => "perturb",
        }
    }
}

/// A noise spec whose seed falls back to the case seed.
#[derive(Clone, Debug, Deserialize)]
pub struct NoiseEntry {
    #[serde(flatten)]
    pub noise: Noise,
    pub seed: Option<u64>,
}

pub fn parse_batch(path: &Path, text: &str) -> Result<BatchFile, CliError> {
    let config_err = |detail: String| CliError::Config {
        path: path.to_path_buf(),
        detail,
    };
    let file: BatchFile = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
    if file.version != SCHEMA_VERSION {
        return Err(config_err(format!(
            "unsupported schema version {} (expected {SCHEMA_VERSION})",
            file.version
        )));
    }
    let mut seen = HashSet::new();
    for case in &file.cases {
        let valid = !case.name.is_empty()
            && case
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
            && case.name != "."
            && case.name != "..";
        if !valid {
            return Err(config_err(format!(
                "case name {:?} must be non-empty and use only [A-Za-z0-9._-]",
                case.name
            )));
        }
        if !seen.insert(case.name.as_str()) {
            return Err(config_err(format!("duplicate case name {:?}", case.name)));
        }
    }
    Ok(file)
}

/// Outcome of a batch run: all rows plus the number of failed cases.
#[derive(Debug)]
pub struct BatchReport {
    pub records: Vec<StatsRecord>,
    pub failed: usize,
    pub total: usize,
    pub out: PathBuf,
}

/// Runs every case (concurrently) and writes `<out>/stats.tsv`. Case
/// failures are recorded as failed rows; the run continues.
pub fn run_batch(config: &Path, out_override: Option<&Path>) -> Result<BatchReport, CliError> {
    let text = std::fs::read_to_string(config).map_err(|e| CliError::io(config, e))?;
    let file = parse_batch(config, &text)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let out = match (out_override, &file.out) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(o)) => base.join(o),
        (None, None) => base.join("batch-out"),
    };
    std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
    let defaults = Settings::default().with(&file.defaults);

    let results: Vec<(Vec<StatsRecord>, bool)> = file
        .cases
        .par_iter()
        .map(|case| {
            let settings = resolve(&defaults.with(&case.overrides), base);
            match run_case(case, &settings, base, &out.join(&case.name)) {
                Ok(rows) => (rows, true),
                Err(e) => (
                    vec![StatsRecord::failed(
                        &case.name,
                        case.job.command(),
                        &e.to_string(),
                    )],
                    false,
                ),
            }
        })
        .collect();

    let failed = results.iter().filter(|(_, ok)| !ok).count();
    let records: Vec<StatsRecord> = results.into_iter().flat_map(|(r, _)| r).collect();
    write_tsv(&out.join(STATS_FILE), &records, false)?;
    Ok(BatchReport {
        records,
        failed,
        total: file.cases.len(),
        out,
    })
}

fn resolve(settings: &Settings, base: &Path) -> Settings {
    Settings {
        mask: settings.mask.as_ref().map(|m| base.join(m)),
        ..settings.clone()
    }
}

fn run_case(
    case: &CaseSpec,
    settings: &Settings,
    base: &Path,
    out: &Path,
) -> Result<Vec<StatsRecord>, CliError> {
    let p = |rel: &PathBuf| base.join(rel);
    let name = case.name.as_str();
    match &case.job {
        Job::Map { source, target } => run_map(name, &p(source), &p(target), settings, out),
        Job::Fusion { mri, pet, fused } => {
            run_fusion(name, &p(mri), &p(pet), &p(fused), settings, out)
        }
        Job::Translation {
            source,
            reference,
            predicted,
        } => run_translation(
            name,
            &p(source),
            &p(reference),
            &p(predicted),
            settings,
            out,
        ),
        Job::Perturb {
            mri,
            pet,
            fused,
            noise,
        } => {
            let specs: Vec<NoiseSpec> = noise
                .iter()
                .map(|n| {
                    n.noise.validate()?;
                    Ok(NoiseSpec::new(n.noise, n.seed.unwrap_or(settings.seed)))
                })
                .collect::<Result<_, confmap::Error>>()?;
            if specs.is_empty() {
                return Err(CliError::Config {
                    path: PathBuf::from(name),
                    detail: "perturb case lists no noise".into(),
                });
            }
            run_perturb(name, &p(mri), &p(pet), &p(fused), &specs, settings, out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_case_kinds() {
        let text = r#"
version = 1
[defaults]
patch = 5
[[case]]
name = "a"
command = "map"
source = "s.png"
target = "t.png"
bins = 8
[[case]]
name = "b"
command = "perturb"
mri = "m.png"
pet = "p.png"
fused = "f.png"
noise = [{ kind = "salt_pepper", density = 0.1, seed = 4 }, { kind = "blur" }]
"#;
        let f = parse_batch(Path::new("x.toml"), text).unwrap();
        assert_eq!(f.defaults.patch, Some(5));
        assert_eq!(f.cases[0].overrides.bins, Some(8));
        assert!(matches!(f.cases[0].job, Job::Map { .. }));
        match &f.cases[1].job {
            Job::Perturb { noise, .. } => {
                assert_eq!(noise[0].noise, Noise::SaltPepper { density: 0.1 });
                assert_eq!(noise[0].seed, Some(4));
                assert_eq!(noise[1].noise, Noise::Blur { sigma: 0.5 });
                assert_eq!(noise[1].seed, None);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_line_of_syntax_errors() {
        let err = parse_batch(Path::new("x.toml"), "version = 1\n[[case]]\nname = \n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn rejects_bad_version_and_names() {
        assert!(parse_batch(Path::new("x"), "version = 2").is_err());
        let dup = "version = 1\n[[case]]\nname = \"a\"\ncommand = \"map\"\nsource = \"s\"\ntarget = \"t\"\n";
        let twice = format!("{dup}{}", &dup["version = 1\n".len()..]);
        assert!(parse_batch(Path::new("x"), &twice)
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
        let bad = dup.replace("\"a\"", "\"../a\"");
        assert!(parse_batch(Path::new("x"), &bad).is_err());
        assert!(parse_batch(Path::new("x"), "version = 1\nbogus = 3\n").is_err());
    }

    #[test]
    fn empty_case_list_is_valid() {
        let f = parse_batch(Path::new("x"), "version = 1\n").unwrap();
        assert!(f.cases.is_empty());
    }
}
