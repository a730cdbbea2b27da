//! Single-case commands. Every input is loaded and validated before the
//! output directory is touched, so a failing case leaves nothing behind.

use std::fs;
use std::path::{Path, PathBuf};

use confmap::confidence::MapSummary;
use confmap::harness::{average_fuse, independent_noise, make_synthetic_pair};
use confmap::imgio::{load_gray, save_png};
use confmap::overlay::{colormap_gray_to_heat, dominance_fractions};
use confmap::{
    apply_noise, compose_fusion, compose_translation, confidence_map, ConfidenceMap, GrayImage,
    Mask, NoiseSpec, OverlayImage,
};

use crate::error::CliError;
use crate::settings::Settings;
use crate::table::{write_tsv, StatsRecord};

pub const STATS_FILE: &str = "stats.tsv";

struct Inputs {
    images: Vec<GrayImage>,
    mask: Option<Mask>,
}

fn load_inputs(paths: &[&Path], settings: &Settings) -> Result<Inputs, CliError> {
    settings.validate()?;
    let images = paths
        .iter()
        .map(|p| {
            let img = load_gray(p)?;
            Ok(if settings.normalize {
                img.normalized()
            } else {
                img
            })
        })
        .collect::<Result<Vec<_>, confmap::Error>>()?;
    let dims = images[0].dims();
    if let Some(other) = images.iter().find(|i| i.dims() != dims) {
        return Err(confmap::Error::DimensionMismatch {
            left: dims,
            right: other.dims(),
        }
        .into());
    }
    let mask = match &settings.mask {
        Some(p) => {
            let m = Mask::load(p)?;
            if m.dims() != dims {
                return Err(confmap::Error::DimensionMismatch {
                    left: dims,
                    right: m.dims(),
                }
                .into());
            }
            Some(m)
        }
        None => None,
    };
    Ok(Inputs { images, mask })
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes `<stem>.png`, `<stem>_heat.png` and `<stem>.txt`.
fn write_map(dir: &Path, stem: &str, map: &ConfidenceMap) -> Result<(), CliError> {
    save_png(map, dir.join(format!("{stem}.png")))?;
    save_png(
        &colormap_gray_to_heat(map),
        dir.join(format!("{stem}_heat.png")),
    )?;
    let txt = dir.join(format!("{stem}.txt"));
    fs::write(&txt, map.to_text()).map_err(|e| CliError::io(txt, e))
}

fn write_overlay(dir: &Path, overlay: &OverlayImage) -> Result<(), CliError> {
    Ok(save_png(overlay, dir.join("overlay.png"))?)
}

fn summarize(map: &ConfidenceMap, mask: Option<&Mask>) -> Result<MapSummary, CliError> {
    Ok(map.summary(mask)?)
}

fn finish(out: &Path, records: Vec<StatsRecord>) -> Result<Vec<StatsRecord>, CliError> {
    write_tsv(&out.join(STATS_FILE), &records, false)?;
    Ok(records)
}

/// Confidence map of `target` against `source`.
pub fn run_map(
    case: &str,
    source: &Path,
    target: &Path,
    settings: &Settings,
    out: &Path,
) -> Result<Vec<StatsRecord>, CliError> {
    let inputs = load_inputs(&[source, target], settings)?;
    let cfg = settings.map_config()?;
    let map = confidence_map(&inputs.images[0], &inputs.images[1], &cfg)?;
    let record = StatsRecord::ok(
        case,
        "map",
        "confidence",
        summarize(&map, inputs.mask.as_ref())?,
    );
    ensure_dir(out)?;
    write_map(out, "confidence", &map)?;
    finish(out, vec![record])
}

struct PairMaps {
    red: ConfidenceMap,
    green: ConfidenceMap,
}

fn pair_records(
    case: &str,
    command: &str,
    names: [&str; 2],
    maps: &PairMaps,
    mask: Option<&Mask>,
) -> Result<Vec<StatsRecord>, CliError> {
    let dominance = dominance_fractions(&maps.red, &maps.green)?;
    [(&maps.red, names[0]), (&maps.green, names[1])]
        .into_iter()
        .map(|(m, name)| {
            let mut r = StatsRecord::ok(case, command, name, summarize(m, mask)?);
            r.dominance = Some(dominance);
            Ok(r)
        })
        .collect()
}

/// Maps of the fused image against each source plus the fusion overlay.
pub fn run_fusion(
    case: &str,
    mri: &Path,
    pet: &Path,
    fused: &Path,
    settings: &Settings,
    out: &Path,
) -> Result<Vec<StatsRecord>, CliError> {
    let inputs = load_inputs(&[mri, pet, fused], settings)?;
    let [mri, pet, fused] = [&inputs.images[0], &inputs.images[1], &inputs.images[2]];
    let cfg = settings.map_config()?;
    let maps = PairMaps {
        red: confidence_map(mri, fused, &cfg)?,
        green: confidence_map(pet, fused, &cfg)?,
    };
    let overlay = compose_fusion(&maps.red, &maps.green, fused, &settings.overlay_config()?)?;
    let records = pair_records(
        case,
        "fusion",
        ["s_mri", "s_pet"],
        &maps,
        inputs.mask.as_ref(),
    )?;
    ensure_dir(out)?;
    write_map(out, "s_mri", &maps.red)?;
    write_map(out, "s_pet", &maps.green)?;
    write_overlay(out, &overlay)?;
    finish(out, records)
}

/// Maps of the predicted image against the source-domain image (red) and
/// the reference target (green) plus the translation overlay.
pub fn run_translation(
    case: &str,
    source: &Path,
    reference: &Path,
    predicted: &Path,
    settings: &Settings,
    out: &Path,
) -> Result<Vec<StatsRecord>, CliError> {
    let inputs = load_inputs(&[source, reference, predicted], settings)?;
    let [source, reference, predicted] = [&inputs.images[0], &inputs.images[1], &inputs.images[2]];
    let cfg = settings.map_config()?;
    let maps = PairMaps {
        red: confidence_map(source, predicted, &cfg)?,
        green: confidence_map(reference, predicted, &cfg)?,
    };
    let overlay = compose_translation(
        &maps.red,
        &maps.green,
        predicted,
        &settings.overlay_config()?,
    )?;
    let records = pair_records(
        case,
        "translation",
        ["s_source", "s_reference"],
        &maps,
        inputs.mask.as_ref(),
    )?;
    ensure_dir(out)?;
    write_map(out, "s_source", &maps.red)?;
    write_map(out, "s_reference", &maps.green)?;
    write_overlay(out, &overlay)?;
    finish(out, records)
}

/// Re-evaluates the fusion maps after each perturbation of the fused image.
pub fn run_perturb(
    case: &str,
    mri: &Path,
    pet: &Path,
    fused: &Path,
    noises: &[NoiseSpec],
    settings: &Settings,
    out: &Path,
) -> Result<Vec<StatsRecord>, CliError> {
    if noises.is_empty() {
        return Err(CliError::Usage(
            "perturbation study needs at least one noise".into(),
        ));
    }
    let inputs = load_inputs(&[mri, pet, fused], settings)?;
    let [mri, pet, fused] = [&inputs.images[0], &inputs.images[1], &inputs.images[2]];
    let cfg = settings.map_config()?;
    let overlay_cfg = settings.overlay_config()?;
    let mask = inputs.mask.as_ref();

    let base = PairMaps {
        red: confidence_map(mri, fused, &cfg)?,
        green: confidence_map(pet, fused, &cfg)?,
    };
    let mut records = pair_records(case, "perturb", ["s_mri", "s_pet"], &base, mask)?;
    records.iter_mut().for_each(|r| r.noise = "none".into());
    let base_means = [
        records[0].summary.unwrap().mean,
        records[1].summary.unwrap().mean,
    ];

    let mut studies = Vec::with_capacity(noises.len());
    for (i, spec) in noises.iter().enumerate() {
        let noisy = apply_noise(fused, spec)?;
        let maps = PairMaps {
            red: confidence_map(mri, &noisy, &cfg)?,
            green: confidence_map(pet, &noisy, &cfg)?,
        };
        let overlay = compose_fusion(&maps.red, &maps.green, &noisy, &overlay_cfg)?;
        let mut rows = pair_records(case, "perturb", ["s_mri", "s_pet"], &maps, mask)?;
        for (row, base) in rows.iter_mut().zip(base_means) {
            row.noise = format!("{}:seed={}", spec.noise, spec.seed);
            row.delta_mean = Some(row.summary.unwrap().mean - base);
        }
        records.extend(rows);
        let dir = out.join(format!("{:02}_{}", i + 1, spec.noise.kind()));
        studies.push((dir, noisy, maps, overlay));
    }

    ensure_dir(out)?;
    write_map(out, "s_mri", &base.red)?;
    write_map(out, "s_pet", &base.green)?;
    for (dir, noisy, maps, overlay) in &studies {
        ensure_dir(dir)?;
        save_png(noisy, dir.join("perturbed.png"))?;
        write_map(dir, "s_mri", &maps.red)?;
        write_map(dir, "s_pet", &maps.green)?;
        write_overlay(dir, overlay)?;
    }
    finish(out, records)
}

/// Fixture file names written by [`run_harness`].
pub const FIXTURE_FILES: [&str; 5] = [
    "structural.png",
    "functional.png",
    "fused.png",
    "predicted.png",
    "noise.png",
];

/// Writes a synthetic fixture set and a batch file exercising every command.
pub fn run_harness(
    width: usize,
    height: usize,
    seed: u64,
    out: &Path,
) -> Result<PathBuf, CliError> {
    let pair = make_synthetic_pair(width, height, seed)?;
    let fused = average_fuse(&pair.structural, &pair.functional)?;
    let predicted = apply_noise(
        &pair.structural,
        &NoiseSpec::new(
            confmap::Noise::Gaussian {
                mean: 0.0,
                variance: 0.001,
            },
            seed,
        ),
    )?;
    let noise = independent_noise(width, height, seed);
    ensure_dir(out)?;
    for (name, img) in FIXTURE_FILES.iter().zip([
        &pair.structural,
        &pair.functional,
        &fused,
        &predicted,
        &noise,
    ]) {
        save_png(img, out.join(name))?;
    }
    let batch = out.join("batch.toml");
    fs::write(&batch, fixture_batch(seed)).map_err(|e| CliError::io(&batch, e))?;
    Ok(batch)
}

fn fixture_batch(seed: u64) -> String {
    format!(
        r#"# confmap batch file
version = 1
out = "batch-out"

[defaults]
patch = 7
bins = 16
alpha = 0.7
seed = {seed}

[[case]]
name = "self"
command = "map"
source = "structural.png"
target = "structural.png"

[[case]]
name = "noise-floor"
command = "map"
source = "structural.png"
target = "noise.png"

[[case]]
name = "fusion"
command = "fusion"
mri = "structural.png"
pet = "functional.png"
fused = "fused.png"

[[case]]
name = "translation"
command = "translation"
source = "functional.png"
reference = "structural.png"
predicted = "predicted.png"

[[case]]
name = "perturb"
command = "perturb"
mri = "structural.png"
pet = "functional.png"
fused = "fused.png"
noise = [
    {{ kind = "gaussian" }},
    {{ kind = "poisson" }},
    {{ kind = "salt_pepper" }},
    {{ kind = "speckle" }},
    {{ kind = "blur" }},
]
"#
    )
}
