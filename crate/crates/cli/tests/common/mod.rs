#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use confmap::harness::{average_fuse, independent_noise, make_synthetic_pair};
use confmap::imgio::save_png;
use confmap::GrayImage;

pub fn confmap(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confmap"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

pub struct Fixture {
    pub dir: PathBuf,
}

impl Fixture {
    pub fn path(&self, name: &str) -> String {
        self.dir.join(name).to_string_lossy().into_owned()
    }
}

/// structural.png, functional.png, fused.png, noise.png for one seed.
pub fn write_fixture(dir: &Path, seed: u64, side: usize) -> Fixture {
    let p = make_synthetic_pair(side, side, seed).unwrap();
    let fused = average_fuse(&p.structural, &p.functional).unwrap();
    let noise = independent_noise(side, side, 1000 + seed);
    std::fs::create_dir_all(dir).unwrap();
    let imgs: [(&str, &GrayImage); 4] = [
        ("structural.png", &p.structural),
        ("functional.png", &p.functional),
        ("fused.png", &fused),
        ("noise.png", &noise),
    ];
    for (name, img) in imgs {
        save_png(img, dir.join(name)).unwrap();
    }
    Fixture {
        dir: dir.to_path_buf(),
    }
}

/// Relative path -> file bytes for every file under `root`.
pub fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.insert(
                    path.strip_prefix(root).unwrap().to_path_buf(),
                    std::fs::read(&path).unwrap(),
                );
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}
