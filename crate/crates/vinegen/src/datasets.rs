//! Seeded generators for toy distributions, a synthetic digit set for the
//! image pipeline, IDX image loading, and CSV I/O.
//!
//! Every generator is a pure function of its arguments; numbers are written
//! to CSV in shortest round-trip form so files reload bit-identically.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::norm_quantile;

/// A generated or loaded dataset with optional integer labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub labels: Option<Vec<u32>>,
    /// Generator name, seed, and parameters.
    pub provenance: String,
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    norm_quantile(rng.gen_range(1e-12..1.0 - 1e-12))
}

/// Ring of 8 isotropic Gaussians on a circle of radius 2, noise sd 0.02.
pub fn gen_ring8(n: usize, seed: u64) -> Dataset {
    gen_ring8_with(n, seed, 2.0, 0.02)
}

pub fn gen_ring8_with(n: usize, seed: u64, radius: f64, sd: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let mode = rng.gen_range(0..8u32);
        let theta = std::f64::consts::PI * mode as f64 / 4.0;
        x.push(vec![
            radius * theta.cos() + sd * gauss(&mut rng),
            radius * theta.sin() + sd * gauss(&mut rng),
        ]);
        labels.push(mode);
    }
    Dataset {
        x,
        labels: Some(labels),
        provenance: format!("ring8(n={n}, seed={seed}, radius={radius}, sd={sd})"),
    }
}

/// 5x5 grid of isotropic Gaussians on {-2..2}^2, noise sd 0.05.
pub fn gen_grid25(n: usize, seed: u64) -> Dataset {
    gen_grid25_with(n, seed, 1.0, 0.05)
}

pub fn gen_grid25_with(n: usize, seed: u64, spacing: f64, sd: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let mode = rng.gen_range(0..25u32);
        let (i, j) = (mode / 5, mode % 5);
        x.push(vec![
            spacing * (i as f64 - 2.0) + sd * gauss(&mut rng),
            spacing * (j as f64 - 2.0) + sd * gauss(&mut rng),
        ]);
        labels.push(mode);
    }
    Dataset {
        x,
        labels: Some(labels),
        provenance: format!("grid25(n={n}, seed={seed}, spacing={spacing}, sd={sd})"),
    }
}

/// Two-dimensional swiss roll: t ~ U[1.5pi, 4.5pi], point =
/// scale*(t cos t, t sin t) plus isotropic Gaussian noise.
pub fn gen_swiss_roll(n: usize, seed: u64) -> Dataset {
    gen_swiss_roll_with(n, seed, 0.1, 0.01)
}

pub fn gen_swiss_roll_with(n: usize, seed: u64, scale: f64, noise_sd: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = 1.5 * std::f64::consts::PI;
    let hi = 4.5 * std::f64::consts::PI;
    let x = (0..n)
        .map(|_| {
            let t = rng.gen_range(lo..hi);
            vec![
                scale * t * t.cos() + noise_sd * gauss(&mut rng),
                scale * t * t.sin() + noise_sd * gauss(&mut rng),
            ]
        })
        .collect();
    Dataset {
        x,
        labels: None,
        provenance: format!("swissroll(n={n}, seed={seed}, scale={scale}, noise_sd={noise_sd})"),
    }
}

/// The three-dimensional cone: x1, x2 ~ U[-5,5] independent and
/// x3 = sqrt(x1^2 + x2^2) + U[-0.1, 0.1].
pub fn gen_cone3d(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = (0..n)
        .map(|_| {
            let x1: f64 = rng.gen_range(-5.0..5.0);
            let x2: f64 = rng.gen_range(-5.0..5.0);
            let x3 = x1.hypot(x2) + rng.gen_range(-0.1..0.1);
            vec![x1, x2, x3]
        })
        .collect();
    Dataset {
        x,
        labels: None,
        provenance: format!("cone3d(n={n}, seed={seed})"),
    }
}

// 8x8 digit glyphs; '#' marks an on pixel. One-pixel margins leave room for
// the random shifts.
const DIGIT_GLYPHS: [[&str; 8]; 10] = [
    [
        "........", "..###...", ".#...#..", ".#...#..", ".#...#..", ".#...#..", "..###...",
        "........",
    ],
    [
        "........", "...#....", "..##....", "...#....", "...#....", "...#....", "..###...",
        "........",
    ],
    [
        "........", "..###...", ".#...#..", "....#...", "...#....", "..#.....", ".#####..",
        "........",
    ],
    [
        "........", "..###...", ".#...#..", "...##...", ".....#..", ".#...#..", "..###...",
        "........",
    ],
    [
        "........", "....#...", "...##...", "..#.#...", ".#..#...", ".#####..", "....#...",
        "........",
    ],
    [
        "........", ".#####..", ".#......", ".####...", ".....#..", ".#...#..", "..###...",
        "........",
    ],
    [
        "........", "..###...", ".#......", ".####...", ".#...#..", ".#...#..", "..###...",
        "........",
    ],
    [
        "........", ".#####..", ".....#..", "....#...", "...#....", "...#....", "...#....",
        "........",
    ],
    [
        "........", "..###...", ".#...#..", "..###...", ".#...#..", ".#...#..", "..###...",
        "........",
    ],
    [
        "........", "..###...", ".#...#..", ".#...#..", "..####..", ".....#..", "..###...",
        "........",
    ],
];

/// Synthetic labeled 8x8 digit images: glyphs with random one-pixel shifts,
/// intensity jitter, and uniform pixel noise. A deterministic stand-in for a
/// downsampled handwritten-digit set.
pub fn gen_digits8(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let digit = rng.gen_range(0..10u32);
        let dx = rng.gen_range(-1i32..=1);
        let dy = rng.gen_range(-1i32..=1);
        let intensity = rng.gen_range(0.6..1.0);
        let mut img = vec![0.0f64; 64];
        for r in 0..8i32 {
            for c in 0..8i32 {
                let (sr, sc) = (r - dy, c - dx);
                if (0..8).contains(&sr) && (0..8).contains(&sc) {
                    let on = DIGIT_GLYPHS[digit as usize][sr as usize].as_bytes()[sc as usize]
                        == b'#';
                    if on {
                        img[(r * 8 + c) as usize] = intensity;
                    }
                }
            }
        }
        for p in img.iter_mut() {
            *p = (*p + rng.gen_range(0.0..0.1)).clamp(0.0, 1.0);
        }
        x.push(img);
        labels.push(digit);
    }
    Dataset {
        x,
        labels: Some(labels),
        provenance: format!("digits8(n={n}, seed={seed})"),
    }
}

const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

fn read_be_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::Format(format!(
            "idx file truncated at offset {offset}"
        )));
    }
    Ok(u32::from_be_bytes(bytes[offset..end].try_into().unwrap()))
}

/// Load an IDX image file (and optional IDX label file); pixels are scaled
/// to [0,1] and images flattened row-major.
pub fn load_idx(images_path: &Path, labels_path: Option<&Path>) -> Result<Dataset> {
    let mut bytes = Vec::new();
    std::fs::File::open(images_path)?.read_to_end(&mut bytes)?;
    let magic = read_be_u32(&bytes, 0)?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::Format(format!(
            "bad idx image magic 0x{magic:08x} at offset 0 (expected 0x{IDX_IMAGES_MAGIC:08x})"
        )));
    }
    let n = read_be_u32(&bytes, 4)? as usize;
    let rows = read_be_u32(&bytes, 8)? as usize;
    let cols = read_be_u32(&bytes, 12)? as usize;
    let pixels = rows * cols;
    let data = &bytes[16..];
    if data.len() != n * pixels {
        return Err(Error::Format(format!(
            "idx image payload is {} bytes, expected {} ({} images of {}x{}) at offset 16",
            data.len(),
            n * pixels,
            n,
            rows,
            cols
        )));
    }
    let x: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            data[i * pixels..(i + 1) * pixels]
                .iter()
                .map(|&b| b as f64 / 255.0)
                .collect()
        })
        .collect();

    let labels = match labels_path {
        None => None,
        Some(path) => {
            let mut lb = Vec::new();
            std::fs::File::open(path)?.read_to_end(&mut lb)?;
            let magic = read_be_u32(&lb, 0)?;
            if magic != IDX_LABELS_MAGIC {
                return Err(Error::Format(format!(
                    "bad idx label magic 0x{magic:08x} at offset 0 (expected 0x{IDX_LABELS_MAGIC:08x})"
                )));
            }
            let ln = read_be_u32(&lb, 4)? as usize;
            if ln != n {
                return Err(Error::Format(format!(
                    "label count {ln} does not match image count {n}"
                )));
            }
            if lb.len() != 8 + ln {
                return Err(Error::Format(format!(
                    "idx label payload is {} bytes, expected {} at offset 8",
                    lb.len() - 8,
                    ln
                )));
            }
            Some(lb[8..].iter().map(|&b| b as u32).collect())
        }
    };

    Ok(Dataset {
        x,
        labels,
        provenance: format!(
            "idx({}, {} images of {}x{})",
            images_path.display(),
            n,
            rows,
            cols
        ),
    })
}

/// Write images (bytes, flattened row-major) as an IDX file.
pub fn write_idx_images(path: &Path, images: &[Vec<u8>], rows: usize, cols: usize) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&IDX_IMAGES_MAGIC.to_be_bytes())?;
    f.write_all(&(images.len() as u32).to_be_bytes())?;
    f.write_all(&(rows as u32).to_be_bytes())?;
    f.write_all(&(cols as u32).to_be_bytes())?;
    for img in images {
        if img.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "image has {} pixels, expected {}",
                img.len(),
                rows * cols
            )));
        }
        f.write_all(img)?;
    }
    Ok(())
}

/// Write labels as an IDX file.
pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&IDX_LABELS_MAGIC.to_be_bytes())?;
    f.write_all(&(labels.len() as u32).to_be_bytes())?;
    f.write_all(labels)?;
    Ok(())
}

/// Downsample square images by block averaging; sides not divisible by the
/// factor are center-cropped first.
pub fn downsample(ds: &Dataset, factor: usize) -> Result<Dataset> {
    if factor == 0 {
        return Err(Error::Domain("downsample factor must be positive".into()));
    }
    let p = ds.x.first().map(|r| r.len()).unwrap_or(0);
    let side = (p as f64).sqrt().round() as usize;
    if side * side != p {
        return Err(Error::DimensionMismatch(format!(
            "rows of {p} pixels are not square images"
        )));
    }
    let cropped = side - side % factor;
    let offset = (side - cropped) / 2;
    let out_side = cropped / factor;
    let x: Vec<Vec<f64>> = ds
        .x
        .iter()
        .map(|img| {
            let mut out = vec![0.0; out_side * out_side];
            for r in 0..out_side {
                for c in 0..out_side {
                    let mut sum = 0.0;
                    for dr in 0..factor {
                        for dc in 0..factor {
                            let rr = offset + r * factor + dr;
                            let cc = offset + c * factor + dc;
                            sum += img[rr * side + cc];
                        }
                    }
                    out[r * out_side + c] = sum / (factor * factor) as f64;
                }
            }
            out
        })
        .collect();
    Ok(Dataset {
        x,
        labels: ds.labels.clone(),
        provenance: format!("{} | downsample(factor={factor})", ds.provenance),
    })
}

/// Write a numeric table as CSV with a header row; labels, when present, go
/// into a trailing `label` column. Uses shortest round-trip float formatting.
pub fn write_csv(path: &Path, data: &[Vec<f64>], labels: Option<&[u32]>) -> Result<()> {
    let d = data.first().map(|r| r.len()).unwrap_or(0);
    if data.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch("ragged rows".into()));
    }
    if let Some(l) = labels {
        if l.len() != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} rows",
                l.len(),
                data.len()
            )));
        }
    }
    let mut out = String::new();
    let header: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
    out.push_str(&header.join(","));
    if labels.is_some() {
        if d > 0 {
            out.push(',');
        }
        out.push_str("label");
    }
    out.push('\n');
    for (i, row) in data.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        if let Some(l) = labels {
            if d > 0 {
                out.push(',');
            }
            out.push_str(&format!("{}", l[i]));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a CSV written by [`write_csv`] (or any numeric CSV with a header
/// row; a trailing `label` column becomes labels).
pub fn read_csv(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty csv: missing header".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let has_labels = cols.last().map(|c| c.trim() == "label").unwrap_or(false);
    let d = if has_labels { cols.len() - 1 } else { cols.len() };

    let mut x = Vec::new();
    let mut labels = if has_labels { Some(Vec::new()) } else { None };
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != cols.len() {
            return Err(Error::Format(format!(
                "csv line {}: {} cells, expected {}",
                lineno + 2,
                cells.len(),
                cols.len()
            )));
        }
        let row: Vec<f64> = cells[..d]
            .iter()
            .map(|c| {
                c.trim().parse::<f64>().map_err(|e| {
                    Error::Format(format!("csv line {}: bad number '{c}': {e}", lineno + 2))
                })
            })
            .collect::<Result<_>>()?;
        x.push(row);
        if let Some(l) = labels.as_mut() {
            let lab = cells[d].trim().parse::<u32>().map_err(|e| {
                Error::Format(format!("csv line {}: bad label: {e}", lineno + 2))
            })?;
            l.push(lab);
        }
    }
    Ok(Dataset {
        x,
        labels,
        provenance: format!("csv({})", path.display()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vine::kendall_tau;

    #[test]
    fn ring8_modes_and_spread() {
        let ds = gen_ring8(8000, 1);
        let centers: Vec<(f64, f64)> = (0..8)
            .map(|k| {
                let th = std::f64::consts::PI * k as f64 / 4.0;
                (2.0 * th.cos(), 2.0 * th.sin())
            })
            .collect();
        let mut counts = [0usize; 8];
        for row in &ds.x {
            let (mut best, mut best_d) = (0, f64::INFINITY);
            for (k, c) in centers.iter().enumerate() {
                let d = (row[0] - c.0).hypot(row[1] - c.1);
                if d < best_d {
                    best = k;
                    best_d = d;
                }
            }
            assert!(best_d < 0.2, "point {:?} is {} from its center", row, best_d);
            counts[best] += 1;
        }
        for (k, &c) in counts.iter().enumerate() {
            assert!((800..=1200).contains(&c), "mode {k} count {c}");
        }
    }

    #[test]
    fn grid25_modes_and_spread() {
        let n = 5000;
        let ds = gen_grid25(n, 2);
        let mut counts = [0usize; 25];
        for row in &ds.x {
            let i = (row[0].round() + 2.0) as i64;
            let j = (row[1].round() + 2.0) as i64;
            assert!((0..5).contains(&i) && (0..5).contains(&j));
            let d = (row[0] - (i as f64 - 2.0)).hypot(row[1] - (j as f64 - 2.0));
            assert!(d < 0.5);
            counts[(i * 5 + j) as usize] += 1;
        }
        // Binomial: mean n/25, sd = sqrt(n * (1/25) * (24/25)).
        let mean = n as f64 / 25.0;
        let sd = (n as f64 * (1.0 / 25.0) * (24.0 / 25.0)).sqrt();
        for &c in &counts {
            assert!((c as f64 - mean).abs() < 5.0 * sd, "count {c}");
        }
    }

    #[test]
    fn swiss_roll_spiral_relation() {
        let ds = gen_swiss_roll(4000, 3);
        let mut ok = 0;
        let mut t_min = f64::INFINITY;
        let mut t_max = f64::NEG_INFINITY;
        for row in &ds.x {
            let r = row[0].hypot(row[1]);
            let theta = row[1].atan2(row[0]);
            let t_est = r / 0.1;
            t_min = t_min.min(t_est);
            t_max = t_max.max(t_est);
            // Nearest spiral passage to this angle.
            let k = ((t_est - theta) / (2.0 * std::f64::consts::PI)).round();
            let t_spiral = theta + 2.0 * std::f64::consts::PI * k;
            if (r - 0.1 * t_spiral).abs() < 0.05 {
                ok += 1;
            }
        }
        assert!(ok as f64 >= 0.99 * ds.x.len() as f64, "{ok} on spiral");
        // The angular coordinate sweeps at least 2.5 pi radians.
        assert!(t_max - t_min >= 2.5 * std::f64::consts::PI);
    }

    #[test]
    fn cone3d_construction() {
        let ds = gen_cone3d(5000, 4);
        for row in &ds.x {
            let r = row[0].hypot(row[1]);
            assert!((row[2] - r).abs() <= 0.1 + 1e-12);
            assert!((-5.0..5.0).contains(&row[0]) && (-5.0..5.0).contains(&row[1]));
        }
        let x1: Vec<f64> = ds.x.iter().map(|r| r[0]).collect();
        let x2: Vec<f64> = ds.x.iter().map(|r| r[1]).collect();
        let tau = kendall_tau(&x1, &x2).unwrap();
        assert!(tau.abs() < 0.04, "tau = {tau}");
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_ring8(100, 7).x, gen_ring8(100, 7).x);
        assert_eq!(gen_grid25(100, 7).x, gen_grid25(100, 7).x);
        assert_eq!(gen_swiss_roll(100, 7).x, gen_swiss_roll(100, 7).x);
        assert_eq!(gen_cone3d(100, 7).x, gen_cone3d(100, 7).x);
        assert_eq!(gen_digits8(100, 7).x, gen_digits8(100, 7).x);
        assert_ne!(gen_cone3d(100, 7).x, gen_cone3d(100, 8).x);
    }

    #[test]
    fn digits_are_plausible_images() {
        let ds = gen_digits8(500, 9);
        assert_eq!(ds.x[0].len(), 64);
        let labels = ds.labels.as_ref().unwrap();
        assert!(labels.iter().all(|&l| l < 10));
        assert!(ds
            .x
            .iter()
            .all(|img| img.iter().all(|&p| (0.0..=1.0).contains(&p))));
        // Images of the same digit are more alike than across digits.
        let mean_img = |d: u32| -> Vec<f64> {
            let sel: Vec<&Vec<f64>> = ds
                .x
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == d)
                .map(|(x, _)| x)
                .collect();
            (0..64)
                .map(|j| sel.iter().map(|r| r[j]).sum::<f64>() / sel.len() as f64)
                .collect()
        };
        let m0 = mean_img(0);
        let m1 = mean_img(1);
        let dist: f64 = m0
            .iter()
            .zip(&m1)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(dist > 0.5, "digit means too close: {dist}");
    }

    #[test]
    fn idx_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let img_path = dir.path().join("imgs.idx");
        let lab_path = dir.path().join("labs.idx");
        let images: Vec<Vec<u8>> = vec![vec![0u8; 9], vec![255u8; 9], (0..9u8).collect()];
        write_idx_images(&img_path, &images, 3, 3).unwrap();
        write_idx_labels(&lab_path, &[7, 0, 3]).unwrap();
        let ds = load_idx(&img_path, Some(&lab_path)).unwrap();
        assert_eq!(ds.x.len(), 3);
        assert_eq!(ds.labels, Some(vec![7, 0, 3]));
        assert!(ds.x[0].iter().all(|&v| v == 0.0));
        assert!(ds.x[1].iter().all(|&v| v == 1.0));
        for (j, &v) in ds.x[2].iter().enumerate() {
            assert_eq!(v, j as f64 / 255.0);
        }

        // Corrupt the magic.
        let mut bytes = std::fs::read(&img_path).unwrap();
        bytes[3] = 0x99;
        std::fs::write(&img_path, &bytes).unwrap();
        match load_idx(&img_path, None) {
            Err(Error::Format(msg)) => assert!(msg.contains("offset 0"), "{msg}"),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn downsample_shapes() {
        let img28: Vec<f64> = (0..784).map(|i| (i % 255) as f64 / 255.0).collect();
        let ds = Dataset {
            x: vec![img28],
            labels: None,
            provenance: "test".into(),
        };
        assert_eq!(downsample(&ds, 2).unwrap().x[0].len(), 14 * 14);
        assert_eq!(downsample(&ds, 4).unwrap().x[0].len(), 7 * 7);
        // Non-divisible side gets center-cropped: 28 -> crop 25 -> 5.
        assert_eq!(downsample(&ds, 5).unwrap().x[0].len(), 5 * 5);
        // Block average of a constant image is the constant.
        let ones = Dataset {
            x: vec![vec![0.25; 16]],
            labels: None,
            provenance: "test".into(),
        };
        let down = downsample(&ones, 2).unwrap();
        assert!(down.x[0].iter().all(|&v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<Vec<f64>> = (0..50)
            .map(|_| {
                vec![
                    rng.gen_range(-1e6..1e6),
                    rng.gen::<f64>() * 1e-12,
                    std::f64::consts::PI * rng.gen::<f64>(),
                ]
            })
            .collect();
        let labels: Vec<u32> = (0..50).map(|i| i % 4).collect();
        write_csv(&path, &data, Some(&labels)).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back.x, data);
        assert_eq!(back.labels, Some(labels));

        // And without labels.
        write_csv(&path, &data, None).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back.x, data);
        assert_eq!(back.labels, None);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x0,x1\n1.0\n").unwrap();
        assert!(matches!(read_csv(&path), Err(Error::Format(_))));
        std::fs::write(&path, "x0,x1\n1.0,abc\n").unwrap();
        assert!(matches!(read_csv(&path), Err(Error::Format(_))));
    }
}
