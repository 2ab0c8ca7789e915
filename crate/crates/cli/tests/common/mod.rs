#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sdfseg_oracle::{brute_sdf, NaiveLoss};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_FORMAT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;
pub const EXIT_EMPTY_GT: i32 = 5;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn schema(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name)
}

pub fn sdfseg() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sdfseg"));
    cmd.env_remove("SDFSEG_THREADS");
    cmd
}

pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    sdfseg().args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

/// Mask of the two-squares fixture after border cleaning, derived by hand: the
/// touching columns 3 and 4 are removed, leaving columns 1-2 and 5-6 of rows 1-3.
pub fn two_squares_clean() -> (usize, usize, Vec<u8>) {
    let (w, h) = (8, 5);
    let mask = (0..w * h)
        .map(|i| {
            let (r, c) = (i / w, i % w);
            ((1..=3).contains(&r) && matches!(c, 1 | 2 | 5 | 6)) as u8
        })
        .collect();
    (w, h, mask)
}

/// Two discs of radius `(size - 12) / 4` centred on the middle row, touching at
/// the middle column. Label 2 wins where they overlap.
pub fn two_discs(size: usize) -> Vec<u32> {
    let r = ((size - 12) / 4) as f64;
    let mid = (size / 2) as f64;
    let inside = |row: usize, col: usize, cc: f64| {
        let (dr, dc) = (row as f64 - mid, col as f64 - cc);
        dr * dr + dc * dc <= r * r
    };
    (0..size * size)
        .map(|i| {
            let (row, col) = (i / size, i % size);
            if inside(row, col, mid + r) {
                2
            } else if inside(row, col, mid - r) {
                1
            } else {
                0
            }
        })
        .collect()
}

/// Drops every labeled pixel with an 8-neighbour carrying another nonzero label.
pub fn clean_oracle(w: usize, h: usize, labels: &[u32]) -> Vec<u8> {
    let mut out = vec![0u8; w * h];
    for r in 0..h {
        for c in 0..w {
            let l = labels[r * w + c];
            if l == 0 {
                continue;
            }
            let mut touching = false;
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    let (rr, cc) = (r as i64 + dr, c as i64 + dc);
                    if rr < 0 || cc < 0 || rr >= h as i64 || cc >= w as i64 {
                        continue;
                    }
                    let n = labels[rr as usize * w + cc as usize];
                    touching |= n != 0 && n != l;
                }
            }
            out[r * w + c] = (!touching) as u8;
        }
    }
    out
}

/// `SDF1` header plus little-endian `f32` payload.
pub fn field_bytes(w: usize, h: usize, values: &[f64]) -> Vec<u8> {
    let mut out = b"SDF1".to_vec();
    out.extend_from_slice(&(w as u32).to_le_bytes());
    out.extend_from_slice(&(h as u32).to_le_bytes());
    for &v in values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn shift_right(w: usize, mask: &[u8], by: usize) -> Vec<u8> {
    (0..mask.len())
        .map(|i| {
            let c = i % w;
            if c < by {
                0
            } else {
                mask[i - by]
            }
        })
        .collect()
}

pub const DISC_SIZE: usize = 64;
pub const SHIFT: usize = 2;

/// Cleaned two-discs mask, its oracle SDF and the prediction made by shifting
/// the mask right and rounding its oracle SDF to `f32`.
pub fn loss_fixture() -> (Vec<u8>, Vec<f64>, Vec<f64>) {
    let n = DISC_SIZE;
    let mask = clean_oracle(n, n, &two_discs(n));
    let gt = brute_sdf(n, n, &mask).expect("two classes");
    let pred: Vec<f64> = brute_sdf(n, n, &shift_right(n, &mask, SHIFT))
        .expect("two classes")
        .into_iter()
        .map(|v| v as f32 as f64)
        .collect();
    (mask, gt, pred)
}

pub fn default_oracle() -> NaiveLoss {
    NaiveLoss {
        alpha: 4.0,
        beta: 0.0,
        weights: [0.9, 0.1, 1.0, 1.0],
        mean_pixel_terms: false,
    }
}

pub fn validate(schema_file: &str, instance: &serde_json::Value) {
    let text = std::fs::read_to_string(schema(schema_file)).expect("schema present");
    let schema: serde_json::Value = serde_json::from_str(&text).expect("schema is JSON");
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let result = compiled.validate(instance);
    if let Err(errors) = result {
        let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("{schema_file}: {msgs:?}");
    }
}
