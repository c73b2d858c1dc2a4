//! Deterministic heartbeat-like curves in UCR layout, for runs where the
//! real ECG200 files are not at hand.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use frfx_core::rng;
use rand::Rng;

/// Standard normal draw (Box-Muller).
fn normal(r: &mut impl Rng) -> f64 {
    let u1: f64 = r.random::<f64>().max(1e-300);
    let u2: f64 = r.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn bump(t: f64, centre: f64, width: f64) -> f64 {
    let z = (t - centre) / width;
    (-0.5 * z * z).exp()
}

/// `n` beats of length `len`; raw labels are `-1` (abnormal, about a third)
/// and `1`.
pub fn ecg_like(seed: u64, n: usize, len: usize) -> Vec<(f64, Vec<f64>)> {
    let mut r = rng::stream(seed, 0xec9, 0);
    (0..n)
        .map(|_| {
            let abnormal = r.random::<f64>() < 0.33;
            let shift = 0.02 * normal(&mut r);
            let r_amp = 2.0 + 0.45 * normal(&mut r);
            let p_amp = 0.25 + 0.08 * normal(&mut r);
            let (t_amp, st, qrs) = if abnormal {
                (-0.2 + 0.25 * normal(&mut r), 0.35 + 0.15 * normal(&mut r), 1.6)
            } else {
                (0.55 + 0.15 * normal(&mut r), 0.05 * normal(&mut r), 1.0)
            };
            let drift = 0.15 * normal(&mut r);
            let slope = 0.2 * normal(&mut r);
            let values = (0..len)
                .map(|j| {
                    let t = j as f64 / (len - 1) as f64;
                    let s = t - shift;
                    p_amp * bump(s, 0.2, 0.03)
                        - 0.3 * bump(s, 0.37, 0.01 * qrs)
                        + r_amp * bump(s, 0.4, 0.015 * qrs)
                        - 0.45 * bump(s, 0.43, 0.012 * qrs)
                        + st * bump(s, 0.55, 0.06)
                        + t_amp * bump(s, 0.7, 0.06)
                        + drift
                        + slope * t
                        + 0.05 * normal(&mut r)
                })
                .collect();
            (if abnormal { -1.0 } else { 1.0 }, values)
        })
        .collect()
}

pub fn ucr_text(rows: &[(f64, Vec<f64>)]) -> String {
    let mut s = String::new();
    for (label, values) in rows {
        write!(s, "{label}").unwrap();
        for v in values {
            write!(s, ",{v}").unwrap();
        }
        s.push('\n');
    }
    s
}

/// Writes `<dir>/SYNTH_TRAIN` and `<dir>/SYNTH_TEST` with 100 beats each.
pub fn write_pair(dir: &Path, seed: u64) -> (PathBuf, PathBuf) {
    let train = dir.join("SYNTH_TRAIN");
    let test = dir.join("SYNTH_TEST");
    std::fs::write(&train, ucr_text(&ecg_like(seed, 100, 96))).unwrap();
    std::fs::write(&test, ucr_text(&ecg_like(seed.wrapping_add(1), 100, 96))).unwrap();
    (train, test)
}
