//! Seeded random test fields.
//!
//! Every generator draws from a ChaCha stream, so a `(seed, stream)` pair
//! always yields the same fields regardless of thread count.

use std::f64::consts::PI;

use kslab::{GridBox, GridField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random smooth field on `[a, b]`: an offset plus eight sine modes with
/// amplitudes decaying like `1/k`.
pub fn smooth_line(rng: &mut ChaCha8Rng, a: f64, b: f64, n: usize) -> GridField {
    let offset = rng.random_range(-0.5..0.5);
    let modes: Vec<(f64, f64, f64)> = (1..=8)
        .map(|k| {
            let amp = rng.random_range(-1.0..1.0) / k as f64;
            let freq = rng.random_range(0.5..2.0) * k as f64;
            (amp, freq, rng.random_range(0.0..2.0 * PI))
        })
        .collect();
    let bbox = GridBox::cube(a, b, 1).expect("valid box");
    GridField::from_fn(&bbox, &[n], |x| {
        offset
            + modes
                .iter()
                .map(|(amp, freq, phase)| amp * (freq * x[0] + phase).sin())
                .sum::<f64>()
    })
    .expect("valid grid")
}

/// Random trigonometric polynomial of degree `band` on the unit torus.
pub fn periodic_line(rng: &mut ChaCha8Rng, n: usize, band: u32) -> GridField {
    let modes: Vec<(f64, f64, f64)> = (0..=band)
        .map(|k| {
            let amp = rng.random_range(-1.0..1.0) / (1.0 + k as f64);
            (amp, k as f64, rng.random_range(0.0..2.0 * PI))
        })
        .collect();
    let bbox = GridBox::cube(0.0, 1.0, 1).expect("valid box");
    GridField::from_fn(&bbox, &[n], |x| {
        modes
            .iter()
            .map(|(amp, k, phase)| amp * (2.0 * PI * k * x[0] + phase).cos())
            .sum()
    })
    .expect("valid grid")
    .with_periodic(true)
}

/// Random real band-limited field on the unit 2-torus with `|k_j| <= band`,
/// amplitudes normalized to unit total.
pub fn band_limited_2d(rng: &mut ChaCha8Rng, n: usize, band: i32, zero_mean: bool) -> GridField {
    let mut modes = Vec::new();
    for k1 in -band..=band {
        for k2 in 0..=band {
            if zero_mean && k1 == 0 && k2 == 0 {
                continue;
            }
            let amp: f64 = rng.random_range(-1.0..1.0);
            modes.push((k1 as f64, k2 as f64, amp, rng.random_range(0.0..2.0 * PI)));
        }
    }
    let total: f64 = modes.iter().map(|m| m.2.abs()).sum();
    let bbox = GridBox::cube(0.0, 1.0, 2).expect("valid box");
    GridField::from_fn(&bbox, &[n, n], |x| {
        modes
            .iter()
            .map(|(k1, k2, amp, phase)| amp / total * (2.0 * PI * (k1 * x[0] + k2 * x[1]) + phase).cos())
            .sum()
    })
    .expect("valid grid")
    .with_periodic(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = smooth_line(&mut rng(1, 0), -1.0, 1.0, 64);
        let b = smooth_line(&mut rng(1, 0), -1.0, 1.0, 64);
        let c = smooth_line(&mut rng(1, 1), -1.0, 1.0, 64);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_mean_band_limited_fields() {
        let f = band_limited_2d(&mut rng(3, 0), 32, 4, true);
        assert!(f.integrate().abs() < 1e-14);
        assert!(f.is_periodic());
        assert!(f.max_abs() <= 1.0 + 1e-12);
    }
}
