//! A tiny synthetic image task for smoke-testing training.

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Sample;

/// White `size` x `size` images with one dark bar: horizontal for class 0,
/// vertical for class 1. Bar position and thickness vary; classes alternate
/// so any prefix is balanced.
pub fn bars_dataset(n: usize, size: u32, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let label = i % 2;
            let thick = rng.gen_range(size / 4..=size / 3);
            let at = rng.gen_range(0..=size - thick);
            let shade = rng.gen_range(0..=40u8);
            let mut image = RgbImage::from_pixel(size, size, Rgb([255, 255, 255]));
            for (x, y, px) in image.enumerate_pixels_mut() {
                let along = if label == 0 { y } else { x };
                if (at..at + thick).contains(&along) {
                    *px = Rgb([shade, shade, shade]);
                }
            }
            Sample { image, label }
        })
        .collect()
}
