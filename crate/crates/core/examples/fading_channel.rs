//! Rayleigh fading tracks, noise calibration and block interleaving.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tcm_noma::channel::{calibrate_noise, sum_of_sinusoids, ChannelRealization, FadingParams, Interleaver};

fn main() -> tcm_noma::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = FadingParams::default();
    let track = sum_of_sinusoids(20_000, &p, &mut rng);
    let power = track.iter().map(|h| h.norm_sqr()).sum::<f64>() / track.len() as f64;
    println!("fading track power {power:.3}");
    for lag in [0, 10, 50, 200] {
        let r = track.iter().zip(&track[lag..]).map(|(a, b)| (a * b.conj()).re).sum::<f64>() / (track.len() - lag) as f64;
        println!("autocorrelation at lag {lag}: {r:.3}");
    }

    let il = Interleaver::new(4, 3)?;
    let data: Vec<u32> = (0..12).collect();
    let mixed = il.interleave(&data);
    println!("interleaved {mixed:?}, restored {:?}", il.deinterleave(&mixed, 12));

    let real = ChannelRealization::rayleigh(6, 4, &p, 0.5, Some(&il), &mut rng);
    println!("{} units of gains, first {:?}", real.units(), real.gains[0]);
    for ebn0 in [8.0, 14.0] {
        println!("Eb/N0 {ebn0} dB at 3 bit/tone, energy 326.19: sigma^2 {:.3}", calibrate_noise(ebn0, 3.0, 326.1875));
    }
    Ok(())
}
