//! Gray-labeled orthogonal baseline: constellations and nearest-point detection.

use num_complex::Complex64;
use tcm_noma::harness::ofdma::GrayConstellation;

fn main() -> tcm_noma::Result<()> {
    let psk = GrayConstellation::psk(3)?;
    let qam = GrayConstellation::qam(4)?;
    println!("8PSK energy {:.2}, 16QAM energy {:.2}", psk.mean_energy(), qam.mean_energy());
    for (l, z) in psk.points.iter().enumerate() {
        println!("label {l:03b}: {z:.3}");
    }
    let h = Complex64::from_polar(0.8, 0.4);
    let y = h * psk.points[5] + Complex64::new(0.05, -0.03);
    println!("faded and noisy label 5 detected as {}", psk.detect(y, h));
    Ok(())
}
