//! Exhaustive sequence detection, the optimal Viterbi decoder and the
//! two-layer decoder on the same noisy frames.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tcm_noma::channel::{apply_channel, calibrate_noise, ChannelRealization};
use tcm_noma::decoder::{decode_two_layer, mlsd_exhaustive, viterbi_optimal, TwoLayerParams};
use tcm_noma::encoder::{transmit_frame, Frame};
use tcm_noma::harness::{design_tcm, SimConfig};

fn main() -> tcm_noma::Result<()> {
    let mut cfg = SimConfig::default();
    cfg.mapping.preset = Some("k4-d2".into());
    cfg.mapping.q = 1;
    cfg.code.r = 1;
    cfg.code.v = 2;
    cfg.code.parity_octal = Some(vec!["2".into(), "5".into()]);
    let design = design_tcm(&cfg)?;
    let s = &design.scheme;
    let sigma2 = calibrate_noise(2.0, s.spectral_efficiency(), design.avg_energy);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 0..5 {
        let frame = Frame::random(s.mapping.users(), s.q, 3, &mut rng);
        let tx = transmit_frame(s, &frame)?;
        let real = ChannelRealization::awgn(tx.units.len(), s.mapping.subcarriers(), sigma2);
        let y = apply_channel(&tx.grid(), &real, &mut rng)?;
        let ml = mlsd_exhaustive(s, &y, &real)?;
        let vit = viterbi_optimal(s, &y, &real)?;
        let two = decode_two_layer(s, &y, &real, &TwoLayerParams { lambda: 4, ..Default::default() })?;
        println!(
            "frame {n}: exhaustive {:.2}{}, viterbi {:.2}, two-layer {:.2} ({} qualified kits); correct {} {} {}",
            ml.metric,
            if ml.unique { "" } else { " (tie)" },
            vit.metric,
            two.metric,
            two.stats.qualified_counts().iter().sum::<usize>(),
            ml.frame == frame,
            vit.frame == frame,
            two.frame == frame
        );
    }
    Ok(())
}
