use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tcm_noma::channel::{apply_channel, ChannelRealization, ChannelKind};
use tcm_noma::decoder::{decode_two_layer, viterbi_optimal, TwoLayerParams};
use tcm_noma::encoder::{transmit_frame, Frame};
use tcm_noma::harness::{design_lc_tcm, design_tcm, Scheme, SimConfig, Simulator};

fn small() -> SimConfig {
    let mut cfg = SimConfig::default();
    cfg.mapping.preset = Some("k4-d2".into());
    cfg.mapping.q = 1;
    cfg.code.r = 1;
    cfg.code.v = 2;
    cfg.code.parity_octal = Some(vec!["2".into(), "5".into()]);
    cfg
}

#[test]
fn full_design_profile() {
    let d = design_tcm(&SimConfig::default()).unwrap();
    assert_eq!(d.signal_set.len(), 512);
    assert_eq!(d.base_m, 256);
    assert!((d.avg_energy - 326.1875).abs() < 1e-9);
    assert!(d.scheme.labeling.is_bijective());
    assert_eq!(d.scheme.spectral_efficiency(), 3.0);
    assert!(d.scheme.trellis.code.states() == 16);
    assert!(d.profile.d_free_sq.finite().is_some());
}

#[test]
fn lattice_design_matches_rate() {
    let cfg = SimConfig::default();
    let lc = design_lc_tcm(&cfg).unwrap();
    let tcm = design_tcm(&cfg).unwrap();
    assert_eq!(lc.scheme.spectral_efficiency(), tcm.scheme.spectral_efficiency());
    assert!(lc.scheme.labeling.is_bijective());
}

#[test]
fn two_layer_tracks_viterbi_at_moderate_noise() {
    let d = design_tcm(&small()).unwrap();
    let s = &d.scheme;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut agree = 0;
    for _ in 0..40 {
        let frame = Frame::random(s.mapping.users(), s.q, 6, &mut rng);
        let tx = transmit_frame(s, &frame).unwrap();
        let real = ChannelRealization::awgn(tx.units.len(), 4, 4.0);
        let y = apply_channel(&tx.grid(), &real, &mut rng).unwrap();
        let v = viterbi_optimal(s, &y, &real).unwrap();
        let t = decode_two_layer(s, &y, &real, &TwoLayerParams::default()).unwrap();
        assert!(t.metric >= v.metric - 1e-9);
        agree += usize::from(t.frame == v.frame);
    }
    assert!(agree >= 36, "{agree}/40");
}

#[test]
fn rayleigh_sweep_with_outer_code() {
    let mut cfg = SimConfig::default();
    cfg.channel.kind = ChannelKind::Rayleigh;
    cfg.sim.outer_code = true;
    cfg.sim.frame_bits = 120;
    cfg.sim.ebn0_db = vec![14.0];
    cfg.sim.max_frames = 2;
    cfg.sim.batch = 2;
    for scheme in [Scheme::TcmNoma, Scheme::Ofdma] {
        let sim = Simulator::new(&cfg, scheme).unwrap();
        let r = sim.run().unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].record.bits, 2 * 6 * 120);
        assert!(r[0].record.ber <= 0.5);
    }
}
