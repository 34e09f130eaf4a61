//! Per-user bits to superimposed subcarrier elements, including the flush
//! units that terminate every encoder.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tcm_noma::encoder::{transmit_frame, Frame};
use tcm_noma::harness::{design_tcm, SimConfig};

fn main() -> tcm_noma::Result<()> {
    let design = design_tcm(&SimConfig::default())?;
    let s = &design.scheme;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let frame = Frame::random(s.mapping.users(), s.q, 4, &mut rng);
    for j in 0..frame.users() {
        println!("user {}: {:?}", j + 1, frame.bit_stream(j));
    }
    let tx = transmit_frame(s, &frame)?;
    for (t, u) in tx.units.iter().enumerate() {
        let tag = if u.flush { " flush" } else { "" };
        let elements: Vec<String> = u.elements.iter().map(ToString::to_string).collect();
        println!("t={t}: codes {:?} elements [{}]{tag}", u.codes, elements.join(", "));
    }
    if let Some(z) = tx.user_element(s, 0, 0, 0) {
        println!("user 1 on subcarrier 1 at t=0: {z}");
    }
    println!("final states {:?}", tx.final_states);
    Ok(())
}
