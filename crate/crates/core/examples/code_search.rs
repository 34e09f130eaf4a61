//! Labeling, trellis construction and search for the code with the best
//! free distance.

use tcm_noma::distance::{delta_min, distance_profile, product_distance, search_code};
use tcm_noma::harness::{design_tcm, SimConfig};
use tcm_noma::trellis::build_code;

fn main() -> tcm_noma::Result<()> {
    let mut cfg = SimConfig::default();
    cfg.mapping.preset = Some("k4-d2".into());
    cfg.mapping.q = 1;
    cfg.code.r = 1;
    cfg.code.v = 2;
    cfg.code.parity_octal = Some(vec!["2".into(), "5".into()]);
    let design = design_tcm(&cfg)?;
    let labeling = &design.scheme.labeling;
    println!("{} labels per subcarrier, parallel distance {}", 1 << labeling.bits(), delta_min(labeling, 1));

    let fixed = build_code(1, 2, &["2", "5"])?;
    let p = distance_profile(&fixed, labeling, 6)?;
    println!("code [2, 5]: free distance {} (paths {})", p.d_free_sq, p.delta_free_sq);
    let pd = product_distance(&fixed, labeling, 6);
    println!("shortest error event {} branches, product {}", pd.shortest_error_event_len, pd.min_product);

    for v in 2..=3 {
        let (best, prof) = search_code(1, v, labeling, 3 * v as usize)?;
        println!("V={v}: best code {:?}, d_free^2 {}", best.code.octal(), prof.d_free_sq);
    }
    Ok(())
}
