//! Superposed multi-dimensional points: mother constellation, duplicate
//! removal and energy shaping.

use tcm_noma::constellation::{build_mother, dedup_positions, select_signal_set, shape, BaseConstellation, ShapingMode};

fn main() -> tcm_noma::Result<()> {
    let base = BaseConstellation::square_qam(4)?;
    let mother = build_mother(&base, 3)?;
    let unique = dedup_positions(mother.iter(), 3, 1)?;
    println!("4QAM, d_f=3: {} combinations, {} distinct positions", mother.len(), unique.len());

    for mode in [ShapingMode::Dynamic, ShapingMode::Static] {
        let shaped = shape(&unique, 8, mode)?;
        println!("{mode:?} shaping to 8 points: mean energy {:.2}", shaped.mean_energy());
    }

    let (set, m) = select_signal_set(3, 512, 16, ShapingMode::Dynamic)?;
    println!(
        "512-point set needs a {m}QAM base; mean energy {:.4}, distinct {}",
        set.mean_energy(),
        set.positions_distinct()
    );
    Ok(())
}
